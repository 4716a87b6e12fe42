//! Small nonlinear least-squares toolbox: a Levenberg-Marquardt driver with
//! finite-difference Jacobians and a golden-section scalar minimizer.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LmConfig {
    pub max_iter: usize,
    /// Relative decrease of the sum of squares below which we stop.
    pub ftol: f64,
    /// Relative parameter step below which we stop.
    pub xtol: f64,
    pub lambda0: f64,
}

impl Default for LmConfig {
    fn default() -> Self {
        LmConfig {
            max_iter: 200,
            ftol: 1e-12,
            xtol: 1e-12,
            lambda0: 1e-3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LmFit {
    pub params: Vec<f64>,
    /// Root-mean-square residual at the solution.
    pub rms: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimize ||r(p)||² over p with damped Gauss-Newton steps. `residuals`
/// fills the residual vector for a parameter set; it may fail (e.g. model
/// domain errors), in which case the trial step is rejected.
pub fn levenberg_marquardt<F>(
    mut residuals: F,
    p0: &[f64],
    config: &LmConfig,
) -> Result<LmFit>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let n_par = p0.len();
    if n_par == 0 {
        return Err(Error::fit("no parameters to fit"));
    }
    let mut p = DVector::from_column_slice(p0);
    let mut r = DVector::from_vec(residuals(p.as_slice())?);
    let n_res = r.len();
    if n_res < n_par {
        return Err(Error::fit(format!(
            "underdetermined fit: {n_res} residuals for {n_par} parameters"
        )));
    }
    let mut cost = r.norm_squared();
    let mut lambda = config.lambda0;
    let mut converged = false;
    let mut iter = 0;

    while iter < config.max_iter {
        iter += 1;
        // forward-difference Jacobian
        let mut jac = DMatrix::zeros(n_res, n_par);
        for j in 0..n_par {
            let step = 1e-7 * p[j].abs().max(1e-9);
            let mut pj = p.clone();
            pj[j] += step;
            let rj = DVector::from_vec(residuals(pj.as_slice())?);
            for i in 0..n_res {
                jac[(i, j)] = (rj[i] - r[i]) / step;
            }
        }
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * &r;

        let mut accepted = false;
        for _ in 0..30 {
            let mut damped = jtj.clone();
            for j in 0..n_par {
                damped[(j, j)] += lambda * jtj[(j, j)].max(1e-30);
            }
            let Some(delta) = damped.lu().solve(&(-&jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let p_try = &p + &delta;
            let Ok(r_try_vec) = residuals(p_try.as_slice()) else {
                lambda *= 10.0;
                continue;
            };
            let r_try = DVector::from_vec(r_try_vec);
            let cost_try = r_try.norm_squared();
            if cost_try.is_finite() && cost_try < cost {
                let rel_drop = (cost - cost_try) / cost.max(1e-300);
                let rel_step = delta.norm() / p.norm().max(1e-300);
                p = p_try;
                r = r_try;
                cost = cost_try;
                lambda = (lambda * 0.3).max(1e-12);
                accepted = true;
                if rel_drop < config.ftol || rel_step < config.xtol {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if converged {
            break;
        }
        if !accepted {
            // no downhill step found at any damping: treat as stationary
            converged = cost.is_finite();
            break;
        }
    }

    Ok(LmFit {
        params: p.as_slice().to_vec(),
        rms: (cost / n_res as f64).sqrt(),
        iterations: iter,
        converged,
    })
}

/// Golden-section minimization of a unimodal scalar function on [a, b].
pub fn golden_section_min<F>(mut f: F, a: f64, b: f64, tol: f64, max_iter: usize) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..max_iter {
        if (b - a).abs() < tol {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    let xm = 0.5 * (a + b);
    let fm = f(xm);
    if f1 < f2 && f1 < fm {
        (x1, f1)
    } else if f2 < fm {
        (x2, f2)
    } else {
        (xm, fm)
    }
}
