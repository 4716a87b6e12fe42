//! Transmon coupled to one or more harmonic modes. Basis is the tensor
//! product charge ⊗ Fock₁ ⊗ ... ⊗ Fock_M; all energies are E/h in GHz.
//! H = H_q + Σ_i f_i a_i†a_i + Σ_i g_i n̂ (a_i + a_i†), so g_i is the
//! charge-coupling prefactor, not the half-splitting.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::transmon::{sorted_symmetric_eigen, TransmonSpec};

/// Dimension above which eigensolves switch from dense to Lanczos.
pub const DENSE_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpec {
    /// Bare mode frequency (GHz).
    pub freq_ghz: f64,
    /// Charge-coupling prefactor g_i (GHz).
    pub g_ghz: f64,
    /// Fock states kept per mode (occupation 0..n_fock-1).
    pub n_fock: usize,
}

impl ModeSpec {
    pub fn new(freq_ghz: f64, g_ghz: f64) -> Self {
        ModeSpec {
            freq_ghz,
            g_ghz,
            n_fock: 4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CoupledSystemSpec {
    pub transmon: TransmonSpec,
    pub modes: Vec<ModeSpec>,
}

impl CoupledSystemSpec {
    pub fn new(transmon: TransmonSpec, modes: Vec<ModeSpec>) -> Result<Self> {
        for m in &modes {
            if m.freq_ghz <= 0.0 {
                return Err(Error::domain("mode frequency must be positive"));
            }
            if m.n_fock < 2 {
                return Err(Error::domain("each mode needs at least 2 Fock states"));
            }
        }
        Ok(CoupledSystemSpec { transmon, modes })
    }

    pub fn dim(&self) -> usize {
        self.modes
            .iter()
            .fold(self.transmon.dim(), |d, m| d * m.n_fock)
    }

    /// Column-major-style strides: charge index is slowest, last mode fastest.
    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![0usize; self.modes.len()];
        let mut s = 1;
        for (i, m) in self.modes.iter().enumerate().rev() {
            strides[i] = s;
            s *= m.n_fock;
        }
        strides
    }

    /// Dense Hamiltonian (GHz) at flux φ. Useful for small systems and as
    /// the oracle for the matrix-free operator.
    pub fn hamiltonian(&self, phi_over_phi0: f64) -> DMatrix<f64> {
        let dim = self.dim();
        let mut h = DMatrix::zeros(dim, dim);
        let op = self.operator(phi_over_phi0);
        let mut basis = DVector::zeros(dim);
        let mut col = DVector::zeros(dim);
        for j in 0..dim {
            basis[j] = 1.0;
            op.apply(basis.as_slice(), col.as_mut_slice());
            h.set_column(j, &col);
            basis[j] = 0.0;
        }
        h
    }

    pub fn operator(&self, phi_over_phi0: f64) -> CoupledOperator<'_> {
        CoupledOperator {
            spec: self,
            hq: self.transmon.hamiltonian(self.transmon.ej_at_flux(phi_over_phi0)),
            strides: self.strides(),
            mode_stride: self.modes.iter().map(|m| m.n_fock).product(),
        }
    }

    /// Lowest `n_levels` eigenvalues (GHz, ascending) and eigenvectors at
    /// flux φ. Dense below DENSE_LIMIT, Lanczos with full
    /// reorthogonalization above.
    pub fn lowest_levels(&self, phi_over_phi0: f64, n_levels: usize) -> Result<(Vec<f64>, DMatrix<f64>)> {
        let dim = self.dim();
        if n_levels > dim {
            return Err(Error::domain("requested more levels than the Hilbert dimension"));
        }
        if dim <= DENSE_LIMIT {
            let (ev, vecs) = sorted_symmetric_eigen(self.hamiltonian(phi_over_phi0));
            Ok((
                ev[..n_levels].to_vec(),
                vecs.columns(0, n_levels).clone_owned(),
            ))
        } else {
            let op = self.operator(phi_over_phi0);
            lanczos_lowest(&op, n_levels)
        }
    }
}

/// Matrix-free H·v for the coupled system.
pub struct CoupledOperator<'a> {
    spec: &'a CoupledSystemSpec,
    hq: DMatrix<f64>,
    strides: Vec<usize>,
    mode_stride: usize,
}

impl CoupledOperator<'_> {
    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        let dim = self.dim();
        debug_assert_eq!(v.len(), dim);
        debug_assert_eq!(out.len(), dim);
        out.fill(0.0);
        let qdim = self.spec.transmon.dim();
        let n0 = self.spec.transmon.n_max as f64;
        let ms = self.mode_stride;

        // transmon block acts identically on every mode configuration
        for qi in 0..qdim {
            let diag = self.hq[(qi, qi)];
            let base = qi * ms;
            for r in 0..ms {
                out[base + r] += diag * v[base + r];
            }
            if qi + 1 < qdim {
                let hop = self.hq[(qi, qi + 1)];
                let up = (qi + 1) * ms;
                for r in 0..ms {
                    out[base + r] += hop * v[up + r];
                    out[up + r] += hop * v[base + r];
                }
            }
        }

        for (mi, mode) in self.spec.modes.iter().enumerate() {
            let stride = self.strides[mi];
            let nf = mode.n_fock;
            for idx in 0..dim {
                let occ = (idx / stride) % nf;
                // mode energy
                out[idx] += mode.freq_ghz * occ as f64 * v[idx];
                // coupling g n̂ (a + a†): lowering part written symmetrically
                if occ + 1 < nf {
                    let qi = idx / ms;
                    let n = qi as f64 - n0;
                    let amp = mode.g_ghz * n * ((occ + 1) as f64).sqrt();
                    let upper = idx + stride;
                    out[idx] += amp * v[upper];
                    out[upper] += amp * v[idx];
                }
            }
        }
    }
}

/// Lanczos with full reorthogonalization; returns the lowest `k` Ritz
/// pairs once their residual estimates fall below tolerance.
pub fn lanczos_lowest(op: &CoupledOperator, k: usize) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let dim = op.dim();
    let max_iter = (8 * k + 100).min(dim);
    let tol = 1e-10;

    // deterministic pseudo-random start vector
    let mut q = DVector::from_fn(dim, |i, _| {
        let x = (i as f64 + 1.0) * 0.618_033_988_749_894_9;
        (x - x.floor()) - 0.5
    });
    q /= q.norm();

    let mut basis: Vec<DVector<f64>> = vec![q.clone()];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = DVector::zeros(dim);

    for iter in 0..max_iter {
        op.apply(basis[iter].as_slice(), w.as_mut_slice());
        if iter > 0 {
            w.axpy(-betas[iter - 1], &basis[iter - 1], 1.0);
        }
        let alpha = basis[iter].dot(&w);
        w.axpy(-alpha, &basis[iter], 1.0);
        // full reorthogonalization, twice for safety
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&w);
                w.axpy(-c, b, 1.0);
            }
        }
        alphas.push(alpha);
        let beta = w.norm();

        if alphas.len() >= k + 2 {
            let (ritz, _) = tridiag_eigen(&alphas, &betas);
            // residual of the k-th Ritz pair is bounded by |beta * s_last|
            let (_, svecs) = tridiag_eigen(&alphas, &betas);
            let m = alphas.len();
            let worst = (0..k)
                .map(|j| (beta * svecs[(m - 1, j)]).abs())
                .fold(0.0f64, f64::max);
            if worst < tol * ritz[k - 1].abs().max(1.0) || beta < 1e-14 {
                return ritz_pairs(&alphas, &betas, &basis, k);
            }
        }
        if beta < 1e-14 {
            break;
        }
        betas.push(beta);
        basis.push(&w / beta);
    }
    if alphas.len() >= k {
        ritz_pairs(&alphas, &betas, &basis, k)
    } else {
        Err(Error::numeric("Lanczos failed to build a large enough Krylov space"))
    }
}

fn tridiag_eigen(alphas: &[f64], betas: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let m = alphas.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    sorted_symmetric_eigen(t)
}

fn ritz_pairs(
    alphas: &[f64],
    betas: &[f64],
    basis: &[DVector<f64>],
    k: usize,
) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let (ev, svecs) = tridiag_eigen(alphas, betas);
    let m = alphas.len();
    let dim = basis[0].len();
    let mut vectors = DMatrix::zeros(dim, k);
    for j in 0..k {
        let mut v = DVector::zeros(dim);
        for i in 0..m {
            v.axpy(svecs[(i, j)], &basis[i], 1.0);
        }
        v /= v.norm();
        vectors.set_column(j, &v);
    }
    Ok((ev[..k].to_vec(), vectors))
}

/// One tracked level across a flux sweep.
#[derive(Debug, Clone)]
pub struct TrackedLevel {
    /// Transition energy relative to the instantaneous ground state (GHz).
    pub energies: Vec<f64>,
    /// True where adiabatic tracking was ambiguous (best overlap < 0.5).
    pub flagged: Vec<bool>,
}

/// Eigenladder over flux with adiabatic level tracking by eigenvector
/// overlap. Returns `n_levels` excited levels above the ground state.
pub fn eigenladder_over_flux(
    spec: &CoupledSystemSpec,
    flux: &[f64],
    n_levels: usize,
) -> Result<Vec<TrackedLevel>> {
    if flux.is_empty() {
        return Err(Error::domain("flux sweep must be non-empty"));
    }
    // keep a few spares so crossings can swap levels in and out
    let n_keep = (n_levels + 1 + 4).min(spec.dim());
    let mut ladders = vec![
        TrackedLevel {
            energies: Vec::with_capacity(flux.len()),
            flagged: Vec::with_capacity(flux.len()),
        };
        n_levels
    ];

    let mut prev_vecs: Option<DMatrix<f64>> = None;
    // labels[j] = eigenstate column currently assigned to tracked level j
    let mut labels: Vec<usize> = (1..=n_levels).collect();

    for &phi in flux {
        let (ev, vecs) = spec.lowest_levels(phi, n_keep)?;
        if let Some(pv) = &prev_vecs {
            let overlaps = pv.transpose() * &vecs;
            let mut taken = vec![false; n_keep];
            let mut new_labels = vec![0usize; n_levels];
            for j in 0..n_levels {
                let prev_col = labels[j];
                let mut best = 0usize;
                let mut best_ov = -1.0;
                for c in 1..n_keep {
                    if taken[c] {
                        continue;
                    }
                    let ov = overlaps[(prev_col, c)].abs();
                    if ov > best_ov {
                        best_ov = ov;
                        best = c;
                    }
                }
                taken[best] = true;
                new_labels[j] = best;
                ladders[j].energies.push(ev[best] - ev[0]);
                ladders[j].flagged.push(best_ov < 0.5);
            }
            labels = new_labels;
        } else {
            for j in 0..n_levels {
                ladders[j].energies.push(ev[labels[j]] - ev[0]);
                ladders[j].flagged.push(false);
            }
        }
        prev_vecs = Some(vecs);
    }
    Ok(ladders)
}
