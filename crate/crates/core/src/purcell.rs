//! Qubit environment admittance and multimode Purcell T1. The qubit sees
//! two branches: the readout resonator through C_QR and the hybrid
//! metamaterial through C_QM; their admittances add at the qubit node.
//! A 1/ω dielectric-loss floor combines with the Purcell rate pointwise.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::lhtl::{lhtl_input_impedance, LhtlCell};
use crate::network::TLineSegment;

/// Readout branch: a distributed resonator tapped between two segments,
/// each running out to a coupling capacitor and a real load R_0.
#[derive(Debug, Clone, Copy)]
pub struct ReadoutBranch {
    pub c_qr: f64,
    pub l_a: f64,
    pub l_b: f64,
    pub z0: f64,
    pub c_in: f64,
    pub c_out: f64,
    pub r0: f64,
    /// Attenuation constant (1/m) of the resonator segments.
    pub alpha: f64,
    pub epsilon: f64,
}

/// Metamaterial branch: the tap splits the RHTL into an output-side
/// segment and a LHTL-side segment.
#[derive(Debug, Clone, Copy)]
pub struct MetamaterialBranch {
    pub c_qm: f64,
    pub cell: LhtlCell,
    pub n_cells: usize,
    /// RHTL length between the tap and the output coupler.
    pub l_out: f64,
    /// RHTL length between the tap and the LHTL.
    pub l_in: f64,
    pub z0: f64,
    pub c_cm_in: f64,
    pub c_cm_out: f64,
    pub r0: f64,
    pub alpha: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct EnvironmentSpec {
    pub readout: ReadoutBranch,
    pub metamaterial: MetamaterialBranch,
}

impl EnvironmentSpec {
    pub fn validate(&self) -> Result<()> {
        let r = &self.readout;
        let m = &self.metamaterial;
        let caps = [r.c_qr, r.c_in, r.c_out, m.c_qm, m.c_cm_in, m.c_cm_out];
        if caps.iter().any(|&c| c <= 0.0) {
            return Err(Error::domain("all coupling capacitances must be positive"));
        }
        if [r.l_a, r.l_b, m.l_out, m.l_in].iter().any(|&l| l <= 0.0) {
            return Err(Error::domain("all segment lengths must be positive"));
        }
        Ok(())
    }
}

fn series_cap(omega: f64, c: f64) -> Complex64 {
    Complex64::new(0.0, -1.0 / (omega * c))
}

/// Impedance of the readout branch seen from the qubit node: the coupling
/// capacitor in series with the two resonator segments in parallel, each
/// terminated by its coupler and R_0.
pub fn readout_impedance(r: &ReadoutBranch, omega: f64) -> Result<Complex64> {
    if omega <= 0.0 {
        return Err(Error::domain("impedance evaluation requires ω > 0"));
    }
    let seg_a = TLineSegment::new(r.z0, r.l_a, r.alpha, r.epsilon)?;
    let seg_b = TLineSegment::new(r.z0, r.l_b, r.alpha, r.epsilon)?;
    let z_a = seg_a.input_impedance(omega, series_cap(omega, r.c_in) + r.r0)?;
    let z_b = seg_b.input_impedance(omega, series_cap(omega, r.c_out) + r.r0)?;
    Ok(series_cap(omega, r.c_qr) + z_a * z_b / (z_a + z_b))
}

/// Impedance of the metamaterial branch seen from the qubit node: C_QM in
/// series with (output segment) ∥ (LHTL-side segment terminated by the
/// analytic LHTL input impedance).
pub fn metamaterial_impedance(m: &MetamaterialBranch, omega: f64) -> Result<Complex64> {
    if omega <= 0.0 {
        return Err(Error::domain("impedance evaluation requires ω > 0"));
    }
    let seg_out = TLineSegment::new(m.z0, m.l_out, m.alpha, m.epsilon)?;
    let seg_in = TLineSegment::new(m.z0, m.l_in, m.alpha, m.epsilon)?;
    let z_ma = seg_out.input_impedance(omega, series_cap(omega, m.c_cm_out) + m.r0)?;
    let z_s = series_cap(omega, m.c_cm_in) + m.r0;
    let z_lhtl = lhtl_input_impedance(&m.cell, m.n_cells, z_s, omega)?;
    let z_mb = seg_in.input_impedance(omega, z_lhtl)?;
    Ok(series_cap(omega, m.c_qm) + z_ma * z_mb / (z_ma + z_mb))
}

/// Total environment admittance at the qubit node.
pub fn environment_admittance(env: &EnvironmentSpec, omega: f64) -> Result<Complex64> {
    let z_r = readout_impedance(&env.readout, omega)?;
    let z_m = metamaterial_impedance(&env.metamaterial, omega)?;
    Ok(1.0 / z_r + 1.0 / z_m)
}

#[derive(Debug, Clone)]
pub struct T1Curve {
    pub grid: FrequencyGrid,
    pub t1_total: Vec<f64>,
    pub t1_purcell: Vec<f64>,
    pub t1_floor: Vec<f64>,
    /// True where Re Y ≤ 0 (numerical artifact); Purcell loss treated as
    /// absent there and the point excluded from statistics.
    pub flagged: Vec<bool>,
    pub a_const: f64,
}

/// T1(ω) = 1/(1/T1_P + 1/T1_f) with T1_P = C/Re[Y(ω)] and T1_f = A/ω.
pub fn t1_curve(
    env: &EnvironmentSpec,
    c_shunt: f64,
    a_const: f64,
    grid: &FrequencyGrid,
) -> Result<T1Curve> {
    env.validate()?;
    if c_shunt <= 0.0 || a_const <= 0.0 {
        return Err(Error::domain("shunt capacitance and A must be positive"));
    }
    let n = grid.len();
    let mut t1_total = Vec::with_capacity(n);
    let mut t1_purcell = Vec::with_capacity(n);
    let mut t1_floor = Vec::with_capacity(n);
    let mut flagged = Vec::with_capacity(n);
    for w in grid.iter() {
        let re_y = environment_admittance(env, w)?.re;
        let floor = a_const / w;
        let (purcell, flag) = if re_y > 0.0 {
            (c_shunt / re_y, false)
        } else {
            (f64::INFINITY, true)
        };
        let total = 1.0 / (1.0 / purcell + 1.0 / floor);
        t1_total.push(total);
        t1_purcell.push(purcell);
        t1_floor.push(floor);
        flagged.push(flag);
    }
    Ok(T1Curve {
        grid: grid.clone(),
        t1_total,
        t1_purcell,
        t1_floor,
        flagged,
        a_const,
    })
}
