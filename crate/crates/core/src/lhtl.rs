//! Left-handed transmission-line unit cell: dispersion relation, Bloch
//! characteristic impedance and the analytic input impedance of a finite
//! N-cell line.
//!
//! The unit cell has a series branch (stray inductance L_r in series with
//! the cell capacitance C_l) and a shunt branch (cell inductance L_l in
//! parallel with stray capacitance C_r). The stray terms open a UV cutoff;
//! the series capacitor / shunt inductor swap produces the low-frequency
//! bandgap up to the infrared cutoff ω_IR = 1/(2√(L_l C_l)).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::network::TwoPort;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LhtlCell {
    /// Series capacitance (F).
    pub c_l: f64,
    /// Shunt inductance (H).
    pub l_l: f64,
    /// Parasitic series inductance (H).
    pub l_r: f64,
    /// Parasitic shunt capacitance (F).
    pub c_r: f64,
    /// Unit-cell length (m).
    pub dx: f64,
}

impl LhtlCell {
    pub fn new(c_l: f64, l_l: f64, l_r: f64, c_r: f64, dx: f64) -> Result<Self> {
        if c_l <= 0.0 || l_l <= 0.0 {
            return Err(Error::domain("C_l and L_l must be positive"));
        }
        if l_r < 0.0 || c_r < 0.0 {
            return Err(Error::domain("parasitic L_r and C_r must be nonnegative"));
        }
        if dx <= 0.0 {
            return Err(Error::domain("unit-cell length must be positive"));
        }
        Ok(LhtlCell { c_l, l_l, l_r, c_r, dx })
    }

    /// Infrared cutoff 1/(2√(L_l C_l)) of the ideal (parasitic-free) cell,
    /// in rad/s.
    pub fn omega_ir(&self) -> f64 {
        1.0 / (2.0 * (self.l_l * self.c_l).sqrt())
    }

    /// Series-branch impedance iωL_r + 1/(iωC_l).
    pub fn series_impedance(&self, omega: f64) -> Complex64 {
        Complex64::new(0.0, omega * self.l_r - 1.0 / (omega * self.c_l))
    }

    /// Shunt-branch admittance iωC_r + 1/(iωL_l).
    pub fn shunt_admittance(&self, omega: f64) -> Complex64 {
        Complex64::new(0.0, omega * self.c_r - 1.0 / (omega * self.l_l))
    }

    /// ABCD matrix of one unit cell in the input→output direction: shunt
    /// branch first, then the series branch. With this ordering an N-cell
    /// cascade terminated at the input by Z_s reproduces the analytic
    /// [`lhtl_input_impedance`] exactly.
    pub fn abcd(&self, omega: f64) -> TwoPort {
        TwoPort::shunt(self.shunt_admittance(omega))
            .then(&TwoPort::series(self.series_impedance(omega)))
    }
}

/// Dispersion solution at one frequency.
#[derive(Debug, Clone, Copy)]
pub struct DispersionPoint {
    pub omega: f64,
    /// Complex kΔx on the principal branch: Re ∈ [0, π], Im ≥ 0 so that
    /// e^{ikNΔx} decays toward increasing cell index.
    pub k_dx: Complex64,
    pub passband: bool,
    /// Bloch characteristic impedance Z_0l.
    pub z0l: Complex64,
}

#[derive(Debug, Clone)]
pub struct DispersionResult {
    pub points: Vec<DispersionPoint>,
}

/// kΔx = cos⁻¹[1 − ½(ωL_r − 1/ωC_l)(ωC_r − 1/ωL_l)], principal branch.
pub fn dispersion_at(cell: &LhtlCell, omega: f64) -> DispersionPoint {
    let p = (omega * cell.l_r - 1.0 / (omega * cell.c_l))
        * (omega * cell.c_r - 1.0 / (omega * cell.l_l));
    let arg = 1.0 - 0.5 * p;
    let passband = (-1.0..=1.0).contains(&arg);
    let mut k_dx = Complex64::new(arg, 0.0).acos();
    // decaying branch: |e^{ikNΔx}| ≤ 1
    if k_dx.im < 0.0 {
        k_dx = Complex64::new(k_dx.re, -k_dx.im);
    }
    if k_dx.re < 0.0 {
        k_dx = Complex64::new(-k_dx.re, k_dx.im);
    }
    let z0l = bloch_impedance(cell, omega, k_dx);
    DispersionPoint {
        omega,
        k_dx,
        passband,
        z0l,
    }
}

/// Z_0l = (iωL_r + 1/(iωC_l)) / (2i sin(kΔx/2)).
fn bloch_impedance(cell: &LhtlCell, omega: f64, k_dx: Complex64) -> Complex64 {
    let s = (k_dx / 2.0).sin();
    cell.series_impedance(omega) / (2.0 * I * s)
}

pub fn dispersion(cell: &LhtlCell, grid: &FrequencyGrid) -> DispersionResult {
    DispersionResult {
        points: grid.iter().map(|w| dispersion_at(cell, w)).collect(),
    }
}

/// Input impedance of an N-cell LHTL seen from its output end, with the
/// input end terminated in the source chain `z_s` (typically
/// 1/(iωC_cM^in) + R_0).
///
/// Evaluates the traveling-wave form with reflection coefficient
/// Γ = (Z_s e^{−ikΔx/2} − Z_0l)/(Z_s e^{ikΔx/2} + Z_0l), rescaled so that
/// only decaying exponentials appear.
pub fn lhtl_input_impedance(
    cell: &LhtlCell,
    n_cells: usize,
    z_s: Complex64,
    omega: f64,
) -> Result<Complex64> {
    if n_cells < 1 {
        return Err(Error::domain("LHTL needs at least one cell"));
    }
    let dp = dispersion_at(cell, omega);
    let k_dx = dp.k_dx;
    let sin_half = (k_dx / 2.0).sin();
    if sin_half.norm() < 1e-12 {
        return Err(Error::numeric(
            "sin(kΔx/2) underflow in LHTL impedance (band-edge frequency)",
        ));
    }
    let z0l = dp.z0l;
    let half = (I * k_dx / 2.0).exp();
    let gamma_refl = (z_s / half - z0l) / (z_s * half + z0l);
    // e^{2ikNΔx}; decaying branch keeps this bounded
    let e2 = (2.0 * I * k_dx * n_cells as f64).exp();
    let denom = e2 / half - gamma_refl * half;
    if denom.norm() < 1e-300 {
        return Err(Error::numeric("vanishing denominator in LHTL impedance"));
    }
    Ok(z0l * (e2 + gamma_refl) / denom)
}

/// Reflection coefficient from Γ = (Z_s e^{−ikΔx/2} − Z_0l)/(Z_s e^{ikΔx/2} + Z_0l).
pub fn reflection_coefficient(z_s: Complex64, z0l: Complex64, k_dx: Complex64) -> Complex64 {
    let half = (I * k_dx / 2.0).exp();
    (z_s / half - z0l) / (z_s * half + z0l)
}
