//! Semiclassical ac Stark model for a driven resonator mode dispersively
//! coupled to a transmon.
//!
//! The per-photon shift uses the denominator `δη − δ²`; a conventional
//! dispersive variant with denominator `δ(δ + η)` is available behind
//! [`ChiFormula::Standard`] because the two disagree on where the sign
//! boundary opposite δ = 0 sits.  σ_z convention: ground state maps to −1,
//! so positive χ raises the 0-1 transition.

use crate::error::{Error, Result};
use crate::units::rads_to_ghz;
use serde::{Deserialize, Serialize};

/// Which per-photon shift formula to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChiFormula {
    /// χ = g²η / (δη − δ²): sign boundaries at δ = 0 and δ = η.
    Primary,
    /// χ = g²η / (δ(δ + η)): sign boundaries at δ = 0 and δ = −η.
    Standard,
}

impl Default for ChiFormula {
    fn default() -> Self {
        ChiFormula::Primary
    }
}

/// A single driven-mode scenario. All angular frequencies in rad/s.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StarkScenario {
    /// Qubit 0-1 transition frequency.
    pub omega_q: f64,
    /// Qubit anharmonicity (negative for a transmon).
    pub eta: f64,
    /// Driven mode frequency.
    pub omega_i: f64,
    /// Mode linewidth, > 0.
    pub kappa: f64,
    /// Qubit-mode coupling.
    pub g: f64,
    /// Drive frequency.
    pub omega_d: f64,
    /// Effective drive amplitude.
    pub amplitude: f64,
}

impl StarkScenario {
    /// Qubit-mode detuning δ = ω_q − ω_i.
    pub fn delta(&self) -> f64 {
        self.omega_q - self.omega_i
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0) {
            return Err(Error::domain(format!(
                "mode linewidth must be positive, got {:.3e}",
                self.kappa
            )));
        }
        if self.eta == 0.0 {
            return Err(Error::domain("anharmonicity must be nonzero"));
        }
        Ok(())
    }
}

/// Relative guard width around each singular detuning.
const SINGULARITY_GUARD: f64 = 1e-6;

/// Per-photon qubit shift χ for the scenario's detuning.
///
/// Errors when δ sits within `1e-6·|η|` of either sign boundary of the
/// chosen formula; the shift diverges there and a large finite value would
/// be misleading.
pub fn chi(s: &StarkScenario, formula: ChiFormula) -> Result<f64> {
    s.validate()?;
    let delta = s.delta();
    let guard = SINGULARITY_GUARD * s.eta.abs();
    if delta.abs() < guard {
        return Err(Error::domain(format!(
            "per-photon shift singular: mode resonant with qubit (delta = {:.3e} rad/s)",
            delta
        )));
    }
    let other = match formula {
        ChiFormula::Primary => s.eta,
        ChiFormula::Standard => -s.eta,
    };
    if (delta - other).abs() < guard {
        return Err(Error::domain(format!(
            "per-photon shift singular: detuning at anharmonicity boundary (delta = {:.3e} rad/s)",
            delta
        )));
    }
    let denom = match formula {
        ChiFormula::Primary => delta * s.eta - delta * delta,
        ChiFormula::Standard => delta * (delta + s.eta),
    };
    Ok(s.g * s.g * s.eta / denom)
}

/// Steady-state intracavity photon number n̄ = Ω² / ((ω_i − ω_d)² + κ²/4).
pub fn mean_photons(s: &StarkScenario) -> Result<f64> {
    s.validate()?;
    let det = s.omega_i - s.omega_d;
    Ok(s.amplitude * s.amplitude / (det * det + 0.25 * s.kappa * s.kappa))
}

/// Qubit frequency shift χ·n̄.
pub fn stark_shift(s: &StarkScenario, formula: ChiFormula) -> Result<f64> {
    Ok(chi(s, formula)? * mean_photons(s)?)
}

/// One column of a Stark sweep: shifted qubit line plus theory overlay.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StarkMap {
    /// Sweep coordinate (power units or drive rad/s).
    pub sweep: Vec<f64>,
    /// Shifted 0-1 line in GHz per column.
    pub qubit_line_ghz: Vec<f64>,
    /// Photon number per column.
    pub nbar: Vec<f64>,
    /// Per-photon shift in MHz per column (constant for frequency sweeps).
    pub chi_mhz: Vec<f64>,
}

impl StarkMap {
    /// CSV rows `sweep_value, qubit_line_GHz, nbar, chi_MHz` with header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sweep_value,qubit_line_GHz,nbar,chi_MHz\n");
        for i in 0..self.sweep.len() {
            out.push_str(&format!(
                "{:.9e},{:.9},{:.9e},{:.6}\n",
                self.sweep[i], self.qubit_line_ghz[i], self.nbar[i], self.chi_mhz[i]
            ));
        }
        out
    }
}

/// Qubit line position vs drive power. `omega2_per_unit` is the single
/// fitted calibration from measured power to Ω².
pub fn power_sweep(
    base: &StarkScenario,
    powers: &[f64],
    omega2_per_unit: f64,
    formula: ChiFormula,
) -> Result<StarkMap> {
    let chi_val = chi(base, formula)?;
    let mut map = StarkMap {
        sweep: powers.to_vec(),
        qubit_line_ghz: Vec::with_capacity(powers.len()),
        nbar: Vec::with_capacity(powers.len()),
        chi_mhz: Vec::with_capacity(powers.len()),
    };
    for &p in powers {
        if p < 0.0 {
            return Err(Error::domain(format!("drive power must be >= 0, got {p}")));
        }
        let mut s = *base;
        s.amplitude = (omega2_per_unit * p).sqrt();
        let n = mean_photons(&s)?;
        map.qubit_line_ghz.push(rads_to_ghz(base.omega_q + chi_val * n));
        map.nbar.push(n);
        map.chi_mhz.push(chi_val / (2.0 * std::f64::consts::PI * 1e6));
    }
    Ok(map)
}

/// Qubit line position vs drive frequency at fixed amplitude. The shift
/// envelope is the photon-number Lorentzian centered on the mode.
pub fn frequency_sweep(
    base: &StarkScenario,
    drive_freqs: &[f64],
    formula: ChiFormula,
) -> Result<StarkMap> {
    let chi_val = chi(base, formula)?;
    let mut map = StarkMap {
        sweep: drive_freqs.to_vec(),
        qubit_line_ghz: Vec::with_capacity(drive_freqs.len()),
        nbar: Vec::with_capacity(drive_freqs.len()),
        chi_mhz: Vec::with_capacity(drive_freqs.len()),
    };
    for &wd in drive_freqs {
        let mut s = *base;
        s.omega_d = wd;
        let n = mean_photons(&s)?;
        map.qubit_line_ghz.push(rads_to_ghz(base.omega_q + chi_val * n));
        map.nbar.push(n);
        map.chi_mhz.push(chi_val / (2.0 * std::f64::consts::PI * 1e6));
    }
    Ok(map)
}
