//! Physical constants and unit conversions.
//!
//! Everything internal is SI (rad/s, H, F, Ω, m). User-facing interfaces
//! speak GHz/nH/fF/mm and convert at the boundary.

use std::f64::consts::PI;

/// Speed of light in vacuum (m/s).
pub const C_LIGHT: f64 = 299_792_458.0;

/// Planck constant (J s).
pub const PLANCK_H: f64 = 6.626_070_15e-34;

/// Elementary charge (C).
pub const E_CHARGE: f64 = 1.602_176_634e-19;

/// Magnetic flux quantum h/2e (Wb).
pub const PHI_0: f64 = PLANCK_H / (2.0 * E_CHARGE);

pub fn ghz_to_rads(f_ghz: f64) -> f64 {
    2.0 * PI * f_ghz * 1e9
}

pub fn rads_to_ghz(omega: f64) -> f64 {
    omega / (2.0 * PI * 1e9)
}

pub fn mhz_to_rads(f_mhz: f64) -> f64 {
    2.0 * PI * f_mhz * 1e6
}

pub fn rads_to_mhz(omega: f64) -> f64 {
    omega / (2.0 * PI * 1e6)
}

pub fn nh(v: f64) -> f64 {
    v * 1e-9
}

pub fn ff(v: f64) -> f64 {
    v * 1e-15
}

pub fn mm(v: f64) -> f64 {
    v * 1e-3
}

/// Charging energy E_C/h in GHz from a total shunt capacitance in farads.
pub fn charging_energy_ghz(c_sigma: f64) -> f64 {
    E_CHARGE * E_CHARGE / (2.0 * c_sigma) / PLANCK_H / 1e9
}

/// Josephson inductance (H) for a Josephson energy given as E_J/h in GHz.
pub fn josephson_inductance(ej_ghz: f64) -> f64 {
    let ej_joule = ej_ghz * 1e9 * PLANCK_H;
    let phi = PHI_0 / (2.0 * PI);
    phi * phi / ej_joule
}
