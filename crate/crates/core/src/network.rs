//! Complex two-port (ABCD) network algebra: lumped elements,
//! transmission-line segments, cascading and conversion to scattering /
//! one-port impedance responses.
//!
//! Harmonic convention is e^{+iωt}: an inductor has impedance iωL and a
//! capacitor 1/(iωC).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::units::C_LIGHT;

pub const DENOM_GUARD: f64 = 1e-300;

/// Chain (ABCD) matrix of a two-port evaluated at a single frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPort {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl TwoPort {
    pub fn identity() -> Self {
        TwoPort {
            a: Complex64::ONE,
            b: Complex64::ZERO,
            c: Complex64::ZERO,
            d: Complex64::ONE,
        }
    }

    pub fn series(z: Complex64) -> Self {
        TwoPort {
            a: Complex64::ONE,
            b: z,
            c: Complex64::ZERO,
            d: Complex64::ONE,
        }
    }

    pub fn shunt(y: Complex64) -> Self {
        TwoPort {
            a: Complex64::ONE,
            b: Complex64::ZERO,
            c: y,
            d: Complex64::ONE,
        }
    }

    /// Matrix product `self * other`; `self` is on the input side.
    pub fn then(&self, other: &TwoPort) -> TwoPort {
        TwoPort {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    /// AD - BC; equals 1 for any reciprocal network.
    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    /// S21 into real source/load impedances.
    pub fn s21(&self, r_source: f64, r_load: f64) -> Result<Complex64> {
        if r_source <= 0.0 || r_load <= 0.0 {
            return Err(Error::domain("source and load impedances must be positive"));
        }
        let denom = self.a * r_load + self.b + self.c * r_source * r_load + self.d * r_source;
        if denom.norm() < DENOM_GUARD {
            return Err(Error::numeric("vanishing denominator in S21 conversion"));
        }
        Ok(2.0 * (r_source * r_load).sqrt() / denom)
    }

    /// Input impedance seen at port 1 with port 2 terminated in `z_load`.
    pub fn input_impedance(&self, z_load: Complex64) -> Result<Complex64> {
        let denom = self.c * z_load + self.d;
        if denom.norm() < DENOM_GUARD {
            return Err(Error::numeric(
                "vanishing denominator in input-impedance conversion",
            ));
        }
        Ok((self.a * z_load + self.b) / denom)
    }
}

/// Lumped series-impedance or shunt-admittance element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LumpedElement {
    SeriesImpedance(Complex64),
    ShuntAdmittance(Complex64),
}

impl LumpedElement {
    pub fn series_inductor(l: f64, omega: f64) -> Self {
        LumpedElement::SeriesImpedance(Complex64::new(0.0, omega * l))
    }

    pub fn series_capacitor(c: f64, omega: f64) -> Self {
        // 1/(iωC) = -i/(ωC)
        LumpedElement::SeriesImpedance(Complex64::new(0.0, -1.0 / (omega * c)))
    }

    pub fn shunt_inductor(l: f64, omega: f64) -> Self {
        LumpedElement::ShuntAdmittance(Complex64::new(0.0, -1.0 / (omega * l)))
    }

    pub fn shunt_capacitor(c: f64, omega: f64) -> Self {
        LumpedElement::ShuntAdmittance(Complex64::new(0.0, omega * c))
    }

    pub fn abcd(&self, omega: f64) -> Result<TwoPort> {
        if omega <= 0.0 {
            return Err(Error::domain("element ABCD requires ω > 0"));
        }
        let value = match self {
            LumpedElement::SeriesImpedance(z) => z,
            LumpedElement::ShuntAdmittance(y) => y,
        };
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::domain("non-finite lumped element value"));
        }
        Ok(match self {
            LumpedElement::SeriesImpedance(z) => TwoPort::series(*z),
            LumpedElement::ShuntAdmittance(y) => TwoPort::shunt(*y),
        })
    }
}

/// Distributed transmission-line segment with characteristic impedance
/// `z0`, physical length `length`, attenuation `alpha` and effective
/// relative permittivity `epsilon` (β = ω√ε/c).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TLineSegment {
    pub z0: f64,
    pub length: f64,
    pub alpha: f64,
    pub epsilon: f64,
}

impl TLineSegment {
    pub fn new(z0: f64, length: f64, alpha: f64, epsilon: f64) -> Result<Self> {
        if z0 <= 0.0 {
            return Err(Error::domain("characteristic impedance must be positive"));
        }
        if length < 0.0 || alpha < 0.0 || epsilon <= 0.0 {
            return Err(Error::domain("invalid transmission-line segment"));
        }
        Ok(TLineSegment {
            z0,
            length,
            alpha,
            epsilon,
        })
    }

    /// Propagation constant γ = α + iβ with β = ω√ε/c.
    pub fn gamma(&self, omega: f64) -> Complex64 {
        Complex64::new(self.alpha, omega * self.epsilon.sqrt() / C_LIGHT)
    }

    pub fn abcd(&self, omega: f64) -> Result<TwoPort> {
        if omega <= 0.0 {
            return Err(Error::domain("segment ABCD requires ω > 0"));
        }
        let gl = self.gamma(omega) * self.length;
        let (sinh, cosh) = (gl.sinh(), gl.cosh());
        Ok(TwoPort {
            a: cosh,
            b: self.z0 * sinh,
            c: sinh / self.z0,
            d: cosh,
        })
    }

    /// Input impedance of the segment terminated in `z_load`, written in the
    /// iZ tanh(γl) convention used for resonator branch impedances.
    pub fn input_impedance(&self, omega: f64, z_load: Complex64) -> Result<Complex64> {
        self.abcd(omega)?.input_impedance(z_load)
    }
}

/// Cascade of two-ports, input side first.
pub fn cascade(ports: &[TwoPort]) -> Result<TwoPort> {
    if ports.is_empty() {
        return Err(Error::domain("cascade of an empty sequence"));
    }
    Ok(ports
        .iter()
        .skip(1)
        .fold(ports[0], |acc, p| acc.then(p)))
}
