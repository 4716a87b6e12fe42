use crate::error::{Error, Result};
use crate::units;

/// Ordered grid of angular frequencies (rad/s), strictly increasing and
/// positive.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    points: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::domain("frequency grid must be nonempty"));
        }
        for w in &points {
            if !w.is_finite() || *w <= 0.0 {
                return Err(Error::domain(format!(
                    "frequency grid points must be finite and positive, got {w}"
                )));
            }
        }
        if points.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::domain("frequency grid must be strictly increasing"));
        }
        Ok(Self { points })
    }

    /// Uniform grid between two frequencies given in GHz.
    pub fn linspace_ghz(fmin_ghz: f64, fmax_ghz: f64, n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::domain("grid needs at least one point"));
        }
        if n == 1 {
            return Self::new(vec![units::ghz_to_rads(fmin_ghz)]);
        }
        if fmax_ghz <= fmin_ghz {
            return Err(Error::domain("fmax must exceed fmin"));
        }
        let w0 = units::ghz_to_rads(fmin_ghz);
        let w1 = units::ghz_to_rads(fmax_ghz);
        let step = (w1 - w0) / (n - 1) as f64;
        Self::new((0..n).map(|i| w0 + step * i as f64).collect())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_nonmonotone() {
        assert!(FrequencyGrid::new(vec![]).is_err());
        assert!(FrequencyGrid::new(vec![2.0, 1.0]).is_err());
        assert!(FrequencyGrid::new(vec![1.0, 1.0]).is_err());
        assert!(FrequencyGrid::new(vec![-1.0, 1.0]).is_err());
    }

    #[test]
    fn linspace_endpoints() {
        let g = FrequencyGrid::linspace_ghz(4.0, 10.0, 7).unwrap();
        assert_eq!(g.len(), 7);
        assert!((units::rads_to_ghz(g.points()[0]) - 4.0).abs() < 1e-12);
        assert!((units::rads_to_ghz(g.points()[6]) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn single_point_grid() {
        let g = FrequencyGrid::linspace_ghz(5.0, 5.0, 1).unwrap();
        assert_eq!(g.len(), 1);
    }
}
