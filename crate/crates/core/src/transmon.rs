//! Charge-basis transmon: flux-tunable Josephson energy, Hamiltonian
//! assembly and transition frequencies. Energies are E/h in GHz throughout.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmonSpec {
    /// Charging energy E_C/h (GHz).
    pub ec_ghz: f64,
    /// Maximum Josephson energy E_J0/h (GHz).
    pub ej0_ghz: f64,
    /// Offset charge n_g.
    pub n_g: f64,
    /// Junction asymmetry d = (E_J1 − E_J2)/(E_J1 + E_J2).
    pub asymmetry: f64,
    /// Charge-basis truncation: states n = −n_max ... +n_max.
    pub n_max: usize,
}

impl TransmonSpec {
    pub fn new(ec_ghz: f64, ej0_ghz: f64) -> Result<Self> {
        if ec_ghz <= 0.0 || ej0_ghz <= 0.0 {
            return Err(Error::domain("E_C and E_J0 must be positive"));
        }
        Ok(TransmonSpec {
            ec_ghz,
            ej0_ghz,
            n_g: 0.0,
            asymmetry: 0.0,
            n_max: 10,
        })
    }

    pub fn dim(&self) -> usize {
        2 * self.n_max + 1
    }

    /// E_J(Φ) = E_J0 |cos(πΦ/Φ₀)|, with the optional asymmetry correction
    /// √(1 + d² tan²(πΦ/Φ₀)).
    pub fn ej_at_flux(&self, phi_over_phi0: f64) -> f64 {
        let x = std::f64::consts::PI * phi_over_phi0;
        let c = x.cos();
        if self.asymmetry == 0.0 {
            self.ej0_ghz * c.abs()
        } else {
            let d = self.asymmetry;
            self.ej0_ghz * (c * c + d * d * x.sin().powi(2)).sqrt()
        }
    }

    /// Real symmetric charge-basis Hamiltonian (GHz) at a given Josephson
    /// energy: 4E_C(n − n_g)² on the diagonal, −E_J/2 hopping.
    pub fn hamiltonian(&self, ej_ghz: f64) -> DMatrix<f64> {
        let dim = self.dim();
        let mut h = DMatrix::zeros(dim, dim);
        let n0 = self.n_max as f64;
        for i in 0..dim {
            let n = i as f64 - n0;
            h[(i, i)] = 4.0 * self.ec_ghz * (n - self.n_g).powi(2);
            if i + 1 < dim {
                h[(i, i + 1)] = -ej_ghz / 2.0;
                h[(i + 1, i)] = -ej_ghz / 2.0;
            }
        }
        h
    }

    /// Sorted eigenvalues (GHz) and eigenvectors at flux φ.
    pub fn eigensystem(&self, phi_over_phi0: f64) -> (Vec<f64>, DMatrix<f64>) {
        let h = self.hamiltonian(self.ej_at_flux(phi_over_phi0));
        sorted_symmetric_eigen(h)
    }

    /// Bare transition frequencies (f01, f12) and anharmonicity
    /// η = f12 − f01 at flux φ.
    pub fn transitions(&self, phi_over_phi0: f64) -> (f64, f64, f64) {
        let (ev, _) = self.eigensystem(phi_over_phi0);
        let f01 = ev[1] - ev[0];
        let f12 = ev[2] - ev[1];
        (f01, f12, f12 - f01)
    }

    pub fn f01(&self, phi_over_phi0: f64) -> f64 {
        self.transitions(phi_over_phi0).0
    }

    /// |⟨0|n̂|1⟩| between the lowest two transmon eigenstates; converts the
    /// charge-coupling prefactor g into the effective half-splitting
    /// g_eff = g |⟨0|n̂|1⟩|.
    pub fn charge_matrix_element_01(&self, phi_over_phi0: f64) -> f64 {
        let (_, vecs) = self.eigensystem(phi_over_phi0);
        let dim = self.dim();
        let n0 = self.n_max as f64;
        let mut acc = 0.0;
        for i in 0..dim {
            let n = i as f64 - n0;
            acc += vecs[(i, 0)] * n * vecs[(i, 1)];
        }
        acc.abs()
    }
}

/// Dense symmetric eigendecomposition with ascending eigenvalues.
pub fn sorted_symmetric_eigen(h: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let dim = h.nrows();
    let se = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(dim, dim);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &DVector::from(se.eigenvectors.column(i).clone_owned()));
    }
    (values, vectors)
}
