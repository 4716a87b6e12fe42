//! Numerical workbench for hybrid left-handed/right-handed metamaterial
//! microwave resonators coupled to flux-tunable transmon qubits.
//!
//! The crate is organized around a small two-port network algebra
//! ([`network`]), the metamaterial circuit model ([`lhtl`], [`hybrid`]),
//! resonance cataloging ([`modes`]), the charge-basis transmon Hamiltonian
//! and its multimode extension ([`transmon`], [`coupled`]), coupling-strength
//! extraction ([`coupling`]), multimode Purcell loss ([`purcell`]) and the
//! dispersive ac Stark model ([`stark`]).

pub mod coupled;
pub mod coupling;
pub mod device;
pub mod error;
pub mod fit;
pub mod grid;
pub mod hybrid;
pub mod lhtl;
pub mod modes;
pub mod network;
pub mod purcell;
pub mod stark;
pub mod transmon;
pub mod units;

pub use error::{Error, Result};
pub use grid::FrequencyGrid;
