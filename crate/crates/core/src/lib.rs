//! Discrete J1-J2-J3 spin energies near the helimagnet/ferromagnet
//! transition, their chirality order parameters, entropy productions and
//! recovery-sequence experiments for the limiting wall energy
//! `(1/6)∫|[χ]|³ dH¹`.

pub mod diagnostics;
pub mod entropy;
pub mod error;
pub mod ground_states;
pub mod io;
pub mod lattice;
pub mod quadrature;
pub mod recovery;
pub mod relaxation;
pub mod spin_energy;
pub mod sum;

pub use error::{Error, Result};
