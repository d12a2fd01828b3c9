//! Hill problem dynamics near the libration points: Hamiltonian expansion,
//! center-manifold reduction, Lissajous normalization, reduction to the Hopf
//! sphere and numerical tools to synthesize, correct and continue periodic
//! orbits.

pub mod center_manifold;
pub mod error;
pub mod hill;
pub mod hopf;
pub mod io;
pub mod integrator;
pub mod linear;
pub mod lissajous;
pub mod propagation;
pub mod tables;
pub mod workbench;

pub use error::{Error, Result};
pub use hill::{LocalState, RotState};
pub use hopf::{EquilibriumFamily, HopfPoint, OrbitKind};
pub use lissajous::{LissajousState, MeanLissajousState};
