//! Classical maps of quantum electron fluids.
//!
//! The crate maps the pair-distribution functions of ideal and interacting
//! electron fluids onto classical hypernetted-chain (HNC/MHNC) integral
//! equations through an extracted Pauli-exclusion potential, and ships two
//! companion calculators: Bohm's quantum potential for 1-D densities and the
//! thermal de Broglie classicality criterion.
//!
//! Everything except [`classicality`] works in Hartree atomic units
//! (ħ = m_e = e = 1, energies and temperatures in Hartree, lengths in bohr).
//!
//! Module map:
//!
//! - [`grid`], [`transform`]: radial meshes and 3-D Fourier–Bessel transforms
//! - [`ideal`]: non-interacting fermion g⁰(r) at T = 0 and finite T
//! - [`hnc`]: Ornstein–Zernike + HNC/MHNC closure, one or many components
//! - [`pauli`]: extraction and verification of the Pauli potential βP(r)
//! - [`chnc`]: spin-resolved classical map with Coulomb coupling, E_xc
//! - [`bohm`]: quantum potential and continuity diagnostics
//! - [`classicality`]: de Broglie wavelength and quantum/classical verdicts

pub mod bohm;
pub mod chnc;
pub mod classicality;
mod error;
pub mod grid;
pub mod hnc;
pub mod ideal;
pub mod par;
pub mod pauli;
pub mod quad;
pub mod transform;

pub use error::{Error, Result};
pub use grid::{RadialFn, RadialGrid, Space};
pub use par::Execution;
pub use transform::FourierBessel;
