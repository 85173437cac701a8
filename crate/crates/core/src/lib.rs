//! Frustration measures for spin-1/2 models with degenerate ground states.
//!
//! The crate builds pairwise spin Hamiltonians on arbitrary graphs, extracts
//! their (possibly degenerate) ground spaces, and evaluates per-bond
//! frustration `f_S = 1 - tr(rho_S Pi_S)` against the interlacing bound
//! `eps_d = 1 - (sum of the d largest eigenvalues of rho_S)`. Mixed ground
//! states are handled through the maximally mixed ground state (MMGS), and
//! the bound is split into convex-roof entanglement plus measurement-induced
//! classical correlations in [`correlations`].
//!
//! Modules:
//! - [`model`]: spin models, Hamiltonian construction, Pauli gauges, partial transposition
//! - [`eigen`]: Hermitian eigensolver, ground spaces, MMGS, partial traces, projectors
//! - [`metrics`]: `f_S`, `eps_d`, FF / INES / non-INES classification
//! - [`correlations`]: purification, convex roof, classical correlations, monogamy
//! - [`harness`]: random prototype models and reproducible conjecture sweeps
//! - [`xychain`]: thermodynamic-limit XY chain analytics
//! - [`presets`]: the small named models used throughout tests and the CLI

pub mod correlations;
pub mod eigen;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod model;
pub mod presets;
pub mod xychain;

pub use error::{Error, Result};

pub type C64 = num_complex::Complex64;
pub type CMatrix = nalgebra::DMatrix<C64>;
pub type CVector = nalgebra::DVector<C64>;

/// Largest entry modulus of a complex matrix.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Shortest round-trip decimal form, switching to exponent notation for
/// very small or very large magnitudes.
pub fn csv_float(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}
