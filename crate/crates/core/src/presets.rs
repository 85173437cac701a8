//! Small named models.
//!
//! Ring and chain sites are 0-indexed; the chord of [`xy_ring5_chord`] joins
//! sites 0 and 2 with antiferromagnetic sign (negated couplings).

use crate::model::{Bond, SpinModel};

pub fn ring(n: usize, coupling: [f64; 3]) -> SpinModel {
    let bonds = (0..n).map(|i| Bond::new(i, (i + 1) % n, coupling)).collect();
    SpinModel::new(n, bonds).expect("ring of at least three sites")
}

pub fn open_chain(n: usize, coupling: [f64; 3]) -> SpinModel {
    let bonds = (0..n.saturating_sub(1)).map(|i| Bond::new(i, i + 1, coupling)).collect();
    SpinModel::new(n, bonds).expect("chain of at least one site")
}

/// Ferromagnetic Ising triangle, couplings `(1, 0, 0)`.
pub fn ising_triangle() -> SpinModel {
    ring(3, [1.0, 0.0, 0.0])
}

/// Five-site ferromagnetic Ising ring.
pub fn ising_ring5() -> SpinModel {
    ring(5, [1.0, 0.0, 0.0])
}

/// Five-site ferromagnetic XY ring, couplings `(1, delta, 0)`.
pub fn xy_ring5(delta: f64) -> SpinModel {
    ring(5, [1.0, delta, 0.0])
}

/// [`xy_ring5`] plus an antiferromagnetic chord `S_0^x S_2^x + delta S_0^y S_2^y`.
pub fn xy_ring5_chord(delta: f64) -> SpinModel {
    let mut bonds = xy_ring5(delta).bonds().to_vec();
    bonds.push(Bond::new(0, 2, [-1.0, -delta, 0.0]));
    SpinModel::new(5, bonds).expect("chord is a new bond")
}

/// Open four-site ferromagnetic Heisenberg chain.
pub fn heisenberg_chain4() -> SpinModel {
    open_chain(4, [1.0, 1.0, 1.0])
}

/// [`heisenberg_chain4`] partially transposed on sites 1 and 3.
pub fn heisenberg_chain4_transposed() -> SpinModel {
    heisenberg_chain4()
        .with_partial_transpose([1, 3])
        .expect("sites 1 and 3 exist")
}

/// `(file stem, model)` for every bundled example.
pub fn bundled() -> Vec<(&'static str, SpinModel)> {
    vec![
        ("ising_triangle", ising_triangle()),
        ("ising5", ising_ring5()),
        ("xy5_d0.1", xy_ring5(0.1)),
        ("xy5_d0.1_chord", xy_ring5_chord(0.1)),
        ("heisenberg4", heisenberg_chain4()),
        ("heisenberg4_pt13", heisenberg_chain4_transposed()),
    ]
}
