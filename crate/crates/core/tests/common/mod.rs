//! Independent reference computations for the integration tests.
//!
//! Nothing here calls into the library's optimizers or eigen helpers; the
//! oracles use nalgebra directly so that a bug on one side cannot mask the
//! same bug on the other.
#![allow(dead_code)]

pub mod fermions;

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Haar-random pure state of dimension `dim`.
pub fn random_state(dim: usize, rng: &mut ChaCha8Rng) -> DVector<C> {
    let v = DVector::from_fn(dim, |_, _| C::new(normal(rng), normal(rng)));
    let n = v.norm();
    v / C::new(n, 0.0)
}

/// Largest eigenvalue of a 2x2 Hermitian matrix, in closed form.
fn top_eigenvalue_2x2(m: &Matrix2<C>) -> f64 {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)].norm();
    0.5 * (a + d) + (0.25 * (a - d) * (a - d) + b * b).sqrt()
}

/// Unnormalized `eps_1` of a two-qubit vector `psi` (index `s + 2 r`):
/// `|psi|^2 - lambda_max(tr_R |psi><psi|)`.
fn weighted_eps1(psi: &[C; 4]) -> f64 {
    // M[s, r] = psi[s + 2r]; reduced state = M M^dagger.
    let m = Matrix2::new(psi[0], psi[2], psi[1], psi[3]);
    let rho = m * m.adjoint();
    (rho[(0, 0)].re + rho[(1, 1)].re) - top_eigenvalue_2x2(&rho)
}

/// Hermitian eigendecomposition via the `2n x 2n` real embedding, sorted
/// descending. Each eigenvalue appears twice in the embedding; one copy of
/// each pair is kept.
fn hermitian_eigs_desc(m: &DMatrix<C>) -> Vec<(f64, DVector<C>)> {
    let n = m.nrows();
    let real = DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let (i, j) = (r % n, c % n);
        let z = m[(i, j)];
        match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let eig = real.symmetric_eigen();
    let mut idx: Vec<usize> = (0..2 * n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut out: Vec<(f64, DVector<C>)> = Vec::new();
    for k in idx {
        let col = eig.eigenvectors.column(k);
        let v = DVector::from_fn(n, |i, _| C::new(col[i], col[i + n]));
        // Gram-Schmidt against kept vectors; the twin copy projects to zero.
        let mut w = v.clone();
        for (_, u) in &out {
            let overlap = u.dotc(&w);
            w -= u * overlap;
        }
        if w.norm() > 1e-6 {
            let nw = w.norm();
            out.push((eig.eigenvalues[k], w / C::new(nw, 0.0)));
        }
        if out.len() == n {
            break;
        }
    }
    out
}

/// Convex roof of `eps_1` for a rank-2 two-qubit state, minimized over all
/// two-member decompositions `U = [[cos t, -e^{-ip} sin t], [e^{ip} sin t, cos t]]`
/// acting on the eigen-ensemble: a dense `grid x grid` scan followed by a
/// shrinking-step local refinement around the best grid points.
pub fn grid_roof_rank2(rho: &DMatrix<C>, grid: usize) -> f64 {
    let eig = hermitian_eigs_desc(rho);
    let w: Vec<[C; 4]> = eig[..2]
        .iter()
        .map(|(p, v)| {
            let s = p.max(0.0).sqrt();
            [v[0] * s, v[1] * s, v[2] * s, v[3] * s]
        })
        .collect();
    let objective = |t: f64, p: f64| {
        let (s, c) = t.sin_cos();
        let e = C::from_polar(1.0, p);
        let a: [C; 4] = std::array::from_fn(|i| w[0][i] * c - e.conj() * w[1][i] * s);
        let b: [C; 4] = std::array::from_fn(|i| e * w[0][i] * s + w[1][i] * c);
        weighted_eps1(&a) + weighted_eps1(&b)
    };
    let half_pi = std::f64::consts::FRAC_PI_2;
    let tau = std::f64::consts::TAU;
    let mut scored = Vec::with_capacity(grid * grid);
    for i in 0..=grid {
        let t = half_pi * i as f64 / grid as f64;
        for j in 0..grid {
            let p = tau * j as f64 / grid as f64;
            scored.push((objective(t, p), t, p));
        }
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = scored[0].0;
    for &(v0, t0, p0) in scored.iter().take(8) {
        let (mut v, mut t, mut p) = (v0, t0, p0);
        let mut h = tau / grid as f64;
        while h > 1e-12 {
            let mut moved = false;
            for (dt, dp) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h), (h, h), (-h, -h), (h, -h), (-h, h)] {
                let cand = objective(t + dt, p + dp);
                if cand < v {
                    v = cand;
                    t += dt;
                    p += dp;
                    moved = true;
                    break;
                }
            }
            if !moved {
                h *= 0.5;
            }
        }
        best = best.min(v);
    }
    best
}

/// Two-qubit concurrence from the spin-flipped state.
pub fn concurrence(rho: &DMatrix<C>) -> f64 {
    // sigma_y (x) sigma_y in the basis s0 + 2 s1; its entries are real.
    let mut yy = DMatrix::<C>::zeros(4, 4);
    for (r, c, v) in [(0, 3, -1.0), (3, 0, -1.0), (1, 2, 1.0), (2, 1, 1.0)] {
        yy[(r, c)] = C::new(v, 0.0);
    }
    let tilde = &yy * rho.conjugate() * &yy;
    let sqrt_rho = {
        let eig = hermitian_eigs_desc(rho);
        let mut s = DMatrix::<C>::zeros(4, 4);
        for (l, v) in eig {
            s += &v * v.adjoint() * C::new(l.max(0.0).sqrt(), 0.0);
        }
        s
    };
    let r = &sqrt_rho * tilde * &sqrt_rho;
    let mut l: Vec<f64> = hermitian_eigs_desc(&r).into_iter().map(|(x, _)| x.max(0.0).sqrt()).collect();
    l.sort_by(|a, b| b.total_cmp(a));
    (l[0] - l[1] - l[2] - l[3]).max(0.0)
}

/// Convex roof of `eps_1` for any two-qubit state: `(1 - sqrt(1 - C^2)) / 2`.
pub fn wootters_roof(rho: &DMatrix<C>) -> f64 {
    let c = concurrence(rho);
    0.5 * (1.0 - (1.0 - c * c).max(0.0).sqrt())
}

/// Random rank-2 two-qubit mixture `p |a><a| + (1 - p) |b><b|`.
pub fn random_rank2(rng: &mut ChaCha8Rng) -> DMatrix<C> {
    let a = random_state(4, rng);
    let b = random_state(4, rng);
    let p: f64 = rng.random_range(0.1..0.9);
    &a * a.adjoint() * C::new(p, 0.0) + &b * b.adjoint() * C::new(1.0 - p, 0.0)
}

/// Random model on `n` sites: each pair bonded with probability 1/2 (at
/// least one bond), couplings uniform in [-1, 1], random Pauli gauges and a
/// random partial-transpose set.
pub fn random_model(n: usize, rng: &mut ChaCha8Rng) -> frustra::model::SpinModel {
    use frustra::model::{Bond, Pauli, SpinModel};
    let mut bonds = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(0.5) {
                bonds.push(Bond::new(i, j, std::array::from_fn(|_| rng.random_range(-1.0..1.0))));
            }
        }
    }
    if bonds.is_empty() {
        bonds.push(Bond::new(0, 1, std::array::from_fn(|_| rng.random_range(-1.0..1.0))));
    }
    let gauges = (0..n).map(|_| Pauli::ALL[rng.random_range(0..4)]).collect();
    let pt: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
    SpinModel::new(n, bonds)
        .and_then(|m| m.with_gauges(gauges))
        .and_then(|m| m.with_partial_transpose(pt))
        .expect("valid random model")
}

/// Random mixed state supported on the span of the columns of `basis`.
pub fn random_state_in(basis: &DMatrix<C>, rng: &mut ChaCha8Rng) -> DMatrix<C> {
    let dim = basis.nrows();
    let k = basis.ncols();
    let members = rng.random_range(1..=k + 1);
    let mut rho = DMatrix::<C>::zeros(dim, dim);
    for _ in 0..members {
        let v = basis * random_state(k, rng);
        rho += &v * v.adjoint() * C::new(rng.random_range(0.05..1.0), 0.0);
    }
    let t = rho.trace();
    rho / t
}

/// Random full-rank-ish density matrix of dimension `dim`.
pub fn random_density(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<C> {
    let g = DMatrix::from_fn(dim, dim, |_, _| C::new(normal(rng), normal(rng)));
    let rho = &g * g.adjoint();
    let t = rho.trace();
    rho / t
}

/// Largest entry modulus.
pub fn max_abs(m: &DMatrix<C>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Ascending eigenvalues of a Hermitian matrix via the real embedding.
pub fn hermitian_spectrum(m: &DMatrix<C>) -> Vec<f64> {
    let n = m.nrows();
    let real = DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let z = m[(r % n, c % n)];
        match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    // Every eigenvalue appears twice in the embedding.
    let mut v: Vec<f64> = real.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v.into_iter().step_by(2).collect()
}
