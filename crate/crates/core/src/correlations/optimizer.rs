//! Multi-start pattern search over column-orthonormal matrices.
//!
//! Both the convex roof and the measurement-induced correlations reduce to
//! maximizing `F(U) = sum_k top_d(sigma(U_k))` over `m x n` matrices `U`
//! with orthonormal columns, where row `U_k` is a coefficient vector and
//!
//! ```text
//! sigma(c) = V(c) V(c)^dagger,   V(c) = sum_a c_a B_a
//! ```
//!
//! for fixed `dim_s x t` blocks `B_a`. Left-multiplying `U` by a unitary
//! keeps its columns orthonormal, so the search moves by complex Givens
//! rotations on row pairs; only the two touched rows need re-evaluation.
//! After each improving sweep the sweep's accumulated rotation is replayed
//! as a Hooke-Jeeves pattern move, which helps along curved ridges.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::eigen::{orthonormalize, sum_largest};
use crate::metrics::gaussian;
use crate::{CMatrix, C64};

/// Search settings shared by the convex roof and the POVM optimizer.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub restarts: usize,
    /// Number of rows `m` (decomposition or POVM cardinality). `None` uses
    /// `n^2`, with `n` the number of columns.
    pub cardinality: Option<usize>,
    /// The search stops once the rotation step falls below this angle.
    pub step_tol: f64,
    /// Sweep budget per restart; hitting it clears the convergence flag.
    pub max_sweeps: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { restarts: 32, cardinality: None, step_tol: 1e-7, max_sweeps: 20_000, seed: 0 }
    }
}

pub(crate) struct RowObjective {
    /// `B_a`, each `dim_s x t`.
    blocks: Vec<CMatrix>,
    d: usize,
}

impl RowObjective {
    pub(crate) fn new(blocks: Vec<CMatrix>, d: usize) -> Self {
        debug_assert!(!blocks.is_empty());
        RowObjective { blocks, d }
    }

    pub(crate) fn columns(&self) -> usize {
        self.blocks.len()
    }

    /// `sigma(c)`, the unnormalized reduced state of one row.
    pub(crate) fn sigma(&self, row: &[C64]) -> CMatrix {
        let mut v = CMatrix::zeros(self.blocks[0].nrows(), self.blocks[0].ncols());
        for (c, b) in row.iter().zip(&self.blocks) {
            if *c != C64::new(0.0, 0.0) {
                v += b * *c;
            }
        }
        &v * v.adjoint()
    }

    fn value(&self, row: &[C64]) -> f64 {
        sum_largest(&self.sigma(row), self.d)
    }
}

#[derive(Clone, Debug)]
pub(crate) struct SearchResult {
    /// Best `F` found.
    pub value: f64,
    /// Row-major `m x n` maximizer.
    pub rows: Vec<Vec<C64>>,
    pub converged: bool,
    /// Restarts whose final value lies within `agree_tol` of the best.
    pub agreeing_restarts: usize,
}

const AGREE_TOL: f64 = 1e-6;

pub(crate) fn maximize(obj: &RowObjective, cfg: &SearchConfig) -> SearchResult {
    let n = obj.columns();
    let m = cfg.cardinality.unwrap_or(n * n).max(n);
    let runs: Vec<(f64, Vec<Vec<C64>>, bool)> = (0..cfg.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(r as u64);
            let start = random_isometry(m, n, &mut rng);
            pattern_search(obj, start, cfg)
        })
        .collect();
    // Deterministic reduction: best value, ties to the lowest restart index.
    let best_restart = (0..runs.len())
        .reduce(|a, b| if runs[b].0 > runs[a].0 { b } else { a })
        .expect("at least one restart");
    let best = runs[best_restart].0;
    let agreeing_restarts = runs.iter().filter(|r| best - r.0 <= AGREE_TOL).count();
    let (value, rows, converged) = runs.into_iter().nth(best_restart).expect("index in range");
    SearchResult { value, rows, converged, agreeing_restarts }
}

fn random_isometry(m: usize, n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<C64>> {
    loop {
        let g = CMatrix::from_fn(m, n, |_, _| C64::new(gaussian(rng), gaussian(rng)));
        let q = orthonormalize(&g, 1e-6).expect("finite gaussian draws");
        if q.ncols() == n {
            return (0..m).map(|r| (0..n).map(|c| q[(r, c)]).collect()).collect();
        }
    }
}

fn rotate(a: &[C64], b: &[C64], angle: f64, phase: f64) -> (Vec<C64>, Vec<C64>) {
    let (s, c) = angle.sin_cos();
    let e = C64::from_polar(s, phase);
    let na = a.iter().zip(b).map(|(x, y)| x * c - e.conj() * y).collect();
    let nb = a.iter().zip(b).map(|(x, y)| e * x + y * c).collect();
    (na, nb)
}

/// Smallest gain that counts as an improvement.
const IMPROVE_TOL: f64 = 1e-12;

/// A sweep gaining less than this in total halves the step.
const SWEEP_GAIN_TOL: f64 = 1e-10;

fn rotate_rows(m: &CMatrix, k: usize, l: usize, angle: f64, phase: f64) -> (nalgebra::RowDVector<C64>, nalgebra::RowDVector<C64>) {
    let (s, c) = angle.sin_cos();
    let e = C64::from_polar(s, phase);
    let (a, b) = (m.row(k).clone_owned(), m.row(l).clone_owned());
    (&a * C64::new(c, 0.0) - &b * e.conj(), &a * e + &b * C64::new(c, 0.0))
}

const PHASES: [f64; 4] = [0.0, std::f64::consts::FRAC_PI_2, std::f64::consts::PI, 3.0 * std::f64::consts::FRAC_PI_2];

fn pattern_search(obj: &RowObjective, mut rows: Vec<Vec<C64>>, cfg: &SearchConfig) -> (f64, Vec<Vec<C64>>, bool) {
    let m = rows.len();
    let n = obj.columns();
    let mut vals: Vec<f64> = rows.iter().map(|r| obj.value(r)).collect();
    let mut step = 0.5;
    let mut converged = false;
    for _ in 0..cfg.max_sweeps {
        let mut improved = false;
        let start_total: f64 = vals.iter().sum();
        // Product of the rotations applied during this sweep.
        let mut moves = CMatrix::identity(m, m);
        for k in 0..m {
            for l in k + 1..m {
                let mut current = vals[k] + vals[l];
                for &phase in &PHASES {
                    let mut angle = step;
                    let mut moved = false;
                    // Expand along a successful direction while it keeps paying off.
                    for _ in 0..8 {
                        let (ra, rb) = rotate(&rows[k], &rows[l], angle, phase);
                        let (va, vb) = (obj.value(&ra), obj.value(&rb));
                        if va + vb > current + IMPROVE_TOL {
                            rows[k] = ra;
                            rows[l] = rb;
                            vals[k] = va;
                            vals[l] = vb;
                            current = va + vb;
                            let (mk, ml) = rotate_rows(&moves, k, l, angle, phase);
                            moves.set_row(k, &mk);
                            moves.set_row(l, &ml);
                            moved = true;
                            angle *= 2.0;
                        } else {
                            break;
                        }
                    }
                    if moved {
                        improved = true;
                        break;
                    }
                }
            }
        }
        if improved {
            // Pattern move: repeat the whole sweep's displacement while it helps.
            let mut total: f64 = vals.iter().sum();
            for _ in 0..8 {
                let u = CMatrix::from_fn(m, n, |r, c| rows[r][c]);
                let next = &moves * u;
                let cand: Vec<Vec<C64>> = (0..m).map(|r| next.row(r).iter().copied().collect()).collect();
                let cand_vals: Vec<f64> = cand.iter().map(|r| obj.value(r)).collect();
                let cand_total: f64 = cand_vals.iter().sum();
                if cand_total > total + IMPROVE_TOL {
                    rows = cand;
                    vals = cand_vals;
                    total = cand_total;
                } else {
                    break;
                }
            }
        }
        if !improved || vals.iter().sum::<f64>() - start_total < SWEEP_GAIN_TOL {
            step *= 0.5;
            if step < cfg.step_tol {
                converged = true;
                break;
            }
        }
    }
    (vals.iter().sum(), rows, converged)
}
