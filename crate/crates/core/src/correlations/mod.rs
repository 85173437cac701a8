//! Convex-roof entanglement, measurement-induced classical correlations and
//! their monogamy on purifications.
//!
//! For a state `rho_SR` the convex roof
//!
//! ```text
//! E_d = inf over {p_k, psi_k} of  sum_k p_k eps_d(tr_R |psi_k><psi_k|)
//! ```
//!
//! is searched over decompositions `|psi~_k> = sum_j U_kj sqrt(p_j)|v_j>`
//! generated by column-orthonormal `U` acting on the eigen-ensemble of
//! `rho_SR`. Because `eps_d` is homogeneous, the weighted objective is
//! `1 - sum_k top_d(tr_R |psi~_k><psi~_k|)` and never needs normalization.
//!
//! Classical correlations `C_d = eps_d(rho_S) - min_M sum_x p_x eps_d(rho_S^x)`
//! use rank-one POVMs `M_x = |mu_x><mu_x|` on `A`, whose stacked rows
//! `<mu_x|` again form a column-orthonormal matrix.
//!
//! Both searches are local, so `E` comes back as an upper estimate and `C`
//! as a lower estimate of the true values.

mod optimizer;

pub use optimizer::SearchConfig;

use rand::Rng;

use crate::eigen::{eig_matrix, sum_largest, Bipartition, DensityMatrix};
use crate::error::{validation, Result};
use crate::metrics::{epsilon_d, gaussian, GroundAnalysis};
use crate::model::SpinModel;
use crate::{CMatrix, CVector, C64};
use optimizer::{maximize, RowObjective};

/// Eigenvalues below this are treated as zero when building ensembles.
const RANK_TOL: f64 = 1e-12;

/// Pure-state decomposition `rho = sum_k p_k |psi_k><psi_k|`.
#[derive(Clone, Debug)]
pub struct PureStateDecomposition {
    pub weights: Vec<f64>,
    /// Normalized members in the input state's basis; zero-weight members
    /// are kept as zero vectors so that indices match the isometry rows.
    pub states: Vec<CVector>,
    /// The `m x r` column-orthonormal matrix that generated the decomposition.
    pub isometry: CMatrix,
}

impl PureStateDecomposition {
    /// `sum_k p_k |psi_k><psi_k|`.
    pub fn reassemble(&self) -> CMatrix {
        let dim = self.states[0].len();
        let mut out = CMatrix::zeros(dim, dim);
        for (p, psi) in self.weights.iter().zip(&self.states) {
            out += psi * psi.adjoint() * C64::new(*p, 0.0);
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct RoofEstimate {
    pub value: f64,
    pub decomposition: PureStateDecomposition,
    pub converged: bool,
    pub agreeing_restarts: usize,
}

/// Rank-one POVM on the measured party with its outcome statistics.
#[derive(Clone, Debug)]
pub struct Povm {
    pub elements: Vec<CMatrix>,
    pub probabilities: Vec<f64>,
    /// Post-measurement states of the unmeasured party (zero matrix for
    /// outcomes of vanishing probability).
    pub post_states: Vec<CMatrix>,
}

#[derive(Clone, Debug)]
pub struct CorrelationEstimate {
    pub value: f64,
    pub povm: Povm,
    pub converged: bool,
    pub agreeing_restarts: usize,
}

/// Eigen-ensemble `sqrt(p_j) |v_j>` of a positive matrix, dropping null
/// directions.
fn ensemble(m: &CMatrix) -> Result<Vec<CVector>> {
    let (vals, vecs) = eig_matrix(m)?;
    Ok(vals
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &p)| p > RANK_TOL)
        .map(|(j, &p)| vecs.column(j) * C64::new(p.sqrt(), 0.0))
        .collect())
}

fn check_d(d: usize, dim_s: usize) -> Result<()> {
    if d == 0 || d > dim_s {
        return Err(validation(format!("d = {d} outside 1..={dim_s}")));
    }
    Ok(())
}

fn check_split(rho: &DensityMatrix, split: &Bipartition) -> Result<()> {
    if rho.dim() != split.dim() {
        return Err(validation(format!(
            "state has dimension {} but the bipartition covers {}",
            rho.dim(),
            split.dim()
        )));
    }
    Ok(())
}

/// Upper estimate of the convex roof of `eps_d` for `rho` split as `S|R`.
pub fn convex_roof(rho: &DensityMatrix, split: &Bipartition, d: usize, cfg: &SearchConfig) -> Result<RoofEstimate> {
    check_split(rho, split)?;
    check_d(d, split.dim_s())?;
    let members = ensemble(rho.matrix())?;
    let total: f64 = members.iter().map(|w| w.norm_squared()).sum();
    let r = members.len();
    let blocks: Vec<CMatrix> = members.iter().map(|w| split.coefficients(w)).collect();
    let obj = RowObjective::new(blocks, d);

    let (value, isometry, converged, agreeing) = if r == 1 {
        let one = CMatrix::from_element(1, 1, C64::new(1.0, 0.0));
        (total - sum_largest(&obj.sigma(&[C64::new(1.0, 0.0)]), d), one, true, cfg.restarts.max(1))
    } else {
        let found = maximize(&obj, cfg);
        let m = found.rows.len();
        let u = CMatrix::from_fn(m, r, |k, j| found.rows[k][j]);
        (total - found.value, u, found.converged, found.agreeing_restarts)
    };

    let mut weights = Vec::with_capacity(isometry.nrows());
    let mut states = Vec::with_capacity(isometry.nrows());
    for k in 0..isometry.nrows() {
        let mut psi = CVector::zeros(rho.dim());
        for (j, w) in members.iter().enumerate() {
            psi.axpy(isometry[(k, j)], w, C64::new(1.0, 0.0));
        }
        let p = psi.norm_squared();
        if p > 0.0 {
            psi.unscale_mut(p.sqrt());
        }
        weights.push(p);
        states.push(psi);
    }
    Ok(RoofEstimate {
        value,
        decomposition: PureStateDecomposition { weights, states, isometry },
        converged,
        agreeing_restarts: agreeing,
    })
}

/// Estimate of the classical correlations of `rho` split as `S|A`, with
/// rank-one measurements on `A`.
pub fn classical_correlations(
    rho: &DensityMatrix,
    split: &Bipartition,
    d: usize,
    cfg: &SearchConfig,
) -> Result<CorrelationEstimate> {
    check_split(rho, split)?;
    check_d(d, split.dim_s())?;
    let dim_a = split.dim_r();
    let members = ensemble(rho.matrix())?;
    let rho_s = split.trace_out(rho.matrix());
    let total_top = sum_largest(&rho_s, d);
    // B_a[s, j] = <s, a | w_j>.
    let blocks: Vec<CMatrix> = (0..dim_a)
        .map(|a| {
            CMatrix::from_fn(split.dim_s(), members.len(), |s, j| members[j][split.global_index(s, a)])
        })
        .collect();
    let obj = RowObjective::new(blocks, d);

    let (best, rows, converged, agreeing) = if dim_a == 1 {
        let row = vec![C64::new(1.0, 0.0)];
        (sum_largest(&obj.sigma(&row), d), vec![row], true, cfg.restarts.max(1))
    } else {
        let found = maximize(&obj, cfg);
        (found.value, found.rows, found.converged, found.agreeing_restarts)
    };

    let mut povm = Povm { elements: Vec::new(), probabilities: Vec::new(), post_states: Vec::new() };
    for row in &rows {
        // Row entries are <mu_x|a>, so mu_x is their conjugate.
        let mu = CVector::from_iterator(dim_a, row.iter().map(|c| c.conj()));
        povm.elements.push(&mu * mu.adjoint());
        let sigma = obj.sigma(row);
        let p = sigma.trace().re;
        povm.probabilities.push(p);
        povm.post_states.push(if p > 0.0 { sigma / C64::new(p, 0.0) } else { sigma });
    }
    Ok(CorrelationEstimate { value: best - total_top, povm, converged, agreeing_restarts: agreeing })
}

/// Pure state on `S (x) R (x) A` with index `s + dim_s * (r + dim_r * a)`.
#[derive(Clone, Debug)]
pub struct Purification {
    psi: CVector,
    dim_s: usize,
    dim_r: usize,
    dim_a: usize,
}

impl Purification {
    pub fn from_tripartite(psi: CVector, dims: [usize; 3]) -> Result<Self> {
        let [dim_s, dim_r, dim_a] = dims;
        if dims.contains(&0) || psi.len() != dim_s * dim_r * dim_a {
            return Err(validation(format!(
                "state of length {} does not match dimensions {dim_s}x{dim_r}x{dim_a}",
                psi.len()
            )));
        }
        let norm = psi.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(validation("purification needs a non-zero finite vector"));
        }
        Ok(Purification { psi: psi / C64::new(norm, 0.0), dim_s, dim_r, dim_a })
    }

    /// Haar-random pure state with the given dimensions.
    pub fn random<R: Rng + ?Sized>(dims: [usize; 3], rng: &mut R) -> Result<Self> {
        let len = dims.iter().product();
        let psi = CVector::from_fn(len, |_, _| C64::new(gaussian(rng), gaussian(rng)));
        Self::from_tripartite(psi, dims)
    }

    pub fn state(&self) -> &CVector {
        &self.psi
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.dim_s, self.dim_r, self.dim_a]
    }

    pub fn ancilla_dim(&self) -> usize {
        self.dim_a
    }

    fn amp(&self, s: usize, r: usize, a: usize) -> C64 {
        self.psi[s + self.dim_s * (r + self.dim_r * a)]
    }

    /// `tr_A`, in layout `s + dim_s * r`.
    pub fn rho_sr(&self) -> DensityMatrix {
        let d = self.dim_s * self.dim_r;
        let m = CMatrix::from_fn(d, d, |x, y| {
            (0..self.dim_a)
                .map(|a| self.psi[x + d * a] * self.psi[y + d * a].conj())
                .sum()
        });
        DensityMatrix::new_unchecked(m)
    }

    /// `tr_R`, in layout `s + dim_s * a`.
    pub fn rho_sa(&self) -> DensityMatrix {
        let (ds, da) = (self.dim_s, self.dim_a);
        let m = CMatrix::from_fn(ds * da, ds * da, |x, y| {
            let (s, a) = (x % ds, x / ds);
            let (s2, a2) = (y % ds, y / ds);
            (0..self.dim_r).map(|r| self.amp(s, r, a) * self.amp(s2, r, a2).conj()).sum()
        });
        DensityMatrix::new_unchecked(m)
    }

    pub fn rho_s(&self) -> DensityMatrix {
        DensityMatrix::new_unchecked(Bipartition::product(self.dim_s, self.dim_r).trace_out(self.rho_sr().matrix()))
    }

    pub fn split_sr(&self) -> Bipartition {
        Bipartition::product(self.dim_s, self.dim_r)
    }

    pub fn split_sa(&self) -> Bipartition {
        Bipartition::product(self.dim_s, self.dim_a)
    }
}

/// `sum_j sqrt(p_j) |v_j>|j>` over the eigenpairs of `rho` with
/// `p_j > 1e-12`. The state is first reordered so that `S` is the leading
/// factor of `split`.
pub fn purify(rho: &DensityMatrix, split: &Bipartition) -> Result<Purification> {
    check_split(rho, split)?;
    let ordered = split.to_product_layout(rho.matrix());
    let members = ensemble(&ordered)?;
    let d = rho.dim();
    let mut psi = CVector::zeros(d * members.len());
    for (a, w) in members.iter().enumerate() {
        psi.rows_mut(a * d, d).copy_from(w);
    }
    Purification::from_tripartite(psi, [split.dim_s(), split.dim_r(), members.len()])
}

#[derive(Clone, Debug)]
pub struct MonogamyReport {
    pub epsilon: f64,
    pub entanglement: RoofEstimate,
    pub correlations: CorrelationEstimate,
    /// `epsilon - E - C`.
    pub residual: f64,
}

impl MonogamyReport {
    pub fn converged(&self) -> bool {
        self.entanglement.converged && self.correlations.converged
    }
}

/// `eps_d(rho_S) - E_{S|R} - C_{S|A}` on a tripartite pure state.
pub fn monogamy_residual(
    psi: &Purification,
    d: usize,
    roof_cfg: &SearchConfig,
    povm_cfg: &SearchConfig,
) -> Result<MonogamyReport> {
    let epsilon = epsilon_d(&psi.rho_s(), d)?;
    let entanglement = convex_roof(&psi.rho_sr(), &psi.split_sr(), d, roof_cfg)?;
    let correlations = classical_correlations(&psi.rho_sa(), &psi.split_sa(), d, povm_cfg)?;
    let residual = epsilon - entanglement.value - correlations.value;
    Ok(MonogamyReport { epsilon, entanglement, correlations, residual })
}

#[derive(Clone, Debug)]
pub struct LowerBoundReport {
    pub bond: (usize, usize),
    pub d_local: usize,
    pub f_s: f64,
    pub epsilon: f64,
    pub entanglement: f64,
    pub correlations: f64,
    /// `f_s >= entanglement + correlations - slack`.
    pub holds: bool,
    pub converged: bool,
}

/// Slack allowed for optimizer error in [`lower_bound_check`].
pub const LOWER_BOUND_SLACK: f64 = 1e-3;

/// Evaluates `f_S`, the convex roof across `S|R` and the correlations with a
/// purifying ancilla for bond `bond` of `model` in state `rho`.
pub fn lower_bound_check_state(
    model: &SpinModel,
    rho: &DensityMatrix,
    bond: usize,
    roof_cfg: &SearchConfig,
    povm_cfg: &SearchConfig,
) -> Result<LowerBoundReport> {
    let record = crate::metrics::bond_record(model, rho, bond, crate::metrics::DEFAULT_EQUALITY_TOL)?;
    let b = &model.bonds()[bond];
    let split = Bipartition::sites(model.num_sites(), &b.sites())?;
    let d = record.d_local;
    let roof = convex_roof(rho, &split, d, roof_cfg)?;
    let purified = purify(rho, &split)?;
    let corr = classical_correlations(&purified.rho_sa(), &purified.split_sa(), d, povm_cfg)?;
    Ok(LowerBoundReport {
        bond: record.bond,
        d_local: d,
        f_s: record.f_s,
        epsilon: record.epsilon_d,
        entanglement: roof.value,
        correlations: corr.value,
        holds: record.f_s >= roof.value + corr.value - LOWER_BOUND_SLACK,
        converged: roof.converged && corr.converged,
    })
}

/// [`lower_bound_check_state`] on the model's maximally mixed ground state.
pub fn lower_bound_check(
    model: &SpinModel,
    bond: usize,
    tol_deg: f64,
    roof_cfg: &SearchConfig,
    povm_cfg: &SearchConfig,
) -> Result<LowerBoundReport> {
    let analysis = GroundAnalysis::new(model, tol_deg)?;
    lower_bound_check_state(model, &analysis.mmgs, bond, roof_cfg, povm_cfg)
}
