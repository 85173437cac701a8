//! Per-bond frustration `f_S`, the interlacing bound `eps_d`, and the
//! FF / INES / non-INES classification of states and models.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eigen::{
    eig_matrix, ground_space, mmgs, partial_trace, sum_largest, DensityMatrix, GroundSpace,
};
use crate::error::{validation, Error, Result};
use crate::model::{build_hamiltonian, pauli_string, HermitianOperator, Pauli, SpinModel};
use crate::{csv_float, max_abs, CMatrix, CVector, C64};

/// Default absolute tolerance on `f_S` and on `f_S - eps_d`.
pub const DEFAULT_EQUALITY_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Ff,
    Ines,
    NonInes,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Ff => "FF",
            Verdict::Ines => "INES",
            Verdict::NonInes => "NON_INES",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Scope {
    /// Evaluated on the maximally mixed ground state.
    OnAverage,
    /// Evaluated on one particular ground state.
    Local(String),
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::OnAverage => f.write_str("on_average"),
            Scope::Local(_) => f.write_str("local"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrustrationRecord {
    pub bond: (usize, usize),
    pub d_local: usize,
    pub f_s: f64,
    pub epsilon_d: f64,
    /// `f_s - epsilon_d`, unclamped.
    pub residual: f64,
    pub class: Verdict,
}

impl FrustrationRecord {
    pub const CSV_HEADER: &'static str = "bond_i,bond_j,d_local,f_S,epsilon_d,residual,class";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.bond.0,
            self.bond.1,
            self.d_local,
            csv_float(self.f_s),
            csv_float(self.epsilon_d),
            csv_float(self.residual),
            self.class
        )
    }
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub per_bond: Vec<FrustrationRecord>,
    pub verdict: Verdict,
    pub scope: Scope,
    /// `1 - tr(rho P_G)`: weight of the analyzed state outside the ground space.
    pub support_leak: f64,
}

impl Classification {
    pub fn worst_residual(&self) -> f64 {
        self.per_bond.iter().map(|r| r.residual.abs()).fold(0.0, f64::max)
    }
}

fn classify(f_s: f64, residual: f64, tol: f64) -> Verdict {
    if f_s <= tol {
        Verdict::Ff
    } else if residual.abs() <= tol {
        Verdict::Ines
    } else {
        Verdict::NonInes
    }
}

/// `1 - tr(rho_S Pi_S)` with `rho_S` the reduction of `rho_g` onto `sites`.
pub fn frustration(rho_g: &DensityMatrix, pi_s: &HermitianOperator, sites: &[usize]) -> Result<f64> {
    let rho_s = partial_trace(rho_g, sites)?;
    if rho_s.dim() != pi_s.dim() {
        return Err(validation(format!(
            "projector is {0}x{0} but the reduced state is {1}x{1}",
            pi_s.dim(),
            rho_s.dim()
        )));
    }
    Ok(1.0 - rho_s.expectation(pi_s.matrix()))
}

/// `1 - (sum of the d largest eigenvalues of rho_s)`, unclamped.
pub fn epsilon_d(rho_s: &DensityMatrix, d: usize) -> Result<f64> {
    if d == 0 || d > rho_s.dim() {
        return Err(validation(format!("d = {d} outside 1..={}", rho_s.dim())));
    }
    Ok(1.0 - sum_largest(rho_s.matrix(), d))
}

/// Record for bond `index` of `model` evaluated on `rho`. The local ground
/// projector and its rank come from the bond's transformed local term.
pub fn bond_record(model: &SpinModel, rho: &DensityMatrix, index: usize, tol_eq: f64) -> Result<FrustrationRecord> {
    let bond = model
        .bonds()
        .get(index)
        .ok_or_else(|| validation(format!("bond index {index} out of range")))?;
    let local = model.analyzed_local_term(index);
    let local_gs = ground_space(&local, crate::eigen::DEFAULT_DEGENERACY_TOL)?;
    let pi = local_gs.projector();
    let rho_s = partial_trace(rho, &bond.sites())?;
    let f_s = 1.0 - rho_s.expectation(pi.matrix());
    let eps = epsilon_d(&rho_s, local_gs.degeneracy)?;
    let residual = f_s - eps;
    Ok(FrustrationRecord {
        bond: (bond.i, bond.j),
        d_local: local_gs.degeneracy,
        f_s,
        epsilon_d: eps,
        residual,
        class: classify(f_s, residual, tol_eq),
    })
}

/// Classifies `rho` bond by bond. `ground` is the ground space of the
/// model's Hamiltonian and is used only to report how much of `rho` lies
/// outside it.
pub fn analyze_state(
    model: &SpinModel,
    ground: &GroundSpace,
    rho: &DensityMatrix,
    scope: Scope,
    tol_eq: f64,
) -> Result<Classification> {
    if rho.dim() != model.dim() || ground.basis.nrows() != model.dim() {
        return Err(validation("state, ground space and model dimensions disagree"));
    }
    let per_bond = (0..model.bonds().len())
        .map(|k| bond_record(model, rho, k, tol_eq))
        .collect::<Result<Vec<_>>>()?;
    let verdict = if per_bond.iter().all(|r| r.f_s <= tol_eq) {
        Verdict::Ff
    } else if per_bond.iter().all(|r| r.residual.abs() <= tol_eq) {
        Verdict::Ines
    } else {
        Verdict::NonInes
    };
    let inside: f64 = ground
        .basis
        .column_iter()
        .map(|g| (g.adjoint() * rho.matrix() * g)[(0, 0)].re)
        .sum();
    Ok(Classification { per_bond, verdict, scope, support_leak: 1.0 - inside })
}

/// Everything needed to analyze a model on its ground space.
#[derive(Clone, Debug)]
pub struct GroundAnalysis {
    pub hamiltonian: HermitianOperator,
    pub ground: GroundSpace,
    pub mmgs: DensityMatrix,
}

impl GroundAnalysis {
    pub fn new(model: &SpinModel, tol_deg: f64) -> Result<Self> {
        let hamiltonian = build_hamiltonian(model)?;
        let ground = ground_space(&hamiltonian, tol_deg)?;
        let mmgs = mmgs(&ground);
        Ok(GroundAnalysis { hamiltonian, ground, mmgs })
    }

    pub fn on_average(&self, model: &SpinModel, tol_eq: f64) -> Result<Classification> {
        analyze_state(model, &self.ground, &self.mmgs, Scope::OnAverage, tol_eq)
    }
}

/// Builds, diagonalizes and classifies a model on its MMGS.
pub fn analyze_model(model: &SpinModel, tol_deg: f64, tol_eq: f64) -> Result<Classification> {
    GroundAnalysis::new(model, tol_deg)?.on_average(model, tol_eq)
}

/// Ground states with definite global parity `P_axis`.
///
/// Returns `(eigenvalue, state)` pairs sorted by descending parity
/// eigenvalue, or `None` when the ground space is not invariant under
/// `P_axis` (e.g. after a gauge that does not commute with it).
pub fn parity_ground_states(gs: &GroundSpace, num_sites: usize, axis: Pauli) -> Option<Vec<(f64, CVector)>> {
    let parity = pauli_string(&vec![axis; num_sites]);
    let restricted = gs.basis.adjoint() * parity.matrix() * &gs.basis;
    // Invariance: the restriction must itself be unitary.
    let defect = max_abs(&(&restricted * restricted.adjoint() - CMatrix::identity(gs.degeneracy, gs.degeneracy)));
    if defect > 1e-8 {
        return None;
    }
    let (vals, vecs) = eig_matrix(&restricted).ok()?;
    let mut out: Vec<(f64, CVector)> = vals
        .iter()
        .enumerate()
        .map(|(k, &v)| (v, &gs.basis * vecs.column(k)))
        .collect();
    out.sort_by(|a, b| b.0.total_cmp(&a.0));
    Some(out)
}

#[derive(Clone, Debug)]
pub struct PureSweepReport {
    /// Whether the ground basis was rotated to `P_x` eigenstates, so that
    /// trial 0 (a = 1, b = 0) is the +1 parity state.
    pub parity_basis: bool,
    /// `f_S` per trial (outer) and bond (inner).
    pub f_values: Vec<Vec<f64>>,
    /// `f_S` of the MMGS per bond.
    pub mmgs_f: Vec<f64>,
    /// `max - min` over trials, per bond.
    pub spread: Vec<f64>,
}

impl PureSweepReport {
    pub fn max_spread(&self) -> f64 {
        self.spread.iter().copied().fold(0.0, f64::max)
    }

    /// Largest deviation of any pure-state `f_S` from the MMGS value.
    pub fn max_mmgs_deviation(&self) -> f64 {
        self.f_values
            .iter()
            .flat_map(|row| row.iter().zip(&self.mmgs_f).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max)
    }
}

/// Evaluates `f_S` on `a|g1> + b|g2>` for `trials` random normalized `(a, b)`
/// in a twofold degenerate ground space. Trial 0 is always `(1, 0)`.
pub fn analyze_pure_sweep(model: &SpinModel, trials: usize, seed: u64, tol_deg: f64) -> Result<PureSweepReport> {
    if trials == 0 {
        return Err(validation("pure sweep needs at least one trial"));
    }
    let analysis = GroundAnalysis::new(model, tol_deg)?;
    let gs = &analysis.ground;
    if gs.degeneracy != 2 {
        return Err(Error::Precondition(format!(
            "state independence holds for twofold degeneracy; ground space has d_G = {}",
            gs.degeneracy
        )));
    }
    let (g1, g2, parity_basis) = match parity_ground_states(gs, model.num_sites(), Pauli::X) {
        Some(states) if (states[0].0 - 1.0).abs() < 1e-8 && (states[1].0 + 1.0).abs() < 1e-8 => {
            (states[0].1.clone(), states[1].1.clone(), true)
        }
        _ => (gs.vector(0), gs.vector(1), false),
    };

    let projectors = (0..model.bonds().len())
        .map(|k| ground_space(&model.analyzed_local_term(k), crate::eigen::DEFAULT_DEGENERACY_TOL).map(|g| g.projector()))
        .collect::<Result<Vec<_>>>()?;
    let f_of = |rho: &DensityMatrix| -> Result<Vec<f64>> {
        model
            .bonds()
            .iter()
            .zip(&projectors)
            .map(|(b, pi)| frustration(rho, pi, &b.sites()))
            .collect()
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f_values = Vec::with_capacity(trials);
    for t in 0..trials {
        let (a, b) = if t == 0 {
            (C64::new(1.0, 0.0), C64::new(0.0, 0.0))
        } else {
            let z: [f64; 4] = std::array::from_fn(|_| gaussian(&mut rng));
            let norm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
            (C64::new(z[0], z[1]) / norm, C64::new(z[2], z[3]) / norm)
        };
        let psi = &g1 * a + &g2 * b;
        f_values.push(f_of(&DensityMatrix::pure(&psi)?)?);
    }
    let mmgs_f = f_of(&analysis.mmgs)?;
    let spread = (0..model.bonds().len())
        .map(|k| {
            let (lo, hi) = f_values
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), row| (lo.min(row[k]), hi.max(row[k])));
            hi - lo
        })
        .collect();
    Ok(PureSweepReport { parity_basis, f_values, mmgs_f, spread })
}

/// Standard normal deviate (Box-Muller).
pub(crate) fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
