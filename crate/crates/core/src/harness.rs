//! Random prototype models and reproducible INES sweeps.
//!
//! A prototype has non-negative couplings and a Bell state that is a local
//! ground state of every bond. For `-J . (S S)` with `J >= 0` the Bell state
//! with parity signature `-1` on the axis carrying the smallest component is
//! the local ground state, so fixing that axis per model is enough.
//!
//! Each model draws from its own ChaCha8 stream `(seed, index)`, so results
//! do not depend on how models are scheduled over workers.

use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::eigen::DEFAULT_DEGENERACY_TOL;
use crate::error::{validation, Result};
use crate::metrics::{analyze_model, Verdict, DEFAULT_EQUALITY_TOL};
use crate::model::{Bond, Pauli, SpinModel, DEFAULT_SITE_CAP};
use crate::csv_float;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelClass {
    Xyz,
    Xxz,
    Xxx,
}

impl ModelClass {
    pub const ALL: [ModelClass; 3] = [ModelClass::Xyz, ModelClass::Xxz, ModelClass::Xxx];
}

impl fmt::Display for ModelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelClass::Xyz => "XYZ",
            ModelClass::Xxz => "XXZ",
            ModelClass::Xxx => "XXX",
        })
    }
}

impl FromStr for ModelClass {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xyz" => Ok(ModelClass::Xyz),
            "xxz" => Ok(ModelClass::Xxz),
            "xxx" => Ok(ModelClass::Xxx),
            _ => Err(validation(format!("unknown model class '{s}' (expected xyz, xxz or xxx)"))),
        }
    }
}

/// Probability of each non-tree edge in [`random_graph`].
pub const EXTRA_EDGE_PROBABILITY: f64 = 0.3;

const COUPLING_RANGE: std::ops::RangeInclusive<f64> = 0.1..=1.0;

/// Uniform random spanning tree (decoded from a Prüfer sequence) plus each
/// remaining pair with probability [`EXTRA_EDGE_PROBABILITY`]. Edges are
/// returned as `(i, j)` with `i < j`, sorted.
pub fn random_graph<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<(usize, usize)> {
    assert!(n >= 2, "a graph needs at least two vertices");
    let mut adjacent = vec![vec![false; n]; n];
    let mut link = |a: usize, b: usize| {
        adjacent[a][b] = true;
        adjacent[b][a] = true;
    };
    let code: Vec<usize> = (0..n.saturating_sub(2)).map(|_| rng.random_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &v in &code {
        degree[v] += 1;
    }
    for &v in &code {
        let leaf = (0..n).find(|&u| degree[u] == 1).expect("a Prüfer sequence always leaves a leaf");
        link(leaf, v);
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
    link(rest[0], rest[1]);

    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if adjacent[i][j] || rng.random_bool(EXTRA_EDGE_PROBABILITY) {
                edges.push((i, j));
            }
        }
    }
    edges
}

pub fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            let w = if a == v { b } else if b == v { a } else { continue };
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Three distinct components in the coupling range.
fn distinct_triple<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let t: [f64; 3] = std::array::from_fn(|_| rng.random_range(COUPLING_RANGE));
        if t[0] != t[1] && t[1] != t[2] && t[0] != t[2] {
            return t;
        }
    }
}

/// Per-model choices shared by all bonds of one prototype.
#[derive(Clone, Copy, Debug)]
enum Shape {
    /// Axis carrying the strictly smallest component.
    Xyz { axis: usize },
    /// `J^x = J^y` above (`true`) or below `J^z`.
    Xxz { planar_larger: bool },
    Xxx,
}

fn coupling<R: Rng + ?Sized>(shape: Shape, rng: &mut R) -> [f64; 3] {
    match shape {
        Shape::Xyz { axis } => {
            let mut t = distinct_triple(rng);
            let min = (0..3).min_by(|&a, &b| t[a].total_cmp(&t[b])).expect("three entries");
            t.swap(min, axis);
            t
        }
        Shape::Xxz { planar_larger } => {
            let [a, b, _] = distinct_triple(rng);
            let (hi, lo) = if a > b { (a, b) } else { (b, a) };
            if planar_larger {
                [hi, hi, lo]
            } else {
                [lo, lo, hi]
            }
        }
        Shape::Xxx => {
            let a = rng.random_range(COUPLING_RANGE);
            [a, a, a]
        }
    }
}

/// Samples couplings for every edge of `graph` (or one coupling replicated
/// over all edges when `homogeneous`).
pub fn random_prototype<R: Rng + ?Sized>(
    class: ModelClass,
    n: usize,
    graph: &[(usize, usize)],
    homogeneous: bool,
    rng: &mut R,
) -> Result<SpinModel> {
    let shape = match class {
        ModelClass::Xyz => Shape::Xyz { axis: rng.random_range(0..3) },
        ModelClass::Xxz => Shape::Xxz { planar_larger: rng.random_bool(0.5) },
        ModelClass::Xxx => Shape::Xxx,
    };
    let shared = homogeneous.then(|| coupling(shape, rng));
    let bonds = graph
        .iter()
        .map(|&(i, j)| Bond::new(i, j, shared.unwrap_or_else(|| coupling(shape, rng))))
        .collect();
    SpinModel::new(n, bonds)
}

/// Parity signatures `(s_x, s_y, s_z)` of the four Bell states.
pub const BELL_SIGNATURES: [[f64; 3]; 4] =
    [[1.0, -1.0, 1.0], [-1.0, 1.0, 1.0], [1.0, 1.0, -1.0], [-1.0, -1.0, -1.0]];

/// A Bell state that minimizes every bond's local term, if one exists.
///
/// The local term `-sum J^mu S^mu S^mu` is diagonal in the Bell basis with
/// energy `-(1/4) sum_mu J^mu s_mu`.
pub fn common_bell_state(model: &SpinModel) -> Option<[f64; 3]> {
    let energy = |j: &[f64; 3], s: &[f64; 3]| -0.25 * (0..3).map(|m| j[m] * s[m]).sum::<f64>();
    BELL_SIGNATURES.into_iter().find(|s| {
        model.bonds().iter().all(|b| {
            let min = BELL_SIGNATURES.iter().map(|t| energy(&b.coupling, t)).fold(f64::INFINITY, f64::min);
            energy(&b.coupling, s) - min <= 1e-10
        })
    })
}

/// Identity with probability 1/2 per site, otherwise a uniform X, Y or Z.
pub fn random_gauge<R: Rng + ?Sized>(model: SpinModel, rng: &mut R) -> Result<SpinModel> {
    let gauges = (0..model.num_sites())
        .map(|_| {
            if rng.random_bool(0.5) {
                Pauli::I
            } else {
                *[Pauli::X, Pauli::Y, Pauli::Z].choose(rng).expect("non-empty")
            }
        })
        .collect();
    model.with_gauges(gauges)
}

/// Uniform subset of `0..n`.
pub fn random_subset<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    (0..n).filter(|_| rng.random_bool(0.5)).collect()
}

/// Adds the triangle `0, 1, 2` to `edges` and reverses the sign of the full
/// coupling on bond `(0, 2)`. With the other two triangle bonds favouring the
/// prototype's common Bell state, no state can satisfy all three.
pub fn inject_geometric_frustration(model: &SpinModel) -> Result<SpinModel> {
    let mut bonds = model.bonds().to_vec();
    let template = bonds.first().map(|b| b.coupling).unwrap_or([1.0, 1.0, 1.0]);
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        if !bonds.iter().any(|b| (b.i.min(b.j), b.i.max(b.j)) == (i, j)) {
            bonds.push(Bond::new(i, j, template));
        }
    }
    for b in bonds.iter_mut() {
        if (b.i.min(b.j), b.i.max(b.j)) == (0, 2) {
            b.coupling = b.coupling.map(|c| -c);
        }
    }
    SpinModel::new(model.num_sites(), bonds)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub class: ModelClass,
    pub sites: usize,
    pub count: usize,
    pub homogeneous: bool,
    pub apply_gauges: bool,
    pub apply_pt: bool,
    pub seed: u64,
    pub tol_degeneracy: f64,
    pub tol_equality: f64,
    /// Negative control: add a frustrated triangle to every model.
    pub inject_geometric: bool,
}

impl SweepConfig {
    pub fn new(class: ModelClass, sites: usize, count: usize, seed: u64) -> Self {
        SweepConfig {
            class,
            sites,
            count,
            homogeneous: false,
            apply_gauges: true,
            apply_pt: true,
            seed,
            tol_degeneracy: DEFAULT_DEGENERACY_TOL,
            tol_equality: DEFAULT_EQUALITY_TOL,
            inject_geometric: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(validation("sweep count must be at least 1"));
        }
        if !(3..=DEFAULT_SITE_CAP).contains(&self.sites) {
            return Err(validation(format!("sweep sites must lie in 3..={DEFAULT_SITE_CAP}")));
        }
        if !(self.tol_degeneracy > 0.0 && self.tol_equality > 0.0) {
            return Err(validation("tolerances must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelRecord {
    pub index: usize,
    /// RNG stream the model was drawn from.
    pub stream: u64,
    pub n: usize,
    pub class: ModelClass,
    pub edges: Vec<(usize, usize)>,
    /// FNV-1a over the coupling bit patterns in bond order.
    pub couplings_hash: u64,
    pub gauges: Vec<Pauli>,
    pub pt_set: Vec<usize>,
    /// `None` when the analysis failed numerically.
    pub verdict: Option<Verdict>,
    pub worst_residual: f64,
    pub failure: Option<String>,
}

impl ModelRecord {
    pub const CSV_HEADER: &'static str = "index,n,class,edges,gauged,pt_set,verdict,worst_residual";

    /// FF states satisfy `f_S = eps_d = 0` and count as saturating.
    pub fn accepted(&self) -> bool {
        matches!(self.verdict, Some(Verdict::Ff | Verdict::Ines))
    }

    pub fn csv_row(&self) -> String {
        let edges: Vec<String> = self.edges.iter().map(|(i, j)| format!("{i}-{j}")).collect();
        let gauges: String = self.gauges.iter().map(|g| g.to_string()).collect();
        let pt: Vec<String> = self.pt_set.iter().map(|s| s.to_string()).collect();
        let verdict = self.verdict.map_or_else(|| "ERROR".to_string(), |v| v.to_string());
        format!(
            "{},{},{},{},{},{},{},{}",
            self.index,
            self.n,
            self.class,
            edges.join(";"),
            gauges,
            pt.join(";"),
            verdict,
            csv_float(self.worst_residual)
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    pub n: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub records: Vec<ModelRecord>,
}

impl SweepReport {
    pub const SUMMARY_HEADER: &'static str = "n,accepted,rejected";

    pub fn summary_row(&self) -> String {
        format!("{},{},{}", self.n, self.accepted, self.rejected)
    }

    /// Record table followed by the summary table.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(ModelRecord::CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&r.csv_row());
            out.push('\n');
        }
        out.push_str(Self::SUMMARY_HEADER);
        out.push('\n');
        out.push_str(&self.summary_row());
        out.push('\n');
        out
    }
}

fn fnv1a(values: impl Iterator<Item = f64>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in values {
        for byte in v.to_bits().to_le_bytes() {
            h ^= u64::from(byte);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

/// Draws model `index` of a sweep, before analysis.
pub fn sweep_model(cfg: &SweepConfig, index: usize) -> Result<SpinModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let graph = random_graph(cfg.sites, &mut rng);
    let mut model = random_prototype(cfg.class, cfg.sites, &graph, cfg.homogeneous, &mut rng)?;
    if cfg.inject_geometric {
        model = inject_geometric_frustration(&model)?;
    }
    if cfg.apply_gauges {
        model = random_gauge(model, &mut rng)?;
    }
    if cfg.apply_pt {
        let sites = random_subset(cfg.sites, &mut rng);
        model = model.with_partial_transpose(sites)?;
    }
    Ok(model)
}

fn run_one(cfg: &SweepConfig, index: usize) -> ModelRecord {
    let model = sweep_model(cfg, index).expect("generated models are valid");
    let mut edges: Vec<(usize, usize)> = model.bonds().iter().map(|b| (b.i.min(b.j), b.i.max(b.j))).collect();
    edges.sort_unstable();
    let (verdict, worst_residual, failure) = match analyze_model(&model, cfg.tol_degeneracy, cfg.tol_equality) {
        Ok(c) => (Some(c.verdict), c.worst_residual(), None),
        Err(e) => (None, f64::NAN, Some(e.to_string())),
    };
    ModelRecord {
        index,
        stream: index as u64,
        n: cfg.sites,
        class: cfg.class,
        edges,
        couplings_hash: fnv1a(model.bonds().iter().flat_map(|b| b.coupling)),
        gauges: model.gauges().to_vec(),
        pt_set: model.pt_sites().iter().copied().collect(),
        verdict,
        worst_residual,
        failure,
    }
}

/// Generates and classifies `cfg.count` models on the current rayon pool.
pub fn sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let records: Vec<ModelRecord> = (0..cfg.count).into_par_iter().map(|k| run_one(cfg, k)).collect();
    let accepted = records.iter().filter(|r| r.accepted()).count();
    Ok(SweepReport { n: cfg.sites, accepted, rejected: records.len() - accepted, records })
}
