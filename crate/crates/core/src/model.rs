//! Pairwise spin-1/2 Hamiltonians on arbitrary interaction graphs.
//!
//! Each bond contributes `-sum_mu J^mu S_i^mu S_j^mu` with `S = sigma / 2`.
//! Basis index `b` stores site `i` in bit `i` (site 0 least significant);
//! a cleared bit is spin-up, the +1 eigenstate of `sigma^z`.
//!
//! A model may additionally carry a per-site Pauli gauge (conjugation by a
//! single-site Pauli matrix) and a set of sites over which the Hamiltonian is
//! partially transposed. They are applied in that order: couplings, then
//! gauges, then partial transposition.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::{CMatrix, C64};

/// Largest number of sites a dense Hamiltonian is built for unless the
/// caller asks for more.
pub const DEFAULT_SITE_CAP: usize = 14;

const HERMITIAN_TOL: f64 = 1e-12;

/// Single-site Pauli element used as a gauge.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    #[default]
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    /// Action on a basis bit: `P|bit> = phase |bit ^ flip>`.
    fn act(self, bit: usize) -> (usize, C64) {
        match self {
            Pauli::I => (0, C64::new(1.0, 0.0)),
            Pauli::X => (1, C64::new(1.0, 0.0)),
            Pauli::Y => (1, if bit == 0 { C64::new(0.0, 1.0) } else { C64::new(0.0, -1.0) }),
            Pauli::Z => (0, if bit == 0 { C64::new(1.0, 0.0) } else { C64::new(-1.0, 0.0) }),
        }
    }

    pub fn matrix(self) -> CMatrix {
        let mut m = CMatrix::zeros(2, 2);
        for bit in 0..2 {
            let (flip, phase) = self.act(bit);
            m[(bit ^ flip, bit)] = phase;
        }
        m
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        };
        f.write_str(s)
    }
}

impl FromStr for Pauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" => Ok(Pauli::I),
            "X" => Ok(Pauli::X),
            "Y" => Ok(Pauli::Y),
            "Z" => Ok(Pauli::Z),
            other => Err(validation(format!("unknown gauge {other:?}"))),
        }
    }
}

/// Exchange coupling between two sites, `(J^x, J^y, J^z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bond {
    pub i: usize,
    pub j: usize,
    pub coupling: [f64; 3],
}

impl Bond {
    pub fn new(i: usize, j: usize, coupling: [f64; 3]) -> Self {
        Bond { i, j, coupling }
    }

    pub fn sites(&self) -> [usize; 2] {
        [self.i, self.j]
    }

    fn key(&self) -> (usize, usize) {
        (self.i.min(self.j), self.i.max(self.j))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpinModel {
    num_sites: usize,
    bonds: Vec<Bond>,
    gauges: Vec<Pauli>,
    pt_sites: BTreeSet<usize>,
}

impl SpinModel {
    pub fn new(num_sites: usize, bonds: Vec<Bond>) -> Result<Self> {
        if num_sites == 0 {
            return Err(validation("a model needs at least one site"));
        }
        let mut seen = BTreeSet::new();
        for b in &bonds {
            if b.i >= num_sites || b.j >= num_sites {
                return Err(validation(format!(
                    "bond ({}, {}) out of range for {num_sites} sites",
                    b.i, b.j
                )));
            }
            if b.i == b.j {
                return Err(validation(format!("self-bond on site {}", b.i)));
            }
            if b.coupling.iter().any(|c| !c.is_finite()) {
                return Err(validation(format!("non-finite coupling on bond ({}, {})", b.i, b.j)));
            }
            if !seen.insert(b.key()) {
                return Err(validation(format!("duplicate bond ({}, {})", b.i, b.j)));
            }
        }
        Ok(SpinModel {
            num_sites,
            bonds,
            gauges: vec![Pauli::I; num_sites],
            pt_sites: BTreeSet::new(),
        })
    }

    pub fn with_gauges(mut self, gauges: Vec<Pauli>) -> Result<Self> {
        if gauges.len() != self.num_sites {
            return Err(validation(format!(
                "gauge list has {} entries, model has {} sites",
                gauges.len(),
                self.num_sites
            )));
        }
        self.gauges = gauges;
        Ok(self)
    }

    pub fn with_partial_transpose<I: IntoIterator<Item = usize>>(mut self, sites: I) -> Result<Self> {
        let sites: BTreeSet<usize> = sites.into_iter().collect();
        if let Some(&s) = sites.iter().find(|&&s| s >= self.num_sites) {
            return Err(validation(format!("partial-transpose site {s} out of range")));
        }
        self.pt_sites = sites;
        Ok(self)
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn dim(&self) -> usize {
        1 << self.num_sites
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn gauges(&self) -> &[Pauli] {
        &self.gauges
    }

    pub fn pt_sites(&self) -> &BTreeSet<usize> {
        &self.pt_sites
    }

    pub fn is_gauged(&self) -> bool {
        self.gauges.iter().any(|&g| g != Pauli::I)
    }

    /// Same couplings with the identity gauge and no partial transposition.
    pub fn untransformed(&self) -> SpinModel {
        SpinModel {
            gauges: vec![Pauli::I; self.num_sites],
            pt_sites: BTreeSet::new(),
            ..self.clone()
        }
    }

    /// The two-site term of bond `index` with this model's gauges and
    /// partial transposition restricted to the bond's endpoints. Bit 0 of
    /// the 4x4 operator is site `i`, bit 1 is site `j`.
    pub fn analyzed_local_term(&self, index: usize) -> HermitianOperator {
        let bond = &self.bonds[index];
        let local = local_term(bond);
        let gauged = apply_gauge(&local, &[self.gauges[bond.i], self.gauges[bond.j]])
            .expect("two-site gauge on a two-site operator");
        let sites = bond.sites();
        let k = sites
            .iter()
            .enumerate()
            .filter(|(_, s)| self.pt_sites.contains(s))
            .map(|(slot, _)| slot);
        partial_transpose(&gauged, k).expect("bond-local transposition sites are in range")
    }
}

/// Dense complex Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(validation(format!(
                "operator must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let dev = hermiticity_defect(&matrix);
        if dev > HERMITIAN_TOL {
            return Err(validation(format!("operator is not Hermitian (max defect {dev:e})")));
        }
        Ok(HermitianOperator { matrix })
    }

    pub(crate) fn new_unchecked(matrix: CMatrix) -> Self {
        debug_assert!(matrix.is_square());
        HermitianOperator { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Number of qubits when the dimension is a power of two.
    pub fn num_sites(&self) -> Option<usize> {
        let d = self.dim();
        d.is_power_of_two().then(|| d.trailing_zeros() as usize)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// True when every entry has an exactly zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.matrix.iter().all(|z| z.im == 0.0)
    }
}

pub(crate) fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for c in 0..n {
        for r in 0..=c {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

/// `-sum_bonds sum_mu J^mu S_i^mu S_j^mu` with gauges and partial
/// transposition applied, using [`DEFAULT_SITE_CAP`].
pub fn build_hamiltonian(model: &SpinModel) -> Result<HermitianOperator> {
    build_hamiltonian_with_cap(model, DEFAULT_SITE_CAP)
}

pub fn build_hamiltonian_with_cap(model: &SpinModel, cap: usize) -> Result<HermitianOperator> {
    let n = model.num_sites;
    if n > cap {
        return Err(Error::Capacity { sites: n, cap });
    }
    let dim = 1usize << n;
    let mut h = CMatrix::zeros(dim, dim);
    for bond in &model.bonds {
        add_bond(&mut h, bond);
    }
    let h = HermitianOperator::new_unchecked(h);
    let h = if model.is_gauged() { apply_gauge(&h, &model.gauges)? } else { h };
    if model.pt_sites.is_empty() {
        Ok(h)
    } else {
        partial_transpose(&h, model.pt_sites.iter().copied())
    }
}

fn add_bond(h: &mut CMatrix, bond: &Bond) {
    let [jx, jy, jz] = bond.coupling;
    let mask = (1usize << bond.i) | (1usize << bond.j);
    for b in 0..h.nrows() {
        let bi = (b >> bond.i) & 1;
        let bj = (b >> bond.j) & 1;
        let aligned = bi == bj;
        // sigma^z sigma^z = +1 on aligned bits.
        let zz = if aligned { 1.0 } else { -1.0 };
        h[(b, b)] -= C64::new(0.25 * jz * zz, 0.0);
        // sigma^x sigma^x flips both bits with unit phase; sigma^y sigma^y
        // flips both with phase -1 on aligned bits and +1 otherwise.
        let yy = if aligned { -1.0 } else { 1.0 };
        h[(b ^ mask, b)] -= C64::new(0.25 * (jx + jy * yy), 0.0);
    }
}

/// Two-site term `-sum_mu J^mu S^mu (x) S^mu` of a bond, before any gauge or
/// transposition. Bit 0 is the bond's site `i`, bit 1 its site `j`.
pub fn local_term(bond: &Bond) -> HermitianOperator {
    let mut h = CMatrix::zeros(4, 4);
    add_bond(&mut h, &Bond::new(0, 1, bond.coupling));
    HermitianOperator::new_unchecked(h)
}

/// `U H U^dagger` for the Pauli string `U = (x)_i gauges[i]`.
pub fn apply_gauge(h: &HermitianOperator, gauges: &[Pauli]) -> Result<HermitianOperator> {
    let n = h
        .num_sites()
        .ok_or_else(|| validation("gauge needs a qubit operator (dimension 2^N)"))?;
    if gauges.len() != n {
        return Err(validation(format!(
            "gauge list has {} entries, operator acts on {n} sites",
            gauges.len()
        )));
    }
    let dim = h.dim();
    let (image, phase): (Vec<usize>, Vec<C64>) = (0..dim)
        .map(|b| {
            gauges.iter().enumerate().fold((b, C64::new(1.0, 0.0)), |(img, ph), (site, g)| {
                let (flip, p) = g.act((b >> site) & 1);
                (img ^ (flip << site), ph * p)
            })
        })
        .unzip();
    let src = h.matrix();
    let mut out = CMatrix::zeros(dim, dim);
    for c in 0..dim {
        for r in 0..dim {
            out[(image[r], image[c])] = phase[r] * src[(r, c)] * phase[c].conj();
        }
    }
    Ok(HermitianOperator::new_unchecked(out))
}

/// The Pauli string `(x)_i paulis[i]`, e.g. a global parity `P_x = (x)_i sigma^x_i`.
pub fn pauli_string(paulis: &[Pauli]) -> HermitianOperator {
    let dim = 1usize << paulis.len();
    let mut out = CMatrix::zeros(dim, dim);
    for b in 0..dim {
        let (img, ph) = paulis.iter().enumerate().fold((b, C64::new(1.0, 0.0)), |(img, ph), (site, p)| {
            let (flip, q) = p.act((b >> site) & 1);
            (img ^ (flip << site), ph * q)
        });
        out[(img, b)] = ph;
    }
    HermitianOperator::new_unchecked(out)
}

/// Transposes the tensor factors of the sites in `sites`.
pub fn partial_transpose<I>(h: &HermitianOperator, sites: I) -> Result<HermitianOperator>
where
    I: IntoIterator<Item = usize>,
{
    let n = h
        .num_sites()
        .ok_or_else(|| validation("partial transpose needs a qubit operator (dimension 2^N)"))?;
    let mut k = 0usize;
    for s in sites {
        if s >= n {
            return Err(validation(format!("partial-transpose site {s} out of range for {n} sites")));
        }
        k |= 1 << s;
    }
    if k == 0 {
        return Ok(h.clone());
    }
    let dim = h.dim();
    let src = h.matrix();
    let mut out = CMatrix::zeros(dim, dim);
    for c in 0..dim {
        for r in 0..dim {
            let r2 = (r & !k) | (c & k);
            let c2 = (c & !k) | (r & k);
            out[(r2, c2)] = src[(r, c)];
        }
    }
    Ok(HermitianOperator::new_unchecked(out))
}

/// On-disk model description.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub sites: usize,
    pub bonds: Vec<BondEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauges: Option<Vec<Pauli>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partial_transpose: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BondEntry {
    pub i: usize,
    pub j: usize,
    #[serde(rename = "J")]
    pub coupling: [f64; 3],
}

impl TryFrom<ModelFile> for SpinModel {
    type Error = Error;

    fn try_from(file: ModelFile) -> Result<SpinModel> {
        let bonds = file.bonds.iter().map(|b| Bond::new(b.i, b.j, b.coupling)).collect();
        let mut model = SpinModel::new(file.sites, bonds)?;
        if let Some(g) = file.gauges {
            model = model.with_gauges(g)?;
        }
        if let Some(k) = file.partial_transpose {
            model = model.with_partial_transpose(k)?;
        }
        Ok(model)
    }
}

impl From<&SpinModel> for ModelFile {
    fn from(model: &SpinModel) -> Self {
        ModelFile {
            sites: model.num_sites,
            bonds: model
                .bonds
                .iter()
                .map(|b| BondEntry { i: b.i, j: b.j, coupling: b.coupling })
                .collect(),
            gauges: model.is_gauged().then(|| model.gauges.clone()),
            partial_transpose: (!model.pt_sites.is_empty())
                .then(|| model.pt_sites.iter().copied().collect()),
        }
    }
}

impl SpinModel {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        file.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ModelFile::from(self)).expect("model serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}
