//! Hermitian eigendecomposition, ground spaces and reduced states.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{validation, Error, Result};
use crate::model::{hermiticity_defect, HermitianOperator};
use crate::{CMatrix, CVector, C64};

/// Default relative width of the ground-energy window.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;

const EIG_EPS: f64 = 1e-15;
const EIG_MAX_ITER: usize = 10_000;

/// Full spectral decomposition: eigenvalues ascending, eigenvectors as the
/// matching columns of a unitary matrix.
///
/// Real operators go through the real symmetric solver, which is several
/// times faster and is what every exchange Hamiltonian built by this crate
/// needs.
pub fn eig_hermitian(h: &HermitianOperator) -> Result<(Vec<f64>, CMatrix)> {
    eig_matrix(h.matrix())
}

pub(crate) fn eig_matrix(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = m.nrows();
    let (values, vectors) = if m.iter().all(|z| z.im == 0.0) {
        let real = DMatrix::<f64>::from_fn(n, n, |r, c| m[(r, c)].re);
        let eig = SymmetricEigen::try_new(real, EIG_EPS, EIG_MAX_ITER)
            .ok_or_else(|| Error::Numerical(format!("real symmetric eigensolver did not converge (n = {n})")))?;
        let v = eig.eigenvectors.map(|x| C64::new(x, 0.0));
        (eig.eigenvalues.iter().copied().collect::<Vec<_>>(), v)
    } else {
        let eig = SymmetricEigen::try_new(m.clone(), EIG_EPS, EIG_MAX_ITER)
            .ok_or_else(|| Error::Numerical(format!("Hermitian eigensolver did not converge (n = {n})")))?;
        (eig.eigenvalues.iter().copied().collect::<Vec<_>>(), eig.eigenvectors)
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(format!("non-finite eigenvalue (n = {n})")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps ties in solver order.
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted = order.iter().map(|&i| values[i]).collect();
    let vecs = CMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);
    Ok((sorted, vecs))
}

/// Eigenvalues of a small Hermitian matrix, descending.
pub(crate) fn eigenvalues_desc(m: &CMatrix) -> Vec<f64> {
    let n = m.nrows();
    let mut vals = if n == 1 {
        vec![m[(0, 0)].re]
    } else if n == 2 {
        let a = m[(0, 0)].re;
        let d = m[(1, 1)].re;
        let b = m[(0, 1)];
        let mean = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        vec![mean + rad, mean - rad]
    } else {
        m.clone().symmetric_eigenvalues().iter().copied().collect()
    };
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

/// Sum of the `d` largest eigenvalues of a Hermitian matrix.
pub(crate) fn sum_largest(m: &CMatrix, d: usize) -> f64 {
    eigenvalues_desc(m).iter().take(d).sum()
}

/// Eigenspace of the lowest eigenvalue.
#[derive(Clone, Debug)]
pub struct GroundSpace {
    pub energy: f64,
    pub degeneracy: usize,
    /// Orthonormal basis of the eigenspace, one vector per column.
    pub basis: CMatrix,
}

impl GroundSpace {
    pub fn vector(&self, k: usize) -> CVector {
        self.basis.column(k).into_owned()
    }

    pub fn projector(&self) -> HermitianOperator {
        HermitianOperator::new_unchecked(&self.basis * self.basis.adjoint())
    }
}

/// All eigenvectors with `E_i - E_0 <= tol * max(1, |E_0|)`.
pub fn ground_space(h: &HermitianOperator, tol: f64) -> Result<GroundSpace> {
    if !(tol > 0.0) {
        return Err(validation(format!("degeneracy tolerance must be positive, got {tol}")));
    }
    let (values, vectors) = eig_hermitian(h)?;
    let e0 = values[0];
    let window = tol * e0.abs().max(1.0);
    let degeneracy = values.iter().take_while(|&&e| e - e0 <= window).count();
    let block = vectors.columns(0, degeneracy).into_owned();
    let basis = orthonormalize(&block, 1e-8)?;
    if basis.ncols() != degeneracy {
        return Err(Error::Numerical(format!(
            "ground eigenvectors lost rank: {} of {degeneracy} survive orthonormalization",
            basis.ncols()
        )));
    }
    Ok(GroundSpace { energy: e0, degeneracy, basis })
}

/// Modified Gram-Schmidt with one reorthogonalization pass. Columns whose
/// residual norm drops below `drop_tol` are discarded.
pub(crate) fn orthonormalize(vectors: &CMatrix, drop_tol: f64) -> Result<CMatrix> {
    let mut kept: Vec<CVector> = Vec::with_capacity(vectors.ncols());
    for col in vectors.column_iter() {
        let mut v: CVector = col.into_owned();
        let norm0 = v.norm();
        if !norm0.is_finite() {
            return Err(Error::Numerical("non-finite vector during orthonormalization".into()));
        }
        for _ in 0..2 {
            for q in &kept {
                let overlap = q.dotc(&v);
                v.axpy(-overlap, q, C64::new(1.0, 0.0));
            }
        }
        let norm = v.norm();
        if norm > drop_tol * norm0.max(1.0) {
            v.unscale_mut(norm);
            kept.push(v);
        }
    }
    let n = vectors.nrows();
    Ok(CMatrix::from_fn(n, kept.len(), |r, c| kept[c][r]))
}

/// `sum_v |v><v|` over the re-orthonormalized input columns.
pub fn projector(basis: &CMatrix) -> Result<HermitianOperator> {
    let q = orthonormalize(basis, 1e-8)?;
    if q.ncols() != basis.ncols() {
        return Err(validation(format!(
            "projector basis is rank deficient: {} of {} vectors independent",
            q.ncols(),
            basis.ncols()
        )));
    }
    Ok(HermitianOperator::new_unchecked(&q * q.adjoint()))
}

/// Unit-trace positive semidefinite Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity (1e-12), unit trace (1e-10) and positivity
    /// (smallest eigenvalue at least -1e-10).
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(validation("density matrix must be square and non-empty"));
        }
        let dev = hermiticity_defect(&matrix);
        if dev > 1e-12 {
            return Err(validation(format!("density matrix is not Hermitian (defect {dev:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(validation(format!("density matrix trace is {tr}, expected 1")));
        }
        let min = eigenvalues_desc(&matrix).last().copied().unwrap_or(0.0);
        if min < -1e-10 {
            return Err(validation(format!("density matrix has negative eigenvalue {min:e}")));
        }
        Ok(DensityMatrix { matrix })
    }

    pub(crate) fn new_unchecked(matrix: CMatrix) -> Self {
        DensityMatrix { matrix }
    }

    /// `|psi><psi| / <psi|psi>`.
    pub fn pure(psi: &CVector) -> Result<Self> {
        let norm2 = psi.norm_squared();
        if !(norm2 > 0.0) || !norm2.is_finite() {
            return Err(validation("pure state needs a non-zero finite vector"));
        }
        Ok(DensityMatrix { matrix: psi * psi.adjoint() / C64::new(norm2, 0.0) })
    }

    /// `sum_k p_k rho_k` for non-negative weights summing to one.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let Some((_, first)) = parts.first() else {
            return Err(validation("empty mixture"));
        };
        let dim = first.dim();
        let total: f64 = parts.iter().map(|(p, _)| p).sum();
        if parts.iter().any(|(p, r)| *p < 0.0 || r.dim() != dim) || (total - 1.0).abs() > 1e-10 {
            return Err(validation("mixture weights must be non-negative, sum to 1, and dimensions agree"));
        }
        let mut m = CMatrix::zeros(dim, dim);
        for (p, r) in parts {
            m += &r.matrix * C64::new(*p, 0.0);
        }
        Ok(DensityMatrix { matrix: m })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix { matrix: CMatrix::identity(dim, dim) / C64::new(dim as f64, 0.0) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Eigenvalues, largest first.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eigenvalues_desc(&self.matrix)
    }

    /// `tr(rho A)`, real part.
    pub fn expectation(&self, op: &CMatrix) -> f64 {
        (&self.matrix * op).trace().re
    }
}

/// `P_G / d_G`, the equal-weight mixture of an orthonormal ground basis.
pub fn mmgs(gs: &GroundSpace) -> DensityMatrix {
    let scale = C64::new(1.0 / gs.degeneracy as f64, 0.0);
    DensityMatrix::new_unchecked(&gs.basis * gs.basis.adjoint() * scale)
}

/// Split of a Hilbert space into a kept factor `S` and a traced factor `R`.
///
/// Each global basis index maps to a pair `(s, r)`; reductions and
/// coefficient matrices are expressed in the `S` and `R` index orders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipartition {
    dim_s: usize,
    dim_r: usize,
    /// `global[r * dim_s + s]` is the global index of `(s, r)`.
    global: Vec<usize>,
}

impl Bipartition {
    /// Qubit sites `keep` (in the given order, first kept site least
    /// significant) against the remaining sites in ascending order.
    pub fn sites(num_sites: usize, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(validation("partial trace needs at least one kept site"));
        }
        let mut seen = vec![false; num_sites];
        for &s in keep {
            if s >= num_sites || std::mem::replace(&mut seen[s], true) {
                return Err(validation(format!("kept site {s} is out of range or repeated")));
            }
        }
        let rest: Vec<usize> = (0..num_sites).filter(|&s| !seen[s]).collect();
        let dim_s = 1usize << keep.len();
        let dim_r = 1usize << rest.len();
        let spread = |bits: usize, sites: &[usize]| {
            sites.iter().enumerate().fold(0usize, |acc, (k, &site)| acc | (((bits >> k) & 1) << site))
        };
        let mut global = Vec::with_capacity(dim_s * dim_r);
        for r in 0..dim_r {
            let rg = spread(r, &rest);
            for s in 0..dim_s {
                global.push(rg | spread(s, keep));
            }
        }
        Ok(Bipartition { dim_s, dim_r, global })
    }

    /// Plain tensor product with global index `s + dim_s * r`.
    pub fn product(dim_s: usize, dim_r: usize) -> Self {
        Bipartition { dim_s, dim_r, global: (0..dim_s * dim_r).collect() }
    }

    pub fn dim_s(&self) -> usize {
        self.dim_s
    }

    pub fn dim_r(&self) -> usize {
        self.dim_r
    }

    pub fn dim(&self) -> usize {
        self.global.len()
    }

    pub fn global_index(&self, s: usize, r: usize) -> usize {
        self.global[r * self.dim_s + s]
    }

    /// `tr_R` of a full-space matrix.
    pub fn trace_out(&self, m: &CMatrix) -> CMatrix {
        let ds = self.dim_s;
        let mut out = CMatrix::zeros(ds, ds);
        for block in self.global.chunks(ds) {
            for (c, &gc) in block.iter().enumerate() {
                for (r, &gr) in block.iter().enumerate() {
                    out[(r, c)] += m[(gr, gc)];
                }
            }
        }
        out
    }

    /// `tr_S` of a full-space matrix.
    pub fn trace_out_s(&self, m: &CMatrix) -> CMatrix {
        let (ds, dr) = (self.dim_s, self.dim_r);
        let mut out = CMatrix::zeros(dr, dr);
        for c in 0..dr {
            for r in 0..dr {
                out[(r, c)] = (0..ds).map(|s| m[(self.global_index(s, r), self.global_index(s, c))]).sum();
            }
        }
        out
    }

    /// The `dim_s x dim_r` coefficient matrix `M[s, r] = <s, r|psi>`.
    pub fn coefficients(&self, psi: &CVector) -> CMatrix {
        CMatrix::from_fn(self.dim_s, self.dim_r, |s, r| psi[self.global_index(s, r)])
    }

    /// Reorders a full-space matrix into the product layout `s + dim_s * r`.
    pub fn to_product_layout(&self, m: &CMatrix) -> CMatrix {
        let n = self.dim();
        CMatrix::from_fn(n, n, |r, c| m[(self.global[r], self.global[c])])
    }
}

/// Reduced state on the qubit sites `keep`, in their own bit order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let dim = rho.dim();
    if !dim.is_power_of_two() {
        return Err(validation("site partial trace needs a qubit state (dimension 2^N)"));
    }
    let split = Bipartition::sites(dim.trailing_zeros() as usize, keep)?;
    Ok(DensityMatrix::new_unchecked(split.trace_out(rho.matrix())))
}
