//! Dense complex linear algebra shared by every other module.
//!
//! All rank decisions go through [`ToleranceConfig::rank_tol`], applied to
//! singular values relative to the largest one. Equality checks use
//! `residual_tol` on max-norms, and eigenvalue clustering uses
//! `eigen_gap_tol`.

use nalgebra::{DMatrix, DVector, Schur, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub rank_tol: f64,
    pub residual_tol: f64,
    pub eigen_gap_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            rank_tol: 1e-9,
            residual_tol: 1e-9,
            eigen_gap_tol: 1e-7,
        }
    }
}

impl ToleranceConfig {
    pub fn new(rank_tol: f64, residual_tol: f64, eigen_gap_tol: f64) -> Result<Self> {
        let cfg = Self {
            rank_tol,
            residual_tol,
            eigen_gap_tol,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rank_tol", self.rank_tol),
            ("residual_tol", self.residual_tol),
            ("eigen_gap_tol", self.eigen_gap_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidTolerance(format!("{name} = {v}")));
            }
        }
        Ok(())
    }
}

/// Outcome of a span membership test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub contained: bool,
    pub residual: f64,
}

/// A subspace of `C^ambient_dim`, stored as an orthonormal basis (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: CMatrix,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: CMatrix::zeros(ambient_dim, 0),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: CMatrix::identity(ambient_dim, ambient_dim),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Orthonormal basis vectors as the columns of a matrix.
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn vectors(&self) -> impl Iterator<Item = CVector> + '_ {
        self.basis.column_iter().map(|c| c.into_owned())
    }

    /// Orthogonal projection of `v` onto the subspace.
    pub fn project(&self, v: &CVector) -> CVector {
        if self.dim() == 0 {
            return CVector::zeros(self.ambient_dim);
        }
        &self.basis * (self.basis.adjoint() * v)
    }

    /// Coordinates of the orthogonal projection of `v` in the stored basis.
    pub fn coordinates(&self, v: &CVector) -> CVector {
        self.basis.adjoint() * v
    }

    /// Gram-Schmidt step: appends the normalized component of `v` orthogonal
    /// to the current span when it exceeds `rank_tol * |v|`. Returns whether
    /// the dimension grew.
    pub fn try_extend(&mut self, v: &CVector, tol: &ToleranceConfig) -> bool {
        assert_eq!(
            v.len(),
            self.ambient_dim,
            "vector length must match ambient dimension"
        );
        let norm = v.norm();
        if norm == 0.0 || self.dim() == self.ambient_dim {
            return false;
        }
        let mut w = v - self.project(v);
        // second pass restores orthogonality lost to cancellation
        w -= self.project(&w);
        let r = w.norm();
        if r <= tol.rank_tol * norm {
            return false;
        }
        w /= C64::new(r, 0.0);
        let k = self.dim();
        self.basis = self.basis.clone().insert_column(k, ZERO);
        self.basis.set_column(k, &w);
        true
    }
}

/// `ab - ba`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() || a.shape() != b.shape() {
        return Err(mismatch(format!(
            "commutator of {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(a * b - b * a)
}

pub fn span_contains(s: &Subspace, v: &CVector, tol: &ToleranceConfig) -> Result<Membership> {
    if v.len() != s.ambient_dim() {
        return Err(mismatch(format!(
            "vector of length {} against ambient dimension {}",
            v.len(),
            s.ambient_dim()
        )));
    }
    let residual = (v - s.project(v)).norm();
    Ok(Membership {
        contained: residual <= tol.residual_tol * v.norm().max(1.0),
        residual,
    })
}

/// Orthonormal basis of the span of `vectors`, rank decided by SVD
/// thresholding.
pub fn span_close(
    ambient_dim: usize,
    vectors: &[CVector],
    tol: &ToleranceConfig,
) -> Result<Subspace> {
    if vectors.is_empty() {
        return Ok(Subspace::zero(ambient_dim));
    }
    if let Some(bad) = vectors.iter().find(|v| v.len() != ambient_dim) {
        return Err(mismatch(format!(
            "vector of length {} in span of ambient dimension {}",
            bad.len(),
            ambient_dim
        )));
    }
    Ok(column_space(&CMatrix::from_columns(vectors), tol))
}

/// Orthonormal basis of the column space of `a`.
pub fn column_space(a: &CMatrix, tol: &ToleranceConfig) -> Subspace {
    let rows = a.nrows();
    if a.ncols() == 0 || rows == 0 {
        return Subspace::zero(rows);
    }
    let svd = SVD::new(a.clone(), true, false);
    let thresh = threshold(&svd.singular_values, tol);
    let u = svd.u.expect("left singular vectors requested");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > thresh)
        .collect();
    let cols: Vec<CVector> = keep.iter().map(|&k| u.column(k).into_owned()).collect();
    if cols.is_empty() {
        return Subspace::zero(rows);
    }
    Subspace {
        ambient_dim: rows,
        basis: CMatrix::from_columns(&cols),
    }
}

fn threshold(sv: &DVector<f64>, tol: &ToleranceConfig) -> f64 {
    let max = sv.iter().cloned().fold(0.0, f64::max);
    // a numerically zero matrix has rank zero
    (tol.rank_tol * max).max(f64::MIN_POSITIVE)
}

pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = SVD::new(a.clone(), false, false)
        .singular_values
        .iter()
        .cloned()
        .collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

pub fn rank(a: &CMatrix, tol: &ToleranceConfig) -> usize {
    if a.is_empty() {
        return 0;
    }
    let sv = SVD::new(a.clone(), false, false).singular_values;
    let thresh = threshold(&sv, tol);
    sv.iter().filter(|&&s| s > thresh).count()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Orthonormal basis of `{v : a v = 0}`.
pub fn nullspace(a: &CMatrix, tol: &ToleranceConfig) -> Subspace {
    let n = a.ncols();
    if n == 0 {
        return Subspace::zero(0);
    }
    if a.nrows() == 0 {
        return Subspace::full(n);
    }
    // pad to at least square so the thin SVD yields a full right basis
    let padded = if a.nrows() < n {
        a.clone().resize_vertically(n, ZERO)
    } else {
        a.clone()
    };
    let svd = SVD::new(padded, false, true);
    let thresh = threshold(&svd.singular_values, tol);
    let vt = svd.v_t.expect("right singular vectors requested");
    let cols: Vec<CVector> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] <= thresh)
        .map(|k| vt.row(k).adjoint())
        .collect();
    if cols.is_empty() {
        return Subspace::zero(n);
    }
    Subspace {
        ambient_dim: n,
        basis: CMatrix::from_columns(&cols),
    }
}

/// Least-squares solution `x` of `a x = b` via the thresholded pseudo-inverse.
pub fn least_squares(a: &CMatrix, b: &CMatrix, tol: &ToleranceConfig) -> Result<CMatrix> {
    if a.nrows() != b.nrows() {
        return Err(mismatch(format!(
            "least squares with {:?} and right-hand side {:?}",
            a.shape(),
            b.shape()
        )));
    }
    if a.is_empty() {
        return Ok(CMatrix::zeros(a.ncols(), b.ncols()));
    }
    let svd = SVD::new(a.clone(), true, true);
    let thresh = threshold(&svd.singular_values, tol);
    svd.solve(b, thresh)
        .map_err(|e| Error::DimensionMismatch(e.to_string()))
}

/// One eigenvalue cluster and its eigenspace.
#[derive(Debug, Clone)]
pub struct EigenCluster {
    pub eigenvalue: C64,
    pub multiplicity: usize,
    pub space: Subspace,
}

/// Splits `C^n` into eigenspaces of a diagonalizable matrix.
///
/// Eigenvalues closer than `eigen_gap_tol * max(1, |spectrum|)` are merged
/// (single linkage). Clusters are ordered by real part, then imaginary part.
pub fn eigen_split(a: &CMatrix, tol: &ToleranceConfig) -> Result<Vec<EigenCluster>> {
    if !a.is_square() {
        return Err(mismatch(format!("eigen_split of {:?}", a.shape())));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(a.clone(), f64::EPSILON, 0).ok_or(Error::NoConvergence)?;
    let (_, t) = schur.unpack();
    let eig: Vec<C64> = (0..n).map(|k| t[(k, k)]).collect();

    let scale = eig.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let gap = tol.eigen_gap_tol * scale;
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], mut x: usize) -> usize {
        while label[x] != x {
            label[x] = label[label[x]];
            x = label[x];
        }
        x
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (eig[i] - eig[j]).norm() <= gap {
                let (ri, rj) = (find(&mut label, i), find(&mut label, j));
                if ri != rj {
                    label[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut label, i);
        match root_of[r] {
            Some(g) => groups[g].push(i),
            None => {
                root_of[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }

    let mut clusters = Vec::with_capacity(groups.len());
    for g in groups {
        let mean = g.iter().map(|&k| eig[k]).sum::<C64>() / C64::new(g.len() as f64, 0.0);
        let shifted = a - CMatrix::identity(n, n) * mean;
        let space = nullspace(&shifted, tol);
        if space.dim() != g.len() {
            return Err(Error::NonDiagonalizable {
                eigenvalue: format!("{mean}"),
                algebraic: g.len(),
                geometric: space.dim(),
            });
        }
        clusters.push(EigenCluster {
            eigenvalue: mean,
            multiplicity: g.len(),
            space,
        });
    }
    clusters.sort_by(|x, y| {
        x.eigenvalue
            .re
            .total_cmp(&y.eigenvalue.re)
            .then(x.eigenvalue.im.total_cmp(&y.eigenvalue.im))
    });
    Ok(clusters)
}

pub fn max_norm(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_finite(a: &CMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Column-major flattening of a matrix.
pub fn vectorize(a: &CMatrix) -> CVector {
    CVector::from_column_slice(a.as_slice())
}

pub fn unvectorize(v: &CVector, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_column_slice(rows, cols, v.as_slice())
}

pub fn block_diag(blocks: &[CMatrix]) -> CMatrix {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), b.shape()).copy_from(b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}
