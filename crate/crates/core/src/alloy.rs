//! Alloys and cross-projective representations.
//!
//! An alloy is a space `g = g_1 ⊕ ... ⊕ g_n` (parts are disjoint coordinate
//! index sets) with a bracket defined only on pairs taken from the same part.
//! A two-part alloy is equivalently a pair of anticommutative algebras plus
//! the cross components `λ1: Λ²(g_1) -> g_2`, `λ2: Λ²(g_2) -> g_1`, which is
//! how quaternary operations enter.

pub mod search;

use serde::Serialize;

use crate::algebra::{
    pair_count, quaternary_wedge_square, wedge_compose, wedge_square_algebra, AntiAlgebra,
    PairBasis, QuaternaryAlgebra,
};
use crate::error::{mismatch, Error, Result};
use crate::numkernel::{
    column_space, is_finite, least_squares, max_norm, rank, span_contains, vectorize, CMatrix,
    CVector, ToleranceConfig, C64, ONE,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Alloy {
    names: Vec<String>,
    parts: Vec<Vec<usize>>,
    brackets: Vec<CMatrix>,
}

impl Alloy {
    /// `parts` must partition `0..names.len()`, each part listed in
    /// increasing order. `brackets[p]` is `dim x C(|part p|, 2)`; its columns
    /// follow the lexicographic pair order of the part's own indices.
    pub fn new(names: Vec<String>, parts: Vec<Vec<usize>>, brackets: Vec<CMatrix>) -> Result<Self> {
        let alloy = Self {
            names,
            parts,
            brackets,
        };
        alloy.validate()?;
        Ok(alloy)
    }

    /// Well-formedness: disjoint covering parts, one bracket table per part of
    /// the right shape, finite entries.
    pub fn validate(&self) -> Result<()> {
        let dim = self.dim();
        let mut seen = vec![false; dim];
        for (p, part) in self.parts.iter().enumerate() {
            if part.is_empty() {
                return Err(Error::InvalidAlloy(format!("part {p} is empty")));
            }
            if part.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidAlloy(format!(
                    "part {p} is not strictly increasing"
                )));
            }
            for &i in part {
                if i >= dim {
                    return Err(Error::InvalidAlloy(format!(
                        "index {i} out of range in part {p}"
                    )));
                }
                if seen[i] {
                    return Err(Error::InvalidAlloy(format!(
                        "index {i} appears in two parts"
                    )));
                }
                seen[i] = true;
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidAlloy(format!(
                "index {i} is not covered by any part"
            )));
        }
        if self.brackets.len() != self.parts.len() {
            return Err(Error::InvalidAlloy(format!(
                "{} bracket tables for {} parts",
                self.brackets.len(),
                self.parts.len()
            )));
        }
        for (p, (part, table)) in self.parts.iter().zip(&self.brackets).enumerate() {
            if table.shape() != (dim, pair_count(part.len())) {
                return Err(Error::InvalidAlloy(format!(
                    "bracket table of part {p} has shape {:?}, expected {:?}",
                    table.shape(),
                    (dim, pair_count(part.len()))
                )));
            }
            if !is_finite(table) {
                return Err(Error::InvalidAlloy(format!(
                    "non-finite bracket in part {p}"
                )));
            }
        }
        Ok(())
    }

    /// A single-part alloy, i.e. the algebra itself with its full bracket.
    pub fn from_algebra(g: &AntiAlgebra) -> Self {
        Self {
            names: g.names().to_vec(),
            parts: vec![(0..g.dim()).collect()],
            brackets: vec![g.table().clone()],
        }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn part_table(&self, p: usize) -> &CMatrix {
        &self.brackets[p]
    }

    pub fn part_of(&self, i: usize) -> Option<usize> {
        self.parts.iter().position(|part| part.contains(&i))
    }

    /// `[x_i, x_j]` when both lie in the same part, `None` for pairs outside
    /// `W`.
    pub fn bracket(&self, i: usize, j: usize) -> Option<CVector> {
        let p = self.part_of(i)?;
        let part = &self.parts[p];
        let a = part.iter().position(|&x| x == i)?;
        let b = part.iter().position(|&x| x == j)?;
        match PairBasis::new(part.len()).index(a, b) {
            Some((col, sign)) => Some(self.brackets[p].column(col) * C64::new(sign, 0.0)),
            None => Some(CVector::zeros(self.dim())),
        }
    }

    /// All basis pairs of `W` as `(part, i, j, [x_i, x_j])` with `i < j`.
    pub fn w_pairs(&self) -> Vec<(usize, usize, usize, CVector)> {
        let mut out = Vec::new();
        for (p, part) in self.parts.iter().enumerate() {
            for (col, &(a, b)) in PairBasis::new(part.len()).pairs().iter().enumerate() {
                out.push((
                    p,
                    part[a],
                    part[b],
                    self.brackets[p].column(col).into_owned(),
                ));
            }
        }
        out
    }
}

/// The cross components `λ1: Λ²(g_1) -> g_2` (`m x C(n,2)`) and
/// `λ2: Λ²(g_2) -> g_1` (`n x C(m,2)`).
#[derive(Debug, Clone, PartialEq)]
pub struct AlloyFactorization {
    n: usize,
    m: usize,
    pub lam1: CMatrix,
    pub lam2: CMatrix,
}

impl AlloyFactorization {
    pub fn new(n: usize, m: usize, lam1: CMatrix, lam2: CMatrix) -> Result<Self> {
        if lam1.shape() != (m, pair_count(n)) || lam2.shape() != (n, pair_count(m)) {
            return Err(mismatch(format!(
                "factorization shapes {:?}, {:?} for dimensions ({n}, {m})",
                lam1.shape(),
                lam2.shape()
            )));
        }
        Ok(Self { n, m, lam1, lam2 })
    }

    pub fn zero(n: usize, m: usize) -> Self {
        Self {
            n,
            m,
            lam1: CMatrix::zeros(m, pair_count(n)),
            lam2: CMatrix::zeros(n, pair_count(m)),
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    /// `λ2(λ1(U,V), λ1(X,Y))` as a quaternary operation on `g_1`.
    pub fn first_composite(&self) -> CMatrix {
        wedge_compose(&self.lam2, self.m, &self.lam1, &self.lam1)
    }

    /// `λ1(λ2(A,B), λ2(C,D))` as a quaternary operation on `g_2`.
    pub fn second_composite(&self) -> CMatrix {
        wedge_compose(&self.lam1, self.n, &self.lam2, &self.lam2)
    }
}

#[derive(Debug, Clone)]
pub struct CrossProjRep {
    pub g1: AntiAlgebra,
    pub g2: AntiAlgebra,
    pub t1: Vec<CMatrix>,
    pub t2: Vec<CMatrix>,
    space_dim: usize,
}

impl CrossProjRep {
    pub fn new(
        g1: AntiAlgebra,
        g2: AntiAlgebra,
        t1: Vec<CMatrix>,
        t2: Vec<CMatrix>,
        space_dim: usize,
    ) -> Result<Self> {
        if t1.len() != g1.dim() || t2.len() != g2.dim() {
            return Err(mismatch(format!(
                "{} and {} images for algebras of dimension {} and {}",
                t1.len(),
                t2.len(),
                g1.dim(),
                g2.dim()
            )));
        }
        if let Some(bad) = t1
            .iter()
            .chain(&t2)
            .find(|t| t.shape() != (space_dim, space_dim))
        {
            return Err(mismatch(format!(
                "image of shape {:?} in space of dimension {space_dim}",
                bad.shape()
            )));
        }
        if !t1.iter().chain(&t2).all(is_finite) {
            return Err(Error::Format("non-finite matrix entry".into()));
        }
        Ok(Self {
            g1,
            g2,
            t1,
            t2,
            space_dim,
        })
    }

    pub fn space_dim(&self) -> usize {
        self.space_dim
    }
}

/// Commutator defect of one basis pair, with its coordinates against the
/// other side's images when those are linearly independent.
#[derive(Debug, Clone, Serialize)]
pub struct PairDefect {
    /// 1 for pairs from `g_1` (checked modulo `T2`), 2 for `g_2`.
    pub part: usize,
    pub i: usize,
    pub j: usize,
    pub residual: f64,
    #[serde(skip)]
    pub coords: Option<CVector>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossProjReport {
    pub ok: bool,
    pub worst_residual: f64,
    /// Largest residual divided by its scale; `ok` iff at most `residual_tol`.
    pub worst_relative: f64,
    pub defects: Vec<PairDefect>,
}

fn image_columns(images: &[CMatrix], d: usize) -> CMatrix {
    if images.is_empty() {
        return CMatrix::zeros(d * d, 0);
    }
    CMatrix::from_columns(&images.iter().map(vectorize).collect::<Vec<_>>())
}

/// `[T(x_i), T(x_j)] - T(<x_i, x_j>)` for every basis pair.
fn defects(g: &AntiAlgebra, t: &[CMatrix]) -> Vec<(usize, usize, CMatrix)> {
    g.pair_basis()
        .pairs()
        .iter()
        .enumerate()
        .map(|(p, &(i, j))| {
            let mut delta = &t[i] * &t[j] - &t[j] * &t[i];
            for (k, c) in g.table().column(p).iter().enumerate() {
                if *c != C64::new(0.0, 0.0) {
                    delta -= &t[k] * *c;
                }
            }
            (i, j, delta)
        })
        .collect()
}

/// Verifies both congruences of a cross-projective representation.
pub fn cross_projective_check(r: &CrossProjRep, tol: &ToleranceConfig) -> CrossProjReport {
    let d = r.space_dim;
    let mut out = Vec::new();
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut relative: f64 = 0.0;
    for (part, g, own, other) in [(1, &r.g1, &r.t1, &r.t2), (2, &r.g2, &r.t2, &r.t1)] {
        let cols = image_columns(other, d);
        let span = column_space(&cols, tol);
        let injective = span.dim() == other.len();
        for (i, j, delta) in defects(g, own) {
            let v = vectorize(&delta);
            let m = span_contains(&span, &v, tol).expect("defect lives in End(V)");
            ok &= m.contained;
            worst = worst.max(m.residual);
            relative = relative.max(m.residual / v.norm().max(1.0));
            let coords = (injective && m.contained).then(|| {
                least_squares(
                    &cols,
                    &CMatrix::from_column_slice(v.len(), 1, v.as_slice()),
                    tol,
                )
                .expect("shapes agree")
                .column(0)
                .into_owned()
            });
            out.push(PairDefect {
                part,
                i,
                j,
                residual: m.residual,
                coords,
            });
        }
    }
    CrossProjReport {
        ok,
        worst_residual: worst,
        worst_relative: relative,
        defects: out,
    }
}

/// Subtracts `tr T(X) / dim V` times the identity from every image, then
/// re-runs [`cross_projective_check`] on the result.
pub fn traceless_normalize(
    r: &CrossProjRep,
    tol: &ToleranceConfig,
) -> (CrossProjRep, CrossProjReport) {
    let d = r.space_dim;
    let shift = |t: &CMatrix| {
        if d == 0 {
            return t.clone();
        }
        t - CMatrix::identity(d, d) * (t.trace() / C64::new(d as f64, 0.0))
    };
    let out = CrossProjRep {
        g1: r.g1.clone(),
        g2: r.g2.clone(),
        t1: r.t1.iter().map(shift).collect(),
        t2: r.t2.iter().map(shift).collect(),
        space_dim: d,
    };
    let report = cross_projective_check(&out, tol);
    (out, report)
}

/// The unique alloy on `g_1 ⊕ g_2` realized by a strict cross-projective
/// representation with transversal images.
///
/// Strictness means both `T1` and `T2` are injective. The bracket of a
/// `g_1` pair is `<X, Y>_1 + λ1(X, Y)`, where `λ1(X, Y)` is the coordinate
/// vector of the commutator defect in the basis `T2(g_2)`; symmetrically for
/// `g_2`.
pub fn alloy_from_cross_projective(
    r: &CrossProjRep,
    tol: &ToleranceConfig,
) -> Result<(Alloy, AlloyFactorization)> {
    let d = r.space_dim;
    let (n, m) = (r.g1.dim(), r.g2.dim());
    let c1 = image_columns(&r.t1, d);
    let c2 = image_columns(&r.t2, d);
    let r1 = rank(&c1, tol);
    if r1 < n {
        return Err(Error::NotStrict(format!(
            "T1 has a kernel of dimension {}",
            n - r1
        )));
    }
    let r2 = rank(&c2, tol);
    if r2 < m {
        return Err(Error::NotStrict(format!(
            "T2 has a kernel of dimension {}",
            m - r2
        )));
    }
    let both = CMatrix::from_fn(d * d, n + m, |row, col| {
        if col < n {
            c1[(row, col)]
        } else {
            c2[(row, col - n)]
        }
    });
    let rb = rank(&both, tol);
    if rb < n + m {
        return Err(Error::NotTransversal(n + m - rb));
    }

    let solve = |part: usize,
                 g: &AntiAlgebra,
                 own: &[CMatrix],
                 cols: &CMatrix,
                 rows: usize|
     -> Result<CMatrix> {
        let ds = defects(g, own);
        let mut lam = CMatrix::zeros(rows, ds.len());
        for (p, (i, j, delta)) in ds.into_iter().enumerate() {
            let v = vectorize(&delta);
            let rhs = CMatrix::from_column_slice(v.len(), 1, v.as_slice());
            let x = least_squares(cols, &rhs, tol)?;
            let residual = (cols * &x - &rhs).norm();
            if residual > tol.residual_tol * v.norm().max(1.0) {
                return Err(Error::NotCrossProjective {
                    part,
                    i,
                    j,
                    residual,
                });
            }
            lam.set_column(p, &x.column(0));
        }
        Ok(lam)
    };
    let lam1 = solve(1, &r.g1, &r.t1, &c2, m)?;
    let lam2 = solve(2, &r.g2, &r.t2, &c1, n)?;

    let dim = n + m;
    let mut part1 = CMatrix::zeros(dim, pair_count(n));
    part1
        .view_mut((0, 0), (n, pair_count(n)))
        .copy_from(r.g1.table());
    part1.view_mut((n, 0), (m, pair_count(n))).copy_from(&lam1);
    let mut part2 = CMatrix::zeros(dim, pair_count(m));
    part2.view_mut((0, 0), (n, pair_count(m))).copy_from(&lam2);
    part2
        .view_mut((n, 0), (m, pair_count(m)))
        .copy_from(r.g2.table());

    let names = r.g1.names().iter().chain(r.g2.names()).cloned().collect();
    let alloy = Alloy::new(
        names,
        vec![(0..n).collect(), (n..dim).collect()],
        vec![part1, part2],
    )?;
    Ok((alloy, AlloyFactorization::new(n, m, lam1, lam2)?))
}

/// Cross components of a two-part alloy.
pub fn alloy_factorization(a: &Alloy) -> Result<AlloyFactorization> {
    if a.parts().len() != 2 {
        return Err(Error::InvalidAlloy(format!(
            "expected exactly two parts, found {}",
            a.parts().len()
        )));
    }
    let (p1, p2) = (&a.parts()[0], &a.parts()[1]);
    let pick = |table: &CMatrix, rows: &[usize]| {
        CMatrix::from_fn(rows.len(), table.ncols(), |r, c| table[(rows[r], c)])
    };
    AlloyFactorization::new(
        p1.len(),
        p2.len(),
        pick(a.part_table(0), p2),
        pick(a.part_table(1), p1),
    )
}

/// The quaternary operations a two-part alloy induces on its parts:
/// `<U,V,X,Y>_1 = λ2(λ1(U,V), λ1(X,Y))` and
/// `<A,B,C,D>_2 = λ1(λ2(A,B), λ2(C,D))`.
pub fn quaternary_from_alloy(a: &Alloy) -> Result<(QuaternaryAlgebra, QuaternaryAlgebra)> {
    let f = alloy_factorization(a)?;
    let (n, m) = f.dims();
    Ok((
        QuaternaryAlgebra::new(n, f.first_composite())?,
        QuaternaryAlgebra::new(m, f.second_composite())?,
    ))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AlloyabilityReport {
    pub ok: bool,
    pub first_residual: f64,
    pub second_residual: f64,
    pub worst_residual: f64,
    /// `worst_residual` divided by its scale; `ok` iff at most `residual_tol`.
    pub worst_relative: f64,
}

/// Checks the mutual factorization identities on all basis tuples (by
/// linearity, on the basis of `Λ²(Λ²(g_i))`).
pub fn alloyability_check(
    q1: &QuaternaryAlgebra,
    q2: &QuaternaryAlgebra,
    f: &AlloyFactorization,
    tol: &ToleranceConfig,
) -> Result<AlloyabilityReport> {
    if (q1.dim(), q2.dim()) != f.dims() {
        return Err(mismatch(format!(
            "quaternary algebras of dimension ({}, {}) against factorization for {:?}",
            q1.dim(),
            q2.dim(),
            f.dims()
        )));
    }
    let first = max_norm(&(q1.matrix() - f.first_composite()));
    let second = max_norm(&(q2.matrix() - f.second_composite()));
    let worst = first.max(second);
    let scale = max_norm(q1.matrix()).max(max_norm(q2.matrix())).max(1.0);
    Ok(AlloyabilityReport {
        ok: worst <= tol.residual_tol * scale,
        first_residual: first,
        second_residual: second,
        worst_residual: worst,
        worst_relative: worst / scale,
    })
}

/// `Λ²(g_1)` with its induced quaternary operation, together with
/// `λ1 = id` on `Λ²(g_1)` and `λ2 = q1`.
pub fn canonical_partner(q1: &QuaternaryAlgebra) -> (QuaternaryAlgebra, AlloyFactorization) {
    let n = q1.dim();
    let big = pair_count(n);
    let lam1 = CMatrix::identity(big, big);
    let f =
        AlloyFactorization::new(n, big, lam1, q1.matrix().clone()).expect("canonical shapes agree");
    (quaternary_wedge_square(q1), f)
}

/// The alloy on `g ⊕ Λ²(g)` assembled from a bracket and a quaternary
/// operation on `g`: part 1 brackets as `<X, Y> + X∧Y`, part 2 uses the
/// induced bracket on `Λ²(g)` plus `q` as its `g` component.
pub fn alloy_from_quaternary(g: &AntiAlgebra, q: &QuaternaryAlgebra) -> Result<Alloy> {
    if g.dim() != q.dim() {
        return Err(mismatch(format!(
            "bracket on dimension {} with quaternary operation on dimension {}",
            g.dim(),
            q.dim()
        )));
    }
    let n = g.dim();
    let big = pair_count(n);
    let dim = n + big;
    let wedge = wedge_square_algebra(g);

    let mut part1 = CMatrix::zeros(dim, big);
    part1.view_mut((0, 0), (n, big)).copy_from(g.table());
    for p in 0..big {
        part1[(n + p, p)] = ONE;
    }
    let cols2 = pair_count(big);
    let mut part2 = CMatrix::zeros(dim, cols2);
    part2.view_mut((0, 0), (n, cols2)).copy_from(q.matrix());
    part2
        .view_mut((n, 0), (big, cols2))
        .copy_from(wedge.table());

    let names = g
        .names()
        .iter()
        .cloned()
        .chain(wedge.names().iter().cloned())
        .collect();
    Alloy::new(
        names,
        vec![(0..n).collect(), (n..dim).collect()],
        vec![part1, part2],
    )
}
