//! Representations of alloys.
//!
//! A representation assigns a square matrix to every basis element of an
//! alloy such that `[T(X), T(Y)] = T([X, Y])` for the pairs where the bracket
//! is defined. Pairs from different parts are unconstrained.
//!
//! Irreducibility is decided with Burnside's criterion (the unital algebra
//! generated by the images is all of `Mat_d`), decompositions come from
//! eigenspaces of random commutant elements.

use rand::Rng;
use serde::Serialize;

use crate::alloy::Alloy;
use crate::error::{mismatch, Error, Result};
use crate::numkernel::{
    block_diag, commutator, eigen_split, is_finite, kron, max_norm, nullspace, rank, real,
    unvectorize, vectorize, CMatrix, CVector, Subspace, ToleranceConfig, C64,
};
use crate::random::{random_scalar, rng_for, GENERATOR};

/// Resampling budget for decompositions.
pub const MAX_DRAWS: usize = 20;

/// Random intertwiner draws before two representations are declared
/// non-isomorphic.
pub const ISO_DRAWS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct AlloyRep {
    alloy: Alloy,
    mats: Vec<CMatrix>,
    space_dim: usize,
}

impl AlloyRep {
    pub fn new(alloy: Alloy, mats: Vec<CMatrix>, space_dim: usize) -> Result<Self> {
        if mats.len() != alloy.dim() {
            return Err(mismatch(format!(
                "{} matrices for an alloy of dimension {}",
                mats.len(),
                alloy.dim()
            )));
        }
        if let Some(bad) = mats.iter().find(|t| t.shape() != (space_dim, space_dim)) {
            return Err(mismatch(format!(
                "matrix of shape {:?} in a representation of dimension {space_dim}",
                bad.shape()
            )));
        }
        if !mats.iter().all(is_finite) {
            return Err(Error::Format("non-finite matrix entry".into()));
        }
        Ok(Self {
            alloy,
            mats,
            space_dim,
        })
    }

    /// The representation sending every basis element to zero.
    pub fn zero(alloy: Alloy, space_dim: usize) -> Self {
        let mats = vec![CMatrix::zeros(space_dim, space_dim); alloy.dim()];
        Self {
            alloy,
            mats,
            space_dim,
        }
    }

    pub fn alloy(&self) -> &Alloy {
        &self.alloy
    }

    pub fn mats(&self) -> &[CMatrix] {
        &self.mats
    }

    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    /// `S T(x) S^{-1}` for every basis element.
    pub fn conjugate(&self, s: &CMatrix) -> Result<Self> {
        let inv = s
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidParams("conjugating matrix is singular".into()))?;
        if s.shape() != (self.space_dim, self.space_dim) {
            return Err(mismatch(format!("conjugation by {:?}", s.shape())));
        }
        Ok(Self {
            alloy: self.alloy.clone(),
            mats: self.mats.iter().map(|t| s * t * &inv).collect(),
            space_dim: self.space_dim,
        })
    }

    fn with_mats(&self, mats: Vec<CMatrix>) -> Self {
        let space_dim = mats.first().map_or(0, |m| m.nrows());
        Self {
            alloy: self.alloy.clone(),
            mats,
            space_dim,
        }
    }
}

fn same_alloy(r1: &AlloyRep, r2: &AlloyRep) -> Result<()> {
    if r1.alloy != r2.alloy {
        return Err(Error::AlloyMismatch);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RepReport {
    pub ok: bool,
    pub worst_residual: f64,
    /// Largest residual divided by its scale; `ok` iff at most `residual_tol`.
    pub worst_relative: f64,
}

/// Verifies `[T(x_i), T(x_j)] = T([x_i, x_j])` for every basis pair inside a
/// part.
pub fn check_rep(r: &AlloyRep, tol: &ToleranceConfig) -> RepReport {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut relative: f64 = 0.0;
    for (_, i, j, bracket) in r.alloy.w_pairs() {
        let lhs = &r.mats[i] * &r.mats[j] - &r.mats[j] * &r.mats[i];
        let mut rhs = CMatrix::zeros(r.space_dim, r.space_dim);
        for (k, c) in bracket.iter().enumerate() {
            if c.norm() != 0.0 {
                rhs += &r.mats[k] * *c;
            }
        }
        let res = max_norm(&(&lhs - &rhs));
        let scale = max_norm(&lhs).max(max_norm(&rhs)).max(1.0);
        ok &= res <= tol.residual_tol * scale;
        worst = worst.max(res);
        relative = relative.max(res / scale);
    }
    RepReport {
        ok,
        worst_residual: worst,
        worst_relative: relative,
    }
}

pub fn direct_sum(r1: &AlloyRep, r2: &AlloyRep) -> Result<AlloyRep> {
    same_alloy(r1, r2)?;
    let mats = r1
        .mats
        .iter()
        .zip(&r2.mats)
        .map(|(a, b)| block_diag(&[a.clone(), b.clone()]))
        .collect();
    Ok(r1.with_mats(mats).with_dim(r1.space_dim + r2.space_dim))
}

/// `T(x) = T1(x) ⊗ I + I ⊗ T2(x)`.
pub fn tensor_product(r1: &AlloyRep, r2: &AlloyRep) -> Result<AlloyRep> {
    same_alloy(r1, r2)?;
    let (d1, d2) = (r1.space_dim, r2.space_dim);
    let (i1, i2) = (CMatrix::identity(d1, d1), CMatrix::identity(d2, d2));
    let mats = r1
        .mats
        .iter()
        .zip(&r2.mats)
        .map(|(a, b)| kron(a, &i2) + kron(&i1, b))
        .collect();
    Ok(r1.with_mats(mats).with_dim(d1 * d2))
}

impl AlloyRep {
    fn with_dim(mut self, d: usize) -> Self {
        self.space_dim = d;
        self
    }
}

fn normalized(a: CMatrix) -> CMatrix {
    let n = a.norm();
    if n == 0.0 {
        a
    } else {
        a / real(n)
    }
}

/// Span (in `C^{d²}`, column-major) of the unital associative algebra
/// generated by `mats`.
///
/// Words are grown breadth-first by left multiplication with the generators;
/// a word enters the spanning set when it is independent of the current span
/// under `rank_tol`. The span of all words is the generated algebra.
pub fn generated_algebra(d: usize, mats: &[CMatrix], tol: &ToleranceConfig) -> Subspace {
    let mut span = Subspace::zero(d * d);
    if d == 0 {
        return span;
    }
    let gens: Vec<CMatrix> = mats
        .iter()
        .filter(|m| m.norm() > 0.0)
        .map(|m| normalized(m.clone()))
        .collect();
    let mut words = vec![CMatrix::identity(d, d) / real((d as f64).sqrt())];
    span.try_extend(&vectorize(&words[0]), tol);
    let mut next = 0;
    while next < words.len() && span.dim() < d * d {
        let w = words[next].clone();
        next += 1;
        for g in &gens {
            // g and w have unit norm, so a tiny product is round-off
            let cand = g * &w;
            if cand.norm() > tol.rank_tol && span.try_extend(&vectorize(&cand), tol) {
                words.push(normalized(cand));
            }
        }
    }
    span
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct IrreducibilityCertificate {
    pub irreducible: bool,
    /// Dimension of the generated unital algebra.
    pub generated_dim: usize,
    /// `space_dim²`.
    pub full_dim: usize,
}

/// Burnside test: irreducible over `C` iff the images generate `Mat_d`.
pub fn is_irreducible(r: &AlloyRep, tol: &ToleranceConfig) -> Result<IrreducibilityCertificate> {
    let check = check_rep(r, tol);
    if !check.ok {
        return Err(Error::InvalidRepresentation(check.worst_residual));
    }
    Ok(burnside(r.space_dim, &r.mats, tol))
}

fn burnside(d: usize, mats: &[CMatrix], tol: &ToleranceConfig) -> IrreducibilityCertificate {
    let generated = generated_algebra(d, mats, tol).dim();
    IrreducibilityCertificate {
        irreducible: d > 0 && generated == d * d,
        generated_dim: generated,
        full_dim: d * d,
    }
}

/// Matrices `S` (`rows x cols`) with `S A_k = B_k S` for all `k`, as a
/// subspace of `C^{rows·cols}`.
fn intertwiners(
    a: &[CMatrix],
    b: &[CMatrix],
    rows: usize,
    cols: usize,
    tol: &ToleranceConfig,
) -> Subspace {
    let unknowns = rows * cols;
    if a.is_empty() {
        return Subspace::full(unknowns);
    }
    let (ic, ir) = (CMatrix::identity(cols, cols), CMatrix::identity(rows, rows));
    let block = unknowns;
    let mut sys = CMatrix::zeros(block * a.len(), unknowns);
    for (k, (ak, bk)) in a.iter().zip(b).enumerate() {
        // vec(S A) = (A^T ⊗ I) vec S, vec(B S) = (I ⊗ B) vec S
        let eq = kron(&ak.transpose(), &ir) - kron(&ic, bk);
        sys.view_mut((k * block, 0), (block, unknowns))
            .copy_from(&eq);
    }
    nullspace(&sys, tol)
}

/// All matrices commuting with every image, as a subspace of `C^{d²}`.
pub fn commutant(r: &AlloyRep, tol: &ToleranceConfig) -> Subspace {
    let d = r.space_dim;
    intertwiners(&r.mats, &r.mats, d, d, tol)
}

/// Basis vectors of a matrix subspace reshaped into matrices.
pub fn subspace_matrices(s: &Subspace, rows: usize, cols: usize) -> Vec<CMatrix> {
    s.vectors().map(|v| unvectorize(&v, rows, cols)).collect()
}

/// All `S` with `S T1(x) = T2(x) S`.
pub fn intertwiner_space(r1: &AlloyRep, r2: &AlloyRep, tol: &ToleranceConfig) -> Result<Subspace> {
    same_alloy(r1, r2)?;
    Ok(intertwiners(
        &r1.mats,
        &r2.mats,
        r2.space_dim,
        r1.space_dim,
        tol,
    ))
}

fn random_element<R: Rng + ?Sized>(rng: &mut R, s: &Subspace, rows: usize, cols: usize) -> CMatrix {
    let mut v = CVector::zeros(s.ambient_dim());
    for b in s.vectors() {
        v += b * random_scalar(rng);
    }
    unvectorize(&v, rows, cols)
}

#[derive(Debug, Clone, Serialize)]
pub struct IsoVerdict {
    pub isomorphic: bool,
    pub intertwiner_dim: usize,
    /// Rank of the best random intertwiner drawn.
    pub best_rank: usize,
    pub draws: usize,
    pub seed: u64,
    pub generator: &'static str,
}

/// Isomorphism test: equal dimensions and an invertible intertwiner.
///
/// A random element of the intertwiner space is invertible with probability
/// one when any intertwiner is, so up to [`ISO_DRAWS`] draws are made; for
/// irreducible inputs the first draw already decides (Schur).
pub fn are_isomorphic(
    r1: &AlloyRep,
    r2: &AlloyRep,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<IsoVerdict> {
    same_alloy(r1, r2)?;
    for r in [r1, r2] {
        let c = check_rep(r, tol);
        if !c.ok {
            return Err(Error::InvalidRepresentation(c.worst_residual));
        }
    }
    let mut verdict = IsoVerdict {
        isomorphic: false,
        intertwiner_dim: 0,
        best_rank: 0,
        draws: 0,
        seed,
        generator: GENERATOR,
    };
    if r1.space_dim != r2.space_dim {
        return Ok(verdict);
    }
    let d = r1.space_dim;
    if d == 0 {
        verdict.isomorphic = true;
        return Ok(verdict);
    }
    let space = intertwiner_space(r1, r2, tol)?;
    verdict.intertwiner_dim = space.dim();
    if space.dim() == 0 {
        return Ok(verdict);
    }
    let mut rng = rng_for(seed, 0x150);
    for _ in 0..ISO_DRAWS {
        verdict.draws += 1;
        let s = random_element(&mut rng, &space, d, d);
        let rk = rank(&s, tol);
        verdict.best_rank = verdict.best_rank.max(rk);
        if rk == d {
            verdict.isomorphic = true;
            break;
        }
    }
    Ok(verdict)
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub components: Vec<AlloyRep>,
    /// Columns are the concatenated component bases: conjugating the direct
    /// sum of the components by this matrix reproduces the input.
    pub basis: CMatrix,
    pub reassembly_residual: f64,
    pub draws: usize,
    pub seed: u64,
    pub generator: &'static str,
}

impl Decomposition {
    pub fn dims(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.space_dim).collect()
    }

    /// Component dimensions, largest first.
    pub fn dim_multiset(&self) -> Vec<usize> {
        let mut d = self.dims();
        d.sort_unstable_by(|a, b| b.cmp(a));
        d
    }
}

/// Splits a representation along eigenspaces of random commutant elements
/// until every piece has a one-dimensional commutant.
pub fn decompose(r: &AlloyRep, seed: u64, tol: &ToleranceConfig) -> Result<Decomposition> {
    let check = check_rep(r, tol);
    if !check.ok {
        return Err(Error::InvalidRepresentation(check.worst_residual));
    }
    let mut rng = rng_for(seed, 0xdec);
    let mut draws = 0;
    let pieces = split(&r.mats, r.space_dim, &mut rng, &mut draws, tol)?;

    let basis = if pieces.is_empty() {
        CMatrix::zeros(0, 0)
    } else {
        let cols: Vec<CVector> = pieces
            .iter()
            .flat_map(|(_, b)| b.column_iter().map(|c| c.into_owned()).collect::<Vec<_>>())
            .collect();
        CMatrix::from_columns(&cols)
    };
    let components: Vec<AlloyRep> = pieces
        .into_iter()
        .map(|(mats, _)| r.with_mats(mats))
        .collect();
    let reassembly_residual = reassembly_residual(r, &components, &basis)?;
    Ok(Decomposition {
        components,
        basis,
        reassembly_residual,
        draws,
        seed,
        generator: GENERATOR,
    })
}

/// Max-norm of `P (⊕ components) P^{-1} - T` over all basis elements.
pub fn reassembly_residual(r: &AlloyRep, components: &[AlloyRep], basis: &CMatrix) -> Result<f64> {
    if r.space_dim == 0 {
        return Ok(0.0);
    }
    let inv = basis
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidParams("change-of-basis matrix is singular".into()))?;
    let mut worst: f64 = 0.0;
    for (k, t) in r.mats.iter().enumerate() {
        let blocks: Vec<CMatrix> = components.iter().map(|c| c.mats[k].clone()).collect();
        let back = basis * block_diag(&blocks) * &inv;
        worst = worst.max(max_norm(&(back - t)));
    }
    Ok(worst)
}

type Piece = (Vec<CMatrix>, CMatrix);

fn split<R: Rng + ?Sized>(
    mats: &[CMatrix],
    d: usize,
    rng: &mut R,
    draws: &mut usize,
    tol: &ToleranceConfig,
) -> Result<Vec<Piece>> {
    if d == 0 {
        return Ok(Vec::new());
    }
    let comm = intertwiners(mats, mats, d, d, tol);
    if comm.dim() <= 1 {
        return Ok(vec![(mats.to_vec(), CMatrix::identity(d, d))]);
    }
    for _ in 0..MAX_DRAWS {
        *draws += 1;
        let m = random_element(rng, &comm, d, d);
        let clusters = match eigen_split(&m, tol) {
            Ok(c) if c.len() > 1 => c,
            _ => continue,
        };
        let cols: Vec<CVector> = clusters
            .iter()
            .flat_map(|c| c.space.vectors().collect::<Vec<_>>())
            .collect();
        let p = CMatrix::from_columns(&cols);
        let Some(pinv) = p.clone().try_inverse() else {
            continue;
        };
        let mut out = Vec::new();
        let mut offset = 0;
        for c in &clusters {
            let k = c.space.dim();
            let left = pinv.rows(offset, k).into_owned();
            let right = p.columns(offset, k).into_owned();
            let sub: Vec<CMatrix> = mats.iter().map(|t| &left * t * &right).collect();
            for (sub_mats, sub_basis) in split(&sub, k, rng, draws, tol)? {
                out.push((sub_mats, &right * sub_basis));
            }
            offset += k;
        }
        return Ok(out);
    }
    Err(Error::DecompositionFailed(MAX_DRAWS))
}

/// A finite-dimensional Lie algebra of matrices containing the images of an
/// alloy, with the coordinates of those images.
#[derive(Debug, Clone)]
pub struct EnvelopeAvatar {
    /// Frobenius-orthonormal basis.
    pub basis: Vec<CMatrix>,
    /// Coordinates of each alloy basis image in `basis`.
    pub embed: Vec<CVector>,
    space_dim: usize,
}

impl EnvelopeAvatar {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    /// The alloy images recovered from the embedding coordinates.
    pub fn restriction(&self) -> Vec<CMatrix> {
        let d = self.space_dim;
        self.embed
            .iter()
            .map(|c| {
                c.iter()
                    .zip(&self.basis)
                    .fold(CMatrix::zeros(d, d), |acc, (x, b)| acc + b * *x)
            })
            .collect()
    }

    /// Largest distance from the span of a commutator of two basis elements.
    pub fn closure_defect(&self) -> f64 {
        let span = CMatrix::from_columns(&self.basis.iter().map(vectorize).collect::<Vec<_>>());
        let mut worst: f64 = 0.0;
        for (a, x) in self.basis.iter().enumerate() {
            for y in &self.basis[..a] {
                let v = vectorize(&commutator(x, y).expect("square"));
                let proj = &span * (span.adjoint() * &v);
                worst = worst.max((v - proj).norm());
            }
        }
        worst
    }
}

/// Closes the span of the images under commutators.
pub fn lie_closure(r: &AlloyRep, tol: &ToleranceConfig) -> Result<EnvelopeAvatar> {
    let check = check_rep(r, tol);
    if !check.ok {
        return Err(Error::InvalidRepresentation(check.worst_residual));
    }
    let d = r.space_dim;
    let mut span = Subspace::zero(d * d);
    let mut elems: Vec<CMatrix> = Vec::new();
    for t in &r.mats {
        if t.norm() > 0.0 && span.try_extend(&vectorize(t), tol) {
            elems.push(normalized(t.clone()));
        }
    }
    let mut a = 0;
    while a < elems.len() {
        for b in 0..a {
            let c = commutator(&elems[a], &elems[b])?;
            if c.norm() > tol.rank_tol && span.try_extend(&vectorize(&c), tol) {
                elems.push(normalized(c));
            }
        }
        a += 1;
    }
    let basis = subspace_matrices(&span, d, d);
    let embed = r
        .mats
        .iter()
        .map(|t| span.coordinates(&vectorize(t)))
        .collect();
    Ok(EnvelopeAvatar {
        basis,
        embed,
        space_dim: d,
    })
}

/// Two envelope representations are equivalent when they restrict to the
/// same alloy representation.
pub fn def_equivalent(e1: &EnvelopeAvatar, e2: &EnvelopeAvatar, tol: &ToleranceConfig) -> bool {
    if e1.space_dim != e2.space_dim || e1.embed.len() != e2.embed.len() {
        return false;
    }
    e1.restriction()
        .iter()
        .zip(e2.restriction())
        .all(|(a, b)| max_norm(&(a - &b)) <= tol.residual_tol * max_norm(a).max(1.0))
}

/// Scalar shift helper used by tests and the CLI: `T(x) - tr T(x)/d · I`.
pub fn traceless_shift(r: &AlloyRep) -> AlloyRep {
    let d = r.space_dim;
    let mats = r
        .mats
        .iter()
        .map(|t| {
            if d == 0 {
                t.clone()
            } else {
                t - CMatrix::identity(d, d) * (t.trace() / C64::new(d as f64, 0.0))
            }
        })
        .collect();
    r.with_mats(mats).with_dim(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AntiAlgebra;
    use crate::random::random_invertible;
    use proptest::prelude::*;

    fn sl2() -> Alloy {
        Alloy::from_algebra(&AntiAlgebra::sl2())
    }

    /// Spin-j representation of sl(2) in the basis (e0, f+, f-).
    fn spin(two_j: usize) -> AlloyRep {
        let d = two_j + 1;
        let j = two_j as f64 / 2.0;
        let mut h = CMatrix::zeros(d, d);
        let mut e = CMatrix::zeros(d, d);
        let mut f = CMatrix::zeros(d, d);
        for k in 0..d {
            let mk = j - k as f64;
            h[(k, k)] = real(mk);
            if k + 1 < d {
                let c = ((j + mk) * (j - mk + 1.0)).sqrt();
                e[(k, k + 1)] = real(c);
                f[(k + 1, k)] = real(c);
            }
        }
        AlloyRep::new(sl2(), vec![h, e, f], d).unwrap()
    }

    fn scrambled(r: &AlloyRep, seed: u64) -> AlloyRep {
        let mut rng = rng_for(seed, 77);
        r.conjugate(&random_invertible(&mut rng, r.space_dim()))
            .unwrap()
    }

    #[test]
    fn spin_reps_are_valid_and_irreducible() {
        let tol = ToleranceConfig::default();
        for two_j in 0..5 {
            let r = spin(two_j);
            assert!(check_rep(&r, &tol).ok);
            let cert = is_irreducible(&r, &tol).unwrap();
            assert!(cert.irreducible, "spin {two_j}: {cert:?}");
            assert_eq!(commutant(&r, &tol).dim(), 1);
        }
    }

    #[test]
    fn zero_rep_passes_and_perturbation_fails() {
        let tol = ToleranceConfig::default();
        assert!(check_rep(&AlloyRep::zero(sl2(), 3), &tol).ok);
        let mut mats = spin(2).mats().to_vec();
        mats[1][(0, 1)] += real(1e-3);
        let bad = AlloyRep::new(sl2(), mats, 3).unwrap();
        let rep = check_rep(&bad, &tol);
        assert!(!rep.ok);
        assert!(rep.worst_residual > 1e-4 && rep.worst_residual < 1e-2);
        assert!(is_irreducible(&bad, &tol).is_err());
    }

    #[test]
    fn direct_sum_examples() {
        let tol = ToleranceConfig::default();
        let s = direct_sum(&spin(1), &spin(2)).unwrap();
        assert_eq!(s.space_dim(), 5);
        assert!(check_rep(&s, &tol).ok);
        assert!(!is_irreducible(&s, &tol).unwrap().irreducible);
        let tt = direct_sum(&spin(2), &spin(2)).unwrap();
        assert_eq!(commutant(&tt, &tol).dim(), 4);
        let other = AlloyRep::zero(Alloy::from_algebra(&AntiAlgebra::abelian(3)), 2);
        assert!(matches!(
            direct_sum(&spin(1), &other),
            Err(Error::AlloyMismatch)
        ));
    }

    #[test]
    fn tensor_examples() {
        let tol = ToleranceConfig::default();
        let t = tensor_product(&spin(1), &spin(2)).unwrap();
        assert_eq!(t.space_dim(), 6);
        assert!(check_rep(&t, &tol).ok);
        let trivial = AlloyRep::zero(sl2(), 1);
        let tt = tensor_product(&trivial, &spin(2)).unwrap();
        assert!(are_isomorphic(&tt, &spin(2), 1, &tol).unwrap().isomorphic);
        let half = tensor_product(&spin(1), &spin(1)).unwrap();
        assert_eq!(
            decompose(&half, 3, &tol).unwrap().dim_multiset(),
            vec![3, 1]
        );
    }

    #[test]
    fn generated_algebra_examples() {
        let tol = ToleranceConfig::default();
        let diag = CMatrix::from_diagonal(&CVector::from_vec(vec![real(1.0), real(2.0)]));
        assert_eq!(generated_algebra(2, &[diag], &tol).dim(), 2);
        let s = spin(1);
        assert_eq!(generated_algebra(2, &s.mats()[1..], &tol).dim(), 4);
        assert_eq!(generated_algebra(3, &[], &tol).dim(), 1);
    }

    #[test]
    fn one_dimensional_reps_are_irreducible() {
        let tol = ToleranceConfig::default();
        let r = AlloyRep::new(sl2(), vec![CMatrix::from_element(1, 1, real(0.0)); 3], 1).unwrap();
        assert!(is_irreducible(&r, &tol).unwrap().irreducible);
        let av = lie_closure(&r, &tol).unwrap();
        assert!(av.dim() <= 1);
    }

    #[test]
    fn commutant_of_zero_rep_is_everything() {
        let tol = ToleranceConfig::default();
        assert_eq!(commutant(&AlloyRep::zero(sl2(), 3), &tol).dim(), 9);
    }

    #[test]
    fn decompose_direct_sum_recovers_summands() {
        let tol = ToleranceConfig::default();
        let s = scrambled(&direct_sum(&spin(1), &spin(2)).unwrap(), 5);
        let dec = decompose(&s, 9, &tol).unwrap();
        assert_eq!(dec.dim_multiset(), vec![3, 2]);
        assert!(dec.reassembly_residual < 1e-8);
        for c in &dec.components {
            let target = if c.space_dim() == 2 { spin(1) } else { spin(2) };
            assert!(are_isomorphic(c, &target, 2, &tol).unwrap().isomorphic);
        }
        let irr = decompose(&spin(3), 1, &tol).unwrap();
        assert_eq!(irr.components.len(), 1);
        assert_eq!(irr.basis, CMatrix::identity(4, 4));
    }

    #[test]
    fn decompose_isotypic_sum() {
        let tol = ToleranceConfig::default();
        let s = scrambled(&direct_sum(&spin(2), &spin(2)).unwrap(), 6);
        let dec = decompose(&s, 4, &tol).unwrap();
        assert_eq!(dec.dim_multiset(), vec![3, 3]);
        assert!(dec.reassembly_residual < 1e-8);
    }

    #[test]
    fn intertwiner_examples() {
        let tol = ToleranceConfig::default();
        let r = spin(2);
        assert_eq!(intertwiner_space(&r, &r, &tol).unwrap().dim(), 1);
        assert_eq!(intertwiner_space(&spin(1), &r, &tol).unwrap().dim(), 0);
        let mut rng = rng_for(8, 0);
        let s0 = random_invertible(&mut rng, 3);
        let conj = r.conjugate(&s0).unwrap();
        let space = intertwiner_space(&r, &conj, &tol).unwrap();
        assert!(
            crate::numkernel::span_contains(&space, &vectorize(&s0), &tol)
                .unwrap()
                .contained
        );
    }

    #[test]
    fn isomorphism_examples() {
        let tol = ToleranceConfig::default();
        let r = spin(3);
        assert!(
            are_isomorphic(&r, &scrambled(&r, 1), 0, &tol)
                .unwrap()
                .isomorphic
        );
        assert!(!are_isomorphic(&r, &spin(2), 0, &tol).unwrap().isomorphic);
    }

    #[test]
    fn lie_closure_of_spin_is_sl2() {
        let tol = ToleranceConfig::default();
        for two_j in 1..4 {
            let av = lie_closure(&spin(two_j), &tol).unwrap();
            assert_eq!(av.dim(), 3);
            assert!(av.closure_defect() < 1e-10);
        }
    }

    #[test]
    fn def_equivalence() {
        let tol = ToleranceConfig::default();
        let r = spin(2);
        let a = lie_closure(&r, &tol).unwrap();
        // same restriction through a larger envelope: add a central element
        let mut b = a.clone();
        b.basis.push(CMatrix::identity(3, 3) / real(3f64.sqrt()));
        for c in &mut b.embed {
            *c = c.clone().insert_row(c.len(), real(0.0));
        }
        assert!(def_equivalent(&a, &b, &tol));
        let shifted = lie_closure(&traceless_shift(&r), &tol).unwrap();
        // spin matrices are already traceless
        assert!(def_equivalent(&a, &shifted, &tol));
        let other = lie_closure(&scrambled(&r, 3), &tol).unwrap();
        assert!(!def_equivalent(&a, &other, &tol));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn isomorphism_is_symmetric_and_conjugation_invariant(seed in any::<u64>(), a in 0usize..4, b in 0usize..4) {
            let tol = ToleranceConfig::default();
            let (r1, r2) = (spin(a), spin(b));
            let fwd = are_isomorphic(&r1, &r2, seed, &tol).unwrap().isomorphic;
            let back = are_isomorphic(&r2, &r1, seed, &tol).unwrap().isomorphic;
            prop_assert_eq!(fwd, back);
            prop_assert_eq!(fwd, a == b);
            let c1 = scrambled(&r1, seed);
            let c2 = scrambled(&r2, seed ^ 1);
            prop_assert_eq!(are_isomorphic(&c1, &c2, seed, &tol).unwrap().isomorphic, fwd);
            prop_assert!(are_isomorphic(&c1, &c1, seed, &tol).unwrap().isomorphic);
        }

        #[test]
        fn burnside_agrees_with_schur(seed in any::<u64>(), a in 0usize..3, b in 0usize..3) {
            let tol = ToleranceConfig::default();
            let mut rng = rng_for(seed, 5);
            let pick = |k: usize| if k == 0 { spin(1) } else { spin(k + 1) };
            let r = if rand::Rng::gen_bool(&mut rng, 0.5) { pick(a) } else { direct_sum(&pick(a), &pick(b)).unwrap() };
            let r = scrambled(&r, seed);
            let irr = is_irreducible(&r, &tol).unwrap().irreducible;
            prop_assert_eq!(irr, commutant(&r, &tol).dim() == 1);
        }

        #[test]
        fn tensor_of_valid_reps_is_valid(seed in any::<u64>(), a in 0usize..4, b in 0usize..4) {
            let tol = ToleranceConfig::default();
            let t = tensor_product(&scrambled(&spin(a), seed), &scrambled(&spin(b), seed + 1)).unwrap();
            prop_assert!(check_rep(&t, &tol).ok);
        }

        #[test]
        fn decompose_round_trips(seed in any::<u64>(), a in 0usize..3, b in 0usize..3) {
            let tol = ToleranceConfig::default();
            let r = scrambled(&direct_sum(&spin(a), &spin(b + 1)).unwrap(), seed);
            let dec = decompose(&r, seed, &tol).unwrap();
            prop_assert!(dec.reassembly_residual < 1e-8);
            prop_assert_eq!(dec.dims().iter().sum::<usize>(), r.space_dim());
        }
    }
}
