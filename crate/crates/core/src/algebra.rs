//! Anticommutative and quaternary algebras stored as structure tensors.
//!
//! A bracket on `C^n` is stored as its linear extension `Λ²(C^n) -> C^n`, an
//! `n x N` matrix whose column `p` is the bracket of the `p`-th basis pair in
//! [`PairBasis`] order. A quaternary operation is likewise stored as the map
//! `Λ²(Λ²(C^n)) -> C^n`, an `n x C(N, 2)` matrix.

use crate::error::{mismatch, Error, Result};
use crate::numkernel::{is_finite, CMatrix, CVector, C64, ZERO};

/// Algebras are kept at desk scale; `Λ²` of a 12-dimensional space already
/// has 66 basis vectors.
pub const MAX_DIM: usize = 12;

pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Lexicographic basis `{(i, j) : i < j}` of `Λ²(C^n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairBasis {
    n: usize,
    pairs: Vec<(usize, usize)>,
}

impl PairBasis {
    pub fn new(n: usize) -> Self {
        let pairs = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect();
        Self { n, pairs }
    }

    pub fn base_dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn pair(&self, p: usize) -> (usize, usize) {
        self.pairs[p]
    }

    /// Index of `e_i ∧ e_j` together with the sign relating it to the stored
    /// pair; `None` on the diagonal.
    pub fn index(&self, i: usize, j: usize) -> Option<(usize, f64)> {
        let (lo, hi, sign) = match i.cmp(&j) {
            std::cmp::Ordering::Less => (i, j, 1.0),
            std::cmp::Ordering::Greater => (j, i, -1.0),
            std::cmp::Ordering::Equal => return None,
        };
        assert!(
            hi < self.n,
            "index ({i}, {j}) out of range for dimension {}",
            self.n
        );
        Some((lo * self.n - lo * (lo + 1) / 2 + (hi - lo - 1), sign))
    }

    /// Coordinates of `x ∧ y`.
    pub fn wedge(&self, x: &CVector, y: &CVector) -> CVector {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        CVector::from_iterator(
            self.pairs.len(),
            self.pairs.iter().map(|&(i, j)| x[i] * y[j] - x[j] * y[i]),
        )
    }
}

/// Finite-dimensional anticommutative algebra (no Jacobi identity assumed).
#[derive(Debug, Clone, PartialEq)]
pub struct AntiAlgebra {
    names: Vec<String>,
    table: CMatrix,
}

impl AntiAlgebra {
    /// `table` is `n x n(n-1)/2`; column `p` is the bracket of basis pair `p`.
    pub fn new(names: Vec<String>, table: CMatrix) -> Result<Self> {
        let n = names.len();
        if n > MAX_DIM {
            return Err(Error::InvalidParams(format!(
                "algebra dimension {n} exceeds {MAX_DIM}"
            )));
        }
        if table.shape() != (n, pair_count(n)) {
            return Err(mismatch(format!(
                "structure table {:?} for dimension {n}",
                table.shape()
            )));
        }
        if !is_finite(&table) {
            return Err(Error::Format("non-finite structure constant".into()));
        }
        Ok(Self { names, table })
    }

    pub fn abelian(n: usize) -> Self {
        Self {
            names: default_names("x", n),
            table: CMatrix::zeros(n, pair_count(n)),
        }
    }

    /// Builds the algebra from brackets of basis pairs; pairs not listed
    /// bracket to zero and `(j, i)` entries are accepted with a sign flip.
    pub fn from_brackets(names: Vec<String>, brackets: &[(usize, usize, CVector)]) -> Result<Self> {
        let n = names.len();
        let basis = PairBasis::new(n);
        let mut table = CMatrix::zeros(n, basis.len());
        for (i, j, out) in brackets {
            if *i >= n || *j >= n {
                return Err(mismatch(format!(
                    "bracket index ({i}, {j}) for dimension {n}"
                )));
            }
            if out.len() != n {
                return Err(mismatch(format!(
                    "bracket output of length {} for dimension {n}",
                    out.len()
                )));
            }
            let (p, sign) = basis
                .index(*i, *j)
                .ok_or_else(|| Error::Format(format!("bracket of x{i} with itself must vanish")))?;
            table.set_column(p, &(out * C64::new(sign, 0.0)));
        }
        Self::new(names, table)
    }

    /// sl(2) in the basis `(e0, f+, f-)`: `[e0, f±] = ±f±`, `[f+, f-] = 2 e0`.
    pub fn sl2() -> Self {
        let v = |a: f64, b: f64, c: f64| {
            CVector::from_vec(vec![C64::new(a, 0.), C64::new(b, 0.), C64::new(c, 0.)])
        };
        Self::from_brackets(
            vec!["e0".into(), "f+".into(), "f-".into()],
            &[
                (0, 1, v(0., 1., 0.)),
                (0, 2, v(0., 0., -1.)),
                (1, 2, v(2., 0., 0.)),
            ],
        )
        .expect("sl(2) table is well formed")
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn table(&self) -> &CMatrix {
        &self.table
    }

    pub fn pair_basis(&self) -> PairBasis {
        PairBasis::new(self.dim())
    }

    /// Bracket of basis vectors `x_i` and `x_j`.
    pub fn bracket_basis(&self, i: usize, j: usize) -> CVector {
        match self.pair_basis().index(i, j) {
            Some((p, sign)) => self.table.column(p) * C64::new(sign, 0.0),
            None => CVector::zeros(self.dim()),
        }
    }

    pub fn bracket_eval(&self, x: &CVector, y: &CVector) -> Result<CVector> {
        let n = self.dim();
        if x.len() != n || y.len() != n {
            return Err(mismatch(format!(
                "bracket arguments of lengths {} and {} in dimension {n}",
                x.len(),
                y.len()
            )));
        }
        Ok(&self.table * self.pair_basis().wedge(x, y))
    }

    pub fn is_abelian(&self) -> bool {
        self.table.iter().all(|z| *z == ZERO)
    }
}

pub(crate) fn default_names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Quaternary operation `Λ²(Λ²(g)) -> g`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuaternaryAlgebra {
    dim: usize,
    op: CMatrix,
}

impl QuaternaryAlgebra {
    pub fn new(dim: usize, op: CMatrix) -> Result<Self> {
        let expected = (dim, pair_count(pair_count(dim)));
        if op.shape() != expected {
            return Err(mismatch(format!(
                "quaternary tensor {:?}, expected {:?} for dimension {dim}",
                op.shape(),
                expected
            )));
        }
        if !is_finite(&op) {
            return Err(Error::Format("non-finite quaternary constant".into()));
        }
        Ok(Self { dim, op })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            op: CMatrix::zeros(dim, pair_count(pair_count(dim))),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The operation as a matrix over the lexicographic basis of
    /// `Λ²(Λ²(g))`.
    pub fn matrix(&self) -> &CMatrix {
        &self.op
    }

    /// Basis of `Λ²(g)`, whose pairs index the arguments.
    pub fn arg_basis(&self) -> PairBasis {
        PairBasis::new(self.dim)
    }

    /// Basis of `Λ²(Λ²(g))`, indexing the stored columns.
    pub fn pair_of_pairs_basis(&self) -> PairBasis {
        PairBasis::new(pair_count(self.dim))
    }

    /// `<a, b, c, d>`.
    pub fn eval(&self, a: &CVector, b: &CVector, c: &CVector, d: &CVector) -> Result<CVector> {
        let n = self.dim;
        if [a, b, c, d].iter().any(|v| v.len() != n) {
            return Err(mismatch(format!("quaternary arguments in dimension {n}")));
        }
        let inner = self.arg_basis();
        let outer = self.pair_of_pairs_basis();
        Ok(&self.op * outer.wedge(&inner.wedge(a, b), &inner.wedge(c, d)))
    }

    pub fn is_zero(&self) -> bool {
        self.op.iter().all(|z| *z == ZERO)
    }
}

/// For maps `left, right: Λ²(C^k) -> C^inner`, returns the matrix over the
/// basis of `Λ²(Λ²(C^k))` whose column `(p, p')` is
/// `outer(left(e_p) ∧ right(e_p'))`.
///
/// The result only describes an antisymmetric operation when it is
/// symmetrized in `left`/`right` (or `left == right`).
pub(crate) fn wedge_compose(
    outer: &CMatrix,
    inner_dim: usize,
    left: &CMatrix,
    right: &CMatrix,
) -> CMatrix {
    let inner = PairBasis::new(inner_dim);
    debug_assert_eq!(outer.ncols(), inner.len());
    debug_assert_eq!(left.nrows(), inner_dim);
    debug_assert_eq!(left.shape(), right.shape());
    let args = PairBasis::new(left.ncols());
    let mut out = CMatrix::zeros(outer.nrows(), args.len());
    for (col, &(p, q)) in args.pairs().iter().enumerate() {
        let w = inner.wedge(&left.column(p).into_owned(), &right.column(q).into_owned());
        out.set_column(col, &(outer * w));
    }
    out
}

/// `Λ²(g)` with `[a∧b, c∧d] = <a,b> ∧ <c,d>`.
pub fn wedge_square_algebra(g: &AntiAlgebra) -> AntiAlgebra {
    let n = g.dim();
    let basis = g.pair_basis();
    let names = basis
        .pairs()
        .iter()
        .map(|&(i, j)| format!("{}^{}", g.names()[i], g.names()[j]))
        .collect();
    let n2 = basis.len();
    let table = wedge_compose(&CMatrix::identity(n2, n2), n, g.table(), g.table());
    AntiAlgebra { names, table }
}

/// `<A, B, C, D> = <<A, B>, <C, D>>`.
pub fn quaternary_from_bracket(g: &AntiAlgebra) -> QuaternaryAlgebra {
    QuaternaryAlgebra {
        dim: g.dim(),
        op: wedge_compose(g.table(), g.dim(), g.table(), g.table()),
    }
}

/// Label `(i, j, k)` of one of the six operations built from two brackets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SixIndex {
    pub i: u8,
    pub j: u8,
    pub k: u8,
}

/// `<A,B,C,D>_{ij}^k = <<A,B>_i, <C,D>_j>_k + <<A,B>_j, <C,D>_i>_k` for
/// `(ij) ∈ {11, 12, 22}`, `k ∈ {1, 2}`, in that order.
pub fn six_quaternary_ops(
    b1: &AntiAlgebra,
    b2: &AntiAlgebra,
) -> Result<Vec<(SixIndex, QuaternaryAlgebra)>> {
    if b1.dim() != b2.dim() {
        return Err(mismatch(format!(
            "brackets on spaces of dimension {} and {}",
            b1.dim(),
            b2.dim()
        )));
    }
    let n = b1.dim();
    let tables = [b1.table(), b2.table()];
    let mut out = Vec::with_capacity(6);
    for (i, j) in [(1u8, 1u8), (1, 2), (2, 2)] {
        for k in [1u8, 2] {
            let (ti, tj, tk) = (
                tables[(i - 1) as usize],
                tables[(j - 1) as usize],
                tables[(k - 1) as usize],
            );
            let op = wedge_compose(tk, n, ti, tj) + wedge_compose(tk, n, tj, ti);
            out.push((SixIndex { i, j, k }, QuaternaryAlgebra { dim: n, op }));
        }
    }
    Ok(out)
}

/// Quaternary structure on `Λ²(g)`:
/// `<u1, u2, u3, u4>' = q(u1 ∧ u2) ∧ q(u3 ∧ u4)`.
pub fn quaternary_wedge_square(q: &QuaternaryAlgebra) -> QuaternaryAlgebra {
    let n2 = pair_count(q.dim());
    QuaternaryAlgebra {
        dim: n2,
        op: wedge_compose(&CMatrix::identity(n2, n2), q.dim(), q.matrix(), q.matrix()),
    }
}

/// The linear map `π: Λ²(Λ²(g)) -> g`, `π((a∧b)∧(c∧d)) = <a, b, c, d>`.
pub fn quaternary_extension_hom(q: &QuaternaryAlgebra) -> CMatrix {
    q.matrix().clone()
}

/// Dimension of the space of `n`-dimensional quaternary algebras,
/// `(n+1) n² (n-1)(n-2) / 8`.
pub fn dim_quaternary_space(n: u64) -> u64 {
    if n < 2 {
        return 0;
    }
    (n + 1) * n * n * (n - 1) * (n - 2) / 8
}

/// Dimension of the graph of the alloyability relation in `Q_n ⊕ Q_m`,
/// `n m (n + m - 2) / 2`.
pub fn dim_alloyability_graph(n: u64, m: u64) -> u64 {
    n * m * (n + m).saturating_sub(2) / 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{max_norm, real, ONE};
    use crate::random::{random_matrix, rng_for};
    use proptest::prelude::*;

    fn e(n: usize, i: usize) -> CVector {
        CVector::from_fn(n, |k, _| if k == i { ONE } else { ZERO })
    }

    fn rvec(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> CVector {
        random_matrix(rng, n, 1).column(0).into_owned()
    }

    fn random_algebra(seed: u64, n: usize) -> AntiAlgebra {
        let mut rng = rng_for(seed, 11);
        AntiAlgebra::new(
            default_names("x", n),
            random_matrix(&mut rng, n, pair_count(n)),
        )
        .unwrap()
    }

    fn random_quaternary(seed: u64, n: usize) -> QuaternaryAlgebra {
        let mut rng = rng_for(seed, 12);
        QuaternaryAlgebra::new(n, random_matrix(&mut rng, n, pair_count(pair_count(n)))).unwrap()
    }

    /// Brute-force `<<a,b>,<c,d>>` straight from basis brackets, without the
    /// wedge machinery.
    fn nested_bracket_oracle(
        g: &AntiAlgebra,
        a: &CVector,
        b: &CVector,
        c: &CVector,
        d: &CVector,
    ) -> CVector {
        let n = g.dim();
        let naive = |x: &CVector, y: &CVector| {
            let mut acc = CVector::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    acc += g.bracket_basis(i, j) * (x[i] * y[j]);
                }
            }
            acc
        };
        naive(&naive(a, b), &naive(c, d))
    }

    #[test]
    fn pair_basis_is_lexicographic() {
        let b = PairBasis::new(4);
        assert_eq!(b.pairs(), &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        for (p, &(i, j)) in b.pairs().iter().enumerate() {
            assert_eq!(b.index(i, j), Some((p, 1.0)));
            assert_eq!(b.index(j, i), Some((p, -1.0)));
        }
        assert_eq!(b.index(2, 2), None);
    }

    #[test]
    fn sl2_brackets() {
        let g = AntiAlgebra::sl2();
        let f_plus = e(3, 1);
        assert_eq!(g.bracket_eval(&e(3, 0), &f_plus).unwrap(), f_plus);
        assert_eq!(g.bracket_eval(&e(3, 0), &e(3, 2)).unwrap(), -e(3, 2));
        assert_eq!(
            g.bracket_eval(&e(3, 1), &e(3, 2)).unwrap(),
            e(3, 0) * real(2.0)
        );
        assert!(g.bracket_eval(&e(2, 0), &e(3, 0)).is_err());
    }

    #[test]
    fn abelian_brackets_vanish() {
        let g = AntiAlgebra::abelian(4);
        let mut rng = rng_for(1, 0);
        let out = g
            .bracket_eval(&rvec(&mut rng, 4), &rvec(&mut rng, 4))
            .unwrap();
        assert_eq!(out, CVector::zeros(4));
        assert!(wedge_square_algebra(&g).is_abelian());
        assert_eq!(wedge_square_algebra(&g).dim(), 6);
        assert!(quaternary_from_bracket(&g).is_zero());
    }

    #[test]
    fn wedge_square_of_sl2_matches_term_expansion() {
        let g = AntiAlgebra::sl2();
        let w = wedge_square_algebra(&g);
        assert_eq!(w.dim(), 3);
        let basis = g.pair_basis();
        // expand <a,b> ∧ <c,d> coordinate by coordinate
        for (u, &(a, b)) in basis.pairs().iter().enumerate() {
            for (v, &(c, d)) in basis.pairs().iter().enumerate() {
                let x = g.bracket_basis(a, b);
                let y = g.bracket_basis(c, d);
                let mut expected = CVector::zeros(3);
                for i in 0..3 {
                    for j in 0..3 {
                        if let Some((p, s)) = basis.index(i, j) {
                            // x_i y_j e_i∧e_j summed over ordered (i,j)
                            expected[p] += x[i] * y[j] * real(s);
                        }
                    }
                }
                assert_eq!(w.bracket_basis(u, v), expected, "pair ({u}, {v})");
            }
        }
    }

    #[test]
    fn sl2_quaternary_hand_value() {
        let q = quaternary_from_bracket(&AntiAlgebra::sl2());
        let out = q.eval(&e(3, 0), &e(3, 1), &e(3, 0), &e(3, 2)).unwrap();
        assert_eq!(out, e(3, 0) * real(-2.0));
    }

    #[test]
    fn six_ops_with_vanishing_second_bracket() {
        let b1 = random_algebra(5, 3);
        let b2 = AntiAlgebra::abelian(3);
        let ops = six_quaternary_ops(&b1, &b2).unwrap();
        let single = quaternary_from_bracket(&b1);
        for (idx, q) in &ops {
            if idx.i == 2 || idx.j == 2 || idx.k == 2 {
                assert!(q.is_zero(), "{idx:?}");
            } else {
                assert!(max_norm(&(q.matrix() - single.matrix() * real(2.0))) < 1e-14);
            }
        }
        assert!(six_quaternary_ops(&b1, &AntiAlgebra::abelian(2)).is_err());
    }

    #[test]
    fn six_ops_equal_brackets_double_the_nested_bracket() {
        let b = random_algebra(6, 4);
        let single = quaternary_from_bracket(&b);
        for (_, q) in six_quaternary_ops(&b, &b).unwrap() {
            assert!(max_norm(&(q.matrix() - single.matrix() * real(2.0))) < 1e-13);
        }
    }

    #[test]
    fn six_ops_expand_to_nested_brackets() {
        let b1 = random_algebra(7, 3);
        let b2 = random_algebra(8, 3);
        let mut rng = rng_for(9, 0);
        let (a, b, c, d) = (
            rvec(&mut rng, 3),
            rvec(&mut rng, 3),
            rvec(&mut rng, 3),
            rvec(&mut rng, 3),
        );
        let algs = [&b1, &b2];
        for (idx, q) in six_quaternary_ops(&b1, &b2).unwrap() {
            let (bi, bj, bk) = (
                algs[idx.i as usize - 1],
                algs[idx.j as usize - 1],
                algs[idx.k as usize - 1],
            );
            let direct = bk
                .bracket_eval(
                    &bi.bracket_eval(&a, &b).unwrap(),
                    &bj.bracket_eval(&c, &d).unwrap(),
                )
                .unwrap()
                + bk.bracket_eval(
                    &bj.bracket_eval(&a, &b).unwrap(),
                    &bi.bracket_eval(&c, &d).unwrap(),
                )
                .unwrap();
            let got = q.eval(&a, &b, &c, &d).unwrap();
            assert!((got - direct).norm() < 1e-12);
            // antisymmetric in each pair and under exchange of the pairs
            let swapped = q.eval(&c, &d, &a, &b).unwrap();
            let flipped = q.eval(&b, &a, &c, &d).unwrap();
            let base = q.eval(&a, &b, &c, &d).unwrap();
            assert!((swapped + &base).norm() < 1e-12);
            assert!((flipped + base).norm() < 1e-12);
        }
    }

    #[test]
    fn quaternary_wedge_square_matches_brute_force() {
        let q = random_quaternary(21, 3);
        let w = quaternary_wedge_square(&q);
        assert_eq!(w.dim(), 3);
        let g = q.arg_basis();
        // evaluate on random elements of Λ²(g) and expand q(u1∧u2) ∧ q(u3∧u4)
        let mut rng = rng_for(22, 0);
        for _ in 0..5 {
            let us: Vec<CVector> = (0..4).map(|_| rvec(&mut rng, 3)).collect();
            let lhs = w.eval(&us[0], &us[1], &us[2], &us[3]).unwrap();
            let pp = q.pair_of_pairs_basis();
            let qa = q.matrix() * pp.wedge(&us[0], &us[1]);
            let qb = q.matrix() * pp.wedge(&us[2], &us[3]);
            let mut rhs = CVector::zeros(3);
            for i in 0..3 {
                for j in 0..3 {
                    if let Some((p, s)) = g.index(i, j) {
                        rhs[p] += qa[i] * qb[j] * real(s);
                    }
                }
            }
            assert!((lhs - rhs).norm() < 1e-12);
        }
        assert!(quaternary_wedge_square(&QuaternaryAlgebra::zero(4)).is_zero());
        assert_eq!(
            quaternary_wedge_square(&QuaternaryAlgebra::zero(4)).dim(),
            6
        );
    }

    #[test]
    fn extension_hom_reproduces_operation() {
        let q = random_quaternary(31, 3);
        let pi = quaternary_extension_hom(&q);
        assert_eq!(pi.shape(), (3, 3));
        let g = q.arg_basis();
        let pp = q.pair_of_pairs_basis();
        // π((e_a∧e_b)∧(e_c∧e_d)) = <e_a, e_b, e_c, e_d> on all basis tuples
        for &(a, b) in g.pairs() {
            for &(c, d) in g.pairs() {
                let (p1, _) = g.index(a, b).unwrap();
                let (p2, _) = g.index(c, d).unwrap();
                let via_pi = match pp.index(p1, p2) {
                    Some((col, s)) => pi.column(col) * real(s),
                    None => CVector::zeros(3),
                };
                let direct = q.eval(&e(3, a), &e(3, b), &e(3, c), &e(3, d)).unwrap();
                assert!((via_pi - direct).norm() < 1e-15);
            }
        }
        let big = quaternary_extension_hom(&QuaternaryAlgebra::zero(4));
        assert_eq!(big.shape(), (4, 15));
        assert!(big.iter().all(|z| *z == ZERO));
    }

    #[test]
    fn dimension_formulas() {
        assert_eq!(dim_quaternary_space(3), 9);
        assert_eq!(dim_quaternary_space(2), 0);
        assert_eq!(dim_quaternary_space(4), 60);
        assert_eq!(dim_alloyability_graph(2, 2), 4);
        assert_eq!(dim_alloyability_graph(1, 1), 0);
        assert_eq!(dim_alloyability_graph(2, 3), 9);
        for n in 1..=8u64 {
            let pairs = n * (n - 1) / 2;
            assert_eq!(
                dim_quaternary_space(n),
                n * (pairs * pairs.saturating_sub(1) / 2)
            );
            for m in 1..=8u64 {
                assert_eq!(
                    dim_alloyability_graph(n, m),
                    m * n * (n - 1) / 2 + n * m * (m - 1) / 2
                );
            }
        }
    }

    #[test]
    fn constructors_reject_bad_shapes() {
        assert!(AntiAlgebra::new(default_names("x", 3), CMatrix::zeros(3, 2)).is_err());
        assert!(QuaternaryAlgebra::new(3, CMatrix::zeros(3, 4)).is_err());
        assert!(
            AntiAlgebra::from_brackets(default_names("x", 2), &[(1, 1, CVector::zeros(2))])
                .is_err()
        );
        let flipped =
            AntiAlgebra::from_brackets(default_names("x", 2), &[(1, 0, e(2, 0))]).unwrap();
        assert_eq!(flipped.bracket_basis(0, 1), -e(2, 0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn bracket_is_antisymmetric(seed in any::<u64>(), n in 1usize..7) {
            let g = random_algebra(seed, n);
            let mut rng = rng_for(seed, 1);
            let x = rvec(&mut rng, n);
            let y = rvec(&mut rng, n);
            let s = g.bracket_eval(&x, &y).unwrap() + g.bracket_eval(&y, &x).unwrap();
            prop_assert!(s.iter().all(|z| *z == ZERO));
            prop_assert!(g.bracket_eval(&x, &x).unwrap().iter().all(|z| *z == ZERO));
        }

        #[test]
        fn quaternary_from_bracket_is_nested_bracket(seed in any::<u64>(), n in 2usize..6) {
            let g = random_algebra(seed, n);
            let q = quaternary_from_bracket(&g);
            let mut rng = rng_for(seed, 2);
            let v: Vec<CVector> = (0..4).map(|_| rvec(&mut rng, n)).collect();
            let got = q.eval(&v[0], &v[1], &v[2], &v[3]).unwrap();
            let via_eval = g.bracket_eval(&g.bracket_eval(&v[0], &v[1]).unwrap(), &g.bracket_eval(&v[2], &v[3]).unwrap()).unwrap();
            let oracle = nested_bracket_oracle(&g, &v[0], &v[1], &v[2], &v[3]);
            let scale = oracle.norm().max(1.0);
            prop_assert!((&got - via_eval).norm() <= 1e-12 * scale);
            prop_assert!((got - oracle).norm() <= 1e-12 * scale * (n * n) as f64);
        }
    }
}
