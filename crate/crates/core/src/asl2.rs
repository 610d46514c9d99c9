//! The four-dimensional alloy asl(2) and its e0-diagonal representations.
//!
//! Basis `(e0, f+, f-, e1)` with parts `{e0, f+, f-}` and `{e1}`. A
//! representation is fixed by a scalar `γ`, block sizes `n_0..n_N` and blocks
//! `A_i` (`n_{i-1} x n_i`) above and `B_i` (`n_i x n_{i-1}`) below the
//! diagonal; `e0` acts on block `i` by `γ - i` and `e1 = [f+, f-] - 2 e0`.

use rand::Rng;
use serde::Serialize;
use serde_json::Value;

use crate::algebra::AntiAlgebra;
use crate::alloy::Alloy;
use crate::error::{mismatch, Error, Result};
use crate::io::JsonFormat;
use crate::numkernel::{eigen_split, real, CMatrix, CVector, EigenCluster, ToleranceConfig, C64};
use crate::random::{rng_for, unit_square_matrix, GENERATOR};
use crate::rep::{
    are_isomorphic, check_rep, generated_algebra, is_irreducible, AlloyRep,
    IrreducibilityCertificate,
};

pub const E0: usize = 0;
pub const F_PLUS: usize = 1;
pub const F_MINUS: usize = 2;
pub const E1: usize = 3;

pub fn asl2_alloy() -> Alloy {
    let sl2 = AntiAlgebra::sl2();
    let mut table = CMatrix::zeros(4, 3);
    table.view_mut((0, 0), (3, 3)).copy_from(sl2.table());
    // [f+, f-] = 2 e0 + e1
    table[(E1, 2)] = real(1.0);
    let names = ["e0", "f+", "f-", "e1"].map(String::from).to_vec();
    Alloy::new(
        names,
        vec![vec![E0, F_PLUS, F_MINUS], vec![E1]],
        vec![table, CMatrix::zeros(4, 0)],
    )
    .expect("asl(2) table is well formed")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Asl2Params {
    pub gamma: C64,
    pub dims: Vec<usize>,
    /// `a[i - 1]` is `A_i`.
    pub a: Vec<CMatrix>,
    /// `b[i - 1]` is `B_i`.
    pub b: Vec<CMatrix>,
}

impl Asl2Params {
    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::InvalidParams(
                "block sizes must be positive and nonempty".into(),
            ));
        }
        let n = self.top();
        if self.a.len() != n || self.b.len() != n {
            return Err(mismatch(format!(
                "{} A and {} B blocks for N = {n}",
                self.a.len(),
                self.b.len()
            )));
        }
        for i in 1..=n {
            let (lo, hi) = (self.dims[i - 1], self.dims[i]);
            if self.a[i - 1].shape() != (lo, hi) {
                return Err(mismatch(format!(
                    "A_{i} has shape {:?}, expected {:?}",
                    self.a[i - 1].shape(),
                    (lo, hi)
                )));
            }
            if self.b[i - 1].shape() != (hi, lo) {
                return Err(mismatch(format!(
                    "B_{i} has shape {:?}, expected {:?}",
                    self.b[i - 1].shape(),
                    (hi, lo)
                )));
            }
        }
        Ok(())
    }

    /// `N`, the index of the last block.
    pub fn top(&self) -> usize {
        self.dims.len().saturating_sub(1)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    fn offsets(&self) -> Vec<usize> {
        let mut off = vec![0];
        for &d in &self.dims {
            off.push(off.last().unwrap() + d);
        }
        off
    }

    /// `B_i A_i` (size `n_i`), zero at `i = 0`.
    fn b_a(&self, i: usize) -> CMatrix {
        if i == 0 {
            CMatrix::zeros(self.dims[0], self.dims[0])
        } else {
            &self.b[i - 1] * &self.a[i - 1]
        }
    }

    /// `A_{i+1} B_{i+1}` as an `n_i x n_i` block (zero at `i = N`).
    fn up_down(&self, i: usize) -> CMatrix {
        if i < self.top() {
            &self.a[i] * &self.b[i]
        } else {
            CMatrix::zeros(self.dims[i], self.dims[i])
        }
    }

    /// Block `i` of `e1`: `A_{i+1}B_{i+1} - B_i A_i - 2(γ - i)`.
    pub fn e1_block(&self, i: usize) -> CMatrix {
        let n = self.dims[i];
        self.up_down(i)
            - self.b_a(i)
            - CMatrix::identity(n, n) * ((self.gamma - real(i as f64)) * real(2.0))
    }
}

/// Random blocks with entries uniform on the complex unit square.
pub fn random_params<R: Rng + ?Sized>(rng: &mut R, dims: &[usize], gamma: C64) -> Asl2Params {
    let n = dims.len().saturating_sub(1);
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for i in 1..=n {
        a.push(unit_square_matrix(rng, dims[i - 1], dims[i]));
        b.push(unit_square_matrix(rng, dims[i], dims[i - 1]));
    }
    Asl2Params {
        gamma,
        dims: dims.to_vec(),
        a,
        b,
    }
}

pub fn build_rep(p: &Asl2Params) -> Result<AlloyRep> {
    p.validate()?;
    let d = p.total_dim();
    let off = p.offsets();
    let mut e0 = CMatrix::zeros(d, d);
    let mut fp = CMatrix::zeros(d, d);
    let mut fm = CMatrix::zeros(d, d);
    for (i, &n) in p.dims.iter().enumerate() {
        for k in 0..n {
            e0[(off[i] + k, off[i] + k)] = p.gamma - real(i as f64);
        }
        if i >= 1 {
            let lo = p.dims[i - 1];
            fp.view_mut((off[i - 1], off[i]), (lo, n))
                .copy_from(&p.a[i - 1]);
            fm.view_mut((off[i], off[i - 1]), (n, lo))
                .copy_from(&p.b[i - 1]);
        }
    }
    let e1 = &fp * &fm - &fm * &fp - &e0 * real(2.0);
    AlloyRep::new(asl2_alloy(), vec![e0, fp, fm, e1], d)
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockConditionReport {
    /// `n_0 = n_N = 1`.
    pub boundary_ok: bool,
    /// `n_i <= n_{i-1} + n_{i+1}` for every interior `i`.
    pub inequality_ok: bool,
    /// Whether `A_{i+1}B_{i+1}` and `B_i A_i` generate `Mat_{n_i}`, per block.
    pub generation_ok: Vec<bool>,
    pub generation_dims: Vec<usize>,
}

impl BlockConditionReport {
    pub fn all_ok(&self) -> bool {
        self.boundary_ok && self.inequality_ok && self.generation_ok.iter().all(|&g| g)
    }
}

fn dims_admissible(dims: &[usize]) -> (bool, bool) {
    let boundary = !dims.is_empty() && dims[0] == 1 && dims[dims.len() - 1] == 1;
    let inequality =
        (1..dims.len().saturating_sub(1)).all(|i| dims[i] <= dims[i - 1] + dims[i + 1]);
    (boundary, inequality)
}

/// Block sizes satisfying the boundary and interior conditions.
pub fn is_admissible(dims: &[usize]) -> bool {
    let (b, i) = dims_admissible(dims);
    b && i && !dims.contains(&0)
}

pub fn check_block_conditions(
    p: &Asl2Params,
    tol: &ToleranceConfig,
) -> Result<BlockConditionReport> {
    p.validate()?;
    let (boundary_ok, inequality_ok) = dims_admissible(&p.dims);
    let mut generation_ok = Vec::with_capacity(p.dims.len());
    let mut generation_dims = Vec::with_capacity(p.dims.len());
    for (i, &n) in p.dims.iter().enumerate() {
        let dim = generated_algebra(n, &[p.up_down(i), p.b_a(i)], tol).dim();
        generation_ok.push(dim == n * n);
        generation_dims.push(dim);
    }
    Ok(BlockConditionReport {
        boundary_ok,
        inequality_ok,
        generation_ok,
        generation_dims,
    })
}

/// Admissible block-size vectors of the given total, in lexicographic order.
pub fn enumerate_dim_vectors(total: usize) -> Vec<Vec<usize>> {
    fn grow(prefix: &mut Vec<usize>, left: usize, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            if is_admissible(prefix) {
                out.push(prefix.clone());
            }
            return;
        }
        for next in 1..=left {
            // prune on the interior inequality for the entry now fully bounded
            let k = prefix.len();
            if k >= 2 && prefix[k - 1] > prefix[k - 2] + next {
                continue;
            }
            prefix.push(next);
            grow(prefix, left - next, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if total >= 1 {
        grow(&mut vec![1], total - 1, &mut out);
    }
    out
}

#[derive(Debug, Clone)]
pub struct Sample {
    pub params: Asl2Params,
    pub rep: AlloyRep,
    pub certificate: IrreducibilityCertificate,
    pub conditions: BlockConditionReport,
    pub check_residual: f64,
    pub stream: u64,
}

/// `trials` random representations with the given block sizes. Trial `k`
/// draws from stream `first_stream + k` under `seed`.
pub fn sample_irreps(
    dims: &[usize],
    gamma: C64,
    trials: usize,
    seed: u64,
    first_stream: u64,
    tol: &ToleranceConfig,
) -> Result<Vec<Sample>> {
    (0..trials as u64)
        .map(|k| {
            let stream = first_stream + k;
            let params = random_params(&mut rng_for(seed, stream), dims, gamma);
            let rep = build_rep(&params)?;
            let check_residual = check_rep(&rep, tol).worst_residual;
            let certificate = is_irreducible(&rep, tol)?;
            let conditions = check_block_conditions(&params, tol)?;
            Ok(Sample {
                params,
                rep,
                certificate,
                conditions,
                check_residual,
                stream,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassRow {
    pub dims: Vec<usize>,
    pub samples: usize,
    pub irreducible: usize,
    pub conditions_ok: usize,
    /// Irreducible samples failing a condition.
    pub necessity_violations: usize,
    /// Samples where "all conditions hold" and "irreducible" agree.
    pub agreement: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub stream: u64,
    pub conditions: BlockConditionReport,
    pub params: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub total_dims: Vec<usize>,
    pub gamma: [f64; 2],
    pub seed: u64,
    pub generator: &'static str,
    pub rows: Vec<ClassRow>,
    pub samples: usize,
    pub irreducible: usize,
    /// Fraction of irreducible samples satisfying every condition.
    pub necessity_rate: f64,
    /// Fraction of samples where the conditions and irreducibility agree.
    pub sufficiency_agreement: f64,
    pub worst_check_residual: f64,
    pub counterexamples: Vec<Counterexample>,
}

/// Samples every admissible block-size vector of each total in `totals` and
/// cross-checks the block conditions against the Burnside verdict.
pub fn classify(
    totals: &[usize],
    trials_per_vector: usize,
    gamma: C64,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<ClassificationReport> {
    let mut rows = Vec::new();
    let mut counterexamples = Vec::new();
    let mut worst: f64 = 0.0;
    let mut stream = 0u64;
    for &total in totals {
        for dims in enumerate_dim_vectors(total) {
            let samples = sample_irreps(&dims, gamma, trials_per_vector, seed, stream, tol)?;
            stream += trials_per_vector as u64;
            let mut row = ClassRow {
                dims: dims.clone(),
                samples: samples.len(),
                irreducible: 0,
                conditions_ok: 0,
                necessity_violations: 0,
                agreement: 0,
            };
            for s in &samples {
                let irr = s.certificate.irreducible;
                let ok = s.conditions.all_ok();
                worst = worst.max(s.check_residual);
                row.irreducible += irr as usize;
                row.conditions_ok += ok as usize;
                row.agreement += (irr == ok) as usize;
                if irr && !ok {
                    row.necessity_violations += 1;
                    counterexamples.push(Counterexample {
                        stream: s.stream,
                        conditions: s.conditions.clone(),
                        params: s.params.to_json_value(),
                    });
                }
            }
            rows.push(row);
        }
    }
    let samples: usize = rows.iter().map(|r| r.samples).sum();
    let irreducible: usize = rows.iter().map(|r| r.irreducible).sum();
    let violations: usize = rows.iter().map(|r| r.necessity_violations).sum();
    let agreement: usize = rows.iter().map(|r| r.agreement).sum();
    let rate = |num: usize, den: usize| {
        if den == 0 {
            1.0
        } else {
            num as f64 / den as f64
        }
    };
    Ok(ClassificationReport {
        total_dims: totals.to_vec(),
        gamma: [gamma.re, gamma.im],
        seed,
        generator: GENERATOR,
        rows,
        samples,
        irreducible,
        necessity_rate: rate(irreducible - violations, irreducible),
        sufficiency_agreement: rate(agreement, samples),
        worst_check_residual: worst,
        counterexamples,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ModuliReport {
    pub dims: Vec<usize>,
    pub gamma: [f64; 2],
    pub t_values: Vec<f64>,
    pub seed: u64,
    /// `isomorphic[a][b]` for the members at `t_values[a]` and `t_values[b]`.
    pub isomorphic: Vec<Vec<bool>>,
    pub intertwiner_dims: Vec<Vec<usize>>,
}

/// The family member at `t`: random blocks from `seed` with `A_1[0, 0] = t`.
pub fn moduli_member(dims: &[usize], gamma: C64, t: f64, seed: u64) -> Result<Asl2Params> {
    if dims.len() < 2 {
        return Err(Error::InvalidParams(
            "a moduli family needs at least two blocks".into(),
        ));
    }
    let mut p = random_params(&mut rng_for(seed, 0x6d0d), dims, gamma);
    p.a[0][(0, 0)] = real(t);
    Ok(p)
}

pub fn moduli_family(
    dims: &[usize],
    gamma: C64,
    t_values: &[f64],
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<ModuliReport> {
    let reps = t_values
        .iter()
        .map(|&t| build_rep(&moduli_member(dims, gamma, t, seed)?))
        .collect::<Result<Vec<_>>>()?;
    let k = reps.len();
    let mut isomorphic = vec![vec![false; k]; k];
    let mut intertwiner_dims = vec![vec![0; k]; k];
    for a in 0..k {
        for b in 0..k {
            let v = are_isomorphic(&reps[a], &reps[b], seed, tol)?;
            isomorphic[a][b] = v.isomorphic;
            intertwiner_dims[a][b] = v.intertwiner_dim;
        }
    }
    Ok(ModuliReport {
        dims: dims.to_vec(),
        gamma: [gamma.re, gamma.im],
        t_values: t_values.to_vec(),
        seed,
        isomorphic,
        intertwiner_dims,
    })
}

/// The classical `(N+1)`-dimensional sl(2) module, on which `e1` acts by 0.
pub fn spin_rep(n: usize) -> Asl2Params {
    let one = |x: f64| CMatrix::from_element(1, 1, real(x));
    Asl2Params {
        gamma: real(n as f64 / 2.0),
        dims: vec![1; n + 1],
        a: (1..=n).map(|_| one(1.0)).collect(),
        b: (1..=n).map(|i| one((i * (n - i + 1)) as f64)).collect(),
    }
}

/// Eigenvalue clusters of the image of `e0`.
pub fn e0_spectrum(r: &AlloyRep, tol: &ToleranceConfig) -> Result<Vec<EigenCluster>> {
    if r.alloy() != &asl2_alloy() {
        return Err(Error::AlloyMismatch);
    }
    eigen_split(&r.mats()[E0], tol)
}

/// `(γ - i, n_i)` pairs expected for the `e0` spectrum.
pub fn expected_e0_spectrum(p: &Asl2Params) -> Vec<(C64, usize)> {
    p.dims
        .iter()
        .enumerate()
        .map(|(i, &n)| (p.gamma - real(i as f64), n))
        .collect()
}

/// The diagonal change of basis scaling block `i` by `s^i`; it conjugates the
/// parameters `(A, B)` to `(A/s, s B)`.
pub fn block_scaling(p: &Asl2Params, s: C64) -> CMatrix {
    let mut diag = Vec::with_capacity(p.total_dim());
    for (i, &n) in p.dims.iter().enumerate() {
        diag.extend(std::iter::repeat_n(s.powi(i as i32), n));
    }
    CMatrix::from_diagonal(&CVector::from_vec(diag))
}
