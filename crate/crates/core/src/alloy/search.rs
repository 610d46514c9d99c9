//! Numerical search for a mutual factorization of two quaternary algebras.
//!
//! The first identity `q1 = λ2(λ1 ∧ λ1)` is linear in `λ2` once `λ1` is
//! fixed, and the second `q2 = λ1(λ2 ∧ λ2)` is linear in `λ1` once `λ2` is
//! fixed. Each sweep solves those two least-squares problems in turn and then
//! takes one Levenberg-Marquardt step on both factors jointly; the half-steps
//! alone ignore how each factor also enters the other identity and stall far
//! from a solution.
//!
//! Every move is accepted only if the combined residual
//! `sqrt(|q1 - λ2(λ1∧λ1)|² + |q2 - λ1(λ2∧λ2)|²)` does not grow (step halving
//! for the half-steps, damping increase for the joint step), so each
//! restart's residual trace is non-increasing.

use serde::Serialize;

use crate::algebra::{pair_count, wedge_compose, QuaternaryAlgebra};
use crate::alloy::AlloyFactorization;
use crate::error::Result;
use crate::numkernel::{least_squares, real, CMatrix, CVector, ToleranceConfig, ONE};
use crate::random::{random_matrix, rng_for};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchBudget {
    pub restarts: usize,
    pub iters: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            restarts: 50,
            iters: 500,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub best: AlloyFactorization,
    pub best_residual: f64,
    pub best_restart: usize,
    /// Residual after initialization and after every sweep, per restart.
    pub traces: Vec<Vec<f64>>,
}

/// Halvings tried per half-step before keeping the previous iterate.
const MAX_HALVINGS: usize = 30;

/// Damping increases tried per joint step before keeping the iterate.
const LM_RETRIES: usize = 12;

/// Sweeps stop early once the residual falls below this multiple of the
/// data scale.
const CONVERGED: f64 = 1e-14;

struct Problem<'a> {
    q1: &'a CMatrix,
    q2: &'a CMatrix,
    n: usize,
    m: usize,
}

impl Problem<'_> {
    fn residual(&self, lam1: &CMatrix, lam2: &CMatrix) -> f64 {
        let r1 = self.q1 - wedge_compose(lam2, self.m, lam1, lam1);
        let r2 = self.q2 - wedge_compose(lam1, self.n, lam2, lam2);
        (r1.norm_squared() + r2.norm_squared()).sqrt()
    }

    /// Least-squares `λ2` for `q1 = λ2 W(λ1)`.
    fn solve_lam2(&self, lam1: &CMatrix, tol: &ToleranceConfig) -> Result<CMatrix> {
        let k = pair_count(self.m);
        let w = wedge_compose(&CMatrix::identity(k, k), self.m, lam1, lam1);
        Ok(least_squares(&w.transpose(), &self.q1.transpose(), tol)?.transpose())
    }

    fn residual_vector(&self, lam1: &CMatrix, lam2: &CMatrix) -> CVector {
        let r1 = wedge_compose(lam2, self.m, lam1, lam1) - self.q1;
        let r2 = wedge_compose(lam1, self.n, lam2, lam2) - self.q2;
        CVector::from_iterator(r1.len() + r2.len(), r1.iter().chain(r2.iter()).cloned())
    }

    /// Jacobian of [`Self::residual_vector`] with respect to the entries of
    /// `λ1` then `λ2` (column-major). The residual is holomorphic, so the
    /// complex Jacobian drives Gauss-Newton directly.
    fn jacobian(&self, lam1: &CMatrix, lam2: &CMatrix) -> CMatrix {
        let (k1, k2) = (lam1.len(), lam2.len());
        let rows = self.q1.len() + self.q2.len();
        let mut jac = CMatrix::zeros(rows, k1 + k2);
        let mut put = |col: usize, d1: CMatrix, d2: CMatrix| {
            for (r, v) in d1.iter().chain(d2.iter()).enumerate() {
                jac[(r, col)] = *v;
            }
        };
        for idx in 0..k1 {
            let mut e = CMatrix::zeros(lam1.nrows(), lam1.ncols());
            e[idx] = ONE;
            let d1 = wedge_compose(lam2, self.m, lam1, &e) + wedge_compose(lam2, self.m, &e, lam1);
            let d2 = wedge_compose(&e, self.n, lam2, lam2);
            put(idx, d1, d2);
        }
        for idx in 0..k2 {
            let mut e = CMatrix::zeros(lam2.nrows(), lam2.ncols());
            e[idx] = ONE;
            let d1 = wedge_compose(&e, self.m, lam1, lam1);
            let d2 = wedge_compose(lam1, self.n, lam2, &e) + wedge_compose(lam1, self.n, &e, lam2);
            put(k1 + idx, d1, d2);
        }
        jac
    }

    /// Least-squares `λ1` for `q2 = λ1 W(λ2)`.
    fn solve_lam1(&self, lam2: &CMatrix, tol: &ToleranceConfig) -> Result<CMatrix> {
        let k = pair_count(self.n);
        let w = wedge_compose(&CMatrix::identity(k, k), self.n, lam2, lam2);
        Ok(least_squares(&w.transpose(), &self.q2.transpose(), tol)?.transpose())
    }
}

/// Moves `current` towards `target` by the largest step in `1, 1/2, 1/4, ...`
/// that does not increase the residual; returns the accepted residual.
fn damped_update(
    current: &mut CMatrix,
    target: &CMatrix,
    before: f64,
    eval: impl Fn(&CMatrix) -> f64,
) -> f64 {
    let direction = target - &*current;
    let mut step = 1.0;
    for _ in 0..MAX_HALVINGS {
        let trial = &*current + &direction * real(step);
        let r = eval(&trial);
        if r <= before {
            *current = trial;
            return r;
        }
        step *= 0.5;
    }
    before
}

/// One Levenberg-Marquardt step on both factors jointly. `damping` adapts
/// across calls; the step is only taken when it lowers the residual.
fn joint_step(
    problem: &Problem<'_>,
    lam1: &mut CMatrix,
    lam2: &mut CMatrix,
    before: f64,
    damping: &mut f64,
) -> f64 {
    let jac = problem.jacobian(lam1, lam2);
    let r = problem.residual_vector(lam1, lam2);
    let jh = jac.adjoint();
    let normal = &jh * &jac;
    let grad = &jh * &r;
    let k1 = lam1.len();
    let diag_max = (0..normal.nrows())
        .map(|i| normal[(i, i)].re)
        .fold(0.0, f64::max);
    if *damping <= 0.0 {
        *damping = 1e-3 * diag_max.max(1e-12);
    }
    for _ in 0..LM_RETRIES {
        let mut a = normal.clone();
        for i in 0..a.nrows() {
            a[(i, i)] += real(*damping);
        }
        let Some(chol) = a.cholesky() else {
            *damping *= 4.0;
            continue;
        };
        let delta = chol.solve(&grad);
        let t1 = &*lam1
            - CMatrix::from_column_slice(lam1.nrows(), lam1.ncols(), &delta.as_slice()[..k1]);
        let t2 = &*lam2
            - CMatrix::from_column_slice(lam2.nrows(), lam2.ncols(), &delta.as_slice()[k1..]);
        let after = problem.residual(&t1, &t2);
        if after <= before {
            *lam1 = t1;
            *lam2 = t2;
            *damping = (*damping / 3.0).max(1e-15 * diag_max.max(1.0));
            return after;
        }
        *damping *= 4.0;
    }
    before
}

/// Alternating least squares with seeded restarts. The best factorization
/// over all restarts is returned; ties go to the lowest restart index.
/// Restarts stop once one of them converges.
pub fn alloyability_search(
    q1: &QuaternaryAlgebra,
    q2: &QuaternaryAlgebra,
    budget: SearchBudget,
    tol: &ToleranceConfig,
) -> Result<SearchOutcome> {
    let (n, m) = (q1.dim(), q2.dim());
    let problem = Problem {
        q1: q1.matrix(),
        q2: q2.matrix(),
        n,
        m,
    };
    let scale = (problem.q1.norm_squared() + problem.q2.norm_squared())
        .sqrt()
        .max(1.0);

    let mut best: Option<(f64, usize, CMatrix, CMatrix)> = None;
    let mut traces = Vec::with_capacity(budget.restarts.max(1));
    for restart in 0..budget.restarts.max(1) {
        let mut rng = rng_for(budget.seed, restart as u64);
        let mut lam1 = random_matrix(&mut rng, m, pair_count(n));
        let mut lam2 = random_matrix(&mut rng, n, pair_count(m));
        let mut res = problem.residual(&lam1, &lam2);
        let mut trace = vec![res];
        let mut damping = 0.0;
        for _ in 0..budget.iters {
            if res <= CONVERGED * scale {
                break;
            }
            let target2 = problem.solve_lam2(&lam1, tol)?;
            res = damped_update(&mut lam2, &target2, res, |l2| problem.residual(&lam1, l2));
            let target1 = problem.solve_lam1(&lam2, tol)?;
            res = damped_update(&mut lam1, &target1, res, |l1| problem.residual(l1, &lam2));
            res = joint_step(&problem, &mut lam1, &mut lam2, res, &mut damping);
            trace.push(res);
        }
        if best.as_ref().is_none_or(|b| res < b.0) {
            best = Some((res, restart, lam1, lam2));
        }
        traces.push(trace);
        if res <= CONVERGED * scale {
            break;
        }
    }
    let (best_residual, best_restart, lam1, lam2) = best.expect("at least one restart runs");
    Ok(SearchOutcome {
        best: AlloyFactorization::new(n, m, lam1, lam2)?,
        best_residual,
        best_restart,
        traces,
    })
}

/// A pair of quaternary algebras built from random `λ1`, `λ2` through the
/// factorization identities, so that a factorization is known to exist.
pub fn planted_instance(
    n: usize,
    m: usize,
    seed: u64,
) -> (QuaternaryAlgebra, QuaternaryAlgebra, AlloyFactorization) {
    let mut rng = rng_for(seed, u64::MAX);
    let f = AlloyFactorization::new(
        n,
        m,
        random_matrix(&mut rng, m, pair_count(n)),
        random_matrix(&mut rng, n, pair_count(m)),
    )
    .expect("planted shapes agree");
    let q1 = QuaternaryAlgebra::new(n, f.first_composite()).expect("planted shapes agree");
    let q2 = QuaternaryAlgebra::new(m, f.second_composite()).expect("planted shapes agree");
    (q1, q2, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alloy::{alloyability_check, canonical_partner};

    fn small_budget(seed: u64) -> SearchBudget {
        SearchBudget {
            restarts: 10,
            iters: 200,
            seed,
        }
    }

    #[test]
    fn zero_algebras_factor_through_zero() {
        let tol = ToleranceConfig::default();
        let z = QuaternaryAlgebra::zero(3);
        let out = alloyability_search(&z, &z, small_budget(1), &tol).unwrap();
        assert_eq!(out.best_residual, 0.0);
        assert_eq!(out.traces[0][1], 0.0);
        assert!(out
            .best
            .lam1
            .iter()
            .chain(out.best.lam2.iter())
            .all(|c| c.norm() == 0.0));
    }

    #[test]
    fn traces_never_increase() {
        let tol = ToleranceConfig::default();
        let (q1, q2, _) = planted_instance(3, 3, 4);
        let out = alloyability_search(&q1, &q2, small_budget(4), &tol).unwrap();
        for t in &out.traces {
            assert!(t.windows(2).all(|w| w[1] <= w[0]), "{t:?}");
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let tol = ToleranceConfig::default();
        let (q1, q2, _) = planted_instance(3, 2, 5);
        let a = alloyability_search(&q1, &q2, small_budget(9), &tol).unwrap();
        let b = alloyability_search(&q1, &q2, small_budget(9), &tol).unwrap();
        assert_eq!(a.best, b.best);
        assert_eq!(a.traces, b.traces);
    }

    #[test]
    fn canonical_pair_is_found() {
        let tol = ToleranceConfig::default();
        let (q1, _, _) = planted_instance(3, 3, 6);
        let (q2, _) = canonical_partner(&q1);
        let out = alloyability_search(
            &q1,
            &q2,
            SearchBudget {
                restarts: 50,
                iters: 500,
                seed: 6,
            },
            &tol,
        )
        .unwrap();
        assert!(out.best_residual < 1e-6, "residual {}", out.best_residual);
        let rep = alloyability_check(&q1, &q2, &out.best, &tol).unwrap();
        assert!(rep.worst_residual < 1e-6);
    }

    #[test]
    fn planted_instance_satisfies_its_factorization() {
        let tol = ToleranceConfig::default();
        let (q1, q2, f) = planted_instance(3, 4, 1);
        assert!(
            alloyability_check(&q1, &q2, &f, &tol)
                .unwrap()
                .worst_residual
                == 0.0
        );
    }
}
