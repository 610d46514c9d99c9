use std::path::Path;

use alloyrep::algebra::{pair_count, AntiAlgebra, QuaternaryAlgebra};
use alloyrep::alloy::search::{alloyability_search, planted_instance, SearchBudget};
use alloyrep::alloy::{
    alloy_from_cross_projective, alloyability_check, canonical_partner, cross_projective_check,
    Alloy, AlloyFactorization, CrossProjRep,
};
use alloyrep::asl2::{
    build_rep, check_block_conditions, classify as classify_samples, is_admissible, random_params,
    spin_rep,
};
use alloyrep::io::{matrix_value, JsonFormat, FORMAT_VERSION};
use alloyrep::numkernel::max_norm;
use alloyrep::random::{random_matrix, rng_for, GENERATOR};
use alloyrep::rep::{check_rep, decompose, is_irreducible, tensor_product, AlloyRep};
use alloyrep::{ToleranceConfig, C64};
use serde_json::{json, Value};

use crate::report::{CliError, RunReport};
use crate::{AlloyabilityArgs, CheckKind, GenerateKind};

type Run = Result<RunReport, CliError>;

fn parse_complex(s: &str) -> Result<C64, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| {
        t.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| CliError::Usage(format!("not a number: {t:?}")))
    };
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(CliError::Usage(format!(
            "expected RE or RE,IM, found {s:?}"
        ))),
    }
}

fn matrix_file(m: &alloyrep::CMatrix) -> String {
    let v = json!({ "format": FORMAT_VERSION, "kind": "matrix", "rows": matrix_value(m) });
    let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
    s.push('\n');
    s
}

pub fn check(kind: CheckKind, path: &Path, tol: ToleranceConfig) -> Run {
    let mut report = RunReport::new("check", 0, tol);
    match kind {
        CheckKind::Algebra => {
            let g: AntiAlgebra = report.load("algebra", path)?;
            report.results =
                json!({ "kind": "algebra", "dim": g.dim(), "abelian": g.is_abelian() });
        }
        CheckKind::Alloy => {
            let a: Alloy = report.load("alloy", path)?;
            let sizes: Vec<usize> = a.parts().iter().map(Vec::len).collect();
            report.results = json!({ "kind": "alloy", "dim": a.dim(), "part_sizes": sizes, "bracket_pairs": a.w_pairs().len() });
        }
        CheckKind::Rep => {
            let r: AlloyRep = report.load("rep", path)?;
            let c = check_rep(&r, &tol);
            report.residual("check_rep", c.worst_relative);
            let cert = if c.ok {
                Some(is_irreducible(&r, &tol)?)
            } else {
                None
            };
            report.results = json!({
                "kind": "rep",
                "space_dim": r.space_dim(),
                "valid": c.ok,
                "worst_residual": c.worst_residual,
                "irreducibility": cert,
            });
        }
        CheckKind::Cross => {
            let r: CrossProjRep = report.load("cross", path)?;
            let c = cross_projective_check(&r, &tol);
            report.residual("cross_projective", c.worst_relative);
            let alloy = if c.ok {
                match alloy_from_cross_projective(&r, &tol) {
                    Ok((a, _)) => a.to_json_value(),
                    Err(e) => json!({ "error": e.to_string() }),
                }
            } else {
                Value::Null
            };
            report.results = json!({
                "kind": "cross",
                "space_dim": r.space_dim(),
                "cross_projective": c.ok,
                "worst_residual": c.worst_residual,
                "defects": c.defects,
                "alloy": alloy,
            });
        }
    }
    let verdict = if report.ok { "ok" } else { "FAILED" };
    eprintln!("check {}: {verdict}", path.display());
    Ok(report)
}

pub fn build_asl2(
    dims: Option<Vec<usize>>,
    gamma: &str,
    seed: u64,
    spin: Option<usize>,
    output: &Path,
    tol: ToleranceConfig,
) -> Run {
    let params = match (spin, dims) {
        (Some(n), _) => spin_rep(n),
        (None, Some(dims)) => {
            if !is_admissible(&dims) {
                return Err(CliError::Usage(format!(
                    "block sizes {dims:?} need n_0 = n_N = 1 and n_i <= n_(i-1) + n_(i+1)"
                )));
            }
            random_params(&mut rng_for(seed, 0), &dims, parse_complex(gamma)?)
        }
        (None, None) => {
            return Err(CliError::Usage(
                "either --dims or --spin is required".into(),
            ))
        }
    };
    let rep = build_rep(&params)?;
    let mut report = RunReport::new("build-asl2", seed, tol);
    let c = check_rep(&rep, &tol);
    report.residual("check_rep", c.worst_relative);
    let cert = is_irreducible(&rep, &tol)?;
    let conditions = check_block_conditions(&params, &tol)?;
    report.write_json(output, &rep)?;
    report.write_json(&output.with_extension("params.json"), &params)?;
    report.results = json!({
        "dims": params.dims,
        "gamma": [params.gamma.re, params.gamma.im],
        "space_dim": rep.space_dim(),
        "generator": GENERATOR,
        "irreducibility": cert,
        "conditions": conditions,
        "conditions_ok": conditions.all_ok(),
    });
    eprintln!(
        "built {}-dimensional representation, dims {:?}, irreducible: {}",
        rep.space_dim(),
        params.dims,
        cert.irreducible
    );
    Ok(report)
}

pub fn tensor_decompose(a: &Path, b: &Path, seed: u64, output: &Path, tol: ToleranceConfig) -> Run {
    let mut report = RunReport::new("tensor-decompose", seed, tol);
    let ra: AlloyRep = report.load("a", a)?;
    let rb: AlloyRep = report.load("b", b)?;
    for (name, r) in [("a", &ra), ("b", &rb)] {
        let c = check_rep(r, &tol);
        if !c.ok {
            return Err(CliError::Input(format!(
                "{name} is not a representation (residual {:e})",
                c.worst_residual
            )));
        }
    }
    let t = tensor_product(&ra, &rb)?;
    let dec = decompose(&t, seed, &tol)?;
    let scale = t.mats().iter().map(max_norm).fold(1.0, f64::max);
    report.residual("reassembly", dec.reassembly_residual / scale);
    let mut components = Vec::new();
    for (k, c) in dec.components.iter().enumerate() {
        let check = check_rep(c, &tol);
        report.residual(&format!("component_{k}"), check.worst_relative);
        let cert = is_irreducible(c, &tol)?;
        report.write_json(&output.join(format!("component_{k}.json")), c)?;
        components.push(json!({ "space_dim": c.space_dim(), "irreducibility": cert }));
    }
    report.write(&output.join("basis.json"), &matrix_file(&dec.basis))?;
    report.results = json!({
        "space_dim": t.space_dim(),
        "dims": dec.dims(),
        "dim_multiset": dec.dim_multiset(),
        "components": components,
        "reassembly_residual": dec.reassembly_residual,
        "draws": dec.draws,
        "generator": dec.generator,
    });
    eprintln!(
        "{} ⊗ {} -> dims {:?}",
        ra.space_dim(),
        rb.space_dim(),
        dec.dim_multiset()
    );
    Ok(report)
}

pub fn classify(
    dim: usize,
    trials: usize,
    seed: u64,
    gamma: &str,
    force: bool,
    output: Option<&Path>,
    tol: ToleranceConfig,
) -> Run {
    if dim == 0 {
        return Err(CliError::Usage("--dim must be positive".into()));
    }
    if dim > 8 && !force {
        return Err(CliError::Usage(format!(
            "--dim {dim} exceeds 8; pass --force to run anyway"
        )));
    }
    let gamma = parse_complex(gamma)?;
    let mut report = RunReport::new("classify", seed, tol);
    let c = classify_samples(&[dim], trials, gamma, seed, &tol)?;
    if let Some(dir) = output {
        for (k, ce) in c.counterexamples.iter().enumerate() {
            let mut text = serde_json::to_string_pretty(&ce.params).expect("values serialize");
            text.push('\n');
            report.write(&dir.join(format!("counterexample_{k}.json")), &text)?;
        }
    }
    report.ok &= c.counterexamples.is_empty();
    eprintln!(
        "dim {dim}: {} vectors, {} samples, {} irreducible, necessity {:.1}%, sufficiency agreement {:.1}%",
        c.rows.len(),
        c.samples,
        c.irreducible,
        100.0 * c.necessity_rate,
        100.0 * c.sufficiency_agreement
    );
    report.results = serde_json::to_value(&c).expect("reports serialize");
    Ok(report)
}

fn required<'a>(p: &'a Option<std::path::PathBuf>, flag: &str) -> Result<&'a Path, CliError> {
    p.as_deref()
        .ok_or_else(|| CliError::Usage(format!("{flag} is required in this mode")))
}

pub fn alloyability(args: AlloyabilityArgs, tol: ToleranceConfig) -> Run {
    let mut report = RunReport::new("alloyability", args.seed, tol);
    if let Some(path) = &args.canonical {
        let q1: QuaternaryAlgebra = report.load("q1", path)?;
        let (q2, f) = canonical_partner(&q1);
        let check = alloyability_check(&q1, &q2, &f, &tol)?;
        report.residual("alloyability", check.worst_relative);
        if let Some(dir) = &args.output {
            report.write_json(&dir.join("q2.json"), &q2)?;
            report.write_json(&dir.join("factorization.json"), &f)?;
        }
        report.results =
            json!({ "mode": "canonical", "n": q1.dim(), "m": q2.dim(), "check": check });
        eprintln!(
            "canonical partner of dimension {}: residual {:e}",
            q2.dim(),
            check.worst_residual
        );
        return Ok(report);
    }
    let q1: QuaternaryAlgebra = report.load("q1", required(&args.q1, "--q1")?)?;
    let q2: QuaternaryAlgebra = report.load("q2", required(&args.q2, "--q2")?)?;
    if let Some(path) = &args.factorization {
        let f: AlloyFactorization = report.load("factorization", path)?;
        let check = alloyability_check(&q1, &q2, &f, &tol)?;
        report.residual("alloyability", check.worst_relative);
        report.results = json!({ "mode": "check", "n": q1.dim(), "m": q2.dim(), "check": check });
        eprintln!("factorization residual {:e}", check.worst_residual);
        return Ok(report);
    }
    if !args.search {
        return Err(CliError::Usage(
            "choose --factorization, --canonical or --search".into(),
        ));
    }
    let budget = SearchBudget {
        restarts: args.restarts,
        iters: args.iters,
        seed: args.seed,
    };
    let outcome = alloyability_search(&q1, &q2, budget, &tol)?;
    let check = alloyability_check(&q1, &q2, &outcome.best, &tol)?;
    report.residual("alloyability", check.worst_relative);
    if let Some(dir) = &args.output {
        report.write_json(&dir.join("factorization.json"), &outcome.best)?;
    }
    let sweeps: Vec<usize> = outcome
        .traces
        .iter()
        .map(|t| t.len().saturating_sub(1))
        .collect();
    report.results = json!({
        "mode": "search",
        "n": q1.dim(),
        "m": q2.dim(),
        "budget": budget,
        "generator": GENERATOR,
        "best_residual": outcome.best_residual,
        "best_restart": outcome.best_restart,
        "restarts_run": outcome.traces.len(),
        "sweeps": sweeps,
        "check": check,
    });
    eprintln!(
        "search: best residual {:e} at restart {} of {}",
        outcome.best_residual,
        outcome.best_restart,
        outcome.traces.len()
    );
    Ok(report)
}

pub fn generate(
    kind: GenerateKind,
    n: usize,
    m: usize,
    seed: u64,
    output: &Path,
    tol: ToleranceConfig,
) -> Run {
    let mut report = RunReport::new("generate", seed, tol);
    let mut rng = rng_for(seed, 0);
    match kind {
        GenerateKind::Quaternary => {
            let big = pair_count(pair_count(n));
            let q = QuaternaryAlgebra::new(n, random_matrix(&mut rng, n, big))?;
            report.write_json(output, &q)?;
            report.results = json!({ "kind": "quaternary", "n": n });
        }
        GenerateKind::Planted => {
            let (q1, q2, f) = planted_instance(n, m, seed);
            report.write_json(&output.join("q1.json"), &q1)?;
            report.write_json(&output.join("q2.json"), &q2)?;
            report.write_json(&output.join("factorization.json"), &f)?;
            report.results = json!({ "kind": "planted", "n": n, "m": m });
        }
        GenerateKind::Cross => {
            let t1 = (0..3).map(|_| random_matrix(&mut rng, n, n)).collect();
            let t2 = vec![random_matrix(&mut rng, n, n)];
            let r = CrossProjRep::new(AntiAlgebra::sl2(), AntiAlgebra::abelian(1), t1, t2, n)?;
            report.write_json(output, &r)?;
            report.results = json!({ "kind": "cross", "space_dim": n });
        }
    }
    eprintln!("wrote {}", report.outputs.join(", "));
    Ok(report)
}
