//! Property checks on a single instance: the step geometry of RKAS, exact
//! one-step contraction, tightness, stored/unstored agreement and the flop
//! formulas.

use rkas::flops::{formula_for, instrumented_count, SparsityProfile};
use rkas::linalg::{norm, norm_sq};
use rkas::solvers::{expected_rkas_residual_error, rkas_contraction_factor, Solver, SolverConfig, StoredGram};
use rkas::Result;
use serde::Serialize;

use crate::plan::Instance;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name,
            passed,
            detail: detail.into(),
        }
    }
}

/// Run every check, following RKAS for at most `max_steps` iterations.
pub fn verify(inst: &Instance, seed: u64, max_steps: u64) -> Result<Vec<Check>> {
    let mut checks = step_checks(inst, seed, max_steps)?;
    checks.push(contraction_check(inst)?);
    checks.push(tightness_check(inst)?);
    checks.push(identity_check(inst, seed)?);
    checks.push(flop_check(inst, seed)?);
    Ok(checks)
}

fn step_checks(inst: &Instance, seed: u64, max_steps: u64) -> Result<Vec<Check>> {
    let (sys, gt) = (&inst.sys, &inst.gt);
    let gram = StoredGram::new(sys.csr());
    let mut s = Solver::new(sys, SolverConfig::rkas().seed(seed))?;
    let frob_sq = gt.frob_sq();
    let floor = 1e-15 * norm(sys.b());
    let (mut worst_orth, mut orth_ok) = (0.0f64, true);
    let mut mono_ok = true;
    let (mut worst_range, mut range_ok) = (0.0f64, true);
    let view = |r: &[f64]| -> Vec<f64> { r.iter().zip(&gt.e).map(|(a, b)| a - b).collect() };
    let mut prev = norm(&view(s.state().r.as_ref().unwrap()));
    let mut steps = 0;
    while steps < max_steps && gt.rse(&s.state().x)? > 1e-12 {
        let r_norm = norm(s.state().r.as_ref().unwrap());
        let (i, _) = s.step();
        steps += 1;
        let v = view(s.state().r.as_ref().unwrap());
        let err = norm(&v);
        let (idx, vals) = gram.column(i);
        let g_dot_v: f64 = idx.iter().zip(vals).map(|(&l, &g)| g * v[l]).sum();
        let g_norm = gram.column_norm_sq(i).sqrt();
        let tol = 1e-8 * frob_sq * err + 8.0 * f64::EPSILON * g_norm * (r_norm + norm(&gt.e));
        worst_orth = worst_orth.max(g_dot_v.abs() / (frob_sq * err).max(f64::MIN_POSITIVE));
        orth_ok &= g_dot_v.abs() <= tol;
        mono_ok &= err <= prev * (1.0 + 1e-12) + floor;
        prev = err;
        let x = &s.state().x;
        let off = norm(&gt.row_space_complement(x));
        worst_range = worst_range.max(off / (1.0 + norm(x)));
        range_ok &= off <= 1e-8 * (1.0 + norm(x));
    }
    let drift = s.residual_drift().unwrap_or(0.0);
    let drift_ok = drift <= 1e-8 * (1.0 + norm(sys.b()));
    Ok(vec![
        Check::new(
            "orthogonality",
            orth_ok,
            format!("{steps} steps, max |<g, Ax - AA†b>| / (‖A‖_F² ‖Ax - AA†b‖) = {worst_orth:.3e}"),
        ),
        Check::new("monotonicity", mono_ok, format!("{steps} steps, final ‖Ax - AA†b‖ = {prev:.3e}")),
        Check::new(
            "range_invariance",
            range_ok,
            format!("max ‖(I - A†A)x‖ / (1 + ‖x‖) = {worst_range:.3e}"),
        ),
        Check::new("residual_drift", drift_ok, format!("‖r - (Ax - b)‖ = {drift:.3e}")),
    ])
}

/// Deterministic probes: `0`, `Aᵀb`, `1.5 A†b`, the planted `x` and a few
/// coordinate vectors.
fn probes(inst: &Instance) -> Result<Vec<Vec<f64>>> {
    let n = inst.sys.ncols();
    let mut out = vec![vec![0.0; n], inst.sys.csr().matvec_t(inst.sys.b())?];
    out.push(inst.gt.x_star.iter().map(|v| 1.5 * v).collect());
    if let Some(x) = inst.sys.planted_x() {
        out.push(x.to_vec());
    }
    for j in [0, n / 2, n - 1] {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        out.push(e);
    }
    Ok(out)
}

fn contraction_check(inst: &Instance) -> Result<Check> {
    let (sys, gt) = (&inst.sys, &inst.gt);
    let factor = rkas_contraction_factor(gt);
    let mut ok = true;
    let mut worst = 0.0f64;
    for x in probes(inst)? {
        let ax = sys.csr().matvec(&x)?;
        let err = gt.residual_err_sq_from_product(&ax);
        let expect = expected_rkas_residual_error(sys, gt, &x)?;
        let scale = gt.frob_sq() * (norm_sq(&x) + norm_sq(&gt.x_star));
        ok &= expect <= factor * err + 1e-12 * scale;
        if err > 1e-8 * scale {
            worst = worst.max(expect / (factor * err));
        }
    }
    Ok(Check::new(
        "exact_contraction",
        ok,
        format!("factor {factor:.6}, max E[err⁺] / (factor · err) = {worst:.6}"),
    ))
}

fn tightness_check(inst: &Instance) -> Result<Check> {
    let gt = &inst.gt;
    if (gt.sigma_max - gt.sigma_min) > 1e-10 * gt.sigma_max {
        return Ok(Check::new(
            "tightness",
            true,
            format!("not an equality case (σ_max/σ_min = {:.4})", gt.cond_nonzero()),
        ));
    }
    let factor = rkas_contraction_factor(gt);
    let mut ok = true;
    let mut worst = 0.0f64;
    for x in probes(inst)? {
        let ax = inst.sys.csr().matvec(&x)?;
        let bound = factor * gt.residual_err_sq_from_product(&ax);
        let expect = expected_rkas_residual_error(&inst.sys, gt, &x)?;
        if bound > 0.0 {
            let rel = (expect - bound).abs() / bound;
            worst = worst.max(rel);
            ok &= rel <= 1e-10;
        }
    }
    Ok(Check::new("tightness", ok, format!("equality case, max relative gap {worst:.3e}")))
}

fn identity_check(inst: &Instance, seed: u64) -> Result<Check> {
    let mut a = Solver::new(&inst.sys, SolverConfig::rkas().seed(seed))?;
    let mut b = Solver::new(&inst.sys, SolverConfig::rkas().seed(seed).store_gram(false))?;
    let steps = 1000;
    for k in 0..steps {
        a.step();
        b.step();
        let same = a.state().x.iter().zip(&b.state().x).all(|(p, q)| p.to_bits() == q.to_bits());
        if !same {
            return Ok(Check::new("stored_unstored_identity", false, format!("iterates differ at step {}", k + 1)));
        }
    }
    Ok(Check::new("stored_unstored_identity", true, format!("{steps} steps bit-identical")))
}

fn flop_check(inst: &Instance, seed: u64) -> Result<Check> {
    let profile = SparsityProfile::new(inst.sys.csr());
    let mut failures = Vec::new();
    for cfg in [SolverConfig::rek(), SolverConfig::rkas(), SolverConfig::rkas().store_gram(false)] {
        let cfg = cfg.seed(seed);
        let formula = formula_for(&profile, &cfg).expect("REK and RKAS have formulas");
        let run = instrumented_count(&inst.sys, &cfg, 100)?;
        if run.ledger.init != formula.init() {
            failures.push(format!("{:?} init {} vs {}", formula.method(), run.ledger.init, formula.init()));
        }
        let steps = run.ledger.per_step().unwrap_or_default();
        let bad = run.indices.iter().zip(steps).filter(|(&(i, j), &c)| c != formula.step(i, j)).count();
        if bad > 0 {
            failures.push(format!("{:?}: {bad} of 100 steps differ", formula.method()));
        }
    }
    let ok = failures.is_empty();
    let detail = if ok { "init and 100 steps match for REK, RKAS stored, RKAS unstored".into() } else { failures.join("; ") };
    Ok(Check::new("flop_formulas", ok, detail))
}

