use std::fmt::Display;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exponents::{
    classify_regime, existence_threshold, finite_energy_theta, lebesgue_gradient_exponent, lebesgue_solution_exponent,
    marcinkiewicz_exponents, uniqueness_min_m, ParameterSet,
};
use crate::mesh::{DiscreteField, RadialMesh};
use crate::problem::ProblemSpec;
use crate::regularity::{
    aux_check, bound_checks, entropy_residual, gradient_tail, log_decay_check, log_levels, solution_tail,
    strong_singular_trace, truncated_energy, CheckRow, Report, TailFit, TestFunction, LOG_DECAY_SPREAD,
};
use crate::solver::{
    manufactured_solution, solve_continuation, transform_solve, ContinuationOutcome, SolveDiagnostics,
};

use super::config::{ExperimentConfig, Scenario};

/// `m - 1` at which the Lebesgue exponents are compared with the Marcinkiewicz ones.
pub const CONTINUITY_OFFSET: f64 = 1e-8;
pub const CONTINUITY_TOL: f64 = 1e-6;

/// Result of one scenario pipeline.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub report: Report,
    /// Diagnostic `key=value` pairs that are not checks.
    pub summary: Vec<(String, String)>,
    pub field: Option<DiscreteField>,
    pub diagnostics: Option<SolveDiagnostics>,
}

struct Ctx {
    scenario: &'static str,
    out: Outcome,
}

impl Ctx {
    fn new(scenario: Scenario) -> Self {
        Ctx { scenario: scenario.name(), out: Outcome::default() }
    }

    fn row(&mut self, check: &str, predicted: f64, measured: f64, tolerance: f64, pass: bool) {
        self.out.report.push(CheckRow::new(self.scenario, check, predicted, measured, tolerance, pass));
    }

    /// `|measured - predicted| <= tol |predicted|`.
    fn relative(&mut self, check: &str, predicted: f64, measured: f64, tol: f64) {
        let pass = (measured - predicted).abs() <= tol * predicted.abs();
        self.row(check, predicted, measured, tol, pass);
    }

    /// `measured >= (1 - slack) predicted`.
    fn lower(&mut self, check: &str, predicted: f64, measured: f64, slack: f64) {
        self.row(check, predicted, measured, slack, measured >= (1.0 - slack) * predicted);
    }

    fn note(&mut self, key: &str, value: impl Display) {
        self.out.summary.push((key.to_string(), value.to_string()));
    }

    fn num(&mut self, key: &str, value: f64) {
        self.note(key, format!("{value:?}"));
    }

    fn fit(&mut self, key: &str, fit: Result<TailFit>) -> f64 {
        match fit {
            Ok(f) => {
                self.num(&format!("{key}_r2"), f.r_squared);
                f.exponent
            }
            Err(e) => {
                self.note(&format!("{key}_error"), e);
                f64::NAN
            }
        }
    }

    fn solved(&mut self, out: &ContinuationOutcome) {
        let d = &out.diagnostics;
        self.num("sup_u", out.field.max());
        self.note("levels", d.levels.len());
        self.note("newton_iterations", d.newton_iterations());
        self.note("continuation_converged", d.converged);
    }

    fn finish(mut self, field: Option<DiscreteField>, diagnostics: Option<SolveDiagnostics>) -> Outcome {
        self.out.field = field;
        self.out.diagnostics = diagnostics;
        self.out
    }
}

fn spec_of(cfg: &ExperimentConfig) -> Result<ProblemSpec> {
    if cfg.scenario == Scenario::Manufactured {
        return Ok(manufactured_solution(cfg.problem.dim).problem_spec());
    }
    cfg.problem_spec().map_err(|e| Error::InvalidParameter(e.to_string()))
}

fn mesh(cfg: &ExperimentConfig, cells: usize, r_in: f64) -> Result<Arc<RadialMesh>> {
    Ok(Arc::new(RadialMesh::build(cells, cfg.grading, r_in)?))
}

fn solve(cfg: &ExperimentConfig, spec: &ProblemSpec, cells: usize) -> Result<ContinuationOutcome> {
    let init = DiscreteField::zeros(mesh(cfg, cells, spec.r_in)?, spec.dim);
    solve_continuation(spec, init, &cfg.schedule.levels(), &cfg.continuation_options())
}

fn sup_norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// `‖u_coarse - u_fine‖_∞` on the coarse nodes of a nested pair of meshes.
fn nested_diff(coarse: &DiscreteField, fine: &DiscreteField, factor: usize) -> f64 {
    let f = fine.values();
    coarse.values().iter().enumerate().fold(0.0f64, |m, (i, u)| m.max((u - f[factor * i]).abs()))
}

/// Run the pipeline of `cfg.scenario`.
pub fn execute(cfg: &ExperimentConfig) -> Result<Outcome> {
    match cfg.scenario {
        Scenario::ExactRadial => exact_radial(cfg),
        Scenario::Manufactured => manufactured(cfg),
        Scenario::ExponentAtlas => exponent_atlas(cfg),
        Scenario::TailFit => tail_fit(cfg),
        Scenario::EntropyCheck => entropy_check(cfg),
        Scenario::HZero => h_zero(cfg),
        Scenario::Bounded => bounded(cfg),
        Scenario::TransformCrosscheck => transform_crosscheck(cfg),
        Scenario::UniquenessProbe => uniqueness_probe(cfg),
        Scenario::ThresholdProbe => threshold_probe(cfg),
        Scenario::StrongSingular => strong_singular(cfg),
    }
}

fn exact_radial(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut ctx = Ctx::new(cfg.scenario);
    let ex = cfg.exact()?;
    let spec = ex.problem_spec();
    let out = solve(cfg, &spec, cfg.cells)?;
    let r = out.field.mesh().nodes();
    let u = out.field.values();
    let (mut region, mut all) = (0.0f64, 0.0f64);
    for (i, &x) in r.iter().enumerate() {
        if x == 0.0 || x == 1.0 {
            continue;
        }
        let want = ex.eval(x);
        let rel = (u[i] - want).abs() / want.abs();
        all = all.max(rel);
        if x >= cfg.check.region_min {
            region = region.max(rel);
        }
    }
    ctx.row("max_rel_error", 0.0, region, cfg.check.tolerance, region <= cfg.check.tolerance);
    ctx.num("error_region_min", cfg.check.region_min);
    ctx.num("max_rel_error_all_nodes", all);
    ctx.num("alpha", ex.alpha());
    ctx.num("amplitude", ex.amplitude());
    ctx.solved(&out);

    // closed-form tails, sampled on the same mesh with the origin value clipped at r_1
    let a = ex.alpha();
    let r1 = r[1];
    let sampled = DiscreteField::from_fn(out.field.mesh().clone(), spec.dim, |x| ex.eval(x.max(r1)))?;
    let st = ctx.fit("exact_solution_tail", solution_tail(&sampled));
    let gt = ctx.fit("exact_gradient_tail", gradient_tail(&sampled));
    ctx.relative("solution_tail", spec.dim / a.abs(), st, cfg.check.tail_tol);
    ctx.relative("gradient_tail", spec.dim / (1.0 - a), gt, cfg.check.tail_tol);
    marcinkiewicz_rows(&mut ctx, cfg, &spec, &out.field);
    Ok(ctx.finish(Some(out.field), Some(out.diagnostics)))
}

/// One-sided checks of the fitted tails against the guaranteed indices.
fn marcinkiewicz_rows(ctx: &mut Ctx, cfg: &ExperimentConfig, spec: &ProblemSpec, field: &DiscreteField) {
    match marcinkiewicz_exponents(spec.dim, spec.p, spec.theta, spec.h.gamma2) {
        Ok(mx) => {
            let st = ctx.fit("solution_tail", solution_tail(field));
            let gt = ctx.fit("gradient_tail", gradient_tail(field));
            ctx.lower("solution_tail_lower_bound", mx.t, st, cfg.check.slack);
            ctx.lower("gradient_tail_lower_bound", mx.r, gt, cfg.check.slack);
        }
        Err(e) => ctx.note("marcinkiewicz", e),
    }
}

fn manufactured(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut ctx = Ctx::new(cfg.scenario);
    let m = manufactured_solution(cfg.problem.dim);
    let spec = m.problem_spec();
    let out = solve(cfg, &spec, cfg.cells)?;
    let r = out.field.mesh().nodes();
    let err = r.iter().zip(out.field.values()).fold(0.0f64, |e, (&x, u)| e.max((u - m.eval(x)).abs()));
    ctx.row("max_nodal_error", 0.0, err, cfg.check.tolerance, err <= cfg.check.tolerance);
    ctx.solved(&out);

    // nodal values are exact for the quadratic; the order is measured on the P1 reconstruction
    let mut pts = Vec::new();
    for &cells in &cfg.check.order_cells {
        let o = solve(cfg, &spec, cells)?;
        let (r, u) = (o.field.mesh().nodes(), o.field.values());
        let mut e = 0.0f64;
        let mut h = 0.0f64;
        for i in 0..r.len() - 1 {
            let mid = 0.5 * (r[i] + r[i + 1]);
            e = e.max((0.5 * (u[i] + u[i + 1]) - m.eval(mid)).abs());
            h = h.max(r[i + 1] - r[i]);
        }
        ctx.num(&format!("midpoint_error_m{cells}"), e);
        pts.push((h.ln(), e.ln()));
    }
    let order = slope(&pts);
    ctx.row("convergence_order", 2.0, order, 0.2, (order - 2.0).abs() <= 0.2);
    Ok(ctx.finish(Some(out.field), Some(out.diagnostics)))
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Largest relative gap between the Marcinkiewicz indices and the Lebesgue
/// exponents at `m = 1 + CONTINUITY_OFFSET`; `None` outside the Marcinkiewicz range.
pub fn continuity_gap(dim: f64, p: f64, theta: f64, gamma2: f64) -> Option<(f64, f64)> {
    let mx = marcinkiewicz_exponents(dim, p, theta, gamma2).ok()?;
    let m = 1.0 + CONTINUITY_OFFSET;
    let t = lebesgue_solution_exponent(dim, p, theta, gamma2, m);
    let r = lebesgue_gradient_exponent(dim, p, theta, gamma2, m);
    Some(((t - mx.t).abs() / mx.t, (r - mx.r).abs() / mx.r))
}

/// Random admissible `(N, p, θ, γ₂)` inside the Marcinkiewicz range, with
/// `N - p >= (N - 1)/5` so the exponents stay well conditioned in `m`.
pub fn random_admissible(rng: &mut impl Rng) -> (f64, f64, f64, f64) {
    let dim = rng.gen_range(2.0..6.0);
    let p = 1.0 + rng.gen_range(0.05..0.8) * (dim - 1.0);
    let gamma2 = rng.gen_range(0.0..2.0);
    let lo = finite_energy_theta(p, gamma2);
    let hi = 1.0 + gamma2 / (p - 1.0);
    let theta = lo + rng.gen_range(0.0..0.999) * (hi - lo);
    (dim, p, theta, gamma2)
}

fn exponent_atlas(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut ctx = Ctx::new(cfg.scenario);
    let pp = &cfg.problem;
    let params = ParameterSet::new(pp.dim, pp.p, pp.theta, pp.gamma1, pp.gamma2, pp.m)?;
    for (k, v) in classify_regime(&params).fields() {
        ctx.note(k, v);
    }
    if let Some((dt, dr)) = continuity_gap(pp.dim, pp.p, pp.theta, pp.gamma2) {
        ctx.row("continuity_t", 0.0, dt, CONTINUITY_TOL, dt <= CONTINUITY_TOL);
        ctx.row("continuity_r", 0.0, dr, CONTINUITY_TOL, dr <= CONTINUITY_TOL);
    }
    if pp.p == 2.0 && pp.gamma2 == 0.0 {
        if let Ok(um) = uniqueness_min_m(pp.dim, pp.p, pp.theta, pp.gamma2) {
            let want = pp.dim / (pp.dim - pp.theta * (pp.dim - 2.0));
            let tol = 4.0 * f64::EPSILON * want;
            ctx.row("uniqueness_formula", want, um, tol, (um - want).abs() <= tol);
        }
    }
    if cfg.atlas_samples > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut worst = 0.0f64;
        for _ in 0..cfg.atlas_samples {
            let (dim, p, theta, g2) = random_admissible(&mut rng);
            let (dt, dr) = continuity_gap(dim, p, theta, g2).unwrap_or((f64::NAN, f64::NAN));
            worst = worst.max(dt).max(dr);
            if dt.is_nan() || dr.is_nan() {
                worst = f64::NAN;
                break;
            }
        }
        ctx.row("random_continuity", 0.0, worst, CONTINUITY_TOL, worst <= CONTINUITY_TOL);
        let mut worst = 0.0f64;
        for _ in 0..cfg.atlas_samples {
            let dim = rng.gen_range(2.5..8.0);
            let theta = rng.gen_range(0.0..=1.0);
            let want = dim / (dim - theta * (dim - 2.0));
            let got = uniqueness_min_m(dim, 2.0, theta, 0.0)?;
            worst = worst.max((got - want).abs() / want);
        }
        let tol = 4.0 * f64::EPSILON;
        ctx.row("random_uniqueness_formula", 0.0, worst, tol, worst <= tol);
        ctx.note("samples", cfg.atlas_samples);
    }
    Ok(ctx.finish(None, None))
}

fn tail_fit(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut ctx = Ctx::new(cfg.scenario);
    let spec = spec_of(cfg)?;
    let out = solve(cfg, &spec, cfg.cells)?;
    ctx.solved(&out);
    marcinkiewicz_rows(&mut ctx, cfg, &spec, &out.field);
    match aux_check(&out.field, spec.p) {
        Ok(aux) => {
            ctx.num("eta", aux.eta);
            ctx.lower("aux_solution_bound", aux.solution_bound, aux.solution_fit.exponent, cfg.check.slack);
            ctx.lower("aux_gradient_bound", aux.gradient_bound, aux.gradient_fit.exponent, cfg.check.slack);
            let want = spec.theta * (spec.p - 1.0) + 1.0 - spec.h.gamma2;
            let pass = aux.eta <= (1.0 + cfg.check.slack) * want;
            ctx.row("energy_growth_upper_bound", want, aux.eta, cfg.check.slack, pass);
        }
        Err(e @ Error::NotApplicable(_)) => ctx.note("aux_check", e),
        Err(e) => return Err(e),
    }
    match log_decay_check(&out.history, &spec, &log_levels(1.0, 1e3, 30)) {
        Ok(ld) => {
            if let Some((_, c)) = ld.constants.last() {
                ctx.num("log_decay_constant", *c);
            }
            ctx.row("log_decay_spread", 0.0, ld.spread, LOG_DECAY_SPREAD, ld.pass);
        }
        Err(e @ Error::InsufficientData(_)) => ctx.note("log_decay", e),
        Err(e) => return Err(e),
    }
    Ok(ctx.finish(Some(out.field), Some(out.diagnostics)))
}

/// The built-in test-function family with fixed constants.
pub fn test_family() -> [(&'static str, TestFunction); 3] {
    [
        ("zero", TestFunction::Zero),
        ("truncation", TestFunction::ScaledTruncation { scale: 0.5, level: 1.0 }),
        ("bump", TestFunction::Bump { scale: 0.5 }),
    ]
}

pub const ENTROPY_LEVELS: [f64; 3] = [0.1, 1.0, 10.0];
pub const ENTROPY_ZERO_TOL: f64 = 1e-6;

fn entropy_check(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut ctx = Ctx::new(cfg.scenario);
    let spec = spec_of(cfg)?;
    let out = solve(cfg, &spec, cfg.cells)?;
    ctx.solved(&out);
    for (name, phi) in test_family() {
        if matches!(phi, TestFunction::Bump { .. }) && spec.r_in > 0.0 {
            ctx.note("bump", "skipped on the annulus");
            continue;
        }
        for k in ENTROPY_LEVELS {
            let e = entropy_residual(&out.field, &spec, None, &phi, k)?;
            let measured = e.residual / e.scale;
            let tol = if name == "zero" { ENTROPY_ZERO_TOL } else { cfg.check.entropy_const / cfg.cells as f64 };
            ctx.row(&format!("entropy_{name}_k{k}"), 0.0, measured, tol, measured <= tol);
        }
    }
    Ok(ctx.finish(Some(out.field), Some(out.diagnostics)))
}

fn h_zero(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut ctx = Ctx::new(cfg.scenario);
    let spec = spec_of(cfg)?;
    let out = solve(cfg, &spec, cfg.cells)?;
    ctx.solved(&out);
    let b = bound_checks(&out.field, &spec)?;
    let zero = b.bound.unwrap_or(f64::NAN);
    let conv = out.diagnostics.converged;
    ctx.row("continuation_converged", 1.0, f64::from(u8::from(conv)), 0.0, conv);
    ctx.row("sup_below_zero_point", zero, b.sup_u, cfg.check.tolerance, b.sup_u <= zero + cfg.check.tolerance);
    Ok(ctx.finish(Some(out.field), Some(out.diagnostics)))
}

fn bounded(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut ctx = Ctx::new(cfg.scenario);
    let spec = spec_of(cfg)?;
    let out = solve(cfg, &spec, cfg.cells)?;
    ctx.solved(&out);
    let b = bound_checks(&out.field, &spec)?;
    ctx.row("sup_finite", f64::NAN, b.sup_u, 0.0, b.pass);
    let fine = solve(cfg, &spec, cfg.check.refine_factor * cfg.cells)?;
    ctx.num("sup_u_refined", fine.field.max());
    ctx.relative("sup_refinement", fine.field.max(), b.sup_u, cfg.check.tolerance);
    Ok(ctx.finish(Some(out.field), Some(out.diagnostics)))
}

fn transform_crosscheck(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut ctx = Ctx::new(cfg.scenario);
    let spec = spec_of(cfg)?;
    let factor = cfg.check.refine_factor;
    let coarse = solve(cfg, &spec, cfg.cells)?;
    let fine = solve(cfg, &spec, factor * cfg.cells)?;
    let disc = nested_diff(&coarse.field, &fine.field, factor);
    let init = DiscreteField::zeros(coarse.field.mesh().clone(), spec.dim);
    let tr = transform_solve(&spec, init, &cfg.schedule.levels(), &cfg.continuation_options())?;
    let gap = sup_norm_diff(coarse.field.values(), tr.field.values());
    ctx.solved(&coarse);
    ctx.num("discretization_error", disc);
    ctx.note("transform_newton_iterations", tr.diagnostics.newton_iterations());
    let bound = cfg.check.tolerance * disc;
    ctx.row("direct_vs_transform", 0.0, gap, bound, gap <= bound);
    Ok(ctx.finish(Some(coarse.field), Some(coarse.diagnostics)))
}

fn uniqueness_probe(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut ctx = Ctx::new(cfg.scenario);
    let spec = spec_of(cfg)?;
    let pp = &cfg.problem;
    let min_m = uniqueness_min_m(spec.dim, spec.p, spec.theta, spec.h.gamma2).unwrap_or(f64::NAN);
    let in_lm = spec.source.in_lebesgue(spec.dim, pp.m);
    ctx.row("m_above_uniqueness_threshold", min_m, pp.m, 0.0, in_lm && pp.m >= min_m);
    ctx.note("source_in_lm", in_lm);

    // both schedules end at the same level so the fields solve the same problem
    let mut a = cfg.schedule.levels();
    let mut b = cfg.probe_schedule.levels();
    let last = a[a.len() - 1].max(b[b.len() - 1]);
    for s in [&mut a, &mut b] {
        if s[s.len() - 1] < last {
            s.push(last);
        }
    }
    let mesh = mesh(cfg, cfg.cells, spec.r_in)?;
    let zero = DiscreteField::zeros(mesh.clone(), spec.dim);
    let c = cfg.probe_init;
    let ones = DiscreteField::from_fn(mesh, spec.dim, |_| c)?;
    let opts = cfg.continuation_options();
    let mut fields = Vec::new();
    let mut first = None;
    for schedule in [&a, &b] {
        for init in [&zero, &ones] {
            let out = solve_continuation(&spec, init.clone(), schedule, &opts)?;
            fields.push(out.field.clone());
            first.get_or_insert(out);
        }
    }
    let reference = &fields[0];
    let scale = reference.values().iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let diff = fields[1..].iter().map(|f| sup_norm_diff(f.values(), reference.values())).fold(0.0f64, f64::max) / scale;
    let first = first.expect("four runs");
    ctx.solved(&first);
    ctx.row("field_agreement", 0.0, diff, cfg.check.tolerance, diff <= cfg.check.tolerance);
    Ok(ctx.finish(Some(first.field), Some(first.diagnostics)))
}

fn threshold_probe(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut ctx = Ctx::new(cfg.scenario);
    let spec = spec_of(cfg)?;
    let threshold = existence_threshold(spec.p, spec.h.gamma2)?;
    ctx.row("above_existence_threshold", threshold, spec.theta, 0.0, spec.theta > threshold);
    let (diag, field, diverged) = match solve(cfg, &spec, cfg.cells) {
        Ok(out) => {
            ctx.solved(&out);
            (out.diagnostics, Some(out.field), false)
        }
        Err(Error::Divergence { level, diagnostics }) => {
            ctx.note("divergence_level", level);
            (*diagnostics, None, true)
        }
        Err(e) => return Err(e),
    };
    if let Some(l) = diag.last() {
        ctx.num("last_sup_u", l.sup_u);
    }
    ctx.row("divergence_signal", 1.0, f64::from(u8::from(diverged)), 0.0, diverged);
    let lit = diag.energy_nondecreasing;
    ctx.row("energy_nondecreasing", 1.0, f64::from(u8::from(lit)), 0.0, lit);
    Ok(ctx.finish(field, Some(diag)))
}

fn strong_singular(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut ctx = Ctx::new(cfg.scenario);
    let spec = spec_of(cfg)?;
    let k = cfg.check.trace_level;
    let coarse = solve(cfg, &spec, cfg.cells)?;
    let fine = solve(cfg, &spec, cfg.check.refine_factor * cfg.cells)?;
    ctx.solved(&coarse);
    let t1 = strong_singular_trace(&coarse.field, &spec, k)?;
    let t2 = strong_singular_trace(&fine.field, &spec, k)?;
    ctx.num("plain_energy", truncated_energy(&coarse.field, k, spec.p)?);
    ctx.num("plain_energy_refined", truncated_energy(&fine.field, k, spec.p)?);
    ctx.num("trace_power", (spec.h.gamma1 - 1.0 + spec.p) / spec.p);
    ctx.relative("trace_energy_refinement", t1, t2, cfg.check.tolerance);
    Ok(ctx.finish(Some(coarse.field), Some(coarse.diagnostics)))
}
