use bergman_core::gram_oracle::{
    gauss_codazzi_check, gauss_codazzi_sweep, mc_moment, subbundle_curvature_at_origin,
};
use bergman_core::hardy::{
    bergman_kernel_closed, bergman_kernel_series, restriction_blowup_demo, verify_ladder_bounds, BasisSpec,
    HardySection,
};
use bergman_core::model_curvature::{
    curvature_bruteforce_operator, curvature_form_model, curvature_sandwich, frame_derivative_residual,
    interior_indices, CoefficientMutation, TangentVector,
};
use bergman_core::multiindex::{ball_moment, enumerate, moment_recursion_check, split_bound_check_report, MultiIndex};
use bergman_core::perturbation::{
    build_q, build_q_expanded, curvature_full_origin, halving_ratios, q_bound_check, relative_deviation, word_bound_check,
    MetricJet,
};
use bergman_core::random::{random_section, random_tangent, random_unit_tangent, rng, DEFAULT_DECAY};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::commands::mutation;
use crate::config::RunConfig;
use crate::output::emit;
use crate::{CliError, Verdict};

const SAMPLE_JET: &str = include_str!("../../core/fixtures/sample_jet.json");

pub const SUITES: [&str; 11] = [
    "moments",
    "kernel",
    "connection",
    "curvature",
    "gauss-codazzi",
    "ladder-bounds",
    "split",
    "sandwich",
    "rho",
    "blowup",
    "perturbation",
];

#[derive(Clone, Debug, Serialize)]
pub struct SuiteRow {
    pub suite: String,
    pub invariant: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
}

struct Suite {
    name: &'static str,
    invariant: &'static str,
    tolerance: f64,
    cases: usize,
    worst: f64,
    failures: Vec<String>,
}

impl Suite {
    fn new(name: &'static str, invariant: &'static str, tolerance: f64) -> Self {
        Suite { name, invariant, tolerance, cases: 0, worst: 0.0, failures: Vec::new() }
    }

    /// Records a measured error against the suite tolerance.
    fn measure(&mut self, value: f64, what: impl FnOnce() -> String) {
        self.cases += 1;
        if value.is_nan() || value > self.worst {
            self.worst = if value.is_nan() { f64::INFINITY } else { value };
        }
        if !(value <= self.tolerance) {
            self.fail(format!("{} = {value:e}", what()));
        }
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.fail(what());
        }
    }

    fn fail(&mut self, msg: String) {
        if self.failures.len() < 5 {
            self.failures.push(msg);
        }
        if self.failures.len() == 5 {
            self.failures.push("...".into());
        }
    }

    fn finish(self) -> SuiteRow {
        SuiteRow {
            suite: self.name.to_string(),
            invariant: self.invariant,
            passed: self.failures.is_empty(),
            cases: self.cases,
            worst: self.worst,
            tolerance: self.tolerance,
            detail: self.failures.join("; "),
        }
    }
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    mutation: CoefficientMutation,
}

impl Ctx<'_> {
    fn ns(&self) -> Vec<usize> {
        self.cfg.n_or(&[1, 2, 3])
    }

    fn degrees(&self) -> Vec<u32> {
        self.cfg.degree_or(&[6])
    }

    fn eps(&self) -> Vec<f64> {
        self.cfg.eps_or(&[0.3, 1.0])
    }
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 { 0.0 } else { (a - b).abs() / scale }
}

fn suite_moments(ctx: &Ctx) -> Result<SuiteRow, CliError> {
    let mut s = Suite::new("moments", "ball moment closed form (exact) and Monte Carlo agreement", 4.0);
    for &n in &ctx.ns() {
        for alpha in enumerate(n, 8)? {
            s.require(moment_recursion_check(&alpha), || format!("recursion differs at {alpha}"));
            for eps in ctx.eps() {
                let scaled = ball_moment(&alpha, eps)?;
                let unit = ball_moment(&alpha, 1.0)?;
                // eps^2 as an exact scalar: the moment of 1 over the eps-disc divided by pi
                let e2 = &ball_moment(&MultiIndex::zero(1), eps)? / &ball_moment(&MultiIndex::zero(1), 1.0)?;
                let ratio = &scaled / &unit;
                let expect = e2.powi((alpha.degree() as usize + n) as i32);
                s.require(ratio == expect, || format!("scaling fails at {alpha}, eps {eps}"));
            }
        }
        let samples = ctx.cfg.mc.unwrap_or(200_000);
        for (i, alpha) in enumerate(n, 2)?.iter().enumerate() {
            let exact = ball_moment(alpha, 1.0)?.to_f64();
            let est = mc_moment(alpha, 1.0, samples, ctx.cfg.seed.wrapping_add(i as u64))?;
            let z = if est.std_error > 0.0 { (est.estimate - exact).abs() / est.std_error } else { 0.0 };
            s.measure(z, || format!("Monte Carlo z-score at {alpha}"));
        }
    }
    Ok(s.finish())
}

fn suite_kernel(ctx: &Ctx) -> Result<SuiteRow, CliError> {
    let mut s = Suite::new("kernel", "Bergman kernel series against closed form", ctx.cfg.tol_or(1e-8));
    for n in [1usize, 2] {
        let zero = vec![Complex64::new(0.0, 0.0); n];
        let closed = bergman_kernel_closed(n, &zero)?;
        let series = bergman_kernel_series(n, &zero, 40)?;
        let expected = if n == 1 { 1.0 / std::f64::consts::PI } else { 2.0 / std::f64::consts::PI.powi(2) };
        s.require(closed == series && closed == expected, || format!("kernel at w = 0, n = {n}"));
        for step in 0..=12 {
            let r = 0.05 * step as f64;
            let w: Vec<Complex64> = (0..n)
                .map(|j| Complex64::from_polar(r / (n as f64).sqrt(), 0.7 * j as f64))
                .collect();
            let c = bergman_kernel_closed(n, &w)?;
            let t = bergman_kernel_series(n, &w, 40)?;
            s.measure(rel(c, t), || format!("n = {n}, |w| = {r}"));
        }
    }
    Ok(s.finish())
}

fn suite_connection(ctx: &Ctx) -> Result<SuiteRow, CliError> {
    let mut s = Suite::new("connection", "frame derivative identity of the model connection", ctx.cfg.tol_or(1e-12));
    for &n in &ctx.ns() {
        for eps in ctx.eps() {
            let spec = BasisSpec::new(n, eps, 6)?;
            for alpha in spec.indices() {
                for k in 0..n {
                    let r = frame_derivative_residual(&alpha, k, &spec);
                    s.measure(r, || format!("alpha {alpha}, k = {}, eps {eps}", k + 1));
                }
            }
        }
    }
    Ok(s.finish())
}

fn suite_curvature(ctx: &Ctx) -> Result<SuiteRow, CliError> {
    let mut s = Suite::new("curvature", "brute-force curvature equals the closed-form quadratic form", ctx.cfg.tol_or(1e-10));
    let mut r = rng(ctx.cfg.seed);
    for &n in &ctx.ns() {
        for &degree in &ctx.degrees() {
            for eps in ctx.eps() {
                let spec = BasisSpec::new(n, eps, degree)?;
                let brute = curvature_bruteforce_operator(&spec, ctx.mutation);
                for alpha in interior_indices(&spec) {
                    let xi = HardySection::basis(spec, &alpha);
                    for axis in 0..n {
                        let v = TangentVector::axis(n, axis);
                        let a = brute.quadratic_form(&xi, &v).re;
                        let b = curvature_form_model(&xi, &v);
                        s.measure(rel(a, b), || format!("n = {n}, N = {degree}, eps {eps}, alpha {alpha}, v_{}", axis + 1));
                        if n == 1 {
                            let hand = 2.0 * (alpha.get(0) as f64 + 1.0) / (eps * eps);
                            s.measure(rel(a, hand), || format!("n = 1 diagonal at {alpha}, eps {eps}"));
                        }
                    }
                }
                if degree >= 1 {
                    let inner = spec.with_degree(degree - 1);
                    for _ in 0..4 {
                        let small = random_section(inner, DEFAULT_DECAY, &mut r);
                        let mut xi = HardySection::zero(spec);
                        for (alpha, c) in small.iter() {
                            xi.add_to(&alpha, c);
                        }
                        let v = random_tangent(n, &mut r);
                        let a = brute.quadratic_form(&xi, &v).re;
                        let b = curvature_form_model(&xi, &v);
                        s.measure(rel(a, b), || format!("random xi, n = {n}, N = {degree}, eps {eps}"));
                    }
                }
            }
        }
    }
    Ok(s.finish())
}

fn suite_gauss_codazzi(ctx: &Ctx) -> Result<SuiteRow, CliError> {
    let mut s = Suite::new("gauss-codazzi", "subbundle curvature equals model minus second fundamental form", ctx.cfg.tol_or(1e-9));
    let ns: Vec<usize> = ctx.ns().into_iter().filter(|&n| n <= 2).collect();
    let ns = if ns.is_empty() { vec![1, 2] } else { ns };
    let top = ctx.degrees().into_iter().max().unwrap_or(3).min(3);
    let mut r = rng(ctx.cfg.seed ^ 0x5eed);
    for &n in &ns {
        for degree in 0..=top {
            for eps in ctx.eps() {
                for row in gauss_codazzi_sweep(n, degree, eps, ctx.mutation)? {
                    s.measure(row.residual, || format!("n = {n}, N = {degree}, eps {eps}, xi #{}, v_{}", row.xi_index, row.v_axis));
                }
                let sub = subbundle_curvature_at_origin(n, degree, eps)?;
                s.require(sub.trace_identity_holds(), || format!("trace identity, n = {n}, N = {degree}"));
                for _ in 0..3 {
                    let xi = random_section(sub.spec, DEFAULT_DECAY, &mut r);
                    let v = random_tangent(n, &mut r);
                    let g = gauss_codazzi_check(&sub, &xi, &v, ctx.mutation);
                    s.measure(g.residual, || format!("random xi, n = {n}, N = {degree}, eps {eps}"));
                }
                if degree == 0 {
                    let worst = sub.block(0, 0).iter().map(|c| c.norm()).fold(0.0, f64::max);
                    s.require(worst == 0.0, || format!("Theta_sub(N = 0) = {worst} != 0"));
                }
                if degree == 1 && n == 1 {
                    let b = sub.block(0, 0);
                    let e2 = 1.0 / (eps * eps);
                    let ok = rel(b[(0, 0)].re, 2.0 * e2) < 1e-12
                        && rel(b[(1, 1)].re, -2.0 * e2) < 1e-12
                        && b[(0, 1)].norm() == 0.0
                        && b[(1, 0)].norm() == 0.0;
                    s.require(ok, || format!("Theta_sub(N = 1, n = 1) != diag(2, -2)/eps^2 at eps {eps}: {b}"));
                }
            }
        }
    }
    Ok(s.finish())
}

fn suite_bounds(ctx: &Ctx) -> Result<SuiteRow, CliError> {
    let mut s = Suite::new("ladder-bounds", "ladder, multiplication and commutator norm estimates", 1.0 + 1e-12);
    let mut eps = ctx.eps();
    eps.extend([0.25, 0.5, 1.0]);
    eps.sort_by(f64::total_cmp);
    eps.dedup();
    for &n in &ctx.ns() {
        for &e in &eps {
            let report = verify_ladder_bounds(&BasisSpec::new(n, e, 12)?);
            for c in &report.checks {
                s.measure(c.worst_ratio, || format!("{} at n = {n}, eps {e}, alpha {:?}", c.name, c.worst_alpha));
            }
            if n == 1 {
                let c = report.check("comm_dstar_d").expect("named check");
                s.require((c.worst_ratio - 1.0).abs() < 1e-12, || format!("[D*, D] bound not attained: {}", c.worst_ratio));
            }
        }
    }
    Ok(s.finish())
}

fn suite_split(ctx: &Ctx) -> Result<SuiteRow, CliError> {
    let mut s = Suite::new("split", "sup-norm product inequality over all admissible splits", 0.0);
    for &n in &ctx.ns() {
        for lambda in enumerate(n, 12)? {
            if lambda.degree() < 2 {
                continue;
            }
            let r = split_bound_check_report(&lambda)?;
            s.require(r.holds, || format!("inequality fails at {lambda}"));
            s.require(r.min_sup_ratio >= 1.0, || format!("ratio {} < 1 at {lambda}", r.min_sup_ratio));
        }
    }
    Ok(s.finish())
}

fn suite_sandwich(ctx: &Ctx) -> Result<SuiteRow, CliError> {
    let mut s = Suite::new("sandwich", "L <= Q <= 2L, positivity and eps-homogeneity", ctx.cfg.tol_or(1e-12));
    let mut r = rng(ctx.cfg.seed.wrapping_add(8));
    let ns = ctx.ns();
    let degrees = ctx.degrees();
    for t in 0..ctx.cfg.trials {
        let n = ns[t % ns.len()];
        let degree = degrees[t % degrees.len()];
        let unit = BasisSpec::new(n, 1.0, degree)?;
        let xi1 = random_section(unit, DEFAULT_DECAY, &mut r);
        let v = random_tangent(n, &mut r);
        let q1 = curvature_form_model(&xi1, &v);
        for eps in ctx.eps() {
            let xi = HardySection::new(unit.with_eps(eps), xi1.coeffs().to_vec())?;
            let sw = curvature_sandwich(&xi, &v);
            s.require(sw.holds(1e-12), || format!("sandwich at trial {t}, eps {eps}: {sw:?}"));
            let floor = n as f64 * xi.norm_sqr() * v.norm_sqr() / (eps * eps);
            s.require(sw.value >= floor * (1.0 - 1e-12), || format!("positivity at trial {t}"));
            s.measure(rel(sw.value, q1 / (eps * eps)), || format!("homogeneity at trial {t}, eps {eps}"));
        }
    }
    Ok(s.finish())
}

fn suite_rho(ctx: &Ctx) -> Result<SuiteRow, CliError> {
    let mut s = Suite::new("rho", "log-convexity of the rho-norm and its derivative identity", ctx.cfg.tol_or(1e-10));
    let grid: Vec<f64> = if ctx.cfg.rho.len() >= 3 {
        ctx.cfg.rho.clone()
    } else {
        (0..10).map(|i| (-(2.0 * (9 - i) as f64 / 9.0)).exp()).collect()
    };
    let mut r = rng(ctx.cfg.seed.wrapping_add(9));
    let ns = ctx.ns();
    for t in 0..ctx.cfg.trials {
        let n = ns[t % ns.len()];
        let spec = BasisSpec::new(n, 1.0, 6)?;
        let xi = random_section(spec, DEFAULT_DECAY, &mut r);
        let m = 1 + (t % 3) as u32;
        let logs: Vec<f64> = grid.iter().map(|x| x.ln()).collect();
        let f: Vec<f64> = grid.iter().map(|&rho| xi.theta_rho(rho, m).map(|v| m as f64 * v)).collect::<Result<_, _>>()?;
        let equal = logs.windows(3).all(|w| rel(w[1] - w[0], w[2] - w[1]) < 1e-9);
        for i in 1..grid.len() - 1 {
            let interp = if equal {
                0.5 * (f[i - 1] + f[i + 1])
            } else {
                let lam = (logs[i] - logs[i - 1]) / (logs[i + 1] - logs[i - 1]);
                (1.0 - lam) * f[i - 1] + lam * f[i + 1]
            };
            s.require(f[i] <= interp + 1e-12 * interp.abs().max(1.0), || format!("convexity at trial {t}, rho {}", grid[i]));
        }
        for &rho in &grid {
            let lhs = 0.5 * rho * xi.rho_weighted_norm_derivative(rho)?;
            let rhs = xi.rho_degree_moment(rho)?;
            s.measure(rel(lhs, rhs), || format!("derivative identity at trial {t}, rho {rho}"));
        }
    }
    Ok(s.finish())
}

fn suite_blowup(_ctx: &Ctx) -> Result<SuiteRow, CliError> {
    let mut s = Suite::new("blowup", "restriction of (1 - w_1)^-a: divergence at a = 1, convergence at a = 1/2", 0.0);
    let harmonic = restriction_blowup_demo(1.0, 1, 30_000)?;
    let crossing = harmonic.iter().position(|&x| x > 10.0 * std::f64::consts::PI);
    s.require(crossing.is_some(), || "a = 1 partial norms stay below 10 pi up to K = 30000".into());
    let half = restriction_blowup_demo(0.5, 1, 100_000)?;
    let last = half[half.len() - 1] - half[half.len() - 2];
    s.require(last < 1e-6, || format!("a = 1/2 increment {last} at K = 100000"));
    s.worst = crossing.map(|k| k as f64).unwrap_or(f64::INFINITY);
    Ok(s.finish())
}

fn suite_perturbation(ctx: &Ctx) -> Result<SuiteRow, CliError> {
    let mut s = Suite::new("perturbation", "osculation-point corrections: zero jet, expansion, O(eps) deviation, C(eps)", ctx.cfg.tol_or(1e-12));
    let jet = match &ctx.cfg.jet {
        Some(path) => MetricJet::load(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?,
        None => MetricJet::from_json(SAMPLE_JET)?,
    };
    let n = jet.n;
    let degree = 5;
    let mut r = rng(ctx.cfg.seed.wrapping_add(11));
    let unit = BasisSpec::new(n, 1.0, degree)?;
    let base = random_section(unit, DEFAULT_DECAY, &mut r);
    let v = random_unit_tangent(n, &mut r);

    let zero = MetricJet::zero(n)?;
    let rep = curvature_full_origin(&zero, &HardySection::new(unit.with_eps(0.3), base.coeffs().to_vec())?, &v)?;
    s.require(rep.total == Complex64::new(rep.model, 0.0), || "zero jet does not reproduce the model".into());

    let grid = [0.4, 0.2, 0.1];
    let mut ratios = Vec::new();
    let mut c_values = Vec::new();
    for &eps in &grid {
        let spec = unit.with_eps(eps);
        let direct = build_q(&jet, &spec)?;
        let expanded = build_q_expanded(&jet, &spec)?;
        for j in 0..n {
            for k in 0..n {
                let a = direct[j][k].matrix(degree, degree + 2);
                let b = expanded[j][k].matrix(degree, degree + 2);
                let scale = a.iter().map(|x| x.norm()).fold(f64::MIN_POSITIVE, f64::max);
                let diff = (a - b).iter().map(|x| x.norm()).fold(0.0, f64::max) / scale;
                s.measure(diff, || format!("expansion of Q block ({}, {}) at eps {eps}", j + 1, k + 1));
            }
        }
        let xi = HardySection::new(spec, base.coeffs().to_vec())?;
        let rep = curvature_full_origin(&jet, &xi, &v)?;
        s.measure(rep.bookkeeping_residual, || format!("bookkeeping at eps {eps}"));
        ratios.push(relative_deviation(&jet, &spec, 8, ctx.cfg.seed)?.delta);
        let words = word_bound_check(&jet, &spec)?;
        s.require(words.passed, || format!("word bound {} ratio {}", words.worst_word, words.worst_ratio));
        if eps < jet.r_conv {
            let q = q_bound_check(&jet, &spec, 8, ctx.cfg.seed)?;
            s.require(q.passed, || format!("C(eps) sweep inconsistent at eps {eps}: {q:?}"));
            c_values.push(q.c_eps);
        }
    }
    for (i, h) in halving_ratios(&ratios).iter().enumerate() {
        s.require((0.3..=0.7).contains(h), || format!("uniform deviation {} -> {} gives factor {h}", ratios[i], ratios[i + 1]));
    }
    // grid is decreasing, so C must be non-increasing along it
    for w in c_values.windows(2) {
        s.require(w[1] <= w[0] * (1.0 + 1e-12) && w[0].is_finite(), || format!("C(eps) not monotone: {c_values:?}"));
    }
    Ok(s.finish())
}

type SuiteFn = fn(&Ctx) -> Result<SuiteRow, CliError>;

fn suite_fn(name: &str) -> Option<SuiteFn> {
    Some(match name {
        "moments" => suite_moments,
        "kernel" => suite_kernel,
        "connection" => suite_connection,
        "curvature" => suite_curvature,
        "gauss-codazzi" => suite_gauss_codazzi,
        "ladder-bounds" => suite_bounds,
        "split" => suite_split,
        "sandwich" => suite_sandwich,
        "rho" => suite_rho,
        "blowup" => suite_blowup,
        "perturbation" => suite_perturbation,
        _ => return None,
    })
}

pub fn run_suites(cfg: &RunConfig) -> Result<Vec<SuiteRow>, CliError> {
    let selected: Vec<String> = if cfg.suite.is_empty() {
        SUITES.iter().map(|s| s.to_string()).collect()
    } else {
        cfg.suite.clone()
    };
    let fns = selected
        .iter()
        .map(|name| {
            suite_fn(name).ok_or_else(|| CliError::Usage(format!("unknown suite '{name}' (known: {})", SUITES.join(", "))))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let ctx = Ctx { cfg, mutation: mutation(cfg)? };
    let mut rows = fns.par_iter().map(|f| f(&ctx)).collect::<Result<Vec<_>, _>>()?;
    rows.sort_by(|a, b| a.suite.cmp(&b.suite));
    rows.dedup_by(|a, b| a.suite == b.suite);
    Ok(rows)
}

pub fn run(cfg: &RunConfig) -> Result<Verdict, CliError> {
    let rows = run_suites(cfg)?;
    emit(&rows, cfg.format, cfg.out.as_deref())?;
    let mut ok = true;
    for r in rows.iter().filter(|r| !r.passed) {
        ok = false;
        eprintln!("FAILED {} ({}): {}", r.suite, r.invariant, r.detail);
    }
    Ok(ok)
}
