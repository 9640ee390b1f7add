use bergman_core::gram_oracle::mc_moment;
use bergman_core::hardy::{bergman_kernel_closed, bergman_kernel_series, BasisSpec, HardySection};
use bergman_core::model_curvature::{
    curvature_bruteforce_operator, curvature_form_model, curvature_sandwich, interior_indices,
    CoefficientMutation, TangentVector,
};
use bergman_core::multiindex::{ball_moment, enumerate};
use bergman_core::perturbation::{halving_ratios, q_bound_check, relative_deviation, MetricJet, OriginCurvature};
use bergman_core::random::{random_section, random_unit_tangent, rng, DEFAULT_DECAY};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::emit;
use crate::{CliError, Verdict};

#[derive(Serialize)]
struct MomentRow {
    n: usize,
    eps: f64,
    alpha: String,
    degree: u32,
    exact: String,
    exact_value: f64,
    mc_estimate: Option<f64>,
    mc_std_error: Option<f64>,
    mc_within_3se: Option<bool>,
}

pub fn moments(cfg: &RunConfig) -> Result<Verdict, CliError> {
    let mut rows = Vec::new();
    for n in cfg.n_or(&[1, 2, 3]) {
        for degree in cfg.degree_or(&[6]) {
            for eps in cfg.eps_or(&[1.0]) {
                for (i, alpha) in enumerate(n, degree)?.iter().enumerate() {
                    let exact = ball_moment(alpha, eps)?;
                    let value = exact.to_f64();
                    let mc = match cfg.mc {
                        Some(samples) => Some(mc_moment(alpha, eps, samples, cfg.seed.wrapping_add(i as u64))?),
                        None => None,
                    };
                    rows.push(MomentRow {
                        n,
                        eps,
                        alpha: alpha.to_string(),
                        degree: alpha.degree(),
                        exact: exact.to_string(),
                        exact_value: value,
                        mc_estimate: mc.map(|m| m.estimate),
                        mc_std_error: mc.map(|m| m.std_error),
                        mc_within_3se: mc.map(|m| m.within(value, 3.0)),
                    });
                }
            }
        }
    }
    emit(&rows, cfg.format, cfg.out.as_deref())?;
    Ok(true)
}

#[derive(Serialize)]
struct KernelRow {
    n: usize,
    radius: f64,
    #[serde(rename = "N")]
    degree: u32,
    closed: f64,
    series: f64,
    rel_residual: f64,
}

pub fn kernel(cfg: &RunConfig) -> Result<Verdict, CliError> {
    let radii = if cfg.radii.is_empty() { vec![0.0, 0.25, 0.5] } else { cfg.radii.clone() };
    let mut rows = Vec::new();
    for n in cfg.n_or(&[1, 2]) {
        for degree in cfg.degree_or(&[40]) {
            for &r in &radii {
                let w = vec![Complex64::new(r / (n as f64).sqrt(), 0.0); n];
                let closed = bergman_kernel_closed(n, &w)?;
                let series = bergman_kernel_series(n, &w, degree)?;
                rows.push(KernelRow { n, radius: r, degree, closed, series, rel_residual: (closed - series).abs() / closed });
            }
        }
    }
    emit(&rows, cfg.format, cfg.out.as_deref())?;
    Ok(true)
}

#[derive(Serialize)]
struct CurvatureRow {
    n: usize,
    #[serde(rename = "N")]
    degree: u32,
    eps: f64,
    alpha: String,
    v_axis: usize,
    value: f64,
    lower: f64,
    upper: f64,
    bruteforce: f64,
    residual: f64,
}

pub fn curvature(cfg: &RunConfig) -> Result<Verdict, CliError> {
    let mutation = mutation(cfg)?;
    let mut rows = Vec::new();
    for n in cfg.n_or(&[1, 2, 3]) {
        for degree in cfg.degree_or(&[6]) {
            for eps in cfg.eps_or(&[0.3, 1.0]) {
                let spec = BasisSpec::new(n, eps, degree)?;
                let brute = curvature_bruteforce_operator(&spec, mutation);
                for alpha in interior_indices(&spec) {
                    let xi = HardySection::basis(spec, &alpha);
                    for axis in 0..n {
                        let v = TangentVector::axis(n, axis);
                        let s = curvature_sandwich(&xi, &v);
                        let b = brute.quadratic_form(&xi, &v).re;
                        let value = curvature_form_model(&xi, &v);
                        rows.push(CurvatureRow {
                            n,
                            degree,
                            eps,
                            alpha: alpha.to_string(),
                            v_axis: axis + 1,
                            value,
                            lower: s.lower,
                            upper: s.upper,
                            bruteforce: b,
                            residual: (b - value).abs() / value.abs(),
                        });
                    }
                }
            }
        }
    }
    emit(&rows, cfg.format, cfg.out.as_deref())?;
    Ok(true)
}

pub fn mutation(cfg: &RunConfig) -> Result<CoefficientMutation, CliError> {
    match &cfg.mutate {
        Some(name) => name.parse().map_err(|e: bergman_core::Error| CliError::Usage(e.to_string())),
        None => Ok(CoefficientMutation::None),
    }
}

#[derive(Serialize)]
struct PerturbRow {
    eps: f64,
    #[serde(rename = "N")]
    degree: u32,
    model: f64,
    d_a01_re: f64,
    d_a01_im: f64,
    dbar_a10_re: f64,
    dbar_a10_im: f64,
    coupling_re: f64,
    coupling_im: f64,
    wedge_re: f64,
    wedge_im: f64,
    q_part_re: f64,
    q_part_im: f64,
    total_re: f64,
    total_im: f64,
    deviation_ratio: f64,
    uniform_deviation: f64,
    halving: Option<f64>,
    c_eps: Option<f64>,
}

pub fn perturb(cfg: &RunConfig) -> Result<Verdict, CliError> {
    let path = cfg.jet.as_ref().ok_or_else(|| CliError::Usage("perturb needs --jet <file>".into()))?;
    let jet = MetricJet::load(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let degree = cfg.degree_or(&[6])[0];
    let mut grid = cfg.eps_or(&[0.4, 0.2, 0.1]);
    grid.sort_by(|a, b| b.total_cmp(a));

    let unit = BasisSpec::new(jet.n, 1.0, degree)?;
    let mut r = rng(cfg.seed);
    let base = random_section(unit, DEFAULT_DECAY, &mut r);
    let v = random_unit_tangent(jet.n, &mut r);

    let mut rows: Vec<PerturbRow> = Vec::new();
    for &eps in &grid {
        let spec = unit.with_eps(eps);
        let xi = HardySection::new(spec, base.coeffs().to_vec())?;
        let rep = OriginCurvature::new(&jet, &spec)?.report(&xi, &v)?;
        let uniform = relative_deviation(&jet, &spec, cfg.trials.min(8), cfg.seed)?.delta;
        let c_eps = if eps < jet.r_conv { Some(q_bound_check(&jet, &spec, cfg.trials.min(8), cfg.seed)?.c_eps) } else { None };
        rows.push(PerturbRow {
            eps,
            degree,
            model: rep.model,
            d_a01_re: rep.d_a01.re,
            d_a01_im: rep.d_a01.im,
            dbar_a10_re: rep.dbar_a10.re,
            dbar_a10_im: rep.dbar_a10.im,
            coupling_re: rep.coupling.re,
            coupling_im: rep.coupling.im,
            wedge_re: rep.wedge.re,
            wedge_im: rep.wedge.im,
            q_part_re: rep.q_part.re,
            q_part_im: rep.q_part.im,
            total_re: rep.total.re,
            total_im: rep.total.im,
            deviation_ratio: rep.deviation_ratio,
            uniform_deviation: uniform,
            halving: None,
            c_eps,
        });
    }
    let ratios: Vec<f64> = rows.iter().map(|r| r.uniform_deviation).collect();
    for (row, h) in rows.iter_mut().skip(1).zip(halving_ratios(&ratios)) {
        row.halving = Some(h);
    }
    emit(&rows, cfg.format, cfg.out.as_deref())?;
    let summary: Vec<String> = rows.iter().filter_map(|r| r.halving.map(|h| format!("{h:.4}"))).collect();
    eprintln!("uniform deviation factor per eps step: [{}]", summary.join(", "));
    Ok(true)
}
