use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::assembly::{
    build_coupling, build_da01_origin, build_dbar_a10_origin, build_q, build_wedge, model_blocks,
};
use super::MetricJet;
use crate::error::{Error, Result};
use crate::hardy::{BasisSpec, HardySection, OperatorSum};
use crate::model_curvature::{curvature_form_model, TangentVector};
use crate::multiindex::sup_norm;
use crate::random::{random_section, random_unit_tangent, rng, DEFAULT_DECAY};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `sum_jk v_j conj(v_k) <B_jk xi, xi>`.
pub fn contract(blocks: &[Vec<OperatorSum>], xi: &HardySection, v: &TangentVector) -> Complex64 {
    let mut acc = ZERO;
    for (j, row) in blocks.iter().enumerate() {
        for (k, b) in row.iter().enumerate() {
            if b.terms().is_empty() {
                continue;
            }
            acc += v.get(j) * v.get(k).conj() * b.quadratic_form(xi);
        }
    }
    acc
}

fn contracted_matrix(blocks: &[Vec<DMatrix<Complex64>>], v: &TangentVector) -> DMatrix<Complex64> {
    let d = blocks[0][0].nrows();
    let mut m = DMatrix::from_element(d, d, ZERO);
    for (j, row) in blocks.iter().enumerate() {
        for (k, b) in row.iter().enumerate() {
            m += b * (v.get(j) * v.get(k).conj());
        }
    }
    m
}

/// All curvature pieces at the origin for one `(jet, eps)`.
pub struct OriginCurvature {
    pub spec: BasisSpec,
    pub model: Vec<Vec<OperatorSum>>,
    pub d_a01: Vec<Vec<OperatorSum>>,
    pub dbar_a10: Vec<Vec<OperatorSum>>,
    pub coupling: Vec<Vec<OperatorSum>>,
    pub wedge: Vec<Vec<OperatorSum>>,
    pub q: Vec<Vec<OperatorSum>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvatureReport {
    pub eps: f64,
    #[serde(rename = "N")]
    pub degree: u32,
    /// `Theta_0(xi, v)` from the closed form.
    pub model: f64,
    pub d_a01: Complex64,
    pub dbar_a10: Complex64,
    /// `[B0, A^{0,1}] + [A^{1,0}, A0]`.
    pub coupling: Complex64,
    /// `A^{1,0} ^ A^{0,1} + A^{0,1} ^ A^{1,0}`.
    pub wedge: Complex64,
    /// The `eps^{-2}` part of `wedge`, already included in it.
    pub q_part: Complex64,
    pub total: Complex64,
    /// `|total - model| / (eps^{-2} sum (|alpha|+n) |xi_alpha|^2 |v|^2)`.
    pub deviation_ratio: f64,
    /// `|total - <Theta xi, xi>|` relative to `|total|`, where `Theta` is the
    /// single summed operator, for the bookkeeping check.
    pub bookkeeping_residual: f64,
}

impl OriginCurvature {
    pub fn new(jet: &MetricJet, spec: &BasisSpec) -> Result<OriginCurvature> {
        Ok(OriginCurvature {
            spec: *spec,
            model: model_blocks(spec),
            d_a01: build_da01_origin(jet, spec)?,
            dbar_a10: build_dbar_a10_origin(jet, spec)?,
            coupling: build_coupling(jet, spec)?,
            wedge: build_wedge(jet, spec)?,
            q: build_q(jet, spec)?,
        })
    }

    /// `Theta_jk` as one operator per block.
    pub fn total_blocks(&self) -> Vec<Vec<OperatorSum>> {
        let n = self.spec.n;
        (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| {
                        self.model[j][k]
                            .add(&self.d_a01[j][k])
                            .add(&self.dbar_a10[j][k])
                            .add(&self.coupling[j][k])
                            .add(&self.wedge[j][k])
                    })
                    .collect()
            })
            .collect()
    }

    pub fn report(&self, xi: &HardySection, v: &TangentVector) -> Result<CurvatureReport> {
        let spec = xi.spec();
        if spec.n != self.spec.n || v.dim() != self.spec.n {
            return Err(Error::DimensionMismatch { expected: self.spec.n, got: spec.n.min(v.dim()) });
        }
        if spec.eps != self.spec.eps {
            return Err(Error::InvalidParameter(format!("section radius {} differs from {}", spec.eps, self.spec.eps)));
        }
        let model = curvature_form_model(xi, v);
        let d_a01 = contract(&self.d_a01, xi, v);
        let dbar_a10 = contract(&self.dbar_a10, xi, v);
        let coupling = contract(&self.coupling, xi, v);
        let wedge = contract(&self.wedge, xi, v);
        let q_part = contract(&self.q, xi, v);
        let total = Complex64::new(model, 0.0) + d_a01 + dbar_a10 + coupling + wedge;
        let eps = spec.eps;
        let scale = xi.degree_weighted_norm_sqr() * v.norm_sqr() / (eps * eps);
        let deviation_ratio = if scale > 0.0 { (total - model).norm() / scale } else { 0.0 };
        let summed = contract(&self.total_blocks(), xi, v);
        let bookkeeping_residual = (summed - total).norm() / total.norm().max(f64::MIN_POSITIVE);
        Ok(CurvatureReport {
            eps,
            degree: spec.degree,
            model,
            d_a01,
            dbar_a10,
            coupling,
            wedge,
            q_part,
            total,
            deviation_ratio,
            bookkeeping_residual,
        })
    }
}

/// The full curvature form at the origin, decomposed into its pieces.
pub fn curvature_full_origin(jet: &MetricJet, xi: &HardySection, v: &TangentVector) -> Result<CurvatureReport> {
    OriginCurvature::new(jet, xi.spec())?.report(xi, v)
}

/// `r[i+1] / r[i]` for consecutive grid values.
pub fn halving_ratios(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| w[1] / w[0]).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SigmaReport {
    pub eps: f64,
    #[serde(rename = "N")]
    pub degree: u32,
    pub trials: usize,
    /// `max |<dA^{0,1} xi, xi>_v| / (eps^{-1} sum (|alpha|+n)|xi_alpha|^2)` over unit `v`.
    pub worst_ratio: f64,
    pub bound: f64,
    pub passed: bool,
}

/// A priori bound for the ratio of [`SigmaReport`]:
/// `sum |c_{jk,m,mu}| eps^|mu| (1 + mu_m s_{mu - c_m} / (n s_mu))`.
pub fn sigma_bound(jet: &MetricJet, eps: f64) -> f64 {
    let n = jet.n as f64;
    jet.c
        .iter()
        .map(|e| {
            let mult = match e.mu.lowered(e.m) {
                Some(lower) => e.mu.get(e.m) as f64 * sup_norm(&lower) / (n * sup_norm(&e.mu)),
                None => 0.0,
            };
            e.value.norm() * eps.powi(e.mu.degree() as i32) * (1.0 + mult)
        })
        .sum()
}

pub fn sigma_bound_check(jet: &MetricJet, spec: &BasisSpec, trials: usize, seed: u64) -> Result<SigmaReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let p = build_da01_origin(jet, spec)?;
    let mut r = rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let xi = random_section(*spec, DEFAULT_DECAY, &mut r);
        let v = random_unit_tangent(spec.n, &mut r);
        let s = xi.degree_weighted_norm_sqr() / spec.eps;
        worst = worst.max(contract(&p, &xi, &v).norm() / s);
    }
    let bound = sigma_bound(jet, spec.eps);
    Ok(SigmaReport {
        eps: spec.eps,
        degree: spec.degree,
        trials,
        worst_ratio: worst,
        bound,
        passed: worst.is_finite() && worst <= bound * (1.0 + 1e-9) + 1e-300,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QBoundReport {
    pub eps: f64,
    #[serde(rename = "N")]
    pub degree: u32,
    /// Measured `C(eps)`: the largest `|eigenvalue|` of `W^{-1/2} Q_v W^{-1/2}`
    /// on degree `<= N` with `W = diag(|alpha|+n)`, over the sampled `v`.
    pub c_eps: f64,
    pub basis_sup: f64,
    pub random_sup: f64,
    pub hermitian_defect: f64,
    pub passed: bool,
}

/// Measures `C(eps)` with `|<Q xi, xi>| <= C(eps) sum (|alpha|+n)|xi_alpha|^2 |v|^2`.
pub fn q_bound_check(jet: &MetricJet, spec: &BasisSpec, trials: usize, seed: u64) -> Result<QBoundReport> {
    if spec.eps >= jet.r_conv {
        return Err(Error::InvalidParameter(format!(
            "eps = {} must be below the convergence radius {}",
            spec.eps, jet.r_conv
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let n = spec.n;
    let q = build_q(jet, spec)?;
    let mats: Vec<Vec<DMatrix<Complex64>>> = q
        .iter()
        .map(|row| row.iter().map(|b| b.matrix(spec.degree, spec.degree)).collect())
        .collect();
    let indices = spec.indices();
    let weights: Vec<f64> = indices.iter().map(|a| a.degree() as f64 + n as f64).collect();
    let inv_sqrt = DVector::from_iterator(weights.len(), weights.iter().map(|w| Complex64::new(w.powf(-0.5), 0.0)));

    let mut r = rng(seed);
    let mut vs: Vec<TangentVector> = (0..n).map(|j| TangentVector::axis(n, j)).collect();
    vs.extend((0..trials).map(|_| random_unit_tangent(n, &mut r)));

    let mut report = QBoundReport {
        eps: spec.eps,
        degree: spec.degree,
        c_eps: 0.0,
        basis_sup: 0.0,
        random_sup: 0.0,
        hermitian_defect: 0.0,
        passed: true,
    };
    for v in &vs {
        let m = contracted_matrix(&mats, v);
        let defect = (&m - m.adjoint()).iter().map(|x| x.norm()).fold(0.0, f64::max);
        report.hermitian_defect = report.hermitian_defect.max(defect);
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let scaled = DMatrix::from_fn(h.nrows(), h.ncols(), |i, j| h[(i, j)] * inv_sqrt[i] * inv_sqrt[j]);
        let eig = scaled.symmetric_eigenvalues();
        let sup = eig.iter().map(|x| x.abs()).fold(0.0, f64::max);
        report.c_eps = report.c_eps.max(sup);
        for (i, w) in weights.iter().enumerate() {
            report.basis_sup = report.basis_sup.max(m[(i, i)].norm() / w);
        }
    }
    for t in 0..trials {
        let xi = random_section(*spec, DEFAULT_DECAY, &mut r);
        let v = &vs[n + (t % trials)];
        let val = contract(&q, &xi, v).norm();
        report.random_sup = report.random_sup.max(val / xi.degree_weighted_norm_sqr());
    }
    let tol = 1e-9 * report.c_eps.max(1.0);
    report.passed = report.c_eps.is_finite()
        && report.basis_sup <= report.c_eps + tol
        && report.random_sup <= report.c_eps + tol;
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DeviationReport {
    pub eps: f64,
    #[serde(rename = "N")]
    pub degree: u32,
    /// `sup_v ||M_v^{-1/2} (Theta_v - M_v) M_v^{-1/2}||` on degree `<= N`, with
    /// `M_v` the contracted model curvature and `Theta_v` the full one.
    pub delta: f64,
}

/// Uniform relative deviation of the full curvature from the model on `V_N`,
/// over the axes and `trials` seeded unit directions.
pub fn relative_deviation(jet: &MetricJet, spec: &BasisSpec, trials: usize, seed: u64) -> Result<DeviationReport> {
    let oc = OriginCurvature::new(jet, spec)?;
    let to_mats = |blocks: &[Vec<OperatorSum>]| -> Vec<Vec<DMatrix<Complex64>>> {
        blocks
            .iter()
            .map(|row| row.iter().map(|b| b.matrix(spec.degree, spec.degree)).collect())
            .collect()
    };
    let model = to_mats(&oc.model);
    let total = to_mats(&oc.total_blocks());
    let n = spec.n;
    let mut r = rng(seed);
    let mut vs: Vec<TangentVector> = (0..n).map(|j| TangentVector::axis(n, j)).collect();
    vs.extend((0..trials).map(|_| random_unit_tangent(n, &mut r)));
    let mut delta: f64 = 0.0;
    for v in &vs {
        let m = contracted_matrix(&model, v);
        let d = contracted_matrix(&total, v) - &m;
        let l_inv = m
            .cholesky()
            .ok_or_else(|| Error::InvalidParameter("model curvature is not positive definite".into()))?
            .l()
            .try_inverse()
            .ok_or_else(|| Error::InvalidParameter("singular model curvature".into()))?;
        let scaled = &l_inv * d * l_inv.adjoint();
        delta = delta.max(scaled.singular_values().max());
    }
    Ok(DeviationReport { eps: spec.eps, degree: spec.degree, delta })
}
