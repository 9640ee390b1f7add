//! The flat model: Chern connection of the Bergman bundle over `C^n` in the
//! frame `e_alpha(w - zbar)`, its curvature and a brute-force cross-check.
//!
//! In the frame the connection is constant:
//! `A_k = -eps^{-1} D_k` is the `dzbar_k` coefficient and
//! `B_j = eps^{-1} D*_j` the `dz_j` coefficient.

mod curvature;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardy::{basis_norm_coeff, BasisSpec, HardySection, MonomialOperator, OperatorSum};
use crate::multiindex::MultiIndex;
use crate::poly::SparsePoly;

pub use curvature::{
    curvature_bruteforce_operator, curvature_form_model, curvature_sandwich, interior_indices,
    CurvatureMatrix, Sandwich,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    components: Vec<Complex64>,
}

impl TangentVector {
    pub fn new(components: Vec<Complex64>) -> Self {
        TangentVector { components }
    }

    /// The coordinate vector `d/dz_axis` (0-based).
    pub fn axis(n: usize, axis: usize) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); n];
        c[axis] = Complex64::new(1.0, 0.0);
        TangentVector { components: c }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Complex64] {
        &self.components
    }

    pub fn get(&self, j: usize) -> Complex64 {
        self.components[j]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.components.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        TangentVector { components: self.components.iter().map(|c| c * s).collect() }
    }
}

/// A 1-form with section values: one section per coordinate differential.
#[derive(Clone, Debug, PartialEq)]
pub struct OneForm {
    pub components: Vec<HardySection>,
}

impl OneForm {
    pub fn component(&self, k: usize) -> &HardySection {
        &self.components[k]
    }
}

/// Deliberate single-coefficient faults in the connection, used to show
/// that the dual-path checks are not self-consistent by accident.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientMutation {
    #[default]
    None,
    /// Sign of the `dzbar` coefficient flipped.
    FlipSign01,
    /// Sign of the `dz` coefficient flipped.
    FlipSign10,
    /// `|alpha|+n+1` replaced by `|alpha|+n+2` in the `dzbar` coefficient.
    DegreeOffset01,
    /// `|alpha|+n` replaced by `|alpha|+n+1` in the `dz` coefficient.
    DegreeOffset10,
    /// `dzbar_k` lowers along the next axis instead of axis `k`.
    AxisOffset01,
    /// `dz_j` raises along the next axis instead of axis `j`.
    AxisOffset10,
}

impl CoefficientMutation {
    pub const ALL: [CoefficientMutation; 6] = [
        CoefficientMutation::FlipSign01,
        CoefficientMutation::FlipSign10,
        CoefficientMutation::DegreeOffset01,
        CoefficientMutation::DegreeOffset10,
        CoefficientMutation::AxisOffset01,
        CoefficientMutation::AxisOffset10,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CoefficientMutation::None => "none",
            CoefficientMutation::FlipSign01 => "flip-sign01",
            CoefficientMutation::FlipSign10 => "flip-sign10",
            CoefficientMutation::DegreeOffset01 => "degree-offset01",
            CoefficientMutation::DegreeOffset10 => "degree-offset10",
            CoefficientMutation::AxisOffset01 => "axis-offset01",
            CoefficientMutation::AxisOffset10 => "axis-offset10",
        }
    }
}

impl fmt::Display for CoefficientMutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CoefficientMutation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        std::iter::once(CoefficientMutation::None)
            .chain(CoefficientMutation::ALL)
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown mutation '{s}'")))
    }
}

/// `A_k`: `e_beta -> -eps^{-1} sqrt(beta_k (|beta|+n)) e_{beta - c_k}`, i.e. slot
/// `alpha` receives `-eps^{-1} sqrt((alpha_k+1)(|alpha|+n+1)) xi_{alpha+c_k}`.
pub fn connection01_operator(k: usize, spec: &BasisSpec, mutation: CoefficientMutation) -> MonomialOperator {
    let n = spec.n;
    let sign = if mutation == CoefficientMutation::FlipSign01 { 1.0 } else { -1.0 };
    let offset = if mutation == CoefficientMutation::DegreeOffset01 { 1.0 } else { 0.0 };
    let axis = if mutation == CoefficientMutation::AxisOffset01 { (k + 1) % n } else { k };
    let scale = sign / spec.eps;
    let mut shift = vec![0; n];
    shift[axis] = -1;
    MonomialOperator::from_fn(shift, move |b: &MultiIndex| {
        let c = (b.get(axis) as f64 * (b.degree() as f64 + n as f64 + offset)).sqrt();
        Complex64::new(scale * c, 0.0)
    })
}

/// `B_j`: slot `alpha` receives `eps^{-1} sqrt(alpha_j (|alpha|+n)) xi_{alpha-c_j}`.
pub fn connection10_operator(j: usize, spec: &BasisSpec, mutation: CoefficientMutation) -> MonomialOperator {
    let n = spec.n;
    let sign = if mutation == CoefficientMutation::FlipSign10 { -1.0 } else { 1.0 };
    let offset = if mutation == CoefficientMutation::DegreeOffset10 { 1.0 } else { 0.0 };
    let axis = if mutation == CoefficientMutation::AxisOffset10 { (j + 1) % n } else { j };
    let scale = sign / spec.eps;
    let mut shift = vec![0; n];
    shift[axis] = 1;
    MonomialOperator::from_fn(shift, move |b: &MultiIndex| {
        let c = ((b.get(axis) as f64 + 1.0) * (b.degree() as f64 + n as f64 + 1.0 + offset)).sqrt();
        Complex64::new(scale * c, 0.0)
    })
}

/// Zeroth-order part of `nabla^{0,1}` applied to `xi`, plus `dbar xi` when
/// the coefficient derivatives are supplied (one section per `dzbar_k`).
pub fn connection01_apply(
    xi: &HardySection,
    dbar_xi: Option<&[HardySection]>,
    mutation: CoefficientMutation,
) -> OneForm {
    let spec = *xi.spec();
    let components = (0..spec.n)
        .map(|k| {
            let mut out = OperatorSum::from(connection01_operator(k, &spec, mutation)).apply(xi, spec.degree);
            if let Some(d) = dbar_xi {
                for (o, x) in out.coeffs_mut().iter_mut().zip(d[k].coeffs()) {
                    *o += x;
                }
            }
            out
        })
        .collect();
    OneForm { components }
}

/// `nabla^{1,0}` of a constant `xi`; the output keeps degree `N + 1`.
pub fn connection10_apply(xi: &HardySection, mutation: CoefficientMutation) -> OneForm {
    let spec = *xi.spec();
    let components = (0..spec.n)
        .map(|j| OperatorSum::from(connection10_operator(j, &spec, mutation)).apply(xi, spec.degree + 1))
        .collect();
    OneForm { components }
}

/// `A u = -eps^{-1} sum_j du/dw_j dzbar_j` for a coefficient polynomial `u`
/// on the unit ball.
pub fn trivialization_connection_matrix(u: &SparsePoly<Complex64>, eps: f64) -> Vec<SparsePoly<Complex64>> {
    (0..u.nvars())
        .map(|j| u.partial(j).scale(Complex64::new(-1.0 / eps, 0.0)))
        .collect()
}

/// The matrix `A` conjugated by the unit-ball frame: `xi` is expanded into
/// its unit-ball polynomial, `A` is applied, and the result is read back in
/// frame coefficients. Agrees with [`connection01_apply`] for constant `xi`.
pub fn frame_conjugated_connection(xi: &HardySection) -> OneForm {
    let eps = xi.spec().eps;
    let unit = xi.rescale_to_unit();
    let u = unit.to_polynomial();
    let components = trivialization_connection_matrix(&u, eps)
        .iter()
        .map(|p| {
            let back = HardySection::from_polynomial(*unit.spec(), p).expect("degree drops");
            HardySection::new(*xi.spec(), back.coeffs().to_vec()).expect("same length")
        })
        .collect();
    OneForm { components }
}

/// Residual of `d/dzbar_k e_alpha(w - zbar) = -eps^{-1} sqrt(alpha_k (|alpha|+n)) e_{alpha-c_k}(w - zbar)`
/// as polynomials in `(w_1..w_n, zbar_1..zbar_n)`, relative to the largest
/// coefficient of the left side.
pub fn frame_derivative_residual(alpha: &MultiIndex, k: usize, spec: &BasisSpec) -> f64 {
    let n = spec.n;
    let frame = |a: &MultiIndex| -> SparsePoly<f64> {
        let mut p = SparsePoly::constant(2 * n, basis_norm_coeff(a, spec));
        for j in 0..n {
            let diff = SparsePoly::var(2 * n, j).sub(&SparsePoly::var(2 * n, n + j));
            p = p.mul(&diff.pow(a.get(j)));
        }
        p
    };
    let lhs = frame(alpha).partial(n + k);
    let rhs = match alpha.lowered(k) {
        Some(lower) => {
            let c = -(alpha.get(k) as f64 * (alpha.degree() as f64 + n as f64)).sqrt() / spec.eps;
            frame(&lower).scale(c)
        }
        None => SparsePoly::zero(2 * n),
    };
    lhs.max_abs_diff(&rhs) / lhs.max_abs_coeff().max(1.0)
}
