use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::{connection01_operator, connection10_operator, CoefficientMutation, TangentVector};
use crate::hardy::{BasisSpec, HardySection, OperatorSum};
use crate::multiindex::{enumerate, MultiIndex};

/// Closed-form curvature quadratic form of the model bundle,
/// `eps^{-2} sum_alpha ( |sum_j sqrt(alpha_j) xi_{alpha-c_j} v_j|^2
///   + sum_j (|alpha|+n) |xi_alpha|^2 |v_j|^2 )`.
pub fn curvature_form_model(xi: &HardySection, v: &TangentVector) -> f64 {
    let spec = xi.spec();
    let n = spec.n;
    let mut first = 0.0;
    for alpha in enumerate(n, spec.degree + 1).expect("n >= 1") {
        let mut s = Complex64::new(0.0, 0.0);
        for j in 0..n {
            if let Some(lower) = alpha.lowered(j) {
                s += (alpha.get(j) as f64).sqrt() * xi.get(&lower) * v.get(j);
            }
        }
        first += s.norm_sqr();
    }
    let second = xi.degree_weighted_norm_sqr() * v.norm_sqr();
    (first + second) / (spec.eps * spec.eps)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sandwich {
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
}

impl Sandwich {
    pub fn holds(&self, rel: f64) -> bool {
        let slack = rel * self.upper.abs().max(f64::MIN_POSITIVE);
        self.lower <= self.value + slack && self.value <= self.upper + slack
    }
}

/// `L <= Q <= 2L` with `L = eps^{-2} sum_alpha sum_j (|alpha|+n) |xi_alpha|^2 |v_j|^2`.
pub fn curvature_sandwich(xi: &HardySection, v: &TangentVector) -> Sandwich {
    let eps = xi.spec().eps;
    let lower = xi.degree_weighted_norm_sqr() * v.norm_sqr() / (eps * eps);
    Sandwich { lower, value: curvature_form_model(xi, v), upper: 2.0 * lower }
}

/// Curvature blocks `Theta_jk` (coefficient of `dz_j ^ dzbar_k`) on the
/// truncated space of degree `<= N`.
#[derive(Clone, Debug)]
pub struct CurvatureMatrix {
    pub spec: BasisSpec,
    /// `blocks[j][k]`, square of size `binomial(N+n, n)`.
    pub blocks: Vec<Vec<DMatrix<Complex64>>>,
}

impl CurvatureMatrix {
    pub fn block(&self, j: usize, k: usize) -> &DMatrix<Complex64> {
        &self.blocks[j][k]
    }

    /// `sum_jk v_j conj(v_k) <Theta_jk xi, xi>`.
    pub fn quadratic_form(&self, xi: &HardySection, v: &TangentVector) -> Complex64 {
        let x = nalgebra::DVector::from_column_slice(&xi.coeffs()[..self.spec.dim()]);
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..self.spec.n {
            for k in 0..self.spec.n {
                let t = (x.adjoint() * self.block(j, k) * &x)[(0, 0)];
                acc += v.get(j) * v.get(k).conj() * t;
            }
        }
        acc
    }

    /// The contracted matrix `sum_jk v_j conj(v_k) Theta_jk`.
    pub fn contracted(&self, v: &TangentVector) -> DMatrix<Complex64> {
        let d = self.spec.dim();
        let mut m = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
        for j in 0..self.spec.n {
            for k in 0..self.spec.n {
                m += self.block(j, k) * (v.get(j) * v.get(k).conj());
            }
        }
        m
    }

    /// Largest `||Theta_jk^* - Theta_kj||` entry over all pairs.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.spec.n {
            for k in 0..self.spec.n {
                let d = self.block(j, k).adjoint() - self.block(k, j);
                worst = worst.max(d.iter().map(|c| c.norm()).fold(0.0, f64::max));
            }
        }
        worst
    }

    /// JSON with one sparse triplet list per block; axes are 1-based.
    pub fn to_json(&self) -> serde_json::Value {
        let indices = self.spec.indices();
        let mut blocks = Vec::new();
        for j in 0..self.spec.n {
            for k in 0..self.spec.n {
                let b = self.block(j, k);
                let mut entries = Vec::new();
                for (col, a_in) in indices.iter().enumerate() {
                    for (row, a_out) in indices.iter().enumerate() {
                        let c = b[(row, col)];
                        if c.norm() > 0.0 {
                            entries.push(serde_json::json!([a_in, a_out, c.re, c.im]));
                        }
                    }
                }
                blocks.push(serde_json::json!({"j": j + 1, "k": k + 1, "entries": entries}));
            }
        }
        serde_json::json!({
            "n": self.spec.n,
            "eps": self.spec.eps,
            "N": self.spec.degree,
            "blocks": blocks,
        })
    }
}

/// `Theta_jk = B_j A_k - A_k B_j`, multiplying dense connection matrices on
/// the guard space of degree `N + 2` and restricting to degree `<= N`.
pub fn curvature_bruteforce_operator(spec: &BasisSpec, mutation: CoefficientMutation) -> CurvatureMatrix {
    let guard = spec.degree + 2;
    let d = spec.dim();
    let a: Vec<DMatrix<Complex64>> = (0..spec.n)
        .map(|k| OperatorSum::from(connection01_operator(k, spec, mutation)).matrix(guard, guard))
        .collect();
    let b: Vec<DMatrix<Complex64>> = (0..spec.n)
        .map(|j| OperatorSum::from(connection10_operator(j, spec, mutation)).matrix(guard, guard))
        .collect();
    let blocks = (0..spec.n)
        .map(|j| {
            (0..spec.n)
                .map(|k| {
                    let full = &b[j] * &a[k] - &a[k] * &b[j];
                    full.view((0, 0), (d, d)).into_owned()
                })
                .collect()
        })
        .collect();
    CurvatureMatrix { spec: *spec, blocks }
}

/// Interior basis indices `|alpha| <= N - 1` on which no guard output was lost.
pub fn interior_indices(spec: &BasisSpec) -> Vec<MultiIndex> {
    spec.indices().into_iter().filter(|a| a.degree() < spec.degree.max(1)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_section, random_tangent, rng, DEFAULT_DECAY};

    #[test]
    fn model_form_examples() {
        let spec = BasisSpec::new(1, 1.0, 4).unwrap();
        let v = TangentVector::axis(1, 0);
        for k in 0..4u32 {
            let e = HardySection::basis(spec, &MultiIndex::from([k]));
            assert!((curvature_form_model(&e, &v) - 2.0 * (k as f64 + 1.0)).abs() < 1e-13);
        }
        let spec2 = BasisSpec::new(2, 1.0, 2).unwrap();
        let e0 = HardySection::basis(spec2, &MultiIndex::zero(2));
        assert!((curvature_form_model(&e0, &TangentVector::axis(2, 0)) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn sandwich_examples() {
        let spec = BasisSpec::new(1, 0.5, 3).unwrap();
        let e = HardySection::basis(spec, &MultiIndex::from([2]));
        let s = curvature_sandwich(&e, &TangentVector::axis(1, 0));
        assert!((s.value - s.upper).abs() < 1e-12 * s.upper);
        let z = curvature_sandwich(&HardySection::zero(spec), &TangentVector::axis(1, 0));
        assert_eq!((z.lower, z.value, z.upper), (0.0, 0.0, 0.0));
    }

    #[test]
    fn bruteforce_n1_diagonal() {
        let spec = BasisSpec::new(1, 1.0, 6).unwrap();
        let c = curvature_bruteforce_operator(&spec, CoefficientMutation::None);
        for (i, a) in spec.indices().iter().enumerate() {
            let want = 2.0 * (a.get(0) as f64 + 1.0);
            assert!((c.block(0, 0)[(i, i)].re - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn bruteforce_matches_closed_form_for_random_sections() {
        for n in 1..=3 {
            let spec = BasisSpec::new(n, 0.3, 4).unwrap();
            let c = curvature_bruteforce_operator(&spec, CoefficientMutation::None);
            assert!(c.hermitian_defect() < 1e-10);
            let mut r = rng(40 + n as u64);
            for _ in 0..5 {
                let xi = random_section(spec, DEFAULT_DECAY, &mut r);
                let v = random_tangent(n, &mut r);
                let q = c.quadratic_form(&xi, &v);
                let m = curvature_form_model(&xi, &v);
                assert!((q.re - m).abs() < 1e-10 * m && q.im.abs() < 1e-10 * m);
            }
        }
    }

    #[test]
    fn json_has_one_based_axes() {
        let spec = BasisSpec::new(2, 1.0, 1).unwrap();
        let j = curvature_bruteforce_operator(&spec, CoefficientMutation::None).to_json();
        assert_eq!(j["blocks"][0]["j"], 1);
        assert_eq!(j["blocks"].as_array().unwrap().len(), 4);
    }
}
