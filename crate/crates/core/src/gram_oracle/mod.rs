//! Independent curvature oracle built from first principles: the Gram
//! matrix of the monomial sections `w^beta` over the moving fibers
//! `|w - zbar| < eps`, expanded exactly as a polynomial in `(z, zbar)`,
//! and the curvature of the finite-rank subbundle they span.

mod dual;
mod monte_carlo;

use std::collections::BTreeMap;
use std::io::Write;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hardy::{BasisSpec, HardySection};
use crate::model_curvature::{
    connection10_apply, curvature_bruteforce_operator, CoefficientMutation, CurvatureMatrix, TangentVector,
};
use crate::multiindex::{enumerate, exact_radius, unit_ball_moment_ratio, ExactScalar, MultiIndex};

pub use monte_carlo::{mc_moment, mc_moment_batch, McEstimate, MIN_SAMPLES};

use dual::Dual;

/// `h_{beta gamma}(z) = int_{|w - zbar| < eps} w^beta conj(w)^gamma`, stored as
/// `pi^n` times a rational polynomial in `(z, zbar)`.
#[derive(Clone, Debug)]
pub struct GramPolynomial {
    pub n: usize,
    pub degree: u32,
    pub eps: f64,
    /// Largest total degree in `(z, zbar)` retained.
    pub order: u32,
    frame: Vec<MultiIndex>,
    /// `entries[b][g]` maps `(z exponent, zbar exponent)` to the rational factor.
    entries: Vec<Vec<BTreeMap<(MultiIndex, MultiIndex), BigRational>>>,
}

fn binomial_multi(top: &MultiIndex, bottom: &MultiIndex) -> BigInt {
    top.exponents()
        .iter()
        .zip(bottom.exponents())
        .map(|(&t, &b)| BigInt::from(crate::multiindex::binomial(t as usize, b as usize)))
        .product()
}

/// Gram polynomial of `{w^beta : |beta| <= N}`, obtained by writing
/// `w = zbar + u` and integrating `u^p conj(u)^q` against the centred ball:
/// `h_{beta gamma} = sum_{p <= beta, gamma} C(beta,p) C(gamma,p) m(p) zbar^{beta-p} z^{gamma-p}`.
pub fn monomial_gram(n: usize, degree: u32, eps: f64, order: u32) -> Result<GramPolynomial> {
    if order < 2 {
        return Err(Error::InvalidParameter(format!("order {order} < 2")));
    }
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    // m(p) = eps^{2|p|+2n} pi^n p!/(|p|+n)!, with the pi^n factored out
    let eps2 = {
        let r = exact_radius(eps)?;
        &r * &r
    };
    let frame = enumerate(n, degree)?;
    let moment = |p: &MultiIndex| -> BigRational {
        num_traits::pow(eps2.clone(), p.degree() as usize + n) * unit_ball_moment_ratio(p)
    };
    let entries = frame
        .iter()
        .map(|beta| {
            frame
                .iter()
                .map(|gamma| {
                    let mut terms = BTreeMap::new();
                    for p in enumerate(n, beta.degree().min(gamma.degree())).expect("n >= 1") {
                        if !(p.le(beta) && p.le(gamma)) {
                            continue;
                        }
                        let zbar = beta.checked_sub(&p).expect("p <= beta");
                        let z = gamma.checked_sub(&p).expect("p <= gamma");
                        if z.degree() + zbar.degree() > order {
                            continue;
                        }
                        let c = BigRational::from_integer(binomial_multi(beta, &p) * binomial_multi(gamma, &p))
                            * moment(&p);
                        terms.insert((z, zbar), c);
                    }
                    terms
                })
                .collect()
        })
        .collect();
    Ok(GramPolynomial { n, degree, eps, order, frame, entries })
}

impl GramPolynomial {
    pub fn frame(&self) -> &[MultiIndex] {
        &self.frame
    }

    pub fn rank(&self) -> usize {
        self.frame.len()
    }

    /// Coefficient of `z^a zbar^b` in `h_{beta gamma}`.
    pub fn coefficient(&self, beta: usize, gamma: usize, z: &MultiIndex, zbar: &MultiIndex) -> ExactScalar {
        let r = self.entries[beta][gamma]
            .get(&(z.clone(), zbar.clone()))
            .cloned()
            .unwrap_or_else(BigRational::zero);
        ExactScalar::new(r, self.n as i32)
    }

    fn rational(&self, beta: usize, gamma: usize, z: &MultiIndex, zbar: &MultiIndex) -> BigRational {
        self.entries[beta][gamma]
            .get(&(z.clone(), zbar.clone()))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// `h(z)` evaluated numerically.
    pub fn evaluate(&self, z: &[Complex64]) -> DMatrix<Complex64> {
        let r = self.rank();
        let pi_n = std::f64::consts::PI.powi(self.n as i32);
        DMatrix::from_fn(r, r, |b, g| {
            self.entries[b][g]
                .iter()
                .map(|((za, zb), c)| {
                    let mut t = Complex64::new(c.to_f64().unwrap_or(f64::NAN) * pi_n, 0.0);
                    for j in 0..self.n {
                        t *= z[j].powu(za.get(j)) * z[j].conj().powu(zb.get(j));
                    }
                    t
                })
                .sum()
        })
    }

    /// Largest deviation from `h_{bg}(z) = conj(h_{gb}(z))` in coefficients.
    pub fn is_hermitian(&self) -> bool {
        let r = self.rank();
        (0..r).all(|b| {
            (0..r).all(|g| {
                self.entries[b][g]
                    .iter()
                    .all(|((za, zb), c)| self.entries[g][b].get(&(zb.clone(), za.clone())) == Some(c))
                    && self.entries[b][g].len() == self.entries[g][b].len()
            })
        })
    }
}

/// Curvature of the subbundle spanned by the monomial sections, at `z = 0`,
/// in the frame orthonormalised at the origin (which is exactly `e_beta`).
#[derive(Clone, Debug)]
pub struct SubbundleCurvature {
    pub spec: BasisSpec,
    /// Exact rational blocks in the holomorphic frame, `[j][k][beta][gamma]`,
    /// as `-(H11 H0^{-1} - H10 H0^{-1} H01 H0^{-1})`.
    exact: Vec<Vec<Vec<Vec<BigRational>>>>,
    /// Endomorphism blocks in the orthonormal frame.
    pub blocks: Vec<Vec<DMatrix<Complex64>>>,
    /// `-d_j dbar_k log det h` at the origin, computed from the determinant.
    pub log_det_hessian: Vec<Vec<BigRational>>,
}

impl SubbundleCurvature {
    pub fn block(&self, j: usize, k: usize) -> &DMatrix<Complex64> {
        &self.blocks[j][k]
    }

    /// `sum_jk v_j conj(v_k) <Theta_jk xi, xi>`.
    pub fn quadratic_form(&self, xi: &HardySection, v: &TangentVector) -> f64 {
        let x = nalgebra::DVector::from_column_slice(&xi.coeffs()[..self.spec.dim()]);
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..self.spec.n {
            for k in 0..self.spec.n {
                acc += v.get(j) * v.get(k).conj() * (x.adjoint() * self.block(j, k) * &x)[(0, 0)];
            }
        }
        acc.re
    }

    /// Exact trace of block `(j, k)`.
    pub fn trace_exact(&self, j: usize, k: usize) -> BigRational {
        let m = &self.exact[j][k];
        (0..m.len()).map(|b| m[b][b].clone()).sum()
    }

    /// Exact equality of the trace with the log-determinant Hessian, for every pair.
    pub fn trace_identity_holds(&self) -> bool {
        (0..self.spec.n)
            .all(|j| (0..self.spec.n).all(|k| self.trace_exact(j, k) == self.log_det_hessian[j][k]))
    }

    /// Largest float discrepancy between the two trace computations.
    pub fn trace_identity_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.spec.n {
            for k in 0..self.spec.n {
                let diff = (self.trace_exact(j, k) - &self.log_det_hessian[j][k]).to_f64().unwrap_or(f64::NAN);
                worst = worst.max(diff.abs());
            }
        }
        worst
    }
}

/// Subbundle curvature at the origin from the exact Taylor data of
/// [`monomial_gram`]: with `h = H0 + z_j H10 + zbar_k H01 + z_j zbar_k H11 + ...`,
/// the connection `theta = transpose(dh h^{-1})` gives
/// `Theta_jk = -transpose(H11 H0^{-1} - H10 H0^{-1} H01 H0^{-1})`.
pub fn subbundle_curvature_at_origin(n: usize, degree: u32, eps: f64) -> Result<SubbundleCurvature> {
    let spec = BasisSpec::new(n, eps, degree)?;
    let gram = monomial_gram(n, degree, eps, 2)?;
    let r = gram.rank();
    let zero = MultiIndex::zero(n);
    let h0: Vec<BigRational> = (0..r).map(|b| gram.rational(b, b, &zero, &zero)).collect();
    if h0.iter().any(|x| x.is_zero()) {
        return Err(Error::SingularGram);
    }
    let offdiag = (0..r).any(|b| (0..r).any(|g| b != g && !gram.rational(b, g, &zero, &zero).is_zero()));
    if offdiag {
        return Err(Error::SingularGram);
    }
    let taylor = |j: usize, k: usize| {
        let cj = MultiIndex::unit(n, j);
        let ck = MultiIndex::unit(n, k);
        let h10 = table(r, |b, g| gram.rational(b, g, &cj, &zero));
        let h01 = table(r, |b, g| gram.rational(b, g, &zero, &ck));
        let h11 = table(r, |b, g| gram.rational(b, g, &cj, &ck));
        (h10, h01, h11)
    };

    let mut exact = Vec::with_capacity(n);
    let mut blocks = Vec::with_capacity(n);
    let mut log_det_hessian = Vec::with_capacity(n);
    for j in 0..n {
        let mut ex_row = Vec::with_capacity(n);
        let mut bl_row = Vec::with_capacity(n);
        let mut ld_row = Vec::with_capacity(n);
        for k in 0..n {
            let (h10, h01, h11) = taylor(j, k);
            // E = -(H11 H0^{-1} - H10 H0^{-1} H01 H0^{-1}); H0 is diagonal
            let e = table(r, |b, g| {
                let mut s = &h11[b][g] / &h0[g];
                for m in 0..r {
                    if h10[b][m].is_zero() || h01[m][g].is_zero() {
                        continue;
                    }
                    s -= &h10[b][m] * &h01[m][g] / (&h0[m] * &h0[g]);
                }
                -s
            });
            // endomorphism on orthonormal-frame coefficients:
            // F[b][g] = E[g][b] sqrt(H0_b / H0_g)
            let f = DMatrix::from_fn(r, r, |b, g| {
                let scale = (h0[b].to_f64().unwrap_or(f64::NAN) / h0[g].to_f64().unwrap_or(f64::NAN)).sqrt();
                Complex64::new(e[g][b].to_f64().unwrap_or(f64::NAN) * scale, 0.0)
            });
            let det = dual::determinant(
                (0..r)
                    .map(|b| {
                        (0..r)
                            .map(|g| {
                                let c = if b == g { h0[b].clone() } else { BigRational::zero() };
                                Dual::new(c, h10[b][g].clone(), h01[b][g].clone(), h11[b][g].clone())
                            })
                            .collect()
                    })
                    .collect(),
            )?;
            ld_row.push(-det.log_mixed_derivative()?);
            ex_row.push(e);
            bl_row.push(f);
        }
        exact.push(ex_row);
        blocks.push(bl_row);
        log_det_hessian.push(ld_row);
    }
    Ok(SubbundleCurvature { spec, exact, blocks, log_det_hessian })
}

fn table<F: Fn(usize, usize) -> BigRational>(r: usize, f: F) -> Vec<Vec<BigRational>> {
    (0..r).map(|b| (0..r).map(|g| f(b, g)).collect()).collect()
}

/// `|beta(xi) v|^2 = eps^{-2} sum_{|alpha| = N+1} |sum_j sqrt(alpha_j(|alpha|+n)) xi_{alpha-c_j} v_j|^2`,
/// read off as the degree `N + 1` overflow of `nabla^{1,0} xi`.
pub fn second_fundamental_correction(
    xi: &HardySection,
    v: &TangentVector,
    mutation: CoefficientMutation,
) -> f64 {
    let top = xi.spec().degree + 1;
    let form = connection10_apply(xi, mutation);
    let mut contracted = HardySection::zero(*form.component(0).spec());
    for j in 0..xi.spec().n {
        for (o, x) in contracted.coeffs_mut().iter_mut().zip(form.component(j).coeffs()) {
            *o += x * v.get(j);
        }
    }
    contracted
        .iter()
        .filter(|(a, _)| a.degree() == top)
        .map(|(_, c)| c.norm_sqr())
        .sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct GaussCodazzi {
    pub model: f64,
    pub correction: f64,
    pub subbundle: f64,
    /// `|model - correction - subbundle| / max(|model|, |correction|, |subbundle|)`.
    pub residual: f64,
}

/// Compares `Theta_sub(xi; v)` with `Q_model(xi, v) - |beta(xi) v|^2`, where
/// `Q_model` comes from composing the (possibly mutated) connection operators.
pub fn gauss_codazzi_check(
    sub: &SubbundleCurvature,
    xi: &HardySection,
    v: &TangentVector,
    mutation: CoefficientMutation,
) -> GaussCodazzi {
    let ambient = curvature_bruteforce_operator(&sub.spec, mutation);
    check_against(sub, &ambient, xi, v, mutation)
}

fn check_against(
    sub: &SubbundleCurvature,
    ambient: &CurvatureMatrix,
    xi: &HardySection,
    v: &TangentVector,
    mutation: CoefficientMutation,
) -> GaussCodazzi {
    let model = ambient.quadratic_form(xi, v).re;
    let correction = second_fundamental_correction(xi, v, mutation);
    let subbundle = sub.quadratic_form(xi, v);
    let scale = model.abs().max(correction.abs()).max(subbundle.abs());
    let residual = if scale == 0.0 { 0.0 } else { (model - correction - subbundle).abs() / scale };
    GaussCodazzi { model, correction, subbundle, residual }
}

#[derive(Clone, Debug, Serialize)]
pub struct GaussCodazziRow {
    pub n: usize,
    #[serde(rename = "N")]
    pub degree: u32,
    pub eps: f64,
    pub xi_index: usize,
    /// 1-based.
    pub v_axis: usize,
    pub residual: f64,
}

/// Every basis section against every coordinate direction.
pub fn gauss_codazzi_sweep(
    n: usize,
    degree: u32,
    eps: f64,
    mutation: CoefficientMutation,
) -> Result<Vec<GaussCodazziRow>> {
    let sub = subbundle_curvature_at_origin(n, degree, eps)?;
    let spec = sub.spec;
    let ambient = curvature_bruteforce_operator(&spec, mutation);
    let mut rows = Vec::new();
    for (i, a) in spec.indices().iter().enumerate() {
        let xi = HardySection::basis(spec, a);
        for axis in 0..n {
            let g = check_against(&sub, &ambient, &xi, &TangentVector::axis(n, axis), mutation);
            rows.push(GaussCodazziRow { n, degree, eps, xi_index: i, v_axis: axis + 1, residual: g.residual });
        }
    }
    Ok(rows)
}

pub fn write_gauss_codazzi_csv<W: Write>(rows: &[GaussCodazziRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
