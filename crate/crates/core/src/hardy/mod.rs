//! The truncated Hardy space of holomorphic n-forms on the ball of radius
//! `eps`, in the orthonormal monomial frame
//! `e_alpha = pi^{-n/2} eps^{-|alpha|-n} sqrt((|alpha|+n)!/alpha!) (w - zbar)^alpha`.
//!
//! The form factor `dw_1 ^ ... ^ dw_n` is implicit: norms are Lebesgue
//! integrals of the squared coefficient.

mod bounds;
mod operators;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiindex::{count, enumerate, MultiIndex};
use crate::poly::SparsePoly;

pub use bounds::{verify_ladder_bounds, verify_ladder_bounds_with, BoundCheck, LadderBoundsReport};
pub use operators::{
    ladder_d, ladder_dstar, mult_monomial, mult_monomial_adj, mult_w, mult_wstar, CoeffFn,
    MonomialOperator, OperatorSum,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasisSpec {
    pub n: usize,
    pub eps: f64,
    /// Truncation degree `N`.
    pub degree: u32,
}

impl BasisSpec {
    pub fn new(n: usize, eps: f64, degree: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidRadius(eps));
        }
        Ok(BasisSpec { n, eps, degree })
    }

    pub fn dim(&self) -> usize {
        count(self.n, self.degree)
    }

    pub fn with_degree(&self, degree: u32) -> BasisSpec {
        BasisSpec { degree, ..*self }
    }

    pub fn with_eps(&self, eps: f64) -> BasisSpec {
        BasisSpec { eps, ..*self }
    }

    pub fn indices(&self) -> Vec<MultiIndex> {
        enumerate(self.n, self.degree).expect("n >= 1")
    }
}

/// `pi^{-n/2} eps^{-|alpha|-n} sqrt((|alpha|+n)!/alpha!)`.
pub fn basis_norm_coeff(alpha: &MultiIndex, spec: &BasisSpec) -> f64 {
    let n = spec.n;
    let d = alpha.degree() as usize;
    // (|alpha|+n)!/alpha! as a product of ratios to stay in range
    let mut log_ratio = 0.0;
    for k in 1..=(d + n) {
        log_ratio += (k as f64).ln();
    }
    for &a in alpha.exponents() {
        for k in 1..=a {
            log_ratio -= (k as f64).ln();
        }
    }
    let log = -0.5 * n as f64 * std::f64::consts::PI.ln()
        - (d + n) as f64 * spec.eps.ln()
        + 0.5 * log_ratio;
    log.exp()
}

#[derive(Clone, Debug, PartialEq)]
pub struct HardySection {
    spec: BasisSpec,
    coeffs: Vec<Complex64>,
}

impl HardySection {
    pub fn new(spec: BasisSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != spec.dim() {
            return Err(Error::DimensionMismatch { expected: spec.dim(), got: coeffs.len() });
        }
        Ok(HardySection { spec, coeffs })
    }

    pub fn zero(spec: BasisSpec) -> Self {
        HardySection { spec, coeffs: vec![Complex64::new(0.0, 0.0); spec.dim()] }
    }

    /// The frame vector `e_alpha` (requires `|alpha| <= N`).
    pub fn basis(spec: BasisSpec, alpha: &MultiIndex) -> Self {
        let mut s = Self::zero(spec);
        s.coeffs[alpha.position()] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// `xi_alpha`, zero beyond the truncation.
    pub fn get(&self, alpha: &MultiIndex) -> Complex64 {
        if alpha.degree() > self.spec.degree {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[alpha.position()]
    }

    pub fn add_to(&mut self, alpha: &MultiIndex, value: Complex64) {
        self.coeffs[alpha.position()] += value;
    }

    pub fn iter(&self) -> impl Iterator<Item = (MultiIndex, Complex64)> + '_ {
        self.spec.indices().into_iter().zip(self.coeffs.iter().copied())
    }

    /// Same coefficients viewed in a larger or smaller truncation.
    pub fn truncated(&self, degree: u32) -> HardySection {
        let spec = self.spec.with_degree(degree);
        let len = spec.dim();
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(len, Complex64::new(0.0, 0.0));
        HardySection { spec, coeffs }
    }

    pub fn scaled(&self, c: Complex64) -> HardySection {
        HardySection { spec: self.spec, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// `<self, other>`, linear in the first slot; truncations may differ.
    pub fn inner(&self, other: &HardySection) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm_sqr() == 0.0)
    }

    /// Top degree carrying a nonzero coefficient.
    pub fn support_degree(&self) -> Option<u32> {
        self.iter().filter(|(_, c)| c.norm_sqr() > 0.0).map(|(a, _)| a.degree()).max()
    }

    /// `sum (|alpha| + n) |xi_alpha|^2`, the weight appearing in every curvature estimate.
    pub fn degree_weighted_norm_sqr(&self) -> f64 {
        let n = self.spec.n as f64;
        self.iter().map(|(a, c)| (a.degree() as f64 + n) * c.norm_sqr()).sum()
    }

    /// Coefficient polynomial in the centred variable `u = w - zbar`.
    pub fn to_polynomial(&self) -> SparsePoly<Complex64> {
        let mut p = SparsePoly::zero(self.spec.n);
        for (a, c) in self.iter() {
            let k = basis_norm_coeff(&a, &self.spec);
            p.add_term(a.exponents().to_vec(), c * k);
        }
        p
    }

    /// Inverse of [`HardySection::to_polynomial`]; terms above `N` are rejected.
    pub fn from_polynomial(spec: BasisSpec, p: &SparsePoly<Complex64>) -> Result<HardySection> {
        if p.nvars() != spec.n {
            return Err(Error::DimensionMismatch { expected: spec.n, got: p.nvars() });
        }
        let mut s = HardySection::zero(spec);
        for (e, &c) in p.terms() {
            let a = MultiIndex::new(e.clone());
            if a.degree() > spec.degree {
                return Err(Error::InvalidParameter(format!("term {a} above degree {}", spec.degree)));
            }
            s.coeffs[a.position()] += c / basis_norm_coeff(&a, &spec);
        }
        Ok(s)
    }

    /// The same element after rescaling its fiber onto the unit ball,
    /// `f(w) -> eps^n f(eps w)`. Frame coefficients are unchanged.
    pub fn rescale_to_unit(&self) -> HardySection {
        let spec = self.spec.with_eps(1.0);
        let shrunk = self.to_polynomial();
        let eps = self.spec.eps;
        let mut q = SparsePoly::zero(spec.n);
        for (e, &c) in shrunk.terms() {
            let d: u32 = e.iter().sum();
            q.add_term(e.clone(), c * eps.powi((d as usize + spec.n) as i32));
        }
        HardySection::from_polynomial(spec, &q).expect("same degree")
    }

    /// `sum rho^{2(|alpha|+n)} |xi_alpha|^2`.
    pub fn rho_weighted_norm(&self, rho: f64) -> Result<f64> {
        check_rho(rho)?;
        let n = self.spec.n as i32;
        Ok(self
            .iter()
            .map(|(a, c)| rho.powi(2 * (a.degree() as i32 + n)) * c.norm_sqr())
            .sum())
    }

    /// Termwise derivative of [`HardySection::rho_weighted_norm`] in `rho`.
    pub fn rho_weighted_norm_derivative(&self, rho: f64) -> Result<f64> {
        check_rho(rho)?;
        let n = self.spec.n as i32;
        Ok(self
            .iter()
            .map(|(a, c)| {
                let k = 2 * (a.degree() as i32 + n);
                k as f64 * rho.powi(k - 1) * c.norm_sqr()
            })
            .sum())
    }

    /// `sum (|alpha|+n) rho^{2(|alpha|+n)} |xi_alpha|^2`.
    pub fn rho_degree_moment(&self, rho: f64) -> Result<f64> {
        check_rho(rho)?;
        let n = self.spec.n as i32;
        Ok(self
            .iter()
            .map(|(a, c)| {
                let k = a.degree() as i32 + n;
                k as f64 * rho.powi(2 * k) * c.norm_sqr()
            })
            .sum())
    }

    /// `(1/m) log sum rho^{2(|alpha|+n)} |xi_alpha|^2`.
    pub fn theta_rho(&self, rho: f64, m: u32) -> Result<f64> {
        if m == 0 {
            return Err(Error::InvalidParameter("m must be at least 1".into()));
        }
        if self.is_zero() {
            return Err(Error::ZeroSection);
        }
        Ok(self.rho_weighted_norm(rho)?.ln() / m as f64)
    }

    /// Value at `w` of the coefficient function, for the fiber centred at `center`.
    pub fn evaluate(&self, w: &[Complex64], center: &[Complex64]) -> Result<Complex64> {
        let n = self.spec.n;
        if w.len() != n || center.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: w.len().min(center.len()) });
        }
        let u: Vec<Complex64> = w.iter().zip(center).map(|(a, b)| a - b).collect();
        let dist = u.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if dist >= self.spec.eps {
            return Err(Error::OutsideFiber { distance: dist, radius: self.spec.eps });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, c) in self.iter() {
            if c.norm_sqr() == 0.0 {
                continue;
            }
            let mut mono = Complex64::new(basis_norm_coeff(&a, &self.spec), 0.0);
            for (x, &k) in u.iter().zip(a.exponents()) {
                mono *= x.powu(k);
            }
            acc += c * mono;
        }
        Ok(acc)
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::InvalidParameter(format!("rho = {rho} outside (0, 1]")));
    }
    Ok(())
}

/// `sqrt(sum |xi_alpha|^2)`.
pub fn fiber_norm(xi: &HardySection) -> f64 {
    xi.norm_sqr().sqrt()
}

#[derive(Serialize, Deserialize)]
struct SectionJson {
    n: usize,
    eps: f64,
    #[serde(rename = "N")]
    degree: u32,
    coeffs: Vec<(Vec<u32>, f64, f64)>,
}

impl HardySection {
    pub fn to_json(&self) -> Result<String> {
        let doc = SectionJson {
            n: self.spec.n,
            eps: self.spec.eps,
            degree: self.spec.degree,
            coeffs: self
                .iter()
                .map(|(a, c)| (a.exponents().to_vec(), c.re, c.im))
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<HardySection> {
        let doc: SectionJson = serde_json::from_str(text)?;
        let spec = BasisSpec::new(doc.n, doc.eps, doc.degree)?;
        let mut s = HardySection::zero(spec);
        for (e, re, im) in doc.coeffs {
            if e.len() != spec.n {
                return Err(Error::DimensionMismatch { expected: spec.n, got: e.len() });
            }
            let a = MultiIndex::new(e);
            if a.degree() > spec.degree {
                return Err(Error::InvalidParameter(format!("index {a} above N")));
            }
            s.coeffs[a.position()] = Complex64::new(re, im);
        }
        Ok(s)
    }
}

/// `K_n(w) = n! pi^{-n} (1 - |w|^2)^{-n-1}`.
pub fn bergman_kernel_closed(n: usize, w: &[Complex64]) -> Result<f64> {
    let r2 = point_norm_sqr(n, w)?;
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    Ok(fact / std::f64::consts::PI.powi(n as i32) * (1.0 - r2).powi(-(n as i32) - 1))
}

/// `sum_{|alpha| <= N} |e_alpha(w)|^2` on the unit ball.
pub fn bergman_kernel_series(n: usize, w: &[Complex64], degree: u32) -> Result<f64> {
    point_norm_sqr(n, w)?;
    let spec = BasisSpec::new(n, 1.0, degree)?;
    let mut total = 0.0;
    for a in spec.indices() {
        // (|alpha|+n)! / alpha!
        let mut v: f64 = (1..=(a.degree() as usize + n)).map(|k| k as f64).product();
        for (x, &k) in w.iter().zip(a.exponents()) {
            let f: f64 = (1..=k).map(|i| i as f64).product();
            v *= x.norm_sqr().powi(k as i32) / f;
        }
        total += v;
    }
    Ok(total / std::f64::consts::PI.powi(n as i32))
}

fn point_norm_sqr(n: usize, w: &[Complex64]) -> Result<f64> {
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    if w.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: w.len() });
    }
    let r2: f64 = w.iter().map(|x| x.norm_sqr()).sum();
    if r2 >= 1.0 {
        return Err(Error::OutsideBall(r2.sqrt()));
    }
    Ok(r2)
}

/// Partial squared norms `S_K = sum_{k <= K} c_k^2 ||w_1^k||^2` of
/// `(1 - w_1)^{-a}` on the unit ball of `C^n`, with
/// `c_k = Gamma(a+k) / (Gamma(a) k!)` and `||w_1^k||^2 = pi^n k! / (k+n)!`.
pub fn restriction_blowup_demo(a: f64, n: usize, max_k: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    if !(a >= 0.0 && a.is_finite()) {
        return Err(Error::InvalidParameter(format!("exponent a = {a} must be >= 0")));
    }
    let fact_n: f64 = (1..=n).map(|k| k as f64).product();
    let mut c = 1.0;
    let mut m = std::f64::consts::PI.powi(n as i32) / fact_n;
    let mut total = 0.0;
    let mut out = Vec::with_capacity(max_k + 1);
    for k in 0..=max_k {
        total += c * c * m;
        out.push(total);
        let kf = k as f64;
        c *= (a + kf) / (kf + 1.0);
        m *= (kf + 1.0) / (kf + n as f64 + 1.0);
    }
    Ok(out)
}
