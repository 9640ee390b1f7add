//! Graded operators `e_alpha -> c(alpha) e_{alpha + delta}` and their sums.
//!
//! Coefficients are closures on all of `N^n`, so products and commutators
//! are exact: nothing is lost to truncation until an operator is applied to
//! a concrete section or tabulated as a matrix.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{BasisSpec, HardySection};
use crate::multiindex::{count, enumerate, MultiIndex};

pub type CoeffFn = Arc<dyn Fn(&MultiIndex) -> Complex64 + Send + Sync>;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Clone)]
pub struct MonomialOperator {
    shift: Vec<i32>,
    coeff: CoeffFn,
}

impl std::fmt::Debug for MonomialOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MonomialOperator").field("shift", &self.shift).finish()
    }
}

impl MonomialOperator {
    pub fn new(shift: Vec<i32>, coeff: CoeffFn) -> Self {
        MonomialOperator { shift, coeff }
    }

    pub fn from_fn<F>(shift: Vec<i32>, f: F) -> Self
    where
        F: Fn(&MultiIndex) -> Complex64 + Send + Sync + 'static,
    {
        Self::new(shift, Arc::new(f))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(vec![0; n], |_| Complex64::new(1.0, 0.0))
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    pub fn shift(&self) -> &[i32] {
        &self.shift
    }

    pub fn degree_shift(&self) -> i32 {
        self.shift.iter().sum()
    }

    pub fn target(&self, alpha: &MultiIndex) -> Option<MultiIndex> {
        alpha.shifted(&self.shift)
    }

    /// `c(alpha)`, forced to zero when `alpha + delta` leaves `N^n`.
    pub fn coefficient(&self, alpha: &MultiIndex) -> Complex64 {
        match self.target(alpha) {
            Some(_) => (self.coeff)(alpha),
            None => ZERO,
        }
    }

    pub fn apply_basis(&self, alpha: &MultiIndex) -> Option<(MultiIndex, Complex64)> {
        let beta = self.target(alpha)?;
        Some((beta, (self.coeff)(alpha)))
    }

    /// `self o inner`.
    pub fn compose(&self, inner: &MonomialOperator) -> MonomialOperator {
        let shift = self.shift.iter().zip(&inner.shift).map(|(a, b)| a + b).collect();
        let outer = self.clone();
        let inner = inner.clone();
        Self::from_fn(shift, move |alpha| match inner.apply_basis(alpha) {
            Some((beta, c)) if c != ZERO => c * outer.coefficient(&beta),
            _ => ZERO,
        })
    }

    pub fn adjoint(&self) -> MonomialOperator {
        let shift: Vec<i32> = self.shift.iter().map(|d| -d).collect();
        let base = self.clone();
        let back = shift.clone();
        Self::from_fn(shift, move |beta| match beta.shifted(&back) {
            Some(alpha) => base.coefficient(&alpha).conj(),
            None => ZERO,
        })
    }

    pub fn scale(&self, c: Complex64) -> MonomialOperator {
        let base = self.clone();
        Self::from_fn(self.shift.clone(), move |alpha| c * base.coefficient(alpha))
    }
}

#[derive(Clone, Debug)]
pub struct OperatorSum {
    n: usize,
    terms: Vec<MonomialOperator>,
}

impl From<MonomialOperator> for OperatorSum {
    fn from(op: MonomialOperator) -> Self {
        OperatorSum { n: op.dim(), terms: vec![op] }
    }
}

impl OperatorSum {
    pub fn zero(n: usize) -> Self {
        OperatorSum { n, terms: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        MonomialOperator::identity(n).into()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[MonomialOperator] {
        &self.terms
    }

    pub fn push(&mut self, op: MonomialOperator) {
        assert_eq!(op.dim(), self.n);
        self.terms.push(op);
    }

    pub fn add(&self, other: &OperatorSum) -> OperatorSum {
        assert_eq!(self.n, other.n);
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        OperatorSum { n: self.n, terms }
    }

    pub fn scale(&self, c: Complex64) -> OperatorSum {
        OperatorSum { n: self.n, terms: self.terms.iter().map(|t| t.scale(c)).collect() }
    }

    pub fn sub(&self, other: &OperatorSum) -> OperatorSum {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// `self o inner`.
    pub fn compose(&self, inner: &OperatorSum) -> OperatorSum {
        assert_eq!(self.n, inner.n);
        let mut terms = Vec::with_capacity(self.terms.len() * inner.terms.len());
        for a in &self.terms {
            for b in &inner.terms {
                terms.push(a.compose(b));
            }
        }
        OperatorSum { n: self.n, terms }
    }

    /// `self o other - other o self`, merged by shift.
    pub fn commutator(&self, other: &OperatorSum) -> OperatorSum {
        self.compose(other).sub(&other.compose(self)).merge()
    }

    pub fn adjoint(&self) -> OperatorSum {
        OperatorSum { n: self.n, terms: self.terms.iter().map(|t| t.adjoint()).collect() }
    }

    /// One term per distinct shift.
    pub fn merge(&self) -> OperatorSum {
        let mut groups: BTreeMap<Vec<i32>, Vec<MonomialOperator>> = BTreeMap::new();
        for t in &self.terms {
            groups.entry(t.shift.clone()).or_default().push(t.clone());
        }
        let terms = groups
            .into_iter()
            .map(|(shift, group)| {
                if group.len() == 1 {
                    return group.into_iter().next().expect("one term");
                }
                MonomialOperator::from_fn(shift, move |alpha| {
                    group.iter().map(|t| t.coefficient(alpha)).sum()
                })
            })
            .collect();
        OperatorSum { n: self.n, terms }
    }

    /// Image of `e_alpha` as (target, coefficient) pairs merged by target.
    pub fn apply_basis(&self, alpha: &MultiIndex) -> Vec<(MultiIndex, Complex64)> {
        let mut out: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for t in &self.terms {
            if let Some((beta, c)) = t.apply_basis(alpha) {
                *out.entry(beta).or_insert(ZERO) += c;
            }
        }
        out.into_iter().collect()
    }

    pub fn basis_image_norm(&self, alpha: &MultiIndex) -> f64 {
        self.apply_basis(alpha).iter().map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Applies the operator and keeps the output up to degree `out_degree`.
    pub fn apply(&self, xi: &HardySection, out_degree: u32) -> HardySection {
        let spec = xi.spec().with_degree(out_degree);
        let mut out = HardySection::zero(spec);
        for (alpha, x) in xi.iter() {
            if x == ZERO {
                continue;
            }
            for t in &self.terms {
                if let Some((beta, c)) = t.apply_basis(&alpha) {
                    if beta.degree() <= out_degree {
                        out.add_to(&beta, c * x);
                    }
                }
            }
        }
        out
    }

    /// `<P xi, xi>`, exact for a truncated `xi` since only outputs inside
    /// its support pair with it.
    pub fn quadratic_form(&self, xi: &HardySection) -> Complex64 {
        self.sesquilinear(xi, xi)
    }

    /// `<P xi, eta>`.
    pub fn sesquilinear(&self, xi: &HardySection, eta: &HardySection) -> Complex64 {
        let top = eta.spec().degree;
        let mut acc = ZERO;
        for (alpha, x) in xi.iter() {
            if x == ZERO {
                continue;
            }
            for t in &self.terms {
                if let Some((beta, c)) = t.apply_basis(&alpha) {
                    if beta.degree() <= top {
                        acc += c * x * eta.get(&beta).conj();
                    }
                }
            }
        }
        acc
    }

    /// Matrix from degree `<= in_degree` to degree `<= out_degree`, rows
    /// and columns in enumeration order.
    pub fn matrix(&self, in_degree: u32, out_degree: u32) -> DMatrix<Complex64> {
        let rows = count(self.n, out_degree);
        let cols = count(self.n, in_degree);
        let mut m = DMatrix::from_element(rows, cols, ZERO);
        for (j, alpha) in enumerate(self.n, in_degree).expect("n >= 1").iter().enumerate() {
            for t in &self.terms {
                if let Some((beta, c)) = t.apply_basis(alpha) {
                    if beta.degree() <= out_degree {
                        m[(beta.position(), j)] += c;
                    }
                }
            }
        }
        m
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn unit_shift(n: usize, axis: usize, sign: i32) -> Vec<i32> {
    let mut s = vec![0; n];
    s[axis] = sign;
    s
}

/// `D_m e_alpha = sqrt(alpha_m (|alpha|+n)) e_{alpha - c_m}`, which is `eps d/dw_m` in the frame.
pub fn ladder_d(m: usize, spec: &BasisSpec) -> MonomialOperator {
    let n = spec.n;
    MonomialOperator::from_fn(unit_shift(n, m, -1), move |a| {
        real((a.get(m) as f64 * (a.degree() as f64 + n as f64)).sqrt())
    })
}

/// `D*_l e_alpha = sqrt((alpha_l + 1)(|alpha| + n + 1)) e_{alpha + c_l}`.
pub fn ladder_dstar(l: usize, spec: &BasisSpec) -> MonomialOperator {
    let n = spec.n;
    MonomialOperator::from_fn(unit_shift(n, l, 1), move |a| {
        real(((a.get(l) as f64 + 1.0) * (a.degree() as f64 + n as f64 + 1.0)).sqrt())
    })
}

/// Multiplication by `w_m`: `e_alpha -> eps sqrt((alpha_m+1)/(|alpha|+n+1)) e_{alpha + c_m}`.
pub fn mult_w(m: usize, spec: &BasisSpec) -> MonomialOperator {
    let (n, eps) = (spec.n, spec.eps);
    MonomialOperator::from_fn(unit_shift(n, m, 1), move |a| {
        real(eps * ((a.get(m) as f64 + 1.0) / (a.degree() as f64 + n as f64 + 1.0)).sqrt())
    })
}

/// Adjoint of multiplication by `w_l`: `e_alpha -> eps sqrt(alpha_l/(|alpha|+n)) e_{alpha - c_l}`.
pub fn mult_wstar(l: usize, spec: &BasisSpec) -> MonomialOperator {
    let (n, eps) = (spec.n, spec.eps);
    MonomialOperator::from_fn(unit_shift(n, l, -1), move |a| {
        real(eps * (a.get(l) as f64 / (a.degree() as f64 + n as f64)).sqrt())
    })
}

/// Multiplication by `w^mu` in closed form,
/// `eps^|mu| sqrt((alpha+mu)!/alpha! * (|alpha|+n)!/(|alpha+mu|+n)!)`.
pub fn mult_monomial(mu: &MultiIndex, spec: &BasisSpec) -> MonomialOperator {
    let (n, eps) = (spec.n, spec.eps);
    let mu = mu.clone();
    let shift = mu.exponents().iter().map(|&k| k as i32).collect();
    MonomialOperator::from_fn(shift, move |a| {
        let mut ratio = 1.0;
        for (&aj, &mj) in a.exponents().iter().zip(mu.exponents()) {
            for t in 1..=mj {
                ratio *= (aj + t) as f64;
            }
        }
        let base = a.degree() as f64 + n as f64;
        for t in 1..=mu.degree() {
            ratio /= base + t as f64;
        }
        real(eps.powi(mu.degree() as i32) * ratio.sqrt())
    })
}

pub fn mult_monomial_adj(mu: &MultiIndex, spec: &BasisSpec) -> MonomialOperator {
    mult_monomial(mu, spec).adjoint()
}
