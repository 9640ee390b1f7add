//! Sparse multivariate polynomials with floating coefficients.
//!
//! Used as an independent representation of sections (coefficient functions
//! in `w`, or in `(w, zbar)` jointly) against which the frame-based operator
//! calculus is cross-checked.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use num_traits::Zero;

pub trait Coefficient:
    Copy + Zero + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + From<f64>
{
    fn magnitude(&self) -> f64;
}

impl Coefficient for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Coefficient for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SparsePoly<C> {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, C>,
}

impl<C: Coefficient> SparsePoly<C> {
    pub fn zero(nvars: usize) -> Self {
        SparsePoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    pub fn monomial(nvars: usize, exponents: Vec<u32>, c: C) -> Self {
        assert_eq!(exponents.len(), nvars);
        let mut p = Self::zero(nvars);
        p.add_term(exponents, c);
        p
    }

    /// The single variable `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, e, C::from(1.0))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exponents: &[u32]) -> C {
        self.terms.get(exponents).copied().unwrap_or_else(C::zero)
    }

    pub fn add_term(&mut self, exponents: Vec<u32>, c: C) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exponents).or_insert_with(C::zero);
        *entry = *entry + c;
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| c.is_zero())
    }

    pub fn scale(&self, c: C) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, &v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, &v) in &other.terms {
            out.add_term(e.clone(), v);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C::from(-1.0)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars);
        for (a, &x) in &self.terms {
            for (b, &y) in &other.terms {
                let e = a.iter().zip(b).map(|(i, j)| i + j).collect();
                out.add_term(e, x * y);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::constant(self.nvars, C::from(1.0));
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, &v) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[i] -= 1;
            out.add_term(d, v * C::from(e[i] as f64));
        }
        out
    }

    pub fn eval(&self, point: &[C]) -> C {
        assert_eq!(point.len(), self.nvars);
        let mut acc = C::zero();
        for (e, &v) in &self.terms {
            let mut term = v;
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    term = term * *x;
                }
            }
            acc = acc + term;
        }
        acc
    }

    /// Largest coefficient magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other).terms.values().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.magnitude()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_derivative() {
        // (x + y)^2 = x^2 + 2xy + y^2
        let x = SparsePoly::<f64>::var(2, 0);
        let y = SparsePoly::<f64>::var(2, 1);
        let s = x.add(&y).pow(2);
        assert_eq!(s.coefficient(&[1, 1]), 2.0);
        assert_eq!(s.coefficient(&[2, 0]), 1.0);
        let d = s.partial(0);
        assert_eq!(d.coefficient(&[1, 0]), 2.0);
        assert_eq!(d.coefficient(&[0, 1]), 2.0);
        assert_eq!(s.eval(&[1.0, 2.0]), 9.0);
    }

    #[test]
    fn cancellation_leaves_zero() {
        let x = SparsePoly::<Complex64>::var(1, 0);
        assert!(x.sub(&x).is_zero());
        assert_eq!(x.max_abs_diff(&x), 0.0);
    }
}
