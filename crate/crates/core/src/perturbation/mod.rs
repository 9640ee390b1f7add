//! Correction terms of a non-flat hermitian metric at the osculation point
//! `z = 0`, driven by a precomputed metric jet.
//!
//! A jet stores the first-order expansion of the Bergman potential map,
//! `a'_{k,m}(w) = sum_mu a'_{k,m,mu} g_mu(w)` and
//! `c_{jk,m}(w) = sum_mu c_{jk,m,mu} g_mu(w)` with `g_mu = s_mu^{-1} w^mu`.
//! Operators are assembled from the monomial primitives of [`crate::hardy`],
//! so every composition is exact on the full frame.

mod assembly;
mod report;

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;

pub use assembly::{
    build_a01_origin, build_a10_origin, build_coupling, build_da01_origin, build_dbar_a10_origin,
    build_q, build_q_expanded, build_wedge, model_blocks, q_expansion_terms, word_bound_check,
    ExpansionTerm, Factor, WordBoundReport,
};
pub use report::{
    contract, curvature_full_origin, halving_ratios, q_bound_check, relative_deviation, sigma_bound,
    sigma_bound_check, CurvatureReport, DeviationReport, OriginCurvature, QBoundReport, SigmaReport,
};

/// `a'_{k,m,mu}` with 0-based axes.
#[derive(Clone, Debug, PartialEq)]
pub struct APrimeEntry {
    pub k: usize,
    pub m: usize,
    pub mu: MultiIndex,
    pub value: Complex64,
}

/// `c_{jk,m,mu}` with 0-based axes.
#[derive(Clone, Debug, PartialEq)]
pub struct CEntry {
    pub j: usize,
    pub k: usize,
    pub m: usize,
    pub mu: MultiIndex,
    pub value: Complex64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricJet {
    pub n: usize,
    /// Truncation order `M`: every stored `mu` has `1 <= |mu| <= M`.
    pub order: u32,
    pub r_conv: f64,
    pub c0: f64,
    pub a_prime: Vec<APrimeEntry>,
    pub c: Vec<CEntry>,
}

#[derive(Serialize, Deserialize)]
struct RawA {
    k: usize,
    m: usize,
    mu: Vec<u32>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct RawC {
    j: usize,
    k: usize,
    m: usize,
    mu: Vec<u32>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct RawJet {
    n: usize,
    #[serde(rename = "M")]
    order: u32,
    r_conv: f64,
    #[serde(rename = "C0")]
    c0: f64,
    #[serde(default)]
    a_prime: Vec<RawA>,
    #[serde(default)]
    c: Vec<RawC>,
}

fn one_based(i: usize, n: usize, what: &str) -> Result<usize> {
    if i == 0 || i > n {
        return Err(Error::InvalidJet(format!("{what} = {i} outside 1..={n}")));
    }
    Ok(i - 1)
}

impl MetricJet {
    /// The flat metric: no corrections at all.
    pub fn zero(n: usize) -> Result<MetricJet> {
        let jet = MetricJet { n, order: 1, r_conv: 1.0, c0: 0.0, a_prime: Vec::new(), c: Vec::new() };
        jet.validate()?;
        Ok(jet)
    }

    pub fn is_zero(&self) -> bool {
        self.a_prime.iter().all(|e| e.value == Complex64::new(0.0, 0.0))
            && self.c.iter().all(|e| e.value == Complex64::new(0.0, 0.0))
    }

    /// Checks index ranges, excludes `mu = 0` and `|mu| > M`, and checks the
    /// declared bound `|coef| <= C0 r_conv^{-|mu|}`.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::EmptyDimension);
        }
        if !(self.r_conv.is_finite() && self.r_conv > 0.0) {
            return Err(Error::InvalidJet(format!("r_conv must be positive, got {}", self.r_conv)));
        }
        if !(self.c0.is_finite() && self.c0 >= 0.0) {
            return Err(Error::InvalidJet(format!("C0 must be non-negative, got {}", self.c0)));
        }
        let check_mu = |mu: &MultiIndex, value: Complex64| -> Result<()> {
            if mu.dim() != self.n {
                return Err(Error::InvalidJet(format!("mu {mu} has {} components, expected {}", mu.dim(), self.n)));
            }
            if mu.is_zero() {
                return Err(Error::InvalidJet("mu = 0 entries are not allowed".into()));
            }
            if mu.degree() > self.order {
                return Err(Error::InvalidJet(format!("|mu| = {} exceeds M = {}", mu.degree(), self.order)));
            }
            if !(value.re.is_finite() && value.im.is_finite()) {
                return Err(Error::InvalidJet(format!("non-finite coefficient at mu {mu}")));
            }
            let cap = self.c0 * self.r_conv.powi(-(mu.degree() as i32));
            if value.norm() > cap * (1.0 + 1e-12) {
                return Err(Error::InvalidJet(format!(
                    "|coef| = {} at mu {mu} exceeds C0 r_conv^-|mu| = {cap}",
                    value.norm()
                )));
            }
            Ok(())
        };
        let mut seen = std::collections::BTreeSet::new();
        for e in &self.a_prime {
            if e.k >= self.n || e.m >= self.n {
                return Err(Error::InvalidJet(format!("a_prime axis ({}, {}) out of range", e.k + 1, e.m + 1)));
            }
            check_mu(&e.mu, e.value)?;
            if !seen.insert((0, e.k, e.m, e.mu.clone())) {
                return Err(Error::InvalidJet(format!("duplicate a_prime entry ({}, {}, {})", e.k + 1, e.m + 1, e.mu)));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for e in &self.c {
            if e.j >= self.n || e.k >= self.n || e.m >= self.n {
                return Err(Error::InvalidJet(format!("c axis ({}, {}, {}) out of range", e.j + 1, e.k + 1, e.m + 1)));
            }
            check_mu(&e.mu, e.value)?;
            if !seen.insert((e.j, e.k, e.m, e.mu.clone())) {
                return Err(Error::InvalidJet(format!("duplicate c entry ({}, {}, {}, {})", e.j + 1, e.k + 1, e.m + 1, e.mu)));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<MetricJet> {
        let raw: RawJet = serde_json::from_str(text).map_err(|e| Error::InvalidJet(e.to_string()))?;
        let n = raw.n;
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        let a_prime = raw
            .a_prime
            .into_iter()
            .map(|r| {
                Ok(APrimeEntry {
                    k: one_based(r.k, n, "k")?,
                    m: one_based(r.m, n, "m")?,
                    mu: MultiIndex::new(r.mu),
                    value: Complex64::new(r.re, r.im),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let c = raw
            .c
            .into_iter()
            .map(|r| {
                Ok(CEntry {
                    j: one_based(r.j, n, "j")?,
                    k: one_based(r.k, n, "k")?,
                    m: one_based(r.m, n, "m")?,
                    mu: MultiIndex::new(r.mu),
                    value: Complex64::new(r.re, r.im),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let jet = MetricJet { n, order: raw.order, r_conv: raw.r_conv, c0: raw.c0, a_prime, c };
        jet.validate()?;
        Ok(jet)
    }

    pub fn load(path: &Path) -> Result<MetricJet> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        let raw = RawJet {
            n: self.n,
            order: self.order,
            r_conv: self.r_conv,
            c0: self.c0,
            a_prime: self
                .a_prime
                .iter()
                .map(|e| RawA {
                    k: e.k + 1,
                    m: e.m + 1,
                    mu: e.mu.exponents().to_vec(),
                    re: e.value.re,
                    im: e.value.im,
                })
                .collect(),
            c: self
                .c
                .iter()
                .map(|e| RawC {
                    j: e.j + 1,
                    k: e.k + 1,
                    m: e.m + 1,
                    mu: e.mu.exponents().to_vec(),
                    re: e.value.re,
                    im: e.value.im,
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&raw)?)
    }

    /// Largest `|mu|` actually stored.
    pub fn max_shift(&self) -> u32 {
        self.a_prime
            .iter()
            .map(|e| e.mu.degree())
            .chain(self.c.iter().map(|e| e.mu.degree()))
            .max()
            .unwrap_or(0)
    }

    /// `a'_{k,m}(w)` as a polynomial in `w`.
    pub fn a_prime_poly(&self, k: usize, m: usize) -> crate::poly::SparsePoly<Complex64> {
        let mut p = crate::poly::SparsePoly::zero(self.n);
        for e in self.a_prime.iter().filter(|e| e.k == k && e.m == m) {
            p.add_term(e.mu.exponents().to_vec(), e.value / crate::multiindex::sup_norm(&e.mu));
        }
        p
    }

    /// `c_{jk,m}(w)` as a polynomial in `w`.
    pub fn c_poly(&self, j: usize, k: usize, m: usize) -> crate::poly::SparsePoly<Complex64> {
        let mut p = crate::poly::SparsePoly::zero(self.n);
        for e in self.c.iter().filter(|e| e.j == j && e.k == k && e.m == m) {
            p.add_term(e.mu.exponents().to_vec(), e.value / crate::multiindex::sup_norm(&e.mu));
        }
        p
    }
}
