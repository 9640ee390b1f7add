//! Multi-indices over `N^n`, exact moment arithmetic and the sup-norm
//! combinatorics behind the curvature estimates.
//!
//! The enumeration order is part of the public contract: every coefficient
//! vector in this crate is indexed by [`enumerate`], which lists indices by
//! increasing total degree and, within one degree, in descending
//! lexicographic order of the exponent tuple. For `n = 2` this reads
//! `(0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...`.

mod exact;
mod split;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) use exact::exact_radius;
pub use exact::{ball_moment, moment_recursion_check, unit_ball_moment_ratio, ExactScalar};
pub use split::{
    split_at_fraction, split_bound_check, split_bound_check_report, split_multiindex, Split,
    SplitBoundReport,
};

/// An exponent tuple `alpha = (alpha_1, ..., alpha_n)`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// The canonical unit index `c_j` (0-based axis).
    pub fn unit(n: usize, axis: usize) -> Self {
        let mut e = vec![0; n];
        e[axis] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, axis: usize) -> u32 {
        self.0[axis]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// Number of nonzero components.
    pub fn support_size(&self) -> usize {
        self.0.iter().filter(|&&a| a > 0).count()
    }

    /// `alpha + c_axis`.
    pub fn raised(&self, axis: usize) -> MultiIndex {
        let mut e = self.0.clone();
        e[axis] += 1;
        MultiIndex(e)
    }

    /// `alpha - c_axis`, defined only when `alpha_axis >= 1`.
    pub fn lowered(&self, axis: usize) -> Option<MultiIndex> {
        let mut e = self.0.clone();
        e[axis] = e[axis].checked_sub(1)?;
        Some(MultiIndex(e))
    }

    /// `alpha + delta` for an integer shift, `None` when the result leaves `N^n`.
    pub fn shifted(&self, delta: &[i32]) -> Option<MultiIndex> {
        debug_assert_eq!(delta.len(), self.0.len());
        let mut e = Vec::with_capacity(self.0.len());
        for (&a, &d) in self.0.iter().zip(delta) {
            let v = a as i64 + d as i64;
            if v < 0 {
                return None;
            }
            e.push(v as u32);
        }
        Some(MultiIndex(e))
    }

    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let e = self
            .0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| a.checked_sub(b))
            .collect::<Option<Vec<_>>>()?;
        Some(MultiIndex(e))
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Position of this index in [`enumerate`] order (for any truncation
    /// degree at least `|alpha|`).
    pub fn position(&self) -> usize {
        let n = self.dim();
        let d = self.degree() as usize;
        let mut pos = if d == 0 { 0 } else { binomial(d - 1 + n, n) };
        let mut remaining = d;
        for i in 0..n.saturating_sub(1) {
            let a = self.0[i] as usize;
            let rest_vars = n - i - 1;
            // indices sharing the prefix but with a larger i-th component come first
            for b in (a + 1)..=remaining {
                pos += binomial(remaining - b + rest_vars - 1, rest_vars - 1);
            }
            remaining -= a;
        }
        pos
    }

    /// Multi-index factorial `alpha_1! ... alpha_n!` as an exact integer.
    pub fn factorial(&self) -> num_bigint::BigUint {
        self.0
            .iter()
            .fold(num_bigint::BigUint::from(1u32), |acc, &a| acc * factorial(a as u64))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

impl<const K: usize> From<[u32; K]> for MultiIndex {
    fn from(v: [u32; K]) -> Self {
        MultiIndex(v.to_vec())
    }
}

/// All `alpha` in `N^n` with `|alpha| <= max_degree`, in graded lexicographic
/// order. The length is `binomial(max_degree + n, n)`.
pub fn enumerate(n: usize, max_degree: u32) -> Result<Vec<MultiIndex>> {
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    let mut out = Vec::with_capacity(binomial(max_degree as usize + n, n));
    for d in 0..=max_degree {
        let mut current = vec![0u32; n];
        push_degree(&mut out, &mut current, 0, d);
    }
    Ok(out)
}

/// All `alpha` with `|alpha| = degree`, descending lexicographic order.
pub fn enumerate_degree(n: usize, degree: u32) -> Result<Vec<MultiIndex>> {
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    let mut out = Vec::new();
    let mut current = vec![0u32; n];
    push_degree(&mut out, &mut current, 0, degree);
    Ok(out)
}

fn push_degree(out: &mut Vec<MultiIndex>, current: &mut Vec<u32>, axis: usize, remaining: u32) {
    let n = current.len();
    if axis == n - 1 {
        current[axis] = remaining;
        out.push(MultiIndex(current.clone()));
        return;
    }
    for a in (0..=remaining).rev() {
        current[axis] = a;
        push_degree(out, current, axis + 1, remaining - a);
    }
    current[axis] = 0;
}

/// Number of multi-indices in `N^n` of degree at most `max_degree`.
pub fn count(n: usize, max_degree: u32) -> usize {
    binomial(max_degree as usize + n, n)
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

pub fn factorial(k: u64) -> num_bigint::BigUint {
    (1..=k).fold(num_bigint::BigUint::from(1u32), |acc, i| acc * i)
}

/// `s_mu = sup_{|w| <= 1} |w^mu| = prod_j (mu_j / |mu|)^(mu_j / 2)`, with `0^0 = 1`.
pub fn sup_norm(mu: &MultiIndex) -> f64 {
    let total = mu.degree() as f64;
    if total == 0.0 {
        return 1.0;
    }
    let log: f64 = mu
        .exponents()
        .iter()
        .filter(|&&m| m > 0)
        .map(|&m| 0.5 * m as f64 * (m as f64 / total).ln())
        .sum();
    log.exp()
}
