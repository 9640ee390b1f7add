use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::{factorial, MultiIndex};
use crate::error::{Error, Result};

/// An exact value `rational * pi^pi_power`.
///
/// Ball moments are rational multiples of `pi^n`, so every identity between
/// them can be checked without tolerance.
#[derive(Clone, Debug)]
pub struct ExactScalar {
    rational: BigRational,
    pi_power: i32,
}

impl ExactScalar {
    pub fn new(rational: BigRational, pi_power: i32) -> Self {
        let pi_power = if rational.is_zero() { 0 } else { pi_power };
        ExactScalar { rational, pi_power }
    }

    pub fn from_rational(rational: BigRational) -> Self {
        Self::new(rational, 0)
    }

    pub fn from_integer(n: i64) -> Self {
        Self::new(BigRational::from_integer(BigInt::from(n)), 0)
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn pi() -> Self {
        Self::new(BigRational::one(), 1)
    }

    pub fn rational(&self) -> &BigRational {
        &self.rational
    }

    pub fn pi_power(&self) -> i32 {
        self.pi_power
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.rational.to_f64().unwrap_or(f64::NAN) * std::f64::consts::PI.powi(self.pi_power)
    }

    /// Sum of two scalars; only defined when the pi powers agree (or one side is zero).
    pub fn checked_add(&self, other: &ExactScalar) -> Result<ExactScalar> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.pi_power != other.pi_power {
            return Err(Error::MixedPiPower(self.pi_power, other.pi_power));
        }
        Ok(ExactScalar::new(&self.rational + &other.rational, self.pi_power))
    }

    pub fn recip(&self) -> ExactScalar {
        ExactScalar::new(self.rational.recip(), -self.pi_power)
    }

    pub fn powi(&self, k: i32) -> ExactScalar {
        let r = if k >= 0 {
            num_traits::pow(self.rational.clone(), k as usize)
        } else {
            num_traits::pow(self.rational.recip(), (-k) as usize)
        };
        ExactScalar::new(r, self.pi_power * k)
    }
}

impl PartialEq for ExactScalar {
    fn eq(&self, other: &Self) -> bool {
        self.pi_power == other.pi_power && self.rational == other.rational
    }
}

impl PartialOrd for ExactScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.pi_power == other.pi_power || self.is_zero() || other.is_zero() {
            // with a common factor pi^k > 0 the rationals decide
            return Some(self.rational.cmp(&other.rational));
        }
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl Mul for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar::new(&self.rational * &rhs.rational, self.pi_power + rhs.pi_power)
    }
}

impl Mul for ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: ExactScalar) -> ExactScalar {
        &self * &rhs
    }
}

impl Div for &ExactScalar {
    type Output = ExactScalar;
    fn div(self, rhs: &ExactScalar) -> ExactScalar {
        assert!(!rhs.is_zero(), "division by an exact zero");
        ExactScalar::new(&self.rational / &rhs.rational, self.pi_power - rhs.pi_power)
    }
}

impl Div for ExactScalar {
    type Output = ExactScalar;
    fn div(self, rhs: ExactScalar) -> ExactScalar {
        &self / &rhs
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pi_power {
            0 => write!(f, "{}", self.rational),
            1 => write!(f, "({})*pi", self.rational),
            k => write!(f, "({})*pi^{}", self.rational, k),
        }
    }
}

pub(crate) fn biguint_ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact rational value of a finite `f64`.
pub(crate) fn exact_radius(eps: f64) -> Result<BigRational> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidRadius(eps));
    }
    BigRational::from_float(eps).ok_or(Error::InvalidRadius(eps))
}

/// `alpha! / (|alpha| + n)!`, the moment of `|w^alpha|^2` over the unit ball
/// divided by `pi^n`.
pub fn unit_ball_moment_ratio(alpha: &MultiIndex) -> BigRational {
    let n = alpha.dim() as u64;
    biguint_ratio(alpha.factorial(), factorial(alpha.degree() as u64 + n))
}

/// `int_{|w| < eps} |w^alpha|^2 dlambda = eps^(2|alpha| + 2n) pi^n alpha! / (|alpha| + n)!`.
///
/// `eps` is converted exactly from its binary value, so scaling identities
/// hold without rounding.
pub fn ball_moment(alpha: &MultiIndex, eps: f64) -> Result<ExactScalar> {
    let n = alpha.dim();
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    let e = exact_radius(eps)?;
    let scale = num_traits::pow(e, 2 * alpha.degree() as usize + 2 * n);
    Ok(ExactScalar::new(scale * unit_ball_moment_ratio(alpha), n as i32))
}

/// Recomputes `I(alpha)` by peeling off the last variable,
/// `I(alpha) = (|alpha'| + n - 1)! alpha_n! / (|alpha| + n)! * I(alpha')`,
/// down to `I((a)) = 1 / (a + 1)`, and compares with the closed form.
pub fn moment_recursion_check(alpha: &MultiIndex) -> bool {
    if alpha.dim() == 0 {
        return false;
    }
    let recursive = recursive_moment(alpha.exponents());
    recursive == unit_ball_moment_ratio(alpha)
}

fn recursive_moment(exps: &[u32]) -> BigRational {
    let n = exps.len() as u64;
    if n == 1 {
        return BigRational::new(BigInt::one(), BigInt::from(exps[0] as u64 + 1));
    }
    let (head, last) = exps.split_at(exps.len() - 1);
    let head_degree: u64 = head.iter().map(|&a| a as u64).sum();
    let total: u64 = head_degree + last[0] as u64;
    let step = biguint_ratio(
        factorial(head_degree + n - 1) * factorial(last[0] as u64),
        factorial(total + n),
    );
    step * recursive_moment(head)
}
