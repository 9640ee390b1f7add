//! Exact arithmetic in `Q[a, b] / (a^2, b^2)`, enough to read off the mixed
//! second derivative of a determinant at the origin.

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};

/// `c + x a + y b + xy ab`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dual {
    pub c: BigRational,
    pub a: BigRational,
    pub b: BigRational,
    pub ab: BigRational,
}

impl Dual {
    pub fn new(c: BigRational, a: BigRational, b: BigRational, ab: BigRational) -> Self {
        Dual { c, a, b, ab }
    }

    pub fn one() -> Self {
        let z = BigRational::zero();
        Dual::new(BigRational::from_integer(1.into()), z.clone(), z.clone(), z)
    }

    pub fn mul(&self, o: &Dual) -> Dual {
        Dual {
            c: &self.c * &o.c,
            a: &self.c * &o.a + &self.a * &o.c,
            b: &self.c * &o.b + &self.b * &o.c,
            ab: &self.c * &o.ab + &self.a * &o.b + &self.b * &o.a + &self.ab * &o.c,
        }
    }

    pub fn sub(&self, o: &Dual) -> Dual {
        Dual {
            c: &self.c - &o.c,
            a: &self.a - &o.a,
            b: &self.b - &o.b,
            ab: &self.ab - &o.ab,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_zero() && self.a.is_zero() && self.b.is_zero() && self.ab.is_zero()
    }

    /// Inverse of a unit (nonzero constant part).
    pub fn inverse(&self) -> Result<Dual> {
        if self.c.is_zero() {
            return Err(Error::SingularGram);
        }
        let ic = self.c.recip();
        let ic2 = &ic * &ic;
        Ok(Dual {
            a: -(&self.a * &ic2),
            b: -(&self.b * &ic2),
            ab: (&self.a * &self.b * &ic * BigRational::from_integer(2.into()) - &self.ab) * &ic2,
            c: ic,
        })
    }

    /// `d_a d_b log(self)` at the origin: `ab/c - a b / c^2`.
    pub fn log_mixed_derivative(&self) -> Result<BigRational> {
        if self.c.is_zero() {
            return Err(Error::SingularGram);
        }
        Ok(&self.ab / &self.c - &self.a * &self.b / (&self.c * &self.c))
    }
}

/// Determinant by elimination without pivoting; every pivot must be a unit,
/// which holds when the constant part is diagonal and invertible.
pub fn determinant(mut m: Vec<Vec<Dual>>) -> Result<Dual> {
    let r = m.len();
    let mut det = Dual::one();
    for i in 0..r {
        let pivot = m[i][i].clone();
        let inv = pivot.inverse()?;
        det = det.mul(&pivot);
        for row in (i + 1)..r {
            if m[row][i].is_zero() {
                continue;
            }
            let factor = m[row][i].mul(&inv);
            for col in i..r {
                let t = factor.mul(&m[i][col]);
                m[row][col] = m[row][col].sub(&t);
            }
        }
    }
    Ok(det)
}
