//! Seeded random test data.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::hardy::{BasisSpec, HardySection};
use crate::model_curvature::TangentVector;
use crate::multiindex::enumerate;

/// Default decay of random section coefficients per degree.
pub const DEFAULT_DECAY: f64 = 0.7;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `xi_alpha = decay^|alpha| * (complex standard normal)` for every `|alpha| <= N`.
pub fn random_section<R: Rng + ?Sized>(spec: BasisSpec, decay: f64, rng: &mut R) -> HardySection {
    let coeffs = enumerate(spec.n, spec.degree)
        .expect("valid spec")
        .iter()
        .map(|a| complex_normal(rng) * decay.powi(a.degree() as i32))
        .collect();
    HardySection::new(spec, coeffs).expect("length matches")
}

pub fn random_tangent<R: Rng + ?Sized>(n: usize, rng: &mut R) -> TangentVector {
    TangentVector::new((0..n).map(|_| complex_normal(rng)).collect())
}

pub fn random_unit_tangent<R: Rng + ?Sized>(n: usize, rng: &mut R) -> TangentVector {
    loop {
        let v = random_tangent(n, rng);
        let norm = v.norm();
        if norm > 1e-6 {
            return v.scaled(1.0 / norm);
        }
    }
}
