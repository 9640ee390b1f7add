//! Basis-vector verification of the ladder and commutator norm estimates.

use serde::Serialize;

use super::operators::{ladder_d, ladder_dstar, mult_monomial, mult_w, mult_wstar, OperatorSum};
use super::BasisSpec;
use crate::multiindex::{enumerate, sup_norm, MultiIndex};

#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Largest `||T e_alpha|| / bound(alpha)` on the grid.
    pub worst_ratio: f64,
    pub worst_alpha: Option<MultiIndex>,
    pub cases: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct LadderBoundsReport {
    pub n: usize,
    pub eps: f64,
    pub degree: u32,
    pub checks: Vec<BoundCheck>,
}

impl LadderBoundsReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Relative slack for rounding in the square roots.
const SLACK: f64 = 1e-12;

struct Acc {
    name: &'static str,
    worst: f64,
    at: Option<MultiIndex>,
    cases: usize,
}

impl Acc {
    fn new(name: &'static str) -> Self {
        Acc { name, worst: 0.0, at: None, cases: 0 }
    }

    fn record(&mut self, value: f64, bound: f64, alpha: &MultiIndex) {
        self.cases += 1;
        let ratio = if bound > 0.0 { value / bound } else if value == 0.0 { 0.0 } else { f64::INFINITY };
        if self.at.is_none() || ratio > self.worst {
            self.worst = ratio;
            self.at = Some(alpha.clone());
        }
    }

    fn finish(self) -> BoundCheck {
        BoundCheck {
            name: self.name,
            passed: self.worst <= 1.0 + SLACK,
            worst_ratio: self.worst,
            worst_alpha: self.at,
            cases: self.cases,
        }
    }
}

/// Checks, for every `|alpha| <= N` and every axis pair:
/// `||W^mu e_alpha|| <= s_mu eps^|mu|` (all `|mu| <= 4`),
/// `||D_m e_alpha|| <= |alpha|+n`, `||D*_l e_alpha|| <= |alpha|+n+1`,
/// `||[D*_l, D_m] e_alpha|| <= 2(|alpha|+n)`,
/// `||[W*_l, W_m] e_alpha|| <= eps^2 / (|alpha|+n)`,
/// `||[W*_l, D_m] e_alpha|| <= eps` and `||[D*_l, W_m] e_alpha|| <= eps`.
pub fn verify_ladder_bounds(spec: &BasisSpec) -> LadderBoundsReport {
    verify_ladder_bounds_with(spec, 4)
}

pub fn verify_ladder_bounds_with(spec: &BasisSpec, mu_max: u32) -> LadderBoundsReport {
    let n = spec.n;
    let eps = spec.eps;
    let alphas = spec.indices();

    let mut w_mu = Acc::new("w_mu");
    for mu in enumerate(n, mu_max).expect("n >= 1").iter().filter(|m| !m.is_zero()) {
        let op = OperatorSum::from(mult_monomial(mu, spec));
        let bound = sup_norm(mu) * eps.powi(mu.degree() as i32);
        for a in &alphas {
            w_mu.record(op.basis_image_norm(a), bound, a);
        }
    }

    let mut d = Acc::new("d");
    let mut dstar = Acc::new("dstar");
    let mut dstar_d = Acc::new("comm_dstar_d");
    let mut wstar_w = Acc::new("comm_wstar_w");
    let mut wstar_d = Acc::new("comm_wstar_d");
    let mut dstar_w = Acc::new("comm_dstar_w");
    for m in 0..n {
        let dm = OperatorSum::from(ladder_d(m, spec));
        let wm = OperatorSum::from(mult_w(m, spec));
        for a in &alphas {
            let deg = a.degree() as f64 + n as f64;
            d.record(dm.basis_image_norm(a), deg, a);
        }
        for l in 0..n {
            let dl = OperatorSum::from(ladder_dstar(l, spec));
            let wl = OperatorSum::from(mult_wstar(l, spec));
            let c1 = dl.commutator(&dm);
            let c2 = wl.commutator(&wm);
            let c3 = wl.commutator(&dm);
            let c4 = dl.commutator(&wm);
            for a in &alphas {
                let deg = a.degree() as f64 + n as f64;
                if m == 0 {
                    dstar.record(dl.basis_image_norm(a), deg + 1.0, a);
                }
                dstar_d.record(c1.basis_image_norm(a), 2.0 * deg, a);
                wstar_w.record(c2.basis_image_norm(a), eps * eps / deg, a);
                wstar_d.record(c3.basis_image_norm(a), eps, a);
                dstar_w.record(c4.basis_image_norm(a), eps, a);
            }
        }
    }

    LadderBoundsReport {
        n,
        eps,
        degree: spec.degree,
        checks: [w_mu, d, dstar, dstar_d, wstar_w, wstar_d, dstar_w]
            .into_iter()
            .map(Acc::finish)
            .collect(),
    }
}
