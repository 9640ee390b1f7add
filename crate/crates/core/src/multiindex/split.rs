use super::{sup_norm, MultiIndex};
use crate::error::{Error, Result};

/// A decomposition `lambda = lambda' + lambda'' + c_l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub left: MultiIndex,
    pub right: MultiIndex,
    /// Axis of the single unit index absorbing the remainder (0-based).
    pub axis: usize,
}

/// Splits `lambda` with `|lambda'| = left_degree` and
/// `|lambda''| = |lambda| - left_degree - 1`, keeping the proportions
/// `lambda'_j / |lambda'|` and `lambda''_j / |lambda''|` close to
/// `lambda_j / |lambda|`.
///
/// Coordinates are permuted so that the largest component comes last; the
/// other components are `floor(t' lambda_j)` and `floor(t'' lambda_j)`, and
/// the last component absorbs the difference. When the floors leave more
/// than one unit behind on the leading axes, single units are moved from the
/// last component to the leading axis with the largest remainder until
/// exactly one unit is left over.
pub fn split_multiindex(lambda: &MultiIndex, left_degree: u32) -> Result<Split> {
    let total = lambda.degree();
    if total < 2 {
        return Err(Error::InfeasibleSplit(format!("|lambda| = {total} < 2")));
    }
    if left_degree >= total {
        return Err(Error::InfeasibleSplit(format!(
            "|lambda'| = {left_degree} must be below |lambda| = {total}"
        )));
    }
    let n = lambda.dim();
    let right_degree = total - left_degree - 1;

    // position of the largest component (last one on ties) moves to the end
    let last = (0..n)
        .rev()
        .max_by_key(|&j| (lambda.get(j), j))
        .expect("nonempty");
    let order: Vec<usize> = (0..n).filter(|&j| j != last).chain(std::iter::once(last)).collect();

    let lam: Vec<u64> = order.iter().map(|&j| lambda.get(j) as u64).collect();
    let (p, q, t) = (left_degree as u64, right_degree as u64, total as u64);
    let mut left: Vec<u64> = vec![0; n];
    let mut right: Vec<u64> = vec![0; n];
    for j in 0..n - 1 {
        left[j] = p * lam[j] / t;
        right[j] = q * lam[j] / t;
    }
    let lead_left: u64 = left[..n - 1].iter().sum();
    let lead_right: u64 = right[..n - 1].iter().sum();
    left[n - 1] = p - lead_left;
    right[n - 1] = q - lead_right;

    loop {
        let residual: Vec<i64> = (0..n)
            .map(|j| lam[j] as i64 - left[j] as i64 - right[j] as i64)
            .collect();
        if residual[n - 1] >= 0 {
            break;
        }
        let j = (0..n - 1)
            .max_by_key(|&j| (residual[j], std::cmp::Reverse(j)))
            .expect("at least two axes when a leading residual exists");
        debug_assert!(residual[j] >= 1);
        // move one unit from the last component of the side that overshoots
        // its target proportion the most
        let over_left = left[n - 1] as f64 - p as f64 * lam[n - 1] as f64 / t as f64;
        let over_right = right[n - 1] as f64 - q as f64 * lam[n - 1] as f64 / t as f64;
        if left[n - 1] > 0 && (over_left >= over_right || right[n - 1] == 0) {
            left[n - 1] -= 1;
            left[j] += 1;
        } else {
            right[n - 1] -= 1;
            right[j] += 1;
        }
    }

    let residual: Vec<u64> = (0..n).map(|j| lam[j] - left[j] - right[j]).collect();
    let slot = residual
        .iter()
        .position(|&r| r == 1)
        .ok_or_else(|| Error::InfeasibleSplit("no unit remainder".into()))?;

    let mut l = vec![0u32; n];
    let mut r = vec![0u32; n];
    for (k, &j) in order.iter().enumerate() {
        l[j] = left[k] as u32;
        r[j] = right[k] as u32;
    }
    Ok(Split {
        left: MultiIndex::new(l),
        right: MultiIndex::new(r),
        axis: order[slot],
    })
}

/// Splits at the fraction `t' = |lambda'| / |lambda|`, which must make
/// `t' |lambda|` an integer in `[0, |lambda| - 1]`.
pub fn split_at_fraction(lambda: &MultiIndex, t_prime: f64) -> Result<Split> {
    let total = lambda.degree() as f64;
    let scaled = t_prime * total;
    let rounded = scaled.round();
    if !(0.0..1.0).contains(&t_prime) || (scaled - rounded).abs() > 1e-9 {
        return Err(Error::InfeasibleSplit(format!(
            "t' = {t_prime} is not realisable for |lambda| = {total}"
        )));
    }
    split_multiindex(lambda, rounded as u32)
}

#[derive(Clone, Debug)]
pub struct SplitBoundReport {
    pub holds: bool,
    /// Largest `s_{lambda'} s_{lambda''} / (e^{n^3} s_lambda |lambda|^n)` over all splits.
    pub worst_bound_ratio: f64,
    /// Smallest `s_{lambda'} s_{lambda''} / s_lambda` over all splits (at least 1).
    pub min_sup_ratio: f64,
    /// Largest `s_{lambda'} / (e^{1/2} s_lambda |lambda|^{1/2})` over degenerate splits.
    pub worst_degenerate_ratio: f64,
}

/// Checks `s_{lambda'} s_{lambda''} <= e^{n^3} s_lambda |lambda|^n` for every
/// split produced by [`split_multiindex`], the sharper
/// `e^{1/2} s_lambda |lambda|^{1/2}` for the degenerate splits with an empty
/// side, and `s_{lambda'} s_{lambda''} >= s_lambda` throughout.
pub fn split_bound_check_report(lambda: &MultiIndex) -> Result<SplitBoundReport> {
    let total = lambda.degree();
    if total < 2 {
        return Err(Error::InfeasibleSplit(format!("|lambda| = {total} < 2")));
    }
    let n = lambda.dim() as f64;
    let s = sup_norm(lambda);
    let cap = (n.powi(3)).exp() * s * (total as f64).powf(n);
    let degenerate_cap = 0.5f64.exp() * s * (total as f64).sqrt();
    let tol = 1e-12;
    let mut report = SplitBoundReport {
        holds: true,
        worst_bound_ratio: 0.0,
        min_sup_ratio: f64::INFINITY,
        worst_degenerate_ratio: 0.0,
    };
    for p in 0..total {
        let split = split_multiindex(lambda, p)?;
        let prod = sup_norm(&split.left) * sup_norm(&split.right);
        report.worst_bound_ratio = report.worst_bound_ratio.max(prod / cap);
        report.min_sup_ratio = report.min_sup_ratio.min(prod / s);
        if split.left.is_zero() || split.right.is_zero() {
            report.worst_degenerate_ratio = report.worst_degenerate_ratio.max(prod / degenerate_cap);
        }
    }
    report.holds = report.worst_bound_ratio <= 1.0 + tol
        && report.min_sup_ratio >= 1.0 - tol
        && report.worst_degenerate_ratio <= 1.0 + tol;
    Ok(report)
}

pub fn split_bound_check(lambda: &MultiIndex) -> Result<bool> {
    Ok(split_bound_check_report(lambda)?.holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::enumerate;

    fn conserves(lambda: &MultiIndex, s: &Split) -> bool {
        s.left.add(&s.right).raised(s.axis) == *lambda
    }

    #[test]
    fn split_of_zero_two() {
        let lambda = MultiIndex::from([0, 2]);
        let s = split_at_fraction(&lambda, 0.5).unwrap();
        assert!(conserves(&lambda, &s));
        assert_eq!(s.left.degree(), 1);
        assert_eq!(s.right.degree(), 0);
    }

    #[test]
    fn three_five_at_three_eighths() {
        let lambda = MultiIndex::from([3, 5]);
        let s = split_at_fraction(&lambda, 3.0 / 8.0).unwrap();
        assert!(conserves(&lambda, &s));
        assert_eq!(s.left.degree(), 3);
        assert_eq!(s.right.degree(), 4);
        assert_eq!(s.left, MultiIndex::from([1, 2]));
        assert_eq!(s.right, MultiIndex::from([1, 3]));
        assert_eq!(s.axis, 0);
    }

    #[test]
    fn one_one_conserves() {
        let lambda = MultiIndex::from([1, 1]);
        for p in 0..2 {
            assert!(conserves(&lambda, &split_multiindex(&lambda, p).unwrap()));
        }
    }

    #[test]
    fn infeasible_fractions_rejected() {
        let lambda = MultiIndex::from([3, 5]);
        assert!(split_at_fraction(&lambda, 0.3).is_err());
        assert!(split_at_fraction(&lambda, 1.0).is_err());
        assert!(split_multiindex(&lambda, 8).is_err());
        assert!(split_multiindex(&MultiIndex::from([1, 0]), 0).is_err());
    }

    #[test]
    fn every_split_is_valid_on_a_grid() {
        for n in 1..=4 {
            for lambda in enumerate(n, 14).unwrap() {
                if lambda.degree() < 2 {
                    continue;
                }
                for p in 0..lambda.degree() {
                    let s = split_multiindex(&lambda, p).unwrap();
                    assert!(conserves(&lambda, &s), "{lambda:?} p={p} {s:?}");
                    assert_eq!(s.left.degree(), p);
                }
            }
        }
    }

    #[test]
    fn bound_examples() {
        assert!(split_bound_check(&MultiIndex::from([2, 0])).unwrap());
        let r = split_bound_check_report(&MultiIndex::from([2, 3])).unwrap();
        assert!(r.worst_degenerate_ratio > 0.0);
        assert!(r.holds);
    }
}
