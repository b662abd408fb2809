//! First-moment threshold probabilities, evaluated in natural-log space.
//!
//! `b_k` is the smallest `p` for which the expected number of fully open
//! up-step paths ending on the mid arc reaches one:
//! `C(k, mid) * 2^(k - mid) * p^k = 1`. Raw counts overflow `f64` near
//! `k = 75`, so everything here works with logarithms; the exact big-integer
//! rows in [`crate::count`] serve as the accuracy oracle.

use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `2^(-3/2)`, the value the bound sequence converges to.
pub const LIMIT: f64 = 0.353_553_390_593_273_73;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Below this `min(i, k - i)` the log is summed term by term; above it the
/// Stirling form is used.
const STIRLING_CUTOVER: u64 = 32;

/// Mid index: `(k-1)/2` for odd `k`, `k/2 - 1` for even `k`.
pub fn mid_index(k: u64) -> u64 {
    if k % 2 == 1 {
        (k - 1) / 2
    } else {
        (k / 2).saturating_sub(1)
    }
}

/// Natural log of `C(k, i)`.
pub fn log_binomial(k: u64, i: u64) -> Result<f64> {
    if i > k {
        return Err(Error::IndexOutOfRange { k, i });
    }
    let m = i.min(k - i);
    if m < STIRLING_CUTOVER {
        Ok(log_binomial_sum(k, m))
    } else {
        Ok(log_binomial_stirling(k, m))
    }
}

/// `sum_{j=1..m} ln((k-m+j)/j)`; every ratio is at least 2 so each log is
/// well conditioned.
fn log_binomial_sum(k: u64, m: u64) -> f64 {
    let base = (k - m) as f64;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for j in 1..=m {
        let j = j as f64;
        let t = ((base + j) / j).ln();
        // Neumaier compensation
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

/// Stirling series for `ln n! - ln m! - ln r!`, rearranged so that the
/// large `n ln n` terms cancel analytically.
fn log_binomial_stirling(n: u64, m: u64) -> f64 {
    let r = n - m;
    let (nf, mf, rf) = (n as f64, m as f64, r as f64);
    let main = mf * (nf / mf).ln() + rf * (nf / rf).ln();
    let half = 0.5 * (nf / (mf * rf)).ln() - LN_SQRT_2PI;
    main + half + (stirling_tail(nf) - stirling_tail(mf) - stirling_tail(rf))
}

/// `ln x! - [(x + 1/2) ln x - x + ln sqrt(2 pi)]` for `x >= 32`.
fn stirling_tail(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    inv * (1.0 / 12.0
        - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))))
}

/// Natural log of `C(k,i) * 2^(k-i)`.
pub fn log_path_count(k: u64, i: u64) -> Result<f64> {
    Ok(log_binomial(k, i)? + (k - i) as f64 * LN_2)
}

/// Smallest `p` with `C(k,i) * 2^(k-i) * p^k >= 1`.
pub fn threshold_p(k: u64, i: u64) -> Result<f64> {
    if k == 0 {
        return Err(Error::ZeroGeneration);
    }
    Ok((-log_path_count(k, i)? / k as f64).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundPoint {
    pub k: u64,
    pub mid: u64,
    /// `ln(C(k, mid) * 2^(k - mid))`
    pub log_count: f64,
    /// Exact first-moment threshold, `exp(-log_count / k)`.
    pub b_k: f64,
    /// The limit integrand `1 / (2^(1/2) * C(k, mid)^(1/k))`, which drops the
    /// `2^(1/2)` (odd `k`) or `2` (even `k`) prefactor of the count and so
    /// differs from `b_k` by a factor of `2^(1/(2k))` or `2^(1/k)`.
    pub b_k_displayed: f64,
}

impl BoundPoint {
    pub fn abs_err_vs_limit(&self) -> f64 {
        (self.b_k - LIMIT).abs()
    }
}

pub fn bound_at(k: u64) -> Result<BoundPoint> {
    if k == 0 {
        return Err(Error::ZeroGeneration);
    }
    let mid = mid_index(k);
    let log_count = log_path_count(k, mid)?;
    let kf = k as f64;
    let b_k = (-log_count / kf).exp();
    let b_k_displayed = (-(0.5 * LN_2 + log_binomial(k, mid)? / kf)).exp();
    Ok(BoundPoint {
        k,
        mid,
        log_count,
        b_k,
        b_k_displayed,
    })
}

/// [`bound_at`] over `ks`, preserving order.
pub fn bound_series(ks: &[u64]) -> Result<Vec<BoundPoint>> {
    if ks.is_empty() {
        return Err(Error::EmptyInput("k list"));
    }
    ks.par_iter().map(|&k| bound_at(k)).collect()
}

/// Finite-`k` log of the expected number of open paths to the mid arc.
/// The k-independent prefactor of the limit form is omitted; it never moves
/// the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiEstimate {
    pub k: u64,
    pub p: f64,
    pub log_psi: f64,
}

pub fn psi_finite(k: u64, p: f64) -> Result<PsiEstimate> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidProbability(p, "(0, 1]"));
    }
    let point = bound_at(k)?;
    Ok(PsiEstimate {
        k,
        p,
        log_psi: point.log_count + k as f64 * p.ln(),
    })
}

/// `C(k, (k-1)/2)^(1/k)` for odd `k`; tends to 2 from below.
pub fn binom_kth_root_limit_check(k: u64) -> Result<f64> {
    if k.is_multiple_of(2) {
        return Err(Error::EvenGeneration(k));
    }
    Ok((log_binomial(k, (k - 1) / 2)? / k as f64).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn mid_index_examples() {
        assert_eq!(mid_index(5), 2);
        assert_eq!(mid_index(4), 1);
        assert_eq!(mid_index(1), 0);
        assert_eq!(mid_index(2), 0);
    }

    #[test]
    fn log_binomial_examples() {
        assert_relative_eq!(log_binomial(4, 2).unwrap(), 6f64.ln(), max_relative = 1e-15);
        assert_eq!(log_binomial(17, 0).unwrap(), 0.0);
        assert_eq!(log_binomial(17, 17).unwrap(), 0.0);
        assert!(log_binomial(3, 5).is_err());
    }

    #[test]
    fn routes_agree_across_cutover() {
        for k in [64u64, 100, 1000, 10_000, 1_000_000] {
            for m in [32u64, 33, 40, k / 3, k / 2] {
                let a = log_binomial_sum(k, m);
                let b = log_binomial_stirling(k, m);
                assert_relative_eq!(a, b, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn threshold_examples() {
        assert_relative_eq!(threshold_p(1, 0).unwrap(), 0.5, max_relative = 1e-15);
        assert_relative_eq!(threshold_p(2, 0).unwrap(), 0.5, max_relative = 1e-15);
        assert_relative_eq!(
            threshold_p(3, 1).unwrap(),
            12f64.powf(-1.0 / 3.0),
            max_relative = 1e-14
        );
        assert_relative_eq!(threshold_p(3, 1).unwrap(), 0.43679, epsilon = 1e-5);
        assert!(threshold_p(3, 4).is_err());
    }

    #[test]
    fn bound_examples() {
        let b1 = bound_at(1).unwrap();
        assert_eq!(b1.mid, 0);
        // count C(1,0) * 2 = 2
        assert_relative_eq!(b1.b_k, 0.5, max_relative = 1e-15);
        assert_relative_eq!(b1.b_k_displayed, 0.5f64.sqrt(), max_relative = 1e-15);
        let b3 = bound_at(3).unwrap();
        assert_relative_eq!(b3.b_k, 12f64.powf(-1.0 / 3.0), max_relative = 1e-14);
        assert_relative_eq!(
            b3.b_k_displayed,
            1.0 / (2f64.sqrt() * 3f64.cbrt()),
            max_relative = 1e-14
        );
        assert_relative_eq!(b3.b_k_displayed, 0.49029, epsilon = 1e-5);
        let b4 = bound_at(4).unwrap();
        // count C(4,1) * 2^3 = 32; displayed form drops the factor 2
        assert_relative_eq!(b4.b_k, 32f64.powf(-0.25), max_relative = 1e-14);
        assert_relative_eq!(b4.b_k_displayed, 16f64.powf(-0.25), max_relative = 1e-14);
        assert!(bound_series(&[]).is_err());
        let far = bound_series(&[100_000]).unwrap();
        assert!(far[0].abs_err_vs_limit() < 1e-3);
    }

    #[test]
    fn psi_examples() {
        assert_relative_eq!(
            psi_finite(2, 1.0).unwrap().log_psi,
            4f64.ln(),
            max_relative = 1e-15
        );
        assert!(psi_finite(1, 0.5).unwrap().log_psi.abs() < 1e-15);
        for k in [1u64, 2, 7, 50, 999] {
            let b = bound_at(k).unwrap().b_k;
            assert!(psi_finite(k, b).unwrap().log_psi.abs() < 1e-9);
        }
        assert!(psi_finite(3, 0.0).is_err());
        assert!(psi_finite(3, 1.2).is_err());
        assert!(psi_finite(3, f64::NAN).is_err());
    }

    #[test]
    fn kth_root_examples() {
        assert_eq!(binom_kth_root_limit_check(1).unwrap(), 1.0);
        let r = binom_kth_root_limit_check(101).unwrap();
        assert!(r < 2.0 && r > 1.95, "{r}");
        assert!((2.0 - binom_kth_root_limit_check(100_001).unwrap()) < 1e-3);
        assert!(matches!(
            binom_kth_root_limit_check(4),
            Err(Error::EvenGeneration(4))
        ));
    }
}
