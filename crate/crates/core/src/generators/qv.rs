//! Normalized quadratic-variation statistic of fBm.
//!
//! `xi_{i,m} = (m^{2H} (Delta B^H_i)^2 - 1) / sqrt(m)`, optionally divided by
//! `sigma_H` so the cumulative path has a *standard* Brownian limit.

use crate::error::{LabError, Result};
use crate::special::hurwitz_zeta;

use super::fgn::fgn_autocovariance;

/// Lags summed explicitly before the asymptotic tail takes over.
const EXPLICIT_LAGS: u64 = 4096;

pub fn check_qv_hurst(hurst: f64) -> Result<()> {
    if !(hurst > 0.0 && hurst < 0.75) {
        return Err(LabError::domain(format!(
            "quadratic-variation statistic needs 0 < H < 3/4 for a Brownian limit, got H = {hurst}"
        )));
    }
    Ok(())
}

/// Generalized binomial coefficient `C(alpha, k)`.
fn binomial(alpha: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (alpha - i as f64) / (i as f64 + 1.0))
}

/// `sum_{r >= 1} rho_H(r)^2`.
///
/// Lags up to 4096 are summed directly. Beyond that,
/// `rho_H(r) = sum_{k>=1} C(2H, 2k) r^{2H-2k}`, so the squared tail is a
/// double series of Hurwitz zeta values. Its terms shrink like
/// 4096^{-2(k+l)}, and summation stops once a term is below 1e-18.
pub fn squared_autocovariance_sum(hurst: f64) -> Result<f64> {
    check_qv_hurst(hurst)?;
    let head: f64 =
        crate::mc::compensated_sum((1..=EXPLICIT_LAGS).map(|r| fgn_autocovariance(hurst, r).powi(2)));
    let two_h = 2.0 * hurst;
    let coeffs: Vec<f64> = (1..=8).map(|k| binomial(two_h, 2 * k)).collect();
    let q = (EXPLICIT_LAGS + 1) as f64;
    let mut tail = 0.0;
    for (k, ak) in coeffs.iter().enumerate() {
        for (l, al) in coeffs.iter().enumerate() {
            let c = ak * al;
            if c == 0.0 {
                continue;
            }
            let s = 2.0 * (k + 1 + l + 1) as f64 - 2.0 * two_h;
            let term = c * hurwitz_zeta(s, q);
            tail += term;
            if term.abs() < 1e-18 {
                break;
            }
        }
    }
    Ok(head + tail)
}

/// Limiting standard deviation `sqrt(2 + 4 sum_{r>=1} rho_H(r)^2)` of the
/// centred QV sums.
#[allow(non_snake_case)]
pub fn sigma_H(hurst: f64) -> Result<f64> {
    Ok((2.0 + 4.0 * squared_autocovariance_sum(hurst)?).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brownian_case_is_sqrt_two() {
        assert_eq!(sigma_H(0.5).unwrap(), std::f64::consts::SQRT_2);
    }

    #[test]
    fn boundary_rejected() {
        assert!(sigma_H(0.75).is_err());
        assert!(sigma_H(0.9).is_err());
        assert!(sigma_H(0.0).is_err());
    }

    #[test]
    fn increasing_on_upper_range() {
        let mut prev = sigma_H(0.5).unwrap();
        for k in 1..25 {
            let h = 0.5 + 0.01 * k as f64;
            let s = sigma_H(h).unwrap();
            assert!(s > prev, "sigma_H not increasing at H={h}");
            prev = s;
        }
    }

    #[test]
    fn tail_matches_longer_explicit_sum() {
        // Explicit sum to 2^16 plus the leading-order integral tail.
        let h = 0.3;
        let big = 1u64 << 16;
        let direct: f64 = (1..=big).map(|r| fgn_autocovariance(h, r).powi(2)).sum();
        let c = h * (2.0 * h - 1.0);
        let tail = c * c * (big as f64 + 0.5).powf(4.0 * h - 3.0) / (3.0 - 4.0 * h);
        let got = squared_autocovariance_sum(h).unwrap();
        assert!((got - direct - tail).abs() < 1e-13, "{got} vs {}", direct + tail);
    }
}
