use crate::error::{LabError, Result};
use crate::special::normal_cdf;

/// Minimum sample size accepted by [`ks_statistic`].
pub const KS_MIN_SAMPLES: usize = 10;

/// Reference law for [`ks_statistic`].
#[derive(Debug, Clone, Copy)]
pub enum KsReference<'a> {
    StandardNormal,
    Sample(&'a [f64]),
}

fn sorted(xs: &[f64]) -> Result<Vec<f64>> {
    if xs.len() < KS_MIN_SAMPLES {
        return Err(LabError::domain(format!(
            "KS statistic needs at least {KS_MIN_SAMPLES} samples, got {}",
            xs.len()
        )));
    }
    if xs.iter().any(|x| x.is_nan()) {
        return Err(LabError::domain("KS statistic of a sample containing NaN"));
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Kolmogorov-Smirnov distance `sup_x |F_n(x) - F(x)|`.
pub fn ks_statistic(samples: &[f64], reference: KsReference<'_>) -> Result<f64> {
    let xs = sorted(samples)?;
    match reference {
        KsReference::StandardNormal => {
            let n = xs.len() as f64;
            Ok(xs.iter().enumerate().fold(0.0_f64, |d, (i, &x)| {
                let cdf = normal_cdf(x);
                d.max((i + 1) as f64 / n - cdf).max(cdf - i as f64 / n)
            }))
        }
        KsReference::Sample(other) => {
            let ys = sorted(other)?;
            let (n1, n2) = (xs.len() as f64, ys.len() as f64);
            let (mut i, mut j) = (0, 0);
            let mut d = 0.0_f64;
            while i < xs.len() && j < ys.len() {
                let x = xs[i].min(ys[j]);
                while i < xs.len() && xs[i] <= x {
                    i += 1;
                }
                while j < ys.len() && ys[j] <= x {
                    j += 1;
                }
                d = d.max((i as f64 / n1 - j as f64 / n2).abs());
            }
            Ok(d)
        }
    }
}

/// Asymptotic one-sample critical value `c(level) / sqrt(n)` for levels 5% and 1%.
pub fn ks_critical_value(n: usize, level: f64) -> f64 {
    let c = if level <= 0.01 { 1.628 } else { 1.358 };
    c / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let a: Vec<f64> = (0..20).map(|i| (i as f64).sin()).collect();
        assert_eq!(ks_statistic(&a, KsReference::Sample(&a)).unwrap(), 0.0);
        assert_eq!(
            ks_statistic(&[0.0; 12], KsReference::StandardNormal).unwrap(),
            0.5
        );
        assert!(ks_statistic(&[], KsReference::StandardNormal).is_err());
        assert!(ks_statistic(&[1.0; 5], KsReference::StandardNormal).is_err());
    }

    #[test]
    fn two_sample_disjoint() {
        let a: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..10).map(|i| 100.0 + i as f64).collect();
        assert_eq!(ks_statistic(&a, KsReference::Sample(&b)).unwrap(), 1.0);
        let c: Vec<f64> = (0..20).map(|i| i as f64 / 2.0).collect();
        // at every integer k the two ECDFs are (k+1)/10 and (2k+1)/20
        assert!((ks_statistic(&a, KsReference::Sample(&c)).unwrap() - 0.05).abs() < 1e-15);
    }
}
