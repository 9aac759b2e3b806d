//! Tracking-error statistics and convergence diagnostics.

use serde::Serialize;

use crate::error::{Error, Result};

/// RMS / max / mean of absolute errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorSummary {
    pub rms: f64,
    pub max_abs: f64,
    pub mean_abs: f64,
    pub n: usize,
}

pub fn summarize(errors: &[f64]) -> Result<ErrorSummary> {
    if errors.is_empty() {
        return Err(Error::Empty("error sequence"));
    }
    let n = errors.len();
    let mut sq = 0.0;
    let mut abs = 0.0;
    let mut max_abs: f64 = 0.0;
    for e in errors {
        sq += e * e;
        abs += e.abs();
        max_abs = max_abs.max(e.abs());
    }
    let rms = (sq / n as f64).sqrt();
    let mean_abs = abs / n as f64;
    // Rounding can put a constant sequence's rms an ulp above its max.
    Ok(ErrorSummary {
        rms: rms.min(max_abs),
        max_abs,
        mean_abs: mean_abs.min(rms.min(max_abs)),
        n,
    })
}

/// Five-number summary plus Tukey fences (`1.5·IQR`).
///
/// Quartiles interpolate linearly between order statistics at rank
/// `(n − 1)·p` (Hyndman–Fan type 7).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub lower_fence: f64,
    pub upper_fence: f64,
    pub outliers: usize,
}

fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn box_stats(errors: &[f64]) -> Result<BoxStats> {
    if errors.is_empty() {
        return Err(Error::Empty("error sequence"));
    }
    if errors.iter().any(|e| e.is_nan()) {
        return Err(Error::NonFinite("error sample"));
    }
    let mut sorted = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&sorted, 0.25);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    let lower_fence = q1 - 1.5 * iqr;
    let upper_fence = q3 + 1.5 * iqr;
    Ok(BoxStats {
        min: sorted[0],
        q1,
        median: quantile_sorted(&sorted, 0.5),
        q3,
        max: sorted[sorted.len() - 1],
        lower_fence,
        upper_fence,
        outliers: sorted
            .iter()
            .filter(|e| **e < lower_fence || **e > upper_fence)
            .count(),
    })
}

/// Earliest sample time after which `|e|` stays strictly below `threshold`
/// for the rest of the trace. `None` if the last sample is not below it.
pub fn convergence_time(times: &[f64], errors: &[f64], threshold: f64) -> Option<f64> {
    debug_assert_eq!(times.len(), errors.len());
    let last_bad = errors.iter().rposition(|e| !(e.abs() < threshold));
    match last_bad {
        None => times.first().copied(),
        Some(k) if k + 1 < times.len() => Some(times[k + 1]),
        Some(_) => None,
    }
}

/// Parameters of the finite-time stability estimate for
/// `V̇ + κ₁V + κ₂V^γ ≤ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteTimeParams {
    pub kappa1: f64,
    pub kappa2: f64,
    pub gamma: f64,
    pub v0: f64,
    pub t0: f64,
}

impl FiniteTimeParams {
    pub fn validate(&self) -> Result<()> {
        if self.kappa1 > 0.0
            && self.kappa2 > 0.0
            && self.gamma > 0.0
            && self.gamma < 1.0
            && self.v0 >= 0.0
        {
            Ok(())
        } else {
            Err(Error::Config(
                "finite-time bound needs kappa1, kappa2 > 0, 0 < gamma < 1, v0 >= 0".into(),
            ))
        }
    }
}

/// `t₀ + ln((κ₁V₀^{1−γ} + κ₂)/κ₂) / (κ₁(1 − γ))`.
pub fn finite_time_bound(p: &FiniteTimeParams) -> f64 {
    let one_minus = 1.0 - p.gamma;
    p.t0 + ((p.kappa1 * p.v0.powf(one_minus) + p.kappa2) / p.kappa2).ln() / (p.kappa1 * one_minus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn summarize_examples() {
        let s = summarize(&[0.5; 100]).unwrap();
        assert_abs_diff_eq!(s.rms, 0.5, epsilon = 1e-15);
        assert_eq!(s.max_abs, 0.5);
        assert_abs_diff_eq!(s.mean_abs, 0.5, epsilon = 1e-15);

        let s = summarize(&[0.3, -0.4]).unwrap();
        assert_abs_diff_eq!(s.rms, 0.125f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(s.rms, 0.353553, epsilon = 1e-6);
        assert_eq!(s.max_abs, 0.4);
        assert_abs_diff_eq!(s.mean_abs, 0.35, epsilon = 1e-15);

        assert!(matches!(summarize(&[]), Err(Error::Empty(_))));
    }

    #[test]
    fn box_stats_examples() {
        let b = box_stats(&[5.0, 1.0, 4.0, 2.0, 3.0]).unwrap();
        assert_eq!(
            (b.min, b.q1, b.median, b.q3, b.max),
            (1.0, 2.0, 3.0, 4.0, 5.0)
        );
        assert_eq!((b.lower_fence, b.upper_fence, b.outliers), (-1.0, 7.0, 0));

        let b = box_stats(&[0.7]).unwrap();
        assert_eq!(
            (b.min, b.q1, b.median, b.q3, b.max),
            (0.7, 0.7, 0.7, 0.7, 0.7)
        );
        assert!(box_stats(&[]).is_err());

        let b = box_stats(&[1.0, 2.0, 3.0, 4.0, 100.0]).unwrap();
        assert_eq!(b.outliers, 1);
    }

    #[test]
    fn convergence_time_examples() {
        let dt = 1e-4;
        let times: Vec<f64> = (0..100_000).map(|k| k as f64 * dt).collect();
        let errs: Vec<f64> = times.iter().map(|t| (-t).exp()).collect();
        let tc = convergence_time(&times, &errs, 0.01).unwrap();
        assert!((tc - 100f64.ln()).abs() <= dt, "{tc}");

        assert_eq!(
            convergence_time(&[0.0, 1.0], &[0.001, 0.002], 0.01),
            Some(0.0)
        );
        assert_eq!(convergence_time(&[0.0, 1.0], &[0.001, 0.2], 0.01), None);
        assert_eq!(
            convergence_time(&[0.0, 1.0, 2.0], &[0.5, 0.2, 0.001], 0.01),
            Some(2.0)
        );
    }

    #[test]
    fn finite_time_bound_examples() {
        let p = FiniteTimeParams {
            kappa1: 1.0,
            kappa2: 1.0,
            gamma: 0.5,
            v0: 1.0,
            t0: 0.0,
        };
        assert_abs_diff_eq!(finite_time_bound(&p), 2.0 * 2f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(finite_time_bound(&p), 1.386294, epsilon = 1e-6);
        let p0 = FiniteTimeParams {
            v0: 0.0,
            t0: 3.0,
            ..p
        };
        assert_eq!(finite_time_bound(&p0), 3.0);
    }

    proptest! {
        #[test]
        fn summary_ordering_and_permutation(mut xs in prop::collection::vec(-5.0f64..5.0, 1..200)) {
            let s = summarize(&xs).unwrap();
            prop_assert!(s.mean_abs <= s.rms && s.rms <= s.max_abs && s.rms >= 0.0);
            xs.reverse();
            let r = summarize(&xs).unwrap();
            prop_assert!((r.rms - s.rms).abs() < 1e-12);
            prop_assert!((r.mean_abs - s.mean_abs).abs() < 1e-12);
            prop_assert_eq!(r.max_abs, s.max_abs);
        }

        #[test]
        fn box_stats_are_ordered(xs in prop::collection::vec(-5.0f64..5.0, 1..200)) {
            let b = box_stats(&xs).unwrap();
            prop_assert!(b.min <= b.q1 && b.q1 <= b.median && b.median <= b.q3 && b.q3 <= b.max);
        }

        #[test]
        fn bound_monotone_in_v0(
            k1 in 0.1f64..10.0, k2 in 0.1f64..10.0, g in 0.05f64..0.95,
            a in 0.0f64..10.0, b in 0.0f64..10.0,
        ) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let mk = |v0| FiniteTimeParams { kappa1: k1, kappa2: k2, gamma: g, v0, t0: 0.0 };
            prop_assert!(finite_time_bound(&mk(lo)) <= finite_time_bound(&mk(hi)));
        }
    }
}
