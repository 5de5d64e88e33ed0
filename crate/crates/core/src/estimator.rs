//! Bernoulli proportion estimation from ancilla outcomes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};
use crate::predicate::ExactFraction;

/// Shot budget `P` with the additive accuracy `epsilon` it buys at failure
/// probability `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub shots: u64,
    pub epsilon: f64,
    pub delta: f64,
}

fn check_open_unit(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must lie strictly between 0 and 1",
        })
    }
}

/// Two-sided Hoeffding shot count `ceil(ln(2/delta) / (2 epsilon^2))`.
///
/// The count guarantees `Pr[|f_hat - f| > epsilon] <= delta` for every `f`;
/// nothing about the register width enters it.
pub fn plan_shots(epsilon: f64, delta: f64) -> Result<SamplingPlan> {
    check_open_unit("epsilon", epsilon)?;
    check_open_unit("delta", delta)?;
    let shots = ((2.0 / delta).ln() / (2.0 * epsilon * epsilon)).ceil().max(1.0);
    Ok(SamplingPlan {
        shots: shots as u64,
        epsilon,
        delta,
    })
}

/// Hoeffding half-width `sqrt(ln(2/delta) / (2P))` for a fixed shot count.
pub fn hoeffding_half_width(shots: u64, delta: f64) -> Result<f64> {
    check_open_unit("delta", delta)?;
    if shots == 0 {
        return Err(Error::InvalidCounts("shot count must be positive".into()));
    }
    Ok(((2.0 / delta).ln() / (2.0 * shots as f64)).sqrt())
}

impl SamplingPlan {
    /// Plan with an explicit shot count; `epsilon` is the Hoeffding
    /// half-width that count achieves at `delta`.
    pub fn with_shots(shots: u64, delta: f64) -> Result<Self> {
        Ok(SamplingPlan {
            shots,
            epsilon: hoeffding_half_width(shots, delta)?,
            delta,
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CiMethod {
    #[default]
    Wilson,
    ClopperPearson,
}

impl CiMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            CiMethod::Wilson => "wilson",
            CiMethod::ClopperPearson => "clopper_pearson",
        }
    }
}

impl fmt::Display for CiMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CiMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "wilson" => Ok(CiMethod::Wilson),
            "clopper-pearson" | "clopper_pearson" => Ok(CiMethod::ClopperPearson),
            other => Err(format!("unknown interval method {other:?}")),
        }
    }
}

fn check_counts(ones: u64, shots: u64) -> Result<()> {
    if shots == 0 {
        Err(Error::InvalidCounts("shot count must be positive".into()))
    } else if ones > shots {
        Err(Error::InvalidCounts(format!("{ones} ones out of {shots} shots")))
    } else {
        Ok(())
    }
}

/// `ones / shots`.
pub fn estimate_fraction(ones: u64, shots: u64) -> Result<f64> {
    check_counts(ones, shots)?;
    Ok(ones as f64 / shots as f64)
}

/// Two-sided standard normal quantile `z(1 - alpha/2)`.
pub fn normal_quantile(alpha: f64) -> f64 {
    Normal::standard().inverse_cdf(1.0 - alpha / 2.0)
}

/// Interval `(low, high)` for the success probability at level `1 - alpha`.
pub fn confidence_interval(ones: u64, shots: u64, alpha: f64, method: CiMethod) -> Result<(f64, f64)> {
    check_counts(ones, shots)?;
    check_open_unit("alpha", alpha)?;
    let (low, high) = match method {
        CiMethod::Wilson => wilson(ones, shots, alpha),
        CiMethod::ClopperPearson => clopper_pearson(ones, shots, alpha),
    };
    let f_hat = ones as f64 / shots as f64;
    Ok((low.clamp(0.0, f_hat), high.clamp(f_hat, 1.0)))
}

fn wilson(ones: u64, shots: u64, alpha: f64) -> (f64, f64) {
    let z = normal_quantile(alpha);
    let n = shots as f64;
    let z2 = z * z;
    let denom = n + z2;
    // Both bounds are written in terms of successes and failures alike so
    // swapping them mirrors the interval exactly.
    let s = ones as f64;
    let f = (shots - ones) as f64;
    let spread = z * (s * f / n + z2 / 4.0).sqrt();
    let low = if ones == 0 { 0.0 } else { (s + z2 / 2.0 - spread) / denom };
    let high = if ones == shots { 1.0 } else { 1.0 - (f + z2 / 2.0 - spread) / denom };
    (low, high)
}

/// Exact interval from beta quantiles:
/// `low = B^-1(alpha/2; s, n-s+1)`, `high = B^-1(1-alpha/2; s+1, n-s)`.
fn clopper_pearson(ones: u64, shots: u64, alpha: f64) -> (f64, f64) {
    let s = ones as f64;
    let n = shots as f64;
    let low = if ones == 0 { 0.0 } else { beta_quantile(s, n - s + 1.0, alpha / 2.0) };
    let high = if ones == shots { 1.0 } else { beta_quantile(s + 1.0, n - s, 1.0 - alpha / 2.0) };
    (low, high)
}

/// Inverts the regularized incomplete beta function by bisection.
fn beta_quantile(a: f64, b: f64, p: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if beta_reg(a, b, mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateResult {
    pub ones: u64,
    pub shots: u64,
    pub f_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub ci_method: CiMethod,
    pub alpha: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_f: Option<ExactFraction>,
    /// `|f_hat - f|`, present together with `exact_f`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_error: Option<f64>,
}

impl EstimateResult {
    pub fn from_counts(
        ones: u64,
        shots: u64,
        alpha: f64,
        method: CiMethod,
        seed: u64,
        exact_f: Option<ExactFraction>,
    ) -> Result<Self> {
        let f_hat = estimate_fraction(ones, shots)?;
        let (ci_low, ci_high) = confidence_interval(ones, shots, alpha, method)?;
        Ok(EstimateResult {
            ones,
            shots,
            f_hat,
            ci_low,
            ci_high,
            ci_method: method,
            alpha,
            seed,
            exact_f,
            abs_error: exact_f.map(|f| (f_hat - f.to_f64()).abs()),
        })
    }
}

/// Counts the ones in an outcome stream. Order does not matter.
pub fn aggregate(
    bits: &[u8],
    alpha: f64,
    method: CiMethod,
    seed: u64,
    exact_f: Option<ExactFraction>,
) -> Result<EstimateResult> {
    if bits.is_empty() {
        return Err(Error::EmptySample);
    }
    let ones = bits.iter().filter(|&&b| b != 0).count() as u64;
    EstimateResult::from_counts(ones, bits.len() as u64, alpha, method, seed, exact_f)
}

/// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsTest {
    pub statistic: f64,
    pub p_value: f64,
}

impl KsTest {
    pub fn rejects(&self, level: f64) -> bool {
        self.p_value < level
    }
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsTest> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        // Step past every copy of the smaller value so ties move together.
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = na * nb / (na + nb);
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    Ok(KsTest {
        statistic: d,
        p_value: kolmogorov_survival(lambda),
    })
}

/// `Q(lambda) = 2 sum_{j>=1} (-1)^(j-1) exp(-2 j^2 lambda^2)`.
fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=200 {
        let term = (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_examples() {
        assert_eq!(plan_shots(0.01, 0.05).unwrap().shots, 18445);
        assert_eq!(plan_shots(0.1, 0.05).unwrap().shots, 185);
        assert_eq!(plan_shots(0.999, 0.999).unwrap().shots, 1);
    }

    #[test]
    fn plan_rejects_out_of_range() {
        for (e, d) in [(0.0, 0.05), (1.0, 0.05), (0.1, 0.0), (0.1, 1.0), (-0.1, 0.5), (f64::NAN, 0.5)] {
            assert!(matches!(plan_shots(e, d), Err(Error::InvalidParameter { .. })), "{e} {d}");
        }
    }

    #[test]
    fn fixed_shot_plan_half_width() {
        let plan = SamplingPlan::with_shots(4096, 1e-6).unwrap();
        assert!((plan.epsilon - 0.042_08).abs() < 1e-4);
    }

    #[test]
    fn point_estimates() {
        assert_eq!(estimate_fraction(2500, 10000).unwrap(), 0.25);
        assert_eq!(estimate_fraction(0, 100).unwrap(), 0.0);
        assert_eq!(estimate_fraction(100, 100).unwrap(), 1.0);
        assert!(estimate_fraction(1, 0).is_err());
        assert!(estimate_fraction(5, 4).is_err());
    }

    #[test]
    fn wilson_at_zero_ones() {
        let z: f64 = 1.959_963_984_540_054;
        let (lo, hi) = confidence_interval(0, 100, 0.05, CiMethod::Wilson).unwrap();
        assert_eq!(lo, 0.0);
        assert!((hi - z * z / (100.0 + z * z)).abs() < 1e-12);
        assert!((hi - 0.0370).abs() < 5e-5);
        let (lo, hi) = confidence_interval(100, 100, 0.05, CiMethod::Wilson).unwrap();
        assert!((lo - 0.9630).abs() < 5e-5);
        assert_eq!(hi, 1.0);
    }

    #[test]
    fn wilson_half_is_centered() {
        let (lo, hi) = confidence_interval(50, 100, 0.05, CiMethod::Wilson).unwrap();
        assert!(((lo + hi) / 2.0 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn clopper_pearson_edges_have_closed_forms() {
        // With zero successes the upper bound solves (1-p)^n = alpha/2.
        let (lo, hi) = confidence_interval(0, 10, 0.05, CiMethod::ClopperPearson).unwrap();
        assert_eq!(lo, 0.0);
        assert!((hi - (1.0 - 0.025f64.powf(0.1))).abs() < 1e-12);
        let (lo, hi) = confidence_interval(10, 10, 0.05, CiMethod::ClopperPearson).unwrap();
        assert!((lo - 0.025f64.powf(0.1)).abs() < 1e-12);
        assert_eq!(hi, 1.0);
    }

    #[test]
    fn invalid_alpha() {
        assert!(confidence_interval(1, 10, 0.0, CiMethod::Wilson).is_err());
        assert!(confidence_interval(1, 10, 1.5, CiMethod::ClopperPearson).is_err());
    }

    #[test]
    fn aggregate_examples() {
        let r = aggregate(&[1, 0, 0, 0], 0.05, CiMethod::Wilson, 7, None).unwrap();
        assert_eq!((r.ones, r.shots, r.f_hat, r.seed), (1, 4, 0.25, 7));
        let r = aggregate(&[0; 8], 0.05, CiMethod::Wilson, 0, None).unwrap();
        assert_eq!((r.f_hat, r.ci_low), (0.0, 0.0));
        assert_eq!(aggregate(&[], 0.05, CiMethod::Wilson, 0, None).unwrap_err(), Error::EmptySample);
    }

    #[test]
    fn aggregate_reports_error_against_exact() {
        let exact = ExactFraction::new(1, 4).unwrap();
        let r = aggregate(&[1, 1, 0, 0], 0.05, CiMethod::Wilson, 0, Some(exact)).unwrap();
        assert_eq!(r.abs_error, Some(0.25));
    }

    #[test]
    fn ks_identical_and_disjoint() {
        let a: Vec<f64> = (0..100).map(f64::from).collect();
        let t = ks_two_sample(&a, &a).unwrap();
        assert_eq!(t.statistic, 0.0);
        assert_eq!(t.p_value, 1.0);
        let b: Vec<f64> = (200..300).map(f64::from).collect();
        let t = ks_two_sample(&a, &b).unwrap();
        assert_eq!(t.statistic, 1.0);
        assert!(t.p_value < 1e-10);
    }

    #[test]
    fn kolmogorov_critical_value() {
        // Q(1.628) is the classical 1% point.
        assert!((kolmogorov_survival(1.6276) - 0.01).abs() < 2e-4);
        assert!((kolmogorov_survival(1.3581) - 0.05).abs() < 2e-4);
    }
}
