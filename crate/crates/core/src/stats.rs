//! Small statistical helpers used by the Monte Carlo drivers and tests.

use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::beta::beta_reg;

/// Pearson chi-square goodness of fit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

/// Tests observed category counts against the probabilities `expected`.
///
/// Panics when the slices differ in length or there are fewer than two
/// categories.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> ChiSquareTest {
    assert_eq!(observed.len(), expected.len(), "category count mismatch");
    assert!(observed.len() >= 2, "need at least two categories");
    let total: u64 = observed.iter().sum();
    let statistic = observed
        .iter()
        .zip(expected)
        .map(|(&o, &p)| {
            let e = p * total as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum::<f64>();
    let dof = observed.len() - 1;
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    ChiSquareTest {
        statistic,
        degrees_of_freedom: dof,
        p_value: dist.sf(statistic),
    }
}

/// One-sided Clopper–Pearson upper confidence limit for a binomial
/// proportion with `successes` out of `trials`.
pub fn clopper_pearson_upper(successes: u64, trials: u64, confidence: f64) -> f64 {
    assert!(trials > 0, "no trials");
    assert!(successes <= trials);
    assert!(confidence > 0.0 && confidence < 1.0);
    if successes == trials {
        return 1.0;
    }
    if successes == 0 {
        return 1.0 - (1.0 - confidence).powf(1.0 / trials as f64);
    }
    // Upper limit p solves P[Bin(trials, p) <= successes] = 1 - confidence,
    // i.e. I_p(successes + 1, trials - successes) = confidence.
    let a = successes as f64 + 1.0;
    let b = (trials - successes) as f64;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if beta_reg(a, b, mid) < confidence {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clopper_pearson_zero_successes_closed_form() {
        let u = clopper_pearson_upper(0, 1_000_000, 0.99);
        assert!((u - 4.605_16e-6).abs() < 1e-9, "{u}");
    }

    #[test]
    fn clopper_pearson_matches_binomial_tail() {
        // At the upper limit, P[Bin(n, p) <= x] = 1 - confidence.
        let (x, n) = (3u64, 50u64);
        let p = clopper_pearson_upper(x, n, 0.99);
        let mut cdf = 0.0;
        let mut term = (1.0 - p).powi(n as i32);
        for k in 0..=x {
            cdf += term;
            term *= (n - k) as f64 / (k + 1) as f64 * p / (1.0 - p);
        }
        assert!((cdf - 0.01).abs() < 1e-9, "{cdf}");
    }

    #[test]
    fn chi_square_perfect_fit() {
        let t = chi_square(&[25, 25, 25, 25], &[0.25; 4]);
        assert_eq!(t.statistic, 0.0);
        assert!((t.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chi_square_detects_bias() {
        let t = chi_square(&[900, 100], &[0.5, 0.5]);
        assert!(t.p_value < 1e-10);
    }
}
