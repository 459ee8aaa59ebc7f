use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Weibull CDF `1 − exp(−(x/λ)^k)`.
pub fn weibull_cdf(shape: f64, scale: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    -(-(x / scale).powf(shape)).exp_m1()
}

/// Probability that a component of age `age` fails within the next `dt`,
/// conditional on survival up to `age`.
///
/// Returns 1 when the survival function underflows. Negative ages are
/// rejected.
pub fn failure_probability(shape: f64, scale: f64, age: f64, dt: f64) -> Result<f64> {
    if !(age >= 0.0) {
        return Err(Error::Domain(format!("negative age {age}")));
    }
    Ok(fail_prob(shape, scale, age, dt))
}

/// Unchecked kernel shared by the exact and relaxed dynamics. Both must call
/// this exact function so that their comparisons against noise agree bitwise.
#[inline]
pub(crate) fn fail_prob(shape: f64, scale: f64, age: f64, dt: f64) -> f64 {
    let h0 = (age / scale).powf(shape);
    if (-h0).exp() == 0.0 {
        return 1.0;
    }
    let h1 = ((age + dt) / scale).powf(shape);
    // (F(a+dt) − F(a)) / (1 − F(a)) = 1 − exp(H(a) − H(a+dt))
    -(h0 - h1).exp_m1()
}

/// d/da of [`failure_probability`]. Zero where the hazard is not finite.
pub fn failure_probability_derivative(shape: f64, scale: f64, age: f64, dt: f64) -> f64 {
    let p = fail_prob(shape, scale, age, dt);
    let hz = |x: f64| (shape / scale) * (x / scale).powf(shape - 1.0);
    let d = (1.0 - p) * (hz(age + dt) - hz(age));
    if d.is_finite() {
        d
    } else {
        0.0
    }
}

/// Closed-form mean time to failure `λ Γ(1 + 1/k)`.
pub fn mttf(shape: f64, scale: f64) -> f64 {
    scale * gamma(1.0 + 1.0 / shape)
}

/// Monte-Carlo mean time to first failure of a never-maintained component,
/// stepping the conditional failure law with step `dt`. A failure drawn during
/// step `k -> k+1` is recorded at time `(k+1)·dt`.
pub fn mttf_monte_carlo(shape: f64, scale: f64, dt: f64, draws: usize, seed: u64) -> f64 {
    // The age of an unmaintained component is deterministic, so the per-step
    // hazards can be tabulated once.
    let mut table: Vec<f64> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    for _ in 0..draws {
        let mut k = 0usize;
        loop {
            if k == table.len() {
                table.push(fail_prob(shape, scale, k as f64 * dt, dt));
            }
            let w: f64 = rng.random();
            if w < table[k] {
                break;
            }
            k += 1;
        }
        total += (k + 1) as f64 * dt;
    }
    total / draws as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    // Oracle: the defining ratio (F(a+dt) − F(a)) / (1 − F(a)) in plain form.
    fn ratio(k: f64, l: f64, a: f64, dt: f64) -> f64 {
        let f = |x: f64| 1.0 - (-(x / l).powf(k)).exp();
        (f(a + dt) - f(a)) / (1.0 - f(a))
    }

    #[test]
    fn known_values() {
        let p0 = failure_probability(3.0, 10.0, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(p0, 1.0 - (-1e-3f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(p0, 9.995e-4, epsilon = 1e-7);
        assert_eq!(failure_probability(3.0, 10.0, 4.2, 0.0).unwrap(), 0.0);
        let p10 = failure_probability(3.0, 10.0, 10.0, 1.0).unwrap();
        assert_abs_diff_eq!(p10, 1.0 - (-(1.331f64 - 1.0)).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(p10, 0.2817, epsilon = 1e-4);
    }

    #[test]
    fn degenerate_and_domain() {
        assert_eq!(failure_probability(3.0, 10.0, 1e4, 1.0).unwrap(), 1.0);
        assert!(failure_probability(3.0, 10.0, -0.5, 1.0).is_err());
        assert!(failure_probability(3.0, 10.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn mttf_closed_form() {
        assert_abs_diff_eq!(mttf(3.0, 10.0), 8.93, epsilon = 5e-3);
        assert_abs_diff_eq!(mttf(3.0, 20.0), 17.86, epsilon = 1e-2);
        assert_abs_diff_eq!(mttf(1.0, 5.0), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn derivative_matches_central_difference() {
        for &(k, l) in &[(3.0, 10.0), (1.5, 7.0), (0.8, 4.0)] {
            for i in 1..60 {
                let a = 0.25 * i as f64;
                let h = 1e-6;
                let fd = (fail_prob(k, l, a + h, 1.0) - fail_prob(k, l, a - h, 1.0)) / (2.0 * h);
                let d = failure_probability_derivative(k, l, a, 1.0);
                assert!((fd - d).abs() < 1e-7 * (1.0 + d.abs()), "{k} {l} {a}: {fd} vs {d}");
            }
        }
        // Infinite hazard at 0 for shape < 1.
        assert_eq!(failure_probability_derivative(0.5, 4.0, 0.0, 1.0), 0.0);
    }

    proptest! {
        #[test]
        fn matches_ratio_and_is_probability(k in 0.3f64..6.0, l in 0.5f64..50.0,
                                            a in 0.0f64..40.0, dt in 0.0f64..3.0) {
            let p = failure_probability(k, l, a, dt).unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
            let r = ratio(k, l, a, dt);
            let h = (a / l).powf(k);
            // The ratio loses about exp(h) ulps forming 1 − F(a).
            if r.is_finite() && h < 20.0 {
                let tol = 1e-12 + 1e-15 * h.exp();
                prop_assert!((p - r).abs() < tol, "{} vs {}", p, r);
            }
        }

        #[test]
        fn nondecreasing_in_age(k in 1.0f64..6.0, l in 0.5f64..50.0, dt in 0.01f64..3.0) {
            let mut prev = 0.0;
            for j in 0..400 {
                let p = fail_prob(k, l, 0.1 * j as f64, dt);
                prop_assert!(p >= prev - 1e-15, "age {}: {} < {}", 0.1 * j as f64, p, prev);
                prev = p;
            }
        }
    }
}
