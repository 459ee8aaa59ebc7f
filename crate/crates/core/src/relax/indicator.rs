/// The three kinds of sets whose indicators appear in the dynamics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SetDescriptor {
    Singleton(f64),
    /// `ℝ₊`
    NonNeg,
    /// `ℝ₊*`, relaxed so that the value at 0 stays 0.
    StrictPos,
}

/// Relaxed indicator of parameter `alpha`, valued in `[0, 1]`.
#[inline]
pub fn relaxed_indicator(set: SetDescriptor, x: f64, alpha: f64) -> f64 {
    let b = 0.5 / alpha;
    match set {
        SetDescriptor::Singleton(a) => {
            let d = (x - a).abs();
            if d <= b {
                1.0 - 2.0 * alpha * d
            } else {
                0.0
            }
        }
        SetDescriptor::NonNeg => {
            if x >= 0.0 {
                1.0
            } else if -x <= b {
                1.0 + 2.0 * alpha * x
            } else {
                0.0
            }
        }
        SetDescriptor::StrictPos => {
            if x <= 0.0 {
                0.0
            } else if x < b {
                2.0 * alpha * x
            } else {
                1.0
            }
        }
    }
}

/// Derivative of [`relaxed_indicator`]; zero at every kink.
#[inline]
pub fn relaxed_indicator_derivative(set: SetDescriptor, x: f64, alpha: f64) -> f64 {
    let b = 0.5 / alpha;
    let s = 2.0 * alpha;
    match set {
        SetDescriptor::Singleton(a) => {
            if a - b < x && x < a {
                s
            } else if a < x && x < a + b {
                -s
            } else {
                0.0
            }
        }
        SetDescriptor::NonNeg => {
            if -b < x && x < 0.0 {
                s
            } else {
                0.0
            }
        }
        SetDescriptor::StrictPos => {
            if 0.0 < x && x < b {
                s
            } else {
                0.0
            }
        }
    }
}

/// The crisp indicator the relaxation approximates.
#[inline]
pub(crate) fn crisp_indicator(set: SetDescriptor, x: f64) -> f64 {
    let hit = match set {
        SetDescriptor::Singleton(a) => x == a,
        SetDescriptor::NonNeg => x >= 0.0,
        SetDescriptor::StrictPos => x > 0.0,
    };
    if hit {
        1.0
    } else {
        0.0
    }
}

/// Evaluation strategy for the indicators and `min` operators of the relaxed
/// kernels.
pub trait IndicatorEval {
    fn ind(&mut self, set: SetDescriptor, x: f64) -> f64;

    #[inline]
    fn min(&mut self, a: f64, b: f64) -> f64 {
        a.min(b)
    }
}

/// Plain relaxed evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Relaxed {
    pub alpha: f64,
}

impl IndicatorEval for Relaxed {
    #[inline]
    fn ind(&mut self, set: SetDescriptor, x: f64) -> f64 {
        relaxed_indicator(set, x, self.alpha)
    }
}

/// Relaxed evaluation that records which linear piece every indicator and
/// `min` landed on, and counts band hits (relaxed value differs from the crisp
/// one).
///
/// Two evaluations with equal [`Probe::signature`] lie on the same affine
/// piece of every indicator, so the kernel is smooth between them.
#[derive(Debug, Clone, Default)]
pub struct Probe {
    pub alpha: f64,
    pub signature: Vec<u8>,
    pub band_hits: usize,
}

impl Probe {
    pub fn new(alpha: f64) -> Self {
        Probe {
            alpha,
            signature: Vec::new(),
            band_hits: 0,
        }
    }

    pub fn clear(&mut self) {
        self.signature.clear();
        self.band_hits = 0;
    }
}

// Pieces separated by the breakpoints b0 < b1 < ..: open intervals get even
// codes, breakpoints odd ones.
fn piece(x: f64, breaks: &[f64]) -> u8 {
    for (k, &b) in breaks.iter().enumerate() {
        if x < b {
            return (2 * k) as u8;
        }
        if x == b {
            return (2 * k + 1) as u8;
        }
    }
    (2 * breaks.len()) as u8
}

impl IndicatorEval for Probe {
    fn ind(&mut self, set: SetDescriptor, x: f64) -> f64 {
        let b = 0.5 / self.alpha;
        let code = match set {
            SetDescriptor::Singleton(a) => piece(x, &[a - b, a, a + b]),
            SetDescriptor::NonNeg => piece(x, &[-b, 0.0]),
            SetDescriptor::StrictPos => piece(x, &[0.0, b]),
        };
        self.signature.push(code);
        let v = relaxed_indicator(set, x, self.alpha);
        if v != crisp_indicator(set, x) {
            self.band_hits += 1;
        }
        v
    }

    fn min(&mut self, a: f64, b: f64) -> f64 {
        self.signature.push(100 + piece(a, &[b]));
        a.min(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use SetDescriptor::*;

    #[test]
    fn documented_values() {
        for alpha in [0.3, 2.0, 1e6] {
            assert_eq!(relaxed_indicator(Singleton(0.0), 0.0, alpha), 1.0);
            assert_eq!(relaxed_indicator(StrictPos, 0.0, alpha), 0.0);
            assert_eq!(relaxed_indicator(NonNeg, 5.0, alpha), 1.0);
            assert_eq!(relaxed_indicator_derivative(NonNeg, 5.0, alpha), 0.0);
        }
        assert_abs_diff_eq!(relaxed_indicator(Singleton(0.0), 0.1, 2.0), 0.6, epsilon = 1e-15);
        assert_eq!(relaxed_indicator_derivative(Singleton(0.0), 0.1, 2.0), -4.0);
        assert_eq!(relaxed_indicator_derivative(Singleton(0.0), -0.1, 2.0), 4.0);
        assert_eq!(relaxed_indicator_derivative(Singleton(0.0), 0.25, 2.0), 0.0);
        assert_eq!(relaxed_indicator_derivative(Singleton(0.0), 0.0, 2.0), 0.0);
        assert_eq!(relaxed_indicator(Singleton(0.0), 0.5, 2.0), 0.0);
        assert_eq!(relaxed_indicator(NonNeg, -0.1, 2.0), 1.0 - 0.4);
        assert_eq!(relaxed_indicator(StrictPos, 0.1, 2.0), 0.4);
        assert_eq!(relaxed_indicator(StrictPos, 0.25, 2.0), 1.0);
        assert_eq!(relaxed_indicator_derivative(StrictPos, 0.0, 2.0), 0.0);
        assert_eq!(relaxed_indicator_derivative(StrictPos, 0.1, 2.0), 4.0);
        assert_eq!(relaxed_indicator_derivative(NonNeg, -0.25, 2.0), 0.0);
    }

    #[test]
    fn probe_flags_band_hits() {
        let mut p = Probe::new(2.0);
        p.ind(Singleton(1.0), 1.0);
        p.ind(NonNeg, 3.0);
        assert_eq!(p.band_hits, 0);
        p.ind(Singleton(1.0), 0.9);
        assert_eq!(p.band_hits, 1);
        assert_eq!(p.signature, vec![3, 4, 2]);
        p.min(1.0, 1.0);
        assert_eq!(p.signature[3], 101);
    }

    fn sets() -> impl Strategy<Value = SetDescriptor> {
        prop_oneof![
            (-3.0f64..3.0).prop_map(Singleton),
            Just(NonNeg),
            Just(StrictPos),
        ]
    }

    proptest! {
        #[test]
        fn bounded_and_lipschitz(set in sets(), x in -4.0f64..4.0, y in -4.0f64..4.0,
                                 alpha in 0.05f64..50.0) {
            let fx = relaxed_indicator(set, x, alpha);
            let fy = relaxed_indicator(set, y, alpha);
            prop_assert!((0.0..=1.0).contains(&fx));
            prop_assert!((fx - fy).abs() <= 2.0 * alpha * (x - y).abs() * (1.0 + 1e-12) + 1e-15);
        }

        #[test]
        fn derivative_is_slope_between_kinks(set in sets(), x in -4.0f64..4.0,
                                             alpha in 0.05f64..50.0) {
            let h = 1e-7;
            let mut a = Probe::new(alpha);
            let mut b = Probe::new(alpha);
            a.ind(set, x - h);
            b.ind(set, x + h);
            prop_assume!(a.signature == b.signature && a.signature[0].is_multiple_of(2));
            let fd = (relaxed_indicator(set, x + h, alpha) - relaxed_indicator(set, x - h, alpha)) / (2.0 * h);
            prop_assert!((fd - relaxed_indicator_derivative(set, x, alpha)).abs() < 1e-6 * (1.0 + alpha));
        }

        #[test]
        fn pointwise_limit(set in sets(), x in -4.0f64..4.0) {
            let dist = match set {
                Singleton(a) => (x - a).abs(),
                NonNeg => (-x).max(0.0),
                StrictPos => if x > 0.0 { 0.0 } else { 1.0 },
            };
            prop_assume!(dist == 0.0 || dist > 1e-6);
            if let StrictPos = set { prop_assume!(x > 1e-6 || x <= 0.0); }
            prop_assert_eq!(relaxed_indicator(set, x, 1e7), crisp_indicator(set, x));
        }
    }
}
