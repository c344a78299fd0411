//! Limiting null distributions and the Cauchy combination of two p-values.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower clamp applied to p-values before they enter the tangent transform.
pub const P_CLAMP: f64 = 1e-15;

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PValue(f64);

impl PValue {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::Domain(format!("p-value {value} is outside [0, 1]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Clamps into `[P_CLAMP, 1 − P_CLAMP]`; the flag reports whether anything moved.
    pub fn clamped(self) -> (f64, bool) {
        let v = self.0.clamp(P_CLAMP, 1.0 - P_CLAMP);
        (v, v != self.0)
    }
}

/// Standard normal c.d.f.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail `1 − Φ(x)`, computed directly so it keeps relative accuracy for large `x`.
pub fn std_normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// `G(y) = exp(−π^{−1/2} e^{−y/2})`, the limit law of the centred squared maximum.
pub fn gumbel_type_cdf(y: f64) -> f64 {
    (-(-y / 2.0).exp() / PI.sqrt()).exp()
}

/// `1 − G(y)` without cancellation in the upper tail.
pub fn gumbel_type_sf(y: f64) -> f64 {
    -(-(-y / 2.0).exp() / PI.sqrt()).exp_m1()
}

/// Inverse of [`gumbel_type_cdf`] on `(0, 1)`.
pub fn gumbel_type_quantile(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!("quantile level {q} is outside (0, 1)")));
    }
    Ok(-2.0 * (-q.ln() * PI.sqrt()).ln())
}

/// `tan((0.5 − p)π)`, written as a cotangent so that small `p` and `p` near 1
/// keep full precision.
fn cauchy_score(p: f64) -> f64 {
    if p <= 0.5 {
        1.0 / (p * PI).tan()
    } else {
        -1.0 / ((1.0 - p) * PI).tan()
    }
}

/// Survival function `1 − C(t)` of the standard Cauchy distribution.
pub fn cauchy_sf(t: f64) -> f64 {
    if t > 0.0 {
        (1.0 / t).atan() / PI
    } else {
        0.5 + (-t).atan() / PI
    }
}

/// Result of a Cauchy combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Combined {
    pub p_value: PValue,
    /// Whether either input had to be clamped away from 0 or 1.
    pub clamped: bool,
}

/// Equal-weight combination of any number of p-values:
/// `1 − C(Σ w_k tan((0.5 − p_k)π))` with `w_k = 1/k`.
pub(crate) fn cauchy_combine_many(ps: &[PValue]) -> Combined {
    let w = 1.0 / ps.len() as f64;
    let mut clamped = false;
    let t: f64 = ps
        .iter()
        .map(|p| {
            let (v, c) = p.clamped();
            clamped |= c;
            w * cauchy_score(v)
        })
        .sum();
    let p = cauchy_sf(t).clamp(0.0, 1.0);
    Combined {
        p_value: PValue(p),
        clamped,
    }
}

/// `1 − C[0.5 tan{(0.5 − p_max)π} + 0.5 tan{(0.5 − p_sum)π}]`.
pub fn cauchy_combine(p_max: PValue, p_sum: PValue) -> Combined {
    cauchy_combine_many(&[p_max, p_sum])
}

/// Convenience wrapper over raw floats; rejects inputs outside `[0, 1]`.
pub fn cauchy_combine_raw(p_max: f64, p_sum: f64) -> Result<Combined> {
    Ok(cauchy_combine(PValue::new(p_max)?, PValue::new(p_sum)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normal_cdf_values() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert!((std_normal_cdf(1.959963984540054) - 0.975).abs() < 1e-12);
        // reference values of the upper tail
        assert!((std_normal_sf(1.6448536269514722) - 0.05).abs() < 1e-14);
        let tail8 = 6.22096057427178e-16;
        assert!((std_normal_sf(8.0) / tail8 - 1.0).abs() < 1e-10);
        assert!((std_normal_cdf(-8.0) / tail8 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gumbel_values() {
        let g0 = (-1.0 / PI.sqrt()).exp();
        assert!((gumbel_type_cdf(0.0) - g0).abs() < 1e-15);
        assert!((g0 - 0.568821).abs() < 1e-6);
        assert!((gumbel_type_cdf(800.0) - 1.0).abs() < 1e-15);
        assert_eq!(gumbel_type_cdf(-800.0), 0.0);
        let y95 = gumbel_type_quantile(0.95).unwrap();
        assert!((y95 - 4.7958).abs() < 1e-3);
        assert!((gumbel_type_cdf(y95) - 0.95).abs() < 1e-14);
        assert!((gumbel_type_sf(y95) - 0.05).abs() < 1e-14);
        assert!(gumbel_type_sf(100.0) > 0.0);
        assert!(gumbel_type_quantile(1.0).is_err());
    }

    #[test]
    fn combine_examples() {
        let half = PValue::new(0.5).unwrap();
        assert!((cauchy_combine(half, half).p_value.value() - 0.5).abs() < 1e-15);
        // 0.5 − atan(0.5·cot(0.01π))/π evaluated independently
        let t = 0.5 / (0.01 * PI).tan();
        let reference = 0.5 - t.atan() / PI;
        let got = cauchy_combine_raw(0.01, 0.5).unwrap().p_value.value();
        assert!((got - reference).abs() < 1e-15);
        assert!((got - 0.01999).abs() < 1e-4);
        for p in [1e-8, 0.01, 0.3, 0.9] {
            let c = cauchy_combine_raw(p, p).unwrap();
            assert!((c.p_value.value() - p).abs() < 1e-12, "p={p}");
            assert!(!c.clamped);
        }
        assert!(cauchy_combine_raw(-0.1, 0.5).is_err());
        assert!(cauchy_combine_raw(0.5, 1.5).is_err());
    }

    #[test]
    fn combine_clamps_extremes() {
        let c = cauchy_combine_raw(0.0, 0.0).unwrap();
        assert!(c.clamped);
        assert!(c.p_value.value() <= 1e-14);
        let c = cauchy_combine_raw(1.0, 1.0).unwrap();
        assert!(c.clamped);
        assert!(c.p_value.value() >= 1.0 - 1e-14);
        assert!(c.p_value.value() <= 1.0);
    }

    #[test]
    fn combine_small_p_with_fixed_partner() {
        // ≈ 2p as p → 0 with the other p-value held fixed
        for partner in [0.3, 0.5, 0.9] {
            let p = 1e-4;
            let c = cauchy_combine_raw(p, partner).unwrap().p_value.value();
            assert!((c / (2.0 * p) - 1.0).abs() < 0.05, "partner={partner}: {c}");
        }
    }

    proptest! {
        #[test]
        fn normal_symmetry(x in -30.0f64..30.0) {
            prop_assert!((std_normal_cdf(x) + std_normal_cdf(-x) - 1.0).abs() < 1e-15);
        }

        #[test]
        fn gumbel_increasing(a in -40.0f64..60.0, d in 1e-3f64..10.0) {
            prop_assert!(gumbel_type_cdf(a + d) >= gumbel_type_cdf(a));
            let g = gumbel_type_cdf(a);
            prop_assert!((0.0..=1.0).contains(&g));
        }

        #[test]
        fn combine_symmetric_and_monotone(a in 0.0f64..=1.0, b in 0.0f64..=1.0, d in 0.0f64..0.5) {
            let ab = cauchy_combine_raw(a, b).unwrap().p_value.value();
            let ba = cauchy_combine_raw(b, a).unwrap().p_value.value();
            prop_assert_eq!(ab, ba);
            prop_assert!((0.0..=1.0).contains(&ab));
            let a2 = (a + d).min(1.0);
            let up = cauchy_combine_raw(a2, b).unwrap().p_value.value();
            prop_assert!(up >= ab - 1e-15);
        }

        #[test]
        fn combine_idempotent(p in 1e-10f64..(1.0 - 1e-10)) {
            let c = cauchy_combine_raw(p, p).unwrap().p_value.value();
            prop_assert!((c - p).abs() < 1e-12);
        }
    }

    #[test]
    fn combine_limits() {
        let tiny = cauchy_combine_raw(1e-12, 1e-12).unwrap().p_value.value();
        assert!(tiny < 1e-11);
        let big = cauchy_combine_raw(1.0 - 1e-12, 1.0 - 1e-12).unwrap().p_value.value();
        assert!(big > 1.0 - 1e-11);
    }
}
