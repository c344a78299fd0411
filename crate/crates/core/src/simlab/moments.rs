//! Moments of the per-coordinate rank statistics under shift alternatives.
//!
//! One-sample, for `X = μ + e` with `e` symmetric with c.d.f. `F` and density `f`:
//!
//! ```text
//! p1 = F(μ)                    p2 = ∫ F(2μ + x) f(x) dx
//! p3 = (p1² + p2) / 2          p4 = ∫ F(2μ + x)² f(x) dx
//! E U   = n(n−1) p2 / 2 + n p1
//! Var U = n p1(1−p1) + n(n−1) p2(1−p2)/2 + 2n(n−1)(p3 − p1 p2) + n(n−1)(n−2)(p4 − p2²)
//! ```
//!
//! Two-sample, for `X = μ₁ + e`, `Y = μ₂ + e'` and `U^{xy} = #{(i,j): X_i > Y_j}`,
//! with `d = μ₁ − μ₂`:
//!
//! ```text
//! q1 = P(X > Y)          = ∫ F(t + d) f(t) dt
//! qx = P(X > Y₁, X > Y₂) = ∫ F(t + d)² f(t) dt
//! qy = P(X₁ > Y, X₂ > Y) = ∫ (1 − F(t − d))² f(t) dt
//! E U   = nm q1
//! Var U = nm q1(1−q1) + nm(m−1)(qx − q1²) + nm(n−1)(qy − q1²)
//! ```

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::limit_dists::std_normal_cdf;
use crate::rank_core::MomentPair;
use crate::simlab::quadrature::integrate;
use crate::simlab::sampling::Distribution;

/// Tail mass dropped on each side of the integration range.
const TAIL: f64 = 1e-12;
/// Absolute error target; tighter than needed so the null identities hold to ~1e−12.
const ABS_TOL: f64 = 1e-13;

impl Distribution {
    /// Marginal c.d.f. of one coordinate (standard normal or Student `t₃`).
    pub fn cdf(self, x: f64) -> f64 {
        match self {
            Distribution::Normal => std_normal_cdf(x),
            Distribution::T3 => {
                let s = x / 3f64.sqrt();
                0.5 + (s / (1.0 + s * s) + s.atan()) / PI
            }
        }
    }

    pub fn pdf(self, x: f64) -> f64 {
        match self {
            Distribution::Normal => (-0.5 * x * x).exp() / (2.0 * PI).sqrt(),
            Distribution::T3 => 6.0 * 3f64.sqrt() / (PI * (3.0 + x * x).powi(2)),
        }
    }

    /// Quantile by bisection on the c.d.f.
    pub fn quantile(self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Domain(format!("quantile level {q} is outside (0, 1)")));
        }
        let (mut lo, mut hi) = (-1.0, 1.0);
        while self.cdf(lo) > q {
            lo *= 2.0;
        }
        while self.cdf(hi) < q {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < q {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi.abs().max(1.0) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// `∫ g(x) f(x) dx` over the central `1 − 2·10⁻¹²` of the marginal.
    fn expect<G: Fn(f64) -> f64>(self, g: G) -> Result<f64> {
        let lo = self.quantile(TAIL)?;
        let hi = self.quantile(1.0 - TAIL)?;
        let mut breaks = Vec::new();
        for q in [1e-6, 1e-3, 0.05, 0.25, 0.5, 0.75, 0.95, 1.0 - 1e-3, 1.0 - 1e-6] {
            breaks.push(self.quantile(q)?);
        }
        integrate(|x| g(x) * self.pdf(x), lo, hi, &breaks, ABS_TOL)
    }
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite")))
    }
}

/// Mean and variance of the signed-rank statistic when every observation is `μ + e`.
pub fn h1_moments_one_sample(n: usize, mu: f64, marginal: Distribution) -> Result<MomentPair> {
    if n < 1 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    check_finite("mu", mu)?;
    let p1 = marginal.cdf(mu);
    let p2 = marginal.expect(|x| marginal.cdf(2.0 * mu + x))?;
    let p3 = (p1 * p1 + p2) / 2.0;
    let p4 = marginal.expect(|x| marginal.cdf(2.0 * mu + x).powi(2))?;
    let n = n as f64;
    let mean = n * (n - 1.0) * p2 / 2.0 + n * p1;
    let variance = n * p1 * (1.0 - p1)
        + n * (n - 1.0) * p2 * (1.0 - p2) / 2.0
        + 2.0 * n * (n - 1.0) * (p3 - p1 * p2)
        + n * (n - 1.0) * (n - 2.0) * (p4 - p2 * p2);
    Ok(MomentPair { mean, variance })
}

/// Mean and variance of `U^{xy}` for `X ~ μ₁ + e` (size `n`) and `Y ~ μ₂ + e'` (size `m`).
pub fn h1_moments_two_sample(
    n: usize,
    m: usize,
    mu1: f64,
    mu2: f64,
    marginal: Distribution,
) -> Result<MomentPair> {
    if n < 1 || m < 1 {
        return Err(Error::Domain("sample sizes must be at least 1".into()));
    }
    check_finite("mu1", mu1)?;
    check_finite("mu2", mu2)?;
    let d = mu1 - mu2;
    let q1 = marginal.expect(|t| marginal.cdf(t + d))?;
    let qx = marginal.expect(|t| marginal.cdf(t + d).powi(2))?;
    let qy = marginal.expect(|t| (1.0 - marginal.cdf(t - d)).powi(2))?;
    let (n, m) = (n as f64, m as f64);
    let nm = n * m;
    let mean = nm * q1;
    let variance = nm * q1 * (1.0 - q1)
        + nm * (m - 1.0) * (qx - q1 * q1)
        + nm * (n - 1.0) * (qy - q1 * q1);
    Ok(MomentPair { mean, variance })
}
