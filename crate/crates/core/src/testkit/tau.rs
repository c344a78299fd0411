//! Long-run variance `τ²` of the cross-coordinate sequence of standardized
//! squared statistics.
//!
//! Two estimators share the same Bartlett-weighted form
//! `τ̂² = γ̂(0) + 2 Σ_{k=1}^{b} (1 − k/(b+1)) γ̂(k)` and differ in where the
//! lag covariances come from:
//!
//! - [`TauMethod::Autocovariance`]: uncentred sample autocovariances of the
//!   sequence `r` itself, `γ̂(k) = p⁻¹ Σ_j r_j r_{j+k}`.
//! - [`TauMethod::ScoreCorrelation`]: `γ̂(0) = 1` and
//!   `γ̂(k) = p⁻¹ Σ_j (ρ̂²_{j,j+k} − bias)`, where `ρ̂_{ij}` is the sample
//!   correlation between the per-observation rank scores of coordinates `i`
//!   and `j`. For asymptotically Gaussian standardized statistics
//!   `cov(V_i², V_j²)/2 = corr(V_i, V_j)²`, so this targets the same `γ(k)`
//!   while being insensitive to mean shifts in the data. This is the default.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Floor applied to every `τ̂²`.
pub const TAU_SQ_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TauMethod {
    #[default]
    ScoreCorrelation,
    Autocovariance,
}

impl std::fmt::Display for TauMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TauMethod::ScoreCorrelation => "score_correlation",
            TauMethod::Autocovariance => "autocovariance",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauEstimate {
    pub tau_sq: f64,
    pub bandwidth: usize,
    /// `γ̂(0), …, γ̂(bandwidth)`.
    pub autocovariances: Vec<f64>,
    /// Set when the raw estimate fell below [`TAU_SQ_FLOOR`].
    pub floored: bool,
}

/// `⌊3 p^{1/3}⌋`, capped at `p − 2`.
pub fn default_bandwidth(p: usize) -> usize {
    let b = (3.0 * (p as f64).cbrt()).floor() as usize;
    b.min(p.saturating_sub(2))
}

fn resolve_bandwidth(p: usize, bandwidth: Option<usize>) -> Result<usize> {
    if p < 4 {
        return Err(Error::Domain(format!(
            "long-run variance needs a sequence of length >= 4, got {p}"
        )));
    }
    match bandwidth {
        Some(b) if b >= p - 1 => Err(Error::Domain(format!(
            "bandwidth {b} must be below p - 1 = {}",
            p - 1
        ))),
        Some(b) => Ok(b),
        None => Ok(default_bandwidth(p)),
    }
}

fn bartlett(autocovariances: Vec<f64>) -> TauEstimate {
    let b = autocovariances.len() - 1;
    let raw = autocovariances[0]
        + 2.0
            * autocovariances[1..]
                .iter()
                .enumerate()
                .map(|(i, g)| (1.0 - (i + 1) as f64 / (b + 1) as f64) * g)
                .sum::<f64>();
    let floored = !(raw >= TAU_SQ_FLOOR);
    TauEstimate {
        tau_sq: if floored { TAU_SQ_FLOOR } else { raw },
        bandwidth: b,
        autocovariances,
        floored,
    }
}

/// Bartlett estimate from the uncentred autocovariances of `r`.
pub fn estimate_tau_sq(r: &[f64], bandwidth: Option<usize>) -> Result<TauEstimate> {
    let p = r.len();
    let b = resolve_bandwidth(p, bandwidth)?;
    if let Some(i) = r.iter().position(|v| !v.is_finite()) {
        return Err(Error::Validation(format!("non-finite r at position {}", i + 1)));
    }
    let gammas = (0..=b)
        .map(|k| r[..p - k].iter().zip(&r[k..]).map(|(a, c)| a * c).sum::<f64>() / p as f64)
        .collect();
    Ok(bartlett(gammas))
}

/// Per-coordinate rank scores, centred and scaled to unit norm, stored column-major.
#[derive(Debug, Clone)]
pub(crate) struct ScoreMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Unit-norm centred columns; an all-zero column marks a degenerate coordinate.
    pub values: Vec<f64>,
    /// Expected `ρ̂²` between independent coordinates.
    pub bias: f64,
}

impl ScoreMatrix {
    fn column(&self, j: usize) -> &[f64] {
        &self.values[j * self.rows..(j + 1) * self.rows]
    }

    fn is_degenerate(&self, j: usize) -> bool {
        self.column(j).iter().all(|&v| v == 0.0)
    }
}

/// Centres each block of `groups` within every column and scales the column to unit norm.
pub(crate) fn normalize_scores(values: &mut [f64], rows: usize, groups: &[usize]) {
    debug_assert_eq!(groups.iter().sum::<usize>(), rows);
    for col in values.chunks_exact_mut(rows) {
        let mut start = 0;
        for &g in groups {
            let block = &mut col[start..start + g];
            let mean = block.iter().sum::<f64>() / g as f64;
            block.iter_mut().for_each(|v| *v -= mean);
            start += g;
        }
        let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        // relative threshold: centring a constant block leaves rounding noise
        let scale = col.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if norm > 0.0 && scale > 1e-12 * (rows as f64) {
            col.iter_mut().for_each(|v| *v /= norm);
        } else {
            col.iter_mut().for_each(|v| *v = 0.0);
        }
    }
}

pub(crate) fn score_correlation_tau_sq(
    scores: &ScoreMatrix,
    bandwidth: Option<usize>,
) -> Result<TauEstimate> {
    let p = scores.cols;
    let b = resolve_bandwidth(p, bandwidth)?;
    let live: Vec<bool> = (0..p).map(|j| !scores.is_degenerate(j)).collect();
    let mut gammas = Vec::with_capacity(b + 1);
    gammas.push(1.0);
    for k in 1..=b {
        let mut acc = 0.0;
        for j in 0..p - k {
            if live[j] && live[j + k] {
                let c: f64 = scores
                    .column(j)
                    .iter()
                    .zip(scores.column(j + k))
                    .map(|(a, c)| a * c)
                    .sum();
                acc += c * c - scores.bias;
            }
        }
        gammas.push(acc / p as f64);
    }
    Ok(bartlett(gammas))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn bandwidth_rules() {
        assert_eq!(default_bandwidth(200), 17);
        assert_eq!(default_bandwidth(400), 22);
        assert_eq!(default_bandwidth(4), 2);
        assert_eq!(default_bandwidth(5), 3);
        assert!(matches!(estimate_tau_sq(&[1.0, 2.0, 3.0], None), Err(Error::Domain(_))));
        assert!(matches!(estimate_tau_sq(&[1.0; 6], Some(5)), Err(Error::Domain(_))));
        assert!(estimate_tau_sq(&[1.0; 6], Some(4)).is_ok());
    }

    #[test]
    fn zero_lag_covariances_leave_gamma0() {
        // orthogonal at every positive lag: (1, 0, 0, 0, 0, -1) has γ̂(k) = 0 for 1 <= k <= 4
        let r = [1.0, 0.0, 0.0, 0.0, 0.0, -1.0];
        let est = estimate_tau_sq(&r, Some(4)).unwrap();
        assert!(est.autocovariances[1..].iter().all(|&g| g == 0.0));
        assert_eq!(est.tau_sq, est.autocovariances[0]);
        assert_eq!(est.tau_sq, 2.0 / 6.0);
    }

    #[test]
    fn bandwidth_zero_is_gamma0() {
        let r = [0.3, -1.2, 2.0, 0.1, -0.4];
        let est = estimate_tau_sq(&r, Some(0)).unwrap();
        let g0 = r.iter().map(|v| v * v).sum::<f64>() / 5.0;
        assert_eq!(est.tau_sq, g0);
        assert_eq!(est.autocovariances, vec![g0]);
    }

    #[test]
    fn constant_sequence() {
        let r = [2.0; 10];
        let est = estimate_tau_sq(&r, Some(3)).unwrap();
        for (k, g) in est.autocovariances.iter().enumerate() {
            assert!((g - 4.0 * (10 - k) as f64 / 10.0).abs() < 1e-12);
        }
    }

    #[test]
    fn floor_applies() {
        // alternating signs: γ̂(0) = 1, γ̂(1) = −5/6, so τ̂² = 1 − 5/6
        let r = [1.0, -1.0, 1.0, -1.0, 1.0, -1.0];
        let est = estimate_tau_sq(&r, Some(1)).unwrap();
        assert!(!est.floored);
        assert!((est.tau_sq - 1.0 / 6.0).abs() < 1e-12);
        let neg = bartlett(vec![0.1, -1.0]);
        assert!(neg.floored);
        assert_eq!(neg.tau_sq, TAU_SQ_FLOOR);
    }

    #[test]
    fn iid_sequence_is_near_one() {
        // single draws scatter with sd ≈ 0.12 at b = 51; the average over draws is tight
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let draws = 100;
        let mut total = 0.0;
        for _ in 0..draws {
            let r: Vec<f64> = (0..5000).map(|_| StandardNormal.sample(&mut rng)).collect();
            let est = estimate_tau_sq(&r, None).unwrap();
            assert_eq!(est.bandwidth, 51);
            assert!((0.5..=1.5).contains(&est.tau_sq), "{}", est.tau_sq);
            total += est.tau_sq;
        }
        let mean = total / draws as f64;
        assert!((0.9..=1.1).contains(&mean), "{mean}");
    }

    #[test]
    fn score_correlation_on_independent_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (rows, cols) = (100, 300);
        let mut values: Vec<f64> = (0..rows * cols).map(|_| StandardNormal.sample(&mut rng)).collect();
        normalize_scores(&mut values, rows, &[rows]);
        let scores = ScoreMatrix { rows, cols, values, bias: 1.0 / (rows - 1) as f64 };
        let est = score_correlation_tau_sq(&scores, None).unwrap();
        assert_eq!(est.autocovariances[0], 1.0);
        assert!((est.tau_sq - 1.0).abs() < 0.1, "{}", est.tau_sq);
        let zero = score_correlation_tau_sq(&scores, Some(0)).unwrap();
        assert_eq!(zero.tau_sq, 1.0);
    }

    #[test]
    fn score_correlation_tracks_ar1_dependence() {
        // Gaussian AR(1) with ρ = 0.5: γ(k) = ρ^{2k}, τ² = 1 + 2 Σ 0.25^k = 5/3
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (rows, cols, rho) = (400, 400, 0.5f64);
        let mut values = vec![0.0; rows * cols];
        for i in 0..rows {
            let mut prev: f64 = StandardNormal.sample(&mut rng);
            values[i] = prev;
            for j in 1..cols {
                let z: f64 = StandardNormal.sample(&mut rng);
                prev = rho * prev + (1.0 - rho * rho).sqrt() * z;
                values[j * rows + i] = prev;
            }
        }
        normalize_scores(&mut values, rows, &[rows]);
        let scores = ScoreMatrix { rows, cols, values, bias: 1.0 / (rows - 1) as f64 };
        let est = score_correlation_tau_sq(&scores, None).unwrap();
        assert!((est.tau_sq - 5.0 / 3.0).abs() < 0.1, "{}", est.tau_sq);
    }
}
