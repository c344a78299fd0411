//! Data generation: AR(1) covariance factors, normal and `t₃` rows, sparse means.

use rand::Rng;
use rand_distr::{ChiSquared, Distribution as _, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;

/// Covariance structure `Σ_{ij} = ρ^{|i−j|}` (identity when `ρ = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Scenario {
    Identity,
    Ar1 { rho: f64 },
}

impl Scenario {
    pub fn rho(self) -> f64 {
        match self {
            Scenario::Identity => 0.0,
            Scenario::Ar1 { rho } => rho,
        }
    }

    pub fn label(self) -> String {
        match self {
            Scenario::Identity => "identity".to_string(),
            Scenario::Ar1 { rho } => format!("ar1({rho})"),
        }
    }
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    /// Accepts `identity`, `ar1(0.3)`, `ar1:0.3`, and the shorthands `1`, `2`, `3`
    /// for identity, `ar1(0.3)` and `ar1(0.6)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let bad = || Error::Validation(format!("unknown scenario '{s}'"));
        match s.as_str() {
            "identity" | "1" => return Ok(Scenario::Identity),
            "2" => return Ok(Scenario::Ar1 { rho: 0.3 }),
            "3" => return Ok(Scenario::Ar1 { rho: 0.6 }),
            _ => {}
        }
        let rest = s.strip_prefix("ar1").ok_or_else(bad)?;
        let num = rest
            .strip_prefix(':')
            .or_else(|| rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')))
            .ok_or_else(bad)?;
        let rho: f64 = num.trim().parse().map_err(|_| bad())?;
        if !(rho.abs() < 1.0) {
            return Err(Error::Domain(format!("AR(1) coefficient {rho} must lie in (-1, 1)")));
        }
        Ok(if rho == 0.0 { Scenario::Identity } else { Scenario::Ar1 { rho } })
    }
}

/// Marginal family of the generated rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    Normal,
    /// Normal scale mixture with one `χ²₃` divisor per row.
    T3,
}

impl Distribution {
    pub fn label(self) -> &'static str {
        match self {
            Distribution::Normal => "normal",
            Distribution::T3 => "t3",
        }
    }
}

impl std::str::FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "normal" | "gaussian" => Ok(Distribution::Normal),
            "t3" | "t" => Ok(Distribution::T3),
            other => Err(Error::Validation(format!("unknown distribution '{other}'"))),
        }
    }
}

/// Lower-triangular factor `L` of the AR(1) correlation matrix, `Σ = L Lᵀ`.
///
/// Closed form: `L_{i0} = ρ^i` and `L_{ij} = ρ^{i−j} √(1−ρ²)` for `1 ≤ j ≤ i`,
/// so `L z` is the stationary AR(1) recursion and costs `O(p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovFactor {
    p: usize,
    rho: f64,
}

impl CovFactor {
    pub fn identity(p: usize) -> Self {
        Self { p, rho: 0.0 }
    }

    pub fn ar1(p: usize, rho: f64) -> Result<Self> {
        if p < 1 {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        if !(rho.abs() < 1.0) {
            return Err(Error::Domain(format!("AR(1) coefficient {rho} must lie in (-1, 1)")));
        }
        Ok(Self { p, rho })
    }

    pub fn for_scenario(p: usize, scenario: Scenario) -> Result<Self> {
        Self::ar1(p, scenario.rho())
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Writes `L z` into `out`.
    pub fn apply(&self, z: &[f64], out: &mut [f64]) {
        debug_assert_eq!(z.len(), self.p);
        if self.rho == 0.0 {
            out.copy_from_slice(z);
            return;
        }
        let innov = (1.0 - self.rho * self.rho).sqrt();
        let mut prev = z[0];
        out[0] = prev;
        for j in 1..self.p {
            prev = self.rho * prev + innov * z[j];
            out[j] = prev;
        }
    }

    /// Dense rows of `L`.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let innov = (1.0 - self.rho * self.rho).sqrt();
        (0..self.p)
            .map(|i| {
                (0..self.p)
                    .map(|j| match j {
                        _ if j > i => 0.0,
                        0 => self.rho.powi(i as i32),
                        _ => self.rho.powi((i - j) as i32) * innov,
                    })
                    .collect()
            })
            .collect()
    }
}

/// Mean vector whose last `m_signal` entries are `√(0.5/m_signal)`; squared norm 0.5.
pub fn sparse_mean(p: usize, m_signal: usize) -> Result<Vec<f64>> {
    if m_signal > p {
        return Err(Error::Domain(format!(
            "number of signals {m_signal} exceeds dimension {p}"
        )));
    }
    let mut mu = vec![0.0; p];
    if m_signal > 0 {
        let v = (0.5 / m_signal as f64).sqrt();
        mu[p - m_signal..].iter_mut().for_each(|x| *x = v);
    }
    Ok(mu)
}

/// Draws `n` rows `μ + L z` (normal) or `μ + L z / √(w/3)` with `w ~ χ²₃` (t₃).
///
/// Per row the `p` normals are drawn first, then `w`.
pub fn sample_matrix<R: Rng + ?Sized>(
    n: usize,
    factor: &CovFactor,
    mu: &[f64],
    distribution: Distribution,
    rng: &mut R,
) -> Result<DataMatrix> {
    let p = factor.p();
    if mu.len() != p {
        return Err(Error::Validation(format!(
            "mean has length {}, factor has dimension {p}",
            mu.len()
        )));
    }
    if n < 2 {
        return Err(Error::Validation(format!("need at least 2 rows, got {n}")));
    }
    let chi3 = ChiSquared::new(3.0).expect("valid degrees of freedom");
    let mut values = vec![0.0; n * p];
    let mut z = vec![0.0; p];
    let mut row = vec![0.0; p];
    for i in 0..n {
        z.iter_mut().for_each(|v| *v = StandardNormal.sample(rng));
        factor.apply(&z, &mut row);
        let scale = match distribution {
            Distribution::Normal => 1.0,
            Distribution::T3 => {
                let w: f64 = chi3.sample(rng);
                1.0 / (w / 3.0).sqrt()
            }
        };
        for j in 0..p {
            values[j * n + i] = mu[j] + row[j] * scale;
        }
    }
    Ok(DataMatrix::from_trusted(n, p, values))
}
