//! The max-type, sum-type and Cauchy-combined procedures for the one-sample
//! (`μ = 0`) and two-sample (`μ₁ = μ₂`) problems.
//!
//! | method | statistic | null calibration |
//! |--------|-----------|------------------|
//! | `MAX1` | `max_i V_i² − 2 log p + log log p` | `1 − G(T)` |
//! | `SUM1` | `√p (M − E M_i) / √(Var M_i · τ̂²)` | `1 − Φ(T)` |
//! | `COM1` | Cauchy combination of the two p-values | the combined value itself |
//!
//! Everything here is a deterministic function of the input matrices.

mod tau;

use serde::{Deserialize, Serialize};

pub use tau::{default_bandwidth, estimate_tau_sq, TauEstimate, TauMethod, TAU_SQ_FLOOR};

use crate::error::{Error, Result};
use crate::limit_dists::{cauchy_combine, gumbel_type_sf, std_normal_sf, PValue};
use crate::matrix::DataMatrix;
use crate::rank_core::{
    one_sample_msq_moments, one_sample_u_moments, signed_rank_column, two_sample_gamma_moments,
    two_sample_u_moments, wmw_column, MomentPair, RankScratch,
};
use tau::{normalize_scores, score_correlation_tau_sq, ScoreMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    OneSample,
    TwoSample,
}

impl std::fmt::Display for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Problem::OneSample => "one_sample",
            Problem::TwoSample => "two_sample",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "MAX1")]
    Max1,
    #[serde(rename = "SUM1")]
    Sum1,
    #[serde(rename = "COM1")]
    Com1,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Max1, Method::Sum1, Method::Com1];

    pub fn name(self) -> &'static str {
        match self {
            Method::Max1 => "MAX1",
            Method::Sum1 => "SUM1",
            Method::Com1 => "COM1",
        }
    }

    /// Smallest dimension the method is defined for.
    pub fn min_dimension(self) -> usize {
        match self {
            Method::Max1 => 3,
            Method::Sum1 | Method::Com1 => 4,
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestOptions {
    pub alpha: f64,
    /// Bartlett bandwidth for `τ̂²`; `None` selects `⌊3 p^{1/3}⌋`.
    pub bandwidth: Option<usize>,
    pub tau_method: TauMethod,
}

impl Default for TestOptions {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            bandwidth: None,
            tau_method: TauMethod::default(),
        }
    }
}

impl TestOptions {
    pub fn with_alpha(alpha: f64) -> Self {
        Self {
            alpha,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.alpha > 0.0 && self.alpha < 1.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!("alpha {} is outside (0, 1)", self.alpha)))
        }
    }
}

/// Side information attached to a [`TestResult`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TestMeta {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    pub p: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_sq: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_method: Option<TauMethod>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_floored: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_sum: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clamped: Option<bool>,
    pub ties_detected: bool,
    pub zeros_detected: bool,
    pub degenerate_columns: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub problem: Problem,
    pub method: Method,
    /// `T_max`, `T_sum`, or the combined p-value for `COM1`.
    pub statistic: f64,
    pub p_value: PValue,
    pub reject: bool,
    pub alpha: f64,
    pub meta: TestMeta,
}

impl TestResult {
    fn new(
        problem: Problem,
        method: Method,
        statistic: f64,
        p_value: f64,
        alpha: f64,
        meta: TestMeta,
    ) -> Result<Self> {
        if !statistic.is_finite() {
            return Err(Error::Numerical(format!("{method} statistic is not finite")));
        }
        let p_value = PValue::new(p_value)
            .map_err(|_| Error::Numerical(format!("{method} p-value {p_value} is invalid")))?;
        Ok(Self {
            problem,
            method,
            statistic,
            reject: p_value.value() <= alpha,
            p_value,
            alpha,
            meta,
        })
    }
}

/// Per-coordinate rank summaries shared by the three procedures.
#[derive(Debug, Clone)]
pub struct RankSummary {
    problem: Problem,
    n: usize,
    m: Option<usize>,
    /// `U_i − E_{H0} U_i` for each coordinate.
    deviations: Vec<f64>,
    u_moments: MomentPair,
    sq_moments: MomentPair,
    scores: ScoreMatrix,
    ties: bool,
    zeros: bool,
    degenerate: usize,
}

fn is_constant(col: &[f64]) -> bool {
    col.iter().all(|&v| v == col[0])
}

impl RankSummary {
    /// Signed-rank summaries of every column of `x`.
    pub fn one_sample(x: &DataMatrix) -> Self {
        let (n, p) = (x.n(), x.p());
        let u_moments = one_sample_u_moments(n).expect("n >= 2");
        let sq_moments = one_sample_msq_moments(n).expect("n >= 2");
        let mut scratch = RankScratch::default();
        let mut scores = vec![0.0; n * p];
        let mut deviations = Vec::with_capacity(p);
        let (mut ties, mut zeros, mut degenerate) = (false, false, 0);
        for (col, out) in x.columns().zip(scores.chunks_exact_mut(n)) {
            let stat = signed_rank_column(col, &mut scratch, Some(out));
            deviations.push(stat.u - u_moments.mean);
            ties |= stat.tied;
            zeros |= stat.zeros > 0;
            degenerate += usize::from(is_constant(col));
        }
        normalize_scores(&mut scores, n, &[n]);
        let summary = Self {
            problem: Problem::OneSample,
            n,
            m: None,
            deviations,
            u_moments,
            sq_moments,
            scores: ScoreMatrix {
                rows: n,
                cols: p,
                values: scores,
                bias: 1.0 / (n - 1) as f64,
            },
            ties,
            zeros,
            degenerate,
        };
        summary.warn();
        summary
    }

    /// WMW summaries of every coordinate of `(x, y)`.
    pub fn two_sample(x: &DataMatrix, y: &DataMatrix) -> Result<Self> {
        if x.p() != y.p() {
            return Err(Error::Validation(format!(
                "dimension mismatch: x has {} columns, y has {}",
                x.p(),
                y.p()
            )));
        }
        let (n, m, p) = (x.n(), y.n(), x.p());
        let rows = n + m;
        let u_moments = two_sample_u_moments(n, m)?;
        let sq_moments = two_sample_gamma_moments(n, m)?;
        let mut scratch = RankScratch::default();
        let mut scores = vec![0.0; rows * p];
        let mut deviations = Vec::with_capacity(p);
        let (mut ties, mut degenerate) = (false, 0);
        for ((cx, cy), out) in x.columns().zip(y.columns()).zip(scores.chunks_exact_mut(rows)) {
            let stat = wmw_column(cx, cy, &mut scratch, Some(out));
            deviations.push(stat.u - u_moments.mean);
            ties |= stat.tied;
            degenerate += usize::from(is_constant(cx) && is_constant(cy) && cx[0] == cy[0]);
        }
        // centring within each sample removes any location difference between them
        normalize_scores(&mut scores, rows, &[n, m]);
        let summary = Self {
            problem: Problem::TwoSample,
            n,
            m: Some(m),
            deviations,
            u_moments,
            sq_moments,
            scores: ScoreMatrix {
                rows,
                cols: p,
                values: scores,
                bias: 1.0 / (rows - 2) as f64,
            },
            ties,
            zeros: false,
            degenerate,
        };
        summary.warn();
        Ok(summary)
    }

    fn warn(&self) {
        if self.ties {
            log::warn!("tied observations detected; mid-ranks used with tie-free null moments");
        }
        if self.zeros {
            log::warn!("exact zeros detected; they are ranked but never counted as positive");
        }
        if self.degenerate > 0 {
            log::warn!("{} constant coordinate(s) detected", self.degenerate);
        }
    }

    pub fn p(&self) -> usize {
        self.deviations.len()
    }

    /// Standardized per-coordinate statistics (`V_n^i` or `ν_n^i`).
    pub fn standardized(&self) -> Vec<f64> {
        let sd = self.u_moments.sd();
        self.deviations.iter().map(|d| d / sd).collect()
    }

    /// Standardized squared deviations (`R_n^i` or `ρ_n^i`).
    pub fn standardized_squares(&self) -> Vec<f64> {
        let MomentPair { mean, variance } = self.sq_moments;
        let sd = variance.sqrt();
        self.deviations.iter().map(|d| (d * d - mean) / sd).collect()
    }

    fn meta(&self) -> TestMeta {
        TestMeta {
            n: self.n,
            m: self.m,
            p: self.p(),
            ties_detected: self.ties,
            zeros_detected: self.zeros,
            degenerate_columns: self.degenerate,
            ..TestMeta::default()
        }
    }

    fn require_dimension(&self, method: Method) -> Result<()> {
        let need = method.min_dimension();
        if self.p() < need {
            return Err(Error::Domain(format!(
                "{method} needs at least {need} coordinates (log log p and the limit law are undefined below that), got p = {}",
                self.p()
            )));
        }
        Ok(())
    }

    pub fn tau(&self, opts: &TestOptions) -> Result<TauEstimate> {
        match opts.tau_method {
            TauMethod::ScoreCorrelation => score_correlation_tau_sq(&self.scores, opts.bandwidth),
            TauMethod::Autocovariance => {
                estimate_tau_sq(&self.standardized_squares(), opts.bandwidth)
            }
        }
    }

    pub fn max_test(&self, opts: &TestOptions) -> Result<TestResult> {
        opts.validate()?;
        self.require_dimension(Method::Max1)?;
        let p = self.p() as f64;
        let vmax = self
            .standardized()
            .into_iter()
            .fold(0.0f64, |acc, v| acc.max(v.abs()));
        let statistic = vmax * vmax - 2.0 * p.ln() + p.ln().ln();
        TestResult::new(
            self.problem,
            Method::Max1,
            statistic,
            gumbel_type_sf(statistic),
            opts.alpha,
            self.meta(),
        )
    }

    pub fn sum_test(&self, opts: &TestOptions) -> Result<TestResult> {
        opts.validate()?;
        self.require_dimension(Method::Sum1)?;
        let tau = self.tau(opts)?;
        let p = self.p() as f64;
        let mean_sq = self.deviations.iter().map(|d| d * d).sum::<f64>() / p;
        let MomentPair { mean, variance } = self.sq_moments;
        if !(variance > 0.0) {
            return Err(Error::Numerical(
                "null variance of the squared statistic is zero; sample sizes too small".into(),
            ));
        }
        let statistic = p.sqrt() * (mean_sq - mean) / (variance * tau.tau_sq).sqrt();
        let meta = TestMeta {
            tau_sq: Some(tau.tau_sq),
            bandwidth: Some(tau.bandwidth),
            tau_method: Some(opts.tau_method),
            tau_floored: Some(tau.floored),
            ..self.meta()
        };
        TestResult::new(
            self.problem,
            Method::Sum1,
            statistic,
            std_normal_sf(statistic),
            opts.alpha,
            meta,
        )
    }

    /// `COM1` from already computed constituents.
    pub fn combine(&self, max: &TestResult, sum: &TestResult, opts: &TestOptions) -> Result<TestResult> {
        let combined = cauchy_combine(max.p_value, sum.p_value);
        let p = combined.p_value.value();
        let meta = TestMeta {
            p_max: Some(max.p_value.value()),
            p_sum: Some(sum.p_value.value()),
            clamped: Some(combined.clamped),
            ..sum.meta.clone()
        };
        TestResult::new(self.problem, Method::Com1, p, p, opts.alpha, meta)
    }

    pub fn com_test(&self, opts: &TestOptions) -> Result<TestResult> {
        let max = self.max_test(opts)?;
        let sum = self.sum_test(opts)?;
        self.combine(&max, &sum, opts)
    }

    /// `[MAX1, SUM1, COM1]`, sharing the rank work.
    pub fn all_tests(&self, opts: &TestOptions) -> Result<[TestResult; 3]> {
        let max = self.max_test(opts)?;
        let sum = self.sum_test(opts)?;
        let com = self.combine(&max, &sum, opts)?;
        Ok([max, sum, com])
    }

    pub fn run(&self, method: Method, opts: &TestOptions) -> Result<TestResult> {
        match method {
            Method::Max1 => self.max_test(opts),
            Method::Sum1 => self.sum_test(opts),
            Method::Com1 => self.com_test(opts),
        }
    }
}

pub fn max_test_one(x: &DataMatrix, opts: &TestOptions) -> Result<TestResult> {
    RankSummary::one_sample(x).max_test(opts)
}

pub fn sum_test_one(x: &DataMatrix, opts: &TestOptions) -> Result<TestResult> {
    RankSummary::one_sample(x).sum_test(opts)
}

pub fn com_test_one(x: &DataMatrix, opts: &TestOptions) -> Result<TestResult> {
    RankSummary::one_sample(x).com_test(opts)
}

pub fn max_test_two(x: &DataMatrix, y: &DataMatrix, opts: &TestOptions) -> Result<TestResult> {
    RankSummary::two_sample(x, y)?.max_test(opts)
}

pub fn sum_test_two(x: &DataMatrix, y: &DataMatrix, opts: &TestOptions) -> Result<TestResult> {
    RankSummary::two_sample(x, y)?.sum_test(opts)
}

pub fn com_test_two(x: &DataMatrix, y: &DataMatrix, opts: &TestOptions) -> Result<TestResult> {
    RankSummary::two_sample(x, y)?.com_test(opts)
}
