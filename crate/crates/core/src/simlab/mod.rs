//! Monte Carlo laboratory for empirical size and power of the rank tests.
//!
//! Every replication `r` draws its data from its own ChaCha stream
//! (`seed = master_seed`, `stream = r`), so the tallies do not depend on how
//! replications are scheduled across threads. All cells of a power curve reuse
//! the same streams; only the mean vector changes between cells.

mod moments;
mod quadrature;
mod sampling;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use moments::{h1_moments_one_sample, h1_moments_two_sample};
pub use quadrature::integrate;
pub use sampling::{sample_matrix, sparse_mean, CovFactor, Distribution, Scenario};

use crate::error::{Error, Result};
use crate::testkit::{Method, Problem, RankSummary, TauMethod, TestOptions, TestResult};

/// Default sparsity grid for power curves, truncated at `p`.
pub const DEFAULT_SIGNAL_GRID: [usize; 8] = [1, 2, 5, 10, 20, 50, 100, 200];

pub fn default_signal_grid(p: usize) -> Vec<usize> {
    let mut grid: Vec<usize> = DEFAULT_SIGNAL_GRID.iter().map(|&m| m.min(p)).collect();
    grid.dedup();
    grid
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanSpec {
    /// One cell per entry; entry `k` uses [`sparse_mean`]`(p, k)`. `[0]` is a size study.
    Sparse(Vec<usize>),
    /// A single cell with this mean (for the first sample in the two-sample problem).
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub problem: Problem,
    pub n: usize,
    /// Size of the second sample; ignored for the one-sample problem.
    pub m: usize,
    pub p: usize,
    pub scenario: Scenario,
    pub distribution: Distribution,
    pub mean: MeanSpec,
    pub reps: usize,
    pub alpha: f64,
    pub master_seed: u64,
    pub bandwidth: Option<usize>,
    #[serde(default)]
    pub tau_method: TauMethod,
}

impl SimConfig {
    /// A size study with the reference defaults (`α = 0.05`, 1000 replications).
    pub fn size_study(problem: Problem, n: usize, p: usize, scenario: Scenario, distribution: Distribution) -> Self {
        Self {
            problem,
            n,
            m: n,
            p,
            scenario,
            distribution,
            mean: MeanSpec::Sparse(vec![0]),
            reps: 1000,
            alpha: 0.05,
            master_seed: 42,
            bandwidth: None,
            tau_method: TauMethod::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Validation(msg));
        if self.reps < 1 {
            return bad("reps must be at least 1".into());
        }
        if self.n < 2 || (self.problem == Problem::TwoSample && self.m < 2) {
            return bad("sample sizes must be at least 2".into());
        }
        if self.p < Method::Sum1.min_dimension() {
            return bad(format!("simulation needs p >= 4, got {}", self.p));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha {} is outside (0, 1)", self.alpha));
        }
        if !(self.scenario.rho().abs() < 1.0) {
            return bad(format!("AR(1) coefficient {} must lie in (-1, 1)", self.scenario.rho()));
        }
        if let Some(b) = self.bandwidth {
            if b >= self.p - 1 {
                return bad(format!("bandwidth {b} must be below p - 1 = {}", self.p - 1));
            }
        }
        match &self.mean {
            MeanSpec::Sparse(grid) => {
                if grid.is_empty() {
                    return bad("empty signal grid".into());
                }
                if let Some(&k) = grid.iter().find(|&&k| k > self.p) {
                    return bad(format!("signal count {k} exceeds p = {}", self.p));
                }
            }
            MeanSpec::Explicit(mu) => {
                if mu.len() != self.p {
                    return bad(format!("explicit mean has length {}, expected {}", mu.len(), self.p));
                }
                if mu.iter().any(|v| !v.is_finite()) {
                    return bad("explicit mean has non-finite entries".into());
                }
            }
        }
        Ok(())
    }

    fn options(&self) -> TestOptions {
        TestOptions {
            alpha: self.alpha,
            bandwidth: self.bandwidth,
            tau_method: self.tau_method,
        }
    }

    fn second_size(&self) -> Option<usize> {
        (self.problem == Problem::TwoSample).then_some(self.m)
    }

    /// `(m_signal, mean)` for every cell.
    fn cells(&self) -> Result<Vec<(usize, Vec<f64>)>> {
        match &self.mean {
            MeanSpec::Sparse(grid) => grid
                .iter()
                .map(|&k| Ok((k, sparse_mean(self.p, k)?)))
                .collect(),
            MeanSpec::Explicit(mu) => Ok(vec![(mu.iter().filter(|&&v| v != 0.0).count(), mu.clone())]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyKind {
    Size,
    Power,
}

/// One `(method, cell)` rejection frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub method: Method,
    pub n: usize,
    pub m: Option<usize>,
    pub p: usize,
    pub distribution: String,
    pub scenario: String,
    pub m_signal: usize,
    pub rejection_rate: f64,
    pub mc_stderr: f64,
}

/// A size table (all cells null) or a power curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyTable {
    pub kind: StudyKind,
    pub problem: Problem,
    pub reps: usize,
    pub alpha: f64,
    pub master_seed: u64,
    pub rows: Vec<StudyRow>,
}

pub const CSV_HEADER: &str = "method,n,m,p,distribution,scenario,m_signal,rejection_rate,mc_stderr";

impl StudyTable {
    pub fn rate(&self, method: Method, m_signal: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.m_signal == m_signal)
            .map(|r| r.rejection_rate)
    }

    /// CSV with the fixed header; reals use 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{:.16e},{:.16e}\n",
                r.method,
                r.n,
                r.m.map(|m| m.to_string()).unwrap_or_default(),
                r.p,
                r.distribution,
                r.scenario,
                r.m_signal,
                r.rejection_rate,
                r.mc_stderr
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }
}

/// The three test results for replication `rep`.
fn replicate(
    config: &SimConfig,
    factor: &CovFactor,
    mu: &[f64],
    zero: &[f64],
    opts: &TestOptions,
    rep: u64,
) -> Result<[TestResult; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.master_seed);
    rng.set_stream(rep);
    let summary = match config.problem {
        Problem::OneSample => {
            let x = sample_matrix(config.n, factor, mu, config.distribution, &mut rng)?;
            RankSummary::one_sample(&x)
        }
        Problem::TwoSample => {
            let x = sample_matrix(config.n, factor, mu, config.distribution, &mut rng)?;
            let y = sample_matrix(config.m, factor, zero, config.distribution, &mut rng)?;
            RankSummary::two_sample(&x, &y)?
        }
    };
    summary.all_tests(opts)
}

/// Statistics and p-values of one replication.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatisticDraw {
    pub t_max: f64,
    pub t_sum: f64,
    pub p_max: f64,
    pub p_sum: f64,
    pub p_com: f64,
}

/// Per-replication statistics for the first cell of `config`, in replication order.
///
/// Replication `r` sees exactly the data that [`run_study`] uses for its replication `r`.
pub fn statistic_draws(config: &SimConfig) -> Result<Vec<StatisticDraw>> {
    config.validate()?;
    let factor = CovFactor::for_scenario(config.p, config.scenario)?;
    let opts = config.options();
    let zero = vec![0.0; config.p];
    let (_, mu) = config.cells()?.swap_remove(0);
    (0..config.reps as u64)
        .into_par_iter()
        .map(|rep| {
            let [max, sum, com] = replicate(config, &factor, &mu, &zero, &opts, rep)?;
            Ok(StatisticDraw {
                t_max: max.statistic,
                t_sum: sum.statistic,
                p_max: max.p_value.value(),
                p_sum: sum.p_value.value(),
                p_com: com.p_value.value(),
            })
        })
        .collect()
}

/// Runs every cell of `config` on the current rayon pool.
pub fn run_study(config: &SimConfig) -> Result<StudyTable> {
    config.validate()?;
    let factor = CovFactor::for_scenario(config.p, config.scenario)?;
    let opts = config.options();
    let zero = vec![0.0; config.p];
    let cells = config.cells()?;
    let kind = if cells.iter().all(|(k, _)| *k == 0) {
        StudyKind::Size
    } else {
        StudyKind::Power
    };
    let mut rows = Vec::with_capacity(cells.len() * 3);
    for (m_signal, mu) in &cells {
        let decisions: Vec<[bool; 3]> = (0..config.reps as u64)
            .into_par_iter()
            .map(|rep| replicate(config, &factor, mu, &zero, &opts, rep).map(|r| r.map(|t| t.reject)))
            .collect::<Result<_>>()?;
        for (i, method) in Method::ALL.into_iter().enumerate() {
            let hits = decisions.iter().filter(|d| d[i]).count();
            let rate = hits as f64 / config.reps as f64;
            rows.push(StudyRow {
                method,
                n: config.n,
                m: config.second_size(),
                p: config.p,
                distribution: config.distribution.label().to_string(),
                scenario: config.scenario.label(),
                m_signal: *m_signal,
                rejection_rate: rate,
                mc_stderr: (rate * (1.0 - rate) / config.reps as f64).sqrt(),
            });
        }
    }
    Ok(StudyTable {
        kind,
        problem: config.problem,
        reps: config.reps,
        alpha: config.alpha,
        master_seed: config.master_seed,
        rows,
    })
}

/// Runs [`run_study`] on a dedicated pool with `threads` workers.
pub fn run_study_with_threads(config: &SimConfig, threads: usize) -> Result<StudyTable> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Numerical(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_study(config))
}
