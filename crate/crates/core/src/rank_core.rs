//! Per-coordinate rank kernels and their closed-form moments.
//!
//! Two statistics are computed one coordinate at a time:
//!
//! - the Wilcoxon signed-rank statistic `U = Σ R_i I(x_i > 0)`, with `R_i` the
//!   mid-rank of `|x_i|` among all `|x_j|`;
//! - the Wilcoxon–Mann–Whitney statistic `U^{xy} = Σ R_i^{xy} − n(n+1)/2`, with
//!   `R_i^{xy}` the mid-rank of `x_i` in the pooled sample.
//!
//! Ties get mid-ranks. An exact zero in the one-sample problem keeps its slot in
//! the ranking of `|x|` but never counts as positive. The null moments are the
//! tie-free formulas regardless; callers are told about ties through the
//! `tied`/`zeros` fields of the column summaries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;

/// Mean and variance of a statistic under a stated hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentPair {
    pub mean: f64,
    pub variance: f64,
}

impl MomentPair {
    pub fn sd(&self) -> f64 {
        self.variance.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StandardizedKind {
    /// `V_n^i`, standardized signed-rank statistics.
    OneSampleV,
    /// `ν_n^i`, standardized WMW statistics.
    TwoSampleNu,
}

/// One standardized per-coordinate statistic for each of the `p` columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizedVector {
    pub entries: Vec<f64>,
    pub kind: StandardizedKind,
}

fn check_finite(values: &[f64], what: &str) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::Validation(format!(
            "{what}: non-finite value at position {}",
            i + 1
        ))),
        None => Ok(()),
    }
}

/// Writes mid-ranks (1-based) of `values` into `out`. Returns `true` if any tie was seen.
///
/// `values` must be finite.
pub(crate) fn midrank_into(values: &[f64], idx: &mut Vec<usize>, out: &mut Vec<f64>) -> bool {
    let k = values.len();
    idx.clear();
    idx.extend(0..k);
    idx.sort_unstable_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    out.clear();
    out.resize(k, 0.0);
    let mut tied = false;
    let mut start = 0;
    while start < k {
        let v = values[idx[start]];
        let mut end = start + 1;
        while end < k && values[idx[end]] == v {
            end += 1;
        }
        if end - start > 1 {
            tied = true;
        }
        // positions start+1 ..= end share the average rank
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &idx[start..end] {
            out[i] = rank;
        }
        start = end;
    }
    tied
}

/// Mid-ranks of `values`: ranks in `1..=k`, tied values share the average of
/// the positions they span.
pub fn midrank(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::Validation("midrank of an empty sequence".into()));
    }
    check_finite(values, "midrank")?;
    let mut idx = Vec::new();
    let mut out = Vec::new();
    midrank_into(values, &mut idx, &mut out);
    Ok(out)
}

/// Reusable buffers for the column kernels.
#[derive(Debug, Default)]
pub(crate) struct RankScratch {
    idx: Vec<usize>,
    ranks: Vec<f64>,
    work: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ColumnStat {
    pub u: f64,
    pub tied: bool,
    pub zeros: usize,
}

/// Signed-rank statistic of one column. If `scores` is given it receives the
/// signed rank `sign(x_i) R_i` of every observation.
pub(crate) fn signed_rank_column(
    x: &[f64],
    scratch: &mut RankScratch,
    scores: Option<&mut [f64]>,
) -> ColumnStat {
    scratch.work.clear();
    scratch.work.extend(x.iter().map(|v| v.abs()));
    let tied = midrank_into(&scratch.work, &mut scratch.idx, &mut scratch.ranks);
    let mut u = 0.0;
    let mut zeros = 0;
    for (&xi, &r) in x.iter().zip(&scratch.ranks) {
        if xi > 0.0 {
            u += r;
        } else if xi == 0.0 {
            zeros += 1;
        }
    }
    if let Some(scores) = scores {
        for ((s, &xi), &r) in scores.iter_mut().zip(x).zip(&scratch.ranks) {
            *s = if xi > 0.0 {
                r
            } else if xi < 0.0 {
                -r
            } else {
                0.0
            };
        }
    }
    ColumnStat { u, tied, zeros }
}

/// WMW statistic of one coordinate. If `pooled_ranks` is given it receives the
/// mid-ranks of the pooled sample `(x, y)` in that order.
pub(crate) fn wmw_column(
    x: &[f64],
    y: &[f64],
    scratch: &mut RankScratch,
    pooled_ranks: Option<&mut [f64]>,
) -> ColumnStat {
    scratch.work.clear();
    scratch.work.extend_from_slice(x);
    scratch.work.extend_from_slice(y);
    let tied = midrank_into(&scratch.work, &mut scratch.idx, &mut scratch.ranks);
    let n = x.len() as f64;
    let rank_sum: f64 = scratch.ranks[..x.len()].iter().sum();
    if let Some(out) = pooled_ranks {
        out.copy_from_slice(&scratch.ranks);
    }
    ColumnStat {
        u: rank_sum - n * (n + 1.0) / 2.0,
        tied,
        zeros: 0,
    }
}

/// Wilcoxon signed-rank statistic `Σ R_i I(x_i > 0)`.
pub fn signed_rank_u(column: &[f64]) -> Result<f64> {
    if column.is_empty() {
        return Err(Error::Validation("signed-rank statistic of an empty column".into()));
    }
    check_finite(column, "signed_rank_u")?;
    Ok(signed_rank_column(column, &mut RankScratch::default(), None).u)
}

/// Wilcoxon–Mann–Whitney statistic: rank sum of `x` in the pooled sample minus `n(n+1)/2`.
pub fn wmw_u(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::Validation("WMW statistic needs two non-empty samples".into()));
    }
    check_finite(x, "wmw_u (x)")?;
    check_finite(y, "wmw_u (y)")?;
    Ok(wmw_column(x, y, &mut RankScratch::default(), None).u)
}

fn require_positive(name: &str, v: usize) -> Result<()> {
    if v < 1 {
        Err(Error::Domain(format!("{name} must be at least 1, got {v}")))
    } else {
        Ok(())
    }
}

/// Exact integer value if it fits in `i128`, else `None`.
fn horner_i128(coeffs_high_to_low: &[i128], x: i128) -> Option<i128> {
    coeffs_high_to_low
        .iter()
        .try_fold(0i128, |acc, &c| acc.checked_mul(x)?.checked_add(c))
}

fn horner_f64(coeffs_high_to_low: &[i128], x: f64) -> f64 {
    coeffs_high_to_low
        .iter()
        .fold(0.0, |acc, &c| acc * x + c as f64)
}

/// Null mean and variance of the signed-rank statistic:
/// `(n(n+1)/4, n(n+1)(2n+1)/24)`.
pub fn one_sample_u_moments(n: usize) -> Result<MomentPair> {
    require_positive("n", n)?;
    let n = n as i128;
    let mean = (n * (n + 1)) as f64 / 4.0;
    let variance = (n * (n + 1) * (2 * n + 1)) as f64 / 24.0;
    Ok(MomentPair { mean, variance })
}

/// Null mean and variance of `M_n^i = (U_i − E U_i)²`.
///
/// The variance polynomial `(20n⁶ + 24n⁵ − 25n⁴ − 30n³ + 5n² + 6n)/1440` is
/// evaluated by Horner's scheme in exact 128-bit integers, falling back to
/// floating point only if that overflows (far beyond `n = 10⁶`).
pub fn one_sample_msq_moments(n: usize) -> Result<MomentPair> {
    let u = one_sample_u_moments(n)?;
    const POLY: [i128; 7] = [20, 24, -25, -30, 5, 6, 0];
    let numerator = match horner_i128(&POLY, n as i128) {
        Some(v) => v as f64,
        None => horner_f64(&POLY, n as f64),
    };
    Ok(MomentPair {
        mean: u.variance,
        variance: numerator / 1440.0,
    })
}

/// Null mean and variance of the WMW statistic: `(nm/2, nm(n+m+1)/12)`.
pub fn two_sample_u_moments(n: usize, m: usize) -> Result<MomentPair> {
    require_positive("n", n)?;
    require_positive("m", m)?;
    let (n, m) = (n as i128, m as i128);
    Ok(MomentPair {
        mean: (n * m) as f64 / 2.0,
        variance: (n * m * (n + m + 1)) as f64 / 12.0,
    })
}

/// Null mean and variance of `γ_n^i = (U_i^{xy} − nm/2)²`.
///
/// Variance: `{nm(5(n+m)+8) − 3(n+m)(n+m+1)}(n+m+1)nm/360`.
pub fn two_sample_gamma_moments(n: usize, m: usize) -> Result<MomentPair> {
    let u = two_sample_u_moments(n, m)?;
    let (ni, mi) = (n as i128, m as i128);
    let exact = (|| {
        let nm = ni.checked_mul(mi)?;
        let s = ni + mi;
        let bracket = nm
            .checked_mul(5 * s + 8)?
            .checked_sub(3i128.checked_mul(s)?.checked_mul(s + 1)?)?;
        bracket.checked_mul(s + 1)?.checked_mul(nm)
    })();
    let numerator = match exact {
        Some(v) => v as f64,
        None => {
            let (nf, mf) = (n as f64, m as f64);
            let s = nf + mf;
            (nf * mf * (5.0 * s + 8.0) - 3.0 * s * (s + 1.0)) * (s + 1.0) * nf * mf
        }
    };
    Ok(MomentPair {
        mean: u.variance,
        variance: numerator / 360.0,
    })
}

/// `V_n^i = (U_i − n(n+1)/4) / √(n(n+1)(2n+1)/24)` for every column of `x`.
pub fn standardized_signed_ranks(x: &DataMatrix) -> StandardizedVector {
    let mom = one_sample_u_moments(x.n()).expect("DataMatrix has n >= 2");
    let sd = mom.sd();
    let mut scratch = RankScratch::default();
    let entries = x
        .columns()
        .map(|c| (signed_rank_column(c, &mut scratch, None).u - mom.mean) / sd)
        .collect();
    StandardizedVector {
        entries,
        kind: StandardizedKind::OneSampleV,
    }
}

/// `ν_n^i = (U_i^{xy} − nm/2) / √(nm(n+m+1)/12)` for every coordinate.
pub fn standardized_wmw(x: &DataMatrix, y: &DataMatrix) -> Result<StandardizedVector> {
    if x.p() != y.p() {
        return Err(Error::Validation(format!(
            "dimension mismatch: x has {} columns, y has {}",
            x.p(),
            y.p()
        )));
    }
    let mom = two_sample_u_moments(x.n(), y.n())?;
    let sd = mom.sd();
    let mut scratch = RankScratch::default();
    let entries = x
        .columns()
        .zip(y.columns())
        .map(|(cx, cy)| (wmw_column(cx, cy, &mut scratch, None).u - mom.mean) / sd)
        .collect();
    Ok(StandardizedVector {
        entries,
        kind: StandardizedKind::TwoSampleNu,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Independent oracles: pair counts, no ranking involved.
    fn walsh_count(x: &[f64]) -> f64 {
        let mut c = 0;
        for i in 0..x.len() {
            for j in i..x.len() {
                if x[i] + x[j] > 0.0 {
                    c += 1;
                }
            }
        }
        c as f64
    }

    fn pair_count(x: &[f64], y: &[f64]) -> f64 {
        x.iter()
            .map(|a| y.iter().filter(|&&b| a > &b).count())
            .sum::<usize>() as f64
    }

    #[test]
    fn midrank_examples() {
        assert_eq!(midrank(&[3.0, 1.0, 2.0]).unwrap(), vec![3.0, 1.0, 2.0]);
        assert_eq!(midrank(&[1.0, 1.0, 2.0]).unwrap(), vec![1.5, 1.5, 3.0]);
        assert_eq!(midrank(&[5.0]).unwrap(), vec![1.0]);
        assert_eq!(
            midrank(&[2.0, 2.0, 2.0, -1.0]).unwrap(),
            vec![3.0, 3.0, 3.0, 1.0]
        );
        assert!(matches!(midrank(&[1.0, f64::INFINITY]), Err(Error::Validation(_))));
        assert!(midrank(&[]).is_err());
    }

    #[test]
    fn signed_rank_examples() {
        let x = [1.2, -0.5, 2.0];
        assert_eq!(walsh_count(&x), 5.0);
        assert_eq!(signed_rank_u(&x).unwrap(), 5.0);
        assert_eq!(signed_rank_u(&[-1.0, -2.0, -3.0]).unwrap(), 0.0);
        assert_eq!(signed_rank_u(&[1.0, 2.0, 3.0, 4.0]).unwrap(), 10.0);
        assert!(signed_rank_u(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn zeros_keep_their_slot() {
        // |x| ranks: 0 -> 1, 1 -> 2, -2 -> 3, 3 -> 4
        let stat = signed_rank_column(&[0.0, 1.0, -2.0, 3.0], &mut RankScratch::default(), None);
        assert_eq!(stat.u, 6.0);
        assert_eq!(stat.zeros, 1);
        assert!(!stat.tied);
        let tied = signed_rank_column(&[1.0, -1.0, 2.0], &mut RankScratch::default(), None);
        assert!(tied.tied);
        assert_eq!(tied.u, 1.5 + 3.0);
    }

    #[test]
    fn wmw_examples() {
        assert_eq!(pair_count(&[1.0, 2.0], &[0.0]), 2.0);
        assert_eq!(wmw_u(&[1.0, 2.0], &[0.0]).unwrap(), 2.0);
        assert_eq!(wmw_u(&[5.0], &[1.0, 2.0, 3.0]).unwrap(), 3.0);
        assert_eq!(wmw_u(&[0.0], &[1.0, 2.0]).unwrap(), 0.0);
        // a tie between samples counts one half
        assert_eq!(wmw_u(&[1.0], &[1.0]).unwrap(), 0.5);
        assert!(wmw_u(&[], &[1.0]).is_err());
    }

    #[test]
    fn moment_examples() {
        let m = one_sample_u_moments(10).unwrap();
        assert_eq!((m.mean, m.variance), (27.5, 96.25));
        let m = one_sample_u_moments(1).unwrap();
        assert_eq!((m.mean, m.variance), (0.5, 0.25));
        let m = one_sample_u_moments(100).unwrap();
        assert_eq!((m.mean, m.variance), (2525.0, 84587.5));
        assert!(matches!(one_sample_u_moments(0), Err(Error::Domain(_))));

        let m = one_sample_msq_moments(10).unwrap();
        assert_eq!((m.mean, m.variance), (96.25, 15361.5));
        let m = one_sample_msq_moments(2).unwrap();
        assert_eq!((m.mean, m.variance), (1.25, 1.0));
        let m = one_sample_msq_moments(100).unwrap();
        assert_eq!(m.mean, 84587.5);
        assert_eq!(m.variance, 14_053_798_646.25);

        let m = two_sample_u_moments(10, 10).unwrap();
        assert_eq!((m.mean, m.variance), (50.0, 175.0));
        let m = two_sample_u_moments(1, 1).unwrap();
        assert_eq!((m.mean, m.variance), (0.5, 0.25));
        let m = two_sample_u_moments(100, 100).unwrap();
        assert_eq!((m.mean, m.variance), (5000.0, 167500.0));
        assert!(two_sample_u_moments(0, 3).is_err());

        let m = two_sample_gamma_moments(10, 10).unwrap();
        assert_eq!((m.mean, m.variance), (175.0, 55650.0));
        // U ∈ {0, 1} for n = m = 1, so (U − 1/2)² is constant
        let m = two_sample_gamma_moments(1, 1).unwrap();
        assert_eq!((m.mean, m.variance), (0.25, 0.0));
        for n in 1..=50 {
            for m in 1..=50 {
                assert_eq!(
                    two_sample_gamma_moments(n, m).unwrap(),
                    two_sample_gamma_moments(m, n).unwrap()
                );
            }
        }
    }

    #[test]
    fn msq_moments_do_not_overflow() {
        let n = 1_000_000usize;
        let m = one_sample_msq_moments(n).unwrap();
        let nf = n as f64;
        let approx = 20.0 * nf.powi(6) / 1440.0;
        assert!(m.variance.is_finite());
        assert!((m.variance / approx - 1.0).abs() < 1e-5);
        let g = two_sample_gamma_moments(n, n).unwrap();
        assert!(g.variance.is_finite() && g.variance > 0.0);
    }

    #[test]
    fn msq_moments_match_enumeration() {
        // exact null law of U over all 2^n sign patterns of ranks 1..n
        for n in 1..=10usize {
            let mom = one_sample_u_moments(n).unwrap();
            let (mut s1, mut s2) = (0.0, 0.0);
            for mask in 0u32..(1 << n) {
                let u: f64 = (0..n).filter(|b| mask >> b & 1 == 1).map(|b| (b + 1) as f64).sum();
                let d = (u - mom.mean).powi(2);
                s1 += d;
                s2 += d * d;
            }
            let cnt = (1u64 << n) as f64;
            let mean = s1 / cnt;
            let var = s2 / cnt - mean * mean;
            let msq = one_sample_msq_moments(n).unwrap();
            assert!((msq.mean - mean).abs() < 1e-9, "n={n}");
            assert!((msq.variance - var).abs() < 1e-6 * var.max(1.0), "n={n}: {} vs {var}", msq.variance);
        }
    }

    #[test]
    fn standardized_examples() {
        let pos: Vec<f64> = (1..=10).map(f64::from).collect();
        let neg: Vec<f64> = pos.iter().map(|v| -v).collect();
        let x = DataMatrix::from_columns(&[pos.clone(), neg, pos.clone()]).unwrap();
        let v = standardized_signed_ranks(&x);
        let expected = (55.0 - 27.5) / 96.25f64.sqrt();
        assert!((v.entries[0] - expected).abs() < 1e-12);
        assert!((expected - 2.8031).abs() < 1e-4);
        assert_eq!(v.entries[1], -v.entries[0]);
        assert_eq!(v.entries[2], v.entries[0]);
        assert_eq!(v.kind, StandardizedKind::OneSampleV);

        let hi: Vec<f64> = (11..=20).map(f64::from).collect();
        let lo: Vec<f64> = (1..=10).map(f64::from).collect();
        let x = DataMatrix::from_columns(&[hi.clone()]).unwrap();
        let y = DataMatrix::from_columns(&[lo.clone()]).unwrap();
        let nu = standardized_wmw(&x, &y).unwrap();
        assert!((nu.entries[0] - 50.0 / 175f64.sqrt()).abs() < 1e-12);
        assert!((nu.entries[0] - 3.7796).abs() < 1e-4);
        let swapped = standardized_wmw(&y, &x).unwrap();
        assert_eq!(swapped.entries[0], -nu.entries[0]);

        let y2 = DataMatrix::from_columns(&[lo.clone(), lo]).unwrap();
        assert!(matches!(standardized_wmw(&x, &y2), Err(Error::Validation(_))));
    }

    #[test]
    fn standardized_wmw_is_centered_under_null() {
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let draws = 10_000;
        let mut total = 0.0;
        for _ in 0..draws {
            let x: Vec<f64> = (0..10).map(|_| rng.random::<f64>()).collect();
            let y: Vec<f64> = (0..10).map(|_| rng.random::<f64>()).collect();
            let xm = DataMatrix::from_columns(&[x]).unwrap();
            let ym = DataMatrix::from_columns(&[y]).unwrap();
            total += standardized_wmw(&xm, &ym).unwrap().entries[0];
        }
        assert!((total / draws as f64).abs() < 0.05);
    }

    #[test]
    fn exhaustive_null_moments() {
        // every sign pattern of a fixed tie-free |x|
        for n in 1..=8usize {
            let abs: Vec<f64> = (0..n).map(|i| 0.37 + 1.13 * i as f64).collect();
            let mut vals = Vec::new();
            for mask in 0u32..(1 << n) {
                let x: Vec<f64> = abs
                    .iter()
                    .enumerate()
                    .map(|(i, &a)| if mask >> i & 1 == 1 { a } else { -a })
                    .collect();
                vals.push(signed_rank_u(&x).unwrap());
            }
            let (mean, var) = mean_var(&vals);
            let mom = one_sample_u_moments(n).unwrap();
            assert!((mean - mom.mean).abs() < 1e-9);
            assert!((var - mom.variance).abs() < 1e-9);
        }
    }

    fn mean_var(v: &[f64]) -> (f64, f64) {
        let k = v.len() as f64;
        let mean = v.iter().sum::<f64>() / k;
        let var = v.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / k;
        (mean, var)
    }

    fn finite_vec(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-100.0f64..100.0, 1..=max_len)
    }

    fn distinct_abs(v: &[f64]) -> bool {
        let mut a: Vec<f64> = v.iter().map(|x| x.abs()).collect();
        a.sort_by(|p, q| p.partial_cmp(q).unwrap());
        a.windows(2).all(|w| w[0] != w[1]) && a.iter().all(|&x| x != 0.0)
    }

    proptest! {
        #[test]
        fn midrank_sums_to_triangular(v in finite_vec(40)) {
            let r = midrank(&v).unwrap();
            let k = v.len() as f64;
            prop_assert!((r.iter().sum::<f64>() - k * (k + 1.0) / 2.0).abs() < 1e-9);
            prop_assert!(r.iter().all(|&x| (1.0..=k).contains(&x)));
        }

        #[test]
        fn signed_rank_matches_walsh_oracle(v in finite_vec(12)) {
            prop_assume!(distinct_abs(&v));
            prop_assert_eq!(signed_rank_u(&v).unwrap(), walsh_count(&v));
        }

        #[test]
        fn wmw_matches_pair_count(x in finite_vec(15), y in finite_vec(15)) {
            let mut all: Vec<f64> = x.iter().chain(&y).copied().collect();
            all.sort_by(|a, b| a.partial_cmp(b).unwrap());
            prop_assume!(all.windows(2).all(|w| w[0] != w[1]));
            let u = wmw_u(&x, &y).unwrap();
            prop_assert_eq!(u, pair_count(&x, &y));
            prop_assert!(u >= 0.0 && u <= (x.len() * y.len()) as f64);
            prop_assert_eq!(u + wmw_u(&y, &x).unwrap(), (x.len() * y.len()) as f64);
        }

        #[test]
        fn signed_rank_in_range(v in finite_vec(30)) {
            let n = v.len() as f64;
            let u = signed_rank_u(&v).unwrap();
            prop_assert!(u >= 0.0 && u <= n * (n + 1.0) / 2.0);
        }

        #[test]
        fn monotone_invariance(v in finite_vec(20), y in finite_vec(20)) {
            // odd, strictly increasing, g(0) = 0
            let g = |t: f64| t * t * t + 2.0 * t;
            let gv: Vec<f64> = v.iter().map(|&t| g(t)).collect();
            prop_assert_eq!(signed_rank_u(&gv).unwrap(), signed_rank_u(&v).unwrap());
            let h = |t: f64| (t / 50.0).exp();
            let hx: Vec<f64> = v.iter().map(|&t| h(t)).collect();
            let hy: Vec<f64> = y.iter().map(|&t| h(t)).collect();
            prop_assume!(distinct_after(&v, &y, &hx, &hy));
            prop_assert_eq!(wmw_u(&hx, &hy).unwrap(), wmw_u(&v, &y).unwrap());
        }

        #[test]
        fn increasing_an_entry_never_decreases_u(v in finite_vec(20), idx in 0usize..20, bump in 0.0f64..50.0) {
            let i = idx % v.len();
            let mut w = v.clone();
            w[i] += bump;
            prop_assert!(signed_rank_u(&w).unwrap() >= signed_rank_u(&v).unwrap());
        }
    }

    // h must not merge distinct values through rounding
    fn distinct_after(x: &[f64], y: &[f64], hx: &[f64], hy: &[f64]) -> bool {
        let pairs: Vec<(f64, f64)> = x.iter().chain(y).copied().zip(hx.iter().chain(hy).copied()).collect();
        pairs.iter().all(|a| pairs.iter().all(|b| (a.0 == b.0) == (a.1 == b.1)))
    }
}
