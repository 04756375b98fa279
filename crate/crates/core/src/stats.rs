//! Aggregation of replicate results and two-sample comparisons.

use statrs::function::erf::erfc;

use crate::engine::ReplicateResult;
use crate::error::{Error, Result};

/// Largest per-side sample size for which the exact rank-sum distribution is used.
pub const EXACT_MAX_N: usize = 20;

/// Index of the first zero in a fitness trace.
pub fn first_hit_iteration(trace: &[u32]) -> Result<Option<usize>> {
    if trace.is_empty() {
        return Err(Error::EmptyInput("fitness trace"));
    }
    Ok(trace.iter().position(|&f| f == 0))
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Median; even counts take the midpoint of the two central values.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let v = sorted(values);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    })
}

/// Linear-interpolation quantile (`(n-1)·q` positioning).
pub fn quantile(values: &[f64], q: f64) -> Option<f64> {
    if values.is_empty() || !(0.0..=1.0).contains(&q) {
        return None;
    }
    let v = sorted(values);
    let pos = (v.len() - 1) as f64 * q;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Some(v[lo] + (v[hi] - v[lo]) * (pos - lo as f64))
}

pub fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// Central tendency of iteration counts where `None` means "never".
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStats {
    pub n: usize,
    pub success_rate: f64,
    pub median: Option<f64>,
    pub mean: Option<f64>,
    pub iqr: Option<(f64, f64)>,
}

pub fn convergence_stats(values: &[Option<u32>]) -> Result<ConvergenceStats> {
    if values.is_empty() {
        return Err(Error::EmptyInput("replicate results"));
    }
    let hits: Vec<f64> = values.iter().flatten().map(|&v| f64::from(v)).collect();
    Ok(ConvergenceStats {
        n: values.len(),
        success_rate: hits.len() as f64 / values.len() as f64,
        median: median(&hits),
        mean: mean(&hits),
        iqr: quantile(&hits, 0.25).zip(quantile(&hits, 0.75)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub iteration: u32,
    pub mean_best_fitness: f64,
    pub mean_mean_fitness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArmSummary {
    pub label: String,
    pub group_convergence: ConvergenceStats,
    pub median_first_any_hit: Option<f64>,
    /// Iterations `1..=horizon`, averaged over replicates.
    pub curve: Vec<CurvePoint>,
}

/// Summarizes one arm. Replicates that stopped early contribute their final
/// trace row to every later iteration of the curve.
pub fn aggregate_arm(results: &[ReplicateResult], label: &str, horizon: u32) -> Result<ArmSummary> {
    if results.is_empty() {
        return Err(Error::EmptyInput("replicate results"));
    }
    let convergence: Vec<Option<u32>> = results.iter().map(|r| r.group_convergence).collect();
    let any_hits: Vec<f64> = results
        .iter()
        .filter_map(ReplicateResult::first_any_hit)
        .map(f64::from)
        .collect();

    let n = results.len() as f64;
    let curve = (1..=horizon)
        .map(|t| {
            let (best, avg) = results.iter().fold((0.0, 0.0), |(b, m), r| {
                let row = r.trace[(t as usize).min(r.trace.len() - 1)];
                (b + f64::from(row.best_fitness), m + row.mean_fitness)
            });
            CurvePoint {
                iteration: t,
                mean_best_fitness: best / n,
                mean_mean_fitness: avg / n,
            }
        })
        .collect();

    Ok(ArmSummary {
        label: label.to_string(),
        group_convergence: convergence_stats(&convergence)?,
        median_first_any_hit: median(&any_hits),
        curve,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestMethod {
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MannWhitney {
    /// U of the first sample: pairs where it is larger, ties counted one half.
    pub u: f64,
    pub p_value: f64,
    pub method: TestMethod,
}

/// Two-sided Mann–Whitney U test.
///
/// With both samples of size at most [`EXACT_MAX_N`] the p-value comes from the
/// exact permutation distribution of the midrank sum (ties included);
/// otherwise from the tie-corrected normal approximation with continuity
/// correction.
pub fn mann_whitney(a: &[f64], b: &[f64]) -> Result<MannWhitney> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("mann-whitney sample"));
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(Error::param("sample", "NaN values cannot be ranked"));
    }
    let (n1, n2) = (a.len(), b.len());
    let ranks2 = doubled_midranks(a, b);
    let rank_sum2: u64 = ranks2[..n1].iter().sum();
    let u2 = rank_sum2 - (n1 * (n1 + 1)) as u64;
    let u = u2 as f64 / 2.0;

    if n1 <= EXACT_MAX_N && n2 <= EXACT_MAX_N {
        let dist = rank_sum_distribution(&ranks2, n1);
        let total: f64 = dist.iter().sum();
        let below: f64 = dist[..=rank_sum2 as usize].iter().sum();
        let above: f64 = dist[rank_sum2 as usize..].iter().sum();
        let p = (2.0 * below.min(above) / total).min(1.0);
        return Ok(MannWhitney {
            u,
            p_value: p,
            method: TestMethod::Exact,
        });
    }

    let (f1, f2) = (n1 as f64, n2 as f64);
    let n = f1 + f2;
    let mu = f1 * f2 / 2.0;
    let ties: f64 = tie_sizes(a, b)
        .iter()
        .map(|&t| (t * t * t - t) as f64)
        .sum();
    let var = f1 * f2 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
    let p = if var <= 0.0 {
        1.0
    } else {
        let z = ((u - mu).abs() - 0.5).max(0.0) / var.sqrt();
        erfc(z / std::f64::consts::SQRT_2).min(1.0)
    };
    Ok(MannWhitney {
        u,
        p_value: p,
        method: TestMethod::Normal,
    })
}

/// Twice the midrank of every pooled value, `a` first then `b`.
fn doubled_midranks(a: &[f64], b: &[f64]) -> Vec<u64> {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&i, &j| pooled[i].total_cmp(&pooled[j]));
    let mut ranks = vec![0u64; pooled.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && pooled[order[j + 1]] == pooled[order[i]] {
            j += 1;
        }
        // Ranks i+1..=j+1 share the midrank (i+j+2)/2.
        for &k in &order[i..=j] {
            ranks[k] = (i + j + 2) as u64;
        }
        i = j + 1;
    }
    ranks
}

fn tie_sizes(a: &[f64], b: &[f64]) -> Vec<u64> {
    let v = sorted(&a.iter().chain(b).copied().collect::<Vec<_>>());
    let mut sizes = Vec::new();
    let mut run = 1u64;
    for w in v.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            sizes.push(run);
            run = 1;
        }
    }
    sizes.push(run);
    sizes
}

/// Number of size-`k` subsets of `ranks2` for each possible sum.
fn rank_sum_distribution(ranks2: &[u64], k: usize) -> Vec<f64> {
    let max_sum: usize = ranks2.iter().sum::<u64>() as usize;
    // ways[j][s]: subsets of size j with sum s among the items seen so far.
    let mut ways = vec![vec![0.0f64; max_sum + 1]; k + 1];
    ways[0][0] = 1.0;
    for (seen, &r) in ranks2.iter().enumerate() {
        let r = r as usize;
        for j in (1..=k.min(seen + 1)).rev() {
            let (lower, upper) = ways.split_at_mut(j);
            let from = &lower[j - 1];
            let to = &mut upper[0];
            for s in (r..=max_sum).rev() {
                if from[s - r] != 0.0 {
                    to[s] += from[s - r];
                }
            }
        }
    }
    ways.swap_remove(k)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub median_ratio: f64,
    pub u_statistic: f64,
    pub p_value: f64,
}

/// Median ratio `median(a) / median(b)` plus the Mann–Whitney test of `a` against `b`.
pub fn compare_arms(a: &[f64], b: &[f64]) -> Result<Comparison> {
    let test = mann_whitney(a, b)?;
    let ratio = median(a).expect("non-empty") / median(b).expect("non-empty");
    Ok(Comparison {
        median_ratio: ratio,
        u_statistic: test.u,
        p_value: test.p_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn first_hit_examples() {
        assert_eq!(first_hit_iteration(&[3, 1, 0, 0]).unwrap(), Some(2));
        assert_eq!(first_hit_iteration(&[2, 1, 1]).unwrap(), None);
        assert_eq!(first_hit_iteration(&[0, 4, 2]).unwrap(), Some(0));
        assert!(first_hit_iteration(&[]).is_err());
    }

    #[test]
    fn median_rules() {
        assert_eq!(median(&[10.0, 20.0, 30.0]), Some(20.0));
        assert_eq!(median(&[40.0, 10.0, 30.0, 20.0]), Some(25.0));
        let s = convergence_stats(&[Some(10), None, Some(30)]).unwrap();
        assert!((s.success_rate - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.median, Some(20.0));
        assert!(convergence_stats(&[]).is_err());
        let none = convergence_stats(&[None, None]).unwrap();
        assert_eq!(none.success_rate, 0.0);
        assert_eq!(none.median, None);
    }

    #[test]
    fn quantile_interpolates() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.25), Some(1.75));
        assert_eq!(quantile(&v, 0.75), Some(3.25));
        assert_eq!(quantile(&v, 0.5), median(&v));
    }

    #[test]
    fn compare_examples() {
        let a = [1.0, 2.0, 3.0];
        let b = [10.0, 11.0, 12.0];
        let c = compare_arms(&a, &b).unwrap();
        assert_eq!(c.u_statistic, 0.0);
        assert!((c.median_ratio - 2.0 / 11.0).abs() < 1e-15);
        // One of 20 equally likely splits is this extreme on each side.
        assert!((c.p_value - 0.1).abs() < 1e-12);

        let same = compare_arms(&b, &b).unwrap();
        assert_eq!(same.median_ratio, 1.0);
        assert!(same.p_value >= 0.99);

        let single = compare_arms(&[5.0], &[5.0]).unwrap();
        assert_eq!(single.median_ratio, 1.0);
        assert!(compare_arms(&[], &[1.0]).is_err());
    }

    #[test]
    fn normal_path_for_large_samples() {
        let a: Vec<f64> = (0..30).map(f64::from).collect();
        let b: Vec<f64> = (0..30).map(|x| f64::from(x) + 100.0).collect();
        let t = mann_whitney(&a, &b).unwrap();
        assert_eq!(t.method, TestMethod::Normal);
        assert_eq!(t.u, 0.0);
        assert!(t.p_value < 1e-9);
        let tied = mann_whitney(&[1.0; 25], &[1.0; 25]).unwrap();
        assert_eq!(tied.p_value, 1.0);
    }

    #[test]
    fn normal_approximation_reference_value() {
        // scipy.stats.mannwhitneyu(range(21), [x + 5.5 for x in range(21)],
        // method="asymptotic") gives U = 120, p = 0.011883872063715774.
        let a: Vec<f64> = (0..21).map(f64::from).collect();
        let b: Vec<f64> = (0..21).map(|x| f64::from(x) + 5.5).collect();
        let t = mann_whitney(&a, &b).unwrap();
        assert_eq!(t.method, TestMethod::Normal);
        assert_eq!(t.u, 120.0);
        assert!(
            (t.p_value - 0.011_883_872_063_715_774).abs() < 1e-12,
            "{}",
            t.p_value
        );
    }

    proptest! {
        #[test]
        fn median_and_mean_within_range(values in proptest::collection::vec(0u32..2000, 1..60)) {
            let v: Vec<f64> = values.iter().map(|&x| f64::from(x)).collect();
            let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let m = median(&v).unwrap();
            let a = mean(&v).unwrap();
            prop_assert!(lo <= m && m <= hi);
            prop_assert!(lo <= a + 1e-9 && a <= hi + 1e-9);
        }

        #[test]
        fn first_hit_stable_under_appending(mut trace in proptest::collection::vec(0u32..5, 1..30), tail in proptest::collection::vec(0u32..5, 0..10)) {
            let hit = first_hit_iteration(&trace).unwrap();
            prop_assert_eq!(first_hit_iteration(&trace).unwrap(), hit);
            if hit.is_some() {
                trace.extend(tail);
                prop_assert_eq!(first_hit_iteration(&trace).unwrap(), hit);
            }
        }

        #[test]
        fn ratio_is_antisymmetric(a in proptest::collection::vec(1u32..500, 1..25), b in proptest::collection::vec(1u32..500, 1..25)) {
            let a: Vec<f64> = a.into_iter().map(f64::from).collect();
            let b: Vec<f64> = b.into_iter().map(f64::from).collect();
            let ab = compare_arms(&a, &b).unwrap();
            let ba = compare_arms(&b, &a).unwrap();
            prop_assert!((ab.median_ratio * ba.median_ratio - 1.0).abs() < 1e-12);
            prop_assert!((ab.u_statistic + ba.u_statistic - (a.len() * b.len()) as f64).abs() < 1e-9);
            prop_assert!((ab.p_value - ba.p_value).abs() < 1e-9);
        }
    }
}
