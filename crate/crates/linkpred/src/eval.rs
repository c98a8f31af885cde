//! Accuracy metrics and timing.
//!
//! AUC comes in two flavors: the strict form counts only strictly greater
//! positive-negative score pairs; the tie-credit form gives half weight to
//! ties and is the variant used for reporting. Both are computed with
//! integer pair counts, so the fast rank-based path agrees with the
//! quadratic definition bit for bit.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Per-task evaluation record; one ledger row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub network_id: String,
    pub domain: String,
    pub algorithm: String,
    pub variant_seed: u64,
    pub auc: f64,
    pub topk: f64,
    pub k: usize,
    pub train_time_s: f64,
}

/// Both AUC estimates over a positive/negative score split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AucPair<F> {
    /// Strict indicator: ties contribute nothing.
    pub strict: F,
    /// Ties contribute one half.
    pub tie_credit: F,
}

fn auc_counts<F: Real>(pos: &[F], neg: &[F]) -> Result<(u128, u128, u128)> {
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::InvalidArgument(
            "AUC needs nonempty positive and negative score lists".into(),
        ));
    }
    // sort each side once, then merge to count greater / tied pairs
    let mut p: Vec<F> = pos.to_vec();
    let mut n: Vec<F> = neg.to_vec();
    p.sort_by(|a, b| a.partial_cmp(b).expect("scores must not be NaN"));
    n.sort_by(|a, b| a.partial_cmp(b).expect("scores must not be NaN"));

    let mut wins: u128 = 0; // pos > neg
    let mut ties: u128 = 0; // pos == neg
    let mut ni = 0usize;
    let mut i = 0usize;
    while i < p.len() {
        while ni < n.len() && n[ni] < p[i] {
            ni += 1;
        }
        let below = ni;
        let mut tied_here = 0usize;
        let mut nj = ni;
        while nj < n.len() && n[nj] == p[i] {
            tied_here += 1;
            nj += 1;
        }
        // positives sharing this value share the counts
        let mut same_p = 1usize;
        while i + same_p < p.len() && p[i + same_p] == p[i] {
            same_p += 1;
        }
        wins += (below as u128) * (same_p as u128);
        ties += (tied_here as u128) * (same_p as u128);
        i += same_p;
    }
    Ok((wins, ties, (p.len() as u128) * (n.len() as u128)))
}

/// Rank-based AUC, both variants, in O((|P|+|N|) log) time.
pub fn auc_both<F: Real>(pos: &[F], neg: &[F]) -> Result<AucPair<F>> {
    let (wins, ties, total) = auc_counts(pos, neg)?;
    let strict = F::of_f64(wins as f64) / F::of_f64(total as f64);
    // numerator kept integral in half units so the division is exact
    let tie_credit = F::of_f64((2 * wins + ties) as f64) / F::of_f64((2 * total) as f64);
    Ok(AucPair { strict, tie_credit })
}

/// Strict AUC: fraction of positive/negative pairs where the positive
/// scores strictly higher.
pub fn auc_strict<F: Real>(pos: &[F], neg: &[F]) -> Result<F> {
    Ok(auc_both(pos, neg)?.strict)
}

/// Tie-credit AUC (ties count one half); the reporting variant.
pub fn auc<F: Real>(pos: &[F], neg: &[F]) -> Result<F> {
    Ok(auc_both(pos, neg)?.tie_credit)
}

/// Fraction of a k-sized prediction budget that recovers true pairs,
/// normalized by `min(k, |truth|)`.
///
/// Pairs are ranked by score descending; equal scores break by ascending
/// pair order so the budget is deterministic.
pub fn topk<F: Real>(
    scored_pairs: &[((usize, usize), F)],
    truth: &[(usize, usize)],
    k: usize,
) -> Result<F> {
    if truth.is_empty() {
        return Err(Error::InvalidArgument("empty truth set for top-k".into()));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    let truth_set: std::collections::HashSet<(usize, usize)> = truth
        .iter()
        .map(|&(a, b)| (a.min(b), a.max(b)))
        .collect();
    let mut ranked: Vec<&((usize, usize), F)> = scored_pairs.iter().collect();
    ranked.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("scores must not be NaN")
            .then(a.0.cmp(&b.0))
    });
    let budget = k.min(ranked.len());
    let hits = ranked[..budget]
        .iter()
        .filter(|((a, b), _)| truth_set.contains(&(*a.min(b), *a.max(b))))
        .count();
    Ok(F::of_usize(hits) / F::of_usize(k.min(truth_set.len())))
}

/// Budget rule: 10 when fewer than 100 links are missing, otherwise 100.
pub fn choose_k(num_missing: usize) -> usize {
    if num_missing < 100 {
        10
    } else {
        100
    }
}

/// Two-sided Welch t-test p-value for a difference in means.
pub fn welch_ttest<F: Real>(sample_a: &[F], sample_b: &[F]) -> Result<f64> {
    if sample_a.len() < 2 || sample_b.len() < 2 {
        return Err(Error::InvalidArgument(
            "welch t-test needs at least two values per sample".into(),
        ));
    }
    let na = sample_a.len() as f64;
    let nb = sample_b.len() as f64;
    let ma = crate::scalar::mean(sample_a).as_f64();
    let mb = crate::scalar::mean(sample_b).as_f64();
    let va = crate::scalar::sample_variance(sample_a).as_f64();
    let vb = crate::scalar::sample_variance(sample_b).as_f64();

    let se2 = va / na + vb / nb;
    if se2 <= 0.0 {
        // zero variance on both sides: point masses
        return Ok(if ma == mb { 1.0 } else { 0.0 });
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / ((va / na).powi(2) / (na - 1.0) + (vb / nb).powi(2) / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df)
        .map_err(|e| Error::InvalidArgument(format!("t distribution: {e}")))?;
    Ok(2.0 * (1.0 - dist.cdf(t.abs())))
}

/// Wall-clock a closed training job.
pub fn time_training<T>(task: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = task();
    (out, start.elapsed().as_secs_f64())
}
