use crate::{EvalError, Result};

/// Smallest observed negative score `τ` whose exceedance fraction
/// `|{x ≥ τ}| / n` is at most `target`. When no observed value qualifies the
/// threshold is the next float above the maximum, so nothing exceeds it.
///
/// Exact empirical counts, no interpolation.
pub fn threshold_at_rate(negatives: &[f64], target: f64) -> Result<f64> {
    if negatives.is_empty() {
        return Err(EvalError::InsufficientData("no negative scores".into()));
    }
    if !(target > 0.0 && target < 1.0) {
        return Err(EvalError::InvalidTarget(target));
    }
    let mut sorted = negatives.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let n = sorted.len() as f64;
    let mut tau = sorted[0].next_up();
    let mut i = 0;
    while i < sorted.len() {
        let v = sorted[i];
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == v {
            j += 1;
        }
        if (j + 1) as f64 / n <= target {
            tau = v;
        } else {
            break;
        }
        i = j + 1;
    }
    Ok(tau)
}

/// True accept rate at the threshold fixed by `far` on the impostor scores.
/// Returns `(tar, threshold)`.
pub fn tar_at_far(genuine: &[f64], impostor: &[f64], far: f64) -> Result<(f64, f64)> {
    if genuine.is_empty() {
        return Err(EvalError::InsufficientData("no genuine scores".into()));
    }
    let tau = threshold_at_rate(impostor, far)?;
    let hits = genuine.iter().filter(|&&g| g >= tau).count();
    Ok((hits as f64 / genuine.len() as f64, tau))
}

/// One mated 1:N search: scores against every gallery identity (NaN for
/// MISSING) and the mate's position.
#[derive(Debug, Clone, Copy)]
pub struct MatedSearch<'a> {
    pub scores: &'a [f64],
    pub mate: usize,
}

/// 1-based rank of the mate with pessimistic tie-breaking: every other
/// identity scoring at least as high is ranked ahead. A MISSING mate score
/// ranks last; MISSING non-mate scores never rank ahead.
pub fn mate_rank(scores: &[f64], mate: usize) -> usize {
    let s = scores[mate];
    if s.is_nan() {
        return scores.len();
    }
    1 + scores
        .iter()
        .enumerate()
        .filter(|&(j, &x)| j != mate && x >= s)
        .count()
}

pub fn rank_k_accuracy(searches: &[MatedSearch<'_>], k: usize) -> Result<f64> {
    if searches.is_empty() {
        return Err(EvalError::InsufficientData("no mated searches".into()));
    }
    if k == 0 {
        return Err(EvalError::Protocol("rank k must be >= 1".into()));
    }
    for s in searches {
        if s.mate >= s.scores.len() {
            return Err(EvalError::Protocol("mate absent from gallery".into()));
        }
    }
    let hits = searches
        .iter()
        .filter(|s| mate_rank(s.scores, s.mate) <= k)
        .count();
    Ok(hits as f64 / searches.len() as f64)
}

fn top_score(row: &[f64]) -> f64 {
    row.iter()
        .filter(|x| !x.is_nan())
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// False-negative identification rate at the threshold fixed by `fpir` on
/// the non-mated searches' top-1 scores. A mated search counts as a miss
/// unless its mate is rank 1 and scores at or above the threshold.
/// Returns `(fnir, threshold)`.
pub fn fnir_at_fpir(
    mated: &[MatedSearch<'_>],
    non_mated: &[&[f64]],
    fpir: f64,
) -> Result<(f64, f64)> {
    if mated.is_empty() {
        return Err(EvalError::InsufficientData("no mated searches".into()));
    }
    if non_mated.is_empty() {
        return Err(EvalError::InsufficientData("no non-mated searches".into()));
    }
    let tops: Vec<f64> = non_mated.iter().map(|r| top_score(r)).collect();
    let tau = threshold_at_rate(&tops, fpir)?;
    let misses = mated
        .iter()
        .filter(|s| !(mate_rank(s.scores, s.mate) == 1 && s.scores[s.mate] >= tau))
        .count();
    Ok((misses as f64 / mated.len() as f64, tau))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_separation() {
        let (tar, _) = tar_at_far(&[1.0; 5], &[0.0; 200], 0.01).unwrap();
        assert_eq!(tar, 1.0);
    }

    #[test]
    fn worked_example() {
        let (tar, tau) = tar_at_far(&[0.9, 0.8, 0.4], &[0.7, 0.3, 0.2, 0.1], 0.25).unwrap();
        assert_eq!(tau, 0.7);
        assert!((tar - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn threshold_above_max_when_target_below_resolution() {
        let tau = threshold_at_rate(&[0.1, 0.2, 0.3], 0.01).unwrap();
        assert!(tau > 0.3 && tau == 0.3f64.next_up());
    }

    #[test]
    fn ties_are_counted_together() {
        // two impostors at 0.5: accepting 0.5 admits 2/4 > 0.25
        let tau = threshold_at_rate(&[0.5, 0.5, 0.1, 0.0], 0.25).unwrap();
        assert_eq!(tau, 0.5f64.next_up());
    }

    #[test]
    fn empty_inputs() {
        assert!(matches!(tar_at_far(&[], &[0.1], 0.1), Err(EvalError::InsufficientData(_))));
        assert!(matches!(tar_at_far(&[0.1], &[], 0.1), Err(EvalError::InsufficientData(_))));
        assert!(matches!(tar_at_far(&[0.1], &[0.1], 1.5), Err(EvalError::InvalidTarget(_))));
    }

    #[test]
    fn rank_examples() {
        let best = [0.9, 0.1, 0.2];
        let second = [0.5, 0.7, 0.2];
        assert_eq!(rank_k_accuracy(&[MatedSearch { scores: &best, mate: 0 }], 1).unwrap(), 1.0);
        assert_eq!(rank_k_accuracy(&[MatedSearch { scores: &second, mate: 0 }], 1).unwrap(), 0.0);
        assert_eq!(rank_k_accuracy(&[MatedSearch { scores: &second, mate: 0 }], 2).unwrap(), 1.0);
        // tie with a non-mate counts against the mate
        assert_eq!(mate_rank(&[0.5, 0.5], 0), 2);
        assert_eq!(mate_rank(&[f64::NAN, 0.5, 0.1], 0), 3);
        assert_eq!(mate_rank(&[0.4, f64::NAN], 0), 1);
    }

    #[test]
    fn fnir_examples() {
        let m1 = [0.9, 0.1];
        let m2 = [0.2, 0.95];
        let nm = [0.3, 0.2];
        let (fnir, _) = fnir_at_fpir(
            &[MatedSearch { scores: &m1, mate: 0 }, MatedSearch { scores: &m2, mate: 1 }],
            &[&nm],
            0.01,
        )
        .unwrap();
        assert_eq!(fnir, 0.0);
        let rank2 = [0.9, 0.95];
        let (fnir, _) = fnir_at_fpir(&[MatedSearch { scores: &rank2, mate: 0 }], &[&nm], 0.5).unwrap();
        assert_eq!(fnir, 1.0);
    }
}
