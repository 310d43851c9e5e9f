//! Independent reference implementations used only by tests: finite
//! differences, exhaustive search and brute-force metric evaluators. Nothing
//! here shares code with the production crates.

/// Central finite-difference gradient of `f` at `x`.
pub fn central_diff<F: FnMut(&[f64]) -> f64>(mut f: F, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = probe[i];
            probe[i] = orig + h;
            let up = f(&probe);
            probe[i] = orig - h;
            let down = f(&probe);
            probe[i] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// `‖a − b‖₂ / max(‖a‖₂, ‖b‖₂, 1e-6)`.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&diff) / norm(a).max(norm(b)).max(1e-6)
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let rx = ranks(x);
    let ry = ranks(y);
    pearson(&rx, &ry)
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap());
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            out[idx[k]] = avg;
        }
        i = j + 1;
    }
    out
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Minimum-cost assignment by enumerating every injection of the smaller
/// side into the larger one. Forbidden (infinite) pairs are never used; the
/// search maximizes the number of assigned pairs first, then minimizes cost.
pub fn brute_force_assignment(cost: &[Vec<f64>]) -> (usize, f64) {
    let rows = cost.len();
    let cols = cost.first().map_or(0, Vec::len);
    let mut best = (0usize, 0.0f64);
    let mut used = vec![false; cols];
    fn rec(
        r: usize,
        cost: &[Vec<f64>],
        used: &mut [bool],
        count: usize,
        total: f64,
        best: &mut (usize, f64),
    ) {
        if r == cost.len() {
            if count > best.0 || (count == best.0 && total < best.1) {
                *best = (count, total);
            }
            return;
        }
        // leave row unassigned
        rec(r + 1, cost, used, count, total, best);
        for c in 0..used.len() {
            if !used[c] && cost[r][c].is_finite() {
                used[c] = true;
                rec(r + 1, cost, used, count + 1, total + cost[r][c], best);
                used[c] = false;
            }
        }
    }
    if rows > 0 && cols > 0 {
        best = (0, 0.0);
        rec(0, cost, &mut used, 0, 0.0, &mut best);
    }
    best
}

/// All permutations of `0..n` (Heap's algorithm).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    out.push(a.clone());
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Sweeps every candidate threshold (each distinct negative score plus one
/// just above the maximum), keeps those whose false-positive fraction is at
/// most `target` and returns the smallest.
pub fn sweep_threshold(negatives: &[f64], target: f64) -> f64 {
    let max = negatives.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut candidates: Vec<f64> = negatives.to_vec();
    candidates.push(next_up(max));
    let n = negatives.len() as f64;
    let mut best = f64::INFINITY;
    for &c in &candidates {
        let mut above = 0usize;
        for &x in negatives {
            if x >= c {
                above += 1;
            }
        }
        if above as f64 / n <= target && c < best {
            best = c;
        }
    }
    best
}

fn next_up(x: f64) -> f64 {
    if x == f64::INFINITY {
        return x;
    }
    let bits = x.to_bits();
    if x == 0.0 {
        f64::from_bits(1)
    } else if x > 0.0 {
        f64::from_bits(bits + 1)
    } else {
        f64::from_bits(bits - 1)
    }
}

/// Brute-force TAR at FAR: returns `(tar, threshold)`.
pub fn oracle_tar_at_far(genuine: &[f64], impostor: &[f64], far: f64) -> (f64, f64) {
    let tau = sweep_threshold(impostor, far);
    let mut hits = 0usize;
    for &g in genuine {
        if g >= tau {
            hits += 1;
        }
    }
    (hits as f64 / genuine.len() as f64, tau)
}

/// Rank (1-based) of the mate after a full sort where ties with the mate
/// are ordered ahead of it. NaN scores sort last.
pub fn oracle_rank(scores: &[f64], mate: usize) -> usize {
    let key = |x: f64| if x.is_nan() { f64::NEG_INFINITY } else { x };
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        key(scores[b])
            .partial_cmp(&key(scores[a]))
            .unwrap()
            .then_with(|| (a == mate).cmp(&(b == mate)))
    });
    if scores[mate].is_nan() {
        return scores.len();
    }
    order.iter().position(|&i| i == mate).unwrap() + 1
}

pub fn oracle_rank_k(searches: &[(Vec<f64>, usize)], k: usize) -> f64 {
    let hits = searches
        .iter()
        .filter(|(s, m)| oracle_rank(s, *m) <= k)
        .count();
    hits as f64 / searches.len() as f64
}

/// Brute-force FNIR at FPIR: returns `(fnir, threshold)`.
pub fn oracle_fnir_at_fpir(
    mated: &[(Vec<f64>, usize)],
    non_mated: &[Vec<f64>],
    fpir: f64,
) -> (f64, f64) {
    let tops: Vec<f64> = non_mated
        .iter()
        .map(|row| {
            row.iter()
                .filter(|x| !x.is_nan())
                .cloned()
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let tau = sweep_threshold(&tops, fpir);
    let mut misses = 0usize;
    for (row, mate) in mated {
        let rank1 = oracle_rank(row, *mate) == 1;
        if !(rank1 && row[*mate] >= tau) {
            misses += 1;
        }
    }
    (misses as f64 / mated.len() as f64, tau)
}
