/// Minimum-cost one-to-one assignment on a rectangular cost matrix.
///
/// Entries that are `+∞` or NaN are forbidden and never appear in the result.
/// Among assignments, the one with the most allowed pairs wins, then the one
/// with the lowest total cost. Pairs are returned sorted by row. The solver is
/// the shortest-augmenting-path (Hungarian / Jonker-Volgenant family) method
/// with row and column potentials, O(n²m).
pub fn linear_assignment(cost: &[Vec<f64>]) -> Vec<(usize, usize)> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    let m = cost[0].len();
    assert!(cost.iter().all(|r| r.len() == m), "cost matrix rows differ in length");
    if m == 0 {
        return Vec::new();
    }
    let allowed = |c: f64| c.is_finite();
    let max_abs = cost
        .iter()
        .flatten()
        .filter(|c| allowed(**c))
        .fold(0.0f64, |a, c| a.max(c.abs()));
    // any single forbidden cell must outweigh every possible finite total
    let big = (n.max(m) as f64 + 1.0) * (2.0 * max_abs + 1.0);
    let transpose = n > m;
    let (rows, cols) = if transpose { (m, n) } else { (n, m) };
    let a: Vec<Vec<f64>> = (0..rows)
        .map(|i| {
            (0..cols)
                .map(|j| {
                    let c = if transpose { cost[j][i] } else { cost[i][j] };
                    if allowed(c) {
                        c
                    } else {
                        big
                    }
                })
                .collect()
        })
        .collect();
    let col_of_row = solve(&a);
    let mut pairs: Vec<(usize, usize)> = col_of_row
        .into_iter()
        .enumerate()
        .map(|(i, j)| if transpose { (j, i) } else { (i, j) })
        .filter(|&(r, c)| allowed(cost[r][c]))
        .collect();
    pairs.sort_unstable();
    pairs
}

/// Rows ≤ columns; returns the column of every row.
fn solve(a: &[Vec<f64>]) -> Vec<usize> {
    let n = a.len();
    let m = a[0].len();
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    // p[j]: row (1-based) matched to column j; way[j]: previous column on the path
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = a[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out = vec![0; n];
    for j in 1..=m {
        if p[j] != 0 {
            out[p[j] - 1] = j - 1;
        }
    }
    out
}
