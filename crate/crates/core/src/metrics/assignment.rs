//! Maximum-weight bipartite matching (Hungarian method with potentials).

use alloc::vec;
use alloc::vec::Vec;

/// Matches rows to columns maximizing total weight. `None` entries are
/// forbidden; only pairs with `Some(w)`, `w > 0`, are ever returned.
///
/// Returns `(row, col)` pairs sorted by row.
pub fn max_weight_matching(weights: &[Vec<Option<f64>>], cols: usize) -> Vec<(usize, usize)> {
    let rows = weights.len();
    if rows == 0 || cols == 0 {
        return Vec::new();
    }
    let n = rows.max(cols);
    // cost[i][j] for the square problem; forbidden and padding cells cost 0,
    // which is what leaving the row unmatched is worth.
    let cost = |i: usize, j: usize| -> f64 {
        if i < rows && j < cols {
            match weights[i][j] {
                Some(w) if w > 0.0 => -w,
                _ => 0.0,
            }
        } else {
            0.0
        }
    };
    // 1-based arrays, index 0 is the virtual start column.
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
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
    let mut out: Vec<(usize, usize)> = (1..=n)
        .filter_map(|j| {
            let i = p[j];
            (i >= 1 && i <= rows && j <= cols).then(|| (i - 1, j - 1))
        })
        .filter(|&(i, j)| matches!(weights[i][j], Some(w) if w > 0.0))
        .collect();
    out.sort_unstable();
    out
}
