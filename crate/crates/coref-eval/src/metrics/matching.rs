//! Dense maximum-weight assignment used by the entity-based metric.

/// Maximum total weight over one-to-one assignments between rows and
/// columns of a rectangular, non-negative weight matrix.
///
/// Implemented as the O(n^3) Hungarian algorithm with row/column
/// potentials, run in minimization form on the negated matrix padded to
/// square. Padded cells carry weight zero, so leaving a row or column
/// unassigned costs nothing and the padded optimum equals the rectangular
/// optimum.
pub fn max_weight_assignment(weights: &[Vec<f64>]) -> f64 {
    let n = weights.len();
    let m = weights.first().map_or(0, Vec::len);
    if n == 0 || m == 0 {
        return 0.0;
    }
    debug_assert!(weights.iter().all(|row| row.len() == m));
    let size = n.max(m);
    let cost = |i: usize, j: usize| -> f64 {
        if i < n && j < m {
            -weights[i][j]
        } else {
            0.0
        }
    };

    // 1-based arrays; assignment[j] is the row matched to column j, 0 = free.
    let mut u = vec![0.0f64; size + 1];
    let mut v = vec![0.0f64; size + 1];
    let mut assignment = vec![0usize; size + 1];
    let mut way = vec![0usize; size + 1];

    for i in 1..=size {
        assignment[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; size + 1];
        let mut used = vec![false; size + 1];
        loop {
            used[j0] = true;
            let i0 = assignment[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=size {
                if !used[j] {
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
            }
            for j in 0..=size {
                if used[j] {
                    u[assignment[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if assignment[j0] == 0 {
                break;
            }
        }
        // Augment along the alternating path back to the artificial column.
        loop {
            let j1 = way[j0];
            assignment[j0] = assignment[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut total = 0.0;
    for j in 1..=size {
        let i = assignment[j];
        if i >= 1 && i - 1 < n && j - 1 < m {
            total += weights[i - 1][j - 1];
        }
    }
    total
}
