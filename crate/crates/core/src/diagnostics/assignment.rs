//! Maximum-weight assignment on a rectangular integer matrix (Hungarian
//! algorithm with potentials, `O(n² m)`).

use alloc::vec::Vec;

/// Row-to-column assignment maximising the total weight.
///
/// `weights` is `rows × cols` in row-major order. Every row is matched to a
/// distinct column when `rows <= cols`; otherwise every column is matched to
/// a distinct row. Returns `(assignment, total)` where `assignment[r]` is the
/// column of row `r`, if any.
pub fn max_weight_assignment(weights: &[i64], rows: usize, cols: usize) -> (Vec<Option<usize>>, i64) {
    assert_eq!(weights.len(), rows * cols, "weight matrix shape");
    if rows == 0 || cols == 0 {
        return (alloc::vec![None; rows], 0);
    }
    // Solve a min-cost problem with n <= m by transposing if needed.
    let transpose = rows > cols;
    let (n, m) = if transpose { (cols, rows) } else { (rows, cols) };
    let max = weights.iter().copied().max().unwrap_or(0);
    let cost = |i: usize, j: usize| -> i64 {
        let w = if transpose {
            weights[j * cols + i]
        } else {
            weights[i * cols + j]
        };
        max - w
    };

    // One-based arrays; p[j] is the row matched to column j.
    let inf = i64::MAX / 4;
    let mut u = alloc::vec![0i64; n + 1];
    let mut v = alloc::vec![0i64; m + 1];
    let mut p = alloc::vec![0usize; m + 1];
    let mut way = alloc::vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = alloc::vec![inf; m + 1];
        let mut used = alloc::vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=m {
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

    let mut assignment = alloc::vec![None; rows];
    let mut total = 0;
    for j in 1..=m {
        if p[j] != 0 {
            let (r, c) = if transpose { (j - 1, p[j] - 1) } else { (p[j] - 1, j - 1) };
            assignment[r] = Some(c);
            total += weights[r * cols + c];
        }
    }
    (assignment, total)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive maximum for `rows <= cols`.
    fn brute(weights: &[i64], rows: usize, cols: usize) -> i64 {
        fn go(r: usize, rows: usize, cols: usize, w: &[i64], used: &mut Vec<bool>) -> i64 {
            if r == rows {
                return 0;
            }
            let mut best = i64::MIN;
            for c in 0..cols {
                if !used[c] {
                    used[c] = true;
                    best = best.max(w[r * cols + c] + go(r + 1, rows, cols, w, used));
                    used[c] = false;
                }
            }
            best
        }
        go(0, rows, cols, weights, &mut alloc::vec![false; cols])
    }

    #[test]
    fn square_example() {
        let w = [4, 1, 3, 2, 0, 5, 3, 2, 2];
        let (a, total) = max_weight_assignment(&w, 3, 3);
        assert_eq!(total, 11);
        assert_eq!(a, alloc::vec![Some(0), Some(2), Some(1)]);
    }

    #[test]
    fn rectangular_matches_brute_force() {
        let w = [1, 7, 3, 9, 2, 8, 5, 6];
        let (a, total) = max_weight_assignment(&w, 2, 4);
        assert_eq!(total, brute(&w, 2, 4));
        assert_eq!(total, 17);
        assert!(a.iter().all(Option::is_some));
        let (a, total) = max_weight_assignment(&[1, 9, 7, 2, 3, 8, 9, 6], 4, 2);
        assert_eq!(total, 18);
        assert_eq!(a.iter().filter(|x| x.is_some()).count(), 2);
    }

    #[test]
    fn empty_matrix() {
        assert_eq!(max_weight_assignment(&[], 0, 3), (Vec::new(), 0));
        assert_eq!(max_weight_assignment(&[], 2, 0), (alloc::vec![None, None], 0));
    }
}
