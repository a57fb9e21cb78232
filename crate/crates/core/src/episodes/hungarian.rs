//! Maximum-profit one-to-one assignment on a rectangular matrix.

/// Optimal assignment: `rows[i]` is the column matched to row `i`, if any.
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    pub rows: Vec<Option<usize>>,
    pub profit: f64,
}

/// Shortest-augmenting-path Hungarian method with row/column potentials,
/// O(n^2 m) for an `n x m` matrix with `n <= m` (transposed otherwise).
///
/// Every row is matched when there are at least as many columns as rows, and
/// vice versa. Ragged input is treated as zero-padded.
pub fn hungarian_match(profit: &[Vec<f64>]) -> Assignment {
    let n_rows = profit.len();
    let n_cols = profit.iter().map(Vec::len).max().unwrap_or(0);
    if n_rows == 0 || n_cols == 0 {
        return Assignment {
            rows: vec![None; n_rows],
            profit: 0.0,
        };
    }
    let at = |i: usize, j: usize| profit[i].get(j).copied().unwrap_or(0.0);
    let transpose = n_rows > n_cols;
    let (n, m) = if transpose {
        (n_cols, n_rows)
    } else {
        (n_rows, n_cols)
    };
    let max = (0..n_rows)
        .flat_map(|i| (0..n_cols).map(move |j| (i, j)))
        .map(|(i, j)| at(i, j))
        .fold(f64::NEG_INFINITY, f64::max);
    // Minimize max - profit so all costs are non-negative.
    let cost = |i: usize, j: usize| {
        let p = if transpose { at(j, i) } else { at(i, j) };
        max - p
    };

    // 1-based potentials; p[j] is the row matched to column j.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
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

    let mut rows = vec![None; n_rows];
    for (j, &row) in p.iter().enumerate().skip(1) {
        if row == 0 {
            continue;
        }
        let (r, c) = if transpose {
            (j - 1, row - 1)
        } else {
            (row - 1, j - 1)
        };
        rows[r] = Some(c);
    }
    let total = rows
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.map(|c| at(i, c)))
        .sum();
    Assignment {
        rows,
        profit: total,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_profit_gives_identity() {
        let m: Vec<Vec<f64>> = (0..4)
            .map(|i| (0..4).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let a = hungarian_match(&m);
        assert_eq!(a.rows, (0..4).map(Some).collect::<Vec<_>>());
        assert_eq!(a.profit, 4.0);
    }

    #[test]
    fn two_by_two_anti_diagonal() {
        let a = hungarian_match(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert_eq!(a.rows, vec![Some(1), Some(0)]);
        assert_eq!(a.profit, 4.0);
    }

    #[test]
    fn empty_matrix() {
        let a = hungarian_match(&[]);
        assert!(a.rows.is_empty());
        assert_eq!(a.profit, 0.0);
    }

    #[test]
    fn rectangular_both_ways() {
        let wide = vec![vec![1.0, 9.0, 3.0], vec![8.0, 7.0, 1.0]];
        let a = hungarian_match(&wide);
        assert_eq!(a.rows, vec![Some(1), Some(0)]);
        assert_eq!(a.profit, 17.0);
        let tall = vec![vec![1.0, 8.0], vec![9.0, 7.0], vec![3.0, 1.0]];
        let a = hungarian_match(&tall);
        assert_eq!(a.rows, vec![Some(1), Some(0), None]);
        assert_eq!(a.profit, 17.0);
    }

    #[test]
    fn contingency_example() {
        let t = vec![
            vec![5.0, 0.0, 0.0],
            vec![0.0, 4.0, 1.0],
            vec![1.0, 0.0, 4.0],
        ];
        assert_eq!(hungarian_match(&t).profit, 13.0);
    }
}
