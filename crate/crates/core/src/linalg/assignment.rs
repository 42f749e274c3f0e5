use alloc::vec;
use alloc::vec::Vec;

use super::{Complex64, Spectrum};
use crate::error::{Error, Result};

/// Minimum-cost perfect matching on a square cost matrix given row-major
/// as `cost[row * n + col]`.
///
/// Hungarian algorithm with row/column potentials, O(n^3). Returns the
/// column assigned to each row and the total cost.
pub fn min_cost_assignment(cost: &[f64], n: usize) -> (Vec<usize>, f64) {
    assert_eq!(cost.len(), n * n, "cost matrix must be n x n");
    if n == 0 {
        return (Vec::new(), 0.0);
    }
    // 1-based internally; index 0 is the virtual column.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for row in 1..=n {
        row_of[0] = row;
        let mut col0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[col0] = true;
            let r = row_of[col0];
            let mut delta = f64::INFINITY;
            let mut col1 = 0usize;
            for col in 1..=n {
                if used[col] {
                    continue;
                }
                let reduced = cost[(r - 1) * n + (col - 1)] - u[r] - v[col];
                if reduced < minv[col] {
                    minv[col] = reduced;
                    way[col] = col0;
                }
                if minv[col] < delta {
                    delta = minv[col];
                    col1 = col;
                }
            }
            for col in 0..=n {
                if used[col] {
                    u[row_of[col]] += delta;
                    v[col] -= delta;
                } else {
                    minv[col] -= delta;
                }
            }
            col0 = col1;
            if row_of[col0] == 0 {
                break;
            }
        }
        loop {
            let prev = way[col0];
            row_of[col0] = row_of[prev];
            col0 = prev;
            if col0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for col in 1..=n {
        assignment[row_of[col] - 1] = col - 1;
    }
    let total = assignment
        .iter()
        .enumerate()
        .map(|(r, &c)| cost[r * n + c])
        .sum();
    (assignment, total)
}

/// Mean distance `|a - b|` over the optimal one-to-one matching of two
/// eigenvalue multisets.
pub fn spectrum_distance(a: &Spectrum, b: &Spectrum) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let n = a.len();
    if n == 0 {
        return Ok(0.0);
    }
    let cost: Vec<f64> = a
        .iter()
        .flat_map(|x| b.iter().map(move |y: &Complex64| (x - y).norm()))
        .collect();
    let (_, total) = min_cost_assignment(&cost, n);
    Ok(total / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Exhaustive minimum over all permutations.
    fn brute_force(cost: &[f64], n: usize) -> f64 {
        fn go(cost: &[f64], n: usize, row: usize, used: &mut Vec<bool>, acc: f64, best: &mut f64) {
            if row == n {
                *best = best.min(acc);
                return;
            }
            for col in 0..n {
                if !used[col] {
                    used[col] = true;
                    go(cost, n, row + 1, used, acc + cost[row * n + col], best);
                    used[col] = false;
                }
            }
        }
        let mut best = f64::INFINITY;
        go(cost, n, 0, &mut vec![false; n], 0.0, &mut best);
        best
    }

    #[test]
    fn matches_brute_force_on_pseudo_random_costs() {
        let mut state = 0x2545_f491_4f6c_dd1du64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for n in 1..=6 {
            for _ in 0..20 {
                let cost: Vec<f64> = (0..n * n).map(|_| next() * 10.0).collect();
                let (assign, total) = min_cost_assignment(&cost, n);
                let mut seen = assign.clone();
                seen.sort_unstable();
                assert_eq!(seen, (0..n).collect::<Vec<_>>());
                assert!((total - brute_force(&cost, n)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn distance_examples() {
        let s = Spectrum::new(vec![c(1.0, 0.0), c(-0.5, 2.0), c(-0.5, -2.0)]);
        assert_eq!(spectrum_distance(&s, &s).unwrap(), 0.0);
        let perm = Spectrum::new(vec![c(-0.5, -2.0), c(1.0, 0.0), c(-0.5, 2.0)]);
        assert_eq!(spectrum_distance(&s, &perm).unwrap(), 0.0);
        let one = Spectrum::new(vec![c(1.0, 0.0)]);
        let shifted = Spectrum::new(vec![c(1.0, 1.0)]);
        assert!((spectrum_distance(&one, &shifted).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cardinality_mismatch() {
        let a = Spectrum::new(vec![c(0.0, 0.0)]);
        assert!(matches!(
            spectrum_distance(&a, &Spectrum::default()),
            Err(Error::DimensionMismatch {
                expected: 1,
                found: 0
            })
        ));
    }
}
