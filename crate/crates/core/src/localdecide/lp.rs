//! Dense phase-one simplex over any [`Scalar`], with Bland's rule.
//!
//! Exact scalars give exact answers; floating scalars accept a solution
//! whose equality residual is below `1e-9`.

use crate::scalar::Scalar;

const FLOAT_RESIDUAL: f64 = 1e-9;

/// Finds `x ≥ 0` with `a · x = b`, or `None` if the system is infeasible.
///
/// `a` is dense and row-major: `a[i][j]` is the coefficient of variable
/// `j` in equation `i`.
pub fn find_nonnegative_solution<S: Scalar>(a: &[Vec<S>], b: &[S]) -> Option<Vec<S>> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    assert_eq!(b.len(), m, "one right-hand side per row");
    let cols = n + m;
    let tol = S::pivot_tolerance();

    let mut tableau: Vec<Vec<S>> = Vec::with_capacity(m);
    for (row, rhs) in a.iter().zip(b) {
        let flip = rhs.is_negative();
        let mut line: Vec<S> = row
            .iter()
            .map(|x| if flip { -x.clone() } else { x.clone() })
            .collect();
        line.resize(cols + 1, S::zero());
        line[cols] = if flip { -rhs.clone() } else { rhs.clone() };
        tableau.push(line);
    }
    for (i, line) in tableau.iter_mut().enumerate() {
        line[n + i] = S::one();
    }
    let mut basis: Vec<usize> = (n..cols).collect();

    // Reduced costs of the phase-one objective (sum of artificials).
    let mut cost = vec![S::zero(); cols + 1];
    for line in &tableau {
        for j in 0..n {
            cost[j] = cost[j].clone() - line[j].clone();
        }
        cost[cols] = cost[cols].clone() - line[cols].clone();
    }

    let neg_tol = -tol.clone();
    while let Some(enter) = (0..cols).find(|&j| cost[j] < neg_tol) {
        let mut leave: Option<(usize, S)> = None;
        for (i, line) in tableau.iter().enumerate() {
            if line[enter] > tol {
                let ratio = line[cols].clone() / line[enter].clone();
                let better = match &leave {
                    None => true,
                    Some((best_i, best)) => {
                        ratio < *best || (ratio == *best && basis[i] < basis[*best_i])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((pivot_row, _)) = leave else {
            break;
        };
        pivot(&mut tableau, &mut cost, pivot_row, enter);
        basis[pivot_row] = enter;
    }

    let mut x = vec![S::zero(); n];
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            x[var] = tableau[i][cols].clone();
        }
    }
    let residual_tol = if S::EXACT {
        S::zero()
    } else {
        S::tolerance(FLOAT_RESIDUAL)
    };
    let feasible = x.iter().all(|v| !(v.clone() + residual_tol.clone()).is_negative())
        && a.iter().zip(b).all(|(row, rhs)| {
            let lhs = row
                .iter()
                .zip(&x)
                .fold(S::zero(), |acc, (c, v)| acc + c.clone() * v.clone());
            lhs.abs_diff_le(rhs, &residual_tol)
        });
    feasible.then_some(x)
}

fn pivot<S: Scalar>(tableau: &mut [Vec<S>], cost: &mut [S], row: usize, col: usize) {
    let width = tableau[row].len();
    let p = tableau[row][col].clone();
    for j in 0..width {
        tableau[row][j] = tableau[row][j].clone() / p.clone();
    }
    let pivot_line = tableau[row].clone();
    for (i, line) in tableau.iter_mut().enumerate() {
        if i == row || line[col].is_zero() {
            continue;
        }
        let factor = line[col].clone();
        for j in 0..width {
            if !pivot_line[j].is_zero() {
                line[j] = line[j].clone() - factor.clone() * pivot_line[j].clone();
            }
        }
    }
    let factor = cost[col].clone();
    if !factor.is_zero() {
        for j in 0..width {
            if !pivot_line[j].is_zero() {
                cost[j] = cost[j].clone() - factor.clone() * pivot_line[j].clone();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::from_ratio(n, d)
    }

    #[test]
    fn exact_feasible_system() {
        // x + y = 1, x - y = 1/2  ->  x = 3/4, y = 1/4
        let a = vec![vec![q(1, 1), q(1, 1)], vec![q(1, 1), q(-1, 1)]];
        let b = vec![q(1, 1), q(1, 2)];
        let x = find_nonnegative_solution(&a, &b).unwrap();
        assert_eq!(x, vec![q(3, 4), q(1, 4)]);
    }

    #[test]
    fn exact_infeasible_system() {
        // x + y = 1, x + y = 2
        let a = vec![vec![q(1, 1), q(1, 1)], vec![q(1, 1), q(1, 1)]];
        let b = vec![q(1, 1), q(2, 1)];
        assert!(find_nonnegative_solution(&a, &b).is_none());
        // x - y = -1 has x = 0, y = 1; x = -1 alone does not.
        assert!(find_nonnegative_solution(&[vec![q(1, 1), q(-1, 1)]], &[q(-1, 1)]).is_some());
        assert!(find_nonnegative_solution(&[vec![q(1, 1)]], &[q(-1, 1)]).is_none());
    }

    #[test]
    fn redundant_rows_are_fine() {
        let a = vec![
            vec![1.0f64, 1.0, 0.0],
            vec![0.0, 1.0, 1.0],
            vec![1.0, 2.0, 1.0],
        ];
        let b: Vec<f64> = vec![0.5, 0.5, 1.0];
        let x = find_nonnegative_solution(&a, &b).unwrap();
        assert!((x[0] + x[1] - 0.5).abs() < 1e-12);
        assert!((x[1] + x[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn float_infeasible_system() {
        let a = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let b = vec![0.5, 0.5, 0.9];
        assert!(find_nonnegative_solution(&a, &b).is_none());
    }
}
