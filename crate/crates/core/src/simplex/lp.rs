//! Phase-I simplex method for `A x = b, x >= 0`, generic over the scalar
//! field so the same code runs in exact rationals and in `f64`.
//!
//! Bland's rule is used for both the entering and the leaving variable, so
//! the method terminates on degenerate problems.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Scalars the LP can run on. The comparison helpers carry the tolerance
/// (zero for exact types).
pub trait Field:
    Clone
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero_tol(&self) -> bool;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn lt(&self, o: &Self) -> bool;
    fn to_f64(&self) -> f64;
    fn from_ratio(n: i64, d: i64) -> Self;
}

/// Feasibility tolerance for the floating-point LP.
pub const F64_TOL: f64 = 1e-9;

impl Field for f64 {
    fn zero() -> f64 {
        0.0
    }
    fn one() -> f64 {
        1.0
    }
    fn is_zero_tol(&self) -> bool {
        self.abs() <= F64_TOL
    }
    fn is_pos(&self) -> bool {
        *self > F64_TOL
    }
    fn is_neg(&self) -> bool {
        *self < -F64_TOL
    }
    fn lt(&self, o: &f64) -> bool {
        self < o
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_ratio(n: i64, d: i64) -> f64 {
        n as f64 / d as f64
    }
}

impl Field for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero_tol(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_pos(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn lt(&self, o: &Self) -> bool {
        self < o
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }
}

/// Find `x >= 0` with `sum_j x_j cols[j] = b`, or `None` if there is none.
/// All columns must have the length of `b`.
pub fn find_nonnegative_combination<F: Field>(cols: &[Vec<F>], b: &[F]) -> Option<Vec<F>> {
    let m = b.len();
    let n = cols.len();
    let width = n + m;
    // Tableau rows: [A | I | b], with rows flipped so b >= 0.
    let mut t: Vec<Vec<F>> = (0..m)
        .map(|i| {
            let flip = b[i].is_neg();
            let sgn = |v: F| if flip { -v } else { v };
            let mut row: Vec<F> = cols.iter().map(|c| sgn(c[i].clone())).collect();
            row.extend((0..m).map(|j| if i == j { F::one() } else { F::zero() }));
            row.push(sgn(b[i].clone()));
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..width).collect();
    // Objective row: reduced costs of minimising the sum of artificials.
    let mut obj: Vec<F> = (0..=width)
        .map(|j| {
            if (n..width).contains(&j) {
                F::zero()
            } else {
                t.iter().fold(F::zero(), |acc, row| acc - row[j].clone())
            }
        })
        .collect();

    for _ in 0..10_000 {
        let Some(enter) = (0..width).find(|&j| obj[j].is_neg()) else { break };
        let mut leave: Option<(usize, F)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[enter].is_pos() {
                let ratio = row[width].clone() / row[enter].clone();
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio.lt(lr) || (!lr.lt(&ratio) && basis[i] < basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        // Unbounded cannot happen for phase I (objective bounded below by 0).
        let (r, _) = leave?;
        let piv = t[r][enter].clone();
        for v in t[r].iter_mut() {
            *v = v.clone() / piv.clone();
        }
        let prow = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r && !row[enter].is_zero_tol() {
                let f = row[enter].clone();
                for (v, p) in row.iter_mut().zip(prow.iter()) {
                    *v = v.clone() - f.clone() * p.clone();
                }
            }
        }
        if !obj[enter].is_zero_tol() {
            let f = obj[enter].clone();
            for (v, p) in obj.iter_mut().zip(prow.iter()) {
                *v = v.clone() - f.clone() * p.clone();
            }
        }
        basis[r] = enter;
    }
    // Optimal phase-I value is -obj[width].
    if !obj[width].is_zero_tol() {
        return None;
    }
    let mut x = vec![F::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][width].clone();
        }
    }
    Some(x)
}

/// Solve the square system `a x = b` by Gaussian elimination with the
/// largest available pivot; `None` if singular.
pub fn solve_square<F: Field>(mut a: Vec<Vec<F>>, mut b: Vec<F>) -> Option<Vec<F>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .filter(|&r| !a[r][col].is_zero_tol())
            .max_by(|&x, &y| a[x][col].to_f64().abs().total_cmp(&a[y][col].to_f64().abs()))?;
        a.swap(col, piv);
        b.swap(col, piv);
        let p = a[col][col].clone();
        for r in 0..n {
            if r != col && !a[r][col].is_zero_tol() {
                let f = a[r][col].clone() / p.clone();
                for k in col..n {
                    let v = a[col][k].clone();
                    a[r][k] = a[r][k].clone() - f.clone() * v;
                }
                b[r] = b[r].clone() - f * b[col].clone();
            }
        }
    }
    Some((0..n).map(|i| b[i].clone() / a[i][i].clone()).collect())
}

/// Rank of a set of row vectors.
pub fn rank<F: Field>(mut rows: Vec<Vec<F>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..ncols {
        let Some(piv) = (r..rows.len()).find(|&i| !rows[i][col].is_zero_tol()) else {
            continue;
        };
        rows.swap(r, piv);
        let p = rows[r][col].clone();
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero_tol() {
                let f = rows[i][col].clone() / p.clone();
                for k in col..ncols {
                    let v = rows[r][k].clone();
                    rows[i][k] = rows[i][k].clone() - f.clone() * v;
                }
            }
        }
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::from_ratio(n, d)
    }

    #[test]
    fn feasible_and_infeasible_exact() {
        // x0 (1,0) + x1 (0,1) + x2 (1,1) = (1, 2)
        let cols = vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(1, 1)]];
        let x = find_nonnegative_combination(&cols, &[q(1, 1), q(2, 1)]).unwrap();
        assert!(x.iter().all(|v| !v.is_neg()));
        let lhs0 = x[0].clone() + x[2].clone();
        let lhs1 = x[1].clone() + x[2].clone();
        assert_eq!((lhs0, lhs1), (q(1, 1), q(2, 1)));
        assert!(find_nonnegative_combination(&cols, &[q(-1, 1), q(2, 1)]).is_none());
    }

    #[test]
    fn degenerate_problem_terminates() {
        let cols: Vec<Vec<f64>> = (0..6)
            .map(|j| (0..4).map(|i| if (i + j) % 3 == 0 { 1.0 } else { 0.0 }).collect())
            .collect();
        let b = vec![0.0, 0.0, 0.0, 0.0];
        let x = find_nonnegative_combination(&cols, &b).unwrap();
        assert!(x.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn solve_and_rank() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = solve_square(a, vec![3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-15 && (x[1] - 1.4).abs() < 1e-15);
        assert!(solve_square(vec![vec![1.0, 2.0], vec![2.0, 4.0]], vec![1.0, 2.0]).is_none());
        assert_eq!(rank(vec![vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(4, 1)]]), 1);
    }
}
