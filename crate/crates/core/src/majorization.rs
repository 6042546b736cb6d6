//! Majorization and doubly-stochastic matrix utilities.

use nalgebra::DMatrix;

use crate::linalg::CMatrix;

fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// `x ≺ y`: every partial sum of `x` sorted descending is at most the
/// matching partial sum of `y`, and the totals agree (all within `tol`).
pub fn majorized_by(x: &[f64], y: &[f64], tol: f64) -> bool {
    if x.len() != y.len() {
        return false;
    }
    let (xs, ys) = (sorted_desc(x), sorted_desc(y));
    let (mut sx, mut sy) = (0.0, 0.0);
    for (a, b) in xs.iter().zip(&ys) {
        sx += a;
        sy += b;
        if sx > sy + tol {
            return false;
        }
    }
    (sx - sy).abs() <= tol
}

/// Non-negative with unit row and column sums.
pub fn is_doubly_stochastic(m: &DMatrix<f64>, tol: f64) -> bool {
    if !m.is_square() || m.iter().any(|&x| x < -tol) {
        return false;
    }
    let rows_ok = m.row_iter().all(|r| (r.sum() - 1.0).abs() <= tol);
    let cols_ok = m.column_iter().all(|c| (c.sum() - 1.0).abs() <= tol);
    rows_ok && cols_ok
}

/// `|u_ij|²` of a unitary, which is always doubly stochastic.
pub fn unistochastic(u: &CMatrix) -> DMatrix<f64> {
    u.map(|z| z.norm_sqr())
}
