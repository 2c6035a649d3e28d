//! Numeric rank, nullspace and Pfaffian helpers on dense matrices.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

/// Singular values of `a`, padded with zero rows to a square matrix so that
/// the right singular vectors span the whole domain.
fn padded_svd(a: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = a.ncols().max(a.nrows());
    let mut sq = DMatrix::zeros(n, a.ncols());
    sq.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    let svd = sq.svd(false, true);
    (svd.singular_values, svd.v_t.expect("requested V^T"))
}

/// Number of singular values above `tol · max(1, σ_max)`.
pub fn rank(a: &DMatrix<f64>, tol: f64) -> usize {
    let (s, _) = padded_svd(a);
    let cut = tol * s.max().max(1.0);
    s.iter().filter(|x| **x > cut).count()
}

/// Orthonormal basis of the numeric nullspace, threshold `tol · max(1, σ_max)`.
pub fn nullspace(a: &DMatrix<f64>, tol: f64) -> Vec<DVector<f64>> {
    let (s, vt) = padded_svd(a);
    let cut = tol * s.max().max(1.0);
    let mut out = Vec::new();
    for i in 0..vt.nrows() {
        let sv = if i < s.len() { s[i] } else { 0.0 };
        if sv <= cut {
            out.push(vt.row(i).transpose());
        }
    }
    out
}

/// Pfaffian of an antisymmetric matrix of even order by expansion along the first row.
pub fn pfaffian(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    if n == 0 {
        return 1.0;
    }
    if n % 2 == 1 {
        return 0.0;
    }
    let mut total = 0.0;
    for j in 1..n {
        if a[(0, j)] == 0.0 {
            continue;
        }
        let keep: Vec<usize> = (1..n).filter(|&i| i != j).collect();
        let minor = DMatrix::from_fn(n - 2, n - 2, |r, c| a[(keep[r], keep[c])]);
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        total += sign * a[(0, j)] * pfaffian(&minor);
    }
    total
}

/// Euclidean distance from `v` to the column span of an orthonormal set.
pub fn distance_to_span(v: &DVector<f64>, basis: &[DVector<f64>]) -> f64 {
    let mut r = v.clone();
    for b in basis {
        let c = b.dot(&r);
        r -= b * c;
    }
    r.norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pfaffian_squares_to_determinant() {
        let a = DMatrix::from_fn(6, 6, |i, j| {
            let x = ((i * 7 + j * 3) % 11) as f64 - 5.0;
            if i < j {
                x
            } else if i > j {
                -(((j * 7 + i * 3) % 11) as f64 - 5.0)
            } else {
                0.0
            }
        });
        let pf = pfaffian(&a);
        assert!((pf * pf - a.determinant()).abs() < 1e-8 * a.determinant().abs().max(1.0));
    }

    #[test]
    fn rank_and_nullspace_of_wide_matrix() {
        let a = DMatrix::from_row_slice(2, 4, &[1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0]);
        assert_eq!(rank(&a, 1e-12), 2);
        let ns = nullspace(&a, 1e-12);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!((&a * v).norm() < 1e-12);
        }
    }
}
