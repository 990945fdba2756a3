//! Dense linear-algebra helpers on top of nalgebra.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use num_traits::Float;

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Singular value decomposition with singular values in decreasing order.
#[derive(Clone, Debug)]
pub struct SortedSvd {
    /// rows × r, r = min(rows, cols)
    pub u: Matrix,
    pub singular_values: Vec<f64>,
    /// r × cols
    pub v_t: Matrix,
}

pub fn svd(m: &Matrix) -> SortedSvd {
    let (rows, cols) = m.shape();
    let r = rows.min(cols);
    if r == 0 {
        return SortedSvd {
            u: Matrix::zeros(rows, 0),
            singular_values: Vec::new(),
            v_t: Matrix::zeros(0, cols),
        };
    }
    let dec = m.clone().svd(true, true);
    let (u, v_t) = match (dec.u, dec.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => unreachable!("singular vectors were requested"),
    };
    let s = dec.singular_values;
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));
    let mut su = Matrix::zeros(rows, r);
    let mut sv = Matrix::zeros(r, cols);
    let mut values = Vec::with_capacity(r);
    for (dst, &src) in order.iter().enumerate() {
        su.set_column(dst, &u.column(src));
        sv.set_row(dst, &v_t.row(src));
        values.push(s[src]);
    }
    SortedSvd {
        u: su,
        singular_values: values,
        v_t: sv,
    }
}

pub fn singular_values(m: &Matrix) -> Vec<f64> {
    let (rows, cols) = m.shape();
    if rows.min(cols) == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values above `rel_tol` times the largest.
pub fn numerical_rank(m: &Matrix, rel_tol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&top) if top > 0.0 => s.iter().filter(|&&v| v > rel_tol * top).count(),
        _ => 0,
    }
}

/// Euclidean-orthonormal basis of the column space, rank decided relative to the top singular value.
pub fn column_space(m: &Matrix, rel_tol: f64) -> Matrix {
    let dec = svd(m);
    let top = dec.singular_values.first().copied().unwrap_or(0.0);
    let r = if top > 0.0 {
        dec.singular_values
            .iter()
            .filter(|&&v| v > rel_tol * top)
            .count()
    } else {
        0
    };
    dec.u.columns(0, r).into_owned()
}

pub fn pseudo_inverse(m: &Matrix, rel_tol: f64) -> Matrix {
    let dec = svd(m);
    let top = dec.singular_values.first().copied().unwrap_or(0.0);
    let mut out = Matrix::zeros(m.ncols(), m.nrows());
    for (i, &s) in dec.singular_values.iter().enumerate() {
        if top > 0.0 && s > rel_tol * top {
            out += dec.v_t.row(i).transpose() * dec.u.column(i).transpose() / s;
        }
    }
    out
}

pub fn from_columns(vs: &[Vector], rows: usize) -> Matrix {
    let mut m = Matrix::zeros(rows, vs.len());
    for (j, v) in vs.iter().enumerate() {
        m.set_column(j, v);
    }
    m
}

pub fn columns(m: &Matrix) -> Vec<Vector> {
    (0..m.ncols()).map(|j| m.column(j).into_owned()).collect()
}

/// Builds a matrix from row vectors, rejecting ragged input.
pub fn from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
    let ncols = rows.first().map_or(0, Vec::len);
    for r in rows {
        if r.len() != ncols {
            return Err(Error::dim(ncols, r.len()));
        }
    }
    Ok(Matrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

pub fn to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

pub fn determinant(m: &Matrix) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    m.clone().lu().determinant()
}

/// log|det m| via LU with partial pivoting; −∞ for singular matrices.
pub fn log_abs_det(m: &Matrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let lu = m.clone().lu();
    let u = lu.u();
    let mut acc = 0.0;
    for i in 0..u.nrows() {
        let d = u[(i, i)].abs();
        if d == 0.0 {
            return f64::NEG_INFINITY;
        }
        acc += d.ln();
    }
    acc
}

/// Maximum entry of |VᵀV − I| over the given vectors.
pub fn gram_deviation(vs: &[Vector]) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..vs.len() {
        for j in 0..vs.len() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((vs[i].dot(&vs[j]) - target).abs());
        }
    }
    worst
}

pub fn is_symmetric(m: &Matrix, rel_tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let scale = m.amax().max(f64::MIN_POSITIVE);
    for i in 0..m.nrows() {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > rel_tol * scale {
                return false;
            }
        }
    }
    true
}

pub fn symmetrize(m: &Matrix) -> Matrix {
    (m + m.transpose()) * 0.5
}

/// Symmetric square root and inverse square root of an SPD matrix.
pub fn spd_sqrt_pair(m: &Matrix) -> Result<(Matrix, Matrix)> {
    let eig = symmetrize(m).symmetric_eigen();
    let n = m.nrows();
    let mut root = Matrix::zeros(n, n);
    let mut inv_root = Matrix::zeros(n, n);
    for i in 0..n {
        let l = eig.eigenvalues[i];
        if l <= 0.0 {
            return Err(Error::Rank("matrix is not positive definite".into()));
        }
        let v = eig.eigenvectors.column(i);
        root += v * v.transpose() * l.sqrt();
        inv_root += v * v.transpose() / l.sqrt();
    }
    Ok((root, inv_root))
}

/// Binomial coefficient as f64, saturating to infinity on overflow.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Calls `f` on every k-subset of 0..n in lexicographic order; stops early when `f` returns false.
pub fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !f(&idx) {
            return;
        }
        let Some(i) = (0..k).rev().find(|&i| idx[i] < i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Serde adapter writing a list of vectors as nested arrays.
#[cfg(feature = "serde")]
pub mod serde_vectors {
    use super::Vector;
    use alloc::vec::Vec;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(vs: &[Vector], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<&[f64]> = vs.iter().map(|v| v.as_slice()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vector>, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        Ok(rows.into_iter().map(Vector::from_vec).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::vec;

    #[test]
    fn svd_is_sorted() {
        let m = Matrix::from_diagonal(&Vector::from_vec(vec![1.0, 5.0, 3.0]));
        let dec = svd(&m);
        assert_eq!(dec.singular_values, vec![5.0, 3.0, 1.0]);
        let rebuilt = &dec.u
            * Matrix::from_diagonal(&Vector::from_vec(dec.singular_values.clone()))
            * &dec.v_t;
        assert_relative_eq!(rebuilt, m, epsilon = 1e-12);
    }

    #[test]
    fn subsets_enumerate_in_order() {
        let mut seen = vec![];
        for_each_subset(4, 2, |s| {
            seen.push(s.to_vec());
            true
        });
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0], vec![0, 1]);
        assert_eq!(seen[5], vec![2, 3]);
        let mut count = 0;
        for_each_subset(3, 0, |_| {
            count += 1;
            true
        });
        assert_eq!(count, 1);
        for_each_subset(3, 3, |s| {
            assert_eq!(s, &[0, 1, 2]);
            true
        });
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(12, 6), 924.0);
        assert_eq!(binomial(3, 4), 0.0);
    }

    #[test]
    fn log_det_matches_det() {
        let m = Matrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        assert_relative_eq!(log_abs_det(&m), determinant(&m).abs().ln(), epsilon = 1e-14);
    }
}
