//! Small dense floating-point linear algebra.
//!
//! Everything in this crate works with lattices of rank at most eight, so a
//! plain row-major `Vec<f64>` matrix with textbook O(n^3) kernels (LU
//! determinants, Gauss-Jordan inverses, Gram-Schmidt) is both simpler and
//! faster than pulling in a general-purpose array library.  Vectors are rows;
//! a lattice point with coordinate row `m` realizes as `m * B`.

use crate::error::{Error, Result};

/// Row-major dense matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Mat> {
        if rows.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        let cols = rows[0].len();
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, got: r.len() });
            }
        }
        Ok(Mat { rows: rows.len(), cols, data: rows.concat() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> Vec<f64> {
        self.row(i).to_vec()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row_vec(i)).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.at(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.at(k, j);
                }
            }
        }
        out
    }

    pub fn scaled(&self, c: f64) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * c).collect() }
    }

    /// Gram matrix `B * B^T` of the rows.
    pub fn gram(&self) -> Mat {
        let mut g = Mat::zeros(self.rows, self.rows);
        for i in 0..self.rows {
            for j in i..self.rows {
                let v = dot(self.row(i), self.row(j));
                g.set(i, j, v);
                g.set(j, i, v);
            }
        }
        g
    }

    /// Kronecker product (self ⊗ other), row convention.
    pub fn kron(&self, other: &Mat) -> Mat {
        let mut out = Mat::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.at(i, j);
                if a == 0.0 {
                    continue;
                }
                for p in 0..other.rows {
                    for q in 0..other.cols {
                        out.set(i * other.rows + p, j * other.cols + q, a * other.at(p, q));
                    }
                }
            }
        }
        out
    }

    /// Block-diagonal concatenation of square matrices.
    pub fn block_diag(blocks: &[&Mat]) -> Mat {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Mat::zeros(n, m);
        let (mut oi, mut oj) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(oi + i, oj + j, b.at(i, j));
                }
            }
            oi += b.rows;
            oj += b.cols;
        }
        out
    }

    /// Determinant by LU with partial pivoting (square matrices).
    pub fn det(&self) -> f64 {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for k in 0..n {
            let mut piv = k;
            let mut best = a[k * n + k].abs();
            for i in k + 1..n {
                let v = a[i * n + k].abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best == 0.0 {
                return 0.0;
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                det = -det;
            }
            let pivot = a[k * n + k];
            det *= pivot;
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                if f == 0.0 {
                    continue;
                }
                for j in k..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan with partial pivoting.
    pub fn inverse(&self) -> Result<Mat> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let mut a = self.data.clone();
        let mut inv = Mat::identity(n);
        for k in 0..n {
            let mut piv = k;
            let mut best = a[k * n + k].abs();
            for i in k + 1..n {
                let v = a[i * n + k].abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::DegenerateBasis("matrix is numerically singular".into()));
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                    inv.data.swap(k * n + j, piv * n + j);
                }
            }
            let pivot = a[k * n + k];
            for j in 0..n {
                a[k * n + j] /= pivot;
                inv.data[k * n + j] /= pivot;
            }
            for i in 0..n {
                if i == k {
                    continue;
                }
                let f = a[i * n + k];
                if f == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a[i * n + j] -= f * a[k * n + j];
                    inv.data[i * n + j] -= f * inv.data[k * n + j];
                }
            }
        }
        Ok(inv)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Frobenius condition estimate `||B||_F * ||B^-1||_F` (upper bound on
    /// the spectral condition number up to a dimension factor).
    pub fn cond_frobenius(&self) -> f64 {
        match self.inverse() {
            Ok(inv) => self.frobenius_norm() * inv.frobenius_norm(),
            Err(_) => f64::INFINITY,
        }
    }

    /// Covolume of the (full-row-rank) row span: sqrt(det(B B^T)).
    pub fn row_covolume(&self) -> f64 {
        if self.rows == self.cols {
            self.det().abs()
        } else {
            self.gram().det().max(0.0).sqrt()
        }
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

/// Gram-Schmidt orthogonalization data of the rows of `b`:
/// `mu[i][j]` (j < i) are the projection coefficients and `bstar_sq[i]`
/// the squared lengths of the orthogonalized vectors.
pub fn gso(b: &Mat) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = b.rows();
    let d = b.cols();
    let mut mu = vec![vec![0.0; n]; n];
    let mut star: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut bstar_sq = vec![0.0; n];
    for i in 0..n {
        let mut v = b.row_vec(i);
        for j in 0..i {
            let denom = bstar_sq[j];
            let m = if denom > 0.0 { dot(b.row(i), &star[j]) / denom } else { 0.0 };
            mu[i][j] = m;
            for k in 0..d {
                v[k] -= m * star[j][k];
            }
        }
        bstar_sq[i] = norm_sq(&v);
        star.push(v);
    }
    (mu, bstar_sq)
}

/// Orthonormal basis (as rows) of the row span of `v`, by modified
/// Gram-Schmidt with one re-orthogonalization pass.  Rows of `v` must be
/// linearly independent.
pub fn orthonormal_rowspace(v: &Mat) -> Mat {
    let dim = v.cols();
    let mut ortho: Vec<Vec<f64>> = Vec::with_capacity(v.rows());
    for i in 0..v.rows() {
        let mut w = v.row_vec(i);
        for _ in 0..2 {
            for o in &ortho {
                let c = dot(&w, o);
                for t in 0..dim {
                    w[t] -= c * o[t];
                }
            }
        }
        let n = norm_sq(&w).sqrt();
        assert!(n > 1e-12, "orthonormal_rowspace: dependent rows");
        for t in 0..dim {
            w[t] /= n;
        }
        ortho.push(w);
    }
    Mat::from_rows(&ortho).expect("nonempty row space")
}

/// Orthonormal basis (as rows) of the orthogonal complement of the row span
/// of `v` inside R^cols.  Deterministic: candidates are the standard basis
/// vectors taken in order.
pub fn orthonormal_complement(v: &Mat) -> Mat {
    let dim = v.cols();
    let k = v.rows();
    let mut ortho: Vec<Vec<f64>> = Vec::with_capacity(dim);
    // Orthonormalize the given rows first (they span the subspace to remove).
    for i in 0..k {
        let mut w = v.row_vec(i);
        for o in &ortho {
            let c = dot(&w, o);
            for t in 0..dim {
                w[t] -= c * o[t];
            }
        }
        let n = norm_sq(&w).sqrt();
        if n > 1e-12 {
            for t in 0..dim {
                w[t] /= n;
            }
            ortho.push(w);
        }
    }
    let span_dim = ortho.len();
    let mut comp: Vec<Vec<f64>> = Vec::with_capacity(dim - span_dim);
    for e in 0..dim {
        if ortho.len() == dim {
            break;
        }
        let mut w = vec![0.0; dim];
        w[e] = 1.0;
        for o in &ortho {
            let c = dot(&w, o);
            for t in 0..dim {
                w[t] -= c * o[t];
            }
        }
        // Re-orthogonalize once for numerical hygiene.
        for o in &ortho {
            let c = dot(&w, o);
            for t in 0..dim {
                w[t] -= c * o[t];
            }
        }
        let n = norm_sq(&w).sqrt();
        if n > 1e-9 {
            for t in 0..dim {
                w[t] /= n;
            }
            ortho.push(w.clone());
            comp.push(w);
        }
    }
    Mat::from_rows(&comp).expect("complement is nonempty")
}

/// Compensated (Kahan) summation accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> KahanSum {
        KahanSum::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_inverse_roundtrip() {
        let m = Mat::from_rows(&[vec![2.0, 1.0, 0.0], vec![0.5, 3.0, 1.0], vec![0.0, -1.0, 4.0]])
            .unwrap();
        let det = m.det();
        assert!((det - 24.0).abs() < 1e-12, "det = {det}");
        let inv = m.inverse().unwrap();
        let prod = m.mul(&inv);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((prod.at(i, j) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gso_orthogonalizes() {
        let m = Mat::from_rows(&[vec![1.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let (mu, bstar) = gso(&m);
        assert!((bstar[0] - 2.0).abs() < 1e-12);
        assert!((bstar[1] - 0.5).abs() < 1e-12);
        assert!((mu[1][0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn complement_is_orthonormal() {
        let v = Mat::from_rows(&[vec![1.0, 1.0, 0.0]]).unwrap();
        let c = orthonormal_complement(&v);
        assert_eq!(c.rows(), 2);
        for i in 0..2 {
            assert!(dot(c.row(i), v.row(0)).abs() < 1e-12);
            assert!((norm_sq(c.row(i)) - 1.0).abs() < 1e-12);
        }
        assert!(dot(c.row(0), c.row(1)).abs() < 1e-12);
    }

    #[test]
    fn kahan_beats_naive_on_adversarial_sum() {
        let mut k = KahanSum::new();
        k.add(1.0);
        for _ in 0..10_000 {
            k.add(1e-16);
        }
        assert!((k.value() - (1.0 + 1e-12)).abs() < 1e-15);
    }

    #[test]
    fn kron_matches_block_structure() {
        let a = Mat::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        let b = Mat::identity(2);
        let k = a.kron(&b);
        assert_eq!(k.rows(), 4);
        assert!((k.at(0, 2) - 2.0).abs() < 1e-15);
        assert!((k.at(1, 3) - 2.0).abs() < 1e-15);
        assert!((k.at(2, 0)).abs() < 1e-15);
    }
}
