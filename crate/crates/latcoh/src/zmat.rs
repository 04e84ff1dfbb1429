//! Exact integer matrix algebra: Hermite forms, saturations, completions.
//!
//! Sublattices are handled exactly: a generator matrix with integer entries is
//! saturated (replaced by a basis of `span_Q ∩ Z^N`) via a Smith-style
//! diagonalization that tracks the inverse column transform.  If `D = L·A·C`
//! with `L, C` unimodular and `D` diagonal of rank `r`, then the first `r`
//! rows of `C^{-1}` are a basis of the saturation and the remaining rows
//! complete it to a basis of `Z^N` — which is exactly what quotient
//! constructions need.  All arithmetic is checked `i64` (via `i128`
//! intermediates); overflow is reported, never wrapped.

use crate::error::{Error, Result};

/// Row-major dense matrix of `i64`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IMat {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IMat {
    pub fn zeros(rows: usize, cols: usize) -> IMat {
        IMat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> IMat {
        let mut m = IMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<IMat> {
        if rows.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        let cols = rows[0].len();
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, got: r.len() });
            }
        }
        Ok(IMat { rows: rows.len(), cols, data: rows.concat() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn take_rows(&self, lo: usize, hi: usize) -> IMat {
        IMat { rows: hi - lo, cols: self.cols, data: self.data[lo * self.cols..hi * self.cols].to_vec() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    /// Matrix product with overflow checking.
    pub fn mul(&self, other: &IMat) -> Result<IMat> {
        assert_eq!(self.cols, other.rows, "integer matrix product shape mismatch");
        let mut out = IMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: i128 = 0;
                for k in 0..self.cols {
                    acc += self.at(i, k) as i128 * other.at(k, j) as i128;
                }
                out.set(i, j, narrow(acc)?);
            }
        }
        Ok(out)
    }

    /// Map integer rows through a real basis matrix: `self * b`.
    pub fn mul_mat(&self, b: &crate::linalg::Mat) -> crate::linalg::Mat {
        assert_eq!(self.cols, b.rows());
        let mut out = crate::linalg::Mat::zeros(self.rows, b.cols());
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k) as f64;
                if a == 0.0 {
                    continue;
                }
                for j in 0..b.cols() {
                    out.set(i, j, out.at(i, j) + a * b.at(k, j));
                }
            }
        }
        out
    }

    /// Determinant (for unimodularity checks) via fraction-free elimination.
    pub fn det(&self) -> Result<i64> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a: Vec<i128> = self.data.iter().map(|&v| v as i128).collect();
        let mut sign: i128 = 1;
        let mut denom: i128 = 1;
        for k in 0..n {
            let piv = (k..n).find(|&i| a[i * n + k] != 0);
            let piv = match piv {
                Some(p) => p,
                None => return Ok(0),
            };
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = a[k * n + k]
                        .checked_mul(a[i * n + j])
                        .and_then(|x| a[i * n + k].checked_mul(a[k * n + j]).map(|y| (x, y)))
                        .and_then(|(x, y)| x.checked_sub(y))
                        .ok_or(Error::IntegerOverflow)?;
                    a[i * n + j] = v / denom;
                }
                a[i * n + k] = 0;
            }
            denom = a[k * n + k];
        }
        narrow(sign * a[(n - 1) * n + (n - 1)])
    }

    /// Row-style Hermite normal form (canonical echelon; pivots positive,
    /// entries above each pivot reduced into `[0, pivot)`).  Zero rows are
    /// dropped.  Used both as a canonical dictionary key for sublattices and
    /// as the deterministic tie-breaker for equal-slope destabilizers.
    pub fn hermite_form(&self) -> Result<IMat> {
        let mut rows: Vec<Vec<i128>> =
            self.to_rows().iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
        let ncols = self.cols;
        let mut pivot_row = 0usize;
        for col in 0..ncols {
            // Euclidean elimination in this column below pivot_row.
            loop {
                let mut best: Option<(usize, i128)> = None;
                for (i, row) in rows.iter().enumerate().skip(pivot_row) {
                    let v = row[col];
                    if v != 0 {
                        match best {
                            Some((_, bv)) if bv.abs() <= v.abs() => {}
                            _ => best = Some((i, v)),
                        }
                    }
                }
                let (bi, bv) = match best {
                    None => break,
                    Some(x) => x,
                };
                rows.swap(pivot_row, bi);
                if bv < 0 {
                    for v in rows[pivot_row].iter_mut() {
                        *v = v.checked_neg().ok_or(Error::IntegerOverflow)?;
                    }
                }
                let mut done = true;
                let pv = rows[pivot_row][col];
                for i in pivot_row + 1..rows.len() {
                    let q = div_floor(rows[i][col], pv);
                    if q != 0 {
                        for j in 0..ncols {
                            let s = rows[pivot_row][j]
                                .checked_mul(q)
                                .and_then(|x| rows[i][j].checked_sub(x))
                                .ok_or(Error::IntegerOverflow)?;
                            rows[i][j] = s;
                        }
                    }
                    if rows[i][col] != 0 {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
            if pivot_row < rows.len() && rows[pivot_row][col] != 0 {
                // Reduce entries above the pivot into [0, pivot).
                let pv = rows[pivot_row][col];
                for i in 0..pivot_row {
                    let q = div_floor(rows[i][col], pv);
                    if q != 0 {
                        for j in 0..ncols {
                            let s = rows[pivot_row][j]
                                .checked_mul(q)
                                .and_then(|x| rows[i][j].checked_sub(x))
                                .ok_or(Error::IntegerOverflow)?;
                            rows[i][j] = s;
                        }
                    }
                }
                pivot_row += 1;
            }
        }
        rows.truncate(pivot_row);
        if rows.is_empty() {
            return Ok(IMat::zeros(0, ncols));
        }
        let rows64: Vec<Vec<i64>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(narrow).collect::<Result<Vec<i64>>>())
            .collect::<Result<_>>()?;
        IMat::from_rows(&rows64)
    }
}

fn narrow(v: i128) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::IntegerOverflow)
}

fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

/// Result of the Smith-style saturation of a generator matrix.
#[derive(Debug, Clone)]
pub struct Saturation {
    /// Rank of the rational row span.
    pub rank: usize,
    /// Unimodular `N x N` matrix whose first `rank` rows are a basis of the
    /// saturation `span_Q ∩ Z^N` and whose remaining rows complete it to a
    /// basis of `Z^N`.
    pub w: IMat,
}

impl Saturation {
    pub fn basis(&self) -> IMat {
        self.w.take_rows(0, self.rank)
    }

    pub fn completion(&self) -> IMat {
        self.w.take_rows(self.rank, self.w.rows())
    }
}

/// Saturate the row span of `a` inside `Z^N`.
///
/// Diagonalizes `a` by unimodular row and column operations, mirroring the
/// inverse of every column operation as a row operation on the tracker `w`
/// (so `w = C^{-1}` throughout).
pub fn saturate(a: &IMat) -> Result<Saturation> {
    let (k, n) = (a.rows(), a.cols());
    let mut m: Vec<Vec<i128>> =
        a.to_rows().iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
    let mut w: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1 } else { 0 }).collect())
        .collect();
    let mut t = 0usize;
    while t < k.min(n) {
        // Find the entry of smallest nonzero magnitude in the trailing block.
        let mut best: Option<(usize, usize, i128)> = None;
        for i in t..k {
            for j in t..n {
                let v = m[i][j];
                if v != 0 {
                    match best {
                        Some((_, _, bv)) if bv.abs() <= v.abs() => {}
                        _ => best = Some((i, j, v)),
                    }
                }
            }
        }
        let (bi, bj, _) = match best {
            None => break,
            Some(x) => x,
        };
        m.swap(t, bi);
        if bj != t {
            for row in m.iter_mut() {
                row.swap(t, bj);
            }
            w.swap(t, bj); // column swap on a == row swap on w = C^{-1}
        }
        if m[t][t] < 0 {
            for row in m.iter_mut() {
                row[t] = row[t].checked_neg().ok_or(Error::IntegerOverflow)?;
            }
            for v in w[t].iter_mut() {
                *v = v.checked_neg().ok_or(Error::IntegerOverflow)?;
            }
        }
        let mut clean = true;
        // Clear the rest of row t by column operations (mirrored on w).
        for j in t + 1..n {
            let q = div_round(m[t][j], m[t][t]);
            if q != 0 {
                // col_j -= q * col_t  ==>  row_t += q * row_j  on w
                for row in m.iter_mut() {
                    let s = row[t].checked_mul(q).and_then(|x| row[j].checked_sub(x));
                    row[j] = s.ok_or(Error::IntegerOverflow)?;
                }
                for idx in 0..n {
                    let s = w[j][idx].checked_mul(q).and_then(|x| w[t][idx].checked_add(x));
                    w[t][idx] = s.ok_or(Error::IntegerOverflow)?;
                }
            }
            if m[t][j] != 0 {
                clean = false;
            }
        }
        // Clear the rest of column t by row operations (free).
        for i in t + 1..k {
            let q = div_round(m[i][t], m[t][t]);
            if q != 0 {
                for j in 0..n {
                    let s = m[t][j].checked_mul(q).and_then(|x| m[i][j].checked_sub(x));
                    m[i][j] = s.ok_or(Error::IntegerOverflow)?;
                }
            }
            if m[i][t] != 0 {
                clean = false;
            }
        }
        if clean {
            t += 1;
        }
    }
    let rank = t;
    let w64: Vec<Vec<i64>> = w
        .into_iter()
        .map(|r| r.into_iter().map(narrow).collect::<Result<Vec<i64>>>())
        .collect::<Result<_>>()?;
    Ok(Saturation { rank, w: IMat::from_rows(&w64)? })
}

/// Rounded division (nearest, ties toward zero) used for coefficient control.
fn div_round(a: i128, b: i128) -> i128 {
    let q = a / b;
    let r = a - q * b;
    if 2 * r.abs() > b.abs() {
        if (r < 0) == (b < 0) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Primitive part of an integer vector: divide by gcd, fix sign so the first
/// nonzero entry is positive.  Returns `None` for the zero vector.
pub fn primitive(v: &[i64]) -> Option<Vec<i64>> {
    let mut g: i64 = 0;
    for &x in v {
        g = gcd(g, x.abs());
    }
    if g == 0 {
        return None;
    }
    let mut out: Vec<i64> = v.iter().map(|&x| x / g).collect();
    if let Some(&first) = out.iter().find(|&&x| x != 0) {
        if first < 0 {
            for x in out.iter_mut() {
                *x = -*x;
            }
        }
    }
    Some(out)
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Lexicographic comparison of the concatenated rows of two integer matrices
/// (same shape assumed); the deterministic tie-breaker for destabilizers.
pub fn lex_cmp(a: &IMat, b: &IMat) -> std::cmp::Ordering {
    a.data.cmp(&b.data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saturation_of_doubled_vector_is_primitive() {
        let a = IMat::from_rows(&[vec![2, 0]]).unwrap();
        let s = saturate(&a).unwrap();
        assert_eq!(s.rank, 1);
        assert_eq!(s.basis().to_rows(), vec![vec![1, 0]]);
        // Completion makes the tracker unimodular.
        assert_eq!(s.w.det().unwrap().abs(), 1);
    }

    #[test]
    fn saturation_spots_hidden_index() {
        // Rows (2,0,0) and (0,3,3) saturate to (1,0,0),(0,1,1).
        let a = IMat::from_rows(&[vec![2, 0, 0], vec![0, 3, 3]]).unwrap();
        let s = saturate(&a).unwrap();
        assert_eq!(s.rank, 2);
        let h = s.basis().hermite_form().unwrap();
        assert_eq!(h.to_rows(), vec![vec![1, 0, 0], vec![0, 1, 1]]);
        assert_eq!(s.w.det().unwrap().abs(), 1);
    }

    #[test]
    fn saturation_of_dependent_rows_has_lower_rank() {
        let a = IMat::from_rows(&[vec![1, 2], vec![2, 4]]).unwrap();
        let s = saturate(&a).unwrap();
        assert_eq!(s.rank, 1);
        assert_eq!(s.basis().hermite_form().unwrap().to_rows(), vec![vec![1, 2]]);
    }

    #[test]
    fn hermite_form_is_canonical() {
        let a = IMat::from_rows(&[vec![4, 6], vec![2, 2]]).unwrap();
        let b = IMat::from_rows(&[vec![2, 2], vec![-4, -6]]).unwrap();
        assert_eq!(a.hermite_form().unwrap(), b.hermite_form().unwrap());
        let h = a.hermite_form().unwrap();
        // Row span check: dets agree up to sign.
        assert_eq!(h.det().unwrap().abs(), a.det().unwrap().abs());
    }

    #[test]
    fn primitive_normalizes_sign_and_gcd() {
        assert_eq!(primitive(&[-2, 4]), Some(vec![1, -2]));
        assert_eq!(primitive(&[0, 0]), None);
    }

    #[test]
    fn det_matches_float() {
        let a = IMat::from_rows(&[vec![3, -1, 2], vec![0, 2, 1], vec![1, 1, 1]]).unwrap();
        assert_eq!(a.det().unwrap(), 3 * (2 - 1) - (-1) * (0 - 1) + 2 * (0 - 2));
    }
}
