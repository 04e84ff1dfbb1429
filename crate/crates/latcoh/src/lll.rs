//! Lenstra–Lenstra–Lovász reduction with an exact change of basis.
//!
//! Operates on row bases of full-rank real lattices.  The returned integer
//! transform `U` is unimodular and satisfies `U · B_in = B_out` exactly (as
//! an identity of integer row operations; the float basis is kept in sync).
//! We run at `δ = 0.99`, close to the optimal quality bound, since the
//! certified theta tails sharpen with shorter Gram–Schmidt vectors and the
//! lattices here are small (dimension ≤ 12 in practice).

use crate::error::{Error, Result};
use crate::linalg::{gso, Mat};
use crate::zmat::IMat;

/// Default Lovász parameter.
pub const LLL_DELTA: f64 = 0.99;

/// Result of reduction: `transform · (input basis) = basis`.
#[derive(Debug, Clone)]
pub struct LllResult {
    pub basis: Mat,
    pub transform: IMat,
}

/// LLL-reduce the rows of `b`.
pub fn lll_reduce(b: &Mat, delta: f64) -> Result<LllResult> {
    assert!((0.25..1.0).contains(&delta), "Lovász parameter out of range");
    let n = b.rows();
    let mut basis = b.to_rows();
    let mut u: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    if n <= 1 {
        return Ok(LllResult { basis: b.clone(), transform: IMat::identity(n) });
    }
    // η slightly above 1/2 avoids livelock from ties under rounding.
    let eta = 0.5 + 1e-9;
    let max_steps = 20_000 * n * n;
    let mut steps = 0usize;
    let mut k = 1usize;
    let (mut mu, mut bstar) = gso(&Mat::from_rows(&basis)?);
    while k < n {
        steps += 1;
        if steps > max_steps {
            return Err(Error::NonConvergent(
                "lattice reduction did not stabilize".into(),
            ));
        }
        // Size-reduce row k against rows k-1 .. 0.
        let mut changed = false;
        for j in (0..k).rev() {
            if mu[k][j].abs() > eta {
                let q = mu[k][j].round();
                let qi = q as i64;
                if q.abs() >= 9.0e15 {
                    return Err(Error::IntegerOverflow);
                }
                for t in 0..basis[0].len() {
                    basis[k][t] -= q * basis[j][t];
                }
                for t in 0..n {
                    u[k][t] = u[j][t]
                        .checked_mul(qi)
                        .and_then(|x| u[k][t].checked_sub(x))
                        .ok_or(Error::IntegerOverflow)?;
                }
                changed = true;
            }
        }
        if changed {
            let g = gso(&Mat::from_rows(&basis)?);
            mu = g.0;
            bstar = g.1;
        }
        if bstar[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * bstar[k - 1] {
            k += 1;
        } else {
            basis.swap(k, k - 1);
            u.swap(k, k - 1);
            let g = gso(&Mat::from_rows(&basis)?);
            mu = g.0;
            bstar = g.1;
            k = k.max(2) - 1;
        }
    }
    Ok(LllResult { basis: Mat::from_rows(&basis)?, transform: IMat::from_rows(&u)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm_sq;

    fn check_invariants(b0: &Mat, r: &LllResult, delta: f64) {
        // Unimodular transform that reproduces the reduced basis.
        assert_eq!(r.transform.det().unwrap().abs(), 1);
        let rebuilt = r.transform.mul_mat(b0);
        for i in 0..b0.rows() {
            for j in 0..b0.cols() {
                assert!(
                    (rebuilt.at(i, j) - r.basis.at(i, j)).abs() < 1e-6,
                    "row {i} col {j}"
                );
            }
        }
        // Lovász condition for every consecutive pair.
        let (mu, bstar) = gso(&r.basis);
        for k in 1..b0.rows() {
            assert!(
                bstar[k] + 1e-9 >= (delta - mu[k][k - 1] * mu[k][k - 1]) * bstar[k - 1],
                "Lovász fails at k = {k}"
            );
            for j in 0..k {
                assert!(mu[k][j].abs() <= 0.5 + 1e-6, "size reduction fails");
            }
        }
    }

    #[test]
    fn reduces_skewed_plane_basis() {
        let b0 = Mat::from_rows(&[vec![1.0, 0.0], vec![1000.0, 1.0]]).unwrap();
        let r = lll_reduce(&b0, LLL_DELTA).unwrap();
        check_invariants(&b0, &r, LLL_DELTA);
        // The reduced basis of Z² has unit vectors.
        let mut norms: Vec<f64> = (0..2).map(|i| norm_sq(r.basis.row(i))).collect();
        norms.sort_by(f64::total_cmp);
        assert!((norms[0] - 1.0).abs() < 1e-9);
        assert!((norms[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn reduces_random_unimodular_images() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for trial in 0..40 {
            let n = 2 + trial % 4;
            // Build a messy unimodular integer matrix by random shears.
            let mut m: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..n).map(|j| f64::from(i == j)).collect())
                .collect();
            for _ in 0..12 {
                let i = rng.gen_range(0..n);
                let mut j = rng.gen_range(0..n);
                if i == j {
                    j = (j + 1) % n;
                }
                let c = rng.gen_range(-4i64..=4) as f64;
                for t in 0..n {
                    let add = c * m[j][t];
                    m[i][t] += add;
                }
            }
            let b0 = Mat::from_rows(&m).unwrap();
            let r = lll_reduce(&b0, LLL_DELTA).unwrap();
            check_invariants(&b0, &r, LLL_DELTA);
            // Z^n recovered: all reduced vectors have norm 1.
            for i in 0..n {
                assert!((norm_sq(r.basis.row(i)) - 1.0).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn hexagonal_lattice_stays_put() {
        let b0 =
            Mat::from_rows(&[vec![1.0, 0.0], vec![0.5, 0.75f64.sqrt()]]).unwrap();
        let r = lll_reduce(&b0, LLL_DELTA).unwrap();
        check_invariants(&b0, &r, LLL_DELTA);
        assert!((norm_sq(r.basis.row(0)) - 1.0).abs() < 1e-9);
        assert!((norm_sq(r.basis.row(1)) - 1.0).abs() < 1e-9);
    }
}
