//! Complex banded LU with partial pivoting, plus a small dense fallback.
//!
//! Storage follows the compact band convention: row i of `a` holds the matrix
//! elements A[i][i−m1 .. i+m2] with the diagonal in column m1. The
//! decomposition is the classic bandec/banbks pair generalized to complex
//! entries; pivot rows are kept inside the band so no extra fill-in storage
//! is needed.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Banded complex matrix with m1 subdiagonals and m2 superdiagonals.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    m1: usize,
    m2: usize,
    /// n x (m1 + m2 + 1), compact band storage.
    a: Vec<Complex64>,
}

impl BandMatrix {
    pub fn new(n: usize, m1: usize, m2: usize) -> Self {
        assert!(n > 0 && m1 < n && m2 < n);
        Self {
            n,
            m1,
            m2,
            a: vec![Complex64::new(0.0, 0.0); n * (m1 + m2 + 1)],
        }
    }

    fn width(&self) -> usize {
        self.m1 + self.m2 + 1
    }

    /// Adds v to A(i, j); panics if the entry falls outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: Complex64) {
        let off = j as isize - i as isize + self.m1 as isize;
        assert!(
            (0..self.width() as isize).contains(&off),
            "entry ({i},{j}) outside band m1={}, m2={}",
            self.m1,
            self.m2
        );
        let w = self.width();
        self.a[i * w + off as usize] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let off = j as isize - i as isize + self.m1 as isize;
        if (0..self.width() as isize).contains(&off) {
            self.a[i * self.width() + off as usize]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// Multiplies the stored matrix by x (used for residual checks).
    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![Complex64::new(0.0, 0.0); self.n];
        for i in 0..self.n {
            let j_lo = i.saturating_sub(self.m1);
            let j_hi = (i + self.m2).min(self.n - 1);
            let mut acc = Complex64::new(0.0, 0.0);
            for j in j_lo..=j_hi {
                acc += self.get(i, j) * x[j];
            }
            y[i] = acc;
        }
        y
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Solves A x = b. Consumes the band storage; callers keep a clone when
    /// a residual check is wanted.
    pub fn solve(mut self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let m1 = self.m1;
        let mm = self.width();
        let a = &mut self.a;
        let at = |i: usize, j: usize| i * mm + j;

        // Left-justify the top m1 rows so a[i][0] refers to the first stored
        // matrix column of each row.
        let mut l = m1;
        for i in 0..m1.min(n) {
            for j in (m1 - i)..mm {
                a[at(i, j - l)] = a[at(i, j)];
            }
            l -= 1;
            for j in (mm - l - 1)..mm {
                a[at(i, j)] = Complex64::new(0.0, 0.0);
            }
        }

        let mut al = vec![Complex64::new(0.0, 0.0); n * m1.max(1)];
        let mut indx = vec![0usize; n];

        // LU decomposition, pivoting among the m1 rows below the diagonal.
        let mut l = m1;
        for k in 0..n {
            if l < n {
                l += 1;
            }
            let mut piv = k;
            let mut piv_mag = a[at(k, 0)].norm();
            for j in (k + 1)..l {
                let mag = a[at(j, 0)].norm();
                if mag > piv_mag {
                    piv_mag = mag;
                    piv = j;
                }
            }
            indx[k] = piv;
            if piv_mag == 0.0 {
                return Err(Error::SingularSystem(format!(
                    "zero pivot at elimination step {k}"
                )));
            }
            if piv != k {
                for j in 0..mm {
                    a.swap(at(k, j), at(piv, j));
                }
            }
            for i in (k + 1)..l {
                let dum = a[at(i, 0)] / a[at(k, 0)];
                al[k * m1.max(1) + (i - k - 1)] = dum;
                for j in 1..mm {
                    a[at(i, j - 1)] = a[at(i, j)] - dum * a[at(k, j)];
                }
                a[at(i, mm - 1)] = Complex64::new(0.0, 0.0);
            }
        }

        // Forward substitution.
        let mut x = b.to_vec();
        let mut l = m1;
        for k in 0..n {
            let j = indx[k];
            if j != k {
                x.swap(k, j);
            }
            if l < n {
                l += 1;
            }
            for i in (k + 1)..l {
                let dum = al[k * m1.max(1) + (i - k - 1)];
                let xk = x[k];
                x[i] -= dum * xk;
            }
        }

        // Back substitution.
        let mut l = 1usize;
        for i in (0..n).rev() {
            let mut acc = x[i];
            for k in 1..l {
                acc -= a[at(i, k)] * x[i + k];
            }
            x[i] = acc / a[at(i, 0)];
            if l < mm {
                l += 1;
            }
        }
        Ok(x)
    }
}

/// Dense complex Gaussian elimination with partial pivoting. Used for small
/// systems and as an independent check on the banded path.
pub fn solve_dense(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Result<Vec<Complex64>> {
    let n = a.len();
    assert!(a.iter().all(|row| row.len() == n) && b.len() == n);
    for k in 0..n {
        let mut piv = k;
        let mut piv_mag = a[k][k].norm();
        for i in (k + 1)..n {
            if a[i][k].norm() > piv_mag {
                piv_mag = a[i][k].norm();
                piv = i;
            }
        }
        if piv_mag == 0.0 {
            return Err(Error::SingularSystem(format!("zero pivot in column {k}")));
        }
        if piv != k {
            a.swap(k, piv);
            b.swap(k, piv);
        }
        for i in (k + 1)..n {
            let f = a[i][k] / a[k][k];
            if f.norm() == 0.0 {
                continue;
            }
            for j in k..n {
                let akj = a[k][j];
                a[i][j] -= f * akj;
            }
            let bk = b[k];
            b[i] -= f * bk;
        }
    }
    for k in (0..n).rev() {
        let mut acc = b[k];
        for j in (k + 1)..n {
            acc -= a[k][j] * b[j];
        }
        b[k] = acc / a[k][k];
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_band(
        rng: &mut ChaCha8Rng,
        n: usize,
        m1: usize,
        m2: usize,
    ) -> (BandMatrix, Vec<Vec<Complex64>>) {
        let mut band = BandMatrix::new(n, m1, m2);
        let mut dense = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for i in 0..n {
            let j_lo = i.saturating_sub(m1);
            let j_hi = (i + m2).min(n - 1);
            for j in j_lo..=j_hi {
                let v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                band.add(i, j, v);
                dense[i][j] = v;
            }
            // keep the diagonal dominant enough to stay well-conditioned
            let boost = Complex64::new(3.0 + rng.gen_range(0.0..1.0), 0.0);
            band.add(i, i, boost);
            dense[i][i] += boost;
        }
        (band, dense)
    }

    #[test]
    fn banded_matches_dense_on_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for &(n, m1, m2) in &[
            (1, 0, 0),
            (4, 1, 1),
            (8, 5, 5),
            (37, 5, 5),
            (64, 3, 6),
            (9, 0, 4),
        ] {
            let (band, dense) = random_band(&mut rng, n, m1, m2);
            let b: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let x_band = band.clone().solve(&b).unwrap();
            let x_dense = solve_dense(dense, b.clone()).unwrap();
            for (xb, xd) in x_band.iter().zip(&x_dense) {
                assert!(
                    (xb - xd).norm() < 1e-10,
                    "banded vs dense mismatch for n={n}, m1={m1}, m2={m2}"
                );
            }
            // residual against the retained band copy
            let r = band.mul_vec(&x_band);
            for (ri, bi) in r.iter().zip(&b) {
                assert!((ri - bi).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn banded_handles_pivoting() {
        // Zero on the first diagonal entry forces an immediate row swap.
        let mut band = BandMatrix::new(3, 1, 1);
        band.add(0, 1, Complex64::new(1.0, 0.0));
        band.add(1, 0, Complex64::new(2.0, 0.0));
        band.add(1, 1, Complex64::new(1.0, 1.0));
        band.add(1, 2, Complex64::new(0.5, 0.0));
        band.add(2, 1, Complex64::new(-1.0, 0.0));
        band.add(2, 2, Complex64::new(3.0, 0.0));
        let b = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(2.0, -1.0),
        ];
        let x = band.clone().solve(&b).unwrap();
        let r = band.mul_vec(&x);
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).norm() < 1e-12);
        }
    }

    #[test]
    fn singular_system_is_reported() {
        let mut band = BandMatrix::new(2, 1, 1);
        band.add(0, 0, Complex64::new(1.0, 0.0));
        band.add(0, 1, Complex64::new(1.0, 0.0));
        band.add(1, 0, Complex64::new(1.0, 0.0));
        band.add(1, 1, Complex64::new(1.0, 0.0));
        let b = vec![Complex64::new(1.0, 0.0); 2];
        assert!(band.solve(&b).is_err());
    }

    #[test]
    fn large_banded_system_stays_accurate() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let (band, _) = random_band(&mut rng, 4100, 5, 5);
        let x_true: Vec<Complex64> = (0..4100)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let b = band.mul_vec(&x_true);
        let x = band.clone().solve(&b).unwrap();
        let err = x
            .iter()
            .zip(&x_true)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-9, "max error {err}");
    }
}
