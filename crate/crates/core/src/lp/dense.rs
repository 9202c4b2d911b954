//! Small dense LU factorization with partial pivoting.
//!
//! Basis matrices here are desk-scale (tens of rows), so a plain dense
//! factorization recomputed per pivot is fast enough.

/// LU factors of a square matrix, PA = LU with row swaps in `swaps`.
pub struct Lu {
    n: usize,
    /// Row-major combined L (unit lower, below diagonal) and U.
    data: Vec<f64>,
    /// Row swap applied at each elimination step k: rows k <-> swaps[k].
    swaps: Vec<usize>,
}

impl Lu {
    /// Factor a row-major n x n matrix. Returns None when (numerically) singular.
    pub fn factor(mut data: Vec<f64>, n: usize) -> Option<Lu> {
        assert_eq!(data.len(), n * n);
        let mut swaps = vec![0usize; n];
        for k in 0..n {
            let mut piv = k;
            let mut max = data[k * n + k].abs();
            for i in (k + 1)..n {
                let v = data[i * n + k].abs();
                if v > max {
                    max = v;
                    piv = i;
                }
            }
            if max < 1e-12 {
                return None;
            }
            swaps[k] = piv;
            if piv != k {
                for j in 0..n {
                    data.swap(k * n + j, piv * n + j);
                }
            }
            let pivot = data[k * n + k];
            for i in (k + 1)..n {
                let factor = data[i * n + k] / pivot;
                data[i * n + k] = factor;
                if factor != 0.0 {
                    for j in (k + 1)..n {
                        data[i * n + j] -= factor * data[k * n + j];
                    }
                }
            }
        }
        Some(Lu { n, data, swaps })
    }

    /// Solve A x = b in place.
    pub fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        for k in 0..n {
            b.swap(k, self.swaps[k]);
        }
        // forward: L y = Pb
        for i in 1..n {
            let mut sum = b[i];
            for j in 0..i {
                sum -= self.data[i * n + j] * b[j];
            }
            b[i] = sum;
        }
        // backward: U x = y
        for i in (0..n).rev() {
            let mut sum = b[i];
            for j in (i + 1)..n {
                sum -= self.data[i * n + j] * b[j];
            }
            b[i] = sum / self.data[i * n + i];
        }
    }

    /// Solve A^T x = b in place.
    pub fn solve_transpose(&self, b: &mut [f64]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        // A^T = U^T L^T P, so solve U^T z = b, L^T w = z, x = P^T w.
        for i in 0..n {
            let mut sum = b[i];
            for j in 0..i {
                sum -= self.data[j * n + i] * b[j];
            }
            b[i] = sum / self.data[i * n + i];
        }
        for i in (0..n).rev() {
            let mut sum = b[i];
            for j in (i + 1)..n {
                sum -= self.data[j * n + i] * b[j];
            }
            b[i] = sum;
        }
        for k in (0..n).rev() {
            b.swap(k, self.swaps[k]);
        }
    }
}
