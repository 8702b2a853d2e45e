//! Dense small-matrix routines: Perron pairs of nonnegative matrices, Jacobi
//! eigendecomposition of symmetric matrices and strong-connectivity tests.

use crate::error::{Error, Result};
use crate::numeric::ksum;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    left: n,
                    right: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(SquareMatrix { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// `M v`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| ksum(self.row(i).iter().zip(v).map(|(a, b)| a * b)))
            .collect()
    }

    /// Largest absolute asymmetry `max |M_ij - M_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}

/// True iff the directed graph of positive entries is strongly connected.
pub fn is_irreducible(m: &SquareMatrix) -> bool {
    let n = m.dim();
    // Reachability closure of (I or A) by repeated boolean squaring.
    let mut reach: Vec<bool> = (0..n * n)
        .map(|k| k / n == k % n || m.data[k] > 0.0)
        .collect();
    let mut len = 1;
    while len < n {
        let mut next = vec![false; n * n];
        for i in 0..n {
            for k in 0..n {
                if reach[i * n + k] {
                    for j in 0..n {
                        next[i * n + j] |= reach[k * n + j];
                    }
                }
            }
        }
        reach = next;
        len *= 2;
    }
    reach.iter().all(|&b| b)
}

/// Perron root and unit 2-norm right eigenvector of an irreducible
/// nonnegative matrix.
///
/// Iterates the lazy map `(I + M) / 2`, which is primitive with the same
/// eigenvector, so periodic matrices converge too. Stops once the
/// Collatz-Wielandt bounds on the root agree within `tol`.
pub fn perron_pair(m: &SquareMatrix, tol: f64, max_iter: usize) -> Result<(f64, Vec<f64>)> {
    let n = m.dim();
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    for _ in 0..max_iter {
        let mv = m.mul_vec(&v);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            let r = mv[i] / v[i];
            lo = lo.min(r);
            hi = hi.max(r);
        }
        if hi - lo <= tol {
            let lambda = 0.5 * (lo + hi);
            return Ok((lambda, v));
        }
        let mut next: Vec<f64> = v.iter().zip(&mv).map(|(a, b)| 0.5 * (a + b)).collect();
        let norm = ksum(next.iter().map(|x| x * x)).sqrt();
        for x in &mut next {
            *x /= norm;
        }
        v = next;
    }
    Err(Error::NotConverged {
        iterations: max_iter,
    })
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues and the matching orthonormal eigenvectors.
pub fn jacobi_eigen(m: &SquareMatrix, tol: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = m.dim();
    let mut a = m.clone();
    let mut v = SquareMatrix::zeros(n);
    for i in 0..n {
        v.set(i, i, 1.0);
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a.get(i, j) * a.get(i, j))
            .sum::<f64>()
            .sqrt();
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    let values = (0..n).map(|i| a.get(i, i)).collect();
    let vectors = (0..n).map(|j| (0..n).map(|i| v.get(i, j)).collect()).collect();
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> SquareMatrix {
        SquareMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn irreducibility() {
        assert!(is_irreducible(&mat(&[&[0.0, 1.0], &[1.0, 0.0]])));
        assert!(!is_irreducible(&mat(&[&[1.0, 0.0], &[0.0, 1.0]])));
        assert!(!is_irreducible(&mat(&[&[0.5, 0.5], &[0.0, 1.0]])));
        // A 5-cycle needs paths of length 4.
        let mut cyc = SquareMatrix::zeros(5);
        for i in 0..5 {
            cyc.set(i, (i + 1) % 5, 1.0);
        }
        assert!(is_irreducible(&cyc));
    }

    #[test]
    fn perron_of_scaled_permutation() {
        let r = 0.5f64.sqrt();
        let (lambda, v) = perron_pair(&mat(&[&[0.0, r], &[r, 0.0]]), 1e-12, 1_000_000).unwrap();
        assert!((lambda - r).abs() < 1e-12);
        assert!((v[0] - v[1]).abs() < 1e-12);
    }

    #[test]
    fn perron_of_positive_matrix() {
        let (lambda, v) = perron_pair(&mat(&[&[2.0, 1.0], &[1.0, 3.0]]), 1e-13, 1_000_000).unwrap();
        let expected = (5.0 + 5f64.sqrt()) / 2.0;
        assert!((lambda - expected).abs() < 1e-11);
        assert!(v.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn jacobi_reconstructs() {
        let m = mat(&[&[2.0, 1.0, 0.5], &[1.0, 3.0, 0.2], &[0.5, 0.2, 1.0]]);
        let (vals, vecs) = jacobi_eigen(&m, 1e-14);
        for (lambda, v) in vals.iter().zip(&vecs) {
            let mv = m.mul_vec(v);
            for i in 0..3 {
                assert!((mv[i] - lambda * v[i]).abs() < 1e-10);
            }
        }
        let trace: f64 = vals.iter().sum();
        assert!((trace - 6.0).abs() < 1e-12);
    }
}
