//! Dense complex linear algebra: LU with partial pivoting (with adjoint
//! solves off one factorization), one-sided Jacobi SVD, a real symmetric
//! Jacobi eigensolver, and deterministic vector kernels.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DenseError {
    #[error("matrix is numerically singular at column {0}")]
    Singular(usize),
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone)]
pub struct DenseC {
    pub n_rows: usize,
    pub n_cols: usize,
    pub data: Vec<Complex64>,
}

impl DenseC {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        DenseC {
            n_rows,
            n_cols,
            data: vec![Complex64::new(0.0, 0.0); n_rows * n_cols],
        }
    }

    pub fn from_csr(m: &crate::sparse::CsrC) -> Self {
        let mut out = Self::zeros(m.nrows(), m.ncols());
        for (i, j, v) in m.iter_triplets() {
            out.data[i * m.ncols() + j] = v;
        }
        out
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n_cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n_cols + j] = v;
    }

    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.par_iter_mut().enumerate().for_each(|(i, out)| {
            let row = &self.data[i * self.n_cols..(i + 1) * self.n_cols];
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, b) in row.iter().zip(x) {
                acc += a * b;
            }
            *out = acc;
        });
    }
}

/// LU factorization with partial pivoting, `P A = L U`.
pub struct LuFactors {
    n: usize,
    /// Combined L (unit lower, below diagonal) and U (upper) storage.
    lu: Vec<Complex64>,
    /// Row swapped with row `k` at step `k`.
    swaps: Vec<usize>,
}

impl LuFactors {
    /// Factors the matrix (consumed). Errors on a zero pivot column.
    pub fn factor(mut a: DenseC) -> Result<LuFactors, DenseError> {
        assert_eq!(a.n_rows, a.n_cols);
        let n = a.n_rows;
        let mut swaps = vec![0usize; n];
        for k in 0..n {
            // pivot search
            let (mut best, mut best_abs) = (k, a.at(k, k).norm());
            for i in (k + 1)..n {
                let v = a.at(i, k).norm();
                if v > best_abs {
                    best = i;
                    best_abs = v;
                }
            }
            if best_abs == 0.0 || !best_abs.is_finite() {
                return Err(DenseError::Singular(k));
            }
            swaps[k] = best;
            if best != k {
                for j in 0..n {
                    let t = a.at(k, j);
                    a.set(k, j, a.at(best, j));
                    a.set(best, j, t);
                }
            }
            let inv_piv = 1.0 / a.at(k, k);
            // split storage at the pivot row to update the trailing block
            let (head, tail) = a.data.split_at_mut((k + 1) * n);
            let pivot_row = &head[k * n..(k + 1) * n];
            tail.par_chunks_mut(n).for_each(|row| {
                let l = row[k] * inv_piv;
                row[k] = l;
                if l != Complex64::new(0.0, 0.0) {
                    for j in (k + 1)..n {
                        row[j] -= l * pivot_row[j];
                    }
                }
            });
        }
        Ok(LuFactors {
            n,
            lu: a.data,
            swaps,
        })
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.swaps[k]);
        }
        // forward: L y = Pb (unit diagonal)
        for i in 1..n {
            let mut acc = x[i];
            let row = &self.lu[i * n..i * n + i];
            for (j, l) in row.iter().enumerate() {
                acc -= l * x[j];
            }
            x[i] = acc;
        }
        // backward: U x = y
        for i in (0..n).rev() {
            let mut acc = x[i];
            let row = &self.lu[i * n..(i + 1) * n];
            for j in (i + 1)..n {
                acc -= row[j] * x[j];
            }
            x[i] = acc / row[i];
        }
        x
    }

    /// Solves `Aᴴ x = b` using the same factorization:
    /// `Aᴴ = Uᴴ Lᴴ P`, so solve `Uᴴ v = b`, `Lᴴ w = v`, then un-permute.
    pub fn solve_adjoint(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x = b.to_vec();
        // forward: U^H v = b (U^H is lower triangular)
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[j * n + i].conj() * x[j];
            }
            x[i] = acc / self.lu[i * n + i].conj();
        }
        // backward: L^H w = v (unit upper triangular)
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in (i + 1)..n {
                acc -= self.lu[j * n + i].conj() * x[j];
            }
            x[i] = acc;
        }
        // x = P^T w: undo the swaps in reverse order
        for k in (0..n).rev() {
            x.swap(k, self.swaps[k]);
        }
        x
    }
}

/// Full singular values by one-sided (Hestenes) Jacobi on columns.
/// Suitable for the modest sizes of the exact mode.
pub fn singular_values_jacobi(a: &DenseC) -> Vec<f64> {
    let (m, n) = (a.n_rows, a.n_cols);
    // column-major working copy
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..m).map(|i| a.at(i, j)).collect())
        .collect();
    let tol = 1e-28;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (mut app, mut aqq) = (0.0f64, 0.0f64);
                let mut apq = Complex64::new(0.0, 0.0);
                for i in 0..m {
                    app += cols[p][i].norm_sqr();
                    aqq += cols[q][i].norm_sqr();
                    apq += cols[p][i].conj() * cols[q][i];
                }
                if apq.norm_sqr() <= tol * app * aqq {
                    continue;
                }
                rotated = true;
                let phase = apq / apq.norm();
                let zeta = (aqq - app) / (2.0 * apq.norm());
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let vp = cols[p][i];
                    let vq = cols[q][i];
                    cols[p][i] = c * vp - s * phase.conj() * vq;
                    cols[q][i] = s * phase * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|col| col.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// All eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(mat: &[Vec<f64>]) -> Vec<f64> {
    let n = mat.len();
    let mut a: Vec<Vec<f64>> = mat.to_vec();
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off.sqrt() < 1e-13 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

// ---------------------------------------------------------------------------
// deterministic vector kernels: fixed chunking, sequential partial reduction
// ---------------------------------------------------------------------------

const CHUNK: usize = 4096;

/// Conjugating dot product `aᴴ b`, bitwise reproducible for any thread count.
pub fn cdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    assert_eq!(a.len(), b.len());
    if a.len() < 2 * CHUNK {
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, y) in a.iter().zip(b) {
            acc += x.conj() * y;
        }
        return acc;
    }
    let partials: Vec<Complex64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(ca, cb)| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (x, y) in ca.iter().zip(cb) {
                acc += x.conj() * y;
            }
            acc
        })
        .collect();
    partials.into_iter().fold(Complex64::new(0.0, 0.0), |a, b| a + b)
}

pub fn norm2(a: &[Complex64]) -> f64 {
    cdot(a, a).re.max(0.0).sqrt()
}

/// `y += alpha x`.
pub fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    if x.len() < 2 * CHUNK {
        for (xi, yi) in x.iter().zip(y.iter_mut()) {
            *yi += alpha * xi;
        }
        return;
    }
    y.par_chunks_mut(CHUNK)
        .zip(x.par_chunks(CHUNK))
        .for_each(|(cy, cx)| {
            for (yi, xi) in cy.iter_mut().zip(cx) {
                *yi += alpha * xi;
            }
        });
}

pub fn scale_in_place(alpha: f64, y: &mut [Complex64]) {
    for v in y.iter_mut() {
        *v *= alpha;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_dense(n: usize, seed: u64) -> DenseC {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut a = DenseC::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a.set(
                    i,
                    j,
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                );
            }
        }
        a
    }

    #[test]
    fn lu_solve_and_adjoint() {
        let n = 60;
        let a = random_dense(n, 7);
        let lu = LuFactors::factor(a.clone()).unwrap();
        let b: Vec<Complex64> = (0..n).map(|i| Complex64::new(i as f64, -1.0)).collect();
        let x = lu.solve(&b);
        let mut r = vec![Complex64::new(0.0, 0.0); n];
        a.matvec(&x, &mut r);
        let res: f64 = r.iter().zip(&b).map(|(u, v)| (u - v).norm()).sum();
        assert!(res < 1e-9, "residual {res}");
        // adjoint: A^H y = b
        let y = lu.solve_adjoint(&b);
        let mut r2 = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += a.at(j, i).conj() * y[j];
            }
            r2[i] = acc;
        }
        let res2: f64 = r2.iter().zip(&b).map(|(u, v)| (u - v).norm()).sum();
        assert!(res2 < 1e-9, "adjoint residual {res2}");
    }

    #[test]
    fn singular_matrix_detected() {
        let mut a = DenseC::zeros(3, 3);
        a.set(0, 0, Complex64::new(1.0, 0.0));
        a.set(1, 1, Complex64::new(1.0, 0.0));
        // third row/col zero
        assert!(matches!(
            LuFactors::factor(a),
            Err(DenseError::Singular(_))
        ));
    }

    #[test]
    fn jacobi_svd_diag() {
        let mut a = DenseC::zeros(3, 3);
        a.set(0, 0, Complex64::new(3.0, 0.0));
        a.set(1, 1, Complex64::new(1.0, 0.0));
        a.set(2, 2, Complex64::new(0.5, 0.0));
        let sv = singular_values_jacobi(&a);
        assert!((sv[0] - 3.0).abs() < 1e-12);
        assert!((sv[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn jacobi_svd_unitary_invariance() {
        // singular values of [[0, 2i], [1, 0]] are 2 and 1
        let mut a = DenseC::zeros(2, 2);
        a.set(0, 1, Complex64::new(0.0, 2.0));
        a.set(1, 0, Complex64::new(1.0, 0.0));
        let sv = singular_values_jacobi(&a);
        assert!((sv[0] - 2.0).abs() < 1e-13);
        assert!((sv[1] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn symmetric_jacobi_eigen() {
        let m = vec![
            vec![2.0, 1.0, 0.0],
            vec![1.0, 2.0, 1.0],
            vec![0.0, 1.0, 2.0],
        ];
        let ev = symmetric_eigenvalues(&m);
        let want = [2.0 - 2f64.sqrt(), 2.0, 2.0 + 2f64.sqrt()];
        for (a, b) in ev.iter().zip(&want) {
            assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn deterministic_dot() {
        let n = 3 * CHUNK + 17;
        let a: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64).cos()))
            .collect();
        let d1 = cdot(&a, &a);
        let d2 = cdot(&a, &a);
        assert_eq!(d1, d2);
    }
}
