//! Unpreconditioned full-memory GMRES with residual history, a dense direct
//! solver for convergence studies, and extreme-singular-value estimation.
//!
//! GMRES uses modified Gram–Schmidt with one re-orthogonalization pass and
//! no restarts; every reduction runs in a fixed order, so iteration counts
//! are reproducible bit-for-bit on a given platform for any thread count.

use crate::assembly::SystemOp;
use crate::dense::{axpy, cdot, norm2, DenseC, DenseError, LuFactors};
use crate::sparse::CsrC;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("Arnoldi breakdown at iteration {at} with relative residual {residual:e}")]
    Breakdown { at: usize, residual: f64 },
    #[error("GMRES did not converge in {iterations} iterations (relative residual {residual:e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },
    #[error(transparent)]
    Dense(#[from] DenseError),
    #[error("direct solve residual {0:e} above tolerance")]
    DirectResidual(f64),
    #[error("inverse iteration failed: {0}")]
    InverseIteration(String),
}

/// Result of one solver run.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: Vec<Complex64>,
    pub iterations: usize,
    /// Relative residual after each iteration (non-increasing).
    pub residual_history: Vec<f64>,
    pub wall_time: std::time::Duration,
}

fn complex_givens(a: Complex64, b: Complex64) -> (f64, Complex64, Complex64) {
    // returns (c, s, r) with [c s; -conj(s) c][a; b] = [r; 0]
    let an = a.norm();
    let t = (an * an + b.norm_sqr()).sqrt();
    if t == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    }
    if an == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0), b);
    }
    let phase = a / an;
    (an / t, phase * b.conj() / t, phase * t)
}

/// Full (non-restarted) GMRES with zero initial guess: stops when
/// `‖b − Ax‖/‖b‖ < tol` or at `max_iter`.
pub fn gmres(
    op: &SystemOp,
    b: &[Complex64],
    tol: f64,
    max_iter: usize,
) -> Result<SolveReport, SolveError> {
    let start = std::time::Instant::now();
    let n = b.len();
    let b_norm = norm2(b);
    if b_norm == 0.0 {
        return Ok(SolveReport {
            solution: vec![Complex64::new(0.0, 0.0); n],
            iterations: 0,
            residual_history: Vec::new(),
            wall_time: start.elapsed(),
        });
    }
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(64);
    basis.push(b.iter().map(|v| v / b_norm).collect());
    // Hessenberg columns after Givens, rotation pairs, transformed rhs
    let mut h_cols: Vec<Vec<Complex64>> = Vec::with_capacity(64);
    let mut givens: Vec<(f64, Complex64)> = Vec::with_capacity(64);
    let mut g: Vec<Complex64> = vec![Complex64::new(b_norm, 0.0)];
    let mut history: Vec<f64> = Vec::with_capacity(64);

    let solve_current = |h_cols: &Vec<Vec<Complex64>>,
                         g: &Vec<Complex64>,
                         basis: &Vec<Vec<Complex64>>,
                         k: usize|
     -> Vec<Complex64> {
        // back-substitute R y = g over the first k columns
        let mut y = vec![Complex64::new(0.0, 0.0); k];
        for i in (0..k).rev() {
            let mut acc = g[i];
            for j in (i + 1)..k {
                acc -= h_cols[j][i] * y[j];
            }
            y[i] = acc / h_cols[i][i];
        }
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for (j, yj) in y.iter().enumerate() {
            axpy(*yj, &basis[j], &mut x);
        }
        x
    };

    for k in 0..max_iter {
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        op.apply(&basis[k], &mut w);
        let mut col: Vec<Complex64> = Vec::with_capacity(k + 2);
        for v in basis.iter() {
            let hik = cdot(v, &w);
            axpy(-hik, v, &mut w);
            col.push(hik);
        }
        // one re-orthogonalization pass
        for (i, v) in basis.iter().enumerate() {
            let c = cdot(v, &w);
            axpy(-c, v, &mut w);
            col[i] += c;
        }
        let h_sub = norm2(&w);
        // apply the accumulated rotations to the new column
        for (i, (c, s)) in givens.iter().enumerate() {
            let a = col[i];
            let b2 = col[i + 1];
            col[i] = *c * a + *s * b2;
            col[i + 1] = -s.conj() * a + *c * b2;
        }
        let (c, s, r) = complex_givens(col[k], Complex64::new(h_sub, 0.0));
        col[k] = r;
        givens.push((c, s));
        let gk = g[k];
        g[k] = c * gk;
        g.push(-s.conj() * gk);
        let rel = g[k + 1].norm() / b_norm;
        history.push(rel);
        h_cols.push(col);

        let breakdown = h_sub <= 1e-14 * b_norm;
        if rel < tol || (breakdown && rel < tol) {
            let x = solve_current(&h_cols, &g, &basis, k + 1);
            return Ok(SolveReport {
                solution: x,
                iterations: k + 1,
                residual_history: history,
                wall_time: start.elapsed(),
            });
        }
        if breakdown {
            return Err(SolveError::Breakdown {
                at: k + 1,
                residual: rel,
            });
        }
        let inv = 1.0 / h_sub;
        for v in w.iter_mut() {
            *v *= inv;
        }
        basis.push(w);
    }
    let rel = *history.last().unwrap();
    Err(SolveError::NotConverged {
        iterations: max_iter,
        residual: rel,
        history,
    })
}

/// Dense LU direct solve with a residual guarantee.
pub fn direct_solve(op: &SystemOp, b: &[Complex64]) -> Result<Vec<Complex64>, SolveError> {
    let csr = op.to_csr();
    let lu = LuFactors::factor(DenseC::from_csr(&csr))?;
    let x = lu.solve(b);
    let mut r = vec![Complex64::new(0.0, 0.0); b.len()];
    op.apply(&x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri -= bi;
    }
    let rel = norm2(&r) / norm2(b).max(1e-300);
    if rel > 1e-10 {
        return Err(SolveError::DirectResidual(rel));
    }
    Ok(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SvMode {
    Exact,
    Iterative,
}

/// Extreme singular values of a sparse complex matrix.
///
/// `Exact` runs a full Jacobi SVD (sizes up to 20000 are accepted, small
/// sizes are the practical use); `Iterative` runs power iteration on `AᴴA`
/// for `σ_max` and LU-based inverse iteration for `σ_min`, to a relative
/// tolerance of 1e-4 or better.
pub fn extreme_singular_values(m: &CsrC, mode: SvMode) -> Result<(f64, f64), SolveError> {
    let n = m.nrows();
    match mode {
        SvMode::Exact => {
            assert!(n <= 20_000, "exact mode limited to N <= 20000");
            let sv = crate::dense::singular_values_jacobi(&DenseC::from_csr(m));
            Ok((sv[0], sv[n - 1]))
        }
        SvMode::Iterative => {
            let mt = adjoint_csr(m);
            let sigma_max = power_iteration_sigma_max(m, &mt);
            let lu = LuFactors::factor(DenseC::from_csr(m)).map_err(|e| {
                SolveError::InverseIteration(format!("LU for inverse iteration: {e}"))
            })?;
            let sigma_min = inverse_iteration_sigma_min(&lu, n)?;
            Ok((sigma_max, sigma_min))
        }
    }
}

fn adjoint_csr(m: &CsrC) -> CsrC {
    let t = m.transpose();
    // conjugate entries
    let rows: Vec<Vec<(usize, Complex64)>> = (0..t.nrows())
        .map(|i| {
            let (cs, vs) = t.row(i);
            cs.iter().zip(vs).map(|(&c, v)| (c, v.conj())).collect()
        })
        .collect();
    CsrC::from_rows(t.ncols(), rows)
}

fn deterministic_start(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|i| {
            let t = (i as f64 + 1.0) * 0.7390851332151607;
            Complex64::new(t.sin(), (1.3 * t).cos())
        })
        .collect()
}

fn power_iteration_sigma_max(m: &CsrC, mt: &CsrC) -> f64 {
    let n = m.nrows();
    let mut v = deterministic_start(n);
    let nv = norm2(&v);
    for x in v.iter_mut() {
        *x /= nv;
    }
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    let mut est = 0.0f64;
    for _ in 0..5000 {
        m.matvec(&v, &mut w);
        let s = norm2(&w);
        mt.matvec(&w, &mut z);
        let zn = norm2(&z);
        if zn == 0.0 {
            return 0.0;
        }
        for (vi, zi) in v.iter_mut().zip(&z) {
            *vi = zi / zn;
        }
        if (s - est).abs() <= 1e-7 * s {
            return s;
        }
        est = s;
    }
    est
}

fn inverse_iteration_sigma_min(lu: &LuFactors, n: usize) -> Result<f64, SolveError> {
    let mut v = deterministic_start(n);
    let nv = norm2(&v);
    for x in v.iter_mut() {
        *x /= nv;
    }
    let mut est = 0.0f64;
    for _ in 0..5000 {
        // w = A^{-1} A^{-H} v  (one step of power iteration on (AᴴA)^{-1})
        let u = lu.solve_adjoint(&v);
        let w = lu.solve(&u);
        let wn = norm2(&w);
        if !wn.is_finite() || wn == 0.0 {
            return Err(SolveError::InverseIteration(
                "iteration vector vanished".into(),
            ));
        }
        let sigma = 1.0 / wn.sqrt();
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / wn;
        }
        if (sigma - est).abs() <= 1e-7 * sigma {
            return Ok(sigma);
        }
        est = sigma;
    }
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::Csr;

    fn csr_diag(vals: &[f64]) -> CsrC {
        let n = vals.len();
        let triplets: Vec<(usize, usize, Complex64)> = vals
            .iter()
            .enumerate()
            .map(|(i, &v)| (i, i, Complex64::new(v, 0.0)))
            .collect();
        Csr::from_triplets(n, n, &triplets)
    }

    #[test]
    fn gmres_identity_one_iteration() {
        let op = SystemOp::Csr(csr_diag(&[1.0; 8]));
        let b: Vec<Complex64> = (0..8).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let rep = gmres(&op, &b, 1e-12, 10).unwrap();
        assert_eq!(rep.iterations, 1);
        for (x, want) in rep.solution.iter().zip(&b) {
            assert!((x - want).norm() < 1e-12);
        }
    }

    #[test]
    fn gmres_diagonal_krylov_exactness() {
        let op = SystemOp::Csr(csr_diag(&[1.0, 2.0, 3.0, 4.0, 5.0]));
        let b = vec![Complex64::new(1.0, 0.0); 5];
        let rep = gmres(&op, &b, 1e-13, 10).unwrap();
        assert!(rep.iterations <= 5);
        for (i, x) in rep.solution.iter().enumerate() {
            assert!((x - Complex64::new(1.0 / (i as f64 + 1.0), 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn gmres_history_non_increasing() {
        // random complex matrix
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let n = 40;
        let mut triplets = Vec::new();
        for i in 0..n {
            for j in 0..n {
                triplets.push((
                    i,
                    j,
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                        + if i == j {
                            Complex64::new(8.0, 0.0)
                        } else {
                            Complex64::new(0.0, 0.0)
                        },
                ));
            }
        }
        let op = SystemOp::Csr(Csr::from_triplets(n, n, &triplets));
        let b: Vec<Complex64> = (0..n).map(|i| Complex64::new((i as f64).cos(), 0.3)).collect();
        let rep = gmres(&op, &b, 1e-11, 200).unwrap();
        for w in rep.residual_history.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
        // agreement with direct solve
        let x = direct_solve(&op, &b).unwrap();
        let diff: f64 = x
            .iter()
            .zip(&rep.solution)
            .map(|(a, b)| (a - b).norm())
            .sum::<f64>()
            / x.iter().map(|v| v.norm()).sum::<f64>();
        assert!(diff <= 1e-6, "direct vs gmres diff {diff}");
    }

    #[test]
    fn direct_solve_identity() {
        let op = SystemOp::Csr(csr_diag(&[1.0; 6]));
        let b: Vec<Complex64> = (0..6).map(|i| Complex64::new(1.0 + i as f64, -2.0)).collect();
        let x = direct_solve(&op, &b).unwrap();
        for (a, b) in x.iter().zip(&b) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn singular_values_diagonal() {
        let m = csr_diag(&[3.0, 1.0, 0.5]);
        let (hi, lo) = extreme_singular_values(&m, SvMode::Exact).unwrap();
        assert!((hi - 3.0).abs() < 1e-12);
        assert!((lo - 0.5).abs() < 1e-12);
        let (hi2, lo2) = extreme_singular_values(&m, SvMode::Iterative).unwrap();
        assert!((hi2 - 3.0).abs() < 1e-6);
        assert!((lo2 - 0.5).abs() < 1e-6);
    }

    #[test]
    fn singular_values_cross_mode_on_random_matrix() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let n = 120;
        let mut triplets = Vec::new();
        for i in 0..n {
            for j in 0..n {
                triplets.push((
                    i,
                    j,
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                ));
            }
        }
        let m = CsrC::from_triplets(n, n, &triplets);
        let (eh, el) = extreme_singular_values(&m, SvMode::Exact).unwrap();
        let (ih, il) = extreme_singular_values(&m, SvMode::Iterative).unwrap();
        assert!((eh - ih).abs() <= 1e-4 * eh, "{eh} vs {ih}");
        assert!((el - il).abs() <= 1e-4 * el, "{el} vs {il}");
    }

    #[test]
    fn gmres_not_converged_reports_history() {
        let op = SystemOp::Csr(csr_diag(&[1.0, 1e-8, 2.0, 3.0]));
        let b = vec![Complex64::new(1.0, 0.0); 4];
        match gmres(&op, &b, 1e-14, 2) {
            Err(SolveError::NotConverged {
                iterations,
                history,
                ..
            }) => {
                assert_eq!(iterations, 2);
                assert_eq!(history.len(), 2);
            }
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }
}
