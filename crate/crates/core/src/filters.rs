//! Matrix masks and coefficient-level filter-bank checks: perfect
//! reconstruction, lowpass moment conditions, and sum rules with matching
//! filters.
//!
//! All frequency-domain conditions are evaluated through tap-moment algebra
//! (derivatives of the symbol at 0 and π are finite signed sums of taps), so
//! no condition is ever checked by sampling the frequency variable.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FilterError {
    #[error("mask dimension mismatch: {0}x{0} vs {1}x{1}")]
    DimensionMismatch(usize, usize),
    #[error("matching-filter jets missing or too short: need {need}, have {have}")]
    MissingJets { need: usize, have: usize },
}

/// Finitely supported sequence of `r × r` real matrices.
#[derive(Debug, Clone)]
pub struct Mask {
    /// Support `[lo, hi]`; taps outside are implicitly zero.
    lo: i64,
    /// `taps[i]` is the matrix at `k = lo + i`, row-major.
    taps: Vec<Vec<f64>>,
    r: usize,
}

impl Mask {
    pub fn new(lo: i64, r: usize, taps: Vec<Vec<f64>>) -> Self {
        assert!(r >= 1 && r <= 3);
        assert!(taps.iter().all(|t| t.len() == r * r));
        Mask { lo, taps, r }
    }

    pub fn dim(&self) -> usize {
        self.r
    }

    pub fn support(&self) -> (i64, i64) {
        (self.lo, self.lo + self.taps.len() as i64 - 1)
    }

    /// Tap matrix at integer `k` (zero outside support), row-major.
    pub fn tap(&self, k: i64) -> Option<&[f64]> {
        let idx = k - self.lo;
        if idx < 0 || idx as usize >= self.taps.len() {
            None
        } else {
            Some(&self.taps[idx as usize])
        }
    }

    pub fn entry(&self, k: i64, row: usize, col: usize) -> f64 {
        self.tap(k).map_or(0.0, |t| t[row * self.r + col])
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &[f64])> {
        self.taps
            .iter()
            .enumerate()
            .map(move |(i, t)| (self.lo + i as i64, t.as_slice()))
    }

    /// Sum of all tap entries (transcription checksum).
    pub fn entry_sum(&self) -> f64 {
        self.taps.iter().flat_map(|t| t.iter()).sum()
    }

    /// `d^m/dξ^m  â(ξ) |_{ξ=0 or π}` as an `r × r` complex matrix:
    /// `Σ_k a(k)(−ik)^m (·(−1)^k at π)`.
    pub fn symbol_derivative(&self, m: usize, at_pi: bool) -> Vec<Complex64> {
        let r = self.r;
        let mut out = vec![Complex64::new(0.0, 0.0); r * r];
        for (k, t) in self.iter() {
            let mut c = Complex64::new(0.0, -(k as f64)).powu(m as u32);
            if at_pi && k.rem_euclid(2) == 1 {
                c = -c;
            }
            for (o, v) in out.iter_mut().zip(t.iter()) {
                *o += c * v;
            }
        }
        out
    }
}

/// Derivative jets of a matching filter's symbol at `ξ = 0`:
/// `jets[j]` is the `1 × r` row `v̂^{(j)}(0)`.
#[derive(Debug, Clone)]
pub struct MatchingJets {
    pub primal: Vec<Vec<Complex64>>,
    pub dual: Vec<Vec<Complex64>>,
}

/// The quadruple of masks of one biorthogonal family, together with the
/// moment data its checks need.
#[derive(Debug, Clone)]
pub struct FilterBank {
    pub family_id: String,
    pub a: Mask,
    pub b: Mask,
    pub a_dual: Mask,
    pub b_dual: Mask,
    /// `φ̂(0)` — the component integrals of the refinable vector.
    pub phi_hat0: Vec<f64>,
    /// `φ̃̂(0)` for the dual side.
    pub phi_dual_hat0: Vec<f64>,
    /// Sum-rule order claimed for both sides (`sr(a) = sr(ã)` in all families).
    pub sum_rule_order: usize,
    pub matching_filters: Option<MatchingJets>,
}

/// Residuals of the lowpass/highpass moment conditions at `ξ = 0`.
#[derive(Debug, Clone, Copy)]
pub struct MomentConditionReport {
    /// `|â(0) φ̂(0) − φ̂(0)|_∞` — eigenvector condition.
    pub eigen_primal: f64,
    /// Same for the dual mask.
    pub eigen_dual: f64,
    /// `|b̂(0) φ̂(0)|_∞` — one vanishing moment of ψ.
    pub highpass_primal: f64,
    /// `|b̃̂(0) φ̃̂(0)|_∞`.
    pub highpass_dual: f64,
    /// `|φ̂(0)ᵀ φ̃̂(0) − 1|` — normalization pairing.
    pub pairing: f64,
}

impl MomentConditionReport {
    pub fn max(&self) -> f64 {
        self.eigen_primal
            .max(self.eigen_dual)
            .max(self.highpass_primal)
            .max(self.highpass_dual)
            .max(self.pairing)
    }
}

impl FilterBank {
    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// Expands the 2r×2r perfect-reconstruction identity into Laurent
    /// coefficient equations and returns the max absolute residual.
    ///
    /// For even `n` the identity requires
    /// `2 Σ_k x̃(k) y(k−n)ᵀ = δ_{n0} δ_{x̃ỹ-paired} I_r`
    /// for all four mask pairs; odd-`n` coefficients cancel structurally.
    pub fn perfect_reconstruction_residual(&self) -> Result<f64, FilterError> {
        let r = self.a.dim();
        for m in [&self.b, &self.a_dual, &self.b_dual] {
            if m.dim() != r {
                return Err(FilterError::DimensionMismatch(r, m.dim()));
            }
        }
        let pairs: [(&Mask, &Mask, bool); 4] = [
            (&self.a_dual, &self.a, true),
            (&self.b_dual, &self.b, true),
            (&self.a_dual, &self.b, false),
            (&self.b_dual, &self.a, false),
        ];
        let mut worst = 0.0f64;
        for (xt, y, diag) in pairs {
            let (xlo, xhi) = xt.support();
            let (ylo, yhi) = y.support();
            let nlo = xlo - yhi;
            let nhi = xhi - ylo;
            let mut n = nlo + nlo.rem_euclid(2); // round up to even
            while n <= nhi {
                for i in 0..r {
                    for j in 0..r {
                        let mut s = 0.0;
                        for (k, t) in xt.iter() {
                            if let Some(u) = y.tap(k - n) {
                                for m in 0..r {
                                    s += t[i * r + m] * u[j * r + m];
                                }
                            }
                        }
                        let want = if diag && n == 0 && i == j { 1.0 } else { 0.0 };
                        worst = worst.max((2.0 * s - want).abs());
                    }
                }
                n += 2;
            }
        }
        Ok(worst)
    }

    /// Residuals of the ξ=0 moment conditions (eigenvector, highpass
    /// annihilation, normalization pairing).
    pub fn lowpass_moment_conditions(&self) -> MomentConditionReport {
        let r = self.dim();
        let apply0 = |m: &Mask, v: &[f64]| -> Vec<f64> {
            // â(0) v = (Σ_k a(k)) v
            let mut out = vec![0.0; r];
            for (_, t) in m.iter() {
                for i in 0..r {
                    for j in 0..r {
                        out[i] += t[i * r + j] * v[j];
                    }
                }
            }
            out
        };
        let inf = |v: &[f64]| v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let sub = |a: &[f64], b: &[f64]| -> Vec<f64> {
            a.iter().zip(b).map(|(x, y)| x - y).collect()
        };
        let eigen_primal = inf(&sub(&apply0(&self.a, &self.phi_hat0), &self.phi_hat0));
        let eigen_dual = inf(&sub(
            &apply0(&self.a_dual, &self.phi_dual_hat0),
            &self.phi_dual_hat0,
        ));
        let highpass_primal = inf(&apply0(&self.b, &self.phi_hat0));
        let highpass_dual = inf(&apply0(&self.b_dual, &self.phi_dual_hat0));
        let pairing = (self
            .phi_hat0
            .iter()
            .zip(&self.phi_dual_hat0)
            .map(|(x, y)| x * y)
            .sum::<f64>()
            - 1.0)
            .abs();
        MomentConditionReport {
            eigen_primal,
            eigen_dual,
            highpass_primal,
            highpass_dual,
            pairing,
        }
    }
}

/// Checks order-`m` sum rules of `mask` against matching-filter jets:
/// `[v̂(2·)â]^{(j)}(0) = v̂^{(j)}(0)` and `[v̂(2·)â(·+π)]^{(j)}(0) = 0`
/// for `j = 0..m−1`, via the Leibniz rule over tap moments. Returns the
/// max residual.
pub fn sum_rule_order(mask: &Mask, jets: &[Vec<Complex64>], m: usize) -> Result<f64, FilterError> {
    if jets.len() < m {
        return Err(FilterError::MissingJets {
            need: m,
            have: jets.len(),
        });
    }
    let r = mask.dim();
    let mut worst = 0.0f64;
    for j in 0..m {
        for at_pi in [false, true] {
            let mut acc = vec![Complex64::new(0.0, 0.0); r];
            let mut binom = 1.0f64;
            for n in 0..=j {
                let deriv = mask.symbol_derivative(j - n, at_pi);
                let factor = binom * (2.0f64).powi(n as i32);
                for col in 0..r {
                    let mut s = Complex64::new(0.0, 0.0);
                    for row in 0..r {
                        s += jets[n][row] * deriv[row * r + col];
                    }
                    acc[col] += factor * s;
                }
                binom = binom * ((j - n) as f64) / ((n + 1) as f64);
            }
            for col in 0..r {
                let want = if at_pi {
                    Complex64::new(0.0, 0.0)
                } else {
                    jets[j][col]
                };
                worst = worst.max((acc[col] - want).norm());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn haar() -> FilterBank {
        let half = |signs: [f64; 2]| vec![vec![0.5 * signs[0]], vec![0.5 * signs[1]]];
        FilterBank {
            family_id: "haar".into(),
            a: Mask::new(0, 1, half([1.0, 1.0])),
            b: Mask::new(0, 1, half([1.0, -1.0])),
            a_dual: Mask::new(0, 1, half([1.0, 1.0])),
            b_dual: Mask::new(0, 1, half([1.0, -1.0])),
            phi_hat0: vec![1.0],
            phi_dual_hat0: vec![1.0],
            sum_rule_order: 1,
            matching_filters: None,
        }
    }

    #[test]
    fn haar_perfect_reconstruction() {
        assert_eq!(haar().perfect_reconstruction_residual().unwrap(), 0.0);
    }

    #[test]
    fn haar_moment_conditions() {
        let rep = haar().lowpass_moment_conditions();
        assert_eq!(rep.max(), 0.0);
    }

    #[test]
    fn haar_sum_rule_with_trivial_jets() {
        let jets = vec![vec![Complex64::new(1.0, 0.0)]];
        let res = sum_rule_order(&haar().a, &jets, 1).unwrap();
        assert!(res <= 1e-15);
    }

    #[test]
    fn missing_jets_is_an_error() {
        let jets = vec![vec![Complex64::new(1.0, 0.0)]];
        assert!(matches!(
            sum_rule_order(&haar().a, &jets, 2),
            Err(FilterError::MissingJets { need: 2, have: 1 })
        ));
    }
}
