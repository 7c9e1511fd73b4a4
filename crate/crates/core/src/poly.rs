//! Exact arithmetic-on-functions layer: every 1D basis function is a vector
//! of polynomial pieces on dyadic-rational breakpoints.
//!
//! Pieces store coefficients in the local monomial basis `(x − left)^k`
//! (better conditioned at fine levels than global monomials). Values are
//! right-continuous at breakpoints and identically zero outside the support.

use crate::dyadic::Dyadic;

/// Highest polynomial degree a basis function may carry (all families are
/// splines of degree ≤ 3).
pub const MAX_DEGREE: usize = 3;

/// Piecewise polynomial on strictly increasing dyadic breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePolynomial {
    /// `n+1` sorted breakpoints for `n` pieces.
    breaks: Vec<Dyadic>,
    /// Per-piece coefficients in powers of `(x − left)`.
    pieces: Vec<Vec<f64>>,
}

/// Vector-valued refinable function or wavelet: `r` scalar components that
/// share a refinement scale.
#[derive(Debug, Clone)]
pub struct VectorFunction {
    pub components: Vec<PiecewisePolynomial>,
}

fn poly_eval(coeffs: &[f64], t: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * t + c;
    }
    acc
}

fn poly_scale(coeffs: &[f64], s: f64) -> Vec<f64> {
    coeffs.iter().map(|c| c * s).collect()
}

/// Re-centers `p(x)` given in powers of `(x − a)` into powers of `(x − b)`:
/// substitute `x − b = (x − a) − (a... ` i.e. `t_old = t_new + (b − a)`.
fn poly_recenter(coeffs: &[f64], shift: f64) -> Vec<f64> {
    // coefficients of q(t) = p(t + shift)
    let n = coeffs.len();
    let mut out = vec![0.0; n];
    let mut binom = vec![0.0; n];
    for (k, &c) in coeffs.iter().enumerate() {
        // c * (t + shift)^k
        binom[0] = 1.0;
        let mut pow = 1.0;
        for j in 0..=k {
            if j > 0 {
                // C(k, j) built incrementally
                binom[j] = binom[j - 1] * ((k - j + 1) as f64) / (j as f64);
            }
        }
        for j in (0..=k).rev() {
            out[j] += c * binom[j] * pow;
            pow *= shift;
        }
    }
    out
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `∫_0^h p(t) dt` for local coefficients.
fn poly_integral(coeffs: &[f64], h: f64) -> f64 {
    let mut acc = 0.0;
    for (k, &c) in coeffs.iter().enumerate().rev() {
        acc = acc * h + c / (k + 1) as f64;
    }
    acc * h
}

impl PiecewisePolynomial {
    /// Builds from breakpoints and local-basis pieces.
    ///
    /// Panics if breakpoints are not strictly increasing, the piece count is
    /// off by one, or any piece exceeds [`MAX_DEGREE`].
    pub fn new(breaks: Vec<Dyadic>, pieces: Vec<Vec<f64>>) -> Self {
        assert!(breaks.len() >= 2, "need at least one piece");
        assert_eq!(breaks.len(), pieces.len() + 1, "pieces/breakpoints mismatch");
        for w in breaks.windows(2) {
            assert!(w[0] < w[1], "breakpoints must be strictly increasing");
        }
        for p in &pieces {
            assert!(!p.is_empty() && p.len() <= MAX_DEGREE + 1, "degree bound exceeded");
        }
        PiecewisePolynomial { breaks, pieces }
    }

    /// The zero function on `[0, 1]`.
    pub fn zero() -> Self {
        PiecewisePolynomial {
            breaks: vec![Dyadic::ZERO, Dyadic::ONE],
            pieces: vec![vec![0.0]],
        }
    }

    pub fn breakpoints(&self) -> &[Dyadic] {
        &self.breaks
    }

    pub fn piece_coeffs(&self, i: usize) -> &[f64] {
        &self.pieces[i]
    }

    pub fn num_pieces(&self) -> usize {
        self.pieces.len()
    }

    pub fn degree_bound(&self) -> usize {
        self.pieces.iter().map(|p| p.len() - 1).max().unwrap_or(0)
    }

    /// Support as `(first, last)` breakpoints.
    pub fn support(&self) -> (Dyadic, Dyadic) {
        (self.breaks[0], *self.breaks.last().unwrap())
    }

    pub fn support_f64(&self) -> (f64, f64) {
        (self.breaks[0].to_f64(), self.breaks.last().unwrap().to_f64())
    }

    fn piece_index(&self, x: f64) -> Option<usize> {
        let lo = self.breaks[0].to_f64();
        let hi = self.breaks.last().unwrap().to_f64();
        if x < lo || x >= hi {
            return None;
        }
        // binary search over f64 images (exact for dyadics)
        let mut a = 0usize;
        let mut b = self.pieces.len();
        while b - a > 1 {
            let mid = (a + b) / 2;
            if x >= self.breaks[mid].to_f64() {
                a = mid;
            } else {
                b = mid;
            }
        }
        Some(a)
    }

    /// Value at `x`; right-continuous at breakpoints, zero outside support.
    pub fn evaluate(&self, x: f64) -> f64 {
        match self.piece_index(x) {
            Some(i) => poly_eval(&self.pieces[i], x - self.breaks[i].to_f64()),
            None => 0.0,
        }
    }

    /// Left limit at `x` (zero below the support's first breakpoint).
    pub fn evaluate_left_limit(&self, x: f64) -> f64 {
        let lo = self.breaks[0].to_f64();
        let hi = self.breaks.last().unwrap().to_f64();
        if x <= lo || x > hi {
            return 0.0;
        }
        let mut i = self.piece_index(x).unwrap_or(self.pieces.len() - 1);
        if let Some(j) = self
            .breaks
            .iter()
            .position(|b| b.to_f64() == x)
        {
            // x sits on a breakpoint: take the piece to its left
            i = j - 1;
        }
        poly_eval(&self.pieces[i], x - self.breaks[i].to_f64())
    }

    /// `2^{j/2} p(2^j · − k)`.
    pub fn dilate_translate(&self, j: u32, k: i64) -> Self {
        let norm = (2f64).powi(j as i32).sqrt();
        let breaks: Vec<Dyadic> = self
            .breaks
            .iter()
            .map(|t| t.add_int_then_halve(k, j))
            .collect();
        let scale = (2f64).powi(j as i32);
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let mut pow = norm;
                p.iter()
                    .map(|&c| {
                        let v = c * pow;
                        pow *= scale;
                        v
                    })
                    .collect()
            })
            .collect();
        PiecewisePolynomial { breaks, pieces }
    }

    /// `p(1 − x)` — reflection about the midpoint of `[0, 1]`.
    pub fn reflect_unit(&self) -> Self {
        let n = self.pieces.len();
        let breaks: Vec<Dyadic> = self.breaks.iter().rev().map(|t| t.one_minus()).collect();
        let mut pieces = Vec::with_capacity(n);
        for i in (0..n).rev() {
            // new piece on [1-b_{i+1}, 1-b_i]; local t_new: p(1-x) with
            // x = 1 - (t_new + (1 - b_{i+1})) = b_{i+1} - t_new,
            // old local coordinate = (b_{i+1} - b_i) - t_new
            let w = self.breaks[i + 1].sub(&self.breaks[i]).to_f64();
            let at_right = poly_recenter(&self.pieces[i], w); // p about right end
            let flipped: Vec<f64> = at_right
                .iter()
                .enumerate()
                .map(|(k, &c)| if k % 2 == 0 { c } else { -c })
                .collect();
            pieces.push(flipped);
        }
        PiecewisePolynomial { breaks, pieces }
    }

    /// Piecewise derivative; distributional jumps at breakpoints are dropped.
    pub fn derivative(&self) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                if p.len() == 1 {
                    vec![0.0]
                } else {
                    p.iter()
                        .enumerate()
                        .skip(1)
                        .map(|(k, &c)| c * k as f64)
                        .collect()
                }
            })
            .collect();
        PiecewisePolynomial {
            breaks: self.breaks.clone(),
            pieces,
        }
    }

    /// Pointwise linear combination `Σ cᵢ pᵢ` over the merged partition.
    pub fn linear_combination(terms: &[(f64, &PiecewisePolynomial)]) -> Self {
        assert!(!terms.is_empty());
        let mut breaks: Vec<Dyadic> = Vec::new();
        for (_, p) in terms {
            breaks.extend_from_slice(&p.breaks);
        }
        breaks.sort();
        breaks.dedup();
        let mut pieces = Vec::with_capacity(breaks.len() - 1);
        for w in breaks.windows(2) {
            let left = w[0];
            let mut acc = vec![0.0; MAX_DEGREE + 1];
            for (c, p) in terms {
                if let Some(i) = p.piece_containing(&left) {
                    let shifted =
                        poly_recenter(&p.pieces[i], left.sub(&p.breaks[i]).to_f64());
                    for (k, v) in shifted.iter().enumerate() {
                        acc[k] += c * v;
                    }
                }
            }
            while acc.len() > 1 && *acc.last().unwrap() == 0.0 {
                acc.pop();
            }
            pieces.push(acc);
        }
        PiecewisePolynomial { breaks, pieces }.trimmed()
    }

    fn piece_containing(&self, x: &Dyadic) -> Option<usize> {
        if *x < self.breaks[0] || *x >= *self.breaks.last().unwrap() {
            return None;
        }
        let mut a = 0usize;
        let mut b = self.pieces.len();
        while b - a > 1 {
            let mid = (a + b) / 2;
            if *x >= self.breaks[mid] {
                a = mid;
            } else {
                b = mid;
            }
        }
        Some(a)
    }

    /// Drops leading/trailing identically-zero pieces (keeps at least one).
    fn trimmed(mut self) -> Self {
        let is_zero = |p: &Vec<f64>| p.iter().all(|&c| c == 0.0);
        while self.pieces.len() > 1 && is_zero(&self.pieces[0]) {
            self.pieces.remove(0);
            self.breaks.remove(0);
        }
        while self.pieces.len() > 1 && is_zero(self.pieces.last().unwrap()) {
            self.pieces.pop();
            self.breaks.pop();
        }
        self
    }

    /// Exact `⟨p, q⟩ = ∫ p q` over the merged partition.
    pub fn inner_product(&self, other: &PiecewisePolynomial) -> f64 {
        self.inner_product_impl(other, false)
    }

    /// Exact `⟨p′, q′⟩`.
    pub fn inner_product_d1(&self, other: &PiecewisePolynomial) -> f64 {
        self.derivative().inner_product_impl(&other.derivative(), false)
    }

    /// Exact `∫ x^k p(x) dx`.
    pub fn moment(&self, k: usize) -> f64 {
        let mut acc = 0.0;
        for (i, p) in self.pieces.iter().enumerate() {
            let left = self.breaks[i].to_f64();
            let h = self.breaks[i + 1].to_f64() - left;
            // x^k = (t + left)^k expanded in local t
            let mut xk = vec![0.0; k + 1];
            let mut binom = 1.0;
            for j in 0..=k {
                xk[j] = binom * left.powi((k - j) as i32);
                binom = binom * ((k - j) as f64) / ((j + 1) as f64);
            }
            acc += poly_integral(&poly_mul(&xk, p), h);
        }
        acc
    }

    fn inner_product_impl(&self, other: &PiecewisePolynomial, _d1: bool) -> f64 {
        let (alo, ahi) = self.support();
        let (blo, bhi) = other.support();
        if ahi <= blo || bhi <= alo {
            return 0.0;
        }
        let mut breaks: Vec<Dyadic> = self
            .breaks
            .iter()
            .chain(other.breaks.iter())
            .copied()
            .filter(|t| *t >= alo.max(blo) && *t <= ahi.min(bhi))
            .collect();
        breaks.sort();
        breaks.dedup();
        let mut acc = 0.0;
        for w in breaks.windows(2) {
            let (i, j) = match (self.piece_containing(&w[0]), other.piece_containing(&w[0])) {
                (Some(i), Some(j)) => (i, j),
                _ => continue,
            };
            let h = w[1].sub(&w[0]).to_f64();
            let a = poly_recenter(&self.pieces[i], w[0].sub(&self.breaks[i]).to_f64());
            let b = poly_recenter(&other.pieces[j], w[0].sub(&other.breaks[j]).to_f64());
            acc += poly_integral(&poly_mul(&a, &b), h);
        }
        acc
    }

    /// Max jump `|left limit − right limit|` over all breakpoints (support
    /// edges compare against zero); `0` means continuous.
    pub fn continuity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, b) in self.breaks.iter().enumerate() {
            let x = b.to_f64();
            let left = if i == 0 {
                0.0
            } else {
                poly_eval(
                    &self.pieces[i - 1],
                    b.sub(&self.breaks[i - 1]).to_f64(),
                )
            };
            let right = if i == self.pieces.len() {
                0.0
            } else {
                self.pieces[i][0]
            };
            worst = worst.max((left - right).abs());
            let _ = x;
        }
        worst
    }

    /// `‖p‖_{L2}`.
    pub fn l2_norm(&self) -> f64 {
        self.inner_product(self).sqrt()
    }
}

impl VectorFunction {
    pub fn new(components: Vec<PiecewisePolynomial>) -> Self {
        assert!(!components.is_empty() && components.len() <= 3);
        VectorFunction { components }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }
}
