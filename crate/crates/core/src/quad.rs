//! Quadrature toolkit: Gauss–Legendre rules, the tanh-sinh (double
//! exponential) endpoint-singularity rule, and closed-form Hadamard
//! finite-part integrals for polynomial pieces.

use crate::poly::PiecewisePolynomial;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Rule family tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RuleKind {
    GaussLegendre(usize),
    /// Tanh-sinh with step `h` at the given level.
    DoubleExponential { h: f64, level: usize },
}

/// Nodes and weights on a reference interval: `[-1, 1]` for Gauss–Legendre,
/// `(0, 1)` for the double-exponential rule.
///
/// `dist_left`/`dist_right` hold the node distances to the reference
/// endpoints, computed without cancellation — the DE nodes cluster
/// exponentially close to the ends, where `1 - x` in f64 would be all noise.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub kind: RuleKind,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub dist_left: Vec<f64>,
    pub dist_right: Vec<f64>,
}

/// Gauss–Legendre rule of order `n` on `[-1, 1]` (Newton on the Legendre
/// recurrence; nodes/weights to ~1e-15).
pub fn gauss_legendre(n: usize) -> Arc<QuadratureRule> {
    assert!(n >= 1, "rule order must be positive");
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<QuadratureRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().unwrap().get(&n) {
        return r.clone();
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and P_n'(x) by recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // i-th root from the right; store the symmetric pair
        nodes[i] = if n % 2 == 1 && i == n / 2 { 0.0 } else { -x.abs() };
        nodes[n - 1 - i] = -nodes[i];
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    let dist_left: Vec<f64> = nodes.iter().map(|x| x + 1.0).collect();
    let dist_right: Vec<f64> = nodes.iter().map(|x| 1.0 - x).collect();
    let rule = Arc::new(QuadratureRule {
        kind: RuleKind::GaussLegendre(n),
        nodes,
        weights,
        dist_left,
        dist_right,
    });
    cache.lock().unwrap().insert(n, rule.clone());
    rule
}

/// Tanh-sinh rule on `(0, 1)` clustering at both endpoints.
///
/// Level `L ≥ 1` uses step `h = 2^{1−L}`; level 6 integrates `ln(x)·P(x)`
/// for polynomial `P` of degree ≤ 6 to better than 1e-12.
pub fn de_endpoint_rule(level: usize) -> Arc<QuadratureRule> {
    assert!(level >= 1, "level must be >= 1");
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<QuadratureRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().unwrap().get(&level) {
        return r.clone();
    }
    let h = (2.0f64).powi(1 - level as i32);
    let t_max = 3.8f64;
    let m = (t_max / h).ceil() as i64;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut dist_left = Vec::new();
    let mut dist_right = Vec::new();
    for i in -m..=m {
        let t = i as f64 * h;
        let u = std::f64::consts::FRAC_PI_2 * t.sinh();
        // x = (1 + tanh u)/2 = 1/(1 + e^{-2u}); 1 - x = 1/(1 + e^{2u})
        let x = 1.0 / (1.0 + (-2.0 * u).exp());
        let one_minus_x = 1.0 / (1.0 + (2.0 * u).exp());
        let w = h * std::f64::consts::FRAC_PI_2 * t.cosh() / (u.cosh() * u.cosh()) / 2.0;
        if w < 1e-300 || x <= 0.0 || one_minus_x <= 0.0 {
            continue;
        }
        nodes.push(x);
        weights.push(w);
        dist_left.push(x);
        dist_right.push(one_minus_x);
    }
    let rule = Arc::new(QuadratureRule {
        kind: RuleKind::DoubleExponential { h, level },
        nodes,
        weights,
        dist_left,
        dist_right,
    });
    cache.lock().unwrap().insert(level, rule.clone());
    rule
}

/// Scalar-or-complex accumulation for the integration helpers.
pub trait Accum: Copy + std::ops::Add<Output = Self> {
    fn zero() -> Self;
    fn scale(self, w: f64) -> Self;
}

impl Accum for f64 {
    fn zero() -> f64 {
        0.0
    }
    fn scale(self, w: f64) -> f64 {
        self * w
    }
}

impl Accum for num_complex::Complex64 {
    fn zero() -> Self {
        num_complex::Complex64::new(0.0, 0.0)
    }
    fn scale(self, w: f64) -> Self {
        self * w
    }
}

/// `∫_a^b f` by Gauss–Legendre of order `n`.
pub fn integrate_gl<T: Accum>(f: impl Fn(f64) -> T, a: f64, b: f64, n: usize) -> T {
    let rule = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = T::zero();
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        acc = acc + f(mid + half * x).scale(w * half);
    }
    acc
}

/// `∫_a^b f` by the tanh-sinh rule; the closure receives
/// `(x, dist_to_a, dist_to_b)` with the distances free of cancellation, so
/// integrands singular at either endpoint can be evaluated stably.
pub fn integrate_de<T: Accum>(
    f: impl Fn(f64, f64, f64) -> T,
    a: f64,
    b: f64,
    level: usize,
) -> T {
    let rule = de_endpoint_rule(level);
    let len = b - a;
    let mut acc = T::zero();
    for i in 0..rule.nodes.len() {
        let x = a + len * rule.nodes[i];
        acc = acc + f(x, len * rule.dist_left[i], len * rule.dist_right[i]).scale(rule.weights[i] * len);
    }
    acc
}

/// Closed-form Hadamard finite part `⨎_c^d v(x′)/(x−x′)² dx′` for a
/// polynomial piece `v` given by local coefficients about `c`.
///
/// For `x` strictly inside `(c, d)` this is the symmetric ε-limit with the
/// `2v(x)/ε` subtraction; for `x` outside `[c, d]` it is an ordinary
/// integral. When `x` equals an endpoint, the divergent `1/ε` and `ln ε`
/// terms are dropped (one-sided partie finie) — assembly never evaluates
/// there, the case exists so callers need no exclusion logic.
pub fn finite_part_poly(coeffs_about_c: &[f64], c: f64, d: f64, x: f64) -> f64 {
    // re-center: v(x') = sum_n v_n (x' - x)^n
    let shift = x - c;
    let n = coeffs_about_c.len();
    let mut v = vec![0.0; n];
    for (k, &ck) in coeffs_about_c.iter().enumerate() {
        // ck * (t + shift)^k with t = x' - x
        let mut binom = 1.0;
        for j in 0..=k {
            v[k - j] += ck * binom * shift.powi(j as i32);
            binom = binom * ((k - j) as f64) / ((j + 1) as f64);
        }
    }
    let dl = x - c; // signed distance to left end
    let dr = d - x; // signed distance to right end
    let mut acc = 0.0;
    if x == c || x == d {
        let inner = if x == c { dr } else { dl };
        acc += v[0] * (-1.0 / inner);
        if n > 1 {
            acc += v[1] * if x == c { inner.ln() } else { -(inner.ln()) };
        }
    } else {
        // one formula covers both the interior finite part and the ordinary
        // exterior integral (the finite part is the analytic continuation)
        acc += v[0] * (-1.0 / dl - 1.0 / dr);
        if n > 1 {
            acc += v[1] * (dr.abs().ln() - dl.abs().ln());
        }
    }
    // n >= 2 terms are regular everywhere:
    // ∫ (x'-x)^{n-2} dx' = [(d-x)^{n-1} - (c-x)^{n-1}]/(n-1)
    for (k, &vk) in v.iter().enumerate().skip(2) {
        let p = (k - 1) as i32;
        acc += vk * (dr.powi(p) - (-dl).powi(p)) / p as f64;
    }
    acc
}

/// Finite part of a whole piecewise polynomial: sums [`finite_part_poly`]
/// over the pieces.
pub fn finite_part_piecewise(p: &PiecewisePolynomial, x: f64) -> f64 {
    let breaks = p.breakpoints();
    let mut acc = 0.0;
    for i in 0..p.num_pieces() {
        acc += finite_part_poly(
            p.piece_coeffs(i),
            breaks[i].to_f64(),
            breaks[i + 1].to_f64(),
            x,
        );
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_two_point() {
        let r = gauss_legendre(2);
        assert!((r.nodes[0] + 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((r.nodes[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((r.weights[0] - 1.0).abs() < 1e-15);
        assert!((r.weights[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gl_weight_sum_and_positivity() {
        for n in 1..=24 {
            let r = gauss_legendre(n);
            assert!(r.weights.iter().all(|&w| w > 0.0));
            let s: f64 = r.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n}: sum {s}");
        }
    }

    #[test]
    fn gl_polynomial_exactness() {
        // n=5 integrates x^8 over [-1,1] exactly: 2/9
        let v = integrate_gl(|x: f64| x.powi(8), -1.0, 1.0, 5);
        assert!((v - 2.0 / 9.0).abs() < 1e-14);
        // degree 2n-1 exactness to 1e-13
        for n in 2..=12 {
            let d = 2 * n - 1;
            let exact = if d % 2 == 1 { 0.0 } else { 2.0 / (d as f64 + 1.0) };
            let v = integrate_gl(|x: f64| x.powi(d as i32), -1.0, 1.0, n);
            assert!((v - exact).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn de_log_integrals() {
        // ∫0^1 ln x dx = -1 ; ∫0^1 x ln x = -1/4 ; ∫0^1 x^3 ln x = -1/16
        let cases: [(i32, f64); 3] = [(0, -1.0), (1, -0.25), (3, -1.0 / 16.0)];
        for (p, want) in cases {
            let v = integrate_de(|x: f64, da, _| da.ln() * x.powi(p), 0.0, 1.0, 6);
            assert!((v - want).abs() < 1e-12, "x^{p} ln x: {v} vs {want}");
        }
        // degree 6 polynomial factor
        let v = integrate_de(|x: f64, da, _| da.ln() * x.powi(6), 0.0, 1.0, 6);
        assert!((v + 1.0 / 49.0).abs() < 1e-12);
    }

    #[test]
    fn de_smooth_integral() {
        let v = integrate_de(|x: f64, _, _| x.exp(), 0.0, 1.0, 6);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn finite_part_examples() {
        // v ≡ 1 on [0,1], x = 1/2 -> -4
        assert!((finite_part_poly(&[1.0], 0.0, 1.0, 0.5) + 4.0).abs() < 1e-14);
        // regular case: v ≡ 1 on [2,3], x = 0 -> 1/6
        assert!((finite_part_poly(&[1.0], 2.0, 3.0, 0.0) - 1.0 / 6.0).abs() < 1e-15);
        // v(x') = x' on [0,1], x = 1/2 -> -2
        assert!((finite_part_poly(&[0.0, 1.0], 0.0, 1.0, 0.5) + 2.0).abs() < 1e-14);
    }

    #[test]
    fn finite_part_linearity_and_translation() {
        let a = [0.3, -1.2, 0.7, 0.05];
        let b = [-0.9, 0.4, -0.2, 1.1];
        let x = 0.375;
        let fa = finite_part_poly(&a, 0.0, 1.0, x);
        let fb = finite_part_poly(&b, 0.0, 1.0, x);
        let combo: Vec<f64> = a.iter().zip(&b).map(|(p, q)| 2.0 * p - 0.5 * q).collect();
        let fc = finite_part_poly(&combo, 0.0, 1.0, x);
        assert!((fc - (2.0 * fa - 0.5 * fb)).abs() < 1e-12);
        // translation covariance
        let t = 7.25;
        let ft = finite_part_poly(&a, t, 1.0 + t, x + t);
        assert!((ft - fa).abs() < 1e-11);
    }

    /// ε-limit oracle: evaluates the defining bracket at shrinking ε and
    /// Richardson-extrapolates. Independent of the closed form.
    fn finite_part_oracle(coeffs: &[f64], c: f64, d: f64, x: f64) -> f64 {
        let poly = |t: f64| -> f64 {
            let mut acc = 0.0;
            for &co in coeffs.iter().rev() {
                acc = acc * (t - c) + co;
            }
            acc
        };
        // the integrand peaks like 1/eps^2 at the cutoff; subdivide
        // geometrically toward it so plain GL resolves each panel
        let toward = |far: f64, near: f64| -> f64 {
            let mut acc = 0.0;
            let mut a = far;
            let span = near - far;
            for i in 1..=40 {
                let b = near - span * 0.7f64.powi(i);
                acc += integrate_gl(|t| poly(t) / ((x - t) * (x - t)), a, b, 16);
                a = b;
            }
            acc + integrate_gl(|t| poly(t) / ((x - t) * (x - t)), a, near, 16)
        };
        let bracket = |eps: f64| -> f64 {
            // toward(far, near) ≈ ∫_far^near, so the right side enters negated
            toward(c, x - eps) - toward(d, x + eps) - 2.0 * poly(x) / eps
        };
        // bracket(eps) = FP + A·eps + O(eps^2); Richardson over eps, eps/2
        let e = 1e-3;
        let b1 = bracket(e);
        let b2 = bracket(e / 2.0);
        let b3 = bracket(e / 4.0);
        // second-order extrapolation
        let r1 = 2.0 * b2 - b1;
        let r2 = 2.0 * b3 - b2;
        (4.0 * r2 - r1) / 3.0
    }

    #[test]
    fn finite_part_matches_epsilon_limit_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let coeffs: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let c = rng.gen_range(-1.0..0.0);
            let d = c + rng.gen_range(0.5..2.0);
            let x = c + (d - c) * rng.gen_range(0.15..0.85);
            let exact = finite_part_poly(&coeffs, c, d, x);
            let oracle = finite_part_oracle(&coeffs, c, d, x);
            assert!(
                (exact - oracle).abs() <= 1e-8 * (1.0 + exact.abs()),
                "exact {exact} vs oracle {oracle}"
            );
        }
    }
}
