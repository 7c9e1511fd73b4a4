//! Crate-internal exact rationals for catalog construction.
//!
//! The family catalog enters every filter tap and boundary-function
//! coefficient as a fraction and performs all generator construction in this
//! type, so boundary values and two-scale identities hold exactly before the
//! final rounding to `f64`.

use std::ops::{Add, Mul, Neg, Sub};

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.abs()
}

/// Exact rational with `i128` backing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Q {
    n: i128,
    d: i128,
}

impl Q {
    pub const ZERO: Q = Q { n: 0, d: 1 };
    pub const ONE: Q = Q { n: 1, d: 1 };

    pub fn new(n: i128, d: i128) -> Self {
        assert!(d != 0, "zero denominator");
        let s = if d < 0 { -1 } else { 1 };
        let g = gcd(n, d).max(1);
        Q {
            n: s * n / g,
            d: s * d / g,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Q { n: n as i128, d: 1 }
    }

    pub fn to_f64(self) -> f64 {
        self.n as f64 / self.d as f64
    }

    pub fn is_zero(self) -> bool {
        self.n == 0
    }

    pub fn recip(self) -> Q {
        assert!(self.n != 0, "reciprocal of zero");
        Q::new(self.d, self.n)
    }
}

impl Add for Q {
    type Output = Q;
    fn add(self, o: Q) -> Q {
        let g = gcd(self.d, o.d).max(1);
        let l = self.d / g;
        Q::new(
            self.n
                .checked_mul(o.d / g)
                .and_then(|x| o.n.checked_mul(l).map(|y| x + y))
                .expect("rational overflow"),
            l.checked_mul(o.d).expect("rational overflow"),
        )
    }
}

impl Sub for Q {
    type Output = Q;
    fn sub(self, o: Q) -> Q {
        self + (-o)
    }
}

impl Mul for Q {
    type Output = Q;
    fn mul(self, o: Q) -> Q {
        let g1 = gcd(self.n, o.d).max(1);
        let g2 = gcd(o.n, self.d).max(1);
        Q::new(
            (self.n / g1).checked_mul(o.n / g2).expect("rational overflow"),
            (self.d / g2).checked_mul(o.d / g1).expect("rational overflow"),
        )
    }
}

impl Neg for Q {
    type Output = Q;
    fn neg(self) -> Q {
        Q { n: -self.n, d: self.d }
    }
}

/// Parses `"-45/64"` / `"3"` style literals; panics on malformed input
/// (catalog data is static).
pub(crate) fn q(text: &str) -> Q {
    match text.split_once('/') {
        Some((n, d)) => Q::new(
            n.trim().parse().expect("bad rational"),
            d.trim().parse().expect("bad rational"),
        ),
        None => Q::new(text.trim().parse().expect("bad rational"), 1),
    }
}
