//! Exact dyadic rationals `num / 2^exp`, used for piecewise-polynomial
//! breakpoints so that partition merging never drifts.

use std::cmp::Ordering;
use std::fmt;

/// A dyadic rational `num / 2^exp` in canonical form (`num` odd or zero,
/// `exp` zero when `num` is zero).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: i64,
    exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    /// `num / 2^exp`, normalized.
    pub fn new(mut num: i64, mut exp: u32) -> Self {
        if num == 0 {
            return Self::ZERO;
        }
        while exp > 0 && num % 2 == 0 {
            num /= 2;
            exp -= 1;
        }
        Dyadic { num, exp }
    }

    pub fn from_int(n: i64) -> Self {
        Dyadic { num: n, exp: 0 }
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    pub fn log2_denominator(&self) -> u32 {
        self.exp
    }

    pub fn to_f64(&self) -> f64 {
        // exact: |num| < 2^53 always holds at the scales used here
        self.num as f64 / (1u64 << self.exp) as f64
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// `(self + k) / 2^j` — the breakpoint map of `x ↦ 2^j x − k` inverted.
    pub fn add_int_then_halve(&self, k: i64, j: u32) -> Self {
        let shifted = self
            .num
            .checked_add(k.checked_mul(1i64 << self.exp).expect("dyadic overflow"))
            .expect("dyadic overflow");
        Dyadic::new(shifted, self.exp + j)
    }

    /// `1 − self`.
    pub fn one_minus(&self) -> Self {
        let one = 1i64 << self.exp;
        Dyadic::new(one - self.num, self.exp)
    }

    pub fn add(&self, other: &Dyadic) -> Self {
        let exp = self.exp.max(other.exp);
        let a = self.num << (exp - self.exp);
        let b = other.num << (exp - other.exp);
        Dyadic::new(a + b, exp)
    }

    pub fn sub(&self, other: &Dyadic) -> Self {
        let exp = self.exp.max(other.exp);
        let a = self.num << (exp - self.exp);
        let b = other.num << (exp - other.exp);
        Dyadic::new(a - b, exp)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let exp = self.exp.max(other.exp);
        let a = (self.num as i128) << (exp - self.exp);
        let b = (other.num as i128) << (exp - other.exp);
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes() {
        assert_eq!(Dyadic::new(4, 2), Dyadic::from_int(1));
        assert_eq!(Dyadic::new(6, 1), Dyadic::from_int(3));
        assert_eq!(Dyadic::new(0, 7), Dyadic::ZERO);
    }

    #[test]
    fn ordering_is_exact() {
        let a = Dyadic::new(1, 1); // 1/2
        let b = Dyadic::new(3, 2); // 3/4
        assert!(a < b);
        assert!(b < Dyadic::ONE);
        assert_eq!(a.add(&a), Dyadic::ONE);
    }

    #[test]
    fn affine_map() {
        // (t + k)/2^j with t = 1/2, k = 1, j = 2 -> 3/8
        let t = Dyadic::new(1, 1);
        assert_eq!(t.add_int_then_halve(1, 2), Dyadic::new(3, 3));
        assert_eq!(Dyadic::new(1, 2).one_minus(), Dyadic::new(3, 2));
    }
}
