//! Exact rational arithmetic with a machine-word fast path.
//!
//! Operator composition generates enormous numbers of coefficient
//! updates whose values are almost always tiny fractions (binomial
//! factors times small integers). Representing every coefficient as a
//! heap-allocated big rational would dominate the runtime, so
//! [`Rational`] keeps values in a reduced `i64/i64` form whenever they
//! fit and promotes to [`BigRational`] only on overflow.
//!
//! Invariants:
//! * the denominator is always positive and the fraction is fully
//!   reduced;
//! * zero is represented as `0/1`;
//! * the `Big` variant is used only for values that do not fit in the
//!   small form, so structural equality coincides with numeric
//!   equality.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, ToBigInt};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rational {
    /// Reduced fraction `num/den` with `den > 0`.
    Small(i64, i64),
    /// Fallback for values outside the small range; kept boxed so the
    /// enum stays two words wide.
    Big(Box<BigRational>),
}

impl Rational {
    pub const ZERO: Rational = Rational::Small(0, 1);
    pub const ONE: Rational = Rational::Small(1, 1);

    /// Builds `num/den`, reducing and normalizing signs. Panics on a
    /// zero denominator.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_i128_frac(num as i128, den as i128)
    }

    pub fn from_int(n: i64) -> Self {
        Rational::Small(n, 1)
    }

    /// Normalizes a `num/den` pair held in i128, demoting to the small
    /// form when possible.
    fn from_i128_frac(mut num: i128, mut den: i128) -> Self {
        debug_assert!(den != 0);
        if num == 0 {
            return Rational::ZERO;
        }
        if den < 0 {
            num = -num;
            den = -den;
        }
        let g = gcd_i128(num.unsigned_abs(), den.unsigned_abs());
        if g > 1 {
            num /= g as i128;
            den /= g as i128;
        }
        match (i64::try_from(num), i64::try_from(den)) {
            (Ok(n), Ok(d)) => Rational::Small(n, d),
            _ => Rational::Big(Box::new(BigRational::new(
                BigInt::from(num),
                BigInt::from(den),
            ))),
        }
    }

    fn from_big(r: BigRational) -> Self {
        // `BigRational::new` has already reduced; demote when possible.
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            Rational::Small(n, d)
        } else {
            Rational::Big(Box::new(r))
        }
    }

    pub fn to_big_rational(&self) -> BigRational {
        match self {
            Rational::Small(n, d) => BigRational::new(BigInt::from(*n), BigInt::from(*d)),
            Rational::Big(r) => (**r).clone(),
        }
    }

    /// Exact constructor from big numerator and denominator.
    pub fn from_big_ints(num: BigInt, den: BigInt) -> Rational {
        Rational::from_big(BigRational::new(num, den))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Rational::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Rational::Small(1, 1))
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Rational::Small(n, _) => *n < 0,
            Rational::Big(r) => r.is_negative(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rational::Small(_, d) => *d == 1,
            Rational::Big(r) => r.is_integer(),
        }
    }

    /// The numerator and denominator as big integers (denominator
    /// positive).
    pub fn numer_denom(&self) -> (BigInt, BigInt) {
        match self {
            Rational::Small(n, d) => (BigInt::from(*n), BigInt::from(*d)),
            Rational::Big(r) => (r.numer().clone(), r.denom().clone()),
        }
    }

    /// Exact integer value, if the rational is an integer fitting i64.
    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Rational::Small(n, 1) => Some(*n),
            _ => None,
        }
    }

    pub fn abs(&self) -> Rational {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Rational {
        assert!(!self.is_zero(), "reciprocal of zero");
        match self {
            Rational::Small(n, d) => {
                if *n < 0 {
                    Rational::Small(-d, -n)
                } else {
                    Rational::Small(*d, *n)
                }
            }
            Rational::Big(r) => Rational::from_big(r.recip()),
        }
    }

    pub fn pow(&self, exp: u32) -> Rational {
        let mut acc = Rational::ONE;
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Rounds to the nearest f64; used only for display and numeric
    /// seeding, never for exact decisions.
    pub fn to_f64(&self) -> f64 {
        match self {
            Rational::Small(n, d) => *n as f64 / *d as f64,
            Rational::Big(r) => big_rational_to_f64(r),
        }
    }
}

fn big_rational_to_f64(r: &BigRational) -> f64 {
    // to_f64 on BigRational can overflow for huge components; scale by
    // matching bit lengths first.
    let n_bits = r.numer().bits() as i64;
    let d_bits = r.denom().bits() as i64;
    let shift = (n_bits.max(d_bits) - 100).max(0) as u64;
    let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

fn gcd_i128(a: u128, b: u128) -> u128 {
    a.gcd(&b)
}

impl Default for Rational {
    fn default() -> Self {
        Rational::ZERO
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rational::Small(n, 1) => write!(f, "{n}"),
            Rational::Small(n, d) => write!(f, "{n}/{d}"),
            Rational::Big(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl From<(i64, i64)> for Rational {
    fn from((n, d): (i64, i64)) -> Self {
        Rational::new(n, d)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                // a/b vs c/d with positive denominators: compare a*d vs c*b.
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.to_big_rational().cmp(&other.to_big_rational()),
        }
    }
}

impl std::ops::Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match self {
            // i64::MIN negation would overflow i64 but not i128.
            Rational::Small(n, d) => Rational::from_i128_frac(-(*n as i128), *d as i128),
            Rational::Big(r) => Rational::from_big(-(**r).clone()),
        }
    }
}

impl std::ops::Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl std::ops::$trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                (&self).$method(&rhs)
            }
        }
        impl std::ops::$trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                (&self).$method(rhs)
            }
        }
        impl std::ops::$trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);
forward_owned_binop!(Div, div);

impl std::ops::Add<&Rational> for &Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        match (self, rhs) {
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                if *b == 1 && *d == 1 {
                    return Rational::from_i128_frac(*a as i128 + *c as i128, 1);
                }
                let num = *a as i128 * *d as i128 + *c as i128 * *b as i128;
                let den = *b as i128 * *d as i128;
                Rational::from_i128_frac(num, den)
            }
            _ => Rational::from_big(self.to_big_rational() + rhs.to_big_rational()),
        }
    }
}

impl std::ops::Sub<&Rational> for &Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        match (self, rhs) {
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                if *b == 1 && *d == 1 {
                    return Rational::from_i128_frac(*a as i128 - *c as i128, 1);
                }
                let num = *a as i128 * *d as i128 - *c as i128 * *b as i128;
                let den = *b as i128 * *d as i128;
                Rational::from_i128_frac(num, den)
            }
            _ => Rational::from_big(self.to_big_rational() - rhs.to_big_rational()),
        }
    }
}

impl std::ops::Mul<&Rational> for &Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        match (self, rhs) {
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                if *a == 0 || *c == 0 {
                    return Rational::ZERO;
                }
                Rational::from_i128_frac(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Rational::from_big(self.to_big_rational() * rhs.to_big_rational()),
        }
    }
}

impl std::ops::Div<&Rational> for &Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        match (self, rhs) {
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                Rational::from_i128_frac(*a as i128 * *d as i128, *b as i128 * *c as i128)
            }
            _ => Rational::from_big(self.to_big_rational() / rhs.to_big_rational()),
        }
    }
}

impl std::ops::AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        *self = &*self + rhs;
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |acc, x| &acc + &x)
    }
}

/// Parses the canonical display form: an optional sign, an integer,
/// optionally followed by `/` and a positive integer.
impl std::str::FromStr for Rational {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (num_s, den_s) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let num: BigInt = num_s
            .trim()
            .parse()
            .map_err(|e| format!("bad numerator {num_s:?}: {e}"))?;
        let den: BigInt = den_s
            .trim()
            .parse()
            .map_err(|e| format!("bad denominator {den_s:?}: {e}"))?;
        if den.is_zero() {
            return Err("zero denominator".into());
        }
        if den.is_negative() {
            return Err("denominator must be positive".into());
        }
        Ok(Rational::from_big(BigRational::new(num, den)))
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational::from_big(r)
    }
}

impl ToBigInt for Rational {
    fn to_bigint(&self) -> Option<BigInt> {
        if self.is_integer() {
            Some(self.numer_denom().0)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn construction_normalizes() {
        assert_eq!(Rational::new(2, 4), Rational::Small(1, 2));
        assert_eq!(Rational::new(-2, -4), Rational::Small(1, 2));
        assert_eq!(Rational::new(2, -4), Rational::Small(-1, 2));
        assert_eq!(Rational::new(0, -7), Rational::ZERO);
    }

    #[test]
    fn additive_inverse_is_zero() {
        let x = Rational::new(3, 7);
        assert!((&x + &(-&x)).is_zero());
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let big_val = Rational::from_int(i64::MAX);
        let sq = &big_val * &big_val;
        assert!(matches!(sq, Rational::Big(_)));
        let back = &sq / &big_val;
        // Demotion restores the small representation when it fits again.
        assert_eq!(back, big_val);
    }

    #[test]
    fn negate_i64_min_is_safe() {
        let x = Rational::from_int(i64::MIN);
        let y = -&x;
        assert_eq!(&x + &y, Rational::ZERO);
    }

    #[test]
    fn display_and_parse_round_trip() {
        for r in [
            Rational::new(1, 2),
            Rational::new(-22, 7),
            Rational::from_int(59049),
            Rational::ZERO,
            &Rational::from_int(i64::MAX) * &Rational::from_int(12345),
        ] {
            let s = r.to_string();
            let back: Rational = s.parse().unwrap();
            assert_eq!(back, r, "round trip through {s:?}");
        }
    }

    #[test]
    fn ordering_matches_value() {
        assert!(Rational::new(1, 3) < Rational::new(1, 2));
        assert!(Rational::new(-1, 2) < Rational::new(-1, 3));
    }

    proptest! {
        #[test]
        fn matches_bigrational_add(a in -2000i64..2000, b in 1i64..50, c in -2000i64..2000, d in 1i64..50) {
            let x = Rational::new(a, b);
            let y = Rational::new(c, d);
            prop_assert_eq!((&x + &y).to_big_rational(), big(a, b) + big(c, d));
        }

        #[test]
        fn matches_bigrational_mul(a in -2000i64..2000, b in 1i64..50, c in -2000i64..2000, d in 1i64..50) {
            let x = Rational::new(a, b);
            let y = Rational::new(c, d);
            prop_assert_eq!((&x * &y).to_big_rational(), big(a, b) * big(c, d));
        }

        #[test]
        fn matches_bigrational_sub_div(a in -2000i64..2000, b in 1i64..50, c in -2000i64..2000, d in 1i64..50) {
            let x = Rational::new(a, b);
            let y = Rational::new(c, d);
            prop_assert_eq!((&x - &y).to_big_rational(), big(a, b) - big(c, d));
            if c != 0 {
                prop_assert_eq!((&x / &y).to_big_rational(), big(a, b) / big(c, d));
            }
        }

        #[test]
        fn near_overflow_arithmetic_is_exact(a in (i64::MAX/2..i64::MAX), c in (i64::MAX/2..i64::MAX)) {
            // Sums and products around the i64 boundary must promote
            // rather than wrap.
            let x = Rational::from_int(a);
            let y = Rational::from_int(c);
            let sum = &x + &y;
            let prod = &x * &y;
            prop_assert_eq!(sum.to_big_rational(), big(a, 1) + big(c, 1));
            prop_assert_eq!(prod.to_big_rational(), big(a, 1) * big(c, 1));
        }

        #[test]
        fn small_whenever_fits(a in -3000i64..3000, b in 1i64..100, c in -3000i64..3000, d in 1i64..100) {
            // Any arithmetic result whose reduced form fits i64 must be
            // in the Small representation (equality relies on this).
            let x = Rational::new(a, b);
            let y = Rational::new(c, d);
            for r in [&x + &y, &x - &y, &x * &y] {
                prop_assert!(matches!(r, Rational::Small(..)));
            }
        }

        #[test]
        fn pow_matches_repeated_mul(a in -60i64..60, b in 1i64..10, e in 0u32..6) {
            let x = Rational::new(a, b);
            let mut acc = Rational::ONE;
            for _ in 0..e { acc = &acc * &x; }
            prop_assert_eq!(x.pow(e), acc);
        }
    }
}
