//! Fixed-point high-precision real and complex arithmetic.
//!
//! [`BigFloat`] stores `m * 2^-bits` with a big-integer mantissa `m`.
//! Every operation truncates to the grid, so the absolute error per
//! operation is below `2^(1-bits)`. The vanishing oracle compares
//! residuals against `tolerance * max(1, scale)`, which floors the
//! comparison scale at 1, so an absolute error model at 256 bits leaves
//! dozens of orders of magnitude of headroom over the 1e-30 tolerance.
//!
//! All binary operations require both operands to carry the same
//! precision; mixing precisions is a programming error and panics.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigFloat {
    m: BigInt,
    bits: u32,
}

impl BigFloat {
    pub fn zero(bits: u32) -> Self {
        BigFloat {
            m: BigInt::zero(),
            bits,
        }
    }

    pub fn one(bits: u32) -> Self {
        BigFloat {
            m: BigInt::from(1) << bits,
            bits,
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// The representation grid step doubled, `2^(1-bits)`: an upper
    /// bound on the absolute error of any single truncating operation.
    pub fn ulp(bits: u32) -> Self {
        BigFloat {
            m: BigInt::from(2),
            bits,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn from_rational(r: &Rational, bits: u32) -> Self {
        let (num, den) = r.numer_denom();
        BigFloat {
            m: (num << bits) / den,
            bits,
        }
    }

    pub fn from_i64(n: i64, bits: u32) -> Self {
        BigFloat {
            m: BigInt::from(n) << bits,
            bits,
        }
    }

    /// Exact conversion: every finite f64 is a dyadic rational.
    pub fn from_f64(x: f64, bits: u32) -> Self {
        assert!(x.is_finite(), "cannot convert {x} to BigFloat");
        let b = x.to_bits();
        let sign = if b >> 63 == 1 { -1 } else { 1 };
        let biased = ((b >> 52) & 0x7ff) as i64;
        let frac = b & ((1u64 << 52) - 1);
        let (mant, exp) = if biased == 0 {
            (frac, -1074i64) // subnormal
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        let shift = exp + bits as i64;
        let mut m = BigInt::from(mant);
        if shift >= 0 {
            m <<= shift as u64;
        } else {
            m >>= (-shift) as u64; // truncation far below the grid
        }
        BigFloat { m: m * sign, bits }
    }

    pub fn to_f64(&self) -> f64 {
        let nbits = self.m.bits() as i64;
        // Keep ~80 significant bits in range for the conversion, then
        // restore the exponent in f64.
        let drop = (nbits - 80).max(0) as u64;
        let head = (&self.m >> drop).to_f64().unwrap_or(f64::NAN);
        head * 2f64.powi(drop as i32 - self.bits as i32)
    }

    pub fn abs(&self) -> BigFloat {
        BigFloat {
            m: self.m.abs(),
            bits: self.bits,
        }
    }

    /// Recovers the small rational this value approximates, by walking
    /// the continued-fraction convergents of `m / 2^bits`. Accepts the
    /// first convergent `p/q` with `q < 2^max_den_bits` lying within
    /// `2^(max_den_bits - bits)` of the value; returns `None` when no
    /// convergent that small is that close, so noise never reconstructs.
    pub fn to_rational(&self, max_den_bits: u32) -> Option<Rational> {
        assert!(max_den_bits < self.bits / 2);
        if self.m.is_negative() {
            return (-self).to_rational(max_den_bits).map(|r| -&r);
        }
        let mut a = self.m.clone();
        let mut b: BigInt = BigInt::from(1) << self.bits;
        let qmax: BigInt = BigInt::from(1) << max_den_bits;
        // Convergent recurrences h_n = q h_{n-1} + h_{n-2}, same for k.
        let (mut h0, mut h1) = (BigInt::from(1), BigInt::from(0));
        let (mut k0, mut k1) = (BigInt::from(0), BigInt::from(1));
        loop {
            let q = &a / &b;
            let r = &a - &(&q * &b);
            let h = &(&q * &h0) + &h1;
            let k = &(&q * &k0) + &k1;
            if k > qmax {
                return None;
            }
            // |m/2^bits - h/k| <= 2^(max_den_bits - bits)
            // <=> |m k - h 2^bits| <= k 2^max_den_bits.
            let diff = (&self.m * &k - (&h << self.bits)).abs();
            if diff <= (&k << max_den_bits) {
                return Some(Rational::from_big_ints(h, k));
            }
            if r.is_zero() {
                return None;
            }
            h1 = h0;
            h0 = h;
            k1 = k0;
            k0 = k;
            a = b;
            b = r;
        }
    }

    fn assert_same(&self, other: &BigFloat) {
        assert_eq!(self.bits, other.bits, "mixed BigFloat precisions");
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BigFloat {
    fn cmp(&self, other: &Self) -> Ordering {
        self.assert_same(other);
        self.m.cmp(&other.m)
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6e}", self.to_f64())
    }
}

impl std::ops::Add<&BigFloat> for &BigFloat {
    type Output = BigFloat;
    fn add(self, rhs: &BigFloat) -> BigFloat {
        self.assert_same(rhs);
        BigFloat {
            m: &self.m + &rhs.m,
            bits: self.bits,
        }
    }
}

impl std::ops::Sub<&BigFloat> for &BigFloat {
    type Output = BigFloat;
    fn sub(self, rhs: &BigFloat) -> BigFloat {
        self.assert_same(rhs);
        BigFloat {
            m: &self.m - &rhs.m,
            bits: self.bits,
        }
    }
}

impl std::ops::Mul<&BigFloat> for &BigFloat {
    type Output = BigFloat;
    fn mul(self, rhs: &BigFloat) -> BigFloat {
        self.assert_same(rhs);
        // Truncate toward zero (a shift would floor): negating either
        // operand then exactly negates the product, so even/odd
        // function evaluations stay bit-exact under z -> -z.
        let (sign, mag) = (&self.m * &rhs.m).into_parts();
        BigFloat {
            m: BigInt::from_biguint(sign, mag >> self.bits),
            bits: self.bits,
        }
    }
}

impl std::ops::Div<&BigFloat> for &BigFloat {
    type Output = BigFloat;
    fn div(self, rhs: &BigFloat) -> BigFloat {
        self.assert_same(rhs);
        assert!(!rhs.m.is_zero(), "BigFloat division by zero");
        BigFloat {
            m: (&self.m << self.bits) / &rhs.m,
            bits: self.bits,
        }
    }
}

impl std::ops::Neg for &BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat {
            m: -&self.m,
            bits: self.bits,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigComplex {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl BigComplex {
    pub fn zero(bits: u32) -> Self {
        BigComplex {
            re: BigFloat::zero(bits),
            im: BigFloat::zero(bits),
        }
    }

    pub fn one(bits: u32) -> Self {
        BigComplex {
            re: BigFloat::one(bits),
            im: BigFloat::zero(bits),
        }
    }

    pub fn bits(&self) -> u32 {
        self.re.bits()
    }

    pub fn from_real(re: BigFloat) -> Self {
        let bits = re.bits();
        BigComplex {
            re,
            im: BigFloat::zero(bits),
        }
    }

    pub fn from_rationals(re: &Rational, im: &Rational, bits: u32) -> Self {
        BigComplex {
            re: BigFloat::from_rational(re, bits),
            im: BigFloat::from_rational(im, bits),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// Max-norm |z|_inf = max(|re|, |im|); the norm used for all scale
    /// and residual measurements (within a factor sqrt(2) of the
    /// Euclidean norm, immaterial at the oracle's margins).
    pub fn norm_inf(&self) -> BigFloat {
        std::cmp::max(self.re.abs(), self.im.abs())
    }

    pub fn conj(&self) -> BigComplex {
        BigComplex {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn scale(&self, f: &BigFloat) -> BigComplex {
        BigComplex {
            re: &self.re * f,
            im: &self.im * f,
        }
    }

    pub fn pow(&self, mut exp: u32) -> BigComplex {
        let mut base = self.clone();
        let mut acc = BigComplex::one(self.bits());
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// One square root of z by Newton iteration seeded from f64;
    /// converges quadratically, so a handful of steps saturates the
    /// fixed-point grid. Returns the root with the seed's branch.
    pub fn sqrt(&self) -> BigComplex {
        let bits = self.bits();
        if self.is_zero() {
            return self.clone();
        }
        let (re, im) = (self.re.to_f64(), self.im.to_f64());
        let mag = (re.hypot(im)).sqrt();
        let ang = im.atan2(re) / 2.0;
        let mut w = BigComplex {
            re: BigFloat::from_f64(mag * ang.cos(), bits),
            im: BigFloat::from_f64(mag * ang.sin(), bits),
        };
        let half = BigFloat::from_rational(&Rational::new(1, 2), bits);
        for _ in 0..12 {
            // w <- (w + z/w)/2
            let next = (&w + &(self / &w)).scale(&half);
            if next == w {
                break;
            }
            w = next;
        }
        w
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i", self.re, self.im)
    }
}

impl std::ops::Add<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn add(self, rhs: &BigComplex) -> BigComplex {
        BigComplex {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl std::ops::Sub<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn sub(self, rhs: &BigComplex) -> BigComplex {
        BigComplex {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl std::ops::Mul<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: &BigComplex) -> BigComplex {
        BigComplex {
            re: &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            im: &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        }
    }
}

impl std::ops::Div<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn div(self, rhs: &BigComplex) -> BigComplex {
        let den = &(&rhs.re * &rhs.re) + &(&rhs.im * &rhs.im);
        let num = self * &rhs.conj();
        BigComplex {
            re: &num.re / &den,
            im: &num.im / &den,
        }
    }
}

impl std::ops::Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BITS: u32 = 256;

    fn bf(x: f64) -> BigFloat {
        BigFloat::from_f64(x, BITS)
    }

    #[test]
    fn rational_conversion_is_faithful() {
        let third = BigFloat::from_rational(&Rational::new(1, 3), BITS);
        let three = BigFloat::from_i64(3, BITS);
        let err = (&(&third * &three) - &BigFloat::one(BITS)).abs();
        assert!(err <= bf(2f64.powi(-250)), "error {}", err.to_f64());
    }

    #[test]
    fn f64_round_trip() {
        for x in [0.0, 1.5, -0.4, 1e-30, 3.0e20, -7.25e-9] {
            assert_eq!(BigFloat::from_f64(x, BITS).to_f64(), x);
        }
    }

    #[test]
    fn complex_division_inverts_multiplication() {
        let a = BigComplex {
            re: bf(1.25),
            im: bf(-0.75),
        };
        let b = BigComplex {
            re: bf(0.3),
            im: bf(2.0),
        };
        let q = &(&a * &b) / &b;
        let err = (&q - &a).norm_inf();
        assert!(err <= bf(2f64.powi(-240)), "error {}", err.to_f64());
    }

    #[test]
    fn sqrt_squares_back() {
        let z = BigComplex {
            re: bf(-2.0),
            im: bf(5.0),
        };
        let w = z.sqrt();
        let err = (&(&w * &w) - &z).norm_inf();
        assert!(err <= bf(2f64.powi(-240)), "error {}", err.to_f64());
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        // Square-and-multiply truncates in a different order than the
        // naive product, so agreement is up to a few grid units.
        let z = BigComplex {
            re: bf(0.9),
            im: bf(-1.1),
        };
        let mut acc = BigComplex::one(BITS);
        for k in 0..8 {
            let err = (&z.pow(k) - &acc).norm_inf();
            assert!(err <= bf(2f64.powi(-248)), "k={k}: error {}", err.to_f64());
            acc = &acc * &z;
        }
    }

    #[test]
    fn rational_reconstruction_recovers_small_fractions() {
        for r in [
            Rational::from_int(6),
            Rational::new(-3, 2),
            Rational::new(22, 7),
            Rational::ZERO,
        ] {
            let x = BigFloat::from_rational(&r, BITS);
            assert_eq!(x.to_rational(64), Some(r));
        }
        // Perturbations far beyond the acceptance window reconstruct
        // nothing rather than a wrong fraction.
        let noise = &BigFloat::from_rational(&Rational::new(1, 3), BITS)
            + &BigFloat::from_f64(1e-40, BITS);
        assert_eq!(noise.to_rational(64), None);
    }

    #[test]
    fn norm_inf_picks_larger_component() {
        let z = BigComplex {
            re: bf(-3.0),
            im: bf(2.0),
        };
        assert_eq!(z.norm_inf(), bf(3.0));
    }

    #[test]
    #[should_panic(expected = "mixed BigFloat precisions")]
    fn mixed_precision_panics() {
        let _ = &bf(1.0) + &BigFloat::from_f64(1.0, 128);
    }
}
