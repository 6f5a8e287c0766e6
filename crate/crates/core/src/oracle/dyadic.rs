//! Exact dyadic rationals `m * 2^e` over big integers.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `mant * 2^exp`, normalized so that `mant` is odd (or zero with `exp == 0`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { mant, exp };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Self::new(n.into(), 0)
    }

    pub fn pow2(exp: i64) -> Self {
        Dyadic {
            mant: BigInt::one(),
            exp,
        }
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz;
            self.exp += tz as i64;
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    /// Exponent of the lowest set bit (the 2-adic valuation); 0 for zero.
    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.is_zero() || self.exp >= 0
    }

    pub fn signum(&self) -> i32 {
        if self.mant.is_positive() {
            1
        } else if self.mant.is_negative() {
            -1
        } else {
            0
        }
    }

    /// The integer value, if integral.
    pub fn to_bigint(&self) -> Option<BigInt> {
        if !self.is_integer() {
            return None;
        }
        Some(&self.mant << self.exp as usize)
    }

    pub fn to_i64(&self) -> Option<i64> {
        if self.is_zero() {
            return Some(0);
        }
        if !self.is_integer() || self.exp > 64 {
            return None;
        }
        self.to_bigint()?.to_i64()
    }

    /// Bits needed to write the value as `integer part` plus fractional bits.
    pub fn bit_size(&self) -> u64 {
        if self.is_zero() {
            return 0;
        }
        self.mant.bits() + self.exp.unsigned_abs()
    }

    pub fn mul_pow2(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic {
            mant: self.mant.clone(),
            exp: self.exp + k,
        }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(rhs.exp);
        let a = &self.mant << (self.exp - e) as usize;
        let b = &rhs.mant << (rhs.exp - e) as usize;
        Dyadic::new(a + b, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            mant: -&self.mant,
            exp: self.exp,
        }
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mant * &rhs.mant, self.exp + rhs.exp)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let d = self - other;
        d.signum().cmp(&0)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic::from_int(v)
    }
}

impl From<BigInt> for Dyadic {
    fn from(v: BigInt) -> Self {
        Dyadic::from_int(v)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(i) = self.to_bigint() {
            write!(f, "{i}")
        } else {
            write!(f, "{}*2^{}", self.mant, self.exp)
        }
    }
}

/// Checks `d` is an integer of the form `2^k` and returns `k`.
pub fn log2_exact(d: &Dyadic) -> Option<i64> {
    if d.mant.is_one() {
        Some(d.exp)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_normalization() {
        let a = Dyadic::from_int(12);
        assert_eq!(a.exponent(), 2);
        assert_eq!(a.mantissa(), &BigInt::from(3));
        let half = Dyadic::pow2(-1);
        let s = &a + &half;
        assert!(!s.is_integer());
        assert_eq!(&(&s - &half) - &a, Dyadic::zero());
        assert_eq!((&half * &Dyadic::from_int(6)).to_i64(), Some(3));
        assert!(half < Dyadic::from_int(1));
        assert_eq!(log2_exact(&Dyadic::from_int(64)), Some(6));
        assert_eq!(log2_exact(&Dyadic::from_int(6)), None);
    }
}
