//! Dyadic rationals `m / 2^k` and the two-mode coefficient type.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact dyadic rational `num / 2^exp`, kept in lowest terms
/// (`num` odd, or `exp == 0`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    exp: u32,
}

impl Dyadic {
    pub fn new(num: impl Into<BigInt>, exp: u32) -> Self {
        let mut d = Dyadic { num: num.into(), exp };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic { num: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { num: BigInt::one(), exp: 0 }
    }

    pub fn from_int(v: i64) -> Self {
        Dyadic { num: BigInt::from(v), exp: 0 }
    }

    /// `2^k` for any integer `k`.
    pub fn pow2(k: i64) -> Self {
        if k >= 0 {
            Dyadic { num: BigInt::one() << (k as usize), exp: 0 }
        } else {
            Dyadic { num: BigInt::one(), exp: (-k) as u32 }
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0);
        let shift = tz.min(self.exp as u64);
        if shift > 0 {
            self.num >>= shift as usize;
            self.exp -= shift as u32;
        }
    }

    /// Exact conversion: every finite double is a dyadic rational.
    pub fn from_f64(v: f64) -> Result<Self> {
        if !v.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite coefficient {v}")));
        }
        if v == 0.0 {
            return Ok(Dyadic::zero());
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e) = if raw_exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), raw_exp - 1075) };
        let num = BigInt::from(mant) * sign;
        let d = if e >= 0 { Dyadic::new(num << (e as usize), 0) } else { Dyadic::new(num, (-e) as u32) };
        Ok(d)
    }

    /// Nearest double (truncating excess mantissa bits).
    pub fn to_f64(&self) -> f64 {
        if self.num.is_zero() {
            return 0.0;
        }
        let bits = self.num.bits();
        let mut num = self.num.clone();
        let mut scale = -(self.exp as i64);
        if bits > 62 {
            let shift = bits - 62;
            num >>= shift as usize;
            scale += shift as i64;
        }
        let m = num.to_i64().expect("62-bit numerator fits in i64") as f64;
        ldexp(m, scale)
    }

    /// Round to the nearest multiple of `2^-k` (ties away from zero).
    pub fn round_to(&self, k: i64) -> Dyadic {
        // target numerator = self * 2^k
        let scaled_exp = self.exp as i64 - k;
        if scaled_exp <= 0 {
            return self.clone();
        }
        let denom = BigInt::one() << (scaled_exp as usize);
        let (q, r) = self.num.div_rem(&denom);
        let twice = r.abs() * 2;
        let mut m = q;
        if twice >= denom {
            if self.num.is_negative() {
                m -= 1;
            } else {
                m += 1;
            }
        }
        if k >= 0 {
            Dyadic::new(m, k as u32)
        } else {
            Dyadic::new(m << ((-k) as usize), 0)
        }
    }

    pub fn pow(&self, e: u32) -> Dyadic {
        Dyadic { num: num_traits::pow(self.num.clone(), e as usize), exp: self.exp * e }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic { num: self.num.abs(), exp: self.exp }
    }
}

/// `m * 2^e` without intermediate overflow or underflow.
pub(crate) fn ldexp(m: f64, e: i64) -> f64 {
    let mut v = m;
    let mut e = e;
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    v * 2f64.powi(e as i32)
}

impl<'a> Add<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let (num, exp) = match self.exp.cmp(&rhs.exp) {
            Ordering::Equal => (&self.num + &rhs.num, self.exp),
            Ordering::Less => ((&self.num << ((rhs.exp - self.exp) as usize)) + &rhs.num, rhs.exp),
            Ordering::Greater => (&self.num + (&rhs.num << ((self.exp - rhs.exp) as usize)), self.exp),
        };
        Dyadic::new(num, exp)
    }
}

impl<'a> Sub<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.num * &rhs.num, self.exp + rhs.exp)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { num: -&self.num, exp: self.exp }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let diff = self - other;
        diff.num.sign().cmp(&num_bigint::Sign::NoSign)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.num, self.exp)
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    /// Accepts `m`, `m/2^k` and `m/d` with `d` a power of two.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed dyadic coefficient {s:?}"));
        let s = s.trim();
        let (num_s, den_s) = match s.split_once('/') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (s, None),
        };
        let num: BigInt = num_s.parse().map_err(|_| bad())?;
        let exp = match den_s {
            None => 0,
            Some(den) => {
                if let Some(k) = den.strip_prefix("2^") {
                    k.trim().parse::<u32>().map_err(|_| bad())?
                } else {
                    let d: BigInt = den.parse().map_err(|_| bad())?;
                    if !d.is_positive() {
                        return Err(bad());
                    }
                    let tz = d.trailing_zeros().unwrap_or(0);
                    if d != BigInt::one() << (tz as usize) {
                        return Err(Error::Parse(format!("denominator of {s:?} is not a power of two")));
                    }
                    tz as u32
                }
            }
        };
        Ok(Dyadic::new(num, exp))
    }
}

/// A polynomial coefficient: exact dyadic or double.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficient {
    Dyadic(Dyadic),
    Float(f64),
}

/// Float values with magnitude below this are treated as zero.
pub const FLOAT_ZERO: f64 = 1e-300;

impl Coefficient {
    pub fn to_f64(&self) -> f64 {
        match self {
            Coefficient::Dyadic(d) => d.to_f64(),
            Coefficient::Float(v) => *v,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Dyadic(d) => d.is_zero(),
            Coefficient::Float(v) => v.abs() < FLOAT_ZERO,
        }
    }

    pub fn is_dyadic(&self) -> bool {
        matches!(self, Coefficient::Dyadic(_))
    }

    pub fn as_dyadic(&self) -> Option<&Dyadic> {
        match self {
            Coefficient::Dyadic(d) => Some(d),
            Coefficient::Float(_) => None,
        }
    }

    /// Exact dyadic view of the value; floats convert exactly.
    pub fn to_dyadic(&self) -> Result<Dyadic> {
        match self {
            Coefficient::Dyadic(d) => Ok(d.clone()),
            Coefficient::Float(v) => Dyadic::from_f64(*v),
        }
    }

    /// Returns the sum and whether a dyadic operand was demoted to float.
    pub fn add(&self, other: &Coefficient) -> (Coefficient, bool) {
        match (self, other) {
            (Coefficient::Dyadic(a), Coefficient::Dyadic(b)) => (Coefficient::Dyadic(a + b), false),
            _ => (Coefficient::Float(self.to_f64() + other.to_f64()), self.is_dyadic() || other.is_dyadic()),
        }
    }

    pub fn mul(&self, other: &Coefficient) -> (Coefficient, bool) {
        match (self, other) {
            (Coefficient::Dyadic(a), Coefficient::Dyadic(b)) => (Coefficient::Dyadic(a * b), false),
            _ => (Coefficient::Float(self.to_f64() * other.to_f64()), self.is_dyadic() || other.is_dyadic()),
        }
    }

    pub fn neg(&self) -> Coefficient {
        match self {
            Coefficient::Dyadic(d) => Coefficient::Dyadic(-d),
            Coefficient::Float(v) => Coefficient::Float(-v),
        }
    }
}

impl From<Dyadic> for Coefficient {
    fn from(d: Dyadic) -> Self {
        Coefficient::Dyadic(d)
    }
}

impl From<f64> for Coefficient {
    fn from(v: f64) -> Self {
        Coefficient::Float(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms() {
        let d = Dyadic::new(12, 4);
        assert_eq!(d.numerator(), &BigInt::from(3));
        assert_eq!(d.exponent(), 2);
        assert_eq!(Dyadic::new(0, 9).exponent(), 0);
    }

    #[test]
    fn float_conversion_is_exact() {
        for v in [0.3, -1.0 / 3.0, 1e-310, 12345.678, -2.5e200] {
            let d = Dyadic::from_f64(v).unwrap();
            assert_eq!(d.to_f64(), v);
        }
        assert!(Dyadic::from_f64(f64::NAN).is_err());
    }

    #[test]
    fn parse_forms() {
        assert_eq!("5/16".parse::<Dyadic>().unwrap(), Dyadic::new(5, 4));
        assert_eq!("5/2^4".parse::<Dyadic>().unwrap(), Dyadic::new(5, 4));
        assert_eq!("-7".parse::<Dyadic>().unwrap(), Dyadic::from_int(-7));
        assert!("1/3".parse::<Dyadic>().is_err());
        assert!("x/2".parse::<Dyadic>().is_err());
        let d = Dyadic::new(-341, 10);
        assert_eq!(d.to_string().parse::<Dyadic>().unwrap(), d);
    }

    #[test]
    fn rounding() {
        let third = Dyadic::from_f64(1.0 / 3.0).unwrap();
        assert_eq!(third.round_to(10), Dyadic::new(341, 10));
        let x = Dyadic::from_f64(0.3).unwrap();
        assert_eq!(x.round_to(4), Dyadic::new(5, 4));
        assert_eq!(Dyadic::new(-3, 3).round_to(2), Dyadic::new(-2, 2));
        assert_eq!(Dyadic::new(5, 0).round_to(-2), Dyadic::from_int(4));
    }

    #[test]
    fn arithmetic() {
        let a = Dyadic::new(3, 2);
        let b = Dyadic::new(1, 3);
        assert_eq!(&a + &b, Dyadic::new(7, 3));
        assert_eq!(&a - &a, Dyadic::zero());
        assert_eq!(&a * &b, Dyadic::new(3, 5));
        assert!(b < a);
        assert_eq!(a.pow(3), Dyadic::new(27, 6));
        // even integer times a fraction cancels powers of two
        let prod = &Dyadic::from_int(12) * &Dyadic::new(1, 2);
        assert_eq!(prod, Dyadic::from_int(3));
        assert_eq!(prod.exponent(), 0);
    }

    #[test]
    fn mixing_demotes() {
        let a = Coefficient::Dyadic(Dyadic::new(1, 1));
        let (s, demoted) = a.add(&Coefficient::Float(0.25));
        assert_eq!(s, Coefficient::Float(0.75));
        assert!(demoted);
        assert!(!a.mul(&a).1);
    }
}
