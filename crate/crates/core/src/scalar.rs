//! Coefficient fields.
//!
//! Polynomial arithmetic and Groebner computations are generic over [`Field`].
//! Three implementations ship with the crate: [`Rational`] (exact, arbitrary
//! precision), [`Zp`] (integers modulo the Mersenne prime 2^61 - 1) and `f64`
//! (used only for numeric replay of a previously recorded exact computation).

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

/// Real floating point scalar (`f32` or `f64`) for the aerodynamic model and
/// the eigenvalue routines.
pub trait Real:
    num_traits::Float + num_traits::FloatConst + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    fn lit(x: f64) -> Self {
        <Self as num_traits::NumCast>::from(x).expect("representable literal")
    }

    fn as_f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).expect("finite cast")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// A commutative field usable as polynomial coefficient ring.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    /// `true` when equality with zero is decided without rounding.
    const EXACT: bool;

    fn mul_ref(&self, other: &Self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self;
    fn add_ref(&self, other: &Self) -> Self;
    fn inv(&self) -> Self;

    /// Maps an `f64` into the field. Finite floats are exact dyadic rationals,
    /// so for exact fields this is lossless. Returns `None` for non-finite
    /// input or when the value has no image (denominator divisible by p).
    fn from_f64(x: f64) -> Option<Self>;

    fn from_i64(x: i64) -> Self;

    /// Nearest `f64`; only meaningful for fields embedded in the reals.
    fn to_f64(&self) -> f64;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }
}

/// Exact dyadic rational equal to a finite `f64`.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        return Some(Rational::zero());
    }
    let bits = x.to_bits();
    let negative = bits >> 63 == 1;
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mantissa, exp) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_bits - 1075)
    };
    let mut num = BigInt::from(mantissa);
    if negative {
        num = -num;
    }
    let r = if exp >= 0 {
        Rational::from_integer(num << exp as usize)
    } else {
        Rational::new(num, BigInt::one() << (-exp) as usize)
    };
    Some(r)
}

impl Field for Rational {
    const EXACT: bool = true;

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn inv(&self) -> Self {
        self.recip()
    }
    fn from_f64(x: f64) -> Option<Self> {
        rational_from_f64(x)
    }
    fn from_i64(x: i64) -> Self {
        Rational::from_integer(BigInt::from(x))
    }
    fn to_f64(&self) -> f64 {
        // BigRational::to_f64 is correctly rounded for large operands.
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl Field for f64 {
    const EXACT: bool = false;

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn inv(&self) -> Self {
        1.0 / self
    }
    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }
    fn from_i64(x: i64) -> Self {
        x as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

/// The Mersenne prime 2^61 - 1.
pub const MODULUS: u64 = (1u64 << 61) - 1;

/// Element of the prime field Z/(2^61 - 1).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Zp(u64);

impl Zp {
    pub fn new(v: u64) -> Self {
        Zp(v % MODULUS)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn reduce128(x: u128) -> u64 {
        // 2^61 = 1 (mod p): fold the high bits twice.
        let lo = (x as u64) & MODULUS;
        let hi = (x >> 61) as u64;
        let mut r = lo + (hi & MODULUS) + (hi >> 61);
        while r >= MODULUS {
            r -= MODULUS;
        }
        r
    }

    fn pow(self, mut e: u64) -> Zp {
        let mut base = self;
        let mut acc = Zp(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Image of an exact rational; `None` if p divides the denominator.
    pub fn from_rational(r: &Rational) -> Option<Zp> {
        let p = BigInt::from(MODULUS);
        let reduce = |n: &BigInt| -> Zp {
            let m = n.mod_floor(&p);
            let (_, digits) = m.to_u64_digits();
            Zp(digits.first().copied().unwrap_or(0))
        };
        let den = reduce(r.denom());
        if den.0 == 0 {
            return None;
        }
        Some(reduce(r.numer()) / den)
    }
}

impl fmt::Debug for Zp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Zp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for Zp {
    type Output = Zp;
    fn add(self, o: Zp) -> Zp {
        let mut r = self.0 + o.0;
        if r >= MODULUS {
            r -= MODULUS;
        }
        Zp(r)
    }
}

impl Sub for Zp {
    type Output = Zp;
    fn sub(self, o: Zp) -> Zp {
        if self.0 >= o.0 {
            Zp(self.0 - o.0)
        } else {
            Zp(self.0 + MODULUS - o.0)
        }
    }
}

impl Mul for Zp {
    type Output = Zp;
    fn mul(self, o: Zp) -> Zp {
        Zp(Zp::reduce128(self.0 as u128 * o.0 as u128))
    }
}

impl Div for Zp {
    type Output = Zp;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Zp) -> Zp {
        self * o.inv()
    }
}

impl Neg for Zp {
    type Output = Zp;
    fn neg(self) -> Zp {
        if self.0 == 0 {
            self
        } else {
            Zp(MODULUS - self.0)
        }
    }
}

impl Zero for Zp {
    fn zero() -> Self {
        Zp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl One for Zp {
    fn one() -> Self {
        Zp(1)
    }
}

impl Field for Zp {
    const EXACT: bool = true;

    fn mul_ref(&self, other: &Self) -> Self {
        *self * *other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        *self - *other
    }
    fn add_ref(&self, other: &Self) -> Self {
        *self + *other
    }
    fn inv(&self) -> Self {
        assert!(self.0 != 0, "inverse of zero in Z/p");
        self.pow(MODULUS - 2)
    }
    fn from_f64(x: f64) -> Option<Self> {
        rational_from_f64(x).and_then(|r| Zp::from_rational(&r))
    }
    fn from_i64(x: i64) -> Self {
        if x >= 0 {
            Zp::new(x as u64)
        } else {
            -Zp::new(x.unsigned_abs())
        }
    }
    fn to_f64(&self) -> f64 {
        self.0 as f64
    }
}

/// Bit length of the larger of numerator and denominator; a cheap size
/// measure for coefficient growth diagnostics.
pub fn rational_bits(r: &Rational) -> u64 {
    r.numer().bits().max(r.denom().bits())
}
