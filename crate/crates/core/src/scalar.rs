//! Scalar fields: arbitrary-precision rationals and prime fields.
//!
//! Every algebra in the crate is generic over [`Scalar`]. A scalar type comes
//! with a field descriptor ([`Scalar::Field`]) so that constants can be built
//! for prime fields whose modulus is only known at run time.

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An element of a field usable by the exact linear algebra.
pub trait Scalar:
    Clone
    + Eq
    + Hash
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Descriptor of the field an element lives in.
    type Field: FieldDescriptor;

    fn field(&self) -> Self::Field;
    fn zero(field: &Self::Field) -> Self;
    fn one(field: &Self::Field) -> Self;
    fn from_i64(field: &Self::Field, n: i64) -> Self;
    /// `num / den` in the field; `None` when `den` vanishes in it.
    fn from_ratio(field: &Self::Field, num: &BigInt, den: &BigInt) -> Option<Self>;
    fn is_zero(&self) -> bool;
    fn inv(&self) -> Option<Self>;

    fn is_one(&self) -> bool {
        *self == Self::one(&self.field())
    }

    fn add_ref(&self, other: &Self) -> Self {
        self.clone() + other.clone()
    }

    fn sub_ref(&self, other: &Self) -> Self {
        self.clone() - other.clone()
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }

    fn neg_ref(&self) -> Self {
        -self.clone()
    }
}

/// Identifies a concrete field (ℚ, or 𝔽_p for a given p).
pub trait FieldDescriptor: Clone + Eq + Hash + fmt::Debug + fmt::Display + Send + Sync + 'static {}

/// The field of rational numbers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct RationalField;

impl fmt::Display for RationalField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Q")
    }
}

impl FieldDescriptor for RationalField {}

impl Scalar for BigRational {
    type Field = RationalField;

    fn field(&self) -> RationalField {
        RationalField
    }

    fn zero(_: &RationalField) -> Self {
        <BigRational as Zero>::zero()
    }

    fn one(_: &RationalField) -> Self {
        <BigRational as One>::one()
    }

    fn from_i64(_: &RationalField, n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_ratio(_: &RationalField, num: &BigInt, den: &BigInt) -> Option<Self> {
        if den.is_zero() {
            None
        } else {
            Some(BigRational::new(num.clone(), den.clone()))
        }
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }

    fn is_one(&self) -> bool {
        One::is_one(self)
    }

    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }

    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn neg_ref(&self) -> Self {
        -self
    }
}

/// The prime field 𝔽_p, with p < 2³¹.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

/// Modulus used when the prime field is requested without one.
pub const DEFAULT_PRIME: u32 = 32003;

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p >= 1 << 31 || !is_prime(p) {
            return Err(Error::InvalidModulus(p));
        }
        Ok(PrimeField { p: p as u32 })
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn element(&self, n: i64) -> Fp {
        let r = n.rem_euclid(self.p as i64) as u32;
        Fp { value: r, p: self.p }
    }
}

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField { p: DEFAULT_PRIME }
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fp:{}", self.p)
    }
}

impl FieldDescriptor for PrimeField {}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A residue modulo a prime. The residue is always in `[0, p)`.
///
/// Arithmetic between residues of different moduli is a logic error and
/// panics; containers validate the field on construction.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u32,
    p: u32,
}

impl Fp {
    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    fn check(&self, other: &Fp) {
        assert_eq!(self.p, other.p, "field mismatch: Fp:{} vs Fp:{}", self.p, other.p);
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.p)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, o: Fp) -> Fp {
        self.check(&o);
        let s = self.value as u64 + o.value as u64;
        Fp { value: (s % self.p as u64) as u32, p: self.p }
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, o: Fp) -> Fp {
        self.check(&o);
        let s = self.value as u64 + self.p as u64 - o.value as u64;
        Fp { value: (s % self.p as u64) as u32, p: self.p }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, o: Fp) -> Fp {
        self.check(&o);
        let s = self.value as u64 * o.value as u64;
        Fp { value: (s % self.p as u64) as u32, p: self.p }
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        if self.value == 0 {
            self
        } else {
            Fp { value: self.p - self.value, p: self.p }
        }
    }
}

impl Scalar for Fp {
    type Field = PrimeField;

    fn field(&self) -> PrimeField {
        PrimeField { p: self.p }
    }

    fn zero(field: &PrimeField) -> Self {
        Fp { value: 0, p: field.p }
    }

    fn one(field: &PrimeField) -> Self {
        Fp { value: 1, p: field.p }
    }

    fn from_i64(field: &PrimeField, n: i64) -> Self {
        field.element(n)
    }

    fn from_ratio(field: &PrimeField, num: &BigInt, den: &BigInt) -> Option<Self> {
        let p = BigInt::from(field.p);
        let reduce = |n: &BigInt| n.mod_floor(&p).to_u32().expect("residue fits in u32");
        let d = Fp { value: reduce(den), p: field.p };
        let n = Fp { value: reduce(num), p: field.p };
        d.inv().map(|di| n * di)
    }

    fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn inv(&self) -> Option<Self> {
        if self.value == 0 {
            return None;
        }
        // Extended Euclid on (value, p).
        let (mut r0, mut r1) = (self.p as i64, self.value as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Some(Fp { value: t0.rem_euclid(self.p as i64) as u32, p: self.p })
    }

    fn is_one(&self) -> bool {
        self.value == 1
    }
}

/// Parse an integer or `p/q` literal into a scalar of the given field.
pub fn parse_literal<S: Scalar>(field: &S::Field, text: &str) -> Option<S> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
        None => (text.parse::<BigInt>().ok()?, BigInt::one()),
    };
    S::from_ratio(field, &num, &den)
}
