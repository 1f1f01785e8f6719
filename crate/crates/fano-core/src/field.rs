use crate::error::Error;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// Largest admissible prime modulus. Keeping p < 2^31 means a product of two
/// reduced residues fits in a u64 without overflow, so all F_p arithmetic
/// stays in plain integer registers.
pub const MAX_MODULUS: u64 = (1 << 31) - 1;

/// The coefficient field a computation runs over. Copyable context object:
/// all scalar arithmetic is dispatched through it so that `Scalar` itself
/// stays a dumb value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rationals,
    /// Invariant: the modulus is prime and lies in [2, 2^31).
    PrimeField(u64),
}

/// An element of a `FieldSpec`'s field. `Fp` values are always reduced to
/// [0, p); `Rat` values are always in lowest terms (BigRational reduces on
/// construction).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(BigRational),
    Fp(u64),
}

impl FieldSpec {
    pub fn rationals() -> Self {
        FieldSpec::Rationals
    }

    /// Checks primality (deterministic Miller-Rabin) and the 2^31 bound.
    pub fn prime_field(p: u64) -> Result<Self, Error> {
        if !(2..=MAX_MODULUS).contains(&p) || !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(FieldSpec::PrimeField(p))
    }

    pub fn modulus(&self) -> Option<u64> {
        match self {
            FieldSpec::Rationals => None,
            FieldSpec::PrimeField(p) => Some(*p),
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rat(BigRational::zero()),
            FieldSpec::PrimeField(_) => Scalar::Fp(0),
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rat(BigRational::one()),
            FieldSpec::PrimeField(_) => Scalar::Fp(1),
        }
    }

    pub fn integer(&self, n: i64) -> Scalar {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rat(BigRational::from_integer(n.clone())),
            FieldSpec::PrimeField(p) => {
                let m = BigInt::from(*p);
                let mut r = n % &m;
                if r.is_negative() {
                    r += &m;
                }
                Scalar::Fp(r.to_u64().expect("reduced residue fits u64"))
            }
        }
    }

    /// num/den as a field element; errors when den maps to zero (e.g. a
    /// denominator divisible by p).
    pub fn fraction(&self, num: &BigInt, den: &BigInt) -> Result<Scalar, Error> {
        let d = self.from_bigint(den);
        if self.is_zero(&d) {
            return Err(Error::DivisionByZero);
        }
        let n = self.from_bigint(num);
        self.div(&n, &d)
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Fp(x) => *x == 0,
        }
    }

    pub fn is_one(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Rat(r) => r.is_one(),
            Scalar::Fp(x) => *x == 1,
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (FieldSpec::Rationals, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x + y),
            (FieldSpec::PrimeField(p), Scalar::Fp(x), Scalar::Fp(y)) => {
                let s = x + y; // both < 2^31, no overflow
                Scalar::Fp(if s >= *p { s - p } else { s })
            }
            _ => panic!("scalar does not belong to this field"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (FieldSpec::Rationals, Scalar::Rat(x)) => Scalar::Rat(-x),
            (FieldSpec::PrimeField(p), Scalar::Fp(x)) => {
                Scalar::Fp(if *x == 0 { 0 } else { p - x })
            }
            _ => panic!("scalar does not belong to this field"),
        }
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (FieldSpec::Rationals, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x * y),
            (FieldSpec::PrimeField(p), Scalar::Fp(x), Scalar::Fp(y)) => Scalar::Fp(x * y % p),
            _ => panic!("scalar does not belong to this field"),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Result<Scalar, Error> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        Ok(match (self, a) {
            (FieldSpec::Rationals, Scalar::Rat(x)) => Scalar::Rat(x.recip()),
            (FieldSpec::PrimeField(p), Scalar::Fp(x)) => Scalar::Fp(pow_mod(*x, p - 2, *p)),
            _ => panic!("scalar does not belong to this field"),
        })
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Result<Scalar, Error> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &Scalar, e: u32) -> Scalar {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    /// True when `a` structurally belongs to this field.
    pub fn owns(&self, a: &Scalar) -> bool {
        matches!(
            (self, a),
            (FieldSpec::Rationals, Scalar::Rat(_)) | (FieldSpec::PrimeField(_), Scalar::Fp(_))
        )
    }
}

impl Scalar {
    /// Residue value of an F_p scalar.
    pub fn residue(&self) -> Option<u64> {
        match self {
            Scalar::Fp(x) => Some(*x),
            Scalar::Rat(_) => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rat(r) => Some(r),
            Scalar::Fp(_) => None,
        }
    }

    /// Exact JSON value: residues and integral rationals as numbers,
    /// proper fractions as "a/b" strings.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Scalar::Fp(x) => serde_json::json!(x),
            Scalar::Rat(r) => {
                if r.denom().is_one() {
                    crate::combi::big_to_value(r.numer())
                } else {
                    serde_json::Value::String(format!("{}/{}", r.numer(), r.denom()))
                }
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Fp(x) => write!(f, "{x}"),
        }
    }
}

/// a * b mod p for a, b < p < 2^31: the product fits in u64.
#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    debug_assert!(a < p && b < p && p <= MAX_MODULUS);
    a * b % p
}

/// Square-and-multiply exponentiation mod p (p < 2^31).
pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    debug_assert!((2..=MAX_MODULUS).contains(&p));
    base %= p;
    let mut acc = 1 % p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin. The witness set {2, 3, 5, 7} is exact for all
/// n < 3_215_031_751, which covers the full [2, 2^31) modulus range.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7] {
        if n == small {
            return true;
        }
        if n.is_multiple_of(small) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
