//! Exact scalars and the field backends used by every rank computation.
//!
//! Structure constants, differentials and maps are always stored as
//! arbitrary-precision rationals. Reductions (rank, kernels, normal forms)
//! run over a [`Field`] backend: the rationals themselves, or a prime field
//! reached by reducing the stored rationals modulo `p`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced fraction with positive denominator.
pub type Rational = BigRational;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `(-1)^e` as a rational.
pub fn sign(e: i64) -> Rational {
    if e.rem_euclid(2) == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Serializes as `"p/q"`; integers keep the `/1` so every entry has the same shape.
pub fn format_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not an exact rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

/// Arithmetic backend for eliminations.
pub trait Field: Send + Sync {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Panics on zero; callers only invert pivots.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    #[allow(clippy::wrong_self_convention)]
    fn from_rational(&self, x: &Rational) -> Result<Self::Elem>;
    /// Canonical rational lift (for `F_p`, the representative in `[0, p)`).
    fn to_rational(&self, a: &Self::Elem) -> Rational;
    fn characteristic(&self) -> u64;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = Rational;

    fn zero(&self) -> Rational {
        Rational::zero()
    }
    fn one(&self) -> Rational {
        Rational::one()
    }
    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }
    fn sub(&self, a: &Rational, b: &Rational) -> Rational {
        a - b
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn neg(&self, a: &Rational) -> Rational {
        -a
    }
    fn inv(&self, a: &Rational) -> Rational {
        a.recip()
    }
    fn from_rational(&self, x: &Rational) -> Result<Rational> {
        Ok(x.clone())
    }
    fn to_rational(&self, a: &Rational) -> Rational {
        a.clone()
    }
    fn characteristic(&self) -> u64 {
        0
    }
}

/// `Z/pZ` for a prime `p < 2^32` (products fit in `u64`).
#[derive(Clone, Copy, Debug)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !(2..(1 << 32)).contains(&p) || !is_prime(p) {
            return Err(Error::Parse(format!("{p} is not a supported prime")));
        }
        Ok(Self { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    fn pow(&self, mut b: u64, mut e: u64) -> u64 {
        let mut r = 1u64;
        b %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % self.p;
            }
            b = b * b % self.p;
            e >>= 1;
        }
        r
    }

    fn reduce_int(&self, n: &BigInt) -> u64 {
        let p = BigInt::from(self.p);
        n.mod_floor(&p).to_u64().expect("residue fits in u64")
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2;
    while i * i <= n {
        if n.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn inv(&self, a: &u64) -> u64 {
        assert!(*a != 0, "inverting zero in F_{}", self.p);
        self.pow(*a, self.p - 2)
    }
    fn from_rational(&self, x: &Rational) -> Result<u64> {
        let d = self.reduce_int(x.denom());
        if d == 0 {
            return Err(Error::CharDivision {
                prime: self.p,
                detail: format!("denominator of {} vanishes", format_rational(x)),
            });
        }
        Ok(self.mul(&self.reduce_int(x.numer()), &self.inv(&d)))
    }
    fn to_rational(&self, a: &u64) -> Rational {
        Rational::from_integer(BigInt::from(*a))
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
}

/// Which field the reductions run over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldKind {
    Rational,
    Prime(u64),
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::Rational => write!(f, "rational"),
            FieldKind::Prime(p) => write!(f, "fp:{p}"),
        }
    }
}

impl FromStr for FieldKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "rational" | "q" | "Q" => Ok(FieldKind::Rational),
            other => {
                let p = other
                    .strip_prefix("fp:")
                    .and_then(|p| p.parse::<u64>().ok())
                    .ok_or_else(|| Error::Parse(format!("unknown field {other:?}")))?;
                PrimeField::new(p)?;
                Ok(FieldKind::Prime(p))
            }
        }
    }
}

/// Computation settings threaded through every operation that reduces matrices.
///
/// `shuffle` re-orders every basis (deterministically from the seed) before a
/// reduction; reported dimensions must not change.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Exact {
    pub field: FieldKind,
    pub shuffle: Option<u64>,
}

impl Default for Exact {
    fn default() -> Self {
        Self::rational()
    }
}

impl Exact {
    pub fn rational() -> Self {
        Self { field: FieldKind::Rational, shuffle: None }
    }

    pub fn prime(p: u64) -> Result<Self> {
        PrimeField::new(p)?;
        Ok(Self { field: FieldKind::Prime(p), shuffle: None })
    }

    pub fn with_shuffle(mut self, seed: u64) -> Self {
        self.shuffle = Some(seed);
        self
    }

    pub fn characteristic(&self) -> u64 {
        match self.field {
            FieldKind::Rational => 0,
            FieldKind::Prime(p) => p,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fractions_are_reduced() {
        let x = frac(6, -4);
        assert_eq!(x.numer(), &BigInt::from(-3));
        assert_eq!(x.denom(), &BigInt::from(2));
        assert_eq!(format_rational(&x), "-3/2");
        assert_eq!(format_rational(&q(4)), "4/1");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(parse_rational(" 7 ").unwrap(), q(7));
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(f.inv(&3), 5);
        assert_eq!(f.from_rational(&frac(1, 2)).unwrap(), 4);
        assert!(f.from_rational(&frac(1, 7)).is_err());
        assert!(PrimeField::new(9).is_err());
    }

    #[test]
    fn field_kind_parses() {
        assert_eq!("rational".parse::<FieldKind>().unwrap(), FieldKind::Rational);
        assert_eq!("fp:101".parse::<FieldKind>().unwrap(), FieldKind::Prime(101));
        assert!("fp:100".parse::<FieldKind>().is_err());
    }

    proptest! {
        #[test]
        fn serialized_scalars_round_trip(n in -10_000i64..10_000, d in 1i64..500) {
            let x = frac(n, d);
            prop_assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
        }
    }
}
