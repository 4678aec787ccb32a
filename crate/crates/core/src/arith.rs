//! Exact coefficient arithmetic over prime fields GF(p) and the rationals.
//!
//! Every value is kept in canonical form: residues live in `[0, p)` and
//! rationals are reduced with a positive denominator. Prime fields are limited
//! to `p < 2^16` so products of two residues fit in a `u32` before reduction.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest admissible characteristic (exclusive).
pub const MAX_CHARACTERISTIC: u32 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("field mismatch: {0} vs {1}")]
    SpecMismatch(Field, Field),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("literal {literal} is not an element of {field}")]
    Literal { literal: String, field: Field },
}

/// The coefficient field of a ring: GF(p) for a prime `p < 2^16`, or ℚ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Field {
    Prime(u32),
    Rational,
}

impl Field {
    pub fn prime(p: u32) -> Result<Field, ArithError> {
        if p >= MAX_CHARACTERISTIC {
            return Err(ArithError::InvalidField(format!(
                "GF({p}): characteristic must be below 2^16"
            )));
        }
        if !is_prime(p) {
            return Err(ArithError::InvalidField(format!("GF({p}): {p} is not prime")));
        }
        Ok(Field::Prime(p))
    }

    pub fn characteristic(self) -> u32 {
        match self {
            Field::Prime(p) => p,
            Field::Rational => 0,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Field::Prime(_))
    }

    /// Number of elements, `None` for ℚ.
    pub fn order(self) -> Option<u32> {
        match self {
            Field::Prime(p) => Some(p),
            Field::Rational => None,
        }
    }

    /// All elements of a finite field in residue order; empty for ℚ.
    pub fn elements(self) -> impl Iterator<Item = Scalar> {
        let p = self.order().unwrap_or(0);
        (0..p).map(move |value| Scalar::Gf { p, value })
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Prime(p) => write!(f, "GF({p})"),
            Field::Rational => write!(f, "QQ"),
        }
    }
}

impl std::str::FromStr for Field {
    type Err = ArithError;

    /// Accepts `GF(p)`, `QQ` and `Q`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "QQ" || s == "Q" {
            return Ok(Field::Rational);
        }
        let inner = s
            .strip_prefix("GF(")
            .and_then(|rest| rest.strip_suffix(')'))
            .ok_or_else(|| ArithError::InvalidField(s.to_string()))?;
        let p: u32 = inner
            .trim()
            .parse()
            .map_err(|_| ArithError::InvalidField(s.to_string()))?;
        Field::prime(p)
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Inverse of `a` modulo the prime `p` by the extended Euclidean algorithm.
pub fn mod_inverse(a: u32, p: u32) -> Option<u32> {
    let (mut r0, mut r1) = (p as i64, (a % p) as i64);
    let (mut s0, mut s1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(p as i64) as u32)
}

/// An exact field element tagged with its field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Gf { p: u32, value: u32 },
    Rat(BigRational),
}

impl Scalar {
    pub fn zero(field: Field) -> Scalar {
        Scalar::from_i64(field, 0)
    }

    pub fn one(field: Field) -> Scalar {
        Scalar::from_i64(field, 1)
    }

    pub fn from_i64(field: Field, n: i64) -> Scalar {
        match field {
            Field::Prime(p) => Scalar::Gf {
                p,
                value: n.rem_euclid(p as i64) as u32,
            },
            Field::Rational => Scalar::Rat(BigRational::from_integer(BigInt::from(n))),
        }
    }

    pub fn from_bigint(field: Field, n: &BigInt) -> Scalar {
        match field {
            Field::Prime(p) => {
                let r = n.mod_floor(&BigInt::from(p));
                Scalar::Gf {
                    p,
                    value: r.to_u32().expect("residue fits"),
                }
            }
            Field::Rational => Scalar::Rat(BigRational::from_integer(n.clone())),
        }
    }

    /// `num / den` as an element of `field`; fails when `den` vanishes there.
    pub fn from_ratio(field: Field, num: &BigInt, den: &BigInt) -> Result<Scalar, ArithError> {
        match field {
            Field::Rational => {
                if den.is_zero() {
                    return Err(ArithError::DivisionByZero);
                }
                Ok(Scalar::Rat(BigRational::new(num.clone(), den.clone())))
            }
            Field::Prime(_) => {
                let d = Scalar::from_bigint(field, den);
                if d.is_zero() {
                    return Err(ArithError::Literal {
                        literal: format!("{num}/{den}"),
                        field,
                    });
                }
                Scalar::from_bigint(field, num).try_div(&d)
            }
        }
    }

    /// The residue of a prime-field element.
    pub fn residue(&self) -> Option<u32> {
        match self {
            Scalar::Gf { value, .. } => Some(*value),
            Scalar::Rat(_) => None,
        }
    }

    pub fn field(&self) -> Field {
        match self {
            Scalar::Gf { p, .. } => Field::Prime(*p),
            Scalar::Rat(_) => Field::Rational,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Gf { value, .. } => *value == 0,
            Scalar::Rat(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Gf { value, .. } => *value == 1,
            Scalar::Rat(r) => r.is_one(),
        }
    }

    /// Re-establishes canonical form. Every constructor already produces
    /// canonical values, so this is the identity on anything built here.
    pub fn canonical(&self) -> Scalar {
        match self {
            Scalar::Gf { p, value } => Scalar::Gf {
                p: *p,
                value: value % p,
            },
            Scalar::Rat(r) => Scalar::Rat(BigRational::new(r.numer().clone(), r.denom().clone())),
        }
    }

    fn check(&self, other: &Scalar) -> Result<(), ArithError> {
        if self.field() != other.field() {
            return Err(ArithError::SpecMismatch(self.field(), other.field()));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar, ArithError> {
        self.check(other)?;
        Ok(match (self, other) {
            (Scalar::Gf { p, value: a }, Scalar::Gf { value: b, .. }) => Scalar::Gf {
                p: *p,
                value: (a + b) % p,
            },
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            _ => unreachable!(),
        })
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar, ArithError> {
        self.check(other)?;
        Ok(match (self, other) {
            (Scalar::Gf { p, value: a }, Scalar::Gf { value: b, .. }) => Scalar::Gf {
                p: *p,
                value: (a + p - b) % p,
            },
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a - b),
            _ => unreachable!(),
        })
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar, ArithError> {
        self.check(other)?;
        Ok(match (self, other) {
            (Scalar::Gf { p, value: a }, Scalar::Gf { value: b, .. }) => Scalar::Gf {
                p: *p,
                value: a * b % p,
            },
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            _ => unreachable!(),
        })
    }

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar, ArithError> {
        self.check(other)?;
        let inv = other.inverse()?;
        self.try_mul(&inv)
    }

    pub fn inverse(&self) -> Result<Scalar, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(match self {
            Scalar::Gf { p, value } => Scalar::Gf {
                p: *p,
                value: mod_inverse(*value, *p).expect("p is prime"),
            },
            Scalar::Rat(r) => Scalar::Rat(r.recip()),
        })
    }

    pub fn pow(&self, mut e: u32) -> Scalar {
        let mut base = self.clone();
        let mut acc = Scalar::one(self.field());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Parses a literal of the printed grammar: an optionally signed integer,
    /// optionally followed by `/` and a positive integer.
    pub fn parse(field: Field, text: &str) -> Result<Scalar, ArithError> {
        let bad = || ArithError::Literal {
            literal: text.to_string(),
            field,
        };
        let t = text.trim();
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        if !den.is_positive() {
            return Err(bad());
        }
        Scalar::from_ratio(field, &num, &den).map_err(|_| bad())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Gf { value, .. } => write!(f, "{value}"),
            Scalar::Rat(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

// Operator forms panic on mismatched fields. Polynomial code only combines
// scalars from one ring, where the fields agree by construction.

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.try_add(rhs).expect("scalar field mismatch")
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.try_sub(rhs).expect("scalar field mismatch")
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.try_mul(rhs).expect("scalar field mismatch")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Gf { p, value } => Scalar::Gf {
                p: *p,
                value: (p - value) % p,
            },
            Scalar::Rat(r) => Scalar::Rat(-r),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf(p: u32, v: i64) -> Scalar {
        Scalar::from_i64(Field::Prime(p), v)
    }

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::from_ratio(Field::Rational, &BigInt::from(n), &BigInt::from(d)).unwrap()
    }

    #[test]
    fn worked_examples() {
        assert_eq!(&gf(2, 1) + &gf(2, 1), gf(2, 0));
        assert_eq!(&q(1, 2) * &q(2, 3), q(1, 3));
        assert_eq!(gf(7, 3).try_div(&gf(7, 5)).unwrap(), gf(7, 2));
        assert_eq!(gf(2, 1).inverse().unwrap(), gf(2, 1));
        assert_eq!(gf(5, 2).inverse().unwrap(), gf(5, 3));
        assert_eq!(q(4, 9).inverse().unwrap(), q(9, 4));
    }

    #[test]
    fn extended_euclid_matches_brute_force() {
        for p in [2u32, 3, 5, 7, 11, 13, 65521] {
            for a in (1..p).take(200) {
                let inv = mod_inverse(a, p).unwrap();
                assert_eq!((a as u64 * inv as u64) % p as u64, 1);
            }
        }
        assert_eq!(mod_inverse(0, 7), None);
    }

    #[test]
    fn error_paths() {
        assert_eq!(gf(5, 0).inverse(), Err(ArithError::DivisionByZero));
        assert_eq!(gf(5, 1).try_div(&gf(5, 0)), Err(ArithError::DivisionByZero));
        assert!(matches!(gf(5, 1).try_add(&gf(7, 1)), Err(ArithError::SpecMismatch(..))));
        assert!(matches!(gf(5, 1).try_mul(&q(1, 2)), Err(ArithError::SpecMismatch(..))));
        assert!(Field::prime(4).is_err());
        assert!(Field::prime(65537).is_err());
        assert!(Field::prime(65521).is_ok());
    }

    #[test]
    fn printing_and_parsing() {
        assert_eq!(q(-3, 6).to_string(), "-1/2");
        assert_eq!(q(4, 2).to_string(), "2");
        assert_eq!(gf(7, -1).to_string(), "6");
        assert_eq!(Scalar::parse(Field::Rational, "-1/2").unwrap(), q(-1, 2));
        assert_eq!(Scalar::parse(Field::Prime(3), "1/2").unwrap(), gf(3, 2));
        assert!(matches!(
            Scalar::parse(Field::Prime(2), "1/2"),
            Err(ArithError::Literal { .. })
        ));
        assert_eq!("GF(13)".parse::<Field>().unwrap(), Field::Prime(13));
        assert_eq!("QQ".parse::<Field>().unwrap(), Field::Rational);
        assert!("GF(9)".parse::<Field>().is_err());
    }

    fn field_strategy() -> impl Strategy<Value = Field> {
        prop_oneof![
            Just(Field::Prime(2)),
            Just(Field::Prime(3)),
            Just(Field::Prime(13)),
            Just(Field::Prime(65521)),
            Just(Field::Rational),
        ]
    }

    fn triple() -> impl Strategy<Value = (Scalar, Scalar, Scalar)> {
        field_strategy().prop_flat_map(|field| {
            let elem = (-50i64..50, 1i64..20).prop_map(move |(n, d)| match field {
                Field::Rational => Scalar::from_ratio(field, &n.into(), &d.into()).unwrap(),
                Field::Prime(_) => Scalar::from_i64(field, n * 1013 + d),
            });
            (elem.clone(), elem.clone(), elem)
        })
    }

    proptest! {
        #[test]
        fn field_axioms((a, b, c) in triple()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!((&a + &(-&a)).is_zero());
            prop_assert_eq!(&(&a - &b) + &b, a.clone());
            if !a.is_zero() {
                prop_assert!((&a * &a.inverse().unwrap()).is_one());
            }
        }

        #[test]
        fn canonical_form_is_idempotent((a, b, _c) in triple()) {
            let x = &a * &b;
            prop_assert_eq!(x.canonical(), x.clone());
            prop_assert_eq!(x.canonical().canonical(), x.canonical());
            prop_assert_eq!(Scalar::parse(x.field(), &x.to_string()).unwrap(), x);
        }
    }
}
