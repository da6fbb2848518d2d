//! Exact rationals and the four-valued extended reals.
//!
//! `XReal` adds `+inf`, `-inf` and the indefinite infinity `~inf` (the value of
//! `(+inf) - (+inf)`) to the rationals. Sums of extended reals are computed by
//! summing positive and negative parts separately, so they are independent of
//! order and grouping.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An arbitrary-precision rational, always in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(numer: i64, denom: i64) -> Rat {
        assert!(denom != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_int(n: i64) -> Rat {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Rat {
        Rat(BigRational::zero())
    }

    pub fn one() -> Rat {
        Rat(BigRational::one())
    }

    /// `2^-k`
    pub fn dyadic(k: u32) -> Rat {
        Rat(BigRational::new(BigInt::one(), BigInt::one() << k))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// Smallest integer `>= self`, as an unsigned count. Negative values map to 0.
    pub fn ceil_usize(&self) -> usize {
        if !self.is_positive() {
            return 0;
        }
        let (q, r) = self.0.numer().div_rem(self.0.denom());
        let q = q.to_usize().expect("ceiling exceeds usize");
        if r.is_zero() {
            q
        } else {
            q + 1
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn midpoint(a: &Rat, b: &Rat) -> Rat {
        (a + b) / Rat::from_int(2)
    }

    pub fn min_of<'a>(a: &'a Rat, b: &'a Rat) -> &'a Rat {
        if a <= b {
            a
        } else {
            b
        }
    }

    pub fn max_of<'a>(a: &'a Rat, b: &'a Rat) -> &'a Rat {
        if a >= b {
            a
        } else {
            b
        }
    }

    pub fn pos_part(&self) -> Rat {
        if self.is_positive() {
            self.clone()
        } else {
            Rat::zero()
        }
    }

    pub fn neg_part(&self) -> Rat {
        if self.is_negative() {
            -self
        } else {
            Rat::zero()
        }
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = Error;

    /// Accepts `"p/q"` (any sign on `p`, `q != 0`, reduced on parse) or a bare
    /// integer `"p"`.
    fn from_str(s: &str) -> Result<Rat> {
        let s = s.trim();
        let bad = || Error::Parse(format!("invalid rational {s:?}"));
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Rat(BigRational::new(n, d)))
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Rat {
        Rat::from_int(n)
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! rat_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &'a Rat) -> Rat {
                Rat((self.0).$method(&rhs.0))
            }
        }
        impl<'a> $trait<Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((&self.0).$method(rhs.0))
            }
        }
        impl<'a, 'b> $trait<&'b Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: &'b Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
    };
}

rat_binop!(Add, add);
rat_binop!(Sub, sub);
rat_binop!(Mul, mul);
rat_binop!(Div, div);

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

impl AddAssign<Rat> for Rat {
    fn add_assign(&mut self, rhs: Rat) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        self.0 -= &rhs.0;
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rat> for Rat {
    fn sum<I: Iterator<Item = &'a Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

/// A value of `[0, +inf]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum XNonneg {
    Finite(Rat),
    PosInf,
}

impl XNonneg {
    pub fn zero() -> XNonneg {
        XNonneg::Finite(Rat::zero())
    }

    /// Panics when `r` is negative.
    pub fn finite(r: Rat) -> XNonneg {
        assert!(!r.is_negative(), "XNonneg::finite given a negative value {r}");
        XNonneg::Finite(r)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, XNonneg::Finite(r) if r.is_zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, XNonneg::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&Rat> {
        match self {
            XNonneg::Finite(r) => Some(r),
            XNonneg::PosInf => None,
        }
    }

    /// Product with a nonnegative rational; `inf * 0 = 0`.
    pub fn scale(&self, k: &Rat) -> XNonneg {
        debug_assert!(!k.is_negative());
        match self {
            XNonneg::Finite(r) => XNonneg::Finite(r * k),
            XNonneg::PosInf if k.is_zero() => XNonneg::zero(),
            XNonneg::PosInf => XNonneg::PosInf,
        }
    }

    /// `self - other` as an extended real, with `inf - inf = ~inf`.
    pub fn minus(&self, other: &XNonneg) -> XReal {
        match (self, other) {
            (XNonneg::Finite(a), XNonneg::Finite(b)) => XReal::Finite(a - b),
            (XNonneg::PosInf, XNonneg::Finite(_)) => XReal::PosInf,
            (XNonneg::Finite(_), XNonneg::PosInf) => XReal::NegInf,
            (XNonneg::PosInf, XNonneg::PosInf) => XReal::BothInf,
        }
    }

    pub fn to_xreal(&self) -> XReal {
        match self {
            XNonneg::Finite(r) => XReal::Finite(r.clone()),
            XNonneg::PosInf => XReal::PosInf,
        }
    }
}

impl Default for XNonneg {
    fn default() -> Self {
        XNonneg::zero()
    }
}

impl PartialOrd for XNonneg {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for XNonneg {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (XNonneg::Finite(a), XNonneg::Finite(b)) => a.cmp(b),
            (XNonneg::Finite(_), XNonneg::PosInf) => Ordering::Less,
            (XNonneg::PosInf, XNonneg::Finite(_)) => Ordering::Greater,
            (XNonneg::PosInf, XNonneg::PosInf) => Ordering::Equal,
        }
    }
}

impl Add for &XNonneg {
    type Output = XNonneg;
    fn add(self, rhs: &XNonneg) -> XNonneg {
        match (self, rhs) {
            (XNonneg::Finite(a), XNonneg::Finite(b)) => XNonneg::Finite(a + b),
            _ => XNonneg::PosInf,
        }
    }
}

impl Add for XNonneg {
    type Output = XNonneg;
    fn add(self, rhs: XNonneg) -> XNonneg {
        &self + &rhs
    }
}

impl AddAssign<&XNonneg> for XNonneg {
    fn add_assign(&mut self, rhs: &XNonneg) {
        *self = &*self + rhs;
    }
}

impl Sum for XNonneg {
    fn sum<I: Iterator<Item = XNonneg>>(iter: I) -> XNonneg {
        iter.fold(XNonneg::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a XNonneg> for XNonneg {
    fn sum<I: Iterator<Item = &'a XNonneg>>(iter: I) -> XNonneg {
        iter.fold(XNonneg::zero(), |acc, x| &acc + x)
    }
}

impl fmt::Display for XNonneg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XNonneg::Finite(r) => write!(f, "{r}"),
            XNonneg::PosInf => f.write_str("+inf"),
        }
    }
}

impl fmt::Debug for XNonneg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for XNonneg {
    type Err = Error;
    fn from_str(s: &str) -> Result<XNonneg> {
        match s.trim() {
            "+inf" => Ok(XNonneg::PosInf),
            other => {
                let r: Rat = other.parse()?;
                if r.is_negative() {
                    Err(Error::Parse(format!("expected a nonnegative value, got {r}")))
                } else {
                    Ok(XNonneg::Finite(r))
                }
            }
        }
    }
}

impl Serialize for XNonneg {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for XNonneg {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<XNonneg, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An element of the extended reals `Q ∪ {+inf, -inf, ~inf}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum XReal {
    Finite(Rat),
    PosInf,
    NegInf,
    /// The indefinite infinity arising from `(+inf) - (+inf)`.
    BothInf,
}

impl XReal {
    pub fn zero() -> XReal {
        XReal::Finite(Rat::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, XReal::Finite(_))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, XReal::Finite(r) if r.is_zero())
    }

    pub fn as_finite(&self) -> Option<&Rat> {
        match self {
            XReal::Finite(r) => Some(r),
            _ => None,
        }
    }

    /// `(|a|+, |a|-)`; both parts of `~inf` are `+inf`.
    pub fn parts(&self) -> (XNonneg, XNonneg) {
        match self {
            XReal::Finite(r) => (XNonneg::Finite(r.pos_part()), XNonneg::Finite(r.neg_part())),
            XReal::PosInf => (XNonneg::PosInf, XNonneg::zero()),
            XReal::NegInf => (XNonneg::zero(), XNonneg::PosInf),
            XReal::BothInf => (XNonneg::PosInf, XNonneg::PosInf),
        }
    }

    pub fn neg(&self) -> XReal {
        match self {
            XReal::Finite(r) => XReal::Finite(-r),
            XReal::PosInf => XReal::NegInf,
            XReal::NegInf => XReal::PosInf,
            XReal::BothInf => XReal::BothInf,
        }
    }

    /// The relation `<=` on `R*`: the usual order on `[-inf, +inf]` together with
    /// `-inf <= ~inf`, `~inf <= ~inf` and `~inf <= +inf`.
    pub fn le(&self, other: &XReal) -> bool {
        use XReal::*;
        match (self, other) {
            (BothInf, BothInf) | (NegInf, BothInf) | (BothInf, PosInf) => true,
            (BothInf, _) | (_, BothInf) => false,
            (a, b) => ordinary_key(a) <= ordinary_key(b),
        }
    }

    /// `a <=' b`: `a <= b` or `b = ~inf`.
    pub fn le_right_primed(&self, other: &XReal) -> bool {
        matches!(other, XReal::BothInf) || self.le(other)
    }

    /// `a '<=' b`: `a <= b`, or either side is `~inf`.
    pub fn le_primed(&self, other: &XReal) -> bool {
        matches!(self, XReal::BothInf) || self.le_right_primed(other)
    }
}

/// Total order on `[-inf, +inf]`. Not defined for `~inf`.
fn ordinary_key(x: &XReal) -> (i8, Option<&Rat>) {
    match x {
        XReal::NegInf => (-1, None),
        XReal::Finite(r) => (0, Some(r)),
        XReal::PosInf => (1, None),
        XReal::BothInf => unreachable!("~inf has no ordinary position"),
    }
}

impl From<Rat> for XReal {
    fn from(r: Rat) -> XReal {
        XReal::Finite(r)
    }
}

impl fmt::Display for XReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XReal::Finite(r) => write!(f, "{r}"),
            XReal::PosInf => f.write_str("+inf"),
            XReal::NegInf => f.write_str("-inf"),
            XReal::BothInf => f.write_str("~inf"),
        }
    }
}

impl fmt::Debug for XReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for XReal {
    type Err = Error;
    fn from_str(s: &str) -> Result<XReal> {
        match s.trim() {
            "+inf" => Ok(XReal::PosInf),
            "-inf" => Ok(XReal::NegInf),
            "~inf" => Ok(XReal::BothInf),
            other => other.parse().map(XReal::Finite),
        }
    }
}

impl Serialize for XReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for XReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<XReal, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Extended sum `(Σ|a|+) - (Σ|a|-)`.
pub fn ext_sum<'a, I>(terms: I) -> XReal
where
    I: IntoIterator<Item = &'a XReal>,
{
    let mut pos = XNonneg::zero();
    let mut neg = XNonneg::zero();
    for t in terms {
        let (p, n) = t.parts();
        pos += &p;
        neg += &n;
    }
    pos.minus(&neg)
}

pub fn pos_neg_parts(a: &XReal) -> (XNonneg, XNonneg) {
    a.parts()
}

/// The symmetric relation `'='`: equal, or one side is `~inf`.
pub fn primed_eq(a: &XReal, b: &XReal) -> bool {
    a == b || matches!(a, XReal::BothInf) || matches!(b, XReal::BothInf)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremum {
    Sup,
    Inf,
}

/// Supremum or infimum "except `n` elements".
///
/// The ordinary variant reads `~inf` as `+inf` under `Sup` and `-inf` under
/// `Inf`; the primed variant does the opposite. After that substitution the
/// result is the `(n+1)`-th greatest (resp. least) entry.
pub fn trimmed_extremum(values: &[XReal], n: usize, kind: Extremum, primed: bool) -> Result<XReal> {
    if n >= values.len() {
        return Err(Error::domain(format!(
            "cannot drop {n} of {} values",
            values.len()
        )));
    }
    let as_pos = matches!((kind, primed), (Extremum::Sup, false) | (Extremum::Inf, true));
    let mut resolved: Vec<XReal> = values
        .iter()
        .map(|v| match v {
            XReal::BothInf if as_pos => XReal::PosInf,
            XReal::BothInf => XReal::NegInf,
            other => other.clone(),
        })
        .collect();
    resolved.sort_by(|a, b| ordinary_key(a).cmp(&ordinary_key(b)));
    Ok(match kind {
        Extremum::Sup => resolved[resolved.len() - 1 - n].clone(),
        Extremum::Inf => resolved[n].clone(),
    })
}

/// `(n+1)`-th greatest of finitely many rationals. Panics on `n >= len`.
pub fn nth_greatest(values: &[Rat], n: usize) -> Rat {
    let mut v: Vec<&Rat> = values.iter().collect();
    v.sort();
    v[v.len() - 1 - n].clone()
}
