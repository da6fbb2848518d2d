use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intervals::{exact_decompose, pairwise_disjoint, Interval};
use crate::numerics::{Rat, XReal};

use super::{FormalSum, Term};

/// A step function with finitely many pieces, 0 off the pieces.
///
/// Kept in canonical form: pieces sorted, pairwise disjoint, nonzero, and no
/// two touching pieces with the same value. Two profiles are equal as
/// functions iff they are equal as values.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StepProfile {
    pieces: Vec<(Interval, XReal)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfilePiece {
    set: Interval,
    value: XReal,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    pieces: Vec<ProfilePiece>,
}

impl Serialize for StepProfile {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawProfile {
            pieces: self
                .pieces
                .iter()
                .map(|(set, value)| ProfilePiece {
                    set: set.clone(),
                    value: value.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StepProfile {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawProfile::deserialize(d)?;
        StepProfile::new(raw.pieces.into_iter().map(|p| (p.set, p.value)).collect())
            .map_err(serde::de::Error::custom)
    }
}

fn touching(a: &Interval, b: &Interval) -> bool {
    a.hi() == b.lo() && a.hi_closed() != b.lo_closed()
}

impl StepProfile {
    /// Fails when the pieces overlap.
    pub fn new(pieces: Vec<(Interval, XReal)>) -> Result<StepProfile> {
        let sets: Vec<Interval> = pieces.iter().map(|(s, _)| s.clone()).collect();
        if !pairwise_disjoint(&sets) {
            return Err(Error::domain("step profile pieces overlap"));
        }
        Ok(StepProfile::from_disjoint(pieces))
    }

    pub(crate) fn from_disjoint(mut pieces: Vec<(Interval, XReal)>) -> StepProfile {
        pieces.retain(|(s, v)| !s.is_empty() && !v.is_zero());
        pieces.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Interval, XReal)> = Vec::with_capacity(pieces.len());
        for (set, value) in pieces {
            if let Some((last, last_value)) = out.last_mut() {
                if *last_value == value && touching(last, &set) {
                    *last = Interval::new(
                        last.lo().clone(),
                        last.lo_closed(),
                        set.hi().clone(),
                        set.hi_closed(),
                    );
                    continue;
                }
            }
            out.push((set, value));
        }
        StepProfile { pieces: out }
    }

    pub fn zero() -> StepProfile {
        StepProfile::default()
    }

    /// `value · χ_set`.
    pub fn constant(value: impl Into<XReal>, set: Interval) -> StepProfile {
        StepProfile::from_disjoint(vec![(set, value.into())])
    }

    pub fn indicator(set: Interval) -> StepProfile {
        StepProfile::constant(Rat::one(), set)
    }

    /// Finite-valued profile from disjoint `(set, value)` pairs.
    pub fn from_rat_pieces(pieces: impl IntoIterator<Item = (Interval, Rat)>) -> Result<StepProfile> {
        StepProfile::new(pieces.into_iter().map(|(s, v)| (s, XReal::Finite(v))).collect())
    }

    pub fn pieces(&self) -> &[(Interval, XReal)] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn support(&self) -> Vec<Interval> {
        self.pieces.iter().map(|(s, _)| s.clone()).collect()
    }

    pub fn value_at(&self, q: &Rat) -> XReal {
        let idx = self.pieces.partition_point(|(s, _)| s.hi() < q);
        self.pieces[idx..]
            .iter()
            .take(2)
            .find(|(s, _)| s.contains(q))
            .map(|(_, v)| v.clone())
            .unwrap_or_else(XReal::zero)
    }

    /// Rational value at `q`; `None` for an infinite value.
    pub fn rat_at(&self, q: &Rat) -> Option<Rat> {
        self.value_at(q).as_finite().cloned()
    }

    pub fn is_finite(&self) -> bool {
        self.pieces.iter().all(|(_, v)| v.is_finite())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.pieces.iter().all(|(_, v)| match v {
            XReal::Finite(r) => r.is_positive(),
            XReal::PosInf => true,
            _ => false,
        })
    }

    /// Pointwise `f(self, other)` on the joint refinement. `f(0, 0)` must be 0.
    pub fn combine(&self, other: &StepProfile, f: impl Fn(&XReal, &XReal) -> XReal) -> StepProfile {
        let sets: Vec<Interval> = self.support().into_iter().chain(other.support()).collect();
        let part = exact_decompose(&sets);
        let pieces = part
            .atoms
            .into_iter()
            .map(|atom| {
                let q = atom.sample_point();
                let v = f(&self.value_at(&q), &other.value_at(&q));
                (atom, v)
            })
            .collect();
        StepProfile::from_disjoint(pieces)
    }

    /// Pointwise `f(self)`. `f(0)` must be 0.
    pub fn map(&self, f: impl Fn(&XReal) -> XReal) -> StepProfile {
        StepProfile::from_disjoint(self.pieces.iter().map(|(s, v)| (s.clone(), f(v))).collect())
    }

    /// Pointwise map of a finite profile. Panics on an infinite value.
    pub fn map_rat(&self, f: impl Fn(&Rat) -> Rat) -> StepProfile {
        self.map(|v| XReal::Finite(f(v.as_finite().expect("finite profile"))))
    }

    /// Pointwise combination of finite profiles. Panics on an infinite value.
    pub fn combine_rat(&self, other: &StepProfile, f: impl Fn(&Rat, &Rat) -> Rat) -> StepProfile {
        self.combine(other, |a, b| {
            XReal::Finite(f(
                a.as_finite().expect("finite profile"),
                b.as_finite().expect("finite profile"),
            ))
        })
    }

    /// Pointwise extended sum.
    pub fn add(&self, other: &StepProfile) -> StepProfile {
        self.combine(other, |a, b| crate::numerics::ext_sum([a, b]))
    }

    /// Canonical atomization: one term per piece, with `~inf` pieces split
    /// into a `+inf` and a `-inf` term.
    pub fn to_formal_sum(&self) -> FormalSum {
        let mut terms = Vec::new();
        for (set, value) in &self.pieces {
            match value {
                XReal::BothInf => {
                    terms.push(Term::new(XReal::PosInf, set.clone()));
                    terms.push(Term::new(XReal::NegInf, set.clone()));
                }
                v => terms.push(Term::new(v.clone(), set.clone())),
            }
        }
        FormalSum::new(terms).expect("no ~inf coefficients")
    }
}
