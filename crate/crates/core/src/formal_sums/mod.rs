//! Finite formal sums `{(c_λ, C_λ)}` of extended-real coefficients on
//! intervals, their pointwise values, and the decomposition calculus.

mod decompose;
mod procedure1;
mod profile;
mod refine;

pub use decompose::verify_decomposition;
pub use procedure1::{procedure1, ColoredPiece, ColoredPieces, Listing, Progenitor};
pub use profile::StepProfile;
pub use refine::{
    common_refine, four_corner, minmax, subdecompose_dominated, FourCorner, MinMax, Refinement,
    SubDecomposition,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intervals::{exact_decompose, Interval};
use crate::numerics::{ext_sum, Rat, XNonneg, XReal};

/// One coefficient pair. The coefficient is never `~inf`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub coeff: XReal,
    pub set: Interval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Pos,
    Neg,
}

impl Term {
    pub fn new(coeff: impl Into<XReal>, set: Interval) -> Term {
        Term {
            coeff: coeff.into(),
            set,
        }
    }

    pub fn finite(coeff: Rat, set: Interval) -> Term {
        Term::new(XReal::Finite(coeff), set)
    }

    pub fn nonneg(mag: XNonneg, set: Interval) -> Term {
        Term::new(mag.to_xreal(), set)
    }

    /// Which side of `C = -C⁻ ∪̇ C⁺` the term lives on. Zero terms count as
    /// positive.
    pub fn side(&self) -> Side {
        match &self.coeff {
            XReal::NegInf => Side::Neg,
            XReal::Finite(r) if r.is_negative() => Side::Neg,
            _ => Side::Pos,
        }
    }

    /// `|c|`, the magnitude on the term's own side.
    pub fn magnitude(&self) -> XNonneg {
        let (p, n) = self.coeff.parts();
        match self.side() {
            Side::Pos => p,
            Side::Neg => n,
        }
    }

    fn is_trivial(&self) -> bool {
        self.coeff.is_zero() || self.set.is_empty()
    }
}

/// A finite formal sum. Zero coefficients and empty sets are dropped on
/// construction; the order of the remaining terms is kept and indexes them.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct FormalSum {
    terms: Vec<Term>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFormalSum {
    terms: Vec<Term>,
}

impl<'de> Deserialize<'de> for FormalSum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawFormalSum::deserialize(d)?;
        FormalSum::new(raw.terms).map_err(serde::de::Error::custom)
    }
}

impl FormalSum {
    pub fn new(terms: Vec<Term>) -> Result<FormalSum> {
        if let Some(t) = terms.iter().find(|t| t.coeff == XReal::BothInf) {
            return Err(Error::domain(format!(
                "coefficient ~inf is not allowed (term on {})",
                t.set
            )));
        }
        Ok(FormalSum {
            terms: terms.into_iter().filter(|t| !t.is_trivial()).collect(),
        })
    }

    pub fn empty() -> FormalSum {
        FormalSum::default()
    }

    /// Builds from finite `(coefficient, set)` pairs.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Rat, Interval)>) -> FormalSum {
        FormalSum {
            terms: pairs
                .into_iter()
                .map(|(c, s)| Term::finite(c, s))
                .filter(|t| !t.is_trivial())
                .collect(),
        }
    }

    pub fn from_nonneg(pairs: impl IntoIterator<Item = (XNonneg, Interval)>) -> FormalSum {
        FormalSum {
            terms: pairs
                .into_iter()
                .map(|(c, s)| Term::nonneg(c, s))
                .filter(|t| !t.is_trivial())
                .collect(),
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.terms.iter().all(|t| t.side() == Side::Pos)
    }

    pub fn is_finite(&self) -> bool {
        self.terms.iter().all(|t| t.coeff.is_finite())
    }

    /// Disjoint union `self ∪̇ other`; indices of `other` are shifted by `self.len()`.
    pub fn concat(&self, other: &FormalSum) -> FormalSum {
        FormalSum {
            terms: self.terms.iter().chain(&other.terms).cloned().collect(),
        }
    }

    pub fn negate(&self) -> FormalSum {
        FormalSum {
            terms: self
                .terms
                .iter()
                .map(|t| Term::new(t.coeff.neg(), t.set.clone()))
                .collect(),
        }
    }

    /// `C⁺` with the original index of each kept term.
    pub fn positive_part(&self) -> (FormalSum, Vec<usize>) {
        self.side_part(Side::Pos)
    }

    /// `C⁻` (as a nonnegative sum) with the original index of each kept term.
    pub fn negative_part(&self) -> (FormalSum, Vec<usize>) {
        self.side_part(Side::Neg)
    }

    fn side_part(&self, side: Side) -> (FormalSum, Vec<usize>) {
        let mut terms = Vec::new();
        let mut origin = Vec::new();
        for (k, t) in self.terms.iter().enumerate() {
            if t.side() == side {
                terms.push(Term::nonneg(t.magnitude(), t.set.clone()));
                origin.push(k);
            }
        }
        (FormalSum { terms }, origin)
    }

    pub fn sets(&self) -> Vec<Interval> {
        self.terms.iter().map(|t| t.set.clone()).collect()
    }

    /// `C^Σ(q)`.
    pub fn value_at(&self, q: &Rat) -> XReal {
        ext_sum(self.terms.iter().filter(|t| t.set.contains(q)).map(|t| &t.coeff))
    }

    pub(crate) fn require_nonnegative(&self, what: &str) -> Result<()> {
        if self.is_nonnegative() {
            Ok(())
        } else {
            Err(Error::domain(format!("{what} must be a nonnegative formal sum")))
        }
    }
}

/// The pointwise value `C^Σ` as an exact step profile.
pub fn evaluate(c: &FormalSum) -> StepProfile {
    let part = exact_decompose(&c.sets());
    let pieces = part
        .atoms
        .iter()
        .enumerate()
        .map(|(a, atom)| {
            let value = ext_sum(part.covering(a).into_iter().map(|t| &c.terms[t].coeff));
            (atom.clone(), value)
        })
        .collect();
    StepProfile::from_disjoint(pieces)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    fn co(a: i64, b: i64) -> Interval {
        Interval::closed_open(r(a), r(b))
    }

    #[test]
    fn evaluate_examples() {
        let c = FormalSum::from_pairs([(r(2), co(0, 1)), (r(-1), co(0, 2))]);
        let p = evaluate(&c);
        assert_eq!(p.value_at(&r(0)), XReal::Finite(r(1)));
        assert_eq!(p.value_at(&Rat::new(3, 2)), XReal::Finite(r(-1)));
        assert_eq!(p.value_at(&r(2)), XReal::zero());
        assert_eq!(
            p.pieces(),
            &[(co(0, 1), XReal::Finite(r(1))), (co(1, 2), XReal::Finite(r(-1)))]
        );

        let c = FormalSum::new(vec![
            Term::new(XReal::PosInf, co(0, 1)),
            Term::new(XReal::NegInf, co(0, 1)),
        ])
        .unwrap();
        assert_eq!(evaluate(&c).value_at(&r(0)), XReal::BothInf);
        assert_eq!(c.value_at(&r(0)), XReal::BothInf);

        assert!(evaluate(&FormalSum::empty()).pieces().is_empty());
    }

    #[test]
    fn normalization_drops_trivial_terms() {
        let c = FormalSum::from_pairs([(r(0), co(0, 1)), (r(1), Interval::empty()), (r(3), co(0, 1))]);
        assert_eq!(c.len(), 1);
        assert!(FormalSum::new(vec![Term::new(XReal::BothInf, co(0, 1))]).is_err());
    }

    #[test]
    fn sides() {
        let c = FormalSum::new(vec![
            Term::finite(r(2), co(0, 1)),
            Term::new(XReal::NegInf, co(0, 2)),
            Term::finite(r(-3), co(1, 2)),
        ])
        .unwrap();
        let (p, po) = c.positive_part();
        let (n, no) = c.negative_part();
        assert_eq!(po, vec![0]);
        assert_eq!(no, vec![1, 2]);
        assert_eq!(p.terms()[0].coeff, XReal::Finite(r(2)));
        assert_eq!(n.terms()[0].coeff, XReal::PosInf);
        assert_eq!(n.terms()[1].coeff, XReal::Finite(r(3)));
    }

    #[test]
    fn json_round_trip() {
        let s = r#"{"terms":[{"coeff":"-inf","set":{"lo":"0","lo_closed":true,"hi":"1","hi_closed":false}},{"coeff":"1/2","set":{"lo":"0","lo_closed":true,"hi":"1","hi_closed":true}}]}"#;
        let c: FormalSum = serde_json::from_str(s).unwrap();
        assert_eq!(c.len(), 2);
        let back: FormalSum = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<FormalSum>(r#"{"terms":[{"coeff":"~inf","set":{"lo":"0","lo_closed":true,"hi":"1","hi_closed":false}}]}"#).is_err());
    }
}
