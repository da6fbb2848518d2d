use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intervals::{exact_decompose, Interval};
use crate::numerics::{Rat, XReal};

use super::{FormalSum, StepProfile, Term};

/// Order in which the pairs `(input n, term m)` are visited.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Listing {
    /// By `n + m`, then by `n`.
    #[default]
    Diagonal,
    /// By `n`, then by `m`.
    Rowmajor,
}

impl Listing {
    pub fn order(self, lens: &[usize]) -> Vec<(usize, usize)> {
        let mut pairs: Vec<(usize, usize)> = lens
            .iter()
            .enumerate()
            .flat_map(|(n, &len)| (0..len).map(move |m| (n, m)))
            .collect();
        if self == Listing::Diagonal {
            pairs.sort_by_key(|&(n, m)| (n + m, n));
        }
        pairs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Progenitor {
    pub input: usize,
    pub term: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lift {
    pub u: Rat,
    pub v: Rat,
}

/// A piece `(coeff, set)` with its color and lift `[u, v) × set`, `v - u = coeff`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoredPiece {
    pub coeff: Rat,
    pub set: Interval,
    pub color: usize,
    pub lift: Lift,
    pub progenitor: Progenitor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoredPieces {
    pub inputs: usize,
    pub listing: Listing,
    pub pieces: Vec<ColoredPiece>,
}

impl ColoredPieces {
    /// The pieces of color `n` as a formal sum `F_n`.
    pub fn color_sum(&self, n: usize) -> FormalSum {
        FormalSum::from_pairs(
            self.pieces
                .iter()
                .filter(|p| p.color == n)
                .map(|p| (p.coeff.clone(), p.set.clone())),
        )
    }

    pub fn color_profile(&self, n: usize) -> StepProfile {
        super::evaluate(&self.color_sum(n))
    }

    /// The pieces coming from input `n`, with the index of each piece's
    /// progenitor term.
    pub fn input_decomposition(&self, n: usize) -> (FormalSum, Vec<usize>) {
        let mut terms = Vec::new();
        let mut witness = Vec::new();
        for p in self.pieces.iter().filter(|p| p.progenitor.input == n) {
            terms.push(Term::finite(p.coeff.clone(), p.set.clone()));
            witness.push(p.progenitor.term);
        }
        (FormalSum::new(terms).expect("finite pieces"), witness)
    }

    pub fn max_color(&self) -> Option<usize> {
        self.pieces.iter().map(|p| p.color).max()
    }
}

/// Procedure 1: visits the terms along `listing`, splits each at the atoms
/// of the running refinement and at earlier partial sums, and colors each
/// piece by how many other inputs already stand above its bottom.
///
/// For every point, the color-`n` pieces sum to the `(n+1)`-th greatest input
/// value there, and each input's pieces stack contiguously from 0.
pub fn procedure1(inputs: &[FormalSum], listing: Listing) -> Result<ColoredPieces> {
    for (n, c) in inputs.iter().enumerate() {
        for t in c.terms() {
            match &t.coeff {
                XReal::Finite(r) if !r.is_negative() => {}
                other => {
                    return Err(Error::domain(format!(
                        "procedure 1 needs finite nonnegative coefficients; input {n} has {other}"
                    )))
                }
            }
        }
    }
    let lens: Vec<usize> = inputs.iter().map(FormalSum::len).collect();
    let order = listing.order(&lens);
    let steps: Vec<(usize, &Interval, &Rat)> = order
        .iter()
        .map(|&(n, m)| {
            let t = &inputs[n].terms()[m];
            (n, &t.set, t.coeff.as_finite().expect("checked finite"))
        })
        .collect();

    let mut pieces = Vec::new();
    let mut seen: Vec<Interval> = Vec::with_capacity(steps.len());
    for (j, &(nj, set_j, a_j)) in steps.iter().enumerate() {
        seen.push(set_j.clone());
        let refinement = exact_decompose(&seen);
        for &atom in &refinement.origin_map[j] {
            let e = &refinement.atoms[atom];
            let x = e.sample_point();
            // running partial sums d_p on E, and every value they took before step j
            let mut d = vec![Rat::zero(); inputs.len()];
            let mut history: BTreeSet<Rat> = BTreeSet::new();
            for &(ni, set_i, a_i) in &steps[..j] {
                if set_i.contains(&x) {
                    d[ni] += a_i;
                }
                history.insert(d[ni].clone());
            }
            let c = d[nj].clone();
            let b = &c + a_j;
            d[nj] = b.clone();
            let mut cuts: Vec<Rat> = vec![c.clone()];
            cuts.extend(history.range(c.clone()..b.clone()).filter(|u| **u > c).cloned());
            cuts.push(b.clone());
            for w in cuts.windows(2) {
                let (u, v) = (&w[0], &w[1]);
                let color = d
                    .iter()
                    .enumerate()
                    .filter(|&(p, dp)| p != nj && dp > u)
                    .count();
                pieces.push(ColoredPiece {
                    coeff: v - u,
                    set: e.clone(),
                    color,
                    lift: Lift {
                        u: u.clone(),
                        v: v.clone(),
                    },
                    progenitor: Progenitor {
                        input: nj,
                        term: order[j].1,
                    },
                });
            }
        }
    }
    Ok(ColoredPieces {
        inputs: inputs.len(),
        listing,
        pieces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formal_sums::{evaluate, verify_decomposition};

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    fn co(a: i64, b: i64) -> Interval {
        Interval::closed_open(r(a), r(b))
    }

    fn one(c: i64, s: Interval) -> FormalSum {
        FormalSum::from_pairs([(r(c), s)])
    }

    #[test]
    fn listings() {
        assert_eq!(
            Listing::Diagonal.order(&[2, 2]),
            vec![(0, 0), (0, 1), (1, 0), (1, 1)]
        );
        assert_eq!(
            Listing::Diagonal.order(&[3, 3]),
            vec![(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (1, 2)]
        );
        assert_eq!(Listing::Rowmajor.order(&[1, 2]), vec![(0, 0), (1, 0), (1, 1)]);
    }

    #[test]
    fn two_overlapping_indicators() {
        let out = procedure1(&[one(1, co(0, 2)), one(1, co(1, 3))], Listing::Diagonal).unwrap();
        assert_eq!(out.color_profile(0), StepProfile::indicator(co(0, 3)));
        assert_eq!(out.color_profile(1), StepProfile::indicator(co(1, 2)));
    }

    #[test]
    fn single_input_is_color_zero() {
        let c = FormalSum::from_pairs([(r(2), co(0, 2)), (r(1), co(1, 3))]);
        let out = procedure1(&[c.clone()], Listing::Diagonal).unwrap();
        assert!(out.pieces.iter().all(|p| p.color == 0));
        assert_eq!(out.color_profile(0), evaluate(&c));
        let (child, witness) = out.input_decomposition(0);
        assert!(verify_decomposition(&c, &child, &witness));
    }

    #[test]
    fn stacked_masses() {
        let out = procedure1(&[one(2, co(0, 1)), one(1, co(0, 1))], Listing::Diagonal).unwrap();
        let mass = |n| -> Rat { out.pieces.iter().filter(|p| p.color == n).map(|p| p.coeff.clone()).sum() };
        assert_eq!(mass(0), r(2));
        assert_eq!(mass(1), r(1));
    }

    #[test]
    fn lifts_match_coefficients() {
        let out = procedure1(
            &[
                FormalSum::from_pairs([(r(1), co(0, 2)), (r(3), co(1, 2))]),
                one(2, co(0, 3)),
            ],
            Listing::Rowmajor,
        )
        .unwrap();
        for p in &out.pieces {
            assert_eq!(&p.lift.v - &p.lift.u, p.coeff);
        }
    }

    #[test]
    fn rejects_bad_coefficients() {
        let neg = one(-1, co(0, 1));
        assert_eq!(procedure1(&[neg], Listing::Diagonal).unwrap_err().name(), "DomainError");
        let inf = FormalSum::new(vec![Term::new(XReal::PosInf, co(0, 1))]).unwrap();
        assert!(procedure1(&[inf], Listing::Diagonal).is_err());
    }
}
