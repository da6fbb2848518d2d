//! Common refinements of nonnegative formal sums.
//!
//! Everything here works atom by atom on the joint exact decomposition of
//! both sides: over an atom, each side is a stack of magnitudes, and the two
//! stacks are matched against each other (`overlay`). Every term is thereby
//! set-split into atoms and then number-split into matched pieces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intervals::{exact_decompose, Interval};
use crate::numerics::{primed_eq, Rat, XNonneg};

use super::{evaluate, procedure1, FormalSum, Listing, Term};

/// One matched piece: magnitude, and the term on each side it comes from.
type Matched = (XNonneg, Option<usize>, Option<usize>);

/// Matches two stacks whose totals satisfy `Σ left ≤ Σ right`. Right-side
/// excess is returned with no left progenitor.
fn overlay(left: &[(usize, XNonneg)], right: &[(usize, XNonneg)]) -> Vec<Matched> {
    let left_total: XNonneg = left.iter().map(|(_, m)| m).sum();
    let right_total: XNonneg = right.iter().map(|(_, m)| m).sum();
    debug_assert!(left_total <= right_total);
    if right_total.is_finite() {
        return overlay_finite(left, right);
    }
    let first_inf = |side: &[(usize, XNonneg)]| {
        side.iter()
            .find(|(_, m)| !m.is_finite())
            .map(|(k, _)| *k)
    };
    let r_inf = first_inf(right).expect("infinite total has an infinite term");
    let mut out = Vec::new();
    match first_inf(left) {
        None => {
            for (k, m) in left {
                out.push((m.clone(), Some(*k), Some(r_inf)));
            }
            for (k, m) in right {
                out.push((m.clone(), None, Some(*k)));
            }
        }
        Some(l_inf) => {
            for (k, m) in left.iter().filter(|(_, m)| m.is_finite()) {
                out.push((m.clone(), Some(*k), Some(r_inf)));
            }
            for (k, m) in right.iter().filter(|(_, m)| m.is_finite()) {
                out.push((m.clone(), Some(l_inf), Some(*k)));
            }
            for (l, _) in left.iter().filter(|(_, m)| !m.is_finite()) {
                for (r, _) in right.iter().filter(|(_, m)| !m.is_finite()) {
                    out.push((XNonneg::PosInf, Some(*l), Some(*r)));
                }
            }
        }
    }
    out
}

fn overlay_finite(left: &[(usize, XNonneg)], right: &[(usize, XNonneg)]) -> Vec<Matched> {
    let heights = |side: &[(usize, XNonneg)]| -> Vec<(Rat, Rat, usize)> {
        let mut h = Rat::zero();
        side.iter()
            .map(|(k, m)| {
                let lo = h.clone();
                h += m.as_finite().expect("finite stack");
                (lo, h.clone(), *k)
            })
            .collect()
    };
    let ls = heights(left);
    let rs = heights(right);
    let mut cuts: Vec<Rat> = ls
        .iter()
        .chain(&rs)
        .flat_map(|(lo, hi, _)| [lo.clone(), hi.clone()])
        .collect();
    cuts.sort();
    cuts.dedup();
    let find = |stack: &[(Rat, Rat, usize)], h: &Rat| {
        stack
            .iter()
            .find(|(lo, hi, _)| lo <= h && h < hi)
            .map(|(_, _, k)| *k)
    };
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let r = find(&rs, &w[0]);
        if r.is_none() {
            continue;
        }
        out.push((XNonneg::Finite(&w[1] - &w[0]), find(&ls, &w[0]), r));
    }
    out
}

/// Atoms of the joint decomposition with each side's stack over the atom.
fn joint_stacks(
    left: &FormalSum,
    right: &FormalSum,
) -> Vec<(Interval, Vec<(usize, XNonneg)>, Vec<(usize, XNonneg)>)> {
    let sets: Vec<Interval> = left.sets().into_iter().chain(right.sets()).collect();
    let part = exact_decompose(&sets);
    let nl = left.len();
    (0..part.atoms.len())
        .map(|a| {
            let mut ls = Vec::new();
            let mut rs = Vec::new();
            for k in part.covering(a) {
                if k < nl {
                    ls.push((k, left.terms()[k].magnitude()));
                } else {
                    rs.push((k - nl, right.terms()[k - nl].magnitude()));
                }
            }
            (part.atoms[a].clone(), ls, rs)
        })
        .collect()
}

fn total(stack: &[(usize, XNonneg)]) -> XNonneg {
    stack.iter().map(|(_, m)| m).sum()
}

/// A formal sum into which two others decompose, with both witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refinement {
    pub sum: FormalSum,
    pub left_witness: Vec<usize>,
    pub right_witness: Vec<usize>,
}

/// A common refinement of two nonnegative formal sums with equal profiles.
pub fn common_refine(c1: &FormalSum, c2: &FormalSum) -> Result<Refinement> {
    c1.require_nonnegative("common_refine input")?;
    c2.require_nonnegative("common_refine input")?;
    let mut terms = Vec::new();
    let mut lw = Vec::new();
    let mut rw = Vec::new();
    for (atom, ls, rs) in joint_stacks(c1, c2) {
        let (lt, rt) = (total(&ls), total(&rs));
        if lt != rt {
            return Err(Error::ProfileMismatch {
                atom,
                left: lt.to_string(),
                right: rt.to_string(),
            });
        }
        for (m, l, r) in overlay(&ls, &rs) {
            terms.push(Term::nonneg(m, atom.clone()));
            lw.push(l.expect("equal totals leave no excess"));
            rw.push(r.expect("right side covers every piece"));
        }
    }
    Ok(Refinement {
        sum: FormalSum::new(terms)?,
        left_witness: lw,
        right_witness: rw,
    })
}

/// `c → c′` and `d → c′ ∪̇ e`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubDecomposition {
    pub c_prime: FormalSum,
    pub e: FormalSum,
    /// Progenitor in `c` of each term of `c_prime`.
    pub c_witness: Vec<usize>,
    /// Progenitor in `d` of each term of `c_prime ∪̇ e`.
    pub d_witness: Vec<usize>,
}

/// Splits a dominating sum `d` into a copy of (a decomposition of) `c` and a
/// nonnegative remainder.
pub fn subdecompose_dominated(c: &FormalSum, d: &FormalSum) -> Result<SubDecomposition> {
    c.require_nonnegative("dominated sum")?;
    d.require_nonnegative("dominating sum")?;
    let mut c_terms = Vec::new();
    let mut e_terms = Vec::new();
    let mut cw = Vec::new();
    let mut dw_c = Vec::new();
    let mut dw_e = Vec::new();
    for (atom, ls, rs) in joint_stacks(c, d) {
        let (lt, rt) = (total(&ls), total(&rs));
        if lt > rt {
            return Err(Error::Domination {
                atom,
                lhs: lt.to_string(),
                rhs: rt.to_string(),
            });
        }
        for (m, l, r) in overlay(&ls, &rs) {
            let r = r.expect("right side covers every piece");
            match l {
                Some(l) => {
                    c_terms.push(Term::nonneg(m, atom.clone()));
                    cw.push(l);
                    dw_c.push(r);
                }
                None => {
                    e_terms.push(Term::nonneg(m, atom.clone()));
                    dw_e.push(r);
                }
            }
        }
    }
    dw_c.extend(dw_e);
    Ok(SubDecomposition {
        c_prime: FormalSum::new(c_terms)?,
        e: FormalSum::new(e_terms)?,
        c_witness: cw,
        d_witness: dw_c,
    })
}

/// `c ∪̇ d → e_min ∪̇ e_max` with pointwise min and max profiles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinMax {
    pub e_min: FormalSum,
    pub e_max: FormalSum,
    /// Progenitor in `c ∪̇ d` of each term of `e_min ∪̇ e_max`.
    pub witness: Vec<usize>,
}

pub fn minmax(c: &FormalSum, d: &FormalSum) -> Result<MinMax> {
    let pieces = procedure1(&[c.clone(), d.clone()], Listing::Diagonal)?;
    let mut min_terms = Vec::new();
    let mut max_terms = Vec::new();
    let mut min_w = Vec::new();
    let mut max_w = Vec::new();
    for p in &pieces.pieces {
        let origin = p.progenitor.term + if p.progenitor.input == 0 { 0 } else { c.len() };
        let term = Term::finite(p.coeff.clone(), p.set.clone());
        if p.color == 0 {
            max_terms.push(term);
            max_w.push(origin);
        } else {
            min_terms.push(term);
            min_w.push(origin);
        }
    }
    min_w.extend(max_w);
    Ok(MinMax {
        e_min: FormalSum::new(min_terms)?,
        e_max: FormalSum::new(max_terms)?,
        witness: min_w,
    })
}

/// One corner: a nonnegative sum whose pieces each carry two progenitors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corner {
    pub sum: FormalSum,
    /// `(index in the left part, index in the right part)` per term; the
    /// parts are `C⁻`/`D⁺` on the left and `C⁺`/`D⁻` on the right, indexed as
    /// returned by `positive_part`/`negative_part`.
    pub witness: Vec<(usize, usize)>,
}

/// `c⁺ → e_c ∪̇ e_plus`, `c⁻ → e_c ∪̇ e_minus`, `d⁺ → e_d ∪̇ e_plus`,
/// `d⁻ → e_d ∪̇ e_minus`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourCorner {
    pub e_c: Corner,
    pub e_minus: Corner,
    pub e_plus: Corner,
    pub e_d: Corner,
}

impl FourCorner {
    /// Rechecks all four decompositions.
    pub fn verify(&self, c: &FormalSum, d: &FormalSum) -> bool {
        let (cp, _) = c.positive_part();
        let (cm, _) = c.negative_part();
        let (dp, _) = d.positive_part();
        let (dm, _) = d.negative_part();
        let check = |parent: &FormalSum, a: &Corner, b: &Corner, pick: fn(&(usize, usize)) -> usize| {
            let child = a.sum.concat(&b.sum);
            let witness: Vec<usize> = a.witness.iter().chain(&b.witness).map(pick).collect();
            super::verify_decomposition(parent, &child, &witness)
        };
        let left = |w: &(usize, usize)| w.0;
        let right = |w: &(usize, usize)| w.1;
        check(&cp, &self.e_c, &self.e_plus, right)
            && check(&cm, &self.e_c, &self.e_minus, left)
            && check(&dp, &self.e_d, &self.e_plus, left)
            && check(&dm, &self.e_d, &self.e_minus, right)
    }
}

/// Common refinement of `C⁻ ∪̇ D⁺` and `C⁺ ∪̇ D⁻`, sorted by where each
/// piece's two progenitors come from.
pub fn four_corner(c: &FormalSum, d: &FormalSum) -> Result<FourCorner> {
    let pc = evaluate(c);
    let pd = evaluate(d);
    let sets: Vec<Interval> = pc.support().into_iter().chain(pd.support()).collect();
    for atom in exact_decompose(&sets).atoms {
        let q = atom.sample_point();
        let (vc, vd) = (pc.value_at(&q), pd.value_at(&q));
        if !primed_eq(&vc, &vd) {
            return Err(Error::ProfileMismatch {
                atom,
                left: vc.to_string(),
                right: vd.to_string(),
            });
        }
    }
    let (cp, _) = c.positive_part();
    let (cm, _) = c.negative_part();
    let (dp, _) = d.positive_part();
    let (dm, _) = d.negative_part();
    let left = cm.concat(&dp);
    let right = cp.concat(&dm);
    let refined = common_refine(&left, &right)?;

    let mut corners: [(Vec<Term>, Vec<(usize, usize)>); 4] = Default::default();
    for (k, t) in refined.sum.terms().iter().enumerate() {
        let (l, r) = (refined.left_witness[k], refined.right_witness[k]);
        let (from_cm, li) = if l < cm.len() { (true, l) } else { (false, l - cm.len()) };
        let (from_cp, ri) = if r < cp.len() { (true, r) } else { (false, r - cp.len()) };
        let slot = match (from_cm, from_cp) {
            (true, true) => 0,
            (true, false) => 1,
            (false, true) => 2,
            (false, false) => 3,
        };
        corners[slot].0.push(t.clone());
        corners[slot].1.push((li, ri));
    }
    let [e_c, e_minus, e_plus, e_d] = corners.map(|(terms, witness)| Corner {
        sum: FormalSum::new(terms).expect("refined terms are valid"),
        witness,
    });
    Ok(FourCorner {
        e_c,
        e_minus,
        e_plus,
        e_d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formal_sums::{verify_decomposition, StepProfile};
    use crate::numerics::XReal;

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    fn co(a: i64, b: i64) -> Interval {
        Interval::closed_open(r(a), r(b))
    }

    fn fs(pairs: &[(i64, Interval)]) -> FormalSum {
        FormalSum::from_pairs(pairs.iter().map(|(c, s)| (r(*c), s.clone())))
    }

    #[test]
    fn common_refine_examples() {
        let c1 = fs(&[(1, co(0, 2))]);
        let c2 = fs(&[(1, co(0, 1)), (1, co(1, 2))]);
        let out = common_refine(&c1, &c2).unwrap();
        assert_eq!(out.sum, c2);
        assert!(verify_decomposition(&c1, &out.sum, &out.left_witness));
        assert!(verify_decomposition(&c2, &out.sum, &out.right_witness));

        let c1 = fs(&[(2, co(0, 1))]);
        let c2 = fs(&[(1, co(0, 1)), (1, co(0, 1))]);
        let out = common_refine(&c1, &c2).unwrap();
        assert_eq!(out.sum, c2);

        let out = common_refine(&c1, &c1).unwrap();
        assert_eq!(out.sum, c1);

        let err = common_refine(&c1, &fs(&[(1, co(0, 1))])).unwrap_err();
        assert_eq!(err.name(), "ProfileMismatch");
    }

    #[test]
    fn common_refine_infinite() {
        let c1 = FormalSum::from_nonneg([(XNonneg::PosInf, co(0, 2))]);
        let c2 = FormalSum::new(vec![
            Term::finite(r(3), co(0, 2)),
            Term::new(XReal::PosInf, co(0, 1)),
            Term::new(XReal::PosInf, co(1, 2)),
        ])
        .unwrap();
        let out = common_refine(&c1, &c2).unwrap();
        assert!(verify_decomposition(&c1, &out.sum, &out.left_witness));
        assert!(verify_decomposition(&c2, &out.sum, &out.right_witness));
    }

    #[test]
    fn subdecompose_examples() {
        let c = fs(&[(1, co(0, 1))]);
        let d = fs(&[(2, co(0, 2))]);
        let out = subdecompose_dominated(&c, &d).unwrap();
        assert_eq!(out.c_prime, c);
        assert_eq!(
            evaluate(&out.e),
            StepProfile::from_rat_pieces([(co(0, 1), r(1)), (co(1, 2), r(2))]).unwrap()
        );
        assert!(verify_decomposition(&c, &out.c_prime, &out.c_witness));
        assert!(verify_decomposition(&d, &out.c_prime.concat(&out.e), &out.d_witness));

        let out = subdecompose_dominated(&d, &d).unwrap();
        assert!(out.e.is_empty());

        let out = subdecompose_dominated(&FormalSum::empty(), &d).unwrap();
        assert!(out.c_prime.is_empty());
        assert_eq!(evaluate(&out.e), evaluate(&d));

        let err = subdecompose_dominated(&d, &c).unwrap_err();
        assert_eq!(err.name(), "DominationError");
    }

    #[test]
    fn minmax_examples() {
        let c = fs(&[(1, co(0, 2))]);
        let d = fs(&[(1, co(1, 3))]);
        let out = minmax(&c, &d).unwrap();
        assert_eq!(evaluate(&out.e_min), StepProfile::indicator(co(1, 2)));
        assert_eq!(evaluate(&out.e_max), StepProfile::indicator(co(0, 3)));
        assert!(verify_decomposition(&c.concat(&d), &out.e_min.concat(&out.e_max), &out.witness));

        let out = minmax(&c, &c).unwrap();
        assert_eq!(evaluate(&out.e_min), evaluate(&c));
        assert_eq!(evaluate(&out.e_max), evaluate(&c));

        let out = minmax(&c, &FormalSum::empty()).unwrap();
        assert!(evaluate(&out.e_min).is_zero());
        assert_eq!(evaluate(&out.e_max), evaluate(&c));
    }

    #[test]
    fn four_corner_examples() {
        let c = fs(&[(1, co(0, 1))]);
        let d = fs(&[(2, co(0, 1)), (-1, co(0, 1))]);
        let out = four_corner(&c, &d).unwrap();
        assert_eq!(evaluate(&out.e_plus.sum), StepProfile::indicator(co(0, 1)));
        assert!(out.verify(&c, &d));

        let out = four_corner(&c, &c).unwrap();
        assert!(out.e_c.sum.is_empty() && out.e_minus.sum.is_empty() && out.e_d.sum.is_empty());
        assert_eq!(evaluate(&out.e_plus.sum), evaluate(&c));
        assert!(out.verify(&c, &c));

        let both = FormalSum::new(vec![
            Term::new(XReal::PosInf, co(0, 1)),
            Term::new(XReal::NegInf, co(0, 1)),
        ])
        .unwrap();
        let out = four_corner(&both, &c).unwrap();
        assert!(out.verify(&both, &c));
        let pos_inf = FormalSum::new(vec![Term::new(XReal::PosInf, co(0, 1))]).unwrap();
        assert_eq!(four_corner(&pos_inf, &c).unwrap_err().name(), "ProfileMismatch");
    }
}
