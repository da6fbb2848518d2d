//! Rational intervals of every end type and their exact set algebra.
//!
//! All set operations go through one primitive: the real line cut at a finite
//! set of endpoints splits into *elementary pieces* (the endpoints themselves
//! and the open gaps between consecutive endpoints). Any interval whose
//! endpoints are among the cuts is a union of consecutive pieces, so unions,
//! differences and common refinements reduce to classifying pieces.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::numerics::Rat;

/// A bounded interval with rational endpoints, possibly a singleton.
///
/// Normalized on construction: either `lo < hi`, or `lo == hi` with both ends
/// closed, or the canonical empty interval `(0,0)`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Interval {
    lo: Rat,
    lo_closed: bool,
    hi: Rat,
    hi_closed: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInterval {
    lo: Rat,
    lo_closed: bool,
    hi: Rat,
    hi_closed: bool,
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Interval, D::Error> {
        let raw = RawInterval::deserialize(d)?;
        Ok(Interval::new(raw.lo, raw.lo_closed, raw.hi, raw.hi_closed))
    }
}

impl Interval {
    pub fn new(lo: Rat, lo_closed: bool, hi: Rat, hi_closed: bool) -> Interval {
        let empty = match lo.cmp(&hi) {
            Ordering::Greater => true,
            Ordering::Equal => !(lo_closed && hi_closed),
            Ordering::Less => false,
        };
        if empty {
            Interval::empty()
        } else {
            Interval {
                lo,
                lo_closed,
                hi,
                hi_closed,
            }
        }
    }

    pub fn empty() -> Interval {
        Interval {
            lo: Rat::zero(),
            lo_closed: false,
            hi: Rat::zero(),
            hi_closed: false,
        }
    }

    /// `[a, b)`
    pub fn closed_open(a: Rat, b: Rat) -> Interval {
        Interval::new(a, true, b, false)
    }

    /// `[a, b]`
    pub fn closed(a: Rat, b: Rat) -> Interval {
        Interval::new(a, true, b, true)
    }

    /// `(a, b)`
    pub fn open(a: Rat, b: Rat) -> Interval {
        Interval::new(a, false, b, false)
    }

    /// `(a, b]`
    pub fn open_closed(a: Rat, b: Rat) -> Interval {
        Interval::new(a, false, b, true)
    }

    pub fn point(a: Rat) -> Interval {
        Interval::new(a.clone(), true, a, true)
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn is_empty(&self) -> bool {
        self.lo == self.hi && !(self.lo_closed && self.hi_closed)
    }

    pub fn is_singleton(&self) -> bool {
        self.lo == self.hi && self.lo_closed && self.hi_closed
    }

    /// Lebesgue length; end types are ignored.
    pub fn length(&self) -> Rat {
        if self.is_empty() {
            Rat::zero()
        } else {
            &self.hi - &self.lo
        }
    }

    pub fn contains(&self, q: &Rat) -> bool {
        if self.is_empty() {
            return false;
        }
        let above = match q.cmp(&self.lo) {
            Ordering::Greater => true,
            Ordering::Equal => self.lo_closed,
            Ordering::Less => false,
        };
        let below = match q.cmp(&self.hi) {
            Ordering::Less => true,
            Ordering::Equal => self.hi_closed,
            Ordering::Greater => false,
        };
        above && below
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        if self.is_empty() || other.is_empty() {
            return Interval::empty();
        }
        let (lo, lo_closed) = match self.lo.cmp(&other.lo) {
            Ordering::Greater => (self.lo.clone(), self.lo_closed),
            Ordering::Less => (other.lo.clone(), other.lo_closed),
            Ordering::Equal => (self.lo.clone(), self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&other.hi) {
            Ordering::Less => (self.hi.clone(), self.hi_closed),
            Ordering::Greater => (other.hi.clone(), other.hi_closed),
            Ordering::Equal => (self.hi.clone(), self.hi_closed && other.hi_closed),
        };
        Interval::new(lo, lo_closed, hi, hi_closed)
    }

    pub fn is_disjoint(&self, other: &Interval) -> bool {
        self.intersect(other).is_empty()
    }

    pub fn is_subset(&self, other: &Interval) -> bool {
        self.is_empty() || self.intersect(other) == *self
    }

    /// `self \ other`, as at most two disjoint intervals ordered left to right.
    pub fn subtract(&self, other: &Interval) -> Vec<Interval> {
        if self.is_empty() {
            return Vec::new();
        }
        let left = Interval::new(
            self.lo.clone(),
            self.lo_closed,
            other.lo.clone(),
            !other.lo_closed,
        );
        let right = Interval::new(
            other.hi.clone(),
            !other.hi_closed,
            self.hi.clone(),
            self.hi_closed,
        );
        if other.is_empty() {
            return vec![self.clone()];
        }
        [left, right]
            .into_iter()
            .map(|piece| piece.intersect(self))
            .filter(|piece| !piece.is_empty())
            .collect()
    }

    /// Topological closure `[lo, hi]`.
    pub fn closure(&self) -> Interval {
        if self.is_empty() {
            Interval::empty()
        } else {
            Interval::closed(self.lo.clone(), self.hi.clone())
        }
    }

    /// A rational inside the interval: the left end if closed, otherwise the midpoint.
    /// Panics on the empty interval.
    pub fn sample_point(&self) -> Rat {
        assert!(!self.is_empty(), "empty interval has no points");
        if self.lo_closed {
            self.lo.clone()
        } else {
            Rat::midpoint(&self.lo, &self.hi)
        }
    }

    fn sort_key(&self) -> (&Rat, bool, &Rat, bool) {
        (&self.lo, !self.lo_closed, &self.hi, self.hi_closed)
    }
}

impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("∅");
        }
        if self.is_singleton() {
            return write!(f, "{{{}}}", self.lo);
        }
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn member(q: &Rat, i: &Interval) -> bool {
    i.contains(q)
}

pub fn intersect(i: &Interval, j: &Interval) -> Interval {
    i.intersect(j)
}

pub fn subtract(i: &Interval, j: &Interval) -> Vec<Interval> {
    i.subtract(j)
}

/// A piece of the line cut at finitely many rationals.
#[derive(Debug, Clone)]
enum Piece {
    Point(Rat),
    Gap(Rat, Rat),
}

impl Piece {
    fn probe(&self) -> Rat {
        match self {
            Piece::Point(a) => a.clone(),
            Piece::Gap(a, b) => Rat::midpoint(a, b),
        }
    }
}

/// Sorted distinct endpoints of the nonempty sets.
fn cut_points<'a>(sets: impl IntoIterator<Item = &'a Interval>) -> Vec<Rat> {
    let mut cuts: Vec<Rat> = Vec::new();
    for s in sets {
        if !s.is_empty() {
            cuts.push(s.lo.clone());
            cuts.push(s.hi.clone());
        }
    }
    cuts.sort();
    cuts.dedup();
    cuts
}

/// Elementary pieces over `cuts`: the point `cuts[k]` has index `2k`, the gap
/// after it `2k + 1`.
fn elementary_pieces(cuts: &[Rat]) -> Vec<Piece> {
    let mut pieces = Vec::with_capacity(cuts.len() * 2);
    for (k, c) in cuts.iter().enumerate() {
        pieces.push(Piece::Point(c.clone()));
        if let Some(next) = cuts.get(k + 1) {
            pieces.push(Piece::Gap(c.clone(), next.clone()));
        }
    }
    pieces
}

/// Indices of the pieces making up a nonempty `s` whose endpoints are cuts.
fn piece_range(cuts: &[Rat], s: &Interval) -> std::ops::RangeInclusive<usize> {
    let i = cuts.binary_search(&s.lo).expect("endpoint is a cut");
    let j = cuts.binary_search(&s.hi).expect("endpoint is a cut");
    let start = if s.lo_closed { 2 * i } else { 2 * i + 1 };
    let end = if s.hi_closed { 2 * j } else { 2 * j - 1 };
    start..=end
}

/// Merges a run of consecutive pieces into one interval.
fn span(first: &Piece, last: &Piece) -> Interval {
    let (lo, lo_closed) = match first {
        Piece::Point(a) => (a.clone(), true),
        Piece::Gap(a, _) => (a.clone(), false),
    };
    let (hi, hi_closed) = match last {
        Piece::Point(b) => (b.clone(), true),
        Piece::Gap(_, b) => (b.clone(), false),
    };
    Interval::new(lo, lo_closed, hi, hi_closed)
}

/// Groups consecutive pieces sharing the same label; pieces labelled `None`
/// are dropped. Returns `(interval, label)` runs in left-to-right order.
fn runs<L: PartialEq + Clone>(pieces: &[Piece], labels: &[Option<L>]) -> Vec<(Interval, L)> {
    let mut out = Vec::new();
    let mut k = 0;
    while k < pieces.len() {
        let Some(label) = &labels[k] else {
            k += 1;
            continue;
        };
        let start = k;
        while k + 1 < pieces.len() && labels[k + 1].as_ref() == Some(label) {
            k += 1;
        }
        out.push((span(&pieces[start], &pieces[k]), label.clone()));
        k += 1;
    }
    out
}

/// Sorted, pairwise-disjoint, minimal list with the same union. Two families
/// have the same union iff their normal forms are identical.
pub fn normalize_union(family: &[Interval]) -> Vec<Interval> {
    let cuts = cut_points(family);
    let pieces = elementary_pieces(&cuts);
    let mut depth = vec![0i64; pieces.len() + 1];
    for s in family.iter().filter(|s| !s.is_empty()) {
        let r = piece_range(&cuts, s);
        depth[*r.start()] += 1;
        depth[*r.end() + 1] -= 1;
    }
    let mut covered = 0;
    let labels: Vec<Option<()>> = depth[..pieces.len()]
        .iter()
        .map(|d| {
            covered += d;
            (covered > 0).then_some(())
        })
        .collect();
    runs(&pieces, &labels).into_iter().map(|(i, ())| i).collect()
}

/// `a \ b` for finite unions, in normal form.
pub fn difference(a: &[Interval], b: &[Interval]) -> Vec<Interval> {
    let pieces = elementary_pieces(&cut_points(a.iter().chain(b)));
    let labels: Vec<Option<()>> = pieces
        .iter()
        .map(|p| {
            let q = p.probe();
            (a.iter().any(|s| s.contains(&q)) && !b.iter().any(|s| s.contains(&q))).then_some(())
        })
        .collect();
    runs(&pieces, &labels).into_iter().map(|(i, ())| i).collect()
}

/// `a ∩ b` for finite unions, in normal form.
pub fn union_intersection(a: &[Interval], b: &[Interval]) -> Vec<Interval> {
    let pieces = elementary_pieces(&cut_points(a.iter().chain(b)));
    let labels: Vec<Option<()>> = pieces
        .iter()
        .map(|p| {
            let q = p.probe();
            (a.iter().any(|s| s.contains(&q)) && b.iter().any(|s| s.contains(&q))).then_some(())
        })
        .collect();
    runs(&pieces, &labels).into_iter().map(|(i, ())| i).collect()
}

/// True when the members are pairwise disjoint.
pub fn pairwise_disjoint(family: &[Interval]) -> bool {
    let mut sorted: Vec<&Interval> = family.iter().filter(|s| !s.is_empty()).collect();
    sorted.sort();
    sorted.windows(2).all(|w| w[0].is_disjoint(w[1]))
}

/// Disjoint atoms refining a family of intervals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomPartition {
    /// Pairwise disjoint, sorted left to right.
    pub atoms: Vec<Interval>,
    /// For each input set, the sorted indices of the atoms whose union it is.
    pub origin_map: Vec<Vec<usize>>,
}

impl AtomPartition {
    /// Indices of the input sets containing atom `a`.
    pub fn covering(&self, a: usize) -> Vec<usize> {
        self.origin_map
            .iter()
            .enumerate()
            .filter(|(_, atoms)| atoms.binary_search(&a).is_ok())
            .map(|(i, _)| i)
            .collect()
    }

    /// Index of the atom containing `q`, if any.
    pub fn locate(&self, q: &Rat) -> Option<usize> {
        let idx = self.atoms.partition_point(|a| a.hi() < q);
        (idx..self.atoms.len().min(idx + 2)).find(|&k| self.atoms[k].contains(q))
    }
}

/// Coarsest partition of the union into intervals on which membership in
/// every input set is constant. Each input set (and every set built from the
/// inputs by `∩`, `∪`, `\`) is then exactly a union of atoms.
pub fn exact_decompose(family: &[Interval]) -> AtomPartition {
    let cuts = cut_points(family);
    let pieces = elementary_pieces(&cuts);
    let mut sigs: Vec<Vec<usize>> = vec![Vec::new(); pieces.len()];
    for (i, s) in family.iter().enumerate().filter(|(_, s)| !s.is_empty()) {
        for k in piece_range(&cuts, s) {
            sigs[k].push(i);
        }
    }
    let labels: Vec<Option<Vec<usize>>> = sigs
        .into_iter()
        .map(|sig| (!sig.is_empty()).then_some(sig))
        .collect();
    let atom_runs = runs(&pieces, &labels);
    let mut origin_map = vec![Vec::new(); family.len()];
    let mut atoms = Vec::with_capacity(atom_runs.len());
    for (k, (atom, sig)) in atom_runs.into_iter().enumerate() {
        for i in sig {
            origin_map[i].push(k);
        }
        atoms.push(atom);
    }
    AtomPartition { atoms, origin_map }
}

/// Atoms of `exact_decompose`, skipping empty inputs.
pub fn common_atoms<'a>(sets: impl IntoIterator<Item = &'a Interval>) -> Vec<Interval> {
    let family: Vec<Interval> = sets.into_iter().filter(|s| !s.is_empty()).cloned().collect();
    exact_decompose(&family).atoms
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
    fn normalization() {
        assert!(Interval::new(r(1), true, r(1), false).is_empty());
        assert!(Interval::new(r(2), true, r(1), true).is_empty());
        assert_eq!(Interval::new(r(2), true, r(1), true), Interval::empty());
        assert!(Interval::point(r(1)).is_singleton());
        assert_eq!(Interval::point(r(1)).length(), Rat::zero());
    }

    #[test]
    fn intersect_examples() {
        assert_eq!(co(0, 2).intersect(&Interval::closed(r(1), r(3))), co(1, 2));
        assert!(co(0, 1).intersect(&co(1, 2)).is_empty());
        assert_eq!(co(0, 2).intersect(&Interval::point(r(1))), Interval::point(r(1)));
    }

    #[test]
    fn subtract_examples() {
        assert_eq!(co(0, 2).subtract(&co(1, 3)), vec![co(0, 1)]);
        assert_eq!(
            co(0, 3).subtract(&Interval::point(r(1))),
            vec![co(0, 1), Interval::open(r(1), r(3))]
        );
        assert!(co(0, 1).subtract(&co(0, 1)).is_empty());
        assert_eq!(co(0, 1).subtract(&Interval::empty()), vec![co(0, 1)]);
        assert_eq!(co(0, 1).subtract(&co(5, 6)), vec![co(0, 1)]);
    }

    #[test]
    fn member_examples() {
        assert!(!member(&r(1), &co(0, 1)));
        assert!(member(&r(1), &Interval::closed(r(0), r(1))));
        assert!(member(&r(1), &Interval::point(r(1))));
    }

    #[test]
    fn normalize_union_examples() {
        assert_eq!(normalize_union(&[co(0, 1), co(1, 2)]), vec![co(0, 2)]);
        let gap = vec![co(0, 1), Interval::open(r(1), r(2))];
        assert_eq!(normalize_union(&gap), gap);
        assert!(normalize_union(&[]).is_empty());
        assert_eq!(
            normalize_union(&[co(1, 2), Interval::point(r(2)), co(0, 1)]),
            vec![Interval::closed(r(0), r(2))]
        );
    }

    #[test]
    fn decompose_examples() {
        let p = exact_decompose(&[co(0, 2), co(1, 3)]);
        assert_eq!(p.atoms, vec![co(0, 1), co(1, 2), co(2, 3)]);
        assert_eq!(p.origin_map, vec![vec![0, 1], vec![1, 2]]);

        let p = exact_decompose(&[co(0, 1)]);
        assert_eq!(p.atoms, vec![co(0, 1)]);

        let p = exact_decompose(&[Interval::closed(r(0), r(2)), Interval::point(r(1))]);
        assert_eq!(
            p.atoms,
            vec![co(0, 1), Interval::point(r(1)), Interval::open_closed(r(1), r(2))]
        );
        assert_eq!(p.origin_map, vec![vec![0, 1, 2], vec![1]]);
        assert_eq!(p.covering(1), vec![0, 1]);
        assert_eq!(p.locate(&r(1)), Some(1));
        assert_eq!(p.locate(&r(5)), None);
    }

    #[test]
    fn decompose_separates_same_signature_runs() {
        let p = exact_decompose(&[Interval::closed(r(0), r(3)), Interval::closed(r(1), r(2))]);
        assert_eq!(p.atoms.len(), 3);
        assert_eq!(p.origin_map[0], vec![0, 1, 2]);
        assert_eq!(p.origin_map[1], vec![1]);
    }

    #[test]
    fn json_shape() {
        let s = serde_json::to_string(&co(0, 1)).unwrap();
        assert_eq!(s, r#"{"lo":"0/1","lo_closed":true,"hi":"1/1","hi_closed":false}"#);
        let back: Interval = serde_json::from_str(r#"{"lo":"2","lo_closed":false,"hi":"2","hi_closed":true}"#).unwrap();
        assert!(back.is_empty());
        assert!(serde_json::from_str::<Interval>(r#"{"lo":"0","lo_closed":true,"hi":"1","hi_closed":true,"x":1}"#).is_err());
    }
}
