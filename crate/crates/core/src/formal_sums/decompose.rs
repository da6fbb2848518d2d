//! Exact check that one formal sum arises from another by finitely many
//! number- and set-decomposition steps.
//!
//! Per parent term the steps form a tree whose inner nodes split either the
//! coefficient (same set, magnitudes add up) or the set (exact partition,
//! same coefficient), with the child terms as leaves. The search below
//! decides whether such a tree exists:
//!
//! * if the children fall into several overlap-connected groups, the only
//!   useful top step is the set split into the groups' unions;
//! * otherwise the top step is a number split, i.e. a proper subset `S` of
//!   the children whose pointwise sum is constant on the whole set.

use std::collections::HashMap;

use crate::intervals::{exact_decompose, normalize_union, Interval};
use crate::numerics::XNonneg;

use super::{FormalSum, Term};

/// True iff `child` arises from `parent` by per-term number and set
/// decompositions, where `witness[k]` is the index of the parent term that
/// child term `k` comes from.
pub fn verify_decomposition(parent: &FormalSum, child: &FormalSum, witness: &[usize]) -> bool {
    if witness.len() != child.len() || witness.iter().any(|&p| p >= parent.len()) {
        return false;
    }
    let mut groups: Vec<Vec<&Term>> = vec![Vec::new(); parent.len()];
    for (k, &p) in witness.iter().enumerate() {
        groups[p].push(&child.terms()[k]);
    }
    parent
        .terms()
        .iter()
        .zip(&groups)
        .all(|(p, kids)| term_decomposes(p, kids))
}

fn term_decomposes(parent: &Term, kids: &[&Term]) -> bool {
    if kids.is_empty() {
        return false;
    }
    if kids
        .iter()
        .any(|k| k.side() != parent.side() || !k.set.is_subset(&parent.set))
    {
        return false;
    }
    let items: Vec<Item> = kids
        .iter()
        .map(|k| Item {
            set: k.set.clone(),
            mag: k.magnitude(),
        })
        .collect();
    let all: Vec<usize> = (0..items.len()).collect();
    if normalize_union(&items.iter().map(|i| i.set.clone()).collect::<Vec<_>>())
        != vec![parent.set.clone()]
    {
        return false;
    }
    match constant_sum(&items, &all) {
        Some(total) if total == parent.magnitude() => {}
        _ => return false,
    }
    Search {
        items: &items,
        memo: HashMap::new(),
    }
    .solve(all)
}

struct Item {
    set: Interval,
    mag: XNonneg,
}

/// Pointwise sum of `subset` if it is constant on the union (which must be a
/// single interval).
fn constant_sum(items: &[Item], subset: &[usize]) -> Option<XNonneg> {
    let sets: Vec<Interval> = subset.iter().map(|&i| items[i].set.clone()).collect();
    if normalize_union(&sets).len() != 1 {
        return None;
    }
    let part = exact_decompose(&sets);
    let mut value: Option<XNonneg> = None;
    for a in 0..part.atoms.len() {
        let s: XNonneg = part.covering(a).into_iter().map(|k| &items[subset[k]].mag).sum();
        match &value {
            None => value = Some(s),
            Some(v) if *v == s => {}
            Some(_) => return None,
        }
    }
    value
}

struct Search<'a> {
    items: &'a [Item],
    memo: HashMap<Vec<usize>, bool>,
}

impl Search<'_> {
    /// `subset` is sorted and has constant pointwise sum on its (interval) union.
    fn solve(&mut self, subset: Vec<usize>) -> bool {
        if subset.len() == 1 {
            return true;
        }
        if let Some(&known) = self.memo.get(&subset) {
            return known;
        }
        let groups = self.overlap_groups(&subset);
        let result = if groups.len() > 1 {
            groups.into_iter().all(|g| self.solve(g))
        } else {
            self.number_split(&subset)
        };
        self.memo.insert(subset, result);
        result
    }

    fn overlap_groups(&self, subset: &[usize]) -> Vec<Vec<usize>> {
        let mut order: Vec<usize> = subset.to_vec();
        order.sort_by(|&a, &b| self.items[a].set.cmp(&self.items[b].set));
        let mut groups: Vec<(Interval, Vec<usize>)> = Vec::new();
        for i in order {
            let set = &self.items[i].set;
            match groups.last_mut() {
                Some((hull, members)) if !hull.intersect(set).is_empty() => {
                    if set.hi() > hull.hi() || (set.hi() == hull.hi() && set.hi_closed()) {
                        *hull = Interval::new(
                            hull.lo().clone(),
                            hull.lo_closed(),
                            set.hi().clone(),
                            set.hi_closed(),
                        );
                    }
                    members.push(i);
                }
                _ => groups.push((set.clone(), vec![i])),
            }
        }
        groups
            .into_iter()
            .map(|(_, mut m)| {
                m.sort_unstable();
                m
            })
            .collect()
    }

    /// Tries every proper subset `S` containing the first child that covers
    /// the left end, with constant sum on the whole union.
    fn number_split(&mut self, subset: &[usize]) -> bool {
        let sets: Vec<Interval> = subset.iter().map(|&i| self.items[i].set.clone()).collect();
        let part = exact_decompose(&sets);
        let n_atoms = part.atoms.len();
        // first and last atom index of each member
        let spans: Vec<(usize, usize)> = part
            .origin_map
            .iter()
            .map(|atoms| (atoms[0], *atoms.last().expect("nonempty set")))
            .collect();
        let mut starting: Vec<Vec<usize>> = vec![Vec::new(); n_atoms];
        for (k, &(s, _)) in spans.iter().enumerate() {
            starting[s].push(k);
        }
        let pivot = starting[0][0];
        let mut candidates: Vec<Vec<usize>> = Vec::new();
        let mut chosen = vec![false; subset.len()];
        chosen[pivot] = true;
        self.enumerate(subset, &spans, &starting, 0, None, &mut chosen, &mut candidates);
        for picked in candidates {
            let (s, rest): (Vec<usize>, Vec<usize>) = (0..subset.len())
                .partition(|&k| picked.binary_search(&k).is_ok());
            if rest.is_empty() {
                continue;
            }
            let s: Vec<usize> = s.into_iter().map(|k| subset[k]).collect();
            let rest: Vec<usize> = rest.into_iter().map(|k| subset[k]).collect();
            if constant_sum(self.items, &rest).is_none() {
                continue;
            }
            if self.solve(s) && self.solve(rest) {
                return true;
            }
        }
        false
    }

    /// Walks atoms left to right choosing which newly starting members join
    /// `S`, so that the running sum equals the level fixed on the first atom.
    #[allow(clippy::too_many_arguments)]
    fn enumerate(
        &self,
        subset: &[usize],
        spans: &[(usize, usize)],
        starting: &[Vec<usize>],
        atom: usize,
        level: Option<&XNonneg>,
        chosen: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if atom == starting.len() {
            out.push((0..chosen.len()).filter(|&k| chosen[k]).collect());
            return;
        }
        let fresh: Vec<usize> = starting[atom]
            .iter()
            .copied()
            .filter(|&k| !(atom == 0 && chosen[k]))
            .collect();
        let carried: XNonneg = (0..chosen.len())
            .filter(|&k| chosen[k] && spans[k].0 <= atom && atom <= spans[k].1)
            .filter(|&k| !fresh.contains(&k))
            .map(|k| &self.items[subset[k]].mag)
            .sum();
        for mask in 0u64..(1u64 << fresh.len()) {
            let mut total = carried.clone();
            for (b, &k) in fresh.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    total += &self.items[subset[k]].mag;
                }
            }
            if total.is_zero() || level.is_some_and(|l| *l != total) {
                continue;
            }
            for (b, &k) in fresh.iter().enumerate() {
                chosen[k] = mask >> b & 1 == 1;
            }
            let level_here = level.cloned().unwrap_or(total);
            self.enumerate(subset, spans, starting, atom + 1, Some(&level_here), chosen, out);
            for &k in &fresh {
                chosen[k] = false;
            }
        }
    }
}
