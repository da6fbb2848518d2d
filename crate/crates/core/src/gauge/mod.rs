//! Tag systems, tagged McShane and Kurzweil–Henstock divisions, and Riemann
//! sums over them.

mod stone;

pub use stone::{stone_lim, stone_member, StonePoint, StoneSide};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formal_sums::StepProfile;
use crate::intervals::{exact_decompose, normalize_union, pairwise_disjoint, Interval};
use crate::measures::RealMeasure;
use crate::numerics::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeCell {
    pub set: Interval,
    pub delta: Rat,
}

/// A piecewise-constant positive `δ` over a finite partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gauge {
    pub cells: Vec<GaugeCell>,
}

impl Gauge {
    pub fn constant(domain: Interval, delta: Rat) -> Gauge {
        Gauge {
            cells: vec![GaugeCell { set: domain, delta }],
        }
    }

    /// The largest `δ`.
    pub fn mesh(&self) -> Rat {
        self.cells
            .iter()
            .map(|c| c.delta.clone())
            .max()
            .unwrap_or_default()
    }
}

/// One cell of a tag system: every `x` in `cell` is assigned `h(x) = h`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TagCell {
    pub cell: Interval,
    pub h: Interval,
}

/// An assignment `x ↦ h(x) ∋ x`, constant on the cells of a partition of the
/// domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TagSystem {
    pub domain: Interval,
    pub cells: Vec<TagCell>,
}

fn check_partition(domain: &Interval, parts: &[Interval], what: &str) -> Result<()> {
    if domain.is_empty() {
        return Err(Error::domain(format!("{what}: empty domain")));
    }
    if !pairwise_disjoint(parts) || normalize_union(parts) != vec![domain.clone()] {
        return Err(Error::domain(format!("{what}: cells do not partition {domain}")));
    }
    Ok(())
}

impl TagSystem {
    /// Checks the partition and `cell ⊂ h` on every cell.
    pub fn new(domain: Interval, mut cells: Vec<TagCell>) -> Result<TagSystem> {
        let parts: Vec<Interval> = cells.iter().map(|c| c.cell.clone()).collect();
        check_partition(&domain, &parts, "tag system")?;
        if let Some(bad) = cells.iter().find(|c| !c.cell.is_subset(&c.h)) {
            return Err(Error::domain(format!("tag cell {} is not inside its h = {}", bad.cell, bad.h)));
        }
        cells.sort_by(|a, b| a.cell.cmp(&b.cell));
        Ok(TagSystem { domain, cells })
    }

    /// `h(x)` for a real point `x` of the domain.
    pub fn h_at(&self, x: &Rat) -> Option<&Interval> {
        self.cell_of(&StonePoint::at(x.clone())).map(|c| &c.h)
    }

    /// The cell belonging to the filter `p`, and its `h`.
    pub fn cell_of(&self, p: &StonePoint) -> Option<&TagCell> {
        // cells are sorted and disjoint: skip those ending before `p`
        let a = &p.base;
        let k = self.cells.partition_point(|c| {
            let hi = c.cell.hi();
            match p.side {
                StoneSide::At => hi < a || (hi == a && !c.cell.hi_closed()),
                StoneSide::Right => hi <= a,
                StoneSide::Left => hi < a,
            }
        });
        self.cells[k..].iter().take(2).find(|c| stone_member(&c.cell, p))
    }

    /// `h(p)` for a point of the Stone completion.
    pub fn h_of(&self, p: &StonePoint) -> Option<&Interval> {
        self.cell_of(p).map(|c| &c.h)
    }

    /// Tag system with `h = cell` on a partition refining `atoms`.
    pub fn from_atoms(domain: &Interval, atoms: &[Interval]) -> Result<TagSystem> {
        let mut family = vec![domain.clone()];
        family.extend(atoms.iter().map(|a| a.intersect(domain)).filter(|a| !a.is_empty()));
        let cells = exact_decompose(&family)
            .atoms
            .into_iter()
            .map(|a| TagCell { cell: a.clone(), h: a })
            .collect();
        TagSystem::new(domain.clone(), cells)
    }
}

/// Cuts each gauge cell into `2^j` equal subcells of length `< δ`; a subcell
/// `[a, b)` gets `h = (b − δ, a + δ) ∩ closure(domain)`, which lies inside
/// `(x − δ, x + δ)` for each of its points `x`.
pub fn gauge_to_tag_system(domain: &Interval, g: &Gauge) -> Result<TagSystem> {
    if let Some(bad) = g.cells.iter().find(|c| !c.delta.is_positive()) {
        return Err(Error::domain(format!("gauge value {} on {} is not positive", bad.delta, bad.set)));
    }
    let parts: Vec<Interval> = g.cells.iter().map(|c| c.set.clone()).collect();
    check_partition(domain, &parts, "gauge")?;
    let hull = domain.closure();
    let mut cells = Vec::new();
    for gc in &g.cells {
        let len = gc.set.length();
        let mut depth = 0u32;
        while len.clone() * Rat::dyadic(depth) >= gc.delta {
            depth += 1;
        }
        for sub in crate::integral::dyadic_cells(&gc.set, depth) {
            let h = Interval::open(sub.hi() - &gc.delta, sub.lo() + &gc.delta).intersect(&hull);
            cells.push(TagCell { cell: sub, h });
        }
    }
    TagSystem::new(domain.clone(), cells)
}

/// Common refinement with `h = h₁ ∩ h₂`.
pub fn refine_tags(t1: &TagSystem, t2: &TagSystem) -> Result<TagSystem> {
    if t1.domain != t2.domain {
        return Err(Error::domain(format!(
            "tag systems live on different domains {} and {}",
            t1.domain, t2.domain
        )));
    }
    let family: Vec<Interval> = t1.cells.iter().chain(&t2.cells).map(|c| c.cell.clone()).collect();
    let mut cells = Vec::new();
    for atom in exact_decompose(&family).atoms {
        let x = atom.sample_point();
        let h1 = t1.h_at(&x).expect("partition covers the atom");
        let h2 = t2.h_at(&x).expect("partition covers the atom");
        cells.push(TagCell { h: h1.intersect(h2), cell: atom });
    }
    TagSystem::new(t1.domain.clone(), cells)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DivisionKind {
    /// `E ⊂ h(tag)`.
    #[default]
    Mcshane,
    /// `tag ∈ E ⊂ h(tag)`.
    Kh,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaggedCell {
    pub set: Interval,
    pub tag: StonePoint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaggedDivision {
    pub domain: Interval,
    pub cells: Vec<TaggedCell>,
}

/// Why a division is not associated to a tag system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DivisionFault {
    NotAPartition,
    TagOutsideCompletion(usize),
    CellOutsideH(usize),
    TagNotInCell(usize),
}

/// Independent recheck of a division against a tag system.
pub fn check_division(t: &TagSystem, d: &TaggedDivision, kind: DivisionKind) -> std::result::Result<(), DivisionFault> {
    let sets: Vec<Interval> = d.cells.iter().map(|c| c.set.clone()).collect();
    if d.domain != t.domain
        || sets.iter().any(Interval::is_empty)
        || !pairwise_disjoint(&sets)
        || normalize_union(&sets) != vec![t.domain.clone()]
    {
        return Err(DivisionFault::NotAPartition);
    }
    for (k, c) in d.cells.iter().enumerate() {
        let h = t.h_of(&c.tag).ok_or(DivisionFault::TagOutsideCompletion(k))?;
        if !c.set.is_subset(h) {
            return Err(DivisionFault::CellOutsideH(k));
        }
        if kind == DivisionKind::Kh && !(c.tag.side == StoneSide::At && c.set.contains(&c.tag.base)) {
            return Err(DivisionFault::TagNotInCell(k));
        }
    }
    Ok(())
}

pub fn is_valid_division(t: &TagSystem, d: &TaggedDivision, kind: DivisionKind) -> bool {
    check_division(t, d, kind).is_ok()
}

/// The tag-system cell holding the left end of `rest`.
fn leading_cell<'a>(t: &'a TagSystem, rest: &Interval) -> &'a TagCell {
    let probe = if rest.lo_closed() {
        StonePoint::at(rest.lo().clone())
    } else {
        StonePoint::right(rest.lo().clone())
    };
    t.cell_of(&probe).expect("tag cells cover the domain")
}

/// Greedy left-to-right sweep: each step takes the cell `C` at the current
/// left end, tags it by a point of `C`, and extends the division cell over
/// every following whole tag cell that still fits in `h_C`.
pub fn mcshane_division(t: &TagSystem) -> TaggedDivision {
    let mut cells = Vec::new();
    let mut rest = Some(t.domain.clone());
    while let Some(r) = rest.take() {
        let lead = leading_cell(t, &r);
        let mut e = lead.cell.intersect(&r);
        loop {
            let tail = r.subtract(&e);
            let Some(next) = tail.first() else { break };
            let cand = leading_cell(t, next);
            let grown = Interval::new(
                e.lo().clone(),
                e.lo_closed(),
                cand.cell.hi().clone(),
                cand.cell.hi_closed(),
            )
            .intersect(&r);
            if grown.is_subset(&lead.h) && grown != e {
                e = grown;
            } else {
                break;
            }
        }
        cells.push(TaggedCell {
            set: e.clone(),
            tag: StonePoint::at(lead.cell.sample_point()),
        });
        rest = r.subtract(&e).into_iter().next();
    }
    TaggedDivision {
        domain: t.domain.clone(),
        cells,
    }
}

const KH_MAX_DEPTH: u32 = 40;

/// Bisection: a cell is kept as soon as one of its left end (if closed),
/// midpoint, or right end (if closed) tags it; otherwise it is halved. At the
/// depth limit the cell is cut along the tag-system partition instead.
pub fn kh_division(t: &TagSystem) -> TaggedDivision {
    let mut cells = Vec::new();
    kh_split(t, &t.domain, 0, &mut cells);
    TaggedDivision {
        domain: t.domain.clone(),
        cells,
    }
}

fn kh_split(t: &TagSystem, i: &Interval, depth: u32, out: &mut Vec<TaggedCell>) {
    let mut candidates = Vec::new();
    if i.lo_closed() {
        candidates.push(i.lo().clone());
    }
    candidates.push(Rat::midpoint(i.lo(), i.hi()));
    if i.hi_closed() {
        candidates.push(i.hi().clone());
    }
    for x in candidates {
        if let Some(h) = t.h_at(&x) {
            if i.contains(&x) && i.is_subset(h) {
                out.push(TaggedCell {
                    set: i.clone(),
                    tag: StonePoint::at(x),
                });
                return;
            }
        }
    }
    if depth >= KH_MAX_DEPTH {
        for c in &t.cells {
            let piece = c.cell.intersect(i);
            if !piece.is_empty() {
                out.push(TaggedCell {
                    tag: StonePoint::at(piece.sample_point()),
                    set: piece,
                });
            }
        }
        return;
    }
    let mid = Rat::midpoint(i.lo(), i.hi());
    let left = Interval::new(i.lo().clone(), i.lo_closed(), mid.clone(), false);
    let right = Interval::new(mid, true, i.hi().clone(), i.hi_closed());
    for half in [left, right] {
        if !half.is_empty() {
            kh_split(t, &half, depth + 1, out);
        }
    }
}

/// `Σ f(lim tag) · μ(E)`, exact.
pub fn riemann_sum(f: &StepProfile, m: &RealMeasure, d: &TaggedDivision) -> Result<Rat> {
    let mut total = Rat::zero();
    for c in &d.cells {
        let v = f
            .rat_at(&stone_lim(&c.tag))
            .ok_or_else(|| Error::domain("riemann_sum needs a finite integrand"))?;
        total += v * m.eval(&c.set);
    }
    Ok(total)
}

/// Floating-point Riemann sum of a callable.
pub fn riemann_sum_f64(f: &dyn Fn(f64) -> f64, m: &RealMeasure, d: &TaggedDivision) -> f64 {
    d.cells
        .iter()
        .map(|c| f(stone_lim(&c.tag).to_f64()) * m.eval(&c.set).to_f64())
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub mesh: Rat,
    pub cells: usize,
    pub sum: Rat,
    pub error: Rat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRowF64 {
    pub mesh: f64,
    pub cells: usize,
    pub sum: f64,
    pub error: f64,
}

pub fn divide(t: &TagSystem, kind: DivisionKind) -> TaggedDivision {
    match kind {
        DivisionKind::Mcshane => mcshane_division(t),
        DivisionKind::Kh => kh_division(t),
    }
}

/// Riemann sums of a step integrand for each gauge, against the exact
/// integral over the domain.
pub fn convergence_table(
    f: &StepProfile,
    m: &RealMeasure,
    domain: &Interval,
    gauges: &[Gauge],
    kind: DivisionKind,
) -> Result<Vec<ConvergenceRow>> {
    let restricted = f.combine(&StepProfile::indicator(domain.clone()), |a, b| {
        if b.is_zero() {
            crate::numerics::XReal::zero()
        } else {
            a.clone()
        }
    });
    let exact = crate::integral::riesz_integrate(m, &restricted.to_formal_sum())?
        .as_finite()
        .cloned()
        .ok_or_else(|| Error::domain("convergence_table needs a finite integral"))?;
    gauges
        .iter()
        .map(|g| {
            let d = divide(&gauge_to_tag_system(domain, g)?, kind);
            let sum = riemann_sum(f, m, &d)?;
            Ok(ConvergenceRow {
                mesh: g.mesh(),
                cells: d.cells.len(),
                error: (&sum - &exact).abs(),
                sum,
            })
        })
        .collect()
}

/// Same study for a floating-point integrand with a known exact value.
pub fn convergence_table_f64(
    f: &dyn Fn(f64) -> f64,
    exact: f64,
    m: &RealMeasure,
    domain: &Interval,
    gauges: &[Gauge],
    kind: DivisionKind,
) -> Result<Vec<ConvergenceRowF64>> {
    gauges
        .iter()
        .map(|g| {
            let d = divide(&gauge_to_tag_system(domain, g)?, kind);
            let sum = riemann_sum_f64(f, m, &d);
            Ok(ConvergenceRowF64 {
                mesh: g.mesh().to_f64(),
                cells: d.cells.len(),
                sum,
                error: (sum - exact).abs(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::XReal;

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    fn q(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    fn unit() -> Interval {
        Interval::closed_open(r(0), r(1))
    }

    fn lambda() -> RealMeasure {
        RealMeasure::lebesgue(r(1), Interval::closed_open(r(-10), r(10)))
    }

    #[test]
    fn tag_system_examples() {
        let t = gauge_to_tag_system(&unit(), &Gauge::constant(unit(), q(1, 4))).unwrap();
        for c in &t.cells {
            assert!(c.h.length() <= q(1, 2));
            assert!(c.cell.is_subset(&c.h));
        }
        let t = gauge_to_tag_system(&unit(), &Gauge::constant(unit(), r(2))).unwrap();
        assert_eq!(t.cells.len(), 1);
        assert_eq!(t.cells[0].h, Interval::closed(r(0), r(1)));

        let two = Gauge {
            cells: vec![
                GaugeCell { set: Interval::closed_open(r(0), q(1, 2)), delta: q(1, 2) },
                GaugeCell { set: Interval::closed_open(q(1, 2), r(1)), delta: q(1, 8) },
            ],
        };
        let t = gauge_to_tag_system(&unit(), &two).unwrap();
        for c in &t.cells {
            let delta = if c.cell.hi() <= &q(1, 2) { q(1, 2) } else { q(1, 8) };
            assert!(c.h.length() <= &delta * r(2));
        }

        let bad = Gauge::constant(unit(), r(0));
        assert_eq!(gauge_to_tag_system(&unit(), &bad).unwrap_err().name(), "DomainError");
    }

    #[test]
    fn refine_examples() {
        let t1 = gauge_to_tag_system(&unit(), &Gauge::constant(unit(), q(1, 2))).unwrap();
        let t2 = gauge_to_tag_system(&unit(), &Gauge::constant(unit(), q(1, 4))).unwrap();
        let t = refine_tags(&t1, &t2).unwrap();
        for c in &t.cells {
            let x = c.cell.sample_point();
            assert!(c.h.is_subset(t1.h_at(&x).unwrap()));
            assert!(c.h.is_subset(t2.h_at(&x).unwrap()));
        }
        let same = refine_tags(&t1, &t1).unwrap();
        assert_eq!(same, t1);
        let other = gauge_to_tag_system(&Interval::closed(r(0), r(1)), &Gauge::constant(Interval::closed(r(0), r(1)), r(1))).unwrap();
        assert!(refine_tags(&t1, &other).is_err());
    }

    #[test]
    fn divisions_are_valid() {
        let t = gauge_to_tag_system(&unit(), &Gauge::constant(unit(), q(1, 4))).unwrap();
        let m = mcshane_division(&t);
        assert!(m.cells.len() <= 8);
        assert_eq!(check_division(&t, &m, DivisionKind::Mcshane), Ok(()));
        let k = kh_division(&t);
        assert_eq!(check_division(&t, &k, DivisionKind::Kh), Ok(()));
        assert_eq!(check_division(&t, &k, DivisionKind::Mcshane), Ok(()));
    }

    #[test]
    fn whole_domain_h_gives_one_cell() {
        let t = TagSystem::new(
            unit(),
            vec![
                TagCell { cell: Interval::closed_open(r(0), q(1, 2)), h: unit() },
                TagCell { cell: Interval::closed_open(q(1, 2), r(1)), h: unit() },
            ],
        )
        .unwrap();
        assert_eq!(mcshane_division(&t).cells.len(), 1);
        assert_eq!(kh_division(&t).cells.len(), 1);
    }

    #[test]
    fn kh_rejects_outside_tags() {
        let t = gauge_to_tag_system(&unit(), &Gauge::constant(unit(), q(1, 4))).unwrap();
        let mut d = kh_division(&t);
        d.cells[0].tag = StonePoint::right(d.cells[0].set.lo().clone());
        assert!(check_division(&t, &d, DivisionKind::Kh).is_err());
    }

    #[test]
    fn riemann_examples() {
        let half = Interval::closed_open(r(0), q(1, 2));
        let f = StepProfile::indicator(half.clone());
        let atoms = TagSystem::from_atoms(&unit(), &[half]).unwrap();
        for delta in [q(1, 3), q(1, 7), q(1, 16)] {
            let t = refine_tags(
                &gauge_to_tag_system(&unit(), &Gauge::constant(unit(), delta)).unwrap(),
                &atoms,
            )
            .unwrap();
            for d in [mcshane_division(&t), kh_division(&t)] {
                assert_eq!(riemann_sum(&f, &lambda(), &d).unwrap(), q(1, 2));
            }
        }

        let c = StepProfile::constant(XReal::Finite(r(3)), unit());
        let t = gauge_to_tag_system(&unit(), &Gauge::constant(unit(), q(1, 5))).unwrap();
        assert_eq!(riemann_sum(&c, &lambda(), &mcshane_division(&t)).unwrap(), r(3));

        for k in 1..=12u32 {
            let t = gauge_to_tag_system(&unit(), &Gauge::constant(unit(), Rat::dyadic(k))).unwrap();
            let s = riemann_sum_f64(&|x| x, &lambda(), &kh_division(&t));
            assert!((s - 0.5).abs() <= Rat::dyadic(k).to_f64());
        }
    }

    #[test]
    fn convergence_examples() {
        let f = StepProfile::indicator(Interval::closed_open(r(0), q(1, 2)));
        let gauges: Vec<Gauge> = [q(1, 2), q(1, 4), q(1, 8)]
            .into_iter()
            .map(|d| Gauge::constant(unit(), d))
            .collect();
        let rows = convergence_table(&f, &lambda(), &unit(), &gauges, DivisionKind::Kh).unwrap();
        for row in &rows {
            assert!(row.error <= row.mesh);
        }
        assert_eq!(rows.last().unwrap().error, r(0));

        let rows = convergence_table(&StepProfile::zero(), &lambda(), &unit(), &gauges, DivisionKind::Mcshane).unwrap();
        assert!(rows.iter().all(|r| r.sum.is_zero() && r.error.is_zero()));

        let gauges: Vec<Gauge> = (2..10).map(|k| Gauge::constant(unit(), Rat::dyadic(k))).collect();
        let rows = convergence_table_f64(&|x| x, 0.5, &lambda(), &unit(), &gauges, DivisionKind::Kh).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].error <= w[0].error);
        }
    }
}
