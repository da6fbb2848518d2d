//! Seeded property suites, one per engine law, for `riesz selftest`.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::daniell::{
    functional_eval, functional_jordan, level_decompose, procedure2, represent, DaniellFunctional,
    StepLatticeElem,
};
use crate::formal_sums::{evaluate, procedure1, FormalSum, Listing, StepProfile};
use crate::gauge::{
    gauge_to_tag_system, is_valid_division, kh_division, mcshane_division, refine_tags, riemann_sum,
    stone_member, DivisionKind, StonePoint, TagSystem,
};
use crate::integral::{
    best_variations, darboux_bounds, geometric_series, indicator_above, riesz_integrate, variations,
    Polynomial,
};
use crate::intervals::{exact_decompose, Interval};
use crate::measures::{jordan, semivariation, LebesguePiece, PointMass, RealMeasure};
use crate::numerics::{primed_eq, trimmed_extremum, Extremum, Rat, XNonneg, XReal};
use crate::sample::{Grid, Sampler};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(suite: &str) -> SuiteReport {
        SuiteReport {
            suite: suite.to_string(),
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.failures.len() < 10 {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub const SUITES: &[&str] = &[
    "procedure1",
    "decomposition",
    "comparison",
    "jordan",
    "semivariation",
    "series",
    "darboux",
    "gauge",
    "stone",
    "daniell",
    "indicator",
    "procedure2",
];

/// Runs one suite by name, or all of them for `"all"`.
pub fn run(name: &str, seed: u64) -> Option<Vec<SuiteReport>> {
    if name == "all" {
        return Some(SUITES.iter().map(|s| run_one(s, seed).expect("known suite")).collect());
    }
    run_one(name, seed).map(|r| vec![r])
}

fn run_one(name: &str, seed: u64) -> Option<SuiteReport> {
    let mut s = Sampler::new(seed);
    Some(match name {
        "procedure1" => procedure1_suite(&mut s),
        "decomposition" => decomposition_suite(&mut s),
        "comparison" => comparison_suite(&mut s),
        "jordan" => jordan_suite(&mut s),
        "semivariation" => semivariation_suite(&mut s),
        "series" => series_suite(),
        "darboux" => darboux_suite(),
        "gauge" => gauge_suite(&mut s),
        "stone" => stone_suite(),
        "daniell" => daniell_suite(&mut s),
        "indicator" => indicator_suite(&mut s),
        "procedure2" => procedure2_suite(&mut s),
        _ => return None,
    })
}

const GRID: Grid = Grid::new(0, 4, 2);

fn procedure1_suite(s: &mut Sampler) -> SuiteReport {
    let mut rep = SuiteReport::new("procedure1");
    for case in 0..300 {
        let inputs: Vec<FormalSum> = (0..s.below(5) + 1).map(|_| s.formal_sum(GRID, 6, 10, true)).collect();
        let listing = if s.coin() { Listing::Diagonal } else { Listing::Rowmajor };
        let out = procedure1(&inputs, listing).expect("valid inputs");
        let colors: Vec<StepProfile> = (0..inputs.len()).map(|n| out.color_profile(n)).collect();
        let sets: Vec<Interval> = inputs.iter().flat_map(FormalSum::sets).collect();
        for atom in exact_decompose(&sets).atoms {
            let x = atom.sample_point();
            let values: Vec<XReal> = inputs.iter().map(|c| c.value_at(&x)).collect();
            for (n, color) in colors.iter().enumerate() {
                let want = trimmed_extremum(&values, n, Extremum::Sup, false).expect("n < len");
                let got = color.value_at(&x);
                rep.check(got == want, || format!("case {case}, atom {atom}, color {n}: {got} vs {want}"));
            }
        }
    }
    rep
}

fn reports_equal(m: &RealMeasure, c: &FormalSum, d: &FormalSum) -> bool {
    let (a, b) = (variations(m, c), variations(m, d));
    a.overall == b.overall && a.pos == b.pos && a.neg == b.neg && a.total == b.total
}

fn decomposition_suite(s: &mut Sampler) -> SuiteReport {
    let mut rep = SuiteReport::new("decomposition");
    for case in 0..300 {
        let m = s.measure(GRID);
        let both = s.chance(0.2);
        let c = s.extended_sum(GRID, 5, both);
        let (d, _) = s.decompose(&c, 3);
        rep.check(reports_equal(&m, &c, &d), || format!("case {case}: {c:?} vs {d:?}"));
    }
    rep
}

/// A second representation of the same profile: re-atomized, decomposed,
/// and padded with a cancelling pair.
fn same_profile(s: &mut Sampler, c: &FormalSum) -> FormalSum {
    let (d, _) = s.decompose(&evaluate(c).to_formal_sum(), 2);
    let a = s.nonzero_rat(1, 3, 2);
    let set = s.interval(GRID);
    d.concat(&FormalSum::from_pairs([(a.clone(), set.clone()), (-a, set)]))
}

fn comparison_suite(s: &mut Sampler) -> SuiteReport {
    let mut rep = SuiteReport::new("comparison");
    for case in 0..300 {
        let m = s.measure(GRID);
        let c = s.formal_sum(GRID, 6, 5, false);
        let d = same_profile(s, &c);
        let (a, b) = (variations(&m, &c).overall, variations(&m, &d).overall);
        rep.check(evaluate(&c) == evaluate(&d) && a == b, || format!("case {case}: {a} vs {b}"));
    }
    for case in 0..50 {
        let m = s.measure(GRID);
        let c = s.extended_sum(GRID, 4, true);
        let d = same_profile(s, &c);
        let (a, b) = (variations(&m, &c).overall, variations(&m, &d).overall);
        rep.check(primed_eq(&a, &b), || format!("adversarial {case}: {a} vs {b}"));
    }
    rep
}

/// `Σ max(μ(cell), 0)` over `cells`.
fn positive_sum(m: &RealMeasure, cells: &[Interval]) -> Rat {
    cells.iter().map(|c| m.eval(c).pos_part()).sum()
}

fn mesh_cells(i: &Interval, k: u32) -> Vec<Interval> {
    crate::integral::dyadic_cells(i, k)
}

fn sign_cells(m: &RealMeasure, i: &Interval) -> Vec<Interval> {
    let mut family = vec![i.clone()];
    family.extend(m.atoms().iter().map(|a| Interval::point(a.point.clone())));
    family.extend(m.pieces().iter().map(|p| p.support.clone()));
    exact_decompose(&family)
        .atoms
        .into_iter()
        .filter(|a| a.is_subset(i))
        .collect()
}

fn jordan_suite(s: &mut Sampler) -> SuiteReport {
    let mut rep = SuiteReport::new("jordan");
    for case in 0..100 {
        let m = s.measure(GRID);
        let j = jordan(&m);
        let neg = m.negate();
        for _ in 0..2 {
            let i = s.set(GRID);
            let (p, n) = (j.plus.eval(&i), j.minus.eval(&i));
            rep.check(&p - &n == m.eval(&i), || format!("case {case}: plus - minus on {i}"));
            for k in 0..=4 {
                let cells = mesh_cells(&i, k);
                rep.check(positive_sum(&m, &cells) <= p && positive_sum(&neg, &cells) <= n, || {
                    format!("case {case}: oracle exceeds closed form on {i} at depth {k}")
                });
            }
            let cells = sign_cells(&m, &i);
            rep.check(positive_sum(&m, &cells) == p && positive_sum(&neg, &cells) == n, || {
                format!("case {case}: sign-breakpoint oracle differs on {i}")
            });
        }
    }
    rep
}

/// Measure on `[0, 2)` constant on eighths, with point masses only where
/// they agree in sign with the density.
pub fn eighths_measure(s: &mut Sampler) -> RealMeasure {
    let mut pieces = Vec::new();
    let mut atoms = Vec::new();
    for k in 0..16 {
        let w = s.rat(-3, 3, 2);
        let cell = Interval::closed_open(Rat::new(k, 8), Rat::new(k + 1, 8));
        if s.chance(0.15) {
            let mut mass = s.nonzero_rat(-2, 2, 2);
            if w.is_positive() {
                mass = mass.abs();
            } else if w.is_negative() {
                mass = -mass.abs();
            }
            let point = s.between(cell.lo(), cell.hi());
            atoms.push(PointMass { mass, point });
        }
        pieces.push(LebesguePiece { weight: w, support: cell });
    }
    RealMeasure::new(pieces, atoms)
}

fn semivariation_suite(s: &mut Sampler) -> SuiteReport {
    let mut rep = SuiteReport::new("semivariation");
    let domain = Interval::closed_open(Rat::zero(), Rat::from_int(2));
    for case in 0..50 {
        let m = eighths_measure(s);
        let cells = mesh_cells(&domain, 4);
        let scale = Rat::from_int(16);
        let vals: Vec<i64> = cells
            .iter()
            .map(|c| {
                let v = m.eval(c) * &scale;
                assert!(v.denom() == &1.into(), "cell values are sixteenths");
                v.numer().to_i64().expect("small")
            })
            .collect();
        let (mut lo, mut hi) = (0i64, 0i64);
        for mask in 0u32..(1 << cells.len()) {
            let sum: i64 = (0..cells.len()).filter(|b| mask >> b & 1 == 1).map(|b| vals[b]).sum();
            lo = lo.min(sum);
            hi = hi.max(sum);
        }
        let (slo, shi) = semivariation(&m, &[domain.clone()]).expect("one set");
        let want = (Rat::new(lo, 16), Rat::new(hi, 16));
        rep.check(want == (slo.clone(), shi.clone()), || {
            format!("case {case}: brute force {want:?} vs [{slo}, {shi}]")
        });
    }
    rep
}

fn unit() -> Interval {
    Interval::closed_open(Rat::zero(), Rat::one())
}

fn lambda() -> RealMeasure {
    RealMeasure::lebesgue(Rat::one(), Interval::closed_open(Rat::from_int(-16), Rat::from_int(16)))
}

fn series_suite() -> SuiteReport {
    let mut rep = SuiteReport::new("series");
    let half = Rat::new(1, 2);
    for n in 1..=12usize {
        let out = geometric_series(&lambda(), &half, &half, &unit(), n).expect("convergent");
        let tail = Rat::dyadic(n as u32);
        let ok = out.value == XReal::Finite(Rat::one() - &tail) && out.certified_tail == XNonneg::Finite(tail);
        rep.check(ok, || format!("N = {n}: {out:?}"));
    }
    rep
}

fn darboux_suite() -> SuiteReport {
    let mut rep = SuiteReport::new("darboux");
    let f = Polynomial::new(vec![Rat::zero(), Rat::one()], unit());
    let mut width = None;
    for depth in 0..=12 {
        let b = darboux_bounds(&lambda(), &f, depth).expect("nonnegative measure");
        let w = &b.upper - &b.lower;
        rep.check(b.lower <= Rat::new(1, 2) && Rat::new(1, 2) <= b.upper, || format!("depth {depth}: {b:?}"));
        if let Some(prev) = &width {
            rep.check(w.clone() * Rat::from_int(2) == *prev, || format!("depth {depth}: width {w}"));
        }
        width = Some(w);
    }
    rep
}

fn gauge_suite(s: &mut Sampler) -> SuiteReport {
    let mut rep = SuiteReport::new("gauge");
    let domain = Interval::closed(Rat::zero(), Rat::from_int(4));
    for case in 0..100 {
        let f = s.step_profile(GRID, 5);
        let m = s.measure(GRID);
        let g = s.gauge(&domain, 3);
        let t1 = gauge_to_tag_system(&domain, &g).expect("valid gauge");
        let atoms = TagSystem::from_atoms(&domain, &f.support()).expect("atoms");
        let t = refine_tags(&t1, &atoms).expect("same domain");
        let exact = riesz_integrate(&m, &f.to_formal_sum()).expect("finite");
        for kind in [DivisionKind::Mcshane, DivisionKind::Kh] {
            let d = match kind {
                DivisionKind::Mcshane => mcshane_division(&t),
                DivisionKind::Kh => kh_division(&t),
            };
            rep.check(is_valid_division(&t, &d, kind), || format!("case {case}: invalid {kind:?} division"));
            rep.check(is_valid_division(&t, &d, DivisionKind::Mcshane), || {
                format!("case {case}: {kind:?} division fails the McShane check")
            });
            rep.check(is_valid_division(&t1, &d, DivisionKind::Mcshane), || {
                format!("case {case}: refined division not associated to the gauge")
            });
            let sum = riemann_sum(&f, &m, &d).map(XReal::Finite);
            rep.check(sum.as_ref() == Ok(&exact), || format!("case {case}: {kind:?} sum {sum:?} vs {exact}"));
        }
    }
    rep
}

fn stone_suite() -> SuiteReport {
    let mut rep = SuiteReport::new("stone");
    let a = Rat::zero();
    let ends = [Rat::from_int(-1), Rat::zero(), Rat::one()];
    for lo in &ends {
        for hi in &ends {
            for lc in [false, true] {
                for hc in [false, true] {
                    let i = Interval::new(lo.clone(), lc, hi.clone(), hc);
                    let far = Interval::open(Rat::from_int(-2), Rat::from_int(2));
                    let right = i.intersect(&far).intersect(&Interval::open(a.clone(), Rat::from_int(2)));
                    let left = i.intersect(&far).intersect(&Interval::open(Rat::from_int(-2), a.clone()));
                    let reaches = |j: &Interval| !j.is_empty() && j.closure().contains(&a);
                    let cases = [
                        (StonePoint::at(a.clone()), i.contains(&a)),
                        (StonePoint::right(a.clone()), reaches(&right)),
                        (StonePoint::left(a.clone()), reaches(&left)),
                    ];
                    for (p, want) in cases {
                        rep.check(stone_member(&i, &p) == want, || format!("{i} in {p}"));
                    }
                }
            }
        }
    }
    rep
}

/// `2·χ_I` for every dyadic `I = [j·2^-k, (j+1)·2^-k) ⊂ [0, 2)`, `k ≤ depth`.
pub fn dyadic_generators(depth: u32) -> Vec<StepLatticeElem> {
    (0..=depth)
        .flat_map(|k| {
            let w = Rat::dyadic(k);
            (0..2i64 << k).map(move |i| {
                let set = Interval::closed_open(&w * Rat::from_int(i), &w * Rat::from_int(i + 1));
                StepLatticeElem::scaled_indicator(Rat::from_int(2), set).expect("positive")
            })
        })
        .collect()
}

fn daniell_suite(s: &mut Sampler) -> SuiteReport {
    let mut rep = SuiteReport::new("daniell");
    let func = DaniellFunctional::new(RealMeasure::lebesgue(Rat::one(), Interval::closed_open(Rat::zero(), Rat::from_int(2))));
    let gens = dyadic_generators(5);
    let table = represent(&func, &gens).expect("series terminate");
    let diffs = table.diff_against(&func.backing);
    rep.check(diffs.is_empty(), || format!("{} table entries differ from the backing measure", diffs.len()));
    let rev: Vec<StepLatticeElem> = gens.iter().rev().cloned().collect();
    let other = represent(&func, &rev).expect("series terminate");
    rep.check(table.diff(&other).is_empty(), || "tables depend on generator order".into());
    for _ in 0..100 {
        let i = s.dyadic_interval(5);
        let got = table.measure(std::slice::from_ref(&i));
        rep.check(got == Some(func.backing.eval(&i)), || format!("{i}: {got:?}"));
    }
    for case in 0..100 {
        let backing = s.measure(GRID);
        let func = DaniellFunctional::new(backing.clone());
        let f = s.lattice_elem(GRID, 5);
        let parts = lattice_split(s, &f);
        let total: Rat = parts.iter().map(|p| functional_eval(&func, p)).sum();
        rep.check(total == functional_eval(&func, &f), || format!("case {case}: split sum differs"));
        let direct = riesz_integrate(&backing, &f.profile().to_formal_sum()).expect("finite");
        rep.check(direct == XReal::Finite(functional_eval(&func, &f)), || format!("case {case}: equivalence"));
        let (p, n) = functional_jordan(&func, &f);
        let b = best_variations(&backing, f.profile()).expect("finite");
        rep.check(
            b.int_plus == XNonneg::Finite(p.clone()) && b.int_minus == XNonneg::Finite(n.clone()),
            || format!("case {case}: jordan {p}, {n} vs {b:?}"),
        );
        for _ in 0..5 {
            let g = f.meet(&s.lattice_elem(GRID, 4));
            let v = functional_eval(&func, &g);
            rep.check(v <= p && -v.clone() <= n, || format!("case {case}: dominated g gives {v}"));
        }
        let fs: Vec<StepLatticeElem> = (0..s.below(3) + 1).map(|_| s.lattice_elem(GRID, 3)).collect();
        let d = s.nonzero_rat(1, 3, 2).abs();
        let lev = level_decompose(&fs, &d).expect("positive level");
        let sum = lev.pieces.iter().fold(StepLatticeElem::zero(), |a, p| a.plus(p));
        let support: Vec<Interval> = fs.iter().flat_map(|f| f.profile().support()).collect();
        let want = StepProfile::from_rat_pieces(
            crate::intervals::normalize_union(&support).into_iter().map(|w| (w, d.clone())),
        )
        .expect("disjoint");
        rep.check(sum.profile() == &want, || format!("case {case}: level pieces"));
    }
    rep
}

/// Random finite lattice sum splitting `f`: `f = Σ ((f − c_k) ∧ w_k)` style
/// slices at random heights.
pub fn lattice_split(s: &mut Sampler, f: &StepLatticeElem) -> Vec<StepLatticeElem> {
    let mut cuts: Vec<Rat> = (0..s.below(4)).map(|_| s.rat(0, 4, 4)).collect();
    cuts.sort();
    cuts.dedup();
    let mut parts = Vec::new();
    let mut below = StepLatticeElem::zero();
    for c in cuts {
        let capped = f.cap(&c).expect("nonnegative");
        parts.push(capped.monus(&below));
        below = capped;
    }
    parts.push(f.monus(&below));
    parts
}

fn indicator_suite(s: &mut Sampler) -> SuiteReport {
    let mut rep = SuiteReport::new("indicator");
    for case in 0..200 {
        let f = s.step_profile(GRID, 5);
        let d = s.rat(0, 3, 4);
        let c = s.nonzero_rat(-3, 3, 2);
        let out = indicator_above(&f, &d, &c, 10_000);
        let direct = f.map_rat(|v| if v > &d { c.clone() } else { Rat::zero() });
        let min_excess = f
            .pieces()
            .iter()
            .filter_map(|(_, v)| v.as_finite().filter(|v| *v > &d).map(|v| v - &d))
            .min();
        let bound = min_excess.map_or(0, |e| (c.abs() / e).ceil_usize());
        match out {
            Ok(r) => rep.check(r.profile == direct && r.stabilized_at == bound, || {
                format!("case {case}: stabilized at {} vs {bound}", r.stabilized_at)
            }),
            Err(e) => rep.check(false, || format!("case {case}: {e}")),
        }
    }
    rep
}

fn procedure2_suite(s: &mut Sampler) -> SuiteReport {
    let mut rep = SuiteReport::new("procedure2");
    for case in 0..200 {
        let inputs: Vec<Vec<StepLatticeElem>> = (0..s.below(3) + 1)
            .map(|_| (0..s.below(3) + 1).map(|_| s.lattice_elem(GRID, 2)).collect())
            .collect();
        let out = procedure2(&inputs).expect("nonnegative inputs");
        for (n, input) in inputs.iter().enumerate() {
            for (m, f) in input.iter().enumerate() {
                rep.check(&out.term_total(n, m) == f, || format!("case {case}: term ({n},{m}) not conserved"));
            }
        }
        let sums: Vec<StepLatticeElem> = inputs
            .iter()
            .map(|c| c.iter().fold(StepLatticeElem::zero(), |a, f| a.plus(f)))
            .collect();
        let sets: Vec<Interval> = sums.iter().flat_map(|f| f.profile().support()).collect();
        for atom in exact_decompose(&sets).atoms {
            let x = atom.sample_point();
            let values: Vec<XReal> = sums.iter().map(|f| XReal::Finite(f.at(&x))).collect();
            for n in 0..inputs.len() {
                let want = trimmed_extremum(&values, n, Extremum::Sup, false).expect("n < len");
                let got = XReal::Finite(out.color_total(n).at(&x));
                rep.check(got == want, || format!("case {case}, color {n} at {x}: {got} vs {want}"));
            }
        }
    }
    rep
}
