//! Stonean lattices of nonnegative step functions and measure-backed Daniell
//! functionals on them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formal_sums::{Listing, StepProfile};
use crate::integral::{best_variations, riesz_integrate};
use crate::intervals::{difference, exact_decompose, normalize_union, Interval};
use crate::measures::RealMeasure;
use crate::numerics::{nth_greatest, Rat, XReal};

/// A finite, nonnegative step function.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "StepProfile", into = "StepProfile")]
pub struct StepLatticeElem(StepProfile);

impl TryFrom<StepProfile> for StepLatticeElem {
    type Error = Error;

    fn try_from(p: StepProfile) -> Result<Self> {
        StepLatticeElem::new(p)
    }
}

impl From<StepLatticeElem> for StepProfile {
    fn from(e: StepLatticeElem) -> StepProfile {
        e.0
    }
}

impl StepLatticeElem {
    pub fn new(p: StepProfile) -> Result<StepLatticeElem> {
        if !p.is_finite() || !p.is_nonnegative() {
            return Err(Error::domain("lattice elements are finite and nonnegative"));
        }
        Ok(StepLatticeElem(p))
    }

    pub fn zero() -> StepLatticeElem {
        StepLatticeElem(StepProfile::zero())
    }

    /// `c · χ_I`, `c ≥ 0`.
    pub fn scaled_indicator(c: Rat, set: Interval) -> Result<StepLatticeElem> {
        StepLatticeElem::new(StepProfile::constant(c, set))
    }

    pub fn profile(&self) -> &StepProfile {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn at(&self, q: &Rat) -> Rat {
        self.0.rat_at(q).expect("finite element")
    }

    /// Smallest nonzero value.
    pub fn min_positive(&self) -> Option<Rat> {
        self.0
            .pieces()
            .iter()
            .map(|(_, v)| v.as_finite().expect("finite element").clone())
            .min()
    }

    /// `{f > c}` in normal form.
    pub fn level_set(&self, c: &Rat) -> Vec<Interval> {
        let above: Vec<Interval> = self
            .0
            .pieces()
            .iter()
            .filter(|(_, v)| v.as_finite().expect("finite element") > c)
            .map(|(s, _)| s.clone())
            .collect();
        normalize_union(&above)
    }

    fn lift(p: StepProfile) -> StepLatticeElem {
        debug_assert!(p.is_finite() && p.is_nonnegative());
        StepLatticeElem(p)
    }

    pub fn plus(&self, g: &StepLatticeElem) -> StepLatticeElem {
        lattice_combine(self, g, LatticeOp::Plus)
    }

    pub fn join(&self, g: &StepLatticeElem) -> StepLatticeElem {
        lattice_combine(self, g, LatticeOp::Join)
    }

    pub fn meet(&self, g: &StepLatticeElem) -> StepLatticeElem {
        lattice_combine(self, g, LatticeOp::Meet)
    }

    pub fn monus(&self, g: &StepLatticeElem) -> StepLatticeElem {
        lattice_combine(self, g, LatticeOp::Monus)
    }

    /// `f ∧ d`.
    pub fn cap(&self, d: &Rat) -> Result<StepLatticeElem> {
        if d.is_negative() {
            return Err(Error::domain(format!("truncation level {d} is negative")));
        }
        Ok(StepLatticeElem::lift(self.0.map_rat(|v| Rat::min_of(v, d).clone())))
    }

    /// `k · f`, `k ≥ 0`.
    pub fn scale(&self, k: &Rat) -> StepLatticeElem {
        assert!(!k.is_negative(), "lattice scaling by a negative number");
        StepLatticeElem::lift(self.0.map_rat(|v| v * k))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeOp {
    Plus,
    Join,
    Meet,
    /// `(f − g) ∨ 0`.
    Monus,
}

pub fn lattice_combine(f: &StepLatticeElem, g: &StepLatticeElem, op: LatticeOp) -> StepLatticeElem {
    let p = f.0.combine_rat(&g.0, |a, b| match op {
        LatticeOp::Plus => a + b,
        LatticeOp::Join => Rat::max_of(a, b).clone(),
        LatticeOp::Meet => Rat::min_of(a, b).clone(),
        LatticeOp::Monus => (a - b).pos_part(),
    });
    StepLatticeElem::lift(p)
}

/// Pointwise `f(values)` of several elements, on their joint atoms.
fn pointwise(elems: &[&StepLatticeElem], f: impl Fn(&[Rat]) -> Rat) -> StepLatticeElem {
    let sets: Vec<Interval> = elems.iter().flat_map(|e| e.0.support()).collect();
    let pieces = exact_decompose(&sets).atoms.into_iter().map(|atom| {
        let q = atom.sample_point();
        let values: Vec<Rat> = elems.iter().map(|e| e.at(&q)).collect();
        (atom, f(&values))
    });
    StepLatticeElem::lift(StepProfile::from_rat_pieces(pieces).expect("atoms are disjoint"))
}

/// The `(n+1)`-th greatest value function, with multiplicities.
pub fn max_minus(elems: &[&StepLatticeElem], n: usize) -> StepLatticeElem {
    if n >= elems.len() {
        return StepLatticeElem::zero();
    }
    pointwise(elems, |v| nth_greatest(v, n))
}

/// `F(f) = ∫ f dμ` for a backing measure `μ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DaniellFunctional {
    pub backing: RealMeasure,
}

impl DaniellFunctional {
    pub fn new(backing: RealMeasure) -> DaniellFunctional {
        DaniellFunctional { backing }
    }
}

pub fn functional_eval(func: &DaniellFunctional, f: &StepLatticeElem) -> Rat {
    match riesz_integrate(&func.backing, &f.0.to_formal_sum()) {
        Ok(XReal::Finite(v)) => v,
        other => unreachable!("finite step integrand gave {other:?}"),
    }
}

/// `(|F|⁺(f), |F|⁻(f))`.
pub fn functional_jordan(func: &DaniellFunctional, f: &StepLatticeElem) -> (Rat, Rat) {
    let b = best_variations(&func.backing, &f.0).expect("finite profile");
    let fin = |x: crate::numerics::XNonneg| x.as_finite().expect("finite measure").clone();
    (fin(b.int_plus), fin(b.int_minus))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelDecomposition {
    /// `s_{n+1} − s_n` for `n < steps`.
    pub pieces: Vec<StepLatticeElem>,
    /// First `n` with `s_n = d · χ_W`.
    pub steps: usize,
}

/// `s_n = (Σ_{k<n} (n − k) f_k) ∧ d`, run until it reaches `d · χ_W` with
/// `W = ⋃ {f_k > 0}`.
pub fn level_decompose(fs: &[StepLatticeElem], d: &Rat) -> Result<LevelDecomposition> {
    if !d.is_positive() {
        return Err(Error::domain(format!("level {d} must be positive")));
    }
    let w = normalize_union(&fs.iter().flat_map(|f| f.0.support()).collect::<Vec<_>>());
    let target = StepLatticeElem::lift(StepProfile::from_rat_pieces(w.into_iter().map(|s| (s, d.clone())))?);
    let mut pieces = Vec::new();
    let mut prev = StepLatticeElem::zero();
    // Σ_{k<n} (n − k) f_k = Σ_{k<n} partial_k with partial_k = Σ_{i≤k} f_i
    let mut partial = StepLatticeElem::zero();
    let mut weighted = StepLatticeElem::zero();
    let mut n = 0;
    while prev != target {
        if let Some(f) = fs.get(n) {
            partial = partial.plus(f);
        }
        weighted = weighted.plus(&partial);
        let next = weighted.cap(d)?;
        pieces.push(next.monus(&prev));
        prev = next;
        n += 1;
    }
    Ok(LevelDecomposition { pieces, steps: n })
}

/// `Σ_n F(((n+1)k) ∧ 1 − (nk) ∧ 1)` with `k = h − h ∧ 1`; equals `μ{h > 1}`.
/// Returns the value and the number of nonzero terms.
pub fn level_series(func: &DaniellFunctional, h: &StepLatticeElem) -> Result<(Rat, usize)> {
    let one = Rat::one();
    let k = h.monus(&h.cap(&one)?);
    let Some(m) = k.min_positive() else {
        return Ok((Rat::zero(), 0));
    };
    let bound = (Rat::one() / m).ceil_usize();
    let mut total = Rat::zero();
    let mut below = StepLatticeElem::zero();
    for n in 0..=bound {
        let above = k.scale(&Rat::from(n as i64 + 1)).cap(&one)?;
        let term = above.monus(&below);
        if n == bound {
            if !term.is_zero() {
                return Err(Error::Internal(format!("level series still moving after {bound} terms")));
            }
            break;
        }
        total += functional_eval(func, &term);
        below = above;
    }
    Ok((total, bound))
}

/// `μ({f > 1} \ {g > 1})`, through the level series.
pub fn measure_of_level_set(func: &DaniellFunctional, f: &StepLatticeElem, g: &StepLatticeElem) -> Result<Rat> {
    let (whole, _) = level_series(func, f)?;
    let (common, _) = level_series(func, &f.meet(g))?;
    Ok(whole - common)
}

/// `{f > 1} \ {g > 1}` by thresholding.
pub fn level_difference(f: &StepLatticeElem, g: &StepLatticeElem) -> Vec<Interval> {
    let one = Rat::one();
    difference(&f.level_set(&one), &g.level_set(&one))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub set: Vec<Interval>,
    pub value: Rat,
}

/// Values of the represented measure on the level-set system of a lattice.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RepresentationTable {
    entries: BTreeMap<Vec<Interval>, Rat>,
    atoms: Vec<Vec<Interval>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTable {
    entries: Vec<TableEntry>,
    atoms: Vec<Vec<Interval>>,
}

impl Serialize for RepresentationTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawTable {
            entries: self.entries().collect(),
            atoms: self.atoms.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RepresentationTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawTable::deserialize(d)?;
        Ok(RepresentationTable {
            entries: raw.entries.into_iter().map(|e| (e.set, e.value)).collect(),
            atoms: raw.atoms,
        })
    }
}

/// One disagreement between two tables, or between a table and a measure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDiff {
    pub set: Vec<Interval>,
    pub left: Option<Rat>,
    pub right: Option<Rat>,
}

impl RepresentationTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = TableEntry> + '_ {
        self.entries.iter().map(|(set, value)| TableEntry {
            set: set.clone(),
            value: value.clone(),
        })
    }

    /// The finest sets of the generated ring.
    pub fn atoms(&self) -> &[Vec<Interval>] {
        &self.atoms
    }

    fn insert(&mut self, set: Vec<Interval>, value: Rat) -> Result<()> {
        if set.is_empty() {
            return Ok(());
        }
        match self.entries.get(&set) {
            Some(old) if *old != value => Err(Error::Internal(format!(
                "level-set value is not well defined: {old} vs {value}"
            ))),
            _ => {
                self.entries.insert(set, value);
                Ok(())
            }
        }
    }

    /// Value on any finite union of atoms; `None` if `target` is not one.
    pub fn measure(&self, target: &[Interval]) -> Option<Rat> {
        let target = normalize_union(target);
        if target.is_empty() {
            return Some(Rat::zero());
        }
        if let Some(v) = self.entries.get(&target) {
            return Some(v.clone());
        }
        let mut covered = Vec::new();
        let mut total = Rat::zero();
        for atom in &self.atoms {
            let inside = difference(atom, &target).is_empty();
            let outside = difference(atom, &difference(atom, &target)).is_empty();
            if inside {
                covered.extend(atom.iter().cloned());
                total += &self.entries[atom];
            } else if !outside {
                return None;
            }
        }
        (normalize_union(&covered) == target).then_some(total)
    }

    pub fn diff(&self, other: &RepresentationTable) -> Vec<TableDiff> {
        let mut out = Vec::new();
        for (set, v) in &self.entries {
            let w = other.entries.get(set);
            if w != Some(v) {
                out.push(TableDiff {
                    set: set.clone(),
                    left: Some(v.clone()),
                    right: w.cloned(),
                });
            }
        }
        for (set, w) in &other.entries {
            if !self.entries.contains_key(set) {
                out.push(TableDiff {
                    set: set.clone(),
                    left: None,
                    right: Some(w.clone()),
                });
            }
        }
        out
    }

    /// Entries whose value differs from `m`.
    pub fn diff_against(&self, m: &RealMeasure) -> Vec<TableDiff> {
        self.entries
            .iter()
            .filter_map(|(set, v)| {
                let exact: Rat = set.iter().map(|i| m.eval(i)).sum();
                (exact != *v).then(|| TableDiff {
                    set: set.clone(),
                    left: Some(v.clone()),
                    right: Some(exact),
                })
            })
            .collect()
    }
}

/// Tabulates `μ({f > 1} \ {g > 1})` for all `f, g` among the generators and
/// 0, and on the atoms of the ring their level sets generate (an atom is
/// `{⋀ f_i > 1} \ {⋁ f_j > 1}`). Every value comes from the level series.
pub fn represent(func: &DaniellFunctional, generators: &[StepLatticeElem]) -> Result<RepresentationTable> {
    let mut table = RepresentationTable::default();
    let zero = StepLatticeElem::zero();
    let elems: Vec<&StepLatticeElem> = std::iter::once(&zero).chain(generators).collect();
    // μ{f > 1} once per element; the pair value is that minus μ{f ∧ g > 1}
    for f in &elems {
        for g in &elems {
            let set = level_difference(f, g);
            if !set.is_empty() && !table.entries.contains_key(&set) {
                table.insert(set, measure_of_level_set(func, f, g)?)?;
            }
        }
    }

    let one = Rat::one();
    let levels: Vec<Vec<Interval>> = generators.iter().map(|g| g.level_set(&one)).collect();
    let mut family = Vec::new();
    let mut owner = Vec::new();
    for (i, l) in levels.iter().enumerate() {
        for s in l {
            family.push(s.clone());
            owner.push(i);
        }
    }
    let part = exact_decompose(&family);
    let mut classes: BTreeMap<Vec<usize>, Vec<Interval>> = BTreeMap::new();
    for (a, atom) in part.atoms.iter().enumerate() {
        let mut sig: Vec<usize> = part.covering(a).into_iter().map(|k| owner[k]).collect();
        sig.sort_unstable();
        sig.dedup();
        classes.entry(sig).or_default().push(atom.clone());
    }
    for (sig, sets) in classes {
        let f = sig[1..].iter().fold(generators[sig[0]].clone(), |acc, &i| acc.meet(&generators[i]));
        let g = (0..generators.len())
            .filter(|i| sig.binary_search(i).is_err())
            .fold(StepLatticeElem::zero(), |acc, i| acc.join(&generators[i]));
        let set = normalize_union(&sets);
        debug_assert_eq!(set, level_difference(&f, &g));
        let value = measure_of_level_set(func, &f, &g)?;
        table.insert(set.clone(), value)?;
        table.atoms.push(set);
    }
    table.atoms.sort();
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeLift {
    pub u: StepLatticeElem,
    pub v: StepLatticeElem,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticePiece {
    pub piece: StepLatticeElem,
    pub color: usize,
    pub lift: LatticeLift,
    pub input: usize,
    pub term: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticePieces {
    pub inputs: usize,
    pub pieces: Vec<LatticePiece>,
}

impl LatticePieces {
    pub fn color_total(&self, n: usize) -> StepLatticeElem {
        self.pieces
            .iter()
            .filter(|p| p.color == n)
            .fold(StepLatticeElem::zero(), |acc, p| acc.plus(&p.piece))
    }

    pub fn term_total(&self, input: usize, term: usize) -> StepLatticeElem {
        self.pieces
            .iter()
            .filter(|p| p.input == input && p.term == term)
            .fold(StepLatticeElem::zero(), |acc, p| acc.plus(&p.piece))
    }
}

/// Procedure 2: the lattice analogue of Procedure 1 along the diagonal
/// listing. Step `j` splits `f = b_j − c_j` through the chains
/// `r_n = (c_j ∨ h'_n) ∧ b_j` and `r_{n,k} = (r_{n+1} ∨ b'_k) ∧ r_n`, where
/// `h'_n` is the `(n+1)`-th greatest running total and `b'_k` the
/// `(k+1)`-th greatest of all totals seen so far. The piece
/// `r_{n,k} − r_{n,k+1}` gets color `n`; the chain in `k` is closed by
/// `r_{n+1}`.
pub fn procedure2(inputs: &[Vec<StepLatticeElem>]) -> Result<LatticePieces> {
    let lens: Vec<usize> = inputs.iter().map(Vec::len).collect();
    let order = Listing::Diagonal.order(&lens);
    let mut totals: Vec<Option<StepLatticeElem>> = vec![None; inputs.len()];
    let mut history: Vec<StepLatticeElem> = Vec::new();
    let mut pieces = Vec::new();
    for &(nj, mj) in &order {
        let f = &inputs[nj][mj];
        let c = totals[nj].clone().unwrap_or_default();
        let b = c.plus(f);
        totals[nj] = Some(b.clone());
        history.push(b.clone());

        let seen: Vec<&StepLatticeElem> = totals.iter().flatten().collect();
        let mut r: Vec<StepLatticeElem> = (0..seen.len())
            .map(|n| c.join(&max_minus(&seen, n)).meet(&b))
            .collect();
        r.push(c.clone());
        let hist: Vec<&StepLatticeElem> = history.iter().collect();
        let bk: Vec<StepLatticeElem> = (0..hist.len()).map(|k| max_minus(&hist, k)).collect();
        for n in 0..seen.len() {
            let mut chain: Vec<StepLatticeElem> = bk.iter().map(|b| r[n + 1].join(b).meet(&r[n])).collect();
            chain.push(r[n + 1].clone());
            for w in chain.windows(2) {
                let piece = w[0].monus(&w[1]);
                if piece.is_zero() {
                    continue;
                }
                pieces.push(LatticePiece {
                    piece,
                    color: n,
                    lift: LatticeLift {
                        u: w[1].clone(),
                        v: w[0].clone(),
                    },
                    input: nj,
                    term: mj,
                });
            }
        }
    }
    Ok(LatticePieces {
        inputs: inputs.len(),
        pieces,
    })
}
