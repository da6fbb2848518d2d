//! The Lebesgue–Riesz integral of formal sums against a signed measure, and
//! the tools around it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formal_sums::{FormalSum, Side, StepProfile};
use crate::intervals::Interval;
use crate::measures::{jordan, RealMeasure};
use crate::numerics::{ext_sum, Rat, XNonneg, XReal};

/// `∫μC`, `∫⁺μC`, `∫⁻μC` and `∫±μC`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariationReport {
    pub overall: XReal,
    pub pos: XNonneg,
    pub neg: XNonneg,
    pub total: XNonneg,
    /// Indices of the terms contributing an infinite amount.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub infinite_terms: Vec<usize>,
}

/// Termwise variations of `c` against `m`, using the Jordan parts of `m` on
/// each coefficient set.
pub fn variations(m: &RealMeasure, c: &FormalSum) -> VariationReport {
    let j = jordan(m);
    let mut pos = XNonneg::zero();
    let mut neg = XNonneg::zero();
    let mut infinite_terms = Vec::new();
    for (k, t) in c.terms().iter().enumerate() {
        let p = j.plus.eval(&t.set);
        let n = j.minus.eval(&t.set);
        let x = t.magnitude();
        let (up, down) = match t.side() {
            Side::Pos => (x.scale(&p), x.scale(&n)),
            Side::Neg => (x.scale(&n), x.scale(&p)),
        };
        if !up.is_finite() || !down.is_finite() {
            infinite_terms.push(k);
        }
        pos += &up;
        neg += &down;
    }
    VariationReport {
        overall: pos.minus(&neg),
        total: &pos + &neg,
        pos,
        neg,
        infinite_terms,
    }
}

/// `∫μC`, unless both variations are infinite.
pub fn riesz_integrate(m: &RealMeasure, c: &FormalSum) -> Result<XReal> {
    match variations(m, c).overall {
        XReal::BothInf => Err(Error::IndefiniteIntegral),
        v => Ok(v),
    }
}

/// The infima of the variations over all representations of a step function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BestVariations {
    pub int_plus: XNonneg,
    pub int_minus: XNonneg,
    pub int_total: XNonneg,
}

/// `∫⁺μf = ∫|f|⁺d|μ|⁺ + ∫|f|⁻d|μ|⁻` and `∫⁻μf = ∫|f|⁻d|μ|⁺ + ∫|f|⁺d|μ|⁻`.
pub fn best_variations(m: &RealMeasure, f: &StepProfile) -> Result<BestVariations> {
    if !f.is_finite() {
        return Err(Error::domain("best_variations needs a finite-valued profile"));
    }
    let j = jordan(m);
    let mut plus = Rat::zero();
    let mut minus = Rat::zero();
    for (set, v) in f.pieces() {
        let v = v.as_finite().expect("checked finite");
        let (mp, mm) = (j.plus.eval(set), j.minus.eval(set));
        plus += v.pos_part() * &mp + v.neg_part() * &mm;
        minus += v.neg_part() * &mp + v.pos_part() * &mm;
    }
    Ok(BestVariations {
        int_total: XNonneg::Finite(&plus + &minus),
        int_plus: XNonneg::Finite(plus),
        int_minus: XNonneg::Finite(minus),
    })
}

/// A function with certified step minorants and majorants at every depth.
pub trait RefinableFunction {
    /// `(lower, upper)` with `lower ≤ f ≤ upper` pointwise.
    fn step_bounds(&self, depth: u32) -> Result<(StepProfile, StepProfile)>;
}

impl RefinableFunction for StepProfile {
    fn step_bounds(&self, _depth: u32) -> Result<(StepProfile, StepProfile)> {
        if !self.is_finite() {
            return Err(Error::domain("refinable step function must be finite"));
        }
        Ok((self.clone(), self.clone()))
    }
}

/// `Σ coeffs[i] x^i` restricted to a bounded interval.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Polynomial {
    pub coeffs: Vec<Rat>,
    pub domain: Interval,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Rat>, domain: Interval) -> Polynomial {
        Polynomial { coeffs, domain }
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.coeffs
            .iter()
            .rev()
            .fold(Rat::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64())
    }

    fn derivative(&self) -> Vec<Rat> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * Rat::from_int(i as i64))
            .collect()
    }

    /// `2^depth` equal cells covering the domain; the outer end types follow
    /// the domain, inner cells are half-open.
    pub fn cells(&self, depth: u32) -> Vec<Interval> {
        dyadic_cells(&self.domain, depth)
    }

    /// Certified `(min, max)` of the polynomial on the closure of `[a, b]`.
    /// Exact when the cell is monotone, otherwise the Bernstein hull.
    pub fn range_on(&self, a: &Rat, b: &Rat) -> (Rat, Rat) {
        let d = bernstein(&self.derivative(), a, b);
        if d.iter().all(|c| !c.is_negative()) || d.iter().all(|c| !c.is_positive()) {
            let (fa, fb) = (self.eval(a), self.eval(b));
            return if fa <= fb { (fa, fb) } else { (fb, fa) };
        }
        let hull = bernstein(&self.coeffs, a, b);
        let lo = hull.iter().min().cloned().unwrap_or_default();
        let hi = hull.iter().max().cloned().unwrap_or_default();
        (lo, hi)
    }
}

pub fn dyadic_cells(domain: &Interval, depth: u32) -> Vec<Interval> {
    if domain.is_empty() {
        return Vec::new();
    }
    let n = 1i64 << depth;
    let width = domain.length() * Rat::dyadic(depth);
    (0..n)
        .map(|k| {
            let lo = domain.lo() + &width * Rat::from_int(k);
            let hi = domain.lo() + &width * Rat::from_int(k + 1);
            let lo_closed = if k == 0 { domain.lo_closed() } else { true };
            let hi_closed = if k == n - 1 { domain.hi_closed() } else { false };
            Interval::new(lo, lo_closed, hi, hi_closed)
        })
        .filter(|c| !c.is_empty())
        .collect()
}

/// Bernstein coefficients of `Σ coeffs[i] x^i` on `[a, b]`.
fn bernstein(coeffs: &[Rat], a: &Rat, b: &Rat) -> Vec<Rat> {
    if coeffs.is_empty() {
        return vec![Rat::zero()];
    }
    let n = coeffs.len() - 1;
    // coefficients of q(t) = p(a + (b - a) t)
    let h = b - a;
    let mut q = vec![Rat::zero(); n + 1];
    for (i, c) in coeffs.iter().enumerate() {
        // c (a + h t)^i
        for k in 0..=i {
            let term = c
                * Rat::from_int(binomial(i, k))
                * pow(a, i - k)
                * pow(&h, k);
            q[k] += term;
        }
    }
    (0..=n)
        .map(|k| {
            (0..=k)
                .map(|i| &q[i] * Rat::from_int(binomial(k, i)) / Rat::from_int(binomial(n, i)))
                .sum()
        })
        .collect()
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

fn pow(x: &Rat, e: usize) -> Rat {
    (0..e).fold(Rat::one(), |acc, _| acc * x)
}

impl RefinableFunction for Polynomial {
    fn step_bounds(&self, depth: u32) -> Result<(StepProfile, StepProfile)> {
        if depth > 24 {
            return Err(Error::domain("darboux depth is limited to 24"));
        }
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        for cell in self.cells(depth) {
            let (lo, hi) = self.range_on(cell.lo(), cell.hi());
            lower.push((cell.clone(), lo));
            upper.push((cell, hi));
        }
        Ok((
            StepProfile::from_rat_pieces(lower)?,
            StepProfile::from_rat_pieces(upper)?,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DarbouxBounds {
    pub lower: Rat,
    pub upper: Rat,
    pub depth: u32,
}

/// Integrals of the depth-`depth` minorant and majorant against `m ≥ 0`.
pub fn darboux_bounds(m: &RealMeasure, f: &dyn RefinableFunction, depth: u32) -> Result<DarbouxBounds> {
    if !m.is_nonnegative() {
        return Err(Error::domain("Darboux bounds need a nonnegative measure"));
    }
    let (lo, hi) = f.step_bounds(depth)?;
    let integrate = |p: &StepProfile| -> Result<Rat> {
        riesz_integrate(m, &p.to_formal_sum())?
            .as_finite()
            .cloned()
            .ok_or_else(|| Error::Internal("finite step integral came out infinite".into()))
    };
    Ok(DarbouxBounds {
        lower: integrate(&lo)?,
        upper: integrate(&hi)?,
        depth,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesResult {
    pub value: XReal,
    pub certified_tail: XNonneg,
    pub truncation: usize,
}

/// Termwise integration of a truncated series `Σ fₙ`. The caller certifies
/// the total variation of the omitted tail.
pub fn series_integrate(m: &RealMeasure, terms: &[FormalSum], tail_total_var_bound: XNonneg) -> Result<SeriesResult> {
    let mut values = Vec::with_capacity(terms.len());
    let mut neg = XNonneg::zero();
    for t in terms {
        let rep = variations(m, t);
        neg += &rep.neg;
        if rep.overall == XReal::BothInf {
            return Err(Error::IndefiniteIntegral);
        }
        values.push(rep.overall);
    }
    if !neg.is_finite() {
        return Err(Error::domain("the negative variations of the terms do not sum to a finite value"));
    }
    let value = ext_sum(&values);
    let joined = terms.iter().fold(FormalSum::empty(), |acc, t| acc.concat(t));
    let direct = riesz_integrate(m, &joined)?;
    if direct != value {
        return Err(Error::Internal(format!(
            "termwise sum {value} differs from the integral of the joined sum {direct}"
        )));
    }
    Ok(SeriesResult {
        value,
        certified_tail: tail_total_var_bound,
        truncation: terms.len(),
    })
}

/// `Σ_{n<N} a·rⁿ·χ_S` with the tail `a·r^N/(1 − r)·|μ|(S)` certified in
/// closed form; `a ≥ 0`, `0 ≤ r < 1`.
pub fn geometric_series(m: &RealMeasure, first: &Rat, ratio: &Rat, set: &Interval, n: usize) -> Result<SeriesResult> {
    if first.is_negative() || ratio.is_negative() || ratio >= &Rat::one() {
        return Err(Error::domain("geometric series needs a ≥ 0 and 0 ≤ r < 1"));
    }
    let mut terms = Vec::with_capacity(n);
    let mut coeff = first.clone();
    for _ in 0..n {
        terms.push(FormalSum::from_pairs([(coeff.clone(), set.clone())]));
        coeff = &coeff * ratio;
    }
    let j = jordan(m);
    let weight = j.plus.eval(set) + j.minus.eval(set);
    let tail = coeff / (Rat::one() - ratio) * weight;
    series_integrate(m, &terms, XNonneg::Finite(tail))
}

/// Nested closed intervals around each point, `depth` per point, whose
/// `|μ|`-semivariation widths add up to less than `epsilon`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NegligibilityCert {
    pub points: Vec<Rat>,
    pub intervals: Vec<Interval>,
    pub depth: usize,
    pub epsilon: Rat,
}

impl NegligibilityCert {
    /// `Σ max(|μ|⁺(I), |μ|⁻(I))` over the intervals.
    pub fn weight(&self, m: &RealMeasure) -> Rat {
        let j = jordan(m);
        self.intervals
            .iter()
            .map(|i| Rat::max_of(&j.plus.eval(i), &j.minus.eval(i)).clone())
            .sum()
    }

    /// Recounts coverage and the total weight.
    pub fn verify(&self, m: &RealMeasure) -> bool {
        let covered = self
            .points
            .iter()
            .all(|p| self.intervals.iter().filter(|i| i.contains(p)).count() >= self.depth);
        covered && self.weight(m) < self.epsilon
    }
}

pub fn negligible_certificate(points: &[Rat], depth: usize, epsilon: &Rat, m: &RealMeasure) -> Result<NegligibilityCert> {
    if !epsilon.is_positive() {
        return Err(Error::domain("epsilon must be positive"));
    }
    for p in points {
        let mass = m.mass_at(p);
        if !mass.is_zero() {
            return Err(Error::CannotCertify {
                point: p.to_string(),
                mass: mass.to_string(),
            });
        }
    }
    let density: Rat = m
        .pieces()
        .iter()
        .map(|p| p.weight.abs())
        .max()
        .unwrap_or_default();
    // keep away from every atom
    let mut radius = Rat::one();
    for p in points {
        for a in m.atoms() {
            let gap = (&a.point - p).abs();
            if &gap / Rat::from_int(2) < radius {
                radius = gap / Rat::from_int(2);
            }
        }
    }
    let n = Rat::from_int(points.len().max(1) as i64);
    let budget = epsilon / (Rat::from_int(8) * (density + Rat::one()) * n);
    if budget < radius {
        radius = budget;
    }
    let build = |r: &Rat| -> Vec<Interval> {
        points
            .iter()
            .flat_map(|p| {
                (0..depth).map(move |k| {
                    let h = r * Rat::dyadic(k as u32);
                    Interval::closed(p - &h, p + &h)
                })
            })
            .collect()
    };
    let mut cert = NegligibilityCert {
        points: points.to_vec(),
        intervals: build(&radius),
        depth,
        epsilon: epsilon.clone(),
    };
    while !cert.verify(m) {
        radius = radius / Rat::from_int(2);
        cert.intervals = build(&radius);
    }
    Ok(cert)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndicatorResult {
    pub profile: StepProfile,
    /// Number of series terms after which the partial sums stop changing.
    pub stabilized_at: usize,
}

/// `c·χ{f > d}` through the series `Σₙ ((n+1)h)∧c − (nh)∧c` with
/// `h = (f − d) ∨ 0`, rechecked against direct thresholding.
pub fn indicator_above(f: &StepProfile, d: &Rat, c: &Rat, cap: usize) -> Result<IndicatorResult> {
    if !f.is_finite() {
        return Err(Error::domain("indicator_above needs a finite profile"));
    }
    if d.is_negative() {
        return Err(Error::domain("threshold d must be nonnegative"));
    }
    let height = c.abs();
    let h = f.map_rat(|v| (v - d).pos_part());
    let min_excess = h
        .pieces()
        .iter()
        .filter_map(|(_, v)| v.as_finite().cloned())
        .min();
    let required = match &min_excess {
        Some(e) if !height.is_zero() => (&height / e).ceil_usize(),
        _ => 0,
    };
    if required > cap {
        return Err(Error::Stabilization { cap, required });
    }
    let cap_at = |k: usize| h.map_rat(|v| Rat::min_of(&(v * Rat::from_int(k as i64)), &height).clone());
    let mut sum = StepProfile::zero();
    for n in 0..required {
        let term = cap_at(n + 1).combine_rat(&cap_at(n), |a, b| a - b);
        sum = sum.add(&term);
    }
    if c.is_negative() {
        sum = sum.map_rat(|v| -v);
    }
    let direct = f.map_rat(|v| if v > d { c.clone() } else { Rat::zero() });
    if sum != direct {
        return Err(Error::Internal(format!(
            "series indicator {sum:?} differs from thresholding {direct:?}"
        )));
    }
    Ok(IndicatorResult {
        profile: sum,
        stabilized_at: required,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formal_sums::Term;

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    fn q(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    fn co(a: i64, b: i64) -> Interval {
        Interval::closed_open(r(a), r(b))
    }

    fn lambda() -> RealMeasure {
        RealMeasure::lebesgue(r(1), co(-100, 100))
    }

    fn two_sign() -> RealMeasure {
        RealMeasure::lebesgue(r(1), co(0, 1)).plus(&RealMeasure::lebesgue(r(-2), co(1, 2)))
    }

    fn fin(x: i64) -> XNonneg {
        XNonneg::Finite(r(x))
    }

    #[test]
    fn variations_examples() {
        let c = FormalSum::from_pairs([(r(2), co(0, 1)), (r(-1), co(0, 2))]);
        let v = variations(&lambda(), &c);
        assert_eq!((v.pos, v.neg, v.total, v.overall), (fin(2), fin(2), fin(4), XReal::zero()));

        let v = variations(&two_sign(), &FormalSum::from_pairs([(r(1), co(0, 2))]));
        assert_eq!((v.pos, v.neg, v.overall), (fin(1), fin(2), XReal::Finite(r(-1))));

        let v = variations(&lambda(), &FormalSum::empty());
        assert_eq!((v.pos, v.neg, v.total, v.overall), (fin(0), fin(0), fin(0), XReal::zero()));
    }

    #[test]
    fn riesz_examples() {
        let c = FormalSum::from_pairs([(r(1), co(0, 1)), (r(-1), co(1, 2))]);
        assert_eq!(riesz_integrate(&lambda(), &c).unwrap(), XReal::zero());

        let inf = FormalSum::new(vec![Term::new(XReal::PosInf, co(0, 1))]).unwrap();
        assert_eq!(riesz_integrate(&lambda(), &inf).unwrap(), XReal::PosInf);
        assert_eq!(variations(&lambda(), &inf).infinite_terms, vec![0]);

        let both = inf.concat(&inf.negate());
        assert_eq!(riesz_integrate(&lambda(), &both).unwrap_err(), Error::IndefiniteIntegral);

        // an infinite coefficient on a null set contributes nothing
        let null = FormalSum::new(vec![Term::new(XReal::PosInf, co(200, 300))]).unwrap();
        assert_eq!(riesz_integrate(&lambda(), &null).unwrap(), XReal::zero());
    }

    #[test]
    fn best_variation_examples() {
        let f = StepProfile::indicator(co(0, 1));
        let b = best_variations(&lambda(), &f).unwrap();
        assert_eq!((b.int_plus, b.int_minus, b.int_total), (fin(1), fin(0), fin(1)));
        let neg = RealMeasure::lebesgue(r(-1), co(0, 1));
        let b = best_variations(&neg, &f).unwrap();
        assert_eq!((b.int_plus, b.int_minus, b.int_total), (fin(0), fin(1), fin(1)));
        let b = best_variations(&lambda(), &StepProfile::zero()).unwrap();
        assert_eq!(b.int_total, fin(0));
    }

    #[test]
    fn darboux_examples() {
        let lam = lambda();
        let id = Polynomial::new(vec![r(0), r(1)], co(0, 1));
        let b = darboux_bounds(&lam, &id, 4).unwrap();
        assert_eq!((b.lower, b.upper), (q(15, 32), q(17, 32)));

        let sq = Polynomial::new(vec![r(0), r(0), r(1)], co(0, 1));
        for k in 0..8 {
            let b = darboux_bounds(&lam, &sq, k).unwrap();
            assert_eq!(&b.upper - &b.lower, Rat::dyadic(k));
        }

        let constant = Polynomial::new(vec![r(3)], co(1, 4));
        for k in 0..5 {
            let b = darboux_bounds(&lam, &constant, k).unwrap();
            assert_eq!((b.lower.clone(), b.upper.clone()), (r(9), r(9)));
        }

        assert_eq!(darboux_bounds(&two_sign(), &id, 1).unwrap_err().name(), "DomainError");
    }

    #[test]
    fn bernstein_hull_brackets_nonmonotone_cells() {
        // (x - 1/2)^2 dips inside [0,1]
        let p = Polynomial::new(vec![q(1, 4), r(-1), r(1)], co(0, 1));
        let (lo, hi) = p.range_on(&r(0), &r(1));
        assert!(lo <= r(0) && hi >= q(1, 4));
        for k in 0..=16 {
            let x = q(k, 16);
            let v = p.eval(&x);
            assert!(lo <= v && v <= hi);
        }
    }

    #[test]
    fn series_examples() {
        let terms: Vec<FormalSum> = (0..10)
            .map(|n| FormalSum::from_pairs([(Rat::dyadic(n + 1), co(0, 1))]))
            .collect();
        let out = series_integrate(&lambda(), &terms, XNonneg::Finite(Rat::dyadic(10))).unwrap();
        assert_eq!(out.value, XReal::Finite(q(1023, 1024)));
        assert_eq!(out.certified_tail, XNonneg::Finite(q(1, 1024)));
        assert_eq!(out.truncation, 10);

        let single = FormalSum::from_pairs([(r(3), co(0, 2))]);
        let out = series_integrate(&lambda(), &[single], XNonneg::zero()).unwrap();
        assert_eq!(out.value, XReal::Finite(r(6)));

        let geo = geometric_series(&lambda(), &q(1, 2), &q(1, 2), &co(0, 1), 10).unwrap();
        assert_eq!(geo.value, XReal::Finite(q(1023, 1024)));
        assert_eq!(geo.certified_tail, XNonneg::Finite(q(1, 1024)));
        assert!(geometric_series(&lambda(), &r(1), &r(1), &co(0, 1), 3).is_err());
    }

    #[test]
    fn negligible_examples() {
        let lam = lambda();
        let cert = negligible_certificate(&[r(0), q(1, 2)], 3, &q(1, 8), &lam).unwrap();
        assert_eq!(cert.intervals.len(), 6);
        assert!(cert.verify(&lam));
        let total: Rat = cert.intervals.iter().map(Interval::length).sum();
        assert!(total < q(1, 8));

        assert!(negligible_certificate(&[], 3, &q(1, 8), &lam).unwrap().intervals.is_empty());

        let err = negligible_certificate(&[r(0)], 3, &q(1, 8), &RealMeasure::dirac(r(1), r(0))).unwrap_err();
        assert_eq!(err.name(), "CannotCertify");

        // a nearby atom is avoided
        let m = lam.plus(&RealMeasure::dirac(r(5), q(1, 1000)));
        let cert = negligible_certificate(&[r(0)], 4, &q(1, 100), &m).unwrap();
        assert!(cert.verify(&m));
    }

    #[test]
    fn indicator_examples() {
        let f = StepProfile::from_rat_pieces([(co(0, 1), r(0)), (co(1, 2), r(2))]).unwrap();
        let out = indicator_above(&f, &r(1), &r(5), 100).unwrap();
        assert_eq!(out.profile, StepProfile::constant(XReal::Finite(r(5)), co(1, 2)));
        assert_eq!(out.stabilized_at, 5);

        let err = indicator_above(&f, &r(1), &r(5), 4).unwrap_err();
        assert_eq!(err, Error::Stabilization { cap: 4, required: 5 });

        let low = StepProfile::constant(XReal::Finite(r(1)), co(0, 3));
        assert!(indicator_above(&low, &r(1), &r(7), 10).unwrap().profile.is_zero());

        let out = indicator_above(&StepProfile::constant(XReal::Finite(r(3)), co(0, 3)), &r(2), &r(1), 10).unwrap();
        assert_eq!(out.profile, StepProfile::indicator(co(0, 3)));
        assert_eq!(out.stabilized_at, 1);

        let out = indicator_above(&f, &r(1), &r(-2), 10).unwrap();
        assert_eq!(out.profile, StepProfile::constant(XReal::Finite(r(-2)), co(1, 2)));
    }
}
