//! Seeded random instances on rational grids.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::daniell::StepLatticeElem;
use crate::formal_sums::{evaluate, FormalSum, Side, StepProfile, Term};
use crate::gauge::{Gauge, GaugeCell};
use crate::intervals::Interval;
use crate::measures::{LebesguePiece, PointMass, RealMeasure};
use crate::numerics::{Rat, XNonneg, XReal};

/// Grid `[lo, hi]` with step `1/denom`.
#[derive(Debug, Clone, Copy)]
pub struct Grid {
    pub lo: i64,
    pub hi: i64,
    pub denom: i64,
}

impl Grid {
    pub const fn new(lo: i64, hi: i64, denom: i64) -> Grid {
        Grid { lo, hi, denom }
    }

    pub fn span(&self) -> Interval {
        Interval::closed_open(Rat::from_int(self.lo), Rat::from_int(self.hi))
    }
}

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Sampler {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.gen()
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    /// Uniform grid point of `[lo, hi]` with step `1/denom`.
    pub fn rat(&mut self, lo: i64, hi: i64, denom: i64) -> Rat {
        Rat::new(self.rng.gen_range(lo * denom..=hi * denom), denom)
    }

    pub fn nonzero_rat(&mut self, lo: i64, hi: i64, denom: i64) -> Rat {
        loop {
            let r = self.rat(lo, hi, denom);
            if !r.is_zero() {
                return r;
            }
        }
    }

    /// Rational strictly between `a` and `b`.
    pub fn between(&mut self, a: &Rat, b: &Rat) -> Rat {
        let k = self.rng.gen_range(1..8i64);
        a + &((b - a) * Rat::new(k, 8))
    }

    /// Nondegenerate interval on the grid with random end types.
    pub fn interval(&mut self, g: Grid) -> Interval {
        let n = (g.hi - g.lo) * g.denom;
        let i = self.rng.gen_range(0..n);
        let j = self.rng.gen_range(i + 1..=n);
        let at = |k: i64| Rat::new(g.lo * g.denom + k, g.denom);
        Interval::new(at(i), self.coin(), at(j), self.coin())
    }

    /// Mostly nondegenerate intervals, with the occasional singleton.
    pub fn set(&mut self, g: Grid) -> Interval {
        if self.chance(0.1) {
            Interval::point(self.rat(g.lo, g.hi, g.denom))
        } else {
            self.interval(g)
        }
    }

    /// Random interval with endpoints on the `2^-depth` grid of `[0, 2)`.
    pub fn dyadic_interval(&mut self, depth: u32) -> Interval {
        let n = 2i64 << depth;
        let i = self.below(n as usize) as i64;
        let j = i + 1 + self.below((n - i) as usize) as i64;
        Interval::closed_open(Rat::new(i, n / 2), Rat::new(j, n / 2))
    }

    /// A few weighted Lebesgue pieces and point masses on the grid.
    pub fn measure(&mut self, g: Grid) -> RealMeasure {
        let pieces = (0..self.rng.gen_range(1..=3))
            .map(|_| LebesguePiece {
                weight: self.nonzero_rat(-3, 3, 2),
                support: self.interval(g),
            })
            .collect();
        let atoms = (0..self.rng.gen_range(0..=2))
            .map(|_| PointMass {
                mass: self.nonzero_rat(-2, 2, 2),
                point: self.rat(g.lo, g.hi, g.denom),
            })
            .collect();
        RealMeasure::new(pieces, atoms)
    }

    /// Nonnegative measure.
    pub fn positive_measure(&mut self, g: Grid) -> RealMeasure {
        let pieces = (0..self.rng.gen_range(1..=3))
            .map(|_| LebesguePiece {
                weight: self.rat(1, 3, 2),
                support: self.interval(g),
            })
            .collect();
        let atoms = (0..self.rng.gen_range(0..=2))
            .map(|_| PointMass {
                mass: self.rat(1, 2, 2),
                point: self.rat(g.lo, g.hi, g.denom),
            })
            .collect();
        RealMeasure::new(pieces, atoms)
    }

    /// Finite coefficients in `[-max, max]` (or `[0, max]` if `nonneg`).
    pub fn formal_sum(&mut self, g: Grid, max_terms: usize, max: i64, nonneg: bool) -> FormalSum {
        let n = self.rng.gen_range(1..=max_terms);
        let lo = if nonneg { 0 } else { -max };
        let pairs: Vec<(Rat, Interval)> = (0..n).map(|_| (self.rat(lo, max, 4), self.set(g))).collect();
        FormalSum::from_pairs(pairs)
    }

    /// Signed sum where some coefficients may be `±∞`; never both signs of
    /// infinity unless `allow_both`.
    pub fn extended_sum(&mut self, g: Grid, max_terms: usize, allow_both: bool) -> FormalSum {
        let mut terms: Vec<Term> = self.formal_sum(g, max_terms, 5, false).terms().to_vec();
        let inf = if self.coin() { XReal::PosInf } else { XReal::NegInf };
        if self.chance(0.5) {
            terms.push(Term::new(inf.clone(), self.interval(g)));
        }
        if allow_both {
            terms.push(Term::new(inf.neg(), self.interval(g)));
        }
        terms.shuffle(&mut self.rng);
        FormalSum::new(terms).expect("no indefinite coefficient")
    }

    pub fn step_profile(&mut self, g: Grid, max_terms: usize) -> StepProfile {
        evaluate(&self.formal_sum(g, max_terms, 5, false))
    }

    pub fn lattice_elem(&mut self, g: Grid, max_terms: usize) -> StepLatticeElem {
        StepLatticeElem::new(evaluate(&self.formal_sum(g, max_terms, 4, true))).expect("nonnegative")
    }

    /// Splits a magnitude into two positive parts (an infinite one into
    /// `∞` plus something).
    fn split_magnitude(&mut self, x: &XNonneg) -> (XNonneg, XNonneg) {
        match x {
            XNonneg::Finite(v) => {
                let t = Rat::new(self.rng.gen_range(1..8), 8);
                (XNonneg::Finite(v * &t), XNonneg::Finite(v * &(Rat::one() - &t)))
            }
            XNonneg::PosInf => {
                let other = if self.coin() {
                    XNonneg::PosInf
                } else {
                    XNonneg::Finite(self.rat(1, 5, 2))
                };
                (XNonneg::PosInf, other)
            }
        }
    }

    /// Splits a set in two at an interior point, or `None` for a singleton.
    fn split_set(&mut self, s: &Interval) -> Option<(Interval, Interval)> {
        if s.is_singleton() {
            return None;
        }
        let p = self.between(s.lo(), s.hi());
        let left_gets = self.coin();
        Some((
            Interval::new(s.lo().clone(), s.lo_closed(), p.clone(), left_gets),
            Interval::new(p, !left_gets, s.hi().clone(), s.hi_closed()),
        ))
    }

    /// `stages` rounds of random number and set splits of every term,
    /// shuffled. Returns the child and, per child term, its parent index.
    pub fn decompose(&mut self, c: &FormalSum, stages: usize) -> (FormalSum, Vec<usize>) {
        let mut cur: Vec<(Term, usize)> = c.terms().iter().cloned().zip(0..).collect();
        for _ in 0..stages {
            let mut next = Vec::new();
            for (t, w) in cur {
                let neg = t.side() == Side::Neg;
                let signed = |m: XNonneg| if neg { m.to_xreal().neg() } else { m.to_xreal() };
                match self.below(3) {
                    0 => next.push((t, w)),
                    1 => {
                        let (a, b) = self.split_magnitude(&t.magnitude());
                        next.push((Term::new(signed(a), t.set.clone()), w));
                        next.push((Term::new(signed(b), t.set.clone()), w));
                    }
                    _ => match self.split_set(&t.set) {
                        Some((l, r)) => {
                            next.push((Term::new(t.coeff.clone(), l), w));
                            next.push((Term::new(t.coeff.clone(), r), w));
                        }
                        None => next.push((t, w)),
                    },
                }
            }
            cur = next;
        }
        cur.shuffle(&mut self.rng);
        let (terms, witness): (Vec<Term>, Vec<usize>) = cur.into_iter().unzip();
        (FormalSum::new(terms).expect("signs preserved"), witness)
    }

    /// Partition of `domain` into up to `cells` pieces at grid points, with
    /// `δ` drawn from `1/2, …, 1/64`.
    pub fn gauge(&mut self, domain: &Interval, cells: usize) -> Gauge {
        let mut cuts: Vec<Rat> = (1..cells).map(|_| self.between(domain.lo(), domain.hi())).collect();
        cuts.sort();
        cuts.dedup();
        let mut parts = Vec::new();
        let mut lo = (domain.lo().clone(), domain.lo_closed());
        for c in cuts {
            parts.push(Interval::new(lo.0.clone(), lo.1, c.clone(), false));
            lo = (c, true);
        }
        parts.push(Interval::new(lo.0, lo.1, domain.hi().clone(), domain.hi_closed()));
        Gauge {
            cells: parts
                .into_iter()
                .map(|set| GaugeCell {
                    set,
                    delta: Rat::dyadic(self.rng.gen_range(1..=6)),
                })
                .collect(),
        }
    }
}
