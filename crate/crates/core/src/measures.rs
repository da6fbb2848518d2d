//! Signed measures on rational intervals: weighted Lebesgue pieces plus Dirac
//! atoms.
//!
//! Such a measure is σ-additive and has locally finite variation, so no
//! condition is checked by the constructor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intervals::{pairwise_disjoint, Interval};
use crate::numerics::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LebesguePiece {
    pub weight: Rat,
    pub support: Interval,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointMass {
    pub mass: Rat,
    pub point: Rat,
}

/// `Σ wₖ·λ|Sₖ + Σ mⱼ·δ_{pⱼ}`.
///
/// The normal form has pairwise disjoint half-open supports sorted left to
/// right, no two adjacent supports with equal weight, distinct sorted atom
/// points, and no zero weights or masses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RealMeasure {
    lebesgue: Vec<LebesguePiece>,
    atoms: Vec<PointMass>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasure {
    #[serde(default)]
    lebesgue: Vec<LebesguePiece>,
    #[serde(default)]
    atoms: Vec<PointMass>,
}

impl<'de> Deserialize<'de> for RealMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawMeasure::deserialize(d)?;
        Ok(RealMeasure::new(raw.lebesgue, raw.atoms))
    }
}

impl RealMeasure {
    pub fn new(lebesgue: Vec<LebesguePiece>, atoms: Vec<PointMass>) -> RealMeasure {
        let mut cuts: Vec<Rat> = Vec::new();
        for p in &lebesgue {
            if p.support.length().is_positive() {
                cuts.push(p.support.lo().clone());
                cuts.push(p.support.hi().clone());
            }
        }
        cuts.sort();
        cuts.dedup();
        let mut pieces: Vec<LebesguePiece> = Vec::new();
        for w in cuts.windows(2) {
            let mid = Rat::midpoint(&w[0], &w[1]);
            let weight: Rat = lebesgue
                .iter()
                .filter(|p| p.support.contains(&mid))
                .map(|p| p.weight.clone())
                .sum();
            if weight.is_zero() {
                continue;
            }
            if let Some(last) = pieces.last_mut() {
                if last.weight == weight && last.support.hi() == &w[0] {
                    last.support = Interval::closed_open(last.support.lo().clone(), w[1].clone());
                    continue;
                }
            }
            pieces.push(LebesguePiece {
                weight,
                support: Interval::closed_open(w[0].clone(), w[1].clone()),
            });
        }

        let mut sorted = atoms;
        sorted.sort_by(|a, b| a.point.cmp(&b.point));
        let mut merged: Vec<PointMass> = Vec::new();
        for a in sorted {
            match merged.last_mut() {
                Some(last) if last.point == a.point => last.mass += a.mass,
                _ => merged.push(a),
            }
        }
        merged.retain(|a| !a.mass.is_zero());
        RealMeasure {
            lebesgue: pieces,
            atoms: merged,
        }
    }

    pub fn zero() -> RealMeasure {
        RealMeasure::new(Vec::new(), Vec::new())
    }

    /// `w·λ` restricted to `support`.
    pub fn lebesgue(weight: Rat, support: Interval) -> RealMeasure {
        RealMeasure::new(vec![LebesguePiece { weight, support }], Vec::new())
    }

    pub fn dirac(mass: Rat, point: Rat) -> RealMeasure {
        RealMeasure::new(Vec::new(), vec![PointMass { mass, point }])
    }

    pub fn pieces(&self) -> &[LebesguePiece] {
        &self.lebesgue
    }

    pub fn atoms(&self) -> &[PointMass] {
        &self.atoms
    }

    pub fn plus(&self, other: &RealMeasure) -> RealMeasure {
        RealMeasure::new(
            self.lebesgue.iter().chain(&other.lebesgue).cloned().collect(),
            self.atoms.iter().chain(&other.atoms).cloned().collect(),
        )
    }

    pub fn scale(&self, k: &Rat) -> RealMeasure {
        RealMeasure::new(
            self.lebesgue
                .iter()
                .map(|p| LebesguePiece {
                    weight: &p.weight * k,
                    support: p.support.clone(),
                })
                .collect(),
            self.atoms
                .iter()
                .map(|a| PointMass {
                    mass: &a.mass * k,
                    point: a.point.clone(),
                })
                .collect(),
        )
    }

    pub fn negate(&self) -> RealMeasure {
        self.scale(&Rat::from_int(-1))
    }

    pub fn eval(&self, i: &Interval) -> Rat {
        let mut total = Rat::zero();
        for p in &self.lebesgue {
            total += &p.weight * p.support.intersect(i).length();
        }
        for a in &self.atoms {
            if i.contains(&a.point) {
                total += &a.mass;
            }
        }
        total
    }

    pub fn is_nonnegative(&self) -> bool {
        self.lebesgue.iter().all(|p| p.weight.is_positive())
            && self.atoms.iter().all(|a| a.mass.is_positive())
    }

    /// Mass carried by the single point `q`.
    pub fn mass_at(&self, q: &Rat) -> Rat {
        self.atoms
            .iter()
            .find(|a| &a.point == q)
            .map(|a| a.mass.clone())
            .unwrap_or_default()
    }

    /// Every point where the density or an atom changes: piece endpoints and
    /// atom locations, sorted.
    pub fn breakpoints(&self) -> Vec<Rat> {
        let mut out: Vec<Rat> = self
            .lebesgue
            .iter()
            .flat_map(|p| [p.support.lo().clone(), p.support.hi().clone()])
            .chain(self.atoms.iter().map(|a| a.point.clone()))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    fn filter(&self, keep: impl Fn(&Rat) -> bool, flip: bool) -> RealMeasure {
        let sign = |r: &Rat| if flip { -r } else { r.clone() };
        RealMeasure::new(
            self.lebesgue
                .iter()
                .filter(|p| keep(&p.weight))
                .map(|p| LebesguePiece {
                    weight: sign(&p.weight),
                    support: p.support.clone(),
                })
                .collect(),
            self.atoms
                .iter()
                .filter(|a| keep(&a.mass))
                .map(|a| PointMass {
                    mass: sign(&a.mass),
                    point: a.point.clone(),
                })
                .collect(),
        )
    }
}

/// `|μ|⁺`, `|μ|⁻` and `|μ|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JordanTriple {
    pub plus: RealMeasure,
    pub minus: RealMeasure,
    pub total: RealMeasure,
}

/// Splits each piece and atom by the sign of its weight. On the normal form
/// this is the exact Jordan decomposition.
pub fn jordan(m: &RealMeasure) -> JordanTriple {
    let plus = m.filter(Rat::is_positive, false);
    let minus = m.filter(Rat::is_negative, true);
    let total = plus.plus(&minus);
    JordanTriple { plus, minus, total }
}

/// `[-|μ|⁻(A), |μ|⁺(A)]` for `A` the disjoint union of `region`.
pub fn semivariation(m: &RealMeasure, region: &[Interval]) -> Result<(Rat, Rat)> {
    if !pairwise_disjoint(region) {
        return Err(Error::domain("semivariation region is not pairwise disjoint"));
    }
    let j = jordan(m);
    let lo: Rat = region.iter().map(|a| -j.minus.eval(a)).sum();
    let hi: Rat = region.iter().map(|a| j.plus.eval(a)).sum();
    Ok((lo, hi))
}

pub fn eval(m: &RealMeasure, i: &Interval) -> Rat {
    m.eval(i)
}

/// Product of two measures on rectangles `I × J`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectMeasure {
    pub factor_x: RealMeasure,
    pub factor_y: RealMeasure,
}

pub fn product(mx: &RealMeasure, my: &RealMeasure) -> RectMeasure {
    RectMeasure {
        factor_x: mx.clone(),
        factor_y: my.clone(),
    }
}

pub fn eval_rect(p: &RectMeasure, ix: &Interval, iy: &Interval) -> Rat {
    p.factor_x.eval(ix) * p.factor_y.eval(iy)
}
