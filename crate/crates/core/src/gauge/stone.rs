//! Points of the Stone completion of the finite-interval system: the maximal
//! filters `[a]`, `[a+]` and `[a-]`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::intervals::Interval;
use crate::numerics::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StoneSide {
    /// `[a]`: intervals containing `a`.
    At,
    /// `[a+]`: intervals reaching `a` from the right.
    Right,
    /// `[a-]`: intervals reaching `a` from the left.
    Left,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StonePoint {
    pub base: Rat,
    pub side: StoneSide,
}

impl StonePoint {
    pub fn at(base: Rat) -> StonePoint {
        StonePoint { base, side: StoneSide::At }
    }

    pub fn right(base: Rat) -> StonePoint {
        StonePoint { base, side: StoneSide::Right }
    }

    pub fn left(base: Rat) -> StonePoint {
        StonePoint { base, side: StoneSide::Left }
    }
}

impl fmt::Display for StonePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.side {
            StoneSide::At => write!(f, "[{}]", self.base),
            StoneSide::Right => write!(f, "[{}+]", self.base),
            StoneSide::Left => write!(f, "[{}-]", self.base),
        }
    }
}

/// `I ∈ p`.
///
/// `I ∈ [a+]` iff `a` lies in the closure of `I ∩ (a, ∞)`, i.e. `lo ≤ a < hi`;
/// symmetrically `I ∈ [a-]` iff `lo < a ≤ hi`.
pub fn stone_member(i: &Interval, p: &StonePoint) -> bool {
    if i.is_empty() {
        return false;
    }
    let a = &p.base;
    match p.side {
        StoneSide::At => i.contains(a),
        StoneSide::Right => i.lo() <= a && a < i.hi(),
        StoneSide::Left => i.lo() < a && a <= i.hi(),
    }
}

/// The limit map sends all three filters over `a` to `a`.
pub fn stone_lim(p: &StonePoint) -> Rat {
    p.base.clone()
}
