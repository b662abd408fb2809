//! Coordinate algebra, neighborhoods and arc constructions.
//!
//! Every variant shares the square-lattice coordinate frame: a vertex is the
//! pair `(a1, a2)` of signed step counts along the two basis directions. The
//! triangular variants overlay one extra diagonal step pair on that frame
//! rather than re-coordinatizing it, so arcs are directly comparable across
//! variants.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::ops::{Add, Neg};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A lattice site in the shared square-lattice frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub a1: i64,
    pub a2: i64,
}

impl Vertex {
    pub const ORIGIN: Vertex = Vertex { a1: 0, a2: 0 };

    pub const fn new(a1: i64, a2: i64) -> Self {
        Vertex { a1, a2 }
    }

    /// `|a1| + |a2|`, the square-lattice distance to the origin.
    pub fn norm(self) -> u64 {
        self.a1.unsigned_abs() + self.a2.unsigned_abs()
    }

    pub fn is_origin(self) -> bool {
        self == Self::ORIGIN
    }

    pub fn step(self, s: Step) -> Vertex {
        self + s
    }
}

/// Free-function form of [`Vertex::norm`].
pub fn norm(v: Vertex) -> u64 {
    v.norm()
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.a1, self.a2)
    }
}

impl FromStr for Vertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected \"a1,a2\", got {s:?}"));
        let (x, y) = s.split_once(',').ok_or_else(bad)?;
        let a1 = x.trim().parse().map_err(|_| bad())?;
        let a2 = y.trim().parse().map_err(|_| bad())?;
        Ok(Vertex { a1, a2 })
    }
}

impl Neg for Vertex {
    type Output = Vertex;

    fn neg(self) -> Vertex {
        Vertex::new(-self.a1, -self.a2)
    }
}

impl Add<Step> for Vertex {
    type Output = Vertex;

    fn add(self, s: Step) -> Vertex {
        Vertex::new(self.a1 + i64::from(s.d1), self.a2 + i64::from(s.d2))
    }
}

/// A unit move with components in `{-1, 0, 1}`, never both zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Step {
    d1: i8,
    d2: i8,
}

impl Step {
    pub const UP1: Step = Step { d1: 1, d2: 0 };
    pub const UP2: Step = Step { d1: 0, d2: 1 };
    pub const DOWN1: Step = Step { d1: -1, d2: 0 };
    pub const DOWN2: Step = Step { d1: 0, d2: -1 };
    /// `↑1 + ↑2`
    pub const UP12: Step = Step { d1: 1, d2: 1 };
    pub const DOWN12: Step = Step { d1: -1, d2: -1 };
    /// `↑1 + ↓2`
    pub const RIGHT12: Step = Step { d1: 1, d2: -1 };
    pub const LEFT12: Step = Step { d1: -1, d2: 1 };

    pub fn new(d1: i8, d2: i8) -> Result<Self> {
        if !(-1..=1).contains(&d1) || !(-1..=1).contains(&d2) || (d1 == 0 && d2 == 0) {
            return Err(Error::InvalidStep(d1, d2));
        }
        Ok(Step { d1, d2 })
    }

    pub fn d1(self) -> i8 {
        self.d1
    }

    pub fn d2(self) -> i8 {
        self.d2
    }
}

impl Neg for Step {
    type Output = Step;

    fn neg(self) -> Step {
        Step {
            d1: -self.d1,
            d2: -self.d2,
        }
    }
}

const Z2_STEPS: [Step; 4] = [Step::UP1, Step::UP2, Step::DOWN1, Step::DOWN2];
const TRI_UP_STEPS: [Step; 6] = [
    Step::UP1,
    Step::UP2,
    Step::UP12,
    Step::DOWN1,
    Step::DOWN2,
    Step::DOWN12,
];
const TRI_RIGHT_STEPS: [Step; 6] = [
    Step::UP1,
    Step::UP2,
    Step::RIGHT12,
    Step::DOWN1,
    Step::DOWN2,
    Step::LEFT12,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeVariant {
    /// Square lattice, degree 4.
    Z2,
    /// Triangular lattice built by adding `±(1,1)`.
    TriUp,
    /// Triangular lattice built by adding `±(1,-1)`.
    TriRight,
}

impl LatticeVariant {
    pub const ALL: [LatticeVariant; 3] = [
        LatticeVariant::Z2,
        LatticeVariant::TriUp,
        LatticeVariant::TriRight,
    ];

    /// Full step set in a fixed order; closed under negation.
    pub fn steps(self) -> &'static [Step] {
        match self {
            LatticeVariant::Z2 => &Z2_STEPS,
            LatticeVariant::TriUp => &TRI_UP_STEPS,
            LatticeVariant::TriRight => &TRI_RIGHT_STEPS,
        }
    }

    pub fn degree(self) -> usize {
        self.steps().len()
    }

    /// Upward step set used for path counting. Not defined for `TriRight`.
    pub fn up_steps(self) -> Result<&'static [Step]> {
        match self {
            LatticeVariant::Z2 => Ok(&Z2_STEPS[..2]),
            LatticeVariant::TriUp => Ok(&TRI_UP_STEPS[..3]),
            LatticeVariant::TriRight => Err(Error::UnsupportedVariant(self)),
        }
    }

    /// Graph distance from the origin, in closed form.
    pub fn distance(self, v: Vertex) -> u64 {
        let (x, y) = match self {
            LatticeVariant::Z2 => return v.norm(),
            LatticeVariant::TriUp => (v.a1, v.a2),
            LatticeVariant::TriRight => (v.a1, -v.a2),
        };
        // same-sign quadrants use the diagonal step
        if (x >= 0) == (y >= 0) {
            x.unsigned_abs().max(y.unsigned_abs())
        } else {
            x.unsigned_abs() + y.unsigned_abs()
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LatticeVariant::Z2 => "z2",
            LatticeVariant::TriUp => "tri-up",
            LatticeVariant::TriRight => "tri-right",
        }
    }
}

impl fmt::Display for LatticeVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LatticeVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "z2" => Ok(LatticeVariant::Z2),
            "tri-up" | "triup" => Ok(LatticeVariant::TriUp),
            "tri-right" | "triright" => Ok(LatticeVariant::TriRight),
            _ => Err(Error::Parse(format!("unknown lattice variant {s:?}"))),
        }
    }
}

/// Up-step neighbors in the fixed order `↑1, ↑2[, ↑1,2]`.
pub fn up_neighbors(v: Vertex, variant: LatticeVariant) -> Result<Vec<Vertex>> {
    Ok(variant.up_steps()?.iter().map(|&s| v + s).collect())
}

pub fn neighbors(v: Vertex, variant: LatticeVariant) -> Vec<Vertex> {
    variant.steps().iter().map(|&s| v + s).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" | "pos" => Ok(Sign::Plus),
            "-" | "minus" | "neg" => Ok(Sign::Minus),
            _ => Err(Error::Parse(format!("unknown arc sign {s:?}"))),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// One member of the convenient opposite-arc pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arc {
    pub k: u64,
    pub sign: Sign,
    pub vertices: Vec<Vertex>,
}

impl Arc {
    pub fn contains(&self, v: Vertex) -> bool {
        match self.sign {
            Sign::Plus => is_on_arc_z2(v, self.k),
            Sign::Minus => is_on_arc_z2(-v, self.k),
        }
    }
}

/// Membership test for the positive arc `A_k`.
pub fn is_on_arc_z2(v: Vertex, k: u64) -> bool {
    v.a1 >= 0 && v.a2 >= 0 && v.norm() == k
}

fn check_k(k: u64) -> Result<i64> {
    if k == 0 {
        return Err(Error::ZeroGeneration);
    }
    i64::try_from(k).map_err(|_| Error::Overflow(k))
}

/// The square-lattice arc `A_k` (or `A_-k`), ordered by descending `a1`.
pub fn arc_z2(k: u64, sign: Sign) -> Result<Arc> {
    let kk = check_k(k)?;
    let flip = match sign {
        Sign::Plus => 1,
        Sign::Minus => -1,
    };
    let vertices = (0..=kk)
        .rev()
        .map(|a1| Vertex::new(flip * a1, flip * (kk - a1)))
        .collect();
    Ok(Arc { k, sign, vertices })
}

/// Generation-by-generation union of up-neighbors, starting from `{v0}`.
pub fn arc_recursive(k: u64, variant: LatticeVariant) -> Result<BTreeSet<Vertex>> {
    check_k(k)?;
    let mut gen: BTreeSet<Vertex> = BTreeSet::from([Vertex::ORIGIN]);
    for _ in 0..k {
        let mut next = BTreeSet::new();
        for &v in &gen {
            next.extend(up_neighbors(v, variant)?);
        }
        gen = next;
    }
    Ok(gen)
}

/// Vertices reached by exactly `k` triangular up-steps from the origin:
/// `a1, a2 >= 0`, `max(a1, a2) <= k <= a1 + a2`.
pub fn arc_t(k: u64) -> Result<BTreeSet<Vertex>> {
    let kk = check_k(k)?;
    let mut out = BTreeSet::new();
    for a1 in 0..=kk {
        for a2 in (kk - a1)..=kk {
            out.insert(Vertex::new(a1, a2));
        }
    }
    Ok(out)
}

/// Closed-form membership for [`arc_t`].
pub fn is_on_arc_t(v: Vertex, k: u64) -> bool {
    let Ok(k) = i64::try_from(k) else {
        return false;
    };
    v.a1 >= 0 && v.a2 >= 0 && v.a1.max(v.a2) <= k && v.a1 + v.a2 >= k
}

/// Number of vertices within graph distance `k` of the origin.
pub fn ball_size(k: u64, variant: LatticeVariant) -> u64 {
    match variant {
        LatticeVariant::Z2 => 2 * k * k + 2 * k + 1,
        _ => 3 * k * k + 3 * k + 1,
    }
}

/// All vertices within graph distance `k` of the origin, sorted by `(a1, a2)`.
pub fn ball(k: u64, variant: LatticeVariant) -> Vec<Vertex> {
    let kk = i64::try_from(k).expect("ball radius exceeds i64");
    let mut out = Vec::with_capacity(ball_size(k, variant) as usize);
    for a1 in -kk..=kk {
        for a2 in -kk..=kk {
            let v = Vertex::new(a1, a2);
            if variant.distance(v) <= k {
                out.push(v);
            }
        }
    }
    out
}

/// Breadth-first construction of the ball; reference for [`ball`].
pub fn ball_bfs(k: u64, variant: LatticeVariant) -> Vec<Vertex> {
    let mut seen = HashSet::from([Vertex::ORIGIN]);
    let mut queue = VecDeque::from([(Vertex::ORIGIN, 0u64)]);
    while let Some((v, d)) = queue.pop_front() {
        if d == k {
            continue;
        }
        for u in neighbors(v, variant) {
            if seen.insert(u) {
                queue.push_back((u, d + 1));
            }
        }
    }
    let mut out: Vec<Vertex> = seen.into_iter().collect();
    out.sort();
    out
}
