//! Tiles over a totally ordered finite state set.
//!
//! States are indices into an ascending list: `State(0)` is the ⊑-minimum and
//! the derived `Ord` on [`State`] *is* the order ⊑. A tile is a set of
//! transitions `(p, c, q)` with `c ∈ {0, 1}`; priority 0 marks a Büchi
//! transition. Tiles that are upward-closed for the transition order form a
//! monoid under [`Tile::product`] whose unit is [`Tile::unit`].

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A state, identified by its rank in the universe's ascending order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct State(pub usize);

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Named states listed in ascending ⊑ order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StateUniverse {
    names: Vec<String>,
}

impl StateUniverse {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::EmptyUniverse);
        }
        let mut seen = BTreeSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(Error::DuplicateName(n.clone()));
            }
        }
        Ok(StateUniverse { names })
    }

    /// Universe `{0 ⊑ 1 ⊑ … ⊑ n-1}` named by decimal indices.
    pub fn numbered(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, q: State) -> &str {
        &self.names[q.0]
    }

    pub fn lookup(&self, name: &str) -> Option<State> {
        self.names.iter().position(|n| n == name).map(State)
    }

    pub fn states(&self) -> impl DoubleEndedIterator<Item = State> + ExactSizeIterator {
        (0..self.names.len()).map(State)
    }

    pub fn max(&self) -> State {
        State(self.names.len() - 1)
    }
}

/// A tile transition `(src, priority, dst)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub src: State,
    pub priority: u8,
    pub dst: State,
}

impl Transition {
    pub fn new(src: usize, priority: u8, dst: usize) -> Self {
        Transition {
            src: State(src),
            priority,
            dst: State(dst),
        }
    }

    pub fn is_horizontal(&self) -> bool {
        self.src == self.dst
    }

    pub fn is_buchi(&self) -> bool {
        self.priority == 0
    }

    /// The transition order: `self ⊑ other` iff the source rises, the target
    /// falls, and on identical endpoints the priority does not decrease.
    pub fn leq(&self, other: &Transition) -> bool {
        self.src <= other.src
            && other.dst <= self.dst
            && (self.src != other.src || self.dst != other.dst || self.priority <= other.priority)
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.src, self.priority, self.dst)
    }
}

/// Free-function form of [`Transition::leq`].
pub fn trans_leq(d1: &Transition, d2: &Transition) -> bool {
    d1.leq(d2)
}

const PRIO0: u8 = 0b01;
const PRIO1: u8 = 0b10;

fn prio_bit(c: u8) -> u8 {
    if c == 0 {
        PRIO0
    } else {
        PRIO1
    }
}

/// A set of Büchi transitions over `{0, …, size-1}`.
///
/// Stored as one cell per endpoint pair holding the priorities present.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tile {
    size: usize,
    cells: Vec<u8>,
}

impl fmt::Debug for Tile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.transitions()).finish()
    }
}

impl Tile {
    pub fn empty(size: usize) -> Self {
        Tile {
            size,
            cells: vec![0; size * size],
        }
    }

    /// The raw set, without closing it. Use [`Tile::is_upward_closed`] to
    /// check membership in Σ↑.
    pub fn from_transitions<I>(size: usize, transitions: I) -> Result<Self>
    where
        I: IntoIterator<Item = Transition>,
    {
        let mut t = Tile::empty(size);
        for d in transitions {
            t.check(&d)?;
            t.cells[d.src.0 * size + d.dst.0] |= prio_bit(d.priority);
        }
        Ok(t)
    }

    /// Smallest upward-closed tile containing `generators`.
    pub fn upward_closure<I>(size: usize, generators: I) -> Result<Self>
    where
        I: IntoIterator<Item = Transition>,
    {
        let mut t = Tile::empty(size);
        for d in generators {
            t.check(&d)?;
            for p in d.src.0..size {
                for q in 0..=d.dst.0 {
                    let bits = if p == d.src.0 && q == d.dst.0 && d.priority == 1 {
                        PRIO1
                    } else {
                        PRIO0 | PRIO1
                    };
                    t.cells[p * size + q] |= bits;
                }
            }
        }
        Ok(t)
    }

    /// The unit of Σ↑: the closure of the horizontal priority-1 loops,
    /// i.e. `{(p,c,q) | q ⊑ p, and c = 1 when p = q}`.
    pub fn unit(size: usize) -> Self {
        Self::upward_closure(size, (0..size).map(|q| Transition::new(q, 1, q))).expect("horizontal loops are in range")
    }

    /// All of `Q × {0,1} × Q`.
    pub fn full(size: usize) -> Self {
        Tile {
            size,
            cells: vec![PRIO0 | PRIO1; size * size],
        }
    }

    fn check(&self, d: &Transition) -> Result<()> {
        for s in [d.src, d.dst] {
            if s.0 >= self.size {
                return Err(Error::StateOutOfRange {
                    state: s.0,
                    size: self.size,
                });
            }
        }
        if d.priority > 1 {
            return Err(Error::InvalidPriority {
                priority: d.priority as i32,
                expected: "0 or 1".into(),
            });
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.size
    }

    fn cell(&self, p: usize, q: usize) -> u8 {
        self.cells[p * self.size + q]
    }

    pub fn contains(&self, d: &Transition) -> bool {
        d.src.0 < self.size
            && d.dst.0 < self.size
            && d.priority <= 1
            && self.cell(d.src.0, d.dst.0) & prio_bit(d.priority) != 0
    }

    /// Whether some transition `p → q` exists, whatever its priority.
    pub fn connects(&self, p: State, q: State) -> bool {
        self.cell(p.0, q.0) != 0
    }

    /// Whether a Büchi transition `p →0 q` exists.
    pub fn connects_buchi(&self, p: State, q: State) -> bool {
        self.cell(p.0, q.0) & PRIO0 != 0
    }

    /// Least priority among the transitions `p → q`, if any.
    pub fn min_priority(&self, p: State, q: State) -> Option<u8> {
        match self.cell(p.0, q.0) {
            0 => None,
            c if c & PRIO0 != 0 => Some(0),
            _ => Some(1),
        }
    }

    pub fn transitions(&self) -> impl Iterator<Item = Transition> + '_ {
        (0..self.size).flat_map(move |p| {
            (0..self.size).flat_map(move |q| {
                let c = self.cell(p, q);
                [(PRIO0, 0u8), (PRIO1, 1u8)]
                    .into_iter()
                    .filter(move |(bit, _)| c & bit != 0)
                    .map(move |(_, prio)| Transition::new(p, prio, q))
            })
        })
    }

    pub fn len(&self) -> usize {
        self.cells.iter().map(|c| c.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.iter().all(|&c| c == 0)
    }

    /// A pair `(present, missing)` with `present ⊑ missing`, when the tile is
    /// not upward-closed.
    pub fn closure_witness(&self) -> Option<(Transition, Transition)> {
        for d in self.transitions() {
            for p in d.src.0..self.size {
                for q in 0..=d.dst.0 {
                    for c in 0..=1u8 {
                        let e = Transition::new(p, c, q);
                        if d.leq(&e) && !self.contains(&e) {
                            return Some((d, e));
                        }
                    }
                }
            }
        }
        None
    }

    pub fn is_upward_closed(&self) -> bool {
        self.closure_witness().is_none()
    }

    pub fn is_subset(&self, other: &Tile) -> bool {
        self.size == other.size && self.cells.iter().zip(&other.cells).all(|(a, b)| a & !b == 0)
    }

    pub fn union(&self, other: &Tile) -> Result<Tile> {
        self.same_size(other)?;
        Ok(Tile {
            size: self.size,
            cells: self.cells.iter().zip(&other.cells).map(|(a, b)| a | b).collect(),
        })
    }

    fn same_size(&self, other: &Tile) -> Result<()> {
        if self.size != other.size {
            return Err(Error::SizeMismatch {
                left: self.size,
                right: other.size,
            });
        }
        Ok(())
    }

    /// Relational composition keeping the minimum priority of each composed
    /// pair of transitions.
    pub fn product(&self, other: &Tile) -> Result<Tile> {
        self.same_size(other)?;
        Ok(self.compose(other))
    }

    pub(crate) fn compose(&self, other: &Tile) -> Tile {
        let n = self.size;
        let mut out = Tile::empty(n);
        for p in 0..n {
            for q in 0..n {
                let a = self.cell(p, q);
                if a == 0 {
                    continue;
                }
                for r in 0..n {
                    let b = other.cell(q, r);
                    if b == 0 {
                        continue;
                    }
                    // min(c1, c2) is 0 as soon as one side offers 0, and 1
                    // only when both sides offer 1.
                    let mut bits = 0;
                    if (a | b) & PRIO0 != 0 {
                        bits |= PRIO0;
                    }
                    if a & b & PRIO1 != 0 {
                        bits |= PRIO1;
                    }
                    out.cells[p * n + r] |= bits;
                }
            }
        }
        out
    }

    /// Unique inclusion-minimal generator of an upward-closed tile.
    ///
    /// Keeps the endpoint pairs minimal for `(p,q) ⪯ (p',q')` iff `p ⊑ p'`
    /// and `q' ⊑ q`, each with the least priority present.
    pub fn skeleton(&self) -> Skeleton {
        let n = self.size;
        let mut out = Vec::new();
        for p in 0..n {
            for q in 0..n {
                if self.cell(p, q) == 0 {
                    continue;
                }
                let dominated = (0..=p).any(|p2| (q..n).any(|q2| (p2, q2) != (p, q) && self.cell(p2, q2) != 0));
                if !dominated {
                    let c = self.min_priority(State(p), State(q)).unwrap();
                    out.push(Transition::new(p, c, q));
                }
            }
        }
        let sk = Skeleton {
            size: n,
            transitions: out,
        };
        sk.assert_injective();
        sk
    }

    /// `t(X)`: every state reachable from `from` in one step.
    pub fn successors(&self, from: &BTreeSet<State>) -> BTreeSet<State> {
        (0..self.size)
            .map(State)
            .filter(|&q| from.iter().any(|&p| self.connects(p, q)))
            .collect()
    }

    /// The ⊑-greatest successor of `q`, or `None` for ⊥.
    pub fn top_successor(&self, q: State) -> Option<State> {
        (0..self.size).rev().map(State).find(|&r| self.connects(q, r))
    }

    pub fn has_horizontal_buchi(&self, q: State) -> bool {
        self.connects_buchi(q, q)
    }
}

/// Free-function form of [`Tile::upward_closure`].
pub fn upward_closure<I>(size: usize, generators: I) -> Result<Tile>
where
    I: IntoIterator<Item = Transition>,
{
    Tile::upward_closure(size, generators)
}

pub fn unit_tile(u: &StateUniverse) -> Tile {
    Tile::unit(u.len())
}

pub fn product(t1: &Tile, t2: &Tile) -> Result<Tile> {
    t1.product(t2)
}

pub fn skeleton(t: &Tile) -> Skeleton {
    t.skeleton()
}

pub fn successors(t: &Tile, from: &BTreeSet<State>) -> BTreeSet<State> {
    t.successors(from)
}

pub fn top_successor(t: &Tile, q: State) -> Option<State> {
    t.top_successor(q)
}

/// Minimal generator of an upward-closed tile. Distinct members never share
/// a source or a target.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Skeleton {
    size: usize,
    transitions: Vec<Transition>,
}

impl Skeleton {
    /// Wraps an explicit transition list (sorted on construction).
    pub fn from_transitions(size: usize, mut transitions: Vec<Transition>) -> Self {
        transitions.sort();
        transitions.dedup();
        Skeleton { size, transitions }
    }

    fn assert_injective(&self) {
        for (i, a) in self.transitions.iter().enumerate() {
            for b in &self.transitions[i + 1..] {
                assert!(
                    a.src != b.src && a.dst != b.dst,
                    "skeleton members {a} and {b} share an endpoint"
                );
            }
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn closure(&self) -> Tile {
        Tile::upward_closure(self.size, self.transitions.iter().copied()).expect("skeleton transitions are in range")
    }
}
