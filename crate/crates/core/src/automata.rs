//! Ordered Büchi and parity automata, plus exact membership for
//! ultimately-periodic words.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::visit::Dfs;

use crate::error::{Error, Result};
use crate::tile::{State, StateUniverse, Tile};

/// Reserved name of the empty letter in files and words.
pub const EPS: &str = "eps";

/// An ultimately-periodic word `prefix · period^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UpWord {
    pub prefix: Vec<String>,
    pub period: Vec<String>,
}

impl UpWord {
    pub fn new<P, V, S>(prefix: P, period: V) -> Result<Self>
    where
        P: IntoIterator<Item = S>,
        V: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let prefix: Vec<String> = prefix.into_iter().map(Into::into).collect();
        let period: Vec<String> = period.into_iter().map(Into::into).collect();
        if period.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        Ok(UpWord { prefix, period })
    }

    /// Parses whitespace-separated letters.
    pub fn parse(prefix: &str, period: &str) -> Result<Self> {
        Self::new(prefix.split_whitespace(), period.split_whitespace())
    }

    /// Same ω-word with a primitive period and the shortest prefix.
    pub fn canonical(&self) -> UpWord {
        let m = self.period.len();
        let root = (1..=m)
            .find(|&k| m.is_multiple_of(k) && (k..m).all(|i| self.period[i] == self.period[i - k]))
            .unwrap_or(m);
        let mut period: Vec<String> = self.period[..root].to_vec();
        let mut prefix = self.prefix.clone();
        while let Some(last) = prefix.last() {
            if *last != period[period.len() - 1] {
                break;
            }
            prefix.pop();
            period.rotate_right(1);
        }
        UpWord { prefix, period }
    }

    pub fn letters(&self) -> impl Iterator<Item = &String> {
        self.prefix.iter().chain(&self.period)
    }

    pub fn map_letters<F>(&self, mut f: F) -> Result<UpWord>
    where
        F: FnMut(&str) -> Result<String>,
    {
        Ok(UpWord {
            prefix: self.prefix.iter().map(|l| f(l)).collect::<Result<_>>()?,
            period: self.period.iter().map(|l| f(l)).collect::<Result<_>>()?,
        })
    }
}

impl fmt::Display for UpWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.prefix.is_empty() {
            write!(f, "ε")?;
        } else {
            write!(f, "{}", self.prefix.join(" "))?;
        }
        write!(f, " ({})^ω", self.period.join(" "))
    }
}

/// Renaming from external letters to the automaton's own letters.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Morphism {
    pub map: BTreeMap<String, String>,
}

impl Morphism {
    pub fn identity<'a, I: IntoIterator<Item = &'a String>>(letters: I) -> Self {
        Morphism {
            map: letters.into_iter().map(|l| (l.clone(), l.clone())).collect(),
        }
    }

    pub fn domain(&self) -> Vec<String> {
        self.map.keys().cloned().collect()
    }

    pub fn get(&self, letter: &str) -> Option<&str> {
        self.map.get(letter).map(String::as_str)
    }
}

/// Structural and semantic findings about an automaton.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn into_result(self) -> Result<Vec<String>> {
        if self.errors.is_empty() {
            Ok(self.warnings)
        } else {
            Err(Error::Validation(self.errors))
        }
    }
}

/// Ordered Büchi automaton: a totally ordered state set, a downward-closed
/// initial set and named upward-closed tiles as letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedBuchiAutomaton {
    pub universe: StateUniverse,
    pub initial: BTreeSet<State>,
    pub letters: BTreeMap<String, Tile>,
    pub morphism: Option<Morphism>,
}

impl OrderedBuchiAutomaton {
    /// Checks shapes only; see [`OrderedBuchiAutomaton::validate`] for the
    /// closure conditions.
    pub fn new(universe: StateUniverse, initial: BTreeSet<State>, letters: BTreeMap<String, Tile>) -> Result<Self> {
        let n = universe.len();
        if let Some(q) = initial.iter().find(|q| q.0 >= n) {
            return Err(Error::StateOutOfRange { state: q.0, size: n });
        }
        for (name, t) in &letters {
            if name == EPS {
                return Err(Error::ReservedLetter);
            }
            if t.size() != n {
                return Err(Error::SizeMismatch {
                    left: n,
                    right: t.size(),
                });
            }
        }
        Ok(OrderedBuchiAutomaton {
            universe,
            initial,
            letters,
            morphism: None,
        })
    }

    pub fn with_morphism(mut self, morphism: Morphism) -> Result<Self> {
        for target in morphism.map.values() {
            if !self.letters.contains_key(target) {
                return Err(Error::UnknownLetter(target.clone()));
            }
        }
        self.morphism = Some(morphism);
        Ok(self)
    }

    pub fn size(&self) -> usize {
        self.universe.len()
    }

    pub fn tile(&self, letter: &str) -> Result<&Tile> {
        self.letters
            .get(letter)
            .ok_or_else(|| Error::UnknownLetter(letter.to_string()))
    }

    pub fn tiles(&self) -> impl Iterator<Item = &Tile> {
        self.letters.values()
    }

    /// Letters a user types: the morphism's domain if present, else the
    /// tile names.
    pub fn external_alphabet(&self) -> Vec<String> {
        match &self.morphism {
            Some(m) => m.domain(),
            None => self.letters.keys().cloned().collect(),
        }
    }

    fn resolve<'a>(&'a self, letter: &'a str) -> Result<&'a Tile> {
        let name = self.morphism.as_ref().and_then(|m| m.get(letter)).unwrap_or(letter);
        self.tile(name)
    }

    pub fn max_initial(&self) -> Option<State> {
        self.initial.iter().next_back().copied()
    }

    /// Reports every violated invariant, with witnesses.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if let Some(top) = self.max_initial() {
            for q in (0..top.0).map(State) {
                if !self.initial.contains(&q) {
                    report.errors.push(format!(
                        "initial set is not downward-closed: {} is below initial state {} but not initial",
                        self.universe.name(q),
                        self.universe.name(top)
                    ));
                    break;
                }
            }
        }
        for (name, t) in &self.letters {
            if let Some((present, missing)) = t.closure_witness() {
                report.errors.push(format!(
                    "tile `{name}` is not upward-closed: contains {} but not {}",
                    self.show(present),
                    self.show(missing)
                ));
            }
        }
        let reach = self.reachable_states();
        let unreachable: Vec<&str> = self
            .universe
            .states()
            .filter(|q| !reach.contains(q))
            .map(|q| self.universe.name(q))
            .collect();
        if !unreachable.is_empty() {
            report
                .warnings
                .push(format!("unreachable states: {}", unreachable.join(", ")));
        }
        report
    }

    fn show(&self, d: crate::tile::Transition) -> String {
        format!(
            "({},{},{})",
            self.universe.name(d.src),
            d.priority,
            self.universe.name(d.dst)
        )
    }

    pub fn reachable_states(&self) -> BTreeSet<State> {
        let mut seen = self.initial.clone();
        let mut frontier = self.initial.clone();
        while !frontier.is_empty() {
            let mut next = BTreeSet::new();
            for t in self.tiles() {
                for q in t.successors(&frontier) {
                    if seen.insert(q) {
                        next.insert(q);
                    }
                }
            }
            frontier = next;
        }
        seen
    }

    /// Same automaton re-rooted at another downward-closed initial set.
    pub fn with_initial(&self, initial: BTreeSet<State>) -> Self {
        OrderedBuchiAutomaton {
            initial,
            ..self.clone()
        }
    }
}

/// Exact membership of `w` in the language of an ordered Büchi automaton.
///
/// Builds the graph of (state, position in the period) and looks for a
/// reachable strongly connected component containing a Büchi edge.
pub fn oba_member_up(a: &OrderedBuchiAutomaton, w: &UpWord) -> Result<bool> {
    let prefix: Vec<&Tile> = w.prefix.iter().map(|l| a.resolve(l)).collect::<Result<_>>()?;
    let period: Vec<&Tile> = w.period.iter().map(|l| a.resolve(l)).collect::<Result<_>>()?;
    let mut start = a.initial.clone();
    for t in prefix {
        start = t.successors(&start);
    }
    Ok(period_accepts(a.size(), &start, &period))
}

pub(crate) fn period_accepts(n: usize, start: &BTreeSet<State>, period: &[&Tile]) -> bool {
    if start.is_empty() {
        return false;
    }
    let m = period.len();
    let mut g: DiGraph<(), bool> = DiGraph::with_capacity(n * m, 0);
    let nodes: Vec<NodeIndex> = (0..n * m).map(|_| g.add_node(())).collect();
    let node = |q: usize, pos: usize| nodes[pos * n + q];
    for (pos, t) in period.iter().enumerate() {
        let next = (pos + 1) % m;
        for p in 0..n {
            for q in 0..n {
                if let Some(c) = t.min_priority(State(p), State(q)) {
                    g.add_edge(node(p, pos), node(q, next), c == 0);
                }
            }
        }
    }
    let mut reachable = vec![false; n * m];
    for q in start {
        let mut dfs = Dfs::new(&g, node(q.0, 0));
        while let Some(v) = dfs.next(&g) {
            reachable[v.index()] = true;
        }
    }
    let mut component = vec![usize::MAX; n * m];
    for (i, scc) in tarjan_scc(&g).into_iter().enumerate() {
        for v in scc {
            component[v.index()] = i;
        }
    }
    g.raw_edges().iter().any(|e| {
        e.weight && reachable[e.source().index()] && component[e.source().index()] == component[e.target().index()]
    })
}

/// The downward-closed set headed by the ⊑-highest state reachable after `u`.
pub fn residual_initial_set(a: &OrderedBuchiAutomaton, u: &[String]) -> Result<BTreeSet<State>> {
    let mut top = a.max_initial();
    for l in u {
        let t = a.resolve(l)?;
        top = top.and_then(|q| t.top_successor(q));
    }
    Ok(match top {
        Some(q) => (0..=q.0).map(State).collect(),
        None => BTreeSet::new(),
    })
}

/// Whether `t^ω` is accepted: some initial state has a Büchi loop in `t`.
pub fn omega_power_accepts(a: &OrderedBuchiAutomaton, t: &Tile) -> bool {
    a.initial.iter().any(|&q| t.has_horizontal_buchi(q))
}

/// A letter of a parity automaton.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Eps,
    Letter(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParityTransition {
    pub src: usize,
    pub symbol: Symbol,
    pub priority: i32,
    pub dst: usize,
}

/// Nondeterministic min-parity automaton, possibly with ε-transitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityAutomaton {
    pub states: Vec<String>,
    pub initial: BTreeSet<usize>,
    pub index: (i32, i32),
    pub alphabet: Vec<String>,
    pub transitions: BTreeSet<ParityTransition>,
    pub deterministic: bool,
    pub morphism: Option<Morphism>,
}

impl ParityAutomaton {
    pub fn new(
        states: Vec<String>,
        initial: BTreeSet<usize>,
        index: (i32, i32),
        alphabet: Vec<String>,
        transitions: BTreeSet<ParityTransition>,
        deterministic: bool,
    ) -> Result<Self> {
        let n = states.len();
        let mut seen = BTreeSet::new();
        for s in &states {
            if !seen.insert(s) {
                return Err(Error::DuplicateName(s.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for l in &alphabet {
            if l == EPS {
                return Err(Error::ReservedLetter);
            }
            if !seen.insert(l) {
                return Err(Error::DuplicateName(l.clone()));
            }
        }
        if index.0 > index.1 {
            return Err(Error::Usage(format!("empty priority index [{}, {}]", index.0, index.1)));
        }
        if let Some(q) = initial.iter().find(|&&q| q >= n) {
            return Err(Error::StateOutOfRange { state: *q, size: n });
        }
        for t in &transitions {
            for s in [t.src, t.dst] {
                if s >= n {
                    return Err(Error::StateOutOfRange { state: s, size: n });
                }
            }
            if let Symbol::Letter(x) = t.symbol {
                if x >= alphabet.len() {
                    return Err(Error::UnknownLetter(format!("#{x}")));
                }
            }
            if t.priority < index.0 || t.priority > index.1 {
                return Err(Error::InvalidPriority {
                    priority: t.priority,
                    expected: format!("within [{}, {}]", index.0, index.1),
                });
            }
        }
        let a = ParityAutomaton {
            states,
            initial,
            index,
            alphabet,
            transitions,
            deterministic,
            morphism: None,
        };
        if deterministic {
            a.check_deterministic()?;
        }
        Ok(a)
    }

    fn check_deterministic(&self) -> Result<()> {
        if self.initial.len() != 1 {
            return Err(Error::NotDeterministic(format!(
                "has {} initial states",
                self.initial.len()
            )));
        }
        let mut seen = HashSet::new();
        for t in &self.transitions {
            if let Symbol::Letter(x) = t.symbol {
                if !seen.insert((t.src, x)) {
                    return Err(Error::NotDeterministic(format!(
                        "state `{}` has two `{}` transitions",
                        self.states[t.src], self.alphabet[x]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn with_morphism(mut self, morphism: Morphism) -> Result<Self> {
        for target in morphism.map.values() {
            if !self.alphabet.contains(target) {
                return Err(Error::UnknownLetter(target.clone()));
            }
        }
        self.morphism = Some(morphism);
        Ok(self)
    }

    pub fn size(&self) -> usize {
        self.states.len()
    }

    pub fn letter_index(&self, letter: &str) -> Result<usize> {
        self.alphabet
            .iter()
            .position(|l| l == letter)
            .ok_or_else(|| Error::UnknownLetter(letter.to_string()))
    }

    pub fn external_alphabet(&self) -> Vec<String> {
        match &self.morphism {
            Some(m) => m.domain(),
            None => self.alphabet.clone(),
        }
    }

    fn resolve(&self, letter: &str) -> Result<Symbol> {
        if letter == EPS {
            return Ok(Symbol::Eps);
        }
        let name = self.morphism.as_ref().and_then(|m| m.get(letter)).unwrap_or(letter);
        self.letter_index(name).map(Symbol::Letter)
    }

    pub fn has_eps(&self) -> bool {
        self.transitions.iter().any(|t| t.symbol == Symbol::Eps)
    }

    /// The ε-edges of priority `c` as an adjacency matrix.
    pub fn eps_relation(&self, c: i32) -> Vec<Vec<bool>> {
        let n = self.size();
        let mut r = vec![vec![false; n]; n];
        for t in &self.transitions {
            if t.symbol == Symbol::Eps && t.priority == c {
                r[t.src][t.dst] = true;
            }
        }
        r
    }

    /// The unique successor of a deterministic automaton.
    pub fn step(&self, q: usize, letter: usize) -> Option<(i32, usize)> {
        self.transitions
            .iter()
            .find(|t| t.src == q && t.symbol == Symbol::Letter(letter))
            .map(|t| (t.priority, t.dst))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.deterministic {
            if let Err(e) = self.check_deterministic() {
                report.errors.push(e.to_string());
            }
        }
        let mut seen = self.initial.clone();
        let mut stack: Vec<usize> = seen.iter().copied().collect();
        while let Some(q) = stack.pop() {
            for t in self.transitions.iter().filter(|t| t.src == q) {
                if seen.insert(t.dst) {
                    stack.push(t.dst);
                }
            }
        }
        let unreachable: Vec<&str> = (0..self.size())
            .filter(|q| !seen.contains(q))
            .map(|q| self.states[q].as_str())
            .collect();
        if !unreachable.is_empty() {
            report
                .warnings
                .push(format!("unreachable states: {}", unreachable.join(", ")));
        }
        report
    }
}

const TOP: u64 = 1 << 63;

/// Sets of priorities as bitmasks: bit `c - lo` for priority `c` and bit 63
/// for the neutral value of the empty path.
#[derive(Clone, Copy)]
struct Values {
    lo: i32,
}

impl Values {
    fn new(index: (i32, i32)) -> Result<Self> {
        if index.1 - index.0 >= 63 {
            return Err(Error::Usage(format!(
                "priority index [{}, {}] is too wide for membership checking",
                index.0, index.1
            )));
        }
        Ok(Values { lo: index.0 })
    }

    fn bit(&self, c: i32) -> u64 {
        1 << (c - self.lo)
    }

    fn has_even(&self, set: u64) -> bool {
        (0..63).any(|i| set & (1 << i) != 0 && (i + self.lo).rem_euclid(2) == 0)
    }
}

fn upto(set: u64) -> u64 {
    let top = 63 - set.leading_zeros();
    if top == 63 {
        u64::MAX
    } else {
        (1u64 << (top + 1)) - 1
    }
}

/// `{min(a, b) | a ∈ x, b ∈ y}`.
fn min_set(x: u64, y: u64) -> u64 {
    if x == 0 || y == 0 {
        return 0;
    }
    (x & upto(y)) | (y & upto(x))
}

type Matrix = Vec<Vec<u64>>;

fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { TOP } else { 0 }).collect())
        .collect()
}

fn compose(x: &Matrix, y: &Matrix) -> Matrix {
    let n = x.len();
    let mut out = vec![vec![0; n]; n];
    for p in 0..n {
        for q in 0..n {
            if x[p][q] == 0 {
                continue;
            }
            for r in 0..n {
                out[p][r] |= min_set(x[p][q], y[q][r]);
            }
        }
    }
    out
}

fn union(x: &Matrix, y: &Matrix) -> Matrix {
    x.iter()
        .zip(y)
        .map(|(a, b)| a.iter().zip(b).map(|(p, q)| p | q).collect())
        .collect()
}

struct Evaluator<'a> {
    a: &'a ParityAutomaton,
    values: Values,
    closure: Matrix,
}

impl<'a> Evaluator<'a> {
    fn new(a: &'a ParityAutomaton, close_eps: bool) -> Result<Self> {
        let values = Values::new(a.index)?;
        let n = a.size();
        let mut e = identity(n);
        if close_eps {
            for t in &a.transitions {
                if t.symbol == Symbol::Eps {
                    e[t.src][t.dst] |= values.bit(t.priority);
                }
            }
            loop {
                let next = union(&e, &compose(&e, &e));
                if next == e {
                    break;
                }
                e = next;
            }
        }
        Ok(Evaluator { a, values, closure: e })
    }

    fn raw(&self, symbol: Symbol) -> Matrix {
        let n = self.a.size();
        let mut m = vec![vec![0; n]; n];
        for t in self.a.transitions.iter().filter(|t| t.symbol == symbol) {
            m[t.src][t.dst] |= self.values.bit(t.priority);
        }
        m
    }

    fn word(&self, letters: &[Symbol], close: bool) -> Matrix {
        let mut acc = identity(self.a.size());
        for &s in letters {
            let step = if close {
                compose(&compose(&self.closure, &self.raw(s)), &self.closure)
            } else {
                self.raw(s)
            };
            acc = compose(&acc, &step);
        }
        acc
    }

    fn accepts(&self, prefix: &[Symbol], period: &[Symbol], close: bool) -> bool {
        let n = self.a.size();
        let u = self.word(prefix, close);
        let v = self.word(period, close);
        let mut current: BTreeSet<usize> = (0..n)
            .filter(|&q| self.a.initial.iter().any(|&i| u[i][q] != 0))
            .collect();
        let mut seen = HashSet::new();
        let mut reach = BTreeSet::new();
        while seen.insert(current.clone()) {
            reach.extend(current.iter().copied());
            current = (0..n).filter(|&q| current.iter().any(|&p| v[p][q] != 0)).collect();
        }
        if reach.is_empty() {
            return false;
        }
        let mut power = v.clone();
        let mut powers = HashSet::new();
        while powers.insert(power.clone()) {
            if reach.iter().any(|&q| self.values.has_even(power[q][q])) {
                return true;
            }
            power = compose(&power, &v);
        }
        false
    }
}

fn symbols(a: &ParityAutomaton, w: &UpWord) -> Result<(Vec<Symbol>, Vec<Symbol>)> {
    let prefix = w.prefix.iter().map(|l| a.resolve(l)).collect::<Result<_>>()?;
    let period = w.period.iter().map(|l| a.resolve(l)).collect::<Result<_>>()?;
    Ok((prefix, period))
}

/// Exact membership for a parity automaton with ε-transitions, reading
/// each letter as `ε* x ε*`.
pub fn npa_member_up(a: &ParityAutomaton, w: &UpWord) -> Result<bool> {
    if w.letters().any(|l| l == EPS) {
        return Err(Error::EpsInWord);
    }
    let (prefix, period) = symbols(a, w)?;
    Ok(Evaluator::new(a, true)?.accepts(&prefix, &period, true))
}

/// Membership where the word itself schedules the ε-steps: each `eps` in
/// `w` is exactly one ε-transition and letters take no implicit ε-moves.
pub fn npa_member_up_literal(a: &ParityAutomaton, w: &UpWord) -> Result<bool> {
    let (prefix, period) = symbols(a, w)?;
    Ok(Evaluator::new(a, false)?.accepts(&prefix, &period, false))
}

/// Follows the single run of a deterministic ε-free automaton.
pub fn dpa_member_up(a: &ParityAutomaton, w: &UpWord) -> Result<bool> {
    if !a.deterministic {
        return Err(Error::NotDeterministic("is not flagged deterministic".into()));
    }
    let (prefix, period) = symbols(a, w)?;
    let letter = |s: Symbol| match s {
        Symbol::Letter(x) => Ok(x),
        Symbol::Eps => Err(Error::EpsInWord),
    };
    let mut q = *a
        .initial
        .iter()
        .next()
        .expect("deterministic automata have an initial state");
    for &s in &prefix {
        match a.step(q, letter(s)?) {
            Some((_, next)) => q = next,
            None => return Ok(false),
        }
    }
    let mut first_seen = BTreeMap::new();
    let mut mins = Vec::new();
    loop {
        if let Some(&k) = first_seen.get(&q) {
            let cycle_min: Option<i32> = mins[k..].iter().copied().min();
            return Ok(cycle_min.is_some_and(|c: i32| c.rem_euclid(2) == 0));
        }
        first_seen.insert(q, mins.len());
        let mut low = i32::MAX;
        for &s in &period {
            match a.step(q, letter(s)?) {
                Some((c, next)) => {
                    low = low.min(c);
                    q = next;
                }
                None => return Ok(false),
            }
        }
        mins.push(low);
    }
}

/// A language decidable on ultimately-periodic words.
pub trait UpLanguage {
    fn alphabet(&self) -> Vec<String>;
    fn accepts(&self, w: &UpWord) -> Result<bool>;
}

impl UpLanguage for OrderedBuchiAutomaton {
    fn alphabet(&self) -> Vec<String> {
        self.external_alphabet()
    }

    fn accepts(&self, w: &UpWord) -> Result<bool> {
        oba_member_up(self, w)
    }
}

impl UpLanguage for ParityAutomaton {
    fn alphabet(&self) -> Vec<String> {
        self.external_alphabet()
    }

    fn accepts(&self, w: &UpWord) -> Result<bool> {
        npa_member_up(self, w)
    }
}
