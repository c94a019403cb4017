//! Record-based determinization of ordered Büchi automata.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use crate::automata::{OrderedBuchiAutomaton, ParityAutomaton, ParityTransition, Symbol};
use crate::error::{Error, Result};
use crate::tile::{State, StateUniverse, Tile};

/// An injective tuple of states whose image is downward-closed and whose
/// head is its maximum. Index 0 holds the oldest run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Record(pub Vec<State>);

impl Record {
    pub fn empty() -> Self {
        Record(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn head(&self) -> Option<State> {
        self.0.first().copied()
    }

    pub fn image(&self) -> BTreeSet<State> {
        self.0.iter().copied().collect()
    }

    /// Entry `i`, with `None` standing for ⊥ past the end.
    pub fn entry(&self, i: usize) -> Option<State> {
        self.0.get(i).copied()
    }

    /// Checks the record invariants over a universe of `n` states.
    pub fn check(&self, n: usize) -> Result<()> {
        let k = self.0.len();
        if k > n {
            return Err(Error::Usage(format!("record {self} is longer than the universe")));
        }
        let image = self.image();
        if image.len() != k {
            return Err(Error::Usage(format!("record {self} repeats a state")));
        }
        if image.iter().enumerate().any(|(i, q)| q.0 != i) {
            return Err(Error::Usage(format!(
                "record {self} has an image that is not downward-closed"
            )));
        }
        if k > 0 && self.0[0].0 != k - 1 {
            return Err(Error::Usage(format!("record {self} does not start with its maximum")));
        }
        Ok(())
    }

    /// `self ≤lex^i other`: lexicographic comparison of the first `i + 1`
    /// entries, ⊥ below every state.
    pub fn lex_leq(&self, other: &Record, i: usize) -> bool {
        for j in 0..=i {
            let (a, b) = (self.entry(j), other.entry(j));
            if a != b {
                return a < b;
            }
        }
        true
    }

    pub fn display<'a>(&'a self, universe: &'a StateUniverse) -> impl fmt::Display + 'a {
        RecordNames(self, universe)
    }
}

impl fmt::Display for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|q| q.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

struct RecordNames<'a>(&'a Record, &'a StateUniverse);

impl fmt::Display for RecordNames<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.0 .0.iter().map(|&q| self.1.name(q)).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Output of one transition of the determinized automaton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetStep {
    pub priority: i32,
    pub next: Record,
}

/// The initial states in ⊑-descending order.
pub fn initial_record(a: &OrderedBuchiAutomaton) -> Record {
    Record(a.initial.iter().rev().copied().collect())
}

/// One transition of the determinized automaton.
///
/// Indices whose state has no successor are dropped before leaders are
/// chosen and count as forgotten.
pub fn delta(s: &Record, t: &Tile) -> DetStep {
    let best: Vec<Option<State>> = s.0.iter().map(|&q| t.top_successor(q)).collect();
    let mut leaders: BTreeMap<State, usize> = BTreeMap::new();
    for (i, b) in best.iter().enumerate() {
        if let Some(b) = b {
            leaders.entry(*b).or_insert(i);
        }
    }
    let mut preserved: Vec<usize> = leaders.values().copied().collect();
    preserved.sort_unstable();

    let reached = t.successors(&s.image());
    let kept: BTreeSet<State> = leaders.keys().copied().collect();
    let mut next: Vec<State> = preserved.iter().map(|&i| best[i].unwrap()).collect();
    next.extend(reached.iter().rev().filter(|q| !kept.contains(q)));
    let next = Record(next);

    let default = reached.len();
    let green = (0..s.len().min(next.len()))
        .find(|&i| t.connects_buchi(s.0[i], next.0[i]))
        .unwrap_or(default);
    let red = (0..s.len())
        .find(|i| preserved.binary_search(i).is_err())
        .unwrap_or(default);
    let priority = (2 * green as i32).min(2 * red as i32 - 1);
    DetStep { priority, next }
}

/// A determinized automaton together with the record behind each state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Determinization {
    pub automaton: ParityAutomaton,
    pub universe: StateUniverse,
    pub records: Vec<Record>,
}

impl Determinization {
    /// Re-attaches records to a deterministic automaton, checking they fit.
    pub fn from_parts(automaton: ParityAutomaton, universe: StateUniverse, records: Vec<Record>) -> Result<Self> {
        if records.len() != automaton.size() {
            return Err(Error::Usage(format!(
                "{} records for {} states",
                records.len(),
                automaton.size()
            )));
        }
        let mut seen = HashSet::new();
        for r in &records {
            r.check(universe.len())?;
            if !seen.insert(r) {
                return Err(Error::Usage(format!("record {r} appears twice")));
            }
        }
        Ok(Determinization {
            automaton,
            universe,
            records,
        })
    }

    pub fn state_count(&self) -> usize {
        self.records.len()
    }
}

fn record_name(universe: &StateUniverse, r: &Record) -> String {
    r.display(universe).to_string()
}

/// Breadth-first construction of the reachable records, letters in sorted
/// order.
pub fn determinize(a: &OrderedBuchiAutomaton) -> Determinization {
    let n = a.size() as i32;
    let letters: Vec<(&String, &Tile)> = a.letters.iter().collect();
    let start = initial_record(a);
    let mut ids: HashMap<Record, usize> = HashMap::from([(start.clone(), 0)]);
    let mut records = vec![start];
    let mut queue = VecDeque::from([0usize]);
    let mut transitions = BTreeSet::new();
    while let Some(id) = queue.pop_front() {
        for (x, (_, t)) in letters.iter().enumerate() {
            let step = delta(&records[id], t);
            let dst = *ids.entry(step.next.clone()).or_insert_with(|| {
                records.push(step.next.clone());
                queue.push_back(records.len() - 1);
                records.len() - 1
            });
            transitions.insert(ParityTransition {
                src: id,
                symbol: Symbol::Letter(x),
                priority: step.priority,
                dst,
            });
        }
    }
    let names = records.iter().map(|r| record_name(&a.universe, r)).collect();
    let mut automaton = ParityAutomaton::new(
        names,
        [0].into(),
        (-1, 2 * n - 1),
        letters.iter().map(|(l, _)| l.to_string()).collect(),
        transitions,
        true,
    )
    .expect("determinization yields a well-formed deterministic automaton");
    automaton.morphism = a.morphism.clone();
    Determinization {
        automaton,
        universe: a.universe.clone(),
        records,
    }
}

/// The lexicographic ε-transitions that make a determinization ε-complete.
pub fn eps_transitions(d: &Determinization) -> BTreeSet<ParityTransition> {
    let n = d.universe.len();
    let mut out = BTreeSet::new();
    for (x, s) in d.records.iter().enumerate() {
        for (y, s2) in d.records.iter().enumerate() {
            for i in 0..n {
                let c = 2 * i as i32;
                if !s.lex_leq(s2, i) {
                    out.insert(ParityTransition {
                        src: x,
                        symbol: Symbol::Eps,
                        priority: c,
                        dst: y,
                    });
                } else {
                    out.insert(ParityTransition {
                        src: y,
                        symbol: Symbol::Eps,
                        priority: c + 1,
                        dst: x,
                    });
                }
            }
        }
    }
    out
}

/// The determinized automaton with its ε-completion added.
pub fn eps_complete_det(d: &Determinization) -> ParityAutomaton {
    let mut a = d.automaton.clone();
    a.transitions.extend(eps_transitions(d));
    a.deterministic = false;
    a
}

/// Result of exploring the tile monoid generated by the alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residuals {
    /// Top successors of `max(I)` over all words, the empty one included.
    pub states: BTreeSet<State>,
    /// Whether some nonempty word leaves `max(I)` without any successor.
    pub loses_top: bool,
}

/// Explores every product of alphabet tiles and collects the highest state
/// reachable from `max(I)` under each.
pub fn explore_residuals(a: &OrderedBuchiAutomaton) -> Residuals {
    let Some(top) = a.max_initial() else {
        return Residuals {
            states: BTreeSet::new(),
            loses_top: false,
        };
    };
    let tiles: Vec<&Tile> = a.letters.values().collect::<BTreeSet<_>>().into_iter().collect();
    let unit = Tile::unit(a.size());
    let mut seen: HashSet<Tile> = HashSet::from([unit.clone()]);
    let mut queue = VecDeque::from([unit]);
    let mut states = BTreeSet::new();
    let mut loses_top = false;
    while let Some(m) = queue.pop_front() {
        match m.top_successor(top) {
            Some(q) => {
                states.insert(q);
            }
            None => loses_top = true,
        }
        for t in &tiles {
            let next = m.compose(t);
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    Residuals { states, loses_top }
}

/// `R_A`, the heads of reachable residuals.
pub fn reachable_residuals(a: &OrderedBuchiAutomaton) -> BTreeSet<State> {
    explore_residuals(a).states
}

/// Every record with the given head: `h!` permutations of `{0..h}`.
pub fn records_with_head(h: State) -> Vec<Record> {
    let rest: Vec<State> = (0..h.0).rev().map(State).collect();
    let mut out = Vec::new();
    permute(&rest, &mut vec![h], &mut vec![false; rest.len()], &mut out);
    out
}

fn permute(items: &[State], acc: &mut Vec<State>, used: &mut [bool], out: &mut Vec<Record>) {
    if acc.len() == items.len() + 1 {
        out.push(Record(acc.clone()));
        return;
    }
    for i in 0..items.len() {
        if !used[i] {
            used[i] = true;
            acc.push(items[i]);
            permute(items, acc, used, out);
            acc.pop();
            used[i] = false;
        }
    }
}

/// `S_R`: records headed in `R_A`, plus the empty record when some word
/// leaves the top initial state without successor.
pub fn candidate_records(a: &OrderedBuchiAutomaton) -> BTreeSet<Record> {
    let r = explore_residuals(a);
    let mut out: BTreeSet<Record> = r.states.iter().flat_map(|&h| records_with_head(h)).collect();
    if r.loses_top {
        out.insert(Record::empty());
    }
    out
}

/// Every record over `n` states, the empty one included.
pub fn all_records(n: usize) -> Vec<Record> {
    let mut out = vec![Record::empty()];
    for h in 0..n {
        out.extend(records_with_head(State(h)));
    }
    out
}

fn factorial_sum(from: u64, to: u64) -> Option<u64> {
    let mut sum = 0u64;
    let mut f = 1u64;
    for i in 1..=to {
        f = f.checked_mul(i)?;
        if i >= from {
            sum = sum.checked_add(f)?;
        }
    }
    if from == 0 {
        sum = sum.checked_add(1)?;
    }
    Some(sum)
}

/// Number of records over `n` states: `2 + Σ_{i=1}^{n-1} i!`.
pub fn record_count_bound(n: usize) -> Result<u64> {
    if n == 0 {
        return Err(Error::Usage("the record bound needs at least one state".into()));
    }
    factorial_sum(1, n as u64 - 1)
        .and_then(|s| s.checked_add(2))
        .ok_or_else(|| Error::Usage(format!("record bound for {n} states overflows")))
}

/// `Σ_{i=1}^{n-1} i!`, the commonly quoted bound. It leaves out the empty
/// record and the record `(0)`.
pub fn stated_record_bound(n: usize) -> Option<u64> {
    if n == 0 {
        return None;
    }
    factorial_sum(1, n as u64 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tile::Transition;

    fn inf_a() -> OrderedBuchiAutomaton {
        let u = StateUniverse::numbered(2).unwrap();
        let a = Tile::upward_closure(2, [Transition::new(1, 0, 1)]).unwrap();
        let letters = [("a".to_string(), a), ("b".to_string(), Tile::unit(2))].into();
        OrderedBuchiAutomaton::new(u, [State(0), State(1)].into(), letters).unwrap()
    }

    fn rec(v: &[usize]) -> Record {
        Record(v.iter().map(|&i| State(i)).collect())
    }

    #[test]
    fn initial_records() {
        let a = inf_a();
        assert_eq!(initial_record(&a), rec(&[1, 0]));
        assert_eq!(initial_record(&a.with_initial([State(0)].into())), rec(&[0]));
        assert_eq!(initial_record(&a.with_initial(BTreeSet::new())), Record::empty());
    }

    #[test]
    fn inf_a_steps() {
        let a = inf_a();
        assert_eq!(
            delta(&rec(&[1, 0]), &a.letters["a"]),
            DetStep {
                priority: 0,
                next: rec(&[1, 0])
            }
        );
        assert_eq!(
            delta(&rec(&[1, 0]), &Tile::unit(2)),
            DetStep {
                priority: 3,
                next: rec(&[1, 0])
            }
        );
    }

    #[test]
    fn six_state_example() {
        let t = Tile::upward_closure(
            6,
            [
                Transition::new(0, 1, 1),
                Transition::new(3, 1, 3),
                Transition::new(4, 1, 4),
            ],
        )
        .unwrap();
        let expected_best = [1, 1, 1, 3, 4, 4];
        for (q, b) in expected_best.iter().enumerate() {
            assert_eq!(t.top_successor(State(q)), Some(State(*b)));
        }
        let step = delta(&rec(&[5, 3, 4, 0, 2, 1]), &t);
        assert_eq!(step.next, rec(&[4, 3, 1, 2, 0]));
        assert_eq!(step.priority, 0);
    }

    #[test]
    fn empty_record_is_a_rejecting_sink() {
        let step = delta(&Record::empty(), &Tile::unit(3));
        assert_eq!(
            step,
            DetStep {
                priority: -1,
                next: Record::empty()
            }
        );
        let dead = Tile::empty(2);
        assert_eq!(delta(&rec(&[1, 0]), &dead).priority, -1);
    }

    #[test]
    fn inf_a_determinization() {
        let d = determinize(&inf_a());
        assert_eq!(d.state_count(), 1);
        assert_eq!(d.records, vec![rec(&[1, 0])]);
        assert_eq!(d.automaton.step(0, 0), Some((0, 0)));
        assert_eq!(d.automaton.step(0, 1), Some((3, 0)));
        assert_eq!(d.automaton.index, (-1, 3));
    }

    #[test]
    fn empty_alphabet_gives_single_record() {
        let a = OrderedBuchiAutomaton::new(StateUniverse::numbered(2).unwrap(), [State(0)].into(), BTreeMap::new())
            .unwrap();
        let d = determinize(&a);
        assert_eq!(d.state_count(), 1);
        assert!(d.automaton.transitions.is_empty());
    }

    #[test]
    fn single_record_gets_odd_self_loops_only() {
        let d = determinize(&inf_a());
        let eps = eps_transitions(&d);
        let expected: BTreeSet<ParityTransition> = [1, 3]
            .into_iter()
            .map(|c| ParityTransition {
                src: 0,
                symbol: Symbol::Eps,
                priority: c,
                dst: 0,
            })
            .collect();
        assert_eq!(eps, expected);
    }

    #[test]
    fn two_records_compare_at_head() {
        let (big, small) = (rec(&[1, 0]), rec(&[0]));
        assert!(!big.lex_leq(&small, 0));
        assert!(small.lex_leq(&big, 0));
        assert!(small.lex_leq(&small, 1));
        assert!(rec(&[1]).lex_leq(&rec(&[1, 0]), 1));
        assert!(!rec(&[1, 0]).lex_leq(&rec(&[1]), 1));
    }

    #[test]
    fn record_bound_matches_enumeration() {
        assert_eq!(record_count_bound(1).unwrap(), 2);
        assert_eq!(record_count_bound(2).unwrap(), 3);
        assert!(record_count_bound(0).is_err());
        for n in 1..=5 {
            let all = all_records(n);
            for r in &all {
                r.check(n).unwrap();
            }
            assert_eq!(all.len() as u64, record_count_bound(n).unwrap());
        }
        assert_eq!(stated_record_bound(3), Some(3));
    }

    #[test]
    fn record_checks() {
        assert!(rec(&[1, 0]).check(2).is_ok());
        assert!(rec(&[0, 1]).check(2).is_err());
        assert!(rec(&[1]).check(2).is_err());
        assert!(rec(&[1, 1]).check(2).is_err());
    }

    #[test]
    fn unit_only_alphabet_has_one_residual() {
        let a = OrderedBuchiAutomaton::new(
            StateUniverse::numbered(3).unwrap(),
            [State(0), State(1)].into(),
            [("e".to_string(), Tile::unit(3))].into(),
        )
        .unwrap();
        assert_eq!(reachable_residuals(&a), [State(1)].into());
        assert_eq!(candidate_records(&a), [rec(&[1, 0])].into());
    }

    #[test]
    fn empty_initial_set_has_no_residuals() {
        let a = inf_a().with_initial(BTreeSet::new());
        assert!(reachable_residuals(&a).is_empty());
        assert!(candidate_records(&a).is_empty());
    }
}
