//! Constructions producing ordered Büchi automata: Rabin conditions,
//! ε-complete parity automata, and the horizontal-complete alphabet.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::automata::{Morphism, OrderedBuchiAutomaton, ParityAutomaton, Symbol, UpWord, EPS};
use crate::error::{Error, Result};
use crate::tile::{State, StateUniverse, Tile, Transition};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RabinPair {
    pub green: BTreeSet<String>,
    pub red: BTreeSet<String>,
}

/// A Rabin condition: some pair sees a green letter infinitely often and
/// red letters only finitely often.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RabinSpec {
    pub alphabet: Vec<String>,
    pub pairs: Vec<RabinPair>,
}

impl RabinSpec {
    pub fn new(alphabet: Vec<String>, pairs: Vec<RabinPair>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for l in &alphabet {
            if l == EPS {
                return Err(Error::ReservedLetter);
            }
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateName(l.clone()));
            }
        }
        if pairs.is_empty() {
            return Err(Error::Validation(vec![
                "a Rabin condition needs at least one pair".into()
            ]));
        }
        for p in &pairs {
            if let Some(l) = p.green.iter().chain(&p.red).find(|l| !seen.contains(l.as_str())) {
                return Err(Error::UnknownLetter(l.clone()));
            }
        }
        Ok(RabinSpec { alphabet, pairs })
    }

    /// Direct evaluation on the letters of the period.
    pub fn accepts(&self, w: &UpWord) -> Result<bool> {
        if let Some(l) = w.letters().find(|l| !self.alphabet.contains(l)) {
            return Err(Error::UnknownLetter(l.clone()));
        }
        let inf: BTreeSet<&String> = w.period.iter().collect();
        Ok(self
            .pairs
            .iter()
            .any(|p| inf.iter().any(|l| p.green.contains(*l)) && inf.iter().all(|l| !p.red.contains(*l))))
    }

    /// The generators of the tile of `letter`, before closure.
    pub fn generators(&self, letter: &str) -> Vec<Transition> {
        let n = self.pairs.len();
        let mut gens = vec![Transition::new(n, 1, n)];
        for (i, p) in self.pairs.iter().enumerate() {
            let red = p.red.contains(letter);
            if p.green.contains(letter) && !red {
                gens.push(Transition::new(i, 0, i));
            }
            if !red {
                gens.push(Transition::new(i, 1, i));
            }
        }
        gens
    }
}

/// Encodes a Rabin condition with `n` pairs over the states `0 < … < n`.
pub fn rabin_to_oba(spec: &RabinSpec) -> Result<(OrderedBuchiAutomaton, Morphism)> {
    let n = spec.pairs.len();
    let universe = StateUniverse::numbered(n + 1)?;
    let initial = universe.states().collect();
    let mut letters = BTreeMap::new();
    for l in &spec.alphabet {
        letters.insert(l.clone(), Tile::upward_closure(n + 1, spec.generators(l))?);
    }
    let morphism = Morphism::identity(&spec.alphabet);
    let a = OrderedBuchiAutomaton::new(universe, initial, letters)?.with_morphism(morphism.clone())?;
    Ok((a, morphism))
}

/// Which ε-completeness axiom failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    Reflexive,
    Transitive,
    Total,
    Refinement,
    StrictVariant,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::Reflexive => "reflexivity",
            Axiom::Transitive => "transitivity",
            Axiom::Total => "totality",
            Axiom::Refinement => "refinement",
            Axiom::StrictVariant => "strict variant",
        };
        f.write_str(s)
    }
}

/// First counterexample found for one axiom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsViolation {
    pub axiom: Axiom,
    pub priority: i32,
    pub witness: String,
}

impl fmt::Display for EpsViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} fails at priority {}: {}",
            self.axiom, self.priority, self.witness
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EpsReport {
    pub violations: Vec<EpsViolation>,
}

impl EpsReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first(&self) -> Option<&EpsViolation> {
        self.violations.first()
    }
}

fn check_index(a: &ParityAutomaton) -> Result<()> {
    let (lo, hi) = a.index;
    if hi < 1 || hi.rem_euclid(2) != 1 {
        return Err(Error::Usage(format!(
            "ε-completeness needs an index ending in an odd priority, got [{lo}, {hi}]"
        )));
    }
    if lo != 0 && lo != -1 {
        return Err(Error::Usage(format!(
            "ε-completeness needs an index starting at 0 or -1, got [{lo}, {hi}]"
        )));
    }
    Ok(())
}

/// Checks the ε-completeness axioms over the odd priorities `1, 3, …, hi`
/// and the even ones below `hi`.
#[allow(clippy::needless_range_loop)]
pub fn check_eps_complete(a: &ParityAutomaton) -> Result<EpsReport> {
    check_index(a)?;
    let n = a.size();
    let name = |q: usize| a.states[q].as_str();
    let hi = a.index.1;
    let rel: BTreeMap<i32, Vec<Vec<bool>>> = (0..=hi).map(|c| (c, a.eps_relation(c))).collect();
    let mut found: BTreeMap<Axiom, EpsViolation> = BTreeMap::new();
    let mut note = |axiom: Axiom, priority: i32, witness: String| {
        found.entry(axiom).or_insert(EpsViolation {
            axiom,
            priority,
            witness,
        });
    };
    for c in (1..=hi).step_by(2) {
        let r = &rel[&c];
        for p in 0..n {
            if !r[p][p] {
                note(Axiom::Reflexive, c, format!("missing {} -> {}", name(p), name(p)));
            }
            for q in 0..n {
                if !r[p][q] && !r[q][p] {
                    note(
                        Axiom::Total,
                        c,
                        format!("neither {} -> {} nor {} -> {}", name(p), name(q), name(q), name(p)),
                    );
                }
                if !r[p][q] {
                    continue;
                }
                for s in 0..n {
                    if r[q][s] && !r[p][s] {
                        note(
                            Axiom::Transitive,
                            c,
                            format!(
                                "{} -> {} -> {} but not {} -> {}",
                                name(p),
                                name(q),
                                name(s),
                                name(p),
                                name(s)
                            ),
                        );
                    }
                }
            }
        }
        for c2 in (c + 2..=hi).step_by(2) {
            let r2 = &rel[&c2];
            for p in 0..n {
                for q in 0..n {
                    if r2[p][q] && !r[p][q] {
                        note(
                            Axiom::Refinement,
                            c2,
                            format!("{} -> {} at {c2} but not at {c}", name(p), name(q)),
                        );
                    }
                }
            }
        }
    }
    for c in (0..hi).step_by(2) {
        let (even, odd) = (&rel[&c], &rel[&(c + 1)]);
        for p in 0..n {
            for q in 0..n {
                if even[p][q] == odd[q][p] {
                    let witness = if even[p][q] {
                        format!(
                            "{} -> {} at {c} yet {} -> {} at {}",
                            name(p),
                            name(q),
                            name(q),
                            name(p),
                            c + 1
                        )
                    } else {
                        format!(
                            "neither {} -> {} at {c} nor {} -> {} at {}",
                            name(p),
                            name(q),
                            name(q),
                            name(p),
                            c + 1
                        )
                    };
                    note(Axiom::StrictVariant, c, witness);
                }
            }
        }
    }
    let mut violations: Vec<EpsViolation> = found.into_values().collect();
    violations.sort_by_key(|v| v.axiom);
    Ok(EpsReport { violations })
}

fn require_eps_complete(a: &ParityAutomaton) -> Result<()> {
    match check_eps_complete(a)?.violations.into_iter().next() {
        Some(v) => Err(Error::NotEpsComplete(v)),
        None => Ok(()),
    }
}

/// One odd-class of the ε-tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsNode {
    /// Depth `d ≥ 1`; the node is a `(2d-1)`-class.
    pub depth: usize,
    pub class: BTreeSet<usize>,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

/// Odd-classes arranged as a tree. `nodes` is listed in ascending ⊑ order,
/// so index 0 is the lowest node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsTree {
    pub depth: usize,
    pub nodes: Vec<EpsNode>,
}

impl EpsTree {
    pub fn node_name(&self, a: &ParityAutomaton, i: usize) -> String {
        let n = &self.nodes[i];
        let members: Vec<&str> = n.class.iter().map(|&q| a.states[q].as_str()).collect();
        format!("{{{}}}_{}", members.join(","), n.depth)
    }

    /// Nodes at `depth`, ⊑-descending.
    pub fn level(&self, depth: usize) -> Vec<usize> {
        (0..self.nodes.len())
            .rev()
            .filter(|&i| self.nodes[i].depth == depth)
            .collect()
    }
}

/// Equivalence classes of a total preorder, highest first.
#[allow(clippy::needless_range_loop)]
fn classes(r: &[Vec<bool>]) -> Vec<BTreeSet<usize>> {
    let n = r.len();
    let mut out: Vec<BTreeSet<usize>> = Vec::new();
    for q in 0..n {
        match out.iter_mut().find(|c| {
            let p = *c.iter().next().unwrap();
            r[p][q] && r[q][p]
        }) {
            Some(c) => {
                c.insert(q);
            }
            None => out.push([q].into()),
        }
    }
    let above = |x: &BTreeSet<usize>| {
        let p = *x.iter().next().unwrap();
        (0..n).filter(|&q| r[p][q]).count()
    };
    out.sort_by_key(|c| std::cmp::Reverse(above(c)));
    out
}

/// Builds the tree of odd-classes, one level per odd priority of the
/// declared index.
pub fn build_eps_tree(a: &ParityAutomaton) -> Result<EpsTree> {
    require_eps_complete(a)?;
    let depth = ((a.index.1 + 1) / 2) as usize;
    let levels: Vec<Vec<BTreeSet<usize>>> = (1..=depth)
        .map(|d| classes(&a.eps_relation(2 * d as i32 - 1)))
        .collect();
    let mut descending: Vec<EpsNode> = Vec::new();
    fn visit(
        levels: &[Vec<BTreeSet<usize>>],
        d: usize,
        class: &BTreeSet<usize>,
        parent: Option<usize>,
        out: &mut Vec<EpsNode>,
    ) {
        let id = out.len();
        out.push(EpsNode {
            depth: d,
            class: class.clone(),
            parent,
            children: Vec::new(),
        });
        if d < levels.len() {
            for child in levels[d].iter().filter(|c| c.is_subset(class)) {
                let cid = out.len();
                out[id].children.push(cid);
                visit(levels, d + 1, child, Some(id), out);
            }
        }
    }
    if depth > 0 {
        for top in &levels[0] {
            visit(&levels, 1, top, None, &mut descending);
        }
    }
    let m = descending.len();
    let flip = |i: usize| m - 1 - i;
    let nodes = descending
        .into_iter()
        .rev()
        .map(|n| EpsNode {
            parent: n.parent.map(flip),
            children: n.children.into_iter().map(flip).collect(),
            ..n
        })
        .collect();
    Ok(EpsTree { depth, nodes })
}

/// Whether `c ⊴ bound` in the preference order `0 ⊲ 2 ⊲ … ⊲ 3 ⊲ 1`, for
/// an odd `bound`.
fn preferred_to_odd(c: i32, bound: i32) -> bool {
    c >= 0 && (c % 2 == 0 || c >= bound)
}

/// Whether `c ⊴ bound` for an even `bound`.
fn preferred_to_even(c: i32, bound: i32) -> bool {
    c >= 0 && c % 2 == 0 && c <= bound
}

/// Result of translating an ε-complete parity automaton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityConversion {
    pub oba: OrderedBuchiAutomaton,
    pub morphism: Morphism,
    pub tree: EpsTree,
    /// Image of the empty letter.
    pub eps_tile: Tile,
    pub notes: Vec<String>,
}

fn image_tile(a: &ParityAutomaton, tree: &EpsTree, symbol: Symbol) -> Result<Tile> {
    let mut gens = Vec::new();
    for d in 1..=tree.depth {
        let level = tree.level(d);
        let (odd, even) = (2 * d as i32 - 1, 2 * d as i32 - 2);
        for &x in &level {
            for &y in &level {
                let (cx, cy) = (&tree.nodes[x].class, &tree.nodes[y].class);
                let prios = a
                    .transitions
                    .iter()
                    .filter(|t| t.symbol == symbol && cx.contains(&t.src) && cy.contains(&t.dst))
                    .map(|t| t.priority);
                let (mut edge, mut buchi) = (false, false);
                for c in prios {
                    edge |= preferred_to_odd(c, odd);
                    buchi |= preferred_to_even(c, even);
                }
                if edge {
                    gens.push(Transition::new(x, 1, y));
                }
                if buchi {
                    gens.push(Transition::new(x, 0, y));
                }
            }
        }
    }
    Tile::upward_closure(tree.nodes.len(), gens)
}

/// Translates an ε-complete parity automaton with index `[0, 2k+1]` into
/// an ordered Büchi automaton over its ε-tree.
pub fn parity_to_oba(a: &ParityAutomaton) -> Result<ParityConversion> {
    if a.index.0 < 0 {
        return Err(Error::Usage(format!(
            "translation needs non-negative priorities, got index [{}, {}]",
            a.index.0, a.index.1
        )));
    }
    let tree = build_eps_tree(a)?;
    let mut notes = Vec::new();
    let top = a.index.1;
    let finest = a.eps_relation(top);
    for &i in &a.initial {
        if let Some(q) = (0..a.size()).find(|&q| finest[i][q] && !a.initial.contains(&q)) {
            notes.push(format!(
                "initial set is not downward-closed for ε:{top} ({} -> {}); its ε:1 closure is used",
                a.states[i], a.states[q]
            ));
            break;
        }
    }
    let names: Vec<String> = (0..tree.nodes.len()).map(|i| tree.node_name(a, i)).collect();
    let universe = StateUniverse::new(names)?;
    let top_initial = tree
        .nodes
        .iter()
        .enumerate()
        .rev()
        .find(|(_, n)| n.depth == 1 && n.class.iter().any(|q| a.initial.contains(q)))
        .map(|(i, _)| i);
    let initial: BTreeSet<State> = match top_initial {
        Some(m) => (0..=m).map(State).collect(),
        None => BTreeSet::new(),
    };
    let mut letters = BTreeMap::new();
    for (x, l) in a.alphabet.iter().enumerate() {
        letters.insert(l.clone(), image_tile(a, &tree, Symbol::Letter(x))?);
    }
    let eps_tile = image_tile(a, &tree, Symbol::Eps)?;
    let morphism = match &a.morphism {
        Some(m) => m.clone(),
        None => Morphism::identity(&a.alphabet),
    };
    let oba = OrderedBuchiAutomaton::new(universe, initial, letters)?.with_morphism(morphism.clone())?;
    Ok(ParityConversion {
        oba,
        morphism,
        tree,
        eps_tile,
        notes,
    })
}

/// Surrounds every letter with `eps`.
pub fn intertwine(w: &UpWord) -> UpWord {
    let spread = |xs: &[String]| -> Vec<String> {
        xs.iter()
            .flat_map(|x| [EPS.to_string(), x.clone(), EPS.to_string()])
            .collect()
    };
    UpWord {
        prefix: spread(&w.prefix),
        period: spread(&w.period),
    }
}

/// Largest universe accepted by [`horizontal_complete_alphabet`].
pub const HORIZONTAL_LIMIT: usize = 6;

/// Every tile generated by horizontal transitions only: one per choice of
/// absent, priority 1 or priority 0 at each state. Names spell the choice
/// from the lowest state up with `-`, `1` and `0`.
pub fn horizontal_complete_alphabet(u: &StateUniverse) -> Result<Vec<(String, Tile)>> {
    let n = u.len();
    if n > HORIZONTAL_LIMIT {
        let count = 3u128.pow(n as u32);
        return Err(Error::Usage(format!(
            "horizontal-complete alphabet over {n} states would have {count} tiles (limit is {HORIZONTAL_LIMIT} states)"
        )));
    }
    let mut out: Vec<(String, Tile)> = Vec::new();
    let mut seen = BTreeSet::new();
    for code in 0..3usize.pow(n as u32) {
        let mut name = String::from("h");
        let mut gens = Vec::new();
        let mut rest = code;
        for q in 0..n {
            match rest % 3 {
                0 => name.push('-'),
                1 => {
                    name.push('1');
                    gens.push(Transition::new(q, 1, q));
                }
                _ => {
                    name.push('0');
                    gens.push(Transition::new(q, 0, q));
                }
            }
            rest /= 3;
        }
        let t = Tile::upward_closure(n, gens)?;
        if seen.insert(t.clone()) {
            out.push((name, t));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{npa_member_up, oba_member_up, ParityTransition};

    fn letters(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn two_pair() -> RabinSpec {
        RabinSpec::new(
            ["a", "b", "c", "d"].map(String::from).to_vec(),
            vec![
                RabinPair {
                    green: letters(&["d"]),
                    red: letters(&["a", "c"]),
                },
                RabinPair {
                    green: letters(&["b"]),
                    red: letters(&["d"]),
                },
            ],
        )
        .unwrap()
    }

    fn set(ts: &[(usize, u8, usize)]) -> BTreeSet<Transition> {
        ts.iter().map(|&(p, c, q)| Transition::new(p, c, q)).collect()
    }

    #[test]
    fn rabin_generators() {
        let s = two_pair();
        let a: BTreeSet<Transition> = s.generators("a").into_iter().collect();
        assert_eq!(a, set(&[(2, 1, 2), (1, 1, 1)]));
        let b: BTreeSet<Transition> = s.generators("b").into_iter().collect();
        assert_eq!(b, set(&[(2, 1, 2), (0, 1, 0), (1, 0, 1), (1, 1, 1)]));
    }

    #[test]
    fn rabin_membership() {
        let s = two_pair();
        let (a, _) = rabin_to_oba(&s).unwrap();
        assert!(a.validate().is_valid());
        let w = UpWord::parse("", "d").unwrap();
        assert!(s.accepts(&w).unwrap());
        assert!(oba_member_up(&a, &w).unwrap());
        let w = UpWord::parse("b", "a c").unwrap();
        assert!(!s.accepts(&w).unwrap());
        assert!(!oba_member_up(&a, &w).unwrap());
    }

    fn eps_chain(n: usize, ranks: &[Vec<usize>]) -> Vec<ParityTransition> {
        // ranks[k][q] is the height of q for priority 2k+1.
        let mut out = Vec::new();
        for (k, r) in ranks.iter().enumerate() {
            for p in 0..n {
                for q in 0..n {
                    let c = 2 * k as i32;
                    if r[p] >= r[q] {
                        out.push(ParityTransition {
                            src: p,
                            symbol: Symbol::Eps,
                            priority: c + 1,
                            dst: q,
                        });
                    }
                    if r[p] > r[q] {
                        out.push(ParityTransition {
                            src: p,
                            symbol: Symbol::Eps,
                            priority: c,
                            dst: q,
                        });
                    }
                }
            }
        }
        out
    }

    fn four_state() -> ParityAutomaton {
        let states = ["p", "q", "r", "s"].map(String::from).to_vec();
        let mut ts = eps_chain(4, &[vec![1, 1, 1, 0], vec![2, 2, 1, 0]]);
        ts.push(ParityTransition {
            src: 2,
            symbol: Symbol::Letter(0),
            priority: 2,
            dst: 0,
        });
        ParityAutomaton::new(
            states,
            [0, 1, 2, 3].into(),
            (0, 3),
            vec!["a".into()],
            ts.into_iter().collect(),
            false,
        )
        .unwrap()
    }

    #[test]
    fn four_state_tree_order() {
        let a = four_state();
        assert!(check_eps_complete(&a).unwrap().passed());
        let tree = build_eps_tree(&a).unwrap();
        let names: Vec<String> = (0..tree.nodes.len()).rev().map(|i| tree.node_name(&a, i)).collect();
        assert_eq!(names, ["{p,q,r}_1", "{p,q}_2", "{r}_2", "{s}_1", "{s}_2"]);
        let conv = parity_to_oba(&a).unwrap();
        assert_eq!(conv.eps_tile, Tile::unit(5));
        assert!(conv.oba.validate().is_valid());
    }

    #[test]
    fn missing_eps_fails_totality() {
        let a = ParityAutomaton::new(
            vec!["p".into(), "q".into()],
            [0].into(),
            (0, 1),
            vec!["a".into()],
            BTreeSet::new(),
            false,
        )
        .unwrap();
        let r = check_eps_complete(&a).unwrap();
        assert!(r.violations.iter().any(|v| v.axiom == Axiom::Total));
        assert!(matches!(build_eps_tree(&a), Err(Error::NotEpsComplete(_))));
    }

    #[test]
    fn single_state_loops_pass() {
        let ts = eps_chain(1, &[vec![0], vec![0]]);
        let mut ts: BTreeSet<ParityTransition> = ts.into_iter().collect();
        ts.insert(ParityTransition {
            src: 0,
            symbol: Symbol::Letter(0),
            priority: 0,
            dst: 0,
        });
        let a = ParityAutomaton::new(vec!["q".into()], [0].into(), (0, 3), vec!["a".into()], ts, false).unwrap();
        assert!(check_eps_complete(&a).unwrap().passed());
        let conv = parity_to_oba(&a).unwrap();
        assert_eq!(conv.oba.size(), 2);
        for d in 0..2 {
            assert!(conv.oba.letters["a"].has_horizontal_buchi(State(d)));
        }
        let w = UpWord::parse("", "a").unwrap();
        assert!(npa_member_up(&a, &w).unwrap());
        assert!(oba_member_up(&conv.oba, &w).unwrap());
    }

    #[test]
    fn even_index_is_a_usage_error() {
        let a = ParityAutomaton::new(vec!["q".into()], [0].into(), (0, 2), vec![], BTreeSet::new(), false).unwrap();
        assert!(matches!(check_eps_complete(&a), Err(Error::Usage(_))));
    }

    #[test]
    fn intertwine_examples() {
        let w = UpWord::parse("", "a").unwrap();
        let i = intertwine(&w);
        assert!(i.prefix.is_empty());
        assert_eq!(i.period, ["eps", "a", "eps"]);
    }

    #[test]
    fn horizontal_alphabets() {
        let one = horizontal_complete_alphabet(&StateUniverse::numbered(1).unwrap()).unwrap();
        assert_eq!(one.len(), 3);
        for n in 1..=4 {
            let h = horizontal_complete_alphabet(&StateUniverse::numbered(n).unwrap()).unwrap();
            assert_eq!(h.len(), 3usize.pow(n as u32));
            assert!(h.iter().any(|(_, t)| *t == Tile::unit(n)));
        }
        let err = horizontal_complete_alphabet(&StateUniverse::numbered(7).unwrap()).unwrap_err();
        assert!(err.to_string().contains("2187"));
    }
}
