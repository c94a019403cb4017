//! JSON file formats and DOT export.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::automata::{Morphism, OrderedBuchiAutomaton, ParityAutomaton, ParityTransition, Symbol, EPS};
use crate::convert::{RabinPair, RabinSpec};
use crate::determinize::{Determinization, Record};
use crate::error::{Error, Result};
use crate::tile::{State, StateUniverse, Tile, Transition};
use crate::verify::GenBuchi;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LetterRepr {
    skeleton: Vec<(usize, u8, usize)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObaRepr {
    states: Vec<String>,
    initial: Vec<String>,
    alphabet: BTreeMap<String, LetterRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    morphism: Option<BTreeMap<String, String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParityRepr {
    states: Vec<String>,
    initial: Vec<String>,
    index: (i32, i32),
    alphabet: Vec<String>,
    transitions: Vec<(String, String, i32, String)>,
    #[serde(default)]
    deterministic: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    morphism: Option<BTreeMap<String, String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DetRepr {
    states: Vec<String>,
    initial: Vec<String>,
    index: (i32, i32),
    alphabet: Vec<String>,
    transitions: Vec<(String, String, i32, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    morphism: Option<BTreeMap<String, String>>,
    universe: Vec<String>,
    records: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GenBuchiRepr {
    alphabet: Vec<String>,
    required: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind")]
enum FileRepr {
    #[serde(rename = "ordered-buchi")]
    Oba(ObaRepr),
    #[serde(rename = "parity")]
    Parity(ParityRepr),
    #[serde(rename = "det-parity")]
    Det(DetRepr),
    #[serde(rename = "gen-buchi")]
    GenBuchi(GenBuchiRepr),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairRepr {
    #[serde(rename = "G")]
    green: Vec<String>,
    #[serde(rename = "R")]
    red: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RabinRepr {
    alphabet: Vec<String>,
    pairs: Vec<PairRepr>,
}

/// Any automaton or oracle the file format can hold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Automaton {
    Oba(OrderedBuchiAutomaton),
    Parity(ParityAutomaton),
    Det(Determinization),
    GenBuchi(GenBuchi),
}

impl Automaton {
    pub fn kind(&self) -> &'static str {
        match self {
            Automaton::Oba(_) => "ordered-buchi",
            Automaton::Parity(_) => "parity",
            Automaton::Det(_) => "det-parity",
            Automaton::GenBuchi(_) => "gen-buchi",
        }
    }

    pub fn alphabet(&self) -> Vec<String> {
        use crate::automata::UpLanguage;
        match self {
            Automaton::Oba(a) => a.alphabet(),
            Automaton::Parity(a) => a.alphabet(),
            Automaton::Det(d) => d.automaton.alphabet(),
            Automaton::GenBuchi(g) => g.alphabet(),
        }
    }

    pub fn accepts(&self, w: &crate::automata::UpWord) -> Result<bool> {
        use crate::automata::UpLanguage;
        match self {
            Automaton::Oba(a) => a.accepts(w),
            Automaton::Parity(a) => a.accepts(w),
            Automaton::Det(d) => d.automaton.accepts(w),
            Automaton::GenBuchi(g) => g.accepts(w),
        }
    }

    /// Findings beyond the structural checks done while parsing.
    pub fn validate(&self) -> crate::automata::ValidationReport {
        match self {
            Automaton::Oba(a) => a.validate(),
            Automaton::Parity(a) => a.validate(),
            Automaton::Det(d) => d.automaton.validate(),
            Automaton::GenBuchi(_) => Default::default(),
        }
    }
}

fn lookup(names: &[String], name: &str) -> Result<usize> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::UnknownState(name.to_string()))
}

fn morphism(map: Option<BTreeMap<String, String>>) -> Option<Morphism> {
    map.map(|map| Morphism { map })
}

fn oba_from(r: ObaRepr) -> Result<OrderedBuchiAutomaton> {
    let universe = StateUniverse::new(r.states)?;
    let initial = r
        .initial
        .iter()
        .map(|s| universe.lookup(s).ok_or_else(|| Error::UnknownState(s.clone())))
        .collect::<Result<BTreeSet<State>>>()?;
    let mut letters = BTreeMap::new();
    for (name, l) in r.alphabet {
        let gens = l.skeleton.into_iter().map(|(p, c, q)| Transition::new(p, c, q));
        letters.insert(name, Tile::upward_closure(universe.len(), gens)?);
    }
    let a = OrderedBuchiAutomaton::new(universe, initial, letters)?;
    match morphism(r.morphism) {
        Some(m) => a.with_morphism(m),
        None => Ok(a),
    }
}

fn parity_from(
    states: Vec<String>,
    initial: Vec<String>,
    index: (i32, i32),
    alphabet: Vec<String>,
    transitions: Vec<(String, String, i32, String)>,
    deterministic: bool,
    morph: Option<BTreeMap<String, String>>,
) -> Result<ParityAutomaton> {
    let init = initial
        .iter()
        .map(|s| lookup(&states, s))
        .collect::<Result<BTreeSet<usize>>>()?;
    let mut ts = BTreeSet::new();
    for (src, letter, priority, dst) in &transitions {
        let symbol = if letter == EPS {
            Symbol::Eps
        } else {
            Symbol::Letter(
                alphabet
                    .iter()
                    .position(|l| l == letter)
                    .ok_or_else(|| Error::UnknownLetter(letter.clone()))?,
            )
        };
        ts.insert(ParityTransition {
            src: lookup(&states, src)?,
            symbol,
            priority: *priority,
            dst: lookup(&states, dst)?,
        });
    }
    let a = ParityAutomaton::new(states, init, index, alphabet, ts, deterministic)?;
    match morphism(morph) {
        Some(m) => a.with_morphism(m),
        None => Ok(a),
    }
}

/// Parses a file without the semantic checks of
/// [`Automaton::validate`].
pub fn parse_unchecked(text: &str) -> Result<Automaton> {
    let repr: FileRepr = serde_json::from_str(text)?;
    Ok(match repr {
        FileRepr::Oba(r) => Automaton::Oba(oba_from(r)?),
        FileRepr::Parity(r) => Automaton::Parity(parity_from(
            r.states,
            r.initial,
            r.index,
            r.alphabet,
            r.transitions,
            r.deterministic,
            r.morphism,
        )?),
        FileRepr::Det(r) => {
            let universe = StateUniverse::new(r.universe)?;
            let records = r
                .records
                .iter()
                .map(|rec| {
                    rec.iter()
                        .map(|s| universe.lookup(s).ok_or_else(|| Error::UnknownState(s.clone())))
                        .collect::<Result<Vec<State>>>()
                        .map(Record)
                })
                .collect::<Result<Vec<Record>>>()?;
            let a = parity_from(
                r.states,
                r.initial,
                r.index,
                r.alphabet,
                r.transitions,
                true,
                r.morphism,
            )?;
            Automaton::Det(Determinization::from_parts(a, universe, records)?)
        }
        FileRepr::GenBuchi(r) => Automaton::GenBuchi(GenBuchi::new(
            r.alphabet,
            r.required.into_iter().map(|s| s.into_iter().collect()).collect(),
        )?),
    })
}

/// Parses and validates; any error-level finding is returned as
/// [`Error::Validation`].
pub fn parse_automaton(text: &str) -> Result<Automaton> {
    let a = parse_unchecked(text)?;
    a.validate().into_result()?;
    Ok(a)
}

pub fn load_automaton(path: &Path) -> Result<Automaton> {
    parse_automaton(&std::fs::read_to_string(path)?)
}

pub fn parse_rabin(text: &str) -> Result<RabinSpec> {
    let r: RabinRepr = serde_json::from_str(text)?;
    RabinSpec::new(
        r.alphabet,
        r.pairs
            .into_iter()
            .map(|p| RabinPair {
                green: p.green.into_iter().collect(),
                red: p.red.into_iter().collect(),
            })
            .collect(),
    )
}

pub fn rabin_to_json(spec: &RabinSpec) -> String {
    let r = RabinRepr {
        alphabet: spec.alphabet.clone(),
        pairs: spec
            .pairs
            .iter()
            .map(|p| PairRepr {
                green: p.green.iter().cloned().collect(),
                red: p.red.iter().cloned().collect(),
            })
            .collect(),
    };
    pretty(&r)
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

fn oba_repr(a: &OrderedBuchiAutomaton) -> ObaRepr {
    ObaRepr {
        states: a.universe.names().to_vec(),
        initial: a.initial.iter().map(|&q| a.universe.name(q).to_string()).collect(),
        alphabet: a
            .letters
            .iter()
            .map(|(l, t)| {
                let skeleton = t
                    .skeleton()
                    .transitions()
                    .iter()
                    .map(|d| (d.src.0, d.priority, d.dst.0))
                    .collect();
                (l.clone(), LetterRepr { skeleton })
            })
            .collect(),
        morphism: a.morphism.as_ref().map(|m| m.map.clone()),
    }
}

fn parity_transitions(a: &ParityAutomaton) -> Vec<(String, String, i32, String)> {
    let mut ts: Vec<(String, String, i32, String)> = a
        .transitions
        .iter()
        .map(|t| {
            let letter = match t.symbol {
                Symbol::Eps => EPS.to_string(),
                Symbol::Letter(x) => a.alphabet[x].clone(),
            };
            (a.states[t.src].clone(), letter, t.priority, a.states[t.dst].clone())
        })
        .collect();
    ts.sort();
    ts
}

fn parity_repr(a: &ParityAutomaton) -> ParityRepr {
    ParityRepr {
        states: a.states.clone(),
        initial: a.initial.iter().map(|&q| a.states[q].clone()).collect(),
        index: a.index,
        alphabet: a.alphabet.clone(),
        transitions: parity_transitions(a),
        deterministic: a.deterministic,
        morphism: a.morphism.as_ref().map(|m| m.map.clone()),
    }
}

/// Canonical pretty JSON.
pub fn to_json(a: &Automaton) -> String {
    let repr = match a {
        Automaton::Oba(a) => FileRepr::Oba(oba_repr(a)),
        Automaton::Parity(a) => FileRepr::Parity(parity_repr(a)),
        Automaton::Det(d) => {
            let p = parity_repr(&d.automaton);
            FileRepr::Det(DetRepr {
                states: p.states,
                initial: p.initial,
                index: p.index,
                alphabet: p.alphabet,
                transitions: p.transitions,
                morphism: p.morphism,
                universe: d.universe.names().to_vec(),
                records: d
                    .records
                    .iter()
                    .map(|r| r.0.iter().map(|&q| d.universe.name(q).to_string()).collect())
                    .collect(),
            })
        }
        Automaton::GenBuchi(g) => FileRepr::GenBuchi(GenBuchiRepr {
            alphabet: g.alphabet.clone(),
            required: g.required.iter().map(|s| s.iter().cloned().collect()).collect(),
        }),
    };
    pretty(&repr)
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT rendering. Ordered Büchi automata show the skeletons of their
/// letters with states stacked by ⊑, the highest on top; Büchi edges are
/// bold and blue. The orange arrow points at the highest initial state.
pub fn to_dot(a: &Automaton) -> String {
    let mut out = String::new();
    match a {
        Automaton::Oba(a) => {
            out.push_str("digraph oba {\n  rankdir=TB;\n  node [shape=circle];\n");
            let names = a.universe.names();
            for (i, n) in names.iter().enumerate().rev() {
                let _ = writeln!(out, "  q{i} [label={}];", quote(n));
            }
            for i in (1..names.len()).rev() {
                let _ = writeln!(out, "  q{i} -> q{} [style=invis, weight=100];", i - 1);
            }
            if let Some(top) = a.max_initial() {
                out.push_str("  init [shape=point, color=orange];\n");
                let _ = writeln!(out, "  init -> q{} [color=orange];", top.0);
            }
            for (l, t) in &a.letters {
                for d in t.skeleton().transitions() {
                    let style = if d.is_buchi() {
                        ", style=bold, color=blue, arrowhead=odot"
                    } else {
                        ""
                    };
                    let _ = writeln!(
                        out,
                        "  q{} -> q{} [label={}, constraint=false{style}];",
                        d.src.0,
                        d.dst.0,
                        quote(l)
                    );
                }
            }
        }
        Automaton::Parity(_) | Automaton::Det(_) => {
            let p = match a {
                Automaton::Parity(p) => p,
                Automaton::Det(d) => &d.automaton,
                _ => unreachable!(),
            };
            out.push_str("digraph parity {\n  rankdir=LR;\n  node [shape=circle];\n");
            for (i, n) in p.states.iter().enumerate() {
                let _ = writeln!(out, "  s{i} [label={}];", quote(n));
            }
            for &i in &p.initial {
                let _ = writeln!(out, "  init{i} [shape=point];\n  init{i} -> s{i};");
            }
            for t in &p.transitions {
                let label = match t.symbol {
                    Symbol::Eps => format!("ε:{}", t.priority),
                    Symbol::Letter(x) => format!("{}:{}", p.alphabet[x], t.priority),
                };
                let style = if t.symbol == Symbol::Eps { ", style=dashed" } else { "" };
                let _ = writeln!(out, "  s{} -> s{} [label={}{style}];", t.src, t.dst, quote(&label));
            }
        }
        Automaton::GenBuchi(g) => {
            out.push_str("digraph genbuchi {\n");
            let sets: Vec<String> = g
                .required
                .iter()
                .map(|s| s.iter().cloned().collect::<Vec<_>>().join(","))
                .collect();
            let _ = writeln!(
                out,
                "  label={};",
                quote(&format!("inf ∩ {{{}}}", sets.join("} ≠ ∅, inf ∩ {")))
            );
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::determinize::determinize;
    use crate::samples;

    const INF_A: &str = r#"{
  "kind": "ordered-buchi",
  "states": ["s0", "s1"],
  "initial": ["s0", "s1"],
  "alphabet": {
    "a": {"skeleton": [[1, 0, 1]]},
    "b": {"skeleton": [[0, 1, 0], [1, 1, 1]]}
  }
}"#;

    #[test]
    fn parses_inf_a() {
        let a = parse_automaton(INF_A).unwrap();
        assert_eq!(a, Automaton::Oba(samples::inf_a()));
    }

    #[test]
    fn rejects_initial_gap() {
        let text = INF_A.replace(r#""initial": ["s0", "s1"]"#, r#""initial": ["s1"]"#);
        match parse_automaton(&text) {
            Err(Error::Validation(msgs)) => assert!(msgs[0].contains("s0"), "{msgs:?}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse_automaton("{\n  \"kind\": \"ordered-buchi\",\n  oops }") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn priority_outside_index_is_rejected() {
        let text = r#"{"kind": "parity", "states": ["q"], "initial": ["q"], "index": [0, 1],
            "alphabet": ["a"], "transitions": [["q", "a", 2, "q"]]}"#;
        assert!(matches!(parse_automaton(text), Err(Error::InvalidPriority { .. })));
    }

    #[test]
    fn eps_is_reserved() {
        let text = r#"{"kind": "parity", "states": ["q"], "initial": ["q"], "index": [0, 1],
            "alphabet": ["eps"], "transitions": []}"#;
        assert!(matches!(parse_automaton(text), Err(Error::ReservedLetter)));
    }

    #[test]
    fn round_trips() {
        let items = vec![
            Automaton::Oba(samples::inf_aa_fin_bb()),
            Automaton::Parity(samples::four_state_eps()),
            Automaton::Det(determinize(&samples::inf_b_or_bb_inf_a())),
            Automaton::GenBuchi(samples::gen_buchi_ab()),
        ];
        for a in items {
            let text = to_json(&a);
            let back = parse_automaton(&text).unwrap();
            assert_eq!(back, a);
            assert_eq!(to_json(&back), text);
        }
        let spec = samples::rabin_two_pair();
        assert_eq!(parse_rabin(&rabin_to_json(&spec)).unwrap(), spec);
    }

    #[test]
    fn dot_output() {
        let dot = to_dot(&Automaton::Oba(samples::inf_a()));
        assert!(dot.contains("init -> q1 [color=orange]"));
        assert!(dot.contains("q1 -> q1 [label=\"a\", constraint=false, style=bold"));
        let dot = to_dot(&Automaton::Parity(samples::four_state_eps()));
        assert!(dot.contains("ε:1"));
    }
}
