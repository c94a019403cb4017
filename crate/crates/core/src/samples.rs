//! Small hand-built automata used by the tests, the acceptance suite and
//! the documentation.

use std::collections::{BTreeMap, BTreeSet};

use crate::automata::{OrderedBuchiAutomaton, ParityAutomaton, ParityTransition, Symbol, UpWord};
use crate::convert::{horizontal_complete_alphabet, RabinPair, RabinSpec};
use crate::tile::{State, StateUniverse, Tile, Transition};
use crate::verify::GenBuchi;

fn tile(n: usize, gens: &[(usize, u8, usize)]) -> Tile {
    Tile::upward_closure(n, gens.iter().map(|&(p, c, q)| Transition::new(p, c, q))).expect("generators in range")
}

fn oba(names: &[&str], initial: &[usize], letters: Vec<(&str, Tile)>) -> OrderedBuchiAutomaton {
    OrderedBuchiAutomaton::new(
        StateUniverse::new(names.iter().copied()).expect("distinct names"),
        initial.iter().map(|&q| State(q)).collect(),
        letters.into_iter().map(|(l, t)| (l.to_string(), t)).collect(),
    )
    .expect("well-formed sample")
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// Infinitely many `a`: two states, `a` loops with a Büchi edge on top and
/// `b` is the unit.
pub fn inf_a() -> OrderedBuchiAutomaton {
    oba(
        &["s0", "s1"],
        &[0, 1],
        vec![("a", tile(2, &[(1, 0, 1)])), ("b", Tile::unit(2))],
    )
}

/// Infinitely many factors `aa` and finitely many `bb`, over `r ⊏ q ⊏ p`.
pub fn inf_aa_fin_bb() -> OrderedBuchiAutomaton {
    oba(
        &["r", "q", "p"],
        &[0, 1, 2],
        vec![
            ("a", tile(3, &[(0, 1, 1), (1, 0, 1), (2, 1, 2)])),
            ("b", tile(3, &[(1, 1, 0), (2, 1, 2)])),
        ],
    )
}

pub fn inf_aa_fin_bb_oracle(w: &UpWord) -> bool {
    let vv = [w.period.as_slice(), w.period.as_slice()].concat();
    let has = |x: &str| vv.windows(2).any(|p| p[0] == x && p[1] == x);
    has("a") && !has("b")
}

/// Infinitely many `b`, or a factor `bb` followed by infinitely many `a`.
pub fn inf_b_or_bb_inf_a() -> OrderedBuchiAutomaton {
    oba(
        &["r", "q", "p"],
        &[0],
        vec![
            ("a", tile(3, &[(0, 1, 0), (1, 1, 0), (2, 0, 2)])),
            ("b", tile(3, &[(0, 1, 1), (1, 1, 2)])),
        ],
    )
}

pub fn inf_b_or_bb_inf_a_oracle(w: &UpWord) -> bool {
    let inf_b = w.period.iter().any(|l| l == "b");
    let inf_a = w.period.iter().any(|l| l == "a");
    let all = [w.prefix.as_slice(), w.period.as_slice(), w.period.as_slice()].concat();
    let bb = all.windows(2).any(|p| p[0] == "b" && p[1] == "b");
    inf_b || (bb && inf_a)
}

/// Pairs `({d}, {a,c})` and `({b}, {d})` over `a, b, c, d`.
pub fn rabin_two_pair() -> RabinSpec {
    let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
    RabinSpec::new(
        strings(&["a", "b", "c", "d"]),
        vec![
            RabinPair {
                green: set(&["d"]),
                red: set(&["a", "c"]),
            },
            RabinPair {
                green: set(&["b"]),
                red: set(&["d"]),
            },
        ],
    )
    .expect("valid spec")
}

/// Two pairs over nine letters, one per behaviour towards each pair:
/// `g` green only, `r` red, `n` neither. Letter `gr` is green for the first
/// pair and red for the second.
pub fn rabin_nine_letter() -> RabinSpec {
    let kinds = ['g', 'r', 'n'];
    let mut alphabet = Vec::new();
    let mut pairs = vec![
        RabinPair {
            green: BTreeSet::new(),
            red: BTreeSet::new(),
        };
        2
    ];
    for x in kinds {
        for y in kinds {
            let name: String = [x, y].iter().collect();
            for (i, k) in [x, y].into_iter().enumerate() {
                match k {
                    'g' => {
                        pairs[i].green.insert(name.clone());
                    }
                    'r' => {
                        pairs[i].red.insert(name.clone());
                    }
                    _ => {}
                }
            }
            alphabet.push(name);
        }
    }
    RabinSpec::new(alphabet, pairs).expect("valid spec")
}

/// Infinitely many `a` and infinitely many `b`.
pub fn gen_buchi_ab() -> GenBuchi {
    GenBuchi::new(
        strings(&["a", "b"]),
        vec![["a".to_string()].into(), ["b".to_string()].into()],
    )
    .expect("letters in alphabet")
}

/// ε-transitions of an automaton whose odd ε-preorders are given by
/// heights: `heights[k][q]` ranks `q` for priority `2k+1`, and priority
/// `2k` is its strict part.
pub fn eps_chain(heights: &[Vec<usize>]) -> Vec<ParityTransition> {
    let mut out = Vec::new();
    for (k, h) in heights.iter().enumerate() {
        let odd = 2 * k as i32 + 1;
        for p in 0..h.len() {
            for q in 0..h.len() {
                if h[p] >= h[q] {
                    out.push(ParityTransition {
                        src: p,
                        symbol: Symbol::Eps,
                        priority: odd,
                        dst: q,
                    });
                }
                if h[p] > h[q] {
                    out.push(ParityTransition {
                        src: p,
                        symbol: Symbol::Eps,
                        priority: odd - 1,
                        dst: q,
                    });
                }
            }
        }
    }
    out
}

fn eps_complete(
    states: &[&str],
    initial: &[usize],
    alphabet: &[&str],
    hi: i32,
    heights: &[Vec<usize>],
    letters: &[(usize, &str, i32, usize)],
) -> ParityAutomaton {
    let alpha = strings(alphabet);
    let mut ts: BTreeSet<ParityTransition> = eps_chain(heights).into_iter().collect();
    for &(p, l, c, q) in letters {
        ts.insert(ParityTransition {
            src: p,
            symbol: Symbol::Letter(alpha.iter().position(|x| x == l).expect("letter in alphabet")),
            priority: c,
            dst: q,
        });
    }
    ParityAutomaton::new(
        strings(states),
        initial.iter().copied().collect(),
        (0, hi),
        alpha,
        ts,
        false,
    )
    .expect("well-formed sample")
}

/// Four states `p, q, r, s` whose ε-tree is
/// `{p,q,r}₁ ⊐ {p,q}₂ ⊐ {r}₂ ⊐ {s}₁ ⊐ {s}₂`.
pub fn four_state_eps() -> ParityAutomaton {
    eps_complete(
        &["p", "q", "r", "s"],
        &[0, 1, 2, 3],
        &["a", "b"],
        3,
        &[vec![1, 1, 1, 0], vec![2, 2, 1, 0]],
        &[
            (0, "a", 2, 1),
            (1, "a", 1, 2),
            (2, "b", 0, 2),
            (2, "a", 3, 0),
            (3, "b", 2, 3),
            (3, "a", 1, 0),
            (1, "b", 3, 3),
        ],
    )
}

/// Hand-built ε-complete automata, the four-state one first.
pub fn eps_complete_samples() -> Vec<(&'static str, ParityAutomaton)> {
    vec![
        ("four-state", four_state_eps()),
        (
            "one-state-buchi",
            eps_complete(
                &["q"],
                &[0],
                &["a", "b"],
                1,
                &[vec![0]],
                &[(0, "a", 0, 0), (0, "b", 1, 0)],
            ),
        ),
        (
            "two-state-buchi",
            eps_complete(
                &["lo", "hi"],
                &[0, 1],
                &["a", "b"],
                1,
                &[vec![0, 1]],
                &[(1, "a", 0, 1), (1, "b", 1, 0), (0, "b", 0, 1), (0, "a", 1, 0)],
            ),
        ),
        (
            "one-state-parity",
            eps_complete(
                &["q"],
                &[0],
                &["a", "b", "c"],
                3,
                &[vec![0], vec![0]],
                &[(0, "a", 1, 0), (0, "b", 2, 0), (0, "c", 3, 0)],
            ),
        ),
        (
            "three-state-parity",
            eps_complete(
                &["x", "y", "z"],
                &[0, 1, 2],
                &["a", "b"],
                3,
                &[vec![0, 1, 1], vec![0, 1, 2]],
                &[
                    (2, "a", 2, 2),
                    (2, "b", 1, 1),
                    (1, "b", 0, 2),
                    (1, "a", 3, 0),
                    (0, "a", 0, 0),
                    (0, "b", 2, 1),
                ],
            ),
        ),
        (
            "split-class",
            eps_complete(
                &["u", "v"],
                &[0, 1],
                &["a", "b"],
                3,
                &[vec![0, 0], vec![0, 1]],
                &[(1, "a", 2, 1), (0, "a", 1, 1), (1, "b", 3, 0), (0, "b", 0, 0)],
            ),
        ),
    ]
}

/// The ordered Büchi automaton over all horizontal-skeleton tiles on `n`
/// states, every state initial.
pub fn horizontal_complete_oba(n: usize) -> OrderedBuchiAutomaton {
    let u = StateUniverse::numbered(n).expect("nonempty");
    let letters: BTreeMap<String, Tile> = horizontal_complete_alphabet(&u)
        .expect("small universe")
        .into_iter()
        .collect();
    let initial = u.states().collect();
    OrderedBuchiAutomaton::new(u, initial, letters).expect("well-formed")
}

/// The named ordered Büchi samples.
pub fn oba_samples() -> Vec<(&'static str, OrderedBuchiAutomaton)> {
    vec![
        ("inf-a", inf_a()),
        ("inf-aa-fin-bb", inf_aa_fin_bb()),
        ("inf-b-or-bb-inf-a", inf_b_or_bb_inf_a()),
        (
            "rabin-two-pair",
            crate::convert::rabin_to_oba(&rabin_two_pair()).expect("valid").0,
        ),
    ]
}
