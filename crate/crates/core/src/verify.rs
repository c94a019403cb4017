//! Independent oracles: brute-force skeletons, bounded language
//! equivalence and the local preference sampler.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::automata::{UpLanguage, UpWord};
use crate::error::{Error, Result};
use crate::tile::{Skeleton, Tile, Transition};

/// Smallest subset of `t` whose upward closure is `t`, by exhaustive search.
///
/// Exponential in the size of the tile; meant for universes of at most
/// three states. Panics if two subsets of the minimal size both generate `t`.
pub fn skeleton_oracle(t: &Tile) -> Skeleton {
    let all: Vec<Transition> = t.transitions().collect();
    let n = t.size();
    for k in 0..=all.len() {
        let mut hits = Vec::new();
        for_each_subset(&all, k, &mut |subset| {
            if Tile::upward_closure(n, subset.iter().copied()).expect("members of t") == *t {
                hits.push(subset.to_vec());
            }
        });
        if let Some(first) = hits.first() {
            assert_eq!(hits.len(), 1, "two minimal generators for {t:?}");
            return Skeleton::from_transitions(n, first.clone());
        }
    }
    unreachable!("t generates itself")
}

fn for_each_subset<F: FnMut(&[Transition])>(items: &[Transition], k: usize, f: &mut F) {
    fn go<F: FnMut(&[Transition])>(items: &[Transition], start: usize, k: usize, acc: &mut Vec<Transition>, f: &mut F) {
        if acc.len() == k {
            f(acc);
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - acc.len() {
                break;
            }
            acc.push(items[i]);
            go(items, i + 1, k, acc, f);
            acc.pop();
        }
    }
    go(items, 0, k, &mut Vec::new(), f);
}

/// All words of exactly `len` letters, lexicographic in alphabet order.
pub fn words_of_len(alphabet: &[String], len: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                alphabet.iter().map(move |l| {
                    let mut w2 = w.clone();
                    w2.push(l.clone());
                    w2
                })
            })
            .collect();
    }
    out
}

/// Words of length `min..=max`, shorter first.
pub fn words_up_to(alphabet: &[String], min: usize, max: usize) -> Vec<Vec<String>> {
    (min..=max).flat_map(|k| words_of_len(alphabet, k)).collect()
}

/// Ultimately-periodic words ordered by prefix length, period length, then
/// lexicographically.
pub fn up_words(alphabet: &[String], max_prefix: usize, max_period: usize) -> Vec<UpWord> {
    let mut out = Vec::new();
    for p in 0..=max_prefix {
        let prefixes = words_of_len(alphabet, p);
        for v in 1..=max_period {
            let periods = words_of_len(alphabet, v);
            for u in &prefixes {
                for per in &periods {
                    out.push(UpWord {
                        prefix: u.clone(),
                        period: per.clone(),
                    });
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    Equal { checked: usize },
    Counterexample { word: UpWord, left: bool, right: bool },
}

impl Equivalence {
    pub fn is_equal(&self) -> bool {
        matches!(self, Equivalence::Equal { .. })
    }
}

impl fmt::Display for Equivalence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Equivalence::Equal { checked } => write!(f, "equal on {checked} words"),
            Equivalence::Counterexample { word, left, right } => {
                write!(f, "counterexample {word}: left {left}, right {right}")
            }
        }
    }
}

/// Compares two membership oracles on every word within the bounds and
/// returns the first disagreement.
pub fn equiv_up<F, G>(m1: F, m2: G, alphabet: &[String], max_prefix: usize, max_period: usize) -> Result<Equivalence>
where
    F: Fn(&UpWord) -> Result<bool>,
    G: Fn(&UpWord) -> Result<bool>,
{
    let words = up_words(alphabet, max_prefix, max_period);
    for w in &words {
        let (left, right) = (m1(w)?, m2(w)?);
        if left != right {
            return Ok(Equivalence::Counterexample {
                word: w.clone(),
                left,
                right,
            });
        }
    }
    Ok(Equivalence::Equal { checked: words.len() })
}

/// Generalized Büchi condition: each required set is visited infinitely
/// often.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenBuchi {
    pub alphabet: Vec<String>,
    pub required: Vec<BTreeSet<String>>,
}

impl GenBuchi {
    pub fn new(alphabet: Vec<String>, required: Vec<BTreeSet<String>>) -> Result<Self> {
        for l in required.iter().flatten() {
            if !alphabet.contains(l) {
                return Err(Error::UnknownLetter(l.clone()));
            }
        }
        Ok(GenBuchi { alphabet, required })
    }
}

impl UpLanguage for GenBuchi {
    fn alphabet(&self) -> Vec<String> {
        self.alphabet.clone()
    }

    fn accepts(&self, w: &UpWord) -> Result<bool> {
        if let Some(l) = w.letters().find(|l| !self.alphabet.contains(l)) {
            return Err(Error::UnknownLetter(l.clone()));
        }
        Ok(self.required.iter().all(|set| w.period.iter().any(|l| set.contains(l))))
    }
}

impl UpLanguage for crate::convert::RabinSpec {
    fn alphabet(&self) -> Vec<String> {
        self.alphabet.clone()
    }

    fn accepts(&self, w: &UpWord) -> Result<bool> {
        crate::convert::RabinSpec::accepts(self, w)
    }
}

/// Search bounds for [`check_local_preference`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PreferenceBounds {
    /// Longest `u`, `u'` and longest prefix of a continuation.
    pub max_prefix: usize,
    /// Longest factor `v`, `v'`.
    pub max_factor: usize,
    /// Longest period of a continuation.
    pub max_period: usize,
    /// Stop collecting after this many violations.
    pub max_reports: usize,
}

impl Default for PreferenceBounds {
    fn default() -> Self {
        PreferenceBounds {
            max_prefix: 2,
            max_factor: 2,
            max_period: 2,
            max_reports: 1000,
        }
    }
}

/// A violated local preference instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `uw, u'w' ∈ L` but `uw', u'w ∉ L`.
    Residuals {
        u: Vec<String>,
        u2: Vec<String>,
        w: UpWord,
        w2: UpWord,
    },
    /// `uvw ∈ L` but `uv^ω, uw ∉ L`.
    Prefix { u: Vec<String>, v: Vec<String>, w: UpWord },
    /// `u(vv')^ω ∈ L` but `uv^ω, uv'^ω ∉ L`.
    Period {
        u: Vec<String>,
        v: Vec<String>,
        v2: Vec<String>,
    },
}

impl Violation {
    pub fn property(&self) -> u8 {
        match self {
            Violation::Residuals { .. } => 1,
            Violation::Prefix { .. } => 2,
            Violation::Period { .. } => 3,
        }
    }
}

fn show(w: &[String]) -> String {
    if w.is_empty() {
        "ε".into()
    } else {
        w.join(" ")
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Residuals { u, u2, w, w2 } => {
                write!(f, "property 1: u={}, u'={}, w={w}, w'={w2}", show(u), show(u2))
            }
            Violation::Prefix { u, v, w } => {
                write!(f, "property 2: u={}, v={}, w={w}", show(u), show(v))
            }
            Violation::Period { u, v, v2 } => write!(f, "property 3: u={}, v={}, v'={}", show(u), show(v), show(v2)),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PreferenceReport {
    pub violations: Vec<Violation>,
    pub truncated: bool,
    pub instances: usize,
}

impl PreferenceReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first_of(&self, property: u8) -> Option<&Violation> {
        self.violations.iter().find(|v| v.property() == property)
    }
}

struct Memo<'a, F> {
    oracle: &'a F,
    cache: RefCell<HashMap<UpWord, bool>>,
}

impl<F: Fn(&UpWord) -> Result<bool>> Memo<'_, F> {
    fn get(&self, w: UpWord) -> Result<bool> {
        let key = w.canonical();
        if let Some(&b) = self.cache.borrow().get(&key) {
            return Ok(b);
        }
        let b = (self.oracle)(&key)?;
        self.cache.borrow_mut().insert(key, b);
        Ok(b)
    }
}

fn cat(a: &[String], b: &[String]) -> Vec<String> {
    a.iter().chain(b).cloned().collect()
}

fn prepend(u: &[String], w: &UpWord) -> UpWord {
    UpWord {
        prefix: cat(u, &w.prefix),
        period: w.period.clone(),
    }
}

fn power(u: &[String], v: &[String]) -> UpWord {
    UpWord {
        prefix: u.to_vec(),
        period: v.to_vec(),
    }
}

/// Samples the three local preference properties on ultimately-periodic
/// words within the bounds. An empty report means no violation was found,
/// not that the language is positional.
pub fn check_local_preference<F>(m: F, alphabet: &[String], bounds: PreferenceBounds) -> Result<PreferenceReport>
where
    F: Fn(&UpWord) -> Result<bool>,
{
    let memo = Memo {
        oracle: &m,
        cache: RefCell::new(HashMap::new()),
    };
    let prefixes = words_up_to(alphabet, 0, bounds.max_prefix);
    let factors = words_up_to(alphabet, 1, bounds.max_factor);
    let conts = up_words(alphabet, bounds.max_prefix, bounds.max_period);
    let mut report = PreferenceReport::default();
    let push = |report: &mut PreferenceReport, v: Violation| {
        if report.violations.len() < bounds.max_reports {
            report.violations.push(v);
        } else {
            report.truncated = true;
        }
    };

    let columns: Vec<Vec<bool>> = prefixes
        .iter()
        .map(|u| conts.iter().map(|w| memo.get(prepend(u, w))).collect())
        .collect::<Result<_>>()?;
    for i in 0..prefixes.len() {
        for j in i + 1..prefixes.len() {
            report.instances += 1;
            let only_i = (0..conts.len()).find(|&k| columns[i][k] && !columns[j][k]);
            let only_j = (0..conts.len()).find(|&k| columns[j][k] && !columns[i][k]);
            if let (Some(a), Some(b)) = (only_i, only_j) {
                push(
                    &mut report,
                    Violation::Residuals {
                        u: prefixes[i].clone(),
                        u2: prefixes[j].clone(),
                        w: conts[a].clone(),
                        w2: conts[b].clone(),
                    },
                );
            }
        }
    }

    for u in &prefixes {
        for v in &factors {
            let uv = cat(u, v);
            let loops = memo.get(power(u, v))?;
            for w in &conts {
                report.instances += 1;
                if !loops && memo.get(prepend(&uv, w))? && !memo.get(prepend(u, w))? {
                    push(
                        &mut report,
                        Violation::Prefix {
                            u: u.clone(),
                            v: v.clone(),
                            w: w.clone(),
                        },
                    );
                }
            }
        }
    }

    for u in &prefixes {
        for v in &factors {
            for v2 in &factors {
                report.instances += 1;
                if memo.get(power(u, &cat(v, v2)))? && !memo.get(power(u, v))? && !memo.get(power(u, v2))? {
                    push(
                        &mut report,
                        Violation::Period {
                            u: u.clone(),
                            v: v.clone(),
                            v2: v2.clone(),
                        },
                    );
                }
            }
        }
    }
    Ok(report)
}
