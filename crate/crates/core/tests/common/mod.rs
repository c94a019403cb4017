#![allow(dead_code)]

use std::collections::BTreeMap;

use obuchi::samples;
use obuchi::{OrderedBuchiAutomaton, State, StateUniverse, Tile, Transition};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 0x0b0c_4121;

pub fn letters(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// All transitions over `n` states in a fixed order.
pub fn all_transitions(n: usize) -> Vec<Transition> {
    let mut out = Vec::new();
    for p in 0..n {
        for q in 0..n {
            for c in 0..2 {
                out.push(Transition::new(p, c, q));
            }
        }
    }
    out
}

/// Every upward-closed tile over `n` states, by brute force over subsets.
pub fn closed_tiles(n: usize) -> Vec<Tile> {
    let all = all_transitions(n);
    assert!(all.len() < 20, "too many subsets");
    (0u32..1 << all.len())
        .filter_map(|mask| {
            let t = Tile::from_transitions(
                n,
                all.iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, d)| *d),
            )
            .unwrap();
            t.is_upward_closed().then_some(t)
        })
        .collect()
}

pub fn random_tile<R: Rng>(rng: &mut R, n: usize, density: f64) -> Tile {
    let gens: Vec<Transition> = all_transitions(n)
        .into_iter()
        .filter(|_| rng.gen_bool(density))
        .collect();
    Tile::upward_closure(n, gens).unwrap()
}

/// A random ordered Büchi automaton with at most three states and letters.
pub fn random_oba<R: Rng>(rng: &mut R) -> OrderedBuchiAutomaton {
    let n = rng.gen_range(1..=3);
    let k = rng.gen_range(1..=3);
    let names = ["a", "b", "c"];
    let letters: BTreeMap<String, Tile> = names[..k]
        .iter()
        .map(|l| (l.to_string(), random_tile(rng, n, 0.25)))
        .collect();
    let top = rng.gen_range(0..n);
    let initial = (0..=top).map(State).collect();
    OrderedBuchiAutomaton::new(StateUniverse::numbered(n).unwrap(), initial, letters).unwrap()
}

pub fn random_obas(count: usize, seed: u64) -> Vec<OrderedBuchiAutomaton> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_oba(&mut rng)).collect()
}

/// The named samples followed by `random` generated ones.
pub fn test_obas(random: usize) -> Vec<(String, OrderedBuchiAutomaton)> {
    let mut out: Vec<(String, OrderedBuchiAutomaton)> = samples::oba_samples()
        .into_iter()
        .map(|(n, a)| (n.to_string(), a))
        .collect();
    for (i, a) in random_obas(random, SEED).into_iter().enumerate() {
        out.push((format!("random-{i}"), a));
    }
    out
}

pub fn arb_tile(n: usize) -> impl Strategy<Value = Tile> {
    proptest::collection::vec(proptest::bool::weighted(0.25), 2 * n * n).prop_map(move |bits| {
        let gens = all_transitions(n)
            .into_iter()
            .zip(bits)
            .filter(|(_, b)| *b)
            .map(|(d, _)| d);
        Tile::upward_closure(n, gens).unwrap()
    })
}

pub fn arb_raw_tile(n: usize) -> impl Strategy<Value = Tile> {
    proptest::collection::vec(proptest::bool::weighted(0.3), 2 * n * n).prop_map(move |bits| {
        let ts = all_transitions(n)
            .into_iter()
            .zip(bits)
            .filter(|(_, b)| *b)
            .map(|(d, _)| d);
        Tile::from_transitions(n, ts).unwrap()
    })
}
