//! Acceptance suite: one line per criterion.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use obuchi::convert::ParityConversion;
use obuchi::determinize::{eps_complete_det, stated_record_bound};
use obuchi::samples;
use obuchi::verify::{up_words, words_up_to, PreferenceBounds, Violation};
use obuchi::{
    candidate_records, check_eps_complete, check_local_preference, determinize, dpa_member_up, intertwine,
    npa_member_up, npa_member_up_literal, oba_member_up, omega_power_accepts, parity_to_oba, rabin_to_oba,
    record_count_bound, residual_initial_set, skeleton_oracle, OrderedBuchiAutomaton, RabinSpec, State, Tile,
    UpLanguage, UpWord,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// Random oBAs used by the determinization criteria.
const RANDOM_OBAS: usize = 60;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn internal_tile<'a>(a: &'a OrderedBuchiAutomaton, letter: &str) -> &'a Tile {
    let l = a.morphism.as_ref().and_then(|m| m.get(letter)).unwrap_or(letter);
    a.tile(l).unwrap()
}

fn words(alphabet: &[String], max_prefix: usize, max_period: usize) -> impl Iterator<Item = UpWord> {
    let prefixes = words_up_to(alphabet, 0, max_prefix);
    let periods = words_up_to(alphabet, 1, max_period);
    prefixes.into_iter().flat_map(move |u| {
        periods.clone().into_iter().map(move |v| UpWord {
            prefix: u.clone(),
            period: v,
        })
    })
}

fn monoid_laws() -> Outcome {
    let tiles = common::closed_tiles(2);
    let mut triples = 0usize;
    for a in &tiles {
        let u = Tile::unit(2);
        check(u.product(a).unwrap() == *a && a.product(&u).unwrap() == *a, || {
            format!("unit fails on {a:?}")
        })?;
        for b in &tiles {
            let ab = a.product(b).unwrap();
            check(ab.is_upward_closed(), || "product leaves the closed tiles".into())?;
            for c in &tiles {
                triples += 1;
                check(
                    ab.product(c).unwrap() == a.product(&b.product(c).unwrap()).unwrap(),
                    || format!("associativity fails on {a:?} {b:?} {c:?}"),
                )?;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(common::SEED);
    for n in [3, 4] {
        for _ in 0..500 {
            let [a, b, c] = [0; 3].map(|_| common::random_tile(&mut rng, n, 0.3));
            check(
                a.product(&b).unwrap().product(&c).unwrap() == a.product(&b.product(&c).unwrap()).unwrap(),
                || format!("associativity fails for |Q|={n}"),
            )?;
            let u = Tile::unit(n);
            check(u.product(&a).unwrap() == a && a.product(&u).unwrap() == a, || {
                format!("unit fails for |Q|={n}")
            })?;
        }
    }
    Ok(format!(
        "{} closed tiles, {triples} exhaustive triples, 1000 random triples",
        tiles.len()
    ))
}

fn skeletons() -> Outcome {
    let tiles = common::closed_tiles(2);
    let mut rng = ChaCha8Rng::seed_from_u64(common::SEED + 1);
    let random: Vec<Tile> = (0..200).map(|_| common::random_tile(&mut rng, 3, 0.25)).collect();
    for t in tiles.iter().chain(&random) {
        let sk = t.skeleton();
        check(sk == skeleton_oracle(t), || {
            format!("skeleton differs from oracle on {t:?}")
        })?;
        check(sk.closure() == *t, || format!("closure of skeleton differs on {t:?}"))?;
    }
    Ok(format!("{} exhaustive + 200 random tiles", tiles.len()))
}

fn test_instances() -> Vec<(String, OrderedBuchiAutomaton)> {
    common::test_obas(RANDOM_OBAS)
}

fn determinization(instances: &[(String, OrderedBuchiAutomaton)]) -> Outcome {
    let mut count = 0usize;
    for (name, a) in instances {
        let d = determinize(a);
        let alphabet = a.external_alphabet();
        for w in words(&alphabet, 3, 4) {
            count += 1;
            let (l, r) = (oba_member_up(a, &w).unwrap(), dpa_member_up(&d.automaton, &w).unwrap());
            check(l == r, || format!("{name}: {w} oBA {l}, determinized {r}"))?;
        }
    }
    Ok(format!("{} automata, {count} word checks", instances.len()))
}

fn state_bound(instances: &[(String, OrderedBuchiAutomaton)]) -> Outcome {
    let mut above_stated = 0usize;
    let mut largest = 0usize;
    for (name, a) in instances {
        let n = a.size();
        let reached = determinize(a).state_count();
        let bound = record_count_bound(n).unwrap();
        check(reached as u64 <= bound, || {
            format!("{name}: {reached} records > {bound}")
        })?;
        if reached as u64 > stated_record_bound(n).unwrap() {
            above_stated += 1;
        }
        largest = largest.max(reached);
    }
    Ok(format!(
        "largest {largest} records; bounds for n=1,2,3: {} {} {}; the bound sum_(i=1)^(n-1) i! is exceeded by {above_stated} of {} automata",
        record_count_bound(1).unwrap(),
        record_count_bound(2).unwrap(),
        record_count_bound(3).unwrap(),
        instances.len()
    ))
}

fn rabin() -> Outcome {
    let mut count = 0usize;
    for (name, spec) in [
        ("two-pair", samples::rabin_two_pair()),
        ("nine-letter", samples::rabin_nine_letter()),
    ] {
        let (oba, _) = rabin_to_oba(&spec).unwrap();
        for w in words(&spec.alphabet, 2, 4) {
            count += 1;
            let (l, r) = (oba_member_up(&oba, &w).unwrap(), RabinSpec::accepts(&spec, &w).unwrap());
            check(l == r, || format!("{name}: {w} oBA {l}, Rabin {r}"))?;
        }
    }
    Ok(format!("{count} word checks"))
}

fn parity_translation() -> Outcome {
    let samples = samples::eps_complete_samples();
    let mut count = 0usize;
    for (name, p) in &samples {
        let ParityConversion { oba, eps_tile, .. } = parity_to_oba(p).map_err(|e| format!("{name}: {e}"))?;
        let k = ((p.index.1 + 1) / 2) as usize;
        check(oba.size() <= k * p.size(), || {
            format!("{name}: {} states > {k}·{}", oba.size(), p.size())
        })?;
        check(eps_tile == Tile::unit(oba.size()), || {
            format!("{name}: f(ε) is not the unit")
        })?;
        for w in words(&p.alphabet, 2, 3) {
            count += 1;
            let (l, r) = (npa_member_up(p, &w).unwrap(), oba_member_up(&oba, &w).unwrap());
            check(l == r, || format!("{name}: {w} parity {l}, oBA {r}"))?;
        }
    }
    Ok(format!("{} automata, {count} word checks", samples.len()))
}

fn eps_completion(instances: &[(String, OrderedBuchiAutomaton)]) -> Outcome {
    let mut count = 0usize;
    let mut closure_disagreements = 0usize;
    for (name, a) in instances {
        let p = eps_complete_det(&determinize(a));
        let report = check_eps_complete(&p).unwrap();
        check(report.passed(), || format!("{name}: {}", report.first().unwrap()))?;
        for w in words(&a.external_alphabet(), 2, 3) {
            count += 1;
            let l = oba_member_up(a, &w).unwrap();
            let r = npa_member_up_literal(&p, &intertwine(&w)).unwrap();
            check(l == r, || format!("{name}: {w} oBA {l}, intertwined {r}"))?;
            if npa_member_up(&p, &w).unwrap() != l {
                closure_disagreements += 1;
            }
        }
    }
    Ok(format!(
        "{} automata, {count} word checks; ε-closure reading differs on {closure_disagreements}",
        instances.len()
    ))
}

fn positionality(instances: &[(String, OrderedBuchiAutomaton)]) -> Outcome {
    let mut checked = 0usize;
    for (name, a) in instances {
        let report = check_local_preference(
            |w| oba_member_up(a, w),
            &a.external_alphabet(),
            PreferenceBounds::default(),
        )
        .unwrap();
        check(report.is_clean(), || format!("{name}: {}", report.violations[0]))?;
        checked += report.instances;
    }
    let g = samples::gen_buchi_ab();
    let report = check_local_preference(|w| g.accepts(w), &g.alphabet, PreferenceBounds::default()).unwrap();
    let expected = Violation::Period {
        u: vec![],
        v: vec!["a".into()],
        v2: vec!["b".into()],
    };
    check(report.first_of(3) == Some(&expected), || {
        format!("generalized Büchi: expected {expected}, got {:?}", report.first_of(3))
    })?;
    Ok(format!(
        "{} clean reports over {checked} instances; witness {expected}",
        instances.len()
    ))
}

fn omega_powers(instances: &[(String, OrderedBuchiAutomaton)]) -> Outcome {
    let mut count = 0usize;
    for (name, a) in instances {
        let alphabet = a.external_alphabet();
        for v in words_up_to(&alphabet, 1, 3) {
            let mut t = Tile::unit(a.size());
            for l in &v {
                t = t.product(internal_tile(a, l)).unwrap();
            }
            let w = UpWord {
                prefix: vec![],
                period: v,
            };
            count += 1;
            let (l, r) = (omega_power_accepts(a, &t), oba_member_up(a, &w).unwrap());
            check(l == r, || format!("{name}: {w} criterion {l}, membership {r}"))?;
        }
    }
    Ok(format!("{count} tiles (letters and products up to length 3)"))
}

fn optimality(instances: &[(String, OrderedBuchiAutomaton)]) -> Outcome {
    let mut sizes = Vec::new();
    for n in [2, 3] {
        let a = samples::horizontal_complete_oba(n);
        let reached: BTreeSet<_> = determinize(&a).records.into_iter().collect();
        let expected = candidate_records(&a);
        check(reached == expected, || {
            format!(
                "|Q|={n}: {} reachable records, {} candidates",
                reached.len(),
                expected.len()
            )
        })?;
        sizes.push(format!(
            "|Q|={n}: {} letters, {} records",
            a.letters.len(),
            reached.len()
        ));
    }
    for (name, a) in instances {
        let candidates = candidate_records(a);
        let d = determinize(a);
        check(d.records.iter().all(|r| candidates.contains(r)), || {
            format!("{name}: a reachable record is outside S_R")
        })?;
    }
    Ok(sizes.join("; "))
}

fn residual_order(instances: &[(String, OrderedBuchiAutomaton)]) -> Outcome {
    let mut pairs = 0usize;
    for (name, a) in instances {
        let alphabet = a.external_alphabet();
        let prefixes = words_up_to(&alphabet, 0, 3);
        let mut sets = Vec::new();
        let mut langs = Vec::new();
        let tests = up_words(&alphabet, 1, 3);
        for u in &prefixes {
            let mut reach: BTreeSet<State> = a.initial.clone();
            for l in u {
                reach = internal_tile(a, l).successors(&reach);
            }
            let s = residual_initial_set(a, u).unwrap();
            check(s == reach, || {
                format!("{name}: residual set after {u:?} differs from the reachable set")
            })?;
            sets.push(s);
            let lang: Vec<bool> = tests
                .iter()
                .map(|w| {
                    let mut prefix = u.clone();
                    prefix.extend(w.prefix.iter().cloned());
                    oba_member_up(
                        a,
                        &UpWord {
                            prefix,
                            period: w.period.clone(),
                        },
                    )
                    .unwrap()
                })
                .collect();
            langs.push(lang);
        }
        for i in 0..prefixes.len() {
            for j in i + 1..prefixes.len() {
                pairs += 1;
                let (x, y) = (&sets[i], &sets[j]);
                check(x.is_subset(y) || y.is_subset(x), || {
                    format!(
                        "{name}: sets after {:?} and {:?} are incomparable",
                        prefixes[i], prefixes[j]
                    )
                })?;
                let le = langs[i].iter().zip(&langs[j]).all(|(p, q)| !p || *q);
                let ge = langs[i].iter().zip(&langs[j]).all(|(p, q)| *p || !q);
                check(le || ge, || {
                    format!(
                        "{name}: residuals after {:?} and {:?} are incomparable",
                        prefixes[i], prefixes[j]
                    )
                })?;
            }
        }
    }
    Ok(format!("{pairs} prefix pairs"))
}

fn main() {
    let instances = test_instances();
    type Criterion<'a> = (u32, &'a str, Duration, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        (1, "monoid laws", Duration::from_secs(30), Box::new(monoid_laws)),
        (2, "skeleton correctness", Duration::from_secs(30), Box::new(skeletons)),
        (
            3,
            "determinization correctness",
            Duration::from_secs(300),
            Box::new(|| determinization(&instances)),
        ),
        (
            4,
            "state bound",
            Duration::from_secs(10),
            Box::new(|| state_bound(&instances)),
        ),
        (5, "Rabin agreement", Duration::from_secs(60), Box::new(rabin)),
        (
            6,
            "parity translation",
            Duration::from_secs(120),
            Box::new(parity_translation),
        ),
        (
            7,
            "ε-completion",
            Duration::from_secs(120),
            Box::new(|| eps_completion(&instances)),
        ),
        (
            8,
            "positionality conditions",
            Duration::from_secs(120),
            Box::new(|| positionality(&instances)),
        ),
        (
            9,
            "t^ω criterion",
            Duration::from_secs(10),
            Box::new(|| omega_powers(&instances)),
        ),
        (
            10,
            "optimal state set",
            Duration::from_secs(120),
            Box::new(|| optimality(&instances)),
        ),
        (
            11,
            "residual total order",
            Duration::from_secs(30),
            Box::new(|| residual_order(&instances)),
        ),
    ];
    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > limit => Err(format!("{detail}; over the {}s limit", limit.as_secs())),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {id:>2} {name} ({:.2}s): {detail}", elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL {id:>2} {name} ({:.2}s): {why}", elapsed.as_secs_f64());
            }
        }
    }
    println!("{} of 11 criteria passed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
