//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line. Randomized criteria are fully seeded and compare against
//! independent oracles (brute-force enumeration, direct combinatorial
//! checks).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use udcsp_core::definability::{fgpp_definable, formula_to_relation};
use udcsp_core::generators;
use udcsp_core::model::{
    builtin_relations, Assignment, ConstraintLanguage, Instance, MapFamilyKind, Relation,
};
use udcsp_core::patterns;
use udcsp_core::random::{
    corpus_metrics, random_connector_language, random_instance, random_language_where,
    random_separable_language,
};
use udcsp_core::solvers::{self, MinMax, SolveResult};
use udcsp_core::width::{
    self, assignment_graph, exact_min_twinwidth, grid_rank, greedy_contraction_sequence,
    random_contraction_sequence,
};
use udcsp_core::{bits::BitMatrix, Budget};

fn criterion(n: usize, ok: bool, desc: &str) {
    println!(
        "acceptance criterion {n}: {} - {desc}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {n} failed: {desc}");
}

fn budget() -> Budget {
    Budget::default()
}

fn check_against_oracle(inst: &Instance, result: &SolveResult, budget: &Budget) -> bool {
    let oracle = solvers::solve_bruteforce(inst, budget).unwrap();
    if oracle.is_sat() != result.is_sat() {
        eprintln!(
            "disagreement ({}): oracle {:?}, solver {:?}\n{}",
            result.solver,
            oracle.status,
            result.status,
            serde_json::to_string(inst).unwrap()
        );
        return false;
    }
    if let Some(w) = &result.witness {
        if !inst.eval(w).unwrap() {
            return false;
        }
    }
    result.is_sat() == result.witness.is_some()
}

/// Criterion 1: each solver agrees with the brute-force oracle on 1000
/// seeded in-scope instances (n <= 8, k <= 4, <= 12 constraints), with
/// verifying witnesses.
#[test]
fn criterion_1_oracle_equivalence() {
    let budget = budget();
    let b = builtin_relations();
    let mut ok = true;

    // minmax: pool of min-closed languages
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let pool: Vec<ConstraintLanguage> = (0..25)
        .map(|_| {
            let d = rng.gen_range(2..=3);
            random_language_where(&mut rng, d, 2, 2, |l| {
                patterns::check_min(l, &budget).unwrap_or(false)
            })
        })
        .collect();
    for i in 0..1000 {
        let lang = &pool[i % pool.len()];
        let n = rng.gen_range(1..=8);
        let k = rng.gen_range(1..=4);
        let c = rng.gen_range(0..=12);
        let inst = random_instance(&mut rng, lang, n, k, c, MapFamilyKind::Monotone);
        let r = solvers::solve_minmax(&inst, MinMax::Min, &budget).unwrap();
        ok &= check_against_oracle(&inst, &r, &budget);
    }

    // sac-median: pool of median-closed languages
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let pool: Vec<ConstraintLanguage> = (0..20)
        .map(|_| {
            let d = rng.gen_range(2..=3);
            random_language_where(&mut rng, d, 2, 1, |l| {
                patterns::check_median(l, &budget).unwrap_or(false)
            })
        })
        .collect();
    for i in 0..1000 {
        let lang = &pool[i % pool.len()];
        let n = rng.gen_range(1..=8);
        let k = rng.gen_range(1..=4);
        let c = rng.gen_range(0..=12);
        let inst = random_instance(&mut rng, lang, n, k, c, MapFamilyKind::Monotone);
        let r = solvers::solve_sac_median(&inst, &budget).unwrap();
        ok &= check_against_oracle(&inst, &r, &budget);
    }

    // onehot-2sat: the Or2/0/1 language under one-hot maps
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let or_lang = ConstraintLanguage::new(vec![
        b.get("Or2").unwrap().clone(),
        b.get("C0").unwrap().clone(),
        b.get("C1").unwrap().clone(),
    ])
    .unwrap();
    for _ in 0..1000 {
        let n = rng.gen_range(1..=8);
        let k = rng.gen_range(1..=4);
        let c = rng.gen_range(0..=12);
        let inst = random_instance(&mut rng, &or_lang, n, k, c, MapFamilyKind::OneHot);
        let r = solvers::solve_onehot_2sat(&inst, &budget).unwrap();
        ok &= check_against_oracle(&inst, &r, &budget);
    }

    // onehot-fpt: weakly separable languages (0-valid or not)
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let pool: Vec<ConstraintLanguage> = (0..20)
        .map(|i| {
            if i % 2 == 0 {
                random_separable_language(&mut rng, 2)
            } else {
                let arity = rng.gen_range(1..=3);
                random_language_where(&mut rng, 2, arity, 2, |l| {
                    patterns::check_weak_separability_language(l).unwrap_or(false)
                })
            }
        })
        .collect();
    for i in 0..1000 {
        let lang = &pool[i % pool.len()];
        let n = rng.gen_range(1..=8);
        let k = rng.gen_range(1..=4);
        let c = rng.gen_range(0..=12);
        let inst = random_instance(&mut rng, lang, n, k, c, MapFamilyKind::OneHot);
        let r = solvers::solve_onehot_fpt(&inst, &budget).unwrap();
        ok &= check_against_oracle(&inst, &r, &budget);
    }

    // twin-width DP over greedy sequences: arbitrary binary languages
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let pool: Vec<ConstraintLanguage> = (0..20)
        .map(|_| {
            let d = rng.gen_range(2..=4);
            random_language_where(&mut rng, d, 2, 2, |_| true)
        })
        .collect();
    for i in 0..1000 {
        let lang = &pool[i % pool.len()];
        let n = rng.gen_range(1..=8);
        let k = rng.gen_range(1..=4);
        let c = rng.gen_range(0..=12);
        let inst = random_instance(&mut rng, lang, n, k, c, MapFamilyKind::All);
        let g = assignment_graph(&inst).unwrap();
        let (seq, _) = greedy_contraction_sequence(&g);
        let r = solvers::solve_twinwidth_dp(&inst, &seq, &budget).unwrap();
        ok &= check_against_oracle(&inst, &r, &budget);
    }

    criterion(1, ok, "5 x 1000 seeded instances agree with the oracle");
}

/// Criterion 2: pattern ground truth with exact witnesses.
#[test]
fn criterion_2_pattern_ground_truth() {
    let budget = budget();
    let b = builtin_relations();
    let lang = |name: &str| ConstraintLanguage::new(vec![b.get(name).unwrap().clone()]).unwrap();

    let mut ok = true;
    let w = patterns::check_connector_witness(&lang("R3"), &budget)
        .unwrap()
        .expect("R3 must fail the connector check");
    ok &= w.1.inputs
        == vec![
            vec![0, 0],
            vec![0, 2],
            vec![1, 1],
            vec![2, 0],
            vec![2, 2],
        ]
        && w.1.output == vec![0, 1];
    for name in ["Ra", "Rb", "Rc"] {
        ok &= patterns::check_connector(&lang(name), &budget).unwrap();
    }
    ok &= !patterns::check_weak_separability(b.get("Nand2").unwrap()).unwrap();
    // the violating 0-union: 01 and 10 are 0-disjoint with union 11
    let nand2 = b.get("Nand2").unwrap();
    ok &= nand2.contains(&[0, 1]) && nand2.contains(&[1, 0]) && !nand2.contains(&[1, 1]);
    for m in 2..=4 {
        ok &= patterns::check_weak_separability(b.get(&format!("Even{m}")).unwrap()).unwrap();
    }
    criterion(2, ok, "connector and separability verdicts with exact witnesses");
}

/// Criterion 3: definability ground truth.
#[test]
fn criterion_3_definability_ground_truth() {
    let budget = budget();
    let b = builtin_relations();
    let r3_lang = ConstraintLanguage::new(vec![b.get("R3").unwrap().clone()]).unwrap();
    let mut ok = true;

    // every permutation graph on [n], n <= 5, from {R3} with monotone maps
    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 1 {
            return vec![vec![0]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..n {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }
    for n in 1..=5usize {
        for perm in permutations(n) {
            let graph = Relation::new(
                "perm",
                n,
                2,
                perm.iter().enumerate().map(|(i, &v)| vec![i as u16, v as u16]),
            )
            .unwrap();
            match fgpp_definable(&r3_lang, MapFamilyKind::Monotone, &graph, &budget).unwrap() {
                Some(f) => {
                    let eval = formula_to_relation(&f, n).unwrap();
                    if !eval.same_content(&graph) {
                        ok = false;
                    }
                }
                None => ok = false,
            }
        }
    }

    // R_n and H_n from {R_D, Impl} with monotone and anti-monotone maps
    let rd_lang = ConstraintLanguage::new(vec![
        b.get("RD").unwrap().clone(),
        b.get("Impl").unwrap().clone(),
    ])
    .unwrap();
    for n in [4usize, 6, 8] {
        let (diamond, _) = generators::gen_diamond(n).unwrap();
        let (half, _) = generators::gen_halfgraph(n).unwrap();
        for target in [diamond, half] {
            match fgpp_definable(&rd_lang, MapFamilyKind::MonotoneAndAnti, &target, &budget)
                .unwrap()
            {
                Some(f) => {
                    let eval = formula_to_relation(&f, n).unwrap();
                    if !eval.same_content(&target) {
                        ok = false;
                    }
                }
                None => ok = false,
            }
        }
    }

    // the displayed 8x8 diamond matrix, entry for entry
    let (d8, _) = generators::gen_diamond(8).unwrap();
    let display = [
        "00011000", "00100100", "01000010", "10000001", "10000001", "01000010", "00100100",
        "00011000",
    ];
    for (i, row) in display.iter().enumerate() {
        for (j, c) in row.chars().enumerate() {
            ok &= d8.contains(&[i as u16, j as u16]) == (c == '1');
        }
    }
    criterion(3, ok, "permutations from R3, diamonds and half-graphs from {R_D, Impl}");
}

/// Criterion 4: over connector-preserved binary languages with base domain
/// d in {2,3}, every assignment-graph label matrix has grid-rank <= 2d.
#[test]
fn criterion_4_grid_rank_bound() {
    let budget = budget();
    let mut rng = ChaCha8Rng::seed_from_u64(4001);
    let mut ok = true;
    let mut pools: Vec<(usize, Vec<ConstraintLanguage>)> = Vec::new();
    for d in [2usize, 3] {
        let langs: Vec<ConstraintLanguage> = (0..10)
            .map(|_| random_connector_language(&mut rng, d, 2, &budget))
            .collect();
        pools.push((d, langs));
    }
    for i in 0..200 {
        let (d, langs) = &pools[i % 2];
        let lang = &langs[(i / 2) % langs.len()];
        let n = rng.gen_range(2..=32);
        let k = rng.gen_range(2..=4);
        let c = rng.gen_range(1..=8);
        let inst = random_instance(&mut rng, lang, n, k, c, MapFamilyKind::Monotone);
        let g = assignment_graph(&inst).unwrap();
        for v in 0..k {
            for w in 0..k {
                if v == w {
                    continue;
                }
                let gr = grid_rank(g.pair(v, w), 2 * d + 1).unwrap();
                if gr > 2 * d {
                    eprintln!("grid rank {gr} > {} at d={d}", 2 * d);
                    ok = false;
                }
            }
        }
    }
    criterion(4, ok, "label matrices of connector languages have grid-rank <= 2d");
}

/// Criterion 5: solution counts of min-cut encodings equal the number of
/// directly enumerated st-min cuts on 100 seeded random DAGs.
#[test]
fn criterion_5_mincut_bijection() {
    let budget = budget();
    let mut rng = ChaCha8Rng::seed_from_u64(5001);
    let mut ok = true;
    for _ in 0..100 {
        let g = udcsp_core::random::random_dag(&mut rng, 6, 10);
        let inst = generators::gen_mincut(&g, &[]).unwrap();
        let sols = solvers::count_solutions(&inst, &budget).unwrap();
        let cuts =
            generators::enumerate_min_cuts(&g, g.s.unwrap(), g.t.unwrap()).len() as u64;
        if sols != cuts {
            eprintln!("bijection broken: {sols} vs {cuts} on {:?}", g.arcs);
            ok = false;
        }
    }
    criterion(5, ok, "min-cut encodings count exactly the st-min cuts");
}

/// Criterion 6: on 0-valid weakly separable one-hot instances, the
/// brute-forced satisfying set over the null-extended domain equals the
/// closure of the minimal assignments under disjoint null-union.
#[test]
fn criterion_6_minimal_assignment_structure() {
    let budget = budget();
    let mut rng = ChaCha8Rng::seed_from_u64(6001);
    let mut ok = true;
    let pool: Vec<ConstraintLanguage> =
        (0..20).map(|_| random_separable_language(&mut rng, 2)).collect();
    for i in 0..200 {
        let lang = &pool[i % pool.len()];
        let n = rng.gen_range(1..=6);
        let k = rng.gen_range(1..=3);
        let c = rng.gen_range(1..=5);
        let inst = random_instance(&mut rng, lang, n, k, c, MapFamilyKind::OneHot);
        let minimal: Vec<Vec<Option<u16>>> =
            solvers::enumerate_minimal_assignments(&inst, &budget)
                .unwrap()
                .into_iter()
                .map(|a| a.values)
                .collect();

        // closure under disjoint null-union, starting from the trivial
        // assignment
        let mut closure: std::collections::HashSet<Vec<Option<u16>>> =
            std::collections::HashSet::from([vec![None; k]]);
        let mut frontier: Vec<Vec<Option<u16>>> = closure.iter().cloned().collect();
        while let Some(f) = frontier.pop() {
            for m in &minimal {
                if m.iter().zip(&f).all(|(a, b)| a.is_none() || b.is_none()) {
                    let merged: Vec<Option<u16>> = m
                        .iter()
                        .zip(&f)
                        .map(|(a, b)| a.or(*b))
                        .collect();
                    if closure.insert(merged.clone()) {
                        frontier.push(merged);
                    }
                }
            }
        }

        // brute-forced satisfying set over ([n] u {null})^k
        let mut satisfying = std::collections::HashSet::new();
        let mut idx = vec![0usize; k];
        loop {
            let values: Vec<Option<u16>> = idx
                .iter()
                .map(|&i| if i == n { None } else { Some(i as u16) })
                .collect();
            let total_ok = inst
                .constraints
                .iter()
                .all(|c| {
                    let r = inst.relation_of(c);
                    let image: Vec<u16> = c
                        .vars
                        .iter()
                        .zip(&c.maps)
                        .map(|(&v, m)| match values[v] {
                            Some(x) => m.apply(x).unwrap(),
                            None => 0,
                        })
                        .collect();
                    r.contains(&image)
                });
            if total_ok {
                satisfying.insert(values);
            }
            let mut p = k;
            let done = loop {
                if p == 0 {
                    break true;
                }
                p -= 1;
                idx[p] += 1;
                if idx[p] <= n {
                    break false;
                }
                idx[p] = 0;
            };
            if done {
                break;
            }
        }
        if closure != satisfying {
            eprintln!(
                "closure mismatch on {}",
                serde_json::to_string(&inst).unwrap()
            );
            ok = false;
        }
    }
    criterion(6, ok, "satisfying sets are disjoint unions of minimal assignments");
}

/// Criterion 7: the twin-width DP verdict is identical across greedy,
/// exact-optimal, and random contraction sequences (and matches the
/// oracle).
#[test]
fn criterion_7_dp_sequence_independence() {
    let budget = budget();
    let mut rng = ChaCha8Rng::seed_from_u64(7001);
    let mut ok = true;
    let pool: Vec<ConstraintLanguage> = (0..20)
        .map(|_| {
            let d = rng.gen_range(2..=3);
            random_language_where(&mut rng, d, 2, 2, |_| true)
        })
        .collect();
    for i in 0..200 {
        let lang = &pool[i % pool.len()];
        let n = rng.gen_range(2..=8);
        let k = rng.gen_range(1..=3);
        let c = rng.gen_range(1..=6);
        let inst = random_instance(&mut rng, lang, n, k, c, MapFamilyKind::Monotone);
        let g = assignment_graph(&inst).unwrap();
        let (greedy_seq, greedy_w) = greedy_contraction_sequence(&g);
        let (exact_seq, _) = exact_min_twinwidth(&g, greedy_w).unwrap().unwrap();
        let random_seq = random_contraction_sequence(n, &mut rng);
        let verdicts: Vec<bool> = [greedy_seq, exact_seq, random_seq]
            .iter()
            .map(|seq| {
                solvers::solve_twinwidth_dp(&inst, seq, &budget)
                    .unwrap()
                    .is_sat()
            })
            .collect();
        let oracle = solvers::solve_bruteforce(&inst, &budget).unwrap().is_sat();
        if !verdicts.iter().all(|&v| v == oracle) {
            eprintln!("sequence dependence: {verdicts:?} vs oracle {oracle}");
            ok = false;
        }
    }
    criterion(7, ok, "DP verdict is contraction-sequence independent");
}

/// Criterion 8: the Sidon construction passes the distinct-sums check for
/// n <= 50 and stays below 2p^2.
#[test]
fn criterion_8_sidon_construction() {
    let mut ok = true;
    for n in 1..=50usize {
        match generators::sidon_set(n) {
            Ok(set) => {
                ok &= set.len() == n;
                ok &= generators::verify_sidon(&set).is_ok();
                let p = generators::sidon_prime(n);
                ok &= set.iter().max().copied().unwrap_or(0) <= 2 * p * p;
            }
            Err(e) => {
                eprintln!("sidon_set({n}) failed: {e}");
                ok = false;
            }
        }
    }
    criterion(8, ok, "Sidon sets verified for all n <= 50");
}

/// Pinned on the first run of the seeded experiments (seeds 9001/9002);
/// any later run exceeding these values is a regression.
const RA_PROJECTION_GRIDRANK_PIN: u64 = 1;
const IMPL_GREEDY_WIDTH_PIN: u64 = 3;

/// Criterion 9: grid-rank of solution projections over {R_a} instances
/// never exceeds the corpus pin, while R3-generated permutations show
/// growing grid-rank (>= 2 at n = 16).
#[test]
fn criterion_9_projection_monitoring() {
    let budget = budget();
    let (ra_max, width_max) = corpus_metrics(&budget).unwrap();
    let mut ok = ra_max <= RA_PROJECTION_GRIDRANK_PIN;
    if !ok {
        eprintln!("{{R_a}} projection grid-rank regressed: {ra_max} > {RA_PROJECTION_GRIDRANK_PIN}");
    }
    if width_max > IMPL_GREEDY_WIDTH_PIN {
        eprintln!("Impl greedy width regressed: {width_max} > {IMPL_GREEDY_WIDTH_PIN}");
        ok = false;
    }

    // direction check: permutations over R3 exhibit grid-rank growth
    let mut grid_perm: Vec<usize> = Vec::new();
    for i in 0..16usize {
        grid_perm.push((i % 4) * 4 + i / 4);
    }
    let (_, inst) = generators::gen_permutation_via_r3(&grid_perm).unwrap();
    let proj = solvers::solution_projection(&inst, 0, 1, &budget).unwrap();
    let mut m = BitMatrix::zeros(16, 16);
    for t in proj.tuples() {
        m.set(t[0] as usize, t[1] as usize, true);
    }
    let k = grid_rank(&m, 4).unwrap();
    if k < 2 {
        eprintln!("R3 permutation projection grid-rank {k} < 2 at n=16");
        ok = false;
    }
    criterion(9, ok, "projection grid-rank stays at the pin; R3 permutations grow");
}

/// The witness invariant behind every SAT answer: assignments returned by
/// any solver satisfy the instance (spot-checked across the dispatcher).
#[test]
fn solve_auto_random_spot_check() {
    let budget = budget();
    let mut rng = ChaCha8Rng::seed_from_u64(424242);
    let b = builtin_relations();
    let mixed = ConstraintLanguage::new(vec![
        b.get("Impl").unwrap().clone(),
        b.get("R3").unwrap().clone(),
        b.get("C0").unwrap().clone(),
    ])
    .unwrap();
    for _ in 0..100 {
        let n = rng.gen_range(1..=6);
        let k = rng.gen_range(1..=3);
        let c = rng.gen_range(0..=6);
        let inst = random_instance(&mut rng, &mixed, n, k, c, MapFamilyKind::Monotone);
        let auto = solvers::solve_auto(&inst, &budget).unwrap();
        let oracle = solvers::solve_bruteforce(&inst, &budget).unwrap();
        assert_eq!(auto.is_sat(), oracle.is_sat());
        if let Some(w) = &auto.witness {
            assert!(inst.eval(w).unwrap());
        }
    }
}

/// Weighted DP regression: min weight equals the brute-force minimum.
#[test]
fn weighted_dp_matches_bruteforce_minimum() {
    let budget = budget();
    let mut rng = ChaCha8Rng::seed_from_u64(515151);
    let pool: Vec<ConstraintLanguage> = (0..10)
        .map(|_| random_language_where(&mut rng, 2, 2, 2, |_| true))
        .collect();
    for i in 0..100 {
        let lang = &pool[i % pool.len()];
        let n = rng.gen_range(2..=5);
        let k = rng.gen_range(1..=3);
        let c = rng.gen_range(1..=5);
        let mut inst = random_instance(&mut rng, lang, n, k, c, MapFamilyKind::Monotone);
        inst.weights = Some(
            (0..k)
                .map(|_| (0..n).map(|_| rng.gen_range(0..20u64)).collect())
                .collect(),
        );
        let g = assignment_graph(&inst).unwrap();
        let (seq, _) = greedy_contraction_sequence(&g);
        let dp = solvers::solve_twinwidth_dp_weighted(&inst, &seq, &budget).unwrap();

        // brute force minimum
        let mut best: Option<u64> = None;
        let mut values = vec![0u16; k];
        loop {
            let a = Assignment::total(values.clone());
            if inst.eval(&a).unwrap() {
                let w: u64 = (0..k)
                    .map(|v| inst.weights.as_ref().unwrap()[v][values[v] as usize])
                    .sum();
                best = Some(best.map_or(w, |b| b.min(w)));
            }
            let mut pos = k;
            let done = loop {
                if pos == 0 {
                    break true;
                }
                pos -= 1;
                values[pos] += 1;
                if (values[pos] as usize) < n {
                    break false;
                }
                values[pos] = 0;
            };
            if done {
                break;
            }
        }
        assert_eq!(dp.min_weight, best, "instance {i}");
        assert_eq!(dp.is_sat(), best.is_some());
    }
}

/// Generators stay self-checking on randomized inputs.
#[test]
fn generator_verifiers_randomized() {
    let budget = budget();
    let mut rng = ChaCha8Rng::seed_from_u64(616161);
    for _ in 0..100 {
        let g = udcsp_core::random::random_dag(&mut rng, 6, 9);
        generators::verify_mincut(&g, &budget).unwrap();
    }
    for _ in 0..100 {
        let n = rng.gen_range(1..=5);
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        generators::verify_permutation_via_r3(&perm, &budget).unwrap();
        generators::verify_even4_permutation(&perm, &budget).unwrap();
    }
    for _ in 0..100 {
        let k = rng.gen_range(1..=3);
        let universe = rng.gen_range(3..=6);
        let sets: Vec<Vec<usize>> = (0..k)
            .map(|_| {
                let mut u: Vec<usize> = (0..universe).collect();
                for i in (1..u.len()).rev() {
                    u.swap(i, rng.gen_range(0..=i));
                }
                u.truncate(3);
                u.sort_unstable();
                u
            })
            .collect();
        generators::verify_exact_3hs(&sets, &budget).unwrap();
    }
    for _ in 0..100 {
        let n = rng.gen_range(2..=5);
        let k = rng.gen_range(1..=3);
        let clauses: Vec<generators::NaeClause> = (0..rng.gen_range(1..=4))
            .map(|_| {
                [
                    (rng.gen_range(0..k), rng.gen_range(0..n)),
                    (rng.gen_range(0..k), rng.gen_range(0..n)),
                    (rng.gen_range(0..k), rng.gen_range(0..n)),
                ]
            })
            .collect();
        generators::verify_nae(&clauses, n, k, &budget).unwrap();
    }
    for _ in 0..50 {
        let g = udcsp_core::random::random_dag(&mut rng, 5, 8);
        let k = rng.gen_range(2..=4);
        let coloring: Vec<usize> = (0..g.num_vertices).map(|v| v % k).collect();
        // make the coloring proper by dropping intra-class arcs
        let arcs: Vec<(usize, usize)> = g
            .arcs
            .iter()
            .copied()
            .filter(|&(u, v)| coloring[u] != coloring[v])
            .collect();
        if coloring.iter().filter(|&&c| c == k - 1).count() == 0 {
            continue;
        }
        let g = generators::Digraph::new(g.num_vertices, arcs).unwrap();
        generators::verify_multicoloured_clique(&g, k, &coloring, &budget).unwrap();
    }
    for n in [2, 4, 6, 8, 10] {
        generators::verify_diamond(n).unwrap();
    }
    for n in 1..=8 {
        generators::verify_halfgraph(n).unwrap();
    }
}
