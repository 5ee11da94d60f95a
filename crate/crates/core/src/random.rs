//! Seeded samplers for randomized test corpora and CLI experiments. All
//! randomness flows through a caller-provided RNG so corpora are
//! reproducible from a seed.

use rand::Rng;

use crate::generators::Digraph;
use crate::model::{
    Constraint, ConstraintLanguage, Instance, MapFamilyKind, Relation, UnaryMap,
};
use crate::patterns;
use crate::Budget;

pub fn random_relation(rng: &mut impl Rng, name: &str, d: usize, arity: usize, density: f64) -> Relation {
    loop {
        let cells = d.pow(arity as u32);
        let tuples: Vec<Vec<u16>> = (0..cells)
            .filter(|_| rng.gen_bool(density))
            .map(|mut i| {
                let mut t = vec![0u16; arity];
                for k in (0..arity).rev() {
                    t[k] = (i % d) as u16;
                    i /= d;
                }
                t
            })
            .collect();
        if !tuples.is_empty() {
            return Relation::new(name, d, arity, tuples).unwrap();
        }
    }
}

pub fn random_monotone_map(rng: &mut impl Rng, n: usize, d: usize) -> UnaryMap {
    let mut ts: Vec<usize> = (0..d - 1).map(|_| rng.gen_range(0..=n)).collect();
    ts.sort_unstable();
    UnaryMap::monotone(n, d, ts).unwrap()
}

pub fn random_map_in(rng: &mut impl Rng, n: usize, d: usize, family: MapFamilyKind) -> UnaryMap {
    match family {
        MapFamilyKind::Monotone => random_monotone_map(rng, n, d),
        MapFamilyKind::AntiMonotone => {
            let mut ts: Vec<usize> = (0..d - 1).map(|_| rng.gen_range(0..=n)).collect();
            ts.sort_unstable();
            UnaryMap::anti_monotone(n, d, ts).unwrap()
        }
        MapFamilyKind::MonotoneAndAnti => {
            if rng.gen_bool(0.5) {
                random_map_in(rng, n, d, MapFamilyKind::Monotone)
            } else {
                random_map_in(rng, n, d, MapFamilyKind::AntiMonotone)
            }
        }
        MapFamilyKind::OneHot => UnaryMap::one_hot(n, rng.gen_range(0..n)).unwrap(),
        MapFamilyKind::Id => UnaryMap::identity(n),
        MapFamilyKind::All => {
            let table: Vec<u16> = (0..n).map(|_| rng.gen_range(0..d) as u16).collect();
            UnaryMap::table(n, d, table).unwrap()
        }
    }
}

/// A random instance over the given language with maps from `family`.
pub fn random_instance(
    rng: &mut impl Rng,
    lang: &ConstraintLanguage,
    n: usize,
    k: usize,
    num_constraints: usize,
    family: MapFamilyKind,
) -> Instance {
    let rels = lang.relations();
    let constraints = (0..num_constraints)
        .map(|_| {
            let r = &rels[rng.gen_range(0..rels.len())];
            Constraint {
                rel: r.name().to_string(),
                vars: (0..r.arity()).map(|_| rng.gen_range(0..k)).collect(),
                maps: (0..r.arity())
                    .map(|_| random_map_in(rng, n, r.domain_size(), family))
                    .collect(),
            }
        })
        .collect();
    Instance::new(
        n,
        (0..k).map(|i| format!("v{i}")).collect(),
        lang.clone(),
        constraints,
    )
    .unwrap()
}

/// Rejection-sample a language whose relations all pass `accept`.
pub fn random_language_where(
    rng: &mut impl Rng,
    d: usize,
    arity: usize,
    size: usize,
    accept: impl Fn(&ConstraintLanguage) -> bool,
) -> ConstraintLanguage {
    loop {
        let rels: Vec<Relation> = (0..size)
            .map(|i| {
                let density = rng.gen_range(0.3..0.9);
                random_relation(rng, &format!("g{i}"), d, arity, density)
            })
            .collect();
        let lang = ConstraintLanguage::new(rels).unwrap();
        if accept(&lang) {
            return lang;
        }
    }
}

/// A binary language over `[d]` with the connector property.
pub fn random_connector_language(
    rng: &mut impl Rng,
    d: usize,
    size: usize,
    budget: &Budget,
) -> ConstraintLanguage {
    random_language_where(rng, d, 2, size, |lang| {
        patterns::check_connector(lang, budget).unwrap_or(false)
    })
}

/// A Boolean 0-valid weakly 0-separable language.
pub fn random_separable_language(rng: &mut impl Rng, size: usize) -> ConstraintLanguage {
    loop {
        let rels: Vec<Relation> = (0..size)
            .map(|i| {
                let arity = rng.gen_range(1..=3);
                let mut r = random_relation(rng, &format!("g{i}"), 2, arity, 0.5);
                // force 0-validity by adding the all-zero tuple
                let mut tuples = r.tuples().to_vec();
                tuples.push(vec![0; arity]);
                r = Relation::new(format!("g{i}"), 2, arity, tuples).unwrap();
                r
            })
            .collect();
        let lang = ConstraintLanguage::new(rels).unwrap();
        let ok = lang
            .iter()
            .all(|r| patterns::check_weak_separability(r).unwrap_or(false));
        if ok {
            return lang;
        }
    }
}

/// Seeded regression metrics shared by the CLI corpus commands and the
/// acceptance suite: the maximum grid-rank observed over solution
/// projections of {R_a} instances, and the maximum greedy contraction
/// width over Impl-threshold instances.
pub fn corpus_metrics(budget: &crate::Budget) -> crate::Result<(u64, u64)> {
    use rand::SeedableRng;
    let b = crate::model::builtin_relations();
    let ra = ConstraintLanguage::new(vec![b.get("Ra").unwrap().clone()])?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9001);
    let mut ra_max = 0u64;
    for _ in 0..500 {
        let n = rng.gen_range(2..=10);
        let cons = rng.gen_range(1..=6);
        let inst = random_instance(&mut rng, &ra, n, 3, cons, MapFamilyKind::Monotone);
        for (vi, vj) in [(0, 1), (0, 2), (1, 2)] {
            let proj = crate::solvers::solution_projection(&inst, vi, vj, budget)?;
            let mut m = crate::bits::BitMatrix::zeros(n, n);
            for t in proj.tuples() {
                m.set(t[0] as usize, t[1] as usize, true);
            }
            ra_max = ra_max.max(crate::width::grid_rank(&m, 8)? as u64);
        }
    }
    let impl_lang = ConstraintLanguage::new(vec![b.get("Impl").unwrap().clone()])?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9002);
    let mut width_max = 0u64;
    for _ in 0..100 {
        let n = rng.gen_range(3..=12);
        let cons = rng.gen_range(1..=6);
        let inst = random_instance(&mut rng, &impl_lang, n, 3, cons, MapFamilyKind::Monotone);
        let g = crate::width::assignment_graph(&inst)?;
        let (_, w) = crate::width::greedy_contraction_sequence(&g);
        width_max = width_max.max(w as u64);
    }
    Ok((ra_max, width_max))
}

/// Random DAG on `[n]` with arcs respecting the index order, plus s=0 and
/// t=n-1.
pub fn random_dag(rng: &mut impl Rng, max_vertices: usize, max_arcs: usize) -> Digraph {
    loop {
        let n = rng.gen_range(2..=max_vertices.max(2));
        let mut possible: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        // shuffle then take a prefix
        for i in (1..possible.len()).rev() {
            possible.swap(i, rng.gen_range(0..=i));
        }
        let count = rng.gen_range(1..=max_arcs.min(possible.len()));
        let arcs: Vec<(usize, usize)> = possible.into_iter().take(count).collect();
        if let Ok(g) = Digraph::new(n, arcs) {
            return g.with_st(0, n - 1).unwrap();
        }
    }
}
