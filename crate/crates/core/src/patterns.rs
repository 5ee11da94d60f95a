//! Polymorphism patterns, their interpretation over concrete domains via
//! map families, and the preservation checks driving language
//! classification.
//!
//! A pattern is a partial multivalued operation over an abstract ordered
//! domain `[p]`. Interpreting it over `[d]` through a map family takes the
//! union, over all family maps `m: [p] -> [d]`, of the images of each
//! pattern entry: from `f(x_1,..,x_k) ∋ y` we get
//! `f_m(m(x_1),..,m(x_k)) ∋ m(y)`.

use std::time::Instant;

use serde::Serialize;

use crate::definability;
use crate::model::{ConstraintLanguage, MapFamilyKind, Relation};
use crate::{Budget, Error, Result};

/// Partial multivalued polymorphism pattern over `[p]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    arity: usize,
    domain_size: usize,
    entries: Vec<(Vec<u16>, u16)>,
}

impl Pattern {
    pub fn new(
        arity: usize,
        domain_size: usize,
        entries: impl IntoIterator<Item = (Vec<u16>, u16)>,
    ) -> Result<Pattern> {
        let mut es: Vec<(Vec<u16>, u16)> = Vec::new();
        for (input, out) in entries {
            if input.len() != arity {
                return Err(Error::invalid("pattern entry arity mismatch"));
            }
            if input.iter().chain([&out]).any(|&v| v as usize >= domain_size) {
                return Err(Error::invalid("pattern entry out of domain"));
            }
            es.push((input, out));
        }
        es.sort();
        es.dedup();
        Ok(Pattern {
            arity,
            domain_size,
            entries: es,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn entries(&self) -> &[(Vec<u16>, u16)] {
        &self.entries
    }

    /// min(0,1) = min(1,0) = 0
    pub fn min() -> Pattern {
        Pattern::new(2, 2, vec![(vec![0, 1], 0), (vec![1, 0], 0)]).unwrap()
    }

    /// max(0,1) = max(1,0) = 1
    pub fn max() -> Pattern {
        Pattern::new(2, 2, vec![(vec![0, 1], 1), (vec![1, 0], 1)]).unwrap()
    }

    /// median over every ordering of (0,1,2)
    pub fn median() -> Pattern {
        let mut entries = Vec::new();
        let perms: [[u16; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        for p in perms {
            entries.push((p.to_vec(), 1));
        }
        Pattern::new(3, 3, entries).unwrap()
    }

    /// con(0,0,1,2,2) = 0 and con(0,2,1,0,2) = 1
    pub fn connector() -> Pattern {
        Pattern::new(
            5,
            3,
            vec![(vec![0, 0, 1, 2, 2], 0), (vec![0, 2, 1, 0, 2], 1)],
        )
        .unwrap()
    }
}

/// A pattern interpreted over a concrete domain. Tables are materialized
/// for small domains and evaluated lazily (per input tuple, over the
/// cached family maps) for larger ones.
#[derive(Debug, Clone)]
pub struct ConcreteMultifunction {
    arity: usize,
    domain: usize,
    repr: Repr,
}

#[derive(Debug, Clone)]
enum Repr {
    /// Output bitsets indexed by packed input tuple.
    Table(Vec<u64>),
    /// Pattern plus the family map tables to scan on demand.
    Lazy {
        pattern: Pattern,
        maps: Vec<Vec<u16>>,
    },
}

const MATERIALIZE_DOMAIN_LIMIT: usize = 6;

impl ConcreteMultifunction {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    /// Output set as a bitset over `[d]`; 0 means undefined.
    pub fn eval(&self, input: &[u16]) -> u64 {
        debug_assert_eq!(input.len(), self.arity);
        match &self.repr {
            Repr::Table(t) => {
                let idx = input
                    .iter()
                    .fold(0usize, |acc, &v| acc * self.domain + v as usize);
                t[idx]
            }
            Repr::Lazy { pattern, maps } => {
                let mut out = 0u64;
                for m in maps {
                    for (ins, o) in pattern.entries() {
                        if ins
                            .iter()
                            .zip(input)
                            .all(|(&pv, &cv)| m[pv as usize] == cv)
                        {
                            out |= 1 << m[*o as usize];
                        }
                    }
                }
                out
            }
        }
    }

    pub fn eval_set(&self, input: &[u16]) -> Vec<u16> {
        let bits = self.eval(input);
        (0..self.domain as u16).filter(|&v| bits >> v & 1 == 1).collect()
    }
}

/// Interpret `pattern` over `[d]` through `family`.
///
/// `Id` yields the pattern's own entries when `d` equals the pattern domain
/// and the empty multifunction otherwise.
pub fn interpret_pattern(
    pattern: &Pattern,
    d: usize,
    family: MapFamilyKind,
    budget: &Budget,
) -> Result<ConcreteMultifunction> {
    if d > 64 {
        return Err(Error::Budget(format!("concrete domain {d} > 64")));
    }
    let maps: Vec<Vec<u16>> = definability::enumerate_maps(pattern.domain_size(), d, family, budget)?
        .into_iter()
        .map(|m| m.induced_table())
        .collect();
    let lazy = ConcreteMultifunction {
        arity: pattern.arity(),
        domain: d,
        repr: Repr::Lazy {
            pattern: pattern.clone(),
            maps,
        },
    };
    if d > MATERIALIZE_DOMAIN_LIMIT {
        return Ok(lazy);
    }
    let cells = d.checked_pow(pattern.arity() as u32).unwrap_or(usize::MAX);
    if cells > budget.max_maps {
        return Ok(lazy);
    }
    let mut table = vec![0u64; cells];
    let mut input = vec![0u16; pattern.arity()];
    for (idx, slot) in table.iter_mut().enumerate() {
        let mut rest = idx;
        for k in (0..pattern.arity()).rev() {
            input[k] = (rest % d) as u16;
            rest /= d;
        }
        *slot = lazy.eval(&input);
    }
    Ok(ConcreteMultifunction {
        arity: pattern.arity(),
        domain: d,
        repr: Repr::Table(table),
    })
}

/// Witness of a preservation failure: the input tuples and the violating
/// output tuple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PreservationWitness {
    pub inputs: Vec<Vec<u16>>,
    pub output: Vec<u16>,
}

/// Does `f` preserve `R`? Iterates input tuple combinations in
/// lexicographic order of `R`'s tuple list, so the reported witness is the
/// lexicographically first violation.
pub fn preserves(r: &Relation, f: &ConcreteMultifunction) -> Result<Option<PreservationWitness>> {
    if f.domain() != r.domain_size() {
        return Err(Error::invalid("multifunction domain != relation domain"));
    }
    let k = f.arity();
    let ts = r.tuples();
    if ts.is_empty() {
        return Ok(None);
    }
    let mut combo = vec![0usize; k];
    let mut column = vec![0u16; k];
    loop {
        let mut sets: Vec<u64> = Vec::with_capacity(r.arity());
        let mut defined = true;
        for coord in 0..r.arity() {
            for (j, &ti) in combo.iter().enumerate() {
                column[j] = ts[ti][coord];
            }
            let s = f.eval(&column);
            if s == 0 {
                defined = false;
                break;
            }
            sets.push(s);
        }
        if defined {
            if let Some(bad) = product_violation(r, &sets) {
                let inputs = combo.iter().map(|&ti| ts[ti].clone()).collect();
                return Ok(Some(PreservationWitness {
                    inputs,
                    output: bad,
                }));
            }
        }
        // next combination
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(None);
            }
            pos -= 1;
            combo[pos] += 1;
            if combo[pos] < ts.len() {
                break;
            }
            combo[pos] = 0;
        }
    }
}

/// First tuple (lexicographically) of the product of `sets` outside `r`.
fn product_violation(r: &Relation, sets: &[u64]) -> Option<Vec<u16>> {
    fn rec(r: &Relation, sets: &[u64], prefix: &mut Vec<u16>) -> Option<Vec<u16>> {
        if prefix.len() == sets.len() {
            if r.contains(prefix) {
                return None;
            }
            return Some(prefix.clone());
        }
        let s = sets[prefix.len()];
        for v in 0..r.domain_size() as u16 {
            if s >> v & 1 == 1 {
                prefix.push(v);
                if let Some(bad) = rec(r, sets, prefix) {
                    return Some(bad);
                }
                prefix.pop();
            }
        }
        None
    }
    rec(r, sets, &mut Vec::new())
}

/// Does `pattern` M-preserve every relation of `lang` (each relation
/// interpreted over its own domain)?
pub fn m_preserves(
    lang: &ConstraintLanguage,
    pattern: &Pattern,
    family: MapFamilyKind,
    budget: &Budget,
) -> Result<Option<(String, PreservationWitness)>> {
    for r in lang.iter() {
        let f = interpret_pattern(pattern, r.domain_size(), family, budget)?;
        if let Some(w) = preserves(r, &f)? {
            return Ok(Some((r.name().to_string(), w)));
        }
    }
    Ok(None)
}

pub fn check_min(lang: &ConstraintLanguage, budget: &Budget) -> Result<bool> {
    Ok(m_preserves(lang, &Pattern::min(), MapFamilyKind::Monotone, budget)?.is_none())
}

pub fn check_max(lang: &ConstraintLanguage, budget: &Budget) -> Result<bool> {
    Ok(m_preserves(lang, &Pattern::max(), MapFamilyKind::Monotone, budget)?.is_none())
}

pub fn check_median(lang: &ConstraintLanguage, budget: &Budget) -> Result<bool> {
    Ok(m_preserves(lang, &Pattern::median(), MapFamilyKind::Monotone, budget)?.is_none())
}

/// Connector check uses monotone and anti-monotone maps, matching the
/// pattern's definition.
pub fn check_connector(lang: &ConstraintLanguage, budget: &Budget) -> Result<bool> {
    Ok(check_connector_witness(lang, budget)?.is_none())
}

pub fn check_connector_witness(
    lang: &ConstraintLanguage,
    budget: &Budget,
) -> Result<Option<(String, PreservationWitness)>> {
    m_preserves(
        lang,
        &Pattern::connector(),
        MapFamilyKind::MonotoneAndAnti,
        budget,
    )
}

/// Boolean partial operation: defined entries over `[2]`.
#[derive(Debug, Clone)]
pub struct BooleanPartialOp {
    arity: usize,
    entries: Vec<(Vec<u16>, u16)>,
}

impl BooleanPartialOp {
    pub fn new(arity: usize, entries: Vec<(Vec<u16>, u16)>) -> Result<BooleanPartialOp> {
        for ((a, _), (b, _)) in entries.iter().zip(entries.iter().skip(1)) {
            let _ = (a, b);
        }
        let mut sorted = entries.clone();
        sorted.sort();
        for w in sorted.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 != w[1].1 {
                return Err(Error::invalid("partial op is not single-valued"));
            }
        }
        Ok(BooleanPartialOp {
            arity,
            entries: sorted,
        })
    }

    pub fn f_nand() -> BooleanPartialOp {
        BooleanPartialOp::new(
            3,
            vec![
                (vec![0, 0, 0], 0),
                (vec![0, 0, 1], 1),
                (vec![0, 1, 0], 1),
                (vec![1, 1, 1], 1),
            ],
        )
        .unwrap()
    }

    pub fn g_impl() -> BooleanPartialOp {
        BooleanPartialOp::new(
            3,
            vec![
                (vec![0, 0, 0], 0),
                (vec![0, 1, 1], 0),
                (vec![0, 0, 1], 1),
                (vec![1, 1, 1], 1),
            ],
        )
        .unwrap()
    }

    pub fn eval(&self, input: &[u16]) -> Option<u16> {
        self.entries
            .iter()
            .find(|(ins, _)| ins == input)
            .map(|(_, o)| *o)
    }

    /// Is `r` invariant: every componentwise application with all
    /// components defined lands in `r`?
    pub fn invariant(&self, r: &Relation) -> bool {
        let ts = r.tuples();
        let mut combo = vec![0usize; self.arity];
        if ts.is_empty() {
            return true;
        }
        loop {
            let mut out = Vec::with_capacity(r.arity());
            let mut defined = true;
            for coord in 0..r.arity() {
                let input: Vec<u16> = combo.iter().map(|&t| ts[t][coord]).collect();
                match self.eval(&input) {
                    Some(v) => out.push(v),
                    None => {
                        defined = false;
                        break;
                    }
                }
            }
            if defined && !r.contains(&out) {
                return false;
            }
            let mut pos = self.arity;
            loop {
                if pos == 0 {
                    return true;
                }
                pos -= 1;
                combo[pos] += 1;
                if combo[pos] < ts.len() {
                    break;
                }
                combo[pos] = 0;
            }
        }
    }
}

/// Weak 0-separability of a Boolean relation, decided by two independent
/// routes that must agree:
/// (a) the union and difference closure conditions, anchored at tuples of
///     the relation (on 0-valid relations these specialize to the closure
///     conditions over 0-disjoint tuple pairs, with the all-zero tuple as
///     anchor), and
/// (b) invariance under the partial operations f_Nand and g_Impl.
pub fn check_weak_separability(r: &Relation) -> Result<bool> {
    if !r.is_boolean() {
        return Err(Error::invalid("weak separability is defined for Boolean relations"));
    }
    let direct = weak_separability_direct(r);
    let algebraic = BooleanPartialOp::f_nand().invariant(r) && BooleanPartialOp::g_impl().invariant(r);
    if direct != algebraic {
        return Err(Error::Internal(format!(
            "weak-separability routes disagree on {}: direct={direct}, algebraic={algebraic}",
            r.name()
        )));
    }
    Ok(direct)
}

fn weak_separability_direct(r: &Relation) -> bool {
    let inter = |s: &[u16], t: &[u16]| -> Vec<u16> {
        s.iter().zip(t).map(|(&a, &b)| a & b).collect()
    };
    let union = |s: &[u16], t: &[u16]| -> Vec<u16> {
        s.iter().zip(t).map(|(&a, &b)| a | b).collect()
    };
    let leq = |s: &[u16], t: &[u16]| s.iter().zip(t).all(|(&a, &b)| a <= b);
    // (1) union closure: tuples whose overlap already lies in R (for
    // 0-valid R this covers exactly the 0-disjoint pairs)
    for s in r.tuples() {
        for t in r.tuples() {
            if r.contains(&inter(s, t)) && !r.contains(&union(s, t)) {
                return false;
            }
        }
    }
    // (2) difference closure along chains t1 <= t2 <= t3 in R: the tuple
    // t1 u (t3 \ t2) stays in R (for 0-valid R with t1 = 0 this is the
    // 0-disjoint difference condition)
    for t1 in r.tuples() {
        for t2 in r.tuples() {
            if !leq(t1, t2) {
                continue;
            }
            for t3 in r.tuples() {
                if !leq(t2, t3) {
                    continue;
                }
                let out: Vec<u16> = t1
                    .iter()
                    .zip(t2)
                    .zip(t3)
                    .map(|((&a, &b), &c)| a | (c & (1 - b)))
                    .collect();
                if !r.contains(&out) {
                    return false;
                }
            }
        }
    }
    true
}

pub fn check_weak_separability_language(lang: &ConstraintLanguage) -> Result<bool> {
    for r in lang.iter() {
        if !check_weak_separability(r)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Essentially unary test via two routes that must agree:
/// All-preservation of the binary multifunction f(0,1) = {0,1}, and the
/// structural test R = product of its coordinate projections.
pub fn check_essentially_unary(lang: &ConstraintLanguage, budget: &Budget) -> Result<bool> {
    let spread = Pattern::new(2, 2, vec![(vec![0, 1], 0), (vec![0, 1], 1)])?;
    let mut algebraic = true;
    for r in lang.iter() {
        let f = interpret_pattern(&spread, r.domain_size(), MapFamilyKind::All, budget)?;
        if preserves(r, &f)?.is_some() {
            algebraic = false;
            break;
        }
    }
    let structural = lang.iter().all(is_projection_product);
    if algebraic != structural {
        return Err(Error::Internal(format!(
            "essentially-unary routes disagree: algebraic={algebraic}, structural={structural}"
        )));
    }
    Ok(structural)
}

fn is_projection_product(r: &Relation) -> bool {
    if r.arity() == 0 {
        return true;
    }
    let projections: Vec<Vec<u16>> = (0..r.arity())
        .map(|c| {
            let mut vs: Vec<u16> = r.tuples().iter().map(|t| t[c]).collect();
            vs.sort();
            vs.dedup();
            vs
        })
        .collect();
    let product_size: usize = projections.iter().map(Vec::len).product();
    product_size == r.len()
}

/// Per-family classification verdicts with witnesses and timing.
#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub unrestricted: UnrestrictedVerdict,
    /// Present only for Boolean languages.
    pub one_hot: Option<OneHotVerdict>,
    pub monotone: MonotoneVerdict,
    pub elapsed_ms: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct UnrestrictedVerdict {
    /// P iff essentially unary; otherwise NP-hard and W[1]-hard.
    pub polynomial: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OneHotVerdict {
    /// P iff every relation is definable over {Or2, 0, 1}.
    pub polynomial: bool,
    /// Relations that failed Or2/0/1-definability.
    pub undefinable: Vec<String>,
    /// FPT iff weakly 0-separable; W[1]-hard otherwise.
    pub fpt: bool,
    pub separability_witness: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotoneVerdict {
    /// Which of min/max/median holds, if any (P cases).
    pub polynomial: Option<String>,
    pub min: bool,
    pub max: bool,
    pub median: bool,
    /// Connector property: FPT for binary languages, FPT-candidate beyond.
    pub connector: bool,
    pub connector_witness: Option<(String, PreservationWitness)>,
    /// Set when connector fails and neither min nor max holds.
    pub w1_hard: bool,
    /// All relations binary (arity <= 2)?
    pub binary_language: bool,
}

/// Classify a language for the unrestricted, one-hot, and monotone map
/// families.
pub fn classify_language(lang: &ConstraintLanguage, budget: &Budget) -> Result<ClassificationReport> {
    let start = Instant::now();
    let unrestricted = UnrestrictedVerdict {
        polynomial: check_essentially_unary(lang, budget)?,
    };

    let one_hot = if lang.is_boolean() {
        let mut undefinable = Vec::new();
        for r in lang.iter() {
            if definability::or2_definable(r, budget)?.is_none() {
                undefinable.push(r.name().to_string());
            }
        }
        let mut fpt = true;
        let mut witness = None;
        for r in lang.iter() {
            if !check_weak_separability(r)? {
                fpt = false;
                witness = Some(r.name().to_string());
                break;
            }
        }
        Some(OneHotVerdict {
            polynomial: undefinable.is_empty(),
            undefinable,
            fpt,
            separability_witness: witness,
        })
    } else {
        None
    };

    let min = check_min(lang, budget)?;
    let max = check_max(lang, budget)?;
    let median = check_median(lang, budget)?;
    let connector_witness = check_connector_witness(lang, budget)?;
    let connector = connector_witness.is_none();
    let monotone = MonotoneVerdict {
        polynomial: if min {
            Some("min".into())
        } else if max {
            Some("max".into())
        } else if median {
            Some("median".into())
        } else {
            None
        },
        min,
        max,
        median,
        connector,
        connector_witness,
        w1_hard: !connector && !min && !max,
        binary_language: lang.iter().all(|r| r.arity() <= 2),
    };

    Ok(ClassificationReport {
        unrestricted,
        one_hot,
        monotone,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::builtin_relations;

    fn lang(names: &[&str]) -> ConstraintLanguage {
        let b = builtin_relations();
        ConstraintLanguage::new(names.iter().map(|n| b.get(n).unwrap().clone())).unwrap()
    }

    fn budget() -> Budget {
        Budget::default()
    }

    #[test]
    fn min_interpretation_over_five() {
        let f = interpret_pattern(&Pattern::min(), 5, MapFamilyKind::Monotone, &budget()).unwrap();
        assert_eq!(f.eval_set(&[3, 4]), vec![3]);
        assert_eq!(f.eval_set(&[2, 0]), vec![0]);
        assert_eq!(f.eval_set(&[1, 1]), vec![1]);
    }

    #[test]
    fn connector_interpretation_over_three() {
        let f = interpret_pattern(
            &Pattern::connector(),
            3,
            MapFamilyKind::MonotoneAndAnti,
            &budget(),
        )
        .unwrap();
        assert_eq!(f.eval_set(&[0, 0, 0, 0, 0]), vec![0]);
        assert_eq!(f.eval_set(&[2, 2, 1, 0, 0]), vec![2]);
        assert_eq!(f.eval_set(&[0, 0, 1, 2, 2]), vec![0]);
        assert_eq!(f.eval_set(&[1, 1, 1, 1, 1]), vec![1]);
        assert_eq!(f.eval_set(&[2, 2, 2, 2, 2]), vec![2]);
        assert_eq!(f.eval_set(&[0, 0, 0, 2, 2]), vec![0]);
    }

    #[test]
    fn id_interpretation_reproduces_pattern() {
        let p = Pattern::connector();
        let f = interpret_pattern(&p, 3, MapFamilyKind::Id, &budget()).unwrap();
        for (ins, out) in p.entries() {
            assert!(f.eval(ins) >> out & 1 == 1);
        }
        // off-domain: empty
        let f2 = interpret_pattern(&p, 4, MapFamilyKind::Id, &budget()).unwrap();
        assert_eq!(f2.eval(&[0, 0, 1, 2, 2]), 0);
    }

    #[test]
    fn mono_anti_conjugation_by_reversal() {
        let p = Pattern::min();
        for d in 2..=5usize {
            let fm = interpret_pattern(&p, d, MapFamilyKind::Monotone, &budget()).unwrap();
            let fa = interpret_pattern(&p, d, MapFamilyKind::AntiMonotone, &budget()).unwrap();
            let rev = |v: u16| (d - 1) as u16 - v;
            for a in 0..d as u16 {
                for b in 0..d as u16 {
                    let lhs = fa.eval_set(&[rev(a), rev(b)]);
                    let mut rhs: Vec<u16> =
                        fm.eval_set(&[a, b]).into_iter().map(rev).collect();
                    rhs.sort();
                    assert_eq!(lhs, rhs, "d={d}, a={a}, b={b}");
                }
            }
        }
    }

    #[test]
    fn r3_connector_witness_is_the_identity_arrangement() {
        let l = lang(&["R3"]);
        let w = check_connector_witness(&l, &budget()).unwrap().unwrap();
        assert_eq!(w.0, "R3");
        assert_eq!(
            w.1.inputs,
            vec![vec![0, 0], vec![0, 2], vec![1, 1], vec![2, 0], vec![2, 2]]
        );
        assert_eq!(w.1.output, vec![0, 1]);
    }

    #[test]
    fn coordination_relations_have_connector() {
        for name in ["Ra", "Rb", "Rc", "Impl", "RD"] {
            assert!(
                check_connector(&lang(&[name]), &budget()).unwrap(),
                "{name} should satisfy the connector property"
            );
        }
        assert!(!check_connector(&lang(&["Even4"]), &budget()).unwrap());
    }

    #[test]
    fn min_max_median_checks() {
        assert!(check_min(&lang(&["Impl", "C0"]), &budget()).unwrap());
        assert!(check_max(&lang(&["Impl", "C1"]), &budget()).unwrap());
        assert!(!check_median(&lang(&["NAE"]), &budget()).unwrap());
        assert!(!check_min(&lang(&["R3"]), &budget()).unwrap());
        assert!(!check_max(&lang(&["R3"]), &budget()).unwrap());
        assert!(check_min(&lang(&["Nand2"]), &budget()).unwrap());
    }

    #[test]
    fn preserves_naive_reimplementation_agrees() {
        // oracle redundancy on small random relations
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let f = interpret_pattern(&Pattern::min(), 3, MapFamilyKind::Monotone, &budget()).unwrap();
        for trial in 0..200 {
            let tuples: Vec<Vec<u16>> = (0..9)
                .filter(|_| rng.gen_bool(0.5))
                .map(|i| vec![i / 3, i % 3])
                .collect();
            let r = Relation::new(format!("t{trial}"), 3, 2, tuples).unwrap();
            let fast = preserves(&r, &f).unwrap().is_none();
            // naive triple loop
            let mut naive = true;
            'outer: for a in r.tuples() {
                for b in r.tuples() {
                    let sets: Vec<Vec<u16>> = (0..2)
                        .map(|c| f.eval_set(&[a[c], b[c]]))
                        .collect();
                    if sets.iter().any(Vec::is_empty) {
                        continue;
                    }
                    for x in &sets[0] {
                        for y in &sets[1] {
                            if !r.contains(&[*x, *y]) {
                                naive = false;
                                break 'outer;
                            }
                        }
                    }
                }
            }
            assert_eq!(fast, naive, "trial {trial}");
        }
    }

    #[test]
    fn weak_separability_ground_truth() {
        let b = builtin_relations();
        assert!(!check_weak_separability(b.get("Nand2").unwrap()).unwrap());
        assert!(!check_weak_separability(b.get("Impl").unwrap()).unwrap());
        for m in 2..=4 {
            assert!(check_weak_separability(b.get(&format!("Even{m}")).unwrap()).unwrap());
        }
        assert!(check_weak_separability(b.get("Eq").unwrap()).unwrap());
    }

    /// The two separability routes agree on every Boolean relation of
    /// arity up to 3 (check_weak_separability errors on disagreement).
    #[test]
    fn weak_separability_routes_agree_exhaustively() {
        for arity in 1..=3usize {
            for bits in 1..1usize << (1 << arity) {
                let tuples: Vec<Vec<u16>> = (0..1usize << arity)
                    .filter(|i| bits >> i & 1 == 1)
                    .map(|i| (0..arity).map(|j| (i >> j & 1) as u16).collect())
                    .collect();
                let r = Relation::new("t", 2, arity, tuples).unwrap();
                check_weak_separability(&r).unwrap();
            }
        }
    }

    /// Separability survives the star closure (the restriction-closure
    /// lemma behind the one-hot FPT solver).
    #[test]
    fn weak_separability_closed_under_star() {
        for arity in 1..=3usize {
            for bits in 1..1usize << (1 << arity) {
                let tuples: Vec<Vec<u16>> = (0..1usize << arity)
                    .filter(|i| bits >> i & 1 == 1)
                    .map(|i| (0..arity).map(|j| (i >> j & 1) as u16).collect())
                    .collect();
                let r = Relation::new("t", 2, arity, tuples).unwrap();
                if !check_weak_separability(&r).unwrap() {
                    continue;
                }
                let star = ConstraintLanguage::new(vec![r]).unwrap().star().unwrap();
                for s in star.iter() {
                    if s.arity() > 0 && !s.is_empty() {
                        assert!(
                            check_weak_separability(s).unwrap(),
                            "restriction {:?} of a separable relation is not separable",
                            s.tuples()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn nand2_fails_via_zero_union_11() {
        // the 0-disjoint pair 01, 10 has union 11 which is outside Nand2
        let b = builtin_relations();
        let r = b.get("Nand2").unwrap();
        assert!(r.contains(&[0, 1]) && r.contains(&[1, 0]) && !r.contains(&[1, 1]));
        assert!(!check_weak_separability(r).unwrap());
    }

    #[test]
    fn essentially_unary_cases() {
        let unary = Relation::new("u", 3, 1, vec![vec![0], vec![2]]).unwrap();
        let l = ConstraintLanguage::new(vec![unary]).unwrap();
        assert!(check_essentially_unary(&l, &budget()).unwrap());

        assert!(!check_essentially_unary(&lang(&["Eq"]), &budget()).unwrap());

        let full = Relation::new(
            "full",
            2,
            2,
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]],
        )
        .unwrap();
        let l = ConstraintLanguage::new(vec![full]).unwrap();
        assert!(check_essentially_unary(&l, &budget()).unwrap());
    }

    #[test]
    fn classify_examples() {
        let rep = classify_language(&lang(&["Impl", "C0"]), &budget()).unwrap();
        assert_eq!(rep.monotone.polynomial.as_deref(), Some("min"));
        assert!(!rep.unrestricted.polynomial);

        let rep = classify_language(&lang(&["R3"]), &budget()).unwrap();
        assert!(rep.monotone.w1_hard);
        assert!(rep.monotone.polynomial.is_none());
        assert!(rep.one_hot.is_none());

        let rep = classify_language(&lang(&["Even4"]), &budget()).unwrap();
        let oh = rep.one_hot.unwrap();
        assert!(oh.fpt);
        assert!(!oh.polynomial);
        assert!(rep.monotone.w1_hard);
    }

    /// Biclique consequence of the connector property for binary relations:
    /// whenever {a1,a2} x {b1,b2} lies inside R, the restriction of R to
    /// [a1,a2] x [b1,b2] is a biclique.
    #[test]
    fn connector_implies_biclique_boxes() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let budget = budget();
        let mut found = 0;
        while found < 40 {
            let d = rng.gen_range(2..=4usize);
            let tuples: Vec<Vec<u16>> = (0..d * d)
                .filter(|_| rng.gen_bool(0.55))
                .map(|i| vec![(i / d) as u16, (i % d) as u16])
                .collect();
            let r = Relation::new("rand", d, 2, tuples).unwrap();
            let l = ConstraintLanguage::new(vec![r.clone()]).unwrap();
            if !check_connector(&l, &budget).unwrap() {
                continue;
            }
            found += 1;
            for a1 in 0..d as u16 {
                for a2 in a1..d as u16 {
                    for b1 in 0..d as u16 {
                        for b2 in b1..d as u16 {
                            let corners = [[a1, b1], [a1, b2], [a2, b1], [a2, b2]];
                            if !corners.iter().all(|t| r.contains(t)) {
                                continue;
                            }
                            // rows with any 1 in the box must share a column set
                            let mut common: Option<Vec<u16>> = None;
                            for x in a1..=a2 {
                                let cols: Vec<u16> =
                                    (b1..=b2).filter(|&y| r.contains(&[x, y])).collect();
                                if cols.is_empty() {
                                    continue;
                                }
                                match &common {
                                    None => common = Some(cols),
                                    Some(c) => assert_eq!(
                                        c, &cols,
                                        "box ({a1},{a2})x({b1},{b2}) of {:?} is not a biclique",
                                        r.tuples()
                                    ),
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}
