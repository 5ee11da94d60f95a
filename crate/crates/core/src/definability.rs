//! M-fgpp-definability via the canonical-formula construction, formula
//! evaluation, and the constraint-inlining / variable-doubling instance
//! transformations.
//!
//! The canonical formula for a target relation R over a language and map
//! family is the conjunction of every atom (relation, index map, family
//! maps) that no tuple of R fails. R is definable exactly when this formula
//! evaluates back to R.

use std::collections::HashSet;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::model::{
    Constraint, ConstraintLanguage, Instance, MapEncoding, MapFamilyKind, Relation, UnaryMap,
};
use crate::patterns;
use crate::{Budget, Error, Result};

/// Enumerate exactly the maps `[n] -> [d]` of a family, without duplicates.
pub fn enumerate_maps(
    n: usize,
    d: usize,
    family: MapFamilyKind,
    budget: &Budget,
) -> Result<Vec<UnaryMap>> {
    match family {
        MapFamilyKind::Id => Ok(if n == d {
            vec![UnaryMap::identity(n)]
        } else {
            vec![]
        }),
        MapFamilyKind::OneHot => Ok(if d == 2 {
            (0..n).map(|h| UnaryMap::one_hot(n, h).unwrap()).collect()
        } else {
            vec![]
        }),
        MapFamilyKind::Monotone => {
            check_count(binomial(n + d - 1, d - 1), budget)?;
            Ok(threshold_vectors(n, d)
                .into_iter()
                .map(|ts| UnaryMap::monotone(n, d, ts).unwrap())
                .collect())
        }
        MapFamilyKind::AntiMonotone => {
            check_count(binomial(n + d - 1, d - 1), budget)?;
            Ok(threshold_vectors(n, d)
                .into_iter()
                .map(|ts| UnaryMap::anti_monotone(n, d, ts).unwrap())
                .collect())
        }
        MapFamilyKind::MonotoneAndAnti => {
            let mut maps = enumerate_maps(n, d, MapFamilyKind::Monotone, budget)?;
            let mut seen: HashSet<Vec<u16>> =
                maps.iter().map(UnaryMap::induced_table).collect();
            for m in enumerate_maps(n, d, MapFamilyKind::AntiMonotone, budget)? {
                if seen.insert(m.induced_table()) {
                    maps.push(m);
                }
            }
            Ok(maps)
        }
        MapFamilyKind::All => {
            let count = (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
            check_count(count, budget)?;
            let mut maps = Vec::with_capacity(count as usize);
            let mut table = vec![0u16; n];
            loop {
                maps.push(UnaryMap::table(n, d, table.clone())?);
                let mut pos = n;
                loop {
                    if pos == 0 {
                        return Ok(maps);
                    }
                    pos -= 1;
                    table[pos] += 1;
                    if (table[pos] as usize) < d {
                        break;
                    }
                    table[pos] = 0;
                }
            }
        }
    }
}

fn check_count(count: u128, budget: &Budget) -> Result<()> {
    if count > budget.max_maps as u128 {
        return Err(Error::Budget(format!(
            "map family enumeration of {count} maps exceeds budget {}",
            budget.max_maps
        )));
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
        if acc > 1 << 100 {
            return u128::MAX;
        }
    }
    acc
}

/// Weakly increasing threshold vectors of length d-1 over [0, n].
fn threshold_vectors(n: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; d - 1];
    loop {
        out.push(cur.clone());
        let mut pos = d - 1;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            cur[pos] += 1;
            if cur[pos] <= n {
                for i in pos + 1..d - 1 {
                    cur[i] = cur[pos];
                }
                break;
            }
        }
    }
}

/// One atom of an fgpp formula: `S(h_1(x_{i_1}), ..., h_s(x_{i_s}))`.
#[derive(Debug, Clone, PartialEq)]
pub struct FgppAtom {
    pub relation: Relation,
    /// Index map [s] -> [r] into the target relation's coordinates.
    pub positions: Vec<usize>,
    /// Guarding maps, target_domain -> relation domain.
    pub maps: Vec<UnaryMap>,
}

impl FgppAtom {
    fn satisfied_by(&self, t: &[u16]) -> bool {
        let image: Vec<u16> = self
            .positions
            .iter()
            .zip(&self.maps)
            .map(|(&p, m)| m.apply_unchecked(t[p]))
            .collect();
        self.relation.contains(&image)
    }
}

/// Quantifier-free, equality-free guarded conjunction defining a relation.
#[derive(Debug, Clone, PartialEq)]
pub struct FgppFormula {
    pub target_arity: usize,
    pub target_domain: usize,
    pub atoms: Vec<FgppAtom>,
}

impl FgppFormula {
    pub fn identity(target_arity: usize, target_domain: usize) -> FgppFormula {
        FgppFormula {
            target_arity,
            target_domain,
            atoms: Vec::new(),
        }
    }
}

/// Evaluate a formula over `[n]^r`. `n` must match the formula's target
/// domain.
pub fn formula_to_relation(formula: &FgppFormula, n: usize) -> Result<Relation> {
    if n != formula.target_domain {
        return Err(Error::invalid(format!(
            "formula evaluates over [{}], asked for [{n}]",
            formula.target_domain
        )));
    }
    let r = formula.target_arity;
    let mut tuples = Vec::new();
    let mut t = vec![0u16; r];
    loop {
        if formula.atoms.iter().all(|a| a.satisfied_by(&t)) {
            tuples.push(t.clone());
        }
        let mut pos = r;
        loop {
            if pos == 0 {
                return Relation::new("formula", n, r, tuples);
            }
            pos -= 1;
            t[pos] += 1;
            if (t[pos] as usize) < n {
                break;
            }
            t[pos] = 0;
        }
    }
}

fn eval_mask(atom: &FgppAtom, n: usize, r: usize) -> Vec<u64> {
    let cells = n.pow(r as u32);
    let mut mask = vec![0u64; cells.div_ceil(64).max(1)];
    let mut t = vec![0u16; r];
    for idx in 0..cells {
        let mut rest = idx;
        for k in (0..r).rev() {
            t[k] = (rest % n) as u16;
            rest /= n;
        }
        if atom.satisfied_by(&t) {
            mask[idx / 64] |= 1 << (idx % 64);
        }
    }
    mask
}

/// The conjunction of all atoms (over all relations of `lang`, index maps,
/// and family maps) satisfied by every tuple of `target`. Atoms are
/// deduplicated by their evaluation over `[n]^r` and greedily pruned to a
/// minimal subset with the same evaluation.
pub fn canonical_fgpp_formula(
    lang: &ConstraintLanguage,
    family: MapFamilyKind,
    target: &Relation,
    budget: &Budget,
) -> Result<FgppFormula> {
    let n = target.domain_size();
    let r = target.arity();
    let cells = n
        .checked_pow(r as u32)
        .filter(|&c| c <= 1 << 24)
        .ok_or_else(|| Error::Budget("target relation too large for canonical formula".into()))?;

    let mut atoms: Vec<(FgppAtom, Vec<u64>)> = Vec::new();
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    for rel in lang.iter() {
        let s = rel.arity();
        if s == 0 {
            continue;
        }
        let maps = enumerate_maps(n, rel.domain_size(), family, budget)?;
        let combos = (maps.len() as u128)
            .checked_pow(s as u32)
            .unwrap_or(u128::MAX)
            .saturating_mul((r as u128).pow(s as u32));
        check_count(combos, budget)?;
        let mut positions = vec![0usize; s];
        loop {
            let mut choice = vec![0usize; s];
            loop {
                let atom = FgppAtom {
                    relation: rel.clone(),
                    positions: positions.clone(),
                    maps: choice.iter().map(|&i| maps[i].clone()).collect(),
                };
                if target.tuples().iter().all(|t| atom.satisfied_by(t)) {
                    let mask = eval_mask(&atom, n, r);
                    if seen.insert(mask.clone()) {
                        atoms.push((atom, mask));
                    }
                }
                let mut pos = s;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    choice[pos] += 1;
                    if choice[pos] < maps.len() {
                        break;
                    }
                    choice[pos] = 0;
                }
                if choice.iter().all(|&c| c == 0) {
                    break;
                }
            }
            let mut pos = s;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                positions[pos] += 1;
                if positions[pos] < r {
                    break;
                }
                positions[pos] = 0;
            }
            if positions.iter().all(|&p| p == 0) {
                break;
            }
        }
    }

    // greedy pruning to a minimal atom subset with the same evaluation
    let full: Vec<u64> = intersect_all(cells, atoms.iter().map(|(_, m)| m));
    let mut kept: Vec<bool> = vec![true; atoms.len()];
    for i in 0..atoms.len() {
        kept[i] = false;
        let trial = intersect_all(
            cells,
            atoms
                .iter()
                .enumerate()
                .filter(|(j, _)| kept[*j])
                .map(|(_, (_, m))| m),
        );
        if trial != full {
            kept[i] = true;
        }
    }
    let atoms = atoms
        .into_iter()
        .zip(kept)
        .filter(|(_, k)| *k)
        .map(|((a, _), _)| a)
        .collect();
    Ok(FgppFormula {
        target_arity: r,
        target_domain: n,
        atoms,
    })
}

fn intersect_all<'a>(cells: usize, masks: impl Iterator<Item = &'a Vec<u64>>) -> Vec<u64> {
    let words = cells.div_ceil(64).max(1);
    let mut acc = vec![u64::MAX; words];
    if cells % 64 != 0 {
        acc[words - 1] = (1u64 << (cells % 64)) - 1;
    }
    for m in masks {
        for (a, b) in acc.iter_mut().zip(m) {
            *a &= b;
        }
    }
    acc
}

/// Decide M-fgpp-definability: the canonical formula evaluates to exactly
/// the target iff the target is definable.
pub fn fgpp_definable(
    lang: &ConstraintLanguage,
    family: MapFamilyKind,
    target: &Relation,
    budget: &Budget,
) -> Result<Option<FgppFormula>> {
    let formula = canonical_fgpp_formula(lang, family, target, budget)?;
    let eval = formula_to_relation(&formula, target.domain_size())?;
    if eval.same_content(target) {
        Ok(Some(formula))
    } else {
        Ok(None)
    }
}

/// Definability over {Or2, 0, 1} with identity maps, the membership test
/// behind the one-hot polynomial case.
pub fn or2_definable(target: &Relation, budget: &Budget) -> Result<Option<FgppFormula>> {
    if !target.is_boolean() {
        return Err(Error::invalid("Or2/0/1-definability applies to Boolean relations"));
    }
    let b = crate::model::builtin_relations();
    let lang = ConstraintLanguage::new(vec![
        b.get("Or2").unwrap().clone(),
        b.get("C0").unwrap().clone(),
        b.get("C1").unwrap().clone(),
    ])?;
    fgpp_definable(&lang, MapFamilyKind::Id, target, budget)
}

/// Replace every constraint over `rel_name` by the atoms of `formula`, with
/// maps composed through the original constraint's maps. The variable count
/// is unchanged and the solution set is identical.
pub fn inline_defined_relation(
    inst: &Instance,
    rel_name: &str,
    formula: &FgppFormula,
    family: MapFamilyKind,
) -> Result<Instance> {
    let target = inst
        .relations
        .get(rel_name)
        .ok_or_else(|| Error::invalid(format!("unknown relation {rel_name}")))?;
    if formula.target_domain != target.domain_size() || formula.target_arity != target.arity() {
        return Err(Error::invalid("formula shape does not match the inlined relation"));
    }
    let mut relations = ConstraintLanguage::default();
    for r in inst.relations.iter() {
        if r.name() != rel_name {
            relations.insert(r.clone())?;
        }
    }
    // bring in the formula's relations, reusing names where content matches
    let mut atom_rel_names = Vec::new();
    for atom in &formula.atoms {
        let existing = relations
            .iter()
            .find(|r| r.same_content(&atom.relation))
            .map(|r| r.name().to_string());
        let name = match existing {
            Some(name) => name,
            None => {
                let mut name = atom.relation.name().to_string();
                while relations.get(&name).is_some() {
                    name.push('_');
                }
                relations.insert(atom.relation.renamed(name.clone()))?;
                name
            }
        };
        atom_rel_names.push(name);
    }
    let mut constraints = Vec::new();
    for c in &inst.constraints {
        if c.rel != rel_name {
            constraints.push(c.clone());
            continue;
        }
        for (atom, name) in formula.atoms.iter().zip(&atom_rel_names) {
            let mut maps = Vec::with_capacity(atom.maps.len());
            for (h, &p) in atom.maps.iter().zip(&atom.positions) {
                let composed = c.maps[p].compose_after(h)?;
                if !family.contains(&composed) {
                    return Err(Error::invalid(format!(
                        "composed map leaves the {family} family"
                    )));
                }
                maps.push(composed);
            }
            constraints.push(Constraint {
                rel: name.clone(),
                vars: atom.positions.iter().map(|&p| c.vars[p]).collect(),
                maps,
            });
        }
    }
    let mut out = Instance::new(inst.domain_size, inst.variables.clone(), relations, constraints)?;
    out.weights = inst.weights.clone();
    Ok(out)
}

/// Eliminate anti-monotone maps by twinning every variable with its order
/// reversal, constrained through an fgpp-definition of the reversal graph.
/// Requires the used language to fail both the min and max checks (which
/// guarantees the reversal graph is definable) and doubles the variable
/// count.
pub fn reverse_variable_transform(inst: &Instance, budget: &Budget) -> Result<Instance> {
    if inst.maps_in_family(MapFamilyKind::Monotone) {
        return Ok(inst.clone());
    }
    if !inst.maps_in_family(MapFamilyKind::MonotoneAndAnti) {
        return Err(Error::invalid(
            "reverse transform needs monotone or anti-monotone guarding maps",
        ));
    }
    let lang = inst.used_language();
    if patterns::check_min(&lang, budget)? || patterns::check_max(&lang, budget)? {
        return Err(Error::Dispatch(
            "language is min- or max-closed; reversal graph not guaranteed definable".into(),
        ));
    }
    let n = inst.domain_size;
    let reversal_graph = Relation::new(
        "rev",
        n,
        2,
        (0..n as u16).map(|x| vec![x, (n - 1) as u16 - x]),
    )?;
    let formula = fgpp_definable(&lang, MapFamilyKind::Monotone, &reversal_graph, budget)?
        .ok_or_else(|| {
            Error::Dispatch(format!(
                "reversal graph over [{n}] is not Mo-fgpp-definable from {{{}}}",
                lang.iter().map(Relation::name).collect::<Vec<_>>().join(", ")
            ))
        })?;

    let k = inst.num_vars();
    let mut variables = inst.variables.clone();
    for name in &inst.variables {
        variables.push(format!("{name}__rev"));
    }
    let mut relations = inst.relations.clone();
    let reversal = UnaryMap::reversal(n);
    let mut constraints = Vec::new();
    for c in &inst.constraints {
        let mut vars = Vec::with_capacity(c.vars.len());
        let mut maps = Vec::with_capacity(c.maps.len());
        for (&v, m) in c.vars.iter().zip(&c.maps) {
            if m.is_monotone() {
                vars.push(v);
                maps.push(m.clone());
            } else {
                vars.push(k + v);
                maps.push(reversal.compose_after(m)?);
            }
        }
        constraints.push(Constraint {
            rel: c.rel.clone(),
            vars,
            maps,
        });
    }
    // twin coupling via the reversal formula
    let mut atom_rel_names = Vec::new();
    for atom in &formula.atoms {
        let existing = relations
            .iter()
            .find(|r| r.same_content(&atom.relation))
            .map(|r| r.name().to_string());
        let name = match existing {
            Some(name) => name,
            None => {
                let mut name = format!("rev_{}", atom.relation.name());
                while relations.get(&name).is_some() {
                    name.push('_');
                }
                relations.insert(atom.relation.renamed(name.clone()))?;
                name
            }
        };
        atom_rel_names.push(name);
    }
    for v in 0..k {
        for (atom, name) in formula.atoms.iter().zip(&atom_rel_names) {
            constraints.push(Constraint {
                rel: name.clone(),
                vars: atom
                    .positions
                    .iter()
                    .map(|&p| if p == 0 { v } else { k + v })
                    .collect(),
                maps: atom.maps.clone(),
            });
        }
    }
    Instance::new(inst.domain_size, variables, relations, constraints)
}

// Formula JSON mirrors the instance constraint schema plus an index-map
// field; relations are embedded by name.
impl Serialize for FgppFormula {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct AtomJson<'a> {
            rel: &'a str,
            index_map: &'a [usize],
            maps: Vec<serde_json::Value>,
        }
        let map_json = |m: &UnaryMap| -> serde_json::Value {
            match m.encoding() {
                MapEncoding::Table(t) => serde_json::json!({ "table": t }),
                MapEncoding::OneHot(h) => serde_json::json!({ "onehot": h }),
                MapEncoding::MonotoneThresholds(t) => {
                    serde_json::json!({ "monotone_thresholds": t })
                }
                MapEncoding::AntiMonotoneThresholds(t) => {
                    serde_json::json!({ "antimonotone_thresholds": t })
                }
            }
        };
        let mut relations = serde_json::Map::new();
        for atom in &self.atoms {
            let r = &atom.relation;
            relations.entry(r.name().to_string()).or_insert(serde_json::json!({
                "domain": r.domain_size(),
                "arity": r.arity(),
                "tuples": r.tuples(),
            }));
        }
        let atoms: Vec<AtomJson> = self
            .atoms
            .iter()
            .map(|a| AtomJson {
                rel: a.relation.name(),
                index_map: &a.positions,
                maps: a.maps.iter().map(map_json).collect(),
            })
            .collect();
        let mut st = ser.serialize_struct("FgppFormula", 4)?;
        st.serialize_field("target_arity", &self.target_arity)?;
        st.serialize_field("target_domain", &self.target_domain)?;
        st.serialize_field("relations", &relations)?;
        st.serialize_field("atoms", &atoms)?;
        st.end()
    }
}
