//! Relations, guarding maps, constraint languages, instances, assignments.
//!
//! Everything here is immutable after construction and safe to share across
//! threads. Relations keep a packed membership bitset next to the sorted
//! tuple list; pattern and definability enumerations are membership-bound.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bits::BitSet;
use crate::{Error, Result};

/// Maximum packed size of a relation: `d^r <= 2^24` cells.
const MAX_PACKED_BITS: u32 = 24;

/// A finite relation with an explicit domain size.
///
/// Tuples are kept sorted lexicographically (which coincides with ascending
/// packed index) and mirrored in a bitset over `[d]^r` for O(1) membership.
/// Arity 0 is the degenerate marker produced by fully restricting a
/// relation; its tuple set is either empty (false) or the single empty
/// tuple (true).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    name: String,
    domain_size: usize,
    arity: usize,
    tuples: Vec<Vec<u16>>,
    mask: BitSet,
}

impl Relation {
    pub fn new(
        name: impl Into<String>,
        domain_size: usize,
        arity: usize,
        tuples: impl IntoIterator<Item = Vec<u16>>,
    ) -> Result<Relation> {
        let name = name.into();
        if domain_size == 0 {
            return Err(Error::invalid(format!("relation {name}: domain size 0")));
        }
        let cells = packed_cells(domain_size, arity)?;
        let mut mask = BitSet::empty(cells);
        for t in tuples {
            if t.len() != arity {
                return Err(Error::invalid(format!(
                    "relation {name}: tuple {t:?} has length {}, arity is {arity}",
                    t.len()
                )));
            }
            if t.iter().any(|&v| v as usize >= domain_size) {
                return Err(Error::invalid(format!(
                    "relation {name}: tuple {t:?} out of domain [{domain_size}]"
                )));
            }
            mask.insert(pack(&t, domain_size));
        }
        let tuples = (0..cells)
            .filter(|&i| mask.contains(i))
            .map(|i| unpack(i, domain_size, arity))
            .collect();
        Ok(Relation {
            name,
            domain_size,
            arity,
            tuples,
            mask,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Tuples in lexicographic order.
    pub fn tuples(&self) -> &[Vec<u16>] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, t: &[u16]) -> bool {
        debug_assert_eq!(t.len(), self.arity);
        self.mask.contains(pack(t, self.domain_size))
    }

    pub fn renamed(&self, name: impl Into<String>) -> Relation {
        let mut r = self.clone();
        r.name = name.into();
        r
    }

    /// Same tuple set, ignoring the name.
    pub fn same_content(&self, other: &Relation) -> bool {
        self.domain_size == other.domain_size
            && self.arity == other.arity
            && self.tuples == other.tuples
    }

    /// Substitute-and-project: keep tuples with `t[coord] = b`, drop the
    /// coordinate. `coord` is 0-indexed. Arity 1 inputs produce the arity-0
    /// marker.
    pub fn restrict(&self, coord: usize, b: u16) -> Result<Relation> {
        if coord >= self.arity {
            return Err(Error::invalid(format!(
                "restrict: coordinate {coord} out of range for arity {}",
                self.arity
            )));
        }
        if b as usize >= self.domain_size {
            return Err(Error::invalid(format!("restrict: value {b} out of domain")));
        }
        let kept = self.tuples.iter().filter(|t| t[coord] == b).map(|t| {
            let mut u = t.clone();
            u.remove(coord);
            u
        });
        Relation::new(
            format!("{}|{},{}", self.name, coord, b),
            self.domain_size,
            self.arity - 1,
            kept,
        )
    }

    /// Projection onto the given coordinates (0-indexed, repetition allowed).
    pub fn projection(&self, coords: &[usize]) -> Result<Relation> {
        if coords.iter().any(|&c| c >= self.arity) {
            return Err(Error::invalid("projection: coordinate out of range"));
        }
        let tuples = self
            .tuples
            .iter()
            .map(|t| coords.iter().map(|&c| t[c]).collect::<Vec<_>>());
        Relation::new(
            format!("{}@{:?}", self.name, coords),
            self.domain_size,
            coords.len(),
            tuples,
        )
    }

    /// Does the all-zero tuple belong to the relation?
    pub fn is_0valid(&self) -> bool {
        self.contains(&vec![0; self.arity])
    }

    pub fn is_boolean(&self) -> bool {
        self.domain_size == 2
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}(d={}, r={}, {} tuples)",
            self.name, self.domain_size, self.arity, self.tuples.len()
        )
    }
}

fn packed_cells(d: usize, r: usize) -> Result<usize> {
    let mut cells = 1usize;
    for _ in 0..r {
        cells = cells
            .checked_mul(d)
            .filter(|&c| c <= 1 << MAX_PACKED_BITS)
            .ok_or_else(|| {
                Error::invalid(format!("relation too large to pack: d={d}, r={r}"))
            })?;
    }
    Ok(cells)
}

fn pack(t: &[u16], d: usize) -> usize {
    t.iter().fold(0usize, |acc, &v| acc * d + v as usize)
}

fn unpack(mut i: usize, d: usize, r: usize) -> Vec<u16> {
    let mut t = vec![0u16; r];
    for k in (0..r).rev() {
        t[k] = (i % d) as u16;
        i /= d;
    }
    t
}

/// Unary guarding map from `[n]` to `[d]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UnaryMap {
    source_size: usize,
    target_size: usize,
    encoding: MapEncoding,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MapEncoding {
    /// Explicit value table of length `n`.
    Table(Vec<u16>),
    /// `m(x) = [x = hot]`; target size is always 2.
    OneHot(usize),
    /// `m(x) = |{i : x >= t_i}|` for weakly increasing thresholds.
    MonotoneThresholds(Vec<usize>),
    /// `m(x) = (d-1) - |{i : x >= t_i}|`.
    AntiMonotoneThresholds(Vec<usize>),
}

impl UnaryMap {
    pub fn table(source_size: usize, target_size: usize, values: Vec<u16>) -> Result<UnaryMap> {
        if values.len() != source_size {
            return Err(Error::invalid("map table length != source size"));
        }
        if values.iter().any(|&v| v as usize >= target_size) {
            return Err(Error::invalid("map table value out of target range"));
        }
        Ok(UnaryMap {
            source_size,
            target_size,
            encoding: MapEncoding::Table(values),
        })
    }

    pub fn one_hot(source_size: usize, hot: usize) -> Result<UnaryMap> {
        if hot >= source_size {
            return Err(Error::invalid("one-hot index out of range"));
        }
        Ok(UnaryMap {
            source_size,
            target_size: 2,
            encoding: MapEncoding::OneHot(hot),
        })
    }

    pub fn monotone(source_size: usize, target_size: usize, thresholds: Vec<usize>) -> Result<UnaryMap> {
        validate_thresholds(source_size, target_size, &thresholds)?;
        Ok(UnaryMap {
            source_size,
            target_size,
            encoding: MapEncoding::MonotoneThresholds(thresholds),
        })
    }

    pub fn anti_monotone(
        source_size: usize,
        target_size: usize,
        thresholds: Vec<usize>,
    ) -> Result<UnaryMap> {
        validate_thresholds(source_size, target_size, &thresholds)?;
        Ok(UnaryMap {
            source_size,
            target_size,
            encoding: MapEncoding::AntiMonotoneThresholds(thresholds),
        })
    }

    /// The Iverson bracket `[x >= a]` over `[n]`.
    pub fn geq(source_size: usize, a: usize) -> UnaryMap {
        UnaryMap::monotone(source_size, 2, vec![a.min(source_size)]).unwrap()
    }

    /// The Iverson bracket `[x <= a]` over `[n]`.
    pub fn leq(source_size: usize, a: usize) -> UnaryMap {
        UnaryMap::anti_monotone(source_size, 2, vec![(a + 1).min(source_size)]).unwrap()
    }

    pub fn identity(n: usize) -> UnaryMap {
        UnaryMap::monotone(n, n, (1..n).collect()).unwrap()
    }

    /// Order reversal `x -> n-1-x`.
    pub fn reversal(n: usize) -> UnaryMap {
        UnaryMap::anti_monotone(n, n, (1..n).collect()).unwrap()
    }

    pub fn source_size(&self) -> usize {
        self.source_size
    }

    pub fn target_size(&self) -> usize {
        self.target_size
    }

    pub fn encoding(&self) -> &MapEncoding {
        &self.encoding
    }

    pub fn apply(&self, x: u16) -> Result<u16> {
        if x as usize >= self.source_size {
            return Err(Error::invalid(format!(
                "map applied to {x}, source size is {}",
                self.source_size
            )));
        }
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: u16) -> u16 {
        match &self.encoding {
            MapEncoding::Table(v) => v[x as usize],
            MapEncoding::OneHot(hot) => (x as usize == *hot) as u16,
            MapEncoding::MonotoneThresholds(ts) => {
                ts.iter().filter(|&&t| x as usize >= t).count() as u16
            }
            MapEncoding::AntiMonotoneThresholds(ts) => {
                (self.target_size - 1 - ts.iter().filter(|&&t| x as usize >= t).count()) as u16
            }
        }
    }

    pub fn induced_table(&self) -> Vec<u16> {
        (0..self.source_size as u16)
            .map(|x| self.apply_unchecked(x))
            .collect()
    }

    /// Pointwise equality, ignoring the encoding.
    pub fn same_map(&self, other: &UnaryMap) -> bool {
        self.source_size == other.source_size
            && self.target_size == other.target_size
            && self.induced_table() == other.induced_table()
    }

    pub fn is_monotone(&self) -> bool {
        let t = self.induced_table();
        t.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn is_anti_monotone(&self) -> bool {
        let t = self.induced_table();
        t.windows(2).all(|w| w[0] >= w[1])
    }

    pub fn is_one_hot(&self) -> bool {
        self.target_size == 2 && self.induced_table().iter().filter(|&&v| v == 1).count() == 1
    }

    pub fn is_identity(&self) -> bool {
        self.source_size == self.target_size
            && self.induced_table().iter().enumerate().all(|(i, &v)| i == v as usize)
    }

    /// Composition `outer . self`; the result is re-tagged as (anti-)monotone
    /// thresholds when the composed table is ordered.
    pub fn compose_after(&self, outer: &UnaryMap) -> Result<UnaryMap> {
        if outer.source_size != self.target_size {
            return Err(Error::invalid(format!(
                "compose: outer source {} != inner target {}",
                outer.source_size, self.target_size
            )));
        }
        let table: Vec<u16> = self
            .induced_table()
            .into_iter()
            .map(|v| outer.apply_unchecked(v))
            .collect();
        UnaryMap::from_table_classified(self.source_size, outer.target_size, table)
    }

    /// Build from a table, choosing a threshold encoding when the table is
    /// weakly increasing or decreasing.
    pub fn from_table_classified(n: usize, d: usize, table: Vec<u16>) -> Result<UnaryMap> {
        if table.windows(2).all(|w| w[0] <= w[1]) {
            let thresholds = thresholds_of(&table, n, d);
            return UnaryMap::monotone(n, d, thresholds);
        }
        if table.windows(2).all(|w| w[0] >= w[1]) {
            let flipped: Vec<u16> = table.iter().map(|&v| (d - 1) as u16 - v).collect();
            let thresholds = thresholds_of(&flipped, n, d);
            return UnaryMap::anti_monotone(n, d, thresholds);
        }
        UnaryMap::table(n, d, table)
    }
}

fn validate_thresholds(n: usize, d: usize, ts: &[usize]) -> Result<()> {
    if d == 0 {
        return Err(Error::invalid("map target size 0"));
    }
    if ts.len() != d - 1 {
        return Err(Error::invalid(format!(
            "threshold map into [{d}] needs {} thresholds, got {}",
            d - 1,
            ts.len()
        )));
    }
    if ts.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::invalid("thresholds must be weakly increasing"));
    }
    if ts.iter().any(|&t| t > n) {
        return Err(Error::invalid("threshold out of [0, n]"));
    }
    Ok(())
}

/// Thresholds recovering a weakly increasing `table` into `[d]`.
fn thresholds_of(table: &[u16], n: usize, d: usize) -> Vec<usize> {
    (1..d)
        .map(|level| {
            table
                .iter()
                .position(|&v| v as usize >= level)
                .unwrap_or(n)
        })
        .collect()
}

/// Designated families of guarding maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapFamilyKind {
    All,
    Id,
    OneHot,
    Monotone,
    AntiMonotone,
    MonotoneAndAnti,
}

impl MapFamilyKind {
    /// Membership is decided from the induced table.
    pub fn contains(&self, m: &UnaryMap) -> bool {
        match self {
            MapFamilyKind::All => true,
            MapFamilyKind::Id => m.is_identity(),
            MapFamilyKind::OneHot => m.is_one_hot(),
            MapFamilyKind::Monotone => m.is_monotone(),
            MapFamilyKind::AntiMonotone => m.is_anti_monotone(),
            MapFamilyKind::MonotoneAndAnti => m.is_monotone() || m.is_anti_monotone(),
        }
    }
}

impl fmt::Display for MapFamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MapFamilyKind::All => "all",
            MapFamilyKind::Id => "id",
            MapFamilyKind::OneHot => "onehot",
            MapFamilyKind::Monotone => "mo",
            MapFamilyKind::AntiMonotone => "anti",
            MapFamilyKind::MonotoneAndAnti => "mo-anti",
        };
        f.write_str(s)
    }
}

/// A finite, named set of relations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstraintLanguage {
    relations: Vec<Relation>,
}

impl ConstraintLanguage {
    pub fn new(relations: impl IntoIterator<Item = Relation>) -> Result<ConstraintLanguage> {
        let mut lang = ConstraintLanguage::default();
        for r in relations {
            lang.insert(r)?;
        }
        Ok(lang)
    }

    pub fn insert(&mut self, r: Relation) -> Result<()> {
        if self.get(r.name()).is_some() {
            return Err(Error::invalid(format!("duplicate relation name {}", r.name())));
        }
        self.relations.push(r);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Relation> {
        self.relations.iter().find(|r| r.name() == name)
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn iter(&self) -> impl Iterator<Item = &Relation> {
        self.relations.iter()
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn is_boolean(&self) -> bool {
        self.relations.iter().all(Relation::is_boolean)
    }

    /// Does some relation with the same tuple content already exist?
    pub fn contains_content(&self, r: &Relation) -> bool {
        self.relations.iter().any(|s| s.same_content(r))
    }

    /// Closure under coordinate restriction at every coordinate and value
    /// (the `Γ*` construction). Boolean languages only. Includes arity-0
    /// markers where full restriction produces them.
    pub fn star(&self) -> Result<ConstraintLanguage> {
        if !self.is_boolean() {
            return Err(Error::invalid("star closure requires a Boolean language"));
        }
        let mut out = self.clone();
        let mut queue: Vec<Relation> = self.relations.clone();
        while let Some(r) = queue.pop() {
            if r.arity() == 0 {
                continue;
            }
            for coord in 0..r.arity() {
                for b in 0..r.domain_size() as u16 {
                    let restricted = r.restrict(coord, b)?;
                    if !out.contains_content(&restricted) {
                        let fresh = restricted.renamed(format!("star{}", out.len()));
                        queue.push(fresh.clone());
                        out.insert(fresh)?;
                    }
                }
            }
        }
        Ok(out)
    }
}

/// The relations named throughout the literature this workbench covers.
pub fn builtin_relations() -> ConstraintLanguage {
    let rel = |name: &str, d: usize, ts: Vec<Vec<u16>>| Relation::new(name, d, ts[0].len(), ts).unwrap();
    let bool_all = |r: usize| -> Vec<Vec<u16>> {
        (0..1usize << r)
            .map(|i| (0..r).map(|j| (i >> (r - 1 - j) & 1) as u16).collect())
            .collect()
    };
    let mut rels = vec![
        rel("Eq", 2, vec![vec![0, 0], vec![1, 1]]),
        rel("Impl", 2, vec![vec![0, 0], vec![0, 1], vec![1, 1]]),
        rel(
            "R3",
            3,
            vec![vec![0, 0], vec![0, 2], vec![1, 1], vec![2, 0], vec![2, 2]],
        ),
        rel("Ra", 3, vec![vec![0, 0], vec![0, 2], vec![1, 1], vec![2, 2]]),
        rel("Rb", 3, vec![vec![0, 2], vec![1, 1], vec![2, 0], vec![2, 2]]),
        rel("Rc", 3, vec![vec![0, 0], vec![0, 2], vec![1, 1], vec![2, 0]]),
        rel("RD", 3, vec![vec![0, 1], vec![1, 0], vec![1, 2], vec![2, 1]]),
        rel(
            "R13",
            2,
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
        ),
        Relation::new("C0", 2, 1, vec![vec![0]]).unwrap(),
        Relation::new("C1", 2, 1, vec![vec![1]]).unwrap(),
    ];
    for m in 2..=4usize {
        let all = bool_all(m);
        let orm: Vec<Vec<u16>> = all.iter().filter(|t| t.contains(&1)).cloned().collect();
        let nandm: Vec<Vec<u16>> = all.iter().filter(|t| t.contains(&0)).cloned().collect();
        let evenm: Vec<Vec<u16>> = all
            .iter()
            .filter(|t| t.iter().map(|&v| v as usize).sum::<usize>() % 2 == 0)
            .cloned()
            .collect();
        rels.push(Relation::new(format!("Or{m}"), 2, m, orm).unwrap());
        rels.push(Relation::new(format!("Nand{m}"), 2, m, nandm).unwrap());
        rels.push(Relation::new(format!("Even{m}"), 2, m, evenm).unwrap());
    }
    let nae: Vec<Vec<u16>> = bool_all(3)
        .into_iter()
        .filter(|t| t.iter().any(|&v| v == 0) && t.iter().any(|&v| v == 1))
        .collect();
    rels.push(Relation::new("NAE", 2, 3, nae).unwrap());
    ConstraintLanguage::new(rels).unwrap()
}

/// A guarded constraint: relation, variable indices, and one map per position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub rel: String,
    pub vars: Vec<usize>,
    pub maps: Vec<UnaryMap>,
}

/// Assignment with an optional null value per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    pub values: Vec<Option<u16>>,
}

impl Assignment {
    pub fn total(values: Vec<u16>) -> Assignment {
        Assignment {
            values: values.into_iter().map(Some).collect(),
        }
    }

    pub fn all_null(k: usize) -> Assignment {
        Assignment {
            values: vec![None; k],
        }
    }

    pub fn is_total(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    pub fn get(&self, var: usize) -> Option<u16> {
        self.values[var]
    }
}

/// A udCSP instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub domain_size: usize,
    pub variables: Vec<String>,
    pub relations: ConstraintLanguage,
    pub constraints: Vec<Constraint>,
    /// Per (variable, value) weight; only the weighted DP reads this.
    pub weights: Option<Vec<Vec<u64>>>,
}

impl Instance {
    pub fn new(
        domain_size: usize,
        variables: Vec<String>,
        relations: ConstraintLanguage,
        constraints: Vec<Constraint>,
    ) -> Result<Instance> {
        let inst = Instance {
            domain_size,
            variables,
            relations,
            constraints,
            weights: None,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.domain_size == 0 {
            return Err(Error::invalid("instance domain size must be >= 1"));
        }
        {
            let mut names: Vec<&String> = self.variables.iter().collect();
            names.sort();
            names.dedup();
            if names.len() != self.variables.len() {
                return Err(Error::invalid("duplicate variable names"));
            }
        }
        for c in &self.constraints {
            let r = self
                .relations
                .get(&c.rel)
                .ok_or_else(|| Error::invalid(format!("unknown relation {}", c.rel)))?;
            if r.arity() == 0 {
                return Err(Error::invalid("constraints over arity-0 relations are disallowed"));
            }
            if c.vars.len() != r.arity() || c.maps.len() != r.arity() {
                return Err(Error::invalid(format!(
                    "constraint on {}: expected {} vars/maps",
                    c.rel,
                    r.arity()
                )));
            }
            if c.vars.iter().any(|&v| v >= self.variables.len()) {
                return Err(Error::invalid("constraint references unknown variable"));
            }
            for m in &c.maps {
                if m.source_size() != self.domain_size {
                    return Err(Error::invalid(format!(
                        "map source size {} != instance domain {}",
                        m.source_size(),
                        self.domain_size
                    )));
                }
                if m.target_size() != r.domain_size() {
                    return Err(Error::invalid(format!(
                        "map target size {} != domain of {}",
                        m.target_size(),
                        c.rel
                    )));
                }
            }
        }
        if let Some(w) = &self.weights {
            if w.len() != self.variables.len()
                || w.iter().any(|row| row.len() != self.domain_size)
            {
                return Err(Error::invalid("weights shape mismatch"));
            }
        }
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    pub fn relation_of(&self, c: &Constraint) -> &Relation {
        self.relations.get(&c.rel).expect("validated constraint")
    }

    /// The language actually used by constraints (distinct names, input order).
    pub fn used_language(&self) -> ConstraintLanguage {
        let mut lang = ConstraintLanguage::default();
        for c in &self.constraints {
            if lang.get(&c.rel).is_none() {
                lang.insert(self.relation_of(c).clone()).unwrap();
            }
        }
        lang
    }

    /// Is `c` satisfied by `a`? All of `c`'s variables must be assigned.
    pub fn constraint_satisfied(&self, c: &Constraint, a: &Assignment) -> Result<bool> {
        let r = self.relation_of(c);
        let mut image = Vec::with_capacity(c.vars.len());
        for (v, m) in c.vars.iter().zip(&c.maps) {
            let x = a
                .get(*v)
                .ok_or_else(|| Error::invalid(format!("variable {} unassigned", self.variables[*v])))?;
            image.push(m.apply(x)?);
        }
        Ok(r.contains(&image))
    }

    pub fn eval(&self, a: &Assignment) -> Result<bool> {
        if a.values.len() != self.num_vars() {
            return Err(Error::invalid("assignment length mismatch"));
        }
        for c in &self.constraints {
            if !self.constraint_satisfied(c, a)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Do all guarding maps belong to `family`?
    pub fn maps_in_family(&self, family: MapFamilyKind) -> bool {
        self.constraints
            .iter()
            .flat_map(|c| c.maps.iter())
            .all(|m| family.contains(m))
    }
}

// ---------------------------------------------------------------------------
// JSON wire format.
//
// Top level: {"domain_size": n, "variables": [..], "relations": {name: {..}},
// "constraints": [..], "weights": {var: [..]}} with MapObj exactly one of
// {"table": [..]}, {"onehot": a}, {"monotone_thresholds": [..]},
// {"antimonotone_thresholds": [..]}.
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct RelationJson {
    domain: usize,
    arity: usize,
    tuples: Vec<Vec<u16>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
enum MapJson {
    #[serde(rename = "table")]
    Table(Vec<u16>),
    #[serde(rename = "onehot")]
    OneHot(usize),
    #[serde(rename = "monotone_thresholds")]
    Monotone(Vec<usize>),
    #[serde(rename = "antimonotone_thresholds")]
    AntiMonotone(Vec<usize>),
}

#[derive(Serialize, Deserialize)]
struct ConstraintJson {
    rel: String,
    vars: Vec<String>,
    maps: Vec<MapJson>,
}

#[derive(Serialize, Deserialize)]
struct InstanceJson {
    domain_size: usize,
    variables: Vec<String>,
    relations: BTreeMap<String, RelationJson>,
    constraints: Vec<ConstraintJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weights: Option<BTreeMap<String, Vec<u64>>>,
}

impl Serialize for Instance {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let relations = self
            .relations
            .iter()
            .map(|r| {
                (
                    r.name().to_string(),
                    RelationJson {
                        domain: r.domain_size(),
                        arity: r.arity(),
                        tuples: r.tuples().to_vec(),
                    },
                )
            })
            .collect();
        let constraints = self
            .constraints
            .iter()
            .map(|c| ConstraintJson {
                rel: c.rel.clone(),
                vars: c.vars.iter().map(|&v| self.variables[v].clone()).collect(),
                maps: c
                    .maps
                    .iter()
                    .map(|m| match m.encoding() {
                        MapEncoding::Table(t) => MapJson::Table(t.clone()),
                        MapEncoding::OneHot(h) => MapJson::OneHot(*h),
                        MapEncoding::MonotoneThresholds(t) => MapJson::Monotone(t.clone()),
                        MapEncoding::AntiMonotoneThresholds(t) => MapJson::AntiMonotone(t.clone()),
                    })
                    .collect(),
            })
            .collect();
        let weights = self.weights.as_ref().map(|w| {
            self.variables
                .iter()
                .cloned()
                .zip(w.iter().cloned())
                .collect()
        });
        InstanceJson {
            domain_size: self.domain_size,
            variables: self.variables.clone(),
            relations,
            constraints,
            weights,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Instance {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = InstanceJson::deserialize(de)?;
        let mut relations = ConstraintLanguage::default();
        for (name, r) in raw.relations {
            let rel = Relation::new(name, r.domain, r.arity, r.tuples).map_err(D::Error::custom)?;
            relations.insert(rel).map_err(D::Error::custom)?;
        }
        let var_idx = |name: &str| {
            raw.variables
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| D::Error::custom(format!("unknown variable {name}")))
        };
        let mut constraints = Vec::new();
        for c in raw.constraints {
            let rel = relations
                .get(&c.rel)
                .ok_or_else(|| D::Error::custom(format!("unknown relation {}", c.rel)))?;
            let d = rel.domain_size();
            let n = raw.domain_size;
            let mut maps = Vec::new();
            for m in c.maps {
                let m = match m {
                    MapJson::Table(t) => UnaryMap::table(n, d, t),
                    MapJson::OneHot(h) => UnaryMap::one_hot(n, h),
                    MapJson::Monotone(t) => UnaryMap::monotone(n, d, t),
                    MapJson::AntiMonotone(t) => UnaryMap::anti_monotone(n, d, t),
                }
                .map_err(D::Error::custom)?;
                maps.push(m);
            }
            let vars = c
                .vars
                .iter()
                .map(|v| var_idx(v))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            constraints.push(Constraint {
                rel: c.rel,
                vars,
                maps,
            });
        }
        let weights = match raw.weights {
            None => None,
            Some(map) => {
                let mut w = vec![Vec::new(); raw.variables.len()];
                for (name, row) in map {
                    w[var_idx(&name)?] = row;
                }
                Some(w)
            }
        };
        let mut inst = Instance::new(raw.domain_size, raw.variables, relations, constraints)
            .map_err(D::Error::custom)?;
        inst.weights = weights;
        inst.validate().map_err(D::Error::custom)?;
        Ok(inst)
    }
}
