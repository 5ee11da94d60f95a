//! Dynamic programming over a contraction sequence of the assignment
//! graph, plus the breakpoint binarization that collapses equivalent
//! domain values of a two-variable constraint.

use std::collections::HashMap;
use std::time::Instant;

use crate::model::{Assignment, Constraint, ConstraintLanguage, Instance, Relation, UnaryMap};
use crate::solvers::{SolveResult, Stats};
use crate::width::{assignment_graph, bags_red, AssignmentGraph, BagPartition, ContractionSequence};
use crate::{Budget, Error, Result};

/// DP state: each variable of the subset is pinned to a live bag; the bag
/// set is the image (every bag carries at least one variable) and must be
/// red-edge connected at its stage.
type StateKey = Vec<Option<usize>>;

/// Per-state value: minimal weight and a representative partial assignment.
type StateVal = (u64, Vec<Option<u16>>);

pub fn solve_twinwidth_dp(
    inst: &Instance,
    seq: &ContractionSequence,
    budget: &Budget,
) -> Result<SolveResult> {
    run_dp(inst, seq, budget, false)
}

/// Weighted variant: minimizes the total per-(variable, value) weight over
/// all solutions.
pub fn solve_twinwidth_dp_weighted(
    inst: &Instance,
    seq: &ContractionSequence,
    budget: &Budget,
) -> Result<SolveResult> {
    run_dp(inst, seq, budget, true)
}

fn run_dp(
    inst: &Instance,
    seq: &ContractionSequence,
    budget: &Budget,
    weighted: bool,
) -> Result<SolveResult> {
    let _ = budget;
    let start = Instant::now();
    let g = assignment_graph(inst)?;
    let k = inst.num_vars();
    let solver = if weighted { "twinwidth-dp-weighted" } else { "twinwidth-dp" };
    if k == 0 {
        let stats = Stats {
            time_ms: start.elapsed().as_millis(),
            ..Stats::default()
        };
        let mut r = SolveResult::sat(inst, solver, Assignment::total(vec![]), stats)?;
        if weighted {
            r.min_weight = Some(0);
        }
        return Ok(r);
    }
    if seq.n != inst.domain_size {
        return Err(Error::invalid("contraction sequence domain size mismatch"));
    }
    if seq.merges.len() + 1 != inst.domain_size {
        return Err(Error::invalid(format!(
            "contraction sequence needs exactly {} merges",
            inst.domain_size - 1
        )));
    }
    let weight = |var: usize, vertex: usize| -> u64 {
        if weighted {
            inst.weights
                .as_ref()
                .map_or(0, |w| w[var][vertex])
        } else {
            0
        }
    };

    let mut states_total = 0u64;
    let mut nodes = 0u64;

    // stage 0: discrete partition, no red edges, single-bag states
    let mut part = BagPartition::discrete(g.n);
    let mut table: HashMap<StateKey, StateVal> = HashMap::new();
    for vertex in 0..g.n {
        for subset in 1..1u32 << k {
            let vars: Vec<usize> = (0..k).filter(|&v| subset >> v & 1 == 1).collect();
            if let Some(val) = base_feasible(&g, &vars, vertex, &weight) {
                let mut key: StateKey = vec![None; k];
                for &v in &vars {
                    key[v] = Some(vertex);
                }
                table.insert(key, val);
            }
            nodes += 1;
        }
    }
    states_total += table.len() as u64;

    for (t, &(a, b)) in seq.merges.iter().enumerate() {
        let new_id = g.n + t;
        let prev_part = part.clone();
        let prev_red = red_adjacency(&g, &prev_part);
        part.merge(a, b, new_id)?;
        let red = red_adjacency(&g, &part);

        let mut next: HashMap<StateKey, StateVal> = HashMap::new();
        for (set, vars_budget) in connected_sets(&part, &red, k) {
            let _ = vars_budget;
            for (key, assignment_vars) in partitions_onto(k, &set) {
                nodes += 1;
                if !set.contains(&new_id) {
                    // untouched by the merge: copy
                    if let Some(val) = table.get(&key) {
                        next.insert(key.clone(), val.clone());
                    }
                    continue;
                }
                let on_new: Vec<usize> = assignment_vars
                    .iter()
                    .filter(|&&(_, bag)| bag == new_id)
                    .map(|&(v, _)| v)
                    .collect();
                let mut best: Option<StateVal> = None;
                for split in 0..1u32 << on_new.len() {
                    let mut prev_key: StateKey = key.clone();
                    for (i, &v) in on_new.iter().enumerate() {
                        prev_key[v] = Some(if split >> i & 1 == 1 { b } else { a });
                    }
                    if let Some(val) =
                        eval_split(&g, &prev_part, &prev_red, &prev_key, &table, k)
                    {
                        if best.as_ref().is_none_or(|(w, _)| val.0 < *w) {
                            best = Some(val);
                        }
                    }
                }
                if let Some(val) = best {
                    next.insert(key, val);
                }
            }
        }
        table = next;
        states_total += table.len() as u64;
    }

    // final state: all variables on the single remaining bag
    let final_bag = part.bags[0].0;
    let key: StateKey = vec![Some(final_bag); k];
    let stats = Stats {
        nodes,
        states: states_total,
        time_ms: start.elapsed().as_millis(),
    };
    match table.get(&key) {
        Some((w, values)) => {
            let witness = Assignment {
                values: values.clone(),
            };
            let mut r = SolveResult::sat(inst, solver, witness, stats)?;
            if weighted {
                r.min_weight = Some(*w);
            }
            Ok(r)
        }
        None => Ok(SolveResult::unsat(solver, stats)),
    }
}

/// Base feasibility of placing `vars` all on one vertex.
fn base_feasible(
    g: &AssignmentGraph,
    vars: &[usize],
    vertex: usize,
    weight: &dyn Fn(usize, usize) -> u64,
) -> Option<StateVal> {
    for &v in vars {
        if !g.unary_ok[v].contains(vertex) {
            return None;
        }
    }
    for &v in vars {
        for &w in vars {
            if v != w && !g.pair(v, w).get(vertex, vertex) {
                return None;
            }
        }
    }
    let mut values = vec![None; g.k];
    let mut total = 0u64;
    for &v in vars {
        values[v] = Some(vertex as u16);
        total += weight(v, vertex);
    }
    Some((total, values))
}

fn red_adjacency(g: &AssignmentGraph, part: &BagPartition) -> HashMap<(usize, usize), bool> {
    let mut adj = HashMap::new();
    for i in 0..part.bags.len() {
        for j in i + 1..part.bags.len() {
            let (ia, va) = (&part.bags[i].0, &part.bags[i].1);
            let (ib, vb) = (&part.bags[j].0, &part.bags[j].1);
            let red = bags_red(g, va, vb);
            adj.insert((*ia, *ib), red);
            adj.insert((*ib, *ia), red);
        }
    }
    adj
}

/// All red-edge-connected bag-id sets with at most `k` bags.
fn connected_sets(
    part: &BagPartition,
    red: &HashMap<(usize, usize), bool>,
    k: usize,
) -> Vec<(Vec<usize>, ())> {
    let ids: Vec<usize> = part.bags.iter().map(|(id, _)| *id).collect();
    let mut out = Vec::new();
    // grow connected sets from each anchor, only adding bags larger than the
    // anchor to avoid duplicates
    fn grow(
        ids: &[usize],
        red: &HashMap<(usize, usize), bool>,
        anchor: usize,
        set: &mut Vec<usize>,
        k: usize,
        out: &mut Vec<(Vec<usize>, ())>,
    ) {
        out.push((set.clone(), ()));
        if set.len() == k {
            return;
        }
        let last = *set.last().unwrap();
        for &cand in ids {
            if cand <= last && set.len() > 1 {
                // allow any order of growth but dedupe by requiring sorted
            }
            if cand <= anchor || set.contains(&cand) || cand < last {
                continue;
            }
            let connected = set.iter().any(|&s| *red.get(&(s, cand)).unwrap_or(&false));
            if connected {
                set.push(cand);
                grow(ids, red, anchor, set, k, out);
                set.pop();
            }
        }
    }
    // sorted growth misses sets whose connecting order is non-monotone; use
    // a subset filter instead for the small bag counts at desk scale
    if ids.len() <= 20 {
        out.clear();
        let m = ids.len();
        for mask in 1u32..1 << m {
            if mask.count_ones() as usize > k {
                continue;
            }
            let set: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).map(|i| ids[i]).collect();
            if is_connected(&set, red) {
                out.push((set, ()));
            }
        }
        return out;
    }
    for &anchor in &ids {
        let mut set = vec![anchor];
        grow(&ids, red, anchor, &mut set, k, &mut out);
    }
    out
}

fn is_connected(set: &[usize], red: &HashMap<(usize, usize), bool>) -> bool {
    if set.len() <= 1 {
        return true;
    }
    let mut seen = vec![set[0]];
    let mut queue = vec![set[0]];
    while let Some(u) = queue.pop() {
        for &v in set {
            if !seen.contains(&v) && *red.get(&(u, v)).unwrap_or(&false) {
                seen.push(v);
                queue.push(v);
            }
        }
    }
    seen.len() == set.len()
}

/// All surjective assignments of nonempty variable subsets onto `set`.
fn partitions_onto(k: usize, set: &[usize]) -> Vec<(StateKey, Vec<(usize, usize)>)> {
    let mut out = Vec::new();
    // choose for each variable: none or one of the bags; keep surjective ones
    let b = set.len();
    let mut choice = vec![0usize; k]; // 0 = unused, 1..=b = bag index
    loop {
        let mut used = vec![false; b];
        let mut key: StateKey = vec![None; k];
        let mut pairs = Vec::new();
        let mut any = false;
        for v in 0..k {
            if choice[v] > 0 {
                key[v] = Some(set[choice[v] - 1]);
                pairs.push((v, set[choice[v] - 1]));
                used[choice[v] - 1] = true;
                any = true;
            }
        }
        if any && used.iter().all(|&u| u) {
            out.push((key, pairs));
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] <= b {
                break;
            }
            choice[pos] = 0;
        }
    }
}

/// Feasibility of a previous-stage partition split into red components:
/// each component's state must hold, and cross-component variable pairs
/// need the label arc between their bags.
fn eval_split(
    g: &AssignmentGraph,
    prev_part: &BagPartition,
    prev_red: &HashMap<(usize, usize), bool>,
    prev_key: &StateKey,
    table: &HashMap<StateKey, StateVal>,
    k: usize,
) -> Option<StateVal> {
    let used: Vec<usize> = {
        let mut u: Vec<usize> = prev_key.iter().flatten().copied().collect();
        u.sort_unstable();
        u.dedup();
        u
    };
    // split the used bags into red components at the previous stage
    let mut comp_of: HashMap<usize, usize> = HashMap::new();
    let mut ncomp = 0;
    for &bag in &used {
        if comp_of.contains_key(&bag) {
            continue;
        }
        let mut queue = vec![bag];
        comp_of.insert(bag, ncomp);
        while let Some(u) = queue.pop() {
            for &v in &used {
                if !comp_of.contains_key(&v) && *prev_red.get(&(u, v)).unwrap_or(&false) {
                    comp_of.insert(v, ncomp);
                    queue.push(v);
                }
            }
        }
        ncomp += 1;
    }
    // component subproblems
    let mut total = 0u64;
    let mut values = vec![None; k];
    for comp in 0..ncomp {
        let mut sub: StateKey = vec![None; k];
        for v in 0..k {
            if let Some(bag) = prev_key[v] {
                if comp_of[&bag] == comp {
                    sub[v] = Some(bag);
                }
            }
        }
        let (w, vals) = table.get(&sub)?;
        total += w;
        for v in 0..k {
            if vals[v].is_some() {
                values[v] = vals[v];
            }
        }
    }
    // cross-component label arcs
    let vertices_of = |bag: usize| -> &[usize] {
        &prev_part
            .bags
            .iter()
            .find(|(id, _)| *id == bag)
            .expect("live bag")
            .1
    };
    for v in 0..k {
        for w in 0..k {
            if v == w {
                continue;
            }
            let (Some(bv), Some(bw)) = (prev_key[v], prev_key[w]) else {
                continue;
            };
            if bv == bw || comp_of[&bv] == comp_of[&bw] {
                continue;
            }
            // non-red pair: the arc is uniform; one cell decides it
            let i = vertices_of(bv)[0];
            let j = vertices_of(bw)[0];
            if !g.pair(v, w).get(i, j) {
                return None;
            }
        }
    }
    Some((total, values))
}

// ---------------------------------------------------------------------------
// Binarization
// ---------------------------------------------------------------------------

/// Re-encode every constraint mentioning at most two distinct variables as
/// a single relation over the compressed domain of breakpoint-equivalence
/// classes, with injective guarding maps on class indices. The solution set
/// is preserved exactly.
pub fn binarize_instance(inst: &Instance, budget: &Budget) -> Result<Instance> {
    let _ = budget;
    let n = inst.domain_size;
    let mut relations = ConstraintLanguage::default();
    let mut constraints = Vec::new();
    let mut fresh = 0usize;
    for c in &inst.constraints {
        let r = inst.relation_of(c);
        let mut distinct = c.vars.clone();
        distinct.sort_unstable();
        distinct.dedup();
        match distinct.len() {
            1 => {
                let v = distinct[0];
                let sat: Vec<bool> = (0..n as u16)
                    .map(|i| {
                        let image: Vec<u16> =
                            c.maps.iter().map(|m| m.apply_unchecked(i)).collect();
                        r.contains(&image)
                    })
                    .collect();
                let classes = classes_of(&sat.iter().map(|&b| vec![b]).collect::<Vec<_>>());
                let dom = classes.count.max(1);
                let tuples: Vec<Vec<u16>> = (0..n)
                    .filter(|&i| sat[i])
                    .map(|i| vec![classes.of[i] as u16])
                    .collect();
                let rel = Relation::new(format!("bin{fresh}"), dom, 1, tuples)?;
                fresh += 1;
                let map = class_map(n, dom, &classes.of)?;
                let name = intern(&mut relations, rel)?;
                constraints.push(Constraint {
                    rel: name,
                    vars: vec![v],
                    maps: vec![map],
                });
            }
            2 => {
                let (v, w) = (distinct[0], distinct[1]);
                // rows indexed by v's value, columns by w's
                let sat: Vec<Vec<bool>> = (0..n as u16)
                    .map(|i| {
                        (0..n as u16)
                            .map(|j| {
                                let image: Vec<u16> = c
                                    .vars
                                    .iter()
                                    .zip(&c.maps)
                                    .map(|(&var, m)| {
                                        m.apply_unchecked(if var == v { i } else { j })
                                    })
                                    .collect();
                                r.contains(&image)
                            })
                            .collect()
                    })
                    .collect();
                let row_classes = classes_of(&sat);
                let transposed: Vec<Vec<bool>> = (0..n)
                    .map(|j| (0..n).map(|i| sat[i][j]).collect())
                    .collect();
                let col_classes = classes_of(&transposed);
                // the lemma bound: at most d*r classes per side
                let dom = (r.domain_size() * r.arity())
                    .max(row_classes.count)
                    .max(col_classes.count)
                    .max(1);
                let mut tuples = Vec::new();
                for i in 0..n {
                    for j in 0..n {
                        if sat[i][j] {
                            tuples.push(vec![row_classes.of[i] as u16, col_classes.of[j] as u16]);
                        }
                    }
                }
                let rel = Relation::new(format!("bin{fresh}"), dom, 2, tuples)?;
                fresh += 1;
                let map_v = class_map(n, dom, &row_classes.of)?;
                let map_w = class_map(n, dom, &col_classes.of)?;
                let name = intern(&mut relations, rel)?;
                constraints.push(Constraint {
                    rel: name,
                    vars: vec![v, w],
                    maps: vec![map_v, map_w],
                });
            }
            0 => {}
            _ => {
                return Err(Error::invalid(format!(
                    "binarization requires <= 2 distinct variables; {} mentions {}",
                    c.rel,
                    distinct.len()
                )))
            }
        }
    }
    let mut out = Instance::new(n, inst.variables.clone(), relations, constraints)?;
    out.weights = inst.weights.clone();
    Ok(out)
}

struct Classes {
    of: Vec<usize>,
    count: usize,
}

/// Equivalence classes of identical behavior rows, numbered by first
/// occurrence (monotone maps make the classes intervals, so the numbering
/// is order-preserving).
fn classes_of<T: PartialEq>(rows: &[Vec<T>]) -> Classes {
    let mut of = Vec::with_capacity(rows.len());
    let mut reps: Vec<&Vec<T>> = Vec::new();
    for row in rows {
        match reps.iter().position(|r| *r == row) {
            Some(i) => of.push(i),
            None => {
                reps.push(row);
                of.push(reps.len() - 1);
            }
        }
    }
    Classes {
        of,
        count: reps.len(),
    }
}

fn class_map(n: usize, dom: usize, of: &[usize]) -> Result<UnaryMap> {
    let table: Vec<u16> = of.iter().map(|&c| c as u16).collect();
    UnaryMap::from_table_classified(n, dom, table)
}

fn intern(lang: &mut ConstraintLanguage, rel: Relation) -> Result<String> {
    if let Some(existing) = lang.iter().find(|r| r.same_content(&rel)) {
        return Ok(existing.name().to_string());
    }
    let name = rel.name().to_string();
    lang.insert(rel)?;
    Ok(name)
}
