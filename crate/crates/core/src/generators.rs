//! Instance generators: graph-separation encodings, hardness-reduction
//! gadgets, permutation constructions, and the Sidon set builder. Every
//! generator has a semantic verifier checking the produced instance against
//! an independent reading of the source problem.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::definability::{formula_to_relation, FgppAtom, FgppFormula};
use crate::model::{
    builtin_relations, Constraint, ConstraintLanguage, Instance, Relation, UnaryMap,
};
use crate::solvers;
use crate::{Budget, Error, Result};

/// Simple digraph with optional source/sink designations.
#[derive(Debug, Clone)]
pub struct Digraph {
    pub num_vertices: usize,
    pub arcs: Vec<(usize, usize)>,
    pub s: Option<usize>,
    pub t: Option<usize>,
}

impl Digraph {
    pub fn new(num_vertices: usize, arcs: Vec<(usize, usize)>) -> Result<Digraph> {
        let mut seen = HashSet::new();
        for &(u, v) in &arcs {
            if u >= num_vertices || v >= num_vertices {
                return Err(Error::invalid("arc endpoint out of range"));
            }
            if u == v {
                return Err(Error::invalid("self-loops are not allowed"));
            }
            if !seen.insert((u, v)) {
                return Err(Error::invalid("parallel arcs are not allowed"));
            }
        }
        Ok(Digraph {
            num_vertices,
            arcs,
            s: None,
            t: None,
        })
    }

    pub fn with_st(mut self, s: usize, t: usize) -> Result<Digraph> {
        if s == t || s >= self.num_vertices || t >= self.num_vertices {
            return Err(Error::invalid("invalid s/t designation"));
        }
        self.s = Some(s);
        self.t = Some(t);
        Ok(self)
    }
}

// ---------------------------------------------------------------------------
// Multicoloured clique
// ---------------------------------------------------------------------------

/// Encode multicoloured k-clique over {Eq} with unrestricted maps: one
/// variable per ordered colour pair holding an edge, projection constraints
/// tying first components, and flip constraints tying the two orientations.
/// Arcs of `g` are read as undirected edges.
pub fn gen_multicoloured_clique(g: &Digraph, k: usize, coloring: &[usize]) -> Result<Instance> {
    if coloring.len() != g.num_vertices {
        return Err(Error::invalid("coloring length mismatch"));
    }
    if coloring.iter().any(|&c| c >= k) {
        return Err(Error::invalid("colour out of range"));
    }
    let classes: Vec<Vec<usize>> = (0..k)
        .map(|c| (0..g.num_vertices).filter(|&v| coloring[v] == c).collect())
        .collect();
    if let Some(c) = classes.iter().position(Vec::is_empty) {
        return Err(Error::invalid(format!("colour class {c} is empty")));
    }
    let edges: HashSet<(usize, usize)> = g
        .arcs
        .iter()
        .flat_map(|&(u, v)| [(u, v), (v, u)])
        .collect();
    for &(u, v) in &edges {
        if coloring[u] == coloring[v] {
            return Err(Error::invalid("coloring is not proper"));
        }
    }

    // variables x_{i,j} for ordered pairs; lexicographic edge-pair domains
    let mut var_names = Vec::new();
    let mut var_index = HashMap::new();
    let mut domains: Vec<Vec<(usize, usize)>> = Vec::new();
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            let mut dom: Vec<(usize, usize)> = classes[i]
                .iter()
                .flat_map(|&u| classes[j].iter().map(move |&v| (u, v)))
                .filter(|&(u, v)| edges.contains(&(u, v)))
                .collect();
            dom.sort_unstable();
            var_index.insert((i, j), var_names.len());
            var_names.push(format!("x_{i}_{j}"));
            domains.push(dom);
        }
    }
    let n = domains.iter().map(Vec::len).max().unwrap_or(0).max(1);
    let b = builtin_relations();
    let lang = ConstraintLanguage::new(vec![
        b.get("Eq").unwrap().clone(),
        b.get("C0").unwrap().clone(),
    ])?;
    let mut constraints = Vec::new();
    // domain guards: values beyond the serialized domain are forbidden;
    // an empty domain forbids everything
    for (vi, dom) in domains.iter().enumerate() {
        if dom.len() == n {
            continue;
        }
        let table: Vec<u16> = (0..n).map(|x| u16::from(x >= dom.len())).collect();
        constraints.push(Constraint {
            rel: "C0".into(),
            vars: vec![vi],
            maps: vec![UnaryMap::table(n, 2, table)?],
        });
    }
    // projection constraints: first components agree within a colour class
    for i in 0..k {
        for j in 0..k {
            for j2 in j + 1..k {
                if j == i || j2 == i {
                    continue;
                }
                let a = var_index[&(i, j)];
                let c = var_index[&(i, j2)];
                for &u in &classes[i] {
                    let f: Vec<u16> = (0..n)
                        .map(|x| u16::from(domains[a].get(x).is_some_and(|&(p, _)| p == u)))
                        .collect();
                    let gmap: Vec<u16> = (0..n)
                        .map(|x| u16::from(domains[c].get(x).is_some_and(|&(p, _)| p == u)))
                        .collect();
                    constraints.push(Constraint {
                        rel: "Eq".into(),
                        vars: vec![a, c],
                        maps: vec![UnaryMap::table(n, 2, f)?, UnaryMap::table(n, 2, gmap)?],
                    });
                }
            }
        }
    }
    // flip constraints: x_{i,j} = (u,v) iff x_{j,i} = (v,u)
    for i in 0..k {
        for j in i + 1..k {
            let a = var_index[&(i, j)];
            let c = var_index[&(j, i)];
            for (code, &(u, v)) in domains[a].iter().enumerate() {
                let flip_code = domains[c].binary_search(&(v, u)).map_err(|_| {
                    Error::Internal("flip image missing from the mirrored domain".into())
                })?;
                let f: Vec<u16> = (0..n).map(|x| u16::from(x == code)).collect();
                let gmap: Vec<u16> = (0..n).map(|x| u16::from(x == flip_code)).collect();
                constraints.push(Constraint {
                    rel: "Eq".into(),
                    vars: vec![a, c],
                    maps: vec![UnaryMap::table(n, 2, f)?, UnaryMap::table(n, 2, gmap)?],
                });
            }
        }
    }
    Instance::new(n, var_names, lang, constraints)
}

/// Independent clique enumeration: does `g` contain a multicoloured
/// k-clique?
pub fn has_multicoloured_clique(g: &Digraph, k: usize, coloring: &[usize]) -> bool {
    let classes: Vec<Vec<usize>> = (0..k)
        .map(|c| (0..g.num_vertices).filter(|&v| coloring[v] == c).collect())
        .collect();
    let edges: HashSet<(usize, usize)> = g
        .arcs
        .iter()
        .flat_map(|&(u, v)| [(u, v), (v, u)])
        .collect();
    fn rec(
        classes: &[Vec<usize>],
        edges: &HashSet<(usize, usize)>,
        chosen: &mut Vec<usize>,
    ) -> bool {
        if chosen.len() == classes.len() {
            return true;
        }
        for &v in &classes[chosen.len()] {
            if chosen.iter().all(|&u| edges.contains(&(u, v))) {
                chosen.push(v);
                if rec(classes, edges, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    rec(&classes, &edges, &mut Vec::new())
}

pub fn verify_multicoloured_clique(
    g: &Digraph,
    k: usize,
    coloring: &[usize],
    budget: &Budget,
) -> Result<()> {
    let inst = gen_multicoloured_clique(g, k, coloring)?;
    let sat = solvers::solve_bruteforce(&inst, budget)?.is_sat();
    let clique = has_multicoloured_clique(g, k, coloring);
    if sat != clique {
        return Err(Error::Internal(format!(
            "clique encoding disagrees: CSP sat={sat}, clique exists={clique}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Exact 3-hitting set
// ---------------------------------------------------------------------------

/// One variable per 3-element set over domain [3]; Eq coordination between
/// positions holding the same element; one-hot maps.
pub fn gen_exact_3hs(sets: &[Vec<usize>]) -> Result<Instance> {
    for s in sets {
        if s.len() != 3 {
            return Err(Error::invalid("every set must have exactly 3 elements"));
        }
        let mut d = s.clone();
        d.sort_unstable();
        d.dedup();
        if d.len() != 3 {
            return Err(Error::invalid("set elements must be distinct"));
        }
    }
    let b = builtin_relations();
    let lang = ConstraintLanguage::new(vec![b.get("Eq").unwrap().clone()])?;
    let mut constraints = Vec::new();
    for (i, si) in sets.iter().enumerate() {
        for (j, sj) in sets.iter().enumerate().skip(i + 1) {
            for (a, &ea) in si.iter().enumerate() {
                for (bb, &eb) in sj.iter().enumerate() {
                    if ea == eb {
                        constraints.push(Constraint {
                            rel: "Eq".into(),
                            vars: vec![i, j],
                            maps: vec![UnaryMap::one_hot(3, a)?, UnaryMap::one_hot(3, bb)?],
                        });
                    }
                }
            }
        }
    }
    Instance::new(
        3,
        (0..sets.len()).map(|i| format!("set{i}")).collect(),
        lang,
        constraints,
    )
}

/// Brute-force exact 3-hitting set over the element universe.
pub fn has_exact_3hs(sets: &[Vec<usize>]) -> bool {
    let mut universe: Vec<usize> = sets.iter().flatten().copied().collect();
    universe.sort_unstable();
    universe.dedup();
    let m = universe.len();
    for mask in 0..1u64 << m {
        let chosen: HashSet<usize> = universe
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        if sets
            .iter()
            .all(|s| s.iter().filter(|e| chosen.contains(e)).count() == 1)
        {
            return true;
        }
    }
    false
}

pub fn verify_exact_3hs(sets: &[Vec<usize>], budget: &Budget) -> Result<()> {
    let inst = gen_exact_3hs(sets)?;
    let sat = solvers::solve_bruteforce(&inst, budget)?.is_sat();
    let hs = has_exact_3hs(sets);
    if sat != hs {
        return Err(Error::Internal(format!(
            "3HS encoding disagrees: CSP sat={sat}, hitting set exists={hs}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// NAE-Integer-3-SAT
// ---------------------------------------------------------------------------

pub type NaeClause = [(usize, usize); 3];

/// Clauses NAE(x <= a1, y <= a2, z <= a3) over R_NAE with anti-monotone
/// maps; thresholds are 0-indexed domain values.
pub fn gen_nae(clauses: &[NaeClause], n: usize, k: usize) -> Result<Instance> {
    let b = builtin_relations();
    let lang = ConstraintLanguage::new(vec![b.get("NAE").unwrap().clone()])?;
    let mut constraints = Vec::new();
    for cl in clauses {
        for &(v, a) in cl {
            if v >= k {
                return Err(Error::invalid("clause variable out of range"));
            }
            if a >= n {
                return Err(Error::invalid("clause threshold out of range"));
            }
        }
        constraints.push(Constraint {
            rel: "NAE".into(),
            vars: cl.iter().map(|&(v, _)| v).collect(),
            maps: cl.iter().map(|&(_, a)| UnaryMap::leq(n, a)).collect(),
        });
    }
    Instance::new(n, (0..k).map(|i| format!("x{i}")).collect(), lang, constraints)
}

pub fn verify_nae(clauses: &[NaeClause], n: usize, k: usize, budget: &Budget) -> Result<()> {
    let inst = gen_nae(clauses, n, k)?;
    let by_oracle = solvers::count_solutions(&inst, budget)?;
    // direct clause evaluation
    let mut direct = 0u64;
    let mut values = vec![0usize; k];
    loop {
        let ok = clauses.iter().all(|cl| {
            let bits: Vec<bool> = cl.iter().map(|&(v, a)| values[v] <= a).collect();
            bits.iter().any(|&x| x) && bits.iter().any(|&x| !x)
        });
        if ok {
            direct += 1;
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                if by_oracle != direct {
                    return Err(Error::Internal(format!(
                        "NAE encoding disagrees: oracle={by_oracle}, direct={direct}"
                    )));
                }
                return Ok(());
            }
            pos -= 1;
            values[pos] += 1;
            if values[pos] < n {
                break;
            }
            values[pos] = 0;
        }
    }
}

// ---------------------------------------------------------------------------
// st-min-cut encoding
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoordinationKind {
    /// R3 = {00,02,11,20,22}: cut e iff cut e'.
    Iff,
    /// R_a = {00,02,11,22}: additionally forbids s-side/t-side split.
    Chain,
    /// R_b = {02,11,20,22}: additionally forbids both on the t-side.
    Coupled,
    /// R_c = {00,02,11,20}: additionally forbids both on the s-side.
    Dual,
}

pub type Coordination = ((usize, usize), (usize, usize), CoordinationKind);

/// Unit-capacity max flow by BFS augmentation, decomposed into arc-disjoint
/// s-t paths (each path a list of arcs).
pub fn max_flow_paths(g: &Digraph, s: usize, t: usize) -> Vec<Vec<(usize, usize)>> {
    let arcs: HashSet<(usize, usize)> = g.arcs.iter().copied().collect();
    let mut flow: HashSet<(usize, usize)> = HashSet::new();
    loop {
        // residual BFS
        let mut prev: HashMap<usize, usize> = HashMap::new();
        prev.insert(s, s);
        let mut queue = VecDeque::from([s]);
        'bfs: while let Some(u) = queue.pop_front() {
            let mut nexts: Vec<usize> = Vec::new();
            for &(a, bb) in &arcs {
                if a == u && !flow.contains(&(a, bb)) {
                    nexts.push(bb);
                }
            }
            for &(a, bb) in &flow {
                if bb == u {
                    nexts.push(a);
                }
            }
            nexts.sort_unstable();
            for v in nexts {
                if let std::collections::hash_map::Entry::Vacant(e) = prev.entry(v) {
                    e.insert(u);
                    if v == t {
                        break 'bfs;
                    }
                    queue.push_back(v);
                }
            }
        }
        if !prev.contains_key(&t) {
            break;
        }
        let mut v = t;
        while v != s {
            let u = prev[&v];
            if flow.contains(&(v, u)) {
                flow.remove(&(v, u));
            } else {
                flow.insert((u, v));
            }
            v = u;
        }
    }
    // greedy arc-disjoint walk decomposition
    let mut out_adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for &(u, v) in &flow {
        out_adj.entry(u).or_default().push(v);
    }
    for vs in out_adj.values_mut() {
        vs.sort_unstable();
    }
    let mut paths = Vec::new();
    while out_adj.get(&s).is_some_and(|v| !v.is_empty()) {
        let mut path = Vec::new();
        let mut u = s;
        while u != t {
            let nexts = out_adj.get_mut(&u).expect("flow conservation");
            let v = nexts.remove(0);
            path.push((u, v));
            u = v;
        }
        paths.push(path);
    }
    paths
}

/// Directly enumerate the st-min cuts (edge subsets of minimum
/// cardinality whose removal disconnects t from s).
pub fn enumerate_min_cuts(g: &Digraph, s: usize, t: usize) -> Vec<Vec<(usize, usize)>> {
    let lambda = max_flow_paths(g, s, t).len();
    let reachable = |removed: &[(usize, usize)]| -> bool {
        let removed: HashSet<(usize, usize)> = removed.iter().copied().collect();
        let mut seen = HashSet::from([s]);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &(a, b) in &g.arcs {
                if a == u && !removed.contains(&(a, b)) && seen.insert(b) {
                    queue.push_back(b);
                }
            }
        }
        seen.contains(&t)
    };
    let mut cuts = Vec::new();
    let m = g.arcs.len();
    // all size-lambda subsets
    fn combos(m: usize, l: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(m: usize, l: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == l {
                out.push(cur.clone());
                return;
            }
            for i in start..m {
                cur.push(i);
                rec(m, l, i + 1, cur, out);
                cur.pop();
            }
        }
        rec(m, l, 0, &mut cur, &mut out);
        out
    }
    for combo in combos(m, lambda) {
        let removed: Vec<(usize, usize)> = combo.iter().map(|&i| g.arcs[i]).collect();
        if !reachable(&removed) {
            cuts.push(removed);
        }
    }
    cuts
}

/// Solutions in bijection with st-min cuts: one variable per flow path
/// whose value is the index of the cut edge; Impl constraints for every
/// off-path connection between path vertices, and 0-constraints for path
/// vertices that can escape to t off-path. Coordination constraints pair up
/// two on-path edges through threshold maps into the named relation.
pub fn gen_mincut(g: &Digraph, coordination: &[Coordination]) -> Result<Instance> {
    let (s, t) = match (g.s, g.t) {
        (Some(s), Some(t)) => (s, t),
        _ => return Err(Error::invalid("min-cut generator needs s and t")),
    };
    let paths = max_flow_paths(g, s, t);
    let k = paths.len();
    let path_arcs: HashSet<(usize, usize)> = paths.iter().flatten().copied().collect();
    let path_vertices: HashSet<usize> = path_arcs.iter().flat_map(|&(u, v)| [u, v]).collect();

    // reach(u -> v) through arcs outside the flow paths, internal vertices
    // outside V(P)
    let reaches = |from: usize, to: usize| -> bool {
        if from == to {
            return true;
        }
        let mut seen = HashSet::from([from]);
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            for &(a, b) in &g.arcs {
                if a != u || path_arcs.contains(&(a, b)) || seen.contains(&b) {
                    continue;
                }
                if b == to {
                    return true;
                }
                seen.insert(b);
                if !path_vertices.contains(&b) {
                    queue.push_back(b);
                }
            }
        }
        false
    };

    let n = paths.iter().map(Vec::len).max().unwrap_or(0).max(1);
    let b = builtin_relations();
    let lang = ConstraintLanguage::new(vec![
        b.get("Impl").unwrap().clone(),
        b.get("C0").unwrap().clone(),
        b.get("R3").unwrap().clone(),
        b.get("Ra").unwrap().clone(),
        b.get("Rb").unwrap().clone(),
        b.get("Rc").unwrap().clone(),
    ])?;
    let mut constraints = Vec::new();
    // domain guards
    for (i, p) in paths.iter().enumerate() {
        if p.len() < n {
            constraints.push(Constraint {
                rel: "C0".into(),
                vars: vec![i],
                maps: vec![UnaryMap::geq(n, p.len())],
            });
        }
    }
    // cross-path and same-path implications, plus escapes to t
    for (i, pi) in paths.iter().enumerate() {
        for (a, &(u, _)) in pi.iter().enumerate() {
            if reaches(u, t) {
                constraints.push(Constraint {
                    rel: "C0".into(),
                    vars: vec![i],
                    maps: vec![UnaryMap::geq(n, a)],
                });
            }
            for (j, pj) in paths.iter().enumerate() {
                for (bb, &(v, _)) in pj.iter().enumerate() {
                    if (u, i) == (v, j) || !reaches(u, v) {
                        continue;
                    }
                    constraints.push(Constraint {
                        rel: "Impl".into(),
                        vars: vec![i, j],
                        maps: vec![UnaryMap::geq(n, a), UnaryMap::geq(n, bb)],
                    });
                }
            }
        }
    }
    // coordination constraints on pairs of on-path edges
    let locate = |e: (usize, usize)| -> Result<(usize, usize)> {
        for (i, p) in paths.iter().enumerate() {
            if let Some(a) = p.iter().position(|&x| x == e) {
                return Ok((i, a));
            }
        }
        Err(Error::invalid(format!(
            "coordination edge {e:?} lies on no flow path"
        )))
    };
    for &(e1, e2, kind) in coordination {
        let (i, a) = locate(e1)?;
        let (j, bb) = locate(e2)?;
        let rel = match kind {
            CoordinationKind::Iff => "R3",
            CoordinationKind::Chain => "Ra",
            CoordinationKind::Coupled => "Rb",
            CoordinationKind::Dual => "Rc",
        };
        let fmap = |pos: usize| UnaryMap::monotone(n, 3, vec![pos, pos + 1]).unwrap();
        constraints.push(Constraint {
            rel: rel.into(),
            vars: vec![i, j],
            maps: vec![fmap(a), fmap(bb)],
        });
    }
    Instance::new(
        n,
        (0..k).map(|i| format!("X{i}")).collect(),
        lang,
        constraints,
    )
}

/// Without coordination, solutions biject with st-min cuts.
pub fn verify_mincut(g: &Digraph, budget: &Budget) -> Result<()> {
    let inst = gen_mincut(g, &[])?;
    let sols = solvers::count_solutions(&inst, budget)?;
    let cuts = enumerate_min_cuts(g, g.s.unwrap(), g.t.unwrap()).len() as u64;
    if sols != cuts {
        return Err(Error::Internal(format!(
            "min-cut bijection broken: {sols} solutions vs {cuts} min cuts"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Permutation gadgets
// ---------------------------------------------------------------------------

fn permutation_graph(perm: &[usize]) -> Result<Relation> {
    let n = perm.len();
    let mut sorted = perm.to_vec();
    sorted.sort_unstable();
    if sorted != (0..n).collect::<Vec<_>>() {
        return Err(Error::invalid("not a permutation"));
    }
    Relation::new(
        "sigma",
        n,
        2,
        perm.iter().enumerate().map(|(i, &v)| vec![i as u16, v as u16]),
    )
}

/// The permutation graph defined from R3 by threshold maps
/// f_t(x) = 0 if x < t, 1 at t, 2 above; one atom per pair of the graph.
pub fn gen_permutation_via_r3(perm: &[usize]) -> Result<(FgppFormula, Instance)> {
    let n = perm.len();
    let graph = permutation_graph(perm)?;
    let b = builtin_relations();
    let r3 = b.get("R3").unwrap().clone();
    let f = |tpos: usize| UnaryMap::monotone(n, 3, vec![tpos, tpos + 1]).unwrap();
    let atoms: Vec<FgppAtom> = graph
        .tuples()
        .iter()
        .map(|t| FgppAtom {
            relation: r3.clone(),
            positions: vec![0, 1],
            maps: vec![f(t[0] as usize), f(t[1] as usize)],
        })
        .collect();
    let formula = FgppFormula {
        target_arity: 2,
        target_domain: n,
        atoms,
    };
    let lang = ConstraintLanguage::new(vec![r3])?;
    let constraints = formula
        .atoms
        .iter()
        .map(|a| Constraint {
            rel: "R3".into(),
            vars: vec![0, 1],
            maps: a.maps.clone(),
        })
        .collect();
    let inst = Instance::new(n, vec!["x".into(), "y".into()], lang, constraints)?;
    Ok((formula, inst))
}

pub fn verify_permutation_via_r3(perm: &[usize], budget: &Budget) -> Result<()> {
    let (formula, inst) = gen_permutation_via_r3(perm)?;
    let graph = permutation_graph(perm)?;
    let eval = formula_to_relation(&formula, perm.len())?;
    if !eval.same_content(&graph) {
        return Err(Error::Internal("R3 permutation formula does not evaluate to the graph".into()));
    }
    let proj = solvers::solution_projection(&inst, 0, 1, budget)?;
    if !proj.same_content(&graph) {
        return Err(Error::Internal("R3 permutation instance solutions differ from the graph".into()));
    }
    Ok(())
}

/// Permutations from Even_4: the constraint
/// Even_4([x>=i],[x>=i+1],[y>=j],[y>=j+1]) forces x=i iff y=j.
pub fn gen_even4_permutation(perm: &[usize]) -> Result<Instance> {
    let n = perm.len();
    let graph = permutation_graph(perm)?;
    let b = builtin_relations();
    let lang = ConstraintLanguage::new(vec![b.get("Even4").unwrap().clone()])?;
    let constraints = graph
        .tuples()
        .iter()
        .map(|t| {
            let (i, j) = (t[0] as usize, t[1] as usize);
            Constraint {
                rel: "Even4".into(),
                vars: vec![0, 0, 1, 1],
                maps: vec![
                    UnaryMap::geq(n, i),
                    UnaryMap::geq(n, i + 1),
                    UnaryMap::geq(n, j),
                    UnaryMap::geq(n, j + 1),
                ],
            }
        })
        .collect();
    Instance::new(n, vec!["x".into(), "y".into()], lang, constraints)
}

pub fn verify_even4_permutation(perm: &[usize], budget: &Budget) -> Result<()> {
    let inst = gen_even4_permutation(perm)?;
    let graph = permutation_graph(perm)?;
    let proj = solvers::solution_projection(&inst, 0, 1, budget)?;
    if !proj.same_content(&graph) {
        return Err(Error::Internal(
            "Even4 permutation instance solutions differ from the graph".into(),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Sidon sets
// ---------------------------------------------------------------------------

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The quadratic construction `{ 2*p*a + (a^2 mod p) : a in [0, n) }` with
/// the smallest odd prime p >= n; all pairwise sums are distinct and the
/// largest element stays below 2p^2.
pub fn sidon_set(n: usize) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::invalid("sidon_set needs n >= 1"));
    }
    let mut p = (n as u64).max(3);
    while !is_prime(p) || p == 2 {
        p += 1;
    }
    let set: Vec<u64> = (0..n as u64).map(|a| 2 * p * a + (a * a) % p).collect();
    verify_sidon(&set)?;
    let bound = 2 * p * p;
    if let Some(&max) = set.iter().max() {
        if max > bound {
            return Err(Error::Internal(format!(
                "sidon element {max} exceeds the 2p^2 bound {bound}"
            )));
        }
    }
    Ok(set)
}

/// All pairwise sums (with repetition) are distinct.
pub fn verify_sidon(set: &[u64]) -> Result<()> {
    let mut sums = HashSet::new();
    for (i, &a) in set.iter().enumerate() {
        for &b in &set[i..] {
            if !sums.insert(a + b) {
                return Err(Error::Internal(format!(
                    "sidon property violated: duplicate sum {}",
                    a + b
                )));
            }
        }
    }
    Ok(())
}

/// The chosen prime, exposed for the size bound check.
pub fn sidon_prime(n: usize) -> u64 {
    let mut p = (n as u64).max(3);
    while !is_prime(p) || p == 2 {
        p += 1;
    }
    p
}

// ---------------------------------------------------------------------------
// Diamond and half-graph
// ---------------------------------------------------------------------------

/// The n-diamond relation (n even) together with its definition over
/// {R_D} by three-valued threshold maps.
pub fn gen_diamond(n: usize) -> Result<(Relation, FgppFormula)> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::invalid("diamond needs an even n >= 2"));
    }
    let h = n / 2;
    let mut tuples = Vec::new();
    for a in 0..h {
        tuples.push(vec![a as u16, (h - 1 - a) as u16]);
        tuples.push(vec![a as u16, (h + a) as u16]);
        tuples.push(vec![(h + a) as u16, a as u16]);
        tuples.push(vec![(h + a) as u16, (n - 1 - a) as u16]);
    }
    let rel = Relation::new(format!("diamond{n}"), n, 2, tuples)?;
    let b = builtin_relations();
    let rd = b.get("RD").unwrap().clone();
    // f_t(i) = 0 for i < t, 1 for t <= i < n-t, 2 for i >= n-t
    let f = |t: usize| UnaryMap::monotone(n, 3, vec![t, n - t]).unwrap();
    let atoms = (1..h)
        .map(|a| FgppAtom {
            relation: rd.clone(),
            positions: vec![0, 1],
            maps: vec![f(a), f(h - a)],
        })
        .collect();
    let formula = FgppFormula {
        target_arity: 2,
        target_domain: n,
        atoms,
    };
    Ok((rel, formula))
}

/// The half-graph {(i,j) : i <= j} with its Impl definition.
pub fn gen_halfgraph(n: usize) -> Result<(Relation, FgppFormula)> {
    if n == 0 {
        return Err(Error::invalid("half-graph needs n >= 1"));
    }
    let tuples = (0..n as u16).flat_map(|i| (i..n as u16).map(move |j| vec![i, j]));
    let rel = Relation::new(format!("half{n}"), n, 2, tuples)?;
    let b = builtin_relations();
    let imp = b.get("Impl").unwrap().clone();
    let atoms = (1..n)
        .map(|i| FgppAtom {
            relation: imp.clone(),
            positions: vec![0, 1],
            maps: vec![UnaryMap::geq(n, i), UnaryMap::geq(n, i)],
        })
        .collect();
    let formula = FgppFormula {
        target_arity: 2,
        target_domain: n,
        atoms,
    };
    Ok((rel, formula))
}

pub fn verify_diamond(n: usize) -> Result<()> {
    let (rel, formula) = gen_diamond(n)?;
    let eval = formula_to_relation(&formula, n)?;
    if !eval.same_content(&rel) {
        return Err(Error::Internal(format!(
            "diamond formula evaluates to {:?}, relation is {:?}",
            eval.tuples(),
            rel.tuples()
        )));
    }
    Ok(())
}

pub fn verify_halfgraph(n: usize) -> Result<()> {
    let (rel, formula) = gen_halfgraph(n)?;
    let eval = formula_to_relation(&formula, n)?;
    if !eval.same_content(&rel) {
        return Err(Error::Internal("half-graph formula mismatch".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget() -> Budget {
        Budget::default()
    }

    #[test]
    fn clique_triangle_sat_path_unsat() {
        // K3, three colours
        let k3 = Digraph::new(3, vec![(0, 1), (0, 2), (1, 2)]).unwrap();
        verify_multicoloured_clique(&k3, 3, &[0, 1, 2], &budget()).unwrap();
        let inst = gen_multicoloured_clique(&k3, 3, &[0, 1, 2]).unwrap();
        assert!(solvers::solve_bruteforce(&inst, &budget()).unwrap().is_sat());

        // path on 3 vertices: no triangle
        let p3 = Digraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        verify_multicoloured_clique(&p3, 3, &[0, 1, 2], &budget()).unwrap();
        let inst = gen_multicoloured_clique(&p3, 3, &[0, 1, 2]).unwrap();
        assert!(!solvers::solve_bruteforce(&inst, &budget()).unwrap().is_sat());
    }

    #[test]
    fn clique_k1_trivial_and_empty_class_error() {
        let g = Digraph::new(2, vec![]).unwrap();
        let inst = gen_multicoloured_clique(&g, 1, &[0, 0]).unwrap();
        assert!(solvers::solve_bruteforce(&inst, &budget()).unwrap().is_sat());
        assert!(gen_multicoloured_clique(&g, 2, &[0, 0]).is_err());
    }

    #[test]
    fn exact_3hs_examples() {
        verify_exact_3hs(&[vec![0, 1, 2]], &budget()).unwrap();
        verify_exact_3hs(&[vec![0, 1, 2], vec![0, 1, 3]], &budget()).unwrap();
        // pairwise-overlapping family with no exact hitting set
        let unsat = vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]];
        assert!(!has_exact_3hs(&unsat));
        verify_exact_3hs(&unsat, &budget()).unwrap();
        assert!(gen_exact_3hs(&[vec![0, 1]]).is_err());
        assert!(gen_exact_3hs(&[vec![0, 1, 1]]).is_err());
    }

    #[test]
    fn nae_single_clause_and_contradiction() {
        verify_nae(&[[(0, 0), (0, 0), (1, 1)]], 2, 2, &budget()).unwrap();
        let inst = gen_nae(&[[(0, 0), (0, 0), (0, 0)]], 2, 1).unwrap();
        // NAE(x<=0, x<=0, x<=0): all three brackets equal, never satisfiable
        assert!(!solvers::solve_bruteforce(&inst, &budget()).unwrap().is_sat());
        verify_nae(&[[(0, 0), (0, 0), (0, 0)]], 2, 1, &budget()).unwrap();
    }

    #[test]
    fn mincut_path_examples() {
        // s -> a -> t: one path of two edges, two cuts
        let g = Digraph::new(3, vec![(0, 1), (1, 2)])
            .unwrap()
            .with_st(0, 2)
            .unwrap();
        let inst = gen_mincut(&g, &[]).unwrap();
        assert_eq!(inst.num_vars(), 1);
        assert_eq!(solvers::count_solutions(&inst, &budget()).unwrap(), 2);
        verify_mincut(&g, &budget()).unwrap();

        // two disjoint length-2 paths: 4 cuts
        let g = Digraph::new(4, vec![(0, 1), (1, 3), (0, 2), (2, 3)])
            .unwrap()
            .with_st(0, 3)
            .unwrap();
        let inst = gen_mincut(&g, &[]).unwrap();
        assert_eq!(solvers::count_solutions(&inst, &budget()).unwrap(), 4);
        verify_mincut(&g, &budget()).unwrap();
    }

    #[test]
    fn mincut_diamond_with_cross_arc() {
        let g = Digraph::new(4, vec![(0, 1), (0, 2), (1, 3), (2, 3), (1, 2)])
            .unwrap()
            .with_st(0, 3)
            .unwrap();
        verify_mincut(&g, &budget()).unwrap();
    }

    #[test]
    fn mincut_escape_to_t_is_constrained() {
        // 0->1->{2,3}, 2->3, 0->3 over s=0, t=3: the unique min cut is
        // {(0,3),(0,1)}
        let g = Digraph::new(4, vec![(0, 3), (0, 1), (1, 3), (1, 2), (2, 3)])
            .unwrap()
            .with_st(0, 3)
            .unwrap();
        let inst = gen_mincut(&g, &[]).unwrap();
        assert_eq!(solvers::count_solutions(&inst, &budget()).unwrap(), 1);
        verify_mincut(&g, &budget()).unwrap();
    }

    #[test]
    fn mincut_coordination_constrains_cuts() {
        // two disjoint paths; iff-coordination of the first edges
        let g = Digraph::new(4, vec![(0, 1), (1, 3), (0, 2), (2, 3)])
            .unwrap()
            .with_st(0, 3)
            .unwrap();
        let inst = gen_mincut(&g, &[((0, 1), (0, 2), CoordinationKind::Iff)]).unwrap();
        // cuts: both first edges or both second edges
        assert_eq!(solvers::count_solutions(&inst, &budget()).unwrap(), 2);
        let bad = gen_mincut(&g, &[((1, 2), (0, 2), CoordinationKind::Iff)]);
        assert!(bad.is_err());
    }

    #[test]
    fn permutation_gadgets_match() {
        for perm in [vec![0usize, 1, 2], vec![1, 2, 0], vec![2, 1, 0]] {
            verify_permutation_via_r3(&perm, &budget()).unwrap();
            verify_even4_permutation(&perm, &budget()).unwrap();
            // both encodings have identical solution sets
            let (_, inst_r3) = gen_permutation_via_r3(&perm).unwrap();
            let inst_e4 = gen_even4_permutation(&perm).unwrap();
            let p1 = solvers::solution_projection(&inst_r3, 0, 1, &budget()).unwrap();
            let p2 = solvers::solution_projection(&inst_e4, 0, 1, &budget()).unwrap();
            assert!(p1.same_content(&p2));
        }
        verify_permutation_via_r3(&[3, 2, 1, 0], &budget()).unwrap();
        let (f, _) = gen_permutation_via_r3(&[0, 1, 2]).unwrap();
        let eval = formula_to_relation(&f, 3).unwrap();
        assert_eq!(eval.tuples(), &[vec![0, 0], vec![1, 1], vec![2, 2]]);
    }

    #[test]
    fn sidon_examples() {
        assert_eq!(sidon_set(3).unwrap(), vec![0, 7, 13]);
        assert_eq!(sidon_set(1).unwrap(), vec![0]);
        let s = sidon_set(10).unwrap();
        assert_eq!(s.len(), 10);
        verify_sidon(&s).unwrap();
    }

    #[test]
    fn diamond_matches_displayed_matrix() {
        let (rel, _) = gen_diamond(8).unwrap();
        let expected = [
            "00011000", "00100100", "01000010", "10000001", "10000001", "01000010", "00100100",
            "00011000",
        ];
        for (i, row) in expected.iter().enumerate() {
            for (j, c) in row.chars().enumerate() {
                assert_eq!(
                    rel.contains(&[i as u16, j as u16]),
                    c == '1',
                    "entry ({i},{j})"
                );
            }
        }
        verify_diamond(8).unwrap();
    }

    #[test]
    fn diamond_and_halfgraph_formulas() {
        for n in [4, 6, 8] {
            verify_diamond(n).unwrap();
            verify_halfgraph(n).unwrap();
        }
        assert!(gen_diamond(5).is_err());
        let (h3, _) = gen_halfgraph(3).unwrap();
        assert_eq!(h3.len(), 6);
    }
}
