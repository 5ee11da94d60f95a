//! GF(2) rank, grid-rank, assignment graphs, contraction sequences, and
//! projected-grid checking.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{BitMatrix, BitSet};
use crate::model::Instance;
use crate::{Budget, Error, Result};

/// Matrix rank over GF(2) by Gaussian elimination on packed rows.
pub fn gf2_rank(m: &BitMatrix) -> usize {
    let mut basis: Vec<Vec<u64>> = Vec::new();
    for i in 0..m.rows {
        let mut row = m.row_slice(i, 0, m.cols);
        for b in &basis {
            let lead = first_bit(b);
            if lead.is_some_and(|l| row[l / 64] >> (l % 64) & 1 == 1) {
                xor_into(&mut row, b);
            }
        }
        if row.iter().any(|&w| w != 0) {
            basis.push(row);
        }
    }
    basis.len()
}

fn first_bit(v: &[u64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

/// Zone measure used by grid-rank. GF(2) rank is the primary notion; the
/// distinct-rows variant from the alternative phrasing of the definition is
/// kept behind this flag so the discrepancy stays measurable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankMeasure {
    Gf2Rank,
    DistinctRowsOrCols,
}

/// Largest `k <= k_max` admitting a k-division (k-1 horizontal and k-1
/// vertical cuts) in which every zone has measure at least `k`.
pub fn grid_rank(m: &BitMatrix, k_max: usize) -> Result<usize> {
    grid_rank_with(m, k_max, RankMeasure::Gf2Rank, &Budget::default())
}

pub fn grid_rank_with(
    m: &BitMatrix,
    k_max: usize,
    measure: RankMeasure,
    budget: &Budget,
) -> Result<usize> {
    Ok(grid_rank_witness(m, k_max, measure, budget)?.0)
}

/// Grid rank together with the witnessing division (row cut positions and
/// column cut positions; a cut after index i separates i from i+1).
pub fn grid_rank_witness(
    m: &BitMatrix,
    k_max: usize,
    measure: RankMeasure,
    budget: &Budget,
) -> Result<(usize, Option<(Vec<usize>, Vec<usize>)>)> {
    if m.rows > budget.max_matrix_dim || m.cols > budget.max_matrix_dim {
        return Err(Error::Budget(format!(
            "grid-rank search limited to {0}x{0} matrices",
            budget.max_matrix_dim
        )));
    }
    let mut best = (0, None);
    // monotone: a rank-(k+1) (k+1)-division collapses to a rank-k k-division
    for k in 1..=k_max {
        match rank_k_division(m, k, measure) {
            Some(w) => best = (k, Some(w)),
            None => break,
        }
    }
    Ok(best)
}

fn rank_k_division(
    m: &BitMatrix,
    k: usize,
    measure: RankMeasure,
) -> Option<(Vec<usize>, Vec<usize>)> {
    if m.rows < k || m.cols < k {
        return None;
    }
    if k == 1 {
        return match measure {
            RankMeasure::Gf2Rank => {
                if gf2_rank(m) >= 1 {
                    Some((vec![], vec![]))
                } else {
                    None
                }
            }
            // one distinct row always exists in a nonempty matrix
            RankMeasure::DistinctRowsOrCols => Some((vec![], vec![])),
        };
    }
    if measure == RankMeasure::Gf2Rank {
        // every zone needs >= k rows and columns, and total rank >= k
        if m.rows < k * k || m.cols < k * k || gf2_rank(m) < k {
            return None;
        }
    }

    // viable row blocks: the full-width block must already reach measure k
    let mut viable: HashMap<(usize, usize), bool> = HashMap::new();
    let mut block_viable = |a: usize, b: usize| -> bool {
        *viable.entry((a, b)).or_insert_with(|| {
            let mut sub = BitMatrix::zeros(b - a, m.cols);
            for i in a..b {
                for j in 0..m.cols {
                    if m.get(i, j) {
                        sub.set(i - a, j, true);
                    }
                }
            }
            match measure {
                RankMeasure::Gf2Rank => gf2_rank(&sub) >= k,
                RankMeasure::DistinctRowsOrCols => {
                    distinct_rows(&sub) >= k || distinct_rows(&sub.transpose()) >= k
                }
            }
        })
    };

    // enumerate row-cut tuples over viable blocks, greedy on the columns
    let mut bounds = vec![0usize; k + 1];
    bounds[k] = m.rows;
    fn rec(
        m: &BitMatrix,
        k: usize,
        measure: RankMeasure,
        bounds: &mut Vec<usize>,
        block: usize,
        block_viable: &mut dyn FnMut(usize, usize) -> bool,
    ) -> Option<(Vec<usize>, Vec<usize>)> {
        if block == k - 1 {
            let a = bounds[block];
            if m.rows - a < 1 || !block_viable(a, m.rows) {
                return None;
            }
            bounds[k] = m.rows;
            let blocks: Vec<(usize, usize)> =
                (0..k).map(|i| (bounds[i], bounds[i + 1])).collect();
            return greedy_column_cuts(m, k, measure, &blocks).map(|cols| {
                let row_cuts = bounds[1..k].iter().map(|&b| b - 1).collect();
                (row_cuts, cols)
            });
        }
        let a = bounds[block];
        for b in a + 1..=m.rows - (k - 1 - block) {
            if block_viable(a, b) {
                bounds[block + 1] = b;
                if let Some(w) = rec(m, k, measure, bounds, block + 1, block_viable) {
                    return Some(w);
                }
            }
        }
        None
    }
    rec(m, k, measure, &mut bounds, 0, &mut block_viable)
}

fn distinct_rows(m: &BitMatrix) -> usize {
    let mut rows: Vec<Vec<u64>> = (0..m.rows).map(|i| m.row_slice(i, 0, m.cols)).collect();
    rows.sort();
    rows.dedup();
    rows.len()
}

/// Fix row blocks and greedily cut the columns as early as each zone column
/// block reaches measure k in all row blocks. Earliest-cut greedy is optimal
/// because zone measures are monotone under widening a block.
fn greedy_column_cuts(
    m: &BitMatrix,
    k: usize,
    measure: RankMeasure,
    row_blocks: &[(usize, usize)],
) -> Option<Vec<usize>> {
    struct ZoneState {
        basis: Vec<Vec<u64>>,
        cols: Vec<Vec<u64>>,
        rows: usize,
    }
    let mut cuts = Vec::new();
    let mut zones: Vec<ZoneState> = row_blocks
        .iter()
        .map(|&(a, b)| ZoneState {
            basis: Vec::new(),
            cols: Vec::new(),
            rows: b - a,
        })
        .collect();
    let feasible = |z: &ZoneState, measure: RankMeasure| -> bool {
        match measure {
            RankMeasure::Gf2Rank => z.basis.len() >= k,
            RankMeasure::DistinctRowsOrCols => {
                if z.cols.len() >= k {
                    let mut c = z.cols.clone();
                    c.sort();
                    c.dedup();
                    if c.len() >= k {
                        return true;
                    }
                }
                // distinct rows of the zone
                let words = z.cols.len().div_ceil(64).max(1);
                let mut rows: Vec<Vec<u64>> = vec![vec![0u64; words]; z.rows];
                for (jj, col) in z.cols.iter().enumerate() {
                    for (i, row) in rows.iter_mut().enumerate() {
                        if col[i / 64] >> (i % 64) & 1 == 1 {
                            row[jj / 64] |= 1 << (jj % 64);
                        }
                    }
                }
                rows.sort();
                rows.dedup();
                rows.len() >= k
            }
        }
    };
    let mut blocks_done = 0;
    for j in 0..m.cols {
        for (z, &(a, b)) in zones.iter_mut().zip(row_blocks) {
            let mut col = vec![0u64; (b - a).div_ceil(64).max(1)];
            for i in a..b {
                if m.get(i, j) {
                    col[(i - a) / 64] |= 1 << ((i - a) % 64);
                }
            }
            z.cols.push(col.clone());
            let mut v = col;
            for bvec in &z.basis {
                let lead = first_bit(bvec);
                if lead.is_some_and(|l| v[l / 64] >> (l % 64) & 1 == 1) {
                    xor_into(&mut v, bvec);
                }
            }
            if v.iter().any(|&w| w != 0) {
                z.basis.push(v);
            }
        }
        if blocks_done < k - 1
            && zones.iter().all(|z| feasible(z, measure))
            && m.cols - (j + 1) >= k - 1 - blocks_done
        {
            cuts.push(j);
            blocks_done += 1;
            for z in &mut zones {
                z.basis.clear();
                z.cols.clear();
            }
        }
    }
    if blocks_done == k - 1 && zones.iter().all(|z| feasible(z, measure)) {
        Some(cuts)
    } else {
        None
    }
}

/// Assignment graph of a binary instance: per ordered variable pair, the
/// matrix of value pairs permitted by every constraint whose variable set
/// lies within the pair. Unary constraints fold into both orientations and
/// into a per-variable allowed set.
#[derive(Debug, Clone)]
pub struct AssignmentGraph {
    pub n: usize,
    pub k: usize,
    pub unary_ok: Vec<BitSet>,
    /// Indexed by v * k + w for v != w.
    pairs: Vec<Option<BitMatrix>>,
}

impl AssignmentGraph {
    pub fn pair(&self, v: usize, w: usize) -> &BitMatrix {
        self.pairs[v * self.k + w].as_ref().expect("v != w")
    }

    /// Number of ordered labels.
    pub fn labels(&self) -> usize {
        self.k * (self.k - 1)
    }
}

pub fn assignment_graph(inst: &Instance) -> Result<AssignmentGraph> {
    let n = inst.domain_size;
    let k = inst.num_vars();
    for c in &inst.constraints {
        let mut vs = c.vars.clone();
        vs.sort();
        vs.dedup();
        if vs.len() > 2 {
            return Err(Error::invalid(format!(
                "assignment graph needs <= 2 distinct variables per constraint; {} has {}",
                c.rel,
                vs.len()
            )));
        }
    }
    let mut unary_ok = vec![BitSet::full(n); k];
    for c in &inst.constraints {
        let r = inst.relation_of(c);
        let mut vs = c.vars.clone();
        vs.sort();
        vs.dedup();
        if vs.len() != 1 {
            continue;
        }
        let v = vs[0];
        for i in 0..n as u16 {
            let image: Vec<u16> = c.maps.iter().map(|m| m.apply_unchecked(i)).collect();
            if !r.contains(&image) {
                unary_ok[v].remove(i as usize);
            }
        }
    }
    let mut pairs = vec![None; k * k];
    for v in 0..k {
        for w in 0..k {
            if v == w {
                continue;
            }
            let mut m = BitMatrix::ones(n, n);
            for i in 0..n {
                for j in 0..n {
                    if !unary_ok[v].contains(i) || !unary_ok[w].contains(j) {
                        m.set(i, j, false);
                    }
                }
            }
            for c in &inst.constraints {
                let mut vs = c.vars.clone();
                vs.sort();
                vs.dedup();
                if vs.len() != 2 || !(vs.contains(&v) && vs.contains(&w)) {
                    continue;
                }
                let r = inst.relation_of(c);
                for i in 0..n {
                    for j in 0..n {
                        let image: Vec<u16> = c
                            .vars
                            .iter()
                            .zip(&c.maps)
                            .map(|(&var, mp)| {
                                mp.apply_unchecked(if var == v { i as u16 } else { j as u16 })
                            })
                            .collect();
                        if !r.contains(&image) {
                            m.set(i, j, false);
                        }
                    }
                }
            }
            pairs[v * k + w] = Some(m);
        }
    }
    Ok(AssignmentGraph {
        n,
        k,
        unary_ok,
        pairs,
    })
}

/// Ordered merge sequence; the t-th merge consumes two live bag ids and
/// creates bag `n + t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionSequence {
    pub n: usize,
    pub merges: Vec<(usize, usize)>,
}

/// Live bags at some stage, keyed by bag id.
#[derive(Debug, Clone)]
pub struct BagPartition {
    pub bags: Vec<(usize, Vec<usize>)>,
}

impl BagPartition {
    pub fn discrete(n: usize) -> BagPartition {
        BagPartition {
            bags: (0..n).map(|i| (i, vec![i])).collect(),
        }
    }

    fn position(&self, id: usize) -> Option<usize> {
        self.bags.iter().position(|(b, _)| *b == id)
    }

    pub fn merge(&mut self, a: usize, b: usize, new_id: usize) -> Result<()> {
        if a == b {
            return Err(Error::invalid("cannot merge a bag with itself"));
        }
        let pa = self
            .position(a)
            .ok_or_else(|| Error::invalid(format!("bag {a} is not live")))?;
        let pb = self
            .position(b)
            .ok_or_else(|| Error::invalid(format!("bag {b} is not live")))?;
        let (keep, remove) = (pa.min(pb), pa.max(pb));
        let mut vs = self.bags[remove].1.clone();
        self.bags[keep].1.append(&mut vs);
        self.bags[keep].1.sort_unstable();
        self.bags[keep].0 = new_id;
        self.bags.remove(remove);
        Ok(())
    }
}

/// Is the value-pair arc for `label` uniform across X x Y, and if so, does
/// it hold? Returns None when mixed.
fn uniform_arc(g: &AssignmentGraph, m: &BitMatrix, xs: &[usize], ys: &[usize]) -> Option<bool> {
    let _ = g;
    let first = m.get(xs[0], ys[0]);
    for &i in xs {
        for &j in ys {
            if m.get(i, j) != first {
                return None;
            }
        }
    }
    Some(first)
}

/// Red edge between two bags: some label disagrees across the pair, in
/// either orientation.
pub fn bags_red(g: &AssignmentGraph, xs: &[usize], ys: &[usize]) -> bool {
    for v in 0..g.k {
        for w in 0..g.k {
            if v == w {
                continue;
            }
            let m = g.pair(v, w);
            if uniform_arc(g, m, xs, ys).is_none() || uniform_arc(g, m, ys, xs).is_none() {
                return true;
            }
        }
    }
    false
}

fn red_degrees(g: &AssignmentGraph, part: &BagPartition) -> Vec<usize> {
    let b = part.bags.len();
    let mut deg = vec![0usize; b];
    for i in 0..b {
        for j in i + 1..b {
            if bags_red(g, &part.bags[i].1, &part.bags[j].1) {
                deg[i] += 1;
                deg[j] += 1;
            }
        }
    }
    deg
}

/// Replay a sequence, maintaining red edges per the contraction rule, and
/// return the maximum red degree observed. This is the naive reference
/// implementation; the greedy tracks width incrementally.
pub fn sequence_width(g: &AssignmentGraph, seq: &ContractionSequence) -> Result<usize> {
    if seq.n != g.n {
        return Err(Error::invalid("sequence domain size mismatch"));
    }
    if seq.merges.len() + 1 != g.n.max(1) {
        return Err(Error::invalid(format!(
            "sequence must contain exactly n-1 = {} merges, got {}",
            g.n.max(1) - 1,
            seq.merges.len()
        )));
    }
    let mut part = BagPartition::discrete(g.n);
    let mut width = red_degrees(g, &part).into_iter().max().unwrap_or(0);
    for (t, &(a, b)) in seq.merges.iter().enumerate() {
        part.merge(a, b, g.n + t)?;
        width = width.max(red_degrees(g, &part).into_iter().max().unwrap_or(0));
    }
    Ok(width)
}

/// Greedy contraction: prefer merging order-adjacent bags that minimize the
/// resulting maximum red degree, widening the candidate set when adjacency
/// stagnates.
pub fn greedy_contraction_sequence(g: &AssignmentGraph) -> (ContractionSequence, usize) {
    let n = g.n;
    let mut part = BagPartition::discrete(n);
    let mut merges = Vec::new();
    let mut width = 0usize;
    while part.bags.len() > 1 {
        // bags sorted by min vertex define order adjacency
        let mut order: Vec<usize> = (0..part.bags.len()).collect();
        order.sort_by_key(|&i| part.bags[i].1[0]);
        let adjacent: Vec<(usize, usize)> = order.windows(2).map(|w| (w[0], w[1])).collect();
        let evaluate = |i: usize, j: usize| -> usize {
            let mut trial = part.clone();
            let (a, b) = (trial.bags[i].0, trial.bags[j].0);
            trial.merge(a, b, n + merges.len()).unwrap();
            red_degrees(g, &trial).into_iter().max().unwrap_or(0)
        };
        let pick_best = |cands: &[(usize, usize)]| -> ((usize, usize), usize) {
            let mut best = (cands[0], usize::MAX);
            for &(i, j) in cands {
                let w = evaluate(i, j);
                let key_new = (part.bags[i].1[0].min(part.bags[j].1[0]), part.bags[i].1[0].max(part.bags[j].1[0]));
                let key_old = (
                    part.bags[best.0 .0].1[0].min(part.bags[best.0 .1].1[0]),
                    part.bags[best.0 .0].1[0].max(part.bags[best.0 .1].1[0]),
                );
                if w < best.1 || (w == best.1 && key_new < key_old) {
                    best = ((i, j), w);
                }
            }
            best
        };
        let (mut choice, mut result) = pick_best(&adjacent);
        if result > width && part.bags.len() <= 40 {
            // stagnation: widen to all pairs
            let all: Vec<(usize, usize)> = (0..part.bags.len())
                .flat_map(|i| (i + 1..part.bags.len()).map(move |j| (i, j)))
                .collect();
            let (c, w) = pick_best(&all);
            if w < result {
                choice = c;
                result = w;
            }
        }
        let (a, b) = (part.bags[choice.0].0, part.bags[choice.1].0);
        part.merge(a.min(b), a.max(b), n + merges.len()).unwrap();
        merges.push((a.min(b), a.max(b)));
        width = width.max(result);
    }
    (ContractionSequence { n, merges }, width)
}

/// A uniformly random valid contraction sequence (for sequence-independence
/// tests).
pub fn random_contraction_sequence(n: usize, rng: &mut impl Rng) -> ContractionSequence {
    let mut live: Vec<usize> = (0..n).collect();
    let mut merges = Vec::new();
    let mut next_id = n;
    while live.len() > 1 {
        let i = rng.gen_range(0..live.len());
        let mut j = rng.gen_range(0..live.len() - 1);
        if j >= i {
            j += 1;
        }
        let (a, b) = (live[i].min(live[j]), live[i].max(live[j]));
        live.retain(|&x| x != a && x != b);
        live.push(next_id);
        merges.push((a, b));
        next_id += 1;
    }
    ContractionSequence { n, merges }
}

/// Branch-and-bound over merge orders, memoized on the bag partition (red
/// edges depend only on the partition). Returns a sequence of width at most
/// `bound` when one exists.
pub fn exact_min_twinwidth(
    g: &AssignmentGraph,
    bound: usize,
) -> Result<Option<(ContractionSequence, usize)>> {
    if g.n > 10 {
        return Err(Error::Budget("exact twin-width search limited to n <= 10".into()));
    }
    type Key = Vec<Vec<usize>>;
    fn canon(part: &[Vec<usize>]) -> Key {
        let mut p: Vec<Vec<usize>> = part.to_vec();
        p.sort();
        p
    }
    fn solve(g: &AssignmentGraph, part: &[Vec<usize>], memo: &mut HashMap<Key, usize>) -> usize {
        let key = canon(part);
        if let Some(&w) = memo.get(&key) {
            return w;
        }
        let rd = {
            let b = part.len();
            let mut deg = vec![0usize; b];
            for i in 0..b {
                for j in i + 1..b {
                    if bags_red(g, &part[i], &part[j]) {
                        deg[i] += 1;
                        deg[j] += 1;
                    }
                }
            }
            deg.into_iter().max().unwrap_or(0)
        };
        let w = if part.len() == 1 {
            rd
        } else {
            let mut best = usize::MAX;
            for i in 0..part.len() {
                for j in i + 1..part.len() {
                    let mut next: Vec<Vec<usize>> = Vec::with_capacity(part.len() - 1);
                    let mut merged = part[i].clone();
                    merged.extend_from_slice(&part[j]);
                    merged.sort_unstable();
                    for (t, bag) in part.iter().enumerate() {
                        if t != i && t != j {
                            next.push(bag.clone());
                        }
                    }
                    next.push(merged);
                    best = best.min(solve(g, &next, memo));
                }
            }
            rd.max(best)
        };
        memo.insert(key, w);
        w
    }

    let initial: Vec<Vec<usize>> = (0..g.n).map(|i| vec![i]).collect();
    let mut memo = HashMap::new();
    let opt = solve(g, &initial, &mut memo);
    if opt > bound {
        return Ok(None);
    }
    // reconstruct a witnessing sequence by repeatedly taking an argmin merge
    let mut ids: Vec<(usize, Vec<usize>)> = (0..g.n).map(|i| (i, vec![i])).collect();
    let mut merges = Vec::new();
    while ids.len() > 1 {
        let mut best: Option<((usize, usize), usize)> = None;
        for i in 0..ids.len() {
            for j in i + 1..ids.len() {
                let mut next: Vec<Vec<usize>> = Vec::new();
                let mut merged = ids[i].1.clone();
                merged.extend_from_slice(&ids[j].1);
                merged.sort_unstable();
                for (t, (_, bag)) in ids.iter().enumerate() {
                    if t != i && t != j {
                        next.push(bag.clone());
                    }
                }
                next.push(merged);
                let w = solve(g, &next, &mut memo);
                if best.is_none() || w < best.unwrap().1 {
                    best = Some(((i, j), w));
                }
            }
        }
        let ((i, j), _) = best.unwrap();
        let new_id = g.n + merges.len();
        let (a, b) = (ids[i].0, ids[j].0);
        merges.push((a.min(b), a.max(b)));
        let mut merged = ids[i].1.clone();
        merged.extend_from_slice(&ids[j].1);
        merged.sort_unstable();
        let (ri, rj) = (i.min(j), i.max(j));
        ids.remove(rj);
        ids.remove(ri);
        ids.push((new_id, merged));
    }
    Ok(Some((ContractionSequence { n: g.n, merges }, opt)))
}

// ---------------------------------------------------------------------------
// Projected grids.
// ---------------------------------------------------------------------------

use crate::model::Relation;

/// Witness for a projected grid-rank lower bound.
#[derive(Debug, Clone, Serialize)]
pub struct ProjectedGridWitness {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub s: Vec<Vec<u16>>,
    pub t: Vec<Vec<u16>>,
    pub row_cuts: Vec<usize>,
    pub col_cuts: Vec<usize>,
}

/// The matrix `M[u][v] = [s_u ∪ t_v ∈ R]` over ordered tuple lists.
///
/// `a` and `b` must partition the coordinates; each coordinate of `s` and
/// `t` must be strictly monotone or constant (or weakly monotone when
/// `weak` is set), with a single direction per coordinate.
pub fn projected_grid_check(
    rel: &Relation,
    a: &[usize],
    b: &[usize],
    s: &[Vec<u16>],
    t: &[Vec<u16>],
    weak: bool,
) -> Result<BitMatrix> {
    let r = rel.arity();
    let mut all: Vec<usize> = a.iter().chain(b).copied().collect();
    all.sort_unstable();
    if all != (0..r).collect::<Vec<_>>() {
        return Err(Error::invalid("A and B must partition the coordinate set"));
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("both sides of the partition must be nonempty"));
    }
    validate_ordered(s, a, rel.domain_size(), weak, "S")?;
    validate_ordered(t, b, rel.domain_size(), weak, "T")?;
    let mut m = BitMatrix::zeros(s.len(), t.len());
    let mut full = vec![0u16; r];
    for (i, su) in s.iter().enumerate() {
        for (j, tv) in t.iter().enumerate() {
            for (c, &coord) in a.iter().enumerate() {
                full[coord] = su[c];
            }
            for (c, &coord) in b.iter().enumerate() {
                full[coord] = tv[c];
            }
            if rel.contains(&full) {
                m.set(i, j, true);
            }
        }
    }
    Ok(m)
}

fn validate_ordered(
    seq: &[Vec<u16>],
    coords: &[usize],
    n: usize,
    weak: bool,
    side: &str,
) -> Result<()> {
    if seq.is_empty() {
        return Err(Error::invalid(format!("{side} is empty")));
    }
    for t in seq {
        if t.len() != coords.len() {
            return Err(Error::invalid(format!("{side} tuple width mismatch")));
        }
        if t.iter().any(|&v| v as usize >= n) {
            return Err(Error::invalid(format!("{side} tuple value out of domain")));
        }
    }
    {
        let mut sorted: Vec<&Vec<u16>> = seq.iter().collect();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != seq.len() {
            return Err(Error::invalid(format!("{side} contains duplicate tuples")));
        }
    }
    for (c, &coord) in coords.iter().enumerate() {
        let vals: Vec<u16> = seq.iter().map(|t| t[c]).collect();
        let ok = if weak {
            vals.windows(2).all(|w| w[0] <= w[1]) || vals.windows(2).all(|w| w[0] >= w[1])
        } else {
            vals.windows(2).all(|w| w[0] < w[1])
                || vals.windows(2).all(|w| w[0] == w[1])
                || vals.windows(2).all(|w| w[0] > w[1])
        };
        if !ok {
            return Err(Error::invalid(format!(
                "{side} is not ordered in coordinate {coord}"
            )));
        }
    }
    Ok(())
}

/// Searches bipartitions and ordered subsets for a high grid-rank projected
/// grid. Exhaustive over all-strict chains for tiny relations, randomized
/// greedy beyond; the result is strictly a lower bound.
pub fn projected_grid_rank_search(
    rel: &Relation,
    budget: &Budget,
) -> Result<(usize, Option<ProjectedGridWitness>)> {
    let r = rel.arity();
    let n = rel.domain_size();
    if r < 2 {
        return Ok((0, None));
    }
    let mut best: (usize, Option<ProjectedGridWitness>) = (0, None);
    let consider = |a: &[usize],
                        b: &[usize],
                        s: &[Vec<u16>],
                        t: &[Vec<u16>],
                        best: &mut (usize, Option<ProjectedGridWitness>)|
     -> Result<()> {
        if s.is_empty() || t.is_empty() {
            return Ok(());
        }
        let m = projected_grid_check(rel, a, b, s, t, false)?;
        let kmax = m.rows.min(m.cols);
        let (k, cuts) = grid_rank_witness(&m, kmax, RankMeasure::Gf2Rank, budget)?;
        if k > best.0 {
            let (row_cuts, col_cuts) = cuts.unwrap_or_default();
            *best = (
                k,
                Some(ProjectedGridWitness {
                    a: a.to_vec(),
                    b: b.to_vec(),
                    s: s.to_vec(),
                    t: t.to_vec(),
                    row_cuts,
                    col_cuts,
                }),
            );
        }
        Ok(())
    };

    let identity_line: Vec<Vec<u16>> = (0..n as u16).map(|v| vec![v]).collect();
    // bipartitions with |A| >= |B|; transposing a grid preserves grid-rank
    for mask in 1..(1u32 << r) - 1 {
        let a: Vec<usize> = (0..r).filter(|&i| mask >> i & 1 == 1).collect();
        let b: Vec<usize> = (0..r).filter(|&i| mask >> i & 1 == 0).collect();
        if a.len() < b.len() {
            continue;
        }
        let t_cands: Vec<Vec<Vec<u16>>> = if b.len() == 1 {
            vec![identity_line.clone()]
        } else {
            side_candidates(n, b.len(), budget)
        };
        let s_cands = side_candidates(n, a.len(), budget);
        for s in &s_cands {
            for t in &t_cands {
                consider(&a, &b, s, t, &mut best)?;
            }
        }
    }
    Ok(best)
}

/// Candidate ordered subsets of `[n]^w`: the identity line for width 1;
/// for width 2, every all-strict chain when `n` is tiny plus constant lines
/// and the lexicographic pair sweep, randomized samples otherwise.
fn side_candidates(n: usize, w: usize, budget: &Budget) -> Vec<Vec<Vec<u16>>> {
    let _ = budget;
    if w == 1 {
        return vec![(0..n as u16).map(|v| vec![v]).collect()];
    }
    let mut out: Vec<Vec<Vec<u16>>> = Vec::new();
    if w == 2 {
        // constant-coordinate maximal lines
        for c in 0..n as u16 {
            out.push((0..n as u16).map(|v| vec![c, v]).collect());
            out.push((0..n as u16).map(|v| vec![v, c]).collect());
        }
        // the lexicographic pair sweep from the Sidon-style construction;
        // the pair sums along the sweep repeat an ascending run
        let p = (n as f64).sqrt() as usize;
        if p >= 2 && p * p <= n {
            let mut sweep = Vec::new();
            for i in 0..p / 2 {
                for j in 0..p {
                    let x = (p * p) as i64 - ((2 * i + 1) * p) as i64 - j as i64;
                    let y = (2 * i * p + 2 * j) as i64;
                    if (0..n as i64).contains(&x) && (0..n as i64).contains(&y) {
                        sweep.push(vec![x as u16, y as u16]);
                    }
                }
            }
            if sweep.len() >= 2 {
                out.push(sweep);
            }
        }
        if n <= 6 {
            // every chain strict in both coordinates, ascending first coord,
            // second either ascending or descending
            for flip in [false, true] {
                let mut chain: Vec<(u16, u16)> = Vec::new();
                enumerate_chains(n, 0, &mut chain, flip, &mut |c| {
                    if c.len() >= 2 {
                        out.push(c.iter().map(|&(x, y)| vec![x, y]).collect());
                    }
                });
            }
        } else {
            // seeded random strict chains
            let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
            for _ in 0..200 {
                let len = rng.gen_range(2..=n);
                let mut xs: Vec<u16> = (0..n as u16).collect();
                let mut ys: Vec<u16> = (0..n as u16).collect();
                xs.shuffle(&mut rng);
                ys.shuffle(&mut rng);
                let mut xs: Vec<u16> = xs.into_iter().take(len).collect();
                let mut ys: Vec<u16> = ys.into_iter().take(len).collect();
                xs.sort_unstable();
                ys.sort_unstable();
                if rng.gen_bool(0.5) {
                    ys.reverse();
                }
                out.push(xs.into_iter().zip(ys).map(|(x, y)| vec![x, y]).collect());
            }
        }
    } else {
        // diagonal-style lines keep higher widths cheap
        out.push((0..n as u16).map(|v| vec![v; w]).collect());
    }
    out
}

fn enumerate_chains(
    n: usize,
    start: usize,
    chain: &mut Vec<(u16, u16)>,
    flip: bool,
    emit: &mut impl FnMut(&[(u16, u16)]),
) {
    emit(chain);
    for x in start..n {
        for y in 0..n {
            let ok = chain.last().map_or(true, |&(px, py)| {
                (x as u16) > px && if flip { (y as u16) < py } else { (y as u16) > py }
            });
            if ok {
                chain.push((x as u16, y as u16));
                enumerate_chains(n, x + 1, chain, flip, emit);
                chain.pop();
            }
        }
    }
}
