//! Arc consistency and singleton arc consistency over udCSP instances.
//!
//! AC is a worklist algorithm with per-(constraint, variable, signature)
//! support counters. Positions of one constraint sharing a variable are
//! grouped, so repeated variables need a common witness value. SAC restarts
//! AC under each singleton assumption until a fixed point.

use crate::bits::BitSet;
use crate::model::Instance;

/// Per-variable value sets. Shrinks monotonically during propagation; an
/// empty component signals unsatisfiability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainVector {
    pub doms: Vec<BitSet>,
}

impl DomainVector {
    pub fn full(num_vars: usize, domain_size: usize) -> DomainVector {
        DomainVector {
            doms: vec![BitSet::full(domain_size); num_vars],
        }
    }

    pub fn has_empty(&self) -> bool {
        self.doms.iter().any(BitSet::is_empty)
    }

    pub fn is_subset_of(&self, other: &DomainVector) -> bool {
        self.doms
            .iter()
            .zip(&other.doms)
            .all(|(a, b)| a.is_subset(b))
    }
}

/// One constraint, preprocessed for support counting.
struct Engine {
    /// (variable, positions of that variable) per group.
    groups: Vec<(usize, Vec<usize>)>,
    /// sig_by_value[g][u]: packed group signature of domain value u.
    sig_by_value: Vec<Vec<usize>>,
    /// Signature space size per group.
    sig_space: Vec<usize>,
    /// tuple_sigs[t][g]: packed signature of relation tuple t in group g.
    tuple_sigs: Vec<Vec<usize>>,
}

impl Engine {
    fn build(inst: &Instance, ci: usize) -> Engine {
        let c = &inst.constraints[ci];
        let r = inst.relation_of(c);
        let d = r.domain_size();
        let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
        for (pos, &v) in c.vars.iter().enumerate() {
            match groups.iter_mut().find(|(gv, _)| *gv == v) {
                Some((_, ps)) => ps.push(pos),
                None => groups.push((v, vec![pos])),
            }
        }
        let pack = |vals: &[u16]| vals.iter().fold(0usize, |acc, &x| acc * d + x as usize);
        let sig_by_value = groups
            .iter()
            .map(|(_, ps)| {
                (0..inst.domain_size as u16)
                    .map(|u| {
                        let sig: Vec<u16> =
                            ps.iter().map(|&p| c.maps[p].apply_unchecked(u)).collect();
                        pack(&sig)
                    })
                    .collect()
            })
            .collect();
        let sig_space = groups.iter().map(|(_, ps)| d.pow(ps.len() as u32)).collect();
        let tuple_sigs = r
            .tuples()
            .iter()
            .map(|t| {
                groups
                    .iter()
                    .map(|(_, ps)| {
                        let sig: Vec<u16> = ps.iter().map(|&p| t[*&p]).collect();
                        pack(&sig)
                    })
                    .collect()
            })
            .collect();
        Engine {
            groups,
            sig_by_value,
            sig_space,
            tuple_sigs,
        }
    }
}

/// AC from full domains.
pub fn arc_consistency(inst: &Instance) -> DomainVector {
    arc_consistency_from(inst, &DomainVector::full(inst.num_vars(), inst.domain_size))
}

/// AC from the given starting domains; returns the greatest fixed point
/// below them.
pub fn arc_consistency_from(inst: &Instance, init: &DomainVector) -> DomainVector {
    let mut doms = init.clone();
    let engines: Vec<Engine> = (0..inst.constraints.len())
        .map(|ci| Engine::build(inst, ci))
        .collect();

    // value counts per (constraint, group, signature)
    let mut cnt: Vec<Vec<Vec<usize>>> = Vec::new();
    for e in &engines {
        let per_group = e
            .groups
            .iter()
            .enumerate()
            .map(|(g, (v, _))| {
                let mut counts = vec![0usize; e.sig_space[g]];
                for u in doms.doms[*v].iter() {
                    counts[e.sig_by_value[g][u]] += 1;
                }
                counts
            })
            .collect();
        cnt.push(per_group);
    }
    // alive tuples and per-(constraint, group, signature) alive counts
    let mut dead_groups: Vec<Vec<usize>> = Vec::new();
    let mut alive_cnt: Vec<Vec<Vec<usize>>> = Vec::new();
    for (ci, e) in engines.iter().enumerate() {
        let mut a: Vec<Vec<usize>> = (0..e.groups.len())
            .map(|g| vec![0usize; e.sig_space[g]])
            .collect();
        let mut dg = Vec::with_capacity(e.tuple_sigs.len());
        for sigs in &e.tuple_sigs {
            let dead = sigs
                .iter()
                .enumerate()
                .filter(|(g, &s)| cnt[ci][*g][s] == 0)
                .count();
            dg.push(dead);
            if dead == 0 {
                for (g, &s) in sigs.iter().enumerate() {
                    a[g][s] += 1;
                }
            }
        }
        alive_cnt.push(a);
        dead_groups.push(dg);
    }

    // seed worklist: unsupported (var, value) pairs
    let mut queue: Vec<(usize, usize)> = Vec::new();
    for (ci, e) in engines.iter().enumerate() {
        for (g, (v, _)) in e.groups.iter().enumerate() {
            for u in doms.doms[*v].iter() {
                if alive_cnt[ci][g][e.sig_by_value[g][u]] == 0 {
                    queue.push((*v, u));
                }
            }
        }
    }

    while let Some((v, u)) = queue.pop() {
        if !doms.doms[v].contains(u) {
            continue;
        }
        doms.doms[v].remove(u);
        for (ci, e) in engines.iter().enumerate() {
            for (g, (gv, _)) in e.groups.iter().enumerate() {
                if *gv != v {
                    continue;
                }
                let sig = e.sig_by_value[g][u];
                cnt[ci][g][sig] -= 1;
                if cnt[ci][g][sig] > 0 {
                    continue;
                }
                // tuples with this signature in group g die
                for (t, sigs) in e.tuple_sigs.iter().enumerate() {
                    if sigs[g] != sig {
                        continue;
                    }
                    dead_groups[ci][t] += 1;
                    if dead_groups[ci][t] == 1 {
                        for (g2, &s2) in sigs.iter().enumerate() {
                            alive_cnt[ci][g2][s2] -= 1;
                            if alive_cnt[ci][g2][s2] == 0 {
                                let (v2, _) = e.groups[g2];
                                for u2 in doms.doms[v2].iter() {
                                    if e.sig_by_value[g2][u2] == s2 {
                                        queue.push((v2, u2));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    doms
}

/// SAC: repeatedly drop any value whose singleton assertion wipes out some
/// domain under AC.
pub fn singleton_arc_consistency(inst: &Instance) -> DomainVector {
    singleton_arc_consistency_from(inst, &DomainVector::full(inst.num_vars(), inst.domain_size))
}

pub fn singleton_arc_consistency_from(inst: &Instance, init: &DomainVector) -> DomainVector {
    let mut doms = arc_consistency_from(inst, init);
    loop {
        let mut changed = false;
        for v in 0..inst.num_vars() {
            let values: Vec<usize> = doms.doms[v].iter().collect();
            for u in values {
                let mut probe = doms.clone();
                probe.doms[v] = BitSet::empty(inst.domain_size);
                probe.doms[v].insert(u);
                if arc_consistency_from(inst, &probe).has_empty() {
                    doms.doms[v].remove(u);
                    changed = true;
                }
            }
        }
        if changed {
            doms = arc_consistency_from(inst, &doms);
        } else {
            return doms;
        }
    }
}
