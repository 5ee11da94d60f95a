//! Polynomial solvers for min/max- and median-closed languages.

use std::time::Instant;

use crate::bits::BitSet;
use crate::model::{Assignment, Instance, MapFamilyKind};
use crate::patterns::{self, Pattern};
use crate::propagation::{arc_consistency, singleton_arc_consistency_from, DomainVector};
use crate::solvers::{SolveResult, Stats};
use crate::{Budget, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinMax {
    Min,
    Max,
}

/// Arc consistency, then every variable takes its smallest (largest)
/// surviving value. Sound and complete when the used language is min-
/// (max-) closed under monotone interpretation and all guarding maps are
/// monotone.
pub fn solve_minmax(inst: &Instance, direction: MinMax, budget: &Budget) -> Result<SolveResult> {
    if !inst.maps_in_family(MapFamilyKind::Monotone) {
        return Err(Error::Dispatch("minmax requires monotone guarding maps".into()));
    }
    let lang = inst.used_language();
    let closed = match direction {
        MinMax::Min => patterns::check_min(&lang, budget)?,
        MinMax::Max => patterns::check_max(&lang, budget)?,
    };
    if !closed {
        return Err(Error::Dispatch(format!(
            "language is not {}-closed",
            if direction == MinMax::Min { "min" } else { "max" }
        )));
    }
    let start = Instant::now();
    let doms = arc_consistency(inst);
    let stats = Stats {
        nodes: inst.domain_size as u64 * inst.num_vars() as u64,
        states: 0,
        time_ms: start.elapsed().as_millis(),
    };
    if doms.has_empty() {
        return Ok(SolveResult::unsat("minmax", stats));
    }
    let values: Vec<u16> = doms
        .doms
        .iter()
        .map(|d| match direction {
            MinMax::Min => d.min().unwrap() as u16,
            MinMax::Max => d.max().unwrap() as u16,
        })
        .collect();
    SolveResult::sat(inst, "minmax", Assignment::total(values), stats)
}

/// Singleton arc consistency decides median-closed instances; a solution is
/// extracted by fixing each variable to its smallest SAC-surviving value
/// and re-establishing SAC. A wipeout during extraction would contradict
/// the majority guarantee and is reported as an internal error.
pub fn solve_sac_median(inst: &Instance, budget: &Budget) -> Result<SolveResult> {
    let family = if inst.maps_in_family(MapFamilyKind::Monotone) {
        MapFamilyKind::Monotone
    } else if inst.maps_in_family(MapFamilyKind::MonotoneAndAnti) {
        MapFamilyKind::MonotoneAndAnti
    } else {
        return Err(Error::Dispatch(
            "sac-median requires monotone or anti-monotone guarding maps".into(),
        ));
    };
    let lang = inst.used_language();
    if patterns::m_preserves(&lang, &Pattern::median(), family, budget)?.is_some() {
        return Err(Error::Dispatch("language is not median-closed".into()));
    }
    let start = Instant::now();
    let full = DomainVector::full(inst.num_vars(), inst.domain_size);
    let mut doms = singleton_arc_consistency_from(inst, &full);
    let mut stats = Stats {
        nodes: 0,
        states: 0,
        time_ms: 0,
    };
    if doms.has_empty() {
        stats.time_ms = start.elapsed().as_millis();
        return Ok(SolveResult::unsat("sac-median", stats));
    }
    let mut values = Vec::with_capacity(inst.num_vars());
    for v in 0..inst.num_vars() {
        let pick = doms.doms[v].min().expect("nonempty SAC domain");
        let mut pinned = doms.clone();
        pinned.doms[v] = BitSet::empty(inst.domain_size);
        pinned.doms[v].insert(pick);
        doms = singleton_arc_consistency_from(inst, &pinned);
        stats.nodes += 1;
        if doms.has_empty() {
            return Err(Error::Internal(
                "re-establishing SAC after a singleton fix emptied a domain; \
                 contradicts the majority guarantee"
                    .into(),
            ));
        }
        values.push(pick as u16);
    }
    stats.time_ms = start.elapsed().as_millis();
    SolveResult::sat(inst, "sac-median", Assignment::total(values), stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{builtin_relations, Constraint, ConstraintLanguage, Relation, UnaryMap};
    use crate::solvers::solve_bruteforce;

    fn budget() -> Budget {
        Budget::default()
    }

    #[test]
    fn minmax_assigns_smallest_supported_values() {
        let b = builtin_relations();
        let lang = ConstraintLanguage::new(vec![
            b.get("C1").unwrap().clone(),
            b.get("Impl").unwrap().clone(),
        ])
        .unwrap();
        let inst = Instance::new(
            5,
            vec!["x".into(), "y".into()],
            lang,
            vec![
                Constraint {
                    rel: "C1".into(),
                    vars: vec![0],
                    maps: vec![UnaryMap::geq(5, 3)],
                },
                Constraint {
                    rel: "Impl".into(),
                    vars: vec![0, 1],
                    maps: vec![UnaryMap::geq(5, 3), UnaryMap::geq(5, 2)],
                },
            ],
        )
        .unwrap();
        let r = solve_minmax(&inst, MinMax::Min, &budget()).unwrap();
        assert!(r.is_sat());
        let w = r.witness.unwrap();
        assert_eq!(w.values, vec![Some(3), Some(2)]);
    }

    #[test]
    fn minmax_unconstrained_gives_zeros() {
        let inst = Instance::new(
            4,
            vec!["x".into(), "y".into()],
            ConstraintLanguage::default(),
            vec![],
        )
        .unwrap();
        let r = solve_minmax(&inst, MinMax::Min, &budget()).unwrap();
        assert_eq!(r.witness.unwrap().values, vec![Some(0), Some(0)]);
    }

    #[test]
    fn minmax_detects_unsat() {
        let b = builtin_relations();
        let lang = ConstraintLanguage::new(vec![
            b.get("C0").unwrap().clone(),
            b.get("C1").unwrap().clone(),
        ])
        .unwrap();
        let inst = Instance::new(
            3,
            vec!["x".into()],
            lang,
            vec![
                Constraint {
                    rel: "C1".into(),
                    vars: vec![0],
                    maps: vec![UnaryMap::geq(3, 1)],
                },
                Constraint {
                    rel: "C0".into(),
                    vars: vec![0],
                    maps: vec![UnaryMap::geq(3, 1)],
                },
            ],
        )
        .unwrap();
        assert!(!solve_minmax(&inst, MinMax::Min, &budget()).unwrap().is_sat());
    }

    #[test]
    fn minmax_refuses_non_min_closed() {
        let b = builtin_relations();
        let lang = ConstraintLanguage::new(vec![b.get("Or2").unwrap().clone()]).unwrap();
        let inst = Instance::new(
            3,
            vec!["x".into(), "y".into()],
            lang,
            vec![Constraint {
                rel: "Or2".into(),
                vars: vec![0, 1],
                maps: vec![UnaryMap::geq(3, 1), UnaryMap::geq(3, 1)],
            }],
        )
        .unwrap();
        assert!(matches!(
            solve_minmax(&inst, MinMax::Min, &budget()),
            Err(Error::Dispatch(_))
        ));
    }

    /// Order-interval relation |a - b| <= c is median-closed.
    fn interval_relation(d: usize, c: u16) -> Relation {
        let tuples = (0..d as u16).flat_map(move |a| {
            (0..d as u16).filter_map(move |b| {
                if a.abs_diff(b) <= c {
                    Some(vec![a, b])
                } else {
                    None
                }
            })
        });
        Relation::new(format!("near{c}"), d, 2, tuples).unwrap()
    }

    #[test]
    fn sac_median_agrees_with_oracle_on_intervals() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let rel = interval_relation(3, 1);
        let lang = ConstraintLanguage::new(vec![rel]).unwrap();
        assert!(patterns::check_median(&lang, &budget()).unwrap());
        for trial in 0..100 {
            let n = rng.gen_range(2..=6);
            let k = rng.gen_range(1..=3);
            let mut cons = Vec::new();
            for _ in 0..rng.gen_range(1..=5) {
                let v = rng.gen_range(0..k);
                let w = rng.gen_range(0..k);
                let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
                    let mut t = vec![rng.gen_range(0..=n), rng.gen_range(0..=n)];
                    t.sort_unstable();
                    UnaryMap::monotone(n, 3, t).unwrap()
                };
                cons.push(Constraint {
                    rel: "near1".into(),
                    vars: vec![v, w],
                    maps: vec![mk(&mut rng), mk(&mut rng)],
                });
            }
            let inst = Instance::new(
                n,
                (0..k).map(|i| format!("v{i}")).collect(),
                lang.clone(),
                cons,
            )
            .unwrap();
            let fast = solve_sac_median(&inst, &budget()).unwrap();
            let slow = solve_bruteforce(&inst, &budget()).unwrap();
            assert_eq!(fast.is_sat(), slow.is_sat(), "trial {trial}");
        }
    }

    #[test]
    fn sac_median_empty_instance_is_sat() {
        let inst = Instance::new(
            3,
            vec!["x".into()],
            ConstraintLanguage::default(),
            vec![],
        )
        .unwrap();
        assert!(solve_sac_median(&inst, &budget()).unwrap().is_sat());
    }
}
