//! The solver hierarchy: brute-force oracle, consistency-based polynomial
//! solvers, the one-hot pipeline, the twin-width dynamic program, and the
//! auto-dispatcher.

mod consistency;
mod onehot;
mod oracle;
mod twinwidth;

pub use consistency::{solve_minmax, solve_sac_median, MinMax};
pub use onehot::{enumerate_minimal_assignments, solve_onehot_2sat, solve_onehot_fpt};
pub use oracle::{count_solutions, solve_bruteforce, solution_projection};
pub use twinwidth::{binarize_instance, solve_twinwidth_dp, solve_twinwidth_dp_weighted};

use std::collections::BTreeMap;

use serde::Serialize;

use crate::model::{Assignment, Instance, MapFamilyKind};
use crate::patterns;
use crate::width;
use crate::{Budget, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Sat,
    Unsat,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Stats {
    pub nodes: u64,
    pub states: u64,
    pub time_ms: u128,
}

/// Outcome of a solve call. A SAT result always carries a witness that
/// passes instance evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct SolveResult {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assignment: Option<BTreeMap<String, u16>>,
    pub solver: String,
    pub stats: Stats,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_weight: Option<u64>,
    #[serde(skip)]
    pub witness: Option<Assignment>,
}

impl SolveResult {
    pub fn sat(inst: &Instance, solver: &str, witness: Assignment, stats: Stats) -> Result<SolveResult> {
        match inst.eval(&witness) {
            Ok(true) => {}
            Ok(false) => {
                return Err(Error::Internal(format!(
                    "{solver} produced a witness that fails evaluation"
                )))
            }
            Err(e) => return Err(Error::Internal(format!("{solver} witness: {e}"))),
        }
        let assignment = inst
            .variables
            .iter()
            .cloned()
            .zip(witness.values.iter().map(|v| v.unwrap()))
            .collect();
        Ok(SolveResult {
            status: Status::Sat,
            assignment: Some(assignment),
            solver: solver.to_string(),
            stats,
            trace: Vec::new(),
            min_weight: None,
            witness: Some(witness),
        })
    }

    pub fn unsat(solver: &str, stats: Stats) -> SolveResult {
        SolveResult {
            status: Status::Unsat,
            assignment: None,
            solver: solver.to_string(),
            stats,
            trace: Vec::new(),
            min_weight: None,
            witness: None,
        }
    }

    pub fn is_sat(&self) -> bool {
        self.status == Status::Sat
    }
}

/// Route an instance to the cheapest applicable solver, recording the
/// dispatch decisions. Polynomial solvers are preferred over FPT ones;
/// ties break in the fixed order minmax, sac-median, onehot-2sat,
/// onehot-fpt, binarize+twinwidth, bruteforce.
pub fn solve_auto(inst: &Instance, budget: &Budget) -> Result<SolveResult> {
    let mut trace = Vec::new();
    let lang = inst.used_language();
    let mono = inst.maps_in_family(MapFamilyKind::Monotone);
    let mono_anti = inst.maps_in_family(MapFamilyKind::MonotoneAndAnti);
    let onehot = inst.maps_in_family(MapFamilyKind::OneHot);

    if mono && patterns::check_min(&lang, budget)? {
        trace.push("maps monotone, language min-closed -> minmax".into());
        let mut r = solve_minmax(inst, MinMax::Min, budget)?;
        r.trace = trace;
        return Ok(r);
    }
    if mono && patterns::check_max(&lang, budget)? {
        trace.push("maps monotone, language max-closed -> minmax".into());
        let mut r = solve_minmax(inst, MinMax::Max, budget)?;
        r.trace = trace;
        return Ok(r);
    }
    if mono_anti {
        let family = if mono {
            MapFamilyKind::Monotone
        } else {
            MapFamilyKind::MonotoneAndAnti
        };
        if patterns::m_preserves(&lang, &patterns::Pattern::median(), family, budget)?.is_none() {
            trace.push(format!("maps {family}, language median-closed -> sac-median"));
            let mut r = solve_sac_median(inst, budget)?;
            r.trace = trace;
            return Ok(r);
        }
    }
    if onehot && lang.is_boolean() {
        let all_definable = lang
            .iter()
            .map(|r| crate::definability::or2_definable(r, budget).map(|f| f.is_some()))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .all(|b| b);
        if all_definable {
            trace.push("one-hot maps, Or2/0/1-definable language -> onehot-2sat".into());
            let mut r = solve_onehot_2sat(inst, budget)?;
            r.trace = trace;
            return Ok(r);
        }
        if patterns::check_weak_separability_language(&lang)? {
            trace.push("one-hot maps, weakly 0-separable language -> onehot-fpt".into());
            let mut r = solve_onehot_fpt(inst, budget)?;
            r.trace = trace;
            return Ok(r);
        }
        trace.push("one-hot maps but not weakly separable; W[1]-hard territory".into());
    }
    let binary = inst.constraints.iter().all(|c| {
        let mut vs = c.vars.clone();
        vs.sort_unstable();
        vs.dedup();
        vs.len() <= 2
    });
    if binary && inst.num_vars() >= 1 {
        trace.push("binary constraints -> binarize + twin-width DP over greedy sequence".into());
        let compact = binarize_instance(inst, budget)?;
        let g = width::assignment_graph(&compact)?;
        let (seq, w) = width::greedy_contraction_sequence(&g);
        trace.push(format!("greedy contraction width {w}"));
        let mut r = solve_twinwidth_dp(&compact, &seq, budget)?;
        // re-anchor the witness onto the original instance
        if let Some(witness) = r.witness.take() {
            let mut out = SolveResult::sat(inst, &r.solver, witness, r.stats)?;
            out.trace = trace;
            return Ok(out);
        }
        r.trace = trace;
        return Ok(r);
    }
    if !mono && !onehot {
        trace.push("unrestricted maps, not essentially unary in general -> oracle".into());
    } else if patterns::check_connector(&lang, budget)? {
        trace.push(
            "non-binary connector language: no general FPT solver is known, falling back to oracle"
                .into(),
        );
    } else {
        trace.push("no specialized solver applies -> oracle".into());
    }
    let mut r = solve_bruteforce(inst, budget)?;
    r.trace = trace;
    Ok(r)
}
