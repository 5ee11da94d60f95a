//! Exhaustive enumeration: the ground-truth oracle every other solver is
//! tested against.

use std::time::Instant;

use crate::model::{Assignment, Instance, Relation};
use crate::solvers::{SolveResult, Stats};
use crate::{Budget, Error, Result};

fn check_budget(inst: &Instance, budget: &Budget) -> Result<u64> {
    let total = (inst.domain_size as u64)
        .checked_pow(inst.num_vars() as u32)
        .filter(|&t| t <= budget.max_oracle)
        .ok_or_else(|| {
            Error::Budget(format!(
                "oracle space {}^{} exceeds budget {}",
                inst.domain_size,
                inst.num_vars(),
                budget.max_oracle
            ))
        })?;
    Ok(total)
}

fn enumerate(inst: &Instance, mut visit: impl FnMut(&Assignment) -> Result<bool>) -> Result<()> {
    let k = inst.num_vars();
    let n = inst.domain_size as u16;
    let mut values = vec![0u16; k];
    loop {
        let a = Assignment::total(values.clone());
        if !visit(&a)? {
            return Ok(());
        }
        let mut pos = k;
        loop {
            if pos == 0 {
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

/// First satisfying assignment in lexicographic order, or UNSAT.
pub fn solve_bruteforce(inst: &Instance, budget: &Budget) -> Result<SolveResult> {
    check_budget(inst, budget)?;
    let start = Instant::now();
    let mut nodes = 0u64;
    let mut found: Option<Assignment> = None;
    enumerate(inst, |a| {
        nodes += 1;
        if inst.eval(a)? {
            found = Some(a.clone());
            return Ok(false);
        }
        Ok(true)
    })?;
    let stats = Stats {
        nodes,
        states: 0,
        time_ms: start.elapsed().as_millis(),
    };
    match found {
        Some(a) => SolveResult::sat(inst, "bruteforce", a, stats),
        None => Ok(SolveResult::unsat("bruteforce", stats)),
    }
}

pub fn count_solutions(inst: &Instance, budget: &Budget) -> Result<u64> {
    check_budget(inst, budget)?;
    let mut count = 0u64;
    enumerate(inst, |a| {
        if inst.eval(a)? {
            count += 1;
        }
        Ok(true)
    })?;
    Ok(count)
}

/// The binary relation `{(a,b) : some solution has v_i=a, v_j=b}` over the
/// instance domain.
pub fn solution_projection(
    inst: &Instance,
    vi: usize,
    vj: usize,
    budget: &Budget,
) -> Result<Relation> {
    if vi >= inst.num_vars() || vj >= inst.num_vars() {
        return Err(Error::invalid("projection variable out of range"));
    }
    check_budget(inst, budget)?;
    let mut tuples = Vec::new();
    enumerate(inst, |a| {
        if inst.eval(a)? {
            tuples.push(vec![a.values[vi].unwrap(), a.values[vj].unwrap()]);
        }
        Ok(true)
    })?;
    Relation::new(
        format!("proj_{}_{}", inst.variables[vi], inst.variables[vj]),
        inst.domain_size,
        2,
        tuples,
    )
}
