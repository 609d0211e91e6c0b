//! Constructive algorithms producing popular sets.

mod arborescence;
mod partial_sqrt;
mod weak_matroid;

pub use arborescence::{solve_arborescence, ArborescencePair};
pub use partial_sqrt::{solve_partial_sqrt, SolverTrace, TraceRound};
pub use weak_matroid::solve_weak_matroid;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{decompose_k_matching, AlternativeKind, KMatching, Matching, MatchingInstance, MatchingSet};
use crate::prefs::PreferenceClass;

fn require_not_perfect(inst: &MatchingInstance) -> Result<()> {
    if inst.alternatives() == AlternativeKind::APerfect {
        return Err(Error::Validation("solvers do not handle a-perfect alternatives".into()));
    }
    Ok(())
}

fn dedup(set: Vec<Matching>) -> MatchingSet {
    let mut out: MatchingSet = Vec::with_capacity(set.len());
    for m in set {
        if !out.contains(&m) {
            out.push(m);
        }
    }
    out
}

/// Two rounds of serial picking over two copies of every object, then a
/// split of the resulting 2-matching. `order` defaults to input order.
pub fn solve_strict_round_robin(inst: &MatchingInstance, order: Option<&[usize]>) -> Result<MatchingSet> {
    require_not_perfect(inst)?;
    if inst.is_constrained() {
        return Err(Error::Validation("round robin needs an unconstrained instance".into()));
    }
    if let Some(a) = (0..inst.n_agents()).find(|&a| inst.pref(a).classify() != PreferenceClass::Strict) {
        return Err(Error::NotStrict(format!("agent {}", inst.agents()[a])));
    }
    let n = inst.n_agents();
    let default: Vec<usize> = (0..n).collect();
    let order = order.unwrap_or(&default);
    let mut seen = vec![false; n];
    if order.len() != n || order.iter().any(|&a| a >= n || std::mem::replace(&mut seen[a], true)) {
        return Err(Error::Validation("order must list every agent once".into()));
    }
    let mut copies = vec![2usize; inst.n_objects()];
    let mut incidence: Vec<Vec<usize>> = vec![Vec::new(); n];
    for _ in 0..2 {
        for &a in order {
            let p = inst.pref(a);
            let best = inst
                .adj(a)
                .iter()
                .copied()
                .filter(|&o| copies[o] > 0)
                .max_by_key(|&o| std::cmp::Reverse(p.count_better(Some(o))));
            if let Some(o) = best {
                copies[o] -= 1;
                incidence[a].push(o);
            }
        }
    }
    let parts = decompose_k_matching(&KMatching { k: 2, incidence }, inst.n_objects())?;
    Ok(dedup(parts))
}

/// For every agent, a matching giving it an undominated feasible object.
pub fn per_agent_undominated(inst: &MatchingInstance) -> Result<MatchingSet> {
    require_not_perfect(inst)?;
    let n = inst.n_agents();
    let mut out = Vec::new();
    for a in 0..n {
        let feasible: Vec<usize> =
            inst.adj(a).iter().copied().filter(|&o| inst.matroid().is_none_or(|m| m.is_independent(&[o]))).collect();
        let mut m = Matching::empty(n);
        m.0[a] = inst.pref(a).maximal_elements(&feasible).first().copied();
        out.push(m);
    }
    if out.is_empty() {
        out.push(Matching::empty(0));
    }
    Ok(dedup(out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    RoundRobin,
    WeakMatroid,
    PartialSqrt,
    PerAgent,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub solver: SolverKind,
    #[serde(skip)]
    pub set: MatchingSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<SolverTrace>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Picks the solver matching the preference class and constraint.
pub fn solve_auto(inst: &MatchingInstance, order: Option<&[usize]>) -> Result<SolveReport> {
    let class = inst.preference_class();
    let report = |solver, set, trace, warning| SolveReport { solver, set, trace, warning };
    Ok(match (class, inst.is_constrained()) {
        (PreferenceClass::Strict, false) => {
            report(SolverKind::RoundRobin, solve_strict_round_robin(inst, order)?, None, None)
        }
        (PreferenceClass::Strict | PreferenceClass::Weak, _) => {
            report(SolverKind::WeakMatroid, solve_weak_matroid(inst)?, None, None)
        }
        (PreferenceClass::Partial, false) => {
            let (set, trace) = solve_partial_sqrt(inst)?;
            report(SolverKind::PartialSqrt, set, Some(trace), None)
        }
        (PreferenceClass::Partial, true) => report(
            SolverKind::PerAgent,
            per_agent_undominated(inst)?,
            None,
            Some("partial orders with a matroid: one matching per agent; this size is worst-case optimal".into()),
        ),
    })
}
