//! Tallies, polynomial verifiers and exhaustive oracles for sets of matchings.

mod brute;
pub mod election;
mod pareto_search;
mod symmetric;

pub use brute::{
    all_pareto_sets, brute_force_condorcet_dimension, brute_force_pareto_sets, default_cap,
    enumerate_alternatives, exhaustive_counterexample, for_each_alternative, has_popular_set,
    top_choice_matching, verify_strongly_popular,
};
pub use election::{Election, Tally};
pub use pareto_search::exists_pareto_optimal_matching;
pub use symmetric::find_popular_set_symmetric;

use crate::bipartite;
use crate::error::Result;
use crate::instance::{AlternativeKind, Matching, MatchingInstance};
use crate::matroid::{max_weight_common_independent, Matroid, MatroidOracle};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PopularityVerdict {
    Popular,
    NotPopular { counterexample: Matching, tally: Tally },
}

impl PopularityVerdict {
    pub fn is_popular(&self) -> bool {
        matches!(self, PopularityVerdict::Popular)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParetoVerdict {
    ParetoOptimal,
    Dominated { witness: Matching },
}

impl ParetoVerdict {
    pub fn is_optimal(&self) -> bool {
        matches!(self, ParetoVerdict::ParetoOptimal)
    }
}

/// Agent-by-agent comparison of `set` against the competitor `n`.
pub fn tally(inst: &MatchingInstance, set: &[Matching], n: &Matching) -> Tally {
    let members: Vec<&[Option<usize>]> = set.iter().map(|m| m.0.as_slice()).collect();
    election::tally_outcomes(inst.prefs(), &members, &n.0)
}

/// True iff `cand` dominates `inc` as sets of matchings.
pub fn dominates(inst: &MatchingInstance, cand: &[Matching], inc: &[Matching]) -> bool {
    let c: Vec<&[Option<usize>]> = cand.iter().map(|m| m.0.as_slice()).collect();
    let i: Vec<&[Option<usize>]> = inc.iter().map(|m| m.0.as_slice()).collect();
    election::dominates_outcomes(inst.prefs(), &c, &i)
}

/// Value of giving `o` to agent `a` in a competitor: +1 if it beats every
/// member, -1 if some member beats it.
fn response_weight(inst: &MatchingInstance, set: &[Matching], a: usize, o: Option<usize>) -> i64 {
    let p = inst.pref(a);
    if set.iter().any(|m| p.prefers(m.0[a], o)) {
        -1
    } else if set.iter().all(|m| p.prefers(o, m.0[a])) {
        1
    } else {
        0
    }
}

/// Decides weak popularity through a maximum-weight best response.
pub fn verify_popular(inst: &MatchingInstance, set: &[Matching]) -> Result<PopularityVerdict> {
    inst.check_set(set)?;
    let n = inst.n_agents();
    if n == 0 {
        return Ok(PopularityVerdict::Popular);
    }
    let competitor = match inst.matroid() {
        Some(mat) => best_response_constrained(inst, set, mat),
        None => best_response_unconstrained(inst, set),
    };
    let Some(best) = competitor else {
        return Ok(PopularityVerdict::Popular);
    };
    let t = tally(inst, set, &best);
    Ok(if t.margin < 0 {
        PopularityVerdict::NotPopular { counterexample: best, tally: t }
    } else {
        PopularityVerdict::Popular
    })
}

fn best_response_unconstrained(inst: &MatchingInstance, set: &[Matching]) -> Option<Matching> {
    let (n, m) = (inst.n_agents(), inst.n_objects());
    const BIG: i64 = 1 << 40;
    let perfect = inst.alternatives() == AlternativeKind::APerfect;
    let mut cost = vec![vec![BIG; m + n]; n];
    for a in 0..n {
        for &o in inst.adj(a) {
            cost[a][o] = -response_weight(inst, set, a, Some(o));
        }
        if !perfect {
            cost[a][m + a] = -response_weight(inst, set, a, None);
        }
    }
    let assign = bipartite::hungarian(&cost);
    if (0..n).any(|a| cost[a][assign[a]] >= BIG) {
        return None;
    }
    Some(Matching(assign.iter().map(|&c| if c < m { Some(c) } else { None }).collect()))
}

fn best_response_constrained(inst: &MatchingInstance, set: &[Matching], mat: &MatroidOracle) -> Option<Matching> {
    let edges = inst.edges();
    let by_agent = MatroidOracle::new(
        edges.len(),
        Matroid::Partition { part_of: edges.iter().map(|&(a, _)| Some(a)).collect(), caps: vec![1; inst.n_agents()] },
    );
    let by_object = MatroidOracle::new(
        edges.len(),
        Matroid::Mapped { inner: Box::new(mat.matroid().clone()), map: edges.iter().map(|&(_, o)| o).collect() },
    );
    let weights: Vec<i64> = edges
        .iter()
        .map(|&(a, o)| response_weight(inst, set, a, Some(o)) - response_weight(inst, set, a, None))
        .collect();
    let chosen = max_weight_common_independent(&by_agent, &by_object, &weights);
    let mut n = Matching::empty(inst.n_agents());
    for e in chosen {
        let (a, o) = edges[e];
        n.0[a] = Some(o);
    }
    Some(n)
}

/// Decides whether a single matching is Pareto-optimal among the alternatives.
pub fn verify_pareto_optimal(inst: &MatchingInstance, m: &Matching) -> Result<ParetoVerdict> {
    inst.check_matching(m)?;
    if inst.is_constrained() {
        let cap = default_cap();
        let mut witness = None;
        for_each_alternative(inst, cap, |alt| {
            if witness.is_none() && dominates(inst, std::slice::from_ref(alt), std::slice::from_ref(m)) {
                witness = Some(alt.clone());
            }
        })?;
        return Ok(match witness {
            Some(w) => ParetoVerdict::Dominated { witness: w },
            None => ParetoVerdict::ParetoOptimal,
        });
    }
    let all_agents: Vec<usize> = (0..inst.n_agents()).collect();
    let all_objects = vec![true; inst.n_objects()];
    Ok(match pareto_improvement(inst, m, &all_agents, &all_objects) {
        Some(w) => ParetoVerdict::Dominated { witness: w },
        None => ParetoVerdict::ParetoOptimal,
    })
}

/// Searches a matching on `agents` using only objects in `allowed` (plus the
/// objects `m` gives them) that leaves every listed agent not worse off and
/// some listed agent strictly better off. Agents outside the list keep their
/// objects in the returned witness.
pub(crate) fn pareto_improvement(
    inst: &MatchingInstance,
    m: &Matching,
    agents: &[usize],
    allowed: &[bool],
) -> Option<Matching> {
    let n = inst.n_agents();
    let mut in_scope = vec![false; n];
    for &a in agents {
        in_scope[a] = true;
    }
    let usable = |a: usize, o: usize| allowed[o] || m.0[a] == Some(o);
    // objects each in-scope agent may hold without getting worse
    let keep: Vec<Vec<usize>> = (0..n)
        .map(|a| {
            if !in_scope[a] {
                return Vec::new();
            }
            let p = inst.pref(a);
            let mut v: Vec<usize> =
                inst.adj(a).iter().copied().filter(|&o| usable(a, o) && !p.prefers(m.0[a], Some(o))).collect();
            // try the current object first so augmenting paths stay short
            if let Some(cur) = m.0[a] {
                if let Some(pos) = v.iter().position(|&o| o == cur) {
                    v.swap(0, pos);
                }
            }
            v
        })
        .collect();
    for &hat in agents {
        let p = inst.pref(hat);
        let improve: Vec<usize> =
            inst.adj(hat).iter().copied().filter(|&o| usable(hat, o) && p.prefers(Some(o), m.0[hat])).collect();
        if improve.is_empty() {
            continue;
        }
        let mut adj = keep.clone();
        adj[hat] = improve;
        let mut partner: Vec<Option<usize>> = vec![None; n];
        let mut owner: Vec<Option<usize>> = vec![None; inst.n_objects()];
        for &a in agents {
            if a != hat {
                if let Some(o) = m.0[a] {
                    partner[a] = Some(o);
                    owner[o] = Some(a);
                }
            }
        }
        // objects held by agents outside the scope stay put
        for a in 0..n {
            if !in_scope[a] {
                if let Some(o) = m.0[a] {
                    owner[o] = Some(usize::MAX);
                }
            }
        }
        if augment_scoped(hat, &adj, &mut partner, &mut owner) {
            let mut w = m.clone();
            for &a in agents {
                w.0[a] = partner[a];
            }
            return Some(w);
        }
    }
    None
}

fn augment_scoped(start: usize, adj: &[Vec<usize>], partner: &mut [Option<usize>], owner: &mut [Option<usize>]) -> bool {
    // owners equal to usize::MAX are frozen; mask them out of the search
    let frozen: Vec<bool> = owner.iter().map(|o| *o == Some(usize::MAX)).collect();
    let filtered: Vec<Vec<usize>> =
        adj.iter().map(|v| v.iter().copied().filter(|&o| !frozen[o]).collect()).collect();
    bipartite::augment_from(start, &filtered, partner, owner)
}
