use serde::Serialize;

use super::{dedup, require_not_perfect};
use crate::bipartite::{alternating_reach, capacitated_matching};
use crate::error::{Error, Result};
use crate::instance::{decompose_k_matching, KMatching, MatchingInstance, MatchingSet};

/// One pass of the peeling loop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceRound {
    pub agents: Vec<usize>,
    pub objects: Vec<usize>,
    /// Undominated edges among the remaining objects.
    pub edges: Vec<(usize, usize)>,
    /// Agents with no undominated edge left; they stay unmatched.
    pub dropped: Vec<usize>,
    /// Hall violator, absent in the final round.
    pub violator: Option<Vec<usize>>,
    /// Agents saturated with all their undominated objects this round.
    pub saturated: Vec<usize>,
    pub terminal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolverTrace {
    pub rounds: Vec<TraceRound>,
    pub chosen_k: usize,
}

/// ⌈√(2n)⌉, at least 1.
pub fn sqrt_bound(n: usize) -> usize {
    let mut k = 0usize;
    while k * k < 2 * n {
        k += 1;
    }
    k.max(1)
}

/// Popular set of at most ⌈√(2n)⌉ matchings under arbitrary partial orders.
///
/// Repeatedly restricts every remaining agent to its undominated remaining
/// objects. If some agent cannot be covered by a one-to-k assignment, the
/// agents reachable by alternating paths from uncovered ones form a Hall
/// violator; `k` of them receive all their undominated objects and the
/// violator's neighbourhood is removed. Otherwise the covering assignment
/// finishes the k-matching, which is split into `k` matchings.
pub fn solve_partial_sqrt(inst: &MatchingInstance) -> Result<(MatchingSet, SolverTrace)> {
    require_not_perfect(inst)?;
    if inst.is_constrained() {
        return Err(Error::Validation("the square-root solver needs an unconstrained instance".into()));
    }
    let (n, m) = (inst.n_agents(), inst.n_objects());
    let k = sqrt_bound(n);
    let mut agents: Vec<usize> = (0..n).collect();
    let mut alive_obj = vec![true; m];
    let mut incidence: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut rounds = Vec::new();
    loop {
        let objects: Vec<usize> = (0..m).filter(|&o| alive_obj[o]).collect();
        let mut local_adj: Vec<Vec<usize>> = agents
            .iter()
            .map(|&a| {
                let pool: Vec<usize> = inst.adj(a).iter().copied().filter(|&o| alive_obj[o]).collect();
                inst.pref(a).maximal_elements(&pool)
            })
            .collect();
        let dropped: Vec<usize> =
            agents.iter().zip(&local_adj).filter(|(_, adj)| adj.is_empty()).map(|(&a, _)| a).collect();
        if !dropped.is_empty() {
            let keep: Vec<bool> = local_adj.iter().map(|adj| !adj.is_empty()).collect();
            agents = agents.iter().zip(&keep).filter(|(_, &k)| k).map(|(&a, _)| a).collect();
            local_adj.retain(|adj| !adj.is_empty());
        }
        let edges: Vec<(usize, usize)> =
            agents.iter().zip(&local_adj).flat_map(|(&a, adj)| adj.iter().map(move |&o| (a, o))).collect();
        let partner = capacitated_matching(&local_adj, &vec![k; m]);
        let mut round = TraceRound {
            agents: agents.clone(),
            objects,
            edges,
            dropped,
            violator: None,
            saturated: Vec::new(),
            terminal: false,
        };
        if partner.iter().all(|p| p.is_some()) {
            for (i, &a) in agents.iter().enumerate() {
                incidence[a].push(partner[i].expect("covered"));
            }
            round.terminal = true;
            rounds.push(round);
            break;
        }
        let violator_local = alternating_reach(&local_adj, &partner, m);
        let mut neighbourhood = vec![false; m];
        for &i in &violator_local {
            for &o in &local_adj[i] {
                neighbourhood[o] = true;
            }
        }
        let hood = neighbourhood.iter().filter(|&&b| b).count();
        assert!(k * hood < violator_local.len(), "alternating reach is a Hall violator");
        let chosen: Vec<usize> = violator_local.iter().copied().take(k).collect();
        for &i in &chosen {
            incidence[agents[i]].extend(local_adj[i].iter().copied());
        }
        round.violator = Some(violator_local.iter().map(|&i| agents[i]).collect());
        round.saturated = chosen.iter().map(|&i| agents[i]).collect();
        rounds.push(round);
        let removed: std::collections::HashSet<usize> = chosen.iter().copied().collect();
        agents = agents.iter().enumerate().filter(|(i, _)| !removed.contains(i)).map(|(_, &a)| a).collect();
        for (o, b) in neighbourhood.iter().enumerate() {
            if *b {
                alive_obj[o] = false;
            }
        }
    }
    let parts = decompose_k_matching(&KMatching { k, incidence }, m)?;
    let set = dedup(parts);
    assert!(set.len() <= k, "at most k matchings");
    Ok((set, SolverTrace { rounds, chosen_k: k }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_lower_bound_matching, gen_no_pareto};
    use crate::instance::InstanceBuilder;
    use crate::popularity::verify_popular;

    #[test]
    fn bound_values() {
        assert_eq!(sqrt_bound(0), 1);
        assert_eq!(sqrt_bound(3), 3);
        assert_eq!(sqrt_bound(8), 4);
        assert_eq!(sqrt_bound(9), 5);
    }

    #[test]
    fn lower_bound_family_is_handled() {
        for inst in [gen_lower_bound_matching(1).unwrap(), gen_no_pareto()] {
            let (set, trace) = solve_partial_sqrt(&inst).unwrap();
            assert!(set.len() <= 3);
            assert_eq!(trace.chosen_k, 3);
            assert!(verify_popular(&inst, &set).unwrap().is_popular());
        }
    }

    #[test]
    fn indifferent_agents_finish_at_once() {
        let mut b = InstanceBuilder::new();
        let agents: Vec<usize> = (0..4).map(|i| b.agent(format!("a{i}"))).collect();
        let objs: Vec<usize> = (0..4).map(|i| b.object(format!("o{i}"))).collect();
        for &a in &agents {
            for &o in &objs {
                b.edge(a, o);
            }
        }
        let inst = b.build().unwrap();
        let (set, trace) = solve_partial_sqrt(&inst).unwrap();
        assert_eq!(trace.rounds.len(), 1);
        assert!(trace.rounds[0].terminal);
        assert!(verify_popular(&inst, &set).unwrap().is_popular());
    }
}
