use super::require_not_perfect;
use crate::error::{Error, Result};
use crate::instance::{Matching, MatchingInstance, MatchingSet};
use crate::matroid::{max_weight_common_independent, union_is_independent, Matroid, MatroidOracle};
use crate::prefs::PreferenceClass;

/// Pareto-optimal pair of constrained matchings under weak rankings.
///
/// Every edge is its own element (a private copy of its object, parallel to
/// the other copies). One matroid allows one element per agent, the other is
/// the union of the object matroid with itself. A maximum-weight common
/// independent set under rank weights is split into the two matchings.
pub fn solve_weak_matroid(inst: &MatchingInstance) -> Result<MatchingSet> {
    require_not_perfect(inst)?;
    if let Some(a) = (0..inst.n_agents()).find(|&a| inst.pref(a).classify() == PreferenceClass::Partial) {
        return Err(Error::NotWeak(format!("agent {}", inst.agents()[a])));
    }
    let edges = inst.edges();
    let ground = edges.len();
    let object_matroid = match inst.matroid() {
        Some(m) => m.matroid().clone(),
        None => Matroid::Free,
    };
    let copies = Matroid::Mapped { inner: Box::new(object_matroid), map: edges.iter().map(|&(_, o)| o).collect() };
    let by_agent = MatroidOracle::new(
        ground,
        Matroid::Partition { part_of: edges.iter().map(|&(a, _)| Some(a)).collect(), caps: vec![1; inst.n_agents()] },
    );
    let doubled = MatroidOracle::new(
        ground,
        Matroid::Union { left: Box::new(copies.clone()), right: Box::new(copies.clone()) },
    );
    let weights = edges.iter().map(|&(a, o)| inst.pref(a).rank_weight(o, ground)).collect::<Result<Vec<i64>>>()?;
    let chosen = max_weight_common_independent(&by_agent, &doubled, &weights);
    let single = MatroidOracle::new(ground, copies);
    let (first, second) =
        union_is_independent(&single, &chosen).expect("common independent set splits into two independent sets");
    let to_matching = |part: &[usize]| {
        let mut m = Matching::empty(inst.n_agents());
        for &e in part {
            let (a, o) = edges[e];
            m.0[a] = Some(o);
        }
        m
    };
    Ok(vec![to_matching(&first), to_matching(&second)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::InstanceBuilder;
    use crate::matroid::MatroidSpec;
    use crate::popularity::verify_popular;

    #[test]
    fn uniform_one_splits_the_top_object() {
        let mut b = InstanceBuilder::new();
        let a1 = b.agent("a1");
        let a2 = b.agent("a2");
        let o = b.object("o");
        b.edge(a1, o).edge(a2, o).matroid(MatroidSpec::Uniform { rank: 1, ground: None });
        let inst = b.build().unwrap();
        let set = solve_weak_matroid(&inst).unwrap();
        assert_eq!(set.len(), 2);
        let holders: Vec<Option<usize>> = set.iter().map(|m| m.0.iter().position(|x| x.is_some())).collect();
        assert!(holders.contains(&Some(0)) && holders.contains(&Some(1)));
        assert!(verify_popular(&inst, &set).unwrap().is_popular());
    }

    #[test]
    fn no_agents_gives_empty_pair() {
        let inst = InstanceBuilder::new().build().unwrap();
        assert_eq!(solve_weak_matroid(&inst).unwrap(), vec![Matching(vec![]), Matching(vec![])]);
    }
}
