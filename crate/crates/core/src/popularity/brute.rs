//! Exhaustive oracles over enumerated alternatives.

use super::election::Election;
use super::{pareto_search, symmetric, tally, PopularityVerdict};
use crate::error::{Error, Result};
use crate::instance::{AlternativeKind, Matching, MatchingInstance, MatchingSet};

/// Edge-count cap for exhaustive enumeration; `CONDORCET_CAP` overrides the default of 24.
pub fn default_cap() -> usize {
    std::env::var("CONDORCET_CAP").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(24)
}

const MAX_ALTERNATIVES: usize = 20_000_000;

fn check_cap(inst: &MatchingInstance, cap: usize) -> Result<()> {
    if inst.edges().len() > cap {
        return Err(Error::too_large(format!("{} edges", inst.edges().len()), cap));
    }
    Ok(())
}

/// Calls `f` once per alternative of the instance.
pub fn for_each_alternative(inst: &MatchingInstance, cap: usize, mut f: impl FnMut(&Matching)) -> Result<()> {
    check_cap(inst, cap)?;
    let n = inst.n_agents();
    let mut cur = Matching::empty(n);
    let mut used = vec![false; inst.n_objects()];
    let mut objs: Vec<usize> = Vec::new();
    let mut count = 0usize;
    walk(inst, 0, &mut cur, &mut used, &mut objs, &mut count, &mut f)
}

fn walk(
    inst: &MatchingInstance,
    a: usize,
    cur: &mut Matching,
    used: &mut [bool],
    objs: &mut Vec<usize>,
    count: &mut usize,
    f: &mut impl FnMut(&Matching),
) -> Result<()> {
    if a == inst.n_agents() {
        *count += 1;
        if *count > MAX_ALTERNATIVES {
            return Err(Error::too_large("alternatives", MAX_ALTERNATIVES));
        }
        f(cur);
        return Ok(());
    }
    if inst.alternatives() != AlternativeKind::APerfect {
        cur.0[a] = None;
        walk(inst, a + 1, cur, used, objs, count, f)?;
    }
    for &o in inst.adj(a) {
        if used[o] {
            continue;
        }
        objs.push(o);
        let ok = inst.matroid().is_none_or(|m| m.is_independent(objs));
        if ok {
            used[o] = true;
            cur.0[a] = Some(o);
            walk(inst, a + 1, cur, used, objs, count, f)?;
            used[o] = false;
        }
        objs.pop();
    }
    cur.0[a] = None;
    Ok(())
}

pub fn enumerate_alternatives(inst: &MatchingInstance, cap: usize) -> Result<Vec<Matching>> {
    let mut out = Vec::new();
    for_each_alternative(inst, cap, |m| out.push(m.clone()))?;
    Ok(out)
}

/// An alternative giving every agent an outcome no other alternative beats.
pub fn top_choice_matching(inst: &MatchingInstance, cap: usize) -> Result<Option<Matching>> {
    let alts = enumerate_alternatives(inst, cap)?;
    let n = inst.n_agents();
    let mut reachable: Vec<Vec<Option<usize>>> = vec![Vec::new(); n];
    for m in &alts {
        for a in 0..n {
            if !reachable[a].contains(&m.0[a]) {
                reachable[a].push(m.0[a]);
            }
        }
    }
    Ok(alts
        .into_iter()
        .find(|m| (0..n).all(|a| reachable[a].iter().all(|&y| !inst.pref(a).prefers(y, m.0[a])))))
}

/// First alternative with negative margin against `set` (in strict mode: non-positive
/// margin among alternatives outside the set).
pub fn exhaustive_counterexample(
    inst: &MatchingInstance,
    set: &[Matching],
    strict: bool,
    cap: usize,
) -> Result<Option<Matching>> {
    let mut found = None;
    for_each_alternative(inst, cap, |n| {
        if found.is_some() {
            return;
        }
        let t = tally(inst, set, n);
        let beaten = if strict { t.margin <= 0 && !set.contains(n) } else { t.margin < 0 };
        if beaten {
            found = Some(n.clone());
        }
    })?;
    Ok(found)
}

/// Strong popularity by enumeration.
pub fn verify_strongly_popular(inst: &MatchingInstance, set: &[Matching], cap: usize) -> Result<PopularityVerdict> {
    inst.check_set(set)?;
    Ok(match exhaustive_counterexample(inst, set, true, cap)? {
        Some(n) => {
            let t = tally(inst, set, &n);
            PopularityVerdict::NotPopular { counterexample: n, tally: t }
        }
        None => PopularityVerdict::Popular,
    })
}

fn symmetric_applies(inst: &MatchingInstance, strict: bool) -> bool {
    !strict && inst.alternatives() != AlternativeKind::APerfect && !inst.is_constrained()
}

/// A popular set of at most `k` alternatives, if one exists.
pub fn has_popular_set(inst: &MatchingInstance, k: usize, strict: bool, cap: usize) -> Result<Option<MatchingSet>> {
    if symmetric_applies(inst, strict) {
        for j in 1..=k {
            if let Some(s) = symmetric::find_popular_set_symmetric(inst, j)? {
                return Ok(Some(s));
            }
        }
        return Ok(None);
    }
    let alts = enumerate_alternatives(inst, cap)?;
    let alt_vecs: Vec<Vec<Option<usize>>> = alts.iter().map(|m| m.0.clone()).collect();
    let e = Election::new(inst.prefs(), &alt_vecs, !strict);
    Ok(e.min_popular_set(k, strict).map(|idx| idx.iter().map(|&i| alts[e.source(i)].clone()).collect()))
}

/// Smallest size of a popular set, with a witness.
pub fn brute_force_condorcet_dimension(
    inst: &MatchingInstance,
    strict: bool,
    cap: usize,
) -> Result<(usize, MatchingSet)> {
    if symmetric_applies(inst, strict) {
        let mut k = 1;
        loop {
            if let Some(s) = symmetric::find_popular_set_symmetric(inst, k)? {
                return Ok((k, s));
            }
            k += 1;
        }
    }
    let alts = enumerate_alternatives(inst, cap)?;
    let alt_vecs: Vec<Vec<Option<usize>>> = alts.iter().map(|m| m.0.clone()).collect();
    let e = Election::new(inst.prefs(), &alt_vecs, !strict);
    match e.min_popular_set(e.len(), strict) {
        Some(idx) => Ok((idx.len(), idx.iter().map(|&i| alts[e.source(i)].clone()).collect())),
        None => Err(Error::NotFound("no popular set among the alternatives".into())),
    }
}

/// A non-dominated set of at most `size` alternatives, smallest first.
pub fn brute_force_pareto_sets(inst: &MatchingInstance, size: usize, cap: usize) -> Result<Option<MatchingSet>> {
    if size == 0 {
        return Ok(None);
    }
    if size == 1 && !inst.is_constrained() {
        return Ok(pareto_search::exists_pareto_optimal_matching(inst)?.map(|m| vec![m]));
    }
    let alts = enumerate_alternatives(inst, cap)?;
    let alt_vecs: Vec<Vec<Option<usize>>> = alts.iter().map(|m| m.0.clone()).collect();
    let e = Election::new(inst.prefs(), &alt_vecs, true);
    for s in 1..=size {
        if let Some(idx) = e.pareto_sets(s, 1).into_iter().next() {
            return Ok(Some(idx.iter().map(|&i| alts[e.source(i)].clone()).collect()));
        }
    }
    Ok(None)
}

/// Every non-dominated set of exactly `size` distinct alternatives (up to `limit`).
pub fn all_pareto_sets(inst: &MatchingInstance, size: usize, cap: usize, limit: usize) -> Result<Vec<MatchingSet>> {
    let alts = enumerate_alternatives(inst, cap)?;
    let alt_vecs: Vec<Vec<Option<usize>>> = alts.iter().map(|m| m.0.clone()).collect();
    let e = Election::new(inst.prefs(), &alt_vecs, false);
    Ok(e.pareto_sets(size, limit)
        .into_iter()
        .map(|idx| idx.iter().map(|&i| alts[e.source(i)].clone()).collect())
        .collect())
}
