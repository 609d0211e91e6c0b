use std::collections::{BTreeMap, HashSet};

use super::{spec_ground, union_partition_with, MatroidOracle, MatroidSpec};
use crate::bipartite;
use crate::error::{Error, Result};
use crate::instance::{AlternativeKind, MatchingInstance};

/// Name prefix of the per-agent null objects.
pub const NULL_PREFIX: &str = "\u{2205}:";

pub fn is_basis(oracle: &MatroidOracle, set: &[usize]) -> bool {
    if !oracle.is_independent(set) {
        return false;
    }
    let inside: HashSet<usize> = set.iter().copied().collect();
    let mut with = set.to_vec();
    with.push(0);
    for e in 0..oracle.ground_size() {
        if inside.contains(&e) {
            continue;
        }
        *with.last_mut().unwrap() = e;
        if oracle.is_independent(&with) {
            return false;
        }
    }
    true
}

/// Elements of `basis` that can be swapped out for `o`.
pub fn fundamental_circuit(oracle: &MatroidOracle, basis: &[usize], o: usize) -> Result<Vec<usize>> {
    if !is_basis(oracle, basis) {
        return Err(Error::NotABasis);
    }
    if basis.contains(&o) {
        return Err(Error::Validation(format!("element {o} already in the basis")));
    }
    if o >= oracle.ground_size() {
        return Err(Error::UnknownObject(o.to_string()));
    }
    let mut out = Vec::new();
    for (i, &x) in basis.iter().enumerate() {
        let mut swapped = basis.to_vec();
        swapped[i] = o;
        if oracle.is_independent(&swapped) {
            out.push(x);
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// A bijection `f: from -> to` such that `to - f(o) + o` is a basis for every
/// `o` in `from` (identity on shared elements).
pub fn bijective_exchange(oracle: &MatroidOracle, from: &[usize], to: &[usize]) -> Result<BTreeMap<usize, usize>> {
    if !is_basis(oracle, from) || !is_basis(oracle, to) {
        return Err(Error::NotBases);
    }
    let to_set: HashSet<usize> = to.iter().copied().collect();
    let from_set: HashSet<usize> = from.iter().copied().collect();
    let d1: Vec<usize> = from.iter().copied().filter(|e| !to_set.contains(e)).collect();
    let d2: Vec<usize> = to.iter().copied().filter(|e| !from_set.contains(e)).collect();
    if d1.len() != d2.len() {
        return Err(Error::NoBijection("bases differ in size".into()));
    }
    let swap_ok = |o: usize, x: usize| {
        let mut s: Vec<usize> = to.iter().copied().filter(|&e| e != x).collect();
        s.push(o);
        oracle.is_independent(&s)
    };
    let adj: Vec<Vec<usize>> =
        d1.iter().map(|&o| (0..d2.len()).filter(|&j| swap_ok(o, d2[j])).collect()).collect();
    let partner = bipartite::capacitated_matching(&adj, &vec![1; d2.len()]);
    let mut f = BTreeMap::new();
    for &e in from {
        if to_set.contains(&e) {
            f.insert(e, e);
        }
    }
    for (i, p) in partner.iter().enumerate() {
        let j = p.ok_or_else(|| Error::NoBijection(format!("element {} has no partner", d1[i])))?;
        f.insert(d1[i], d2[j]);
    }
    for (&o, &x) in &f {
        if o != x && !swap_ok(o, x) {
            return Err(Error::NoBijection(format!("swap {o} for {x} fails")));
        }
    }
    Ok(f)
}

/// Maximum-weight set independent in both oracles (shortest augmenting paths
/// with lexicographic (length, hops) costs).
pub fn max_weight_common_independent(m1: &MatroidOracle, m2: &MatroidOracle, weights: &[i64]) -> Vec<usize> {
    let n = m1.ground_size();
    assert_eq!(n, m2.ground_size(), "oracles must share a ground set");
    assert_eq!(n, weights.len(), "one weight per element");
    let mut in_i = vec![false; n];
    loop {
        let cur: Vec<usize> = (0..n).filter(|&e| in_i[e]).collect();
        let outside: Vec<usize> = (0..n).filter(|&e| !in_i[e]).collect();
        let mut with = cur.clone();
        with.push(0);
        let mut source = vec![false; n];
        let mut sink = vec![false; n];
        for &x in &outside {
            *with.last_mut().unwrap() = x;
            source[x] = m1.is_independent(&with);
            sink[x] = m2.is_independent(&with);
        }
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, &y) in cur.iter().enumerate() {
            for &x in &outside {
                let mut swapped = cur.clone();
                swapped[i] = x;
                if m1.is_independent(&swapped) {
                    out[y].push(x);
                }
                if m2.is_independent(&swapped) {
                    out[x].push(y);
                }
            }
        }
        let cost = |v: usize| if in_i[v] { weights[v] } else { -weights[v] };
        const INF: (i64, usize) = (i64::MAX, usize::MAX);
        let mut dist = vec![INF; n];
        let mut pred: Vec<Option<usize>> = vec![None; n];
        for &x in &outside {
            if source[x] {
                dist[x] = (cost(x), 0);
            }
        }
        for _ in 0..=n {
            let mut changed = false;
            for u in 0..n {
                if dist[u] == INF {
                    continue;
                }
                for &v in &out[u] {
                    let cand = (dist[u].0 + cost(v), dist[u].1 + 1);
                    if cand < dist[v] {
                        dist[v] = cand;
                        pred[v] = Some(u);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let Some(&t) = outside.iter().filter(|&&x| sink[x] && dist[x] != INF).min_by_key(|&&x| (dist[x], x)) else {
            break;
        };
        if dist[t].0 >= 0 {
            break;
        }
        let mut v = t;
        let mut steps = 0;
        loop {
            in_i[v] = !in_i[v];
            steps += 1;
            match pred[v] {
                Some(u) if steps <= n => v = u,
                _ => break,
            }
        }
    }
    (0..n).filter(|&e| in_i[e]).collect()
}

/// Splits `set` into two sets independent in `inner`, if possible.
pub fn union_is_independent(inner: &MatroidOracle, set: &[usize]) -> Option<(Vec<usize>, Vec<usize>)> {
    union_partition_with(|_, s| inner.is_independent(s), set)
}

/// Adds a null object per agent, ranked below all of that agent's objects,
/// and replaces the matroid by the direct sum with a free matroid on the nulls
/// truncated at the number of agents. Without a matroid the free matroid is used.
pub fn augment_with_nulls(inst: &MatchingInstance) -> Result<MatchingInstance> {
    let n = inst.n_agents();
    let real: Vec<String> = inst.objects().to_vec();
    let taken: HashSet<&str> = real.iter().map(|s| s.as_str()).collect();
    let mut nulls = Vec::with_capacity(n);
    for a in inst.agents() {
        let mut name = format!("{NULL_PREFIX}{a}");
        while taken.contains(name.as_str()) {
            name.push('\'');
        }
        nulls.push(name);
    }
    let mut parts = Vec::new();
    match inst.matroid_spec() {
        Some(spec) => {
            let ground = spec_ground(spec, Some(&real))?;
            let covered: HashSet<&String> = ground.iter().collect();
            let rest: Vec<String> = real.iter().filter(|o| !covered.contains(o)).cloned().collect();
            parts.push(ground_explicitly(spec, &ground));
            if !rest.is_empty() {
                parts.push(MatroidSpec::Free { ground: Some(rest) });
            }
        }
        None => parts.push(MatroidSpec::Free { ground: Some(real.clone()) }),
    }
    parts.push(MatroidSpec::Free { ground: Some(nulls.clone()) });
    let spec = MatroidSpec::Truncation { inner: Box::new(MatroidSpec::DirectSum { parts }), bound: n };
    let m = real.len();
    let mut objects = real;
    objects.extend(nulls);
    let mut edges = inst.edges().to_vec();
    let mut prefs: Vec<Vec<(usize, usize)>> = inst.prefs().iter().map(|p| p.pairs()).collect();
    for a in 0..n {
        edges.push((a, m + a));
        for &o in inst.adj(a) {
            prefs[a].push((o, m + a));
        }
    }
    MatchingInstance::new(inst.agents().to_vec(), objects, edges, prefs, Some(spec), AlternativeKind::Constrained)
}

/// Rewrites free/uniform specs without ground so they can sit inside a direct sum.
fn ground_explicitly(spec: &MatroidSpec, ground: &[String]) -> MatroidSpec {
    match spec {
        MatroidSpec::Free { ground: None } => MatroidSpec::Free { ground: Some(ground.to_vec()) },
        MatroidSpec::Uniform { rank, ground: None } => MatroidSpec::Uniform { rank: *rank, ground: Some(ground.to_vec()) },
        MatroidSpec::Truncation { inner, bound } => {
            MatroidSpec::Truncation { inner: Box::new(ground_explicitly(inner, ground)), bound: *bound }
        }
        MatroidSpec::TruncatedUnion { parts, bound } => MatroidSpec::TruncatedUnion {
            parts: parts.iter().map(|p| ground_explicitly(p, ground)).collect(),
            bound: *bound,
        },
        other => other.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::super::Matroid;
    use super::*;

    fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
        (0u32..1 << n).map(move |mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect())
    }

    #[test]
    fn circuit_examples() {
        let u = MatroidOracle::new(4, Matroid::Uniform(2));
        assert_eq!(fundamental_circuit(&u, &[0, 1], 3).unwrap(), vec![0, 1]);
        assert!(matches!(fundamental_circuit(&u, &[0], 3), Err(Error::NotABasis)));
        let tri = MatroidOracle::new(3, Matroid::Graphic { nodes: 3, ends: vec![Some((0, 1)), Some((1, 2)), Some((0, 2))] });
        assert_eq!(fundamental_circuit(&tri, &[0, 1], 2).unwrap(), vec![0, 1]);
        let p = MatroidOracle::new(4, Matroid::Partition { part_of: vec![Some(0), Some(0), Some(1), Some(1)], caps: vec![1, 1] });
        assert_eq!(fundamental_circuit(&p, &[0, 2], 1).unwrap(), vec![0]);
    }

    #[test]
    fn bijection_examples() {
        let u = MatroidOracle::new(4, Matroid::Uniform(2));
        let f = bijective_exchange(&u, &[0, 1], &[0, 1]).unwrap();
        assert!(f.iter().all(|(a, b)| a == b));
        let f = bijective_exchange(&u, &[0, 1], &[2, 3]).unwrap();
        assert_eq!(f.len(), 2);
        assert!(matches!(bijective_exchange(&u, &[0], &[2, 3]), Err(Error::NotBases)));
        // 4-cycle: two spanning trees
        let c4 = MatroidOracle::new(4, Matroid::Graphic {
            nodes: 4,
            ends: vec![Some((0, 1)), Some((1, 2)), Some((2, 3)), Some((3, 0))],
        });
        let f = bijective_exchange(&c4, &[0, 1, 2], &[1, 2, 3]).unwrap();
        assert_eq!(f[&0], 3);
    }

    #[test]
    fn intersection_matches_brute_force_on_bipartite_matching() {
        // edges (a0,o0)=3 (a0,o1)=2 (a1,o0)=2 (a1,o1)=1
        let left = MatroidOracle::new(4, Matroid::Partition { part_of: vec![Some(0), Some(0), Some(1), Some(1)], caps: vec![1, 1] });
        let right = MatroidOracle::new(4, Matroid::Partition { part_of: vec![Some(0), Some(1), Some(0), Some(1)], caps: vec![1, 1] });
        let w = vec![3, 2, 2, 1];
        let got = max_weight_common_independent(&left, &right, &w);
        let val: i64 = got.iter().map(|&e| w[e]).sum();
        let best = subsets(4)
            .filter(|s| left.is_independent(s) && right.is_independent(s))
            .map(|s| s.iter().map(|&e| w[e]).sum::<i64>())
            .max()
            .unwrap();
        assert_eq!(val, best);
        assert_eq!(val, 4);
        let zero = max_weight_common_independent(&left, &right, &[0; 4]);
        assert!(zero.is_empty());
        let free = MatroidOracle::free(3);
        assert_eq!(max_weight_common_independent(&free, &free, &[1, -1, 2]), vec![0, 2]);
    }

    #[test]
    fn union_examples() {
        let u = MatroidOracle::new(3, Matroid::Uniform(1));
        let (a, b) = union_is_independent(&u, &[0, 1]).unwrap();
        assert_eq!(a.len() + b.len(), 2);
        assert!(union_is_independent(&u, &[0, 1, 2]).is_none());
        let (a, b) = union_is_independent(&u, &[2]).unwrap();
        assert_eq!((a, b), (vec![2], vec![]));
    }
}
