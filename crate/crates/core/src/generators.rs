//! Deterministic instance families, seeded random instances and the search
//! for an assignment instance where a Pareto-optimal pair loses a vote.

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arborescence::ArborescenceInstance;
use crate::error::{Error, Result};
use crate::instance::{AlternativeKind, InstanceBuilder, Matching, MatchingInstance, MatchingSet};
use crate::matroid::MatroidSpec;
use crate::popularity::{enumerate_alternatives, Election};

/// Complete instance on `k² + k + 1` agents and objects: one star object,
/// `k` neutral objects and `k²` objects ranked below the star by everyone.
pub fn gen_lower_bound_matching(k: usize) -> Result<MatchingInstance> {
    if k == 0 {
        return Err(Error::Validation("lower bound family needs k >= 1".into()));
    }
    let n = k * k + k + 1;
    let mut b = InstanceBuilder::new();
    let agents: Vec<usize> = (0..n).map(|i| b.agent(format!("a{i}"))).collect();
    let star = b.object("o_star");
    let mut objs = vec![star];
    objs.extend((0..k).map(|i| b.object(format!("o1_{i}"))));
    let low: Vec<usize> = (0..k * k).map(|i| b.object(format!("o2_{i}"))).collect();
    objs.extend(&low);
    for &a in &agents {
        for &o in &objs {
            b.edge(a, o);
        }
        for &o in &low {
            b.prefer(a, star, o);
        }
    }
    b.build()
}

/// `k + 1` identical agents over `k(k+1)` base objects and one object per
/// `k`-subset of them, which beats each member of its subset; at most one
/// subset object may be used.
pub fn gen_lower_bound_matroid(k: usize) -> Result<MatchingInstance> {
    if k < 2 {
        return Err(Error::Validation("matroid lower bound family needs k >= 2".into()));
    }
    let m = k * (k + 1);
    let mut b = InstanceBuilder::new();
    let agents: Vec<usize> = (0..=k).map(|i| b.agent(format!("a{i}"))).collect();
    let base: Vec<usize> = (0..m).map(|i| b.object(format!("o{i}"))).collect();
    let mut subsets = Vec::new();
    let mut combo: Vec<usize> = (0..k).collect();
    loop {
        let name = format!("o_{{{}}}", combo.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","));
        subsets.push((b.object(name), combo.clone()));
        if !crate::popularity::election::next_combination(&mut combo, m) {
            break;
        }
    }
    for &a in &agents {
        for &o in &base {
            b.edge(a, o);
        }
        for (s, members) in &subsets {
            b.edge(a, *s);
            for &i in members {
                b.prefer(a, *s, base[i]);
            }
        }
    }
    let upper: Vec<String> = subsets.iter().map(|(s, _)| b.object_name(*s).to_string()).collect();
    b.matroid(MatroidSpec::Partition { parts: vec![upper], capacities: vec![1] });
    b.build()
}

/// Three agents, three objects, complete; everyone prefers o0 to o2 and
/// nothing else, so every matching is dominated.
pub fn gen_no_pareto() -> MatchingInstance {
    let mut b = InstanceBuilder::new();
    let agents: Vec<usize> = (0..3).map(|i| b.agent(format!("a{i}"))).collect();
    let objs: Vec<usize> = (0..3).map(|i| b.object(format!("o{i}"))).collect();
    for &a in &agents {
        for &o in &objs {
            b.edge(a, o);
        }
        b.prefer(a, objs[0], objs[2]);
    }
    b.build().expect("fixed instance is valid")
}

/// Instance admitting a Pareto-optimal matching iff the graph on `n_nodes`
/// nodes has a vertex cover of size at most `ell`.
pub fn gen_vertex_cover_reduction(n_nodes: usize, edges: &[(usize, usize)], ell: usize) -> Result<MatchingInstance> {
    if ell > n_nodes {
        return Err(Error::Validation(format!("cover bound {ell} exceeds {n_nodes} nodes")));
    }
    let mut seen = std::collections::HashSet::new();
    for &(v, w) in edges {
        if v >= n_nodes || w >= n_nodes || v == w || !seen.insert((v.min(w), v.max(w))) {
            return Err(Error::Validation(format!("not a simple graph edge: ({v}, {w})")));
        }
    }
    let mut b = InstanceBuilder::new();
    let node_obj: Vec<usize> = (0..n_nodes).map(|v| b.object(format!("o_v{v}"))).collect();
    let spare: Vec<usize> = (0..n_nodes - ell).map(|i| b.object(format!("o_bar{i}"))).collect();
    for v in 0..n_nodes {
        let a = b.agent(format!("a_v{v}"));
        b.edge(a, node_obj[v]);
        for &s in &spare {
            b.edge(a, s);
            b.prefer(a, s, node_obj[v]);
        }
    }
    for (i, &(v, w)) in edges.iter().enumerate() {
        let ov = b.object(format!("o_e{i}_v{v}"));
        let ow = b.object(format!("o_e{i}_v{w}"));
        let o: Vec<usize> = (1..=3).map(|j| b.object(format!("o_e{i}_{j}"))).collect();
        let ae = b.agent(format!("a_e{i}"));
        b.edge(ae, ov).edge(ae, ow).edge(ae, node_obj[v]).edge(ae, node_obj[w]);
        b.prefer(ae, ov, node_obj[v]).prefer(ae, ow, node_obj[w]);
        for (end, eo) in [(v, ov), (w, ow)] {
            let a = b.agent(format!("a_e{i}_v{end}"));
            b.ranking(a, &[eo, o[0]]);
        }
        for j in 1..=3 {
            let a = b.agent(format!("a_e{i}_{j}"));
            b.edge(a, o[0]).edge(a, o[1]).edge(a, o[2]);
            b.prefer(a, o[0], o[1]);
        }
    }
    b.build()
}

/// Instance admitting a popular set of `k` matchings iff the tuples contain a
/// perfect `(k+1)`-dimensional matching over `parts`. `tuples[t][j]` indexes
/// into `parts[j]`.
pub fn gen_ldm_reduction(parts: &[Vec<String>], tuples: &[Vec<usize>], k: usize) -> Result<MatchingInstance> {
    let l = k + 1;
    if k < 1 || parts.len() != l {
        return Err(Error::Validation(format!("need {l} parts for k = {k}")));
    }
    let m = parts[0].len();
    if parts.iter().any(|p| p.len() != m) {
        return Err(Error::Validation("parts differ in size".into()));
    }
    for t in tuples {
        if t.len() != l || t.iter().any(|&i| i >= m) {
            return Err(Error::Validation(format!("malformed tuple {t:?}")));
        }
    }
    let listed: std::collections::HashSet<&Vec<usize>> = tuples.iter().collect();
    let mut b = InstanceBuilder::new();
    // objects
    let oy: Vec<Vec<usize>> =
        (0..k).map(|j| (0..m).map(|h| b.object(format!("o_{}", parts[j][h]))).collect()).collect();
    let mut missing: Vec<(Vec<usize>, usize)> = Vec::new();
    let mut t = vec![0usize; l];
    if m > 0 {
        'product: loop {
            if !listed.contains(&t) {
                let name = t.iter().enumerate().map(|(j, &h)| parts[j][h].as_str()).collect::<Vec<_>>().join(",");
                missing.push((t.clone(), b.object(format!("o_({name})"))));
            }
            for j in (0..l).rev() {
                t[j] += 1;
                if t[j] < m {
                    continue 'product;
                }
                t[j] = 0;
            }
            break;
        }
    }
    let obar: Vec<usize> = (0..k).map(|j| b.object(format!("o_bar{j}"))).collect();
    let ohat: Vec<Vec<usize>> =
        (0..k).map(|j| (0..m).map(|h| b.object(format!("o_hat{j}_{h}"))).collect()).collect();
    let tilde: Vec<usize> = (0..k * k * m).map(|i| b.object(format!("o_tilde{i}"))).collect();
    let n0 = k * k * k * m + k * k * m + 1;
    let zero: Vec<usize> = (0..n0).map(|i| b.object(format!("o_zero{i}"))).collect();
    let all_y: Vec<usize> = oy.iter().flatten().copied().collect();
    // agents for the last part
    for h in 0..m {
        let a = b.agent(format!("a_{}", parts[k][h]));
        for &y in &all_y {
            b.edge(a, y);
        }
        for j in 0..k {
            b.edge(a, obar[j]);
            for &y in &oy[j] {
                b.prefer(a, y, obar[j]);
            }
        }
        for (t, o) in missing.iter().filter(|(t, _)| t[k] == h) {
            b.edge(a, *o);
            for j in 0..k {
                for (hh, &y) in oy[j].iter().enumerate() {
                    if hh != t[j] {
                        b.prefer(a, y, *o);
                    }
                }
            }
        }
    }
    for h in 0..m {
        for i in 0..k - 1 {
            let a = b.agent(format!("a_hat{h}_{i}"));
            for j in 0..k {
                b.ranking(a, &[oy[j][h], ohat[j][h]]);
            }
        }
    }
    for i in 0..n0 {
        let a = b.agent(format!("a_zero{i}"));
        for &y in &all_y {
            b.edge(a, y);
        }
        for &z in &zero {
            b.edge(a, z);
            for &y in &all_y {
                b.prefer(a, y, z);
            }
        }
        for &x in &tilde {
            b.edge(a, x);
        }
    }
    b.build()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PrefModel {
    Strict,
    Weak,
    Partial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MatroidKind {
    None,
    Uniform,
    Partition,
    Graphic,
}

/// Seeded random instance. Partial orders come from random DAGs over a
/// shuffled order, weak rankings from random ordered partitions.
pub fn gen_random(
    n: usize,
    m: usize,
    edge_density: f64,
    pref_model: PrefModel,
    matroid_kind: MatroidKind,
    seed: u64,
) -> Result<MatchingInstance> {
    if !(0.0..=1.0).contains(&edge_density) {
        return Err(Error::Validation(format!("edge density {edge_density} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = InstanceBuilder::new();
    let agents: Vec<usize> = (0..n).map(|i| b.agent(format!("a{i}"))).collect();
    let objs: Vec<usize> = (0..m).map(|i| b.object(format!("o{i}"))).collect();
    for &a in &agents {
        let mut adj: Vec<usize> = objs.iter().copied().filter(|_| rng.gen_bool(edge_density)).collect();
        adj.shuffle(&mut rng);
        match pref_model {
            PrefModel::Strict => {
                b.ranking(a, &adj);
            }
            PrefModel::Weak => {
                let mut tiers: Vec<Vec<usize>> = Vec::new();
                for (i, &o) in adj.iter().enumerate() {
                    if i == 0 || rng.gen_bool(0.5) {
                        tiers.push(Vec::new());
                    }
                    tiers.last_mut().unwrap().push(o);
                }
                b.tiers(a, &tiers);
            }
            PrefModel::Partial => {
                for &o in &adj {
                    b.edge(a, o);
                }
                for i in 0..adj.len() {
                    for j in i + 1..adj.len() {
                        if rng.gen_bool(0.4) {
                            b.prefer(a, adj[i], adj[j]);
                        }
                    }
                }
            }
        }
    }
    let names: Vec<String> = objs.iter().map(|&o| b.object_name(o).to_string()).collect();
    match matroid_kind {
        MatroidKind::None => {}
        MatroidKind::Uniform => {
            let rank = rng.gen_range(0..=m);
            b.matroid(MatroidSpec::Uniform { rank, ground: None });
        }
        MatroidKind::Partition => {
            let k = rng.gen_range(1..=m.clamp(1, 3));
            let mut parts: Vec<Vec<String>> = vec![Vec::new(); k];
            for name in &names {
                parts[rng.gen_range(0..k)].push(name.clone());
            }
            let capacities = parts.iter().map(|p| rng.gen_range(0..=p.len().max(1))).collect();
            b.matroid(MatroidSpec::Partition { parts, capacities });
        }
        MatroidKind::Graphic => {
            let nodes = rng.gen_range(2..=4usize);
            let node_names: Vec<String> = (0..nodes).map(|i| format!("v{i}")).collect();
            let mut edge_map = BTreeMap::new();
            for name in &names {
                let u = rng.gen_range(0..nodes);
                let v = rng.gen_range(0..nodes);
                edge_map.insert(name.clone(), (node_names[u].clone(), node_names[v].clone()));
            }
            b.matroid(MatroidSpec::Graphic { nodes: node_names, edge_map });
        }
    }
    b.build()
}

/// Seeded rooted digraph on `n` nodes (`n >= 2`, root `r`). A random tree
/// keeps every node reachable; other arcs appear with probability
/// `arc_density`. Each node ranks its incoming arcs under `pref_model`.
pub fn gen_random_arborescence(
    n: usize,
    arc_density: f64,
    pref_model: PrefModel,
    seed: u64,
) -> Result<ArborescenceInstance> {
    if n < 2 {
        return Err(Error::Validation("need a root and at least one other node".into()));
    }
    if !(0.0..=1.0).contains(&arc_density) {
        return Err(Error::Validation(format!("arc density {arc_density} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes: Vec<String> = std::iter::once("r".to_string()).chain((1..n).map(|i| format!("v{i}"))).collect();
    let mut arcs = Vec::new();
    for v in 1..n {
        let parent = rng.gen_range(0..v);
        for u in 0..n {
            if u != v && (u == parent || rng.gen_bool(arc_density)) {
                arcs.push((u, v));
            }
        }
    }
    let mut prefs = HashMap::new();
    for v in 1..n {
        let mut incoming: Vec<usize> = (0..arcs.len()).filter(|&e| arcs[e].1 == v).collect();
        incoming.shuffle(&mut rng);
        let mut pairs = Vec::new();
        match pref_model {
            PrefModel::Strict => {
                for i in 0..incoming.len() {
                    for j in i + 1..incoming.len() {
                        pairs.push((incoming[i], incoming[j]));
                    }
                }
            }
            PrefModel::Weak => {
                let mut tier = vec![0usize; incoming.len()];
                for i in 1..incoming.len() {
                    tier[i] = tier[i - 1] + rng.gen_bool(0.5) as usize;
                }
                for i in 0..incoming.len() {
                    for j in i + 1..incoming.len() {
                        if tier[i] < tier[j] {
                            pairs.push((incoming[i], incoming[j]));
                        }
                    }
                }
            }
            PrefModel::Partial => {
                for i in 0..incoming.len() {
                    for j in i + 1..incoming.len() {
                        if rng.gen_bool(0.4) {
                            pairs.push((incoming[i], incoming[j]));
                        }
                    }
                }
            }
        }
        prefs.insert(v, pairs);
    }
    ArborescenceInstance::new(nodes, 0, arcs, &prefs)
}

/// Agents whose best outcome in `set` is undominated among all alternatives.
pub fn top_choice_agents(inst: &MatchingInstance, set: &[Matching], cap: usize) -> Result<Vec<usize>> {
    let alts = enumerate_alternatives(inst, cap)?;
    Ok((0..inst.n_agents())
        .filter(|&a| {
            let p = inst.pref(a);
            set.iter().any(|m| alts.iter().all(|n| !p.prefers(n.0[a], m.0[a])))
        })
        .collect())
}

/// Assignment instance with strict rankings, a Pareto-optimal pair of
/// assignments and a competitor beating it. Searches seeded random instances
/// with 4 to `max_agents` agents for at most `budget`. Witnesses where exactly
/// two agents get a top choice are preferred; after a quarter of the budget
/// the first witness found is returned instead.
pub fn find_assignment_counterexample(
    max_agents: usize,
    budget: Duration,
) -> Result<(MatchingInstance, MatchingSet, Matching)> {
    let start = Instant::now();
    let mut seed = 0u64;
    let mut fallback = None;
    while start.elapsed() < budget && max_agents >= 4 {
        if fallback.is_some() && start.elapsed() >= budget / 4 {
            break;
        }
        for n in 4..=max_agents {
            seed += 1;
            let density = 0.35 + 0.1 * (seed % 4) as f64;
            let inst = gen_random(n, n, density, PrefModel::Strict, MatroidKind::None, seed)?
                .with_alternatives(AlternativeKind::APerfect)?;
            if let Some(found) = counterexample_in(&inst)? {
                if top_choice_agents(&found.0, &found.1, usize::MAX)?.len() == 2 {
                    return Ok(found);
                }
                fallback.get_or_insert(found);
            }
        }
    }
    fallback.ok_or_else(|| {
        Error::NotFound(format!("no counterexample with at most {max_agents} agents within {budget:?}"))
    })
}

fn counterexample_in(inst: &MatchingInstance) -> Result<Option<(MatchingInstance, MatchingSet, Matching)>> {
    let alts = enumerate_alternatives(inst, usize::MAX)?;
    if alts.len() < 3 {
        return Ok(None);
    }
    let v: Vec<Vec<Option<usize>>> = alts.iter().map(|m| m.0.clone()).collect();
    let e = Election::new(inst.prefs(), &v, false);
    let mut pair = vec![0, 1];
    loop {
        if !e.is_dominated(&pair) {
            if let Some(n) = e.first_beating(&pair, false) {
                let set = vec![alts[pair[0]].clone(), alts[pair[1]].clone()];
                return Ok(Some((inst.clone(), set, alts[n].clone())));
            }
        }
        if !crate::popularity::election::next_combination(&mut pair, alts.len()) {
            return Ok(None);
        }
    }
}
