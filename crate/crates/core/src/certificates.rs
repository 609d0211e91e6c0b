//! Exchange graphs between matchings and branching certificates that count
//! the votes of a set of matchings against a competitor.
//!
//! Exchange operations work on an instance produced by `augment_with_nulls`,
//! where every agent holds an object (possibly its null) and the held objects
//! form a basis. `lift_matching` and `lower_matching` convert between the two.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::instance::{AlternativeKind, Matching, MatchingInstance, MatchingSet};
use crate::matroid::{augment_with_nulls, bijective_exchange, is_basis, MatroidOracle, NULL_PREFIX};
use crate::popularity::{dominates, tally};

/// Replaces unmatched entries by the agent's null object.
pub fn lift_matching(inst: &MatchingInstance, m: &Matching) -> Matching {
    let base = inst.n_objects();
    Matching(m.0.iter().enumerate().map(|(a, o)| Some(o.unwrap_or(base + a))).collect())
}

/// Inverse of [`lift_matching`].
pub fn lower_matching(inst: &MatchingInstance, m: &Matching) -> Matching {
    let base = inst.n_objects();
    Matching(m.0.iter().map(|o| o.filter(|&o| o < base)).collect())
}

fn oracle_of(aug: &MatchingInstance) -> Result<&MatroidOracle> {
    aug.matroid().ok_or_else(|| Error::Validation("exchange operations need an instance augmented with nulls".into()))
}

fn null_of(aug: &MatchingInstance, a: usize) -> Result<usize> {
    let o = aug.n_objects().checked_sub(aug.n_agents()).map(|base| base + a);
    match o {
        Some(o) if aug.objects()[o].starts_with(NULL_PREFIX) && aug.has_edge(a, o) => Ok(o),
        _ => Err(Error::Validation("exchange operations need an instance augmented with nulls".into())),
    }
}

fn basis_of(aug: &MatchingInstance, m: &Matching) -> Result<Vec<usize>> {
    let oracle = oracle_of(aug)?;
    if aug.check_matching(m).is_err() || m.0.iter().any(|o| o.is_none()) {
        return Err(Error::NotBases);
    }
    let objs = m.objects();
    if !is_basis(oracle, &objs) {
        return Err(Error::NotBases);
    }
    Ok(objs)
}

fn holders(m: &Matching, n_objects: usize) -> Vec<Option<usize>> {
    let mut h = vec![None; n_objects];
    for (a, o) in m.pairs() {
        h[o] = Some(a);
    }
    h
}

/// Basis elements exchangeable for `o`; an element already in the basis
/// can only replace itself.
fn circuit(oracle: &MatroidOracle, basis: &[usize], o: usize) -> Vec<usize> {
    if basis.contains(&o) {
        return vec![o];
    }
    let mut swapped = basis.to_vec();
    let mut out = Vec::new();
    for i in 0..basis.len() {
        swapped[i] = o;
        if oracle.is_independent(&swapped) {
            out.push(basis[i]);
        }
        swapped[i] = basis[i];
    }
    out
}

/// Arc `(a, b)` whenever `a` may take its competitor object at the price of
/// `b` giving up its current one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExchangeGraph {
    pub n_agents: usize,
    pub arcs: Vec<(usize, usize)>,
    #[serde(skip)]
    out: Vec<Vec<usize>>,
}

impl ExchangeGraph {
    fn from_out(out: Vec<Vec<usize>>) -> Self {
        let arcs = out.iter().enumerate().flat_map(|(a, s)| s.iter().map(move |&b| (a, b))).collect();
        ExchangeGraph { n_agents: out.len(), arcs, out }
    }

    pub fn successors(&self, a: usize) -> &[usize] {
        &self.out[a]
    }

    pub fn has_arc(&self, a: usize, b: usize) -> bool {
        self.out[a].binary_search(&b).is_ok()
    }

    /// Shortest cycle through `pivot` using only `allowed` nodes.
    fn shortest_cycle(&self, allowed: &[bool], pivot: usize) -> Option<Vec<usize>> {
        let mut prev = vec![usize::MAX; self.n_agents];
        let mut seen = vec![false; self.n_agents];
        seen[pivot] = true;
        let mut queue = VecDeque::from([pivot]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.out[u] {
                if v == pivot {
                    return Some(trace(&prev, pivot, u));
                }
                if allowed[v] && !seen[v] {
                    seen[v] = true;
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        None
    }

    /// Shortest path from `from` to `to` using only `allowed` nodes.
    fn shortest_path(&self, allowed: &[bool], from: usize, to: usize) -> Option<Vec<usize>> {
        let mut prev = vec![usize::MAX; self.n_agents];
        let mut seen = vec![false; self.n_agents];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            if u == to {
                return Some(trace(&prev, from, u));
            }
            for &v in &self.out[u] {
                if allowed[v] && !seen[v] {
                    seen[v] = true;
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        None
    }
}

fn trace(prev: &[usize], from: usize, mut u: usize) -> Vec<usize> {
    let mut path = vec![u];
    while u != from {
        u = prev[u];
        path.push(u);
    }
    path.reverse();
    path
}

/// Exchange graph from `n` into `m`; both must hold a basis.
pub fn build_exchange_graph(aug: &MatchingInstance, m: &Matching, n: &Matching) -> Result<ExchangeGraph> {
    let oracle = oracle_of(aug)?;
    let mb = basis_of(aug, m)?;
    basis_of(aug, n)?;
    let holder = holders(m, aug.n_objects());
    let out = (0..aug.n_agents())
        .map(|a| {
            let o = n.0[a].expect("bases cover every agent");
            let mut s: Vec<usize> =
                circuit(oracle, &mb, o).into_iter().map(|x| holder[x].expect("basis objects are held")).collect();
            s.sort_unstable();
            s
        })
        .collect();
    Ok(ExchangeGraph::from_out(out))
}

/// One-in one-out subgraph of the exchange graph fixed by a basis exchange bijection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BrualdiDigraph {
    /// `succ[a]` holds, in `m`, the object paired with `a`'s competitor object.
    pub succ: Vec<usize>,
    /// Competitor object to current object.
    pub bijection: BTreeMap<usize, usize>,
}

impl BrualdiDigraph {
    /// The cycle through `a`, starting at `a`.
    pub fn cycle_of(&self, a: usize) -> Vec<usize> {
        let mut c = vec![a];
        let mut v = self.succ[a];
        while v != a {
            c.push(v);
            v = self.succ[v];
        }
        c
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.succ.len()];
        let mut out = Vec::new();
        for a in 0..self.succ.len() {
            if !seen[a] {
                let c = self.cycle_of(a);
                for &v in &c {
                    seen[v] = true;
                }
                out.push(c);
            }
        }
        out
    }
}

pub fn build_brualdi_digraph(aug: &MatchingInstance, m: &Matching, n: &Matching) -> Result<BrualdiDigraph> {
    let oracle = oracle_of(aug)?;
    let mb = basis_of(aug, m)?;
    let nb = basis_of(aug, n)?;
    let bijection = bijective_exchange(oracle, &nb, &mb)?;
    let holder = holders(m, aug.n_objects());
    let succ: Vec<usize> = (0..aug.n_agents())
        .map(|a| holder[bijection[&n.0[a].expect("bases cover every agent")]].expect("basis objects are held"))
        .collect();
    let mut indeg = vec![0usize; succ.len()];
    for &b in &succ {
        indeg[b] += 1;
    }
    if indeg.iter().any(|&d| d != 1) {
        return Err(Error::NoBijection("pairing is not one-to-one on agents".into()));
    }
    Ok(BrualdiDigraph { succ, bijection })
}

fn check_walk(g: &ExchangeGraph, walk: &[usize], closed: bool, what: &str) -> Result<Vec<bool>> {
    if walk.is_empty() {
        return Err(Error::NotACycle(format!("empty {what}")));
    }
    let mut on = vec![false; g.n_agents];
    for &a in walk {
        if a >= g.n_agents || std::mem::replace(&mut on[a], true) {
            return Err(Error::NotACycle(format!("{what} repeats or leaves the agents")));
        }
    }
    let steps = if closed { walk.len() } else { walk.len() - 1 };
    for i in 0..steps {
        let (a, b) = (walk[i], walk[(i + 1) % walk.len()]);
        if !g.has_arc(a, b) {
            return Err(Error::NotACycle(format!("{what} uses a missing arc ({a}, {b})")));
        }
    }
    Ok(on)
}

fn checked(aug: &MatchingInstance, m: Matching) -> Result<Matching> {
    basis_of(aug, &m)
        .map_err(|_| Error::Validation("exchange result is not independent; the oracle is not a matroid".into()))?;
    Ok(m)
}

/// Moves the agents of the shortest sub-cycle through `pivot` (inside the
/// given cycle's agents) to their competitor objects.
pub fn apply_cycle_exchange(
    aug: &MatchingInstance,
    m: &Matching,
    n: &Matching,
    cycle: &[usize],
    pivot: usize,
) -> Result<Matching> {
    let g = build_exchange_graph(aug, m, n)?;
    let on = check_walk(&g, cycle, true, "cycle")?;
    if pivot >= on.len() || !on[pivot] {
        return Err(Error::NotACycle("pivot is not on the cycle".into()));
    }
    let short = g.shortest_cycle(&on, pivot).expect("the cycle itself passes through the pivot");
    let mut out = m.clone();
    for &a in &short {
        out.0[a] = n.0[a];
    }
    checked(aug, out)
}

/// Moves the agents of a shortest sub-path to their competitor objects; the
/// last agent drops to its null.
pub fn apply_path_exchange(aug: &MatchingInstance, m: &Matching, n: &Matching, path: &[usize]) -> Result<Matching> {
    let g = build_exchange_graph(aug, m, n)?;
    let on = check_walk(&g, path, false, "path")?;
    let (first, last) = (path[0], *path.last().expect("non-empty"));
    let short = g.shortest_path(&on, first, last).expect("the path itself connects its ends");
    let mut out = m.clone();
    for &a in &short[..short.len() - 1] {
        out.0[a] = n.0[a];
    }
    out.0[last] = Some(null_of(aug, last)?);
    checked(aug, out)
}

/// Path exchanges applied one after another. Later paths must not have
/// arcs into earlier ones.
pub fn apply_paths_exchange(
    aug: &MatchingInstance,
    m: &Matching,
    n: &Matching,
    paths: &[Vec<usize>],
) -> Result<Matching> {
    let mut cur = m.clone();
    for p in paths {
        cur = apply_path_exchange(aug, &cur, n, p)?;
    }
    Ok(cur)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Color {
    /// Prefers the competitor to every member.
    Red,
    /// Some member beats the competitor.
    Blue,
    Grey,
}

/// Which member's path contributed an arc, and where that path starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ArcSource {
    pub matching: usize,
    pub start: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchingCertificate {
    pub arcs: Vec<(usize, usize)>,
    /// Parallel to `arcs`.
    pub provenance: Vec<Vec<ArcSource>>,
    pub colors: Vec<Color>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertificateOutcome {
    Certificate(BranchingCertificate),
    /// A set of the same size dominating the input.
    Improvement(MatchingSet),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum BranchingVerdict {
    Valid { red: usize, blue: usize },
    Invalid { reason: String },
}

impl BranchingVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, BranchingVerdict::Valid { .. })
    }
}

/// Either a colored branching witnessing that `n` does not win against
/// `set`, or a set dominating `set` built from the failure.
pub fn build_branching_certificate(inst: &MatchingInstance, set: &[Matching], n: &Matching) -> Result<CertificateOutcome> {
    if set.len() < 2 {
        return Err(Error::Validation("branching certificates need at least two matchings".into()));
    }
    if inst.alternatives() == AlternativeKind::APerfect {
        return Err(Error::Validation("branching certificates do not cover agent-perfect alternatives".into()));
    }
    inst.check_set(set)?;
    inst.check_matching(n)?;
    let aug = augment_with_nulls(inst)?;
    let members: Vec<Matching> = set.iter().map(|m| lift_matching(inst, m)).collect();
    let comp = lift_matching(inst, n);
    let k = inst.n_agents();
    let t = tally(inst, set, n);
    let mut colors = vec![Color::Grey; k];
    for &a in &t.prefers_competitor {
        colors[a] = Color::Red;
    }
    for &a in &t.prefers_set {
        colors[a] = Color::Blue;
    }
    let improve = |idx: usize, replacement: Matching| -> Result<CertificateOutcome> {
        let mut out = set.to_vec();
        out[idx] = lower_matching(inst, &replacement);
        assert!(dominates(inst, &out, set), "exchange construction must dominate its input");
        Ok(CertificateOutcome::Improvement(out))
    };

    let digraphs = members.iter().map(|m| build_brualdi_digraph(&aug, m, &comp)).collect::<Result<Vec<_>>>()?;
    for (i, d) in digraphs.iter().enumerate() {
        for a in (0..k).filter(|&a| colors[a] == Color::Red) {
            let cyc = d.cycle_of(a);
            if cyc.iter().all(|&v| colors[v] != Color::Blue) {
                return improve(i, apply_cycle_exchange(&aug, &members[i], &comp, &cyc, a)?);
            }
        }
    }

    // paths from red agents to the first blue one, keeping only maximal ones
    let mut paths: Vec<(usize, Vec<usize>)> = Vec::new();
    for (i, d) in digraphs.iter().enumerate() {
        let mut own: Vec<Vec<usize>> = Vec::new();
        for a in (0..k).filter(|&a| colors[a] == Color::Red) {
            let mut p = vec![a];
            let mut v = d.succ[a];
            loop {
                p.push(v);
                if colors[v] == Color::Blue {
                    break;
                }
                v = d.succ[v];
            }
            own.push(p);
        }
        let inner: Vec<bool> = {
            let mut f = vec![false; k];
            for p in &own {
                for &v in &p[1..] {
                    f[v] = true;
                }
            }
            f
        };
        paths.extend(own.into_iter().filter(|p| !inner[p[0]]).map(|p| (i, p)));
    }

    // every agent entered by paths of at most one member
    let mut entered: Vec<Option<(usize, usize)>> = vec![None; k];
    for (pi, (i, p)) in paths.iter().enumerate() {
        for (pos, &v) in p.iter().enumerate().skip(1) {
            match entered[v] {
                None => entered[v] = Some((pi, pos)),
                Some((qi, qpos)) => {
                    let (j, q) = (&paths[qi].0, &paths[qi].1);
                    assert_ne!(i, j, "paths of one member are disjoint");
                    // shorten the member whose object at `v` is not the better one
                    let pref = inst.pref(v);
                    let (idx, prefix) = if pref.prefers(set[*i].0[v], set[*j].0[v]) {
                        (*j, &q[..=qpos])
                    } else {
                        (*i, &p[..=pos])
                    };
                    return improve(idx, apply_path_exchange(&aug, &members[idx], &comp, prefix)?);
                }
            }
        }
    }

    let mut arc_index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut arcs = Vec::new();
    let mut provenance: Vec<Vec<ArcSource>> = Vec::new();
    let mut pred: Vec<Option<usize>> = vec![None; k];
    for (i, p) in &paths {
        for w in p.windows(2) {
            let e = *arc_index.entry((w[0], w[1])).or_insert_with(|| {
                arcs.push((w[0], w[1]));
                provenance.push(Vec::new());
                arcs.len() - 1
            });
            provenance[e].push(ArcSource { matching: *i, start: p[0] });
            pred[w[1]] = Some(w[0]);
        }
    }

    if let Some(cycle) = find_cycle(&pred) {
        let source_of = |a: usize, b: usize| provenance[arc_index[&(a, b)]][0];
        let segments = cycle_segments(&cycle, source_of);
        let mut graphs: BTreeMap<usize, ExchangeGraph> = BTreeMap::new();
        for &(i, _) in &segments {
            if let std::collections::btree_map::Entry::Vacant(e) = graphs.entry(i) {
                e.insert(build_exchange_graph(&aug, &members[i], &comp)?);
            }
        }
        let segments = shorten(segments, &graphs);
        let mut out = set.to_vec();
        for &i in graphs.keys() {
            let own: Vec<Vec<usize>> = segments.iter().filter(|s| s.0 == i).map(|s| s.1.clone()).collect();
            if !own.is_empty() {
                out[i] = lower_matching(inst, &apply_paths_exchange(&aug, &members[i], &comp, &own)?);
            }
        }
        assert!(dominates(inst, &out, set), "cycle construction must dominate its input");
        return Ok(CertificateOutcome::Improvement(out));
    }

    let cert = BranchingCertificate { arcs, provenance, colors };
    for a in (0..k).filter(|&a| cert.colors[a] == Color::Red) {
        assert_eq!(cert.arcs.iter().filter(|e| e.0 == a).count(), set.len(), "red agents leave once per member");
    }
    Ok(CertificateOutcome::Certificate(cert))
}

/// A directed cycle in the in-degree-one graph given by predecessors.
fn find_cycle(pred: &[Option<usize>]) -> Option<Vec<usize>> {
    let n = pred.len();
    let mut state = vec![0u8; n];
    for s in 0..n {
        let mut walk = Vec::new();
        let mut v = s;
        while state[v] == 0 {
            state[v] = 1;
            walk.push(v);
            match pred[v] {
                Some(u) => v = u,
                None => break,
            }
        }
        if state[v] == 1 && pred[v].is_some() {
            if let Some(pos) = walk.iter().position(|&x| x == v) {
                let mut c = walk[pos..].to_vec();
                c.reverse();
                return Some(c);
            }
        }
        for &x in &walk {
            state[x] = 2;
        }
    }
    None
}

/// Splits a cycle of the branching into maximal runs of one source path;
/// each run lists its nodes from its start to the next run's start.
fn cycle_segments(cycle: &[usize], source_of: impl Fn(usize, usize) -> ArcSource) -> Vec<(usize, Vec<usize>)> {
    let len = cycle.len();
    let src = |t: usize| source_of(cycle[t % len], cycle[(t + 1) % len]);
    let first = (0..len).find(|&t| src(t) != src(t + len - 1)).expect("a cycle mixes paths of several starts");
    let mut segments: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut t = first;
    while t < first + len {
        let s = src(t);
        assert_eq!(cycle[t % len], s.start, "runs begin where their path begins");
        let mut nodes = vec![cycle[t % len]];
        while t < first + len && src(t) == s {
            t += 1;
            nodes.push(cycle[t % len]);
        }
        segments.push((s.matching, nodes));
    }
    segments
}

fn arc_count(segments: &[(usize, Vec<usize>)]) -> usize {
    segments.iter().map(|s| s.1.len() - 1).sum()
}

/// Replaces the cycle by shorter ones until no member has an exchange arc
/// from a later run into an earlier run of its own.
fn shorten(mut segments: Vec<(usize, Vec<usize>)>, graphs: &BTreeMap<usize, ExchangeGraph>) -> Vec<(usize, Vec<usize>)> {
    'outer: loop {
        let l = segments.len();
        for i in 0..l {
            for j in 0..i {
                if segments[i].0 != segments[j].0 {
                    continue;
                }
                let g = &graphs[&segments[i].0];
                for (pa, &a) in segments[i].1.iter().enumerate() {
                    for (pb, &b) in segments[j].1.iter().enumerate() {
                        if !g.has_arc(a, b) {
                            continue;
                        }
                        let mut joined = segments[i].1[..=pa].to_vec();
                        joined.extend_from_slice(&segments[j].1[pb..]);
                        let mut seen = std::collections::HashSet::new();
                        if !joined.iter().all(|v| seen.insert(*v)) {
                            continue;
                        }
                        let mut next: Vec<(usize, Vec<usize>)> = segments[j + 1..i].to_vec();
                        next.push((segments[i].0, joined));
                        if next.len() < 2 || arc_count(&next) >= arc_count(&segments) {
                            continue;
                        }
                        segments = next;
                        continue 'outer;
                    }
                }
            }
        }
        return segments;
    }
}

/// Checks the branching axioms and coloring conditions, and recounts red and
/// blue agents per component.
pub fn verify_colored_branching(cert: &BranchingCertificate) -> BranchingVerdict {
    let n = cert.colors.len();
    let invalid = |r: &str| BranchingVerdict::Invalid { reason: r.to_string() };
    let mut indeg = vec![0usize; n];
    let mut outdeg = vec![0usize; n];
    let mut pred = vec![None; n];
    let mut seen_arcs = std::collections::HashSet::new();
    for &(a, b) in &cert.arcs {
        if a >= n || b >= n || a == b || !seen_arcs.insert((a, b)) {
            return invalid("malformed arc");
        }
        indeg[b] += 1;
        outdeg[a] += 1;
        pred[b] = Some(a);
    }
    if indeg.iter().any(|&d| d > 1) {
        return invalid("in-degree");
    }
    if find_cycle(&pred).is_some() {
        return invalid("cycle");
    }
    let mut root = (0..n).collect::<Vec<usize>>();
    for v in 0..n {
        let mut r = v;
        while let Some(u) = pred[r] {
            r = u;
        }
        root[v] = r;
    }
    let mut size = vec![0usize; n];
    for v in 0..n {
        size[root[v]] += 1;
    }
    for v in 0..n {
        if size[root[v]] > 1 && outdeg[v] == 0 && cert.colors[v] != Color::Blue {
            return invalid("leaf color");
        }
    }
    for v in 0..n {
        if cert.colors[v] == Color::Red && outdeg[v] < 2 {
            return invalid("red outdegree");
        }
    }
    let mut red = vec![0usize; n];
    let mut blue = vec![0usize; n];
    for v in 0..n {
        match cert.colors[v] {
            Color::Red => red[root[v]] += 1,
            Color::Blue => blue[root[v]] += 1,
            Color::Grey => {}
        }
    }
    if (0..n).any(|r| size[r] > 1 && blue[r] < red[r] + 1) {
        return invalid("component count");
    }
    BranchingVerdict::Valid { red: red.iter().sum(), blue: blue.iter().sum() }
}

/// `{"arcs": [[a, b], ...], "colors": {agent: color}, "provenance": {"a->b": [...]}}` with agent names.
pub fn certificate_to_json(inst: &MatchingInstance, cert: &BranchingCertificate) -> Value {
    let name = |a: usize| inst.agents()[a].clone();
    let arcs: Vec<Value> = cert.arcs.iter().map(|&(a, b)| json!([name(a), name(b)])).collect();
    let colors: BTreeMap<String, Color> = cert.colors.iter().enumerate().map(|(a, &c)| (name(a), c)).collect();
    let provenance: BTreeMap<String, Value> = cert
        .arcs
        .iter()
        .zip(&cert.provenance)
        .map(|(&(a, b), srcs)| {
            let v: Vec<Value> = srcs.iter().map(|s| json!({"matching": s.matching, "start": name(s.start)})).collect();
            (format!("{}->{}", name(a), name(b)), Value::Array(v))
        })
        .collect();
    json!({"arcs": arcs, "colors": colors, "provenance": provenance})
}
