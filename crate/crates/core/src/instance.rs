//! Matching instances, matchings, k-matchings and their JSON forms.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::bipartite;
use crate::error::{Error, Result};
use crate::matroid::{compile_spec, MatroidOracle, MatroidSpec};
use crate::prefs::{Comparison, PreferenceClass, PreferenceRelation};

/// Which matchings count as alternatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AlternativeKind {
    #[default]
    All,
    /// Matchings whose object set is independent in the instance matroid.
    Constrained,
    /// Matchings covering every agent.
    APerfect,
}

/// Agent-indexed assignment; `None` means unmatched.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching(pub Vec<Option<usize>>);

impl Matching {
    pub fn empty(n_agents: usize) -> Self {
        Matching(vec![None; n_agents])
    }

    #[inline]
    pub fn get(&self, a: usize) -> Option<usize> {
        self.0[a]
    }

    pub fn objects(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.0.iter().flatten().copied().collect();
        v.sort_unstable();
        v
    }

    pub fn size(&self) -> usize {
        self.0.iter().flatten().count()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.iter().enumerate().filter_map(|(a, o)| o.map(|o| (a, o)))
    }
}

pub type MatchingSet = Vec<Matching>;

/// A multigraph matching where every agent and object has degree at most `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KMatching {
    pub k: usize,
    /// Objects incident to each agent, with multiplicity.
    pub incidence: Vec<Vec<usize>>,
}

/// Splits a k-matching into `k` matchings (some possibly empty) covering every edge copy.
pub fn decompose_k_matching(km: &KMatching, n_objects: usize) -> Result<Vec<Matching>> {
    let mut obj_deg = vec![0usize; n_objects];
    for inc in &km.incidence {
        if inc.len() > km.k {
            return Err(Error::Validation("agent degree exceeds k".into()));
        }
        for &o in inc {
            if o >= n_objects {
                return Err(Error::UnknownObject(o.to_string()));
            }
            obj_deg[o] += 1;
        }
    }
    if obj_deg.iter().any(|&d| d > km.k) {
        return Err(Error::Validation("object degree exceeds k".into()));
    }
    let edges: Vec<(usize, usize)> =
        km.incidence.iter().enumerate().flat_map(|(a, inc)| inc.iter().map(move |&o| (a, o))).collect();
    let colours = bipartite::regular_decomposition(km.incidence.len(), n_objects, &edges, km.k);
    Ok(colours
        .into_iter()
        .map(|cls| {
            let mut m = Matching::empty(km.incidence.len());
            for e in cls {
                let (a, o) = edges[e];
                m.0[a] = Some(o);
            }
            m
        })
        .collect())
}

#[derive(Debug, Clone)]
pub struct MatchingInstance {
    agents: Vec<String>,
    objects: Vec<String>,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    obj_adj: Vec<Vec<usize>>,
    prefs: Vec<PreferenceRelation>,
    matroid_spec: Option<MatroidSpec>,
    matroid: Option<MatroidOracle>,
    alternatives: AlternativeKind,
    agent_index: HashMap<String, usize>,
    object_index: HashMap<String, usize>,
}

fn index_names(names: &[String], what: &str) -> Result<HashMap<String, usize>> {
    let mut map = HashMap::new();
    for (i, n) in names.iter().enumerate() {
        if map.insert(n.clone(), i).is_some() {
            return Err(Error::Validation(format!("duplicate {what} {n}")));
        }
    }
    Ok(map)
}

impl MatchingInstance {
    /// `pref_pairs[a]` lists (better, worse) object pairs for agent `a`.
    pub fn new(
        agents: Vec<String>,
        objects: Vec<String>,
        edges: Vec<(usize, usize)>,
        pref_pairs: Vec<Vec<(usize, usize)>>,
        matroid_spec: Option<MatroidSpec>,
        alternatives: AlternativeKind,
    ) -> Result<Self> {
        let agent_index = index_names(&agents, "agent")?;
        let object_index = index_names(&objects, "object")?;
        let (n, m) = (agents.len(), objects.len());
        if pref_pairs.len() > n {
            return Err(Error::Validation("preferences for unknown agent".into()));
        }
        let mut edges = edges;
        for &(a, o) in &edges {
            if a >= n {
                return Err(Error::Validation(format!("edge names unknown agent {a}")));
            }
            if o >= m {
                return Err(Error::UnknownObject(format!("edge object {o}")));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        let mut adj = vec![Vec::new(); n];
        let mut obj_adj = vec![Vec::new(); m];
        for &(a, o) in &edges {
            adj[a].push(o);
            obj_adj[o].push(a);
        }
        let mut prefs = Vec::with_capacity(n);
        for a in 0..n {
            let pairs = pref_pairs.get(a).map(|v| v.as_slice()).unwrap_or(&[]);
            let rel = PreferenceRelation::build(a, adj[a].iter().copied(), pairs).map_err(|e| match e {
                Error::Cycle { detail, .. } => Error::Cycle { agent: agents[a].clone(), detail },
                Error::UnknownObject(_) => Error::UnknownObject(format!(
                    "preference of agent {} mentions a non-adjacent object",
                    agents[a]
                )),
                other => other,
            })?;
            prefs.push(rel);
        }
        if matroid_spec.is_some() && alternatives != AlternativeKind::Constrained {
            return Err(Error::Validation("a matroid requires alternatives = constrained".into()));
        }
        let matroid = match &matroid_spec {
            Some(s) => Some(MatroidOracle::new(m, compile_spec(s, &objects)?)),
            None => None,
        };
        Ok(MatchingInstance {
            agents,
            objects,
            edges,
            adj,
            obj_adj,
            prefs,
            matroid_spec,
            matroid,
            alternatives,
            agent_index,
            object_index,
        })
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }
    pub fn objects(&self) -> &[String] {
        &self.objects
    }
    pub fn n_agents(&self) -> usize {
        self.agents.len()
    }
    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
    /// Objects adjacent to agent `a`, sorted.
    pub fn adj(&self, a: usize) -> &[usize] {
        &self.adj[a]
    }
    /// Agents adjacent to object `o`, sorted.
    pub fn obj_adj(&self, o: usize) -> &[usize] {
        &self.obj_adj[o]
    }
    pub fn has_edge(&self, a: usize, o: usize) -> bool {
        self.adj[a].binary_search(&o).is_ok()
    }
    pub fn pref(&self, a: usize) -> &PreferenceRelation {
        &self.prefs[a]
    }
    pub fn prefs(&self) -> &[PreferenceRelation] {
        &self.prefs
    }
    pub fn alternatives(&self) -> AlternativeKind {
        self.alternatives
    }
    pub fn matroid_spec(&self) -> Option<&MatroidSpec> {
        self.matroid_spec.as_ref()
    }
    /// The object matroid, if one constrains the alternatives.
    pub fn matroid(&self) -> Option<&MatroidOracle> {
        self.matroid.as_ref()
    }
    pub fn is_constrained(&self) -> bool {
        self.matroid.is_some()
    }
    pub fn agent_id(&self, name: &str) -> Option<usize> {
        self.agent_index.get(name).copied()
    }
    pub fn object_id(&self, name: &str) -> Option<usize> {
        self.object_index.get(name).copied()
    }

    /// Most general preference class among the agents.
    pub fn preference_class(&self) -> PreferenceClass {
        self.prefs.iter().map(|p| p.classify()).max().unwrap_or(PreferenceClass::Strict)
    }

    /// Same instance with a different alternative kind (matroid dropped unless constrained).
    pub fn with_alternatives(&self, kind: AlternativeKind) -> Result<Self> {
        let spec = if kind == AlternativeKind::Constrained { self.matroid_spec.clone() } else { None };
        MatchingInstance::new(
            self.agents.clone(),
            self.objects.clone(),
            self.edges.clone(),
            self.prefs.iter().map(|p| p.pairs()).collect(),
            spec,
            kind,
        )
    }

    /// Checks that `m` is an alternative of this instance.
    pub fn check_matching(&self, m: &Matching) -> Result<()> {
        if m.0.len() != self.n_agents() {
            return Err(Error::Validation("matching length differs from agent count".into()));
        }
        let mut used = HashSet::new();
        for (a, o) in m.pairs() {
            if o >= self.n_objects() {
                return Err(Error::UnknownObject(o.to_string()));
            }
            if !self.has_edge(a, o) {
                return Err(Error::Validation(format!("{} is not adjacent to {}", self.agents[a], self.objects[o])));
            }
            if !used.insert(o) {
                return Err(Error::Validation(format!("object {} assigned twice", self.objects[o])));
            }
        }
        if self.alternatives == AlternativeKind::APerfect {
            if let Some(a) = (0..self.n_agents()).find(|&a| m.0[a].is_none()) {
                return Err(Error::Validation(format!("agent {} unmatched in an agent-perfect instance", self.agents[a])));
            }
        }
        if let Some(mat) = &self.matroid {
            if !mat.is_independent(&m.objects()) {
                return Err(Error::Validation("matched objects are dependent in the matroid".into()));
            }
        }
        Ok(())
    }

    pub fn is_alternative(&self, m: &Matching) -> bool {
        self.check_matching(m).is_ok()
    }

    pub fn check_set(&self, set: &[Matching]) -> Result<()> {
        set.iter().try_for_each(|m| self.check_matching(m))
    }

    /// How `agent` ranks its outcome in `m` against its outcome in `n`.
    pub fn compare_matchings(&self, agent: usize, m: &Matching, n: &Matching) -> Result<Comparison> {
        if agent >= self.n_agents() || m.0.len() != self.n_agents() || n.0.len() != self.n_agents() {
            return Err(Error::Validation(format!("agent {agent} or matching length out of range")));
        }
        self.prefs[agent].compare(m.0[agent], n.0[agent])
    }
}

/// Incremental construction by name.
#[derive(Debug, Clone, Default)]
pub struct InstanceBuilder {
    agents: Vec<String>,
    objects: Vec<String>,
    edges: Vec<(usize, usize)>,
    prefs: Vec<Vec<(usize, usize)>>,
    matroid: Option<MatroidSpec>,
    alternatives: AlternativeKind,
}

impl InstanceBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn agent(&mut self, name: impl Into<String>) -> usize {
        self.agents.push(name.into());
        self.prefs.push(Vec::new());
        self.agents.len() - 1
    }

    pub fn object(&mut self, name: impl Into<String>) -> usize {
        self.objects.push(name.into());
        self.objects.len() - 1
    }

    pub fn object_name(&self, o: usize) -> &str {
        &self.objects[o]
    }

    pub fn edge(&mut self, a: usize, o: usize) -> &mut Self {
        self.edges.push((a, o));
        self
    }

    pub fn prefer(&mut self, a: usize, better: usize, worse: usize) -> &mut Self {
        self.prefs[a].push((better, worse));
        self
    }

    /// Adds edges to every listed object and ranks them strictly, best first.
    pub fn ranking(&mut self, a: usize, objs: &[usize]) -> &mut Self {
        for &o in objs {
            self.edges.push((a, o));
        }
        for w in objs.windows(2) {
            self.prefs[a].push((w[0], w[1]));
        }
        self
    }

    /// Adds edges to every listed object and ranks the tiers, best first.
    pub fn tiers(&mut self, a: usize, tiers: &[Vec<usize>]) -> &mut Self {
        for &o in tiers.iter().flatten() {
            self.edges.push((a, o));
        }
        for w in tiers.windows(2) {
            for &x in &w[0] {
                for &y in &w[1] {
                    self.prefs[a].push((x, y));
                }
            }
        }
        self
    }

    pub fn matroid(&mut self, spec: MatroidSpec) -> &mut Self {
        self.matroid = Some(spec);
        self.alternatives = AlternativeKind::Constrained;
        self
    }

    pub fn alternatives(&mut self, kind: AlternativeKind) -> &mut Self {
        self.alternatives = kind;
        self
    }

    pub fn build(&self) -> Result<MatchingInstance> {
        MatchingInstance::new(
            self.agents.clone(),
            self.objects.clone(),
            self.edges.clone(),
            self.prefs.clone(),
            self.matroid.clone(),
            self.alternatives,
        )
    }
}

/// On-disk instance document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub agents: Vec<String>,
    pub objects: Vec<String>,
    pub edges: Vec<(String, String)>,
    #[serde(default)]
    pub prefs: BTreeMap<String, Vec<(String, String)>>,
    #[serde(default)]
    pub matroid: Option<MatroidSpec>,
    #[serde(default)]
    pub alternatives: AlternativeKind,
}

impl InstanceDoc {
    pub fn into_instance(self) -> Result<MatchingInstance> {
        let agents = index_names(&self.agents, "agent")?;
        let objects = index_names(&self.objects, "object")?;
        let agent = |n: &str| agents.get(n).copied().ok_or_else(|| Error::Validation(format!("unknown agent {n}")));
        let object = |n: &str| objects.get(n).copied().ok_or_else(|| Error::UnknownObject(n.to_string()));
        let mut edges = Vec::new();
        for (a, o) in &self.edges {
            edges.push((agent(a)?, object(o)?));
        }
        let mut prefs = vec![Vec::new(); self.agents.len()];
        for (a, pairs) in &self.prefs {
            let ai = agent(a)?;
            for (x, y) in pairs {
                prefs[ai].push((object(x)?, object(y)?));
            }
        }
        MatchingInstance::new(self.agents, self.objects, edges, prefs, self.matroid, self.alternatives)
    }

    pub fn from_instance(inst: &MatchingInstance) -> Self {
        let mut prefs = BTreeMap::new();
        for (a, p) in inst.prefs.iter().enumerate() {
            let pairs: Vec<(String, String)> = p
                .cover_pairs()
                .into_iter()
                .map(|(x, y)| (inst.objects[x].clone(), inst.objects[y].clone()))
                .collect();
            if !pairs.is_empty() {
                prefs.insert(inst.agents[a].clone(), pairs);
            }
        }
        InstanceDoc {
            agents: inst.agents.clone(),
            objects: inst.objects.clone(),
            edges: inst.edges.iter().map(|&(a, o)| (inst.agents[a].clone(), inst.objects[o].clone())).collect(),
            prefs,
            matroid: inst.matroid_spec.clone(),
            alternatives: inst.alternatives,
        }
    }
}

pub fn parse_instance(json: &str) -> Result<MatchingInstance> {
    let doc: InstanceDoc = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    doc.into_instance()
}

pub fn instance_to_json(inst: &MatchingInstance) -> String {
    serde_json::to_string_pretty(&InstanceDoc::from_instance(inst)).expect("instance serializes")
}

/// Assignment map keyed by agent name; unmatched agents map to null.
pub fn matching_to_map(inst: &MatchingInstance, m: &Matching) -> BTreeMap<String, Option<String>> {
    (0..inst.n_agents()).map(|a| (inst.agents[a].clone(), m.0[a].map(|o| inst.objects[o].clone()))).collect()
}

pub fn matching_from_map(inst: &MatchingInstance, map: &BTreeMap<String, Option<String>>) -> Result<Matching> {
    let mut m = Matching::empty(inst.n_agents());
    for (a, o) in map {
        let ai = inst.agent_id(a).ok_or_else(|| Error::Validation(format!("unknown agent {a}")))?;
        if let Some(o) = o {
            m.0[ai] = Some(inst.object_id(o).ok_or_else(|| Error::UnknownObject(o.clone()))?);
        }
    }
    Ok(m)
}

pub fn parse_matching(inst: &MatchingInstance, json: &str) -> Result<Matching> {
    let map: BTreeMap<String, Option<String>> = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    matching_from_map(inst, &map)
}

/// Accepts either a list of assignment maps or a single map.
pub fn parse_matching_set(inst: &MatchingInstance, json: &str) -> Result<MatchingSet> {
    let v: serde_json::Value = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    let maps: Vec<BTreeMap<String, Option<String>>> = if v.is_array() {
        serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()))?
    } else {
        vec![serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()))?]
    };
    maps.iter().map(|m| matching_from_map(inst, m)).collect()
}

pub fn set_to_json(inst: &MatchingInstance, set: &[Matching]) -> serde_json::Value {
    serde_json::to_value(set.iter().map(|m| matching_to_map(inst, m)).collect::<Vec<_>>()).expect("set serializes")
}
