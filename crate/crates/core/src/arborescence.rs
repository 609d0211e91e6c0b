//! Rooted digraphs whose non-root nodes are agents ranking their incoming
//! arcs. Alternatives are the spanning arborescences rooted at the root.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::popularity::election::tally_outcomes;
use crate::popularity::Tally;
use crate::prefs::{PreferenceClass, PreferenceRelation};

#[derive(Debug, Clone)]
pub struct ArborescenceInstance {
    nodes: Vec<String>,
    root: usize,
    arcs: Vec<(usize, usize)>,
    /// agent index → node
    agents: Vec<usize>,
    /// node → agent index
    agent_of: Vec<Option<usize>>,
    /// agent index → relation over incoming arc ids
    prefs: Vec<PreferenceRelation>,
}

/// An arborescence as the arc entering each agent, indexed by agent.
pub type Arborescence = Vec<usize>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArborescenceDoc {
    pub nodes: Vec<String>,
    pub root: String,
    pub arcs: Vec<(String, String)>,
    #[serde(default)]
    pub prefs: BTreeMap<String, Vec<(usize, usize)>>,
}

impl ArborescenceInstance {
    /// `pref_pairs[v]` lists (better arc, worse arc) for node `v`.
    pub fn new(
        nodes: Vec<String>,
        root: usize,
        arcs: Vec<(usize, usize)>,
        pref_pairs: &HashMap<usize, Vec<(usize, usize)>>,
    ) -> Result<Self> {
        let n = nodes.len();
        if root >= n {
            return Err(Error::Validation("root is not a node".into()));
        }
        let mut names = std::collections::HashSet::new();
        for v in &nodes {
            if !names.insert(v) {
                return Err(Error::Validation(format!("duplicate node {v}")));
            }
        }
        if let Some(&(u, v)) = arcs.iter().find(|&&(u, v)| u >= n || v >= n) {
            return Err(Error::Validation(format!("arc ({u}, {v}) names an unknown node")));
        }
        let agents: Vec<usize> = (0..n).filter(|&v| v != root).collect();
        let mut agent_of = vec![None; n];
        for (i, &v) in agents.iter().enumerate() {
            agent_of[v] = Some(i);
        }
        for &v in pref_pairs.keys() {
            if v >= n || v == root {
                return Err(Error::Validation(format!("preferences for node {v}, which is not an agent")));
            }
        }
        let mut prefs = Vec::with_capacity(agents.len());
        for (i, &v) in agents.iter().enumerate() {
            let incoming = (0..arcs.len()).filter(|&e| arcs[e].1 == v);
            let pairs = pref_pairs.get(&v).map(|p| p.as_slice()).unwrap_or(&[]);
            let rel = PreferenceRelation::build(i, incoming, pairs).map_err(|e| match e {
                Error::Cycle { detail, .. } => Error::Cycle { agent: nodes[v].clone(), detail },
                Error::UnknownObject(_) => {
                    Error::Validation(format!("preference of node {} mentions an arc not entering it", nodes[v]))
                }
                other => other,
            })?;
            prefs.push(rel);
        }
        Ok(ArborescenceInstance { nodes, root, arcs, agents, agent_of, prefs })
    }

    pub fn from_doc(doc: ArborescenceDoc) -> Result<Self> {
        let index: HashMap<&str, usize> = doc.nodes.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let node = |name: &str| index.get(name).copied().ok_or_else(|| Error::Validation(format!("unknown node {name}")));
        let root = node(&doc.root)?;
        let arcs = doc.arcs.iter().map(|(u, v)| Ok((node(u)?, node(v)?))).collect::<Result<Vec<_>>>()?;
        let mut prefs = HashMap::new();
        for (v, pairs) in &doc.prefs {
            prefs.insert(node(v)?, pairs.clone());
        }
        Self::new(doc.nodes.clone(), root, arcs, &prefs)
    }

    pub fn to_doc(&self) -> ArborescenceDoc {
        let mut prefs = BTreeMap::new();
        for (i, p) in self.prefs.iter().enumerate() {
            let pairs = p.cover_pairs();
            if !pairs.is_empty() {
                prefs.insert(self.nodes[self.agents[i]].clone(), pairs);
            }
        }
        ArborescenceDoc {
            nodes: self.nodes.clone(),
            root: self.nodes[self.root].clone(),
            arcs: self.arcs.iter().map(|&(u, v)| (self.nodes[u].clone(), self.nodes[v].clone())).collect(),
            prefs,
        }
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    /// Node of each agent.
    pub fn agents(&self) -> &[usize] {
        &self.agents
    }

    pub fn agent_of(&self, v: usize) -> Option<usize> {
        self.agent_of[v]
    }

    pub fn prefs(&self) -> &[PreferenceRelation] {
        &self.prefs
    }

    pub fn preference_class(&self) -> PreferenceClass {
        self.prefs.iter().map(|p| p.classify()).max().unwrap_or(PreferenceClass::Strict)
    }

    fn reachable_without(&self, banned: Option<usize>) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        seen[self.root] = true;
        let mut stack = vec![self.root];
        while let Some(u) = stack.pop() {
            for &(x, y) in &self.arcs {
                if x == u && !seen[y] && Some(y) != banned {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen
    }

    /// Errors if some node cannot be reached from the root.
    pub fn check_reachable(&self) -> Result<()> {
        let seen = self.reachable_without(None);
        match (0..self.nodes.len()).find(|&v| !seen[v]) {
            Some(v) => Err(Error::Unreachable(format!("node {} cannot be reached from the root", self.nodes[v]))),
            None => Ok(()),
        }
    }

    /// Arcs lying on some arborescence: `(u, v)` with `u` reachable avoiding `v`.
    pub fn usable_arcs(&self) -> Vec<bool> {
        let mut usable = vec![false; self.arcs.len()];
        for v in 0..self.nodes.len() {
            if v == self.root {
                continue;
            }
            let seen = self.reachable_without(Some(v));
            for (e, &(x, y)) in self.arcs.iter().enumerate() {
                if y == v && x != v && seen[x] {
                    usable[e] = true;
                }
            }
        }
        usable
    }

    /// Whether `arcs` (ids, any order) form an arborescence spanning every node.
    pub fn is_arborescence(&self, arcs: &[usize]) -> bool {
        let n = self.nodes.len();
        let mut parent: Vec<Option<usize>> = vec![None; n];
        for &e in arcs {
            let Some(&(u, v)) = self.arcs.get(e) else { return false };
            if v == self.root || parent[v].is_some() {
                return false;
            }
            parent[v] = Some(u);
        }
        if arcs.len() != n - 1 {
            return false;
        }
        // every node must climb to the root without revisiting
        (0..n).all(|v| {
            let mut cur = v;
            for _ in 0..n {
                if cur == self.root {
                    return true;
                }
                cur = parent[cur].expect("non-root node has a parent");
            }
            cur == self.root
        })
    }

    /// Agent-indexed entering arcs of an arborescence given as arc ids.
    pub fn outcome(&self, arcs: &[usize]) -> Result<Arborescence> {
        if !self.is_arborescence(arcs) {
            return Err(Error::Validation("not a spanning arborescence".into()));
        }
        let mut out = vec![0; self.agents.len()];
        for &e in arcs {
            out[self.agent_of[self.arcs[e].1].expect("entering arc of an agent")] = e;
        }
        Ok(out)
    }

    /// Every spanning arborescence (capped at `limit`).
    pub fn enumerate(&self, limit: usize) -> Result<Vec<Arborescence>> {
        self.check_reachable()?;
        let usable = self.usable_arcs();
        let options: Vec<Vec<usize>> = self
            .agents
            .iter()
            .map(|&v| (0..self.arcs.len()).filter(|&e| usable[e] && self.arcs[e].1 == v).collect())
            .collect();
        let mut out = Vec::new();
        let mut cur = vec![0usize; self.agents.len()];
        self.walk(0, &options, &mut cur, &mut out, limit)?;
        Ok(out)
    }

    fn walk(
        &self,
        i: usize,
        options: &[Vec<usize>],
        cur: &mut Vec<usize>,
        out: &mut Vec<Arborescence>,
        limit: usize,
    ) -> Result<()> {
        if i == cur.len() {
            if self.is_arborescence(cur) {
                if out.len() >= limit {
                    return Err(Error::too_large("arborescences", limit));
                }
                out.push(cur.clone());
            }
            return Ok(());
        }
        for &e in &options[i] {
            cur[i] = e;
            self.walk(i + 1, options, cur, out, limit)?;
        }
        Ok(())
    }

    pub fn tally(&self, set: &[Arborescence], competitor: &Arborescence) -> Tally {
        let s: Vec<Vec<Option<usize>>> = set.iter().map(|t| t.iter().map(|&e| Some(e)).collect()).collect();
        let refs: Vec<&[Option<usize>]> = s.iter().map(|v| v.as_slice()).collect();
        let n: Vec<Option<usize>> = competitor.iter().map(|&e| Some(e)).collect();
        tally_outcomes(&self.prefs, &refs, &n)
    }

    /// Competitor beating `set` among all arborescences: margin < 0, or in
    /// strict mode margin <= 0 and not a member.
    pub fn counterexample(&self, set: &[Arborescence], strict: bool, limit: usize) -> Result<Option<Arborescence>> {
        for t in self.enumerate(limit)? {
            let margin = self.tally(set, &t).margin;
            if margin < 0 || (strict && margin == 0 && !set.contains(&t)) {
                return Ok(Some(t));
            }
        }
        Ok(None)
    }

    /// An arborescence no agent would trade for another arborescence's arc.
    pub fn top_choice(&self, limit: usize) -> Result<Option<Arborescence>> {
        let all = self.enumerate(limit)?;
        Ok(all.iter().find(|t| {
            self.prefs.iter().enumerate().all(|(a, p)| all.iter().all(|u| !p.prefers(Some(u[a]), Some(t[a]))))
        }).cloned())
    }
}

pub fn parse_arborescence_instance(json: &str) -> Result<ArborescenceInstance> {
    let doc: ArborescenceDoc = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    ArborescenceInstance::from_doc(doc)
}

pub fn arborescence_instance_to_json(inst: &ArborescenceInstance) -> String {
    serde_json::to_string_pretty(&inst.to_doc()).expect("document serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> ArborescenceInstance {
        let nodes = vec!["r".to_string(), "a".to_string(), "b".to_string()];
        let arcs = vec![(0, 1), (0, 2), (1, 2), (2, 1)];
        let mut prefs = HashMap::new();
        prefs.insert(1, vec![(3, 0)]);
        prefs.insert(2, vec![(2, 1)]);
        ArborescenceInstance::new(nodes, 0, arcs, &prefs).unwrap()
    }

    #[test]
    fn enumerates_three_trees() {
        let inst = triangle();
        let all = inst.enumerate(100).unwrap();
        assert_eq!(all.len(), 3);
        assert!(all.iter().all(|t| inst.is_arborescence(t)));
    }

    #[test]
    fn json_round_trip() {
        let inst = triangle();
        let again = parse_arborescence_instance(&arborescence_instance_to_json(&inst)).unwrap();
        assert_eq!(again.arcs(), inst.arcs());
        assert_eq!(again.prefs(), inst.prefs());
    }

    #[test]
    fn unreachable_node() {
        let nodes = vec!["r".to_string(), "a".to_string()];
        let inst = ArborescenceInstance::new(nodes, 0, vec![], &HashMap::new()).unwrap();
        assert!(matches!(inst.enumerate(10), Err(Error::Unreachable(_))));
    }
}
