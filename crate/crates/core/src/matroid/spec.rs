//! JSON description of matroids over named objects.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::Matroid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MatroidSpec {
    Free {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ground: Option<Vec<String>>,
    },
    Uniform {
        rank: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ground: Option<Vec<String>>,
    },
    Partition {
        parts: Vec<Vec<String>>,
        capacities: Vec<usize>,
    },
    Graphic {
        nodes: Vec<String>,
        edge_map: BTreeMap<String, (String, String)>,
    },
    DirectSum {
        parts: Vec<MatroidSpec>,
    },
    Truncation {
        inner: Box<MatroidSpec>,
        bound: usize,
    },
    /// Union of two matroids, optionally truncated.
    TruncatedUnion {
        parts: Vec<MatroidSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bound: Option<usize>,
    },
}

/// Names covered by `spec`; `default` stands in for an omitted ground.
pub fn spec_ground(spec: &MatroidSpec, default: Option<&[String]>) -> Result<Vec<String>> {
    let need_default = || {
        default
            .map(|d| d.to_vec())
            .ok_or_else(|| Error::Validation("nested free/uniform matroid needs an explicit ground".into()))
    };
    Ok(match spec {
        MatroidSpec::Free { ground } | MatroidSpec::Uniform { ground, .. } => match ground {
            Some(g) => g.clone(),
            None => need_default()?,
        },
        MatroidSpec::Partition { parts, .. } => parts.iter().flatten().cloned().collect(),
        MatroidSpec::Graphic { edge_map, .. } => edge_map.keys().cloned().collect(),
        MatroidSpec::DirectSum { parts } => {
            let mut all = Vec::new();
            for p in parts {
                all.extend(spec_ground(p, None)?);
            }
            all
        }
        MatroidSpec::Truncation { inner, .. } => spec_ground(inner, default)?,
        MatroidSpec::TruncatedUnion { parts, .. } => {
            let mut seen = HashSet::new();
            let mut all = Vec::new();
            for p in parts {
                for g in spec_ground(p, default)? {
                    if seen.insert(g.clone()) {
                        all.push(g);
                    }
                }
            }
            all
        }
    })
}

fn check_distinct(names: &[String], what: &str) -> Result<()> {
    let mut seen = HashSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(Error::Validation(format!("{what}: element {n} listed twice")));
        }
    }
    Ok(())
}

/// Compiles `spec` into a matroid over `ground` (local index = position in `ground`).
fn compile_local(spec: &MatroidSpec, ground: &[String]) -> Result<Matroid> {
    let local: HashMap<&str, usize> = ground.iter().enumerate().map(|(i, g)| (g.as_str(), i)).collect();
    let idx = |name: &str| {
        local
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownObject(name.to_string()))
    };
    Ok(match spec {
        MatroidSpec::Free { .. } => Matroid::Free,
        MatroidSpec::Uniform { rank, .. } => Matroid::Uniform(*rank),
        MatroidSpec::Partition { parts, capacities } => {
            if parts.len() != capacities.len() {
                return Err(Error::Validation("partition: parts and capacities differ in length".into()));
            }
            let mut part_of = vec![None; ground.len()];
            for (p, members) in parts.iter().enumerate() {
                for m in members {
                    let i = idx(m)?;
                    if part_of[i].is_some() {
                        return Err(Error::Validation(format!("partition: {m} in two parts")));
                    }
                    part_of[i] = Some(p);
                }
            }
            Matroid::Partition { part_of, caps: capacities.clone() }
        }
        MatroidSpec::Graphic { nodes, edge_map } => {
            check_distinct(nodes, "graphic nodes")?;
            let node: HashMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
            let mut ends = vec![None; ground.len()];
            for (obj, (u, v)) in edge_map {
                let nu = *node.get(u.as_str()).ok_or_else(|| Error::Validation(format!("graphic: unknown node {u}")))?;
                let nv = *node.get(v.as_str()).ok_or_else(|| Error::Validation(format!("graphic: unknown node {v}")))?;
                ends[idx(obj)?] = Some((nu, nv));
            }
            Matroid::Graphic { nodes: nodes.len(), ends }
        }
        MatroidSpec::DirectSum { parts } => {
            let mut owner = vec![None; ground.len()];
            let mut compiled = Vec::new();
            for (p, part) in parts.iter().enumerate() {
                let g = spec_ground(part, None)?;
                check_distinct(&g, "direct_sum part")?;
                for (l, name) in g.iter().enumerate() {
                    let i = idx(name)?;
                    if owner[i].is_some() {
                        return Err(Error::Validation(format!("direct_sum: {name} in two parts")));
                    }
                    owner[i] = Some((p, l));
                }
                compiled.push(compile_local(part, &g)?);
            }
            Matroid::DirectSum { owner, parts: compiled }
        }
        MatroidSpec::Truncation { inner, bound } => {
            Matroid::Truncation { inner: Box::new(compile_local(inner, ground)?), bound: *bound }
        }
        MatroidSpec::TruncatedUnion { parts, bound } => {
            if parts.len() != 2 {
                return Err(Error::Validation("truncated_union takes exactly two parts".into()));
            }
            let lift = |p: &MatroidSpec| -> Result<Matroid> {
                let g = spec_ground(p, Some(ground))?;
                let m = compile_local(p, &g)?;
                let mut owner = vec![None; ground.len()];
                for (l, name) in g.iter().enumerate() {
                    owner[idx(name)?] = Some((0, l));
                }
                // elements outside a part's ground are loops for that part
                let loops: Vec<usize> = (0..ground.len()).filter(|&i| owner[i].is_none()).collect();
                let mut parts = vec![m];
                if !loops.is_empty() {
                    for (l, &i) in loops.iter().enumerate() {
                        owner[i] = Some((1, l));
                    }
                    parts.push(Matroid::Uniform(0));
                }
                Ok(Matroid::DirectSum { owner, parts })
            };
            let u = Matroid::Union { left: Box::new(lift(&parts[0])?), right: Box::new(lift(&parts[1])?) };
            match bound {
                Some(b) => Matroid::Truncation { inner: Box::new(u), bound: *b },
                None => u,
            }
        }
    })
}

/// Compiles a top-level spec over all instance objects. Objects outside the
/// spec's ground are unconstrained.
pub fn compile_spec(spec: &MatroidSpec, objects: &[String]) -> Result<Matroid> {
    let ground = spec_ground(spec, Some(objects))?;
    check_distinct(&ground, "matroid ground")?;
    let global: HashMap<&str, usize> = objects.iter().enumerate().map(|(i, o)| (o.as_str(), i)).collect();
    let mut owner = vec![None; objects.len()];
    for (l, name) in ground.iter().enumerate() {
        let i = *global.get(name.as_str()).ok_or_else(|| Error::UnknownObject(name.clone()))?;
        owner[i] = Some((0, l));
    }
    let inner = compile_local(spec, &ground)?;
    Ok(Matroid::DirectSum { owner, parts: vec![inner] })
}
