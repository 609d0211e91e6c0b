use std::collections::VecDeque;

use serde::Serialize;

use crate::arborescence::{Arborescence, ArborescenceInstance};
use crate::error::Result;

/// Two arborescences (agent-indexed entering arcs) and the maximal arc fixed per agent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArborescencePair {
    pub first: Arborescence,
    pub second: Arborescence,
    pub maximal: Vec<usize>,
}

impl ArborescencePair {
    pub fn as_set(&self) -> Vec<Arborescence> {
        if self.first == self.second {
            vec![self.first.clone()]
        } else {
            vec![self.first.clone(), self.second.clone()]
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Origin {
    /// Stands for the original arc.
    Arc(usize),
    /// Enters the split node of an agent; stands for the original arc.
    IntoSplit(usize),
    /// From the split node to its agent.
    OutOfSplit,
}

struct Aux {
    nodes: usize,
    root: usize,
    arcs: Vec<(usize, usize, Origin)>,
}

impl Aux {
    fn reach_all(&self, banned: &[bool]) -> bool {
        let mut seen = vec![false; self.nodes];
        seen[self.root] = true;
        let mut stack = vec![self.root];
        while let Some(u) = stack.pop() {
            for (i, &(x, y, _)) in self.arcs.iter().enumerate() {
                if x == u && !banned[i] && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// At least two arc-disjoint paths from the `source` nodes to `target` avoiding banned arcs.
    fn two_paths(&self, banned: &[bool], source: &[bool], target: usize) -> bool {
        let mut flow = vec![false; self.arcs.len()];
        for _ in 0..2 {
            // residual BFS; prev[v] = (arc, forward?)
            let mut prev: Vec<Option<(usize, bool)>> = vec![None; self.nodes];
            let mut seen = source.to_vec();
            let mut queue: VecDeque<usize> = (0..self.nodes).filter(|&v| source[v]).collect();
            while let Some(u) = queue.pop_front() {
                for (i, &(x, y, _)) in self.arcs.iter().enumerate() {
                    if banned[i] {
                        continue;
                    }
                    let step = if x == u && !flow[i] {
                        Some((y, true))
                    } else if y == u && flow[i] {
                        Some((x, false))
                    } else {
                        None
                    };
                    if let Some((w, fwd)) = step {
                        if !seen[w] {
                            seen[w] = true;
                            prev[w] = Some((i, fwd));
                            queue.push_back(w);
                        }
                    }
                }
            }
            if !seen[target] {
                return false;
            }
            let mut v = target;
            while !source[v] {
                let (i, fwd) = prev[v].expect("path back to the root");
                flow[i] = fwd;
                v = if fwd { self.arcs[i].0 } else { self.arcs[i].1 };
            }
        }
        true
    }

    /// Two arc-disjoint spanning arborescences, as per-node entering arc ids.
    fn disjoint_pair(&self) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
        let mut in_tree = vec![false; self.nodes];
        in_tree[self.root] = true;
        let mut used = vec![false; self.arcs.len()];
        let mut first = vec![None; self.nodes];
        for _ in 1..self.nodes {
            let pick = (0..self.arcs.len()).find(|&i| {
                let (u, v, _) = self.arcs[i];
                if used[i] || !in_tree[u] || in_tree[v] {
                    return false;
                }
                // keep every node reachable outside the tree, and every set
                // avoiding the tree entered twice
                used[i] = true;
                in_tree[v] = true;
                let ok = self.reach_all(&used)
                    && (0..self.nodes).all(|w| in_tree[w] || self.two_paths(&used, &in_tree, w));
                used[i] = false;
                in_tree[v] = false;
                ok
            });
            let i = pick.expect("a disjoint pair exists, so some arc keeps the invariant");
            used[i] = true;
            in_tree[self.arcs[i].1] = true;
            first[self.arcs[i].1] = Some(i);
        }
        let mut second = vec![None; self.nodes];
        let mut seen = vec![false; self.nodes];
        seen[self.root] = true;
        let mut queue = VecDeque::from([self.root]);
        while let Some(u) = queue.pop_front() {
            for (i, &(x, y, _)) in self.arcs.iter().enumerate() {
                if x == u && !used[i] && !seen[y] {
                    seen[y] = true;
                    second[y] = Some(i);
                    queue.push_back(y);
                }
            }
        }
        (first, second)
    }
}

/// Two arborescences that together give every agent one of its maximal
/// incoming arcs.
pub fn solve_arborescence(inst: &ArborescenceInstance) -> Result<ArborescencePair> {
    inst.check_reachable()?;
    let usable = inst.usable_arcs();
    let arcs = inst.arcs();
    let n = inst.nodes().len();
    let mut aux = Aux { nodes: n, root: inst.root(), arcs: Vec::new() };
    let mut maximal = Vec::with_capacity(inst.agents().len());
    for (a, &v) in inst.agents().iter().enumerate() {
        let incoming: Vec<usize> = (0..arcs.len()).filter(|&e| usable[e] && arcs[e].1 == v).collect();
        let best = inst.prefs()[a].maximal_elements(&incoming)[0];
        maximal.push(best);
        aux.arcs.push((arcs[best].0, v, Origin::Arc(best)));
        let others: Vec<usize> = incoming.iter().copied().filter(|&e| e != best).collect();
        match others.len() {
            0 => aux.arcs.push((arcs[best].0, v, Origin::Arc(best))),
            1 => aux.arcs.push((arcs[others[0]].0, v, Origin::Arc(others[0]))),
            _ => {
                let split = aux.nodes;
                aux.nodes += 1;
                aux.arcs.push((split, v, Origin::OutOfSplit));
                for &e in &others {
                    aux.arcs.push((arcs[e].0, split, Origin::IntoSplit(e)));
                }
            }
        }
    }
    let (t1, t2) = aux.disjoint_pair();
    let back = |tree: &[Option<usize>]| -> Arborescence {
        inst.agents()
            .iter()
            .map(|&v| {
                let i = tree[v].expect("spanning");
                match aux.arcs[i].2 {
                    Origin::Arc(e) => e,
                    Origin::OutOfSplit => match aux.arcs[tree[aux.arcs[i].0].expect("split node entered")].2 {
                        Origin::IntoSplit(e) => e,
                        _ => unreachable!("split nodes are only entered from original tails"),
                    },
                    Origin::IntoSplit(_) => unreachable!("agents are not entered by split arcs"),
                }
            })
            .collect()
    };
    let pair = ArborescencePair { first: back(&t1), second: back(&t2), maximal };
    assert!(inst.is_arborescence(&pair.first) && inst.is_arborescence(&pair.second));
    assert!((0..pair.maximal.len()).all(|a| pair.first[a] == pair.maximal[a] || pair.second[a] == pair.maximal[a]));
    Ok(pair)
}
