//! Exact search for a Pareto-optimal matching on unconstrained instances.
//!
//! Agents are assigned class by class. Interchangeable agents take options in
//! a fixed order and interchangeable objects are handed out lowest index first,
//! so each matching is visited once up to symmetry. After every class, the
//! assigned agents are checked for an improvement among themselves that only
//! uses objects which stay free in every completion; such an improvement
//! survives any extension, so the branch is cut.

use super::symmetric::{agent_classes, object_classes};
use super::{pareto_improvement, verify_pareto_optimal};
use crate::error::{Error, Result};
use crate::instance::{AlternativeKind, Matching, MatchingInstance};

struct Dfs<'a> {
    inst: &'a MatchingInstance,
    classes: Vec<Vec<usize>>,
    agent_classes: Vec<Vec<usize>>,
    order: Vec<usize>,
    opts: Vec<Vec<Option<usize>>>,
    /// object classes adjacent to each agent class
    touches: Vec<Vec<usize>>,
    m: Matching,
    used: Vec<usize>,
    demand: Vec<usize>,
    assigned: Vec<usize>,
}

pub fn exists_pareto_optimal_matching(inst: &MatchingInstance) -> Result<Option<Matching>> {
    if inst.is_constrained() {
        return Err(Error::Validation("Pareto search needs an unconstrained instance".into()));
    }
    let classes = object_classes(inst);
    let mut obj_class = vec![0; inst.n_objects()];
    for (c, cls) in classes.iter().enumerate() {
        for &o in cls {
            obj_class[o] = c;
        }
    }
    let agent_cls = agent_classes(inst);
    let perfect = inst.alternatives() == AlternativeKind::APerfect;
    let mut opts = Vec::new();
    let mut touches = Vec::new();
    let mut demand = vec![0usize; classes.len()];
    for cls in &agent_cls {
        let mut t: Vec<usize> = Vec::new();
        for &o in inst.adj(cls[0]) {
            if !t.contains(&obj_class[o]) {
                t.push(obj_class[o]);
            }
        }
        for &c in &t {
            demand[c] += cls.len();
        }
        let mut o: Vec<Option<usize>> = t.iter().map(|&c| Some(c)).collect();
        if !perfect {
            o.push(None);
        }
        opts.push(o);
        touches.push(t);
    }
    let order = frontier_order(&touches, &demand, &agent_cls);
    let mut dfs = Dfs {
        inst,
        used: vec![0; classes.len()],
        classes,
        agent_classes: agent_cls,
        order,
        opts,
        touches,
        m: Matching::empty(inst.n_agents()),
        demand,
        assigned: Vec::new(),
    };
    dfs.step(0)
}

/// Greedy order closing as many object classes as early as possible.
fn frontier_order(touches: &[Vec<usize>], demand: &[usize], agent_classes: &[Vec<usize>]) -> Vec<usize> {
    let n = touches.len();
    let mut left = demand.to_vec();
    let mut touched = vec![false; demand.len()];
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let best = (0..n)
            .filter(|&t| !done[t])
            .max_by_key(|&t| {
                let size = agent_classes[t].len();
                let closes = touches[t].iter().filter(|&&c| left[c] == size).count();
                let near = touches[t].iter().filter(|&&c| touched[c]).count();
                (closes, near, std::cmp::Reverse(touches[t].len()), std::cmp::Reverse(t))
            })
            .unwrap();
        done[best] = true;
        for &c in &touches[best] {
            left[c] -= agent_classes[best].len();
            touched[c] = true;
        }
        order.push(best);
    }
    order
}

impl<'a> Dfs<'a> {
    fn step(&mut self, pos: usize) -> Result<Option<Matching>> {
        if pos == self.order.len() {
            return Ok(if verify_pareto_optimal(self.inst, &self.m)?.is_optimal() { Some(self.m.clone()) } else { None });
        }
        let t = self.order[pos];
        let mut cnt = vec![0usize; self.opts[t].len()];
        let size = self.agent_classes[t].len();
        self.compose(pos, t, 0, size, &mut cnt)
    }

    fn compose(&mut self, pos: usize, t: usize, oi: usize, left: usize, cnt: &mut Vec<usize>) -> Result<Option<Matching>> {
        if oi == self.opts[t].len() {
            if left > 0 {
                return Ok(None);
            }
            return self.place(pos, t, cnt);
        }
        let opt = self.opts[t][oi];
        let last = oi + 1 == self.opts[t].len();
        let max = match opt {
            Some(c) => left.min(self.classes[c].len() - self.used[c]),
            None => left,
        };
        let min = if last { left } else { 0 };
        if min > max {
            return Ok(None);
        }
        for x in (min..=max).rev() {
            cnt[oi] = x;
            let r = self.compose(pos, t, oi + 1, left - x, cnt)?;
            cnt[oi] = 0;
            if r.is_some() {
                return Ok(r);
            }
        }
        Ok(None)
    }

    fn place(&mut self, pos: usize, t: usize, cnt: &[usize]) -> Result<Option<Matching>> {
        let agents = self.agent_classes[t].clone();
        let mut at = 0;
        for (oi, &x) in cnt.iter().enumerate() {
            for &a in &agents[at..at + x] {
                self.m.0[a] = self.opts[t][oi].map(|c| {
                    let o = self.classes[c][self.used[c]];
                    self.used[c] += 1;
                    o
                });
            }
            at += x;
        }
        for &c in &self.touches[t] {
            self.demand[c] -= agents.len();
        }
        self.assigned.extend_from_slice(&agents);
        let r = if self.locally_optimal() { self.step(pos + 1) } else { Ok(None) };
        self.assigned.truncate(self.assigned.len() - agents.len());
        for &c in &self.touches[t] {
            self.demand[c] += agents.len();
        }
        for &a in &agents {
            if let Some(o) = self.m.0[a].take() {
                let c = self.class_of(o);
                self.used[c] -= 1;
            }
        }
        r
    }

    fn class_of(&self, o: usize) -> usize {
        self.classes.iter().position(|cls| cls.contains(&o)).expect("object has a class")
    }

    fn locally_optimal(&self) -> bool {
        let mut allowed = vec![false; self.inst.n_objects()];
        for &a in &self.assigned {
            if let Some(o) = self.m.0[a] {
                allowed[o] = true;
            }
        }
        for (c, cls) in self.classes.iter().enumerate() {
            let free = cls.len() - self.used[c];
            let spare = free.saturating_sub(self.demand[c]);
            for &o in &cls[cls.len() - spare..] {
                allowed[o] = true;
            }
        }
        pareto_improvement(self.inst, &self.m, &self.assigned, &allowed).is_none()
    }
}
