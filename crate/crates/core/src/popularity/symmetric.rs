//! Exact search for a weakly popular set of `k` matchings on unconstrained
//! instances, modulo two reductions that preserve popularity:
//!
//! * agents with identical neighbourhoods and orders are interchangeable, and
//!   so are objects that every neighbour treats identically; a set is stored
//!   as, per matching, the class of object each agent receives;
//! * moving an agent to a free object class that dominates its current one
//!   (beaten by fewer outcomes, beats more) never lowers a margin, so only
//!   saturated sets are searched.
//!
//! Popularity of each candidate is decided by the polynomial verifier.

use super::verify_popular;
use crate::error::{Error, Result};
use crate::instance::{AlternativeKind, Matching, MatchingInstance, MatchingSet};

struct Search<'a> {
    inst: &'a MatchingInstance,
    k: usize,
    classes: Vec<Vec<usize>>,
    /// options per agent class: object class or None for the empty outcome (last)
    opts: Vec<Vec<Option<usize>>>,
    /// dom[t][i][j]: option i strictly dominates option j for agent class t
    dom: Vec<Vec<Vec<bool>>>,
    /// position of object class c in opts[t]
    opt_pos: Vec<Vec<Option<usize>>>,
    agent_classes: Vec<Vec<usize>>,
}

#[derive(Clone)]
struct Block {
    class: usize,
    agents: Vec<usize>,
}

pub(crate) fn object_classes(inst: &MatchingInstance) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    'next: for o in 0..inst.n_objects() {
        for cls in classes.iter_mut() {
            let r = cls[0];
            if inst.obj_adj(o) == inst.obj_adj(r)
                && inst.obj_adj(o).iter().all(|&a| inst.pref(a).interchangeable(Some(o), Some(r)))
            {
                cls.push(o);
                continue 'next;
            }
        }
        classes.push(vec![o]);
    }
    classes
}

pub(crate) fn agent_classes(inst: &MatchingInstance) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    'next: for a in 0..inst.n_agents() {
        for cls in classes.iter_mut() {
            if inst.pref(a).same_order(inst.pref(cls[0])) {
                cls.push(a);
                continue 'next;
            }
        }
        classes.push(vec![a]);
    }
    classes
}

/// Weak dominance between outcomes for one agent: beaten by a subset, beats a superset.
pub(crate) fn dominates_option(p: &crate::prefs::PreferenceRelation, x: Option<usize>, y: Option<usize>) -> bool {
    let (Some(i), Some(j)) = (p.local(x), p.local(y)) else {
        return false;
    };
    let n = p.len();
    (0..=n).all(|z| (!p.gt_local(z, i) || p.gt_local(z, j)) && (!p.gt_local(j, z) || p.gt_local(i, z)))
}

/// Finds a popular set of (at most) `k` matchings, or proves none exists.
pub fn find_popular_set_symmetric(inst: &MatchingInstance, k: usize) -> Result<Option<MatchingSet>> {
    if inst.is_constrained() || inst.alternatives() == AlternativeKind::APerfect {
        return Err(Error::Validation("symmetric search needs an unconstrained instance".into()));
    }
    if k == 0 {
        return Ok(None);
    }
    let classes = object_classes(inst);
    let mut obj_class = vec![0; inst.n_objects()];
    for (c, cls) in classes.iter().enumerate() {
        for &o in cls {
            obj_class[o] = c;
        }
    }
    let agent_cls = agent_classes(inst);
    let mut opts = Vec::new();
    let mut dom = Vec::new();
    let mut opt_pos = Vec::new();
    for cls in &agent_cls {
        let rep = cls[0];
        let mut o: Vec<Option<usize>> = Vec::new();
        for &x in inst.adj(rep) {
            let c = obj_class[x];
            if !o.contains(&Some(c)) {
                o.push(Some(c));
            }
        }
        o.push(None);
        let p = inst.pref(rep);
        let obj = |opt: Option<usize>| opt.map(|c| classes[c][0]);
        let d: Vec<Vec<bool>> = o
            .iter()
            .map(|&x| {
                o.iter()
                    .map(|&y| {
                        x != y && dominates_option(p, obj(x), obj(y)) && !dominates_option(p, obj(y), obj(x))
                    })
                    .collect()
            })
            .collect();
        let mut pos = vec![None; classes.len()];
        for (i, x) in o.iter().enumerate() {
            if let Some(c) = x {
                pos[*c] = Some(i);
            }
        }
        opts.push(o);
        dom.push(d);
        opt_pos.push(pos);
    }
    let s = Search { inst, k, classes, opts, dom, opt_pos, agent_classes: agent_cls };
    let blocks: Vec<Block> =
        s.agent_classes.iter().enumerate().map(|(t, a)| Block { class: t, agents: a.clone() }).collect();
    let mut columns: Vec<Vec<Option<usize>>> = Vec::new();
    s.column(&blocks, &mut columns)
}

impl<'a> Search<'a> {
    fn column(&self, blocks: &[Block], columns: &mut Vec<Vec<Option<usize>>>) -> Result<Option<MatchingSet>> {
        if columns.len() == self.k {
            return self.realize_and_check(columns);
        }
        let nc = self.classes.len();
        // potential[b][c]: agents in blocks b.. that could still take class c
        let mut potential = vec![vec![0usize; nc]; blocks.len() + 1];
        for b in (0..blocks.len()).rev() {
            potential[b] = potential[b + 1].clone();
            for o in self.opts[blocks[b].class].iter().flatten() {
                potential[b][*o] += blocks[b].agents.len();
            }
        }
        let mut used = vec![0usize; nc];
        let mut counts: Vec<Vec<usize>> = Vec::with_capacity(blocks.len());
        self.block(blocks, 0, &potential, &mut used, &mut counts, columns)
    }

    fn block(
        &self,
        blocks: &[Block],
        bi: usize,
        potential: &[Vec<usize>],
        used: &mut Vec<usize>,
        counts: &mut Vec<Vec<usize>>,
        columns: &mut Vec<Vec<Option<usize>>>,
    ) -> Result<Option<MatchingSet>> {
        if bi == blocks.len() {
            let mut col = vec![None; self.inst.n_agents()];
            let mut next_blocks = Vec::new();
            for (b, cnt) in blocks.iter().zip(counts.iter()) {
                let mut at = 0;
                for (oi, &x) in cnt.iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    let agents = b.agents[at..at + x].to_vec();
                    for &a in &agents {
                        col[a] = self.opts[b.class][oi];
                    }
                    next_blocks.push(Block { class: b.class, agents });
                    at += x;
                }
            }
            columns.push(col);
            let r = self.column(&next_blocks, columns)?;
            columns.pop();
            return Ok(r);
        }
        let t = blocks[bi].class;
        let size = blocks[bi].agents.len();
        let mut cnt = vec![0usize; self.opts[t].len()];
        self.compose(blocks, bi, 0, size, &mut cnt, potential, used, counts, columns)
    }

    #[allow(clippy::too_many_arguments)]
    fn compose(
        &self,
        blocks: &[Block],
        bi: usize,
        oi: usize,
        left: usize,
        cnt: &mut Vec<usize>,
        potential: &[Vec<usize>],
        used: &mut Vec<usize>,
        counts: &mut Vec<Vec<usize>>,
        columns: &mut Vec<Vec<Option<usize>>>,
    ) -> Result<Option<MatchingSet>> {
        let t = blocks[bi].class;
        let o = &self.opts[t];
        if oi == o.len() {
            if left > 0 {
                return Ok(None);
            }
            counts.push(cnt.clone());
            let r = if self.saturated_so_far(blocks, bi, potential, used, counts) {
                self.block(blocks, bi + 1, potential, used, counts, columns)?
            } else {
                None
            };
            counts.pop();
            return Ok(r);
        }
        let max = match o[oi] {
            Some(c) => left.min(self.classes[c].len() - used[c]),
            None => left,
        };
        // the empty outcome is last and absorbs the remainder
        let min = if o[oi].is_none() { left } else { 0 };
        if min > max {
            return Ok(None);
        }
        for x in (min..=max).rev() {
            cnt[oi] = x;
            if let Some(c) = o[oi] {
                used[c] += x;
            }
            let r = self.compose(blocks, bi, oi + 1, left - x, cnt, potential, used, counts, columns);
            if let Some(c) = o[oi] {
                used[c] -= x;
            }
            cnt[oi] = 0;
            if let Some(found) = r? {
                return Ok(Some(found));
            }
        }
        Ok(None)
    }

    /// False if some class is certain to stay partly free while an agent
    /// already placed holds an option it dominates.
    fn saturated_so_far(
        &self,
        blocks: &[Block],
        bi: usize,
        potential: &[Vec<usize>],
        used: &[usize],
        counts: &[Vec<usize>],
    ) -> bool {
        for c in 0..self.classes.len() {
            if used[c] + potential[bi + 1][c] >= self.classes[c].len() {
                continue;
            }
            for (b, cnt) in blocks[..=bi].iter().zip(counts) {
                let t = b.class;
                let Some(ci) = self.opt_pos[t][c] else { continue };
                if cnt.iter().enumerate().any(|(j, &x)| x > 0 && self.dom[t][ci][j]) {
                    return false;
                }
            }
        }
        true
    }

    fn realize_and_check(&self, columns: &[Vec<Option<usize>>]) -> Result<Option<MatchingSet>> {
        let mut set: MatchingSet = Vec::with_capacity(columns.len());
        for col in columns {
            let mut next = vec![0usize; self.classes.len()];
            let mut m = Matching::empty(self.inst.n_agents());
            for a in 0..self.inst.n_agents() {
                if let Some(c) = col[a] {
                    m.0[a] = Some(self.classes[c][next[c]]);
                    next[c] += 1;
                }
            }
            if !set.contains(&m) {
                set.push(m);
            }
        }
        Ok(if verify_popular(self.inst, &set)?.is_popular() { Some(set) } else { None })
    }
}
