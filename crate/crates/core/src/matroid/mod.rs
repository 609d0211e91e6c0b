//! Matroid independence oracles and the algorithms built on them.

mod ops;
mod spec;

pub use ops::{
    augment_with_nulls, bijective_exchange, fundamental_circuit, is_basis,
    max_weight_common_independent, union_is_independent, NULL_PREFIX,
};
pub use spec::{compile_spec, spec_ground, MatroidSpec};

use std::sync::atomic::{AtomicU64, Ordering};

/// Independence structure over local elements `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Matroid {
    Free,
    Uniform(usize),
    /// Elements without a part are unconstrained.
    Partition { part_of: Vec<Option<usize>>, caps: Vec<usize> },
    /// Element `e` is the edge `ends[e]`; `None` marks an unconstrained element.
    Graphic { nodes: usize, ends: Vec<Option<(usize, usize)>> },
    /// `owner[e] = (part, local index)`; `None` marks an unconstrained element.
    DirectSum { owner: Vec<Option<(usize, usize)>>, parts: Vec<Matroid> },
    Truncation { inner: Box<Matroid>, bound: usize },
    Union { left: Box<Matroid>, right: Box<Matroid> },
    /// Element `e` behaves as `map[e]` of `inner`; elements sharing an image are parallel.
    Mapped { inner: Box<Matroid>, map: Vec<usize> },
}

impl Matroid {
    pub fn is_independent(&self, set: &[usize]) -> bool {
        match self {
            Matroid::Free => true,
            Matroid::Uniform(r) => set.len() <= *r,
            Matroid::Partition { part_of, caps } => {
                let mut used = vec![0usize; caps.len()];
                for &e in set {
                    if let Some(Some(p)) = part_of.get(e) {
                        used[*p] += 1;
                        if used[*p] > caps[*p] {
                            return false;
                        }
                    }
                }
                true
            }
            Matroid::Graphic { nodes, ends } => {
                let mut uf = UnionFind::new(*nodes);
                for &e in set {
                    if let Some(Some((u, v))) = ends.get(e) {
                        if !uf.union(*u, *v) {
                            return false;
                        }
                    }
                }
                true
            }
            Matroid::DirectSum { owner, parts } => {
                let mut split: Vec<Vec<usize>> = vec![Vec::new(); parts.len()];
                for &e in set {
                    if let Some(Some((p, l))) = owner.get(e) {
                        split[*p].push(*l);
                    }
                }
                parts.iter().zip(&split).all(|(m, s)| m.is_independent(s))
            }
            Matroid::Truncation { inner, bound } => set.len() <= *bound && inner.is_independent(set),
            Matroid::Union { left, right } => union_partition(left, right, set).is_some(),
            Matroid::Mapped { inner, map } => {
                let mut img: Vec<usize> = set.iter().map(|&e| map[e]).collect();
                img.sort_unstable();
                let n = img.len();
                img.dedup();
                img.len() == n && inner.is_independent(&img)
            }
        }
    }
}

/// Splits `set` into one independent set of each matroid, if possible.
pub(crate) fn union_partition(m1: &Matroid, m2: &Matroid, set: &[usize]) -> Option<(Vec<usize>, Vec<usize>)> {
    union_partition_with(|p, s| if p == 0 { m1.is_independent(s) } else { m2.is_independent(s) }, set)
}

/// Matroid partition by shortest augmenting paths; `indep(p, s)` tests part `p`.
pub(crate) fn union_partition_with(
    indep: impl Fn(usize, &[usize]) -> bool,
    set: &[usize],
) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut parts: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    // which part currently holds an element
    let mut holder: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    for &x in set {
        if holder.contains_key(&x) {
            continue;
        }
        // BFS over elements to insert; prev[y] = (element it came from, part it displaces y from)
        let mut prev: std::collections::HashMap<usize, (usize, usize)> = std::collections::HashMap::new();
        let mut queue = std::collections::VecDeque::from([x]);
        let mut seen = std::collections::HashSet::from([x]);
        let mut sink: Option<(usize, usize)> = None;
        'bfs: while let Some(y) = queue.pop_front() {
            for p in 0..2 {
                if holder.get(&y) == Some(&p) {
                    continue;
                }
                let mut with = parts[p].clone();
                with.push(y);
                if indep(p, &with) {
                    sink = Some((y, p));
                    break 'bfs;
                }
                for (i, &z) in parts[p].iter().enumerate() {
                    if seen.contains(&z) {
                        continue;
                    }
                    let mut swapped = with.clone();
                    swapped.swap_remove(i);
                    if indep(p, &swapped) {
                        seen.insert(z);
                        prev.insert(z, (y, p));
                        queue.push_back(z);
                    }
                }
            }
        }
        let (mut y, p) = sink?;
        parts[p].push(y);
        holder.insert(y, p);
        while let Some(&(from, q)) = prev.get(&y) {
            // `from` takes the slot y vacated in part q
            let pos = parts[q].iter().position(|&e| e == y).expect("element in part");
            parts[q][pos] = from;
            holder.insert(from, q);
            y = from;
        }
    }
    Some((parts[0].clone(), parts[1].clone()))
}

/// A matroid over ground `0..ground` with a query counter.
#[derive(Debug)]
pub struct MatroidOracle {
    ground: usize,
    matroid: Matroid,
    calls: AtomicU64,
}

impl Clone for MatroidOracle {
    fn clone(&self) -> Self {
        MatroidOracle { ground: self.ground, matroid: self.matroid.clone(), calls: AtomicU64::new(0) }
    }
}

impl MatroidOracle {
    pub fn new(ground: usize, matroid: Matroid) -> Self {
        MatroidOracle { ground, matroid, calls: AtomicU64::new(0) }
    }

    pub fn free(ground: usize) -> Self {
        Self::new(ground, Matroid::Free)
    }

    pub fn ground_size(&self) -> usize {
        self.ground
    }

    pub fn matroid(&self) -> &Matroid {
        &self.matroid
    }

    /// Sets containing repeated or out-of-range elements are dependent.
    pub fn is_independent(&self, set: &[usize]) -> bool {
        self.calls.fetch_add(1, Ordering::Relaxed);
        let mut s = set.to_vec();
        s.sort_unstable();
        let n = s.len();
        s.dedup();
        if s.len() != n || s.last().is_some_and(|&e| e >= self.ground) {
            return false;
        }
        self.matroid.is_independent(&s)
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    /// Greedy rank of a subset.
    pub fn rank(&self, set: &[usize]) -> usize {
        self.greedy_basis(set).len()
    }

    pub fn greedy_basis(&self, set: &[usize]) -> Vec<usize> {
        let mut b = Vec::new();
        for &e in set {
            if b.contains(&e) {
                continue;
            }
            b.push(e);
            if !self.is_independent(&b) {
                b.pop();
            }
        }
        b
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// False when `a` and `b` were already connected.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}
