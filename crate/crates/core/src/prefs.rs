//! Per-agent preference relations over adjacent objects.
//!
//! Objects are identified by global indices. The empty outcome (`None`) is
//! strictly worse than every adjacent object.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Better,
    Worse,
    Indifferent,
}

/// Ordered from most to least restrictive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PreferenceClass {
    Strict,
    Weak,
    Partial,
}

impl PreferenceClass {
    pub fn name(self) -> &'static str {
        match self {
            PreferenceClass::Strict => "strict",
            PreferenceClass::Weak => "weak",
            PreferenceClass::Partial => "partial",
        }
    }
}

/// A strict partial order over the objects adjacent to one agent, stored
/// transitively closed as a dense matrix over local positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferenceRelation {
    agent: usize,
    adjacent: Vec<usize>,
    gt: Vec<bool>,
}

impl PreferenceRelation {
    /// Builds the closure of `pairs`, each read as (better, worse).
    pub fn build(
        agent: usize,
        adjacent: impl IntoIterator<Item = usize>,
        pairs: &[(usize, usize)],
    ) -> Result<Self> {
        let mut adjacent: Vec<usize> = adjacent.into_iter().collect();
        adjacent.sort_unstable();
        adjacent.dedup();
        let n = adjacent.len();
        let mut gt = vec![false; n * n];
        for &(x, y) in pairs {
            let i = adjacent
                .binary_search(&x)
                .map_err(|_| Error::UnknownObject(format!("object {x} not adjacent to agent {agent}")))?;
            let j = adjacent
                .binary_search(&y)
                .map_err(|_| Error::UnknownObject(format!("object {y} not adjacent to agent {agent}")))?;
            gt[i * n + j] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if !gt[i * n + k] {
                    continue;
                }
                for j in 0..n {
                    if gt[k * n + j] {
                        gt[i * n + j] = true;
                    }
                }
            }
        }
        if let Some(i) = (0..n).find(|&i| gt[i * n + i]) {
            return Err(Error::Cycle {
                agent: agent.to_string(),
                detail: format!("object {} lies on a cycle", adjacent[i]),
            });
        }
        Ok(PreferenceRelation { agent, adjacent, gt })
    }

    /// A strict ranking, best first.
    pub fn from_ranking(agent: usize, ranking: &[usize]) -> Result<Self> {
        let pairs: Vec<(usize, usize)> = ranking.windows(2).map(|w| (w[0], w[1])).collect();
        Self::build(agent, ranking.iter().copied(), &pairs)
    }

    /// A weak ranking given as tiers, best tier first.
    pub fn from_tiers(agent: usize, tiers: &[Vec<usize>]) -> Result<Self> {
        let mut pairs = Vec::new();
        for w in tiers.windows(2) {
            for &x in &w[0] {
                for &y in &w[1] {
                    pairs.push((x, y));
                }
            }
        }
        Self::build(agent, tiers.iter().flatten().copied(), &pairs)
    }

    pub fn agent(&self) -> usize {
        self.agent
    }

    pub fn adjacent(&self) -> &[usize] {
        &self.adjacent
    }

    pub fn len(&self) -> usize {
        self.adjacent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacent.is_empty()
    }

    pub fn is_adjacent(&self, o: usize) -> bool {
        self.adjacent.binary_search(&o).is_ok()
    }

    /// Local position of an object; `None` maps to `len()`.
    pub fn local(&self, o: Option<usize>) -> Option<usize> {
        match o {
            None => Some(self.adjacent.len()),
            Some(o) => self.adjacent.binary_search(&o).ok(),
        }
    }

    /// Strict preference between local positions, `len()` being the empty outcome.
    #[inline]
    pub fn gt_local(&self, i: usize, j: usize) -> bool {
        let n = self.adjacent.len();
        if i >= n {
            false
        } else if j >= n {
            true
        } else {
            self.gt[i * n + j]
        }
    }

    /// `x` strictly preferred to `y`. Non-adjacent objects compare as unknown (false).
    #[inline]
    pub fn prefers(&self, x: Option<usize>, y: Option<usize>) -> bool {
        match (self.local(x), self.local(y)) {
            (Some(i), Some(j)) => self.gt_local(i, j),
            _ => false,
        }
    }

    pub fn compare(&self, x: Option<usize>, y: Option<usize>) -> Result<Comparison> {
        let i = self
            .local(x)
            .ok_or_else(|| Error::UnknownObject(format!("{x:?} not adjacent to agent {}", self.agent)))?;
        let j = self
            .local(y)
            .ok_or_else(|| Error::UnknownObject(format!("{y:?} not adjacent to agent {}", self.agent)))?;
        Ok(if self.gt_local(i, j) {
            Comparison::Better
        } else if self.gt_local(j, i) {
            Comparison::Worse
        } else {
            Comparison::Indifferent
        })
    }

    /// All closed (better, worse) pairs between objects.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.adjacent.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.gt[i * n + j] {
                    out.push((self.adjacent[i], self.adjacent[j]));
                }
            }
        }
        out
    }

    /// Covering pairs only (the Hasse diagram).
    pub fn cover_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.adjacent.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.gt[i * n + j] && !(0..n).any(|k| self.gt[i * n + k] && self.gt[k * n + j]) {
                    out.push((self.adjacent[i], self.adjacent[j]));
                }
            }
        }
        out
    }

    pub fn classify(&self) -> PreferenceClass {
        let n = self.adjacent.len();
        let inc = |i: usize, j: usize| i != j && !self.gt[i * n + j] && !self.gt[j * n + i];
        let any_inc = (0..n).any(|i| (0..n).any(|j| inc(i, j)));
        if !any_inc {
            return PreferenceClass::Strict;
        }
        for i in 0..n {
            for j in 0..n {
                if !inc(i, j) {
                    continue;
                }
                for k in 0..n {
                    if k != i && inc(j, k) && !inc(i, k) {
                        return PreferenceClass::Partial;
                    }
                }
            }
        }
        PreferenceClass::Weak
    }

    /// Members of `pool` (adjacent objects) not strictly beaten inside `pool`.
    pub fn maximal_elements(&self, pool: &[usize]) -> Vec<usize> {
        pool.iter()
            .copied()
            .filter(|&x| !pool.iter().any(|&y| self.prefers(Some(y), Some(x))))
            .collect()
    }

    /// Number of adjacent objects strictly better than `o`.
    pub fn count_better(&self, o: Option<usize>) -> usize {
        match self.local(o) {
            None => 0,
            Some(i) => (0..self.adjacent.len()).filter(|&k| self.gt_local(k, i)).count(),
        }
    }

    /// `ground_size` minus the number of objects strictly better than `o`.
    /// Only meaningful for weak rankings.
    pub fn rank_weight(&self, o: usize, ground_size: usize) -> Result<i64> {
        if self.classify() == PreferenceClass::Partial {
            return Err(Error::NotWeakRanking(format!("agent {}", self.agent)));
        }
        if !self.is_adjacent(o) {
            return Err(Error::UnknownObject(format!("{o} not adjacent to agent {}", self.agent)));
        }
        Ok(ground_size as i64 - self.count_better(Some(o)) as i64)
    }

    /// Tiers of a weak ranking, best first.
    pub fn tiers(&self) -> Result<Vec<Vec<usize>>> {
        if self.classify() == PreferenceClass::Partial {
            return Err(Error::NotWeakRanking(format!("agent {}", self.agent)));
        }
        let mut by_rank: Vec<(usize, usize)> =
            self.adjacent.iter().map(|&o| (self.count_better(Some(o)), o)).collect();
        by_rank.sort_unstable();
        let mut tiers: Vec<Vec<usize>> = Vec::new();
        let mut last = usize::MAX;
        for (r, o) in by_rank {
            if r != last {
                tiers.push(Vec::new());
                last = r;
            }
            tiers.last_mut().unwrap().push(o);
        }
        Ok(tiers)
    }

    /// `x` and `y` are interchangeable: incomparable and related identically to everything else.
    pub fn interchangeable(&self, x: Option<usize>, y: Option<usize>) -> bool {
        let (Some(i), Some(j)) = (self.local(x), self.local(y)) else {
            return false;
        };
        if i == j {
            return true;
        }
        if self.gt_local(i, j) || self.gt_local(j, i) {
            return false;
        }
        (0..=self.adjacent.len())
            .filter(|&k| k != i && k != j)
            .all(|k| self.gt_local(i, k) == self.gt_local(j, k) && self.gt_local(k, i) == self.gt_local(k, j))
    }

    /// Same order up to agent identity.
    pub fn same_order(&self, other: &PreferenceRelation) -> bool {
        self.adjacent == other.adjacent && self.gt == other.gt
    }
}
