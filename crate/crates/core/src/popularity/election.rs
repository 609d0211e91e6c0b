//! Exhaustive engine over an explicit list of alternatives, shared by the
//! matching and arborescence oracles. An alternative is an agent-indexed
//! outcome vector; outcomes are compared by each agent's preference relation.

use std::collections::HashMap;

use crate::prefs::PreferenceRelation;

/// Pairwise counts between a set and a competitor.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Tally {
    /// Agents with some member strictly better than the competitor.
    pub for_set: usize,
    /// Agents with the competitor strictly better than every member.
    pub against_set: usize,
    pub margin: i64,
    pub prefers_set: Vec<usize>,
    pub prefers_competitor: Vec<usize>,
}

/// Compares outcome vectors agent by agent.
pub fn tally_outcomes(prefs: &[PreferenceRelation], set: &[&[Option<usize>]], n: &[Option<usize>]) -> Tally {
    let mut t = Tally::default();
    for (a, p) in prefs.iter().enumerate() {
        if set.iter().any(|m| p.prefers(m[a], n[a])) {
            t.prefers_set.push(a);
        } else if set.iter().all(|m| p.prefers(n[a], m[a])) {
            t.prefers_competitor.push(a);
        }
    }
    t.for_set = t.prefers_set.len();
    t.against_set = t.prefers_competitor.len();
    t.margin = t.for_set as i64 - t.against_set as i64;
    t
}

/// Candidate set dominance: no larger than the incumbent, nobody worse off,
/// somebody strictly better off.
pub fn dominates_outcomes(prefs: &[PreferenceRelation], cand: &[&[Option<usize>]], inc: &[&[Option<usize>]]) -> bool {
    if cand.len() > inc.len() || cand.is_empty() {
        return false;
    }
    let mut strict = false;
    for (a, p) in prefs.iter().enumerate() {
        let ok = cand.iter().any(|y| inc.iter().all(|z| !p.prefers(z[a], y[a])));
        if !ok {
            return false;
        }
        if !strict && cand.iter().any(|y| inc.iter().all(|z| p.prefers(y[a], z[a]))) {
            strict = true;
        }
    }
    strict
}

pub struct Election<'a> {
    prefs: &'a [PreferenceRelation],
    outcomes: Vec<Vec<u16>>,
    source: Vec<usize>,
    offsets: Vec<usize>,
}

type Mask = u128;

impl<'a> Election<'a> {
    /// Alternatives must only use adjacent objects. With `merge_equivalent`,
    /// outcomes an agent cannot tell apart are identified and duplicates dropped.
    pub fn new(prefs: &'a [PreferenceRelation], alts: &[Vec<Option<usize>>], merge_equivalent: bool) -> Self {
        let canon: Vec<Vec<u16>> = prefs
            .iter()
            .map(|p| {
                let n = p.len();
                (0..=n)
                    .map(|i| {
                        if !merge_equivalent || i == n {
                            return i as u16;
                        }
                        let oi = Some(p.adjacent()[i]);
                        (0..i).find(|&j| p.interchangeable(oi, Some(p.adjacent()[j]))).unwrap_or(i) as u16
                    })
                    .collect()
            })
            .collect();
        let mut seen: HashMap<Vec<u16>, ()> = HashMap::new();
        let mut outcomes = Vec::with_capacity(alts.len());
        let mut source = Vec::with_capacity(alts.len());
        for (idx, alt) in alts.iter().enumerate() {
            let v: Vec<u16> = alt
                .iter()
                .enumerate()
                .map(|(a, o)| {
                    let l = prefs[a].local(*o).expect("alternative uses a non-adjacent object");
                    canon[a][l]
                })
                .collect();
            if merge_equivalent
                && seen.insert(v.clone(), ()).is_some() {
                    continue;
                }
            outcomes.push(v);
            source.push(idx);
        }
        let mut offsets = Vec::with_capacity(prefs.len() + 1);
        let mut acc = 0;
        for p in prefs {
            offsets.push(acc);
            acc += p.len() + 1;
        }
        offsets.push(acc);
        Election { prefs, outcomes, source, offsets }
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn n_agents(&self) -> usize {
        self.prefs.len()
    }

    /// Index into the input list of the alternative kept as entry `i`.
    pub fn source(&self, i: usize) -> usize {
        self.source[i]
    }

    #[inline]
    fn gt(&self, a: usize, x: u16, y: u16) -> bool {
        self.prefs[a].gt_local(x as usize, y as usize)
    }

    /// Per agent and outcome: +1 if some member beats it, -1 if it beats all members.
    fn votes(&self, set: &[usize]) -> Vec<i8> {
        let mut v = vec![0i8; *self.offsets.last().unwrap()];
        for (a, p) in self.prefs.iter().enumerate() {
            for x in 0..=p.len() as u16 {
                let slot = &mut v[self.offsets[a] + x as usize];
                if set.iter().any(|&m| self.gt(a, self.outcomes[m][a], x)) {
                    *slot = 1;
                } else if set.iter().all(|&m| self.gt(a, x, self.outcomes[m][a])) {
                    *slot = -1;
                }
            }
        }
        v
    }

    #[inline]
    fn margin_with(&self, votes: &[i8], alt: usize) -> i64 {
        self.outcomes[alt].iter().enumerate().map(|(a, &x)| votes[self.offsets[a] + x as usize] as i64).sum()
    }

    pub fn margin(&self, set: &[usize], alt: usize) -> i64 {
        self.margin_with(&self.votes(set), alt)
    }

    /// Lowest-index alternative with margin < 0 (weak) or, in strict mode,
    /// margin <= 0 among alternatives outside the set.
    pub fn first_beating(&self, set: &[usize], strict: bool) -> Option<usize> {
        let votes = self.votes(set);
        (0..self.len()).find(|&i| {
            let m = self.margin_with(&votes, i);
            if strict {
                m <= 0 && !set.iter().any(|&s| self.outcomes[s] == self.outcomes[i])
            } else {
                m < 0
            }
        })
    }

    /// Smallest popular set of size at most `max_k`, lowest indices first.
    pub fn min_popular_set(&self, max_k: usize, strict: bool) -> Option<Vec<usize>> {
        let mut killers: Vec<usize> = Vec::new();
        for k in 1..=max_k.min(self.len()) {
            let mut combo: Vec<usize> = (0..k).collect();
            loop {
                if self.survives(&combo, strict, &mut killers) {
                    return Some(combo);
                }
                if !next_combination(&mut combo, self.len()) {
                    break;
                }
            }
        }
        None
    }

    fn survives(&self, set: &[usize], strict: bool, killers: &mut Vec<usize>) -> bool {
        let votes = self.votes(set);
        let kills = |i: usize| {
            let m = self.margin_with(&votes, i);
            if strict {
                m <= 0 && !set.iter().any(|&s| self.outcomes[s] == self.outcomes[i])
            } else {
                m < 0
            }
        };
        if let Some(pos) = killers.iter().position(|&i| kills(i)) {
            let k = killers.remove(pos);
            killers.insert(0, k);
            return false;
        }
        match (0..self.len()).find(|&i| kills(i)) {
            Some(i) => {
                killers.insert(0, i);
                killers.truncate(64);
                false
            }
            None => true,
        }
    }

    fn masks(&self, inc: &[usize]) -> Vec<(Mask, Mask)> {
        let mut out: Vec<(Mask, Mask)> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for i in 0..self.len() {
            let mut nw: Mask = 0;
            let mut sb: Mask = 0;
            for a in 0..self.n_agents() {
                let y = self.outcomes[i][a];
                if inc.iter().all(|&z| !self.gt(a, self.outcomes[z][a], y)) {
                    nw |= 1 << a;
                    if inc.iter().all(|&z| self.gt(a, y, self.outcomes[z][a])) {
                        sb |= 1 << a;
                    }
                }
            }
            if seen.insert((nw, sb)) {
                out.push((nw, sb));
            }
        }
        out
    }

    /// Whether some set of at most `inc.len()` alternatives dominates `inc`.
    pub fn is_dominated(&self, inc: &[usize]) -> bool {
        assert!(self.n_agents() <= 128, "mask engine supports at most 128 agents");
        let all: Mask = if self.n_agents() == 128 { Mask::MAX } else { (1 << self.n_agents()) - 1 };
        let masks = self.masks(inc);
        covers(&masks, all, inc.len(), 0, 0, false)
    }

    /// Every non-dominated set of exactly `size` distinct alternatives.
    pub fn pareto_sets(&self, size: usize, limit: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        if size == 0 || size > self.len() {
            return out;
        }
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            if !self.is_dominated(&combo) {
                out.push(combo.clone());
                if out.len() >= limit {
                    break;
                }
            }
            if !next_combination(&mut combo, self.len()) {
                break;
            }
        }
        out
    }
}

/// Can at most `left` more masks be chosen from `masks[from..]` so that the
/// union of not-worse parts covers `all` with some strict improvement?
fn covers(masks: &[(Mask, Mask)], all: Mask, left: usize, acc: Mask, from: usize, strict: bool) -> bool {
    if acc == all && strict {
        return true;
    }
    if left == 0 {
        return false;
    }
    for i in from..masks.len() {
        let (nw, sb) = masks[i];
        let new_acc = acc | nw;
        if new_acc == acc && (strict || sb == 0) {
            continue;
        }
        if covers(masks, all, left - 1, new_acc, i + 1, strict || sb != 0) {
            return true;
        }
    }
    false
}

/// Advances to the next `k`-combination of `0..n` in lexicographic order.
pub fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
