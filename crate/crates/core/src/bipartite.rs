//! Bipartite matching primitives shared by solvers and verifiers.

/// Maximum matching where right node `v` accepts up to `cap[v]` left nodes.
/// Returns the right partner of every left node.
pub fn capacitated_matching(adj: &[Vec<usize>], cap: &[usize]) -> Vec<Option<usize>> {
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); cap.len()];
    let mut partner = vec![None; adj.len()];
    for u in 0..adj.len() {
        let mut seen = vec![false; cap.len()];
        augment_capacitated(u, adj, cap, &mut holders, &mut partner, &mut seen);
    }
    partner
}

fn augment_capacitated(
    u: usize,
    adj: &[Vec<usize>],
    cap: &[usize],
    holders: &mut [Vec<usize>],
    partner: &mut [Option<usize>],
    seen: &mut [bool],
) -> bool {
    for &v in &adj[u] {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        if holders[v].len() < cap[v] {
            holders[v].push(u);
            partner[u] = Some(v);
            return true;
        }
        for i in 0..holders[v].len() {
            let w = holders[v][i];
            if augment_capacitated(w, adj, cap, holders, partner, seen) {
                holders[v][i] = u;
                partner[u] = Some(v);
                return true;
            }
        }
    }
    false
}

/// Left nodes reachable by alternating paths from the unmatched left nodes.
pub fn alternating_reach(adj: &[Vec<usize>], partner: &[Option<usize>], n_right: usize) -> Vec<usize> {
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n_right];
    for (u, p) in partner.iter().enumerate() {
        if let Some(v) = p {
            holders[*v].push(u);
        }
    }
    let mut reached = vec![false; adj.len()];
    let mut stack: Vec<usize> = (0..adj.len()).filter(|&u| partner[u].is_none()).collect();
    for &u in &stack {
        reached[u] = true;
    }
    let mut right_seen = vec![false; n_right];
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if right_seen[v] {
                continue;
            }
            right_seen[v] = true;
            for &w in &holders[v] {
                if !reached[w] {
                    reached[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    (0..adj.len()).filter(|&u| reached[u]).collect()
}

/// Tries to cover left node `start` by an augmenting path relative to `partner`,
/// keeping every currently matched left node matched. `owner[v]` is the left
/// node holding right node `v`.
pub fn augment_from(
    start: usize,
    adj: &[Vec<usize>],
    partner: &mut [Option<usize>],
    owner: &mut [Option<usize>],
) -> bool {
    let mut seen = vec![false; owner.len()];
    augment_dfs(start, adj, partner, owner, &mut seen)
}

fn augment_dfs(
    u: usize,
    adj: &[Vec<usize>],
    partner: &mut [Option<usize>],
    owner: &mut [Option<usize>],
    seen: &mut [bool],
) -> bool {
    for &v in &adj[u] {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        let ok = match owner[v] {
            None => true,
            Some(w) => augment_dfs(w, adj, partner, owner, seen),
        };
        if ok {
            owner[v] = Some(u);
            partner[u] = Some(v);
            return true;
        }
    }
    false
}

/// Minimum-cost assignment of every row to a distinct column (`rows <= cols`).
/// Forbidden cells should carry a large cost.
pub fn hungarian(cost: &[Vec<i64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    let m = cost[0].len();
    assert!(n <= m, "more rows than columns");
    const INF: i64 = i64::MAX / 4;
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![INF; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = INF;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut ans = vec![0usize; n];
    for j in 1..=m {
        if p[j] != 0 {
            ans[p[j] - 1] = j - 1;
        }
    }
    ans
}

/// Splits the edges of a bipartite multigraph with maximum degree `k` into `k`
/// matchings. The graph is padded to a `k`-regular multigraph and perfect
/// matchings are peeled off one at a time, each covering every node of
/// maximum degree in the original graph.
pub fn regular_decomposition(n_left: usize, n_right: usize, edges: &[(usize, usize)], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return Vec::new();
    }
    let n = n_left.max(n_right);
    let mut all: Vec<(usize, usize)> = edges.to_vec();
    let mut dl = vec![0usize; n];
    let mut dr = vec![0usize; n];
    for &(a, b) in edges {
        dl[a] += 1;
        dr[b] += 1;
    }
    let mut j = 0;
    for i in 0..n {
        while dl[i] < k {
            while dr[j] >= k {
                j += 1;
            }
            all.push((i, j));
            dl[i] += 1;
            dr[j] += 1;
        }
    }
    let mut alive = vec![true; all.len()];
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let mut inc: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (e, &(a, _)) in all.iter().enumerate() {
            if alive[e] {
                inc[a].push(e);
            }
        }
        let mut owner: Vec<Option<usize>> = vec![None; n];
        let mut via: Vec<Option<usize>> = vec![None; n];
        for a in 0..n {
            let mut seen = vec![false; n];
            let found = perfect_dfs(a, &all, &inc, &mut owner, &mut via, &mut seen);
            debug_assert!(found, "regular bipartite multigraph has a perfect matching");
        }
        let mut cls = Vec::new();
        for b in 0..n {
            if let Some(e) = via[b] {
                alive[e] = false;
                if e < edges.len() {
                    cls.push(e);
                }
            }
        }
        cls.sort_unstable();
        out.push(cls);
    }
    out
}

fn perfect_dfs(
    a: usize,
    all: &[(usize, usize)],
    inc: &[Vec<usize>],
    owner: &mut [Option<usize>],
    via: &mut [Option<usize>],
    seen: &mut [bool],
) -> bool {
    for &e in &inc[a] {
        let b = all[e].1;
        if seen[b] {
            continue;
        }
        seen[b] = true;
        let ok = match owner[b] {
            None => true,
            Some(w) => perfect_dfs(w, all, inc, owner, via, seen),
        };
        if ok {
            owner[b] = Some(a);
            via[b] = Some(e);
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hungarian_small() {
        let cost = vec![vec![4, 1, 3], vec![2, 0, 5], vec![3, 2, 2]];
        let a = hungarian(&cost);
        let total: i64 = a.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
        assert_eq!(total, 5);
    }

    #[test]
    fn capacitated_and_reach() {
        let adj = vec![vec![0], vec![0], vec![0], vec![1]];
        let p = capacitated_matching(&adj, &[2, 1]);
        assert_eq!(p.iter().filter(|x| x.is_some()).count(), 3);
        let x = alternating_reach(&adj, &p, 2);
        assert_eq!(x, vec![0, 1, 2]);
    }

    #[test]
    fn decomposition_covers_edges() {
        let edges = vec![(0, 0), (0, 1), (1, 0), (2, 1), (2, 2), (1, 2)];
        let cls = regular_decomposition(3, 3, &edges, 2);
        let mut all: Vec<usize> = cls.concat();
        all.sort_unstable();
        assert_eq!(all, (0..6).collect::<Vec<_>>());
        for c in &cls {
            let mut l: Vec<usize> = c.iter().map(|&e| edges[e].0).collect();
            let mut r: Vec<usize> = c.iter().map(|&e| edges[e].1).collect();
            l.sort_unstable();
            l.dedup();
            r.sort_unstable();
            r.dedup();
            assert_eq!(l.len(), c.len());
            assert_eq!(r.len(), c.len());
        }
    }

    #[test]
    fn augment_keeps_matched() {
        let adj = vec![vec![0, 1], vec![0]];
        let mut partner = vec![None, Some(0)];
        let mut owner = vec![Some(1), None];
        assert!(augment_from(0, &adj, &mut partner, &mut owner));
        assert_eq!(partner, vec![Some(1), Some(0)]);
    }
}
