//! Polynomial routines checked against exhaustive search on small inputs.

use condorcet::bipartite::hungarian;
use condorcet::generators::{gen_random, MatroidKind, PrefModel};
use condorcet::instance::{decompose_k_matching, instance_to_json, parse_instance};
use condorcet::matroid::{
    bijective_exchange, is_basis, max_weight_common_independent, union_is_independent, Matroid, MatroidOracle,
};
use condorcet::popularity::election::Election;
use condorcet::popularity::{
    dominates, enumerate_alternatives, exhaustive_counterexample, exists_pareto_optimal_matching,
    find_popular_set_symmetric, tally, verify_pareto_optimal, verify_popular,
};
use condorcet::{KMatching, Matching};
use proptest::prelude::*;

const CAP: usize = 24;

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << n).map(move |mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect())
}

fn leaf(n: usize) -> BoxedStrategy<Matroid> {
    prop_oneof![
        Just(Matroid::Free),
        (0..=n).prop_map(Matroid::Uniform),
        (1usize..=3).prop_flat_map(move |k| {
            (proptest::collection::vec(proptest::option::weighted(0.8, 0..k), n), proptest::collection::vec(0usize..=2, k))
                .prop_map(|(part_of, caps)| Matroid::Partition { part_of, caps })
        }),
        (2usize..=4).prop_flat_map(move |nodes| {
            proptest::collection::vec(proptest::option::weighted(0.9, (0..nodes, 0..nodes)), n)
                .prop_map(move |ends| Matroid::Graphic { nodes, ends })
        }),
    ]
    .boxed()
}

fn matroid(n: usize) -> BoxedStrategy<Matroid> {
    prop_oneof![
        3 => leaf(n),
        1 => (leaf(n), 0..=n).prop_map(|(m, bound)| Matroid::Truncation { inner: Box::new(m), bound }),
        1 => (leaf(n), leaf(n)).prop_map(|(l, r)| Matroid::Union { left: Box::new(l), right: Box::new(r) }),
        1 => (leaf(n), proptest::collection::vec(0..n, n)).prop_map(|(m, map)| Matroid::Mapped { inner: Box::new(m), map }),
    ]
    .boxed()
}

fn sized_matroid() -> impl Strategy<Value = (usize, Matroid)> {
    (1usize..=6).prop_flat_map(|n| (Just(n), matroid(n)))
}

fn bases(o: &MatroidOracle) -> Vec<Vec<usize>> {
    let all: Vec<usize> = (0..o.ground_size()).collect();
    let r = o.rank(&all);
    subsets(o.ground_size()).filter(|s| s.len() == r && o.is_independent(s)).collect()
}

fn model() -> impl Strategy<Value = PrefModel> {
    prop_oneof![Just(PrefModel::Strict), Just(PrefModel::Weak), Just(PrefModel::Partial)]
}

fn kind() -> impl Strategy<Value = MatroidKind> {
    prop_oneof![Just(MatroidKind::None), Just(MatroidKind::Uniform), Just(MatroidKind::Partition), Just(MatroidKind::Graphic)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matroid_axioms((n, m) in sized_matroid()) {
        let o = MatroidOracle::new(n, m);
        prop_assert!(o.is_independent(&[]));
        let indep: Vec<Vec<usize>> = subsets(n).filter(|s| o.is_independent(s)).collect();
        for s in &indep {
            for skip in 0..s.len() {
                let mut t = s.clone();
                t.remove(skip);
                prop_assert!(o.is_independent(&t), "not hereditary: {s:?} vs {t:?}");
            }
        }
        for small in &indep {
            for big in indep.iter().filter(|b| b.len() > small.len()) {
                let grows = big.iter().filter(|e| !small.contains(e)).any(|&e| {
                    let mut t = small.clone();
                    t.push(e);
                    t.sort_unstable();
                    o.is_independent(&t)
                });
                prop_assert!(grows, "no augmentation of {small:?} from {big:?}");
            }
        }
        let rank = indep.iter().map(Vec::len).max().unwrap();
        let all: Vec<usize> = (0..n).collect();
        prop_assert_eq!(o.rank(&all), rank);
        prop_assert!(o.is_independent(&o.greedy_basis(&all)));
    }

    #[test]
    fn intersection_is_maximum(
        (n, a, b) in (1usize..=6).prop_flat_map(|n| (Just(n), matroid(n), matroid(n))),
        weights in proptest::collection::vec(0i64..10, 6),
    ) {
        let (m1, m2) = (MatroidOracle::new(n, a), MatroidOracle::new(n, b));
        let w = &weights[..n];
        let got = max_weight_common_independent(&m1, &m2, w);
        prop_assert!(m1.is_independent(&got) && m2.is_independent(&got));
        let value = |s: &[usize]| s.iter().map(|&e| w[e]).sum::<i64>();
        let best = subsets(n).filter(|s| m1.is_independent(s) && m2.is_independent(s)).map(|s| value(&s)).max().unwrap();
        prop_assert_eq!(value(&got), best);
    }

    #[test]
    fn union_split_matches_two_colourings((n, m) in sized_matroid(), mask in 0u32..64) {
        let o = MatroidOracle::new(n, m);
        let set: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let brute = (0u32..1 << set.len()).any(|c| {
            let (l, r): (Vec<usize>, Vec<usize>) = set.iter().enumerate().fold((vec![], vec![]), |(mut l, mut r), (i, &e)| {
                if c >> i & 1 == 1 { l.push(e) } else { r.push(e) }
                (l, r)
            });
            o.is_independent(&l) && o.is_independent(&r)
        });
        match union_is_independent(&o, &set) {
            Some((l, r)) => {
                prop_assert!(brute);
                prop_assert!(o.is_independent(&l) && o.is_independent(&r));
                let mut both: Vec<usize> = l.iter().chain(&r).copied().collect();
                both.sort_unstable();
                prop_assert_eq!(both, set);
            }
            None => prop_assert!(!brute),
        }
    }

    #[test]
    fn exchange_bijection_swaps_into_bases((n, m) in sized_matroid(), i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let o = MatroidOracle::new(n, m);
        let all = bases(&o);
        let (from, to) = (i.get(&all), j.get(&all));
        let f = bijective_exchange(&o, from, to).unwrap();
        let mut image: Vec<usize> = f.values().copied().collect();
        image.sort_unstable();
        prop_assert_eq!(&image, to);
        for (&x, &y) in &f {
            if to.contains(&x) {
                prop_assert_eq!(x, y);
            }
            let mut swapped: Vec<usize> = to.iter().copied().filter(|&e| e != y).collect();
            swapped.push(x);
            swapped.sort_unstable();
            prop_assert!(is_basis(&o, &swapped));
        }
    }

    #[test]
    fn hungarian_is_optimal(rows in 1usize..=4, extra in 0usize..=2, cells in proptest::collection::vec(0i64..20, 24)) {
        let cols = rows + extra;
        let cost: Vec<Vec<i64>> = (0..rows).map(|r| cells[r * cols..(r + 1) * cols].to_vec()).collect();
        let got = hungarian(&cost);
        let mut used = got.clone();
        used.sort_unstable();
        used.dedup();
        prop_assert_eq!(used.len(), rows);
        let total: i64 = got.iter().enumerate().map(|(r, &c)| cost[r][c]).sum();
        fn best(cost: &[Vec<i64>], r: usize, used: &mut Vec<bool>) -> i64 {
            if r == cost.len() {
                return 0;
            }
            let mut b = i64::MAX;
            for c in 0..used.len() {
                if !used[c] {
                    used[c] = true;
                    b = b.min(cost[r][c] + best(cost, r + 1, used));
                    used[c] = false;
                }
            }
            b
        }
        prop_assert_eq!(total, best(&cost, 0, &mut vec![false; cols]));
    }

    #[test]
    fn k_matchings_split_into_matchings(k in 1usize..=3, n in 1usize..=4, m in 1usize..=4, seed in proptest::collection::vec(proptest::collection::vec(proptest::option::of(0usize..4), 4), 3)) {
        // a union of k matchings has every degree at most k
        let mut incidence = vec![Vec::new(); n];
        for layer in seed.iter().take(k) {
            let mut taken = vec![false; m];
            for a in 0..n {
                if let Some(o) = layer[a].filter(|&o| o < m && !taken[o]) {
                    taken[o] = true;
                    incidence[a].push(o);
                }
            }
        }
        let km = KMatching { k, incidence: incidence.clone() };
        let parts = decompose_k_matching(&km, m).unwrap();
        prop_assert_eq!(parts.len(), k);
        let mut covered = vec![Vec::new(); n];
        for p in &parts {
            let mut objs = p.objects();
            let len = objs.len();
            objs.sort_unstable();
            objs.dedup();
            prop_assert_eq!(objs.len(), len);
            for (a, o) in p.pairs() {
                covered[a].push(o);
            }
        }
        for a in 0..n {
            covered[a].sort_unstable();
            incidence[a].sort_unstable();
        }
        prop_assert_eq!(covered, incidence);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn popularity_verdict_matches_enumeration(
        n in 1usize..=4, m in 1usize..=4, model in model(), kind in kind(), seed in any::<u64>(),
        picks in proptest::collection::vec(any::<prop::sample::Index>(), 1..=2),
    ) {
        let inst = gen_random(n, m, 0.7, model, kind, seed).unwrap();
        let alts = enumerate_alternatives(&inst, CAP).unwrap();
        let set: Vec<Matching> = picks.iter().map(|p| p.get(&alts).clone()).collect();
        let verdict = verify_popular(&inst, &set).unwrap();
        let brute = exhaustive_counterexample(&inst, &set, false, CAP).unwrap();
        prop_assert_eq!(verdict.is_popular(), brute.is_none());
        if let condorcet::popularity::PopularityVerdict::NotPopular { counterexample, tally: t } = verdict {
            prop_assert!(inst.is_alternative(&counterexample));
            prop_assert!(t.margin < 0);
            prop_assert_eq!(t, tally(&inst, &set, &counterexample));
        }
    }

    #[test]
    fn pareto_verdict_matches_enumeration(
        n in 1usize..=4, m in 1usize..=4, model in model(), kind in kind(), seed in any::<u64>(),
        pick in any::<prop::sample::Index>(),
    ) {
        let inst = gen_random(n, m, 0.7, model, kind, seed).unwrap();
        let alts = enumerate_alternatives(&inst, CAP).unwrap();
        let x = pick.get(&alts);
        let dominated = alts.iter().any(|y| dominates(&inst, std::slice::from_ref(y), std::slice::from_ref(x)));
        let verdict = verify_pareto_optimal(&inst, x).unwrap();
        prop_assert_eq!(verdict.is_optimal(), !dominated);
        if let condorcet::popularity::ParetoVerdict::Dominated { witness } = verdict {
            prop_assert!(inst.is_alternative(&witness));
            prop_assert!(dominates(&inst, &[witness], std::slice::from_ref(x)));
        }
    }

    #[test]
    fn symmetric_search_matches_raw_election(
        n in 1usize..=4, m in 1usize..=4, model in model(), seed in any::<u64>(), k in 1usize..=2,
    ) {
        let inst = gen_random(n, m, 0.7, model, MatroidKind::None, seed).unwrap();
        let alts = enumerate_alternatives(&inst, CAP).unwrap();
        let vecs: Vec<Vec<Option<usize>>> = alts.iter().map(|a| a.0.clone()).collect();
        let raw = Election::new(inst.prefs(), &vecs, false).min_popular_set(k, false);
        let fast = find_popular_set_symmetric(&inst, k).unwrap();
        prop_assert_eq!(raw.is_some(), fast.is_some());
        if let Some(set) = fast {
            prop_assert!(set.len() <= k);
            prop_assert!(exhaustive_counterexample(&inst, &set, false, CAP).unwrap().is_none());
        }
    }

    #[test]
    fn pareto_search_matches_enumeration(n in 1usize..=4, m in 1usize..=4, model in model(), seed in any::<u64>()) {
        let inst = gen_random(n, m, 0.7, model, MatroidKind::None, seed).unwrap();
        let alts = enumerate_alternatives(&inst, CAP).unwrap();
        let exists = alts.iter().any(|x| !alts.iter().any(|y| dominates(&inst, std::slice::from_ref(y), std::slice::from_ref(x))));
        let found = exists_pareto_optimal_matching(&inst).unwrap();
        prop_assert_eq!(found.is_some(), exists);
        if let Some(x) = found {
            prop_assert!(inst.is_alternative(&x));
            prop_assert!(!alts.iter().any(|y| dominates(&inst, std::slice::from_ref(y), std::slice::from_ref(&x))));
        }
    }

    #[test]
    fn instances_round_trip(n in 0usize..=5, m in 0usize..=5, model in model(), kind in kind(), seed in any::<u64>()) {
        let inst = gen_random(n, m, 0.6, model, kind, seed).unwrap();
        let text = instance_to_json(&inst);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(instance_to_json(&back), text);
        prop_assert_eq!(back.edges(), inst.edges());
        prop_assert_eq!(back.prefs(), inst.prefs());
    }
}
