//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::time::{Duration, Instant};

use condorcet::arborescence::ArborescenceInstance;
use condorcet::certificates::{build_branching_certificate, verify_colored_branching, BranchingVerdict, CertificateOutcome, Color};
use condorcet::generators::{
    find_assignment_counterexample, gen_ldm_reduction, gen_lower_bound_matching, gen_lower_bound_matroid, gen_no_pareto,
    gen_random, gen_random_arborescence, gen_vertex_cover_reduction, MatroidKind, PrefModel,
};
use condorcet::matroid::{
    bijective_exchange, fundamental_circuit, is_basis, max_weight_common_independent, union_is_independent, Matroid,
    MatroidOracle,
};
use condorcet::popularity::election::Election;
use condorcet::popularity::{
    brute_force_condorcet_dimension, brute_force_pareto_sets, dominates, enumerate_alternatives,
    exhaustive_counterexample, exists_pareto_optimal_matching, has_popular_set, tally, top_choice_matching,
    verify_pareto_optimal, verify_popular, verify_strongly_popular, ParetoVerdict,
};
use condorcet::solvers::{solve_arborescence, solve_partial_sqrt, solve_strict_round_robin, solve_weak_matroid};
use condorcet::{AlternativeKind, Matching, MatchingInstance, PreferenceClass};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ALL: usize = usize::MAX;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn lib<T>(r: condorcet::Result<T>, what: &str) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

fn index_in(alts: &[Matching], set: &[Matching]) -> Vec<usize> {
    set.iter().map(|m| alts.iter().position(|a| a == m).expect("members are alternatives")).collect()
}

/// Set-level Pareto optimality by enumeration.
fn pareto_optimal_set(inst: &MatchingInstance, set: &[Matching]) -> Result<bool, String> {
    let alts = lib(enumerate_alternatives(inst, ALL), "enumerate")?;
    let vecs: Vec<Vec<Option<usize>>> = alts.iter().map(|m| m.0.clone()).collect();
    Ok(!Election::new(inst.prefs(), &vecs, false).is_dominated(&index_in(&alts, set)))
}

fn sqrt_ceiling(n: usize) -> usize {
    (1..).find(|&k| k * k >= 2 * n).unwrap()
}

fn strict_round_robin() -> Outcome {
    let (mut strong, mut top) = (0, 0);
    for seed in 0..300u64 {
        let (n, m) = (1 + seed as usize % 7, 1 + (seed as usize / 7) % 7);
        let inst = lib(gen_random(n, m, 0.6, PrefModel::Strict, MatroidKind::None, seed), "generate")?;
        let set = lib(solve_strict_round_robin(&inst, None), "solve")?;
        ensure!(lib(verify_popular(&inst, &set), "verify")?.is_popular(), "seed {seed}: not popular");
        ensure!(pareto_optimal_set(&inst, &set)?, "seed {seed}: dominated");
        if lib(top_choice_matching(&inst, ALL), "top choice")?.is_none() {
            ensure!(lib(verify_strongly_popular(&inst, &set, ALL), "strong")?.is_popular(), "seed {seed}: not strongly popular");
            strong += 1;
        } else {
            top += 1;
        }
    }
    Ok(format!("300 instances; {strong} strongly popular, {top} with a top-choice matching"))
}

fn weak_matroid() -> Outcome {
    let kinds = [MatroidKind::Uniform, MatroidKind::Partition, MatroidKind::Graphic];
    let mut largest = 0;
    for seed in 0..200u64 {
        let (n, m) = (1 + seed as usize % 5, 1 + (seed as usize / 5) % 8);
        let model = if seed % 3 == 0 { PrefModel::Strict } else { PrefModel::Weak };
        let inst = lib(gen_random(n, m, 0.6, model, kinds[seed as usize % 3], seed), "generate")?;
        let set = lib(solve_weak_matroid(&inst), "solve")?;
        ensure!(set.len() <= 2, "seed {seed}: {} matchings", set.len());
        ensure!(lib(exhaustive_counterexample(&inst, &set, false, ALL), "tally")?.is_none(), "seed {seed}: beaten");
        largest = largest.max(inst.edges().len());
    }
    Ok(format!("200 instances, up to {largest} edges"))
}

fn pareto_implies_popular() -> Outcome {
    let kinds = [MatroidKind::Uniform, MatroidKind::Partition, MatroidKind::Graphic];
    let models = [PrefModel::Strict, PrefModel::Weak, PrefModel::Partial];
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (mut instances, mut sets, mut certs) = (0, 0, 0);
    let mut seed = 0u64;
    while instances < 100 {
        seed += 1;
        ensure!(seed < 5000, "only {instances} constrained instances with a Pareto-optimal pair");
        let (n, m) = (2 + seed as usize % 3, 2 + (seed as usize / 3) % 3);
        let inst = lib(gen_random(n, m, 0.7, models[seed as usize % 3], kinds[(seed / 3) as usize % 3], seed), "generate")?;
        let pairs = lib(condorcet::popularity::all_pareto_sets(&inst, 2, ALL, ALL), "pareto sets")?;
        if pairs.is_empty() {
            continue;
        }
        instances += 1;
        let alts = lib(enumerate_alternatives(&inst, ALL), "enumerate")?;
        for set in &pairs {
            sets += 1;
            ensure!(lib(verify_popular(&inst, set), "verify")?.is_popular(), "seed {seed}: Pareto pair not popular");
            for _ in 0..20 {
                let competitor = alts.choose(&mut rng).unwrap();
                let cert = match lib(build_branching_certificate(&inst, set, competitor), "certificate")? {
                    CertificateOutcome::Certificate(c) => c,
                    CertificateOutcome::Improvement(_) => return Err(format!("seed {seed}: Pareto pair improved")),
                };
                let t = tally(&inst, set, competitor);
                let count = |c: Color| cert.colors.iter().filter(|&&x| x == c).count();
                ensure!(count(Color::Red) == t.prefers_competitor.len(), "seed {seed}: red count");
                ensure!(count(Color::Blue) == t.prefers_set.len(), "seed {seed}: blue count");
                match verify_colored_branching(&cert) {
                    BranchingVerdict::Valid { red, blue } => {
                        ensure!(blue as i64 - red as i64 == t.margin, "seed {seed}: margin mismatch");
                    }
                    BranchingVerdict::Invalid { reason } => return Err(format!("seed {seed}: invalid certificate ({reason})")),
                }
                certs += 1;
            }
        }
    }
    Ok(format!("{instances} instances, {sets} Pareto-optimal pairs, {certs} certificates"))
}

fn lower_bounds() -> Outcome {
    for (k, want) in [(1, 2), (2, 3)] {
        let inst = lib(gen_lower_bound_matching(k), "generate")?;
        let (dim, witness) = lib(brute_force_condorcet_dimension(&inst, false, ALL), "dimension")?;
        ensure!(dim == want, "k = {k}: dimension {dim}, expected {want}");
        ensure!(lib(exhaustive_counterexample(&inst, &witness, false, ALL), "tally")?.is_none(), "k = {k}: witness beaten");
    }
    let inst = lib(gen_lower_bound_matroid(2), "generate")?;
    ensure!(lib(has_popular_set(&inst, 2, false, ALL), "search")?.is_none(), "matroid family has a popular pair");
    Ok("dimensions 2 and 3; no popular pair under the matroid".into())
}

fn square_root_bound() -> Outcome {
    let mut instances: Vec<MatchingInstance> = Vec::new();
    for seed in 0..300u64 {
        let (n, m) = (1 + seed as usize % 7, 1 + (seed as usize / 7) % 7);
        instances.push(lib(gen_random(n, m, 0.6, PrefModel::Strict, MatroidKind::None, seed), "generate")?);
    }
    instances.push(lib(gen_lower_bound_matching(1), "generate")?);
    instances.push(lib(gen_lower_bound_matching(2), "generate")?);
    instances.push(gen_no_pareto().clone());
    for seed in 0..200u64 {
        let n = 1 + seed as usize % 40;
        let m = if n <= 7 { 1 + (seed as usize / 40) % 7 } else { 1 + (seed as usize * 7) % 40 };
        instances.push(lib(gen_random(n, m, 0.4, PrefModel::Partial, MatroidKind::None, 1000 + seed), "generate")?);
    }
    let mut crossed = 0;
    for (i, inst) in instances.iter().enumerate() {
        let (set, _) = lib(solve_partial_sqrt(inst), "solve")?;
        let bound = sqrt_ceiling(inst.n_agents());
        ensure!(set.len() <= bound, "instance {i}: {} > {bound}", set.len());
        ensure!(lib(verify_popular(inst, &set), "verify")?.is_popular(), "instance {i}: not popular");
        if inst.n_agents() <= 7 {
            ensure!(lib(exhaustive_counterexample(inst, &set, false, ALL), "tally")?.is_none(), "instance {i}: beaten");
            crossed += 1;
        }
    }
    Ok(format!("{} instances, {crossed} cross-checked by enumeration", instances.len()))
}

fn no_pareto_gap() -> Outcome {
    let inst = gen_no_pareto();
    let alts = lib(enumerate_alternatives(&inst, ALL), "enumerate")?;
    let single = |m: &Matching| std::slice::from_ref(m).to_vec();
    let all_dominated = alts.iter().all(|x| alts.iter().any(|y| dominates(&inst, &single(y), &single(x))));
    ensure!(all_dominated, "some alternative is undominated");
    ensure!(lib(exists_pareto_optimal_matching(&inst), "search")?.is_none(), "search found a Pareto-optimal matching");
    let mut perfect = 0;
    for x in alts.iter().filter(|m| m.size() == inst.n_agents()) {
        match lib(verify_pareto_optimal(&inst, x), "verify")? {
            ParetoVerdict::Dominated { witness } => {
                ensure!(inst.is_alternative(&witness), "witness is not an alternative");
                ensure!(dominates(&inst, &single(&witness), &single(x)), "witness does not dominate");
            }
            ParetoVerdict::ParetoOptimal => return Err("a perfect matching was judged optimal".into()),
        }
        perfect += 1;
    }
    ensure!(perfect > 0, "no perfect matchings");
    Ok(format!("{} alternatives all dominated; {perfect} perfect matchings with witnesses", alts.len()))
}

fn min_vertex_cover(n: usize, edges: &[(usize, usize)]) -> usize {
    (0u32..1 << n)
        .filter(|c| edges.iter().all(|&(u, v)| c >> u & 1 == 1 || c >> v & 1 == 1))
        .map(|c| c.count_ones() as usize)
        .min()
        .unwrap()
}

fn reductions() -> Outcome {
    let mut checked = 0;
    for n in 1..=5usize {
        let slots: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        for mask in 0u32..1 << slots.len() {
            let edges: Vec<(usize, usize)> = (0..slots.len()).filter(|&i| mask >> i & 1 == 1).map(|i| slots[i]).collect();
            let cover = min_vertex_cover(n, &edges);
            for ell in 0..=n {
                let inst = lib(gen_vertex_cover_reduction(n, &edges, ell), "generate")?;
                let exists = lib(brute_force_pareto_sets(&inst, 1, ALL), "search")?.is_some();
                ensure!(exists == (cover <= ell), "n = {n}, edges {edges:?}, ell = {ell}: {exists} vs cover {cover}");
                checked += 1;
            }
        }
    }
    let mut ldm = 0;
    for m in 0..=1usize {
        let parts: Vec<Vec<String>> = ["x", "y", "z"].iter().map(|p| (0..m).map(|i| format!("{p}{i}")).collect()).collect();
        let all: Vec<Vec<usize>> = if m == 1 { vec![vec![0, 0, 0]] } else { Vec::new() };
        for mask in 0u32..1 << all.len() {
            let tuples: Vec<Vec<usize>> = (0..all.len()).filter(|&i| mask >> i & 1 == 1).map(|i| all[i].clone()).collect();
            let perfect = m == 0 || !tuples.is_empty();
            let inst = lib(gen_ldm_reduction(&parts, &tuples, 2), "generate")?;
            let pair = lib(has_popular_set(&inst, 2, false, ALL), "search")?.is_some();
            ensure!(pair == perfect, "m = {m}, tuples {tuples:?}: popular pair {pair}, 3DM {perfect}");
            ldm += 1;
        }
    }
    Ok(format!("{checked} labelled graph/bound pairs on at most 5 nodes; {ldm} 3DM instances"))
}

fn arborescences() -> Outcome {
    let models = [PrefModel::Strict, PrefModel::Strict, PrefModel::Weak, PrefModel::Partial];
    let mut strong = 0;
    for seed in 0..200u64 {
        let nodes = 2 + seed as usize % 6;
        let inst = lib(gen_random_arborescence(nodes, 0.35, models[seed as usize % 4], seed), "generate")?;
        let pair = lib(solve_arborescence(&inst), "solve")?;
        for t in [&pair.first, &pair.second] {
            ensure!(inst.is_arborescence(t), "seed {seed}: not an arborescence");
        }
        ensure!(maximal_covered(&inst, &pair.first, &pair.second), "seed {seed}: a maximal arc is missing");
        let set = pair.as_set();
        ensure!(lib(inst.counterexample(&set, false, ALL), "enumerate")?.is_none(), "seed {seed}: beaten");
        if inst.preference_class() == PreferenceClass::Strict && lib(inst.top_choice(ALL), "top choice")?.is_none() {
            ensure!(lib(inst.counterexample(&set, true, ALL), "enumerate")?.is_none(), "seed {seed}: not strongly popular");
            strong += 1;
        }
    }
    Ok(format!("200 digraphs, {strong} checked for strong popularity"))
}

/// Every agent receives, in one of the two trees, an incoming arc no other usable arc beats.
fn maximal_covered(inst: &ArborescenceInstance, first: &[usize], second: &[usize]) -> bool {
    let usable = inst.usable_arcs();
    inst.agents().iter().enumerate().all(|(a, &v)| {
        let undominated = |e: usize| {
            (0..inst.arcs().len()).all(|f| !(usable[f] && inst.arcs()[f].1 == v && inst.prefs()[a].prefers(Some(f), Some(e))))
        };
        undominated(first[a]) || undominated(second[a])
    })
}

fn random_matroid(rng: &mut ChaCha8Rng, n: usize, depth: usize) -> Matroid {
    let pick = if depth == 0 { rng.gen_range(0..4) } else { rng.gen_range(0..7) };
    match pick {
        0 => Matroid::Free,
        1 => Matroid::Uniform(rng.gen_range(0..=n)),
        2 => {
            let k = rng.gen_range(1..=3);
            let part_of = (0..n).map(|_| rng.gen_bool(0.85).then(|| rng.gen_range(0..k))).collect();
            Matroid::Partition { part_of, caps: (0..k).map(|_| rng.gen_range(0..=3)).collect() }
        }
        3 => {
            let nodes = rng.gen_range(2..=5);
            let ends = (0..n).map(|_| rng.gen_bool(0.9).then(|| (rng.gen_range(0..nodes), rng.gen_range(0..nodes)))).collect();
            Matroid::Graphic { nodes, ends }
        }
        4 => Matroid::Truncation { inner: Box::new(random_matroid(rng, n, depth - 1)), bound: rng.gen_range(0..=n) },
        5 => Matroid::Union {
            left: Box::new(random_matroid(rng, n, depth - 1)),
            right: Box::new(random_matroid(rng, n, depth - 1)),
        },
        _ => {
            let width = rng.gen_range(1..=n);
            Matroid::Mapped { inner: Box::new(random_matroid(rng, width, depth - 1)), map: (0..n).map(|_| rng.gen_range(0..width)).collect() }
        }
    }
}

fn random_basis(rng: &mut ChaCha8Rng, o: &MatroidOracle) -> Vec<usize> {
    let mut order: Vec<usize> = (0..o.ground_size()).collect();
    order.shuffle(rng);
    let mut b: Vec<usize> = Vec::new();
    for e in order {
        b.push(e);
        if !o.is_independent(&b) {
            b.pop();
        }
    }
    b.sort_unstable();
    b
}

fn subsets_of(items: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    (0u32..1 << items.len()).map(move |mask| (0..items.len()).filter(|&i| mask >> i & 1 == 1).map(|i| items[i]).collect())
}

fn matroid_machinery() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut counts = [0usize; 4];
    let mut trial = 0;
    while counts.iter().any(|&c| c < 500) {
        trial += 1;
        let n = rng.gen_range(1..=10);
        let oracle = MatroidOracle::new(n, random_matroid(&mut rng, n, 2));
        let ground: Vec<usize> = (0..n).collect();

        // fundamental circuit: basis part of the unique circuit in B + o
        let basis = random_basis(&mut rng, &oracle);
        let outside: Vec<usize> = ground.iter().copied().filter(|e| !basis.contains(e)).collect();
        if let Some(&o) = outside.choose(&mut rng) {
            let got = lib(fundamental_circuit(&oracle, &basis, o), "circuit")?;
            let with = |s: &[usize]| {
                let mut t = s.to_vec();
                t.push(o);
                t.sort_unstable();
                t
            };
            let circuit: Vec<usize> = subsets_of(&basis)
                .filter(|s| !oracle.is_independent(&with(s)))
                .min_by_key(Vec::len)
                .expect("B + o is dependent");
            ensure!(got == circuit, "trial {trial}: circuit {got:?}, expected {circuit:?}");
            counts[0] += 1;
        }

        // bijective exchange between two random bases
        let other = random_basis(&mut rng, &oracle);
        let f = lib(bijective_exchange(&oracle, &basis, &other), "exchange")?;
        let mut image: Vec<usize> = f.values().copied().collect();
        image.sort_unstable();
        ensure!(f.keys().copied().collect::<Vec<_>>() == basis && image == other, "trial {trial}: not a bijection");
        for (&x, &y) in &f {
            let mut swapped: Vec<usize> = other.iter().copied().filter(|&e| e != y).collect();
            swapped.push(x);
            swapped.sort_unstable();
            ensure!(is_basis(&oracle, &swapped), "trial {trial}: swap {x} -> {y} is not a basis");
        }
        counts[1] += 1;

        // union witness against all two-colourings
        let set: Vec<usize> = ground.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
        let brute = (0u32..1 << set.len()).any(|c| {
            let (l, r): (Vec<usize>, Vec<usize>) = set.iter().enumerate().fold((vec![], vec![]), |(mut l, mut r), (i, &e)| {
                if c >> i & 1 == 1 { l.push(e) } else { r.push(e) }
                (l, r)
            });
            oracle.is_independent(&l) && oracle.is_independent(&r)
        });
        match union_is_independent(&oracle, &set) {
            Some((l, r)) => {
                ensure!(brute && oracle.is_independent(&l) && oracle.is_independent(&r), "trial {trial}: bad union witness");
                let mut both: Vec<usize> = l.iter().chain(&r).copied().collect();
                both.sort_unstable();
                ensure!(both == set, "trial {trial}: witness does not split the set");
            }
            None => ensure!(!brute, "trial {trial}: union witness missed"),
        }
        counts[2] += 1;

        // weighted intersection against all common independent sets
        let second = MatroidOracle::new(n, random_matroid(&mut rng, n, 1));
        let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(0..12)).collect();
        let got = max_weight_common_independent(&oracle, &second, &weights);
        let value = |s: &[usize]| s.iter().map(|&e| weights[e]).sum::<i64>();
        let best = subsets_of(&ground).filter(|s| oracle.is_independent(s) && second.is_independent(s)).map(|s| value(&s)).max().unwrap();
        ensure!(oracle.is_independent(&got) && second.is_independent(&got), "trial {trial}: not common independent");
        ensure!(value(&got) == best, "trial {trial}: weight {} < {best}", value(&got));
        counts[3] += 1;
    }
    Ok(format!("circuits {}, exchanges {}, unions {}, intersections {}", counts[0], counts[1], counts[2], counts[3]))
}

fn assignment_counterexample() -> Outcome {
    let (inst, set, competitor) = lib(find_assignment_counterexample(6, Duration::from_secs(600)), "search")?;
    ensure!(inst.alternatives() == AlternativeKind::APerfect, "not an assignment instance");
    ensure!(inst.preference_class() == PreferenceClass::Strict, "rankings are not strict");
    ensure!(set.len() == 2 && set.iter().chain([&competitor]).all(|m| inst.is_alternative(m)), "malformed triple");
    ensure!(pareto_optimal_set(&inst, &set)?, "pair is dominated");
    let t = tally(&inst, &set, &competitor);
    ensure!(t.margin < 0, "margin {} is not negative", t.margin);
    Ok(format!("{} agents, margin {}", inst.n_agents(), t.margin))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 10] = [
        ("strict rankings: round robin is popular, Pareto-optimal, strongly popular without a top choice", strict_round_robin, 60),
        ("weak rankings with matroids: at most two matchings, popular", weak_matroid, 120),
        ("Pareto-optimal pairs are popular with valid branching certificates", pareto_implies_popular, 600),
        ("lower bounds on the dimension", lower_bounds, 600),
        ("square-root upper bound for partial orders", square_root_bound, 600),
        ("an instance without Pareto-optimal matchings", no_pareto_gap, 600),
        ("vertex cover and 3DM reductions", reductions, 900),
        ("two arborescences cover maximal arcs and are popular", arborescences, 600),
        ("matroid machinery against exhaustive oracles", matroid_machinery, 600),
        ("assignment counterexample is certified", assignment_counterexample, 600),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        let result = match result {
            Ok(detail) if secs > *budget as f64 => Err(format!("{detail}; took {secs:.1}s, budget {budget}s")),
            other => other,
        };
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
