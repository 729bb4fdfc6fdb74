mod common;

use std::collections::BTreeSet;

use kemeny_qa::cycles::Cycle;
use kemeny_qa::{
    build_comparison, build_iterative_qubo, bias_of, cumulative_kt, detect_cycles, infer_removed, kendall_tau,
    kwiksort, kwiksort_reachable, reconstruct, represent, sa_solve, solve_iterative, Dataset, ExactSolver, Inference,
    IterOptions, ListKind, PenaltyLedger, Ranking, SaParams, UpperTriBits, WeightScheme,
};
use proptest::prelude::*;

fn perm(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle()
}

fn perms3() -> impl Strategy<Value = (Vec<usize>, Vec<usize>, Vec<usize>)> {
    (1usize..9).prop_flat_map(|n| (perm(n), perm(n), perm(n)))
}

fn bits(n: usize) -> impl Strategy<Value = Vec<bool>> {
    proptest::collection::vec(any::<bool>(), n * (n - 1) / 2)
}

fn rk(v: &[usize]) -> Ranking {
    Ranking::complete(v.to_vec()).unwrap()
}

/// Votes of random length, read as `kind`, with quarter list weights.
fn truncated_dataset(n: usize, seed: u64, kind: ListKind, scheme: WeightScheme) -> Dataset {
    let mut rng = common::SplitMix(seed);
    let votes = (0..5)
        .map(|_| {
            let mut o = rng.shuffled(n);
            o.truncate(1 + rng.below(n));
            Ranking::new(o, kind, (1 + rng.below(8)) as f64 / 4.0).unwrap()
        })
        .collect();
    Dataset::new(n, votes, scheme).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn kendall_tau_is_a_metric((a, b, c) in perms3()) {
        let (ra, rb, rc) = (rk(&a), rk(&b), rk(&c));
        let d = |x: &Ranking, y: &Ranking| kendall_tau(x, y).unwrap();
        prop_assert_eq!(d(&ra, &ra), 0);
        prop_assert_eq!(d(&ra, &rb), d(&rb, &ra));
        prop_assert!(d(&ra, &rc) <= d(&ra, &rb) + d(&rb, &rc));
        prop_assert_eq!(d(&ra, &rb), common::kt(&a, &b));
        prop_assert_eq!(d(&ra, &rb) == 0, a == b);
    }

    #[test]
    fn representation_round_trips(p in (1usize..10).prop_flat_map(perm), seed in any::<u64>()) {
        let x = represent(&rk(&p)).unwrap();
        prop_assert!(detect_cycles(&x).unwrap().is_empty());
        let back = reconstruct(&x, seed).unwrap();
        prop_assert_eq!(back.order(), p.as_slice());
    }

    #[test]
    fn detected_cycles_match_scan(v in (3usize..8).prop_flat_map(bits)) {
        let n = (1..).find(|n| n * (n - 1) / 2 == v.len()).unwrap();
        let x = UpperTriBits::from_bits(n, &v).unwrap();
        let mut expected = BTreeSet::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let get = |a, b| x.get(a, b).unwrap();
                    if !common::transitive(get(i, j), get(j, k), get(i, k)) {
                        expected.insert(Cycle::new(i, j, k).unwrap());
                    }
                }
            }
        }
        prop_assert_eq!(detect_cycles(&x).unwrap(), expected);
    }

    #[test]
    fn cumulative_distance_matches_definition(
        n in 2usize..7,
        seed in any::<u64>(),
        kind in prop_oneof![Just(ListKind::Complete), Just(ListKind::Partial), Just(ListKind::Ktop)],
        scheme in prop_oneof![
            Just(WeightScheme::Uniform),
            Just(WeightScheme::Distance),
            (1u32..8).prop_map(|q| WeightScheme::Position { p: q as f64 / 2.0 }),
        ],
        p in perm(6),
    ) {
        let kind = if kind == ListKind::Complete { ListKind::Partial } else { kind };
        let ds = truncated_dataset(n, seed, kind, scheme);
        let order: Vec<usize> = p.into_iter().filter(|&c| c < n).collect();
        let got = cumulative_kt(&ds, &rk(&order)).unwrap();
        let want = common::total_distance(&ds, &order);
        prop_assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0), "{} vs {}", got, want);
    }

    #[test]
    fn infer_never_flips_decided_bits(p in (3usize..9).prop_flat_map(perm), mask in any::<u64>()) {
        let n = p.len();
        let full = represent(&rk(&p)).unwrap();
        let mut x = full.clone();
        let mut removed = BTreeSet::new();
        for (t, (i, j)) in (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).enumerate() {
            if mask >> (t % 64) & 1 == 1 && removed.len() < n / 2 {
                x.set(i, j, None);
                removed.insert((i, j));
            }
        }
        let (out, unresolved) = match infer_removed(&x, &removed).unwrap() {
            Inference::Complete(out) => (out, Vec::new()),
            Inference::Stalled { partial, unresolved } => (partial, unresolved),
        };
        for i in 0..n {
            for j in i + 1..n {
                if !removed.contains(&(i, j)) {
                    prop_assert_eq!(out.get(i, j), x.get(i, j));
                } else if let Some(v) = out.get(i, j) {
                    // The rest of the ranking is transitive, so every inferred
                    // pair agrees with it.
                    prop_assert_eq!(Some(v), full.get(i, j));
                }
            }
        }
        prop_assert!(unresolved.iter().all(|&(a, b)| out.get(a, b).is_none()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 40, ..ProptestConfig::default() })]

    #[test]
    fn kwiksort_output_is_reachable(n in 1usize..7, votes in 1usize..6, seed in any::<u64>(), ks in any::<u64>()) {
        let pm = build_comparison(&common::random_dataset(n, votes, seed));
        let reachable = kwiksort_reachable(&pm).unwrap();
        let out = kwiksort(&pm, ks);
        prop_assert!(reachable.iter().any(|r| r.order() == out.order()));
    }

    #[test]
    fn ledger_only_grows(n in 3usize..7, votes in 1usize..8, seed in any::<u64>()) {
        let ds = common::random_dataset(n, votes, seed);
        let sol = solve_iterative(&ds, &ExactSolver::default(), &IterOptions { seed, ..IterOptions::default() }).unwrap();
        prop_assert!(sol.trace.windows(2).all(|w| w[0].ledger_size <= w[1].ledger_size));
        prop_assert_eq!(sol.trace.last().unwrap().ledger_size, sol.ledger.len());
        prop_assert!(sol.converged);
        let (min, _) = common::kemeny_oracle(&ds);
        prop_assert!((sol.cumulative_kt - min).abs() < 1e-9);
    }

    #[test]
    fn condorcet_winner_leads(n in 3usize..7, votes in 1usize..5, seed in any::<u64>(), w in 0usize..7) {
        // Outvote the random part: votes + 1 extra lists headed by `w`.
        let w = w % n;
        let base = common::random_dataset(n, votes, seed);
        let mut orders: Vec<Vec<usize>> = base.votes().iter().map(|v| v.order().to_vec()).collect();
        for _ in 0..votes + 1 {
            let mut o: Vec<usize> = (0..n).filter(|&c| c != w).collect();
            o.insert(0, w);
            orders.push(o);
        }
        let refs: Vec<&[usize]> = orders.iter().map(Vec::as_slice).collect();
        let ds = Dataset::from_orders(n, &refs).unwrap();
        let pm = build_comparison(&ds);
        prop_assert!((0..n).filter(|&c| c != w).all(|c| pm.get(w, c) > pm.get(c, w)));
        let (_, optima) = common::kemeny_oracle(&ds);
        prop_assert!(optima.iter().all(|o| o[0] == w));
        let sol = solve_iterative(&ds, &ExactSolver::default(), &IterOptions::default()).unwrap();
        prop_assert_eq!(sol.ranking.order()[0], w);
    }
}

#[test]
fn annealing_is_reproducible() {
    let ds = common::random_dataset(7, 9, 21);
    let b = bias_of(&build_comparison(&ds));
    let q = build_iterative_qubo(&b, &PenaltyLedger::new()).unwrap();
    let params = SaParams { reads: 300, sweeps: 50, beta_range: None, seed: 77 };
    let a = sa_solve(&q, &params).unwrap();
    assert_eq!(a, sa_solve(&q, &params).unwrap());
    assert_ne!(a, sa_solve(&q, &SaParams { seed: 78, ..params }).unwrap());
    assert_eq!(a.total_occurrences(), 300);
}
