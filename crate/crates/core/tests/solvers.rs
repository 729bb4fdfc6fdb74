mod common;

use kemeny_qa::{
    gen_synthetic, solve_base, solve_iterative, solve_n2, solve_pair_removal, Dataset, ExactSolver, GenSpec,
    IterOptions, ListKind, PairRemoval, PenaltyMode, PrStrategy, Ranking, SaParams, SimulatedAnnealing, WeightScheme,
};

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * b.abs().max(1.0)
}

fn check(ds: &Dataset, got: &Ranking, kt: f64, what: &str) {
    let (min, optima) = common::kemeny_oracle(ds);
    assert!(close(kt, min), "{what}: kt {kt} vs optimum {min}");
    assert!(close(common::total_distance(ds, got.order()), kt), "{what}: reported kt disagrees with ranking");
    assert!(optima.iter().any(|o| o.as_slice() == got.order()), "{what}: {got} not among optima");
}

#[test]
fn iterative_matches_oracle_on_seven_candidates() {
    for seed in 0..6 {
        let ds = gen_synthetic(&GenSpec::synthetic(7, 11, seed)).unwrap();
        let sol = solve_iterative(&ds, &ExactSolver::default(), &IterOptions { seed, ..IterOptions::default() }).unwrap();
        assert!(sol.converged);
        check(&ds, &sol.ranking, sol.cumulative_kt, &format!("seed {seed}"));
    }
}

#[test]
fn base_model_matches_oracle() {
    for seed in 0..10 {
        let ds = common::random_dataset(6, 1 + (seed as usize % 6), 100 + seed);
        let sol = solve_base(&ds, &ExactSolver::default(), &IterOptions::default()).unwrap();
        check(&ds, &sol.ranking, sol.cumulative_kt, &format!("seed {seed}"));
    }
}

#[test]
fn promega_three_removals_match_full_solve() {
    for seed in 0..8 {
        let ds = gen_synthetic(&GenSpec::synthetic(7, 9, 40 + seed)).unwrap();
        let opts = IterOptions { seed, ..IterOptions::default() };
        let full = solve_iterative(&ds, &ExactSolver::default(), &opts).unwrap();
        for mode in [PenaltyMode::Iterative, PenaltyMode::Minmax] {
            let pr = PairRemoval { mode, ..PairRemoval::new(PrStrategy::Promega, 3) };
            let sol = solve_pair_removal(&ds, &ExactSolver::default(), &pr, &opts).unwrap();
            assert!(close(sol.cumulative_kt, full.cumulative_kt), "seed {seed} {mode:?}");
            check(&ds, &sol.ranking, sol.cumulative_kt, &format!("seed {seed} {mode:?}"));
        }
    }
}

#[test]
fn prhb_matches_oracle() {
    for seed in 0..8 {
        let ds = common::random_dataset(6, 7, 300 + seed);
        let sol = solve_pair_removal(&ds, &ExactSolver::default(), &PairRemoval::new(PrStrategy::Prhb, 2), &IterOptions::default())
            .unwrap();
        check(&ds, &sol.ranking, sol.cumulative_kt, &format!("seed {seed}"));
    }
}

#[test]
fn partial_weighted_datasets_match_oracle() {
    for seed in 0..12u64 {
        let mut rng = common::SplitMix(seed);
        let kind = if seed % 2 == 0 { ListKind::Partial } else { ListKind::Ktop };
        let scheme = match seed % 3 {
            0 => WeightScheme::Uniform,
            1 => WeightScheme::Distance,
            _ => WeightScheme::Position { p: 1.5 },
        };
        let votes = (0..6)
            .map(|_| {
                let mut o = rng.shuffled(6);
                o.truncate(2 + rng.below(5));
                Ranking::new(o, kind, (1 + rng.below(8)) as f64 / 4.0).unwrap()
            })
            .collect();
        let ds = Dataset::new(6, votes, scheme).unwrap();
        let sol = solve_iterative(&ds, &ExactSolver::default(), &IterOptions { seed, ..IterOptions::default() }).unwrap();
        check(&ds, &sol.ranking, sol.cumulative_kt, &format!("seed {seed}"));
    }
}

#[test]
fn n2_exact_decodes_to_optimum() {
    for seed in 0..5 {
        let ds = common::random_dataset(4, 5, 500 + seed);
        let sol = solve_n2(&ds, &ExactSolver::default(), seed).unwrap();
        check(&ds, &sol.ranking, sol.cumulative_kt, &format!("seed {seed}"));
    }
}

#[test]
fn annealing_iterative_finds_optimum_on_eight_candidates() {
    let ds = gen_synthetic(&GenSpec::synthetic(8, 11, 2)).unwrap();
    let sa = SimulatedAnnealing::new(SaParams { reads: 500, sweeps: 200, beta_range: None, seed: 0 });
    let sol = solve_iterative(&ds, &sa, &IterOptions { seed: 5, ..IterOptions::default() }).unwrap();
    check(&ds, &sol.ranking, sol.cumulative_kt, "sa");
}
