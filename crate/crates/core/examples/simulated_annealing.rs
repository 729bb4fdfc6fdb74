//! Seeded annealing on sizes past the exact solver's reach.

use kemeny_qa::{gen_synthetic, solve_iterative, GenSpec, IterOptions, SaParams, SimulatedAnnealing};

fn main() -> kemeny_qa::Result<()> {
    let ds = gen_synthetic(&GenSpec::synthetic(12, 11, 4))?;
    let sa = SimulatedAnnealing::new(SaParams { reads: 400, sweeps: 200, beta_range: None, seed: 0 });
    let opts = IterOptions { max_cycle_updates: Some(6), ..IterOptions::default() };

    let a = solve_iterative(&ds, &sa, &IterOptions { seed: 1, ..opts })?;
    let b = solve_iterative(&ds, &sa, &IterOptions { seed: 1, ..opts })?;
    assert_eq!(a.ranking, b.ranking, "same seed, same answer");
    println!("{} candidates, kt {}  normalized {:.4}", ds.n(), a.cumulative_kt, a.normalized_kt);
    println!("ranking {}  lowest-energy occurrences {}", a.ranking, a.lowest_occ);
    Ok(())
}
