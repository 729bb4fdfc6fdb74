//! Fewer variables: drop some pair bits, solve, then infer them back.

use kemeny_qa::{
    brute_force, gen_synthetic, solve_pair_removal, ExactSolver, GenSpec, IterOptions, PairRemoval, PenaltyMode,
    PrStrategy,
};

fn main() -> kemeny_qa::Result<()> {
    let ds = gen_synthetic(&GenSpec::synthetic(7, 9, 12))?;
    println!("optimum {}", brute_force(&ds)?.min_kt);
    for strategy in [PrStrategy::Prhb, PrStrategy::Promega] {
        for mode in [PenaltyMode::Iterative, PenaltyMode::Minmax] {
            let pr = PairRemoval { mode, ..PairRemoval::new(strategy, 3) };
            match solve_pair_removal(&ds, &ExactSolver::default(), &pr, &IterOptions::default()) {
                Ok(sol) => println!(
                    "{strategy:?}/{mode:?}: kt {}  removed {:?}  restarts {}",
                    sol.cumulative_kt, sol.removed_pairs, sol.restarts
                ),
                Err(e) => println!("{strategy:?}/{mode:?}: {e}"),
            }
        }
    }
    Ok(())
}
