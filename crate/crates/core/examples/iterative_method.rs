//! Per-cycle penalties grown only where the sampler finds cycles.

use kemeny_qa::{brute_force, gen_synthetic, solve_iterative, ExactSolver, GenSpec, IterOptions};

fn main() -> kemeny_qa::Result<()> {
    let ds = gen_synthetic(&GenSpec::synthetic(7, 6, 101))?;
    let sol = solve_iterative(&ds, &ExactSolver::default(), &IterOptions::default())?;

    for t in &sol.trace {
        println!(
            "iter {:>2}: ledger {:>3}  new {:>2}  bumped {:>2}  best kt {}",
            t.iteration, t.ledger_size, t.new_cycles, t.bumped_cycles, t.best_kt
        );
    }
    println!("final {}  kt {}  converged {}", sol.ranking, sol.cumulative_kt, sol.converged);
    println!("optimum {}", brute_force(&ds)?.min_kt);

    // Stop after two ledger updates, as a budgeted run would.
    let capped = IterOptions { max_cycle_updates: Some(2), ..IterOptions::default() };
    let early = solve_iterative(&ds, &ExactSolver::default(), &capped)?;
    println!("after 2 updates: kt {}  converged {}", early.cumulative_kt, early.converged);
    Ok(())
}
