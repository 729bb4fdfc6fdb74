//! The position-assignment encoding, with n² variables and one-hot
//! constraints, next to the pair encoding.

use kemeny_qa::{build_comparison, build_n2_qubo, brute_force, solve_iterative, solve_n2, ExactSolver, IterOptions};

fn main() -> kemeny_qa::Result<()> {
    let ds = kemeny_qa::gen_synthetic(&kemeny_qa::GenSpec::synthetic(4, 5, 8))?;
    let n2 = build_n2_qubo(&build_comparison(&ds), ds.votes().len())?;
    println!("n² encoding: {} variables, constraint penalty {}", n2.qubo.num_vars(), n2.penalty);

    let sol = solve_n2(&ds, &ExactSolver::default(), 0)?;
    println!("n²:   {}  kt {}", sol.ranking, sol.cumulative_kt);
    let pairs = solve_iterative(&ds, &ExactSolver::default(), &IterOptions::default())?;
    println!("pair: {}  kt {}  ({} variables)", pairs.ranking, pairs.cumulative_kt, pairs.bits.slots().len());
    println!("optimum {}", brute_force(&ds)?.min_kt);
    Ok(())
}
