//! Single-shot QUBO with one global cycle penalty, solved exactly.

use kemeny_qa::{
    bias_of, build_base_qubo, build_comparison, brute_force, exact_solve, select_penalty, solve_base, ExactSolver,
    IterOptions, Parity,
};

fn main() -> kemeny_qa::Result<()> {
    let ds = kemeny_qa::gen_synthetic(&kemeny_qa::GenSpec::synthetic(6, 7, 1))?;
    let b = bias_of(&build_comparison(&ds));

    let penalty = select_penalty(&b, ds.total_weight(), Parity::Odd, 0.5)?;
    let qubo = build_base_qubo(&b, penalty)?;
    let samples = exact_solve(&qubo)?;
    println!(
        "penalty {penalty}, {} variables, {} ground state(s) at energy {:?}",
        qubo.num_vars(),
        samples.lowest().len(),
        samples.lowest_energy()
    );

    let sol = solve_base(&ds, &ExactSolver::default(), &IterOptions::default())?;
    let oracle = brute_force(&ds)?;
    println!("ranking {}  kt {}  (optimum {})", sol.ranking, sol.cumulative_kt, oracle.min_kt);
    Ok(())
}
