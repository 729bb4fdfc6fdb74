//! A five-candidate dataset where no KwikSort run reaches the optimum.

use kemeny_qa::{
    kwiksort_trap_dataset, brute_force, build_comparison, cumulative_kt, kwiksort, kwiksort_reachable, solve_iterative,
    ExactSolver, IterOptions,
};

fn main() -> kemeny_qa::Result<()> {
    let ds = kwiksort_trap_dataset();
    let pm = build_comparison(&ds);
    let oracle = brute_force(&ds)?;
    println!("optimum {} at {:?}", oracle.min_kt, oracle.optima.iter().map(|r| r.to_string()).collect::<Vec<_>>());

    for r in kwiksort_reachable(&pm)? {
        println!("kwiksort can return {r}  kt {}", cumulative_kt(&ds, &r)?);
    }
    let best = (0..10_000)
        .map(|s| cumulative_kt(&ds, &kwiksort(&pm, s)))
        .collect::<kemeny_qa::Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    println!("best of 10000 kwiksort trials: {best}");

    let sol = solve_iterative(&ds, &ExactSolver::default(), &IterOptions::default())?;
    println!("iterative method: {}  kt {}", sol.ranking, sol.cumulative_kt);
    Ok(())
}
