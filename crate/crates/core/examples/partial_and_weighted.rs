//! Partial and k-top votes, list weights and position-dependent pair weights.

use kemeny_qa::{brute_force, parse_votes, solve_iterative, ExactSolver, IterOptions, ListKind, WeightScheme};

const VOTES: &str = "\
# candidates: 5
0 1 2 3 4
3 1 0
w=2.5;2 4 1
w=0.5;4 3
1 2
";

fn main() -> kemeny_qa::Result<()> {
    for kind in [ListKind::Partial, ListKind::Ktop] {
        for scheme in [WeightScheme::Uniform, WeightScheme::Distance, WeightScheme::Position { p: 2.0 }] {
            let ds = parse_votes(VOTES, kind, scheme)?;
            let sol = solve_iterative(&ds, &ExactSolver::default(), &IterOptions::default())?;
            println!(
                "{kind:?} {scheme:?}: {}  kt {:.3}  optimum {:.3}",
                sol.ranking,
                sol.cumulative_kt,
                brute_force(&ds)?.min_kt
            );
        }
    }
    Ok(())
}
