//! Kemeny rank aggregation as a QUBO over pairwise-preference bits.
//!
//! A consensus ranking is encoded with one binary variable per candidate
//! pair (`x_ij = 1` iff `i` precedes `j`). Linear terms carry the pairwise
//! biases and cubic-free penalty terms forbid 3-cycles. The resulting QUBO
//! is solved by a pluggable [`Sampler`]: exhaustive enumeration for small
//! instances, simulated annealing otherwise.
//!
//! ```
//! use kemeny_qa::{solve_iterative, Dataset, ExactSolver, IterOptions};
//!
//! let ds = Dataset::from_orders(3, &[&[0, 1, 2], &[1, 2, 0], &[2, 0, 1]]).unwrap();
//! let sol = solve_iterative(&ds, &ExactSolver::default(), &IterOptions::default()).unwrap();
//! assert_eq!(sol.cumulative_kt, 4.0);
//! assert!(sol.converged);
//! ```

pub mod baselines;
pub mod cli;
pub mod cycles;
pub mod datagen;
pub mod error;
pub mod pairs;
pub mod qubo;
pub mod ranking;
pub mod sampler;
pub mod solvers;
pub mod votes_file;

pub use cycles::{detect_cycles, initial_cycles, omega, Cycle, CycleSet, OmegaMatrix, Parity};
pub use error::{Error, Result};
pub use qubo::{build_base_qubo, build_iterative_qubo, build_n2_qubo, build_pair_removal_qubo, select_penalty, PenaltyLedger, Qubo};
pub use ranking::{
    accuracy, bias_of, build_comparison, cumulative_kt, generalized_kt, kendall_tau, normalized_kt, reconstruct,
    represent, scores, BiasMatrix, Dataset, KtEvaluator, ListKind, PairMatrix, Ranking, UpperTriBits, WeightScheme,
};
pub use sampler::{exact_solve, sa_solve, ExactSolver, SaParams, Sample, SampleSet, Sampler, SimulatedAnnealing};
pub use solvers::{
    infer_removed, remove_pairs_promega, remove_pairs_prhb, solve_base, solve_iterative, solve_n2, solve_pair_removal,
    Inference, IterOptions, IterationTrace, PairRemoval, PenaltyMode, PrStrategy, Solution,
};
pub use votes_file::{format_votes, parse_votes, read_votes, write_votes};
pub use baselines::{brute_force, kwiksort, kwiksort_reachable, OracleResult};
pub use datagen::{kwiksort_trap_dataset, gen_simplified, gen_synthetic, GenMode, GenSpec};
