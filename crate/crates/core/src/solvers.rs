//! End-to-end pipelines: the base model, the iterative cycle-penalization
//! loop, and pair removal with transitive reconstruction.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cycles::{detect_cycles, initial_cycles, intersect_runs, omega, prune_for_embedding, Cycle, CycleSet, OmegaMatrix, Parity};
use crate::error::{invalid_arg, Error, Result};
use crate::pairs::{pairs, triples, Pair};
use crate::qubo::{build_n2_qubo, build_pair_removal_qubo, select_penalty, PenaltyLedger, DEFAULT_EPSILON};
use crate::ranking::{bias_of, build_comparison, cumulative_kt, normalized_kt, reconstruct, represent, BiasMatrix, Dataset, ListKind, Ranking, UpperTriBits};
use crate::sampler::{energy_eq, Sample, SampleSet, Sampler};

/// Hard stop for the iterative loop when no update limit is set.
pub const DEFAULT_MAX_ITERATIONS: usize = 1000;
pub const DEFAULT_MAX_RESTARTS: usize = 3;
pub const DEFAULT_MIN_GAP: usize = 2;

/// Outcome of a pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub ranking: Ranking,
    pub bits: UpperTriBits,
    pub cumulative_kt: f64,
    pub normalized_kt: f64,
    /// Energy of the chosen record under the QUBO it was sampled from.
    pub energy: f64,
    /// Occurrences of the chosen record.
    pub num_occ: usize,
    /// Occurrences of every record at the lowest sampled energy.
    pub lowest_occ: usize,
    pub iterations: usize,
    pub ledger: PenaltyLedger,
    pub converged: bool,
    pub seed: u64,
    #[serde(default)]
    pub trace: Vec<IterationTrace>,
    /// Pairs left out of the final QUBO and inferred afterwards.
    #[serde(default)]
    pub removed_pairs: Vec<Pair>,
    #[serde(default)]
    pub restarts: usize,
    #[serde(skip)]
    pub samples: Option<SampleSet>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub iteration: usize,
    pub ledger_size: usize,
    pub new_cycles: usize,
    pub bumped_cycles: usize,
    pub best_energy: f64,
    pub best_kt: f64,
}

/// Starting penalty of a freshly detected cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialPenalty {
    /// `1 + ε` for odd vote totals, `ε` for even ones.
    Minimal,
    /// Smallest `|b|` among the cycle's three pairs, plus `ε`.
    BiasScaled,
}

impl std::str::FromStr for InitialPenalty {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minimal" => Ok(InitialPenalty::Minimal),
            "bias-scaled" => Ok(InitialPenalty::BiasScaled),
            other => Err(invalid_arg(format!("unknown initial penalty mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterOptions {
    /// Stop after this many ledger changes (the initial seeding counts as
    /// one). `None` runs until a cycle-free output appears.
    pub max_cycle_updates: Option<usize>,
    /// `None` derives parity from the dataset.
    pub parity: Option<Parity>,
    /// `None` uses `Minimal` on standard datasets, `BiasScaled` otherwise.
    pub initial_penalty: Option<InitialPenalty>,
    /// Sampler runs per iteration; detected cycles are intersected.
    pub double_check: usize,
    /// Thin the initial cycle set with [`prune_for_embedding`].
    pub prune_k: Option<usize>,
    pub epsilon: f64,
    pub seed: u64,
    pub max_iterations: usize,
}

impl Default for IterOptions {
    fn default() -> Self {
        IterOptions {
            max_cycle_updates: None,
            parity: None,
            initial_penalty: None,
            double_check: 1,
            prune_k: None,
            epsilon: DEFAULT_EPSILON,
            seed: 0,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }
}

impl IterOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_cycle_updates == Some(0) {
            return Err(invalid_arg("max_cycle_updates must be at least 1"));
        }
        if self.double_check == 0 {
            return Err(invalid_arg("double_check must be at least 1"));
        }
        if self.prune_k == Some(0) {
            return Err(invalid_arg("prune_k must be at least 1"));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(invalid_arg("epsilon must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(invalid_arg("max_iterations must be at least 1"));
        }
        Ok(())
    }
}

/// Odd only for complete, unit-weight datasets with an odd vote count.
pub fn dataset_parity(ds: &Dataset) -> Parity {
    if ds.is_standard() {
        Parity::of_total_weight(ds.total_weight())
    } else {
        Parity::Even
    }
}

/// Seeds for iteration `a`, run `b` of a pipeline.
pub(crate) fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(seed ^ mix(a.wrapping_mul(0x1_0000_0001) ^ mix(b)))
}

/// Derived inputs shared by every pipeline on one dataset.
struct Problem<'a> {
    ds: &'a Dataset,
    b: BiasMatrix,
    om: OmegaMatrix,
    parity: Parity,
    opts: IterOptions,
}

impl<'a> Problem<'a> {
    fn new(ds: &'a Dataset, opts: &IterOptions) -> Result<Self> {
        opts.validate()?;
        let b = bias_of(&build_comparison(ds));
        let om = omega(&b);
        let parity = opts.parity.unwrap_or_else(|| dataset_parity(ds));
        Ok(Problem { ds, b, om, parity, opts: *opts })
    }

    fn initial_mode(&self) -> InitialPenalty {
        self.opts.initial_penalty.unwrap_or(if self.ds.is_standard() {
            InitialPenalty::Minimal
        } else {
            InitialPenalty::BiasScaled
        })
    }

    fn step(&self) -> f64 {
        if self.ds.is_standard() {
            2.0
        } else {
            1.0
        }
    }

    fn minimal_penalty(&self, c: &Cycle) -> f64 {
        let eps = self.opts.epsilon;
        match self.initial_mode() {
            InitialPenalty::Minimal => match self.parity {
                Parity::Odd => 1.0 + eps,
                Parity::Even => eps,
            },
            InitialPenalty::BiasScaled => {
                c.pairs().iter().map(|&(i, j)| self.b.get(i, j).abs()).fold(f64::INFINITY, f64::min) + eps
            }
        }
    }

    fn initial_ledger(&self) -> Result<PenaltyLedger> {
        let mut cycles = initial_cycles(&self.om, self.parity);
        if let Some(k) = self.opts.prune_k {
            cycles = prune_for_embedding(&cycles, k)?;
        }
        let mut ledger = PenaltyLedger::new();
        for c in cycles {
            ledger.insert(c, self.minimal_penalty(&c))?;
        }
        Ok(ledger)
    }

    fn uniform_penalty(&self) -> Result<f64> {
        select_penalty(&self.b, self.ds.total_weight(), self.parity, self.opts.epsilon)
    }

    /// Every triple avoiding the removed pairs, at the min-max penalty.
    fn full_ledger(&self, removed: &BTreeSet<Pair>) -> Result<PenaltyLedger> {
        let p = self.uniform_penalty()?;
        let cycles = triples(self.ds.n())
            .map(|(i, j, k)| Cycle::new(i, j, k))
            .collect::<Result<Vec<_>>>()?;
        PenaltyLedger::uniform(
            cycles.into_iter().filter(|c| !c.pairs().iter().any(|p| removed.contains(p))),
            p,
        )
    }

    fn solution(&self, bits: UpperTriBits, record: &Sample, lowest_occ: usize) -> Result<Solution> {
        let ranking = reconstruct(&bits, self.opts.seed)?;
        Ok(Solution {
            cumulative_kt: cumulative_kt(self.ds, &ranking)?,
            normalized_kt: normalized_kt(self.ds, &ranking)?,
            converged: detect_cycles(&bits)?.is_empty(),
            ranking,
            bits,
            energy: record.energy,
            num_occ: record.num_occ,
            lowest_occ,
            iterations: 0,
            ledger: PenaltyLedger::new(),
            seed: self.opts.seed,
            trace: Vec::new(),
            removed_pairs: Vec::new(),
            restarts: 0,
            samples: None,
        })
    }
}

/// How cycle penalties are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PenaltyMode {
    /// One uniform min-max penalty on every triple, sampled once.
    Minmax,
    /// Penalize observed cycles only, raising them until none remain.
    Iterative,
}

impl std::str::FromStr for PenaltyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minmax" => Ok(PenaltyMode::Minmax),
            "iterative" => Ok(PenaltyMode::Iterative),
            other => Err(invalid_arg(format!("unknown penalty mode `{other}`"))),
        }
    }
}

enum RunOutcome {
    Done(Solution),
    Stalled { unresolved: Vec<Pair>, best: Option<Solution> },
}

/// Lowest energy, then most occurrences, then smallest configuration.
fn pick_best(sets: &[SampleSet]) -> Result<(&Sample, usize)> {
    let mut best: Option<(&Sample, usize)> = None;
    for (run, set) in sets.iter().enumerate() {
        let Some(s) = set.best() else { continue };
        let better = match best {
            None => true,
            Some((b, _)) => {
                if !energy_eq(s.energy, b.energy) {
                    s.energy < b.energy
                } else {
                    (std::cmp::Reverse(s.num_occ), &s.config) < (std::cmp::Reverse(b.num_occ), &b.config)
                }
            }
        };
        if better {
            best = Some((s, run));
        }
    }
    best.ok_or_else(|| Error::InvalidState("sampler returned no records".into()))
}

fn run<S: Sampler + ?Sized>(
    pb: &Problem<'_>,
    sampler: &S,
    mode: PenaltyMode,
    removed: &mut BTreeSet<Pair>,
) -> Result<RunOutcome> {
    let opts = &pb.opts;
    let mut ledger = match mode {
        PenaltyMode::Iterative => pb.initial_ledger()?,
        PenaltyMode::Minmax => PenaltyLedger::new(),
    };
    let max_updates = match mode {
        PenaltyMode::Iterative => opts.max_cycle_updates.unwrap_or(usize::MAX),
        PenaltyMode::Minmax => 1,
    };
    let mut updates = 1;
    let mut best: Option<Solution> = None;
    let mut trace = Vec::new();

    for iteration in 1..=opts.max_iterations {
        // A penalized cycle needs all three of its pairs in the QUBO.
        removed.retain(|&p| !ledger.touches_pair(p));
        if mode == PenaltyMode::Minmax {
            ledger = pb.full_ledger(removed)?;
        }
        let reduced = build_pair_removal_qubo(&pb.b, &ledger, removed)?;
        let runs = (0..opts.double_check)
            .map(|r| sampler.sample(&reduced.qubo, derive_seed(opts.seed, iteration as u64, r as u64)))
            .collect::<Result<Vec<_>>>()?;
        let (record, run_idx) = pick_best(&runs)?;

        let mut bits = reduced.expand(&record.config);
        if !removed.is_empty() {
            match infer_removed(&bits, removed)? {
                Inference::Complete(x) => bits = x,
                Inference::Stalled { unresolved, .. } => {
                    return Ok(RunOutcome::Stalled { unresolved, best });
                }
            }
        }
        let detected = detect_cycles(&bits)?;

        let mut sol = pb.solution(bits, record, runs[run_idx].lowest_occurrences())?;
        sol.iterations = iteration;
        sol.ledger = ledger.clone();
        sol.removed_pairs = removed.iter().copied().collect();
        sol.samples = Some(runs[run_idx].clone());
        let mut step = IterationTrace {
            iteration,
            ledger_size: ledger.len(),
            new_cycles: 0,
            bumped_cycles: 0,
            best_energy: sol.energy,
            best_kt: sol.cumulative_kt,
        };
        let keep = match &best {
            None => true,
            Some(b) => (sol.cumulative_kt, !sol.converged) < (b.cumulative_kt, !b.converged),
        };
        if keep {
            best = Some(sol);
        }

        if detected.is_empty() || updates >= max_updates {
            trace.push(step);
            break;
        }

        let found = if runs.len() > 1 {
            let per_run = runs
                .iter()
                .filter_map(|set| set.best())
                .map(|s| {
                    let x = reduced.expand(&s.config);
                    let x = if removed.is_empty() {
                        x
                    } else {
                        match infer_removed(&x, removed)? {
                            Inference::Complete(x) => x,
                            Inference::Stalled { partial, .. } => return Ok(partial_cycles(&partial)),
                        }
                    };
                    detect_cycles(&x)
                })
                .collect::<Result<Vec<CycleSet>>>()?;
            let common = intersect_runs(&per_run)?;
            if common.is_empty() {
                detected
            } else {
                common
            }
        } else {
            detected
        };
        for c in found {
            if ledger.bump(c, pb.step()).is_some() {
                step.bumped_cycles += 1;
            } else {
                ledger.insert(c, pb.minimal_penalty(&c))?;
                step.new_cycles += 1;
            }
        }
        updates += 1;
        trace.push(step);
    }

    let mut sol = best.ok_or_else(|| Error::InvalidState("no iterations were run".into()))?;
    sol.trace = trace;
    sol.iterations = sol.trace.len();
    sol.ledger = ledger;
    Ok(RunOutcome::Done(sol))
}

/// Cycles among fully decided triples of a partially inferred matrix.
fn partial_cycles(x: &UpperTriBits) -> CycleSet {
    triples(x.n())
        .filter_map(|(i, j, k)| {
            let (ij, jk, ik) = (x.get(i, j)?, x.get(j, k)?, x.get(i, k)?);
            crate::cycles::is_cyclic(ij, jk, ik).then(|| Cycle::new(i, j, k).ok()).flatten()
        })
        .collect()
}

fn expect_done(outcome: RunOutcome) -> Result<Solution> {
    match outcome {
        RunOutcome::Done(sol) => Ok(sol),
        RunOutcome::Stalled { .. } => Err(Error::InvalidState("stall without removed pairs".into())),
    }
}

/// Uniform min-max penalty on every triple, one sampling round. Uses the
/// options' `epsilon`, `parity`, `double_check` and `seed`.
pub fn solve_base<S: Sampler + ?Sized>(ds: &Dataset, sampler: &S, opts: &IterOptions) -> Result<Solution> {
    let pb = Problem::new(ds, opts)?;
    expect_done(run(&pb, sampler, PenaltyMode::Minmax, &mut BTreeSet::new())?)
}

/// Penalizes only cycles that show up, raising recurring ones, until the
/// sampled optimum is cycle-free or the update budget runs out. The best
/// solution seen in any iteration is returned.
pub fn solve_iterative<S: Sampler + ?Sized>(ds: &Dataset, sampler: &S, opts: &IterOptions) -> Result<Solution> {
    let pb = Problem::new(ds, opts)?;
    expect_done(run(&pb, sampler, PenaltyMode::Iterative, &mut BTreeSet::new())?)
}

/// Up to `count` pairs with the largest `|b|` outside every ledger cycle.
pub fn remove_pairs_prhb(b: &BiasMatrix, ledger: &PenaltyLedger, count: usize) -> BTreeSet<Pair> {
    let used = ledger.pairs();
    let mut eligible: Vec<Pair> = pairs(b.n()).filter(|p| !used.contains(p)).collect();
    eligible.sort_by(|&(i, j), &(k, l)| b.get(k, l).abs().total_cmp(&b.get(i, j).abs()).then((i, j).cmp(&(k, l))));
    eligible.into_iter().take(count).collect()
}

/// Ranking read off the majority matrix: candidates sorted by wins, where a
/// tied pair counts half; equal scores are shuffled by `seed`.
pub fn omega_ranking(om: &OmegaMatrix, seed: u64) -> Ranking {
    let n = om.n();
    let mut score = vec![0.0; n];
    for (i, j) in pairs(n) {
        let w = om.get(i, j);
        score[i] += w;
        score[j] += 1.0 - w;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order.sort_by(|a, b| score[*b].total_cmp(&score[*a]));
    Ranking::complete(order).expect("a shuffled identity is a permutation")
}

/// Up to `count` pairs outside every ledger cycle whose candidates sit at
/// least `min_gap` apart in the majority ranking, widest gaps first. No
/// candidate loses more than `⌈n/2⌉` pairs.
pub fn remove_pairs_promega(
    om: &OmegaMatrix,
    ledger: &PenaltyLedger,
    count: usize,
    min_gap: usize,
    seed: u64,
) -> Result<BTreeSet<Pair>> {
    if min_gap < 2 {
        return Err(invalid_arg(format!("min_gap must be at least 2, got {min_gap}")));
    }
    let n = om.n();
    let pos = omega_ranking(om, seed).positions(n);
    let used = ledger.pairs();
    let gap = |(i, j): Pair| pos[i].unwrap().abs_diff(pos[j].unwrap());
    let mut eligible: Vec<Pair> = pairs(n).filter(|&p| !used.contains(&p) && gap(p) >= min_gap).collect();
    eligible.sort_by(|&a, &b| gap(b).cmp(&gap(a)).then(a.cmp(&b)));
    let cap = n.div_ceil(2);
    let mut touched = vec![0usize; n];
    let mut out = BTreeSet::new();
    for (i, j) in eligible {
        if out.len() == count {
            break;
        }
        if touched[i] < cap && touched[j] < cap {
            touched[i] += 1;
            touched[j] += 1;
            out.insert((i, j));
        }
    }
    Ok(out)
}

/// Result of transitive reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub enum Inference {
    Complete(UpperTriBits),
    /// A full sweep resolved nothing; `unresolved` are still undecided.
    Stalled { partial: UpperTriBits, unresolved: Vec<Pair> },
}

/// Vote of third candidate `c` on the pair `(a, b)`: `+1` for `a ≺ b`,
/// `-1` for `b ≺ a`, `0` when `c` says nothing.
fn third_party_vote(x: &UpperTriBits, a: usize, b: usize, c: usize) -> i32 {
    match (x.prefers(a, c), x.prefers(b, c)) {
        (Some(true), Some(false)) => 1,
        (Some(false), Some(true)) => -1,
        _ => 0,
    }
}

/// Fills removed pairs by majority of transitive evidence. Each sweep
/// evaluates every undecided pair against the same snapshot, then applies
/// all decisions at once; sweeps repeat until done or stuck.
pub fn infer_removed(x: &UpperTriBits, removed: &BTreeSet<Pair>) -> Result<Inference> {
    let undecided: BTreeSet<Pair> = x.undecided_pairs().into_iter().collect();
    if &undecided != removed {
        return Err(invalid_arg("undecided slots must be exactly the removed pairs"));
    }
    let n = x.n();
    let mut x = x.clone();
    let mut open: Vec<Pair> = removed.iter().copied().collect();
    while !open.is_empty() {
        let decisions: Vec<(Pair, i32)> = open
            .iter()
            .map(|&(a, b)| {
                let r: i32 = (0..n).filter(|&c| c != a && c != b).map(|c| third_party_vote(&x, a, b, c)).sum();
                ((a, b), r)
            })
            .collect();
        let before = open.len();
        for ((a, b), r) in decisions {
            if r != 0 {
                x.set(a, b, Some(r > 0));
            }
        }
        open.retain(|&(a, b)| x.get(a, b).is_none());
        if open.len() == before {
            return Ok(Inference::Stalled { partial: x, unresolved: open });
        }
    }
    Ok(Inference::Complete(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrStrategy {
    /// Highest bias.
    Prhb,
    /// Far apart in the majority ranking.
    Promega,
}

impl std::str::FromStr for PrStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prhb" => Ok(PrStrategy::Prhb),
            "promega" => Ok(PrStrategy::Promega),
            other => Err(invalid_arg(format!("unknown pair-removal strategy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRemoval {
    pub strategy: PrStrategy,
    pub count: usize,
    pub min_gap: usize,
    pub max_restarts: usize,
    pub mode: PenaltyMode,
}

impl PairRemoval {
    pub fn new(strategy: PrStrategy, count: usize) -> Self {
        PairRemoval {
            strategy,
            count,
            min_gap: DEFAULT_MIN_GAP,
            max_restarts: DEFAULT_MAX_RESTARTS,
            mode: PenaltyMode::Iterative,
        }
    }
}

/// Leaves selected pairs out of the QUBO and infers them from the sampled
/// order. Pairs that cannot be inferred are put back and the pipeline is
/// rerun, at most `max_restarts` times.
pub fn solve_pair_removal<S: Sampler + ?Sized>(
    ds: &Dataset,
    sampler: &S,
    pr: &PairRemoval,
    opts: &IterOptions,
) -> Result<Solution> {
    let pb = Problem::new(ds, opts)?;
    let ledger = pb.initial_ledger()?;
    let mut removed = match pr.strategy {
        PrStrategy::Prhb => remove_pairs_prhb(&pb.b, &ledger, pr.count),
        PrStrategy::Promega => remove_pairs_promega(&pb.om, &ledger, pr.count, pr.min_gap, opts.seed)?,
    };
    let mut best_failed: Option<Solution> = None;
    for restart in 0..=pr.max_restarts {
        match run(&pb, sampler, pr.mode, &mut removed)? {
            RunOutcome::Done(mut sol) => {
                sol.restarts = restart;
                return Ok(sol);
            }
            RunOutcome::Stalled { unresolved, best } => {
                if let Some(b) = best.filter(|b| b.converged) {
                    if best_failed.as_ref().map_or(true, |f| b.cumulative_kt < f.cumulative_kt) {
                        best_failed = Some(b);
                    }
                }
                for p in unresolved {
                    removed.remove(&p);
                }
            }
        }
    }
    Err(Error::PartialFailure { restarts: pr.max_restarts, best: best_failed.map(Box::new) })
}

/// Exact-size one-hot encoding with `n²` variables. Needs complete votes.
pub fn solve_n2<S: Sampler + ?Sized>(ds: &Dataset, sampler: &S, seed: u64) -> Result<Solution> {
    if ds.kind() != ListKind::Complete {
        return Err(invalid_arg("the n² encoding needs complete votes"));
    }
    let n2 = build_n2_qubo(&build_comparison(ds), ds.votes().len())?;
    let set = sampler.sample(&n2.qubo, seed)?;
    let record = set.best().ok_or_else(|| Error::InvalidState("sampler returned no records".into()))?;
    let ranking = n2.decode(&record.config)?;
    let bits = represent(&ranking)?;
    Ok(Solution {
        cumulative_kt: cumulative_kt(ds, &ranking)?,
        normalized_kt: normalized_kt(ds, &ranking)?,
        ranking,
        bits,
        energy: record.energy,
        num_occ: record.num_occ,
        lowest_occ: set.lowest_occurrences(),
        iterations: 1,
        ledger: PenaltyLedger::new(),
        converged: true,
        seed,
        trace: Vec::new(),
        removed_pairs: Vec::new(),
        restarts: 0,
        samples: Some(set),
    })
}
