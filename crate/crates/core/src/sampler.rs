//! QUBO samplers: exhaustive enumeration and multi-read simulated annealing.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, Error, Result};
use crate::qubo::Qubo;

/// Variable cap for exhaustive enumeration.
pub const DEFAULT_EXACT_CAP: usize = 24;
/// Ground states kept by the exact solver before truncating.
pub const DEFAULT_MAX_GROUND_STATES: usize = 1 << 16;
/// Read count used throughout the original experiments.
pub const DEFAULT_READS: usize = 2500;
pub const DEFAULT_SWEEPS: usize = 100;

/// One distinct configuration returned by a sampler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    #[serde(with = "bitstring")]
    pub config: Vec<bool>,
    pub energy: f64,
    pub num_occ: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    /// Sorted by ascending energy, then configuration.
    pub records: Vec<Sample>,
    pub backend: String,
    pub reads: usize,
    pub seed: Option<u64>,
    /// Set when the exact solver hit its ground-state storage limit.
    #[serde(default)]
    pub truncated: bool,
}

impl SampleSet {
    fn from_counts(
        qubo: &Qubo,
        counts: BTreeMap<Vec<bool>, usize>,
        backend: &str,
        reads: usize,
        seed: Option<u64>,
    ) -> SampleSet {
        let mut records: Vec<Sample> = counts
            .into_iter()
            .map(|(config, num_occ)| Sample { energy: qubo.energy(&config), config, num_occ })
            .collect();
        records.sort_by(|a, b| a.energy.total_cmp(&b.energy).then_with(|| a.config.cmp(&b.config)));
        SampleSet { records, backend: backend.to_string(), reads, seed, truncated: false }
    }

    pub fn lowest_energy(&self) -> Option<f64> {
        self.records.first().map(|s| s.energy)
    }

    /// Records tied (to 1e-9 relative) with the lowest energy.
    pub fn lowest(&self) -> &[Sample] {
        let Some(min) = self.lowest_energy() else {
            return &[];
        };
        let end = self.records.iter().take_while(|s| energy_eq(s.energy, min)).count();
        &self.records[..end]
    }

    /// Lowest energy; ties go to the most frequent record, then to the
    /// lexicographically smallest configuration.
    pub fn best(&self) -> Option<&Sample> {
        self.lowest()
            .iter()
            .min_by(|a, b| b.num_occ.cmp(&a.num_occ).then_with(|| a.config.cmp(&b.config)))
    }

    /// Total occurrences of lowest-energy configurations.
    pub fn lowest_occurrences(&self) -> usize {
        self.lowest().iter().map(|s| s.num_occ).sum()
    }

    /// Total occurrences of configurations accepted by `pred`.
    pub fn occurrences_where(&self, mut pred: impl FnMut(&[bool]) -> bool) -> usize {
        self.records.iter().filter(|s| pred(&s.config)).map(|s| s.num_occ).sum()
    }

    pub fn total_occurrences(&self) -> usize {
        self.records.iter().map(|s| s.num_occ).sum()
    }
}

pub(crate) fn energy_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// A QUBO solver producing a [`SampleSet`]. The seed is ignored by
/// deterministic backends.
pub trait Sampler: Sync {
    fn sample(&self, qubo: &Qubo, seed: u64) -> Result<SampleSet>;

    fn name(&self) -> &'static str;
}

impl<S: Sampler + ?Sized> Sampler for &S {
    fn sample(&self, qubo: &Qubo, seed: u64) -> Result<SampleSet> {
        (**self).sample(qubo, seed)
    }

    fn name(&self) -> &'static str {
        (**self).name()
    }
}

impl<S: Sampler + ?Sized + Send> Sampler for Box<S> {
    fn sample(&self, qubo: &Qubo, seed: u64) -> Result<SampleSet> {
        (**self).sample(qubo, seed)
    }

    fn name(&self) -> &'static str {
        (**self).name()
    }
}

/// Enumerates all `2^num_vars` assignments and returns every ground state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactSolver {
    pub cap: usize,
    pub max_ground_states: usize,
}

impl Default for ExactSolver {
    fn default() -> Self {
        ExactSolver { cap: DEFAULT_EXACT_CAP, max_ground_states: DEFAULT_MAX_GROUND_STATES }
    }
}

impl ExactSolver {
    pub fn with_cap(cap: usize) -> Self {
        ExactSolver { cap, ..Self::default() }
    }
}

impl Sampler for ExactSolver {
    fn sample(&self, qubo: &Qubo, _seed: u64) -> Result<SampleSet> {
        exact_solve_with(qubo, self)
    }

    fn name(&self) -> &'static str {
        "exact"
    }
}

/// Exhaustive solve with the default cap.
pub fn exact_solve(qubo: &Qubo) -> Result<SampleSet> {
    exact_solve_with(qubo, &ExactSolver::default())
}

/// Adjacency view: for each variable, `(neighbour, coefficient)`.
struct Neighbours {
    linear: Vec<f64>,
    adj: Vec<Vec<(usize, f64)>>,
}

impl Neighbours {
    fn new(qubo: &Qubo) -> Self {
        let mut adj = vec![Vec::new(); qubo.num_vars()];
        for (&(a, b), &c) in qubo.quadratic() {
            if c != 0.0 {
                adj[a].push((b, c));
                adj[b].push((a, c));
            }
        }
        Neighbours { linear: qubo.linear().to_vec(), adj }
    }
}

fn mask_config(mask: u64, nv: usize) -> Vec<bool> {
    (0..nv).map(|v| mask >> v & 1 == 1).collect()
}

struct ChunkResult {
    best: f64,
    candidates: Vec<(u64, f64)>,
    truncated: bool,
}

fn exact_solve_with(qubo: &Qubo, opts: &ExactSolver) -> Result<SampleSet> {
    let nv = qubo.num_vars();
    if nv > opts.cap || nv >= 63 {
        return Err(Error::TooLarge { what: "QUBO variable count", size: nv, cap: opts.cap.min(62) });
    }
    let nb = Neighbours::new(qubo);
    // Gray-code walks accumulate rounding, so keep anything close and
    // re-evaluate exactly at the end.
    let scale = qubo.max_abs_coeff().max(1.0) * (nv.max(1) as f64);
    let loose = 1e-7 * scale;
    let keep_cap = opts.max_ground_states;

    let top = nv.min(6);
    let low = nv - top;
    let chunks: Vec<ChunkResult> = (0..1u64 << top)
        .into_par_iter()
        .map(|chunk| {
            let mut mask = chunk << low;
            let mut config = mask_config(mask, nv);
            let mut field: Vec<f64> = (0..nv)
                .map(|v| nb.linear[v] + nb.adj[v].iter().filter(|(u, _)| config[*u]).map(|(_, c)| c).sum::<f64>())
                .collect();
            let mut energy = qubo.energy(&config);
            let mut best = energy;
            let mut candidates = vec![(mask, energy)];
            let mut truncated = false;
            for step in 1..1u64 << low {
                let v = step.trailing_zeros() as usize;
                let sign = if config[v] { -1.0 } else { 1.0 };
                energy += sign * field[v];
                config[v] = !config[v];
                mask ^= 1 << v;
                for &(u, c) in &nb.adj[v] {
                    field[u] += sign * c;
                }
                if energy < best - loose {
                    best = energy;
                    candidates.retain(|&(_, e)| e <= best + loose);
                    truncated = false;
                } else if energy < best {
                    best = energy;
                }
                if energy <= best + loose {
                    if candidates.len() < keep_cap {
                        candidates.push((mask, energy));
                    } else {
                        truncated = true;
                    }
                }
            }
            ChunkResult { best, candidates, truncated }
        })
        .collect();

    let global = chunks.iter().map(|c| c.best).fold(f64::INFINITY, f64::min);
    let mut truncated = false;
    let mut exact: Vec<(Vec<bool>, f64)> = Vec::new();
    for chunk in &chunks {
        if chunk.best <= global + loose {
            truncated |= chunk.truncated;
        }
        for &(mask, e) in &chunk.candidates {
            if e <= global + loose {
                let cfg = mask_config(mask, nv);
                let energy = qubo.energy(&cfg);
                exact.push((cfg, energy));
            }
        }
    }
    let min = exact.iter().map(|(_, e)| *e).fold(f64::INFINITY, f64::min);
    let mut counts = BTreeMap::new();
    for (cfg, e) in exact {
        if energy_eq(e, min) {
            if counts.len() < keep_cap {
                counts.insert(cfg, 1);
            } else {
                truncated = true;
            }
        }
    }
    let mut set = SampleSet::from_counts(qubo, counts, "exact", 1, None);
    set.truncated = truncated;
    Ok(set)
}

/// Simulated annealing settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaParams {
    pub reads: usize,
    pub sweeps: usize,
    /// Geometric β schedule endpoints; `None` derives them from the QUBO.
    pub beta_range: Option<(f64, f64)>,
    pub seed: u64,
}

impl Default for SaParams {
    fn default() -> Self {
        SaParams { reads: DEFAULT_READS, sweeps: DEFAULT_SWEEPS, beta_range: None, seed: 0 }
    }
}

impl SaParams {
    pub fn validate(&self) -> Result<()> {
        if self.reads == 0 || self.sweeps == 0 {
            return Err(invalid_arg("reads and sweeps must be at least 1"));
        }
        if let Some((lo, hi)) = self.beta_range {
            if !(lo > 0.0 && hi.is_finite() && lo < hi) {
                return Err(invalid_arg(format!("bad beta range ({lo}, {hi})")));
            }
        }
        Ok(())
    }

    /// `(0.1 / max|coeff|, 10 / min nonzero |coeff|)` unless set explicitly.
    pub fn beta_endpoints(&self, qubo: &Qubo) -> (f64, f64) {
        if let Some(range) = self.beta_range {
            return range;
        }
        let max = qubo.max_abs_coeff();
        let min = qubo.min_abs_coeff().unwrap_or(1.0);
        if max == 0.0 {
            (0.1, 10.0)
        } else {
            (0.1 / max, 10.0 / min)
        }
    }
}

pub fn geometric_schedule(beta_start: f64, beta_end: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![beta_end];
    }
    let (l0, l1) = (beta_start.ln(), beta_end.ln());
    let d = (l1 - l0) / (steps - 1) as f64;
    (0..steps).map(|s| (l0 + d * s as f64).exp()).collect()
}

/// Single-spin-flip Metropolis annealing sampler.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SimulatedAnnealing {
    pub params: SaParams,
}

impl SimulatedAnnealing {
    pub fn new(params: SaParams) -> Self {
        SimulatedAnnealing { params }
    }
}

impl Sampler for SimulatedAnnealing {
    fn sample(&self, qubo: &Qubo, seed: u64) -> Result<SampleSet> {
        sa_solve(qubo, &SaParams { seed, ..self.params })
    }

    fn name(&self) -> &'static str {
        "sa"
    }
}

/// Runs `reads` independent anneals from uniform random starts. Read `r`
/// draws from stream `r` of a ChaCha generator keyed by the seed, so the
/// result does not depend on how reads are scheduled across threads.
pub fn sa_solve(qubo: &Qubo, params: &SaParams) -> Result<SampleSet> {
    params.validate()?;
    let nv = qubo.num_vars();
    let nb = Neighbours::new(qubo);
    let (b0, b1) = params.beta_endpoints(qubo);
    let schedule = geometric_schedule(b0, b1, params.sweeps);

    let finals: Vec<Vec<bool>> = (0..params.reads)
        .into_par_iter()
        .map(|read| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(read as u64);
            anneal(&nb, nv, &schedule, &mut rng)
        })
        .collect();

    let mut counts: BTreeMap<Vec<bool>, usize> = BTreeMap::new();
    for cfg in finals {
        *counts.entry(cfg).or_default() += 1;
    }
    Ok(SampleSet::from_counts(qubo, counts, "sa", params.reads, Some(params.seed)))
}

fn anneal(nb: &Neighbours, nv: usize, schedule: &[f64], rng: &mut ChaCha8Rng) -> Vec<bool> {
    let mut x: Vec<bool> = (0..nv).map(|_| rng.gen::<bool>()).collect();
    let mut field: Vec<f64> = (0..nv)
        .map(|v| nb.linear[v] + nb.adj[v].iter().filter(|(u, _)| x[*u]).map(|(_, c)| c).sum::<f64>())
        .collect();
    for &beta in schedule {
        for v in 0..nv {
            let delta = if x[v] { -field[v] } else { field[v] };
            if delta <= 0.0 || rng.gen::<f64>() < (-beta * delta).exp() {
                let sign = if x[v] { -1.0 } else { 1.0 };
                x[v] = !x[v];
                for &(u, c) in &nb.adj[v] {
                    field[u] += sign * c;
                }
            }
        }
    }
    x
}

mod bitstring {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bits: &[bool], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&bits.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
        let s = String::deserialize(d)?;
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(serde::de::Error::custom(format!("bad bit `{other}`"))),
            })
            .collect()
    }
}
