//! Seeded dataset generators and fixed fixtures.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, Result};
use crate::ranking::{Dataset, ListKind, Ranking, WeightScheme};

pub const DEFAULT_VOTES: usize = 11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum GenMode {
    /// Independent uniform permutations.
    Synthetic,
    /// The identity cut into at least `min_sublists` blocks, each block
    /// shuffled in place.
    Simplified { min_sublists: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n: usize,
    pub votes: usize,
    pub seed: u64,
    pub mode: GenMode,
    /// Partial and k-top votes are complete votes truncated to a length
    /// drawn uniformly from `k_min..=n`.
    pub kind: ListKind,
    pub k_min: usize,
}

impl GenSpec {
    pub fn synthetic(n: usize, votes: usize, seed: u64) -> Self {
        GenSpec { n, votes, seed, mode: GenMode::Synthetic, kind: ListKind::Complete, k_min: 2 }
    }

    pub fn simplified(n: usize, votes: usize, min_sublists: usize, seed: u64) -> Self {
        GenSpec { mode: GenMode::Simplified { min_sublists }, ..Self::synthetic(n, votes, seed) }
    }

    pub fn with_kind(self, kind: ListKind, k_min: usize) -> Self {
        GenSpec { kind, k_min, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.votes == 0 {
            return Err(invalid_arg("need at least one candidate and one vote"));
        }
        if let GenMode::Simplified { min_sublists } = self.mode {
            if min_sublists < 3 || min_sublists > self.n {
                return Err(invalid_arg(format!(
                    "min_sublists must be in 3..={}, got {min_sublists}",
                    self.n
                )));
            }
        }
        if self.kind != ListKind::Complete && (self.k_min == 0 || self.k_min > self.n) {
            return Err(invalid_arg(format!("k_min must be in 1..={}, got {}", self.n, self.k_min)));
        }
        Ok(())
    }
}

/// Dispatches on the spec's mode.
pub fn generate(spec: &GenSpec) -> Result<Dataset> {
    match spec.mode {
        GenMode::Synthetic => gen_synthetic(spec),
        GenMode::Simplified { .. } => gen_simplified(spec),
    }
}

/// Votes drawn as independent Fisher-Yates shuffles of `0..n`.
pub fn gen_synthetic(spec: &GenSpec) -> Result<Dataset> {
    if spec.mode != GenMode::Synthetic {
        return Err(invalid_arg("gen_synthetic needs synthetic mode"));
    }
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let orders = (0..spec.votes)
        .map(|_| {
            let mut v: Vec<usize> = (0..spec.n).collect();
            v.shuffle(&mut rng);
            v
        })
        .collect();
    finish(spec, orders, &mut rng)
}

pub fn gen_simplified(spec: &GenSpec) -> Result<Dataset> {
    gen_simplified_with_cuts(spec).map(|(ds, _)| ds)
}

/// Simplified votes plus, per vote, the sorted cut positions: a cut at `p`
/// separates identity positions `p - 1` and `p`.
pub fn gen_simplified_with_cuts(spec: &GenSpec) -> Result<(Dataset, Vec<Vec<usize>>)> {
    let GenMode::Simplified { min_sublists } = spec.mode else {
        return Err(invalid_arg("gen_simplified needs simplified mode"));
    };
    spec.validate()?;
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut orders = Vec::with_capacity(spec.votes);
    let mut all_cuts = Vec::with_capacity(spec.votes);
    for _ in 0..spec.votes {
        let count = rng.gen_range(min_sublists - 1..=n - 1);
        let mut cuts: Vec<usize> = index::sample(&mut rng, n - 1, count).into_iter().map(|c| c + 1).collect();
        cuts.sort_unstable();
        let mut order: Vec<usize> = (0..n).collect();
        let bounds: Vec<usize> = std::iter::once(0).chain(cuts.iter().copied()).chain(std::iter::once(n)).collect();
        for w in bounds.windows(2) {
            order[w[0]..w[1]].shuffle(&mut rng);
        }
        orders.push(order);
        all_cuts.push(cuts);
    }
    Ok((finish(spec, orders, &mut rng)?, all_cuts))
}

fn finish(spec: &GenSpec, orders: Vec<Vec<usize>>, rng: &mut ChaCha8Rng) -> Result<Dataset> {
    let votes = orders
        .into_iter()
        .map(|mut order| {
            if spec.kind != ListKind::Complete {
                order.truncate(rng.gen_range(spec.k_min..=spec.n));
            }
            Ranking::new(order, spec.kind, 1.0)
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(spec.n, votes, WeightScheme::Uniform)
}

/// Replaces every list weight by a multiple of 1/4 in `[0.25, 3]`.
pub fn with_random_list_weights(ds: &Dataset, seed: u64) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let votes = ds
        .votes()
        .iter()
        .map(|v| v.clone().with_weight(rng.gen_range(1..=12) as f64 / 4.0))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(ds.n(), votes, ds.pair_weight())
}

/// Five candidates, eleven votes, on which no KwikSort run reaches the
/// Kemeny optimum.
pub fn kwiksort_trap_dataset() -> Dataset {
    Dataset::from_orders(
        5,
        &[
            &[0, 2, 1, 3, 4],
            &[2, 0, 4, 1, 3],
            &[0, 1, 4, 2, 3],
            &[3, 0, 2, 1, 4],
            &[2, 1, 3, 0, 4],
            &[2, 3, 0, 1, 4],
            &[0, 1, 2, 4, 3],
            &[3, 4, 0, 2, 1],
            &[1, 4, 3, 0, 2],
            &[2, 3, 0, 4, 1],
            &[4, 3, 2, 0, 1],
        ],
    )
    .expect("fixture is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_is_deterministic() {
        let spec = GenSpec::synthetic(4, 3, 17);
        let a = gen_synthetic(&spec).unwrap();
        assert_eq!(a, gen_synthetic(&spec).unwrap());
        assert_eq!(a.votes().len(), 3);
        assert_ne!(a, gen_synthetic(&GenSpec { seed: 18, ..spec }).unwrap());
    }

    #[test]
    fn single_candidate() {
        let ds = gen_synthetic(&GenSpec::synthetic(1, 5, 0)).unwrap();
        assert!(ds.votes().iter().all(|v| v.order() == [0]));
    }

    #[test]
    fn simplified_forced_identity() {
        let ds = gen_simplified(&GenSpec::simplified(5, 4, 5, 3)).unwrap();
        assert!(ds.votes().iter().all(|v| v.order() == [0, 1, 2, 3, 4]));
        assert!(gen_simplified(&GenSpec::simplified(5, 4, 6, 3)).is_err());
        assert!(gen_simplified(&GenSpec::simplified(5, 4, 2, 3)).is_err());
        assert!(gen_synthetic(&GenSpec::simplified(5, 4, 3, 3)).is_err());
    }

    #[test]
    fn simplified_respects_blocks() {
        let (ds, cuts) = gen_simplified_with_cuts(&GenSpec::simplified(9, 20, 3, 8)).unwrap();
        for (vote, cuts) in ds.votes().iter().zip(&cuts) {
            assert!(cuts.len() >= 2);
            let block = |c: usize| cuts.iter().filter(|&&p| p <= c).count();
            let blocks: Vec<usize> = vote.order().iter().map(|&c| block(c)).collect();
            assert!(blocks.windows(2).all(|w| w[0] <= w[1]), "{vote} / {cuts:?}");
        }
    }

    #[test]
    fn truncated_kinds() {
        let spec = GenSpec::synthetic(6, 10, 2).with_kind(ListKind::Ktop, 3);
        let ds = gen_synthetic(&spec).unwrap();
        assert_eq!(ds.kind(), ListKind::Ktop);
        assert!(ds.votes().iter().all(|v| (3..=6).contains(&v.len())));
        assert!(gen_synthetic(&spec.with_kind(ListKind::Partial, 7)).is_err());
    }

    #[test]
    fn list_weights_are_quarters() {
        let ds = with_random_list_weights(&gen_synthetic(&GenSpec::synthetic(4, 30, 1)).unwrap(), 5).unwrap();
        for v in ds.votes() {
            let q = v.weight() * 4.0;
            assert!(q.fract() == 0.0 && (1.0..=12.0).contains(&q));
        }
    }

    #[test]
    fn kwiksort_trap_shape() {
        let ds = kwiksort_trap_dataset();
        assert_eq!((ds.n(), ds.votes().len()), (5, 11));
        assert_eq!(ds.votes()[0].order(), &[0, 2, 1, 3, 4]);
        assert_eq!(ds.votes()[10].order(), &[4, 3, 2, 0, 1]);
    }
}
