//! Transitivity violations (3-cycles) in pair matrices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, Error, Result};
use crate::pairs::{pair_index_unchecked, triples, Pair};
use crate::ranking::{BiasMatrix, UpperTriBits};

/// Which cycle criterion to apply to the majority matrix, and which
/// minimal penalty a fresh cycle starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    /// Odd when the total vote weight is an odd integer, even otherwise.
    pub fn of_total_weight(total: f64) -> Parity {
        if total.fract() == 0.0 && (total as i64) % 2 != 0 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

impl std::str::FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "odd" => Ok(Parity::Odd),
            "even" => Ok(Parity::Even),
            other => Err(invalid_arg(format!("unknown parity `{other}`"))),
        }
    }
}

/// A triple `(i, j, k)` with `i < j < k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cycle(usize, usize, usize);

impl Cycle {
    pub fn new(i: usize, j: usize, k: usize) -> Result<Self> {
        if i < j && j < k {
            Ok(Cycle(i, j, k))
        } else {
            Err(invalid_arg(format!("cycle ({i}, {j}, {k}) is not strictly increasing")))
        }
    }

    pub fn i(&self) -> usize {
        self.0
    }

    pub fn j(&self) -> usize {
        self.1
    }

    pub fn k(&self) -> usize {
        self.2
    }

    /// The three pairs `(i,j)`, `(j,k)`, `(i,k)`.
    pub fn pairs(&self) -> [Pair; 3] {
        [(self.0, self.1), (self.1, self.2), (self.0, self.2)]
    }

    pub fn contains_pair(&self, pair: Pair) -> bool {
        self.pairs().contains(&pair)
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0, self.1, self.2)
    }
}

pub type CycleSet = BTreeSet<Cycle>;

/// Heaviside of `-b` with Θ(0) = 1/2: `ω_ij = 1` when `i` wins the majority.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmegaMatrix {
    n: usize,
    omega: Vec<f64>,
}

impl OmegaMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.omega[pair_index_unchecked(i, j, self.n)]
    }

    pub fn values(&self) -> &[f64] {
        &self.omega
    }
}

pub fn omega(b: &BiasMatrix) -> OmegaMatrix {
    let omega = b
        .values()
        .iter()
        .map(|&x| {
            if x < 0.0 {
                1.0
            } else if x > 0.0 {
                0.0
            } else {
                0.5
            }
        })
        .collect();
    OmegaMatrix { n: b.n(), omega }
}

/// Cycles implied by the majority matrix alone.
pub fn initial_cycles(om: &OmegaMatrix, parity: Parity) -> CycleSet {
    triples(om.n())
        .filter(|&(i, j, k)| {
            let (ij, ik, jk) = (om.get(i, j), om.get(i, k), om.get(j, k));
            match parity {
                Parity::Odd => {
                    (ij == 0.0 && ik == 1.0 && jk == 0.0) || (ij == 1.0 && ik == 0.0 && jk == 1.0)
                }
                Parity::Even => {
                    (ij != 1.0 && ik != 0.0 && jk != 1.0) || (ij != 0.0 && ik != 1.0 && jk != 0.0)
                }
            }
        })
        .map(|(i, j, k)| Cycle(i, j, k))
        .collect()
}

/// Whether the three bits of a triple are non-transitive.
#[inline]
pub fn is_cyclic(x_ij: bool, x_jk: bool, x_ik: bool) -> bool {
    x_ij == x_jk && x_ik != x_ij
}

/// All triples whose bits are non-transitive, in either direction.
pub fn detect_cycles(x: &UpperTriBits) -> Result<CycleSet> {
    let n = x.n();
    let bits = x.to_bools()?;
    Ok(detect_cycles_in(&bits, n))
}

pub(crate) fn detect_cycles_in(bits: &[bool], n: usize) -> CycleSet {
    triples(n)
        .filter(|&(i, j, k)| {
            let ij = bits[pair_index_unchecked(i, j, n)];
            let jk = bits[pair_index_unchecked(j, k, n)];
            let ik = bits[pair_index_unchecked(i, k, n)];
            is_cyclic(ij, jk, ik)
        })
        .map(|(i, j, k)| Cycle(i, j, k))
        .collect()
}

/// One removal performed by [`prune_for_embedding`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PruneStep {
    pub removed: Cycle,
    /// For each of the cycle's pairs, how many other retained cycles used it
    /// at the moment of removal.
    pub coverage: [usize; 3],
}

/// Drops cycles whose three pairs each appear in at least `k` other
/// retained cycles. Scans lexicographically and repeats until nothing
/// changes.
pub fn prune_for_embedding(cycles: &CycleSet, k: usize) -> Result<CycleSet> {
    prune_with_log(cycles, k).map(|(kept, _)| kept)
}

/// [`prune_for_embedding`] plus the ordered removal log.
pub fn prune_with_log(cycles: &CycleSet, k: usize) -> Result<(CycleSet, Vec<PruneStep>)> {
    if k == 0 {
        return Err(invalid_arg("prune threshold k must be at least 1"));
    }
    let mut usage: BTreeMap<Pair, usize> = BTreeMap::new();
    for c in cycles {
        for p in c.pairs() {
            *usage.entry(p).or_default() += 1;
        }
    }
    let mut kept = cycles.clone();
    let mut log = Vec::new();
    loop {
        let mut changed = false;
        let snapshot: Vec<Cycle> = kept.iter().copied().collect();
        for c in snapshot {
            let coverage = c.pairs().map(|p| usage[&p] - 1);
            if coverage.iter().all(|&other| other >= k) {
                kept.remove(&c);
                for p in c.pairs() {
                    *usage.get_mut(&p).unwrap() -= 1;
                }
                log.push(PruneStep { removed: c, coverage });
                changed = true;
            }
        }
        if !changed {
            return Ok((kept, log));
        }
    }
}

/// Cycles present in every run.
pub fn intersect_runs(sets: &[CycleSet]) -> Result<CycleSet> {
    let (first, rest) = sets
        .split_first()
        .ok_or_else(|| invalid_arg("intersect_runs needs at least one cycle set"))?;
    Ok(first.iter().filter(|c| rest.iter().all(|s| s.contains(c))).copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranking::{bias_of, build_comparison, represent, Dataset, Ranking};

    fn om(n: usize, values: &[f64]) -> OmegaMatrix {
        OmegaMatrix { n, omega: values.to_vec() }
    }

    fn set(cs: &[(usize, usize, usize)]) -> CycleSet {
        cs.iter().map(|&(i, j, k)| Cycle::new(i, j, k).unwrap()).collect()
    }

    #[test]
    fn omega_examples() {
        let d3 = Dataset::from_orders(3, &[&[0, 1, 2], &[1, 2, 0], &[2, 0, 1]]).unwrap();
        let o = omega(&bias_of(&build_comparison(&d3)));
        assert_eq!(o.values(), &[1.0, 0.0, 1.0]);
        let b = BiasMatrix::from_pairs(3, vec![-3.0, -3.0, -3.0]).unwrap();
        assert_eq!(omega(&b).values(), &[1.0, 1.0, 1.0]);
        let b = BiasMatrix::from_pairs(2, vec![0.0]).unwrap();
        assert_eq!(omega(&b).values(), &[0.5]);
    }

    #[test]
    fn initial_cycle_examples() {
        assert_eq!(initial_cycles(&om(3, &[1.0, 0.0, 1.0]), Parity::Odd), set(&[(0, 1, 2)]));
        assert!(initial_cycles(&om(3, &[1.0, 1.0, 1.0]), Parity::Odd).is_empty());
        let half = om(3, &[0.5, 1.0, 0.5]);
        assert_eq!(initial_cycles(&half, Parity::Even), set(&[(0, 1, 2)]));
        assert!(initial_cycles(&half, Parity::Odd).is_empty());
    }

    #[test]
    fn detect_examples() {
        let x = UpperTriBits::from_bits(3, &[true, false, true]).unwrap();
        assert_eq!(detect_cycles(&x).unwrap(), set(&[(0, 1, 2)]));
        let mirrored = UpperTriBits::from_bits(3, &[false, true, false]).unwrap();
        assert_eq!(detect_cycles(&mirrored).unwrap(), set(&[(0, 1, 2)]));
        let ident = represent(&Ranking::complete(vec![0, 1, 2]).unwrap()).unwrap();
        assert!(detect_cycles(&ident).unwrap().is_empty());
        let rev = represent(&Ranking::complete(vec![3, 2, 1, 0]).unwrap()).unwrap();
        assert!(detect_cycles(&rev).unwrap().is_empty());
        assert!(detect_cycles(&UpperTriBits::undecided(3)).is_err());
    }

    #[test]
    fn cyclic_patterns() {
        let mut hits = Vec::new();
        for m in 0..8u8 {
            let (ij, jk, ik) = (m & 1 != 0, m & 2 != 0, m & 4 != 0);
            if is_cyclic(ij, jk, ik) {
                hits.push((ij, jk, ik));
            }
        }
        assert_eq!(hits, vec![(true, true, false), (false, false, true)]);
    }

    #[test]
    fn prune_examples() {
        let one = set(&[(0, 1, 2)]);
        assert_eq!(prune_for_embedding(&one, 1).unwrap(), one);
        let many = set(&[(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]);
        assert_eq!(prune_for_embedding(&many, many.len()).unwrap(), many);
        assert!(prune_for_embedding(&many, 0).is_err());
        // Every pair of K4 is used by exactly two triples.
        let (kept, log) = prune_with_log(&many, 1).unwrap();
        assert_eq!(log.len(), 1);
        assert_eq!(log[0].removed, Cycle(0, 1, 2));
        assert_eq!(kept.len(), 3);
    }

    #[test]
    fn intersect_examples() {
        let s = set(&[(0, 1, 2)]);
        assert_eq!(intersect_runs(&[s.clone()]).unwrap(), s);
        assert!(intersect_runs(&[s.clone(), CycleSet::new()]).unwrap().is_empty());
        let two = set(&[(0, 1, 2), (0, 1, 3)]);
        assert_eq!(intersect_runs(&[two, s.clone()]).unwrap(), s);
        assert!(intersect_runs(&[]).is_err());
    }

    #[test]
    fn parity_of_weight() {
        assert_eq!(Parity::of_total_weight(11.0), Parity::Odd);
        assert_eq!(Parity::of_total_weight(10.0), Parity::Even);
        assert_eq!(Parity::of_total_weight(10.5), Parity::Even);
    }
}
