//! Classical references: the brute-force Kemeny oracle and KwikSort.

use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ranking::{Dataset, KtEvaluator, PairMatrix, Ranking, WeightScheme};

pub const DEFAULT_BRUTE_FORCE_CAP: usize = 9;
pub const DEFAULT_REACHABLE_CAP: usize = 8;

/// Minimum cumulative distance and every ranking attaining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub min_kt: f64,
    /// Lexicographically sorted.
    pub optima: Vec<Ranking>,
}

impl OracleResult {
    pub fn is_optimal(&self, r: &Ranking) -> bool {
        self.optima.iter().any(|o| o.order() == r.order())
    }
}

/// Enumerates all `n!` rankings under the dataset's own pair weights.
pub fn brute_force(ds: &Dataset) -> Result<OracleResult> {
    brute_force_with(ds, &ds.pair_weight(), DEFAULT_BRUTE_FORCE_CAP)
}

/// [`brute_force`] with an explicit pair-weight scheme and size cap.
pub fn brute_force_with(ds: &Dataset, scheme: &WeightScheme, cap: usize) -> Result<OracleResult> {
    let n = ds.n();
    if n > cap {
        return Err(Error::TooLarge { what: "candidate count", size: n, cap });
    }
    let eval = KtEvaluator::new(ds, scheme)?;
    // One chunk per leading candidate; each walks its (n-1)! suffixes in
    // lexicographic order.
    let chunks: Vec<(f64, Vec<Vec<usize>>)> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut order: Vec<usize> = std::iter::once(first).chain((0..n).filter(|&c| c != first)).collect();
            let mut best = f64::INFINITY;
            let mut hits = Vec::new();
            loop {
                let cost = eval.cost_of_order(&order);
                if cost < best - tol(best) {
                    best = cost;
                    hits.clear();
                }
                if (cost - best).abs() <= tol(best) {
                    hits.push(order.clone());
                }
                if !next_permutation(&mut order[1..]) {
                    break;
                }
            }
            (best, hits)
        })
        .collect();
    let min = chunks.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    let mut optima = Vec::new();
    for (best, hits) in chunks {
        if (best - min).abs() <= tol(min) {
            optima.extend(hits);
        }
    }
    optima.sort();
    Ok(OracleResult {
        min_kt: min,
        optima: optima.into_iter().map(Ranking::complete).collect::<Result<_>>()?,
    })
}

fn tol(x: f64) -> f64 {
    if x.is_finite() {
        1e-9 * x.abs().max(1.0)
    } else {
        0.0
    }
}

/// Rearranges into the next lexicographic permutation; false after the last.
fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let Some(i) = (0..v.len() - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).unwrap();
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// Randomized pivot partitioning: uniform pivot, majority decides the side,
/// exact ties go to a fair coin.
pub fn kwiksort(pm: &PairMatrix, seed: u64) -> Ranking {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rng = std::cell::RefCell::new(&mut rng);
    kwiksort_by(
        pm,
        |items| items[rng.borrow_mut().gen_range(0..items.len())],
        |_, _| rng.borrow_mut().gen_bool(0.5),
    )
}

/// KwikSort with caller-chosen pivots. `pivot` picks one candidate from the
/// current sublist; `tie(e, p)` returns true to put `e` before pivot `p`.
pub fn kwiksort_by(
    pm: &PairMatrix,
    mut pivot: impl FnMut(&[usize]) -> usize,
    mut tie: impl FnMut(usize, usize) -> bool,
) -> Ranking {
    fn go(
        pm: &PairMatrix,
        items: Vec<usize>,
        pivot: &mut dyn FnMut(&[usize]) -> usize,
        tie: &mut dyn FnMut(usize, usize) -> bool,
        out: &mut Vec<usize>,
    ) {
        if items.len() <= 1 {
            out.extend(items);
            return;
        }
        let p = pivot(&items);
        let (mut left, mut right) = (Vec::new(), Vec::new());
        for &e in items.iter().filter(|&&e| e != p) {
            let (ep, pe) = (pm.get(e, p), pm.get(p, e));
            let before = if ep != pe { ep > pe } else { tie(e, p) };
            if before {
                left.push(e);
            } else {
                right.push(e);
            }
        }
        go(pm, left, pivot, tie, out);
        out.push(p);
        go(pm, right, pivot, tie, out);
    }
    let mut out = Vec::with_capacity(pm.n());
    go(pm, (0..pm.n()).collect(), &mut pivot, &mut tie, &mut out);
    Ranking::complete(out).expect("partitioning preserves a permutation")
}

/// Every ranking KwikSort can output, over all pivot choices and both
/// resolutions of each tie. Lexicographically sorted.
pub fn kwiksort_reachable(pm: &PairMatrix) -> Result<Vec<Ranking>> {
    kwiksort_reachable_with_cap(pm, DEFAULT_REACHABLE_CAP)
}

pub fn kwiksort_reachable_with_cap(pm: &PairMatrix, cap: usize) -> Result<Vec<Ranking>> {
    let n = pm.n();
    if n > cap || n > 20 {
        return Err(Error::TooLarge { what: "candidate count", size: n, cap: cap.min(20) });
    }
    let mut memo: HashMap<u32, BTreeSet<Vec<usize>>> = HashMap::new();
    let all = reach(pm, (1u32 << n) - 1, &mut memo);
    all.into_iter().map(Ranking::complete).collect()
}

fn reach(pm: &PairMatrix, set: u32, memo: &mut HashMap<u32, BTreeSet<Vec<usize>>>) -> BTreeSet<Vec<usize>> {
    if set.count_ones() <= 1 {
        let v: Vec<usize> = (0..32).filter(|&c| set >> c & 1 == 1).collect();
        return BTreeSet::from([v]);
    }
    if let Some(hit) = memo.get(&set) {
        return hit.clone();
    }
    let members: Vec<usize> = (0..32).filter(|&c| set >> c & 1 == 1).collect();
    let mut out = BTreeSet::new();
    for &p in &members {
        let (mut left, mut ties) = (0u32, Vec::new());
        for &e in members.iter().filter(|&&e| e != p) {
            let (ep, pe) = (pm.get(e, p), pm.get(p, e));
            if ep > pe {
                left |= 1 << e;
            } else if ep == pe {
                ties.push(e);
            }
        }
        for choice in 0..1u32 << ties.len() {
            let mut l = left;
            for (t, &e) in ties.iter().enumerate() {
                if choice >> t & 1 == 1 {
                    l |= 1 << e;
                }
            }
            let r = set & !l & !(1 << p);
            let lefts = reach(pm, l, memo);
            let rights = reach(pm, r, memo);
            for a in &lefts {
                for b in &rights {
                    let mut v = a.clone();
                    v.push(p);
                    v.extend(b);
                    out.insert(v);
                }
            }
        }
    }
    memo.insert(set, out.clone());
    out
}
