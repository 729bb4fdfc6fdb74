//! Independent reference implementations used as test oracles. Nothing here
//! calls into the library's own distance or enumeration code.

#![allow(dead_code)]

use kemeny_qa::{Dataset, ListKind, WeightScheme};

/// All permutations of `0..n` in lexicographic order, by recursion.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, left: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for idx in 0..left.len() {
            let c = left.remove(idx);
            prefix.push(c);
            go(prefix, left, out);
            prefix.pop();
            left.insert(idx, c);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (0..n).collect(), &mut out);
    out
}

pub fn position_of(order: &[usize], c: usize) -> Option<usize> {
    order.iter().position(|&x| x == c)
}

/// Pairs ordered differently, counted straight from the definition.
pub fn kt(a: &[usize], b: &[usize]) -> u64 {
    let n = a.len();
    let mut d = 0;
    for x in 0..n {
        for y in x + 1..n {
            let in_a = position_of(a, x) < position_of(a, y);
            let in_b = position_of(b, x) < position_of(b, y);
            if in_a != in_b {
                d += 1;
            }
        }
    }
    d
}

fn alpha(scheme: &WeightScheme, pa: usize, pb: usize) -> f64 {
    match *scheme {
        WeightScheme::Uniform => 1.0,
        WeightScheme::Position { p } => 1.0 / ((pa + pb) as f64).powf(p),
        WeightScheme::Distance => pa.abs_diff(pb) as f64,
    }
}

/// Generalized distance from `order` to one vote. Partial votes only speak
/// about pairs they list; k-top votes also rank listed above unlisted, with
/// unlisted candidates sharing position `len + 1`.
pub fn vote_distance(order: &[usize], vote: &[usize], kind: ListKind, beta: f64, scheme: &WeightScheme) -> f64 {
    let n = order.len();
    let mut d = 0.0;
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            // Count each disagreement once: when the vote prefers a to b.
            let (pa, pb) = (position_of(vote, a), position_of(vote, b));
            let vote_prefers_a = match (pa, pb, kind) {
                (Some(x), Some(y), _) => x < y,
                (Some(_), None, ListKind::Ktop) => true,
                _ => false,
            };
            if vote_prefers_a && position_of(order, b) < position_of(order, a) {
                let tail = vote.len() + 1;
                d += beta * alpha(scheme, pa.map_or(tail, |p| p + 1), pb.map_or(tail, |p| p + 1));
            }
        }
    }
    d
}

pub fn total_distance(ds: &Dataset, order: &[usize]) -> f64 {
    ds.votes()
        .iter()
        .map(|v| vote_distance(order, v.order(), v.kind(), v.weight(), &ds.pair_weight()))
        .sum()
}

/// Minimum total distance and all minimizers, scanning every permutation.
pub fn kemeny_oracle(ds: &Dataset) -> (f64, Vec<Vec<usize>>) {
    let mut best = f64::INFINITY;
    let mut arg = Vec::new();
    for p in permutations(ds.n()) {
        let d = total_distance(ds, &p);
        if arg.is_empty() || d < best - 1e-9 * best.abs().max(1.0) {
            best = d;
            arg.clear();
            arg.push(p);
        } else if (d - best).abs() <= 1e-9 * best.abs().max(1.0) {
            arg.push(p);
        }
    }
    (best, arg)
}

/// Transitivity of three pair bits read as "lower index first".
pub fn transitive(x_ij: bool, x_jk: bool, x_ik: bool) -> bool {
    // Some order of i, j, k must agree with all three bits.
    permutations(3).iter().any(|p| {
        let before = |a: usize, b: usize| position_of(p, a) < position_of(p, b);
        before(0, 1) == x_ij && before(1, 2) == x_jk && before(0, 2) == x_ik
    })
}

/// Tiny deterministic generator so fixtures do not depend on library RNG use.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    pub fn shuffled(&mut self, n: usize) -> Vec<usize> {
        let mut v: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            v.swap(i, self.below(i + 1));
        }
        v
    }
}

/// `votes` uniform permutations of `0..n` from an independent generator.
pub fn random_dataset(n: usize, votes: usize, seed: u64) -> Dataset {
    let mut rng = SplitMix(seed);
    let orders: Vec<Vec<usize>> = (0..votes).map(|_| rng.shuffled(n)).collect();
    let refs: Vec<&[usize]> = orders.iter().map(Vec::as_slice).collect();
    Dataset::from_orders(n, &refs).unwrap()
}
