//! QUBO encodings of the ranking problem.
//!
//! Pair variables follow [`pair_index`](crate::pairs::pair_index). A cycle
//! `(i, j, k)` is forbidden by the polynomial
//!
//! ```text
//! c_ijk = x_ik + x_ij x_jk - x_ij x_ik - x_jk x_ik
//! ```
//!
//! which is 1 on the two non-transitive assignments and 0 elsewhere.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cycles::{Cycle, Parity};
use crate::error::{invalid_arg, Error, Result};
use crate::pairs::{num_pairs, pair_index_unchecked, pairs, triples, Pair};
use crate::ranking::{BiasMatrix, PairMatrix, Ranking, UpperTriBits};

pub use crate::pairs::pair_index;

/// Default margin added on top of a bias bound.
pub const DEFAULT_EPSILON: f64 = 0.5;

/// Sparse quadratic objective over binary variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Qubo {
    num_vars: usize,
    linear: Vec<f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

impl Qubo {
    pub fn new(num_vars: usize) -> Self {
        Qubo { num_vars, linear: vec![0.0; num_vars], quadratic: BTreeMap::new(), offset: 0.0 }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.quadratic
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn add_linear(&mut self, var: usize, coeff: f64) {
        self.linear[var] += coeff;
    }

    /// Adds `coeff * x_a * x_b`. A self-pair folds into the linear term.
    pub fn add_quadratic(&mut self, a: usize, b: usize, coeff: f64) {
        if a == b {
            self.add_linear(a, coeff);
            return;
        }
        let key = if a < b { (a, b) } else { (b, a) };
        *self.quadratic.entry(key).or_insert(0.0) += coeff;
    }

    pub fn add_offset(&mut self, value: f64) {
        self.offset += value;
    }

    /// Objective value of a full assignment.
    pub fn energy(&self, config: &[bool]) -> f64 {
        debug_assert_eq!(config.len(), self.num_vars);
        let mut e = self.offset;
        for (v, &c) in self.linear.iter().enumerate() {
            if config[v] {
                e += c;
            }
        }
        for (&(a, b), &c) in &self.quadratic {
            if config[a] && config[b] {
                e += c;
            }
        }
        e
    }

    /// Largest coefficient magnitude, linear or quadratic.
    pub fn max_abs_coeff(&self) -> f64 {
        self.linear
            .iter()
            .chain(self.quadratic.values())
            .fold(0.0, |m, &c| m.max(c.abs()))
    }

    /// Smallest nonzero coefficient magnitude.
    pub fn min_abs_coeff(&self) -> Option<f64> {
        self.linear
            .iter()
            .chain(self.quadratic.values())
            .map(|c| c.abs())
            .filter(|&c| c > 0.0)
            .min_by(f64::total_cmp)
    }

    /// Text dump: `# vars: N offset: F` then `i j coeff` lines, `i == j`
    /// for linear terms.
    pub fn to_dump(&self) -> String {
        let mut out = format!("# vars: {} offset: {}\n", self.num_vars, self.offset);
        for (v, &c) in self.linear.iter().enumerate() {
            if c != 0.0 {
                let _ = writeln!(out, "{v} {v} {c}");
            }
        }
        for (&(a, b), &c) in &self.quadratic {
            if c != 0.0 {
                let _ = writeln!(out, "{a} {b} {c}");
            }
        }
        out
    }

    pub fn from_dump(text: &str) -> Result<Qubo> {
        let mut qubo: Option<Qubo> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let err = |msg: &str| Error::Parse { line: lineno + 1, msg: msg.to_string() };
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('#') {
                let mut toks = header.split_whitespace();
                if toks.next() == Some("vars:") {
                    let n = toks.next().and_then(|t| t.parse().ok()).ok_or_else(|| err("bad vars"))?;
                    let mut q = Qubo::new(n);
                    if toks.next() == Some("offset:") {
                        q.offset =
                            toks.next().and_then(|t| t.parse().ok()).ok_or_else(|| err("bad offset"))?;
                    }
                    qubo = Some(q);
                }
                continue;
            }
            let q = qubo.as_mut().ok_or_else(|| err("term before `# vars:` header"))?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            let [a, b, c] = toks[..] else {
                return Err(err("expected `i j coeff`"));
            };
            let a: usize = a.parse().map_err(|_| err("bad index"))?;
            let b: usize = b.parse().map_err(|_| err("bad index"))?;
            let c: f64 = c.parse().map_err(|_| err("bad coefficient"))?;
            if a >= q.num_vars || b >= q.num_vars {
                return Err(err("variable index out of range"));
            }
            q.add_quadratic(a, b, c);
        }
        qubo.ok_or_else(|| Error::Parse { line: 0, msg: "missing `# vars:` header".into() })
    }
}

/// Penalty coefficient per penalized cycle.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<LedgerEntry>", from = "Vec<LedgerEntry>")]
pub struct PenaltyLedger {
    entries: BTreeMap<Cycle, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct LedgerEntry {
    cycle: [usize; 3],
    penalty: f64,
}

impl From<PenaltyLedger> for Vec<LedgerEntry> {
    fn from(l: PenaltyLedger) -> Self {
        l.entries
            .into_iter()
            .map(|(c, p)| LedgerEntry { cycle: [c.i(), c.j(), c.k()], penalty: p })
            .collect()
    }
}

impl From<Vec<LedgerEntry>> for PenaltyLedger {
    fn from(v: Vec<LedgerEntry>) -> Self {
        let entries = v
            .into_iter()
            .filter_map(|e| Cycle::new(e.cycle[0], e.cycle[1], e.cycle[2]).ok().map(|c| (c, e.penalty)))
            .collect();
        PenaltyLedger { entries }
    }
}

impl PenaltyLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Uniform penalty on every given cycle.
    pub fn uniform(cycles: impl IntoIterator<Item = Cycle>, penalty: f64) -> Result<Self> {
        let mut l = Self::new();
        for c in cycles {
            l.insert(c, penalty)?;
        }
        Ok(l)
    }

    pub fn insert(&mut self, cycle: Cycle, penalty: f64) -> Result<()> {
        if !(penalty.is_finite() && penalty > 0.0) {
            return Err(invalid_arg(format!("cycle penalty must be positive, got {penalty}")));
        }
        self.entries.insert(cycle, penalty);
        Ok(())
    }

    /// Raises an existing entry by `step`; returns the new value.
    pub fn bump(&mut self, cycle: Cycle, step: f64) -> Option<f64> {
        self.entries.get_mut(&cycle).map(|p| {
            *p += step;
            *p
        })
    }

    pub fn get(&self, cycle: &Cycle) -> Option<f64> {
        self.entries.get(cycle).copied()
    }

    pub fn contains(&self, cycle: &Cycle) -> bool {
        self.entries.contains_key(cycle)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Cycle, &f64)> {
        self.entries.iter()
    }

    pub fn cycles(&self) -> impl Iterator<Item = &Cycle> {
        self.entries.keys()
    }

    /// Whether some penalized cycle uses the pair.
    pub fn touches_pair(&self, pair: Pair) -> bool {
        self.entries.keys().any(|c| c.contains_pair(pair))
    }

    /// All pairs used by penalized cycles.
    pub fn pairs(&self) -> BTreeSet<Pair> {
        self.entries.keys().flat_map(|c| c.pairs()).collect()
    }
}

/// Penalty for a uniform cycle term: odd parity uses
/// `min(max|b|, total - 2) + ε`, even parity `min(max|b|, total) + ε`.
pub fn select_penalty(b: &BiasMatrix, total_weight: f64, parity: Parity, epsilon: f64) -> Result<f64> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(invalid_arg(format!("epsilon must be positive, got {epsilon}")));
    }
    let bound = match parity {
        Parity::Odd => total_weight - 2.0,
        Parity::Even => total_weight,
    };
    Ok(b.max_abs().min(bound).max(0.0) + epsilon)
}

fn add_cycle_term(q: &mut Qubo, ij: usize, jk: usize, ik: usize, penalty: f64) {
    q.add_linear(ik, penalty);
    q.add_quadratic(ij, jk, penalty);
    q.add_quadratic(ij, ik, -penalty);
    q.add_quadratic(jk, ik, -penalty);
}

fn linear_part(b: &BiasMatrix) -> Qubo {
    let mut q = Qubo::new(num_pairs(b.n()));
    for (v, &bias) in b.values().iter().enumerate() {
        q.add_linear(v, bias);
    }
    q
}

/// Bias terms plus a uniform penalty `P` on every triple.
pub fn build_base_qubo(b: &BiasMatrix, penalty: f64) -> Result<Qubo> {
    if !(penalty.is_finite() && penalty > 0.0) {
        return Err(invalid_arg(format!("penalty must be positive, got {penalty}")));
    }
    let n = b.n();
    let mut q = linear_part(b);
    for (i, j, k) in triples(n) {
        add_cycle_term(
            &mut q,
            pair_index_unchecked(i, j, n),
            pair_index_unchecked(j, k, n),
            pair_index_unchecked(i, k, n),
            penalty,
        );
    }
    Ok(q)
}

/// Bias terms plus a per-cycle penalty for the ledger's cycles only.
pub fn build_iterative_qubo(b: &BiasMatrix, ledger: &PenaltyLedger) -> Result<Qubo> {
    let n = b.n();
    let mut q = linear_part(b);
    for (c, &p) in ledger.iter() {
        if c.k() >= n {
            return Err(invalid_arg(format!("cycle {c} exceeds n = {n}")));
        }
        add_cycle_term(
            &mut q,
            pair_index_unchecked(c.i(), c.j(), n),
            pair_index_unchecked(c.j(), c.k(), n),
            pair_index_unchecked(c.i(), c.k(), n),
            p,
        );
    }
    Ok(q)
}

/// A QUBO over the pairs left after removing some, densely re-indexed.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedQubo {
    pub qubo: Qubo,
    n: usize,
    /// Dense variable -> pair.
    vars: Vec<Pair>,
}

impl ReducedQubo {
    pub fn vars(&self) -> &[Pair] {
        &self.vars
    }

    /// Lifts a reduced assignment to a full matrix; removed pairs stay
    /// undecided.
    pub fn expand(&self, config: &[bool]) -> UpperTriBits {
        let mut x = UpperTriBits::undecided(self.n);
        for (&(i, j), &bit) in self.vars.iter().zip(config) {
            x.set(i, j, Some(bit));
        }
        x
    }
}

/// Drops removed pairs and every term that mentions them. Removed pairs
/// may not belong to a penalized cycle.
pub fn build_pair_removal_qubo(
    b: &BiasMatrix,
    ledger: &PenaltyLedger,
    removed: &BTreeSet<Pair>,
) -> Result<ReducedQubo> {
    let n = b.n();
    for &p in removed {
        if p.0 >= p.1 || p.1 >= n {
            return Err(invalid_arg(format!("removed pair {p:?} is not a pair below n = {n}")));
        }
        if let Some(c) = ledger.cycles().find(|c| c.contains_pair(p)) {
            return Err(invalid_arg(format!("pair {p:?} belongs to penalized cycle {c}")));
        }
    }
    let vars: Vec<Pair> = pairs(n).filter(|p| !removed.contains(p)).collect();
    let mut dense = vec![usize::MAX; num_pairs(n)];
    for (v, &(i, j)) in vars.iter().enumerate() {
        dense[pair_index_unchecked(i, j, n)] = v;
    }
    let mut q = Qubo::new(vars.len());
    for (v, &(i, j)) in vars.iter().enumerate() {
        q.add_linear(v, b.get(i, j));
    }
    for (c, &p) in ledger.iter() {
        let idx = |a: usize, b: usize| dense[pair_index_unchecked(a, b, n)];
        add_cycle_term(&mut q, idx(c.i(), c.j()), idx(c.j(), c.k()), idx(c.i(), c.k()), p);
    }
    Ok(ReducedQubo { qubo: q, n, vars })
}

/// Position-based encoding with `n²` one-hot variables `c(i, pos)`.
#[derive(Debug, Clone, PartialEq)]
pub struct N2Qubo {
    pub qubo: Qubo,
    pub penalty: f64,
    n: usize,
}

impl N2Qubo {
    /// Variable index of "candidate `i` sits at position `pos`".
    pub fn var(&self, candidate: usize, pos: usize) -> usize {
        candidate * self.n + pos
    }

    /// Reads back the ranking of a one-hot feasible assignment.
    pub fn decode(&self, config: &[bool]) -> Result<Ranking> {
        let n = self.n;
        if config.len() != n * n {
            return Err(invalid_arg(format!("expected {} bits, got {}", n * n, config.len())));
        }
        let mut order = vec![usize::MAX; n];
        for i in 0..n {
            let row: Vec<usize> = (0..n).filter(|&p| config[self.var(i, p)]).collect();
            let [pos] = row[..] else {
                return Err(Error::DecodeFailure(format!(
                    "candidate {i} occupies {} positions",
                    row.len()
                )));
            };
            if order[pos] != usize::MAX {
                return Err(Error::DecodeFailure(format!("position {pos} is taken twice")));
            }
            order[pos] = i;
        }
        Ranking::complete(order)
    }

    /// One-hot assignment of a complete ranking.
    pub fn encode(&self, r: &Ranking) -> Vec<bool> {
        let mut config = vec![false; self.n * self.n];
        for (pos, &c) in r.order().iter().enumerate() {
            config[self.var(c, pos)] = true;
        }
        config
    }
}

/// Row/column one-hot penalties with `P = n² |Π|`, plus `w_ji` whenever
/// `i` is placed above `j`.
pub fn build_n2_qubo(pm: &PairMatrix, total_votes: usize) -> Result<N2Qubo> {
    let n = pm.n();
    if total_votes == 0 {
        return Err(invalid_arg("the n² encoding needs at least one vote"));
    }
    let penalty = (n * n * total_votes) as f64;
    let mut q = Qubo::new(n * n);
    let var = |c: usize, p: usize| c * n + p;
    // P (1 - Σ c)^2 = P - P Σ c + 2P Σ_{a<b} c_a c_b over each row and column.
    for fixed in 0..n {
        let row: Vec<usize> = (0..n).map(|p| var(fixed, p)).collect();
        let col: Vec<usize> = (0..n).map(|c| var(c, fixed)).collect();
        for group in [row, col] {
            q.add_offset(penalty);
            for (a, &va) in group.iter().enumerate() {
                q.add_linear(va, -penalty);
                for &vb in &group[a + 1..] {
                    q.add_quadratic(va, vb, 2.0 * penalty);
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i == j || pm.get(j, i) == 0.0 {
                continue;
            }
            for k in 0..n {
                for l in k + 1..n {
                    q.add_quadratic(var(i, k), var(j, l), pm.get(j, i));
                }
            }
        }
    }
    Ok(N2Qubo { qubo: q, penalty, n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::is_cyclic;
    use crate::ranking::{bias_of, build_comparison, cumulative_kt, Dataset};

    fn d3() -> Dataset {
        Dataset::from_orders(3, &[&[0, 1, 2], &[1, 2, 0], &[2, 0, 1]]).unwrap()
    }

    fn unanimous3() -> Dataset {
        Dataset::from_orders(3, &[&[0, 1, 2], &[0, 1, 2], &[0, 1, 2]]).unwrap()
    }

    fn all_configs(nv: usize) -> impl Iterator<Item = Vec<bool>> {
        (0..1u32 << nv).map(move |m| (0..nv).map(|v| m >> v & 1 == 1).collect())
    }

    fn ground_states(q: &Qubo) -> (f64, Vec<Vec<bool>>) {
        let mut best = f64::INFINITY;
        let mut states = Vec::new();
        for c in all_configs(q.num_vars()) {
            let e = q.energy(&c);
            if e < best - 1e-12 {
                best = e;
                states.clear();
            }
            if (e - best).abs() <= 1e-12 {
                states.push(c);
            }
        }
        (best, states)
    }

    fn bits(s: &[u8]) -> Vec<bool> {
        s.iter().map(|&b| b == 1).collect()
    }

    #[test]
    fn cycle_polynomial_is_indicator() {
        for m in 0..8u8 {
            let (ij, jk, ik) = (m & 1 != 0, m & 2 != 0, m & 4 != 0);
            let mut q = Qubo::new(3);
            add_cycle_term(&mut q, 0, 1, 2, 1.0);
            assert_eq!(q.energy(&[ij, jk, ik]), if is_cyclic(ij, jk, ik) { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn select_penalty_examples() {
        let b = bias_of(&build_comparison(&d3()));
        assert_eq!(select_penalty(&b, 3.0, Parity::Odd, 0.5).unwrap(), 1.5);
        let b = bias_of(&build_comparison(&unanimous3()));
        assert_eq!(select_penalty(&b, 3.0, Parity::Odd, 0.5).unwrap(), 1.5);
        let b = BiasMatrix::from_pairs(3, vec![4.0, -2.0, 0.0]).unwrap();
        assert_eq!(select_penalty(&b, 6.0, Parity::Even, 0.5).unwrap(), 4.5);
        assert!(select_penalty(&b, 6.0, Parity::Even, 0.0).is_err());
    }

    #[test]
    fn base_qubo_on_d3() {
        let b = bias_of(&build_comparison(&d3()));
        let q = build_base_qubo(&b, 1.5).unwrap();
        assert_eq!(q.energy(&bits(&[1, 1, 1])), -1.0);
        assert_eq!(q.energy(&bits(&[1, 0, 1])), -0.5);
        let (e, states) = ground_states(&q);
        assert_eq!(e, -1.0);
        let mut expect = vec![bits(&[1, 1, 1]), bits(&[0, 0, 1]), bits(&[1, 0, 0])];
        expect.sort();
        let mut states = states;
        states.sort();
        assert_eq!(states, expect);
        assert!(build_base_qubo(&b, 0.0).is_err());
    }

    #[test]
    fn base_qubo_unanimous_and_two_candidates() {
        let b = bias_of(&build_comparison(&unanimous3()));
        let (e, states) = ground_states(&build_base_qubo(&b, 3.5).unwrap());
        assert_eq!((e, states), (-9.0, vec![bits(&[1, 1, 1])]));

        let b = BiasMatrix::from_pairs(2, vec![-1.0]).unwrap();
        let q = build_base_qubo(&b, 7.0).unwrap();
        assert_eq!(q.num_vars(), 1);
        assert_eq!(ground_states(&q), (-1.0, vec![vec![true]]));
    }

    #[test]
    fn iterative_qubo_examples() {
        let b = bias_of(&build_comparison(&d3()));
        let (_, states) = ground_states(&build_iterative_qubo(&b, &PenaltyLedger::new()).unwrap());
        assert_eq!(states, vec![bits(&[1, 0, 1])]);

        let c = Cycle::new(0, 1, 2).unwrap();
        let ledger = PenaltyLedger::uniform([c], 1.5).unwrap();
        let it = build_iterative_qubo(&b, &ledger).unwrap();
        let base = build_base_qubo(&b, 1.5).unwrap();
        for cfg in all_configs(3) {
            assert_eq!(it.energy(&cfg), base.energy(&cfg));
        }

        let weak = PenaltyLedger::uniform([c], 0.5).unwrap();
        let (e, states) = ground_states(&build_iterative_qubo(&b, &weak).unwrap());
        assert_eq!((e, states), (-1.5, vec![bits(&[1, 0, 1])]));
    }

    #[test]
    fn pair_removal_qubo_examples() {
        let b = bias_of(&build_comparison(&d3()));
        let c = Cycle::new(0, 1, 2).unwrap();
        let ledger = PenaltyLedger::uniform([c], 1.5).unwrap();
        let same = build_pair_removal_qubo(&b, &ledger, &BTreeSet::new()).unwrap();
        assert_eq!(same.qubo, build_iterative_qubo(&b, &ledger).unwrap());
        assert!(build_pair_removal_qubo(&b, &ledger, &BTreeSet::from([(0, 1)])).is_err());

        let b = bias_of(&build_comparison(&unanimous3()));
        let r = build_pair_removal_qubo(&b, &PenaltyLedger::new(), &BTreeSet::from([(0, 2)])).unwrap();
        assert_eq!(r.qubo.num_vars(), 2);
        assert_eq!(r.vars(), &[(0, 1), (1, 2)]);
        let (_, states) = ground_states(&r.qubo);
        assert_eq!(states, vec![vec![true, true]]);
        let x = r.expand(&states[0]);
        assert_eq!(x.get(0, 2), None);
        assert_eq!(x.get(0, 1), Some(true));
    }

    #[test]
    fn n2_penalty_and_ground_state() {
        let pm = build_comparison(&d3());
        let enc = build_n2_qubo(&pm, 3).unwrap();
        assert_eq!(enc.penalty, 27.0);
        let ident = Ranking::complete(vec![0, 1, 2]).unwrap();
        let cfg = enc.encode(&ident);
        assert_eq!(enc.decode(&cfg).unwrap(), ident);
        assert_eq!(enc.qubo.energy(&cfg), cumulative_kt(&d3(), &ident).unwrap());

        let two = Dataset::from_orders(2, &[&[0, 1], &[0, 1], &[0, 1]]).unwrap();
        let enc = build_n2_qubo(&build_comparison(&two), 3).unwrap();
        let (e, states) = ground_states(&enc.qubo);
        assert_eq!(e, 0.0);
        assert_eq!(states.len(), 1);
        assert_eq!(enc.decode(&states[0]).unwrap().order(), &[0, 1]);
        assert!(matches!(enc.decode(&[true, true, false, false]), Err(Error::DecodeFailure(_))));
        assert!(matches!(enc.decode(&[true, false, true, false]), Err(Error::DecodeFailure(_))));
    }

    #[test]
    fn dump_round_trip() {
        let b = bias_of(&build_comparison(&d3()));
        let q = build_base_qubo(&b, 1.5).unwrap();
        let text = q.to_dump();
        assert!(text.starts_with("# vars: 3 offset: 0\n"));
        let back = Qubo::from_dump(&text).unwrap();
        for cfg in all_configs(3) {
            assert_eq!(back.energy(&cfg), q.energy(&cfg));
        }
        assert!(Qubo::from_dump("0 0 1\n").is_err());
        assert!(Qubo::from_dump("# vars: 1 offset: 0\n0 3 1\n").is_err());
    }

    #[test]
    fn ledger_rejects_nonpositive() {
        let c = Cycle::new(0, 1, 2).unwrap();
        assert!(PenaltyLedger::uniform([c], 0.0).is_err());
        let mut l = PenaltyLedger::uniform([c], 1.5).unwrap();
        assert_eq!(l.bump(c, 2.0), Some(3.5));
        assert!(l.touches_pair((0, 2)));
        assert!(!l.touches_pair((0, 3)));
        let json = serde_json::to_string(&l).unwrap();
        assert_eq!(json, r#"[{"cycle":[0,1,2],"penalty":3.5}]"#);
    }
}
