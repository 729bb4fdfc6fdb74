//! Rankings, vote datasets, pairwise tallies and Kendall-Tau distances.
//!
//! Candidates are dense indices `0..n`. A [`Ranking`] lists candidates from
//! most to least preferred. The binary view of a complete ranking is an
//! [`UpperTriBits`] matrix where `x_ij = 1` iff candidate `i` precedes `j`.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, Error, Result};
use crate::pairs::{num_pairs, pair_index_unchecked, pairs};

/// How a vote relates to the full candidate set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ListKind {
    /// Every candidate appears exactly once.
    Complete,
    /// An ordering of some subset; absent candidates carry no information.
    Partial,
    /// The first `k` candidates of a hidden full ranking; listed candidates
    /// beat every unlisted one.
    Ktop,
}

impl FromStr for ListKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complete" => Ok(ListKind::Complete),
            "partial" => Ok(ListKind::Partial),
            "ktop" | "k-top" => Ok(ListKind::Ktop),
            other => Err(invalid_arg(format!("unknown list kind `{other}`"))),
        }
    }
}

impl fmt::Display for ListKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ListKind::Complete => "complete",
            ListKind::Partial => "partial",
            ListKind::Ktop => "ktop",
        })
    }
}

/// A strict ordering of candidates, most preferred first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    order: Vec<usize>,
    kind: ListKind,
    weight: f64,
}

impl Ranking {
    /// Builds a ranking after checking distinct indices and a positive weight.
    /// A complete ranking must be a permutation of `0..len`.
    pub fn new(order: Vec<usize>, kind: ListKind, weight: f64) -> Result<Self> {
        if !(weight.is_finite() && weight > 0.0) {
            return Err(invalid_arg(format!("list weight must be positive, got {weight}")));
        }
        let bound = order.iter().copied().max().map_or(0, |m| m + 1);
        let mut seen = vec![false; bound];
        for &c in &order {
            if std::mem::replace(&mut seen[c], true) {
                return Err(invalid_arg(format!("candidate {c} listed twice")));
            }
        }
        if kind == ListKind::Complete && bound != order.len() {
            return Err(invalid_arg(format!(
                "complete ranking of length {} is not a permutation of 0..{}",
                order.len(),
                order.len()
            )));
        }
        Ok(Ranking { order, kind, weight })
    }

    /// A complete, unit-weight ranking.
    pub fn complete(order: Vec<usize>) -> Result<Self> {
        Ranking::new(order, ListKind::Complete, 1.0)
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn kind(&self) -> ListKind {
        self.kind
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.kind == ListKind::Complete
    }

    /// Same order and kind, different list weight.
    pub fn with_weight(mut self, weight: f64) -> Result<Self> {
        if !(weight.is_finite() && weight > 0.0) {
            return Err(invalid_arg(format!("list weight must be positive, got {weight}")));
        }
        self.weight = weight;
        Ok(self)
    }

    /// 0-based position of every candidate below `n`, `None` when absent.
    pub fn positions(&self, n: usize) -> Vec<Option<usize>> {
        let mut pos = vec![None; n];
        for (p, &c) in self.order.iter().enumerate() {
            if c < n {
                pos[c] = Some(p);
            }
        }
        pos
    }

    fn require_complete(&self, n: usize) -> Result<()> {
        if !self.is_complete() || self.order.len() != n {
            return Err(invalid_arg(format!(
                "expected a complete ranking over {n} candidates, got a {} list of length {}",
                self.kind,
                self.order.len()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Ranking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, c) in self.order.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Per-pair weight α(i, j) computed from the 1-based positions of the two
/// candidates inside a vote.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "lowercase")]
pub enum WeightScheme {
    Uniform,
    /// `1 / (i + j)^p`.
    Position { p: f64 },
    /// `|i - j|`.
    Distance,
}

impl Default for WeightScheme {
    fn default() -> Self {
        WeightScheme::Uniform
    }
}

impl WeightScheme {
    pub fn validate(&self) -> Result<()> {
        match *self {
            WeightScheme::Position { p } if !(p.is_finite() && p > 0.0) => {
                Err(invalid_arg(format!("position weight exponent must be positive, got {p}")))
            }
            _ => Ok(()),
        }
    }

    /// Weight for two 1-based positions.
    pub fn weight(&self, pos_a: usize, pos_b: usize) -> f64 {
        match *self {
            WeightScheme::Uniform => 1.0,
            WeightScheme::Position { p } => 1.0 / ((pos_a + pos_b) as f64).powf(p),
            WeightScheme::Distance => pos_a.abs_diff(pos_b) as f64,
        }
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self, WeightScheme::Uniform)
    }
}

impl FromStr for WeightScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let scheme = match s {
            "uniform" => WeightScheme::Uniform,
            "distance" => WeightScheme::Distance,
            _ => match s.strip_prefix("position:") {
                Some(p) => WeightScheme::Position {
                    p: p.parse().map_err(|_| invalid_arg(format!("bad exponent in `{s}`")))?,
                },
                None => return Err(invalid_arg(format!("unknown pair weight `{s}`"))),
            },
        };
        scheme.validate()?;
        Ok(scheme)
    }
}

impl fmt::Display for WeightScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightScheme::Uniform => f.write_str("uniform"),
            WeightScheme::Position { p } => write!(f, "position:{p}"),
            WeightScheme::Distance => f.write_str("distance"),
        }
    }
}

/// A multiset of votes over `n` candidates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    n: usize,
    votes: Vec<Ranking>,
    pair_weight: WeightScheme,
}

impl Dataset {
    pub fn new(n: usize, votes: Vec<Ranking>, pair_weight: WeightScheme) -> Result<Self> {
        pair_weight.validate()?;
        if n == 0 {
            return Err(invalid_arg("a dataset needs at least one candidate"));
        }
        let Some(first) = votes.first() else {
            return Err(invalid_arg("a dataset needs at least one vote"));
        };
        let kind = first.kind();
        for (k, v) in votes.iter().enumerate() {
            if v.kind() != kind {
                return Err(invalid_arg(format!(
                    "vote {k} is {} but the dataset holds {kind} votes",
                    v.kind()
                )));
            }
            if let Some(&c) = v.order().iter().find(|&&c| c >= n) {
                return Err(invalid_arg(format!("vote {k} names candidate {c} >= n = {n}")));
            }
            if kind == ListKind::Complete && v.len() != n {
                return Err(invalid_arg(format!(
                    "vote {k} has {} candidates, expected {n}",
                    v.len()
                )));
            }
        }
        Ok(Dataset { n, votes, pair_weight })
    }

    /// Unit-weight complete votes, uniform pair weights.
    pub fn from_orders(n: usize, orders: &[&[usize]]) -> Result<Self> {
        let votes = orders
            .iter()
            .map(|o| Ranking::complete(o.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(n, votes, WeightScheme::Uniform)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn votes(&self) -> &[Ranking] {
        &self.votes
    }

    pub fn pair_weight(&self) -> WeightScheme {
        self.pair_weight
    }

    pub fn with_pair_weight(mut self, scheme: WeightScheme) -> Result<Self> {
        scheme.validate()?;
        self.pair_weight = scheme;
        Ok(self)
    }

    pub fn kind(&self) -> ListKind {
        self.votes[0].kind()
    }

    /// Σ β_k over all votes.
    pub fn total_weight(&self) -> f64 {
        self.votes.iter().map(Ranking::weight).sum()
    }

    /// True for complete, unit-weight votes with uniform pair weights: the
    /// setting where `w_ij + w_ji = |Π|` and biases move in steps of two.
    pub fn is_standard(&self) -> bool {
        self.kind() == ListKind::Complete
            && self.pair_weight.is_uniform()
            && self.votes.iter().all(|v| v.weight() == 1.0)
    }
}

/// Read-only view of one vote used for pair comparisons.
#[derive(Debug, Clone)]
pub(crate) struct VoteView {
    pos: Vec<Option<usize>>,
    len: usize,
    kind: ListKind,
    weight: f64,
}

impl VoteView {
    pub(crate) fn new(vote: &Ranking, n: usize) -> Self {
        VoteView {
            pos: vote.positions(n),
            len: vote.len(),
            kind: vote.kind(),
            weight: vote.weight(),
        }
    }

    /// Whether the vote places `a` before `b`; `None` when the vote says
    /// nothing about the pair.
    pub(crate) fn prefers(&self, a: usize, b: usize) -> Option<bool> {
        match (self.pos[a], self.pos[b]) {
            (Some(pa), Some(pb)) => Some(pa < pb),
            (Some(_), None) if self.kind == ListKind::Ktop => Some(true),
            (None, Some(_)) if self.kind == ListKind::Ktop => Some(false),
            _ => None,
        }
    }

    /// β·α for the pair. Absent k-top candidates sit at position `len + 1`.
    pub(crate) fn pair_weight(&self, scheme: &WeightScheme, a: usize, b: usize) -> f64 {
        let tail = self.len + 1;
        let pa = self.pos[a].map_or(tail, |p| p + 1);
        let pb = self.pos[b].map_or(tail, |p| p + 1);
        self.weight * scheme.weight(pa, pb)
    }
}

/// Kendall-Tau distance between two complete rankings over the same set.
pub fn kendall_tau(r1: &Ranking, r2: &Ranking) -> Result<u64> {
    let n = r1.len();
    r1.require_complete(n)?;
    r2.require_complete(n)?;
    let p1 = r1.positions(n);
    let p2 = r2.positions(n);
    let mut count = 0;
    for (i, j) in pairs(n) {
        if (p1[i] < p1[j]) != (p2[i] < p2[j]) {
            count += 1;
        }
    }
    Ok(count)
}

/// Evaluates the (generalized) cumulative Kendall-Tau distance of many
/// candidate rankings against one dataset without re-scanning the votes.
#[derive(Debug, Clone)]
pub struct KtEvaluator {
    n: usize,
    /// Cost paid when the candidate ranking puts `i` before `j`, row-major.
    before_cost: Vec<f64>,
}

impl KtEvaluator {
    pub fn new(ds: &Dataset, scheme: &WeightScheme) -> Result<Self> {
        scheme.validate()?;
        let n = ds.n();
        let mut before_cost = vec![0.0; n * n];
        let views: Vec<VoteView> = ds.votes().iter().map(|v| VoteView::new(v, n)).collect();
        for (i, j) in pairs(n) {
            for view in &views {
                if let Some(i_first) = view.prefers(i, j) {
                    let w = view.pair_weight(scheme, i, j);
                    // A ranking disagreeing with this vote pays w.
                    if i_first {
                        before_cost[j * n + i] += w;
                    } else {
                        before_cost[i * n + j] += w;
                    }
                }
            }
        }
        Ok(KtEvaluator { n, before_cost })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Cumulative distance of a complete ranking given as an order slice.
    pub fn cost_of_order(&self, order: &[usize]) -> f64 {
        let n = self.n;
        let mut total = 0.0;
        for (a, &ca) in order.iter().enumerate() {
            for &cb in &order[a + 1..] {
                total += self.before_cost[ca * n + cb];
            }
        }
        total
    }

    pub fn cost(&self, r: &Ranking) -> Result<f64> {
        r.require_complete(self.n)?;
        Ok(self.cost_of_order(r.order()))
    }
}

/// Σ over votes of the Kendall-Tau distance to `r`, using the dataset's own
/// pair weights and list weights.
pub fn cumulative_kt(ds: &Dataset, r: &Ranking) -> Result<f64> {
    generalized_kt(ds, r, &ds.pair_weight())
}

/// Cumulative distance with an explicit pair-weight scheme. Partial votes
/// only count pairs where both candidates are listed; k-top votes also count
/// pairs with exactly one listed candidate, which is then preferred.
pub fn generalized_kt(ds: &Dataset, r: &Ranking, scheme: &WeightScheme) -> Result<f64> {
    scheme.validate()?;
    r.require_complete(ds.n())?;
    let n = ds.n();
    let rpos = r.positions(n);
    let mut total = 0.0;
    for vote in ds.votes() {
        let view = VoteView::new(vote, n);
        for (i, j) in pairs(n) {
            if let Some(v_first) = view.prefers(i, j) {
                if v_first != (rpos[i] < rpos[j]) {
                    total += view.pair_weight(scheme, i, j);
                }
            }
        }
    }
    Ok(total)
}

/// Cumulative distance divided by `Σβ · n(n-1)/2`.
pub fn normalized_kt(ds: &Dataset, r: &Ranking) -> Result<f64> {
    let kt = cumulative_kt(ds, r)?;
    let denom = ds.total_weight() * num_pairs(ds.n()) as f64;
    Ok(if denom > 0.0 { kt / denom } else { 0.0 })
}

/// Pairwise comparison tallies: `w_ij` is the weighted number of votes that
/// prefer candidate `i` to `j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairMatrix {
    n: usize,
    w: Vec<f64>,
}

impl PairMatrix {
    /// Builds a matrix from row-major tallies; the diagonal must be zero.
    pub fn from_rows(n: usize, w: Vec<f64>) -> Result<Self> {
        if w.len() != n * n {
            return Err(invalid_arg(format!("expected {} entries, got {}", n * n, w.len())));
        }
        if (0..n).any(|i| w[i * n + i] != 0.0) || w.iter().any(|&x| !(x >= 0.0)) {
            return Err(invalid_arg("tallies must be nonnegative with a zero diagonal"));
        }
        Ok(PairMatrix { n, w })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.n + j]
    }
}

/// Tallies `w_ij = Σ_k β_k α(i,j) [vote k prefers i to j]`.
pub fn build_comparison(ds: &Dataset) -> PairMatrix {
    let n = ds.n();
    let scheme = ds.pair_weight();
    let mut w = vec![0.0; n * n];
    for vote in ds.votes() {
        let view = VoteView::new(vote, n);
        for (i, j) in pairs(n) {
            if let Some(i_first) = view.prefers(i, j) {
                let weight = view.pair_weight(&scheme, i, j);
                if i_first {
                    w[i * n + j] += weight;
                } else {
                    w[j * n + i] += weight;
                }
            }
        }
    }
    PairMatrix { n, w }
}

/// Upper-triangular biases `b_ij = w_ji - w_ij`, the linear QUBO terms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasMatrix {
    n: usize,
    b: Vec<f64>,
}

impl BiasMatrix {
    /// From biases listed in pair-index order.
    pub fn from_pairs(n: usize, b: Vec<f64>) -> Result<Self> {
        if b.len() != num_pairs(n) {
            return Err(invalid_arg(format!(
                "expected {} biases, got {}",
                num_pairs(n),
                b.len()
            )));
        }
        Ok(BiasMatrix { n, b })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `b_ij` for `i < j`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.b[pair_index_unchecked(i, j, self.n)]
    }

    /// Biases in pair-index order.
    pub fn values(&self) -> &[f64] {
        &self.b
    }

    pub fn max_abs(&self) -> f64 {
        self.b.iter().fold(0.0, |m, &x| m.max(x.abs()))
    }
}

pub fn bias_of(pm: &PairMatrix) -> BiasMatrix {
    let n = pm.n();
    let b = pairs(n).map(|(i, j)| pm.get(j, i) - pm.get(i, j)).collect();
    BiasMatrix { n, b }
}

/// Strictly-upper-triangular pair matrix with an optional undecided state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UpperTriBits {
    n: usize,
    bits: Vec<Option<bool>>,
}

impl UpperTriBits {
    pub fn undecided(n: usize) -> Self {
        UpperTriBits { n, bits: vec![None; num_pairs(n)] }
    }

    /// From fully decided bits in pair-index order.
    pub fn from_bits(n: usize, bits: &[bool]) -> Result<Self> {
        if bits.len() != num_pairs(n) {
            return Err(invalid_arg(format!(
                "expected {} bits for n = {n}, got {}",
                num_pairs(n),
                bits.len()
            )));
        }
        Ok(UpperTriBits { n, bits: bits.iter().map(|&b| Some(b)).collect() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Option<bool> {
        self.bits[pair_index_unchecked(i, j, self.n)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Option<bool>) {
        let k = pair_index_unchecked(i, j, self.n);
        self.bits[k] = value;
    }

    /// Slots in pair-index order.
    pub fn slots(&self) -> &[Option<bool>] {
        &self.bits
    }

    /// Whether `a` precedes `b` for any two distinct candidates.
    pub fn prefers(&self, a: usize, b: usize) -> Option<bool> {
        if a < b {
            self.get(a, b)
        } else {
            self.get(b, a).map(|x| !x)
        }
    }

    pub fn is_decided(&self) -> bool {
        self.bits.iter().all(Option::is_some)
    }

    pub fn undecided_pairs(&self) -> Vec<(usize, usize)> {
        pairs(self.n)
            .zip(&self.bits)
            .filter(|(_, b)| b.is_none())
            .map(|(p, _)| p)
            .collect()
    }

    /// Decided bits in pair-index order.
    pub fn to_bools(&self) -> Result<Vec<bool>> {
        self.bits
            .iter()
            .map(|b| b.ok_or_else(|| Error::InvalidState("bit matrix has undecided slots".into())))
            .collect()
    }

    /// Number of differing decided slots; undecided slots count as mismatches.
    pub fn hamming(&self, other: &UpperTriBits) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a.is_none() || a != b)
            .count()
    }
}

impl fmt::Display for UpperTriBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            f.write_str(match b {
                Some(true) => "1",
                Some(false) => "0",
                None => "?",
            })?;
        }
        Ok(())
    }
}

/// Binary matrix representing a complete ranking.
pub fn represent(r: &Ranking) -> Result<UpperTriBits> {
    let n = r.len();
    r.require_complete(n)?;
    let pos = r.positions(n);
    let bits = pairs(n).map(|(i, j)| Some(pos[i] < pos[j])).collect();
    Ok(UpperTriBits { n, bits })
}

/// Score of each candidate: how many others it is placed before.
pub fn scores(x: &UpperTriBits) -> Result<Vec<usize>> {
    let n = x.n();
    let mut v = vec![0usize; n];
    for ((i, j), slot) in pairs(n).zip(x.slots()) {
        match slot {
            Some(true) => v[i] += 1,
            Some(false) => v[j] += 1,
            None => {
                return Err(Error::InvalidState(format!("pair ({i}, {j}) is undecided")));
            }
        }
    }
    Ok(v)
}

/// Sorts candidates by decreasing score. Equal scores are ordered by a
/// seeded shuffle applied before the stable sort.
pub fn reconstruct(x: &UpperTriBits, tie_seed: u64) -> Result<Ranking> {
    let v = scores(x)?;
    let mut order: Vec<usize> = (0..x.n()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(tie_seed));
    order.sort_by(|a, b| v[*b].cmp(&v[*a]));
    Ranking::complete(order)
}

/// 1 when `x` is exactly the representation of one of the optima, else 0.
pub fn accuracy(x: &UpperTriBits, optima: &[Ranking]) -> Result<u8> {
    if optima.is_empty() {
        return Err(invalid_arg("accuracy needs at least one optimal ranking"));
    }
    for opt in optima {
        if opt.len() != x.n() {
            return Err(invalid_arg("optimal ranking size does not match the bit matrix"));
        }
        if represent(opt)?.hamming(x) == 0 {
            return Ok(1);
        }
    }
    Ok(0)
}
