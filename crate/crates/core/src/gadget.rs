//! Rich 2-to-1 Label Cover instances and the long-code reduction over
//! multislices, with folding and the completeness certifier.
//!
//! Each `V`-vertex `v` is replaced by pairs `(v, ȳ)` where `ȳ` ranges over the
//! multislices given by the marginals of the rounded distribution `Ω`.
//! Pairs whose pullbacks along a common neighbour agree are folded together,
//! and hyperedges are added for every choice of neighbours and cloud tuples
//! whose pullback matrix has the column frequencies prescribed by `Ω`.

use std::collections::{HashMap, HashSet};

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::aip::Hypergraph;
use crate::error::{Error, Result};
use crate::structure::{pullback, FiniteRelation, Tuple, TwoToOneMap};
use crate::util::{factorial, next_permutation, pow_count, UnionFind};

/// Budget for exhaustive enumerations in this module.
pub const DEFAULT_GADGET_BUDGET: u128 = 50_000_000;

/// Number of 2-to-1 maps `[2n] → [n]`: `(2n)! / 2^n`.
pub fn count_2to1_maps(n: usize) -> u128 {
    factorial(2 * n) / pow_count(2, n)
}

/// All 2-to-1 maps `[2n] → [n]`, lexicographic by table.
pub fn enumerate_2to1_maps(n: usize, budget: u128) -> Result<Vec<TwoToOneMap>> {
    if n == 0 {
        return Err(Error::param("label parameter n must be positive"));
    }
    let needed = count_2to1_maps(n);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut table: Vec<usize> = (0..n).flat_map(|i| [i, i]).collect();
    let mut out = Vec::with_capacity(needed as usize);
    loop {
        out.push(TwoToOneMap::new(table.clone())?);
        if !next_permutation(&mut table) {
            break;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCoverEdge {
    pub u: usize,
    pub v: usize,
    pub pi: TwoToOneMap,
}

/// A bipartite Label Cover instance with `U`-labels in `[2n]` and
/// `V`-labels in `[n]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawLabelCover")]
pub struct LabelCoverInstance {
    n: usize,
    #[serde(rename = "U")]
    u_count: usize,
    #[serde(rename = "V")]
    v_count: usize,
    edges: Vec<LabelCoverEdge>,
    #[serde(skip)]
    adjacency: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
struct RawLabelCover {
    n: usize,
    #[serde(rename = "U")]
    u_count: usize,
    #[serde(rename = "V")]
    v_count: usize,
    edges: Vec<LabelCoverEdge>,
}

impl TryFrom<RawLabelCover> for LabelCoverInstance {
    type Error = Error;

    fn try_from(raw: RawLabelCover) -> Result<Self> {
        LabelCoverInstance::new(raw.n, raw.u_count, raw.v_count, raw.edges)
    }
}

impl LabelCoverInstance {
    pub fn new(n: usize, u_count: usize, v_count: usize, edges: Vec<LabelCoverEdge>) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("label parameter n must be positive"));
        }
        let mut seen = HashSet::new();
        let mut adjacency = vec![Vec::new(); u_count];
        for (idx, e) in edges.iter().enumerate() {
            if e.u >= u_count || e.v >= v_count {
                return Err(Error::structure(format!("edge ({}, {}) outside U = {u_count}, V = {v_count}", e.u, e.v)));
            }
            if e.pi.n() != n {
                return Err(Error::param(format!("edge ({}, {}) has a map for n = {}", e.u, e.v, e.pi.n())));
            }
            if !seen.insert((e.u, e.v)) {
                return Err(Error::structure(format!("duplicate edge ({}, {})", e.u, e.v)));
            }
            adjacency[e.u].push(idx);
        }
        Ok(LabelCoverInstance { n, u_count, v_count, edges, adjacency })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn u_count(&self) -> usize {
        self.u_count
    }

    pub fn v_count(&self) -> usize {
        self.v_count
    }

    pub fn edges(&self) -> &[LabelCoverEdge] {
        &self.edges
    }

    /// Edges incident to `u`, in input order.
    pub fn incident(&self, u: usize) -> impl Iterator<Item = &LabelCoverEdge> {
        self.adjacency[u].iter().map(|&i| &self.edges[i])
    }

    pub fn is_biregular(&self) -> bool {
        let mut du = vec![0usize; self.u_count];
        let mut dv = vec![0usize; self.v_count];
        for e in &self.edges {
            du[e.u] += 1;
            dv[e.v] += 1;
        }
        du.windows(2).all(|w| w[0] == w[1]) && dv.windows(2).all(|w| w[0] == w[1])
    }

    /// Per-`u` uniformity: the incident maps of every `u` cover all 2-to-1
    /// maps, each equally often.
    pub fn richness_certificate(&self) -> bool {
        let total = count_2to1_maps(self.n);
        (0..self.u_count).all(|u| {
            let mut counts: HashMap<&TwoToOneMap, usize> = HashMap::new();
            for e in self.incident(u) {
                *counts.entry(&e.pi).or_default() += 1;
            }
            let mut values = counts.values();
            let first = values.next().copied();
            counts.len() as u128 == total && values.all(|&c| Some(c) == first)
        })
    }
}

/// `|U| = m`, `V` indexed by the 2-to-1 maps, complete bipartite with map
/// `maps[(u + v) mod D]` on `(u, v)`: every row and every column sees each
/// map once.
pub fn gen_rich_instance(n: usize, m: usize) -> Result<LabelCoverInstance> {
    let maps = enumerate_2to1_maps(n, DEFAULT_GADGET_BUDGET)?;
    let d = maps.len();
    let edges = (0..m)
        .flat_map(|u| (0..d).map(move |v| (u, v)))
        .map(|(u, v)| LabelCoverEdge { u, v, pi: maps[(u + v) % d].clone() })
        .collect();
    LabelCoverInstance::new(n, m, d, edges)
}

/// A rich instance with a planted perfect labelling. `V` has `D` vertices,
/// `D/n` of each label; vertex `u` gets label `u mod 2n` and is joined to
/// every `v` by a map sending its label to `v`'s label, rotated by `u` so
/// that different `u` use different assignments.
pub fn gen_planted_rich_instance(n: usize, m: usize) -> Result<(LabelCoverInstance, Labelling)> {
    let maps = enumerate_2to1_maps(n, DEFAULT_GADGET_BUDGET)?;
    let d = maps.len();
    let per_label = d / n;
    let v_labels: Vec<usize> = (0..d).map(|v| v / per_label).collect();
    let u_labels: Vec<usize> = (0..m).map(|u| u % (2 * n)).collect();
    let mut edges = Vec::with_capacity(m * d);
    for (u, &j) in u_labels.iter().enumerate() {
        for label in 0..n {
            let fitting: Vec<&TwoToOneMap> = maps.iter().filter(|p| p.apply(j) == label).collect();
            debug_assert_eq!(fitting.len(), per_label);
            for slot in 0..per_label {
                let v = label * per_label + slot;
                let pi = fitting[(slot + u) % per_label].clone();
                edges.push(LabelCoverEdge { u, v, pi });
            }
        }
    }
    let inst = LabelCoverInstance::new(n, m, d, edges)?;
    Ok((inst, Labelling { u_labels, v_labels }))
}

/// Random instance without a richness guarantee: every `u` gets `degree`
/// distinct random neighbours, each with a uniformly random 2-to-1 map.
pub fn gen_sampled_instance(n: usize, m: usize, v_count: usize, degree: usize, seed: u64) -> Result<LabelCoverInstance> {
    if degree > v_count {
        return Err(Error::param(format!("degree {degree} exceeds |V| = {v_count}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vs: Vec<usize> = (0..v_count).collect();
    let mut edges = Vec::with_capacity(m * degree);
    for u in 0..m {
        vs.shuffle(&mut rng);
        for &v in &vs[..degree] {
            let mut table: Vec<usize> = (0..n).flat_map(|i| [i, i]).collect();
            table.shuffle(&mut rng);
            edges.push(LabelCoverEdge { u, v, pi: TwoToOneMap::new(table)? });
        }
    }
    LabelCoverInstance::new(n, m, v_count, edges)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labelling {
    /// Labels in `[2n]`.
    pub u_labels: Vec<usize>,
    /// Labels in `[n]`.
    pub v_labels: Vec<usize>,
}

fn check_labelling(inst: &LabelCoverInstance, lab: &Labelling) -> Result<()> {
    if lab.u_labels.len() != inst.u_count {
        return Err(Error::LengthMismatch { expected: inst.u_count, found: lab.u_labels.len() });
    }
    if lab.v_labels.len() != inst.v_count {
        return Err(Error::LengthMismatch { expected: inst.v_count, found: lab.v_labels.len() });
    }
    if lab.u_labels.iter().any(|&x| x >= 2 * inst.n) || lab.v_labels.iter().any(|&x| x >= inst.n) {
        return Err(Error::param("label outside its range"));
    }
    Ok(())
}

/// Fraction of edges with `s′(v) = π_uv(s(u))`. An instance without edges
/// has value 1.
pub fn label_cover_value(inst: &LabelCoverInstance, lab: &Labelling) -> Result<Ratio<usize>> {
    check_labelling(inst, lab)?;
    if inst.edges.is_empty() {
        return Ok(Ratio::from_integer(1));
    }
    let good = inst.edges.iter().filter(|e| lab.v_labels[e.v] == e.pi.apply(lab.u_labels[e.u])).count();
    Ok(Ratio::new(good, inst.edges.len()))
}

/// Exhaustive search for a perfect labelling over all `U`-labellings, with
/// `V`-labels forced by the first incident edge.
pub fn has_perfect_labelling(inst: &LabelCoverInstance, budget: u128) -> Result<Option<Labelling>> {
    let needed = pow_count(2 * inst.n, inst.u_count);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut found = None;
    crate::util::for_each_tuple(2 * inst.n, inst.u_count, |s| {
        let mut v_labels: Vec<Option<usize>> = vec![None; inst.v_count];
        for e in &inst.edges {
            let want = e.pi.apply(s[e.u]);
            match v_labels[e.v] {
                Some(x) if x != want => return true,
                _ => v_labels[e.v] = Some(want),
            }
        }
        found = Some(Labelling { u_labels: s.to_vec(), v_labels: v_labels.into_iter().map(|x| x.unwrap_or(0)).collect() });
        false
    });
    Ok(found)
}

pub fn multinomial(hist: &[usize]) -> u128 {
    let n: usize = hist.iter().sum();
    hist.iter().fold(factorial(n), |acc, &h| acc / factorial(h))
}

/// All tuples of length `n` in which value `a` appears exactly `hist[a]`
/// times, in lexicographic order. Zero entries are allowed.
pub fn multislice_enumerate(n: usize, hist: &[usize]) -> Result<Vec<Tuple>> {
    let total: usize = hist.iter().sum();
    if total != n {
        return Err(Error::param(format!("histogram sums to {total}, expected {n}")));
    }
    let mut cur: Vec<usize> = hist.iter().enumerate().flat_map(|(a, &h)| std::iter::repeat_n(a, h)).collect();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    Ok(out)
}

/// A distribution over a relation with weights `counts[i] / denominator`,
/// aligned with the relation's sorted tuples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleDistribution {
    pub relation: FiniteRelation,
    pub counts: Vec<usize>,
    pub denominator: usize,
}

impl TupleDistribution {
    pub fn weights(&self) -> Vec<Ratio<usize>> {
        self.counts.iter().map(|&c| Ratio::new(c, self.denominator)).collect()
    }

    pub fn weight(&self, t: &[usize]) -> Ratio<usize> {
        self.relation.index_of(t).map_or(Ratio::from_integer(0), |i| Ratio::new(self.counts[i], self.denominator))
    }

    /// Every tuple of the relation has positive weight.
    pub fn support_preserved(&self) -> bool {
        self.counts.iter().all(|&c| c > 0)
    }

    /// Tuples of positive weight.
    pub fn support(&self) -> Vec<&Tuple> {
        self.relation.tuples().iter().zip(&self.counts).filter(|(_, &c)| c > 0).map(|(t, _)| t).collect()
    }

    /// Marginal of coordinate `i` scaled by the denominator: `#_a` is the
    /// total count of tuples whose `i`-th entry is `a`.
    pub fn marginal_counts(&self, i: usize) -> Vec<usize> {
        let mut hist = vec![0; self.relation.domain_size()];
        for (t, &c) in self.relation.tuples().iter().zip(&self.counts) {
            hist[t[i]] += c;
        }
        hist
    }
}

fn largest_remainder(rel: &FiniteRelation, n: usize) -> TupleDistribution {
    let size = rel.len();
    let (base, extra) = (n / size, n % size);
    let counts = (0..size).map(|i| base + usize::from(i < extra)).collect();
    TupleDistribution { relation: rel.clone(), counts, denominator: n }
}

/// Rounds the uniform distribution on `R` to denominator `n` by largest
/// remainders (all remainders tie, so the first `n mod |R|` tuples get one
/// extra unit). Fails when `n < |R|`, which would drop support.
pub fn round_distribution(rel: &FiniteRelation, n: usize) -> Result<TupleDistribution> {
    if rel.is_empty() {
        return Err(Error::param("cannot round a distribution over an empty relation"));
    }
    if n < rel.len() {
        return Err(Error::param(format!("n = {n} is smaller than |R| = {}; support would be lost", rel.len())));
    }
    Ok(largest_remainder(rel, n))
}

/// The same rounding without the support requirement: when `n < |R|` only
/// the first `n` tuples keep weight `1/n`.
pub fn round_distribution_thinned(rel: &FiniteRelation, n: usize) -> Result<TupleDistribution> {
    if rel.is_empty() || n == 0 {
        return Err(Error::param("thinned rounding needs a nonempty relation and n ≥ 1"));
    }
    Ok(largest_remainder(rel, n))
}

/// Whether the columns of an `r × 2n` matrix occur with frequencies exactly
/// `2n · Ω(ā)` and all lie in the relation.
pub fn check_mu_membership(rows: &[Vec<usize>], dist: &TupleDistribution) -> Result<bool> {
    let r = dist.relation.arity();
    if rows.len() != r {
        return Err(Error::LengthMismatch { expected: r, found: rows.len() });
    }
    let width = rows[0].len();
    if let Some(bad) = rows.iter().find(|row| row.len() != width) {
        return Err(Error::LengthMismatch { expected: width, found: bad.len() });
    }
    let mut required = Vec::with_capacity(dist.counts.len());
    for &c in &dist.counts {
        if !(width * c).is_multiple_of(dist.denominator) {
            return Err(Error::Integrality(format!(
                "{width} · {c}/{} is not an integer",
                dist.denominator
            )));
        }
        required.push(width * c / dist.denominator);
    }
    let mut seen = vec![0usize; dist.counts.len()];
    let mut col = vec![0; r];
    for j in 0..width {
        for (i, row) in rows.iter().enumerate() {
            col[i] = row[j];
        }
        match dist.relation.index_of(&col) {
            Some(idx) => seen[idx] += 1,
            None => return Ok(false),
        }
    }
    Ok(seen == required)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GadgetMode {
    Exhaustive,
    Sample { count: usize, seed: u64 },
}

/// How `Ω` is obtained from the uniform distribution on `R`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistributionChoice {
    /// [`round_distribution`]; requires `n ≥ |R|`.
    #[default]
    Strict,
    /// [`round_distribution_thinned`]; allows losing support.
    Thinned,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GadgetOptions {
    pub mode: GadgetMode,
    pub distribution: DistributionChoice,
    pub budget: u128,
}

impl Default for GadgetOptions {
    fn default() -> Self {
        GadgetOptions { mode: GadgetMode::Exhaustive, distribution: DistributionChoice::Strict, budget: DEFAULT_GADGET_BUDGET }
    }
}

/// Conditions the hardness argument needs for large `n`, recorded rather than
/// enforced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideConditions {
    pub support_preserved: bool,
    /// Every marginal count is at least `α·n` with `α = 1/(2|R|)`, over the
    /// values used by `R`.
    pub alpha_balanced: bool,
    pub marginals_equal: bool,
    pub rich: bool,
    pub biregular: bool,
}

/// Which choice produced a hyperedge, kept for post-hoc audits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeWitness {
    pub u: usize,
    /// Vertex-pair indices, one per coordinate.
    pub pairs: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CloudVertex {
    pub v: usize,
    pub y: Tuple,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GadgetHypergraph {
    pub n: usize,
    pub arity: usize,
    pub distribution: TupleDistribution,
    /// Multislice histogram per coordinate.
    pub histograms: Vec<Vec<usize>>,
    pub pairs: Vec<CloudVertex>,
    /// Class id of each pair.
    pub class_of: Vec<usize>,
    pub class_count: usize,
    /// Distinct hyperedges over class ids, in order of first emission.
    pub edges: Vec<Vec<usize>>,
    pub witnesses: Vec<EdgeWitness>,
    pub side_conditions: SideConditions,
    /// Sample mode: draws attempted and draws realised.
    pub attempts: usize,
    pub realised: usize,
}

#[derive(Serialize)]
pub struct Provenance<'a> {
    pub n: usize,
    pub distribution: &'a TupleDistribution,
    pub histograms: &'a [Vec<usize>],
    pub side_conditions: &'a SideConditions,
    /// Member pairs of each class.
    pub classes: Vec<Vec<&'a CloudVertex>>,
    pub attempts: usize,
    pub realised: usize,
}

impl GadgetHypergraph {
    pub fn to_hypergraph(&self) -> Hypergraph {
        Hypergraph::new(self.class_count, self.arity, self.edges.clone()).expect("class ids are in range")
    }

    pub fn provenance(&self) -> Provenance<'_> {
        let mut classes = vec![Vec::new(); self.class_count];
        for (p, &c) in self.pairs.iter().zip(&self.class_of) {
            classes[c].push(p);
        }
        Provenance {
            n: self.n,
            distribution: &self.distribution,
            histograms: &self.histograms,
            side_conditions: &self.side_conditions,
            classes,
            attempts: self.attempts,
            realised: self.realised,
        }
    }

    /// The `r × 2n` pullback matrix behind an edge witness.
    pub fn witness_matrix(&self, inst: &LabelCoverInstance, w: &EdgeWitness) -> Result<Vec<Vec<usize>>> {
        w.pairs
            .iter()
            .map(|&p| {
                let pair = &self.pairs[p];
                let pi = inst
                    .incident(w.u)
                    .find(|e| e.v == pair.v)
                    .map(|e| &e.pi)
                    .ok_or_else(|| Error::structure(format!("{} is not a neighbour of {}", pair.v, w.u)))?;
                pullback(&pair.y, pi)
            })
            .collect()
    }

    /// Re-derives every witness matrix and checks frequencies and row
    /// multislices.
    pub fn audit(&self, inst: &LabelCoverInstance) -> Result<bool> {
        for w in &self.witnesses {
            let m = self.witness_matrix(inst, w)?;
            if !check_mu_membership(&m, &self.distribution)? {
                return Ok(false);
            }
            for (i, row) in m.iter().enumerate() {
                let mut hist = vec![0; self.histograms[i].len()];
                for &x in row {
                    hist[x] += 1;
                }
                if hist.iter().zip(&self.histograms[i]).any(|(&h, &want)| h != 2 * want) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

struct Clouds {
    pairs: Vec<CloudVertex>,
    index: HashMap<(usize, Tuple), usize>,
    /// Per coordinate, the multislice members.
    slices: Vec<Vec<Tuple>>,
}

fn build_clouds(inst: &LabelCoverInstance, histograms: &[Vec<usize>]) -> Result<Clouds> {
    let mut distinct: Vec<&Vec<usize>> = Vec::new();
    for h in histograms {
        if !distinct.contains(&h) {
            distinct.push(h);
        }
    }
    let mut members: Vec<Tuple> = Vec::new();
    for h in &distinct {
        members.extend(multislice_enumerate(inst.n, h)?);
    }
    let slices = histograms.iter().map(|h| multislice_enumerate(inst.n, h)).collect::<Result<Vec<_>>>()?;
    let mut pairs = Vec::with_capacity(inst.v_count * members.len());
    let mut index = HashMap::new();
    for v in 0..inst.v_count {
        for y in &members {
            index.insert((v, y.clone()), pairs.len());
            pairs.push(CloudVertex { v, y: y.clone() });
        }
    }
    Ok(Clouds { pairs, index, slices })
}

fn fold(inst: &LabelCoverInstance, clouds: &Clouds) -> Result<(Vec<usize>, usize)> {
    let mut uf = UnionFind::new(clouds.pairs.len());
    let mut bucket: HashMap<(usize, Tuple), usize> = HashMap::new();
    let mut by_v: Vec<Vec<usize>> = vec![Vec::new(); inst.v_count];
    for (idx, p) in clouds.pairs.iter().enumerate() {
        by_v[p.v].push(idx);
    }
    for u in 0..inst.u_count {
        bucket.clear();
        for e in inst.incident(u) {
            for &idx in &by_v[e.v] {
                let x = pullback(&clouds.pairs[idx].y, &e.pi)?;
                match bucket.get(&(u, x.clone())) {
                    Some(&rep) => {
                        uf.union(rep, idx);
                    }
                    None => {
                        bucket.insert((u, x), idx);
                    }
                }
            }
        }
    }
    let mut ids = HashMap::new();
    let class_of: Vec<usize> = (0..clouds.pairs.len())
        .map(|i| {
            let root = uf.find(i);
            let next = ids.len();
            *ids.entry(root).or_insert(next)
        })
        .collect();
    Ok((class_of, ids.len()))
}

struct EdgeSink {
    seen: HashSet<Vec<usize>>,
    edges: Vec<Vec<usize>>,
    witnesses: Vec<EdgeWitness>,
}

impl EdgeSink {
    fn push(&mut self, class_of: &[usize], u: usize, pairs: Vec<usize>) {
        let edge: Vec<usize> = pairs.iter().map(|&p| class_of[p]).collect();
        if self.seen.insert(edge.clone()) {
            self.edges.push(edge);
            self.witnesses.push(EdgeWitness { u, pairs });
        }
    }
}

/// Builds the folded hypergraph for `inst` and a symmetric nonempty `R`.
pub fn build_gadget(inst: &LabelCoverInstance, rel: &FiniteRelation, opts: &GadgetOptions) -> Result<GadgetHypergraph> {
    if rel.is_empty() {
        return Err(Error::param("the relation must be nonempty"));
    }
    if !rel.is_symmetric() {
        return Err(Error::param("the relation must be symmetric"));
    }
    let n = inst.n;
    let r = rel.arity();
    let dist = match opts.distribution {
        DistributionChoice::Strict => round_distribution(rel, n)?,
        DistributionChoice::Thinned => round_distribution_thinned(rel, n)?,
    };
    let histograms: Vec<Vec<usize>> = (0..r).map(|i| dist.marginal_counts(i)).collect();
    let clouds = build_clouds(inst, &histograms)?;
    let (class_of, class_count) = fold(inst, &clouds)?;

    let mut sink = EdgeSink { seen: HashSet::new(), edges: Vec::new(), witnesses: Vec::new() };
    let (mut attempts, mut realised) = (0, 0);
    match opts.mode {
        GadgetMode::Exhaustive => {
            let mut cost: u128 = 0;
            let slice_product = clouds.slices.iter().fold(1u128, |acc, s| acc.saturating_mul(s.len() as u128));
            for u in 0..inst.u_count {
                let deg = inst.adjacency[u].len();
                cost = cost.saturating_add(pow_count(deg, r).saturating_mul(slice_product));
            }
            if cost > opts.budget {
                return Err(Error::BudgetExceeded { needed: cost, budget: opts.budget });
            }
            exhaustive_edges(inst, &dist, &clouds, &class_of, &mut sink)?;
        }
        GadgetMode::Sample { count, seed } => {
            (attempts, realised) = sampled_edges(inst, &dist, &clouds, &class_of, &mut sink, count, seed)?;
        }
    }

    let alpha = Ratio::new(1, 2 * rel.len());
    let used = rel.used_values();
    let side_conditions = SideConditions {
        support_preserved: dist.support_preserved(),
        alpha_balanced: histograms
            .iter()
            .all(|h| used.iter().all(|&a| Ratio::from_integer(h[a]) >= alpha * Ratio::from_integer(n))),
        marginals_equal: histograms.windows(2).all(|w| w[0] == w[1]),
        rich: inst.richness_certificate(),
        biregular: inst.is_biregular(),
    };
    Ok(GadgetHypergraph {
        n,
        arity: r,
        distribution: dist,
        histograms,
        pairs: clouds.pairs,
        class_of,
        class_count,
        edges: sink.edges,
        witnesses: sink.witnesses,
        side_conditions,
        attempts,
        realised,
    })
}

fn exhaustive_edges(
    inst: &LabelCoverInstance,
    dist: &TupleDistribution,
    clouds: &Clouds,
    class_of: &[usize],
    sink: &mut EdgeSink,
) -> Result<()> {
    let r = dist.relation.arity();
    for u in 0..inst.u_count {
        let nbrs: Vec<&LabelCoverEdge> = inst.incident(u).collect();
        if nbrs.is_empty() {
            continue;
        }
        // pulled[i][e][s]: pullback of slice member s of coordinate i along edge e.
        let pulled: Vec<Vec<Vec<Tuple>>> = (0..r)
            .map(|i| {
                nbrs.iter()
                    .map(|e| clouds.slices[i].iter().map(|y| pullback(y, &e.pi)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let choices: Vec<Vec<usize>> = (0..r)
            .flat_map(|i| [(0..nbrs.len()).collect(), (0..clouds.slices[i].len()).collect()])
            .collect();
        let mut failure = None;
        let mut rows = vec![Vec::new(); r];
        crate::util::for_each_choice(&choices, |pick| {
            for i in 0..r {
                rows[i].clone_from(&pulled[i][pick[2 * i]][pick[2 * i + 1]]);
            }
            match check_mu_membership(&rows, dist) {
                Ok(true) => {
                    let pairs = (0..r)
                        .map(|i| clouds.index[&(nbrs[pick[2 * i]].v, clouds.slices[i][pick[2 * i + 1]].clone())])
                        .collect();
                    sink.push(class_of, u, pairs);
                    true
                }
                Ok(false) => true,
                Err(e) => {
                    failure = Some(e);
                    false
                }
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
    }
    Ok(())
}

fn sampled_edges(
    inst: &LabelCoverInstance,
    dist: &TupleDistribution,
    clouds: &Clouds,
    class_of: &[usize],
    sink: &mut EdgeSink,
    count: usize,
    seed: u64,
) -> Result<(usize, usize)> {
    let r = dist.relation.arity();
    let width = 2 * inst.n;
    let mut columns: Vec<&Tuple> = Vec::with_capacity(width);
    for (t, &c) in dist.relation.tuples().iter().zip(&dist.counts) {
        if !(width * c).is_multiple_of(dist.denominator) {
            return Err(Error::Integrality(format!("{width} · {c}/{} is not an integer", dist.denominator)));
        }
        columns.extend(std::iter::repeat_n(t, width * c / dist.denominator));
    }
    let active: Vec<usize> = (0..inst.u_count).filter(|&u| !inst.adjacency[u].is_empty()).collect();
    if active.is_empty() {
        return Ok((0, 0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut realised = 0;
    for _ in 0..count {
        let u = active[rng.gen_range(0..active.len())];
        columns.shuffle(&mut rng);
        let mut pairs = Vec::with_capacity(r);
        for i in 0..r {
            let row: Vec<usize> = columns.iter().map(|c| c[i]).collect();
            let fits: Vec<(usize, Tuple)> = inst
                .incident(u)
                .filter_map(|e| {
                    let y: Tuple = (0..inst.n).map(|t| e.pi.fibre(t)).map(|[a, b]| (row[a], row[b])).try_fold(
                        Vec::with_capacity(inst.n),
                        |mut acc, (a, b)| {
                            (a == b).then(|| {
                                acc.push(a);
                                acc
                            })
                        },
                    )?;
                    Some((e.v, y))
                })
                .collect();
            if fits.is_empty() {
                break;
            }
            let (v, y) = &fits[rng.gen_range(0..fits.len())];
            pairs.push(clouds.index[&(*v, y.clone())]);
        }
        if pairs.len() == r {
            realised += 1;
            sink.push(class_of, u, pairs);
        }
    }
    Ok((count, realised))
}

/// Completeness certificate: with a perfect labelling, `h(v, ȳ) = ȳ_{s′(v)}`
/// must be constant on every folded class and send every edge into `R`.
pub fn decode_and_check(
    inst: &LabelCoverInstance,
    lab: &Labelling,
    rel: &FiniteRelation,
    h: &GadgetHypergraph,
) -> Result<bool> {
    let value = label_cover_value(inst, lab)?;
    if value != Ratio::from_integer(1) {
        return Err(Error::param(format!("the labelling has value {value}, not 1")));
    }
    let mut class_value: Vec<Option<usize>> = vec![None; h.class_count];
    for (p, &c) in h.pairs.iter().zip(&h.class_of) {
        let x = p.y[lab.v_labels[p.v]];
        match class_value[c] {
            Some(prev) if prev != x => return Ok(false),
            _ => class_value[c] = Some(x),
        }
    }
    let mut buf = Vec::with_capacity(h.arity);
    for e in &h.edges {
        buf.clear();
        buf.extend(e.iter().map(|&c| class_value[c].expect("every class has a pair")));
        if !rel.contains(&buf) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{make_urel, nae};

    #[test]
    fn map_counts() {
        assert_eq!(enumerate_2to1_maps(1, 100).unwrap().len(), 1);
        assert_eq!(enumerate_2to1_maps(2, 100).unwrap().len(), 6);
        let maps = enumerate_2to1_maps(3, 100).unwrap();
        assert_eq!(maps.len(), 90);
        assert!(maps.windows(2).all(|w| w[0].table() < w[1].table()));
        assert!(matches!(enumerate_2to1_maps(4, 100), Err(Error::BudgetExceeded { needed: 2520, .. })));
    }

    #[test]
    fn rich_instance_examples() {
        let i = gen_rich_instance(1, 2).unwrap();
        assert_eq!((i.u_count(), i.v_count(), i.edges().len()), (2, 1, 2));
        assert!(i.richness_certificate() && i.is_biregular());
        let i = gen_rich_instance(2, 6).unwrap();
        assert_eq!((i.u_count(), i.v_count(), i.edges().len()), (6, 6, 36));
        assert!(i.richness_certificate() && i.is_biregular());
        for v in 0..6 {
            let col: HashSet<&TwoToOneMap> = i.edges().iter().filter(|e| e.v == v).map(|e| &e.pi).collect();
            assert_eq!(col.len(), 6);
        }
        let star = gen_rich_instance(2, 1).unwrap();
        assert_eq!(star.edges().len(), 6);
        assert!(star.richness_certificate());
    }

    #[test]
    fn planted_instance_is_rich_and_perfect() {
        for (n, m) in [(1, 3), (2, 1), (2, 6), (3, 2)] {
            let (inst, lab) = gen_planted_rich_instance(n, m).unwrap();
            assert!(inst.richness_certificate() && inst.is_biregular());
            assert_eq!(label_cover_value(&inst, &lab).unwrap(), Ratio::from_integer(1));
        }
    }

    #[test]
    fn label_cover_values() {
        let i = gen_rich_instance(1, 2).unwrap();
        let lab = Labelling { u_labels: vec![0, 1], v_labels: vec![0] };
        assert_eq!(label_cover_value(&i, &lab).unwrap(), Ratio::from_integer(1));
        let star = gen_rich_instance(2, 1).unwrap();
        let lab = Labelling { u_labels: vec![0], v_labels: star.edges().iter().map(|e| 1 - e.pi.apply(0)).collect() };
        assert_eq!(label_cover_value(&star, &lab).unwrap(), Ratio::from_integer(0));
        let bad = Labelling { u_labels: vec![4], v_labels: vec![0; 6] };
        assert!(label_cover_value(&star, &bad).is_err());
        assert!(has_perfect_labelling(&star, 1000).unwrap().is_some());
    }

    #[test]
    fn multislice_examples() {
        assert_eq!(multislice_enumerate(2, &[1, 1]).unwrap(), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(multislice_enumerate(6, &[3, 3]).unwrap().len(), 20);
        assert_eq!(multislice_enumerate(3, &[3, 0]).unwrap(), vec![vec![0, 0, 0]]);
        assert!(multislice_enumerate(3, &[1, 1]).is_err());
        assert_eq!(multinomial(&[3, 3]), 20);
    }

    #[test]
    fn rounding_examples() {
        let d = round_distribution(&nae(2, 2), 2).unwrap();
        assert_eq!(d.weights(), vec![Ratio::new(1, 2); 2]);
        let d = round_distribution(&nae(2, 3), 6).unwrap();
        assert_eq!(d.weights(), vec![Ratio::new(1, 6); 6]);
        let d = round_distribution(&nae(2, 3), 7).unwrap();
        let w = d.weights();
        assert_eq!(w.iter().filter(|&&x| x == Ratio::new(1, 7)).count(), 5);
        assert_eq!(w[0], Ratio::new(2, 7));
        assert!(round_distribution(&nae(2, 3), 5).is_err());
        let t = round_distribution_thinned(&make_urel(3, 2, 2), 2).unwrap();
        assert_eq!(t.support().len(), 2);
        assert!(!t.support_preserved());
    }

    #[test]
    fn mu_membership_examples() {
        let d = round_distribution(&nae(2, 2), 2).unwrap();
        assert!(check_mu_membership(&[vec![0, 1], vec![1, 0]], &d).unwrap());
        assert!(!check_mu_membership(&[vec![0, 0], vec![1, 1]], &d).unwrap());
        assert!(!check_mu_membership(&[vec![0, 1], vec![0, 0]], &d).unwrap());
        let d7 = round_distribution(&nae(2, 3), 7).unwrap();
        assert!(matches!(
            check_mu_membership(&[vec![0, 1, 0], vec![1, 0, 0], vec![1, 1, 1]], &d7),
            Err(Error::Integrality(_))
        ));
    }

    #[test]
    fn small_gadget_is_complete() {
        let (inst, lab) = gen_planted_rich_instance(2, 2).unwrap();
        let rel = nae(2, 2);
        let h = build_gadget(&inst, &rel, &GadgetOptions::default()).unwrap();
        assert!(!h.edges.is_empty());
        assert!(h.audit(&inst).unwrap());
        assert!(decode_and_check(&inst, &lab, &rel, &h).unwrap());
        assert!(h.side_conditions.marginals_equal && h.side_conditions.support_preserved);
        let wrong = Labelling { v_labels: lab.v_labels.iter().map(|&x| 1 - x).collect(), ..lab };
        assert!(decode_and_check(&inst, &wrong, &rel, &h).is_err());
    }

    #[test]
    fn n1_needs_thinning() {
        let (inst, lab) = gen_planted_rich_instance(1, 1).unwrap();
        let rel = nae(2, 2);
        assert!(build_gadget(&inst, &rel, &GadgetOptions::default()).is_err());
        let opts = GadgetOptions { distribution: DistributionChoice::Thinned, ..Default::default() };
        let h = build_gadget(&inst, &rel, &opts).unwrap();
        assert!(h.class_count <= 2);
        assert!(!h.side_conditions.marginals_equal);
        assert!(decode_and_check(&inst, &lab, &rel, &h).unwrap());
    }

    #[test]
    fn sampled_gadget_edges_are_valid() {
        let (inst, lab) = gen_planted_rich_instance(2, 6).unwrap();
        let rel = nae(2, 2);
        let opts = GadgetOptions { mode: GadgetMode::Sample { count: 200, seed: 7 }, ..Default::default() };
        let h = build_gadget(&inst, &rel, &opts).unwrap();
        assert!(h.realised > 0);
        assert!(h.audit(&inst).unwrap());
        assert!(decode_and_check(&inst, &lab, &rel, &h).unwrap());
        let again = build_gadget(&inst, &rel, &opts).unwrap();
        assert_eq!(again.edges, h.edges);
    }

    #[test]
    fn sampled_n6_nae3() {
        let inst = gen_sampled_instance(6, 1, 4, 4, 3).unwrap();
        assert!(!inst.richness_certificate());
        let rel = nae(2, 3);
        let opts = GadgetOptions { mode: GadgetMode::Sample { count: 300, seed: 11 }, ..Default::default() };
        let h = build_gadget(&inst, &rel, &opts).unwrap();
        assert!(h.audit(&inst).unwrap());
        assert!(!h.side_conditions.rich);
    }

    #[test]
    fn asymmetric_relation_is_rejected() {
        let inst = gen_rich_instance(1, 1).unwrap();
        let rel = FiniteRelation::new(2, 2, vec![vec![0, 1]]).unwrap();
        assert!(build_gadget(&inst, &rel, &GadgetOptions::default()).is_err());
    }
}
