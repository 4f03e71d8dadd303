//! Finite relational structures, single relations over `[c]`, the named
//! relation families, and homomorphism search.
//!
//! Elements are dense `0..domain` indices. Tuple sets are kept sorted and
//! duplicate-free so that equality is structural and serialization is
//! canonical.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util::{for_each_tuple, pow_count};

pub type Tuple = Vec<usize>;

/// One relation of a structure: an arity and a canonical tuple list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Relation {
    pub arity: usize,
    pub tuples: Vec<Tuple>,
}

impl Relation {
    fn canonical(arity: usize, mut tuples: Vec<Tuple>) -> Self {
        tuples.sort_unstable();
        tuples.dedup();
        Relation { arity, tuples }
    }

    pub fn contains(&self, t: &[usize]) -> bool {
        self.tuples.binary_search_by(|x| x.as_slice().cmp(t)).is_ok()
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}

fn validate_tuples(domain: usize, arity: usize, tuples: &[Tuple], what: &str) -> Result<()> {
    for t in tuples {
        if t.len() != arity {
            return Err(Error::structure(format!(
                "{what}: tuple {t:?} has length {}, arity is {arity}",
                t.len()
            )));
        }
        if let Some(&x) = t.iter().find(|&&x| x >= domain) {
            return Err(Error::structure(format!(
                "{what}: entry {x} of {t:?} is outside the domain of size {domain}"
            )));
        }
    }
    Ok(())
}

/// A finite relational structure: a domain size plus named relations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawStructure")]
pub struct RelStructure {
    domain: usize,
    relations: BTreeMap<String, Relation>,
}

#[derive(Deserialize)]
struct RawStructure {
    domain: usize,
    relations: BTreeMap<String, Relation>,
}

impl TryFrom<RawStructure> for RelStructure {
    type Error = Error;

    fn try_from(raw: RawStructure) -> Result<Self> {
        let mut s = RelStructure::new(raw.domain);
        for (name, rel) in raw.relations {
            s.add_relation(name, rel.arity, rel.tuples)?;
        }
        Ok(s)
    }
}

impl RelStructure {
    pub fn new(domain: usize) -> Self {
        RelStructure { domain, relations: BTreeMap::new() }
    }

    /// Adds (or replaces) a relation, validating arity and range.
    pub fn add_relation(
        &mut self,
        name: impl Into<String>,
        arity: usize,
        tuples: Vec<Tuple>,
    ) -> Result<()> {
        let name = name.into();
        validate_tuples(self.domain, arity, &tuples, &name)?;
        self.relations.insert(name, Relation::canonical(arity, tuples));
        Ok(())
    }

    pub fn with_relation(
        mut self,
        name: impl Into<String>,
        arity: usize,
        tuples: Vec<Tuple>,
    ) -> Result<Self> {
        self.add_relation(name, arity, tuples)?;
        Ok(self)
    }

    pub fn domain_size(&self) -> usize {
        self.domain
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &Relation)> {
        self.relations.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn remove_relation(&mut self, name: &str) -> Option<Relation> {
        self.relations.remove(name)
    }

    /// Symbol names with their arities.
    pub fn signature(&self) -> BTreeMap<String, usize> {
        self.relations.iter().map(|(k, v)| (k.clone(), v.arity)).collect()
    }

    pub fn tuple_count(&self) -> usize {
        self.relations.values().map(Relation::len).sum()
    }

    /// Checks that `other` has exactly the same symbols with the same arities.
    pub fn check_same_signature(&self, other: &RelStructure) -> Result<()> {
        let (a, b) = (self.signature(), other.signature());
        if a != b {
            return Err(Error::SignatureMismatch(format!("{a:?} vs {b:?}")));
        }
        Ok(())
    }

    /// Adjacency lists of the Gaifman graph (distinct elements sharing a tuple).
    pub fn gaifman_neighbours(&self) -> Vec<Vec<usize>> {
        self.gaifman_neighbours_excluding(&[])
    }

    pub(crate) fn gaifman_neighbours_excluding(&self, skip: &[&str]) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.domain];
        for (name, rel) in &self.relations {
            if skip.contains(&name.as_str()) {
                continue;
            }
            for t in &rel.tuples {
                for &a in t {
                    for &b in t {
                        if a != b {
                            adj[a].push(b);
                        }
                    }
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Connected components of the Gaifman graph, each sorted, ordered by
    /// smallest element.
    pub fn components(&self) -> Vec<Vec<usize>> {
        components_of(&self.gaifman_neighbours(), None)
    }

    /// Connectedness of the Gaifman graph. The empty structure counts as
    /// connected.
    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// The substructure induced on `keep`, renumbered in the given order.
    pub fn induced(&self, keep: &[usize]) -> RelStructure {
        let mut index = vec![usize::MAX; self.domain];
        for (i, &x) in keep.iter().enumerate() {
            index[x] = i;
        }
        let mut out = RelStructure::new(keep.len());
        for (name, rel) in &self.relations {
            let tuples = rel
                .tuples
                .iter()
                .filter(|t| t.iter().all(|&x| index[x] != usize::MAX))
                .map(|t| t.iter().map(|&x| index[x]).collect())
                .collect();
            out.relations.insert(name.clone(), Relation::canonical(rel.arity, tuples));
        }
        out
    }

    /// Image of the structure under an element map into a domain of size
    /// `domain`.
    pub fn map_elements(&self, map: &[usize], domain: usize) -> RelStructure {
        let mut out = RelStructure::new(domain);
        for (name, rel) in &self.relations {
            let tuples = rel.tuples.iter().map(|t| t.iter().map(|&x| map[x]).collect()).collect();
            out.relations.insert(name.clone(), Relation::canonical(rel.arity, tuples));
        }
        out
    }

    /// Disjoint union; the elements of `other` are shifted past `self`.
    pub fn disjoint_union(&self, other: &RelStructure) -> Result<RelStructure> {
        self.check_same_signature(other)?;
        let shift = self.domain;
        let mut out = RelStructure::new(self.domain + other.domain);
        for (name, rel) in &self.relations {
            let mut tuples = rel.tuples.clone();
            tuples.extend(
                other.relations[name].tuples.iter().map(|t| t.iter().map(|&x| x + shift).collect()),
            );
            out.relations.insert(name.clone(), Relation::canonical(rel.arity, tuples));
        }
        Ok(out)
    }
}

/// Connected components of a graph given by adjacency lists, optionally
/// ignoring one vertex.
pub(crate) fn components_of(adj: &[Vec<usize>], removed: Option<usize>) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut seen = vec![false; n];
    if let Some(r) = removed {
        seen[r] = true;
    }
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut comp = Vec::new();
        while let Some(x) = stack.pop() {
            comp.push(x);
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// A single relation `R ⊆ [c]^r`, used as one side of a promise template.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawRelation")]
pub struct FiniteRelation {
    domain: usize,
    arity: usize,
    tuples: Vec<Tuple>,
}

#[derive(Deserialize)]
struct RawRelation {
    domain: usize,
    arity: usize,
    tuples: Vec<Tuple>,
}

impl TryFrom<RawRelation> for FiniteRelation {
    type Error = Error;

    fn try_from(raw: RawRelation) -> Result<Self> {
        FiniteRelation::new(raw.domain, raw.arity, raw.tuples)
    }
}

impl FiniteRelation {
    pub fn new(domain: usize, arity: usize, tuples: Vec<Tuple>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::structure("relation arity must be at least 1"));
        }
        validate_tuples(domain, arity, &tuples, "relation")?;
        let Relation { tuples, .. } = Relation::canonical(arity, tuples);
        Ok(FiniteRelation { domain, arity, tuples })
    }

    /// Builds the relation of all tuples of `[domain]^arity` accepted by `keep`.
    pub fn from_predicate(domain: usize, arity: usize, mut keep: impl FnMut(&[usize]) -> bool) -> Self {
        let mut tuples = Vec::new();
        if arity == 0 {
            return FiniteRelation { domain, arity: 1, tuples };
        }
        for_each_tuple(domain, arity, |t| {
            if keep(t) {
                tuples.push(t.to_vec());
            }
            true
        });
        FiniteRelation { domain, arity, tuples }
    }

    pub fn domain_size(&self) -> usize {
        self.domain
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn tuples(&self) -> &[Tuple] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, t: &[usize]) -> bool {
        self.tuples.binary_search_by(|x| x.as_slice().cmp(t)).is_ok()
    }

    pub fn index_of(&self, t: &[usize]) -> Option<usize> {
        self.tuples.binary_search_by(|x| x.as_slice().cmp(t)).ok()
    }

    /// The relation viewed as a one-symbol structure.
    pub fn to_structure(&self, symbol: &str) -> RelStructure {
        let mut s = RelStructure::new(self.domain);
        s.relations.insert(
            symbol.to_string(),
            Relation { arity: self.arity, tuples: self.tuples.clone() },
        );
        s
    }

    /// Values of the domain occurring in some tuple.
    pub fn used_values(&self) -> Vec<usize> {
        let mut used = vec![false; self.domain];
        for t in &self.tuples {
            for &x in t {
                used[x] = true;
            }
        }
        (0..self.domain).filter(|&a| used[a]).collect()
    }

    /// Closed under every permutation of coordinates. Adjacent transpositions
    /// generate the symmetric group, so closure under them suffices.
    pub fn is_symmetric(&self) -> bool {
        let mut buf = vec![0; self.arity];
        self.tuples.iter().all(|t| {
            (0..self.arity.saturating_sub(1)).all(|i| {
                buf.copy_from_slice(t);
                buf.swap(i, i + 1);
                self.contains(&buf)
            })
        })
    }
}

/// `U^(c)_{k,ℓ}`: all ℓ-tuples over `[c]` in which every colour occurs fewer
/// than `k` times.
pub fn make_urel(c: usize, k: usize, l: usize) -> FiniteRelation {
    FiniteRelation::from_predicate(c, l, |t| {
        let mut counts = vec![0usize; c];
        for &x in t {
            counts[x] += 1;
        }
        counts.iter().all(|&m| m < k)
    })
}

/// Not-all-equal: every non-constant `r`-tuple over `[d]`.
pub fn nae(d: usize, r: usize) -> FiniteRelation {
    FiniteRelation::from_predicate(d, r, |t| t.iter().any(|&x| x != t[0]))
}

/// `k`-in-`ℓ`: 0/1 tuples of length ℓ with exactly `k` ones.
pub fn kinl(k: usize, l: usize) -> Result<FiniteRelation> {
    if k > l {
        return Err(Error::param(format!("{k}-in-{l}: k exceeds ℓ")));
    }
    Ok(FiniteRelation::from_predicate(2, l, |t| t.iter().sum::<usize>() == k))
}

/// Linearly ordered colouring relation: `r`-tuples over `[c]` whose maximum
/// occurs exactly once.
pub fn lo(c: usize, r: usize) -> FiniteRelation {
    FiniteRelation::from_predicate(c, r, |t| {
        let max = t.iter().copied().max().unwrap_or(0);
        t.iter().filter(|&&x| x == max).count() == 1
    })
}

/// The symbol used for graph edges throughout the crate.
pub const EDGE: &str = "E";

/// The loopless complete graph `K_k` with symmetric binary symbol `E`.
pub fn clique(k: usize) -> RelStructure {
    let tuples = (0..k).flat_map(|a| (0..k).filter(move |&b| b != a).map(move |b| vec![a, b])).collect();
    RelStructure::new(k).with_relation(EDGE, 2, tuples).expect("clique tuples are in range")
}

/// An undirected graph as a structure with symmetric `E`.
pub fn graph(vertices: usize, edges: &[(usize, usize)]) -> Result<RelStructure> {
    let tuples = edges.iter().flat_map(|&(a, b)| [vec![a, b], vec![b, a]]).collect();
    RelStructure::new(vertices).with_relation(EDGE, 2, tuples)
}

/// The named relation families, parseable from `nae:2:3`, `kinl:2:4`,
/// `lo:3:3`, `urel:3:2:2` and `clique:4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedRelation {
    Nae { d: usize, r: usize },
    Kinl { k: usize, l: usize },
    Lo { c: usize, r: usize },
    Urel { c: usize, k: usize, l: usize },
    Clique { k: usize },
}

pub enum Named {
    Relation(FiniteRelation),
    Structure(RelStructure),
}

impl NamedRelation {
    pub fn build(self) -> Result<Named> {
        Ok(match self {
            NamedRelation::Nae { d, r } => Named::Relation(nae(d, r)),
            NamedRelation::Kinl { k, l } => Named::Relation(kinl(k, l)?),
            NamedRelation::Lo { c, r } => Named::Relation(lo(c, r)),
            NamedRelation::Urel { c, k, l } => Named::Relation(make_urel(c, k, l)),
            NamedRelation::Clique { k } => Named::Structure(clique(k)),
        })
    }

    /// Builds a single relation; cliques are rejected.
    pub fn relation(self) -> Result<FiniteRelation> {
        match self.build()? {
            Named::Relation(r) => Ok(r),
            Named::Structure(_) => Err(Error::param("clique is a structure, not a single relation")),
        }
    }
}

impl FromStr for NamedRelation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let kind = parts.next().unwrap_or_default();
        let nums = parts
            .map(|p| p.parse::<usize>().map_err(|_| Error::param(format!("bad number {p:?} in {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if nums.contains(&0) {
            return Err(Error::param(format!("parameters of {s:?} must be positive")));
        }
        let named = match (kind, nums.as_slice()) {
            ("nae", &[d, r]) => NamedRelation::Nae { d, r },
            ("kinl", &[k, l]) if k <= l => NamedRelation::Kinl { k, l },
            ("kinl", &[k, l]) => return Err(Error::param(format!("{k}-in-{l}: k exceeds ℓ"))),
            ("lo", &[c, r]) => NamedRelation::Lo { c, r },
            ("urel", &[c, k, l]) => NamedRelation::Urel { c, k, l },
            ("clique", &[k]) => NamedRelation::Clique { k },
            _ => return Err(Error::param(format!("unknown relation spec {s:?}"))),
        };
        Ok(named)
    }
}

impl fmt::Display for NamedRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            NamedRelation::Nae { d, r } => write!(f, "nae:{d}:{r}"),
            NamedRelation::Kinl { k, l } => write!(f, "kinl:{k}:{l}"),
            NamedRelation::Lo { c, r } => write!(f, "lo:{c}:{r}"),
            NamedRelation::Urel { c, k, l } => write!(f, "urel:{c}:{k}:{l}"),
            NamedRelation::Clique { k } => write!(f, "clique:{k}"),
        }
    }
}

/// A map from source elements to target elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Homomorphism {
    pub mapping: Vec<usize>,
}

/// Scans every source tuple and checks that its image is a target tuple.
pub fn is_homomorphism(source: &RelStructure, target: &RelStructure, mapping: &[usize]) -> bool {
    if mapping.len() != source.domain || mapping.iter().any(|&x| x >= target.domain) {
        return false;
    }
    source.relations.iter().all(|(name, rel)| {
        let Some(trel) = target.relations.get(name) else {
            return rel.tuples.is_empty();
        };
        rel.tuples.iter().all(|t| {
            let img: Tuple = t.iter().map(|&x| mapping[x]).collect();
            trel.contains(&img)
        })
    })
}

/// Backtracking homomorphism search with generalized arc-consistency
/// filtering on each constraint touched by an assignment.
///
/// Variables are tried by descending Gaifman degree (ties by index); values
/// ascending.
pub struct HomSearch<'a> {
    source: &'a RelStructure,
    target: &'a RelStructure,
    constraints: Vec<(usize, &'a Tuple)>,
    target_rels: Vec<&'a Relation>,
    incident: Vec<Vec<usize>>,
    order: Vec<usize>,
    initial: Vec<Vec<bool>>,
}

impl<'a> HomSearch<'a> {
    pub fn new(source: &'a RelStructure, target: &'a RelStructure) -> Result<Self> {
        source.check_same_signature(target)?;
        let mut constraints = Vec::new();
        let mut target_rels = Vec::new();
        for (i, (name, rel)) in source.relations.iter().enumerate() {
            target_rels.push(&target.relations[name]);
            constraints.extend(rel.tuples.iter().map(|t| (i, t)));
        }
        let mut incident = vec![Vec::new(); source.domain];
        for (ci, (_, t)) in constraints.iter().enumerate() {
            let mut vars: Vec<usize> = t.to_vec();
            vars.sort_unstable();
            vars.dedup();
            for v in vars {
                incident[v].push(ci);
            }
        }
        let degree: Vec<usize> = source.gaifman_neighbours().iter().map(Vec::len).collect();
        let mut order: Vec<usize> = (0..source.domain).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(degree[v]), v));
        let initial = vec![vec![true; target.domain]; source.domain];
        Ok(HomSearch { source, target, constraints, target_rels, incident, order, initial })
    }

    /// Restricts the values allowed for `var`.
    pub fn restrict(&mut self, var: usize, allowed: impl Fn(usize) -> bool) {
        for (val, slot) in self.initial[var].iter_mut().enumerate() {
            *slot = *slot && allowed(val);
        }
    }

    pub fn first(&self) -> Option<Homomorphism> {
        let mut found = None;
        self.run(&mut |m| {
            found = Some(Homomorphism { mapping: m.to_vec() });
            false
        });
        found
    }

    /// Every homomorphism, in lexicographic order of the mapping tuple.
    pub fn all(&self) -> Vec<Homomorphism> {
        let mut out = Vec::new();
        self.run(&mut |m| {
            out.push(Homomorphism { mapping: m.to_vec() });
            true
        });
        out.sort();
        out
    }

    pub fn count(&self) -> usize {
        let mut n = 0;
        self.run(&mut |_| {
            n += 1;
            true
        });
        n
    }

    /// Runs the search, calling `visit` with each solution until it returns
    /// `false`.
    pub fn run(&self, visit: &mut dyn FnMut(&[usize]) -> bool) {
        let mut domains = self.initial.clone();
        // Unary pass over every constraint before branching.
        for ci in 0..self.constraints.len() {
            if !self.revise(ci, &mut domains) {
                return;
            }
        }
        let mut assignment = vec![usize::MAX; self.source.domain];
        self.extend(0, &mut assignment, &domains, visit);
    }

    fn extend(
        &self,
        depth: usize,
        assignment: &mut Vec<usize>,
        domains: &[Vec<bool>],
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if depth == self.order.len() {
            debug_assert!(is_homomorphism(self.source, self.target, assignment));
            return visit(assignment);
        }
        let var = self.order[depth];
        for val in 0..self.target.domain {
            if !domains[var][val] {
                continue;
            }
            let mut next = domains.to_vec();
            next[var].iter_mut().enumerate().for_each(|(i, b)| *b = i == val);
            assignment[var] = val;
            if self.propagate(var, &mut next) && !self.extend(depth + 1, assignment, &next, visit) {
                assignment[var] = usize::MAX;
                return false;
            }
            assignment[var] = usize::MAX;
        }
        true
    }

    /// Revises every constraint incident to `var`, cascading to constraints of
    /// variables whose domains shrink.
    fn propagate(&self, var: usize, domains: &mut [Vec<bool>]) -> bool {
        let mut queue: Vec<usize> = self.incident[var].clone();
        let mut queued = vec![false; self.constraints.len()];
        for &c in &queue {
            queued[c] = true;
        }
        while let Some(ci) = queue.pop() {
            queued[ci] = false;
            let before: Vec<usize> =
                self.constraints[ci].1.iter().map(|&x| domains[x].iter().filter(|&&b| b).count()).collect();
            if !self.revise(ci, domains) {
                return false;
            }
            for (pos, &x) in self.constraints[ci].1.iter().enumerate() {
                if domains[x].iter().filter(|&&b| b).count() < before[pos] {
                    for &other in &self.incident[x] {
                        if other != ci && !queued[other] {
                            queued[other] = true;
                            queue.push(other);
                        }
                    }
                }
            }
        }
        true
    }

    /// Keeps only values supported by some target tuple consistent with all
    /// current domains of the constraint's scope.
    fn revise(&self, ci: usize, domains: &mut [Vec<bool>]) -> bool {
        let (ri, scope) = self.constraints[ci];
        let arity = scope.len();
        let mut support: Vec<Vec<bool>> = scope.iter().map(|_| vec![false; self.target.domain]).collect();
        for t in &self.target_rels[ri].tuples {
            let ok = (0..arity).all(|p| {
                domains[scope[p]][t[p]]
                    && (0..p).all(|q| scope[q] != scope[p] || t[q] == t[p])
            });
            if ok {
                for p in 0..arity {
                    support[p][t[p]] = true;
                }
            }
        }
        for (p, &x) in scope.iter().enumerate() {
            for (val, slot) in domains[x].iter_mut().enumerate() {
                *slot = *slot && support[p][val];
            }
            if !domains[x].iter().any(|&b| b) {
                return false;
            }
        }
        true
    }
}

pub fn find_homomorphism(source: &RelStructure, target: &RelStructure) -> Result<Option<Homomorphism>> {
    Ok(HomSearch::new(source, target)?.first())
}

pub fn enumerate_homomorphisms(source: &RelStructure, target: &RelStructure) -> Result<Vec<Homomorphism>> {
    Ok(HomSearch::new(source, target)?.all())
}

/// Number of candidate maps `|T|^|S|` an exhaustive scan would visit.
pub fn candidate_count(source: &RelStructure, target: &RelStructure) -> u128 {
    pow_count(target.domain, source.domain)
}

/// A 2-to-1 map `[2n] → [n]` stored 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct TwoToOneMap {
    n: usize,
    table: Vec<usize>,
}

impl TryFrom<Vec<usize>> for TwoToOneMap {
    type Error = Error;

    fn try_from(table: Vec<usize>) -> Result<Self> {
        TwoToOneMap::new(table)
    }
}

impl From<TwoToOneMap> for Vec<usize> {
    fn from(m: TwoToOneMap) -> Self {
        m.table
    }
}

impl TwoToOneMap {
    pub fn new(table: Vec<usize>) -> Result<Self> {
        if table.is_empty() || !table.len().is_multiple_of(2) {
            return Err(Error::param(format!("2-to-1 table must have positive even length, got {}", table.len())));
        }
        let n = table.len() / 2;
        let mut hits = vec![0usize; n];
        for &x in &table {
            if x >= n {
                return Err(Error::param(format!("2-to-1 value {x} outside [0, {n})")));
            }
            hits[x] += 1;
        }
        if let Some(i) = hits.iter().position(|&h| h != 2) {
            return Err(Error::param(format!("value {i} has {} preimages, expected 2", hits[i])));
        }
        Ok(TwoToOneMap { n, table })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, j: usize) -> usize {
        self.table[j]
    }

    /// The two preimages of `i`, ascending.
    pub fn fibre(&self, i: usize) -> [usize; 2] {
        let mut it = self.table.iter().enumerate().filter(|&(_, &x)| x == i).map(|(j, _)| j);
        [it.next().expect("2-to-1"), it.next().expect("2-to-1")]
    }
}

/// The pullback `y_j = x_{π(j)}` of a length-`n` tuple along `π: [2n] → [n]`.
pub fn pullback<T: Copy>(x: &[T], pi: &TwoToOneMap) -> Result<Vec<T>> {
    if x.len() != pi.n {
        return Err(Error::LengthMismatch { expected: pi.n, found: x.len() });
    }
    Ok(pi.table.iter().map(|&j| x[j]).collect())
}
