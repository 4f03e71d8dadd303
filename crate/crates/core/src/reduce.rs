//! Compilers between forbidden-pattern problems and promise CSPs.
//!
//! [`build_template_pair`] turns two disjunctions of pattern families into a
//! pair of structures `(S, T)` over a derived signature with one symbol per
//! reduct of the target families plus the auxiliary binary symbol `~`.
//! [`sigma_reduce`] maps a pattern-problem instance to a PCSP instance by
//! listing homomorphisms; [`tau_reduce`] goes back by planting a copy of each
//! reduct on every constraint tuple, which is sound only on inputs of high
//! girth (checked by [`girth_exceeds`]).

use std::collections::{BTreeMap, VecDeque};
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mmsnp::{check_expansion_free, find_recolouring, PatternFamily};
use crate::structure::{
    enumerate_homomorphisms, find_homomorphism, FiniteRelation, Homomorphism, RelStructure, Tuple,
};
use crate::util::for_each_tuple;

/// The auxiliary symbol that is full inside every template component.
pub const SIM: &str = "~";

/// One derived symbol `R_G`, standing for reduct `G` of target family `j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateSymbol {
    pub name: String,
    pub family: usize,
    pub reduct: RelStructure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplatePair {
    pub source: RelStructure,
    pub target: RelStructure,
    pub symbols: Vec<TemplateSymbol>,
    /// Element ranges of the components `S_i` inside `source`.
    pub source_parts: Vec<Range<usize>>,
    /// Element ranges of the components `T_j` inside `target`.
    pub target_parts: Vec<Range<usize>>,
    /// For each source family `i`, the target family `j` it recolours into.
    pub pairing: Vec<usize>,
    /// Signature of the pattern families (the instance language).
    pub input_signature: BTreeMap<String, usize>,
    /// Largest pattern across all families.
    pub max_pattern_size: usize,
}

fn full_tuples(domain: usize, arity: usize) -> Vec<Tuple> {
    let mut out = Vec::new();
    for_each_tuple(domain, arity, |t| {
        out.push(t.to_vec());
        true
    });
    out
}

fn component(
    domain: usize,
    symbols: &[TemplateSymbol],
    own_family: usize,
    allowed: impl Fn(&TemplateSymbol, &[usize]) -> bool,
) -> Result<RelStructure> {
    let mut s = RelStructure::new(domain);
    for sym in symbols {
        let arity = sym.reduct.domain_size();
        let mut tuples = full_tuples(domain, arity);
        if sym.family == own_family {
            tuples.retain(|t| allowed(sym, t));
        }
        s.add_relation(sym.name.clone(), arity, tuples)?;
    }
    s.add_relation(SIM, 2, full_tuples(domain, 2))?;
    Ok(s)
}

/// Builds `S = ⊔ S_i` and `T = ⊔ T_j`.
///
/// `T_j` lets `R_G` (for `G` a reduct of `G_j`) hold every colouring that is
/// not itself a forbidden pattern of `G_j`; `S_i` lets it hold every
/// `F_i`-free colouring, where `j` is the first target family `F_i`
/// recolours into. Symbols of other families and `~` are full.
pub fn build_template_pair(sources: &[PatternFamily], targets: &[PatternFamily]) -> Result<TemplatePair> {
    let signature = sources
        .first()
        .or(targets.first())
        .map(|f| f.signature().clone())
        .ok_or_else(|| Error::param("at least one family is required"))?;
    for f in sources.iter().chain(targets) {
        if *f.signature() != signature {
            return Err(Error::SignatureMismatch(format!("{:?} vs {signature:?}", f.signature())));
        }
    }
    let mut pairing = Vec::with_capacity(sources.len());
    for (i, f) in sources.iter().enumerate() {
        let mut paired = None;
        for (j, g) in targets.iter().enumerate() {
            if find_recolouring(f, g)?.is_some() {
                paired = Some(j);
                break;
            }
        }
        pairing.push(paired.ok_or(Error::MissingContainment { index: i })?);
    }

    let mut symbols = Vec::new();
    for (j, g) in targets.iter().enumerate() {
        for (gi, reduct) in g.reducts().into_iter().enumerate() {
            symbols.push(TemplateSymbol { name: format!("R_{j}_{gi}"), family: j, reduct });
        }
    }

    let mut target: Option<RelStructure> = None;
    let mut target_parts = Vec::new();
    for (j, g) in targets.iter().enumerate() {
        let part = component(g.colours(), &symbols, j, |sym, t| !g.contains(&sym.reduct, t))?;
        let start = target.as_ref().map_or(0, RelStructure::domain_size);
        target_parts.push(start..start + part.domain_size());
        target = Some(match target {
            None => part,
            Some(acc) => acc.disjoint_union(&part)?,
        });
    }

    let mut source: Option<RelStructure> = None;
    let mut source_parts = Vec::new();
    for (i, f) in sources.iter().enumerate() {
        let part = component(f.colours(), &symbols, pairing[i], |sym, t| {
            check_expansion_free(&sym.reduct, t, f).expect("reduct shares the family signature")
        })?;
        let start = source.as_ref().map_or(0, RelStructure::domain_size);
        source_parts.push(start..start + part.domain_size());
        source = Some(match source {
            None => part,
            Some(acc) => acc.disjoint_union(&part)?,
        });
    }

    let empty = || {
        let mut s = RelStructure::new(0);
        for sym in &symbols {
            s.add_relation(sym.name.clone(), sym.reduct.domain_size(), vec![]).expect("empty relation");
        }
        s.add_relation(SIM, 2, vec![]).expect("empty relation");
        s
    };
    let source = source.unwrap_or_else(empty);
    let target = target.unwrap_or_else(empty);

    if find_homomorphism(&source, &target)?.is_none() {
        return Err(Error::structure("no homomorphism from the source template to the target template"));
    }
    let max_pattern_size = sources.iter().chain(targets).map(PatternFamily::max_pattern_size).max().unwrap_or(0);
    Ok(TemplatePair {
        source,
        target,
        symbols,
        source_parts,
        target_parts,
        pairing,
        input_signature: signature,
        max_pattern_size,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Source,
    Target,
}

impl TemplatePair {
    fn side(&self, side: Side) -> (&RelStructure, &[Range<usize>]) {
        match side {
            Side::Source => (&self.source, &self.source_parts),
            Side::Target => (&self.target, &self.target_parts),
        }
    }

    /// One component `S_i` or `T_j`, optionally without `~`.
    pub fn component(&self, side: Side, index: usize, with_sim: bool) -> RelStructure {
        let (s, parts) = self.side(side);
        let keep: Vec<usize> = parts[index].clone().collect();
        let mut c = s.induced(&keep);
        if !with_sim {
            c.remove_relation(SIM);
        }
        c
    }

    /// The signature of PCSP instances, with or without `~`.
    pub fn instance_signature(&self, with_sim: bool) -> BTreeMap<String, usize> {
        let mut sig: BTreeMap<String, usize> =
            self.symbols.iter().map(|s| (s.name.clone(), s.reduct.domain_size())).collect();
        if with_sim {
            sig.insert(SIM.to_string(), 2);
        }
        sig
    }

    /// Searches for a homomorphism from a PCSP instance into one side. An
    /// instance without `~` is read as having `~` full, so its image lies in a
    /// single component.
    pub fn instance_maps_to(&self, instance: &RelStructure, side: Side) -> Result<Option<Homomorphism>> {
        if instance.relation(SIM).is_some() {
            let (s, _) = self.side(side);
            return find_homomorphism(instance, s);
        }
        let (_, parts) = self.side(side);
        for (idx, range) in parts.iter().enumerate() {
            let comp = self.component(side, idx, false);
            if let Some(h) = find_homomorphism(instance, &comp)? {
                let mapping = h.mapping.into_iter().map(|x| x + range.start).collect();
                return Ok(Some(Homomorphism { mapping }));
            }
        }
        Ok(None)
    }
}

/// Template pair of the monochromatic clique families `(F^(c)_k, F^(d)_ℓ)`.
pub fn clique_template_pair(c: usize, k: usize, d: usize, l: usize) -> Result<TemplatePair> {
    use crate::mmsnp::mono_clique_family;
    build_template_pair(&[mono_clique_family(c, k)], &[mono_clique_family(d, l)])
}

/// Reads the single derived relation of a one-symbol component as a
/// [`FiniteRelation`].
pub fn component_relation(pair: &TemplatePair, side: Side, index: usize, symbol: usize) -> Result<FiniteRelation> {
    let comp = pair.component(side, index, false);
    let sym = &pair.symbols[symbol];
    let rel = comp.relation(&sym.name).expect("symbol present");
    FiniteRelation::new(comp.domain_size(), rel.arity, rel.tuples.clone())
}

/// `σ(X)`: same domain as `X`; `R_G` lists every homomorphism `G → X` as a
/// tuple in `G`'s element order. `~` is `X²` when `materialize_sim` is set
/// and omitted (implicitly full) otherwise.
pub fn sigma_reduce(x: &RelStructure, pair: &TemplatePair, materialize_sim: bool) -> Result<RelStructure> {
    if x.signature() != pair.input_signature {
        return Err(Error::SignatureMismatch(format!(
            "instance has {:?}, templates expect {:?}",
            x.signature(),
            pair.input_signature
        )));
    }
    let mut out = RelStructure::new(x.domain_size());
    for sym in &pair.symbols {
        let tuples = enumerate_homomorphisms(&sym.reduct, x)?.into_iter().map(|h| h.mapping).collect();
        out.add_relation(sym.name.clone(), sym.reduct.domain_size(), tuples)?;
    }
    if materialize_sim {
        out.add_relation(SIM, 2, full_tuples(x.domain_size(), 2))?;
    }
    Ok(out)
}

/// Outcome of a girth check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GirthReport {
    pub bound: usize,
    /// True iff every set of at most `bound` tuples spans more elements than
    /// the sum of `(arity − 1)`.
    pub verdict: bool,
    /// A violating tuple set when the verdict is false.
    pub witness: Option<Vec<(String, Tuple)>>,
}

/// Girth check via the tuple/element incidence multigraph: a violating set of
/// at most `k` tuples exists iff that graph has a cycle through at most `k`
/// tuple nodes. A tuple repeating an element is a one-tuple cycle.
pub fn girth_exceeds(s: &RelStructure, k: usize) -> GirthReport {
    let mut occurrences: Vec<(String, &Tuple)> = Vec::new();
    for (name, rel) in s.relations() {
        occurrences.extend(rel.tuples.iter().map(|t| (name.to_string(), t)));
    }
    let tuples = occurrences.len();
    let nodes = tuples + s.domain_size();
    // Adjacency entries are (neighbour, edge id).
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nodes];
    let mut edge_id = 0;
    for (ti, (_, t)) in occurrences.iter().enumerate() {
        for &x in t.iter() {
            adj[ti].push((tuples + x, edge_id));
            adj[tuples + x].push((ti, edge_id));
            edge_id += 1;
        }
    }

    let mut best: Option<Vec<usize>> = None;
    let mut dist = vec![usize::MAX; nodes];
    let mut parent = vec![(usize::MAX, usize::MAX); nodes];
    for root in 0..tuples {
        let limit = best.as_ref().map_or(k, |b| b.len().saturating_sub(1).min(k));
        if limit == 0 {
            break;
        }
        let mut touched = vec![root];
        dist[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            // Tuple nodes sit at even depth; a walk of graph length 2t visits
            // at most t tuple nodes, so depth 2·limit suffices.
            if dist[u] >= 2 * limit {
                continue;
            }
            for &(w, e) in &adj[u] {
                if e == parent[u].1 {
                    continue;
                }
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = (u, e);
                    touched.push(w);
                    queue.push_back(w);
                } else {
                    let mut set: Vec<usize> = path_to_root(&parent, u)
                        .into_iter()
                        .chain(path_to_root(&parent, w))
                        .filter(|&n| n < tuples)
                        .collect();
                    set.sort_unstable();
                    set.dedup();
                    if set.len() <= limit && best.as_ref().is_none_or(|b| set.len() < b.len()) {
                        best = Some(set);
                    }
                }
            }
        }
        for n in touched {
            dist[n] = usize::MAX;
            parent[n] = (usize::MAX, usize::MAX);
        }
    }

    match best {
        Some(set) if set.len() <= k => {
            let witness: Vec<(String, Tuple)> =
                set.iter().map(|&ti| (occurrences[ti].0.clone(), occurrences[ti].1.clone())).collect();
            debug_assert!(violates_girth(&witness));
            GirthReport { bound: k, verdict: false, witness: Some(witness) }
        }
        _ => GirthReport { bound: k, verdict: true, witness: None },
    }
}

fn path_to_root(parent: &[(usize, usize)], mut node: usize) -> Vec<usize> {
    let mut out = vec![node];
    while parent[node].0 != usize::MAX {
        node = parent[node].0;
        out.push(node);
    }
    out
}

/// Whether the tuples span at most `Σ (arity − 1)` distinct elements.
pub fn violates_girth(tuples: &[(String, Tuple)]) -> bool {
    let mut elems: Vec<usize> = tuples.iter().flat_map(|(_, t)| t.iter().copied()).collect();
    elems.sort_unstable();
    elems.dedup();
    let budget: isize = tuples.iter().map(|(_, t)| t.len() as isize - 1).sum();
    (elems.len() as isize) <= budget
}

/// `τ(I)`: the instance-language structure on `I`'s domain obtained by
/// placing a copy of `G` on every tuple of `R_G`.
///
/// `k` must exceed every pattern size and `I` must have girth above `k`
/// (ignoring `~`). `~`, when present, must be full.
pub fn tau_reduce(instance: &RelStructure, pair: &TemplatePair, k: usize) -> Result<RelStructure> {
    let with_sim = instance.relation(SIM).is_some();
    if instance.signature() != pair.instance_signature(with_sim) {
        return Err(Error::SignatureMismatch(format!(
            "instance has {:?}, templates expect {:?}",
            instance.signature(),
            pair.instance_signature(with_sim)
        )));
    }
    if let Some(sim) = instance.relation(SIM) {
        let n = instance.domain_size();
        if sim.len() != n * n {
            return Err(Error::structure("the ~ relation of a τ input must be full"));
        }
    }
    if k <= pair.max_pattern_size {
        return Err(Error::param(format!(
            "girth bound {k} must exceed the largest pattern size {}",
            pair.max_pattern_size
        )));
    }
    let mut stripped = instance.clone();
    stripped.remove_relation(SIM);
    let report = girth_exceeds(&stripped, k);
    if !report.verdict {
        return Err(Error::Girth(Box::new(report)));
    }

    let mut buckets: BTreeMap<String, (usize, Vec<Tuple>)> =
        pair.input_signature.iter().map(|(name, &arity)| (name.clone(), (arity, Vec::new()))).collect();
    for sym in &pair.symbols {
        let rel = instance.relation(&sym.name).expect("signature checked");
        for t in &rel.tuples {
            for (name, grel) in sym.reduct.relations() {
                let bucket = &mut buckets.get_mut(name).expect("reduct over input signature").1;
                bucket.extend(grel.tuples.iter().map(|g| g.iter().map(|&x| t[x]).collect::<Tuple>()));
            }
        }
    }
    let mut out = RelStructure::new(instance.domain_size());
    for (name, (arity, tuples)) in buckets {
        out.add_relation(name, arity, tuples)?;
    }
    Ok(out)
}

/// Checks the chain `A → B → C → D`.
pub fn sandwich_check(a: &RelStructure, b: &RelStructure, c: &RelStructure, d: &RelStructure) -> Result<bool> {
    Ok(find_homomorphism(a, b)?.is_some()
        && find_homomorphism(b, c)?.is_some()
        && find_homomorphism(c, d)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mmsnp::mono_clique_family;
    use crate::structure::{clique, graph, kinl, make_urel, nae, EDGE};

    #[test]
    fn clique_pair_matches_urel_and_nae() {
        let pair = clique_template_pair(2, 3, 2, 4).unwrap();
        assert_eq!(pair.symbols.len(), 1);
        assert_eq!(pair.source.domain_size(), 2);
        let s = component_relation(&pair, Side::Source, 0, 0).unwrap();
        let t = component_relation(&pair, Side::Target, 0, 0).unwrap();
        assert_eq!(s, make_urel(2, 3, 4));
        assert_eq!(s.len(), 6);
        assert_eq!(t, nae(2, 4));
        assert_eq!(t.len(), 14);
    }

    #[test]
    fn same_family_gives_nae3_on_both_sides() {
        let pair = clique_template_pair(2, 3, 2, 3).unwrap();
        assert_eq!(pair.source, pair.target);
        assert_eq!(component_relation(&pair, Side::Target, 0, 0).unwrap(), nae(2, 3));
    }

    #[test]
    fn single_colour_pair_has_one_element_domains() {
        let pair = clique_template_pair(1, 2, 1, 2).unwrap();
        assert_eq!(pair.source.domain_size(), 1);
        assert_eq!(pair.target.domain_size(), 1);
    }

    #[test]
    fn missing_containment_is_reported() {
        let err = build_template_pair(&[mono_clique_family(3, 2)], &[mono_clique_family(2, 2)]).unwrap_err();
        assert!(matches!(err, Error::MissingContainment { index: 0 }));
    }

    #[test]
    fn sigma_examples() {
        let pair = clique_template_pair(2, 3, 2, 4).unwrap();
        let name = &pair.symbols[0].name;
        let s = sigma_reduce(&clique(4), &pair, false).unwrap();
        assert_eq!(s.relation(name).unwrap().len(), 24);
        assert!(s.relation(SIM).is_none());
        let s = sigma_reduce(&clique(3), &pair, true).unwrap();
        assert!(s.relation(name).unwrap().is_empty());
        assert_eq!(s.relation(SIM).unwrap().len(), 9);

        let pair3 = clique_template_pair(2, 3, 2, 3).unwrap();
        let x = graph(4, &[(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
        let s = sigma_reduce(&x, &pair3, false).unwrap();
        let rel = s.relation(&pair3.symbols[0].name).unwrap();
        assert_eq!(rel.len(), 6);
        assert!(rel.tuples.iter().all(|t| !t.contains(&3)));
    }

    #[test]
    fn girth_examples() {
        let rep = girth_exceeds(&clique(3).induced(&[0, 1, 2]), 3);
        // K_3 stores both orientations; (a,b),(b,a) already form a 2-cycle.
        assert!(!rep.verdict);
        let tri = RelStructure::new(3).with_relation(EDGE, 2, vec![vec![0, 1], vec![1, 2], vec![2, 0]]).unwrap();
        let rep = girth_exceeds(&tri, 3);
        assert!(!rep.verdict);
        let w = rep.witness.unwrap();
        assert_eq!(w.len(), 3);
        assert!(violates_girth(&w));
        assert!(girth_exceeds(&tri, 2).verdict);
        let looped = RelStructure::new(1).with_relation(EDGE, 2, vec![vec![0, 0]]).unwrap();
        let rep = girth_exceeds(&looped, 1);
        assert!(!rep.verdict);
        assert_eq!(rep.witness.unwrap().len(), 1);
    }

    #[test]
    fn tau_examples() {
        let pair = clique_template_pair(2, 3, 2, 3).unwrap();
        let name = pair.symbols[0].name.clone();
        let one = RelStructure::new(3).with_relation(name.clone(), 3, vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(tau_reduce(&one, &pair, 4).unwrap(), clique(3));

        let two = RelStructure::new(6).with_relation(name.clone(), 3, vec![vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        let g = tau_reduce(&two, &pair, 4).unwrap();
        assert_eq!(g.components().len(), 2);
        assert_eq!(g.tuple_count(), 12);

        let pair4 = clique_template_pair(2, 3, 2, 4).unwrap();
        let n4 = pair4.symbols[0].name.clone();
        let one4 = RelStructure::new(4).with_relation(n4, 4, vec![vec![0, 1, 2, 3]]).unwrap();
        assert_eq!(tau_reduce(&one4, &pair4, 5).unwrap(), clique(4));
    }

    #[test]
    fn tau_rejects_low_girth_and_partial_sim() {
        let pair = clique_template_pair(2, 3, 2, 3).unwrap();
        let name = pair.symbols[0].name.clone();
        let cyc = RelStructure::new(4).with_relation(name.clone(), 3, vec![vec![0, 1, 2], vec![0, 1, 3]]).unwrap();
        assert!(matches!(tau_reduce(&cyc, &pair, 4), Err(Error::Girth(_))));
        let one = RelStructure::new(3).with_relation(name.clone(), 3, vec![vec![0, 1, 2]]).unwrap();
        assert!(tau_reduce(&one, &pair, 3).is_err());
        let partial = one.clone().with_relation(SIM, 2, vec![vec![0, 1]]).unwrap();
        assert!(tau_reduce(&partial, &pair, 4).is_err());
        let full = one.with_relation(SIM, 2, full_tuples(3, 2)).unwrap();
        assert_eq!(tau_reduce(&full, &pair, 4).unwrap(), clique(3));
    }

    #[test]
    fn sandwich_examples() {
        let (c, k, l, d) = (2, 3, 4, 2);
        let a = make_urel(c, k, l).to_structure("R");
        let b = kinl(k - 1, l).unwrap().to_structure("R");
        let cc = nae(2, l).to_structure("R");
        let dd = nae(d, l).to_structure("R");
        assert!(sandwich_check(&a, &b, &cc, &dd).unwrap());
        let k3 = clique(3);
        assert!(!sandwich_check(&k3, &k3, &k3, &clique(2)).unwrap());
        assert!(sandwich_check(&k3, &k3, &k3, &k3).unwrap());
    }

    #[test]
    fn instance_maps_to_handles_implicit_sim() {
        let pair = clique_template_pair(2, 3, 2, 4).unwrap();
        let x = clique(4);
        let implicit = sigma_reduce(&x, &pair, false).unwrap();
        let explicit = sigma_reduce(&x, &pair, true).unwrap();
        assert!(pair.instance_maps_to(&implicit, Side::Source).unwrap().is_some());
        assert!(pair.instance_maps_to(&explicit, Side::Source).unwrap().is_some());
        let k7 = sigma_reduce(&clique(7), &pair, false).unwrap();
        assert!(pair.instance_maps_to(&k7, Side::Target).unwrap().is_none());
    }
}
