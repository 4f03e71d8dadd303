//! Forbidden-pattern colouring problems: pattern families, freeness checks,
//! brute-force solving, recolourings between families, the containment
//! condition for monochromatic cliques and the resulting classification.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structure::{clique, components_of, HomSearch, RelStructure, Tuple};
use crate::util::{for_each_choice, for_each_tuple, next_permutation, pow_count};

/// Largest pattern for which isomorphism is decided by permutation
/// minimization.
pub const MAX_CANONICAL_SIZE: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColouredPattern {
    pub structure: RelStructure,
    pub colouring: Vec<usize>,
}

/// A finite family of coloured connected structures over one signature.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFamily")]
pub struct PatternFamily {
    colours: usize,
    signature: BTreeMap<String, usize>,
    patterns: Vec<ColouredPattern>,
}

#[derive(Deserialize)]
struct RawFamily {
    colours: usize,
    signature: BTreeMap<String, usize>,
    patterns: Vec<ColouredPattern>,
}

impl TryFrom<RawFamily> for PatternFamily {
    type Error = Error;

    fn try_from(raw: RawFamily) -> Result<Self> {
        PatternFamily::new(raw.colours, raw.signature, raw.patterns)
    }
}

impl PatternFamily {
    pub fn new(
        colours: usize,
        signature: BTreeMap<String, usize>,
        patterns: Vec<ColouredPattern>,
    ) -> Result<Self> {
        for (i, p) in patterns.iter().enumerate() {
            if p.structure.signature() != signature {
                return Err(Error::SignatureMismatch(format!(
                    "pattern {i} has signature {:?}, family has {signature:?}",
                    p.structure.signature()
                )));
            }
            if p.colouring.len() != p.structure.domain_size() {
                return Err(Error::LengthMismatch {
                    expected: p.structure.domain_size(),
                    found: p.colouring.len(),
                });
            }
            if let Some(&x) = p.colouring.iter().find(|&&x| x >= colours) {
                return Err(Error::param(format!("pattern {i} uses colour {x} but the family has {colours}")));
            }
            if !p.structure.is_connected() {
                return Err(Error::structure(format!("pattern {i} is not connected")));
            }
        }
        Ok(PatternFamily { colours, signature, patterns })
    }

    pub fn colours(&self) -> usize {
        self.colours
    }

    pub fn signature(&self) -> &BTreeMap<String, usize> {
        &self.signature
    }

    pub fn patterns(&self) -> &[ColouredPattern] {
        &self.patterns
    }

    /// Distinct reducts in order of first appearance.
    pub fn reducts(&self) -> Vec<RelStructure> {
        let mut out: Vec<RelStructure> = Vec::new();
        for p in &self.patterns {
            if !out.contains(&p.structure) {
                out.push(p.structure.clone());
            }
        }
        out
    }

    pub fn max_pattern_size(&self) -> usize {
        self.patterns.iter().map(|p| p.structure.domain_size()).max().unwrap_or(0)
    }

    /// Whether `(reduct, colouring)` is literally one of the patterns.
    pub fn contains(&self, reduct: &RelStructure, colouring: &[usize]) -> bool {
        self.patterns.iter().any(|p| p.colouring == colouring && p.structure == *reduct)
    }

    fn check_instance(&self, instance: &RelStructure) -> Result<()> {
        if instance.signature() != self.signature {
            return Err(Error::SignatureMismatch(format!(
                "instance has {:?}, family has {:?}",
                instance.signature(),
                self.signature
            )));
        }
        Ok(())
    }
}

/// The family of monochromatic `k`-cliques, one per colour of `[c]`.
pub fn mono_clique_family(c: usize, k: usize) -> PatternFamily {
    let kk = clique(k);
    let patterns = (0..c).map(|i| ColouredPattern { structure: kk.clone(), colouring: vec![i; k] }).collect();
    PatternFamily::new(c, kk.signature(), patterns).expect("cliques are connected")
}

/// True iff no pattern maps into `(instance, colouring)` colour-respectingly.
pub fn check_expansion_free(instance: &RelStructure, colouring: &[usize], fam: &PatternFamily) -> Result<bool> {
    fam.check_instance(instance)?;
    if colouring.len() != instance.domain_size() {
        return Err(Error::LengthMismatch { expected: instance.domain_size(), found: colouring.len() });
    }
    if let Some(&x) = colouring.iter().find(|&&x| x >= fam.colours) {
        return Err(Error::param(format!("colour {x} outside [0, {})", fam.colours)));
    }
    Ok(expansion_free_unchecked(instance, colouring, fam))
}

fn expansion_free_unchecked(instance: &RelStructure, colouring: &[usize], fam: &PatternFamily) -> bool {
    fam.patterns.iter().all(|p| {
        let mut search = HomSearch::new(&p.structure, instance).expect("signatures checked");
        for (x, &fx) in p.colouring.iter().enumerate() {
            search.restrict(x, |v| colouring[v] == fx);
        }
        search.first().is_none()
    })
}

/// Default candidate budget for exhaustive searches.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// The lexicographically first `fam`-free colouring of `instance`, if any.
/// Refuses to start when `c^|I|` exceeds `budget`.
pub fn solve_mmsnp_brute(instance: &RelStructure, fam: &PatternFamily, budget: u128) -> Result<Option<Vec<usize>>> {
    fam.check_instance(instance)?;
    let needed = pow_count(fam.colours, instance.domain_size());
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut found = None;
    for_each_tuple(fam.colours, instance.domain_size(), |g| {
        if expansion_free_unchecked(instance, g, fam) {
            found = Some(g.to_vec());
            false
        } else {
            true
        }
    });
    Ok(found)
}

/// A map `[c] → [d]` between colour sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recolouring {
    pub table: Vec<usize>,
}

/// Checks whether `table` is a recolouring from `from` to `to`: no pattern of
/// `to` has a `from`-free preimage under the map.
pub fn is_recolouring(table: &[usize], from: &PatternFamily, to: &PatternFamily) -> Result<bool> {
    let mut checker = RecolouringChecker::new(from, to)?;
    if table.len() != from.colours || table.iter().any(|&x| x >= to.colours) {
        return Err(Error::param("recolouring table does not map [c] into [d]"));
    }
    Ok(checker.accepts(table))
}

struct RecolouringChecker<'a> {
    from: &'a PatternFamily,
    to: &'a PatternFamily,
    reducts: Vec<RelStructure>,
    pattern_reduct: Vec<usize>,
    free_cache: HashMap<(usize, Tuple), bool>,
}

impl<'a> RecolouringChecker<'a> {
    fn new(from: &'a PatternFamily, to: &'a PatternFamily) -> Result<Self> {
        if from.signature != to.signature {
            return Err(Error::SignatureMismatch(format!("{:?} vs {:?}", from.signature, to.signature)));
        }
        let reducts = to.reducts();
        let pattern_reduct =
            to.patterns.iter().map(|p| reducts.iter().position(|r| *r == p.structure).unwrap()).collect();
        Ok(RecolouringChecker { from, to, reducts, pattern_reduct, free_cache: HashMap::new() })
    }

    fn accepts(&mut self, table: &[usize]) -> bool {
        let mut fibres = vec![Vec::new(); self.to.colours];
        for (src, &dst) in table.iter().enumerate() {
            fibres[dst].push(src);
        }
        for (pi, p) in self.to.patterns.iter().enumerate() {
            let ri = self.pattern_reduct[pi];
            let choices: Vec<Vec<usize>> = p.colouring.iter().map(|&g| fibres[g].clone()).collect();
            let reduct = &self.reducts[ri];
            let from = self.from;
            let cache = &mut self.free_cache;
            let all_blocked = for_each_choice(&choices, |h| {
                let free = *cache
                    .entry((ri, h.to_vec()))
                    .or_insert_with(|| expansion_free_unchecked(reduct, h, from));
                !free
            });
            if !all_blocked {
                return false;
            }
        }
        true
    }
}

/// Exhaustive search over maps `[c] → [d]` in lexicographic order; returns
/// the first recolouring from `from` to `to`.
pub fn find_recolouring(from: &PatternFamily, to: &PatternFamily) -> Result<Option<Recolouring>> {
    let mut checker = RecolouringChecker::new(from, to)?;
    let mut found = None;
    for_each_tuple(to.colours, from.colours, |table| {
        if checker.accepts(table) {
            found = Some(Recolouring { table: table.to_vec() });
            false
        } else {
            true
        }
    });
    Ok(found)
}

/// The balanced map `x ↦ x mod d`, whose fibres have sizes `⌊c/d⌋` or `⌈c/d⌉`.
pub fn balanced_recolouring(c: usize, d: usize) -> Recolouring {
    Recolouring { table: (0..c).map(|x| x % d).collect() }
}

fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

/// `k ≤ ⌈ℓ / ⌈c/d⌉⌉`, the closed form for monochromatic-clique containment.
pub fn containment_condition(c: usize, d: usize, k: usize, l: usize) -> bool {
    assert!(c >= 1 && d >= 1, "colour counts must be positive");
    k <= ceil_div(l, ceil_div(c, d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    NoContainment,
    #[serde(rename = "TractableAIP")]
    TractableAip,
    HardUnderRich2to1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DichotomyVerdict {
    pub verdict: Verdict,
    pub c: usize,
    pub d: usize,
    pub k: usize,
    pub l: usize,
    /// `c(k−1)`: tractable iff `ℓ` reaches it.
    pub boundary: usize,
    pub containment: bool,
}

/// Classifies the promise problem of the monochromatic clique families
/// `(F^(c)_k, F^(d)_ℓ)`.
pub fn classify(c: usize, d: usize, k: usize, l: usize) -> Result<DichotomyVerdict> {
    if [c, d, k, l].contains(&0) {
        return Err(Error::param("c, d, k, ℓ must all be positive"));
    }
    let containment = containment_condition(c, d, k, l);
    let boundary = c * (k - 1);
    let verdict = if !containment {
        Verdict::NoContainment
    } else if l >= boundary {
        Verdict::TractableAip
    } else {
        Verdict::HardUnderRich2to1
    };
    Ok(DichotomyVerdict { verdict, c, d, k, l, boundary, containment })
}

type CanonicalKey = (Vec<usize>, Vec<(String, Vec<Tuple>)>);

fn relabel(p: &ColouredPattern, perm: &[usize]) -> CanonicalKey {
    let n = perm.len();
    let mut colouring = vec![0; n];
    for x in 0..n {
        colouring[perm[x]] = p.colouring[x];
    }
    let rels = p
        .structure
        .relations()
        .map(|(name, rel)| {
            let mut ts: Vec<Tuple> = rel.tuples.iter().map(|t| t.iter().map(|&x| perm[x]).collect()).collect();
            ts.sort_unstable();
            (name.to_string(), ts)
        })
        .collect();
    (colouring, rels)
}

/// Canonical form of a coloured pattern: the lexicographically least
/// relabelling over all element permutations.
pub fn canonical_form(p: &ColouredPattern) -> Result<CanonicalKey> {
    let n = p.structure.domain_size();
    if n > MAX_CANONICAL_SIZE {
        return Err(Error::param(format!("pattern of size {n} exceeds {MAX_CANONICAL_SIZE} for isomorphism checks")));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = relabel(p, &perm);
    while next_permutation(&mut perm) {
        let key = relabel(p, &perm);
        if key < best {
            best = key;
        }
    }
    Ok(best)
}

/// Identifies element `y` with `x` (`x < y`), dropping `y`.
fn identify(p: &ColouredPattern, x: usize, y: usize) -> ColouredPattern {
    let n = p.structure.domain_size();
    let map: Vec<usize> = (0..n)
        .map(|z| match z.cmp(&y) {
            std::cmp::Ordering::Less => z,
            std::cmp::Ordering::Equal => x,
            std::cmp::Ordering::Greater => z - 1,
        })
        .collect();
    let structure = p.structure.map_elements(&map, n - 1);
    let colouring = (0..n).filter(|&z| z != y).map(|z| p.colouring[z]).collect();
    ColouredPattern { structure, colouring }
}

/// Closes the family under identifying two equally coloured elements of a
/// pattern, up to isomorphism.
pub fn quotient_closure(fam: &PatternFamily) -> Result<PatternFamily> {
    let mut seen: HashSet<CanonicalKey> = HashSet::new();
    let mut patterns = Vec::new();
    let mut frontier = Vec::new();
    for p in &fam.patterns {
        if seen.insert(canonical_form(p)?) {
            patterns.push(p.clone());
            frontier.push(p.clone());
        }
    }
    while let Some(p) = frontier.pop() {
        let n = p.structure.domain_size();
        for x in 0..n {
            for y in x + 1..n {
                if p.colouring[x] != p.colouring[y] {
                    continue;
                }
                let q = identify(&p, x, y);
                if seen.insert(canonical_form(&q)?) {
                    patterns.push(q.clone());
                    frontier.push(q);
                }
            }
        }
    }
    PatternFamily::new(fam.colours, fam.signature.clone(), patterns)
}

/// Connected, and stays connected after deleting any single element.
pub fn is_biconnected(s: &RelStructure) -> bool {
    let adj = s.gaifman_neighbours();
    if components_of(&adj, None).len() > 1 {
        return false;
    }
    (0..s.domain_size()).all(|x| components_of(&adj, Some(x)).len() <= 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{graph, EDGE};

    #[test]
    fn mono_clique_examples() {
        let f = mono_clique_family(2, 3);
        assert_eq!(f.patterns().len(), 2);
        assert_eq!(f.patterns()[1].colouring, vec![1, 1, 1]);
        let f = mono_clique_family(1, 2);
        assert_eq!(f.patterns().len(), 1);
        assert_eq!(f.patterns()[0].structure.tuple_count(), 2);
        assert_eq!(mono_clique_family(3, 2).patterns().len(), 3);
    }

    #[test]
    fn expansion_free_examples() {
        let f = mono_clique_family(2, 3);
        assert!(!check_expansion_free(&clique(3), &[0, 0, 0], &f).unwrap());
        assert!(check_expansion_free(&clique(3), &[0, 0, 1], &f).unwrap());
        assert!(check_expansion_free(&clique(4), &[0, 0, 1, 1], &f).unwrap());
        assert!(check_expansion_free(&clique(3), &[0, 0, 2], &f).is_err());
        assert!(check_expansion_free(&clique(3), &[0, 0], &f).is_err());
    }

    #[test]
    fn loops_are_forbidden_patterns_targets() {
        // A loop lets K_2 map onto a single vertex.
        let looped = RelStructure::new(1).with_relation(EDGE, 2, vec![vec![0, 0]]).unwrap();
        assert!(!check_expansion_free(&looped, &[0], &mono_clique_family(1, 2)).unwrap());
    }

    #[test]
    fn brute_solver_examples() {
        let f = mono_clique_family(2, 3);
        assert_eq!(solve_mmsnp_brute(&clique(4), &f, DEFAULT_BUDGET).unwrap(), Some(vec![0, 0, 1, 1]));
        assert_eq!(solve_mmsnp_brute(&clique(2), &mono_clique_family(2, 2), DEFAULT_BUDGET).unwrap(), Some(vec![0, 1]));
        assert_eq!(solve_mmsnp_brute(&clique(5), &mono_clique_family(2, 2), DEFAULT_BUDGET).unwrap(), None);
        assert!(matches!(
            solve_mmsnp_brute(&clique(5), &mono_clique_family(2, 2), 10),
            Err(Error::BudgetExceeded { needed: 32, budget: 10 })
        ));
    }

    #[test]
    fn recolouring_examples() {
        let r = find_recolouring(&mono_clique_family(2, 3), &mono_clique_family(2, 4)).unwrap().unwrap();
        assert_eq!(r.table, vec![0, 1]);
        assert!(find_recolouring(&mono_clique_family(3, 2), &mono_clique_family(2, 2)).unwrap().is_none());
        let f = mono_clique_family(3, 3);
        assert_eq!(find_recolouring(&f, &f).unwrap().unwrap().table, vec![0, 1, 2]);
    }

    #[test]
    fn containment_examples() {
        assert!(containment_condition(3, 6, 2, 2));
        assert!(containment_condition(2, 2, 3, 4));
        assert!(!containment_condition(3, 2, 2, 2));
    }

    #[test]
    fn classify_examples() {
        let v = classify(2, 2, 3, 4).unwrap();
        assert_eq!((v.verdict, v.boundary), (Verdict::TractableAip, 4));
        assert_eq!(classify(3, 6, 2, 2).unwrap().verdict, Verdict::HardUnderRich2to1);
        assert_eq!(classify(1, 1, 1, 1).unwrap().verdict, Verdict::TractableAip);
        assert_eq!(classify(3, 2, 2, 2).unwrap().verdict, Verdict::NoContainment);
        assert!(classify(0, 1, 1, 1).is_err());
    }

    #[test]
    fn quotient_closure_examples() {
        let closed = quotient_closure(&mono_clique_family(1, 2)).unwrap();
        assert_eq!(closed.patterns().len(), 2);
        assert_eq!(closed.patterns()[1].structure.relation(EDGE).unwrap().tuples, vec![vec![0, 0]]);

        let singles = PatternFamily::new(
            2,
            clique(1).signature(),
            vec![
                ColouredPattern { structure: clique(1), colouring: vec![0] },
                ColouredPattern { structure: clique(1), colouring: vec![1] },
            ],
        )
        .unwrap();
        assert_eq!(quotient_closure(&singles).unwrap(), singles);

        // Triangle → loop-edge on two vertices → single loop, for each colour.
        let closed = quotient_closure(&mono_clique_family(2, 3)).unwrap();
        assert_eq!(closed.patterns().len(), 6);
        let loop_edge = ColouredPattern {
            structure: RelStructure::new(2)
                .with_relation(EDGE, 2, vec![vec![0, 0], vec![0, 1], vec![1, 0]])
                .unwrap(),
            colouring: vec![1, 1],
        };
        let key = canonical_form(&loop_edge).unwrap();
        assert!(closed.patterns().iter().any(|p| canonical_form(p).unwrap() == key));
    }

    #[test]
    fn biconnectivity_examples() {
        assert!(is_biconnected(&clique(3)));
        assert!(!is_biconnected(&graph(3, &[(0, 1), (1, 2)]).unwrap()));
        assert!(is_biconnected(&clique(1)));
        assert!(!is_biconnected(&graph(2, &[]).unwrap()));
        for k in 1..=5 {
            assert!(mono_clique_family(2, k).patterns().iter().all(|p| is_biconnected(&p.structure)));
        }
    }

    #[test]
    fn family_json_round_trip() {
        let f = mono_clique_family(2, 3);
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.contains("\"colours\":2"));
        let back: PatternFamily = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        let bad = text.replace("[1,1,1]", "[1,1,5]");
        assert!(serde_json::from_str::<PatternFamily>(&bad).is_err());
    }
}
