//! Plain exhaustive deciders for promise problems, kept independent of the
//! propagating homomorphism search so they can serve as ground truth.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mmsnp::{find_recolouring, PatternFamily};
use crate::structure::{RelStructure, Tuple};
use crate::util::{for_each_tuple, pow_count};

pub use crate::mmsnp::DEFAULT_BUDGET;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PromiseVerdict {
    /// Maps to the promise template (or has a promise-free expansion).
    YesMapsToPromise,
    /// Does not even map to the target template.
    NoNotEvenTarget,
    /// Maps to the target but not to the promise template.
    GapInstance,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleOutcome {
    pub verdict: PromiseVerdict,
    /// For Yes, a map into the promise side; for Gap, a map into the target
    /// side; for No, nothing.
    pub witness: Option<Vec<usize>>,
}

type TupleSets = Vec<(Vec<Tuple>, HashSet<Tuple>)>;

/// A pattern colouring with the maps of its structure into an instance.
type PatternImages = Vec<(Vec<usize>, Vec<Vec<usize>>)>;

/// Source tuples per symbol paired with the target's tuple set for it.
fn paired_tuples(source: &RelStructure, target: &RelStructure) -> Result<TupleSets> {
    if source.signature() != target.signature() {
        return Err(Error::SignatureMismatch(format!("{:?} vs {:?}", source.signature(), target.signature())));
    }
    Ok(source
        .relations()
        .map(|(name, rel)| {
            let set = target.relation(name).expect("same signature").tuples.iter().cloned().collect();
            (rel.tuples.clone(), set)
        })
        .collect())
}

fn brute_map(source: &RelStructure, target: &RelStructure, budget: u128) -> Result<Option<Vec<usize>>> {
    let needed = pow_count(target.domain_size(), source.domain_size());
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let pairs = paired_tuples(source, target)?;
    let mut found = None;
    let mut image = Vec::new();
    for_each_tuple(target.domain_size(), source.domain_size(), |map| {
        let ok = pairs.iter().all(|(tuples, allowed)| {
            tuples.iter().all(|t| {
                image.clear();
                image.extend(t.iter().map(|&x| map[x]));
                allowed.contains(&image)
            })
        });
        if ok {
            found = Some(map.to_vec());
        }
        !ok
    });
    Ok(found)
}

/// Decides `PCSP(A, B)` on `I` by trying every map `I → A`, then every map
/// `I → B`. Also checks `A → B` by enumeration.
pub fn pcsp_decide_brute(
    instance: &RelStructure,
    promise: &RelStructure,
    target: &RelStructure,
    budget: u128,
) -> Result<OracleOutcome> {
    if brute_map(promise, target, budget)?.is_none() {
        return Err(Error::structure("the promise template does not map to the target template"));
    }
    if let Some(w) = brute_map(instance, promise, budget)? {
        return Ok(OracleOutcome { verdict: PromiseVerdict::YesMapsToPromise, witness: Some(w) });
    }
    Ok(match brute_map(instance, target, budget)? {
        Some(w) => OracleOutcome { verdict: PromiseVerdict::GapInstance, witness: Some(w) },
        None => OracleOutcome { verdict: PromiseVerdict::NoNotEvenTarget, witness: None },
    })
}

/// Every homomorphism of each pattern's structure into `x`, listed by brute
/// force, paired with the pattern colouring.
fn pattern_images(x: &RelStructure, fam: &PatternFamily, budget: &mut u128) -> Result<PatternImages> {
    let mut out = Vec::with_capacity(fam.patterns().len());
    for p in fam.patterns() {
        let needed = pow_count(x.domain_size(), p.structure.domain_size());
        if needed > *budget {
            return Err(Error::BudgetExceeded { needed, budget: *budget });
        }
        *budget -= needed;
        let pairs = paired_tuples(&p.structure, x)?;
        let mut homs = Vec::new();
        let mut image = Vec::new();
        for_each_tuple(x.domain_size(), p.structure.domain_size(), |map| {
            let ok = pairs.iter().all(|(tuples, allowed)| {
                tuples.iter().all(|t| {
                    image.clear();
                    image.extend(t.iter().map(|&v| map[v]));
                    allowed.contains(&image)
                })
            });
            if ok {
                homs.push(map.to_vec());
            }
            true
        });
        out.push((p.colouring.clone(), homs));
    }
    Ok(out)
}

fn free_colouring(x: &RelStructure, fam: &PatternFamily, budget: &mut u128) -> Result<Option<Vec<usize>>> {
    let images = pattern_images(x, fam, budget)?;
    let needed = pow_count(fam.colours(), x.domain_size());
    if needed > *budget {
        return Err(Error::BudgetExceeded { needed, budget: *budget });
    }
    *budget -= needed;
    let mut found = None;
    for_each_tuple(fam.colours(), x.domain_size(), |col| {
        let violated = images
            .iter()
            .any(|(pc, homs)| homs.iter().any(|h| h.iter().zip(pc).all(|(&v, &want)| col[v] == want)));
        if !violated {
            found = Some(col.to_vec());
        }
        violated
    });
    Ok(found)
}

/// Decides the promise problem `(F, G)` on `x` by exhaustive colouring:
/// Yes if some `F`-free expansion exists, No if not even a `G`-free one.
pub fn pmmsnp_decide_brute(
    x: &RelStructure,
    source: &PatternFamily,
    target: &PatternFamily,
    budget: u128,
) -> Result<OracleOutcome> {
    if find_recolouring(source, target)?.is_none() {
        return Err(Error::MissingContainment { index: 0 });
    }
    let mut remaining = budget;
    if let Some(w) = free_colouring(x, source, &mut remaining)? {
        return Ok(OracleOutcome { verdict: PromiseVerdict::YesMapsToPromise, witness: Some(w) });
    }
    Ok(match free_colouring(x, target, &mut remaining)? {
        Some(w) => OracleOutcome { verdict: PromiseVerdict::GapInstance, witness: Some(w) },
        None => OracleOutcome { verdict: PromiseVerdict::NoNotEvenTarget, witness: None },
    })
}

/// Whether a pattern-side verdict and a template-side verdict for the same
/// graph agree: No matches No exactly, and pattern-side Yes forces
/// template-side Yes. A pattern-side Gap may show up as Yes or Gap.
pub fn verdicts_compatible(pattern_side: PromiseVerdict, template_side: PromiseVerdict) -> bool {
    use PromiseVerdict::*;
    match pattern_side {
        NoNotEvenTarget => template_side == NoNotEvenTarget,
        YesMapsToPromise => template_side == YesMapsToPromise,
        GapInstance => template_side != NoNotEvenTarget,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mmsnp::mono_clique_family;
    use crate::structure::{clique, graph, kinl, nae};

    #[test]
    fn pcsp_examples() {
        let one = RelStructure::new(4).with_relation("R", 4, vec![vec![0, 1, 2, 3]]).unwrap();
        let a = kinl(2, 4).unwrap().to_structure("R");
        let b = nae(2, 4).to_structure("R");
        let out = pcsp_decide_brute(&one, &a, &b, DEFAULT_BUDGET).unwrap();
        assert_eq!(out.verdict, PromiseVerdict::YesMapsToPromise);
        assert_eq!(out.witness.unwrap(), vec![0, 0, 1, 1]);

        let k = |n| clique(n);
        assert_eq!(pcsp_decide_brute(&k(5), &k(3), &k(4), DEFAULT_BUDGET).unwrap().verdict, PromiseVerdict::NoNotEvenTarget);
        assert_eq!(pcsp_decide_brute(&k(4), &k(3), &k(4), DEFAULT_BUDGET).unwrap().verdict, PromiseVerdict::GapInstance);
        assert!(pcsp_decide_brute(&k(2), &k(4), &k(3), DEFAULT_BUDGET).is_err());
        assert!(matches!(pcsp_decide_brute(&k(20), &k(3), &k(4), 1000), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn pmmsnp_examples() {
        let (f, g) = (mono_clique_family(2, 3), mono_clique_family(2, 4));
        assert_eq!(pmmsnp_decide_brute(&clique(4), &f, &g, DEFAULT_BUDGET).unwrap().verdict, PromiseVerdict::YesMapsToPromise);
        assert_eq!(pmmsnp_decide_brute(&clique(7), &f, &g, DEFAULT_BUDGET).unwrap().verdict, PromiseVerdict::NoNotEvenTarget);
        let c5 = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        assert_eq!(pmmsnp_decide_brute(&c5, &f, &g, DEFAULT_BUDGET).unwrap().verdict, PromiseVerdict::YesMapsToPromise);
        // K_6 has no 2-colouring without a monochromatic triangle but has one
        // without a monochromatic K_4.
        assert_eq!(pmmsnp_decide_brute(&clique(6), &f, &g, DEFAULT_BUDGET).unwrap().verdict, PromiseVerdict::GapInstance);
    }

    #[test]
    fn compatibility_table() {
        use PromiseVerdict::*;
        assert!(verdicts_compatible(GapInstance, YesMapsToPromise));
        assert!(!verdicts_compatible(YesMapsToPromise, GapInstance));
        assert!(!verdicts_compatible(NoNotEvenTarget, GapInstance));
    }
}
