//! Soundness smoke test: gadgets over instances without a perfect labelling,
//! probed with random colourings. Counts are logged, not asserted.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pmmsnp::gadget::{build_gadget, gen_rich_instance, has_perfect_labelling, DistributionChoice, GadgetOptions};
use pmmsnp::structure::{make_urel, nae, FiniteRelation};

const TRIALS: usize = 10_000;

fn probe(label: &str, n: usize, m: usize, rel: &FiniteRelation, distribution: DistributionChoice) {
    let inst = gen_rich_instance(n, m).unwrap();
    assert!(has_perfect_labelling(&inst, 1 << 20).unwrap().is_none(), "{label}: instance has a perfect labelling");
    let h = build_gadget(&inst, rel, &GadgetOptions { distribution, ..GadgetOptions::default() }).unwrap();
    let colours = rel.domain_size();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut with_constant, mut outside) = (0, 0);
    for _ in 0..TRIALS {
        let col: Vec<usize> = (0..h.class_count).map(|_| rng.gen_range(0..colours)).collect();
        let images: Vec<Vec<usize>> = h.edges.iter().map(|e| e.iter().map(|&c| col[c]).collect()).collect();
        with_constant += usize::from(images.iter().any(|t| t.iter().all(|&x| x == t[0])));
        outside += usize::from(images.iter().any(|t| !rel.contains(t)));
    }
    println!(
        "{label}: {} classes, {} edges; {with_constant}/{TRIALS} random colourings leave a constant edge, {outside}/{TRIALS} leave an edge outside R",
        h.class_count,
        h.edges.len()
    );
}

#[test]
fn random_colourings_of_unsatisfiable_gadgets() {
    probe("nae(2,2), n=2, m=2", 2, 2, &nae(2, 2), DistributionChoice::Strict);
    probe("nae(2,2), n=2, m=4", 2, 4, &nae(2, 2), DistributionChoice::Strict);
    probe("urel(3,2,2), n=2, m=3", 2, 3, &make_urel(3, 2, 2), DistributionChoice::Thinned);
}
