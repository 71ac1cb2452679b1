use std::collections::BTreeSet;

use loopalg::linkspace::enumerate_link_basis;
use loopalg::tl_algebra::{enumerate_connectivities, gram, gram_pairing, Connectivity, GramPairing};
use loopalg::SpectralParams;
use num_complex::Complex64;
use proptest::prelude::*;

fn generators(n: usize) -> Vec<Connectivity> {
    (1..n).map(|i| Connectivity::generator(i, n).unwrap()).collect()
}

#[test]
fn composition_is_associative_on_tl4_generator_triples() {
    let mut gens = generators(4);
    gens.push(Connectivity::identity(4));
    for a in &gens {
        for b in &gens {
            for c in &gens {
                let (ab, l1) = a.compose(b).unwrap();
                let (left, l2) = ab.compose(c).unwrap();
                let (bc, r1) = b.compose(c).unwrap();
                let (right, r2) = a.compose(&bc).unwrap();
                assert_eq!((left, l1 + l2), (right, r1 + r2));
            }
        }
    }
}

#[test]
fn every_tl4_connectivity_is_a_generator_word() {
    let gens = generators(4);
    let mut reached: BTreeSet<Connectivity> = BTreeSet::new();
    let mut frontier = vec![Connectivity::identity(4)];
    while let Some(c) = frontier.pop() {
        if !reached.insert(c.clone()) {
            continue;
        }
        for g in &gens {
            frontier.push(c.compose(g).unwrap().0);
        }
    }
    let all: BTreeSet<Connectivity> = enumerate_connectivities(4).into_iter().collect();
    assert_eq!(all.len(), 14);
    assert_eq!(reached, all);
}

fn word(n: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1..n, 0..10)
}

fn product(n: usize, word: &[usize]) -> (Connectivity, usize) {
    word.iter().fold((Connectivity::identity(n), 0), |(c, loops), &i| {
        let (next, extra) = c.compose(&Connectivity::generator(i, n).unwrap()).unwrap();
        (next, loops + extra)
    })
}

proptest! {
    #[test]
    fn associativity_on_random_words(n in 2usize..=7, seed in any::<[u8; 3]>(), w in word(7)) {
        let w: Vec<usize> = w.into_iter().map(|i| 1 + (i - 1) % (n - 1)).collect();
        let cut1 = seed[0] as usize % (w.len() + 1);
        let cut2 = cut1 + seed[1] as usize % (w.len() - cut1 + 1);
        let (a, la) = product(n, &w[..cut1]);
        let (b, lb) = product(n, &w[cut1..cut2]);
        let (c, lc) = product(n, &w[cut2..]);
        let (ab, x1) = a.compose(&b).unwrap();
        let (left, x2) = ab.compose(&c).unwrap();
        let (bc, y1) = b.compose(&c).unwrap();
        let (right, y2) = a.compose(&bc).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(x1 + x2, y1 + y2);
        let (whole, lw) = product(n, &w);
        prop_assert_eq!(&whole, &left);
        prop_assert_eq!(lw, la + lb + lc + x1 + x2);
    }

    #[test]
    fn gram_vanishes_across_sectors(n in 2usize..=8, i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>(), lambda in 0.2f64..2.9) {
        let states = enumerate_link_basis(n).unwrap();
        let (v, w) = (&states[i.index(states.len())], &states[j.index(states.len())]);
        let params = SpectralParams::real(lambda, 0.0);
        let g: Complex64 = gram(v, w, &params).unwrap();
        if v.defects() != w.defects() {
            prop_assert_eq!(gram_pairing(v, w).unwrap(), GramPairing::Mismatched);
            prop_assert_eq!(g, Complex64::new(0.0, 0.0));
        }
    }
}
