use std::collections::BTreeSet;

use loopalg::linkspace::{binomial, enumerate_link_basis, eta_decode, eta_encode, mu_decode, mu_encode, sector_dim, EtaWord, LinkBasis, LinkState};
use proptest::prelude::*;

#[test]
fn sector_dimensions_sum_to_central_binomial() {
    for n in 1..=12 {
        let total: usize = (n % 2..=n).step_by(2).map(|d| sector_dim(n, d)).sum();
        assert_eq!(total, binomial(n, n / 2), "N = {n}");
        assert_eq!(LinkBasis::new(n).unwrap().dim(), total, "N = {n}");
    }
}

#[test]
fn enumeration_is_valid_and_duplicate_free() {
    for n in 1..=12 {
        let states = enumerate_link_basis(n).unwrap();
        let distinct: BTreeSet<&LinkState> = states.iter().collect();
        assert_eq!(distinct.len(), states.len(), "duplicates at N = {n}");
        for s in &states {
            let rebuilt = LinkState::new(s.partners().to_vec()).unwrap();
            assert_eq!(&rebuilt, s);
            assert_eq!(LinkState::from_signed(&s.to_signed()).unwrap(), *s);
            assert_eq!(s.defects() + 2 * s.num_arcs(), n);
        }
        assert!(states.windows(2).all(|w| w[0] < w[1]), "not in canonical order at N = {n}");
    }
}

#[test]
fn eta_round_trips_on_every_state() {
    for n in 1..=10 {
        for s in enumerate_link_basis(n).unwrap() {
            let word = eta_encode(&s);
            let back = eta_decode(&word).unwrap();
            assert_eq!(back, s);
            assert_eq!(eta_encode(&back), word);
        }
    }
}

#[test]
fn mu_word_exists_exactly_up_to_depth_two() {
    for n in 1..=10 {
        for s in enumerate_link_basis(n).unwrap() {
            match mu_encode(&s) {
                Some(word) => {
                    assert!(s.max_depth() <= 2, "{s} has depth {}", s.max_depth());
                    assert_eq!(mu_decode(&word).unwrap(), s);
                }
                None => assert!(s.max_depth() > 2, "{s} should have a μ-word"),
            }
        }
    }
}

fn eta_symbols() -> impl Strategy<Value = Vec<i8>> {
    prop::collection::vec(prop_oneof![Just(-1i8), Just(0i8), Just(1i8)], 1..16)
}

proptest! {
    #[test]
    fn decodable_eta_words_round_trip(word in eta_symbols()) {
        let word = EtaWord(word);
        if let Ok(state) = eta_decode(&word) {
            prop_assert_eq!(eta_encode(&state), word);
        }
    }

    #[test]
    fn basis_index_matches_position(n in 1usize..=10, pick in any::<prop::sample::Index>()) {
        let basis = LinkBasis::new(n).unwrap();
        let k = pick.index(basis.dim());
        prop_assert_eq!(basis.index_of(basis.state(k)), Some(k));
        prop_assert!(basis.sector_range(basis.defects_of(k)).contains(&k));
    }
}
