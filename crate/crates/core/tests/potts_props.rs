use std::f64::consts::PI;

use loopalg::potts::{compare_spectra, fk_bruteforce_z, loop_z, three_way, Lattice, PottsParams};
use loopalg::{Error, SpectralParams};
use proptest::prelude::*;

/// λ with (2 cos λ)² = Q.
fn potts_lambda(q: usize) -> f64 {
    ((q as f64).sqrt() / 2.0).acos()
}

fn params(q: usize, frac: f64) -> PottsParams {
    let lambda = potts_lambda(q);
    PottsParams::new(SpectralParams::real(lambda, frac * lambda)).unwrap()
}

#[test]
fn spin_fk_and_loop_agree_wherever_feasible() {
    let mut compared = 0;
    for q in [2, 3] {
        for n in [2, 4, 6] {
            for m in 1..=3 {
                match three_way(n, m, &params(q, 0.37)) {
                    Ok(row) => {
                        assert!(row.max_rel_dev <= 1e-8, "N = {n}, M = {m}, Q = {q}: {:e}", row.max_rel_dev);
                        assert_eq!(row.euler_failures, 0);
                        compared += 1;
                    }
                    Err(Error::Capacity(_)) => {}
                    Err(e) => panic!("N = {n}, M = {m}, Q = {q}: {e}"),
                }
            }
        }
    }
    assert!(compared >= 8, "only {compared} combinations fit");
}

#[test]
fn euler_relation_on_every_single_row_graph() {
    for n in [2, 4] {
        let sum = fk_bruteforce_z(n, 1, &params(2, 0.4)).unwrap();
        assert_eq!(sum.graphs, 1 << (2 * n));
        assert_eq!(sum.euler_failure_count, 0, "N = {n}: {:?}", sum.euler_failures);
    }
}

#[test]
fn lattice_counts() {
    for (n, m) in [(2, 1), (4, 2), (6, 3)] {
        let lat = Lattice::new(n, m, true).unwrap();
        assert_eq!(lat.num_spins, (n + 1) * m);
        let open = Lattice::new(n, m, false).unwrap();
        assert_eq!(open.num_spins, (n + 1) * m + n / 2);
    }
}

#[test]
fn spin_spectrum_sits_inside_the_loop_spectrum() {
    for q in [2, 3] {
        for frac in [0.2, 0.5, 0.8] {
            let cmp = compare_spectra(4, &params(q, frac), 1e-6).unwrap();
            assert!(cmp.holds(1e-6), "Q = {q}, u = {frac}λ: {cmp:?}");
        }
    }
}

#[test]
fn potts_correspondence_rejects_bad_parameters() {
    assert!(matches!(PottsParams::new(SpectralParams::real(1.7, 0.3)), Err(Error::InvalidArgument(_))));
    assert!(matches!(PottsParams::new(SpectralParams::real(0.6, 0.7)), Err(Error::InvalidArgument(_))));
    let generic = PottsParams::new(SpectralParams::real(0.6, 0.3)).unwrap();
    assert!(matches!(generic.spin_states(), Err(Error::InvalidArgument(_))));
    assert!(matches!(fk_bruteforce_z(8, 2, &generic), Err(Error::Capacity(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn fk_sum_matches_loop_trace_at_any_q(lambda in 0.1f64..(PI / 2.0 - 0.05), frac in 0.05f64..0.95, m in 1usize..=3) {
        let pp = PottsParams::new(SpectralParams::real(lambda, frac * lambda)).unwrap();
        let fk = fk_bruteforce_z(2, m, &pp).unwrap();
        let z = loop_z(2, m, &pp).unwrap();
        prop_assert!((fk.z - z).abs() <= 1e-8 * z.abs().max(fk.z.abs()), "{} vs {}", fk.z, z);
        prop_assert_eq!(fk.euler_failure_count, 0);
    }
}
