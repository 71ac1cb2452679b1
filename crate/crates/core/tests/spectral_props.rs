use loopalg::spectral::{detected_links, jordan_analyze, sector_spectrum};
use loopalg::transfer::build_rho_dn_sweep;
use loopalg::wenzl_jones::predicted_links;
use loopalg::{LinkBasis, SpectralParams, XComplex};
use num_complex::Complex64;
use proptest::prelude::*;

const CRITICAL: [(i64, i64); 6] = [(1, 2), (1, 3), (1, 4), (2, 5), (1, 5), (3, 7)];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn links_join_sectors_with_equal_f_eigenvalue(pick in 0usize..CRITICAL.len(), n in 2usize..=8, frac in 0.1f64..0.9) {
        let (p, q) = CRITICAL[pick];
        let probe = SpectralParams::rational(p, q, 0.0);
        let params = probe.with_u(frac * probe.lambda_f64());
        let lambda = params.lambda_f64();
        let d = build_rho_dn_sweep::<Complex64>(&LinkBasis::new(n).unwrap(), &params).unwrap();
        let reports = jordan_analyze(&d, 1e-9).unwrap();
        for (hi, lo) in detected_links(&reports) {
            let gap = (lambda * (hi as f64 + 1.0)).cos() - (lambda * (lo as f64 + 1.0)).cos();
            prop_assert!(gap.abs() <= 1e-9, "link ({}, {}) at λ = {}π/{}", hi, lo, p, q);
        }
    }

    #[test]
    fn irrational_lambda_gives_diagonalizable_transfer_matrices(n in 1usize..=6, frac in 0.05f64..0.95) {
        let params = SpectralParams::real(1.0, frac);
        let d = build_rho_dn_sweep::<Complex64>(&LinkBasis::new(n).unwrap(), &params).unwrap();
        for r in jordan_analyze(&d, 1e-9).unwrap() {
            prop_assert_eq!(r.max_block(), 1, "N = {}, eigenvalue {}", n, r.eigenvalue);
            prop_assert!(r.sector_links.is_empty());
        }
    }
}

#[test]
fn spectrum_is_union_of_sector_spectra() {
    let params = SpectralParams::real(0.8, 0.3);
    let d = build_rho_dn_sweep::<Complex64>(&LinkBasis::new(6).unwrap(), &params).unwrap();
    let per_sector = sector_spectrum(&d);
    let total: usize = per_sector.values().map(Vec::len).sum();
    assert_eq!(total, d.dim());
    let reports = jordan_analyze(&d, 1e-9).unwrap();
    assert_eq!(reports.iter().map(|r| r.algebraic_multiplicity).sum::<usize>(), d.dim());
}

#[test]
fn extended_precision_finds_the_same_links() {
    let params = SpectralParams::rational(1, 2, 0.3);
    let d = build_rho_dn_sweep::<XComplex>(&LinkBasis::new(4).unwrap(), &params).unwrap();
    let reports = jordan_analyze(&d, 1e-20).unwrap();
    let (a, b) = params.ab().unwrap();
    assert_eq!(detected_links(&reports), predicted_links(4, a, b).unwrap());
    assert!(reports.iter().all(|r| r.warnings.is_empty()), "{reports:?}");
}
