use loopalg::link_rep::rho;
use loopalg::transfer::{build_fn_direct, build_rho_dn_sweep, build_rho_fn_sweep, fn_column_recursive, EightByEight};
use loopalg::verify::{element_routes, half_pi_polynomial_residual};
use loopalg::{LinkBasis, Mat, SpectralParams};
use num_complex::Complex64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn three_constructions_of_f_agree(lambda in 0.2f64..2.9) {
        let params = SpectralParams::real(lambda, 0.0);
        for n in 1..=7 {
            let basis = LinkBasis::new(n).unwrap();
            let sweep = build_rho_fn_sweep::<Complex64>(&basis, &params).unwrap();
            let recursive = fn_column_recursive::<Complex64>(&basis, &params).unwrap();
            prop_assert!(recursive.mat().rel_dev(sweep.mat()) <= 1e-9, "recursive columns, N = {}", n);
            let (elements, _) = element_routes(n, &params).unwrap();
            prop_assert!(elements <= 1e-9, "element formulas, N = {}", n);
            if n <= 6 {
                let direct = rho(&build_fn_direct::<Complex64>(n, &params).unwrap(), &basis, &params).unwrap();
                prop_assert!(direct.mat().rel_dev(sweep.mat()) <= 1e-9, "direct expansion, N = {}", n);
            }
        }
    }

    #[test]
    fn f_commutes_with_the_transfer_matrix(lambda in 0.2f64..2.9, frac in prop::array::uniform3(0.05f64..0.95)) {
        for n in 2..=8 {
            let basis = LinkBasis::new(n).unwrap();
            let f = build_rho_fn_sweep::<Complex64>(&basis, &SpectralParams::real(lambda, 0.0)).unwrap();
            for t in frac {
                let d = build_rho_dn_sweep::<Complex64>(&basis, &SpectralParams::real(lambda, t * lambda)).unwrap();
                let scale = f.mat().max_abs().max(1.0) * d.mat().max_abs().max(1.0);
                prop_assert!(f.mat().commutator(d.mat()).max_abs() <= 1e-9 * scale, "N = {}, u = {}", n, t * lambda);
            }
        }
    }

    #[test]
    fn eight_by_eight_letters_are_nilpotent(lambda in 0.05f64..3.1) {
        let engine = EightByEight::<Complex64>::new(&SpectralParams::real(lambda, 0.0));
        prop_assert_eq!(engine.nilpotency_residual(), 0.0);
        prop_assert!(engine.mirror_residual() <= 1e-12);
    }
}

#[test]
fn half_pi_polynomial_identities() {
    for n in 1..=9 {
        let r = half_pi_polynomial_residual(n).unwrap();
        assert!(r <= 1e-9, "N = {n}: residual {r:e}");
    }
}

#[test]
fn odd_f_at_half_pi_is_not_nilpotent() {
    let params = SpectralParams::rational(1, 2, 0.0);
    let f = build_rho_fn_sweep::<Complex64>(&LinkBasis::new(5).unwrap(), &params).unwrap();
    let sq = f.mat() * f.mat();
    let four = Mat::<Complex64>::identity(sq.rows()).scale(&Complex64::new(4.0, 0.0));
    assert!(sq.rel_dev(&four) <= 1e-12);
}
