use std::f64::consts::PI;

use loopalg::link_rep::apply_to_vector;
use loopalg::linkspace::LinkBasis;
use loopalg::tl_algebra::{Connectivity, TLElement};
use loopalg::wenzl_jones::{apply_pd, apply_wj, build_wj, pr_coeff_formula, wj_top_column, LinkVector};
use loopalg::{LinkState, Scalar, SpectralParams, XComplex};
use num_complex::Complex64;
use proptest::prelude::*;

/// λ is generic for projectors on up to `n` points when every sin(kΛ), k ≤ n, stays clear of 0.
fn generic(lambda: f64, n: usize) -> bool {
    (1..=n).all(|k| (k as f64 * (PI - lambda)).sin().abs() > 0.05)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn wenzl_jones_is_an_idempotent_killed_by_generators(lambda in 0.2f64..2.9) {
        prop_assume!(generic(lambda, 6));
        let params = SpectralParams::real(lambda, 0.0);
        let beta = params.beta_c64();
        for n in 1..=6 {
            let wj = build_wj::<Complex64>(n, &params).unwrap();
            let scale = wj.max_coeff().max(1.0);
            prop_assert!(wj.mul(&wj, &beta).max_diff(&wj) <= 1e-10 * scale * scale);
            for i in 1..n {
                let e = TLElement::generator(i, n).unwrap();
                prop_assert!(e.mul(&wj, &beta).max_coeff() <= 1e-10 * scale, "e_{} WJ_{}", i, n);
                prop_assert!(wj.mul(&e, &beta).max_coeff() <= 1e-10 * scale, "WJ_{} e_{}", n, i);
            }
        }
    }

    #[test]
    fn projected_vectors_are_fixed_by_the_projector(d in 1usize..=7, lambda in 0.2f64..2.9) {
        prop_assume!(generic(lambda, d));
        let params = SpectralParams::real(lambda, 0.0);
        let once = wj_top_column::<Complex64>(d, &params).unwrap();
        let twice = apply_wj(&once, d, &params).unwrap();
        let scale = once.values().map(|x| x.norm()).fold(1.0, f64::max);
        let mut keys: Vec<&LinkState> = once.keys().chain(twice.keys()).collect();
        keys.dedup();
        for w in keys {
            let a = once.get(w).copied().unwrap_or_default();
            let b = twice.get(w).copied().unwrap_or_default();
            prop_assert!((a - b).norm() <= 1e-10 * scale, "coefficient of {} moved", w);
        }
    }

    #[test]
    fn joining_neighbouring_defects_kills_the_projection(n in 2usize..=8, pick in any::<prop::sample::Index>(), lambda in 0.2f64..2.9) {
        prop_assume!(generic(lambda, n));
        let params = SpectralParams::real(lambda, 0.0);
        let basis = LinkBasis::new(n).unwrap();
        let candidates: Vec<(&LinkState, usize)> = basis
            .states()
            .iter()
            .flat_map(|v| (0..n - 1).filter(|&i| v.is_defect(i) && v.is_defect(i + 1)).map(move |i| (v, i)))
            .collect();
        prop_assume!(!candidates.is_empty());
        let (v, i) = candidates[pick.index(candidates.len())];
        let projected = apply_pd::<Complex64>(v, &params).unwrap().to_dense(&basis);
        let e = Connectivity::generator(i + 1, n).unwrap();
        let image = apply_to_vector(&e, &projected, &basis, &params.beta_c64());
        let scale = projected.iter().map(|x| x.norm()).fold(1.0, f64::max);
        prop_assert!(image.iter().all(|x| x.norm() <= 1e-10 * scale), "e_{} P {} ≠ 0", i + 1, v);
    }

    #[test]
    fn closed_form_coefficients_match_projection(r in 1usize..=8, lambda in 0.2f64..2.9) {
        prop_assume!(generic(lambda, r));
        let params = SpectralParams::real(lambda, 0.0);
        let column = wj_top_column::<Complex64>(r, &params).unwrap();
        for w in LinkBasis::new(r).unwrap().states().iter().filter(|w| w.num_arcs() > 0) {
            let direct = column.get(w).copied().unwrap_or_default();
            let formula: Complex64 = pr_coeff_formula(w, &params).unwrap();
            prop_assert!((formula - direct).norm() <= 1e-9 * direct.norm().max(1.0), "{}", w);
        }
    }
}

/// Extended precision keeps removable singularities of the factored product from
/// masquerading as poles.
///
/// Whenever a projector coefficient on r points blows up near a rational Λ, some
/// cos((r − i)Λ/2) with i below the number of arcs vanishes there.
#[test]
fn coefficient_poles_sit_on_half_angle_cosine_zeros() {
    let offset = 1e-8;
    let mut poles = 0;
    for r in 2..=8usize {
        let states = LinkBasis::new(r).unwrap().states().to_vec();
        for q in 1..=2 * r as i64 {
            for p in 1..q {
                if loopalg::params::gcd(p, q) != 1 {
                    continue;
                }
                let big_lambda = PI * p as f64 / q as f64;
                for side in [-1.0, 1.0] {
                    let params = SpectralParams::real(PI - big_lambda - side * offset, 0.0);
                    let column: LinkVector<XComplex> = match wj_top_column(r, &params) {
                        Ok(c) => c,
                        Err(_) => continue,
                    };
                    for w in states.iter().filter(|w| w.num_arcs() > 0) {
                        let x = column.get(w).cloned().unwrap_or_else(|| XComplex::from_f64(0.0));
                        if x.norm() > 1e6 {
                            poles += 1;
                            let explained = (0..w.num_arcs()).any(|i| ((r - i) as f64 * big_lambda / 2.0).cos().abs() < 1e-9);
                            assert!(explained, "P^{r} coefficient of {w} is {:.3e} at Λ = {p}π/{q}", x.norm());
                        }
                    }
                }
            }
        }
    }
    assert!(poles > 0, "the sweep should cross at least one pole");
}
