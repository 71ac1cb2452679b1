use loopalg::link_rep::{matrix_m, rho, rho_connectivity, sector_trace, weight_matrix};
use loopalg::tl_algebra::{enumerate_connectivities, trace_tau, Connectivity, TLElement};
use loopalg::{LinkBasis, SpectralParams};
use num_complex::Complex64;
use proptest::prelude::*;

/// Every through-line of `c` joins bottom point i to top point i.
fn through_lines_are_vertical(c: &Connectivity) -> bool {
    let n = c.n();
    (0..n).all(|i| c.partner(i) < n || c.partner(i) == n + i)
}

fn random_element(n: usize, picks: &[(usize, f64, f64)]) -> TLElement<Complex64> {
    build_element(enumerate_connectivities(n), n, picks)
}

fn random_vertical_element(n: usize, picks: &[(usize, f64, f64)]) -> TLElement<Complex64> {
    build_element(enumerate_connectivities(n).into_iter().filter(through_lines_are_vertical).collect(), n, picks)
}

fn build_element(all: Vec<Connectivity>, n: usize, picks: &[(usize, f64, f64)]) -> TLElement<Complex64> {
    let mut x = TLElement::zero(n);
    for &(k, re, im) in picks {
        x.add_term(all[k % all.len()].clone(), Complex64::new(re, im));
    }
    x
}

fn terms() -> impl Strategy<Value = Vec<(usize, f64, f64)>> {
    prop::collection::vec((any::<usize>(), -1.0f64..1.0, -1.0f64..1.0), 1..12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn connectivities_never_raise_the_defect_number(n in 1usize..=10, word in prop::collection::vec(1usize..10, 0..14), lambda in 0.2f64..2.9) {
        let mut c = Connectivity::identity(n);
        if n > 1 {
            for i in word {
                c = c.compose(&Connectivity::generator(1 + (i - 1) % (n - 1), n).unwrap()).unwrap().0;
            }
        }
        let basis = LinkBasis::new(n).unwrap();
        let beta = Complex64::new(2.0 * lambda.cos(), 0.0);
        let m = loopalg::link_rep::SectorMatrix::new(&basis, rho_connectivity(&c, &basis, &beta));
        prop_assert_eq!(m.lower_block_norm(), 0.0);
    }

    #[test]
    fn sector_traces_follow_from_the_markov_trace(half in 2usize..=3, picks in terms(), lambda in 0.3f64..1.3) {
        let n = 2 * half;
        let params = SpectralParams::real(lambda, 0.0);
        let x = random_vertical_element(n, &picks);
        let basis = LinkBasis::new(n).unwrap();
        let r = rho(&x, &basis, &params).unwrap();
        let m = matrix_m::<Complex64>(n, &params).unwrap();
        let parts: Vec<Complex64> = (0..=half).map(|j| trace_tau(&x.through_line_part(2 * j), &params)).collect();
        let scale = 1.0 + parts.iter().map(|p| p.norm()).fold(0.0, f64::max) * m.max_abs();
        for i in 0..=half {
            let lhs = sector_trace(&r, 2 * i);
            let rhs: Complex64 = (0..=half).map(|j| m[(i, j)] * parts[j]).sum();
            prop_assert!((lhs - rhs).norm() <= 1e-10 * scale, "d = {}: {} vs {}", 2 * i, lhs, rhs);
        }
    }

    #[test]
    fn markov_trace_is_weighted_matrix_trace(half in 2usize..=3, picks in terms(), lambda in 0.3f64..1.3) {
        let n = 2 * half;
        let params = SpectralParams::real(lambda, 0.0);
        let x = random_element(n, &picks);
        let basis = LinkBasis::new(n).unwrap();
        let r = rho(&x, &basis, &params).unwrap();
        let w = weight_matrix::<Complex64>(&basis, &params).unwrap();
        let lhs = (r.mat() * w.mat()).trace();
        let rhs = trace_tau(&x, &params);
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm() + x.max_coeff() * r.mat().max_abs()));
    }

    #[test]
    fn representation_is_multiplicative(n in 2usize..=6, a in terms(), b in terms(), lambda in 0.2f64..2.9) {
        let params = SpectralParams::real(lambda, 0.0);
        let (x, y) = (random_element(n, &a), random_element(n, &b));
        let basis = LinkBasis::new(n).unwrap();
        let xy = rho(&x.mul(&y, &params.beta_c64()), &basis, &params).unwrap();
        let prod = rho(&x, &basis, &params).unwrap().mul(&rho(&y, &basis, &params).unwrap());
        prop_assert!(xy.mat().rel_dev(prod.mat()) <= 1e-10);
    }
}

/// A connectivity whose two through-lines move from bottom points 2, 3 to top points 0, 1
/// has no diagonal entry in the two-defect sector, so the sector-by-sector trace relation
/// needs the through-lines to stay in place. The weighted total still matches τ.
#[test]
fn shifted_through_lines_leave_the_sector_relation() {
    let params = SpectralParams::real(0.3, 0.0);
    let c = Connectivity::new(4, vec![1, 0, 4, 5, 2, 3, 7, 6]).unwrap();
    assert!(!through_lines_are_vertical(&c));
    let x = TLElement::from_connectivity(c, Complex64::new(1.0, 0.0));
    let basis = LinkBasis::new(4).unwrap();
    let r = rho(&x, &basis, &params).unwrap();
    let beta = params.beta_c64();
    assert!(sector_trace(&r, 2).norm() < 1e-15);
    assert!((sector_trace(&r, 0) - beta).norm() < 1e-14);
    let m = matrix_m::<Complex64>(4, &params).unwrap();
    let predicted = m[(1, 1)] * trace_tau(&x.through_line_part(2), &params);
    assert!((predicted - 1.0 / beta).norm() < 1e-14);
    let w = weight_matrix::<Complex64>(&basis, &params).unwrap();
    assert!(((r.mat() * w.mat()).trace() - trace_tau(&x, &params)).norm() < 1e-14);
}

#[test]
fn generators_have_distinct_images() {
    let params = SpectralParams::real(0.83, 0.0);
    for n in 2..=8 {
        let basis = LinkBasis::new(n).unwrap();
        let images: Vec<_> = (1..n).map(|i| rho(&TLElement::<Complex64>::generator(i, n).unwrap(), &basis, &params).unwrap()).collect();
        for i in 0..images.len() {
            for j in i + 1..images.len() {
                assert!((images[i].mat() - images[j].mat()).max_abs() > 0.5, "ρ(e_{}) = ρ(e_{}) at N = {n}", i + 1, j + 1);
            }
        }
    }
}
