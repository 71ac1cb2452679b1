//! The acceptance checks, shared by the integration tests and the command-line `verify`.
//!
//! Every check rebuilds its matrices from the transfer-matrix and projector routines and
//! compares them against an independent route or a closed form, reporting the worst
//! deviation against a fixed tolerance.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::link_rep::rho;
use crate::linkspace::{eta_encode, mu_encode, parse_link_notation, LinkBasis, LinkState};
use crate::params::{gcd, SpectralParams};
use crate::potts::{boundary_spin_sum, boundary_z, compare_spectra, three_way, BoundaryKind, PottsParams};
use crate::spectral::{detected_links, jordan_analyze};
use crate::tl_algebra::TLElement;
use crate::transfer::{
    build_dn_brute, build_rho_dn_sweep, build_rho_fn_sweep, fn_element_2x2, fn_element_8x8, fourier_coefficients,
};
use crate::wenzl_jones::{
    alpha_expansion, build_wj, cluster_replacement, nested_state, p_concentric, p_concentric_recursive, p_first_bubble,
    p_nested, p_single_bubble, p_single_bubble_recursive, p_via_alpha, pr_coeff_formula, predicted_links, wj_top_column,
    LeftShift,
};
use crate::Mat;

/// Outcome of one acceptance check. Timing is kept out of the serialized report so that
/// identical inputs give identical output.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    pub name: String,
    pub passed: bool,
    /// Worst deviation observed.
    pub metric: f64,
    pub tolerance: f64,
    pub detail: String,
    /// Runtime bound in seconds, if the criterion has one.
    pub runtime_limit: Option<f64>,
    #[serde(skip)]
    pub elapsed: f64,
}

impl CheckResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] {} {}: metric {:.3e} (tol {:.0e}) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.metric,
            self.tolerance,
            self.detail
        )
    }
}

/// Inputs shared by the checks: the seed for the sampled anisotropies.
#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 20_240_117 }
    }
}

struct Check {
    id: &'static str,
    name: &'static str,
    tolerance: f64,
    runtime_limit: Option<f64>,
    start: Instant,
}

impl Check {
    fn new(id: &'static str, name: &'static str, tolerance: f64, runtime_limit: Option<f64>) -> Self {
        Check { id, name, tolerance, runtime_limit, start: Instant::now() }
    }

    /// Passes when the metric is within tolerance, `extra` holds, and the runtime bound is met.
    fn finish(self, metric: f64, extra: bool, detail: String) -> CheckResult {
        let elapsed = self.start.elapsed().as_secs_f64();
        let in_time = self.runtime_limit.is_none_or(|limit| elapsed <= limit);
        CheckResult {
            id: self.id.into(),
            name: self.name.into(),
            passed: metric.is_finite() && metric <= self.tolerance && extra && in_time,
            metric,
            tolerance: self.tolerance,
            detail: if in_time { detail } else { format!("{detail}; exceeded the {}s runtime bound", self.runtime_limit.unwrap()) },
            runtime_limit: self.runtime_limit,
            elapsed,
        }
    }

    fn error(self, e: crate::Error) -> CheckResult {
        self.finish(f64::INFINITY, false, format!("error: {e}"))
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn all_defects_index(basis: &LinkBasis) -> usize {
    basis.index_of(&LinkState::all_defects(basis.n())).expect("v^N is a basis state")
}

/// Criterion 1: every diagonal block of ρ(F_N) is 2(−1)^d cos(λ(d+1)) times the identity.
pub fn diagonal_blocks() -> CheckResult {
    let check = Check::new("1", "diagonal blocks of F_N", 1e-10, Some(30.0));
    let run = || -> Result<(f64, usize)> {
        let mut worst: f64 = 0.0;
        let mut blocks = 0;
        for params in [SpectralParams::rational(1, 5, 0.0), SpectralParams::rational(1, 4, 0.0), SpectralParams::real(1.0, 0.0)] {
            let lambda = params.lambda_f64();
            for n in 2..=8 {
                let f = build_rho_fn_sweep::<Complex64>(&LinkBasis::new(n)?, &params)?;
                for &d in f.sectors() {
                    let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
                    let value = c(2.0 * sign * (lambda * (d as f64 + 1.0)).cos());
                    let block = f.diagonal_block(d);
                    let expect = Mat::<Complex64>::identity(block.rows()).scale(&value);
                    worst = worst.max((&block - &expect).max_abs());
                    blocks += 1;
                }
            }
        }
        Ok((worst, blocks))
    };
    match run() {
        Ok((worst, blocks)) => check.finish(worst, true, format!("{blocks} blocks, N = 2..8, λ ∈ {{π/5, π/4, 1 rad}}")),
        Err(e) => check.error(e),
    }
}

/// Criterion 2: the top Fourier coefficient C_{2N} equals 2^{1−2N} ρ(F_N).
pub fn top_fourier_mode() -> CheckResult {
    let check = Check::new("2", "C_2N = 2^(1-2N) F_N", 1e-8, Some(60.0));
    let run = || -> Result<f64> {
        let mut worst: f64 = 0.0;
        for params in [SpectralParams::real(0.71, 0.0), SpectralParams::rational(2, 7, 0.0)] {
            for n in 2..=5 {
                let basis = LinkBasis::new(n)?;
                let coeffs = fourier_coefficients::<Complex64>(&basis, &params)?;
                let f = build_rho_fn_sweep::<Complex64>(&basis, &params)?;
                let scaled = f.mat().scale(&c(2f64.powi(1 - 2 * n as i32)));
                worst = worst.max(coeffs[n].mat().rel_dev(&scaled));
            }
        }
        Ok(worst)
    };
    match run() {
        Ok(w) => check.finish(w, true, "N = 2..5 at λ ∈ {0.71, 2π/7}".into()),
        Err(e) => check.error(e),
    }
}

/// Agreement of the 8×8 and 2×2 element routes with the column of ρ(F_N) at v^N.
pub fn element_routes(n: usize, params: &SpectralParams) -> Result<(f64, usize)> {
    let basis = LinkBasis::new(n)?;
    let f = build_rho_fn_sweep::<Complex64>(&basis, params)?;
    let top = all_defects_index(&basis);
    let scale = (0..basis.dim()).map(|i| f.mat()[(i, top)].norm()).fold(1.0, f64::max);
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    for (i, w) in basis.states().iter().enumerate() {
        let direct = f.mat()[(i, top)];
        let eight: Complex64 = fn_element_8x8(&eta_encode(w), params)?;
        worst = worst.max((eight - direct).norm() / scale);
        compared += 1;
        if let Some(mu) = mu_encode(w) {
            let two: Complex64 = fn_element_2x2(&mu, params)?;
            worst = worst.max((two - direct).norm() / scale);
            compared += 1;
        }
    }
    Ok((worst, compared))
}

/// Criterion 3: the closed-form element of ρ(F_4) and the 8×8/2×2 element routes.
pub fn appendix_b() -> CheckResult {
    let check = Check::new("3", "closed-form element and 8x8/2x2 routes", 1e-9, None);
    let run = || -> Result<(f64, f64, usize)> {
        let basis = LinkBasis::new(4)?;
        let (row, col) = (basis.index_of(&parse_link_notation("2", 4)?).expect("basis state"), all_defects_index(&basis));
        let mut closed: f64 = 0.0;
        for lam in [0.3, 0.7, 1.1, 2.0, 2.9] {
            let params = SpectralParams::real(lam, 0.0);
            let expect = c(-32.0 * lam.cos() * lam.sin().powi(2) * (lam / 2.0).sin().powi(2));
            let direct = build_rho_fn_sweep::<Complex64>(&basis, &params)?.mat()[(row, col)];
            let eight: Complex64 = fn_element_8x8(&eta_encode(&parse_link_notation("2", 4)?), &params)?;
            closed = closed.max(rel(direct, expect)).max(rel(eight, expect));
        }
        let mut routes: f64 = 0.0;
        let mut compared = 0;
        for params in [SpectralParams::real(0.47, 0.0), SpectralParams::rational(3, 7, 0.0)] {
            for n in 1..=7 {
                let (w, k) = element_routes(n, &params)?;
                routes = routes.max(w);
                compared += k;
            }
        }
        Ok((closed, routes, compared))
    };
    match run() {
        Ok((closed, routes, compared)) => {
            let closed_ok = closed <= 1e-12;
            check.finish(
                routes,
                closed_ok,
                format!("closed form rel. dev. {closed:.2e} (tol 1e-12) at 5 λ; {compared} route elements on B_r, r ≤ 7"),
            )
        }
        Err(e) => check.error(e),
    }
}

const GENERIC_LAMBDAS: [f64; 5] = [0.37, 0.71, 0.9, 1.23, 2.05];

/// WJ_N² = WJ_N and e_i WJ_N = 0.
pub fn projector_identities(n_max: usize, params: &SpectralParams) -> Result<f64> {
    let beta = params.beta_c64();
    let mut worst: f64 = 0.0;
    for n in 1..=n_max {
        let wj = build_wj::<Complex64>(n, params)?;
        worst = worst.max(wj.mul(&wj, &beta).max_diff(&wj));
        for i in 1..n {
            worst = worst.max(TLElement::generator(i, n)?.mul(&wj, &beta).max_coeff());
        }
    }
    Ok(worst)
}

/// Largest relative deviation of every projector closed form and recursion from the
/// directly projected top column, on r points.
pub fn appendix_a_deviation(r: usize, params: &SpectralParams) -> Result<(f64, usize)> {
    let column = wj_top_column::<Complex64>(r, params)?;
    let direct = |w: &LinkState| column.get(w).copied().unwrap_or_default();
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    let mut record = |value: Complex64, reference: Complex64| {
        worst = worst.max(rel(value, reference));
        compared += 1;
    };
    if r >= 2 {
        record(p_first_bubble(r, params), direct(&nested_state(r, 1, 1)?));
    }
    for n in 1..r {
        let reference = direct(&nested_state(r, n, 1)?);
        record(p_single_bubble(r, n, params), reference);
        record(p_single_bubble_recursive(r, n, params), reference);
    }
    for m in 1..=r / 2 {
        let reference = direct(&nested_state(r, m, m)?);
        record(p_concentric(r, m, params), reference);
        record(p_concentric_recursive(r, m, params), reference);
        for n in m..=r - m {
            record(p_nested(r, n, m, params), direct(&nested_state(r, n, m)?));
        }
    }
    let mut shift = LeftShift::<Complex64>::new(params);
    for w in LinkBasis::new(r)?.states().iter().filter(|w| w.num_arcs() > 0) {
        let reference = direct(w);
        let (u, factor) = cluster_replacement::<Complex64>(w, params);
        record(factor * direct(&u), reference);
        record(shift.coeff(w), reference);
        record(p_via_alpha(w, params), reference);
        let alpha = alpha_expansion::<Complex64>(w, params);
        let expanded: Complex64 = alpha.iter().map(|(&i, a)| a * direct(&nested_state(r, i, i).expect("fits"))).sum();
        record(expanded, reference);
        record(pr_coeff_formula(w, params)?, reference);
    }
    Ok((worst, compared))
}

/// Criterion 4: projector identities and the closed-form projector coefficients.
pub fn projector_suite() -> CheckResult {
    let check = Check::new("4", "Wenzl-Jones identities and projector closed forms", 1e-9, None);
    let run = || -> Result<(f64, f64, usize)> {
        let mut ident: f64 = 0.0;
        for lam in [0.71, 1.23] {
            ident = ident.max(projector_identities(6, &SpectralParams::real(lam, 0.0))?);
        }
        let mut formulas: f64 = 0.0;
        let mut compared = 0;
        for lam in GENERIC_LAMBDAS {
            for r in 1..=8 {
                let (w, k) = appendix_a_deviation(r, &SpectralParams::real(lam, 0.0))?;
                formulas = formulas.max(w);
                compared += k;
            }
        }
        Ok((ident, formulas, compared))
    };
    match run() {
        Ok((ident, formulas, compared)) => check.finish(
            formulas,
            ident <= 1e-10,
            format!("WJ identities {ident:.2e} (tol 1e-10, N ≤ 6); {compared} formula values, r ≤ 8, 5 λ"),
        ),
        Err(e) => check.error(e),
    }
}

/// Residual of F² (N even) or (F−2)(F+2) (N odd) at λ = π/2.
pub fn half_pi_polynomial_residual(n: usize) -> Result<f64> {
    let params = SpectralParams::rational(1, 2, 0.0);
    let f = build_rho_fn_sweep::<Complex64>(&LinkBasis::new(n)?, &params)?;
    let f = f.mat();
    let product = if n % 2 == 0 {
        f * f
    } else {
        let two = Mat::<Complex64>::identity(f.rows()).scale(&c(2.0));
        &(f - &two) * &(f + &two)
    };
    Ok(product.max_abs())
}

fn sampled_u(rng: &mut ChaCha8Rng, lambda: f64) -> f64 {
    rng.gen_range(0.1 * lambda..0.9 * lambda)
}

/// Criterion 5: Jordan patterns at λ = π/2, π/4 and π/3.
pub fn jordan_patterns(cfg: &VerifyConfig) -> CheckResult {
    let check = Check::new("5", "Jordan patterns at π/2, π/4, π/3", 1e-9, Some(300.0));
    let run = || -> Result<(f64, Vec<String>)> {
        let mut problems = Vec::new();
        let half = SpectralParams::rational(1, 2, 0.0);
        for n in [4, 6, 8] {
            let reports = jordan_analyze(&build_rho_fn_sweep::<Complex64>(&LinkBasis::new(n)?, &half)?, 1e-9)?;
            let expect: Vec<(usize, usize)> = [(2, 0), (6, 4)].into_iter().filter(|&(d, _)| d <= n).collect();
            let found = detected_links(&reports);
            let max_block = reports.iter().map(|r| r.max_block()).max().unwrap_or(0);
            let unlinked_blocks = reports.iter().any(|r| r.max_block() > 1 && r.sector_links.is_empty());
            if found != expect || max_block != 2 || unlinked_blocks {
                problems.push(format!("π/2 N={n}: links {found:?}, expected {expect:?}, largest block {max_block}"));
            }
        }
        let mut residual: f64 = 0.0;
        for n in [2, 3, 4, 5, 6, 7, 8] {
            residual = residual.max(half_pi_polynomial_residual(n)?);
        }
        let quarter = SpectralParams::rational(1, 4, 0.0);
        let found = detected_links(&jordan_analyze(&build_rho_fn_sweep::<Complex64>(&LinkBasis::new(8)?, &quarter)?, 1e-9)?);
        for pair in [(6, 0), (4, 2)] {
            if !found.contains(&pair) {
                problems.push(format!("π/4 N=8: link {pair:?} missing from {found:?}"));
            }
        }
        let third = SpectralParams::rational(1, 3, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for n in [4, 5, 6] {
            for _ in 0..3 {
                let u = sampled_u(&mut rng, third.lambda_f64());
                let d = build_rho_dn_sweep::<Complex64>(&LinkBasis::new(n)?, &third.with_u(u))?;
                let reports = jordan_analyze(&d, 1e-9)?;
                let largest = reports.iter().map(|r| r.max_block()).max().unwrap_or(0);
                if largest > 1 {
                    problems.push(format!("π/3 N={n} u={u:.6}: block of size {largest}"));
                }
            }
        }
        Ok((residual, problems))
    };
    match run() {
        Ok((residual, problems)) => {
            let detail = if problems.is_empty() {
                "π/2 links {(2,0),(6,4)} for N = 4,6,8; π/4 N=8 has (6,0),(4,2); π/3 D_N diagonalizable at 9 sampled u".into()
            } else {
                problems.join("; ")
            };
            check.finish(residual, problems.is_empty(), detail)
        }
        Err(e) => check.error(e),
    }
}

/// Predicted and detected links of ρ(F_N) at Λ = aπ/b; detected links with d − d' ≥ 2b
/// are split off.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinkComparison {
    pub n: usize,
    pub a: i64,
    pub b: i64,
    pub predicted: Vec<(usize, usize)>,
    pub detected: Vec<(usize, usize)>,
    pub far_links: Vec<(usize, usize)>,
}

impl LinkComparison {
    pub fn agrees(&self) -> bool {
        self.predicted == self.detected
    }
}

pub fn compare_links(n: usize, a: i64, b: i64, tol: f64) -> Result<LinkComparison> {
    let params = SpectralParams::rational(b - a, b, 0.0);
    let reports = jordan_analyze(&build_rho_fn_sweep::<Complex64>(&LinkBasis::new(n)?, &params)?, tol)?;
    let (far_links, detected): (Vec<_>, Vec<_>) =
        detected_links(&reports).into_iter().partition(|&(d, dp)| d - dp >= 2 * b as usize);
    let mut predicted = predicted_links(n, a, b)?;
    predicted.sort();
    Ok(LinkComparison { n, a, b, predicted, detected, far_links })
}

/// The (a, b) pairs covered by criterion 6: a odd, 0 < a < b ≤ 5, gcd(a, b) = 1.
pub fn criterion_six_pairs() -> Vec<(i64, i64)> {
    (2..=5).flat_map(|b| (1..b).step_by(2).filter(move |&a| gcd(a, b) == 1).map(move |a| (a, b))).collect()
}

/// Criterion 6: detected Jordan links agree with the arithmetic condition.
pub fn predicted_vs_detected() -> CheckResult {
    let check = Check::new("6", "predicted vs detected Jordan links", 0.0, None);
    let run = || -> Result<(usize, usize, Vec<String>, Vec<String>)> {
        let (mut cases, mut mismatches) = (0, 0);
        let mut notes = Vec::new();
        let mut far = Vec::new();
        for (a, b) in criterion_six_pairs() {
            for n in 2..=8 {
                let cmp = compare_links(n, a, b, 1e-9)?;
                cases += 1;
                if !cmp.agrees() {
                    mismatches += 1;
                    notes.push(format!("a/b={a}/{b} N={n}: predicted {:?}, detected {:?}", cmp.predicted, cmp.detected));
                }
                if !cmp.far_links.is_empty() {
                    far.push(format!("a/b={a}/{b} N={n}: {:?}", cmp.far_links));
                }
            }
        }
        Ok((cases, mismatches, notes, far))
    };
    match run() {
        Ok((cases, mismatches, notes, far)) => {
            let far_note = if far.is_empty() { "no links with d−d' ≥ 2b".to_string() } else { format!("links with d−d' ≥ 2b: {}", far.join("; ")) };
            let detail = format!("{cases} cases, {mismatches} mismatches; {far_note}{}", if notes.is_empty() { String::new() } else { format!("; {}", notes.join("; ")) });
            check.finish(mismatches as f64, true, detail)
        }
        Err(e) => check.error(e),
    }
}

/// Criterion 7: spin = FK = loop partition functions and the spectrum correspondence.
pub fn potts_three_way() -> CheckResult {
    let check = Check::new("7", "Potts spin = FK = loop", 1e-8, Some(120.0));
    let run = || -> Result<(f64, f64, u64, bool)> {
        let mut worst: f64 = 0.0;
        let mut spectrum: f64 = 0.0;
        let mut euler = 0;
        let mut contained = true;
        for (p, q) in [(1, 4), (1, 6)] {
            let params = SpectralParams::rational(p, q, 0.3);
            let pp = PottsParams::new(params)?;
            for m in 1..=2 {
                let row = three_way(4, m, &pp)?;
                worst = worst.max(row.max_rel_dev);
                if m == 1 {
                    euler += row.euler_failures;
                }
            }
            let cmp = compare_spectra(4, &pp, 1e-6)?;
            spectrum = spectrum.max(cmp.max_weight_mismatch);
            contained &= cmp.uncontained == 0;
        }
        Ok((worst, spectrum, euler, contained))
    };
    match run() {
        Ok((worst, spectrum, euler, contained)) => check.finish(
            worst,
            spectrum <= 1e-6 && euler == 0 && contained,
            format!("Q=2,3, N=4, M=1,2; spectrum containment {contained}, weight mismatch {spectrum:.2e} (tol 1e-6); Euler failures {euler}"),
        ),
        Err(e) => check.error(e),
    }
}

/// Criterion 8: boundary partition functions against constrained spin sums.
pub fn boundary_partition_functions() -> CheckResult {
    let check = Check::new("8", "boundary partition functions", 1e-8, None);
    let run = || -> Result<f64> {
        let params = SpectralParams::rational(1, 4, 0.3);
        let pp = PottsParams::new(params)?;
        let mut worst: f64 = 0.0;
        for n in [2, 4] {
            for kind in [BoundaryKind::FixedDistinct, BoundaryKind::FixedSame, BoundaryKind::Free, BoundaryKind::Mixed] {
                let loop_side = boundary_z(kind, n, 1, &params)?;
                let spin_side = boundary_spin_sum(kind, n, 1, &pp)?;
                worst = worst.max(rel(c(loop_side), c(spin_side)));
            }
        }
        Ok(worst)
    };
    match run() {
        Ok(w) => check.finish(w, true, "Z^(a)..Z^(d), N = 2, 4, M = 1, Q = 2".into()),
        Err(e) => check.error(e),
    }
}

/// Criterion 9: brute force vs frontier sweep, commutation and centrality.
pub fn oracle_equivalence() -> CheckResult {
    let check = Check::new("9", "oracle equivalence, commutation, centrality", 1e-9, None);
    let run = || -> Result<(f64, f64)> {
        let params = SpectralParams::real(0.83, 0.29);
        let mut brute: f64 = 0.0;
        for n in 1..=7 {
            let basis = LinkBasis::new(n)?;
            let b = rho(&build_dn_brute::<Complex64>(n, &params)?, &basis, &params)?;
            let s = build_rho_dn_sweep::<Complex64>(&basis, &params)?;
            brute = brute.max(s.mat().rel_dev(b.mat()));
        }
        let mut comm: f64 = 0.0;
        for n in 1..=8 {
            let basis = LinkBasis::new(n)?;
            let d1 = build_rho_dn_sweep::<Complex64>(&basis, &params)?;
            let d2 = build_rho_dn_sweep::<Complex64>(&basis, &params.with_u(0.61))?;
            let scale = d1.mat().max_abs().max(1.0) * d2.mat().max_abs().max(1.0);
            comm = comm.max(d1.mat().commutator(d2.mat()).max_abs() / scale);
            let f = build_rho_fn_sweep::<Complex64>(&basis, &params)?;
            for i in 1..n {
                let e = rho(&TLElement::generator(i, n)?, &basis, &params)?;
                let scale = f.mat().max_abs().max(1.0) * e.mat().max_abs().max(1.0);
                comm = comm.max(f.mat().commutator(e.mat()).max_abs() / scale);
            }
        }
        Ok((brute, comm))
    };
    match run() {
        Ok((brute, comm)) => check.finish(
            comm,
            brute <= 1e-10,
            format!("brute vs sweep {brute:.2e} (tol 1e-10, N ≤ 7); commutators normalized by entry scale, N ≤ 8"),
        ),
        Err(e) => check.error(e),
    }
}

/// Runs one numbered criterion.
pub fn run_criterion(id: u8, cfg: &VerifyConfig) -> Result<CheckResult> {
    Ok(match id {
        1 => diagonal_blocks(),
        2 => top_fourier_mode(),
        3 => appendix_b(),
        4 => projector_suite(),
        5 => jordan_patterns(cfg),
        6 => predicted_vs_detected(),
        7 => potts_three_way(),
        8 => boundary_partition_functions(),
        9 => oracle_equivalence(),
        _ => return invalid(format!("criteria are numbered 1 to 9, got {id}")),
    })
}

/// All nine criteria in order.
pub fn run_all(cfg: &VerifyConfig) -> Vec<CheckResult> {
    (1..=9).map(|id| run_criterion(id, cfg).expect("valid id")).collect()
}

/// The 8x8 and 2x2 element routes on B_N at one λ.
pub fn appendix_b_at(n: usize, params: &SpectralParams) -> CheckResult {
    let check = Check::new("appendixB", "8x8 and 2x2 routes vs direct expansion", 1e-9, None);
    match element_routes(n, params) {
        Ok((w, k)) => check.finish(w, true, format!("{k} elements on B_{n} at λ = {}", params.lambda)),
        Err(e) => check.error(e),
    }
}

/// The projector closed forms on r points at one λ.
pub fn appendix_a_at(r: usize, params: &SpectralParams) -> CheckResult {
    let check = Check::new("appendixA", "projector closed forms vs direct projection", 1e-9, None);
    match appendix_a_deviation(r, params) {
        Ok((w, k)) => check.finish(w, true, format!("{k} values on {r} points at λ = {}", params.lambda)),
        Err(e) => check.error(e),
    }
}

/// Predicted vs detected links at one N and rational λ.
pub fn jordan_at(n: usize, params: &SpectralParams, tol: f64) -> CheckResult {
    let check = Check::new("jordan", "predicted vs detected links", 0.0, None);
    let Some((a, b)) = params.ab() else {
        return check.error(crate::Error::InvalidArgument("the Jordan prediction needs λ as a rational multiple of π".into()));
    };
    match compare_links(n, a, b, tol) {
        Ok(cmp) => {
            let detail = format!("predicted {:?}, detected {:?}, far {:?}", cmp.predicted, cmp.detected, cmp.far_links);
            check.finish(if cmp.agrees() { 0.0 } else { 1.0 }, true, detail)
        }
        Err(e) => check.error(e),
    }
}

/// A seeded anisotropy in (0.1λ, 0.9λ).
pub fn seeded_u(seed: u64, lambda: f64) -> f64 {
    sampled_u(&mut ChaCha8Rng::seed_from_u64(seed), lambda)
}
