//! The subcommands. Each returns its rendered report and whether its checks passed.

use loopalg::link_rep::SectorMatrix;
use loopalg::linkspace::eta_encode;
use loopalg::matrix::{to_csv, MatrixJson};
use loopalg::potts::{boundary_spin_sum, boundary_z, compare_spectra, three_way, BoundaryKind, PottsParams, PottsRow, SpectrumComparison};
use loopalg::spectral::{detected_links, jordan_analyze, sector_spectrum, JordanReport};
use loopalg::transfer::{build_rho_dn_sweep, build_rho_fn_sweep, fn_diagonal_value};
use loopalg::verify::{appendix_a_at, appendix_b_at, jordan_at, run_all, run_criterion, CheckResult, VerifyConfig};
use loopalg::wenzl_jones::predicted_links;
use loopalg::{Error, LinkBasis, Precision, Result, Scalar, SpectralParams, XComplex};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::{BoundaryArg, RunConfig};
use crate::render::{align, csv_field, format_links, render, short_complex, Tabular};

/// Largest N listed by `basis` (binomial(20, 10) = 184756 states).
pub const BASIS_MAX_N: usize = 20;
/// Largest N for dense eigenvalue and rank work in double precision.
pub const SPECTRAL_MAX_N: usize = 12;
/// Largest N for the extended-precision rank work.
pub const EXTENDED_SPECTRAL_MAX_N: usize = 8;

pub struct Outcome {
    pub text: String,
    pub passed: bool,
}

fn capacity<T>(what: &str, n: usize, limit: usize) -> Result<T> {
    Err(Error::Capacity(format!("{what} needs N ≤ {limit}, got N = {n}")))
}

fn c64(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

// ---------------------------------------------------------------- basis

#[derive(Serialize)]
struct BasisRow {
    index: usize,
    defects: usize,
    state: String,
    partner: Vec<i64>,
    eta: String,
}

#[derive(Serialize)]
struct BasisReport {
    n: usize,
    dim: usize,
    states: Vec<BasisRow>,
}

impl Tabular for BasisReport {
    fn csv(&self) -> String {
        let mut out = String::from("index,defects,state,eta\n");
        for r in &self.states {
            out += &format!("{},{},{},{}\n", r.index, r.defects, csv_field(&r.state), csv_field(&r.eta));
        }
        out
    }

    fn table(&self) -> String {
        let rows: Vec<Vec<String>> = self.states.iter().map(|r| vec![r.index.to_string(), r.defects.to_string(), r.state.clone(), r.eta.clone()]).collect();
        format!("N = {}: {} link states\n", self.n, self.dim) + &align(&["index", "d", "state", "eta"], &rows)
    }
}

pub fn basis(cfg: &RunConfig) -> Result<Outcome> {
    let n = cfg.require_n()?;
    if n > BASIS_MAX_N {
        return capacity("listing the link basis", n, BASIS_MAX_N);
    }
    let basis = LinkBasis::new(n)?;
    let states = basis
        .states()
        .iter()
        .enumerate()
        .map(|(index, s)| BasisRow { index, defects: s.defects(), state: s.to_string(), partner: s.to_signed(), eta: eta_encode(s).to_string() })
        .collect();
    let report = BasisReport { n, dim: basis.dim(), states };
    Ok(Outcome { text: render(&report, cfg.format), passed: true })
}

// ---------------------------------------------------------------- matrices

#[derive(Serialize)]
struct MatrixReport {
    what: &'static str,
    n: usize,
    lambda: String,
    u: Option<f64>,
    precision: Precision,
    sectors: Vec<usize>,
    offsets: Vec<usize>,
    matrix: MatrixJson,
    #[serde(skip)]
    csv: String,
    #[serde(skip)]
    entries: Vec<Vec<String>>,
}

impl Tabular for MatrixReport {
    fn csv(&self) -> String {
        self.csv.clone()
    }

    fn table(&self) -> String {
        let layout: Vec<String> = self.sectors.iter().zip(&self.offsets).map(|(d, o)| format!("d={d}@{o}")).collect();
        let mut out = format!(
            "{} for N = {}, λ = {}{} ({} × {}); sectors {}\n",
            self.what,
            self.n,
            self.lambda,
            self.u.map(|u| format!(", u = {u}")).unwrap_or_default(),
            self.matrix.rows,
            self.matrix.cols,
            layout.join(" ")
        );
        let width = self.entries.iter().flatten().map(|s| s.chars().count()).max().unwrap_or(1);
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            out += &cells.join(" ");
            out.push('\n');
        }
        out
    }
}

fn matrix_report<S: Scalar>(what: &'static str, cfg: &RunConfig, m: &SectorMatrix<S>, params: &SpectralParams, with_u: bool) -> MatrixReport {
    let mat = m.mat();
    MatrixReport {
        what,
        n: m.n(),
        lambda: params.lambda.to_string(),
        u: with_u.then_some(params.u),
        precision: cfg.precision,
        sectors: m.sectors().to_vec(),
        offsets: m.offsets().to_vec(),
        matrix: MatrixJson::from(mat),
        csv: to_csv(mat),
        entries: (0..mat.rows()).map(|i| (0..mat.cols()).map(|j| short_complex(mat[(i, j)].to_c64())).collect()).collect(),
    }
}

fn sweep_limit(n: usize) -> Result<()> {
    if n > loopalg::transfer::SWEEP_MAX_N {
        return capacity("the transfer-matrix sweep", n, loopalg::transfer::SWEEP_MAX_N);
    }
    Ok(())
}

pub fn dmatrix(cfg: &RunConfig) -> Result<Outcome> {
    let n = cfg.require_n()?;
    sweep_limit(n)?;
    let params = cfg.params()?;
    let basis = LinkBasis::new(n)?;
    let report = match cfg.precision {
        Precision::Double => matrix_report("ρ(D_N)", cfg, &build_rho_dn_sweep::<Complex64>(&basis, &params)?, &params, true),
        Precision::Extended => matrix_report("ρ(D_N)", cfg, &build_rho_dn_sweep::<XComplex>(&basis, &params)?, &params, true),
    };
    Ok(Outcome { text: render(&report, cfg.format), passed: true })
}

pub fn fmatrix(cfg: &RunConfig) -> Result<Outcome> {
    let n = cfg.require_n()?;
    sweep_limit(n)?;
    let params = SpectralParams::new(cfg.require_lambda()?, 0.0);
    let basis = LinkBasis::new(n)?;
    let report = match cfg.precision {
        Precision::Double => matrix_report("ρ(F_N)", cfg, &build_rho_fn_sweep::<Complex64>(&basis, &params)?, &params, false),
        Precision::Extended => matrix_report("ρ(F_N)", cfg, &build_rho_fn_sweep::<XComplex>(&basis, &params)?, &params, false),
    };
    Ok(Outcome { text: render(&report, cfg.format), passed: true })
}

// ---------------------------------------------------------------- spectrum

#[derive(Serialize)]
struct SectorEigenvalues {
    d: usize,
    f_value: f64,
    eigenvalues: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct SpectrumReport {
    n: usize,
    lambda: String,
    u: f64,
    sectors: Vec<SectorEigenvalues>,
}

impl Tabular for SpectrumReport {
    fn csv(&self) -> String {
        let mut out = String::from("d,k,re,im\n");
        for s in &self.sectors {
            for (k, z) in s.eigenvalues.iter().enumerate() {
                out += &format!("{},{},{:.16e},{:.16e}\n", s.d, k, z[0], z[1]);
            }
        }
        out
    }

    fn table(&self) -> String {
        let mut rows = Vec::new();
        for s in &self.sectors {
            for (k, z) in s.eigenvalues.iter().enumerate() {
                rows.push(vec![s.d.to_string(), k.to_string(), short_complex(Complex64::new(z[0], z[1])), short_complex(Complex64::new(s.f_value, 0.0))]);
            }
        }
        format!("Spectrum of ρ(D_N) by sector, N = {}, λ = {}, u = {}\n", self.n, self.lambda, self.u) + &align(&["d", "k", "eigenvalue", "F_N on sector"], &rows)
    }
}

fn spectral_limit(cfg: &RunConfig, n: usize) -> Result<()> {
    let limit = match cfg.precision {
        Precision::Double => SPECTRAL_MAX_N,
        Precision::Extended => EXTENDED_SPECTRAL_MAX_N,
    };
    if n > limit {
        return capacity(&format!("dense spectral analysis in {:?} precision", cfg.precision).to_lowercase(), n, limit);
    }
    Ok(())
}

pub fn spectrum(cfg: &RunConfig) -> Result<Outcome> {
    let n = cfg.require_n()?;
    spectral_limit(cfg, n)?;
    let params = cfg.params()?;
    let basis = LinkBasis::new(n)?;
    let per_sector = match cfg.precision {
        Precision::Double => sector_spectrum(&build_rho_dn_sweep::<Complex64>(&basis, &params)?),
        Precision::Extended => sector_spectrum(&build_rho_dn_sweep::<XComplex>(&basis, &params)?),
    };
    let sectors = per_sector
        .into_iter()
        .map(|(d, eigs)| SectorEigenvalues { d, f_value: fn_diagonal_value::<Complex64>(d, &params).re, eigenvalues: eigs.into_iter().map(c64).collect() })
        .collect();
    let report = SpectrumReport { n, lambda: params.lambda.to_string(), u: params.u, sectors };
    Ok(Outcome { text: render(&report, cfg.format), passed: true })
}

// ---------------------------------------------------------------- jordan

#[derive(Serialize)]
struct JordanOutput {
    n: usize,
    lambda: String,
    u: f64,
    precision: Precision,
    tolerance: f64,
    /// Λ/π = a/b, when λ is rational.
    big_lambda_ratio: Option<(i64, i64)>,
    predicted_links: Option<Vec<(usize, usize)>>,
    detected_links: Vec<(usize, usize)>,
    agrees: Option<bool>,
    clusters: Vec<JordanReport>,
}

impl Tabular for JordanOutput {
    fn csv(&self) -> String {
        let mut out = String::from("eigenvalue_re,eigenvalue_im,multiplicity,max_block,blocks,sectors,links,warnings\n");
        for r in &self.clusters {
            let blocks: Vec<String> = r.block_size_histogram.iter().map(|(s, c)| format!("{s}x{c}")).collect();
            let sectors: Vec<String> = r.sectors.iter().map(|(d, c)| format!("{d}:{c}")).collect();
            out += &format!(
                "{:.16e},{:.16e},{},{},{},{},{},{}\n",
                r.eigenvalue.re,
                r.eigenvalue.im,
                r.algebraic_multiplicity,
                r.max_block(),
                csv_field(&blocks.join(" ")),
                csv_field(&sectors.join(" ")),
                csv_field(&format_links(&r.sector_links)),
                csv_field(&r.warnings.join("; "))
            );
        }
        out
    }

    fn table(&self) -> String {
        let mut out = format!("Jordan structure of ρ(D_N), N = {}, λ = {}, u = {}, tol = {:e}\n", self.n, self.lambda, self.u, self.tolerance);
        match (&self.predicted_links, self.big_lambda_ratio) {
            (Some(p), Some((a, b))) => out += &format!("predicted links (Λ/π = {a}/{b}): {}\n", format_links(p)),
            _ => out += "predicted links: n/a (λ given as a decimal)\n",
        }
        out += &format!("detected links:  {}\n", format_links(&self.detected_links));
        if let Some(agrees) = self.agrees {
            out += &format!("agreement: {}\n", if agrees { "yes" } else { "NO" });
        }
        let rows: Vec<Vec<String>> = self
            .clusters
            .iter()
            .filter(|r| r.max_block() > 1 || r.sectors.len() > 1 || !r.warnings.is_empty())
            .map(|r| {
                let sectors: Vec<String> = r.sectors.iter().map(|(d, c)| format!("{d}:{c}")).collect();
                vec![
                    short_complex(r.eigenvalue),
                    r.algebraic_multiplicity.to_string(),
                    r.max_block().to_string(),
                    sectors.join(" "),
                    format_links(&r.sector_links),
                    r.warnings.join("; "),
                ]
            })
            .collect();
        out += &format!("{} eigenvalue clusters; shared by several sectors:\n", self.clusters.len());
        out + &align(&["eigenvalue", "mult", "max block", "sectors", "links", "warnings"], &rows)
    }
}

pub fn jordan(cfg: &RunConfig) -> Result<Outcome> {
    let n = cfg.require_n()?;
    spectral_limit(cfg, n)?;
    let params = cfg.params()?;
    let tol = cfg.tol_or(cfg.precision.default_tol());
    let basis = LinkBasis::new(n)?;
    let clusters = match cfg.precision {
        Precision::Double => jordan_analyze(&build_rho_dn_sweep::<Complex64>(&basis, &params)?, tol)?,
        Precision::Extended => jordan_analyze(&build_rho_dn_sweep::<XComplex>(&basis, &params)?, tol)?,
    };
    let detected = detected_links(&clusters);
    let ratio = params.ab();
    let predicted = ratio.map(|(a, b)| predicted_links(n, a, b)).transpose()?;
    let agrees = predicted.as_ref().map(|p| *p == detected);
    let report = JordanOutput {
        n,
        lambda: params.lambda.to_string(),
        u: params.u,
        precision: cfg.precision,
        tolerance: tol,
        big_lambda_ratio: ratio,
        predicted_links: predicted,
        detected_links: detected,
        agrees,
        clusters,
    };
    Ok(Outcome { text: render(&report, cfg.format), passed: agrees.unwrap_or(true) })
}

// ---------------------------------------------------------------- potts

#[derive(Serialize)]
struct BoundaryOutput {
    kind: String,
    z_loop: f64,
    z_spin: f64,
    rel_dev: f64,
}

#[derive(Serialize)]
struct PottsOutput {
    lambda: String,
    tolerance: f64,
    row: PottsRow,
    spectrum: SpectrumComparison,
    boundary: Option<BoundaryOutput>,
    passed: bool,
}

impl Tabular for PottsOutput {
    fn csv(&self) -> String {
        format!("{}\n{}\n", PottsRow::CSV_HEADER, self.row.to_csv())
    }

    fn table(&self) -> String {
        let r = &self.row;
        let mut out = format!("Potts model, N = {}, M = {}, Q = {:.6}, λ = {}, u = {}\n", r.n, r.m, r.q, self.lambda, r.u);
        let rows = vec![
            vec!["Z_spin".to_string(), format!("{:.12e}", r.z_spin)],
            vec!["Z_fk".to_string(), format!("{:.12e}", r.z_fk)],
            vec!["Z_loop".to_string(), format!("{:.12e}", r.z_loop)],
            vec!["max rel. dev.".to_string(), format!("{:.3e} (tol {:e})", r.max_rel_dev, self.tolerance)],
            vec!["Euler failures".to_string(), r.euler_failures.to_string()],
            vec!["spin eigenvalues outside loop spectrum".to_string(), self.spectrum.uncontained.to_string()],
            vec!["max |multiplicity − weight|".to_string(), format!("{:.3e}", self.spectrum.max_weight_mismatch)],
        ];
        out += &align(&["quantity", "value"], &rows);
        if let Some(b) = &self.boundary {
            out += &format!("boundary ({}): Z_loop = {:.12e}, Z_spin = {:.12e}, rel. dev. {:.3e}\n", b.kind, b.z_loop, b.z_spin, b.rel_dev);
        }
        out += if self.passed { "result: pass\n" } else { "result: FAIL\n" };
        out
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn potts(cfg: &RunConfig, boundary: Option<BoundaryArg>) -> Result<Outcome> {
    let n = cfg.require_n()?;
    let m = cfg.m.unwrap_or(1);
    let pp = PottsParams::new(cfg.params()?)?;
    pp.spin_states()?;
    let tol = cfg.tol_or(1e-8);
    let row = three_way(n, m, &pp)?;
    let spectrum = compare_spectra(n, &pp, 1e-6)?;
    let boundary = boundary
        .map(|b| -> Result<BoundaryOutput> {
            let kind = BoundaryKind::from(b);
            let z_loop = boundary_z(kind, n, m, &pp.spectral)?;
            let z_spin = boundary_spin_sum(kind, n, m, &pp)?;
            Ok(BoundaryOutput { kind: format!("{kind:?}"), z_loop, z_spin, rel_dev: rel(z_loop, z_spin) })
        })
        .transpose()?;
    let passed = row.max_rel_dev <= tol && row.euler_failures == 0 && spectrum.holds(1e-6) && boundary.as_ref().is_none_or(|b| b.rel_dev <= tol);
    let report = PottsOutput { lambda: pp.spectral.lambda.to_string(), tolerance: tol, row, spectrum, boundary, passed };
    Ok(Outcome { text: render(&report, cfg.format), passed })
}

// ---------------------------------------------------------------- verify

#[derive(Serialize)]
struct VerifyOutput {
    suite: String,
    seed: u64,
    checks: Vec<CheckResult>,
    passed: bool,
}

impl Tabular for VerifyOutput {
    fn csv(&self) -> String {
        let mut out = String::from("id,name,passed,metric,tolerance,detail\n");
        for c in &self.checks {
            out += &format!("{},{},{},{:.3e},{:e},{}\n", csv_field(&c.id), csv_field(&c.name), c.passed, c.metric, c.tolerance, csv_field(&c.detail));
        }
        out
    }

    fn table(&self) -> String {
        let mut out: String = self.checks.iter().map(|c| c.line() + "\n").collect();
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        out += &format!("{} of {} checks passed\n", self.checks.len() - failed, self.checks.len());
        out
    }
}

pub fn verify(cfg: &RunConfig, suite: &str) -> Result<Outcome> {
    let vcfg = VerifyConfig { seed: cfg.seed };
    let checks = match suite {
        "all" => run_all(&vcfg),
        "appendixB" => vec![appendix_b_at(cfg.require_n()?, &SpectralParams::new(cfg.require_lambda()?, 0.0))],
        "appendixA" => vec![appendix_a_at(cfg.require_n()?, &SpectralParams::new(cfg.require_lambda()?, 0.0))],
        "jordan" => {
            let params = SpectralParams::new(cfg.require_lambda()?, 0.0);
            if params.ab().is_none() {
                return Err(Error::InvalidArgument("the jordan suite needs λ as a rational multiple of π".into()));
            }
            vec![jordan_at(cfg.require_n()?, &params, cfg.tol_or(Precision::Double.default_tol()))]
        }
        other => match other.parse::<u8>() {
            Ok(id) => vec![run_criterion(id, &vcfg)?],
            Err(_) => return Err(Error::InvalidArgument(format!("unknown suite '{other}' (expected all, 1..9, appendixA, appendixB or jordan)"))),
        },
    };
    let passed = checks.iter().all(|c| c.passed);
    let report = VerifyOutput { suite: suite.to_string(), seed: cfg.seed, checks, passed };
    Ok(Outcome { text: render(&report, cfg.format), passed })
}
