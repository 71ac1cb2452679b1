//! Command-line flags and the validated run configuration built from them.

use clap::{Args, Parser, Subcommand, ValueEnum};
use loopalg::potts::BoundaryKind;
use loopalg::{Error, LambdaSpec, Precision, Result, SpectralParams};

/// Environment variable that overrides `--precision`.
pub const PRECISION_ENV: &str = "LOOPALG_PRECISION";

/// Default seed for sampled anisotropies.
pub const DEFAULT_SEED: u64 = 20_240_117;

#[derive(Parser, Debug)]
#[command(name = "loopalg", version, about = "Temperley-Lieb loop models: transfer matrices, projectors and Jordan structure")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// List the link states on N points in canonical order.
    Basis,
    /// The double-row transfer matrix ρ(D_N(λ, u)) in the link basis.
    Dmatrix,
    /// The braid-limit matrix ρ(F_N(λ)) in the link basis.
    Fmatrix,
    /// Eigenvalues of each diagonal block of ρ(D_N(λ, u)).
    Spectrum,
    /// Jordan structure of ρ(D_N(λ, u)), with predicted and detected sector links.
    Jordan,
    /// Potts partition functions from spins, FK graphs and loops.
    Potts {
        /// Boundary partition function to compare against a constrained spin sum.
        #[arg(long, value_enum)]
        boundary: Option<BoundaryArg>,
    },
    /// Run a verification suite: all, 1..9, appendixA, appendixB or jordan.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Flags {
    /// Number of points N.
    #[arg(long = "N", global = true)]
    pub n: Option<usize>,
    /// Crossing parameter: "a/b" for λ = aπ/b, or a decimal number of radians.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// Anisotropy u (defaults to a seeded draw in (0.1λ, 0.9λ)).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub u: Option<f64>,
    /// Number of double rows M.
    #[arg(long = "M", global = true)]
    pub m: Option<usize>,
    /// Number of Potts states Q = (2 cos λ)².
    #[arg(long = "Q", global = true)]
    pub q: Option<f64>,
    /// Tolerance for ranks and comparisons.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, global = true, default_value = "double")]
    pub precision: PrecisionArg,
    #[arg(long, value_enum, global = true, default_value = "table")]
    pub format: Format,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrecisionArg {
    Double,
    Extended,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryArg {
    A,
    B,
    C,
    D,
}

impl From<BoundaryArg> for BoundaryKind {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::A => BoundaryKind::FixedDistinct,
            BoundaryArg::B => BoundaryKind::FixedSame,
            BoundaryArg::C => BoundaryKind::Free,
            BoundaryArg::D => BoundaryKind::Mixed,
        }
    }
}

/// Validated inputs shared by every command.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub n: Option<usize>,
    pub lambda: Option<LambdaSpec>,
    pub u: Option<f64>,
    pub m: Option<usize>,
    pub tol: Option<f64>,
    pub precision: Precision,
    pub format: Format,
    pub threads: Option<usize>,
    pub seed: u64,
}

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

/// Integer Q with a rational λ: Q = 0, 1, 2, 3 at λ = π/2, π/3, π/4, π/6.
fn lambda_for_q(q: f64) -> LambdaSpec {
    const EXACT: [(f64, i64, i64); 4] = [(0.0, 1, 2), (1.0, 1, 3), (2.0, 1, 4), (3.0, 1, 6)];
    match EXACT.iter().find(|e| (e.0 - q).abs() < 1e-12) {
        Some(&(_, p, den)) => LambdaSpec::Rational { p, q: den },
        None => LambdaSpec::Real((q.sqrt() / 2.0).acos()),
    }
}

impl RunConfig {
    /// Builds the configuration; `env_precision` is the value of [`PRECISION_ENV`], if set.
    pub fn from_flags(flags: &Flags, env_precision: Option<&str>) -> Result<Self> {
        let precision = match env_precision {
            Some(text) => text.parse::<Precision>().map_err(|e| Error::InvalidArgument(format!("{PRECISION_ENV}: {e}")))?,
            None => match flags.precision {
                PrecisionArg::Double => Precision::Double,
                PrecisionArg::Extended => Precision::Extended,
            },
        };
        if let Some(tol) = flags.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return invalid(format!("--tol must be positive, got {tol}"));
            }
        }
        if flags.n == Some(0) {
            return invalid("--N must be at least 1");
        }
        if flags.m == Some(0) {
            return invalid("--M must be at least 1");
        }
        if flags.threads == Some(0) {
            return invalid("--threads must be at least 1");
        }
        if let Some(u) = flags.u {
            if !u.is_finite() {
                return invalid("--u must be finite");
            }
        }
        let mut lambda = flags.lambda.as_deref().map(LambdaSpec::parse).transpose()?;
        if let Some(q) = flags.q {
            if !(0.0..4.0).contains(&q) {
                return invalid(format!("--Q must lie in [0, 4), got {q}"));
            }
            let from_q = lambda_for_q(q);
            match lambda {
                None => lambda = Some(from_q),
                Some(l) => {
                    let implied = (2.0 * l.radians().cos()).powi(2);
                    if (implied - q).abs() > 1e-9 {
                        return invalid(format!("--lambda {l} gives Q = {implied}, which contradicts --Q {q}"));
                    }
                }
            }
        }
        Ok(RunConfig {
            n: flags.n,
            lambda,
            u: flags.u,
            m: flags.m,
            tol: flags.tol,
            precision,
            format: flags.format,
            threads: flags.threads,
            seed: flags.seed,
        })
    }

    pub fn require_n(&self) -> Result<usize> {
        self.n.ok_or_else(|| Error::InvalidArgument("this command needs --N".into()))
    }

    pub fn require_lambda(&self) -> Result<LambdaSpec> {
        self.lambda.ok_or_else(|| Error::InvalidArgument("this command needs --lambda (or --Q)".into()))
    }

    /// λ is critical-path capable only when given as a rational multiple of π.
    pub fn lambda_is_decimal(&self) -> bool {
        matches!(self.lambda, Some(LambdaSpec::Real(_)))
    }

    /// Parameters with u from `--u` or drawn from the seed.
    pub fn params(&self) -> Result<SpectralParams> {
        let lambda = self.require_lambda()?;
        let u = self.u.unwrap_or_else(|| loopalg::verify::seeded_u(self.seed, lambda.radians()));
        Ok(SpectralParams::new(lambda, u))
    }

    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}
