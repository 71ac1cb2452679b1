//! Spectral parameters: the crossing parameter λ, its complement Λ = π − λ,
//! the loop weight β = 2 cos λ, and the anisotropy u.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// How λ was specified.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum LambdaSpec {
    /// λ = p π / q with gcd(p, q) = 1 and q > 0.
    Rational { p: i64, q: i64 },
    /// λ given directly in radians.
    Real(f64),
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl LambdaSpec {
    /// λ = p π / q, reduced to lowest terms.
    pub fn rational(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return invalid("denominator of λ/π must be non-zero");
        }
        let g = gcd(p, q).max(1);
        let s = if q < 0 { -1 } else { 1 };
        Ok(LambdaSpec::Rational { p: s * p / g, q: s * q / g })
    }

    /// Parses `"a/b"` (meaning λ = aπ/b) or a decimal number of radians.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if let Some((a, b)) = t.split_once('/') {
            let p: i64 = a.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in λ '{t}'")))?;
            let q: i64 = b.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in λ '{t}'")))?;
            Self::rational(p, q)
        } else {
            let x: f64 = t.parse().map_err(|_| Error::Parse(format!("λ must be 'a/b' (times π) or a decimal, got '{t}'")))?;
            if !x.is_finite() {
                return invalid("λ must be finite");
            }
            Ok(LambdaSpec::Real(x))
        }
    }

    pub fn radians(&self) -> f64 {
        match *self {
            LambdaSpec::Rational { p, q } => std::f64::consts::PI * p as f64 / q as f64,
            LambdaSpec::Real(x) => x,
        }
    }

    /// Λ/π = a/b in lowest terms with b > 0, available for rational λ only.
    pub fn big_lambda_ratio(&self) -> Option<(i64, i64)> {
        match *self {
            LambdaSpec::Rational { p, q } => {
                let (a, b) = (q - p, q);
                let g = gcd(a, b).max(1);
                Some((a / g, b / g))
            }
            LambdaSpec::Real(_) => None,
        }
    }
}

impl fmt::Display for LambdaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            LambdaSpec::Rational { p, q } => {
                match p {
                    0 => write!(f, "0")?,
                    1 => write!(f, "π")?,
                    -1 => write!(f, "-π")?,
                    _ => write!(f, "{p}π")?,
                }
                if q != 1 && p != 0 {
                    write!(f, "/{q}")?;
                }
                Ok(())
            }
            LambdaSpec::Real(x) => write!(f, "{x}"),
        }
    }
}

/// Parameter bundle shared by the algebraic and transfer-matrix routines.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralParams {
    pub lambda: LambdaSpec,
    /// Real offset added to λ (used to approach critical points).
    pub shift: f64,
    /// Anisotropy parameter u.
    pub u: f64,
}

impl SpectralParams {
    pub fn new(lambda: LambdaSpec, u: f64) -> Self {
        SpectralParams { lambda, shift: 0.0, u }
    }

    /// λ = pπ/q.
    pub fn rational(p: i64, q: i64, u: f64) -> Self {
        Self::new(LambdaSpec::rational(p, q).expect("non-zero denominator"), u)
    }

    /// λ in radians.
    pub fn real(lambda: f64, u: f64) -> Self {
        Self::new(LambdaSpec::Real(lambda), u)
    }

    pub fn with_u(&self, u: f64) -> Self {
        SpectralParams { u, ..*self }
    }

    pub fn with_shift(&self, shift: f64) -> Self {
        SpectralParams { shift, ..*self }
    }

    pub fn lambda_f64(&self) -> f64 {
        self.lambda.radians() + self.shift
    }

    /// λ in the requested scalar type, computed from an exact π when λ is rational.
    pub fn lambda<S: Scalar>(&self) -> S {
        let base = match self.lambda {
            LambdaSpec::Rational { p, q } => S::pi() * S::from_i64(p) / S::from_i64(q),
            LambdaSpec::Real(x) => S::from_f64(x),
        };
        if self.shift == 0.0 {
            base
        } else {
            base + S::from_f64(self.shift)
        }
    }

    /// Λ = π − λ.
    pub fn big_lambda<S: Scalar>(&self) -> S {
        S::pi() - self.lambda::<S>()
    }

    /// β = 2 cos λ.
    pub fn beta<S: Scalar>(&self) -> S {
        S::from_f64(2.0) * self.lambda::<S>().cos()
    }

    pub fn beta_c64(&self) -> Complex64 {
        self.beta::<Complex64>()
    }

    /// q = e^{iλ}.
    pub fn q<S: Scalar>(&self) -> S {
        self.lambda::<S>().exp_i()
    }

    pub fn u<S: Scalar>(&self) -> S {
        S::from_f64(self.u)
    }

    /// Λ/π = a/b for rational λ (ignores any shift).
    pub fn ab(&self) -> Option<(i64, i64)> {
        self.lambda.big_lambda_ratio()
    }

    /// λ is critical for size N if e^{iΛ} is a 2l-th root of unity for some 2 ≤ l ≤ N,
    /// i.e. b divides some l in [2, N]. Decided from the rational input only.
    pub fn is_critical(&self, n: usize) -> bool {
        if self.shift != 0.0 {
            return false;
        }
        match self.ab() {
            Some((_, b)) => n >= 2 && (2..=n as i64).any(|l| l % b == 0),
            None => false,
        }
    }

    /// S_{n/2} = sin(nΛ/2) vanishes exactly (rational, unshifted λ only).
    pub fn half_sine_vanishes(&self, n: i64) -> bool {
        if self.shift != 0.0 {
            return false;
        }
        match self.ab() {
            // nΛ/(2π) = na/(2b) must be an integer.
            Some((a, b)) => (n * a) % (2 * b) == 0,
            None => false,
        }
    }

    /// C_{n/2} = cos(nΛ/2) vanishes exactly (rational, unshifted λ only).
    pub fn half_cosine_vanishes(&self, n: i64) -> bool {
        if self.shift != 0.0 {
            return false;
        }
        match self.ab() {
            // na/(2b) must be a half-odd integer: na/b odd.
            Some((a, b)) => (n * a) % b == 0 && ((n * a) / b).rem_euclid(2) == 1,
            None => false,
        }
    }

    pub fn trig<S: Scalar>(&self) -> Trig<S> {
        Trig::new(self.big_lambda::<S>())
    }
}

/// The compact trigonometric notation S_k = sin(kΛ), C_k = cos(kΛ), including half-integer k.
#[derive(Clone, Debug)]
pub struct Trig<S: Scalar> {
    pub big_lambda: S,
}

impl<S: Scalar> Trig<S> {
    pub fn new(big_lambda: S) -> Self {
        Trig { big_lambda }
    }

    /// sin(kΛ).
    pub fn s(&self, k: i64) -> S {
        (S::from_i64(k) * self.big_lambda.clone()).sin()
    }

    /// cos(kΛ).
    pub fn c(&self, k: i64) -> S {
        (S::from_i64(k) * self.big_lambda.clone()).cos()
    }

    /// sin(nΛ/2).
    pub fn s_half(&self, n: i64) -> S {
        (S::from_i64(n) * self.big_lambda.clone() / S::from_f64(2.0)).sin()
    }

    /// cos(nΛ/2).
    pub fn c_half(&self, n: i64) -> S {
        (S::from_i64(n) * self.big_lambda.clone() / S::from_f64(2.0)).cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_reduce() {
        assert_eq!(LambdaSpec::parse("2/4").unwrap(), LambdaSpec::Rational { p: 1, q: 2 });
        assert_eq!(LambdaSpec::parse("1.0").unwrap(), LambdaSpec::Real(1.0));
        assert!(LambdaSpec::parse("1/0").is_err());
        assert!(LambdaSpec::parse("abc").is_err());
    }

    #[test]
    fn big_lambda_ratio() {
        // λ = π/2 → Λ = π/2; λ = π/4 → Λ = 3π/4; λ = π/3 → Λ = 2π/3.
        assert_eq!(LambdaSpec::rational(1, 2).unwrap().big_lambda_ratio(), Some((1, 2)));
        assert_eq!(LambdaSpec::rational(1, 4).unwrap().big_lambda_ratio(), Some((3, 4)));
        assert_eq!(LambdaSpec::rational(1, 3).unwrap().big_lambda_ratio(), Some((2, 3)));
    }

    #[test]
    fn beta_identity() {
        let p = SpectralParams::real(0.83, 0.2);
        let t = p.trig::<Complex64>();
        let beta = p.beta_c64();
        assert!((beta + t.s(2) / t.s(1)).norm() < 1e-14);
        assert!((beta + Complex64::new(2.0, 0.0) * t.c(1)).norm() < 1e-14);
    }

    #[test]
    fn criticality() {
        let p = SpectralParams::rational(1, 2, 0.3);
        assert!(p.is_critical(2));
        let p = SpectralParams::rational(1, 5, 0.3);
        assert!(!p.is_critical(4));
        assert!(p.is_critical(5));
        assert!(!SpectralParams::real(1.0, 0.3).is_critical(10));
    }

    #[test]
    fn exact_zeros_match_numeric() {
        for (p, q) in [(1, 2), (1, 3), (1, 4), (2, 5), (1, 6)] {
            let sp = SpectralParams::rational(p, q, 0.1);
            let t = sp.trig::<Complex64>();
            for n in 0..20 {
                assert_eq!(sp.half_sine_vanishes(n), t.s_half(n).norm() < 1e-12, "S {n}/2 at {p}/{q}");
                assert_eq!(sp.half_cosine_vanishes(n), t.c_half(n).norm() < 1e-12, "C {n}/2 at {p}/{q}");
            }
        }
    }
}
