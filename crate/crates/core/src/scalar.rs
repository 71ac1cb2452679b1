//! Coefficient fields used throughout the crate.
//!
//! Every algebraic routine is generic over [`Scalar`], which is implemented for
//! double-precision complex numbers ([`Complex64`]) and for an extended-precision
//! complex type ([`XComplex`], about 60 significant decimal digits).

use std::cell::RefCell;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_complex::Complex64;
use num_traits::{One, Zero};

/// Which arithmetic the numerical routines run in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Double,
    Extended,
}

impl Precision {
    /// Default relative rank tolerance for this precision.
    pub fn default_tol(self) -> f64 {
        match self {
            Precision::Double => 1e-9,
            Precision::Extended => 1e-30,
        }
    }
}

impl std::str::FromStr for Precision {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "double" => Ok(Precision::Double),
            "extended" => Ok(Precision::Extended),
            other => Err(format!("unknown precision '{other}' (expected double or extended)")),
        }
    }
}

/// A complex coefficient field.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
{
    /// Machine epsilon of the underlying real type.
    const EPSILON: f64;
    const PRECISION: Precision;

    fn from_f64(x: f64) -> Self;
    fn from_c64(z: Complex64) -> Self;
    fn to_c64(&self) -> Complex64;
    /// The imaginary unit.
    fn i() -> Self;
    fn pi() -> Self;
    fn conj(&self) -> Self;
    /// Modulus, rounded to double precision.
    fn norm(&self) -> f64;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn exp(&self) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_f64(n as f64)
    }

    fn powi(&self, n: i32) -> Self {
        let mut base = if n < 0 { Self::one() / self.clone() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }

    /// `e^{i x}`.
    fn exp_i(&self) -> Self {
        (Self::i() * self.clone()).exp()
    }
}

impl Scalar for Complex64 {
    const EPSILON: f64 = f64::EPSILON;
    const PRECISION: Precision = Precision::Double;

    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn from_c64(z: Complex64) -> Self {
        z
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn i() -> Self {
        Complex64::i()
    }
    fn pi() -> Self {
        Complex64::new(std::f64::consts::PI, 0.0)
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn norm(&self) -> f64 {
        Complex64::norm(*self)
    }
    fn sin(&self) -> Self {
        Complex64::sin(*self)
    }
    fn cos(&self) -> Self {
        Complex64::cos(*self)
    }
    fn exp(&self) -> Self {
        Complex64::exp(*self)
    }
}

/// Working precision of [`XComplex`] in bits.
pub const EXTENDED_BITS: usize = 200;
const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

fn bf(x: f64) -> BigFloat {
    BigFloat::from_f64(x, EXTENDED_BITS)
}

fn bf_to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    match x.as_raw_parts() {
        Some((words, _, sign, exponent, _)) => {
            let top = *words.last().unwrap_or(&0) as f64 / 18446744073709551616.0;
            let mag = top * 2f64.powi(exponent);
            if sign == Sign::Neg {
                -mag
            } else {
                mag
            }
        }
        None => f64::NAN,
    }
}

fn bf_sin(x: &BigFloat) -> BigFloat {
    CONSTS.with(|c| x.sin(EXTENDED_BITS, RM, &mut c.borrow_mut()))
}

fn bf_cos(x: &BigFloat) -> BigFloat {
    CONSTS.with(|c| x.cos(EXTENDED_BITS, RM, &mut c.borrow_mut()))
}

fn bf_exp(x: &BigFloat) -> BigFloat {
    CONSTS.with(|c| x.exp(EXTENDED_BITS, RM, &mut c.borrow_mut()))
}

/// Extended-precision complex number (two 200-bit binary floats).
#[derive(Clone, PartialEq)]
pub struct XComplex {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl XComplex {
    pub fn new(re: BigFloat, im: BigFloat) -> Self {
        XComplex { re, im }
    }
}

impl fmt::Debug for XComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re, self.im)
    }
}

impl fmt::Display for XComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Add for XComplex {
    type Output = XComplex;
    fn add(self, o: XComplex) -> XComplex {
        XComplex::new(self.re.add(&o.re, EXTENDED_BITS, RM), self.im.add(&o.im, EXTENDED_BITS, RM))
    }
}

impl Sub for XComplex {
    type Output = XComplex;
    fn sub(self, o: XComplex) -> XComplex {
        XComplex::new(self.re.sub(&o.re, EXTENDED_BITS, RM), self.im.sub(&o.im, EXTENDED_BITS, RM))
    }
}

impl Mul for XComplex {
    type Output = XComplex;
    fn mul(self, o: XComplex) -> XComplex {
        let p = EXTENDED_BITS;
        let rr = self.re.mul(&o.re, p, RM);
        let ii = self.im.mul(&o.im, p, RM);
        let ri = self.re.mul(&o.im, p, RM);
        let ir = self.im.mul(&o.re, p, RM);
        XComplex::new(rr.sub(&ii, p, RM), ri.add(&ir, p, RM))
    }
}

impl Div for XComplex {
    type Output = XComplex;
    fn div(self, o: XComplex) -> XComplex {
        let p = EXTENDED_BITS;
        let den = o.re.mul(&o.re, p, RM).add(&o.im.mul(&o.im, p, RM), p, RM);
        let num = self * o.conj();
        XComplex::new(num.re.div(&den, p, RM), num.im.div(&den, p, RM))
    }
}

impl Neg for XComplex {
    type Output = XComplex;
    fn neg(self) -> XComplex {
        XComplex::new(self.re.neg(), self.im.neg())
    }
}

impl AddAssign for XComplex {
    fn add_assign(&mut self, o: XComplex) {
        *self = self.clone() + o;
    }
}

impl SubAssign for XComplex {
    fn sub_assign(&mut self, o: XComplex) {
        *self = self.clone() - o;
    }
}

impl MulAssign for XComplex {
    fn mul_assign(&mut self, o: XComplex) {
        *self = self.clone() * o;
    }
}

impl DivAssign for XComplex {
    fn div_assign(&mut self, o: XComplex) {
        *self = self.clone() / o;
    }
}

impl Zero for XComplex {
    fn zero() -> Self {
        XComplex::new(bf(0.0), bf(0.0))
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for XComplex {
    fn one() -> Self {
        XComplex::new(bf(1.0), bf(0.0))
    }
}

impl Scalar for XComplex {
    const EPSILON: f64 = 1.6e-60;
    const PRECISION: Precision = Precision::Extended;

    fn from_f64(x: f64) -> Self {
        XComplex::new(bf(x), bf(0.0))
    }
    fn from_c64(z: Complex64) -> Self {
        XComplex::new(bf(z.re), bf(z.im))
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(bf_to_f64(&self.re), bf_to_f64(&self.im))
    }
    fn i() -> Self {
        XComplex::new(bf(0.0), bf(1.0))
    }
    fn pi() -> Self {
        let pi = CONSTS.with(|c| c.borrow_mut().pi(EXTENDED_BITS, RM));
        XComplex::new(pi, bf(0.0))
    }
    fn conj(&self) -> Self {
        XComplex::new(self.re.clone(), -self.im.clone())
    }
    fn norm(&self) -> f64 {
        self.to_c64().norm()
    }
    fn sin(&self) -> Self {
        // sin(x+iy) = sin x cosh y + i cos x sinh y
        let p = EXTENDED_BITS;
        let (ch, sh) = cosh_sinh(&self.im);
        XComplex::new(bf_sin(&self.re).mul(&ch, p, RM), bf_cos(&self.re).mul(&sh, p, RM))
    }
    fn cos(&self) -> Self {
        // cos(x+iy) = cos x cosh y - i sin x sinh y
        let p = EXTENDED_BITS;
        let (ch, sh) = cosh_sinh(&self.im);
        XComplex::new(bf_cos(&self.re).mul(&ch, p, RM), bf_sin(&self.re).mul(&sh, p, RM).neg())
    }
    fn exp(&self) -> Self {
        let p = EXTENDED_BITS;
        let m = bf_exp(&self.re);
        XComplex::new(m.mul(&bf_cos(&self.im), p, RM), m.mul(&bf_sin(&self.im), p, RM))
    }
}

fn cosh_sinh(y: &BigFloat) -> (BigFloat, BigFloat) {
    if y.is_zero() {
        return (bf(1.0), bf(0.0));
    }
    let p = EXTENDED_BITS;
    let e = bf_exp(y);
    let inv = bf(1.0).div(&e, p, RM);
    let half = bf(0.5);
    (e.add(&inv, p, RM).mul(&half, p, RM), e.sub(&inv, p, RM).mul(&half, p, RM))
}

/// Relative comparison helper used by tests and verification code.
pub fn rel_diff(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm()).max(1e-300);
    (a - b).norm() / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extended_trig_matches_double() {
        let x = XComplex::from_f64(0.7) + XComplex::i() * XComplex::from_f64(0.2);
        let z = Complex64::new(0.7, 0.2);
        assert!((x.sin().to_c64() - z.sin()).norm() < 1e-15);
        assert!((x.cos().to_c64() - z.cos()).norm() < 1e-15);
        assert!((x.exp().to_c64() - z.exp()).norm() < 1e-15);
    }

    #[test]
    fn extended_has_more_than_fifty_digits() {
        // sin(pi) vanishes to the working precision.
        let s = XComplex::pi().sin();
        let re = s.re.clone();
        assert!(re.is_zero() || bf_to_f64(&re).abs() < 1e-55);
        let third = XComplex::one() / XComplex::from_f64(3.0);
        let back = third * XComplex::from_f64(3.0) - XComplex::one();
        assert!(bf_to_f64(&back.re).abs() < 1e-58);
    }

    #[test]
    fn powi_negative() {
        let z = Complex64::new(0.5, 0.25);
        assert!((Scalar::powi(&z, -3) - z.powi(-3)).norm() < 1e-13);
    }
}
