//! The link representation ρ of TL_N on the span of link states, the weight
//! matrix W and the defect-counting matrices M and M⁻¹.

use std::ops::Range;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::linkspace::{binomial, sector_dim, LinkBasis, LinkState};
use crate::matrix::Mat;
use crate::params::SpectralParams;
use crate::scalar::Scalar;
use crate::tl_algebra::{Connectivity, TLElement};

/// A dense matrix over the canonical link basis, with the defect-sector layout attached.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorMatrix<S: Scalar> {
    n: usize,
    sectors: Vec<usize>,
    offsets: Vec<usize>,
    mat: Mat<S>,
}

impl<S: Scalar> SectorMatrix<S> {
    pub fn new(basis: &LinkBasis, mat: Mat<S>) -> Self {
        assert_eq!(mat.rows(), basis.dim());
        assert_eq!(mat.cols(), basis.dim());
        SectorMatrix { n: basis.n(), sectors: basis.sectors().to_vec(), offsets: basis.offsets().to_vec(), mat }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn mat(&self) -> &Mat<S> {
        &self.mat
    }

    pub fn into_mat(self) -> Mat<S> {
        self.mat
    }

    /// Defect numbers present, increasing.
    pub fn sectors(&self) -> &[usize] {
        &self.sectors
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn sector_range(&self, d: usize) -> Range<usize> {
        match self.sectors.iter().position(|&x| x == d) {
            Some(k) => self.offsets[k]..self.offsets[k + 1],
            None => 0..0,
        }
    }

    /// Index range covering sectors d_lo..=d_hi.
    pub fn sector_span(&self, d_lo: usize, d_hi: usize) -> Range<usize> {
        self.sector_range(d_lo).start..self.sector_range(d_hi).end
    }

    /// The block mapping sector `from` to sector `to`.
    pub fn block(&self, to: usize, from: usize) -> Mat<S> {
        self.mat.submatrix(self.sector_range(to), self.sector_range(from))
    }

    pub fn diagonal_block(&self, d: usize) -> Mat<S> {
        self.block(d, d)
    }

    /// Principal submatrix over sectors d_lo..=d_hi: the action on UpTo_{d_hi}/UpTo_{d_lo−2}.
    pub fn sector_window(&self, d_lo: usize, d_hi: usize) -> Mat<S> {
        let r = self.sector_span(d_lo, d_hi);
        self.mat.submatrix(r.clone(), r)
    }

    /// Largest entry in a block that maps a sector to a sector with more defects.
    pub fn lower_block_norm(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for &dr in &self.sectors {
            for &dc in &self.sectors {
                if dr > dc {
                    worst = worst.max(self.block(dr, dc).max_abs());
                }
            }
        }
        worst
    }

    pub fn with_mat(&self, mat: Mat<S>) -> Self {
        assert_eq!(mat.rows(), self.dim());
        SectorMatrix { n: self.n, sectors: self.sectors.clone(), offsets: self.offsets.clone(), mat }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.with_mat(&self.mat * &other.mat)
    }
}

/// Draws `v` on top of `c` and reads the link state off the bottom; returns it with the
/// number of closed loops. Two defects of `v` joined through `c` disappear.
pub fn apply_connectivity(c: &Connectivity, v: &LinkState) -> Result<(LinkState, usize)> {
    let n = c.n();
    if v.n() != n {
        return invalid(format!("connectivity on {n} sites applied to a state on {} points", v.n()));
    }
    let mut out: Vec<Option<usize>> = vec![None; n];
    let mut done = vec![false; n];
    let mut mid_seen = vec![false; n];
    for b in 0..n {
        if done[b] {
            continue;
        }
        // Walk from bottom point b through c; each arrival at the top crosses into v.
        let mut q = c.partner(b);
        let end = loop {
            if q < n {
                break Some(q);
            }
            let k = q - n;
            mid_seen[k] = true;
            match v.partner(k) {
                None => break None,
                Some(k2) => {
                    mid_seen[k2] = true;
                    q = c.partner(n + k2);
                }
            }
        };
        done[b] = true;
        if let Some(e) = end {
            done[e] = true;
            out[b] = Some(e);
            out[e] = Some(b);
        }
    }
    // Remaining top points lie on paths joining two defects of v or on closed loops.
    let mut loops = 0;
    for k in 0..n {
        if mid_seen[k] {
            continue;
        }
        if v.is_defect(k) {
            // Walk to the other defect and mark the path.
            let mut cur = k;
            loop {
                mid_seen[cur] = true;
                let t = c.partner(n + cur) - n;
                mid_seen[t] = true;
                match v.partner(t) {
                    None => break,
                    Some(t2) => cur = t2,
                }
            }
        }
    }
    for k in 0..n {
        if mid_seen[k] {
            continue;
        }
        loops += 1;
        let mut cur = k;
        loop {
            mid_seen[cur] = true;
            let t = c.partner(n + cur) - n;
            mid_seen[t] = true;
            cur = v.partner(t).expect("closed loops contain no defects");
            if cur == k {
                break;
            }
        }
    }
    Ok((LinkState::from_partner_unchecked(out), loops))
}

/// ρ(c) for a single connectivity.
pub fn rho_connectivity<S: Scalar>(c: &Connectivity, basis: &LinkBasis, beta: &S) -> Mat<S> {
    let mut m = Mat::zeros(basis.dim(), basis.dim());
    for (j, v) in basis.states().iter().enumerate() {
        let (w, loops) = apply_connectivity(c, v).expect("sizes agree");
        let i = basis.index_of(&w).expect("result is a link state");
        m[(i, j)] += beta.powi(loops as i32);
    }
    m
}

/// ρ(x) as a sector matrix.
pub fn rho<S: Scalar>(x: &TLElement<S>, basis: &LinkBasis, params: &SpectralParams) -> Result<SectorMatrix<S>> {
    if x.n() != basis.n() {
        return invalid(format!("element of TL_{} in a representation on {} points", x.n(), basis.n()));
    }
    let beta = params.beta::<S>();
    let dim = basis.dim();
    let terms: Vec<_> = x.terms().iter().collect();
    let cols: Vec<Vec<(usize, S)>> = (0..dim)
        .into_par_iter()
        .map(|j| {
            let v = basis.state(j);
            let mut col: Vec<(usize, S)> = Vec::new();
            for (c, coeff) in &terms {
                let (w, loops) = apply_connectivity(c, v).expect("sizes agree");
                let i = basis.index_of(&w).expect("result is a link state");
                col.push((i, (*coeff).clone() * beta.powi(loops as i32)));
            }
            col
        })
        .collect();
    let mut m = Mat::zeros(dim, dim);
    for (j, col) in cols.into_iter().enumerate() {
        for (i, x) in col {
            m[(i, j)] += x;
        }
    }
    Ok(SectorMatrix::new(basis, m))
}

/// Applies ρ(c) to a vector of coefficients over `basis`.
pub fn apply_to_vector<S: Scalar>(c: &Connectivity, vec: &[S], basis: &LinkBasis, beta: &S) -> Vec<S> {
    let mut out = vec![S::zero(); basis.dim()];
    for (j, x) in vec.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let (w, loops) = apply_connectivity(c, basis.state(j)).expect("sizes agree");
        let i = basis.index_of(&w).expect("result is a link state");
        out[i] += x.clone() * beta.powi(loops as i32);
    }
    out
}

/// W: sin((d+1)λ)/sin λ on sector d.
pub fn weight_matrix<S: Scalar>(basis: &LinkBasis, params: &SpectralParams) -> Result<SectorMatrix<S>> {
    let lambda = params.lambda::<S>();
    let s1 = lambda.sin();
    if s1.norm() < 1e3 * S::EPSILON {
        return Err(Error::SingularParameter("sin λ = 0: the weight matrix is undefined".into()));
    }
    let diag: Vec<S> = basis
        .states()
        .iter()
        .map(|v| (S::from_i64(v.defects() as i64 + 1) * lambda.clone()).sin() / s1.clone())
        .collect();
    Ok(SectorMatrix::new(basis, Mat::diagonal(&diag)))
}

/// Weight of sector d: sin((d+1)λ)/sin λ.
pub fn sector_weight<S: Scalar>(d: usize, params: &SpectralParams) -> S {
    let lambda = params.lambda::<S>();
    (S::from_i64(d as i64 + 1) * lambda.clone()).sin() / lambda.sin()
}

fn check_even(n: usize) -> Result<()> {
    if n % 2 != 0 {
        return invalid(format!("the defect-counting matrices need N even, got {n}"));
    }
    Ok(())
}

/// M_{dd'} = β^{−d'} dim V_{d'}^{d} for d' ≥ d, indexed by even d, d' ∈ 0..=N.
pub fn matrix_m<S: Scalar>(n: usize, params: &SpectralParams) -> Result<Mat<S>> {
    check_even(n)?;
    let beta = params.beta::<S>();
    if beta.norm() < 1e3 * S::EPSILON {
        return Err(Error::SingularParameter("β = 0: M has β in denominators".into()));
    }
    let k = n / 2 + 1;
    Ok(Mat::from_fn(k, k, |i, j| {
        let (d, dp) = (2 * i, 2 * j);
        if dp < d {
            S::zero()
        } else {
            S::from_i64(sector_dim(dp, d) as i64) * beta.powi(-(dp as i32))
        }
    }))
}

/// (M⁻¹)_{dd'} = (−1)^{(d+d')/2} β^d C((d+d')/2, d).
pub fn matrix_m_inverse<S: Scalar>(n: usize, params: &SpectralParams) -> Result<Mat<S>> {
    check_even(n)?;
    let beta = params.beta::<S>();
    let k = n / 2 + 1;
    Ok(Mat::from_fn(k, k, |i, j| {
        let (d, dp) = (2 * i, 2 * j);
        if dp < d {
            S::zero()
        } else {
            let h = (d + dp) / 2;
            let sign = if h % 2 == 0 { S::one() } else { -S::one() };
            sign * beta.powi(d as i32) * S::from_i64(binomial(h, d) as i64)
        }
    }))
}

/// Trace of the diagonal block of `m` on sector d.
pub fn sector_trace<S: Scalar>(m: &SectorMatrix<S>, d: usize) -> S {
    let mut t = S::zero();
    for i in m.sector_range(d) {
        t += m.mat()[(i, i)].clone();
    }
    t
}

/// Gram matrix G_{vw} = ⟨v|w⟩_G over the basis.
pub fn gram_matrix<S: Scalar>(basis: &LinkBasis, params: &SpectralParams) -> Mat<S> {
    let states = basis.states();
    Mat::from_fn(basis.dim(), basis.dim(), |i, j| crate::tl_algebra::gram(&states[i], &states[j], params).expect("same size"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linkspace::parse_link_notation;
    use num_complex::Complex64;

    #[test]
    fn rho_e1_n2() {
        let p = SpectralParams::real(0.9, 0.3);
        let b = LinkBasis::new(2).unwrap();
        let m = rho(&TLElement::<Complex64>::generator(1, 2).unwrap(), &b, &p).unwrap();
        let beta = p.beta_c64();
        let expect = Mat::from_rows(vec![
            vec![beta, Complex64::new(1.0, 0.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
        ]);
        assert!(m.mat().rel_dev(&expect) < 1e-14);
    }

    #[test]
    fn identity_and_bubble() {
        let v = parse_link_notation("1", 4).unwrap();
        let id = Connectivity::identity(4);
        assert_eq!(apply_connectivity(&id, &v).unwrap(), (v.clone(), 0));
        let e1 = Connectivity::generator(1, 4).unwrap();
        assert_eq!(apply_connectivity(&e1, &v).unwrap(), (v, 1));
    }

    #[test]
    fn weight_low_sectors() {
        let p = SpectralParams::real(0.6, 0.1);
        assert!((sector_weight::<Complex64>(0, &p) - 1.0).norm() < 1e-14);
        assert!((sector_weight::<Complex64>(1, &p) - p.beta_c64()).norm() < 1e-14);
        assert!(weight_matrix::<Complex64>(&LinkBasis::new(2).unwrap(), &SpectralParams::real(0.0, 0.1)).is_err());
    }

    #[test]
    fn m_times_inverse() {
        let p = SpectralParams::rational(1, 5, 0.1);
        for n in [2, 4, 8, 12] {
            let m = matrix_m::<Complex64>(n, &p).unwrap();
            let mi = matrix_m_inverse::<Complex64>(n, &p).unwrap();
            assert!((&m * &mi).rel_dev(&Mat::identity(n / 2 + 1)) < 1e-12);
        }
        assert!(matrix_m::<Complex64>(3, &p).is_err());
        assert!(matrix_m::<Complex64>(4, &SpectralParams::rational(1, 2, 0.1)).is_err());
    }
}
