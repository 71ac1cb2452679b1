//! Dense row-major matrices over any [`Scalar`], with exact-arithmetic friendly
//! Gaussian elimination and conversions to nalgebra for double-precision work.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<S: Scalar> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn diagonal(d: &[S]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[S]) {
        for (i, x) in v.iter().enumerate() {
            self[(i, j)] = x.clone();
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: &S) -> Self {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.clone() * s.clone()).collect() }
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows.start + i, cols.start + j)].clone())
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for j in 0..self.cols {
                    acc += self[(i, j)].clone() * v[j].clone();
                }
                acc
            })
            .collect()
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::identity(self.rows);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn trace(&self) -> S {
        let mut t = S::zero();
        for i in 0..self.rows.min(self.cols) {
            t += self[(i, i)].clone();
        }
        t
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x.norm().powi(2)).sum::<f64>().sqrt()
    }

    /// AB − BA.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Mat<T> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn to_c64(&self) -> Mat<Complex64> {
        self.map(|x| x.to_c64())
    }

    pub fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].to_c64())
    }

    /// Maximum entrywise distance to `other` divided by max(1, max |other|).
    pub fn rel_dev(&self, other: &Self) -> f64 {
        let scale = other.max_abs().max(1.0);
        (self - other).max_abs() / scale
    }

    /// Rank by Gaussian elimination with complete pivoting; pivots with modulus below
    /// `tol` times the largest entry count as zero.
    pub fn rank_gauss(&self, tol: f64) -> usize {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0;
        }
        self.rank_gauss_below(tol * scale)
    }

    /// Rank by complete pivoting, stopping once every remaining pivot is at most `threshold`.
    pub fn rank_gauss_below(&self, threshold: f64) -> usize {
        let mut a = self.clone();
        let (m, n) = (a.rows, a.cols);
        let mut rank = 0;
        for k in 0..m.min(n) {
            let mut best = (k, k, 0.0);
            for i in k..m {
                for j in k..n {
                    let v = a[(i, j)].norm();
                    if v > best.2 {
                        best = (i, j, v);
                    }
                }
            }
            if best.2 <= threshold {
                break;
            }
            a.swap_rows(k, best.0);
            a.swap_cols(k, best.1);
            let p = a[(k, k)].clone();
            for i in k + 1..m {
                let f = a[(i, k)].clone() / p.clone();
                if f.is_zero() {
                    continue;
                }
                for j in k..n {
                    let t = f.clone() * a[(k, j)].clone();
                    a[(i, j)] -= t;
                }
            }
            rank += 1;
        }
        rank
    }

    /// Solves A x = b by Gaussian elimination with partial pivoting; `None` if singular.
    pub fn solve(&self, b: &[S]) -> Option<Vec<S>> {
        assert!(self.is_square() && b.len() == self.rows);
        let n = self.rows;
        let mut a = self.clone();
        let mut x = b.to_vec();
        for k in 0..n {
            let (p, pv) = (k..n).map(|i| (i, a[(i, k)].norm())).fold((k, -1.0), |acc, t| if t.1 > acc.1 { t } else { acc });
            if pv == 0.0 {
                return None;
            }
            a.swap_rows(k, p);
            x.swap(k, p);
            let piv = a[(k, k)].clone();
            for i in k + 1..n {
                let f = a[(i, k)].clone() / piv.clone();
                if f.is_zero() {
                    continue;
                }
                for j in k..n {
                    let t = f.clone() * a[(k, j)].clone();
                    a[(i, j)] -= t;
                }
                let t = f * x[k].clone();
                x[i] -= t;
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k].clone();
            for j in k + 1..n {
                s -= a[(k, j)].clone() * x[j].clone();
            }
            x[k] = s / a[(k, k)].clone();
        }
        Some(x)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }
}

impl Mat<Complex64> {
    pub fn from_nalgebra(m: &DMatrix<Complex64>) -> Self {
        Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        if self.rows == 0 || self.cols == 0 {
            return vec![];
        }
        let mut s: Vec<f64> = self.to_nalgebra().singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.partial_cmp(a).unwrap());
        s
    }

    /// Numerical rank: singular values above `tol · σ_max`.
    pub fn rank_svd(&self, tol: f64) -> usize {
        let s = self.singular_values();
        match s.first() {
            Some(&smax) if smax > 0.0 => s.iter().filter(|&&x| x > tol * smax).count(),
            _ => 0,
        }
    }

    /// Number of singular values above an absolute threshold.
    pub fn rank_svd_below(&self, threshold: f64) -> usize {
        self.singular_values().iter().filter(|&&x| x > threshold).count()
    }

    /// Orthonormal basis (as columns) of the span of the `k` right singular vectors with the
    /// smallest singular values.
    pub fn smallest_right_singular_vectors(&self, k: usize) -> Mat<Complex64> {
        let n = self.cols;
        if k == 0 {
            return Mat::zeros(n, 0);
        }
        // Pad to a square matrix so that nalgebra returns a full set of right singular vectors.
        let padded = if self.rows < n {
            let mut p = Mat::zeros(n, n);
            for i in 0..self.rows {
                for j in 0..n {
                    p[(i, j)] = self[(i, j)];
                }
            }
            p
        } else {
            self.clone()
        };
        let svd = padded.to_nalgebra().svd(false, true);
        let v_t = svd.v_t.expect("right singular vectors requested");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| svd.singular_values[a].partial_cmp(&svd.singular_values[b]).unwrap().then(a.cmp(&b)));
        let mut out = Mat::zeros(n, k);
        for (c, &idx) in order.iter().take(k).enumerate() {
            for j in 0..n {
                out[(j, c)] = v_t[(idx, j)].conj();
            }
        }
        out
    }

    /// Eigenvalues from the complex Schur form.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        if self.rows == 0 {
            return vec![];
        }
        // Removing the mean diagonal keeps nearly scalar blocks well scaled for the QR iteration.
        let center = self.trace() / Complex64::new(self.rows as f64, 0.0);
        let mut m = self.to_nalgebra();
        for i in 0..self.rows {
            m[(i, i)] -= center;
        }
        let max_iter = 200 * self.rows.max(10);
        if let Some(schur) = nalgebra::linalg::Schur::try_new(m.clone(), f64::EPSILON, max_iter) {
            return schur.unpack().1.diagonal().iter().map(|z| z + center).collect();
        }
        // The shifted QR iteration can stall on nearly scalar blocks; a fixed unitary
        // similarity breaks the symmetry without changing the spectrum.
        let n = self.rows;
        let v = DMatrix::from_fn(n, 1, |i, _| Complex64::new(1.0 + (i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()));
        let v = &v / Complex64::new(v.norm(), 0.0);
        let h = DMatrix::<Complex64>::identity(n, n) - (&v * v.adjoint()) * Complex64::new(2.0, 0.0);
        let rotated = &h * m * &h;
        let (_, t) = rotated.schur().unpack();
        t.diagonal().iter().map(|z| z + center).collect()
    }
}

impl<S: Scalar> Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S: Scalar> IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

impl<S: Scalar> Mul for &Mat<S> {
    type Output = Mat<S>;
    fn mul(self, o: &Mat<S>) -> Mat<S> {
        assert_eq!(self.cols, o.rows, "matrix product shape mismatch");
        let mut out = Mat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let t = a.clone() * o.data[k * o.cols + j].clone();
                    out.data[i * o.cols + j] += t;
                }
            }
        }
        out
    }
}

impl<S: Scalar> Add for &Mat<S> {
    type Output = Mat<S>;
    fn add(self, o: &Mat<S>) -> Mat<S> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.clone() + b.clone()).collect() }
    }
}

impl<S: Scalar> Sub for &Mat<S> {
    type Output = Mat<S>;
    fn sub(self, o: &Mat<S>) -> Mat<S> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.clone() - b.clone()).collect() }
    }
}

/// JSON export: shape plus a flat row-major list of [re, im] pairs.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl<S: Scalar> From<&Mat<S>> for MatrixJson {
    fn from(m: &Mat<S>) -> Self {
        MatrixJson {
            rows: m.rows,
            cols: m.cols,
            data: m.data.iter().map(|x| {
                let z = x.to_c64();
                [z.re, z.im]
            }).collect(),
        }
    }
}

/// Formats a complex number as `re+im i` with 17 significant digits.
pub fn format_complex(z: Complex64) -> String {
    let sign = if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) { '-' } else { '+' };
    format!("{:.16e}{}{:.16e}i", z.re, sign, z.im.abs())
}

/// CSV export: one row per matrix row, entries as `re+im i`.
pub fn to_csv<S: Scalar>(m: &Mat<S>) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| format_complex(m[(i, j)].to_c64())).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn product_and_solve() {
        let a = Mat::from_rows(vec![vec![c(2.0), c(1.0)], vec![c(1.0), c(3.0)]]);
        let x = a.solve(&[c(3.0), c(5.0)]).unwrap();
        assert!((x[0] - c(0.8)).norm() < 1e-14 && (x[1] - c(1.4)).norm() < 1e-14);
        let i = Mat::<Complex64>::identity(2);
        assert_eq!(&a * &i, a);
    }

    #[test]
    fn ranks_agree() {
        let a = Mat::from_rows(vec![
            vec![c(1.0), c(2.0), c(3.0)],
            vec![c(2.0), c(4.0), c(6.0)],
            vec![c(0.0), c(1.0), c(1.0)],
        ]);
        assert_eq!(a.rank_gauss(1e-12), 2);
        assert_eq!(a.rank_svd(1e-12), 2);
    }

    #[test]
    fn csv_format() {
        let m = Mat::from_rows(vec![vec![Complex64::new(1.0, -2.0)]]);
        assert_eq!(to_csv(&m), "1.0000000000000000e0-2.0000000000000000e0i\n");
    }
}
