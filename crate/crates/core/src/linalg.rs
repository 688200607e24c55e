//! Small dense complex matrices.
//!
//! Everything in this crate works with matrices of size at most
//! `d = n(n+3)/2` for single-digit `n`, so the routines here favour clarity
//! over blocking: LU with partial pivoting, cyclic Jacobi for Hermitian
//! spectra, and scaling-and-squaring for the exponential.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Relative pivot threshold below which an LU factorisation is declared singular.
const SINGULAR_PIVOT: f64 = 1e-14;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Sesquilinear product `āᵗ b`, antilinear in the first argument.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Bilinear product `aᵗ b`.
pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn conj_vec(a: &[C64]) -> Vec<C64> {
    a.iter().map(|x| x.conj()).collect()
}

pub fn max_abs_vec(a: &[C64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.norm()))
}

pub fn max_abs_diff_vec(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

pub fn add_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale_vec(a: &[C64], s: C64) -> Vec<C64> {
    a.iter().map(|x| x * s).collect()
}

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![C64::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { real(1.0) } else { C64::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    /// Builds a matrix from row slices. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let r = rows.len();
        let cols = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == cols), "ragged rows");
        CMatrix { rows: r, cols, data: rows.iter().flatten().copied().collect() }
    }

    pub fn from_real_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        Self::from_fn(rows, cols, |i, j| real(f(i, j)))
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { C64::zero() })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.conj()).collect() }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(real(s))
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    pub fn real_part(&self) -> Self {
        self.map(|x| real(x.re))
    }

    pub fn imag_part(&self) -> Self {
        self.map(|x| real(x.im))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        max_abs_vec(&self.data)
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        max_abs_diff_vec(&self.data, &other.data)
    }

    pub fn max_imag(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.im.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |A - Aᵗ|`.
    pub fn symmetry_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut d: f64 = 0.0;
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                d = d.max((self[(i, j)] - self[(j, i)]).norm());
            }
        }
        d
    }

    /// `max |A - A*|`.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut d: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                d = d.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        d
    }

    /// `(A + Aᵗ) / 2`.
    pub fn symmetrized(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)]) * 0.5)
    }

    /// `(A + A*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// Top-left `r × c` sub-block starting at `(i0, j0)`.
    pub fn block(&self, i0: usize, j0: usize, r: usize, c: usize) -> Self {
        Self::from_fn(r, c, |i, j| self[(i0 + i, j0 + j)])
    }

    pub fn set_block(&mut self, i0: usize, j0: usize, b: &CMatrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(i0 + i, j0 + j)] = b[(i, j)];
            }
        }
    }

    /// Assembles `[[a, b], [c, d]]`.
    pub fn from_blocks(a: &CMatrix, b: &CMatrix, c: &CMatrix, d: &CMatrix) -> Self {
        assert_eq!(a.rows, b.rows);
        assert_eq!(c.rows, d.rows);
        assert_eq!(a.cols, c.cols);
        assert_eq!(b.cols, d.cols);
        let mut m = Self::zeros(a.rows + c.rows, a.cols + b.cols);
        m.set_block(0, 0, a);
        m.set_block(0, a.cols, b);
        m.set_block(a.rows, 0, c);
        m.set_block(a.rows, a.cols, d);
        m
    }

    pub fn lu(&self) -> Result<Lu> {
        Lu::new(self)
    }

    pub fn inverse(&self) -> Result<CMatrix> {
        self.lu()?.inverse()
    }

    pub fn det(&self) -> C64 {
        match self.lu() {
            Ok(lu) => lu.det(),
            Err(_) => C64::zero(),
        }
    }

    /// Solves `self · X = rhs`.
    pub fn solve(&self, rhs: &CMatrix) -> Result<CMatrix> {
        self.lu()?.solve(rhs)
    }

    pub fn solve_vec(&self, rhs: &[C64]) -> Result<Vec<C64>> {
        self.lu()?.solve_vec(rhs)
    }

    /// Eigenvalues of the Hermitian part of `self`, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        assert!(self.is_square());
        let n = self.rows;
        let h = self.hermitian_part();
        // Realification [[X, -Y], [Y, X]] is real symmetric with each
        // eigenvalue of X + iY repeated twice.
        let mut a = vec![0.0; 4 * n * n];
        let m = 2 * n;
        for i in 0..n {
            for j in 0..n {
                let x = h[(i, j)];
                a[i * m + j] = x.re;
                a[(i + n) * m + j + n] = x.re;
                a[i * m + j + n] = -x.im;
                a[(i + n) * m + j] = x.im;
            }
        }
        let mut ev = symmetric_eigenvalues(&mut a, m);
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(core::cmp::Ordering::Equal));
        ev.into_iter().step_by(2).collect()
    }

    pub fn min_hermitian_eigenvalue(&self) -> f64 {
        self.hermitian_eigenvalues().first().copied().unwrap_or(f64::NAN)
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        let g = &self.adjoint() * self;
        g.hermitian_eigenvalues().last().copied().unwrap_or(0.0).max(0.0).sqrt()
    }

    /// Matrix exponential by scaling and squaring of a Taylor series.
    pub fn expm(&self) -> CMatrix {
        assert!(self.is_square());
        let norm = self.frobenius_norm();
        let mut squarings = 0u32;
        let mut s = 1.0;
        while norm * s > 0.25 {
            s *= 0.5;
            squarings += 1;
        }
        let a = self.scale_re(s);
        let mut term = CMatrix::identity(self.rows);
        let mut sum = term.clone();
        for k in 1..=18 {
            term = (&term * &a).scale_re(1.0 / k as f64);
            sum = &sum + &term;
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        sum
    }
}

/// Cyclic Jacobi eigenvalues of a real symmetric `m × m` matrix (destroys `a`).
fn symmetric_eigenvalues(a: &mut [f64], m: usize) -> Vec<f64> {
    let scale = a.iter().fold(0.0f64, |s, x| s.max(x.abs())).max(f64::MIN_POSITIVE);
    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..m {
            for j in i + 1..m {
                off += a[i * m + j] * a[i * m + j];
            }
        }
        if off.sqrt() <= 1e-17 * scale {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                let apq = a[p * m + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a[p * m + p];
                let aqq = a[q * m + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = cs * akp - sn * akq;
                    a[k * m + q] = sn * akp + cs * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = cs * apk - sn * aqk;
                    a[q * m + k] = sn * apk + cs * aqk;
                }
            }
        }
    }
    (0..m).map(|i| a[i * m + i]).collect()
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.map(|x| -x)
    }
}

/// LU factorisation `P A = L U` with partial pivoting.
#[derive(Clone, Debug)]
pub struct Lu {
    n: usize,
    lu: Vec<C64>,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    pub fn new(a: &CMatrix) -> Result<Lu> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch { expected: a.rows, found: a.cols });
        }
        let n = a.rows;
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let scale = a.max_abs();
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::SingularMatrix);
        }
        for k in 0..n {
            let (piv, pmax) = (k..n)
                .map(|i| (i, lu[i * n + k].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax <= SINGULAR_PIVOT * scale {
                return Err(Error::SingularMatrix);
            }
            if piv != k {
                for j in 0..n {
                    lu.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
                sign = -sign;
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                for j in k + 1..n {
                    let u = lu[k * n + j];
                    lu[i * n + j] -= f * u;
                }
            }
        }
        Ok(Lu { n, lu, perm, sign })
    }

    pub fn det(&self) -> C64 {
        (0..self.n).fold(real(self.sign), |acc, i| acc * self.lu[i * self.n + i])
    }

    pub fn solve_vec(&self, b: &[C64]) -> Result<Vec<C64>> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: b.len() });
        }
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[i * n + j];
                x[i] = x[i] - l * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[i * n + j];
                x[i] = x[i] - u * x[j];
            }
            x[i] /= self.lu[i * n + i];
        }
        Ok(x)
    }

    pub fn solve(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if rhs.rows != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: rhs.rows });
        }
        let mut out = CMatrix::zeros(self.n, rhs.cols);
        let mut col = vec![C64::zero(); self.n];
        for j in 0..rhs.cols {
            for i in 0..self.n {
                col[i] = rhs[(i, j)];
            }
            let x = self.solve_vec(&col)?;
            for i in 0..self.n {
                out[(i, j)] = x[i];
            }
        }
        Ok(out)
    }

    pub fn inverse(&self) -> Result<CMatrix> {
        self.solve(&CMatrix::identity(self.n))
    }
}

/// `ln |det A|` and `arg det A` for a matrix known to be invertible.
pub fn log_det(a: &CMatrix) -> Result<C64> {
    let lu = a.lu()?;
    let mut acc = C64::zero();
    for i in 0..lu.n {
        acc += lu.lu[i * lu.n + i].ln();
    }
    if lu.sign < 0.0 {
        acc += C64::new(0.0, core::f64::consts::PI);
    }
    Ok(acc)
}
