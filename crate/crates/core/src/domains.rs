//! Points of the four domains and the coordinates used on them.
//!
//! ```text
//! X_n    = { V = S + iR : Vᵗ = V, R > 0 }            Siegel upper half-plane
//! D_n    = { W : Wᵗ = W, N = 1 - W W̄ > 0 }           Siegel ball
//! X^J_n  = Cⁿ × X_n,   points (V, u)
//! D^J_n  = Cⁿ × D_n,   points (z, W)
//! ```
//!
//! Symmetric matrices are coordinatised by their entries `w_pq`, `p ≤ q`, in
//! lexicographic order. Moving the coordinate `w_pq` moves both `W[p][q]` and
//! `W[q][p]`. On `D^J_n` the `z` coordinates come first, so a point is a
//! vector of length `d = n + n(n+1)/2`.
//!
//! Indices are 0-based throughout the API, except in [`delta_symbol`] which
//! mirrors the 1-based textbook symbol.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::groups;
use crate::linalg::{c, CMatrix, C64};

/// Default tolerance for symmetry and positivity checks.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Sampled balls are rejected unless `λ_min(1 - W W̄)` exceeds this.
pub const SAMPLE_MARGIN: f64 = 1e-3;

pub const MAX_REJECTIONS: usize = 1000;

/// Lexicographic enumeration of the pairs `(p, q)`, `p ≤ q < n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairIndex {
    n: usize,
    pairs: Vec<(usize, usize)>,
}

impl PairIndex {
    pub fn new(n: usize) -> Self {
        let mut pairs = Vec::with_capacity(n * (n + 1) / 2);
        for p in 0..n {
            for q in p..n {
                pairs.push((p, q));
            }
        }
        PairIndex { n, pairs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of pairs, `m = n(n+1)/2`.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Full complex dimension of `D^J_n`, `d = n(n+3)/2`.
    pub fn jacobi_dim(&self) -> usize {
        self.n + self.pairs.len()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn unflatten(&self, i: usize) -> (usize, usize) {
        self.pairs[i]
    }

    /// Position of `(p, q)`; the order of the two indices is irrelevant.
    pub fn flatten(&self, p: usize, q: usize) -> usize {
        let (p, q) = if p <= q { (p, q) } else { (q, p) };
        debug_assert!(q < self.n);
        // rows 0..p contribute n + (n-1) + ... + (n-p+1) pairs
        p * self.n - p * p.saturating_sub(1) / 2 + (q - p)
    }

    /// Upper-triangle entries of a symmetric matrix, in pair order.
    pub fn matrix_to_coords(&self, w: &CMatrix) -> Vec<C64> {
        self.pairs.iter().map(|&(p, q)| w[(p, q)]).collect()
    }

    /// Symmetric matrix with the given pair coordinates.
    pub fn coords_to_matrix(&self, coords: &[C64]) -> CMatrix {
        let mut w = CMatrix::zeros(self.n, self.n);
        for (&(p, q), &v) in self.pairs.iter().zip(coords) {
            w[(p, q)] = v;
            w[(q, p)] = v;
        }
        w
    }
}

/// `∂w_ij/∂w_pq` on symmetric matrices, 1-based:
/// `δ_ip δ_jq + δ_iq δ_jp − δ_ij δ_pq δ_ip`.
pub fn delta_symbol(n: usize, i: usize, j: usize, p: usize, q: usize) -> Result<i32> {
    for index in [i, j, p, q] {
        if index == 0 || index > n {
            return Err(Error::IndexOutOfRange { index, n });
        }
    }
    let d = |a: usize, b: usize| i32::from(a == b);
    Ok(d(i, p) * d(j, q) + d(i, q) * d(j, p) - d(i, j) * d(p, q) * d(i, p))
}

/// Result of [`validate_ball_point`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallDiagnostics {
    pub symmetry_defect: f64,
    pub min_eigenvalue: f64,
}

/// Checks `W = Wᵗ` and `1 - W W̄ > 0`, both to `tol`.
pub fn validate_ball_point(w: &CMatrix, tol: f64) -> Result<BallDiagnostics> {
    if !w.is_square() {
        return Err(Error::DimensionMismatch { expected: w.rows(), found: w.cols() });
    }
    let symmetry_defect = w.symmetry_defect();
    if symmetry_defect > tol {
        return Err(Error::NonSymmetric { defect: symmetry_defect });
    }
    let min_eigenvalue = n_matrix(w).min_hermitian_eigenvalue();
    if !(min_eigenvalue > tol) {
        return Err(Error::NotInBall { min_eigenvalue });
    }
    Ok(BallDiagnostics { symmetry_defect, min_eigenvalue })
}

/// `N = 1 - W W̄`.
pub fn n_matrix(w: &CMatrix) -> CMatrix {
    &CMatrix::identity(w.rows()) - &(w * &w.conj())
}

/// A point of the Siegel ball `D_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SiegelBallPoint {
    w: CMatrix,
}

impl SiegelBallPoint {
    pub fn new(w: CMatrix) -> Result<Self> {
        Self::with_tol(w, DEFAULT_TOL)
    }

    /// Validates with a custom tolerance and stores the symmetrised matrix.
    pub fn with_tol(w: CMatrix, tol: f64) -> Result<Self> {
        validate_ball_point(&w, tol)?;
        Ok(SiegelBallPoint { w: w.symmetrized() })
    }

    pub fn origin(n: usize) -> Self {
        SiegelBallPoint { w: CMatrix::zeros(n, n) }
    }

    pub fn n(&self) -> usize {
        self.w.rows()
    }

    pub fn w(&self) -> &CMatrix {
        &self.w
    }

    pub fn n_matrix(&self) -> CMatrix {
        n_matrix(&self.w)
    }

    /// `M = N⁻¹`.
    pub fn m_matrix(&self) -> CMatrix {
        self.n_matrix().inverse().expect("N is positive definite on the ball")
    }

    /// `1 - ‖W‖₂`, the distance to the boundary in operator norm.
    pub fn margin(&self) -> f64 {
        let lmin = self.n_matrix().min_hermitian_eigenvalue().clamp(0.0, 1.0);
        1.0 - (1.0 - lmin).sqrt()
    }

    pub fn coords(&self) -> Vec<C64> {
        PairIndex::new(self.n()).matrix_to_coords(&self.w)
    }

    pub fn from_coords(n: usize, coords: &[C64]) -> Result<Self> {
        let idx = PairIndex::new(n);
        if coords.len() != idx.len() {
            return Err(Error::DimensionMismatch { expected: idx.len(), found: coords.len() });
        }
        Self::new(idx.coords_to_matrix(coords))
    }
}

/// A point `(z, W)` of the Siegel–Jacobi ball.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiBallPoint {
    z: Vec<C64>,
    w: SiegelBallPoint,
}

impl JacobiBallPoint {
    pub fn new(z: Vec<C64>, w: SiegelBallPoint) -> Result<Self> {
        if z.len() != w.n() {
            return Err(Error::DimensionMismatch { expected: w.n(), found: z.len() });
        }
        Ok(JacobiBallPoint { z, w })
    }

    pub fn from_parts(z: Vec<C64>, w: CMatrix) -> Result<Self> {
        Self::new(z, SiegelBallPoint::new(w)?)
    }

    pub fn origin(n: usize) -> Self {
        JacobiBallPoint { z: alloc::vec![C64::zero(); n], w: SiegelBallPoint::origin(n) }
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    pub fn z(&self) -> &[C64] {
        &self.z
    }

    pub fn ball(&self) -> &SiegelBallPoint {
        &self.w
    }

    pub fn w(&self) -> &CMatrix {
        self.w.w()
    }

    pub fn margin(&self) -> f64 {
        self.w.margin()
    }

    /// `(z_1, …, z_n, w_11, w_12, …, w_nn)`.
    pub fn coords(&self) -> Vec<C64> {
        let mut v = self.z.clone();
        v.extend(self.w.coords());
        v
    }

    pub fn from_coords(n: usize, coords: &[C64]) -> Result<Self> {
        let d = PairIndex::new(n).jacobi_dim();
        if coords.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: coords.len() });
        }
        Self::new(coords[..n].to_vec(), SiegelBallPoint::from_coords(n, &coords[n..])?)
    }
}

/// A point of `X_n` (with `u = 0`) or of `X^J_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SiegelUpperPoint {
    v: CMatrix,
    u: Vec<C64>,
}

impl SiegelUpperPoint {
    pub fn new(v: CMatrix, u: Vec<C64>) -> Result<Self> {
        Self::with_tol(v, u, DEFAULT_TOL)
    }

    pub fn with_tol(v: CMatrix, u: Vec<C64>, tol: f64) -> Result<Self> {
        if !v.is_square() {
            return Err(Error::DimensionMismatch { expected: v.rows(), found: v.cols() });
        }
        if u.len() != v.rows() {
            return Err(Error::DimensionMismatch { expected: v.rows(), found: u.len() });
        }
        let defect = v.symmetry_defect();
        if defect > tol * (1.0 + v.max_abs()) {
            return Err(Error::NonSymmetric { defect });
        }
        let v = v.symmetrized();
        let min_eigenvalue = v.imag_part().min_hermitian_eigenvalue();
        if !(min_eigenvalue > tol) {
            return Err(Error::NotInUpperHalfPlane { min_eigenvalue });
        }
        Ok(SiegelUpperPoint { v, u })
    }

    /// `V = i·1_n`, `u = 0`.
    pub fn base_point(n: usize) -> Self {
        SiegelUpperPoint { v: CMatrix::identity(n).scale(c(0.0, 1.0)), u: alloc::vec![C64::zero(); n] }
    }

    pub fn n(&self) -> usize {
        self.v.rows()
    }

    pub fn v(&self) -> &CMatrix {
        &self.v
    }

    pub fn u(&self) -> &[C64] {
        &self.u
    }

    /// `S = Re V`.
    pub fn s(&self) -> CMatrix {
        self.v.real_part()
    }

    /// `R = Im V`.
    pub fn r(&self) -> CMatrix {
        self.v.imag_part()
    }

    /// `λ_min(Im V)`; perturbations of `V` smaller than this stay inside `X_n`.
    pub fn margin(&self) -> f64 {
        self.r().min_hermitian_eigenvalue()
    }

    /// Pair coordinates of `V`.
    pub fn v_coords(&self) -> Vec<C64> {
        PairIndex::new(self.n()).matrix_to_coords(&self.v)
    }

    /// `(u, v_11, v_12, …)`, ordered like [`JacobiBallPoint::coords`].
    pub fn coords(&self) -> Vec<C64> {
        let mut x = self.u.clone();
        x.extend(self.v_coords());
        x
    }

    pub fn from_v_coords(n: usize, coords: &[C64]) -> Result<Self> {
        let idx = PairIndex::new(n);
        if coords.len() != idx.len() {
            return Err(Error::DimensionMismatch { expected: idx.len(), found: coords.len() });
        }
        Self::new(idx.coords_to_matrix(coords), alloc::vec![C64::zero(); n])
    }

    pub fn from_coords(n: usize, coords: &[C64]) -> Result<Self> {
        let d = PairIndex::new(n).jacobi_dim();
        if coords.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: coords.len() });
        }
        let idx = PairIndex::new(n);
        Self::new(idx.coords_to_matrix(&coords[n..]), coords[..n].to_vec())
    }
}

/// Tangent vector: `(dz, dW)` on the balls, `(du, dV)` on the upper half-planes.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    pub dz: Vec<C64>,
    pub dw: CMatrix,
}

impl TangentVector {
    pub fn new(dz: Vec<C64>, dw: CMatrix) -> Result<Self> {
        if !dw.is_square() || dw.rows() != dz.len() {
            return Err(Error::DimensionMismatch { expected: dz.len(), found: dw.rows() });
        }
        let defect = dw.symmetry_defect();
        if defect > DEFAULT_TOL * (1.0 + dw.max_abs()) {
            return Err(Error::NonSymmetric { defect });
        }
        Ok(TangentVector { dz, dw: dw.symmetrized() })
    }

    pub fn zero(n: usize) -> Self {
        TangentVector { dz: alloc::vec![C64::zero(); n], dw: CMatrix::zeros(n, n) }
    }

    pub fn n(&self) -> usize {
        self.dz.len()
    }

    /// Flattened in [`JacobiBallPoint::coords`] order.
    pub fn flatten(&self) -> Vec<C64> {
        let mut v = self.dz.clone();
        v.extend(PairIndex::new(self.n()).matrix_to_coords(&self.dw));
        v
    }

    pub fn from_flat(n: usize, v: &[C64]) -> Result<Self> {
        let idx = PairIndex::new(n);
        if v.len() != idx.jacobi_dim() {
            return Err(Error::DimensionMismatch { expected: idx.jacobi_dim(), found: v.len() });
        }
        Ok(TangentVector { dz: v[..n].to_vec(), dw: idx.coords_to_matrix(&v[n..]) })
    }
}

/// The four domains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    Ball,
    JacobiBall,
    Upper,
    JacobiUpper,
}

impl Domain {
    pub fn name(self) -> &'static str {
        match self {
            Domain::Ball => "ball",
            Domain::JacobiBall => "jacobi_ball",
            Domain::Upper => "upper",
            Domain::JacobiUpper => "jacobi_upper",
        }
    }

    pub fn parse(s: &str) -> Option<Domain> {
        match s {
            "ball" => Some(Domain::Ball),
            "jacobi_ball" | "jacobi-ball" => Some(Domain::JacobiBall),
            "upper" => Some(Domain::Upper),
            "jacobi_upper" | "jacobi-upper" => Some(Domain::JacobiUpper),
            _ => None,
        }
    }
}

/// A point of any of the four domains.
#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    Ball(SiegelBallPoint),
    JacobiBall(JacobiBallPoint),
    Upper(SiegelUpperPoint),
    JacobiUpper(SiegelUpperPoint),
}

impl Point {
    pub fn domain(&self) -> Domain {
        match self {
            Point::Ball(_) => Domain::Ball,
            Point::JacobiBall(_) => Domain::JacobiBall,
            Point::Upper(_) => Domain::Upper,
            Point::JacobiUpper(_) => Domain::JacobiUpper,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Point::Ball(p) => p.n(),
            Point::JacobiBall(p) => p.n(),
            Point::Upper(p) | Point::JacobiUpper(p) => p.n(),
        }
    }

    /// Coordinates: pair coordinates of `W` or `V`, preceded by `z` or `u` on
    /// the Jacobi domains.
    pub fn coords(&self) -> Vec<C64> {
        match self {
            Point::Ball(p) => p.coords(),
            Point::JacobiBall(p) => p.coords(),
            Point::Upper(p) => p.v_coords(),
            Point::JacobiUpper(p) => p.coords(),
        }
    }

    pub fn from_coords(domain: Domain, n: usize, coords: &[C64]) -> Result<Point> {
        Ok(match domain {
            Domain::Ball => Point::Ball(SiegelBallPoint::from_coords(n, coords)?),
            Domain::JacobiBall => Point::JacobiBall(JacobiBallPoint::from_coords(n, coords)?),
            Domain::Upper => Point::Upper(SiegelUpperPoint::from_v_coords(n, coords)?),
            Domain::JacobiUpper => Point::JacobiUpper(SiegelUpperPoint::from_coords(n, coords)?),
        })
    }

    /// How far each matrix coordinate may move before leaving the domain.
    pub fn margin(&self) -> f64 {
        match self {
            Point::Ball(p) => p.margin(),
            Point::JacobiBall(p) => p.margin(),
            Point::Upper(p) | Point::JacobiUpper(p) => p.margin(),
        }
    }
}

/// Standard complex Gaussian: real and imaginary parts `N(0, 1/2)`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c(re * s, im * s)
}

pub fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    (0..n).map(|_| complex_gaussian(rng)).collect()
}

/// `W = radius · (A+Aᵗ) / (2‖A+Aᵗ‖₂)` with Gaussian `A`, rejected until
/// `λ_min(1 - W W̄) > 10⁻³`.
pub fn sample_ball<R: Rng + ?Sized>(n: usize, rng: &mut R, radius: f64) -> Result<SiegelBallPoint> {
    check_sampler_args(n, radius)?;
    if radius == 0.0 {
        return Ok(SiegelBallPoint::origin(n));
    }
    for _ in 0..MAX_REJECTIONS {
        let a = CMatrix::from_fn(n, n, |_, _| complex_gaussian(rng));
        let s = &a + &a.transpose();
        let norm = s.spectral_norm();
        if norm == 0.0 {
            continue;
        }
        let w = s.scale_re(radius / (2.0 * norm));
        match validate_ball_point(&w, DEFAULT_TOL) {
            Ok(diag) if diag.min_eigenvalue > SAMPLE_MARGIN => {
                return Ok(SiegelBallPoint { w: w.symmetrized() });
            }
            _ => continue,
        }
    }
    Err(Error::RejectionLimit { tries: MAX_REJECTIONS })
}

pub fn sample_jacobi_ball<R: Rng + ?Sized>(n: usize, rng: &mut R, radius: f64) -> Result<JacobiBallPoint> {
    let w = sample_ball(n, rng, radius)?;
    let z = gaussian_vector(n, rng);
    JacobiBallPoint::new(z, w)
}

/// Upper half-plane sample: the inverse partial Cayley image of a ball sample.
pub fn sample_jacobi_upper<R: Rng + ?Sized>(n: usize, rng: &mut R, radius: f64) -> Result<SiegelUpperPoint> {
    let pt = sample_jacobi_ball(n, rng, radius)?;
    groups::inverse_partial_cayley(&pt)
}

pub fn sample_upper<R: Rng + ?Sized>(n: usize, rng: &mut R, radius: f64) -> Result<SiegelUpperPoint> {
    let w = sample_ball(n, rng, radius)?;
    let pt = JacobiBallPoint::new(alloc::vec![C64::zero(); n], w)?;
    groups::inverse_partial_cayley(&pt)
}

pub fn sample_point<R: Rng + ?Sized>(domain: Domain, n: usize, rng: &mut R, radius: f64) -> Result<Point> {
    Ok(match domain {
        Domain::Ball => Point::Ball(sample_ball(n, rng, radius)?),
        Domain::JacobiBall => Point::JacobiBall(sample_jacobi_ball(n, rng, radius)?),
        Domain::Upper => Point::Upper(sample_upper(n, rng, radius)?),
        Domain::JacobiUpper => Point::JacobiUpper(sample_jacobi_upper(n, rng, radius)?),
    })
}

fn check_sampler_args(n: usize, radius: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParams("n must be at least 1".into()));
    }
    if !(0.0..1.0).contains(&radius) {
        return Err(Error::InvalidParams(alloc::format!("radius must lie in [0, 1), got {radius}")));
    }
    Ok(())
}
