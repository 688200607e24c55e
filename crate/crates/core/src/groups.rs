//! Jacobi groups, their actions, and the Cayley correspondences.
//!
//! Complex form, acting on `D^J_n`:
//!
//! ```text
//! g = (p, q),   p p* − q q* = 1,   p qᵗ = q pᵗ
//! (g₁,α₁,t₁)(g₂,α₂,t₂) = (g₁g₂, g₂⁻¹×α₁ + α₂, t₁ + t₂ + Im(ᾱ₂ᵗ (g₂⁻¹×α₁)))
//! g⁻¹×α = p*α − qᵗᾱ
//! W₁ = (pW + q)(q̄W + p̄)⁻¹
//! z₁ = (W q* + p*)⁻¹ (z + α − W ᾱ)
//! ```
//!
//! Real form, acting on `X^J_n`, with `X = (λ, μ) = (n, m)` a row vector:
//!
//! ```text
//! g = [[a, b], [c, d]],   gᵗ J g = J
//! (g, X, k)(g′, X′, k′) = (g g′, X g′ + X′, k + k′ + X g′ J X′ᵗ)
//! V₁ = (aV + b)(cV + d)⁻¹
//! u₁ = (V cᵗ + dᵗ)⁻¹ (u + V n + m)
//! ```
//!
//! The partial Cayley transform `Φ(V, u) = ((V − i)(V + i)⁻¹, 2i(V + i)⁻¹u)`
//! intertwines the two actions through `Θ(g, X, k) = (C⁻¹gC, m + i n, k)`.
//! The central coordinates are composed but never used by the actions.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::domains::{self, JacobiBallPoint, SiegelBallPoint, SiegelUpperPoint, TangentVector};
use crate::error::{Error, Result};
use crate::linalg::{add_vec, c, conj_vec, dot, real, sub_vec, CMatrix, C64};

/// Absolute tolerance for the defining relations of group elements.
pub const GROUP_TOL: f64 = 1e-10;

/// Post-hoc tolerance on the Cayley image of a real element.
pub const CAYLEY_TOL: f64 = 1e-8;

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn check_square(m: &CMatrix, n: usize) -> Result<()> {
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: m.rows().max(m.cols()) });
    }
    Ok(())
}

fn check_len(v: &[C64], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: v.len() });
    }
    Ok(())
}

/// Element `(p, q)` of `Sp(n, R)_C`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticC {
    p: CMatrix,
    q: CMatrix,
}

impl SymplecticC {
    pub fn new(p: CMatrix, q: CMatrix) -> Result<Self> {
        Self::with_tol(p, q, GROUP_TOL)
    }

    pub fn with_tol(p: CMatrix, q: CMatrix, tol: f64) -> Result<Self> {
        let n = p.rows();
        check_square(&p, n)?;
        check_square(&q, n)?;
        let g = SymplecticC { p, q };
        let defect = g.defect();
        if !(defect <= tol) {
            return Err(Error::InvalidGroupElement { defect });
        }
        Ok(g)
    }

    pub fn identity(n: usize) -> Self {
        SymplecticC { p: CMatrix::identity(n), q: CMatrix::zeros(n, n) }
    }

    pub fn n(&self) -> usize {
        self.p.rows()
    }

    pub fn p(&self) -> &CMatrix {
        &self.p
    }

    pub fn q(&self) -> &CMatrix {
        &self.q
    }

    /// Largest violation of `pp* − qq* = 1`, `pqᵗ = qpᵗ`, `p*p − qᵗq̄ = 1`, `pᵗq̄ = q*p`.
    pub fn defect(&self) -> f64 {
        let (p, q) = (&self.p, &self.q);
        let one = CMatrix::identity(self.n());
        let r1 = &(p * &p.adjoint()) - &(q * &q.adjoint());
        let r2 = &(p * &q.transpose()) - &(q * &p.transpose());
        let r3 = &(&p.adjoint() * p) - &(&q.transpose() * &q.conj());
        let r4 = &(&p.transpose() * &q.conj()) - &(&q.adjoint() * p);
        r1.max_abs_diff(&one).max(r2.max_abs()).max(r3.max_abs_diff(&one)).max(r4.max_abs())
    }

    /// `(p₁p₂ + q₁q̄₂, p₁q₂ + q₁p̄₂)`.
    pub fn compose(&self, other: &SymplecticC) -> Result<SymplecticC> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: other.n() });
        }
        let p = &(&self.p * &other.p) + &(&self.q * &other.q.conj());
        let q = &(&self.p * &other.q) + &(&self.q * &other.p.conj());
        Ok(SymplecticC { p, q })
    }

    /// `(p*, −qᵗ)`.
    pub fn inverse(&self) -> SymplecticC {
        SymplecticC { p: self.p.adjoint(), q: -&self.q.transpose() }
    }

    /// `g × α = pα + qᾱ`.
    pub fn act_vector(&self, alpha: &[C64]) -> Vec<C64> {
        add_vec(&self.p.mul_vec(alpha), &self.q.mul_vec(&conj_vec(alpha)))
    }

    /// `g⁻¹ × α = p*α − qᵗᾱ`.
    pub fn inverse_act_vector(&self, alpha: &[C64]) -> Vec<C64> {
        sub_vec(&self.p.adjoint().mul_vec(alpha), &self.q.transpose().mul_vec(&conj_vec(alpha)))
    }

    /// `W ↦ (pW + q)(q̄W + p̄)⁻¹` on `D_n`.
    pub fn act_ball(&self, w: &SiegelBallPoint) -> Result<SiegelBallPoint> {
        let den = &(&self.q.conj() * w.w()) + &self.p.conj();
        let num = &(&self.p * w.w()) + &self.q;
        // X D⁻¹ = (D⁻ᵗ Xᵗ)ᵗ
        let w1 = den.transpose().solve(&num.transpose()).map_err(|_| Error::SingularDenominator)?.transpose();
        SiegelBallPoint::new(w1.symmetrized())
    }
}

/// Element `[[a, b], [c, d]]` of `Sp(n, R)`, stored with real entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticR {
    a: CMatrix,
    b: CMatrix,
    c: CMatrix,
    d: CMatrix,
}

impl SymplecticR {
    pub fn new(a: CMatrix, b: CMatrix, c: CMatrix, d: CMatrix) -> Result<Self> {
        let n = a.rows();
        for m in [&a, &b, &c, &d] {
            check_square(m, n)?;
            if m.max_imag() != 0.0 {
                return Err(Error::InvalidInput("real symplectic blocks must be real".into()));
            }
        }
        let g = SymplecticR { a, b, c, d };
        let defect = g.defect();
        if !(defect <= GROUP_TOL) {
            return Err(Error::InvalidGroupElement { defect });
        }
        Ok(g)
    }

    /// Splits a real `2n × 2n` matrix into blocks.
    pub fn from_matrix(g: &CMatrix) -> Result<Self> {
        if !g.is_square() || g.rows() % 2 != 0 {
            return Err(Error::DimensionMismatch { expected: 2 * (g.rows() / 2), found: g.rows() });
        }
        let n = g.rows() / 2;
        Self::new(g.block(0, 0, n, n), g.block(0, n, n, n), g.block(n, 0, n, n), g.block(n, n, n, n))
    }

    pub fn identity(n: usize) -> Self {
        SymplecticR {
            a: CMatrix::identity(n),
            b: CMatrix::zeros(n, n),
            c: CMatrix::zeros(n, n),
            d: CMatrix::identity(n),
        }
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    pub fn b(&self) -> &CMatrix {
        &self.b
    }

    pub fn c(&self) -> &CMatrix {
        &self.c
    }

    pub fn d(&self) -> &CMatrix {
        &self.d
    }

    pub fn to_matrix(&self) -> CMatrix {
        CMatrix::from_blocks(&self.a, &self.b, &self.c, &self.d)
    }

    /// `max |gᵗ J g − J|`.
    pub fn defect(&self) -> f64 {
        let g = self.to_matrix();
        let j = j_matrix(self.n());
        (&(&g.transpose() * &j) * &g).max_abs_diff(&j)
    }

    pub fn compose(&self, other: &SymplecticR) -> Result<SymplecticR> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: other.n() });
        }
        let n = self.n();
        let g = &self.to_matrix() * &other.to_matrix();
        Ok(SymplecticR {
            a: g.block(0, 0, n, n),
            b: g.block(0, n, n, n),
            c: g.block(n, 0, n, n),
            d: g.block(n, n, n, n),
        })
    }

    /// `g⁻¹ = −J gᵗ J = [[dᵗ, −bᵗ], [−cᵗ, aᵗ]]`.
    pub fn inverse(&self) -> SymplecticR {
        SymplecticR {
            a: self.d.transpose(),
            b: -&self.b.transpose(),
            c: -&self.c.transpose(),
            d: self.a.transpose(),
        }
    }

    /// `V ↦ (aV + b)(cV + d)⁻¹` on `X_n`.
    pub fn act_upper(&self, v: &CMatrix) -> Result<CMatrix> {
        let num = &(&self.a * v) + &self.b;
        let den = &(&self.c * v) + &self.d;
        let v1 = den.transpose().solve(&num.transpose()).map_err(|_| Error::SingularDenominator)?.transpose();
        Ok(v1.symmetrized())
    }
}

/// `J = [[0, 1], [−1, 0]]`.
pub fn j_matrix(n: usize) -> CMatrix {
    let one = CMatrix::identity(n);
    let zero = CMatrix::zeros(n, n);
    CMatrix::from_blocks(&zero, &one, &-&one, &zero)
}

/// Element `(g, α, t)` of the complex Jacobi group.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiElementC {
    pub g: SymplecticC,
    pub alpha: Vec<C64>,
    pub t: f64,
}

impl JacobiElementC {
    pub fn new(g: SymplecticC, alpha: Vec<C64>, t: f64) -> Result<Self> {
        check_len(&alpha, g.n())?;
        Ok(JacobiElementC { g, alpha, t })
    }

    pub fn identity(n: usize) -> Self {
        JacobiElementC { g: SymplecticC::identity(n), alpha: alloc::vec![C64::zero(); n], t: 0.0 }
    }

    pub fn n(&self) -> usize {
        self.g.n()
    }

    pub fn inverse(&self) -> JacobiElementC {
        let alpha = self.g.act_vector(&self.alpha).iter().map(|x| -x).collect();
        JacobiElementC { g: self.g.inverse(), alpha, t: -self.t }
    }
}

/// Element `(g, X, k)` of the real Jacobi group, `X = (λ, μ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiElementR {
    pub g: SymplecticR,
    pub lambda_mu: Vec<f64>,
    pub k_center: f64,
}

impl JacobiElementR {
    pub fn new(g: SymplecticR, lambda_mu: Vec<f64>, k_center: f64) -> Result<Self> {
        if lambda_mu.len() != 2 * g.n() {
            return Err(Error::DimensionMismatch { expected: 2 * g.n(), found: lambda_mu.len() });
        }
        Ok(JacobiElementR { g, lambda_mu, k_center })
    }

    pub fn identity(n: usize) -> Self {
        JacobiElementR { g: SymplecticR::identity(n), lambda_mu: alloc::vec![0.0; 2 * n], k_center: 0.0 }
    }

    pub fn n(&self) -> usize {
        self.g.n()
    }

    /// The translation part `λ`, written `n` in the action formulas.
    pub fn lambda(&self) -> &[f64] {
        &self.lambda_mu[..self.n()]
    }

    /// The translation part `μ`, written `m` in the action formulas.
    pub fn mu(&self) -> &[f64] {
        &self.lambda_mu[self.n()..]
    }

    pub fn inverse(&self) -> JacobiElementR {
        let ginv = self.g.inverse();
        let x = row_times(&self.lambda_mu, &ginv.to_matrix());
        JacobiElementR { g: ginv, lambda_mu: x.iter().map(|v| -v).collect(), k_center: -self.k_center }
    }
}

fn row_times(x: &[f64], g: &CMatrix) -> Vec<f64> {
    (0..g.cols()).map(|j| x.iter().enumerate().map(|(i, xi)| xi * g[(i, j)].re).sum()).collect()
}

pub fn compose_jacobi_c(h1: &JacobiElementC, h2: &JacobiElementC) -> Result<JacobiElementC> {
    let g = h1.g.compose(&h2.g)?;
    let moved = h2.g.inverse_act_vector(&h1.alpha);
    let cross = dot(&conj_vec(&h2.alpha), &moved).im;
    Ok(JacobiElementC { g, alpha: add_vec(&moved, &h2.alpha), t: h1.t + h2.t + cross })
}

pub fn compose_jacobi_r(h1: &JacobiElementR, h2: &JacobiElementR) -> Result<JacobiElementR> {
    let g = h1.g.compose(&h2.g)?;
    let xg = row_times(&h1.lambda_mu, &h2.g.to_matrix());
    let xgj = row_times(&xg, &j_matrix(h1.n()));
    let cross: f64 = xgj.iter().zip(&h2.lambda_mu).map(|(a, b)| a * b).sum();
    let lambda_mu = xg.iter().zip(&h2.lambda_mu).map(|(a, b)| a + b).collect();
    Ok(JacobiElementR { g, lambda_mu, k_center: h1.k_center + h2.k_center + cross })
}

/// `g_C = C⁻¹ g C`: `2p = a + d + i(b − c)`, `2q = a − d − i(b + c)`.
pub fn cayley_conjugate(g: &SymplecticR) -> Result<SymplecticC> {
    let p = (&(&g.a + &g.d) + &(&g.b - &g.c).scale(I)).scale_re(0.5);
    let q = (&(&g.a - &g.d) - &(&g.b + &g.c).scale(I)).scale_re(0.5);
    SymplecticC::with_tol(p, q, CAYLEY_TOL).map_err(|e| match e {
        Error::InvalidGroupElement { defect } => {
            Error::InvalidInput(alloc::format!("Cayley image violates the symplectic relations by {defect:e}"))
        }
        other => other,
    })
}

/// Inverse of [`cayley_conjugate`].
pub fn inverse_cayley_conjugate(g: &SymplecticC) -> Result<SymplecticR> {
    let (p, q) = (&g.p, &g.q);
    let (pb, qb) = (p.conj(), q.conj());
    let a = (&(p + q) + &(&pb + &qb)).scale_re(0.5);
    let b = (&(&(&pb - &qb) - p) + q).scale(I).scale_re(0.5);
    let c = (&(&(p + q) - &pb) - &qb).scale(I).scale_re(0.5);
    let d = (&(&(p - q) + &pb) - &qb).scale_re(0.5);
    // Discard round-off imaginary parts before the exact-real check.
    let re = |m: CMatrix| m.real_part();
    SymplecticR::new(re(a), re(b), re(c), re(d))
}

/// `Θ(g, (n, m), k) = (C⁻¹gC, m + i n, k)`.
pub fn theta(h: &JacobiElementR) -> Result<JacobiElementC> {
    let g = cayley_conjugate(&h.g)?;
    let alpha = h.lambda().iter().zip(h.mu()).map(|(&n, &m)| c(m, n)).collect();
    Ok(JacobiElementC { g, alpha, t: h.k_center })
}

pub fn act_ball(h: &JacobiElementC, pt: &JacobiBallPoint) -> Result<JacobiBallPoint> {
    if h.n() != pt.n() {
        return Err(Error::DimensionMismatch { expected: h.n(), found: pt.n() });
    }
    let w1 = h.g.act_ball(pt.ball())?;
    let (p, q) = (&h.g.p, &h.g.q);
    let w = pt.w();
    let a = &(w * &q.adjoint()) + &p.adjoint();
    let rhs = sub_vec(&add_vec(pt.z(), &h.alpha), &w.mul_vec(&conj_vec(&h.alpha)));
    let z1 = a.solve_vec(&rhs).map_err(|_| Error::SingularDenominator)?;
    JacobiBallPoint::new(z1, w1)
}

/// Pushforward of a tangent vector under [`act_ball`].
///
/// ```text
/// dW₁ = A⁻¹ dW (q̄W + p̄)⁻¹,          A = W q* + p*
/// dz₁ = A⁻¹ (dz − dW ᾱ − dW q* z₁)
/// ```
pub fn act_ball_differential(h: &JacobiElementC, pt: &JacobiBallPoint, v: &TangentVector) -> Result<TangentVector> {
    if v.n() != pt.n() {
        return Err(Error::DimensionMismatch { expected: pt.n(), found: v.n() });
    }
    let image = act_ball(h, pt)?;
    let (p, q) = (&h.g.p, &h.g.q);
    let w = pt.w();
    let a = &(w * &q.adjoint()) + &p.adjoint();
    let den = &(&q.conj() * w) + &p.conj();
    let a_lu = a.lu().map_err(|_| Error::SingularDenominator)?;
    let den_inv = den.inverse().map_err(|_| Error::SingularDenominator)?;
    let dw1 = &a_lu.solve(&v.dw)? * &den_inv;
    let rhs = sub_vec(
        &sub_vec(&v.dz, &v.dw.mul_vec(&conj_vec(&h.alpha))),
        &(&v.dw * &q.adjoint()).mul_vec(image.z()),
    );
    let dz1 = a_lu.solve_vec(&rhs)?;
    Ok(TangentVector { dz: dz1, dw: dw1.symmetrized() })
}

/// Action of the real Jacobi group on `X^J_n`.
pub fn act_upper(h: &JacobiElementR, pt: &SiegelUpperPoint) -> Result<SiegelUpperPoint> {
    if h.n() != pt.n() {
        return Err(Error::DimensionMismatch { expected: h.n(), found: pt.n() });
    }
    let g = &h.g;
    let v = pt.v();
    let v1 = g.act_upper(v)?;
    let den = &(v * &g.c.transpose()) + &g.d.transpose();
    let nvec: Vec<C64> = h.lambda().iter().map(|&x| real(x)).collect();
    let mvec: Vec<C64> = h.mu().iter().map(|&x| real(x)).collect();
    let rhs = add_vec(&add_vec(pt.u(), &v.mul_vec(&nvec)), &mvec);
    let u1 = den.solve_vec(&rhs).map_err(|_| Error::SingularDenominator)?;
    SiegelUpperPoint::new(v1, u1)
}

/// `Φ(V, u) = ((V − i)(V + i)⁻¹, 2i(V + i)⁻¹u)`.
pub fn partial_cayley(pt: &SiegelUpperPoint) -> Result<JacobiBallPoint> {
    let n = pt.n();
    let one_i = CMatrix::identity(n).scale(I);
    let plus = pt.v() + &one_i;
    let minus = pt.v() - &one_i;
    let lu = plus.lu().map_err(|_| Error::SingularDenominator)?;
    // (V − i)(V + i)⁻¹ = (V + i)⁻¹(V − i) since both are polynomials in V
    let w = lu.solve(&minus)?;
    let z = lu.solve_vec(pt.u())?.iter().map(|x| x * c(0.0, 2.0)).collect();
    JacobiBallPoint::from_parts(z, w.symmetrized())
}

/// `Φ⁻¹(z, W) = (i(1 − W)⁻¹(1 + W), (1 − W)⁻¹z)`.
pub fn inverse_partial_cayley(pt: &JacobiBallPoint) -> Result<SiegelUpperPoint> {
    let n = pt.n();
    let one = CMatrix::identity(n);
    let lu = (&one - pt.w()).lu().map_err(|_| Error::SingularDenominator)?;
    let v = lu.solve(&(&one + pt.w()))?.scale(I);
    let u = lu.solve_vec(pt.z())?;
    SiegelUpperPoint::new(v.symmetrized(), u)
}

/// FC coordinates `η = M(z + W z̄)`, `M = (1 − W W̄)⁻¹`.
pub fn fc_transform(pt: &JacobiBallPoint) -> Vec<C64> {
    let rhs = add_vec(pt.z(), &pt.w().mul_vec(&conj_vec(pt.z())));
    pt.ball().n_matrix().solve_vec(&rhs).expect("N is invertible on the ball")
}

/// `z = η − W η̄`.
pub fn inverse_fc_transform(eta: &[C64], w: &SiegelBallPoint) -> Result<JacobiBallPoint> {
    check_len(eta, w.n())?;
    let z = sub_vec(eta, &w.w().mul_vec(&conj_vec(eta)));
    JacobiBallPoint::new(z, w.clone())
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// `exp` of a random element `[[a, b], [c, −aᵗ]]` of `sp(n, R)`, `b`, `c`
/// symmetric, scaled to Frobenius norm at most `scale`.
pub fn random_symplectic_r<R: Rng + ?Sized>(n: usize, rng: &mut R, scale: f64) -> SymplecticR {
    let a = CMatrix::from_real_fn(n, n, |_, _| gaussian(rng));
    let b = CMatrix::from_real_fn(n, n, |_, _| gaussian(rng)).symmetrized();
    let cm = CMatrix::from_real_fn(n, n, |_, _| gaussian(rng)).symmetrized();
    let x = CMatrix::from_blocks(&a, &b, &cm, &-&a.transpose());
    let norm = x.frobenius_norm();
    let target = scale * rng.random::<f64>();
    let x = if norm > 0.0 { x.scale_re(target / norm) } else { x };
    let g = x.expm().real_part();
    SymplecticR {
        a: g.block(0, 0, n, n),
        b: g.block(0, n, n, n),
        c: g.block(n, 0, n, n),
        d: g.block(n, n, n, n),
    }
}

pub fn random_jacobi_r<R: Rng + ?Sized>(n: usize, rng: &mut R, scale: f64) -> JacobiElementR {
    let g = random_symplectic_r(n, rng, scale);
    let lambda_mu = (0..2 * n).map(|_| gaussian(rng)).collect();
    JacobiElementR { g, lambda_mu, k_center: gaussian(rng) }
}

pub fn random_jacobi_c<R: Rng + ?Sized>(n: usize, rng: &mut R, scale: f64) -> JacobiElementC {
    let g = random_symplectic_r(n, rng, scale);
    let g = cayley_conjugate(&g).expect("exp of sp(n,R) is symplectic");
    JacobiElementC { g, alpha: domains::gaussian_vector(n, rng), t: gaussian(rng) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::sample_jacobi_ball;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn elem_diff(a: &JacobiElementC, b: &JacobiElementC) -> f64 {
        a.g.p.max_abs_diff(&b.g.p)
            .max(a.g.q.max_abs_diff(&b.g.q))
            .max(crate::linalg::max_abs_diff_vec(&a.alpha, &b.alpha))
            .max((a.t - b.t).abs())
    }

    fn point_diff(a: &JacobiBallPoint, b: &JacobiBallPoint) -> f64 {
        a.w().max_abs_diff(b.w()).max(crate::linalg::max_abs_diff_vec(a.z(), b.z()))
    }

    #[test]
    fn random_elements_are_symplectic() {
        let mut r = rng(1);
        for n in 1..=3 {
            let g = random_symplectic_r(n, &mut r, 1.0);
            assert!(g.defect() < 1e-12);
            assert!(cayley_conjugate(&g).unwrap().defect() < 1e-12);
        }
    }

    #[test]
    fn complex_group_laws() {
        let mut r = rng(2);
        for n in 1..=3 {
            let h1 = random_jacobi_c(n, &mut r, 1.0);
            let h2 = random_jacobi_c(n, &mut r, 1.0);
            let h3 = random_jacobi_c(n, &mut r, 1.0);
            let id = JacobiElementC::identity(n);
            assert!(elem_diff(&compose_jacobi_c(&h1, &id).unwrap(), &h1) < 1e-14);
            assert!(elem_diff(&compose_jacobi_c(&h1, &h1.inverse()).unwrap(), &id) < 1e-12);
            assert!(elem_diff(&compose_jacobi_c(&h1.inverse(), &h1).unwrap(), &id) < 1e-12);
            let left = compose_jacobi_c(&compose_jacobi_c(&h1, &h2).unwrap(), &h3).unwrap();
            let right = compose_jacobi_c(&h1, &compose_jacobi_c(&h2, &h3).unwrap()).unwrap();
            assert!(elem_diff(&left, &right) < 1e-10);
        }
    }

    #[test]
    fn real_group_laws() {
        let mut r = rng(3);
        for n in 1..=3 {
            let h1 = random_jacobi_r(n, &mut r, 1.0);
            let h2 = random_jacobi_r(n, &mut r, 1.0);
            let h3 = random_jacobi_r(n, &mut r, 1.0);
            let diff = |a: &JacobiElementR, b: &JacobiElementR| {
                a.g.to_matrix()
                    .max_abs_diff(&b.g.to_matrix())
                    .max(a.lambda_mu.iter().zip(&b.lambda_mu).fold(0.0, |m, (x, y)| m.max((x - y).abs())))
                    .max((a.k_center - b.k_center).abs())
            };
            let id = JacobiElementR::identity(n);
            assert!(diff(&compose_jacobi_r(&h1, &id).unwrap(), &h1) < 1e-14);
            assert!(diff(&compose_jacobi_r(&h1, &h1.inverse()).unwrap(), &id) < 1e-12);
            let left = compose_jacobi_r(&compose_jacobi_r(&h1, &h2).unwrap(), &h3).unwrap();
            let right = compose_jacobi_r(&h1, &compose_jacobi_r(&h2, &h3).unwrap()).unwrap();
            assert!(diff(&left, &right) < 1e-10);
        }
    }

    #[test]
    fn cayley_examples_and_round_trip() {
        let id = cayley_conjugate(&SymplecticR::identity(2)).unwrap();
        assert_eq!(id, SymplecticC::identity(2));
        let th: f64 = 0.4;
        let rot = SymplecticR::new(
            CMatrix::diagonal(&[real(th.cos())]),
            CMatrix::diagonal(&[real(-th.sin())]),
            CMatrix::diagonal(&[real(th.sin())]),
            CMatrix::diagonal(&[real(th.cos())]),
        )
        .unwrap();
        let gc = cayley_conjugate(&rot).unwrap();
        assert!((gc.p[(0, 0)] - C64::from_polar(1.0, -th)).norm() < 1e-15);
        assert!(gc.q[(0, 0)].norm() < 1e-15);
        let mut r = rng(4);
        for n in 1..=3 {
            let g1 = random_symplectic_r(n, &mut r, 1.0);
            let g2 = random_symplectic_r(n, &mut r, 1.0);
            let back = inverse_cayley_conjugate(&cayley_conjugate(&g1).unwrap()).unwrap();
            assert!(back.to_matrix().max_abs_diff(&g1.to_matrix()) < 1e-12);
            let lhs = cayley_conjugate(&g1.compose(&g2).unwrap()).unwrap();
            let rhs = cayley_conjugate(&g1).unwrap().compose(&cayley_conjugate(&g2).unwrap()).unwrap();
            assert!(lhs.p.max_abs_diff(&rhs.p).max(lhs.q.max_abs_diff(&rhs.q)) < 1e-10);
        }
    }

    #[test]
    fn ball_action_examples() {
        let mut r = rng(5);
        let pt = sample_jacobi_ball(2, &mut r, 0.9).unwrap();
        let same = act_ball(&JacobiElementC::identity(2), &pt).unwrap();
        assert!(point_diff(&same, &pt) < 1e-14);

        let alpha = crate::domains::gaussian_vector(2, &mut r);
        let h = JacobiElementC::new(SymplecticC::identity(2), alpha.clone(), 0.0).unwrap();
        let moved = act_ball(&h, &pt).unwrap();
        let expected = sub_vec(&add_vec(pt.z(), &alpha), &pt.w().mul_vec(&conj_vec(&alpha)));
        assert!(moved.w().max_abs_diff(pt.w()) < 1e-14);
        assert!(crate::linalg::max_abs_diff_vec(moved.z(), &expected) < 1e-14);

        let h = random_jacobi_c(2, &mut r, 1.0);
        let at_origin = act_ball(&h, &JacobiBallPoint::origin(2)).unwrap();
        let w_expected = &h.g.q * &h.g.p.conj().inverse().unwrap();
        let z_expected = h.g.p.adjoint().solve_vec(&h.alpha).unwrap();
        assert!(at_origin.w().max_abs_diff(&w_expected) < 1e-13);
        assert!(crate::linalg::max_abs_diff_vec(at_origin.z(), &z_expected) < 1e-13);
    }

    #[test]
    fn actions_are_left_actions() {
        let mut r = rng(6);
        for n in 1..=3 {
            for _ in 0..10 {
                let h1 = random_jacobi_c(n, &mut r, 1.0);
                let h2 = random_jacobi_c(n, &mut r, 1.0);
                let pt = sample_jacobi_ball(n, &mut r, 0.9).unwrap();
                let two_step = act_ball(&h1, &act_ball(&h2, &pt).unwrap()).unwrap();
                let one_step = act_ball(&compose_jacobi_c(&h1, &h2).unwrap(), &pt).unwrap();
                assert!(point_diff(&two_step, &one_step) < 1e-9);

                let k1 = random_jacobi_r(n, &mut r, 1.0);
                let k2 = random_jacobi_r(n, &mut r, 1.0);
                let up = inverse_partial_cayley(&pt).unwrap();
                let a = act_upper(&k1, &act_upper(&k2, &up).unwrap()).unwrap();
                let b = act_upper(&compose_jacobi_r(&k1, &k2).unwrap(), &up).unwrap();
                let scale = 1.0 + a.v().max_abs() + crate::linalg::max_abs_vec(a.u());
                assert!(a.v().max_abs_diff(b.v()) / scale < 1e-9);
                assert!(crate::linalg::max_abs_diff_vec(a.u(), b.u()) / scale < 1e-9);
            }
        }
    }

    #[test]
    fn upper_action_fixed_point() {
        let g = SymplecticR::new(
            CMatrix::diagonal(&[real(0.0)]),
            CMatrix::diagonal(&[real(-1.0)]),
            CMatrix::diagonal(&[real(1.0)]),
            CMatrix::diagonal(&[real(0.0)]),
        )
        .unwrap();
        let h = JacobiElementR::new(g, vec![0.0, 0.0], 0.0).unwrap();
        let out = act_upper(&h, &SiegelUpperPoint::base_point(1)).unwrap();
        assert!((out.v()[(0, 0)] - I).norm() < 1e-15);
    }

    #[test]
    fn partial_cayley_examples() {
        let u = vec![c(0.3, -0.2), c(1.0, 0.5)];
        let base = SiegelUpperPoint::new(CMatrix::identity(2).scale(I), u.clone()).unwrap();
        let img = partial_cayley(&base).unwrap();
        assert!(img.w().max_abs() < 1e-15);
        assert!(crate::linalg::max_abs_diff_vec(img.z(), &u) < 1e-15);

        let p = SiegelUpperPoint::new(CMatrix::diagonal(&[c(0.0, 2.0)]), vec![C64::zero()]).unwrap();
        let img = partial_cayley(&p).unwrap();
        assert!((img.w()[(0, 0)] - real(1.0 / 3.0)).norm() < 1e-15);

        let mut r = rng(7);
        for n in 1..=3 {
            let pt = sample_jacobi_ball(n, &mut r, 0.95).unwrap();
            let back = partial_cayley(&inverse_partial_cayley(&pt).unwrap()).unwrap();
            assert!(point_diff(&back, &pt) < 1e-12);
        }
    }

    #[test]
    fn theta_is_homomorphism_and_intertwines() {
        let mut r = rng(8);
        for n in 1..=3 {
            let id = theta(&JacobiElementR::identity(n)).unwrap();
            assert!(elem_diff(&id, &JacobiElementC::identity(n)) < 1e-15);
            for _ in 0..10 {
                let h1 = random_jacobi_r(n, &mut r, 1.0);
                let h2 = random_jacobi_r(n, &mut r, 1.0);
                let lhs = theta(&compose_jacobi_r(&h1, &h2).unwrap()).unwrap();
                let rhs = compose_jacobi_c(&theta(&h1).unwrap(), &theta(&h2).unwrap()).unwrap();
                assert!(elem_diff(&lhs, &rhs) < 1e-10);

                let up = crate::domains::sample_jacobi_upper(n, &mut r, 0.9).unwrap();
                let a = partial_cayley(&act_upper(&h1, &up).unwrap()).unwrap();
                let b = act_ball(&theta(&h1).unwrap(), &partial_cayley(&up).unwrap()).unwrap();
                assert!(point_diff(&a, &b) < 1e-10);
            }
        }
    }

    #[test]
    fn fc_examples_and_round_trip() {
        let z = vec![c(0.4, 0.1), c(-1.0, 0.3)];
        let pt = JacobiBallPoint::new(z.clone(), SiegelBallPoint::origin(2)).unwrap();
        assert!(crate::linalg::max_abs_diff_vec(&fc_transform(&pt), &z) < 1e-15);

        let pt = JacobiBallPoint::from_parts(vec![real(1.0)], CMatrix::diagonal(&[real(0.5)])).unwrap();
        assert!((fc_transform(&pt)[0] - real(2.0)).norm() < 1e-14);

        let mut r = rng(9);
        for n in 1..=3 {
            let pt = sample_jacobi_ball(n, &mut r, 0.9).unwrap();
            let back = inverse_fc_transform(&fc_transform(&pt), pt.ball()).unwrap();
            assert!(point_diff(&back, &pt) < 1e-12);
        }
    }

    #[test]
    fn differential_examples() {
        let mut r = rng(10);
        let pt = sample_jacobi_ball(2, &mut r, 0.9).unwrap();
        let v = TangentVector::new(crate::domains::gaussian_vector(2, &mut r), CMatrix::identity(2)).unwrap();
        let same = act_ball_differential(&JacobiElementC::identity(2), &pt, &v).unwrap();
        assert!(same.dw.max_abs_diff(&v.dw) < 1e-14);
        assert!(crate::linalg::max_abs_diff_vec(&same.dz, &v.dz) < 1e-14);
    }
}
