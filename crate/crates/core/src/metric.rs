//! The balanced Kähler metric of `D^J_n` and the metrics of its parent domains.
//!
//! With `N = 1 − W W̄`, `M = N⁻¹`, `η = M(z + W z̄)`, `f_pq = 1 − δ_pq/2`:
//!
//! ```text
//! f = −(k/2) ln det N + μ Re( z̄ᵗMz + ½ zᵗW̄Mz + ½ z̄ᵗMWz̄ )
//!
//! h1[i][j]          = μ M̄_ij
//! h2[i][(pq)]       = μ (η_q M̄_ip + η_p M̄_iq) f_pq
//! h3[(pq)][i]       = μ (η̄_q M̄_pi + η̄_p M̄_qi) f_pq
//! h4[(pq)][(mn)]    = (k/2) hᵏ + μ hᵘ
//! hᵏ[(pq)][(mn)]    = 2 M_mp M_nq (1−δ_pq) + 2 M_mq M_np (1−δ_mn) + M_mp² δ_pq δ_mn
//! hᵘ[(pq)][(mn)]    = [η̄_p(η_n M̄_qm + η_m M̄_qn) + η̄_q(η_n M̄_pm + η_m M̄_pn)] f_pq f_mn
//! ```
//!
//! `h[α][β] = ∂²f/∂ζ_α∂ζ̄_β` in the ordered-pair coordinates of
//! [`crate::domains`]. The inverse, with `S_n = Σ_q η_q N̄_qn` and
//! `α = ηᵗN̄η̄`:
//!
//! ```text
//! h¹ = (1/μ + α/k) N̄ + (1/k) S̄ Sᵗ
//! h²[i][(mn)] = −(1/k)(S_n N̄_im + S_m N̄_in)
//! h³[(mn)][i] = −(1/k)(S̄_n N̄_mi + S̄_m N̄_ni)
//! h⁴[(pq)][(mn)] = (1/k)(N̄_qn N̄_pm + N̄_pn N̄_qm)
//! ```
//!
//! and `det h = 2^{n(n−1)/2} (k/2)^{n(n+1)/2} μⁿ det N^{−(n+2)}`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::domains::{JacobiBallPoint, PairIndex, Point, SiegelBallPoint, SiegelUpperPoint, TangentVector};
use crate::error::{Error, Result};
use crate::linalg::{add_vec, conj_vec, dot, real, CMatrix, C64};

/// Weights `k` (symplectic part) and `μ` (Heisenberg part) for dimension `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricParams {
    pub n: usize,
    pub k: f64,
    pub mu: f64,
}

impl MetricParams {
    pub fn new(n: usize, k: f64, mu: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidParams(alloc::format!("k must be positive, got {k}")));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParams(alloc::format!("mu must be positive, got {mu}")));
        }
        Ok(MetricParams { n, k, mu })
    }

    /// True when `2k` is not a positive integer, i.e. outside the range where
    /// the kernel comes from a unitary representation. Geometry is unaffected.
    pub fn non_integral_weight(&self) -> bool {
        let two_k = 2.0 * self.k;
        (two_k - two_k.round()).abs() > 1e-12
    }

    pub fn pair_dim(&self) -> usize {
        self.n * (self.n + 1) / 2
    }

    pub fn dim(&self) -> usize {
        self.n * (self.n + 3) / 2
    }

    /// Fails unless the point dimension is `n`.
    pub fn check(&self, n: usize) -> Result<()> {
        if n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: n });
        }
        Ok(())
    }
}

#[inline]
fn delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// `f_pq = 1 − δ_pq/2`.
#[inline]
pub fn f_pq(p: usize, q: usize) -> f64 {
    1.0 - 0.5 * delta(p, q)
}

/// `e_μν = (1 + δ_μν)/2`.
#[inline]
pub fn e_munu(a: usize, b: usize) -> f64 {
    0.5 * (1.0 + delta(a, b))
}

/// Auxiliary quantities shared by the closed forms.
#[derive(Clone, Debug)]
pub struct AuxMatrices {
    pub n_mat: CMatrix,
    pub m_mat: CMatrix,
    /// `X = W̄M`, symmetric.
    pub x: CMatrix,
    pub eta: Vec<C64>,
    /// `S_n = Σ_q η_q N̄_qn`.
    pub s: Vec<C64>,
    /// `ηᵗN̄η̄`, real and non-negative.
    pub metric_alpha: f64,
    /// `1/μ + metric_alpha/k`, the coefficient of `N̄` in the `zz` block of `h⁻¹`.
    pub theta: f64,
}

impl AuxMatrices {
    pub fn new(params: &MetricParams, pt: &JacobiBallPoint) -> Self {
        let w = pt.w();
        let n_mat = pt.ball().n_matrix();
        let m_mat = n_mat.inverse().expect("N is positive definite on the ball");
        let x = &w.conj() * &m_mat;
        let zb = conj_vec(pt.z());
        let eta = m_mat.mul_vec(&add_vec(pt.z(), &w.mul_vec(&zb)));
        let nb = n_mat.conj();
        let s = nb.transpose().mul_vec(&eta);
        let metric_alpha = dot(&eta, &nb.mul_vec(&conj_vec(&eta))).re;
        let theta = 1.0 / params.mu + metric_alpha / params.k;
        AuxMatrices { n_mat, m_mat, x, eta, s, metric_alpha, theta }
    }
}

/// Kähler potential of the balanced metric.
pub fn kahler_potential(params: &MetricParams, pt: &JacobiBallPoint) -> Result<f64> {
    params.check(pt.n())?;
    let n_mat = pt.ball().n_matrix();
    let lu = n_mat.lu()?;
    let ln_det = lu.det().re.ln();
    let z = pt.z();
    let zb = conj_vec(z);
    let w = pt.w();
    let mz = lu.solve_vec(z)?;
    let mwzb = lu.solve_vec(&w.mul_vec(&zb))?;
    let t1 = dot(&zb, &mz);
    let t2 = dot(z, &w.conj().mul_vec(&mz));
    let t3 = dot(&zb, &mwzb);
    let quad = t1 + (t2 + t3) * 0.5;
    Ok(-0.5 * params.k * ln_det + params.mu * quad.re)
}

/// Blocks of the metric and the assembled `d × d` matrix.
#[derive(Clone, Debug)]
pub struct MetricEval {
    pub h1: CMatrix,
    pub h2: CMatrix,
    pub h3: CMatrix,
    pub h4: CMatrix,
    pub h: CMatrix,
}

/// Blocks of the inverse metric and the assembled inverse.
#[derive(Clone, Debug)]
pub struct MetricInverse {
    pub h1: CMatrix,
    pub h2: CMatrix,
    pub h3: CMatrix,
    pub h4: CMatrix,
    pub h_inv: CMatrix,
}

/// `hᵏ(W)`, the pair block of `4 Tr(M dW M̄ dW̄)` up to the factor 4.
pub fn h_k(ball: &SiegelBallPoint) -> CMatrix {
    let m = ball.m_matrix();
    let idx = PairIndex::new(ball.n());
    let pairs = idx.pairs();
    CMatrix::from_fn(pairs.len(), pairs.len(), |r, s| {
        let (p, q) = pairs[r];
        let (mm, nn) = pairs[s];
        m[(mm, p)] * m[(nn, q)] * (2.0 * (1.0 - delta(p, q)))
            + m[(mm, q)] * m[(nn, p)] * (2.0 * (1.0 - delta(mm, nn)))
            + m[(mm, p)] * m[(mm, p)] * (delta(p, q) * delta(mm, nn))
    })
}

/// `k_inv[(mn)][(uv)] = ½(N_vn N̄_mu + N_vm N̄_nu)`.
pub fn k_inv(ball: &SiegelBallPoint) -> CMatrix {
    let nm = ball.n_matrix();
    let nb = nm.conj();
    let idx = PairIndex::new(ball.n());
    let pairs = idx.pairs();
    CMatrix::from_fn(pairs.len(), pairs.len(), |r, s| {
        let (m, n) = pairs[r];
        let (u, v) = pairs[s];
        (nm[(v, n)] * nb[(m, u)] + nm[(v, m)] * nb[(n, u)]) * 0.5
    })
}

/// `(hᵏ, k_inv)`; their product is the identity on pair coordinates.
pub fn ball_metric_pair(ball: &SiegelBallPoint) -> (CMatrix, CMatrix) {
    (h_k(ball), k_inv(ball))
}

pub fn metric_blocks(params: &MetricParams, pt: &JacobiBallPoint) -> Result<MetricEval> {
    params.check(pt.n())?;
    let aux = AuxMatrices::new(params, pt);
    let n = params.n;
    let mu = params.mu;
    let idx = PairIndex::new(n);
    let pairs = idx.pairs();
    let m = pairs.len();
    let mb = aux.m_mat.conj();
    let eta = &aux.eta;
    let etab = conj_vec(eta);

    let h1 = mb.scale_re(mu);
    let h2 = CMatrix::from_fn(n, m, |i, r| {
        let (p, q) = pairs[r];
        (eta[q] * mb[(i, p)] + eta[p] * mb[(i, q)]) * (mu * f_pq(p, q))
    });
    let h3 = CMatrix::from_fn(m, n, |r, i| {
        let (p, q) = pairs[r];
        (etab[q] * mb[(p, i)] + etab[p] * mb[(q, i)]) * (mu * f_pq(p, q))
    });
    let hk = h_k(pt.ball());
    let h4 = CMatrix::from_fn(m, m, |r, s| {
        let (p, q) = pairs[r];
        let (mm, nn) = pairs[s];
        let hmu = (etab[p] * (eta[nn] * mb[(q, mm)] + eta[mm] * mb[(q, nn)])
            + etab[q] * (eta[nn] * mb[(p, mm)] + eta[mm] * mb[(p, nn)]))
            * (f_pq(p, q) * f_pq(mm, nn));
        hk[(r, s)] * (0.5 * params.k) + hmu * mu
    });
    let h = CMatrix::from_blocks(&h1, &h2, &h3, &h4);
    Ok(MetricEval { h1, h2, h3, h4, h })
}

pub fn metric_inverse(params: &MetricParams, pt: &JacobiBallPoint) -> Result<MetricInverse> {
    params.check(pt.n())?;
    let aux = AuxMatrices::new(params, pt);
    let n = params.n;
    let k = params.k;
    let idx = PairIndex::new(n);
    let pairs = idx.pairs();
    let m = pairs.len();
    let nb = aux.n_mat.conj();
    let s = &aux.s;
    let sb = conj_vec(s);

    let h1 = CMatrix::from_fn(n, n, |i, j| nb[(i, j)] * aux.theta + sb[i] * s[j] / k);
    let h2 = CMatrix::from_fn(n, m, |i, r| {
        let (mm, nn) = pairs[r];
        -(s[nn] * nb[(i, mm)] + s[mm] * nb[(i, nn)]) / k
    });
    let h3 = CMatrix::from_fn(m, n, |r, i| {
        let (mm, nn) = pairs[r];
        -(sb[nn] * nb[(mm, i)] + sb[mm] * nb[(nn, i)]) / k
    });
    let h4 = CMatrix::from_fn(m, m, |r, t| {
        let (p, q) = pairs[r];
        let (mm, nn) = pairs[t];
        (nb[(q, nn)] * nb[(p, mm)] + nb[(p, nn)] * nb[(q, mm)]) / k
    });
    let h_inv = CMatrix::from_blocks(&h1, &h2, &h3, &h4);
    Ok(MetricInverse { h1, h2, h3, h4, h_inv })
}

/// Determinant of the metric: the numerical value of the assembled matrix
/// next to the closed form and its point-independent constant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetEval {
    pub value: f64,
    pub closed_form: f64,
    pub constant_c: f64,
}

/// `C(n) = 2^{n(n−1)/2}`.
pub fn det_constant(n: usize) -> f64 {
    libm::exp2((n * n.saturating_sub(1) / 2) as f64)
}

/// `C(n) (k/2)^{n(n+1)/2} μⁿ det N^{−(n+2)}`.
pub fn det_closed_form(params: &MetricParams, ball: &SiegelBallPoint) -> f64 {
    let n = params.n;
    let det_n = ball.n_matrix().det().re;
    det_constant(n)
        * (0.5 * params.k).powi(params.pair_dim() as i32)
        * params.mu.powi(n as i32)
        * det_n.powi(-(n as i32 + 2))
}

pub fn metric_det(params: &MetricParams, pt: &JacobiBallPoint) -> Result<DetEval> {
    let h = metric_blocks(params, pt)?.h;
    Ok(DetEval {
        value: h.det().re,
        closed_form: det_closed_form(params, pt.ball()),
        constant_c: det_constant(params.n),
    })
}

/// `ln det h` of the assembled matrix, used as the Ricci potential.
pub fn ln_metric_det(params: &MetricParams, pt: &JacobiBallPoint) -> Result<f64> {
    let h = metric_blocks(params, pt)?.h;
    Ok(crate::linalg::log_det(&h)?.re)
}

/// Ricci form, scalar curvature and the Q.-K. Lu form.
#[derive(Clone, Debug)]
pub struct CurvatureData {
    /// `Ric[α][β] = −∂²ln det h/∂ζ_α∂ζ̄_β`; only the pair block is non-zero.
    pub ric: CMatrix,
    /// Closed form `−(2/k) n(n+1)(n+2)/2`.
    pub scalar_curvature: f64,
    /// `Tr(h⁻¹ Ric)` at the point, for comparison with the closed form.
    pub scalar_curvature_contracted: f64,
    /// `((n+1)(n+2)/2) h − Ric`.
    pub qk_lu: CMatrix,
}

pub fn scalar_curvature(params: &MetricParams) -> f64 {
    let n = params.n as f64;
    -(2.0 / params.k) * n * (n + 1.0) * (n + 2.0) / 2.0
}

pub fn ricci(params: &MetricParams, pt: &JacobiBallPoint) -> Result<CMatrix> {
    params.check(pt.n())?;
    let n = params.n;
    let hk = h_k(pt.ball());
    let mut ric = CMatrix::zeros(params.dim(), params.dim());
    ric.set_block(n, n, &hk.scale_re(-(n as f64 + 2.0)));
    Ok(ric)
}

pub fn curvature(params: &MetricParams, pt: &JacobiBallPoint) -> Result<CurvatureData> {
    let ric = ricci(params, pt)?;
    let h = metric_blocks(params, pt)?.h;
    let h_inv = metric_inverse(params, pt)?.h_inv;
    let contracted = (&h_inv * &ric).trace().re;
    let n = params.n as f64;
    let qk_lu = &h.scale_re((n + 1.0) * (n + 2.0) / 2.0) - &ric;
    Ok(CurvatureData {
        ric,
        scalar_curvature: scalar_curvature(params),
        scalar_curvature_contracted: contracted,
        qk_lu,
    })
}

/// Metric matrix of `Tr(R⁻¹ dV R⁻¹ dV̄)` in pair coordinates of `V`:
/// `g[(pq)][(mn)] = Σ R⁻¹_ab R⁻¹_cd` over `(b,c) ∈ {(p,q),(q,p)}`,
/// `(d,a) ∈ {(m,n),(n,m)}`, each orbit counted once.
pub fn upper_metric_matrix(pt: &SiegelUpperPoint) -> Result<CMatrix> {
    let r_inv = pt.r().inverse()?;
    let idx = PairIndex::new(pt.n());
    let pairs = idx.pairs();
    Ok(CMatrix::from_fn(pairs.len(), pairs.len(), |r, s| {
        let (p, q) = pairs[r];
        let (mm, nn) = pairs[s];
        let mut acc = real(0.0);
        for (b, c) in orbit(p, q) {
            for (d, a) in orbit(mm, nn) {
                acc += r_inv[(a, b)] * r_inv[(c, d)];
            }
        }
        acc
    }))
}

/// `{(p,q), (q,p)}` without repetition.
pub(crate) fn orbit(p: usize, q: usize) -> impl Iterator<Item = (usize, usize)> {
    let second = if p == q { None } else { Some((q, p)) };
    core::iter::once((p, q)).chain(second)
}

/// `4 Tr(M dW M̄ dW̄)`.
pub fn ds2_ball(ball: &SiegelBallPoint, dw: &CMatrix) -> f64 {
    let m = ball.m_matrix();
    4.0 * (&(&(&m * dw) * &m.conj()) * &dw.conj()).trace().re
}

/// `Tr(R⁻¹ dV R⁻¹ dV̄)`.
pub fn ds2_upper(pt: &SiegelUpperPoint, dv: &CMatrix) -> Result<f64> {
    let r_inv = pt.r().inverse()?;
    Ok((&(&(&r_inv * dv) * &r_inv) * &dv.conj()).trace().re)
}

/// `(k/2) Tr(M dW M̄ dW̄) + μ Aᵗ M̄ Ā`, `A = dz + dW η̄`.
pub fn ds2_jacobi_ball(params: &MetricParams, pt: &JacobiBallPoint, v: &TangentVector) -> Result<f64> {
    params.check(pt.n())?;
    let aux = AuxMatrices::new(params, pt);
    let m = &aux.m_mat;
    let ball_part = (&(&(m * &v.dw) * &m.conj()) * &v.dw.conj()).trace().re;
    let a = add_vec(&v.dz, &v.dw.mul_vec(&conj_vec(&aux.eta)));
    let heis = dot(&a, &m.conj().mul_vec(&conj_vec(&a))).re;
    Ok(0.5 * params.k * ball_part + params.mu * heis)
}

/// Squared length of a tangent vector at a point of any of the three metric domains.
pub fn ds2_eval(params: &MetricParams, pt: &Point, v: &TangentVector) -> Result<f64> {
    if v.n() != pt.n() {
        return Err(Error::DimensionMismatch { expected: pt.n(), found: v.n() });
    }
    match pt {
        Point::Ball(b) => Ok(ds2_ball(b, &v.dw)),
        Point::Upper(u) => ds2_upper(u, &v.dw),
        Point::JacobiBall(p) => ds2_jacobi_ball(params, p, v),
        Point::JacobiUpper(_) => Err(Error::InvalidInput("no metric is defined on the Jacobi upper half-plane here".into())),
    }
}

/// `vᵗ A v̄` for a flattened tangent vector.
pub fn quadratic_form(a: &CMatrix, v: &[C64]) -> C64 {
    dot(v, &a.mul_vec(&conj_vec(v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{gaussian_vector, sample_jacobi_ball};
    use crate::linalg::c;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(n: usize) -> MetricParams {
        MetricParams::new(n, 3.5, 1.3).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(MetricParams::new(0, 1.0, 1.0).is_err());
        assert!(MetricParams::new(1, 0.0, 1.0).is_err());
        assert!(MetricParams::new(1, 1.0, -1.0).is_err());
        assert!(!MetricParams::new(1, 2.5, 1.0).unwrap().non_integral_weight());
        assert!(MetricParams::new(1, 2.3, 1.0).unwrap().non_integral_weight());
    }

    #[test]
    fn potential_examples() {
        let p = MetricParams::new(2, 2.0, 1.0).unwrap();
        assert_eq!(kahler_potential(&p, &JacobiBallPoint::origin(2)).unwrap(), 0.0);
        let z = vec![c(0.3, -1.0), c(0.5, 0.2)];
        let pt = JacobiBallPoint::new(z.clone(), SiegelBallPoint::origin(2)).unwrap();
        let norm2: f64 = z.iter().map(|x| x.norm_sqr()).sum();
        assert!((kahler_potential(&p, &pt).unwrap() - norm2).abs() < 1e-15);
        let p1 = MetricParams::new(1, 2.0, 1.0).unwrap();
        let pt = JacobiBallPoint::from_parts(vec![c(0.0, 0.0)], CMatrix::diagonal(&[real(0.5)])).unwrap();
        assert!((kahler_potential(&p1, &pt).unwrap() - 0.287_682_072_451_780_9).abs() < 1e-14);
    }

    #[test]
    fn blocks_at_w_zero() {
        let p = params(2);
        let z = vec![c(0.7, 0.1), c(-0.2, 0.4)];
        let pt = JacobiBallPoint::new(z.clone(), SiegelBallPoint::origin(2)).unwrap();
        let e = metric_blocks(&p, &pt).unwrap();
        assert!(e.h1.max_abs_diff(&CMatrix::identity(2).scale_re(p.mu)) < 1e-15);
        let idx = PairIndex::new(2);
        for (r, &(pp, q)) in idx.pairs().iter().enumerate() {
            for i in 0..2 {
                let expected = (z[q] * delta(i, pp) + z[pp] * delta(i, q)) * (p.mu * f_pq(pp, q));
                assert!((e.h2[(i, r)] - expected).norm() < 1e-15);
            }
        }
        let e0 = metric_blocks(&p, &JacobiBallPoint::origin(2)).unwrap();
        let expected = CMatrix::diagonal(&[real(p.k / 2.0), real(p.k), real(p.k / 2.0)]);
        assert!(e0.h4.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn metric_is_hermitian_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=3 {
            let p = params(n);
            for _ in 0..5 {
                let pt = sample_jacobi_ball(n, &mut rng, 0.9).unwrap();
                let h = metric_blocks(&p, &pt).unwrap().h;
                assert!(h.hermitian_defect() < 1e-12 * h.max_abs());
                assert!(h.min_hermitian_eigenvalue() > 0.0);
            }
        }
    }

    #[test]
    fn closed_form_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in 1..=3 {
            let p = params(n);
            for _ in 0..10 {
                let pt = sample_jacobi_ball(n, &mut rng, 0.9).unwrap();
                let h = metric_blocks(&p, &pt).unwrap().h;
                let hi = metric_inverse(&p, &pt).unwrap().h_inv;
                assert!((&h * &hi).max_abs_diff(&CMatrix::identity(p.dim())) < 1e-10);
            }
        }
    }

    #[test]
    fn inverse_examples() {
        let p = params(2);
        let inv = metric_inverse(&p, &JacobiBallPoint::origin(2)).unwrap();
        assert!(inv.h1.max_abs_diff(&CMatrix::identity(2).scale_re(1.0 / p.mu)) < 1e-15);
        assert!(inv.h2.max_abs() == 0.0 && inv.h3.max_abs() == 0.0);
        let expected = CMatrix::diagonal(&[real(2.0 / p.k), real(1.0 / p.k), real(2.0 / p.k)]);
        assert!(inv.h4.max_abs_diff(&expected) < 1e-15);

        // n = 1, W = 0: h¹ = 1/μ + 2|z|²/k
        let p1 = params(1);
        let z = c(0.6, -0.3);
        let pt = JacobiBallPoint::new(vec![z], SiegelBallPoint::origin(1)).unwrap();
        let h1 = metric_inverse(&p1, &pt).unwrap().h1[(0, 0)];
        assert!((h1 - real(1.0 / p1.mu + 2.0 * z.norm_sqr() / p1.k)).norm() < 1e-14);

        // n = 2, W = 0: h¹ = (1/μ + ‖z‖²/k) 1 + z̄ zᵗ / k
        let zs = vec![c(0.6, -0.3), c(0.1, 0.8)];
        let pt = JacobiBallPoint::new(zs.clone(), SiegelBallPoint::origin(2)).unwrap();
        let h1 = metric_inverse(&p, &pt).unwrap().h1;
        let nz: f64 = zs.iter().map(|x| x.norm_sqr()).sum();
        let expected = CMatrix::from_fn(2, 2, |i, j| {
            real(delta(i, j) * (1.0 / p.mu + nz / p.k)) + zs[i].conj() * zs[j] / p.k
        });
        assert!(h1.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn pair_lemma() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for n in 1..=4 {
            let w = crate::domains::sample_ball(n, &mut rng, 0.95).unwrap();
            let (hk, ki) = ball_metric_pair(&w);
            assert!((&hk * &ki).max_abs_diff(&CMatrix::identity(hk.rows())) < 1e-10);
        }
        let (hk, ki) = ball_metric_pair(&SiegelBallPoint::origin(2));
        assert!(hk.max_abs_diff(&CMatrix::diagonal(&[real(1.0), real(2.0), real(1.0)])) < 1e-15);
        assert!(ki.max_abs_diff(&CMatrix::diagonal(&[real(1.0), real(0.5), real(1.0)])) < 1e-15);
        let w = SiegelBallPoint::new(CMatrix::diagonal(&[c(0.3, 0.4)])).unwrap();
        let (hk, ki) = ball_metric_pair(&w);
        assert!((hk[(0, 0)] - real(1.0 / 0.75f64.powi(2))).norm() < 1e-14);
        assert!((ki[(0, 0)] - real(0.75f64.powi(2))).norm() < 1e-14);
    }

    #[test]
    fn determinant() {
        let p = MetricParams::new(1, 2.0, 1.0).unwrap();
        let d = metric_det(&p, &JacobiBallPoint::origin(1)).unwrap();
        assert_eq!((d.value, d.closed_form, d.constant_c), (1.0, 1.0, 1.0));
        let p2 = params(2);
        let d = metric_det(&p2, &JacobiBallPoint::origin(2)).unwrap();
        let expected = 2.0 * (p2.k / 2.0).powi(3) * p2.mu.powi(2);
        assert!((d.value - expected).abs() < 1e-12 * expected);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for n in 1..=3 {
            let p = params(n);
            let pt = sample_jacobi_ball(n, &mut rng, 0.9).unwrap();
            let d = metric_det(&p, &pt).unwrap();
            assert!((d.value - d.closed_form).abs() < 1e-10 * d.closed_form);
        }
    }

    #[test]
    fn curvature_closed_forms() {
        let p = MetricParams::new(2, 2.0, 1.0).unwrap();
        assert_eq!(scalar_curvature(&p), -12.0);
        assert_eq!(scalar_curvature(&MetricParams::new(1, 3.0, 1.0).unwrap()), -2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let pt = sample_jacobi_ball(2, &mut rng, 0.9).unwrap();
        let cd = curvature(&p, &pt).unwrap();
        assert!((cd.scalar_curvature_contracted + 12.0).abs() < 1e-10);
        assert!(cd.ric.block(0, 0, 2, 5).max_abs() == 0.0);
        let c0 = curvature(&p, &JacobiBallPoint::origin(2)).unwrap();
        let expected = CMatrix::diagonal(&[real(-4.0), real(-8.0), real(-4.0)]);
        assert!(c0.ric.block(2, 2, 3, 3).max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn line_elements() {
        let p = params(2);
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let zero = TangentVector::zero(2);
        let pt = sample_jacobi_ball(2, &mut rng, 0.9).unwrap();
        assert_eq!(ds2_jacobi_ball(&p, &pt, &zero).unwrap(), 0.0);

        let mut e11 = CMatrix::zeros(2, 2);
        e11[(0, 0)] = real(1.0);
        assert!((ds2_ball(&SiegelBallPoint::origin(2), &e11) - 4.0).abs() < 1e-15);
        let base = SiegelUpperPoint::base_point(3);
        let dv = CMatrix::identity(3).scale(c(0.0, 1.0));
        assert!((ds2_upper(&base, &dv).unwrap() - 3.0).abs() < 1e-14);

        for n in 1..=3 {
            let p = params(n);
            let pt = sample_jacobi_ball(n, &mut rng, 0.9).unwrap();
            let v = TangentVector::from_flat(n, &gaussian_vector(p.dim(), &mut rng)).unwrap();
            let h = metric_blocks(&p, &pt).unwrap().h;
            let q = quadratic_form(&h, &v.flatten());
            let ds2 = ds2_jacobi_ball(&p, &pt, &v).unwrap();
            assert!((q.re - ds2).abs() < 1e-10 * ds2 && q.im.abs() < 1e-10 * ds2);
            let hk = h_k(pt.ball());
            let flat_w = PairIndex::new(n).matrix_to_coords(&v.dw);
            let qk = quadratic_form(&hk, &flat_w).re * 4.0;
            assert!((qk - ds2_ball(pt.ball(), &v.dw)).abs() < 1e-10 * qk);
        }
    }

    #[test]
    fn upper_metric_and_cayley_pullback() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in 1..=3 {
            let up = crate::domains::sample_upper(n, &mut rng, 0.9).unwrap();
            let dv = CMatrix::from_fn(n, n, |_, _| crate::domains::complex_gaussian(&mut rng)).symmetrized();
            let g = upper_metric_matrix(&up).unwrap();
            let flat = PairIndex::new(n).matrix_to_coords(&dv);
            let ds = ds2_upper(&up, &dv).unwrap();
            assert!((quadratic_form(&g, &flat).re - ds).abs() < 1e-10 * ds);

            let w = crate::groups::partial_cayley(&up).unwrap();
            // dV = 2i U dW U with U = (1 − W)⁻¹
            let u = (&CMatrix::identity(n) - w.w()).inverse().unwrap();
            let dw = CMatrix::from_fn(n, n, |_, _| crate::domains::complex_gaussian(&mut rng)).symmetrized();
            let dv = (&(&u * &dw) * &u).scale(c(0.0, 2.0));
            let lhs = ds2_upper(&up, &dv).unwrap();
            let rhs = ds2_ball(w.ball(), &dw);
            assert!((lhs - rhs).abs() < 1e-8 * rhs);
        }
    }
}
