//! Reproducing kernel of the balanced metric and the quantities built on it.
//!
//! For `ζ = (x, V)` and `ζ′ = (y, W)`, with `U = (1 − W V̄)⁻¹`:
//!
//! ```text
//! 2F(ζ, ζ′) = 2 x̄ᵗUy + (V̄y)ᵗUy + x̄ᵗUWx̄
//! K(ζ, ζ′)  = det(U)^{k/2} e^{μF}
//! κ = K(ζ,ζ′) / √(K(ζ,ζ) K(ζ′,ζ′)),   b = |κ|²,   D = −ln b
//! ε(ζ) = e^{−f(ζ)} K(ζ, ζ)
//! ```
//!
//! The power `det(U)^{k/2}` is taken along the path `t ↦ det(1 − tWV̄)`,
//! `t ∈ [0, 1]`, starting from the real value 1. When `k/2` is not an integer
//! and the tracked argument leaves `(−π, π]`, the continuous and principal
//! branches disagree and [`Error::BranchAmbiguity`] is returned.

#[allow(unused_imports)]
use num_traits::Float;

use crate::domains::JacobiBallPoint;
use crate::error::{Error, Result};
use crate::linalg::{conj_vec, dot, CMatrix, C64};
use crate::metric::{kahler_potential, MetricParams};
use crate::quadrature::{adaptive_gauss_legendre, periodic_trapezoid, AdaptiveConfig};

const MAX_ARG_STEP: f64 = core::f64::consts::FRAC_PI_2;

/// Two-point kernel data.
#[derive(Clone, Debug)]
pub struct KernelPair {
    pub f: C64,
    /// `ln K`, with the imaginary part on the tracked branch.
    pub ln_k: C64,
    pub k: C64,
    pub u: CMatrix,
}

/// `ln det(1 − W V̄)` with its argument continued from `t = 0`.
pub fn tracked_log_det(v: &CMatrix, w: &CMatrix) -> Result<C64> {
    let wv = w * &v.conj();
    let n = wv.rows();
    let det_at = |t: f64| (&CMatrix::identity(n) - &wv.scale_re(t)).det();
    let end = det_at(1.0);
    if end.norm() == 0.0 {
        return Err(Error::SingularMatrix);
    }
    let mut arg = 0.0;
    let steps = 16;
    let mut prev = C64::new(1.0, 0.0);
    for i in 1..=steps {
        let t0 = (i - 1) as f64 / steps as f64;
        let t1 = i as f64 / steps as f64;
        arg += track(&det_at, t0, prev, t1, 30)?;
        prev = det_at(t1);
    }
    Ok(C64::new(end.norm().ln(), arg))
}

fn track(det_at: &dyn Fn(f64) -> C64, t0: f64, d0: C64, t1: f64, depth: u32) -> Result<f64> {
    let d1 = det_at(t1);
    if d1.norm() == 0.0 {
        return Err(Error::SingularMatrix);
    }
    let step = (d1 / d0).arg();
    if step.abs() < MAX_ARG_STEP || depth == 0 {
        return Ok(step);
    }
    let tm = 0.5 * (t0 + t1);
    let dm = det_at(tm);
    Ok(track(det_at, t0, d0, tm, depth - 1)? + track(det_at, tm, dm, t1, depth - 1)?)
}

fn is_integer(x: f64) -> bool {
    (x - x.round()).abs() < 1e-12
}

/// `F(ζ, ζ′)` and `U`.
pub fn two_point_exponent(zeta: &JacobiBallPoint, zeta2: &JacobiBallPoint) -> Result<(C64, CMatrix)> {
    if zeta.n() != zeta2.n() {
        return Err(Error::DimensionMismatch { expected: zeta.n(), found: zeta2.n() });
    }
    let (x, v) = (zeta.z(), zeta.w());
    let (y, w) = (zeta2.z(), zeta2.w());
    let n = x.len();
    let u = (&CMatrix::identity(n) - &(w * &v.conj())).inverse()?;
    let xb = conj_vec(x);
    let uy = u.mul_vec(y);
    let t1 = dot(&xb, &uy) * 2.0;
    let t2 = dot(&v.conj().mul_vec(y), &uy);
    let t3 = dot(&xb, &(&u * w).mul_vec(&xb));
    Ok(((t1 + t2 + t3) * 0.5, u))
}

pub fn two_point_kernel(params: &MetricParams, zeta: &JacobiBallPoint, zeta2: &JacobiBallPoint) -> Result<KernelPair> {
    let (f, u) = two_point_exponent(zeta, zeta2)?;
    let log_det = tracked_log_det(zeta.w(), zeta2.w())?;
    let half_k = 0.5 * params.k;
    if !is_integer(half_k) && !(log_det.im > -core::f64::consts::PI && log_det.im <= core::f64::consts::PI) {
        return Err(Error::BranchAmbiguity { argument: log_det.im });
    }
    // det U = 1 / det(1 − W V̄)
    let ln_k = -log_det * half_k + f * params.mu;
    Ok(KernelPair { f, ln_k, k: ln_k.exp(), u })
}

/// `ln K(ζ, ζ)`, real.
pub fn ln_kernel_diagonal(params: &MetricParams, zeta: &JacobiBallPoint) -> Result<f64> {
    Ok(two_point_kernel(params, zeta, zeta)?.ln_k.re)
}

/// `(κ, b, D)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalizedKernels {
    pub kappa: C64,
    pub berezin: f64,
    pub diastasis: f64,
}

pub fn normalized_kernels(params: &MetricParams, zeta: &JacobiBallPoint, zeta2: &JacobiBallPoint) -> Result<NormalizedKernels> {
    let k12 = two_point_kernel(params, zeta, zeta2)?.ln_k;
    let k11 = ln_kernel_diagonal(params, zeta)?;
    let k22 = ln_kernel_diagonal(params, zeta2)?;
    let ln_kappa = k12 - C64::new(0.5 * (k11 + k22), 0.0);
    let diastasis = -2.0 * ln_kappa.re;
    Ok(NormalizedKernels { kappa: ln_kappa.exp(), berezin: (-diastasis).exp(), diastasis })
}

/// `κ` assembled as `κ_{D_n}(V, W) · exp μ[F(ζ,ζ′) − ½F(ζ) − ½F(ζ′)]` with
/// `κ_{D_n} = det(U)^{k/2} det(M_V)^{−k/4} det(M_W)^{−k/4}`.
pub fn kappa_factorized(params: &MetricParams, zeta: &JacobiBallPoint, zeta2: &JacobiBallPoint) -> Result<C64> {
    let l12 = tracked_log_det(zeta.w(), zeta2.w())?;
    let l11 = zeta.ball().n_matrix().det().re.ln();
    let l22 = zeta2.ball().n_matrix().det().re.ln();
    let q = 0.25 * params.k;
    let ln_ball = -l12 * (2.0 * q) + C64::new(q * (l11 + l22), 0.0);
    let (f12, _) = two_point_exponent(zeta, zeta2)?;
    let (f11, _) = two_point_exponent(zeta, zeta)?;
    let (f22, _) = two_point_exponent(zeta2, zeta2)?;
    let heis = (f12 - (f11 + f22) * 0.5) * params.mu;
    Ok((ln_ball + heis).exp())
}

/// `e^{−f} K(ζ, ζ)`; identically 1 for the balanced metric.
pub fn epsilon_function(params: &MetricParams, pt: &JacobiBallPoint) -> Result<f64> {
    let f = kahler_potential(params, pt)?;
    Ok((ln_kernel_diagonal(params, pt)? - f).exp())
}

/// All kernel quantities at a pair of points.
#[derive(Clone, Debug)]
pub struct KernelEval {
    pub f: C64,
    pub k: C64,
    pub kappa: C64,
    pub berezin: f64,
    pub diastasis: f64,
    /// `ε` at the first point.
    pub epsilon: f64,
    pub u: CMatrix,
}

pub fn kernel_eval(params: &MetricParams, zeta: &JacobiBallPoint, zeta2: &JacobiBallPoint) -> Result<KernelEval> {
    let pair = two_point_kernel(params, zeta, zeta2)?;
    let nk = normalized_kernels(params, zeta, zeta2)?;
    Ok(KernelEval {
        f: pair.f,
        k: pair.k,
        kappa: nk.kappa,
        berezin: nk.berezin,
        diastasis: nk.diastasis,
        epsilon: epsilon_function(params, zeta)?,
        u: pair.u,
    })
}

/// Densities of the invariant volume forms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VolumeData {
    /// `det N^{−(n+1)}` on `D_n`.
    pub q_ball: f64,
    /// `det N^{−(n+2)}` on `D^J_n`.
    pub q_jacobi: f64,
}

pub fn volume_densities(pt: &JacobiBallPoint) -> VolumeData {
    let n = pt.n() as i32;
    let det_n = pt.ball().n_matrix().det().re;
    VolumeData { q_ball: det_n.powi(-(n + 1)), q_jacobi: det_n.powi(-(n + 2)) }
}

/// `Λ_n = μⁿ (k−3)/(2π^{n(n+3)/2}) ∏_{i=1}^{n−1} ((k−3)/2 − n + i) Γ(k+i−2)/Γ(k+2(i−n−1))`.
pub fn normalization_constant(params: &MetricParams) -> Result<f64> {
    let k = params.k;
    let n = params.n;
    if !(k - 3.0 > 0.0) {
        return Err(Error::GammaPole { argument: k - 3.0 });
    }
    let pi_pow = (params.dim()) as f64 * core::f64::consts::PI.ln();
    let mut ln_lambda = n as f64 * params.mu.ln() + (k - 3.0).ln() - 2f64.ln() - pi_pow;
    for i in 1..n {
        let (i_f, n_f) = (i as f64, n as f64);
        let factor = (k - 3.0) / 2.0 - n_f + i_f;
        let a = k + i_f - 2.0;
        let b = k + 2.0 * (i_f - n_f - 1.0);
        for arg in [factor, a, b] {
            if !(arg > 0.0) {
                return Err(Error::GammaPole { argument: arg });
            }
        }
        ln_lambda += factor.ln() + libm::lgamma(a) - libm::lgamma(b);
    }
    Ok(ln_lambda.exp())
}

/// Quadrature settings for [`parseval_check_n1`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParsevalConfig {
    /// Absolute tolerance of each radial integral.
    pub tol: f64,
    pub order: usize,
    pub angular_nodes: usize,
}

impl Default for ParsevalConfig {
    fn default() -> Self {
        ParsevalConfig { tol: 1e-10, order: 10, angular_nodes: 16 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParsevalResult {
    pub value: f64,
    pub error_estimate: f64,
    pub lambda: f64,
}

/// `Λ₁ ∫_{C×D₁} Q K⁻¹ d²z d²w` for `n = 1`; equals 1 when `Λ₁` normalises
/// the constant function.
///
/// At fixed `w` the `z`-integral of `e^{−μF}` is Gaussian: `μF = vᵗAv` for
/// `v = (Re z, Im z)` and it equals `π/√det A`. The disk is integrated in
/// `s = |w|² = 1 − t²` (`d²w = ½ ds dθ = t dt dθ`) by adaptive
/// Gauss–Legendre and in angle by the trapezoid rule; the substitution
/// removes the `(1 − s)^{(k−5)/2}` endpoint singularity for `k ≥ 4`.
pub fn parseval_check_n1(k: f64, mu: f64, cfg: &ParsevalConfig) -> Result<ParsevalResult> {
    let params = MetricParams::new(1, k, mu)?;
    let lambda = normalization_constant(&params)?;
    let adaptive = AdaptiveConfig { order: cfg.order, tol: cfg.tol, ..AdaptiveConfig::default() };
    let mut err_total = 0.0;
    let mut failure = None;
    let mut angular = |theta: f64| {
        let (ct, st) = (theta.cos(), theta.sin());
        let mut radial = |t: f64| {
            let p = t * t;
            let s = 1.0 - p;
            if p <= 0.0 {
                return 0.0;
            }
            let r = s.sqrt();
            let (a, b) = (r * ct, r * st);
            // μF = (μ/P) [(1+a)x² + 2bxy + (1−a)y²]
            let sc = mu / p;
            let det_a = sc * sc * ((1.0 + a) * (1.0 - a) - b * b);
            let z_integral = core::f64::consts::PI / det_a.sqrt();
            let q = p.powi(-3);
            let k_inv_w = p.powf(0.5 * k);
            t * q * k_inv_w * z_integral
        };
        match adaptive_gauss_legendre(&mut radial, 0.0, 1.0, &adaptive) {
            Ok(r) => {
                err_total += r.error;
                r.value
            }
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let integral = periodic_trapezoid(&mut angular, cfg.angular_nodes);
    if let Some(e) = failure {
        return Err(e);
    }
    let h = 2.0 * core::f64::consts::PI / cfg.angular_nodes as f64;
    Ok(ParsevalResult { value: lambda * integral, error_estimate: lambda * err_total * h, lambda })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{sample_jacobi_ball, SiegelBallPoint};
    use crate::linalg::{c, real};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kernel_examples() {
        let p = MetricParams::new(2, 3.0, 1.5).unwrap();
        let o = JacobiBallPoint::origin(2);
        assert!((two_point_kernel(&p, &o, &o).unwrap().k - real(1.0)).norm() < 1e-15);
        let x = vec![c(0.2, 0.1), c(-0.3, 0.4)];
        let y = vec![c(0.5, -0.2), c(0.1, 0.1)];
        let a = JacobiBallPoint::new(x.clone(), SiegelBallPoint::origin(2)).unwrap();
        let b = JacobiBallPoint::new(y.clone(), SiegelBallPoint::origin(2)).unwrap();
        let expected = (crate::linalg::inner(&x, &y) * p.mu).exp();
        assert!((two_point_kernel(&p, &a, &b).unwrap().k - expected).norm() < 1e-14);
        let nz: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        assert!((two_point_kernel(&p, &a, &a).unwrap().k - real((p.mu * nz).exp())).norm() < 1e-14);
    }

    #[test]
    fn diagonal_is_potential_and_hermitian_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 1..=3 {
            let p = MetricParams::new(n, 4.0, 0.7).unwrap();
            for _ in 0..10 {
                let a = sample_jacobi_ball(n, &mut rng, 0.9).unwrap();
                let b = sample_jacobi_ball(n, &mut rng, 0.9).unwrap();
                let f = kahler_potential(&p, &a).unwrap();
                assert!((ln_kernel_diagonal(&p, &a).unwrap() - f).abs() < 1e-12 * (1.0 + f.abs()));
                let kab = two_point_kernel(&p, &a, &b).unwrap().k;
                let kba = two_point_kernel(&p, &b, &a).unwrap().k;
                assert!((kab - kba.conj()).norm() < 1e-10 * kab.norm());
                assert!((epsilon_function(&p, &a).unwrap() - 1.0).abs() < 1e-10);
                let nk = normalized_kernels(&p, &a, &b).unwrap();
                assert!(nk.berezin < 1.0 && nk.diastasis > 0.0);
                let fac = kappa_factorized(&p, &a, &b).unwrap();
                assert!((fac - nk.kappa).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn diastasis_along_w_axis() {
        let k = 5.0;
        let p = MetricParams::new(1, k, 1.0).unwrap();
        let r: f64 = 0.6;
        let a = JacobiBallPoint::origin(1);
        let b = JacobiBallPoint::from_parts(vec![C64::new(0.0, 0.0)], CMatrix::diagonal(&[real(r)])).unwrap();
        let nk = normalized_kernels(&p, &a, &b).unwrap();
        assert!((nk.diastasis + 0.5 * k * (1.0 - r * r).ln()).abs() < 1e-13);
        let same = normalized_kernels(&p, &b, &b).unwrap();
        assert!((same.kappa - real(1.0)).norm() < 1e-13 && same.diastasis.abs() < 1e-13);
    }

    #[test]
    fn branch_ambiguity_is_reported() {
        // Each factor 1 − tλ of det(1 − tWV̄) turns by about −1.33 rad when
        // λ = 0.97 e^{iφ}, cos φ = 0.97, so three of them wind past −π.
        let p = MetricParams::new(3, 2.5, 1.0).unwrap();
        let r = 0.97f64.sqrt();
        let phi = 0.97f64.acos();
        let v = CMatrix::identity(3).scale_re(r);
        let w = CMatrix::identity(3).scale(C64::from_polar(r, phi));
        let a = JacobiBallPoint::from_parts(vec![C64::new(0.0, 0.0); 3], v).unwrap();
        let b = JacobiBallPoint::from_parts(vec![C64::new(0.0, 0.0); 3], w).unwrap();
        let arg = tracked_log_det(a.w(), b.w()).unwrap().im;
        assert!(arg.abs() > core::f64::consts::PI);
        assert!(matches!(two_point_kernel(&p, &a, &b), Err(Error::BranchAmbiguity { .. })));
        let p_int = MetricParams::new(3, 4.0, 1.0).unwrap();
        assert!(two_point_kernel(&p_int, &a, &b).is_ok());
    }

    #[test]
    fn volume_and_normalization() {
        let o = JacobiBallPoint::origin(2);
        assert_eq!(volume_densities(&o), VolumeData { q_ball: 1.0, q_jacobi: 1.0 });
        let b = JacobiBallPoint::from_parts(vec![C64::new(0.0, 0.0)], CMatrix::diagonal(&[real(0.5)])).unwrap();
        assert!((volume_densities(&b).q_jacobi - 0.75f64.powi(-3)).abs() < 1e-13);
        let l = normalization_constant(&MetricParams::new(1, 5.0, 1.0).unwrap()).unwrap();
        let pi = core::f64::consts::PI;
        assert!((l - 1.0 / (pi * pi)).abs() < 1e-15);
        assert!(matches!(normalization_constant(&MetricParams::new(1, 3.0, 1.0).unwrap()), Err(Error::GammaPole { .. })));
        assert!(matches!(normalization_constant(&MetricParams::new(2, 4.0, 1.0).unwrap()), Err(Error::GammaPole { .. })));
        assert!(normalization_constant(&MetricParams::new(2, 8.0, 1.0).unwrap()).unwrap() > 0.0);
    }

    #[test]
    fn parseval_normalizes_the_constant() {
        let cfg = ParsevalConfig::default();
        let v6 = parseval_check_n1(6.0, 1.0, &cfg).unwrap();
        assert!((v6.value - 1.0).abs() < 0.02);
        let a = parseval_check_n1(10.0, 1.0, &cfg).unwrap().value;
        let b = parseval_check_n1(10.0, 2.0, &cfg).unwrap().value;
        assert!((a - b).abs() < 1e-3 * a);
        assert!(matches!(parseval_check_n1(3.0, 1.0, &cfg), Err(Error::GammaPole { .. })));
    }
}
