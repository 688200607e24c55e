//! Laplace–Beltrami operators on `D_n`, `X_n` and `D^J_n`.
//!
//! An operator is stored as its coefficient matrix `C` over the ordered
//! coordinates of the domain and acts by
//!
//! ```text
//! Δf = Σ_{αβ} C[α][β] ∂²f/∂ζ_β∂ζ̄_α = Tr(C · H_f),    H_f[β][α] = ∂²f/∂ζ_β∂ζ̄_α
//! ```
//!
//! with `H_f` taken from the finite-difference oracle. The coefficients are
//!
//! ```text
//! D_n    C = k_inv,  k_inv[(mn)][(uv)] = ½(N_vn N̄_mu + N_vm N̄_nu)
//! X_n    C[(li)][(mj)] = 4 e_li e_mj Σ Y_ij Y_lm      (sum over the orderings of each pair)
//! D^J_n  C = h⁻¹, assembled from θ, S, N̄ and (2/k) k_inv
//! ```
//!
//! The `X_n` operator is normalized so that the Cayley transform carries it
//! to the `D_n` operator. On `D^J_n`, `Δ ln det h = (2/k) n(n+1)(n+2)/2`.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domains::{complex_gaussian, Domain, JacobiBallPoint, PairIndex, Point, SiegelBallPoint, SiegelUpperPoint};
use crate::error::{Error, Result};
use crate::groups::{inverse_partial_cayley, partial_cayley};
use crate::linalg::{c, real, CMatrix, C64};
use crate::metric::{e_munu, k_inv, ln_metric_det, AuxMatrices, MetricParams};
use crate::oracle::{fd_wirtinger_gradient, fd_wirtinger_hessian, FdConfig, Field};

/// Coefficient matrix of a Laplace–Beltrami operator.
#[derive(Clone, Debug, PartialEq)]
pub struct LaplacianCoefficients {
    pub domain: Domain,
    pub c: CMatrix,
}

impl LaplacianCoefficients {
    /// `Tr(C · H)`.
    pub fn contract(&self, hessian: &CMatrix) -> C64 {
        contract(&self.c, hessian)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.c.min_hermitian_eigenvalue()
    }
}

/// `Σ C[α][β] H[β][α]`.
pub fn contract(c: &CMatrix, hessian: &CMatrix) -> C64 {
    (c * hessian).trace()
}

/// Maass coefficients on `X_n` at `V = X + iY`.
pub fn maass_coefficients(pt: &SiegelUpperPoint) -> CMatrix {
    let y = pt.r();
    let idx = PairIndex::new(pt.n());
    let pairs = idx.pairs();
    CMatrix::from_fn(pairs.len(), pairs.len(), |r, s| {
        let (l0, i0) = pairs[r];
        let (m0, j0) = pairs[s];
        let mut acc = C64::new(0.0, 0.0);
        for (l, i) in crate::metric::orbit(l0, i0) {
            for (m, j) in crate::metric::orbit(m0, j0) {
                acc += y[(i, j)] * y[(l, m)];
            }
        }
        acc * (4.0 * e_munu(l0, i0) * e_munu(m0, j0))
    })
}

/// Coefficients on `D^J_n`:
///
/// ```text
/// C_zz = θ N̄ + (1/k) S̄ Sᵗ
/// C_z(mn) = −(1/k)(S_n N̄_im + S_m N̄_in),   C_(mn)z = conjugate pattern
/// C_(pq)(mn) = (2/k) k_inv
/// ```
pub fn jacobi_ball_coefficients(params: &MetricParams, pt: &JacobiBallPoint) -> CMatrix {
    let n = pt.n();
    let aux = AuxMatrices::new(params, pt);
    let nb = aux.n_mat.conj();
    let s = &aux.s;
    let k = params.k;
    let pairs = PairIndex::new(n);
    let pairs = pairs.pairs();
    let pair_block = k_inv(pt.ball()).scale_re(2.0 / k);
    CMatrix::from_fn(n + pairs.len(), n + pairs.len(), |a, b| match (a < n, b < n) {
        (true, true) => nb[(a, b)] * aux.theta + s[a].conj() * s[b] / k,
        (true, false) => {
            let (mm, nn) = pairs[b - n];
            -(s[nn] * nb[(a, mm)] + s[mm] * nb[(a, nn)]) / k
        }
        (false, true) => {
            let (mm, nn) = pairs[a - n];
            -(s[nn].conj() * nb[(mm, b)] + s[mm].conj() * nb[(nn, b)]) / k
        }
        (false, false) => pair_block[(a - n, b - n)],
    })
}

pub fn laplacian_coefficients(params: &MetricParams, pt: &Point) -> Result<LaplacianCoefficients> {
    let c = match pt {
        Point::Ball(p) => k_inv(p),
        Point::JacobiBall(p) => {
            params.check(p.n())?;
            jacobi_ball_coefficients(params, p)
        }
        Point::Upper(p) => maass_coefficients(p),
        Point::JacobiUpper(_) => {
            return Err(Error::InvalidInput(format!("no Laplacian on the {} domain", Domain::JacobiUpper.name())))
        }
    };
    Ok(LaplacianCoefficients { domain: pt.domain(), c })
}

/// `Δf` at `pt`, with the second derivatives of `f` taken by finite differences.
pub fn apply_laplacian(params: &MetricParams, f: &Field, pt: &Point, cfg: &FdConfig) -> Result<C64> {
    let coeffs = laplacian_coefficients(params, pt)?;
    let h = fd_wirtinger_hessian(f, &pt.coords(), pt.margin(), cfg)?;
    Ok(coeffs.contract(&h))
}

/// Built-in scalar fields, evaluated on coordinates of a domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TestField {
    Const,
    /// Log of the volume density: `ln det h` on `D^J_n`, `−(n+1) ln det N` on
    /// `D_n`, `−(n+1) ln det Y` on `X_n`.
    LnG,
    /// `Tr(W W̄)`, or `Tr(V V̄)` on `X_n`.
    TrWWbar,
    /// `|z|²`, or `|u|²`; zero on domains without a vector part.
    NormZ2,
    /// Real part of a seeded polynomial of degree three in `ζ` and `ζ̄`.
    RePoly(u64),
}

impl TestField {
    pub fn name(&self) -> alloc::string::String {
        match self {
            TestField::Const => "const".into(),
            TestField::LnG => "lnG".into(),
            TestField::TrWWbar => "trWWbar".into(),
            TestField::NormZ2 => "normz2".into(),
            TestField::RePoly(s) => format!("re_poly({s})"),
        }
    }

    pub fn parse(s: &str) -> Option<TestField> {
        match s {
            "const" => Some(TestField::Const),
            "lnG" => Some(TestField::LnG),
            "trWWbar" => Some(TestField::TrWWbar),
            "normz2" => Some(TestField::NormZ2),
            _ => {
                let seed = s.strip_prefix("re_poly(")?.strip_suffix(')')?;
                seed.trim().parse().ok().map(TestField::RePoly)
            }
        }
    }

    /// Value at the point with the given coordinates.
    pub fn eval(&self, params: &MetricParams, domain: Domain, n: usize, coords: &[C64]) -> Result<C64> {
        let pt = Point::from_coords(domain, n, coords)?;
        Ok(real(match self {
            TestField::Const => 1.0,
            TestField::LnG => match &pt {
                Point::JacobiBall(p) => ln_metric_det(params, p)?,
                Point::Ball(p) => -((n + 1) as f64) * p.n_matrix().det().re.ln(),
                Point::Upper(p) | Point::JacobiUpper(p) => -((n + 1) as f64) * p.r().det().re.ln(),
            },
            TestField::TrWWbar => {
                let w = match &pt {
                    Point::JacobiBall(p) => p.w(),
                    Point::Ball(p) => p.w(),
                    Point::Upper(p) | Point::JacobiUpper(p) => p.v(),
                };
                w.frobenius_norm().powi(2)
            }
            TestField::NormZ2 => match &pt {
                Point::JacobiBall(p) => p.z().iter().map(|v| v.norm_sqr()).sum(),
                Point::JacobiUpper(p) => p.u().iter().map(|v| v.norm_sqr()).sum(),
                _ => 0.0,
            },
            TestField::RePoly(seed) => re_poly(*seed, coords),
        }))
    }

    /// The field as an oracle callback on `domain`.
    pub fn field<'a>(&'a self, params: &'a MetricParams, domain: Domain, n: usize) -> impl Fn(&[C64]) -> Result<C64> + 'a {
        move |x: &[C64]| self.eval(params, domain, n, x)
    }
}

/// `Re(Σ a_i ζ_i + Σ b_ij ζ_i ζ̄_j + Σ c_ij ζ_i² ζ̄_j)` with seeded coefficients.
fn re_poly(seed: u64, x: &[C64]) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = x.len();
    let mut acc = C64::new(0.0, 0.0);
    for xi in x {
        acc += complex_gaussian(&mut rng) * xi;
    }
    for i in 0..d {
        for j in 0..d {
            let b = complex_gaussian(&mut rng);
            let cc = complex_gaussian(&mut rng);
            acc += b * x[i] * x[j].conj() + cc * x[i] * x[i] * x[j].conj() * 0.5;
        }
    }
    acc.re
}

/// `max |D_V f − (−i/2)(1 − W) G (1 − W)|` where `D_V[α][β] = e_αβ ∂f/∂v_(αβ)`
/// on `X_n`, `G[λ][γ] = e_λγ ∂(f∘Φ⁻¹)/∂w_(λγ)` on `D_n` and `W = Φ(V)`.
pub fn cayley_chain_rule_check(f: &Field, pt: &SiegelUpperPoint, cfg: &FdConfig) -> Result<f64> {
    let n = pt.n();
    let w = cayley_ball(pt)?;
    let pulled = |y: &[C64]| -> Result<C64> { f(&inverse_cayley_ball(&SiegelBallPoint::from_coords(n, y)?)?.v_coords()) };
    let (dv, _) = fd_wirtinger_gradient(f, &pt.v_coords(), pt.margin(), cfg)?;
    let (dw, _) = fd_wirtinger_gradient(&pulled, &w.coords(), w.margin(), cfg)?;
    let idx = PairIndex::new(n);
    let weighted = |g: &[C64]| CMatrix::from_fn(n, n, |a, b| g[idx.flatten(a.min(b), a.max(b))] * e_munu(a, b));
    let direct = weighted(&dv);
    let one_minus = &CMatrix::identity(n) - w.w();
    let chain = (&(&one_minus * &weighted(&dw)) * &one_minus).scale(c(0.0, -0.5));
    Ok(direct.max_abs_diff(&chain))
}

/// `|Δ_{X_n}(f∘Φ)(V) − Δ_{D_n}(f)(Φ(V))|` for `f` on the pair coordinates of `D_n`.
pub fn laplacian_correspondence_check(f: &Field, pt: &SiegelUpperPoint, cfg: &FdConfig) -> Result<f64> {
    let n = pt.n();
    let params = MetricParams::new(n, 1.0, 1.0)?;
    let composed = |y: &[C64]| -> Result<C64> { f(&cayley_ball(&SiegelUpperPoint::from_v_coords(n, y)?)?.coords()) };
    let upper = apply_laplacian(&params, &composed, &Point::Upper(pt.clone()), cfg)?;
    let ball = apply_laplacian(&params, f, &Point::Ball(cayley_ball(pt)?), cfg)?;
    Ok((upper - ball).norm())
}

/// `W = (V − i)(V + i)⁻¹`.
pub fn cayley_ball(pt: &SiegelUpperPoint) -> Result<SiegelBallPoint> {
    let base = SiegelUpperPoint::new(pt.v().clone(), alloc::vec![C64::new(0.0, 0.0); pt.n()])?;
    Ok(partial_cayley(&base)?.ball().clone())
}

/// `V = i(1 − W)⁻¹(1 + W)`.
pub fn inverse_cayley_ball(w: &SiegelBallPoint) -> Result<SiegelUpperPoint> {
    let zero: Vec<C64> = alloc::vec![C64::new(0.0, 0.0); w.n()];
    inverse_partial_cayley(&JacobiBallPoint::new(zero, w.clone())?)
}
