//! Finite-difference ground truth.
//!
//! Nothing here calls the closed forms it is used to check. Complex
//! coordinates `ζ_α = x_α + i y_α` are differentiated through their real
//! parts:
//!
//! ```text
//! ∂/∂ζ  = ½(∂_x − i∂_y)        ∂/∂ζ̄ = ½(∂_x + i∂_y)
//! ∂²f/∂ζ_α∂ζ̄_β = ¼[f_{xαxβ} + f_{yαyβ} + i(f_{xαyβ} − f_{yαxβ})]
//! ```
//!
//! Steps are `h_α = step·(1 + |ζ_α|)`, central, optionally refined by one
//! Richardson extrapolation. A stencil whose reach exceeds the distance to
//! the boundary of the domain is refused with [`Error::StepTooLarge`].

pub mod fuzz;

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::domains::{Domain, JacobiBallPoint, PairIndex, SiegelBallPoint};
use crate::error::{Error, Result};
use crate::groups::JacobiElementC;
use crate::linalg::{c, CMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FdScheme {
    Central,
    Richardson,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdConfig {
    /// Base relative step.
    pub step: f64,
    pub scheme: FdScheme,
    /// Holomorphy gate: the `∂/∂ζ̄` block of a Jacobian must stay below
    /// `10·tol·max(1, |J|)`.
    pub tol: f64,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig { step: 1e-4, scheme: FdScheme::Richardson, tol: 1e-8 }
    }
}

impl FdConfig {
    pub fn with_step(step: f64) -> Self {
        FdConfig { step, ..Self::default() }
    }

    fn steps(&self, x: &[C64]) -> Vec<f64> {
        x.iter().map(|v| self.step * (1.0 + v.norm())).collect()
    }

    fn check_reach(&self, reach: f64, margin: f64) -> Result<()> {
        if !(reach < margin) {
            return Err(Error::StepTooLarge { reach, margin });
        }
        Ok(())
    }
}

/// Scalar field on coordinates.
pub type Field<'a> = dyn Fn(&[C64]) -> Result<C64> + 'a;

/// Map between coordinate spaces.
pub type Map<'a> = dyn Fn(&[C64]) -> Result<Vec<C64>> + 'a;

/// Unit step along real direction `r`: coordinate `r/2`, real part if `r` is even.
fn direction(r: usize) -> (usize, C64) {
    (r / 2, if r % 2 == 0 { c(1.0, 0.0) } else { c(0.0, 1.0) })
}

fn shifted(x: &[C64], moves: &[(usize, f64)]) -> Vec<C64> {
    let mut y = x.to_vec();
    for &(r, t) in moves {
        let (i, u) = direction(r);
        y[i] += u * t;
    }
    y
}

/// Real Hessian of `f` in the `2d` real coordinates with steps `h`.
fn real_hessian(f: &Field, x: &[C64], h: &[f64]) -> Result<Vec<Vec<C64>>> {
    let dim = 2 * x.len();
    let hr = |r: usize| h[r / 2];
    let f0 = f(x)?;
    let mut out = vec![vec![C64::zero(); dim]; dim];
    for u in 0..dim {
        let hu = hr(u);
        let fp = f(&shifted(x, &[(u, hu)]))?;
        let fm = f(&shifted(x, &[(u, -hu)]))?;
        out[u][u] = (fp - f0 * 2.0 + fm) / (hu * hu);
        for v in u + 1..dim {
            let hv = hr(v);
            let fpp = f(&shifted(x, &[(u, hu), (v, hv)]))?;
            let fpm = f(&shifted(x, &[(u, hu), (v, -hv)]))?;
            let fmp = f(&shifted(x, &[(u, -hu), (v, hv)]))?;
            let fmm = f(&shifted(x, &[(u, -hu), (v, -hv)]))?;
            let d = (fpp - fpm - fmp + fmm) / (4.0 * hu * hv);
            out[u][v] = d;
            out[v][u] = d;
        }
    }
    Ok(out)
}

/// Real gradient (one column per real direction) of a vector-valued map.
fn real_jacobian(map: &Map, x: &[C64], h: &[f64]) -> Result<Vec<Vec<C64>>> {
    let dim = 2 * x.len();
    let mut cols = Vec::with_capacity(dim);
    for r in 0..dim {
        let hr = h[r / 2];
        let fp = map(&shifted(x, &[(r, hr)]))?;
        let fm = map(&shifted(x, &[(r, -hr)]))?;
        cols.push(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * hr)).collect());
    }
    Ok(cols)
}

fn richardson<T>(cfg: &FdConfig, x: &[C64], eval: impl Fn(&[f64]) -> Result<Vec<Vec<T>>>) -> Result<Vec<Vec<C64>>>
where
    T: Into<C64> + Copy,
{
    let h = cfg.steps(x);
    let coarse = eval(&h)?;
    match cfg.scheme {
        FdScheme::Central => Ok(coarse.iter().map(|row| row.iter().map(|&v| v.into()).collect()).collect()),
        FdScheme::Richardson => {
            let half: Vec<f64> = h.iter().map(|v| 0.5 * v).collect();
            let fine = eval(&half)?;
            Ok(coarse
                .iter()
                .zip(&fine)
                .map(|(rc, rf)| {
                    rc.iter().zip(rf).map(|(&a, &b)| (b.into() * 4.0 - a.into()) / 3.0).collect()
                })
                .collect())
        }
    }
}

fn max_step(cfg: &FdConfig, x: &[C64]) -> f64 {
    cfg.steps(x).into_iter().fold(0.0, f64::max)
}

/// `(∂f/∂ζ, ∂f/∂ζ̄)`.
pub fn fd_wirtinger_gradient(f: &Field, x: &[C64], margin: f64, cfg: &FdConfig) -> Result<(Vec<C64>, Vec<C64>)> {
    cfg.check_reach(max_step(cfg, x), margin)?;
    let wrapped = |y: &[C64]| f(y).map(|v| vec![v]);
    let cols = richardson(cfg, x, |h| real_jacobian(&wrapped, x, h))?;
    let d = x.len();
    let mut holo = Vec::with_capacity(d);
    let mut anti = Vec::with_capacity(d);
    for a in 0..d {
        let (fx, fy) = (cols[2 * a][0], cols[2 * a + 1][0]);
        holo.push((fx - fy * c(0.0, 1.0)) * 0.5);
        anti.push((fx + fy * c(0.0, 1.0)) * 0.5);
    }
    Ok((holo, anti))
}

/// `H[α][β] = ∂²f/∂ζ_α∂ζ̄_β`.
pub fn fd_wirtinger_hessian(f: &Field, x: &[C64], margin: f64, cfg: &FdConfig) -> Result<CMatrix> {
    cfg.check_reach(2.0 * max_step(cfg, x), margin)?;
    let r = richardson(cfg, x, |h| real_hessian(f, x, h))?;
    let d = x.len();
    let i = c(0.0, 1.0);
    Ok(CMatrix::from_fn(d, d, |a, b| {
        let (xa, ya, xb, yb) = (2 * a, 2 * a + 1, 2 * b, 2 * b + 1);
        (r[xa][xb] + r[ya][yb] + i * (r[xa][yb] - r[ya][xb])) * 0.25
    }))
}

/// Holomorphic and anti-holomorphic Jacobian blocks, `∂F_i/∂ζ_j` and `∂F_i/∂ζ̄_j`.
pub fn fd_jacobian_blocks(map: &Map, x: &[C64], margin: f64, cfg: &FdConfig) -> Result<(CMatrix, CMatrix)> {
    cfg.check_reach(max_step(cfg, x), margin)?;
    let cols = richardson(cfg, x, |h| real_jacobian(map, x, h))?;
    let d = x.len();
    let e = cols.first().map_or(0, |col| col.len());
    let i = c(0.0, 1.0);
    let holo = CMatrix::from_fn(e, d, |r, s| (cols[2 * s][r] - cols[2 * s + 1][r] * i) * 0.5);
    let anti = CMatrix::from_fn(e, d, |r, s| (cols[2 * s][r] + cols[2 * s + 1][r] * i) * 0.5);
    Ok((holo, anti))
}

/// `J = ∂F/∂ζ` of a map that must be holomorphic.
pub fn fd_jacobian(map: &Map, x: &[C64], margin: f64, cfg: &FdConfig) -> Result<CMatrix> {
    let (holo, anti) = fd_jacobian_blocks(map, x, margin, cfg)?;
    let defect = anti.max_abs();
    if defect > 10.0 * cfg.tol * holo.max_abs().max(1.0) {
        return Err(Error::NonHolomorphic { defect });
    }
    Ok(holo)
}

/// `| |det J|² Q(h·x)/Q(x) − 1 |` for the action of `h` on `D_n` (`Q = det N^{−(n+1)}`)
/// or on `D^J_n` (`Q = det N^{−(n+2)}`), with `J` the finite-difference Jacobian.
pub fn volume_invariance_check(domain: Domain, h: &JacobiElementC, pt: &JacobiBallPoint, cfg: &FdConfig) -> Result<f64> {
    let n = pt.n();
    // Densities are recomputed here from N directly so the check does not
    // depend on the kernels module.
    let density = |w: &CMatrix, power: i32| -> Result<f64> {
        let nm = &CMatrix::identity(n) - &(w * &w.conj());
        Ok(nm.det().re.powi(-power))
    };
    let (jac, power, image) = match domain {
        Domain::Ball => {
            let map = |y: &[C64]| -> Result<Vec<C64>> {
                let w = SiegelBallPoint::from_coords(n, y)?;
                Ok(h.g.act_ball(&w)?.coords())
            };
            let j = fd_jacobian(&map, &pt.ball().coords(), pt.margin(), cfg)?;
            (j, n as i32 + 1, h.g.act_ball(pt.ball())?.w().clone())
        }
        Domain::JacobiBall => {
            let map = |y: &[C64]| -> Result<Vec<C64>> {
                let p = JacobiBallPoint::from_coords(n, y)?;
                Ok(crate::groups::act_ball(h, &p)?.coords())
            };
            let j = fd_jacobian(&map, &pt.coords(), pt.margin(), cfg)?;
            (j, n as i32 + 2, crate::groups::act_ball(h, pt)?.w().clone())
        }
        other => {
            return Err(Error::InvalidInput(alloc::format!("no volume check for the {} domain", other.name())));
        }
    };
    let det = jac.det().norm_sqr();
    Ok((det * density(&image, power)? / density(pt.w(), power)? - 1.0).abs())
}

/// Pair coordinates of `W` for the ball part of a Jacobi point.
pub fn ball_coords(pt: &JacobiBallPoint) -> Vec<C64> {
    PairIndex::new(pt.n()).matrix_to_coords(pt.w())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::sample_jacobi_ball;
    use crate::groups::{partial_cayley, random_jacobi_c, SymplecticC};
    use crate::linalg::real;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hessian_of_norm_squared() {
        let f = |x: &[C64]| -> Result<C64> { Ok(real(x[0].norm_sqr() + x[1].norm_sqr())) };
        let x = vec![c(0.3, 0.1), c(-0.2, 0.5), c(0.1, 0.1)];
        let h = fd_wirtinger_hessian(&f, &x, 1.0, &FdConfig::default()).unwrap();
        let expected = CMatrix::diagonal(&[real(1.0), real(1.0), real(0.0)]);
        assert!(h.max_abs_diff(&expected) < 1e-8);
    }

    #[test]
    fn pluriharmonic_field_has_zero_mixed_hessian() {
        let f = |x: &[C64]| -> Result<C64> { Ok(real((x[0] * x[0]).re)) };
        let x = vec![c(0.3, 0.1), c(-0.2, 0.5)];
        let h = fd_wirtinger_hessian(&f, &x, 1.0, &FdConfig::default()).unwrap();
        assert!(h.max_abs() < 1e-8);
    }

    #[test]
    fn halving_the_step_converges_at_second_order() {
        let f = |x: &[C64]| -> Result<C64> { Ok(real((x[0].norm_sqr() * x[1].re).exp())) };
        let x = vec![c(0.3, 0.1), c(-0.2, 0.5)];
        let fine = FdConfig { step: 1e-5, ..FdConfig::default() };
        let truth = fd_wirtinger_hessian(&f, &x, 1.0, &fine).unwrap();
        let coarse = |s: f64| {
            let cfg = FdConfig { step: s, scheme: FdScheme::Central, tol: 1e-8 };
            fd_wirtinger_hessian(&f, &x, 1.0, &cfg).unwrap().max_abs_diff(&truth)
        };
        assert!(coarse(2e-2) / coarse(1e-2) >= 3.0);
    }

    #[test]
    fn step_too_large() {
        let f = |x: &[C64]| -> Result<C64> { Ok(x[0]) };
        let r = fd_wirtinger_hessian(&f, &[c(0.0, 0.0)], 1e-5, &FdConfig::default());
        assert!(matches!(r, Err(Error::StepTooLarge { .. })));
    }

    #[test]
    fn jacobian_of_identity_and_holomorphy_gate() {
        let id = |x: &[C64]| -> Result<Vec<C64>> { Ok(x.to_vec()) };
        let x = vec![c(0.3, 0.1), c(-0.2, 0.5)];
        let j = fd_jacobian(&id, &x, 1.0, &FdConfig::default()).unwrap();
        assert!(j.max_abs_diff(&CMatrix::identity(2)) < 1e-10);
        let conj = |x: &[C64]| -> Result<Vec<C64>> { Ok(x.iter().map(|v| v.conj()).collect()) };
        assert!(matches!(fd_jacobian(&conj, &x, 1.0, &FdConfig::default()), Err(Error::NonHolomorphic { .. })));
    }

    #[test]
    fn fc_transform_is_not_holomorphic() {
        let n = 2;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pt = sample_jacobi_ball(n, &mut rng, 0.9).unwrap();
        let w = pt.ball().clone();
        let fc = |y: &[C64]| -> Result<Vec<C64>> {
            Ok(crate::groups::fc_transform(&JacobiBallPoint::new(y.to_vec(), w.clone())?))
        };
        let r = fd_jacobian(&fc, pt.z(), pt.margin(), &FdConfig::default());
        assert!(matches!(r, Err(Error::NonHolomorphic { .. })));
    }

    #[test]
    fn trivial_ball_action_has_identity_jacobian() {
        let n = 2;
        let h = JacobiElementC::identity(n);
        let o = JacobiBallPoint::origin(n);
        let map = |y: &[C64]| -> Result<Vec<C64>> {
            Ok(h.g.act_ball(&SiegelBallPoint::from_coords(n, y)?)?.coords())
        };
        let j = fd_jacobian(&map, &ball_coords(&o), o.margin(), &FdConfig::default()).unwrap();
        assert!(j.max_abs_diff(&CMatrix::identity(3)) < 1e-10);
        assert_eq!(SymplecticC::identity(n), h.g);
    }

    #[test]
    fn cayley_jacobians_are_reciprocal() {
        let n = 2;
        let base = crate::domains::SiegelUpperPoint::base_point(n);
        let fwd = |y: &[C64]| -> Result<Vec<C64>> {
            Ok(partial_cayley(&crate::domains::SiegelUpperPoint::from_coords(n, y)?)?.coords())
        };
        let bwd = |y: &[C64]| -> Result<Vec<C64>> {
            Ok(crate::groups::inverse_partial_cayley(&JacobiBallPoint::from_coords(n, y)?)?.coords())
        };
        let cfg = FdConfig::default();
        let jf = fd_jacobian(&fwd, &base.coords(), base.margin(), &cfg).unwrap();
        let img = partial_cayley(&base).unwrap();
        let jb = fd_jacobian(&bwd, &img.coords(), img.margin(), &cfg).unwrap();
        assert!((jf.det() * jb.det() - real(1.0)).norm() < 1e-8);
    }

    #[test]
    fn volume_is_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let cfg = FdConfig::default();
        let o = JacobiBallPoint::origin(1);
        let id = JacobiElementC::identity(1);
        assert!(volume_invariance_check(Domain::JacobiBall, &id, &o, &cfg).unwrap() < 1e-12);
        for n in 1..=2 {
            let h = random_jacobi_c(n, &mut rng, 1.0);
            let pt = sample_jacobi_ball(n, &mut rng, 0.9).unwrap();
            assert!(volume_invariance_check(Domain::Ball, &h, &pt, &cfg).unwrap() < 1e-6);
            assert!(volume_invariance_check(Domain::JacobiBall, &h, &pt, &cfg).unwrap() < 1e-5);
        }
    }
}
