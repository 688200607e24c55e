use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sjk_core::domains::{sample_jacobi_ball, sample_jacobi_upper, JacobiBallPoint, Point, Domain};
use sjk_core::groups::{
    act_ball, act_upper, compose_jacobi_c, compose_jacobi_r, inverse_partial_cayley, partial_cayley, random_jacobi_c,
    random_jacobi_r, theta,
};
use sjk_core::kernels::{epsilon_function, normalized_kernels, two_point_kernel};
use sjk_core::laplacian::{apply_laplacian, TestField};
use sjk_core::linalg::{max_abs_diff_vec, max_abs_vec, real, CMatrix, C64};
use sjk_core::metric::{kahler_potential, metric_blocks, metric_det, metric_inverse, scalar_curvature, MetricParams};
use sjk_core::oracle::{fd_wirtinger_hessian, FdConfig};

fn params() -> impl Strategy<Value = (usize, f64, f64, u64)> {
    (1usize..=3, 3.5f64..12.0, 0.2f64..4.0, any::<u64>())
}

fn point(n: usize, seed: u64) -> (ChaCha8Rng, JacobiBallPoint) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pt = sample_jacobi_ball(n, &mut rng, 0.9).unwrap();
    (rng, pt)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inverse_and_determinant((n, k, mu, seed) in params()) {
        let p = MetricParams::new(n, k, mu).unwrap();
        let (_, pt) = point(n, seed);
        let h = metric_blocks(&p, &pt).unwrap().h;
        let h_inv = metric_inverse(&p, &pt).unwrap().h_inv;
        prop_assert!((&h * &h_inv).max_abs_diff(&CMatrix::identity(p.dim())) < 1e-9);
        prop_assert!(h.hermitian_defect() < 1e-12 * h.max_abs());
        prop_assert!(h.min_hermitian_eigenvalue() > 0.0);
        let d = metric_det(&p, &pt).unwrap();
        prop_assert!((d.value - d.closed_form).abs() < 1e-9 * d.closed_form);
    }

    #[test]
    fn balanced_kernel((n, k, mu, seed) in params()) {
        let p = MetricParams::new(n, k, mu).unwrap();
        let (mut rng, a) = point(n, seed);
        let b = sample_jacobi_ball(n, &mut rng, 0.9).unwrap();
        prop_assert!((epsilon_function(&p, &a).unwrap() - 1.0).abs() < 1e-10);
        let kab = two_point_kernel(&p, &a, &b).unwrap().k;
        let kba = two_point_kernel(&p, &b, &a).unwrap().k;
        prop_assert!((kab - kba.conj()).norm() < 1e-10 * kab.norm());
        let nk = normalized_kernels(&p, &a, &b).unwrap();
        prop_assert!(nk.berezin < 1.0 && nk.diastasis > 0.0);
    }

    #[test]
    fn ball_action_is_isometric_for_the_kernel((n, k, mu, seed) in params()) {
        let p = MetricParams::new(n, k, mu).unwrap();
        let (mut rng, a) = point(n, seed);
        let b = sample_jacobi_ball(n, &mut rng, 0.9).unwrap();
        let h = random_jacobi_c(n, &mut rng, 0.5);
        let before = normalized_kernels(&p, &a, &b).unwrap().berezin;
        let after = normalized_kernels(&p, &act_ball(&h, &a).unwrap(), &act_ball(&h, &b).unwrap()).unwrap().berezin;
        prop_assert!((before - after).abs() < 1e-9);
    }

    #[test]
    fn group_laws(n in 1usize..=3, seed in any::<u64>()) {
        let (mut rng, pt) = point(n, seed);
        let h1 = random_jacobi_c(n, &mut rng, 1.0);
        let h2 = random_jacobi_c(n, &mut rng, 1.0);
        let a = act_ball(&h1, &act_ball(&h2, &pt).unwrap()).unwrap().coords();
        let b = act_ball(&compose_jacobi_c(&h1, &h2).unwrap(), &pt).unwrap().coords();
        prop_assert!(max_abs_diff_vec(&a, &b) < 1e-9 * max_abs_vec(&b).max(1.0));
        let back = act_ball(&h1.inverse(), &act_ball(&h1, &pt).unwrap()).unwrap().coords();
        prop_assert!(max_abs_diff_vec(&back, &pt.coords()) < 1e-9);
    }

    #[test]
    fn cayley_intertwines_the_actions(n in 1usize..=3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = sample_jacobi_upper(n, &mut rng, 0.9).unwrap();
        let r1 = random_jacobi_r(n, &mut rng, 1.0);
        let r2 = random_jacobi_r(n, &mut rng, 1.0);
        let lhs = partial_cayley(&act_upper(&r1, &x).unwrap()).unwrap().coords();
        let rhs = act_ball(&theta(&r1).unwrap(), &partial_cayley(&x).unwrap()).unwrap().coords();
        prop_assert!(max_abs_diff_vec(&lhs, &rhs) < 1e-10 * max_abs_vec(&rhs).max(1.0));
        let round = inverse_partial_cayley(&partial_cayley(&x).unwrap()).unwrap().coords();
        prop_assert!(max_abs_diff_vec(&round, &x.coords()) < 1e-10 * max_abs_vec(&x.coords()).max(1.0));
        let a = theta(&compose_jacobi_r(&r1, &r2).unwrap()).unwrap();
        let b = compose_jacobi_c(&theta(&r1).unwrap(), &theta(&r2).unwrap()).unwrap();
        prop_assert!(a.g.p().max_abs_diff(b.g.p()) < 1e-10 * b.g.p().max_abs());
        prop_assert!(max_abs_diff_vec(&a.alpha, &b.alpha) < 1e-10 * max_abs_vec(&b.alpha).max(1.0));
    }

    #[test]
    fn coordinates_round_trip(n in 1usize..=3, seed in any::<u64>()) {
        let (_, pt) = point(n, seed);
        let back = Point::from_coords(Domain::JacobiBall, n, &pt.coords()).unwrap();
        prop_assert_eq!(back, Point::JacobiBall(pt));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn finite_difference_metric((n, k, mu, seed) in (1usize..=2, 3.5f64..12.0, 0.2f64..4.0, any::<u64>())) {
        let p = MetricParams::new(n, k, mu).unwrap();
        let (_, pt) = point(n, seed);
        let f = |x: &[C64]| Ok(real(kahler_potential(&p, &JacobiBallPoint::from_coords(n, x)?)?));
        let fd = fd_wirtinger_hessian(&f, &pt.coords(), pt.margin(), &FdConfig::default()).unwrap();
        let closed = metric_blocks(&p, &pt).unwrap().h;
        prop_assert!(fd.max_abs_diff(&closed) < 1e-6 * closed.max_abs());
    }

    #[test]
    fn laplacian_of_ln_g((n, k, mu, seed) in (1usize..=2, 3.5f64..12.0, 0.2f64..4.0, any::<u64>())) {
        let p = MetricParams::new(n, k, mu).unwrap();
        let (_, pt) = point(n, seed);
        let field = TestField::LnG.field(&p, Domain::JacobiBall, n);
        let v = apply_laplacian(&p, &field, &Point::JacobiBall(pt), &FdConfig::with_step(1e-3)).unwrap();
        let s = scalar_curvature(&p);
        prop_assert!((v.re + s).abs() < 1e-5 * s.abs());
    }
}
