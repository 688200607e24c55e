//! Seeded property fuzzer.
//!
//! Every property draws its own random points and group elements from a
//! stream seeded by `(master seed, property, trial)`, so a report is
//! reproducible and trials may run in any order. Errors are relative unless
//! noted in [`Property::description`].

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domains::{
    gaussian_vector, sample_ball, sample_jacobi_ball, sample_jacobi_upper, sample_upper, Domain, JacobiBallPoint, Point,
    SiegelBallPoint, SiegelUpperPoint, TangentVector,
};
use crate::error::{Error, Result};
use crate::groups::{
    act_ball, act_upper, compose_jacobi_c, compose_jacobi_r, inverse_partial_cayley, partial_cayley, random_jacobi_c,
    random_jacobi_r, random_symplectic_r, theta,
};
use crate::kernels::{
    epsilon_function, kappa_factorized, normalized_kernels, parseval_check_n1, two_point_kernel, ParsevalConfig,
};
use crate::laplacian::{
    apply_laplacian, cayley_chain_rule_check, contract, laplacian_coefficients, laplacian_correspondence_check,
    maass_coefficients, TestField,
};
use crate::linalg::{max_abs_diff_vec, max_abs_vec, real, CMatrix, C64};
use crate::metric::{
    ds2_jacobi_ball, h_k, k_inv, kahler_potential, ln_metric_det, metric_blocks, metric_det,
    metric_inverse, ricci, scalar_curvature, upper_metric_matrix, MetricParams,
};
use crate::oracle::{
    fd_jacobian, fd_jacobian_blocks, fd_wirtinger_hessian, volume_invariance_check, FdConfig, FdScheme,
};

/// Radius passed to the samplers.
pub const SAMPLE_RADIUS: f64 = 0.9;
/// Scale of random group elements.
pub const GROUP_SCALE: f64 = 1.0;
/// Step for second-derivative oracles on `ln det h` and on composed fields,
/// where rounding dominates at smaller steps.
pub const COARSE_STEP: f64 = 1e-3;

/// A checked property.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    MetricOracle,
    Determinant,
    FdConvergence,
    InverseIdentity,
    PairLemma,
    RicciOracle,
    RicciZBlock,
    ScalarCurvature,
    LaplacianLnG,
    LaplacianCoefficients,
    Ellipticity,
    MetricInvariance,
    LaplacianEquivariance,
    LeftAction,
    HolomorphyGate,
    DiastasisInvariance,
    VolumeInvariance,
    CayleyEquivariance,
    ThetaHomomorphism,
    CayleyRoundTrip,
    ChainRule,
    LaplacianCorrespondence,
    EpsilonBalanced,
    KernelSymmetry,
    BerezinDistinct,
    Parseval,
}

/// Groups selectable from the command line.
pub const GROUPS: [&str; 9] =
    ["metric", "inverse", "curvature", "laplacian", "invariance", "cayley", "volume", "kernels", "parseval"];

impl Property {
    pub const ALL: [Property; 26] = [
        Property::MetricOracle,
        Property::Determinant,
        Property::FdConvergence,
        Property::InverseIdentity,
        Property::PairLemma,
        Property::RicciOracle,
        Property::RicciZBlock,
        Property::ScalarCurvature,
        Property::LaplacianLnG,
        Property::LaplacianCoefficients,
        Property::Ellipticity,
        Property::MetricInvariance,
        Property::LaplacianEquivariance,
        Property::LeftAction,
        Property::HolomorphyGate,
        Property::DiastasisInvariance,
        Property::VolumeInvariance,
        Property::CayleyEquivariance,
        Property::ThetaHomomorphism,
        Property::CayleyRoundTrip,
        Property::ChainRule,
        Property::LaplacianCorrespondence,
        Property::EpsilonBalanced,
        Property::KernelSymmetry,
        Property::BerezinDistinct,
        Property::Parseval,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::MetricOracle => "metric_oracle",
            Property::Determinant => "determinant",
            Property::FdConvergence => "fd_convergence",
            Property::InverseIdentity => "inverse_identity",
            Property::PairLemma => "pair_lemma",
            Property::RicciOracle => "ricci_oracle",
            Property::RicciZBlock => "ricci_z_block",
            Property::ScalarCurvature => "scalar_curvature",
            Property::LaplacianLnG => "laplacian_ln_g",
            Property::LaplacianCoefficients => "laplacian_coefficients",
            Property::Ellipticity => "ellipticity",
            Property::MetricInvariance => "metric_invariance",
            Property::LaplacianEquivariance => "laplacian_equivariance",
            Property::LeftAction => "left_action",
            Property::HolomorphyGate => "holomorphy_gate",
            Property::DiastasisInvariance => "diastasis_invariance",
            Property::VolumeInvariance => "volume_invariance",
            Property::CayleyEquivariance => "cayley_equivariance",
            Property::ThetaHomomorphism => "theta_homomorphism",
            Property::CayleyRoundTrip => "cayley_round_trip",
            Property::ChainRule => "chain_rule",
            Property::LaplacianCorrespondence => "laplacian_correspondence",
            Property::EpsilonBalanced => "epsilon_balanced",
            Property::KernelSymmetry => "kernel_symmetry",
            Property::BerezinDistinct => "berezin_distinct",
            Property::Parseval => "parseval",
        }
    }

    pub fn parse(s: &str) -> Option<Property> {
        Property::ALL.into_iter().find(|p| p.name() == s)
    }

    pub fn group(self) -> &'static str {
        use Property::*;
        match self {
            MetricOracle | Determinant | FdConvergence => "metric",
            InverseIdentity | PairLemma => "inverse",
            RicciOracle | RicciZBlock | ScalarCurvature => "curvature",
            LaplacianLnG | LaplacianCoefficients | Ellipticity => "laplacian",
            MetricInvariance | LaplacianEquivariance | LeftAction | HolomorphyGate | DiastasisInvariance => "invariance",
            VolumeInvariance => "volume",
            CayleyEquivariance | ThetaHomomorphism | CayleyRoundTrip | ChainRule | LaplacianCorrespondence => "cayley",
            EpsilonBalanced | KernelSymmetry | BerezinDistinct => "kernels",
            Parseval => "parseval",
        }
    }

    /// Default tolerance.
    pub fn tolerance(self) -> f64 {
        use Property::*;
        match self {
            MetricOracle => 1e-6,
            Determinant | InverseIdentity | PairLemma => 1e-10,
            FdConvergence => 1.0 / 3.0,
            RicciOracle | ScalarCurvature | LaplacianLnG => 1e-5,
            RicciZBlock => 1e-8,
            LaplacianCoefficients => 1e-12,
            Ellipticity => 0.0,
            MetricInvariance | HolomorphyGate => 1e-7,
            LaplacianEquivariance | VolumeInvariance | ChainRule | LaplacianCorrespondence => 1e-5,
            LeftAction => 1e-9,
            DiastasisInvariance => 1e-8,
            CayleyEquivariance | ThetaHomomorphism | EpsilonBalanced | KernelSymmetry => 1e-10,
            CayleyRoundTrip => 1e-12,
            BerezinDistinct => 1.0 - 1e-12,
            Parseval => 0.02,
        }
    }

    /// Informational properties are reported but never fail a run.
    pub fn informational(self) -> bool {
        self == Property::DiastasisInvariance
    }

    /// Properties whose result does not depend on the trial; they run once.
    pub fn single_shot(self) -> bool {
        self == Property::Parseval
    }

    pub fn description(self) -> &'static str {
        use Property::*;
        match self {
            MetricOracle => "FD Wirtinger Hessian of the potential vs the closed-form metric",
            Determinant => "det of the assembled metric vs the closed form, and the ratio law against the origin",
            FdConvergence => "defect ratio of central FD Hessians at steps 5e-4 and 1e-3",
            InverseIdentity => "max |h h⁻¹ − 1| (absolute)",
            PairLemma => "max |hᵏ k_inv − 1| (absolute)",
            RicciOracle => "−FD Hessian of ln det h vs the closed-form Ricci form",
            RicciZBlock => "z rows and columns of the FD Ricci form, relative to its size",
            ScalarCurvature => "Tr(h⁻¹ Ric_FD) vs −(2/k)n(n+1)(n+2)/2",
            LaplacianLnG => "Δ ln det h vs −s",
            LaplacianCoefficients => "coefficients vs metric inverses (D^J_n: h⁻¹, X_n: 4 g⁻¹)",
            Ellipticity => "1 if some coefficient matrix is not positive definite, else 0",
            MetricInvariance => "ds² at ζ vs ds² at h·ζ of the FD pushforward",
            LaplacianEquivariance => "Δ(f∘g)(ζ) vs (Δf)(g·ζ) on D_n, X_n and D^J_n, relative to max(1, |Δf|)",
            LeftAction => "h₁·(h₂·ζ) vs (h₁h₂)·ζ",
            HolomorphyGate => "∂/∂ζ̄ block of the FD Jacobians of the ball action and the partial Cayley transform",
            DiastasisInvariance => "|D(hζ, hζ′) − D(ζ, ζ′)| (absolute, informational)",
            VolumeInvariance => "| |det J|² Q(h·ζ)/Q(ζ) − 1 | on D_n and D^J_n",
            CayleyEquivariance => "Φ(h·x) vs Θ(h)·Φ(x), relative to max(1, |Φ|)",
            ThetaHomomorphism => "Θ(h₁h₂) vs Θ(h₁)Θ(h₂)",
            CayleyRoundTrip => "Φ⁻¹Φ(x) vs x and ΦΦ⁻¹(ζ) vs ζ",
            ChainRule => "FD D_V f vs the Cayley chain rule, relative to max(1, |D_V f|)",
            LaplacianCorrespondence => "Δ_X(f∘Φ) vs Δ_D(f)∘Φ, relative to max(1, |Δ_D f|)",
            EpsilonBalanced => "|ε − 1| (absolute)",
            KernelSymmetry => "K(ζ,ζ′) vs conj K(ζ′,ζ), κ, b, D on the diagonal, κ by two routes",
            BerezinDistinct => "b(ζ, ζ′) for distinct points; must stay below 1",
            Parseval => "|Λ₁ ∫ Q K⁻¹ − 1| for n = 1 at the given k and μ (absolute)",
        }
    }
}

/// Deliberate defects used as negative controls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Corruption {
    /// Multiply the pair block of `h` by the factor before checking the inverse.
    ScaleH4(f64),
    /// Transpose `hᵏ` before checking the pair-block identity.
    TransposeH4,
    /// Use `−C` in the Laplacian.
    FlipLaplacianSign,
    /// Use `Cᵗ` in the Laplacian.
    TransposeLaplacian,
}

/// Inputs of a fuzz run.
#[derive(Clone, Debug)]
pub struct FuzzConfig {
    pub params: MetricParams,
    pub trials: usize,
    pub seed: u64,
    pub tol_overrides: Vec<(Property, f64)>,
    pub corruption: Option<Corruption>,
}

impl FuzzConfig {
    pub fn new(params: MetricParams, trials: usize, seed: u64) -> Self {
        FuzzConfig { params, trials, seed, tol_overrides: Vec::new(), corruption: None }
    }

    pub fn tolerance(&self, p: Property) -> f64 {
        self.tol_overrides.iter().rev().find(|(q, _)| *q == p).map_or(p.tolerance(), |&(_, t)| t)
    }
}

/// Result of one trial.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    pub seed: u64,
    /// Error measure; infinite when the trial failed with an error.
    pub error: f64,
    pub point: Option<Point>,
    pub failure: Option<String>,
}

/// Aggregated result for one property.
#[derive(Clone, Debug, PartialEq)]
pub struct PropertyReport {
    pub property: Property,
    pub trials: usize,
    pub max_error: f64,
    pub tol: f64,
    pub pass: bool,
    pub informational: bool,
    /// Trial with the largest error.
    pub worst: Option<TrialOutcome>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FuzzReport {
    pub params: MetricParams,
    pub seed: u64,
    pub properties: Vec<PropertyReport>,
}

impl FuzzReport {
    pub fn pass(&self) -> bool {
        self.properties.iter().all(|p| p.pass || p.informational)
    }

    pub fn get(&self, p: Property) -> Option<&PropertyReport> {
        self.properties.iter().find(|r| r.property == p)
    }
}

/// SplitMix64 finalizer.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of trial `trial` of `property` under `master`.
pub fn trial_seed(master: u64, property: Property, trial: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ property as u64) ^ trial as u64)
}

/// Properties in the named group, or all of them for `"all"`.
pub fn select(group: &str) -> Result<Vec<Property>> {
    if group == "all" {
        return Ok(Property::ALL.to_vec());
    }
    if !GROUPS.contains(&group) {
        return Err(Error::InvalidInput(format!("unknown verification group {group:?}")));
    }
    Ok(Property::ALL.into_iter().filter(|p| p.group() == group).collect())
}

/// Number of trials actually run for `p`.
pub fn trial_count(cfg: &FuzzConfig, p: Property) -> usize {
    if p.single_shot() {
        cfg.trials.min(1)
    } else {
        cfg.trials
    }
}

pub fn run_trial(cfg: &FuzzConfig, p: Property, trial: usize) -> TrialOutcome {
    let seed = trial_seed(cfg.seed, p, trial);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match trial_error(cfg, p, &mut rng) {
        Ok((error, point)) => TrialOutcome { seed, error, point, failure: None },
        Err(e) => TrialOutcome { seed, error: f64::INFINITY, point: None, failure: Some(e.to_string()) },
    }
}

/// Combine trial outcomes, in trial order, into a report.
pub fn aggregate(cfg: &FuzzConfig, p: Property, outcomes: Vec<TrialOutcome>) -> PropertyReport {
    let tol = cfg.tolerance(p);
    let trials = outcomes.len();
    let mut worst: Option<TrialOutcome> = None;
    for o in outcomes {
        // NaN counts as the worst possible error
        let e = if o.error.is_nan() { f64::INFINITY } else { o.error };
        if worst.as_ref().map_or(true, |w| e > w.error) {
            worst = Some(TrialOutcome { error: e, ..o });
        }
    }
    let max_error = worst.as_ref().map_or(0.0, |w| w.error);
    PropertyReport { property: p, trials, max_error, tol, pass: max_error <= tol, informational: p.informational(), worst }
}

pub fn run_property(cfg: &FuzzConfig, p: Property) -> PropertyReport {
    let outcomes = (0..trial_count(cfg, p)).map(|t| run_trial(cfg, p, t)).collect();
    aggregate(cfg, p, outcomes)
}

/// Run the given properties sequentially.
pub fn fuzz(cfg: &FuzzConfig, properties: &[Property]) -> FuzzReport {
    FuzzReport { params: cfg.params, seed: cfg.seed, properties: properties.iter().map(|&p| run_property(cfg, p)).collect() }
}

pub fn fuzz_all(cfg: &FuzzConfig) -> FuzzReport {
    fuzz(cfg, &Property::ALL)
}

fn rel(err: f64, scale: f64) -> f64 {
    err / scale.max(f64::MIN_POSITIVE)
}

fn rel_floor(err: f64, scale: f64) -> f64 {
    err / scale.max(1.0)
}

fn rel_matrix(a: &CMatrix, b: &CMatrix) -> f64 {
    rel(a.max_abs_diff(b), b.max_abs())
}

fn jacobi_field<'a>(params: &'a MetricParams, n: usize, f: impl Fn(&MetricParams, &JacobiBallPoint) -> Result<f64> + 'a) -> impl Fn(&[C64]) -> Result<C64> + 'a {
    move |x: &[C64]| Ok(real(f(params, &JacobiBallPoint::from_coords(n, x)?)?))
}

fn laplacian_with(cfg: &FuzzConfig, c: &CMatrix, h: &CMatrix) -> C64 {
    match cfg.corruption {
        Some(Corruption::FlipLaplacianSign) => -contract(c, h),
        Some(Corruption::TransposeLaplacian) => contract(&c.transpose(), h),
        _ => contract(c, h),
    }
}

fn trial_error(cfg: &FuzzConfig, p: Property, rng: &mut ChaCha8Rng) -> Result<(f64, Option<Point>)> {
    use Property::*;
    let params = &cfg.params;
    let n = params.n;
    let fd = FdConfig::default();
    let curv = FdConfig::with_step(COARSE_STEP);
    let jpoint = |rng: &mut ChaCha8Rng| sample_jacobi_ball(n, rng, SAMPLE_RADIUS);
    match p {
        MetricOracle => {
            let pt = jpoint(rng)?;
            let f = jacobi_field(params, n, kahler_potential);
            let h = fd_wirtinger_hessian(&f, &pt.coords(), pt.margin(), &fd)?;
            let closed = metric_blocks(params, &pt)?.h;
            Ok((rel_matrix(&h, &closed), Some(Point::JacobiBall(pt))))
        }
        Determinant => {
            let pt = jpoint(rng)?;
            let d = metric_det(params, &pt)?;
            let e1 = rel((d.value - d.closed_form).abs(), d.closed_form.abs());
            let origin = metric_det(params, &JacobiBallPoint::origin(n))?.value;
            let ratio = d.value / origin;
            let law = pt.ball().n_matrix().det().re.powi(-(n as i32 + 2));
            let e2 = rel((ratio - law).abs(), law);
            Ok((e1.max(e2), Some(Point::JacobiBall(pt))))
        }
        FdConvergence => {
            let pt = jpoint(rng)?;
            let f = jacobi_field(params, n, kahler_potential);
            let closed = metric_blocks(params, &pt)?.h;
            let defect = |step: f64| -> Result<f64> {
                let c = FdConfig { step, scheme: FdScheme::Central, tol: fd.tol };
                Ok(fd_wirtinger_hessian(&f, &pt.coords(), pt.margin(), &c)?.max_abs_diff(&closed))
            };
            Ok((rel(defect(5e-4)?, defect(1e-3)?), Some(Point::JacobiBall(pt))))
        }
        InverseIdentity => {
            let pt = jpoint(rng)?;
            let mut h = metric_blocks(params, &pt)?.h;
            if let Some(Corruption::ScaleH4(s)) = cfg.corruption {
                h = CMatrix::from_fn(h.rows(), h.cols(), |a, b| if a >= n && b >= n { h[(a, b)] * s } else { h[(a, b)] });
            }
            let h_inv = metric_inverse(params, &pt)?.h_inv;
            let e = (&h * &h_inv).max_abs_diff(&CMatrix::identity(params.dim()));
            Ok((e, Some(Point::JacobiBall(pt))))
        }
        PairLemma => {
            let ball = sample_ball(n, rng, SAMPLE_RADIUS)?;
            let mut hk = h_k(&ball);
            if cfg.corruption == Some(Corruption::TransposeH4) {
                hk = hk.transpose();
            }
            let e = (&hk * &k_inv(&ball)).max_abs_diff(&CMatrix::identity(params.pair_dim()));
            Ok((e, Some(Point::Ball(ball))))
        }
        RicciOracle | RicciZBlock | ScalarCurvature => {
            let pt = jpoint(rng)?;
            let f = jacobi_field(params, n, ln_metric_det);
            let ric = fd_wirtinger_hessian(&f, &pt.coords(), pt.margin(), &curv)?.scale_re(-1.0);
            let e = match p {
                RicciOracle => rel_matrix(&ric, &ricci(params, &pt)?),
                RicciZBlock => {
                    let d = params.dim();
                    let mut m: f64 = 0.0;
                    for a in 0..d {
                        for b in 0..d {
                            if a < n || b < n {
                                m = m.max(ric[(a, b)].norm());
                            }
                        }
                    }
                    rel(m, ric.max_abs())
                }
                _ => {
                    let s = (&metric_inverse(params, &pt)?.h_inv * &ric).trace().re;
                    let exact = scalar_curvature(params);
                    rel((s - exact).abs(), exact.abs())
                }
            };
            Ok((e, Some(Point::JacobiBall(pt))))
        }
        LaplacianLnG => {
            let pt = jpoint(rng)?;
            let f = jacobi_field(params, n, ln_metric_det);
            let h = fd_wirtinger_hessian(&f, &pt.coords(), pt.margin(), &curv)?;
            let c = laplacian_coefficients(params, &Point::JacobiBall(pt.clone()))?.c;
            let v = laplacian_with(cfg, &c, &h);
            let expected = -scalar_curvature(params);
            Ok((rel((v - real(expected)).norm(), expected.abs()), Some(Point::JacobiBall(pt))))
        }
        LaplacianCoefficients => {
            let pt = jpoint(rng)?;
            let c = laplacian_coefficients(params, &Point::JacobiBall(pt.clone()))?.c;
            let e1 = rel_matrix(&c, &metric_inverse(params, &pt)?.h_inv);
            let up = sample_upper(n, rng, SAMPLE_RADIUS)?;
            let g = upper_metric_matrix(&up)?.inverse()?.scale_re(4.0);
            let e2 = rel_matrix(&maass_coefficients(&up), &g);
            Ok((e1.max(e2), Some(Point::JacobiBall(pt))))
        }
        Ellipticity => {
            let pts = [
                Point::JacobiBall(jpoint(rng)?),
                Point::Ball(sample_ball(n, rng, SAMPLE_RADIUS)?),
                Point::Upper(sample_upper(n, rng, SAMPLE_RADIUS)?),
            ];
            for pt in pts {
                if !(laplacian_coefficients(params, &pt)?.min_eigenvalue() > 0.0) {
                    return Ok((1.0, Some(pt)));
                }
            }
            Ok((0.0, None))
        }
        MetricInvariance => {
            let pt = jpoint(rng)?;
            let h = random_jacobi_c(n, rng, GROUP_SCALE);
            let v = TangentVector::from_flat(n, &gaussian_vector(params.dim(), rng))?;
            let map = |y: &[C64]| -> Result<Vec<C64>> { Ok(act_ball(&h, &JacobiBallPoint::from_coords(n, y)?)?.coords()) };
            let j = fd_jacobian(&map, &pt.coords(), pt.margin(), &fd)?;
            let pushed = TangentVector::from_flat(n, &j.mul_vec(&v.flatten()))?;
            let before = ds2_jacobi_ball(params, &pt, &v)?;
            let after = ds2_jacobi_ball(params, &act_ball(&h, &pt)?, &pushed)?;
            Ok((rel((after - before).abs(), before.abs()), Some(Point::JacobiBall(pt))))
        }
        LaplacianEquivariance => laplacian_equivariance(params, rng, &curv),
        LeftAction => {
            let pt = jpoint(rng)?;
            let h1 = random_jacobi_c(n, rng, GROUP_SCALE);
            let h2 = random_jacobi_c(n, rng, GROUP_SCALE);
            let a = act_ball(&h1, &act_ball(&h2, &pt)?)?.coords();
            let b = act_ball(&compose_jacobi_c(&h1, &h2)?, &pt)?.coords();
            let e1 = rel(max_abs_diff_vec(&a, &b), max_abs_vec(&b));
            let up = sample_jacobi_upper(n, rng, SAMPLE_RADIUS)?;
            let r1 = random_jacobi_r(n, rng, GROUP_SCALE);
            let r2 = random_jacobi_r(n, rng, GROUP_SCALE);
            let a = act_upper(&r1, &act_upper(&r2, &up)?)?.coords();
            let b = act_upper(&compose_jacobi_r(&r1, &r2)?, &up)?.coords();
            let e2 = rel(max_abs_diff_vec(&a, &b), max_abs_vec(&b));
            Ok((e1.max(e2), Some(Point::JacobiBall(pt))))
        }
        HolomorphyGate => {
            let pt = jpoint(rng)?;
            let h = random_jacobi_c(n, rng, GROUP_SCALE);
            let map = |y: &[C64]| -> Result<Vec<C64>> { Ok(act_ball(&h, &JacobiBallPoint::from_coords(n, y)?)?.coords()) };
            let (holo, anti) = fd_jacobian_blocks(&map, &pt.coords(), pt.margin(), &fd)?;
            let e1 = rel_floor(anti.max_abs(), holo.max_abs());
            let up = sample_jacobi_upper(n, rng, SAMPLE_RADIUS)?;
            let cay = |y: &[C64]| -> Result<Vec<C64>> { Ok(partial_cayley(&SiegelUpperPoint::from_coords(n, y)?)?.coords()) };
            let (holo, anti) = fd_jacobian_blocks(&cay, &up.coords(), up.margin(), &fd)?;
            let e2 = rel_floor(anti.max_abs(), holo.max_abs());
            Ok((e1.max(e2), Some(Point::JacobiBall(pt))))
        }
        DiastasisInvariance => {
            let a = jpoint(rng)?;
            let b = jpoint(rng)?;
            let h = random_jacobi_c(n, rng, GROUP_SCALE);
            let d0 = normalized_kernels(params, &a, &b)?.diastasis;
            let d1 = normalized_kernels(params, &act_ball(&h, &a)?, &act_ball(&h, &b)?)?.diastasis;
            Ok(((d1 - d0).abs(), Some(Point::JacobiBall(a))))
        }
        VolumeInvariance => {
            let pt = jpoint(rng)?;
            let h = random_jacobi_c(n, rng, GROUP_SCALE);
            let e1 = volume_invariance_check(Domain::Ball, &h, &pt, &fd)?;
            let e2 = volume_invariance_check(Domain::JacobiBall, &h, &pt, &fd)?;
            Ok((e1.max(e2), Some(Point::JacobiBall(pt))))
        }
        CayleyEquivariance => {
            let up = sample_jacobi_upper(n, rng, SAMPLE_RADIUS)?;
            let h = random_jacobi_r(n, rng, GROUP_SCALE);
            let a = partial_cayley(&act_upper(&h, &up)?)?.coords();
            let b = act_ball(&theta(&h)?, &partial_cayley(&up)?)?.coords();
            Ok((rel_floor(max_abs_diff_vec(&a, &b), max_abs_vec(&b)), Some(Point::JacobiUpper(up))))
        }
        ThetaHomomorphism => {
            let h1 = random_jacobi_r(n, rng, GROUP_SCALE);
            let h2 = random_jacobi_r(n, rng, GROUP_SCALE);
            let a = theta(&compose_jacobi_r(&h1, &h2)?)?;
            let b = compose_jacobi_c(&theta(&h1)?, &theta(&h2)?)?;
            let scale = b.g.p().max_abs().max(b.g.q().max_abs()).max(max_abs_vec(&b.alpha)).max(b.t.abs());
            let e = a
                .g
                .p()
                .max_abs_diff(b.g.p())
                .max(a.g.q().max_abs_diff(b.g.q()))
                .max(max_abs_diff_vec(&a.alpha, &b.alpha))
                .max((a.t - b.t).abs());
            Ok((rel_floor(e, scale), None))
        }
        CayleyRoundTrip => {
            let up = sample_jacobi_upper(n, rng, SAMPLE_RADIUS)?;
            let back = inverse_partial_cayley(&partial_cayley(&up)?)?.coords();
            let e1 = rel_floor(max_abs_diff_vec(&back, &up.coords()), max_abs_vec(&up.coords()));
            let pt = jpoint(rng)?;
            let fwd = partial_cayley(&inverse_partial_cayley(&pt)?)?.coords();
            let e2 = rel_floor(max_abs_diff_vec(&fwd, &pt.coords()), max_abs_vec(&pt.coords()));
            Ok((e1.max(e2), Some(Point::JacobiUpper(up))))
        }
        ChainRule => {
            let up = sample_upper(n, rng, SAMPLE_RADIUS)?;
            let field = TestField::RePoly(rng_u64(rng));
            let f = field.field(params, Domain::Upper, n);
            let e = cayley_chain_rule_check(&f, &up, &fd)?;
            Ok((e, Some(Point::Upper(up))))
        }
        LaplacianCorrespondence => {
            let up = sample_upper(n, rng, SAMPLE_RADIUS)?;
            let field = TestField::RePoly(rng_u64(rng));
            let f = field.field(params, Domain::Ball, n);
            let e = laplacian_correspondence_check(&f, &up, &curv)?;
            Ok((e, Some(Point::Upper(up))))
        }
        EpsilonBalanced => {
            let pt = jpoint(rng)?;
            Ok(((epsilon_function(params, &pt)? - 1.0).abs(), Some(Point::JacobiBall(pt))))
        }
        KernelSymmetry => {
            let a = jpoint(rng)?;
            let b = jpoint(rng)?;
            let kab = two_point_kernel(params, &a, &b)?;
            let kba = two_point_kernel(params, &b, &a)?;
            let mut e = rel((kab.k - kba.k.conj()).norm(), kab.k.norm());
            let diag = normalized_kernels(params, &a, &a)?;
            e = e.max((diag.kappa - real(1.0)).norm()).max((diag.berezin - 1.0).abs()).max(diag.diastasis.abs());
            let nk = normalized_kernels(params, &a, &b)?;
            e = e.max(rel((kappa_factorized(params, &a, &b)? - nk.kappa).norm(), nk.kappa.norm()));
            e = e.max((nk.diastasis + nk.berezin.ln()).abs());
            Ok((e, Some(Point::JacobiBall(a))))
        }
        BerezinDistinct => {
            let a = jpoint(rng)?;
            let b = jpoint(rng)?;
            Ok((normalized_kernels(params, &a, &b)?.berezin, Some(Point::JacobiBall(a))))
        }
        Parseval => {
            let r = parseval_check_n1(params.k, params.mu, &ParsevalConfig::default())?;
            Ok(((r.value - 1.0).abs(), None))
        }
    }
}

fn rng_u64(rng: &mut ChaCha8Rng) -> u64 {
    use rand::RngCore;
    rng.next_u64()
}

/// Max over `D_n`, `X_n` and `D^J_n` of `|Δ(f∘g)(ζ) − (Δf)(g·ζ)| / max(1, |(Δf)(g·ζ)|)`.
fn laplacian_equivariance(params: &MetricParams, rng: &mut ChaCha8Rng, fd: &FdConfig) -> Result<(f64, Option<Point>)> {
    let n = params.n;
    let field = TestField::RePoly(rng_u64(rng));
    let compare = |a: C64, b: C64| rel_floor((a - b).norm(), b.norm());

    let pt = sample_jacobi_ball(n, rng, SAMPLE_RADIUS)?;
    let h = random_jacobi_c(n, rng, GROUP_SCALE);
    let f = field.field(params, Domain::JacobiBall, n);
    let composed = |y: &[C64]| f(&act_ball(&h, &JacobiBallPoint::from_coords(n, y)?)?.coords());
    let lhs = apply_laplacian(params, &composed, &Point::JacobiBall(pt.clone()), fd)?;
    let rhs = apply_laplacian(params, &f, &Point::JacobiBall(act_ball(&h, &pt)?), fd)?;
    let e1 = compare(lhs, rhs);

    let ball = sample_ball(n, rng, SAMPLE_RADIUS)?;
    let f = field.field(params, Domain::Ball, n);
    let composed = |y: &[C64]| f(&h.g.act_ball(&SiegelBallPoint::from_coords(n, y)?)?.coords());
    let lhs = apply_laplacian(params, &composed, &Point::Ball(ball.clone()), fd)?;
    let rhs = apply_laplacian(params, &f, &Point::Ball(h.g.act_ball(&ball)?), fd)?;
    let e2 = compare(lhs, rhs);

    let up = sample_upper(n, rng, SAMPLE_RADIUS)?;
    let g = random_symplectic_r(n, rng, GROUP_SCALE);
    let f = field.field(params, Domain::Upper, n);
    let act = |v: &SiegelUpperPoint| -> Result<SiegelUpperPoint> {
        SiegelUpperPoint::new(g.act_upper(v.v())?, vec![C64::new(0.0, 0.0); n])
    };
    let composed = |y: &[C64]| f(&act(&SiegelUpperPoint::from_v_coords(n, y)?)?.v_coords());
    let lhs = apply_laplacian(params, &composed, &Point::Upper(up.clone()), fd)?;
    let rhs = apply_laplacian(params, &f, &Point::Upper(act(&up)?), fd)?;
    let e3 = compare(lhs, rhs);

    Ok((e1.max(e2).max(e3), Some(Point::JacobiBall(pt))))
}
