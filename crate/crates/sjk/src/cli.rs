//! Command-line surface.
//!
//! ```text
//! sjk eval {potential|metric|inverse|det|curvature|kernel|laplacian} --n --k --mu --point FILE [--point2 FILE]
//! sjk transform {cayley|inv-cayley|fc|inv-fc} --point FILE
//! sjk sample {point|group} --domain D --n --seed --radius
//! sjk verify {all|metric|inverse|curvature|laplacian|invariance|cayley|volume|kernels|parseval} --n --k --mu --trials --seed [--tol NAME=X]
//! ```
//!
//! `--point origin` stands for the zero point of the relevant domain. Exit
//! status: 0 success, 1 failed verification, 2 usage or input error, 3 domain
//! error; errors are printed to stderr as `{"error": {"kind", "detail"}}`.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use sjk_core::domains::{sample_point, Domain, JacobiBallPoint, Point, SiegelBallPoint, SiegelUpperPoint};
use sjk_core::groups::{fc_transform, inverse_fc_transform, inverse_partial_cayley, partial_cayley, random_jacobi_c, random_jacobi_r};
use sjk_core::kernels::kernel_eval;
use sjk_core::laplacian::{apply_laplacian, cayley_ball, inverse_cayley_ball, laplacian_coefficients, TestField};
use sjk_core::metric::{curvature, kahler_potential, metric_blocks, metric_det, metric_inverse, MetricParams};
use sjk_core::oracle::fuzz::{select, FuzzConfig, Property, GROUPS};
use sjk_core::oracle::FdConfig;

use crate::error::{CliError, EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAILED};
use crate::json;
use crate::verify;

#[derive(Parser, Debug)]
#[command(name = "sjk", version, about = "Geometry of the Siegel-Jacobi ball: evaluation, transforms, sampling and verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write the result to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Pretty,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a quantity at a point.
    Eval {
        quantity: Quantity,
        #[command(flatten)]
        params: ParamArgs,
        /// Point file, or `origin`.
        #[arg(long)]
        point: String,
        /// Second point for two-point kernels; defaults to the first.
        #[arg(long)]
        point2: Option<String>,
        /// Domain of `--point origin` (laplacian only).
        #[arg(long, default_value = "jacobi_ball", value_parser = parse_domain)]
        domain: Domain,
        /// Test field for the Laplacian: const, lnG, trWWbar, normz2, re_poly(SEED).
        #[arg(long, default_value = "lnG", value_parser = parse_field)]
        field: TestField,
        /// Finite-difference step for the Laplacian.
        #[arg(long, default_value_t = 1e-3)]
        fd_step: f64,
    },
    /// Map a point between domains.
    Transform {
        kind: TransformKind,
        /// Point file, or `origin`.
        #[arg(long)]
        point: String,
        /// Dimension of `--point origin`.
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Draw a seeded random point or group element.
    Sample {
        what: SampleKind,
        #[arg(long, value_parser = parse_domain)]
        domain: Domain,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.9)]
        radius: f64,
        /// Scale of random group elements.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
    /// Run the property suite and report.
    Verify {
        #[arg(value_parser = parse_group)]
        group: String,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Tolerance override `NAME=X` for a property or a whole group; repeatable.
        #[arg(long = "tol")]
        tol: Vec<String>,
    },
}

#[derive(clap::Args, Debug, Clone, Copy)]
pub struct ParamArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub k: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: f64,
}

impl ParamArgs {
    fn params(&self) -> Result<MetricParams, CliError> {
        let p = MetricParams::new(self.n, self.k, self.mu).map_err(|e| CliError::Usage(e.to_string()))?;
        if p.non_integral_weight() {
            eprintln!("warning: 2k = {} is not a positive integer; the formulas are evaluated analytically in k", 2.0 * p.k);
        }
        Ok(p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    Potential,
    Metric,
    Inverse,
    Det,
    Curvature,
    Kernel,
    Laplacian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TransformKind {
    Cayley,
    InvCayley,
    Fc,
    InvFc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SampleKind {
    Point,
    Group,
}

fn parse_domain(s: &str) -> Result<Domain, String> {
    Domain::parse(s).ok_or_else(|| format!("unknown domain {s:?} (ball, jacobi_ball, upper, jacobi_upper)"))
}

fn parse_field(s: &str) -> Result<TestField, String> {
    TestField::parse(s).ok_or_else(|| format!("unknown field {s:?} (const, lnG, trWWbar, normz2, re_poly(SEED))"))
}

fn parse_group(s: &str) -> Result<String, String> {
    if s == "all" || GROUPS.contains(&s) {
        Ok(s.to_string())
    } else {
        Err(format!("unknown group {s:?} (all, {})", GROUPS.join(", ")))
    }
}

/// Parse arguments, run, print, and return the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            let err = CliError::Usage(e.render().to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return EXIT_USAGE;
        }
    };
    match execute(&cli).and_then(|(value, code)| emit(&cli, &value).map(|()| code)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}

fn emit(cli: &Cli, value: &Value) -> Result<(), CliError> {
    let mut text = match cli.format {
        Format::Json => serde_json::to_string(value),
        Format::Pretty => serde_json::to_string_pretty(value),
    }
    .expect("JSON values always serialize");
    text.push('\n');
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|()| out.flush()).map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn read_json(path: &str) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_string(), source })?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{path}: {e}")))
}

fn origin(domain: Domain, n: usize) -> Point {
    match domain {
        Domain::Ball => Point::Ball(SiegelBallPoint::origin(n)),
        Domain::JacobiBall => Point::JacobiBall(JacobiBallPoint::origin(n)),
        Domain::Upper => Point::Upper(SiegelUpperPoint::base_point(n)),
        Domain::JacobiUpper => Point::JacobiUpper(SiegelUpperPoint::base_point(n)),
    }
}

fn load_point(arg: &str, domain: Domain, n: usize) -> Result<Point, CliError> {
    let p = if arg == "origin" { origin(domain, n) } else { json::to_point(&read_json(arg)?)? };
    if p.n() != n {
        return Err(CliError::Input(format!("point has n = {} but --n is {n}", p.n())));
    }
    Ok(p)
}

fn jacobi_ball(p: Point) -> Result<JacobiBallPoint, CliError> {
    match p {
        Point::JacobiBall(p) => Ok(p),
        other => Err(CliError::Input(format!("expected a jacobi_ball point {{\"n\", \"z\", \"W\"}}, found a {} point", other.domain().name()))),
    }
}

fn execute(cli: &Cli) -> Result<(Value, i32), CliError> {
    match &cli.command {
        Command::Eval { quantity, params, point, point2, domain, field, fd_step } => {
            let p = params.params()?;
            let dom = if *quantity == Quantity::Laplacian { *domain } else { Domain::JacobiBall };
            let pt = load_point(point, dom, p.n)?;
            Ok((eval(*quantity, &p, pt, point2.as_deref(), *field, *fd_step)?, EXIT_OK))
        }
        Command::Transform { kind, point, n } => Ok((transform(*kind, point, *n)?, EXIT_OK)),
        Command::Sample { what, domain, n, seed, radius, scale } => {
            if *n == 0 {
                return Err(CliError::Usage("--n must be at least 1".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let v = match what {
                SampleKind::Point => json::point(&sample_point(*domain, *n, &mut rng, *radius)?),
                SampleKind::Group => match domain {
                    Domain::Ball | Domain::JacobiBall => json::group_c(&random_jacobi_c(*n, &mut rng, *scale)),
                    Domain::Upper | Domain::JacobiUpper => json::group_r(&random_jacobi_r(*n, &mut rng, *scale)),
                },
            };
            Ok((v, EXIT_OK))
        }
        Command::Verify { group, params, trials, seed, tol } => {
            let p = params.params()?;
            let mut cfg = FuzzConfig::new(p, *trials, *seed);
            cfg.tol_overrides = parse_tol_overrides(tol)?;
            let props = select(group)?;
            let report = verify::run(&cfg, &props, verify::thread_cap()?)?;
            let code = if report.pass() { EXIT_OK } else { EXIT_VERIFY_FAILED };
            Ok((json::fuzz_report(&cfg, &report), code))
        }
    }
}

fn parse_tol_overrides(items: &[String]) -> Result<Vec<(Property, f64)>, CliError> {
    let mut out = Vec::new();
    for item in items {
        let (name, value) = item.split_once('=').ok_or_else(|| CliError::Usage(format!("--tol expects NAME=X, found {item:?}")))?;
        let value: f64 = value.trim().parse().map_err(|_| CliError::Usage(format!("bad tolerance in {item:?}")))?;
        if !(value >= 0.0) {
            return Err(CliError::Usage(format!("tolerance must be non-negative in {item:?}")));
        }
        let name = name.trim();
        match Property::parse(name) {
            Some(p) => out.push((p, value)),
            None if GROUPS.contains(&name) => out.extend(select(name)?.into_iter().map(|p| (p, value))),
            None => return Err(CliError::Usage(format!("unknown property or group {name:?} in --tol"))),
        }
    }
    Ok(out)
}

fn eval(q: Quantity, p: &MetricParams, pt: Point, point2: Option<&str>, field: TestField, fd_step: f64) -> Result<Value, CliError> {
    if q == Quantity::Laplacian {
        let n = pt.n();
        let f = field.field(p, pt.domain(), n);
        let coeffs = laplacian_coefficients(p, &pt)?;
        let value = apply_laplacian(p, &f, &pt, &FdConfig::with_step(fd_step))?;
        return Ok(json!({
            "field": field.name(),
            "domain": pt.domain().name(),
            "value": json::complex(value),
            "coefficients": json::matrix(&coeffs.c),
        }));
    }
    let pt = jacobi_ball(pt)?;
    Ok(match q {
        Quantity::Potential => json!({"value": json::real(kahler_potential(p, &pt)?)}),
        Quantity::Metric => {
            let m = metric_blocks(p, &pt)?;
            json!({"h1": json::matrix(&m.h1), "h2": json::matrix(&m.h2), "h3": json::matrix(&m.h3), "h4": json::matrix(&m.h4), "h": json::matrix(&m.h)})
        }
        Quantity::Inverse => {
            let m = metric_inverse(p, &pt)?;
            json!({"h1": json::matrix(&m.h1), "h2": json::matrix(&m.h2), "h3": json::matrix(&m.h3), "h4": json::matrix(&m.h4), "h_inv": json::matrix(&m.h_inv)})
        }
        Quantity::Det => {
            let d = metric_det(p, &pt)?;
            json!({"value": json::real(d.value), "closed_form": json::real(d.closed_form), "constant_C": json::real(d.constant_c)})
        }
        Quantity::Curvature => {
            let c = curvature(p, &pt)?;
            json!({
                "scalar_curvature": json::real(c.scalar_curvature),
                "scalar_curvature_contracted": json::real(c.scalar_curvature_contracted),
                "ric": json::matrix(&c.ric),
                "qk_lu": json::matrix(&c.qk_lu),
            })
        }
        Quantity::Kernel => {
            let other = match point2 {
                Some(arg) => jacobi_ball(load_point(arg, Domain::JacobiBall, p.n)?)?,
                None => pt.clone(),
            };
            let k = kernel_eval(p, &pt, &other)?;
            json!({
                "K": json::complex(k.k),
                "kappa": json::complex(k.kappa),
                "berezin": json::real(k.berezin),
                "diastasis": json::real(k.diastasis),
                "epsilon": json::real(k.epsilon),
            })
        }
        Quantity::Laplacian => unreachable!("handled above"),
    })
}

fn transform(kind: TransformKind, arg: &str, n: usize) -> Result<Value, CliError> {
    let load = |default: Domain| -> Result<Point, CliError> {
        if arg == "origin" {
            Ok(origin(default, n))
        } else {
            json::to_point(&read_json(arg)?)
        }
    };
    Ok(match kind {
        TransformKind::Cayley => match load(Domain::JacobiUpper)? {
            Point::JacobiUpper(x) => json::point(&Point::JacobiBall(partial_cayley(&x)?)),
            Point::Upper(x) => json::point(&Point::Ball(cayley_ball(&x)?)),
            other => return Err(wrong_domain("an upper", &other)),
        },
        TransformKind::InvCayley => match load(Domain::JacobiBall)? {
            Point::JacobiBall(x) => json::point(&Point::JacobiUpper(inverse_partial_cayley(&x)?)),
            Point::Ball(x) => json::point(&Point::Upper(inverse_cayley_ball(&x)?)),
            other => return Err(wrong_domain("a ball", &other)),
        },
        TransformKind::Fc => {
            let x = jacobi_ball(load(Domain::JacobiBall)?)?;
            json!({"n": x.n(), "eta": json::vector(&fc_transform(&x)), "W": json::matrix(x.w())})
        }
        TransformKind::InvFc => {
            let (eta, w) = if arg == "origin" {
                (vec![sjk_core::C64::new(0.0, 0.0); n], SiegelBallPoint::origin(n))
            } else {
                let v = read_json(arg)?;
                let eta = v.get("eta").ok_or_else(|| CliError::Input("missing field \"eta\"".into()))?;
                let ball = match json::to_point(&json!({"W": v.get("W").cloned().unwrap_or(Value::Null)}))? {
                    Point::Ball(b) => b,
                    _ => unreachable!("a W-only object decodes to a ball point"),
                };
                (json::to_vector(eta)?, ball)
            };
            json::point(&Point::JacobiBall(inverse_fc_transform(&eta, &w)?))
        }
    })
}

fn wrong_domain(expected: &str, found: &Point) -> CliError {
    CliError::Input(format!("expected {expected} point, found a {} point", found.domain().name()))
}
