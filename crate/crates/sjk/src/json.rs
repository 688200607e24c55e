//! JSON encoding of points, group elements and results.
//!
//! ```text
//! complex      [re, im]
//! matrix       row-major array of rows
//! D^J_n point  {"n": n, "z": [...], "W": [[...]]}
//! D_n point    {"n": n, "W": [[...]]}
//! X^J_n point  {"n": n, "V": [[...]], "u": [...]}
//! X_n point    {"n": n, "V": [[...]]}
//! G^J_n (C)    {"p": M, "q": M, "alpha": V, "t": x}
//! G^J_n (R)    {"a": M, "b": M, "c": M, "d": M, "lambda": V, "mu": V, "k": x}   (real entries)
//! ```
//!
//! Floats are written in shortest round-trip form, so decoding an encoded
//! value is bit-exact.

use serde_json::{json, Map, Number, Value};

use sjk_core::domains::{JacobiBallPoint, Point, SiegelBallPoint, SiegelUpperPoint};
use sjk_core::groups::{JacobiElementC, JacobiElementR, SymplecticC, SymplecticR};
use sjk_core::linalg::{c, CMatrix, C64};
use sjk_core::oracle::fuzz::{FuzzConfig, FuzzReport, PropertyReport, TrialOutcome};

use crate::error::CliError;

pub fn real(x: f64) -> Value {
    Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn complex(z: C64) -> Value {
    json!([real(z.re), real(z.im)])
}

pub fn vector(v: &[C64]) -> Value {
    Value::Array(v.iter().map(|&z| complex(z)).collect())
}

pub fn matrix(m: &CMatrix) -> Value {
    Value::Array((0..m.rows()).map(|r| vector(m.row(r))).collect())
}

fn real_vector(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| real(x)).collect())
}

fn real_matrix(m: &CMatrix) -> Value {
    Value::Array((0..m.rows()).map(|r| real_vector(&m.row(r).iter().map(|z| z.re).collect::<Vec<_>>())).collect())
}

pub fn point(p: &Point) -> Value {
    match p {
        Point::JacobiBall(p) => json!({"n": p.n(), "z": vector(p.z()), "W": matrix(p.w())}),
        Point::Ball(p) => json!({"n": p.n(), "W": matrix(p.w())}),
        Point::JacobiUpper(p) => json!({"n": p.n(), "V": matrix(p.v()), "u": vector(p.u())}),
        Point::Upper(p) => json!({"n": p.n(), "V": matrix(p.v())}),
    }
}

pub fn group_c(h: &JacobiElementC) -> Value {
    json!({"p": matrix(h.g.p()), "q": matrix(h.g.q()), "alpha": vector(&h.alpha), "t": real(h.t)})
}

pub fn group_r(h: &JacobiElementR) -> Value {
    json!({
        "a": real_matrix(h.g.a()),
        "b": real_matrix(h.g.b()),
        "c": real_matrix(h.g.c()),
        "d": real_matrix(h.g.d()),
        "lambda": real_vector(h.lambda()),
        "mu": real_vector(h.mu()),
        "k": real(h.k_center),
    })
}

fn bad(detail: impl Into<String>) -> CliError {
    CliError::Input(detail.into())
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value, CliError> {
    obj.get(key).ok_or_else(|| bad(format!("missing field {key:?}")))
}

pub fn to_f64(v: &Value) -> Result<f64, CliError> {
    v.as_f64().ok_or_else(|| bad(format!("expected a number, found {v}")))
}

/// `[re, im]`, or a bare number for a real value.
pub fn to_complex(v: &Value) -> Result<C64, CliError> {
    match v {
        Value::Array(a) if a.len() == 2 => Ok(c(to_f64(&a[0])?, to_f64(&a[1])?)),
        Value::Number(_) => Ok(c(to_f64(v)?, 0.0)),
        _ => Err(bad(format!("expected [re, im], found {v}"))),
    }
}

pub fn to_vector(v: &Value) -> Result<Vec<C64>, CliError> {
    v.as_array().ok_or_else(|| bad("expected an array"))?.iter().map(to_complex).collect()
}

pub fn to_matrix(v: &Value) -> Result<CMatrix, CliError> {
    let rows: Vec<Vec<C64>> = v.as_array().ok_or_else(|| bad("expected a matrix"))?.iter().map(to_vector).collect::<Result<_, _>>()?;
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(bad("matrix rows have different lengths"));
    }
    Ok(CMatrix::from_rows(&rows))
}

fn to_real_vector(v: &Value) -> Result<Vec<f64>, CliError> {
    v.as_array().ok_or_else(|| bad("expected an array"))?.iter().map(to_f64).collect()
}

fn square(m: CMatrix, n: usize, name: &str) -> Result<CMatrix, CliError> {
    if m.rows() != n || m.cols() != n {
        return Err(bad(format!("{name} must be {n}×{n}, found {}×{}", m.rows(), m.cols())));
    }
    Ok(m)
}

fn check_n(obj: &Map<String, Value>, n: usize) -> Result<(), CliError> {
    if let Some(v) = obj.get("n") {
        let declared = v.as_u64().ok_or_else(|| bad("\"n\" must be a non-negative integer"))?;
        if declared as usize != n {
            return Err(bad(format!("\"n\" is {declared} but the matrix is {n}×{n}")));
        }
    }
    Ok(())
}

/// Decode a point; the domain follows from the keys present.
pub fn to_point(v: &Value) -> Result<Point, CliError> {
    let obj = v.as_object().ok_or_else(|| bad("a point must be a JSON object"))?;
    if let Some(w) = obj.get("W") {
        let w = to_matrix(w)?;
        let n = w.rows();
        let w = square(w, n, "W")?;
        check_n(obj, n)?;
        let ball = SiegelBallPoint::new(w)?;
        return match obj.get("z") {
            Some(z) => Ok(Point::JacobiBall(JacobiBallPoint::new(to_vector(z)?, ball)?)),
            None => Ok(Point::Ball(ball)),
        };
    }
    if let Some(vm) = obj.get("V") {
        let vm = to_matrix(vm)?;
        let n = vm.rows();
        let vm = square(vm, n, "V")?;
        check_n(obj, n)?;
        return match obj.get("u") {
            Some(u) => Ok(Point::JacobiUpper(SiegelUpperPoint::new(vm, to_vector(u)?)?)),
            None => Ok(Point::Upper(SiegelUpperPoint::new(vm, vec![C64::new(0.0, 0.0); n])?)),
        };
    }
    Err(bad("a point needs a \"W\" or a \"V\" field"))
}

pub fn to_group_c(v: &Value) -> Result<JacobiElementC, CliError> {
    let obj = v.as_object().ok_or_else(|| bad("a group element must be a JSON object"))?;
    let p = to_matrix(field(obj, "p")?)?;
    let n = p.rows();
    let q = square(to_matrix(field(obj, "q")?)?, n, "q")?;
    let g = SymplecticC::new(square(p, n, "p")?, q)?;
    let alpha = obj.get("alpha").map(to_vector).transpose()?.unwrap_or_else(|| vec![C64::new(0.0, 0.0); n]);
    let t = obj.get("t").map(to_f64).transpose()?.unwrap_or(0.0);
    Ok(JacobiElementC::new(g, alpha, t)?)
}

pub fn to_group_r(v: &Value) -> Result<JacobiElementR, CliError> {
    let obj = v.as_object().ok_or_else(|| bad("a group element must be a JSON object"))?;
    let a = to_matrix(field(obj, "a")?)?;
    let n = a.rows();
    let get = |k: &str| -> Result<CMatrix, CliError> { square(to_matrix(field(obj, k)?)?, n, k) };
    let g = SymplecticR::new(square(a, n, "a")?, get("b")?, get("c")?, get("d")?)?;
    let mut lm = obj.get("lambda").map(to_real_vector).transpose()?.unwrap_or_else(|| vec![0.0; n]);
    lm.extend(obj.get("mu").map(to_real_vector).transpose()?.unwrap_or_else(|| vec![0.0; n]));
    let k = obj.get("k").map(to_f64).transpose()?.unwrap_or(0.0);
    Ok(JacobiElementR::new(g, lm, k)?)
}

fn outcome(o: &TrialOutcome) -> Value {
    let mut m = Map::new();
    m.insert("seed".into(), json!(o.seed));
    m.insert("point".into(), o.point.as_ref().map_or(Value::Null, point));
    m.insert("error".into(), real(o.error));
    if let Some(f) = &o.failure {
        m.insert("failure".into(), json!(f));
    }
    Value::Object(m)
}

pub fn property_report(r: &PropertyReport) -> Value {
    json!({
        "property": r.property.name(),
        "group": r.property.group(),
        "trials": r.trials,
        "max_error": real(r.max_error),
        "tol": real(r.tol),
        "pass": r.pass,
        "informational": r.informational,
        "measure": r.property.description(),
        "worst": r.worst.as_ref().map_or(Value::Null, outcome),
    })
}

pub fn fuzz_report(cfg: &FuzzConfig, r: &FuzzReport) -> Value {
    json!({
        "n": r.params.n,
        "k": real(r.params.k),
        "mu": real(r.params.mu),
        "seed": r.seed,
        "trials": cfg.trials,
        "pass": r.pass(),
        "properties": r.properties.iter().map(property_report).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use sjk_core::domains::{sample_point, Domain};
    use sjk_core::groups::{random_jacobi_c, random_jacobi_r};

    #[test]
    fn points_round_trip_bit_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for d in [Domain::Ball, Domain::JacobiBall, Domain::Upper, Domain::JacobiUpper] {
            for n in 1..=3 {
                let p = sample_point(d, n, &mut rng, 0.9).unwrap();
                let text = serde_json::to_string(&point(&p)).unwrap();
                let back = to_point(&serde_json::from_str(&text).unwrap()).unwrap();
                assert_eq!(back, p);
            }
        }
    }

    #[test]
    fn groups_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = random_jacobi_c(2, &mut rng, 1.0);
        assert_eq!(to_group_c(&group_c(&h)).unwrap(), h);
        let r = random_jacobi_r(2, &mut rng, 1.0);
        assert_eq!(to_group_r(&group_r(&r)).unwrap(), r);
    }

    #[test]
    fn malformed_points() {
        assert!(to_point(&json!({"n": 1})).is_err());
        assert!(to_point(&json!({"n": 2, "W": [[[0.0, 0.0]]]})).is_err());
        assert!(to_point(&json!({"W": [[[0.0, 0.0], [0.1, 0.0]]]})).is_err());
        let outside = to_point(&json!({"W": [[[1.5, 0.0]]]})).unwrap_err();
        assert_eq!(outside.kind(), "NotInBall");
    }
}
