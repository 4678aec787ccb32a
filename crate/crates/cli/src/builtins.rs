//! Named polynomials built by `paperlab`.

use strength_core::arith::{Field, Scalar};
use strength_core::paperlab::{
    analog_polynomial, build_h, build_h_at, build_h_t, instantiate, paper_ring, InstantiationPlan,
};
use strength_core::polyring::Poly;

pub const NAMES: &str = "paper-h, paper-h-t, paper-h-at:t0=N, instance:m=N (alias lemma10:m=N), analog:k=N";

fn parameter(spec: &str, key: &str) -> Result<String, String> {
    let (k, v) = spec
        .split_once('=')
        .ok_or_else(|| format!("expected `{key}=N`, got `{spec}`"))?;
    if k.trim() != key {
        return Err(format!("expected `{key}=N`, got `{spec}`"));
    }
    Ok(v.trim().to_string())
}

fn count(spec: &str, key: &str) -> Result<usize, String> {
    let v = parameter(spec, key)?;
    v.parse().map_err(|_| format!("`{v}` is not a nonnegative integer"))
}

/// Resolves a builtin name over `field`.
pub fn resolve(name: &str, field: Field) -> Result<Poly, String> {
    let (head, args) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    };
    let poly = match (head, args) {
        ("paper-h", None) => build_h(&paper_ring(field, false)),
        ("paper-h-t", None) => build_h_t(&paper_ring(field, true)).map_err(|e| e.to_string())?.h_t,
        ("paper-h-at", Some(a)) => {
            let v = parameter(a, "t0")?;
            let t0 = Scalar::parse(field, &v).map_err(|e| format!("t0: {e}"))?;
            build_h_at(&paper_ring(field, false), &t0)
        }
        ("instance" | "lemma10", Some(a)) => {
            let plan = InstantiationPlan::new(count(a, "m")?).map_err(|e| e.to_string())?;
            instantiate(&plan, field).map_err(|e| e.to_string())?
        }
        ("analog", Some(a)) => analog_polynomial(count(a, "k")?, field).map_err(|e| e.to_string())?,
        _ => return Err(format!("unknown builtin `{name}`; known: {NAMES}")),
    };
    Ok(poly)
}
