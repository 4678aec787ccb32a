//! Strength and slice rank.
//!
//! A strength decomposition of a form `f` of degree `d` is an expression
//! `f = g₁h₁ + … + g_rh_r` with every factor homogeneous of degree between 1
//! and `d−1`; the strength is the least such `r`. Slice rank is the least
//! codimension of a linear subspace on which `f` vanishes.
//!
//! Exact strength is computed over prime fields by exhaustive enumeration of
//! the `g`-side factors (see [`search`]); once the `gᵢ` are fixed the
//! equation is linear in the `hᵢ`. Upper bounds over any field come from
//! [`strength_upper`]. Every reported upper bound carries a certificate
//! that has been re-verified.

mod search;
mod slice;
mod upper;

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::groebner::{singular_locus_codim, GroebnerError};
use crate::linalg::Matrix;
use crate::polyring::{basis_of_degree, Poly, PolyError, Ring};
use crate::textio::print_poly;

pub use search::{strength_exact, DegreeSplitShape, RangeOutcome, SearchPlan};
pub use slice::{slice_rank_exact, slice_rank_upper, SubspaceCertificate};
pub use upper::{strength_upper, Strategy};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrengthError {
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("strength is undefined for nonzero forms of degree {0}")]
    DegreeTooLow(u32),
    #[error("pair {pair}: {reason}")]
    MalformedDecomposition { pair: usize, reason: String },
    #[error("exhaustive search needs a finite field")]
    InfiniteFieldExhaustion,
    #[error("search space too large: {0}")]
    SearchSpaceTooLarge(String),
    #[error("searches do not support rings with parameters")]
    ParametersUnsupported,
    #[error("slice rank needs a standard-graded ring")]
    WeightedRingUnsupported,
    #[error("factors live in different rings")]
    RingMismatch,
    #[error("internal check failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
}

/// A list of factor pairs `(gᵢ, hᵢ)`; its length is the number of pairs.
///
/// Construction only checks that all factors share one ring. The degree
/// constraints depend on the target form and are checked by
/// [`verify_decomposition`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    ring: Ring,
    pairs: Vec<(Poly, Poly)>,
}

impl Decomposition {
    pub fn new(ring: &Ring, pairs: Vec<(Poly, Poly)>) -> Result<Decomposition, StrengthError> {
        for (g, h) in &pairs {
            if **g.ring() != **ring || **h.ring() != **ring {
                return Err(StrengthError::RingMismatch);
            }
        }
        Ok(Decomposition {
            ring: ring.clone(),
            pairs,
        })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn pairs(&self) -> &[(Poly, Poly)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Degree of the products, when all pairs agree.
    pub fn target_degree(&self) -> Option<u32> {
        let mut degree = None;
        for (g, h) in &self.pairs {
            let d = g.homogeneous_degree()? + h.homogeneous_degree()?;
            if *degree.get_or_insert(d) != d {
                return None;
            }
        }
        degree
    }

    /// `Σ gᵢhᵢ`.
    pub fn expand(&self) -> Poly {
        self.pairs
            .iter()
            .fold(Poly::zero(&self.ring), |acc, (g, h)| &acc + &(g * h))
    }

    /// Concatenation, certifying subadditivity.
    pub fn concat(&self, other: &Decomposition) -> Result<Decomposition, StrengthError> {
        let mut pairs = self.pairs.clone();
        pairs.extend(other.pairs.iter().cloned());
        Decomposition::new(&self.ring, pairs)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.pairs
                .iter()
                .map(|(g, h)| serde_json::json!([print_poly(g), print_poly(h)]))
                .collect(),
        )
    }
}

/// Degree of `f` as a form of degree at least 2.
fn form_degree(f: &Poly) -> Result<u32, StrengthError> {
    let d = f.homogeneous_degree().ok_or(StrengthError::NotHomogeneous)?;
    if d < 2 {
        return Err(StrengthError::DegreeTooLow(d));
    }
    Ok(d)
}

/// Whether `D` is a strength decomposition of `f`.
///
/// Degree violations are errors naming the offending pair; a well-formed
/// decomposition that does not sum to `f` gives `Ok(false)`.
pub fn verify_decomposition(f: &Poly, dec: &Decomposition) -> Result<bool, StrengthError> {
    if **f.ring() != *dec.ring {
        return Err(StrengthError::RingMismatch);
    }
    if f.is_zero() && dec.is_empty() {
        return Ok(true);
    }
    let d = form_degree(f)?;
    for (i, (g, h)) in dec.pairs.iter().enumerate() {
        let malformed = |reason: String| StrengthError::MalformedDecomposition { pair: i, reason };
        let dg = g
            .homogeneous_degree()
            .ok_or_else(|| malformed("g is zero or not homogeneous".into()))?;
        let dh = h
            .homogeneous_degree()
            .ok_or_else(|| malformed("h is zero or not homogeneous".into()))?;
        for (name, deg) in [("g", dg), ("h", dh)] {
            if deg < 1 || deg >= d {
                return Err(malformed(format!("deg {name} = {deg} is outside 1..={}", d - 1)));
            }
        }
        if dg + dh != d {
            return Err(malformed(format!("deg g + deg h = {} but deg f = {d}", dg + dh)));
        }
    }
    Ok(dec.expand() == *f)
}

/// Some `h₁…h_r` with `Σ gᵢhᵢ = f`, or `None` when the linear system in the
/// coefficients of the `hᵢ` is inconsistent.
pub fn cofactor_solve(f: &Poly, fixed: &[Poly]) -> Option<Vec<Poly>> {
    let ring = f.ring();
    let d = match f.homogeneous_degree() {
        Some(d) => d,
        None if f.is_zero() => return Some(fixed.iter().map(|_| Poly::zero(ring)).collect()),
        None => return None,
    };
    let target = basis_of_degree(ring, d);
    let rhs = f.coordinates(&target)?;
    let index: HashMap<_, _> = target.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
    let mut columns: Vec<Vec<crate::arith::Scalar>> = Vec::new();
    let mut blocks = Vec::new();
    for g in fixed {
        let e = g.homogeneous_degree().filter(|&e| e >= 1 && e < d)?;
        let hb = basis_of_degree(ring, d - e);
        for m in &hb {
            let mut col = vec![crate::arith::Scalar::zero(f.field()); target.len()];
            for (mono, c) in g.terms() {
                col[*index.get(&mono.mul(m))?] = c.clone();
            }
            columns.push(col);
        }
        blocks.push(hb);
    }
    let mut matrix = Matrix::zeros(f.field(), target.len(), columns.len());
    for (j, col) in columns.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            if !v.is_zero() {
                matrix.set(i, j, v.clone());
            }
        }
    }
    let x = matrix.solve(&rhs)?;
    let mut offset = 0;
    Some(
        blocks
            .iter()
            .map(|hb| {
                let h = Poly::from_coordinates(ring, hb, &x[offset..offset + hb.len()]);
                offset += hb.len();
                h
            })
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    UpperOnly,
    ExhaustedBelow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    Strength,
    SliceRank,
}

/// What a search established, for one candidate length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Exhaustion {
    pub r: usize,
    pub shapes: Vec<String>,
    pub tuples: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub elapsed_ms: u64,
    pub nodes: u64,
    pub tuples: u64,
    pub workers: usize,
}

impl SearchStats {
    pub fn merge(&mut self, other: &SearchStats) {
        self.elapsed_ms += other.elapsed_ms;
        self.nodes += other.nodes;
        self.tuples += other.tuples;
        self.workers = self.workers.max(other.workers);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    None,
    Decomposition(Decomposition),
    Subspace(SubspaceCertificate),
}

/// Outcome of a strength or slice-rank computation.
///
/// `Exact`: `lower == upper == value`, with a certificate at `value` and an
/// exhaustion record for every smaller length. `ExhaustedBelow`: every
/// length up to `lower − 1` was excluded and no certificate is known within
/// the budget. `UpperOnly`: only the certificate at `upper` is known.
/// Values over finite fields are tagged with the field and say nothing about
/// other fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    pub quantity: Quantity,
    pub field: String,
    pub mode: Mode,
    pub lower: usize,
    pub upper: Option<usize>,
    pub certificate: Certificate,
    pub exhausted: Vec<Exhaustion>,
    pub stats: SearchStats,
}

impl SearchReport {
    /// The exact value, when known.
    pub fn value(&self) -> Option<usize> {
        (self.mode == Mode::Exact).then_some(self.lower)
    }

    pub fn decomposition(&self) -> Option<&Decomposition> {
        match &self.certificate {
            Certificate::Decomposition(d) => Some(d),
            _ => None,
        }
    }

    pub fn subspace(&self) -> Option<&SubspaceCertificate> {
        match &self.certificate {
            Certificate::Subspace(s) => Some(s),
            _ => None,
        }
    }

    pub fn result_json(&self) -> serde_json::Value {
        serde_json::json!({
            "quantity": self.quantity,
            "field": self.field,
            "mode": self.mode,
            "value": self.value(),
            "lower_bound": self.lower,
            "upper_bound": self.upper,
            "exhausted": self.exhausted,
        })
    }

    pub fn certificate_json(&self) -> serde_json::Value {
        match &self.certificate {
            Certificate::None => serde_json::Value::Null,
            Certificate::Decomposition(d) => serde_json::json!({ "decomposition": d.to_json() }),
            Certificate::Subspace(s) => serde_json::json!({ "subspace": s.to_json() }),
        }
    }

    pub fn stats_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.stats).expect("stats serialize")
    }
}

/// The singular-locus lower bound: if `codim Sing(f) ≥ 2k+1` then
/// `str(f) ≥ k+1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AhBound {
    pub codim: i64,
    pub bound: i64,
    /// Set in positive characteristic `p ≤ deg f`, where the bound is
    /// reported but its validity is not established.
    pub characteristic_caveat: bool,
}

pub fn ah_lower_bound(f: &Poly) -> Result<AhBound, StrengthError> {
    let d = form_degree(f)?;
    let report = singular_locus_codim(f)?;
    let c = report.codimension;
    let bound = if c >= 1 { (c - 1) / 2 + 1 } else { 0 };
    let p = f.field().characteristic();
    Ok(AhBound {
        codim: c,
        bound,
        characteristic_caveat: p != 0 && p <= d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Field;
    use crate::polyring::WeightedRing;
    use crate::textio::{parse_decomposition, parse_poly, parse_ring};

    #[test]
    fn verify_examples() {
        let r = parse_ring("QQ[x, y, u, v, f:2, g:2, p:2, q:2]").unwrap();
        let h = parse_poly(&r, "x^2*f + y^2*g + u^2*p + v^2*q").unwrap();
        let d = parse_decomposition(&r, "(x^2)*(f); (y^2)*(g); (u^2)*(p); (v^2)*(q)").unwrap();
        assert!(verify_decomposition(&h, &d).unwrap());
        let short = parse_decomposition(&r, "(x^2)*(f); (y^2)*(g)").unwrap();
        assert!(!verify_decomposition(&h, &short).unwrap());

        let x4 = parse_poly(&r, "x^4").unwrap();
        let bad = parse_decomposition(&r, "(x^4)*(1)").unwrap();
        assert!(matches!(
            verify_decomposition(&x4, &bad),
            Err(StrengthError::MalformedDecomposition { pair: 0, .. })
        ));
        let lin = parse_poly(&r, "x").unwrap();
        assert_eq!(verify_decomposition(&lin, &short), Err(StrengthError::DegreeTooLow(1)));
    }

    #[test]
    fn cofactor_examples() {
        let r = parse_ring("QQ[x, y]").unwrap();
        let p = |s| parse_poly(&r, s).unwrap();
        assert_eq!(cofactor_solve(&p("x^2 - y^2"), &[p("x + y")]), Some(vec![p("x - y")]));

        let r4 = WeightedRing::indexed(Field::Rational, 4);
        let q = |s| parse_poly(&r4, s).unwrap();
        let f = q("x1*x2 + x3*x4");
        assert_eq!(cofactor_solve(&f, &[q("x1"), q("x3")]), Some(vec![q("x2"), q("x4")]));
        assert_eq!(cofactor_solve(&f, &[q("x1"), q("x2")]), None);
    }

    #[test]
    fn ah_examples() {
        let r = WeightedRing::indexed(Field::Rational, 5);
        let fermat = parse_poly(&r, "x1^4 + x2^4 + x3^4 + x4^4 + x5^4").unwrap();
        let b = ah_lower_bound(&fermat).unwrap();
        assert_eq!((b.codim, b.bound), (5, 3));
        let r2 = WeightedRing::indexed(Field::Rational, 2);
        let b = ah_lower_bound(&parse_poly(&r2, "x1*x2").unwrap()).unwrap();
        assert_eq!((b.codim, b.bound), (2, 1));
        let r4 = WeightedRing::indexed(Field::Rational, 4);
        let b = ah_lower_bound(&parse_poly(&r4, "x1*x2*x3*x4").unwrap()).unwrap();
        // Sing is the union of coordinate planes x_i = x_j = 0.
        assert_eq!((b.codim, b.bound), (2, 1));
    }
}
