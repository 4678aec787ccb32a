//! Buchberger's algorithm over standard-graded rings.
//!
//! Provides normal forms, reduced Gröbner bases, ideal membership and affine
//! Krull dimension, plus the codimension of the singular locus of a
//! hypersurface (the ideal of `f` and all of its partial derivatives).
//!
//! The dimension is read off the leading-term ideal: a set of variables is
//! independent when no leading monomial is supported inside it, and the
//! dimension is the size of a largest independent set. Its complement is a
//! smallest set of variables meeting every leading-monomial support, which
//! is what the search below actually minimizes.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::arith::Scalar;
use crate::polyring::{Monomial, Poly, PolyError, Ring};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroebnerError {
    #[error("Gröbner computations need a standard-graded ring without parameters")]
    WeightedRingUnsupported,
    #[error("polynomials live in different rings")]
    RingMismatch,
    #[error("operation undefined on the zero polynomial")]
    ZeroPolynomial,
    #[error("dimension computation supports at most 64 variables")]
    TooManyVariables,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TermOrder {
    #[default]
    Grevlex,
    Lex,
}

impl std::str::FromStr for TermOrder {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "grevlex" => Ok(TermOrder::Grevlex),
            "lex" => Ok(TermOrder::Lex),
            other => Err(format!("unknown term order `{other}` (use grevlex or lex)")),
        }
    }
}

impl TermOrder {
    pub fn cmp(self, a: &[u32], b: &[u32]) -> Ordering {
        match self {
            TermOrder::Lex => a.cmp(b),
            TermOrder::Grevlex => {
                let da: u32 = a.iter().sum();
                let db: u32 = b.iter().sum();
                da.cmp(&db).then_with(|| {
                    for (x, y) in a.iter().zip(b).rev() {
                        if x != y {
                            return y.cmp(x);
                        }
                    }
                    Ordering::Equal
                })
            }
        }
    }
}

type Exps = Box<[u32]>;

/// Internal sparse polynomial: terms sorted descending in the active order.
#[derive(Debug, Clone, PartialEq, Eq)]
struct GPoly {
    terms: Vec<(Exps, Scalar)>,
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn lcm(a: &[u32], b: &[u32]) -> Exps {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn coprime(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == 0 || *y == 0)
}

impl GPoly {
    fn from_poly(p: &Poly, order: TermOrder) -> GPoly {
        let mut terms: Vec<(Exps, Scalar)> = p.terms().map(|(m, c)| (m.exps().into(), c.clone())).collect();
        terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
        GPoly { terms }
    }

    fn to_poly(&self, ring: &Ring) -> Poly {
        Poly::from_terms(
            ring,
            self.terms
                .iter()
                .map(|(e, c)| (Monomial::new(ring, e.to_vec()), c.clone())),
        )
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn lead(&self) -> &Exps {
        &self.terms[0].0
    }

    fn make_monic(&mut self) {
        if let Some((_, lc)) = self.terms.first() {
            let inv = lc.inverse().expect("nonzero leading coefficient");
            for (_, c) in &mut self.terms {
                *c = &*c * &inv;
            }
        }
    }

    /// `self - c · x^shift · other`, merging in `order`.
    fn sub_scaled(&self, c: &Scalar, shift: &[u32], other: &GPoly, order: TermOrder) -> GPoly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut a = self.terms.iter().peekable();
        let mut b = other
            .terms
            .iter()
            .map(|(e, v)| {
                let m: Exps = e.iter().zip(shift).map(|(x, y)| x + y).collect();
                (m, v * c)
            })
            .peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some(x), Some(y)) => match order.cmp(&x.0, &y.0) {
                    Ordering::Greater => out.push(a.next().unwrap().clone()),
                    Ordering::Less => {
                        let (m, v) = b.next().unwrap();
                        out.push((m, -&v));
                    }
                    Ordering::Equal => {
                        let (m, v) = b.next().unwrap();
                        let s = &a.next().unwrap().1 - &v;
                        if !s.is_zero() {
                            out.push((m, s));
                        }
                    }
                },
                (Some(_), None) => out.push(a.next().unwrap().clone()),
                (None, Some(_)) => {
                    let (m, v) = b.next().unwrap();
                    out.push((m, -&v));
                }
                (None, None) => break,
            }
        }
        GPoly { terms: out }
    }
}

/// Full reduction of `f` by `basis` (remainder of multivariate division).
fn reduce(f: &GPoly, basis: &[GPoly], order: TermOrder) -> GPoly {
    let mut rem: Vec<(Exps, Scalar)> = Vec::new();
    let mut p = f.clone();
    'outer: while !p.is_zero() {
        let (lm, lc) = p.terms[0].clone();
        for g in basis {
            if g.is_zero() || !divides(g.lead(), &lm) {
                continue;
            }
            let shift: Vec<u32> = lm.iter().zip(g.lead().iter()).map(|(a, b)| a - b).collect();
            let c = lc.try_div(&g.terms[0].1).expect("nonzero leading coefficient");
            p = p.sub_scaled(&c, &shift, g, order);
            continue 'outer;
        }
        rem.push(p.terms.remove(0));
    }
    GPoly { terms: rem }
}

fn s_polynomial(f: &GPoly, g: &GPoly, order: TermOrder) -> GPoly {
    let l = lcm(f.lead(), g.lead());
    let sf: Vec<u32> = l.iter().zip(f.lead().iter()).map(|(a, b)| a - b).collect();
    let sg: Vec<u32> = l.iter().zip(g.lead().iter()).map(|(a, b)| a - b).collect();
    let field = f.terms[0].1.field();
    let zero = GPoly { terms: vec![] };
    let cf = f.terms[0].1.inverse().expect("nonzero");
    let cg = g.terms[0].1.inverse().expect("nonzero");
    let a = zero.sub_scaled(&(-&cf), &sf, f, order);
    let _ = field;
    a.sub_scaled(&cg, &sg, g, order)
}

fn check_ring(ring: &Ring) -> Result<(), GroebnerError> {
    if ring.is_standard_graded() {
        Ok(())
    } else {
        Err(GroebnerError::WeightedRingUnsupported)
    }
}

fn common_ring<'a>(polys: impl IntoIterator<Item = &'a Poly>) -> Result<Option<Ring>, GroebnerError> {
    let mut ring: Option<Ring> = None;
    for p in polys {
        match &ring {
            None => ring = Some(p.ring().clone()),
            Some(r) if **r == **p.ring() => {}
            Some(_) => return Err(GroebnerError::RingMismatch),
        }
    }
    if let Some(r) = &ring {
        check_ring(r)?;
    }
    Ok(ring)
}

/// Remainder of `f` on division by `divisors` in the given order.
pub fn normal_form(f: &Poly, divisors: &[Poly], order: TermOrder) -> Result<Poly, GroebnerError> {
    common_ring(std::iter::once(f).chain(divisors))?;
    let g: Vec<GPoly> = divisors.iter().map(|p| GPoly::from_poly(p, order)).collect();
    Ok(reduce(&GPoly::from_poly(f, order), &g, order).to_poly(f.ring()))
}

/// A reduced Gröbner basis: monic, inter-reduced, sorted by decreasing
/// leading monomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroebnerBasis {
    ring: Ring,
    order: TermOrder,
    generators: Vec<Poly>,
    internal: Vec<GPoly>,
}

impl GroebnerBasis {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn order(&self) -> TermOrder {
        self.order
    }

    pub fn generators(&self) -> &[Poly] {
        &self.generators
    }

    pub fn is_unit(&self) -> bool {
        self.internal.len() == 1 && self.internal[0].lead().iter().all(|&e| e == 0)
    }

    pub fn reduce(&self, f: &Poly) -> Poly {
        reduce(&GPoly::from_poly(f, self.order), &self.internal, self.order).to_poly(&self.ring)
    }

    /// Leading exponent vectors in basis order.
    pub fn leading_exponents(&self) -> Vec<Vec<u32>> {
        self.internal.iter().map(|g| g.lead().to_vec()).collect()
    }

    /// Every S-polynomial of the basis reduces to zero.
    pub fn s_pairs_reduce_to_zero(&self) -> bool {
        let n = self.internal.len();
        (0..n).all(|i| {
            (i + 1..n).all(|j| {
                let s = s_polynomial(&self.internal[i], &self.internal[j], self.order);
                reduce(&s, &self.internal, self.order).is_zero()
            })
        })
    }

    /// Monic, and no term of any generator is divisible by another
    /// generator's leading monomial.
    pub fn is_reduced(&self) -> bool {
        self.internal.iter().enumerate().all(|(i, g)| {
            g.terms[0].1.is_one()
                && g.terms.iter().all(|(m, _)| {
                    self.internal
                        .iter()
                        .enumerate()
                        .all(|(j, h)| i == j || !divides(h.lead(), m))
                })
        })
    }
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Exps,
    degree: u32,
    serial: usize,
}

/// Reduced Gröbner basis of the ideal generated by `gens`.
///
/// Pairs are processed by increasing degree of their lcm (insertion order
/// breaks ties), skipping pairs with coprime leading monomials and pairs
/// covered by Buchberger's chain criterion.
pub fn buchberger(gens: &[Poly], order: TermOrder) -> Result<GroebnerBasis, GroebnerError> {
    let ring = common_ring(gens)?.ok_or(GroebnerError::ZeroPolynomial)?;
    let mut basis: Vec<GPoly> = Vec::new();
    for g in gens {
        let mut p = reduce(&GPoly::from_poly(g, order), &basis, order);
        if !p.is_zero() {
            p.make_monic();
            basis.push(p);
        }
    }
    let mut pairs: Vec<Pair> = Vec::new();
    let mut serial = 0;
    let mut done: HashSet<(usize, usize)> = HashSet::new();
    let push_pairs = |basis: &Vec<GPoly>, k: usize, pairs: &mut Vec<Pair>, serial: &mut usize| {
        for i in 0..k {
            let l = lcm(basis[i].lead(), basis[k].lead());
            pairs.push(Pair {
                i,
                j: k,
                degree: l.iter().sum(),
                lcm: l,
                serial: *serial,
            });
            *serial += 1;
        }
    };
    for k in 0..basis.len() {
        push_pairs(&basis, k, &mut pairs, &mut serial);
    }
    while !pairs.is_empty() {
        let best = (0..pairs.len())
            .min_by_key(|&t| (pairs[t].degree, pairs[t].serial))
            .expect("nonempty");
        let pair = pairs.swap_remove(best);
        done.insert((pair.i, pair.j));
        let (fi, fj) = (&basis[pair.i], &basis[pair.j]);
        if coprime(fi.lead(), fj.lead()) {
            continue;
        }
        let key = |a: usize, b: usize| (a.min(b), a.max(b));
        let chain = (0..basis.len()).any(|k| {
            k != pair.i
                && k != pair.j
                && divides(basis[k].lead(), &pair.lcm)
                && done.contains(&key(pair.i, k))
                && done.contains(&key(pair.j, k))
        });
        if chain {
            continue;
        }
        let s = s_polynomial(fi, fj, order);
        let mut r = reduce(&s, &basis, order);
        if !r.is_zero() {
            r.make_monic();
            basis.push(r);
            let k = basis.len() - 1;
            push_pairs(&basis, k, &mut pairs, &mut serial);
        }
    }
    let internal = interreduce(basis, order);
    let generators = internal.iter().map(|g| g.to_poly(&ring)).collect();
    Ok(GroebnerBasis {
        ring,
        order,
        generators,
        internal,
    })
}

fn interreduce(mut basis: Vec<GPoly>, order: TermOrder) -> Vec<GPoly> {
    // Drop generators whose leading monomial is divisible by another's.
    let mut keep: Vec<GPoly> = Vec::new();
    basis.sort_by(|a, b| order.cmp(a.lead(), b.lead()));
    for g in basis {
        if keep.iter().any(|h| divides(h.lead(), g.lead())) {
            continue;
        }
        keep.push(g);
    }
    let mut out = Vec::with_capacity(keep.len());
    for i in 0..keep.len() {
        let others: Vec<GPoly> = keep
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, g)| g.clone())
            .collect();
        let head = GPoly {
            terms: vec![keep[i].terms[0].clone()],
        };
        let tail = GPoly {
            terms: keep[i].terms[1..].to_vec(),
        };
        let mut r = reduce(&tail, &others, order);
        r.terms.insert(0, head.terms[0].clone());
        r.make_monic();
        out.push(r);
    }
    out.sort_by(|a, b| order.cmp(b.lead(), a.lead()));
    out
}

pub fn ideal_member(f: &Poly, gb: &GroebnerBasis) -> Result<bool, GroebnerError> {
    if **f.ring() != *gb.ring {
        return Err(GroebnerError::RingMismatch);
    }
    Ok(gb.reduce(f).is_zero())
}

/// Affine dimension data of an ideal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimReport {
    /// Krull dimension of the affine variety; `-1` for the unit ideal.
    pub dimension: i64,
    pub codimension: i64,
    pub unit_ideal: bool,
    /// A maximum set of variables independent modulo the leading-term ideal.
    pub independent_set: Vec<String>,
}

pub fn ideal_dimension(gb: &GroebnerBasis) -> Result<DimReport, GroebnerError> {
    let n = gb.ring.num_vars();
    if gb.is_unit() {
        return Ok(DimReport {
            dimension: -1,
            codimension: n as i64 + 1,
            unit_ideal: true,
            independent_set: vec![],
        });
    }
    if n > 64 {
        return Err(GroebnerError::TooManyVariables);
    }
    let supports: BTreeSet<u64> = gb
        .internal
        .iter()
        .map(|g| {
            g.lead()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .fold(0u64, |acc, (i, _)| acc | (1 << i))
        })
        .collect();
    let cover = min_hitting_set(&supports.into_iter().collect::<Vec<_>>(), n);
    let independent_set = (0..n)
        .filter(|i| cover & (1 << i) == 0)
        .map(|i| gb.ring.symbol_name(i).to_string())
        .collect::<Vec<_>>();
    let dimension = independent_set.len() as i64;
    Ok(DimReport {
        dimension,
        codimension: n as i64 - dimension,
        unit_ideal: false,
        independent_set,
    })
}

/// Smallest variable set (as a bitmask) meeting every support. Among the
/// minimum ones, the search returns the first found with variables tried in
/// declared order.
fn min_hitting_set(supports: &[u64], n: usize) -> u64 {
    let mut minimal: Vec<u64> = Vec::new();
    let mut sorted = supports.to_vec();
    sorted.sort_by_key(|s| s.count_ones());
    for s in sorted {
        if !minimal.iter().any(|m| m & s == *m) {
            minimal.push(s);
        }
    }
    fn rec(sets: &[u64], chosen: u64, size: u32, best: &mut (u32, u64)) {
        let Some(open) = sets.iter().find(|s| *s & chosen == 0) else {
            if size < best.0 {
                *best = (size, chosen);
            }
            return;
        };
        if size + 1 >= best.0 {
            return;
        }
        let mut bits = *open;
        while bits != 0 {
            let v = bits.trailing_zeros();
            bits &= bits - 1;
            rec(sets, chosen | (1 << v), size + 1, best);
        }
    }
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut best = (n as u32 + 1, all);
    rec(&minimal, 0, 0, &mut best);
    best.1
}

/// Generators of the singular locus of `{f = 0}`: `f` and its partials.
pub fn jacobian_ideal(f: &Poly) -> Vec<Poly> {
    let mut gens = vec![f.clone()];
    gens.extend((0..f.ring().num_vars()).map(|i| f.derivative_at(i)));
    gens
}

/// Codimension of `V(f, ∂f/∂x_1, …, ∂f/∂x_n)` in affine n-space.
///
/// `f` is always included: in characteristic zero it lies in the Jacobian
/// ideal by Euler's relation, and in characteristic dividing `deg f` it
/// does not.
pub fn singular_locus_codim(f: &Poly) -> Result<DimReport, GroebnerError> {
    check_ring(f.ring())?;
    if f.is_zero() {
        return Err(GroebnerError::ZeroPolynomial);
    }
    let gb = buchberger(&jacobian_ideal(f), TermOrder::Grevlex)?;
    ideal_dimension(&gb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Field;
    use crate::polyring::WeightedRing;
    use crate::textio::{parse_poly, parse_ring};

    fn polys(r: &Ring, xs: &[&str]) -> Vec<Poly> {
        xs.iter().map(|s| parse_poly(r, s).unwrap()).collect()
    }

    #[test]
    fn normal_form_examples() {
        let r = parse_ring("QQ[x, y]").unwrap();
        let p = |s| parse_poly(&r, s).unwrap();
        let g = TermOrder::Grevlex;
        assert!(normal_form(&p("x^2"), &[p("x")], g).unwrap().is_zero());
        assert_eq!(normal_form(&p("x"), &[p("x^2"), p("y")], g).unwrap(), p("x"));
        assert_eq!(
            normal_form(&p("x^2*y + y^3"), &[p("x^2 - y^2")], g).unwrap(),
            p("2*y^3")
        );
        let w = parse_ring("QQ[x, f:2]").unwrap();
        assert_eq!(
            normal_form(&parse_poly(&w, "x").unwrap(), &[], g),
            Err(GroebnerError::WeightedRingUnsupported)
        );
    }

    #[test]
    fn buchberger_examples() {
        let r = parse_ring("QQ[x, y, u, v]").unwrap();
        let gens = polys(&r, &["x^2", "y^2", "u^2", "v^2"]);
        let gb = buchberger(&gens, TermOrder::Grevlex).unwrap();
        assert_eq!(gb.generators(), gens.as_slice());

        let r2 = parse_ring("QQ[x, y]").unwrap();
        let gb = buchberger(&polys(&r2, &["x + y", "x - y"]), TermOrder::Grevlex).unwrap();
        assert_eq!(gb.generators(), polys(&r2, &["x", "y"]).as_slice());

        let gb = buchberger(&polys(&r2, &["x*y - 1", "y^2 - 1"]), TermOrder::Lex).unwrap();
        assert_eq!(gb.generators(), polys(&r2, &["x - y", "y^2 - 1"]).as_slice());
        assert!(gb.s_pairs_reduce_to_zero());
        assert!(gb.is_reduced());
    }

    #[test]
    fn membership_examples() {
        let r = parse_ring("QQ[x, y, u, v]").unwrap();
        let p = |s| parse_poly(&r, s).unwrap();
        let gb = buchberger(&[p("x"), p("y")], TermOrder::Grevlex).unwrap();
        assert!(ideal_member(&p("x^2"), &gb).unwrap());
        let gb = buchberger(&[p("x^2"), p("y")], TermOrder::Grevlex).unwrap();
        assert!(!ideal_member(&p("x"), &gb).unwrap());
        let gb = buchberger(&[p("x+y"), p("y+u"), p("u+v")], TermOrder::Grevlex).unwrap();
        assert!(!ideal_member(&p("x^2"), &gb).unwrap());
    }

    #[test]
    fn dimension_examples() {
        let r = parse_ring("QQ[x, y, u, v]").unwrap();
        let gb = buchberger(&polys(&r, &["x^2", "y^2", "u^2", "v^2"]), TermOrder::Grevlex).unwrap();
        let d = ideal_dimension(&gb).unwrap();
        assert_eq!((d.dimension, d.codimension), (0, 4));

        let r2 = parse_ring("QQ[x, y]").unwrap();
        let d = ideal_dimension(&buchberger(&polys(&r2, &["x"]), TermOrder::Grevlex).unwrap()).unwrap();
        assert_eq!((d.dimension, d.codimension), (1, 1));
        assert_eq!(d.independent_set, ["y"]);

        let r3 = parse_ring("QQ[x, y, z]").unwrap();
        let d = ideal_dimension(&buchberger(&polys(&r3, &["x*y", "x*z"]), TermOrder::Grevlex).unwrap()).unwrap();
        assert_eq!((d.dimension, d.codimension), (2, 1));
        assert_eq!(d.independent_set, ["y", "z"]);

        let d = ideal_dimension(&buchberger(&polys(&r3, &["x*y - 1", "x"]), TermOrder::Grevlex).unwrap()).unwrap();
        assert!(d.unit_ideal);
        assert_eq!(d.dimension, -1);
    }

    #[test]
    fn singular_locus_examples() {
        let r = WeightedRing::indexed(Field::Rational, 5);
        let fermat = parse_poly(&r, "x1^4 + x2^4 + x3^4 + x4^4 + x5^4").unwrap();
        assert_eq!(singular_locus_codim(&fermat).unwrap().codimension, 5);
        let r2 = WeightedRing::indexed(Field::Rational, 2);
        assert_eq!(
            singular_locus_codim(&parse_poly(&r2, "x1*x2").unwrap())
                .unwrap()
                .codimension,
            2
        );
        assert_eq!(
            singular_locus_codim(&Poly::zero(&r2)),
            Err(GroebnerError::ZeroPolynomial)
        );
    }

    #[test]
    fn hitting_set_is_minimum() {
        // supports {0,1}, {1,2}, {2,3}: a path, minimum cover {1,2} or {1,3}...
        let sets = [0b0011, 0b0110, 0b1100];
        assert_eq!(min_hitting_set(&sets, 4).count_ones(), 2);
        assert_eq!(min_hitting_set(&[], 3), 0);
    }
}
