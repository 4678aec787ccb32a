//! Sparse polynomials over weighted-graded rings.
//!
//! A [`WeightedRing`] is a list of named variables with positive degrees,
//! optionally followed by degree-0 parameters (the deformation parameter `t`
//! is the only one the crate builds itself). Polynomials are maps from
//! exponent vectors to nonzero scalars, ordered by weighted degree and then
//! lexicographically in the declared symbol order.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

use crate::arith::{Field, Scalar};
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("polynomials live in different rings")]
    RingMismatch,
    #[error("operation undefined on the zero polynomial")]
    ZeroPolynomial,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("symbol `{0}` has no assigned image")]
    Unassigned(String),
    #[error("image of `{var}` has degree {found}, expected {expected}")]
    DegreeMismatch { var: String, expected: u32, found: String },
    #[error("not divisible")]
    NotDivisible,
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("linear change of variables is singular")]
    SingularChange,
    #[error("invalid ring: {0}")]
    InvalidRing(String),
}

/// Ambient ring: a coefficient field, weighted variables and degree-0 parameters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightedRing {
    field: Field,
    vars: Vec<(String, u32)>,
    params: Vec<String>,
}

pub type Ring = Arc<WeightedRing>;

impl WeightedRing {
    pub fn new(field: Field, vars: Vec<(String, u32)>, params: Vec<String>) -> Result<Ring, PolyError> {
        let mut seen = HashSet::new();
        for name in vars.iter().map(|(n, _)| n).chain(params.iter()) {
            if name.is_empty() {
                return Err(PolyError::InvalidRing("empty symbol name".into()));
            }
            if !seen.insert(name.as_str()) {
                return Err(PolyError::InvalidRing(format!("duplicate symbol `{name}`")));
            }
        }
        if let Some((n, _)) = vars.iter().find(|(_, d)| *d == 0) {
            return Err(PolyError::InvalidRing(format!(
                "variable `{n}` must have positive degree"
            )));
        }
        Ok(Arc::new(WeightedRing { field, vars, params }))
    }

    /// Standard-graded ring on the given names.
    pub fn standard<S: AsRef<str>>(field: Field, names: &[S]) -> Result<Ring, PolyError> {
        WeightedRing::new(
            field,
            names.iter().map(|n| (n.as_ref().to_string(), 1)).collect(),
            Vec::new(),
        )
    }

    /// Standard-graded ring on `x1, …, xn`.
    pub fn indexed(field: Field, n: usize) -> Ring {
        let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        WeightedRing::standard(field, &names).expect("distinct names")
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn vars(&self) -> &[(String, u32)] {
        &self.vars
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    /// Variables plus parameters; the length of every exponent vector.
    pub fn num_symbols(&self) -> usize {
        self.vars.len() + self.params.len()
    }

    pub fn symbol_name(&self, idx: usize) -> &str {
        if idx < self.vars.len() {
            &self.vars[idx].0
        } else {
            &self.params[idx - self.vars.len()]
        }
    }

    /// Weight of a symbol slot; parameters weigh 0.
    pub fn weight(&self, idx: usize) -> u32 {
        self.vars.get(idx).map_or(0, |(_, d)| *d)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars
            .iter()
            .position(|(n, _)| n == name)
            .or_else(|| self.params.iter().position(|n| n == name).map(|i| i + self.vars.len()))
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|(n, _)| n == name)
    }

    pub fn is_standard_graded(&self) -> bool {
        self.params.is_empty() && self.vars.iter().all(|(_, d)| *d == 1)
    }

    /// Same ring over another field.
    pub fn with_field(&self, field: Field) -> Ring {
        Arc::new(WeightedRing {
            field,
            vars: self.vars.clone(),
            params: self.params.clone(),
        })
    }

    /// The ring keeping only the first `keep` variables (parameters stay).
    pub fn prefix(&self, keep: usize) -> Ring {
        Arc::new(WeightedRing {
            field: self.field,
            vars: self.vars[..keep.min(self.vars.len())].to_vec(),
            params: self.params.clone(),
        })
    }

    pub fn weighted_degree_of(&self, exps: &[u32]) -> u32 {
        exps.iter().zip(&self.vars).map(|(e, (_, w))| e * w).sum()
    }
}

fn same_ring(a: &Ring, b: &Ring) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// An exponent vector together with its weighted degree.
///
/// The derived order compares weighted degree first and then the exponents
/// lexicographically, so iterating a term map backwards yields graded-lex
/// descending order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    degree: u32,
    exps: Box<[u32]>,
}

impl Monomial {
    pub fn new(ring: &WeightedRing, exps: Vec<u32>) -> Monomial {
        assert_eq!(exps.len(), ring.num_symbols(), "exponent vector length");
        Monomial {
            degree: ring.weighted_degree_of(&exps),
            exps: exps.into_boxed_slice(),
        }
    }

    pub fn one(ring: &WeightedRing) -> Monomial {
        Monomial::new(ring, vec![0; ring.num_symbols()])
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            degree: self.degree + other.degree,
            exps: self.exps.iter().zip(other.exps.iter()).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming [`Monomial::divides`].
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial {
            degree: other.degree - self.degree,
            exps: self.exps.iter().zip(other.exps.iter()).map(|(a, b)| b - a).collect(),
        }
    }

    /// Whether any of the given symbol slots occurs.
    pub fn touches(&self, slots: &[usize]) -> bool {
        slots.iter().any(|&i| self.exps[i] > 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeInfo {
    pub degree: u32,
    pub homogeneous: bool,
}

/// A sparse polynomial; no stored coefficient is zero.
#[derive(Clone)]
pub struct Poly {
    ring: Ring,
    terms: BTreeMap<Monomial, Scalar>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Poly) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for Poly {}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::textio::print_poly(self))
    }
}

impl Poly {
    pub fn zero(ring: &Ring) -> Poly {
        Poly {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &Ring, c: Scalar) -> Poly {
        Poly::monomial(ring, Monomial::one(ring), c)
    }

    pub fn one(ring: &Ring) -> Poly {
        Poly::constant(ring, Scalar::one(ring.field()))
    }

    pub fn monomial(ring: &Ring, mono: Monomial, c: Scalar) -> Poly {
        assert_eq!(c.field(), ring.field(), "coefficient field");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(mono, c);
        }
        Poly {
            ring: ring.clone(),
            terms,
        }
    }

    /// The symbol (variable or parameter) called `name`.
    pub fn var(ring: &Ring, name: &str) -> Result<Poly, PolyError> {
        let idx = ring
            .index_of(name)
            .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))?;
        Ok(Poly::symbol(ring, idx))
    }

    pub fn symbol(ring: &Ring, idx: usize) -> Poly {
        let mut exps = vec![0; ring.num_symbols()];
        exps[idx] = 1;
        Poly::monomial(ring, Monomial::new(ring, exps), Scalar::one(ring.field()))
    }

    /// Builds a polynomial from arbitrary (possibly repeated or zero) terms.
    pub fn from_terms(ring: &Ring, terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Poly {
        let mut p = Poly::zero(ring);
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    pub(crate) fn add_term(&mut self, mono: Monomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get() + c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn field(&self) -> Field {
        self.ring.field()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical (descending graded-lex) order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, mono: &Monomial) -> Scalar {
        self.terms
            .get(mono)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.field()))
    }

    /// Leading term in the canonical order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    fn check_ring(&self, other: &Poly) -> Result<(), PolyError> {
        if same_ring(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(PolyError::RingMismatch)
        }
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), &-c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check_ring(other)?;
        let mut out = Poly::zero(&self.ring);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), &(ca * cb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ring);
        }
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(&self.ring);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Multiplies by a single monomial with coefficient `c`.
    pub fn mul_term(&self, mono: &Monomial, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ring);
        }
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.mul(mono), v * c)).collect(),
        }
    }

    /// Maximal weighted degree and whether all terms share it.
    pub fn weighted_degree(&self) -> Result<DegreeInfo, PolyError> {
        let (max, _) = self.terms.iter().next_back().ok_or(PolyError::ZeroPolynomial)?;
        let min = self.terms.keys().next().expect("nonempty");
        Ok(DegreeInfo {
            degree: max.degree,
            homogeneous: max.degree == min.degree,
        })
    }

    /// Degree when the polynomial is nonzero and homogeneous.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        match self.weighted_degree() {
            Ok(DegreeInfo {
                degree,
                homogeneous: true,
            }) => Some(degree),
            _ => None,
        }
    }

    /// Whether any term involves a parameter.
    pub fn uses_params(&self) -> bool {
        let nv = self.ring.num_vars();
        self.terms.keys().any(|m| m.exps[nv..].iter().any(|&e| e > 0))
    }

    /// Collects the coefficient of `param^power`, as a polynomial in the same ring.
    pub fn coefficient_of_param(&self, param: &str, power: u32) -> Result<Poly, PolyError> {
        let idx = self
            .ring
            .index_of(param)
            .filter(|&i| i >= self.ring.num_vars())
            .ok_or_else(|| PolyError::UnknownVariable(param.to_string()))?;
        let mut out = Poly::zero(&self.ring);
        for (m, c) in &self.terms {
            if m.exps[idx] == power {
                let mut exps = m.exps.to_vec();
                exps[idx] = 0;
                out.add_term(Monomial::new(&self.ring, exps), c);
            }
        }
        Ok(out)
    }

    pub fn partial_derivative(&self, var: &str) -> Result<Poly, PolyError> {
        let idx = self
            .ring
            .index_of(var)
            .ok_or_else(|| PolyError::UnknownVariable(var.to_string()))?;
        Ok(self.derivative_at(idx))
    }

    pub(crate) fn derivative_at(&self, idx: usize) -> Poly {
        let mut out = Poly::zero(&self.ring);
        for (m, c) in &self.terms {
            let e = m.exps[idx];
            if e == 0 {
                continue;
            }
            let mut exps = m.exps.to_vec();
            exps[idx] -= 1;
            let factor = Scalar::from_i64(self.field(), e as i64);
            out.add_term(Monomial::new(&self.ring, exps), &(c * &factor));
        }
        out
    }

    /// Ring homomorphism sending each symbol to the assigned polynomial of
    /// `target`. Variables must be assigned a homogeneous image of their own
    /// weight (or zero); parameters default to the same-named parameter of
    /// `target` when left unassigned.
    pub fn substitute(&self, target: &Ring, assignment: &HashMap<String, Poly>) -> Result<Poly, PolyError> {
        let mut images = Vec::with_capacity(self.ring.num_symbols());
        for idx in 0..self.ring.num_symbols() {
            let name = self.ring.symbol_name(idx);
            let image = match assignment.get(name) {
                Some(img) => img.clone(),
                None if idx >= self.ring.num_vars() => match target.index_of(name) {
                    Some(t) if t >= target.num_vars() => Poly::symbol(target, t),
                    _ => return Err(PolyError::Unassigned(name.to_string())),
                },
                None => return Err(PolyError::Unassigned(name.to_string())),
            };
            if !same_ring(image.ring(), target) {
                return Err(PolyError::RingMismatch);
            }
            let expected = self.ring.weight(idx);
            if !image.is_zero() {
                match image.weighted_degree()? {
                    DegreeInfo {
                        degree,
                        homogeneous: true,
                    } if degree == expected => {}
                    info => {
                        return Err(PolyError::DegreeMismatch {
                            var: name.to_string(),
                            expected,
                            found: if info.homogeneous {
                                info.degree.to_string()
                            } else {
                                "inhomogeneous".into()
                            },
                        })
                    }
                }
            }
            images.push(image);
        }
        Ok(self.evaluate_images(target, &images))
    }

    fn evaluate_images(&self, target: &Ring, images: &[Poly]) -> Poly {
        let mut powers: Vec<Vec<Poly>> = images.iter().map(|img| vec![Poly::one(target), img.clone()]).collect();
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut acc = Poly::constant(target, c.clone());
            for (idx, &e) in m.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[idx].len() <= e as usize {
                    let next = powers[idx].last().unwrap() * &images[idx];
                    powers[idx].push(next);
                }
                acc = &acc * &powers[idx][e as usize];
                if acc.is_zero() {
                    break;
                }
            }
            for (mm, cc) in acc.terms {
                out.add_term(mm, &cc);
            }
        }
        out
    }

    /// Sets the named symbols to zero.
    pub fn restrict_zero<S: AsRef<str>>(&self, names: &[S]) -> Result<Poly, PolyError> {
        let slots = names
            .iter()
            .map(|n| {
                self.ring
                    .index_of(n.as_ref())
                    .ok_or_else(|| PolyError::UnknownVariable(n.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Poly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| !m.touches(&slots))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        })
    }

    /// The exact quotient `self / divisor`.
    ///
    /// Division by a single polynomial under a monomial order leaves a zero
    /// remainder exactly when the divisor divides, so a leading term that the
    /// divisor's leading term cannot divide proves non-divisibility.
    pub fn exact_divide(&self, divisor: &Poly) -> Result<Poly, PolyError> {
        self.check_ring(divisor)?;
        let (lm, lc) = divisor.leading_term().ok_or(PolyError::ZeroDivisor)?;
        let lc_inv = lc.inverse().expect("nonzero");
        let mut rem = self.clone();
        let mut quot = Poly::zero(&self.ring);
        while let Some((m, c)) = rem.leading_term() {
            if !lm.divides(m) {
                return Err(PolyError::NotDivisible);
            }
            let t = lm.quotient_of(m);
            let coeff = c * &lc_inv;
            rem = &rem - &divisor.mul_term(&t, &coeff);
            quot.add_term(t, &coeff);
        }
        Ok(quot)
    }

    pub fn apply_linear_change(&self, change: &LinearChange) -> Result<Poly, PolyError> {
        if !same_ring(&self.ring, &change.ring) {
            return Err(PolyError::RingMismatch);
        }
        let images: Vec<Poly> = (0..self.ring.num_symbols())
            .map(|idx| match change.degree_one.iter().position(|&v| v == idx) {
                Some(k) => change.images[k].clone(),
                None => Poly::symbol(&self.ring, idx),
            })
            .collect();
        Ok(self.evaluate_images(&self.ring, &images))
    }

    /// Sets every variable after the first `keep` to zero and re-homes the
    /// result in the prefix ring.
    pub fn forget_variables(&self, keep: usize) -> Poly {
        let keep = keep.min(self.ring.num_vars());
        let nv = self.ring.num_vars();
        let small = self.ring.prefix(keep);
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.exps[keep..nv].iter().all(|&e| e == 0))
            .map(|(m, c)| {
                let exps: Vec<u32> = m.exps[..keep].iter().chain(&m.exps[nv..]).copied().collect();
                (Monomial::new(&small, exps), c.clone())
            });
        Poly::from_terms(&small, terms)
    }

    /// Coefficient vector against an ordered monomial basis, or `None` when a
    /// term falls outside it.
    pub fn coordinates(&self, basis: &[Monomial]) -> Option<Vec<Scalar>> {
        let index: HashMap<&Monomial, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut out = vec![Scalar::zero(self.field()); basis.len()];
        for (m, c) in &self.terms {
            out[*index.get(m)?] = c.clone();
        }
        Some(out)
    }

    pub fn from_coordinates(ring: &Ring, basis: &[Monomial], coords: &[Scalar]) -> Poly {
        Poly::from_terms(ring, basis.iter().cloned().zip(coords.iter().cloned()))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl $trait for &Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                self.$try(rhs).expect("polynomial ring mismatch")
            }
        }
        impl $trait for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$try(&rhs).expect("polynomial ring mismatch")
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-&Scalar::one(self.field()))
    }
}

/// All monomials of weighted degree exactly `d` in the ring's variables
/// (parameters excluded), in descending graded-lex order.
pub fn basis_of_degree(ring: &WeightedRing, d: u32) -> Vec<Monomial> {
    fn rec(ring: &WeightedRing, idx: usize, left: u32, exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if idx == ring.num_vars() {
            if left == 0 {
                let mut full = exps.clone();
                full.resize(ring.num_symbols(), 0);
                out.push(Monomial::new(ring, full));
            }
            return;
        }
        let w = ring.weight(idx);
        for e in (0..=left / w).rev() {
            exps.push(e);
            rec(ring, idx + 1, left - e * w, exps, out);
            exps.pop();
        }
    }
    let mut out = Vec::new();
    rec(ring, 0, d, &mut Vec::new(), &mut out);
    out
}

/// An invertible substitution of the degree-1 variables by degree-1 forms;
/// every other symbol is fixed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearChange {
    ring: Ring,
    degree_one: Vec<usize>,
    images: Vec<Poly>,
    matrix: Matrix,
}

impl LinearChange {
    /// Builds the change from images of degree-1 variables; variables not
    /// mentioned map to themselves.
    pub fn new(ring: &Ring, assignment: &HashMap<String, Poly>) -> Result<LinearChange, PolyError> {
        let degree_one: Vec<usize> = (0..ring.num_vars()).filter(|&i| ring.weight(i) == 1).collect();
        for name in assignment.keys() {
            match ring.var_index(name) {
                Some(i) if ring.weight(i) == 1 => {}
                Some(i) => {
                    return Err(PolyError::DegreeMismatch {
                        var: name.clone(),
                        expected: 1,
                        found: ring.weight(i).to_string(),
                    })
                }
                None => return Err(PolyError::UnknownVariable(name.clone())),
            }
        }
        let basis: Vec<Monomial> = degree_one
            .iter()
            .map(|&i| {
                let mut e = vec![0; ring.num_symbols()];
                e[i] = 1;
                Monomial::new(ring, e)
            })
            .collect();
        let mut images = Vec::new();
        let mut columns = Vec::new();
        for &i in &degree_one {
            let name = ring.symbol_name(i);
            let img = assignment.get(name).cloned().unwrap_or_else(|| Poly::symbol(ring, i));
            if !same_ring(img.ring(), ring) {
                return Err(PolyError::RingMismatch);
            }
            let coords = img.coordinates(&basis).ok_or_else(|| PolyError::DegreeMismatch {
                var: name.to_string(),
                expected: 1,
                found: "non-linear".into(),
            })?;
            columns.push(coords);
            images.push(img);
        }
        LinearChange::from_parts(ring, degree_one, images, columns)
    }

    /// Builds the change `x_j ↦ Σ_i matrix[i][j] x_i` on the degree-1 variables
    /// (columns are images).
    pub fn from_matrix(ring: &Ring, matrix: &Matrix) -> Result<LinearChange, PolyError> {
        let degree_one: Vec<usize> = (0..ring.num_vars()).filter(|&i| ring.weight(i) == 1).collect();
        let n = degree_one.len();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(PolyError::SingularChange);
        }
        let mut images = Vec::new();
        let mut columns = Vec::new();
        for j in 0..n {
            let col: Vec<Scalar> = (0..n).map(|i| matrix.get(i, j).clone()).collect();
            let mut img = Poly::zero(ring);
            for (i, c) in col.iter().enumerate() {
                img = &img + &Poly::symbol(ring, degree_one[i]).scale(c);
            }
            images.push(img);
            columns.push(col);
        }
        LinearChange::from_parts(ring, degree_one, images, columns)
    }

    fn from_parts(
        ring: &Ring,
        degree_one: Vec<usize>,
        images: Vec<Poly>,
        columns: Vec<Vec<Scalar>>,
    ) -> Result<LinearChange, PolyError> {
        let n = degree_one.len();
        let mut matrix = Matrix::zeros(ring.field(), n, n);
        for (j, col) in columns.into_iter().enumerate() {
            for (i, v) in col.into_iter().enumerate() {
                matrix.set(i, j, v);
            }
        }
        if matrix.rank() < n {
            return Err(PolyError::SingularChange);
        }
        Ok(LinearChange {
            ring: ring.clone(),
            degree_one,
            images,
            matrix,
        })
    }

    pub fn identity(ring: &Ring) -> LinearChange {
        LinearChange::new(ring, &HashMap::new()).expect("identity is invertible")
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn inverse(&self) -> LinearChange {
        let inv = self.matrix.inverse().expect("invertible by construction");
        LinearChange::from_matrix(&self.ring, &inv).expect("inverse is invertible")
    }
}
