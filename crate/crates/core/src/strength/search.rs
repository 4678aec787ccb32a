//! Exhaustive strength search over prime fields.
//!
//! For a candidate length `r` the search walks every multiset of degree
//! splits `(e, d−e)` with `e ≤ d−e`, and for each one every tuple of
//! `g`-factors taken up to scaling (first nonzero coefficient 1) and, within
//! a run of equal `e`, in strictly increasing enumeration index. A tuple
//! succeeds when `f` lies in the span of all products `gᵢ·m` with `m` running
//! over the monomials of degree `d−eᵢ`.
//!
//! The span is maintained incrementally along the depth-first walk, so a
//! prefix of factors is eliminated once and shared by all its extensions.
//! Over GF(2) with at most 128 target monomials, vectors are single `u128`
//! words and the echelon basis is indexed by leading bit.

use std::fmt;
use std::ops::Range;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use crate::arith::{mod_inverse, Field, Scalar};
use crate::polyring::{basis_of_degree, Monomial, Poly, Ring};

use super::{
    cofactor_solve, form_degree, verify_decomposition, Certificate, Decomposition, Exhaustion, Mode, Quantity,
    SearchReport, SearchStats, StrengthError,
};

/// Degree splits of one candidate decomposition, as the nondecreasing list
/// of `g`-side degrees `e` (each pair is `(e, d−e)`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DegreeSplitShape {
    d: u32,
    es: Vec<u32>,
}

impl DegreeSplitShape {
    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn g_degrees(&self) -> &[u32] {
        &self.es
    }

    pub fn len(&self) -> usize {
        self.es.len()
    }

    pub fn is_empty(&self) -> bool {
        self.es.is_empty()
    }
}

impl fmt::Display for DegreeSplitShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.es.iter().map(|e| format!("({},{})", e, self.d - e)).collect();
        write!(f, "{}", parts.join(" "))
    }
}

struct Split {
    e: u32,
    g_basis: Vec<Monomial>,
    h_basis: Vec<Monomial>,
    /// `table[k][j]`: target row of `g_basis[k] · h_basis[j]`.
    table: Vec<Vec<usize>>,
    /// Number of nonzero forms of degree `e` up to scaling.
    count: Option<u64>,
    /// GF(2) only: `masks[k][j] = 1 << table[k][j]`.
    masks: Vec<Vec<u128>>,
}

/// Precomputed tables for exhaustive searches against one form.
pub struct SearchPlan {
    f: Poly,
    ring: Ring,
    p: u32,
    d: u32,
    rows: usize,
    target: Vec<u32>,
    splits: Vec<Split>,
}

fn projective_count(p: u32, n: usize) -> Option<u64> {
    // (p^n − 1)/(p − 1) = 1 + p + … + p^(n−1)
    let mut total: u64 = 0;
    let mut power: u64 = 1;
    for i in 0..n {
        total = total.checked_add(power)?;
        if i + 1 < n {
            power = power.checked_mul(p as u64)?;
        }
    }
    Some(total)
}

fn binomial(n: u64, k: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for i in 0..k as u64 {
        if i >= n {
            return Some(0);
        }
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

impl SearchPlan {
    pub fn new(f: &Poly) -> Result<SearchPlan, StrengthError> {
        let p = match f.field() {
            Field::Prime(p) => p,
            Field::Rational => return Err(StrengthError::InfiniteFieldExhaustion),
        };
        if f.uses_params() {
            return Err(StrengthError::ParametersUnsupported);
        }
        let d = form_degree(f)?;
        let ring = f.ring().clone();
        let target_basis = basis_of_degree(&ring, d);
        let index: std::collections::HashMap<&Monomial, usize> =
            target_basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let target = f
            .coordinates(&target_basis)
            .expect("form of degree d lies in the degree-d span")
            .iter()
            .map(|c| c.residue().expect("prime field"))
            .collect();
        let rows = target_basis.len();
        let mut splits = Vec::new();
        for e in 1..=d / 2 {
            let g_basis = basis_of_degree(&ring, e);
            let h_basis = basis_of_degree(&ring, d - e);
            if g_basis.is_empty() || h_basis.is_empty() {
                continue;
            }
            let table: Vec<Vec<usize>> = g_basis
                .iter()
                .map(|g| h_basis.iter().map(|h| index[&g.mul(h)]).collect())
                .collect();
            let masks = if p == 2 && rows <= 128 {
                table
                    .iter()
                    .map(|row| row.iter().map(|&t| 1u128 << t).collect())
                    .collect()
            } else {
                Vec::new()
            };
            splits.push(Split {
                e,
                count: projective_count(p, g_basis.len()),
                g_basis,
                h_basis,
                table,
                masks,
            });
        }
        Ok(SearchPlan {
            f: f.clone(),
            ring,
            p,
            d,
            rows,
            target,
            splits,
        })
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    /// Number of target monomials.
    pub fn rows(&self) -> usize {
        self.rows
    }

    fn split(&self, e: u32) -> &Split {
        self.splits.iter().find(|s| s.e == e).expect("shape uses a known split")
    }

    /// All shapes of length `r`, in lexicographic order of their degrees.
    pub fn shapes(&self, r: usize) -> Vec<DegreeSplitShape> {
        fn rec(es: &[u32], from: usize, r: usize, cur: &mut Vec<u32>, d: u32, out: &mut Vec<DegreeSplitShape>) {
            if cur.len() == r {
                out.push(DegreeSplitShape { d, es: cur.clone() });
                return;
            }
            for i in from..es.len() {
                cur.push(es[i]);
                rec(es, i, r, cur, d, out);
                cur.pop();
            }
        }
        let es: Vec<u32> = self.splits.iter().map(|s| s.e).collect();
        let mut out = Vec::new();
        if r > 0 {
            rec(&es, 0, r, &mut Vec::new(), self.d, &mut out);
        }
        out
    }

    /// Number of normalized `g`-tuples of a shape.
    pub fn tuple_count(&self, shape: &DegreeSplitShape) -> Option<u128> {
        let mut total: u128 = 1;
        let mut i = 0;
        while i < shape.es.len() {
            let e = shape.es[i];
            let run = shape.es[i..].iter().take_while(|&&x| x == e).count();
            total = total.checked_mul(binomial(self.split(e).count?, run)?)?;
            i += run;
        }
        Some(total)
    }

    /// Size of the enumeration range of the first factor.
    pub fn first_level_count(&self, shape: &DegreeSplitShape) -> Result<u64, StrengthError> {
        let s = self.split(shape.es[0]);
        for &e in &shape.es {
            if self.split(e).count.is_none() {
                return Err(StrengthError::SearchSpaceTooLarge(format!(
                    "more than 2^64 forms of degree {e} up to scaling"
                )));
            }
        }
        Ok(s.count.expect("checked"))
    }

    /// Number of nonzero forms of degree `e` up to scaling, if it fits.
    pub fn form_count(&self, e: u32) -> Option<u64> {
        self.split(e).count
    }

    /// Coefficients of the `idx`-th normalized form of degree `e`.
    ///
    /// Forms are grouped by the position `l` of their first nonzero
    /// coefficient, last position first; inside a group the coefficients
    /// after `l` are the base-`p` digits of the offset.
    fn decode(&self, split: &Split, mut idx: u64) -> Vec<u32> {
        let n = split.g_basis.len();
        let mut out = vec![0u32; n];
        let p = self.p as u64;
        let mut size: u64 = 1;
        for l in (0..n).rev() {
            if idx < size {
                out[l] = 1;
                for slot in out[l + 1..].iter_mut().rev() {
                    *slot = (idx % p) as u32;
                    idx /= p;
                }
                return out;
            }
            idx -= size;
            size = size.saturating_mul(p);
        }
        unreachable!("index beyond the projective count")
    }

    /// The `idx`-th normalized form of degree `e` as a polynomial.
    pub fn form(&self, e: u32, idx: u64) -> Poly {
        let split = self.split(e);
        let coeffs: Vec<Scalar> = self
            .decode(split, idx)
            .into_iter()
            .map(|c| Scalar::from_i64(self.ring.field(), c as i64))
            .collect();
        Poly::from_coordinates(&self.ring, &split.g_basis, &coeffs)
    }

    fn use_gf2(&self) -> bool {
        self.p == 2 && self.rows <= 128
    }

    /// Search the tuples whose first factor index lies in `range`.
    pub fn search_range(
        &self,
        shape: &DegreeSplitShape,
        range: Range<u64>,
        workers: usize,
        cancel: &AtomicBool,
    ) -> RangeOutcome {
        if workers <= 1 || range.end - range.start <= 1 {
            return self.run_chunk(shape, range, cancel);
        }
        let len = range.end - range.start;
        let chunk = (len / (workers as u64 * 16)).max(1);
        let next = AtomicU64::new(range.start);
        let merged = Mutex::new(RangeOutcome::default());
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let a = next.fetch_add(chunk, Ordering::SeqCst);
                    if a >= range.end || cancel.load(Ordering::Relaxed) {
                        break;
                    }
                    let out = self.run_chunk(shape, a..(a + chunk).min(range.end), cancel);
                    if out.found.is_some() {
                        cancel.store(true, Ordering::Relaxed);
                    }
                    merged.lock().expect("no poisoned workers").merge(out);
                });
            }
        });
        let mut out = merged.into_inner().expect("no poisoned workers");
        out.complete = out.found.is_none() && !cancel.load(Ordering::Relaxed);
        out
    }

    fn run_chunk(&self, shape: &DegreeSplitShape, range: Range<u64>, cancel: &AtomicBool) -> RangeOutcome {
        if self.use_gf2() {
            let target =
                self.target
                    .iter()
                    .enumerate()
                    .fold(0u128, |acc, (i, &c)| if c != 0 { acc | (1 << i) } else { acc });
            Walker::new(self, shape, Gf2Echelon::new(), target, cancel).run(range)
        } else {
            let target = self.target.clone();
            Walker::new(self, shape, DenseEchelon::new(self.p, self.rows), target, cancel).run(range)
        }
    }

    /// Whether `f` lies in the span of the products of the given factors.
    pub fn check_tuple(&self, shape: &DegreeSplitShape, picks: &[u64]) -> bool {
        let cancel = AtomicBool::new(false);
        if self.use_gf2() {
            let target =
                self.target
                    .iter()
                    .enumerate()
                    .fold(0u128, |acc, (i, &c)| if c != 0 { acc | (1 << i) } else { acc });
            Walker::new(self, shape, Gf2Echelon::new(), target, &cancel).check(picks)
        } else {
            Walker::new(
                self,
                shape,
                DenseEchelon::new(self.p, self.rows),
                self.target.clone(),
                &cancel,
            )
            .check(picks)
        }
    }

    /// Verified decomposition from a successful tuple.
    pub fn certificate(&self, shape: &DegreeSplitShape, picks: &[u64]) -> Result<Decomposition, StrengthError> {
        let gs: Vec<Poly> = shape.es.iter().zip(picks).map(|(&e, &i)| self.form(e, i)).collect();
        let hs = cofactor_solve(&self.f, &gs)
            .ok_or_else(|| StrengthError::Internal("cofactor system unsolvable for a successful tuple".into()))?;
        let pairs: Vec<(Poly, Poly)> = gs.into_iter().zip(hs).filter(|(_, h)| !h.is_zero()).collect();
        let dec = Decomposition::new(&self.ring, pairs)?;
        if !verify_decomposition(&self.f, &dec)? {
            return Err(StrengthError::Internal("certificate failed verification".into()));
        }
        Ok(dec)
    }
}

/// Result of searching part of one shape.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RangeOutcome {
    /// Enumeration indices of a successful tuple.
    pub found: Option<Vec<u64>>,
    pub tuples: u64,
    pub nodes: u64,
    /// Whole range searched without success or cancellation.
    pub complete: bool,
}

impl RangeOutcome {
    fn merge(&mut self, other: RangeOutcome) {
        self.tuples += other.tuples;
        self.nodes += other.nodes;
        match (&self.found, other.found) {
            (None, Some(f)) => self.found = Some(f),
            (Some(a), Some(b)) if b < *a => self.found = Some(b),
            _ => {}
        }
    }
}

trait Echelon {
    type V: Clone;
    fn columns(&self, plan: &SearchPlan, split: &Split, idx: u64, out: &mut Vec<Self::V>);
    fn insert(&mut self, v: Self::V);
    fn contains(&self, v: &Self::V) -> bool;
    fn depth(&self) -> usize;
    fn truncate(&mut self, depth: usize);
}

struct Gf2Echelon {
    pivots: Box<[u128; 128]>,
    stack: Vec<u8>,
}

impl Gf2Echelon {
    fn new() -> Self {
        Gf2Echelon {
            pivots: Box::new([0; 128]),
            stack: Vec::with_capacity(128),
        }
    }

    #[inline]
    fn reduce(&self, mut v: u128) -> u128 {
        while v != 0 {
            let b = self.pivots[127 - v.leading_zeros() as usize];
            if b == 0 {
                break;
            }
            v ^= b;
        }
        v
    }
}

impl Echelon for Gf2Echelon {
    type V = u128;

    fn columns(&self, _plan: &SearchPlan, split: &Split, idx: u64, out: &mut Vec<u128>) {
        let n = split.g_basis.len();
        let mask = idx + 1;
        out.clear();
        out.resize(split.h_basis.len(), 0);
        let mut bits = mask;
        while bits != 0 {
            let b = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let k = n - 1 - b;
            for (col, m) in out.iter_mut().zip(&split.masks[k]) {
                *col |= m;
            }
        }
    }

    fn insert(&mut self, v: u128) {
        let v = self.reduce(v);
        if v != 0 {
            let top = 127 - v.leading_zeros() as usize;
            self.pivots[top] = v;
            self.stack.push(top as u8);
        }
    }

    fn contains(&self, v: &u128) -> bool {
        self.reduce(*v) == 0
    }

    fn depth(&self) -> usize {
        self.stack.len()
    }

    fn truncate(&mut self, depth: usize) {
        while self.stack.len() > depth {
            let t = self.stack.pop().expect("nonempty");
            self.pivots[t as usize] = 0;
        }
    }
}

struct DenseEchelon {
    p: u64,
    pivots: Vec<Option<Vec<u32>>>,
    stack: Vec<usize>,
}

impl DenseEchelon {
    fn new(p: u32, rows: usize) -> Self {
        DenseEchelon {
            p: p as u64,
            pivots: vec![None; rows],
            stack: Vec::new(),
        }
    }

    /// Eliminates pivots from the front; returns the first free nonzero row.
    fn reduce(&self, v: &mut [u32]) -> Option<usize> {
        for i in 0..v.len() {
            if v[i] == 0 {
                continue;
            }
            match &self.pivots[i] {
                Some(b) => {
                    let c = self.p - v[i] as u64;
                    for t in i..v.len() {
                        if b[t] != 0 {
                            v[t] = ((v[t] as u64 + c * b[t] as u64) % self.p) as u32;
                        }
                    }
                }
                None => return Some(i),
            }
        }
        None
    }
}

impl Echelon for DenseEchelon {
    type V = Vec<u32>;

    fn columns(&self, plan: &SearchPlan, split: &Split, idx: u64, out: &mut Vec<Vec<u32>>) {
        let coeffs = plan.decode(split, idx);
        out.clear();
        for j in 0..split.h_basis.len() {
            let mut col = vec![0u32; plan.rows];
            for (k, &c) in coeffs.iter().enumerate() {
                if c != 0 {
                    col[split.table[k][j]] = c;
                }
            }
            out.push(col);
        }
    }

    fn insert(&mut self, mut v: Vec<u32>) {
        if let Some(i) = self.reduce(&mut v) {
            let inv = mod_inverse(v[i], self.p as u32).expect("nonzero residue") as u64;
            for x in v[i..].iter_mut() {
                *x = ((*x as u64 * inv) % self.p) as u32;
            }
            self.pivots[i] = Some(v);
            self.stack.push(i);
        }
    }

    fn contains(&self, v: &Vec<u32>) -> bool {
        let mut v = v.clone();
        self.reduce(&mut v).is_none()
    }

    fn depth(&self) -> usize {
        self.stack.len()
    }

    fn truncate(&mut self, depth: usize) {
        while self.stack.len() > depth {
            let i = self.stack.pop().expect("nonempty");
            self.pivots[i] = None;
        }
    }
}

struct Walker<'a, E: Echelon> {
    plan: &'a SearchPlan,
    shape: &'a DegreeSplitShape,
    engine: E,
    target: E::V,
    cancel: &'a AtomicBool,
    picks: Vec<u64>,
    buffers: Vec<Vec<E::V>>,
    tuples: u64,
    nodes: u64,
    cancelled: bool,
}

impl<'a, E: Echelon> Walker<'a, E> {
    fn new(plan: &'a SearchPlan, shape: &'a DegreeSplitShape, engine: E, target: E::V, cancel: &'a AtomicBool) -> Self {
        Walker {
            plan,
            shape,
            engine,
            target,
            cancel,
            picks: Vec::with_capacity(shape.len()),
            buffers: (0..shape.len()).map(|_| Vec::new()).collect(),
            tuples: 0,
            nodes: 0,
            cancelled: false,
        }
    }

    fn run(mut self, range: Range<u64>) -> RangeOutcome {
        let found = !self.shape.is_empty() && self.walk(0, range);
        RangeOutcome {
            found: found.then(|| self.picks.clone()),
            tuples: self.tuples,
            nodes: self.nodes,
            complete: !found && !self.cancelled,
        }
    }

    fn push(&mut self, level: usize, idx: u64) {
        let split = self.plan.split(self.shape.es[level]);
        let mut buf = std::mem::take(&mut self.buffers[level]);
        self.engine.columns(self.plan, split, idx, &mut buf);
        for c in buf.drain(..) {
            self.engine.insert(c);
        }
        self.buffers[level] = buf;
        self.picks.push(idx);
        self.nodes += 1;
    }

    fn walk(&mut self, level: usize, range: Range<u64>) -> bool {
        let last = level + 1 == self.shape.len();
        for idx in range {
            if self.cancel.load(Ordering::Relaxed) {
                self.cancelled = true;
                return false;
            }
            let mark = self.engine.depth();
            self.push(level, idx);
            let found = if last {
                self.tuples += 1;
                self.engine.contains(&self.target)
            } else {
                let e = self.shape.es[level + 1];
                let start = if e == self.shape.es[level] { idx + 1 } else { 0 };
                let end = self.plan.split(e).count.expect("checked by caller");
                self.walk(level + 1, start..end)
            };
            if found {
                return true;
            }
            self.picks.pop();
            self.engine.truncate(mark);
            if self.cancelled {
                return false;
            }
        }
        false
    }

    fn check(mut self, picks: &[u64]) -> bool {
        for (level, &idx) in picks.iter().enumerate() {
            self.push(level, idx);
        }
        self.engine.contains(&self.target)
    }
}

/// Exact strength over a prime field, trying lengths `1..=r_max` in order.
///
/// `workers` threads share each shape's first-factor range; the reported
/// value does not depend on it, the certificate may.
pub fn strength_exact(f: &Poly, r_max: usize, workers: usize) -> Result<SearchReport, StrengthError> {
    let start = Instant::now();
    let field = f.field().to_string();
    if f.is_zero() {
        return Ok(SearchReport {
            quantity: Quantity::Strength,
            field,
            mode: Mode::Exact,
            lower: 0,
            upper: Some(0),
            certificate: Certificate::Decomposition(Decomposition::new(f.ring(), vec![])?),
            exhausted: vec![],
            stats: SearchStats {
                workers: workers.max(1),
                ..SearchStats::default()
            },
        });
    }
    let plan = SearchPlan::new(f)?;
    let mut stats = SearchStats {
        workers: workers.max(1),
        ..SearchStats::default()
    };
    let mut exhausted = Vec::new();
    for r in 1..=r_max {
        let mut record = Exhaustion {
            r,
            shapes: vec![],
            tuples: 0,
        };
        for shape in plan.shapes(r) {
            let n1 = plan.first_level_count(&shape)?;
            let cancel = AtomicBool::new(false);
            let out = plan.search_range(&shape, 0..n1, workers, &cancel);
            stats.nodes += out.nodes;
            stats.tuples += out.tuples;
            if let Some(picks) = out.found {
                let dec = plan.certificate(&shape, &picks)?;
                if dec.len() != r {
                    return Err(StrengthError::Internal(format!(
                        "certificate of length {} at r = {r}",
                        dec.len()
                    )));
                }
                stats.elapsed_ms = start.elapsed().as_millis() as u64;
                return Ok(SearchReport {
                    quantity: Quantity::Strength,
                    field,
                    mode: Mode::Exact,
                    lower: r,
                    upper: Some(r),
                    certificate: Certificate::Decomposition(dec),
                    exhausted,
                    stats,
                });
            }
            record.shapes.push(shape.to_string());
            record.tuples += out.tuples;
        }
        exhausted.push(record);
    }
    stats.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(SearchReport {
        quantity: Quantity::Strength,
        field,
        mode: Mode::ExhaustedBelow,
        lower: r_max + 1,
        upper: None,
        certificate: Certificate::None,
        exhausted,
        stats,
    })
}
