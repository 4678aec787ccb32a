//! Slice rank by enumeration of linear subspaces in row-echelon form.

use std::collections::HashMap;
use std::time::Instant;

use crate::arith::Scalar;
use crate::polyring::{Poly, Ring};
use crate::textio::print_poly;

use super::{
    cofactor_solve, form_degree, Certificate, Decomposition, Exhaustion, Mode, Quantity, SearchReport, SearchStats,
    StrengthError,
};

/// A linear subspace `{ℓ₁ = … = ℓ_r = 0}` on which a form vanishes.
///
/// The equations are in reduced row-echelon form: `ℓᵢ` has coefficient 1 on
/// its pivot variable, no other pivot variable occurs, and every other
/// variable in `ℓᵢ` comes after the pivot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceCertificate {
    ring: Ring,
    pivots: Vec<usize>,
    equations: Vec<Poly>,
}

impl SubspaceCertificate {
    pub fn equations(&self) -> &[Poly] {
        &self.equations
    }

    pub fn codimension(&self) -> usize {
        self.equations.len()
    }

    /// Images of the pivot variables under the parametrization of the
    /// subspace by the free variables.
    fn parametrization(&self) -> HashMap<String, Poly> {
        let mut map = HashMap::new();
        for i in 0..self.ring.num_vars() {
            let name = self.ring.symbol_name(i).to_string();
            let image = match self.pivots.iter().position(|&c| c == i) {
                Some(row) => {
                    let lead = Poly::symbol(&self.ring, i);
                    &lead - &self.equations[row]
                }
                None => Poly::symbol(&self.ring, i),
            };
            map.insert(name, image);
        }
        map
    }

    /// Whether `f` restricted to the subspace is zero.
    pub fn vanishes(&self, f: &Poly) -> Result<bool, StrengthError> {
        Ok(f.substitute(&self.ring, &self.parametrization())?.is_zero())
    }

    /// A strength decomposition with the equations as linear factors.
    pub fn to_decomposition(&self, f: &Poly) -> Result<Decomposition, StrengthError> {
        let hs = cofactor_solve(f, &self.equations)
            .ok_or_else(|| StrengthError::Internal("form does not vanish on the subspace".into()))?;
        let pairs = self
            .equations
            .iter()
            .cloned()
            .zip(hs)
            .filter(|(_, h)| !h.is_zero())
            .collect();
        Decomposition::new(&self.ring, pairs)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.equations
                .iter()
                .map(|e| serde_json::Value::String(format!("{} = 0", print_poly(e))))
                .collect(),
        )
    }
}

fn check_input(f: &Poly) -> Result<u32, StrengthError> {
    if !f.field().is_finite() {
        return Err(StrengthError::InfiniteFieldExhaustion);
    }
    if !f.ring().is_standard_graded() {
        return Err(StrengthError::WeightedRingUnsupported);
    }
    form_degree(f)
}

/// Pivot columns and the equations of one subspace.
type Echelon = (Vec<usize>, Vec<Poly>);

/// Calls `visit` on every codimension-`r` subspace in row-echelon form and
/// stops at the first `true`. Subspaces are ordered by the number of nonzero
/// free entries, then by pivot set (lexicographic), then by the positions
/// and values of those entries, so coordinate subspaces come first.
fn for_each_subspace(
    ring: &Ring,
    r: usize,
    mut visit: impl FnMut(&[usize], &[Poly]) -> Result<bool, StrengthError>,
) -> Result<Option<Echelon>, StrengthError> {
    let n = ring.num_vars();
    if r > n {
        return Ok(None);
    }
    let field = ring.field();
    let p = field.order().expect("finite field checked") as usize;
    let pivot_sets = combinations(n, r);
    let max_free = r * (n - r);
    for weight in 0..=max_free {
        for pivots in &pivot_sets {
            let free: Vec<(usize, usize)> = (0..r)
                .flat_map(|row| {
                    (pivots[row] + 1..n)
                        .filter(|c| !pivots.contains(c))
                        .map(move |c| (row, c))
                })
                .collect();
            if weight > free.len() {
                continue;
            }
            for support in combinations(free.len(), weight) {
                let mut values = vec![1usize; weight];
                loop {
                    let mut equations: Vec<Poly> = pivots.iter().map(|&c| Poly::symbol(ring, c)).collect();
                    for (&slot, &a) in support.iter().zip(&values) {
                        let (row, c) = free[slot];
                        let term = Poly::symbol(ring, c).scale(&Scalar::from_i64(field, a as i64));
                        equations[row] = &equations[row] + &term;
                    }
                    if visit(pivots, &equations)? {
                        return Ok(Some((pivots.clone(), equations)));
                    }
                    let mut i = 0;
                    while i < weight {
                        values[i] += 1;
                        if values[i] < p {
                            break;
                        }
                        values[i] = 1;
                        i += 1;
                    }
                    if i == weight {
                        break;
                    }
                }
            }
        }
    }
    Ok(None)
}

/// `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// The first codimension-`r` subspace on which `f` vanishes, if any.
pub fn slice_rank_upper(f: &Poly, r: usize) -> Result<Option<SubspaceCertificate>, StrengthError> {
    check_input(f)?;
    let ring = f.ring().clone();
    let found = for_each_subspace(&ring, r, |pivots, equations| {
        let cert = SubspaceCertificate {
            ring: ring.clone(),
            pivots: pivots.to_vec(),
            equations: equations.to_vec(),
        };
        cert.vanishes(f)
    })?;
    Ok(found.map(|(pivots, equations)| SubspaceCertificate {
        ring,
        pivots,
        equations,
    }))
}

fn subspace_count(ring: &Ring, r: usize) -> u64 {
    let mut count = 0;
    let _ = for_each_subspace(ring, r, |_, _| {
        count += 1;
        Ok(false)
    });
    count
}

/// Least `r` admitting a codimension-`r` subspace inside `{f = 0}`.
pub fn slice_rank_exact(f: &Poly) -> Result<SearchReport, StrengthError> {
    let start = Instant::now();
    let field = f.field().to_string();
    if f.is_zero() {
        return Ok(SearchReport {
            quantity: Quantity::SliceRank,
            field,
            mode: Mode::Exact,
            lower: 0,
            upper: Some(0),
            certificate: Certificate::None,
            exhausted: vec![],
            stats: SearchStats::default(),
        });
    }
    check_input(f)?;
    let mut exhausted = Vec::new();
    let mut stats = SearchStats {
        workers: 1,
        ..SearchStats::default()
    };
    for r in 1..=f.ring().num_vars() {
        let before = stats.nodes;
        let mut visited = 0u64;
        let found = {
            let ring = f.ring().clone();
            for_each_subspace(&ring, r, |pivots, equations| {
                visited += 1;
                SubspaceCertificate {
                    ring: ring.clone(),
                    pivots: pivots.to_vec(),
                    equations: equations.to_vec(),
                }
                .vanishes(f)
            })?
        };
        stats.nodes = before + visited;
        if let Some((pivots, equations)) = found {
            stats.elapsed_ms = start.elapsed().as_millis() as u64;
            return Ok(SearchReport {
                quantity: Quantity::SliceRank,
                field,
                mode: Mode::Exact,
                lower: r,
                upper: Some(r),
                certificate: Certificate::Subspace(SubspaceCertificate {
                    ring: f.ring().clone(),
                    pivots,
                    equations,
                }),
                exhausted,
                stats,
            });
        }
        exhausted.push(Exhaustion {
            r,
            shapes: vec![format!("{} subspaces of codimension {r}", subspace_count(f.ring(), r))],
            tuples: visited,
        });
    }
    Err(StrengthError::Internal(
        "a form of positive degree vanishes at the origin".into(),
    ))
}
