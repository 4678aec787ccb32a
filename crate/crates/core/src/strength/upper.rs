//! Upper bounds on strength from heuristics; no field enumeration needed.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::Scalar;
use crate::polyring::{Monomial, Poly};

use super::search::SearchPlan;
use super::{
    cofactor_solve, form_degree, verify_decomposition, Certificate, Decomposition, Mode, Quantity, SearchReport,
    SearchStats, StrengthError,
};

/// A way of producing a candidate decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    /// One pair per term, splitting off a variable.
    TermByTerm,
    /// Repeatedly factor out the variable dividing the most remaining terms.
    GreedyCover,
    /// A supplied decomposition, used when it verifies.
    Hint(Decomposition),
    /// Random factor tuples checked by linear algebra (prime fields only).
    Random { attempts: usize, seed: u64 },
}

impl Strategy {
    /// Term grouping plus a modest random search over finite fields.
    pub fn defaults(f: &Poly) -> Vec<Strategy> {
        let mut out = vec![Strategy::TermByTerm, Strategy::GreedyCover];
        if f.field().is_finite() {
            out.push(Strategy::Random {
                attempts: 2000,
                seed: 0x5eed,
            });
        }
        out
    }
}

/// A variable of weight below `d` dividing `m`, preferring the first.
fn splittable_var(f: &Poly, m: &Monomial, d: u32) -> Option<usize> {
    let ring = f.ring();
    (0..ring.num_vars()).find(|&i| m.exps()[i] > 0 && ring.weight(i) < d)
}

fn unit_monomial(f: &Poly, var: usize) -> Monomial {
    let ring = f.ring();
    let mut exps = vec![0; ring.num_symbols()];
    exps[var] = 1;
    Monomial::new(ring, exps)
}

fn term_by_term(f: &Poly, d: u32) -> Option<Vec<(Poly, Poly)>> {
    let ring = f.ring();
    f.terms()
        .map(|(m, c)| {
            let v = splittable_var(f, m, d)?;
            let a = unit_monomial(f, v);
            let rest = a.quotient_of(m);
            Some((Poly::symbol(ring, v), Poly::monomial(ring, rest, c.clone())))
        })
        .collect()
}

fn greedy_cover(f: &Poly, d: u32) -> Option<Vec<(Poly, Poly)>> {
    let ring = f.ring();
    let mut remaining: Vec<(Monomial, Scalar)> = f.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
    let mut pairs = Vec::new();
    while !remaining.is_empty() {
        let best = (0..ring.num_vars())
            .filter(|&i| ring.weight(i) < d)
            .map(|i| (i, remaining.iter().filter(|(m, _)| m.exps()[i] > 0).count()))
            .filter(|&(_, n)| n > 0)
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))?;
        let a = unit_monomial(f, best.0);
        let (taken, rest): (Vec<_>, Vec<_>) = remaining.into_iter().partition(|(m, _)| m.exps()[best.0] > 0);
        let h = Poly::from_terms(ring, taken.into_iter().map(|(m, c)| (a.quotient_of(&m), c)));
        pairs.push((Poly::symbol(ring, best.0), h));
        remaining = rest;
    }
    Some(pairs)
}

/// Drops pairs while the remaining `g`s (or `h`s) still admit cofactors.
fn shrink(f: &Poly, mut pairs: Vec<(Poly, Poly)>) -> Vec<(Poly, Poly)> {
    'improve: loop {
        for i in 0..pairs.len() {
            for swap in [false, true] {
                let fixed: Vec<Poly> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, (g, h))| if swap { h.clone() } else { g.clone() })
                    .collect();
                if let Some(cof) = cofactor_solve(f, &fixed) {
                    pairs = fixed.into_iter().zip(cof).filter(|(_, h)| !h.is_zero()).collect();
                    continue 'improve;
                }
            }
        }
        return pairs;
    }
}

fn random_search(
    f: &Poly,
    best: usize,
    attempts: usize,
    seed: u64,
    stats: &mut SearchStats,
) -> Result<Option<Decomposition>, StrengthError> {
    let plan = SearchPlan::new(f)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found = None;
    for r in (1..best).rev() {
        let shapes: Vec<_> = plan
            .shapes(r)
            .into_iter()
            .filter(|s| plan.first_level_count(s).is_ok())
            .collect();
        if shapes.is_empty() {
            break;
        }
        let mut hit = None;
        for _ in 0..attempts {
            let shape = &shapes[rng.gen_range(0..shapes.len())];
            let mut picks: Vec<u64> = Vec::with_capacity(r);
            for (i, &e) in shape.g_degrees().iter().enumerate() {
                let n = plan.form_count(e).expect("shape filtered above");
                let lo = if i > 0 && shape.g_degrees()[i - 1] == e {
                    picks[i - 1] + 1
                } else {
                    0
                };
                if lo >= n {
                    break;
                }
                picks.push(rng.gen_range(lo..n));
            }
            if picks.len() != r {
                continue;
            }
            stats.tuples += 1;
            if plan.check_tuple(shape, &picks) {
                hit = Some(plan.certificate(shape, &picks)?);
                break;
            }
        }
        match hit {
            Some(d) => found = Some(d),
            None => break,
        }
    }
    Ok(found)
}

/// Best verified decomposition found by the given strategies.
pub fn strength_upper(f: &Poly, strategies: &[Strategy]) -> Result<SearchReport, StrengthError> {
    let start = Instant::now();
    let mut stats = SearchStats {
        workers: 1,
        ..SearchStats::default()
    };
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
            stats,
        });
    }
    let d = form_degree(f)?;
    let mut best: Option<Decomposition> = None;
    let offer = |cand: Decomposition, best: &mut Option<Decomposition>| -> Result<(), StrengthError> {
        if verify_decomposition(f, &cand).unwrap_or(false) && best.as_ref().is_none_or(|b| cand.len() < b.len()) {
            *best = Some(cand);
        }
        Ok(())
    };
    for s in strategies {
        match s {
            Strategy::TermByTerm | Strategy::GreedyCover => {
                let pairs = if *s == Strategy::TermByTerm {
                    term_by_term(f, d)
                } else {
                    greedy_cover(f, d)
                };
                if let Some(pairs) = pairs {
                    let pairs = if *s == Strategy::GreedyCover {
                        shrink(f, pairs)
                    } else {
                        pairs
                    };
                    offer(Decomposition::new(f.ring(), pairs)?, &mut best)?;
                }
            }
            Strategy::Hint(dec) => offer(dec.clone(), &mut best)?,
            Strategy::Random { attempts, seed } => {
                if !f.field().is_finite() || f.uses_params() {
                    continue;
                }
                let current = best.as_ref().map_or(usize::MAX, Decomposition::len);
                if let Some(dec) = random_search(f, current.min(64), *attempts, *seed, &mut stats)? {
                    offer(dec, &mut best)?;
                }
            }
        }
    }
    stats.elapsed_ms = start.elapsed().as_millis() as u64;
    let (upper, certificate) = match best {
        Some(dec) => (Some(dec.len()), Certificate::Decomposition(dec)),
        None => (None, Certificate::None),
    };
    Ok(SearchReport {
        quantity: Quantity::Strength,
        field,
        mode: Mode::UpperOnly,
        lower: 1,
        upper,
        certificate,
        exhausted: vec![],
        stats,
    })
}
