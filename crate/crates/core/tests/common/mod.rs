//! Shared test helpers: an exhaustive strength oracle over GF(2) and random
//! form generators.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use strength_core::arith::{Field, Scalar};
use strength_core::polyring::{basis_of_degree, Monomial, Poly, Ring};
use strength_core::textio::parse_poly;

fn mask_of(p: &Poly, basis: &[Monomial]) -> usize {
    let coords = p.coordinates(basis).expect("form lies in the basis span");
    coords
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .fold(0, |m, (i, _)| m | 1 << i)
}

fn form_of(ring: &Ring, basis: &[Monomial], mask: usize) -> Poly {
    let one = Scalar::one(ring.field());
    Poly::from_terms(
        ring,
        basis
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, m)| (m.clone(), one.clone())),
    )
}

/// Strength over GF(2) by brute force: every product `g·h` of nonzero forms
/// with `1 ≤ deg g ≤ deg f − 1` is multiplied out, and the sets of sums of
/// `r` products are grown layer by layer until `f` appears. No linear
/// systems are solved. Returns `None` past `r_max`.
pub fn naive_strength_gf2(f: &Poly, r_max: usize) -> Option<usize> {
    assert_eq!(f.field(), Field::Prime(2));
    if f.is_zero() {
        return Some(0);
    }
    let ring = f.ring();
    let d = f.homogeneous_degree().expect("homogeneous");
    let target = basis_of_degree(ring, d);
    assert!(target.len() <= 22, "target space too large for the oracle");
    let mut is_product = vec![false; 1 << target.len()];
    for e in 1..d {
        let gb = basis_of_degree(ring, e);
        let hb = basis_of_degree(ring, d - e);
        if gb.is_empty() || hb.is_empty() {
            continue;
        }
        let gs: Vec<Poly> = (1..1usize << gb.len()).map(|m| form_of(ring, &gb, m)).collect();
        let hs: Vec<Poly> = (1..1usize << hb.len()).map(|m| form_of(ring, &hb, m)).collect();
        for g in &gs {
            for h in &hs {
                is_product[mask_of(&(g * h), &target)] = true;
            }
        }
    }
    let products: Vec<usize> = (0..is_product.len()).filter(|&m| is_product[m]).collect();
    let goal = mask_of(f, &target);
    let mut reach = vec![false; 1 << target.len()];
    reach[0] = true;
    for r in 0..=r_max {
        if reach[goal] {
            return Some(r);
        }
        let mut next = reach.clone();
        for a in (0..reach.len()).filter(|&a| reach[a]) {
            for &p in &products {
                next[a ^ p] = true;
            }
        }
        reach = next;
    }
    None
}

/// The committed ternary cubics with their GL(3, 2)-orbit sizes.
pub fn cubic_fixture(ring: &Ring) -> Vec<(Poly, usize)> {
    include_str!("../fixtures/cubics_gf2.txt")
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let (poly, size) = l.split_once('#').expect("orbit size annotation");
            (parse_poly(ring, poly.trim()).unwrap(), size.trim().parse().unwrap())
        })
        .collect()
}

pub fn random_scalar(field: Field, rng: &mut ChaCha8Rng) -> Scalar {
    match field {
        Field::Prime(p) => Scalar::from_i64(field, rng.gen_range(0..p as i64)),
        Field::Rational => Scalar::from_i64(field, rng.gen_range(-4..=4)),
    }
}

pub fn random_form(ring: &Ring, d: u32, rng: &mut ChaCha8Rng) -> Poly {
    let basis = basis_of_degree(ring, d);
    let coords: Vec<Scalar> = basis.iter().map(|_| random_scalar(ring.field(), rng)).collect();
    Poly::from_coordinates(ring, &basis, &coords)
}

/// A random form with at most `terms` terms.
pub fn sparse_form(ring: &Ring, d: u32, terms: usize, rng: &mut ChaCha8Rng) -> Poly {
    let basis = basis_of_degree(ring, d);
    let mut p = Poly::zero(ring);
    for _ in 0..terms {
        let m = basis[rng.gen_range(0..basis.len())].clone();
        p = &p + &Poly::monomial(ring, m, random_scalar(ring.field(), rng));
    }
    p
}

/// Every form of degree `d` over GF(2), the zero form first.
pub fn all_forms_gf2(ring: &Ring, d: u32) -> Vec<Poly> {
    let basis = basis_of_degree(ring, d);
    (0..1usize << basis.len()).map(|m| form_of(ring, &basis, m)).collect()
}
