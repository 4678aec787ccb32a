mod common;

use std::collections::{BTreeSet, HashSet};

use common::{all_forms_gf2, cubic_fixture, naive_strength_gf2};
use strength_core::arith::{Field, Scalar};
use strength_core::linalg::Matrix;
use strength_core::paperlab::analog_polynomial;
use strength_core::polyring::{LinearChange, WeightedRing};
use strength_core::strength::{strength_exact, verify_decomposition, Mode};
use strength_core::textio::print_poly;

#[test]
fn fixture_agrees_with_naive_oracle() {
    let ring = WeightedRing::standard(Field::Prime(2), &["x", "y", "z"]).unwrap();
    let fixture = cubic_fixture(&ring);
    assert_eq!(fixture.len(), 500);
    for (f, _) in &fixture {
        let rep = strength_exact(f, 3, 1).unwrap();
        assert_eq!(rep.value(), naive_strength_gf2(f, 3), "{}", print_poly(f));
        assert!(verify_decomposition(f, rep.decomposition().unwrap()).unwrap());
    }
}

#[test]
fn fixture_covers_every_orbit_size() {
    let ring = WeightedRing::standard(Field::Prime(2), &["x", "y", "z"]).unwrap();
    let f2 = Field::Prime(2);
    let mut group = Vec::new();
    for bits in 0u32..512 {
        let rows: Vec<Vec<Scalar>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| Scalar::from_i64(f2, (bits >> (3 * i + j) & 1) as i64))
                    .collect()
            })
            .collect();
        let m = Matrix::from_rows(f2, rows);
        if m.rank() == 3 {
            group.push(LinearChange::from_matrix(&ring, &m).unwrap());
        }
    }
    assert_eq!(group.len(), 168);
    let orbit_size = |f: &strength_core::polyring::Poly| {
        group
            .iter()
            .map(|g| print_poly(&f.apply_linear_change(g).unwrap()))
            .collect::<HashSet<_>>()
            .len()
    };
    let all: BTreeSet<usize> = all_forms_gf2(&ring, 3)[1..].iter().map(orbit_size).collect();
    let mut sampled = BTreeSet::new();
    for (f, size) in cubic_fixture(&ring) {
        assert_eq!(orbit_size(&f), size, "{}", print_poly(&f));
        sampled.insert(size);
    }
    assert_eq!(sampled, all);
}

#[test]
fn small_form_library_agrees_with_naive_oracle() {
    let names = ["x", "y", "z"];
    for n in 1..=3 {
        let ring = WeightedRing::standard(Field::Prime(2), &names[..n]).unwrap();
        for d in 2..=3 {
            for f in all_forms_gf2(&ring, d) {
                let rep = strength_exact(&f, 3, 1).unwrap();
                assert_eq!(rep.value(), naive_strength_gf2(&f, 3), "{}", print_poly(&f));
            }
        }
    }
}

#[test]
fn two_term_analogue_matches_naive_oracle() {
    let f = analog_polynomial(2, Field::Prime(2)).unwrap();
    assert_eq!(naive_strength_gf2(&f, 3), Some(2));
    let rep = strength_exact(&f, 3, 1).unwrap();
    assert_eq!(rep.mode, Mode::Exact);
    assert_eq!(rep.value(), Some(2));
}

#[test]
fn weighted_forms_agree_with_naive_oracle() {
    let ring = strength_core::textio::parse_ring("GF(2)[x:1, y:1, f:2]").unwrap();
    for f in all_forms_gf2(&ring, 4) {
        let rep = strength_exact(&f, 3, 1).unwrap();
        assert_eq!(rep.value(), naive_strength_gf2(&f, 3), "{}", print_poly(&f));
    }
}
