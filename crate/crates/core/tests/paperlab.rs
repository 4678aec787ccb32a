use strength_core::arith::Field;
use strength_core::paperlab::{analog_search_size, analog_strength, verify_paper, VerifyConfig};
use strength_core::strength::Mode;

#[test]
fn analogues_over_gf3_have_strength_k() {
    for k in 1..=3 {
        let rep = analog_strength(k, Field::Prime(3), 3, 1, false).unwrap();
        assert_eq!(rep.mode, Mode::Exact);
        assert_eq!(rep.value(), Some(k), "k = {k}");
        assert_eq!(rep.exhausted.len(), k - 1);
    }
}

#[test]
fn analogue_search_sizes() {
    assert_eq!(analog_search_size(1, Field::Prime(2)).unwrap(), Some(0));
    // Lengths 1 and 2 for x^2 f + y^2 g + u^2 p over GF(3) include the
    // (2,2) pairs of the 9841 normalized quadrics.
    let n = analog_search_size(3, Field::Prime(3)).unwrap().unwrap();
    assert!(n > 9841 * 9840 / 2);
    assert!(analog_search_size(3, Field::Prime(5)).unwrap().unwrap() > 50_000_000);
}

#[test]
fn consolidated_checks_pass_over_gf2_and_rationals() {
    for field in [Field::Prime(2), Field::Rational] {
        let mut config = VerifyConfig::new(field);
        config.cases.samples = 100;
        let checks = verify_paper(&config).unwrap();
        assert_eq!(checks.len(), 8);
        for c in &checks {
            assert!(c.passed, "{field} {}: {}", c.name, c.detail);
        }
        let analog = checks.iter().find(|c| c.name == "analog-strength").unwrap();
        assert_eq!(analog.skipped, !field.is_finite());
    }
}
