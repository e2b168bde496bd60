use qsum::verify::{check_suite, GridSpec};

#[test]
fn default_grid_passes_every_check() {
    let report = check_suite(&GridSpec::default()).unwrap();
    for c in report.checks.iter().filter(|c| !c.pass) {
        eprintln!("FAILED {} [{}]: expected {} observed {}", c.name, c.params, c.expected, c.observed);
    }
    assert!(report.all_passed());
    assert!(report.passed > 100);
}

#[test]
fn suite_is_deterministic() {
    let spec = GridSpec {
        max_n: 3,
        max_k: 3,
        max_lemma_k: 8,
        max_parity_n: 4,
        max_formula_n: 5,
        max_formula_k: 4,
        ..GridSpec::default()
    };
    let a = serde_json::to_string(&check_suite(&spec).unwrap()).unwrap();
    let b = serde_json::to_string(&check_suite(&spec).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn zero_tolerance_exposes_rounding() {
    let spec = GridSpec {
        max_n: 3,
        max_k: 3,
        tolerance: 0.0,
        algebraic_tolerance: 0.0,
        max_lemma_k: 8,
        max_parity_n: 4,
        max_formula_n: 4,
        max_formula_k: 3,
        ..GridSpec::default()
    };
    let report = check_suite(&spec).unwrap();
    assert!(report.failed > 0);
    assert!(!report.all_passed());
}

#[test]
fn default_report_names_every_claim() {
    let spec = GridSpec::default();
    let report = check_suite(&spec).unwrap();
    let names: std::collections::BTreeSet<_> = report.names().collect();
    for required in [
        "unitarity",
        "phase_kickback",
        "two_trit_trace",
        "two_trit_final_closed_form",
        "three_trit_trace",
        "three_trit_final_closed_form",
        "lemma3_closed_form",
        "lemma3_peak_value",
        "lemma3_peak_at_sum",
        "lemma3_central_mass",
        "lemma4",
        "core_position_zero",
        "core_character_state",
        "theorem5_worst_case",
        "oracle_uniformity",
        "query_count_max",
        "approximate_success",
        "uselessness",
        "parity",
        "identify_endpoints",
        "identify_monotone",
        "identify_spot_value",
        "sum_bound_spot_value",
        "sum_bound_above_identify",
        "dominates_identification",
        "figure_curve_shape",
    ] {
        assert!(names.contains(required), "missing check {required}");
    }
}
