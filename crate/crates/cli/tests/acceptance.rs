//! Acceptance gate: every criterion of the verification plan, one test per
//! criterion, printing one pass/fail line each. All tolerances are pinned
//! here and in the scenario defaults; nothing is tuned at runtime.
//!
//! Run with `cargo test -p scaleqm-cli --test acceptance -- --nocapture` to
//! see the per-criterion lines.

use std::collections::BTreeMap;
use std::time::Instant;

use scaleqm_cli::config::{Scenario, ScenarioConfig};
use scaleqm_cli::report::CheckReport;
use scaleqm_cli::scenarios::{run_scenario, RunContext};

struct SuiteRun {
    reports: BTreeMap<String, CheckReport>,
    wall_ms: f64,
}

fn run(scenario: Scenario) -> SuiteRun {
    let cfg = ScenarioConfig::minimal(scenario);
    let ctx = RunContext::default();
    let start = Instant::now();
    let output = run_scenario(&cfg, &ctx).expect("scenario setup");
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let reports = output
        .reports
        .into_iter()
        .map(|r| (r.outcome.id.clone(), r))
        .collect();
    SuiteRun { reports, wall_ms }
}

impl SuiteRun {
    fn report(&self, id: &str) -> &CheckReport {
        self.reports
            .get(id)
            .unwrap_or_else(|| panic!("missing check id {id}"))
    }

    fn assert_pass(&self, criterion: usize, ids: &[&str]) {
        for id in ids {
            let r = self.report(id);
            assert!(
                r.outcome.pass,
                "criterion {criterion}: FAIL at {id}: residual {:.6e} > tolerance {:.6e} ({})",
                r.outcome.residual,
                r.outcome.tolerance,
                r.outcome.note.as_deref().unwrap_or("no note"),
            );
        }
    }
}

fn pass_line(criterion: usize, description: &str) {
    println!("criterion {criterion:>2}: PASS - {description}");
}

#[test]
fn criterion_01_scaled_algebra_exactness() {
    let suite = run(Scenario::Axioms);
    suite.assert_pass(
        1,
        &["axioms_exact_sweep", "axioms_exact_structure", "axioms_float_sweep"],
    );
    // Runtime budget: the 1000-tuple exact and float sweeps in under 1 s.
    let sweep_ms = suite.report("axioms_exact_sweep").runtime_ms
        + suite.report("axioms_float_sweep").runtime_ms;
    assert!(sweep_ms < 1000.0, "criterion 1: sweeps took {sweep_ms:.1} ms");
    pass_line(1, &format!("exact + float law sweeps, 1000 tuples in {sweep_ms:.0} ms"));
}

#[test]
fn criterion_02_numeral_worked_values() {
    let suite = run(Scenario::Numerals);
    suite.assert_pass(
        2,
        &[
            "numerals_unit_value",
            "numerals_zero_value",
            "numerals_worked_negative",
            "numerals_worked_dbf",
            "numerals_scaled_unit",
        ],
    );
    // The 315.006-vs-215.006 discrepancy must be called out in the report.
    let note = suite
        .report("numerals_worked_dbf")
        .outcome
        .note
        .clone()
        .unwrap_or_default();
    assert!(
        note.contains("315.006") && note.contains("215.006"),
        "criterion 2: discrepancy note missing: {note}"
    );
    pass_line(2, "worked numeral values exact; digit-map discrepancy documented");
}

#[test]
fn criterion_03_gauge_intertwining() {
    let suite = run(Scenario::Operators);
    suite.assert_pass(3, &["intertwine_halving"]);
    let r = suite.report("intertwine_halving");
    assert!(
        r.runtime_ms < 5000.0,
        "criterion 3: took {:.1} ms",
        r.runtime_ms
    );
    pass_line(
        3,
        &format!(
            "H_x(e^g psi) = e^g H^x psi residual halves at order 2 ({})",
            r.outcome.note.as_deref().unwrap_or("")
        ),
    );
}

#[test]
fn criterion_04_localization_commutes_with_hamiltonian() {
    let suite = run(Scenario::Operators);
    suite.assert_pass(4, &["commutes_halving", "commutes_potential_only"]);
    let v_only = suite.report("commutes_potential_only");
    assert!(v_only.outcome.tolerance <= 1e-14);
    pass_line(
        4,
        &format!(
            "localization commutes with H at order 2; V-only residual {:.2e} <= 1e-14",
            v_only.outcome.residual
        ),
    );
}

#[test]
fn criterion_05_momentum_kernel() {
    let suite = run(Scenario::Momentum);
    suite.assert_pass(
        5,
        &["kernel_uniform_delta", "kernel_convolution", "kernel_weak_field_quadratic"],
    );
    assert_eq!(
        suite.report("kernel_uniform_delta").outcome.residual,
        0.0,
        "criterion 5: the uniform-field kernel must be lattice-exact"
    );
    assert!(suite.report("kernel_convolution").outcome.tolerance <= 1e-10);
    pass_line(5, "kernel lattice-exact at g = 1; convolution identity <= 1e-10; eps^2 scaling");
}

#[test]
fn criterion_06_localization_identities() {
    let suite = run(Scenario::Localize);
    suite.assert_pass(
        6,
        &[
            "localize_uniform_identity",
            "localize_phase_modulus",
            "localize_translate_direct",
            "localize_translate_roundtrip",
            "localize_argmax_invariant",
        ],
    );
    assert_eq!(suite.report("localize_uniform_identity").outcome.residual, 0.0);
    assert!(suite.report("localize_phase_modulus").outcome.tolerance <= 1e-14);
    assert!(suite.report("localize_translate_roundtrip").outcome.tolerance <= 1e-13);
    pass_line(6, "identity localization bit-exact; modulus, round-trip, argmax within bounds");
}

#[test]
fn criterion_07_covariant_derivative() {
    let suite = run(Scenario::Operators);
    suite.assert_pass(
        7,
        &[
            "covariant_uniform_reduces",
            "covariant_annihilation",
            "covariant_transport_quotient",
        ],
    );
    assert_eq!(
        suite.report("covariant_uniform_reduces").outcome.residual,
        0.0,
        "criterion 7: Gamma = 0 must reduce to the plain derivative bit for bit"
    );
    pass_line(7, "D reduces at Gamma = 0; annihilates e^(-gamma) at O(h^2); transport O(h)");
}

#[test]
fn criterion_08_evolution() {
    let suite = run(Scenario::Evolve);
    suite.assert_pass(8, &["evolve_free_gaussian", "evolve_norm_drift", "evolve_intertwined"]);
    assert!(suite.report("evolve_free_gaussian").outcome.tolerance <= 1e-6);
    assert!(suite.report("evolve_norm_drift").outcome.tolerance <= 1e-10);
    assert!(suite.report("evolve_intertwined").outcome.tolerance <= 1e-6);
    pass_line(
        8,
        &format!(
            "free Gaussian {:.2e} <= 1e-6; drift {:.2e} <= 1e-10/step; intertwined {:.2e} <= 1e-6",
            suite.report("evolve_free_gaussian").outcome.residual,
            suite.report("evolve_norm_drift").outcome.residual,
            suite.report("evolve_intertwined").outcome.residual,
        ),
    );
}

#[test]
fn criterion_09_two_particle() {
    let suite = run(Scenario::Pair);
    suite.assert_pass(
        9,
        &[
            "pair_fermion_antisymmetry",
            "pair_boson_symmetry",
            "pair_identical_orbitals_zero",
            "pair_orthonormal_norm",
            "pair_gamma_coincident",
            "pair_localize_coincident",
            "pair_statistics_preserved",
            "pair_convolution2d",
        ],
    );
    assert_eq!(suite.report("pair_fermion_antisymmetry").outcome.residual, 0.0);
    assert_eq!(suite.report("pair_identical_orbitals_zero").outcome.residual, 0.0);
    assert_eq!(suite.report("pair_gamma_coincident").outcome.residual, 0.0);
    assert!(suite.report("pair_localize_coincident").outcome.tolerance <= 1e-13);
    assert!(suite.report("pair_convolution2d").outcome.tolerance <= 1e-10);
    assert!(
        suite.wall_ms < 10_000.0,
        "criterion 9: pair scenario took {:.1} ms",
        suite.wall_ms
    );
    pass_line(
        9,
        &format!("two-particle identities on the 64^2 grid in {:.0} ms", suite.wall_ms),
    );
}

#[test]
fn criterion_10_n_particle() {
    let suite = run(Scenario::Nparticle);
    suite.assert_pass(
        10,
        &[
            "nparticle_rank1_consistency",
            "nparticle_rank2_consistency",
            "nparticle_gamma_permutation",
            "nparticle_uniform_identity",
            "nparticle_rank3_localization",
        ],
    );
    assert_eq!(suite.report("nparticle_rank1_consistency").outcome.residual, 0.0);
    assert_eq!(suite.report("nparticle_rank2_consistency").outcome.residual, 0.0);
    assert_eq!(suite.report("nparticle_gamma_permutation").outcome.residual, 0.0);
    let rank3 = suite.report("nparticle_rank3_localization");
    assert!(
        rank3.runtime_ms < 10_000.0,
        "criterion 10: 32^3 localization took {:.1} ms",
        rank3.runtime_ms
    );
    pass_line(
        10,
        &format!(
            "rank-1/2 bit-consistency, exact permutation symmetry, 32^3 in {:.0} ms",
            rank3.runtime_ms
        ),
    );
}
