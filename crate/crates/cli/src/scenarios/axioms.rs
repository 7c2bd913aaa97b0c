//! Scaled-algebra law checks over random tuples, exact and float backends.

use scaleqm::exact::ExactComplex;
use scaleqm::scaled::{
    axiom_suite_exact, law_sweep_exact, law_sweep_float, AxiomReport, RelativeStructure,
    ScalingFactor,
};

use crate::config::ScenarioConfig;
use crate::report::CheckOutcome;

use super::{check, ScenarioOutput};

fn report_outcome(id: &str, identity: &str, report: &AxiomReport) -> CheckOutcome {
    let failures: usize = report.checks.iter().map(|c| c.failures).sum();
    let note = if report.all_pass() {
        format!(
            "{} laws x {} samples, no failures",
            report.checks.len(),
            report.checks.first().map_or(0, |c| c.samples)
        )
    } else {
        let names: Vec<&str> = report.failed().iter().map(|c| c.name).collect();
        format!("failing laws: {}", names.join(", "))
    };
    CheckOutcome::measured(id, identity, failures as f64, 0.0).with_note(note)
}

pub fn run(cfg: &ScenarioConfig) -> ScenarioOutput {
    let samples = cfg.axioms.samples;
    let seed = cfg.seed;
    let float_tol = cfg.axioms.float_tolerance;
    let mut reports = Vec::new();

    let id = "axioms_exact_sweep";
    let identity = "v_s(a_t) = (t/s) a; embed is a ring iso; (t/s)1 is the \
                    rel_mul unit; rel_conj involutes; Z^u_t Z^t_s = Z^u_s";
    reports.push(check(id, identity, || {
        Ok(report_outcome(id, identity, &law_sweep_exact(samples, seed)))
    }));

    let id = "axioms_exact_structure";
    let identity = "field axioms of C^t_s under +, rel_mul, rel_conj (exact)";
    reports.push(check(id, identity, || {
        let upper =
            ScalingFactor::new(ExactComplex::from_ratios(-1, 3, 5, 7)).expect("nonzero");
        let lower =
            ScalingFactor::new(ExactComplex::from_ratios(2, 1, -3, 4)).expect("nonzero");
        let r = RelativeStructure::new(upper, lower);
        Ok(report_outcome(id, identity, &axiom_suite_exact(&r, samples, seed)))
    }));

    let id = "axioms_float_sweep";
    let identity = "the same scaling laws in IEEE doubles within tolerance";
    reports.push(check(id, identity, || {
        let report = law_sweep_float(samples, seed, float_tol);
        let failures: usize = report.checks.iter().map(|c| c.failures).sum();
        let note = format!(
            "{} laws x {samples} samples at relative tolerance {float_tol:.1e}",
            report.checks.len()
        );
        Ok(CheckOutcome::measured(id, identity, failures as f64, 0.0).with_note(note))
    }));

    ScenarioOutput { reports, artifacts: Vec::new() }
}
