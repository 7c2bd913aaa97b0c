//! Check outcomes, report files, and deterministic numeric formatting.
//!
//! Every float written to disk uses 17 significant digits, enough to
//! round-trip an f64 exactly, and reports never include wall-clock times, so
//! reruns with the same config and seed produce byte-identical files.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// Result of one named check. `pass` is always `residual <= tolerance`; for
/// ratio-style checks the residual is the distance from the ideal ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub id: String,
    /// The identity under test, spelled as a formula or a short clause.
    pub identity: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub note: Option<String>,
}

impl CheckOutcome {
    pub fn measured(
        id: &str,
        identity: &str,
        residual: f64,
        tolerance: f64,
    ) -> CheckOutcome {
        CheckOutcome {
            id: id.to_string(),
            identity: identity.to_string(),
            residual,
            tolerance,
            pass: residual <= tolerance,
            note: None,
        }
    }

    pub fn with_note(mut self, note: String) -> CheckOutcome {
        self.note = Some(note);
        self
    }

    /// A check that could not run; the error text becomes the note.
    pub fn failed(id: &str, identity: &str, error: String) -> CheckOutcome {
        CheckOutcome {
            id: id.to_string(),
            identity: identity.to_string(),
            residual: f64::INFINITY,
            tolerance: 0.0,
            pass: false,
            note: Some(error),
        }
    }
}

/// A check outcome plus its wall-clock runtime. The runtime is printed to the
/// console but never serialized.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub outcome: CheckOutcome,
    pub runtime_ms: f64,
}

/// A named file emitted by a scenario, already rendered.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub content: String,
}

/// 17 significant digits; round-trips f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

fn json_number(x: f64) -> String {
    // JSON has no IEEE specials; encode them as strings.
    if x.is_finite() {
        fmt_f64(x)
    } else {
        format!("\"{}\"", fmt_f64(x))
    }
}

/// Render the summary JSON: scenario, seed, overall verdict, and one object
/// per check in execution order.
pub fn summary_json(scenario: &str, seed: u64, checks: &[CheckOutcome]) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    out.push_str(&format!("  \"scenario\": \"{}\",\n", json_escape(scenario)));
    out.push_str(&format!("  \"seed\": {seed},\n"));
    let all_pass = checks.iter().all(|c| c.pass);
    out.push_str(&format!("  \"all_pass\": {all_pass},\n"));
    out.push_str("  \"checks\": [\n");
    for (i, c) in checks.iter().enumerate() {
        out.push_str("    {\n");
        out.push_str(&format!("      \"id\": \"{}\",\n", json_escape(&c.id)));
        out.push_str(&format!(
            "      \"identity\": \"{}\",\n",
            json_escape(&c.identity)
        ));
        out.push_str(&format!("      \"residual\": {},\n", json_number(c.residual)));
        out.push_str(&format!(
            "      \"tolerance\": {},\n",
            json_number(c.tolerance)
        ));
        match &c.note {
            Some(note) => {
                out.push_str(&format!("      \"pass\": {},\n", c.pass));
                out.push_str(&format!("      \"note\": \"{}\"\n", json_escape(note)));
            }
            None => out.push_str(&format!("      \"pass\": {}\n", c.pass)),
        }
        out.push_str(if i + 1 == checks.len() { "    }\n" } else { "    },\n" });
    }
    out.push_str("  ]\n}\n");
    out
}

/// Render `check_id,residual,tolerance,pass` rows.
pub fn checks_csv(checks: &[CheckOutcome]) -> String {
    let mut out = String::from("check_id,residual,tolerance,pass\n");
    for c in checks {
        out.push_str(&format!(
            "{},{},{},{}\n",
            c.id,
            fmt_f64(c.residual),
            fmt_f64(c.tolerance),
            c.pass
        ));
    }
    out
}

/// Render a complex array over grid coordinates as `z,re,im,abs2`.
pub fn packet_csv(zs: &[f64], amplitudes: &[scaleqm::Complex64]) -> String {
    packet_csv_with_header("z", zs, amplitudes)
}

/// Same format with a caller-chosen coordinate column (e.g. `p` for spectra).
pub fn packet_csv_with_header(
    coord: &str,
    zs: &[f64],
    amplitudes: &[scaleqm::Complex64],
) -> String {
    let mut out = format!("{coord},re,im,abs2\n");
    for (z, a) in zs.iter().zip(amplitudes) {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(*z),
            fmt_f64(a.re),
            fmt_f64(a.im),
            fmt_f64(a.norm_sqr())
        ));
    }
    out
}

/// Write the summary, the check table, and every artifact into `out_dir`.
/// Returns the written paths.
pub fn write_report(
    scenario: &str,
    seed: u64,
    checks: &[CheckOutcome],
    artifacts: &[Artifact],
    out_dir: &Path,
) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();

    let summary_path = out_dir.join("summary.json");
    fs::write(&summary_path, summary_json(scenario, seed, checks))?;
    written.push(summary_path);

    let checks_path = out_dir.join("checks.csv");
    fs::write(&checks_path, checks_csv(checks))?;
    written.push(checks_path);

    for artifact in artifacts {
        let path = out_dir.join(&artifact.name);
        fs::write(&path, &artifact.content)?;
        written.push(path);
    }
    Ok(written)
}
