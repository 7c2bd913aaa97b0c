//! Scenario configuration: a TOML file with a known key schema.
//!
//! Validation is strict and total: unknown sections or keys are rejected with
//! a nearest-key suggestion, type and range violations name the offending
//! key, and every violation in the file is reported at once.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Axioms,
    Numerals,
    Localize,
    Operators,
    Evolve,
    Momentum,
    Pair,
    Nparticle,
    FullSuite,
}

impl Scenario {
    pub const ALL: [Scenario; 9] = [
        Scenario::Axioms,
        Scenario::Numerals,
        Scenario::Localize,
        Scenario::Operators,
        Scenario::Evolve,
        Scenario::Momentum,
        Scenario::Pair,
        Scenario::Nparticle,
        Scenario::FullSuite,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Axioms => "axioms",
            Scenario::Numerals => "numerals",
            Scenario::Localize => "localize",
            Scenario::Operators => "operators",
            Scenario::Evolve => "evolve",
            Scenario::Momentum => "momentum",
            Scenario::Pair => "pair",
            Scenario::Nparticle => "nparticle",
            Scenario::FullSuite => "full-suite",
        }
    }

    pub fn from_name(name: &str) -> Option<Scenario> {
        Scenario::ALL.iter().copied().find(|s| s.name() == name)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("TOML parse error: {0}")]
    Parse(String),
    #[error("invalid configuration:\n{}", .0.join("\n"))]
    Invalid(Vec<String>),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GridCfg {
    pub n: Option<usize>,
    pub dz: Option<f64>,
    pub origin: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConstantsCfg {
    pub hbar: Option<f64>,
    pub mass: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProfileCfg {
    pub kind: Option<String>,
    pub value: Option<f64>,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub amplitude: Option<f64>,
    pub center: Option<f64>,
    pub width: Option<f64>,
    pub wavenumber: Option<f64>,
    pub phase: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FieldCfg {
    pub alpha: ProfileCfg,
    pub beta: ProfileCfg,
    pub samples_path: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PacketCfg {
    pub kind: Option<String>,
    pub center: Option<f64>,
    pub width: Option<f64>,
    pub k0: Option<f64>,
    pub samples_path: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PotentialCfg {
    pub kind: Option<String>,
    pub omega: Option<f64>,
    pub center: Option<f64>,
    pub samples_path: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PairPotentialCfg {
    pub kind: Option<String>,
    pub strength: Option<f64>,
    pub softening: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReferencesCfg {
    pub x: Option<f64>,
    pub w: Option<f64>,
    pub v: Option<f64>,
    pub points: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeCfg {
    pub dt: f64,
    pub steps: usize,
    pub scaled: bool,
}

impl Default for TimeCfg {
    fn default() -> Self {
        Self { dt: 1e-3, steps: 100, scaled: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumeralsCfg {
    pub inputs: Option<Vec<String>>,
    pub input_path: Option<String>,
    pub zero: String,
    pub unit: String,
}

impl Default for NumeralsCfg {
    fn default() -> Self {
        Self {
            inputs: None,
            input_path: None,
            zero: "a.aa".to_string(),
            unit: "dbf.aag".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomsCfg {
    pub samples: usize,
    pub float_tolerance: f64,
}

impl Default for AxiomsCfg {
    fn default() -> Self {
        Self { samples: 1000, float_tolerance: 1e-12 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairCfg {
    pub statistics: String,
}

impl Default for PairCfg {
    fn default() -> Self {
        Self { statistics: "fermion".to_string() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NparticleCfg {
    pub n: usize,
}

impl Default for NparticleCfg {
    fn default() -> Self {
        Self { n: 3 }
    }
}

/// Named tolerances with defaults pinned to the verification suite. Config
/// overrides must be positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    pub linearity: f64,
    pub modulus: f64,
    pub translate_roundtrip: f64,
    pub commutes_potential: f64,
    pub kernel_convolution: f64,
    pub evolve_free: f64,
    pub evolve_drift: f64,
    pub evolve_intertwined: f64,
    pub psivv: f64,
    pub pair_convolution: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            linearity: 1e-12,
            modulus: 1e-14,
            translate_roundtrip: 1e-13,
            commutes_potential: 1e-14,
            kernel_convolution: 1e-10,
            evolve_free: 1e-6,
            evolve_drift: 1e-10,
            evolve_intertwined: 1e-6,
            psivv: 1e-13,
            pair_convolution: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub seed: u64,
    pub grid: Option<GridCfg>,
    pub constants: Option<ConstantsCfg>,
    pub field: Option<FieldCfg>,
    pub packet: Option<PacketCfg>,
    pub packet2: Option<PacketCfg>,
    pub potential: Option<PotentialCfg>,
    pub pair_potential: Option<PairPotentialCfg>,
    pub references: ReferencesCfg,
    pub time: TimeCfg,
    pub numerals: NumeralsCfg,
    pub axioms: AxiomsCfg,
    pub pair: PairCfg,
    pub nparticle: NparticleCfg,
    pub tolerances: Tolerances,
}

impl ScenarioConfig {
    /// A config with every section at its scenario default.
    pub fn minimal(scenario: Scenario) -> Self {
        Self {
            scenario,
            seed: 0,
            grid: None,
            constants: None,
            field: None,
            packet: None,
            packet2: None,
            potential: None,
            pair_potential: None,
            references: ReferencesCfg::default(),
            time: TimeCfg::default(),
            numerals: NumeralsCfg::default(),
            axioms: AxiomsCfg::default(),
            pair: PairCfg::default(),
            nparticle: NparticleCfg::default(),
            tolerances: Tolerances::default(),
        }
    }
}

// ---------------------------------------------------------------------------
// Schema
// ---------------------------------------------------------------------------

const TOP_KEYS: &[&str] = &["scenario", "seed"];

const FIELD_KEYS: &[&str] = &[
    "kind", "value", "slope", "intercept", "amplitude", "center", "width",
    "wavenumber", "phase", "samples_path", "beta_kind", "beta_value",
    "beta_slope", "beta_intercept", "beta_amplitude", "beta_center",
    "beta_width", "beta_wavenumber", "beta_phase",
];
const PACKET_KEYS: &[&str] = &["kind", "center", "width", "k0", "samples_path"];

const SECTIONS: &[(&str, &[&str])] = &[
    ("grid", &["n", "dz", "origin"]),
    ("constants", &["hbar", "mass"]),
    ("field", FIELD_KEYS),
    ("packet", PACKET_KEYS),
    ("packet2", PACKET_KEYS),
    ("potential", &["kind", "omega", "center", "samples_path"]),
    ("pair_potential", &["kind", "strength", "softening"]),
    ("references", &["x", "w", "v", "points"]),
    ("time", &["dt", "steps", "scaled"]),
    ("numerals", &["inputs", "input_path", "zero", "unit"]),
    ("axioms", &["samples", "float_tolerance"]),
    ("pair", &["statistics"]),
    ("nparticle", &["n"]),
    (
        "tolerances",
        &[
            "linearity", "modulus", "translate_roundtrip",
            "commutes_potential", "kernel_convolution", "evolve_free",
            "evolve_drift", "evolve_intertwined", "psivv", "pair_convolution",
        ],
    ),
];

const FIELD_KINDS: &[&str] = &["constant", "linear", "gaussian", "sine", "samples"];
const PACKET_KINDS: &[&str] = &["gaussian", "samples"];
const POTENTIAL_KINDS: &[&str] = &["none", "harmonic", "samples"];
const PAIR_POTENTIAL_KINDS: &[&str] = &["none", "separable", "coulomb"];
const STATISTICS: &[&str] = &["fermion", "boson", "none"];

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let cost = usize::from(ca != cb);
            cur[j + 1] = (prev[j + 1] + 1).min(cur[j] + 1).min(prev[j] + cost);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn suggest(unknown: &str, candidates: &[&str]) -> Option<String> {
    candidates
        .iter()
        .map(|c| (levenshtein(unknown, c), *c))
        .min()
        .filter(|(d, c)| *d <= (c.len() / 2).max(2))
        .map(|(_, c)| c.to_string())
}

fn unknown_message(kind: &str, name: &str, candidates: &[&str]) -> String {
    match suggest(name, candidates) {
        Some(s) => format!("unknown {kind} `{name}`; did you mean `{s}`?"),
        None => format!("unknown {kind} `{name}`"),
    }
}

// ---------------------------------------------------------------------------
// Typed extraction
// ---------------------------------------------------------------------------

struct SectionReader<'a> {
    section: &'a str,
    table: &'a toml::Table,
    violations: &'a mut Vec<String>,
}

impl<'a> SectionReader<'a> {
    fn f64_value(&mut self, key: &str, v: &toml::Value) -> Option<f64> {
        match v {
            toml::Value::Float(x) => Some(*x),
            toml::Value::Integer(x) => Some(*x as f64),
            _ => {
                self.violations
                    .push(format!("{}.{key}: expected a number", self.section));
                None
            }
        }
    }

    fn f64(&mut self, key: &str) -> Option<f64> {
        let v = self.table.get(key)?.clone();
        self.f64_value(key, &v)
    }

    fn f64_where(
        &mut self,
        key: &str,
        pred: impl Fn(f64) -> bool,
        requirement: &str,
    ) -> Option<f64> {
        let x = self.f64(key)?;
        if pred(x) {
            Some(x)
        } else {
            self.violations.push(format!(
                "{}.{key}: must be {requirement}, got {x}",
                self.section
            ));
            None
        }
    }

    fn usize_where(
        &mut self,
        key: &str,
        pred: impl Fn(i64) -> bool,
        requirement: &str,
    ) -> Option<usize> {
        match self.table.get(key)? {
            toml::Value::Integer(x) if pred(*x) => Some(*x as usize),
            toml::Value::Integer(x) => {
                self.violations.push(format!(
                    "{}.{key}: must be {requirement}, got {x}",
                    self.section
                ));
                None
            }
            _ => {
                self.violations
                    .push(format!("{}.{key}: expected an integer", self.section));
                None
            }
        }
    }

    fn bool(&mut self, key: &str) -> Option<bool> {
        match self.table.get(key)? {
            toml::Value::Boolean(b) => Some(*b),
            _ => {
                self.violations
                    .push(format!("{}.{key}: expected a boolean", self.section));
                None
            }
        }
    }

    fn string(&mut self, key: &str) -> Option<String> {
        match self.table.get(key)? {
            toml::Value::String(s) => Some(s.clone()),
            _ => {
                self.violations
                    .push(format!("{}.{key}: expected a string", self.section));
                None
            }
        }
    }

    fn string_of(&mut self, key: &str, allowed: &[&str]) -> Option<String> {
        let s = self.string(key)?;
        if allowed.contains(&s.as_str()) {
            Some(s)
        } else {
            self.violations.push(format!(
                "{}.{key}: {}",
                self.section,
                unknown_message("value", &s, allowed)
            ));
            None
        }
    }

    fn string_array(&mut self, key: &str) -> Option<Vec<String>> {
        match self.table.get(key)? {
            toml::Value::Array(items) => {
                let mut out = Vec::with_capacity(items.len());
                for item in items {
                    match item {
                        toml::Value::String(s) => out.push(s.clone()),
                        _ => {
                            self.violations.push(format!(
                                "{}.{key}: expected an array of strings",
                                self.section
                            ));
                            return None;
                        }
                    }
                }
                Some(out)
            }
            _ => {
                self.violations
                    .push(format!("{}.{key}: expected an array of strings", self.section));
                None
            }
        }
    }

    fn f64_array(&mut self, key: &str) -> Option<Vec<f64>> {
        match self.table.get(key)?.clone() {
            toml::Value::Array(items) => {
                let mut out = Vec::with_capacity(items.len());
                for item in &items {
                    match self.f64_value(key, item) {
                        Some(x) => out.push(x),
                        None => return None,
                    }
                }
                Some(out)
            }
            _ => {
                self.violations
                    .push(format!("{}.{key}: expected an array of numbers", self.section));
                None
            }
        }
    }
}

fn profile_cfg(reader: &mut SectionReader<'_>, prefix: &str) -> ProfileCfg {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}{k}")
        }
    };
    ProfileCfg {
        kind: reader.string_of(&key("kind"), FIELD_KINDS),
        value: reader.f64(&key("value")),
        slope: reader.f64(&key("slope")),
        intercept: reader.f64(&key("intercept")),
        amplitude: reader.f64(&key("amplitude")),
        center: reader.f64(&key("center")),
        width: reader.f64_where(&key("width"), |x| x > 0.0, "> 0"),
        wavenumber: reader.f64(&key("wavenumber")),
        phase: reader.f64(&key("phase")),
    }
}

fn packet_cfg(reader: &mut SectionReader<'_>) -> PacketCfg {
    PacketCfg {
        kind: reader.string_of("kind", PACKET_KINDS),
        center: reader.f64("center"),
        width: reader.f64_where("width", |x| x > 0.0, "> 0"),
        k0: reader.f64("k0"),
        samples_path: reader.string("samples_path"),
    }
}

/// Parse and validate a config file.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

/// Parse and validate config text; reports every violation found.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;

    let mut violations = Vec::new();
    let section_names: Vec<&str> = SECTIONS.iter().map(|(n, _)| *n).collect();

    // Sort sections for deterministic violation order.
    let entries: BTreeMap<&String, &toml::Value> = table.iter().collect();
    for (name, value) in &entries {
        match value {
            toml::Value::Table(inner) => {
                match SECTIONS.iter().find(|(n, _)| n == &name.as_str()) {
                    Some((section, keys)) => {
                        for key in inner.keys() {
                            if !keys.contains(&key.as_str()) {
                                violations.push(format!(
                                    "{section}: {}",
                                    unknown_message("key", key, keys)
                                ));
                            }
                        }
                    }
                    None => {
                        violations.push(unknown_message("section", name, &section_names));
                    }
                }
            }
            _ => {
                if !TOP_KEYS.contains(&name.as_str()) {
                    let mut candidates = section_names.clone();
                    candidates.extend_from_slice(TOP_KEYS);
                    violations.push(unknown_message("key", name, &candidates));
                }
            }
        }
    }

    // Scenario and seed.
    let scenario = match table.get("scenario") {
        Some(toml::Value::String(s)) => match Scenario::from_name(s) {
            Some(sc) => Some(sc),
            None => {
                let names: Vec<&str> = Scenario::ALL.iter().map(|s| s.name()).collect();
                violations.push(format!(
                    "scenario: {}",
                    unknown_message("scenario", s, &names)
                ));
                None
            }
        },
        Some(_) => {
            violations.push("scenario: expected a string".to_string());
            None
        }
        None => {
            violations.push("scenario: missing required key".to_string());
            None
        }
    };
    let seed = match table.get("seed") {
        Some(toml::Value::Integer(x)) if *x >= 0 => *x as u64,
        Some(toml::Value::Integer(x)) => {
            violations.push(format!("seed: must be >= 0, got {x}"));
            0
        }
        Some(_) => {
            violations.push("seed: expected an integer".to_string());
            0
        }
        None => 0,
    };

    let empty = toml::Table::new();
    let section = |name: &str| -> Option<&toml::Table> {
        match table.get(name) {
            Some(toml::Value::Table(t)) => Some(t),
            _ => None,
        }
    };
    fn reader<'a>(
        name: &'static str,
        table: &'a toml::Table,
        empty: &'a toml::Table,
        violations: &'a mut Vec<String>,
    ) -> SectionReader<'a> {
        let inner = match table.get(name) {
            Some(toml::Value::Table(t)) => t,
            _ => empty,
        };
        SectionReader { section: name, table: inner, violations }
    }

    let grid = section("grid").map(|_| {
        let mut r = reader("grid", &table, &empty, &mut violations);
        GridCfg {
            n: r.usize_where("n", |x| x >= 8 && (x as u64).is_power_of_two(), "a power of two >= 8"),
            dz: r.f64_where("dz", |x| x > 0.0 && x.is_finite(), "> 0"),
            origin: r.f64("origin"),
        }
    });

    let constants = section("constants").map(|_| {
        let mut r = reader("constants", &table, &empty, &mut violations);
        ConstantsCfg {
            hbar: r.f64_where("hbar", |x| x > 0.0, "> 0"),
            mass: r.f64_where("mass", |x| x > 0.0, "> 0"),
        }
    });

    let field = section("field").map(|_| {
        let mut r = reader("field", &table, &empty, &mut violations);
        let alpha = profile_cfg(&mut r, "");
        let beta = profile_cfg(&mut r, "beta_");
        let beta_params_present = beta.value.is_some()
            || beta.slope.is_some()
            || beta.intercept.is_some()
            || beta.amplitude.is_some()
            || beta.center.is_some()
            || beta.width.is_some()
            || beta.wavenumber.is_some()
            || beta.phase.is_some();
        if beta.kind.is_none() && !r.table.contains_key("beta_kind") && beta_params_present {
            r.violations
                .push("field: beta_* parameters require beta_kind".to_string());
        }
        FieldCfg {
            alpha,
            beta,
            samples_path: r.string("samples_path"),
        }
    });

    let packet = section("packet").map(|_| packet_cfg(&mut reader("packet", &table, &empty, &mut violations)));
    let packet2 = section("packet2").map(|_| packet_cfg(&mut reader("packet2", &table, &empty, &mut violations)));

    let potential = section("potential").map(|_| {
        let mut r = reader("potential", &table, &empty, &mut violations);
        PotentialCfg {
            kind: r.string_of("kind", POTENTIAL_KINDS),
            omega: r.f64("omega"),
            center: r.f64("center"),
            samples_path: r.string("samples_path"),
        }
    });

    let pair_potential = section("pair_potential").map(|_| {
        let mut r = reader("pair_potential", &table, &empty, &mut violations);
        PairPotentialCfg {
            kind: r.string_of("kind", PAIR_POTENTIAL_KINDS),
            strength: r.f64("strength"),
            softening: r.f64_where("softening", |x| x > 0.0, "> 0"),
        }
    });

    let references = {
        let mut r = reader("references", &table, &empty, &mut violations);
        ReferencesCfg {
            x: r.f64("x"),
            w: r.f64("w"),
            v: r.f64("v"),
            points: r.f64_array("points"),
        }
    };

    let time = {
        let mut r = reader("time", &table, &empty, &mut violations);
        let defaults = TimeCfg::default();
        TimeCfg {
            dt: r
                .f64_where("dt", |x| x > 0.0 && x.is_finite(), "> 0")
                .unwrap_or(defaults.dt),
            steps: r.usize_where("steps", |x| x >= 1, ">= 1").unwrap_or(defaults.steps),
            scaled: r.bool("scaled").unwrap_or(defaults.scaled),
        }
    };

    let numerals = {
        let mut r = reader("numerals", &table, &empty, &mut violations);
        let defaults = NumeralsCfg::default();
        NumeralsCfg {
            inputs: r.string_array("inputs"),
            input_path: r.string("input_path"),
            zero: r.string("zero").unwrap_or(defaults.zero),
            unit: r.string("unit").unwrap_or(defaults.unit),
        }
    };

    let axioms = {
        let mut r = reader("axioms", &table, &empty, &mut violations);
        let defaults = AxiomsCfg::default();
        AxiomsCfg {
            samples: r
                .usize_where("samples", |x| x >= 1, ">= 1")
                .unwrap_or(defaults.samples),
            float_tolerance: r
                .f64_where("float_tolerance", |x| x > 0.0, "> 0")
                .unwrap_or(defaults.float_tolerance),
        }
    };

    let pair = {
        let mut r = reader("pair", &table, &empty, &mut violations);
        PairCfg {
            statistics: r
                .string_of("statistics", STATISTICS)
                .unwrap_or_else(|| PairCfg::default().statistics),
        }
    };

    let nparticle = {
        let mut r = reader("nparticle", &table, &empty, &mut violations);
        NparticleCfg {
            n: r
                .usize_where("n", |x| (1..=3).contains(&x), "between 1 and 3")
                .unwrap_or(NparticleCfg::default().n),
        }
    };

    let tolerances = {
        let mut r = reader("tolerances", &table, &empty, &mut violations);
        let mut t = Tolerances::default();
        let set = |slot: &mut f64, key: &str, r: &mut SectionReader<'_>| {
            if let Some(v) = r.f64_where(key, |x| x > 0.0, "> 0") {
                *slot = v;
            }
        };
        set(&mut t.linearity, "linearity", &mut r);
        set(&mut t.modulus, "modulus", &mut r);
        set(&mut t.translate_roundtrip, "translate_roundtrip", &mut r);
        set(&mut t.commutes_potential, "commutes_potential", &mut r);
        set(&mut t.kernel_convolution, "kernel_convolution", &mut r);
        set(&mut t.evolve_free, "evolve_free", &mut r);
        set(&mut t.evolve_drift, "evolve_drift", &mut r);
        set(&mut t.evolve_intertwined, "evolve_intertwined", &mut r);
        set(&mut t.psivv, "psivv", &mut r);
        set(&mut t.pair_convolution, "pair_convolution", &mut r);
        t
    };

    if !violations.is_empty() {
        return Err(ConfigError::Invalid(violations));
    }

    Ok(ScenarioConfig {
        scenario: scenario.expect("validated above"),
        seed,
        grid,
        constants,
        field,
        packet,
        packet2,
        potential,
        pair_potential,
        references,
        time,
        numerals,
        axioms,
        pair,
        nparticle,
        tolerances,
    })
}
