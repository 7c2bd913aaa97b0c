//! Scenario implementations: each turns a validated config into check
//! outcomes plus plot-ready artifacts. Numerical failures surface as failed
//! checks, never as a crash of the runner.

use std::path::{Path, PathBuf};
use std::time::Instant;

use thiserror::Error;

use scaleqm::{Complex64, FieldSpec, Grid1D, PhysicalConstants, Profile, WavePacket};

use crate::config::{
    FieldCfg, PacketCfg, PotentialCfg, Scenario, ScenarioConfig,
};
use crate::report::{Artifact, CheckOutcome, CheckReport};

pub mod axioms;
pub mod numerals;
pub mod single;
pub mod multi;

/// Runtime context: where relative sample paths resolve from.
#[derive(Debug, Clone, Default)]
pub struct RunContext {
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub reports: Vec<CheckReport>,
    pub artifacts: Vec<Artifact>,
}

impl ScenarioOutput {
    pub fn outcomes(&self) -> Vec<CheckOutcome> {
        self.reports.iter().map(|r| r.outcome.clone()).collect()
    }

    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.outcome.pass)
    }
}

/// Setup problems that make a scenario unrunnable (unreadable sample files,
/// inconsistent grids). Config syntax and ranges are caught earlier.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{0}")]
    Setup(String),
}

pub type SetupResult<T> = Result<T, ScenarioError>;

pub fn run_scenario(cfg: &ScenarioConfig, ctx: &RunContext) -> SetupResult<ScenarioOutput> {
    match cfg.scenario {
        Scenario::Axioms => Ok(axioms::run(cfg)),
        Scenario::Numerals => numerals::run(cfg, ctx),
        Scenario::Localize => single::run_localize(cfg, ctx),
        Scenario::Operators => single::run_operators(cfg, ctx),
        Scenario::Evolve => single::run_evolve(cfg, ctx),
        Scenario::Momentum => single::run_momentum(cfg, ctx),
        Scenario::Pair => multi::run_pair(cfg, ctx),
        Scenario::Nparticle => multi::run_nparticle(cfg, ctx),
        Scenario::FullSuite => run_full_suite(cfg, ctx),
    }
}

fn run_full_suite(cfg: &ScenarioConfig, ctx: &RunContext) -> SetupResult<ScenarioOutput> {
    let mut reports = Vec::new();
    let mut artifacts = Vec::new();
    for scenario in [
        Scenario::Axioms,
        Scenario::Numerals,
        Scenario::Localize,
        Scenario::Operators,
        Scenario::Evolve,
        Scenario::Momentum,
        Scenario::Pair,
        Scenario::Nparticle,
    ] {
        let mut sub_cfg = cfg.clone();
        sub_cfg.scenario = scenario;
        let out = run_scenario(&sub_cfg, ctx)?;
        reports.extend(out.reports);
        artifacts.extend(out.artifacts.into_iter().map(|mut a| {
            a.name = format!("{}_{}", scenario.name().replace('-', "_"), a.name);
            a
        }));
    }
    Ok(ScenarioOutput { reports, artifacts })
}

// ---------------------------------------------------------------------------
// Check plumbing
// ---------------------------------------------------------------------------

/// Run one check body, timing it and converting errors into failed checks.
pub(crate) fn check(
    id: &str,
    identity: &str,
    body: impl FnOnce() -> Result<CheckOutcome, String>,
) -> CheckReport {
    let start = Instant::now();
    let outcome = match body() {
        Ok(outcome) => outcome,
        Err(message) => CheckOutcome::failed(id, identity, message),
    };
    CheckReport { outcome, runtime_ms: start.elapsed().as_secs_f64() * 1e3 }
}

pub(crate) trait IntoCheckError<T> {
    fn err_string(self) -> Result<T, String>;
}

impl<T> IntoCheckError<T> for Result<T, scaleqm::Error> {
    fn err_string(self) -> Result<T, String> {
        self.map_err(|e| e.to_string())
    }
}

// ---------------------------------------------------------------------------
// Numeric helpers shared by scenarios
// ---------------------------------------------------------------------------

pub(crate) fn rel_l2(lhs: &[Complex64], rhs: &[Complex64]) -> f64 {
    let num: f64 = lhs
        .iter()
        .zip(rhs)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    let den: f64 = rhs.iter().map(|b| b.norm_sqr()).sum();
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

pub(crate) fn max_abs_diff(lhs: &[Complex64], rhs: &[Complex64]) -> f64 {
    lhs.iter()
        .zip(rhs)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

/// Count amplitudes whose bit patterns differ.
pub(crate) fn bit_mismatches(lhs: &[Complex64], rhs: &[Complex64]) -> usize {
    lhs.iter()
        .zip(rhs)
        .filter(|(a, b)| a.re.to_bits() != b.re.to_bits() || a.im.to_bits() != b.im.to_bits())
        .count()
}

/// Distance of `r1/r2` from the ideal second-order halving ratio 4; a
/// residual of at most 0.8 is the 4 +/- 20% band.
pub(crate) fn halving_ratio_residual(r1: f64, r2: f64) -> (f64, String) {
    let ratio = r1 / r2;
    (
        (ratio - 4.0).abs(),
        format!("residuals {r1:.3e} -> {r2:.3e}, ratio {ratio:.3}"),
    )
}

// ---------------------------------------------------------------------------
// Builders from config sections
// ---------------------------------------------------------------------------

pub(crate) fn build_grid(cfg: &Option<crate::config::GridCfg>, default: Grid1D) -> SetupResult<Grid1D> {
    match cfg {
        None => Ok(default),
        Some(g) => {
            let n = g.n.unwrap_or(default.len());
            let dz = g.dz.unwrap_or(default.dz());
            let origin = g.origin.unwrap_or(-(n as f64 / 2.0) * dz);
            Grid1D::new(n, dz, origin).map_err(|e| ScenarioError::Setup(e.to_string()))
        }
    }
}

pub(crate) fn build_constants(
    cfg: &Option<crate::config::ConstantsCfg>,
    default: PhysicalConstants,
) -> SetupResult<PhysicalConstants> {
    match cfg {
        None => Ok(default),
        Some(c) => PhysicalConstants::new(
            c.hbar.unwrap_or(default.hbar),
            c.mass.unwrap_or(default.mass),
        )
        .map_err(|e| ScenarioError::Setup(e.to_string())),
    }
}

fn profile_from_cfg(p: &crate::config::ProfileCfg) -> SetupResult<Profile> {
    match p.kind.as_deref() {
        None | Some("constant") => Ok(Profile::Constant { value: p.value.unwrap_or(0.0) }),
        Some("linear") => Ok(Profile::Linear {
            slope: p.slope.unwrap_or(0.0),
            intercept: p.intercept.unwrap_or(0.0),
        }),
        Some("gaussian") => Ok(Profile::Gaussian {
            amplitude: p.amplitude.unwrap_or(0.0),
            center: p.center.unwrap_or(0.0),
            width: p.width.unwrap_or(1.0),
        }),
        Some("sine") => Ok(Profile::Sine {
            amplitude: p.amplitude.unwrap_or(0.0),
            wavenumber: p.wavenumber.unwrap_or(1.0),
            phase: p.phase.unwrap_or(0.0),
        }),
        Some(other) => Err(ScenarioError::Setup(format!(
            "profile kind `{other}` is not usable here"
        ))),
    }
}

/// Build the scaling field from config, or fall back to the given default.
pub(crate) fn build_field(
    cfg: &Option<FieldCfg>,
    grid: Grid1D,
    default: FieldSpec,
    ctx: &RunContext,
) -> SetupResult<FieldSpec> {
    let Some(f) = cfg else { return Ok(default) };
    if f.alpha.kind.as_deref() == Some("samples") {
        let path = f.samples_path.as_deref().ok_or_else(|| {
            ScenarioError::Setup("field.kind = \"samples\" requires field.samples_path".into())
        })?;
        if f.beta.kind.is_some() {
            return Err(ScenarioError::Setup(
                "field.beta_kind cannot be combined with field.kind = \"samples\" \
                 (the samples file carries both columns)"
                    .into(),
            ));
        }
        let rows = read_numeric_csv(&ctx.base_dir.join(path), 3)?;
        let (alpha, beta) = samples_to_profiles(&rows, grid)?;
        return Ok(FieldSpec::new(alpha, beta));
    }
    let alpha = profile_from_cfg(&f.alpha)?;
    let beta = if f.beta.kind.is_some() {
        profile_from_cfg(&f.beta)?
    } else {
        Profile::zero()
    };
    Ok(FieldSpec::new(alpha, beta))
}

fn samples_to_profiles(rows: &[Vec<f64>], grid: Grid1D) -> SetupResult<(Profile, Profile)> {
    if rows.len() != grid.len() {
        return Err(ScenarioError::Setup(format!(
            "field samples: expected {} rows matching the grid, got {}",
            grid.len(),
            rows.len()
        )));
    }
    let mut alpha = vec![0.0; grid.len()];
    let mut beta = vec![0.0; grid.len()];
    for row in rows {
        let j = grid
            .index_of(row[0])
            .map_err(|e| ScenarioError::Setup(format!("field samples: {e}")))?;
        alpha[j] = row[1];
        beta[j] = row[2];
    }
    Ok((
        Profile::samples(grid, alpha).map_err(|e| ScenarioError::Setup(e.to_string()))?,
        Profile::samples(grid, beta).map_err(|e| ScenarioError::Setup(e.to_string()))?,
    ))
}

/// Packet description that can be rebuilt on refined grids.
#[derive(Debug, Clone)]
pub(crate) enum PacketSpec {
    Gaussian { center: f64, width: f64, k0: f64 },
    Samples { grid: Grid1D, values: Vec<Complex64> },
}

impl PacketSpec {
    pub(crate) fn build(&self, grid: Grid1D) -> SetupResult<WavePacket> {
        match self {
            PacketSpec::Gaussian { center, width, k0 } => {
                WavePacket::gaussian(grid, *center, *width, *k0)
                    .map_err(|e| ScenarioError::Setup(e.to_string()))
            }
            PacketSpec::Samples { grid: g, values } => {
                if *g != grid {
                    return Err(ScenarioError::Setup(
                        "sampled packets cannot be rebuilt on a different grid".into(),
                    ));
                }
                WavePacket::new(grid, values.clone().into())
                    .map_err(|e| ScenarioError::Setup(e.to_string()))
            }
        }
    }

    pub(crate) fn gaussian_params(&self) -> Option<(f64, f64, f64)> {
        match self {
            PacketSpec::Gaussian { center, width, k0 } => Some((*center, *width, *k0)),
            PacketSpec::Samples { .. } => None,
        }
    }
}

pub(crate) fn build_packet_spec(
    cfg: &Option<PacketCfg>,
    grid: Grid1D,
    default: PacketSpec,
    ctx: &RunContext,
) -> SetupResult<PacketSpec> {
    let Some(p) = cfg else { return Ok(default) };
    match p.kind.as_deref() {
        None | Some("gaussian") => Ok(PacketSpec::Gaussian {
            center: p.center.unwrap_or(0.0),
            width: p.width.unwrap_or(1.0),
            k0: p.k0.unwrap_or(0.0),
        }),
        Some("samples") => {
            let path = p.samples_path.as_deref().ok_or_else(|| {
                ScenarioError::Setup("packet.kind = \"samples\" requires samples_path".into())
            })?;
            let rows = read_numeric_csv(&ctx.base_dir.join(path), 3)?;
            if rows.len() != grid.len() {
                return Err(ScenarioError::Setup(format!(
                    "packet samples: expected {} rows, got {}",
                    grid.len(),
                    rows.len()
                )));
            }
            let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
            for row in &rows {
                let j = grid
                    .index_of(row[0])
                    .map_err(|e| ScenarioError::Setup(format!("packet samples: {e}")))?;
                values[j] = Complex64::new(row[1], row[2]);
            }
            Ok(PacketSpec::Samples { grid, values })
        }
        Some(other) => Err(ScenarioError::Setup(format!("unknown packet kind `{other}`"))),
    }
}

/// A potential description that can be re-sampled on refined grids (except
/// for file samples, which are tied to their grid).
#[derive(Debug, Clone)]
pub(crate) enum PotentialSpec {
    Free,
    Harmonic { omega: f64, center: f64 },
    Samples { grid: Grid1D, values: Vec<f64> },
}

impl PotentialSpec {
    pub(crate) fn build(
        &self,
        grid: Grid1D,
        consts: &PhysicalConstants,
    ) -> SetupResult<Option<Vec<f64>>> {
        match self {
            PotentialSpec::Free => Ok(None),
            PotentialSpec::Harmonic { omega, center } => Ok(Some(
                (0..grid.len())
                    .map(|j| {
                        let u = grid.z(j) - center;
                        0.5 * consts.mass * omega * omega * u * u
                    })
                    .collect(),
            )),
            PotentialSpec::Samples { grid: g, values } => {
                if *g != grid {
                    return Err(ScenarioError::Setup(
                        "sampled potentials cannot be rebuilt on a different grid".into(),
                    ));
                }
                Ok(Some(values.clone()))
            }
        }
    }
}

pub(crate) fn build_potential_spec(
    cfg: &Option<PotentialCfg>,
    grid: Grid1D,
    default: PotentialSpec,
    ctx: &RunContext,
) -> SetupResult<PotentialSpec> {
    match cfg {
        None => Ok(default),
        Some(p) => match p.kind.as_deref() {
            None | Some("none") => Ok(PotentialSpec::Free),
            Some("harmonic") => Ok(PotentialSpec::Harmonic {
                omega: p.omega.unwrap_or(1.0),
                center: p.center.unwrap_or(0.0),
            }),
            Some("samples") => {
                let path = p.samples_path.as_deref().ok_or_else(|| {
                    ScenarioError::Setup(
                        "potential.kind = \"samples\" requires samples_path".into(),
                    )
                })?;
                let rows = read_numeric_csv(&ctx.base_dir.join(path), 2)?;
                if rows.len() != grid.len() {
                    return Err(ScenarioError::Setup(format!(
                        "potential samples: expected {} rows, got {}",
                        grid.len(),
                        rows.len()
                    )));
                }
                let mut values = vec![0.0; grid.len()];
                for row in &rows {
                    let j = grid
                        .index_of(row[0])
                        .map_err(|e| ScenarioError::Setup(format!("potential samples: {e}")))?;
                    values[j] = row[1];
                }
                Ok(PotentialSpec::Samples { grid, values })
            }
            Some(other) => Err(ScenarioError::Setup(format!(
                "unknown potential kind `{other}`"
            ))),
        },
    }
}

/// Plain numeric CSV reader: `columns` comma-separated floats per row, an
/// optional header line, blank lines ignored.
pub(crate) fn read_numeric_csv(path: &Path, columns: usize) -> SetupResult<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ScenarioError::Setup(format!("cannot read {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Option<Vec<f64>> = fields.iter().map(|f| f.parse::<f64>().ok()).collect();
        match parsed {
            Some(values) if values.len() == columns => rows.push(values),
            Some(values) => {
                return Err(ScenarioError::Setup(format!(
                    "{}:{}: expected {columns} columns, got {}",
                    path.display(),
                    lineno + 1,
                    values.len()
                )))
            }
            None if lineno == 0 => continue, // header
            None => {
                return Err(ScenarioError::Setup(format!(
                    "{}:{}: not numeric",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }
    Ok(rows)
}

/// The default smooth test field on a grid: a Gaussian bump in the real
/// exponent and a grid-periodic sine in the phase.
pub(crate) fn default_field(grid: Grid1D, alpha_amp: f64, beta_amp: f64, width: f64) -> FieldSpec {
    FieldSpec::new(
        Profile::Gaussian { amplitude: alpha_amp, center: 0.0, width },
        Profile::Sine {
            amplitude: beta_amp,
            wavenumber: 2.0 * std::f64::consts::PI * 2.0 / grid.length(),
            phase: 0.0,
        },
    )
}
