//! One-particle scenarios: localization identities, operator checks with
//! grid-refinement convergence, Crank-Nicolson evolution, and the momentum
//! kernel.

use scaleqm::evolve::{evolve, free_gaussian_at, CrankNicolson};
use scaleqm::operators::{
    canonical_momentum_apply, central_derivative, covariant_derivative, hamiltonian_apply,
    localization_commutes_check, scaled_kinetic_apply, transport_quotient_derivative,
};
use scaleqm::packet::{localize_packet, translate_reference};
use scaleqm::spectral::{dft_forward, kernel_convolve, momentum_kernel, momentum_representation};
use scaleqm::{Complex64, FieldSpec, Grid1D, PhysicalConstants, Profile, WavePacket};

use crate::config::ScenarioConfig;
use crate::report::{packet_csv, packet_csv_with_header, Artifact, CheckOutcome};

use super::{
    bit_mismatches, build_constants, build_field, build_grid, build_packet_spec,
    build_potential_spec, check, default_field, halving_ratio_residual, max_abs_diff,
    rel_l2, IntoCheckError, PacketSpec, PotentialSpec, RunContext, ScenarioOutput, SetupResult,
};

struct SingleSetup {
    grid: Grid1D,
    field: FieldSpec,
    packet: PacketSpec,
    potential: PotentialSpec,
    consts: PhysicalConstants,
    x: f64,
    w: f64,
}

fn setup(
    cfg: &ScenarioConfig,
    ctx: &RunContext,
    default_grid: Grid1D,
    default_packet: PacketSpec,
    default_potential: PotentialSpec,
    default_consts: PhysicalConstants,
) -> SetupResult<SingleSetup> {
    let grid = build_grid(&cfg.grid, default_grid)?;
    let field = build_field(&cfg.field, grid, default_field(grid, 0.3, 0.2, 2.0), ctx)?;
    let packet = build_packet_spec(&cfg.packet, grid, default_packet, ctx)?;
    let potential = build_potential_spec(&cfg.potential, grid, default_potential, ctx)?;
    let consts = build_constants(&cfg.constants, default_consts)?;
    let x = cfg.references.x.unwrap_or_else(|| grid.z(grid.len() / 2));
    let w = cfg.references.w.unwrap_or_else(|| grid.z(grid.len() * 5 / 8));
    Ok(SingleSetup { grid, field, packet, potential, consts, x, w })
}

fn ops_defaults(cfg: &ScenarioConfig, ctx: &RunContext, potential: PotentialSpec) -> SetupResult<SingleSetup> {
    setup(
        cfg,
        ctx,
        Grid1D::centered(512, 32.0).expect("valid default grid"),
        PacketSpec::Gaussian { center: 0.0, width: 1.2, k0: 0.5 },
        potential,
        PhysicalConstants::default(),
    )
}

fn dressed(psi: &WavePacket, f: &FieldSpec) -> Result<WavePacket, String> {
    let grid = *psi.grid();
    let mut amps = psi.amplitudes().clone();
    for (j, a) in amps.iter_mut().enumerate() {
        *a *= f.gamma_at(grid.z(j)).err_string()?.exp();
    }
    WavePacket::new(grid, amps).err_string()
}

// ---------------------------------------------------------------------------
// localize
// ---------------------------------------------------------------------------

pub fn run_localize(cfg: &ScenarioConfig, ctx: &RunContext) -> SetupResult<ScenarioOutput> {
    let s = ops_defaults(cfg, ctx, PotentialSpec::Free)?;
    let tol = &cfg.tolerances;
    let mut reports = Vec::new();

    let psi = s.packet.build(s.grid)?;

    let id = "localize_uniform_identity";
    let identity = "g constant: psi_{g,x} = psi bit for bit";
    {
        let psi = psi.clone();
        let x = s.x;
        reports.push(check(id, identity, move || {
            let lp = localize_packet(&psi, &FieldSpec::uniform(), x).err_string()?;
            let diff = bit_mismatches(
                lp.packet().amplitudes().as_slice().unwrap(),
                psi.amplitudes().as_slice().unwrap(),
            );
            Ok(CheckOutcome::measured(id, identity, diff as f64, 0.0))
        }));
    }

    let id = "localize_phase_modulus";
    let identity = "alpha = 0: |psi_{g,x}(z)| = |psi(z)| pointwise";
    {
        let psi = psi.clone();
        let field = FieldSpec::new(Profile::zero(), s.field.beta().clone());
        let x = s.x;
        let tol = tol.modulus;
        reports.push(check(id, identity, move || {
            let lp = localize_packet(&psi, &field, x).err_string()?;
            let worst = lp
                .packet()
                .amplitudes()
                .iter()
                .zip(psi.amplitudes())
                .map(|(a, b)| (a.norm() - b.norm()).abs())
                .fold(0.0, f64::max);
            Ok(CheckOutcome::measured(id, identity, worst, tol))
        }));
    }

    let id = "localize_spike_transport";
    let identity = "unit spike at z0 maps to e^(gamma(z0) - gamma(z_x))";
    {
        let grid = s.grid;
        let field = s.field.clone();
        let x = s.x;
        reports.push(check(id, identity, move || {
            let j0 = grid.len() / 4;
            let spike = WavePacket::unit_spike(grid, j0).err_string()?;
            let lp = localize_packet(&spike, &field, x).err_string()?;
            let expect = (field.gamma_at(grid.z(j0)).err_string()?
                - field.gamma_at(x).err_string()?)
            .exp();
            let got = lp.packet().amplitudes()[j0];
            Ok(CheckOutcome::measured(id, identity, (got - expect).norm(), 1e-14))
        }));
    }

    let id = "localize_translate_direct";
    let identity = "translate_reference(x -> w) = localize at w";
    {
        let psi = psi.clone();
        let field = s.field.clone();
        let (x, w) = (s.x, s.w);
        let tol = tol.translate_roundtrip;
        reports.push(check(id, identity, move || {
            let lp = localize_packet(&psi, &field, x).err_string()?;
            let moved = translate_reference(&lp, w).err_string()?;
            let direct = localize_packet(&psi, &field, w).err_string()?;
            let worst = max_abs_diff(
                moved.packet().amplitudes().as_slice().unwrap(),
                direct.packet().amplitudes().as_slice().unwrap(),
            );
            Ok(CheckOutcome::measured(id, identity, worst, tol))
        }));
    }

    let id = "localize_translate_roundtrip";
    let identity = "translate x -> w -> x returns the original amplitudes";
    {
        let psi = psi.clone();
        let field = s.field.clone();
        let (x, w) = (s.x, s.w);
        let tol = tol.translate_roundtrip;
        reports.push(check(id, identity, move || {
            let lp = localize_packet(&psi, &field, x).err_string()?;
            let there = translate_reference(&lp, w).err_string()?;
            let back = translate_reference(&there, x).err_string()?;
            let worst = max_abs_diff(
                back.packet().amplitudes().as_slice().unwrap(),
                lp.packet().amplitudes().as_slice().unwrap(),
            );
            Ok(CheckOutcome::measured(id, identity, worst, tol))
        }));
    }

    let id = "localize_argmax_invariant";
    let identity = "argmax |psi_{g,x}| does not move under reference change";
    {
        let psi = psi.clone();
        let field = s.field.clone();
        let (x, w) = (s.x, s.w);
        reports.push(check(id, identity, move || {
            let lp = localize_packet(&psi, &field, x).err_string()?;
            let moved = translate_reference(&lp, w).err_string()?;
            let a = lp.packet().argmax_abs();
            let b = moved.packet().argmax_abs();
            Ok(CheckOutcome::measured(id, identity, a.abs_diff(b) as f64, 0.0))
        }));
    }

    let lp = localize_packet(&psi, &s.field, s.x)
        .map_err(|e| super::ScenarioError::Setup(e.to_string()))?;
    let zs = s.grid.zs();
    let artifacts = vec![
        Artifact {
            name: "initial.csv".to_string(),
            content: packet_csv(&zs, psi.amplitudes().as_slice().unwrap()),
        },
        Artifact {
            name: "localized.csv".to_string(),
            content: packet_csv(&zs, lp.packet().amplitudes().as_slice().unwrap()),
        },
    ];

    Ok(ScenarioOutput { reports, artifacts })
}

// ---------------------------------------------------------------------------
// operators
// ---------------------------------------------------------------------------

pub fn run_operators(cfg: &ScenarioConfig, ctx: &RunContext) -> SetupResult<ScenarioOutput> {
    let s = ops_defaults(cfg, ctx, PotentialSpec::Harmonic { omega: 1.0, center: 0.0 })?;
    let tol = &cfg.tolerances;
    let mut reports = Vec::new();

    let psi = s.packet.build(s.grid)?;

    let id = "covariant_uniform_reduces";
    let identity = "Gamma = 0: D psi = central difference, bit for bit";
    {
        let psi = psi.clone();
        reports.push(check(id, identity, move || {
            let d = covariant_derivative(&psi, &FieldSpec::uniform()).err_string()?;
            let plain = central_derivative(&psi);
            let diff = bit_mismatches(
                d.amplitudes().as_slice().unwrap(),
                plain.amplitudes().as_slice().unwrap(),
            );
            Ok(CheckOutcome::measured(id, identity, diff as f64, 0.0))
        }));
    }

    let id = "covariant_annihilation";
    let identity = "D e^(-gamma) = 0 at second order in h";
    {
        let field = s.field.clone();
        let grid = s.grid;
        reports.push(check(id, identity, move || {
            let residual = |g: Grid1D| -> Result<f64, String> {
                let f = field.clone();
                let psi =
                    WavePacket::from_fn(g, |z| (-f.gamma_at(z).unwrap()).exp()).err_string()?;
                let d = covariant_derivative(&psi, &f).err_string()?;
                Ok(d.norm() / psi.norm())
            };
            let (r1, r2) = (residual(grid)?, residual(grid.refined())?);
            let (res, note) = halving_ratio_residual(r1, r2);
            Ok(CheckOutcome::measured(id, identity, res, 0.8).with_note(note))
        }));
    }

    let id = "covariant_transport_quotient";
    let identity = "one-sided transport quotient agrees with D at first order";
    {
        let field = s.field.clone();
        let grid = s.grid;
        let packet = s.packet.clone();
        reports.push(check(id, identity, move || {
            let residual = |g: Grid1D| -> Result<f64, String> {
                let psi = packet.build(g).map_err(|e| e.to_string())?;
                let lhs = transport_quotient_derivative(&psi, &field).err_string()?;
                let rhs = covariant_derivative(&psi, &field).err_string()?;
                let diff: f64 = lhs
                    .amplitudes()
                    .iter()
                    .zip(rhs.amplitudes())
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum::<f64>()
                    * g.dz();
                Ok(diff.sqrt() / psi.norm())
            };
            let (r1, r2) = (residual(grid)?, residual(grid.refined())?);
            let ratio = r1 / r2;
            let note = format!("residuals {r1:.3e} -> {r2:.3e}, ratio {ratio:.3}");
            Ok(CheckOutcome::measured(id, identity, (ratio - 2.0).abs(), 0.4).with_note(note))
        }));
    }

    let id = "momentum_plane_wave";
    let identity = "plane wave at a lattice momentum is an eigenvector of p~";
    {
        let grid = s.grid;
        let consts = s.consts;
        reports.push(check(id, identity, move || {
            let k = grid.momentum(4, consts.hbar) / consts.hbar;
            let psi =
                WavePacket::from_fn(grid, |z| Complex64::new(0.0, k * z).exp()).err_string()?;
            let p = canonical_momentum_apply(&psi, &FieldSpec::uniform(), &consts).err_string()?;
            let lambda = consts.hbar * (k * grid.dz()).sin() / grid.dz();
            let worst = p
                .amplitudes()
                .iter()
                .zip(psi.amplitudes())
                .map(|(out, a)| (out - lambda * a).norm())
                .fold(0.0, f64::max);
            let note = format!(
                "lattice eigenvalue {lambda:.12}, continuum hbar k = {:.12}",
                consts.hbar * k
            );
            Ok(CheckOutcome::measured(id, identity, worst, 1e-12).with_note(note))
        }));
    }

    let id = "kinetic_momentum_square";
    let identity = "K~ psi = (p~ p~ psi) / 2m at second order in h";
    {
        let field = s.field.clone();
        let grid = s.grid;
        let packet = s.packet.clone();
        let consts = s.consts;
        reports.push(check(id, identity, move || {
            let residual = |g: Grid1D| -> Result<f64, String> {
                let psi = packet.build(g).map_err(|e| e.to_string())?;
                let k1 = scaled_kinetic_apply(&psi, &field, &consts).err_string()?;
                let p1 = canonical_momentum_apply(&psi, &field, &consts).err_string()?;
                let p2 = canonical_momentum_apply(&p1, &field, &consts).err_string()?;
                Ok(rel_l2(
                    k1.amplitudes().as_slice().unwrap(),
                    &p2.amplitudes()
                        .iter()
                        .map(|a| a / (2.0 * consts.mass))
                        .collect::<Vec<_>>(),
                ))
            };
            let (r1, r2) = (residual(grid)?, residual(grid.refined())?);
            let (res, note) = halving_ratio_residual(r1, r2);
            Ok(CheckOutcome::measured(id, identity, res, 0.8).with_note(note))
        }));
    }

    let id = "intertwine_halving";
    let identity = "H_x(e^gamma psi) = e^gamma H^x psi, residual O(h^2)";
    {
        let field = s.field.clone();
        let grid = s.grid;
        let packet = s.packet.clone();
        let potential = s.potential.clone();
        let consts = s.consts;
        reports.push(check(id, identity, move || {
            let residual = |g: Grid1D| -> Result<f64, String> {
                let psi = packet.build(g).map_err(|e| e.to_string())?;
                let v = potential.build(g, &consts).map_err(|e| e.to_string())?;
                let lhs = hamiltonian_apply(
                    &dressed(&psi, &field)?,
                    &field,
                    v.as_deref(),
                    &consts,
                    false,
                )
                .err_string()?;
                let rhs =
                    dressed(&hamiltonian_apply(&psi, &field, v.as_deref(), &consts, true)
                        .err_string()?, &field)?;
                let diff: f64 = lhs
                    .amplitudes()
                    .iter()
                    .zip(rhs.amplitudes())
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum::<f64>()
                    * g.dz();
                Ok(diff.sqrt() / psi.norm())
            };
            let (r1, r2) = (residual(grid)?, residual(grid.refined())?);
            let (res, note) = halving_ratio_residual(r1, r2);
            Ok(CheckOutcome::measured(id, identity, res, 0.8).with_note(note))
        }));
    }

    let id = "commutes_halving";
    let identity = "localize(H^x psi) = H_x localize(psi), residual O(h^2)";
    {
        let field = s.field.clone();
        let grid = s.grid;
        let packet = s.packet.clone();
        let potential = s.potential.clone();
        let consts = s.consts;
        let x = s.x;
        reports.push(check(id, identity, move || {
            let residual = |g: Grid1D| -> Result<f64, String> {
                let psi = packet.build(g).map_err(|e| e.to_string())?;
                let v = potential.build(g, &consts).map_err(|e| e.to_string())?;
                localization_commutes_check(&psi, &field, v.as_deref(), x, &consts, true)
                    .err_string()
            };
            let (r1, r2) = (residual(grid)?, residual(grid.refined())?);
            let (res, note) = halving_ratio_residual(r1, r2);
            Ok(CheckOutcome::measured(id, identity, res, 0.8).with_note(note))
        }));
    }

    let id = "commutes_potential_only";
    let identity = "V-only Hamiltonian commutes with localization to rounding";
    {
        let field = s.field.clone();
        let grid = s.grid;
        let psi = psi.clone();
        let potential = s.potential.clone();
        let consts = s.consts;
        let x = s.x;
        let tol = tol.commutes_potential;
        reports.push(check(id, identity, move || {
            let v = potential.build(grid, &consts).map_err(|e| e.to_string())?;
            let r = localization_commutes_check(&psi, &field, v.as_deref(), x, &consts, false)
                .err_string()?;
            Ok(CheckOutcome::measured(id, identity, r, tol))
        }));
    }

    let id = "operators_linearity";
    let identity = "op(a psi + b phi) = a op(psi) + b op(phi)";
    {
        let field = s.field.clone();
        let grid = s.grid;
        let consts = s.consts;
        let tol = tol.linearity;
        reports.push(check(id, identity, move || {
            let psi = WavePacket::gaussian(grid, -1.0, 1.0, 0.4).err_string()?;
            let phi = WavePacket::gaussian(grid, 2.0, 1.5, -0.2).err_string()?;
            let (a, b) = (Complex64::new(0.7, -0.3), Complex64::new(-1.1, 0.4));
            let combo =
                WavePacket::new(grid, psi.amplitudes() * a + phi.amplitudes() * b).err_string()?;
            let mut worst: f64 = 0.0;
            let apply = |p: &WavePacket| -> Result<Vec<Vec<Complex64>>, String> {
                Ok(vec![
                    covariant_derivative(p, &field).err_string()?.amplitudes().to_vec(),
                    scaled_kinetic_apply(p, &field, &consts).err_string()?.amplitudes().to_vec(),
                ])
            };
            let lhs = apply(&combo)?;
            let rhs_psi = apply(&psi)?;
            let rhs_phi = apply(&phi)?;
            for ((l, rp), rf) in lhs.iter().zip(&rhs_psi).zip(&rhs_phi) {
                let rhs: Vec<Complex64> =
                    rp.iter().zip(rf).map(|(x, y)| a * x + b * y).collect();
                worst = worst.max(rel_l2(l, &rhs));
            }
            Ok(CheckOutcome::measured(id, identity, worst, tol))
        }));
    }

    let v = s.potential.build(s.grid, &s.consts)?;
    let h_psi = hamiltonian_apply(&psi, &s.field, v.as_deref(), &s.consts, true)
        .map_err(|e| super::ScenarioError::Setup(e.to_string()))?;
    let d_psi = covariant_derivative(&psi, &s.field)
        .map_err(|e| super::ScenarioError::Setup(e.to_string()))?;
    let zs = s.grid.zs();
    let artifacts = vec![
        Artifact {
            name: "covariant.csv".to_string(),
            content: packet_csv(&zs, d_psi.amplitudes().as_slice().unwrap()),
        },
        Artifact {
            name: "hamiltonian.csv".to_string(),
            content: packet_csv(&zs, h_psi.amplitudes().as_slice().unwrap()),
        },
    ];

    Ok(ScenarioOutput { reports, artifacts })
}

// ---------------------------------------------------------------------------
// evolve
// ---------------------------------------------------------------------------

pub fn run_evolve(cfg: &ScenarioConfig, ctx: &RunContext) -> SetupResult<ScenarioOutput> {
    // The packet is broad and slow so that the second-order dispersion error
    // of the discrete Laplacian stays well inside the closed-form tolerance.
    let grid_default = Grid1D::centered(512, 40.0).expect("valid default grid");
    let s = setup(
        cfg,
        ctx,
        grid_default,
        PacketSpec::Gaussian { center: 0.0, width: 2.4, k0: 0.1 },
        PotentialSpec::Free,
        PhysicalConstants::new(1.0, 2.0).expect("valid"),
    )?;
    let tol = &cfg.tolerances;
    let (dt, steps) = (cfg.time.dt, cfg.time.steps);
    let mut reports = Vec::new();

    let psi = s.packet.build(s.grid)?;

    // Free run: track per-step norms, then compare against the closed form.
    let mut final_free: Option<WavePacket> = None;
    let mut exact_final: Option<Vec<Complex64>> = None;

    let id = "evolve_free_gaussian";
    let identity = "free Gaussian under Crank-Nicolson matches the closed form";
    {
        let grid = s.grid;
        let consts = s.consts;
        let packet = s.packet.clone();
        let psi = psi.clone();
        let tol_free = tol.evolve_free;
        let start = std::time::Instant::now();
        let outcome = (|| -> Result<(CheckOutcome, WavePacket, Vec<Complex64>, f64), String> {
            let (center, width, k0) = packet
                .gaussian_params()
                .ok_or("the closed-form comparison needs a gaussian packet")?;
            let stepper =
                CrankNicolson::new(grid, &FieldSpec::uniform(), None, &consts, dt, false)
                    .err_string()?;
            let mut amps = psi.amplitudes().clone();
            let mut norm = psi.norm();
            let mut drift: f64 = 0.0;
            for _ in 0..steps {
                stepper.step(&mut amps).err_string()?;
                let next = WavePacket::new(grid, amps.clone()).err_string()?.norm();
                drift = drift.max((next - norm).abs());
                norm = next;
            }
            let out = WavePacket::new(grid, amps).err_string()?;
            let t = dt * steps as f64;
            let exact: Vec<Complex64> = (0..grid.len())
                .map(|j| free_gaussian_at(grid.z(j), t, center, width, k0, &consts))
                .collect();
            let r = rel_l2(out.amplitudes().as_slice().unwrap(), &exact);
            Ok((
                CheckOutcome::measured(id, identity, r, tol_free)
                    .with_note(format!("{steps} steps of dt = {dt:.1e}")),
                out,
                exact,
                drift,
            ))
        })();
        let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
        match outcome {
            Ok((outcome, out, exact, drift_val)) => {
                final_free = Some(out);
                exact_final = Some(exact);
                reports.push(crate::report::CheckReport { outcome, runtime_ms });
                let id = "evolve_norm_drift";
                let identity = "g = 1: Crank-Nicolson conserves the norm per step";
                let tol_drift = tol.evolve_drift;
                reports.push(check(id, identity, move || {
                    Ok(CheckOutcome::measured(id, identity, drift_val, tol_drift))
                }));
            }
            Err(message) => {
                reports.push(crate::report::CheckReport {
                    outcome: CheckOutcome::failed(id, identity, message.clone()),
                    runtime_ms,
                });
                reports.push(crate::report::CheckReport {
                    outcome: CheckOutcome::failed(
                        "evolve_norm_drift",
                        "g = 1: Crank-Nicolson conserves the norm per step",
                        message,
                    ),
                    runtime_ms: 0.0,
                });
            }
        }
    }

    let id = "evolve_intertwined";
    let identity = "evolving e^gamma psi under H_x = e^gamma x (evolving psi under H^x)";
    {
        let grid = s.grid;
        let consts = s.consts;
        let psi = psi.clone();
        // A weak field keeps the discretization defect of the intertwining
        // well below the integrator tolerance.
        let field = if cfg.field.is_some() {
            s.field.clone()
        } else {
            default_field(grid, 1e-3, 1e-3, 2.0)
        };
        let tol_int = tol.evolve_intertwined;
        reports.push(check(id, identity, move || {
            let scaled_run = evolve(&psi, &field, None, &consts, dt, steps, true).err_string()?;
            let dressed_initial = dressed(&psi, &field)?;
            let plain_run =
                evolve(&dressed_initial, &field, None, &consts, dt, steps, false).err_string()?;
            let expect = dressed(&scaled_run, &field)?;
            let r = rel_l2(
                plain_run.amplitudes().as_slice().unwrap(),
                expect.amplitudes().as_slice().unwrap(),
            );
            Ok(CheckOutcome::measured(id, identity, r, tol_int))
        }));
    }

    let zs = s.grid.zs();
    let mut artifacts = vec![Artifact {
        name: "initial.csv".to_string(),
        content: packet_csv(&zs, psi.amplitudes().as_slice().unwrap()),
    }];
    if let Some(out) = &final_free {
        artifacts.push(Artifact {
            name: "final.csv".to_string(),
            content: packet_csv(&zs, out.amplitudes().as_slice().unwrap()),
        });
    }
    if let Some(exact) = &exact_final {
        artifacts.push(Artifact {
            name: "exact.csv".to_string(),
            content: packet_csv(&zs, exact),
        });
    }

    Ok(ScenarioOutput { reports, artifacts })
}

// ---------------------------------------------------------------------------
// momentum
// ---------------------------------------------------------------------------

pub fn run_momentum(cfg: &ScenarioConfig, ctx: &RunContext) -> SetupResult<ScenarioOutput> {
    let s = ops_defaults(cfg, ctx, PotentialSpec::Free)?;
    let tol = &cfg.tolerances;
    let mut reports = Vec::new();

    let psi = s.packet.build(s.grid)?;

    let id = "kernel_uniform_delta";
    let identity = "gamma = 0: K = L at zero momentum difference, 0 elsewhere";
    {
        let grid = s.grid;
        reports.push(check(id, identity, move || {
            let kernel = momentum_kernel(&FieldSpec::uniform(), &grid).err_string()?;
            let mut worst = (kernel[0] - Complex64::new(grid.length(), 0.0)).norm();
            for v in &kernel[1..] {
                worst = worst.max(v.norm());
            }
            Ok(CheckOutcome::measured(id, identity, worst, 0.0))
        }));
    }

    let id = "kernel_convolution";
    let identity = "dft(e^gamma psi) = (1/L) K * dft(psi), circular convolution";
    {
        let grid = s.grid;
        let field = s.field.clone();
        let psi = psi.clone();
        let x = s.x;
        let tol_conv = tol.kernel_convolution;
        reports.push(check(id, identity, move || {
            let localized = localize_packet(&psi, &field, x).err_string()?;
            let lhs = momentum_representation(localized.packet());
            let kernel = momentum_kernel(&field, &grid).err_string()?;
            let spectrum = momentum_representation(&psi);
            let conv = kernel_convolve(&kernel, &spectrum, &grid);
            let constant = (-field.gamma_at(x).err_string()?).exp();
            let rhs: Vec<Complex64> = conv.iter().map(|v| v * constant).collect();
            Ok(CheckOutcome::measured(id, identity, rel_l2(&lhs, &rhs), tol_conv))
        }));
    }

    let id = "kernel_weak_field_quadratic";
    let identity = "K - (L delta + gamma_hat) shrinks as the field squared";
    {
        let grid = s.grid;
        let field = s.field.clone();
        reports.push(check(id, identity, move || {
            let linear_residual = |eps: f64| -> Result<f64, String> {
                let f = field.scaled(eps);
                let kernel = momentum_kernel(&f, &grid).err_string()?;
                let gamma: Vec<Complex64> = (0..grid.len())
                    .map(|j| f.gamma_at(grid.z(j)))
                    .collect::<Result<_, _>>()
                    .err_string()?;
                let gamma_hat = dft_forward(&gamma, &grid);
                let mut diff = 0.0f64;
                for (bin, (k, gh)) in kernel.iter().zip(&gamma_hat).enumerate() {
                    let first_order = if bin == 0 {
                        Complex64::new(grid.length(), 0.0) + gh
                    } else {
                        *gh
                    };
                    diff += (k - first_order).norm_sqr();
                }
                Ok(diff.sqrt())
            };
            let s1 = linear_residual(1e-2)? / 1e-4;
            let s2 = linear_residual(1e-3)? / 1e-6;
            let ratio = if s1 > s2 { s1 / s2 } else { s2 / s1 };
            let note = format!("scaled residuals {s1:.4e} vs {s2:.4e}, ratio {ratio:.3}");
            Ok(CheckOutcome::measured(id, identity, ratio - 1.0, 1.0).with_note(note))
        }));
    }

    let kernel = momentum_kernel(&s.field, &s.grid)
        .map_err(|e| super::ScenarioError::Setup(e.to_string()))?;
    let localized = localize_packet(&psi, &s.field, s.x)
        .map_err(|e| super::ScenarioError::Setup(e.to_string()))?;
    let spectrum = momentum_representation(localized.packet());
    let ps: Vec<f64> = (0..s.grid.len())
        .map(|bin| s.grid.momentum(bin, s.consts.hbar))
        .collect();
    let artifacts = vec![
        Artifact {
            name: "kernel.csv".to_string(),
            content: packet_csv_with_header("p", &ps, &kernel),
        },
        Artifact {
            name: "spectrum.csv".to_string(),
            content: packet_csv_with_header("p", &ps, &spectrum),
        },
    ];

    Ok(ScenarioOutput { reports, artifacts })
}
