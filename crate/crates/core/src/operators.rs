//! Covariant derivative, canonical momentum, scaled kinetic energy, and
//! Hamiltonians for one particle on a periodic grid.
//!
//! Spatial derivatives are second-order central differences with periodic
//! wrap. The connection gradient enters as `D = d/dz + Gamma`, and the scaled
//! kinetic operator expands `(p - i hbar Gamma)^2 / 2m` into
//! `d^2 + (dGamma) + 2 Gamma d + Gamma^2` using the commutator of the
//! momentum with a multiplication operator.

use ndarray::Array1;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::grid::PhysicalConstants;
use crate::packet::{localize_packet, WavePacket};

/// Periodic central difference, `(psi[j+1] - psi[j-1]) / (2 dz)`.
pub fn central_derivative(psi: &WavePacket) -> WavePacket {
    let grid = *psi.grid();
    let n = grid.len();
    let a = psi.amplitudes();
    let scale = 1.0 / (2.0 * grid.dz());
    let out = Array1::from_iter(
        (0..n).map(|j| (a[(j + 1) % n] - a[(j + n - 1) % n]) * scale),
    );
    WavePacket::new(grid, out).expect("same shape")
}

/// Periodic second difference, `(psi[j+1] - 2 psi[j] + psi[j-1]) / dz^2`.
pub fn second_derivative(psi: &WavePacket) -> WavePacket {
    let grid = *psi.grid();
    let n = grid.len();
    let a = psi.amplitudes();
    let scale = 1.0 / (grid.dz() * grid.dz());
    let out = Array1::from_iter(
        (0..n).map(|j| (a[(j + 1) % n] - a[j] * 2.0 + a[(j + n - 1) % n]) * scale),
    );
    WavePacket::new(grid, out).expect("same shape")
}

fn gamma_gradient_samples(psi: &WavePacket, f: &FieldSpec) -> Result<Vec<Complex64>> {
    let grid = psi.grid();
    (0..grid.len()).map(|j| f.dgamma_at(grid.z(j))).collect()
}

/// `D psi = d psi + Gamma psi`. When the field is constant the connection
/// term vanishes identically and the plain central difference is returned
/// unchanged.
pub fn covariant_derivative(psi: &WavePacket, f: &FieldSpec) -> Result<WavePacket> {
    let deriv = central_derivative(psi);
    if f.is_constant() {
        return Ok(deriv);
    }
    let gamma = gamma_gradient_samples(psi, f)?;
    let out = Array1::from_iter(
        deriv
            .amplitudes()
            .iter()
            .zip(psi.amplitudes())
            .zip(&gamma)
            .map(|((d, a), g)| d + g * a),
    );
    WavePacket::new(*psi.grid(), out)
}

/// The literal one-sided transport quotient: the forward neighbor is carried
/// into the local fiber by the connection factor before subtracting,
/// `(e^(gamma(z+h) - gamma(z)) psi(z+h) - psi(z)) / h`. First-order accurate;
/// kept as an independent route to the covariant derivative.
pub fn transport_quotient_derivative(psi: &WavePacket, f: &FieldSpec) -> Result<WavePacket> {
    let grid = *psi.grid();
    let n = grid.len();
    let a = psi.amplitudes();
    let mut out = Array1::zeros(n);
    for j in 0..n {
        let here = grid.z(j);
        let next_index = (j + 1) % n;
        // The forward neighbor sits at z + dz even when the index wraps.
        let transport = (f.gamma_at(here + grid.dz())? - f.gamma_at(here)?).exp();
        out[j] = (transport * a[next_index] - a[j]) / grid.dz();
    }
    WavePacket::new(grid, out)
}

/// Canonical momentum in the fiber: `-i hbar (d + Gamma) psi`.
pub fn canonical_momentum_apply(
    psi: &WavePacket,
    f: &FieldSpec,
    c: &PhysicalConstants,
) -> Result<WavePacket> {
    let d = covariant_derivative(psi, f)?;
    let factor = Complex64::new(0.0, -c.hbar);
    WavePacket::new(*psi.grid(), d.amplitudes().mapv(|a| factor * a))
}

/// Plain kinetic energy `-hbar^2/2m d^2`.
pub fn kinetic_apply(psi: &WavePacket, c: &PhysicalConstants) -> WavePacket {
    let coef = -c.hbar * c.hbar / (2.0 * c.mass);
    let d2 = second_derivative(psi);
    WavePacket::new(*psi.grid(), d2.amplitudes().mapv(|a| coef * a)).expect("same shape")
}

/// Scaled kinetic energy
/// `-hbar^2/2m [d^2 + (dGamma) + 2 Gamma d + Gamma^2] psi`.
pub fn scaled_kinetic_apply(
    psi: &WavePacket,
    f: &FieldSpec,
    c: &PhysicalConstants,
) -> Result<WavePacket> {
    if f.is_constant() {
        return Ok(kinetic_apply(psi, c));
    }
    let grid = *psi.grid();
    if grid.len() < 5 {
        return Err(Error::GridTooSmall { n: grid.len(), min: 5 });
    }
    let coef = -c.hbar * c.hbar / (2.0 * c.mass);
    let d1 = central_derivative(psi);
    let d2 = second_derivative(psi);
    let mut out = Array1::zeros(grid.len());
    for j in 0..grid.len() {
        let z = grid.z(j);
        let g = f.dgamma_at(z)?;
        let dg = f.d2gamma_at(z)?;
        let a = psi.amplitudes()[j];
        out[j] = coef * (d2.amplitudes()[j] + dg * a + 2.0 * g * d1.amplitudes()[j] + g * g * a);
    }
    WavePacket::new(grid, out)
}

/// Hamiltonian action. `scaled` selects the fiber-local operator with the
/// connection terms; otherwise the plain kinetic operator is used. The
/// potential acts pointwise either way.
pub fn hamiltonian_apply(
    psi: &WavePacket,
    f: &FieldSpec,
    potential: Option<&[f64]>,
    c: &PhysicalConstants,
    scaled: bool,
) -> Result<WavePacket> {
    let grid = *psi.grid();
    if let Some(v) = potential {
        if v.len() != grid.len() {
            return Err(Error::ShapeMismatch { expected: grid.len(), actual: v.len() });
        }
    }
    let kinetic = if scaled {
        scaled_kinetic_apply(psi, f, c)?
    } else {
        kinetic_apply(psi, c)
    };
    let mut out = kinetic.into_amplitudes();
    if let Some(v) = potential {
        for (j, a) in out.iter_mut().enumerate() {
            *a += v[j] * psi.amplitudes()[j];
        }
    }
    WavePacket::new(grid, out)
}

/// Pointwise potential application only (no kinetic term).
fn potential_apply(psi: &WavePacket, potential: Option<&[f64]>) -> Result<WavePacket> {
    let grid = *psi.grid();
    if let Some(v) = potential {
        if v.len() != grid.len() {
            return Err(Error::ShapeMismatch { expected: grid.len(), actual: v.len() });
        }
        let out = Array1::from_iter(
            psi.amplitudes().iter().enumerate().map(|(j, a)| a * v[j]),
        );
        WavePacket::new(grid, out)
    } else {
        WavePacket::new(grid, Array1::zeros(grid.len()))
    }
}

/// Relative residual of commuting localization with the Hamiltonian:
/// `|| localize(H^x psi) - H_x localize(psi) || / ||psi||`. With
/// `include_kinetic = false` both sides reduce to the potential term, which
/// commutes with pointwise multiplication up to rounding.
pub fn localization_commutes_check(
    psi: &WavePacket,
    f: &FieldSpec,
    potential: Option<&[f64]>,
    x: f64,
    c: &PhysicalConstants,
    include_kinetic: bool,
) -> Result<f64> {
    let scaled_side = if include_kinetic {
        hamiltonian_apply(psi, f, potential, c, true)?
    } else {
        potential_apply(psi, potential)?
    };
    let lhs = localize_packet(&scaled_side, f, x)?;

    let localized = localize_packet(psi, f, x)?;
    let rhs = if include_kinetic {
        hamiltonian_apply(localized.packet(), f, potential, c, false)?
    } else {
        potential_apply(localized.packet(), potential)?
    };

    let diff_sq: f64 = lhs
        .packet()
        .amplitudes()
        .iter()
        .zip(rhs.amplitudes())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        * psi.grid().dz();
    Ok(diff_sq.sqrt() / psi.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FieldSpec, Profile};
    use crate::grid::Grid1D;
    use std::f64::consts::PI;

    fn grid(n: usize) -> Grid1D {
        Grid1D::centered(n, 32.0).unwrap()
    }

    fn smooth_field() -> FieldSpec {
        FieldSpec::new(
            Profile::Gaussian { amplitude: 0.3, center: 0.0, width: 2.0 },
            Profile::Sine { amplitude: 0.2, wavenumber: 2.0 * PI * 2.0 / 32.0, phase: 0.0 },
        )
    }

    fn rel_l2(a: &WavePacket, b: &WavePacket) -> f64 {
        let num: f64 = a
            .amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum();
        let den: f64 = b.amplitudes().iter().map(|x| x.norm_sqr()).sum();
        (num / den).sqrt()
    }

    #[test]
    fn covariant_derivative_reduces_to_central_difference() {
        let psi = WavePacket::gaussian(grid(64), 0.0, 1.2, 0.5).unwrap();
        let d = covariant_derivative(&psi, &FieldSpec::uniform()).unwrap();
        let plain = central_derivative(&psi);
        assert_eq!(d.amplitudes(), plain.amplitudes());
    }

    #[test]
    fn covariant_derivative_annihilates_inverse_exponent() {
        let f = smooth_field();
        let residual = |n: usize| -> f64 {
            let g = grid(n);
            let psi = WavePacket::from_fn(g, |z| (-f.gamma_at(z).unwrap()).exp()).unwrap();
            let d = covariant_derivative(&psi, &f).unwrap();
            d.norm() / psi.norm()
        };
        let (r1, r2) = (residual(256), residual(512));
        assert!(r1 < 1e-3, "residual {r1}");
        let ratio = r1 / r2;
        assert!((3.2..=4.8).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn transport_quotient_agrees_at_first_order() {
        let f = smooth_field();
        let residual = |n: usize| -> f64 {
            let g = grid(n);
            let psi = WavePacket::gaussian(g, 0.0, 1.2, 0.5).unwrap();
            let lhs = transport_quotient_derivative(&psi, &f).unwrap();
            let rhs = covariant_derivative(&psi, &f).unwrap();
            let diff: f64 = lhs
                .amplitudes()
                .iter()
                .zip(rhs.amplitudes())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                * g.dz();
            diff.sqrt() / psi.norm()
        };
        let ratio = residual(256) / residual(512);
        assert!((1.6..=2.4).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn plane_wave_is_a_momentum_eigenvector() {
        let g = grid(128);
        let c = PhysicalConstants::default();
        let k = 2.0 * PI * 3.0 / g.length();
        let psi = WavePacket::from_fn(g, |z| Complex64::new(0.0, k * z).exp()).unwrap();
        let p = canonical_momentum_apply(&psi, &FieldSpec::uniform(), &c).unwrap();
        // Central differences give the lattice dispersion hbar sin(k h)/h,
        // second-order close to hbar k.
        let lambda = c.hbar * (k * g.dz()).sin() / g.dz();
        for (out, a) in p.amplitudes().iter().zip(psi.amplitudes()) {
            assert!((out - lambda * a).norm() <= 1e-12);
        }
        assert!((lambda - c.hbar * k).abs() <= c.hbar * k * (k * g.dz()).powi(2) / 6.0 * 1.01);
    }

    #[test]
    fn constant_connection_shifts_the_eigenvalue() {
        let g = grid(128);
        let c = PhysicalConstants::default();
        let slope = 0.35;
        let f = FieldSpec::new(
            Profile::Linear { slope, intercept: 0.0 },
            Profile::zero(),
        );
        let k = 2.0 * PI * 4.0 / g.length();
        let psi = WavePacket::from_fn(g, |z| Complex64::new(0.0, k * z).exp()).unwrap();
        let p = canonical_momentum_apply(&psi, &f, &c).unwrap();
        let lambda = Complex64::new(c.hbar * (k * g.dz()).sin() / g.dz(), -c.hbar * slope);
        for (out, a) in p.amplitudes().iter().zip(psi.amplitudes()) {
            assert!((out - lambda * a).norm() <= 1e-12);
        }
    }

    #[test]
    fn momentum_intertwines_with_the_exponent() {
        // -i hbar d(e^gamma psi) = e^gamma p~ psi up to O(h^2).
        let f = smooth_field();
        let c = PhysicalConstants::default();
        let residual = |n: usize| -> f64 {
            let g = grid(n);
            let psi = WavePacket::gaussian(g, 0.0, 1.2, 0.5).unwrap();
            let dressed =
                WavePacket::from_fn(g, |z| f.gamma_at(z).unwrap().exp() * psi_at(&psi, &g, z))
                    .unwrap();
            let lhs = {
                let d = central_derivative(&dressed);
                WavePacket::new(g, d.amplitudes().mapv(|a| Complex64::new(0.0, -c.hbar) * a))
                    .unwrap()
            };
            let p = canonical_momentum_apply(&psi, &f, &c).unwrap();
            let rhs =
                WavePacket::from_fn(g, |z| f.gamma_at(z).unwrap().exp() * psi_at(&p, &g, z))
                    .unwrap();
            rel_l2(&lhs, &rhs)
        };
        let ratio = residual(256) / residual(512);
        assert!((3.2..=4.8).contains(&ratio), "ratio {ratio}");
    }

    fn psi_at(psi: &WavePacket, g: &Grid1D, z: f64) -> Complex64 {
        psi.amplitudes()[g.index_of(z).unwrap()]
    }

    #[test]
    fn scaled_kinetic_matches_squared_momentum() {
        let f = smooth_field();
        let c = PhysicalConstants::default();
        let residual = |n: usize| -> f64 {
            let g = grid(n);
            let psi = WavePacket::gaussian(g, 0.0, 1.2, 0.5).unwrap();
            let k1 = scaled_kinetic_apply(&psi, &f, &c).unwrap();
            let p1 = canonical_momentum_apply(&psi, &f, &c).unwrap();
            let p2 = canonical_momentum_apply(&p1, &f, &c).unwrap();
            let k2 = WavePacket::new(g, p2.amplitudes().mapv(|a| a / (2.0 * c.mass))).unwrap();
            rel_l2(&k1, &k2)
        };
        let ratio = residual(256) / residual(512);
        assert!((3.2..=4.8).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn gamma_zero_kinetic_is_plain() {
        let psi = WavePacket::gaussian(grid(64), 0.0, 1.2, 0.0).unwrap();
        let c = PhysicalConstants::default();
        let a = scaled_kinetic_apply(&psi, &FieldSpec::uniform(), &c).unwrap();
        let b = kinetic_apply(&psi, &c);
        assert_eq!(a.amplitudes(), b.amplitudes());
    }

    #[test]
    fn oscillator_ground_state_is_an_eigenstate() {
        let g = grid(512);
        let c = PhysicalConstants::default();
        let omega = 1.0;
        let v: Vec<f64> = g.zs().iter().map(|&z| 0.5 * c.mass * omega * omega * z * z).collect();
        let sigma = (c.hbar / (2.0 * c.mass * omega)).sqrt();
        let psi = WavePacket::gaussian(g, 0.0, sigma, 0.0).unwrap();
        let h = hamiltonian_apply(&psi, &FieldSpec::uniform(), Some(&v), &c, false).unwrap();
        let e0 = 0.5 * c.hbar * omega;
        let expected = WavePacket::new(g, psi.amplitudes().mapv(|a| a * e0)).unwrap();
        let r = rel_l2(&h, &expected);
        assert!(r <= 1e-3, "residual {r}");
    }

    #[test]
    fn unscaled_hamiltonian_with_uniform_field_matches_scaled() {
        let g = grid(64);
        let c = PhysicalConstants::default();
        let v: Vec<f64> = g.zs().iter().map(|&z| 0.1 * z * z).collect();
        let psi = WavePacket::gaussian(g, 0.0, 1.2, 0.3).unwrap();
        let a = hamiltonian_apply(&psi, &FieldSpec::uniform(), Some(&v), &c, true).unwrap();
        let b = hamiltonian_apply(&psi, &FieldSpec::uniform(), Some(&v), &c, false).unwrap();
        assert_eq!(a.amplitudes(), b.amplitudes());
    }

    #[test]
    fn operators_are_linear() {
        let g = grid(64);
        let c = PhysicalConstants::default();
        let f = smooth_field();
        let psi = WavePacket::gaussian(g, -1.0, 1.0, 0.4).unwrap();
        let phi = WavePacket::gaussian(g, 2.0, 1.5, -0.2).unwrap();
        let (a, b) = (Complex64::new(0.7, -0.3), Complex64::new(-1.1, 0.4));
        let combo = WavePacket::new(
            g,
            psi.amplitudes() * a + phi.amplitudes() * b,
        )
        .unwrap();

        for op in [
            |p: &WavePacket| covariant_derivative(p, &smooth_field()).unwrap(),
            |p: &WavePacket| {
                scaled_kinetic_apply(p, &smooth_field(), &PhysicalConstants::default()).unwrap()
            },
        ] {
            let lhs = op(&combo);
            let rhs = WavePacket::new(
                g,
                op(&psi).amplitudes() * a + op(&phi).amplitudes() * b,
            )
            .unwrap();
            let denom: f64 = rhs.amplitudes().iter().map(|x| x.norm_sqr()).sum();
            let num: f64 = lhs
                .amplitudes()
                .iter()
                .zip(rhs.amplitudes())
                .map(|(x, y)| (x - y).norm_sqr())
                .sum();
            assert!((num / denom).sqrt() <= 1e-12);
        }
        let _ = (f, c);
    }

    #[test]
    fn localization_commutes_exactly_for_uniform_field() {
        let g = grid(64);
        let c = PhysicalConstants::default();
        let psi = WavePacket::gaussian(g, 0.0, 1.2, 0.5).unwrap();
        let v: Vec<f64> = g.zs().iter().map(|&z| 0.5 * z * z).collect();
        let r = localization_commutes_check(&psi, &FieldSpec::uniform(), Some(&v), 0.0, &c, true)
            .unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn localization_commutes_with_potential_only() {
        let g = grid(256);
        let c = PhysicalConstants::default();
        let psi = WavePacket::gaussian(g, 0.0, 1.2, 0.5).unwrap();
        let v: Vec<f64> = g.zs().iter().map(|&z| 0.5 * z * z).collect();
        let r = localization_commutes_check(&psi, &smooth_field(), Some(&v), 0.0, &c, false)
            .unwrap();
        assert!(r <= 1e-14, "residual {r}");
    }

    #[test]
    fn localization_commutation_residual_shrinks_at_second_order() {
        let c = PhysicalConstants::default();
        let f = smooth_field();
        let residual = |n: usize| -> f64 {
            let g = grid(n);
            let psi = WavePacket::gaussian(g, 0.0, 1.2, 0.5).unwrap();
            let v: Vec<f64> = g.zs().iter().map(|&z| 0.5 * z * z).collect();
            localization_commutes_check(&psi, &f, Some(&v), 0.0, &c, true).unwrap()
        };
        let ratio = residual(512) / residual(1024);
        assert!((3.2..=4.8).contains(&ratio), "ratio {ratio}");
    }
}
