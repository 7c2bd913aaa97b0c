//! Crank-Nicolson time stepping for the one-particle Hamiltonians.
//!
//! Each step solves `(I + i dt H / 2 hbar) psi' = (I - i dt H / 2 hbar) psi`
//! on the dense operator matrix. The factorization is computed once and
//! reused across steps. With the scaled kinetic operator the matrix is not
//! Hermitian and the norm is allowed to drift; nothing is renormalized.

use nalgebra::{DMatrix, DVector};
use ndarray::Array1;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::grid::{Grid1D, PhysicalConstants};
use crate::packet::WavePacket;

/// A factored Crank-Nicolson stepper for a fixed Hamiltonian.
pub struct CrankNicolson {
    grid: Grid1D,
    explicit: DMatrix<Complex64>,
    implicit_lu: nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl CrankNicolson {
    pub fn new(
        grid: Grid1D,
        f: &FieldSpec,
        potential: Option<&[f64]>,
        c: &PhysicalConstants,
        dt: f64,
        scaled: bool,
    ) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::BadTimeStep(dt));
        }
        let h = hamiltonian_matrix(grid, f, potential, c, scaled)?;
        let n = grid.len();
        let half = Complex64::new(0.0, dt / (2.0 * c.hbar));
        let mut implicit = &h * half;
        let mut explicit = &h * (-half);
        for j in 0..n {
            implicit[(j, j)] += Complex64::new(1.0, 0.0);
            explicit[(j, j)] += Complex64::new(1.0, 0.0);
        }
        let implicit_lu = implicit.lu();
        Ok(Self { grid, explicit, implicit_lu })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    /// Advance one step in place.
    pub fn step(&self, amplitudes: &mut Array1<Complex64>) -> Result<()> {
        let v = DVector::from_iterator(self.grid.len(), amplitudes.iter().cloned());
        let rhs = &self.explicit * v;
        let solved = self.implicit_lu.solve(&rhs).ok_or(Error::SolveFailure)?;
        for (a, s) in amplitudes.iter_mut().zip(solved.iter()) {
            *a = *s;
        }
        Ok(())
    }
}

/// Dense matrix of the (scaled or plain) Hamiltonian on the periodic grid.
fn hamiltonian_matrix(
    grid: Grid1D,
    f: &FieldSpec,
    potential: Option<&[f64]>,
    c: &PhysicalConstants,
    scaled: bool,
) -> Result<DMatrix<Complex64>> {
    let n = grid.len();
    if let Some(v) = potential {
        if v.len() != n {
            return Err(Error::ShapeMismatch { expected: n, actual: v.len() });
        }
    }
    let coef = Complex64::new(-c.hbar * c.hbar / (2.0 * c.mass), 0.0);
    let dz = grid.dz();
    let inv_dz2 = coef / (dz * dz);
    let mut h = DMatrix::zeros(n, n);
    let with_connection = scaled && !f.is_constant();
    for j in 0..n {
        let jp = (j + 1) % n;
        let jm = (j + n - 1) % n;
        h[(j, j)] += inv_dz2 * -2.0;
        h[(j, jp)] += inv_dz2;
        h[(j, jm)] += inv_dz2;
        if with_connection {
            let z = grid.z(j);
            let g = f.dgamma_at(z)?;
            let dg = f.d2gamma_at(z)?;
            h[(j, j)] += coef * (dg + g * g);
            let off = coef * g / dz;
            h[(j, jp)] += off;
            h[(j, jm)] -= off;
        }
        if let Some(v) = potential {
            h[(j, j)] += Complex64::new(v[j], 0.0);
        }
    }
    Ok(h)
}

/// Run `steps` Crank-Nicolson steps and return the final packet.
pub fn evolve(
    psi: &WavePacket,
    f: &FieldSpec,
    potential: Option<&[f64]>,
    c: &PhysicalConstants,
    dt: f64,
    steps: usize,
    scaled: bool,
) -> Result<WavePacket> {
    let stepper = CrankNicolson::new(*psi.grid(), f, potential, c, dt, scaled)?;
    let mut amplitudes = psi.amplitudes().clone();
    for _ in 0..steps {
        stepper.step(&mut amplitudes)?;
    }
    WavePacket::new(*psi.grid(), amplitudes)
}

/// Closed-form free evolution of the Gaussian packet produced by
/// [`WavePacket::gaussian`]: the spreading solution of
/// `i hbar d_t psi = -hbar^2/2m d_zz psi` on the infinite line.
pub fn free_gaussian_at(
    z: f64,
    t: f64,
    center: f64,
    sigma: f64,
    k0: f64,
    c: &PhysicalConstants,
) -> Complex64 {
    let norm = (2.0 * std::f64::consts::PI * sigma * sigma).powf(-0.25);
    let a = Complex64::new(sigma * sigma, c.hbar * t / (2.0 * c.mass));
    let b = Complex64::new(2.0 * sigma * sigma * k0, z - center);
    let exponent = b * b / (4.0 * a) - sigma * sigma * k0 * k0;
    norm * (sigma / a.sqrt()) * exponent.exp()
}
