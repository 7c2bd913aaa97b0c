//! Discrete Fourier conventions and the momentum kernel of the scaling field.
//!
//! Forward transform: `psihat(p_k) = dz sum_j e^(-i p_k z_j / hbar) psi(z_j)`
//! with `p_k = 2 pi hbar k / L`, `k in [-n/2, n/2)`; the inverse carries a
//! `1/L` prefactor. Under these conventions a continuum `(2 pi hbar) delta`
//! becomes `L delta_kk'`, and multiplying by `e^gamma` in position space is
//! exactly the circular convolution `(1/L) sum K[(k-k') mod n] psihat(k')`
//! with the kernel computed here.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::Result;
use crate::field::FieldSpec;
use crate::grid::Grid1D;
use crate::packet::WavePacket;

/// Forward DFT of arbitrary samples on a grid, including the origin phase
/// `e^(-i p_k origin / hbar)` so that bins mean true plane-wave amplitudes.
pub fn dft_forward(samples: &[Complex64], grid: &Grid1D) -> Vec<Complex64> {
    let n = grid.len();
    debug_assert_eq!(samples.len(), n);
    let mut buf = samples.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let dz = grid.dz();
    for (bin, value) in buf.iter_mut().enumerate() {
        *value *= dz * origin_phase(grid, bin, -1.0);
    }
    buf
}

/// Inverse of [`dft_forward`].
pub fn dft_inverse(spectrum: &[Complex64], grid: &Grid1D) -> Vec<Complex64> {
    let n = grid.len();
    debug_assert_eq!(spectrum.len(), n);
    let mut buf: Vec<Complex64> = spectrum
        .iter()
        .enumerate()
        .map(|(bin, v)| v * origin_phase(grid, bin, 1.0))
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / grid.length();
    for v in buf.iter_mut() {
        *v *= scale;
    }
    buf
}

fn origin_phase(grid: &Grid1D, bin: usize, sign: f64) -> Complex64 {
    let angle = sign
        * 2.0
        * std::f64::consts::PI
        * grid.frequency(bin) as f64
        * grid.origin()
        / grid.length();
    Complex64::new(0.0, angle).exp()
}

/// Momentum representation of a packet under the conventions above.
pub fn momentum_representation(psi: &WavePacket) -> Vec<Complex64> {
    dft_forward(psi.amplitudes().as_slice().expect("contiguous"), psi.grid())
}

/// The momentum-space kernel of multiplication by `e^gamma`:
/// `K[m] = dz sum_j e^(-i p_m z_j / hbar) e^(gamma(z_j))`, indexed by the
/// momentum-difference bin `m = (k - k') mod n`. For `gamma = 0` the kernel
/// is exactly `L` at `m = 0` and exactly zero elsewhere.
pub fn momentum_kernel(f: &FieldSpec, grid: &Grid1D) -> Result<Vec<Complex64>> {
    let samples: Vec<Complex64> = (0..grid.len())
        .map(|j| f.gamma_at(grid.z(j)).map(|g| g.exp()))
        .collect::<Result<_>>()?;
    Ok(dft_forward(&samples, grid))
}

/// Circular convolution `(1/L) sum_k' K[(k - k') mod n] spectrum[k']`,
/// evaluated by direct summation. This is the independent route for checking
/// that the kernel reproduces localization in momentum space.
pub fn kernel_convolve(kernel: &[Complex64], spectrum: &[Complex64], grid: &Grid1D) -> Vec<Complex64> {
    let n = grid.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (k, value) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (kp, s) in spectrum.iter().enumerate() {
            let m = (k + n - kp) % n;
            acc += kernel[m] * s;
        }
        *value = acc / grid.length();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Profile;
    use std::f64::consts::PI;

    fn grid(n: usize) -> Grid1D {
        Grid1D::centered(n, 32.0).unwrap()
    }

    fn field() -> FieldSpec {
        FieldSpec::new(
            Profile::Gaussian { amplitude: 0.3, center: 0.0, width: 2.0 },
            Profile::Sine { amplitude: 0.2, wavenumber: 2.0 * PI * 2.0 / 32.0, phase: 0.0 },
        )
    }

    #[test]
    fn round_trip_is_identity() {
        let g = grid(64);
        let psi = WavePacket::gaussian(g, 0.5, 1.2, 0.7).unwrap();
        let spec = momentum_representation(&psi);
        let back = dft_inverse(&spec, &g);
        for (a, b) in back.iter().zip(psi.amplitudes()) {
            assert!((a - b).norm() <= 1e-13);
        }
    }

    #[test]
    fn plane_wave_occupies_one_bin() {
        let g = grid(64);
        let k = g.momentum(3, 1.0);
        let psi = WavePacket::from_fn(g, |z| Complex64::new(0.0, k * z).exp()).unwrap();
        let spec = momentum_representation(&psi);
        assert!((spec[3] - g.length()).norm() <= 1e-10);
        for (bin, v) in spec.iter().enumerate() {
            if bin != 3 {
                assert!(v.norm() <= 1e-10, "bin {bin} leaked {v}");
            }
        }
    }

    #[test]
    fn uniform_field_kernel_is_a_lattice_delta() {
        let g = grid(512);
        let kernel = momentum_kernel(&FieldSpec::uniform(), &g).unwrap();
        assert_eq!(kernel[0], Complex64::new(g.length(), 0.0));
        for v in &kernel[1..] {
            assert_eq!(*v, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn kernel_convolution_matches_position_space_product() {
        let g = grid(512);
        let f = field();
        let psi = WavePacket::gaussian(g, 0.0, 1.2, 0.5).unwrap();

        let localized = crate::packet::localize_packet(&psi, &f, 0.0).unwrap();
        let lhs = momentum_representation(localized.packet());

        let kernel = momentum_kernel(&f, &g).unwrap();
        let spectrum = momentum_representation(&psi);
        let conv = kernel_convolve(&kernel, &spectrum, &g);
        let constant = (-f.gamma_at(0.0).unwrap()).exp();
        let rhs: Vec<Complex64> = conv.iter().map(|v| v * constant).collect();

        let num: f64 = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).norm_sqr()).sum();
        let den: f64 = lhs.iter().map(|a| a.norm_sqr()).sum();
        assert!((num / den).sqrt() <= 1e-10);
    }

    #[test]
    fn weak_field_kernel_deviation_scales_quadratically() {
        let g = grid(256);
        let base = field();
        let linear_residual = |eps: f64| -> f64 {
            let f = base.scaled(eps);
            let kernel = momentum_kernel(&f, &g).unwrap();
            let gamma: Vec<Complex64> = (0..g.len())
                .map(|j| f.gamma_at(g.z(j)).unwrap())
                .collect();
            let gamma_hat = dft_forward(&gamma, &g);
            let mut diff = 0.0f64;
            for (bin, (k, gh)) in kernel.iter().zip(&gamma_hat).enumerate() {
                let first_order = if bin == 0 {
                    Complex64::new(g.length(), 0.0) + gh
                } else {
                    *gh
                };
                diff += (k - first_order).norm_sqr();
            }
            diff.sqrt()
        };
        let s1 = linear_residual(1e-2) / 1e-4;
        let s2 = linear_residual(1e-3) / 1e-6;
        let ratio = if s1 > s2 { s1 / s2 } else { s2 / s1 };
        assert!(ratio <= 2.0, "ratio {ratio}");
    }
}
