//! The complex scalar scaling field `g = e^(alpha + i beta)`.
//!
//! Everything multi-point is computed in exponent space and exponentiated
//! last: connection ratios are `exp(gamma(y) - gamma(x))`, never a division
//! of `g` values, and the two-point field is the exponential of the
//! arithmetic mean of exponents, so the implied square root never meets a
//! branch cut.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid1D;

/// A real scalar profile over the coordinate axis, either closed form with
/// analytic derivatives or samples on a grid (differentiated by periodic
/// central differences).
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Constant { value: f64 },
    Linear { slope: f64, intercept: f64 },
    Gaussian { amplitude: f64, center: f64, width: f64 },
    Sine { amplitude: f64, wavenumber: f64, phase: f64 },
    Samples { grid: Grid1D, values: Vec<f64> },
}

impl Profile {
    pub fn zero() -> Self {
        Profile::Constant { value: 0.0 }
    }

    pub fn samples(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        Ok(Profile::Samples { grid, values })
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Profile::Constant { .. } => true,
            Profile::Gaussian { amplitude, .. } | Profile::Sine { amplitude, .. } => {
                *amplitude == 0.0
            }
            Profile::Linear { slope, .. } => *slope == 0.0,
            Profile::Samples { values, .. } => values.windows(2).all(|w| w[0] == w[1]),
        }
    }

    pub fn eval(&self, z: f64) -> Result<f64> {
        match self {
            Profile::Constant { value } => Ok(*value),
            Profile::Linear { slope, intercept } => Ok(slope * z + intercept),
            Profile::Gaussian { amplitude, center, width } => {
                let u = (z - center) / width;
                Ok(amplitude * (-0.5 * u * u).exp())
            }
            Profile::Sine { amplitude, wavenumber, phase } => {
                Ok(amplitude * (wavenumber * z + phase).sin())
            }
            Profile::Samples { grid, values } => Ok(values[grid.index_of(z)?]),
        }
    }

    /// First derivative: analytic for closed forms, periodic central
    /// difference for samples.
    pub fn deriv(&self, z: f64) -> Result<f64> {
        match self {
            Profile::Constant { .. } => Ok(0.0),
            Profile::Linear { slope, .. } => Ok(*slope),
            Profile::Gaussian { amplitude, center, width } => {
                let u = (z - center) / width;
                Ok(-amplitude * u / width * (-0.5 * u * u).exp())
            }
            Profile::Sine { amplitude, wavenumber, phase } => {
                Ok(amplitude * wavenumber * (wavenumber * z + phase).cos())
            }
            Profile::Samples { grid, values } => {
                let j = grid.index_of(z)?;
                let n = grid.len();
                let next = values[(j + 1) % n];
                let prev = values[(j + n - 1) % n];
                Ok((next - prev) / (2.0 * grid.dz()))
            }
        }
    }

    /// Second derivative, same conventions as [`Profile::deriv`].
    pub fn deriv2(&self, z: f64) -> Result<f64> {
        match self {
            Profile::Constant { .. } | Profile::Linear { .. } => Ok(0.0),
            Profile::Gaussian { amplitude, center, width } => {
                let u = (z - center) / width;
                let w2 = width * width;
                Ok(amplitude * (u * u - 1.0) / w2 * (-0.5 * u * u).exp())
            }
            Profile::Sine { amplitude, wavenumber, phase } => {
                Ok(-amplitude * wavenumber * wavenumber * (wavenumber * z + phase).sin())
            }
            Profile::Samples { grid, values } => {
                let j = grid.index_of(z)?;
                let n = grid.len();
                let next = values[(j + 1) % n];
                let prev = values[(j + n - 1) % n];
                let here = values[j];
                Ok((next - 2.0 * here + prev) / (grid.dz() * grid.dz()))
            }
        }
    }

    /// The same shape with all values multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Profile {
        match self {
            Profile::Constant { value } => Profile::Constant { value: value * factor },
            Profile::Linear { slope, intercept } => Profile::Linear {
                slope: slope * factor,
                intercept: intercept * factor,
            },
            Profile::Gaussian { amplitude, center, width } => Profile::Gaussian {
                amplitude: amplitude * factor,
                center: *center,
                width: *width,
            },
            Profile::Sine { amplitude, wavenumber, phase } => Profile::Sine {
                amplitude: amplitude * factor,
                wavenumber: *wavenumber,
                phase: *phase,
            },
            Profile::Samples { grid, values } => Profile::Samples {
                grid: *grid,
                values: values.iter().map(|v| v * factor).collect(),
            },
        }
    }

    fn sample_grid(&self) -> Option<&Grid1D> {
        match self {
            Profile::Samples { grid, .. } => Some(grid),
            _ => None,
        }
    }
}

/// The gradient of the exponent, `Gamma = grad gamma = A + iB`, sampled on a
/// grid. `A` and `B` are the gradients of `alpha` and `beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionGradient {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl ConnectionGradient {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn at(&self, j: usize) -> Complex64 {
        Complex64::new(self.a[j], self.b[j])
    }
}

/// The scaling field given by its exponent `gamma = alpha + i beta`. A chart
/// reference records which fiber the field was lifted into; charts are the
/// identity on the common grid, so lifting never changes samples.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSpec {
    alpha: Profile,
    beta: Profile,
    chart_reference: Option<f64>,
}

impl FieldSpec {
    pub fn new(alpha: Profile, beta: Profile) -> Self {
        Self { alpha, beta, chart_reference: None }
    }

    /// `g = 1` everywhere.
    pub fn uniform() -> Self {
        Self::new(Profile::zero(), Profile::zero())
    }

    pub fn alpha(&self) -> &Profile {
        &self.alpha
    }

    pub fn beta(&self) -> &Profile {
        &self.beta
    }

    pub fn chart_reference(&self) -> Option<f64> {
        self.chart_reference
    }

    /// True when `g` is the same number everywhere, i.e. scaling has no
    /// observable effect on localized quantities.
    pub fn is_constant(&self) -> bool {
        self.alpha.is_constant() && self.beta.is_constant()
    }

    /// The exponent `gamma(z) = alpha(z) + i beta(z)`.
    pub fn gamma_at(&self, z: f64) -> Result<Complex64> {
        Ok(Complex64::new(self.alpha.eval(z)?, self.beta.eval(z)?))
    }

    /// `g(z) = e^gamma(z)`; never zero.
    pub fn g_at(&self, z: f64) -> Result<Complex64> {
        Ok(self.gamma_at(z)?.exp())
    }

    pub fn dgamma_at(&self, z: f64) -> Result<Complex64> {
        Ok(Complex64::new(self.alpha.deriv(z)?, self.beta.deriv(z)?))
    }

    pub fn d2gamma_at(&self, z: f64) -> Result<Complex64> {
        Ok(Complex64::new(self.alpha.deriv2(z)?, self.beta.deriv2(z)?))
    }

    /// Transport factor from the fiber at `y` to the fiber at `x`:
    /// `g(y)/g(x) = e^(gamma(y) - gamma(x))`, evaluated in exponent space.
    pub fn connection_ratio(&self, x: f64, y: f64) -> Result<Complex64> {
        Ok((self.gamma_at(y)? - self.gamma_at(x)?).exp())
    }

    /// `Gamma = grad gamma` on every node of `grid`.
    pub fn gradient_gamma(&self, grid: &Grid1D) -> Result<ConnectionGradient> {
        if grid.len() < 3 {
            return Err(Error::GridTooSmall { n: grid.len(), min: 3 });
        }
        for p in [&self.alpha, &self.beta] {
            if let Some(g) = p.sample_grid() {
                if g != grid {
                    return Err(Error::GridMismatch);
                }
            }
        }
        let mut a = Vec::with_capacity(grid.len());
        let mut b = Vec::with_capacity(grid.len());
        for j in 0..grid.len() {
            let z = grid.z(j);
            a.push(self.alpha.deriv(z)?);
            b.push(self.beta.deriv(z)?);
        }
        Ok(ConnectionGradient { a, b })
    }

    /// Two-point exponent: the arithmetic mean `(gamma(x) + gamma(y)) / 2`,
    /// whose exponential is the geometric mean of `g(x)` and `g(y)`.
    pub fn pair_gamma(&self, x: f64, y: f64) -> Result<Complex64> {
        Ok((self.gamma_at(x)? + self.gamma_at(y)?) / 2.0)
    }

    /// n-point exponent: the mean of `gamma` over the points. Its exponential
    /// is the n-fold geometric mean of the field values. The addends are
    /// summed in value-sorted order, so permuting the points returns a
    /// bit-identical result.
    pub fn n_point_gamma(&self, points: &[f64]) -> Result<Complex64> {
        if points.is_empty() {
            return Err(Error::EmptyPointList);
        }
        let mut terms: Vec<Complex64> = points
            .iter()
            .map(|&z| self.gamma_at(z))
            .collect::<Result<_>>()?;
        terms.sort_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
        });
        let mut sum = Complex64::new(0.0, 0.0);
        for t in terms {
            sum += t;
        }
        Ok(sum / points.len() as f64)
    }

    /// Lift the field into the chart of the fiber at `reference`. Charts are
    /// identity maps, so only the reference tag changes.
    pub fn lift_to_chart(&self, reference: f64) -> FieldSpec {
        FieldSpec {
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
            chart_reference: Some(reference),
        }
    }

    /// Both profiles scaled by `factor` (the chart tag is dropped).
    pub fn scaled(&self, factor: f64) -> FieldSpec {
        FieldSpec::new(self.alpha.scaled(factor), self.beta.scaled(factor))
    }
}
