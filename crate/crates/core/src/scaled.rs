//! Scaled complex-number structures, value maps, and relative structures.
//!
//! A scaling factor `t` labels a copy of the complex field whose elements all
//! carry values `t`-times larger when read from a structure at level `s`:
//! `v_s(a_t) = (t/s) a`. The relative structure `C^t_s` re-expresses the
//! `t`-level components inside the `s`-level one, with multiplication
//! `(s/t) x y`, unit `(t/s) 1`, and conjugation `x -> (t/s) conj((s/t) x)`.
//! Scaling is linear, so every field axiom survives; the axiom suite checks
//! this over random tuples, exactly in the rational backend.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::ExactComplex;

/// Scalar backends usable in the scaled structures: exact complex rationals
/// or IEEE doubles. Mixing backends is a compile error.
pub trait ComplexScalar:
    Clone
    + PartialEq
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn conj(&self) -> Self;
    fn is_zero(&self) -> bool;
}

impl ComplexScalar for ExactComplex {
    fn zero() -> Self {
        ExactComplex::zero()
    }
    fn one() -> Self {
        ExactComplex::one()
    }
    fn conj(&self) -> Self {
        ExactComplex::conj(self)
    }
    fn is_zero(&self) -> bool {
        ExactComplex::is_zero(self)
    }
}

impl ComplexScalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn conj(&self) -> Self {
        num_complex::Complex::<f64>::conj(self)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
}

/// A nonzero scaling level. Zero is rejected because levels are divided by.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFactor<T: ComplexScalar>(T);

impl<T: ComplexScalar> ScalingFactor<T> {
    pub fn new(value: T) -> Result<Self> {
        if value.is_zero() {
            return Err(Error::ZeroScalingFactor);
        }
        Ok(Self(value))
    }

    pub fn unit() -> Self {
        Self(T::one())
    }

    pub fn value(&self) -> &T {
        &self.0
    }

    /// Group composition of level shifts.
    pub fn compose(&self, other: &Self) -> Self {
        Self(self.0.clone() * other.0.clone())
    }
}

/// A number together with the level of the structure it lives in. The stored
/// value is the number's own-structure value, `v_t(a_t) = a`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledNumber<T: ComplexScalar> {
    value: T,
    level: ScalingFactor<T>,
}

impl<T: ComplexScalar> ScaledNumber<T> {
    pub fn new(value: T, level: ScalingFactor<T>) -> Self {
        Self { value, level }
    }

    /// The value map of the number's own structure.
    pub fn value_of(&self) -> T {
        self.value.clone()
    }

    pub fn level(&self) -> &ScalingFactor<T> {
        &self.level
    }

    /// Value as seen from level `s`: `v_s(a_t) = (t/s) a`.
    pub fn relative_value(&self, s: &ScalingFactor<T>) -> T {
        let ratio = self.level.0.clone() / s.0.clone();
        ratio * self.value.clone()
    }

    /// Representation of this number inside the `s`-level structure. The map
    /// is the identity on the underlying base set, so numerically this equals
    /// [`Self::relative_value`].
    pub fn project_zts(&self, s: &ScalingFactor<T>) -> T {
        self.relative_value(s)
    }

    /// Structure-group action: same value, level multiplied by `d`. Acts
    /// freely and transitively on levels.
    pub fn level_shift(&self, d: &ScalingFactor<T>) -> ScaledNumber<T> {
        ScaledNumber {
            value: self.value.clone(),
            level: d.compose(&self.level),
        }
    }
}

/// The relative structure `C^t_s`: components of the `t`-level structure
/// expressed inside the `s`-level one.
#[derive(Debug, Clone, PartialEq)]
pub struct RelativeStructure<T: ComplexScalar> {
    upper: ScalingFactor<T>,
    lower: ScalingFactor<T>,
}

impl<T: ComplexScalar> RelativeStructure<T> {
    pub fn new(upper: ScalingFactor<T>, lower: ScalingFactor<T>) -> Self {
        Self { upper, lower }
    }

    pub fn upper(&self) -> &ScalingFactor<T> {
        &self.upper
    }

    pub fn lower(&self) -> &ScalingFactor<T> {
        &self.lower
    }

    /// `t/s`.
    pub fn ratio(&self) -> T {
        self.upper.0.clone() / self.lower.0.clone()
    }

    /// `s/t`, computed directly rather than as `1/ratio`.
    pub fn inverse_ratio(&self) -> T {
        self.lower.0.clone() / self.upper.0.clone()
    }

    /// The multiplicative identity `(t/s) 1` of the relative structure.
    pub fn rel_one(&self) -> T {
        self.ratio()
    }

    /// Scaled multiplication `(s/t) x y`.
    pub fn rel_mul(&self, x: &T, y: &T) -> T {
        self.inverse_ratio() * x.clone() * y.clone()
    }

    /// Scaled conjugation `(t/s) conj((s/t) x)`. The prefactor itself is not
    /// conjugated; this is the unique choice that makes conjugation an
    /// involution compatible with `rel_mul`.
    pub fn rel_conj(&self, x: &T) -> T {
        self.ratio() * (self.inverse_ratio() * x.clone()).conj()
    }

    /// The embedding `a -> (t/s) a` of plain values into the relative
    /// structure; a ring-with-involution isomorphism.
    pub fn embed(&self, a: &T) -> T {
        self.ratio() * a.clone()
    }

    pub fn embed_vector(&self, f: &ScaledVector<T>) -> ScaledVector<T> {
        ScaledVector {
            components: f.components.iter().map(|c| self.embed(c)).collect(),
            level: f.level.clone(),
        }
    }

    /// Scaled scalar-times-vector, componentwise `(s/t) a f_i`.
    pub fn scaled_scalar_mul(&self, a: &T, f: &ScaledVector<T>) -> Result<ScaledVector<T>> {
        if f.level != self.upper {
            return Err(Error::LevelMismatch);
        }
        let components = f
            .components
            .iter()
            .map(|c| self.rel_mul(a, c))
            .collect();
        Ok(ScaledVector { components, level: f.level.clone() })
    }

    /// Scaled inner product `(t/s) <f, g>` with `<f, g> = sum conj(f_i) g_i`.
    pub fn scaled_inner(&self, f: &ScaledVector<T>, g: &ScaledVector<T>) -> Result<T> {
        if f.level != self.upper || g.level != self.upper {
            return Err(Error::LevelMismatch);
        }
        if f.components.len() != g.components.len() {
            return Err(Error::DimensionMismatch {
                expected: f.components.len(),
                actual: g.components.len(),
            });
        }
        let mut acc = T::zero();
        for (a, b) in f.components.iter().zip(&g.components) {
            acc = acc + a.conj() * b.clone();
        }
        Ok(self.ratio() * acc)
    }
}

/// A vector with components in one backend, tagged with its level.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledVector<T: ComplexScalar> {
    components: Vec<T>,
    level: ScalingFactor<T>,
}

impl<T: ComplexScalar> ScaledVector<T> {
    pub fn new(components: Vec<T>, level: ScalingFactor<T>) -> Self {
        Self { components, level }
    }

    pub fn components(&self) -> &[T] {
        &self.components
    }

    pub fn level(&self) -> &ScalingFactor<T> {
        &self.level
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Axiom suites
// ---------------------------------------------------------------------------

/// One checked law.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomCheck {
    pub name: &'static str,
    pub samples: usize,
    pub failures: usize,
}

impl AxiomCheck {
    pub fn pass(&self) -> bool {
        self.failures == 0
    }
}

/// Pass/fail report for a batch of law checks.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(AxiomCheck::pass)
    }

    pub fn failed(&self) -> Vec<&AxiomCheck> {
        self.checks.iter().filter(|c| !c.pass()).collect()
    }
}

trait LawScalar: ComplexScalar {
    /// Equality up to `tol`; exact backends ignore `tol`.
    fn law_eq(a: &Self, b: &Self, tol: f64) -> bool;
    fn sample(rng: &mut ChaCha8Rng) -> Self;
    fn sample_nonzero(rng: &mut ChaCha8Rng) -> Self;
}

impl LawScalar for ExactComplex {
    fn law_eq(a: &Self, b: &Self, _tol: f64) -> bool {
        a == b
    }

    fn sample(rng: &mut ChaCha8Rng) -> Self {
        let part = |rng: &mut ChaCha8Rng| {
            BigRational::new(
                BigInt::from(rng.gen_range(-9i64..=9)),
                BigInt::from(rng.gen_range(1i64..=9)),
            )
        };
        ExactComplex::new(part(rng), part(rng))
    }

    fn sample_nonzero(rng: &mut ChaCha8Rng) -> Self {
        loop {
            let v = Self::sample(rng);
            if !v.is_zero() {
                return v;
            }
        }
    }
}

impl LawScalar for Complex64 {
    fn law_eq(a: &Self, b: &Self, tol: f64) -> bool {
        let scale = f64::max(1.0, b.norm());
        (a - b).norm() <= tol * scale
    }

    fn sample(rng: &mut ChaCha8Rng) -> Self {
        Complex64::new(rng.gen_range(-2.0..=2.0), rng.gen_range(-2.0..=2.0))
    }

    fn sample_nonzero(rng: &mut ChaCha8Rng) -> Self {
        // Keep levels well conditioned so float identities stay near 1 ulp.
        loop {
            let v = Self::sample(rng);
            if v.norm() >= 0.5 {
                return v;
            }
        }
    }
}

fn run_check<T, F>(name: &'static str, samples: usize, rng: &mut ChaCha8Rng, mut prop: F) -> AxiomCheck
where
    T: LawScalar,
    F: FnMut(&mut ChaCha8Rng) -> bool,
{
    let mut failures = 0;
    for _ in 0..samples {
        if !prop(rng) {
            failures += 1;
        }
    }
    AxiomCheck { name, samples, failures }
}

fn axiom_suite_impl<T: LawScalar>(
    r: &RelativeStructure<T>,
    samples: usize,
    seed: u64,
    tol: f64,
) -> AxiomReport {
    let rng = &mut ChaCha8Rng::seed_from_u64(seed);
    let eq = |a: &T, b: &T| T::law_eq(a, b, tol);
    let mut checks = Vec::new();

    checks.push(run_check::<T, _>("add_commutative", samples, rng, |rng| {
        let (x, y) = (T::sample(rng), T::sample(rng));
        eq(&(x.clone() + y.clone()), &(y + x))
    }));
    checks.push(run_check::<T, _>("add_associative", samples, rng, |rng| {
        let (x, y, z) = (T::sample(rng), T::sample(rng), T::sample(rng));
        eq(&((x.clone() + y.clone()) + z.clone()), &(x + (y + z)))
    }));
    checks.push(run_check::<T, _>("rel_mul_commutative", samples, rng, |rng| {
        let (x, y) = (T::sample(rng), T::sample(rng));
        eq(&r.rel_mul(&x, &y), &r.rel_mul(&y, &x))
    }));
    checks.push(run_check::<T, _>("rel_mul_associative", samples, rng, |rng| {
        let (x, y, z) = (T::sample(rng), T::sample(rng), T::sample(rng));
        eq(&r.rel_mul(&r.rel_mul(&x, &y), &z), &r.rel_mul(&x, &r.rel_mul(&y, &z)))
    }));
    checks.push(run_check::<T, _>("distributive", samples, rng, |rng| {
        let (x, y, z) = (T::sample(rng), T::sample(rng), T::sample(rng));
        let lhs = r.rel_mul(&x, &(y.clone() + z.clone()));
        let rhs = r.rel_mul(&x, &y) + r.rel_mul(&x, &z);
        eq(&lhs, &rhs)
    }));
    checks.push(run_check::<T, _>("rel_one_identity", samples, rng, |rng| {
        let x = T::sample(rng);
        eq(&r.rel_mul(&r.rel_one(), &x), &x)
    }));
    checks.push(run_check::<T, _>("rel_conj_involution", samples, rng, |rng| {
        let x = T::sample(rng);
        eq(&r.rel_conj(&r.rel_conj(&x)), &x)
    }));
    checks.push(run_check::<T, _>("rel_conj_multiplicative", samples, rng, |rng| {
        let (x, y) = (T::sample(rng), T::sample(rng));
        let lhs = r.rel_conj(&r.rel_mul(&x, &y));
        let rhs = r.rel_mul(&r.rel_conj(&x), &r.rel_conj(&y));
        eq(&lhs, &rhs)
    }));
    checks.push(run_check::<T, _>("embed_additive", samples, rng, |rng| {
        let (a, b) = (T::sample(rng), T::sample(rng));
        eq(&r.embed(&(a.clone() + b.clone())), &(r.embed(&a) + r.embed(&b)))
    }));
    checks.push(run_check::<T, _>("embed_multiplicative", samples, rng, |rng| {
        let (a, b) = (T::sample(rng), T::sample(rng));
        let lhs = r.embed(&(a.clone() * b.clone()));
        let rhs = r.rel_mul(&r.embed(&a), &r.embed(&b));
        eq(&lhs, &rhs)
    }));
    checks.push(run_check::<T, _>("embed_conjugative", samples, rng, |rng| {
        let a = T::sample(rng);
        eq(&r.embed(&a.conj()), &r.rel_conj(&r.embed(&a)))
    }));

    AxiomReport { checks }
}

/// Check the field-with-conjugation laws of a fixed relative structure over
/// random exact-rational tuples. Every law must hold with exact equality.
pub fn axiom_suite_exact(
    r: &RelativeStructure<ExactComplex>,
    samples: usize,
    seed: u64,
) -> AxiomReport {
    axiom_suite_impl(r, samples, seed, 0.0)
}

/// Float-backend variant of [`axiom_suite_exact`] with a relative tolerance.
pub fn axiom_suite_float(
    r: &RelativeStructure<Complex64>,
    samples: usize,
    seed: u64,
    tol: f64,
) -> AxiomReport {
    axiom_suite_impl(r, samples, seed, tol)
}

fn law_sweep_impl<T: LawScalar>(tuples: usize, seed: u64, tol: f64) -> AxiomReport {
    let rng = &mut ChaCha8Rng::seed_from_u64(seed);
    let eq = |a: &T, b: &T| T::law_eq(a, b, tol);
    let mut checks = Vec::new();

    checks.push(run_check::<T, _>("relative_value_law", tuples, rng, |rng| {
        let t = ScalingFactor::new(T::sample_nonzero(rng)).unwrap();
        let s = ScalingFactor::new(T::sample_nonzero(rng)).unwrap();
        let a = T::sample(rng);
        let n = ScaledNumber::new(a.clone(), t.clone());
        let expect = t.value().clone() / s.value().clone() * a.clone();
        eq(&n.relative_value(&s), &expect) && eq(&n.relative_value(&t), &a)
    }));
    checks.push(run_check::<T, _>("rel_one_identity", tuples, rng, |rng| {
        let r = random_structure(rng);
        let x = T::sample(rng);
        eq(&r.rel_mul(&r.rel_one(), &x), &x)
    }));
    checks.push(run_check::<T, _>("rel_conj_involution", tuples, rng, |rng| {
        let r = random_structure(rng);
        let x = T::sample(rng);
        eq(&r.rel_conj(&r.rel_conj(&x)), &x)
    }));
    checks.push(run_check::<T, _>("embed_additive", tuples, rng, |rng| {
        let r = random_structure(rng);
        let (a, b) = (T::sample(rng), T::sample(rng));
        eq(&r.embed(&(a.clone() + b.clone())), &(r.embed(&a) + r.embed(&b)))
    }));
    checks.push(run_check::<T, _>("embed_multiplicative", tuples, rng, |rng| {
        let r = random_structure(rng);
        let (a, b) = (T::sample(rng), T::sample(rng));
        eq(
            &r.embed(&(a.clone() * b.clone())),
            &r.rel_mul(&r.embed(&a), &r.embed(&b)),
        )
    }));
    checks.push(run_check::<T, _>("embed_conjugative", tuples, rng, |rng| {
        let r = random_structure(rng);
        let a = T::sample(rng);
        eq(&r.embed(&a.conj()), &r.rel_conj(&r.embed(&a)))
    }));
    checks.push(run_check::<T, _>("z_composition", tuples, rng, |rng| {
        let u = ScalingFactor::new(T::sample_nonzero(rng)).unwrap();
        let t = ScalingFactor::new(T::sample_nonzero(rng)).unwrap();
        let s = ScalingFactor::new(T::sample_nonzero(rng)).unwrap();
        let a = ScaledNumber::new(T::sample(rng), u.clone());
        let via_t = ScaledNumber::new(a.project_zts(&t), t.clone());
        eq(&via_t.project_zts(&s), &a.project_zts(&s))
    }));
    checks.push(run_check::<T, _>("level_shift_group", tuples, rng, |rng| {
        let t = ScalingFactor::new(T::sample_nonzero(rng)).unwrap();
        let d = ScalingFactor::new(T::sample_nonzero(rng)).unwrap();
        let d2 = ScalingFactor::new(T::sample_nonzero(rng)).unwrap();
        let a = ScaledNumber::new(T::sample(rng), t);
        let stepwise = a.level_shift(&d).level_shift(&d2);
        let combined = a.level_shift(&d.compose(&d2));
        let unit = a.level_shift(&ScalingFactor::unit());
        eq(stepwise.level().value(), combined.level().value())
            && eq(&stepwise.value_of(), &combined.value_of())
            && unit == a
    }));
    checks.push(run_check::<T, _>("zero_fixed_point", tuples, rng, |rng| {
        let t = ScalingFactor::new(T::sample_nonzero(rng)).unwrap();
        let s = ScalingFactor::new(T::sample_nonzero(rng)).unwrap();
        let zero = ScaledNumber::new(T::zero(), t);
        zero.relative_value(&s).is_zero()
    }));

    AxiomReport { checks }
}

fn random_structure<T: LawScalar>(rng: &mut ChaCha8Rng) -> RelativeStructure<T> {
    let t = ScalingFactor::new(T::sample_nonzero(rng)).unwrap();
    let s = ScalingFactor::new(T::sample_nonzero(rng)).unwrap();
    RelativeStructure::new(t, s)
}

/// Sweep the scaling laws over fresh random exact-rational (t, s, a, b)
/// tuples: the relative-value law, the embed isomorphism, the relative unit
/// and conjugation laws, and composition of level projections and shifts.
pub fn law_sweep_exact(tuples: usize, seed: u64) -> AxiomReport {
    law_sweep_impl::<ExactComplex>(tuples, seed, 0.0)
}

/// Float-backend law sweep with a relative tolerance.
pub fn law_sweep_float(tuples: usize, seed: u64, tol: f64) -> AxiomReport {
    law_sweep_impl::<Complex64>(tuples, seed, tol)
}
