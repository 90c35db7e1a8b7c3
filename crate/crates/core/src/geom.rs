//! Ambient geometry of `S^{2n+1} ⊂ C^{n+1}`.
//!
//! The metric is `g(a, b) = Re⟨a, b⟩`, the contact form is
//! `α_z = ½ Re⟨i z, ·⟩`, its Reeb field is `R_z = 2 i z` and the Lorentz force
//! of `dα` is `Y_z u = i u + Re⟨i z, u⟩ z`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Tolerance used when a value is constructed and its invariants are checked.
pub const CONSTRUCTION_TOL: f64 = 1e-12;
/// Drift accepted by operations on points and tangent vectors.
pub const OPERATION_TOL: f64 = 1e-10;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// A vector in `C^{n+1}` with finite entries.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexVector(Vec<C64>);

impl fmt::Debug for ComplexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl ComplexVector {
    pub fn new(components: Vec<C64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Domain("empty vector".into()));
        }
        if components.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Domain("non-finite component".into()));
        }
        Ok(Self(components))
    }

    /// Builds a vector from interleaved `re, im` pairs.
    pub fn from_re_im(parts: &[f64]) -> Result<Self> {
        if !parts.len().is_multiple_of(2) || parts.is_empty() {
            return Err(Error::Domain(format!(
                "expected an even, nonzero number of re/im entries, got {}",
                parts.len()
            )));
        }
        Self::new(parts.chunks(2).map(|p| C64::new(p[0], p[1])).collect())
    }

    pub(crate) fn from_vec(components: Vec<C64>) -> Self {
        Self(components)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![C64::new(0.0, 0.0); len])
    }

    /// The `k`-th standard basis vector of `C^len`.
    pub fn basis(len: usize, k: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0[k] = C64::new(1.0, 0.0);
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Complex dimension minus one, i.e. the `n` of `S^{2n+1}`.
    pub fn sphere_index(&self) -> usize {
        self.0.len() - 1
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &C64> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<C64> {
        self.0
    }

    /// `⟨self, other⟩ = Σ self_j · conj(other_j)`. Lengths must agree.
    pub(crate) fn herm(&self, other: &Self) -> C64 {
        debug_assert_eq!(self.len(), other.len());
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    /// `g(self, other) = Re⟨self, other⟩`.
    pub(crate) fn dot(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self(self.0.iter().map(|x| x * c).collect())
    }

    pub fn scale_real(&self, c: f64) -> Self {
        Self(self.0.iter().map(|x| x * c).collect())
    }

    /// Multiplication by the complex structure `i`.
    pub fn mul_i(&self) -> Self {
        self.scale(I)
    }

    pub fn conj(&self) -> Self {
        Self(self.0.iter().map(|x| x.conj()).collect())
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Domain("cannot normalise a zero vector".into()));
        }
        Ok(self.scale_real(1.0 / n))
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// `self + c · other`.
    pub(crate) fn axpy(&self, c: C64, other: &Self) -> Self {
        Self(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + c * b)
                .collect(),
        )
    }

    /// Real components `(Re z_0, …, Re z_n, Im z_0, …, Im z_n)`.
    pub fn to_real(&self) -> Vec<f64> {
        self.0
            .iter()
            .map(|c| c.re)
            .chain(self.0.iter().map(|c| c.im))
            .collect()
    }

    /// Inverse of [`ComplexVector::to_real`].
    pub fn from_real(x: &[f64]) -> Result<Self> {
        if !x.len().is_multiple_of(2) || x.is_empty() {
            return Err(Error::Domain("real vector must have even length".into()));
        }
        let h = x.len() / 2;
        Self::new((0..h).map(|j| C64::new(x[j], x[h + j])).collect())
    }
}

impl std::ops::Index<usize> for ComplexVector {
    type Output = C64;
    fn index(&self, k: usize) -> &C64 {
        &self.0[k]
    }
}

impl Add for &ComplexVector {
    type Output = ComplexVector;
    fn add(self, rhs: &ComplexVector) -> ComplexVector {
        ComplexVector(self.0.iter().zip(rhs.0.iter()).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &ComplexVector {
    type Output = ComplexVector;
    fn sub(self, rhs: &ComplexVector) -> ComplexVector {
        ComplexVector(self.0.iter().zip(rhs.0.iter()).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &ComplexVector {
    type Output = ComplexVector;
    fn neg(self) -> ComplexVector {
        ComplexVector(self.0.iter().map(|a| -a).collect())
    }
}

impl Mul<C64> for &ComplexVector {
    type Output = ComplexVector;
    fn mul(self, rhs: C64) -> ComplexVector {
        self.scale(rhs)
    }
}

impl Mul<f64> for &ComplexVector {
    type Output = ComplexVector;
    fn mul(self, rhs: f64) -> ComplexVector {
        self.scale_real(rhs)
    }
}

fn check_len(a: &ComplexVector, b: &ComplexVector) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(())
}

/// Standard Hermitian product `Σ a_j · conj(b_j)`.
pub fn hermitian(a: &ComplexVector, b: &ComplexVector) -> Result<C64> {
    check_len(a, b)?;
    Ok(a.herm(b))
}

/// The Riemannian metric `g(a, b) = Re⟨a, b⟩`.
pub fn metric(a: &ComplexVector, b: &ComplexVector) -> Result<f64> {
    check_len(a, b)?;
    Ok(a.dot(b))
}

pub(crate) fn check_on_sphere(z: &ComplexVector, tol: f64) -> Result<()> {
    let r = z.norm();
    if (r - 1.0).abs() > tol {
        return Err(Error::InvalidState(format!(
            "point is off the unit sphere: |z| - 1 = {:e}",
            r - 1.0
        )));
    }
    Ok(())
}

pub(crate) fn check_tangent(z: &ComplexVector, u: &ComplexVector, tol: f64) -> Result<()> {
    check_len(z, u)?;
    let t = z.dot(u);
    if t.abs() > tol * u.norm().max(1.0) {
        return Err(Error::InvalidState(format!(
            "vector is not tangent: Re<z, u> = {t:e}"
        )));
    }
    Ok(())
}

/// Orthogonal projection `P_z v = v − Re⟨z, v⟩ z` onto `T_z S`.
pub fn project_tangent(z: &ComplexVector, v: &ComplexVector) -> ComplexVector {
    let c = z.dot(v);
    v.axpy(C64::new(-c, 0.0), z)
}

/// `α_z(u) = ½ Re⟨i z, u⟩`.
pub fn contact_form(z: &ComplexVector, u: &ComplexVector) -> Result<f64> {
    check_on_sphere(z, OPERATION_TOL)?;
    check_tangent(z, u, OPERATION_TOL)?;
    Ok(0.5 * z.mul_i().dot(u))
}

/// Reeb vector field `R_z = 2 i z`.
pub fn reeb(z: &ComplexVector) -> Result<ComplexVector> {
    check_on_sphere(z, OPERATION_TOL)?;
    Ok(z.scale(C64::new(0.0, 2.0)))
}

/// `dα_z(u, w) = Re⟨i u, w⟩` for tangent vectors at any point.
pub fn dalpha(u: &ComplexVector, w: &ComplexVector) -> Result<f64> {
    check_len(u, w)?;
    Ok(u.mul_i().dot(w))
}

pub(crate) fn lorentz_unchecked(z: &ComplexVector, u: &ComplexVector) -> ComplexVector {
    let c = z.mul_i().dot(u);
    u.mul_i().axpy(C64::new(c, 0.0), z)
}

/// Lorentz force of `dα`: `Y_z u = i u + Re⟨i z, u⟩ z`.
pub fn lorentz(z: &ComplexVector, u: &ComplexVector) -> Result<ComplexVector> {
    check_on_sphere(z, OPERATION_TOL)?;
    check_tangent(z, u, OPERATION_TOL)?;
    Ok(lorentz_unchecked(z, u))
}

pub(crate) fn contact_angle_unchecked(z: &ComplexVector, v: &ComplexVector) -> f64 {
    z.mul_i().dot(v).clamp(-1.0, 1.0).acos()
}

/// Angle in `[0, π]` between a unit tangent vector and `i z`.
pub fn contact_angle(z: &ComplexVector, v: &ComplexVector) -> Result<f64> {
    check_on_sphere(z, OPERATION_TOL)?;
    check_tangent(z, v, OPERATION_TOL)?;
    if (v.norm() - 1.0).abs() > OPERATION_TOL {
        return Err(Error::InvalidState("velocity is not a unit vector".into()));
    }
    Ok(contact_angle_unchecked(z, v))
}

/// A point of `S^{2n+1}` together with a unit tangent vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitTangentState {
    z: ComplexVector,
    v: ComplexVector,
    psi: f64,
}

impl UnitTangentState {
    /// Validates `|z| = |v| = 1` and `Re⟨z, v⟩ = 0` to `1e−12`.
    pub fn new(z: ComplexVector, v: ComplexVector) -> Result<Self> {
        Self::with_tolerance(z, v, CONSTRUCTION_TOL)
    }

    pub fn with_tolerance(z: ComplexVector, v: ComplexVector, tol: f64) -> Result<Self> {
        check_len(&z, &v)?;
        if z.len() < 2 {
            return Err(Error::Domain("ambient dimension must be at least 2".into()));
        }
        check_on_sphere(&z, tol)?;
        if (v.norm() - 1.0).abs() > tol {
            return Err(Error::InvalidState(format!(
                "velocity is not a unit vector: |v| - 1 = {:e}",
                v.norm() - 1.0
            )));
        }
        check_tangent(&z, &v, tol)?;
        let psi = contact_angle_unchecked(&z, &v);
        Ok(Self { z, v, psi })
    }

    /// Re-projects a slightly drifted pair onto the unit tangent bundle.
    pub fn renormalized(z: &ComplexVector, v: &ComplexVector) -> Result<Self> {
        check_len(z, v)?;
        let z = z.normalized()?;
        let v = project_tangent(&z, v).normalized()?;
        Self::new(z, v)
    }

    /// Canonical state realising the contact angle `psi` in `C^{n+1}`:
    /// `z = e₁`, `v = cos ψ · i e₁ + sin ψ · e₂`.
    pub fn canonical(n: usize, psi: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::Domain("n must be at least 1".into()));
        }
        if !(0.0..=std::f64::consts::PI).contains(&psi) {
            return Err(Error::Domain(format!("psi = {psi} outside [0, pi]")));
        }
        let z = ComplexVector::basis(n + 1, 0);
        let mut v = ComplexVector::zeros(n + 1);
        v.0[0] = C64::new(0.0, psi.cos());
        v.0[1] = C64::new(psi.sin(), 0.0);
        let mut state = Self::new(z, v)?;
        state.psi = psi;
        Ok(state)
    }

    pub fn position(&self) -> &ComplexVector {
        &self.z
    }

    pub fn velocity(&self) -> &ComplexVector {
        &self.v
    }

    /// Cached contact angle.
    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn cos_psi(&self) -> f64 {
        self.z.mul_i().dot(&self.v)
    }

    /// `n` of `S^{2n+1}`.
    pub fn n(&self) -> usize {
        self.z.len() - 1
    }

    pub fn into_parts(self) -> (ComplexVector, ComplexVector) {
        (self.z, self.v)
    }
}

/// Kinetic energy `k` and strength `s`, related by `k = 1/(2 s²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyStrength {
    pub k: f64,
    pub s: f64,
}

impl EnergyStrength {
    pub fn from_energy(k: f64) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::Domain(format!("energy must be positive, got {k}")));
        }
        Ok(Self {
            k,
            s: 1.0 / (2.0 * k).sqrt(),
        })
    }

    pub fn from_strength(s: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::Domain(format!("strength must be positive, got {s}")));
        }
        Ok(Self {
            k: 1.0 / (2.0 * s * s),
            s,
        })
    }
}

/// Energy of unit-speed geodesics at strength `s`; `s = 0` maps to `+∞`.
pub fn energy_of_strength(s: f64) -> f64 {
    if s == 0.0 {
        f64::INFINITY
    } else {
        1.0 / (2.0 * s * s)
    }
}
