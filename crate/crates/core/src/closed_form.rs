//! Closed-form magnetic geodesics of `(S^{2n+1}, g, s·dα)`.
//!
//! A unit-speed geodesic of strength `s` and contact angle `ψ` has the form
//!
//! ```text
//! γ(t) = e^{i s t/2} ( e^{−i|C|t} w₀ + e^{i|C|t} w₁ ),   C = C_s(ψ) = (cos ψ − s/2, sin ψ)
//! ```
//!
//! for an admissible pair `(w₀, w₁)` (Hermitian-orthogonal, `|w₀|² + |w₁|² = 1`).
//! The signed chord coefficient `δ = |w₀|² − |w₁|²` equals
//! `(s/2 − cos ψ)/|C|`, which is `−cos Arg C_s(ψ)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::geom::{ComplexVector, UnitTangentState, CONSTRUCTION_TOL};
use crate::{Error, Result, C64};

/// Below this value of `|C_s(ψ)|` the torus decomposition is treated as singular.
pub const RESONANCE_TOL: f64 = 1e-9;

const ANGLE_SLACK: f64 = 1e-12;

fn check_params(s: f64, psi: f64) -> Result<()> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!("strength must be >= 0, got {s}")));
    }
    if !(-ANGLE_SLACK..=PI + ANGLE_SLACK).contains(&psi) {
        return Err(Error::Domain(format!("psi = {psi} outside [0, pi]")));
    }
    Ok(())
}

/// The point `C_s(ψ)` on the upper half-circle of radius 1 centred at `(−s/2, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfCircleData {
    pub s: f64,
    pub psi: f64,
    pub point: (f64, f64),
    pub norm: f64,
    /// `atan2` of the point; `None` at the origin.
    pub arg: Option<f64>,
}

impl HalfCircleData {
    pub fn is_degenerate(&self) -> bool {
        self.norm < RESONANCE_TOL
    }
}

pub fn half_circle(s: f64, psi: f64) -> Result<HalfCircleData> {
    check_params(s, psi)?;
    let point = (psi.cos() - 0.5 * s, psi.sin().max(0.0));
    let norm = c_norm(s, psi);
    let arg = if norm == 0.0 {
        None
    } else {
        Some(point.1.atan2(point.0))
    };
    Ok(HalfCircleData {
        s,
        psi,
        point,
        norm,
        arg,
    })
}

/// `|C_s(ψ)|`. Uses `((cos ψ − s/2)² + sin² ψ)^{1/2}`, which keeps relative
/// accuracy near the resonance.
pub(crate) fn c_norm(s: f64, psi: f64) -> f64 {
    (psi.cos() - 0.5 * s).hypot(psi.sin())
}

/// `Arg C_s(ψ)` in `[0, π]`; errors at the resonance.
pub fn arg_c(s: f64, psi: f64) -> Result<f64> {
    half_circle(s, psi)?.arg.ok_or(Error::DegenerateResonance)
}

/// Signed chord coefficient `δ = (s/2 − cos ψ)/|C_s(ψ)|`.
pub fn delta(s: f64, psi: f64) -> Result<f64> {
    check_params(s, psi)?;
    let c = c_norm(s, psi);
    if c < RESONANCE_TOL {
        return Err(Error::DegenerateResonance);
    }
    Ok(((0.5 * s - psi.cos()) / c).clamp(-1.0, 1.0))
}

/// Characteristic frequencies `θ₀ = s/2 − |C| ≤ θ₁ = s/2 + |C|`.
pub fn frequencies(s: f64, psi: f64) -> Result<(f64, f64)> {
    check_params(s, psi)?;
    let c = c_norm(s, psi);
    Ok((0.5 * s - c, 0.5 * s + c))
}

/// Rotation number `ρ = θ₀/θ₁` for `ψ ∈ (0, π)`.
pub fn rotation_number(s: f64, psi: f64) -> Result<f64> {
    check_params(s, psi)?;
    if psi <= 0.0 || psi >= PI {
        return Err(Error::Domain(format!("psi = {psi} outside (0, pi)")));
    }
    let (t0, t1) = frequencies(s, psi)?;
    Ok(t0 / t1)
}

/// Limits `(ρ⁻, ρ⁺)` of the rotation number at `ψ → π` and `ψ → 0`.
pub fn rotation_bounds(s: f64) -> Result<(f64, f64)> {
    if !(s >= 0.0) {
        return Err(Error::Domain(format!("strength must be >= 0, got {s}")));
    }
    let lower = -1.0 / (1.0 + s);
    let upper = if s <= 2.0 { s - 1.0 } else { 1.0 / (s - 1.0) };
    Ok((lower, upper))
}

/// `ψ_max(s) = arccos(2/s)`, where `Arg C_s` attains its minimum, for `s > 2`.
pub fn psi_max(s: f64) -> Result<f64> {
    if !(s > 2.0) || !s.is_finite() {
        return Err(Error::Domain(format!("psi_max requires s > 2, got {s}")));
    }
    Ok((2.0 / s).acos())
}

/// Two Hermitian-orthogonal vectors with `|w₀|² + |w₁|² = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissiblePair {
    w0: ComplexVector,
    w1: ComplexVector,
    width: f64,
}

impl AdmissiblePair {
    pub fn new(w0: ComplexVector, w1: ComplexVector) -> Result<Self> {
        Self::with_tolerance(w0, w1, CONSTRUCTION_TOL)
    }

    pub fn with_tolerance(w0: ComplexVector, w1: ComplexVector, tol: f64) -> Result<Self> {
        if w0.len() != w1.len() {
            return Err(Error::Dimension {
                expected: w0.len(),
                found: w1.len(),
            });
        }
        let ip = w0.herm(&w1).norm();
        if ip > tol {
            return Err(Error::Consistency(format!(
                "pair is not orthogonal: |<w0, w1>| = {ip:e}"
            )));
        }
        let total = w0.norm_sqr() + w1.norm_sqr();
        if (total - 1.0).abs() > tol {
            return Err(Error::Consistency(format!(
                "pair is not normalised: |w0|^2 + |w1|^2 - 1 = {:e}",
                total - 1.0
            )));
        }
        let width = (w0.norm_sqr() - w1.norm_sqr()).clamp(-1.0, 1.0).acos();
        Ok(Self { w0, w1, width })
    }

    pub fn w0(&self) -> &ComplexVector {
        &self.w0
    }

    pub fn w1(&self) -> &ComplexVector {
        &self.w1
    }

    /// `τ ∈ [0, π]` with `|w₀| = cos(τ/2)`, `|w₁| = sin(τ/2)`.
    pub fn width(&self) -> f64 {
        self.width
    }

    /// `|w₀|² − |w₁|²`.
    pub fn signed_chord(&self) -> f64 {
        self.w0.norm_sqr() - self.w1.norm_sqr()
    }

    pub fn dim(&self) -> usize {
        self.w0.len()
    }

    pub(crate) fn map(&self, f: impl Fn(&ComplexVector) -> ComplexVector) -> Self {
        Self {
            w0: f(&self.w0),
            w1: f(&self.w1),
            width: self.width,
        }
    }
}

/// Anything that can be evaluated as a curve with velocity on the sphere.
pub trait Flow {
    /// Position and velocity at time `t`.
    fn state_at(&self, t: f64) -> (ComplexVector, ComplexVector);
    fn dim(&self) -> usize;
    fn strength(&self) -> f64;
}

/// A magnetic geodesic living on a Clifford torus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormGeodesic {
    s: f64,
    psi: f64,
    pair: AdmissiblePair,
    theta0: f64,
    theta1: f64,
    delta: f64,
    c_norm: f64,
}

/// Decomposes the geodesic through `state` into its admissible pair.
pub fn torus_data(s: f64, state: &UnitTangentState) -> Result<ClosedFormGeodesic> {
    let psi = state.psi();
    check_params(s, psi)?;
    let c = c_norm(s, psi);
    if c < RESONANCE_TOL {
        return Err(Error::DegenerateResonance);
    }
    let z = state.position();
    let v = state.velocity();
    // 1/(2i|C|) = −i/(2|C|)
    let pre = C64::new(0.0, -0.5 / c);
    let w0 = z.scale(C64::new(0.0, c + 0.5 * s)).axpy(C64::new(-1.0, 0.0), v).scale(pre);
    let w1 = z.scale(C64::new(0.0, c - 0.5 * s)).axpy(C64::new(1.0, 0.0), v).scale(pre);
    let pair = AdmissiblePair::with_tolerance(w0, w1, 1e-10)?;
    ClosedFormGeodesic::from_pair(s, psi, pair)
}

/// Inverse of [`torus_data`]: the state at `t = 0` of the geodesic on `pair`.
pub fn state_from_pair(s: f64, psi: f64, pair: &AdmissiblePair) -> Result<UnitTangentState> {
    let g = ClosedFormGeodesic::from_pair(s, psi, pair.clone())?;
    let (z, v) = g.state_at(0.0);
    UnitTangentState::with_tolerance(z, v, 1e-10)
}

impl ClosedFormGeodesic {
    /// Checks that the width of `pair` matches `(s, ψ)` to `1e−8`.
    pub fn from_pair(s: f64, psi: f64, pair: AdmissiblePair) -> Result<Self> {
        check_params(s, psi)?;
        let psi = psi.clamp(0.0, PI);
        let d = delta(s, psi)?;
        let got = pair.signed_chord();
        if (got - d).abs() > 1e-8 {
            return Err(Error::Consistency(format!(
                "pair has |w0|^2 - |w1|^2 = {got}, expected {d} for (s, psi) = ({s}, {psi})"
            )));
        }
        let c = c_norm(s, psi);
        Ok(Self {
            s,
            psi,
            pair,
            theta0: 0.5 * s - c,
            theta1: 0.5 * s + c,
            delta: d,
            c_norm: c,
        })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn pair(&self) -> &AdmissiblePair {
        &self.pair
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn c_norm(&self) -> f64 {
        self.c_norm
    }

    /// `γ(t)` and `γ̇(t)`.
    pub fn evaluate(&self, t: f64) -> (ComplexVector, ComplexVector) {
        let e0 = C64::from_polar(1.0, self.theta0 * t);
        let e1 = C64::from_polar(1.0, self.theta1 * t);
        let pos = self.pair.w0.scale(e0).axpy(e1, &self.pair.w1);
        let vel = self
            .pair
            .w0
            .scale(C64::new(0.0, self.theta0) * e0)
            .axpy(C64::new(0.0, self.theta1) * e1, &self.pair.w1);
        (pos, vel)
    }

    pub(crate) fn with_pair(&self, pair: AdmissiblePair) -> Self {
        Self {
            pair,
            ..self.clone()
        }
    }
}

impl Flow for ClosedFormGeodesic {
    fn state_at(&self, t: f64) -> (ComplexVector, ComplexVector) {
        self.evaluate(t)
    }
    fn dim(&self) -> usize {
        self.pair.dim()
    }
    fn strength(&self) -> f64 {
        self.s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }
}

/// Unit-speed Reeb trajectory `t ↦ e^{±i r t} z` (`r = 1` unless rescaled).
///
/// These are magnetic geodesics with `ψ = 0` (resp. `π`) for every strength,
/// including the resonance `s = 2`, where [`torus_data`] is undefined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReebOrbit {
    z: ComplexVector,
    orientation: Orientation,
    speed: f64,
    s: f64,
}

pub fn reeb_orbit(z: &ComplexVector, orientation: Orientation) -> Result<ReebOrbit> {
    crate::geom::check_on_sphere(z, 1e-10)?;
    Ok(ReebOrbit {
        z: z.clone(),
        orientation,
        speed: 1.0,
        s: 0.0,
    })
}

impl ReebOrbit {
    /// Same fibre traversed at angular speed `speed`.
    pub fn with_speed(mut self, speed: f64) -> Self {
        self.speed = speed;
        self
    }

    /// Tags the orbit with the strength of the system it is considered in.
    pub fn with_strength(mut self, s: f64) -> Self {
        self.s = s;
        self
    }

    pub fn base_point(&self) -> &ComplexVector {
        &self.z
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn evaluate(&self, t: f64) -> (ComplexVector, ComplexVector) {
        let w = self.orientation.sign() * self.speed;
        let e = C64::from_polar(1.0, w * t);
        let pos = self.z.scale(e);
        let vel = pos.scale(C64::new(0.0, w));
        (pos, vel)
    }

    pub(crate) fn with_base(&self, z: ComplexVector) -> Self {
        Self { z, ..self.clone() }
    }
}

impl Flow for ReebOrbit {
    fn state_at(&self, t: f64) -> (ComplexVector, ComplexVector) {
        self.evaluate(t)
    }
    fn dim(&self) -> usize {
        self.z.len()
    }
    fn strength(&self) -> f64 {
        self.s
    }
}

/// Either representation of a unit-speed magnetic geodesic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MagneticGeodesic {
    Torus(ClosedFormGeodesic),
    Reeb(ReebOrbit),
}

impl MagneticGeodesic {
    /// Geodesic with initial condition `state`; routes the resonance to a Reeb orbit.
    pub fn from_state(s: f64, state: &UnitTangentState) -> Result<Self> {
        match torus_data(s, state) {
            Ok(g) => Ok(Self::Torus(g)),
            Err(Error::DegenerateResonance) => {
                let orientation = if state.cos_psi() >= 0.0 {
                    Orientation::Positive
                } else {
                    Orientation::Negative
                };
                Ok(Self::Reeb(
                    reeb_orbit(state.position(), orientation)?.with_strength(s),
                ))
            }
            Err(e) => Err(e),
        }
    }

    pub fn is_resonant(&self) -> bool {
        matches!(self, Self::Reeb(_))
    }
}

impl Flow for MagneticGeodesic {
    fn state_at(&self, t: f64) -> (ComplexVector, ComplexVector) {
        match self {
            Self::Torus(g) => g.evaluate(t),
            Self::Reeb(r) => r.evaluate(t),
        }
    }
    fn dim(&self) -> usize {
        match self {
            Self::Torus(g) => g.dim(),
            Self::Reeb(r) => r.dim(),
        }
    }
    fn strength(&self) -> f64 {
        match self {
            Self::Torus(g) => g.s(),
            Self::Reeb(r) => r.strength(),
        }
    }
}

/// Residual of the ambient linear equation `γ̈ − s i γ̇ + (1 − s cos ψ) γ = 0`
/// at time `t`, with `γ̈` taken from the analytic second derivative.
pub fn linear_equation_residual(g: &ClosedFormGeodesic, t: f64) -> f64 {
    let e0 = C64::from_polar(1.0, g.theta0 * t);
    let e1 = C64::from_polar(1.0, g.theta1 * t);
    let pair = &g.pair;
    let (pos, vel) = g.evaluate(t);
    let acc = pair
        .w0
        .scale(-g.theta0 * g.theta0 * e0)
        .axpy(-g.theta1 * g.theta1 * e1, &pair.w1);
    let r = acc
        .axpy(C64::new(0.0, -g.s), &vel)
        .axpy(C64::new(1.0 - g.s * g.psi.cos(), 0.0), &pos);
    r.norm()
}
