//! Mañé critical value and Mather set of the Killing magnetic system on `S^{2n+1}`.
//!
//! For a Killing primitive `α` the critical value is `½‖α‖²_∞`; on the round
//! sphere `α` is dual to `X = ½ i z = ¼R`, so `½|α|² ≡ 1/8` and every point is
//! critical. The Mather set is the lift of the Hopf fibres at speed `½`.

use rand::Rng;
use serde::Serialize;

use crate::closed_form::{reeb_orbit, Orientation};
use crate::geom::{check_on_sphere, contact_angle_unchecked, lorentz_unchecked, project_tangent, ComplexVector};
use crate::oracle::{sample_flow, trajectory_action, Trajectory};
use crate::sampling::{random_unit_vector, rng_from_seed};
use crate::{Error, Result, C64};

/// Values of `½|α|²` at sample points of a Killing system.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KillingSystemSample {
    points: Vec<ComplexVector>,
    alpha_halfnormsq: Vec<f64>,
}

impl KillingSystemSample {
    pub fn new(points: Vec<ComplexVector>, alpha_halfnormsq: Vec<f64>) -> Result<Self> {
        if points.len() != alpha_halfnormsq.len() {
            return Err(Error::Consistency(format!(
                "{} points but {} values",
                points.len(),
                alpha_halfnormsq.len()
            )));
        }
        if let Some(v) = alpha_halfnormsq.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::Domain(format!("half norms must be >= 0, got {v}")));
        }
        Ok(Self {
            points,
            alpha_halfnormsq,
        })
    }

    /// `count` random points of `S^{2n+1} ⊂ C^dim` with `½|α|²` evaluated at each.
    pub fn round_sphere(dim: usize, count: usize, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        let points: Vec<ComplexVector> = (0..count).map(|_| random_unit_vector(&mut rng, dim)).collect();
        let alpha_halfnormsq = points.iter().map(alpha_halfnormsq).collect();
        Self {
            points,
            alpha_halfnormsq,
        }
    }

    /// Sample of the system with primitive `c·α`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            points: self.points.clone(),
            alpha_halfnormsq: self.alpha_halfnormsq.iter().map(|v| c * c * v).collect(),
        }
    }

    pub fn points(&self) -> &[ComplexVector] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.alpha_halfnormsq
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// The vector field `X` dual to `α`: `X_z = ½ i z`.
pub fn killing_field(z: &ComplexVector) -> ComplexVector {
    z.scale(C64::new(0.0, 0.5))
}

/// `½|α_z|²` computed from the tangential part of `X_z`.
pub fn alpha_halfnormsq(z: &ComplexVector) -> f64 {
    0.5 * project_tangent(z, &killing_field(z)).norm_sqr()
}

/// `sup ½|α|²` over the sample.
pub fn mane_value(sample: &KillingSystemSample) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::Domain("empty sample".into()));
    }
    Ok(sample.alpha_halfnormsq.iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

/// Orthonormal real frame of `T_z S`.
fn tangent_frame(z: &ComplexVector) -> Vec<ComplexVector> {
    let dim = z.len();
    let mut frame: Vec<ComplexVector> = Vec::with_capacity(2 * dim - 1);
    let mut basis = vec![z.clone()];
    for k in 0..dim {
        for unit in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
            let mut e = ComplexVector::basis(dim, k).scale(unit);
            for b in &basis {
                e = e.axpy(C64::new(-b.dot(&e), 0.0), b);
            }
            if e.norm() > 1e-8 {
                let e = e.scale_real(1.0 / e.norm());
                basis.push(e.clone());
                frame.push(e);
            }
        }
    }
    frame
}

/// Central-difference gradient of `f` on the sphere at `z`, in an orthonormal tangent frame.
///
/// Each component differentiates along the great circle `cos(t) z + sin(t) e`,
/// so the error is `O(h²)` for smooth `f`.
pub fn sphere_gradient(f: impl Fn(&ComplexVector) -> f64, z: &ComplexVector, h: f64) -> Vec<f64> {
    tangent_frame(z)
        .iter()
        .map(|e| {
            let at = |t: f64| f(&z.scale_real(t.cos()).axpy(C64::new(t.sin(), 0.0), e));
            (at(h) - at(-h)) / (2.0 * h)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KillingPointReport {
    pub grad_halfnormsq: f64,
    pub nabla_x_x_norm: f64,
    pub y_dot_x_norm: f64,
    pub dalpha_x_norm: f64,
}

impl KillingPointReport {
    pub fn max(&self) -> f64 {
        self.grad_halfnormsq
            .max(self.nabla_x_x_norm)
            .max(self.y_dot_x_norm)
            .max(self.dalpha_x_norm)
    }
}

/// Gradient step used by [`killing_point_report`].
pub const GRADIENT_STEP: f64 = 1e-5;

/// The four equivalent criticality measures at `z`.
pub fn killing_point_report(z: &ComplexVector) -> Result<KillingPointReport> {
    check_on_sphere(z, 1e-10)?;
    let grad = sphere_gradient(alpha_halfnormsq, z, GRADIENT_STEP);
    let x = killing_field(z);
    // X is the restriction of a linear field, so ∇_X X is the tangential part of (½i)X.
    let nabla = project_tangent(z, &x.scale(C64::new(0.0, 0.5)));
    // dα(X, u) = Re⟨iX, u⟩, whose dual on T_z S is the tangential part of iX.
    let dalpha = project_tangent(z, &x.mul_i());
    Ok(KillingPointReport {
        grad_halfnormsq: grad.iter().map(|g| g * g).sum::<f64>().sqrt(),
        nabla_x_x_norm: nabla.norm(),
        y_dot_x_norm: lorentz_unchecked(z, &x).norm(),
        dalpha_x_norm: dalpha.norm(),
    })
}

/// `|γ̈ + |γ̇|²γ − s Y_γ γ̇|`, the residual of the magnetic equation at strength `s`.
pub fn magnetic_residual(z: &ComplexVector, v: &ComplexVector, acc: &ComplexVector, s: f64) -> f64 {
    acc.axpy(C64::new(v.norm_sqr(), 0.0), z)
        .axpy(C64::new(-s, 0.0), &lorentz_unchecked(z, v))
        .norm()
}

/// Tangential part of `γ̈`, which vanishes exactly for standard geodesics.
pub fn geodesic_residual(z: &ComplexVector, acc: &ComplexVector) -> f64 {
    project_tangent(z, acc).norm()
}

/// `t ↦ e^{it/2} z` on `[0, duration]`, the lift of a Hopf fibre with velocity `¼R`.
///
/// It is checked against the magnetic equation of the energy formulation
/// (strength 1, speed `½`) at every sample.
pub fn mather_representative(z: &ComplexVector, duration: f64, step: f64) -> Result<Trajectory> {
    let orbit = reeb_orbit(z, Orientation::Positive)?.with_speed(0.5).with_strength(1.0);
    let traj = sample_flow(&orbit, duration, step)?;
    let worst = traj
        .states()
        .iter()
        .map(|(p, v)| magnetic_residual(p, v, &p.scale_real(-0.25), 1.0))
        .fold(0.0, f64::max);
    if worst > 1e-10 {
        return Err(Error::Consistency(format!("Mather loop residual {worst:e}")));
    }
    Ok(traj)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowlineReport {
    pub speed: f64,
    /// `0` or `π`; undefined for the constant curve.
    pub psi: Option<f64>,
    pub standard_residual: f64,
    /// Worst magnetic residual over all tested strengths.
    pub magnetic_residual: f64,
    pub strengths: Vec<f64>,
    pub degenerate: bool,
}

/// Strengths at which [`reeb_flowline_check`] tests the magnetic equation.
pub const FLOWLINE_STRENGTHS: [f64; 7] = [0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0];

/// Residuals of `t ↦ e^{irt} z` in the standard and magnetic geodesic equations.
pub fn reeb_flowline_check(z: &ComplexVector, r: f64, duration: f64) -> Result<FlowlineReport> {
    check_on_sphere(z, 1e-10)?;
    let samples = 200;
    let (mut standard, mut magnetic) = (0.0f64, 0.0f64);
    let mut psi = None;
    for j in 0..=samples {
        let t = duration * j as f64 / samples as f64;
        let p = z.scale(C64::from_polar(1.0, r * t));
        let v = p.scale(C64::new(0.0, r));
        let acc = p.scale_real(-r * r);
        standard = standard.max(geodesic_residual(&p, &acc));
        for &s in &FLOWLINE_STRENGTHS {
            // At speed |r| the strength-s system carries the field s·|r|·dα.
            magnetic = magnetic.max(magnetic_residual(&p, &v, &acc, s * r.abs()));
        }
        if r != 0.0 && psi.is_none() {
            psi = Some(contact_angle_unchecked(&p, &v.scale_real(1.0 / r.abs())));
        }
    }
    Ok(FlowlineReport {
        speed: r.abs(),
        psi,
        standard_residual: standard,
        magnetic_residual: magnetic,
        strengths: FLOWLINE_STRENGTHS.to_vec(),
        degenerate: r == 0.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManeCertificate {
    /// `sup ½|α|²` over the sample; `c ≤ upper`.
    pub upper: f64,
    pub k: f64,
    /// Action of the closed Mather loop at energy `k`, equal to `4π(k − 1/8)`.
    pub lower_witness_action: f64,
    /// A negative witness action proves `c > k`.
    pub certifies_above_k: bool,
}

/// Two-sided bracket of the critical value on the sampled family.
pub fn certificate(dim: usize, k: f64, points: usize, seed: u64) -> Result<ManeCertificate> {
    if dim == 0 {
        return Err(Error::Domain("dimension must be >= 1".into()));
    }
    let upper = mane_value(&KillingSystemSample::round_sphere(dim, points, seed))?;
    let loop_ = mather_representative(&ComplexVector::basis(dim, 0), 4.0 * std::f64::consts::PI, 1e-3)?;
    let action = trajectory_action(&loop_, k)?;
    Ok(ManeCertificate {
        upper,
        k,
        lower_witness_action: action,
        certifies_above_k: action < 0.0,
    })
}

/// Random non-constant test function `f(p) = Re⟨p, a⟩` used to validate [`sphere_gradient`].
pub fn planted_function<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> impl Fn(&ComplexVector) -> f64 {
    let a = random_unit_vector(rng, dim);
    move |p: &ComplexVector| p.dot(&a)
}
