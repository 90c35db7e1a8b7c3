//! The Hopf fibration `S³ → S²(½)`, projected magnetic geodesics, and the
//! restricted primitives `α_λ = λα + (1 − λ)π*β` near a fibre.
//!
//! `S²(½)` is oriented by its inward normal. With that orientation the
//! projection of a geodesic with parameters `(s, ψ)` is a circle of geodesic
//! radius `½ Arg C_s(ψ)` and geodesic curvature `(2 cos ψ − s)/sin ψ`, and the
//! pullback of the area form is `−dα`.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use serde::Serialize;

use crate::closed_form::{arg_c, Flow};
use crate::geom::{check_on_sphere, ComplexVector};
use crate::oracle::Trajectory;
use crate::{Error, Result, C64};

/// A point of the sphere of radius `½` in `R³`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpherePoint3 {
    pub x: [f64; 3],
}

impl SpherePoint3 {
    pub fn new(x: [f64; 3]) -> Result<Self> {
        let p = Self { x };
        if (p.norm() - 0.5).abs() > 1e-12 {
            return Err(Error::InvalidState(format!(
                "point has norm {} instead of 1/2",
                p.norm()
            )));
        }
        Ok(p)
    }

    pub fn norm(&self) -> f64 {
        self.vector().norm()
    }

    fn vector(&self) -> Vector3<f64> {
        Vector3::from(self.x)
    }

    /// Great-circle distance on `S²(½)`.
    pub fn distance(&self, other: &Self) -> f64 {
        let c = (4.0 * self.vector().dot(&other.vector())).clamp(-1.0, 1.0);
        0.5 * c.acos()
    }
}

fn raw_hopf(z: &ComplexVector) -> [f64; 3] {
    let (z1, z2) = (z[0], z[1]);
    let w = z1.conj() * z2;
    [w.re, w.im, 0.5 * (z1.norm_sqr() - z2.norm_sqr())]
}

/// `π(z) = ½ (2 z̄₁ z₂, |z₁|² − |z₂|²)` for `z ∈ S³ ⊂ C²`.
pub fn hopf_map(z: &ComplexVector) -> Result<SpherePoint3> {
    if z.len() != 2 {
        return Err(Error::Domain(format!(
            "the Hopf map is defined on S^3 in C^2, got C^{}",
            z.len()
        )));
    }
    check_on_sphere(z, 1e-12)?;
    SpherePoint3::new(raw_hopf(z))
}

/// `arccos |⟨q₀, q₁⟩|`, the distance between the fibres through `q₀` and `q₁`.
pub fn hopf_distance(q0: &ComplexVector, q1: &ComplexVector) -> Result<f64> {
    check_on_sphere(q0, 1e-10)?;
    check_on_sphere(q1, 1e-10)?;
    if q0.len() != q1.len() {
        return Err(Error::Dimension {
            expected: q0.len(),
            found: q1.len(),
        });
    }
    Ok(q0.herm(q1).norm().clamp(0.0, 1.0).acos())
}

/// Central difference of `π` along the great circle `cos(h) z + sin(h) u`.
pub fn hopf_pushforward(z: &ComplexVector, u: &ComplexVector, h: f64) -> Result<[f64; 3]> {
    check_on_sphere(z, 1e-10)?;
    let un = u.normalized()?;
    let scale = u.norm();
    let at = |t: f64| raw_hopf(&z.scale_real(t.cos()).axpy(C64::new(t.sin(), 0.0), &un));
    let (a, b) = (at(h), at(-h));
    Ok([0, 1, 2].map(|k| scale * (a[k] - b[k]) / (2.0 * h)))
}

/// `½ Arg C_s(ψ)`.
pub fn projected_radius(s: f64, psi: f64) -> Result<f64> {
    Ok(0.5 * arg_c(s, psi)?)
}

/// Curvature of the projected circle, `(2 cos ψ − s)/sin ψ`.
pub fn projected_strength(s: f64, psi: f64) -> Result<f64> {
    if !(psi > 0.0 && psi < std::f64::consts::PI) {
        return Err(Error::Domain(format!("psi = {psi} outside (0, pi)")));
    }
    if !(s >= 0.0) {
        return Err(Error::Domain(format!("strength must be >= 0, got {s}")));
    }
    Ok((2.0 * psi.cos() - s) / psi.sin())
}

/// Geodesic radius in `(0, π/2)` of a circle of curvature `a` on `S²(½)`: `tan 2r = 2/a`.
pub fn circle_radius_from_strength(a: f64) -> f64 {
    0.5 * 2f64.atan2(a)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircleFit {
    /// Unit axis; the circle is the set at geodesic distance `radius` from `axis/2`.
    pub axis: [f64; 3],
    pub radius: f64,
    /// Largest deviation of a sample's distance from `radius`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectedTrajectory {
    pub points: Vec<SpherePoint3>,
    pub fit: CircleFit,
}

/// Fits a geodesic circle of `S²(½)` to the points.
///
/// The axis is the normal of the best-fit plane. It is oriented so that the
/// points run clockwise around it, i.e. counterclockwise for the inward normal.
pub fn fit_circle(points: &[SpherePoint3]) -> Result<CircleFit> {
    if points.len() < 8 {
        return Err(Error::InsufficientData {
            needed: 8,
            found: points.len(),
        });
    }
    let vs: Vec<Vector3<f64>> = points.iter().map(|p| p.vector()).collect();
    let n = vs.len() as f64;
    let centroid = vs.iter().sum::<Vector3<f64>>() / n;
    let spread = vs.iter().map(|v| (v - centroid).norm()).fold(0.0, f64::max);
    if spread < 1e-10 {
        let axis = centroid.normalize();
        return Ok(CircleFit {
            axis: axis.into(),
            radius: 0.0,
            residual: spread,
        });
    }
    let cov = vs
        .iter()
        .map(|v| (v - centroid) * (v - centroid).transpose())
        .sum::<Matrix3<f64>>()
        / n;
    let eig = SymmetricEigen::new(cov);
    let k = eig.eigenvalues.imin();
    let mut axis: Vector3<f64> = eig.eigenvectors.column(k).into();
    let winding: f64 = vs.windows(2).map(|w| w[0].cross(&w[1]).dot(&axis)).sum();
    let along = centroid.dot(&axis);
    if winding > 0.0 || (winding == 0.0 && along < 0.0) {
        axis = -axis;
    }
    let dists: Vec<f64> = vs
        .iter()
        .map(|v| 0.5 * (v.dot(&axis) / v.norm()).clamp(-1.0, 1.0).acos())
        .collect();
    let radius = dists.iter().sum::<f64>() / n;
    let residual = dists.iter().map(|d| (d - radius).abs()).fold(0.0, f64::max);
    Ok(CircleFit {
        axis: axis.into(),
        radius,
        residual,
    })
}

/// Projects a trajectory in `C²` and fits a circle to it.
pub fn project_trajectory(traj: &Trajectory) -> Result<ProjectedTrajectory> {
    let points = traj.positions().map(hopf_map).collect::<Result<Vec<_>>>()?;
    let fit = fit_circle(&points)?;
    Ok(ProjectedTrajectory { points, fit })
}

/// Geodesic curvature of a curve on `S²(½)` from three consecutive samples
/// spaced `dt` apart, for the inward normal.
pub fn curvature_from_samples(prev: &SpherePoint3, cur: &SpherePoint3, next: &SpherePoint3, dt: f64) -> f64 {
    let (a, x, b) = (prev.vector(), cur.vector(), next.vector());
    let d1 = (b - a) / (2.0 * dt);
    let d2 = (b - 2.0 * x + a) / (dt * dt);
    let normal = -x / x.norm();
    d2.dot(&normal.cross(&d1)) / d1.norm().powi(3)
}

/// Geodesic curvature of `π ∘ γ` at time `t` by central differences with step `h`.
pub fn projected_curvature<F: Flow + ?Sized>(flow: &F, t: f64, h: f64) -> Result<f64> {
    let at = |t: f64| hopf_map(&flow.state_at(t).0);
    Ok(curvature_from_samples(&at(t - h)?, &at(t)?, &at(t + h)?, h))
}

/// `½|α_λ|²` at distance `r` from the fibre: `(λ² + (1 − λ)² tan² r)/8`.
pub fn restricted_primitive_halfnorm(lambda_mix: f64, r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda_mix) {
        return Err(Error::Domain(format!("mixing weight {lambda_mix} outside [0, 1]")));
    }
    if !(0.0..std::f64::consts::FRAC_PI_2).contains(&r) {
        return Err(Error::Domain(format!("r = {r} outside [0, pi/2)")));
    }
    let t = r.tan();
    Ok((lambda_mix * lambda_mix + (1.0 - lambda_mix).powi(2) * t * t) / 8.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RestrictedPrimitiveSpec {
    pub k: f64,
    /// Radius of the ball around the fibre: `cos r_k = √(1 − 8k)`.
    pub r_k: f64,
    pub lambda_mix: f64,
}

impl RestrictedPrimitiveSpec {
    pub fn new(k: f64, lambda_mix: f64) -> Result<Self> {
        if !(k > 0.0 && k <= 0.125) {
            return Err(Error::Domain(format!("k = {k} outside (0, 1/8]")));
        }
        if !(0.0..=1.0).contains(&lambda_mix) {
            return Err(Error::Domain(format!("mixing weight {lambda_mix} outside [0, 1]")));
        }
        Ok(Self {
            k,
            r_k: (1.0 - 8.0 * k).max(0.0).sqrt().acos(),
            lambda_mix,
        })
    }

    /// `sup_{r < r_k} ½|α_λ|²`, attained as `r → r_k` (infinite if `r_k = π/2` and `λ < 1`).
    pub fn sup(&self) -> f64 {
        if self.lambda_mix == 1.0 {
            return 0.125;
        }
        let t2 = if self.r_k >= std::f64::consts::FRAC_PI_2 {
            f64::INFINITY
        } else {
            self.r_k.tan().powi(2)
        };
        (self.lambda_mix.powi(2) + (1.0 - self.lambda_mix).powi(2) * t2) / 8.0
    }

    /// Largest half-norm over an `r`-grid of `[0, r_k)`.
    pub fn grid_sup(&self, points: usize) -> f64 {
        let top = self.r_k.min(std::f64::consts::FRAC_PI_2 - 1e-9);
        (0..=points)
            .map(|j| top * j as f64 / points as f64)
            .filter_map(|r| restricted_primitive_halfnorm(self.lambda_mix, r).ok())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RestrictedSup {
    pub k: f64,
    pub r_k: f64,
    pub lambda_mix: f64,
    pub sup: f64,
    /// Smallest grid sup over a `λ`-grid of `[0, 1]`.
    pub grid_best: f64,
    pub grid_best_lambda: f64,
    /// `grid_best ≥ sup − 1e−6`.
    pub verified: bool,
}

/// Optimal mixing weight `λ = sin² r_k` and the resulting sup, which equals `k`.
pub fn restricted_sup(k: f64) -> Result<RestrictedSup> {
    let spec = RestrictedPrimitiveSpec::new(k, 0.0)?;
    let lambda_mix = spec.r_k.sin().powi(2).min(1.0);
    let opt = RestrictedPrimitiveSpec { lambda_mix, ..spec };
    let sup = opt.sup();
    let (mut grid_best, mut grid_best_lambda) = (f64::INFINITY, 0.0);
    for j in 0..=400 {
        let l = j as f64 / 400.0;
        let g = RestrictedPrimitiveSpec { lambda_mix: l, ..spec }.grid_sup(2000);
        if g < grid_best {
            grid_best = g;
            grid_best_lambda = l;
        }
    }
    Ok(RestrictedSup {
        k,
        r_k: spec.r_k,
        lambda_mix,
        sup,
        grid_best,
        grid_best_lambda,
        verified: grid_best >= sup - 1e-6,
    })
}
