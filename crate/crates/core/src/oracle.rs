//! Fixed-step RK4 integration of the magnetic geodesic equations, used as an
//! independent check on [`crate::closed_form`].
//!
//! Two formulations are integrated:
//!
//! - ambient: `γ̈ = s i γ̇ − (1 − s cos ψ₀) γ`, with `ψ₀` frozen at the initial state;
//! - intrinsic: `γ̈ = −γ + s Y_γ γ̇`.
//!
//! No renormalisation is applied, so the drift of the conserved quantities
//! measures the integration error.

use serde::Serialize;

use crate::closed_form::Flow;
use crate::geom::{ComplexVector, UnitTangentState};
use crate::symmetry::{moment_map_unchecked, AntiHermitianGenerator};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Rk4Ambient,
    Rk4Intrinsic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryMeta {
    pub s: f64,
    pub n: usize,
    pub step: f64,
    pub method: Method,
}

/// Time-stamped samples `(γ(t), γ̇(t))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<(ComplexVector, ComplexVector)>,
    meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn new(
        times: Vec<f64>,
        states: Vec<(ComplexVector, ComplexVector)>,
        meta: TrajectoryMeta,
    ) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::Consistency(format!(
                "{} times but {} states",
                times.len(),
                states.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Consistency("times must be strictly increasing".into()));
        }
        Ok(Self {
            times,
            states,
            meta,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[(ComplexVector, ComplexVector)] {
        &self.states
    }

    pub fn positions(&self) -> impl Iterator<Item = &ComplexVector> {
        self.states.iter().map(|(p, _)| p)
    }

    pub fn meta(&self) -> &TrajectoryMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &(ComplexVector, ComplexVector))> {
        self.times.last().copied().zip(self.states.last())
    }

    /// Largest position difference against another trajectory sampled at the same times.
    pub fn max_position_distance(&self, other: &Trajectory) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::Consistency("trajectories have different lengths".into()));
        }
        Ok(self
            .states
            .iter()
            .zip(&other.states)
            .map(|((a, _), (b, _))| a.distance(b))
            .fold(0.0, f64::max))
    }

    pub(crate) fn map_states(
        &self,
        f: impl Fn(&ComplexVector) -> ComplexVector,
    ) -> Trajectory {
        Trajectory {
            times: self.times.clone(),
            states: self.states.iter().map(|(p, v)| (f(p), f(v))).collect(),
            meta: self.meta,
        }
    }
}

fn step_grid(t_end: f64, step: f64) -> Result<(usize, f64)> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::Domain(format!("step must be positive, got {step}")));
    }
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::Domain(format!("t_end must be >= 0, got {t_end}")));
    }
    let count = (t_end / step).round() as usize;
    if count == 0 {
        return Ok((0, 0.0));
    }
    Ok((count, t_end / count as f64))
}

/// Classical RK4 on the second-order system `γ̈ = acc(γ, γ̇)`.
fn rk4<F>(
    state: &UnitTangentState,
    t_end: f64,
    step: f64,
    meta: TrajectoryMeta,
    acc: F,
) -> Result<Trajectory>
where
    F: Fn(&ComplexVector, &ComplexVector) -> ComplexVector,
{
    let (count, h) = step_grid(t_end, step)?;
    let mut times = Vec::with_capacity(count + 1);
    let mut states = Vec::with_capacity(count + 1);
    let mut x = state.position().clone();
    let mut v = state.velocity().clone();
    times.push(0.0);
    states.push((x.clone(), v.clone()));
    let half = C64::new(0.5 * h, 0.0);
    let full = C64::new(h, 0.0);
    let sixth = C64::new(h / 6.0, 0.0);
    let two = C64::new(2.0, 0.0);
    for k in 1..=count {
        let k1x = v.clone();
        let k1v = acc(&x, &v);
        let k2x = v.axpy(half, &k1v);
        let k2v = acc(&x.axpy(half, &k1x), &k2x);
        let k3x = v.axpy(half, &k2v);
        let k3v = acc(&x.axpy(half, &k2x), &k3x);
        let k4x = v.axpy(full, &k3v);
        let k4v = acc(&x.axpy(full, &k3x), &k4x);
        let dx = k1x.axpy(two, &k2x).axpy(two, &k3x).axpy(C64::new(1.0, 0.0), &k4x);
        let dv = k1v.axpy(two, &k2v).axpy(two, &k3v).axpy(C64::new(1.0, 0.0), &k4v);
        x = x.axpy(sixth, &dx);
        v = v.axpy(sixth, &dv);
        if !x.is_finite() || !v.is_finite() {
            return Err(Error::Integration {
                last_valid_time: times[k - 1],
            });
        }
        times.push(k as f64 * h);
        states.push((x.clone(), v.clone()));
    }
    Trajectory::new(times, states, meta)
}

/// RK4 on `γ̈ = s i γ̇ − (1 − s cos ψ₀) γ`.
pub fn integrate_ambient(s: f64, state: &UnitTangentState, t_end: f64, step: f64) -> Result<Trajectory> {
    let kappa = 1.0 - s * state.cos_psi();
    let meta = TrajectoryMeta {
        s,
        n: state.n(),
        step,
        method: Method::Rk4Ambient,
    };
    rk4(state, t_end, step, meta, |x, v| {
        v.scale(C64::new(0.0, s)).axpy(C64::new(-kappa, 0.0), x)
    })
}

/// RK4 on `∇_γ̇ γ̇ = s Y_γ γ̇`, which does not assume `ψ` is conserved.
///
/// Written as `γ̈ = −(|γ̇|²/|γ|²) γ + s (i γ̇ + Re⟨iγ, γ̇⟩ γ/|γ|²)`. On the unit
/// sphere at unit speed this is `γ̈ = −γ + s Y_γ γ̇`; the normalisations keep
/// `Re⟨γ, γ̇⟩` conserved off the sphere, where the unnormalised form has an
/// exponentially unstable mode once `s cos ψ > 1`.
pub fn integrate_intrinsic(s: f64, state: &UnitTangentState, t_end: f64, step: f64) -> Result<Trajectory> {
    let meta = TrajectoryMeta {
        s,
        n: state.n(),
        step,
        method: Method::Rk4Intrinsic,
    };
    rk4(state, t_end, step, meta, |x, v| {
        let r2 = x.norm_sqr();
        let c = x.mul_i().dot(v);
        v.scale(C64::new(0.0, s))
            .axpy(C64::new((s * c - v.norm_sqr()) / r2, 0.0), x)
    })
}

/// Samples an exact flow on the same grid as the integrators.
pub fn sample_flow<F: Flow + ?Sized>(flow: &F, t_end: f64, step: f64) -> Result<Trajectory> {
    let (count, h) = step_grid(t_end, step)?;
    let times: Vec<f64> = (0..=count).map(|k| k as f64 * h).collect();
    let states = times.iter().map(|&t| flow.state_at(t)).collect();
    let meta = TrajectoryMeta {
        s: flow.strength(),
        n: flow.dim() - 1,
        step,
        method: Method::ClosedForm,
    };
    Trajectory::new(times, states, meta)
}

/// Samples a flow at arbitrary increasing times.
pub fn sample_flow_at<F: Flow + ?Sized>(flow: &F, times: Vec<f64>) -> Result<Trajectory> {
    let states = times.iter().map(|&t| flow.state_at(t)).collect();
    let step = if times.len() > 1 { times[1] - times[0] } else { 0.0 };
    let meta = TrajectoryMeta {
        s: flow.strength(),
        n: flow.dim() - 1,
        step,
        method: Method::ClosedForm,
    };
    Trajectory::new(times, states, meta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftReport {
    pub max_norm_drift: f64,
    pub max_speed_drift: f64,
    pub max_angle_drift: f64,
    pub max_moment_drift: f64,
}

/// Per-sample deviations of the conserved quantities from their values at the first sample.
pub fn drift_series(
    traj: &Trajectory,
    generators: &[AntiHermitianGenerator],
) -> Result<Vec<DriftReport>> {
    let (z0, v0) = traj
        .states
        .first()
        .ok_or(Error::InsufficientData { needed: 1, found: 0 })?;
    let cos0 = z0.mul_i().dot(v0);
    let mu0: Vec<f64> = generators
        .iter()
        .map(|a| moment_map_unchecked(z0, v0, a, traj.meta.s))
        .collect();
    Ok(traj
        .states
        .iter()
        .map(|(z, v)| DriftReport {
            max_norm_drift: (z.norm() - 1.0).abs(),
            max_speed_drift: (v.norm() - 1.0).abs(),
            max_angle_drift: (z.mul_i().dot(v) - cos0).abs(),
            max_moment_drift: generators
                .iter()
                .zip(&mu0)
                .map(|(a, m)| (moment_map_unchecked(z, v, a, traj.meta.s) - m).abs())
                .fold(0.0, f64::max),
        })
        .collect())
}

pub fn drift_report(traj: &Trajectory, generators: &[AntiHermitianGenerator]) -> Result<DriftReport> {
    let series = drift_series(traj, generators)?;
    Ok(series.iter().fold(
        DriftReport {
            max_norm_drift: 0.0,
            max_speed_drift: 0.0,
            max_angle_drift: 0.0,
            max_moment_drift: 0.0,
        },
        |acc, d| DriftReport {
            max_norm_drift: acc.max_norm_drift.max(d.max_norm_drift),
            max_speed_drift: acc.max_speed_drift.max(d.max_speed_drift),
            max_angle_drift: acc.max_angle_drift.max(d.max_angle_drift),
            max_moment_drift: acc.max_moment_drift.max(d.max_moment_drift),
        },
    ))
}

/// Free-period action `∫ (½|γ̇|² − α_γ(γ̇) + k) dt` of a closed sampled loop (trapezoidal rule).
pub fn loop_action(times: &[f64], samples: &[(ComplexVector, ComplexVector)], k: f64) -> Result<f64> {
    if times.len() != samples.len() {
        return Err(Error::Consistency("times and samples differ in length".into()));
    }
    if samples.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            found: samples.len(),
        });
    }
    let gap = samples[0].0.distance(&samples[samples.len() - 1].0);
    if gap > 1e-8 {
        return Err(Error::Domain(format!("loop is not closed: gap {gap:e}")));
    }
    let integrand: Vec<f64> = samples
        .iter()
        .map(|(z, v)| 0.5 * v.norm_sqr() - 0.5 * z.mul_i().dot(v) + k)
        .collect();
    Ok(times
        .windows(2)
        .zip(integrand.windows(2))
        .map(|(t, f)| 0.5 * (t[1] - t[0]) * (f[0] + f[1]))
        .sum())
}

pub fn trajectory_action(traj: &Trajectory, k: f64) -> Result<f64> {
    loop_action(&traj.times, &traj.states, k)
}

/// Least-squares slope of `log(error)` against `log(step)`.
pub fn fit_order(steps: &[f64], errors: &[f64]) -> Result<f64> {
    if steps.len() != errors.len() {
        return Err(Error::Consistency("steps and errors differ in length".into()));
    }
    if steps.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            found: steps.len(),
        });
    }
    if steps.iter().chain(errors).any(|&x| !(x > 0.0)) {
        return Err(Error::Domain("steps and errors must be positive".into()));
    }
    let xs: Vec<f64> = steps.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// Endpoint error of [`integrate_ambient`] against an exact flow at several steps,
/// together with the fitted order.
pub fn convergence_study<F: Flow + ?Sized>(
    flow: &F,
    state: &UnitTangentState,
    t_end: f64,
    steps: &[f64],
) -> Result<(Vec<f64>, f64)> {
    let (exact, _) = flow.state_at(t_end);
    let mut errors = Vec::with_capacity(steps.len());
    for &h in steps {
        let traj = integrate_ambient(flow.strength(), state, t_end, h)?;
        let (_, (p, _)) = traj.last().expect("nonempty");
        errors.push(p.distance(&exact));
    }
    let order = fit_order(steps, &errors)?;
    Ok((errors, order))
}
