//! The two-point problem: which pairs `q₀, q₁ ∈ S^{2n+1}` are joined by a
//! unit-speed magnetic geodesic of strength `s`, and how to construct one.
//!
//! A geodesic with parameters `(s, ψ)` joins `γ(−T/2)` to `γ(T/2)` with
//!
//! ```text
//! ⟨γ(−T/2), γ(T/2)⟩ = e^{−isT/2} ( cos(|C|T) + i δ sin(|C|T) ),   δ = (s/2 − cos ψ)/|C|
//! ```
//!
//! so connecting `q₀` to `q₁` amounts to solving `chord(s, ψ, T) = ⟨q₀, q₁⟩` and
//! rebuilding an admissible pair from the endpoints.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::Serialize;

use crate::closed_form::{
    c_norm, delta, psi_max, reeb_orbit, AdmissiblePair, ClosedFormGeodesic, Flow, MagneticGeodesic,
    Orientation, RESONANCE_TOL,
};
use crate::geom::{check_on_sphere, energy_of_strength, ComplexVector};
use crate::{Error, Result, C64};

/// Tolerance for `|λ| = 1` and for `|λ| ≤ 1`.
pub const UNIT_TOL: f64 = 1e-12;
/// Tolerance for `|λ| = √(1 − 8k)`.
pub const BOUNDARY_TOL: f64 = 1e-10;
/// Tolerance for `k = 1/8`.
pub const CRITICAL_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CaseTag {
    Supercritical,
    CriticalConnectable,
    CriticalNull,
    SubInterior,
    SubBoundary,
    SubExterior,
    SameFiber,
}

impl CaseTag {
    /// Whether the energy/overlap combination admits connecting geodesics.
    pub fn is_connectable(self) -> bool {
        !matches!(self, CaseTag::CriticalNull | CaseTag::SubExterior)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::Supercritical => "Supercritical",
            CaseTag::CriticalConnectable => "CriticalConnectable",
            CaseTag::CriticalNull => "CriticalNull",
            CaseTag::SubInterior => "SubInterior",
            CaseTag::SubBoundary => "SubBoundary",
            CaseTag::SubExterior => "SubExterior",
            CaseTag::SameFiber => "SameFiber",
        }
    }
}

fn check_chord_params(s: f64, psi: f64) -> Result<f64> {
    let d = delta(s, psi)?;
    Ok(d)
}

/// `⟨γ(−T/2), γ(T/2)⟩` for any geodesic with parameters `(s, ψ)`.
pub fn chord(s: f64, psi: f64, t: f64) -> Result<C64> {
    let d = check_chord_params(s, psi)?;
    let c = c_norm(s, psi);
    Ok(chord_raw(s, c, d, t))
}

fn chord_raw(s: f64, c: f64, d: f64, t: f64) -> C64 {
    let (sn, cs) = (c * t).sin_cos();
    C64::from_polar(1.0, -0.5 * s * t) * C64::new(cs, d * sn)
}

/// The chord law with `+cos Arg C_s(ψ)` as imaginary coefficient in place of
/// `δ = −cos Arg C_s(ψ)`. It disagrees with actual geodesics and is kept only
/// to demonstrate that.
pub fn chord_with_cos_arg(s: f64, psi: f64, t: f64) -> Result<C64> {
    let d = check_chord_params(s, psi)?;
    Ok(chord_raw(s, c_norm(s, psi), -d, t))
}

/// `|chord|² = cos²(|C|T) + δ² sin²(|C|T)`.
pub fn chord_magnitude_sq(s: f64, psi: f64, t: f64) -> Result<f64> {
    let d = check_chord_params(s, psi)?;
    let (sn, cs) = (c_norm(s, psi) * t).sin_cos();
    Ok(cs * cs + d * d * sn * sn)
}

/// Case of the two-point problem at energy `k` for `λ = ⟨q₀, q₁⟩`.
///
/// `k = ∞` (strength 0) is accepted and is supercritical.
pub fn classify(k: f64, lambda: C64) -> Result<CaseTag> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("energy must be positive, got {k}")));
    }
    let l = lambda.norm();
    if !l.is_finite() || l > 1.0 + UNIT_TOL {
        return Err(Error::Domain(format!(
            "|lambda| = {l} exceeds 1; not a product of unit vectors"
        )));
    }
    if (l - 1.0).abs() <= UNIT_TOL {
        return Ok(CaseTag::SameFiber);
    }
    if (k - 0.125).abs() <= CRITICAL_TOL {
        return Ok(if l == 0.0 {
            CaseTag::CriticalNull
        } else {
            CaseTag::CriticalConnectable
        });
    }
    if k > 0.125 {
        return Ok(CaseTag::Supercritical);
    }
    let threshold = (1.0 - 8.0 * k).sqrt();
    Ok(if (l - threshold).abs() <= BOUNDARY_TOL {
        CaseTag::SubBoundary
    } else if l > threshold {
        CaseTag::SubInterior
    } else {
        CaseTag::SubExterior
    })
}

/// `√(1 − 8k)`, the overlap threshold below the critical energy.
pub fn overlap_threshold(k: f64) -> Option<f64> {
    (k < 0.125).then(|| (1.0 - 8.0 * k).sqrt())
}

/// The reachable overlaps on the boundary `|λ| = √(1 − 4/s²)` for `s > 2`:
/// `{ radius · e^{i(a + m b)} : m ∈ Z }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryLattice {
    pub s: f64,
    pub radius: f64,
    pub a: f64,
    /// Negative for every `s > 2`.
    pub b: f64,
}

impl BoundaryLattice {
    pub fn point(&self, m: i64) -> C64 {
        C64::from_polar(self.radius, self.a + m as f64 * self.b)
    }

    /// `|b|`; the lattice is the same set for `±b`.
    pub fn step(&self) -> f64 {
        self.b.abs()
    }

    /// Smallest `|e^{iφ} − e^{i(a + m b)}|` times the radius over `|m| ≤ m_bound`.
    pub fn distance(&self, lambda: C64, m_bound: i64) -> f64 {
        (-m_bound..=m_bound)
            .map(|m| (self.point(m) - lambda).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// The constants `a_s, b_s` of the boundary lattice.
///
/// With `c* = |C_s(ψ_max)| = √(s²/4 − 1)`: `b = π(1 − s/(2c*))` and `a = b/2`.
pub fn boundary_phases(s: f64) -> Result<BoundaryLattice> {
    if !(s > 2.0) || !s.is_finite() {
        return Err(Error::Domain(format!("boundary lattice requires s > 2, got {s}")));
    }
    let cstar = (0.25 * s * s - 1.0).sqrt();
    let b = PI * (1.0 - s / (2.0 * cstar));
    Ok(BoundaryLattice {
        s,
        radius: (1.0 - 4.0 / (s * s)).sqrt(),
        a: 0.5 * b,
        b,
    })
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    // f(lo) <= 0 <= f(hi), possibly with lo > hi
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi || (hi - lo).abs() < 1e-15 {
            break;
        }
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `{ψ ∈ [0, π] : |δ(s, ψ)| ≤ λ_abs}`, which is a closed interval or empty.
pub fn feasible_interval(s: f64, lambda_abs: f64) -> Result<Option<(f64, f64)>> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!("strength must be >= 0, got {s}")));
    }
    if !(0.0..=1.0).contains(&lambda_abs) {
        return Err(Error::Domain(format!("|lambda| = {lambda_abs} outside [0, 1]")));
    }
    let l = lambda_abs;
    let d = |psi: f64| (0.5 * s - psi.cos()) / c_norm(s, psi);
    if s < 2.0 {
        // δ increases from −1 to 1
        let lo = bisect(0.0, PI, |p| d(p) + l);
        let hi = bisect(0.0, PI, |p| d(p) - l);
        return Ok(Some((lo, hi)));
    }
    if s == 2.0 {
        // δ = sin(ψ/2)
        return Ok(Some((0.0, 2.0 * l.min(1.0).asin())));
    }
    let pm = psi_max(s)?;
    let dmin = (1.0 - 4.0 / (s * s)).sqrt();
    if (l - dmin).abs() <= BOUNDARY_TOL {
        return Ok(Some((pm, pm)));
    }
    if l < dmin {
        return Ok(None);
    }
    // δ decreases on [0, ψ_max] and increases on [ψ_max, π]
    let lo = bisect(pm, 0.0, |p| d(p) - l);
    let hi = bisect(pm, PI, |p| d(p) - l);
    Ok(Some((lo, hi)))
}

/// `T ≥ 0` with `|chord(s, ψ, T)| = λ_abs`, shifted by `m` periods of `cos(|C|T)`.
pub fn time_candidate(s: f64, psi: f64, lambda_abs: f64, m: i64) -> Result<f64> {
    let d = delta(s, psi)?;
    if d * d >= 1.0 {
        return Err(Error::Domain(format!(
            "degenerate width at psi = {psi}: delta^2 = 1"
        )));
    }
    if d * d > lambda_abs * lambda_abs + 1e-12 {
        return Err(Error::Domain(format!(
            "psi = {psi} is not feasible for |lambda| = {lambda_abs}"
        )));
    }
    let c = c_norm(s, psi);
    let ratio = ((lambda_abs * lambda_abs - d * d) / (1.0 - d * d)).clamp(0.0, 1.0);
    Ok((ratio.sqrt().acos() + TAU * m as f64) / c)
}

/// Deterministic unit vector complex-orthogonal to the unit vector `p`.
fn orthogonal_seed(p: &ComplexVector) -> ComplexVector {
    let mut best: Option<ComplexVector> = None;
    for k in 0..p.len() {
        let e = ComplexVector::basis(p.len(), k);
        let r = e.axpy(-e.herm(p), p);
        if best.as_ref().is_none_or(|b| r.norm() > b.norm()) {
            best = Some(r);
        }
    }
    best.and_then(|b| b.normalized().ok())
        .unwrap_or_else(|| ComplexVector::zeros(p.len()))
}

/// Admissible pair whose geodesic with parameters `(s, ψ)` passes through
/// `q₀` at `t = −T/2` and through `q₁` at `t = T/2`.
pub fn pair_from_endpoints(
    s: f64,
    psi: f64,
    t: f64,
    q0: &ComplexVector,
    q1: &ComplexVector,
) -> Result<AdmissiblePair> {
    if q0.len() != q1.len() {
        return Err(Error::Dimension {
            expected: q0.len(),
            found: q1.len(),
        });
    }
    check_on_sphere(q0, 1e-10)?;
    check_on_sphere(q1, 1e-10)?;
    let d = delta(s, psi)?;
    let c = c_norm(s, psi);
    let lambda = q0.herm(q1);
    let residual = (chord_raw(s, c, d, t) - lambda).norm();
    if residual > 1e-8 {
        return Err(Error::InconsistentEndpoints { residual });
    }
    // p₀ = x + y,  p₁ = cos(|C|T) p₀ − i sin(|C|T) (x − y),
    // with x = e^{i|C|T/2} w₀, y = e^{−i|C|T/2} w₁ and e := x − y
    // satisfying |e| = 1, ⟨p₀, e⟩ = δ.
    let p0 = q0.scale(C64::from_polar(1.0, 0.25 * s * t));
    let p1 = q1.scale(C64::from_polar(1.0, -0.25 * s * t));
    let (sn, cs) = (c * t).sin_cos();
    let perp_norm = (1.0 - d * d).max(0.0).sqrt();
    let mut direction = None;
    if sn.abs() > 1e-8 && perp_norm > 0.0 {
        let e = p0.scale_real(cs).axpy(C64::new(-1.0, 0.0), &p1).scale(C64::new(0.0, -1.0 / sn));
        let perp = e.axpy(-e.herm(&p0), &p0);
        let r = perp.norm();
        if r > 0.5 * perp_norm && r < 2.0 * perp_norm {
            direction = Some(perp.scale_real(1.0 / r));
        }
    }
    let n = direction.unwrap_or_else(|| orthogonal_seed(&p0));
    let e = p0.scale_real(d).axpy(C64::new(perp_norm, 0.0), &n);
    let x = (&p0 + &e).scale_real(0.5);
    let y = (&p0 - &e).scale_real(0.5);
    let w0 = x.scale(C64::from_polar(1.0, -0.5 * c * t));
    let w1 = y.scale(C64::from_polar(1.0, 0.5 * c * t));
    AdmissiblePair::with_tolerance(w0, w1, 1e-10)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Largest period shift searched.
    pub m_bound: i64,
    pub max_solutions: usize,
    /// Initial number of ψ cells per branch.
    pub initial_cells: usize,
    /// Limit on the recursive cell splitting.
    pub max_depth: u32,
    /// Endpoint residual required of every returned solution.
    pub residual_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            m_bound: 64,
            max_solutions: 8,
            initial_cells: 64,
            max_depth: 18,
            residual_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectionSolution {
    pub psi: f64,
    /// Travel time; the geodesic passes `q₀` at `−T/2` and `q₁` at `T/2`.
    pub t: f64,
    pub m: i64,
    /// Sign of `T`, `±1` (`0` for `T = 0`).
    pub t_sign: i8,
    pub endpoint_residual: f64,
    #[serde(skip)]
    pub geodesic: MagneticGeodesic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectivityVerdict {
    pub case_tag: CaseTag,
    pub s: f64,
    pub k: f64,
    pub lambda: C64,
    pub threshold: Option<f64>,
    pub solutions: Vec<ConnectionSolution>,
    pub boundary_lattice: Option<BoundaryLattice>,
    /// Distance from `λ` to the boundary lattice, for boundary cases.
    pub lattice_distance: Option<f64>,
}

impl ConnectivityVerdict {
    pub fn is_connectable(&self) -> bool {
        !self.solutions.is_empty()
    }
}

fn verify(
    s: f64,
    psi: f64,
    t: f64,
    m: i64,
    q0: &ComplexVector,
    q1: &ComplexVector,
    tol: f64,
) -> Option<ConnectionSolution> {
    let pair = pair_from_endpoints(s, psi, t, q0, q1).ok()?;
    let g = ClosedFormGeodesic::from_pair(s, psi, pair).ok()?;
    finish(MagneticGeodesic::Torus(g), psi, t, m, q0, q1, tol)
}

fn finish(
    geodesic: MagneticGeodesic,
    psi: f64,
    t: f64,
    m: i64,
    q0: &ComplexVector,
    q1: &ComplexVector,
    tol: f64,
) -> Option<ConnectionSolution> {
    let (a, _) = geodesic.state_at(-0.5 * t);
    let (b, _) = geodesic.state_at(0.5 * t);
    let endpoint_residual = a.distance(q0).max(b.distance(q1));
    (endpoint_residual <= tol).then_some(ConnectionSolution {
        psi,
        t,
        m,
        t_sign: if t > 0.0 {
            1
        } else if t < 0.0 {
            -1
        } else {
            0
        },
        endpoint_residual,
        geodesic,
    })
}

fn wrap(x: f64) -> f64 {
    let mut y = x.rem_euclid(TAU);
    if y > PI {
        y -= TAU;
    }
    y
}

/// Solution search for one period shift `m` and one of the four branches of
/// `sin²(|C|T) = (1 − |λ|²)/(1 − δ²)`.
struct Branch<'a> {
    s: f64,
    lambda: C64,
    l: f64,
    branch: u8,
    m: i64,
    q0: &'a ComplexVector,
    q1: &'a ComplexVector,
}

impl Branch<'_> {
    /// `(c, δ, u)` at `ψ`, with `u = |C| T`.
    fn params(&self, psi: f64) -> (f64, f64, f64) {
        let c = c_norm(self.s, psi);
        let d = ((0.5 * self.s - psi.cos()) / c).clamp(-1.0, 1.0);
        let ratio = ((1.0 - self.l * self.l) / (1.0 - d * d).max(1e-300)).clamp(0.0, 1.0);
        let u0 = ratio.sqrt().asin();
        let base = match self.branch {
            0 => u0,
            1 => PI - u0,
            2 => PI + u0,
            _ => TAU - u0,
        };
        (c, d, base + TAU * self.m as f64)
    }

    fn time(&self, psi: f64) -> f64 {
        let (c, _, u) = self.params(psi);
        u / c
    }

    /// Wrapped phase mismatch `arg chord − arg λ`.
    fn mismatch(&self, psi: f64) -> f64 {
        let (c, d, u) = self.params(psi);
        let ch = chord_raw(self.s, c, d, u / c);
        wrap(ch.arg() - self.lambda.arg())
    }

    fn polish(&self, psi: f64, t: f64) -> (f64, f64) {
        let (s, lambda) = (self.s, self.lambda);
        let residual = |p: f64, t: f64| {
            let c = c_norm(s, p);
            chord_raw(s, c, (0.5 * s - p.cos()) / c, t) - lambda
        };
        let (mut p, mut t) = (psi, t);
        let mut r = residual(p, t);
        for _ in 0..6 {
            if r.norm() < 1e-15 {
                break;
            }
            let c = c_norm(s, p);
            let d = (0.5 * s - p.cos()) / c;
            let dc = s * p.sin() / (2.0 * c);
            let dd = p.sin() / c - (0.5 * s - p.cos()) * dc / (c * c);
            let ph = C64::from_polar(1.0, -0.5 * s * t);
            let (sn, cs) = (c * t).sin_cos();
            let g = C64::new(cs, d * sn);
            let dg = C64::new(-sn, d * cs);
            let d_t = ph * (C64::new(0.0, -0.5 * s) * g + dg * c);
            let d_p = ph * (dg * (dc * t) + C64::new(0.0, dd * sn));
            let det = d_p.re * d_t.im - d_t.re * d_p.im;
            if det.abs() < 1e-300 {
                break;
            }
            let step_p = (-r.re * d_t.im + r.im * d_t.re) / det;
            let step_t = (-d_p.re * r.im + d_p.im * r.re) / det;
            let (np, nt) = ((p + step_p).clamp(0.0, PI), t + step_t);
            let nr = residual(np, nt);
            if nr.norm() >= r.norm() {
                break;
            }
            p = np;
            t = nt;
            r = nr;
        }
        (p, t)
    }

    fn root(&self, a: f64, ha: f64, b: f64) -> (f64, f64) {
        let sign_a = ha <= 0.0;
        let mut lo = a;
        let mut hi = b;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if (self.mismatch(mid) <= 0.0) == sign_a {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let psi = 0.5 * (lo + hi);
        self.polish(psi, self.time(psi))
    }

    fn scan(&self, lo: f64, hi: f64, cfg: &SolverConfig, out: &mut Vec<ConnectionSolution>) {
        let n = cfg.initial_cells * (1 + self.m.unsigned_abs() as usize);
        let mut prev = (lo, self.mismatch(lo));
        for k in 1..=n {
            let x = lo + (hi - lo) * k as f64 / n as f64;
            let cur = (x, self.mismatch(x));
            self.cell(prev, cur, 0, cfg, out);
            if out.len() >= cfg.max_solutions {
                return;
            }
            prev = cur;
        }
    }

    fn cell(
        &self,
        (a, ha): (f64, f64),
        (b, hb): (f64, f64),
        depth: u32,
        cfg: &SolverConfig,
        out: &mut Vec<ConnectionSolution>,
    ) {
        if out.len() >= cfg.max_solutions {
            return;
        }
        if wrap(hb - ha).abs() > FRAC_PI_2 / 2.0 && depth < cfg.max_depth {
            let mid = 0.5 * (a + b);
            let hm = self.mismatch(mid);
            self.cell((a, ha), (mid, hm), depth + 1, cfg, out);
            self.cell((mid, hm), (b, hb), depth + 1, cfg, out);
            return;
        }
        let brackets = (ha <= 0.0) != (hb <= 0.0) && (ha - hb).abs() < PI;
        if !brackets {
            return;
        }
        let (psi, t) = self.root(a, ha, b);
        if let Some(sol) = verify(self.s, psi, t, self.m, self.q0, self.q1, cfg.residual_tol) {
            let dup = out
                .iter()
                .any(|o| (o.psi - sol.psi).abs() < 1e-9 && (o.t - sol.t).abs() < 1e-9);
            if !dup {
                out.push(sol);
            }
        }
    }
}

fn sort_solutions(sols: &mut Vec<ConnectionSolution>, cap: usize) {
    sols.sort_by(|a, b| {
        (a.m.abs(), a.t.abs())
            .partial_cmp(&(b.m.abs(), b.t.abs()))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    sols.truncate(cap);
}

fn same_fiber_solutions(
    s: f64,
    lambda: C64,
    q0: &ComplexVector,
    q1: &ComplexVector,
    cfg: &SolverConfig,
) -> Result<Vec<ConnectionSolution>> {
    let mut out = Vec::new();
    let phase = lambda.arg();
    for m in [0i64, -1, 1] {
        for (orientation, psi, t) in [
            (Orientation::Positive, 0.0, -phase + TAU * m as f64),
            (Orientation::Negative, PI, phase + TAU * m as f64),
        ] {
            let sign = orientation.sign();
            let mid = q0.scale(C64::from_polar(1.0, 0.5 * sign * t));
            let orbit = reeb_orbit(&mid.normalized()?, orientation)?.with_strength(s);
            if let Some(sol) = finish(MagneticGeodesic::Reeb(orbit), psi, t, m, q0, q1, cfg.residual_tol) {
                out.push(sol);
            }
        }
    }
    sort_solutions(&mut out, cfg.max_solutions);
    Ok(out)
}

/// Decides whether `q₀` and `q₁` are joined by a magnetic geodesic of strength
/// `s` and returns a verified sample of connecting geodesics.
pub fn solve_connection(
    s: f64,
    q0: &ComplexVector,
    q1: &ComplexVector,
    cfg: &SolverConfig,
) -> Result<ConnectivityVerdict> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!("strength must be >= 0, got {s}")));
    }
    if q0.len() != q1.len() {
        return Err(Error::Dimension {
            expected: q0.len(),
            found: q1.len(),
        });
    }
    check_on_sphere(q0, 1e-10)?;
    check_on_sphere(q1, 1e-10)?;
    let k = energy_of_strength(s);
    let lambda = q0.herm(q1);
    let l = lambda.norm().min(1.0);
    let case_tag = classify(k, lambda)?;
    let mut verdict = ConnectivityVerdict {
        case_tag,
        s,
        k,
        lambda,
        threshold: overlap_threshold(k),
        solutions: Vec::new(),
        boundary_lattice: None,
        lattice_distance: None,
    };
    let tol = cfg.residual_tol;
    match case_tag {
        CaseTag::CriticalNull | CaseTag::SubExterior => return Ok(verdict),
        CaseTag::SameFiber => {
            verdict.solutions = same_fiber_solutions(s, lambda, q0, q1, cfg)?;
        }
        CaseTag::SubBoundary => {
            let lattice = boundary_phases(s)?;
            verdict.boundary_lattice = Some(lattice);
            verdict.lattice_distance = Some(lattice.distance(lambda, cfg.m_bound));
            let pm = psi_max(s)?;
            let c = c_norm(s, pm);
            let mut out = Vec::new();
            for j in -cfg.m_bound..=cfg.m_bound {
                let t = (FRAC_PI_2 + PI * j as f64) / c;
                if let Some(sol) = verify(s, pm, t, j.div_euclid(2), q0, q1, tol) {
                    out.push(sol);
                }
            }
            sort_solutions(&mut out, cfg.max_solutions);
            verdict.solutions = out;
            return Ok(verdict);
        }
        _ if l == 0.0 => {
            // only s < 2 reaches here: δ = 0 at cos ψ = s/2
            let psi = (0.5 * s).acos();
            let c = c_norm(s, psi);
            let mut out = Vec::new();
            for h in [0i64, -1, 1, -2] {
                let t = (FRAC_PI_2 + PI * h as f64) / c;
                if let Some(sol) = verify(s, psi, t, h.div_euclid(2), q0, q1, tol) {
                    out.push(sol);
                }
            }
            sort_solutions(&mut out, cfg.max_solutions);
            verdict.solutions = out;
        }
        _ => {
            let (lo, hi) = feasible_interval(s, l)?.ok_or(Error::SolverExhausted {
                m_bound: cfg.m_bound,
            })?;
            let (lo, hi) = inset(s, lo, hi);
            let mut out = Vec::new();
            'levels: for level in 0..=cfg.m_bound {
                let ms: &[i64] = if level == 0 { &[0] } else { &[-level, level] };
                for &m in ms {
                    for branch in 0..4u8 {
                        let b = Branch {
                            s,
                            lambda,
                            l,
                            branch,
                            m,
                            q0,
                            q1,
                        };
                        b.scan(lo, hi, cfg, &mut out);
                        if out.len() >= cfg.max_solutions {
                            break 'levels;
                        }
                    }
                }
                if !out.is_empty() {
                    break;
                }
            }
            sort_solutions(&mut out, cfg.max_solutions);
            verdict.solutions = out;
        }
    }
    if verdict.solutions.is_empty() {
        return Err(Error::SolverExhausted { m_bound: cfg.m_bound });
    }
    Ok(verdict)
}

/// Moves the ends of the feasible interval away from `|C| ≈ 0` and from
/// `δ² = 1`.
fn inset(s: f64, lo: f64, hi: f64) -> (f64, f64) {
    let width = hi - lo;
    let mut a = lo;
    if c_norm(s, a) < 1e-2 {
        // |C| increases with ψ
        let target = bisect(a, hi, |p| c_norm(s, p) - 1e-2);
        a = target.min(lo + 0.5 * width);
        if c_norm(s, a) < RESONANCE_TOL {
            a = lo + 0.5 * width;
        }
    }
    let pad = 1e-13 * width.max(1e-300);
    (a + pad, hi - pad)
}

/// `q₁ = conj(λ) q₀ + √(1 − |λ|²) h` for a unit `h ⊥_C q₀`, so that `⟨q₀, q₁⟩ = λ`.
pub fn endpoint_with_overlap(q0: &ComplexVector, h: &ComplexVector, lambda: C64) -> Result<ComplexVector> {
    check_on_sphere(q0, 1e-10)?;
    let hp = h.axpy(-h.herm(q0), q0).normalized()?;
    let r = (1.0 - lambda.norm_sqr()).max(0.0).sqrt();
    q0.scale(lambda.conj()).axpy(C64::new(r, 0.0), &hp).normalized()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::torus_data;
    use crate::sampling::{random_contact_vector, random_state, random_unit_vector, rng_from_seed};
    use rand::Rng;

    fn cv(parts: &[f64]) -> ComplexVector {
        ComplexVector::from_re_im(parts).unwrap()
    }

    #[test]
    fn chord_examples() {
        for &(s, psi) in &[(0.0, 0.3), (1.0, 1.0), (3.0, 2.0)] {
            assert!((chord(s, psi, 0.0).unwrap() - 1.0).norm() < 1e-15);
        }
        for &t in &[0.3, 1.0, -2.0, 7.5] {
            assert!((chord(1.0, 0.0, t).unwrap() - C64::from_polar(1.0, -t)).norm() < 1e-14);
        }
        assert!((chord(0.0, FRAC_PI_2, PI).unwrap() + 1.0).norm() < 1e-15);
        assert_eq!(chord(2.0, 0.0, 1.0), Err(Error::DegenerateResonance));
    }

    #[test]
    fn chord_matches_geodesic_endpoints() {
        let mut rng = rng_from_seed(31);
        for _ in 0..100 {
            let s = 5.0 * rng.random::<f64>();
            let st = random_state(&mut rng, 2);
            let g = torus_data(s, &st).unwrap();
            let t = 20.0 * rng.random::<f64>() - 10.0;
            let (a, _) = g.evaluate(-0.5 * t);
            let (b, _) = g.evaluate(0.5 * t);
            let ch = chord(s, st.psi(), t).unwrap();
            assert!((a.herm(&b) - ch).norm() < 1e-10);
        }
        let e = (chord(1.0, 0.3, 1.0).unwrap() - chord_with_cos_arg(1.0, 0.3, 1.0).unwrap()).norm();
        assert!(e > 1e-2);
    }

    #[test]
    fn magnitude_examples() {
        for k in 0..50 {
            let t = 0.2 * k as f64;
            let m = chord_magnitude_sq(2.0, 1.0, t).unwrap();
            assert!(m >= (0.5f64).sin().powi(2) - 1e-15);
            assert!((m - chord(2.0, 1.0, t).unwrap().norm_sqr()).abs() < 1e-14);
        }
        let psi: f64 = 0.6f64.acos();
        let c = c_norm(1.2, psi);
        assert!(chord_magnitude_sq(1.2, psi, FRAC_PI_2 / c).unwrap() < 1e-28);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(0.2, C64::new(0.0, 0.0)).unwrap(), CaseTag::Supercritical);
        assert_eq!(classify(0.125, C64::new(0.0, 0.0)).unwrap(), CaseTag::CriticalNull);
        assert_eq!(classify(0.125, C64::new(0.0, 0.3)).unwrap(), CaseTag::CriticalConnectable);
        assert_eq!(classify(1.0 / 18.0, C64::new(0.5, 0.0)).unwrap(), CaseTag::SubExterior);
        assert_eq!(classify(1.0 / 18.0, C64::new(0.8, 0.0)).unwrap(), CaseTag::SubInterior);
        let r = 5f64.sqrt() / 3.0;
        assert_eq!(classify(1.0 / 18.0, C64::from_polar(r, 1.0)).unwrap(), CaseTag::SubBoundary);
        assert_eq!(classify(1.0 / 18.0, C64::from_polar(1.0, 1.0)).unwrap(), CaseTag::SameFiber);
        assert_eq!(classify(f64::INFINITY, C64::new(0.1, 0.0)).unwrap(), CaseTag::Supercritical);
        assert!(classify(0.1, C64::new(1.1, 0.0)).is_err());
        assert!(classify(0.0, C64::new(0.1, 0.0)).is_err());
    }

    #[test]
    fn boundary_phase_values() {
        let b = boundary_phases(3.0).unwrap();
        assert!((b.radius - 5f64.sqrt() / 3.0).abs() < 1e-15);
        assert!((b.b - PI * (1.0 - 3.0 / 5f64.sqrt())).abs() < 1e-15);
        assert!((b.b + 1.0732961850).abs() < 1e-9);
        assert!((b.a + 0.5366480925).abs() < 1e-9);
        assert!(boundary_phases(1e6).unwrap().b < 0.0);
        assert!(boundary_phases(1e6).unwrap().b > -1e-11);
        assert!(boundary_phases(2.0).is_err());
        // the lattice is symmetric under λ ↦ conj(λ)
        for m in -5..5 {
            assert!(b.distance(b.point(m).conj(), 64) < 1e-12);
        }
    }

    #[test]
    fn boundary_lattice_is_what_geodesics_reach() {
        for &s in &[2.5, 3.0, 6.0] {
            let lat = boundary_phases(s).unwrap();
            let pm = psi_max(s).unwrap();
            let c = c_norm(s, pm);
            for j in -6..=6 {
                let t = (FRAC_PI_2 + PI * j as f64) / c;
                let ch = chord(s, pm, t).unwrap();
                assert!((ch.norm() - lat.radius).abs() < 1e-12);
                assert!(lat.distance(ch, 64) < 1e-10, "s={s} j={j}");
            }
        }
    }

    #[test]
    fn feasible_interval_examples() {
        for &s in &[0.0, 0.5, 1.5, 1.99] {
            for &l in &[0.01, 0.3, 0.9] {
                let (lo, hi) = feasible_interval(s, l).unwrap().unwrap();
                let star = (0.5 * s).acos();
                assert!(lo <= star && star <= hi);
                assert!((delta(s, lo).unwrap() + l).abs() < 1e-10);
                assert!((delta(s, hi).unwrap() - l).abs() < 1e-10);
            }
        }
        let r = 5f64.sqrt() / 3.0;
        let (lo, hi) = feasible_interval(3.0, r).unwrap().unwrap();
        assert_eq!(lo, hi);
        assert!((lo - psi_max(3.0).unwrap()).abs() < 1e-15);
        assert_eq!(feasible_interval(3.0, 0.5).unwrap(), None);
        let (lo, hi) = feasible_interval(3.0, 0.9).unwrap().unwrap();
        assert!(lo < psi_max(3.0).unwrap() && hi > psi_max(3.0).unwrap());
        assert!((delta(3.0, lo).unwrap() - 0.9).abs() < 1e-10);
        assert!((delta(3.0, hi).unwrap() - 0.9).abs() < 1e-10);
        let (lo, hi) = feasible_interval(2.0, 0.5).unwrap().unwrap();
        assert_eq!(lo, 0.0);
        assert!((hi - 2.0 * 0.5f64.asin()).abs() < 1e-15);
    }

    #[test]
    fn time_candidate_examples() {
        let mut rng = rng_from_seed(32);
        for _ in 0..50 {
            let s = 4.0 * rng.random::<f64>();
            let l = 0.05 + 0.9 * rng.random::<f64>();
            let Some((lo, hi)) = feasible_interval(s, l).unwrap() else { continue };
            let psi = lo + (hi - lo) * rng.random::<f64>();
            if c_norm(s, psi) < 1e-3 {
                continue;
            }
            for m in 0..3 {
                let t = time_candidate(s, psi, l, m).unwrap();
                assert!((chord(s, psi, t).unwrap().norm() - l).abs() < 1e-10);
            }
        }
        let psi = 1.0;
        let d = delta(1.0, psi).unwrap().abs();
        let c = c_norm(1.0, psi);
        assert!((time_candidate(1.0, psi, d, 0).unwrap() - FRAC_PI_2 / c).abs() < 1e-12);
        assert!((time_candidate(1.0, psi, 1.0, 2).unwrap() - 2.0 * TAU / c).abs() < 1e-12);
        assert!(time_candidate(1.0, 0.0, 1.0, 0).is_err());
    }

    #[test]
    fn pair_reconstruction_round_trip() {
        let mut rng = rng_from_seed(33);
        for _ in 0..100 {
            let s = 5.0 * rng.random::<f64>();
            let n = 1 + rng.random_range(0..3usize);
            let st = random_state(&mut rng, n);
            let g = torus_data(s, &st).unwrap();
            let t = 20.0 * rng.random::<f64>() - 10.0;
            let (q0, _) = g.evaluate(-0.5 * t);
            let (q1, _) = g.evaluate(0.5 * t);
            let pair = pair_from_endpoints(s, st.psi(), t, &q0, &q1).unwrap();
            let h = ClosedFormGeodesic::from_pair(s, st.psi(), pair).unwrap();
            assert!(h.evaluate(-0.5 * t).0.distance(&q0) < 1e-9);
            assert!(h.evaluate(0.5 * t).0.distance(&q1) < 1e-9);
        }
    }

    #[test]
    fn pair_reconstruction_at_full_period() {
        let z = cv(&[1.0, 0.0, 0.0, 0.0]);
        let s = 1.0;
        let psi = 1.2;
        let c = c_norm(s, psi);
        let t = TAU / c;
        let q1 = z.scale(C64::from_polar(1.0, 0.5 * s * t));
        let pair = pair_from_endpoints(s, psi, t, &z, &q1).unwrap();
        let g = ClosedFormGeodesic::from_pair(s, psi, pair).unwrap();
        assert!(g.evaluate(-0.5 * t).0.distance(&z) < 1e-12);
        assert!(g.evaluate(0.5 * t).0.distance(&q1) < 1e-12);
        // inconsistent target
        let bad = cv(&[0.0, 0.0, 1.0, 0.0]);
        assert!(matches!(
            pair_from_endpoints(s, psi, t, &z, &bad),
            Err(Error::InconsistentEndpoints { .. })
        ));
    }

    #[test]
    fn solver_supercritical() {
        let mut rng = rng_from_seed(34);
        for _ in 0..20 {
            let q0 = random_unit_vector(&mut rng, 2);
            let q1 = random_unit_vector(&mut rng, 2);
            let v = solve_connection(1.5, &q0, &q1, &SolverConfig::default()).unwrap();
            assert_eq!(v.case_tag, CaseTag::Supercritical);
            assert!(!v.solutions.is_empty());
            for sol in &v.solutions {
                assert!(sol.endpoint_residual <= 1e-8);
            }
        }
    }

    #[test]
    fn solver_critical_and_subcritical() {
        let e1 = cv(&[1.0, 0.0, 0.0, 0.0]);
        let e2 = cv(&[0.0, 0.0, 1.0, 0.0]);
        let v = solve_connection(2.0, &e1, &e2, &SolverConfig::default()).unwrap();
        assert_eq!(v.case_tag, CaseTag::CriticalNull);
        assert!(v.solutions.is_empty());

        let mut rng = rng_from_seed(35);
        for _ in 0..10 {
            let q0 = random_unit_vector(&mut rng, 2);
            let h = random_contact_vector(&mut rng, &q0);
            let lam = C64::from_polar(0.2 + 0.7 * rng.random::<f64>(), TAU * rng.random::<f64>());
            let q1 = endpoint_with_overlap(&q0, &h, lam).unwrap();
            let v = solve_connection(2.0, &q0, &q1, &SolverConfig::default()).unwrap();
            assert_eq!(v.case_tag, CaseTag::CriticalConnectable);
            assert!(!v.solutions.is_empty());
        }

        let q1 = endpoint_with_overlap(&e1, &e2, C64::new(0.5, 0.0)).unwrap();
        let v = solve_connection(3.0, &e1, &q1, &SolverConfig::default()).unwrap();
        assert_eq!(v.case_tag, CaseTag::SubExterior);
        let q1 = endpoint_with_overlap(&e1, &e2, C64::from_polar(0.9, 2.0)).unwrap();
        let v = solve_connection(3.0, &e1, &q1, &SolverConfig::default()).unwrap();
        assert_eq!(v.case_tag, CaseTag::SubInterior);
        assert!(!v.solutions.is_empty());
    }

    #[test]
    fn solver_boundary() {
        let e1 = cv(&[1.0, 0.0, 0.0, 0.0]);
        let e2 = cv(&[0.0, 0.0, 1.0, 0.0]);
        let lat = boundary_phases(3.0).unwrap();
        for m in -2..=2 {
            let q1 = endpoint_with_overlap(&e1, &e2, lat.point(m)).unwrap();
            let v = solve_connection(3.0, &e1, &q1, &SolverConfig::default()).unwrap();
            assert_eq!(v.case_tag, CaseTag::SubBoundary);
            assert!(!v.solutions.is_empty());
            assert!(v.lattice_distance.unwrap() < 1e-12);
        }
        let off = C64::from_polar(lat.radius, lat.a + 0.5 * lat.b);
        let q1 = endpoint_with_overlap(&e1, &e2, off).unwrap();
        let v = solve_connection(3.0, &e1, &q1, &SolverConfig::default()).unwrap();
        assert_eq!(v.case_tag, CaseTag::SubBoundary);
        assert!(v.solutions.is_empty());
        assert!(v.lattice_distance.unwrap() > 1e-3);
    }

    #[test]
    fn solver_special_cases() {
        let e1 = cv(&[1.0, 0.0, 0.0, 0.0]);
        let e2 = cv(&[0.0, 0.0, 1.0, 0.0]);
        for &s in &[0.0, 1.0, 1.9] {
            let v = solve_connection(s, &e1, &e2, &SolverConfig::default()).unwrap();
            assert_eq!(v.case_tag, CaseTag::Supercritical);
            assert!(!v.solutions.is_empty());
        }
        let q1 = e1.scale(C64::from_polar(1.0, 0.7));
        for &s in &[0.5, 2.0, 3.0] {
            let v = solve_connection(s, &e1, &q1, &SolverConfig::default()).unwrap();
            assert_eq!(v.case_tag, CaseTag::SameFiber);
            assert!(v.solutions.iter().any(|x| x.psi == 0.0 && (x.t - 0.7).abs() < 1e-12));
        }
    }
}
