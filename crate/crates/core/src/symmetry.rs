//! Magnetomorphisms of `(S^{2n+1}, g, dα)`, the moment map of the `U(n+1)`
//! action, and totally magnetic linear sections `V ∩ S^{2n+1}`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::closed_form::{ClosedFormGeodesic, MagneticGeodesic, ReebOrbit};
use crate::geom::{lorentz_unchecked, ComplexVector, UnitTangentState};
use crate::oracle::{integrate_intrinsic, Trajectory};
use crate::sampling::{derived_rng, gaussian_vector};
use crate::{Error, Result, C64};

const UNITARY_TOL: f64 = 1e-10;
const GENERATOR_TOL: f64 = 1e-12;
const SPAN_TOL: f64 = 1e-10;

/// A linear map offered as a symmetry: either complex-linear, or real-linear
/// on the coordinates of [`ComplexVector::to_real`].
#[derive(Debug, Clone, PartialEq)]
pub enum UnitaryCandidate {
    Complex(DMatrix<C64>),
    RealLinear(DMatrix<f64>),
}

fn max_abs_c(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn max_abs_r(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|c| c.abs()).fold(0.0, f64::max)
}

/// Multiplication by `i` in real coordinates.
fn real_j(dim: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * dim, 2 * dim);
    for k in 0..dim {
        j[(k, dim + k)] = -1.0;
        j[(dim + k, k)] = 1.0;
    }
    j
}

impl UnitaryCandidate {
    /// Complex conjugation `z ↦ z̄`, an isometry that is not complex-linear.
    pub fn conjugation(dim: usize) -> Self {
        let mut m = DMatrix::zeros(2 * dim, 2 * dim);
        for k in 0..dim {
            m[(k, k)] = 1.0;
            m[(dim + k, dim + k)] = -1.0;
        }
        Self::RealLinear(m)
    }

    /// Complex dimension of the space the candidate acts on.
    pub fn ambient_dim(&self) -> Result<usize> {
        match self {
            Self::Complex(m) if m.is_square() => Ok(m.nrows()),
            Self::RealLinear(m) if m.is_square() && m.nrows() % 2 == 0 => Ok(m.nrows() / 2),
            _ => Err(Error::Domain("candidate matrix has the wrong shape".into())),
        }
    }

    /// `‖M*M − I‖_max ≤ 1e−10` (orthogonality for real-linear candidates).
    pub fn is_unitary(&self) -> bool {
        match self {
            Self::Complex(m) => {
                m.is_square()
                    && max_abs_c(&(m.adjoint() * m - DMatrix::identity(m.nrows(), m.ncols())))
                        <= UNITARY_TOL
            }
            Self::RealLinear(m) => {
                m.is_square()
                    && max_abs_r(&(m.transpose() * m - DMatrix::identity(m.nrows(), m.ncols())))
                        <= UNITARY_TOL
            }
        }
    }

    pub fn is_complex_linear(&self) -> bool {
        match self {
            Self::Complex(_) => true,
            Self::RealLinear(m) => match self.ambient_dim() {
                Ok(d) => {
                    let j = real_j(d);
                    max_abs_r(&(m * &j - &j * m)) <= UNITARY_TOL
                }
                Err(_) => false,
            },
        }
    }

    pub fn apply(&self, x: &ComplexVector) -> ComplexVector {
        match self {
            Self::Complex(m) => apply_complex(m, x),
            Self::RealLinear(m) => {
                let y = m * DVector::from_vec(x.to_real());
                ComplexVector::from_real(y.as_slice()).expect("finite image")
            }
        }
    }

    /// The complex matrix of a complex-linear candidate.
    fn complex_matrix(&self) -> Option<DMatrix<C64>> {
        match self {
            Self::Complex(m) => Some(m.clone()),
            Self::RealLinear(m) => {
                if !self.is_complex_linear() {
                    return None;
                }
                let d = m.nrows() / 2;
                Some(DMatrix::from_fn(d, d, |r, c| C64::new(m[(r, c)], m[(d + r, c)])))
            }
        }
    }
}

fn apply_complex(m: &DMatrix<C64>, x: &ComplexVector) -> ComplexVector {
    let y = m * DVector::from_column_slice(x.as_slice());
    ComplexVector::from_vec(y.iter().copied().collect())
}

/// True iff the candidate preserves both the metric and `dα`.
pub fn is_magnetomorphism(u: &UnitaryCandidate, ambient_dim: usize) -> Result<bool> {
    let d = u.ambient_dim()?;
    if d != ambient_dim {
        return Err(Error::Dimension {
            expected: ambient_dim,
            found: d,
        });
    }
    Ok(u.is_unitary() && u.is_complex_linear())
}

/// Largest `|dα(Mu, Mw) − dα(u, w)|` and `|g(Mu, Mw) − g(u, w)|` over random
/// tangent pairs at random points.
pub fn pullback_defects(u: &UnitaryCandidate, samples: usize, seed: u64) -> Result<(f64, f64)> {
    let d = u.ambient_dim()?;
    let mut rng = derived_rng(seed, 0);
    let (mut da, mut dg) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let z = crate::sampling::random_unit_vector(&mut rng, d);
        let a = crate::sampling::random_tangent(&mut rng, &z);
        let b = crate::sampling::random_tangent(&mut rng, &z);
        let (ma, mb) = (u.apply(&a), u.apply(&b));
        da = da.max((ma.mul_i().dot(&mb) - a.mul_i().dot(&b)).abs());
        dg = dg.max((ma.dot(&mb) - a.dot(&b)).abs());
    }
    Ok((da, dg))
}

/// A unitary matrix, validated as a symmetry of the magnetic system.
#[derive(Debug, Clone, PartialEq)]
pub struct Magnetomorphism(DMatrix<C64>);

impl Magnetomorphism {
    pub fn new(u: &UnitaryCandidate) -> Result<Self> {
        let d = u.ambient_dim()?;
        if !is_magnetomorphism(u, d)? {
            return Err(Error::Domain("candidate is not a magnetomorphism".into()));
        }
        Ok(Self(u.complex_matrix().expect("complex-linear")))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: len,
            });
        }
        Ok(())
    }

    pub fn act_vector(&self, x: &ComplexVector) -> Result<ComplexVector> {
        self.check(x.len())?;
        Ok(apply_complex(&self.0, x))
    }

    pub fn act_state(&self, st: &UnitTangentState) -> Result<UnitTangentState> {
        let z = self.act_vector(st.position())?;
        let v = self.act_vector(st.velocity())?;
        UnitTangentState::with_tolerance(z, v, 1e-10)
    }

    pub fn act_trajectory(&self, traj: &Trajectory) -> Result<Trajectory> {
        if let Some((_, (p, _))) = traj.last() {
            self.check(p.len())?;
        }
        Ok(traj.map_states(|x| apply_complex(&self.0, x)))
    }

    pub fn act_geodesic(&self, g: &ClosedFormGeodesic) -> Result<ClosedFormGeodesic> {
        self.check(g.pair().dim())?;
        Ok(g.with_pair(g.pair().map(|w| apply_complex(&self.0, w))))
    }

    pub fn act_reeb(&self, r: &ReebOrbit) -> Result<ReebOrbit> {
        Ok(r.with_base(self.act_vector(r.base_point())?))
    }

    pub fn act(&self, g: &MagneticGeodesic) -> Result<MagneticGeodesic> {
        Ok(match g {
            MagneticGeodesic::Torus(t) => MagneticGeodesic::Torus(self.act_geodesic(t)?),
            MagneticGeodesic::Reeb(r) => MagneticGeodesic::Reeb(self.act_reeb(r)?),
        })
    }
}

/// Haar-distributed unitary matrix (QR of a complex Gaussian matrix with phase fix).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Magnetomorphism {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for row in 0..dim {
            q[(row, k)] *= phase;
        }
    }
    Magnetomorphism(q)
}

/// An element `A` of `u(n+1)`: `A* = −A`.
#[derive(Debug, Clone, PartialEq)]
pub struct AntiHermitianGenerator(DMatrix<C64>);

impl AntiHermitianGenerator {
    pub fn new(a: DMatrix<C64>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Domain("generator must be square".into()));
        }
        let defect = max_abs_c(&(&a + a.adjoint()));
        if defect > GENERATOR_TOL {
            return Err(Error::Domain(format!(
                "generator is not anti-Hermitian: |A + A*| = {defect:e}"
            )));
        }
        Ok(Self(a))
    }

    /// `i · I`, whose moment map is `cos ψ − ½`.
    pub fn i_identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim) * C64::new(0.0, 1.0))
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn apply(&self, x: &ComplexVector) -> ComplexVector {
        apply_complex(&self.0, x)
    }
}

/// Real basis of `u(dim)`: `i E_jj`, `E_jk − E_kj`, `i(E_jk + E_kj)`.
pub fn u_basis(dim: usize) -> Vec<AntiHermitianGenerator> {
    let mut out = Vec::with_capacity(dim * dim);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    for j in 0..dim {
        let mut m = DMatrix::zeros(dim, dim);
        m[(j, j)] = i;
        out.push(AntiHermitianGenerator(m));
        for k in (j + 1)..dim {
            let mut a = DMatrix::zeros(dim, dim);
            a[(j, k)] = one;
            a[(k, j)] = -one;
            out.push(AntiHermitianGenerator(a));
            let mut b = DMatrix::zeros(dim, dim);
            b[(j, k)] = i;
            b[(k, j)] = i;
            out.push(AntiHermitianGenerator(b));
        }
    }
    out
}

pub fn random_generator<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> AntiHermitianGenerator {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    AntiHermitianGenerator((&g - g.adjoint()) * C64::new(0.5, 0.0))
}

pub(crate) fn moment_map_unchecked(
    z: &ComplexVector,
    v: &ComplexVector,
    a: &AntiHermitianGenerator,
    s: f64,
) -> f64 {
    let az = a.apply(z);
    az.dot(v) - 0.5 * s * z.mul_i().dot(&az)
}

/// `μ(z, v)[A] = g(Az, v) − α_z(Az)`.
pub fn moment_map(st: &UnitTangentState, a: &AntiHermitianGenerator) -> Result<f64> {
    if a.dim() != st.position().len() {
        return Err(Error::Dimension {
            expected: st.position().len(),
            found: a.dim(),
        });
    }
    Ok(moment_map_unchecked(st.position(), st.velocity(), a, 1.0))
}

/// Moment map of the unit-speed system with field `s·dα`: `g(Az, v) − s α_z(Az)`.
///
/// It is conserved along unit-speed magnetic geodesics of strength `s`, and
/// equals [`moment_map`] at `s = 1`.
pub fn moment_map_with_strength(st: &UnitTangentState, a: &AntiHermitianGenerator, s: f64) -> Result<f64> {
    if a.dim() != st.position().len() {
        return Err(Error::Dimension {
            expected: st.position().len(),
            found: a.dim(),
        });
    }
    Ok(moment_map_unchecked(st.position(), st.velocity(), a, s))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

/// A linear subspace `V ⊂ C^{n+1}`, spanned over `field` by `basis`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSubspaceSpec {
    basis: Vec<ComplexVector>,
    field: Field,
    orthonormal: Vec<ComplexVector>,
}

/// Real Gram–Schmidt (twice, for stability); returns `None` on dependence.
fn real_orthonormalize(vectors: &[ComplexVector], tol: f64) -> Option<Vec<ComplexVector>> {
    let mut out: Vec<ComplexVector> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for e in &out {
                w = w.axpy(C64::new(-w.dot(e), 0.0), e);
            }
        }
        let n = w.norm();
        if n <= tol * v.norm().max(1.0) {
            return None;
        }
        out.push(w.scale_real(1.0 / n));
    }
    Some(out)
}

fn project_onto(frame: &[ComplexVector], x: &ComplexVector) -> ComplexVector {
    frame
        .iter()
        .fold(ComplexVector::zeros(x.len()), |acc, e| acc.axpy(C64::new(x.dot(e), 0.0), e))
}

impl LinearSubspaceSpec {
    pub fn new(basis: Vec<ComplexVector>, field: Field) -> Result<Self> {
        let dim = basis
            .first()
            .ok_or_else(|| Error::Domain("subspace needs at least one basis vector".into()))?
            .len();
        if let Some(b) = basis.iter().find(|b| b.len() != dim) {
            return Err(Error::Dimension {
                expected: dim,
                found: b.len(),
            });
        }
        let spanning: Vec<ComplexVector> = match field {
            Field::Real => basis.clone(),
            Field::Complex => basis.iter().flat_map(|b| [b.clone(), b.mul_i()]).collect(),
        };
        let orthonormal = real_orthonormalize(&spanning, SPAN_TOL).ok_or_else(|| {
            Error::Domain("basis is linearly dependent over the chosen field".into())
        })?;
        Ok(Self {
            basis,
            field,
            orthonormal,
        })
    }

    pub fn basis(&self) -> &[ComplexVector] {
        &self.basis
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis[0].len()
    }

    pub fn real_dim(&self) -> usize {
        self.orthonormal.len()
    }

    /// Orthonormal basis of `V` for the real inner product `g`.
    pub fn real_frame(&self) -> &[ComplexVector] {
        &self.orthonormal
    }

    pub fn project(&self, x: &ComplexVector) -> ComplexVector {
        project_onto(&self.orthonormal, x)
    }

    /// Distance of `x` from `V`.
    pub fn distance(&self, x: &ComplexVector) -> f64 {
        x.distance(&self.project(x))
    }

    /// Uniform random point of `V ∩ S^{2n+1}`.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> ComplexVector {
        loop {
            let x = self.orthonormal.iter().fold(ComplexVector::zeros(self.ambient_dim()), |acc, e| {
                acc.axpy(C64::new(rng.sample(StandardNormal), 0.0), e)
            });
            if let Ok(u) = x.normalized() {
                return u;
            }
        }
    }

    /// Orthonormal frame of `T_q N = V ∩ q^⊥` for `q ∈ V ∩ S`.
    pub fn tangent_frame(&self, q: &ComplexVector) -> Vec<ComplexVector> {
        let mut vecs = vec![q.clone()];
        vecs.extend(self.orthonormal.iter().cloned());
        gram_schmidt_skip(&vecs).into_iter().skip(1).collect()
    }

    /// Orthonormal frame of `V^⊥`, which is the normal space of `N` inside `T_q S`.
    pub fn normal_frame(&self) -> Vec<ComplexVector> {
        let d = self.ambient_dim();
        let mut vecs = self.orthonormal.clone();
        for k in 0..d {
            vecs.push(ComplexVector::basis(d, k));
            vecs.push(ComplexVector::basis(d, k).mul_i());
        }
        gram_schmidt_skip(&vecs).into_iter().skip(self.real_dim()).collect()
    }
}

/// Gram–Schmidt that drops vectors already in the span.
fn gram_schmidt_skip(vectors: &[ComplexVector]) -> Vec<ComplexVector> {
    let mut out: Vec<ComplexVector> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for e in &out {
                w = w.axpy(C64::new(-w.dot(e), 0.0), e);
            }
        }
        let n = w.norm();
        if n > 1e-8 {
            out.push(w.scale_real(1.0 / n));
        }
    }
    out
}

/// True iff `V` is a complex subspace, i.e. `iV = V`.
pub fn totally_magnetic_subspace(v: &LinearSubspaceSpec) -> Result<bool> {
    if v.real_dim() < 2 {
        return Err(Error::Domain(
            "subspace must have real dimension at least 2".into(),
        ));
    }
    Ok(v
        .real_frame()
        .iter()
        .all(|e| v.distance(&e.mul_i()) <= SPAN_TOL))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TotallyMagneticConfig {
    pub s: f64,
    pub sample_count: usize,
    pub seed: u64,
    pub t_end: f64,
    pub step: f64,
    /// Threshold below which a measure counts as vanishing.
    pub tolerance: f64,
}

impl Default for TotallyMagneticConfig {
    fn default() -> Self {
        Self {
            s: 1.0,
            sample_count: 8,
            seed: 0,
            t_end: 5.0,
            step: 1e-3,
            tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TotallyMagneticReport {
    /// Largest `|dα(u, w)|` for `u ∈ T_q N`, `w ∈ T_q N^⊥`.
    pub dalpha_cross: f64,
    /// Largest distance of `Y_q u` from `T_q N` for unit `u ∈ T_q N`.
    pub lorentz_leak: f64,
    /// Largest distance from `V` reached by a tangent magnetic geodesic.
    pub escape: f64,
    pub complex_subspace: bool,
    pub condition_3b: bool,
    pub condition_3c: bool,
    pub stays_inside: bool,
}

impl TotallyMagneticReport {
    pub fn consistent(&self) -> bool {
        self.condition_3b == self.condition_3c && self.condition_3c == self.stays_inside
    }
}

/// Samples points of `N = V ∩ S` and measures the totally-magnetic conditions.
pub fn totally_magnetic_conditions(
    v: &LinearSubspaceSpec,
    cfg: &TotallyMagneticConfig,
) -> Result<TotallyMagneticReport> {
    let complex_subspace = totally_magnetic_subspace(v)?;
    let normal = v.normal_frame();
    let (mut dalpha_cross, mut lorentz_leak, mut escape) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..cfg.sample_count {
        let mut rng = derived_rng(cfg.seed, k as u64);
        let q = v.random_point(&mut rng);
        let tangent = v.tangent_frame(&q);
        for u in &tangent {
            for w in &normal {
                dalpha_cross = dalpha_cross.max(u.mul_i().dot(w).abs());
            }
            let yu = lorentz_unchecked(&q, u);
            lorentz_leak = lorentz_leak.max(yu.distance(&project_onto(&tangent, &yu)));
        }
        let dir = tangent.iter().fold(ComplexVector::zeros(q.len()), |acc, e| {
            acc.axpy(C64::new(rng.sample(StandardNormal), 0.0), e)
        });
        let Ok(dir) = dir.normalized() else { continue };
        let st = UnitTangentState::renormalized(&q, &dir)?;
        let traj = integrate_intrinsic(cfg.s, &st, cfg.t_end, cfg.step)?;
        for p in traj.positions() {
            escape = escape.max(v.distance(p));
        }
    }
    let tol = cfg.tolerance;
    Ok(TotallyMagneticReport {
        dalpha_cross,
        lorentz_leak,
        escape,
        complex_subspace,
        condition_3b: lorentz_leak <= tol,
        condition_3c: dalpha_cross <= tol,
        stays_inside: escape <= tol,
    })
}

/// Random complex subspace of complex dimension `k` in `C^dim`.
pub fn random_complex_subspace<R: Rng + ?Sized>(rng: &mut R, dim: usize, k: usize) -> Result<LinearSubspaceSpec> {
    LinearSubspaceSpec::new((0..k).map(|_| gaussian_vector(rng, dim)).collect(), Field::Complex)
}

/// Random real subspace of real dimension `k` in `C^dim`.
pub fn random_real_subspace<R: Rng + ?Sized>(rng: &mut R, dim: usize, k: usize) -> Result<LinearSubspaceSpec> {
    LinearSubspaceSpec::new((0..k).map(|_| gaussian_vector(rng, dim)).collect(), Field::Real)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::{torus_data, Flow};
    use crate::oracle::{drift_report, integrate_ambient, sample_flow};
    use crate::sampling::{random_state, rng_from_seed};

    fn cv(parts: &[f64]) -> ComplexVector {
        ComplexVector::from_re_im(parts).unwrap()
    }

    #[test]
    fn magnetomorphism_examples() {
        let id = UnitaryCandidate::Complex(DMatrix::identity(2, 2));
        assert!(is_magnetomorphism(&id, 2).unwrap());
        let mut d = DMatrix::identity(3, 3);
        d[(0, 0)] = C64::from_polar(1.0, 0.7);
        assert!(is_magnetomorphism(&UnitaryCandidate::Complex(d), 3).unwrap());
        let conj = UnitaryCandidate::conjugation(2);
        assert!(conj.is_unitary());
        assert!(!is_magnetomorphism(&conj, 2).unwrap());
        let (da, dg) = pullback_defects(&conj, 20, 1).unwrap();
        assert!(dg < 1e-12);
        assert!(da > 1e-2);
        assert!(is_magnetomorphism(&id, 3).is_err());
        let scaled = UnitaryCandidate::Complex(DMatrix::identity(2, 2) * C64::new(2.0, 0.0));
        assert!(!is_magnetomorphism(&scaled, 2).unwrap());
    }

    #[test]
    fn conjugation_reverses_dalpha() {
        let conj = UnitaryCandidate::conjugation(3);
        let mut rng = rng_from_seed(3);
        for _ in 0..10 {
            let a = gaussian_vector(&mut rng, 3);
            let b = gaussian_vector(&mut rng, 3);
            let lhs = conj.apply(&a).mul_i().dot(&conj.apply(&b));
            assert!((lhs + a.mul_i().dot(&b)).abs() < 1e-12);
        }
    }

    #[test]
    fn real_form_of_unitary_is_accepted() {
        let mut rng = rng_from_seed(4);
        let u = random_unitary(&mut rng, 2);
        let m = u.matrix();
        let real = DMatrix::from_fn(4, 4, |r, c| {
            let (rb, cb) = (r / 2, c / 2);
            let z = m[(r % 2, c % 2)];
            match (rb, cb) {
                (0, 0) | (1, 1) => z.re,
                (1, 0) => z.im,
                _ => -z.im,
            }
        });
        let cand = UnitaryCandidate::RealLinear(real);
        assert!(is_magnetomorphism(&cand, 2).unwrap());
        let back = Magnetomorphism::new(&cand).unwrap();
        assert!(max_abs_c(&(back.matrix() - m)) < 1e-14);
        let x = gaussian_vector(&mut rng, 2);
        assert!(cand.apply(&x).distance(&u.act_vector(&x).unwrap()) < 1e-14);
    }

    #[test]
    fn equivariance() {
        let mut rng = rng_from_seed(5);
        for _ in 0..10 {
            let u = random_unitary(&mut rng, 3);
            let st = random_state(&mut rng, 2);
            let s = 3.0 * rng.random::<f64>();
            let g = torus_data(s, &st).unwrap();
            let ug = u.act_geodesic(&g).unwrap();
            for &t in &[0.0, 0.4, 3.3, -7.0] {
                let (p, v) = g.evaluate(t);
                let (up, uv) = ug.evaluate(t);
                assert!(u.act_vector(&p).unwrap().distance(&up) < 1e-11);
                assert!(u.act_vector(&v).unwrap().distance(&uv) < 1e-11);
            }
            let ust = u.act_state(&st).unwrap();
            assert!((ust.psi() - st.psi()).abs() < 1e-7);
            assert!((ust.cos_psi() - st.cos_psi()).abs() < 1e-12);
            assert!((ug.pair().width() - g.pair().width()).abs() < 1e-7);
            let a = integrate_ambient(s, &st, 5.0, 1e-3).unwrap();
            let b = integrate_ambient(s, &ust, 5.0, 1e-3).unwrap();
            let ua = u.act_trajectory(&a).unwrap();
            assert!(ua.max_position_distance(&b).unwrap() < 1e-8);
        }
        let id = Magnetomorphism::identity(2);
        let st = random_state(&mut rng, 1);
        assert_eq!(id.act_state(&st).unwrap(), st);
    }

    #[test]
    fn generator_validation() {
        assert!(AntiHermitianGenerator::new(DMatrix::identity(2, 2)).is_err());
        assert!(AntiHermitianGenerator::new(DMatrix::zeros(2, 3)).is_err());
        let basis = u_basis(3);
        assert_eq!(basis.len(), 9);
        for a in &basis {
            assert!(AntiHermitianGenerator::new(a.matrix().clone()).is_ok());
        }
    }

    #[test]
    fn moment_map_examples() {
        let st = UnitTangentState::new(cv(&[1.0, 0.0, 0.0, 0.0]), cv(&[0.0, 0.0, 1.0, 0.0])).unwrap();
        assert!((moment_map(&st, &AntiHermitianGenerator::i_identity(2)).unwrap() + 0.5).abs() < 1e-15);
        let mut rng = rng_from_seed(6);
        for _ in 0..20 {
            let st = random_state(&mut rng, 2);
            let mu = moment_map(&st, &AntiHermitianGenerator::i_identity(3)).unwrap();
            assert!((mu - (st.cos_psi() - 0.5)).abs() < 1e-12);
        }
        assert!(moment_map(&st, &AntiHermitianGenerator::i_identity(3)).is_err());
    }

    #[test]
    fn moment_map_conserved() {
        let mut rng = rng_from_seed(7);
        let basis = u_basis(3);
        for _ in 0..5 {
            let st = random_state(&mut rng, 2);
            let s = 4.0 * rng.random::<f64>();
            let g = torus_data(s, &st).unwrap();
            assert!(drift_report(&sample_flow(&g, 50.0, 0.01).unwrap(), &basis).unwrap().max_moment_drift < 1e-11);
            assert!(drift_report(&integrate_ambient(s, &st, 10.0, 1e-3).unwrap(), &basis).unwrap().max_moment_drift < 1e-8);
        }
    }

    #[test]
    fn subspace_examples() {
        let c1 = LinearSubspaceSpec::new(vec![cv(&[1.0, 0.0, 0.0, 0.0])], Field::Complex).unwrap();
        assert!(totally_magnetic_subspace(&c1).unwrap());
        let r2 = LinearSubspaceSpec::new(vec![cv(&[1.0, 0.0, 0.0, 0.0]), cv(&[0.0, 0.0, 1.0, 0.0])], Field::Real).unwrap();
        assert!(!totally_magnetic_subspace(&r2).unwrap());
        let all = LinearSubspaceSpec::new(
            vec![
                cv(&[1.0, 0.0, 0.0, 0.0]),
                cv(&[0.0, 1.0, 0.0, 0.0]),
                cv(&[0.0, 0.0, 1.0, 0.0]),
                cv(&[0.0, 0.0, 0.0, 1.0]),
            ],
            Field::Real,
        )
        .unwrap();
        assert!(totally_magnetic_subspace(&all).unwrap());
        let line = LinearSubspaceSpec::new(vec![cv(&[1.0, 0.0, 0.0, 0.0])], Field::Real).unwrap();
        assert!(totally_magnetic_subspace(&line).is_err());
        assert!(LinearSubspaceSpec::new(vec![cv(&[1.0, 0.0]), cv(&[0.0, 1.0])], Field::Complex).is_err());
        assert!(LinearSubspaceSpec::new(vec![], Field::Real).is_err());
    }

    #[test]
    fn frames_are_orthonormal_and_complementary() {
        let mut rng = rng_from_seed(8);
        let v = random_real_subspace(&mut rng, 3, 4).unwrap();
        let q = v.random_point(&mut rng);
        let t = v.tangent_frame(&q);
        let n = v.normal_frame();
        assert_eq!(t.len(), 3);
        assert_eq!(n.len(), 2);
        for a in t.iter().chain(&n) {
            assert!(a.dot(&q).abs() < 1e-12);
            assert!((a.norm() - 1.0).abs() < 1e-12);
        }
        for a in &t {
            for b in &n {
                assert!(a.dot(b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn conditions_on_complex_and_real_subspaces() {
        let mut rng = rng_from_seed(9);
        let cfg = TotallyMagneticConfig {
            sample_count: 3,
            ..Default::default()
        };
        for k in 1..=2 {
            let v = random_complex_subspace(&mut rng, 3, k).unwrap();
            let r = totally_magnetic_conditions(&v, &cfg).unwrap();
            assert!(r.complex_subspace && r.stays_inside && r.condition_3b && r.condition_3c);
        }
        let v = random_real_subspace(&mut rng, 2, 3).unwrap();
        let r = totally_magnetic_conditions(&v, &cfg).unwrap();
        assert!(!r.complex_subspace && !r.condition_3b && !r.condition_3c);
        assert!(r.escape >= 1e-3);
        assert!(r.consistent());
        let r0 = totally_magnetic_conditions(&v, &TotallyMagneticConfig { s: 0.0, ..cfg }).unwrap();
        assert!(r0.escape <= 1e-8);
    }

    #[test]
    fn torus_data_lies_in_complex_subspace() {
        let mut rng = rng_from_seed(10);
        let v = random_complex_subspace(&mut rng, 3, 2).unwrap();
        for _ in 0..10 {
            let q = v.random_point(&mut rng);
            let t = v.tangent_frame(&q);
            let dir = t.iter().fold(ComplexVector::zeros(3), |acc, e| {
                acc.axpy(C64::new(rng.sample(StandardNormal), 0.0), e)
            });
            let st = UnitTangentState::renormalized(&q, &dir).unwrap();
            let g = torus_data(1.2, &st).unwrap();
            assert!(v.distance(g.pair().w0()) < 1e-10);
            assert!(v.distance(g.pair().w1()) < 1e-10);
            assert_eq!(g.dim(), 3);
        }
    }
}
