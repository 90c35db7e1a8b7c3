//! Seeded random inputs: points, tangent vectors and states.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;

use crate::geom::{project_tangent, ComplexVector, UnitTangentState};
use crate::C64;

/// Deterministic generator used throughout the crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream for task `index` of a seeded job.
pub fn derived_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, len: usize) -> ComplexVector {
    ComplexVector::from_vec(
        (0..len)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect(),
    )
}

/// Uniformly distributed point of the unit sphere in `C^len`.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, len: usize) -> ComplexVector {
    loop {
        let g = gaussian_vector(rng, len);
        if let Ok(u) = g.normalized() {
            return u;
        }
    }
}

/// Unit tangent vector at `z`, uniformly distributed on the tangent sphere.
pub fn random_tangent<R: Rng + ?Sized>(rng: &mut R, z: &ComplexVector) -> ComplexVector {
    loop {
        let g = gaussian_vector(rng, z.len());
        if let Ok(u) = project_tangent(z, &g).normalized() {
            return u;
        }
    }
}

/// Unit vector in the contact distribution at `z`, i.e. complex-orthogonal to `z`.
pub fn random_contact_vector<R: Rng + ?Sized>(rng: &mut R, z: &ComplexVector) -> ComplexVector {
    loop {
        let g = gaussian_vector(rng, z.len());
        let h = g.axpy(-g.herm(z), z);
        if let Ok(u) = h.normalized() {
            return u;
        }
    }
}

pub fn random_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> UnitTangentState {
    let z = random_unit_vector(rng, n + 1);
    let v = random_tangent(rng, &z);
    UnitTangentState::renormalized(&z, &v).expect("random state is valid")
}

/// Random state with prescribed contact angle `psi`.
pub fn random_state_with_angle<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    psi: f64,
) -> UnitTangentState {
    let z = random_unit_vector(rng, n + 1);
    let h = random_contact_vector(rng, &z);
    let v = z.mul_i().scale_real(psi.cos()).axpy(C64::new(psi.sin(), 0.0), &h);
    UnitTangentState::renormalized(&z, &v).expect("random state is valid")
}
