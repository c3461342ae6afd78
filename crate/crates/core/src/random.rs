//! Seeded sampling helpers.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::geometry::AmbientSpace;

pub fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

pub fn unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<f64> {
    loop {
        let v = gaussian_vector(n, rng);
        let norm = v.norm();
        if norm > 1e-6 {
            return v / norm;
        }
    }
}

/// Gaussian point of ℝⁿ, or a uniform point of the sphere.
pub fn random_point<R: Rng + ?Sized>(space: &AmbientSpace, rng: &mut R) -> DVector<f64> {
    let n = space.dimension();
    if space.is_sphere() {
        unit_vector(n, rng) * space.radius()
    } else {
        gaussian_vector(n, rng)
    }
}
