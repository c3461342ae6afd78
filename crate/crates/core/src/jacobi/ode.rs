//! Fixed-step RK4 integration of the variation of a geodesic, used as an
//! independent check of the closed-form Jacobi fields.

use nalgebra::DVector;

use super::field::JacobiField;
use crate::error::Result;

/// Integrates `(γ, γ′, J, J′)` in ambient coordinates from the left endpoint
/// to `t` with `steps` RK4 steps and returns the ambient `(J(t), J′(t))`.
///
/// On the sphere of curvature `κ` the flow is `γ″ = −κ|γ′|²γ` and its
/// linearization `J″ = −κ(2⟨γ′, J′⟩γ + |γ′|²J)`; in flat space both vanish.
pub fn integrate_field(field: &JacobiField, t: f64, steps: usize) -> Result<(DVector<f64>, DVector<f64>)> {
    let g = field.geodesic();
    g.check_parameter(t)?;
    let k = g.space().curvature();
    let a = g.left();
    let n = g.space().dimension();

    let rhs = |y: &[DVector<f64>; 4]| -> [DVector<f64>; 4] {
        let [p, dp, j, dj] = y;
        let speed2 = dp.norm_squared();
        let ddp = p * (-k * speed2);
        let ddj = (p * (2.0 * dp.dot(dj)) + j * speed2) * (-k);
        [dp.clone(), ddp, dj.clone(), ddj]
    };
    let mut y = [g.point(a), g.velocity(a), field.ambient_value(a), field.ambient_derivative(a)];
    let steps = steps.max(1);
    let h = (t - a) / steps as f64;
    let add = |y: &[DVector<f64>; 4], k: &[DVector<f64>; 4], s: f64| -> [DVector<f64>; 4] {
        std::array::from_fn(|i| &y[i] + &k[i] * s)
    };
    for _ in 0..steps {
        let k1 = rhs(&y);
        let k2 = rhs(&add(&y, &k1, h / 2.0));
        let k3 = rhs(&add(&y, &k2, h / 2.0));
        let k4 = rhs(&add(&y, &k3, h));
        y = std::array::from_fn(|i| &y[i] + (&k1[i] + &k2[i] * 2.0 + &k3[i] * 2.0 + &k4[i]) * (h / 6.0));
    }
    debug_assert_eq!(y[2].len(), n);
    let [_, _, j, dj] = y;
    Ok((j, dj))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::geodesic::HorizontalGeodesic;
    use crate::geometry::AmbientSpace;

    #[test]
    fn matches_closed_form_on_sphere() {
        let space = AmbientSpace::sphere(4, 2.0).unwrap();
        let r = space.radius();
        let base = DVector::from_row_slice(&[r, 0.0, 0.0, 0.0]);
        let dir = DVector::from_row_slice(&[0.0, 0.6, 0.8, 0.0]);
        let g = Arc::new(HorizontalGeodesic::with_speed(space, base, dir, 1.3, (0.0, 1.0)).unwrap());
        let j =
            JacobiField::new(g, DVector::from_row_slice(&[0.2, -1.0]), DVector::from_row_slice(&[0.7, 0.4])).unwrap();
        let (value, deriv) = integrate_field(&j, 1.0, 400).unwrap();
        assert!((value - j.ambient_value(1.0)).norm() < 1e-8);
        assert!((deriv - j.ambient_derivative(1.0)).norm() < 1e-8);
    }
}
