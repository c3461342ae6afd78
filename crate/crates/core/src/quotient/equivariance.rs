//! Isometries carry horizontal geodesics to horizontal geodesics.

use nalgebra::DMatrix;

use crate::action::ActionSpec;
use crate::error::{Error, Result};
use crate::geodesic::HorizontalGeodesic;

const SAMPLES: usize = 64;

/// `max_t |exp(A) γ(t) − σ(t)|` over `t ∈ [a, t_max]`, where `σ` is the
/// geodesic launched from `exp(A) γ(a)` with velocity `exp(A) γ′(a)`,
/// relative to `max(1, |γ(a)|)`.
pub fn equivariance_coherence_check(
    action: &ActionSpec,
    g: &HorizontalGeodesic,
    a: &DMatrix<f64>,
    t_max: f64,
) -> Result<f64> {
    let n = action.space().dimension();
    if a.shape() != (n, n) {
        return Err(Error::DimensionMismatch { expected: n, found: a.nrows() });
    }
    let t0 = g.left();
    let t_max = t_max.min(g.right());
    if !(t_max > t0) {
        return Err(Error::OutsideInterval { t: t_max, a: t0, b: g.right() });
    }
    let e = a.clone().exp();
    let x = &e * g.point(t0);
    let v = &e * g.velocity(t0);
    let speed = v.norm();
    let moved = HorizontalGeodesic::with_speed(*action.space(), x.clone(), v, speed, (0.0, t_max - t0))?;
    action.check_horizontal(&moved)?;
    let scale = g.point(t0).norm().max(1.0);
    let mut max: f64 = 0.0;
    for i in 0..=SAMPLES {
        let t = t0 + (t_max - t0) * i as f64 / SAMPLES as f64;
        let d = (&e * g.point(t) - moved.point(t - t0)).norm();
        max = max.max(d / scale);
    }
    Ok(max)
}

#[cfg(test)]
mod tests {
    use nalgebra::DVector;

    use super::*;
    use crate::presets::Preset;

    #[test]
    fn rotations_commute_with_geodesics() {
        let so2 = Preset::So(2).action().unwrap();
        let g = so2
            .make_horizontal_geodesic(
                &DVector::from_row_slice(&[0.5, 0.0]),
                &DVector::from_row_slice(&[1.0, 0.0]),
                (0.0, 2.0),
            )
            .unwrap();
        let zero = DMatrix::zeros(2, 2);
        assert_eq!(equivariance_coherence_check(&so2, &g, &zero, 2.0).unwrap(), 0.0);
        let quarter = &so2.generators()[0] * std::f64::consts::FRAC_PI_2;
        assert!(equivariance_coherence_check(&so2, &g, &quarter, 2.0).unwrap() <= 1e-8);

        let hopf = Preset::Hopf.action().unwrap();
        let sphere = hopf.on_sphere(1.0).unwrap();
        let x = DVector::from_row_slice(&[0.6, 0.0, 0.8, 0.0]);
        let dir = DVector::from_row_slice(&[0.8, 0.0, -0.6, 0.0]);
        let g = sphere.make_horizontal_geodesic(&x, &dir, (0.0, 5.0)).unwrap();
        let a = &hopf.generators()[0] * 1.7;
        assert!(equivariance_coherence_check(&sphere, &g, &a, 5.0).unwrap() <= 1e-8);
    }
}
