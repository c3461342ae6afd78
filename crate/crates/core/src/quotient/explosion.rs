//! Growth of the quotient curvature `κ̄` towards a singular point.

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use super::oneill::{max_quotient_curvature, DEFAULT_PLANE_SAMPLES};
use crate::action::ActionSpec;
use crate::error::{Error, Result};
use crate::geometry::ToleranceProfile;

/// `κ̄ r²` limits at or below this count as zero.
pub const LIMIT_THRESHOLD: f64 = 1e-3;
/// Growth exponents above this count as unbounded curvature.
pub const GROWTH_THRESHOLD: f64 = 1.0;
const CURVATURE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExplosionVerdict {
    Bounded,
    QuadraticExplosion,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExplosionRow {
    pub r: f64,
    pub kappa_bar: f64,
    pub product: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExplosionProbe {
    pub rows: Vec<ExplosionRow>,
    pub fitted_limit: f64,
    pub verdict: ExplosionVerdict,
    /// Exponent `α` in `κ̄ ~ r^{−α}` over the two smallest radii.
    pub growth_exponent: f64,
    pub bounded_curvature: bool,
    /// `max |κ̄(λz)λ² / κ̄(z) − 1|` for `λ ∈ {½, 2}` at the smallest radius
    /// (Euclidean probes with non-negligible curvature only).
    pub scale_deviation: Option<f64>,
    pub limit_threshold: f64,
    pub growth_threshold: f64,
    pub plane_samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExplosionOptions {
    pub plane_samples: usize,
    pub seed: u64,
}

impl Default for ExplosionOptions {
    fn default() -> Self {
        Self { plane_samples: DEFAULT_PLANE_SAMPLES, seed: 0 }
    }
}

/// Points at distance `r` from `x` along the geodesic with initial direction
/// `v`.
fn probe_point(action: &ActionSpec, x: &DVector<f64>, v: &DVector<f64>, r: f64) -> DVector<f64> {
    let space = action.space();
    if space.is_sphere() {
        let w = space.curvature().sqrt();
        x * (w * r).cos() + v * ((w * r).sin() / w)
    } else {
        x + v * r
    }
}

/// Value at zero of the quadratic in `r²` through three samples.
fn extrapolate(rows: &[ExplosionRow]) -> f64 {
    match rows.len() {
        0 => 0.0,
        1 => rows[0].product,
        2 => {
            let (x0, y0) = (rows[0].r.powi(2), rows[0].product);
            let (x1, y1) = (rows[1].r.powi(2), rows[1].product);
            (y1 * x0 - y0 * x1) / (x0 - x1)
        }
        _ => {
            let last = &rows[rows.len() - 3..];
            let xs: Vec<f64> = last.iter().map(|r| r.r.powi(2)).collect();
            let ys: Vec<f64> = last.iter().map(|r| r.product).collect();
            // Lagrange form evaluated at zero.
            (0..3)
                .map(|i| {
                    let mut w = ys[i];
                    for j in 0..3 {
                        if j != i {
                            w *= xs[j] / (xs[j] - xs[i]);
                        }
                    }
                    w
                })
                .sum()
        }
    }
}

fn growth(rows: &[ExplosionRow]) -> f64 {
    if rows.len() < 2 {
        return 0.0;
    }
    let (p, q) = (&rows[rows.len() - 2], &rows[rows.len() - 1]);
    let kp = p.kappa_bar.max(CURVATURE_FLOOR);
    let kq = q.kappa_bar.max(CURVATURE_FLOOR);
    (kq / kp).ln() / (p.r / q.r).ln()
}

/// Tabulates `κ̄` at `x + r v` for decreasing radii.
pub fn explosion_probe(
    action: &ActionSpec,
    x_sing: &DVector<f64>,
    v: &DVector<f64>,
    radii: &[f64],
    profile: &ToleranceProfile,
    options: &ExplosionOptions,
) -> Result<ExplosionProbe> {
    profile.validate()?;
    let c = action.codimension();
    if c < 2 {
        return Err(Error::LowCohomogeneity(c));
    }
    action.space().check_point(x_sing)?;
    action.space().check_dim(v)?;
    if radii.is_empty() {
        return Err(Error::InvalidArgument("no radii given".into()));
    }
    if radii.iter().any(|r| !(*r > 0.0) || !r.is_finite()) || radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("radii must be positive and strictly decreasing".into()));
    }
    let norm = v.norm();
    if norm < 1e-300 {
        return Err(Error::ZeroDirection);
    }
    let v = v / norm;
    let scale = x_sing.norm().max(1.0);
    let mut residual = action.vertical_residual(x_sing, &v) / scale;
    if action.space().is_sphere() {
        residual = residual.max(v.dot(x_sing).abs() / scale);
    }
    if residual > 1e-8 {
        return Err(Error::NotHorizontal { residual });
    }

    let kappa = |z: &DVector<f64>| -> Result<f64> {
        Ok(max_quotient_curvature(action, z, profile, options.plane_samples, options.seed)?.value)
    };
    let rows = radii
        .par_iter()
        .map(|&r| {
            let z = probe_point(action, x_sing, &v, r);
            let k = kappa(&z)?;
            Ok(ExplosionRow { r, kappa_bar: k, product: k * r * r })
        })
        .collect::<Result<Vec<_>>>()?;

    let fitted_limit = extrapolate(&rows);
    let growth_exponent = growth(&rows);
    let scale_deviation = if action.space().is_sphere() {
        None
    } else {
        let last = rows.last().expect("non-empty");
        let z = probe_point(action, x_sing, &v, last.r);
        if last.kappa_bar.abs() <= CURVATURE_FLOOR || x_sing.norm() > 0.0 {
            None
        } else {
            let mut dev: f64 = 0.0;
            for lambda in [0.5, 2.0] {
                let k = kappa(&(&z * lambda))?;
                dev = dev.max((k * lambda * lambda / last.kappa_bar - 1.0).abs());
            }
            Some(dev)
        }
    };
    let verdict =
        if fitted_limit <= LIMIT_THRESHOLD { ExplosionVerdict::Bounded } else { ExplosionVerdict::QuadraticExplosion };
    Ok(ExplosionProbe {
        rows,
        fitted_limit,
        verdict,
        growth_exponent,
        bounded_curvature: growth_exponent <= GROWTH_THRESHOLD,
        scale_deviation,
        limit_threshold: LIMIT_THRESHOLD,
        growth_threshold: GROWTH_THRESHOLD,
        plane_samples: options.plane_samples,
        seed: options.seed,
    })
}

/// Default radii `1, ½, …, 1/16`.
pub fn default_radii() -> Vec<f64> {
    (0..5).map(|k| 0.5f64.powi(k)).collect()
}
