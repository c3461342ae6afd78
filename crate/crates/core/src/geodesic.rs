//! Closed-form geodesics of ℝⁿ and round spheres, with a parallel normal
//! frame.

use nalgebra::{DMatrix, DVector};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{orthogonal_complement, AmbientSpace, Subspace, NORMAL_TOL};

/// Plain description of a geodesic for reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicSummary {
    pub curvature: f64,
    pub base: Vec<f64>,
    pub direction: Vec<f64>,
    pub speed: f64,
    pub interval: (f64, f64),
}

/// A constant-speed geodesic `t ↦ γ(t)` on `[a, b]`.
///
/// `base` is `γ(0)` and `direction` the unit tangent at `γ(0)`; the parameter
/// `0` need not lie in the interval. For the sphere,
/// `γ(t) = cos(√κ·s·t) x + sin(√κ·s·t) v / √κ` with `s` the speed.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizontalGeodesic {
    space: AmbientSpace,
    base: DVector<f64>,
    direction: DVector<f64>,
    speed: f64,
    interval: (f64, f64),
    frame: DMatrix<f64>,
}

impl HorizontalGeodesic {
    /// Builds a unit-speed geodesic. The direction is normalized; the base
    /// point is renormalized onto the sphere.
    pub fn new(space: AmbientSpace, base: DVector<f64>, direction: DVector<f64>, interval: (f64, f64)) -> Result<Self> {
        Self::with_speed(space, base, direction, 1.0, interval)
    }

    pub fn with_speed(
        space: AmbientSpace,
        base: DVector<f64>,
        direction: DVector<f64>,
        speed: f64,
        interval: (f64, f64),
    ) -> Result<Self> {
        let base = space.normalize_point(&base)?;
        space.check_dim(&direction)?;
        let norm = direction.norm();
        if norm < 1e-300 || !norm.is_finite() {
            return Err(Error::ZeroDirection);
        }
        let mut direction = direction / norm;
        if space.is_sphere() {
            let residual = direction.dot(&base) * space.curvature().sqrt();
            if residual.abs() > NORMAL_TOL {
                return Err(Error::NotNormal { residual: residual.abs() });
            }
            // Remove the rounding-level radial part.
            let unit_base = base.normalize();
            direction = (&direction - &unit_base * direction.dot(&unit_base)).normalize();
        }
        if !(speed > 0.0) || !speed.is_finite() {
            return Err(Error::InvalidArgument(format!("speed {speed} must be positive")));
        }
        let (a, b) = interval;
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidArgument(format!("interval [{a}, {b}] is empty")));
        }
        let frame = normal_frame(&space, &base, &direction);
        Ok(Self { space, base, direction, speed, interval, frame })
    }

    pub fn space(&self) -> &AmbientSpace {
        &self.space
    }

    pub fn base(&self) -> &DVector<f64> {
        &self.base
    }

    pub fn direction(&self) -> &DVector<f64> {
        &self.direction
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn left(&self) -> f64 {
        self.interval.0
    }

    pub fn right(&self) -> f64 {
        self.interval.1
    }

    pub fn length(&self) -> f64 {
        self.speed * (self.interval.1 - self.interval.0)
    }

    /// Angular rate `√κ·s` of the great circle; zero in Euclidean mode.
    pub(crate) fn rate(&self) -> f64 {
        self.space.curvature().sqrt() * self.speed
    }

    /// Dimension of the normal bundle (manifold dimension − 1).
    pub fn normal_dimension(&self) -> usize {
        self.frame.ncols()
    }

    pub fn contains(&self, t: f64) -> bool {
        let (a, b) = self.interval;
        let slack = 1e-12 * (b - a).max(1.0);
        t >= a - slack && t <= b + slack
    }

    pub fn check_parameter(&self, t: f64) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(Error::OutsideInterval { t, a: self.interval.0, b: self.interval.1 })
        }
    }

    pub fn point(&self, t: f64) -> DVector<f64> {
        if self.space.is_sphere() {
            let w = self.rate() * t;
            &self.base * w.cos() + &self.direction * (w.sin() * self.space.radius())
        } else {
            &self.base + &self.direction * (self.speed * t)
        }
    }

    pub fn velocity(&self, t: f64) -> DVector<f64> {
        self.unit_tangent(t) * self.speed
    }

    pub fn unit_tangent(&self, t: f64) -> DVector<f64> {
        if self.space.is_sphere() {
            let w = self.rate() * t;
            &self.base * (-w.sin() * self.space.curvature().sqrt()) + &self.direction * w.cos()
        } else {
            self.direction.clone()
        }
    }

    /// Orthonormal frame (columns) of the normal bundle.
    ///
    /// The normal bundle of a line or a great circle is the orthogonal
    /// complement of the plane the curve spans, so its parallel frame is
    /// constant in ambient coordinates.
    pub fn normal_frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    /// Parallel normal frame at `γ(t)`.
    pub fn parallel_frame(&self, t: f64) -> Result<DMatrix<f64>> {
        self.check_parameter(t)?;
        Ok(self.frame.clone())
    }

    /// Parallel transport of a tangent vector at `γ(a)` to `γ(t)`.
    pub fn transport(&self, t: f64, w: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_parameter(t)?;
        self.space.check_dim(w)?;
        let u0 = self.unit_tangent(self.left());
        let along = w.dot(&u0);
        let normal = w - &u0 * along;
        Ok(normal + self.unit_tangent(t) * along)
    }

    /// `t ↦ γ(−t)` on `[−b, −a]`.
    pub fn reversed(&self) -> Self {
        let (a, b) = self.interval;
        Self {
            space: self.space,
            base: self.base.clone(),
            direction: -&self.direction,
            speed: self.speed,
            interval: (-b, -a),
            frame: normal_frame(&self.space, &self.base, &(-&self.direction)),
        }
    }

    /// `t ↦ γ(λt)` on `[a/λ, b/λ]` for `λ > 0`.
    pub fn reparametrized(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidArgument(format!("rescaling factor {lambda} must be positive")));
        }
        let (a, b) = self.interval;
        Self::with_speed(
            self.space,
            self.base.clone(),
            self.direction.clone(),
            self.speed * lambda,
            (a / lambda, b / lambda),
        )
    }

    /// Same geodesic restricted to another interval.
    pub fn restricted(&self, interval: (f64, f64)) -> Result<Self> {
        Self::with_speed(self.space, self.base.clone(), self.direction.clone(), self.speed, interval)
    }

    pub fn summary(&self) -> GeodesicSummary {
        GeodesicSummary {
            curvature: self.space.curvature(),
            base: self.base.iter().copied().collect(),
            direction: self.direction.iter().copied().collect(),
            speed: self.speed,
            interval: self.interval,
        }
    }

    pub(crate) fn same_curve(&self, other: &Self) -> bool {
        self.space == other.space
            && self.base == other.base
            && self.direction == other.direction
            && self.speed == other.speed
            && self.interval == other.interval
    }
}

fn normal_frame(space: &AmbientSpace, base: &DVector<f64>, direction: &DVector<f64>) -> DMatrix<f64> {
    let n = space.dimension();
    let mut plane = vec![direction.clone()];
    if space.is_sphere() {
        plane.push(base.normalize());
    }
    let mut m = DMatrix::zeros(n, plane.len());
    for (j, v) in plane.iter().enumerate() {
        m.set_column(j, v);
    }
    let plane = Subspace::from_orthonormal(m);
    orthogonal_complement(&plane, &Subspace::full(n)).expect("dimensions agree").basis().clone()
}
