use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geodesic::HorizontalGeodesic;
use crate::geometry::NORMAL_TOL;

/// A normal Jacobi field, stored by its value and covariant derivative at
/// the left endpoint `a`, in the parallel normal frame.
///
/// With `w = √κ·s` (zero in flat space) and `τ = t − a`,
/// `J(t) = cos(wτ) J(a) + sin(wτ)/w · J′(a)`.
#[derive(Debug, Clone)]
pub struct JacobiField {
    geodesic: Arc<HorizontalGeodesic>,
    j0: DVector<f64>,
    j0p: DVector<f64>,
}

impl JacobiField {
    pub fn new(geodesic: Arc<HorizontalGeodesic>, j0: DVector<f64>, j0p: DVector<f64>) -> Result<Self> {
        let d = geodesic.normal_dimension();
        for v in [&j0, &j0p] {
            if v.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: v.len() });
            }
        }
        Ok(Self { geodesic, j0, j0p })
    }

    /// Field with the given ambient value and derivative at `γ(a)`; both must
    /// be normal to the geodesic.
    pub fn from_ambient(
        geodesic: Arc<HorizontalGeodesic>,
        value: &DVector<f64>,
        derivative: &DVector<f64>,
    ) -> Result<Self> {
        let frame = geodesic.normal_frame().clone();
        let mut coords = Vec::with_capacity(2);
        for v in [value, derivative] {
            geodesic.space().check_dim(v)?;
            let c = frame.transpose() * v;
            let residual = (v - &frame * &c).norm();
            if residual > NORMAL_TOL * v.norm().max(1.0) {
                return Err(Error::NotNormal { residual });
            }
            coords.push(c);
        }
        let j0p = coords.pop().expect("two entries");
        let j0 = coords.pop().expect("two entries");
        Ok(Self { geodesic, j0, j0p })
    }

    /// Field from a stacked initial-condition vector `[J(a); J′(a)]`.
    pub fn from_initial(geodesic: Arc<HorizontalGeodesic>, z: &DVector<f64>) -> Result<Self> {
        let d = geodesic.normal_dimension();
        if z.len() != 2 * d {
            return Err(Error::DimensionMismatch { expected: 2 * d, found: z.len() });
        }
        Ok(Self { j0: z.rows(0, d).into_owned(), j0p: z.rows(d, d).into_owned(), geodesic })
    }

    pub fn geodesic(&self) -> &Arc<HorizontalGeodesic> {
        &self.geodesic
    }

    pub fn initial_value(&self) -> &DVector<f64> {
        &self.j0
    }

    pub fn initial_derivative(&self) -> &DVector<f64> {
        &self.j0p
    }

    pub fn initial_conditions(&self) -> DVector<f64> {
        let d = self.j0.len();
        let mut z = DVector::zeros(2 * d);
        z.rows_mut(0, d).copy_from(&self.j0);
        z.rows_mut(d, d).copy_from(&self.j0p);
        z
    }

    fn coefficients(&self, t: f64) -> (f64, f64, f64, f64) {
        let tau = t - self.geodesic.left();
        let w = self.geodesic.rate();
        if w == 0.0 {
            (1.0, tau, 0.0, 1.0)
        } else {
            let (s, c) = (w * tau).sin_cos();
            (c, s / w, -w * s, c)
        }
    }

    /// `J(t)` in frame coordinates.
    pub fn value(&self, t: f64) -> DVector<f64> {
        let (c0, c1, _, _) = self.coefficients(t);
        &self.j0 * c0 + &self.j0p * c1
    }

    /// `J′(t)` in frame coordinates.
    pub fn derivative(&self, t: f64) -> DVector<f64> {
        let (_, _, d0, d1) = self.coefficients(t);
        &self.j0 * d0 + &self.j0p * d1
    }

    pub fn ambient_value(&self, t: f64) -> DVector<f64> {
        self.geodesic.normal_frame() * self.value(t)
    }

    pub fn ambient_derivative(&self, t: f64) -> DVector<f64> {
        self.geodesic.normal_frame() * self.derivative(t)
    }
}

fn same_geodesic(a: &JacobiField, b: &JacobiField) -> Result<()> {
    if Arc::ptr_eq(&a.geodesic, &b.geodesic) || a.geodesic.same_curve(&b.geodesic) {
        Ok(())
    } else {
        Err(Error::GeodesicMismatch)
    }
}

/// Symplectic Wronskian `ω(J₁, J₂) = ⟨J₁′, J₂⟩ − ⟨J₁, J₂′⟩` at the left
/// endpoint. It is constant along the geodesic.
pub fn wronskian(j1: &JacobiField, j2: &JacobiField) -> Result<f64> {
    same_geodesic(j1, j2)?;
    Ok(j1.j0p.dot(&j2.j0) - j1.j0.dot(&j2.j0p))
}

/// The same expression evaluated at an arbitrary parameter.
pub fn wronskian_at(j1: &JacobiField, j2: &JacobiField, t: f64) -> Result<f64> {
    same_geodesic(j1, j2)?;
    Ok(j1.derivative(t).dot(&j2.value(t)) - j1.value(t).dot(&j2.derivative(t)))
}

/// Matrix `Ω` with `ω(J₁, J₂) = z₁ᵀ Ω z₂` on stacked initial conditions.
pub(crate) fn symplectic_matrix(d: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        m[(i, d + i)] = -1.0;
        m[(d + i, i)] = 1.0;
    }
    m
}
