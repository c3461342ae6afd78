//! Constant-curvature ambient spaces and the tolerant linear algebra that
//! every rank decision in the crate goes through.
//!
//! Points and vectors are always kept in the coordinates of the embedding
//! space ℝⁿ. A sphere of curvature κ is the set `|x|² = 1/κ`, and its tangent
//! space at `x` is `x^⊥`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for the sphere constraint `|x|²κ = 1`.
pub const SPHERE_TOL: f64 = 1e-10;

/// Tolerance used for normality and horizontality preconditions.
pub const NORMAL_TOL: f64 = 1e-8;

/// Ambient constant-curvature space: ℝⁿ (κ = 0) or the round sphere of
/// curvature κ embedded in ℝⁿ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmbientSpace {
    dimension: usize,
    curvature: f64,
}

impl AmbientSpace {
    pub fn new(dimension: usize, curvature: f64) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::InvalidSpace(format!("dimension {dimension} < 2")));
        }
        if !(curvature >= 0.0) || !curvature.is_finite() {
            return Err(Error::InvalidSpace(format!("curvature {curvature} must be >= 0")));
        }
        Ok(Self { dimension, curvature })
    }

    pub fn euclidean(dimension: usize) -> Result<Self> {
        Self::new(dimension, 0.0)
    }

    pub fn sphere(dimension: usize, curvature: f64) -> Result<Self> {
        if curvature <= 0.0 {
            return Err(Error::InvalidSpace("sphere curvature must be positive".into()));
        }
        Self::new(dimension, curvature)
    }

    /// Euclidean space of any dimension, including 0 and 1. Slice
    /// representations live on normal spaces that can be this small.
    pub(crate) fn euclidean_unchecked(dimension: usize) -> Self {
        Self { dimension, curvature: 0.0 }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn curvature(&self) -> f64 {
        self.curvature
    }

    pub fn is_sphere(&self) -> bool {
        self.curvature > 0.0
    }

    /// Dimension of the manifold itself (n for ℝⁿ, n − 1 for the sphere).
    pub fn manifold_dimension(&self) -> usize {
        if self.is_sphere() {
            self.dimension - 1
        } else {
            self.dimension
        }
    }

    /// Radius `1/√κ` of the sphere; infinite for Euclidean space.
    pub fn radius(&self) -> f64 {
        if self.is_sphere() {
            1.0 / self.curvature.sqrt()
        } else {
            f64::INFINITY
        }
    }

    /// Validates a point. Sphere points must satisfy `|x|²κ = 1` to
    /// [`SPHERE_TOL`].
    pub fn check_point(&self, x: &DVector<f64>) -> Result<()> {
        self.check_dim(x)?;
        if self.is_sphere() {
            let value = x.norm_squared() * self.curvature;
            if (value - 1.0).abs() > SPHERE_TOL {
                return Err(Error::OffSphere { value });
            }
        }
        Ok(())
    }

    /// Validates and renormalizes a point onto the sphere.
    pub fn normalize_point(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_point(x)?;
        if self.is_sphere() {
            Ok(x * (self.radius() / x.norm()))
        } else {
            Ok(x.clone())
        }
    }

    pub fn check_dim(&self, v: &DVector<f64>) -> Result<()> {
        if v.len() != self.dimension {
            return Err(Error::DimensionMismatch { expected: self.dimension, found: v.len() });
        }
        Ok(())
    }

    /// Orthonormal basis of the manifold tangent space at `x`.
    pub fn tangent_space(&self, x: &DVector<f64>) -> Subspace {
        let full = Subspace::full(self.dimension);
        if self.is_sphere() {
            let radial =
                Subspace::from_orthonormal(DMatrix::from_column_slice(self.dimension, 1, x.normalize().as_slice()));
            orthogonal_complement(&radial, &full).expect("dimensions agree")
        } else {
            full
        }
    }
}

/// Tolerances controlling rank decisions, finite differences and event
/// refinement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceProfile {
    /// Relative singular-value cutoff.
    pub rank_rel_tol: f64,
    /// Absolute floor below which a vector set counts as zero.
    pub zero_abs_tol: f64,
    /// Finite-difference step, relative to the local length scale.
    pub fd_step: f64,
    /// Event refinement resolution, relative to the interval length.
    pub bisect_resolution: f64,
    /// Number of grid points used by event scans.
    pub grid_points: usize,
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        Self { rank_rel_tol: 1e-8, zero_abs_tol: 1e-12, fd_step: 1e-5, bisect_resolution: 1e-10, grid_points: 2048 }
    }
}

impl ToleranceProfile {
    pub fn validate(&self) -> Result<()> {
        let all = [self.rank_rel_tol, self.zero_abs_tol, self.fd_step, self.bisect_resolution];
        if all.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidTolerance("all tolerances must be strictly positive".into()));
        }
        if self.rank_rel_tol >= 1.0 {
            return Err(Error::InvalidTolerance("rank_rel_tol must be < 1".into()));
        }
        if self.grid_points < 8 {
            return Err(Error::InvalidTolerance("grid_points must be >= 8".into()));
        }
        Ok(())
    }

    /// Number of singular values counted as non-zero relative to `scale`.
    pub fn rank_at_scale(&self, singular_values: &[f64], scale: f64) -> usize {
        if scale < self.zero_abs_tol {
            return 0;
        }
        let cut = self.rank_rel_tol * scale;
        singular_values.iter().filter(|s| **s >= cut).count()
    }
}

/// A linear subspace of ℝⁿ given by an orthonormal basis (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: DMatrix<f64>,
}

impl Subspace {
    /// Wraps a matrix whose columns are assumed orthonormal.
    pub fn from_orthonormal(basis: DMatrix<f64>) -> Self {
        Self { basis }
    }

    pub fn zero(ambient_dimension: usize) -> Self {
        Self { basis: DMatrix::zeros(ambient_dimension, 0) }
    }

    pub fn full(ambient_dimension: usize) -> Self {
        Self { basis: DMatrix::identity(ambient_dimension, ambient_dimension) }
    }

    pub fn ambient_dimension(&self) -> usize {
        self.basis.nrows()
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn vectors(&self) -> Vec<DVector<f64>> {
        self.basis.column_iter().map(|c| c.into_owned()).collect()
    }

    /// Orthogonal projector `B Bᵀ` onto the subspace.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    /// Largest principal-angle sine between two subspaces of equal rank,
    /// `‖(I − P_other) B‖₂`.
    pub fn distance(&self, other: &Subspace) -> Result<f64> {
        if self.ambient_dimension() != other.ambient_dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dimension(),
                found: other.ambient_dimension(),
            });
        }
        if self.rank() != other.rank() {
            return Ok(1.0);
        }
        if self.rank() == 0 {
            return Ok(0.0);
        }
        let residual = &self.basis - other.projector() * &self.basis;
        Ok(spectral_norm(&residual))
    }
}

/// Singular values of `m` in descending order (empty for degenerate shapes).
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Full singular value decomposition `m = U Σ Vᵀ` with `U` square (rows×rows)
/// truncated to `min(rows, cols)` leading columns, and `V` square (cols×cols).
/// Singular values sorted descending; padded with zeros to `cols`.
pub(crate) struct FullSvd {
    pub u: DMatrix<f64>,
    pub sigma: Vec<f64>,
    pub v: DMatrix<f64>,
}

pub(crate) fn full_svd(m: &DMatrix<f64>) -> FullSvd {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return FullSvd { u: DMatrix::zeros(rows, 0), sigma: vec![0.0; cols], v: DMatrix::identity(cols, cols) };
    }
    // Pad with zero rows so the thin decomposition yields a complete V.
    let padded = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(true, true);
    let u_all = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V^T");
    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| {
        svd.singular_values[j].partial_cmp(&svd.singular_values[i]).unwrap_or(std::cmp::Ordering::Equal)
    });
    let keep = rows.min(cols);
    let mut u = DMatrix::zeros(rows, keep);
    let mut v = DMatrix::zeros(cols, cols);
    let mut sigma = Vec::with_capacity(cols);
    for (dst, &src) in order.iter().enumerate() {
        sigma.push(svd.singular_values[src]);
        v.set_column(dst, &vt.row(src).transpose());
        if dst < keep {
            u.set_column(dst, &u_all.column(src).rows(0, rows).into_owned());
        }
    }
    FullSvd { u, sigma, v }
}

fn stack(dimension: usize, vectors: &[DVector<f64>]) -> Result<DMatrix<f64>> {
    for v in vectors {
        if v.len() != dimension {
            return Err(Error::DimensionMismatch { expected: dimension, found: v.len() });
        }
    }
    let mut m = DMatrix::zeros(dimension, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        m.set_column(j, v);
    }
    Ok(m)
}

/// Numerical rank of a set of vectors and an orthonormal basis of their span.
///
/// The rank counts singular values at or above `rank_rel_tol` times the
/// largest one; a set whose largest singular value is below `zero_abs_tol`
/// has rank 0.
pub fn rank_with_tol(
    ambient_dimension: usize,
    vectors: &[DVector<f64>],
    profile: &ToleranceProfile,
) -> Result<(usize, Subspace)> {
    let m = stack(ambient_dimension, vectors)?;
    Ok(span_of_columns(&m, profile))
}

/// Same as [`rank_with_tol`] for the columns of a matrix.
pub fn span_of_columns(m: &DMatrix<f64>, profile: &ToleranceProfile) -> (usize, Subspace) {
    if m.ncols() == 0 || m.nrows() == 0 {
        return (0, Subspace::zero(m.nrows()));
    }
    let svd = full_svd(m);
    let scale = svd.sigma[0];
    let rank = profile.rank_at_scale(&svd.sigma, scale).min(svd.u.ncols());
    let basis = svd.u.columns(0, rank).into_owned();
    (rank, Subspace::from_orthonormal(basis))
}

/// Orthonormal basis of the null space of `m`, with the rank decided
/// relative to the largest singular value.
pub(crate) fn null_space(m: &DMatrix<f64>, profile: &ToleranceProfile) -> DMatrix<f64> {
    let cols = m.ncols();
    if cols == 0 {
        return DMatrix::zeros(0, 0);
    }
    let svd = full_svd(m);
    let rank = profile.rank_at_scale(&svd.sigma, svd.sigma[0]);
    svd.v.columns(rank, cols - rank).into_owned()
}

/// Orthogonal projection of `v` onto `sub`.
pub fn project_onto(sub: &Subspace, v: &DVector<f64>) -> Result<DVector<f64>> {
    if v.len() != sub.ambient_dimension() {
        return Err(Error::DimensionMismatch { expected: sub.ambient_dimension(), found: v.len() });
    }
    let coeffs = sub.basis.transpose() * v;
    Ok(&sub.basis * coeffs)
}

/// Orthonormal basis of the orthogonal complement of `sub` inside `within`.
pub fn orthogonal_complement(sub: &Subspace, within: &Subspace) -> Result<Subspace> {
    if sub.ambient_dimension() != within.ambient_dimension() {
        return Err(Error::DimensionMismatch { expected: within.ambient_dimension(), found: sub.ambient_dimension() });
    }
    let w = within.basis();
    if w.ncols() == 0 {
        return Ok(Subspace::zero(w.nrows()));
    }
    // Coordinates of `sub` inside `within`, then the complement there.
    let coords = w.transpose() * sub.basis();
    let k = coords.ncols();
    let comp_coords = if k == 0 {
        DMatrix::identity(w.ncols(), w.ncols())
    } else {
        let svd = full_svd(&coords.transpose());
        let rank = ToleranceProfile::default().rank_at_scale(&svd.sigma, 1.0);
        svd.v.columns(rank, w.ncols() - rank).into_owned()
    };
    Ok(Subspace::from_orthonormal(w * comp_coords))
}

/// Curvature endomorphism `R(u) = R(u, γ′)γ′` of the constant-curvature
/// space at `point`, for a unit geodesic direction.
pub fn curvature_endomorphism(
    space: &AmbientSpace,
    point: &DVector<f64>,
    direction: &DVector<f64>,
    u: &DVector<f64>,
) -> Result<DVector<f64>> {
    space.check_dim(point)?;
    space.check_dim(direction)?;
    space.check_dim(u)?;
    let scale = u.norm().max(1.0);
    let mut residual = u.dot(direction).abs();
    if space.is_sphere() {
        residual = residual.max(u.dot(point).abs() * space.curvature().sqrt());
    }
    if residual > NORMAL_TOL * scale {
        return Err(Error::NotNormal { residual });
    }
    Ok(u * space.curvature())
}
