//! Orbit foliations of connected linear isometry groups, described by a list
//! of skew-symmetric generators. The Killing field of a generator `A` is
//! `x ↦ A x`, and the leaf through `x` is spanned by the `A_i x`.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geodesic::HorizontalGeodesic;
use crate::geometry::{
    full_svd, null_space, orthogonal_complement, span_of_columns, AmbientSpace, Subspace, ToleranceProfile, NORMAL_TOL,
};
use crate::random::{gaussian_vector, random_point};

/// Skew-symmetry tolerance `‖A + Aᵀ‖ ≤ tol·‖A‖`.
pub const SKEW_TOL: f64 = 1e-12;

/// Number of random points used to estimate the regular leaf dimension.
pub const CODIM_SAMPLES: usize = 64;

const CODIM_SEED: u64 = 0x00c0_d1e5;

/// An isometric linear action given by Lie-algebra generators.
#[derive(Debug, Clone)]
pub struct ActionSpec {
    space: AmbientSpace,
    generators: Vec<DMatrix<f64>>,
    basis: Vec<DMatrix<f64>>,
    name: Option<String>,
    max_leaf_dim: usize,
}

/// Position of a point in the canonical stratification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StratumInfo {
    pub leaf_dim: usize,
    pub cohomogeneity: usize,
    pub quotient_codim: usize,
}

impl StratumInfo {
    /// Strata of quotient codimension at most two are infinitesimally polar.
    pub fn forced_polar(&self) -> bool {
        self.quotient_codim <= 2
    }
}

impl ActionSpec {
    pub fn new(space: AmbientSpace, generators: Vec<DMatrix<f64>>, name: Option<String>) -> Result<Self> {
        Self::with_codim_samples(space, generators, name, CODIM_SAMPLES, CODIM_SEED)
    }

    /// Builds the action, estimating the regular leaf dimension from
    /// `samples` seeded random points.
    pub fn with_codim_samples(
        space: AmbientSpace,
        generators: Vec<DMatrix<f64>>,
        name: Option<String>,
        samples: usize,
        seed: u64,
    ) -> Result<Self> {
        let n = space.dimension();
        for (index, a) in generators.iter().enumerate() {
            if a.nrows() != n || a.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, found: a.nrows().max(a.ncols()) });
            }
            let ratio = skew_ratio(a);
            if ratio > SKEW_TOL {
                return Err(Error::NotSkew { index, ratio });
            }
        }
        let basis = orthonormal_generator_basis(n, &generators);
        let mut action = Self { space, generators, basis, name, max_leaf_dim: 0 };
        action.max_leaf_dim = action.estimate_max_leaf_dim(samples.max(1), seed);
        Ok(action)
    }

    pub fn space(&self) -> &AmbientSpace {
        &self.space
    }

    pub fn generators(&self) -> &[DMatrix<f64>] {
        &self.generators
    }

    /// Frobenius-orthonormal basis of the generator span.
    pub fn basis(&self) -> &[DMatrix<f64>] {
        &self.basis
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| format!("custom({} generators)", self.generators.len()))
    }

    /// Same generators acting on the sphere of curvature `curvature`.
    pub fn on_sphere(&self, curvature: f64) -> Result<Self> {
        let space = AmbientSpace::sphere(self.space.dimension(), curvature)?;
        let name = self.name.as_ref().map(|n| format!("{n}@S(k={curvature})"));
        Self::new(space, self.generators.clone(), name)
    }

    /// Same generators acting on the Euclidean space (the cone of a sphere
    /// action).
    pub fn euclidean_cone(&self) -> Self {
        if !self.space.is_sphere() {
            return self.clone();
        }
        let space = AmbientSpace::euclidean_unchecked(self.space.dimension());
        let mut action = Self {
            space,
            generators: self.generators.clone(),
            basis: self.basis.clone(),
            name: self.name.clone(),
            max_leaf_dim: 0,
        };
        action.max_leaf_dim = action.estimate_max_leaf_dim(CODIM_SAMPLES, CODIM_SEED);
        action
    }

    /// Maximal leaf dimension found by sampling (the regular leaf dimension).
    pub fn max_leaf_dim(&self) -> usize {
        self.max_leaf_dim
    }

    /// `codim(ℱ, M)`: cohomogeneity of the regular leaves.
    pub fn codimension(&self) -> usize {
        self.space.manifold_dimension() - self.max_leaf_dim
    }

    fn estimate_max_leaf_dim(&self, samples: usize, seed: u64) -> usize {
        if self.basis.is_empty() || self.space.dimension() == 0 {
            return 0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let profile = ToleranceProfile::default();
        (0..samples)
            .map(|_| {
                let x = random_point(&self.space, &mut rng);
                self.killing_rank(&x, &profile)
            })
            .max()
            .unwrap_or(0)
    }

    pub(crate) fn killing_matrix(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.space.dimension();
        let mut k = DMatrix::zeros(n, self.basis.len());
        for (j, a) in self.basis.iter().enumerate() {
            k.set_column(j, &(a * x));
        }
        k
    }

    fn killing_rank(&self, x: &DVector<f64>, profile: &ToleranceProfile) -> usize {
        span_of_columns(&self.killing_matrix(x), profile).0
    }

    fn check_point(&self, x: &DVector<f64>) -> Result<()> {
        self.space.check_point(x)
    }

    /// `T_x L(x) = span{A_i x}`.
    pub fn leaf_tangent(&self, x: &DVector<f64>, profile: &ToleranceProfile) -> Result<Subspace> {
        self.check_point(x)?;
        let (_, sub) = span_of_columns(&self.killing_matrix(x), profile);
        debug_assert!(!self.space.is_sphere() || (sub.basis().transpose() * x).norm() <= 1e-8 * x.norm());
        Ok(sub)
    }

    pub fn leaf_dimension(&self, x: &DVector<f64>, profile: &ToleranceProfile) -> Result<usize> {
        Ok(self.leaf_tangent(x, profile)?.rank())
    }

    pub fn is_regular(&self, x: &DVector<f64>, profile: &ToleranceProfile) -> Result<bool> {
        Ok(self.leaf_dimension(x, profile)? == self.max_leaf_dim)
    }

    /// Leaf dimension, cohomogeneity and quotient codimension at `x`.
    ///
    /// Near `x` the stratum is `L(x)` times the fixed space of the isotropy
    /// algebra in the normal space, so `codim(ℱ, Σˣ)` is that fixed-space
    /// dimension.
    pub fn stratum_of(&self, x: &DVector<f64>, profile: &ToleranceProfile) -> Result<StratumInfo> {
        let leaf_dim = self.leaf_dimension(x, profile)?;
        let cohomogeneity = self.space.manifold_dimension() - leaf_dim;
        let slice = self.slice_representation(x, profile)?;
        let fixed = slice.fixed_space(profile).rank();
        let quotient_codim = self.codimension().saturating_sub(fixed);
        Ok(StratumInfo { leaf_dim, cohomogeneity, quotient_codim })
    }

    /// Common kernel of all generators (Euclidean fixed space).
    pub fn fixed_space(&self, profile: &ToleranceProfile) -> Subspace {
        let n = self.space.dimension();
        if self.basis.is_empty() {
            return Subspace::full(n);
        }
        let mut stacked = DMatrix::zeros(n * self.basis.len(), n);
        for (i, a) in self.basis.iter().enumerate() {
            stacked.view_mut((i * n, 0), (n, n)).copy_from(a);
        }
        Subspace::from_orthonormal(null_space(&stacked, profile))
    }

    /// Basis of `{A ∈ span(generators) : A x = 0}`.
    pub fn isotropy_algebra(&self, x: &DVector<f64>, profile: &ToleranceProfile) -> Result<Vec<DMatrix<f64>>> {
        self.check_point(x)?;
        let k = self.killing_matrix(x);
        Ok(combine(&self.basis, &null_space(&k, profile)))
    }

    /// Combinations of the generator basis whose Killing fields at `x` are
    /// linearly independent (a basis of the algebra modulo isotropy).
    pub(crate) fn transversal_generators(&self, x: &DVector<f64>, profile: &ToleranceProfile) -> Vec<DMatrix<f64>> {
        let k = self.killing_matrix(x);
        if k.ncols() == 0 {
            return Vec::new();
        }
        let svd = full_svd(&k);
        let rank = profile.rank_at_scale(&svd.sigma, svd.sigma[0]);
        combine(&self.basis, &svd.v.columns(0, rank).into_owned())
    }

    /// Normal space `H_x` of the orbit inside the manifold tangent space.
    pub fn horizontal_space(&self, x: &DVector<f64>, profile: &ToleranceProfile) -> Result<Subspace> {
        let leaf = self.leaf_tangent(x, profile)?;
        orthogonal_complement(&leaf, &self.space.tangent_space(x))
    }

    /// Isotropy algebra restricted to `H_x`, written in an orthonormal basis
    /// of `H_x`.
    pub fn slice_representation(&self, x: &DVector<f64>, profile: &ToleranceProfile) -> Result<ActionSpec> {
        let leaf_dim = self.leaf_dimension(x, profile)?;
        self.slice_with_leaf_dim(x, leaf_dim)
    }

    /// Slice representation at a point known to lie on the stratum of leaf
    /// dimension `leaf_dim`: the `leaf_dim` dominant Killing directions span
    /// the leaf and the remaining singular directions the isotropy. Useful
    /// at numerically located singular points.
    pub fn slice_with_leaf_dim(&self, x: &DVector<f64>, leaf_dim: usize) -> Result<ActionSpec> {
        self.check_point(x)?;
        let n = self.space.dimension();
        let m = self.basis.len();
        if leaf_dim > m.min(self.space.manifold_dimension()) {
            return Err(Error::InvalidArgument(format!("leaf dimension {leaf_dim} exceeds {m} generators")));
        }
        let (leaf, isotropy) = if m == 0 {
            (Subspace::zero(n), Vec::new())
        } else {
            let svd = full_svd(&self.killing_matrix(x));
            let leaf = Subspace::from_orthonormal(svd.u.columns(0, leaf_dim).into_owned());
            (leaf, combine(&self.basis, &svd.v.columns(leaf_dim, m - leaf_dim).into_owned()))
        };
        let h = orthogonal_complement(&leaf, &self.space.tangent_space(x))?;
        let q = h.basis();
        let gens: Vec<DMatrix<f64>> = isotropy
            .iter()
            .map(|a| {
                let r = q.transpose() * a * q;
                (&r - r.transpose()) * 0.5
            })
            .collect();
        let space = AmbientSpace::euclidean_unchecked(q.ncols());
        let basis = orthonormal_generator_basis(q.ncols(), &gens);
        let name = Some(format!("slice of {}", self.label()));
        let mut slice = ActionSpec { space, generators: gens, basis, name, max_leaf_dim: 0 };
        slice.max_leaf_dim = slice.estimate_max_leaf_dim(CODIM_SAMPLES, CODIM_SEED);
        Ok(slice)
    }

    /// Largest `|⟨v, A_i x⟩| / |A_i|` over the generator basis.
    pub fn vertical_residual(&self, x: &DVector<f64>, v: &DVector<f64>) -> f64 {
        self.basis.iter().map(|a| v.dot(&(a * x)).abs()).fold(0.0, f64::max)
    }

    /// Horizontal geodesic through `x` with initial direction `v`.
    pub fn make_horizontal_geodesic(
        &self,
        x: &DVector<f64>,
        v: &DVector<f64>,
        interval: (f64, f64),
    ) -> Result<HorizontalGeodesic> {
        self.check_point(x)?;
        self.space.check_dim(v)?;
        let norm = v.norm();
        if norm < 1e-300 {
            return Err(Error::ZeroDirection);
        }
        let unit = v / norm;
        let scale = x.norm().max(1e-300);
        let residual = self.vertical_residual(x, &unit) / scale.max(1.0);
        if residual > NORMAL_TOL {
            return Err(Error::NotHorizontal { residual });
        }
        HorizontalGeodesic::new(self.space, x.clone(), unit, interval)
    }

    /// Checks that `γ` meets the orbit of its left endpoint perpendicularly.
    pub fn check_horizontal(&self, g: &HorizontalGeodesic) -> Result<()> {
        if g.space() != &self.space {
            return Err(Error::GeodesicMismatch);
        }
        let t = g.left();
        let x = g.point(t);
        let residual = self.vertical_residual(&x, &g.unit_tangent(t)) / x.norm().max(1.0);
        if residual > NORMAL_TOL {
            return Err(Error::NotHorizontal { residual });
        }
        Ok(())
    }

    /// Random unit horizontal direction at `x` (None if `H_x` is trivial
    /// beyond the excluded directions).
    pub fn random_horizontal_direction<R: rand::Rng>(
        &self,
        x: &DVector<f64>,
        profile: &ToleranceProfile,
        rng: &mut R,
    ) -> Result<Option<DVector<f64>>> {
        let h = self.horizontal_space(x, profile)?;
        if h.rank() == 0 {
            return Ok(None);
        }
        let c = gaussian_vector(h.rank(), rng);
        Ok(Some((h.basis() * c).normalize()))
    }
}

fn skew_ratio(a: &DMatrix<f64>) -> f64 {
    let norm = a.norm();
    if norm == 0.0 {
        0.0
    } else {
        (a + a.transpose()).norm() / norm
    }
}

fn combine(basis: &[DMatrix<f64>], coeffs: &DMatrix<f64>) -> Vec<DMatrix<f64>> {
    coeffs
        .column_iter()
        .map(|c| {
            let mut m = DMatrix::zeros(basis[0].nrows(), basis[0].ncols());
            for (i, b) in basis.iter().enumerate() {
                m += b * c[i];
            }
            m
        })
        .collect()
}

fn orthonormal_generator_basis(n: usize, generators: &[DMatrix<f64>]) -> Vec<DMatrix<f64>> {
    if generators.is_empty() || n == 0 {
        return Vec::new();
    }
    let mut stacked = DMatrix::zeros(n * n, generators.len());
    for (j, a) in generators.iter().enumerate() {
        stacked.set_column(j, &DVector::from_column_slice(a.as_slice()));
    }
    let profile = ToleranceProfile { rank_rel_tol: 1e-10, ..Default::default() };
    let (_, span) = span_of_columns(&stacked, &profile);
    span.basis()
        .column_iter()
        .map(|c| {
            let m = DMatrix::from_column_slice(n, n, c.as_slice());
            (&m - m.transpose()) * 0.5
        })
        .collect()
}
