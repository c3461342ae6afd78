use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::field::{symplectic_matrix, JacobiField};
use crate::action::ActionSpec;
use crate::error::{Error, Result};
use crate::geodesic::HorizontalGeodesic;
use crate::geometry::{
    full_svd, null_space, orthogonal_complement, singular_values, span_of_columns, Subspace, ToleranceProfile,
};

/// Pairwise `|ω|` allowed in an isotropic family, relative to the squared
/// initial-condition scale.
pub const ISOTROPY_TOL: f64 = 1e-9;

const GENERIC_SEED: u64 = 0x9e37_79b9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Lagrangian,
    Isotropic,
    General,
}

/// An ordered, linearly independent list of Jacobi fields along one
/// geodesic.
#[derive(Debug, Clone)]
pub struct JacobiFamily {
    geodesic: Arc<HorizontalGeodesic>,
    fields: Vec<JacobiField>,
    kind: FamilyKind,
}

impl JacobiFamily {
    pub fn new(geodesic: Arc<HorizontalGeodesic>, fields: Vec<JacobiField>, kind: FamilyKind) -> Result<Self> {
        for f in &fields {
            if !Arc::ptr_eq(f.geodesic(), &geodesic) && !f.geodesic().same_curve(&geodesic) {
                return Err(Error::GeodesicMismatch);
            }
        }
        let family = Self { geodesic, fields, kind };
        let z = family.initial_matrix();
        if !family.is_empty() {
            let sv = singular_values(&z);
            let rank = ToleranceProfile::default().rank_at_scale(&sv, sv[0]);
            if rank < family.len() {
                return Err(Error::InvalidArgument(format!(
                    "fields are linearly dependent (rank {rank} < {})",
                    family.len()
                )));
            }
        }
        match kind {
            FamilyKind::General => {}
            FamilyKind::Isotropic | FamilyKind::Lagrangian => {
                let max = family.max_pairing();
                let scale = z.iter().map(|v| v * v).fold(0.0, f64::max).max(1.0);
                if max > ISOTROPY_TOL * scale {
                    return Err(Error::NotIsotropic { max });
                }
                if kind == FamilyKind::Lagrangian && family.len() != family.geodesic.normal_dimension() {
                    return Err(Error::InvalidArgument(format!(
                        "Lagrangian family must have {} fields, found {}",
                        family.geodesic.normal_dimension(),
                        family.len()
                    )));
                }
            }
        }
        Ok(family)
    }

    pub fn geodesic(&self) -> &Arc<HorizontalGeodesic> {
        &self.geodesic
    }

    pub fn fields(&self) -> &[JacobiField] {
        &self.fields
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    fn normal_dim(&self) -> usize {
        self.geodesic.normal_dimension()
    }

    /// Stacked initial conditions, one column per field (`2d × k`).
    pub fn initial_matrix(&self) -> DMatrix<f64> {
        let d = self.normal_dim();
        let mut z = DMatrix::zeros(2 * d, self.len());
        for (j, f) in self.fields.iter().enumerate() {
            z.set_column(j, &f.initial_conditions());
        }
        z
    }

    /// `[J₁(t) … J_k(t)]` in frame coordinates.
    pub fn evaluation(&self, t: f64) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.normal_dim(), self.len());
        for (j, f) in self.fields.iter().enumerate() {
            m.set_column(j, &f.value(t));
        }
        m
    }

    pub fn derivative_matrix(&self, t: f64) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.normal_dim(), self.len());
        for (j, f) in self.fields.iter().enumerate() {
            m.set_column(j, &f.derivative(t));
        }
        m
    }

    /// `W(t) = {J(t) | J ∈ W}` as an ambient subspace.
    pub fn evaluation_space(&self, t: f64, profile: &ToleranceProfile) -> Subspace {
        let m = self.geodesic.normal_frame() * self.evaluation(t);
        span_of_columns(&m, profile).1
    }

    /// Matrix of pairings `ω(J_i, J_j)`.
    pub fn omega_matrix(&self) -> DMatrix<f64> {
        let z = self.initial_matrix();
        z.transpose() * symplectic_matrix(self.normal_dim()) * z
    }

    pub fn max_pairing(&self) -> f64 {
        self.omega_matrix().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Least-squares coordinates of `other`'s fields in this family, with the
    /// relative residual.
    pub(crate) fn coordinates_of(&self, other: &JacobiFamily) -> (DMatrix<f64>, f64) {
        let z = self.initial_matrix();
        let target = other.initial_matrix();
        if other.is_empty() {
            return (DMatrix::zeros(self.len(), 0), 0.0);
        }
        if self.is_empty() {
            return (DMatrix::zeros(0, other.len()), 1.0);
        }
        let svd = z.clone().svd(true, true);
        let coords = svd.solve(&target, 1e-12).expect("U and V requested");
        let residual = (&z * &coords - &target).norm() / target.norm().max(1e-300);
        (coords, residual)
    }

    pub(crate) fn from_initial_columns(
        geodesic: Arc<HorizontalGeodesic>,
        z: &DMatrix<f64>,
        kind: FamilyKind,
    ) -> Result<Self> {
        let fields = z
            .column_iter()
            .map(|c| JacobiField::from_initial(geodesic.clone(), &c.into_owned()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(geodesic, fields, kind)
    }
}

fn killing_field(geodesic: &Arc<HorizontalGeodesic>, a: &DMatrix<f64>) -> Result<JacobiField> {
    let t = geodesic.left();
    // Both Aγ and Aγ′ are normal along a horizontal geodesic.
    let frame = geodesic.normal_frame();
    let j0 = frame.transpose() * (a * geodesic.point(t));
    let j0p = frame.transpose() * (a * geodesic.velocity(t));
    JacobiField::new(geodesic.clone(), j0, j0p)
}

/// Killing restriction `t ↦ A γ(t)` as a Jacobi field.
pub fn killing_jacobi_field(geodesic: &Arc<HorizontalGeodesic>, a: &DMatrix<f64>) -> Result<JacobiField> {
    killing_field(geodesic, a)
}

/// The Lagrangian `Λ` of Jacobi fields through horizontal geodesics starting
/// on the leaf `L(γ(a))`: Killing restrictions for the algebra modulo the
/// isotropy at `γ(a)`, plus spray fields `J(a) = 0`, `J′(a) = η` for `η`
/// normal to both the leaf and `γ′(a)`.
pub fn leaf_lagrangian(
    action: &ActionSpec,
    geodesic: &Arc<HorizontalGeodesic>,
    profile: &ToleranceProfile,
) -> Result<JacobiFamily> {
    action.check_horizontal(geodesic)?;
    let a = geodesic.left();
    let x = geodesic.point(a);
    let frame = geodesic.normal_frame();
    let d = geodesic.normal_dimension();

    let mut fields = Vec::with_capacity(d);
    for gen in action.transversal_generators(&x, profile) {
        fields.push(killing_field(geodesic, &gen)?);
    }
    let leaf = action.leaf_tangent(&x, profile)?;
    let leaf_in_frame = Subspace::from_orthonormal(frame.transpose() * leaf.basis());
    let spray = orthogonal_complement(&leaf_in_frame, &Subspace::full(d))?;
    for eta in spray.vectors() {
        fields.push(JacobiField::new(geodesic.clone(), DVector::zeros(d), eta)?);
    }
    if fields.len() != d {
        return Err(Error::Coherence(format!("leaf Lagrangian has {} fields, normal dimension is {d}", fields.len())));
    }
    JacobiFamily::new(geodesic.clone(), fields, FamilyKind::Lagrangian)
}

/// The vertical family `W`: span of all Killing restrictions along `γ`.
/// Its dimension is `d(γ)`, the maximal leaf dimension along `γ`.
pub fn vertical_family(
    action: &ActionSpec,
    geodesic: &Arc<HorizontalGeodesic>,
    profile: &ToleranceProfile,
) -> Result<JacobiFamily> {
    let (family, _) = vertical_family_with_generators(action, geodesic, profile)?;
    Ok(family)
}

/// Vertical family together with the generator combinations producing each
/// field.
pub fn vertical_family_with_generators(
    action: &ActionSpec,
    geodesic: &Arc<HorizontalGeodesic>,
    profile: &ToleranceProfile,
) -> Result<(JacobiFamily, Vec<DMatrix<f64>>)> {
    action.check_horizontal(geodesic)?;
    let basis = action.basis();
    let d = geodesic.normal_dimension();
    if basis.is_empty() {
        return Ok((JacobiFamily::new(geodesic.clone(), Vec::new(), FamilyKind::Isotropic)?, Vec::new()));
    }
    let mut z = DMatrix::zeros(2 * d, basis.len());
    for (j, gen) in basis.iter().enumerate() {
        z.set_column(j, &killing_field(geodesic, gen)?.initial_conditions());
    }
    let svd = full_svd(&z);
    let rank = profile.rank_at_scale(&svd.sigma, svd.sigma[0]);
    let coeffs = svd.v.columns(0, rank).into_owned();
    let gens: Vec<DMatrix<f64>> = coeffs
        .column_iter()
        .map(|c| {
            let mut m = DMatrix::zeros(basis[0].nrows(), basis[0].ncols());
            for (i, b) in basis.iter().enumerate() {
                m += b * c[i];
            }
            m
        })
        .collect();
    let fields = gens.iter().map(|g| killing_field(geodesic, g)).collect::<Result<Vec<_>>>()?;
    let family = JacobiFamily::new(geodesic.clone(), fields, FamilyKind::Isotropic)?;

    // The evaluation rank is maximal away from a discrete set; confirm that
    // a generic parameter realises the full dimension.
    let mut achieved = generic_evaluation_rank(&family, profile, 16, GENERIC_SEED);
    if achieved < rank {
        achieved = generic_evaluation_rank(&family, profile, 256, GENERIC_SEED + 1);
    }
    if achieved < rank {
        return Err(Error::Coherence(format!("vertical family has dimension {rank} but evaluates to rank {achieved}")));
    }
    Ok((family, gens))
}

fn generic_evaluation_rank(family: &JacobiFamily, profile: &ToleranceProfile, samples: usize, seed: u64) -> usize {
    let (a, b) = family.geodesic().interval();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let t = a + (b - a) * rng.random::<f64>();
            let sv = singular_values(&family.evaluation(t));
            profile.rank_at_scale(&sv, sv.first().copied().unwrap_or(0.0))
        })
        .max()
        .unwrap_or(0)
}

/// `W^⊥ = {J : ω(J, W_i) = 0 ∀ i}`.
pub fn symplectic_complement(family: &JacobiFamily) -> Result<JacobiFamily> {
    let d = family.geodesic().normal_dimension();
    let geodesic = family.geodesic().clone();
    if family.is_empty() {
        return JacobiFamily::from_initial_columns(geodesic, &DMatrix::identity(2 * d, 2 * d), FamilyKind::General);
    }
    let pairing = family.initial_matrix().transpose() * symplectic_matrix(d);
    let profile = ToleranceProfile::default();
    let kernel = null_space(&pairing, &profile);
    // The complement of an isotropic family contains it; it is Lagrangian
    // exactly when the family already was.
    let kind = if family.kind() == FamilyKind::Lagrangian { FamilyKind::Lagrangian } else { FamilyKind::General };
    JacobiFamily::from_initial_columns(geodesic, &kernel, kind)
}
