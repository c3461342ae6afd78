//! Index of the transversal Jacobi equation obtained by dividing a
//! Lagrangian by an isotropic subspace `W ⊆ Λ`.
//!
//! `W^ext(t)` is the continuous extension of `W(t)` across the points where
//! `W` drops rank: a kernel direction `v` of `[J₁(t) … J_k(t)]` contributes
//! `Σ v_i J_i′(t)` instead. `P_t` is the orthogonal projection onto the
//! complement of `W^ext(t)`, and the quotient index counts rank drops of
//! `P_t J(t)` for `J` in a complement of `W` inside `Λ`.

use nalgebra::DMatrix;

use super::family::{FamilyKind, JacobiFamily};
use super::focal::check_subinterval;
use crate::error::{Error, Result};
use crate::geometry::{full_svd, null_space, spectral_norm, ToleranceProfile};
use crate::scan::RankScan;

/// Residual allowed when expressing `W` inside `Λ`.
pub const CONTAINMENT_TOL: f64 = 1e-8;

/// Orthonormal basis of `W^ext(t)` (`d × k`).
pub(crate) fn extended_vertical_basis(w: &JacobiFamily, t: f64, profile: &ToleranceProfile) -> Result<DMatrix<f64>> {
    let k = w.len();
    let d = w.geodesic().normal_dimension();
    if k == 0 {
        return Ok(DMatrix::zeros(d, 0));
    }
    let m = w.evaluation(t);
    let mp = w.derivative_matrix(t);
    let svd = full_svd(&m);
    let scale = svd.sigma.first().copied().unwrap_or(0.0).max(spectral_norm(&mp));
    let cut = profile.rank_rel_tol * scale;
    let mut cols = DMatrix::zeros(d, k);
    for j in 0..k {
        let s = svd.sigma.get(j).copied().unwrap_or(0.0);
        if s >= cut && s > 0.0 {
            cols.set_column(j, &svd.u.column(j));
        } else {
            cols.set_column(j, &(&mp * svd.v.column(j)));
        }
    }
    let q = full_svd(&cols);
    let rank = profile.rank_at_scale(&q.sigma, q.sigma.first().copied().unwrap_or(0.0));
    if rank != k {
        return Err(Error::ExtensionDimension { t, expected: k, found: rank });
    }
    Ok(q.u.columns(0, k).into_owned())
}

/// Fields of `Λ` completing `W` to a basis of `Λ`.
pub(crate) fn quotient_complement(w: &JacobiFamily, lambda: &JacobiFamily) -> Result<JacobiFamily> {
    let (coords, residual) = lambda.coordinates_of(w);
    if residual > CONTAINMENT_TOL {
        return Err(Error::NotContained { residual });
    }
    let profile = ToleranceProfile::default();
    let comp = if w.is_empty() {
        DMatrix::identity(lambda.len(), lambda.len())
    } else {
        null_space(&coords.transpose(), &profile)
    };
    if comp.ncols() + w.len() != lambda.len() {
        return Err(Error::NotContained { residual });
    }
    let z = lambda.initial_matrix() * comp;
    JacobiFamily::from_initial_columns(lambda.geodesic().clone(), &z, FamilyKind::Isotropic)
}

/// `ind_{Λ/W}` on `interval`.
pub fn wilking_quotient_index(
    w: &JacobiFamily,
    lambda: &JacobiFamily,
    interval: (f64, f64),
    include_endpoints: (bool, bool),
    profile: &ToleranceProfile,
) -> Result<usize> {
    profile.validate()?;
    check_subinterval(lambda, interval)?;
    if !std::sync::Arc::ptr_eq(w.geodesic(), lambda.geodesic()) && !w.geodesic().same_curve(lambda.geodesic()) {
        return Err(Error::GeodesicMismatch);
    }
    if w.kind() == FamilyKind::General {
        return Err(Error::InvalidArgument("W must be isotropic".into()));
    }
    if lambda.kind() != FamilyKind::Lagrangian {
        return Err(Error::InvalidArgument("Λ must be Lagrangian".into()));
    }
    let comp = quotient_complement(w, lambda)?;
    if comp.is_empty() {
        return Ok(0);
    }
    let d = lambda.geodesic().normal_dimension();
    let eval = |t: f64| -> Result<DMatrix<f64>> {
        let q = extended_vertical_basis(w, t, profile)?;
        let p = DMatrix::identity(d, d) - &q * q.transpose();
        Ok(p * comp.evaluation(t))
    };
    let scan = RankScan { eval, expected_rank: comp.len(), interval, include_endpoints, profile };
    Ok(scan.run()?.iter().map(|e| e.deficiency).sum())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use nalgebra::DVector;

    use super::*;
    use crate::jacobi::{index, leaf_lagrangian, vertical_family};
    use crate::presets::Preset;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(x)
    }

    #[test]
    fn empty_w_gives_the_lagrangian_index() {
        let p = ToleranceProfile::default();
        let action = Preset::Trivial(3).action().unwrap();
        let g =
            Arc::new(action.make_horizontal_geodesic(&v(&[1.0, 0.0, 0.0]), &v(&[0.0, 1.0, 0.0]), (0.0, 2.0)).unwrap());
        let lam = leaf_lagrangian(&action, &g, &p).unwrap();
        let w = vertical_family(&action, &g, &p).unwrap();
        assert!(w.is_empty());
        let q = wilking_quotient_index(&w, &lam, (0.0, 2.0), (true, true), &p).unwrap();
        assert_eq!(q, index(&lam, (0.0, 2.0), (true, true), &p).unwrap());
        assert_eq!(q, 2);
    }

    #[test]
    fn w_equal_to_lambda_has_empty_quotient() {
        let p = ToleranceProfile::default();
        let action = Preset::So(2).action().unwrap();
        let g = Arc::new(action.make_horizontal_geodesic(&v(&[0.0, 0.0]), &v(&[1.0, 0.0]), (-1.0, 1.0)).unwrap());
        let lam = leaf_lagrangian(&action, &g, &p).unwrap();
        let w = vertical_family(&action, &g, &p).unwrap();
        assert_eq!(lam.len(), 1);
        assert_eq!(w.len(), 1);
        assert_eq!(wilking_quotient_index(&w, &lam, (-1.0, 1.0), (false, false), &p).unwrap(), 0);
    }

    #[test]
    fn hopf_line_splits_the_index() {
        let p = ToleranceProfile::default();
        let action = Preset::Hopf.action().unwrap();
        let x = v(&[1.0, 0.0, 0.3, 0.0]);
        let dir = v(&[-1.0, 0.15, -0.3, -0.5]);
        let g = Arc::new(action.make_horizontal_geodesic(&x, &dir, (0.0, 3.0)).unwrap());
        let lam = leaf_lagrangian(&action, &g, &p).unwrap();
        let w = vertical_family(&action, &g, &p).unwrap();
        let flags = (false, true);
        let total = index(&lam, (0.0, 3.0), flags, &p).unwrap();
        let vertical = index(&w, (0.0, 3.0), flags, &p).unwrap();
        let quotient = wilking_quotient_index(&w, &lam, (0.0, 3.0), flags, &p).unwrap();
        assert_eq!(vertical + quotient, total);
    }

    #[test]
    fn rejects_w_outside_lambda() {
        let p = ToleranceProfile::default();
        let action = Preset::Trivial(3).action().unwrap();
        let g =
            Arc::new(action.make_horizontal_geodesic(&v(&[1.0, 0.0, 0.0]), &v(&[0.0, 1.0, 0.0]), (0.0, 2.0)).unwrap());
        let lam = leaf_lagrangian(&action, &g, &p).unwrap();
        let bogus = JacobiFamily::from_initial_columns(
            g.clone(),
            &DMatrix::from_column_slice(4, 1, &[1.0, 0.0, 0.0, 0.0]),
            FamilyKind::Isotropic,
        )
        .unwrap();
        assert!(matches!(
            wilking_quotient_index(&bogus, &lam, (0.0, 2.0), (false, false), &p),
            Err(Error::NotContained { .. })
        ));
    }
}
