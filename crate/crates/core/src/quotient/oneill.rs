//! Sectional curvature of the local quotient at a regular point via
//! O'Neill's formula `K_B(X, Y) = K_M(X, Y) + 3|A_X Y|²`.
//!
//! `A_X Y` is half the vertical part of `[X̄, Ȳ]` for the horizontal
//! extensions `X̄(z) = Π(z) X`. At `x` this bracket equals
//! `(DΠ[X]) Y − (DΠ[Y]) X`; the derivative of the projector is taken by
//! central differences with one Richardson step.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::action::ActionSpec;
use crate::error::{Error, Result};
use crate::geometry::{full_svd, ToleranceProfile};
use crate::random::gaussian_vector;

pub const DEFAULT_PLANE_SAMPLES: usize = 256;
const ASCENT_STARTS: usize = 8;
const ORTHONORMAL_TOL: f64 = 1e-8;

/// Projector onto the horizontal space at `z`, using the regular leaf
/// dimension as the rank of the vertical part.
pub(crate) fn horizontal_projector(
    action: &ActionSpec,
    z: &DVector<f64>,
    profile: &ToleranceProfile,
) -> Result<DMatrix<f64>> {
    let n = z.len();
    let r = action.max_leaf_dim();
    let mut p = DMatrix::identity(n, n);
    if r > 0 {
        let svd = full_svd(&action.killing_matrix(z));
        let s1 = svd.sigma[0];
        let ratio = if s1 > 0.0 { svd.sigma[r - 1] / s1 } else { 0.0 };
        if ratio < profile.rank_rel_tol {
            return Err(Error::RankInstability { ratio });
        }
        let u = svd.u.columns(0, r);
        p -= u * u.transpose();
    }
    if action.space().is_sphere() {
        let zn = z.normalize();
        p -= &zn * zn.transpose();
    }
    Ok(p)
}

fn fd_step(x: &DVector<f64>, profile: &ToleranceProfile) -> f64 {
    let scale = x.norm();
    profile.fd_step * if scale > 0.0 { scale } else { 1.0 }
}

/// `DΠ(x)[u]` with Richardson extrapolation of two central differences.
fn projector_derivative(
    action: &ActionSpec,
    x: &DVector<f64>,
    u: &DVector<f64>,
    profile: &ToleranceProfile,
) -> Result<DMatrix<f64>> {
    let h = fd_step(x, profile);
    let central = |h: f64| -> Result<DMatrix<f64>> {
        let plus = horizontal_projector(action, &(x + u * h), profile)?;
        let minus = horizontal_projector(action, &(x - u * h), profile)?;
        Ok((plus - minus) / (2.0 * h))
    };
    let coarse = central(h)?;
    let fine = central(h / 2.0)?;
    Ok((fine * 4.0 - coarse) / 3.0)
}

/// The O'Neill tensor at a regular point, tabulated on an orthonormal basis
/// of the horizontal space.
#[derive(Debug, Clone)]
pub struct OneillTensor {
    point: DVector<f64>,
    curvature: f64,
    horizontal: DMatrix<f64>,
    /// `A(q_i, q_j)` for `i < j`, row-major over pairs.
    pairs: Vec<DVector<f64>>,
}

impl OneillTensor {
    /// Builds the tensor. Does not require two horizontal directions.
    pub fn at(action: &ActionSpec, x: &DVector<f64>, profile: &ToleranceProfile) -> Result<Self> {
        profile.validate()?;
        let leaf_dim = action.leaf_dimension(x, profile)?;
        if leaf_dim != action.max_leaf_dim() {
            return Err(Error::NotRegular { leaf_dim, max_leaf_dim: action.max_leaf_dim() });
        }
        let horizontal = action.horizontal_space(x, profile)?.basis().clone();
        let pi = horizontal_projector(action, x, profile)?;
        let vertical = DMatrix::identity(x.len(), x.len()) - &pi;
        let vertical = if action.space().is_sphere() {
            let xn = x.normalize();
            vertical - &xn * xn.transpose()
        } else {
            vertical
        };
        let h = horizontal.ncols();
        let derivs = (0..h)
            .map(|i| projector_derivative(action, x, &horizontal.column(i).into_owned(), profile))
            .collect::<Result<Vec<_>>>()?;
        let mut pairs = Vec::with_capacity(h * h.saturating_sub(1) / 2);
        for i in 0..h {
            for j in (i + 1)..h {
                let qi = horizontal.column(i);
                let qj = horizontal.column(j);
                let bracket = &derivs[i] * qj - &derivs[j] * qi;
                pairs.push(&vertical * bracket * 0.5);
            }
        }
        Ok(Self { point: x.clone(), curvature: action.space().curvature(), horizontal, pairs })
    }

    pub fn point(&self) -> &DVector<f64> {
        &self.point
    }

    pub fn horizontal_basis(&self) -> &DMatrix<f64> {
        &self.horizontal
    }

    pub fn horizontal_dimension(&self) -> usize {
        self.horizontal.ncols()
    }

    fn pair_index(&self, i: usize, j: usize) -> usize {
        let h = self.horizontal_dimension();
        i * h - i * (i + 1) / 2 + (j - i - 1)
    }

    /// `A(q_i, q_j)`, skew in `(i, j)`.
    pub fn on_basis(&self, i: usize, j: usize) -> DVector<f64> {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.pairs[self.pair_index(i, j)].clone(),
            std::cmp::Ordering::Greater => -self.pairs[self.pair_index(j, i)].clone(),
            std::cmp::Ordering::Equal => DVector::zeros(self.point.len()),
        }
    }

    /// `A_X Y` for horizontal-space coordinates `a`, `b`.
    pub fn apply_coords(&self, a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
        let h = self.horizontal_dimension();
        let mut out = DVector::zeros(self.point.len());
        for i in 0..h {
            for j in (i + 1)..h {
                let w = a[i] * b[j] - a[j] * b[i];
                if w != 0.0 {
                    out += &self.pairs[self.pair_index(i, j)] * w;
                }
            }
        }
        out
    }

    /// Largest `|A(q_i, q_j)|` over basis pairs.
    pub fn max_pair_norm(&self) -> (f64, Option<(usize, usize)>) {
        let h = self.horizontal_dimension();
        let mut best = (0.0, None);
        for i in 0..h {
            for j in (i + 1)..h {
                let n = self.pairs[self.pair_index(i, j)].norm();
                if best.1.is_none() || n > best.0 {
                    best = (n, Some((i, j)));
                }
            }
        }
        best
    }

    /// `K_B` of the plane spanned by orthonormal horizontal-space coordinates.
    pub fn curvature_coords(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        self.curvature + 3.0 * self.apply_coords(a, b).norm_squared()
    }
}

fn check_plane(action: &ActionSpec, x: &DVector<f64>, xv: &DVector<f64>, yv: &DVector<f64>) -> Result<()> {
    action.space().check_dim(xv)?;
    action.space().check_dim(yv)?;
    let bad = (xv.norm() - 1.0).abs().max((yv.norm() - 1.0).abs()).max(xv.dot(yv).abs());
    if bad > ORTHONORMAL_TOL {
        return Err(Error::InvalidArgument(format!("X and Y must be orthonormal (defect {bad:.3e})")));
    }
    let scale = x.norm().max(1.0);
    let residual = action.vertical_residual(x, xv).max(action.vertical_residual(x, yv)) / scale;
    let residual =
        if action.space().is_sphere() { residual.max(xv.dot(x).abs().max(yv.dot(x).abs()) / scale) } else { residual };
    if residual > ORTHONORMAL_TOL {
        return Err(Error::NotHorizontal { residual });
    }
    Ok(())
}

fn require_planes(action: &ActionSpec) -> Result<()> {
    let c = action.codimension();
    if c < 2 {
        return Err(Error::LowCohomogeneity(c));
    }
    Ok(())
}

/// `K_B(X, Y)` for orthonormal horizontal `X`, `Y` at the regular point `x`.
pub fn oneill_curvature(
    action: &ActionSpec,
    x: &DVector<f64>,
    xv: &DVector<f64>,
    yv: &DVector<f64>,
    profile: &ToleranceProfile,
) -> Result<f64> {
    profile.validate()?;
    require_planes(action)?;
    let leaf_dim = action.leaf_dimension(x, profile)?;
    if leaf_dim != action.max_leaf_dim() {
        return Err(Error::NotRegular { leaf_dim, max_leaf_dim: action.max_leaf_dim() });
    }
    check_plane(action, x, xv, yv)?;
    let pi = horizontal_projector(action, x, profile)?;
    let mut vertical = DMatrix::identity(x.len(), x.len()) - &pi;
    if action.space().is_sphere() {
        let xn = x.normalize();
        vertical -= &xn * xn.transpose();
    }
    let dx = projector_derivative(action, x, xv, profile)?;
    let dy = projector_derivative(action, x, yv, profile)?;
    let a = vertical * (dx * yv - dy * xv) * 0.5;
    Ok(action.space().curvature() + 3.0 * a.norm_squared())
}

/// Result of the plane search behind `κ̄`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureMax {
    pub value: f64,
    pub samples: usize,
    pub seed: u64,
}

fn orthonormal_pair(a: &DVector<f64>, b: &DVector<f64>) -> Option<(DVector<f64>, DVector<f64>)> {
    let na = a.norm();
    if na < 1e-12 {
        return None;
    }
    let a = a / na;
    let b = b - &a * a.dot(b);
    let nb = b.norm();
    if nb < 1e-12 {
        return None;
    }
    Some((a, b / nb))
}

/// Maximizes `K_B` over horizontal planes: seeded random planes, then a
/// local ascent from the best few. The result is a lower bound on `κ̄(x)`.
pub fn max_quotient_curvature(
    action: &ActionSpec,
    x: &DVector<f64>,
    profile: &ToleranceProfile,
    n_samples: usize,
    seed: u64,
) -> Result<CurvatureMax> {
    require_planes(action)?;
    let tensor = OneillTensor::at(action, x, profile)?;
    Ok(maximize_planes(&tensor, n_samples, seed))
}

pub(crate) fn maximize_planes(tensor: &OneillTensor, n_samples: usize, seed: u64) -> CurvatureMax {
    let h = tensor.horizontal_dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts: Vec<(f64, DVector<f64>, DVector<f64>)> = Vec::with_capacity(n_samples + h * h);
    // Coordinate planes first, so small cases are covered exactly.
    for i in 0..h {
        for j in (i + 1)..h {
            let mut a = DVector::zeros(h);
            let mut b = DVector::zeros(h);
            a[i] = 1.0;
            b[j] = 1.0;
            starts.push((tensor.curvature_coords(&a, &b), a, b));
        }
    }
    let mut drawn = 0;
    while drawn < n_samples {
        let (a, b) = (gaussian_vector(h, &mut rng), gaussian_vector(h, &mut rng));
        if let Some((a, b)) = orthonormal_pair(&a, &b) {
            starts.push((tensor.curvature_coords(&a, &b), a, b));
            drawn += 1;
        }
    }
    starts.sort_by(|p, q| q.0.partial_cmp(&p.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut best = starts.first().map(|s| s.0).unwrap_or(tensor.curvature);
    for (k0, a0, b0) in starts.into_iter().take(ASCENT_STARTS) {
        let (mut a, mut b, mut k) = (a0, b0, k0);
        let mut step = 0.3;
        for _ in 0..400 {
            if step < 1e-9 {
                break;
            }
            let da = gaussian_vector(h, &mut rng) * step;
            let db = gaussian_vector(h, &mut rng) * step;
            match orthonormal_pair(&(&a + da), &(&b + db)) {
                Some((na, nb)) => {
                    let nk = tensor.curvature_coords(&na, &nb);
                    if nk > k {
                        a = na;
                        b = nb;
                        k = nk;
                        step *= 1.2;
                    } else {
                        step *= 0.7;
                    }
                }
                None => step *= 0.5,
            }
        }
        best = best.max(k);
    }
    CurvatureMax { value: best, samples: n_samples, seed }
}
