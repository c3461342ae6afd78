//! Polarity of linear actions, decided by the integrability of the
//! horizontal distribution on the regular part.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::oneill::OneillTensor;
use crate::action::ActionSpec;
use crate::error::{Error, Result};
use crate::geometry::ToleranceProfile;
use crate::random::gaussian_vector;

/// Normalized vertical bracket norms above this are an obstruction.
pub const BRACKET_THRESHOLD: f64 = 1e-4;
pub const DEFAULT_POLARITY_POINTS: usize = 64;
const REGULAR_RETRIES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Polar,
    NonPolar,
    ForcedPolarByCodim,
}

impl Polarity {
    pub fn is_polar(self) -> bool {
        self != Polarity::NonPolar
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolarityWitness {
    pub point: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `|x| · |vertical part of [X̄, Ȳ]|`.
    pub bracket_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolarityVerdict {
    pub verdict: Polarity,
    pub witness: Option<PolarityWitness>,
    pub max_obstruction: f64,
    pub threshold: f64,
    pub quotient_codim: usize,
    pub points_tested: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarityOptions {
    pub n_points: usize,
    pub seed: u64,
    /// Skip the bracket test when the quotient codimension is at most two.
    pub fast_path: bool,
}

impl Default for PolarityOptions {
    fn default() -> Self {
        Self { n_points: DEFAULT_POLARITY_POINTS, seed: 0, fast_path: true }
    }
}

/// Tests whether the linear action (on the Euclidean cone, for sphere
/// actions) is polar.
pub fn polarity_test(
    action: &ActionSpec,
    profile: &ToleranceProfile,
    options: &PolarityOptions,
) -> Result<PolarityVerdict> {
    profile.validate()?;
    let action = action.euclidean_cone();
    let n = action.space().dimension();
    let quotient_codim = if n == 0 { 0 } else { action.stratum_of(&DVector::zeros(n), profile)?.quotient_codim };
    if options.fast_path && quotient_codim <= 2 {
        return Ok(PolarityVerdict {
            verdict: Polarity::ForcedPolarByCodim,
            witness: None,
            max_obstruction: 0.0,
            threshold: BRACKET_THRESHOLD,
            quotient_codim,
            points_tested: 0,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut max_obstruction: f64 = 0.0;
    let mut witness = None;
    let mut tested = 0;
    for _ in 0..options.n_points {
        let mut found = None;
        for _ in 0..REGULAR_RETRIES {
            let x = gaussian_vector(n, &mut rng);
            if action.is_regular(&x, profile)? {
                found = Some(x);
                break;
            }
        }
        let Some(x) = found else {
            return Err(Error::NoRegularSample(REGULAR_RETRIES));
        };
        tested += 1;
        let tensor = OneillTensor::at(&action, &x, profile)?;
        let (norm, pair) = tensor.max_pair_norm();
        // The full vertical bracket is twice `A`; scale by |x| since it
        // is homogeneous of degree −1.
        let obstruction = 2.0 * norm * x.norm();
        if let Some((i, j)) = pair {
            if witness.is_none() || obstruction > max_obstruction {
                let q = tensor.horizontal_basis();
                witness = Some(PolarityWitness {
                    point: x.iter().copied().collect(),
                    x: q.column(i).iter().copied().collect(),
                    y: q.column(j).iter().copied().collect(),
                    bracket_norm: obstruction,
                });
            }
        }
        max_obstruction = max_obstruction.max(obstruction);
    }
    let verdict = if max_obstruction > BRACKET_THRESHOLD { Polarity::NonPolar } else { Polarity::Polar };
    Ok(PolarityVerdict {
        verdict,
        witness: if verdict == Polarity::NonPolar { witness } else { None },
        max_obstruction,
        threshold: BRACKET_THRESHOLD,
        quotient_codim,
        points_tested: tested,
    })
}

/// Polarity of the slice representation at `x`.
pub fn infinitesimal_polarity(
    action: &ActionSpec,
    x: &DVector<f64>,
    profile: &ToleranceProfile,
    options: &PolarityOptions,
) -> Result<PolarityVerdict> {
    let slice = action.slice_representation(x, profile)?;
    polarity_test(&slice, profile, options)
}
