//! Preset registry.
//!
//! | name | space | generators |
//! |------|-------|------------|
//! | `so(n)` | ℝⁿ | `E_ij − E_ji` for `i < j` |
//! | `circle-weights(k₁,…,k_m)` | ℝ^{2m} | one generator, `k_j·J` on the j-th coordinate pair |
//! | `hopf` | ℝ⁴ | `circle-weights(1,1)`, i.e. `z ↦ iz` on ℂ² |
//! | `torus-std(m)` | ℝ^{2m} | `m` generators, `J` on one coordinate pair each |
//! | `trivial(n)` | ℝⁿ | none |
//!
//! `J = [[0, −1], [1, 0]]` acts on the pair `(x_{2j}, x_{2j+1})`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use crate::action::ActionSpec;
use crate::error::{Error, Result};
use crate::geometry::AmbientSpace;
use crate::random::gaussian_vector;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Preset {
    So(usize),
    CircleWeights(Vec<i64>),
    Hopf,
    TorusStd(usize),
    Trivial(usize),
}

/// Classification of a preset used by the acceptance suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectedClass {
    Polar,
    NonPolar,
    ForcedPolarByCodim,
}

#[derive(Debug, Clone, Serialize)]
pub struct PresetInfo {
    pub name: &'static str,
    pub dimension: String,
    pub description: &'static str,
    pub expected: ExpectedClass,
}

impl Preset {
    pub fn parse(text: &str) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
        if s == "hopf" {
            return Ok(Preset::Hopf);
        }
        let (head, args) = match (s.find('('), s.strip_suffix(')')) {
            (Some(open), Some(body)) => (&s[..open], &body[open + 1..]),
            _ => return Err(Error::UnknownPreset(text.to_string())),
        };
        let ints = || -> Result<Vec<i64>> {
            args.split(',').map(|a| a.parse::<i64>().map_err(|_| Error::UnknownPreset(text.to_string()))).collect()
        };
        let single = || -> Result<usize> {
            match ints()?.as_slice() {
                [k] if *k >= 0 => Ok(*k as usize),
                _ => Err(Error::UnknownPreset(text.to_string())),
            }
        };
        let preset = match head {
            "so" => Preset::So(single()?),
            "torus-std" => Preset::TorusStd(single()?),
            "trivial" => Preset::Trivial(single()?),
            "circle-weights" => Preset::CircleWeights(ints()?),
            _ => return Err(Error::UnknownPreset(text.to_string())),
        };
        match &preset {
            Preset::So(n) | Preset::Trivial(n) if *n < 2 => {
                Err(Error::UnknownPreset(format!("{text}: dimension must be >= 2")))
            }
            Preset::TorusStd(0) => Err(Error::UnknownPreset(format!("{text}: need at least one factor"))),
            Preset::CircleWeights(w) if w.is_empty() => Err(Error::UnknownPreset(text.to_string())),
            _ => Ok(preset),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Preset::So(n) => format!("so({n})"),
            Preset::CircleWeights(w) => {
                let ws: Vec<String> = w.iter().map(|k| k.to_string()).collect();
                format!("circle-weights({})", ws.join(","))
            }
            Preset::Hopf => "hopf".into(),
            Preset::TorusStd(m) => format!("torus-std({m})"),
            Preset::Trivial(n) => format!("trivial({n})"),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Preset::So(n) | Preset::Trivial(n) => *n,
            Preset::CircleWeights(w) => 2 * w.len(),
            Preset::Hopf => 4,
            Preset::TorusStd(m) => 2 * m,
        }
    }

    pub fn generators(&self) -> Vec<DMatrix<f64>> {
        let n = self.dimension();
        match self {
            Preset::So(_) => {
                let mut out = Vec::new();
                for i in 0..n {
                    for j in (i + 1)..n {
                        let mut a = DMatrix::zeros(n, n);
                        a[(j, i)] = 1.0;
                        a[(i, j)] = -1.0;
                        out.push(a);
                    }
                }
                out
            }
            Preset::CircleWeights(w) => vec![block_rotation(n, w.iter().map(|k| *k as f64))],
            Preset::Hopf => vec![block_rotation(4, [1.0, 1.0])],
            Preset::TorusStd(m) => {
                (0..*m).map(|j| block_rotation(n, (0..*m).map(|i| if i == j { 1.0 } else { 0.0 }))).collect()
            }
            Preset::Trivial(_) => Vec::new(),
        }
    }

    pub fn action(&self) -> Result<ActionSpec> {
        ActionSpec::new(AmbientSpace::euclidean(self.dimension())?, self.generators(), Some(self.name()))
    }

    pub fn expected_class(&self) -> ExpectedClass {
        match self {
            Preset::So(_) => ExpectedClass::ForcedPolarByCodim,
            Preset::Trivial(_) => ExpectedClass::Polar,
            Preset::TorusStd(m) if *m <= 2 => ExpectedClass::ForcedPolarByCodim,
            Preset::TorusStd(_) => ExpectedClass::Polar,
            Preset::Hopf => ExpectedClass::NonPolar,
            Preset::CircleWeights(w) => {
                // Quotient codimension is 2p − 1 for p rotating blocks.
                let moving = w.iter().filter(|k| **k != 0).count();
                if moving <= 1 {
                    ExpectedClass::ForcedPolarByCodim
                } else {
                    ExpectedClass::NonPolar
                }
            }
        }
    }

    /// A random point of a singular stratum, if the preset has one.
    pub fn singular_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<DVector<f64>> {
        let n = self.dimension();
        match self {
            Preset::So(_) => Some(DVector::zeros(n)),
            Preset::Hopf => Some(DVector::zeros(n)),
            Preset::Trivial(_) => None,
            Preset::CircleWeights(w) => {
                if w.iter().all(|k| *k == 0) {
                    return None;
                }
                // Only points with every rotating block zero have isotropy of
                // positive dimension.
                let mut x = gaussian_vector(n, rng);
                for (j, k) in w.iter().enumerate() {
                    if *k != 0 {
                        x[2 * j] = 0.0;
                        x[2 * j + 1] = 0.0;
                    }
                }
                Some(x)
            }
            Preset::TorusStd(m) => {
                let mut x = gaussian_vector(n, rng);
                let count = rng.random_range(1..=*m);
                let mut blocks: Vec<usize> = (0..*m).collect();
                for i in 0..count {
                    let j = rng.random_range(i..*m);
                    blocks.swap(i, j);
                    x[2 * blocks[i]] = 0.0;
                    x[2 * blocks[i] + 1] = 0.0;
                }
                Some(x)
            }
        }
    }

    pub fn info(&self) -> PresetInfo {
        let (name, description) = match self {
            Preset::So(_) => ("so(n)", "all elementary rotations of R^n"),
            Preset::CircleWeights(_) => ("circle-weights(k1,...,km)", "circle acting on R^2m with speeds k_j"),
            Preset::Hopf => ("hopf", "Hopf circle z -> iz on C^2 = circle-weights(1,1)"),
            Preset::TorusStd(_) => {
                ("torus-std(m)", "m independent block rotations of R^2m (polar; forced by codim for m <= 2)")
            }
            Preset::Trivial(_) => ("trivial(n)", "no generators; foliation by points"),
        };
        PresetInfo { name, dimension: self.dimension().to_string(), description, expected: self.expected_class() }
    }
}

/// The registry as printed by `presets`, with representative parameters.
pub fn registry() -> Vec<(Preset, PresetInfo)> {
    let reps =
        [Preset::So(3), Preset::CircleWeights(vec![1, 2]), Preset::Hopf, Preset::TorusStd(2), Preset::Trivial(3)];
    reps.into_iter()
        .map(|p| {
            let mut info = p.info();
            info.dimension = match &p {
                Preset::So(_) | Preset::Trivial(_) => "n".into(),
                Preset::CircleWeights(_) | Preset::TorusStd(_) => "2m".into(),
                Preset::Hopf => "4".into(),
            };
            (p, info)
        })
        .collect()
}

fn block_rotation(n: usize, speeds: impl IntoIterator<Item = f64>) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(n, n);
    for (j, k) in speeds.into_iter().enumerate() {
        a[(2 * j + 1, 2 * j)] = k;
        a[(2 * j, 2 * j + 1)] = -k;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_registry_names() {
        assert_eq!(Preset::parse("so(3)").unwrap(), Preset::So(3));
        assert_eq!(Preset::parse("circle-weights(1, 2)").unwrap(), Preset::CircleWeights(vec![1, 2]));
        assert_eq!(Preset::parse("HOPF").unwrap(), Preset::Hopf);
        assert_eq!(Preset::parse("torus-std(2)").unwrap(), Preset::TorusStd(2));
        assert_eq!(Preset::parse("trivial(4)").unwrap(), Preset::Trivial(4));
        for bad in ["so3", "so(x)", "sp(2)", "trivial(1)", "circle-weights()"] {
            assert!(Preset::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn hopf_is_circle_weights_one_one() {
        assert_eq!(Preset::Hopf.generators(), Preset::CircleWeights(vec![1, 1]).generators());
        let a = &Preset::Hopf.generators()[0];
        let x = DVector::from_row_slice(&[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(a * x, DVector::from_row_slice(&[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn generator_counts() {
        assert_eq!(Preset::So(4).generators().len(), 6);
        assert_eq!(Preset::TorusStd(3).generators().len(), 3);
        assert!(Preset::Trivial(3).generators().is_empty());
        assert_eq!(Preset::So(3).action().unwrap().max_leaf_dim(), 2);
        assert_eq!(Preset::TorusStd(2).action().unwrap().max_leaf_dim(), 2);
        assert_eq!(Preset::CircleWeights(vec![1, 2]).action().unwrap().codimension(), 3);
    }

    #[test]
    fn registry_classifications() {
        let reg = registry();
        let find = |n: &str| reg.iter().find(|(_, i)| i.name == n).unwrap().1.expected;
        assert_eq!(find("hopf"), ExpectedClass::NonPolar);
        assert_eq!(find("so(n)"), ExpectedClass::ForcedPolarByCodim);
        assert_eq!(find("trivial(n)"), ExpectedClass::Polar);
    }
}
