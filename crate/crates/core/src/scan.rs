//! Detection of isolated rank drops of a matrix-valued function of one
//! parameter.
//!
//! The indicator is the `r`-th singular value `σ_r(t)` of `M(t)` for the
//! expected generic rank `r`. It is sampled on a uniform grid; every
//! sufficiently sharp local minimum is refined by golden-section search, and
//! the rank deficiency is read off at the refined parameter with the
//! relative cutoff measured against the largest singular value seen on the
//! grid.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::{singular_values, ToleranceProfile};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct RankDrop {
    pub t: f64,
    pub deficiency: usize,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

pub(crate) struct RankScan<'a, F> {
    pub eval: F,
    pub expected_rank: usize,
    pub interval: (f64, f64),
    pub include_endpoints: (bool, bool),
    pub profile: &'a ToleranceProfile,
}

impl<F> RankScan<'_, F>
where
    F: Fn(f64) -> Result<DMatrix<f64>>,
{
    pub fn run(&self) -> Result<Vec<RankDrop>> {
        let r = self.expected_rank;
        if r == 0 {
            return Ok(Vec::new());
        }
        let (a, b) = self.interval;
        let n = self.profile.grid_points;
        let h = (b - a) / (n - 1) as f64;
        let resolution = self.profile.bisect_resolution * (b - a);

        let mut ts = Vec::with_capacity(n);
        let mut g = Vec::with_capacity(n);
        let mut scale: f64 = 0.0;
        for i in 0..n {
            let t = if i == n - 1 { b } else { a + h * i as f64 };
            let sv = singular_values(&(self.eval)(t)?);
            scale = scale.max(sv.first().copied().unwrap_or(0.0));
            ts.push(t);
            g.push(sv.get(r - 1).copied().unwrap_or(0.0));
        }
        if scale < self.profile.zero_abs_tol {
            return Err(Error::InvalidArgument("matrix function vanishes on the whole interval".into()));
        }
        let deficiency = |t: f64| -> Result<usize> {
            let sv = singular_values(&(self.eval)(t)?);
            Ok(r - self.profile.rank_at_scale(&sv, scale).min(r))
        };
        let indicator = |t: f64| -> Result<f64> {
            let sv = singular_values(&(self.eval)(t)?);
            Ok(sv.get(r - 1).copied().unwrap_or(0.0))
        };
        let cut = self.profile.rank_rel_tol * scale;

        let end_slack = 16.0 * resolution;
        let ctx = Refine { indicator: &indicator, cut, resolution };
        let mut candidates = Vec::new();
        for i in sharp_minima(&g, cut) {
            // Two cells on each side: a second zero within one cell of the
            // minimum need not show up as a grid minimum of its own.
            let lo = ts[i.saturating_sub(2)];
            let hi = ts[(i + 2).min(n - 1)];
            ctx.refine(lo, hi, 0, &mut candidates)?;
        }
        let mut events = Vec::new();
        for t_star in candidates {
            if t_star - a <= end_slack || b - t_star <= end_slack {
                continue;
            }
            let d = deficiency(t_star)?;
            if d > 0 {
                events.push(RankDrop { t: t_star, deficiency: d });
            }
        }
        events.sort_by(|x, y| x.t.partial_cmp(&y.t).unwrap_or(std::cmp::Ordering::Equal));
        let mut merged: Vec<RankDrop> = Vec::new();
        for ev in events {
            match merged.last_mut() {
                Some(last) if ev.t - last.t <= end_slack => {
                    last.deficiency = last.deficiency.max(ev.deficiency);
                }
                _ => merged.push(ev),
            }
        }

        let mut out = Vec::new();
        if self.include_endpoints.0 {
            let d = deficiency(a)?;
            if d > 0 {
                out.push(RankDrop { t: a, deficiency: d });
            }
        }
        out.extend(merged);
        if self.include_endpoints.1 {
            let d = deficiency(b)?;
            if d > 0 {
                out.push(RankDrop { t: b, deficiency: d });
            }
        }
        Ok(out)
    }
}

const SUB_POINTS: usize = 17;
const MAX_DEPTH: usize = 14;

/// Indices of grid minima that look like zeros rather than smooth dips.
fn sharp_minima(g: &[f64], cut: f64) -> Vec<usize> {
    let n = g.len();
    (0..n)
        .filter(|&i| {
            let left = if i > 0 { g[i - 1] } else { f64::INFINITY };
            let right = if i + 1 < n { g[i + 1] } else { f64::INFINITY };
            let is_min = (i == 0 || g[i] < left) && g[i] <= right;
            is_min && (g[i] < cut || g[i] <= 0.6 * neighbor_max(left, right))
        })
        .collect()
}

struct Refine<'a, G> {
    indicator: &'a G,
    cut: f64,
    resolution: f64,
}

impl<G> Refine<'_, G>
where
    G: Fn(f64) -> Result<f64>,
{
    /// Resamples `[lo, hi]` on a finer grid and recurses into each sharp
    /// minimum, so that zeros closer than the coarse spacing separate.
    fn refine(&self, lo: f64, hi: f64, depth: usize, out: &mut Vec<f64>) -> Result<()> {
        if hi - lo <= 64.0 * self.resolution || depth == MAX_DEPTH {
            let t = golden_min(self.indicator, lo, hi, self.resolution)?;
            if depth == MAX_DEPTH {
                self.check_isolated(lo, hi, t)?;
            }
            out.push(t);
            return Ok(());
        }
        let h = (hi - lo) / (SUB_POINTS - 1) as f64;
        let ts: Vec<f64> = (0..SUB_POINTS).map(|i| if i == SUB_POINTS - 1 { hi } else { lo + h * i as f64 }).collect();
        let g = ts.iter().map(|&t| (self.indicator)(t)).collect::<Result<Vec<_>>>()?;
        let minima = sharp_minima(&g, self.cut);
        if minima.is_empty() {
            out.push(golden_min(self.indicator, lo, hi, self.resolution)?);
        }
        for i in minima {
            self.refine(ts[i.saturating_sub(2)], ts[(i + 2).min(SUB_POINTS - 1)], depth + 1, out)?;
        }
        Ok(())
    }

    /// A second zero still hiding next to `t` at the finest level.
    fn check_isolated(&self, lo: f64, hi: f64, t: f64) -> Result<()> {
        let gap = 4.0 * self.resolution;
        for (sub_lo, sub_hi) in [(lo, t - gap), (t + gap, hi)] {
            if sub_hi - sub_lo <= 4.0 * self.resolution {
                continue;
            }
            let t2 = golden_min(self.indicator, sub_lo, sub_hi, self.resolution)?;
            let interior = t2 - sub_lo > 2.0 * self.resolution && sub_hi - t2 > 2.0 * self.resolution;
            if interior && (self.indicator)(t2)? < self.cut {
                return Err(Error::GridTooCoarse { t });
            }
        }
        Ok(())
    }
}

fn neighbor_max(left: f64, right: f64) -> f64 {
    match (left.is_finite(), right.is_finite()) {
        (true, true) => left.max(right),
        (true, false) => left,
        (false, true) => right,
        (false, false) => 0.0,
    }
}

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
pub(crate) fn golden_min<G>(f: &G, mut lo: f64, mut hi: f64, resolution: f64) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    let ends = [(lo, f(lo)?), (hi, f(hi)?)];
    for _ in 0..200 {
        if hi - lo <= resolution {
            break;
        }
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c)?;
            if fc < best.1 {
                best = (c, fc);
            }
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d)?;
            if fd < best.1 {
                best = (d, fd);
            }
        }
    }
    for (t, v) in ends {
        if v < best.1 {
            best = (t, v);
        }
    }
    Ok(best.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(values: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(values))
    }

    #[test]
    fn finds_isolated_zeros_with_multiplicity() {
        let p = ToleranceProfile::default();
        let scan = RankScan {
            eval: |t: f64| Ok(diag(&[t - 0.3, (t - 0.3) * 2.0, 1.0, t - 0.71])),
            expected_rank: 4,
            interval: (0.0, 1.0),
            include_endpoints: (true, true),
            profile: &p,
        };
        let ev = scan.run().unwrap();
        assert_eq!(ev.len(), 2);
        assert!((ev[0].t - 0.3).abs() < 1e-9);
        assert_eq!(ev[0].deficiency, 2);
        assert!((ev[1].t - 0.71).abs() < 1e-9);
        assert_eq!(ev[1].deficiency, 1);
    }

    #[test]
    fn endpoint_flags() {
        let p = ToleranceProfile::default();
        let make = |flags| RankScan {
            eval: |t: f64| Ok(diag(&[t, 1.0])),
            expected_rank: 2,
            interval: (0.0, 2.0),
            include_endpoints: flags,
            profile: &p,
        };
        assert!(make((false, true)).run().unwrap().is_empty());
        let ev = make((true, false)).run().unwrap();
        assert_eq!(ev, vec![RankDrop { t: 0.0, deficiency: 1 }]);
    }

    #[test]
    fn smooth_positive_minimum_is_not_an_event() {
        let p = ToleranceProfile::default();
        let scan = RankScan {
            eval: |t: f64| Ok(diag(&[(t - 0.5).powi(2) + 1e-3])),
            expected_rank: 1,
            interval: (0.0, 1.0),
            include_endpoints: (true, true),
            profile: &p,
        };
        assert!(scan.run().unwrap().is_empty());
    }

    #[test]
    fn close_events_are_separated_by_refinement() {
        let p = ToleranceProfile { grid_points: 16, ..Default::default() };
        for sep in [0.02, 1e-4, 1e-6] {
            let scan = RankScan {
                eval: |t: f64| Ok(diag(&[(t - 0.5), (t - 0.5 - sep), 1.0])),
                expected_rank: 3,
                interval: (0.0, 1.0),
                include_endpoints: (false, false),
                profile: &p,
            };
            let ev = scan.run().unwrap();
            assert_eq!(ev.len(), 2, "sep {sep}: {ev:?}");
            assert!((ev[1].t - ev[0].t - sep).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_beyond_the_minimum_bracket() {
        // Zeros at 0.4443 and 0.4456 on a grid of spacing 3/2047: neither grid
        // point next to the second zero is a local minimum.
        let p = ToleranceProfile::default();
        let scan = RankScan {
            eval: |t: f64| Ok(diag(&[((t - 0.44429) * 0.785).abs().min(((t - 0.44566) * 0.4).abs()), 1.0])),
            expected_rank: 2,
            interval: (-1.5, 1.5),
            include_endpoints: (false, false),
            profile: &p,
        };
        let ev = scan.run().unwrap();
        assert_eq!(ev.len(), 2, "{ev:?}");
    }

    #[test]
    fn unresolvable_events_request_a_finer_grid() {
        // Two zeros a few resolution steps apart, below the deepest level.
        let p = ToleranceProfile { grid_points: 8, bisect_resolution: 1e-13, ..Default::default() };
        let scan = RankScan {
            eval: |t: f64| Ok(diag(&[(t - 0.5), (t - 0.5 - 2e-12), 1.0])),
            expected_rank: 3,
            interval: (0.0, 1.0),
            include_endpoints: (false, false),
            profile: &p,
        };
        assert!(matches!(scan.run(), Err(Error::GridTooCoarse { .. })));
    }
}
