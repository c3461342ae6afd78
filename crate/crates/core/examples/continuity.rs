//! The crossing number along families of parallel lines. For Hopf it drops
//! from 1 to 0 once the lines miss the origin; for the torus it is constant.

use nalgebra::DVector;
use polarlab::quotient::{crossing_continuity_probe, singular_sweep_family, uniform_s_grid, GeodesicFamily};
use polarlab::{Preset, ToleranceProfile};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> polarlab::Result<()> {
    let profile = ToleranceProfile::default();
    let grid = uniform_s_grid(9);

    let hopf = Preset::Hopf.action()?;
    let v = DVector::from_row_slice(&[1.0, 0.0, 0.0, 0.0]);
    let w = DVector::from_row_slice(&[0.0, 0.0, 0.5, 0.0]);
    let family = GeodesicFamily::translated_lines(&DVector::zeros(4), &w, &v, (-1.0, 1.0));
    let r = crossing_continuity_probe(&hopf, &family, &grid, &profile)?;
    let cs: Vec<usize> = r.samples.iter().map(|s| s.c).collect();
    println!("hopf sweep:   c(s) = {cs:?}");
    for j in &r.jumps {
        println!("  jump {} -> {} between s = {} and {}", j.from, j.to, j.s_left, j.s_right);
    }
    println!("  crossed slices: {:?}", r.crossing_polarity);

    let torus = Preset::TorusStd(2).action()?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let x0 = DVector::from_row_slice(&[0.0, 0.0, 0.6, 0.3]);
    if let Some(family) = singular_sweep_family(&torus, &x0, 1.0, 0.5, &profile, &mut rng)? {
        let r = crossing_continuity_probe(&torus, &family, &grid, &profile)?;
        let cs: Vec<usize> = r.samples.iter().map(|s| s.c).collect();
        println!("torus sweep:  c(s) = {cs:?}");
    }
    Ok(())
}
