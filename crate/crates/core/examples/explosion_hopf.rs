//! Quotient curvature near the origin for the Hopf action and the standard
//! two-torus. For Hopf the product kappa_bar * r^2 stays at 3; for the torus
//! it vanishes.

use nalgebra::DVector;
use polarlab::quotient::{default_radii, explosion_probe, max_quotient_curvature, ExplosionOptions};
use polarlab::{Preset, ToleranceProfile};

fn main() -> polarlab::Result<()> {
    let profile = ToleranceProfile::default();
    let radii = default_radii();
    let dir = DVector::from_row_slice(&[0.3, -0.5, 0.7, 0.4]).normalize();
    for preset in [Preset::Hopf, Preset::TorusStd(2)] {
        let action = preset.action()?;
        let probe = explosion_probe(&action, &DVector::zeros(4), &dir, &radii, &profile, &ExplosionOptions::default())?;
        println!("{}", preset.name());
        println!("{:>10} {:>14} {:>14}", "r", "kappa_bar", "kappa_bar r^2");
        for row in &probe.rows {
            println!("{:>10.5} {:>14.6} {:>14.3e}", row.r, row.kappa_bar, row.product);
        }
        println!(
            "limit {:.6}  growth exponent {:.3}  verdict {:?}\n",
            probe.fitted_limit, probe.growth_exponent, probe.verdict
        );
    }

    // On the unit sphere the Hopf quotient is the round sphere of radius 1/2.
    let s3 = Preset::Hopf.action()?.on_sphere(1.0)?;
    let x = DVector::from_row_slice(&[0.6, 0.0, 0.8, 0.0]);
    let k = max_quotient_curvature(&s3, &x, &profile, 64, 0)?;
    println!("hopf on S^3: max quotient curvature {:.6} (expected 4)", k.value);
    Ok(())
}
