//! Polarity verdicts for the presets, with and without the codimension
//! shortcut, and the slice representation at singular points.

use nalgebra::DVector;
use polarlab::quotient::{infinitesimal_polarity, polarity_test, PolarityOptions};
use polarlab::{Preset, ToleranceProfile};

fn main() -> polarlab::Result<()> {
    let profile = ToleranceProfile::default();
    let presets =
        ["so(2)", "so(3)", "so(4)", "torus-std(2)", "torus-std(3)", "hopf", "circle-weights(1,2)", "trivial(3)"];
    println!("{:<22} {:>6} {:<24} {:<12} {:>12}", "action", "codim", "fast path", "bracket", "obstruction");
    for name in presets {
        let action = Preset::parse(name)?.action()?;
        let fast = polarity_test(&action, &profile, &PolarityOptions::default())?;
        let slow = polarity_test(&action, &profile, &PolarityOptions { fast_path: false, ..Default::default() })?;
        println!(
            "{:<22} {:>6} {:<24} {:<12} {:>12.3e}",
            name,
            fast.quotient_codim,
            format!("{:?}", fast.verdict),
            format!("{:?}", slow.verdict),
            slow.max_obstruction
        );
    }

    // torus-std(3) at a point where one block vanishes: the slice is
    // R^2 + R^2 with the remaining circle rotating one plane.
    let torus = Preset::TorusStd(3).action()?;
    let x = DVector::from_row_slice(&[0.0, 0.0, 1.0, 0.0, 0.5, 0.5]);
    let slice = torus.slice_representation(&x, &profile)?;
    let v = infinitesimal_polarity(&torus, &x, &profile, &PolarityOptions::default())?;
    println!(
        "\ntorus-std(3) slice at {:?}: dimension {}, {} generator(s), {:?}",
        x.as_slice(),
        slice.space().dimension(),
        slice.generators().len(),
        v.verdict
    );
    if let Some(w) = polarity_test(&Preset::Hopf.action()?, &profile, &PolarityOptions::default())?.witness {
        println!("hopf witness: |x| |[X, Y]^v| = {:.4} at {:?}", w.bracket_norm, w.point);
    }
    Ok(())
}
