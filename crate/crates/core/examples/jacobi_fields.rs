//! The leaf Lagrangian family and the vertical family along one Hopf
//! geodesic: focal points, the quotient index, conservation of the
//! Wronskian and an RK4 check of the closed form.

use std::sync::Arc;

use nalgebra::DVector;
use polarlab::jacobi::{
    focal_scan, integrate_field, leaf_lagrangian, vertical_family, wilking_quotient_index, wronskian, wronskian_at,
};
use polarlab::{Preset, ToleranceProfile};

fn main() -> polarlab::Result<()> {
    let profile = ToleranceProfile::default();
    let action = Preset::Hopf.action()?;
    let base = DVector::from_row_slice(&[1.0, 0.0, 0.0, 0.0]);
    let dir = DVector::from_row_slice(&[-0.8, 0.0, 0.6, 0.0]);
    let g = Arc::new(action.make_horizontal_geodesic(&base, &dir, (0.0, 2.0))?);

    let lambda = leaf_lagrangian(&action, &g, &profile)?;
    let w = vertical_family(&action, &g, &profile)?;
    println!("Lambda: {} fields, W: {} field(s)", lambda.len(), w.len());

    let open = (false, false);
    let lam = focal_scan(&lambda, g.interval(), open, &profile)?;
    let ver = focal_scan(&w, g.interval(), open, &profile)?;
    let quo = wilking_quotient_index(&w, &lambda, g.interval(), open, &profile)?;
    for e in &lam.events {
        println!("Lambda-focal at t = {:.10} (index {})", e.t, e.index);
    }
    println!("ind_Lambda = {}  ind_W = {}  ind_quotient = {}", lam.total_index, ver.total_index, quo);

    let fields = lambda.fields();
    let mut drift: f64 = 0.0;
    for i in 0..fields.len() {
        for j in 0..fields.len() {
            let w0 = wronskian(&fields[i], &fields[j])?;
            for k in 0..=16 {
                drift = drift.max((wronskian_at(&fields[i], &fields[j], 2.0 * k as f64 / 16.0)? - w0).abs());
            }
        }
    }
    println!("max Wronskian drift {drift:.2e}");

    let (j, _) = integrate_field(&fields[0], 2.0, 800)?;
    println!("RK4 vs closed form at t = 2: {:.2e}", (j - fields[0].ambient_value(2.0)).norm());
    Ok(())
}
