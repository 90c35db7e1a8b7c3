//! Projected geodesics on S^2(1/2) and the restricted primitives near a fibre.

use magflow::closed_form::torus_data;
use magflow::geom::UnitTangentState;
use magflow::hopf::{project_trajectory, projected_curvature, projected_radius, projected_strength, restricted_sup};
use magflow::oracle::sample_flow;

fn main() -> magflow::Result<()> {
    println!("{:>5} {:>6} {:>12} {:>12} {:>12} {:>12}", "s", "psi", "radius", "fit", "strength", "fd curv");
    for &(s, psi) in &[(0.0, std::f64::consts::FRAC_PI_2), (1.0, 1.0), (2.0, 0.5), (3.0, 2.0)] {
        let g = torus_data(s, &UnitTangentState::canonical(1, psi)?)?;
        let p = project_trajectory(&sample_flow(&g, 10.0, 1e-2)?)?;
        println!(
            "{s:>5} {psi:>6.4} {:>12.9} {:>12.9} {:>12.9} {:>12.9}",
            projected_radius(s, psi)?,
            p.fit.radius,
            projected_strength(s, psi)?,
            projected_curvature(&g, 2.0, 1e-4)?
        );
    }
    for k in [0.01, 0.05, 0.1, 0.125] {
        let r = restricted_sup(k)?;
        println!("k = {k:<5} r_k = {:.6} lambda = {:.6} sup = {:.6} grid confirms: {}", r.r_k, r.lambda_mix, r.sup, r.verified);
    }
    Ok(())
}
