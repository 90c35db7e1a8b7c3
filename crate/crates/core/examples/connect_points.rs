//! The two-point problem in each energy regime.

use magflow::connectivity::{boundary_phases, classify, endpoint_with_overlap, solve_connection, SolverConfig};
use magflow::geom::{energy_of_strength, ComplexVector};
use magflow::C64;

fn report(s: f64, lambda: C64) -> magflow::Result<()> {
    let e1 = ComplexVector::basis(2, 0);
    let e2 = ComplexVector::basis(2, 1);
    let q1 = endpoint_with_overlap(&e1, &e2, lambda)?;
    let v = solve_connection(s, &e1, &q1, &SolverConfig::default())?;
    println!(
        "s = {s:<4} |lambda| = {:.4} arg = {:+.4}: {} ({} solutions)",
        lambda.norm(),
        lambda.arg(),
        v.case_tag.as_str(),
        v.solutions.len()
    );
    for sol in v.solutions.iter().take(3) {
        println!("    psi = {:.10}  T = {:+.10}  m = {:+}  residual = {:.1e}", sol.psi, sol.t, sol.m, sol.endpoint_residual);
    }
    Ok(())
}

fn main() -> magflow::Result<()> {
    report(1.5, C64::new(0.3, 0.4))?;
    report(2.0, C64::new(0.0, 0.0))?;
    report(2.0, C64::from_polar(0.5, 1.0))?;
    report(3.0, C64::new(0.5, 0.0))?;
    report(3.0, C64::from_polar(0.9, 2.0))?;

    let lat = boundary_phases(3.0)?;
    println!("boundary at s = 3: radius {:.10}, a = {:.10}, b = {:.10}", lat.radius, lat.a, lat.b);
    for m in -2..=2 {
        report(3.0, lat.point(m))?;
    }
    report(3.0, C64::from_polar(lat.radius, lat.a + 0.5 * lat.b))?;
    println!("classification at k = 1/18, |lambda| = 0.5: {:?}", classify(energy_of_strength(3.0), C64::new(0.5, 0.0))?);
    Ok(())
}
