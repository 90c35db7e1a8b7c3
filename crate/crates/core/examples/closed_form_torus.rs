//! Explicit geodesics on Clifford tori: frequencies, width and a few samples.

use magflow::closed_form::{rotation_number, torus_data, MagneticGeodesic};
use magflow::geom::UnitTangentState;

fn main() -> magflow::Result<()> {
    let (s, psi) = (1.5, 1.0);
    let st = UnitTangentState::canonical(1, psi)?;
    let g = torus_data(s, &st)?;
    println!("s = {s}, psi = {psi}");
    println!("theta0 = {:.12}, theta1 = {:.12}", g.theta0(), g.theta1());
    println!("delta = {:.12}, width = {:.12}", g.delta(), g.pair().width());
    println!("rotation number = {:.12}", rotation_number(s, psi)?);
    for t in [0.0, 1.0, 2.5, 10.0] {
        let (z, v) = g.evaluate(t);
        println!("t = {t:>5}: |z| = {:.15}, |v| = {:.15}, z = {:?}", z.norm(), v.norm(), z.as_slice());
    }

    // At s = 2 and psi = 0 the torus degenerates and the geodesic is a Reeb orbit.
    let r = MagneticGeodesic::from_state(2.0, &UnitTangentState::canonical(1, 0.0)?)?;
    println!("s = 2, psi = 0 resonant: {}", r.is_resonant());
    Ok(())
}
