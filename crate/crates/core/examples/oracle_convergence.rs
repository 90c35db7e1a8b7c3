//! RK4 against the closed form: sup error, fitted order and drift of the invariants.

use magflow::closed_form::torus_data;
use magflow::geom::UnitTangentState;
use magflow::oracle::{convergence_study, drift_report, integrate_ambient, integrate_intrinsic, sample_flow};
use magflow::symmetry::u_basis;

fn main() -> magflow::Result<()> {
    let (s, psi) = (1.7, 1.2);
    let st = UnitTangentState::canonical(2, psi)?;
    let g = torus_data(s, &st)?;

    let steps = [0.1, 0.05, 0.025, 0.0125];
    let (errors, order) = convergence_study(&g, &st, 10.0, &steps)?;
    for (h, e) in steps.iter().zip(&errors) {
        println!("step {h:<7} sup error {e:.3e}");
    }
    println!("fitted order {order:.4}");

    let exact = sample_flow(&g, 50.0, 1e-2)?;
    let ambient = integrate_ambient(s, &st, 50.0, 1e-3)?;
    let intrinsic = integrate_intrinsic(s, &st, 50.0, 1e-3)?;
    let gens = u_basis(3);
    println!("ambient vs intrinsic: {:.3e}", ambient.max_position_distance(&intrinsic)?);
    for (name, traj) in [("closed form", &exact), ("rk4 ambient", &ambient), ("rk4 intrinsic", &intrinsic)] {
        println!("{name:<14} {:?}", drift_report(traj, &gens)?);
    }
    Ok(())
}
