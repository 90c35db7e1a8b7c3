//! Half-circles C_s(psi) for s = 1, 2, 3 and the rotation-number range, as CSV.

use magflow::cli::{fmt_f64, sweep_rows};
use magflow::closed_form::rotation_bounds;

fn main() -> magflow::Result<()> {
    println!("s,psi,quantity,value");
    for s in [1.0, 2.0, 3.0] {
        for r in sweep_rows(s, 13, &["half-circle", "rotation"], &[]) {
            println!("{},{},{},{}", fmt_f64(r.s), fmt_f64(r.psi), r.quantity, fmt_f64(r.value));
        }
        let (lo, hi) = rotation_bounds(s)?;
        eprintln!("s = {s}: rotation number in ({lo}, {hi})");
    }
    Ok(())
}
