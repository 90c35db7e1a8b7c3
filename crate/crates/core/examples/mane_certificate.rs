//! Critical value of the round sphere and the two-sided certificate.

use magflow::geom::ComplexVector;
use magflow::mane::{certificate, killing_point_report, mane_value, reeb_flowline_check, KillingSystemSample};

fn main() -> magflow::Result<()> {
    for count in [10, 1000, 100_000] {
        let c = mane_value(&KillingSystemSample::round_sphere(3, count, 0))?;
        println!("{count:>7} samples: c = {c}");
    }
    for k in [0.05, 0.1, 0.125, 0.2] {
        let cert = certificate(2, k, 100, 0)?;
        println!(
            "k = {k:<5} upper = {} witness action = {:+.12} proves c > k: {}",
            cert.upper, cert.lower_witness_action, cert.certifies_above_k
        );
    }
    let z = ComplexVector::basis(2, 0);
    println!("{:?}", killing_point_report(&z)?);
    println!("{:?}", reeb_flowline_check(&z, 0.5, 10.0)?);
    Ok(())
}
