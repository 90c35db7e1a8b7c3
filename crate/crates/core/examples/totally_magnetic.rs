//! Totally magnetic subspaces: complex ones trap geodesics, real ones do not.

use magflow::sampling::rng_from_seed;
use magflow::symmetry::{
    random_complex_subspace, random_real_subspace, totally_magnetic_conditions, TotallyMagneticConfig,
};

fn main() -> magflow::Result<()> {
    let mut rng = rng_from_seed(3);
    let cfg = TotallyMagneticConfig {
        t_end: 10.0,
        ..TotallyMagneticConfig::default()
    };
    let cases = [
        ("complex, dim 1 in C^3", random_complex_subspace(&mut rng, 3, 1)?),
        ("complex, dim 2 in C^3", random_complex_subspace(&mut rng, 3, 2)?),
        ("real, dim 2 in C^2", random_real_subspace(&mut rng, 2, 2)?),
        ("real, dim 3 in C^2", random_real_subspace(&mut rng, 2, 3)?),
    ];
    for (name, v) in &cases {
        let r = totally_magnetic_conditions(v, &cfg)?;
        println!(
            "{name:<22} escape {:.3e}  (3b) {}  (3c) {}  consistent {}",
            r.escape, r.condition_3b, r.condition_3c, r.consistent()
        );
    }
    let flat = TotallyMagneticConfig { s: 0.0, ..cfg };
    let r = totally_magnetic_conditions(&cases[3].1, &flat)?;
    println!("without field the real subspace keeps its geodesics: escape {:.3e}", r.escape);
    Ok(())
}
