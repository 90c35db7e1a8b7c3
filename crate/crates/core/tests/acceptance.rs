//! Acceptance suite: one pass/fail line per criterion, nonzero exit on any failure.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;

use magflow::closed_form::{
    psi_max, rotation_number, state_from_pair, torus_data, AdmissiblePair, ClosedFormGeodesic,
};
use magflow::connectivity::{
    boundary_phases, chord, chord_with_cos_arg, endpoint_with_overlap, pair_from_endpoints, solve_connection,
    CaseTag, SolverConfig,
};
use magflow::geom::{hermitian, ComplexVector, UnitTangentState};
use magflow::hopf::{project_trajectory, projected_curvature, projected_radius, projected_strength};
use magflow::hopf::{restricted_sup, RestrictedPrimitiveSpec};
use magflow::mane::{mane_value, mather_representative, KillingSystemSample};
use magflow::oracle::{convergence_study, drift_report, integrate_ambient, sample_flow, trajectory_action};
use magflow::sampling::{derived_rng, random_contact_vector, random_state_with_angle, random_unit_vector};
use magflow::symmetry::{
    random_complex_subspace, random_generator, random_real_subspace, totally_magnetic_conditions,
    LinearSubspaceSpec, TotallyMagneticConfig,
};
use magflow::C64;

type Outcome = Result<String, String>;

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn random_psi<R: Rng>(rng: &mut R) -> f64 {
    0.05 + (PI - 0.1) * rng.random::<f64>()
}

fn criterion_1() -> Outcome {
    let mut worst = 0.0f64;
    for (dim, count) in [(2, 100), (3, 1000), (4, 5000)] {
        let c = mane_value(&KillingSystemSample::round_sphere(dim, count, 1)).map_err(|e| e.to_string())?;
        worst = worst.max((c - 0.125).abs());
    }
    check(worst <= 1e-12, || format!("mane value off by {worst:e}"))?;
    let z = ComplexVector::basis(2, 0);
    let loop_ = mather_representative(&z, 4.0 * PI, 1e-3).map_err(|e| e.to_string())?;
    let mut action_err = 0.0f64;
    for k in [0.05, 0.125, 0.2] {
        let a = trajectory_action(&loop_, k).map_err(|e| e.to_string())?;
        action_err = action_err.max((a - 4.0 * PI * (k - 0.125)).abs());
        check((a < 0.0) == (k < 0.125) || k == 0.125, || format!("witness sign wrong at k={k}"))?;
    }
    check(action_err <= 1e-9, || format!("loop action off by {action_err:e}"))?;
    Ok(format!("|c - 1/8| = {worst:.1e}, loop action error {action_err:.1e}"))
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..100 {
        let mut rng = derived_rng(2, i);
        let s = 5.0 * rng.random::<f64>();
        let psi = random_psi(&mut rng);
        let n = 1 + rng.random_range(0..3usize);
        let st = random_state_with_angle(&mut rng, n, psi);
        let g = torus_data(s, &st).map_err(|e| e.to_string())?;
        let exact = sample_flow(&g, 10.0, 1e-3).map_err(|e| e.to_string())?;
        let num = integrate_ambient(s, &st, 10.0, 1e-3).map_err(|e| e.to_string())?;
        let err = exact.max_position_distance(&num).map_err(|e| e.to_string())?;
        worst = worst.max(err);
    }
    check(worst <= 1e-6, || format!("sup position error {worst:e}"))?;
    let st = UnitTangentState::canonical(2, 1.2).map_err(|e| e.to_string())?;
    let g = torus_data(1.7, &st).map_err(|e| e.to_string())?;
    let (_, order) = convergence_study(&g, &st, 10.0, &[0.1, 0.05, 0.025, 0.0125]).map_err(|e| e.to_string())?;
    check((order - 4.0).abs() <= 0.3, || format!("fitted order {order}"))?;
    Ok(format!("sup error {worst:.2e}, fitted order {order:.3}"))
}

fn criterion_3() -> Outcome {
    let (mut exact_worst, mut rk4_worst) = (0.0f64, 0.0f64);
    for i in 0..20 {
        let mut rng = derived_rng(3, i);
        let s = 5.0 * rng.random::<f64>();
        let psi = random_psi(&mut rng);
        let n = 1 + rng.random_range(0..3usize);
        let st = random_state_with_angle(&mut rng, n, psi);
        let gens: Vec<_> = (0..10).map(|_| random_generator(&mut rng, n + 1)).collect();
        let g = torus_data(s, &st).map_err(|e| e.to_string())?;
        let exact = sample_flow(&g, 50.0, 1e-2).map_err(|e| e.to_string())?;
        let num = integrate_ambient(s, &st, 50.0, 1e-3).map_err(|e| e.to_string())?;
        for (traj, worst) in [(&exact, &mut exact_worst), (&num, &mut rk4_worst)] {
            let d = drift_report(traj, &gens).map_err(|e| e.to_string())?;
            *worst = worst
                .max(d.max_norm_drift)
                .max(d.max_speed_drift)
                .max(d.max_angle_drift)
                .max(d.max_moment_drift);
        }
    }
    check(exact_worst <= 1e-11, || format!("closed-form drift {exact_worst:e}"))?;
    check(rk4_worst <= 1e-8, || format!("RK4 drift {rk4_worst:e}"))?;
    Ok(format!("closed-form drift {exact_worst:.1e}, RK4 drift {rk4_worst:.1e}"))
}

fn criterion_4() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..200 {
        let mut rng = derived_rng(4, i);
        let s = 5.0 * rng.random::<f64>();
        let psi = random_psi(&mut rng);
        let n = 1 + rng.random_range(0..3usize);
        let st = random_state_with_angle(&mut rng, n, psi);
        let g = torus_data(s, &st).map_err(|e| e.to_string())?;
        let t = 20.0 * rng.random::<f64>() - 10.0;
        let (a, _) = g.evaluate(-0.5 * t);
        let (b, _) = g.evaluate(0.5 * t);
        let lhs = hermitian(&a, &b).map_err(|e| e.to_string())?;
        let ch = chord(s, psi, t).map_err(|e| e.to_string())?;
        worst = worst.max((lhs - ch).norm());
    }
    check(worst <= 1e-10, || format!("chord mismatch {worst:e}"))?;
    let st = UnitTangentState::canonical(1, 0.3).map_err(|e| e.to_string())?;
    let g = torus_data(1.0, &st).map_err(|e| e.to_string())?;
    let lhs = hermitian(&g.evaluate(-0.5).0, &g.evaluate(0.5).0).map_err(|e| e.to_string())?;
    let variant = (lhs - chord_with_cos_arg(1.0, 0.3, 1.0).map_err(|e| e.to_string())?).norm();
    check(variant >= 1e-2, || format!("+cos Arg variant only off by {variant:e}"))?;
    Ok(format!("chord error {worst:.1e}; +cos Arg variant off by {variant:.3}"))
}

fn connect(s: f64, q0: &ComplexVector, q1: &ComplexVector) -> Result<magflow::connectivity::ConnectivityVerdict, String> {
    solve_connection(s, q0, q1, &SolverConfig::default()).map_err(|e| format!("s={s}: {e}"))
}

fn verified(v: &magflow::connectivity::ConnectivityVerdict) -> bool {
    !v.solutions.is_empty() && v.solutions.iter().all(|x| x.endpoint_residual <= 1e-8)
}

fn criterion_5() -> Outcome {
    // (a)
    for i in 0..200 {
        let mut rng = derived_rng(51, i);
        let n = 1 + rng.random_range(0..3usize);
        let q0 = random_unit_vector(&mut rng, n + 1);
        let q1 = random_unit_vector(&mut rng, n + 1);
        let v = connect(1.5, &q0, &q1)?;
        check(v.case_tag.is_connectable() && verified(&v), || format!("(a) pair {i}: {:?}", v.case_tag))?;
    }
    // (b)
    let e1 = ComplexVector::basis(2, 0);
    let e2 = ComplexVector::basis(2, 1);
    let v = connect(2.0, &e1, &e2)?;
    check(v.case_tag == CaseTag::CriticalNull && v.solutions.is_empty(), || "(b) orthogonal pair".into())?;
    for i in 0..50 {
        let mut rng = derived_rng(52, i);
        let q0 = random_unit_vector(&mut rng, 2);
        let q1 = random_unit_vector(&mut rng, 2);
        let v = connect(2.0, &q0, &q1)?;
        check(verified(&v), || format!("(b) pair {i}: |λ| = {}", v.lambda.norm()))?;
    }
    // (c)
    let r = 5f64.sqrt() / 3.0;
    let mut floor = f64::INFINITY;
    for i in 0..100 {
        let psi = PI * (i as f64 + 0.5) / 100.0;
        for j in 0..100 {
            let t = 20.0 * j as f64 / 99.0;
            floor = floor.min(chord(3.0, psi, t).map_err(|e| e.to_string())?.norm());
        }
    }
    check(floor >= r - 1e-9, || format!("(c) magnitude floor {floor}"))?;
    let (mut exterior, mut interior) = (0, 0);
    for i in 0..100 {
        let mut rng = derived_rng(53, i);
        let q0 = random_unit_vector(&mut rng, 2);
        let h = random_contact_vector(&mut rng, &q0);
        let phase = 2.0 * PI * rng.random::<f64>();
        let below = (r - 1e-3) * rng.random::<f64>();
        let q1 = endpoint_with_overlap(&q0, &h, C64::from_polar(below, phase)).map_err(|e| e.to_string())?;
        let v = connect(3.0, &q0, &q1)?;
        check(v.case_tag == CaseTag::SubExterior && v.solutions.is_empty(), || format!("(c) |λ|={below}"))?;
        exterior += 1;
        let above = r + 1e-3 + (1.0 - r - 2e-3) * rng.random::<f64>();
        let q1 = endpoint_with_overlap(&q0, &h, C64::from_polar(above, phase)).map_err(|e| e.to_string())?;
        let v = connect(3.0, &q0, &q1)?;
        check(verified(&v), || format!("(c) |λ|={above}: {:?}", v.case_tag))?;
        interior += 1;
    }
    // (d)
    let lat = boundary_phases(3.0).map_err(|e| e.to_string())?;
    for m in -2..=2 {
        let q1 = endpoint_with_overlap(&e1, &e2, lat.point(m)).map_err(|e| e.to_string())?;
        let v = connect(3.0, &e1, &q1)?;
        check(verified(&v), || format!("(d) lattice point m={m}"))?;
    }
    let off = C64::from_polar(lat.radius, lat.a + 0.5 * lat.b);
    let q1 = endpoint_with_overlap(&e1, &e2, off).map_err(|e| e.to_string())?;
    let v = connect(3.0, &e1, &q1)?;
    check(v.solutions.is_empty(), || "(d) offset phase connected".into())?;
    let pm = psi_max(3.0).map_err(|e| e.to_string())?;
    let c = (9.0f64 / 4.0 - 1.0).sqrt();
    let mut grid_min = f64::INFINITY;
    for j in -64..=64 {
        let t = (FRAC_PI_2 + PI * j as f64) / c;
        grid_min = grid_min.min((chord(3.0, pm, t).map_err(|e| e.to_string())? - off).norm());
    }
    check(grid_min > 1e-3, || format!("(d) grid minimum distance {grid_min}"))?;
    Ok(format!(
        "(a) 200/200 (b) null + 50/50 (c) floor {floor:.12} with {exterior} exterior, {interior} interior (d) 5 lattice points, offset distance {grid_min:.4}"
    ))
}

fn criterion_6() -> Outcome {
    let (mut sphere, mut fit, mut radius, mut curv) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..50 {
        let mut rng = derived_rng(6, i);
        let s = 5.0 * rng.random::<f64>();
        let psi = random_psi(&mut rng);
        let st = random_state_with_angle(&mut rng, 1, psi);
        let g = torus_data(s, &st).map_err(|e| e.to_string())?;
        let p = project_trajectory(&sample_flow(&g, 10.0, 1e-2).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        for q in &p.points {
            sphere = sphere.max((q.norm() - 0.5).abs());
        }
        fit = fit.max(p.fit.residual);
        radius = radius.max((p.fit.radius - projected_radius(s, psi).map_err(|e| e.to_string())?).abs());
        let kappa = projected_curvature(&g, 3.0, 1e-4).map_err(|e| e.to_string())?;
        curv = curv.max((kappa - projected_strength(s, psi).map_err(|e| e.to_string())?).abs());
    }
    check(sphere <= 1e-12, || format!("off sphere by {sphere:e}"))?;
    check(fit <= 1e-6, || format!("fit residual {fit:e}"))?;
    check(radius <= 1e-6, || format!("radius error {radius:e}"))?;
    check(curv <= 1e-4, || format!("curvature error {curv:e}"))?;
    Ok(format!("sphere {sphere:.1e}, fit {fit:.1e}, radius {radius:.1e}, curvature {curv:.1e}"))
}

fn criterion_7() -> Outcome {
    let r = restricted_sup(0.05).map_err(|e| e.to_string())?;
    check((r.lambda_mix - 0.4).abs() <= 1e-12 && (r.sup - 0.05).abs() <= 1e-12, || format!("{r:?}"))?;
    check(r.verified, || "grid does not confirm the optimum".into())?;
    for l in [0.0, 0.25, 0.5, 1.0] {
        let spec = RestrictedPrimitiveSpec::new(0.05, l).map_err(|e| e.to_string())?;
        check(spec.sup() >= 0.05 + 1e-8, || format!("λ={l} gives {}", spec.sup()))?;
        check(spec.grid_sup(2000) >= 0.05 + 1e-8, || format!("grid at λ={l}"))?;
    }
    let top = restricted_sup(0.125).map_err(|e| e.to_string())?;
    check(top.lambda_mix == 1.0 && (top.sup - 0.125).abs() <= 1e-15, || format!("{top:?}"))?;
    Ok(format!("k=0.05: λ={:.3}, sup={:.6}; k=1/8: λ={}, sup={}", r.lambda_mix, r.sup, top.lambda_mix, top.sup))
}

fn tangent_state<R: Rng>(rng: &mut R, v: &LinearSubspaceSpec) -> Result<UnitTangentState, String> {
    let q = v.random_point(rng);
    let dir = v
        .tangent_frame(&q)
        .iter()
        .fold(ComplexVector::zeros(q.len()), |acc, e| {
            &acc + &e.scale_real(rng.random::<f64>() - 0.5)
        });
    UnitTangentState::renormalized(&q, &dir).map_err(|e| e.to_string())
}

fn criterion_8() -> Outcome {
    let cfg = TotallyMagneticConfig {
        t_end: 10.0,
        ..TotallyMagneticConfig::default()
    };
    let (mut stay, mut torus) = (0.0f64, 0.0f64);
    let mut tested = 0;
    for i in 0..6 {
        let mut rng = derived_rng(8, i);
        let k = 1 + (i as usize % 2);
        let v = random_complex_subspace(&mut rng, 3, k).map_err(|e| e.to_string())?;
        let rep = totally_magnetic_conditions(&v, &TotallyMagneticConfig { seed: i, ..cfg })
            .map_err(|e| e.to_string())?;
        check(rep.consistent() && rep.stays_inside, || format!("complex V dim {k}: {rep:?}"))?;
        stay = stay.max(rep.escape);
        for _ in 0..5 {
            let st = tangent_state(&mut rng, &v)?;
            let s = if st.psi() < 0.01 { 1.0 } else { 5.0 * rng.random::<f64>() };
            let g = torus_data(s, &st).map_err(|e| e.to_string())?;
            torus = torus.max(v.distance(g.pair().w0())).max(v.distance(g.pair().w1()));
            let traj = sample_flow(&g, 10.0, 1e-2).map_err(|e| e.to_string())?;
            for p in traj.positions() {
                stay = stay.max(v.distance(p));
            }
        }
        tested += 1;
    }
    check(stay <= 1e-8, || format!("complex V escape {stay:e}"))?;
    check(torus <= 1e-8, || format!("torus data leaves V by {torus:e}"))?;
    let mut least = f64::INFINITY;
    for i in 0..6 {
        let mut rng = derived_rng(81, i);
        let v = random_real_subspace(&mut rng, 2, 3).map_err(|e| e.to_string())?;
        let rep = totally_magnetic_conditions(&v, &TotallyMagneticConfig { seed: i, ..cfg })
            .map_err(|e| e.to_string())?;
        check(!rep.complex_subspace, || "random real subspace is complex".into())?;
        check(rep.consistent() && rep.escape >= 1e-3, || format!("real V: {rep:?}"))?;
        least = least.min(rep.escape);
        tested += 1;
    }
    Ok(format!("{tested} subspaces; complex escape {stay:.1e}, torus leak {torus:.1e}, real escape >= {least:.3}"))
}

fn criterion_9() -> Outcome {
    let mut worst_limit = 0.0f64;
    for s in [0.5, 1.0, 2.0, 3.0] {
        let rho: Vec<f64> = (0..1000)
            .map(|j| rotation_number(s, PI * (j as f64 + 0.5) / 1000.0))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        check(rho.windows(2).all(|w| w[1] < w[0]), || format!("not strictly decreasing at s={s}"))?;
        let at_zero = if s <= 2.0 { s - 1.0 } else { 1.0 / (s - 1.0) };
        let at_pi = -1.0 / (1.0 + s);
        let lo = rotation_number(s, 1e-11).map_err(|e| e.to_string())?;
        let hi = rotation_number(s, PI - 1e-11).map_err(|e| e.to_string())?;
        worst_limit = worst_limit.max((lo - at_zero).abs()).max((hi - at_pi).abs());
    }
    check(worst_limit <= 1e-9, || format!("endpoint limits off by {worst_limit:e}"))?;
    Ok(format!("strictly decreasing for s in {{0.5, 1, 2, 3}}, endpoint error {worst_limit:.1e}"))
}

fn criterion_10() -> Outcome {
    let (mut pair_err, mut endpoint_err) = (0.0f64, 0.0f64);
    for i in 0..200 {
        let mut rng = derived_rng(10, i);
        let s = 5.0 * rng.random::<f64>();
        let psi = random_psi(&mut rng);
        let n = 1 + rng.random_range(0..3usize);
        let d = magflow::closed_form::delta(s, psi).map_err(|e| e.to_string())?;
        let e0 = random_unit_vector(&mut rng, n + 1);
        let e1 = random_contact_vector(&mut rng, &e0).normalized().map_err(|e| e.to_string())?;
        let pair = AdmissiblePair::new(e0.scale_real((0.5 * (1.0 + d)).sqrt()), e1.scale_real((0.5 * (1.0 - d)).sqrt()))
            .map_err(|e| e.to_string())?;
        let st = state_from_pair(s, psi, &pair).map_err(|e| e.to_string())?;
        let g = torus_data(s, &st).map_err(|e| e.to_string())?;
        pair_err = pair_err
            .max(g.pair().w0().distance(pair.w0()))
            .max(g.pair().w1().distance(pair.w1()));

        let t = 20.0 * rng.random::<f64>() - 10.0;
        let (q0, _) = g.evaluate(-0.5 * t);
        let (q1, _) = g.evaluate(0.5 * t);
        let rebuilt = pair_from_endpoints(s, psi, t, &q0, &q1).map_err(|e| e.to_string())?;
        let h = ClosedFormGeodesic::from_pair(s, psi, rebuilt).map_err(|e| e.to_string())?;
        endpoint_err = endpoint_err
            .max(h.evaluate(-0.5 * t).0.distance(&q0))
            .max(h.evaluate(0.5 * t).0.distance(&q1));
    }
    check(pair_err <= 1e-9, || format!("pair round trip {pair_err:e}"))?;
    check(endpoint_err <= 1e-9, || format!("endpoint reconstruction {endpoint_err:e}"))?;
    Ok(format!("pair error {pair_err:.1e}, endpoint error {endpoint_err:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut failed = 0;
    for (n, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[criterion {n}] PASS ({secs:.2}s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("[criterion {n}] FAIL ({secs:.2}s): {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
