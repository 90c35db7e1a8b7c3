//! Command-line front end of the `magflow` binary.
//!
//! JSON output carries a `"schema": "magflow/1"` field; CSV output is long
//! or wide format depending on the subcommand. Every float is printed with
//! 17 significant digits.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::closed_form::{half_circle, rotation_bounds, rotation_number, MagneticGeodesic};
use crate::connectivity::{chord, solve_connection, CaseTag, SolverConfig};
use crate::geom::{ComplexVector, EnergyStrength, UnitTangentState};
use crate::hopf::{project_trajectory, projected_curvature, projected_radius, projected_strength, CircleFit};
use crate::mane::{certificate, killing_point_report, mather_representative, KillingPointReport, ManeCertificate};
use crate::oracle::{drift_series, integrate_ambient, integrate_intrinsic, sample_flow, trajectory_action, Trajectory};
use crate::symmetry::{totally_magnetic_conditions, Field, LinearSubspaceSpec, TotallyMagneticConfig};
use crate::{Error, C64};

pub const SCHEMA: &str = "magflow/1";
pub const SEED_ENV: &str = "MAGFLOW_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_EXHAUSTED: i32 = 4;

const CANONICAL_STATE: &str = "Initial states are canonical: z = e1, v = cos(psi) i e1 + sin(psi) e2 in C^(n+1).";

#[derive(Debug, Parser)]
#[command(name = "magflow", version, about = "Magnetic geodesics on S^(2n+1) with the standard contact form")]
#[command(after_help = CANONICAL_STATE)]
pub struct Cli {
    /// Seed for sampled quantities; MAGFLOW_SEED overrides it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to a file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    ClosedForm,
    Rk4,
    Rk4Intrinsic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldArg {
    Real,
    Complex,
}

/// Exactly one of strength or energy.
#[derive(Debug, Clone, Copy, Args)]
#[group(required = true, multiple = false)]
pub struct StrengthArgs {
    /// Strength s >= 0 of unit-speed geodesics.
    #[arg(long)]
    pub s: Option<f64>,
    /// Energy k > 0, equivalent to s = 1/sqrt(2k).
    #[arg(long)]
    pub k: Option<f64>,
}

impl StrengthArgs {
    fn resolve(&self) -> Result<(f64, f64), Error> {
        match (self.s, self.k) {
            (Some(0.0), _) => Ok((0.0, f64::INFINITY)),
            (Some(s), _) => EnergyStrength::from_strength(s).map(|e| (e.s, e.k)),
            (_, Some(k)) => EnergyStrength::from_energy(k).map(|e| (e.s, e.k)),
            _ => Err(Error::Domain("strength or energy required".into())),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample one geodesic from the canonical state.
    #[command(after_help = CANONICAL_STATE)]
    Trajectory(TrajectoryArgs),
    /// Solve the two-point problem between q0 and q1.
    Connect(ConnectArgs),
    /// Long-format tables of half-circles, rotation numbers, curvatures, radii and chord magnitudes.
    Sweep(SweepArgs),
    /// Critical value, its certificate and the Killing criticality measures.
    Mane(ManeArgs),
    /// Totally-magnetic conditions of a linear subspace.
    CheckSubspace(CheckSubspaceArgs),
    /// Hopf projection of a geodesic of S^3.
    #[command(after_help = CANONICAL_STATE)]
    Hopf(HopfArgs),
}

#[derive(Debug, Args)]
pub struct TrajectoryArgs {
    #[command(flatten)]
    pub strength: StrengthArgs,
    #[arg(long)]
    pub psi: f64,
    /// n, so that the sphere is S^(2n+1).
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::ClosedForm)]
    pub method: MethodArg,
}

#[derive(Debug, Args)]
pub struct ConnectArgs {
    #[command(flatten)]
    pub strength: StrengthArgs,
    /// Interleaved re,im components, e.g. "1,0,0,0" for e1 in C^2.
    #[arg(long, allow_hyphen_values = true)]
    pub q0: String,
    #[arg(long, allow_hyphen_values = true)]
    pub q1: String,
    #[arg(long, default_value_t = 64)]
    pub m_bound: i64,
    #[arg(long, default_value_t = 8)]
    pub max_solutions: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub residual_tol: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated strengths.
    #[arg(long, default_value = "1,2,3", allow_hyphen_values = true)]
    pub s: String,
    /// Number of psi samples on [0, pi], endpoints included.
    #[arg(long, default_value_t = 181)]
    pub points: usize,
    /// Subset of half-circle,rotation,curvature,radius,chord.
    #[arg(long, default_value = "half-circle,rotation,curvature,radius")]
    pub quantities: String,
    /// Times at which chord magnitudes are tabulated.
    #[arg(long, default_value = "0.5,1,2,4,8")]
    pub chord_times: String,
    /// Worker threads; output order does not depend on it.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct ManeArgs {
    /// n, so that the sphere is S^(2n+1).
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    /// Energy of the lower-bound witness.
    #[arg(long, default_value_t = 0.1)]
    pub k: f64,
    #[arg(long, default_value_t = 1000)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct CheckSubspaceArgs {
    /// Basis vectors separated by ';', complex entries separated by ',', e.g. "1,0;0,1" or "1,i".
    #[arg(long, allow_hyphen_values = true)]
    pub basis: String,
    #[arg(long, value_enum)]
    pub field: FieldArg,
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
    #[arg(long, default_value_t = 8)]
    pub samples: usize,
    #[arg(long, default_value_t = 5.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct HopfArgs {
    #[command(flatten)]
    pub strength: StrengthArgs,
    #[arg(long)]
    pub psi: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-2)]
    pub step: f64,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SolverExhausted { .. } => EXIT_EXHAUSTED,
            _ => EXIT_INPUT,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

/// Float with 17 significant digits; `nan`, `inf` and `-inf` for the rest.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

struct SigDigits;

impl serde_json::ser::Formatter for SigDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.16e}")
    }
}

/// Compact JSON with 17-significant-digit floats and non-finite floats as `null`.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits);
    value.serialize(&mut ser).expect("serialisable report");
    buf.push(b'\n');
    String::from_utf8(buf).expect("utf-8 json")
}

fn parse_list(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| input_error(format!("not a number: {t:?}")))
        })
        .collect()
}

/// Parses a vector from interleaved `re,im` components and checks its norm.
///
/// Inputs within `1e−6` of the unit sphere are renormalised with a warning.
pub fn parse_unit_vector(s: &str, warn: &mut dyn Write) -> Result<ComplexVector, Failure> {
    let v = ComplexVector::from_re_im(&parse_list(s)?)?;
    let off = (v.norm() - 1.0).abs();
    if off > 1e-6 {
        return Err(input_error(format!("vector {s:?} has norm {} (not unit)", v.norm())));
    }
    if off > 1e-12 {
        let _ = writeln!(warn, "warning: renormalised {s:?} (norm off by {off:e})");
    }
    Ok(v.normalized()?)
}

/// Parses `;`-separated vectors of `,`-separated complex entries such as `1`, `-2.5i` or `1+2i`.
pub fn parse_basis(s: &str) -> Result<Vec<ComplexVector>, Failure> {
    s.split(';')
        .filter(|v| !v.trim().is_empty())
        .map(|v| {
            let entries = v
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<C64>()
                        .map_err(|_| input_error(format!("not a complex number: {t:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(ComplexVector::new(entries)?)
        })
        .collect()
}

#[derive(Serialize)]
struct Header<'a, C: Serialize> {
    schema: &'static str,
    command: &'a str,
    seed: u64,
    config: C,
}

#[derive(Serialize)]
struct TrajectoryConfig {
    s: f64,
    k: f64,
    psi: f64,
    dim: usize,
    t_end: f64,
    step: f64,
    method: MethodArg,
}

#[derive(Serialize)]
struct TrajectoryOutput<'a> {
    #[serde(flatten)]
    header: Header<'a, TrajectoryConfig>,
    note: Option<&'static str>,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

fn trajectory_table(traj: &Trajectory) -> Result<(Vec<String>, Vec<Vec<f64>>), Failure> {
    let dim = traj.meta().n + 1;
    let mut columns = vec!["t".to_string()];
    for c in ["z", "v"] {
        for j in 0..dim {
            columns.push(format!("{c}{j}_re"));
            columns.push(format!("{c}{j}_im"));
        }
    }
    columns.extend(["norm_drift", "speed_drift", "angle_drift"].map(String::from));
    let drifts = drift_series(traj, &[])?;
    let rows = traj
        .times()
        .iter()
        .zip(traj.states())
        .zip(&drifts)
        .map(|((t, (z, v)), d)| {
            let mut row = vec![*t];
            for w in [z, v] {
                for c in w.iter() {
                    row.push(c.re);
                    row.push(c.im);
                }
            }
            row.extend([d.max_norm_drift, d.max_speed_drift, d.max_angle_drift]);
            row
        })
        .collect();
    Ok((columns, rows))
}

fn csv_table(columns: &[String], rows: &[Vec<f64>]) -> String {
    let mut out = columns.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| fmt_f64(*x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn cmd_trajectory(a: &TrajectoryArgs, cli: &Cli, seed: u64, warn: &mut dyn Write) -> Result<String, Failure> {
    let (s, k) = a.strength.resolve()?;
    let st = UnitTangentState::canonical(a.dim, a.psi)?;
    let mut note = None;
    let traj = match a.method {
        MethodArg::ClosedForm => {
            let g = MagneticGeodesic::from_state(s, &st)?;
            if g.is_resonant() {
                note = Some("degenerate-resonance");
            }
            sample_flow(&g, a.t_end, a.step)?
        }
        MethodArg::Rk4 => integrate_ambient(s, &st, a.t_end, a.step)?,
        MethodArg::Rk4Intrinsic => integrate_intrinsic(s, &st, a.t_end, a.step)?,
    };
    let (columns, rows) = trajectory_table(&traj)?;
    if cli.format == Format::Csv {
        if let Some(n) = note {
            let _ = writeln!(warn, "note: {n}");
        }
        return Ok(csv_table(&columns, &rows));
    }
    Ok(to_json(&TrajectoryOutput {
        header: Header {
            schema: SCHEMA,
            command: "trajectory",
            seed,
            config: TrajectoryConfig {
                s,
                k,
                psi: a.psi,
                dim: a.dim,
                t_end: a.t_end,
                step: a.step,
                method: a.method,
            },
        },
        note,
        columns,
        rows,
    }))
}

#[derive(Serialize)]
struct LambdaOut {
    re: f64,
    im: f64,
    abs: f64,
}

#[derive(Serialize)]
struct SolutionOut {
    psi: f64,
    #[serde(rename = "T")]
    t: f64,
    m: i64,
    endpoint_residual: f64,
}

#[derive(Serialize)]
struct LatticeOut {
    radius: f64,
    a: f64,
    b: f64,
    step: f64,
}

#[derive(Serialize)]
struct ConnectOutput {
    schema: &'static str,
    command: &'static str,
    case_tag: CaseTag,
    s: f64,
    k: f64,
    lambda: LambdaOut,
    threshold: Option<f64>,
    solutions: Vec<SolutionOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    boundary_lattice: Option<LatticeOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lattice_distance: Option<f64>,
}

fn cmd_connect(a: &ConnectArgs, cli: &Cli, warn: &mut dyn Write) -> Result<String, Failure> {
    let (s, _) = a.strength.resolve()?;
    let q0 = parse_unit_vector(&a.q0, warn)?;
    let q1 = parse_unit_vector(&a.q1, warn)?;
    if q0.len() != q1.len() {
        return Err(input_error(format!("q0 is in C^{} but q1 is in C^{}", q0.len(), q1.len())));
    }
    let cfg = SolverConfig {
        m_bound: a.m_bound,
        max_solutions: a.max_solutions,
        residual_tol: a.residual_tol,
        ..SolverConfig::default()
    };
    let v = solve_connection(s, &q0, &q1, &cfg)?;
    let solutions: Vec<SolutionOut> = v
        .solutions
        .iter()
        .map(|x| SolutionOut {
            psi: x.psi,
            t: x.t,
            m: x.m,
            endpoint_residual: x.endpoint_residual,
        })
        .collect();
    if cli.format == Format::Csv {
        let mut out = String::from("case_tag,psi,T,m,endpoint_residual\n");
        for x in &solutions {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                v.case_tag.as_str(),
                fmt_f64(x.psi),
                fmt_f64(x.t),
                x.m,
                fmt_f64(x.endpoint_residual)
            ));
        }
        return Ok(out);
    }
    Ok(to_json(&ConnectOutput {
        schema: SCHEMA,
        command: "connect",
        case_tag: v.case_tag,
        s: v.s,
        k: v.k,
        lambda: LambdaOut {
            re: v.lambda.re,
            im: v.lambda.im,
            abs: v.lambda.norm(),
        },
        threshold: v.threshold,
        solutions,
        boundary_lattice: v.boundary_lattice.map(|l| LatticeOut {
            radius: l.radius,
            a: l.a,
            b: l.b,
            step: l.step(),
        }),
        lattice_distance: v.lattice_distance,
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub s: f64,
    pub psi: f64,
    pub quantity: String,
    pub value: f64,
}

const QUANTITIES: [&str; 5] = ["half-circle", "rotation", "curvature", "radius", "chord"];

/// Rows of one strength, in a fixed order.
pub fn sweep_rows(s: f64, points: usize, quantities: &[&str], chord_times: &[f64]) -> Vec<SweepRow> {
    let pi = std::f64::consts::PI;
    let mut rows = Vec::new();
    let mut push = |psi: f64, q: &str, v: f64| {
        rows.push(SweepRow {
            s,
            psi,
            quantity: q.to_string(),
            value: v,
        })
    };
    let bounds = rotation_bounds(s).ok();
    for j in 0..points {
        let psi = if points == 1 { 0.0 } else { pi * j as f64 / (points - 1) as f64 };
        let interior = j != 0 && j + 1 != points;
        for &q in quantities {
            match q {
                "half-circle" => {
                    if let Ok(h) = half_circle(s, psi) {
                        push(psi, "re", h.point.0);
                        push(psi, "im", h.point.1);
                        push(psi, "norm", h.norm);
                        if let Some(a) = h.arg {
                            push(psi, "arg", a);
                        }
                    }
                }
                "rotation" => {
                    let v = if interior {
                        rotation_number(s, psi).ok()
                    } else {
                        bounds.map(|(lo, hi)| if j == 0 { hi } else { lo })
                    };
                    if let Some(v) = v {
                        push(psi, "rotation", v);
                    }
                }
                "curvature" if interior => {
                    if let Ok(v) = projected_strength(s, psi) {
                        push(psi, "curvature", v);
                    }
                }
                "radius" => {
                    if let Ok(v) = projected_radius(s, psi) {
                        push(psi, "radius", v);
                    }
                }
                "chord" => {
                    for &t in chord_times {
                        if let Ok(c) = chord(s, psi, t) {
                            push(psi, &format!("chord_abs[T={t}]"), c.norm());
                        }
                    }
                }
                _ => {}
            }
        }
    }
    rows
}

fn cmd_sweep(a: &SweepArgs, cli: &Cli) -> Result<String, Failure> {
    let strengths = parse_list(&a.s)?;
    if let Some(s) = strengths.iter().find(|s| !(**s >= 0.0)) {
        return Err(input_error(format!("strength must be >= 0, got {s}")));
    }
    let quantities: Vec<&str> = a.quantities.split(',').map(str::trim).filter(|q| !q.is_empty()).collect();
    if let Some(q) = quantities.iter().find(|q| !QUANTITIES.contains(q)) {
        return Err(input_error(format!("unknown quantity {q:?}; expected one of {QUANTITIES:?}")));
    }
    let chord_times = parse_list(&a.chord_times)?;
    let workers = a.workers.max(1).min(strengths.len().max(1));
    let mut per_s: Vec<Vec<SweepRow>> = vec![Vec::new(); strengths.len()];
    std::thread::scope(|scope| {
        for (w, chunk) in per_s.chunks_mut(strengths.len().div_ceil(workers).max(1)).enumerate() {
            let base = w * strengths.len().div_ceil(workers).max(1);
            let (strengths, quantities, chord_times) = (&strengths, &quantities, &chord_times);
            scope.spawn(move || {
                for (i, slot) in chunk.iter_mut().enumerate() {
                    *slot = sweep_rows(strengths[base + i], a.points, quantities, chord_times);
                }
            });
        }
    });
    let rows: Vec<SweepRow> = per_s.into_iter().flatten().collect();
    if cli.format == Format::Csv {
        let mut out = String::from("s,psi,quantity,value\n");
        for r in &rows {
            out.push_str(&format!("{},{},{},{}\n", fmt_f64(r.s), fmt_f64(r.psi), r.quantity, fmt_f64(r.value)));
        }
        return Ok(out);
    }
    #[derive(Serialize)]
    struct Out<'a> {
        schema: &'static str,
        command: &'static str,
        rows: &'a [SweepRow],
    }
    Ok(to_json(&Out {
        schema: SCHEMA,
        command: "sweep",
        rows: &rows,
    }))
}

#[derive(Serialize)]
struct ManeOutput {
    schema: &'static str,
    command: &'static str,
    seed: u64,
    dim: usize,
    c: f64,
    certificate: ManeCertificate,
    killing_report: KillingPointReport,
    mather_action_at_critical: f64,
}

fn cmd_mane(a: &ManeArgs, cli: &Cli, seed: u64) -> Result<String, Failure> {
    if a.dim < 1 {
        return Err(input_error("dim must be at least 1"));
    }
    let cert = certificate(a.dim + 1, a.k, a.points, seed)?;
    let e1 = ComplexVector::basis(a.dim + 1, 0);
    let report = killing_point_report(&e1)?;
    let mather = mather_representative(&e1, 4.0 * std::f64::consts::PI, 1e-3)?;
    let out = ManeOutput {
        schema: SCHEMA,
        command: "mane",
        seed,
        dim: a.dim,
        c: cert.upper,
        certificate: cert,
        killing_report: report,
        mather_action_at_critical: trajectory_action(&mather, 0.125)?,
    };
    if cli.format == Format::Csv {
        let mut s = String::from("quantity,value\n");
        for (q, v) in [
            ("c", out.c),
            ("upper", out.certificate.upper),
            ("k", out.certificate.k),
            ("lower_witness_action", out.certificate.lower_witness_action),
            ("mather_action_at_critical", out.mather_action_at_critical),
            ("killing_max", out.killing_report.max()),
        ] {
            s.push_str(&format!("{q},{}\n", fmt_f64(v)));
        }
        return Ok(s);
    }
    Ok(to_json(&out))
}

#[derive(Serialize)]
struct SubspaceOutput {
    schema: &'static str,
    command: &'static str,
    seed: u64,
    field: FieldArg,
    ambient_dim: usize,
    real_dim: usize,
    s: f64,
    totally_magnetic: bool,
    complex_subspace: bool,
    escape: f64,
    dalpha_cross: f64,
    lorentz_leak: f64,
    condition_3b: bool,
    condition_3c: bool,
    consistent: bool,
}

fn cmd_check_subspace(a: &CheckSubspaceArgs, cli: &Cli, seed: u64) -> Result<String, Failure> {
    let basis = parse_basis(&a.basis)?;
    let field = match a.field {
        FieldArg::Real => Field::Real,
        FieldArg::Complex => Field::Complex,
    };
    let v = LinearSubspaceSpec::new(basis, field)?;
    let cfg = TotallyMagneticConfig {
        s: a.s,
        sample_count: a.samples,
        seed,
        t_end: a.t_end,
        step: a.step,
        tolerance: a.tolerance,
    };
    let r = totally_magnetic_conditions(&v, &cfg)?;
    let out = SubspaceOutput {
        schema: SCHEMA,
        command: "check-subspace",
        seed,
        field: a.field,
        ambient_dim: v.ambient_dim(),
        real_dim: v.real_dim(),
        s: a.s,
        totally_magnetic: r.stays_inside,
        complex_subspace: r.complex_subspace,
        escape: r.escape,
        dalpha_cross: r.dalpha_cross,
        lorentz_leak: r.lorentz_leak,
        condition_3b: r.condition_3b,
        condition_3c: r.condition_3c,
        consistent: r.consistent(),
    };
    if cli.format == Format::Csv {
        let mut s = String::from("quantity,value\n");
        for (q, x) in [
            ("escape", out.escape),
            ("dalpha_cross", out.dalpha_cross),
            ("lorentz_leak", out.lorentz_leak),
        ] {
            s.push_str(&format!("{q},{}\n", fmt_f64(x)));
        }
        s.push_str(&format!("totally_magnetic,{}\n", out.totally_magnetic));
        return Ok(s);
    }
    Ok(to_json(&out))
}

#[derive(Serialize)]
struct HopfOutput {
    schema: &'static str,
    command: &'static str,
    s: f64,
    k: f64,
    psi: f64,
    radius: Option<f64>,
    strength_down: Option<f64>,
    fit: CircleFit,
    curvature_fd: Option<f64>,
    samples: usize,
}

fn cmd_hopf(a: &HopfArgs, cli: &Cli) -> Result<String, Failure> {
    let (s, k) = a.strength.resolve()?;
    let st = UnitTangentState::canonical(1, a.psi)?;
    let g = MagneticGeodesic::from_state(s, &st)?;
    let traj = sample_flow(&g, a.t_end, a.step)?;
    let proj = project_trajectory(&traj)?;
    if cli.format == Format::Csv {
        let mut out = String::from("t,x,y,z\n");
        for (t, p) in traj.times().iter().zip(&proj.points) {
            out.push_str(&format!("{},{},{},{}\n", fmt_f64(*t), fmt_f64(p.x[0]), fmt_f64(p.x[1]), fmt_f64(p.x[2])));
        }
        return Ok(out);
    }
    let interior = a.psi > 0.0 && a.psi < std::f64::consts::PI;
    let curvature_fd = if interior {
        Some(projected_curvature(&g, 0.5 * a.t_end, 1e-4)?)
    } else {
        None
    };
    Ok(to_json(&HopfOutput {
        schema: SCHEMA,
        command: "hopf",
        s,
        k,
        psi: a.psi,
        radius: projected_radius(s, a.psi).ok(),
        strength_down: projected_strength(s, a.psi).ok(),
        fit: proj.fit,
        curvature_fd,
        samples: proj.points.len(),
    }))
}

fn execute(cli: &Cli, seed: u64, warn: &mut dyn Write) -> Result<String, Failure> {
    match &cli.command {
        Command::Trajectory(a) => cmd_trajectory(a, cli, seed, warn),
        Command::Connect(a) => cmd_connect(a, cli, warn),
        Command::Sweep(a) => cmd_sweep(a, cli),
        Command::Mane(a) => cmd_mane(a, cli, seed),
        Command::CheckSubspace(a) => cmd_check_subspace(a, cli, seed),
        Command::Hopf(a) => cmd_hopf(a, cli),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    let seed = match std::env::var(SEED_ENV) {
        Ok(v) => match v.trim().parse::<u64>() {
            Ok(s) => s,
            Err(_) => {
                let _ = writeln!(err, "error: {SEED_ENV}={v:?} is not an unsigned integer");
                return EXIT_USAGE;
            }
        },
        Err(_) => cli.seed,
    };
    match execute(&cli, seed, err) {
        Ok(text) => {
            let written = match &cli.output {
                Some(path) => std::fs::write(path, text.as_bytes()),
                None => out.write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: {e}");
                return EXIT_INPUT;
            }
            EXIT_OK
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
