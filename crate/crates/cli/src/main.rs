//! Command-line surface over the knotvol library. Every subcommand emits
//! machine-readable records: single-object JSON for scalar answers, JSON
//! Lines or CSV for sweeps and grids. Identical invocations produce
//! byte-identical output.
//!
//! Exit codes: 0 success, 2 usage error, 3 domain error, 4 numerical
//! failure.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use knotvol_core as core;
use knotvol_core::{
    Branch, ConeAngles, ExportFormat, GridSpec, GridSpec3, PotentialSpec, Quadrant, RootContext,
    Weights,
};

const SCHEMA_VERSION: &str = "1";

#[derive(Parser)]
#[command(
    name = "knotvol",
    version,
    about = "Colored Jones invariants at odd roots of unity and hyperbolic cone-manifold volumes",
    after_help = "Set RAYON_NUM_THREADS to bound the worker pool; output ordering does not depend on it."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format for record streams.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write output to a file instead of standard output.
    #[arg(long, global = true)]
    output: Option<std::path::PathBuf>,

    /// Interpret all angle inputs as multiples of pi.
    #[arg(long, global = true)]
    pi_units: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KnotArg {
    #[value(alias = "E")]
    E,
    #[value(alias = "B")]
    B,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BranchArg {
    Plus,
    Minus,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Branch {
        match b {
            BranchArg::Plus => Branch::Plus,
            BranchArg::Minus => Branch::Minus,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum QuadrantArg {
    First,
    Fourth,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ContourAction {
    Field,
    Path,
}

#[derive(Args)]
struct AngleArgs {
    /// Link: E (figure-eight knot) or B (Borromean rings).
    #[arg(long, value_enum)]
    knot: KnotArg,

    /// Cone angle in radians (or pi units with --pi-units); once for E,
    /// three times for B.
    #[arg(long = "alpha", required = true)]
    alphas: Vec<f64>,
}

impl AngleArgs {
    fn resolve(&self, pi_units: bool) -> Result<ConeAngles, CliError> {
        let scale = if pi_units { PI } else { 1.0 };
        let scaled: Vec<f64> = self.alphas.iter().map(|a| a * scale).collect();
        match (self.knot, scaled.len()) {
            (KnotArg::E, 1) => Ok(ConeAngles::e(scaled[0])?),
            (KnotArg::B, 3) => Ok(ConeAngles::b([scaled[0], scaled[1], scaled[2]])?),
            (KnotArg::E, n) => Err(CliError::Usage(format!(
                "knot E takes exactly one --alpha, got {n}"
            ))),
            (KnotArg::B, n) => Err(CliError::Usage(format!(
                "knot B takes exactly three --alpha, got {n}"
            ))),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the colored Jones invariant at explicit weights.
    Jones {
        #[arg(long, value_enum)]
        knot: KnotArg,
        /// Odd level r >= 3.
        #[arg(long)]
        r: u32,
        /// Half-integer weight; once for E, three times for B.
        #[arg(long = "j", required = true)]
        js: Vec<f64>,
    },
    /// Hyperbolic cone-manifold volume.
    Volume {
        #[command(flatten)]
        angles: AngleArgs,
    },
    /// Sweep of Im(Phi) over a real-axis interval.
    Potential {
        #[command(flatten)]
        angles: AngleArgs,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        x_min: f64,
        #[arg(long, default_value_t = PI, allow_negative_numbers = true)]
        x_max: f64,
        #[arg(long, default_value_t = 256)]
        steps: u32,
    },
    /// Critical points of Im(Phi) on (0, pi).
    Critical {
        #[command(flatten)]
        angles: AngleArgs,
    },
    /// Growth records over a list of levels plus the fitted limit.
    Converge {
        #[command(flatten)]
        angles: AngleArgs,
        /// Odd level; repeat at least three times.
        #[arg(long = "r", required = true)]
        rs: Vec<u32>,
        #[arg(long, value_enum, default_value_t = BranchArg::Minus)]
        branch: BranchArg,
    },
    /// Threshold cone angle for the figure-eight knot.
    Alpha0,
    /// Equal-angle bound for the Borromean rings.
    Bbound,
    /// Classify an angle cube against the valid-region condition.
    Region {
        #[arg(long, default_value_t = PI / 2.0)]
        lo: f64,
        #[arg(long, default_value_t = PI - 1e-6)]
        hi: f64,
        #[arg(long, default_value_t = 40)]
        steps: u32,
        /// Also emit interpolated zero-level boundary points.
        #[arg(long)]
        boundary: bool,
    },
    /// Field evaluation or level-path extraction for Im(Phi + 2 pi m z).
    Contour {
        #[command(flatten)]
        angles: AngleArgs,
        /// Integer frequency m of the linear term.
        #[arg(long, allow_negative_numbers = true)]
        m: i32,
        #[arg(long, value_enum)]
        action: ContourAction,
        /// Level value for path extraction; defaults to the midpoint of
        /// Im Phi(alpha_min/2) and Im Phi(x0).
        #[arg(long, allow_negative_numbers = true)]
        level: Option<f64>,
        #[arg(long, value_enum, default_value_t = QuadrantArg::First)]
        quadrant: QuadrantArg,
        #[arg(long, allow_negative_numbers = true)]
        u_min: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        u_max: Option<f64>,
        #[arg(long, default_value_t = -1.5, allow_negative_numbers = true)]
        v_min: f64,
        #[arg(long, default_value_t = 1.5, allow_negative_numbers = true)]
        v_max: f64,
        #[arg(long, default_value_t = 1200)]
        nu: u32,
        #[arg(long, default_value_t = 800)]
        nv: u32,
    },
}

enum CliError {
    Usage(String),
    Lib(core::Error),
    Io(io::Error),
}

impl From<core::Error> for CliError {
    fn from(e: core::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn report(&self) -> u8 {
        match self {
            CliError::Usage(msg) => {
                eprintln!("usage error: {msg}");
                2
            }
            CliError::Lib(e) => {
                eprintln!("error: {e}");
                e.exit_code() as u8
            }
            CliError::Io(e) => {
                eprintln!("i/o error: {e}");
                1
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out: BufWriter<Box<dyn Write>> = BufWriter::new(match &cli.output {
        Some(path) => match File::create(path) {
            Ok(f) => Box::new(f),
            Err(e) => {
                eprintln!("i/o error: {e}");
                return ExitCode::from(1);
            }
        },
        None => Box::new(io::stdout()),
    });
    match run(&cli, &mut out).and_then(|()| out.flush().map_err(CliError::Io)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => ExitCode::from(e.report()),
    }
}

fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Jones { knot, r, js } => cmd_jones(cli, out, *knot, *r, js),
        Command::Volume { angles } => cmd_volume(cli, out, angles),
        Command::Potential {
            angles,
            x_min,
            x_max,
            steps,
        } => cmd_potential(cli, out, angles, *x_min, *x_max, *steps),
        Command::Critical { angles } => cmd_critical(cli, out, angles),
        Command::Converge { angles, rs, branch } => cmd_converge(cli, out, angles, rs, *branch),
        Command::Alpha0 => cmd_alpha0(cli, out),
        Command::Bbound => cmd_bbound(cli, out),
        Command::Region {
            lo,
            hi,
            steps,
            boundary,
        } => cmd_region(cli, out, *lo, *hi, *steps, *boundary),
        Command::Contour {
            angles,
            m,
            action,
            level,
            quadrant,
            u_min,
            u_max,
            v_min,
            v_max,
            nu,
            nv,
        } => {
            let spec = PotentialSpec::new(angles.resolve(cli.pi_units)?)?;
            let defaults = GridSpec::default_for(&spec);
            let grid = GridSpec {
                u_min: u_min.unwrap_or(defaults.u_min),
                u_max: u_max.unwrap_or(defaults.u_max),
                v_min: *v_min,
                v_max: *v_max,
                nu: *nu,
                nv: *nv,
            };
            if grid.nu < 2 || grid.nv < 2 || grid.u_min >= grid.u_max || grid.v_min >= grid.v_max {
                return Err(CliError::Usage("degenerate contour grid".into()));
            }
            match action {
                ContourAction::Field => cmd_contour_field(cli, out, &spec, *m, &grid),
                ContourAction::Path => {
                    cmd_contour_path(cli, out, &spec, *m, *level, *quadrant, &grid)
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Serialized record shapes
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SignedLogOut {
    sign: i8,
    log_mag: f64,
    /// Plain double, absent when the magnitude overflows.
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
}

impl From<core::SignedLogValue> for SignedLogOut {
    fn from(v: core::SignedLogValue) -> Self {
        let plain = v.to_f64();
        SignedLogOut {
            sign: v.sign(),
            log_mag: v.log_mag(),
            value: plain.is_finite().then_some(plain),
        }
    }
}

fn weights_out(w: &Weights) -> Vec<f64> {
    w.as_f64()
}

fn emit_json<T: Serialize>(out: &mut dyn Write, record: &T) -> Result<(), CliError> {
    serde_json::to_writer(&mut *out, record).map_err(|e| CliError::Io(e.into()))?;
    writeln!(out)?;
    Ok(())
}

/// Scalar answers in CSV mode degrade to field,value rows.
fn emit_scalar_csv(out: &mut dyn Write, fields: &[(&str, String)]) -> Result<(), CliError> {
    writeln!(out, "field,value")?;
    for (name, value) in fields {
        writeln!(out, "{name},{value}")?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn cmd_jones(
    cli: &Cli,
    out: &mut dyn Write,
    knot: KnotArg,
    r: u32,
    js: &[f64],
) -> Result<(), CliError> {
    let ctx = RootContext::new(r)?;
    let weights = match (knot, js.len()) {
        (KnotArg::E, 1) => Weights::single(r, js[0])?,
        (KnotArg::B, 3) => Weights::triple(r, [js[0], js[1], js[2]])?,
        (KnotArg::E, n) => {
            return Err(CliError::Usage(format!(
                "knot E takes exactly one --j, got {n}"
            )))
        }
        (KnotArg::B, n) => {
            return Err(CliError::Usage(format!(
                "knot B takes exactly three --j, got {n}"
            )))
        }
    };
    let value = core::colored_jones(&ctx, &weights)?;

    #[derive(Serialize)]
    struct PartialOut {
        set: &'static str,
        sign: i8,
        log_mag: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        value: Option<f64>,
    }
    #[derive(Serialize)]
    struct JonesOut {
        schema_version: &'static str,
        r: u32,
        weights: Vec<f64>,
        total: SignedLogOut,
        growth: f64,
        partials: Vec<PartialOut>,
    }
    let record = JonesOut {
        schema_version: SCHEMA_VERSION,
        r,
        weights: weights_out(&value.weights),
        total: value.total.into(),
        growth: value.growth(),
        partials: value
            .partials
            .iter()
            .map(|(label, v)| {
                let slv: SignedLogOut = (*v).into();
                PartialOut {
                    set: label.name(),
                    sign: slv.sign,
                    log_mag: slv.log_mag,
                    value: slv.value,
                }
            })
            .collect(),
    };
    match cli.format {
        Format::Json => emit_json(out, &record),
        Format::Csv => {
            let mut fields = vec![
                ("r", r.to_string()),
                ("total_sign", record.total.sign.to_string()),
                ("total_log_mag", record.total.log_mag.to_string()),
                ("growth", record.growth.to_string()),
            ];
            for p in &record.partials {
                fields.push(("partial_set", p.set.to_string()));
                fields.push(("partial_log_mag", p.log_mag.to_string()));
            }
            emit_scalar_csv(out, &fields)
        }
    }
}

fn cmd_volume(cli: &Cli, out: &mut dyn Write, angles: &AngleArgs) -> Result<(), CliError> {
    let cone = angles.resolve(cli.pi_units)?;
    let vol = core::vol_cone(&cone)?;

    #[derive(Serialize)]
    struct VolumeOut<'a> {
        schema_version: &'static str,
        knot: &'static str,
        angles: &'a [f64],
        volume: f64,
        principal_parameter: f64,
        terms: &'a [(String, f64)],
    }
    let record = VolumeOut {
        schema_version: SCHEMA_VERSION,
        knot: cone.knot().name(),
        angles: cone.as_slice(),
        volume: vol.volume,
        principal_parameter: vol.principal_parameter,
        terms: &vol.terms,
    };
    match cli.format {
        Format::Json => emit_json(out, &record),
        Format::Csv => emit_scalar_csv(
            out,
            &[
                ("volume", vol.volume.to_string()),
                ("principal_parameter", vol.principal_parameter.to_string()),
            ],
        ),
    }
}

fn cmd_potential(
    cli: &Cli,
    out: &mut dyn Write,
    angles: &AngleArgs,
    x_min: f64,
    x_max: f64,
    steps: u32,
) -> Result<(), CliError> {
    if steps < 2 || x_min >= x_max {
        return Err(CliError::Usage("need x_min < x_max and steps >= 2".into()));
    }
    let spec = PotentialSpec::new(angles.resolve(cli.pi_units)?)?;

    #[derive(Serialize)]
    struct Row {
        schema_version: &'static str,
        x: f64,
        im_phi: f64,
    }
    if cli.format == Format::Csv {
        writeln!(out, "x,im_phi")?;
    }
    for i in 0..steps {
        let x = x_min + (x_max - x_min) * i as f64 / (steps - 1) as f64;
        let v = core::im_phi_real(&spec, x);
        match cli.format {
            Format::Json => emit_json(
                out,
                &Row {
                    schema_version: SCHEMA_VERSION,
                    x,
                    im_phi: v,
                },
            )?,
            Format::Csv => writeln!(out, "{x},{v}")?,
        }
    }
    Ok(())
}

fn cmd_critical(cli: &Cli, out: &mut dyn Write, angles: &AngleArgs) -> Result<(), CliError> {
    let spec = PotentialSpec::new(angles.resolve(cli.pi_units)?)?;
    let points = core::critical_points(&spec)?;
    let x0 = points.x0();
    let residual = core::stationary_residual(&spec, x0);

    #[derive(Serialize)]
    struct CriticalOut {
        schema_version: &'static str,
        knot: &'static str,
        points: core::CriticalPointSet,
        im_phi_at_x0: f64,
        stationary_residual_at_x0: f64,
    }
    let record = CriticalOut {
        schema_version: SCHEMA_VERSION,
        knot: spec.knot().name(),
        im_phi_at_x0: core::im_phi_real(&spec, x0),
        stationary_residual_at_x0: residual,
        points,
    };
    match cli.format {
        Format::Json => emit_json(out, &record),
        Format::Csv => emit_scalar_csv(
            out,
            &[
                ("x0", x0.to_string()),
                ("im_phi_at_x0", record.im_phi_at_x0.to_string()),
                (
                    "stationary_residual_at_x0",
                    record.stationary_residual_at_x0.to_string(),
                ),
            ],
        ),
    }
}

fn cmd_converge(
    cli: &Cli,
    out: &mut dyn Write,
    angles: &AngleArgs,
    rs: &[u32],
    branch: BranchArg,
) -> Result<(), CliError> {
    let cone = angles.resolve(cli.pi_units)?;
    let study = core::convergence_study(rs, &cone, branch.into())?;

    #[derive(Serialize)]
    struct RecordOut {
        schema_version: &'static str,
        kind: &'static str,
        r: u32,
        weights: Vec<f64>,
        growth: f64,
        target: f64,
        error: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        dominance: Option<f64>,
    }
    #[derive(Serialize)]
    struct FitOut {
        schema_version: &'static str,
        kind: &'static str,
        limit: f64,
        log_coeff: f64,
        inv_coeff: f64,
        target: f64,
        limit_error: f64,
        residuals: Vec<f64>,
    }
    if cli.format == Format::Csv {
        writeln!(out, "r,growth,target,error,dominance")?;
    }
    for rec in &study.records {
        match cli.format {
            Format::Json => emit_json(
                out,
                &RecordOut {
                    schema_version: SCHEMA_VERSION,
                    kind: "growth",
                    r: rec.r,
                    weights: weights_out(&rec.weights),
                    growth: rec.growth,
                    target: rec.target,
                    error: rec.error,
                    dominance: rec.dominance.is_finite().then_some(rec.dominance),
                },
            )?,
            Format::Csv => writeln!(
                out,
                "{},{},{},{},{}",
                rec.r, rec.growth, rec.target, rec.error, rec.dominance
            )?,
        }
    }
    match cli.format {
        Format::Json => emit_json(
            out,
            &FitOut {
                schema_version: SCHEMA_VERSION,
                kind: "fit",
                limit: study.limit,
                log_coeff: study.log_coeff,
                inv_coeff: study.inv_coeff,
                target: study.target,
                limit_error: study.limit_error,
                residuals: study.residuals.clone(),
            },
        )?,
        Format::Csv => writeln!(
            out,
            "fit,{},{},{},{}",
            study.limit, study.target, study.limit_error, study.log_coeff
        )?,
    }
    Ok(())
}

fn cmd_alpha0(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let t = core::threshold_alpha0()?;
    #[derive(Serialize)]
    struct Out {
        schema_version: &'static str,
        alpha0: f64,
        bracket_width: f64,
    }
    match cli.format {
        Format::Json => emit_json(
            out,
            &Out {
                schema_version: SCHEMA_VERSION,
                alpha0: t.value,
                bracket_width: t.bracket_width,
            },
        ),
        Format::Csv => emit_scalar_csv(
            out,
            &[
                ("alpha0", t.value.to_string()),
                ("bracket_width", t.bracket_width.to_string()),
            ],
        ),
    }
}

fn cmd_bbound(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let t = core::equal_angle_bound_b()?;
    #[derive(Serialize)]
    struct Out {
        schema_version: &'static str,
        bound: f64,
        bracket_width: f64,
    }
    match cli.format {
        Format::Json => emit_json(
            out,
            &Out {
                schema_version: SCHEMA_VERSION,
                bound: t.value,
                bracket_width: t.bracket_width,
            },
        ),
        Format::Csv => emit_scalar_csv(
            out,
            &[
                ("bound", t.value.to_string()),
                ("bracket_width", t.bracket_width.to_string()),
            ],
        ),
    }
}

fn cmd_region(
    cli: &Cli,
    out: &mut dyn Write,
    lo: f64,
    hi: f64,
    steps: u32,
    boundary: bool,
) -> Result<(), CliError> {
    let scale = if cli.pi_units { PI } else { 1.0 };
    let (lo, hi) = (lo * scale, hi * scale);
    if !(0.0..PI).contains(&lo) || !(0.0..PI).contains(&hi) || lo > hi || steps < 2 {
        return Err(CliError::Usage(
            "region grid must satisfy 0 <= lo <= hi < pi and steps >= 2".into(),
        ));
    }
    let grid = GridSpec3 { lo, hi, steps };
    let samples = core::omega0_classify(&grid);

    #[derive(Serialize)]
    struct SampleOut {
        schema_version: &'static str,
        kind: &'static str,
        angles: [f64; 3],
        condition: f64,
        in_omega0: bool,
    }
    if cli.format == Format::Csv {
        writeln!(out, "alpha1,alpha2,alpha3,condition,in_omega0")?;
    }
    for s in &samples {
        match cli.format {
            Format::Json => emit_json(
                out,
                &SampleOut {
                    schema_version: SCHEMA_VERSION,
                    kind: "sample",
                    angles: s.angles,
                    condition: s.condition,
                    in_omega0: s.in_omega0,
                },
            )?,
            Format::Csv => writeln!(
                out,
                "{},{},{},{},{}",
                s.angles[0],
                s.angles[1],
                s.angles[2],
                s.condition,
                if s.in_omega0 { 1 } else { 0 }
            )?,
        }
    }
    if boundary {
        #[derive(Serialize)]
        struct BoundaryOut {
            schema_version: &'static str,
            kind: &'static str,
            point: [f64; 3],
        }
        for p in core::omega0_boundary(&samples, &grid) {
            match cli.format {
                Format::Json => emit_json(
                    out,
                    &BoundaryOut {
                        schema_version: SCHEMA_VERSION,
                        kind: "boundary",
                        point: p,
                    },
                )?,
                Format::Csv => writeln!(out, "boundary,{},{},{}", p[0], p[1], p[2])?,
            }
        }
    }
    Ok(())
}

fn cmd_contour_field(
    cli: &Cli,
    out: &mut dyn Write,
    spec: &PotentialSpec,
    m: i32,
    grid: &GridSpec,
) -> Result<(), CliError> {
    let fg = core::field(spec, m, grid);
    let format = match cli.format {
        Format::Csv => ExportFormat::Csv,
        Format::Json => ExportFormat::Json,
    };
    core::export_grid(&fg, format, out)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_contour_path(
    cli: &Cli,
    out: &mut dyn Write,
    spec: &PotentialSpec,
    m: i32,
    level: Option<f64>,
    quadrant: QuadrantArg,
    grid: &GridSpec,
) -> Result<(), CliError> {
    let level = match level {
        Some(l) => l,
        None => core::default_level(spec)?,
    };
    let quadrant = match quadrant {
        QuadrantArg::First => Quadrant::First,
        QuadrantArg::Fourth => Quadrant::Fourth,
    };
    let path = core::level_path(spec, m, level, quadrant, grid)?;

    #[derive(Serialize)]
    struct PathOut<'a> {
        schema_version: &'static str,
        m: i32,
        level: f64,
        quadrant: &'a Quadrant,
        present: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        endpoints: Option<[core::EndpointKind; 2]>,
        points: Vec<(f64, f64)>,
    }
    match cli.format {
        Format::Json => emit_json(
            out,
            &PathOut {
                schema_version: SCHEMA_VERSION,
                m,
                level,
                quadrant: &quadrant,
                present: path.is_some(),
                endpoints: path.as_ref().map(|p| p.endpoints),
                points: path.map(|p| p.points).unwrap_or_default(),
            },
        ),
        Format::Csv => {
            writeln!(out, "u,v")?;
            if let Some(p) = path {
                for (u, v) in p.points {
                    writeln!(out, "{u},{v}")?;
                }
            }
            Ok(())
        }
    }
}
