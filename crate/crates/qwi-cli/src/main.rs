//! Command-line front end for the impedance solver: scattering tables,
//! bound-state listings, sampled wavefunctions, and a self-check against the
//! built-in transfer-matrix reference, as CSV or JSON.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qwi::num_complex::Complex64;
use qwi::scattering::{self, IncidentSide, ScatteringResult};
use qwi::spectrum::{self, SearchParams};
use qwi::{oracle, wavefunction, PotentialSpec};

#[derive(Parser)]
#[command(
    name = "qwi",
    version,
    about = "1D scattering and bound states for piecewise-constant potentials \
             with delta and delta-prime interactions",
    after_help = "Exit codes: 0 success, 1 usage or I/O problem, 2 physics or \
                  validation failure.\nSet QWI_THREADS to pin the worker pool \
                  size (0 = one per core)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reflection and transmission at a single energy
    Scatter(ScatterArgs),
    /// Reflection and transmission over a uniform energy grid
    Sweep(SweepArgs),
    /// Every bound state below the continuum edge
    Bound(BoundArgs),
    /// Samples of one normalized bound-state wavefunction
    Wavefunction(WavefunctionArgs),
    /// Compare the solver against the independent transfer-matrix reference
    Validate(ValidateArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Potential description file
    #[arg(long, value_name = "FILE")]
    potential: PathBuf,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the table to this file instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScatterArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Total energy of the incident wave
    #[arg(long, allow_hyphen_values = true)]
    energy: f64,
    /// Incidence direction
    #[arg(long, value_enum, default_value_t = SideArg::Left)]
    side: SideArg,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// First grid energy
    #[arg(long, allow_hyphen_values = true)]
    emin: f64,
    /// Last grid energy
    #[arg(long, allow_hyphen_values = true)]
    emax: f64,
    /// Number of grid points
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    steps: u32,
    /// Incidence direction
    #[arg(long, value_enum, default_value_t = SideArg::Left)]
    side: SideArg,
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Override the lower end of the energy scan
    #[arg(long, allow_hyphen_values = true)]
    emin: Option<f64>,
    /// Bisection width target for eigenvalues
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<f64>,
}

#[derive(Args)]
struct WavefunctionArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Pick the bound state closest to this energy (default: ground state)
    #[arg(long, allow_hyphen_values = true)]
    energy: Option<f64>,
    /// Left edge of the sample window (default: 12 decay lengths out)
    #[arg(long, allow_hyphen_values = true)]
    xmin: Option<f64>,
    /// Right edge of the sample window
    #[arg(long, allow_hyphen_values = true)]
    xmax: Option<f64>,
    /// Number of sample points
    #[arg(long, default_value_t = 1001, value_parser = clap::value_parser!(u32).range(2..))]
    samples: u32,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Energy at which the two implementations are compared
    #[arg(long, allow_hyphen_values = true)]
    energy: f64,
    /// Largest acceptable relative deviation
    #[arg(long, default_value_t = 1e-9, allow_hyphen_values = true)]
    tol: f64,
    /// Incidence direction
    #[arg(long, value_enum, default_value_t = SideArg::Left)]
    side: SideArg,
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, ValueEnum)]
enum SideArg {
    Left,
    Right,
}

impl SideArg {
    fn to_side(self) -> IncidentSide {
        match self {
            SideArg::Left => IncidentSide::Left,
            SideArg::Right => IncidentSide::Right,
        }
    }

    fn name(self) -> &'static str {
        match self {
            SideArg::Left => "left",
            SideArg::Right => "right",
        }
    }
}

/// I/O and flag problems exit with 1, solver rejections and failed
/// validations with 2.
enum AppError {
    Usage(String),
    Domain(String),
}

impl From<qwi::Error> for AppError {
    fn from(e: qwi::Error) -> Self {
        AppError::Domain(e.to_string())
    }
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let informational = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if informational { 0 } else { 1 };
        }
    };
    if let Err(e) = configure_threads_from_env() {
        report(&e);
        return 1;
    }
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e @ AppError::Usage(_)) => {
            report(&e);
            1
        }
        Err(e @ AppError::Domain(_)) => {
            report(&e);
            2
        }
    }
}

fn report(e: &AppError) {
    match e {
        AppError::Usage(m) | AppError::Domain(m) => eprintln!("error: {m}"),
    }
}

fn configure_threads_from_env() -> Result<(), AppError> {
    match std::env::var("QWI_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(e) => Err(AppError::Usage(format!("QWI_THREADS is not valid unicode: {e}"))),
        Ok(raw) => {
            let n: usize = raw
                .trim()
                .parse()
                .map_err(|_| AppError::Usage(format!("QWI_THREADS must be a nonnegative integer, got {raw:?}")))?;
            qwi::configure_worker_threads(n)
                .map_err(|e| AppError::Usage(format!("cannot size the worker pool: {e}")))
        }
    }
}

fn load_spec(path: &Path) -> Result<PotentialSpec, AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(qwi::parse_potential(&text)?)
}

fn dispatch(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Scatter(a) => cmd_scatter(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Wavefunction(a) => cmd_wavefunction(a),
        Command::Validate(a) => cmd_validate(a),
    }
}

// ---------------------------------------------------------------------------
// table plumbing

enum Cell {
    Int(usize),
    Num(f64),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format!("{x:.16e}"),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(i) => serde_json::Value::from(*i),
            Cell::Num(x) => serde_json::Number::from_f64(*x)
                .map(serde_json::Value::Number)
                .unwrap_or_else(|| serde_json::Value::String(format!("{x:e}"))),
        }
    }
}

struct Table {
    columns: &'static [&'static str],
    rows: Vec<Vec<Cell>>,
}

fn render(table: &Table, input: serde_json::Value, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::new();
            out.push_str(&table.columns.join(","));
            out.push('\n');
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = table
                .rows
                .iter()
                .map(|row| {
                    let mut obj = serde_json::Map::new();
                    for (name, cell) in table.columns.iter().zip(row) {
                        obj.insert((*name).to_string(), cell.json());
                    }
                    serde_json::Value::Object(obj)
                })
                .collect();
            let doc = serde_json::json!({ "input": input, "rows": rows });
            let mut text = serde_json::to_string_pretty(&doc).expect("table serializes");
            text.push('\n');
            text
        }
    }
}

fn emit(common: &CommonArgs, table: &Table, input: serde_json::Value) -> Result<(), AppError> {
    let text = render(table, input, common.format);
    match &common.out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text)
            .map_err(|e| AppError::Usage(format!("cannot write {}: {e}", path.display()))),
    }
}

fn scatter_row(energy: f64, s: &ScatteringResult) -> Vec<Cell> {
    vec![
        Cell::Num(energy),
        Cell::Num(s.r.re),
        Cell::Num(s.r.im),
        Cell::Num(s.t.re),
        Cell::Num(s.t.im),
        Cell::Num(s.reflection),
        Cell::Num(s.transmission),
        Cell::Num(s.unitarity_defect),
    ]
}

const SCATTER_COLUMNS: &[&str] =
    &["E", "re_r", "im_r", "re_t", "im_t", "R", "T", "unitarity_defect"];

// ---------------------------------------------------------------------------
// subcommands

fn cmd_scatter(args: ScatterArgs) -> Result<(), AppError> {
    let spec = load_spec(&args.common.potential)?;
    let result = scattering::solve(&spec, args.energy, args.side.to_side())?;
    let table = Table { columns: SCATTER_COLUMNS, rows: vec![scatter_row(args.energy, &result)] };
    let input = serde_json::json!({
        "command": "scatter",
        "potential": args.common.potential.display().to_string(),
        "energy": args.energy,
        "side": args.side.name(),
    });
    emit(&args.common, &table, input)
}

fn cmd_sweep(args: SweepArgs) -> Result<(), AppError> {
    let spec = load_spec(&args.common.potential)?;
    let rows =
        scattering::sweep(&spec, args.emin, args.emax, args.steps as usize, args.side.to_side())?;
    let table = Table {
        columns: SCATTER_COLUMNS,
        rows: rows.iter().map(|(e, s)| scatter_row(*e, s)).collect(),
    };
    let input = serde_json::json!({
        "command": "sweep",
        "potential": args.common.potential.display().to_string(),
        "emin": args.emin,
        "emax": args.emax,
        "steps": args.steps,
        "side": args.side.name(),
    });
    emit(&args.common, &table, input)
}

fn cmd_bound(args: BoundArgs) -> Result<(), AppError> {
    let spec = load_spec(&args.common.potential)?;
    let params = SearchParams {
        energy_floor: args.emin,
        tolerance: args.tol,
        ..SearchParams::default()
    };
    let states = spectrum::find_bound_states_with(&spec, &params)?;
    let table = Table {
        columns: &["index", "E", "kappa_left", "kappa_right"],
        rows: states
            .iter()
            .map(|s| {
                vec![
                    Cell::Int(s.label),
                    Cell::Num(s.energy),
                    Cell::Num(s.kappa_left),
                    Cell::Num(s.kappa_right),
                ]
            })
            .collect(),
    };
    let input = serde_json::json!({
        "command": "bound",
        "potential": args.common.potential.display().to_string(),
        "emin": args.emin,
        "tol": args.tol,
    });
    emit(&args.common, &table, input)
}

fn cmd_wavefunction(args: WavefunctionArgs) -> Result<(), AppError> {
    let spec = load_spec(&args.common.potential)?;
    let states = spectrum::find_bound_states(&spec)?;
    if states.is_empty() {
        return Err(AppError::Domain(
            "the potential supports no bound states to sample".into(),
        ));
    }
    let state = match args.energy {
        None => states[0],
        Some(e) => *states
            .iter()
            .min_by(|a, b| {
                (a.energy - e).abs().partial_cmp(&(b.energy - e).abs()).expect("finite energies")
            })
            .expect("nonempty"),
    };
    let x_first = spec.boundary_position(0);
    let x_last = spec.boundary_position(spec.boundary_count() - 1);
    let xmin = args.xmin.unwrap_or_else(|| x_first - 12.0 / state.kappa_left);
    let xmax = args.xmax.unwrap_or_else(|| x_last + 12.0 / state.kappa_right);
    if !(xmin < xmax) {
        return Err(AppError::Usage(format!(
            "window is empty: xmin = {xmin}, xmax = {xmax}"
        )));
    }
    let n = args.samples as usize;
    let xs: Vec<f64> =
        (0..n).map(|i| xmin + (xmax - xmin) * i as f64 / (n - 1) as f64).collect();
    let samples = wavefunction::bound_state_wavefunction(&spec, state.energy, &xs)?;
    let table = Table {
        columns: &["x", "re_psi", "im_psi", "abs2_psi"],
        rows: samples
            .xs
            .iter()
            .zip(&samples.psi)
            .map(|(x, p)| {
                vec![Cell::Num(*x), Cell::Num(p.re), Cell::Num(p.im), Cell::Num(p.norm_sqr())]
            })
            .collect(),
    };
    let input = serde_json::json!({
        "command": "wavefunction",
        "potential": args.common.potential.display().to_string(),
        "state_index": state.label,
        "state_energy": state.energy,
        "xmin": xmin,
        "xmax": xmax,
        "samples": args.samples,
    });
    emit(&args.common, &table, input)
}

fn relative_complex(engine: Complex64, reference: Complex64) -> f64 {
    (engine - reference).norm() / reference.norm().max(1.0)
}

fn relative_real(engine: f64, reference: f64) -> f64 {
    (engine - reference).abs() / reference.abs().max(1.0)
}

fn cmd_validate(args: ValidateArgs) -> Result<(), AppError> {
    if !(args.tol > 0.0) {
        return Err(AppError::Usage(format!("--tol must be positive, got {}", args.tol)));
    }
    let spec = load_spec(&args.common.potential)?;
    let side = args.side.to_side();
    let engine = scattering::solve(&spec, args.energy, side)?;
    let reference = oracle::oracle_scatter(&spec, args.energy, side)?;
    let dev_r = relative_complex(engine.r, reference.r);
    let dev_t = relative_complex(engine.t, reference.t);
    let dev_rr = relative_real(engine.reflection, reference.reflection);
    let dev_tt = relative_real(engine.transmission, reference.transmission);
    let max_dev = dev_r.max(dev_t).max(dev_rr).max(dev_tt);
    let table = Table {
        columns: &["E", "dev_r", "dev_t", "dev_R", "dev_T", "max_dev"],
        rows: vec![vec![
            Cell::Num(args.energy),
            Cell::Num(dev_r),
            Cell::Num(dev_t),
            Cell::Num(dev_rr),
            Cell::Num(dev_tt),
            Cell::Num(max_dev),
        ]],
    };
    let input = serde_json::json!({
        "command": "validate",
        "potential": args.common.potential.display().to_string(),
        "energy": args.energy,
        "side": args.side.name(),
        "tol": args.tol,
    });
    emit(&args.common, &table, input)?;
    if max_dev > args.tol {
        return Err(AppError::Domain(format!(
            "implementations disagree: max relative deviation {max_dev:.3e} exceeds {:.3e}",
            args.tol
        )));
    }
    Ok(())
}
