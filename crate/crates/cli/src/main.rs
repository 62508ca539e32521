//! `chiral`: batch front end for the chirality-wall experiments.

mod commands;
mod error;
mod output;
mod settings;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use error::CliError;
use output::{ensure_dir, write_atomic, Manifest, Run};
use settings::*;

#[derive(Debug, Parser)]
#[command(name = "chiral", version, about = "Lattice chirality walls: energies, recovery sequences, relaxation")]
struct Cli {
    /// TOML file with a table per subcommand; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for output files and the manifest.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Helical ground state of a given chirality and its energies.
    GroundState(GroundStateArgs),
    /// Lattice energies of the recovery walls along a schedule.
    WallEnergy(WallArgs),
    /// Descent from a start field; writes the trace and the final field.
    Relax(RelaxArgs),
    /// Jin-Kohn total variation production against the entropy direction.
    EntropyScan(EntropyScanArgs),
    /// Recovery energies against the limit wall energy.
    GammaTable(WallArgs),
    /// JSON report of the a-priori checks on a stored field.
    Diagnose(DiagnoseArgs),
}

fn pair(s: &str) -> Result<[f64; 2], String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected 'x,y', got '{s}'"))?;
    let p = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"));
    Ok([p(a)?, p(b)?])
}

macro_rules! overlay {
    ($args:expr, $s:expr; $($f:ident),* $(,)?) => {
        $( if let Some(v) = $args.$f { $s.$f = v; } )*
    };
}

#[derive(Debug, Args)]
struct GroundStateArgs {
    /// Chirality `x,y`; normalized if within 1e-3 of unit length.
    #[arg(long, value_parser = pair, allow_hyphen_values = true)]
    chi: Option<[f64; 2]>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Lattice spacing.
    #[arg(long)]
    l: Option<f64>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    #[arg(long, value_enum)]
    boundary: Option<GridBoundary>,
    #[arg(long, allow_hyphen_values = true)]
    theta0: Option<f64>,
}

impl GroundStateArgs {
    fn apply(self, s: &mut GroundStateSettings) {
        overlay!(self, s; chi, alpha, l, nx, ny, boundary, theta0);
    }
}

#[derive(Debug, Args)]
struct WallArgs {
    #[arg(long)]
    eps0: Option<f64>,
    /// Schedule length.
    #[arg(long)]
    levels: Option<usize>,
    /// `δ = ε^exponent`.
    #[arg(long)]
    exponent: Option<f64>,
    /// Explicit ε list, comma separated.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// Explicit δ list matching `--eps`.
    #[arg(long, value_delimiter = ',')]
    delta: Option<Vec<f64>>,
    /// Rotation of the canonical wall, radians.
    #[arg(long, allow_hyphen_values = true)]
    wall_angle: Option<f64>,
    #[arg(long, value_enum)]
    kernel: Option<KernelKind>,
    /// Exponent of the polynomial kernel.
    #[arg(long)]
    power: Option<u32>,
    /// Kernel radius in units of ε.
    #[arg(long)]
    radius: Option<f64>,
}

impl WallArgs {
    fn apply(self, s: &mut WallSettings) {
        overlay!(self, s; eps0, levels, exponent, wall_angle, kernel, power, radius);
        if self.eps.is_some() {
            s.eps = self.eps;
        }
        if self.delta.is_some() {
            s.delta = self.delta;
        }
    }
}

#[derive(Debug, Args)]
struct RelaxArgs {
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, value_parser = pair, allow_hyphen_values = true)]
    chi_left: Option<[f64; 2]>,
    #[arg(long, value_parser = pair, allow_hyphen_values = true)]
    chi_right: Option<[f64; 2]>,
    #[arg(long, value_enum)]
    boundary: Option<RelaxEdges>,
    #[arg(long, value_enum)]
    start: Option<StartKind>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    tol_grad: Option<f64>,
    #[arg(long, value_enum)]
    method: Option<MethodKind>,
    #[arg(long)]
    momentum: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    theta0: Option<f64>,
}

impl RelaxArgs {
    fn apply(self, s: &mut RelaxSettings) {
        overlay!(self, s; nx, ny, eps, chi_left, chi_right, boundary, max_iters, step, tol_grad, method, momentum, seed, theta0);
        if self.delta.is_some() {
            s.delta = self.delta;
        }
        if self.start.is_some() {
            s.start = self.start;
        }
    }
}

#[derive(Debug, Args)]
struct EntropyScanArgs {
    /// Stored spin field; defaults to the sharp canonical wall.
    #[arg(long)]
    field: Option<PathBuf>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    wall_angle: Option<f64>,
    /// Cells per unit length of the sharp wall.
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    angle_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    angle_max: Option<f64>,
    /// Number of angles, endpoints included.
    #[arg(long)]
    count: Option<usize>,
}

impl EntropyScanArgs {
    fn apply(self, s: &mut EntropyScanSettings) {
        overlay!(self, s; wall_angle, resolution, angle_min, angle_max, count);
        if self.field.is_some() {
            s.field = self.field;
        }
        if self.delta.is_some() {
            s.delta = self.delta;
        }
    }
}

#[derive(Debug, Args)]
struct DiagnoseArgs {
    #[arg(long)]
    field: Option<PathBuf>,
    #[arg(long)]
    delta: Option<f64>,
    /// Angle above which a cell counts as large.
    #[arg(long)]
    threshold: Option<f64>,
}

impl DiagnoseArgs {
    fn apply(self, s: &mut DiagnoseSettings) {
        overlay!(self, s; threshold);
        if self.field.is_some() {
            s.field = self.field;
        }
        if self.delta.is_some() {
            s.delta = self.delta;
        }
    }
}

struct Context {
    out_dir: PathBuf,
    pool: rayon::ThreadPool,
}

impl Context {
    fn finish<S: Serialize>(&self, command: &str, settings: &S, run: Run) -> Result<String, CliError> {
        let manifest = Manifest {
            command,
            version: env!("CARGO_PKG_VERSION"),
            threads: self.pool.current_num_threads(),
            settings,
            derived: &run.derived,
            outputs: run.files.iter().map(|(n, _)| n.as_str()).collect(),
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        for (name, bytes) in &run.files {
            write_atomic(&self.out_dir.join(name), bytes)?;
        }
        write_atomic(&self.out_dir.join(format!("{}.manifest.json", command.replace('-', "_"))), text.as_bytes())?;
        Ok(run.stdout)
    }
}

fn execute(cli: Cli) -> Result<String, CliError> {
    let mut file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let threads = cli.threads.or(file.threads).unwrap_or(0);
    let out_dir = cli.out_dir.clone().or(file.out_dir.take()).unwrap_or_else(|| PathBuf::from("."));
    ensure_dir(&out_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let ctx = Context { out_dir, pool };
    match cli.command {
        Command::GroundState(a) => {
            let mut s: GroundStateSettings = from_table("ground-state", file.ground_state)?;
            a.apply(&mut s);
            let run = ctx.pool.install(|| commands::ground_state(&s))?;
            ctx.finish("ground-state", &s, run)
        }
        Command::WallEnergy(a) => {
            let mut s: WallSettings = from_table("wall-energy", file.wall_energy)?;
            a.apply(&mut s);
            let run = ctx.pool.install(|| commands::wall_energy(&s))?;
            ctx.finish("wall-energy", &s, run)
        }
        Command::GammaTable(a) => {
            let mut s: WallSettings = from_table("gamma-table", file.gamma_table)?;
            a.apply(&mut s);
            let run = ctx.pool.install(|| commands::gamma_table(&s))?;
            ctx.finish("gamma-table", &s, run)
        }
        Command::Relax(a) => {
            let mut s: RelaxSettings = from_table("relax", file.relax)?;
            a.apply(&mut s);
            let run = ctx.pool.install(|| commands::relax_cmd(&mut s))?;
            ctx.finish("relax", &s, run)
        }
        Command::EntropyScan(a) => {
            let mut s: EntropyScanSettings = from_table("entropy-scan", file.entropy_scan)?;
            a.apply(&mut s);
            let run = ctx.pool.install(|| commands::entropy_scan(&s))?;
            ctx.finish("entropy-scan", &s, run)
        }
        Command::Diagnose(a) => {
            let mut s: DiagnoseSettings = from_table("diagnose", file.diagnose)?;
            a.apply(&mut s);
            let run = ctx.pool.install(|| commands::diagnose_cmd(&s))?;
            ctx.finish("diagnose", &s, run)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Usage(e.to_string().trim_end().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(2);
        }
    };
    match execute(cli) {
        Ok(out) => {
            let _ = std::io::stdout().write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
