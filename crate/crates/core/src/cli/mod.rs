//! Command-line front end: `static`, `driven`, `oracle`, `ml` and `check`.

mod commands;
pub mod config;
pub mod format;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::{Output, RunConfig};

pub const CONFIG_ENV: &str = "FRAC_RABI_CONFIG";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Numeric(_) => 2,
        }
    }

    /// Prefixes the message with the grid cell or item that failed.
    pub fn context(self, what: impl std::fmt::Display) -> Self {
        match self {
            CliError::Usage(m) => CliError::Usage(format!("{what}: {m}")),
            CliError::Numeric(m) => CliError::Numeric(format!("{what}: {m}")),
            io => io,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        match e {
            crate::Error::Domain(_) => CliError::Usage(e.to_string()),
            crate::Error::Convergence(_) => CliError::Numeric(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "frac-rabi", version, about = "Fractional-time Rabi problem: observables, oracle and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bloch components of the undriven fractional evolution over an (alpha, omega t) grid.
    Static(SweepArgs),
    /// Leading-order driven observables (sx, sy, sz, A, F, F_res) over an (alpha, omega t) grid.
    Driven(SweepArgs),
    /// Volterra oracle trajectories with a summary against the analytic path.
    Oracle(OracleArgs),
    /// Evaluate E_{alpha,beta}(z).
    Ml(MlArgs),
    /// Run the acceptance checks.
    Check(CheckArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct IoArgs {
    /// key=value config file; falls back to $FRAC_RABI_CONFIG.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output path, or "stdout".
    #[arg(long, default_value = "stdout")]
    out: String,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Comma-separated fractional orders in (0, 1].
    #[arg(long)]
    alpha: Option<String>,
    /// Initial polar angle in [0, pi].
    #[arg(long)]
    theta: Option<f64>,
    /// Coupling lambda = xi / Delta.
    #[arg(long)]
    lambda: Option<f64>,
    /// Drive frequency Omega / omega.
    #[arg(long = "omega-drive")]
    omega_drive: Option<f64>,
    /// Horizon in omega t.
    #[arg(long = "t-max")]
    t_max: Option<f64>,
    #[arg(long = "n-points")]
    n_points: Option<usize>,
    /// Comma-separated subset of sx, sy, sz, A, F, F_res.
    #[arg(long)]
    outputs: Option<String>,
    /// Cross-check every cell against an independent path; exit 2 on any violation.
    #[arg(long)]
    check: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Rectangular,
    Trapezoidal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum HamiltonianArg {
    Static,
    Rabi,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    sweep: SweepArgs,
    #[arg(long = "n-steps", default_value_t = 4096)]
    n_steps: usize,
    #[arg(long, value_enum, default_value = "trapezoidal")]
    scheme: SchemeArg,
    #[arg(long, value_enum, default_value = "rabi")]
    hamiltonian: HamiltonianArg,
    /// 0 solves the implicit scheme; k > 0 runs k Picard sweeps.
    #[arg(long = "picard-order", default_value_t = 0)]
    picard_order: usize,
}

#[derive(Args, Debug)]
struct MlArgs {
    #[command(flatten)]
    io: IoArgs,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long = "z-re", allow_hyphen_values = true)]
    z_re: f64,
    #[arg(long = "z-im", default_value_t = 0.0, allow_hyphen_values = true)]
    z_im: f64,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, default_value = "stdout")]
    out: String,
    /// Comma-separated criterion ids; all when omitted.
    #[arg(long)]
    only: Option<String>,
}

fn base_config(io: &IoArgs) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    let path = io.config.clone().or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    if let Some(p) = path {
        cfg.apply_file(&p)?;
    }
    Ok(cfg)
}

fn sweep_config(a: &SweepArgs) -> Result<RunConfig, CliError> {
    let mut cfg = base_config(&a.io)?;
    if let Some(v) = &a.alpha {
        cfg.set("alpha", v)?;
    }
    let nums = [("theta", a.theta), ("lambda", a.lambda), ("omega_drive", a.omega_drive), ("t_max", a.t_max)];
    for (k, v) in nums {
        if let Some(x) = v {
            cfg.set(k, &x.to_string())?;
        }
    }
    if let Some(n) = a.n_points {
        cfg.set("n_points", &n.to_string())?;
    }
    if let Some(o) = &a.outputs {
        cfg.set("outputs", o)?;
    }
    Ok(cfg)
}

/// Emitted document: CSV text (banner, header, rows, trailing comment lines) or JSON.
pub struct Document {
    pub table: format::Table,
    /// Extra CSV comment lines after the rows.
    pub trailer: Vec<String>,
    /// JSON replacement for the plain row array, if any.
    pub json: Option<serde_json::Value>,
}

impl Document {
    fn write(&self, fmt: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match fmt {
            Format::Csv => {
                self.table.write_csv(out)?;
                for line in &self.trailer {
                    writeln!(out, "# {line}")?;
                }
            }
            Format::Json => {
                let v = self.json.clone().unwrap_or_else(|| self.table.to_json());
                serde_json::to_writer_pretty(&mut *out, &v).map_err(std::io::Error::other)?;
                writeln!(out)?;
            }
        }
        Ok(())
    }
}

fn emit(doc: &Document, fmt: Format, dest: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    if dest == "stdout" || dest == "-" {
        doc.write(fmt, stdout)?;
        stdout.flush()?;
    } else {
        let mut f = std::io::BufWriter::new(
            std::fs::File::create(dest).map_err(|e| CliError::Usage(format!("cannot create {dest}: {e}")))?,
        );
        doc.write(fmt, &mut f)?;
        f.flush()?;
    }
    Ok(())
}

fn dispatch(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Static(a) => {
            let cfg = sweep_config(&a)?;
            let doc = commands::cmd_static(&cfg, a.check)?;
            emit(&doc, a.io.format, &a.io.out, stdout)
        }
        Command::Driven(a) => {
            let cfg = sweep_config(&a)?;
            let doc = commands::cmd_driven(&cfg, a.check)?;
            emit(&doc, a.io.format, &a.io.out, stdout)
        }
        Command::Oracle(a) => {
            let cfg = sweep_config(&a.sweep)?;
            let opts = commands::OracleOptions {
                n_steps: a.n_steps,
                scheme: a.scheme,
                hamiltonian: a.hamiltonian,
                picard_order: a.picard_order,
            };
            let (doc, violations) = commands::cmd_oracle(&cfg, &opts, a.sweep.check)?;
            emit(&doc, a.sweep.io.format, &a.sweep.io.out, stdout)?;
            match violations.is_empty() {
                true => Ok(()),
                false => Err(CliError::Numeric(violations.join("; "))),
            }
        }
        Command::Ml(a) => {
            let cfg = base_config(&a.io)?;
            let doc = commands::cmd_ml(&cfg, a.alpha, a.beta, a.z_re, a.z_im)?;
            emit(&doc, a.io.format, &a.io.out, stdout)
        }
        Command::Check(a) => {
            let ids = match &a.only {
                None => crate::checks::CHECK_IDS.to_vec(),
                Some(s) => s
                    .split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<u8>()
                            .ok()
                            .filter(|id| crate::checks::CHECK_IDS.contains(id))
                            .ok_or_else(|| CliError::Usage(format!("unknown criterion '{x}'")))
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            };
            let (doc, failed) = commands::cmd_check(&ids);
            emit(&doc, a.format, &a.out, stdout)?;
            match failed.is_empty() {
                true => Ok(()),
                false => Err(CliError::Numeric(format!("failing criteria: {failed:?}"))),
            }
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(stdout, "{text}") } else { write!(stderr, "{text}") };
            return code;
        }
    };
    match dispatch(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "frac-rabi: {e}");
            e.exit_code()
        }
    }
}
