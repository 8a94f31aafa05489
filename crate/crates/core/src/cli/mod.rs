//! Commands behind the `hdg` binary.
//!
//! Exit codes: 0 success, 1 identity check failed, 2 usage or configuration
//! error, 3 numerical failure.

pub mod config;
pub mod identities;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::analysis::{run_mms, run_study, Column, ProblemKind, RateTable, StudyConfig};
use crate::error::HdgError;
use crate::hdg::SolverOptions;
pub use config::{parse_config, read_config};
pub use identities::{
    verify_identities, IdentityCheck, IdentityReport, IdentitySettings, ADJOINT, ASSEMBLY, ENERGY_B1, ENERGY_B2,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    IdentityFailure = 1,
    ConfigError = 2,
    NumericalFailure = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Parser)]
#[command(name = "hdg", version, about = "HDG solver for a Dirichlet boundary control problem")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a convergence study described by a configuration file.
    RunStudy {
        config: PathBuf,
        /// Do not write the gnuplot script.
        #[arg(long)]
        no_plot: bool,
    },
    /// Check the energy, adjoint and assembly identities on random tuples.
    VerifyIdentities {
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Use tau1 = tau2 instead of tau1 = tau2 + beta.n (breaks the adjoint identity).
        #[arg(long)]
        tau1_equals_tau2: bool,
    },
    /// Forward manufactured-solution convergence test.
    RunMms {
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [8, 16, 32, 64])]
        levels: Vec<usize>,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitStatus::ConfigError.code() } else { ExitStatus::Success.code() };
        }
    };
    let status = match cli.command {
        Command::RunStudy { config, no_plot } => cmd_run_study(&config, !no_plot),
        Command::VerifyIdentities { k, n, seed, samples, tau1_equals_tau2 } => {
            cmd_verify_identities(&IdentitySettings { k, n, seed, samples, tau1_equals_tau2, ..Default::default() })
        }
        Command::RunMms { k, levels, output } => cmd_run_mms(k, &levels, output.as_deref()),
    };
    status.code()
}

fn failure_status(e: &HdgError) -> ExitStatus {
    match e {
        HdgError::Config { .. } | HdgError::InvalidArgument(_) | HdgError::NonNested(_) => ExitStatus::ConfigError,
        HdgError::UnsupportedDegree { .. } | HdgError::InvalidData(_) => ExitStatus::ConfigError,
        _ => ExitStatus::NumericalFailure,
    }
}

pub fn cmd_run_study(path: &Path, plot: bool) -> ExitStatus {
    let cfg = match read_config(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return ExitStatus::ConfigError;
        }
    };
    let table = match run_study(&cfg) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("study failed: {e}");
            return failure_status(&e);
        }
    };
    print!("{table}");
    match write_outputs(&cfg, &table, plot) {
        Ok(csv) => {
            println!("wrote {}", csv.display());
            ExitStatus::Success
        }
        Err(e) => {
            eprintln!("cannot write results: {e}");
            ExitStatus::NumericalFailure
        }
    }
}

/// Base name of the output files of a study.
pub fn output_stem(cfg: &StudyConfig) -> String {
    let p = match cfg.problem {
        ProblemKind::Benchmark => "paper",
        ProblemKind::Mms => "mms",
        ProblemKind::Zero => "zero",
    };
    format!("{p}_k{}", cfg.k)
}

fn write_outputs(cfg: &StudyConfig, table: &RateTable, plot: bool) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(&cfg.output_dir)?;
    let stem = output_stem(cfg);
    let csv = cfg.output_dir.join(format!("{stem}.csv"));
    table.write_csv(std::io::BufWriter::new(std::fs::File::create(&csv)?))?;
    if plot {
        std::fs::write(cfg.output_dir.join(format!("{stem}.gp")), gnuplot_script(table, &stem))?;
    }
    Ok(csv)
}

/// gnuplot script plotting every computed error column of `<stem>.csv` against h.
pub fn gnuplot_script(table: &RateTable, stem: &str) -> String {
    let mut s = String::new();
    s.push_str("set terminal pngcairo size 900,600\n");
    s.push_str(&format!("set output '{stem}.png'\n"));
    s.push_str("set datafile separator ','\nset key autotitle columnhead\nset logscale xy\nset key bottom right\n");
    s.push_str("set xlabel 'h'\nset ylabel 'L2 error'\n");
    let plots: Vec<String> = Column::ALL
        .iter()
        .enumerate()
        .filter(|(_, c)| table.rows.iter().any(|r| r.error(**c).is_some()))
        .map(|(i, c)| format!("'{stem}.csv' using 3:{} with linespoints title '{}'", 4 + 2 * i, c.name()))
        .collect();
    s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    s
}

pub fn cmd_verify_identities(settings: &IdentitySettings) -> ExitStatus {
    match verify_identities(settings) {
        Ok(report) => {
            print!("{report}");
            if report.passed() {
                ExitStatus::Success
            } else {
                ExitStatus::IdentityFailure
            }
        }
        Err(e) => {
            eprintln!("identity check failed to run: {e}");
            failure_status(&e)
        }
    }
}

pub fn cmd_run_mms(k: usize, levels: &[usize], output: Option<&Path>) -> ExitStatus {
    let cfg = StudyConfig::default();
    let opts = SolverOptions::default();
    let table = match run_mms(k, levels, cfg.beta, 1.0, &opts) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("manufactured-solution run failed: {e}");
            return failure_status(&e);
        }
    };
    let written = match output {
        Some(p) => std::fs::File::create(p).and_then(|f| table.write_csv(std::io::BufWriter::new(f))),
        None => table.write_csv(std::io::stdout().lock()).and_then(|_| std::io::stdout().flush()),
    };
    match written {
        Ok(()) => ExitStatus::Success,
        Err(e) => {
            eprintln!("cannot write results: {e}");
            ExitStatus::NumericalFailure
        }
    }
}
