use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wzm_scan::fringe::run_fringe;
use wzm_scan::scan::run_scan;
use wzm_scan::verify::{run_verify, write_report, VerifyReport};
use wzm_scan::{CliError, Overrides, Result, ScanConfig};

#[derive(Parser)]
#[command(name = "wzm-scan", version, about = "First-order coherence of two downconverters with a shared idler")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep g1 over the (nbar1, t) grid and write CSV, optionally SVG.
    Scan(Common),
    /// Compare the exact backend against the Fock-space oracle.
    Verify(Common),
    /// Record fringe intensities at one (nbar1, t) point.
    Fringe(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Tolerance for this subcommand: route spread (scan), truncation (verify)
    /// or balanced visibility (fringe).
    #[arg(long)]
    tol: Option<f64>,
    /// Number of uniform t points in [0, 1].
    #[arg(long)]
    t_steps: Option<usize>,
    /// Comma-separated nbar1 values.
    #[arg(long, value_delimiter = ',')]
    nbar: Option<Vec<f64>>,
    /// SVG chart output (scan only).
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Also run the oracle cross-check after a scan.
    #[arg(long)]
    verify: bool,
    /// Fringe point as NBAR1,T.
    #[arg(long, value_delimiter = ',', num_args = 1, value_names = ["NBAR1,T"])]
    fringe: Option<Vec<f64>>,
    /// Number of fringe phases over one period.
    #[arg(long)]
    phases: Option<usize>,
    /// Write balanced fringe intensities instead of raw ones.
    #[arg(long)]
    balance: bool,
}

#[derive(Clone, Copy)]
enum Kind {
    Scan,
    Verify,
    Fringe,
}

fn load(common: Common, kind: Kind) -> Result<ScanConfig> {
    let mut config = match &common.config {
        Some(path) => ScanConfig::from_json_file(path)?,
        None => ScanConfig::default(),
    };
    let fringe = match common.fringe.as_deref() {
        None => None,
        Some([nbar1, t]) => Some((*nbar1, *t)),
        Some(other) => {
            return Err(CliError::config("--fringe", format!("expected NBAR1,T, got {} values", other.len())));
        }
    };
    Overrides {
        t_steps: common.t_steps,
        nbar1: common.nbar,
        out: common.out,
        svg: common.svg,
        verify: common.verify,
        fringe,
        phases: common.phases,
        balance: common.balance,
    }
    .apply(&mut config);
    if let Some(tol) = common.tol {
        let slot = match kind {
            Kind::Scan => &mut config.tolerances.route,
            Kind::Verify => &mut config.tolerances.truncation,
            Kind::Fringe => &mut config.tolerances.visibility,
        };
        *slot = tol;
    }
    config.validate()?;
    Ok(config)
}

fn emit_stdout(config: &ScanConfig, csv: &str) -> Result<()> {
    if config.out.is_none() {
        std::io::stdout()
            .write_all(csv.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e))?;
    }
    Ok(())
}

fn summarize_verify(report: &VerifyReport) -> Result<()> {
    for nbar1 in report.skipped_nbar1() {
        eprintln!("notice: nbar1 = {nbar1} SKIPPED (oracle out of range)");
    }
    if report.verified() == 0 {
        eprintln!("warning: no verifiable points");
        return Ok(());
    }
    let failures = report.failures();
    for p in &failures {
        eprintln!(
            "nbar1 = {}, t = {}: {} (deviation {:?}, estimate {:?})",
            p.nbar1,
            p.t,
            p.status.label(),
            p.max_deviation,
            p.error_estimate
        );
    }
    eprintln!(
        "verified {} points, {} failed",
        report.verified(),
        failures.len()
    );
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Tolerance(format!("{} oracle points outside tolerance", failures.len())))
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Scan(common) => {
            let config = load(common, Kind::Scan)?;
            let outcome = run_scan(&config)?;
            emit_stdout(&config, &outcome.csv)?;
            if !outcome.undefined.is_empty() {
                eprintln!(
                    "warning: {} rows at nbar1 = 0 leave the moment ratio 0/0; the closed forms give g1 = t there",
                    outcome.undefined.len()
                );
            }
            for row in &outcome.flagged {
                eprintln!("flagged: nbar1 = {}, t = {}, delta = {:e}", row.nbar1, row.t, row.delta);
            }
            let verify_result = if config.verify {
                let mut verify_config = config.clone();
                verify_config.out = None;
                summarize_verify(&run_verify(&verify_config)?)
            } else {
                Ok(())
            };
            if !outcome.flagged.is_empty() {
                return Err(CliError::Tolerance(format!(
                    "{} rows exceed route tolerance {:e}",
                    outcome.flagged.len(),
                    config.tolerances.route
                )));
            }
            verify_result
        }
        Command::Verify(common) => {
            let config = load(common, Kind::Verify)?;
            let report = run_verify(&config)?;
            write_report(&config, &report)?;
            emit_stdout(&config, &report.csv)?;
            summarize_verify(&report)
        }
        Command::Fringe(common) => {
            let config = load(common, Kind::Fringe)?;
            let outcome = run_fringe(&config)?;
            emit_stdout(&config, &outcome.csv)?;
            let error = outcome.balance_error();
            if error > config.tolerances.visibility {
                return Err(CliError::Tolerance(format!(
                    "|V_balanced - g1| = {error:e} exceeds {:e}",
                    config.tolerances.visibility
                )));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
