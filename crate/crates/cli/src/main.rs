//! `bkd`: batch front end for expanding Δ_k tables, verifying inequalities
//! and scanning for conjectural thresholds.
//!
//! Exit status: 0 all pass, 1 counterexample, 2 undecided at the working
//! precision, 3 usage or input error.

mod cache;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "bkd", version, about = "Verification engine for the broken k-diamond partition function")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Expand Δ_k(0..=N) and write it as CSV or JSON.
    Expand(ExpandArgs),
    /// Run one check over a range and write a report.
    Verify(VerifyArgs),
    /// Search for the least n after which an inequality holds up to --to.
    Scan(ScanArgs),
}

#[derive(Args, Debug)]
pub struct ExpandArgs {
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Args, Debug)]
pub struct IoArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the result here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Do not read or write the table cache.
    #[arg(long)]
    pub no_cache: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CheckName {
    Turan3,
    ThetaMono,
    Dlog,
    Logconcave,
    Jensen,
    Bessel,
    Sandwich,
    ThetaBounds,
    DeltaBounds,
    LambdaBounds,
    PhiPsi,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub check: CheckName,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    #[arg(long)]
    pub from: Option<usize>,
    #[arg(long)]
    pub to: Option<usize>,
    /// Difference order for dlog.
    #[arg(long)]
    pub r: Option<u32>,
    /// Jensen polynomial degree.
    #[arg(long)]
    pub d: Option<u32>,
    /// Working precision in bits, or "auto".
    #[arg(long, default_value = "auto", value_parser = parse_prec)]
    pub prec: Precision,
    #[arg(long, default_value_t = default_workers())]
    pub workers: usize,
    #[arg(long, default_value_t = 1)]
    pub step: usize,
    /// Use this many log-spaced n in from..=to instead of a stepped range.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Record per-point margins in the report.
    #[arg(long)]
    pub margins: bool,
    /// Bessel grid as FROM:TO:COUNT, log-spaced.
    #[arg(long, default_value = "1484:10000:50")]
    pub z_grid: String,
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScanName {
    Conjecture,
    Jensen,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(value_enum)]
    pub what: ScanName,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    #[arg(long)]
    pub to: usize,
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long, default_value_t = default_workers())]
    pub workers: usize,
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    Auto,
    Bits(u32),
}

impl Precision {
    pub fn bits(self) -> Option<u32> {
        match self {
            Precision::Auto => None,
            Precision::Bits(b) => Some(b),
        }
    }
}

fn parse_prec(s: &str) -> Result<Precision, String> {
    if s == "auto" {
        return Ok(Precision::Auto);
    }
    match s.parse::<u32>() {
        Ok(b) if b >= 64 => Ok(Precision::Bits(b)),
        Ok(_) => Err("precision must be at least 64 bits".into()),
        Err(_) => Err(format!("expected an integer or \"auto\", got {s:?}")),
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

pub const EXIT_USAGE: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Expand(a) => commands::expand(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Scan(a) => commands::scan(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_values() {
        assert_eq!(parse_prec("auto"), Ok(Precision::Auto));
        assert_eq!(parse_prec("512"), Ok(Precision::Bits(512)));
        assert!(parse_prec("32").is_err());
        assert!(parse_prec("x").is_err());
    }

    #[test]
    fn grammar() {
        let c = Cli::try_parse_from(["bkd", "verify", "theta-mono", "--k", "2", "--from", "7", "--to", "50"]).unwrap();
        match c.command {
            Command::Verify(v) => {
                assert_eq!(v.check, CheckName::ThetaMono);
                assert_eq!((v.k, v.from, v.to), (2, Some(7), Some(50)));
                assert_eq!(v.prec, Precision::Auto);
            }
            _ => panic!("wrong command"),
        }
        assert!(Cli::try_parse_from(["bkd", "verify", "nonsense"]).is_err());
        assert!(Cli::try_parse_from(["bkd", "scan", "conjecture", "--k", "1"]).is_err());
    }
}
