use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rotlab::acceptance::Context;
use rotlab::commands::{self, parse_complex, RotationArgs};
use rotlab::spec_file::load_spec;
use rotlab::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "rotlab", version, about = "Rotation, distortion and modulus experiments for planar spiral maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct MapArg {
    /// Map-spec JSON file.
    #[arg(long)]
    map: PathBuf,
}

#[derive(Args)]
struct OutArg {
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Value, Wirtinger derivatives, |mu| and K at one point (JSON on stdout).
    Eval {
        #[command(flatten)]
        map: MapArg,
        /// Point, e.g. `0.2`, `1+1i`.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Winding profile: rotation.csv, rotation.json, rotation.svg.
    Rotation {
        #[command(flatten)]
        map: MapArg,
        /// Center of rotation.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        z0: String,
        #[arg(long, default_value_t = 1e-10)]
        rmin: f64,
        #[arg(long, default_value_t = 9.0)]
        decades: f64,
        #[arg(long, default_value_t = 16)]
        thetas: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Moduli bounds over z0 = 2^-k: modulus.csv, crossings.csv, modulus.svg.
    Modulus {
        #[command(flatten)]
        map: MapArg,
        /// Exponent; defaults to the map's p.
        #[arg(long)]
        p: Option<f64>,
        /// Single z0 instead of the sweep.
        #[arg(long)]
        z0: Option<f64>,
        #[arg(long, default_value_t = 5)]
        kmin: i32,
        #[arg(long, default_value_t = 12)]
        kmax: i32,
        #[arg(long, default_value_t = 16)]
        thetas: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Partition minimum: closed form against the smoothing oracle (lemma.csv).
    Lemma {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Numeric vs analytic integrability verdicts (verdicts.csv).
    Integrability {
        /// Classify this map instead of the default grids.
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Runs the acceptance suite (report.json); exit 0 iff every criterion passes.
    Report {
        /// Map whose empirical constant is reported.
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable output"));
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Eval { map, z } => {
            let spec = load_spec(&map.map)?;
            print_json(&commands::cmd_eval(&spec, parse_complex(&z)?)?);
        }
        Command::Rotation { map, z0, rmin, decades, thetas, out } => {
            let spec = load_spec(&map.map)?;
            let args = RotationArgs { z0: parse_complex(&z0)?, rmin, decades, n_theta: thetas, per_decade: 8 };
            print_json(&commands::cmd_rotation(&spec, &args, &out.out)?);
        }
        Command::Modulus { map, p, z0, kmin, kmax, thetas, out } => {
            let spec = load_spec(&map.map)?;
            let z0s: Vec<f64> = match z0 {
                Some(z) => vec![z],
                None if kmin <= kmax => (kmin..=kmax).map(|k| 2f64.powi(-k)).collect(),
                None => return Err(CliError::Config("kmin must not exceed kmax".into())),
            };
            print_json(&commands::cmd_modulus(&spec, p.unwrap_or(spec.p()), &z0s, thetas, &out.out)?);
        }
        Command::Lemma { a, n, out } => print_json(&commands::cmd_lemma(a, n, &out.out)?),
        Command::Integrability { map, p, out } => {
            let spec = map.as_deref().map(load_spec).transpose()?;
            print_json(&commands::cmd_integrability(spec.as_ref(), p, &out.out)?);
        }
        Command::Report { map, seed, out } => {
            let map = map.as_deref().map(load_spec).transpose()?;
            let report = commands::cmd_report(&Context { seed, map }, &out.out)?;
            for c in &report.criteria {
                println!("[{}] {:>2} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.id, c.title, c.detail);
            }
            if !report.all_passed {
                return Err(CliError::Invariant("acceptance suite has failing criteria".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rotlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
