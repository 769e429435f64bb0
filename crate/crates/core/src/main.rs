use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use trotterlab::bounds::ho_analytic_bound;
use trotterlab::harness::{
    emit_plotdata, preset_text, run_sweep, run_verify, write_csv, SweepConfig, VerifyConfig, PRESET_NAMES,
};
use trotterlab::{Error, Result};

/// Trotter error sweeps over Fock-space truncations.
#[derive(Parser)]
#[command(name = "trotterlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep described by a config file and write the CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_path` from the config.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also write gnuplot data here, with a `.gp` script beside it.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Print the closed-form oscillator bound for |m>.
    Bound {
        #[arg(long)]
        m: u64,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long)]
        n: usize,
    },
    /// Check the eigenstate bound on random Hermitian pairs.
    Verify {
        #[arg(long, default_value_t = 8)]
        dim: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print a built-in config.
    Preset {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PRESET_NAMES))]
        name: String,
    },
}

fn sweep(config: PathBuf, output: Option<PathBuf>, plot: Option<PathBuf>) -> Result<()> {
    let text = std::fs::read_to_string(&config).map_err(|e| Error::Io {
        path: config.clone(),
        source: e,
    })?;
    let cfg = SweepConfig::parse(&text)?;
    let Some(out) = output.or_else(|| cfg.output_path.clone()) else {
        return Err(Error::Usage("no output path: set `output_path` or pass --output".into()));
    };
    let result = run_sweep(&cfg)?;
    write_csv(&result, &out)?;
    println!("wrote {}", out.display());
    if let Some(p) = plot {
        let files = emit_plotdata(&result, &p)?;
        println!("wrote {} and {}", files.data.display(), files.script.display());
    }
    for (s, v) in result.series.iter().zip(&result.verdicts) {
        let last = s.rows().last().map(|r| r.1).unwrap_or(f64::NAN);
        match v {
            Some(v) if v.saturates => println!(
                "{}: saturates at {:.6e} from d = {} (last {:.6e})",
                s.state_label(),
                v.plateau_value.unwrap_or(f64::NAN),
                v.onset_dimension.unwrap_or(0),
                last
            ),
            Some(_) => println!("{}: does not saturate (last {:.6e})", s.state_label(), last),
            None => println!("{}: too few dimensions for window {} (last {:.6e})", s.state_label(), cfg.window, last),
        }
    }
    match &result.overall {
        Some(v) => println!("verdict: {v}"),
        None => println!("verdict: undetermined"),
    }
    println!("elapsed: {:.2} s", result.wall_seconds);
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Sweep { config, output, plot } => sweep(config, output, plot)?,
        Command::Bound { m, t, n } => {
            if n == 0 {
                return Err(Error::Usage("--n must be >= 1".into()));
            }
            println!("{:.16e}", ho_analytic_bound(m, t, n));
        }
        Command::Verify { dim, trials, seed } => {
            let report = run_verify(&VerifyConfig { dim, trials, seed })?;
            println!(
                "seed {seed}, {trials} trials, dim <= {dim}: {} checks, {} violations, {} optimized-bound violations, max error/bound {:.6}",
                report.checks, report.violations, report.optimized_violations, report.max_ratio
            );
            if !report.passed() {
                return Ok(ExitCode::from(3));
            }
        }
        Command::Preset { name } => print!("{}", preset_text(&name)?),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
