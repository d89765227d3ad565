use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fhjrc::config::{Modulation, Overrides};
use fhjrc::{commands, Result, RunConfig};

/// Frequency-hopping MIMO joint radar-communications simulator.
#[derive(Parser)]
#[command(name = "fhjrc", version)]
struct Cli {
    /// TOML run configuration (defaults apply to missing keys).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// SNR in dB for the link, the scene and every sweep grid.
    #[arg(long, global = true, allow_negative_numbers = true)]
    snr: Option<f64>,
    /// fhcs, 8psk or 16psk.
    #[arg(long, global = true)]
    modulation: Option<Modulation>,
    /// Radar sweep trials per SNR point.
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a transmit frame and its hop plan.
    Txgen,
    /// Demodulate a synthetic or recorded frame.
    Comm,
    /// Run one CPI of the radar chain.
    Radar,
    /// Run the configured Monte-Carlo sweep.
    Sweep,
}

fn run(cli: &Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.apply_overrides(&Overrides {
        seed: cli.seed,
        out: cli.out.clone(),
        snr_db: cli.snr,
        modulation: cli.modulation,
        trials: cli.trials,
    });
    match cli.command {
        Command::Txgen => {
            let w = commands::cmd_txgen(&cfg)?;
            println!(
                "wrote {} PRTs x {} antennas to {}",
                w.plan.prts(),
                w.plan.antennas(),
                cfg.out.display()
            );
        }
        Command::Comm => {
            let s = commands::cmd_comm(&cfg)?;
            let show = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.3e}"));
            println!(
                "{} {}: {} symbols, cfo {:.3} rad/s, fhcs BER {}, psk SER {}, psk BER {}",
                s.method,
                s.modulation,
                s.symbols,
                s.cfo_hat,
                show(s.fhcs_ber),
                show(s.psk_ser),
                show(s.psk_ber)
            );
        }
        Command::Radar => {
            let s = commands::cmd_radar(&cfg)?;
            println!(
                "{} detections, {}/{} eligible targets matched ({:.1}%)",
                s.detections,
                s.matched,
                s.eligible,
                100.0 * s.detection_rate
            );
        }
        Command::Sweep => {
            commands::cmd_sweep(&cfg)?;
            println!("sweep written to {}", cfg.out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
