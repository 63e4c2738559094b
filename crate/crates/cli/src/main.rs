//! `qilab` — desk-scale experiments: spectra, exact moments, extendibility
//! scans, POVM sparsification, game values, witness audits, and channel
//! compression. Every run writes CSV/JSON artifacts plus a manifest echoing
//! the full configuration; exit code 0 iff all embedded assertions pass.

mod artifacts;
mod commands;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug)]
pub enum Failure {
    /// bad flags or parameters → exit 1
    Config(String),
    /// an embedded assertion failed → exit 2
    Assertion(String),
    /// enumeration/size budget exhausted → exit 3
    Budget(String),
}

#[derive(Args, Debug)]
struct Common {
    /// RNG seed; identical config + seed reproduces CSV/JSON byte for byte
    #[arg(long, default_value_t = 1234)]
    seed: u64,
    /// output directory for {name}.csv/json/svg/manifest.json
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// artifact base name (defaults to the subcommand)
    #[arg(long)]
    name: Option<String>,
}

#[derive(Parser, Debug)]
#[command(name = "qilab", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Pooled spectra of the modified ensembles vs their limiting laws
    Spectrum {
        /// modified-wishart | modified-gue
        #[arg(long)]
        family: String,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Wishart aspect ratio s/d² (ignored for GUE)
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 100)]
        reps: usize,
        #[arg(long, default_value_t = 40)]
        bins: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Exact E Tr[(Σ_j X̃(j))^p] with optional Monte Carlo cross-check
    Moments {
        /// gue | wishart | gue-pt
        #[arg(long)]
        family: String,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        d: u64,
        /// Wishart environment dimension (ignored for GUE)
        #[arg(long, default_value_t = 1)]
        s: u64,
        /// Monte Carlo repetitions; 0 disables the cross-check
        #[arg(long, default_value_t = 0)]
        mc_reps: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Closed-form sup of ⟨φ⁺, ·⟩ over k-extendible states, scanned in k
    Extendibility {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 4)]
        k_max: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Random-POVM sparsification vs the uniform norm on sampled directions
    Sparsify {
        #[arg(long, default_value_t = 8)]
        d: usize,
        /// number of sparsifying outcome vectors
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 20_000)]
        mc_samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Exact (or labeled-approximate) game values
    Games {
        /// chsh | anti3
        #[arg(long)]
        game: String,
        /// ns | snos | classical
        #[arg(long)]
        class: String,
        /// parallel repetitions
        #[arg(long, default_value_t = 1)]
        repeat: usize,
        #[command(flatten)]
        common: Common,
    },
    /// GME witness lifting: domination and biseparable-soundness audit
    Witness {
        #[arg(long, default_value_t = 50)]
        bundles: usize,
        /// biseparable states sampled per bundle
        #[arg(long, default_value_t = 100)]
        states: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Environment compression of the fully randomizing channel
    Compress {
        #[arg(long, default_value_t = 4)]
        d: usize,
        /// comma-separated Kraus budgets, e.g. 50,200,800
        #[arg(long, default_value = "300")]
        n: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
}

fn dispatch(cli: Cli) -> Result<artifacts::RunOutput, Failure> {
    match cli.cmd {
        Command::Spectrum {
            family,
            d,
            k,
            c,
            reps,
            bins,
            common,
        } => commands::spectrum(
            &family,
            d,
            k,
            c,
            reps,
            bins,
            common.seed,
            &common.out,
            common.name.as_deref().unwrap_or("spectrum"),
        ),
        Command::Moments {
            family,
            p,
            k,
            d,
            s,
            mc_reps,
            common,
        } => commands::moments(
            &family,
            p,
            k,
            d,
            s,
            mc_reps,
            common.seed,
            &common.out,
            common.name.as_deref().unwrap_or("moments"),
        ),
        Command::Extendibility { d, k_max, common } => commands::extendibility(
            d,
            k_max,
            &common.out,
            common.name.as_deref().unwrap_or("extendibility"),
            common.seed,
        ),
        Command::Sparsify {
            d,
            n,
            trials,
            mc_samples,
            common,
        } => commands::sparsify(
            d,
            n,
            trials,
            mc_samples,
            common.seed,
            &common.out,
            common.name.as_deref().unwrap_or("sparsify"),
        ),
        Command::Games {
            game,
            class,
            repeat,
            common,
        } => commands::games(
            &game,
            &class,
            repeat,
            &common.out,
            common.name.as_deref().unwrap_or("games"),
        ),
        Command::Witness {
            bundles,
            states,
            common,
        } => commands::witness(
            bundles,
            states,
            common.seed,
            &common.out,
            common.name.as_deref().unwrap_or("witness"),
        ),
        Command::Compress {
            d,
            n,
            samples,
            common,
        } => {
            let grid: Result<Vec<usize>, _> =
                n.split(',').map(|t| t.trim().parse::<usize>()).collect();
            let grid = grid.map_err(|_| Failure::Config(format!("bad --n list '{n}'")))?;
            commands::compress_cmd(
                d,
                &grid,
                samples,
                common.seed,
                &common.out,
                common.name.as_deref().unwrap_or("compress"),
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are successful exits; real parse errors
            // are config errors
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(mut run) => match run.finish() {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => {
                for a in run.assertions.iter().filter(|a| !a.pass) {
                    eprintln!("assertion failed: {} — {}", a.name, a.detail);
                }
                ExitCode::from(2)
            }
            Err(e) => {
                eprintln!("error: cannot write manifest: {e}");
                ExitCode::from(1)
            }
        },
        Err(Failure::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Assertion(m)) => {
            eprintln!("assertion failure: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(m)) => {
            eprintln!("budget exhausted: {m}");
            ExitCode::from(3)
        }
    }
}
