use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigUint;

use pcslab_cli::config::{ExperimentConfig, SourceKind};
use pcslab_cli::csvio;
use pcslab_cli::error::{CliError, Result};
use pcslab_cli::sweep::{run_point, run_sweep_n, run_sweep_power};
use pcslab_core::metrics::moment_ratio_empirical;
use pcslab_core::pas::{adjacent_pair_rate, run_length_stats, windowed_composition_deviation};
use pcslab_core::shaping::{quantize_composition, CcdmCodec};

/// Finite-length probabilistic constellation shaping over the nonlinear
/// fiber channel: distribution matching, PAS assembly, split-step
/// propagation, and SNR/GMI/AIR sweeps.
#[derive(Parser)]
#[command(name = "pcslab", version)]
struct Cli {
    /// Experiment configuration file (`key = value` lines, `#` comments).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output path (CSV for sweeps and analyze, SFL1 dump for simulate).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Force linear mode (skip the nonlinear operator).
    #[arg(long, global = true)]
    linear: bool,
    /// Override the config seed list, e.g. `--seeds 1,2,3`.
    #[arg(long, global = true, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Worker threads for sweep points (default: one per CPU).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distribution-matcher utilities (stdin/stdout).
    Dm {
        #[command(subcommand)]
        action: DmAction,
    },
    /// Block-length sweep: SNR, GMI, and AIR_n per n.
    SweepN,
    /// Launch-power sweep at fixed block length.
    SweepPower,
    /// Temporal metrics of a frame CSV.
    Analyze {
        /// Frame CSV produced by `simulate --frame-csv`.
        #[arg(long)]
        frame: PathBuf,
    },
    /// One simulation run, with optional full dumps.
    Simulate {
        /// Block length (default: first entry of n_list).
        #[arg(long)]
        n: Option<usize>,
        /// Seed (default: first entry of seeds).
        #[arg(long)]
        seed: Option<u64>,
        /// Write the centre-channel frame as CSV.
        #[arg(long)]
        frame_csv: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DmAction {
    /// Print codec parameters for one block length.
    Info {
        /// Block length (default: first entry of n_list).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Map a hex-encoded k-bit word from stdin to amplitude levels.
    Match {
        #[arg(long)]
        n: Option<usize>,
    },
    /// Recover the hex word from comma-separated amplitude levels on stdin.
    Dematch {
        #[arg(long)]
        n: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("pcslab: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
    let mut cfg = ExperimentConfig::from_file(path)?;
    if cli.linear {
        cfg.linear_mode = true;
    }
    if let Some(seeds) = &cli.seeds {
        if seeds.is_empty() {
            return Err(CliError::Config("--seeds must not be empty".into()));
        }
        cfg.seeds = seeds.clone();
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Dm { action } => {
            let cfg = load_config(&cli)?;
            match action {
                DmAction::Info { n } => dm_info(&cfg, *n),
                DmAction::Match { n } => dm_match(&cfg, *n),
                DmAction::Dematch { n } => dm_dematch(&cfg, *n),
            }
        }
        Command::SweepN => {
            let cfg = load_config(&cli)?;
            let result = run_sweep_n(&cfg, cli.jobs)?;
            let text = csvio::sweep_to_string(&result);
            match cli.output.as_ref().or(cfg.output.as_ref()) {
                Some(path) => csvio::emit_sweep_csv(&result, path),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
        Command::SweepPower => {
            let cfg = load_config(&cli)?;
            let rows = run_sweep_power(&cfg, &cfg.power_list_dbm, cli.jobs)?;
            let text = csvio::power_to_string(&rows);
            match cli.output.as_ref().or(cfg.output.as_ref()) {
                Some(path) => csvio::emit_power_csv(&rows, path),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
        Command::Analyze { frame } => {
            let cfg = load_config(&cli)?;
            let report = analyze(&cfg, frame)?;
            match &cli.output {
                Some(path) => std::fs::write(path, report)
                    .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display()))),
                None => {
                    print!("{report}");
                    Ok(())
                }
            }
        }
        Command::Simulate { n, seed, frame_csv } => {
            let cfg = load_config(&cli)?;
            let n = n.unwrap_or(cfg.n_list[0]);
            let seed = seed.unwrap_or(cfg.seeds[0]);
            let run = run_point(&cfg, n, seed)?;
            println!("n = {n}, seed = {seed}");
            println!("symbols measured = {}", run.snr.num_samples);
            println!("effective snr = {:.4} dB", run.snr.snr_db);
            println!(
                "residual noise power = {:.6e} W",
                run.snr.residual_noise_power
            );
            if !run.snr.reliable {
                println!("warning: fewer than 1000 symbols; SNR value is indicative only");
            }
            if let Some(path) = &cli.output {
                csvio::write_waveform(&run.waveform, path)?;
                println!("waveform dump written to {}", path.display());
            }
            if let Some(path) = frame_csv {
                csvio::emit_frame_csv(&run.frame, &cfg.amplitude_levels, path)?;
                println!("frame CSV written to {}", path.display());
            }
            Ok(())
        }
    }
}

fn codec_for(cfg: &ExperimentConfig, n: Option<usize>) -> Result<CcdmCodec> {
    if cfg.source == SourceKind::Iid {
        return Err(CliError::Config(
            "dm commands need source = ccdm".into(),
        ));
    }
    let n = n.unwrap_or(cfg.n_list[0]);
    let dist = cfg.distribution()?;
    Ok(CcdmCodec::new(quantize_composition(&dist, n)?))
}

fn dm_info(cfg: &ExperimentConfig, n: Option<usize>) -> Result<()> {
    let codec = codec_for(cfg, n)?;
    let dist = cfg.distribution()?;
    println!("n = {}", codec.n());
    println!("k = {}", codec.k());
    println!("composition = {:?}", codec.composition().counts());
    println!("num_sequences = {}", codec.num_sequences());
    println!("rate = {} bits/amplitude", codec.rate());
    println!("target_entropy = {} bits/amplitude", dist.entropy());
    println!(
        "rate_loss = {} bits/amplitude",
        codec.rate_loss(&dist)?
    );
    println!(
        "realized_entropy = {} bits/amplitude",
        codec.composition().realized_entropy()
    );
    Ok(())
}

fn read_stdin() -> Result<String> {
    let mut text = String::new();
    std::io::stdin()
        .read_to_string(&mut text)
        .map_err(|e| CliError::Runtime(format!("stdin: {e}")))?;
    Ok(text)
}

fn dm_match(cfg: &ExperimentConfig, n: Option<usize>) -> Result<()> {
    let codec = codec_for(cfg, n)?;
    let text = read_stdin()?;
    let hex = text.trim();
    let value = BigUint::parse_bytes(hex.as_bytes(), 16)
        .ok_or_else(|| CliError::Runtime(format!("not a hex word: {hex:?}")))?;
    if value >= BigUint::from(1u8) << codec.k() {
        return Err(CliError::Runtime(format!(
            "input word exceeds 2^{} − 1",
            codec.k()
        )));
    }
    let bits: Vec<bool> = (0..codec.k()).rev().map(|i| value.bit(i as u64)).collect();
    let sequence = codec.match_bits(&bits)?;
    let levels = cfg.alphabet()?;
    let line: Vec<String> = sequence
        .iter()
        .map(|&idx| levels.levels()[idx as usize].to_string())
        .collect();
    println!("{}", line.join(","));
    Ok(())
}

fn dm_dematch(cfg: &ExperimentConfig, n: Option<usize>) -> Result<()> {
    let codec = codec_for(cfg, n)?;
    let alphabet = cfg.alphabet()?;
    let text = read_stdin()?;
    let sequence: Vec<u8> = text
        .trim()
        .split(',')
        .map(|field| {
            let value: f64 = field
                .trim()
                .parse()
                .map_err(|_| CliError::Runtime(format!("bad amplitude {field:?}")))?;
            alphabet
                .levels()
                .iter()
                .position(|&l| (l - value).abs() < 1e-9)
                .map(|i| i as u8)
                .ok_or_else(|| CliError::Runtime(format!("level {value} not in the alphabet")))
        })
        .collect::<Result<_>>()?;
    let bits = codec.dematch(&sequence)?;
    let mut value = BigUint::from(0u8);
    for bit in bits {
        value <<= 1;
        if bit {
            value += 1u32;
        }
    }
    let width = codec.k().div_ceil(4).max(1);
    println!("{:0>width$}", value.to_str_radix(16), width = width);
    Ok(())
}

fn analyze(cfg: &ExperimentConfig, frame_path: &PathBuf) -> Result<String> {
    use std::fmt::Write;
    let record = csvio::read_frame_csv(frame_path)?;
    let alphabet = cfg.alphabet()?;
    let dist = cfg.distribution()?;
    let amplitudes = record.amplitude_indices(alphabet.levels())?;
    let n = record.block_length();

    let mut out = String::new();
    let _ = writeln!(out, "amplitudes = {}", amplitudes.len());
    let _ = writeln!(out, "block_length = {n}");
    let _ = writeln!(out, "blocks = {}", amplitudes.len() / n.max(1));
    let _ = writeln!(
        out,
        "adjacent_pair_rate = {}",
        adjacent_pair_rate(&amplitudes)?
    );
    let _ = writeln!(
        out,
        "iid_pair_rate_reference = {}",
        dist.probs().iter().map(|p| p * p).sum::<f64>()
    );
    let aligned = windowed_composition_deviation(&amplitudes, dist.probs(), n, n)?;
    let _ = writeln!(
        out,
        "aligned_window_deviation: max_l1 = {}, mean_l1 = {}, windows = {}",
        aligned.max_l1, aligned.mean_l1, aligned.num_windows
    );
    let sliding = windowed_composition_deviation(&amplitudes, dist.probs(), n, 1)?;
    let _ = writeln!(
        out,
        "sliding_window_deviation: max_l1 = {}, mean_l1 = {}, windows = {}",
        sliding.max_l1, sliding.mean_l1, sliding.num_windows
    );
    let stats = run_length_stats(&amplitudes, alphabet.len())?;
    for level in 0..alphabet.len() {
        let runs: usize = stats.level(level).values().sum();
        let _ = writeln!(
            out,
            "level {} ({}): occurrences = {}, runs = {}, max_run = {}",
            alphabet.levels()[level],
            alphabet.display_symbol(level),
            stats.occurrences(level),
            runs,
            stats.max_run(level)
        );
    }
    let _ = writeln!(
        out,
        "moment_ratio_empirical = {}",
        moment_ratio_empirical(&record.symbols)?
    );
    Ok(out)
}
