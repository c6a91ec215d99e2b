//! Experiment orchestration: per-point simulation pipeline, block-length and
//! launch-power sweeps with a deterministic worker pool.

use pcslab_core::fiber::{
    estimate_snr, rrc_modulate, rx_dsp, ssfm_propagate, AseNoise, SnrEstimate,
};
use pcslab_core::metrics::{air_n, gmi_monte_carlo};
use pcslab_core::pas::{generate_compound_sequence, pas_assemble, QamConstellation, ShapedFrame};
use pcslab_core::rng::{derive_seed, SeededBitSource};
use pcslab_core::shaping::{quantize_composition, CcdmCodec};
use pcslab_core::Complex64;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ExperimentConfig, SourceKind};
use crate::error::{CliError, Result};

/// RNG stream ids within one (n, seed) point: per channel 2c (payload) and
/// 2c+1 (signs); amplifier noise uses a fixed high id.
const ASE_STREAM: u64 = 1_000_000;

/// One row of a block-length sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub rate_loss_bits_per_amp: f64,
    pub snr_eff_db_mean: f64,
    pub snr_eff_db_std: f64,
    pub gmi_bits_per_2d: f64,
    pub air_n_bits_per_2d: f64,
    pub num_seeds: usize,
}

/// Rows of a block-length sweep, ascending in n.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

/// One row of a launch-power sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerRow {
    pub power_dbm: f64,
    pub snr_eff_db_mean: f64,
    pub snr_eff_db_std: f64,
    pub num_seeds: usize,
}

/// Everything produced by one simulation run.
pub struct SingleRun {
    pub snr: SnrEstimate,
    /// Untruncated shaped frame of the measured (centre) channel.
    pub frame: ShapedFrame,
    /// Transmitted symbols of the measured channel (truncated, interleaved).
    pub tx_symbols: Vec<Complex64>,
    pub rx_symbols: Vec<Complex64>,
    pub waveform: pcslab_core::fiber::WaveformGrid,
}

fn build_codec(cfg: &ExperimentConfig, n: usize) -> Result<CcdmCodec> {
    let dist = cfg.distribution()?;
    Ok(CcdmCodec::new(quantize_composition(&dist, n)?))
}

fn iid_amplitudes(probs: &[f64], len: usize, seed: u64) -> Vec<u8> {
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p;
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| {
            let u: f64 = rng.random();
            cdf.partition_point(|&c| c < u).min(probs.len() - 1) as u8
        })
        .collect()
}

/// Builds the transmitted symbol stream of one channel and, for the measured
/// channel, keeps the full frame around for inspection.
fn channel_stream(
    cfg: &ExperimentConfig,
    codec: Option<&CcdmCodec>,
    constellation: &QamConstellation,
    data_seed: u64,
    sign_seed: u64,
) -> Result<(ShapedFrame, Vec<Complex64>)> {
    let amplitudes_needed = 2 * cfg.symbols_per_run;
    let frame = match cfg.source {
        SourceKind::Ccdm => {
            let codec = codec.expect("ccdm source requires a codec");
            let mut num_blocks = amplitudes_needed.div_ceil(codec.n());
            // Amplitudes pair into symbols; odd-length frames cannot.
            if (num_blocks * codec.n()) % 2 == 1 {
                num_blocks += 1;
            }
            let mut source = SeededBitSource::new(data_seed);
            generate_compound_sequence(codec, num_blocks, &mut source)?
        }
        SourceKind::Iid => {
            // Blockless stream: one frame-sized block.
            let dist = cfg.distribution()?;
            let amplitudes = iid_amplitudes(dist.probs(), amplitudes_needed, data_seed);
            ShapedFrame::from_amplitudes(amplitudes)
        }
    };
    let signs = SeededBitSource::new(sign_seed).take_bits(frame.amplitudes().len());
    let frame = pas_assemble(frame, signs, constellation)?;
    let mut symbols = frame.symbols().expect("assembled").to_vec();
    symbols.truncate(cfg.symbols_per_run);

    if let Some(spec) = cfg.interleaver_spec()? {
        if cfg.structure_preserving {
            // De-interleave after the (stubbed) inner FEC: the composition
            // is the identity on temporal order.
            let emitted = spec.deinterleave(&spec.interleave(&symbols)?)?;
            debug_assert_eq!(emitted, symbols);
            symbols = emitted;
        } else {
            symbols = spec.interleave(&symbols)?;
        }
    }
    Ok((frame, symbols))
}

/// Runs one (n, seed) point end to end and measures the centre channel.
pub fn run_point(cfg: &ExperimentConfig, n: usize, seed: u64) -> Result<SingleRun> {
    let with_context = |err: CliError| match err {
        CliError::Runtime(msg) => CliError::Runtime(format!("(n = {n}, seed = {seed}): {msg}")),
        other => other,
    };
    run_point_inner(cfg, n, seed).map_err(with_context)
}

fn run_point_inner(cfg: &ExperimentConfig, n: usize, seed: u64) -> Result<SingleRun> {
    let grid = cfg.grid_spec()?;
    grid.validate()?;
    let link = cfg.link_config();
    link.validate()?;
    let dist = cfg.distribution()?;
    let constellation = QamConstellation::new(dist.alphabet())?;
    let codec = match cfg.source {
        SourceKind::Ccdm => Some(build_codec(cfg, n)?),
        SourceKind::Iid => None,
    };

    let mut channels = Vec::with_capacity(cfg.wdm_channels);
    let mut measured: Option<(ShapedFrame, Vec<Complex64>)> = None;
    let center = grid.wdm.center_index();
    for channel in 0..cfg.wdm_channels {
        let data_seed = derive_seed(seed, 2 * channel as u64);
        let sign_seed = derive_seed(seed, 2 * channel as u64 + 1);
        let (frame, symbols) =
            channel_stream(cfg, codec.as_ref(), &constellation, data_seed, sign_seed)?;
        if channel == center {
            measured = Some((frame, symbols.clone()));
        }
        channels.push(symbols);
    }
    let (frame, tx_symbols) = measured.expect("centre channel built");

    let wave = rrc_modulate(&channels, &grid, cfg.launch_power_dbm)?;
    let mut noise = AseNoise::from_seed(derive_seed(seed, ASE_STREAM));
    let received = ssfm_propagate(&wave, &link, &mut noise)?;
    let rx_symbols = rx_dsp(&received, &link, center)?;
    let snr = estimate_snr(&tx_symbols, &rx_symbols)?;
    Ok(SingleRun {
        snr,
        frame,
        tx_symbols,
        rx_symbols,
        waveform: received,
    })
}

/// Mean and sample standard deviation (0 for a single value).
fn mean_std(values: &[f64]) -> (f64, f64) {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / (values.len() - 1) as f64;
    (mean, var.sqrt())
}

fn install_pool<T: Send>(jobs: Option<usize>, work: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(work()),
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| CliError::Runtime(format!("worker pool: {e}")))?;
            Ok(pool.install(work))
        }
    }
}

/// Block-length sweep: per n, SNR statistics over the seed list, GMI at the
/// mean SNR, and AIR_n. Deterministic for a fixed config regardless of
/// worker count.
pub fn run_sweep_n(cfg: &ExperimentConfig, jobs: Option<usize>) -> Result<SweepResult> {
    use rayon::prelude::*;
    let points: Vec<(usize, u64)> = cfg
        .n_list
        .iter()
        .flat_map(|&n| cfg.seeds.iter().map(move |&s| (n, s)))
        .collect();
    let snrs: Vec<(usize, u64, f64)> = install_pool(jobs, || {
        points
            .par_iter()
            .map(|&(n, seed)| run_point(cfg, n, seed).map(|run| (n, seed, run.snr.snr_db)))
            .collect::<Result<Vec<_>>>()
    })??;

    let dist = cfg.distribution()?;
    let constellation = QamConstellation::new(dist.alphabet())?;
    let mut rows = Vec::with_capacity(cfg.n_list.len());
    for &n in &cfg.n_list {
        let per_seed: Vec<f64> = snrs
            .iter()
            .filter(|(rn, _, _)| *rn == n)
            .map(|&(_, _, snr)| snr)
            .collect();
        let (mean, std) = mean_std(&per_seed);
        let rate_loss = match cfg.source {
            SourceKind::Ccdm => build_codec(cfg, n)?.rate_loss(&dist)?,
            SourceKind::Iid => 0.0,
        };
        let gmi = gmi_monte_carlo(&constellation, &dist, mean, cfg.gmi_samples, cfg.gmi_seed)?;
        let air = air_n(n, rate_loss.max(0.0), mean, gmi)?;
        rows.push(SweepRow {
            n,
            rate_loss_bits_per_amp: rate_loss,
            snr_eff_db_mean: mean,
            snr_eff_db_std: std,
            gmi_bits_per_2d: gmi,
            air_n_bits_per_2d: air.air_n,
            num_seeds: per_seed.len(),
        });
    }
    Ok(SweepResult { rows })
}

/// Launch-power sweep at a fixed block length (the middle entry of the n
/// list).
pub fn run_sweep_power(
    cfg: &ExperimentConfig,
    powers: &[f64],
    jobs: Option<usize>,
) -> Result<Vec<PowerRow>> {
    use rayon::prelude::*;
    if powers.is_empty() {
        return Err(CliError::Runtime("contract violation: empty power list".into()));
    }
    let n = cfg.n_list[cfg.n_list.len() / 2];
    let points: Vec<(f64, u64)> = powers
        .iter()
        .flat_map(|&p| cfg.seeds.iter().map(move |&s| (p, s)))
        .collect();
    let snrs: Vec<(f64, f64)> = install_pool(jobs, || {
        points
            .par_iter()
            .map(|&(power, seed)| {
                let point_cfg = ExperimentConfig {
                    launch_power_dbm: power,
                    ..cfg.clone()
                };
                run_point(&point_cfg, n, seed).map(|run| (power, run.snr.snr_db))
            })
            .collect::<Result<Vec<_>>>()
    })??;

    let mut rows = Vec::with_capacity(powers.len());
    for &power in powers {
        let per_seed: Vec<f64> = snrs
            .iter()
            .filter(|(p, _)| *p == power)
            .map(|&(_, snr)| snr)
            .collect();
        let (mean, std) = mean_std(&per_seed);
        rows.push(PowerRow {
            power_dbm: power,
            snr_eff_db_mean: mean,
            snr_eff_db_std: std,
            num_seeds: per_seed.len(),
        });
    }
    Ok(rows)
}
