//! File formats: sweep CSVs, frame CSVs, and the SFL1 waveform dump.
//!
//! Floats are written with Rust's shortest round-trip formatting ('.'
//! decimal separator), so emitted files are byte-stable and parse back to
//! exactly the values that were written.

use std::io::{Read, Write};
use std::path::Path;

use pcslab_core::fiber::WaveformGrid;
use pcslab_core::pas::ShapedFrame;
use pcslab_core::Complex64;

use crate::error::{CliError, Result};
use crate::sweep::{PowerRow, SweepResult, SweepRow};

pub const SWEEP_HEADER: &str =
    "n,rate_loss_bits_per_amp,snr_eff_db_mean,snr_eff_db_std,gmi_bits_per_2d,air_n_bits_per_2d,num_seeds";
pub const POWER_HEADER: &str = "power_dbm,snr_eff_db_mean,snr_eff_db_std,num_seeds";
pub const FRAME_HEADER: &str = "index,amplitude_level,sign,symbol_re,symbol_im,block_id";

/// SFL1 waveform dump: 64-byte header (magic "SFL1", f64 LE sample rate in
/// GHz at offset 8, u64 LE sample count at offset 16, zero padding), then
/// interleaved little-endian f64 (re, im) pairs.
pub const WAVEFORM_MAGIC: &[u8; 4] = b"SFL1";
pub const WAVEFORM_HEADER_LEN: usize = 64;

fn io_error(path: &Path, err: std::io::Error) -> CliError {
    CliError::Runtime(format!("{}: {err}", path.display()))
}

pub fn sweep_to_string(result: &SweepResult) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for row in &result.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.n,
            row.rate_loss_bits_per_amp,
            row.snr_eff_db_mean,
            row.snr_eff_db_std,
            row.gmi_bits_per_2d,
            row.air_n_bits_per_2d,
            row.num_seeds
        ));
    }
    out
}

pub fn emit_sweep_csv(result: &SweepResult, path: &Path) -> Result<()> {
    std::fs::write(path, sweep_to_string(result)).map_err(|e| io_error(path, e))
}

pub fn parse_sweep_csv(text: &str) -> Result<SweepResult> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == SWEEP_HEADER => {}
        other => {
            return Err(CliError::Runtime(format!(
                "unexpected sweep CSV header: {other:?}"
            )))
        }
    }
    let mut rows = Vec::new();
    for (number, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(CliError::Runtime(format!(
                "sweep CSV row {}: expected 7 fields",
                number + 2
            )));
        }
        let bad = |what: &str| CliError::Runtime(format!("sweep CSV row {}: bad {what}", number + 2));
        rows.push(SweepRow {
            n: fields[0].parse().map_err(|_| bad("n"))?,
            rate_loss_bits_per_amp: fields[1].parse().map_err(|_| bad("rate loss"))?,
            snr_eff_db_mean: fields[2].parse().map_err(|_| bad("snr mean"))?,
            snr_eff_db_std: fields[3].parse().map_err(|_| bad("snr std"))?,
            gmi_bits_per_2d: fields[4].parse().map_err(|_| bad("gmi"))?,
            air_n_bits_per_2d: fields[5].parse().map_err(|_| bad("air"))?,
            num_seeds: fields[6].parse().map_err(|_| bad("num seeds"))?,
        });
    }
    Ok(SweepResult { rows })
}

pub fn read_sweep_csv(path: &Path) -> Result<SweepResult> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    parse_sweep_csv(&text)
}

pub fn power_to_string(rows: &[PowerRow]) -> String {
    let mut out = String::from(POWER_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.power_dbm, row.snr_eff_db_mean, row.snr_eff_db_std, row.num_seeds
        ));
    }
    out
}

pub fn emit_power_csv(rows: &[PowerRow], path: &Path) -> Result<()> {
    std::fs::write(path, power_to_string(rows)).map_err(|e| io_error(path, e))
}

/// One CSV row per amplitude; paired amplitudes share one symbol.
pub fn frame_to_string(frame: &ShapedFrame, levels: &[f64]) -> Result<String> {
    let signs = frame
        .signs()
        .ok_or_else(|| CliError::Runtime("frame has no signs; assemble it first".into()))?;
    let symbols = frame
        .symbols()
        .ok_or_else(|| CliError::Runtime("frame has no symbols; assemble it first".into()))?;
    let mut out = String::from(FRAME_HEADER);
    out.push('\n');
    for (index, &amp) in frame.amplitudes().iter().enumerate() {
        let symbol = symbols[index / 2];
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            index,
            levels[amp as usize],
            signs[index] as u8,
            symbol.re,
            symbol.im,
            index / frame.block_length()
        ));
    }
    Ok(out)
}

pub fn emit_frame_csv(frame: &ShapedFrame, levels: &[f64], path: &Path) -> Result<()> {
    std::fs::write(path, frame_to_string(frame, levels)?).map_err(|e| io_error(path, e))
}

/// Parsed-back view of a frame CSV.
pub struct FrameRecord {
    pub amplitude_levels: Vec<f64>,
    pub signs: Vec<bool>,
    pub symbols: Vec<Complex64>,
    pub block_ids: Vec<usize>,
}

impl FrameRecord {
    /// Block length inferred from the block_id column.
    pub fn block_length(&self) -> usize {
        let first = self.block_ids[0];
        self.block_ids.iter().filter(|&&b| b == first).count()
    }

    /// Amplitude indices against an alphabet's levels.
    pub fn amplitude_indices(&self, levels: &[f64]) -> Result<Vec<u8>> {
        self.amplitude_levels
            .iter()
            .map(|&value| {
                levels
                    .iter()
                    .position(|&l| (l - value).abs() < 1e-9)
                    .map(|i| i as u8)
                    .ok_or_else(|| {
                        CliError::Runtime(format!("amplitude level {value} not in the alphabet"))
                    })
            })
            .collect()
    }
}

pub fn read_frame_csv(path: &Path) -> Result<FrameRecord> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == FRAME_HEADER => {}
        other => {
            return Err(CliError::Runtime(format!(
                "unexpected frame CSV header: {other:?}"
            )))
        }
    }
    let mut record = FrameRecord {
        amplitude_levels: Vec::new(),
        signs: Vec::new(),
        symbols: Vec::new(),
        block_ids: Vec::new(),
    };
    for (number, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(CliError::Runtime(format!(
                "frame CSV row {}: expected 6 fields",
                number + 2
            )));
        }
        let bad = |what: &str| CliError::Runtime(format!("frame CSV row {}: bad {what}", number + 2));
        record
            .amplitude_levels
            .push(fields[1].parse().map_err(|_| bad("amplitude"))?);
        record
            .signs
            .push(fields[2].parse::<u8>().map_err(|_| bad("sign"))? != 0);
        if record.amplitude_levels.len() % 2 == 1 {
            record.symbols.push(Complex64::new(
                fields[3].parse().map_err(|_| bad("symbol_re"))?,
                fields[4].parse().map_err(|_| bad("symbol_im"))?,
            ));
        }
        record
            .block_ids
            .push(fields[5].parse().map_err(|_| bad("block_id"))?);
    }
    if record.amplitude_levels.is_empty() {
        return Err(CliError::Runtime("frame CSV has no rows".into()));
    }
    Ok(record)
}

pub fn write_waveform(wave: &WaveformGrid, path: &Path) -> Result<()> {
    let mut header = [0u8; WAVEFORM_HEADER_LEN];
    header[..4].copy_from_slice(WAVEFORM_MAGIC);
    header[8..16].copy_from_slice(&wave.grid.sample_rate_ghz().to_le_bytes());
    header[16..24].copy_from_slice(&(wave.samples.len() as u64).to_le_bytes());
    let mut file = std::fs::File::create(path).map_err(|e| io_error(path, e))?;
    file.write_all(&header).map_err(|e| io_error(path, e))?;
    let mut payload = Vec::with_capacity(wave.samples.len() * 16);
    for s in &wave.samples {
        payload.extend_from_slice(&s.re.to_le_bytes());
        payload.extend_from_slice(&s.im.to_le_bytes());
    }
    file.write_all(&payload).map_err(|e| io_error(path, e))
}

/// Reads an SFL1 dump; returns the samples and the sample rate in GHz.
pub fn read_waveform(path: &Path) -> Result<(Vec<Complex64>, f64)> {
    let mut file = std::fs::File::open(path).map_err(|e| io_error(path, e))?;
    let mut header = [0u8; WAVEFORM_HEADER_LEN];
    file.read_exact(&mut header).map_err(|e| io_error(path, e))?;
    if &header[..4] != WAVEFORM_MAGIC {
        return Err(CliError::Runtime(format!(
            "{}: not an SFL1 waveform dump",
            path.display()
        )));
    }
    let sample_rate = f64::from_le_bytes(header[8..16].try_into().unwrap());
    let count = u64::from_le_bytes(header[16..24].try_into().unwrap()) as usize;
    let mut payload = vec![0u8; count * 16];
    file.read_exact(&mut payload).map_err(|e| io_error(path, e))?;
    let samples = payload
        .chunks_exact(16)
        .map(|chunk| {
            Complex64::new(
                f64::from_le_bytes(chunk[..8].try_into().unwrap()),
                f64::from_le_bytes(chunk[8..].try_into().unwrap()),
            )
        })
        .collect();
    Ok((samples, sample_rate))
}
