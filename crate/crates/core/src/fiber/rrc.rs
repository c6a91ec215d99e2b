//! Root-raised-cosine pulse shaping and WDM multiplexing.
//!
//! Pulses are built in the frequency domain on the circular grid, so the
//! RRC·RRC cascade is exactly Nyquist at the symbol-spaced sampling phase and
//! channel shifts land on integer DFT bins.

use num_complex::Complex64;

use super::fft::FftPair;
use super::{bin_frequencies_ghz, GridSpec, WaveformGrid};
use crate::error::{Error, Result};

/// Amplitude response of the root-raised-cosine filter sampled on the DFT
/// bins; peak 1, |H|² integrates to the symbol rate.
pub(crate) fn rrc_spectrum(
    n: usize,
    sample_rate_ghz: f64,
    symbol_rate_gbd: f64,
    roll_off: f64,
) -> Vec<f64> {
    let inner = (1.0 - roll_off) / 2.0;
    let outer = (1.0 + roll_off) / 2.0;
    bin_frequencies_ghz(n, sample_rate_ghz)
        .iter()
        .map(|f| {
            let x = (f / symbol_rate_gbd).abs();
            if x <= inner {
                1.0
            } else if x < outer && roll_off > 0.0 {
                (std::f64::consts::PI / (2.0 * roll_off) * (x - inner)).cos()
            } else {
                0.0
            }
        })
        .collect()
}

/// Shapes one symbol stream per WDM channel, shifts each to its grid offset,
/// sets per-channel time-averaged power to the launch power, and sums.
pub fn rrc_modulate(
    channel_symbols: &[Vec<Complex64>],
    grid: &GridSpec,
    launch_power_dbm: f64,
) -> Result<WaveformGrid> {
    grid.validate()?;
    if channel_symbols.len() != grid.wdm.num_channels {
        return Err(Error::Config(format!(
            "{} symbol streams for {} channels",
            channel_symbols.len(),
            grid.wdm.num_channels
        )));
    }
    let num_symbols = channel_symbols[0].len();
    if num_symbols == 0 {
        return Err(Error::Config("empty symbol stream".into()));
    }
    if channel_symbols.iter().any(|c| c.len() != num_symbols) {
        return Err(Error::Config("channels must have equal symbol counts".into()));
    }

    let sps = grid.samples_per_symbol;
    let n = num_symbols * sps;
    let fs = grid.sample_rate_ghz();
    let rs = grid.symbol_rate_gbd;
    let half_band = rs * (1.0 + grid.roll_off) / 2.0;
    let launch_w = 10f64.powf((launch_power_dbm - 30.0) / 10.0);

    let h = rrc_spectrum(n, fs, rs, grid.roll_off);
    let mut spectrum = vec![Complex64::default(); n];
    let mut symbol_fft = FftPair::new(num_symbols);
    let mut grid_fft = FftPair::new(n);

    for (index, symbols) in channel_symbols.iter().enumerate() {
        let offset = grid.wdm.offset_ghz(index);
        if offset.abs() + half_band > fs / 2.0 + 1e-9 {
            return Err(Error::Config(format!(
                "channel {index} at {offset} GHz overflows the ±{} GHz grid",
                fs / 2.0
            )));
        }
        let bin_float = offset * n as f64 / fs;
        if (bin_float - bin_float.round()).abs() > 1e-6 {
            return Err(Error::Config(format!(
                "channel {index} offset {offset} GHz is not on the DFT grid"
            )));
        }
        let bin = bin_float.round() as i64;

        let mut a = symbols.clone();
        symbol_fft.forward(&mut a);
        // Zero-stuffed upsampling tiles the symbol spectrum across the grid.
        let power: f64 = (0..n)
            .map(|k| a[k % num_symbols].norm_sqr() * h[k] * h[k])
            .sum::<f64>()
            / (n as f64 * n as f64);
        if power <= 0.0 {
            return Err(Error::Config(format!("channel {index} has zero power")));
        }
        let gain = (launch_w / power).sqrt();
        for k in 0..n {
            let target = (k as i64 + bin).rem_euclid(n as i64) as usize;
            spectrum[target] += a[k % num_symbols] * h[k] * gain;
        }
    }

    grid_fft.inverse(&mut spectrum);
    Ok(WaveformGrid {
        samples: spectrum,
        grid: grid.clone(),
    })
}
