//! Information-theoretic and statistical figures of merit: the fourth-moment
//! ratio behind the shaping NLI penalty, GMI under bit-metric decoding, and
//! the finite-length achievable rate AIR_n.

pub(crate) mod gmi;

pub use gmi::gmi_monte_carlo;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Φ = E[|X|⁴] / E[|X|²]² of a discrete symbol distribution.
pub fn moment_ratio_distribution(points: &[(Complex64, f64)]) -> Result<f64> {
    let second: f64 = points.iter().map(|(x, p)| p * x.norm_sqr()).sum();
    if second <= 0.0 {
        return Err(Error::Contract("zero-power distribution".into()));
    }
    let fourth: f64 = points.iter().map(|(x, p)| p * x.norm_sqr() * x.norm_sqr()).sum();
    Ok(fourth / (second * second))
}

/// Φ from sample moments of an empirical symbol stream.
pub fn moment_ratio_empirical(symbols: &[Complex64]) -> Result<f64> {
    if symbols.is_empty() {
        return Err(Error::Contract("empty symbol stream".into()));
    }
    let n = symbols.len() as f64;
    let second: f64 = symbols.iter().map(|x| x.norm_sqr()).sum::<f64>() / n;
    if second <= 0.0 {
        return Err(Error::Contract("zero-power symbol stream".into()));
    }
    let fourth: f64 = symbols.iter().map(|x| x.norm_sqr() * x.norm_sqr()).sum::<f64>() / n;
    Ok(fourth / (second * second))
}

/// Finite-length achievable rate record for one block length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AirResult {
    pub n: usize,
    /// Bits per amplitude.
    pub rate_loss: f64,
    pub snr_eff_db: f64,
    /// Bits per 2D symbol.
    pub gmi: f64,
    /// gmi − 2·rate_loss, bits per 2D symbol (two shaped amplitudes per
    /// 2D symbol).
    pub air_n: f64,
}

/// AIR_n = GMI − 2·R_loss.
pub fn air_n(n: usize, rate_loss: f64, snr_eff_db: f64, gmi: f64) -> Result<AirResult> {
    if !gmi.is_finite() || gmi < 0.0 {
        return Err(Error::Contract(format!("GMI {gmi} must be ≥ 0")));
    }
    if !rate_loss.is_finite() || rate_loss < 0.0 {
        return Err(Error::Contract(format!("rate loss {rate_loss} must be ≥ 0")));
    }
    Ok(AirResult {
        n,
        rate_loss,
        snr_eff_db,
        gmi,
        air_n: gmi - 2.0 * rate_loss,
    })
}
