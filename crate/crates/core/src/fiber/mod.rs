//! Scalar nonlinear Schrödinger propagation over a multi-span amplified WDM
//! link, with the transmit pulse shaping and receiver DSP needed to measure
//! effective SNR.
//!
//! Waveforms are complex baseband fields in √W units (|u|² is instantaneous
//! power in watts); lengths are km, rates GHz/GBd.

mod fft;
mod rrc;
mod rxdsp;
mod ssfm;

pub use rrc::rrc_modulate;
pub use rxdsp::{estimate_snr, rx_dsp, SnrEstimate};
pub use ssfm::{ssfm_propagate, AseNoise};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const PLANCK_J_S: f64 = 6.62607015e-34;
pub const SPEED_OF_LIGHT_M_S: f64 = 299792458.0;

/// Multi-span fiber link with lumped amplification.
#[derive(Debug, Clone)]
pub struct FiberLinkConfig {
    pub span_length_km: f64,
    pub num_spans: usize,
    pub attenuation_db_per_km: f64,
    pub dispersion_ps_nm_km: f64,
    pub wavelength_nm: f64,
    pub nonlinear_coeff_per_w_km: f64,
    pub step_size_km: f64,
    pub noise_figure_db: f64,
    pub launch_power_dbm: f64,
    /// Skip the nonlinear operator (γ_NL treated as 0).
    pub linear_mode: bool,
    /// Lumped gain + ASE after each span; off for back-to-back oracles.
    pub amplifiers_enabled: bool,
}

impl Default for FiberLinkConfig {
    /// Desk-scale long-haul defaults; see the experiment documentation for
    /// why the link is dimensioned this way.
    fn default() -> Self {
        Self {
            span_length_km: 100.0,
            num_spans: 16,
            attenuation_db_per_km: 0.2,
            dispersion_ps_nm_km: 17.0,
            wavelength_nm: 1550.0,
            nonlinear_coeff_per_w_km: 1.3,
            step_size_km: 0.25,
            noise_figure_db: 6.0,
            launch_power_dbm: 2.0,
            linear_mode: false,
            amplifiers_enabled: true,
        }
    }
}

impl FiberLinkConfig {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.span_length_km,
            self.attenuation_db_per_km,
            self.dispersion_ps_nm_km,
            self.wavelength_nm,
            self.nonlinear_coeff_per_w_km,
            self.step_size_km,
            self.noise_figure_db,
            self.launch_power_dbm,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("non-finite link parameter".into()));
        }
        if self.num_spans > 0 {
            if self.span_length_km <= 0.0 {
                return Err(Error::Config("span length must be positive".into()));
            }
            if self.step_size_km <= 0.0 {
                return Err(Error::Config("step size must be positive".into()));
            }
            if self.step_size_km > self.span_length_km {
                return Err(Error::Config(format!(
                    "step size {} km exceeds span length {} km",
                    self.step_size_km, self.span_length_km
                )));
            }
        }
        if self.attenuation_db_per_km < 0.0 || self.noise_figure_db < 0.0 {
            return Err(Error::Config("attenuation and noise figure must be ≥ 0".into()));
        }
        if self.nonlinear_coeff_per_w_km < 0.0 {
            return Err(Error::Config("nonlinear coefficient must be ≥ 0".into()));
        }
        if self.wavelength_nm <= 0.0 {
            return Err(Error::Config("carrier wavelength must be positive".into()));
        }
        Ok(())
    }

    /// Group-velocity dispersion β₂ = −D·λ²/(2πc), in s²/km.
    pub fn beta2_s2_per_km(&self) -> f64 {
        let d_s_per_m2_km = self.dispersion_ps_nm_km * 1e-3; // ps/nm = 1e-3 s/m
        let lambda_m = self.wavelength_nm * 1e-9;
        -d_s_per_m2_km * lambda_m * lambda_m / (2.0 * std::f64::consts::PI * SPEED_OF_LIGHT_M_S)
    }

    /// Carrier frequency ν_c = c/λ in Hz.
    pub fn carrier_frequency_hz(&self) -> f64 {
        SPEED_OF_LIGHT_M_S / (self.wavelength_nm * 1e-9)
    }

    pub fn span_loss_db(&self) -> f64 {
        self.attenuation_db_per_km * self.span_length_km
    }

    /// Amplifier power gain exactly compensating one span.
    pub fn span_gain_linear(&self) -> f64 {
        10f64.powf(self.span_loss_db() / 10.0)
    }

    pub fn total_length_km(&self) -> f64 {
        self.span_length_km * self.num_spans as f64
    }

    pub fn launch_power_w(&self) -> f64 {
        10f64.powf((self.launch_power_dbm - 30.0) / 10.0)
    }

    /// Per-sample ASE variance (both quadratures together) added by one
    /// amplifier over the full simulation bandwidth:
    /// (G−1)·h·ν_c·(NF_lin/2)·f_s, single polarization.
    pub fn ase_variance_per_sample_w(&self, sample_rate_ghz: f64) -> f64 {
        let gain = self.span_gain_linear();
        let nf_lin = 10f64.powf(self.noise_figure_db / 10.0);
        (gain - 1.0) * PLANCK_J_S * self.carrier_frequency_hz() * (nf_lin / 2.0)
            * (sample_rate_ghz * 1e9)
    }
}

/// WDM channel plan on a uniform grid centred on 0.
#[derive(Debug, Clone, PartialEq)]
pub struct WdmPlan {
    pub num_channels: usize,
    pub spacing_ghz: f64,
}

impl WdmPlan {
    pub fn single() -> Self {
        Self {
            num_channels: 1,
            spacing_ghz: 0.0,
        }
    }

    pub fn center_index(&self) -> usize {
        self.num_channels / 2
    }

    /// Frequency offset of channel `index` from band centre.
    pub fn offset_ghz(&self, index: usize) -> f64 {
        (index as f64 - (self.num_channels as f64 - 1.0) / 2.0) * self.spacing_ghz
    }
}

/// Sampling grid shared by modulator, solver, and receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub symbol_rate_gbd: f64,
    pub samples_per_symbol: usize,
    pub roll_off: f64,
    pub wdm: WdmPlan,
}

impl GridSpec {
    pub fn sample_rate_ghz(&self) -> f64 {
        self.symbol_rate_gbd * self.samples_per_symbol as f64
    }

    /// Occupied plan bandwidth: channel span plus one symbol rate.
    pub fn plan_bandwidth_ghz(&self) -> f64 {
        (self.wdm.num_channels as f64 - 1.0) * self.wdm.spacing_ghz + self.symbol_rate_gbd
    }

    /// Smallest power-of-two oversampling covering the WDM plan with
    /// roll-off margin.
    pub fn auto_samples_per_symbol(symbol_rate_gbd: f64, roll_off: f64, wdm: &WdmPlan) -> usize {
        let needed =
            ((wdm.num_channels as f64 - 1.0) * wdm.spacing_ghz + symbol_rate_gbd) * (1.0 + roll_off);
        let mut sps = 1usize;
        while (sps as f64) * symbol_rate_gbd < needed {
            sps *= 2;
        }
        sps
    }

    pub fn validate(&self) -> Result<()> {
        if self.symbol_rate_gbd <= 0.0 || !self.symbol_rate_gbd.is_finite() {
            return Err(Error::Config("symbol rate must be positive".into()));
        }
        if self.samples_per_symbol == 0 {
            return Err(Error::Config("samples per symbol must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.roll_off) {
            return Err(Error::Config("roll-off must lie in [0, 1]".into()));
        }
        if self.wdm.num_channels == 0 {
            return Err(Error::Config("at least one WDM channel required".into()));
        }
        if self.wdm.num_channels > 1 && self.wdm.spacing_ghz <= 0.0 {
            return Err(Error::Config("WDM spacing must be positive".into()));
        }
        if self.sample_rate_ghz() < self.plan_bandwidth_ghz() * (1.0 + self.roll_off) {
            return Err(Error::Config(format!(
                "sample rate {} GHz below plan bandwidth {} GHz × (1 + roll-off)",
                self.sample_rate_ghz(),
                self.plan_bandwidth_ghz()
            )));
        }
        Ok(())
    }
}

/// Complex baseband samples on a grid.
#[derive(Debug, Clone)]
pub struct WaveformGrid {
    pub samples: Vec<Complex64>,
    pub grid: GridSpec,
}

impl WaveformGrid {
    pub fn num_samples(&self) -> usize {
        self.samples.len()
    }

    pub fn num_symbols(&self) -> usize {
        self.samples.len() / self.grid.samples_per_symbol
    }

    /// Time-averaged power (1/N)Σ|u|² in watts.
    pub fn mean_power_w(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }

    /// Total energy Σ|u|² (unnormalized).
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum()
    }
}

/// Frequencies of the DFT bins in fftfreq layout, in GHz.
pub(crate) fn bin_frequencies_ghz(n: usize, sample_rate_ghz: f64) -> Vec<f64> {
    let df = sample_rate_ghz / n as f64;
    (0..n)
        .map(|k| {
            if k <= (n - 1) / 2 {
                k as f64 * df
            } else {
                (k as f64 - n as f64) * df
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta2_of_standard_fiber() {
        let link = FiberLinkConfig::default();
        // D = 17 ps/nm/km at 1550 nm ⇒ β₂ ≈ −21.7 ps²/km.
        let beta2_ps2_km = link.beta2_s2_per_km() * 1e24;
        assert!((beta2_ps2_km + 21.7).abs() < 0.1, "β₂ = {beta2_ps2_km}");
    }

    #[test]
    fn auto_oversampling_covers_the_plan() {
        let wdm = WdmPlan {
            num_channels: 5,
            spacing_ghz: 50.0,
        };
        assert_eq!(GridSpec::auto_samples_per_symbol(32.0, 0.1, &wdm), 8);
        assert_eq!(GridSpec::auto_samples_per_symbol(32.0, 0.1, &WdmPlan::single()), 2);
    }

    #[test]
    fn grid_rejects_undersampling() {
        let grid = GridSpec {
            symbol_rate_gbd: 32.0,
            samples_per_symbol: 4,
            roll_off: 0.1,
            wdm: WdmPlan {
                num_channels: 5,
                spacing_ghz: 50.0,
            },
        };
        assert!(grid.validate().is_err());
    }

    #[test]
    fn channel_offsets_are_symmetric() {
        let wdm = WdmPlan {
            num_channels: 5,
            spacing_ghz: 50.0,
        };
        assert_eq!(wdm.offset_ghz(wdm.center_index()), 0.0);
        assert_eq!(wdm.offset_ghz(0), -100.0);
        assert_eq!(wdm.offset_ghz(4), 100.0);
    }

    #[test]
    fn step_size_validation() {
        let link = FiberLinkConfig {
            step_size_km: 200.0,
            ..FiberLinkConfig::default()
        };
        assert!(matches!(link.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn bin_frequency_layout() {
        let f = bin_frequencies_ghz(8, 8.0);
        assert_eq!(f, vec![0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0]);
    }
}
