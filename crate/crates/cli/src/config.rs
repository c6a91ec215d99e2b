//! Experiment configuration: plain-text `key = value` files with `#`
//! comments, no nesting. Every key has a default; unknown keys are rejected.

use std::fmt::Write as _;
use std::path::PathBuf;

use pcslab_core::fiber::{FiberLinkConfig, GridSpec, WdmPlan};
use pcslab_core::pas::{InterleaverKind, InterleaverSpec};
use pcslab_core::shaping::{mb_distribution, AmplitudeAlphabet, AmplitudeDistribution};

use crate::error::{CliError, Result};

/// How the transmitted amplitudes are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    /// Compound CCDM blocks of length n.
    Ccdm,
    /// i.i.d. draws from the target distribution (the blockless PAS
    /// emulation; with a uniform target this is plain uniform QAM).
    Iid,
}

/// Target amplitude distribution, by entropy or explicit probabilities.
#[derive(Debug, Clone, PartialEq)]
pub enum ShapingTarget {
    Entropy(f64),
    Probs(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    // Link.
    pub span_length_km: f64,
    pub num_spans: usize,
    pub attenuation_db_per_km: f64,
    pub dispersion_ps_nm_km: f64,
    pub wavelength_nm: f64,
    pub nonlinear_coeff_per_w_km: f64,
    pub step_size_km: f64,
    pub noise_figure_db: f64,
    pub launch_power_dbm: f64,
    pub linear_mode: bool,
    // Grid.
    pub symbol_rate_gbd: f64,
    pub roll_off: f64,
    pub wdm_channels: usize,
    pub wdm_spacing_ghz: f64,
    /// 0 selects the smallest power of two covering the WDM plan.
    pub samples_per_symbol: usize,
    pub symbols_per_run: usize,
    // Shaping.
    pub amplitude_levels: Vec<f64>,
    pub target: ShapingTarget,
    pub source: SourceKind,
    // Experiment.
    pub n_list: Vec<usize>,
    pub seeds: Vec<u64>,
    pub interleaver: InterleaverKind,
    /// 0 covers the whole run.
    pub interleaver_span: usize,
    /// Undo the interleaver before emission (the inner-FEC trick).
    pub structure_preserving: bool,
    pub power_list_dbm: Vec<f64>,
    pub gmi_samples: usize,
    pub gmi_seed: u64,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    /// Default experiment: a 16×100 km NLI-dominated link carrying five
    /// shaped 32 GBd channels, swept over four decades of DM block length.
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
            symbol_rate_gbd: 32.0,
            roll_off: 0.1,
            wdm_channels: 5,
            wdm_spacing_ghz: 50.0,
            samples_per_symbol: 0,
            symbols_per_run: 32768,
            amplitude_levels: vec![1.0, 3.0, 5.0, 7.0],
            target: ShapingTarget::Entropy(1.75),
            source: SourceKind::Ccdm,
            n_list: vec![10, 50, 200, 1000, 5000],
            seeds: vec![1, 2, 3],
            interleaver: InterleaverKind::Identity,
            interleaver_span: 0,
            structure_preserving: false,
            power_list_dbm: vec![-4.0, -2.0, 0.0, 2.0, 4.0],
            gmi_samples: 1_000_000,
            gmi_seed: 7,
            output: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut saw_entropy = false;
        let mut saw_probs = false;
        for (line_number, raw_line) in text.lines().enumerate() {
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected key = value", line_number + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            let context = |what: &str| {
                CliError::Config(format!("line {}: bad {what}: {value}", line_number + 1))
            };
            match key {
                "span_length_km" => cfg.span_length_km = parse_f64(value, &context)?,
                "num_spans" => cfg.num_spans = parse_usize(value, &context)?,
                "attenuation_db_per_km" => cfg.attenuation_db_per_km = parse_f64(value, &context)?,
                "dispersion_ps_nm_km" => cfg.dispersion_ps_nm_km = parse_f64(value, &context)?,
                "wavelength_nm" => cfg.wavelength_nm = parse_f64(value, &context)?,
                "nonlinear_coeff_per_w_km" => {
                    cfg.nonlinear_coeff_per_w_km = parse_f64(value, &context)?
                }
                "step_size_km" => cfg.step_size_km = parse_f64(value, &context)?,
                "noise_figure_db" => cfg.noise_figure_db = parse_f64(value, &context)?,
                "launch_power_dbm" => cfg.launch_power_dbm = parse_f64(value, &context)?,
                "linear_mode" => cfg.linear_mode = parse_bool(value, &context)?,
                "symbol_rate_gbd" => cfg.symbol_rate_gbd = parse_f64(value, &context)?,
                "roll_off" => cfg.roll_off = parse_f64(value, &context)?,
                "wdm_channels" => cfg.wdm_channels = parse_usize(value, &context)?,
                "wdm_spacing_ghz" => cfg.wdm_spacing_ghz = parse_f64(value, &context)?,
                "samples_per_symbol" => cfg.samples_per_symbol = parse_usize(value, &context)?,
                "symbols_per_run" => cfg.symbols_per_run = parse_usize(value, &context)?,
                "amplitude_levels" => cfg.amplitude_levels = parse_f64_list(value, &context)?,
                "target_entropy" => {
                    cfg.target = ShapingTarget::Entropy(parse_f64(value, &context)?);
                    saw_entropy = true;
                }
                "target_probs" => {
                    cfg.target = ShapingTarget::Probs(parse_f64_list(value, &context)?);
                    saw_probs = true;
                }
                "source" => {
                    cfg.source = match value {
                        "ccdm" => SourceKind::Ccdm,
                        "iid" => SourceKind::Iid,
                        _ => return Err(context("source (ccdm|iid)")),
                    }
                }
                "n_list" => cfg.n_list = parse_usize_list(value, &context)?,
                "seeds" => cfg.seeds = parse_u64_list(value, &context)?,
                "interleaver" => cfg.interleaver = parse_interleaver(value, &context)?,
                "interleaver_span" => cfg.interleaver_span = parse_usize(value, &context)?,
                "structure_preserving" => cfg.structure_preserving = parse_bool(value, &context)?,
                "power_list_dbm" => cfg.power_list_dbm = parse_f64_list(value, &context)?,
                "gmi_samples" => cfg.gmi_samples = parse_usize(value, &context)?,
                "gmi_seed" => cfg.gmi_seed = parse_u64(value, &context)?,
                "output" => cfg.output = Some(PathBuf::from(value)),
                _ => {
                    return Err(CliError::Config(format!(
                        "line {}: unknown key `{key}`",
                        line_number + 1
                    )))
                }
            }
        }
        if saw_entropy && saw_probs {
            return Err(CliError::Config(
                "target_entropy and target_probs are mutually exclusive".into(),
            ));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_text(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() {
            return Err(CliError::Config("n_list must not be empty".into()));
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Config("n_list must be sorted strictly ascending".into()));
        }
        if self.n_list[0] == 0 {
            return Err(CliError::Config("block lengths must be ≥ 1".into()));
        }
        if self.seeds.is_empty() {
            return Err(CliError::Config("seeds must not be empty".into()));
        }
        if self.symbols_per_run == 0 {
            return Err(CliError::Config("symbols_per_run must be positive".into()));
        }
        if self.gmi_samples < 10_000 {
            return Err(CliError::Config("gmi_samples must be at least 10000".into()));
        }
        if self.interleaver_span != 0 && self.symbols_per_run % self.interleaver_span != 0 {
            return Err(CliError::Config(format!(
                "interleaver_span {} does not divide symbols_per_run {}",
                self.interleaver_span, self.symbols_per_run
            )));
        }
        self.link_config().validate()?;
        self.grid_spec()?.validate()?;
        self.distribution()?;
        Ok(())
    }

    pub fn link_config(&self) -> FiberLinkConfig {
        FiberLinkConfig {
            span_length_km: self.span_length_km,
            num_spans: self.num_spans,
            attenuation_db_per_km: self.attenuation_db_per_km,
            dispersion_ps_nm_km: self.dispersion_ps_nm_km,
            wavelength_nm: self.wavelength_nm,
            nonlinear_coeff_per_w_km: self.nonlinear_coeff_per_w_km,
            step_size_km: self.step_size_km,
            noise_figure_db: self.noise_figure_db,
            launch_power_dbm: self.launch_power_dbm,
            linear_mode: self.linear_mode,
            amplifiers_enabled: true,
        }
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        let wdm = WdmPlan {
            num_channels: self.wdm_channels,
            spacing_ghz: self.wdm_spacing_ghz,
        };
        let sps = if self.samples_per_symbol == 0 {
            GridSpec::auto_samples_per_symbol(self.symbol_rate_gbd, self.roll_off, &wdm)
        } else {
            self.samples_per_symbol
        };
        Ok(GridSpec {
            symbol_rate_gbd: self.symbol_rate_gbd,
            samples_per_symbol: sps,
            roll_off: self.roll_off,
            wdm,
        })
    }

    pub fn alphabet(&self) -> Result<AmplitudeAlphabet> {
        Ok(AmplitudeAlphabet::new(self.amplitude_levels.clone())?)
    }

    pub fn distribution(&self) -> Result<AmplitudeDistribution> {
        let alphabet = self.alphabet()?;
        Ok(match &self.target {
            ShapingTarget::Entropy(h) => mb_distribution(&alphabet, *h)?,
            ShapingTarget::Probs(p) => AmplitudeDistribution::new(alphabet, p.clone())?,
        })
    }

    pub fn interleaver_spec(&self) -> Result<Option<InterleaverSpec>> {
        if self.interleaver == InterleaverKind::Identity && !self.structure_preserving {
            return Ok(None);
        }
        let span = if self.interleaver_span == 0 {
            self.symbols_per_run
        } else {
            self.interleaver_span
        };
        Ok(Some(InterleaverSpec::new(self.interleaver.clone(), span)?))
    }

    /// Canonical textual form; parsing it back yields an equal config.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let list =
            |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        let _ = writeln!(out, "span_length_km = {}", self.span_length_km);
        let _ = writeln!(out, "num_spans = {}", self.num_spans);
        let _ = writeln!(out, "attenuation_db_per_km = {}", self.attenuation_db_per_km);
        let _ = writeln!(out, "dispersion_ps_nm_km = {}", self.dispersion_ps_nm_km);
        let _ = writeln!(out, "wavelength_nm = {}", self.wavelength_nm);
        let _ = writeln!(out, "nonlinear_coeff_per_w_km = {}", self.nonlinear_coeff_per_w_km);
        let _ = writeln!(out, "step_size_km = {}", self.step_size_km);
        let _ = writeln!(out, "noise_figure_db = {}", self.noise_figure_db);
        let _ = writeln!(out, "launch_power_dbm = {}", self.launch_power_dbm);
        let _ = writeln!(out, "linear_mode = {}", self.linear_mode);
        let _ = writeln!(out, "symbol_rate_gbd = {}", self.symbol_rate_gbd);
        let _ = writeln!(out, "roll_off = {}", self.roll_off);
        let _ = writeln!(out, "wdm_channels = {}", self.wdm_channels);
        let _ = writeln!(out, "wdm_spacing_ghz = {}", self.wdm_spacing_ghz);
        let _ = writeln!(out, "samples_per_symbol = {}", self.samples_per_symbol);
        let _ = writeln!(out, "symbols_per_run = {}", self.symbols_per_run);
        let _ = writeln!(out, "amplitude_levels = {}", list(&self.amplitude_levels));
        match &self.target {
            ShapingTarget::Entropy(h) => {
                let _ = writeln!(out, "target_entropy = {h}");
            }
            ShapingTarget::Probs(p) => {
                let _ = writeln!(out, "target_probs = {}", list(p));
            }
        }
        let _ = writeln!(
            out,
            "source = {}",
            match self.source {
                SourceKind::Ccdm => "ccdm",
                SourceKind::Iid => "iid",
            }
        );
        let _ = writeln!(
            out,
            "n_list = {}",
            self.n_list.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",")
        );
        let _ = writeln!(
            out,
            "seeds = {}",
            self.seeds.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
        );
        let _ = writeln!(
            out,
            "interleaver = {}",
            match &self.interleaver {
                InterleaverKind::Identity => "identity".to_string(),
                InterleaverKind::Block { rows, cols } => format!("block:{rows}:{cols}"),
                InterleaverKind::SeededPermutation { seed } => format!("permutation:{seed}"),
            }
        );
        let _ = writeln!(out, "interleaver_span = {}", self.interleaver_span);
        let _ = writeln!(out, "structure_preserving = {}", self.structure_preserving);
        let _ = writeln!(out, "power_list_dbm = {}", list(&self.power_list_dbm));
        let _ = writeln!(out, "gmi_samples = {}", self.gmi_samples);
        let _ = writeln!(out, "gmi_seed = {}", self.gmi_seed);
        if let Some(path) = &self.output {
            let _ = writeln!(out, "output = {}", path.display());
        }
        out
    }
}

fn parse_f64(value: &str, err: &dyn Fn(&str) -> CliError) -> Result<f64> {
    value.parse().map_err(|_| err("number"))
}

fn parse_usize(value: &str, err: &dyn Fn(&str) -> CliError) -> Result<usize> {
    value.parse().map_err(|_| err("integer"))
}

fn parse_u64(value: &str, err: &dyn Fn(&str) -> CliError) -> Result<u64> {
    value.parse().map_err(|_| err("integer"))
}

fn parse_bool(value: &str, err: &dyn Fn(&str) -> CliError) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(err("boolean (true|false)")),
    }
}

fn parse_f64_list(value: &str, err: &dyn Fn(&str) -> CliError) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|v| v.trim().parse().map_err(|_| err("number list")))
        .collect()
}

fn parse_usize_list(value: &str, err: &dyn Fn(&str) -> CliError) -> Result<Vec<usize>> {
    value
        .split(',')
        .map(|v| v.trim().parse().map_err(|_| err("integer list")))
        .collect()
}

fn parse_u64_list(value: &str, err: &dyn Fn(&str) -> CliError) -> Result<Vec<u64>> {
    value
        .split(',')
        .map(|v| v.trim().parse().map_err(|_| err("integer list")))
        .collect()
}

fn parse_interleaver(value: &str, err: &dyn Fn(&str) -> CliError) -> Result<InterleaverKind> {
    if value == "identity" {
        return Ok(InterleaverKind::Identity);
    }
    let parts: Vec<&str> = value.split(':').collect();
    match parts.as_slice() {
        ["block", rows, cols] => Ok(InterleaverKind::Block {
            rows: rows.parse().map_err(|_| err("block rows"))?,
            cols: cols.parse().map_err(|_| err("block cols"))?,
        }),
        ["permutation", seed] => Ok(InterleaverKind::SeededPermutation {
            seed: seed.parse().map_err(|_| err("permutation seed"))?,
        }),
        _ => Err(err("interleaver (identity|block:R:C|permutation:SEED)")),
    }
}
