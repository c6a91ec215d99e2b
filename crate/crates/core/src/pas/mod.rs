//! Probabilistic amplitude shaping: compound DM sequences, sign-bit
//! assembly onto a Gray-labelled square QAM constellation, interleaving, and
//! the temporal-structure statistics that drive NLI mitigation.

mod interleave;
mod stats;

pub use interleave::{structure_preserving_chain, InterleaverKind, InterleaverSpec};
pub use stats::{
    adjacent_pair_rate, run_length_stats, windowed_composition_deviation, CompositionDeviation,
    RunLengthStats,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::SeededBitSource;
use crate::shaping::{AmplitudeAlphabet, CcdmCodec};

/// Square QAM constellation assembled from a per-quadrature amplitude
/// alphabet with one sign bit per quadrature.
///
/// Bit label per 2D symbol: `[sign_I, gray(amp_I)…, sign_Q, gray(amp_Q)…]`
/// with sign bit 0 ↦ +, 1 ↦ −. Points are scaled so that the uniform
/// reference distribution has unit mean power.
#[derive(Debug, Clone)]
pub struct QamConstellation {
    levels: Vec<f64>,
    scale: f64,
}

impl QamConstellation {
    pub fn new(alphabet: &AmplitudeAlphabet) -> Result<Self> {
        let levels = alphabet.levels().to_vec();
        if !levels.len().is_power_of_two() {
            return Err(Error::Domain(format!(
                "per-quadrature alphabet size {} is not a power of two",
                levels.len()
            )));
        }
        let mean_energy_2d = 2.0 * levels.iter().map(|l| l * l).sum::<f64>() / levels.len() as f64;
        Ok(Self {
            scale: 1.0 / mean_energy_2d.sqrt(),
            levels,
        })
    }

    /// Constellation order M = (2·L)².
    pub fn order(&self) -> usize {
        4 * self.levels.len() * self.levels.len()
    }

    pub fn bits_per_symbol(&self) -> usize {
        2 * (1 + self.amplitude_bits())
    }

    /// Bits per quadrature amplitude index.
    pub fn amplitude_bits(&self) -> usize {
        self.levels.len().trailing_zeros() as usize
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Normalization applied to every mapped point.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Maps one (amplitude index, sign) pair per quadrature to a point.
    pub fn map_pair(&self, amp_i: u8, sign_i: bool, amp_q: u8, sign_q: bool) -> Complex64 {
        let signum = |s: bool| if s { -1.0 } else { 1.0 };
        Complex64::new(
            signum(sign_i) * self.levels[amp_i as usize],
            signum(sign_q) * self.levels[amp_q as usize],
        ) * self.scale
    }

    /// Inverts `map_pair` by nearest level; exact on noiseless points.
    pub fn demap(&self, symbol: Complex64) -> (u8, bool, u8, bool) {
        let nearest = |value: f64| -> (u8, bool) {
            let magnitude = value.abs() / self.scale;
            let mut best = 0usize;
            let mut best_dist = f64::INFINITY;
            for (i, &l) in self.levels.iter().enumerate() {
                let d = (l - magnitude).abs();
                if d < best_dist {
                    best = i;
                    best_dist = d;
                }
            }
            (best as u8, value < 0.0)
        };
        let (ai, si) = nearest(symbol.re);
        let (aq, sq) = nearest(symbol.im);
        (ai, si, aq, sq)
    }

    /// Binary-reflected Gray label of an amplitude index, MSB first.
    pub fn gray_amplitude_bits(&self, index: u8) -> Vec<bool> {
        let gray = index ^ (index >> 1);
        (0..self.amplitude_bits())
            .rev()
            .map(|b| gray >> b & 1 == 1)
            .collect()
    }

    /// All M points with their bit labels and amplitude indices, in a fixed
    /// deterministic order.
    pub fn points(&self) -> Vec<QamPoint> {
        let mut out = Vec::with_capacity(self.order());
        for amp_i in 0..self.levels.len() as u8 {
            for sign_i in [false, true] {
                for amp_q in 0..self.levels.len() as u8 {
                    for sign_q in [false, true] {
                        let mut bits = vec![sign_i];
                        bits.extend(self.gray_amplitude_bits(amp_i));
                        bits.push(sign_q);
                        bits.extend(self.gray_amplitude_bits(amp_q));
                        out.push(QamPoint {
                            point: self.map_pair(amp_i, sign_i, amp_q, sign_q),
                            bits,
                            amp_i,
                            amp_q,
                        });
                    }
                }
            }
        }
        out
    }
}

/// One constellation point with its bit label.
#[derive(Debug, Clone)]
pub struct QamPoint {
    pub point: Complex64,
    pub bits: Vec<bool>,
    pub amp_i: u8,
    pub amp_q: u8,
}

/// Compound amplitude/symbol sequence with recorded block boundaries.
#[derive(Debug, Clone)]
pub struct ShapedFrame {
    amplitudes: Vec<u8>,
    block_length: usize,
    num_blocks: usize,
    boundaries: Vec<usize>,
    signs: Option<Vec<bool>>,
    symbols: Option<Vec<Complex64>>,
}

impl ShapedFrame {
    /// Wraps a raw amplitude stream as one frame-sized block, for blockless
    /// (i.i.d.) sources.
    pub fn from_amplitudes(amplitudes: Vec<u8>) -> Self {
        let block_length = amplitudes.len();
        let boundaries = if amplitudes.is_empty() { vec![] } else { vec![0] };
        Self {
            num_blocks: boundaries.len(),
            amplitudes,
            block_length,
            boundaries,
            signs: None,
            symbols: None,
        }
    }

    pub fn amplitudes(&self) -> &[u8] {
        &self.amplitudes
    }

    pub fn block_length(&self) -> usize {
        self.block_length
    }

    pub fn num_blocks(&self) -> usize {
        self.num_blocks
    }

    /// Start index of every DM block.
    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    pub fn signs(&self) -> Option<&[bool]> {
        self.signs.as_deref()
    }

    /// Mapped symbols; present once the frame has been PAS-assembled.
    pub fn symbols(&self) -> Option<&[Complex64]> {
        self.symbols.as_deref()
    }
}

/// Concatenates `num_blocks` matched blocks, each fed k fresh bits from the
/// data source. Boundaries are recorded; signs and symbols stay empty.
pub fn generate_compound_sequence(
    codec: &CcdmCodec,
    num_blocks: usize,
    data_source: &mut SeededBitSource,
) -> Result<ShapedFrame> {
    let n = codec.n();
    let mut amplitudes = Vec::with_capacity(n * num_blocks);
    let mut boundaries = Vec::with_capacity(num_blocks);
    for _ in 0..num_blocks {
        boundaries.push(amplitudes.len());
        let bits = data_source.take_bits(codec.k());
        amplitudes.extend(codec.match_bits(&bits)?);
    }
    Ok(ShapedFrame {
        amplitudes,
        block_length: n,
        num_blocks,
        boundaries,
        signs: None,
        symbols: None,
    })
}

/// Pairs consecutive amplitudes into (I, Q) magnitudes, applies one sign bit
/// per amplitude (0 ↦ +, 1 ↦ −), and maps through the constellation.
pub fn pas_assemble(
    frame: ShapedFrame,
    signs: Vec<bool>,
    constellation: &QamConstellation,
) -> Result<ShapedFrame> {
    if signs.len() != frame.amplitudes.len() {
        return Err(Error::Contract(format!(
            "{} signs for {} amplitudes",
            signs.len(),
            frame.amplitudes.len()
        )));
    }
    if frame.amplitudes.len() % 2 != 0 {
        return Err(Error::Contract(format!(
            "odd amplitude count {} cannot be paired into symbols",
            frame.amplitudes.len()
        )));
    }
    if let Some(&max) = frame.amplitudes.iter().max() {
        if max as usize >= constellation.levels().len() {
            return Err(Error::Contract(format!(
                "amplitude index {max} outside constellation alphabet"
            )));
        }
    }
    let symbols = frame
        .amplitudes
        .chunks_exact(2)
        .zip(signs.chunks_exact(2))
        .map(|(a, s)| constellation.map_pair(a[0], s[0], a[1], s[1]))
        .collect();
    Ok(ShapedFrame {
        signs: Some(signs),
        symbols: Some(symbols),
        ..frame
    })
}
