//! Constant-composition distribution matcher.
//!
//! The matcher is a fixed-to-fixed invertible map between k-bit words and
//! length-n amplitude sequences of one fixed composition, realized as exact
//! lexicographic (un)ranking of multiset permutations in arbitrary-precision
//! integers. Exactness buys k = floor(log2 n!/Πcᵢ!) with zero implementation
//! rate loss; the cost is sequential big-integer arithmetic, which is fine at
//! desk scale (n ≤ 10⁴).

use num_bigint::BigUint;

use super::{AmplitudeDistribution, Composition};
use crate::error::{Error, Result};

/// Invertible fixed-to-fixed matcher for one composition.
#[derive(Debug, Clone)]
pub struct CcdmCodec {
    composition: Composition,
    num_sequences: BigUint,
    k: usize,
}

impl CcdmCodec {
    /// Builds the codec: counts the distinct constant-composition sequences
    /// exactly and derives the input length k = floor(log2 count).
    pub fn new(composition: Composition) -> Self {
        let num_sequences = multiset_permutations(composition.counts());
        // bits() is 1 + floor(log2 x) for x ≥ 1, so k = bits − 1; this also
        // gives the exact log for powers of two.
        let k = (num_sequences.bits() - 1) as usize;
        Self {
            composition,
            num_sequences,
            k,
        }
    }

    pub fn composition(&self) -> &Composition {
        &self.composition
    }

    /// Exact number of distinct sequences, n!/Π cᵢ!.
    pub fn num_sequences(&self) -> &BigUint {
        &self.num_sequences
    }

    /// Input length in bits.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Block length in amplitudes.
    pub fn n(&self) -> usize {
        self.composition.n()
    }

    /// Matching rate k/n in bits per amplitude.
    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n() as f64
    }

    /// Finite-length rate loss H(target) − k/n against the target
    /// distribution the composition was quantized from.
    pub fn rate_loss(&self, dist: &AmplitudeDistribution) -> Result<f64> {
        if dist.alphabet().len() != self.composition.num_levels() {
            return Err(Error::Contract(format!(
                "distribution over {} levels, codec over {}",
                dist.alphabet().len(),
                self.composition.num_levels()
            )));
        }
        Ok(dist.entropy() - self.rate())
    }

    /// Maps a k-bit word to the amplitude sequence of that lexicographic
    /// rank. Injective over all 2^k inputs.
    pub fn match_bits(&self, bits: &[bool]) -> Result<Vec<u8>> {
        if bits.len() != self.k {
            return Err(Error::Contract(format!(
                "expected {} input bits, got {}",
                self.k,
                bits.len()
            )));
        }
        // Big-endian: bits[0] is the most significant.
        let mut rank = BigUint::from(0u8);
        for &bit in bits {
            rank <<= 1;
            if bit {
                rank += 1u32;
            }
        }

        let mut counts: Vec<usize> = self.composition.counts().to_vec();
        let mut remaining = self.n();
        let mut current = self.num_sequences.clone();
        let mut out = Vec::with_capacity(remaining);
        while remaining > 0 {
            for symbol in 0..counts.len() {
                if counts[symbol] == 0 {
                    continue;
                }
                // Number of sequences of the remaining multiset that start
                // with `symbol`; the product is always divisible.
                let with_symbol = &current * counts[symbol] / remaining;
                if rank < with_symbol {
                    out.push(symbol as u8);
                    counts[symbol] -= 1;
                    current = with_symbol;
                    break;
                }
                rank -= with_symbol;
            }
            remaining -= 1;
        }
        debug_assert_eq!(rank, BigUint::from(0u8));
        Ok(out)
    }

    /// Recovers the k-bit word from a sequence: its lexicographic rank.
    /// Sequences of rank ≥ 2^k are never produced by `match_bits` and are
    /// rejected.
    pub fn dematch(&self, seq: &[u8]) -> Result<Vec<bool>> {
        if seq.len() != self.n() {
            return Err(Error::Contract(format!(
                "expected sequence of length {}, got {}",
                self.n(),
                seq.len()
            )));
        }
        if !self.composition.matches_sequence(seq) {
            return Err(Error::Composition(format!(
                "sequence composition differs from codec composition {:?}",
                self.composition.counts()
            )));
        }

        let mut counts: Vec<usize> = self.composition.counts().to_vec();
        let mut remaining = self.n();
        let mut current = self.num_sequences.clone();
        let mut rank = BigUint::from(0u8);
        for &s in seq {
            let symbol = s as usize;
            for t in 0..symbol {
                if counts[t] > 0 {
                    rank += &current * counts[t] / remaining;
                }
            }
            current = &current * counts[symbol] / remaining;
            counts[symbol] -= 1;
            remaining -= 1;
        }

        if rank >= BigUint::from(1u8) << self.k {
            return Err(Error::OutOfImage(format!(
                "sequence rank exceeds 2^{} − 1",
                self.k
            )));
        }
        let mut bits = vec![false; self.k];
        for (i, bit) in bits.iter_mut().enumerate() {
            *bit = rank.bit((self.k - 1 - i) as u64);
        }
        Ok(bits)
    }
}

/// n!/Π cᵢ! computed exactly as a product of binomials C(s₁,c₁)·C(s₂,c₂)·…
/// over the partial sums sⱼ = c₁+…+cⱼ.
fn multiset_permutations(counts: &[usize]) -> BigUint {
    let mut result = BigUint::from(1u8);
    let mut partial = 0usize;
    for &c in counts {
        partial += c;
        result *= binomial(partial, c);
    }
    result
}

/// Exact binomial coefficient; every intermediate division is exact.
fn binomial(n: usize, k: usize) -> BigUint {
    let k = k.min(n - k);
    let mut result = BigUint::from(1u8);
    for i in 1..=k {
        result = result * (n - k + i) / i;
    }
    result
}
