//! Distribution synthesis, composition quantization, and the exact
//! constant-composition distribution matcher.

mod ccdm;

pub use ccdm::CcdmCodec;

use crate::error::{Error, Result};

/// Probabilities summing to one must do so within this absolute tolerance.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// Ordered set of positive per-quadrature amplitude levels, e.g. `{1,3,5,7}`
/// for the 64QAM per-quadrature amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeAlphabet {
    levels: Vec<f64>,
}

impl AmplitudeAlphabet {
    pub fn new(levels: Vec<f64>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Domain("alphabet must have at least one level".into()));
        }
        if levels.len() > 256 {
            return Err(Error::Domain("alphabet larger than 256 levels".into()));
        }
        if levels.iter().any(|&l| !l.is_finite() || l <= 0.0) {
            return Err(Error::Domain("amplitude levels must be positive".into()));
        }
        if levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("amplitude levels must be strictly increasing".into()));
        }
        Ok(Self { levels })
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        false // size >= 1 by construction
    }

    /// Display symbol for a level index: α, β, γ, δ, then ε, ζ, ...
    pub fn display_symbol(&self, index: usize) -> char {
        const GREEK: [char; 24] = [
            'α', 'β', 'γ', 'δ', 'ε', 'ζ', 'η', 'θ', 'ι', 'κ', 'λ', 'μ', 'ν', 'ξ', 'ο', 'π', 'ρ',
            'σ', 'τ', 'υ', 'φ', 'χ', 'ψ', 'ω',
        ];
        GREEK[index % GREEK.len()]
    }
}

/// Target probabilities over an amplitude alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeDistribution {
    alphabet: AmplitudeAlphabet,
    probs: Vec<f64>,
}

impl AmplitudeDistribution {
    pub fn new(alphabet: AmplitudeAlphabet, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != alphabet.len() {
            return Err(Error::Domain(format!(
                "{} probabilities for {} levels",
                probs.len(),
                alphabet.len()
            )));
        }
        if probs.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(Error::Domain("probabilities must be non-negative".into()));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::Domain(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(Self { alphabet, probs })
    }

    pub fn uniform(alphabet: AmplitudeAlphabet) -> Self {
        let p = 1.0 / alphabet.len() as f64;
        let probs = vec![p; alphabet.len()];
        Self { alphabet, probs }
    }

    pub fn alphabet(&self) -> &AmplitudeAlphabet {
        &self.alphabet
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Entropy −Σ p·log2 p in bits per amplitude, with 0·log 0 := 0.
    pub fn entropy(&self) -> f64 {
        entropy_bits(&self.probs)
    }
}

/// −Σ p·log2 p with the 0·log 0 := 0 convention.
pub fn entropy_bits(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Maxwell–Boltzmann distribution `p_i ∝ exp(−ν·level_i²)` with entropy equal
/// to `target_entropy`, solved by bisection on ν ∈ [0, 100].
pub fn mb_distribution(
    alphabet: &AmplitudeAlphabet,
    target_entropy: f64,
) -> Result<AmplitudeDistribution> {
    const MAX_NU: f64 = 100.0;
    const MAX_ITER: usize = 200;
    const TOL_BITS: f64 = 1e-9;

    let max_entropy = (alphabet.len() as f64).log2();
    if !target_entropy.is_finite() || target_entropy <= 0.0 || target_entropy > max_entropy {
        return Err(Error::Domain(format!(
            "target entropy {target_entropy} outside (0, {max_entropy}]"
        )));
    }
    if target_entropy == max_entropy {
        return Ok(AmplitudeDistribution::uniform(alphabet.clone()));
    }

    let probs_for = |nu: f64| -> Vec<f64> {
        // Shift exponents by the smallest energy so weights stay in (0, 1].
        let e_min = alphabet.levels()[0] * alphabet.levels()[0];
        let weights: Vec<f64> = alphabet
            .levels()
            .iter()
            .map(|&l| (-nu * (l * l - e_min)).exp())
            .collect();
        let z: f64 = weights.iter().sum();
        weights.into_iter().map(|w| w / z).collect()
    };
    let entropy_at = |nu: f64| entropy_bits(&probs_for(nu));

    let (mut lo, mut hi) = (0.0_f64, MAX_NU);
    if entropy_at(hi) > target_entropy {
        return Err(Error::Numeric(format!(
            "entropy target {target_entropy} not reachable with ν ≤ {MAX_NU}"
        )));
    }
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        let h = entropy_at(mid);
        if (h - target_entropy).abs() <= TOL_BITS {
            return AmplitudeDistribution::new(alphabet.clone(), probs_for(mid));
        }
        if h > target_entropy {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Numeric(format!(
        "bisection did not converge to entropy {target_entropy} in {MAX_ITER} iterations"
    )))
}

/// Per-level occurrence counts of one DM block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Composition {
    counts: Vec<usize>,
}

impl Composition {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::Domain("composition must cover at least one level".into()));
        }
        if counts.iter().sum::<usize>() == 0 {
            return Err(Error::Domain("composition must contain at least one symbol".into()));
        }
        Ok(Self { counts })
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn num_levels(&self) -> usize {
        self.counts.len()
    }

    /// Block length n = Σ counts.
    pub fn n(&self) -> usize {
        self.counts.iter().sum()
    }

    /// The realized per-block distribution C/n.
    pub fn realized_probs(&self) -> Vec<f64> {
        let n = self.n() as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// Entropy of the realized distribution C/n, for comparison against the
    /// target the composition was quantized from.
    pub fn realized_entropy(&self) -> f64 {
        entropy_bits(&self.realized_probs())
    }

    /// Counts the levels of `seq` and checks them against this composition.
    pub fn matches_sequence(&self, seq: &[u8]) -> bool {
        if seq.len() != self.n() {
            return false;
        }
        let mut observed = vec![0usize; self.counts.len()];
        for &s in seq {
            let idx = s as usize;
            if idx >= observed.len() {
                return false;
            }
            observed[idx] += 1;
        }
        observed == self.counts
    }
}

/// Largest-remainder quantization of `n·p_i`, ties broken toward the lowest
/// index. Deterministic.
pub fn quantize_composition(dist: &AmplitudeDistribution, n: usize) -> Result<Composition> {
    if n == 0 {
        return Err(Error::Domain("block length must be at least 1".into()));
    }
    let raw: Vec<f64> = dist.probs().iter().map(|&p| p * n as f64).collect();
    let mut counts: Vec<usize> = raw.iter().map(|&r| r.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = raw[a] - raw[a].floor();
        let fb = raw[b] - raw[b].floor();
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    for &idx in order.iter().take(n - assigned) {
        counts[idx] += 1;
    }
    Composition::new(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_level() -> AmplitudeAlphabet {
        AmplitudeAlphabet::new(vec![1.0, 3.0, 5.0, 7.0]).unwrap()
    }

    fn paper_dist() -> AmplitudeDistribution {
        AmplitudeDistribution::new(four_level(), vec![0.4, 0.3, 0.2, 0.1]).unwrap()
    }

    #[test]
    fn alphabet_rejects_unsorted_and_nonpositive() {
        assert!(AmplitudeAlphabet::new(vec![]).is_err());
        assert!(AmplitudeAlphabet::new(vec![1.0, 1.0]).is_err());
        assert!(AmplitudeAlphabet::new(vec![3.0, 1.0]).is_err());
        assert!(AmplitudeAlphabet::new(vec![-1.0, 1.0]).is_err());
        assert!(AmplitudeAlphabet::new(vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn distribution_validates_sum() {
        assert!(AmplitudeDistribution::new(four_level(), vec![0.4, 0.3, 0.2, 0.2]).is_err());
        assert!(AmplitudeDistribution::new(four_level(), vec![0.5, 0.5]).is_err());
        assert!(paper_dist().probs().len() == 4);
    }

    #[test]
    fn entropy_uniform_and_degenerate() {
        assert_eq!(entropy_bits(&[0.25, 0.25, 0.25, 0.25]), 2.0);
        assert_eq!(entropy_bits(&[1.0]), 0.0);
    }

    #[test]
    fn entropy_of_paper_distribution() {
        // Direct evaluation of −Σ p log2 p for [0.4, 0.3, 0.2, 0.1].
        let expected = -(0.4_f64 * 0.4_f64.log2()
            + 0.3 * 0.3_f64.log2()
            + 0.2 * 0.2_f64.log2()
            + 0.1 * 0.1_f64.log2());
        assert!((paper_dist().entropy() - expected).abs() < 1e-15);
        assert!((expected - 1.84644).abs() < 5e-6);
    }

    #[test]
    fn mb_max_entropy_is_exactly_uniform() {
        let dist = mb_distribution(&four_level(), 2.0).unwrap();
        assert_eq!(dist.probs(), &[0.25, 0.25, 0.25, 0.25]);
    }

    #[test]
    fn mb_rejects_unreachable_entropy() {
        assert!(matches!(
            mb_distribution(&four_level(), 2.0 + 1e-9),
            Err(Error::Domain(_))
        ));
        assert!(matches!(mb_distribution(&four_level(), 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn mb_hits_target_entropy() {
        for target in [0.5, 1.0, 1.5, 1.75, 1.99] {
            let dist = mb_distribution(&four_level(), target).unwrap();
            assert!(
                (dist.entropy() - target).abs() <= 1e-9,
                "H={} for target {target}",
                dist.entropy()
            );
            // ν > 0 ⇒ strictly decreasing probabilities in level.
            assert!(dist.probs().windows(2).all(|w| w[0] > w[1]));
        }
    }

    #[test]
    fn quantize_paper_examples() {
        let c = quantize_composition(&paper_dist(), 10).unwrap();
        assert_eq!(c.counts(), &[4, 3, 2, 1]);
        let c = quantize_composition(&paper_dist(), 30).unwrap();
        assert_eq!(c.counts(), &[12, 9, 6, 3]);
    }

    #[test]
    fn quantize_breaks_ties_toward_lowest_index() {
        let alphabet = AmplitudeAlphabet::new(vec![1.0, 3.0, 5.0]).unwrap();
        let third = AmplitudeDistribution::new(alphabet, vec![1.0 / 3.0; 3]).unwrap();
        let c = quantize_composition(&third, 10).unwrap();
        assert_eq!(c.counts(), &[4, 3, 3]);
    }

    #[test]
    fn quantize_preserves_total() {
        let dist = mb_distribution(&four_level(), 1.3).unwrap();
        for n in [1, 2, 3, 7, 10, 99, 1000] {
            assert_eq!(quantize_composition(&dist, n).unwrap().n(), n);
        }
    }

    #[test]
    fn realized_entropy_tracks_target() {
        let c = quantize_composition(&paper_dist(), 30).unwrap();
        // Exact integer multiples: realized distribution equals the target.
        assert!((c.realized_entropy() - paper_dist().entropy()).abs() < 1e-12);
    }
}
