//! Temporal-structure statistics of amplitude sequences.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Histogram of maximal run lengths, one map per amplitude level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunLengthStats {
    per_level: Vec<BTreeMap<usize, usize>>,
}

impl RunLengthStats {
    /// run length → number of maximal runs of that length, for one level.
    pub fn level(&self, level: usize) -> &BTreeMap<usize, usize> {
        &self.per_level[level]
    }

    pub fn num_levels(&self) -> usize {
        self.per_level.len()
    }

    /// Σ(run_length · count) for one level, i.e. its total occurrences.
    pub fn occurrences(&self, level: usize) -> usize {
        self.per_level[level]
            .iter()
            .map(|(len, count)| len * count)
            .sum()
    }

    /// Longest run observed for one level (0 if the level never occurs).
    pub fn max_run(&self, level: usize) -> usize {
        self.per_level[level].keys().next_back().copied().unwrap_or(0)
    }
}

/// Counts maximal runs per level over a non-empty sequence.
pub fn run_length_stats(amplitudes: &[u8], num_levels: usize) -> Result<RunLengthStats> {
    if amplitudes.is_empty() {
        return Err(Error::Contract("run-length statistics of an empty sequence".into()));
    }
    if amplitudes.iter().any(|&a| a as usize >= num_levels) {
        return Err(Error::Contract(format!(
            "amplitude index outside the {num_levels}-level alphabet"
        )));
    }
    let mut per_level = vec![BTreeMap::new(); num_levels];
    let mut current = amplitudes[0];
    let mut run = 1usize;
    for &a in &amplitudes[1..] {
        if a == current {
            run += 1;
        } else {
            *per_level[current as usize].entry(run).or_insert(0) += 1;
            current = a;
            run = 1;
        }
    }
    *per_level[current as usize].entry(run).or_insert(0) += 1;
    Ok(RunLengthStats { per_level })
}

/// Fraction of adjacent identical pairs, #{i : s_i = s_{i+1}} / (len − 1).
pub fn adjacent_pair_rate(amplitudes: &[u8]) -> Result<f64> {
    if amplitudes.len() < 2 {
        return Err(Error::Contract("adjacent-pair rate needs at least 2 symbols".into()));
    }
    let pairs = amplitudes.windows(2).filter(|w| w[0] == w[1]).count();
    Ok(pairs as f64 / (amplitudes.len() - 1) as f64)
}

/// L1 deviation of windowed empirical distributions from a target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositionDeviation {
    pub max_l1: f64,
    pub mean_l1: f64,
    pub num_windows: usize,
}

/// Slides a window over the sequence (positions 0, stride, 2·stride, …) and
/// reports the max and mean L1 distance between each window's empirical
/// distribution and the target.
pub fn windowed_composition_deviation(
    amplitudes: &[u8],
    target: &[f64],
    window: usize,
    stride: usize,
) -> Result<CompositionDeviation> {
    if window == 0 || window > amplitudes.len() {
        return Err(Error::Contract(format!(
            "window {window} invalid for sequence length {}",
            amplitudes.len()
        )));
    }
    if stride == 0 {
        return Err(Error::Contract("stride must be positive".into()));
    }
    if amplitudes.iter().any(|&a| a as usize >= target.len()) {
        return Err(Error::Contract("amplitude index outside the target alphabet".into()));
    }

    let mut max_l1 = 0.0_f64;
    let mut sum_l1 = 0.0_f64;
    let mut num_windows = 0usize;
    let mut counts = vec![0usize; target.len()];
    let mut start = 0usize;
    while start + window <= amplitudes.len() {
        counts.iter_mut().for_each(|c| *c = 0);
        for &a in &amplitudes[start..start + window] {
            counts[a as usize] += 1;
        }
        let l1: f64 = counts
            .iter()
            .zip(target)
            .map(|(&c, &t)| (c as f64 / window as f64 - t).abs())
            .sum();
        max_l1 = max_l1.max(l1);
        sum_l1 += l1;
        num_windows += 1;
        start += stride;
    }
    Ok(CompositionDeviation {
        max_l1,
        mean_l1: sum_l1 / num_windows as f64,
        num_windows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_lengths_of_paired_sequence() {
        let stats = run_length_stats(&[0, 0, 1, 1], 2).unwrap();
        assert_eq!(stats.level(0).get(&2), Some(&1));
        assert_eq!(stats.level(1).get(&2), Some(&1));
        assert_eq!(stats.occurrences(0), 2);
        assert_eq!(stats.occurrences(1), 2);
    }

    #[test]
    fn all_distinct_neighbors_give_unit_runs() {
        let stats = run_length_stats(&[0, 1, 2, 3, 0, 1], 4).unwrap();
        for level in 0..4 {
            assert!(stats.level(level).keys().all(|&len| len == 1));
        }
        assert_eq!(stats.max_run(0), 1);
    }

    #[test]
    fn run_lengths_account_for_every_occurrence() {
        let seq = [0u8, 0, 0, 2, 2, 1, 0, 3, 3, 3, 3];
        let stats = run_length_stats(&seq, 4).unwrap();
        for level in 0..4u8 {
            let expected = seq.iter().filter(|&&a| a == level).count();
            assert_eq!(stats.occurrences(level as usize), expected);
        }
    }

    #[test]
    fn empty_sequence_is_rejected() {
        assert!(matches!(run_length_stats(&[], 4), Err(Error::Contract(_))));
    }

    #[test]
    fn pair_rate_extremes() {
        assert_eq!(adjacent_pair_rate(&[0, 0, 0]).unwrap(), 1.0);
        assert_eq!(adjacent_pair_rate(&[0, 1, 0, 1]).unwrap(), 0.0);
        assert!(matches!(adjacent_pair_rate(&[0]), Err(Error::Contract(_))));
    }

    #[test]
    fn constant_sequence_deviation_is_direct_l1() {
        // All-α against target [0.4, 0.3, 0.2, 0.1]: |1−0.4| + 0.3 + 0.2 + 0.1.
        let dev =
            windowed_composition_deviation(&[0u8; 40], &[0.4, 0.3, 0.2, 0.1], 10, 10).unwrap();
        assert!((dev.max_l1 - 1.2).abs() < 1e-12);
        assert!((dev.mean_l1 - 1.2).abs() < 1e-12);
        assert_eq!(dev.num_windows, 4);
    }

    #[test]
    fn window_larger_than_sequence_is_rejected() {
        assert!(matches!(
            windowed_composition_deviation(&[0, 1], &[0.5, 0.5], 3, 1),
            Err(Error::Contract(_))
        ));
    }
}
