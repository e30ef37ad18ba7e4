//! Seeded finite-shot measurement.
//!
//! All randomness flows through [`ShotRng`], a ChaCha8 stream cipher keyed
//! by a 64-bit seed. ChaCha output is specified bit-for-bit, so counts are
//! reproducible across platforms and releases of this crate. Independent
//! streams for sweep points come from [`ShotRng::stream`], which keys the
//! same seed with a different 64-bit stream id instead of reseeding.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::state::{basis_label, StateVector};
use crate::error::{Error, Result};

/// The crate's only random source.
pub type ShotRng = ChaCha8Rng;

/// Generator for `seed` on stream `stream`.
pub fn shot_rng(seed: u64, stream: u64) -> ShotRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Measurement record: outcome index (qubit 0 most significant) to count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShotCounts {
    n_qubits: usize,
    shots: u64,
    counts: BTreeMap<usize, u64>,
}

impl ShotCounts {
    /// Builds a record from `(outcome index, count)` pairs.
    pub fn from_counts(n_qubits: usize, counts: impl IntoIterator<Item = (usize, u64)>) -> Result<Self> {
        let dim = 1usize << n_qubits;
        let mut map = BTreeMap::new();
        let mut shots = 0;
        for (idx, c) in counts {
            if idx >= dim {
                return Err(Error::domain(format!(
                    "outcome {idx} out of range for {n_qubits} qubits"
                )));
            }
            if c > 0 {
                *map.entry(idx).or_insert(0) += c;
                shots += c;
            }
        }
        if shots == 0 {
            return Err(Error::domain("counts record holds no shots"));
        }
        Ok(Self {
            n_qubits,
            shots,
            counts: map,
        })
    }

    /// Builds a record from ket strings such as `"01"`.
    pub fn from_bitstrings<'a>(counts: impl IntoIterator<Item = (&'a str, u64)>) -> Result<Self> {
        let mut n = None;
        let mut pairs = Vec::new();
        for (bits, c) in counts {
            let width = bits.len();
            if *n.get_or_insert(width) != width || width == 0 {
                return Err(Error::domain(format!("bitstring {bits:?} has inconsistent width")));
            }
            let idx = usize::from_str_radix(bits, 2)
                .map_err(|_| Error::domain(format!("{bits:?} is not a bitstring")))?;
            pairs.push((idx, c));
        }
        Self::from_counts(n.unwrap_or(0), pairs)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn get(&self, index: usize) -> u64 {
        self.counts.get(&index).copied().unwrap_or(0)
    }

    /// Nonzero entries in ascending outcome order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }

    /// Nonzero entries keyed by ket string.
    pub fn bitstrings(&self) -> Vec<(String, u64)> {
        self.iter()
            .map(|(k, v)| (basis_label(k, self.n_qubits), v))
            .collect()
    }

    /// Empirical distribution over all `2^n` outcomes.
    pub fn frequencies(&self) -> Vec<f64> {
        let mut f = vec![0.0; 1 << self.n_qubits];
        for (k, v) in self.iter() {
            f[k] = v as f64 / self.shots as f64;
        }
        f
    }
}

/// Draws `shots` outcomes of a computational-basis measurement of `state`.
pub fn sample_counts(state: &StateVector, shots: u64, seed: u64) -> Result<ShotCounts> {
    sample_distribution(&state.probabilities(), shots, &mut shot_rng(seed, 0))
}

/// Multinomial draw from an explicit distribution, one uniform variate per
/// shot inverted through the cumulative distribution.
pub fn sample_distribution(probs: &[f64], shots: u64, rng: &mut ShotRng) -> Result<ShotCounts> {
    if shots == 0 {
        return Err(Error::domain("shots must be at least 1"));
    }
    let dim = probs.len();
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::domain(format!("distribution length {dim} is not a power of two")));
    }
    if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::domain("distribution has negative or non-finite entries"));
    }
    let mut cdf = Vec::with_capacity(dim);
    let mut acc = 0.0;
    for p in probs {
        acc += p;
        cdf.push(acc);
    }
    let total = acc;
    if total <= 0.0 {
        return Err(Error::domain("distribution has zero mass"));
    }
    // outcomes with zero probability are never selected: partition_point
    // returns the first index whose cumulative mass exceeds u
    let mut counts = vec![0u64; dim];
    for _ in 0..shots {
        let u = rng.random::<f64>() * total;
        let k = cdf.partition_point(|&c| c <= u).min(dim - 1);
        counts[k] += 1;
    }
    ShotCounts::from_counts(dim.trailing_zeros() as usize, counts.into_iter().enumerate())
}
