//! Seeded shot sampling.
//!
//! The generator is ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64`. Uniform variates are the top 53 bits of `next_u64`
//! scaled by `2^-53`; each shot draws one variate and picks the outcome by
//! inverse CDF over the readout-perturbed distribution.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::noise::{apply_readout, Confusion};
use super::state::{marginal_populations, RegisterState};
use super::QsimError;

/// Measurement tallies over bit strings of the system qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Counts {
    pub shots: u64,
    /// Concatenated labels of the measured qubits, leftmost bit first.
    pub bit_order: String,
    pub counts: BTreeMap<String, u64>,
}

impl Counts {
    /// Relative frequencies in bit-string order `0…0, …, 1…1`.
    pub fn frequencies(&self, n_bits: usize) -> Result<Vec<f64>, QsimError> {
        self.check()?;
        let mut f = alloc::vec![0.0; 1 << n_bits];
        for (key, &n) in &self.counts {
            let idx = parse_bits(key, n_bits).ok_or_else(|| QsimError::UnknownOutcome(key.clone()))?;
            f[idx] = n as f64 / self.shots as f64;
        }
        Ok(f)
    }

    pub fn check(&self) -> Result<(), QsimError> {
        let total: u64 = self.counts.values().sum();
        if self.shots == 0 || total != self.shots {
            return Err(QsimError::CountsMismatch { shots: self.shots, total });
        }
        Ok(())
    }
}

fn parse_bits(key: &str, n_bits: usize) -> Option<usize> {
    if key.len() != n_bits {
        return None;
    }
    key.bytes().try_fold(0usize, |acc, b| match b {
        b'0' => Some(acc << 1),
        b'1' => Some((acc << 1) | 1),
        _ => None,
    })
}

pub fn bit_string(index: usize, n_bits: usize) -> String {
    (0..n_bits).map(|m| if (index >> (n_bits - 1 - m)) & 1 == 1 { '1' } else { '0' }).collect()
}

/// Stream splitting for independent seeded evaluations: folds `stream`
/// into `base` with the splitmix64 finalizer.
pub fn derive_seed(base: u64, stream: &[u64]) -> u64 {
    let mix = |mut z: u64| {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    };
    stream.iter().fold(mix(base), |acc, &s| mix(acc ^ mix(s)))
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Multinomial draw of `shots` outcomes from `dist`.
pub fn sample_distribution(dist: &[f64], shots: u64, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total: f64 = dist.iter().sum();
    let mut cdf = Vec::with_capacity(dist.len());
    let mut acc = 0.0;
    for &p in dist {
        acc += p.max(0.0) / total;
        cdf.push(acc);
    }
    let last_nonzero = dist.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let mut tally = alloc::vec![0u64; dist.len()];
    for _ in 0..shots {
        let u = uniform(&mut rng);
        let idx = cdf.iter().position(|&c| u < c).unwrap_or(last_nonzero).min(last_nonzero);
        tally[idx] += 1;
    }
    tally
}

/// Samples measurement outcomes of `system_qubits` with readout confusion
/// (one matrix per measured qubit, or empty for ideal readout).
pub fn sample_counts(
    state: &RegisterState,
    system_qubits: &[usize],
    labels: &[&str],
    shots: u64,
    readout: &[Confusion],
    seed: u64,
) -> Result<Counts, QsimError> {
    if shots == 0 {
        return Err(QsimError::ZeroShots);
    }
    let dist = observed_distribution(state, system_qubits, readout)?;
    let tally = sample_distribution(&dist, shots, seed);
    let k = system_qubits.len();
    let counts = tally.iter().enumerate().map(|(i, &n)| (bit_string(i, k), n)).collect();
    Ok(Counts { shots, bit_order: labels.concat(), counts })
}

/// Exact outcome distribution after readout confusion.
pub fn observed_distribution(
    state: &RegisterState,
    system_qubits: &[usize],
    readout: &[Confusion],
) -> Result<Vec<f64>, QsimError> {
    for &q in system_qubits {
        if q >= state.n_qubits() {
            return Err(QsimError::QubitOutOfRange { qubit: q, n_qubits: state.n_qubits() });
        }
    }
    let marginal = marginal_populations(state, system_qubits);
    Ok(if readout.is_empty() { marginal } else { apply_readout(&marginal, readout) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::noise::{flip_confusion, IDEAL_READOUT};

    #[test]
    fn deterministic_state_puts_all_shots_on_one_outcome() {
        let c = sample_counts(&RegisterState::zero(3), &[0, 1], &["q0", "q1"], 8192, &[], 7).unwrap();
        assert_eq!(c.counts["00"], 8192);
        assert_eq!(c.bit_order, "q0q1");
        assert_eq!(c.frequencies(2).unwrap(), alloc::vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn same_seed_same_counts() {
        let s = RegisterState::maximally_mixed(2);
        let conf = [flip_confusion(0.1), IDEAL_READOUT];
        let a = sample_counts(&s, &[0, 1], &["q0", "q1"], 1000, &conf, 42).unwrap();
        let b = sample_counts(&s, &[0, 1], &["q0", "q1"], 1000, &conf, 42).unwrap();
        let c = sample_counts(&s, &[0, 1], &["q0", "q1"], 1000, &conf, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn binomial_spread_of_fair_split() {
        // (1/2, 1/2, 0, 0): 3σ = 3 sqrt(0.25 / 8192) ≈ 0.0166
        let tally = sample_distribution(&[0.5, 0.5, 0.0, 0.0], 8192, 2024);
        let f = tally[0] as f64 / 8192.0;
        assert!((f - 0.5).abs() < 3.0 * (0.25f64 / 8192.0).sqrt());
        assert_eq!(tally[2] + tally[3], 0);
    }

    #[test]
    fn bad_counts_are_rejected() {
        let mut counts = BTreeMap::new();
        counts.insert(String::from("0x"), 4u64);
        let c = Counts { shots: 4, bit_order: "q0q1".into(), counts };
        assert_eq!(c.frequencies(2), Err(QsimError::UnknownOutcome("0x".into())));
        let c = Counts { shots: 5, bit_order: "q0q1".into(), counts: BTreeMap::new() };
        assert!(c.check().is_err());
    }

    #[test]
    fn seed_derivation_separates_streams() {
        assert_ne!(derive_seed(1, &[0, 1]), derive_seed(1, &[1, 0]));
        assert_eq!(derive_seed(9, &[3]), derive_seed(9, &[3]));
    }
}
