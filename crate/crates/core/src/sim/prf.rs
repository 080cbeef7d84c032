//! Seeded pseudorandom functions: the bin map and codeword keys.

use serde::Serialize;

use crate::error::{Error, Result};

/// SplitMix64 finalizer.
pub fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Folds a list of words into one key.
pub fn key(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x243F_6A88_85A3_08D3, |h, &p| mix64(h ^ mix64(p)))
}

/// Key of a symbol sequence, chained onto `seed`.
pub fn sequence_key(seed: u64, seq: &[u8]) -> u64 {
    let mut h = mix64(seed ^ seq.len() as u64);
    for chunk in seq.chunks(8) {
        let mut w = 0u64;
        for (i, &b) in chunk.iter().enumerate() {
            w |= (b as u64) << (8 * i);
        }
        h = mix64(h ^ w);
    }
    h
}

/// Uniform reduction of a 64-bit hash onto `[0, range)`.
pub fn reduce(h: u64, range: u64) -> u64 {
    ((h as u128 * range as u128) >> 64) as u64
}

/// `⌈2^{n·rate}⌉`, at least 1. Refuses counts beyond `limit`.
pub fn index_count(n: usize, rate: f64, limit: u64) -> Result<u64> {
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(Error::Domain(format!("rate {rate} must be nonnegative")));
    }
    let exp = n as f64 * rate;
    // absorb rounding such as 2^{8.000000000001}
    let v = (2f64.powf(exp) - 1e-9).ceil().max(1.0);
    if v > limit as f64 {
        return Err(Error::Budget {
            what: format!("index set 2^({n}*{rate})"),
            required: v,
            limit: limit as f64,
        });
    }
    Ok(v as u64)
}

/// Uniform bin index for every sequence of length `n`, realized as a keyed
/// hash so no table is stored. Bins are 0-based here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinMap {
    pub n: usize,
    pub rate: f64,
    pub bins: u64,
    key: u64,
}

impl BinMap {
    pub fn new(n: usize, rate: f64, seed: u64) -> Result<Self> {
        if !(rate > 0.0) {
            return Err(Error::Domain(format!("bin rate {rate} must be positive")));
        }
        let bins = index_count(n, rate, 1 << 40)?;
        Ok(BinMap {
            n,
            rate,
            bins,
            key: key(&[seed, 0xB1]),
        })
    }

    pub fn bin(&self, z: &[u8]) -> u64 {
        debug_assert_eq!(z.len(), self.n);
        reduce(sequence_key(self.key, z), self.bins)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_round_up() {
        assert_eq!(index_count(8, 0.5, 1 << 20).unwrap(), 16);
        assert_eq!(index_count(10, 0.55, 1 << 20).unwrap(), 46);
        assert_eq!(index_count(10, 0.0, 1 << 20).unwrap(), 1);
        assert!(matches!(index_count(40, 1.0, 1 << 20), Err(Error::Budget { .. })));
    }

    #[test]
    fn bins_in_range_and_deterministic() {
        let m = BinMap::new(12, 0.8, 5).unwrap();
        // ⌈2^9.6⌉
        assert_eq!(m.bins, 777);
        let z = [0u8, 1, 1, 0, 1, 0, 0, 0, 1, 1, 1, 0];
        assert_eq!(m.bin(&z), m.bin(&z));
        assert!(m.bin(&z) < m.bins);
        let other = BinMap::new(12, 0.8, 6).unwrap();
        let differs = (0..64u8).any(|i| {
            let mut w = z;
            w[0] = i & 1;
            w[1] = (i >> 1) & 1;
            w[2] = (i >> 2) & 1;
            m.bin(&w) != other.bin(&w)
        });
        assert!(differs);
    }

    #[test]
    fn sequence_key_separates_lengths() {
        assert_ne!(sequence_key(1, &[0, 0]), sequence_key(1, &[0, 0, 0]));
    }
}
