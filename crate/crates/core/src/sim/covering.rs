//! Indirect covering: how many distinct bins do 2^{nR} conditionally
//! i.i.d. sequences land in?

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::prf::{index_count, BinMap};
use crate::error::{Error, Result};
use crate::prob::CondPmf;

/// Largest number of sequences drawn per trial.
pub const MAX_SEQUENCES: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringReport {
    pub n: usize,
    pub rate: f64,
    pub bin_rate: f64,
    pub delta: f64,
    pub trials: usize,
    pub sequences_per_trial: u64,
    pub bins: u64,
    /// Pass threshold 2^{n(R−δ)}.
    pub threshold: f64,
    pub distinct_bins: Vec<u64>,
    /// Minimum, 10%, 50%, 90% quantiles and maximum of the counts.
    pub quantiles: [u64; 5],
    /// `None` when there are no trials.
    pub pass_fraction: Option<f64>,
}

fn quantiles(v: &[u64]) -> [u64; 5] {
    if v.is_empty() {
        return [0; 5];
    }
    let mut s = v.to_vec();
    s.sort_unstable();
    let at = |q: f64| s[((s.len() - 1) as f64 * q).round() as usize];
    [s[0], at(0.1), at(0.5), at(0.9), s[s.len() - 1]]
}

/// Runs `trials` independent covering trials.
///
/// `kernel` is p(z|v) with a single target and conditioning axis and `p_v`
/// the source of the conditioning sequence.
#[allow(clippy::too_many_arguments)]
pub fn covering_experiment(
    kernel: &CondPmf,
    p_v: &[f64],
    n: usize,
    rate: f64,
    bin_rate: f64,
    delta: f64,
    trials: usize,
    seed: u64,
) -> Result<CoveringReport> {
    if kernel.targets().len() != 1 || kernel.given().len() != 1 {
        return Err(Error::Shape("covering kernel must be p(z|v) with one target and one conditioning axis".into()));
    }
    let (nz, nv) = (kernel.targets()[0].size, kernel.given()[0].size);
    if p_v.len() != nv {
        return Err(Error::AxisSize {
            name: "V".into(),
            expected: nv,
            found: p_v.len(),
        });
    }
    if nz > 256 {
        return Err(Error::Domain("alphabets above 256 letters are not simulated".into()));
    }
    if !(rate > 0.0 && bin_rate > 0.0) {
        return Err(Error::Domain(format!("rates must be positive, got R = {rate}, R_B = {bin_rate}")));
    }
    if !(delta >= 0.0) {
        return Err(Error::Domain(format!("delta = {delta} must be nonnegative")));
    }
    let n_limit = (24.0 * (nz.max(2) as f64).log2()).floor();
    if n as f64 > n_limit {
        return Err(Error::Budget {
            what: "covering blocklength".into(),
            required: n as f64,
            limit: n_limit,
        });
    }
    let k = index_count(n, rate, MAX_SEQUENCES)?;
    let v_dist = WeightedIndex::new(p_v).map_err(|e| Error::InvalidProbability(format!("p_v: {e}")))?;
    let rows: Vec<WeightedIndex<f64>> = (0..nv)
        .map(|v| WeightedIndex::new(kernel.row(v)).map_err(|e| Error::InvalidProbability(format!("row {v}: {e}"))))
        .collect::<Result<_>>()?;
    let bins = BinMap::new(n, bin_rate, 0)?.bins;
    let threshold = 2f64.powf(n as f64 * (rate - delta));
    let counts: Vec<u64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let binmap = BinMap::new(n, bin_rate, super::prf::key(&[seed, t as u64])).expect("validated");
            let v: Vec<usize> = (0..n).map(|_| v_dist.sample(&mut rng)).collect();
            let mut seen: Vec<u64> = Vec::with_capacity(k as usize);
            let mut z = vec![0u8; n];
            for _ in 0..k {
                for (zi, &vi) in z.iter_mut().zip(&v) {
                    *zi = rows[vi].sample(&mut rng) as u8;
                }
                seen.push(binmap.bin(&z));
            }
            seen.sort_unstable();
            seen.dedup();
            seen.len() as u64
        })
        .collect();
    let pass = counts.iter().filter(|&&c| c as f64 >= threshold).count();
    Ok(CoveringReport {
        n,
        rate,
        bin_rate,
        delta,
        trials,
        sequences_per_trial: k,
        bins,
        threshold,
        quantiles: quantiles(&counts),
        pass_fraction: (trials > 0).then(|| pass as f64 / trials as f64),
        distinct_bins: counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::Alphabet;

    fn uniform_kernel() -> CondPmf {
        CondPmf::uniform(vec![Alphabet::new("Z", 2)], vec![Alphabet::new("V", 2)]).unwrap()
    }

    #[test]
    fn deterministic_kernel_sees_one_bin() {
        let k = CondPmf::deterministic(Alphabet::new("Z", 2), vec![Alphabet::new("V", 2)], |v| v[0]).unwrap();
        let r = covering_experiment(&k, &[0.5, 0.5], 10, 0.5, 0.8, 0.1, 20, 3).unwrap();
        assert!(r.distinct_bins.iter().all(|&c| c == 1));
    }

    #[test]
    fn counts_bounded_by_sequences_and_bins() {
        let r = covering_experiment(&uniform_kernel(), &[0.5, 0.5], 10, 0.6, 0.5, 0.1, 20, 1).unwrap();
        for &c in &r.distinct_bins {
            assert!(c <= r.sequences_per_trial.min(r.bins));
        }
        assert_eq!(r.pass_fraction, Some(0.0));
    }

    #[test]
    fn no_trials_gives_undefined_fraction() {
        let r = covering_experiment(&uniform_kernel(), &[0.5, 0.5], 8, 0.6, 0.8, 0.1, 0, 1).unwrap();
        assert_eq!(r.pass_fraction, None);
    }

    #[test]
    fn blocklength_guard() {
        let e = covering_experiment(&uniform_kernel(), &[0.5, 0.5], 25, 0.1, 0.2, 0.0, 1, 1).unwrap_err();
        assert!(matches!(e, Error::Budget { .. }));
    }
}
