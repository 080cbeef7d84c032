//! Strong typicality: |ν(a) − p(a)| < ε·p(a) for every letter, and letters
//! of probability zero must not occur.

use crate::error::{Error, Result};
use crate::prob::Joint;

/// Dense PMF over a tuple of axes in a fixed order (last axis fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct TypTable {
    pub names: Vec<String>,
    pub sizes: Vec<usize>,
    pub probs: Vec<f64>,
}

impl TypTable {
    /// Marginal of `joint` on `names`, in that order.
    pub fn from_joint(joint: &Joint, names: &[&str]) -> Result<Self> {
        let m = joint.marginalize(names)?;
        let sizes: Vec<usize> = names.iter().map(|n| m.axis(n).map(|a| a.size)).collect::<Result<_>>()?;
        let total: usize = sizes.iter().product();
        let mut probs = Vec::with_capacity(total);
        let mut idx = vec![0usize; names.len()];
        for _ in 0..total {
            let assign: Vec<(&str, usize)> = names.iter().copied().zip(idx.iter().copied()).collect();
            probs.push(m.prob(&assign)?);
            for k in (0..idx.len()).rev() {
                idx[k] += 1;
                if idx[k] < sizes[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        Ok(TypTable {
            names: names.iter().map(|s| s.to_string()).collect(),
            sizes,
            probs,
        })
    }

    /// Whether the sequences (one per axis, same length) are jointly
    /// ε-typical.
    pub fn typical(&self, seqs: &[&[u8]], eps: f64) -> bool {
        debug_assert_eq!(seqs.len(), self.sizes.len());
        let n = seqs[0].len();
        if n == 0 {
            return false;
        }
        let mut counts = vec![0u32; self.probs.len()];
        for i in 0..n {
            let mut flat = 0usize;
            for (s, &size) in seqs.iter().zip(&self.sizes) {
                flat = flat * size + s[i] as usize;
            }
            if self.probs[flat] <= 0.0 {
                return false;
            }
            counts[flat] += 1;
        }
        let nf = n as f64;
        self.probs
            .iter()
            .zip(&counts)
            .all(|(&p, &c)| p <= 0.0 || (c as f64 / nf - p).abs() < eps * p)
    }
}

/// Checks a typicality parameter.
pub fn check_eps(eps: f64) -> Result<()> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::Domain(format!("typicality parameter {eps} must be a finite nonnegative number")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::Alphabet;

    fn table() -> TypTable {
        let j = Joint::new(vec![Alphabet::new("A", 2), Alphabet::new("B", 2)], vec![0.25, 0.25, 0.5, 0.0]).unwrap();
        TypTable::from_joint(&j, &["B", "A"]).unwrap()
    }

    #[test]
    fn table_follows_requested_order() {
        let t = table();
        // (B, A) order: p(B=0,A=1) = 0.5, p(B=1,A=1) = 0
        assert_eq!(t.probs, vec![0.25, 0.5, 0.25, 0.0]);
    }

    #[test]
    fn exact_type_is_typical_and_zero_letters_are_not() {
        let t = table();
        let a = [0u8, 1, 1, 0];
        let b = [0u8, 0, 0, 1];
        assert!(t.typical(&[&b, &a], 0.01));
        assert!(!t.typical(&[&b, &a], 0.0));
        let a2 = [0u8, 1, 1, 1];
        let b2 = [0u8, 0, 0, 1];
        assert!(!t.typical(&[&b2, &a2], 10.0));
    }
}
