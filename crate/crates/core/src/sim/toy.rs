//! A binary relay channel on which every message bit has to travel through
//! the relay's bin index.
//!
//! The relay observes Z = X xor S and the destination hears only the relay,
//! Y = X_r. Its capacity under non-causal state knowledge is 1 bit, attained
//! by a uniform U independent of S, X_r = U and a uniform X. Every letter of
//! the resulting joint has probability at least 1/8, so strong typicality
//! is informative already at n ≈ 10.

use crate::channel::{SdRcAlphabets, SdRcDecision, SdRcSpec};
use crate::error::Result;

pub fn forwarding_relay() -> Result<SdRcSpec> {
    let sizes = SdRcAlphabets { s: 2, x: 2, xr: 2, z: 2, y: 2 };
    SdRcSpec::from_fn(sizes, vec![0.5, 0.5], |x, _, s| x ^ s, |_, xr, _, _| {
        let mut row = vec![0.0; 2];
        row[xr] = 1.0;
        row
    })
}

/// The optimal decision described in the module docs (|U| = 2).
pub fn forwarding_decision(spec: &SdRcSpec) -> Result<SdRcDecision> {
    SdRcDecision::noncausal(spec, 2, vec![0.5; 4], vec![1.0, 0.0, 0.0, 1.0], vec![0.5; 16])
}
