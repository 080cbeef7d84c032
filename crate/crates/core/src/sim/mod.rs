//! Seeded Monte-Carlo experiments: indirect covering with random bins and
//! the cooperative bin-forward relay scheme.
//!
//! Trials run in parallel and are merged by trial index, so results do not
//! depend on the thread count.

mod covering;
pub mod prf;
mod scheme;
pub mod typical;
mod toy;

pub use covering::{covering_experiment, CoveringReport, MAX_SEQUENCES};
pub use prf::BinMap;
pub use scheme::{
    decode_block, encode_block, find_k, relay_step, relay_update, simulate_sdrc, sliding_window_decode,
    BlockCodebook, BlockDecision, CodebookSizes, DecodeInput, Encoded, Rates, SchemeBounds, SchemeTables,
    SimReport, MAX_BLOCKLENGTH, MAX_BLOCK_WORK,
};
pub use toy::{forwarding_decision, forwarding_relay};
pub use typical::TypTable;
