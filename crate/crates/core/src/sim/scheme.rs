//! Cooperative bin-forward coding over the relay channel, simulated
//! end to end at small blocklengths.
//!
//! Every codeword is a seeded function of (trial key, block, role, indices,
//! conditioning sequences), so codebooks are never materialized and the
//! decoder regenerates exactly what the encoder used. Indices are 0-based;
//! index 0 plays the role of the fixed message "1".

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::prf::{index_count, key, reduce, sequence_key, BinMap};
use super::typical::{check_eps, TypTable};
use crate::channel::{assemble_sdrc, axis, SdRcDecision, SdRcMode, SdRcSpec};
use crate::error::{Error, Result};
use crate::prob::Joint;

/// Largest per-block candidate count (z-codewords scanned plus message
/// pairs tested) a simulation may require.
pub const MAX_BLOCK_WORK: u64 = 1 << 22;
/// Longest simulated block.
pub const MAX_BLOCKLENGTH: usize = 64;

const ROLE_U: u64 = 1;
const ROLE_XR: u64 = 2;
const ROLE_Z: u64 = 3;
const ROLE_X: u64 = 4;
const ROLE_FALLBACK: u64 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    #[serde(rename = "Rp")]
    pub rp: f64,
    #[serde(rename = "Rpp")]
    pub rpp: f64,
    #[serde(rename = "Rtilde")]
    pub rtilde: f64,
    #[serde(rename = "Rb")]
    pub rb: f64,
}

/// The information quantities that bound the scheme's rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchemeBounds {
    /// I(X,X_r;Y|S)
    pub cooperative: f64,
    /// I(X;Y|X_r,Z,S,U)
    pub direct: f64,
    /// H(Z|X_r,S,U)
    pub link_entropy: f64,
    /// I(U;S)
    pub coordination: f64,
}

impl SchemeBounds {
    pub fn of_joint(j: &Joint) -> Result<Self> {
        use axis::{S, U, X, XR, Y, Z};
        Ok(SchemeBounds {
            cooperative: j.mutual_information(&[X, XR], &[Y], &[S])?,
            direct: j.mutual_information(&[X], &[Y], &[XR, Z, S, U])?,
            link_entropy: j.entropy(&[Z], &[XR, S, U])?,
            coordination: j.mutual_information(&[U], &[S], &[])?,
        })
    }

    /// Achievable total rate min{I(X,X_r;Y|S), I(X;Y|..) + H(Z|..) − I(U;S)}.
    pub fn value(&self) -> f64 {
        self.cooperative
            .min(self.direct + self.link_entropy - self.coordination)
    }

    /// A rate split with total `fraction · value()`: R'' takes its share of
    /// the direct bound first, R̃ sits halfway between I(U;S) and the room
    /// left on the link, and R_B exceeds R' + R̃ by `bin_margin`.
    pub fn split(&self, fraction: f64, bin_margin: f64) -> Result<Rates> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::Domain(format!("fraction {fraction} must lie in (0, 1]")));
        }
        let total = fraction * self.value().max(0.0);
        let rpp = (fraction * self.direct).min(total);
        let rp = total - rpp;
        let room = (self.link_entropy - self.coordination - rp).max(0.0);
        let rtilde = self.coordination + room / 2.0;
        Ok(Rates {
            rp,
            rpp,
            rtilde,
            rb: rp + rtilde + bin_margin,
        })
    }
}

/// Sampling tables derived once from a channel and a non-causal decision.
#[derive(Debug, Clone)]
pub struct SchemeTables {
    sizes: [usize; 6], // s, u, xr, x, z, y
    z_table: Vec<usize>,
    p_u: WeightedIndex<f64>,
    xr_given_u: Vec<WeightedIndex<f64>>,
    z_given_xr_u_s: Vec<WeightedIndex<f64>>,
    x_given_z_xr_u_s: Vec<WeightedIndex<f64>>,
    output: Vec<WeightedIndex<f64>>,
    p_s: WeightedIndex<f64>,
    /// (S, U)
    pub covering_test: TypTable,
    /// (S, U, X_r, X, Z, Y)
    pub block_test: TypTable,
    /// (S, U, X_r, Y)
    pub lookahead_test: TypTable,
    pub bounds: SchemeBounds,
}

fn weighted(row: &[f64], what: &str) -> Result<WeightedIndex<f64>> {
    WeightedIndex::new(row).map_err(|e| Error::InvalidProbability(format!("{what}: {e}")))
}

/// Rows of p(target | given...) from a dense table ordered (given..., target);
/// rows of zero mass take `fallback(row index)`.
fn conditional_rows(
    t: &TypTable,
    what: &str,
    fallback: impl Fn(usize) -> Vec<f64>,
) -> Result<Vec<WeightedIndex<f64>>> {
    let k = *t.sizes.last().expect("nonempty");
    t.probs
        .chunks(k)
        .enumerate()
        .map(|(r, row)| {
            let mass: f64 = row.iter().sum();
            if mass > 0.0 {
                weighted(row, what)
            } else {
                weighted(&fallback(r), what)
            }
        })
        .collect()
}

impl SchemeTables {
    pub fn new(spec: &SdRcSpec, d: &SdRcDecision) -> Result<Self> {
        if d.mode() != SdRcMode::NonCausal {
            return Err(Error::ModeMismatch("the bin-forward scheme needs a non-causal decision".into()));
        }
        let sz = spec.sizes();
        let nu = d.u_size();
        let sizes = [sz.s, nu, sz.xr, sz.x, sz.z, sz.y];
        if sizes.iter().any(|&a| a > 256) {
            return Err(Error::Domain("alphabets above 256 letters are not simulated".into()));
        }
        let j = assemble_sdrc(spec, d)?;
        use axis::{S, U, X, XR, Y, Z};
        let p_u = TypTable::from_joint(&j, &[U])?;
        let xr_u = TypTable::from_joint(&j, &[U, XR])?;
        let z_rows = TypTable::from_joint(&j, &[XR, U, S, Z])?;
        let x_rows = TypTable::from_joint(&j, &[Z, XR, U, S, X])?;
        // rows never reached under the decision still need a law that keeps
        // the relay's observation equal to the z-codeword
        let reachable_z = |xr: usize, s: usize| -> Vec<f64> {
            let mut w = vec![0.0; sz.z];
            for x in 0..sz.x {
                w[spec.z(x, xr, s)] = 1.0;
            }
            w
        };
        let xr_given_u = conditional_rows(&xr_u, "p(x_r|u)", |_| vec![1.0; sz.xr])?;
        let z_given_xr_u_s = conditional_rows(&z_rows, "p(z|x_r,u,s)", |r| {
            let (xr, s) = (r / (nu * sz.s), r % sz.s);
            reachable_z(xr, s)
        })?;
        let x_given_z_xr_u_s = conditional_rows(&x_rows, "p(x|z,x_r,u,s)", |r| {
            let s = r % sz.s;
            let xr = (r / (nu * sz.s)) % sz.xr;
            let z = r / (nu * sz.s * sz.xr);
            let mut w: Vec<f64> = (0..sz.x).map(|x| if spec.z(x, xr, s) == z { 1.0 } else { 0.0 }).collect();
            if w.iter().all(|&v| v == 0.0) {
                w = vec![1.0; sz.x];
            }
            w
        })?;
        let mut output = Vec::with_capacity(sz.x * sz.xr * sz.z * sz.s);
        for x in 0..sz.x {
            for xr in 0..sz.xr {
                for z in 0..sz.z {
                    for s in 0..sz.s {
                        output.push(weighted(spec.output_row(x, xr, z, s), "p(y|x,x_r,z,s)")?);
                    }
                }
            }
        }
        Ok(SchemeTables {
            sizes,
            z_table: spec.z_table().to_vec(),
            p_u: weighted(&p_u.probs, "p(u)")?,
            xr_given_u,
            z_given_xr_u_s,
            x_given_z_xr_u_s,
            output,
            p_s: weighted(spec.p_s().kernel(), "p(s)")?,
            covering_test: TypTable::from_joint(&j, &[S, U])?,
            block_test: TypTable::from_joint(&j, &[S, U, XR, X, Z, Y])?,
            lookahead_test: TypTable::from_joint(&j, &[S, U, XR, Y])?,
            bounds: SchemeBounds::of_joint(&j)?,
        })
    }

    fn z_of(&self, x: u8, xr: u8, s: u8) -> u8 {
        let [ns, _, nxr, ..] = self.sizes;
        self.z_table[(x as usize * nxr + xr as usize) * ns + s as usize] as u8
    }

    /// Draws a state block.
    pub fn draw_states(&self, n: usize, rng: &mut impl Rng) -> Vec<u8> {
        (0..n).map(|_| self.p_s.sample(rng) as u8).collect()
    }

    /// Passes one block through the channel; returns (z observed by the
    /// relay, y).
    pub fn transmit(&self, x: &[u8], xr: &[u8], s: &[u8], rng: &mut impl Rng) -> (Vec<u8>, Vec<u8>) {
        let [ns, _, nxr, _, nz, _] = self.sizes;
        let mut z = Vec::with_capacity(x.len());
        let mut y = Vec::with_capacity(x.len());
        for i in 0..x.len() {
            let zi = self.z_of(x[i], xr[i], s[i]);
            let row = ((x[i] as usize * nxr + xr[i] as usize) * nz + zi as usize) * ns + s[i] as usize;
            z.push(zi);
            y.push(self.output[row].sample(rng) as u8);
        }
        (z, y)
    }
}

/// Index-set sizes of one block-codebook.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CodebookSizes {
    /// ⌈2^{nR'}⌉
    pub m1: u64,
    /// ⌈2^{nR''}⌉
    pub m2: u64,
    /// ⌈2^{nR̃}⌉
    pub k: u64,
    /// ⌈2^{nR_B}⌉ bins, one u-codeword each
    pub l: u64,
}

impl CodebookSizes {
    pub fn new(n: usize, rates: &Rates) -> Result<Self> {
        for (name, r) in [("Rp", rates.rp), ("Rpp", rates.rpp), ("Rtilde", rates.rtilde), ("Rb", rates.rb)] {
            if !(r >= 0.0) || !r.is_finite() {
                return Err(Error::Domain(format!("rate {name} = {r} must be nonnegative")));
            }
        }
        if !(rates.rb > 0.0) {
            return Err(Error::Domain("bin rate Rb must be positive".into()));
        }
        let s = CodebookSizes {
            m1: index_count(n, rates.rp, MAX_BLOCK_WORK)?,
            m2: index_count(n, rates.rpp, MAX_BLOCK_WORK)?,
            k: index_count(n, rates.rtilde, MAX_BLOCK_WORK)?,
            l: index_count(n, rates.rb, 1 << 40)?,
        };
        let work = s.m1 as f64 * (s.k as f64 + s.m2 as f64);
        if work > MAX_BLOCK_WORK as f64 {
            return Err(Error::Budget {
                what: "candidates per block".into(),
                required: work,
                limit: MAX_BLOCK_WORK as f64,
            });
        }
        Ok(s)
    }
}

/// The lazily generated codebook of one block.
#[derive(Debug, Clone)]
pub struct BlockCodebook<'a> {
    tables: &'a SchemeTables,
    pub n: usize,
    pub block: usize,
    pub sizes: CodebookSizes,
    pub bins: BinMap,
    key: u64,
}

impl<'a> BlockCodebook<'a> {
    pub fn new(tables: &'a SchemeTables, n: usize, rates: &Rates, block: usize, seed: u64) -> Result<Self> {
        if n == 0 || n > MAX_BLOCKLENGTH {
            return Err(Error::Budget {
                what: "blocklength".into(),
                required: n as f64,
                limit: MAX_BLOCKLENGTH as f64,
            });
        }
        let sizes = CodebookSizes::new(n, rates)?;
        let key = key(&[seed, block as u64]);
        Ok(BlockCodebook {
            tables,
            n,
            block,
            sizes,
            bins: BinMap::new(n, rates.rb, key)?,
            key,
        })
    }

    fn rng(&self, parts: &[u64]) -> ChaCha8Rng {
        let mut all = vec![self.key];
        all.extend_from_slice(parts);
        ChaCha8Rng::seed_from_u64(key(&all))
    }

    pub fn u(&self, l: u64) -> Vec<u8> {
        let mut rng = self.rng(&[ROLE_U, l]);
        (0..self.n).map(|_| self.tables.p_u.sample(&mut rng) as u8).collect()
    }

    pub fn xr(&self, u: &[u8]) -> Vec<u8> {
        let mut rng = self.rng(&[ROLE_XR, sequence_key(0, u)]);
        u.iter()
            .map(|&ui| self.tables.xr_given_u[ui as usize].sample(&mut rng) as u8)
            .collect()
    }

    pub fn z(&self, m1: u64, k: u64, xr: &[u8], u: &[u8], s: &[u8]) -> Vec<u8> {
        let [ns, nu, ..] = self.tables.sizes;
        let mut rng = self.rng(&[ROLE_Z, m1, k, sequence_key(1, xr), sequence_key(2, u), sequence_key(3, s)]);
        (0..self.n)
            .map(|i| {
                let row = (xr[i] as usize * nu + u[i] as usize) * ns + s[i] as usize;
                self.tables.z_given_xr_u_s[row].sample(&mut rng) as u8
            })
            .collect()
    }

    pub fn x(&self, m2: u64, z: &[u8], xr: &[u8], u: &[u8], s: &[u8]) -> Vec<u8> {
        let [ns, nu, nxr, ..] = self.tables.sizes;
        let mut rng = self.rng(&[
            ROLE_X,
            m2,
            sequence_key(4, z),
            sequence_key(1, xr),
            sequence_key(2, u),
            sequence_key(3, s),
        ]);
        (0..self.n)
            .map(|i| {
                let row = ((z[i] as usize * nxr + xr[i] as usize) * nu + u[i] as usize) * ns + s[i] as usize;
                self.tables.x_given_z_xr_u_s[row].sample(&mut rng) as u8
            })
            .collect()
    }

    pub fn bin(&self, z: &[u8]) -> u64 {
        self.bins.bin(z)
    }

    /// The uniformly drawn k used when covering fails. It is part of the
    /// codebook so the decoder can reproduce it.
    pub fn fallback_k(&self, m1: u64, l_prev: u64, s_cur: &[u8], s_next: &[u8]) -> u64 {
        let h = key(&[self.key, ROLE_FALLBACK, m1, l_prev, sequence_key(3, s_cur), sequence_key(5, s_next)]);
        reduce(h, self.sizes.k)
    }
}

/// What the encoder sends in one block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoded {
    pub k: u64,
    /// Bin of the z-codeword: the cooperation index for the next block.
    pub l_new: u64,
    /// False when no k was typical and the fallback k was used.
    pub covered: bool,
    pub u: Vec<u8>,
    pub xr: Vec<u8>,
    pub z: Vec<u8>,
    pub x: Vec<u8>,
}

/// Indirect covering step: first k whose z-codeword's bin points to a
/// u-codeword of the next block typical with the next state block.
pub fn find_k(
    cb: &BlockCodebook,
    next: &BlockCodebook,
    m1: u64,
    l_prev: u64,
    ctx: (&[u8], &[u8], &[u8]),
    s_next: &[u8],
    eps: f64,
) -> (u64, bool) {
    let (xr, u, s_cur) = ctx;
    for k in 0..cb.sizes.k {
        let z = cb.z(m1, k, xr, u, s_cur);
        let un = next.u(cb.bin(&z));
        if cb.tables.covering_test.typical(&[s_next, &un], eps) {
            return (k, true);
        }
    }
    (cb.fallback_k(m1, l_prev, s_cur, s_next), false)
}

/// Encodes one block. `next` is the following block's codebook together
/// with its state; `None` in the last block, where k is fixed.
#[allow(clippy::too_many_arguments)]
pub fn encode_block(
    cb: &BlockCodebook,
    next: Option<(&BlockCodebook, &[u8])>,
    m1: u64,
    m2: u64,
    l_prev: u64,
    s_cur: &[u8],
    eps: f64,
) -> Encoded {
    let u = cb.u(l_prev);
    let xr = cb.xr(&u);
    let (k, covered) = match next {
        Some((nb, s_next)) => find_k(cb, nb, m1, l_prev, (&xr, &u, s_cur), s_next, eps),
        None => (0, true),
    };
    let z = cb.z(m1, k, &xr, &u, s_cur);
    let x = cb.x(m2, &z, &xr, &u, s_cur);
    Encoded {
        k,
        l_new: cb.bin(&z),
        covered,
        u,
        xr,
        z,
        x,
    }
}

/// Relay transmission for a block given its cooperation index.
pub fn relay_step(cb: &BlockCodebook, l_prev: u64) -> Vec<u8> {
    cb.xr(&cb.u(l_prev))
}

/// Relay's cooperation index for the next block from its observation.
pub fn relay_update(cb: &BlockCodebook, z_observed: &[u8]) -> u64 {
    cb.bin(z_observed)
}

/// Outcome of decoding one block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDecision {
    /// The unique passing pair, if any.
    pub decoded: Option<(u64, u64)>,
    /// Number of pairs passing both tests.
    pub passing: u64,
    /// Cooperation index carried forward.
    pub l_hat: u64,
    /// Whether the given pair passed both tests (when one was supplied).
    pub reference_passed: Option<bool>,
    /// Whether any pair other than the reference passed.
    pub other_passed: bool,
}

/// Decoder inputs for one block.
pub struct DecodeInput<'s> {
    pub s_cur: &'s [u8],
    pub s_next: &'s [u8],
    pub y_cur: &'s [u8],
    pub y_next: &'s [u8],
}

/// One sliding-window step: imitate the encoder for every m' to get
/// (k̂, l̂), then search every (m', m'') for the current-block test and the
/// next-block test.
pub fn decode_block(
    cb: &BlockCodebook,
    next: &BlockCodebook,
    l_prev: u64,
    io: &DecodeInput,
    eps: f64,
    reference: Option<(u64, u64)>,
) -> BlockDecision {
    let t = cb.tables;
    let u = cb.u(l_prev);
    let xr = cb.xr(&u);
    let mut passing = 0u64;
    let mut first: Option<(u64, u64, u64)> = None;
    let mut reference_passed = reference.map(|_| false);
    let mut other_passed = false;
    let mut l_of_zero = None;
    for m1 in 0..cb.sizes.m1 {
        let (k, _) = find_k(cb, next, m1, l_prev, (&xr, &u, io.s_cur), io.s_next, eps);
        let z = cb.z(m1, k, &xr, &u, io.s_cur);
        let l_hat = cb.bin(&z);
        if m1 == 0 {
            l_of_zero = Some(l_hat);
        }
        let un = next.u(l_hat);
        let xrn = next.xr(&un);
        if !t.lookahead_test.typical(&[io.s_next, &un, &xrn, io.y_next], eps) {
            continue;
        }
        for m2 in 0..cb.sizes.m2 {
            let x = cb.x(m2, &z, &xr, &u, io.s_cur);
            if t.block_test.typical(&[io.s_cur, &u, &xr, &x, &z, io.y_cur], eps) {
                passing += 1;
                if first.is_none() {
                    first = Some((m1, m2, l_hat));
                }
                if reference == Some((m1, m2)) {
                    reference_passed = Some(true);
                } else {
                    other_passed = true;
                }
            }
        }
    }
    let l_hat = first.map(|f| f.2).or(l_of_zero).unwrap_or(0);
    BlockDecision {
        decoded: (passing == 1).then(|| first.map(|f| (f.0, f.1))).flatten(),
        passing,
        l_hat,
        reference_passed,
        other_passed,
    }
}

/// Decodes blocks 2..B−1 (0-based 1..=B−2) of one transmission.
pub fn sliding_window_decode(
    cbs: &[BlockCodebook],
    y_blocks: &[Vec<u8>],
    s_blocks: &[Vec<u8>],
    eps: f64,
) -> Vec<BlockDecision> {
    let b_total = cbs.len();
    if b_total < 3 {
        return Vec::new();
    }
    // the first block carries the fixed messages, so its index is known
    let (mut l_prev, _) = {
        let u = cbs[0].u(0);
        let xr = cbs[0].xr(&u);
        let (k, c) = find_k(&cbs[0], &cbs[1], 0, 0, (&xr, &u, &s_blocks[0]), &s_blocks[1], eps);
        (cbs[0].bin(&cbs[0].z(0, k, &xr, &u, &s_blocks[0])), c)
    };
    let mut out = Vec::with_capacity(b_total - 2);
    for b in 1..b_total - 1 {
        let io = DecodeInput {
            s_cur: &s_blocks[b],
            s_next: &s_blocks[b + 1],
            y_cur: &y_blocks[b],
            y_next: &y_blocks[b + 1],
        };
        let d = decode_block(&cbs[b], &cbs[b + 1], l_prev, &io, eps, None);
        l_prev = d.l_hat;
        out.push(d);
    }
    out
}

/// Outcome statistics of a simulation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub n: usize,
    pub blocks: usize,
    pub trials: usize,
    pub rates: Rates,
    pub eps: f64,
    pub sizes: CodebookSizes,
    /// Message-bearing blocks per trial times trials.
    pub message_blocks: usize,
    pub block_errors: usize,
    /// Errors per message-bearing block position (blocks 2..B−1).
    pub per_block_errors: Vec<usize>,
    /// `None` (undefined) when no blocks were simulated.
    pub error_rate: Option<f64>,
    /// Trials with at least one block error.
    pub trial_errors: usize,
    /// No typical k found (the fallback k was used).
    pub covering_failures: usize,
    /// Another m' reaches the transmitted bin with some k.
    pub bin_collisions: usize,
    /// The transmitted pair fails a decoding test.
    pub true_pair_rejected: usize,
    /// Some other pair passes both decoding tests.
    pub wrong_pair_accepted: usize,
    /// Decoder's cooperation index differs from the encoder's.
    pub index_errors: usize,
    /// Relay and encoder disagree on the cooperation index; always 0 for a
    /// deterministic link.
    pub relay_disagreements: usize,
}

#[derive(Debug, Default, Clone)]
struct TrialCounts {
    per_block: Vec<usize>,
    covering: usize,
    collisions: usize,
    rejected: usize,
    accepted: usize,
    index: usize,
    disagree: usize,
}

fn run_trial(tables: &SchemeTables, n: usize, blocks: usize, rates: &Rates, eps: f64, seed: u64, t: usize) -> Result<TrialCounts> {
    let trial_key = key(&[seed, t as u64]);
    let mut rng = ChaCha8Rng::seed_from_u64(trial_key);
    let cbs: Vec<BlockCodebook> = (0..blocks)
        .map(|b| BlockCodebook::new(tables, n, rates, b, trial_key))
        .collect::<Result<_>>()?;
    let sizes = cbs[0].sizes;
    let s: Vec<Vec<u8>> = (0..blocks).map(|_| tables.draw_states(n, &mut rng)).collect();
    let msgs: Vec<(u64, u64)> = (0..blocks)
        .map(|b| {
            if b == 0 || b == blocks - 1 {
                (0, 0)
            } else {
                (rng.random_range(0..sizes.m1), rng.random_range(0..sizes.m2))
            }
        })
        .collect();
    let mut counts = TrialCounts {
        per_block: vec![0; blocks - 2],
        ..TrialCounts::default()
    };
    let mut l_enc = Vec::with_capacity(blocks);
    let mut y = Vec::with_capacity(blocks);
    let (mut l_prev, mut l_relay) = (0u64, 0u64);
    for b in 0..blocks {
        let next = (b + 1 < blocks).then(|| (&cbs[b + 1], s[b + 1].as_slice()));
        let enc = encode_block(&cbs[b], next, msgs[b].0, msgs[b].1, l_prev, &s[b], eps);
        if next.is_some() && !enc.covered {
            counts.covering += 1;
        }
        let xr = relay_step(&cbs[b], l_relay);
        let (z_obs, yb) = tables.transmit(&enc.x, &xr, &s[b], &mut rng);
        l_relay = relay_update(&cbs[b], &z_obs);
        if l_relay != enc.l_new {
            counts.disagree += 1;
        }
        if b >= 1 && b + 1 < blocks {
            let cb = &cbs[b];
            let hit = (0..sizes.m1).filter(|&m| m != msgs[b].0).any(|m| {
                (0..sizes.k).any(|k| cb.bin(&cb.z(m, k, &enc.xr, &enc.u, &s[b])) == enc.l_new)
            });
            if hit {
                counts.collisions += 1;
            }
        }
        l_prev = enc.l_new;
        l_enc.push(enc.l_new);
        y.push(yb);
    }
    // decoder, with the transmitted pair as reference for the diagnostics
    let mut l_hat = {
        let u = cbs[0].u(0);
        let xr = cbs[0].xr(&u);
        let (k, _) = find_k(&cbs[0], &cbs[1], 0, 0, (&xr, &u, &s[0]), &s[1], eps);
        cbs[0].bin(&cbs[0].z(0, k, &xr, &u, &s[0]))
    };
    for b in 1..blocks - 1 {
        let io = DecodeInput {
            s_cur: &s[b],
            s_next: &s[b + 1],
            y_cur: &y[b],
            y_next: &y[b + 1],
        };
        let d = decode_block(&cbs[b], &cbs[b + 1], l_hat, &io, eps, Some(msgs[b]));
        if d.decoded != Some(msgs[b]) {
            counts.per_block[b - 1] += 1;
        }
        if d.reference_passed == Some(false) {
            counts.rejected += 1;
        }
        if d.other_passed {
            counts.accepted += 1;
        }
        if d.l_hat != l_enc[b] {
            counts.index += 1;
        }
        l_hat = d.l_hat;
    }
    Ok(counts)
}

/// Full pipeline: states, encoder, relay, channel and sliding-window decoder
/// for `trials` independent transmissions of `blocks` blocks.
#[allow(clippy::too_many_arguments)]
pub fn simulate_sdrc(
    spec: &SdRcSpec,
    d: &SdRcDecision,
    n: usize,
    blocks: usize,
    rates: &Rates,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<SimReport> {
    check_eps(eps)?;
    if blocks < 3 {
        return Err(Error::Domain(format!("need at least 3 blocks, got {blocks}")));
    }
    let tables = SchemeTables::new(spec, d)?;
    // validates sizes and the budget before any work
    let sizes = BlockCodebook::new(&tables, n, rates, 0, seed)?.sizes;
    let results: Vec<TrialCounts> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(&tables, n, blocks, rates, eps, seed, t))
        .collect::<Result<_>>()?;
    let mut per_block = vec![0usize; blocks - 2];
    let mut rep = SimReport {
        n,
        blocks,
        trials,
        rates: *rates,
        eps,
        sizes,
        message_blocks: trials * (blocks - 2),
        block_errors: 0,
        per_block_errors: Vec::new(),
        error_rate: None,
        trial_errors: 0,
        covering_failures: 0,
        bin_collisions: 0,
        true_pair_rejected: 0,
        wrong_pair_accepted: 0,
        index_errors: 0,
        relay_disagreements: 0,
    };
    for c in &results {
        for (acc, v) in per_block.iter_mut().zip(&c.per_block) {
            *acc += v;
        }
        let e: usize = c.per_block.iter().sum();
        rep.block_errors += e;
        rep.trial_errors += usize::from(e > 0);
        rep.covering_failures += c.covering;
        rep.bin_collisions += c.collisions;
        rep.true_pair_rejected += c.rejected;
        rep.wrong_pair_accepted += c.accepted;
        rep.index_errors += c.index;
        rep.relay_disagreements += c.disagree;
    }
    rep.per_block_errors = per_block;
    if rep.message_blocks > 0 {
        rep.error_rate = Some(rep.block_errors as f64 / rep.message_blocks as f64);
    }
    Ok(rep)
}
