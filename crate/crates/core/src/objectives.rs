//! Capacity expressions and rate bounds evaluated for a fixed decision.

use serde::Serialize;

use crate::channel::{
    assemble_mac, assemble_ptp_se, assemble_sdrc, axis, ConferencingDecision, MacDecision,
    MacSpec, PtpSeDecision, PtpSeSpec, SdRcDecision, SdRcSpec,
};
use crate::error::{Error, Result};
use crate::prob::{compose, hb, Alphabet, CondPmf, Factor, Joint};

use axis::{S, S1, S2, U, X, X1, X1C, X2, XR, Y, Z};

/// Slack at or above this value counts as feasible.
pub const FEASIBILITY_TOL: f64 = -1e-9;

/// The two branches of the relay-channel max–min and the binning slack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SdRcValue {
    /// I(X,X_r;Y|S)
    pub rate_bound_1: f64,
    /// I(X;Y|X_r,Z,S,U) + H(Z|X_r,S,U) − I(U;S)
    pub rate_bound_2: f64,
    pub value: f64,
    /// H(Z|X_r,S,U) − I(U;S); +∞ when there is no constraint.
    pub slack: f64,
    pub feasible: bool,
}

impl SdRcValue {
    fn new(rate_bound_1: f64, rate_bound_2: f64, slack: f64) -> Self {
        SdRcValue {
            rate_bound_1,
            rate_bound_2,
            value: rate_bound_1.min(rate_bound_2),
            slack,
            feasible: slack >= FEASIBILITY_TOL,
        }
    }
}

/// Non-causal relay-channel objective on the assembled joint.
pub fn sdrc_value(spec: &SdRcSpec, d: &SdRcDecision) -> Result<SdRcValue> {
    sdrc_value_of_joint(&assemble_sdrc(spec, d)?)
}

/// Same as [`sdrc_value`] for a joint over (S, U, X_r, X, Z, Y).
pub fn sdrc_value_of_joint(j: &Joint) -> Result<SdRcValue> {
    let rb1 = j.mutual_information(&[X, XR], &[Y], &[S])?;
    let ius = j.mutual_information(&[U], &[S], &[])?;
    let hz = j.entropy(&[Z], &[XR, S, U])?;
    let ix = j.mutual_information(&[X], &[Y], &[XR, Z, S, U])?;
    Ok(SdRcValue::new(rb1, ix + hz - ius, hz - ius))
}

/// Causal-CSI objective: min{I(X,X_r;Y|S), I(X;Y|X_r,Z,S) + H(Z|X_r,S)}
/// over p(x_r) p(x|x_r,s), computed on a joint without U.
pub fn sdrc_causal_value(spec: &SdRcSpec, d: &SdRcDecision) -> Result<SdRcValue> {
    d.validate(spec)?;
    let SdRcDecision::Causal {
        p_xr,
        p_x_given_xr_s,
    } = d
    else {
        return Err(Error::ModeMismatch("causal evaluator needs a causal decision".into()));
    };
    let j = compose([
        Factor::from(spec.p_s()),
        p_xr.into(),
        p_x_given_xr_s.into(),
        spec.z_link().into(),
        spec.kernel().into(),
    ])?;
    let rb1 = j.mutual_information(&[X, XR], &[Y], &[S])?;
    let rb2 = j.mutual_information(&[X], &[Y], &[XR, Z, S])? + j.entropy(&[Z], &[XR, S])?;
    Ok(SdRcValue::new(rb1, rb2, f64::INFINITY))
}

/// State-free relay channel: min{I(X,X_r;Y), I(X;Y|X_r,Z) + H(Z|X_r)} over
/// p(x_r, x). The spec must have a singleton state.
pub fn sdrc_nostate_value(spec: &SdRcSpec, d: &SdRcDecision) -> Result<SdRcValue> {
    d.validate(spec)?;
    if spec.sizes().s != 1 {
        return Err(Error::Domain(format!(
            "state-free evaluator needs |S| = 1, found {}",
            spec.sizes().s
        )));
    }
    let SdRcDecision::NoState { p_xr_x } = d else {
        return Err(Error::ModeMismatch("state-free evaluator needs p(x_r, x)".into()));
    };
    let j = compose([
        Factor::from(spec.p_s()),
        p_xr_x.into(),
        spec.z_link().into(),
        spec.kernel().into(),
    ])?;
    let rb1 = j.mutual_information(&[X, XR], &[Y], &[])?;
    let rb2 = j.mutual_information(&[X], &[Y], &[XR, Z])? + j.entropy(&[Z], &[XR])?;
    Ok(SdRcValue::new(rb1, rb2, f64::INFINITY))
}

/// Both sides of I(Z,X;Y|X_r,U,S) + I(X_r,U;Y|S) = I(X,X_r;Y|S).
pub fn decomposition_identity(j: &Joint) -> Result<(f64, f64)> {
    let lhs = j.mutual_information(&[Z, X], &[Y], &[XR, U, S])?
        + j.mutual_information(&[XR, U], &[Y], &[S])?;
    let rhs = j.mutual_information(&[X, XR], &[Y], &[S])?;
    Ok((lhs, rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePoint {
    pub r1: f64,
    pub r2: f64,
}

/// The four bounds of the cribbing-MAC region for one decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MacRateBounds {
    /// I(X1;Y|X2,Z,S1,S2,U) + H(Z|S1,U) − I(U;S1|S2)
    pub b_r1: f64,
    /// I(X2;Y|X1,S1,S2,U)
    pub b_r2: f64,
    /// I(X1,X2;Y|Z,S1,S2,U) + H(Z|S1,U) − I(U;S1|S2)
    pub b_sum_a: f64,
    /// I(X1,X2;Y|S1,S2)
    pub b_sum_b: f64,
    /// H(Z|S1,U) − I(U;S1|S2)
    pub slack: f64,
    pub feasible: bool,
}

impl MacRateBounds {
    pub fn sum_cap(&self) -> f64 {
        self.b_sum_a.min(self.b_sum_b)
    }

    pub fn max_r1(&self) -> f64 {
        self.b_r1.min(self.sum_cap()).max(0.0)
    }

    pub fn max_r2(&self) -> f64 {
        self.b_r2.min(self.sum_cap()).max(0.0)
    }

    /// Vertex of the region maximizing w1·r1 + w2·r2.
    pub fn support(&self, w1: f64, w2: f64) -> RatePoint {
        let cap = self.sum_cap().max(0.0);
        if w1 >= w2 {
            let r1 = self.max_r1();
            RatePoint {
                r1,
                r2: self.b_r2.min(cap - r1).max(0.0),
            }
        } else {
            let r2 = self.max_r2();
            RatePoint {
                r1: self.b_r1.min(cap - r2).max(0.0),
                r2,
            }
        }
    }

    pub fn support_value(&self, w1: f64, w2: f64) -> f64 {
        let p = self.support(w1, w2);
        w1 * p.r1 + w2 * p.r2
    }

    /// Linear pieces whose minimum equals [`MacRateBounds::support_value`]
    /// whenever all bounds are nonnegative; each piece is smooth in the
    /// decision, which is what a subgradient method needs.
    pub fn support_branches(&self, w1: f64, w2: f64) -> Vec<f64> {
        let (hi, lo, b_hi, b_lo) = if w1 >= w2 {
            (w1, w2, self.b_r1, self.b_r2)
        } else {
            (w2, w1, self.b_r2, self.b_r1)
        };
        let mut out = Vec::with_capacity(8);
        for c in [self.b_sum_a, self.b_sum_b] {
            out.push(hi * b_hi + lo * b_lo);
            out.push(hi * c + lo * b_lo);
            out.push((hi - lo) * b_hi + lo * c);
            out.push(hi * c);
        }
        out
    }
}

pub fn mac_bounds(spec: &MacSpec, d: &MacDecision) -> Result<MacRateBounds> {
    mac_bounds_of_joint(&assemble_mac(spec, d)?)
}

/// MAC bounds on a joint over (S1, S2, U, X1, X2, Z, Y).
pub fn mac_bounds_of_joint(j: &Joint) -> Result<MacRateBounds> {
    let hz = j.entropy(&[Z], &[S1, U])?;
    let ius = j.mutual_information(&[U], &[S1], &[S2])?;
    let slack = hz - ius;
    Ok(MacRateBounds {
        b_r1: j.mutual_information(&[X1], &[Y], &[X2, Z, S1, S2, U])? + slack,
        b_r2: j.mutual_information(&[X2], &[Y], &[X1, S1, S2, U])?,
        b_sum_a: j.mutual_information(&[X1, X2], &[Y], &[Z, S1, S2, U])? + slack,
        b_sum_b: j.mutual_information(&[X1, X2], &[Y], &[S1, S2])?,
        slack,
        feasible: slack >= FEASIBILITY_TOL,
    })
}

/// One-state region on a joint over (S, U, X1, X2, Z, Y):
/// R1 ≤ I(X1;Y|X2,Z,S,U) + H(Z|S,U) − I(U;S), R2 ≤ I(X2;Y|X1,S,U),
/// R1+R2 ≤ I(X1,X2;Y|Z,S,U) + H(Z|S,U) − I(U;S), R1+R2 ≤ I(X1,X2;Y|S).
pub fn one_state_mac_bounds(j: &Joint) -> Result<MacRateBounds> {
    let hz = j.entropy(&[Z], &[S, U])?;
    let ius = j.mutual_information(&[U], &[S], &[])?;
    let slack = hz - ius;
    Ok(MacRateBounds {
        b_r1: j.mutual_information(&[X1], &[Y], &[X2, Z, S, U])? + slack,
        b_r2: j.mutual_information(&[X2], &[Y], &[X1, S, U])?,
        b_sum_a: j.mutual_information(&[X1, X2], &[Y], &[Z, S, U])? + slack,
        b_sum_b: j.mutual_information(&[X1, X2], &[Y], &[S])?,
        slack,
        feasible: slack >= FEASIBILITY_TOL,
    })
}

/// Region of the MAC without cribbing, with U independent of the state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CaseABounds {
    /// I(X1;Y|S,U,X2)
    pub r1: f64,
    /// I(X2;Y|S,U,X1)
    pub r2: f64,
    /// I(X1,X2;Y|S,U)
    pub sum_u: f64,
    /// I(X1,X2;Y|S)
    pub sum: f64,
}

/// No-cribbing bounds on a joint over (S1, S2, U, X1, X2, ...), with S the
/// pair (S1, S2).
pub fn case_a_bounds(j: &Joint) -> Result<CaseABounds> {
    Ok(CaseABounds {
        r1: j.mutual_information(&[X1], &[Y], &[S1, S2, U, X2])?,
        r2: j.mutual_information(&[X2], &[Y], &[S1, S2, U, X1])?,
        sum_u: j.mutual_information(&[X1, X2], &[Y], &[S1, S2, U])?,
        sum: j.mutual_information(&[X1, X2], &[Y], &[S1, S2])?,
    })
}

/// Conferencing-MAC bounds with cooperation rate R12 = log2 |X1p|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConferencingBounds {
    /// I(X1c;Y|X2,U,S) + R12 − I(U;S)
    pub r1: f64,
    /// I(X2;Y|X1c,U,S)
    pub r2: f64,
    /// I(X1c,X2;Y|U,S) + R12 − I(U;S)
    pub sum_a: f64,
    /// I(X1c,X2;Y|S)
    pub sum_b: f64,
    /// R12 − I(U;S)
    pub slack: f64,
    pub r12: f64,
}

/// Evaluates the conferencing region for a spec built like
/// [`MacSpec::conferencing`]: X1 = (X1c, X1p), Z = X1p, output independent of
/// X1p, singleton S2.
pub fn conferencing_region_bounds(
    spec: &MacSpec,
    x1p: usize,
    d: &ConferencingDecision,
) -> Result<ConferencingBounds> {
    let sz = spec.sizes();
    let structure = |m: String| Err(Error::Domain(format!("structure mismatch: {m}")));
    if x1p == 0 || sz.x1 % x1p != 0 || sz.z != x1p || sz.s2 != 1 {
        return structure(format!(
            "|X1| = {}, |Z| = {}, |S2| = {} do not fit |X1p| = {x1p}",
            sz.x1, sz.z, sz.s2
        ));
    }
    let x1c = sz.x1 / x1p;
    for a1 in 0..sz.x1 {
        for s in 0..sz.s1 {
            if spec.z(a1, s) != a1 % x1p {
                return structure(format!("z({a1},{s}) is not the private part"));
            }
        }
    }
    let row = |a1: usize, a2: usize, s: usize| spec.kernel().row((a1 * sz.x2 + a2) * sz.s1 + s);
    let mut kernel_c = Vec::with_capacity(x1c * sz.x2 * sz.s1 * sz.y);
    for c in 0..x1c {
        for a2 in 0..sz.x2 {
            for s in 0..sz.s1 {
                let base = row(c * x1p, a2, s);
                for p in 1..x1p {
                    if row(c * x1p + p, a2, s) != base {
                        return structure("output kernel depends on the private part".into());
                    }
                }
                kernel_c.extend(base);
            }
        }
    }
    if d.x1c_size() != x1c {
        return Err(Error::AlphabetMismatch(format!(
            "decision has |X1c| = {}, spec has {x1c}",
            d.x1c_size()
        )));
    }
    let s_axis = Alphabet::new(S1, sz.s1);
    let p_s = CondPmf::unconditional(s_axis.clone(), spec.p_state().kernel().to_vec())?;
    d.p_u_x1c_given_s.check_signature(
        &[Alphabet::new(U, d.u_size()), Alphabet::new(X1C, x1c)],
        &[s_axis.clone()],
    )?;
    let kernel = CondPmf::new(
        vec![Alphabet::new(Y, sz.y)],
        vec![
            Alphabet::new(X1C, x1c),
            Alphabet::new(X2, sz.x2),
            s_axis,
        ],
        kernel_c,
    )?;
    let j = compose([
        Factor::from(&p_s),
        (&d.p_u_x1c_given_s).into(),
        (&d.p_x2_given_u).into(),
        (&kernel).into(),
    ])?;
    let r12 = (x1p as f64).log2();
    let ius = j.mutual_information(&[U], &[S1], &[])?;
    Ok(ConferencingBounds {
        r1: j.mutual_information(&[X1C], &[Y], &[X2, U, S1])? + r12 - ius,
        r2: j.mutual_information(&[X2], &[Y], &[X1C, U, S1])?,
        sum_a: j.mutual_information(&[X1C, X2], &[Y], &[U, S1])? + r12 - ius,
        sum_b: j.mutual_information(&[X1C, X2], &[Y], &[S1])?,
        slack: r12 - ius,
        r12,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PtpSeValue {
    /// I(X2;Y|U,S)
    pub value: f64,
    /// log2 |X1| − I(U;S)
    pub constraint_slack: f64,
    pub feasible: bool,
}

pub fn ptp_se_noncausal(spec: &PtpSeSpec, d: &PtpSeDecision) -> Result<PtpSeValue> {
    let j = assemble_ptp_se(spec, d)?;
    let value = j.mutual_information(&[X2], &[Y], &[U, S])?;
    let slack = spec.budget() - j.mutual_information(&[U], &[S], &[])?;
    Ok(PtpSeValue {
        value,
        constraint_slack: slack,
        feasible: slack >= FEASIBILITY_TOL,
    })
}

/// I(X2;Y|S,X1) with X1 = f(S) and the given p(x2|x1) (rows `x1`).
pub fn ptp_se_causal(spec: &PtpSeSpec, f: &[usize], p_x2_given_x1: &[f64]) -> Result<f64> {
    let ns = spec.s_size();
    if f.len() != ns {
        return Err(Error::Shape(format!("state map has {} entries, |S| = {ns}", f.len())));
    }
    let x1 = Alphabet::new(X1, spec.x1_size());
    let s = Alphabet::new(S, ns);
    let map = CondPmf::deterministic(x1.clone(), vec![s], |v| f[v[0]])?;
    let p2 = CondPmf::new(vec![Alphabet::new(X2, spec.x2_size())], vec![x1], p_x2_given_x1.to_vec())?;
    let j = compose([
        Factor::from(spec.p_s()),
        (&map).into(),
        (&p2).into(),
        spec.kernel().into(),
    ])?;
    j.mutual_information(&[X2], &[Y], &[S, X1])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CausalOptimum {
    pub value: f64,
    pub map: Vec<usize>,
    pub p_x2_given_x1: Vec<f64>,
}

/// Exhaustive search over every map S → X1, with each row of p(x2|x1) swept
/// over a simplex grid of resolution 1/`levels` (binary rows are then refined
/// by golden section). Rows are coupled only through the map, so one sweep
/// per row followed by a confirming sweep reaches the grid optimum.
pub fn ptp_se_causal_max(spec: &PtpSeSpec, levels: usize) -> Result<CausalOptimum> {
    if levels == 0 {
        return Err(Error::Domain("grid needs at least one level".into()));
    }
    let (ns, n1, n2) = (spec.s_size(), spec.x1_size(), spec.x2_size());
    let maps = (n1 as f64).powi(ns as i32);
    if maps > 1e6 {
        return Err(Error::Budget {
            what: "state maps".into(),
            required: maps,
            limit: 1e6,
        });
    }
    let row_grid = simplex_grid(n2, levels);
    let mut best: Option<CausalOptimum> = None;
    let mut f = vec![0usize; ns];
    loop {
        let mut p = vec![1.0 / n2 as f64; n1 * n2];
        let mut current = ptp_se_causal(spec, &f, &p)?;
        for _ in 0..2 {
            for r in 0..n1 {
                for point in &row_grid {
                    let saved: Vec<f64> = p[r * n2..(r + 1) * n2].to_vec();
                    p[r * n2..(r + 1) * n2].copy_from_slice(point);
                    let v = ptp_se_causal(spec, &f, &p)?;
                    if v > current {
                        current = v;
                    } else {
                        p[r * n2..(r + 1) * n2].copy_from_slice(&saved);
                    }
                }
                if n2 == 2 {
                    let b0 = p[r * 2 + 1];
                    let h = 1.0 / levels as f64;
                    let eval = |b: f64| {
                        let mut q = p.clone();
                        q[r * 2] = 1.0 - b;
                        q[r * 2 + 1] = b;
                        ptp_se_causal(spec, &f, &q).unwrap_or(f64::NEG_INFINITY)
                    };
                    let b = golden_max(eval, (b0 - h).max(0.0), (b0 + h).min(1.0), 1e-10);
                    let v = eval(b);
                    if v > current {
                        current = v;
                        p[r * 2] = 1.0 - b;
                        p[r * 2 + 1] = b;
                    }
                }
            }
        }
        if best.as_ref().is_none_or(|b| current > b.value) {
            best = Some(CausalOptimum {
                value: current,
                map: f.clone(),
                p_x2_given_x1: p,
            });
        }
        // next map in lexicographic order
        let mut i = ns;
        loop {
            if i == 0 {
                return Ok(best.expect("at least one map"));
            }
            i -= 1;
            f[i] += 1;
            if f[i] < n1 {
                break;
            }
            f[i] = 0;
        }
    }
}

/// All points of the probability simplex of dimension `k` with coordinates
/// in multiples of 1/levels.
pub fn simplex_grid(k: usize, levels: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut parts = vec![0usize; k];
    fn rec(i: usize, left: usize, parts: &mut Vec<usize>, levels: usize, out: &mut Vec<Vec<f64>>) {
        if i + 1 == parts.len() {
            parts[i] = left;
            out.push(parts.iter().map(|&c| c as f64 / levels as f64).collect());
            return;
        }
        for c in 0..=left {
            parts[i] = c;
            rec(i + 1, left - c, parts, levels, out);
        }
    }
    if k > 0 {
        rec(0, levels, &mut parts, levels, &mut out);
    }
    out
}

/// Golden-section search for the maximizer of a unimodal function on [a, b].
pub fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

/// Capacity of the Z-channel whose input 1 flips to 0 with probability
/// `alpha`: H_b(2^h / (1 + 2^h)) − h / (1 + 2^h) with h = H_b(α)/(1 − α),
/// and 0 for the stuck channel α = 1.
pub fn z_channel_capacity(alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha = {alpha} is not a probability")));
    }
    if alpha == 1.0 {
        return Ok(0.0);
    }
    let h = hb(alpha) / (1.0 - alpha);
    let t = 2f64.powf(h);
    Ok(hb(t / (1.0 + t)) - h / (1.0 + t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedForm {
    pub c_nc: f64,
    pub c_c: f64,
    pub c_nocsi: f64,
    /// Maximizing β of the causal expression.
    pub beta: f64,
}

/// Closed forms for [`crate::channel::example_channel`]: non-causal, causal
/// and no-CSI capacities with a one-bit state encoder.
pub fn closed_form_example(alpha: f64, p: f64) -> Result<ClosedForm> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha = {alpha} is not a probability")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("p = {p} must lie in (0, 1)")));
    }
    let cz = z_channel_capacity(alpha)?;
    let c_nc = p / 2.0 * (cz + cz) + (1.0 - p);
    let ha = hb(alpha);
    let causal = |beta: f64| {
        p / 2.0 * cz
            + p / 2.0 * (hb(beta + (1.0 - beta) * alpha) - (1.0 - beta) * ha)
            + (1.0 - p) * hb(beta)
    };
    let grid = 1000;
    let mut beta = 0.0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=grid {
        let b = i as f64 / grid as f64;
        let v = causal(b);
        if v > best {
            best = v;
            beta = b;
        }
    }
    let h = 1.0 / grid as f64;
    let refined = golden_max(causal, (beta - h).max(0.0), (beta + h).min(1.0), 1e-10);
    if causal(refined) > best {
        beta = refined;
        best = causal(refined);
    }
    let c_nocsi = p * (hb((1.0 + alpha) / 2.0) - 0.5 * ha) + (1.0 - p);
    Ok(ClosedForm {
        c_nc,
        c_c: best,
        c_nocsi,
        beta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{example_channel, SdRcAlphabets};

    #[test]
    fn z_channel_known_points() {
        assert!((z_channel_capacity(0.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(z_channel_capacity(1.0).unwrap(), 0.0);
        // log2(5/4): the Z-channel with crossover 1/2
        assert!((z_channel_capacity(0.5).unwrap() - (1.25f64).log2()).abs() < 1e-12);
        assert!(z_channel_capacity(1.0 - 1e-12).unwrap() < 1e-9);
    }

    #[test]
    fn closed_forms_at_half() {
        let c = closed_form_example(0.5, 0.2).unwrap();
        // 0.2*log2(5/4) + 0.8
        assert!((c.c_nc - 0.864_385_618_977_472_5).abs() < 1e-12);
        assert!((c.c_nocsi - 0.862_255_624_891_826_7).abs() < 1e-12);
        assert!((c.c_c - 0.863_365_392_517_278).abs() < 1e-9);
    }

    #[test]
    fn ptp_noncausal_with_u_equal_s() {
        let spec = example_channel(0.5, 0.2).unwrap();
        // U = S, and per-state capacity-achieving inputs: Z-channel P(1) = 0.4,
        // S-channel P(0) = 0.4, noiseless uniform.
        let d = PtpSeDecision::new(
            &spec,
            3,
            vec![1., 0., 0., 0., 1., 0., 0., 0., 1.],
            vec![0.6, 0.4, 0.4, 0.6, 0.5, 0.5],
        )
        .unwrap();
        let v = ptp_se_noncausal(&spec, &d).unwrap();
        let c = closed_form_example(0.5, 0.2).unwrap();
        assert!(v.feasible);
        assert!((v.value - c.c_nc).abs() < 1e-12);
        let hs = -(2.0 * 0.1 * 0.1f64.log2() + 0.8 * 0.8f64.log2());
        assert!((v.constraint_slack - (1.0 - hs)).abs() < 1e-12);
    }

    #[test]
    fn constant_map_is_no_csi() {
        let spec = example_channel(0.5, 0.2).unwrap();
        let v = ptp_se_causal(&spec, &[0, 0, 0], &[0.5, 0.5, 0.5, 0.5]).unwrap();
        let c = closed_form_example(0.5, 0.2).unwrap();
        assert!((v - c.c_nocsi).abs() < 1e-12);
    }

    #[test]
    fn support_branches_agree_with_vertex() {
        let b = MacRateBounds {
            b_r1: 0.7,
            b_r2: 0.5,
            b_sum_a: 1.0,
            b_sum_b: 1.1,
            slack: 0.2,
            feasible: true,
        };
        for (w1, w2) in [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (2.0, 1.0), (0.3, 0.9)] {
            let m = b
                .support_branches(w1, w2)
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            assert!((m - b.support_value(w1, w2)).abs() < 1e-12, "{w1},{w2}");
        }
        let close = |p: RatePoint, r1: f64, r2: f64| (p.r1 - r1).abs() < 1e-12 && (p.r2 - r2).abs() < 1e-12;
        assert!(close(b.support(1.0, 1.0), 0.7, 0.3));
        assert!(close(b.support(0.0, 1.0), 0.5, 0.5));
    }

    #[test]
    fn noiseless_relay_channel_value() {
        // Y = X, Z constant: value is H(X|X_r,S,U) limited, = 1 for uniform X.
        let sizes = SdRcAlphabets {
            s: 1,
            x: 2,
            xr: 2,
            z: 1,
            y: 2,
        };
        let spec = SdRcSpec::from_fn(sizes, vec![1.0], |_, _, _| 0, |x, _, _, _| {
            if x == 0 {
                vec![1.0, 0.0]
            } else {
                vec![0.0, 1.0]
            }
        })
        .unwrap();
        let d = SdRcDecision::causal(&spec, vec![0.3, 0.7], vec![0.5; 4]).unwrap();
        let v = sdrc_causal_value(&spec, &d).unwrap();
        assert!((v.value - 1.0).abs() < 1e-12);
        assert!((v.rate_bound_1 - 1.0).abs() < 1e-12);
    }
}
