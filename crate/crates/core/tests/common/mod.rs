//! Random channels, decisions and joints shared by the property and
//! degeneration suites. Each check returns the largest deviation it saw.

#![allow(dead_code)]

use binfwd::channel::{
    assemble_mac, assemble_mac_one_state, assemble_sdrc, Cribbing, MacAlphabets, MacDecision, MacSpec,
    SdRcAlphabets, SdRcDecision, SdRcSpec,
};
use binfwd::objectives::{
    case_a_bounds, decomposition_identity, mac_bounds_of_joint, one_state_mac_bounds, sdrc_causal_value, sdrc_value,
    MacRateBounds,
};
use binfwd::prob::{Alphabet, Joint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random point of the simplex, with some exact zeros.
pub fn simplex(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let keep = rng.random_range(0..n);
    let mut v: Vec<f64> = (0..n)
        .map(|i| {
            if i != keep && rng.random_bool(0.15) {
                0.0
            } else {
                -(1.0 - rng.random::<f64>()).ln()
            }
        })
        .collect();
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|p| *p /= total);
    v
}

pub fn rows(rng: &mut ChaCha8Rng, count: usize, len: usize) -> Vec<f64> {
    (0..count).flat_map(|_| simplex(rng, len)).collect()
}

/// Joint over axes A, B, C with sizes in 1..=3.
pub fn random_joint(rng: &mut ChaCha8Rng) -> Joint {
    let axes: Vec<Alphabet> = ["A", "B", "C"]
        .iter()
        .map(|n| Alphabet::new(*n, rng.random_range(1..=3)))
        .collect();
    let cells = axes.iter().map(|a| a.size).product();
    let probs = simplex(rng, cells);
    Joint::new(axes, probs).unwrap()
}

pub fn chain_rule_gap(j: &Joint) -> f64 {
    let h = |t: &[&str], g: &[&str]| j.entropy(t, g).unwrap();
    let i = |a: &[&str], b: &[&str], g: &[&str]| j.mutual_information(a, b, g).unwrap();
    let entropy = (h(&["A", "B"], &["C"]) - h(&["A"], &["C"]) - h(&["B"], &["A", "C"])).abs();
    let info = (i(&["A"], &["B", "C"], &[]) - i(&["A"], &["C"], &[]) - i(&["A"], &["B"], &["C"])).abs();
    entropy.max(info)
}

/// How far conditioning ever increases entropy.
pub fn conditioning_gap(j: &Joint) -> f64 {
    let h = |t: &[&str], g: &[&str]| j.entropy(t, g).unwrap();
    (h(&["A"], &["B"]) - h(&["A"], &[]))
        .max(h(&["A"], &["B", "C"]) - h(&["A"], &["C"]))
        .max(0.0)
}

pub fn symmetry_gap(j: &Joint) -> f64 {
    let i = |a: &[&str], b: &[&str], g: &[&str]| j.mutual_information(a, b, g).unwrap();
    (i(&["A"], &["B"], &["C"]) - i(&["B"], &["A"], &["C"]))
        .abs()
        .max((i(&["A", "C"], &["B"], &[]) - i(&["B"], &["A", "C"], &[])).abs())
}

/// The most negative entropy or mutual information, as a positive number.
pub fn negativity(j: &Joint) -> f64 {
    let values = [
        j.entropy(&["A"], &[]).unwrap(),
        j.entropy(&["A", "B"], &["C"]).unwrap(),
        j.mutual_information(&["A"], &["B"], &[]).unwrap(),
        j.mutual_information(&["A"], &["B"], &["C"]).unwrap(),
        j.mutual_information(&["A", "B"], &["C"], &[]).unwrap(),
    ];
    values.iter().fold(0.0f64, |m, &v| m.max(-v))
}

fn random_mac(rng: &mut ChaCha8Rng, s2: usize, z: usize) -> MacSpec {
    let sizes = MacAlphabets {
        s1: rng.random_range(1..=3),
        s2,
        x1: 2,
        x2: 2,
        z,
        y: rng.random_range(2..=3),
    };
    let p_state = simplex(rng, sizes.s1 * sizes.s2);
    let z_table: Vec<usize> = (0..sizes.x1 * sizes.s1).map(|_| rng.random_range(0..z)).collect();
    let kernel = rows(rng, sizes.x1 * sizes.x2 * sizes.s1 * sizes.s2, sizes.y);
    MacSpec::new(sizes, p_state, z_table, kernel).unwrap()
}

fn random_mac_decision(rng: &mut ChaCha8Rng, spec: &MacSpec, cribbing: Cribbing, u_independent: bool) -> MacDecision {
    let sz = spec.sizes();
    let nu = 2;
    let p_u_shared = simplex(rng, nu);
    let mut joint = Vec::new();
    for _ in 0..sz.s1 {
        let p_u = if u_independent { p_u_shared.clone() } else { simplex(rng, nu) };
        for &pu in &p_u {
            joint.extend(simplex(rng, sz.x1).iter().map(|p| p * pu));
        }
    }
    match cribbing {
        Cribbing::StrictlyCausal => {
            MacDecision::strictly_causal(spec, nu, joint, rows(rng, nu * sz.s2, sz.x2)).unwrap()
        }
        Cribbing::Causal => MacDecision::causal(spec, nu, joint, rows(rng, sz.z * nu * sz.s2, sz.x2)).unwrap(),
    }
}

fn bound_gap(a: &MacRateBounds, b: &MacRateBounds) -> f64 {
    [
        a.b_r1 - b.b_r1,
        a.b_r2 - b.b_r2,
        a.b_sum_a - b.b_sum_a,
        a.b_sum_b - b.b_sum_b,
        a.slack - b.slack,
    ]
    .iter()
    .fold(0.0f64, |m, d| m.max(d.abs()))
}

/// Constant Z with U independent of the state: every bound equals its
/// no-cribbing counterpart. With U dependent, the slack is −I(U;S1|S2) and
/// the decision is infeasible whenever that is positive.
pub fn constant_z_gap(rng: &mut ChaCha8Rng) -> f64 {
    let cribbing = if rng.random_bool(0.5) { Cribbing::StrictlyCausal } else { Cribbing::Causal };
    let s2 = rng.random_range(1..=2);
    let spec = random_mac(rng, s2, 1);
    let d = random_mac_decision(rng, &spec, cribbing, true);
    let j = assemble_mac(&spec, &d).unwrap();
    let b = mac_bounds_of_joint(&j).unwrap();
    let a = case_a_bounds(&j).unwrap();
    let mut gap = [b.b_r1 - a.r1, b.b_r2 - a.r2, b.b_sum_a - a.sum_u, b.b_sum_b - a.sum, b.slack]
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs()));

    let d = random_mac_decision(rng, &spec, cribbing, false);
    let j = assemble_mac(&spec, &d).unwrap();
    let b = mac_bounds_of_joint(&j).unwrap();
    let ius = j.mutual_information(&["U"], &["S1"], &["S2"]).unwrap();
    gap = gap.max((b.slack + ius).abs());
    if ius > 1e-9 && b.feasible {
        gap = f64::INFINITY;
    }
    gap
}

/// A singleton S2 gives the same bounds as the one-state assembly.
pub fn degenerate_s2_gap(rng: &mut ChaCha8Rng) -> f64 {
    let cribbing = if rng.random_bool(0.5) { Cribbing::StrictlyCausal } else { Cribbing::Causal };
    let z = rng.random_range(1..=2);
    let spec = random_mac(rng, 1, z);
    let d = random_mac_decision(rng, &spec, cribbing, false);
    let two = mac_bounds_of_joint(&assemble_mac(&spec, &d).unwrap()).unwrap();
    let one = one_state_mac_bounds(&assemble_mac_one_state(&spec, &d).unwrap()).unwrap();
    bound_gap(&two, &one)
}

pub fn random_sdrc(rng: &mut ChaCha8Rng) -> SdRcSpec {
    let sizes = SdRcAlphabets {
        s: rng.random_range(1..=3),
        x: 2,
        xr: 2,
        z: rng.random_range(1..=2),
        y: rng.random_range(2..=3),
    };
    let p_s = simplex(rng, sizes.s);
    let z_table: Vec<usize> = (0..sizes.x * sizes.xr * sizes.s)
        .map(|_| rng.random_range(0..sizes.z))
        .collect();
    let kernel = rows(rng, sizes.x * sizes.xr * sizes.z * sizes.s, sizes.y);
    SdRcSpec::new(sizes, p_s, z_table, kernel).unwrap()
}

/// The non-causal evaluator with a singleton U equals the causal evaluator
/// on the same kernels.
pub fn singleton_u_gap(rng: &mut ChaCha8Rng) -> f64 {
    let spec = random_sdrc(rng);
    let sz = spec.sizes();
    let p_xr = simplex(rng, sz.xr);
    let p_x = rows(rng, sz.xr * sz.s, sz.x);
    let causal = SdRcDecision::causal(&spec, p_xr.clone(), p_x.clone()).unwrap();
    let nc = SdRcDecision::noncausal(&spec, 1, vec![1.0; sz.s], p_xr, p_x).unwrap();
    let a = sdrc_causal_value(&spec, &causal).unwrap();
    let b = sdrc_value(&spec, &nc).unwrap();
    [a.rate_bound_1 - b.rate_bound_1, a.rate_bound_2 - b.rate_bound_2, a.value - b.value]
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs()))
}

/// I(Z,X;Y|X_r,U,S) + I(X_r,U;Y|S) − I(X,X_r;Y|S) on a random assembled joint.
pub fn decomposition_gap(rng: &mut ChaCha8Rng) -> f64 {
    let spec = random_sdrc(rng);
    let sz = spec.sizes();
    let nu = rng.random_range(1..=3);
    let d = SdRcDecision::noncausal(
        &spec,
        nu,
        rows(rng, sz.s, nu),
        rows(rng, nu, sz.xr),
        rows(rng, sz.xr * nu * sz.s, sz.x),
    )
    .unwrap();
    let (lhs, rhs) = decomposition_identity(&assemble_sdrc(&spec, &d).unwrap()).unwrap();
    (lhs - rhs).abs()
}
