//! JSON files for channels, decisions, simulation configs and covering
//! kernels.
//!
//! A channel file looks like
//!
//! ```json
//! {
//!   "model": "sdrc",
//!   "alphabets": {"S": 2, "X": 2, "X_r": 2, "Z": 2, "Y": 2},
//!   "p_state": [0.5, 0.5],
//!   "z_table": [[[0, 1], [0, 1]], [[1, 0], [1, 0]]],
//!   "kernel": [[[[[1, 0], [1, 0]], ...]]]
//! }
//! ```
//!
//! with nesting orders
//!
//! | model  | alphabets              | `z_table`   | `kernel`               |
//! |--------|------------------------|-------------|------------------------|
//! | sdrc   | S, X, X_r, Z, Y        | [x][x_r][s] | [x][x_r][z][s][y]      |
//! | mac    | S1, S2, X1, X2, Z, Y   | [x1][s1]    | [x1][x2][s1][s2][y]    |
//! | ptp_se | S, X1, X2, Y           | absent      | [x2][s][y]             |
//!
//! `p_state` is flat; for the MAC it is ordered `[s1][s2]`. Shape and
//! normalization errors name the offending entry, e.g. `kernel[1][0][1]`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::channel::{MacAlphabets, MacSpec, PtpSeSpec, SdRcAlphabets, SdRcDecision, SdRcSpec};
use crate::error::{Error, Result};
use crate::prob::{Alphabet, CondPmf};
use crate::sim::Rates;

const ROW_TOLERANCE: f64 = 1e-9;

/// A channel of any supported model.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelFile {
    Sdrc(SdRcSpec),
    Mac(MacSpec),
    PtpSe(PtpSeSpec),
}

impl ChannelFile {
    pub fn model(&self) -> &'static str {
        match self {
            ChannelFile::Sdrc(_) => "sdrc",
            ChannelFile::Mac(_) => "mac",
            ChannelFile::PtpSe(_) => "ptp_se",
        }
    }
}

fn spec_err<T>(path: impl Into<String>, message: impl Into<String>) -> Result<T> {
    Err(Error::Spec {
        path: path.into(),
        message: message.into(),
    })
}

/// Wraps a serde error with its position in the source text.
fn json_err(what: &str, e: serde_json::Error) -> Error {
    Error::Spec {
        path: format!("{what} (line {}, column {})", e.line(), e.column()),
        message: e.to_string(),
    }
}

/// Flattens a nested array with the given dimensions, row-major.
fn flatten(v: &Value, dims: &[usize], path: &str, out: &mut Vec<Value>) -> Result<()> {
    let Some((&d, rest)) = dims.split_first() else {
        out.push(v.clone());
        return Ok(());
    };
    let Some(items) = v.as_array() else {
        return spec_err(path, format!("expected an array of {d} entries"));
    };
    if items.len() != d {
        return spec_err(path, format!("expected {d} entries, found {}", items.len()));
    }
    for (i, item) in items.iter().enumerate() {
        flatten(item, rest, &format!("{path}[{i}]"), out)?;
    }
    Ok(())
}

fn index_path(name: &str, dims: &[usize], mut flat: usize) -> String {
    let mut idx = vec![0; dims.len()];
    for (slot, &d) in idx.iter_mut().zip(dims).rev() {
        *slot = flat % d;
        flat /= d;
    }
    let mut p = name.to_string();
    for i in idx {
        p.push_str(&format!("[{i}]"));
    }
    p
}

/// Nested probability array whose last dimension holds normalized rows.
fn prob_array(v: &Value, dims: &[usize], name: &str) -> Result<Vec<f64>> {
    let mut raw = Vec::new();
    flatten(v, dims, name, &mut raw)?;
    let mut out = Vec::with_capacity(raw.len());
    for (i, x) in raw.iter().enumerate() {
        match x.as_f64() {
            Some(p) if p.is_finite() && p >= 0.0 => out.push(p),
            _ => return spec_err(index_path(name, dims, i), format!("{x} is not a probability")),
        }
    }
    let row = *dims.last().expect("nonempty dims");
    let lead = &dims[..dims.len() - 1];
    for (r, chunk) in out.chunks(row).enumerate() {
        let sum: f64 = chunk.iter().sum();
        if (sum - 1.0).abs() > ROW_TOLERANCE {
            let path = if lead.is_empty() { name.to_string() } else { index_path(name, lead, r) };
            return spec_err(path, format!("row sums to {sum}, not 1"));
        }
    }
    Ok(out)
}

fn index_array(v: &Value, dims: &[usize], name: &str, bound: usize) -> Result<Vec<usize>> {
    let mut raw = Vec::new();
    flatten(v, dims, name, &mut raw)?;
    raw.iter()
        .enumerate()
        .map(|(i, x)| match x.as_u64() {
            Some(z) if (z as usize) < bound => Ok(z as usize),
            _ => spec_err(index_path(name, dims, i), format!("{x} is not a letter index below {bound}")),
        })
        .collect()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    model: String,
    alphabets: BTreeMap<String, usize>,
    p_state: Value,
    #[serde(default)]
    z_table: Option<Value>,
    kernel: Value,
    /// Provenance written by the command-line tool; ignored.
    #[serde(default, rename = "manifest")]
    _manifest: Option<Value>,
}

fn alphabet_sizes<const N: usize>(given: &BTreeMap<String, usize>, names: [&str; N]) -> Result<[usize; N]> {
    for k in given.keys() {
        if !names.contains(&k.as_str()) {
            return spec_err(format!("alphabets.{k}"), format!("unknown alphabet; expected {}", names.join(", ")));
        }
    }
    let mut out = [0; N];
    for (slot, name) in out.iter_mut().zip(names) {
        match given.get(name) {
            Some(&0) => return spec_err(format!("alphabets.{name}"), "alphabet must have at least one letter"),
            Some(&n) => *slot = n,
            None => return spec_err("alphabets", format!("missing alphabet {name}")),
        }
    }
    Ok(out)
}

fn build<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Spec {
        path: "channel".into(),
        message: e.to_string(),
    })
}

/// Parses and validates a channel file.
pub fn parse_channel(text: &str) -> Result<ChannelFile> {
    let raw: RawChannel = serde_json::from_str(text).map_err(|e| json_err("channel", e))?;
    let z_table = |dims: &[usize], bound: usize| match &raw.z_table {
        Some(v) => index_array(v, dims, "z_table", bound),
        None => spec_err("z_table", "missing for this model"),
    };
    match raw.model.as_str() {
        "sdrc" => {
            let [s, x, xr, z, y] = alphabet_sizes(&raw.alphabets, ["S", "X", "X_r", "Z", "Y"])?;
            let p_s = prob_array(&raw.p_state, &[s], "p_state")?;
            let zt = z_table(&[x, xr, s], z)?;
            let kernel = prob_array(&raw.kernel, &[x, xr, z, s, y], "kernel")?;
            let sizes = SdRcAlphabets { s, x, xr, z, y };
            Ok(ChannelFile::Sdrc(build(SdRcSpec::new(sizes, p_s, zt, kernel))?))
        }
        "mac" => {
            let [s1, s2, x1, x2, z, y] = alphabet_sizes(&raw.alphabets, ["S1", "S2", "X1", "X2", "Z", "Y"])?;
            let p_state = prob_array(&raw.p_state, &[s1 * s2], "p_state")?;
            let zt = z_table(&[x1, s1], z)?;
            let kernel = prob_array(&raw.kernel, &[x1, x2, s1, s2, y], "kernel")?;
            let sizes = MacAlphabets { s1, s2, x1, x2, z, y };
            Ok(ChannelFile::Mac(build(MacSpec::new(sizes, p_state, zt, kernel))?))
        }
        "ptp_se" => {
            let [s, x1, x2, y] = alphabet_sizes(&raw.alphabets, ["S", "X1", "X2", "Y"])?;
            if raw.z_table.is_some() {
                return spec_err("z_table", "the state-encoder model has no relay link");
            }
            let p_s = prob_array(&raw.p_state, &[s], "p_state")?;
            let kernel = prob_array(&raw.kernel, &[x2, s, y], "kernel")?;
            Ok(ChannelFile::PtpSe(build(PtpSeSpec::new(p_s, x1, x2, y, kernel))?))
        }
        other => spec_err("model", format!("unknown model {other:?}; expected sdrc, mac or ptp_se")),
    }
}

fn nest(flat: &[f64], dims: &[usize]) -> Value {
    match dims.split_first() {
        None => Value::from(flat[0]),
        Some((&d, rest)) => {
            let stride = flat.len() / d.max(1);
            Value::Array((0..d).map(|i| nest(&flat[i * stride..(i + 1) * stride], rest)).collect())
        }
    }
}

fn nest_indices(flat: &[usize], dims: &[usize]) -> Value {
    let as_f: Vec<f64> = flat.iter().map(|&z| z as f64).collect();
    // integers survive the round trip through f64 exactly
    fn to_int(v: Value) -> Value {
        match v {
            Value::Array(a) => Value::Array(a.into_iter().map(to_int).collect()),
            Value::Number(n) => Value::from(n.as_f64().unwrap_or(0.0) as u64),
            other => other,
        }
    }
    to_int(nest(&as_f, dims))
}

/// The channel in file form.
pub fn channel_to_json(c: &ChannelFile) -> Value {
    let mut m = serde_json::Map::new();
    m.insert("model".into(), c.model().into());
    match c {
        ChannelFile::Sdrc(spec) => {
            let SdRcAlphabets { s, x, xr, z, y } = spec.sizes();
            m.insert("alphabets".into(), serde_json::json!({"S": s, "X": x, "X_r": xr, "Z": z, "Y": y}));
            m.insert("p_state".into(), nest(spec.p_s().kernel(), &[s]));
            m.insert("z_table".into(), nest_indices(spec.z_table(), &[x, xr, s]));
            m.insert("kernel".into(), nest(spec.kernel().kernel(), &[x, xr, z, s, y]));
        }
        ChannelFile::Mac(spec) => {
            let MacAlphabets { s1, s2, x1, x2, z, y } = spec.sizes();
            m.insert(
                "alphabets".into(),
                serde_json::json!({"S1": s1, "S2": s2, "X1": x1, "X2": x2, "Z": z, "Y": y}),
            );
            m.insert("p_state".into(), nest(spec.p_state().kernel(), &[s1 * s2]));
            m.insert("z_table".into(), nest_indices(spec.z_table(), &[x1, s1]));
            m.insert("kernel".into(), nest(spec.kernel().kernel(), &[x1, x2, s1, s2, y]));
        }
        ChannelFile::PtpSe(spec) => {
            let (s, x1, x2, y) = (spec.s_size(), spec.x1_size(), spec.x2_size(), spec.y_size());
            m.insert("alphabets".into(), serde_json::json!({"S": s, "X1": x1, "X2": x2, "Y": y}));
            m.insert("p_state".into(), nest(spec.p_s().kernel(), &[s]));
            m.insert("kernel".into(), nest(spec.kernel().kernel(), &[x2, s, y]));
        }
    }
    Value::Object(m)
}

/// Parses a relay-channel decision, either bare or as the `decision` field
/// of a capacity report, and checks it against the channel.
pub fn parse_sdrc_decision(text: &str, spec: &SdRcSpec) -> Result<SdRcDecision> {
    let v: Value = serde_json::from_str(text).map_err(|e| json_err("decision", e))?;
    let (body, path) = match v.get("decision") {
        Some(d) => (d.clone(), "decision"),
        None => (v, "decision file"),
    };
    let d: SdRcDecision = serde_json::from_value(body).map_err(|e| Error::Spec {
        path: path.into(),
        message: e.to_string(),
    })?;
    d.validate(spec).map_err(|e| Error::Spec {
        path: path.into(),
        message: e.to_string(),
    })?;
    Ok(d)
}

fn default_eps() -> f64 {
    0.2
}

/// Simulation config. File paths are resolved relative to the config file
/// by the caller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub model: String,
    pub n: usize,
    #[serde(rename = "B")]
    pub blocks: usize,
    pub rates: Rates,
    #[serde(default = "default_eps")]
    pub eps: f64,
    pub trials: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    pub channel_file: String,
    pub decision_file: String,
}

pub fn parse_sim_config(text: &str) -> Result<SimConfig> {
    let c: SimConfig = serde_json::from_str(text).map_err(|e| json_err("sim config", e))?;
    if c.model != "sdrc" {
        return spec_err("model", format!("only the relay channel (sdrc) is simulated, got {:?}", c.model));
    }
    Ok(c)
}

/// Covering kernel file: `{"p_v": [...], "kernel": [[p(z|v) for z] for v]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoveringKernel {
    pub p_v: Vec<f64>,
    pub kernel: CondPmf,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawKernel {
    p_v: Value,
    kernel: Value,
    #[serde(default, rename = "manifest")]
    _manifest: Option<Value>,
}

pub fn parse_covering_kernel(text: &str) -> Result<CoveringKernel> {
    let raw: RawKernel = serde_json::from_str(text).map_err(|e| json_err("kernel", e))?;
    let nv = raw.p_v.as_array().map_or(0, Vec::len);
    if nv == 0 {
        return spec_err("p_v", "expected a nonempty array");
    }
    let p_v = prob_array(&raw.p_v, &[nv], "p_v")?;
    let nz = raw.kernel.get(0).and_then(Value::as_array).map_or(0, Vec::len);
    if nz == 0 {
        return spec_err("kernel[0]", "expected a nonempty row");
    }
    let k = prob_array(&raw.kernel, &[nv, nz], "kernel")?;
    let kernel = build(CondPmf::new(vec![Alphabet::new("Z", nz)], vec![Alphabet::new("V", nv)], k))?;
    Ok(CoveringKernel { p_v, kernel })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::example_channel;
    use crate::sim::{forwarding_decision, forwarding_relay};

    fn path_of(e: Error) -> String {
        match e {
            Error::Spec { path, .. } => path,
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn channels_round_trip() {
        let relay = ChannelFile::Sdrc(forwarding_relay().unwrap());
        let ptp = ChannelFile::PtpSe(example_channel(0.5, 0.2).unwrap());
        for c in [relay, ptp] {
            let text = channel_to_json(&c).to_string();
            assert_eq!(parse_channel(&text).unwrap(), c);
        }
    }

    #[test]
    fn bad_rows_name_their_index() {
        let mut v = channel_to_json(&ChannelFile::PtpSe(example_channel(0.5, 0.2).unwrap()));
        v["kernel"][1][2][0] = 0.7.into();
        assert_eq!(path_of(parse_channel(&v.to_string()).unwrap_err()), "kernel[1][2]");
        let mut v = channel_to_json(&ChannelFile::Sdrc(forwarding_relay().unwrap()));
        v["z_table"][0][1][1] = 5.into();
        assert_eq!(path_of(parse_channel(&v.to_string()).unwrap_err()), "z_table[0][1][1]");
        let mut v = channel_to_json(&ChannelFile::Sdrc(forwarding_relay().unwrap()));
        v["kernel"][1][0] = Value::Array(vec![]);
        assert_eq!(path_of(parse_channel(&v.to_string()).unwrap_err()), "kernel[1][0]");
        let mut v = channel_to_json(&ChannelFile::Sdrc(forwarding_relay().unwrap()));
        v["p_state"] = serde_json::json!([0.5, 0.6]);
        assert_eq!(path_of(parse_channel(&v.to_string()).unwrap_err()), "p_state");
        v["alphabets"]["Q"] = 2.into();
        assert_eq!(path_of(parse_channel(&v.to_string()).unwrap_err()), "alphabets.Q");
    }

    #[test]
    fn syntax_errors_carry_position() {
        let e = parse_channel("{\n  \"model\": \"sdrc\",\n  oops\n}").unwrap_err();
        assert!(path_of(e).contains("line 3"));
    }

    #[test]
    fn decisions_load_bare_or_wrapped() {
        let spec = forwarding_relay().unwrap();
        let d = forwarding_decision(&spec).unwrap();
        let bare = serde_json::to_string(&d).unwrap();
        assert_eq!(parse_sdrc_decision(&bare, &spec).unwrap(), d);
        let wrapped = serde_json::json!({"best_value": 1.0, "decision": d}).to_string();
        assert_eq!(parse_sdrc_decision(&wrapped, &spec).unwrap(), d);
        let sizes = SdRcAlphabets { s: 3, x: 2, xr: 2, z: 2, y: 2 };
        let other = SdRcSpec::from_fn(sizes, vec![0.2, 0.3, 0.5], |x, _, _| x, |x, _, _, _| {
            vec![1.0 - x as f64, x as f64]
        })
        .unwrap();
        assert!(parse_sdrc_decision(&bare, &other).is_err());
    }

    #[test]
    fn sim_config_defaults() {
        let c = parse_sim_config(
            r#"{"model": "sdrc", "n": 10, "B": 4, "rates": {"Rp": 0.5, "Rpp": 0, "Rtilde": 0.1, "Rb": 0.8},
                "trials": 5, "channel_file": "c.json", "decision_file": "d.json"}"#,
        )
        .unwrap();
        assert_eq!(c.eps, 0.2);
        assert_eq!(c.seed, None);
        assert_eq!(c.blocks, 4);
        assert!(parse_sim_config(r#"{"model": "mac"}"#).is_err());
    }

    #[test]
    fn covering_kernels() {
        let k = parse_covering_kernel(r#"{"p_v": [0.5, 0.5], "kernel": [[0.5, 0.5], [1, 0]]}"#).unwrap();
        assert_eq!(k.kernel.row(1), &[1.0, 0.0]);
        let e = parse_covering_kernel(r#"{"p_v": [0.5, 0.5], "kernel": [[0.5, 0.5], [1, 1]]}"#).unwrap_err();
        assert_eq!(path_of(e), "kernel[1]");
    }
}
