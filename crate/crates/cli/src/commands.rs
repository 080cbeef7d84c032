//! Subcommand implementations. Each returns a payload; `emit` attaches the
//! manifest and writes it.

use std::path::{Path, PathBuf};

use binfwd::channel::{example_channel, ptp_se_as_mac, Cribbing, MacSpec, PtpSeDecision, SdRcDecision, SdRcMode};
use binfwd::fme::{self, parse_system, presets};
use binfwd::objectives::{closed_form_example, mac_bounds, ptp_se_noncausal, sdrc_causal_value, sdrc_value};
use binfwd::optimize::{mac_decision, maximize, trace_region, OptOptions, Problem};
use binfwd::sim::{covering_experiment, forwarding_decision, forwarding_relay, simulate_sdrc};
use binfwd::spec_file::{
    channel_to_json, parse_channel, parse_covering_kernel, parse_sdrc_decision, parse_sim_config, ChannelFile,
};
use serde_json::{json, Map, Value};

use crate::args::*;
use crate::error::{CliError, Result};
use crate::manifest::{read_input, InputDigest, RunManifest, MANIFEST_PREFIX};

pub const SEED_ENV: &str = "BINFWD_SEED";

pub enum Payload {
    Json(Map<String, Value>),
    Csv { header: Vec<String>, rows: Vec<Vec<String>> },
    Text(String),
}

/// A finished command: what to write and the manifest to embed.
pub struct Outcome {
    pub manifest: RunManifest,
    pub payload: Payload,
    /// Extra JSON documents (path, body) written next to the main output.
    pub side_outputs: Vec<(PathBuf, Map<String, Value>)>,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

/// The explicit seed, else `BINFWD_SEED`, else 0.
pub fn resolve_seed(explicit: Option<u64>) -> Result<u64> {
    if let Some(s) = explicit {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| invalid(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn to_map(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn format_for(explicit: Option<Format>, out: Option<&PathBuf>) -> Format {
    explicit.unwrap_or_else(|| match out.and_then(|p| p.extension()) {
        Some(e) if e == "csv" => Format::Csv,
        _ => Format::Json,
    })
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| invalid(format!("{what}: {t:?} is not a number"))))
        .collect()
}

fn weight_pair(s: &str, sep: char) -> Result<(f64, f64)> {
    let parts = parse_list(&s.replace(sep, ","), "weights")?;
    match parts[..] {
        [a, b] => Ok((a, b)),
        _ => Err(invalid(format!("weights {s:?}: expected two numbers separated by '{sep}'"))),
    }
}

pub fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Table1(a) => table1(a),
        Command::Capacity(a) => capacity(a),
        Command::Region(a) => region(a),
        Command::Fme(a) => fme_cmd(a),
        Command::Sim(a) => sim(a),
        Command::Covering(a) => covering(a),
        Command::ExampleChannel(a) => example(a),
        Command::Replay(a) => replay(a),
    }
}

fn table1(mut a: Table1Args) -> Result<Outcome> {
    let alphas = parse_list(&a.alphas, "alphas")?;
    let seed = if a.optimizer { Some(resolve_seed(a.seed)?) } else { None };
    a.seed = seed;
    let mut header: Vec<String> = ["alpha", "c_nocsi", "c_c", "c_nc"].map(String::from).to_vec();
    if a.optimizer {
        header.push("c_nc_optimizer".into());
    }
    let mut rows = Vec::new();
    let mut json_rows = Vec::new();
    for &alpha in &alphas {
        let c = closed_form_example(alpha, a.p)?;
        let mut row = json!({"alpha": alpha, "c_nocsi": c.c_nocsi, "c_c": c.c_c, "c_nc": c.c_nc, "beta": c.beta});
        let mut cells = vec![alpha.to_string(), c.c_nocsi.to_string(), c.c_c.to_string(), c.c_nc.to_string()];
        if let Some(seed) = seed {
            let spec = example_channel(alpha, a.p)?;
            let opts = OptOptions { restarts: a.restarts, seed, ..OptOptions::default() };
            let best = maximize(&Problem::ptp_se(&spec, a.u_size)?, &opts)?.best_value;
            row["c_nc_optimizer"] = best.into();
            cells.push(best.to_string());
        }
        rows.push(cells);
        json_rows.push(row);
    }
    let payload = match format_for(a.format, a.out.as_ref()) {
        Format::Csv => Payload::Csv { header, rows },
        Format::Json => Payload::Json(to_map(json!({"p": a.p, "rows": json_rows}))),
    };
    Ok(Outcome {
        manifest: RunManifest::new(Command::Table1(a), seed, Vec::new()),
        payload,
        side_outputs: Vec::new(),
    })
}

fn load_channel(path: &Path, inputs: &mut Vec<InputDigest>) -> Result<ChannelFile> {
    Ok(parse_channel(&read_input(path, inputs)?)?)
}

fn as_mac(c: ChannelFile) -> Result<MacSpec> {
    match c {
        ChannelFile::Mac(m) => Ok(m),
        ChannelFile::PtpSe(p) => Ok(ptp_se_as_mac(&p)?),
        ChannelFile::Sdrc(_) => Err(invalid("a MAC model needs a mac or ptp_se channel file")),
    }
}

fn capacity(mut a: CapacityArgs) -> Result<Outcome> {
    let mut inputs = Vec::new();
    let channel = load_channel(&a.channel, &mut inputs)?;
    let seed = resolve_seed(a.seed)?;
    a.seed = Some(seed);
    let opts = OptOptions {
        restarts: a.restarts,
        seed,
        grid_levels: a.grid_levels,
        ..OptOptions::default()
    };
    let (rep, decision, evaluation) = match a.model {
        Model::PtpSe => {
            let ChannelFile::PtpSe(spec) = channel else {
                return Err(invalid("model ptp-se needs a ptp_se channel file"));
            };
            let rep = maximize(&Problem::ptp_se(&spec, a.u_size)?, &opts)?;
            let d = PtpSeDecision {
                p_u_given_s: rep.argmax[0].clone(),
                p_x2_given_u: rep.argmax[1].clone(),
            };
            let v = ptp_se_noncausal(&spec, &d)?;
            (rep, to_json(&d), to_json(&v))
        }
        Model::Sdrc | Model::SdrcCausal => {
            let ChannelFile::Sdrc(spec) = channel else {
                return Err(invalid("relay models need an sdrc channel file"));
            };
            let mode = if a.model == Model::Sdrc { SdRcMode::NonCausal } else { SdRcMode::Causal };
            let rep = maximize(&Problem::sdrc(&spec, mode, a.u_size)?, &opts)?;
            let d = SdRcDecision::from_factors(mode, rep.argmax.clone())?;
            let v = match mode {
                SdRcMode::NonCausal => sdrc_value(&spec, &d)?,
                _ => sdrc_causal_value(&spec, &d)?,
            };
            (rep, to_json(&d), to_json(&v))
        }
        Model::Mac | Model::MacCausal => {
            let spec = as_mac(channel)?;
            let cribbing = if a.model == Model::Mac { Cribbing::StrictlyCausal } else { Cribbing::Causal };
            let (w1, w2) = weight_pair(&a.weights, ',')?;
            let rep = maximize(&Problem::mac_support(&spec, cribbing, a.u_size, w1, w2)?, &opts)?;
            let d = mac_decision(cribbing, &rep.argmax);
            let b = mac_bounds(&spec, &d)?;
            let eval = json!({"bounds": b, "point": b.support(w1, w2), "weights": [w1, w2]});
            (rep, to_json(&d), eval)
        }
    };
    let mut m = to_map(to_json(&rep));
    m.remove("argmax");
    m.insert("model".into(), to_json(&a.model));
    m.insert("decision".into(), decision);
    m.insert("evaluation".into(), evaluation);
    Ok(Outcome {
        manifest: RunManifest::new(Command::Capacity(a), Some(seed), inputs),
        payload: Payload::Json(m),
        side_outputs: Vec::new(),
    })
}

fn region(mut a: RegionArgs) -> Result<Outcome> {
    let mut inputs = Vec::new();
    let spec = as_mac(load_channel(&a.channel, &mut inputs)?)?;
    let seed = resolve_seed(a.seed)?;
    a.seed = Some(seed);
    let weights: Vec<(f64, f64)> = match &a.weights {
        Some(w) => w.split(',').map(|p| weight_pair(p, ':')).collect::<Result<_>>()?,
        None => {
            if a.directions < 2 {
                return Err(invalid("--directions must be at least 2"));
            }
            let last = a.directions - 1;
            (0..a.directions)
                .map(|i| match i {
                    0 => (1.0, 0.0),
                    i if i == last => (0.0, 1.0),
                    _ => {
                        let t = std::f64::consts::FRAC_PI_2 * i as f64 / last as f64;
                        (t.cos(), t.sin())
                    }
                })
                .collect()
        }
    };
    let cribbing = match a.cribbing {
        CribbingArg::StrictlyCausal => Cribbing::StrictlyCausal,
        CribbingArg::Causal => Cribbing::Causal,
    };
    let opts = OptOptions { restarts: a.restarts, seed, ..OptOptions::default() };
    let points = trace_region(&spec, cribbing, a.u_size, &weights, &opts)?;
    let payload = match format_for(a.format, a.out.as_ref()) {
        Format::Csv => Payload::Csv {
            header: ["w1", "w2", "r1", "r2", "value", "b_r1", "b_r2", "b_sum_a", "b_sum_b", "slack"]
                .map(String::from)
                .to_vec(),
            rows: points
                .iter()
                .map(|p| {
                    [
                        p.w1,
                        p.w2,
                        p.point.r1,
                        p.point.r2,
                        p.value,
                        p.bounds.b_r1,
                        p.bounds.b_r2,
                        p.bounds.b_sum_a,
                        p.bounds.b_sum_b,
                        p.bounds.slack,
                    ]
                    .iter()
                    .map(f64::to_string)
                    .collect()
                })
                .collect(),
        },
        Format::Json => Payload::Json(to_map(json!({"cribbing": a.cribbing, "points": points}))),
    };
    Ok(Outcome {
        manifest: RunManifest::new(Command::Region(a), Some(seed), inputs),
        payload,
        side_outputs: Vec::new(),
    })
}

fn fme_cmd(a: FmeArgs) -> Result<Outcome> {
    let mut inputs = Vec::new();
    let text = match (&a.system, &a.preset) {
        (Some(path), None) => read_input(path, &mut inputs)?,
        (None, Some(name)) => presets::source(name)?.to_string(),
        _ => return Err(invalid("give exactly one of --system and --preset")),
    };
    let sys = parse_system(&text)?;
    let keep: Vec<String> = match &a.keep {
        Some(k) => k.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
        None => sys.keep.clone(),
    };
    if keep.is_empty() {
        return Err(invalid("no variables to keep: pass --keep or add a `keep` line"));
    }
    let keep_refs: Vec<&str> = keep.iter().map(String::as_str).collect();
    let mut out = fme::project(&sys, &keep_refs)?;
    out.keep = keep;
    Ok(Outcome {
        manifest: RunManifest::new(Command::Fme(a), None, inputs),
        payload: Payload::Text(out.to_string()),
        side_outputs: Vec::new(),
    })
}

fn sim(mut a: SimArgs) -> Result<Outcome> {
    let mut inputs = Vec::new();
    let cfg = parse_sim_config(&read_input(&a.config, &mut inputs)?)?;
    let base = a.config.parent().map(Path::to_path_buf).unwrap_or_default();
    let ChannelFile::Sdrc(spec) = load_channel(&base.join(&cfg.channel_file), &mut inputs)? else {
        return Err(invalid("simulation needs an sdrc channel file"));
    };
    let d = parse_sdrc_decision(&read_input(&base.join(&cfg.decision_file), &mut inputs)?, &spec)?;
    if !matches!(d, SdRcDecision::NonCausal { .. }) {
        return Err(invalid("simulation needs a non-causal decision"));
    }
    let seed = match a.seed.or(cfg.seed) {
        Some(s) => s,
        None => resolve_seed(None)?,
    };
    a.seed = Some(seed);
    let rep = simulate_sdrc(&spec, &d, cfg.n, cfg.blocks, &cfg.rates, cfg.eps, cfg.trials, seed)?;
    let mut m = to_map(to_json(&rep));
    m.insert("seed".into(), seed.into());
    Ok(Outcome {
        manifest: RunManifest::new(Command::Sim(a), Some(seed), inputs),
        payload: Payload::Json(m),
        side_outputs: Vec::new(),
    })
}

fn covering(mut a: CoveringArgs) -> Result<Outcome> {
    let mut inputs = Vec::new();
    let k = parse_covering_kernel(&read_input(&a.kernel_file, &mut inputs)?)?;
    let seed = resolve_seed(a.seed)?;
    a.seed = Some(seed);
    let rep = covering_experiment(&k.kernel, &k.p_v, a.n, a.r, a.rb, a.delta, a.trials, seed)?;
    Ok(Outcome {
        manifest: RunManifest::new(Command::Covering(a), Some(seed), inputs),
        payload: Payload::Json(to_map(to_json(&rep))),
        side_outputs: Vec::new(),
    })
}

fn example(a: ExampleChannelArgs) -> Result<Outcome> {
    let mut side = Vec::new();
    let channel = match a.kind {
        ExampleKind::PtpSe => {
            if a.decision_out.is_some() {
                return Err(invalid("--decision-out is only available for the forwarding relay"));
            }
            ChannelFile::PtpSe(example_channel(a.alpha, a.p)?)
        }
        ExampleKind::ForwardingRelay => {
            let spec = forwarding_relay()?;
            if let Some(path) = &a.decision_out {
                let d = forwarding_decision(&spec)?;
                side.push((path.clone(), to_map(json!({"decision": d}))));
            }
            ChannelFile::Sdrc(spec)
        }
    };
    Ok(Outcome {
        manifest: RunManifest::new(Command::ExampleChannel(a), None, Vec::new()),
        payload: Payload::Json(to_map(channel_to_json(&channel))),
        side_outputs: side,
    })
}

fn replay(a: ReplayArgs) -> Result<Outcome> {
    let text = std::fs::read_to_string(&a.manifest).map_err(|e| CliError::io(&a.manifest, e))?;
    let m = RunManifest::from_output(&text)?;
    if m.version != env!("CARGO_PKG_VERSION") {
        return Err(invalid(format!(
            "manifest was written by version {}, this is {}",
            m.version,
            env!("CARGO_PKG_VERSION")
        )));
    }
    m.verify_inputs()?;
    let mut command = m.command;
    command.set_out(a.out);
    run(command)
}

fn json_with_manifest(manifest: &RunManifest, body: &Map<String, Value>) -> String {
    let mut m = Map::new();
    m.insert("manifest".into(), to_json(manifest));
    for (k, v) in body {
        m.insert(k.clone(), v.clone());
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("serializable");
    s.push('\n');
    s
}

fn write(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

/// Renders a payload with its manifest.
pub fn render(manifest: &RunManifest, payload: &Payload) -> Result<String> {
    let line = serde_json::to_string(manifest).expect("serializable");
    Ok(match payload {
        Payload::Json(body) => json_with_manifest(manifest, body),
        Payload::Text(t) => format!("{MANIFEST_PREFIX}{line}\n{t}"),
        Payload::Csv { header, rows } => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(header).map_err(|e| invalid(e.to_string()))?;
            for r in rows {
                w.write_record(r).map_err(|e| invalid(e.to_string()))?;
            }
            let body = String::from_utf8(w.into_inner().map_err(|e| invalid(e.to_string()))?).expect("utf-8");
            format!("{MANIFEST_PREFIX}{line}\n{body}")
        }
    })
}

pub fn emit(outcome: &Outcome, out: Option<&Path>) -> Result<()> {
    for (path, body) in &outcome.side_outputs {
        write(Some(path), &json_with_manifest(&outcome.manifest, body))?;
    }
    write(out, &render(&outcome.manifest, &outcome.payload)?)
}
