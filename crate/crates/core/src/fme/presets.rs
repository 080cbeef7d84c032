//! Rate systems shipped with the crate.

use super::{parse_system, IneqSystem};
use crate::error::{Error, Result};

/// `(name, source)` for every preset.
pub const PRESETS: &[(&str, &str)] = &[
    ("relay", include_str!("../../presets/relay.sys")),
    ("mac", include_str!("../../presets/mac.sys")),
    ("mac-two-state", include_str!("../../presets/mac-two-state.sys")),
];

pub fn source(name: &str) -> Result<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
        .ok_or_else(|| {
            let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
            Error::Domain(format!("unknown preset {name}; available: {}", names.join(", ")))
        })
}

pub fn load(name: &str) -> Result<IneqSystem> {
    parse_system(source(name)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_parse() {
        for (name, _) in PRESETS {
            let s = load(name).unwrap();
            assert!(!s.keep.is_empty(), "{name}");
        }
        assert!(load("nope").is_err());
    }
}
