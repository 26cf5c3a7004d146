//! Optional key=value config file supplying flag defaults.
//!
//! Recognized keys: `format`, `seed`, `workers`, `max-attempts`, `trials`,
//! `strategy`. Blank lines and lines starting with `#` are ignored.
//! Explicit command-line flags always win over config values.

use std::path::Path;

#[derive(Debug, Default, Clone)]
pub struct ConfigDefaults {
    pub format: Option<String>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub max_attempts: Option<u32>,
    pub trials: Option<u64>,
    pub strategy: Option<String>,
}

pub fn load(path: &Path) -> Result<ConfigDefaults, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse(text: &str) -> Result<ConfigDefaults, String> {
    let mut defaults = ConfigDefaults::default();
    for (index, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key=value", index + 1))?;
        let (key, value) = (key.trim(), value.trim());
        let parse_err = |e| format!("line {}: bad value for {key}: {e}", index + 1);
        match key {
            "format" => defaults.format = Some(value.to_string()),
            "seed" => defaults.seed = Some(value.parse().map_err(parse_err)?),
            "workers" => defaults.workers = Some(value.parse().map_err(parse_err)?),
            "max-attempts" => defaults.max_attempts = Some(value.parse().map_err(parse_err)?),
            "trials" => defaults.trials = Some(value.parse().map_err(parse_err)?),
            "strategy" => defaults.strategy = Some(value.to_string()),
            other => return Err(format!("line {}: unknown key {other}", index + 1)),
        }
    }
    Ok(defaults)
}
