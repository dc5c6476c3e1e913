//! Run configuration: a TOML file, or a `_meta.json` written by an earlier run.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use cavity_singlet::scenarios::{scenario_defaults, ProtocolParams};
use serde::Deserialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(format!("unknown format `{other}`; expected csv, json or svg")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verbosity {
    Quiet,
    #[default]
    Warn,
    Info,
    Debug,
}

impl Verbosity {
    pub fn level(self) -> log::LevelFilter {
        match self {
            Verbosity::Quiet => log::LevelFilter::Off,
            Verbosity::Warn => log::LevelFilter::Warn,
            Verbosity::Info => log::LevelFilter::Info,
            Verbosity::Debug => log::LevelFilter::Debug,
        }
    }
}

/// Top level of a TOML config.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    scenario: Option<String>,
    out: Option<PathBuf>,
    formats: Option<Vec<Format>>,
    seed: Option<u64>,
    #[serde(default)]
    verbosity: Verbosity,
    params: Option<toml::Table>,
    sweep: Option<FileSweep>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSweep {
    axis: String,
    values: Vec<f64>,
}

/// Fully resolved configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub scenario: Option<String>,
    pub params: ProtocolParams,
    pub out: PathBuf,
    pub formats: BTreeSet<Format>,
    pub verbosity: Verbosity,
    pub sweep_axis: Option<String>,
    pub sweep_values: Option<Vec<f64>>,
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub scenario: Option<String>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub t_final: Option<f64>,
    pub out: Option<PathBuf>,
    pub formats: Option<Vec<Format>>,
    pub axis: Option<String>,
    pub values: Option<Vec<f64>>,
}

/// Raw pieces read from a file before overrides.
struct Loaded {
    scenario: Option<String>,
    params: serde_json::Map<String, Value>,
    out: Option<PathBuf>,
    formats: Option<Vec<Format>>,
    seed: Option<u64>,
    verbosity: Verbosity,
    sweep: Option<(String, Vec<f64>)>,
}

fn read_toml(text: &str) -> Result<Loaded, String> {
    let cfg: FileConfig = toml::from_str(text).map_err(|e| format!("invalid config: {}", e.message()))?;
    let params = match cfg.params {
        Some(t) => match serde_json::to_value(t).map_err(|e| e.to_string())? {
            Value::Object(m) => m,
            _ => unreachable!("a TOML table serializes to an object"),
        },
        None => Default::default(),
    };
    Ok(Loaded {
        scenario: cfg.scenario,
        params,
        out: cfg.out,
        formats: cfg.formats,
        seed: cfg.seed,
        verbosity: cfg.verbosity,
        sweep: cfg.sweep.map(|s| (s.axis, s.values)),
    })
}

/// A meta file carries the resolved parameters under `params` and, for
/// sweeps, the axis and values under `sweep`.
fn read_meta(text: &str) -> Result<Loaded, String> {
    let v: Value = serde_json::from_str(text).map_err(|e| format!("invalid meta file: {e}"))?;
    let params = match v.get("params") {
        Some(Value::Object(m)) => m.clone(),
        _ => return Err("meta file has no `params` object".into()),
    };
    let scenario = v.get("scenario").and_then(Value::as_str).map(str::to_string);
    let sweep = match v.get("sweep") {
        Some(s) => {
            let axis = s.get("axis").and_then(Value::as_str).ok_or("meta sweep without axis")?;
            let values = serde_json::from_value(s.get("values").cloned().unwrap_or(Value::Null))
                .map_err(|e| format!("meta sweep values: {e}"))?;
            Some((axis.to_string(), values))
        }
        None => None,
    };
    Ok(Loaded {
        scenario,
        params,
        out: None,
        formats: None,
        seed: None,
        verbosity: Verbosity::default(),
        sweep,
    })
}

fn load(path: Option<&Path>) -> Result<Loaded, String> {
    let Some(path) = path else {
        return read_toml("");
    };
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    if path.extension().is_some_and(|e| e == "json") {
        read_meta(&text)
    } else {
        read_toml(&text)
    }
}

/// Scenario defaults, then the file's `[params]`, then command-line flags.
/// Unknown keys anywhere are errors naming the key.
pub fn resolve(path: Option<&Path>, o: &Overrides) -> Result<RunConfig, String> {
    let loaded = load(path)?;
    let scenario = o.scenario.clone().or(loaded.scenario);
    let defaults = match &scenario {
        Some(s) => scenario_defaults(s).map_err(|e| e.to_string())?,
        None => ProtocolParams::default(),
    };
    let mut merged = match serde_json::to_value(&defaults).expect("params serialize") {
        Value::Object(m) => m,
        _ => unreachable!(),
    };
    for (k, v) in loaded.params {
        merged.insert(k, v);
    }
    let mut params: ProtocolParams = serde_json::from_value(Value::Object(merged)).map_err(|e| format!("invalid params: {e}"))?;
    if let Some(seed) = loaded.seed {
        params.seed = seed;
    }
    if let Some(n) = o.n {
        params.n = n;
    }
    if let Some(seed) = o.seed {
        params.seed = seed;
    }
    if let Some(t) = o.t_final {
        params.t_final = Some(t);
    }
    let formats = o
        .formats
        .clone()
        .or(loaded.formats)
        .unwrap_or_else(|| vec![Format::Csv, Format::Json]);
    let (axis, values) = match loaded.sweep {
        Some((a, v)) => (Some(a), Some(v)),
        None => (None, None),
    };
    Ok(RunConfig {
        scenario,
        params,
        out: o.out.clone().or(loaded.out).unwrap_or_else(|| PathBuf::from("results")),
        formats: formats.into_iter().collect(),
        verbosity: loaded.verbosity,
        sweep_axis: o.axis.clone().or(axis),
        sweep_values: o.values.clone().or(values),
    })
}

/// Parses `0,0.05,0.1`; an empty string gives an empty list.
pub fn parse_values(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|e| format!("bad value `{t}`: {e}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toml_cfg(text: &str) -> Result<RunConfig, String> {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.toml");
        std::fs::write(&p, text).unwrap();
        resolve(Some(&p), &Overrides::default())
    }

    #[test]
    fn defaults_without_file() {
        let c = resolve(None, &Overrides::default()).unwrap();
        assert_eq!(c.params, ProtocolParams::default());
        assert_eq!(c.formats, [Format::Csv, Format::Json].into_iter().collect());
    }

    #[test]
    fn file_then_flags() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.toml");
        std::fs::write(&p, "scenario = \"fig4\"\nformats = [\"svg\"]\n[params]\nkappa = 0.05\nn = 5\n").unwrap();
        let o = Overrides {
            n: Some(4),
            ..Overrides::default()
        };
        let c = resolve(Some(&p), &o).unwrap();
        assert_eq!(c.params.n, 4);
        assert_eq!(c.params.kappa, 0.05);
        assert_eq!(c.scenario.as_deref(), Some("fig4"));
        assert_eq!(c.formats, [Format::Svg].into_iter().collect());
    }

    #[test]
    fn unknown_keys_are_named() {
        let e = toml_cfg("[params]\nomega00 = 1.0\n").unwrap_err();
        assert!(e.contains("omega00"), "{e}");
        let e = toml_cfg("scenaro = \"fig3\"\n").unwrap_err();
        assert!(e.contains("scenaro"), "{e}");
    }

    #[test]
    fn values() {
        assert_eq!(parse_values("0, 0.05,0.1").unwrap(), vec![0.0, 0.05, 0.1]);
        assert!(parse_values("").unwrap().is_empty());
        assert!(parse_values("1,x").is_err());
    }
}
