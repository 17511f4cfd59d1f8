use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use gdaha::pipeline::Tolerances;
use serde::Serialize;
use serde_json::Value;

/// The header every output file carries: what produced it, the seed,
/// the tolerances, a description of each quantity and the contour used.
#[derive(Debug, Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub command: &'a str,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub tags: BTreeMap<&'static str, &'static str>,
    pub contour: Option<Value>,
    pub result: T,
}

pub fn write_json(dir: &Path, name: &str, value: &impl Serialize) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let text = serde_json::to_string_pretty(value)?;
    fs::write(&path, text).map_err(gdaha::Error::from).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

pub fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = fs::read_to_string(path).map_err(gdaha::Error::from).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).map_err(gdaha::Error::from).with_context(|| format!("parsing {}", path.display()))
}

/// The payload of a file written through [`Envelope`], or the whole document
/// for bare files.
pub fn payload(v: &Value) -> &Value {
    v.get("result").unwrap_or(v)
}

pub fn tags(pairs: &[(&'static str, &'static str)]) -> BTreeMap<&'static str, &'static str> {
    pairs.iter().copied().collect()
}
