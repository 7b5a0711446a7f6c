//! Flat `key = value` run configuration, one pair per line, `#` comments.

use std::collections::BTreeMap;

use mldec::decoders::{AlphaSpec, DecoderKind};
use mldec::gf2::DEFAULT_POLAR_DESIGN_EBN0_DB;
use mldec::montecarlo::{EbN0Grid, SimConfig, StopRule};
use mldec::CodeId;

pub const KEYS: [&str; 10] =
    ["code", "decoders", "ebn0", "min_errors", "max_frames", "seed", "alpha", "workers", "polar_design_db", "out"];

pub type ConfigMap = BTreeMap<String, String>;

pub fn parse(text: &str) -> Result<ConfigMap, String> {
    let mut map = ConfigMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", no + 1))?;
        let key = key.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(format!("line {}: unknown key `{key}`", no + 1));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

pub fn render(map: &ConfigMap) -> String {
    map.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

pub fn parse_alpha(s: &str) -> Result<AlphaSpec, String> {
    let s = s.trim().to_ascii_lowercase();
    if s == "matched" {
        return Ok(AlphaSpec::Matched);
    }
    s.strip_prefix("fixed@")
        .and_then(|db| db.parse::<f64>().ok())
        .filter(|db| db.is_finite())
        .map(AlphaSpec::FixedAt)
        .ok_or_else(|| format!("alpha must be `matched` or `fixed@<dB>`, got `{s}`"))
}

fn get<T: std::str::FromStr>(map: &ConfigMap, key: &str) -> Result<Option<T>, String> {
    map.get(key)
        .map(|v| v.parse::<T>().map_err(|_| format!("invalid value for `{key}`: `{v}`")))
        .transpose()
}

fn require<'a>(map: &'a ConfigMap, key: &str) -> Result<&'a str, String> {
    map.get(key).map(String::as_str).ok_or_else(|| format!("missing required setting `{key}`"))
}

pub fn to_sim_config(map: &ConfigMap) -> Result<SimConfig, String> {
    let code: CodeId = require(map, "code")?.parse().map_err(|e: mldec::Error| e.to_string())?;
    let decoders = DecoderKind::parse_list(require(map, "decoders")?).map_err(|e| e.to_string())?;
    let grid = EbN0Grid::parse(require(map, "ebn0")?).map_err(|e| e.to_string())?;
    let defaults = StopRule::default();
    let stop = StopRule::new(
        get(map, "min_errors")?.unwrap_or(defaults.min_frame_errors),
        get(map, "max_frames")?.unwrap_or(defaults.max_frames),
    )
    .map_err(|e| e.to_string())?;
    let mut config = SimConfig::new(code, decoders, grid);
    config.stop = stop;
    config.seed = get(map, "seed")?.unwrap_or(config.seed);
    config.workers = get(map, "workers")?.unwrap_or(0);
    config.polar_design_ebn0_db = get(map, "polar_design_db")?.unwrap_or(DEFAULT_POLAR_DESIGN_EBN0_DB);
    if let Some(a) = map.get("alpha") {
        config.alpha = parse_alpha(a)?;
    }
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_convert() {
        let map = parse("# sweep\ncode = hamming74\ndecoders = ml, mlnn\nebn0 = 0:1:3\nmin-errors = 5\nmax_frames=100\nalpha = fixed@4\n").unwrap();
        let cfg = to_sim_config(&map).unwrap();
        assert_eq!(cfg.code, CodeId::Hamming74);
        assert_eq!(cfg.decoders.len(), 2);
        assert_eq!(cfg.stop, StopRule { min_frame_errors: 5, max_frames: 100 });
        assert_eq!(cfg.alpha, AlphaSpec::FixedAt(4.0));
        assert_eq!(parse(&render(&map)).unwrap(), map);
    }

    #[test]
    fn rejects_unknown_keys_and_values() {
        assert!(parse("colour = red").is_err());
        assert!(parse("code hamming").is_err());
        let map = parse("code = hamming74\ndecoders = ml\nebn0 = 0\nseed = x").unwrap();
        assert!(to_sim_config(&map).is_err());
        assert!(parse_alpha("fixed@").is_err());
        assert!(parse_alpha("sometimes").is_err());
    }
}
