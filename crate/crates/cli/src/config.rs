//! Flat `key = value` config files merged with command-line flags.

use std::collections::BTreeMap;
use std::ffi::OsString;

/// Flags that take no value on the command line; in a config file they
/// are written `key = true`.
pub const SWITCHES: [&str; 3] = ["timing", "witnesses", "no-prune"];

/// Effective settings after merging; flags win over the config file.
#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    pub subcommand: String,
    pub settings: BTreeMap<String, String>,
}

impl RunConfig {
    /// Header lines echoing the settings.
    pub fn echo(&self) -> Vec<String> {
        let mut out = vec![format!("subcommand = {}", self.subcommand)];
        out.extend(self.settings.iter().map(|(k, v)| format!("{k} = {v}")));
        out
    }

    /// Arguments in the form clap expects.
    pub fn to_args(&self, bin: &str) -> Vec<String> {
        let mut args = vec![bin.to_string(), self.subcommand.clone()];
        for (k, v) in &self.settings {
            if SWITCHES.contains(&k.as_str()) {
                if v == "true" {
                    args.push(format!("--{k}"));
                }
            } else {
                args.push(format!("--{k}={v}"));
            }
        }
        args
    }
}

pub fn parse_config_text(src: &str) -> Result<BTreeMap<String, String>, String> {
    let mut map = BTreeMap::new();
    for (i, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected `key = value`", i + 1))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

/// Splits argv into a [`RunConfig`]. Returns `Ok(None)` when clap should
/// handle the arguments itself (help, version, no subcommand).
pub fn merge(argv: &[OsString]) -> Result<Option<RunConfig>, String> {
    let args: Vec<String> = argv
        .iter()
        .skip(1)
        .map(|a| a.to_str().map(str::to_string).ok_or("non-UTF-8 argument"))
        .collect::<Result<_, _>>()?;
    if args.is_empty() || args.iter().any(|a| matches!(a.as_str(), "-h" | "--help" | "-V" | "--version" | "help")) {
        return Ok(None);
    }
    let mut flags: Vec<(String, String)> = Vec::new();
    let mut positional = Vec::new();
    let mut i = 0;
    while i < args.len() {
        let a = &args[i];
        if let Some(body) = a.strip_prefix("--") {
            if let Some((k, v)) = body.split_once('=') {
                flags.push((k.to_string(), v.to_string()));
            } else if SWITCHES.contains(&body) {
                flags.push((body.to_string(), "true".to_string()));
            } else {
                let v = args.get(i + 1).ok_or_else(|| format!("flag --{body} needs a value"))?;
                flags.push((body.to_string(), v.clone()));
                i += 1;
            }
        } else {
            positional.push(a.clone());
        }
        i += 1;
    }
    let mut settings = BTreeMap::new();
    if let Some((_, path)) = flags.iter().rev().find(|(k, _)| k == "config") {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {path}: {e}"))?;
        settings = parse_config_text(&text)?;
    }
    for (k, v) in flags {
        if k != "config" {
            settings.insert(k, v);
        }
    }
    let subcommand = match positional.as_slice() {
        [s] => s.clone(),
        [] => settings
            .remove("subcommand")
            .ok_or("missing subcommand")?,
        _ => return Err(format!("unexpected arguments: {}", positional[1..].join(" "))),
    };
    settings.remove("subcommand");
    Ok(Some(RunConfig { subcommand, settings }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn flags_win() {
        let dir = std::env::temp_dir().join("dioph-config-test.cfg");
        std::fs::write(&dir, "# run\nlambda = 3\nT = 10..20\ntiming = true\n").unwrap();
        let cfg = merge(&os(&["dioph", "count", "--config", dir.to_str().unwrap(), "--lambda=4"]))
            .unwrap()
            .unwrap();
        assert_eq!(cfg.settings["lambda"], "4");
        assert_eq!(cfg.settings["T"], "10..20");
        let args = cfg.to_args("dioph");
        assert!(args.contains(&"--timing".to_string()));
        assert!(merge(&os(&["dioph", "--help"])).unwrap().is_none());
    }
}
