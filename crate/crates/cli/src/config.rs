//! Key-value config files and the deterministic run hash.
//!
//! A config file holds `key = value` lines; `#` starts a comment. Each key
//! is the long name of a flag of the chosen subcommand. The entries are
//! spliced into the argument list ahead of the command-line flags, and
//! since every flag may be repeated with the last occurrence winning, the
//! command line takes precedence.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use sha2::{Digest, Sha256};

/// Overrides the output directory given in a config file.
pub const OUTPUT_DIR_ENV: &str = "P1NC_OUTPUT_DIR";

pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("line {}: expected 'key = value', got '{raw}'", i + 1);
        };
        let k = k.trim().trim_start_matches("--");
        if k.is_empty() || k == "config" {
            bail!("line {}: invalid key '{}'", i + 1, k);
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Flags equivalent to the config entries.
pub fn config_flags(entries: &[(String, String)], env_output_dir: bool) -> Vec<String> {
    let mut args = Vec::new();
    for (k, v) in entries {
        if env_output_dir && k == "output-dir" {
            continue;
        }
        match v.as_str() {
            "true" => args.push(format!("--{k}")),
            "false" => {}
            _ => {
                args.push(format!("--{k}"));
                args.extend(v.split_whitespace().map(str::to_string));
            }
        }
    }
    args
}

/// Removes `--config FILE` from `argv` and splices the file's entries in
/// right after the subcommand name.
pub fn expand_args(mut argv: Vec<String>) -> Result<Vec<String>> {
    let mut path = None;
    let mut i = 1;
    while i < argv.len() {
        if argv[i] == "--config" {
            if i + 1 >= argv.len() {
                bail!("--config needs a file name");
            }
            path = Some(argv.remove(i + 1));
            argv.remove(i);
        } else if let Some(p) = argv[i].strip_prefix("--config=") {
            path = Some(p.to_string());
            argv.remove(i);
        } else {
            i += 1;
        }
    }
    let Some(path) = path else { return Ok(argv) };
    let text = fs::read_to_string(Path::new(&path)).with_context(|| format!("reading config file {path}"))?;
    let flags = config_flags(&parse_config(&text)?, std::env::var_os(OUTPUT_DIR_ENV).is_some());
    let sub = argv.iter().skip(1).position(|a| !a.starts_with('-')).map(|p| p + 2).unwrap_or(argv.len());
    argv.splice(sub..sub, flags);
    Ok(argv)
}

/// First 8 bytes of the SHA-256 of `key=value` lines, in hex.
pub fn run_hash(pairs: &[(&str, String)]) -> String {
    let mut h = Sha256::new();
    for (k, v) in pairs {
        h.update(k.as_bytes());
        h.update(b"=");
        h.update(v.as_bytes());
        h.update(b"\n");
    }
    h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn parses_entries() {
        let e = parse_config("# sweep\nexample = ex2\n  h = 1/8:1/64 # range\n\ncheck-paper = true\n").unwrap();
        assert_eq!(e.len(), 3);
        assert_eq!(e[1], ("h".to_string(), "1/8:1/64".to_string()));
        assert!(parse_config("example ex2").is_err());
        assert!(parse_config("config = x").is_err());
    }

    #[test]
    fn flags_from_entries() {
        let e = parse_config("2d = 4 4\nverify = true\nquiet = false\noutput-dir = a").unwrap();
        assert_eq!(config_flags(&e, false), args("--2d 4 4 --verify --output-dir a"));
        assert_eq!(config_flags(&e, true), args("--2d 4 4 --verify"));
    }

    #[test]
    fn config_spliced_before_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        fs::write(&path, "option = 2\nexample = ex1\n").unwrap();
        let argv = vec![
            "p1nc".into(),
            "solve".into(),
            "--config".into(),
            path.display().to_string(),
            "--option".into(),
            "4".into(),
        ];
        let out = expand_args(argv).unwrap();
        assert_eq!(out, args("p1nc solve --option 2 --example ex1 --option 4"));
    }

    #[test]
    fn hash_is_stable() {
        let a = run_hash(&[("example", "ex1".into()), ("n", "64".into())]);
        assert_eq!(a.len(), 16);
        assert_eq!(a, run_hash(&[("example", "ex1".into()), ("n", "64".into())]));
        assert_ne!(a, run_hash(&[("example", "ex1".into()), ("n", "32".into())]));
    }
}
