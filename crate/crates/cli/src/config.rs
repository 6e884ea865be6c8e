//! JSON config files. Every field `name` becomes the flag `--name` (with `_`
//! read as `-`), inserted right after the subcommand so that flags given on
//! the command line override it.

use std::ffi::OsString;
use std::path::Path;

use psiosc::{Error, Result};
use serde_json::Value;

const SUBCOMMANDS: [&str; 7] = [
    "psi",
    "signs",
    "measure2d",
    "measure-md",
    "lemma",
    "experiment",
    "report",
];

/// Path given with `--config FILE` or `--config=FILE`.
fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

fn flags_of(path: &Path) -> Result<Vec<OsString>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read config {}: {e}", path.display())))?;
    let root: Value = serde_json::from_str(&text)
        .map_err(|e| Error::Input(format!("config {} is not valid JSON: {e}", path.display())))?;
    let Value::Object(map) = root else {
        return Err(Error::Input(format!("config {} must be a JSON object", path.display())));
    };
    let mut out = vec![];
    for (key, value) in map {
        if key == "config" {
            return Err(Error::Input("config files cannot nest".into()));
        }
        let flag = format!("--{}", key.replace('_', "-"));
        let scalar = |v: &Value| -> Result<String> {
            match v {
                Value::String(s) => Ok(s.clone()),
                Value::Number(n) => Ok(n.to_string()),
                _ => Err(Error::Input(format!(
                    "config field {key:?} has an unsupported value {v}"
                ))),
            }
        };
        match &value {
            Value::Null | Value::Bool(false) => {}
            Value::Bool(true) => out.push(flag.into()),
            Value::Array(items) => {
                let parts = items.iter().map(scalar).collect::<Result<Vec<_>>>()?;
                out.push(flag.into());
                out.push(parts.join(",").into());
            }
            v => {
                out.push(flag.into());
                out.push(scalar(v)?.into());
            }
        }
    }
    Ok(out)
}

/// `argv` with the fields of the config file spliced in.
pub fn expand(argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let flags = flags_of(Path::new(&path))?;
    let Some(pos) = argv
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()))
    else {
        return Ok(argv);
    };
    let mut out = argv[..=pos].to_vec();
    // a positional lemma id or report input has to stay first
    if matches!(argv[pos].to_str(), Some("lemma" | "report")) {
        if let Some(next) = argv.get(pos + 1).filter(|a| !a.to_string_lossy().starts_with('-')) {
            out.push(next.clone());
            out.extend(flags);
            out.extend_from_slice(&argv[pos + 2..]);
            return Ok(out);
        }
    }
    out.extend(flags);
    out.extend_from_slice(&argv[pos + 1..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(|s| s.into()).collect()
    }

    #[test]
    fn splices_after_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        std::fs::write(&p, r#"{"k": 4, "m": 2, "first_sum": true, "ladder": [16, 32]}"#).unwrap();
        let ps = p.to_str().unwrap();
        let out = expand(os(&["psiosc", "--config", ps, "lemma", "6", "--k", "8"])).unwrap();
        let expect = [
            "psiosc",
            "--config",
            ps,
            "lemma",
            "6",
            "--first-sum",
            "--k",
            "4",
            "--ladder",
            "16,32",
            "--m",
            "2",
            "--k",
            "8",
        ];
        assert_eq!(out, os(&expect));
    }

    #[test]
    fn rejects_bad_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        std::fs::write(&p, "[1, 2]").unwrap();
        assert!(expand(os(&["psiosc", "psi", "--config", p.to_str().unwrap()])).is_err());
        assert!(expand(os(&["psiosc", "psi", "--config", "/nonexistent/c.json"])).is_err());
    }
}
