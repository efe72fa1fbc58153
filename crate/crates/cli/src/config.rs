//! `--config <file>`: a JSON object whose keys are long flag names.
//! Its entries are appended to the command line; naming a flag in both
//! places is rejected.

use std::ffi::OsString;

use serde_json::Value;

pub fn merge(argv: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let strs: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let mut path = None;
    for (i, a) in strs.iter().enumerate() {
        if a == "--config" {
            path = Some(strs.get(i + 1).cloned().ok_or("--config needs a path")?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_owned());
        }
    }
    let Some(path) = path else { return Ok(argv) };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let obj = match serde_json::from_str::<Value>(&text) {
        Ok(Value::Object(m)) => m,
        Ok(_) => return Err(format!("config {path} must hold a JSON object")),
        Err(e) => return Err(format!("config {path}: {e}")),
    };
    let mut out = argv;
    for (key, value) in obj {
        if key == "config" {
            return Err("config files cannot nest".into());
        }
        let flag = format!("--{key}");
        if strs.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}="))) {
            return Err(format!("{flag} is set both on the command line and in {path}"));
        }
        match value {
            Value::Bool(true) => out.push(flag.into()),
            Value::Bool(false) | Value::Null => {}
            Value::String(s) => out.push(format!("{flag}={s}").into()),
            Value::Number(n) => out.push(format!("{flag}={n}").into()),
            other => return Err(format!("unsupported value for {key}: {other}")),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn merges_and_rejects() {
        let dir = std::env::temp_dir().join(format!("negdep-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("c.json");
        std::fs::write(&p, r#"{"s": 4, "family": "faure", "digits": true}"#).unwrap();
        let cfg = format!("--config={}", p.display());
        let merged = merge(args(&["negdep", "gen", "--n", "5", &cfg])).unwrap();
        assert!(merged.contains(&OsString::from("--s=4")));
        assert!(merged.contains(&OsString::from("--digits")));
        assert!(merge(args(&["negdep", "gen", "--s", "3", &cfg])).is_err());
        assert_eq!(merge(args(&["negdep", "gen"])).unwrap().len(), 2);
    }
}
