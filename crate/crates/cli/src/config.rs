//! `--config FILE` support: `key = value` lines become flags unless the
//! command line already sets them.

use std::fs;

pub fn merge(mut argv: Vec<String>) -> Result<Vec<String>, String> {
    let mut path = None;
    let mut i = 1;
    while i < argv.len() {
        if argv[i] == "--config" {
            if i + 1 >= argv.len() {
                return Err("--config needs a path".into());
            }
            path = Some(argv.remove(i + 1));
            argv.remove(i);
            continue;
        }
        if let Some(p) = argv[i].strip_prefix("--config=") {
            path = Some(p.to_string());
            argv.remove(i);
            continue;
        }
        i += 1;
    }
    let Some(path) = path else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read {path}: {e}"))?;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("{path}:{}: expected key=value", lineno + 1))?;
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        let val = v.trim().trim_matches('"');
        let flag = format!("--{key}");
        let set = argv.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if set {
            continue;
        }
        match val {
            "true" => argv.push(flag),
            "false" => {}
            _ => {
                argv.push(flag);
                argv.push(val.to_string());
            }
        }
    }
    Ok(argv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &[&str]) -> Vec<String> {
        s.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn flags_win_over_file() {
        let dir = std::env::temp_dir().join(format!("ggjet-cfg-{}", std::process::id()));
        fs::write(&dir, "# sweep\nn = 3\nkappa=2\nformat = csv\n").unwrap();
        let out = merge(args(&["ggjet", "rank", "--n", "2", "--config", dir.to_str().unwrap()])).unwrap();
        assert_eq!(out, args(&["ggjet", "rank", "--n", "2", "--kappa", "2", "--format", "csv"]));
        fs::remove_file(&dir).unwrap();
    }

    #[test]
    fn no_config_is_identity() {
        let a = args(&["ggjet", "verify"]);
        assert_eq!(merge(a.clone()).unwrap(), a);
    }
}
