//! `key = value` config files, merged into the argument list so that
//! command-line flags override them.

use std::ffi::OsString;
use std::path::Path;

/// Parses config text into `--key value` pairs. Keys may use `_` or `-`;
/// `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Vec<OsString>, String> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!("config line {}: expected `key = value`", n + 1));
        };
        let key = key.trim().replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(format!("config line {}: bad key", n + 1));
        }
        out.push(format!("--{key}").into());
        out.push(value.trim().into());
    }
    Ok(out)
}

/// Pulls `--config PATH` out of `argv` and splices the file's settings in
/// right after the subcommand name, ahead of the user's own flags.
pub fn expand_args(argv: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let mut args = Vec::with_capacity(argv.len());
    let mut config = None;
    let mut it = argv.into_iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            config = Some(it.next().ok_or("--config needs a path")?);
        } else if let Some(p) = s.strip_prefix("--config=") {
            config = Some(p.into());
        } else {
            args.push(a);
        }
    }
    let Some(path) = config else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| format!("cannot read config {}: {e}", Path::new(&path).display()))?;
    let extra = parse_config(&text)?;
    let at = args
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map_or(args.len(), |p| p + 2);
    args.splice(at..at, extra);
    Ok(args)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let got = parse_config("# fleet\nnum_gans = 3\n\nepochs=5 # short\n").unwrap();
        let want: Vec<OsString> = ["--num-gans", "3", "--epochs", "5"]
            .iter()
            .map(Into::into)
            .collect();
        assert_eq!(got, want);
        assert!(parse_config("nonsense").is_err());
    }

    #[test]
    fn config_lands_after_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.conf");
        std::fs::write(&cfg, "epochs = 5\n").unwrap();
        let argv: Vec<OsString> = [
            "gangan",
            "--config",
            cfg.to_str().unwrap(),
            "train-fleet",
            "--epochs",
            "7",
        ]
        .iter()
        .map(Into::into)
        .collect();
        let got = expand_args(argv).unwrap();
        let want: Vec<OsString> = ["gangan", "train-fleet", "--epochs", "5", "--epochs", "7"]
            .iter()
            .map(Into::into)
            .collect();
        assert_eq!(got, want);
    }
}
