//! Flat `key = value` configuration files.
//!
//! Keys match the command-line flags (`problem`, `mesh`, `cfl`, `tfinal`,
//! `ct`, `pp`, `nu`, `gamma`, `out`, `snapshots`, `threads`). Blank lines and
//! lines starting with `#` are ignored.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::driver::RunConfig;
use crate::error::{MhdError, Result};
use crate::problems::ProblemId;

pub const KEYS: [&str; 13] = [
    "problem", "mesh", "cfl", "tfinal", "ct", "pp", "nu", "gamma", "out", "snapshots", "threads", "levels",
    "cfl_schedule",
];

/// Ordered key/value settings.
pub type Settings = BTreeMap<String, String>;

pub fn parse_settings(text: &str) -> Result<Settings> {
    let mut out = Settings::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| MhdError::Config(format!("line {}: expected key = value", n + 1)))?;
        let k = k.trim().replace('-', "_");
        if !KEYS.contains(&k.as_str()) {
            return Err(MhdError::Config(format!("line {}: unknown key '{k}'", n + 1)));
        }
        out.insert(k, v.trim().to_string());
    }
    Ok(out)
}

pub fn read_settings(path: &Path) -> Result<Settings> {
    parse_settings(&std::fs::read_to_string(path)?)
}

/// `NX[,NY[,NZ]]` (also accepts `x` as separator).
pub fn parse_mesh(s: &str) -> Result<Vec<usize>> {
    let v: Vec<usize> = s
        .split([',', 'x'])
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| MhdError::Config(format!("bad mesh extent '{p}'")))
        })
        .collect::<Result<_>>()?;
    if v.is_empty() || v.len() > 3 || v.contains(&0) {
        return Err(MhdError::Config(format!("mesh '{s}' needs 1 to 3 positive extents")));
    }
    Ok(v)
}

pub fn parse_switch(s: &str) -> Result<bool> {
    match s.trim() {
        "on" | "true" | "1" | "yes" => Ok(true),
        "off" | "false" | "0" | "no" => Ok(false),
        _ => Err(MhdError::Config(format!("expected on/off, got '{s}'"))),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| MhdError::Config(format!("bad value '{s}' for {key}")))
}

/// A run configuration plus the requested worker count.
#[derive(Clone, Debug, PartialEq)]
pub struct Resolved {
    pub run: RunConfig,
    pub threads: Option<usize>,
    pub levels: usize,
    /// Halve the CFL number per mesh doubling in convergence studies.
    pub halve_cfl: bool,
}

/// Builds a configuration from settings; `problem` is required.
pub fn resolve(settings: &Settings) -> Result<Resolved> {
    let problem: ProblemId = settings
        .get("problem")
        .ok_or_else(|| MhdError::Config("no problem given".into()))?
        .parse()?;
    let mut run = RunConfig::new(problem);
    let mut threads = None;
    let mut levels = 3;
    let mut halve_cfl = false;
    for (k, v) in settings {
        match k.as_str() {
            "problem" => {}
            "mesh" => run.mesh = parse_mesh(v)?,
            "cfl" => run.cfl = parse_num(k, v)?,
            "tfinal" => run.t_final = parse_num(k, v)?,
            "ct" => run.ct = parse_switch(v)?,
            "pp" => run.pp = parse_switch(v)?,
            "nu" => run.nu = parse_num(k, v)?,
            "gamma" => run.gamma = parse_num(k, v)?,
            "out" => run.out_dir = Some(PathBuf::from(v)),
            "snapshots" => run.snapshots = parse_num(k, v)?,
            "threads" => threads = Some(parse_num::<usize>(k, v)?).filter(|&n| n > 0),
            "levels" => levels = parse_num(k, v)?,
            "cfl_schedule" => {
                halve_cfl = match v.as_str() {
                    "fixed" => false,
                    "halved" => true,
                    _ => return Err(MhdError::Config(format!("cfl_schedule is fixed or halved, got '{v}'"))),
                }
            }
            _ => return Err(MhdError::Config(format!("unknown key '{k}'"))),
        }
    }
    run.validate()?;
    if levels < 1 {
        return Err(MhdError::Config("levels must be >= 1".into()));
    }
    Ok(Resolved {
        run,
        threads,
        levels,
        halve_cfl,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_override() {
        let mut s = parse_settings("# comment\nproblem = rotor\nmesh = 50,50\ncfl=0.4\n\npp = off\n").unwrap();
        s.insert("cfl".into(), "0.3".into());
        let r = resolve(&s).unwrap();
        assert_eq!(r.run.problem, ProblemId::Rotor);
        assert_eq!(r.run.mesh, vec![50, 50]);
        assert_eq!(r.run.cfl, 0.3);
        assert!(!r.run.pp);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_settings("bogus = 1").is_err());
        assert!(parse_settings("no equals sign").is_err());
        assert!(parse_mesh("0,4").is_err());
        assert_eq!(parse_mesh("32x64").unwrap(), vec![32, 64]);
        assert!(parse_switch("maybe").is_err());
        let mut s = Settings::new();
        s.insert("problem".into(), "rotor".into());
        s.insert("cfl".into(), "2".into());
        assert!(resolve(&s).is_err());
    }
}
