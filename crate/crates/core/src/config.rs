//! `key=value` configuration files, layered under command-line flags.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Settings that may come from a config file. `None` means "not set here".
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Config {
    pub q: Option<u64>,
    pub p: Option<u64>,
    pub h: Option<u32>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub timings: Option<bool>,
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Parse(format!("bad value for {key}: {v:?}")))
}

impl Config {
    /// Blank lines and lines starting with `#` are ignored; unknown keys are errors.
    pub fn parse(text: &str) -> Result<Config> {
        let mut c = Config::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key=value", n + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "q" => c.q = Some(num(k, v)?),
                "p" => c.p = Some(num(k, v)?),
                "h" => c.h = Some(num(k, v)?),
                "seed" => c.seed = Some(num(k, v)?),
                "jobs" => c.jobs = Some(num(k, v)?),
                "json" => c.json = Some(PathBuf::from(v)),
                "csv" => c.csv = Some(PathBuf::from(v)),
                "timings" => c.timings = Some(num(k, v)?),
                _ => return Err(Error::Parse(format!("line {}: unknown key {k:?}", n + 1))),
            }
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Config> {
        Config::parse(&std::fs::read_to_string(path)?)
    }

    /// Fields set in `self` win over `lower`.
    pub fn over(self, lower: Config) -> Config {
        Config {
            q: self.q.or(lower.q),
            p: self.p.or(lower.p),
            h: self.h.or(lower.h),
            seed: self.seed.or(lower.seed),
            jobs: self.jobs.or(lower.jobs),
            json: self.json.or(lower.json),
            csv: self.csv.or(lower.csv),
            timings: self.timings.or(lower.timings),
        }
    }

    /// `q` from either `q` or `p^h`; setting both (in one layer) is an error.
    pub fn resolve_q(&self) -> Result<Option<u64>> {
        match (self.q, self.p, self.h) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                Err(Error::Parse("q is mutually exclusive with p and h".into()))
            }
            (Some(q), None, None) => Ok(Some(q)),
            (None, Some(p), h) => {
                let h = h.unwrap_or(1);
                p.checked_pow(h).map(Some).ok_or(Error::InvalidQ(u64::MAX))
            }
            (None, None, Some(_)) => Err(Error::Parse("h given without p".into())),
            (None, None, None) => Ok(None),
        }
    }
}
