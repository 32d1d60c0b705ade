//! Run configuration: defaults, a flat `key = value` file, and overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::quadrature::QuadratureSpec;

pub const THREADS_ENV: &str = "THETA_LAB_THREADS";

/// Source of the Fourier constant used in the closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConstantChoice {
    /// Fit it from x-averages.
    Auto,
    Fixed(f64),
}

impl std::str::FromStr for ConstantChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("auto") {
            return Ok(ConstantChoice::Auto);
        }
        let v: f64 = s
            .parse()
            .map_err(|_| Error::InvalidInput(format!("constant must be 'auto' or a number, got {s:?}")))?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidInput(format!("constant {v} must be positive")));
        }
        Ok(ConstantChoice::Fixed(v))
    }
}

impl std::fmt::Display for ConstantChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConstantChoice::Auto => f.write_str("auto"),
            ConstantChoice::Fixed(v) => write!(f, "{v}"),
        }
    }
}

/// Worker-count request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threads {
    Auto,
    Count(usize),
}

impl std::str::FromStr for Threads {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Threads::Auto);
        }
        match s.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Threads::Count(n)),
            _ => Err(Error::InvalidInput(format!("threads must be 'auto' or a positive integer, got {s:?}"))),
        }
    }
}

impl std::fmt::Display for Threads {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Threads::Auto => f.write_str("auto"),
            Threads::Count(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub primes: Vec<u64>,
    pub s_values: Vec<f64>,
    pub y_trunc: f64,
    pub tol_tile: f64,
    pub tol_ip: f64,
    pub grid: Vec<f64>,
    pub constant: ConstantChoice,
    pub out: Option<PathBuf>,
    pub threads: Threads,
    /// Seed for the random test points of the pointwise suites.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        Self {
            primes: vec![3, 5, 7],
            s_values: vec![1.5, 2.0, 3.0],
            y_trunc: q.y_trunc,
            tol_tile: q.tol_tile,
            tol_ip: q.tol_ip,
            grid: vec![0.05, 0.1, 0.2, 0.3, 0.5],
            constant: ConstantChoice::Auto,
            out: None,
            threads: Threads::Auto,
            seed: 20_240_601,
        }
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    let items = value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| Error::InvalidInput(format!("bad entry {s:?} in {key}")))
        })
        .collect::<Result<Vec<T>>>()?;
    if items.is_empty() {
        return Err(Error::InvalidInput(format!("{key} must not be empty")));
    }
    Ok(items)
}

fn parse_real(key: &str, value: &str) -> Result<f64> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidInput(format!("{key} must be a number, got {value:?}")))
}

impl RunConfig {
    /// Applies one `key = value` setting. Keys match the long flag names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key.trim() {
            "p" => self.primes = parse_list("p", value)?,
            "s" => self.s_values = parse_list("s", value)?,
            "Y" | "y-trunc" | "y_trunc" => self.y_trunc = parse_real("Y", value)?,
            "tol-tile" | "tol_tile" => self.tol_tile = parse_real("tol-tile", value)?,
            "tol-ip" | "tol_ip" => self.tol_ip = parse_real("tol-ip", value)?,
            "grid" => self.grid = parse_list("grid", value)?,
            "c" => self.constant = value.parse()?,
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "threads" => self.threads = value.parse()?,
            "seed" => {
                self.seed = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("seed must be an integer, got {value:?}")))?
            }
            other => return Err(Error::InvalidInput(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Applies every setting of a flat config text: one `key = value` per
    /// line, `#` starts a comment, values may be quoted.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::InvalidInput(format!("config line {}: expected key = value", n + 1))
            })?;
            let v = v.trim().trim_matches('"');
            self.set(k, v)
                .map_err(|e| Error::InvalidInput(format!("config line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read config {}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    /// Worker count after the environment override.
    pub fn effective_threads(&self, env: Option<&str>) -> Result<Threads> {
        match env {
            Some(v) if !v.trim().is_empty() => v.parse(),
            _ => Ok(self.threads),
        }
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        QuadratureSpec {
            y_trunc: self.y_trunc,
            tol_tile: self.tol_tile,
            tol_ip: self.tol_ip,
            ..QuadratureSpec::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.quadrature().validate()?;
        for &p in &self.primes {
            if p == 2 || !crate::modular::is_prime(p) {
                return Err(Error::InvalidInput(format!("{p} is not an odd prime")));
            }
        }
        if self.s_values.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidInput("s values must be finite".into()));
        }
        Ok(())
    }

    /// Echo of every setting, as written into reports.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let join = |v: &[String]| v.join(",");
        let mut m = BTreeMap::new();
        m.insert("p".into(), join(&self.primes.iter().map(|p| p.to_string()).collect::<Vec<_>>()));
        m.insert("s".into(), join(&self.s_values.iter().map(|s| s.to_string()).collect::<Vec<_>>()));
        m.insert("Y".into(), self.y_trunc.to_string());
        m.insert("tol_tile".into(), self.tol_tile.to_string());
        m.insert("tol_ip".into(), self.tol_ip.to_string());
        m.insert("grid".into(), join(&self.grid.iter().map(|g| g.to_string()).collect::<Vec<_>>()));
        m.insert("c".into(), self.constant.to_string());
        m.insert("threads".into(), self.threads.to_string());
        m.insert("seed".into(), self.seed.to_string());
        if let Some(out) = &self.out {
            m.insert("out".into(), out.display().to_string());
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_override() {
        let mut c = RunConfig::default();
        c.apply_text("# comment\np = 3, 5\nY = 50\nc = auto\ngrid = \"0.05,0.1,0.2,0.3,0.4\"\n")
            .unwrap();
        assert_eq!(c.primes, vec![3, 5]);
        assert_eq!(c.y_trunc, 50.0);
        c.set("Y", "400").unwrap();
        assert_eq!(c.y_trunc, 400.0);
        assert_eq!(c.grid.len(), 5);
        c.validate().unwrap();
    }

    #[test]
    fn bad_inputs() {
        let mut c = RunConfig::default();
        assert!(c.apply_text("nonsense").is_err());
        assert!(c.set("colour", "blue").is_err());
        assert!(c.set("c", "-1").is_err());
        assert!(c.set("threads", "0").is_err());
        c.set("p", "9").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn environment_wins() {
        let mut c = RunConfig::default();
        c.set("threads", "2").unwrap();
        assert_eq!(c.effective_threads(Some("6")).unwrap(), Threads::Count(6));
        assert_eq!(c.effective_threads(None).unwrap(), Threads::Count(2));
        assert!(c.effective_threads(Some("x")).is_err());
    }

    #[test]
    fn echo_round_trips_through_set() {
        let mut c = RunConfig::default();
        c.set("c", "4").unwrap();
        let mut d = RunConfig::default();
        for (k, v) in c.echo() {
            d.set(&k, &v).unwrap();
        }
        assert_eq!(c, d);
    }
}
