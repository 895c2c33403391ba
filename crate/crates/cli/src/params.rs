//! Parameter resolution: command line first, then the config file, then the
//! built-in default. Every resolved value is recorded for the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use serde_json::Value as Json;

use catamp::Pairing;

use crate::CliError;

/// Keys accepted in a config file; they match the long flag names.
pub const KNOWN_KEYS: &[&str] = &[
    "pairing",
    "alpha",
    "alpha-range",
    "x-range",
    "loss",
    "targets",
    "window",
    "out",
    "format",
    "nodes",
    "stages",
    "rule",
    "x0",
    "grid-half",
    "grid-step",
    "axes",
    "max-terms",
    "prune-tol",
    "reports",
    "checkpoints",
];

/// `start:stop:step`, inclusive of `stop` when it lies on the lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

const MAX_RANGE_POINTS: usize = 10_000_000;

impl Range {
    pub fn values(&self) -> Vec<f64> {
        let n = self.intervals();
        (0..=n)
            .map(|i| if i == n && self.on_lattice() { self.stop } else { self.start + self.step * i as f64 })
            .collect()
    }

    fn ratio(&self) -> f64 {
        (self.stop - self.start) / self.step
    }

    fn on_lattice(&self) -> bool {
        (self.ratio() - self.ratio().round()).abs() < 1e-9
    }

    fn intervals(&self) -> usize {
        if self.on_lattice() {
            self.ratio().round() as usize
        } else {
            self.ratio().floor() as usize
        }
    }
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("range `{s}` must look like start:stop:step"));
        }
        let num = |p: &str| p.trim().parse::<f64>().map_err(|_| format!("range `{s}`: `{p}` is not a number"));
        let r = Range { start: num(parts[0])?, stop: num(parts[1])?, step: num(parts[2])? };
        if !(r.start.is_finite() && r.stop.is_finite() && r.step.is_finite()) {
            return Err(format!("range `{s}` is not finite"));
        }
        if r.start > r.stop {
            return Err(format!("range `{s}`: start exceeds stop"));
        }
        if r.step <= 0.0 {
            return Err(format!("range `{s}`: step must be positive"));
        }
        if r.ratio() > MAX_RANGE_POINTS as f64 {
            return Err(format!("range `{s}` has more than {MAX_RANGE_POINTS} points"));
        }
        Ok(r)
    }
}

/// Flat `key = value` file; `#` starts a comment.
pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", n + 1))?;
        let key = k.trim().replace('_', "-");
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(format!("line {}: unknown key `{}`", n + 1, k.trim()));
        }
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(format!("line {}: duplicate key `{key}`", n + 1));
        }
    }
    Ok(out)
}

pub struct Params {
    cli: BTreeMap<String, String>,
    file: BTreeMap<String, String>,
    used: BTreeMap<String, Json>,
}

impl Params {
    pub fn new(cli: BTreeMap<String, String>, file: BTreeMap<String, String>) -> Self {
        Params { cli, file, used: BTreeMap::new() }
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.cli.get(key).or_else(|| self.file.get(key)).map(String::as_str)
    }

    pub fn has(&self, key: &str) -> bool {
        self.raw(key).is_some()
    }

    fn record(&mut self, key: &str, v: impl Serialize) {
        self.used.insert(key.to_string(), serde_json::to_value(v).unwrap_or(Json::Null));
    }

    fn parse<T: FromStr>(&self, key: &str, raw: &str) -> Result<T, CliError> {
        raw.trim().parse().map_err(|_| CliError::Usage(format!("--{key}: cannot parse `{raw}`")))
    }

    pub fn value<T: FromStr + Serialize + Clone>(&mut self, key: &str, default: T) -> Result<T, CliError> {
        let v = match self.raw(key) {
            Some(r) => self.parse(key, r)?,
            None => default,
        };
        self.record(key, v.clone());
        Ok(v)
    }

    pub fn optional<T: FromStr + Serialize + Clone>(&mut self, key: &str) -> Result<Option<T>, CliError> {
        let v = match self.raw(key) {
            Some(r) => Some(self.parse::<T>(key, r)?),
            None => None,
        };
        if let Some(x) = &v {
            self.record(key, x.clone());
        }
        Ok(v)
    }

    pub fn list(&mut self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        let v = match self.raw(key) {
            Some(r) => r
                .split(',')
                .map(|p| self.parse::<f64>(key, p))
                .collect::<Result<Vec<_>, _>>()?,
            None => default.to_vec(),
        };
        if v.is_empty() {
            return Err(CliError::Usage(format!("--{key} is empty")));
        }
        self.record(key, &v);
        Ok(v)
    }

    pub fn range(&mut self, key: &str, default: &str) -> Result<Range, CliError> {
        let raw = self.raw(key).unwrap_or(default).to_string();
        let r: Range = raw.parse().map_err(|e: String| CliError::Usage(format!("--{key}: {e}")))?;
        self.record(key, raw);
        Ok(r)
    }

    /// `--alpha a[,b...]` or `--alpha-range`, never both.
    pub fn alphas(&mut self, default_range: &str) -> Result<Vec<f64>, CliError> {
        match (self.has("alpha"), self.has("alpha-range")) {
            (true, true) => Err(CliError::Usage("give either --alpha or --alpha-range, not both".into())),
            (true, false) => self.list("alpha", &[]),
            _ => Ok(self.range("alpha-range", default_range)?.values()),
        }
    }

    pub fn single(&mut self, key: &str, default: f64) -> Result<f64, CliError> {
        let v = self.list(key, &[default])?;
        if v.len() != 1 {
            return Err(CliError::Usage(format!("--{key} takes a single value here")));
        }
        Ok(v[0])
    }

    pub fn pairing(&mut self, default: Pairing) -> Result<Pairing, CliError> {
        let p = match self.raw("pairing") {
            Some(r) => r.parse().map_err(|_| CliError::Usage(format!("--pairing: unknown pairing `{r}`")))?,
            None => default,
        };
        self.record("pairing", p);
        Ok(p)
    }

    pub fn into_manifest(self) -> BTreeMap<String, Json> {
        self.used
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_keep_their_endpoints() {
        let r: Range = "0.1:2.5:0.1".parse().unwrap();
        let v = r.values();
        assert_eq!(v.len(), 25);
        assert_eq!(v[0], 0.1);
        assert_eq!(*v.last().unwrap(), 2.5);
        assert_eq!("-3:3:0.01".parse::<Range>().unwrap().values().len(), 601);
        assert_eq!("0:1:0.3".parse::<Range>().unwrap().values(), vec![0.0, 0.3, 0.6, 0.8999999999999999]);
        assert_eq!("1:1:0.5".parse::<Range>().unwrap().values(), vec![1.0]);
    }

    #[test]
    fn malformed_ranges() {
        for bad in ["1:2", "a:2:0.1", "2:1:0.1", "0:1:0", "0:1:-1", "0:inf:1", "0:1:1e-12"] {
            assert!(bad.parse::<Range>().is_err(), "{bad}");
        }
    }

    #[test]
    fn config_lines() {
        let c = parse_config("# sweep\nalpha_range = 0.1:1:0.1\npairing=odd-odd # inline\n\n").unwrap();
        assert_eq!(c["alpha-range"], "0.1:1:0.1");
        assert_eq!(c["pairing"], "odd-odd");
        assert!(parse_config("bogus = 1").is_err());
        assert!(parse_config("alpha").is_err());
        assert!(parse_config("alpha = 1\nalpha = 2").is_err());
    }

    #[test]
    fn command_line_wins() {
        let cli = BTreeMap::from([("alpha".to_string(), "1.5".to_string())]);
        let file = parse_config("alpha = 0.5\nloss = 0.1").unwrap();
        let mut p = Params::new(cli, file);
        assert_eq!(p.single("alpha", 1.0).unwrap(), 1.5);
        assert_eq!(p.single("loss", 0.0).unwrap(), 0.1);
        assert_eq!(p.value("nodes", 21usize).unwrap(), 21);
        let m = p.into_manifest();
        assert_eq!(m["alpha"], serde_json::json!([1.5]));
    }
}
