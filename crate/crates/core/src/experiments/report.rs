use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Equal-width histogram on `[lo, hi]`. Values outside are clamped into the
/// end bins, so every recorded value is counted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if bins == 0 || !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::domain(format!("bad histogram [{lo}, {hi}] with {bins} bins")));
        }
        let w = (hi - lo) / bins as f64;
        let mut edges: Vec<f64> = (0..=bins).map(|k| lo + w * k as f64).collect();
        edges[bins] = hi;
        Ok(Histogram {
            lo,
            hi,
            edges,
            counts: vec![0; bins],
        })
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn add(&mut self, x: f64) {
        let b = self.bins();
        let pos = (x - self.lo) / (self.hi - self.lo) * b as f64;
        let k = if pos.is_nan() || pos < 0.0 {
            0
        } else {
            (pos as usize).min(b - 1)
        };
        self.counts[k] += 1;
    }

    pub fn extend(&mut self, xs: &[f64]) {
        for &x in xs {
            self.add(x);
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// A named pass/fail flag. `margin >= 0` exactly when the check passes;
/// its magnitude is the slack (or shortfall) in the criterion's own units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Output of one experiment run. Maps are ordered, so serialization is
/// byte-stable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub params: BTreeMap<String, Value>,
    pub stats: BTreeMap<String, f64>,
    pub histograms: BTreeMap<String, Histogram>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub table: Option<Table>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub config: Option<Value>,
}

impl ExperimentReport {
    pub fn new(name: &str) -> Self {
        ExperimentReport {
            name: name.to_string(),
            params: BTreeMap::new(),
            stats: BTreeMap::new(),
            histograms: BTreeMap::new(),
            table: None,
            checks: Vec::new(),
            config: None,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn stat(&mut self, key: &str, value: f64) -> &mut Self {
        self.stats.insert(key.to_string(), value);
        self
    }

    /// Records a check whose pass flag is derived from the margin.
    pub fn check(&mut self, name: &str, margin: f64) -> &mut Self {
        self.checks.push(Check {
            name: name.to_string(),
            pass: margin >= 0.0,
            margin,
        });
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.stats.get(key).copied()
    }

    pub fn find_check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Flat CSV: a `#` comment line with the run configuration, then the
    /// report's table if it has one, else its histograms, else its scalar
    /// statistics and checks.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let config = self
            .config
            .clone()
            .unwrap_or_else(|| serde_json::to_value(&self.params).expect("params serialize"));
        let _ = writeln!(out, "# {}: {}", self.name, config);
        if let Some(table) = &self.table {
            let _ = writeln!(out, "{}", table.columns.join(","));
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(|&v| fmt_num(v)).collect();
                let _ = writeln!(out, "{}", cells.join(","));
            }
        } else if !self.histograms.is_empty() {
            let _ = writeln!(out, "histogram,bin_lo,bin_hi,count");
            for (key, h) in &self.histograms {
                for (k, c) in h.counts.iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "{},{},{},{}",
                        csv_field(key),
                        fmt_num(h.edges[k]),
                        fmt_num(h.edges[k + 1]),
                        c
                    );
                }
            }
        } else {
            let _ = writeln!(out, "key,value");
            for (k, v) in &self.stats {
                let _ = writeln!(out, "{},{}", csv_field(k), fmt_num(*v));
            }
            for c in &self.checks {
                let _ = writeln!(out, "{},{}", csv_field(&format!("check:{}", c.name)), fmt_num(c.margin));
            }
        }
        out
    }

    /// Scalar statistics and check margins as a `key,value` CSV.
    pub fn stats_csv(&self) -> String {
        let mut bare = self.clone();
        bare.table = None;
        bare.histograms.clear();
        bare.to_csv()
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Integers print bare; everything else with 17 significant digits.
pub fn fmt_num(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_counts_everything() {
        let mut h = Histogram::new(-1.0, 1.0, 4).unwrap();
        h.extend(&[-1.0, -0.6, 0.0, 0.99, 1.0, 5.0, -3.0]);
        assert_eq!(h.total(), 7);
        assert_eq!(h.counts, vec![3, 0, 1, 3]);
        assert_eq!(h.edges, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert!(Histogram::new(0.0, 0.0, 3).is_err());
    }

    #[test]
    fn number_format_round_trips() {
        assert_eq!(fmt_num(3.0), "3");
        for &v in &[0.1, 1.0 / 3.0, -2.5e-17, 6.02e23, std::f64::consts::PI] {
            assert_eq!(fmt_num(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn json_round_trip_and_checks() {
        let mut r = ExperimentReport::new("demo");
        r.param("N", 4).param("seed", 7u64).stat("x", 0.5);
        r.check("ok", 0.1).check("bad", -0.2);
        assert!(!r.all_pass());
        assert!(r.find_check("ok").unwrap().pass);
        let back: ExperimentReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        let csv = r.to_csv();
        assert!(csv.starts_with("# demo: {\"N\":4,\"seed\":7}\n"));
        assert!(csv.contains("check:bad,-2.0000000000000001e-1"));
    }
}
