//! The report document shared by every command and its three renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

/// JSON number, or a string for non-finite values (`"inf"`, `"-inf"`, `"nan"`).
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
    } else if v.is_nan() {
        Value::String("nan".into())
    } else if v > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

fn nums(v: &[f64]) -> Vec<Value> {
    v.iter().map(|&x| num(x)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct GridInfo {
    pub label: String,
    pub rule: String,
    pub x_e: Value,
    pub points: Vec<Value>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrailInfo {
    pub label: String,
    pub x: Vec<Value>,
    pub values: Vec<Value>,
    #[serde(skip)]
    raw: (Vec<f64>, Vec<f64>),
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictInfo {
    pub label: String,
    pub verdict: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub grids: Vec<GridInfo>,
    pub trails: Vec<TrailInfo>,
    pub verdicts: Vec<VerdictInfo>,
    /// Scalar results (estimates, limits, constants).
    pub values: BTreeMap<String, Value>,
    pub exit_code: i32,
    pub tool_version: String,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            grids: Vec::new(),
            trails: Vec::new(),
            verdicts: Vec::new(),
            values: BTreeMap::new(),
            exit_code: 0,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn input(&mut self, key: &str, v: impl Into<Value>) {
        self.inputs.insert(key.to_string(), v.into());
    }

    pub fn value(&mut self, key: &str, v: f64) {
        self.values.insert(key.to_string(), num(v));
    }

    pub fn text_value(&mut self, key: &str, v: impl Into<String>) {
        self.values.insert(key.to_string(), Value::String(v.into()));
    }

    pub fn grid(&mut self, label: &str, rule: String, x_e: f64, points: &[f64]) {
        self.grids.push(GridInfo { label: label.to_string(), rule, x_e: num(x_e), points: nums(points) });
    }

    pub fn trail(&mut self, label: &str, x: &[f64], values: &[f64]) {
        self.trails.push(TrailInfo {
            label: label.to_string(),
            x: nums(x),
            values: nums(values),
            raw: (x.to_vec(), values.to_vec()),
        });
    }

    pub fn verdict(&mut self, label: &str, verdict: impl Into<String>) {
        self.verdicts.push(VerdictInfo { label: label.to_string(), verdict: verdict.into() });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    /// Trails as blocks of `x,value` rows, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (i, t) in self.trails.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "# {}", t.label);
            out.push_str("x,value\n");
            for (x, v) in t.raw.0.iter().zip(&t.raw.1) {
                let _ = writeln!(out, "{x:.16e},{v:.16e}");
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {} (mda-aux {})", self.command, self.tool_version);
        for (k, v) in &self.inputs {
            let _ = writeln!(out, "  {k} = {}", plain(v));
        }
        for g in &self.grids {
            let _ = writeln!(out, "grid {}: {} ({} points)", g.label, g.rule, g.points.len());
        }
        for t in &self.trails {
            let _ = writeln!(out, "\n{}", t.label);
            let _ = writeln!(out, "  {:>24}  {:>24}", "x", "value");
            for (x, v) in t.raw.0.iter().zip(&t.raw.1) {
                let _ = writeln!(out, "  {x:>24.12e}  {v:>24.12e}");
            }
        }
        if !self.values.is_empty() {
            out.push('\n');
            for (k, v) in &self.values {
                let _ = writeln!(out, "{k}: {}", plain(v));
            }
        }
        if !self.verdicts.is_empty() {
            out.push('\n');
            for v in &self.verdicts {
                let _ = writeln!(out, "{}: {}", v.label, v.verdict);
            }
        }
        out
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_finite_numbers_become_strings() {
        assert_eq!(num(f64::INFINITY), Value::String("inf".into()));
        assert_eq!(num(f64::NAN), Value::String("nan".into()));
        assert_eq!(num(0.1), serde_json::json!(0.1));
    }

    #[test]
    fn csv_blocks() {
        let mut r = Report::new("t");
        r.trail("a", &[1.0, 2.0], &[0.5, 0.25]);
        r.trail("b", &[1.0], &[f64::NAN]);
        let csv = r.to_csv();
        assert!(csv.starts_with("# a\nx,value\n1.0000000000000000e0,5.0000000000000000e-1\n"));
        assert!(csv.contains("\n# b\nx,value\n1.0000000000000000e0,NaN\n"));
    }

    #[test]
    fn json_round_trips_values() {
        let mut r = Report::new("t");
        r.value("v", 0.1 + 0.2);
        let back: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back["values"]["v"].as_f64().unwrap(), 0.1 + 0.2);
    }
}
