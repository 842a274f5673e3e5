//! Experiment reports and their JSON / CSV serialization.
//!
//! JSON is written by hand so that key order is fixed and every float is
//! printed with 17 significant digits.

use std::fmt::Write as _;

/// Float as a JSON number with 17 significant digits; `null` if not finite.
pub fn json_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

/// JSON string literal with the mandatory escapes.
pub fn json_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Direction of a threshold comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    /// Pass iff `value <= threshold`.
    AtMost,
    /// Pass iff `value >= threshold`.
    AtLeast,
}

impl Comparison {
    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Comparison::AtMost => value <= threshold,
            Comparison::AtLeast => value >= threshold,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparison::AtMost => "<=",
            Comparison::AtLeast => ">=",
        }
    }
}

/// One named pass/fail check of a recorded statistic against a threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub name: String,
    pub statistic: String,
    pub comparison: Comparison,
    pub threshold: f64,
    pub pass: bool,
}

/// A named real-valued statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    pub name: String,
    pub value: f64,
}

/// Result of one registered experiment. Fully determined by its id, seed and
/// parameters, except for `runtime_seconds`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub experiment_id: String,
    pub alpha: f64,
    pub seed: u64,
    pub n: u64,
    pub replicates: u64,
    pub statistics: Vec<Metric>,
    pub verdicts: Vec<Verdict>,
    pub runtime_seconds: f64,
    /// Per-replicate values, `(replicate, stat_name, value)`.
    pub raw: Vec<(u64, String, f64)>,
}

impl ExperimentReport {
    pub fn new(experiment_id: &str, alpha: f64, seed: u64, n: u64, replicates: u64) -> Self {
        ExperimentReport {
            experiment_id: experiment_id.to_string(),
            alpha,
            seed,
            n,
            replicates,
            statistics: Vec::new(),
            verdicts: Vec::new(),
            runtime_seconds: 0.0,
            raw: Vec::new(),
        }
    }

    /// Records a statistic. A later value with the same name replaces it.
    pub fn stat(&mut self, name: impl Into<String>, value: f64) {
        let name = name.into();
        match self.statistics.iter_mut().find(|m| m.name == name) {
            Some(m) => m.value = value,
            None => self.statistics.push(Metric { name, value }),
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.statistics.iter().find(|m| m.name == name).map(|m| m.value)
    }

    /// Records `statistic` and a verdict comparing it to `threshold`. A NaN
    /// statistic always fails.
    pub fn check(
        &mut self,
        name: impl Into<String>,
        statistic: impl Into<String>,
        value: f64,
        comparison: Comparison,
        threshold: f64,
    ) -> bool {
        let statistic = statistic.into();
        self.stat(statistic.clone(), value);
        let pass = comparison.holds(value, threshold);
        self.verdicts.push(Verdict { name: name.into(), statistic, comparison, threshold, pass });
        pass
    }

    pub fn at_most(&mut self, name: &str, statistic: &str, value: f64, threshold: f64) -> bool {
        self.check(name, statistic, value, Comparison::AtMost, threshold)
    }

    pub fn at_least(&mut self, name: &str, statistic: &str, value: f64, threshold: f64) -> bool {
        self.check(name, statistic, value, Comparison::AtLeast, threshold)
    }

    /// Two verdicts, `name/low` and `name/high`, for `lo <= value <= hi`.
    pub fn within(&mut self, name: &str, statistic: &str, value: f64, lo: f64, hi: f64) -> bool {
        let a = self.at_least(&format!("{name}/low"), statistic, value, lo);
        let b = self.at_most(&format!("{name}/high"), statistic, value, hi);
        a && b
    }

    /// Records a boolean fact as a 0/1 statistic that must equal 1.
    pub fn require(&mut self, name: &str, ok: bool) -> bool {
        self.at_least(name, name, if ok { 1.0 } else { 0.0 }, 1.0)
    }

    pub fn passed(&self) -> bool {
        !self.verdicts.is_empty() && self.verdicts.iter().all(|v| v.pass)
    }

    pub fn failures(&self) -> Vec<&Verdict> {
        self.verdicts.iter().filter(|v| !v.pass).collect()
    }

    /// JSON object. With `with_runtime = false` the runtime field is omitted,
    /// which makes reports from identical specs byte-identical.
    pub fn to_json(&self, with_runtime: bool) -> String {
        let mut s = String::new();
        s.push('{');
        let _ = write!(
            s,
            "\"experiment_id\":{},\"alpha\":{},\"seed\":{},\"n\":{},\"replicates\":{},",
            json_str(&self.experiment_id),
            json_f64(self.alpha),
            self.seed,
            self.n,
            self.replicates
        );
        s.push_str("\"statistics\":{");
        for (i, m) in self.statistics.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "{}:{}", json_str(&m.name), json_f64(m.value));
        }
        s.push_str("},\"thresholds\":{");
        for (i, v) in self.verdicts.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "{}:{}", json_str(&v.name), json_f64(v.threshold));
        }
        s.push_str("},\"verdicts\":{");
        for (i, v) in self.verdicts.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(
                s,
                "{}:{{\"statistic\":{},\"comparison\":{},\"pass\":{}}}",
                json_str(&v.name),
                json_str(&v.statistic),
                json_str(v.comparison.symbol()),
                v.pass
            );
        }
        let _ = write!(s, "}},\"pass\":{}", self.passed());
        if with_runtime {
            let _ = write!(s, ",\"runtime_seconds\":{}", json_f64(self.runtime_seconds));
        }
        s.push('}');
        s
    }

    /// Raw per-replicate statistics as `replicate,stat_name,value` rows,
    /// without a header.
    pub fn raw_csv_rows(&self) -> String {
        let mut s = String::new();
        for (r, name, v) in &self.raw {
            let _ = writeln!(s, "{r},{name},{v:?}");
        }
        s
    }

    /// One line: id, PASS/FAIL and the failing verdicts.
    pub fn summary_line(&self) -> String {
        let mut s = format!(
            "{} {}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.experiment_id
        );
        for v in &self.verdicts {
            let value = self.get(&v.statistic).unwrap_or(f64::NAN);
            if !v.pass {
                let _ = write!(
                    s,
                    " [{}: {} = {:.6} not {} {:.6}]",
                    v.name,
                    v.statistic,
                    value,
                    v.comparison.symbol(),
                    v.threshold
                );
            }
        }
        s
    }
}
