//! Suite reports and their JSON / text rendering.

use std::io::Write;

use serde::Serialize;

/// Direction of a check's threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// Passes when the residual is at most the tolerance.
    AtMost,
    /// Passes when the residual is at least the threshold (non-vacuity checks).
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
    #[serde(skip)]
    pub bound: Bound,
}

impl Check {
    pub fn at_most(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Self::new(name, residual, tol, Bound::AtMost)
    }

    pub fn at_least(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        Self::new(name, residual, threshold, Bound::AtLeast)
    }

    pub fn new(name: impl Into<String>, residual: f64, tol: f64, bound: Bound) -> Self {
        // NaN never passes.
        let pass = match bound {
            Bound::AtMost => residual <= tol,
            Bound::AtLeast => residual >= tol,
        };
        Self { name: name.into(), max_residual: residual, tol, pass, bound }
    }
}

/// Configuration echo.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Params {
    pub n: usize,
    pub nu: usize,
    pub c: f64,
    pub eps: f64,
    pub seed: u64,
    pub tol: Option<f64>,
    pub fd_step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub suite: String,
    pub params: Params,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub runtime_ms: u64,
}

impl CheckReport {
    pub fn new(suite: impl Into<String>, params: Params, checks: Vec<Check>, runtime_ms: u64) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self { suite: suite.into(), params, checks, pass, runtime_ms }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Text,
}

pub fn to_json(r: &CheckReport) -> String {
    serde_json::to_string_pretty(r).expect("report serializes")
}

pub fn to_text(r: &CheckReport) -> String {
    let mut out = String::new();
    for c in &r.checks {
        let op = match c.bound {
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
        };
        out.push_str(&format!(
            "{} {} residual={:.3e} {} {:.1e}\n",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.max_residual,
            op,
            c.tol
        ));
    }
    out.push_str(&format!(
        "{} {}: {}/{} checks passed in {} ms\n",
        if r.pass { "PASS" } else { "FAIL" },
        r.suite,
        r.checks.iter().filter(|c| c.pass).count(),
        r.checks.len(),
        r.runtime_ms
    ));
    out
}

pub fn emit_report(r: &CheckReport, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
    match format {
        Format::Json => writeln!(out, "{}", to_json(r)),
        Format::Text => write!(out, "{}", to_text(r)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> Params {
        Params { n: 2, nu: 0, c: 1.0, eps: 1.0, seed: 42, tol: None, fd_step: 1e-5 }
    }

    #[test]
    fn overall_pass_is_conjunction() {
        let ok = CheckReport::new("x", params(), vec![Check::at_most("a", 0.0, 1e-8)], 0);
        assert!(ok.pass);
        let bad = CheckReport::new(
            "x",
            params(),
            vec![Check::at_most("a", 0.0, 1e-8), Check::at_least("b", 1e-3, 1e-2)],
            0,
        );
        assert!(!bad.pass);
        assert_eq!(bad.exit_code(), 1);
    }

    #[test]
    fn nan_fails_both_ways() {
        assert!(!Check::at_most("a", f64::NAN, 1.0).pass);
        assert!(!Check::at_least("a", f64::NAN, 1.0).pass);
    }

    #[test]
    fn json_key_order_is_stable() {
        let r = CheckReport::new("axioms", params(), vec![Check::at_most("eta_xi", 0.0, 1e-10)], 3);
        let s = serde_json::to_string(&r).unwrap();
        let keys = ["\"suite\"", "\"params\"", "\"n\"", "\"nu\"", "\"c\"", "\"eps\"", "\"seed\"", "\"tol\"", "\"fd_step\"", "\"checks\"", "\"name\"", "\"max_residual\"", "\"pass\"", "\"runtime_ms\""];
        let mut last = 0;
        for k in keys {
            let pos = s[last..].find(k).map(|p| p + last).unwrap_or_else(|| panic!("{k} missing in {s}"));
            last = pos;
        }
        let back: serde_json::Value = serde_json::from_str(&to_json(&r)).unwrap();
        assert_eq!(back["checks"][0]["name"], "eta_xi");
    }

    #[test]
    fn text_has_one_line_per_check() {
        let r = CheckReport::new(
            "x",
            params(),
            vec![Check::at_most("a", 0.0, 1e-8), Check::at_most("b", 1.0, 1e-8)],
            0,
        );
        let t = to_text(&r);
        assert_eq!(t.lines().count(), 3);
        assert!(t.lines().next().unwrap().starts_with("PASS a"));
        assert!(t.lines().nth(1).unwrap().starts_with("FAIL b"));
    }
}
