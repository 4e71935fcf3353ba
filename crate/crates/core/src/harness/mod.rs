//! Experiment runners: counterexample growth, cross-validation of the two
//! evaluation paths, interpolation machinery, weak-(1,1) sweeps and a
//! self-test that bundles quick versions of all of them.

mod cex;
mod corpus;
mod interp;
mod selftest;
mod validate;
mod weak11;

pub use cex::{
    check_counterexample, render_svg, run_counterexample, to_csv, window_refinement_change, CexConfig, CexRow,
    CexRun, WindowContribution,
};
pub use corpus::{wave_packet_corpus, CorpusSpec};
pub use interp::{run_interpolation_check, InterpConfig, InterpReport};
pub use selftest::selftest;
pub use validate::{run_path_validation, PathRow, ValidationConfig};
pub use weak11::{run_weak11, Weak11Row};

use std::fmt;

use crate::error::{param, Result};

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

/// `printf("%.<sig>g", x)`.
pub fn fmt_g(x: f64, sig: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= sig as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Parses `lo:hi:log:n` or `lo:hi:lin:n` into `n` levels.
pub fn parse_sweep(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 4 {
        return param(format!("sweep '{spec}' must look like lo:hi:log:n or lo:hi:lin:n"));
    }
    let num = |s: &str| -> Result<f64> {
        s.parse::<f64>()
            .map_err(|_| crate::Error::Parameter(format!("cannot parse '{s}' in sweep '{spec}'")))
    };
    let (lo, hi) = (num(parts[0])?, num(parts[1])?);
    let n: usize = parts[3]
        .parse()
        .map_err(|_| crate::Error::Parameter(format!("cannot parse count '{}' in sweep", parts[3])))?;
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return param(format!("sweep needs 0 < lo ≤ hi, got {lo}:{hi}"));
    }
    if n == 0 {
        return param("sweep needs at least one level");
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let t = |k: usize| k as f64 / (n - 1) as f64;
    match parts[2] {
        "log" => Ok((0..n).map(|k| (lo.ln() + t(k) * (hi.ln() - lo.ln())).exp()).collect()),
        "lin" => Ok((0..n).map(|k| lo + t(k) * (hi - lo)).collect()),
        other => param(format!("sweep spacing must be 'log' or 'lin', got '{other}'")),
    }
}
