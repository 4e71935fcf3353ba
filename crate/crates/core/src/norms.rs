//! Mixed, strong and weak Lebesgue norms of sampled fields.
//!
//! Measures are discrete throughout: sample `i` carries mass
//! `trapezoid_weight(i) · step`, the same weights the trapezoid rule uses.
//! With that choice the layer-cake identity and Chebyshev's inequality hold
//! for the discrete objects exactly (up to rounding), not just in the limit.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::grid::{pairwise_sum, trapezoid, Axis, Field1D, Field2D, UniformGrid1D};

/// A Lebesgue exponent in `[1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    pub fn finite(p: f64) -> Result<Self> {
        let e = Exponent::Finite(p);
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Exponent::Finite(p) if !(p >= 1.0 && p.is_finite()) => {
                param(format!("exponent must lie in [1, ∞], got {p}"))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "Inf" | "infinity" | "∞" => Ok(Exponent::Infinite),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| Error::Parameter(format!("cannot parse exponent '{other}'")))?;
                if p.is_infinite() && p > 0.0 {
                    return Ok(Exponent::Infinite);
                }
                Exponent::finite(p)
            }
        }
    }
}

/// `‖‖f‖_{L^{inner}_{inner_axis}}‖_{L^{outer}}` with the outer norm over the remaining axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedNormSpec {
    pub inner_axis: Axis,
    pub inner: Exponent,
    pub outer: Exponent,
}

impl MixedNormSpec {
    pub fn new(inner_axis: Axis, inner: Exponent, outer: Exponent) -> Result<Self> {
        inner.validate()?;
        outer.validate()?;
        Ok(Self {
            inner_axis,
            inner,
            outer,
        })
    }
}

fn lp_of_magnitudes(grid: &UniformGrid1D, mags: &[f64], p: Exponent) -> f64 {
    match p {
        Exponent::Infinite => mags.iter().copied().fold(0.0, f64::max),
        Exponent::Finite(p) => {
            // scale by the peak so large or tiny fields neither overflow nor underflow
            let peak = mags.iter().copied().fold(0.0, f64::max);
            if peak == 0.0 {
                return 0.0;
            }
            let pw: Vec<f64> = mags.iter().map(|m| (m / peak).powf(p)).collect();
            peak * trapezoid(grid, &pw).powf(1.0 / p)
        }
    }
}

/// `‖f‖_p` by trapezoid quadrature, or the sample maximum for `p = ∞`.
pub fn lp_norm(f: &Field1D, p: Exponent) -> Result<f64> {
    p.validate()?;
    Ok(lp_of_magnitudes(f.grid(), &f.magnitudes(), p))
}

pub fn mixed_norm(f: &Field2D, spec: &MixedNormSpec) -> Result<f64> {
    spec.inner.validate()?;
    spec.outer.validate()?;
    let axis = spec.inner_axis;
    let inner: Vec<f64> = (0..f.line_count(axis))
        .into_par_iter()
        .map(|k| {
            let line = f.line(axis, k);
            lp_of_magnitudes(line.grid(), &line.magnitudes(), spec.inner)
        })
        .collect();
    Ok(lp_of_magnitudes(f.grid(axis.other()), &inner, spec.outer))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha >= 0.0) || alpha.is_infinite() {
        return param(format!("level must be a finite α ≥ 0, got {alpha}"));
    }
    Ok(())
}

/// `d_f(α) = |{x : |f(x)| > α}|`.
pub fn distribution(f: &Field1D, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let g = f.grid();
    let mass: Vec<f64> = f
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() > alpha)
        .map(|(i, _)| g.trapezoid_weight(i))
        .collect();
    Ok(pairwise_sum(&mass) * g.step())
}

/// Magnitudes sorted ascending, each paired with its sample mass.
fn sorted_masses(f: &Field1D) -> Vec<(f64, f64)> {
    let g = f.grid();
    let mut pairs: Vec<(f64, f64)> = f
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| (v.norm(), g.trapezoid_weight(i) * g.step()))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs
}

/// Relative offset below a sample magnitude at which the weak norm is probed.
const JUST_BELOW: f64 = 1e-12;

/// `sup_α α d_f(α)^{1/p}`, realised over the sample magnitudes.
///
/// Between consecutive magnitudes `d_f` is constant, so the supremum is
/// approached from just below some magnitude `m`; it is evaluated at
/// `α = m (1 - 10^{-12})`.
pub fn weak_norm(f: &Field1D, p: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return param(format!("weak norm needs 1 ≤ p < ∞, got {p}"));
    }
    let pairs = sorted_masses(f);
    // tail[k] = mass of samples k.. (ascending order)
    let mut tail = vec![0.0; pairs.len() + 1];
    for k in (0..pairs.len()).rev() {
        tail[k] = tail[k + 1] + pairs[k].1;
    }
    let mut best: f64 = 0.0;
    let mut k = 0;
    while k < pairs.len() {
        let m = pairs[k].0;
        if m > 0.0 {
            let alpha = m * (1.0 - JUST_BELOW);
            let first = pairs.partition_point(|q| q.0 <= alpha);
            best = best.max(alpha * tail[first].powf(1.0 / p));
        }
        while k < pairs.len() && pairs[k].0 == m {
            k += 1;
        }
    }
    Ok(best)
}

/// `p ∫_0^∞ α^{p-1} d_f(α) dα`.
///
/// `d_f` is a step function with jumps at the sample magnitudes, so the
/// integral is summed exactly segment by segment:
/// `Σ_k (m_k^p - m_{k-1}^p) d_f(m_{k-1})`.
pub fn layer_cake(f: &Field1D, p: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return param(format!("layer cake needs 1 ≤ p < ∞, got {p}"));
    }
    let pairs = sorted_masses(f);
    let peak = pairs.last().map_or(0.0, |q| q.0);
    if peak == 0.0 {
        return Ok(0.0);
    }
    let mut tail = vec![0.0; pairs.len() + 1];
    for k in (0..pairs.len()).rev() {
        tail[k] = tail[k + 1] + pairs[k].1;
    }
    let mut segments = Vec::with_capacity(pairs.len());
    let mut prev = 0.0;
    for (k, &(m, _)) in pairs.iter().enumerate() {
        if m > prev {
            // on [prev, m) every sample from k on exceeds α
            let (a, b) = (prev / peak, m / peak);
            segments.push((b.powf(p) - a.powf(p)) * tail[k]);
            prev = m;
        }
    }
    Ok(pairwise_sum(&segments) * peak.powf(p))
}

/// `f = f₀ + f₁` with `f₀ = f 1_{|f|>α}` and `f₁ = f 1_{|f|≤α}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationSplit {
    pub alpha: f64,
    pub f0: Field2D,
    pub f1: Field2D,
}

pub fn truncation_split(f: &Field2D, alpha: f64) -> Result<TruncationSplit> {
    if !(alpha > 0.0) || alpha.is_infinite() {
        return param(format!("truncation level must be positive and finite, got {alpha}"));
    }
    let zero = Complex64::new(0.0, 0.0);
    let f0 = f.map(|v| if v.norm() > alpha { v } else { zero })?;
    let f1 = f.map(|v| if v.norm() > alpha { zero } else { v })?;
    Ok(TruncationSplit { alpha, f0, f1 })
}

/// Smallest admissible distance of `p` from either end of `(p0, p1)`.
const POLE_GUARD: f64 = 1e-9;

/// `p ((2A₀)^{p₀} / (p - p₀) + (2A₁)^{p₁} / (p₁ - p))`, the p-th power of the
/// interpolated bound.
pub fn interpolation_constant(p0: f64, p1: f64, p: f64, a0: f64, a1: f64) -> Result<f64> {
    if ![p0, p1, p, a0, a1].iter().all(|v| v.is_finite()) {
        return param("interpolation parameters must be finite");
    }
    if p0 < 1.0 {
        return param(format!("p0 must be at least 1, got {p0}"));
    }
    if !(p0 < p && p < p1) {
        return param(format!("need p0 < p < p1, got p0 = {p0}, p = {p}, p1 = {p1}"));
    }
    if p - p0 < POLE_GUARD || p1 - p < POLE_GUARD {
        return param(format!("p = {p} is too close to an endpoint of ({p0}, {p1})"));
    }
    if !(a0 > 0.0 && a1 > 0.0) {
        return param("A0 and A1 must be positive");
    }
    Ok(p * ((2.0 * a0).powf(p0) / (p - p0) + (2.0 * a1).powf(p1) / (p1 - p)))
}

/// The two split-norm inequalities for one `y` line:
/// `‖f₀(·,y)‖_{p₀}^{p₀} ≤ α^{p₀-p} ‖‖f‖_{L^∞_y}‖_{L^p_x}^p` and the same for
/// `f₁` with `p₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitBound {
    pub y_index: usize,
    pub lhs0: f64,
    pub rhs0: f64,
    pub lhs1: f64,
    pub rhs1: f64,
}

impl SplitBound {
    /// `rhs / lhs` for the tighter of the two (∞ when both sides vanish).
    pub fn slack(&self) -> f64 {
        let ratio = |l: f64, r: f64| if l > 0.0 { r / l } else { f64::INFINITY };
        ratio(self.lhs0, self.rhs0).min(ratio(self.lhs1, self.rhs1))
    }
}

/// Evaluates [`SplitBound`] on every `y` line of `split`.
pub fn split_norm_bounds(f: &Field2D, split: &TruncationSplit, p0: f64, p: f64, p1: f64) -> Result<Vec<SplitBound>> {
    if !(1.0 <= p0 && p0 < p && p < p1 && p1.is_finite()) {
        return param(format!("need 1 ≤ p0 < p < p1 < ∞, got ({p0}, {p}, {p1})"));
    }
    let h = crate::decomp::majorant(f);
    let hp = lp_norm(&h, Exponent::Finite(p))?.powf(p);
    let alpha = split.alpha;
    Ok((0..f.ny())
        .map(|j| {
            let lhs0 = lp_norm(&split.f0.row(j), Exponent::Finite(p0)).expect("p0 ≥ 1").powf(p0);
            let lhs1 = lp_norm(&split.f1.row(j), Exponent::Finite(p1)).expect("p1 ≥ 1").powf(p1);
            SplitBound {
                y_index: j,
                lhs0,
                rhs0: alpha.powf(p0 - p) * hp,
                lhs1,
                rhs1: alpha.powf(p1 - p) * hp,
            }
        })
        .collect())
}
