//! Growth of `‖R₁₂ g_n(·, 0)‖₂²` against the boundedness of the envelope norms.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fmt_g, CheckResult};
use crate::bump::{CounterexampleFamily, FamilyParams};
use crate::error::{Error, Result};
use crate::grid::{pairwise_sum, trapezoid, UniformGrid1D};
use crate::operator::{SemiAnalytic, CONV_HALF_WIDTH};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CexConfig {
    #[serde(flatten)]
    pub family: FamilyParams,
    /// Trapezoid nodes on each window `[2^j + 1, 2^j + A - 1]`.
    pub window_points: usize,
    /// Nodes per unit frequency for the full-line Plancherel integral.
    pub cover_points_per_unit: usize,
    /// Samples of the x-grid on `[-8, 8]` used for the envelope norms.
    pub x_points: usize,
    /// Samples across each `supp χ₁⁽ʲ⁾` used for the envelope norms.
    pub y_points: usize,
}

impl Default for CexConfig {
    fn default() -> Self {
        Self {
            family: FamilyParams::default(),
            window_points: 512,
            cover_points_per_unit: 64,
            x_points: 4097,
            y_points: 65,
        }
    }
}

/// One line of the growth table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CexRow {
    pub n: u32,
    /// `Σ_{j=j0}^{n} ∫_{2^j+1}^{2^j+A-1} |F₁(R₁₂ g_n)(ξ, 0)|² dξ`.
    pub s_lower: f64,
    /// `‖R₁₂ g_n(·, 0)‖₂²`, via Plancherel over the whole frequency line.
    pub l2sq_y0: f64,
    /// `‖‖e^{x²+y²} g_n‖_{L^∞_y}‖_{L^∞_x}`.
    pub n2: f64,
    /// `‖‖g_n‖_{L^∞_y}‖_{L²_x}`.
    pub n3: f64,
    /// `min_{j0 ≤ j ≤ n} margin(j, n)`.
    pub margin_min: f64,
    /// `sqrt(S_lower) / N3`.
    pub ratio: f64,
}

/// Contribution of window `j` to `S_lower(n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowContribution {
    pub n: u32,
    pub j: u32,
    pub value: f64,
    pub margin: f64,
}

#[derive(Debug, Clone)]
pub struct CexRun {
    pub config: CexConfig,
    pub d: f64,
    pub e: f64,
    pub c_cal: f64,
    pub rows: Vec<CexRow>,
    pub windows: Vec<WindowContribution>,
}

/// Signed slices `Im F₁(R₁₂ f_i)(ξ_k, 0)` for `i = j0..=nmax` at the given nodes.
/// (The slices are purely imaginary, so the imaginary parts carry everything.)
fn slices(semi: &SemiAnalytic, nodes: &[f64]) -> Result<Vec<Vec<f64>>> {
    let p = *semi.family().params();
    (p.j0..=p.nmax)
        .map(|i| nodes.iter().map(|&xi| semi.slice(i, xi).map(|s| s.im)).collect())
        .collect()
}

/// `∫ |Σ_{i ≤ n} slice_i|²` over `grid`, for each `n` in `(j0, nmax]`.
fn integrals_by_n(per_i: &[Vec<f64>], grid: &UniformGrid1D) -> Vec<f64> {
    let mut acc = vec![0.0; grid.count()];
    let mut out = Vec::with_capacity(per_i.len());
    for (k, s) in per_i.iter().enumerate() {
        for (a, v) in acc.iter_mut().zip(s) {
            *a += v;
        }
        if k > 0 {
            let sq: Vec<f64> = acc.iter().map(|v| v * v).collect();
            out.push(trapezoid(grid, &sq));
        }
    }
    out
}

fn window_grid(semi: &SemiAnalytic, j: u32, points: usize) -> Result<UniformGrid1D> {
    let (lo, hi) = semi.window(j);
    UniformGrid1D::new(lo, (hi - lo) / (points - 1) as f64, points)
}

/// `∫_{window j} |Σ_{i ≤ n} slice_i|²` at `points` and `2·points - 1` nodes,
/// returned as the relative change.
pub fn window_refinement_change(semi: &SemiAnalytic, j: u32, n: u32, points: usize) -> Result<f64> {
    let j0 = semi.family().params().j0;
    let value = |pts: usize| -> Result<f64> {
        let g = window_grid(semi, j, pts)?;
        let per_i = slices(semi, &g.points().collect::<Vec<_>>())?;
        Ok(integrals_by_n(&per_i, &g)[(n - j0 - 1) as usize])
    };
    let (a, b) = (value(points)?, value(2 * points - 1)?);
    Ok((a - b).abs() / b.abs())
}

/// Merged positive-frequency intervals `[2^i - 8, 2^i + A + 8]` outside which
/// every slice vanishes identically.
fn cover(p: &FamilyParams) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for i in p.j0..=p.nmax {
        let s = 2f64.powi(i as i32);
        let (a, b) = ((s - CONV_HALF_WIDTH).max(0.0), s + p.a + CONV_HALF_WIDTH);
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

pub fn run_counterexample(config: &CexConfig) -> Result<CexRun> {
    let p = config.family;
    p.validate().map_err(|e| Error::Configuration(e.to_string()))?;
    if config.window_points < 3 || config.cover_points_per_unit < 2 || config.x_points < 3 || config.y_points < 2 {
        return Err(Error::Configuration("quadrature sizes are too small".into()));
    }
    let family = CounterexampleFamily::new(p)?;
    let semi = SemiAnalytic::new(family);
    for j in p.j0..=p.nmax {
        let m = semi.margin(j, p.nmax)?;
        if !(m > 0.0) {
            return Err(Error::Configuration(format!(
                "margin({j}, {}) = {m:e} is not positive; increase j0",
                p.nmax
            )));
        }
    }

    // window integrals, one task per window
    let per_window: Vec<Vec<f64>> = (p.j0..=p.nmax)
        .into_par_iter()
        .map(|j| {
            let g = window_grid(&semi, j, config.window_points)?;
            let per_i = slices(&semi, &g.points().collect::<Vec<_>>())?;
            Ok(integrals_by_n(&per_i, &g))
        })
        .collect::<Result<_>>()?;

    // full-line integrals over the merged cover, one task per piece
    let per_piece: Vec<Vec<f64>> = cover(&p)
        .into_par_iter()
        .map(|(a, b)| {
            let count = ((b - a) * config.cover_points_per_unit as f64).ceil() as usize + 1;
            let g = UniformGrid1D::new(a, (b - a) / (count - 1) as f64, count)?;
            let per_i = slices(&semi, &g.points().collect::<Vec<_>>())?;
            Ok(integrals_by_n(&per_i, &g))
        })
        .collect::<Result<_>>()?;

    let xgrid = UniformGrid1D::new(-8.0, 16.0 / (config.x_points - 1) as f64, config.x_points)?;
    let envelopes = semi
        .family()
        .growth_bounds_upto(p.nmax, &xgrid, config.y_points)?;

    let mut rows = Vec::new();
    let mut windows = Vec::new();
    for (k, n) in (p.j0 + 1..=p.nmax).enumerate() {
        let mut contrib = Vec::new();
        let mut margins = Vec::new();
        for j in p.j0..=n {
            let value = per_window[(j - p.j0) as usize][k];
            let margin = semi.margin(j, n)?;
            windows.push(WindowContribution { n, j, value, margin });
            contrib.push(value);
            margins.push(margin);
        }
        let s_lower = pairwise_sum(&contrib);
        let l2: Vec<f64> = per_piece.iter().map(|v| v[k]).collect();
        // slices are odd in ξ, so |·|² is even: double the positive half-line
        let l2sq_y0 = 2.0 * pairwise_sum(&l2);
        let env = envelopes[k];
        rows.push(CexRow {
            n,
            s_lower,
            l2sq_y0,
            n2: env.weighted_sup,
            n3: env.majorant_l2,
            margin_min: margins.iter().copied().fold(f64::INFINITY, f64::min),
            ratio: s_lower.sqrt() / env.majorant_l2,
        });
    }
    Ok(CexRun {
        config: *config,
        d: semi.family().d(),
        e: semi.e(),
        c_cal: semi.c_cal(),
        rows,
        windows,
    })
}

/// Least-squares slope of `ys` against `xs`.
fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// The growth and boundedness claims, each as a named check.
pub fn check_counterexample(run: &CexRun) -> Vec<CheckResult> {
    let a = run.config.family.a;
    let rows = &run.rows;
    let mut out = Vec::new();

    let min_margin = run.windows.iter().map(|w| w.margin).fold(f64::INFINITY, f64::min);
    out.push(CheckResult::new(
        "margin positive",
        min_margin > 0.0,
        format!("min margin(j, n) = {}", fmt_g(min_margin, 6)),
    ));

    let worst_window = run
        .windows
        .iter()
        .map(|w| w.value / ((a - 2.0) * w.margin * w.margin))
        .fold(f64::INFINITY, f64::min);
    out.push(CheckResult::new(
        "window bound",
        worst_window >= 1.0,
        format!("min window / ((A-2) margin²) = {}", fmt_g(worst_window, 6)),
    ));

    let mut inc_ok = true;
    let mut worst_inc = f64::INFINITY;
    for w in rows.windows(2) {
        let inc = w[1].s_lower - w[0].s_lower;
        let need = 0.9 * (a - 2.0) * w[1].margin_min * w[1].margin_min;
        inc_ok &= inc > 0.0 && inc >= need;
        worst_inc = worst_inc.min(inc / need);
    }
    out.push(CheckResult::new(
        "S_lower increments",
        inc_ok,
        format!("min increment / (0.9 (A-2) margin_min²) = {}", fmt_g(worst_inc, 6)),
    ));

    if rows.len() >= 2 {
        let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.s_lower).collect();
        let s = slope(&xs, &ys);
        let need = 0.9 * (a - 2.0) * min_margin * min_margin;
        out.push(CheckResult::new(
            "growth law",
            s >= need,
            format!("slope {} vs required {}", fmt_g(s, 6), fmt_g(need, 6)),
        ));
    }

    let below = rows.iter().all(|r| r.s_lower <= r.l2sq_y0 * (1.0 + 1e-6));
    out.push(CheckResult::new("S_lower ≤ L2sq_y0", below, format!("{} rows", rows.len())));

    let n2_bound = run.d * std::f64::consts::E;
    let n3_bound = run.d * (std::f64::consts::PI / 2.0).powf(0.25);
    let n2_max = rows.iter().map(|r| r.n2).fold(0.0, f64::max);
    let n3_max = rows.iter().map(|r| r.n3).fold(0.0, f64::max);
    out.push(CheckResult::new(
        "N2 bounded",
        n2_max <= n2_bound * (1.0 + 1e-9),
        format!("max N2 = {} ≤ D·e = {}", fmt_g(n2_max, 9), fmt_g(n2_bound, 9)),
    ));
    out.push(CheckResult::new(
        "N3 bounded",
        n3_max <= n3_bound * (1.0 + 1e-9),
        format!("max N3 = {} ≤ D·(π/2)^(1/4) = {}", fmt_g(n3_max, 9), fmt_g(n3_bound, 9)),
    ));
    let n2_spread = rows.iter().map(|r| (r.n2 - rows[0].n2).abs()).fold(0.0, f64::max) / rows[0].n2;
    out.push(CheckResult::new(
        "N2 constant in n",
        n2_spread < 1e-9,
        format!("relative spread {}", fmt_g(n2_spread, 3)),
    ));

    let increasing = rows.windows(2).all(|w| w[1].ratio > w[0].ratio);
    out.push(CheckResult::new(
        "ratio increasing",
        increasing,
        format!(
            "sqrt(S_lower)/N3 from {} to {}",
            fmt_g(rows.first().map_or(0.0, |r| r.ratio), 6),
            fmt_g(rows.last().map_or(0.0, |r| r.ratio), 6)
        ),
    ));
    out
}

pub const CSV_HEADER: &str = "n,S_lower,L2sq_y0,N2,N3,margin_min,ratio";

pub fn to_csv(rows: &[CexRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.n,
            fmt_g(r.s_lower, 12),
            fmt_g(r.l2sq_y0, 12),
            fmt_g(r.n2, 12),
            fmt_g(r.n3, 12),
            fmt_g(r.margin_min, 12),
            fmt_g(r.ratio, 12)
        );
    }
    s
}

/// A single polyline of `ratio` against `n`.
pub fn render_svg(rows: &[CexRow]) -> String {
    let (w, h, pad) = (640.0, 400.0, 56.0);
    let (n_lo, n_hi) = (
        rows.first().map_or(0.0, |r| r.n as f64),
        rows.last().map_or(1.0, |r| r.n as f64),
    );
    let r_hi = rows.iter().map(|r| r.ratio).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let sx = |n: f64| pad + (n - n_lo) / (n_hi - n_lo).max(1.0) * (w - 2.0 * pad);
    let sy = |r: f64| h - pad - r / r_hi * (h - 2.0 * pad);
    let points: Vec<String> = rows
        .iter()
        .map(|r| format!("{:.2},{:.2}", sx(r.n as f64), sy(r.ratio)))
        .collect();
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<line x1="{pad}" y1="{y}" x2="{x2}" y2="{y}" stroke="black"/>"#,
        y = h - pad,
        x2 = w - pad
    );
    let _ = writeln!(s, r#"<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{y}" stroke="black"/>"#, y = h - pad);
    let _ = writeln!(
        s,
        r#"<polyline fill="none" stroke="steelblue" stroke-width="2" points="{}"/>"#,
        points.join(" ")
    );
    let _ = writeln!(
        s,
        r#"<text x="{x}" y="{y}" text-anchor="middle" font-family="sans-serif" font-size="14">n</text>"#,
        x = w / 2.0,
        y = h - pad / 3.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{x}" y="{y}" text-anchor="middle" font-family="sans-serif" font-size="14" transform="rotate(-90 {x} {y})">sqrt(S_lower) / N3</text>"#,
        x = pad / 3.0,
        y = h / 2.0
    );
    for (label, n) in [(n_lo, n_lo), (n_hi, n_hi)] {
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{y}" text-anchor="middle" font-family="sans-serif" font-size="12">{label}</text>"#,
            x = sx(n),
            y = h - pad + 16.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{x}" y="{y:.2}" text-anchor="end" font-family="sans-serif" font-size="12">{label}</text>"#,
        x = pad - 4.0,
        y = sy(r_hi) + 4.0,
        label = fmt_g(r_hi, 4)
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> CexConfig {
        CexConfig {
            family: FamilyParams {
                j0: 13,
                nmax: 17,
                a: 4.0,
            },
            ..Default::default()
        }
    }

    #[test]
    fn small_run_passes_all_checks() {
        let run = run_counterexample(&small()).unwrap();
        assert_eq!(run.rows.len(), 4);
        for c in check_counterexample(&run) {
            assert!(c.passed, "{c}");
        }
    }

    #[test]
    fn margin_failure_is_a_configuration_error() {
        let cfg = CexConfig {
            family: FamilyParams { j0: 3, nmax: 8, a: 4.0 },
            ..Default::default()
        };
        match run_counterexample(&cfg) {
            Err(Error::Configuration(msg)) => assert!(msg.contains("margin(3, 8)"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn window_quadrature_is_converged() {
        let semi = SemiAnalytic::new(CounterexampleFamily::new(FamilyParams::default()).unwrap());
        for j in [13, 20, 26] {
            assert!(window_refinement_change(&semi, j, 26, 512).unwrap() < 1e-3);
        }
    }

    #[test]
    fn csv_layout() {
        let row = CexRow {
            n: 14,
            s_lower: 0.5,
            l2sq_y0: 1.0 / 3.0,
            n2: 2.0,
            n3: 1e-7,
            margin_min: 0.01,
            ratio: 123.0,
        };
        let csv = to_csv(&[row]);
        assert_eq!(csv, "n,S_lower,L2sq_y0,N2,N3,margin_min,ratio\n14,0.5,0.333333333333,2,1e-07,0.01,123\n");
        assert!(!csv.contains('\r'));
        let svg = render_svg(&[row, CexRow { n: 15, ratio: 130.0, ..row }]);
        assert!(svg.contains("<polyline") && svg.contains("sqrt(S_lower) / N3"));
    }

    #[test]
    fn cover_merges_overlaps() {
        let c = cover(&FamilyParams { j0: 2, nmax: 6, a: 4.0 });
        assert_eq!(c, vec![(0.0, 44.0), (56.0, 76.0)]);
        let c = cover(&FamilyParams::default());
        assert_eq!(c.len(), 14);
    }
}
