//! Smooth bumps and the counterexample family
//!
//! ```text
//! f_j(x, y) = χ₁⁽ʲ⁾(y) · e^{-x²} · F⁻¹(χ₃⁽ʲ⁾)(x),     g_n = Σ_{j=j0}^{n} f_j
//! χ₃⁽ʲ⁾(ξ)  = χ(ξ - 2^j) + χ(-ξ - 2^j)
//! ```
//!
//! `χ` is a bump on `[0, A]` equal to one on `[1/4, A - 1/4]`, and `χ₁⁽ʲ⁾` a
//! bump on `[2^{-j}, 2^{-j+1}]` equal to one away from margins of `2^{-j-10}`.
//! Because `χ` is real, `F⁻¹(χ₃⁽ʲ⁾)(x) = 2 Re(e^{i 2^j x} v(x))` with
//! `v = F⁻¹χ`, so one quadrature table for `v` serves every `j`.

use std::f64::consts::{E, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::grid::{pairwise_sum, trapezoid, Field2D, UniformGrid1D};

/// `r(t) = φ(t) / (φ(t) + φ(1 - t))` with `φ(t) = e^{-1/t}` for `t > 0`.
pub fn smooth_ramp(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        // φ(1-t)/φ(t) = exp(1/t - 1/(1-t)); overflow to +inf gives exactly 0
        1.0 / (1.0 + (1.0 / t - 1.0 / (1.0 - t)).exp())
    }
}

/// C^∞ bump: zero outside `[a, b]`, one on `[c, d]`, monotone ramps between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothBump {
    support: (f64, f64),
    plateau: (f64, f64),
}

impl SmoothBump {
    pub fn new(support: (f64, f64), plateau: (f64, f64)) -> Result<Self> {
        let (a, b) = support;
        let (c, d) = plateau;
        if !(a < c && c < d && d < b) || ![a, b, c, d].iter().all(|v| v.is_finite()) {
            return param(format!(
                "bump needs a < c < d < b, got support [{a}, {b}] and plateau [{c}, {d}]"
            ));
        }
        Ok(Self { support, plateau })
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn plateau(&self) -> (f64, f64) {
        self.plateau
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (a, b) = self.support;
        let (c, d) = self.plateau;
        if t <= a || t >= b {
            0.0
        } else if t < c {
            smooth_ramp((t - a) / (c - a))
        } else if t <= d {
            1.0
        } else {
            smooth_ramp((b - t) / (b - d))
        }
    }

    /// Support split at the plateau ends: `[a, c, d, b]`.
    pub fn breakpoints(&self) -> [f64; 4] {
        [self.support.0, self.plateau.0, self.plateau.1, self.support.1]
    }
}

pub fn make_bump(support: (f64, f64), plateau: (f64, f64)) -> Result<SmoothBump> {
    SmoothBump::new(support, plateau)
}

/// `χ₁⁽ʲ⁾`: support `[2^{-j}, 2^{-j+1}]`, plateau trimmed by `2^{-j-10}` on each side.
pub fn chi1(j: u32) -> Result<SmoothBump> {
    if j < 1 {
        return param("chi1 needs j >= 1");
    }
    let lo = 2f64.powi(-(j as i32));
    let hi = 2.0 * lo;
    let margin = lo * 2f64.powi(-10);
    SmoothBump::new((lo, hi), (lo + margin, hi - margin))
}

/// `χ₂(x) = e^{-x²}`.
#[inline]
pub fn chi2(x: f64) -> f64 {
    (-x * x).exp()
}

/// `χ₃⁽ʲ⁾(ξ) = χ(ξ - 2^j) + χ(-ξ - 2^j)`; even in ξ.
pub fn chi3(chi: &SmoothBump, j: u32, xi: f64) -> f64 {
    let shift = 2f64.powi(j as i32);
    chi.eval(xi - shift) + chi.eval(-xi - shift)
}

/// Grid spacing used for the `F⁻¹χ` quadrature table.
const CHI_TABLE_STEP: f64 = 1.0 / 2048.0;

/// Trapezoid table for `v(x) = F⁻¹χ(x) = (2π)^{-1/2} ∫ e^{ixξ} χ(ξ) dξ`.
#[derive(Debug, Clone)]
pub struct ChiTransform {
    nodes: Vec<f64>,
    /// trapezoid weight · step · χ(node) · (2π)^{-1/2}
    weights: Vec<f64>,
}

impl ChiTransform {
    pub fn new(chi: &SmoothBump, step: f64) -> Self {
        let (a, b) = chi.support();
        let n = ((b - a) / step).ceil() as usize;
        let grid = UniformGrid1D::new(a, (b - a) / n as f64, n + 1).expect("bump support is non-degenerate");
        let norm = (2.0 * PI).sqrt().recip();
        let (nodes, weights) = grid
            .points()
            .enumerate()
            .map(|(i, t)| (t, grid.trapezoid_weight(i) * grid.step() * chi.eval(t) * norm))
            .filter(|&(_, w)| w != 0.0)
            .unzip();
        Self { nodes, weights }
    }

    /// `F⁻¹χ(x)`.
    pub fn inverse(&self, x: f64) -> Complex64 {
        self.eval(x, 1.0)
    }

    /// `Fχ(x)`.
    pub fn forward(&self, x: f64) -> Complex64 {
        self.eval(x, -1.0)
    }

    fn eval(&self, x: f64, sign: f64) -> Complex64 {
        let terms: Vec<Complex64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| Complex64::from_polar(w, sign * x * t))
            .collect();
        pairwise_sum(&terms)
    }
}

/// Parameters `(j0, nmax, A)` of the family `g_n = Σ_{j=j0}^{n} f_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FamilyParams {
    pub j0: u32,
    pub nmax: u32,
    #[serde(rename = "A")]
    pub a: f64,
}

impl Default for FamilyParams {
    fn default() -> Self {
        Self {
            j0: 13,
            nmax: 26,
            a: 4.0,
        }
    }
}

impl FamilyParams {
    pub fn validate(&self) -> Result<()> {
        if self.j0 < 2 {
            return param(format!("j0 must be at least 2, got {}", self.j0));
        }
        if self.nmax <= self.j0 {
            return param(format!("nmax ({}) must exceed j0 ({})", self.nmax, self.j0));
        }
        if self.nmax > 60 {
            return param(format!("nmax ({}) exceeds the double-precision range of 2^j", self.nmax));
        }
        if !(3.0..=100.0).contains(&self.a) {
            return param(format!("A must lie in [3, 100], got {}", self.a));
        }
        Ok(())
    }
}

/// Resolution used when taking the suprema that define `D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupGrid {
    pub half_width: f64,
    pub step: f64,
}

impl Default for SupGrid {
    fn default() -> Self {
        Self {
            half_width: 64.0,
            step: 1.0 / 16.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CounterexampleFamily {
    params: FamilyParams,
    chi: SmoothBump,
    transform: ChiTransform,
    d: f64,
}

impl CounterexampleFamily {
    pub fn new(params: FamilyParams) -> Result<Self> {
        params.validate()?;
        let chi = SmoothBump::new((0.0, params.a), (0.25, params.a - 0.25))?;
        let transform = ChiTransform::new(&chi, CHI_TABLE_STEP);
        let d = compute_d(&transform, SupGrid::default());
        Ok(Self {
            params,
            chi,
            transform,
            d,
        })
    }

    pub fn params(&self) -> &FamilyParams {
        &self.params
    }

    pub fn chi(&self) -> &SmoothBump {
        &self.chi
    }

    pub fn transform(&self) -> &ChiTransform {
        &self.transform
    }

    /// `D = sup|F⁻¹χ| + sup|Fχ|`.
    pub fn d(&self) -> f64 {
        self.d
    }

    /// Recomputes `D` on a different sup grid (the cached value is unaffected).
    pub fn compute_d(&self, grid: SupGrid) -> f64 {
        compute_d(&self.transform, grid)
    }

    pub fn chi3(&self, j: u32, xi: f64) -> f64 {
        chi3(&self.chi, j, xi)
    }

    /// `F⁻¹(χ₃⁽ʲ⁾)(x)`, real because `χ₃⁽ʲ⁾` is real and even.
    pub fn inv_ft_chi3(&self, j: u32, x: f64) -> f64 {
        modulate(self.transform.inverse(x), j, x)
    }

    fn check_j(&self, j: u32) -> Result<()> {
        let p = &self.params;
        if j < p.j0 || j > p.nmax {
            return param(format!("j = {j} outside [{}, {}]", p.j0, p.nmax));
        }
        Ok(())
    }

    fn check_n(&self, n: u32) -> Result<()> {
        let p = &self.params;
        if n <= p.j0 || n > p.nmax {
            return param(format!("n = {n} outside ({}, {}]", p.j0, p.nmax));
        }
        Ok(())
    }

    pub fn f_j(&self, j: u32, x: f64, y: f64) -> Result<f64> {
        self.check_j(j)?;
        let c1 = chi1(j)?.eval(y);
        if c1 == 0.0 {
            return Ok(0.0);
        }
        Ok(c1 * chi2(x) * self.inv_ft_chi3(j, x))
    }

    pub fn g_n(&self, n: u32, x: f64, y: f64) -> Result<f64> {
        self.check_n(n)?;
        let mut total = 0.0;
        for j in self.params.j0..=n {
            total += self.f_j(j, x, y)?;
        }
        Ok(total)
    }

    /// `x ↦ e^{-x²} F⁻¹(χ₃⁽ʲ⁾)(x)` sampled on `xgrid` for each `j` in `js`,
    /// sharing one evaluation of `F⁻¹χ` per point.
    fn x_profiles(&self, js: &[u32], xgrid: &UniformGrid1D) -> Vec<Vec<f64>> {
        let base: Vec<(f64, Complex64)> = (0..xgrid.count())
            .into_par_iter()
            .map(|i| {
                let x = xgrid.point(i);
                (x, self.transform.inverse(x))
            })
            .collect();
        js.iter()
            .map(|&j| base.iter().map(|&(x, v)| chi2(x) * modulate(v, j, x)).collect())
            .collect()
    }

    pub fn sample_f_j(&self, j: u32, xgrid: UniformGrid1D, ygrid: UniformGrid1D) -> Result<Field2D> {
        self.sample_sum(&[j], xgrid, ygrid)
    }

    pub fn sample_g_n(&self, n: u32, xgrid: UniformGrid1D, ygrid: UniformGrid1D) -> Result<Field2D> {
        self.check_n(n)?;
        let js: Vec<u32> = (self.params.j0..=n).collect();
        self.sample_sum(&js, xgrid, ygrid)
    }

    fn sample_sum(&self, js: &[u32], xgrid: UniformGrid1D, ygrid: UniformGrid1D) -> Result<Field2D> {
        for &j in js {
            self.check_j(j)?;
        }
        let profiles = self.x_profiles(js, &xgrid);
        let bumps: Vec<SmoothBump> = js.iter().map(|&j| chi1(j)).collect::<Result<_>>()?;
        let mut values = Vec::with_capacity(xgrid.count() * ygrid.count());
        for y in ygrid.points() {
            let weights: Vec<f64> = bumps.iter().map(|b| b.eval(y)).collect();
            for i in 0..xgrid.count() {
                let v: f64 = weights.iter().zip(&profiles).map(|(w, p)| w * p[i]).sum();
                values.push(Complex64::new(v, 0.0));
            }
        }
        Field2D::new(xgrid, ygrid, values)
    }

    /// Bounds on `g_n` evaluated on `xgrid` × (a uniform grid of `y_points`
    /// samples across each `supp χ₁⁽ʲ⁾`).
    ///
    /// The y-supports are pairwise disjoint, so on the samples of piece `j`
    /// only `f_j` is non-zero and every supremum factors into an x-part and a
    /// y-part.
    pub fn growth_bounds(&self, n: u32, xgrid: &UniformGrid1D, y_points: usize) -> Result<EnvelopeNorms> {
        self.check_n(n)?;
        let all = self.growth_bounds_upto(n, xgrid, y_points)?;
        Ok(*all.last().expect("n > j0 gives at least one entry"))
    }

    /// [`growth_bounds`](Self::growth_bounds) for every `n` in `(j0, nmax]`
    /// up to `n_last`, sharing the work between consecutive `n`.
    pub fn growth_bounds_upto(&self, n_last: u32, xgrid: &UniformGrid1D, y_points: usize) -> Result<Vec<EnvelopeNorms>> {
        self.check_n(n_last)?;
        if y_points < 2 {
            return param("need at least 2 y samples per piece");
        }
        let js: Vec<u32> = (self.params.j0..=n_last).collect();
        let profiles = self.x_profiles(&js, xgrid);
        let mut weighted_sup: f64 = 0.0;
        let mut majorant = vec![0.0f64; xgrid.count()];
        let mut out = Vec::with_capacity(js.len() - 1);
        for (&j, prof) in js.iter().zip(&profiles) {
            let bump = chi1(j)?;
            let (a, b) = bump.support();
            let ys = UniformGrid1D::new(a, (b - a) / (y_points - 1) as f64, y_points)?;
            let (mut sup_y, mut sup_wy): (f64, f64) = (0.0, 0.0);
            for y in ys.points() {
                let c = bump.eval(y);
                sup_y = sup_y.max(c);
                sup_wy = sup_wy.max((y * y).exp() * c);
            }
            for (i, x) in xgrid.points().enumerate() {
                let p = prof[i].abs();
                weighted_sup = weighted_sup.max((x * x).exp() * p * sup_wy);
                majorant[i] = majorant[i].max(p * sup_y);
            }
            if j > self.params.j0 {
                let sq: Vec<f64> = majorant.iter().map(|h| h * h).collect();
                out.push(EnvelopeNorms {
                    weighted_sup,
                    majorant_l2: trapezoid(xgrid, &sq).sqrt(),
                });
            }
        }
        Ok(out)
    }

    /// `D · e`, the bound on `‖‖e^{x²+y²} g_n‖_{L^∞_y}‖_{L^∞_x}`.
    pub fn weighted_sup_bound(&self) -> f64 {
        self.d * E
    }

    /// `D · ‖e^{-x²}‖_{L²} = D (π/2)^{1/4}`, the bound on `‖‖g_n‖_{L^∞_y}‖_{L²_x}`.
    pub fn majorant_l2_bound(&self) -> f64 {
        self.d * (PI / 2.0).powf(0.25)
    }
}

/// Norms of `g_n` that stay bounded in `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeNorms {
    /// `‖‖e^{x²+y²} g_n‖_{L^∞_y}‖_{L^∞_x}`
    pub weighted_sup: f64,
    /// `‖‖g_n‖_{L^∞_y}‖_{L²_x}`
    pub majorant_l2: f64,
}

#[inline]
fn modulate(v: Complex64, j: u32, x: f64) -> f64 {
    let phase = Complex64::cis(2f64.powi(j as i32) * x);
    2.0 * (phase * v).re
}

fn compute_d(transform: &ChiTransform, grid: SupGrid) -> f64 {
    let n = (grid.half_width / grid.step).round() as usize;
    let (inv, fwd) = (0..=2 * n)
        .into_par_iter()
        .map(|k| {
            let x = -grid.half_width + k as f64 * grid.step;
            (transform.inverse(x).norm(), transform.forward(x).norm())
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    inv + fwd
}
