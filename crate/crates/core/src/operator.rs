//! Calderón–Zygmund operators on the plane.
//!
//! Operators are applied as Fourier multipliers `T f = F⁻¹(m · F f)`. The
//! second half of the module evaluates `F₁(R₁₂ f_j)(ξ₁, 0)` for the
//! counterexample family semi-analytically, without ever sampling `f_j` on a
//! grid fine enough to resolve frequency `2^j`.
//!
//! # Slice formula
//!
//! With `m(ξ) = ξ₁ξ₂/|ξ|²`, the product rule `F(uv) = (2π)^{-1/2} Fu * Fv`
//! and `(2π)^{-1/2} ∫ e^{-izη} η/(1+η²) dη = -i √(π/2) sign(z) e^{-|z|}` give
//!
//! ```text
//! F₁(R₁₂ f_j)(ξ₁, 0) = -i C ξ₁ (Fχ₂ * χ₃⁽ʲ⁾)(ξ₁) ∫ χ₁⁽ʲ⁾(z) e^{-|ξ₁| z} dz,
//! C = 1 / (2 √(2π)),
//! ```
//!
//! where `Fχ₂(η) = 2^{-1/2} e^{-η²/4}` and `*` is the plain convolution
//! `∫ g(ξ₁ - s) h(s) ds`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bump::{chi1, CounterexampleFamily};
use crate::error::{param, Error, Result};
use crate::fourier::{ft2, ift2, Spectrum2D};
use crate::grid::{pairwise_sum, Field2D, UniformGrid1D};

type SymbolFn = dyn Fn(f64, f64) -> Complex64 + Send + Sync;

/// A named Fourier multiplier `m(ξ₁, ξ₂)`; `m(0, 0)` is taken to be 0
/// regardless of what the function returns there.
#[derive(Clone)]
pub struct MultiplierSymbol {
    name: String,
    m: Arc<SymbolFn>,
}

impl fmt::Debug for MultiplierSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplierSymbol").field("name", &self.name).finish()
    }
}

impl MultiplierSymbol {
    pub const CATALOG: [&'static str; 3] = ["riesz1", "riesz2", "riesz12"];

    pub fn new<F>(name: impl Into<String>, m: F) -> Self
    where
        F: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            m: Arc::new(m),
        }
    }

    /// `R₁`: `-i ξ₁ / |ξ|`.
    pub fn riesz1() -> Self {
        Self::new("riesz1", |a, b| Complex64::new(0.0, -a / a.hypot(b)))
    }

    /// `R₂`: `-i ξ₂ / |ξ|`.
    pub fn riesz2() -> Self {
        Self::new("riesz2", |a, b| Complex64::new(0.0, -b / a.hypot(b)))
    }

    /// `R₁₂`: `ξ₁ ξ₂ / |ξ|²`.
    pub fn riesz12() -> Self {
        Self::new("riesz12", |a, b| Complex64::new(a * b / (a * a + b * b), 0.0))
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "riesz1" => Ok(Self::riesz1()),
            "riesz2" => Ok(Self::riesz2()),
            "riesz12" => Ok(Self::riesz12()),
            other => param(format!(
                "unknown symbol '{other}' (expected one of {})",
                Self::CATALOG.join(", ")
            )),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, xi1: f64, xi2: f64) -> Complex64 {
        if xi1 == 0.0 && xi2 == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            (self.m)(xi1, xi2)
        }
    }
}

/// Multiplies the spectrum of `s` by `sym` on every frequency sample.
pub fn multiply_spectrum(s: &Spectrum2D, sym: &MultiplierSymbol) -> Result<Spectrum2D> {
    if !(s.is_frequency(crate::grid::Axis::X) && s.is_frequency(crate::grid::Axis::Y)) {
        return param("multiplier needs a spectrum in both axes");
    }
    let (xg, yg) = (*s.field.xgrid(), *s.field.ygrid());
    let nx = xg.count();
    let values: Vec<Complex64> = s
        .values()
        .par_iter()
        .enumerate()
        .map(|(k, &v)| {
            let (xi1, xi2) = (xg.point(k % nx), yg.point(k / nx));
            let m = sym.eval(xi1, xi2);
            if m.re.is_finite() && m.im.is_finite() {
                Ok(m * v)
            } else {
                Err(Error::Evaluation(format!(
                    "symbol '{}' is not finite at ({xi1}, {xi2})",
                    sym.name
                )))
            }
        })
        .collect::<Result<_>>()?;
    let mut out = Spectrum2D::new(Field2D::new(xg, yg, values)?, s.x_space, s.y_space)?;
    out.warnings = s.warnings.clone();
    Ok(out)
}

/// `F⁻¹(m · F f)`.
pub fn apply_multiplier(f: &Field2D, sym: &MultiplierSymbol) -> Result<Field2D> {
    Ok(ift2(&multiply_spectrum(&ft2(f), sym)?))
}

/// A kernel `K(x, y)` defined off the origin together with its constant `B`.
#[derive(Clone)]
pub struct CZKernelSpec {
    pub kernel: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    pub b: f64,
}

impl fmt::Debug for CZKernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CZKernelSpec").field("b", &self.b).finish_non_exhaustive()
    }
}

impl CZKernelSpec {
    /// `K(x, y) = xy / (2π (x² + y²)²)` with `B = 1`.
    pub fn riesz12() -> Self {
        Self {
            kernel: Arc::new(|x, y| {
                let r2 = x * x + y * y;
                x * y / (2.0 * PI * r2 * r2)
            }),
            b: 1.0,
        }
    }

    fn k(&self, x: f64, y: f64) -> f64 {
        (self.kernel)(x, y)
    }
}

/// Angular samples per circle; a multiple of 8 so the diagonals are hit.
const THETA_SAMPLES: usize = 1024;
/// Radial samples per octave in the log-radial quadratures.
const RADIAL_PER_OCTAVE: usize = 64;
/// Hörmander truncation starts at this multiple of `|y|`.
const HORMANDER_START: f64 = 64.0;
const HORMANDER_MAX_DOUBLINGS: usize = 40;
const HORMANDER_STABILITY: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct AnnulusIntegral {
    pub inner: f64,
    pub outer: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HormanderEstimate {
    pub y: (f64, f64),
    pub value: f64,
    /// Truncation radius at which the estimate stabilised.
    pub radius: f64,
    /// Relative change caused by the final doubling.
    pub last_change: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelReport {
    /// `max |K(x)| |x|²` over the sampled circles.
    pub size_witness: f64,
    pub annuli: Vec<AnnulusIntegral>,
    pub hormander: Vec<HormanderEstimate>,
}

impl KernelReport {
    /// Whether the size witness stays below `B / (2π) · (1 + tol)`.
    pub fn size_within(&self, b: f64, tol: f64) -> bool {
        self.size_witness <= b / (2.0 * PI) * (1.0 + tol)
    }
}

fn thetas() -> impl Iterator<Item = (f64, f64)> {
    let dt = 2.0 * PI / THETA_SAMPLES as f64;
    (0..THETA_SAMPLES).map(move |k| (k as f64 * dt).sin_cos())
}

/// `∫_{r<|x|<s} g(x) dx` in polar coordinates: trapezoid in `ln ρ`,
/// periodic rectangle rule in θ.
fn polar_shell<G: Fn(f64, f64) -> f64 + Sync>(r: f64, s: f64, g: G) -> f64 {
    let octaves = (s / r).log2().max(1.0 / RADIAL_PER_OCTAVE as f64);
    let n = ((octaves * RADIAL_PER_OCTAVE as f64).ceil() as usize).max(2) + 1;
    let grid = UniformGrid1D::new(r.ln(), (s / r).ln() / (n - 1) as f64, n).expect("s > r");
    let dt = 2.0 * PI / THETA_SAMPLES as f64;
    let radial: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let rho = grid.point(i).exp();
            let ring: Vec<f64> = thetas().map(|(sn, cs)| g(rho * cs, rho * sn)).collect();
            // dx = ρ dρ dθ = ρ² d(ln ρ) dθ
            grid.trapezoid_weight(i) * rho * rho * pairwise_sum(&ring) * dt
        })
        .collect();
    pairwise_sum(&radial) * grid.step()
}

fn hormander(spec: &CZKernelSpec, y: (f64, f64)) -> Result<HormanderEstimate> {
    let ny = y.0.hypot(y.1);
    if !(ny > 0.0 && ny.is_finite()) {
        return param("Hörmander sample y must be non-zero and finite");
    }
    let g = |a: f64, b: f64| (spec.k(a - y.0, b - y.1) - spec.k(a, b)).abs();
    let mut radius = HORMANDER_START * ny;
    let mut total = polar_shell(2.0 * ny, radius, g);
    for _ in 0..HORMANDER_MAX_DOUBLINGS {
        let shell = polar_shell(radius, 2.0 * radius, g);
        radius *= 2.0;
        total += shell;
        let change = if total > 0.0 { shell / total } else { 0.0 };
        if change < HORMANDER_STABILITY {
            return Ok(HormanderEstimate {
                y,
                value: total,
                radius,
                last_change: change,
            });
        }
    }
    Err(Error::Evaluation(format!(
        "Hörmander integral for y = {y:?} did not stabilise"
    )))
}

/// Numerical witnesses for the three kernel conditions: the size bound on
/// the circles `|x| = radii[k]`, cancellation on the annuli between
/// consecutive radii and the Hörmander integral for each `y` in `ys`.
pub fn verify_kernel_conditions(
    spec: &CZKernelSpec,
    radii: &[f64],
    ys: &[(f64, f64)],
) -> Result<KernelReport> {
    if radii.is_empty() {
        return param("need at least one radius");
    }
    if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return param("radii must be positive and finite");
    }
    if let Some(w) = radii.windows(2).find(|w| w[0] >= w[1]) {
        return param(format!("annulus needs r < s, got r = {}, s = {}", w[0], w[1]));
    }
    let mut size_witness: f64 = 0.0;
    for &r in radii {
        for (sn, cs) in thetas() {
            size_witness = size_witness.max(spec.k(r * cs, r * sn).abs() * r * r);
        }
    }
    let annuli = radii
        .windows(2)
        .map(|w| AnnulusIntegral {
            inner: w[0],
            outer: w[1],
            value: polar_shell(w[0], w[1], |a, b| spec.k(a, b)),
        })
        .collect();
    let hormander = ys.iter().map(|&y| hormander(spec, y)).collect::<Result<_>>()?;
    Ok(KernelReport {
        size_witness,
        annuli,
        hormander,
    })
}

/// `C` in the slice formula.
pub const C_CAL: f64 = 0.199_471_140_200_716_35; // 1 / (2 √(2π))

/// Half-width of the convolution window around `ξ₁`.
pub const CONV_HALF_WIDTH: f64 = 8.0;

/// Step of the `χ` table used by the convolution.
const CONV_STEP: f64 = 1.0 / 512.0;
/// Trapezoid intervals on each ramp of `χ₁⁽ʲ⁾`.
const RAMP_INTERVALS: usize = 256;

/// `E = (√π/2)(e^{-2-2^{-9}} - e^{-4+2^{-9}}) ∫_{-1/4}^{1/4} e^{-ξ²/4} dξ`.
pub fn e_const() -> f64 {
    let g = UniformGrid1D::new(-0.25, 0.5 / 65536.0, 65537).expect("static grid");
    let vals: Vec<f64> = g.points().map(|x| (-x * x / 4.0).exp()).collect();
    let integral = crate::grid::trapezoid(&g, &vals);
    let t = 2f64.powi(-9);
    PI.sqrt() / 2.0 * ((-2.0 - t).exp() - (-4.0 + t).exp()) * integral
}

/// `Fχ₂(η) = 2^{-1/2} e^{-η²/4}`.
#[inline]
fn ft_chi2(eta: f64) -> f64 {
    std::f64::consts::FRAC_1_SQRT_2 * (-eta * eta / 4.0).exp()
}

/// Semi-analytic evaluation of `F₁(R₁₂ f_j)(ξ₁, 0)` and the constants that
/// bound it.
#[derive(Debug, Clone)]
pub struct SemiAnalytic {
    family: CounterexampleFamily,
    c_cal: f64,
    e: f64,
    half_width: f64,
    /// `χ(t_k)` at `t_k = k h`, `h = A / (len - 1)`.
    chi_table: Vec<f64>,
    chi_step: f64,
}

impl SemiAnalytic {
    pub fn new(family: CounterexampleFamily) -> Self {
        Self::with_window(family, CONV_HALF_WIDTH)
    }

    /// Same as [`SemiAnalytic::new`] with a different convolution half-width.
    pub fn with_window(family: CounterexampleFamily, half_width: f64) -> Self {
        let a = family.params().a;
        let n = (a / CONV_STEP).ceil() as usize;
        let chi_step = a / n as f64;
        let chi_table = (0..=n).map(|k| family.chi().eval(k as f64 * chi_step)).collect();
        Self {
            family,
            c_cal: C_CAL,
            e: e_const(),
            half_width,
            chi_table,
            chi_step,
        }
    }

    pub fn family(&self) -> &CounterexampleFamily {
        &self.family
    }

    pub fn c_cal(&self) -> f64 {
        self.c_cal
    }

    pub fn e(&self) -> f64 {
        self.e
    }

    /// `∫ Fχ₂(u - t) χ(t) dt` restricted to `|u - t| ≤ half_width`.
    fn conv_piece(&self, u: f64) -> f64 {
        let a = self.family.params().a;
        let lo = (u - self.half_width).max(0.0);
        let hi = (u + self.half_width).min(a);
        if lo >= hi {
            return 0.0;
        }
        let h = self.chi_step;
        let k0 = (lo / h).ceil() as usize;
        let k1 = ((hi / h).floor() as usize).min(self.chi_table.len() - 1);
        if k0 > k1 {
            return 0.0;
        }
        // χ vanishes at both ends of its support and the Gaussian is below
        // e^{-16} at the window edges, so the plain Riemann sum is the
        // trapezoid rule up to negligible end terms.
        let terms: Vec<f64> = (k0..=k1)
            .map(|k| ft_chi2(u - k as f64 * h) * self.chi_table[k])
            .collect();
        pairwise_sum(&terms) * h
    }

    /// `(Fχ₂ * χ₃⁽ʲ⁾)(ξ₁)` over the window `[ξ₁ - 8, ξ₁ + 8]`.
    pub fn convolution(&self, j: u32, xi1: f64) -> f64 {
        let shift = 2f64.powi(j as i32);
        // χ₃⁽ʲ⁾(s) = χ(s - 2^j) + χ(-s - 2^j)
        self.conv_piece(xi1 - shift) + self.conv_piece(-xi1 - shift)
    }

    /// `∫ χ₁⁽ʲ⁾(z) e^{-|ξ₁| z} dz`.
    pub fn z_integral(&self, j: u32, xi1: f64) -> Result<f64> {
        let bump = chi1(j)?;
        let [a, c, d, b] = bump.breakpoints();
        let w = xi1.abs();
        let ramp = |from: f64, to: f64| -> f64 {
            let g = UniformGrid1D::new(from, (to - from) / RAMP_INTERVALS as f64, RAMP_INTERVALS + 1)
                .expect("ramp is non-degenerate");
            let vals: Vec<f64> = (0..=RAMP_INTERVALS)
                .map(|i| bump.eval(g.point(i)) * (-w * (from + i as f64 * g.step())).exp())
                .collect();
            crate::grid::trapezoid(&g, &vals)
        };
        let plateau = if w == 0.0 {
            d - c
        } else {
            // (e^{-wc} - e^{-wd}) / w, written to avoid cancellation
            (-w * c).exp() * -(-w * (d - c)).exp_m1() / w
        };
        Ok(ramp(a, c) + plateau + ramp(d, b))
    }

    /// Signed value of `F₁(R₁₂ f_j)(ξ₁, 0)`: `-i C ξ₁ (Fχ₂ * χ₃⁽ʲ⁾)(ξ₁) Z_j(ξ₁)`.
    pub fn slice(&self, j: u32, xi1: f64) -> Result<Complex64> {
        let conv = self.convolution(j, xi1);
        if conv == 0.0 {
            chi1(j)?;
            return Ok(Complex64::new(0.0, 0.0));
        }
        let z = self.z_integral(j, xi1)?;
        Ok(Complex64::new(0.0, -self.c_cal * xi1 * conv * z))
    }

    /// `|F₁(R₁₂ f_j)(ξ₁, 0)|`.
    pub fn semi_h(&self, j: u32, xi1: f64) -> Result<f64> {
        if xi1 == 0.0 {
            return param("semi_H is undefined at ξ₁ = 0");
        }
        Ok(self.slice(j, xi1)?.norm())
    }

    /// `C · 4√π · 2^{-max(i, j)}`: bound for `|F₁(R₁₂ f_i)(ξ₁, 0)|` on the j-window.
    pub fn cross_bound(&self, i: u32, j: u32) -> Result<f64> {
        if i == j {
            return param("cross_bound needs i ≠ j");
        }
        let p = self.family.params();
        for k in [i, j] {
            if k < p.j0 || k > p.nmax {
                return param(format!("index {k} outside [{}, {}]", p.j0, p.nmax));
            }
        }
        Ok(self.c_cal * 4.0 * PI.sqrt() * 2f64.powi(-(i.max(j) as i32)))
    }

    /// `C E - Σ_{i≠j, j0≤i≤n} cross_bound(i, j)`.
    pub fn margin(&self, j: u32, n: u32) -> Result<f64> {
        let p = self.family.params();
        if j < p.j0 || j > n || n > p.nmax {
            return param(format!("margin needs {} ≤ j ≤ n ≤ {}, got j = {j}, n = {n}", p.j0, p.nmax));
        }
        let mut cross = Vec::new();
        for i in (p.j0..=n).filter(|&i| i != j) {
            cross.push(self.cross_bound(i, j)?);
        }
        Ok(self.c_cal * self.e - pairwise_sum(&cross))
    }

    /// The window `[2^j + 1, 2^j + A - 1]` on which the margin applies.
    pub fn window(&self, j: u32) -> (f64, f64) {
        let s = 2f64.powi(j as i32);
        (s + 1.0, s + self.family.params().a - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bump::FamilyParams;
    use crate::fourier::{ft1, partial_derivative};
    use crate::grid::Axis;
    use proptest::prelude::*;

    fn gaussian(n: usize, l: f64) -> Field2D {
        let g = UniformGrid1D::centered(l, n).unwrap();
        Field2D::from_real_fn(g, g, |x, y| (-x * x - y * y).exp()).unwrap()
    }

    fn rel_l2(a: &Field2D, b: &Field2D) -> f64 {
        a.sub(b).unwrap().l2_norm() / b.l2_norm()
    }

    fn semi(j0: u32, nmax: u32) -> SemiAnalytic {
        SemiAnalytic::new(CounterexampleFamily::new(FamilyParams { j0, nmax, a: 4.0 }).unwrap())
    }

    fn small() -> &'static SemiAnalytic {
        static S: std::sync::OnceLock<SemiAnalytic> = std::sync::OnceLock::new();
        S.get_or_init(|| semi(3, 8))
    }

    #[test]
    fn catalog_by_name() {
        for name in MultiplierSymbol::CATALOG {
            assert_eq!(MultiplierSymbol::by_name(name).unwrap().name(), name);
        }
        assert!(MultiplierSymbol::by_name("hilbert").is_err());
        let r = MultiplierSymbol::riesz12();
        assert_eq!(r.eval(0.0, 0.0), Complex64::new(0.0, 0.0));
        assert!((r.eval(1.0, 1.0).re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn unit_multiplier_removes_only_the_mean() {
        let g = UniformGrid1D::centered(16.0, 64).unwrap();
        let f = Field2D::from_real_fn(g, g, |x, y| x * (-x * x - y * y).exp()).unwrap();
        let one = MultiplierSymbol::new("one", |_, _| Complex64::new(1.0, 0.0));
        let out = apply_multiplier(&f, &one).unwrap();
        assert!(rel_l2(&out, &f) < 1e-12);

        // a non-zero-mean input loses exactly its zero-frequency component
        let h = Field2D::from_real_fn(g, g, |x, y| (-x * x - y * y).exp()).unwrap();
        let out = apply_multiplier(&h, &one).unwrap();
        let mean = h.values().iter().sum::<Complex64>() / h.values().len() as f64;
        let expect = h.map(|v| v - mean).unwrap();
        assert!(rel_l2(&out, &expect) < 1e-12);
    }

    #[test]
    fn eq1_identity_for_gaussian() {
        let u = gaussian(256, 16.0);
        let uxx = partial_derivative(&partial_derivative(&u, Axis::X), Axis::X);
        let uyy = partial_derivative(&partial_derivative(&u, Axis::Y), Axis::Y);
        let lap = uxx.add(&uyy).unwrap();
        let uxy = partial_derivative(&partial_derivative(&u, Axis::X), Axis::Y);
        let lhs = apply_multiplier(&lap, &MultiplierSymbol::riesz12()).unwrap();
        assert!(rel_l2(&lhs, &uxy) < 1e-6);
    }

    #[test]
    fn riesz12_kills_axis_spectra() {
        // F f supported on ξ₂ = 0: f constant in y (periodic sense) times a
        // Gaussian in x.
        let g = UniformGrid1D::centered(16.0, 64).unwrap();
        let f = Field2D::from_real_fn(g, g, |x, _| (-x * x).exp()).unwrap();
        let out = apply_multiplier(&f, &MultiplierSymbol::riesz12()).unwrap();
        assert!(out.max_abs() < 1e-10);
    }

    #[test]
    fn real_input_gives_real_output() {
        let g = UniformGrid1D::centered(16.0, 128).unwrap();
        let f = Field2D::from_real_fn(g, g, |x, y| (x - 0.3) * (-x * x - 2.0 * y * y + x * y).exp()).unwrap();
        for name in MultiplierSymbol::CATALOG {
            let out = apply_multiplier(&f, &MultiplierSymbol::by_name(name).unwrap()).unwrap();
            let im = out.values().iter().map(|v| v.im.abs()).fold(0.0, f64::max);
            assert!(im < 1e-8, "{name}: {im}");
            assert!(out.l2_norm() <= f.l2_norm() + 1e-10);
        }
    }

    #[test]
    fn non_finite_symbol_is_an_evaluation_error() {
        let g = UniformGrid1D::centered(8.0, 16).unwrap();
        let f = Field2D::from_real_fn(g, g, |x, y| (-x * x - y * y).exp()).unwrap();
        let bad = MultiplierSymbol::new("bad", |a, _| Complex64::new(1.0 / a, 0.0));
        assert!(matches!(apply_multiplier(&f, &bad), Err(Error::Evaluation(_))));
    }

    #[test]
    fn kernel_conditions_for_riesz12() {
        let spec = CZKernelSpec::riesz12();
        let report = verify_kernel_conditions(&spec, &[0.5, 1.0, 3.0, 10.0], &[(1.0, 0.0), (0.3, -0.7)]).unwrap();
        // oracle: max over θ of |sin θ cos θ| / (2π) = 1/(4π)
        let brute = (0..100_000)
            .map(|k| {
                let t = k as f64 * 2.0 * PI / 100_000.0;
                (t.sin() * t.cos()).abs() / (2.0 * PI)
            })
            .fold(0.0, f64::max);
        assert!((report.size_witness - 1.0 / (4.0 * PI)).abs() < 1e-12);
        assert!((brute - report.size_witness).abs() < 1e-9);
        assert!(report.size_within(spec.b, 1e-12));
        assert_eq!(report.annuli.len(), 3);
        for a in &report.annuli {
            assert!(a.value.abs() < 1e-10, "{a:?}");
        }
        for h in &report.hormander {
            assert!(h.value.is_finite() && h.value > 0.0);
            assert!(h.last_change < 0.01);
        }
        // homogeneity of degree -2 makes the Hörmander integral scale free
        let scaled = verify_kernel_conditions(&spec, &[1.0], &[(4.0, 0.0)]).unwrap();
        let rel = (scaled.hormander[0].value - report.hormander[0].value).abs() / report.hormander[0].value;
        assert!(rel < 1e-6, "{rel}");
    }

    #[test]
    fn hormander_is_stable_under_extra_doubling() {
        let spec = CZKernelSpec::riesz12();
        let est = hormander(&spec, (0.0, 1.0)).unwrap();
        let extra = polar_shell(est.radius, 2.0 * est.radius, |a, b| {
            (spec.k(a, b - 1.0) - spec.k(a, b)).abs()
        });
        assert!(extra / est.value < 0.01);
    }

    #[test]
    fn kernel_radii_validated() {
        let spec = CZKernelSpec::riesz12();
        assert!(verify_kernel_conditions(&spec, &[2.0, 1.0], &[]).is_err());
        assert!(verify_kernel_conditions(&spec, &[1.0, 1.0], &[]).is_err());
        assert!(verify_kernel_conditions(&spec, &[-1.0, 1.0], &[]).is_err());
    }

    #[test]
    fn c_cal_constant() {
        assert!((C_CAL - 1.0 / (2.0 * (2.0 * PI).sqrt())).abs() < 1e-17);
    }

    #[test]
    fn e_matches_factorwise_oracle() {
        // fine-trapezoid oracle for the Gaussian factor, closed forms elsewhere
        let n = 200_000;
        let h = 0.5 / n as f64;
        let mut integral = 0.0;
        for k in 0..=n {
            let x = -0.25 + k as f64 * h;
            let w = if k == 0 || k == n { 0.5 } else { 1.0 };
            integral += w * (-x * x / 4.0).exp() * h;
        }
        // closed form: 2√π erf(1/8) = 0.497408…
        assert!((integral - 0.497_408).abs() < 1e-6);
        let bracket = (-2.0 - 2f64.powi(-9)).exp() - (-4.0 + 2f64.powi(-9)).exp();
        assert!((bracket - 0.11672).abs() < 1e-4);
        let e = e_const();
        assert!((e - PI.sqrt() / 2.0 * bracket * integral).abs() < 1e-10 * e);
        assert!((e - 0.0515).abs() / 0.0515 < 0.01);
        assert!(e > 0.0);
        assert_eq!(semi(13, 26).e(), semi(3, 8).e());
    }

    #[test]
    fn z_integral_brackets() {
        let s = semi(3, 20);
        for j in [3u32, 7, 13, 20] {
            let lo = 2f64.powi(-(j as i32));
            let m = lo * 2f64.powi(-10);
            for w in [0.3, 1.0, 2f64.powi(j as i32), 2f64.powi(j as i32) + 3.0, 5e3] {
                let val = w * s.z_integral(j, w).unwrap();
                let inner = (-w * (lo + m)).exp() - (-w * (2.0 * lo - m)).exp();
                let outer = (-w * lo).exp() - (-w * 2.0 * lo).exp();
                assert!(inner <= val * (1.0 + 1e-12) && val <= outer * (1.0 + 1e-12), "j={j} w={w}");
                assert_eq!(s.z_integral(j, -w).unwrap(), s.z_integral(j, w).unwrap());
            }
            let w = 2f64.powi(j as i32);
            let outer = (-w * lo).exp() - (-w * 2.0 * lo).exp();
            assert!((outer - 0.23254).abs() < 1e-5);
        }
    }

    #[test]
    fn z_integral_matches_brute_force() {
        let s = semi(3, 8);
        let j = 5;
        let bump = chi1(j).unwrap();
        let (a, b) = bump.support();
        let n = 1 << 22;
        let h = (b - a) / n as f64;
        let w = 40.0;
        let brute: f64 = (0..=n)
            .map(|k| {
                let z = a + k as f64 * h;
                let wt = if k == 0 || k == n { 0.5 } else { 1.0 };
                wt * bump.eval(z) * (-w * z).exp() * h
            })
            .sum();
        assert!((s.z_integral(j, w).unwrap() - brute).abs() / brute < 1e-9);
    }

    #[test]
    fn convolution_window_doubling_is_stable() {
        let fam = CounterexampleFamily::new(FamilyParams::default()).unwrap();
        let narrow = SemiAnalytic::new(fam.clone());
        let wide = SemiAnalytic::with_window(fam, 2.0 * CONV_HALF_WIDTH);
        for j in [13u32, 20, 26] {
            let (lo, hi) = narrow.window(j);
            for k in 0..=20 {
                let xi = lo + (hi - lo) * k as f64 / 20.0;
                let (a, b) = (narrow.convolution(j, xi), wide.convolution(j, xi));
                assert!((a - b).abs() / b.abs() < 1e-3, "j={j} ξ={xi}");
            }
        }
    }

    #[test]
    fn convolution_matches_direct_quadrature() {
        let s = semi(3, 8);
        let chi = *s.family().chi();
        let j = 4;
        let xi = 17.3;
        // oracle: trapezoid over s on a fine grid, no window
        let n = 400_000;
        let (lo, hi) = (0.0, 40.0);
        let h = (hi - lo) / n as f64;
        let direct: f64 = (0..=n)
            .map(|k| {
                let t = lo + k as f64 * h;
                ft_chi2(xi - t) * crate::bump::chi3(&chi, j, t) * h
            })
            .sum();
        assert!((s.convolution(j, xi) - direct).abs() < 1e-7 * direct.abs());
    }

    #[test]
    fn semi_h_rejects_zero_frequency() {
        assert!(semi(3, 8).semi_h(4, 0.0).is_err());
    }

    #[test]
    fn cross_bounds_follow_closed_form() {
        let s = semi(13, 26);
        let k = C_CAL * 4.0 * PI.sqrt();
        assert!((s.cross_bound(14, 15).unwrap() - k * 2f64.powi(-15)).abs() < 1e-18);
        assert!((s.cross_bound(18, 15).unwrap() - k * 2f64.powi(-18)).abs() < 1e-18);
        assert!(s.cross_bound(15, 15).is_err());
        assert!(s.cross_bound(12, 15).is_err());
    }

    #[test]
    fn cross_terms_are_below_their_bounds() {
        let s = semi(13, 20);
        for j in 13..=20 {
            let (lo, hi) = s.window(j);
            for i in (13..=20).filter(|&i| i != j) {
                let bound = s.cross_bound(i, j).unwrap();
                for k in 0..=32 {
                    let xi = lo + (hi - lo) * k as f64 / 32.0;
                    assert!(s.semi_h(i, xi).unwrap() <= bound * 1.05);
                }
            }
        }
    }

    #[test]
    fn margin_properties() {
        let s = semi(13, 26);
        // the two numbers the margin compares, with C factored out
        assert!((s.e() - 0.0515).abs() < 5e-4);
        let tail = 4.0 * PI.sqrt() * 13.0 * 2f64.powi(-13);
        assert!((tail - 0.01125).abs() < 1e-5);
        for n in 14..=26 {
            let mut prev = f64::NEG_INFINITY;
            for j in 13..=n {
                let m = s.margin(j, n).unwrap();
                assert!(m > 0.0);
                if j > 14 {
                    assert!(m >= prev - 1e-15, "n={n} j={j}");
                }
                prev = m;
            }
        }
        let geometric: f64 = (21..=26).map(|i| C_CAL * 4.0 * PI.sqrt() * 2f64.powi(-i)).sum();
        let drop = s.margin(15, 20).unwrap() - s.margin(15, 26).unwrap();
        assert!(drop > 0.0 && drop <= geometric * (1.0 + 1e-12));
        assert!(s.margin(12, 20).is_err());
    }

    /// Full 2-D spectral path against the slice formula.
    fn path_error(j: u32, nx: usize, ny: usize) -> f64 {
        let fam = CounterexampleFamily::new(FamilyParams { j0: 3, nmax: 8, a: 4.0 }).unwrap();
        let s = SemiAnalytic::new(fam.clone());
        let xg = UniformGrid1D::centered(16.0, nx).unwrap();
        let dy = 2f64.powi(-(j as i32)) / 32.5;
        let yg = UniformGrid1D::new(-((ny / 2) as f64) * dy, dy, ny).unwrap();
        let f = fam.sample_f_j(j, xg, yg).unwrap();
        let tf = apply_multiplier(&f, &MultiplierSymbol::riesz12()).unwrap();
        let spec = ft1(&tf.row(ny / 2));
        let (lo, hi) = s.window(j);
        let (mut num, mut den) = (0.0, 0.0);
        for (k, xi) in spec.freq().points().enumerate() {
            if xi >= lo && xi <= hi {
                let h = s.semi_h(j, xi).unwrap();
                num += (spec.values()[k].norm() - h).powi(2);
                den += h * h;
            }
        }
        (num / den).sqrt()
    }

    #[test]
    fn path_equivalence_small_j() {
        for j in 3..=5 {
            let err = path_error(j, 1024, 1024);
            assert!(err < 0.02, "j={j}: {err}");
        }
    }

    proptest! {
        #[test]
        fn symbols_bounded_by_one(a in -1e3f64..1e3, b in -1e3f64..1e3) {
            for name in MultiplierSymbol::CATALOG {
                prop_assert!(MultiplierSymbol::by_name(name).unwrap().eval(a, b).norm() <= 1.0 + 1e-15);
            }
        }

        #[test]
        fn slice_magnitude_is_even(xi in 1.0f64..40.0, j in 3u32..6) {
            let s = small();
            prop_assert_eq!(s.semi_h(j, xi).unwrap(), s.semi_h(j, -xi).unwrap());
        }
    }
}
