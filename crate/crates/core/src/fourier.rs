//! Discrete approximations of the symmetric Fourier transform
//!
//! ```text
//! F f(ξ)    = (2π)^{-n/2} ∫ e^{-i x·ξ} f(x) dx
//! F⁻¹ f(x)  = (2π)^{-n/2} ∫ e^{+i x·ξ} f(ξ) dξ
//! ```
//!
//! A spatial grid `x_k = x₀ + k h` (N points) maps to the frequency grid
//! `ξ_m = m Δξ`, `Δξ = 2π / (N h)`, `m = -⌊N/2⌋ … ⌈N/2⌉-1`, stored ascending.
//! Samples of the transform are `h (2π)^{-1/2} e^{-i x₀ ξ_m} DFT[f]_m`, i.e.
//! the Riemann sum of the continuous integral; the inverse uses the matching
//! Riemann sum in ξ, so `ift ∘ ft` is the identity up to rounding and the
//! discrete Plancherel identity holds exactly.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{param, Result};
use crate::grid::{Axis, Field1D, Field2D, UniformGrid1D};

/// Boundary samples above this fraction of the peak trigger a decay warning.
pub const BOUNDARY_DECAY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct DecayWarning {
    pub axis: Option<Axis>,
    /// `max |boundary sample| / max |f|`
    pub ratio: f64,
}

impl std::fmt::Display for DecayWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.axis {
            Some(a) => write!(f, "field does not decay along {a:?}: boundary/peak = {:.3e}", self.ratio),
            None => write!(f, "field does not decay at the grid boundary: boundary/peak = {:.3e}", self.ratio),
        }
    }
}

/// Frequency grid dual to a spatial grid.
pub fn frequency_grid(space: &UniformGrid1D) -> UniformGrid1D {
    let n = space.count();
    let dxi = 2.0 * PI / (n as f64 * space.step());
    let m_min = -((n / 2) as f64);
    UniformGrid1D::new(m_min * dxi, dxi, n).expect("dual of a valid grid is valid")
}

fn check_duality(freq: &UniformGrid1D, space: &UniformGrid1D) -> Result<()> {
    let expected = frequency_grid(space);
    let tol = 1e-9 * expected.step();
    if freq.count() != expected.count()
        || (freq.step() - expected.step()).abs() > tol
        || (freq.start() - expected.start()).abs() > tol * freq.count() as f64
    {
        return param(format!(
            "frequency grid {freq:?} is not dual to spatial grid {space:?}"
        ));
    }
    Ok(())
}

/// Planned 1-D transform along one axis of length `n`.
struct AxisPlan {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl AxisPlan {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    #[inline]
    fn m_min(&self) -> i64 {
        -((self.n / 2) as i64)
    }

    #[inline]
    fn wrap(&self, m: i64) -> usize {
        m.rem_euclid(self.n as i64) as usize
    }

    /// Phase and scale factors for ascending frequency index `q`.
    fn forward_factors(&self, space: &UniformGrid1D) -> Vec<Complex64> {
        let freq = frequency_grid(space);
        let scale = space.step() / (2.0 * PI).sqrt();
        (0..self.n)
            .map(|q| Complex64::from_polar(scale, -space.start() * freq.point(q)))
            .collect()
    }

    fn inverse_factors(&self, freq: &UniformGrid1D, space: &UniformGrid1D) -> Vec<Complex64> {
        let scale = freq.step() / (2.0 * PI).sqrt();
        (0..self.n)
            .map(|q| Complex64::from_polar(scale, space.start() * freq.point(q)))
            .collect()
    }

    /// In-place: spatial samples -> ascending spectrum samples.
    fn forward(&self, line: &mut [Complex64], factors: &[Complex64], scratch: &mut Vec<Complex64>) {
        self.fwd.process(line);
        scratch.clear();
        scratch.extend((0..self.n).map(|q| {
            let m = self.m_min() + q as i64;
            line[self.wrap(m)] * factors[q]
        }));
        line.copy_from_slice(scratch);
    }

    /// In-place: ascending spectrum samples -> spatial samples.
    fn inverse(&self, line: &mut [Complex64], factors: &[Complex64], scratch: &mut Vec<Complex64>) {
        scratch.clear();
        scratch.resize(self.n, Complex64::new(0.0, 0.0));
        for q in 0..self.n {
            let m = self.m_min() + q as i64;
            scratch[self.wrap(m)] = line[q] * factors[q];
        }
        line.copy_from_slice(scratch);
        self.inv.process(line);
    }
}

fn boundary_ratio(values: &[Complex64]) -> f64 {
    let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let edge = values[0].norm().max(values[values.len() - 1].norm());
    edge / peak
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum1D {
    /// Samples on the ascending frequency grid.
    pub field: Field1D,
    /// The spatial grid this spectrum is dual to.
    pub space: UniformGrid1D,
    pub warning: Option<DecayWarning>,
}

impl Spectrum1D {
    pub fn new(field: Field1D, space: UniformGrid1D) -> Result<Self> {
        check_duality(field.grid(), &space)?;
        Ok(Self {
            field,
            space,
            warning: None,
        })
    }

    pub fn freq(&self) -> &UniformGrid1D {
        self.field.grid()
    }

    pub fn values(&self) -> &[Complex64] {
        self.field.values()
    }

}

pub fn ft1(f: &Field1D) -> Spectrum1D {
    let space = *f.grid();
    let plan = AxisPlan::new(space.count());
    let factors = plan.forward_factors(&space);
    let mut line = f.values().to_vec();
    let mut scratch = Vec::with_capacity(line.len());
    plan.forward(&mut line, &factors, &mut scratch);
    let ratio = boundary_ratio(f.values());
    Spectrum1D {
        field: Field1D::new(frequency_grid(&space), line).expect("transform of finite data is finite"),
        space,
        warning: (ratio > BOUNDARY_DECAY_TOL).then_some(DecayWarning { axis: None, ratio }),
    }
}

pub fn ift1(s: &Spectrum1D) -> Field1D {
    let freq = *s.freq();
    let plan = AxisPlan::new(freq.count());
    let factors = plan.inverse_factors(&freq, &s.space);
    let mut line = s.values().to_vec();
    let mut scratch = Vec::with_capacity(line.len());
    plan.inverse(&mut line, &factors, &mut scratch);
    Field1D::new(s.space, line).expect("transform of finite data is finite")
}

/// A 2-D field in which each axis is independently in the spatial or the
/// frequency domain. An axis held as frequencies records the spatial grid it
/// is dual to.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum2D {
    pub field: Field2D,
    pub x_space: Option<UniformGrid1D>,
    pub y_space: Option<UniformGrid1D>,
    pub warnings: Vec<DecayWarning>,
}

impl Spectrum2D {
    /// Wraps a spatial field without transforming anything.
    pub fn spatial(field: Field2D) -> Self {
        Self {
            field,
            x_space: None,
            y_space: None,
            warnings: Vec::new(),
        }
    }

    pub fn new(
        field: Field2D,
        x_space: Option<UniformGrid1D>,
        y_space: Option<UniformGrid1D>,
    ) -> Result<Self> {
        if let Some(space) = &x_space {
            check_duality(field.xgrid(), space)?;
        }
        if let Some(space) = &y_space {
            check_duality(field.ygrid(), space)?;
        }
        Ok(Self {
            field,
            x_space,
            y_space,
            warnings: Vec::new(),
        })
    }

    pub fn space(&self, axis: Axis) -> Option<&UniformGrid1D> {
        match axis {
            Axis::X => self.x_space.as_ref(),
            Axis::Y => self.y_space.as_ref(),
        }
    }

    pub fn is_frequency(&self, axis: Axis) -> bool {
        self.space(axis).is_some()
    }

    pub fn values(&self) -> &[Complex64] {
        self.field.values()
    }

    /// Transforms `axis` from space to frequency.
    pub fn forward_axis(mut self, axis: Axis) -> Result<Self> {
        if self.is_frequency(axis) {
            return param(format!("axis {axis:?} is already in the frequency domain"));
        }
        let space = *self.field.grid(axis);
        let plan = AxisPlan::new(space.count());
        let factors = plan.forward_factors(&space);
        let ratio = max_line_boundary_ratio(&self.field, axis);
        let values = transform_lines(&self.field, axis, |line, scratch| {
            plan.forward(line, &factors, scratch)
        });
        let freq = frequency_grid(&space);
        self.field = rebuild(&self.field, axis, freq, values);
        match axis {
            Axis::X => self.x_space = Some(space),
            Axis::Y => self.y_space = Some(space),
        }
        if ratio > BOUNDARY_DECAY_TOL {
            self.warnings.push(DecayWarning {
                axis: Some(axis),
                ratio,
            });
        }
        Ok(self)
    }

    /// Transforms `axis` from frequency back to space.
    pub fn inverse_axis(mut self, axis: Axis) -> Result<Self> {
        let Some(&space) = self.space(axis) else {
            return param(format!("axis {axis:?} is not in the frequency domain"));
        };
        let freq = *self.field.grid(axis);
        let plan = AxisPlan::new(freq.count());
        let factors = plan.inverse_factors(&freq, &space);
        let values = transform_lines(&self.field, axis, |line, scratch| {
            plan.inverse(line, &factors, scratch)
        });
        self.field = rebuild(&self.field, axis, space, values);
        match axis {
            Axis::X => self.x_space = None,
            Axis::Y => self.y_space = None,
        }
        Ok(self)
    }

    /// Inverts every axis held as frequencies.
    pub fn into_spatial(self) -> Field2D {
        let mut s = self;
        for axis in [Axis::X, Axis::Y] {
            if s.is_frequency(axis) {
                s = s.inverse_axis(axis).expect("axis checked to be in frequency domain");
            }
        }
        s.field
    }
}

fn max_line_boundary_ratio(f: &Field2D, axis: Axis) -> f64 {
    let peak = f.max_abs();
    if peak == 0.0 {
        return 0.0;
    }
    let n = f.grid(axis).count();
    let mut edge: f64 = 0.0;
    for k in 0..f.line_count(axis) {
        let (first, last) = match axis {
            Axis::X => (f.value(0, k), f.value(n - 1, k)),
            Axis::Y => (f.value(k, 0), f.value(k, n - 1)),
        };
        edge = edge.max(first.norm()).max(last.norm());
    }
    edge / peak
}

/// Applies `op` to every line of `f` along `axis`, returning row-major values.
fn transform_lines<F>(f: &Field2D, axis: Axis, op: F) -> Vec<Complex64>
where
    F: Fn(&mut [Complex64], &mut Vec<Complex64>) + Sync,
{
    let (nx, ny) = (f.nx(), f.ny());
    match axis {
        Axis::X => {
            let mut values = f.values().to_vec();
            values.par_chunks_mut(nx).for_each_init(Vec::new, |scratch, row| op(row, scratch));
            values
        }
        Axis::Y => {
            let mut cols = transpose(f.values(), nx, ny);
            cols.par_chunks_mut(ny).for_each_init(Vec::new, |scratch, col| op(col, scratch));
            transpose(&cols, ny, nx)
        }
    }
}

/// Transposes a row-major `rows x cols` block (`cols` fast) to `cols x rows`.
fn transpose(values: &[Complex64], cols: usize, rows: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
    out.par_chunks_mut(rows).enumerate().for_each(|(c, chunk)| {
        for (r, slot) in chunk.iter_mut().enumerate() {
            *slot = values[r * cols + c];
        }
    });
    out
}

fn rebuild(f: &Field2D, axis: Axis, grid: UniformGrid1D, values: Vec<Complex64>) -> Field2D {
    let (xg, yg) = match axis {
        Axis::X => (grid, *f.ygrid()),
        Axis::Y => (*f.xgrid(), grid),
    };
    Field2D::new(xg, yg, values).expect("transform of finite data is finite")
}

/// Partial transform along one axis.
pub fn ft_axis(f: &Field2D, axis: Axis) -> Spectrum2D {
    Spectrum2D::spatial(f.clone())
        .forward_axis(axis)
        .expect("spatial field has no frequency axes")
}

pub fn ft2(f: &Field2D) -> Spectrum2D {
    ft_axis(f, Axis::X)
        .forward_axis(Axis::Y)
        .expect("y axis is spatial after an x transform")
}

pub fn ift2(s: &Spectrum2D) -> Field2D {
    s.clone().into_spatial()
}

/// Spectral partial derivative `∂f/∂axis` (multiplier `i ξ`).
pub fn partial_derivative(f: &Field2D, axis: Axis) -> Field2D {
    let s = ft_axis(f, axis);
    let freq = *s.field.grid(axis);
    let (nx, ny) = (s.field.nx(), s.field.ny());
    let mut values = s.field.values().to_vec();
    for j in 0..ny {
        for i in 0..nx {
            let xi = match axis {
                Axis::X => freq.point(i),
                Axis::Y => freq.point(j),
            };
            values[j * nx + i] *= Complex64::new(0.0, xi);
        }
    }
    let field = Field2D::new(*s.field.xgrid(), *s.field.ygrid(), values)
        .expect("finite spectrum times finite multiplier");
    Spectrum2D { field, ..s }.into_spatial()
}
