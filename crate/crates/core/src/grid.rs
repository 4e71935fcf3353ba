//! Uniform grids, sampled fields and trapezoid quadrature.
//!
//! Two-dimensional fields are stored row-major with `x` as the fast axis:
//! sample `(i, j)` (x-index `i`, y-index `j`) lives at `j * nx + i`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

/// Coordinate axis of a two-dimensional field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::X => Axis::Y,
            Axis::Y => Axis::X,
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            other => param(format!("unknown axis '{other}', expected x or y")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid1D {
    start: f64,
    step: f64,
    count: usize,
}

impl UniformGrid1D {
    pub fn new(start: f64, step: f64, count: usize) -> Result<Self> {
        if !start.is_finite() {
            return param(format!("grid start must be finite, got {start}"));
        }
        if !(step > 0.0 && step.is_finite()) {
            return param(format!("grid step must be positive and finite, got {step}"));
        }
        if count < 2 {
            return param(format!("grid needs at least 2 points, got {count}"));
        }
        Ok(Self { start, step, count })
    }

    /// `count` points spanning the half-open interval `[-length/2, length/2)`.
    pub fn centered(length: f64, count: usize) -> Result<Self> {
        if !(length > 0.0) {
            return param(format!("grid length must be positive, got {length}"));
        }
        Self::new(-0.5 * length, length / count as f64, count)
    }

    #[inline]
    pub fn start(&self) -> f64 {
        self.start
    }

    #[inline]
    pub fn step(&self) -> f64 {
        self.step
    }

    #[inline]
    pub fn count(&self) -> usize {
        self.count
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn end(&self) -> f64 {
        self.point(self.count - 1)
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.point(i))
    }

    /// Index range of grid points lying in the half-open interval `[a, b)`.
    pub fn index_range(&self, a: f64, b: f64) -> std::ops::Range<usize> {
        let lo = self.first_at_or_above(a);
        let hi = self.first_at_or_above(b).max(lo);
        lo..hi
    }

    fn first_at_or_above(&self, v: f64) -> usize {
        let guess = ((v - self.start) / self.step).ceil().clamp(0.0, self.count as f64);
        let mut i = guess as usize;
        while i > 0 && self.point(i - 1) >= v {
            i -= 1;
        }
        while i < self.count && self.point(i) < v {
            i += 1;
        }
        i
    }

    /// Trapezoid weight of point `i`, in units of `step`.
    #[inline]
    pub fn trapezoid_weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.count {
            0.5
        } else {
            1.0
        }
    }
}

/// Pairwise summation; deterministic and accurate to `O(log n)` roundings.
pub fn pairwise_sum<T>(values: &[T]) -> T
where
    T: Copy + Default + std::ops::Add<Output = T>,
{
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        values.iter().fold(T::default(), |acc, &v| acc + v)
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

/// Composite trapezoid rule over samples on a uniform grid.
pub fn trapezoid<T>(grid: &UniformGrid1D, values: &[T]) -> T
where
    T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    debug_assert_eq!(values.len(), grid.count());
    let weighted: Vec<T> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| v * grid.trapezoid_weight(i))
        .collect();
    pairwise_sum(&weighted) * grid.step()
}

fn check_finite(values: &[Complex64]) -> Result<()> {
    match values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        Some(k) => param(format!("field value at flat index {k} is not finite")),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field1D {
    grid: UniformGrid1D,
    values: Vec<Complex64>,
}

impl Field1D {
    pub fn new(grid: UniformGrid1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.count() {
            return param(format!(
                "field has {} values but grid has {} points",
                values.len(),
                grid.count()
            ));
        }
        check_finite(&values)?;
        Ok(Self { grid, values })
    }

    pub fn from_real(grid: UniformGrid1D, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(grid: UniformGrid1D) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.count()],
        }
    }

    /// Samples `f` at every grid point.
    pub fn from_fn<F>(grid: UniformGrid1D, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64,
    {
        let mut values = Vec::with_capacity(grid.count());
        for x in grid.points() {
            let v = f(x);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Sampling {
                    point: format!("x = {x}"),
                });
            }
            values.push(v);
        }
        Ok(Self { grid, values })
    }

    pub fn from_real_fn<F>(grid: UniformGrid1D, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64,
    {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    #[inline]
    pub fn grid(&self) -> &UniformGrid1D {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| v * c).collect(),
        }
    }
}

/// Composite trapezoid integral of a sampled field.
pub fn integrate(f: &Field1D) -> Complex64 {
    trapezoid(f.grid(), f.values())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    xgrid: UniformGrid1D,
    ygrid: UniformGrid1D,
    values: Vec<Complex64>,
}

impl Field2D {
    pub fn new(xgrid: UniformGrid1D, ygrid: UniformGrid1D, values: Vec<Complex64>) -> Result<Self> {
        let expected = xgrid.count() * ygrid.count();
        if values.len() != expected {
            return param(format!(
                "field has {} values but grids need {}x{} = {expected}",
                values.len(),
                xgrid.count(),
                ygrid.count()
            ));
        }
        check_finite(&values)?;
        Ok(Self {
            xgrid,
            ygrid,
            values,
        })
    }

    pub fn zeros(xgrid: UniformGrid1D, ygrid: UniformGrid1D) -> Self {
        Self {
            xgrid,
            ygrid,
            values: vec![Complex64::new(0.0, 0.0); xgrid.count() * ygrid.count()],
        }
    }

    pub fn from_fn<F>(xgrid: UniformGrid1D, ygrid: UniformGrid1D, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Complex64,
    {
        let mut values = Vec::with_capacity(xgrid.count() * ygrid.count());
        for y in ygrid.points() {
            for x in xgrid.points() {
                let v = f(x, y);
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::Sampling {
                        point: format!("(x, y) = ({x}, {y})"),
                    });
                }
                values.push(v);
            }
        }
        Ok(Self {
            xgrid,
            ygrid,
            values,
        })
    }

    pub fn from_real_fn<F>(xgrid: UniformGrid1D, ygrid: UniformGrid1D, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64,
    {
        Self::from_fn(xgrid, ygrid, |x, y| Complex64::new(f(x, y), 0.0))
    }

    /// Outer product `a(x) b(y)`.
    pub fn separable(a: &Field1D, b: &Field1D) -> Self {
        let mut values = Vec::with_capacity(a.values.len() * b.values.len());
        for &bv in &b.values {
            values.extend(a.values.iter().map(|&av| av * bv));
        }
        Self {
            xgrid: a.grid,
            ygrid: b.grid,
            values,
        }
    }

    #[inline]
    pub fn xgrid(&self) -> &UniformGrid1D {
        &self.xgrid
    }

    #[inline]
    pub fn ygrid(&self) -> &UniformGrid1D {
        &self.ygrid
    }

    pub fn grid(&self, axis: Axis) -> &UniformGrid1D {
        match axis {
            Axis::X => &self.xgrid,
            Axis::Y => &self.ygrid,
        }
    }

    #[inline]
    pub fn nx(&self) -> usize {
        self.xgrid.count()
    }

    #[inline]
    pub fn ny(&self) -> usize {
        self.ygrid.count()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx() + i
    }

    /// Sample at x-index `i`, y-index `j`.
    #[inline]
    pub fn value(&self, i: usize, j: usize) -> Complex64 {
        self.values[self.index(i, j)]
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// The line `f(·, y_j)` as a 1-D field over x.
    pub fn row(&self, j: usize) -> Field1D {
        let nx = self.nx();
        Field1D {
            grid: self.xgrid,
            values: self.values[j * nx..(j + 1) * nx].to_vec(),
        }
    }

    /// The line `f(x_i, ·)` as a 1-D field over y.
    pub fn column(&self, i: usize) -> Field1D {
        Field1D {
            grid: self.ygrid,
            values: (0..self.ny()).map(|j| self.value(i, j)).collect(),
        }
    }

    /// Line of the field along `axis` at position `k` of the other axis.
    pub fn line(&self, axis: Axis, k: usize) -> Field1D {
        match axis {
            Axis::X => self.row(k),
            Axis::Y => self.column(k),
        }
    }

    pub fn line_count(&self, axis: Axis) -> usize {
        self.grid(axis.other()).count()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Result<Self> {
        Self::new(self.xgrid, self.ygrid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with<F>(&self, other: &Field2D, f: F) -> Result<Self>
    where
        F: Fn(Complex64, Complex64) -> Complex64,
    {
        if self.xgrid != other.xgrid || self.ygrid != other.ygrid {
            return param("fields live on different grids");
        }
        Self::new(
            self.xgrid,
            self.ygrid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn add(&self, other: &Field2D) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field2D) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            xgrid: self.xgrid,
            ygrid: self.ygrid,
            values: self.values.iter().map(|&v| v * c).collect(),
        }
    }

    /// Discrete L² norm by trapezoid quadrature in both axes.
    pub fn l2_norm(&self) -> f64 {
        let rows: Vec<f64> = (0..self.ny())
            .map(|j| {
                let sq: Vec<f64> = self.row(j).values.iter().map(|v| v.norm_sqr()).collect();
                trapezoid(&self.xgrid, &sq)
            })
            .collect();
        trapezoid(&self.ygrid, &rows).sqrt()
    }
}
