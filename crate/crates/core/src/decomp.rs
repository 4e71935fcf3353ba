//! Dyadic Calderón–Zygmund decomposition of the x-majorant `h(x) = ‖f(x,·)‖_{L^∞_y}`.
//!
//! Everything is done in index space. Sample `i` owns the cell
//! `[x_i, x_i + step)`, so intervals are half-open, a grid point belongs to
//! exactly one leaf and interval integrals are left-endpoint sums
//! `Σ h_i · step`. Cells outside the grid carry `h = 0`.
//!
//! Interval sums come from a dyadic sum tree in which every node is the
//! floating-point sum of its two children. Because the data are
//! non-negative, a child sum never exceeds its parent's, and since lengths
//! differ by exact powers of two the bound `avg(child) ≤ 2 avg(parent)`
//! holds bit-for-bit, not just up to rounding.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::grid::{Field1D, Field2D, UniformGrid1D};
use crate::norms::distribution;
use crate::operator::{apply_multiplier, MultiplierSymbol};

/// A half-open interval `[a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn center(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a <= x && x < self.b
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.a <= other.a && other.b <= self.b
    }
}

/// A dyadic descendant of the decomposition root: `cells` grid cells
/// starting at cell `first_cell` (which may be negative or past the grid).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadicInterval {
    pub interval: Interval,
    pub depth: u32,
    pub first_cell: i64,
    pub cells: u64,
}

impl DyadicInterval {
    fn new(grid: &UniformGrid1D, first_cell: i64, cells: u64, depth: u32) -> Self {
        let a = grid.start() + first_cell as f64 * grid.step();
        let b = grid.start() + (first_cell + cells as i64) as f64 * grid.step();
        Self {
            interval: Interval { a, b },
            depth,
            first_cell,
            cells,
        }
    }

    pub fn a(&self) -> f64 {
        self.interval.a
    }

    pub fn b(&self) -> f64 {
        self.interval.b
    }

    pub fn center(&self) -> f64 {
        self.interval.center()
    }

    pub fn length(&self) -> f64 {
        self.interval.length()
    }

    fn end_cell(&self) -> i64 {
        self.first_cell + self.cells as i64
    }

    /// Grid indices of the cells of this interval that lie on a grid of `n` points.
    fn grid_cells(&self, n: usize) -> std::ops::Range<usize> {
        let lo = self.first_cell.clamp(0, n as i64) as usize;
        let hi = self.end_cell().clamp(0, n as i64) as usize;
        lo..hi
    }
}

/// `Q*`: same center, twice the length.
pub fn double_interval(q: &Interval) -> Interval {
    let (c, l) = (q.center(), q.length());
    Interval { a: c - l, b: c + l }
}

/// `h(x_i) = max_j |f(x_i, y_j)|`.
pub fn majorant(f: &Field2D) -> Field1D {
    let nx = f.nx();
    let mut h = vec![0.0f64; nx];
    for row in f.values().chunks(nx) {
        for (m, v) in h.iter_mut().zip(row) {
            *m = m.max(v.norm());
        }
    }
    Field1D::from_real(*f.xgrid(), &h).expect("magnitudes of finite samples are finite")
}

#[derive(Debug, Clone, PartialEq)]
pub struct CZDecomposition {
    pub alpha: f64,
    pub root: DyadicInterval,
    /// Selected intervals `𝓑`, ordered left to right.
    pub intervals: Vec<DyadicInterval>,
    /// `(1/|Q|) ∫_Q h` for each selected interval.
    pub averages: Vec<f64>,
    /// `g̃ = h` off `∪Q`, zero on it.
    pub good: Field1D,
    /// `b̃ = h` on `∪Q`, zero off it.
    pub bad: Field1D,
}

impl CZDecomposition {
    pub fn grid(&self) -> &UniformGrid1D {
        self.good.grid()
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(DyadicInterval::length).sum()
    }

    /// Whether grid sample `i` lies in some selected interval.
    pub fn covers(&self, i: usize) -> bool {
        let i = i as i64;
        self.intervals.iter().any(|q| q.first_cell <= i && i < q.end_cell())
    }
}

/// `h` is extended by zero off the grid, so doubling always terminates once
/// the root is longer than `‖h‖₁ / α`; roots beyond this many cells are
/// refused as a sign of a level far below the scale of `h`.
const MAX_ROOT_CELLS: u64 = 1 << 40;

/// Largest padded lift, in samples.
const MAX_LIFT_SAMPLES: usize = 1 << 28;

/// Dyadic sum tree over `[root_lo, root_lo + 2^levels)`; only nodes that
/// meet the grid are stored.
struct SumTree {
    root_lo: i64,
    /// `levels[k] = (first node index, node sums)` for nodes of `2^k` cells.
    levels: Vec<(i64, Vec<f64>)>,
}

impl SumTree {
    fn new(cells: &[f64], root_lo: i64, height: u32) -> Self {
        let n = cells.len() as i64;
        // level-0 node m covers cell root_lo + m
        let mut levels = vec![(-root_lo, cells.to_vec())];
        for _ in 0..height {
            let (first, vals) = levels.last().expect("level 0 exists");
            let get = |m: i64| -> f64 {
                let k = m - first;
                if k >= 0 && (k as usize) < vals.len() {
                    vals[k as usize]
                } else {
                    0.0
                }
            };
            let last = first + vals.len() as i64 - 1;
            let (nf, nl) = (first.div_euclid(2), last.div_euclid(2));
            let next: Vec<f64> = (nf..=nl).map(|m| get(2 * m) + get(2 * m + 1)).collect();
            levels.push((nf, next));
        }
        debug_assert!(n == 0 || !levels.is_empty());
        Self { root_lo, levels }
    }

    /// Sum over the node of `2^level` cells starting at cell `lo`.
    fn sum(&self, lo: i64, level: u32) -> f64 {
        let (first, vals) = &self.levels[level as usize];
        let m = (lo - self.root_lo) >> level;
        let k = m - first;
        if k >= 0 && (k as usize) < vals.len() {
            vals[k as usize]
        } else {
            0.0
        }
    }
}

pub fn cz_decompose(h: &Field1D, alpha: f64) -> Result<CZDecomposition> {
    if !(alpha > 0.0) || alpha.is_infinite() {
        return param(format!("level α must be positive and finite, got {alpha}"));
    }
    if let Some(k) = h.values().iter().position(|v| v.im != 0.0 || v.re < 0.0) {
        return param(format!("decomposed function must be real and non-negative (sample {k})"));
    }
    let grid = *h.grid();
    let step = grid.step();
    let n = grid.count();
    let cells: Vec<f64> = h.values().iter().map(|v| v.re * step).collect();

    // Root: smallest power of two ≥ n cells centred on the span, doubled
    // about the same centre until its average drops to α.
    let mut height = n.next_power_of_two().trailing_zeros();
    let center = (n / 2) as i64;
    let (root_lo, tree) = loop {
        let root_lo = center - (1i64 << (height - 1));
        let tree = SumTree::new(&cells, root_lo, height);
        let len = 1u64 << height;
        if tree.sum(root_lo, height) / (len as f64 * step) <= alpha {
            break (root_lo, tree);
        }
        if len >= MAX_ROOT_CELLS {
            return Err(Error::Decomposition(format!(
                "average of h over {len} cells still exceeds α = {alpha}; h does not decay on this grid, use a larger domain or a larger α"
            )));
        }
        height += 1;
    };
    let root = DyadicInterval::new(&grid, root_lo, 1 << height, 0);

    let mut intervals = Vec::new();
    let mut averages = Vec::new();
    // explicit DFS stack, right child pushed first so output is left to right
    let mut stack = vec![(root_lo, height)];
    while let Some((lo, level)) = stack.pop() {
        if level == 0 {
            continue;
        }
        let child_level = level - 1;
        let half = 1i64 << child_level;
        for child_lo in [lo + half, lo] {
            let hi = child_lo + half;
            if hi <= 0 || child_lo >= n as i64 {
                continue;
            }
            let avg = tree.sum(child_lo, child_level) / (half as f64 * step);
            if avg > alpha {
                let depth = height - child_level;
                intervals.push((DyadicInterval::new(&grid, child_lo, half as u64, depth), avg));
            } else {
                stack.push((child_lo, child_level));
            }
        }
    }
    intervals.sort_by_key(|(q, _)| q.first_cell);
    let (intervals, averages_sorted): (Vec<_>, Vec<_>) = intervals.into_iter().unzip();
    averages.extend(averages_sorted);

    let mut covered = vec![false; n];
    for q in &intervals {
        for i in q.grid_cells(n) {
            covered[i] = true;
        }
    }
    let zero = Complex64::new(0.0, 0.0);
    let good: Vec<Complex64> = h.values().iter().zip(&covered).map(|(&v, &c)| if c { zero } else { v }).collect();
    let bad: Vec<Complex64> = h.values().iter().zip(&covered).map(|(&v, &c)| if c { v } else { zero }).collect();
    Ok(CZDecomposition {
        alpha,
        root,
        intervals,
        averages,
        good: Field1D::new(grid, good)?,
        bad: Field1D::new(grid, bad)?,
    })
}

/// `f = f₁ + f₂` with `f₂ = Σ_Q f_Q`, on an x-grid padded with zeros so it
/// covers every selected interval.
#[derive(Debug, Clone, PartialEq)]
pub struct GoodBadLift {
    pub f1: Field2D,
    pub f2: Field2D,
    /// `(Q, f_Q)` with `f_Q` sampled on the cells of `Q` only.
    pub pieces: Vec<(DyadicInterval, Field2D)>,
    /// `f` itself on the padded grid.
    pub f: Field2D,
}

/// Mean of `values` by left-endpoint quadrature over `cells` cells, refined
/// once against its own residual.
fn cell_mean(values: &[Complex64], cells: u64) -> Complex64 {
    let n = cells as f64;
    let m = crate::grid::pairwise_sum(values) / n;
    let resid: Vec<Complex64> = values.iter().map(|&v| v - m).collect();
    // cells outside the grid hold 0, contributing -m each
    let outside = (cells as usize - values.len()) as f64;
    m + (crate::grid::pairwise_sum(&resid) - m * outside) / n
}

pub fn lift(f: &Field2D, dec: &CZDecomposition) -> Result<GoodBadLift> {
    if f.xgrid() != dec.grid() {
        return param("decomposition was built on a different x-grid");
    }
    let (nx, ny) = (f.nx(), f.ny());
    let xg = *f.xgrid();
    let pad_lo = dec.intervals.iter().map(|q| q.first_cell).min().unwrap_or(0).min(0);
    let pad_hi = dec.intervals.iter().map(|q| q.end_cell()).max().unwrap_or(0).max(nx as i64);
    let px = (pad_hi - pad_lo) as usize;
    if px.saturating_mul(ny) > MAX_LIFT_SAMPLES {
        return Err(Error::Decomposition(format!(
            "lift would need {px} x {ny} samples to cover the selected intervals"
        )));
    }
    let off = (-pad_lo) as usize;
    let pgrid = if pad_lo == 0 && px == nx {
        xg
    } else {
        UniformGrid1D::new(xg.start() + pad_lo as f64 * xg.step(), xg.step(), px)?
    };
    let zero = Complex64::new(0.0, 0.0);
    let mut padded = vec![zero; px * ny];
    for j in 0..ny {
        padded[j * px + off..j * px + off + nx].copy_from_slice(&f.values()[j * nx..(j + 1) * nx]);
    }

    let mut f1 = padded.clone();
    let mut f2 = vec![zero; px * ny];
    let mut pieces = Vec::with_capacity(dec.intervals.len());
    for q in &dec.intervals {
        let gc = q.grid_cells(nx);
        let qlo = (q.first_cell - pad_lo) as usize;
        let qn = q.cells as usize;
        let mut piece = vec![zero; qn * ny];
        for j in 0..ny {
            let row = &f.values()[j * nx..(j + 1) * nx];
            let mean = cell_mean(&row[gc.clone()], q.cells);
            for k in 0..qn {
                let idx = j * px + qlo + k;
                let v = padded[idx];
                f1[idx] = mean;
                f2[idx] = v - mean;
                piece[j * qn + k] = v - mean;
            }
        }
        let qgrid = UniformGrid1D::new(q.a(), xg.step(), qn.max(2))?;
        let piece = if qn >= 2 {
            Field2D::new(qgrid, *f.ygrid(), piece)?
        } else {
            // a one-cell piece is identically zero; store it on a two-point grid
            Field2D::zeros(qgrid, *f.ygrid())
        };
        pieces.push((*q, piece));
    }
    let yg = *f.ygrid();
    Ok(GoodBadLift {
        f1: Field2D::new(pgrid, yg, f1)?,
        f2: Field2D::new(pgrid, yg, f2)?,
        pieces,
        f: Field2D::new(pgrid, yg, padded)?,
    })
}

/// `α d_{Tf(·,y)}(α) / ‖‖f‖_{L^∞_y}‖_{L¹_x}` swept over `α` and every sampled `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Weak11Report {
    pub alphas: Vec<f64>,
    /// Max over `y` of the ratio, per `α`.
    pub ratios: Vec<f64>,
    /// `‖‖f‖_{L^∞_y}‖_{L¹_x}`.
    pub f_norm: f64,
    /// `max` of `ratios`.
    pub d_emp: f64,
}

pub fn weak11_witness(f: &Field2D, t: &MultiplierSymbol, alphas: &[f64]) -> Result<Weak11Report> {
    if let Some(a) = alphas.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
        return param(format!("levels must be positive, got {a}"));
    }
    let f_norm = crate::norms::lp_norm(&majorant(f), crate::norms::Exponent::Finite(1.0))?;
    let tf = apply_multiplier(f, t)?;
    let rows: Vec<Field1D> = (0..tf.ny()).map(|j| tf.row(j)).collect();
    let ratios: Vec<f64> = alphas
        .par_iter()
        .map(|&a| {
            if f_norm == 0.0 {
                return 0.0;
            }
            rows.iter()
                .map(|r| a * distribution(r, a).expect("α > 0") / f_norm)
                .fold(0.0, f64::max)
        })
        .collect();
    let d_emp = ratios.iter().copied().fold(0.0, f64::max);
    Ok(Weak11Report {
        alphas: alphas.to_vec(),
        ratios,
        f_norm,
        d_emp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn step_fn(grid: UniformGrid1D, f: impl Fn(f64) -> f64) -> Field1D {
        Field1D::from_real_fn(grid, f).unwrap()
    }

    /// Independent oracle: left-endpoint integral of `h` over `[a, b)`.
    fn oracle_integral(h: &Field1D, q: &DyadicInterval) -> f64 {
        let g = h.grid();
        (0..g.count())
            .filter(|&i| q.first_cell <= i as i64 && (i as i64) < q.first_cell + q.cells as i64)
            .map(|i| h.values()[i].re * g.step())
            .sum()
    }

    #[test]
    fn hand_traced_example() {
        let g = UniformGrid1D::new(0.0, 0.25, 16).unwrap();
        let h = step_fn(g, |x| if x < 1.0 { 1.0 } else { 0.0 });
        let d = cz_decompose(&h, 0.3).unwrap();
        assert_eq!((d.root.a(), d.root.b()), (0.0, 4.0));
        assert_eq!(d.intervals.len(), 1);
        assert_eq!((d.intervals[0].a(), d.intervals[0].b()), (0.0, 2.0));
        assert_eq!(d.averages[0], 0.5);
        assert!(d.total_length() <= 1.0 / 0.3);
    }

    #[test]
    fn large_alpha_selects_nothing() {
        let g = UniformGrid1D::new(-3.0, 0.1, 61).unwrap();
        let h = step_fn(g, |x| (-x * x).exp());
        let d = cz_decompose(&h, 1.0).unwrap();
        assert!(d.intervals.is_empty());
        assert_eq!(d.good, h);
        assert_eq!(d.bad.max_abs(), 0.0);
    }

    #[test]
    fn non_decaying_input_is_refused() {
        let g = UniformGrid1D::new(0.0, 1.0, 8).unwrap();
        let h = step_fn(g, |_| 1.0);
        assert!(matches!(cz_decompose(&h, 1e-13), Err(Error::Decomposition(_))));
        // zero extension: a level below the grid average still decomposes
        let d = cz_decompose(&h, 0.001).unwrap();
        assert!((0..8).all(|i| d.covers(i)));
        assert!(d.averages.iter().all(|&m| m > 0.001 && m <= 0.002));
        assert!(cz_decompose(&h, 0.0).is_err());
        let neg = step_fn(g, |x| x - 3.0);
        assert!(cz_decompose(&neg, 1.0).is_err());
    }

    #[test]
    fn root_expansion_for_non_power_of_two_grid() {
        let g = UniformGrid1D::new(0.0, 1.0, 5).unwrap();
        let h = step_fn(g, |x| if x == 2.0 { 10.0 } else { 0.0 });
        let d = cz_decompose(&h, 1.0).unwrap();
        assert!(d.root.length() * 1.0 >= 10.0);
        assert!((d.root.center() - 2.0).abs() <= d.root.length() / 2.0);
        for (q, avg) in d.intervals.iter().zip(&d.averages) {
            assert!(*avg > 1.0 && *avg <= 2.0, "{q:?} {avg}");
        }
        assert!(d.covers(2));
    }

    #[test]
    fn doubled_interval() {
        let q = Interval { a: 0.0, b: 2.0 };
        let s = double_interval(&q);
        assert_eq!((s.a, s.b), (-1.0, 3.0));
        assert_eq!(s.length(), 2.0 * q.length());
        assert_eq!(s.center(), q.center());
        assert!(s.contains_interval(&q));
    }

    #[test]
    fn majorant_examples() {
        let gx = UniformGrid1D::new(-2.0, 0.1, 41).unwrap();
        let gy = UniformGrid1D::new(-1.0, 0.25, 9).unwrap();
        let a = Field1D::from_real_fn(gx, |x| x.sin()).unwrap();
        let b = Field1D::from_real_fn(gy, |y| 1.0 + y * y).unwrap();
        let h = majorant(&Field2D::separable(&a, &b));
        for (i, v) in h.values().iter().enumerate() {
            assert!((v.re - a.values()[i].norm() * 2.0).abs() < 1e-15);
        }
        let odd = Field2D::from_real_fn(gx, gy, |x, y| y * (-x * x).exp()).unwrap();
        let h = majorant(&odd);
        for (i, x) in gx.points().enumerate() {
            let best = gy.points().filter(|&y| y > 0.0).map(|y| y * (-x * x).exp()).fold(0.0, f64::max);
            assert_eq!(h.values()[i].re, best);
        }
    }

    #[test]
    fn empty_decomposition_lifts_trivially() {
        let g = UniformGrid1D::new(-3.0, 0.1, 61).unwrap();
        let f = Field2D::from_real_fn(g, g, |x, y| (-x * x - y * y).exp()).unwrap();
        let d = cz_decompose(&majorant(&f), 10.0).unwrap();
        let l = lift(&f, &d).unwrap();
        assert_eq!(l.f1, f);
        assert_eq!(l.f2.max_abs(), 0.0);
    }

    #[test]
    fn odd_profile_under_one_interval() {
        // supp f = [0, 4) inside the root [0, 8); s is odd about x_Q = 2 in
        // the cell sense (cell k pairs with cell 31 - k)
        let gx = UniformGrid1D::new(0.0, 0.125, 64).unwrap();
        let gy = UniformGrid1D::new(0.0, 1.0, 3).unwrap();
        let s = |x: f64| {
            let k = (x / 0.125).round() as i32;
            match k {
                0..=15 => (k + 1) as f64,
                16..=31 => -((32 - k) as f64),
                _ => 0.0,
            }
        };
        let f = Field2D::from_real_fn(gx, gy, |x, _| s(x)).unwrap();
        let h = majorant(&f);
        let total: f64 = h.values().iter().map(|v| v.re * 0.125).sum();
        let d = cz_decompose(&h, total / 4.0 * 0.99).unwrap();
        assert_eq!(d.intervals.len(), 1);
        assert_eq!((d.intervals[0].a(), d.intervals[0].b()), (0.0, 4.0));
        let l = lift(&f, &d).unwrap();
        assert_eq!(l.f1.max_abs(), 0.0);
        assert_eq!(l.f2, f);
    }

    #[test]
    fn lift_rejects_foreign_grid() {
        let g = UniformGrid1D::new(-3.0, 0.1, 61).unwrap();
        let f = Field2D::from_real_fn(g, g, |x, y| (-x * x - y * y).exp()).unwrap();
        let d = cz_decompose(&majorant(&f), 0.5).unwrap();
        let other = Field2D::zeros(UniformGrid1D::new(-3.0, 0.2, 31).unwrap(), g);
        assert!(lift(&other, &d).is_err());
    }

    #[test]
    fn weak11_zero_field() {
        let g = UniformGrid1D::centered(8.0, 32).unwrap();
        let r = weak11_witness(&Field2D::zeros(g, g), &MultiplierSymbol::riesz12(), &[0.1, 1.0]).unwrap();
        assert_eq!(r.d_emp, 0.0);
        assert!(r.ratios.iter().all(|&v| v == 0.0));
    }

    fn random_h() -> impl Strategy<Value = (Field1D, f64)> {
        (proptest::collection::vec(0.0f64..1.0, 1..300), 0.01f64..1.0, 0.01f64..3.0, -5.0f64..5.0).prop_map(
            |(mut v, step, alpha, start)| {
                if v.len() < 2 {
                    v.push(0.0);
                }
                // sharpen so there is something to select
                let v: Vec<f64> = v.iter().map(|x| x.powi(6) * 5.0).collect();
                let g = UniformGrid1D::new(start, step, v.len()).unwrap();
                (Field1D::from_real(g, &v).unwrap(), alpha)
            },
        )
    }

    proptest! {
        #[test]
        fn decomposition_invariants((h, alpha) in random_h()) {
            let d = cz_decompose(&h, alpha).unwrap();
            let step = h.grid().step();
            let l1: f64 = h.values().iter().map(|v| v.re * step).sum();
            prop_assert!(d.total_length() <= l1 / alpha * (1.0 + 1e-9));
            for (q, avg) in d.intervals.iter().zip(&d.averages) {
                prop_assert!(*avg > alpha && *avg <= 2.0 * alpha);
                let oracle = oracle_integral(&h, q) / q.length();
                prop_assert!((oracle - avg).abs() <= 1e-12 * avg);
            }
            for w in d.intervals.windows(2) {
                prop_assert!(w[0].b() <= w[1].a());
            }
            for (i, v) in h.values().iter().enumerate() {
                if !d.covers(i) {
                    prop_assert!(v.re <= alpha * (1.0 + 1e-9));
                    prop_assert_eq!(d.good.values()[i], *v);
                } else {
                    prop_assert_eq!(d.bad.values()[i], *v);
                }
                prop_assert_eq!(d.good.values()[i] + d.bad.values()[i], *v);
            }
        }

        #[test]
        fn lift_invariants(v in proptest::collection::vec(-1.0f64..1.0, 64 * 4), alpha in 0.05f64..0.6) {
            let gx = UniformGrid1D::new(-2.0, 0.0625, 64).unwrap();
            let gy = UniformGrid1D::new(0.0, 0.5, 4).unwrap();
            let vals: Vec<Complex64> = v.iter().map(|x| Complex64::new(x.powi(3), 0.0)).collect();
            let f = Field2D::new(gx, gy, vals).unwrap();
            let d = cz_decompose(&majorant(&f), alpha).unwrap();
            let l = lift(&f, &d).unwrap();
            for ((a, b), c) in l.f1.values().iter().zip(l.f2.values()).zip(l.f.values()) {
                prop_assert!((a + b - c).norm() <= 1e-15 * (c.norm() + a.norm()));
            }
            prop_assert!(majorant(&l.f1).max_abs() <= 2.0 * alpha * (1.0 + 1e-12));
            for (_, fq) in &l.pieces {
                for j in 0..fq.ny() {
                    let row = fq.row(j);
                    let s: Complex64 = row.values().iter().sum();
                    let a: f64 = row.values().iter().map(|z| z.norm()).sum();
                    prop_assert!(s.norm() <= 1e-10 * a.max(f64::MIN_POSITIVE));
                }
            }
            let m1: f64 = majorant(&l.f1).values().iter().map(|z| z.re).sum();
            let m: f64 = majorant(&l.f).values().iter().map(|z| z.re).sum();
            prop_assert!(m1 <= m * (1.0 + 1e-9));
        }
    }
}
