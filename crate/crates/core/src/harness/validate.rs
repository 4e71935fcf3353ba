//! Cross-validation of the semi-analytic slice against the full 2-D spectral path.

use std::f64::consts::PI;

use crate::bump::{CounterexampleFamily, FamilyParams};
use crate::error::{param, Result};
use crate::fourier::ft1;
use crate::grid::UniformGrid1D;
use crate::operator::{apply_multiplier, MultiplierSymbol, SemiAnalytic, CONV_HALF_WIDTH};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationConfig {
    pub jmin: u32,
    pub jmax: u32,
    /// x samples on `[-length/2, length/2)`.
    pub nx: usize,
    /// y samples; the y step is `2^{-j} / 32.5`, so the support ends of
    /// `χ₁⁽ʲ⁾` fall on a half-step and a grid row sits on `y = 0`.
    pub ny: usize,
    pub length: f64,
    pub tol: f64,
    pub a: f64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            jmin: 3,
            jmax: 7,
            nx: 4096,
            ny: 1024,
            length: 16.0,
            tol: 0.02,
            a: 4.0,
        }
    }
}

const Y_STEPS_PER_SUPPORT_START: f64 = 32.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathRow {
    pub j: u32,
    /// Relative L² discrepancy of `|F₁(R₁₂ f_j)(·, 0)|` on the window.
    pub rel_err: f64,
    /// Frequency samples that fell inside the window.
    pub points: usize,
    pub passed: bool,
}

fn check(cfg: &ValidationConfig) -> Result<()> {
    if cfg.jmin < 2 {
        return param(format!("jmin must be at least 2, got {}", cfg.jmin));
    }
    if !(cfg.length > 0.0 && cfg.tol > 0.0) {
        return param("length and tolerance must be positive");
    }
    if cfg.nx < 16 || cfg.ny < 256 {
        return param(format!(
            "grid {}x{} too small: need nx ≥ 16 and ny ≥ 256 so that supp χ₁ fits",
            cfg.nx, cfg.ny
        ));
    }
    let nyquist = PI * cfg.nx as f64 / cfg.length;
    let top = 2f64.powi(cfg.jmax as i32) + cfg.a + CONV_HALF_WIDTH;
    if top > nyquist {
        return param(format!(
            "x grid resolves |ξ| ≤ {nyquist:.1} but j = {} needs {top:.1}; raise nx",
            cfg.jmax
        ));
    }
    if 2.0 * PI / cfg.length > cfg.a - 2.0 {
        return param("frequency spacing exceeds the window width; raise length");
    }
    Ok(())
}

pub fn run_path_validation(cfg: &ValidationConfig) -> Result<Vec<PathRow>> {
    if cfg.jmin > cfg.jmax {
        return Ok(Vec::new());
    }
    check(cfg)?;
    let params = FamilyParams {
        j0: 2,
        nmax: cfg.jmax.max(3),
        a: cfg.a,
    };
    let family = CounterexampleFamily::new(params)?;
    let semi = SemiAnalytic::new(family.clone());
    let xg = UniformGrid1D::centered(cfg.length, cfg.nx)?;
    let r12 = MultiplierSymbol::riesz12();
    (cfg.jmin..=cfg.jmax)
        .map(|j| {
            let dy = 2f64.powi(-(j as i32)) / Y_STEPS_PER_SUPPORT_START;
            let mid = cfg.ny / 2;
            let yg = UniformGrid1D::new(-(mid as f64) * dy, dy, cfg.ny)?;
            let f = family.sample_f_j(j, xg, yg)?;
            let tf = apply_multiplier(&f, &r12)?;
            let spec = ft1(&tf.row(mid));
            let (lo, hi) = semi.window(j);
            let (mut num, mut den, mut points) = (0.0, 0.0, 0);
            for (k, xi) in spec.freq().points().enumerate() {
                if xi >= lo && xi <= hi {
                    let h = semi.semi_h(j, xi)?;
                    num += (spec.values()[k].norm() - h).powi(2);
                    den += h * h;
                    points += 1;
                }
            }
            let rel_err = (num / den).sqrt();
            Ok(PathRow {
                j,
                rel_err,
                points,
                passed: rel_err <= cfg.tol,
            })
        })
        .collect()
}
