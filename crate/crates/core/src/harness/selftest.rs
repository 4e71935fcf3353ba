use num_complex::Complex64;

use super::{
    check_counterexample, run_counterexample, run_interpolation_check, run_path_validation, run_weak11, to_csv,
    CexConfig, CheckResult, CorpusSpec, InterpConfig, ValidationConfig,
};
use crate::bump::FamilyParams;
use crate::decomp::{cz_decompose, lift, majorant};
use crate::fourier::{ft1, partial_derivative};
use crate::grid::{Axis, Field1D, Field2D, UniformGrid1D};
use crate::norms::{interpolation_constant, layer_cake, lp_norm, weak_norm, Exponent};
use crate::operator::{apply_multiplier, verify_kernel_conditions, CZKernelSpec, MultiplierSymbol};

fn check_or_error(name: &str, r: crate::Result<CheckResult>) -> CheckResult {
    r.unwrap_or_else(|e| CheckResult::new(name, false, format!("error: {e}")))
}

fn gaussian_transform() -> crate::Result<CheckResult> {
    let g = UniformGrid1D::centered(16.0, 4096)?;
    let f = Field1D::from_real_fn(g, |x| (-x * x).exp())?;
    let s = ft1(&f);
    let err = s
        .freq()
        .points()
        .zip(s.values())
        .map(|(xi, v)| (v - Complex64::new((-xi * xi / 4.0).exp() / 2f64.sqrt(), 0.0)).norm())
        .fold(0.0, f64::max);
    Ok(CheckResult::new("gaussian transform", err <= 1e-8, format!("max abs err {err:.3e}")))
}

fn riesz_identity() -> crate::Result<CheckResult> {
    let g = UniformGrid1D::centered(16.0, 256)?;
    let u = Field2D::from_real_fn(g, g, |x, y| (-x * x - y * y).exp())?;
    let dxx = partial_derivative(&partial_derivative(&u, Axis::X), Axis::X);
    let dyy = partial_derivative(&partial_derivative(&u, Axis::Y), Axis::Y);
    let dxy = partial_derivative(&partial_derivative(&u, Axis::X), Axis::Y);
    let lhs = apply_multiplier(&dxx.add(&dyy)?, &MultiplierSymbol::riesz12())?;
    let err = lhs.sub(&dxy)?.l2_norm() / dxy.l2_norm();
    Ok(CheckResult::new("R12 of Laplacian", err <= 1e-6, format!("rel err {err:.3e}")))
}

fn path() -> crate::Result<CheckResult> {
    let cfg = ValidationConfig {
        jmin: 3,
        jmax: 3,
        nx: 1024,
        ..Default::default()
    };
    let row = run_path_validation(&cfg)?[0];
    Ok(CheckResult::new("path equivalence j=3", row.passed, format!("rel err {:.3e}", row.rel_err)))
}

fn counterexample() -> crate::Result<Vec<CheckResult>> {
    let cfg = CexConfig {
        family: FamilyParams { j0: 13, nmax: 17, a: 4.0 },
        ..Default::default()
    };
    let run = run_counterexample(&cfg)?;
    let mut out = check_counterexample(&run);
    let again = run_counterexample(&cfg)?;
    out.push(CheckResult::new(
        "csv determinism",
        to_csv(&run.rows) == to_csv(&again.rows),
        "two runs compared byte for byte",
    ));
    Ok(out)
}

fn cz() -> crate::Result<CheckResult> {
    let g = UniformGrid1D::centered(16.0, 128)?;
    let f = Field2D::from_real_fn(g, g, |x, y| (-(x - 1.0).powi(2) - y * y).exp() * (1.0 + (3.0 * x).cos()) / 2.0)?;
    let h = majorant(&f);
    let mut ok = true;
    for alpha in [0.05, 0.1, 0.3] {
        let d = cz_decompose(&h, alpha)?;
        ok &= d.averages.iter().all(|&m| m > alpha && m <= 2.0 * alpha);
        let l = lift(&f, &d)?;
        ok &= l
            .f1
            .values()
            .iter()
            .zip(l.f2.values())
            .zip(l.f.values())
            .all(|((a, b), c)| (a + b - c).norm() <= 1e-15 * (c.norm() + a.norm()));
    }
    Ok(CheckResult::new("cz decomposition", ok, "averages in (α, 2α], lift sums back to f"))
}

fn norms() -> crate::Result<CheckResult> {
    let g = UniformGrid1D::new(-2.0, 1.0 / 512.0, 2049)?;
    let tent = Field1D::from_real_fn(g, |x| (1.0 - x.abs()).max(0.0))?;
    let w = weak_norm(&tent, 1.0)?;
    let direct = lp_norm(&tent, Exponent::Finite(2.0))?.powi(2);
    let lc = layer_cake(&tent, 2.0)?;
    let c = interpolation_constant(1.0, 3.0, 2.0, 1.0, 1.0)?;
    let ok = (w - 0.5).abs() <= g.step() && ((lc - direct) / direct).abs() <= 1e-6 && c == 20.0;
    Ok(CheckResult::new(
        "norms",
        ok,
        format!("tent weak-L1 {w:.6}, layer cake {lc:.9} vs {direct:.9}, C(1,3,2,1,1) = {c}"),
    ))
}

fn kernel() -> crate::Result<CheckResult> {
    let rep = verify_kernel_conditions(&CZKernelSpec::riesz12(), &[0.5, 1.0, 2.0, 4.0, 8.0], &[(0.5, 0.0), (0.0, 0.5)])?;
    let cancel = rep.annuli.iter().map(|a| a.value.abs()).fold(0.0, f64::max);
    let witness = (rep.size_witness - 1.0 / (4.0 * std::f64::consts::PI)).abs();
    let ok = cancel <= 1e-10 && witness <= 1e-6 && rep.hormander.iter().all(|h| h.last_change < 0.01);
    Ok(CheckResult::new(
        "kernel conditions",
        ok,
        format!("annulus max {cancel:.2e}, size witness err {witness:.2e}"),
    ))
}

/// Quick versions of every invariant family, one [`CheckResult`] each.
pub fn selftest() -> Vec<CheckResult> {
    let mut out = vec![
        check_or_error("gaussian transform", gaussian_transform()),
        check_or_error("R12 of Laplacian", riesz_identity()),
        check_or_error("path equivalence j=3", path()),
    ];
    match counterexample() {
        Ok(v) => out.extend(v),
        Err(e) => out.push(CheckResult::new("counterexample", false, format!("error: {e}"))),
    }
    out.push(check_or_error("cz decomposition", cz()));
    out.push(check_or_error("norms", norms()));
    let interp = InterpConfig {
        corpus: CorpusSpec { fields: 4, n: 128, seed: 7 },
        levels: 8,
        ..Default::default()
    };
    match run_interpolation_check(&interp) {
        Ok(r) => out.extend(r.checks()),
        Err(e) => out.push(CheckResult::new("interpolation", false, format!("error: {e}"))),
    }
    out.push(check_or_error(
        "weak-(1,1) sweep",
        run_weak11(CorpusSpec { fields: 4, n: 128, seed: 7 }, &[0.01, 0.1, 1.0]).map(|rows| {
            let finite = rows.iter().all(|r| r.d_emp.is_finite());
            CheckResult::new("weak-(1,1) sweep", finite, format!("{} fields, all D_emp finite", rows.len()))
        }),
    ));
    out.push(check_or_error("kernel conditions", kernel()));
    out
}

#[cfg(test)]
mod tests {
    #[test]
    fn selftest_is_green() {
        for c in super::selftest() {
            assert!(c.passed, "{c}");
        }
    }
}
