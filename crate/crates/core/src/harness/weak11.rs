use rayon::prelude::*;

use super::{wave_packet_corpus, CorpusSpec};
use crate::decomp::weak11_witness;
use crate::error::Result;
use crate::operator::MultiplierSymbol;

/// Empirical weak-(1,1) constant of `R₁₂` for one corpus field.
#[derive(Debug, Clone, PartialEq)]
pub struct Weak11Row {
    pub field: usize,
    /// `max_{α, y} α d_{Tf(·,y)}(α) / ‖‖f‖_{L^∞_y}‖_{L¹_x}`.
    pub d_emp: f64,
    pub f_norm: f64,
    /// Per-level maxima over `y`, aligned with the requested levels.
    pub ratios: Vec<f64>,
}

pub fn run_weak11(spec: CorpusSpec, alphas: &[f64]) -> Result<Vec<Weak11Row>> {
    let corpus = wave_packet_corpus(spec)?;
    let r12 = MultiplierSymbol::riesz12();
    corpus
        .par_iter()
        .enumerate()
        .map(|(field, f)| {
            let rep = weak11_witness(f, &r12, alphas)?;
            Ok(Weak11Row {
                field,
                d_emp: rep.d_emp,
                f_norm: rep.f_norm,
                ratios: rep.ratios,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::parse_sweep;
    use num_complex::Complex64;

    fn spec(fields: usize, n: usize) -> CorpusSpec {
        CorpusSpec { fields, n, seed: 7 }
    }

    #[test]
    fn zero_corpus_gives_empty_table() {
        assert!(run_weak11(spec(0, 64), &[1.0]).unwrap().is_empty());
    }

    #[test]
    fn finite_and_ordered() {
        let alphas = parse_sweep("0.001:10:log:12").unwrap();
        let rows = run_weak11(spec(4, 64), &alphas).unwrap();
        assert_eq!(rows.iter().map(|r| r.field).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        for r in &rows {
            assert!(r.d_emp.is_finite() && r.d_emp > 0.0);
            assert_eq!(r.ratios.len(), alphas.len());
        }
    }

    #[test]
    fn ratio_is_scale_invariant() {
        let f = &wave_packet_corpus(spec(1, 64)).unwrap()[0];
        let f2 = f.scale(Complex64::new(2.0, 0.0));
        let alphas = [0.01, 0.1, 0.5];
        let doubled: Vec<f64> = alphas.iter().map(|a| 2.0 * a).collect();
        let r12 = MultiplierSymbol::riesz12();
        let a = weak11_witness(f, &r12, &alphas).unwrap();
        let b = weak11_witness(&f2, &r12, &doubled).unwrap();
        for (x, y) in a.ratios.iter().zip(&b.ratios) {
            assert!((x - y).abs() <= 1e-9 * x.abs().max(1e-300), "{x} vs {y}");
        }
    }

    #[test]
    fn stable_under_grid_refinement() {
        let alphas = [0.05, 0.2];
        let coarse = run_weak11(spec(1, 128), &alphas).unwrap();
        let fine = run_weak11(spec(1, 256), &alphas).unwrap();
        let (c, f) = (coarse[0].d_emp, fine[0].d_emp);
        assert!((c - f).abs() <= 0.05 * f, "{c} vs {f}");
    }
}
