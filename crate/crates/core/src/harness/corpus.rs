use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{param, Result};
use crate::grid::{Field2D, UniformGrid1D};

/// Size of a random test corpus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusSpec {
    pub fields: usize,
    /// Samples per axis on `[-8, 8)`.
    pub n: usize,
    pub seed: u64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            fields: 20,
            n: 256,
            seed: 7,
        }
    }
}

const HALF_WIDTH: f64 = 8.0;

/// Real sums of one to three Gaussian wave packets
/// `a e^{-(x-cx)²/2σx² - (y-cy)²/2σy²} cos(κ·x + φ)`.
///
/// Widths lie in `[0.7, 0.88]`, centres in `[-1.5, 1.5]²` and carrier
/// frequencies in `[-2, 2]²`. On the default 256² grid over `[-8, 8)²` the
/// samples at the boundary are below `1e-11` of the peak and the spectrum
/// beyond `|ξ| = 2π·(n/8)/16` (an eighth of the index range) is below
/// `1e-10` of its peak, so the fields are band-limited for the purposes of
/// the spectral operators.
pub fn wave_packet_corpus(spec: CorpusSpec) -> Result<Vec<Field2D>> {
    if spec.n < 16 {
        return param("corpus grids need at least 16 samples per axis");
    }
    let g = UniformGrid1D::centered(2.0 * HALF_WIDTH, spec.n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..spec.fields)
        .map(|_| {
            let count = rng.gen_range(1..=3);
            let packets: Vec<[f64; 8]> = (0..count)
                .map(|_| {
                    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    [
                        sign * rng.gen_range(0.5..2.0),
                        rng.gen_range(-1.5..1.5),
                        rng.gen_range(-1.5..1.5),
                        rng.gen_range(0.7..0.88),
                        rng.gen_range(0.7..0.88),
                        rng.gen_range(-2.0..2.0),
                        rng.gen_range(-2.0..2.0),
                        rng.gen_range(0.0..2.0 * PI),
                    ]
                })
                .collect();
            Field2D::from_real_fn(g, g, |x, y| {
                packets
                    .iter()
                    .map(|&[a, cx, cy, sx, sy, kx, ky, phi]| {
                        let (dx, dy) = (x - cx, y - cy);
                        a * (-dx * dx / (2.0 * sx * sx) - dy * dy / (2.0 * sy * sy)).exp()
                            * (kx * x + ky * y + phi).cos()
                    })
                    .sum()
            })
        })
        .collect()
}
