//! Deterministic seeded field ensembles for the estimate stress tests.
//!
//! Random draws are band-limited to the lower half of the Nyquist range so
//! pointwise products of up to six factors stay below the aliasing
//! threshold of the grid quadrature. Each (trial, slot) pair derives its
//! own stream, so parallel execution cannot change the draws.

use crate::grid::{Grid, GridField, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn stream(seed: u64, trial: u64, slot: u64) -> ChaCha8Rng {
    // splitmix-style mixing keeps distinct (trial, slot) streams decorrelated
    let mut z = seed ^ trial.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ slot.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

/// Mean-zero complex Gaussian field, band-limited to `|m_axis| <= N/4`,
/// with coefficient decay `1 / (1 + |m|^2)`.
pub fn gaussian_field(grid: Grid, seed: u64, trial: u64, slot: u64) -> GridField {
    let mut rng = stream(seed, trial, slot);
    let band = (grid.n() / 4) as i64;
    let mut coeffs = vec![C64::new(0.0, 0.0); grid.points()];
    for (flat, c) in coeffs.iter_mut().enumerate() {
        let m = grid.modes_of(flat);
        let msq = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]) as f64;
        if msq == 0.0 || m.iter().any(|v| v.abs() > band) {
            continue;
        }
        let g = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        *c = g / (1.0 + msq);
    }
    GridField::from_spectral(grid, coeffs).unwrap()
}

/// Single plane wave with a slot-dependent mode (adversarial case).
pub fn single_mode_field(grid: Grid, slot: u64) -> GridField {
    let m0 = 1 + (slot as i64 % 3);
    let m = match grid.dim() {
        1 => [m0, 0, 0],
        _ => [m0, (slot as i64 + 1) % 2, 1 - m0 % 2],
    };
    GridField::single_mode(grid, m).unwrap()
}

/// Smooth periodic bump centered mid-box, mean-projected (adversarial case).
pub fn bump_field(grid: Grid, slot: u64) -> GridField {
    let n = grid.n();
    let l = grid.len();
    let width = l / (8.0 + slot as f64);
    let xs = grid.coords_axis();
    let c = l / 2.0;
    let profile = |x: f64| {
        let mut d = (x - c) % l;
        if d > l / 2.0 {
            d -= l;
        }
        if d < -l / 2.0 {
            d += l;
        }
        (-0.5 * (d / width).powi(2)).exp()
    };
    let samples: Vec<C64> = match grid.dim() {
        1 => xs.iter().map(|&x| C64::new(profile(x), 0.0)).collect(),
        _ => {
            let mut out = Vec::with_capacity(grid.points());
            for ix in 0..n {
                for iy in 0..n {
                    for iz in 0..n {
                        let v = profile(xs[ix]) * profile(xs[iy]) * profile(xs[iz]);
                        out.push(C64::new(v, 0.0));
                    }
                }
            }
            out
        }
    };
    GridField::from_physical(grid, samples).unwrap().project_mean_zero()
}

/// Ensemble draw for one trial slot: trials 0 and 1 are the adversarial
/// single-mode and bump cases, the rest are random Gaussian fields.
pub fn trial_field(grid: Grid, seed: u64, trial: u64, slot: u64) -> GridField {
    match trial {
        0 => single_mode_field(grid, slot),
        1 => bump_field(grid, slot),
        _ => gaussian_field(grid, seed, trial, slot),
    }
}
