//! Complex fields on a periodic box with a lazily cached spectral dual.
//!
//! Samples live on the uniform grid `x_i = i L / N`; the spectral dual holds
//! Fourier-series coefficients over integer modes `m` with `|m| <= N/2`,
//! `xi = 2 pi m / L`. Physical-space integrals are Riemann sums with cell
//! volume `(L/N)^d`, which is exact for band-limited integrands, so Parseval
//! ties the two representations together to round-off.

use crate::error::CoreError;
use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

pub type C64 = Complex<f64>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    dim: u8,
    n: usize,
    len: f64,
}

impl Grid {
    pub fn new(dim: u8, n: usize, len: f64) -> Result<Self, CoreError> {
        if dim != 1 && dim != 3 {
            return Err(CoreError::InvalidGrid(format!("dim must be 1 or 3, got {dim}")));
        }
        if n < 4 || n % 2 != 0 {
            return Err(CoreError::InvalidGrid(format!("N must be even and >= 4, got {n}")));
        }
        if !(len > 0.0) {
            return Err(CoreError::InvalidGrid(format!("box length must be positive, got {len}")));
        }
        Ok(Grid { dim, n, len })
    }

    pub fn d1(n: usize, len: f64) -> Result<Self, CoreError> {
        Grid::new(1, n, len)
    }

    pub fn d3(n: usize, len: f64) -> Result<Self, CoreError> {
        Grid::new(3, n, len)
    }

    pub fn dim(&self) -> u8 {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> f64 {
        self.len
    }

    pub fn points(&self) -> usize {
        match self.dim {
            1 => self.n,
            _ => self.n * self.n * self.n,
        }
    }

    pub fn cell_volume(&self) -> f64 {
        (self.len / self.n as f64).powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        self.len.powi(self.dim as i32)
    }

    /// Integer mode for a 1-d index (negative half above Nyquist).
    pub fn mode(&self, i: usize) -> i64 {
        if i <= self.n / 2 - 1 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    fn xi_axis(&self) -> Vec<f64> {
        (0..self.n).map(|i| 2.0 * PI * self.mode(i) as f64 / self.len).collect()
    }

    pub fn coords_axis(&self) -> Vec<f64> {
        (0..self.n).map(|i| i as f64 * self.len / self.n as f64).collect()
    }

    /// Integer modes of a flat spectral index.
    pub fn modes_of(&self, flat: usize) -> [i64; 3] {
        match self.dim {
            1 => [self.mode(flat), 0, 0],
            _ => {
                let iz = flat % self.n;
                let iy = (flat / self.n) % self.n;
                let ix = flat / (self.n * self.n);
                [self.mode(ix), self.mode(iy), self.mode(iz)]
            }
        }
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.dim == other.dim && self.n == other.n && self.len == other.len
    }
}

thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> = RefCell::new(HashMap::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cell| {
        let mut map = cell.borrow_mut();
        map.entry((n, inverse))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                if inverse {
                    planner.plan_fft_inverse(n)
                } else {
                    planner.plan_fft_forward(n)
                }
            })
            .clone()
    })
}

fn dft_in_place(grid: &Grid, data: &mut [C64], inverse: bool) {
    let n = grid.n;
    let fft = plan(n, inverse);
    match grid.dim {
        1 => fft.process(data),
        _ => {
            let mut line = vec![C64::new(0.0, 0.0); n];
            // axis 2 (contiguous)
            for chunk in data.chunks_exact_mut(n) {
                fft.process(chunk);
            }
            // axis 1 (stride n)
            for ix in 0..n {
                for iz in 0..n {
                    let base = ix * n * n + iz;
                    for iy in 0..n {
                        line[iy] = data[base + iy * n];
                    }
                    fft.process(&mut line);
                    for iy in 0..n {
                        data[base + iy * n] = line[iy];
                    }
                }
            }
            // axis 0 (stride n^2)
            let n2 = n * n;
            for rem in 0..n2 {
                for ix in 0..n {
                    line[ix] = data[rem + ix * n2];
                }
                fft.process(&mut line);
                for ix in 0..n {
                    data[rem + ix * n2] = line[ix];
                }
            }
        }
    }
    if !inverse {
        let scale = 1.0 / grid.points() as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
}

/// A complex field on a periodic grid; immutable once built. Whichever of
/// the two representations is missing gets computed on first use and cached.
#[derive(Debug)]
pub struct GridField {
    grid: Grid,
    phys: OnceLock<Arc<Vec<C64>>>,
    spec: OnceLock<Arc<Vec<C64>>>,
}

impl Clone for GridField {
    fn clone(&self) -> Self {
        let phys = OnceLock::new();
        if let Some(p) = self.phys.get() {
            let _ = phys.set(p.clone());
        }
        let spec = OnceLock::new();
        if let Some(s) = self.spec.get() {
            let _ = spec.set(s.clone());
        }
        GridField { grid: self.grid, phys, spec }
    }
}

impl GridField {
    pub fn from_physical(grid: Grid, samples: Vec<C64>) -> Result<Self, CoreError> {
        if samples.len() != grid.points() {
            return Err(CoreError::InvalidGrid(format!(
                "expected {} samples, got {}",
                grid.points(),
                samples.len()
            )));
        }
        let phys = OnceLock::new();
        let _ = phys.set(Arc::new(samples));
        Ok(GridField { grid, phys, spec: OnceLock::new() })
    }

    pub fn from_spectral(grid: Grid, coeffs: Vec<C64>) -> Result<Self, CoreError> {
        if coeffs.len() != grid.points() {
            return Err(CoreError::InvalidGrid(format!(
                "expected {} coefficients, got {}",
                grid.points(),
                coeffs.len()
            )));
        }
        let spec = OnceLock::new();
        let _ = spec.set(Arc::new(coeffs));
        Ok(GridField { grid, phys: OnceLock::new(), spec })
    }

    pub fn zero(grid: Grid) -> Self {
        GridField::from_spectral(grid, vec![C64::new(0.0, 0.0); grid.points()]).unwrap()
    }

    pub fn constant(grid: Grid, value: C64) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); grid.points()];
        c[0] = value;
        GridField::from_spectral(grid, c).unwrap()
    }

    /// Unit-coefficient plane wave `e^{i xi . x}` for integer modes `m`.
    pub fn single_mode(grid: Grid, m: [i64; 3]) -> Result<Self, CoreError> {
        let n = grid.n() as i64;
        let wrap = |v: i64| -> Result<usize, CoreError> {
            if v < -(n / 2) || v > n / 2 - 1 {
                return Err(CoreError::InvalidGrid(format!("mode {v} outside grid range")));
            }
            Ok(((v + n) % n) as usize)
        };
        if grid.dim() == 1 && (m[1] != 0 || m[2] != 0) {
            return Err(CoreError::InvalidGrid("1-d grid takes a single mode index".into()));
        }
        let mut c = vec![C64::new(0.0, 0.0); grid.points()];
        let idx = match grid.dim() {
            1 => wrap(m[0])?,
            _ => (wrap(m[0])? * grid.n() + wrap(m[1])?) * grid.n() + wrap(m[2])?,
        };
        c[idx] = C64::new(1.0, 0.0);
        GridField::from_spectral(grid, c)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn phys(&self) -> &[C64] {
        self.phys
            .get_or_init(|| {
                let spec = self.spec.get().expect("field holds at least one representation");
                let mut data = spec.as_ref().clone();
                dft_in_place(&self.grid, &mut data, true);
                Arc::new(data)
            })
            .as_slice()
    }

    pub fn spec(&self) -> &[C64] {
        self.spec
            .get_or_init(|| {
                let phys = self.phys.get().expect("field holds at least one representation");
                let mut data = phys.as_ref().clone();
                dft_in_place(&self.grid, &mut data, false);
                Arc::new(data)
            })
            .as_slice()
    }

    /// L2 norm via the spectral sum.
    pub fn l2_norm(&self) -> f64 {
        let v = self.grid.volume();
        (self.spec().iter().map(|c| c.norm_sqr()).sum::<f64>() * v).sqrt()
    }

    /// L2 norm via the physical Riemann sum (used to check Parseval).
    pub fn l2_norm_physical(&self) -> f64 {
        let h = self.grid.cell_volume();
        (self.phys().iter().map(|c| c.norm_sqr()).sum::<f64>() * h).sqrt()
    }

    /// Grid L^p norm; `p = infinity` gives the max norm.
    pub fn lp_norm(&self, p: f64) -> f64 {
        assert!(p >= 1.0, "p must be >= 1");
        if p.is_infinite() {
            return self.phys().iter().map(|c| c.norm()).fold(0.0, f64::max);
        }
        let h = self.grid.cell_volume();
        (self.phys().iter().map(|c| c.norm().powf(p)).sum::<f64>() * h).powf(1.0 / p)
    }

    pub fn mean_coefficient(&self) -> C64 {
        self.spec()[0]
    }

    pub fn is_mean_zero(&self) -> bool {
        let c0 = self.spec()[0].norm();
        let peak = self.spec().iter().map(|c| c.norm()).fold(0.0, f64::max);
        peak == 0.0 || c0 <= 1e-10 * peak
    }

    pub fn project_mean_zero(&self) -> GridField {
        let mut c = self.spec().to_vec();
        c[0] = C64::new(0.0, 0.0);
        GridField::from_spectral(self.grid, c).unwrap()
    }

    /// Sobolev norm with multiplier `|xi|^s` (homogeneous) or
    /// `(1+|xi|^2)^{s/2}` (inhomogeneous). Homogeneous negative orders
    /// require a mean-zero field; the error is raised rather than silently
    /// projecting the zero mode.
    pub fn sobolev_norm(&self, s: f64, homogeneous: bool) -> Result<f64, CoreError> {
        if homogeneous && s < 0.0 && !self.is_mean_zero() {
            return Err(CoreError::MeanNotZero { mean_mag: self.spec()[0].norm() });
        }
        let mut sum = 0.0;
        self.for_each_mode(|_flat, xi_sq, c| {
            let w = if homogeneous {
                if s == 0.0 {
                    1.0
                } else if xi_sq == 0.0 {
                    0.0
                } else {
                    xi_sq.powf(s)
                }
            } else {
                (1.0 + xi_sq).powf(s)
            };
            sum += w * c.norm_sqr();
        });
        Ok((sum * self.grid.volume()).sqrt())
    }

    /// `|nabla|^s f` as a spectral multiplier; negative orders require a
    /// mean-zero field and annihilate the zero mode.
    pub fn riesz(&self, s: f64) -> Result<GridField, CoreError> {
        if s < 0.0 && !self.is_mean_zero() {
            return Err(CoreError::MeanNotZero { mean_mag: self.spec()[0].norm() });
        }
        Ok(self.map_modes(|xi_sq, c| {
            if xi_sq == 0.0 {
                if s == 0.0 {
                    c
                } else {
                    C64::new(0.0, 0.0)
                }
            } else {
                c * xi_sq.powf(0.5 * s)
            }
        }))
    }

    /// Homogeneous `W^{s,p}` norm: the L^p norm of `|nabla|^s f`.
    pub fn w_norm(&self, s: f64, p: f64) -> Result<f64, CoreError> {
        Ok(self.riesz(s)?.lp_norm(p))
    }

    /// Free Schroedinger flow `e^{i t Laplacian}`: multiplier `e^{-i |xi|^2 t}`.
    pub fn free_propagate(&self, t: f64) -> GridField {
        if t == 0.0 {
            return self.clone();
        }
        self.map_modes(|xi_sq, c| {
            let phase = C64::from_polar(1.0, -xi_sq * t);
            c * phase
        })
    }

    pub fn map_modes(&self, f: impl Fn(f64, C64) -> C64) -> GridField {
        let xi2 = {
            let xi = self.grid.xi_axis();
            xi.iter().map(|x| x * x).collect::<Vec<_>>()
        };
        let spec = self.spec();
        let n = self.grid.n();
        let mut out = vec![C64::new(0.0, 0.0); spec.len()];
        match self.grid.dim() {
            1 => {
                for i in 0..n {
                    out[i] = f(xi2[i], spec[i]);
                }
            }
            _ => {
                let mut flat = 0;
                for ix in 0..n {
                    for iy in 0..n {
                        let part = xi2[ix] + xi2[iy];
                        for iz in 0..n {
                            out[flat] = f(part + xi2[iz], spec[flat]);
                            flat += 1;
                        }
                    }
                }
            }
        }
        GridField::from_spectral(self.grid, out).unwrap()
    }

    fn for_each_mode(&self, mut f: impl FnMut(usize, f64, C64)) {
        let xi2: Vec<f64> = self.grid.xi_axis().iter().map(|x| x * x).collect();
        let spec = self.spec();
        let n = self.grid.n();
        match self.grid.dim() {
            1 => {
                for i in 0..n {
                    f(i, xi2[i], spec[i]);
                }
            }
            _ => {
                let mut flat = 0;
                for ix in 0..n {
                    for iy in 0..n {
                        let part = xi2[ix] + xi2[iy];
                        for iz in 0..n {
                            f(flat, part + xi2[iz], spec[flat]);
                            flat += 1;
                        }
                    }
                }
            }
        }
    }

    pub fn mul(&self, other: &GridField) -> Result<GridField, CoreError> {
        self.check_grid(other)?;
        let a = self.phys();
        let b = other.phys();
        let out: Vec<C64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
        GridField::from_physical(self.grid, out)
    }

    pub fn conj(&self) -> GridField {
        let out: Vec<C64> = self.phys().iter().map(|c| c.conj()).collect();
        GridField::from_physical(self.grid, out).unwrap()
    }

    pub fn abs_sq(&self) -> GridField {
        let out: Vec<C64> = self.phys().iter().map(|c| C64::new(c.norm_sqr(), 0.0)).collect();
        GridField::from_physical(self.grid, out).unwrap()
    }

    pub fn scale(&self, c: C64) -> GridField {
        if let Some(spec) = self.spec.get() {
            let out: Vec<C64> = spec.iter().map(|v| v * c).collect();
            GridField::from_spectral(self.grid, out).unwrap()
        } else {
            let out: Vec<C64> = self.phys().iter().map(|v| v * c).collect();
            GridField::from_physical(self.grid, out).unwrap()
        }
    }

    pub fn add(&self, other: &GridField) -> Result<GridField, CoreError> {
        self.check_grid(other)?;
        let out: Vec<C64> =
            self.spec().iter().zip(other.spec()).map(|(a, b)| a + b).collect();
        GridField::from_spectral(self.grid, out)
    }

    pub fn sub(&self, other: &GridField) -> Result<GridField, CoreError> {
        self.check_grid(other)?;
        let out: Vec<C64> =
            self.spec().iter().zip(other.spec()).map(|(a, b)| a - b).collect();
        GridField::from_spectral(self.grid, out)
    }

    pub fn max_abs(&self) -> f64 {
        self.phys().iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn check_grid(&self, other: &GridField) -> Result<(), CoreError> {
        if !self.grid.same_as(&other.grid) {
            return Err(CoreError::GridMismatch(format!(
                "dim {} N {} L {} vs dim {} N {} L {}",
                self.grid.dim,
                self.grid.n,
                self.grid.len,
                other.grid.dim,
                other.grid.n,
                other.grid.len
            )));
        }
        Ok(())
    }

    /// Conic piece `P_j f` of the partition of unity built from the ratio
    /// `xi_j^2 / sum_{j' != j} xi_{j'}^2` (j is 1, 2 or 3).
    pub fn conic_project(&self, j: usize) -> Result<GridField, CoreError> {
        if self.grid.dim() != 3 {
            return Err(CoreError::Dimension { required: 3, actual: self.grid.dim() });
        }
        assert!((1..=3).contains(&j), "axis index must be 1, 2 or 3");
        let grid = self.grid;
        let spec = self.spec();
        let mut out = vec![C64::new(0.0, 0.0); spec.len()];
        for (flat, c) in spec.iter().enumerate() {
            let m = grid.modes_of(flat);
            let p = conic_weights(m);
            out[flat] = c * p[j - 1];
        }
        GridField::from_spectral(grid, out)
    }
}

/// C-infinity step: 0 for u <= 0, 1 for u >= 1.
fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / u).exp();
        let b = (-1.0 / (1.0 - u)).exp();
        a / (a + b)
    }
}

/// Values of the three conic symbols at integer mode `m`. Sums to one on
/// every mode; `p_j > 0` only where `xi_j^2 >= (1/2) sum_{j' != j} xi_{j'}^2`
/// (so `|xi_j| >= |xi| / sqrt(3)` on the support), `p_j = 1` where
/// `xi_j^2 >= 2 sum_{j' != j} xi_{j'}^2`.
pub fn conic_weights(m: [i64; 3]) -> [f64; 3] {
    let sq: Vec<f64> = m.iter().map(|&v| (v * v) as f64).collect();
    let total: f64 = sq.iter().sum();
    if total == 0.0 {
        return [1.0 / 3.0; 3];
    }
    let mut raw = [0.0f64; 3];
    let mut ratio = [0.0f64; 3];
    for j in 0..3 {
        let denom = total - sq[j];
        ratio[j] = if denom == 0.0 { f64::INFINITY } else { sq[j] / denom };
        raw[j] = if ratio[j] >= 2.0 {
            1.0
        } else if ratio[j] <= 0.5 {
            0.0
        } else {
            smooth_step((ratio[j] - 0.5) / 1.5)
        };
    }
    let sum: f64 = raw.iter().sum();
    if sum == 0.0 {
        // all ratios sit at the lower threshold (diagonal modes): split
        // uniformly over the maximizing axes, which still satisfy the
        // closed support condition
        let rmax = ratio.iter().cloned().fold(f64::MIN, f64::max);
        let winners: Vec<usize> = (0..3).filter(|&j| ratio[j] == rmax).collect();
        let mut p = [0.0; 3];
        for &j in &winners {
            p[j] = 1.0 / winners.len() as f64;
        }
        return p;
    }
    [raw[0] / sum, raw[1] / sum, raw[2] / sum]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g1() -> Grid {
        Grid::d1(64, 2.0 * PI * 8.0).unwrap()
    }

    fn g3() -> Grid {
        Grid::d3(16, 2.0 * PI * 8.0).unwrap()
    }

    fn sample_field(grid: Grid, seed: u64) -> GridField {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut c = vec![C64::new(0.0, 0.0); grid.points()];
        for v in c.iter_mut() {
            *v = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        GridField::from_physical(grid, c).unwrap()
    }

    #[test]
    fn parseval_consistency() {
        for grid in [g1(), g3()] {
            let f = sample_field(grid, 1);
            let a = f.l2_norm();
            let b = f.l2_norm_physical();
            assert!((a - b).abs() <= 1e-12 * a.max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn roundtrip_phys_spec_phys() {
        let f = sample_field(g3(), 2);
        let back = GridField::from_spectral(*f.grid(), f.spec().to_vec());
        let back = back.unwrap();
        let err: f64 = f
            .phys()
            .iter()
            .zip(back.phys())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn single_mode_eigenfunction_of_free_flow() {
        let grid = g1();
        let f = GridField::single_mode(grid, [3, 0, 0]).unwrap();
        let t = 0.37;
        let xi = 2.0 * PI * 3.0 / grid.len();
        let moved = f.free_propagate(t);
        let expected = f.scale(C64::from_polar(1.0, -xi * xi * t));
        let err: f64 = moved
            .spec()
            .iter()
            .zip(expected.spec())
            .map(|(a, b)| (a - b).norm())
            .sum();
        assert!(err < 1e-12);
    }

    #[test]
    fn propagate_zero_time_is_identity() {
        let f = sample_field(g1(), 3);
        let moved = f.free_propagate(0.0);
        assert_eq!(f.spec(), moved.spec());
    }

    #[test]
    fn propagate_is_unitary_and_semigroup() {
        let f = sample_field(g3(), 4);
        let n0 = f.l2_norm();
        let a = f.free_propagate(0.31);
        assert!((a.l2_norm() - n0).abs() <= 1e-12 * n0);
        let b = a.free_propagate(0.17);
        let c = f.free_propagate(0.48);
        let diff: f64 =
            b.spec().iter().zip(c.spec()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
        assert!(diff <= 1e-12 * n0);
    }

    #[test]
    fn sobolev_single_mode() {
        let grid = g1();
        let f = GridField::single_mode(grid, [5, 0, 0]).unwrap();
        let xi = 2.0 * PI * 5.0 / grid.len();
        let l2 = f.l2_norm();
        let h1 = f.sobolev_norm(1.0, true).unwrap();
        assert!((h1 - xi * l2).abs() < 1e-12 * h1);
        let h0 = f.sobolev_norm(0.0, true).unwrap();
        assert!((h0 - l2).abs() < 1e-14 * l2);
    }

    #[test]
    fn negative_norm_requires_mean_zero() {
        let f = GridField::constant(g1(), C64::new(1.0, 0.0));
        assert!(matches!(f.sobolev_norm(-1.0, true), Err(CoreError::MeanNotZero { .. })));
        let g = f.project_mean_zero();
        assert!(g.sobolev_norm(-1.0, true).is_ok());
    }

    #[test]
    fn interpolation_inequality_mean_zero() {
        // |f|_{L2}^2 <= |f|_{H^-1} |f|_{H^1} by Cauchy-Schwarz in frequency
        for seed in 0..5 {
            let f = sample_field(g1(), 100 + seed).project_mean_zero();
            let l2 = f.l2_norm();
            let hm1 = f.sobolev_norm(-1.0, true).unwrap();
            let h1 = f.sobolev_norm(1.0, true).unwrap();
            assert!(l2 * l2 <= hm1 * h1 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn conic_partition_of_unity() {
        let grid = g3();
        let n = grid.n();
        for flat in 0..grid.points() {
            let m = grid.modes_of(flat);
            let p = conic_weights(m);
            let sum: f64 = p.iter().sum();
            assert!((sum - 1.0).abs() <= 1e-12, "mode {m:?} sums to {sum}");
            let sq: Vec<f64> = m.iter().map(|&v| (v * v) as f64).collect();
            let total: f64 = sq.iter().sum();
            for j in 0..3 {
                if p[j] > 0.0 {
                    assert!(
                        sq[j] >= 0.5 * (total - sq[j]) - 1e-12,
                        "support violated at {m:?} axis {j}"
                    );
                }
            }
            let _ = n;
        }
    }

    #[test]
    fn conic_axis_spectrum_fixed() {
        let grid = g3();
        let f = GridField::single_mode(grid, [3, 0, 0]).unwrap();
        let p1 = f.conic_project(1).unwrap();
        let d: f64 =
            f.spec().iter().zip(p1.spec()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        assert!(d < 1e-14);
        let p2 = f.conic_project(2).unwrap();
        assert!(p2.l2_norm() < 1e-14);
    }

    #[test]
    fn conic_sum_reconstructs_field() {
        let f = sample_field(g3(), 9);
        let total = f
            .conic_project(1)
            .unwrap()
            .add(&f.conic_project(2).unwrap())
            .unwrap()
            .add(&f.conic_project(3).unwrap())
            .unwrap();
        let num: f64 =
            f.spec().iter().zip(total.spec()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        assert!(num <= 1e-12 * f.l2_norm());
    }

    #[test]
    fn conic_rejects_d1() {
        let f = sample_field(g1(), 10);
        assert!(matches!(f.conic_project(1), Err(CoreError::Dimension { .. })));
    }
}
