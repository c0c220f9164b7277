//! Dense one-particle kernels on a 1-d grid: the brute-force side of the
//! factorization oracles. A kernel is the full matrix `K[x, x']`; free
//! evolution acts by spectral multipliers on both indices and contractions
//! multiply by diagonal data. Trace norms come from a full SVD.

use crate::error::CoreError;
use crate::grid::{Grid, GridField, C64};
use nalgebra::DMatrix;

#[derive(Debug, Clone)]
pub struct DenseKernel {
    grid: Grid,
    /// Row-major `data[x * n + x']`.
    data: Vec<C64>,
}

impl DenseKernel {
    pub fn new(grid: Grid, data: Vec<C64>) -> Result<Self, CoreError> {
        if grid.dim() != 1 {
            return Err(CoreError::Dimension { required: 1, actual: grid.dim() });
        }
        if data.len() != grid.n() * grid.n() {
            return Err(CoreError::InvalidGrid("dense kernel size mismatch".into()));
        }
        Ok(DenseKernel { grid, data })
    }

    pub fn zero(grid: Grid) -> Result<Self, CoreError> {
        let n = grid.n();
        DenseKernel::new(grid, vec![C64::new(0.0, 0.0); n * n])
    }

    pub fn rank_one(phi: &GridField) -> Result<Self, CoreError> {
        let grid = *phi.grid();
        if grid.dim() != 1 {
            return Err(CoreError::Dimension { required: 1, actual: grid.dim() });
        }
        let n = grid.n();
        let p = phi.phys();
        let mut data = vec![C64::new(0.0, 0.0); n * n];
        for x in 0..n {
            for xp in 0..n {
                data[x * n + xp] = p[x] * p[xp].conj();
            }
        }
        Ok(DenseKernel { grid, data })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn diag(&self) -> Vec<C64> {
        let n = self.grid.n();
        (0..n).map(|x| self.data[x * n + x]).collect()
    }

    pub fn diag_field(&self) -> GridField {
        GridField::from_physical(self.grid, self.diag()).expect("diag length matches grid")
    }

    /// Free evolution `U(t)`: phase `e^{-i xi^2 t}` on the `x` index and the
    /// conjugate phase on the `x'` index.
    pub fn propagate(&self, t: f64) -> DenseKernel {
        if t == 0.0 {
            return self.clone();
        }
        let n = self.grid.n();
        let phases: Vec<C64> = (0..n)
            .map(|i| {
                let xi = 2.0 * std::f64::consts::PI * self.grid.mode(i) as f64 / self.grid.len();
                C64::from_polar(1.0, -xi * xi * t)
            })
            .collect();
        let mut data = self.data.clone();
        // x index: FFT each column, multiply, inverse
        let mut line = vec![C64::new(0.0, 0.0); n];
        for xp in 0..n {
            for x in 0..n {
                line[x] = data[x * n + xp];
            }
            let transformed = transform_line(self.grid, &line, &phases, false);
            for x in 0..n {
                data[x * n + xp] = transformed[x];
            }
        }
        // x' index: conjugate phases on rows
        for x in 0..n {
            line.copy_from_slice(&data[x * n..(x + 1) * n]);
            let transformed = transform_line(self.grid, &line, &phases, true);
            data[x * n..(x + 1) * n].copy_from_slice(&transformed);
        }
        DenseKernel { grid: self.grid, data }
    }

    /// Multiply rows by a function of `x`.
    pub fn mul_x(&self, f: &[C64]) -> DenseKernel {
        let n = self.grid.n();
        let mut data = self.data.clone();
        for x in 0..n {
            for xp in 0..n {
                data[x * n + xp] *= f[x];
            }
        }
        DenseKernel { grid: self.grid, data }
    }

    /// Multiply columns by a function of `x'`.
    pub fn mul_xp(&self, f: &[C64]) -> DenseKernel {
        let n = self.grid.n();
        let mut data = self.data.clone();
        for x in 0..n {
            for xp in 0..n {
                data[x * n + xp] *= f[xp];
            }
        }
        DenseKernel { grid: self.grid, data }
    }

    pub fn add_scaled(&mut self, c: C64, other: &DenseKernel) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    pub fn sub(&self, other: &DenseKernel) -> DenseKernel {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        DenseKernel { grid: self.grid, data }
    }

    pub fn trace(&self) -> C64 {
        self.diag().iter().sum::<C64>() * self.grid.cell_volume()
    }

    /// Nuclear norm of the kernel as an integral operator on `L^2`.
    pub fn trace_norm(&self) -> f64 {
        let n = self.grid.n();
        let m = DMatrix::from_fn(n, n, |r, c| self.data[r * n + c]);
        let sv = m.singular_values();
        sv.iter().sum::<f64>() * self.grid.cell_volume()
    }

    /// Frobenius (Hilbert-Schmidt) norm with the grid measure.
    pub fn hs_norm(&self) -> f64 {
        (self.data.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt() * self.grid.cell_volume()
    }

    /// Apply `|nabla|^s` on both indices (for weighted trace norms).
    pub fn riesz_both(&self, s: f64) -> DenseKernel {
        let n = self.grid.n();
        let weights: Vec<C64> = (0..n)
            .map(|i| {
                let xi = 2.0 * std::f64::consts::PI * self.grid.mode(i) as f64 / self.grid.len();
                let w = if xi == 0.0 {
                    if s == 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    (xi * xi).powf(0.5 * s)
                };
                C64::new(w, 0.0)
            })
            .collect();
        let mut data = self.data.clone();
        let mut line = vec![C64::new(0.0, 0.0); n];
        for xp in 0..n {
            for x in 0..n {
                line[x] = data[x * n + xp];
            }
            let transformed = transform_line(self.grid, &line, &weights, false);
            for x in 0..n {
                data[x * n + xp] = transformed[x];
            }
        }
        for x in 0..n {
            line.copy_from_slice(&data[x * n..(x + 1) * n]);
            let transformed = transform_line(self.grid, &line, &weights, true);
            data[x * n..(x + 1) * n].copy_from_slice(&transformed);
        }
        DenseKernel { grid: self.grid, data }
    }
}

/// Forward transform a line, multiply by `mult` (conjugated when `conj_side`
/// is set, for the primed index), inverse transform.
fn transform_line(grid: Grid, line: &[C64], mult: &[C64], conj_side: bool) -> Vec<C64> {
    let f = GridField::from_physical(grid, line.to_vec()).expect("line length matches grid");
    let spec = f.spec();
    let out: Vec<C64> = spec
        .iter()
        .zip(mult)
        .map(|(c, m)| if conj_side { c * m.conj() } else { c * m })
        .collect();
    GridField::from_spectral(grid, out).expect("length preserved").phys().to_vec()
}
