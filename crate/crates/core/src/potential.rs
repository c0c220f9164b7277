//! Three-body interaction potentials and the trilinear operator
//! `A[V, f, g](x) = int int V(x-y1, x-y2) f(y1) g(y2) dy1 dy2`.

use crate::error::CoreError;
use crate::grid::{Grid, GridField, C64};

/// Either the point interaction `lambda delta(y) delta(z)` or a separable
/// `V(y, z) = v(y) w(z)`.
#[derive(Debug, Clone)]
pub enum Potential {
    Delta { strength: f64 },
    Separable { v: GridField, w: GridField },
}

impl Potential {
    pub fn delta(strength: f64) -> Self {
        Potential::Delta { strength }
    }

    /// `|V|_{L^p}`; for the delta kind only the `p = 1` mass is defined.
    pub fn lp_norm(&self, p: f64) -> Result<f64, CoreError> {
        match self {
            Potential::Delta { strength } => {
                if (p - 1.0).abs() < 1e-12 {
                    Ok(strength.abs())
                } else {
                    Err(CoreError::PotentialNorm(format!(
                        "delta potential has no L^{p} norm"
                    )))
                }
            }
            Potential::Separable { v, w } => Ok(v.lp_norm(p) * w.lp_norm(p)),
        }
    }

    pub fn grid(&self) -> Option<&Grid> {
        match self {
            Potential::Delta { .. } => None,
            Potential::Separable { v, .. } => Some(v.grid()),
        }
    }

    pub fn descriptor(&self) -> String {
        match self {
            Potential::Delta { strength } => format!("delta({strength:+})"),
            Potential::Separable { v, w } => format!(
                "separable(N={},L={:.6e},|v|1={:.6e},|w|1={:.6e})",
                v.grid().n(),
                v.grid().len(),
                v.lp_norm(1.0),
                w.lp_norm(1.0)
            ),
        }
    }

    pub fn check_grid(&self, grid: &Grid) -> Result<(), CoreError> {
        if let Potential::Separable { v, w } = self {
            if !v.grid().same_as(grid) || !w.grid().same_as(grid) {
                return Err(CoreError::GridMismatch(
                    "potential factors live on a different grid".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Periodic convolution via spectral multiplication.
pub fn convolve(a: &GridField, b: &GridField) -> Result<GridField, CoreError> {
    a.check_grid(b)?;
    let vol = a.grid().volume();
    let out: Vec<C64> =
        a.spec().iter().zip(b.spec()).map(|(x, y)| x * y * vol).collect();
    GridField::from_spectral(*a.grid(), out)
}

/// The trilinear operator: pointwise `strength * f * g` for the delta kind,
/// `(v * f)(w * g)` (convolutions) for the separable kind.
pub fn trilinear_a(
    potential: &Potential,
    f: &GridField,
    g: &GridField,
) -> Result<GridField, CoreError> {
    f.check_grid(g)?;
    potential.check_grid(f.grid())?;
    match potential {
        Potential::Delta { strength } => {
            Ok(f.mul(g)?.scale(C64::new(*strength, 0.0)))
        }
        Potential::Separable { v, w } => {
            let cf = convolve(v, f)?;
            let cg = convolve(w, g)?;
            cf.mul(&cg)
        }
    }
}
