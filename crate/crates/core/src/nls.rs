//! Strang split-step solver for `i d/dt phi = -Laplacian phi + lambda W[phi] phi`
//! with `W[phi] = A[V, |phi|^2, |phi|^2]` (`= |phi|^4` for the point
//! interaction). The nonlinear half-steps are exact phase rotations, the
//! linear step is the exact spectral flow, so the scheme is unconditionally
//! stable and second order in `dt`.

use crate::error::CoreError;
use crate::grid::{GridField, C64};
use crate::potential::{trilinear_a, Potential};

#[derive(Debug, Clone)]
pub struct SolveParams {
    pub lambda: f64,
    pub potential: Potential,
    pub t_final: f64,
    pub steps: usize,
    /// Keep every `snapshot_stride`-th state (plus the final one).
    pub snapshot_stride: usize,
}

#[derive(Debug, Clone)]
pub struct NlsTrajectory {
    pub scheme: &'static str,
    pub lambda: f64,
    pub dt: f64,
    pub times: Vec<f64>,
    pub snapshots: Vec<GridField>,
}

impl NlsTrajectory {
    pub fn initial(&self) -> &GridField {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &GridField {
        self.snapshots.last().expect("trajectory holds at least the initial state")
    }
}

fn nonlinear_half_step(
    phi: &GridField,
    lambda: f64,
    potential: &Potential,
    half_dt: f64,
) -> Result<GridField, CoreError> {
    let density = phi.abs_sq();
    let w = trilinear_a(potential, &density, &density)?;
    let wp = w.phys();
    let samples: Vec<C64> = phi
        .phys()
        .iter()
        .zip(wp)
        .map(|(p, a)| p * C64::from_polar(1.0, -half_dt * lambda * a.re))
        .collect();
    GridField::from_physical(*phi.grid(), samples)
}

pub fn nls_solve(phi0: &GridField, params: &SolveParams) -> Result<NlsTrajectory, CoreError> {
    if params.steps == 0 {
        return Err(CoreError::SnapshotCadence("steps must be >= 1".into()));
    }
    let stride = params.snapshot_stride.max(1);
    let dt = params.t_final / params.steps as f64;
    let guard = phi0.max_abs().max(1e-300) * 1e6;
    let mut phi = phi0.clone();
    let mut times = vec![0.0];
    let mut snapshots = vec![phi.clone()];
    for step in 1..=params.steps {
        phi = nonlinear_half_step(&phi, params.lambda, &params.potential, 0.5 * dt)?;
        phi = phi.free_propagate(dt);
        phi = nonlinear_half_step(&phi, params.lambda, &params.potential, 0.5 * dt)?;
        let amp = phi.max_abs();
        if amp > guard {
            return Err(CoreError::BlowUp { step, ratio: amp / (guard / 1e6) });
        }
        if step % stride == 0 || step == params.steps {
            times.push(step as f64 * dt);
            snapshots.push(phi.clone());
        }
    }
    Ok(NlsTrajectory { scheme: "strang", lambda: params.lambda, dt, times, snapshots })
}

pub fn mass(phi: &GridField) -> f64 {
    let n = phi.l2_norm();
    n * n
}

/// Hamiltonian generating the flow: `int |grad phi|^2 + (lambda/3) int
/// A[V, |phi|^2, |phi|^2] |phi|^2`.
pub fn energy(phi: &GridField, lambda: f64, potential: &Potential) -> Result<f64, CoreError> {
    let kinetic = phi.sobolev_norm(1.0, true)?.powi(2);
    let density = phi.abs_sq();
    let w = trilinear_a(potential, &density, &density)?;
    let h = phi.grid().cell_volume();
    let interaction: f64 = w
        .phys()
        .iter()
        .zip(density.phys())
        .map(|(a, d)| a.re * d.re)
        .sum::<f64>()
        * h;
    Ok(kinetic + lambda / 3.0 * interaction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn smooth_field(grid: Grid, seed: u64) -> GridField {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let band = (grid.n() / 4) as i64;
        let mut coeffs = vec![C64::new(0.0, 0.0); grid.points()];
        for (flat, c) in coeffs.iter_mut().enumerate() {
            let m = grid.modes_of(flat);
            let msq = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]) as f64;
            if m.iter().any(|v| v.abs() > band) {
                continue;
            }
            *c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                / (1.0 + msq * msq);
        }
        GridField::from_spectral(grid, coeffs).unwrap()
    }

    fn delta_params(lambda: f64, t: f64, steps: usize) -> SolveParams {
        SolveParams {
            lambda,
            potential: Potential::delta(1.0),
            t_final: t,
            steps,
            snapshot_stride: usize::MAX,
        }
    }

    #[test]
    fn free_case_matches_propagator() {
        let grid = Grid::d1(64, 2.0 * PI * 8.0).unwrap();
        let phi0 = smooth_field(grid, 1);
        let traj = nls_solve(&phi0, &delta_params(0.0, 0.8, 20)).unwrap();
        let exact = phi0.free_propagate(0.8);
        let err = traj.last().sub(&exact).unwrap().l2_norm();
        assert!(err <= 1e-12 * phi0.l2_norm(), "err {err}");
    }

    #[test]
    fn plane_wave_is_exact() {
        // constant-modulus data: |phi|^4 is constant, the splitting commutes
        let grid = Grid::d1(64, 2.0 * PI * 8.0).unwrap();
        let c = 0.7;
        let phi0 = GridField::single_mode(grid, [2, 0, 0]).unwrap().scale(C64::new(c, 0.0));
        let lambda = 1.0;
        let t = 0.5;
        let traj = nls_solve(&phi0, &delta_params(lambda, t, 40)).unwrap();
        let xi = 2.0 * PI * 2.0 / grid.len();
        let phase = C64::from_polar(1.0, -(xi * xi + lambda * c.powi(4)) * t);
        let exact = phi0.scale(phase);
        let err = traj.last().sub(&exact).unwrap().l2_norm();
        assert!(err <= 1e-10 * phi0.l2_norm(), "err {err}");
    }

    #[test]
    fn mass_is_conserved() {
        let grid = Grid::d1(64, 2.0 * PI * 8.0).unwrap();
        let phi0 = smooth_field(grid, 2);
        let m0 = mass(&phi0);
        for lambda in [1.0, -1.0] {
            let traj = nls_solve(&phi0, &delta_params(lambda, 1.0, 200)).unwrap();
            let m1 = mass(traj.last());
            assert!((m1 - m0).abs() <= 1e-10 * m0, "lambda {lambda}: {m0} -> {m1}");
        }
    }

    #[test]
    fn energy_is_conserved_to_dt2() {
        let grid = Grid::d1(64, 2.0 * PI * 8.0).unwrap();
        let phi0 = smooth_field(grid, 3);
        let lambda = 1.0;
        let pot = Potential::delta(1.0);
        let e0 = energy(&phi0, lambda, &pot).unwrap();
        let traj = nls_solve(&phi0, &delta_params(lambda, 1.0, 2000)).unwrap();
        let e1 = energy(traj.last(), lambda, &pot).unwrap();
        assert!((e1 - e0).abs() <= 1e-6 * e0.abs(), "{e0} -> {e1}");
    }

    #[test]
    fn self_convergence_is_second_order() {
        let grid = Grid::d1(64, 2.0 * PI * 8.0).unwrap();
        let phi0 = smooth_field(grid, 4);
        let t = 0.5;
        let reference = nls_solve(&phi0, &delta_params(1.0, t, 1600)).unwrap();
        let mut errors = Vec::new();
        for steps in [50usize, 100, 200] {
            let traj = nls_solve(&phi0, &delta_params(1.0, t, steps)).unwrap();
            errors.push(traj.last().sub(reference.last()).unwrap().l2_norm());
        }
        for w in errors.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!((order - 2.0).abs() <= 0.2, "order {order}, errors {errors:?}");
        }
    }

    #[test]
    fn hartree_case_runs_and_conserves_mass() {
        let grid = Grid::d1(64, 2.0 * PI * 8.0).unwrap();
        let phi0 = smooth_field(grid, 5);
        let bump = crate::ensemble::bump_field(grid, 0).abs_sq();
        let pot = Potential::Separable { v: bump.clone(), w: bump };
        let params = SolveParams {
            lambda: 1.0,
            potential: pot,
            t_final: 0.5,
            steps: 100,
            snapshot_stride: usize::MAX,
        };
        let m0 = mass(&phi0);
        let traj = nls_solve(&phi0, &params).unwrap();
        assert!((mass(traj.last()) - m0).abs() <= 1e-10 * m0);
    }
}
