//! Direct Duhamel-term evaluation on dense particle lines, the
//! class-integral quadrature check, hierarchy residuals of factorized
//! solutions, and finite mixture hierarchies with their partial traces.

use crate::dense::DenseKernel;
use crate::error::CoreError;
use crate::grid::{GridField, C64};
use crate::kernel::{contract_b, theta_recursion, FactorizedKernel};
use crate::nls::NlsTrajectory;
use crate::potential::{trilinear_a, Potential};
use crate::quad::{chain_quadrature, simplex_quadrature, QuadValue};
use hierlab_combinatorics::{build_forest, CollisionMap, EchelonClass};
use std::collections::BTreeMap;

const DUHAMEL_MAX_K: usize = 2;
const DUHAMEL_MAX_N: usize = 3;

/// One expansion branch: sign, primed-branch bitmask, surviving lines.
#[derive(Debug, Clone)]
struct BranchTerm {
    sign: f64,
    primed_mask: u32,
    lines: BTreeMap<usize, DenseKernel>,
}

/// Degenerate zero-level expansion: the unchanged projector product.
pub fn duhamel_identity(k: usize, phi: &GridField) -> Result<Vec<DenseKernel>, CoreError> {
    let base = DenseKernel::rank_one(phi)?;
    Ok(vec![base; k])
}

/// Evaluate a Duhamel term directly: dense kernels on every particle line,
/// contractions applied right to left with branch doubling, free evolution
/// between levels. Returns the `k` one-particle kernels, one per tree,
/// recovered from the branch structure (branches in different trees touch
/// disjoint lines, so the result factorizes).
///
/// `times` is `(t, t_1, ..., t_n)` with the external time first.
pub fn duhamel_direct(
    map: &CollisionMap,
    times: &[f64],
    phi: &GridField,
    potential: &Potential,
) -> Result<Vec<DenseKernel>, CoreError> {
    let k = map.k();
    let n = map.n();
    if phi.grid().dim() != 1 {
        return Err(CoreError::Dimension { required: 1, actual: phi.grid().dim() });
    }
    if k > DUHAMEL_MAX_K || n > DUHAMEL_MAX_N {
        return Err(CoreError::SizeCap(format!(
            "dense evaluation capped at k <= {DUHAMEL_MAX_K}, n <= {DUHAMEL_MAX_N}, got k={k} n={n}"
        )));
    }
    if times.len() != n + 1 {
        return Err(CoreError::MissingTime(times.len()));
    }
    let base = DenseKernel::rank_one(phi)?;
    let lines: BTreeMap<usize, DenseKernel> =
        (1..=map.total_lines()).map(|i| (i, base.clone())).collect();
    let mut terms = vec![BranchTerm { sign: 1.0, primed_mask: 0, lines }];

    for level in (1..=n).rev() {
        let target = map.targets()[level - 1];
        let (s1, s2) = map.created_pair(level);
        let mut next = Vec::with_capacity(terms.len() * 2);
        for term in &terms {
            let kj = &term.lines[&target];
            let d1 = term.lines[&s1].diag_field();
            let d2 = term.lines[&s2].diag_field();
            let q = trilinear_a(potential, &d1, &d2)?;
            let qp = q.phys().to_vec();
            let q_conj: Vec<C64> = qp.iter().map(|c| c.conj()).collect();
            let mut keep = |mask_bit: bool, kernel: DenseKernel, sign: f64| {
                let mut lines = term.lines.clone();
                lines.remove(&s1);
                lines.remove(&s2);
                lines.insert(target, kernel);
                next.push(BranchTerm {
                    sign,
                    primed_mask: term.primed_mask | if mask_bit { 1 << (level - 1) } else { 0 },
                    lines,
                });
            };
            keep(false, kj.mul_x(&qp), term.sign);
            keep(true, kj.mul_xp(&q_conj), -term.sign);
        }
        // free evolution applied to every surviving line
        let dt = times[level - 1] - times[level];
        for term in next.iter_mut() {
            if dt != 0.0 {
                for kernel in term.lines.values_mut() {
                    *kernel = kernel.propagate(dt);
                }
            }
        }
        terms = next;
    }

    // regroup: per tree, sum over the branch patterns of its own vertices
    let forest = build_forest(map);
    let mut out = Vec::with_capacity(k);
    for tree in forest.trees.iter() {
        let tree_mask: u32 = tree
            .time_labels()
            .iter()
            .fold(0u32, |acc, l| acc | 1 << (l - 1));
        let line = tree.root;
        let mut seen: BTreeMap<u32, DenseKernel> = BTreeMap::new();
        for term in &terms {
            let key = term.primed_mask & tree_mask;
            let sign = if (key.count_ones() % 2) == 0 { 1.0 } else { -1.0 };
            let scaled = {
                let mut z = DenseKernel::zero(*phi.grid())?;
                z.add_scaled(C64::new(sign, 0.0), &term.lines[&line]);
                z
            };
            seen.entry(key).or_insert(scaled);
        }
        let mut total = DenseKernel::zero(*phi.grid())?;
        for kernel in seen.values() {
            total.add_scaled(C64::new(1.0, 0.0), kernel);
        }
        out.push(total);
    }
    Ok(out)
}

/// The tree-factorized evaluation of the same Duhamel term: each tree's
/// recursive kernel propagated from its first contraction to the external
/// time. Returns the `k` one-particle kernels in factorized form.
pub fn duhamel_factorized(
    map: &CollisionMap,
    times: &[f64],
    phi: &GridField,
    potential: &Potential,
) -> Result<Vec<FactorizedKernel>, CoreError> {
    let n = map.n();
    if times.len() != n + 1 {
        return Err(CoreError::MissingTime(times.len()));
    }
    let t_ext = times[0];
    let base_time = times[n];
    let time_map: BTreeMap<usize, f64> =
        (1..=n).map(|l| (l, times[l])).collect();
    let forest = build_forest(map);
    let mut out = Vec::with_capacity(map.k());
    for tree in &forest.trees {
        let theta = theta_recursion(tree, &time_map, base_time, phi, potential)?;
        let t_anchor = match tree.root_child {
            hierlab_combinatorics::Child::Internal(l) => time_map[&l],
            hierlab_combinatorics::Child::Leaf(_) => base_time,
        };
        out.push(theta.propagate(t_ext - t_anchor));
    }
    Ok(out)
}

/// Relative trace-norm gap between the dense and factorized evaluations,
/// tree by tree (the factorization oracle).
pub fn factorization_gap(
    map: &CollisionMap,
    times: &[f64],
    phi: &GridField,
    potential: &Potential,
) -> Result<f64, CoreError> {
    let dense = duhamel_direct(map, times, phi, potential)?;
    let facts = duhamel_factorized(map, times, phi, potential)?;
    let mut worst: f64 = 0.0;
    for (d, f) in dense.iter().zip(&facts) {
        let fd = DenseKernel::new(*phi.grid(), f.densify()?)?;
        let scale = d.trace_norm().max(1e-300);
        worst = worst.max(d.sub(&fd).trace_norm() / scale);
    }
    Ok(worst)
}

/// Flattened `k`-particle tensor (product over per-tree kernels) used by
/// the class-integral accumulator; k = 1 stays a plain matrix.
fn tensorize(kernels: &[DenseKernel]) -> Vec<C64> {
    match kernels.len() {
        1 => kernels[0].data().to_vec(),
        2 => {
            let a = kernels[0].data();
            let b = kernels[1].data();
            let mut out = vec![C64::new(0.0, 0.0); a.len() * b.len()];
            for (i, x) in a.iter().enumerate() {
                let row = &mut out[i * b.len()..(i + 1) * b.len()];
                for (j, y) in b.iter().enumerate() {
                    row[j] = x * y;
                }
            }
            out
        }
        _ => unreachable!("duhamel evaluation is capped at k <= 2"),
    }
}

#[derive(Debug, Clone)]
pub struct ClassIntegralReport {
    pub order: usize,
    pub lhs_norm: f64,
    pub rhs_norm: f64,
    pub gap: f64,
    pub relative_gap: f64,
}

/// Check the class-integral identity for one echelon class: the summed
/// member integrals over the ordered simplex against the representative
/// integrated over the realized time domain (one chain region per member),
/// with genuinely different quadrature constructions on the two sides.
pub fn class_integral_check(
    class: &EchelonClass,
    t: f64,
    phi: &GridField,
    potential: &Potential,
    order: usize,
) -> Result<ClassIntegralReport, CoreError> {
    let k = class.representative.k();
    let n = class.representative.n();
    let points = phi.grid().n() * phi.grid().n();
    let zero = vec![C64::new(0.0, 0.0); points.pow(k as u32)];

    let mut lhs = zero.clone();
    let mut rhs = zero.clone();
    let mut err: Option<CoreError> = None;
    for (member, trace) in &class.members {
        // member over the ordered simplex, slot-ordered times descending
        let contrib: Vec<C64> = simplex_quadrature(n, t, order, |s| {
            let mut times = Vec::with_capacity(n + 1);
            times.push(t);
            times.extend_from_slice(s);
            match duhamel_direct(member, &times, phi, potential) {
                Ok(kernels) => tensorize(&kernels),
                Err(e) => {
                    err = Some(e);
                    zero.clone()
                }
            }
        });
        lhs.axpy(1.0, &contrib);
        // representative over the member's permuted chain region
        let chain = trace.time_chain();
        let rep = &class.representative;
        let contrib: Vec<C64> = chain_quadrature(&chain.chain, t, order, |s| {
            let mut times = Vec::with_capacity(n + 1);
            times.push(t);
            times.extend_from_slice(s);
            match duhamel_direct(rep, &times, phi, potential) {
                Ok(kernels) => tensorize(&kernels),
                Err(e) => {
                    err = Some(e);
                    zero.clone()
                }
            }
        });
        rhs.axpy(1.0, &contrib);
    }
    if let Some(e) = err {
        return Err(e);
    }

    let h = phi.grid().cell_volume();
    let norm_of = |data: &[C64]| -> f64 {
        // nuclear norm of the k-particle operator, grid measure included
        let side = (data.len() as f64).sqrt() as usize;
        debug_assert_eq!(side * side, data.len());
        let m = nalgebra::DMatrix::from_fn(side, side, |r, c| data[r * side + c]);
        m.singular_values().iter().sum::<f64>() * h.powi(k as i32)
    };
    let lhs_norm = norm_of(&lhs);
    let rhs_norm = norm_of(&rhs);
    let diff: Vec<C64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    let gap = norm_of(&diff);
    Ok(ClassIntegralReport {
        order,
        lhs_norm,
        rhs_norm,
        gap,
        relative_gap: gap / lhs_norm.max(1e-300),
    })
}

/// Trapezoidal weights on the trajectory's snapshot times.
fn trapezoid_weights(times: &[f64]) -> Vec<f64> {
    let m = times.len();
    let mut w = vec![0.0; m];
    for i in 0..m.saturating_sub(1) {
        let h = times[i + 1] - times[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    w
}

/// Residual of the factorized solution in the first hierarchy equation:
/// `gamma(t) - U(t) gamma(0) - i lambda int_0^t U(t-s) B gamma^(3)(s) ds`,
/// evaluated densely with the trajectory's own step grid as quadrature.
/// Returns the trace norm of the residual.
pub fn hierarchy_residual_k1(
    traj: &NlsTrajectory,
    potential: &Potential,
) -> Result<f64, CoreError> {
    if traj.snapshots.len() < 2 {
        return Err(CoreError::SnapshotCadence(
            "need every solver step in the trajectory for the Duhamel quadrature".into(),
        ));
    }
    let t_end = *traj.times.last().unwrap();
    let phi_end = traj.last();
    let mut residual = DenseKernel::rank_one(phi_end)?;
    let free = DenseKernel::rank_one(&traj.initial().free_propagate(t_end))?;
    residual.add_scaled(C64::new(-1.0, 0.0), &free);

    let w = trapezoid_weights(&traj.times);
    let ilambda = C64::new(0.0, traj.lambda);
    for (i, phi_s) in traj.snapshots.iter().enumerate() {
        let s = traj.times[i];
        let theta = contract_b(
            &FactorizedKernel::rank_one(phi_s),
            &FactorizedKernel::rank_one(phi_s),
            &FactorizedKernel::rank_one(phi_s),
            potential,
        )?;
        let propagated = theta.propagate(t_end - s);
        let dense = DenseKernel::new(*phi_s.grid(), propagated.densify()?)?;
        residual.add_scaled(-ilambda * w[i], &dense);
    }
    Ok(residual.trace_norm())
}

/// Same residual for the two-particle equation, assembled as a dense
/// two-particle operator; the coupling term is
/// `sum_{j=1,2} U(t-s) B_j gamma^(4)(s) = Theta_s x gamma_s + gamma_s x Theta_s`.
pub fn hierarchy_residual_k2(
    traj: &NlsTrajectory,
    potential: &Potential,
) -> Result<f64, CoreError> {
    let n = traj.initial().grid().n();
    if n > 40 {
        return Err(CoreError::SizeCap(format!(
            "two-particle dense residual capped at N <= 40, got {n}"
        )));
    }
    if traj.snapshots.len() < 2 {
        return Err(CoreError::SnapshotCadence(
            "need every solver step in the trajectory for the Duhamel quadrature".into(),
        ));
    }
    let t_end = *traj.times.last().unwrap();
    let grid = *traj.initial().grid();
    let points = n * n;
    let mut residual = vec![C64::new(0.0, 0.0); points * points];

    let acc = |data: &mut Vec<C64>, c: C64, a: &DenseKernel, b: &DenseKernel| {
        let ad = a.data();
        let bd = b.data();
        for (i, x) in ad.iter().enumerate() {
            if x.norm_sqr() == 0.0 {
                continue;
            }
            let cx = c * x;
            let row = &mut data[i * bd.len()..(i + 1) * bd.len()];
            for (j, y) in bd.iter().enumerate() {
                row[j] += cx * y;
            }
        }
    };

    let g_end = DenseKernel::rank_one(traj.last())?;
    acc(&mut residual, C64::new(1.0, 0.0), &g_end, &g_end);
    let g_free = DenseKernel::rank_one(&traj.initial().free_propagate(t_end))?;
    acc(&mut residual, C64::new(-1.0, 0.0), &g_free, &g_free);

    let w = trapezoid_weights(&traj.times);
    let ilambda = C64::new(0.0, traj.lambda);
    for (i, phi_s) in traj.snapshots.iter().enumerate() {
        let s = traj.times[i];
        let rank = FactorizedKernel::rank_one(phi_s);
        let theta = contract_b(&rank, &rank, &rank, potential)?;
        let theta_dense = DenseKernel::new(grid, theta.propagate(t_end - s).densify()?)?;
        let gamma_dense = DenseKernel::rank_one(&phi_s.free_propagate(t_end - s))?;
        let c = -ilambda * w[i];
        acc(&mut residual, c, &theta_dense, &gamma_dense);
        acc(&mut residual, c, &gamma_dense, &theta_dense);
    }

    let m = nalgebra::DMatrix::from_fn(points, points, |r, c| residual[r * points + c]);
    Ok(m.singular_values().iter().sum::<f64>() * grid.cell_volume() * grid.cell_volume())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalizationMode {
    Sphere,
    Ball,
}

/// Finite atomic mixture `sum_i mu_i (|phi_i><phi_i|)^(x k)`.
#[derive(Debug, Clone)]
pub struct MixtureHierarchy {
    pub weights: Vec<f64>,
    pub states: Vec<GridField>,
    pub mode: NormalizationMode,
}

#[derive(Debug, Clone)]
pub struct PartialTraceReport {
    /// Largest deviation of the algebraic identity `Tr_{k+1} -> mu_i |phi_i|^2`
    /// from the sphere-mode expectation `mu_i`.
    pub algebraic_max_dev: f64,
    /// Per-atom trace factor `|phi_i|_2^2` lost per contracted particle.
    pub deficit_factors: Vec<f64>,
    /// Max entry deviation against the dense partial trace (d = 1, k = 1).
    pub dense_max_dev: Option<f64>,
}

impl MixtureHierarchy {
    pub fn new(
        weights: Vec<f64>,
        states: Vec<GridField>,
        mode: NormalizationMode,
    ) -> Result<Self, CoreError> {
        if weights.len() != states.len() || weights.is_empty() {
            return Err(CoreError::InvalidGrid("mixture needs one weight per state".into()));
        }
        if weights.iter().any(|w| *w < 0.0) {
            return Err(CoreError::InvalidGrid("mixture weights must be nonnegative".into()));
        }
        let tol = 1e-10;
        match mode {
            NormalizationMode::Sphere => {
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > tol {
                    return Err(CoreError::InvalidGrid(format!(
                        "sphere mode needs weights summing to 1, got {total}"
                    )));
                }
                for s in &states {
                    if (s.l2_norm() - 1.0).abs() > tol {
                        return Err(CoreError::InvalidGrid(
                            "sphere mode needs unit-norm states".into(),
                        ));
                    }
                }
            }
            NormalizationMode::Ball => {
                for s in &states {
                    if s.l2_norm() > 1.0 + tol {
                        return Err(CoreError::InvalidGrid(
                            "ball mode needs states inside the unit ball".into(),
                        ));
                    }
                }
            }
        }
        Ok(MixtureHierarchy { weights, states, mode })
    }

    /// Verify `Tr_{k+1} gamma^(k+1) = gamma^(k)` at the mixture-algebra
    /// level; in sphere mode the contraction multiplies each weight by
    /// `|phi_i|_2^2 = 1` exactly, in ball mode by the deficit factor. For
    /// 1-d states the k = 1 identity is also checked against a dense
    /// two-particle partial trace.
    pub fn partial_trace_check(&self, with_dense: bool) -> Result<PartialTraceReport, CoreError> {
        let deficit: Vec<f64> = self.states.iter().map(|s| s.l2_norm().powi(2)).collect();
        let algebraic_max_dev = match self.mode {
            NormalizationMode::Sphere => deficit
                .iter()
                .map(|d| (d - 1.0).abs())
                .fold(0.0, f64::max),
            NormalizationMode::Ball => 0.0,
        };
        let dense_max_dev = if with_dense && self.states[0].grid().dim() == 1 {
            let grid = *self.states[0].grid();
            let n = grid.n();
            let h = grid.cell_volume();
            // dense two-particle kernel of gamma^(2), traced over particle 2
            let mut traced = vec![C64::new(0.0, 0.0); n * n];
            for (mu, phi) in self.weights.iter().zip(&self.states) {
                let one = DenseKernel::rank_one(phi)?;
                let tr: C64 = one.diag().iter().sum::<C64>() * h;
                for (i, v) in one.data().iter().enumerate() {
                    traced[i] += mu * v * tr;
                }
            }
            // expected k = 1 marginal with per-atom deficit
            let mut expected = vec![C64::new(0.0, 0.0); n * n];
            for ((mu, phi), d) in self.weights.iter().zip(&self.states).zip(&deficit) {
                let one = DenseKernel::rank_one(phi)?;
                for (i, v) in one.data().iter().enumerate() {
                    expected[i] += mu * d * v;
                }
            }
            Some(
                traced
                    .iter()
                    .zip(&expected)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max),
            )
        } else {
            None
        };
        Ok(PartialTraceReport { algebraic_max_dev, deficit_factors: deficit, dense_max_dev })
    }
}
