//! Numerical stress tests for the multilinear estimates and the recursive
//! bounds: each check computes left- and right-hand sides over a seeded
//! ensemble and reports ratio statistics. Implicit constants are never
//! asserted against fixed values, only finiteness and grid-refinement
//! stability.

use crate::ensemble::trial_field;
use crate::error::CoreError;
use crate::grid::{Grid, GridField};
use crate::kernel::theta_recursion;
use crate::potential::{trilinear_a, Potential};
use crate::quad::gauss_legendre_on;
use crate::report::{fmt_f64, EstimateReport};
use hierlab_combinatorics::{Child, TreeGraph};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Largest epsilon for which every exponent in the Hartree-estimate proofs
/// stays in a valid Lebesgue range.
pub const EPS_MAX: f64 = 1.0 / 24.0;

#[derive(Debug, Clone)]
pub struct EstimateParams {
    pub grid: Grid,
    pub t_horizon: f64,
    pub eps: f64,
    pub trials: usize,
    pub seed: u64,
    pub time_nodes: usize,
}

impl EstimateParams {
    pub fn validate(&self) -> Result<(), CoreError> {
        if !(0.0..=EPS_MAX).contains(&self.eps) {
            return Err(CoreError::ExponentRelation(format!(
                "eps must lie in [0, {EPS_MAX:.6}], got {}",
                self.eps
            )));
        }
        if self.trials == 0 || self.time_nodes == 0 {
            return Err(CoreError::ExponentRelation(
                "trials and time_nodes must be positive".into(),
            ));
        }
        Ok(())
    }

    fn base_params(&self, extra: &[(&str, String)]) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("N".into(), self.grid.n().to_string());
        m.insert("d".into(), self.grid.dim().to_string());
        m.insert("L".into(), fmt_f64(self.grid.len()));
        m.insert("T".into(), fmt_f64(self.t_horizon));
        m.insert("eps".into(), fmt_f64(self.eps));
        m.insert("time_nodes".into(), self.time_nodes.to_string());
        for (k, v) in extra {
            m.insert((*k).into(), v.clone());
        }
        m
    }

    fn require_d3(&self) -> Result<(), CoreError> {
        if self.grid.dim() != 3 {
            return Err(CoreError::Dimension { required: 3, actual: self.grid.dim() });
        }
        Ok(())
    }
}

fn run_trials(
    params: &EstimateParams,
    f: impl Fn(u64) -> Result<Option<f64>, CoreError> + Sync,
) -> Result<Vec<Option<f64>>, CoreError> {
    let results: Vec<Result<Option<f64>, CoreError>> =
        (0..params.trials as u64).into_par_iter().map(&f).collect();
    results.into_iter().collect()
}

/// `L^1_t` quadrature of a spatial norm over `[0, T]`.
fn l1_time<F: FnMut(f64) -> Result<f64, CoreError>>(
    t_horizon: f64,
    nodes: usize,
    mut f: F,
) -> Result<f64, CoreError> {
    let (xs, ws) = gauss_legendre_on(nodes, 0.0, t_horizon);
    let mut acc = 0.0;
    for (x, w) in xs.iter().zip(&ws) {
        acc += w * f(*x)?;
    }
    Ok(acc)
}

/// Quintic product of propagated fields at one time.
fn quintic_product(fields: &[GridField; 5], t: f64) -> Result<GridField, CoreError> {
    let mut prod = fields[0].free_propagate(t);
    for f in &fields[1..] {
        prod = prod.mul(&f.free_propagate(t))?;
    }
    Ok(prod)
}

/// Multilinear estimate for the point interaction: the quintic product of
/// free flows in `L^1_t H^s` against the product of `H^{+-1}` norms; the
/// `H^{-1}` slot sits on the first field.
pub fn check_gp_multilinear(
    params: &EstimateParams,
    s: f64,
) -> Result<EstimateReport, CoreError> {
    params.validate()?;
    params.require_d3()?;
    assert!(s == 1.0 || s == -1.0, "the estimate is stated for s = +-1");
    let name = if s > 0.0 { "gp-h1" } else { "gp-hm1" };
    let ratios = run_trials(params, |trial| {
        let fields: [GridField; 5] =
            std::array::from_fn(|slot| trial_field(params.grid, params.seed, trial, slot as u64));
        let mut rhs = if s > 0.0 {
            1.0
        } else {
            fields[0].sobolev_norm(-1.0, true)?
        };
        for (slot, f) in fields.iter().enumerate() {
            if s < 0.0 && slot == 0 {
                continue;
            }
            rhs *= f.sobolev_norm(1.0, true)?;
        }
        if rhs == 0.0 {
            return Ok(None);
        }
        let lhs = l1_time(params.t_horizon, params.time_nodes, |t| {
            let prod = quintic_product(&fields, t)?;
            if s < 0.0 {
                prod.project_mean_zero().sobolev_norm(s, true)
            } else {
                prod.sobolev_norm(s, true)
            }
        })?;
        Ok(Some(lhs / rhs))
    })?;
    Ok(EstimateReport::from_trials(name, params.seed, ratios, params.base_params(&[])))
}

/// Product estimate `|fg|_{H^-1} <~ |f|_{W^{-1,6}} |g|_{W^{1,3/2}}`.
pub fn check_negative_sobolev_product(
    params: &EstimateParams,
) -> Result<EstimateReport, CoreError> {
    params.validate()?;
    params.require_d3()?;
    let ratios = run_trials(params, |trial| {
        let f = trial_field(params.grid, params.seed, trial, 0);
        let g = trial_field(params.grid, params.seed, trial, 1);
        let rhs = f.w_norm(-1.0, 6.0)? * g.w_norm(1.0, 1.5)?;
        if rhs == 0.0 {
            return Ok(None);
        }
        let lhs = f.mul(&g)?.project_mean_zero().sobolev_norm(-1.0, true)?;
        Ok(Some(lhs / rhs))
    })?;
    Ok(EstimateReport::from_trials("split", params.seed, ratios, params.base_params(&[])))
}

/// Multilinear Hartree estimates: one ensemble pass produces the
/// `H^{-1}` report for every distinguished slot `m = 1..5` plus the `H^1`
/// report (the left-hand sides are shared).
pub fn check_hartree_multilinear(
    params: &EstimateParams,
    potential: &Potential,
) -> Result<Vec<EstimateReport>, CoreError> {
    params.validate()?;
    params.require_d3()?;
    let p_exp = 1.0 / (1.0 - params.eps);
    let v_norm = potential.lp_norm(p_exp)?;
    let t_factor = params.t_horizon.powf(3.0 * params.eps);

    struct TrialOut {
        lhs_hm1: f64,
        lhs_h1: f64,
        h1_norms: [f64; 5],
        hm1_norms: [f64; 5],
    }

    let outs: Vec<Result<Option<TrialOut>, CoreError>> = (0..params.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let fields: [GridField; 5] = std::array::from_fn(|slot| {
                trial_field(params.grid, params.seed, trial, slot as u64)
            });
            let mut h1 = [0.0; 5];
            let mut hm1 = [0.0; 5];
            for (i, f) in fields.iter().enumerate() {
                h1[i] = f.sobolev_norm(1.0, true)?;
                hm1[i] = f.sobolev_norm(-1.0, true)?;
            }
            if h1.iter().any(|v| *v == 0.0) {
                return Ok(None);
            }
            let mut lhs_hm1 = 0.0;
            let mut lhs_h1 = 0.0;
            let (xs, ws) = gauss_legendre_on(params.time_nodes, 0.0, params.t_horizon);
            for (t, w) in xs.iter().zip(&ws) {
                let u: Vec<GridField> =
                    fields.iter().map(|f| f.free_propagate(*t)).collect();
                let p12 = u[0].mul(&u[1])?;
                let p34 = u[2].mul(&u[3])?;
                let a = trilinear_a(potential, &p12, &p34)?;
                let full = a.mul(&u[4])?;
                lhs_hm1 += w * full.project_mean_zero().sobolev_norm(-1.0, true)?;
                lhs_h1 += w * full.sobolev_norm(1.0, true)?;
            }
            Ok(Some(TrialOut { lhs_hm1, lhs_h1, h1_norms: h1, hm1_norms: hm1 }))
        })
        .collect();
    let outs: Vec<Option<TrialOut>> = outs.into_iter().collect::<Result<_, _>>()?;

    let extra =
        [("potential", potential.descriptor()), ("V_norm", fmt_f64(v_norm))];
    let mut reports = Vec::new();
    for m in 0..5usize {
        let ratios: Vec<Option<f64>> = outs
            .iter()
            .map(|o| {
                o.as_ref().and_then(|o| {
                    let mut rhs = t_factor * v_norm * o.hm1_norms[m];
                    for (i, h) in o.h1_norms.iter().enumerate() {
                        if i != m {
                            rhs *= h;
                        }
                    }
                    if rhs == 0.0 {
                        None
                    } else {
                        Some(o.lhs_hm1 / rhs)
                    }
                })
            })
            .collect();
        reports.push(EstimateReport::from_trials(
            &format!("hartree-hm1-m{}", m + 1),
            params.seed,
            ratios,
            params.base_params(&extra.clone().map(|(k, v)| (k, v))),
        ));
    }
    let ratios: Vec<Option<f64>> = outs
        .iter()
        .map(|o| {
            o.as_ref().and_then(|o| {
                let rhs = t_factor * v_norm * o.h1_norms.iter().product::<f64>();
                if rhs == 0.0 {
                    None
                } else {
                    Some(o.lhs_h1 / rhs)
                }
            })
        })
        .collect();
    reports.push(EstimateReport::from_trials(
        "hartree-h1",
        params.seed,
        ratios,
        params.base_params(&extra.map(|(k, v)| (k, v))),
    ));
    Ok(reports)
}

/// Validate the convolution-estimate exponent relation
/// `1/q + 2/p' = 1/s1 + 1/s2` with the stated windows (`p = 1` endpoint
/// allowed).
pub fn validate_beckner_exponents(p: f64, q: f64, s1: f64, s2: f64) -> Result<(), CoreError> {
    if p < 1.0 || q <= 1.0 || s1 <= 1.0 || s2 <= 1.0 {
        return Err(CoreError::ExponentRelation(format!(
            "exponents out of range: p={p} q={q} s1={s1} s2={s2}"
        )));
    }
    let p_prime = if p == 1.0 { f64::INFINITY } else { p / (p - 1.0) };
    let lhs = 1.0 / q + if p_prime.is_infinite() { 0.0 } else { 2.0 / p_prime };
    let rhs = 1.0 / s1 + 1.0 / s2;
    if (lhs - rhs).abs() > 1e-12 {
        return Err(CoreError::ExponentRelation(format!(
            "1/q + 2/p' = {lhs} but 1/s1 + 1/s2 = {rhs}"
        )));
    }
    if p > 1.0 {
        if p >= q {
            return Err(CoreError::ExponentRelation("need p < q".into()));
        }
        let q_prime = q / (q - 1.0);
        if p_prime / q_prime <= 2.0 {
            return Err(CoreError::ExponentRelation("need p'/q' > 2".into()));
        }
        for s in [s1, s2] {
            if s >= p_prime / q_prime {
                return Err(CoreError::ExponentRelation(
                    "need s_k < p'/q'".into(),
                ));
            }
        }
    }
    Ok(())
}

/// Convolution estimate `|A[V,f,g]|_q <= |V|_p |f|_{s1} |g|_{s2}`; at the
/// `p = 1` endpoint the constant is exactly one.
pub fn check_beckner(
    params: &EstimateParams,
    potential: &Potential,
    p: f64,
    q: f64,
    s1: f64,
    s2: f64,
) -> Result<EstimateReport, CoreError> {
    params.validate()?;
    validate_beckner_exponents(p, q, s1, s2)?;
    let v_norm = potential.lp_norm(p)?;
    let ratios = run_trials(params, |trial| {
        let f = trial_field(params.grid, params.seed, trial, 0);
        let g = trial_field(params.grid, params.seed, trial, 1);
        let rhs = v_norm * f.lp_norm(s1) * g.lp_norm(s2);
        if rhs == 0.0 {
            return Ok(None);
        }
        let lhs = trilinear_a(potential, &f, &g)?.lp_norm(q);
        Ok(Some(lhs / rhs))
    })?;
    let extra = [
        ("potential", potential.descriptor()),
        ("p", fmt_f64(p)),
        ("q", fmt_f64(q)),
        ("s1", fmt_f64(s1)),
        ("s2", fmt_f64(s2)),
    ];
    Ok(EstimateReport::from_trials(
        "beckner",
        params.seed,
        ratios,
        params.base_params(&extra.map(|(k, v)| (k, v))),
    ))
}

/// The closing bound: `|A[V,|phi|^2,|phi|^2] phi|_{H^-1}` against
/// `|V|_{L^1} |phi|_{H^1}^5` for `eps = 0` and
/// `|V|_{L^{1/(1-eps)}} |phi|_{H^1 inhomogeneous}^5` for `eps > 0`.
pub fn check_final_bound(
    params: &EstimateParams,
    potential: &Potential,
) -> Result<EstimateReport, CoreError> {
    params.validate()?;
    params.require_d3()?;
    let p_exp = 1.0 / (1.0 - params.eps);
    let v_norm = potential.lp_norm(p_exp)?;
    let eps = params.eps;
    let ratios = run_trials(params, |trial| {
        let phi = trial_field(params.grid, params.seed, trial, 0);
        let phi_norm = if eps == 0.0 {
            phi.sobolev_norm(1.0, true)?
        } else {
            phi.sobolev_norm(1.0, false)?
        };
        let rhs = v_norm * phi_norm.powi(5);
        if rhs == 0.0 {
            return Ok(None);
        }
        let density = phi.abs_sq();
        let a = trilinear_a(potential, &density, &density)?;
        let lhs = a.mul(&phi)?.project_mean_zero().sobolev_norm(-1.0, true)?;
        Ok(Some(lhs / rhs))
    })?;
    Ok(EstimateReport::from_trials(
        "final",
        params.seed,
        ratios,
        params.base_params(&[("potential", potential.descriptor())]),
    ))
}

/// Box-quadrature Gauss-Legendre nodes per time dimension used by the
/// induction check.
const INDUCTION_QUAD_ORDER: usize = 4;

/// Integrated norm pair of a subtree: `int |psi|_{H^s} |chi|_{H^1}` summed
/// over the kernel's terms, times over `[0, T]^{d}` for the subtree's own
/// vertices. The spine flag tracks whether the subtree contains the
/// deepest distinguished vertex (whose time doubles as the leaf base time).
fn subtree_norm_integral(
    tree: &TreeGraph,
    at: Child,
    s_exp: f64,
    t_horizon: f64,
    phi: &GridField,
    potential: &Potential,
) -> Result<f64, CoreError> {
    match at {
        Child::Leaf(_) => {
            let psi = if s_exp < 0.0 {
                phi.sobolev_norm(-1.0, true)?
            } else {
                phi.sobolev_norm(1.0, true)?
            };
            Ok(psi * phi.sobolev_norm(1.0, true)?)
        }
        Child::Internal(root) => {
            let mut vertices = Vec::new();
            collect_subtree(tree, root, &mut vertices);
            let deepest_global = tree.internals.last().map(|v| v.time_index);
            let contains_deepest =
                tree.distinguished && vertices.iter().any(|v| Some(*v) == deepest_global);
            let (xs, ws) = gauss_legendre_on(INDUCTION_QUAD_ORDER, 0.0, t_horizon);
            let dims = vertices.len();
            let mut assignment = vec![0usize; dims];
            let mut total = 0.0;
            loop {
                let mut weight = 1.0;
                let mut times = BTreeMap::new();
                for (slot, vertex) in vertices.iter().enumerate() {
                    times.insert(*vertex, xs[assignment[slot]]);
                    weight *= ws[assignment[slot]];
                }
                let base = if contains_deepest {
                    times[&deepest_global.unwrap()]
                } else {
                    0.0
                };
                let sub = subtree_graph(tree, root);
                let theta = theta_recursion(&sub, &times, base, phi, potential)?;
                let mut value = 0.0;
                for term in &theta.terms {
                    let psi = if s_exp < 0.0 {
                        term.psi.project_mean_zero().sobolev_norm(-1.0, true)?
                    } else {
                        term.psi.sobolev_norm(1.0, true)?
                    };
                    value += psi * term.chi.sobolev_norm(1.0, true)?;
                }
                total += weight * value;
                // odometer
                let mut i = 0;
                loop {
                    if i == dims {
                        return Ok(total);
                    }
                    assignment[i] += 1;
                    if assignment[i] < xs.len() {
                        break;
                    }
                    assignment[i] = 0;
                    i += 1;
                }
            }
        }
    }
}

fn collect_subtree(tree: &TreeGraph, root: usize, out: &mut Vec<usize>) {
    out.push(root);
    if let Some(v) = tree.vertex(root) {
        for c in v.children {
            if let Child::Internal(l) = c {
                collect_subtree(tree, l, out);
            }
        }
    }
}

/// The subtree rooted at `root` viewed as a tree of its own (distinguished
/// iff it contains the original deepest vertex).
fn subtree_graph(tree: &TreeGraph, root: usize) -> TreeGraph {
    let mut vertices = Vec::new();
    collect_subtree(tree, root, &mut vertices);
    vertices.sort_unstable();
    let deepest = tree.internals.last().map(|v| v.time_index);
    let internals: Vec<_> = tree
        .internals
        .iter()
        .filter(|v| vertices.contains(&v.time_index))
        .cloned()
        .collect();
    TreeGraph {
        root: tree.root,
        root_child: Child::Internal(root),
        distinguished: tree.distinguished && deepest.map(|d| vertices.contains(&d)).unwrap_or(false),
        internals,
    }
}

#[derive(Debug, Clone)]
pub struct InductionReport {
    pub vertex: usize,
    pub lhs: f64,
    pub rhs_product: f64,
    pub ratio: f64,
    pub calibrated_c: f64,
    pub holds: bool,
}

/// One step of the recursive bound at an internal vertex of the
/// distinguished tree: the integrated `H^{-1} x H^1` norm of the vertex
/// kernel against the triple product over the child subtrees, with the
/// `H^{-1}` factor on the child containing the deepest vertex. Needs a
/// constant calibrated from the single-step multilinear reports.
pub fn check_induction_step(
    tree: &TreeGraph,
    vertex: usize,
    t_horizon: f64,
    eps: f64,
    phi: &GridField,
    potential: &Potential,
    calibrated_c: Option<f64>,
) -> Result<InductionReport, CoreError> {
    let c = calibrated_c.ok_or(CoreError::CalibrationMissing)?;
    let v = tree
        .vertex(vertex)
        .ok_or(hierlab_combinatorics::CombinatoricsError::UnknownVertex(vertex))?;
    let p_exp = 1.0 / (1.0 - eps);
    let v_norm = potential.lp_norm(p_exp)?;
    let t_factor = t_horizon.powf(3.0 * eps);

    let lhs =
        subtree_norm_integral(tree, Child::Internal(vertex), -1.0, t_horizon, phi, potential)?;

    let deepest = tree.internals.last().map(|x| x.time_index).unwrap();
    let spine_child = v.children.iter().copied().find(|c| match c {
        Child::Internal(l) => {
            let mut vs = Vec::new();
            collect_subtree(tree, *l, &mut vs);
            vs.contains(&deepest)
        }
        Child::Leaf(_) => false,
    });
    // at the deepest vertex itself all children are leaves; one leaf takes
    // the H^{-1} slot
    let minus_child = spine_child.unwrap_or(v.children[2]);
    let mut rhs = 1.0;
    for child in v.children {
        let s = if child == minus_child { -1.0 } else { 1.0 };
        rhs *= subtree_norm_integral(tree, child, s, t_horizon, phi, potential)?;
    }
    let rhs_product = c * t_factor * v_norm * rhs;
    let ratio = if rhs_product == 0.0 { f64::INFINITY } else { lhs / rhs_product };
    Ok(InductionReport {
        vertex,
        lhs,
        rhs_product,
        ratio,
        calibrated_c: c,
        holds: lhs <= rhs_product,
    })
}

#[derive(Debug, Clone)]
pub struct ContractionDecay {
    pub bounds: Vec<f64>,
    pub step_ratio: f64,
    pub decreasing: bool,
    /// `eps = 0`: largest datum size `M` with geometric decay.
    pub m_star: Option<f64>,
    /// `eps > 0`: largest horizon `T` with geometric decay at the given `M`.
    pub t_star: Option<f64>,
}

/// Bound sequence of the final contraction argument:
/// `b_n = (C |V|)^n T M^{4(k+n)}` for `eps = 0` and
/// `b_n = (C T^{3 eps} |V|)^{n-1} |V| T M^{4(k+n)}` for `eps > 0`.
pub fn contraction_decay(
    k: usize,
    m_datum: f64,
    t_horizon: f64,
    eps: f64,
    v_norm: f64,
    c: f64,
    n_max: usize,
) -> ContractionDecay {
    let m4 = m_datum.powi(4);
    let mut bounds = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let b = if eps == 0.0 {
            (c * v_norm).powi(n as i32) * t_horizon * m_datum.powi(4 * (k + n) as i32)
        } else {
            (c * t_horizon.powf(3.0 * eps) * v_norm).powi(n as i32 - 1)
                * v_norm
                * t_horizon
                * m_datum.powi(4 * (k + n) as i32)
        };
        bounds.push(b);
    }
    let step_ratio = if eps == 0.0 {
        c * v_norm * m4
    } else {
        c * t_horizon.powf(3.0 * eps) * v_norm * m4
    };
    let decreasing = step_ratio < 1.0 && bounds.first().map(|b| *b > 0.0).unwrap_or(false);
    let m_star = if eps == 0.0 { Some((c * v_norm).powf(-0.25)) } else { None };
    let t_star = if eps > 0.0 {
        Some((1.0 / (c * v_norm * m4)).powf(1.0 / (3.0 * eps)))
    } else {
        None
    };
    ContractionDecay { bounds, step_ratio, decreasing, m_star, t_star }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::gaussian_field;
    use hierlab_combinatorics::{build_forest, CollisionMap};

    fn params(n: usize, trials: usize) -> EstimateParams {
        EstimateParams {
            grid: Grid::d3(n, 2.0 * std::f64::consts::PI * 8.0).unwrap(),
            t_horizon: 1.0,
            eps: 0.0,
            trials,
            seed: 7,
            time_nodes: 16,
        }
    }

    #[test]
    fn gp_reports_are_finite_and_deterministic() {
        let p = params(12, 6);
        let a = check_gp_multilinear(&p, -1.0).unwrap();
        assert!(a.ratio_max.is_finite() && a.ratio_max > 0.0);
        let b = check_gp_multilinear(&p, -1.0).unwrap();
        assert_eq!(a.render(), b.render());
        assert_eq!(a.name, "gp-hm1");
    }

    #[test]
    fn scaling_invariance_of_ratios() {
        // both sides share degree 5, so a common rescaling cancels;
        // checked by comparing two seeds whose fields differ by a scalar:
        // here directly on one trial
        let p = params(12, 3);
        let grid = p.grid;
        let fields: [GridField; 5] =
            std::array::from_fn(|s| gaussian_field(grid, p.seed, 2, s as u64));
        let ratio = |flds: &[GridField; 5]| -> f64 {
            let rhs = flds[0].sobolev_norm(-1.0, true).unwrap()
                * flds[1..]
                    .iter()
                    .map(|f| f.sobolev_norm(1.0, true).unwrap())
                    .product::<f64>();
            let lhs = l1_time(p.t_horizon, p.time_nodes, |t| {
                quintic_product(flds, t)?.project_mean_zero().sobolev_norm(-1.0, true)
            })
            .unwrap();
            lhs / rhs
        };
        let r1 = ratio(&fields);
        let scaled: [GridField; 5] =
            std::array::from_fn(|i| fields[i].scale(crate::grid::C64::new(3.0, 0.0)));
        let r2 = ratio(&scaled);
        assert!((r1 - r2).abs() <= 1e-10 * r1.abs());
    }

    #[test]
    fn hartree_delta_eps0_reduces_to_gp() {
        let p = params(12, 4);
        let reports = check_hartree_multilinear(&p, &Potential::delta(1.0)).unwrap();
        assert_eq!(reports.len(), 6);
        let gp = check_gp_multilinear(&p, -1.0).unwrap();
        let m1 = &reports[0];
        // same LHS and same RHS for slot 1 with |V|_1 = 1
        for (a, b) in m1.per_trial.iter().zip(&gp.per_trial) {
            match (a, b) {
                (Some(x), Some(y)) => assert!((x - y).abs() <= 1e-10 * x.abs()),
                (None, None) => {}
                other => panic!("mismatched discard pattern {other:?}"),
            }
        }
    }

    #[test]
    fn hartree_t_scaling_sanity() {
        // halving T with eps > 0 multiplies the T-factor by 2^{-3 eps}
        let mut p = params(12, 3);
        p.eps = 0.04;
        let bump = crate::ensemble::bump_field(p.grid, 0).abs_sq();
        let pot = Potential::Separable { v: bump.clone(), w: bump };
        let full = check_hartree_multilinear(&p, &pot).unwrap();
        let mut ph = p.clone();
        ph.t_horizon = 0.5;
        let half = check_hartree_multilinear(&ph, &pot).unwrap();
        // the reports exist and stay finite; the T-dependence enters the
        // RHS explicitly so ratios cannot blow up by more than the LHS's
        // own time-interval shrinkage
        for (a, b) in full.iter().zip(&half) {
            assert!(a.ratio_max.is_finite() && b.ratio_max.is_finite());
        }
    }

    #[test]
    fn beckner_p1_constant_is_one() {
        let mut p = params(12, 8);
        p.grid = Grid::d3(12, 2.0 * std::f64::consts::PI * 8.0).unwrap();
        let r = check_beckner(&p, &Potential::delta(1.0), 1.0, 3.0, 6.0, 6.0).unwrap();
        assert!(r.ratio_max <= 1.0 + 1e-6, "ratio {}", r.ratio_max);
        // separable potential too
        let bump = crate::ensemble::bump_field(p.grid, 1).abs_sq();
        let pot = Potential::Separable { v: bump.clone(), w: bump };
        let r2 = check_beckner(&p, &pot, 1.0, 3.0, 6.0, 6.0).unwrap();
        assert!(r2.ratio_max <= 1.0 + 1e-6, "ratio {}", r2.ratio_max);
    }

    #[test]
    fn beckner_exponent_validation() {
        assert!(validate_beckner_exponents(1.0, 3.0, 6.0, 6.0).is_ok());
        assert!(validate_beckner_exponents(1.0, 3.0, 6.0, 5.0).is_err());
        // p > 1 window: p'/q' must exceed 2 and s_k sit below it
        assert!(validate_beckner_exponents(1.2, 4.0, 3.0, 4.0).is_err());
    }

    #[test]
    fn final_bound_reports() {
        let p = params(12, 4);
        let r = check_final_bound(&p, &Potential::delta(1.0)).unwrap();
        assert!(r.ratio_max.is_finite() && r.ratio_max > 0.0);
    }

    #[test]
    fn induction_step_base_case() {
        let p = params(8, 1);
        let phi = gaussian_field(p.grid, 3, 2, 0);
        let map = CollisionMap::new(1, vec![1]).unwrap();
        let forest = build_forest(&map);
        let rep = check_induction_step(
            &forest.trees[0],
            1,
            0.5,
            0.0,
            &phi,
            &Potential::delta(1.0),
            Some(1e6),
        )
        .unwrap();
        assert!(rep.lhs.is_finite() && rep.lhs > 0.0);
        assert!(rep.holds);
        assert!(matches!(
            check_induction_step(
                &forest.trees[0],
                1,
                0.5,
                0.0,
                &phi,
                &Potential::delta(1.0),
                None
            ),
            Err(CoreError::CalibrationMissing)
        ));
    }

    #[test]
    fn contraction_decay_regimes() {
        // eps = 0, C|V|M^4 < 1: strictly decreasing
        let d = contraction_decay(1, 0.4, 1.0, 0.0, 1.0, 2.0, 8);
        assert!(d.decreasing);
        for w in d.bounds.windows(2) {
            assert!(w[1] < w[0]);
        }
        assert!((d.m_star.unwrap() - 2.0f64.powf(-0.25)).abs() < 1e-12);
        // M = 0 collapses everything
        let z = contraction_decay(1, 0.0, 1.0, 0.0, 1.0, 2.0, 4);
        assert!(z.bounds.iter().all(|b| *b == 0.0));
        // eps > 0 with C T^{3 eps} |V| = 1/2 and M = 1: ratio 1/2
        let c = 2.0;
        let eps = 0.1;
        let t = (0.5 / c).powf(1.0 / (3.0 * eps));
        let d2 = contraction_decay(1, 1.0, t, eps, 1.0, c, 6);
        assert!((d2.step_ratio - 0.5).abs() < 1e-12);
        for w in d2.bounds.windows(2) {
            let r = w[1] / w[0];
            assert!((r - 0.5).abs() < 1e-9, "ratio {r}");
        }
        assert!((d2.t_star.unwrap() - t).abs() < 1e-9);
    }
}
