//! Factorized one-particle kernels: signed sums of rank-one products
//! `c * chi(x) * conj(psi)(x')`, the contraction operator that glues three
//! of them into one, and the recursive kernel assigned to a contraction
//! tree. A factor is distinguished when it descends from the unpropagated
//! quintic product born at the deepest vertex of the distinguished tree.

use crate::error::CoreError;
use crate::grid::{GridField, C64};
use crate::potential::{trilinear_a, Potential};
use hierlab_combinatorics::{Child, TreeGraph};
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct KernelTerm {
    pub sign: i8,
    pub chi: GridField,
    pub psi: GridField,
    pub chi_distinguished: bool,
    pub psi_distinguished: bool,
}

impl KernelTerm {
    fn distinguished_count(&self) -> usize {
        self.chi_distinguished as usize + self.psi_distinguished as usize
    }
}

#[derive(Debug, Clone)]
pub struct FactorizedKernel {
    pub terms: Vec<KernelTerm>,
}

impl FactorizedKernel {
    /// The projector kernel `|phi><phi|`.
    pub fn rank_one(phi: &GridField) -> Self {
        FactorizedKernel {
            terms: vec![KernelTerm {
                sign: 1,
                chi: phi.clone(),
                psi: phi.clone(),
                chi_distinguished: false,
                psi_distinguished: false,
            }],
        }
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Free evolution `U(t)`: both factors propagate by `e^{i t Laplacian}`.
    pub fn propagate(&self, t: f64) -> FactorizedKernel {
        if t == 0.0 {
            return self.clone();
        }
        FactorizedKernel {
            terms: self
                .terms
                .iter()
                .map(|term| KernelTerm {
                    sign: term.sign,
                    chi: term.chi.free_propagate(t),
                    psi: term.psi.free_propagate(t),
                    chi_distinguished: term.chi_distinguished,
                    psi_distinguished: term.psi_distinguished,
                })
                .collect(),
        }
    }

    /// Multiply the kernel by a real scalar (absorbed into the chi factors).
    pub fn scale(&self, c: f64) -> FactorizedKernel {
        FactorizedKernel {
            terms: self
                .terms
                .iter()
                .map(|term| KernelTerm {
                    sign: term.sign,
                    chi: term.chi.scale(C64::new(c, 0.0)),
                    psi: term.psi.clone(),
                    chi_distinguished: term.chi_distinguished,
                    psi_distinguished: term.psi_distinguished,
                })
                .collect(),
        }
    }

    /// Triangle-inequality bound `sum_beta |chi|_{H^s} |psi|_{H^s}` for the
    /// weighted trace norm `Tr |R^{(1,s)} K|`.
    pub fn trace_bound(&self, s: f64) -> Result<f64, CoreError> {
        let mut sum = 0.0;
        for term in &self.terms {
            sum += term.chi.sobolev_norm(s, true)? * term.psi.sobolev_norm(s, true)?;
        }
        Ok(sum)
    }

    /// Kernel evaluated as a dense matrix `K[x, x']` (1-d oracle scale).
    pub fn densify(&self) -> Result<Vec<C64>, CoreError> {
        let grid = match self.terms.first() {
            None => return Err(CoreError::SizeCap("cannot densify an empty kernel".into())),
            Some(t) => *t.chi.grid(),
        };
        if grid.dim() != 1 {
            return Err(CoreError::Dimension { required: 1, actual: grid.dim() });
        }
        let n = grid.n();
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        for term in &self.terms {
            let s = C64::new(term.sign as f64, 0.0);
            let chi = term.chi.phys();
            let psi = term.psi.phys();
            for x in 0..n {
                let row = &mut out[x * n..(x + 1) * n];
                let cx = s * chi[x];
                for (xp, v) in row.iter_mut().enumerate() {
                    *v += cx * psi[xp].conj();
                }
            }
        }
        Ok(out)
    }

    pub fn max_distinguished_per_term(&self) -> usize {
        self.terms.iter().map(|t| t.distinguished_count()).max().unwrap_or(0)
    }

    pub fn chi_flag_count(&self) -> usize {
        self.terms.iter().filter(|t| t.chi_distinguished).count()
    }

    pub fn psi_flag_count(&self) -> usize {
        self.terms.iter().filter(|t| t.psi_distinguished).count()
    }
}

/// Contract three factorized kernels: slot 0 continues the particle line,
/// slots 1 and 2 are consumed. Every input term triple yields one term
/// attaching the sextic product at `x` and one (opposite sign) attaching it
/// at `x'`; at most one of the six entering factors may be distinguished.
pub fn contract_b(
    k0: &FactorizedKernel,
    k1: &FactorizedKernel,
    k2: &FactorizedKernel,
    potential: &Potential,
) -> Result<FactorizedKernel, CoreError> {
    let mut terms = Vec::with_capacity(2 * k0.terms.len() * k1.terms.len() * k2.terms.len());
    for t0 in &k0.terms {
        for t1 in &k1.terms {
            for t2 in &k2.terms {
                let entering = t0.distinguished_count()
                    + t1.distinguished_count()
                    + t2.distinguished_count();
                if entering > 1 {
                    return Err(CoreError::DistinguishedCollision);
                }
                let mid_distinguished = t1.distinguished_count() + t2.distinguished_count() > 0;
                let prod1 = t1.chi.mul(&t1.psi.conj())?;
                let prod2 = t2.chi.mul(&t2.psi.conj())?;
                let a = trilinear_a(potential, &prod1, &prod2)?;
                let sign = t0.sign * t1.sign * t2.sign;
                terms.push(KernelTerm {
                    sign,
                    chi: t0.chi.mul(&a)?,
                    psi: t0.psi.clone(),
                    chi_distinguished: t0.chi_distinguished || mid_distinguished,
                    psi_distinguished: t0.psi_distinguished,
                });
                terms.push(KernelTerm {
                    sign: -sign,
                    chi: t0.chi.clone(),
                    psi: t0.psi.mul(&a.conj())?,
                    chi_distinguished: t0.chi_distinguished,
                    psi_distinguished: t0.psi_distinguished || mid_distinguished,
                });
            }
        }
    }
    Ok(FactorizedKernel { terms })
}

/// Kernel of a contraction tree, built bottom-up: leaves carry
/// `|phi><phi|` at the base time, each internal vertex free-propagates its
/// children by the time gaps and contracts them. The deepest vertex of the
/// distinguished tree acts at the base time itself; its unpropagated
/// quintic outputs are marked distinguished.
pub fn theta_recursion(
    tree: &TreeGraph,
    times: &BTreeMap<usize, f64>,
    base_time: f64,
    phi: &GridField,
    potential: &Potential,
) -> Result<FactorizedKernel, CoreError> {
    let deepest = tree.internals.last().map(|v| v.time_index);
    match tree.root_child {
        Child::Leaf(_) => Ok(FactorizedKernel::rank_one(phi)),
        Child::Internal(l) => theta_at(tree, l, times, base_time, phi, potential, deepest),
    }
}

#[allow(clippy::too_many_arguments)]
fn theta_at(
    tree: &TreeGraph,
    vertex: usize,
    times: &BTreeMap<usize, f64>,
    base_time: f64,
    phi: &GridField,
    potential: &Potential,
    deepest: Option<usize>,
) -> Result<FactorizedKernel, CoreError> {
    let v = tree
        .vertex(vertex)
        .ok_or(hierlab_combinatorics::CombinatoricsError::UnknownVertex(vertex))?;
    let t_here = *times.get(&vertex).ok_or(CoreError::MissingTime(vertex))?;
    let mut inputs = Vec::with_capacity(3);
    for child in v.children {
        let (kernel, t_child) = match child {
            Child::Leaf(_) => (FactorizedKernel::rank_one(phi), base_time),
            Child::Internal(l) => {
                let t_child = *times.get(&l).ok_or(CoreError::MissingTime(l))?;
                (theta_at(tree, l, times, base_time, phi, potential, deepest)?, t_child)
            }
        };
        inputs.push(kernel.propagate(t_here - t_child));
    }
    let mut out = contract_b(&inputs[0], &inputs[1], &inputs[2], potential)?;
    if tree.distinguished && Some(vertex) == deepest {
        // the unpropagated quintic product born here: one term carries it
        // on the chi side, the other on the psi side
        debug_assert_eq!(out.terms.len(), 2);
        out.terms[0].chi_distinguished = true;
        out.terms[1].psi_distinguished = true;
    }
    Ok(out)
}
