use crate::error::CombinatoricsError;
use crate::maps::CollisionMap;
use std::collections::BTreeMap;

/// A child slot of an internal vertex: either a later contraction vertex
/// (named by its global time index) or a leaf (named by its particle line).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Child {
    Internal(usize),
    Leaf(usize),
}

/// Internal vertex `v_l`: the level-`l` contraction.
///
/// `children` is kept in line order: slot 0 continues the hit line (the
/// contraction output lives there), slots 1 and 2 follow the two created
/// lines. The kernel contraction is symmetric in slots 1 and 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InternalVertex {
    pub time_index: usize,
    pub target: usize,
    pub created: (usize, usize),
    pub children: [Child; 3],
}

/// One contraction tree: root `W_j`, ternary internal vertices, leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeGraph {
    pub root: usize,
    /// Root's unique child: first vertex hitting the root line, or the leaf
    /// `u_root` when the line is never hit.
    pub root_child: Child,
    /// Internal vertices in increasing time order.
    pub internals: Vec<InternalVertex>,
    /// True iff the tree owns the deepest vertex `v_n`.
    pub distinguished: bool,
}

impl TreeGraph {
    pub fn m(&self) -> usize {
        self.internals.len()
    }

    pub fn vertex(&self, time_index: usize) -> Option<&InternalVertex> {
        self.internals.iter().find(|v| v.time_index == time_index)
    }

    /// All leaf particle indices of the tree, ascending.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        if let Child::Leaf(u) = self.root_child {
            out.push(u);
        }
        for v in &self.internals {
            for c in v.children {
                if let Child::Leaf(u) = c {
                    out.push(u);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Particle lines owned by the tree (root line plus created pairs).
    pub fn lines(&self) -> Vec<usize> {
        let mut out = vec![self.root];
        for v in &self.internals {
            out.push(v.created.0);
            out.push(v.created.1);
        }
        out.sort_unstable();
        out
    }

    /// Global time indices owned by the tree, ascending.
    pub fn time_labels(&self) -> Vec<usize> {
        self.internals.iter().map(|v| v.time_index).collect()
    }

    /// Children reordered by local label (internals by time, then leaves by
    /// particle index): the `(kappa_-, kappa, kappa_+)` triple.
    pub fn kappa_order(&self, time_index: usize) -> Result<[Child; 3], CombinatoricsError> {
        let v = self
            .vertex(time_index)
            .ok_or(CombinatoricsError::UnknownVertex(time_index))?;
        let mut cs = v.children;
        cs.sort_by_key(|c| match *c {
            Child::Internal(l) => (0, l),
            Child::Leaf(u) => (1, u),
        });
        Ok(cs)
    }

    /// Number of internal vertices in the subtree rooted at a vertex or leaf.
    pub fn subtree_internal_count(&self, at: Child) -> Result<usize, CombinatoricsError> {
        match at {
            Child::Leaf(u) => {
                if self.leaves().contains(&u) {
                    Ok(0)
                } else {
                    Err(CombinatoricsError::UnknownVertex(u))
                }
            }
            Child::Internal(l) => {
                let v = self.vertex(l).ok_or(CombinatoricsError::UnknownVertex(l))?;
                let mut count = 1;
                for c in v.children {
                    if let Child::Internal(_) = c {
                        count += self.subtree_internal_count(c)?;
                    }
                }
                Ok(count)
            }
        }
    }

    /// Time indices on the path from the root's child down to the deepest
    /// vertex (the one creating the unpropagated quintic factor), empty for
    /// a regular tree. Every kernel term carrying a distinguished factor
    /// lives on this spine.
    pub fn distinguished_spine(&self) -> Vec<usize> {
        if !self.distinguished || self.internals.is_empty() {
            return Vec::new();
        }
        let deepest = self.internals.last().expect("nonempty").time_index;
        let mut path = vec![deepest];
        'up: loop {
            let cur = *path.last().unwrap();
            if Child::Internal(cur) == self.root_child {
                break;
            }
            for v in &self.internals {
                if v.children.contains(&Child::Internal(cur)) {
                    path.push(v.time_index);
                    continue 'up;
                }
            }
            break;
        }
        path.reverse();
        path
    }
}

/// The forest of `k` disjoint trees attached to a collision map.
#[derive(Debug, Clone)]
pub struct Forest {
    pub k: usize,
    pub n: usize,
    pub trees: Vec<TreeGraph>,
    /// `vertex_assignment[l-1]` = index of the tree owning vertex `v_l`.
    pub vertex_assignment: Vec<usize>,
}

impl Forest {
    pub fn distinguished_index(&self) -> usize {
        self.trees.iter().position(|t| t.distinguished).expect("one distinguished tree")
    }
}

#[derive(Debug, Clone, Copy)]
enum OpenEnd {
    Root(usize),
    Slot { vertex: usize, slot: usize },
}

/// Build the contraction forest of a collision map.
///
/// Each vertex attaches to the most recent toucher of its target line (the
/// root when the line was never hit), and its three child slots follow the
/// target line and the two created lines; slots never claimed by a later
/// contraction end in leaves.
pub fn build_forest(map: &CollisionMap) -> Forest {
    let k = map.k();
    let n = map.n();
    let mut open: BTreeMap<usize, OpenEnd> = (1..=k).map(|j| (j, OpenEnd::Root(j))).collect();
    let mut line_tree: BTreeMap<usize, usize> = (1..=k).map(|j| (j, j - 1)).collect();
    let mut verts: Vec<InternalVertex> = Vec::with_capacity(n);
    let mut root_child: Vec<Child> = (1..=k).map(Child::Leaf).collect();
    let mut vertex_assignment = Vec::with_capacity(n);

    for l in 1..=n {
        let j = map.targets()[l - 1];
        let (s1, s2) = map.created_pair(l);
        match open[&j] {
            OpenEnd::Root(r) => root_child[r - 1] = Child::Internal(l),
            OpenEnd::Slot { vertex, slot } => verts[vertex - 1].children[slot] = Child::Internal(l),
        }
        verts.push(InternalVertex {
            time_index: l,
            target: j,
            created: (s1, s2),
            children: [Child::Leaf(j), Child::Leaf(s1), Child::Leaf(s2)],
        });
        open.insert(j, OpenEnd::Slot { vertex: l, slot: 0 });
        open.insert(s1, OpenEnd::Slot { vertex: l, slot: 1 });
        open.insert(s2, OpenEnd::Slot { vertex: l, slot: 2 });
        let tree = line_tree[&j];
        line_tree.insert(s1, tree);
        line_tree.insert(s2, tree);
        vertex_assignment.push(tree);
    }

    let distinguished_tree = *vertex_assignment.last().unwrap_or(&0);
    let trees = (0..k)
        .map(|ti| {
            let internals: Vec<InternalVertex> = verts
                .iter()
                .enumerate()
                .filter(|(i, _)| vertex_assignment[*i] == ti)
                .map(|(_, v)| v.clone())
                .collect();
            TreeGraph {
                root: ti + 1,
                root_child: root_child[ti],
                internals,
                distinguished: if n == 0 { ti == 0 } else { ti == distinguished_tree },
            }
        })
        .collect();

    Forest { k, n, trees, vertex_assignment }
}

/// One-particle data extracted from a tree by renumbering its particle
/// lines `1..=2m+1` in increasing global order. The local map `sigma`
/// reproduces the tree when fed back through `build_forest` with `k = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelabeledKernelSpec {
    pub m: usize,
    /// Global time indices, increasing; the distinguished tree owns `n`.
    pub time_labels: Vec<usize>,
    /// `sigma[a]` = local line hit by the tree's `(a+1)`-th contraction,
    /// i.e. the value `sigma_j(2(a+1))` of the relabelled map.
    pub sigma: Vec<usize>,
    pub distinguished: bool,
}

impl RelabeledKernelSpec {
    /// View the relabelled data as a one-particle collision map.
    pub fn as_map(&self) -> Option<CollisionMap> {
        if self.m == 0 {
            None
        } else {
            Some(CollisionMap::new(1, self.sigma.clone()).expect("local map is valid"))
        }
    }
}

/// Renumber a tree's particle lines and express its contractions locally.
pub fn relabel(tree: &TreeGraph) -> RelabeledKernelSpec {
    let lines = tree.lines();
    let local: BTreeMap<usize, usize> =
        lines.iter().enumerate().map(|(i, &g)| (g, i + 1)).collect();
    let sigma = tree.internals.iter().map(|v| local[&v.target]).collect();
    RelabeledKernelSpec {
        m: tree.m(),
        time_labels: tree.time_labels(),
        sigma,
        distinguished: tree.distinguished,
    }
}

/// Internal-vertex count of the subtree rooted at `at`.
pub fn subtree_internal_count(tree: &TreeGraph, at: Child) -> Result<usize, CombinatoricsError> {
    tree.subtree_internal_count(at)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{enumerate_maps, DEFAULT_ENUMERATION_CAP};

    fn map(k: usize, t: &[usize]) -> CollisionMap {
        CollisionMap::new(k, t.to_vec()).unwrap()
    }

    #[test]
    fn worked_example_forest() {
        let f = build_forest(&map(2, &[1, 2, 4, 4]));
        assert_eq!(f.trees.len(), 2);
        let t1 = &f.trees[0];
        let t2 = &f.trees[1];
        assert!(t1.distinguished);
        assert!(!t2.distinguished);
        assert_eq!(t1.time_labels(), vec![1, 3, 4]);
        assert_eq!(t2.time_labels(), vec![2]);
        assert_eq!(t1.leaves(), vec![1, 3, 4, 7, 8, 9, 10]);
        assert_eq!(t2.leaves(), vec![2, 5, 6]);
        assert_eq!(f.vertex_assignment, vec![0, 1, 0, 0]);
        // v1 children: u1, u3 and v3 along line 4
        let v1 = t1.vertex(1).unwrap();
        assert_eq!(v1.children, [Child::Leaf(1), Child::Leaf(3), Child::Internal(3)]);
        let v3 = t1.vertex(3).unwrap();
        assert_eq!(v3.children, [Child::Internal(4), Child::Leaf(7), Child::Leaf(8)]);
        let v4 = t1.vertex(4).unwrap();
        assert_eq!(v4.children, [Child::Leaf(4), Child::Leaf(9), Child::Leaf(10)]);
    }

    #[test]
    fn worked_example_relabel() {
        let f = build_forest(&map(2, &[1, 2, 4, 4]));
        let s1 = relabel(&f.trees[0]);
        assert_eq!(s1.m, 3);
        assert_eq!(s1.sigma, vec![1, 3, 3]);
        assert!(s1.distinguished);
        assert_eq!(s1.time_labels, vec![1, 3, 4]);
        let s2 = relabel(&f.trees[1]);
        assert_eq!(s2.m, 1);
        assert_eq!(s2.sigma, vec![1]);
        assert!(!s2.distinguished);
    }

    #[test]
    fn smallest_tree() {
        let f = build_forest(&map(1, &[1]));
        let t = &f.trees[0];
        assert_eq!(t.root_child, Child::Internal(1));
        let v1 = t.vertex(1).unwrap();
        assert_eq!(v1.children, [Child::Leaf(1), Child::Leaf(2), Child::Leaf(3)]);
    }

    #[test]
    fn bare_root_tree() {
        let f = build_forest(&map(2, &[1]));
        assert_eq!(f.trees[0].leaves(), vec![1, 3, 4]);
        assert!(f.trees[0].distinguished);
        let t2 = &f.trees[1];
        assert_eq!(t2.m(), 0);
        assert_eq!(t2.root_child, Child::Leaf(2));
        assert_eq!(t2.leaves(), vec![2]);
        let s2 = relabel(t2);
        assert_eq!(s2.m, 0);
        assert!(s2.sigma.is_empty());
        assert!(s2.time_labels.is_empty());
    }

    #[test]
    fn forest_invariants_exhaustive() {
        for k in 1..=2 {
            for n in 1..=4 {
                for m in enumerate_maps(k, n, DEFAULT_ENUMERATION_CAP).unwrap() {
                    let f = build_forest(&m);
                    let total_m: usize = f.trees.iter().map(|t| t.m()).sum();
                    assert_eq!(total_m, n);
                    let total_leaves: usize = f.trees.iter().map(|t| t.leaves().len()).sum();
                    assert_eq!(total_leaves, k + 2 * n);
                    assert_eq!(f.trees.iter().filter(|t| t.distinguished).count(), 1);
                    for t in &f.trees {
                        assert_eq!(t.leaves().len(), 2 * t.m() + 1);
                        if t.distinguished {
                            assert_eq!(*t.time_labels().last().unwrap_or(&n), n);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn subtree_counts() {
        let f = build_forest(&map(2, &[1, 2, 4, 4]));
        let t1 = &f.trees[0];
        assert_eq!(t1.subtree_internal_count(Child::Internal(1)).unwrap(), 3);
        assert_eq!(t1.subtree_internal_count(Child::Internal(3)).unwrap(), 2);
        assert_eq!(t1.subtree_internal_count(Child::Internal(4)).unwrap(), 1);
        assert_eq!(t1.subtree_internal_count(Child::Leaf(7)).unwrap(), 0);
        assert!(t1.subtree_internal_count(Child::Internal(2)).is_err());
    }

    #[test]
    fn relabel_build_stability() {
        // rebuilding a forest from the relabelled one-particle map gives a
        // tree with the same shape (local sigma and subtree counts)
        for k in 1..=2 {
            for n in 1..=4 {
                for m in enumerate_maps(k, n, DEFAULT_ENUMERATION_CAP).unwrap() {
                    let f = build_forest(&m);
                    for t in &f.trees {
                        let spec = relabel(t);
                        let Some(local_map) = spec.as_map() else { continue };
                        let g = build_forest(&local_map);
                        assert_eq!(g.trees.len(), 1);
                        let back = relabel(&g.trees[0]);
                        assert_eq!(back.sigma, spec.sigma);
                        assert_eq!(back.m, spec.m);
                    }
                }
            }
        }
    }

    #[test]
    fn kappa_order_sorts_internals_first() {
        let f = build_forest(&map(2, &[1, 2, 4, 4]));
        let t1 = &f.trees[0];
        assert_eq!(
            t1.kappa_order(1).unwrap(),
            [Child::Internal(3), Child::Leaf(1), Child::Leaf(3)]
        );
    }

    #[test]
    fn spine_reaches_deepest_vertex() {
        let f = build_forest(&map(2, &[1, 2, 4, 4]));
        assert_eq!(f.trees[0].distinguished_spine(), vec![1, 3, 4]);
        assert!(f.trees[1].distinguished_spine().is_empty());
        let g = build_forest(&map(1, &[1, 1, 2]));
        // v3 hits line 2 (created by v1): spine 1 -> 3; v2 is off-spine
        assert_eq!(g.trees[0].distinguished_spine(), vec![1, 3]);
    }
}
