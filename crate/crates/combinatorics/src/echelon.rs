use crate::board::BoardMatrix;
use crate::error::CombinatoricsError;
use crate::maps::{enumerate_maps, CollisionMap};
use std::collections::BTreeMap;

/// Record of one reduction: the columns moved, in order, and the final
/// assignment of original time variables to the representative's columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveTrace {
    /// Column indices passed to `acceptable_move`, in application order.
    pub moves: Vec<usize>,
    /// `time_row[c-1]` = original time index attached to representative
    /// column `c` after all moves (identity when no move was needed).
    pub time_row: Vec<usize>,
}

impl MoveTrace {
    pub fn is_identity(&self) -> bool {
        self.moves.is_empty()
    }

    /// Representative columns ordered from the largest attached time to the
    /// smallest: entry `i` is the column whose time variable is the
    /// `(i+1)`-th largest on the image of the ordered simplex.
    pub fn time_chain(&self) -> TimeChain {
        let n = self.time_row.len();
        let mut chain = vec![0usize; n];
        for (col0, &orig) in self.time_row.iter().enumerate() {
            chain[orig - 1] = col0 + 1;
        }
        TimeChain { chain }
    }
}

/// Image of the ordered simplex `{t_n <= ... <= t_1 <= t}` under a member's
/// accumulated time permutation, described as a total order on the
/// representative's column variables: `s_{chain[0]} >= s_{chain[1]} >= ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeChain {
    pub chain: Vec<usize>,
}

impl TimeChain {
    pub fn n(&self) -> usize {
        self.chain.len()
    }

    pub fn is_identity(&self) -> bool {
        self.chain.iter().enumerate().all(|(i, &c)| c == i + 1)
    }

    /// Reorder simplex-ordered values (largest first) into column slots.
    pub fn place(&self, descending: &[f64]) -> Vec<f64> {
        assert_eq!(descending.len(), self.chain.len());
        let mut out = vec![0.0; descending.len()];
        for (rank, &col) in self.chain.iter().enumerate() {
            out[col - 1] = descending[rank];
        }
        out
    }
}

/// One equivalence class: a special upper-echelon representative together
/// with every map that reduces to it and the recorded reduction traces.
#[derive(Debug, Clone)]
pub struct EchelonClass {
    pub representative: CollisionMap,
    pub members: Vec<(CollisionMap, MoveTrace)>,
}

impl EchelonClass {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Time-domain realization: one chain per member, describing the image
    /// of the ordered simplex under that member's accumulated permutation.
    pub fn time_domains(&self) -> Vec<TimeChain> {
        self.members.iter().map(|(_, tr)| tr.time_chain()).collect()
    }
}

/// Reduce a map to special upper-echelon form (non-decreasing targets).
///
/// Strategy: repeatedly select the leftmost column holding the minimal
/// target among the unfixed columns and bubble it left with acceptable
/// moves. Each move swaps strictly descending neighbours, so every applied
/// move is legal, and the relabelled values in later columns always exceed
/// the already-fixed prefix, so the result is non-decreasing.
pub fn reduce_to_echelon(
    map: &CollisionMap,
) -> Result<(CollisionMap, MoveTrace), CombinatoricsError> {
    let n = map.n();
    let guard = n * n + 1;
    let mut board = BoardMatrix::from_map(map);
    let mut moves = Vec::new();
    for fixed in 0..n {
        let (mut pos, _) = board
            .targets()
            .iter()
            .enumerate()
            .skip(fixed)
            .min_by_key(|(i, &t)| (t, *i))
            .expect("nonempty suffix");
        while pos > fixed {
            board = board.acceptable_move(pos)?;
            moves.push(pos);
            pos -= 1;
            if moves.len() > guard {
                return Err(CombinatoricsError::ReductionStuck(guard));
            }
        }
    }
    debug_assert!(board.map().is_echelon());
    let trace = MoveTrace { moves, time_row: board.time_row().to_vec() };
    Ok((board.map(), trace))
}

/// Partition all of `M_{k,n}` into echelon classes.
pub fn partition_classes(
    k: usize,
    n: usize,
    cap: u64,
) -> Result<Vec<EchelonClass>, CombinatoricsError> {
    let maps = enumerate_maps(k, n, cap)?;
    let mut classes: BTreeMap<CollisionMap, Vec<(CollisionMap, MoveTrace)>> = BTreeMap::new();
    for m in maps {
        let (rep, trace) = reduce_to_echelon(&m)?;
        classes.entry(rep).or_default().push((m, trace));
    }
    Ok(classes
        .into_iter()
        .map(|(representative, members)| EchelonClass { representative, members })
        .collect())
}
