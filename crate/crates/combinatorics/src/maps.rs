use crate::error::CombinatoricsError;
use num_bigint::BigUint;

/// Default cap on the number of maps an exhaustive enumeration may produce.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

/// A collision map for `k` external particles and `n` expansion levels.
///
/// `targets[l]` (0-based `l`) is the particle line hit by the contraction at
/// level `l + 1`, which then creates the fresh pair `(k + 2l + 1, k + 2l + 2)`
/// (1-based line indices). Only the values at the contraction sites are
/// stored; the even-site values of the underlying map are never used.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CollisionMap {
    k: usize,
    targets: Vec<usize>,
}

impl CollisionMap {
    pub fn new(k: usize, targets: Vec<usize>) -> Result<Self, CombinatoricsError> {
        if k == 0 {
            return Err(CombinatoricsError::InvalidMap("k must be >= 1".into()));
        }
        if targets.is_empty() {
            return Err(CombinatoricsError::InvalidMap("n must be >= 1".into()));
        }
        for (l, &t) in targets.iter().enumerate() {
            let bound = k + 2 * l;
            if t < 1 || t > bound {
                return Err(CombinatoricsError::InvalidMap(format!(
                    "target {} at level {} outside 1..={}",
                    t,
                    l + 1,
                    bound
                )));
            }
        }
        Ok(CollisionMap { k, targets })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.targets.len()
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    /// Lines created by the level-`l` contraction (1-based `l`).
    pub fn created_pair(&self, l: usize) -> (usize, usize) {
        let s = self.k + 2 * l - 1;
        (s, s + 1)
    }

    /// Total particle lines at the bottom of the expansion.
    pub fn total_lines(&self) -> usize {
        self.k + 2 * self.n()
    }

    pub fn is_echelon(&self) -> bool {
        self.targets.windows(2).all(|w| w[0] <= w[1])
    }
}

impl std::fmt::Display for CollisionMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.targets.iter().map(|t| t.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Closed-form count `k (k+2) (k+4) ... (k+2n-2)` of collision maps.
pub fn count_maps(k: usize, n: usize) -> BigUint {
    let mut acc = BigUint::from(1u32);
    for l in 0..n {
        acc *= BigUint::from(k + 2 * l);
    }
    acc
}

/// All collision maps for `(k, n)` in lexicographic order of targets.
pub fn enumerate_maps(
    k: usize,
    n: usize,
    cap: u64,
) -> Result<Vec<CollisionMap>, CombinatoricsError> {
    let count = count_maps(k, n);
    if count > BigUint::from(cap) {
        let approx: u128 = count.try_into().unwrap_or(u128::MAX);
        return Err(CombinatoricsError::CapExceeded { k, n, count: approx, cap });
    }
    let mut out = Vec::new();
    let mut targets = vec![1usize; n];
    loop {
        out.push(CollisionMap { k, targets: targets.clone() });
        // odometer increment, rightmost fastest
        let mut l = n;
        loop {
            if l == 0 {
                return Ok(out);
            }
            l -= 1;
            let bound = k + 2 * l;
            if targets[l] < bound {
                targets[l] += 1;
                for t in targets.iter_mut().skip(l + 1) {
                    *t = 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_matches_examples() {
        assert_eq!(count_maps(1, 2), BigUint::from(3u32));
        assert_eq!(count_maps(2, 1), BigUint::from(2u32));
        assert_eq!(count_maps(2, 4), BigUint::from(384u32));
    }

    #[test]
    fn enumerate_k1_n2() {
        let maps = enumerate_maps(1, 2, DEFAULT_ENUMERATION_CAP).unwrap();
        let t: Vec<&[usize]> = maps.iter().map(|m| m.targets()).collect();
        assert_eq!(t, vec![&[1, 1][..], &[1, 2][..], &[1, 3][..]]);
    }

    #[test]
    fn enumerate_k2_n1() {
        let maps = enumerate_maps(2, 1, DEFAULT_ENUMERATION_CAP).unwrap();
        let t: Vec<&[usize]> = maps.iter().map(|m| m.targets()).collect();
        assert_eq!(t, vec![&[1][..], &[2][..]]);
    }

    #[test]
    fn enumeration_length_matches_count() {
        for k in 1..=3 {
            for n in 1..=4 {
                let maps = enumerate_maps(k, n, DEFAULT_ENUMERATION_CAP).unwrap();
                assert_eq!(BigUint::from(maps.len()), count_maps(k, n), "k={k} n={n}");
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let err = enumerate_maps(2, 4, 100).unwrap_err();
        match err {
            CombinatoricsError::CapExceeded { count, .. } => assert_eq!(count, 384),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn invalid_target_rejected() {
        assert!(CollisionMap::new(1, vec![2]).is_err());
        assert!(CollisionMap::new(1, vec![1, 4]).is_err());
        assert!(CollisionMap::new(1, vec![1, 3]).is_ok());
    }
}
