use crate::error::CombinatoricsError;
use crate::maps::CollisionMap;

/// The `(k + 2n - 1) x n` operator matrix attached to a collision map.
///
/// Column `c` (1-based) holds the operators `B_{i; k+2c-1, k+2c}` for rows
/// `i <= k + 2(c-1)` and structural zeros below; the highlighted row of
/// column `c` is the map's target. `time_row[c-1]` is the original time
/// index whose variable is currently attached to column `c` (identity for a
/// freshly built board, permuted after moves).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoardMatrix {
    k: usize,
    targets: Vec<usize>,
    time_row: Vec<usize>,
}

impl BoardMatrix {
    pub fn from_map(map: &CollisionMap) -> Self {
        BoardMatrix {
            k: map.k(),
            targets: map.targets().to_vec(),
            time_row: (1..=map.n()).collect(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.targets.len()
    }

    pub fn rows(&self) -> usize {
        self.k + 2 * self.n() - 1
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn time_row(&self) -> &[usize] {
        &self.time_row
    }

    pub fn highlight(&self, column: usize) -> usize {
        self.targets[column - 1]
    }

    /// Structural zeros sit in rows that did not exist when the column acted.
    pub fn is_structural_zero(&self, row: usize, column: usize) -> bool {
        row > self.k + 2 * (column - 1)
    }

    /// Operator label at `(row, column)`, `None` for structural zeros.
    pub fn entry(&self, row: usize, column: usize) -> Option<String> {
        if self.is_structural_zero(row, column) {
            None
        } else {
            let s = self.k + 2 * column - 1;
            Some(format!("B_{{{};{},{}}}", row, s, s + 1))
        }
    }

    pub fn map(&self) -> CollisionMap {
        CollisionMap::new(self.k, self.targets.clone()).expect("board holds a valid map")
    }

    /// Swap adjacent columns `l`, `l+1` (1-based), relabelling the two
    /// created pairs in all later columns and transposing the attached time
    /// variables. Requires the columns to be independent: column `l+1` must
    /// not hit a line created by column `l`. Self-inverse.
    pub fn swap_columns(&self, l: usize) -> Result<BoardMatrix, CombinatoricsError> {
        let n = self.n();
        if l < 1 || l >= n {
            return Err(CombinatoricsError::IllegalMove {
                column: l,
                reason: format!("column index out of range 1..{}", n),
            });
        }
        let (lo, hi) = (self.k + 2 * l - 1, self.k + 2 * l);
        let right = self.targets[l];
        if right == lo || right == hi {
            return Err(CombinatoricsError::IllegalMove {
                column: l,
                reason: format!("column {} hits particle {} created by column {}", l + 1, right, l),
            });
        }
        let mut targets = self.targets.clone();
        targets.swap(l - 1, l);
        // the pair created by the old column l is renamed to the later slot
        // and vice versa, wherever later columns reference it
        for t in targets.iter_mut().skip(l + 1) {
            *t = match *t {
                x if x == lo => lo + 2,
                x if x == hi => hi + 2,
                x if x == lo + 2 => lo,
                x if x == hi + 2 => hi,
                x => x,
            };
        }
        let mut time_row = self.time_row.clone();
        time_row.swap(l - 1, l);
        Ok(BoardMatrix { k: self.k, targets, time_row })
    }

    /// The board-game move in its reducing direction: additionally requires
    /// the strict descent `targets[l+1] < targets[l]`.
    pub fn acceptable_move(&self, l: usize) -> Result<BoardMatrix, CombinatoricsError> {
        let n = self.n();
        if l < 1 || l >= n {
            return Err(CombinatoricsError::IllegalMove {
                column: l,
                reason: format!("column index out of range 1..{}", n),
            });
        }
        let (lo, hi) = (self.k + 2 * l - 1, self.k + 2 * l);
        let right = self.targets[l];
        if right == lo || right == hi {
            return Err(CombinatoricsError::IllegalMove {
                column: l,
                reason: format!("column {} hits particle {} created by column {}", l + 1, right, l),
            });
        }
        if right >= self.targets[l - 1] {
            return Err(CombinatoricsError::IllegalMove {
                column: l,
                reason: format!(
                    "targets not descending across columns {}, {} ({} >= {})",
                    l,
                    l + 1,
                    right,
                    self.targets[l - 1]
                ),
            });
        }
        self.swap_columns(l)
    }

    /// Text rendering in the style of the worked-example matrix.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> =
            self.time_row.iter().map(|t| format!("t{}", t)).collect();
        out.push_str(&format!("      {}\n", header.join("  ")));
        for row in 1..=self.rows() {
            let mut cells = Vec::new();
            for col in 1..=self.n() {
                match self.entry(row, col) {
                    None => cells.push("0".to_string()),
                    Some(label) => {
                        if self.highlight(col) == row {
                            cells.push(format!("[{label}]"));
                        } else {
                            cells.push(label);
                        }
                    }
                }
            }
            out.push_str(&format!("r{:<3} {}\n", row, cells.join("  ")));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(k: usize, t: &[usize]) -> CollisionMap {
        CollisionMap::new(k, t.to_vec()).unwrap()
    }

    #[test]
    fn board_shape_matches_worked_example() {
        // k = 2, targets [1,2,4,4] is the worked 9 x 4 matrix
        let b = BoardMatrix::from_map(&map(2, &[1, 2, 4, 4]));
        assert_eq!(b.rows(), 9);
        assert_eq!(b.n(), 4);
        assert_eq!(b.highlight(1), 1);
        assert_eq!(b.highlight(2), 2);
        assert_eq!(b.highlight(3), 4);
        assert_eq!(b.highlight(4), 4);
        // structural zeros: column 1 has zeros below row 2, column 2 below row 4
        assert!(b.is_structural_zero(3, 1));
        assert!(!b.is_structural_zero(4, 2));
        assert!(b.is_structural_zero(5, 2));
        assert_eq!(b.entry(1, 1).unwrap(), "B_{1;3,4}");
        assert_eq!(b.entry(4, 3).unwrap(), "B_{4;7,8}");
    }

    #[test]
    fn trivial_board_k1() {
        let b = BoardMatrix::from_map(&map(1, &[1]));
        assert_eq!(b.rows(), 2);
        assert_eq!(b.highlight(1), 1);
    }

    #[test]
    fn move_swaps_and_relabels() {
        // spec example: k=1, [1,3,2], move at column 2 -> [1,2,3], time row 1,3,2
        let b = BoardMatrix::from_map(&map(1, &[1, 3, 2]));
        let moved = b.acceptable_move(2).unwrap();
        assert_eq!(moved.targets(), &[1, 2, 3]);
        assert_eq!(moved.time_row(), &[1, 3, 2]);
    }

    #[test]
    fn relabel_touches_created_pairs() {
        // k=2, [2,1,3]: moving columns 1,2 renames pair {3,4} <-> {5,6} in column 3
        let b = BoardMatrix::from_map(&map(2, &[2, 1, 3]));
        let moved = b.acceptable_move(1).unwrap();
        assert_eq!(moved.targets(), &[1, 2, 5]);
        assert_eq!(moved.time_row(), &[2, 1, 3]);
    }

    #[test]
    fn swap_is_involution() {
        let b = BoardMatrix::from_map(&map(2, &[2, 1, 3]));
        let twice = b.swap_columns(1).unwrap().swap_columns(1).unwrap();
        assert_eq!(twice, b);
    }

    #[test]
    fn move_rejects_created_particle_hit() {
        // k=1: column 2 hits particle 2 = k+2*1-1, created by column 1
        let b = BoardMatrix::from_map(&map(1, &[1, 2]));
        assert!(matches!(
            b.acceptable_move(1),
            Err(CombinatoricsError::IllegalMove { .. })
        ));
        assert!(b.swap_columns(1).is_err());
    }

    #[test]
    fn move_rejects_ascending_targets() {
        let b = BoardMatrix::from_map(&map(2, &[1, 2]));
        assert!(matches!(
            b.acceptable_move(1),
            Err(CombinatoricsError::IllegalMove { .. })
        ));
        // but the raw swap is allowed: the columns are independent
        assert!(b.swap_columns(1).is_ok());
    }
}
