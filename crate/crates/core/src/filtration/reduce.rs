//! Z/2 column reduction on sparse columns stored as sorted row-index lists.

pub(crate) const NONE: u32 = u32::MAX;

/// Replaces `col` with the symmetric difference `col Δ other`.
pub(crate) fn add_column(col: &mut Vec<u32>, other: &[u32], scratch: &mut Vec<u32>) {
    scratch.clear();
    let (mut i, mut j) = (0, 0);
    while i < col.len() && j < other.len() {
        match col[i].cmp(&other[j]) {
            std::cmp::Ordering::Less => {
                scratch.push(col[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                scratch.push(other[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    scratch.extend_from_slice(&col[i..]);
    scratch.extend_from_slice(&other[j..]);
    std::mem::swap(col, scratch);
}

/// Reduction state shared by one pass over a boundary matrix.
///
/// `owner[row]` is the column whose reduced form has its lowest entry at
/// `row`; `reduced[row]` stores that reduced column.
pub(crate) struct Reducer {
    pub owner: Vec<u32>,
    reduced: Vec<Vec<u32>>,
    scratch: Vec<u32>,
}

impl Reducer {
    pub fn new(rows: usize) -> Self {
        Self { owner: vec![NONE; rows], reduced: vec![Vec::new(); rows], scratch: Vec::new() }
    }

    /// Reduces `col` (owned by column `index`) against the stored columns.
    /// Returns its pivot row, or `None` if it reduced to zero.
    pub fn reduce(&mut self, index: u32, mut col: Vec<u32>) -> Option<u32> {
        while let Some(&low) = col.last() {
            if self.owner[low as usize] == NONE {
                self.owner[low as usize] = index;
                self.reduced[low as usize] = col;
                return Some(low);
            }
            let other = std::mem::take(&mut self.reduced[low as usize]);
            add_column(&mut col, &other, &mut self.scratch);
            self.reduced[low as usize] = other;
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_difference() {
        let mut a = vec![1, 3, 5, 9];
        let mut s = Vec::new();
        add_column(&mut a, &[3, 4, 9, 12], &mut s);
        assert_eq!(a, vec![1, 4, 5, 12]);
    }

    #[test]
    fn triangle_boundary_reduces() {
        // rows: vertices 0,1,2; columns: edges 01, 12, 02
        let mut r = Reducer::new(3);
        assert_eq!(r.reduce(3, vec![0, 1]), Some(1));
        assert_eq!(r.reduce(4, vec![1, 2]), Some(2));
        assert_eq!(r.reduce(5, vec![0, 2]), None);
    }
}
