//! Exact reduced row echelon form over the rationals.

use num_traits::Zero;

use crate::rational::Rat;

pub struct Rref {
    /// Nonzero rows in reduced echelon form: each has a leading 1 in its
    /// pivot column and zeros in every other pivot column.
    pub rows: Vec<Vec<Rat>>,
    pub pivot_cols: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// Reduce `rows` (consumed) to RREF. Column count must be uniform.
pub fn rref(mut rows: Vec<Vec<Rat>>) -> Rref {
    let width = rows.first().map_or(0, |r| r.len());
    debug_assert!(rows.iter().all(|r| r.len() == width));
    let mut pivot_cols = Vec::new();
    let mut next_row = 0;
    for col in 0..width {
        let Some(src) = (next_row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(next_row, src);
        let inv = rows[next_row][col].recip();
        for v in rows[next_row].iter_mut() {
            *v *= &inv;
        }
        for r in 0..rows.len() {
            if r != next_row && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in 0..width {
                    let sub = &factor * &rows[next_row][c];
                    rows[r][c] -= sub;
                }
            }
        }
        pivot_cols.push(col);
        next_row += 1;
        if next_row == rows.len() {
            break;
        }
    }
    rows.truncate(next_row);
    Rref {
        rows,
        pivot_cols,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn rref_of_simple_system() {
        let rows = vec![
            vec![rat(2, 1), rat(4, 1), rat(6, 1)],
            vec![rat(1, 1), rat(1, 1), rat(1, 1)],
        ];
        let r = rref(rows);
        assert_eq!(r.rank(), 2);
        assert_eq!(r.pivot_cols, vec![0, 1]);
        assert_eq!(r.rows[0], vec![rat(1, 1), rat(0, 1), rat(-1, 1)]);
        assert_eq!(r.rows[1], vec![rat(0, 1), rat(1, 1), rat(2, 1)]);
    }

    #[test]
    fn dependent_rows_drop_out() {
        let rows = vec![
            vec![rat(1, 2), rat(1, 2)],
            vec![rat(1, 1), rat(1, 1)],
            vec![rat(3, 1), rat(3, 1)],
        ];
        let r = rref(rows);
        assert_eq!(r.rank(), 1);
        assert_eq!(r.pivot_cols, vec![0]);
    }
}
