use std::collections::BTreeMap;

use crate::scalar::Ring;

/// Coordinate-format matrix with entries kept in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<T> {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), T>,
}

impl<T: Ring> SparseMatrix<T> {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Adds `value` to entry `(row, col)`; entries that cancel to zero are removed.
    pub fn add(&mut self, row: usize, col: usize, value: T) {
        assert!(
            row < self.rows && col < self.cols,
            "entry ({row}, {col}) outside {}x{}",
            self.rows,
            self.cols
        );
        let slot = self.entries.entry((row, col)).or_insert_with(T::zero);
        *slot = slot.clone() + value;
        if slot.is_zero() {
            self.entries.remove(&(row, col));
        }
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.entries.get(&(row, col)).cloned().unwrap_or_else(T::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> SparseMatrix<U> {
        let mut out = SparseMatrix::new(self.rows, self.cols);
        for (r, c, v) in self.iter() {
            out.add(r, c, f(v));
        }
        out
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![T::zero(); self.rows];
        for (r, c, v) in self.iter() {
            y[r] = y[r].clone() + v.clone() * x[c].clone();
        }
        y
    }

    /// Keeps the listed rows and columns, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let row_pos: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let col_pos: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(j, &c)| (c, j)).collect();
        let mut out = SparseMatrix::new(rows.len(), cols.len());
        for (r, c, v) in self.iter() {
            if let (Some(&i), Some(&j)) = (row_pos.get(&r), col_pos.get(&c)) {
                out.add(i, j, v.clone());
            }
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut dense = vec![vec![T::zero(); self.cols]; self.rows];
        for (r, c, v) in self.iter() {
            dense[r][c] = v.clone();
        }
        dense
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && self.iter().all(|(r, c, v)| self.get(c, r) == *v)
    }
}
