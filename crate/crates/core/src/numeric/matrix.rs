use alloc::vec::Vec;

/// Row-major dense matrix that grows one row at a time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DenseMatrix {
    ncols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Empty matrix with `ncols` columns and no rows.
    pub fn new(ncols: usize) -> Self {
        Self { ncols, data: Vec::new() }
    }

    pub fn from_rows(ncols: usize, rows: &[Vec<f64>]) -> Self {
        let mut m = Self::new(ncols);
        for r in rows {
            m.push_row(r);
        }
        m
    }

    pub fn nrows(&self) -> usize {
        if self.ncols == 0 {
            0
        } else {
            self.data.len() / self.ncols
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Appends a row. Panics if its length differs from `ncols`.
    pub fn push_row(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.ncols, "row length must equal column count");
        self.data.extend_from_slice(row);
    }

    /// Appends a zero row and returns it for in-place filling.
    pub fn push_zero_row(&mut self) -> &mut [f64] {
        let start = self.data.len();
        self.data.resize(start + self.ncols, 0.0);
        &mut self.data[start..]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.ncols.max(1)).take(self.nrows())
    }
}
