use crate::error::{Error, Result};

/// An `n × p` matrix of finite reals; rows are observations, columns are coordinates.
///
/// Storage is column-major since every statistic in this crate works one
/// coordinate at a time.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    n: usize,
    p: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    /// Builds a matrix from column-major storage.
    pub fn from_columns_flat(n: usize, p: usize, values: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Validation(format!("need at least 2 rows, got {n}")));
        }
        if p < 1 {
            return Err(Error::Validation("need at least 1 column".into()));
        }
        if values.len() != n * p {
            return Err(Error::Validation(format!(
                "expected {} values for a {n}x{p} matrix, got {}",
                n * p,
                values.len()
            )));
        }
        if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "non-finite entry at row {}, column {}",
                idx % n + 1,
                idx / n + 1
            )));
        }
        Ok(Self { n, p, values })
    }

    /// Builds a matrix from a slice of rows, each of length `p`.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, |r| r.as_ref().len());
        for (i, row) in rows.iter().enumerate() {
            if row.as_ref().len() != p {
                return Err(Error::Validation(format!(
                    "row {} has {} columns, expected {p}",
                    i + 1,
                    row.as_ref().len()
                )));
            }
        }
        let mut values = vec![0.0; n * p];
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.as_ref().iter().enumerate() {
                values[j * n + i] = v;
            }
        }
        Self::from_columns_flat(n, p, values)
    }

    /// Builds a matrix from a list of columns of equal length.
    pub fn from_columns<C: AsRef<[f64]>>(columns: &[C]) -> Result<Self> {
        let p = columns.len();
        let n = columns.first().map_or(0, |c| c.as_ref().len());
        let mut values = Vec::with_capacity(n * p);
        for (j, col) in columns.iter().enumerate() {
            if col.as_ref().len() != n {
                return Err(Error::Validation(format!(
                    "column {} has {} rows, expected {n}",
                    j + 1,
                    col.as_ref().len()
                )));
            }
            values.extend_from_slice(col.as_ref());
        }
        Self::from_columns_flat(n, p, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.values[j * self.n..(j + 1) * self.n]
    }

    pub fn columns(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.n)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[col * self.n + row]
    }

    /// Applies `f` to every entry. The result is re-validated.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Result<Self> {
        Self::from_columns_flat(self.n, self.p, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Reorders columns so that column `j` of the result is column `order[j]` of `self`.
    pub fn permute_columns(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.p {
            return Err(Error::Validation("permutation length differs from p".into()));
        }
        let cols: Vec<&[f64]> = order.iter().map(|&j| self.column(j)).collect();
        Self::from_columns(&cols)
    }

    pub(crate) fn from_trusted(n: usize, p: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), n * p);
        Self { n, p, values }
    }
}
