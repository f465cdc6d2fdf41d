use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Dense real matrix stored in column-major order.
///
/// Element `(i, j)` lives at `data[i + j * rows]`.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::eye(n, n)
    }

    /// Rectangular identity: ones on the main diagonal, zeros elsewhere.
    pub fn eye(rows: usize, cols: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows.min(cols) {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Wraps a column-major buffer. Rejects wrong lengths and non-finite entries.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "buffer of length {} cannot hold a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                row: pos % rows.max(1),
                col: pos / rows.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from row slices; convenient for small literals.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == n), "ragged row literal");
        Self::from_fn(m, n, |i, j| rows[i][j])
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { 0.0 })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        self.as_mut().swap_cols(a, b);
    }

    pub fn as_ref(&self) -> MatRef<'_> {
        MatRef {
            data: &self.data,
            rows: self.rows,
            cols: self.cols,
            ld: self.rows.max(1),
        }
    }

    pub fn as_mut(&mut self) -> MatMut<'_> {
        let ld = self.rows.max(1);
        MatMut {
            data: &mut self.data,
            rows: self.rows,
            cols: self.cols,
            ld,
        }
    }

    /// Copies the block starting at `(r0, c0)` with shape `nr x nc`.
    pub fn submatrix(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Matrix {
        self.as_ref().sub(r0, c0, nr, nc).to_owned()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Plain product without flop accounting; used by checks and generators.
    pub fn matmul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matmul inner dimension");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        super::kernels::gemm(
            1.0,
            self.as_ref(),
            super::kernels::Trans::No,
            rhs.as_ref(),
            super::kernels::Trans::No,
            0.0,
            out.as_mut(),
            None,
        );
        out
    }

    /// `selfᵀ · rhs` without forming the transpose.
    pub fn t_matmul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.rows, rhs.rows, "t_matmul inner dimension");
        let mut out = Matrix::zeros(self.cols, rhs.cols);
        super::kernels::gemm(
            1.0,
            self.as_ref(),
            super::kernels::Trans::Yes,
            rhs.as_ref(),
            super::kernels::Trans::No,
            0.0,
            out.as_mut(),
            None,
        );
        out
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "sub shape");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Upper-trapezoidal part (entries below the diagonal zeroed).
    pub fn upper(&self) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            if i <= j {
                self[(i, j)]
            } else {
                0.0
            }
        })
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i + j * self.rows]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i + j * self.rows]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{:>12.5e} ", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Immutable strided view of a column-major block.
#[derive(Clone, Copy, Debug)]
pub struct MatRef<'a> {
    data: &'a [f64],
    rows: usize,
    cols: usize,
    ld: usize,
}

/// Mutable strided view of a column-major block.
#[derive(Debug)]
pub struct MatMut<'a> {
    data: &'a mut [f64],
    rows: usize,
    cols: usize,
    ld: usize,
}

#[inline]
fn block_range(r0: usize, c0: usize, nr: usize, nc: usize, ld: usize) -> (usize, usize) {
    if nr == 0 || nc == 0 {
        return (0, 0);
    }
    let start = r0 + c0 * ld;
    (start, start + (nc - 1) * ld + nr)
}

impl<'a> MatRef<'a> {
    /// View of `rows x cols` entries in `data` with leading dimension `ld`.
    pub fn from_slice(data: &'a [f64], rows: usize, cols: usize, ld: usize) -> Self {
        assert!(ld >= rows.max(1));
        let (_, end) = block_range(0, 0, rows, cols, ld);
        assert!(end <= data.len(), "slice too short for view");
        Self {
            data,
            rows,
            cols,
            ld,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i + j * self.ld]
    }

    #[inline]
    pub fn col(&self, j: usize) -> &'a [f64] {
        debug_assert!(j < self.cols);
        &self.data[j * self.ld..j * self.ld + self.rows]
    }

    pub fn sub(self, r0: usize, c0: usize, nr: usize, nc: usize) -> MatRef<'a> {
        assert!(
            r0 + nr <= self.rows && c0 + nc <= self.cols,
            "sub view out of bounds"
        );
        let (s, e) = block_range(r0, c0, nr, nc, self.ld);
        MatRef {
            data: &self.data[s..e],
            rows: nr,
            cols: nc,
            ld: self.ld,
        }
    }

    pub fn rows_from(self, r0: usize) -> MatRef<'a> {
        self.sub(r0, 0, self.rows - r0, self.cols)
    }

    pub fn cols_range(self, c0: usize, nc: usize) -> MatRef<'a> {
        self.sub(0, c0, self.rows, nc)
    }

    pub fn to_owned(&self) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j))
    }
}

impl<'a> MatMut<'a> {
    pub fn from_slice(data: &'a mut [f64], rows: usize, cols: usize, ld: usize) -> Self {
        assert!(ld >= rows.max(1));
        let (_, end) = block_range(0, 0, rows, cols, ld);
        assert!(end <= data.len(), "slice too short for view");
        Self {
            data,
            rows,
            cols,
            ld,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Reborrows as an immutable view.
    pub fn rb(&self) -> MatRef<'_> {
        MatRef {
            data: self.data,
            rows: self.rows,
            cols: self.cols,
            ld: self.ld,
        }
    }

    /// Reborrows mutably with a shorter lifetime.
    pub fn rb_mut(&mut self) -> MatMut<'_> {
        MatMut {
            data: self.data,
            rows: self.rows,
            cols: self.cols,
            ld: self.ld,
        }
    }

    pub fn into_ref(self) -> MatRef<'a> {
        MatRef {
            data: self.data,
            rows: self.rows,
            cols: self.cols,
            ld: self.ld,
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i + j * self.ld]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i + j * self.ld] = v;
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i + j * self.ld]
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.ld..j * self.ld + self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.ld..j * self.ld + self.rows]
    }

    pub fn sub_mut(self, r0: usize, c0: usize, nr: usize, nc: usize) -> MatMut<'a> {
        assert!(
            r0 + nr <= self.rows && c0 + nc <= self.cols,
            "sub view out of bounds"
        );
        let (s, e) = block_range(r0, c0, nr, nc, self.ld);
        MatMut {
            data: &mut self.data[s..e],
            rows: nr,
            cols: nc,
            ld: self.ld,
        }
    }

    pub fn rows_from(self, r0: usize) -> MatMut<'a> {
        let (rows, cols) = (self.rows, self.cols);
        self.sub_mut(r0, 0, rows - r0, cols)
    }

    /// Splits into columns `[0, c)` and `[c, cols)`.
    pub fn split_at_col(self, c: usize) -> (MatMut<'a>, MatMut<'a>) {
        assert!(c <= self.cols);
        let (rows, cols, ld) = (self.rows, self.cols, self.ld);
        if c == cols {
            return (
                self,
                MatMut {
                    data: &mut [],
                    rows,
                    cols: 0,
                    ld,
                },
            );
        }
        if c == 0 || rows == 0 {
            let at = (c * ld).min(self.data.len());
            let (l, r) = self.data.split_at_mut(at);
            return (
                MatMut {
                    data: l,
                    rows,
                    cols: c,
                    ld,
                },
                MatMut {
                    data: r,
                    rows,
                    cols: cols - c,
                    ld,
                },
            );
        }
        let (l, r) = self.data.split_at_mut(c * ld);
        (
            MatMut {
                data: l,
                rows,
                cols: c,
                ld,
            },
            MatMut {
                data: r,
                rows,
                cols: cols - c,
                ld,
            },
        )
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        assert!(a < self.cols && b < self.cols);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let ld = self.ld;
        let (head, tail) = self.data.split_at_mut(hi * ld);
        head[lo * ld..lo * ld + self.rows].swap_with_slice(&mut tail[..self.rows]);
    }

    pub fn fill(&mut self, v: f64) {
        for j in 0..self.cols {
            self.col_mut(j).fill(v);
        }
    }

    pub fn copy_from(&mut self, src: MatRef<'_>) {
        assert_eq!(
            (self.rows, self.cols),
            (src.rows(), src.cols()),
            "copy_from shape"
        );
        for j in 0..self.cols {
            self.col_mut(j).copy_from_slice(src.col(j));
        }
    }
}
