//! Dense row-major matrices over an exact field.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{MaslovError, Result};
use crate::field::{Field, Scalar};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

/// Result of Gauss-Jordan elimination: the full-size reduced matrix and its pivot columns.
#[derive(Clone, Debug)]
pub struct Rref<F: Field> {
    pub reduced: Matrix<F>,
    pub pivots: Vec<usize>,
}

/// Elimination of one matrix, kept for repeated solves.
#[derive(Clone, Debug)]
pub struct Solver<F: Field> {
    cols: usize,
    pivots: Vec<usize>,
    /// Row operations `E` with `E·A` in reduced row-echelon form.
    ops: Matrix<F>,
}

impl<F: Field> Solver<F> {
    /// One solution of `A·x = b`, or `None` if inconsistent.
    pub fn solve(&self, b: &[F::Elem]) -> Option<Vec<F::Elem>> {
        let y = self.ops.mul_vec(b);
        let rank = self.pivots.len();
        if !y[rank..].iter().all(Scalar::is_zero) {
            return None;
        }
        let mut x = self.ops.field.zero_vec(self.cols);
        for (r, &pc) in self.pivots.iter().enumerate() {
            x[pc] = y[r].clone();
        }
        Some(x)
    }
}

impl<F: Field> Matrix<F> {
    pub fn new(field: &F, rows: usize, cols: usize, data: Vec<F::Elem>) -> Self {
        assert_eq!(rows * cols, data.len(), "entry grid does not match shape");
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data,
        }
    }

    pub fn zeros(field: &F, rows: usize, cols: usize) -> Self {
        Matrix::new(field, rows, cols, vec![field.zero(); rows * cols])
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = field.one();
        }
        m
    }

    /// Builds a matrix from row vectors; `cols` fixes the width when there are no rows.
    pub fn from_rows(field: &F, cols: usize, rows: &[Vec<F::Elem>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().cloned());
        }
        Matrix::new(field, rows.len(), cols, data)
    }

    pub fn from_i64(field: &F, rows: usize, cols: usize, entries: &[i64]) -> Self {
        Matrix::new(
            field,
            rows,
            cols,
            entries.iter().map(|&x| field.from_i64(x)).collect(),
        )
    }

    /// Matrix with columns given by `cols_vecs`.
    pub fn from_cols(field: &F, rows: usize, cols_vecs: &[Vec<F::Elem>]) -> Self {
        Matrix::from_rows(field, rows, cols_vecs).transpose()
    }

    pub fn random<R: rand::Rng + ?Sized>(field: &F, rows: usize, cols: usize, rng: &mut R) -> Self {
        Matrix::new(
            field,
            rows,
            cols,
            (0..rows * cols).map(|_| field.random(rng)).collect(),
        )
    }

    pub fn diagonal(field: &F, d: &[F::Elem]) -> Self {
        let mut m = Matrix::zeros(field, d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[F::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<F::Elem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<F::Elem> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)].clone());
            }
        }
        Matrix::new(&self.field, self.cols, self.rows, data)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn mul(&self, other: &Matrix<F>) -> Result<Self> {
        if self.cols != other.rows {
            return Err(MaslovError::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Matrix::zeros(&self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = out.data[idx].clone() + a.clone() * b.clone();
                }
            }
        }
        Ok(out)
    }

    /// Panicking product for internal use where shapes are known to agree.
    pub fn dot(&self, other: &Matrix<F>) -> Self {
        self.mul(other).expect("matrix shapes agree")
    }

    /// `self · v` for a column vector.
    pub fn mul_vec(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(v.len(), self.cols, "vector length");
        (0..self.rows)
            .map(|i| self.field.dot(self.row(i), v))
            .collect()
    }

    /// `vᵀ · self` for a row vector.
    pub fn vec_mul(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(v.len(), self.rows, "vector length");
        let mut out = self.field.zero_vec(self.cols);
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(self.row(i)) {
                *o = o.clone() + c.clone() * x.clone();
            }
        }
        out
    }

    /// The bilinear value `xᵀ · self · y`.
    pub fn bilinear(&self, x: &[F::Elem], y: &[F::Elem]) -> F::Elem {
        self.field.dot(x, &self.mul_vec(y))
    }

    fn zip_with(&self, other: &Matrix<F>, f: impl Fn(F::Elem, F::Elem) -> F::Elem) -> Self {
        assert_eq!(self.shape(), other.shape(), "shape mismatch");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| f(a.clone(), b.clone()))
            .collect();
        Matrix::new(&self.field, self.rows, self.cols, data)
    }

    pub fn add(&self, other: &Matrix<F>) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix<F>) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn neg(&self) -> Self {
        self.scale(&-self.field.one())
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let data = self.data.iter().map(|x| c.clone() * x.clone()).collect();
        Matrix::new(&self.field, self.rows, self.cols, data)
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let rows: Vec<_> = idx.iter().map(|&i| self.row(i).to_vec()).collect();
        Matrix::from_rows(&self.field, self.cols, &rows)
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        self.transpose().select_rows(idx).transpose()
    }

    /// Rows `r0..r1`, columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        let mut data = Vec::with_capacity((r1 - r0) * (c1 - c0));
        for i in r0..r1 {
            data.extend(self.row(i)[c0..c1].iter().cloned());
        }
        Matrix::new(&self.field, r1 - r0, c1 - c0, data)
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Matrix<F>) {
        assert!(r0 + b.rows <= self.rows && c0 + b.cols <= self.cols);
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)].clone();
            }
        }
    }

    pub fn vstack(&self, other: &Matrix<F>) -> Self {
        assert_eq!(self.cols, other.cols, "vstack width");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix::new(&self.field, self.rows + other.rows, self.cols, data)
    }

    pub fn hstack(&self, other: &Matrix<F>) -> Self {
        self.transpose().vstack(&other.transpose()).transpose()
    }

    /// Block matrix from a grid of blocks with consistent shapes.
    pub fn from_blocks(field: &F, grid: &[Vec<Matrix<F>>]) -> Self {
        let row_h: Vec<usize> = grid.iter().map(|r| r[0].rows).collect();
        let col_w: Vec<usize> = grid[0].iter().map(|b| b.cols).collect();
        let mut out = Matrix::zeros(field, row_h.iter().sum(), col_w.iter().sum());
        let mut r0 = 0;
        for (bi, brow) in grid.iter().enumerate() {
            let mut c0 = 0;
            for (bj, b) in brow.iter().enumerate() {
                assert_eq!(b.shape(), (row_h[bi], col_w[bj]), "block shape");
                out.set_block(r0, c0, b);
                c0 += col_w[bj];
            }
            r0 += row_h[bi];
        }
        out
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &Matrix<F>) -> Self {
        let mut out = Matrix::zeros(&self.field, self.rows + other.rows, self.cols + other.cols);
        out.set_block(0, 0, self);
        out.set_block(self.rows, self.cols, other);
        out
    }

    /// Gauss-Jordan elimination to canonical reduced row-echelon form.
    pub fn rref_full(&self) -> Rref<F> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, pr);
            let inv = m[(r, c)].inv().expect("pivot is nonzero");
            // the matrices met here are sparse, so only touch the pivot row's support
            let support: Vec<usize> = (c..m.cols).filter(|&j| !m[(r, j)].is_zero()).collect();
            for &j in &support {
                m[(r, j)] = inv.clone() * m[(r, j)].clone();
            }
            let prow: Vec<F::Elem> = support.iter().map(|&j| m[(r, j)].clone()).collect();
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for (&j, x) in support.iter().zip(&prow) {
                    let t = f.clone() * x.clone();
                    m[(i, j)] = m[(i, j)].clone() - t;
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { reduced: m, pivots }
    }

    /// Canonical RREF with zero rows dropped.
    pub fn rref(&self) -> Self {
        let Rref { reduced, pivots } = self.rref_full();
        reduced.block(0, pivots.len(), 0, self.cols)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref_full().pivots.len()
    }

    /// Basis of `{x : self·x = 0}` as rows, one per free column, in canonical form.
    pub fn kernel_basis(&self) -> Matrix<F> {
        let Rref { reduced, pivots } = self.rref_full();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let f = &self.field;
        let mut rows = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut v = f.zero_vec(self.cols);
            v[fc] = f.one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -reduced[(r, fc)].clone();
            }
            rows.push(v);
        }
        Matrix::from_rows(f, self.cols, &rows)
    }

    /// Basis of `{y : yᵀ·self = 0}` as rows.
    pub fn left_kernel_basis(&self) -> Matrix<F> {
        self.transpose().kernel_basis()
    }

    /// One solution of `self·x = b`, or `None` if inconsistent.
    pub fn solve(&self, b: &[F::Elem]) -> Option<Vec<F::Elem>> {
        assert_eq!(b.len(), self.rows, "right-hand side length");
        let f = &self.field;
        let aug = self.hstack(&Matrix::from_cols(f, self.rows, &[b.to_vec()]));
        let Rref { reduced, pivots } = aug.rref_full();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = f.zero_vec(self.cols);
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = reduced[(r, self.cols)].clone();
        }
        Some(x)
    }

    /// Solves `self·X = B` column by column.
    pub fn solve_matrix(&self, b: &Matrix<F>) -> Option<Matrix<F>> {
        let s = self.solver();
        let cols: Option<Vec<_>> = (0..b.cols).map(|j| s.solve(&b.col(j))).collect();
        Some(Matrix::from_cols(&self.field, self.cols, &cols?))
    }

    pub fn solver(&self) -> Solver<F> {
        let aug = self.hstack(&Matrix::identity(&self.field, self.rows));
        let Rref { reduced, pivots } = aug.rref_full();
        let pivots: Vec<usize> = pivots.into_iter().take_while(|&c| c < self.cols).collect();
        Solver {
            cols: self.cols,
            pivots,
            ops: reduced.block(0, self.rows, self.cols, self.cols + self.rows),
        }
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&Matrix::identity(&self.field, n));
        let Rref { reduced, pivots } = aug.rref_full();
        if n > 0 && (pivots.len() < n || pivots[n - 1] != n - 1) {
            return None;
        }
        Some(reduced.block(0, n, n, 2 * n))
    }

    pub fn det(&self) -> F::Elem {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let f = &self.field;
        let mut m = self.clone();
        let n = m.rows;
        let mut det = f.one();
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return f.zero();
            };
            if pr != c {
                m.swap_rows(c, pr);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det = det * piv.clone();
            let inv = piv.inv().expect("pivot is nonzero");
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let fct = m[(i, c)].clone() * inv.clone();
                for j in c..n {
                    let t = fct.clone() * m[(c, j)].clone();
                    m[(i, j)] = m[(i, j)].clone() - t;
                }
            }
        }
        det
    }

    /// The Gram matrix of a bilinear form restricted to the span of `basis` rows: `B·G·Bᵀ`.
    pub fn restrict_form(&self, basis: &Matrix<F>) -> Self {
        basis.dot(self).dot(&basis.transpose())
    }
}

impl<F: Field> Index<(usize, usize)> for Matrix<F> {
    type Output = F::Elem;
    fn index(&self, (i, j): (usize, usize)) -> &F::Elem {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &self.data[i * self.cols + j]
    }
}

impl<F: Field> IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F::Elem {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "] ({}x{})", self.rows, self.cols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    #[test]
    fn rref_drops_dependent_rows() {
        let f = PrimeField::new(5).unwrap();
        let m = Matrix::from_i64(&f, 2, 2, &[2, 4, 1, 2]);
        assert_eq!(m.rref(), Matrix::from_i64(&f, 1, 2, &[1, 2]));
        let id = Matrix::identity(&f, 3);
        assert_eq!(id.rref(), id);
        assert_eq!(Matrix::zeros(&f, 2, 3).rref().rows(), 0);
    }

    #[test]
    fn kernel_of_sum_functional() {
        let f = PrimeField::new(3).unwrap();
        let k = Matrix::from_i64(&f, 1, 2, &[1, 1]).kernel_basis();
        assert_eq!(k, Matrix::from_i64(&f, 1, 2, &[2, 1]));
        assert_eq!(Matrix::identity(&f, 3).kernel_basis().rows(), 0);
        assert_eq!(Matrix::zeros(&f, 2, 4).kernel_basis().rows(), 4);
    }

    #[test]
    fn inverse_det_and_solve() {
        let q = Rationals;
        let m = Matrix::from_i64(&q, 2, 2, &[2, 1, 1, 1]);
        assert_eq!(m.det(), q.from_i64(1));
        let inv = m.inverse().unwrap();
        assert_eq!(m.dot(&inv), Matrix::identity(&q, 2));
        let x = m.solve(&[q.from_i64(3), q.from_i64(2)]).unwrap();
        assert_eq!(x, vec![q.from_i64(1), q.from_i64(1)]);
        let sing = Matrix::from_i64(&q, 2, 2, &[1, 2, 2, 4]);
        assert!(sing.inverse().is_none());
        assert!(sing.solve(&[q.one(), q.zero()]).is_none());
        assert_eq!(sing.det(), q.zero());
    }

    #[test]
    fn det_sign_under_swap() {
        let f = PrimeField::new(7).unwrap();
        let m = Matrix::from_i64(&f, 2, 2, &[0, 1, 1, 0]);
        assert_eq!(m.det(), f.from_i64(-1));
    }

    #[test]
    fn blocks_and_stacks() {
        let f = PrimeField::new(5).unwrap();
        let a = Matrix::from_i64(&f, 1, 2, &[1, 2]);
        let b = Matrix::from_i64(&f, 1, 1, &[3]);
        let s = a.direct_sum(&b);
        assert_eq!(s, Matrix::from_i64(&f, 2, 3, &[1, 2, 0, 0, 0, 3]));
        assert_eq!(s.block(1, 2, 2, 3), b);
        assert_eq!(a.vstack(&a).rank(), 1);
        assert_eq!(a.hstack(&b), Matrix::from_i64(&f, 1, 3, &[1, 2, 3]));
    }
}
