//! Symmetric bilinear spaces, possibly degenerate, and quotient charts.

use crate::error::{MaslovError, Result};
use crate::field::{Field, Scalar};
use crate::matrix::{Matrix, Solver};
use crate::subspace::Subspace;

/// A coordinate space `F^d` with a symmetric Gram matrix; the radical is kept exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearSpace<F: Field> {
    pub gram: Matrix<F>,
    pub radical: Subspace<F>,
}

impl<F: Field> BilinearSpace<F> {
    pub fn new(gram: Matrix<F>) -> Result<Self> {
        if !gram.is_symmetric() {
            return Err(MaslovError::precondition("Gram matrix is not symmetric"));
        }
        let radical = Subspace::kernel(&gram);
        Ok(BilinearSpace { gram, radical })
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn field(&self) -> &F {
        self.gram.field()
    }

    pub fn is_degenerate(&self) -> bool {
        !self.radical.is_zero()
    }

    /// The non-degenerate quotient by the radical, realized on a complement.
    pub fn nondegenerate_part(&self) -> (QuadraticSpace<F>, QuotientChart<F>) {
        let f = self.field();
        let full = Subspace::full(f, self.dim());
        let chart = QuotientChart::new(&full, &self.radical).expect("radical is a subspace");
        let q = QuadraticSpace::new(self.gram.restrict_form(&chart.reps))
            .expect("form on a complement of the radical is non-degenerate");
        (q, chart)
    }
}

/// A non-degenerate symmetric bilinear space, with `det(gram)` kept as a certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticSpace<F: Field> {
    pub gram: Matrix<F>,
    pub det: F::Elem,
}

impl<F: Field> QuadraticSpace<F> {
    pub fn new(gram: Matrix<F>) -> Result<Self> {
        if !gram.is_symmetric() {
            return Err(MaslovError::precondition("Gram matrix is not symmetric"));
        }
        let det = gram.det();
        if det.is_zero() {
            return Err(MaslovError::precondition("Gram matrix is degenerate"));
        }
        Ok(QuadraticSpace { gram, det })
    }

    pub fn zero(field: &F) -> Self {
        QuadraticSpace {
            gram: Matrix::zeros(field, 0, 0),
            det: field.one(),
        }
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn field(&self) -> &F {
        self.gram.field()
    }

    pub fn negate(&self) -> Self {
        QuadraticSpace::new(self.gram.neg()).expect("negation preserves non-degeneracy")
    }

    pub fn orthogonal_sum(&self, other: &QuadraticSpace<F>) -> Self {
        QuadraticSpace::new(self.gram.direct_sum(&other.gram)).expect("sum of non-degenerate forms")
    }

    pub fn hyperbolic(field: &F, planes: usize) -> Self {
        let mut g = Matrix::zeros(field, 2 * planes, 2 * planes);
        for k in 0..planes {
            g[(2 * k, 2 * k + 1)] = field.one();
            g[(2 * k + 1, 2 * k)] = field.one();
        }
        QuadraticSpace::new(g).expect("hyperbolic form is non-degenerate")
    }
}

/// Coordinates on `outer / sub` through a fixed set of representatives.
#[derive(Clone, Debug)]
pub struct QuotientChart<F: Field> {
    /// Representatives whose classes form a basis of the quotient, as rows.
    pub reps: Matrix<F>,
    /// Basis of the subspace divided out.
    pub sub: Matrix<F>,
    solver: Solver<F>,
}

impl<F: Field> QuotientChart<F> {
    pub fn new(outer: &Subspace<F>, sub: &Subspace<F>) -> Result<Self> {
        let reps = sub.quotient_reps(outer)?;
        let reps = Matrix::from_rows(outer.field(), outer.ambient_dim(), &reps);
        Ok(QuotientChart::from_parts(reps, sub.basis().clone()))
    }

    /// Representatives `reps` must be independent modulo `sub`.
    pub fn from_parts(reps: Matrix<F>, sub: Matrix<F>) -> Self {
        let solver = reps.vstack(&sub).transpose().solver();
        QuotientChart { reps, sub, solver }
    }

    pub fn dim(&self) -> usize {
        self.reps.rows()
    }

    /// Coordinates of the class of `v`; `None` if `v` is outside `span(reps) + sub`.
    pub fn project(&self, v: &[F::Elem]) -> Option<Vec<F::Elem>> {
        let x = self.solver.solve(v)?;
        Some(x[..self.dim()].to_vec())
    }

    /// The representative with the given quotient coordinates.
    pub fn lift(&self, c: &[F::Elem]) -> Vec<F::Elem> {
        self.reps.vec_mul(c)
    }

    /// Matrix of the projection restricted to the rows of `vs` (one output row per input row).
    pub fn project_rows(&self, vs: &Matrix<F>) -> Option<Matrix<F>> {
        let rows: Option<Vec<_>> = vs.row_vecs().iter().map(|v| self.project(v)).collect();
        Some(Matrix::from_rows(self.reps.field(), self.dim(), &rows?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;

    #[test]
    fn radical_is_exact_kernel() {
        let f = PrimeField::new(5).unwrap();
        let g = Matrix::from_i64(&f, 3, 3, &[1, 1, 0, 1, 1, 0, 0, 0, 2]);
        let b = BilinearSpace::new(g).unwrap();
        assert_eq!(b.radical.dim(), 1);
        let (q, chart) = b.nondegenerate_part();
        assert_eq!(q.dim(), 2);
        assert_eq!(chart.dim(), 2);
        assert!(BilinearSpace::new(Matrix::from_i64(&f, 2, 2, &[0, 1, 0, 0])).is_err());
    }

    #[test]
    fn quadratic_space_rejects_degenerate() {
        let f = PrimeField::new(3).unwrap();
        assert!(QuadraticSpace::new(Matrix::from_i64(&f, 2, 2, &[1, 1, 1, 1])).is_err());
        let h = QuadraticSpace::hyperbolic(&f, 2);
        assert_eq!(h.dim(), 4);
        assert_eq!(h.det, f.one());
    }

    #[test]
    fn chart_projects_modulo_subspace() {
        let f = PrimeField::new(7).unwrap();
        let full = Subspace::full(&f, 3);
        let sub = Subspace::span(&f, 3, &[vec![f.one(), f.one(), f.zero()]]);
        let chart = QuotientChart::new(&full, &sub).unwrap();
        let v = vec![f.from_i64(3), f.from_i64(3), f.zero()];
        assert_eq!(chart.project(&v).unwrap(), f.zero_vec(2));
        let w = vec![f.from_i64(1), f.from_i64(2), f.from_i64(5)];
        let back = chart.lift(&chart.project(&w).unwrap());
        assert!(sub.contains(&crate::field::vec_sub(&w, &back)).unwrap());
    }
}
