//! Linear subspaces of `F^d` held in canonical reduced row-echelon form.

use crate::error::{MaslovError, Result};
use crate::field::{vec_is_zero, Field, Scalar};
use crate::matrix::Matrix;

/// A subspace of `F^ambient`. The basis rows are in canonical RREF, so two
/// subspaces are equal as sets iff they compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace<F: Field> {
    ambient: usize,
    basis: Matrix<F>,
    pivots: Vec<usize>,
}

impl<F: Field> Subspace<F> {
    /// The span of the rows of `m`.
    pub fn row_space(m: &Matrix<F>) -> Self {
        let r = m.rref_full();
        let basis = r.reduced.block(0, r.pivots.len(), 0, m.cols());
        Subspace {
            ambient: m.cols(),
            basis,
            pivots: r.pivots,
        }
    }

    pub fn span(field: &F, ambient: usize, vectors: &[Vec<F::Elem>]) -> Self {
        Subspace::row_space(&Matrix::from_rows(field, ambient, vectors))
    }

    pub fn zero(field: &F, ambient: usize) -> Self {
        Subspace::row_space(&Matrix::zeros(field, 0, ambient))
    }

    pub fn full(field: &F, ambient: usize) -> Self {
        Subspace::row_space(&Matrix::identity(field, ambient))
    }

    /// `{x : m·x = 0}`.
    pub fn kernel(m: &Matrix<F>) -> Self {
        Subspace::row_space(&m.kernel_basis())
    }

    pub fn field(&self) -> &F {
        self.basis.field()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_zero(&self) -> bool {
        self.pivots.is_empty()
    }

    /// Canonical basis, one row per dimension.
    pub fn basis(&self) -> &Matrix<F> {
        &self.basis
    }

    pub fn basis_vecs(&self) -> Vec<Vec<F::Elem>> {
        self.basis.row_vecs()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn check_ambient(&self, n: usize) -> Result<()> {
        if n == self.ambient {
            Ok(())
        } else {
            Err(MaslovError::DimensionMismatch {
                expected: self.ambient,
                got: n,
            })
        }
    }

    /// `v` minus its component along the basis; zero exactly when `v` lies in the subspace.
    /// The result vanishes at every pivot column, so it is a canonical coset representative.
    pub fn reduce(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        let mut out = v.to_vec();
        for (k, &pc) in self.pivots.iter().enumerate() {
            let c = out[pc].clone();
            if c.is_zero() {
                continue;
            }
            for (o, b) in out.iter_mut().zip(self.basis.row(k)) {
                *o = o.clone() - c.clone() * b.clone();
            }
        }
        out
    }

    pub fn contains(&self, v: &[F::Elem]) -> Result<bool> {
        self.check_ambient(v.len())?;
        Ok(vec_is_zero(&self.reduce(v)))
    }

    pub fn contains_subspace(&self, other: &Subspace<F>) -> Result<bool> {
        self.check_ambient(other.ambient)?;
        for v in other.basis.row_vecs() {
            if !self.contains(&v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Coordinates of `v` in the canonical basis.
    pub fn coordinates(&self, v: &[F::Elem]) -> Result<Vec<F::Elem>> {
        self.check_ambient(v.len())?;
        if !vec_is_zero(&self.reduce(v)) {
            return Err(MaslovError::NotContained(
                "vector is not in the subspace".into(),
            ));
        }
        Ok(self.pivots.iter().map(|&pc| v[pc].clone()).collect())
    }

    /// The vector with the given coordinates in the canonical basis.
    pub fn from_coordinates(&self, c: &[F::Elem]) -> Vec<F::Elem> {
        self.basis.vec_mul(c)
    }

    pub fn sum(&self, other: &Subspace<F>) -> Result<Self> {
        self.check_ambient(other.ambient)?;
        Ok(Subspace::row_space(&self.basis.vstack(&other.basis)))
    }

    pub fn intersect(&self, other: &Subspace<F>) -> Result<Self> {
        self.check_ambient(other.ambient)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Subspace::zero(self.field(), self.ambient));
        }
        // x·A + y·B = 0  ⟹  x·A ∈ A ∩ B
        let stacked = self.basis.vstack(&other.basis);
        let rel = stacked.left_kernel_basis();
        let xa = rel.block(0, rel.rows(), 0, self.dim()).dot(&self.basis);
        Ok(Subspace::row_space(&xa))
    }

    /// Standard basis vectors at the non-pivot columns; their span is a complement.
    pub fn complement_basis(&self) -> Vec<Vec<F::Elem>> {
        let f = self.field();
        (0..self.ambient)
            .filter(|c| !self.pivots.contains(c))
            .map(|c| f.unit_vec(self.ambient, c))
            .collect()
    }

    /// Coordinates of the coset `v + self` relative to [`Self::complement_basis`].
    pub fn quotient_coordinates(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        let r = self.reduce(v);
        (0..self.ambient)
            .filter(|c| !self.pivots.contains(c))
            .map(|c| r[c].clone())
            .collect()
    }

    /// Vectors of `outer` whose cosets modulo `self` form a basis of `outer / self`.
    pub fn quotient_reps(&self, outer: &Subspace<F>) -> Result<Vec<Vec<F::Elem>>> {
        if !outer.contains_subspace(self)? {
            return Err(MaslovError::NotContained(
                "quotient_reps requires A ⊆ B".into(),
            ));
        }
        let mut acc = self.clone();
        let mut reps = Vec::new();
        for v in outer.basis.row_vecs() {
            if !acc.contains(&v)? {
                acc = acc.sum(&Subspace::span(self.field(), self.ambient, &[v.clone()]))?;
                reps.push(v);
            }
        }
        Ok(reps)
    }

    /// `{x : xᵀ·G·a = 0 for all a in self}` for a square form `G`.
    pub fn orthogonal(&self, gram: &Matrix<F>) -> Self {
        assert_eq!(gram.rows(), self.ambient, "form size");
        if self.is_zero() {
            return Subspace::full(self.field(), self.ambient);
        }
        Subspace::kernel(&self.basis.dot(&gram.transpose()))
    }

    /// True if `G` vanishes on `self × self`.
    pub fn is_isotropic(&self, gram: &Matrix<F>) -> bool {
        gram.restrict_form(&self.basis).is_zero()
    }

    /// Image under the linear map `x ↦ xᵀ·M` (rows of `M` are images of the standard basis).
    pub fn image_under(&self, m: &Matrix<F>) -> Self {
        Subspace::row_space(&self.basis.dot(m))
    }
}
