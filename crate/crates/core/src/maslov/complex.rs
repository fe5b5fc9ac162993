//! The three-term complex `⊕ l_i ∩ l_{i+1} → ⊕ l_i → V` in degrees −1, 0, 1.

use crate::error::{MaslovError, Result};
use crate::field::{Field, Scalar};
use crate::matrix::Matrix;
use crate::symplectic::LagrangianTuple;

/// A complex `C^{-1} → C^0 → C^1` of coordinate spaces; maps act on column vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex3<F: Field> {
    pub d_left: Matrix<F>,
    pub d_right: Matrix<F>,
}

impl<F: Field> Complex3<F> {
    pub fn new(d_left: Matrix<F>, d_right: Matrix<F>) -> Result<Self> {
        if d_right.cols() != d_left.rows() {
            return Err(MaslovError::DimensionMismatch {
                expected: d_right.cols(),
                got: d_left.rows(),
            });
        }
        if !d_right.dot(&d_left).is_zero() {
            return Err(MaslovError::precondition("d ∘ d is not zero"));
        }
        Ok(Complex3 { d_left, d_right })
    }

    /// `(dim C^{-1}, dim C^0, dim C^1)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.d_left.cols(), self.d_left.rows(), self.d_right.rows())
    }

    pub fn is_complex(&self) -> bool {
        self.d_right.dot(&self.d_left).is_zero()
    }

    /// Dimensions of `H^{-1}, H^0, H^1`.
    pub fn cohomology_dims(&self) -> (usize, usize, usize) {
        let (a, b, c) = self.dims();
        let r0 = self.d_left.rank();
        let r1 = self.d_right.rank();
        (a - r0, b - r1 - r0, c - r1)
    }
}

/// The Maslov complex of a tuple with the bookkeeping needed to move between
/// block coordinates and vectors of `V`.
///
/// A point of `⊕ l_i` is stored as `n` blocks of `m` coordinates relative to the
/// canonical bases of the `l_i`; a point of `⊕ l_i ∩ l_{i+1}` as blocks relative to
/// the canonical bases of the edge intersections. Edge `i` joins vertices `i` and `i+1`.
#[derive(Clone, Debug)]
pub struct MaslovComplex<F: Field> {
    pub tuple: LagrangianTuple<F>,
    pub complex: Complex3<F>,
    /// Canonical basis of `l_i`, `m × 2m`.
    pub lag_bases: Vec<Matrix<F>>,
    /// Canonical basis of `l_i ∩ l_{i+1}`.
    pub edge_bases: Vec<Matrix<F>>,
    pub edge_offsets: Vec<usize>,
}

pub fn build_complex<F: Field>(t: &LagrangianTuple<F>) -> MaslovComplex<F> {
    let f = t.field();
    let n = t.n();
    let m = t.m();
    let lag_bases: Vec<_> = t.lagrangians().iter().map(|l| l.basis().clone()).collect();
    let edges = t.edge_intersections();
    let edge_bases: Vec<_> = edges.iter().map(|e| e.basis().clone()).collect();
    let mut edge_offsets = Vec::with_capacity(n + 1);
    let mut acc = 0;
    for e in &edges {
        edge_offsets.push(acc);
        acc += e.dim();
    }
    edge_offsets.push(acc);

    let mut d_left = Matrix::zeros(f, n * m, acc);
    for (i, e) in edges.iter().enumerate() {
        let j = (i + 1) % n;
        for (k, u) in e.basis_vecs().iter().enumerate() {
            let col = edge_offsets[i] + k;
            let ci = t.lagrangians()[i].coordinates(u).expect("edge lies in l_i");
            let cj = t.lagrangians()[j]
                .coordinates(u)
                .expect("edge lies in l_{i+1}");
            for r in 0..m {
                d_left[(i * m + r, col)] = d_left[(i * m + r, col)].clone() + ci[r].clone();
                d_left[(j * m + r, col)] = d_left[(j * m + r, col)].clone() - cj[r].clone();
            }
        }
    }
    let mut d_right = Matrix::zeros(f, 2 * m, n * m);
    for (i, b) in lag_bases.iter().enumerate() {
        d_right.set_block(0, i * m, &b.transpose());
    }
    let complex = Complex3 { d_left, d_right };
    debug_assert!(complex.is_complex());
    MaslovComplex {
        tuple: t.clone(),
        complex,
        lag_bases,
        edge_bases,
        edge_offsets,
    }
}

impl<F: Field> MaslovComplex<F> {
    pub fn field(&self) -> &F {
        self.tuple.field()
    }

    pub fn n(&self) -> usize {
        self.tuple.n()
    }

    pub fn m(&self) -> usize {
        self.tuple.m()
    }

    /// `dim ⊕ l_i = n·m`.
    pub fn middle_dim(&self) -> usize {
        self.n() * self.m()
    }

    pub fn edge_dim(&self) -> usize {
        self.edge_offsets[self.n()]
    }

    /// The vectors `v_i ∈ V` of a point of `⊕ l_i`.
    pub fn components(&self, a: &[F::Elem]) -> Vec<Vec<F::Elem>> {
        let m = self.m();
        (0..self.n())
            .map(|i| self.lag_bases[i].vec_mul(&a[i * m..(i + 1) * m]))
            .collect()
    }

    /// Block coordinates of `(v_i)`; fails if some `v_i ∉ l_i`.
    pub fn from_components(&self, vs: &[Vec<F::Elem>]) -> Result<Vec<F::Elem>> {
        if vs.len() != self.n() {
            return Err(MaslovError::DimensionMismatch {
                expected: self.n(),
                got: vs.len(),
            });
        }
        let mut out = Vec::with_capacity(self.middle_dim());
        for (l, v) in self.tuple.lagrangians().iter().zip(vs) {
            out.extend(l.coordinates(v)?);
        }
        Ok(out)
    }

    /// The vectors of `V` attached to the edges of a point of `⊕ l_i ∩ l_{i+1}`.
    pub fn edge_components(&self, c: &[F::Elem]) -> Vec<Vec<F::Elem>> {
        (0..self.n())
            .map(|i| {
                let (a, b) = (self.edge_offsets[i], self.edge_offsets[i + 1]);
                self.edge_bases[i].vec_mul(&c[a..b])
            })
            .collect()
    }

    /// The block-lower-triangular matrix `G` with `aᵀ G b = Σ_{i>j} B(a_i, b_j)`.
    pub fn explicit_form(&self) -> Matrix<F> {
        let n = self.n();
        let m = self.m();
        let s = self.tuple.space();
        let mut g = Matrix::zeros(self.field(), n * m, n * m);
        for i in 0..n {
            for j in 0..i {
                g.set_block(
                    i * m,
                    j * m,
                    &s.pairing_matrix(&self.lag_bases[i], &self.lag_bases[j]),
                );
            }
        }
        g
    }

    /// `Σ_i B(v_i, w_i)` for points of `⊕ l_i` given by components; always zero.
    pub fn diagonal_pairing(&self, v: &[Vec<F::Elem>], w: &[Vec<F::Elem>]) -> F::Elem {
        let s = self.tuple.space();
        v.iter()
            .zip(w)
            .fold(self.field().zero(), |acc, (a, b)| acc + s.b(a, b))
    }

    pub fn sums_to_zero(&self, a: &[F::Elem]) -> bool {
        self.complex.d_right.mul_vec(a).iter().all(Scalar::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::instances::{random_tuple, rng_from_seed, three_lines, TupleShape};

    #[test]
    fn equal_lagrangians_give_full_rank_boundary() {
        let f = PrimeField::new(5).unwrap();
        let mut rng = rng_from_seed(1);
        for m in 1..=3 {
            for n in 3..=5 {
                let t = random_tuple(&f, m, n, TupleShape::AllEqual, &mut rng);
                let c = build_complex(&t);
                assert_eq!(c.complex.d_left.rank(), (n - 1) * m);
            }
        }
    }

    #[test]
    fn transverse_lines_have_no_edges() {
        let c = build_complex(&three_lines(&Rationals));
        assert_eq!(c.edge_dim(), 0);
        assert_eq!(c.complex.dims(), (0, 3, 2));
    }

    #[test]
    fn composite_vanishes_on_random_tuples() {
        let f = PrimeField::new(7).unwrap();
        let mut rng = rng_from_seed(2);
        for shape in [
            TupleShape::Generic,
            TupleShape::Repeats,
            TupleShape::CommonLine,
        ] {
            let t = random_tuple(&f, 2, 5, shape, &mut rng);
            let c = build_complex(&t);
            assert!(c.complex.d_right.dot(&c.complex.d_left).is_zero());
        }
    }
}
