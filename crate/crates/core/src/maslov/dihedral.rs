//! Cyclic rotation and reversal of a tuple identify the `K`-spaces by permuting
//! blocks; rotation preserves `q` and reversal negates it.

use crate::error::Result;
use crate::field::Field;
use crate::matrix::Matrix;
use crate::symplectic::LagrangianTuple;

use super::kspace::{compute_k, KSpace};

#[derive(Clone, Debug)]
pub struct Identification<F: Field> {
    /// Coordinate `j` of the transformed tuple is coordinate `permutation[j]` of the original.
    pub permutation: Vec<usize>,
    pub original: KSpace<F>,
    pub transformed: KSpace<F>,
    /// Gram of the transformed form on the transported basis of the original `K`.
    pub transported_gram: Matrix<F>,
}

impl<F: Field> Identification<F> {
    pub fn preserves(&self) -> bool {
        self.transported_gram == self.original.gram
    }

    pub fn negates(&self) -> bool {
        self.transported_gram == self.original.gram.neg()
    }
}

fn block_permutation(n: usize, m: usize, block: impl Fn(usize) -> usize) -> Vec<usize> {
    (0..n)
        .flat_map(|i| (0..m).map(move |r| (i, r)))
        .map(|(i, r)| block(i) * m + r)
        .collect()
}

fn identify<F: Field>(
    t: &LagrangianTuple<F>,
    other: LagrangianTuple<F>,
    permutation: Vec<usize>,
) -> Result<Identification<F>> {
    let original = compute_k(t)?;
    let transformed = compute_k(&other)?;
    let moved = original.basis().select_cols(&permutation);
    let transported_gram = transformed.form.restrict_form(&moved);
    Ok(Identification {
        permutation,
        original,
        transformed,
        transported_gram,
    })
}

/// `(l_{r+1}, …, l_n, l_1, …, l_r)`.
pub fn reindex<F: Field>(t: &LagrangianTuple<F>, r: usize) -> Result<Identification<F>> {
    let n = t.n();
    let perm = block_permutation(n, t.m(), |i| (i + r) % n);
    identify(t, t.rotate(r % n.max(1)), perm)
}

/// `(l_n, …, l_1)`.
pub fn reverse<F: Field>(t: &LagrangianTuple<F>) -> Result<Identification<F>> {
    let n = t.n();
    let perm = block_permutation(n, t.m(), |i| n - 1 - i);
    identify(t, t.reverse(), perm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::instances::{random_tuple, rng_from_seed, three_lines, TupleShape};

    #[test]
    fn three_lines_reversal_negates() {
        let q = Rationals;
        let id = reverse(&three_lines(&q)).unwrap();
        assert!(id.negates());
        assert_eq!(id.transported_gram, Matrix::from_i64(&q, 1, 1, &[-1]));
    }

    #[test]
    fn full_rotation_is_identity() {
        let f = PrimeField::new(5).unwrap();
        let mut rng = rng_from_seed(6);
        let t = random_tuple(&f, 2, 4, TupleShape::Generic, &mut rng);
        let id = reindex(&t, 4).unwrap();
        assert_eq!(id.permutation, (0..8).collect::<Vec<_>>());
        assert!(id.preserves());
        for r in 1..4 {
            assert!(reindex(&t, r).unwrap().preserves());
        }
        assert!(reverse(&t).unwrap().negates());
    }
}
