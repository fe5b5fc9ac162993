//! Seeded random Lagrangian tuples and a few named fixtures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::Field;
use crate::subspace::Subspace;
use crate::symplectic::{LagrangianTuple, SymplecticSpace};

/// How the Lagrangians of a random tuple relate to each other.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TupleShape {
    /// Independent random Lagrangians.
    Generic,
    /// Some entries copied from others.
    Repeats,
    /// Every entry equal.
    AllEqual,
    /// Every entry contains a common random isotropic line.
    CommonLine,
}

const SHAPE_CYCLE: [TupleShape; 8] = [
    TupleShape::Generic,
    TupleShape::Generic,
    TupleShape::Repeats,
    TupleShape::Generic,
    TupleShape::CommonLine,
    TupleShape::Generic,
    TupleShape::Repeats,
    TupleShape::AllEqual,
];

/// Seed for instance `index` of a run with base seed `seed`.
pub fn instance_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index as u64)
        .rotate_left(17)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_tuple<F: Field, R: Rng + ?Sized>(
    field: &F,
    m: usize,
    n: usize,
    shape: TupleShape,
    rng: &mut R,
) -> LagrangianTuple<F> {
    let space = SymplecticSpace::new(field, m);
    let ls: Vec<Subspace<F>> = match shape {
        TupleShape::Generic => (0..n).map(|_| space.random_lagrangian(rng)).collect(),
        TupleShape::Repeats => {
            let mut ls: Vec<_> = (0..n).map(|_| space.random_lagrangian(rng)).collect();
            let copies = rng.random_range(1..n.max(2));
            for _ in 0..copies {
                let src = rng.random_range(0..n);
                let dst = rng.random_range(0..n);
                ls[dst] = ls[src].clone();
            }
            ls
        }
        TupleShape::AllEqual => vec![space.random_lagrangian(rng); n],
        TupleShape::CommonLine => common_line_tuple(&space, n, rng),
    };
    LagrangianTuple::new(space, ls).expect("generated subspaces are Lagrangian")
}

/// Lagrangians `g(span(e_1) ⊕ λ_i)` with `λ_i` random in the complementary symplectic block.
fn common_line_tuple<F: Field, R: Rng + ?Sized>(
    space: &SymplecticSpace<F>,
    n: usize,
    rng: &mut R,
) -> Vec<Subspace<F>> {
    let f = space.field();
    let m = space.m();
    if m == 1 {
        return vec![space.random_lagrangian(rng); n];
    }
    let small = SymplecticSpace::new(f, m - 1);
    let g = space.random_symplectic(rng);
    (0..n)
        .map(|_| {
            let lam = small.random_lagrangian(rng);
            let mut rows = vec![f.unit_vec(2 * m, 0)];
            for r in lam.basis_vecs() {
                // small coordinates (e_2..e_m, f_2..f_m) embed at offsets 1.. and m+1..
                let mut v = f.zero_vec(2 * m);
                for k in 0..m - 1 {
                    v[1 + k] = r[k].clone();
                    v[m + 1 + k] = r[m - 1 + k].clone();
                }
                rows.push(v);
            }
            space.apply(&g, &Subspace::span(f, 2 * m, &rows))
        })
        .collect()
}

/// Shape, half-dimension and length of instance `index` in a mixed suite.
pub fn suite_shape(
    index: usize,
    rng: &mut ChaCha8Rng,
    max_m: usize,
    min_n: usize,
    max_n: usize,
) -> (TupleShape, usize, usize) {
    let shape = SHAPE_CYCLE[index % SHAPE_CYCLE.len()];
    let m = rng.random_range(1..=max_m.max(1));
    let n = rng.random_range(min_n..=max_n.max(min_n));
    (shape, m, n)
}

/// Instance `index` of a mixed seeded suite; reproducible from `(seed, index)` alone.
pub fn suite_instance<F: Field>(
    field: &F,
    seed: u64,
    index: usize,
    max_m: usize,
    min_n: usize,
    max_n: usize,
) -> LagrangianTuple<F> {
    let mut rng = rng_from_seed(instance_seed(seed, index));
    let (shape, m, n) = suite_shape(index, &mut rng, max_m, min_n, max_n);
    random_tuple(field, m, n, shape, &mut rng)
}

/// `span(e)`, `span(e + f)`, `span(f)` in the symplectic plane.
pub fn three_lines<F: Field>(field: &F) -> LagrangianTuple<F> {
    let space = SymplecticSpace::new(field, 1);
    let o = field.one();
    let z = field.zero();
    let ls = [
        vec![o.clone(), z.clone()],
        vec![o.clone(), o.clone()],
        vec![z, o],
    ]
    .into_iter()
    .map(|v| Subspace::span(field, 2, &[v]))
    .collect();
    LagrangianTuple::new(space, ls).expect("lines are Lagrangian")
}

/// Tuple of lines in the plane spanned by the given `(a, b)` directions `a·e + b·f`.
pub fn lines<F: Field>(field: &F, dirs: &[(i64, i64)]) -> LagrangianTuple<F> {
    let space = SymplecticSpace::new(field, 1);
    let ls = dirs
        .iter()
        .map(|&(a, b)| Subspace::span(field, 2, &[vec![field.from_i64(a), field.from_i64(b)]]))
        .collect();
    LagrangianTuple::new(space, ls).expect("lines are Lagrangian")
}

/// Tuple built from integer row bases in `F^{2m}`.
pub fn from_integer_rows<F: Field>(
    field: &F,
    m: usize,
    rows: &[Vec<Vec<i64>>],
) -> crate::error::Result<LagrangianTuple<F>> {
    let space = SymplecticSpace::new(field, m);
    let ls = rows
        .iter()
        .map(|basis| {
            let vs: Vec<Vec<F::Elem>> = basis
                .iter()
                .map(|r| r.iter().map(|&x| field.from_i64(x)).collect())
                .collect();
            Subspace::span(field, 2 * m, &vs)
        })
        .collect();
    LagrangianTuple::new(space, ls)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    #[test]
    fn shapes_have_expected_structure() {
        let f = PrimeField::new(5).unwrap();
        let mut rng = rng_from_seed(11);
        let t = random_tuple(&f, 2, 4, TupleShape::AllEqual, &mut rng);
        assert!(t.lagrangians().iter().all(|l| l == &t.lagrangians()[0]));
        let t = random_tuple(&f, 3, 5, TupleShape::CommonLine, &mut rng);
        assert!(t.common_intersection().dim() >= 1);
        let t = random_tuple(&Rationals, 2, 3, TupleShape::Generic, &mut rng);
        assert!(t.lagrangians().iter().all(|l| t.space().is_lagrangian(l)));
    }

    #[test]
    fn suites_are_reproducible() {
        let f = PrimeField::new(7).unwrap();
        for i in 0..10 {
            assert_eq!(
                suite_instance(&f, 5, i, 3, 3, 6),
                suite_instance(&f, 5, i, 3, 3, 6)
            );
        }
    }
}
