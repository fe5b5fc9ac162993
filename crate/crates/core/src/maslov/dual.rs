//! The dual form on `T*` through `E_s = {x ∈ ⊕ V/l_i : x_{i+1} − x_i ∈ l_i + l_{i+1}}`.

use crate::error::{ensure, MaslovError, Result};
use crate::field::{vec_sub, Field};
use crate::matrix::Matrix;
use crate::subspace::Subspace;
use crate::symplectic::LagrangianTuple;

use super::kspace::{compute_t, TSpace};

/// Splits `v ∈ l_i + l_j` as `a + b` with `a ∈ l_i`, `b ∈ l_j`.
pub fn decompose<F: Field>(
    li: &Subspace<F>,
    lj: &Subspace<F>,
    v: &[F::Elem],
) -> Option<(Vec<F::Elem>, Vec<F::Elem>)> {
    let stacked = li.basis().vstack(lj.basis());
    let c = stacked.transpose().solve(v)?;
    let a = li.from_coordinates(&c[..li.dim()]);
    let b = lj.from_coordinates(&c[li.dim()..]);
    Some((a, b))
}

/// `⟨ε_{i,i+1}(x_i, x_{i+1}), v⟩ = B(a, x_i) + B(b, x_{i+1})` for `v = a + b`.
pub fn epsilon_functional<F: Field>(
    t: &LagrangianTuple<F>,
    i: usize,
    x_i: &[F::Elem],
    x_next: &[F::Elem],
    v: &[F::Elem],
) -> Result<F::Elem> {
    let li = t.l(i as isize);
    let lj = t.l(i as isize + 1);
    let sum = li.sum(lj)?;
    if !sum.contains(&vec_sub(x_next, x_i))? {
        return Err(MaslovError::precondition(
            "x_{i+1} − x_i is not in l_i + l_{i+1}",
        ));
    }
    let Some((a, b)) = decompose(li, lj, v) else {
        return Err(MaslovError::precondition("v is not in l_i + l_{i+1}"));
    };
    Ok(epsilon_with(t, x_i, x_next, &a, &b))
}

/// The defining expression for an explicit decomposition `v = a + b`.
pub fn epsilon_with<F: Field>(
    t: &LagrangianTuple<F>,
    x_i: &[F::Elem],
    x_next: &[F::Elem],
    a: &[F::Elem],
    b: &[F::Elem],
) -> F::Elem {
    let s = t.space();
    s.b(a, x_i) + s.b(b, x_next)
}

#[derive(Clone, Debug)]
pub struct EsSpace<F: Field> {
    pub t: TSpace<F>,
    /// Coset representatives of `V/l_i` (standard vectors at non-pivot columns), `m × 2m`.
    pub coset_reps: Vec<Matrix<F>>,
    /// Basis of `E_s` in block coordinates relative to `coset_reps`.
    pub basis: Matrix<F>,
    /// Gram of `q*` on `basis`.
    pub gram: Matrix<F>,
    /// `π: E_s → T*`, column `k` is the functional `w ↦ Σ_i B(w_i, x_i)` of basis row `k`
    /// in the dual basis of `T`.
    pub surjection: Matrix<F>,
}

impl<F: Field> EsSpace<F> {
    /// The vectors `x_i ∈ V` represented by block coordinates.
    pub fn representatives(&self, c: &[F::Elem]) -> Vec<Vec<F::Elem>> {
        let m = self.t.tuple().m();
        self.coset_reps
            .iter()
            .enumerate()
            .map(|(i, r)| r.vec_mul(&c[i * m..(i + 1) * m]))
            .collect()
    }

    /// `Σ_i ⟨ε_{i,i+1}(x_i, x_{i+1}), y_{i+1} − y_i⟩` on representatives.
    pub fn q_star(&self, x: &[Vec<F::Elem>], y: &[Vec<F::Elem>]) -> Result<F::Elem> {
        let t = self.t.tuple();
        let n = t.n();
        let mut acc = t.field().zero();
        for i in 0..n {
            let j = (i + 1) % n;
            let dy = vec_sub(&y[j], &y[i]);
            acc = acc + epsilon_functional(t, i, &x[i], &x[j], &dy)?;
        }
        Ok(acc)
    }

    /// Block coordinates of the class of `diag(v)`.
    pub fn diagonal(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        self.t
            .tuple()
            .lagrangians()
            .iter()
            .flat_map(|l| l.quotient_coordinates(v))
            .collect()
    }

    /// `π(x)` for block coordinates `x`.
    pub fn pi(&self, c: &[F::Elem]) -> Vec<F::Elem> {
        let xs = self.representatives(c);
        pi_of(&self.t, &xs)
    }

    /// A point of `E_s` (block coordinates) with `π(x) = target`.
    pub fn lift_functional(&self, target: &[F::Elem]) -> Option<Vec<F::Elem>> {
        let c = self.surjection.solve(target)?;
        Some(self.basis.vec_mul(&c))
    }
}

fn pi_of<F: Field>(t: &TSpace<F>, xs: &[Vec<F::Elem>]) -> Vec<F::Elem> {
    let cx = &t.k.complex;
    let s = cx.tuple.space();
    let f = t.field();
    (0..t.dim())
        .map(|k| {
            let comps = cx.components(t.basis().row(k));
            comps
                .iter()
                .zip(xs)
                .fold(f.zero(), |acc, (w, x)| acc + s.b(w, x))
        })
        .collect()
}

pub fn dual_form<F: Field>(t: &LagrangianTuple<F>) -> Result<EsSpace<F>> {
    let tspace = compute_t(t)?;
    let f = t.field();
    let n = t.n();
    let m = t.m();
    let dim = 2 * m;
    let coset_reps: Vec<Matrix<F>> = t
        .lagrangians()
        .iter()
        .map(|l| Matrix::from_rows(f, dim, &l.complement_basis()))
        .collect();
    let sums: Vec<Subspace<F>> = (0..n as isize)
        .map(|i| t.l(i).sum(t.l(i + 1)).expect("same ambient"))
        .collect();

    // x ↦ (x_{i+1} − x_i mod l_i + l_{i+1})_i
    let mut membership = Matrix::zeros(f, n * dim, n * m);
    for i in 0..n {
        let prev = (i + n - 1) % n;
        for r in 0..m {
            let u = coset_reps[i].row(r);
            let col = i * m + r;
            let out_i = sums[i].reduce(u);
            let out_prev = sums[prev].reduce(u);
            for c in 0..dim {
                membership[(i * dim + c, col)] =
                    membership[(i * dim + c, col)].clone() - out_i[c].clone();
                membership[(prev * dim + c, col)] =
                    membership[(prev * dim + c, col)].clone() + out_prev[c].clone();
            }
        }
    }
    let basis = membership.kernel_basis();
    let mut es = EsSpace {
        t: tspace,
        coset_reps,
        basis,
        gram: Matrix::zeros(f, 0, 0),
        surjection: Matrix::zeros(f, 0, 0),
    };
    let reps: Vec<Vec<Vec<F::Elem>>> = es
        .basis
        .row_vecs()
        .iter()
        .map(|c| es.representatives(c))
        .collect();
    let e = reps.len();
    let mut gram = Matrix::zeros(f, e, e);
    for a in 0..e {
        for b in 0..e {
            gram[(a, b)] = es.q_star(&reps[a], &reps[b])?;
        }
    }
    let cols: Vec<Vec<F::Elem>> = reps.iter().map(|x| pi_of(&es.t, x)).collect();
    es.surjection = Matrix::from_cols(f, es.t.dim(), &cols);
    es.gram = gram;
    ensure(es.surjection.rank() == es.t.dim(), || {
        "E_s → T* is not surjective".into()
    })?;
    Ok(es)
}

/// `πᵀ · gram_T^{-1} · π`, the inverse-Gram form pulled back to `E_s`.
pub fn pulled_back_inverse_gram<F: Field>(es: &EsSpace<F>) -> Matrix<F> {
    let inv = es.t.gram().inverse().expect("gram of T is invertible");
    es.surjection.transpose().dot(&inv).dot(&es.surjection)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals, Scalar};
    use crate::instances::{lines, three_lines};

    #[test]
    fn three_lines_dual_form_is_one() {
        let q = Rationals;
        let es = dual_form(&three_lines(&q)).unwrap();
        assert_eq!(pulled_back_inverse_gram(&es), es.gram);
        let target = vec![q.one()];
        let x = es.lift_functional(&target).unwrap();
        let xs = es.representatives(&x);
        assert_eq!(es.q_star(&xs, &xs).unwrap(), q.one());
    }

    #[test]
    fn epsilon_special_cases() {
        let f = PrimeField::new(7).unwrap();
        let t = lines(&f, &[(1, 0), (1, 1), (0, 1), (1, 3)]);
        let x = vec![f.from_i64(2), f.from_i64(5)];
        let v = vec![f.from_i64(4), f.from_i64(1)];
        let val = epsilon_functional(&t, 0, &x, &x, &v).unwrap();
        assert_eq!(val, t.space().b(&v, &x));
        let zero = f.zero_vec(2);
        assert!(epsilon_functional(&t, 1, &x, &x, &zero).unwrap().is_zero());
    }

    #[test]
    fn diagonal_classes_pair_to_zero() {
        let f = PrimeField::new(5).unwrap();
        let t = lines(&f, &[(1, 0), (1, 1), (0, 1), (1, -1)]);
        let es = dual_form(&t).unwrap();
        let v = vec![f.from_i64(2), f.from_i64(3)];
        let d = es.diagonal(&v);
        let dx = es.representatives(&d);
        for row in es.basis.row_vecs() {
            let y = es.representatives(&row);
            assert!(es.q_star(&dx, &y).unwrap().is_zero());
        }
        assert!(es.pi(&d).iter().all(Scalar::is_zero));
    }
}
