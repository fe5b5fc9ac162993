//! Symplectic spaces `F^{2m}` in the standard basis `e_1..e_m, f_1..f_m`, Lagrangian
//! subspaces and cyclic tuples of them.

use rand::Rng;

use crate::error::{MaslovError, Result};
use crate::field::{Field, Scalar};
use crate::matrix::Matrix;
use crate::subspace::Subspace;

/// `(F^{2m}, B)` with `B(x, y) = xᵀ J y`, `J = [[0, I], [−I, 0]]`, so `B(e_i, f_i) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticSpace<F: Field> {
    field: F,
    m: usize,
}

impl<F: Field> SymplecticSpace<F> {
    pub fn new(field: &F, m: usize) -> Self {
        SymplecticSpace {
            field: field.clone(),
            m,
        }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        2 * self.m
    }

    pub fn gram_j(&self) -> Matrix<F> {
        let f = &self.field;
        let m = self.m;
        let mut j = Matrix::zeros(f, 2 * m, 2 * m);
        for i in 0..m {
            j[(i, m + i)] = f.one();
            j[(m + i, i)] = -f.one();
        }
        j
    }

    pub fn pairing(&self, x: &[F::Elem], y: &[F::Elem]) -> Result<F::Elem> {
        for v in [x, y] {
            if v.len() != self.dim() {
                return Err(MaslovError::DimensionMismatch {
                    expected: self.dim(),
                    got: v.len(),
                });
            }
        }
        Ok(self.b(x, y))
    }

    /// Unchecked pairing for vectors already known to have length `2m`.
    pub fn b(&self, x: &[F::Elem], y: &[F::Elem]) -> F::Elem {
        let m = self.m;
        let mut acc = self.field.zero();
        for i in 0..m {
            acc = acc + x[i].clone() * y[m + i].clone() - x[m + i].clone() * y[i].clone();
        }
        acc
    }

    /// The matrix `A·J·Cᵀ` of pairings between the rows of `a` and `c`.
    pub fn pairing_matrix(&self, a: &Matrix<F>, c: &Matrix<F>) -> Matrix<F> {
        a.dot(&self.gram_j()).dot(&c.transpose())
    }

    pub fn is_isotropic(&self, l: &Subspace<F>) -> bool {
        l.ambient_dim() == self.dim() && self.pairing_matrix(l.basis(), l.basis()).is_zero()
    }

    pub fn is_lagrangian(&self, l: &Subspace<F>) -> bool {
        l.dim() == self.m && self.is_isotropic(l)
    }

    pub fn lagrangian_diagnostic(&self, l: &Subspace<F>) -> Option<String> {
        if l.ambient_dim() != self.dim() {
            return Some(format!(
                "ambient dimension {} differs from {}",
                l.ambient_dim(),
                self.dim()
            ));
        }
        if l.dim() != self.m {
            return Some(format!("dimension {} differs from m = {}", l.dim(), self.m));
        }
        let p = self.pairing_matrix(l.basis(), l.basis());
        for a in 0..p.rows() {
            for c in 0..p.cols() {
                if !p[(a, c)].is_zero() {
                    return Some(format!("basis rows {a} and {c} pair to {}", p[(a, c)]));
                }
            }
        }
        None
    }

    /// `{x : B(x, a) = 0 for all a in s}`.
    pub fn orthogonal(&self, s: &Subspace<F>) -> Subspace<F> {
        s.orthogonal(&self.gram_j().transpose())
    }

    /// `span(e_1, …, e_m)`.
    pub fn standard_lagrangian(&self) -> Subspace<F> {
        let f = &self.field;
        let rows: Vec<_> = (0..self.m).map(|i| f.unit_vec(self.dim(), i)).collect();
        Subspace::span(f, self.dim(), &rows)
    }

    /// Matrix of the transvection `x ↦ x + c·B(x, u)·u` acting on column vectors.
    pub fn transvection(&self, u: &[F::Elem], c: &F::Elem) -> Matrix<F> {
        let f = &self.field;
        let n = self.dim();
        // B(x, u) = (J u)ᵀ x, so g = I + c·u·(J u)ᵀ
        let ju = self.gram_j().mul_vec(u);
        let mut g = Matrix::identity(f, n);
        for i in 0..n {
            for k in 0..n {
                let t = c.clone() * u[i].clone() * ju[k].clone();
                g[(i, k)] = g[(i, k)].clone() + t;
            }
        }
        g
    }

    pub fn is_symplectic_matrix(&self, g: &Matrix<F>) -> bool {
        let j = self.gram_j();
        g.transpose().dot(&j).dot(g) == j
    }

    /// Product of `count` random transvections; the identity when `count = 0`.
    pub fn random_symplectic_with<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Matrix<F> {
        let f = &self.field;
        let mut g = Matrix::identity(f, self.dim());
        for _ in 0..count {
            let (u, c) = if f.characteristic() == 0 {
                self.small_transvection_data(rng)
            } else {
                let u: Vec<_> = loop {
                    let u: Vec<_> = (0..self.dim()).map(|_| f.random(rng)).collect();
                    if u.iter().any(|x| !x.is_zero()) {
                        break u;
                    }
                };
                (u, f.random_nonzero(rng))
            };
            g = self.transvection(&u, &c).dot(&g);
        }
        g
    }

    /// `u` with one or two entries `±1` and `c = ±1`. Dense rational transvections make
    /// entry sizes explode after a few products; these still generate `Sp(2m, ℤ)`.
    fn small_transvection_data<R: Rng + ?Sized>(&self, rng: &mut R) -> (Vec<F::Elem>, F::Elem) {
        let f = &self.field;
        let sign = |rng: &mut R| {
            if rng.random_bool(0.5) {
                f.one()
            } else {
                -f.one()
            }
        };
        let mut u = f.zero_vec(self.dim());
        u[rng.random_range(0..self.dim())] = sign(rng);
        if rng.random_bool(0.5) {
            u[rng.random_range(0..self.dim())] = sign(rng);
        }
        (u, sign(rng))
    }

    /// Default mixing of `4m` transvections.
    pub fn random_symplectic<R: Rng + ?Sized>(&self, rng: &mut R) -> Matrix<F> {
        self.random_symplectic_with(rng, 4 * self.m.max(1))
    }

    /// Image of a subspace under `g` acting on column vectors.
    pub fn apply(&self, g: &Matrix<F>, l: &Subspace<F>) -> Subspace<F> {
        l.image_under(&g.transpose())
    }

    pub fn random_lagrangian<R: Rng + ?Sized>(&self, rng: &mut R) -> Subspace<F> {
        let g = self.random_symplectic(rng);
        self.apply(&g, &self.standard_lagrangian())
    }
}

/// Rows `e_1..e_m, f_1..f_m` of a symplectic basis for an alternating Gram matrix `G`,
/// i.e. `P` with `P·G·Pᵀ = J`.
pub fn symplectic_basis<F: Field>(field: &F, gram: &Matrix<F>) -> Result<Matrix<F>> {
    let n = gram.rows();
    if !gram.is_square() || n % 2 == 1 {
        return Err(MaslovError::precondition(
            "alternating form needs an even square Gram",
        ));
    }
    if gram.transpose() != gram.neg() || (0..n).any(|i| !gram[(i, i)].is_zero()) {
        return Err(MaslovError::precondition("Gram matrix is not alternating"));
    }
    if gram.det().is_zero() {
        return Err(MaslovError::precondition("Gram matrix is degenerate"));
    }
    let form = |x: &[F::Elem], y: &[F::Elem]| gram.bilinear(x, y);
    let mut pool: Vec<Vec<F::Elem>> = (0..n).map(|i| field.unit_vec(n, i)).collect();
    let mut es = Vec::new();
    let mut fs = Vec::new();
    while !pool.is_empty() {
        let e = pool.remove(0);
        let Some(pos) = pool.iter().position(|y| !form(&e, y).is_zero()) else {
            return Err(MaslovError::consistency("symplectic basis search stalled"));
        };
        let y = pool.remove(pos);
        let s = form(&e, &y).inv().expect("nonzero pairing");
        let fvec: Vec<_> = y.iter().map(|x| s.clone() * x.clone()).collect();
        // project the rest onto the orthogonal of span(e, f)
        pool = pool
            .into_iter()
            .map(|z| {
                let a = form(&z, &fvec);
                let b = form(&e, &z);
                z.iter()
                    .zip(e.iter().zip(&fvec))
                    .map(|(zi, (ei, fi))| {
                        zi.clone() - a.clone() * ei.clone() - b.clone() * fi.clone()
                    })
                    .collect()
            })
            .collect();
        es.push(e);
        fs.push(fvec);
    }
    es.extend(fs);
    Ok(Matrix::from_rows(field, n, &es))
}

/// A symplectic space with `n` Lagrangians indexed by `ℤ/nℤ` (stored 0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LagrangianTuple<F: Field> {
    space: SymplecticSpace<F>,
    lagrangians: Vec<Subspace<F>>,
}

impl<F: Field> LagrangianTuple<F> {
    pub fn new(space: SymplecticSpace<F>, lagrangians: Vec<Subspace<F>>) -> Result<Self> {
        for (i, l) in lagrangians.iter().enumerate() {
            if let Some(reason) = space.lagrangian_diagnostic(l) {
                return Err(MaslovError::NotLagrangian { index: i, reason });
            }
        }
        if lagrangians.is_empty() {
            return Err(MaslovError::InvalidTuple("empty tuple".into()));
        }
        Ok(LagrangianTuple { space, lagrangians })
    }

    /// Ingests Lagrangians given in the coordinates of an arbitrary alternating Gram matrix.
    pub fn from_gram(field: &F, gram: &Matrix<F>, lagrangians: &[Subspace<F>]) -> Result<Self> {
        let p = symplectic_basis(field, gram)?;
        let pinv = p
            .inverse()
            .ok_or_else(|| MaslovError::consistency("symplectic basis is singular"))?;
        let space = SymplecticSpace::new(field, gram.rows() / 2);
        let ls = lagrangians.iter().map(|l| l.image_under(&pinv)).collect();
        LagrangianTuple::new(space, ls)
    }

    pub fn space(&self) -> &SymplecticSpace<F> {
        &self.space
    }

    pub fn field(&self) -> &F {
        self.space.field()
    }

    pub fn m(&self) -> usize {
        self.space.m()
    }

    pub fn n(&self) -> usize {
        self.lagrangians.len()
    }

    pub fn lagrangians(&self) -> &[Subspace<F>] {
        &self.lagrangians
    }

    /// `l_i` with the index taken modulo `n`.
    pub fn l(&self, i: isize) -> &Subspace<F> {
        let n = self.n() as isize;
        &self.lagrangians[i.rem_euclid(n) as usize]
    }

    pub fn require_n_at_least(&self, k: usize) -> Result<()> {
        if self.n() < k {
            Err(MaslovError::InvalidTuple(format!(
                "need at least {k} Lagrangians, got {}",
                self.n()
            )))
        } else {
            Ok(())
        }
    }

    /// `l_i ∩ l_{i+1}` for `i = 0..n`.
    pub fn edge_intersections(&self) -> Vec<Subspace<F>> {
        (0..self.n() as isize)
            .map(|i| self.l(i).intersect(self.l(i + 1)).expect("same ambient"))
            .collect()
    }

    pub fn common_intersection(&self) -> Subspace<F> {
        self.lagrangians
            .iter()
            .skip(1)
            .fold(self.lagrangians[0].clone(), |acc, l| {
                acc.intersect(l).expect("same ambient")
            })
    }

    pub fn total_sum(&self) -> Subspace<F> {
        self.lagrangians
            .iter()
            .skip(1)
            .fold(self.lagrangians[0].clone(), |acc, l| {
                acc.sum(l).expect("same ambient")
            })
    }

    /// `(l_{r}, l_{r+1}, …, l_{r+n−1})`.
    pub fn rotate(&self, r: usize) -> Self {
        let n = self.n();
        let ls = (0..n)
            .map(|i| self.lagrangians[(i + r) % n].clone())
            .collect();
        LagrangianTuple {
            space: self.space.clone(),
            lagrangians: ls,
        }
    }

    /// `(l_n, l_{n−1}, …, l_1)`.
    pub fn reverse(&self) -> Self {
        let mut ls = self.lagrangians.clone();
        ls.reverse();
        LagrangianTuple {
            space: self.space.clone(),
            lagrangians: ls,
        }
    }

    /// Subtuple with the given indices, in order.
    pub fn select(&self, idx: &[usize]) -> Self {
        LagrangianTuple {
            space: self.space.clone(),
            lagrangians: idx.iter().map(|&i| self.lagrangians[i].clone()).collect(),
        }
    }

    /// `⋂ l_i = 0` and `Σ l_i = V`.
    pub fn is_transverse(&self) -> bool {
        self.common_intersection().is_zero() && self.total_sum().dim() == self.space.dim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn standard_pairing_values() {
        let q = Rationals;
        let s = SymplecticSpace::new(&q, 1);
        let e = vec![q.one(), q.zero()];
        let fv = vec![q.zero(), q.one()];
        assert_eq!(s.pairing(&e, &fv).unwrap(), q.one());
        let a = vec![q.one(), q.one()];
        let b = vec![q.one(), q.from_i64(-1)];
        assert_eq!(s.pairing(&a, &b).unwrap(), q.from_i64(-2));
        assert_eq!(s.pairing(&a, &a).unwrap(), q.zero());
        assert!(s.pairing(&a, &[q.one()]).is_err());
    }

    #[test]
    fn lagrangian_examples() {
        let f = PrimeField::new(5).unwrap();
        let s = SymplecticSpace::new(&f, 2);
        assert!(s.is_lagrangian(&s.standard_lagrangian()));
        let ef = Subspace::span(&f, 4, &[f.unit_vec(4, 0), f.unit_vec(4, 2)]);
        assert!(!s.is_lagrangian(&ef));
        let s1 = SymplecticSpace::new(&f, 1);
        let diag = Subspace::span(&f, 2, &[vec![f.one(), f.one()]]);
        assert!(s1.is_lagrangian(&diag));
    }

    #[test]
    fn transvections_are_symplectic() {
        let f = PrimeField::new(7).unwrap();
        let s = SymplecticSpace::new(&f, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(
            s.random_symplectic_with(&mut rng, 0),
            Matrix::identity(&f, 4)
        );
        for _ in 0..20 {
            let g = s.random_symplectic(&mut rng);
            assert!(s.is_symplectic_matrix(&g));
            assert!(s.is_lagrangian(&s.apply(&g, &s.standard_lagrangian())));
        }
    }

    #[test]
    fn transvection_formula() {
        let f = PrimeField::new(5).unwrap();
        let s = SymplecticSpace::new(&f, 1);
        let u = vec![f.one(), f.from_i64(2)];
        let c = f.from_i64(3);
        let g = s.transvection(&u, &c);
        let x = vec![f.from_i64(4), f.one()];
        let bxu = s.b(&x, &u);
        let expect: Vec<_> = x
            .iter()
            .zip(&u)
            .map(|(xi, ui)| *xi + c * bxu * *ui)
            .collect();
        assert_eq!(g.mul_vec(&x), expect);
    }

    #[test]
    fn orbit_hits_every_line_over_f3() {
        let f = PrimeField::new(3).unwrap();
        let s = SymplecticSpace::new(&f, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..1000 {
            let l = s.random_lagrangian(&mut rng);
            seen.insert(format!("{:?}", l.basis()));
        }
        assert_eq!(seen.len(), 4);
    }

    #[test]
    fn symplectic_basis_normalizes_gram() {
        let q = Rationals;
        // B(x,y) with gram [[0,2],[-2,0]]
        let g = Matrix::from_i64(&q, 2, 2, &[0, 2, -2, 0]);
        let p = symplectic_basis(&q, &g).unwrap();
        let s = SymplecticSpace::new(&q, 1);
        assert_eq!(g.restrict_form(&p), s.gram_j());
        let bad = Matrix::from_i64(&q, 2, 2, &[1, 0, 0, 1]);
        assert!(symplectic_basis(&q, &bad).is_err());
    }

    #[test]
    fn tuple_rejects_non_lagrangian() {
        let f = PrimeField::new(5).unwrap();
        let s = SymplecticSpace::new(&f, 1);
        let full = Subspace::full(&f, 2);
        let err = LagrangianTuple::new(s.clone(), vec![s.standard_lagrangian(), full]);
        assert!(matches!(
            err,
            Err(MaslovError::NotLagrangian { index: 1, .. })
        ));
    }
}
