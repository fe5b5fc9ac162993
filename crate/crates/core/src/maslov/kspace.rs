//! `K = ker(Σ: ⊕ l_i → V)`, the form `q` on it, and `T = K / ker q`.

use crate::error::{ensure, MaslovError, Result};
use crate::field::{vec_add, vec_is_zero, vec_sub, Field};
use crate::matrix::Matrix;
use crate::subspace::Subspace;
use crate::symplectic::LagrangianTuple;

use super::complex::{build_complex, MaslovComplex};
use super::forms::{BilinearSpace, QuadraticSpace, QuotientChart};

#[derive(Clone, Debug)]
pub struct KSpace<F: Field> {
    pub complex: MaslovComplex<F>,
    /// `G` with `q(a, b) = aᵀ G b` on `K` (not symmetric off `K`).
    pub form: Matrix<F>,
    pub subspace: Subspace<F>,
    /// Gram of `q` in the canonical basis of `subspace`.
    pub gram: Matrix<F>,
}

pub fn compute_k<F: Field>(t: &LagrangianTuple<F>) -> Result<KSpace<F>> {
    t.require_n_at_least(3)?;
    Ok(k_of_complex(build_complex(t)))
}

pub(crate) fn k_of_complex<F: Field>(complex: MaslovComplex<F>) -> KSpace<F> {
    let subspace = Subspace::kernel(&complex.complex.d_right);
    let form = complex.explicit_form();
    let gram = form.restrict_form(subspace.basis());
    KSpace {
        complex,
        form,
        subspace,
        gram,
    }
}

impl<F: Field> KSpace<F> {
    pub fn field(&self) -> &F {
        self.complex.field()
    }

    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }

    pub fn basis(&self) -> &Matrix<F> {
        self.subspace.basis()
    }

    /// `q(a, b)` for block coordinates `a, b ∈ K`.
    pub fn q(&self, a: &[F::Elem], b: &[F::Elem]) -> F::Elem {
        self.form.bilinear(a, b)
    }

    pub fn bilinear_space(&self) -> BilinearSpace<F> {
        BilinearSpace::new(self.gram.clone()).expect("q is symmetric on K")
    }

    pub fn contains(&self, a: &[F::Elem]) -> bool {
        self.complex.sums_to_zero(a)
    }

    /// Image of `∂` as a subspace of `⊕ l_i`.
    pub fn image_boundary(&self) -> Subspace<F> {
        Subspace::row_space(&self.complex.complex.d_left.transpose())
    }

    /// Radical of `q` as a subspace of `⊕ l_i`.
    pub fn radical(&self) -> Subspace<F> {
        let rad = self.gram.kernel_basis();
        Subspace::row_space(&rad.dot(self.basis()))
    }
}

/// The concrete antiderivative `w̃_{i,i+1} = Σ_{j≤i} w_j` (edge `i` joins `i` and `i+1`).
pub fn antiderivative<F: Field>(c: &MaslovComplex<F>, w: &[F::Elem]) -> Result<Vec<Vec<F::Elem>>> {
    if !c.sums_to_zero(w) {
        return Err(MaslovError::precondition(
            "antiderivative needs components summing to zero",
        ));
    }
    let comps = c.components(w);
    let f = c.field();
    let mut acc = f.zero_vec(2 * c.m());
    Ok(comps
        .iter()
        .map(|wi| {
            acc = vec_add(&acc, wi);
            acc.clone()
        })
        .collect())
}

/// `(∂ x)_i = x_{i,i+1} − x_{i−1,i}` for a `V`-valued edge function.
pub fn derivative<F: Field>(x: &[Vec<F::Elem>]) -> Vec<Vec<F::Elem>> {
    let n = x.len();
    (0..n)
        .map(|i| vec_sub(&x[i], &x[(i + n - 1) % n]))
        .collect()
}

/// `Σ_i B(v_i, w̃_{i,i+1})`.
pub fn q_with_antiderivative<F: Field>(
    c: &MaslovComplex<F>,
    v: &[F::Elem],
    w_tilde: &[Vec<F::Elem>],
) -> F::Elem {
    let s = c.tuple.space();
    c.components(v)
        .iter()
        .zip(w_tilde)
        .fold(c.field().zero(), |acc, (vi, wi)| acc + s.b(vi, wi))
}

/// `Σ_i B(v_i, w̃_{i−1,i})`.
pub fn q_alternate<F: Field>(
    c: &MaslovComplex<F>,
    v: &[F::Elem],
    w_tilde: &[Vec<F::Elem>],
) -> F::Elem {
    let s = c.tuple.space();
    let n = c.n();
    c.components(v)
        .iter()
        .enumerate()
        .fold(c.field().zero(), |acc, (i, vi)| {
            acc + s.b(vi, &w_tilde[(i + n - 1) % n])
        })
}

/// The right-hand side of the dimension formula for `dim T`.
pub fn expected_dim_t<F: Field>(t: &LagrangianTuple<F>) -> isize {
    let n = t.n() as isize;
    let m = t.m() as isize;
    let edges: isize = t
        .edge_intersections()
        .iter()
        .map(|e| e.dim() as isize)
        .sum();
    (n - 2) * m - edges + 2 * t.common_intersection().dim() as isize
}

#[derive(Clone, Debug)]
pub struct TSpace<F: Field> {
    pub k: KSpace<F>,
    pub image_boundary: Subspace<F>,
    /// `K / image ∂` through representatives in `⊕ l_i`.
    pub chart: QuotientChart<F>,
    pub quadratic: QuadraticSpace<F>,
}

pub fn compute_t<F: Field>(t: &LagrangianTuple<F>) -> Result<TSpace<F>> {
    t_of_k(compute_k(t)?)
}

pub(crate) fn t_of_k<F: Field>(k: KSpace<F>) -> Result<TSpace<F>> {
    let image = k.image_boundary();
    ensure(k.subspace.contains_subspace(&image)?, || {
        "image ∂ is not contained in K".into()
    })?;
    ensure(k.radical() == image, || {
        format!(
            "radical of q (dim {}) differs from image ∂ (dim {})",
            k.radical().dim(),
            image.dim()
        )
    })?;
    let chart = QuotientChart::new(&k.subspace, &image)?;
    let gram = k.form.restrict_form(&chart.reps);
    let quadratic = QuadraticSpace::new(gram)
        .map_err(|e| MaslovError::consistency(format!("form on T: {e}")))?;
    let expected = expected_dim_t(&k.complex.tuple);
    ensure(quadratic.dim() as isize == expected, || {
        format!(
            "dim T = {} but the formula gives {expected}",
            quadratic.dim()
        )
    })?;
    Ok(TSpace {
        k,
        image_boundary: image,
        chart,
        quadratic,
    })
}

impl<F: Field> TSpace<F> {
    pub fn dim(&self) -> usize {
        self.quadratic.dim()
    }

    pub fn gram(&self) -> &Matrix<F> {
        &self.quadratic.gram
    }

    pub fn field(&self) -> &F {
        self.k.field()
    }

    pub fn tuple(&self) -> &LagrangianTuple<F> {
        &self.k.complex.tuple
    }

    /// Block coordinates of the chosen representatives of the basis of `T`.
    pub fn basis(&self) -> &Matrix<F> {
        &self.chart.reps
    }

    /// Class in `T` of a point of `K`.
    pub fn project(&self, a: &[F::Elem]) -> Result<Vec<F::Elem>> {
        self.chart
            .project(a)
            .ok_or_else(|| MaslovError::NotContained("vector is not in K".into()))
    }

    pub fn lift(&self, c: &[F::Elem]) -> Vec<F::Elem> {
        self.chart.lift(c)
    }

    pub fn is_in_radical(&self, a: &[F::Elem]) -> bool {
        self.project(a).map(|c| vec_is_zero(&c)).unwrap_or(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::instances::{lines, random_tuple, rng_from_seed, three_lines, TupleShape};

    #[test]
    fn three_lines_gram_is_one() {
        let q = Rationals;
        let t = three_lines(&q);
        let k = compute_k(&t).unwrap();
        assert_eq!(k.dim(), 1);
        assert_eq!(k.gram, Matrix::from_i64(&q, 1, 1, &[1]));
        let tt = compute_t(&t).unwrap();
        assert_eq!(tt.gram(), &Matrix::from_i64(&q, 1, 1, &[1]));
        let rev = compute_t(&t.reverse()).unwrap();
        assert_eq!(rev.gram(), &Matrix::from_i64(&q, 1, 1, &[-1]));
    }

    #[test]
    fn kernel_element_matches_hand_parametrization() {
        let q = Rationals;
        let t = three_lines(&q);
        let k = compute_k(&t).unwrap();
        // (−e, e+f, −f) has block coordinates (−1, 1, −1)
        let v = vec![q.from_i64(-1), q.from_i64(1), q.from_i64(-1)];
        assert!(k.contains(&v));
        assert_eq!(k.q(&v, &v), q.one());
    }

    #[test]
    fn equal_lagrangians_have_zero_form() {
        let f = PrimeField::new(5).unwrap();
        let mut rng = rng_from_seed(4);
        let t = random_tuple(&f, 2, 3, TupleShape::AllEqual, &mut rng);
        let k = compute_k(&t).unwrap();
        assert!(k.gram.is_zero());
        assert_eq!(compute_t(&t).unwrap().dim(), 0);
    }

    #[test]
    fn four_lines_over_f5() {
        let f = PrimeField::new(5).unwrap();
        let t = lines(&f, &[(1, 0), (1, 1), (0, 1), (1, -1)]);
        assert_eq!(compute_t(&t).unwrap().dim(), 2);
        assert_eq!(expected_dim_t(&t), 2);
    }

    #[test]
    fn antiderivative_reproduces_gram() {
        let q = Rationals;
        let t = three_lines(&q);
        let k = compute_k(&t).unwrap();
        let w = k.basis().row(0).to_vec();
        let wt = antiderivative(&k.complex, &w).unwrap();
        assert_eq!(derivative::<Rationals>(&wt), k.complex.components(&w));
        assert_eq!(q_with_antiderivative(&k.complex, &w, &wt), q.one());
        let zero = vec![q.zero(); 3];
        assert!(antiderivative(&k.complex, &zero)
            .unwrap()
            .iter()
            .all(|x| vec_is_zero(x)));
        let bad = vec![q.one(), q.zero(), q.zero()];
        assert!(antiderivative(&k.complex, &bad).is_err());
    }

    #[test]
    fn rejects_short_tuples() {
        let q = Rationals;
        let t = lines(&q, &[(1, 0), (0, 1)]);
        assert!(matches!(compute_k(&t), Err(MaslovError::InvalidTuple(_))));
    }
}
