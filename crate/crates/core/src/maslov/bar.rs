//! The space `K̄ = V* ⊕ ⊕ l_i` with `q̄(v⊕a, w⊕b) = ⟨v, Σb⟩ + ⟨a, Φ_0 b⟩ + ⟨a, Σ* w⟩`,
//! whose non-degenerate quotient `T̄` has dimension depending only on the
//! intersection dimensions `dim l_i ∩ l_{i+1}`.

use crate::error::{ensure, MaslovError, Result};
use crate::field::Field;
use crate::matrix::Matrix;
use crate::subspace::Subspace;
use crate::symplectic::LagrangianTuple;

use super::complex::build_complex;
use super::forms::{QuadraticSpace, QuotientChart};
use super::kspace::{k_of_complex, t_of_k, TSpace};
use super::quasi::explicit_for;
use super::subquotient::{quadratic_subquotient, Subquotient};

#[derive(Clone, Debug)]
pub struct BarSpace<F: Field> {
    /// Gram of `q̄` on `V* ⊕ ⊕ l_i` (the `V*` block first).
    pub ambient_gram: Matrix<F>,
    /// `∂̃ = (−Φ_{-1}, ∂)` as columns in the same coordinates.
    pub tilde_partial: Matrix<F>,
    pub chart: QuotientChart<F>,
    pub bar_t: QuadraticSpace<F>,
    pub t: TSpace<F>,
}

/// `(n+2)·m − Σ dim l_i ∩ l_{i+1}`.
pub fn expected_bar_dim<F: Field>(t: &LagrangianTuple<F>) -> usize {
    let edges: usize = t.edge_intersections().iter().map(|e| e.dim()).sum();
    (t.n() + 2) * t.m() - edges
}

pub fn bar_space<F: Field>(t: &LagrangianTuple<F>) -> Result<BarSpace<F>> {
    t.require_n_at_least(3)?;
    let f = t.field();
    let c = build_complex(t);
    let phi = explicit_for(&c);
    let sigma = &c.complex.d_right;
    let vd = 2 * t.m();
    let nm = c.middle_dim();
    let ambient_gram = Matrix::from_blocks(
        f,
        &[
            vec![Matrix::zeros(f, vd, vd), sigma.clone()],
            vec![sigma.transpose(), phi.phi_0.clone()],
        ],
    );
    let tilde_partial = phi.phi_minus1.neg().vstack(&c.complex.d_left);
    ensure(tilde_partial.rank() == tilde_partial.cols(), || {
        "∂̃ is not injective".into()
    })?;
    let image = Subspace::row_space(&tilde_partial.transpose());
    ensure(Subspace::kernel(&ambient_gram) == image, || {
        "ker q̄ differs from image ∂̃".into()
    })?;
    let chart = QuotientChart::new(&Subspace::full(f, vd + nm), &image)?;
    let bar_t = QuadraticSpace::new(ambient_gram.restrict_form(&chart.reps))
        .map_err(|e| MaslovError::consistency(format!("form on T̄: {e}")))?;
    ensure(bar_t.dim() == expected_bar_dim(t), || {
        format!(
            "dim T̄ = {} but the formula gives {}",
            bar_t.dim(),
            expected_bar_dim(t)
        )
    })?;
    let tspace = t_of_k(k_of_complex(c))?;
    Ok(BarSpace {
        ambient_gram,
        tilde_partial,
        chart,
        bar_t,
        t: tspace,
    })
}

impl<F: Field> BarSpace<F> {
    pub fn dim(&self) -> usize {
        self.bar_t.dim()
    }

    fn vstar_dim(&self) -> usize {
        2 * self.t.tuple().m()
    }

    /// Image of `V*` in `T̄`, in the coordinates of `bar_t`.
    pub fn vstar_image(&self) -> Result<Subspace<F>> {
        let f = self.t.field();
        let n = self.ambient_gram.rows();
        let rows: Vec<_> = (0..self.vstar_dim()).map(|i| f.unit_vec(n, i)).collect();
        let proj = self
            .chart
            .project_rows(&Matrix::from_rows(f, n, &rows))
            .ok_or_else(|| MaslovError::consistency("projection to T̄ failed"))?;
        Ok(Subspace::row_space(&proj))
    }

    /// `T` as the quadratic subquotient of `T̄` by the image of `V*`: the map
    /// `a ↦ 0 ⊕ a` sends the basis of `T` isometrically onto `I^⊥ / I`.
    pub fn subquotient_witness(&self) -> Result<(Subquotient<F>, Matrix<F>)> {
        let f = self.t.field();
        let vd = self.vstar_dim();
        let reps = self.t.basis();
        let embedded = Matrix::zeros(f, reps.rows(), vd).hstack(reps);
        let x = self
            .chart
            .project_rows(&embedded)
            .ok_or_else(|| MaslovError::consistency("projection to T̄ failed"))?;
        let sq = quadratic_subquotient(&self.bar_t, &self.vstar_image()?)?;
        let iso = sq.certify_embedding(&x, self.t.gram())?;
        Ok((sq, iso))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::instances::{random_tuple, rng_from_seed, three_lines, TupleShape};

    #[test]
    fn three_lines_bar_dim_is_five() {
        let b = bar_space(&three_lines(&Rationals)).unwrap();
        assert_eq!(b.dim(), 5);
        let (sq, _) = b.subquotient_witness().unwrap();
        assert_eq!(sq.dim(), 1);
    }

    #[test]
    fn equal_lines_have_bar_dim_two() {
        let q = Rationals;
        let mut rng = rng_from_seed(0);
        let t = random_tuple(&q, 1, 3, TupleShape::AllEqual, &mut rng);
        let b = bar_space(&t).unwrap();
        assert_eq!(b.dim(), 2);
        let (sq, _) = b.subquotient_witness().unwrap();
        assert_eq!(sq.dim(), 0);
    }

    #[test]
    fn witness_on_random_tuples() {
        let f = PrimeField::new(5).unwrap();
        let mut rng = rng_from_seed(12);
        for shape in [
            TupleShape::Generic,
            TupleShape::Repeats,
            TupleShape::CommonLine,
        ] {
            let t = random_tuple(&f, 2, 5, shape, &mut rng);
            let b = bar_space(&t).unwrap();
            b.subquotient_witness().unwrap();
        }
    }
}
