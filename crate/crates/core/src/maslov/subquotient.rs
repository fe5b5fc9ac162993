//! Quadratic subquotients `I^⊥ / I` and the hyperbolic splitting that shows they
//! have the Witt class of the ambient space.

use crate::error::{ensure, MaslovError, Result};
use crate::field::Field;
use crate::matrix::Matrix;
use crate::subspace::Subspace;

use super::forms::{BilinearSpace, QuadraticSpace, QuotientChart};

/// `T ≅ H ⊥ S'` with `H = span(U, M'')` hyperbolic and `S' = H^⊥` mapping
/// isometrically onto `I^⊥ / I`.
#[derive(Clone, Debug)]
pub struct HyperbolicSplitting<F: Field> {
    /// Basis of `I`.
    pub isotropic: Matrix<F>,
    /// Dual partners with `U G M''ᵀ = 1` and `M'' G M''ᵀ = 0`.
    pub partner: Matrix<F>,
    /// Basis of `S' = H^⊥`.
    pub complement: Matrix<F>,
}

#[derive(Clone, Debug)]
pub struct Subquotient<F: Field> {
    pub perp: Subspace<F>,
    /// `I^⊥ = I ⊕ S'`, coordinates on the `S'` part.
    pub chart: QuotientChart<F>,
    /// The form on `I^⊥ / I` in the basis of `splitting.complement`.
    pub quadratic: QuadraticSpace<F>,
    pub splitting: HyperbolicSplitting<F>,
}

pub fn quadratic_subquotient<F: Field>(
    space: &QuadraticSpace<F>,
    i: &Subspace<F>,
) -> Result<Subquotient<F>> {
    let f = space.field().clone();
    let g = &space.gram;
    let d = space.dim();
    if i.ambient_dim() != d {
        return Err(MaslovError::DimensionMismatch {
            expected: d,
            got: i.ambient_dim(),
        });
    }
    if !i.is_isotropic(g) {
        return Err(MaslovError::NotIsotropic(
            "form does not vanish on I".into(),
        ));
    }
    let k = i.dim();
    let perp = i.orthogonal(g);
    let u = i.basis().clone();
    let m = Matrix::from_rows(&f, d, &perp.quotient_reps(&Subspace::full(&f, d))?);
    let pairing = u.dot(g).dot(&m.transpose());
    let pinv = pairing.inverse().ok_or_else(|| {
        MaslovError::consistency("I does not pair perfectly with a complement of I^⊥")
    })?;
    let m1 = pinv.transpose().dot(&m);
    let qm = g.restrict_form(&m1);
    let partner = m1.sub(&qm.dot(&u).scale(&f.half()));

    let h = u.vstack(&partner);
    let expect = Matrix::from_blocks(
        &f,
        &[
            vec![Matrix::zeros(&f, k, k), Matrix::identity(&f, k)],
            vec![Matrix::identity(&f, k), Matrix::zeros(&f, k, k)],
        ],
    );
    ensure(g.restrict_form(&h) == expect, || {
        "span(I, M'') is not a standard hyperbolic space".into()
    })?;
    let complement = Subspace::kernel(&h.dot(g)).basis().clone();
    ensure(h.vstack(&complement).rank() == d, || {
        "H and H^⊥ do not span the space".into()
    })?;
    ensure(
        perp.contains_subspace(&Subspace::row_space(&complement))?,
        || "H^⊥ is not inside I^⊥".into(),
    )?;
    let quadratic = QuadraticSpace::new(g.restrict_form(&complement))
        .map_err(|e| MaslovError::consistency(format!("form on H^⊥: {e}")))?;
    let chart = QuotientChart::from_parts(complement.clone(), u.clone());
    Ok(Subquotient {
        perp,
        chart,
        quadratic,
        splitting: HyperbolicSplitting {
            isotropic: u,
            partner,
            complement,
        },
    })
}

impl<F: Field> Subquotient<F> {
    pub fn dim(&self) -> usize {
        self.quadratic.dim()
    }

    /// Coordinates in `I^⊥ / I` of a vector of `I^⊥`.
    pub fn class_of(&self, x: &[F::Elem]) -> Result<Vec<F::Elem>> {
        if !self.perp.contains(x)? {
            return Err(MaslovError::NotContained("vector is not in I^⊥".into()));
        }
        self.chart
            .project(x)
            .ok_or_else(|| MaslovError::consistency("I^⊥ ≠ I ⊕ S'"))
    }

    /// Checks that the rows of `x` (all in `I^⊥`) carry Gram `target` and map
    /// bijectively onto `I^⊥ / I`. Returns the matrix of the induced isometry.
    pub fn certify_embedding(&self, x: &Matrix<F>, target: &Matrix<F>) -> Result<Matrix<F>> {
        let rows: Result<Vec<_>> = x.row_vecs().iter().map(|r| self.class_of(r)).collect();
        let y = Matrix::from_rows(x.field(), self.dim(), &rows?);
        ensure(y.rows() == self.dim(), || {
            format!(
                "{} vectors cannot span I^⊥/I of dim {}",
                y.rows(),
                self.dim()
            )
        })?;
        ensure(self.quadratic.gram.restrict_form(&y) == *target, || {
            "embedded Gram differs from the target".into()
        })?;
        ensure(y.rank() == self.dim(), || {
            "embedding is not injective".into()
        })?;
        Ok(y)
    }
}

/// Subquotient of a possibly degenerate space, taken on its non-degenerate part.
/// `i` and the rows of `x` are given in the ambient coordinates of `b`.
pub fn certify_in_bilinear<F: Field>(
    b: &BilinearSpace<F>,
    i: &Subspace<F>,
    x: &Matrix<F>,
    target: &Matrix<F>,
) -> Result<(QuadraticSpace<F>, Subquotient<F>, Matrix<F>)> {
    let (q, chart) = b.nondegenerate_part();
    let proj = |m: &Matrix<F>| {
        chart
            .project_rows(m)
            .ok_or_else(|| MaslovError::consistency("projection to the non-degenerate part failed"))
    };
    let i_proj = Subspace::row_space(&proj(i.basis())?);
    let sq = quadratic_subquotient(&q, &i_proj)?;
    let iso = sq.certify_embedding(&proj(x)?, target)?;
    Ok((q, sq, iso))
}
