//! The chain condition: `T_{1..k} ⊕ T_{1,k..n}` is a quadratic subquotient of `T_{1..n}`,
//! isometric to `T_{1..n}` itself when `l_1 ∩ l_k = 0`.
//!
//! `k` is 1-based here, matching the indexing `l_1, …, l_n`.

use crate::error::{ensure, MaslovError, Result};
use crate::field::Field;
use crate::matrix::Matrix;
use crate::subspace::Subspace;
use crate::symplectic::LagrangianTuple;

use super::kspace::{compute_t, TSpace};
use super::subquotient::{quadratic_subquotient, Subquotient};

#[derive(Clone, Debug)]
pub struct ChainSplit<F: Field> {
    pub k: usize,
    pub whole: TSpace<F>,
    /// `T_{1..k}`.
    pub first: TSpace<F>,
    /// `T_{1,k..n}`.
    pub second: TSpace<F>,
    /// `s`: block placement `⊕_{1..k} l_i ⊕ ⊕_{1,k..n} l_i → ⊕_{1..n} l_i`, acting on row vectors.
    pub s: Matrix<F>,
    /// `I = image(s ∘ r)` in `T_{1..n}` coordinates.
    pub isotropic: Subspace<F>,
    pub subquotient: Subquotient<F>,
    /// Isometry `T_{1..k} ⊕ T_{1,k..n} → I^⊥ / I`.
    pub isometry: Matrix<F>,
    /// `l_1 ∩ l_k = 0`, so `I = 0` and the isometry is onto `T_{1..n}`.
    pub transverse: bool,
}

impl<F: Field> ChainSplit<F> {
    /// Gram of `T_{1..k} ⊕ T_{1,k..n}`.
    pub fn sum_gram(&self) -> Matrix<F> {
        self.first.gram().direct_sum(self.second.gram())
    }
}

pub fn chain_split<F: Field>(t: &LagrangianTuple<F>, k: usize) -> Result<ChainSplit<F>> {
    let n = t.n();
    if k < 3 || k + 1 > n {
        return Err(MaslovError::InvalidIndex(format!(
            "k = {k} must satisfy 3 ≤ k ≤ n − 1 = {}",
            n.saturating_sub(1)
        )));
    }
    let f = t.field();
    let m = t.m();
    let first_idx: Vec<usize> = (0..k).collect();
    let second_idx: Vec<usize> = std::iter::once(0).chain(k - 1..n).collect();
    let whole = compute_t(t)?;
    let first = compute_t(&t.select(&first_idx))?;
    let second = compute_t(&t.select(&second_idx))?;

    let src_blocks: Vec<usize> = first_idx.iter().chain(&second_idx).copied().collect();
    let mut s = Matrix::zeros(f, src_blocks.len() * m, n * m);
    for (b, &target) in src_blocks.iter().enumerate() {
        for r in 0..m {
            s[(b * m + r, target * m + r)] = f.one();
        }
    }
    let d1 = k * m;

    // s is an isometry of K-spaces with no cross terms
    let k1 = first.k.basis();
    let k2 = second.k.basis();
    let embed = |a: &Matrix<F>, offset: usize| {
        let mut full = Matrix::zeros(f, a.rows(), s.rows());
        full.set_block(0, offset, a);
        full.dot(&s)
    };
    let sk = embed(k1, 0).vstack(&embed(k2, d1));
    for row in sk.row_vecs() {
        ensure(whole.k.contains(&row), || "s does not map into K".into())?;
    }
    ensure(
        whole.k.form.restrict_form(&sk) == first.k.gram.direct_sum(&second.k.gram),
        || "s is not an isometry of K-spaces".into(),
    )?;

    // r: l_1 ∩ l_k → K_{1..k}, v ↦ (−v at l_1, v at l_k); image s∘r in K_{1..n}
    let meet = t.l(0).intersect(t.l(k as isize - 1))?;
    let mut sr_rows = Vec::new();
    for u in meet.basis_vecs() {
        let mut a = f.zero_vec(n * m);
        let c0 = t.l(0).coordinates(&u)?;
        let ck = t.l(k as isize - 1).coordinates(&u)?;
        for r in 0..m {
            a[r] = a[r].clone() - c0[r].clone();
            a[(k - 1) * m + r] = a[(k - 1) * m + r].clone() + ck[r].clone();
        }
        ensure(whole.k.contains(&a), || "s ∘ r does not land in K".into())?;
        sr_rows.push(a);
    }
    let sr = Matrix::from_rows(f, n * m, &sr_rows);

    // image s = (image s∘r)^⊥ inside K
    let kcoords = |m: &Matrix<F>| -> Result<Matrix<F>> {
        let rows: Result<Vec<_>> = m
            .row_vecs()
            .iter()
            .map(|r| whole.k.subspace.coordinates(r))
            .collect();
        Ok(Matrix::from_rows(f, whole.k.dim(), &rows?))
    };
    let sr_k = Subspace::row_space(&kcoords(&sr)?);
    let perp_k = sr_k.orthogonal(&whole.k.gram);
    let image_s = Subspace::row_space(&kcoords(&sk)?);
    ensure(perp_k == image_s, || {
        "image of s is not (image s∘r)^⊥".into()
    })?;

    let project = |m: &Matrix<F>| -> Result<Matrix<F>> {
        let rows: Result<Vec<_>> = m.row_vecs().iter().map(|r| whole.project(r)).collect();
        Ok(Matrix::from_rows(f, whole.dim(), &rows?))
    };
    let isotropic = Subspace::row_space(&project(&sr)?);
    let x = project(&embed(first.basis(), 0).vstack(&embed(second.basis(), d1)))?;
    let subquotient = quadratic_subquotient(&whole.quadratic, &isotropic)?;
    let target = first.gram().direct_sum(second.gram());
    let isometry = subquotient.certify_embedding(&x, &target)?;
    let transverse = meet.is_zero();
    if transverse {
        ensure(
            isotropic.is_zero() && isometry.rows() == whole.dim(),
            || "transverse split is not an isomorphism onto T".into(),
        )?;
    }
    Ok(ChainSplit {
        k,
        whole,
        first,
        second,
        s,
        isotropic,
        subquotient,
        isometry,
        transverse,
    })
}
