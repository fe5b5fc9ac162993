//! Kashiwara's form on `l_1 ⊕ l_2 ⊕ l_3` and its comparison with `T_{1,2,3}`.
//!
//! `q^Kash(v, w) = ½ (B(v_1, w_2 − w_3) + B(v_2, w_3 − w_1) + B(v_3, w_1 − w_2))`.

use crate::error::{ensure, MaslovError, Result};
use crate::field::{vec_sub, Field, Scalar};
use crate::matrix::Matrix;
use crate::subspace::Subspace;
use crate::symplectic::{LagrangianTuple, SymplecticSpace};

use super::forms::{BilinearSpace, QuadraticSpace};
use super::kspace::{compute_t, TSpace};
use super::subquotient::{certify_in_bilinear, Subquotient};

/// Gram of `q^Kash` in block coordinates relative to the canonical bases of `l1, l2, l3`.
pub fn kashiwara_form<F: Field>(
    space: &SymplecticSpace<F>,
    l1: &Subspace<F>,
    l2: &Subspace<F>,
    l3: &Subspace<F>,
) -> BilinearSpace<F> {
    let f = space.field();
    let m = space.m();
    let ls = [l1.basis(), l2.basis(), l3.basis()];
    let half = f.half();
    let mut g = Matrix::zeros(f, 3 * m, 3 * m);
    for i in 0..3 {
        for (j, sign) in [((i + 1) % 3, half.clone()), ((i + 2) % 3, -half.clone())] {
            g.set_block(
                i * m,
                j * m,
                &space.pairing_matrix(ls[i], ls[j]).scale(&sign),
            );
        }
    }
    BilinearSpace::new(g).expect("Kashiwara's form is symmetric")
}

#[derive(Clone, Debug)]
pub struct KashiwaraCertificate<F: Field> {
    pub kash: BilinearSpace<F>,
    /// `I = l_1 ⊕ 0 ⊕ 0`.
    pub isotropic: Subspace<F>,
    /// `I^⊥ = {v : v_2 − v_3 ∈ l_1}`.
    pub perp: Subspace<F>,
    /// Images of the basis of `I^⊥` under `(v_1, v_2, v_3) ↦ (v_2 − v_3, −v_2, v_3)`.
    pub map_on_perp: Matrix<F>,
    pub t: TSpace<F>,
    /// Non-degenerate part of `q^Kash` and the subquotient carrying `T`.
    pub kash_nondegenerate: QuadraticSpace<F>,
    pub subquotient: Subquotient<F>,
    pub isometry: Matrix<F>,
}

pub fn kashiwara_compare<F: Field>(t: &LagrangianTuple<F>) -> Result<KashiwaraCertificate<F>> {
    if t.n() != 3 {
        return Err(MaslovError::InvalidTuple(format!(
            "Kashiwara comparison needs n = 3, got {}",
            t.n()
        )));
    }
    let f = t.field();
    let m = t.m();
    let space = t.space();
    let (l1, l2, l3) = (t.l(0), t.l(1), t.l(2));
    let kash = kashiwara_form(space, l1, l2, l3);
    let isotropic = Subspace::span(
        f,
        3 * m,
        &(0..m).map(|r| f.unit_vec(3 * m, r)).collect::<Vec<_>>(),
    );
    ensure(isotropic.is_isotropic(&kash.gram), || {
        "l_1 is not isotropic for q^Kash".into()
    })?;
    let perp = isotropic.orthogonal(&kash.gram);

    // {(a_1, a_2, a_3) : a_2·L_2 − a_3·L_3 ∈ l_1}, a_1 free
    let mut cond = Matrix::zeros(f, 2 * m, 3 * m);
    for r in 0..m {
        let p2 = l1.reduce(l2.basis().row(r));
        let p3 = l1.reduce(l3.basis().row(r));
        for c in 0..2 * m {
            cond[(c, m + r)] = p2[c].clone();
            cond[(c, 2 * m + r)] = -p3[c].clone();
        }
    }
    ensure(Subspace::kernel(&cond) == perp, || {
        "I^⊥ differs from {v : v_2 − v_3 ∈ l_1}".into()
    })?;

    let tspace = compute_t(t)?;
    let k = &tspace.k;
    let lemma_map = |a: &[F::Elem]| -> Result<Vec<F::Elem>> {
        let v2 = l2.from_coordinates(&a[m..2 * m]);
        let v3 = l3.from_coordinates(&a[2 * m..]);
        let mut out = l1.coordinates(&vec_sub(&v2, &v3))?;
        out.extend(a[m..2 * m].iter().map(|x| -x.clone()));
        out.extend(a[2 * m..].iter().cloned());
        Ok(out)
    };
    let rows: Result<Vec<_>> = perp.basis_vecs().iter().map(|a| lemma_map(a)).collect();
    let map_on_perp = Matrix::from_rows(f, 3 * m, &rows?);
    for row in map_on_perp.row_vecs() {
        ensure(k.contains(&row), || "Lemma map does not land in K".into())?;
    }
    ensure(
        k.form.restrict_form(&map_on_perp) == kash.gram.restrict_form(perp.basis()),
        || "Lemma map is not an isometry I^⊥ → K".into(),
    )?;
    ensure(Subspace::row_space(&map_on_perp) == k.subspace, || {
        "Lemma map is not onto K".into()
    })?;
    let ker = map_on_perp.left_kernel_basis().dot(perp.basis());
    ensure(Subspace::row_space(&ker) == isotropic, || {
        "kernel of the Lemma map is not I".into()
    })?;

    // lift the basis of T to I^⊥ through the Lemma map
    let lift_rows: Option<Vec<_>> = tspace
        .basis()
        .row_vecs()
        .iter()
        .map(|v| {
            map_on_perp
                .transpose()
                .solve(v)
                .map(|c| perp.basis().vec_mul(&c))
        })
        .collect();
    let lifted = Matrix::from_rows(
        f,
        3 * m,
        &lift_rows.ok_or_else(|| MaslovError::consistency("T does not lift to I^⊥"))?,
    );
    let (kash_nondegenerate, subquotient, isometry) =
        certify_in_bilinear(&kash, &isotropic, &lifted, tspace.gram())?;
    debug_assert!(isometry.det().inv().is_some() || isometry.rows() == 0);
    Ok(KashiwaraCertificate {
        kash,
        isotropic,
        perp,
        map_on_perp,
        t: tspace,
        kash_nondegenerate,
        subquotient,
        isometry,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::instances::{random_tuple, rng_from_seed, three_lines, TupleShape};

    #[test]
    fn equal_lagrangians_have_zero_kashiwara_form() {
        let f = PrimeField::new(5).unwrap();
        let mut rng = rng_from_seed(9);
        let t = random_tuple(&f, 2, 3, TupleShape::AllEqual, &mut rng);
        let c = kashiwara_compare(&t).unwrap();
        assert!(c.kash.gram.is_zero());
    }

    #[test]
    fn three_lines_over_q() {
        let c = kashiwara_compare(&three_lines(&Rationals)).unwrap();
        assert_eq!(c.kash_nondegenerate.dim(), 3);
        assert_eq!(c.subquotient.dim(), 1);
        assert_eq!(c.subquotient.splitting.isotropic.rows(), 1);
    }

    #[test]
    fn random_triples_over_f7() {
        let f = PrimeField::new(7).unwrap();
        let mut rng = rng_from_seed(31);
        for shape in [
            TupleShape::Generic,
            TupleShape::Repeats,
            TupleShape::CommonLine,
        ] {
            for m in 1..=3 {
                let t = random_tuple(&f, m, 3, shape, &mut rng);
                kashiwara_compare(&t).unwrap();
            }
        }
    }

    #[test]
    fn needs_three_lagrangians() {
        let q = Rationals;
        let t = crate::instances::lines(&q, &[(1, 0), (0, 1), (1, 1), (1, 2)]);
        assert!(kashiwara_compare(&t).is_err());
    }
}
