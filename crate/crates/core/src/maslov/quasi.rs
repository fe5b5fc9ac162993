//! The explicit symmetric quasi-isomorphism `Φ: C → C*` and the factorization
//! `C → D → D* → C*` through the cone of `Φ`.
//!
//! Duals are identified with coordinate spaces through dual bases, so `Σ*` is `Σᵀ`,
//! `∂*` is `∂ᵀ` and a functional `φ` on `V` acts by `v ↦ φᵀ v`.

use crate::error::{ensure, MaslovError, Result};
use crate::field::Field;
use crate::matrix::Matrix;
use crate::subspace::Subspace;
use crate::symplectic::LagrangianTuple;

use super::complex::{build_complex, Complex3, MaslovComplex};
use super::forms::{QuadraticSpace, QuotientChart};
use super::kspace::k_of_complex;

/// Vertical maps `Φ_{-1}: C^{-1} → (C^1)*`, `Φ_0: C^0 → (C^0)*`, `Φ_1: C^1 → (C^{-1})*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiIso<F: Field> {
    pub phi_minus1: Matrix<F>,
    pub phi_0: Matrix<F>,
    pub phi_1: Matrix<F>,
}

/// `⟨Φ_{-1}(a), v⟩ = B(a_{n,1}, v)` and `⟨Φ_0 a, b⟩ = ½ Σ_{i≥j} (B(a_i, b_j) + B(b_i, a_j))`.
pub fn explicit_quasi_iso<F: Field>(
    t: &LagrangianTuple<F>,
) -> Result<(MaslovComplex<F>, QuasiIso<F>)> {
    t.require_n_at_least(3)?;
    let c = build_complex(t);
    let q = explicit_for(&c);
    Ok((c, q))
}

pub(crate) fn explicit_for<F: Field>(c: &MaslovComplex<F>) -> QuasiIso<F> {
    let f = c.field();
    let n = c.n();
    let m = c.m();
    let g = c.explicit_form();
    let phi_0 = g.add(&g.transpose()).scale(&f.half());
    let jt = c.tuple.space().gram_j().transpose();
    // only the closing edge {n−1, 0} contributes; the functional of B(u, ·) is Jᵀu
    let mut phi_minus1 = Matrix::zeros(f, 2 * m, c.edge_dim());
    let last = n - 1;
    for (k, u) in c.edge_bases[last].row_vecs().iter().enumerate() {
        let col = jt.mul_vec(u);
        for (r, x) in col.into_iter().enumerate() {
            phi_minus1[(r, c.edge_offsets[last] + k)] = x;
        }
    }
    let phi_1 = phi_minus1.transpose();
    QuasiIso {
        phi_minus1,
        phi_0,
        phi_1,
    }
}

/// Both squares commute and `Φ = Φ*`; errors name the failing identity.
pub fn check_chain_map<F: Field>(c: &Complex3<F>, phi: &QuasiIso<F>) -> Result<()> {
    let (a, b, cc) = c.dims();
    let shapes = [
        (phi.phi_minus1.shape(), (cc, a)),
        (phi.phi_0.shape(), (b, b)),
        (phi.phi_1.shape(), (a, cc)),
    ];
    for (got, want) in shapes {
        if got != want {
            return Err(MaslovError::precondition(format!(
                "quasi-isomorphism component has shape {got:?}, expected {want:?}"
            )));
        }
    }
    if c.d_right.transpose().dot(&phi.phi_minus1) != phi.phi_0.dot(&c.d_left) {
        return Err(MaslovError::precondition("Σ* ∘ Φ_{-1} ≠ Φ_0 ∘ ∂"));
    }
    if c.d_left.transpose().dot(&phi.phi_0) != phi.phi_1.dot(&c.d_right) {
        return Err(MaslovError::precondition("∂* ∘ Φ_0 ≠ Φ_1 ∘ Σ"));
    }
    if !phi.phi_0.is_symmetric() {
        return Err(MaslovError::precondition("Φ_0 is not symmetric"));
    }
    if phi.phi_1 != phi.phi_minus1.transpose() {
        return Err(MaslovError::precondition("Φ_1 ≠ Φ_{-1}*"));
    }
    Ok(())
}

/// `Φ_0` restricted to `K` equals the Gram of `q`.
pub fn check_induces_q<F: Field>(c: &MaslovComplex<F>, phi: &QuasiIso<F>) -> Result<()> {
    let k = k_of_complex(c.clone());
    ensure(phi.phi_0.restrict_form(k.basis()) == k.gram, || {
        "Φ_0 does not induce q on K".into()
    })
}

/// The cone construction: `D^0 = (C^0 ⊕ (C^1)*) / image f_{-1}` with the form induced by `f_0`.
#[derive(Clone, Debug)]
pub struct Factorization<F: Field> {
    /// `f_{-1} = (d; −Φ_{-1})`, `C^{-1} → C^0 ⊕ (C^1)*`.
    pub f_minus1: Matrix<F>,
    /// `f_0 = [[Φ_0, d*], [d, 0]]` on `C^0 ⊕ (C^1)*`.
    pub f0_ambient: Matrix<F>,
    pub chart: QuotientChart<F>,
    /// Symmetric isomorphism `D^0 → (D^0)*`.
    pub f0: QuadraticSpace<F>,
    /// `b: C^0 → D^0`.
    pub b: Matrix<F>,
    /// `c: (C^1)* → D^0`.
    pub c: Matrix<F>,
    /// `e: D^0 → C^1`, induced by `(d, 0)`.
    pub e: Matrix<F>,
}

impl<F: Field> Factorization<F> {
    pub fn d0_dim(&self) -> usize {
        self.f0.dim()
    }
}

pub fn factor_quasi_iso<F: Field>(c: &Complex3<F>, phi: &QuasiIso<F>) -> Result<Factorization<F>> {
    check_chain_map(c, phi)?;
    let f = c.d_left.field().clone();
    let (a, b, cc) = c.dims();
    let f_minus1 = c.d_left.vstack(&phi.phi_minus1.neg());
    let f0_ambient = Matrix::from_blocks(
        &f,
        &[
            vec![phi.phi_0.clone(), c.d_right.transpose()],
            vec![c.d_right.clone(), Matrix::zeros(&f, cc, cc)],
        ],
    );
    if f_minus1.rank() != a {
        return Err(MaslovError::precondition(
            "Φ is not a quasi-isomorphism: f_{-1} is not injective",
        ));
    }
    let image = Subspace::row_space(&f_minus1.transpose());
    if Subspace::kernel(&f0_ambient) != image {
        return Err(MaslovError::precondition(
            "Φ is not a quasi-isomorphism: ker f_0 ≠ image f_{-1}",
        ));
    }
    let chart = QuotientChart::new(&Subspace::full(&f, b + cc), &image)?;
    let f0 = QuadraticSpace::new(f0_ambient.restrict_form(&chart.reps))
        .map_err(|e| MaslovError::consistency(format!("form on D^0: {e}")))?;
    let project_cols = |m: &Matrix<F>| -> Result<Matrix<F>> {
        let rows = chart
            .project_rows(&m.transpose())
            .ok_or_else(|| MaslovError::consistency("projection to D^0 failed"))?;
        Ok(rows.transpose())
    };
    let inc0 = Matrix::identity(&f, b).vstack(&Matrix::zeros(&f, cc, b));
    let inc1 = Matrix::zeros(&f, b, cc).vstack(&Matrix::identity(&f, cc));
    let bm = project_cols(&inc0)?;
    let cm = project_cols(&inc1)?;
    let e = c
        .d_right
        .hstack(&Matrix::zeros(&f, cc, cc))
        .dot(&chart.reps.transpose());
    Ok(Factorization {
        f_minus1,
        f0_ambient,
        chart,
        f0,
        b: bm,
        c: cm,
        e,
    })
}

/// Every square of the factorization diagram, and the induced isomorphism on `H^0`.
pub fn check_factorization<F: Field>(
    c: &Complex3<F>,
    phi: &QuasiIso<F>,
    fz: &Factorization<F>,
) -> Result<()> {
    let f0 = &fz.f0.gram;
    let checks: [(&str, bool); 8] = [
        (
            "c ∘ Φ_{-1} = b ∘ d",
            fz.c.dot(&phi.phi_minus1) == fz.b.dot(&c.d_left),
        ),
        ("e ∘ b = d", fz.e.dot(&fz.b) == c.d_right),
        ("e ∘ c = 0", fz.e.dot(&fz.c).is_zero()),
        ("e* = f_0 ∘ c", fz.e.transpose() == f0.dot(&fz.c)),
        ("c* ∘ f_0 = e", fz.c.transpose().dot(f0) == fz.e),
        (
            "b* ∘ f_0 ∘ b = Φ_0",
            fz.b.transpose().dot(f0).dot(&fz.b) == phi.phi_0,
        ),
        (
            "b* ∘ e* = d*",
            fz.b.transpose().dot(&fz.e.transpose()) == c.d_right.transpose(),
        ),
        (
            "Φ_{-1}* ∘ c* = d* ∘ b*",
            phi.phi_minus1.transpose().dot(&fz.c.transpose())
                == c.d_left.transpose().dot(&fz.b.transpose()),
        ),
    ];
    for (name, ok) in checks {
        ensure(ok, || format!("factorization square fails: {name}"))?;
    }
    ensure(fz.f0.gram.is_symmetric(), || "f_0 is not symmetric".into())?;

    // H^0(C) → H^0(D) is an isomorphism
    let ker_d = Subspace::kernel(&c.d_right);
    let ker_e = Subspace::kernel(&fz.e);
    let im_c = Subspace::row_space(&fz.c.transpose());
    let b_ker = Subspace::row_space(&ker_d.basis().dot(&fz.b.transpose()));
    ensure(ker_e.contains_subspace(&b_ker)?, || {
        "b(ker d) ⊄ ker e".into()
    })?;
    ensure(b_ker.sum(&im_c)? == ker_e, || {
        "H^0(C) → H^0(D) is not onto".into()
    })?;
    let (_, h0c, _) = c.cohomology_dims();
    ensure(ker_e.dim() - im_c.dim() == h0c, || {
        format!(
            "dim H^0(D) = {} but dim H^0(C) = {h0c}",
            ker_e.dim() - im_c.dim()
        )
    })?;
    Ok(())
}

/// Factorization applied to the Maslov complex with its explicit `Φ`.
pub fn factor_maslov<F: Field>(
    t: &LagrangianTuple<F>,
) -> Result<(MaslovComplex<F>, QuasiIso<F>, Factorization<F>)> {
    let (c, phi) = explicit_quasi_iso(t)?;
    let fz = factor_quasi_iso(&c.complex, &phi)?;
    Ok((c, phi, fz))
}
