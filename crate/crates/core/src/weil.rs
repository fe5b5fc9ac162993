//! The finite Heisenberg group, its models `H(l)` on functions `φ: V → ℂ` with
//! `φ(x + a) = [x, a]·φ(x)` for `a ∈ l`, the canonical intertwiners, and the
//! scalar obtained by composing them around a cycle of Lagrangians.
//!
//! The bracket is `[x, a] = ψ(½B(x, a))`.

use std::collections::HashMap;

use nalgebra::DMatrix;
pub use num::complex::Complex64;

use crate::error::{MaslovError, Result};
use crate::field::{vec_add, vec_is_zero, vec_neg, vec_sub, Field, Fp, PrimeField, Scalar};
use crate::maslov::dual::decompose;
use crate::maslov::{compute_t, dual_form};
use crate::subspace::Subspace;
use crate::symplectic::{LagrangianTuple, SymplecticSpace};
use crate::witt::{anisotropic_kernel, gamma, AdditiveCharacter, WittClass};

pub type ComplexMatrix = DMatrix<Complex64>;

pub const TOLERANCE: f64 = 1e-9;
/// Largest `p^m` for which models are built unless a caller raises it.
pub const DEFAULT_MAX_MODEL_DIM: usize = 125;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HeisenbergElement {
    pub v: Vec<Fp>,
    pub t: Fp,
}

impl HeisenbergElement {
    pub fn identity(field: &PrimeField, m: usize) -> Self {
        HeisenbergElement {
            v: field.zero_vec(2 * m),
            t: field.zero(),
        }
    }

    pub fn random<R: rand::Rng + ?Sized>(space: &SymplecticSpace<PrimeField>, rng: &mut R) -> Self {
        let f = space.field();
        HeisenbergElement {
            v: (0..space.dim()).map(|_| f.random(rng)).collect(),
            t: f.random(rng),
        }
    }
}

/// `(v, s)·(w, t) = (v + w, s + t + ½B(v, w))`.
pub fn heis_mul(
    space: &SymplecticSpace<PrimeField>,
    g: &HeisenbergElement,
    h: &HeisenbergElement,
) -> HeisenbergElement {
    let half = space.field().half();
    HeisenbergElement {
        v: vec_add(&g.v, &h.v),
        t: g.t + h.t + half * space.b(&g.v, &h.v),
    }
}

pub fn heis_inv(g: &HeisenbergElement) -> HeisenbergElement {
    HeisenbergElement {
        v: vec_neg(&g.v),
        t: -g.t,
    }
}

/// `H(l)` stored by its values on a fixed transversal of `V/l`.
#[derive(Clone, Debug)]
pub struct ReprModel {
    space: SymplecticSpace<PrimeField>,
    lagrangian: Subspace<PrimeField>,
    psi: AdditiveCharacter,
    coset_reps: Vec<Vec<Fp>>,
    index: HashMap<Vec<Fp>, usize>,
}

impl ReprModel {
    pub fn new(
        space: &SymplecticSpace<PrimeField>,
        lagrangian: &Subspace<PrimeField>,
        psi: &AdditiveCharacter,
    ) -> Result<Self> {
        Self::with_limit(space, lagrangian, psi, DEFAULT_MAX_MODEL_DIM)
    }

    pub fn with_limit(
        space: &SymplecticSpace<PrimeField>,
        lagrangian: &Subspace<PrimeField>,
        psi: &AdditiveCharacter,
        max_dim: usize,
    ) -> Result<Self> {
        let f = *space.field();
        if psi.field() != &f {
            return Err(MaslovError::FieldMismatch(psi.field().name(), f.name()));
        }
        if !space.is_lagrangian(lagrangian) {
            return Err(MaslovError::precondition(
                "model needs a Lagrangian subspace",
            ));
        }
        let m = space.m();
        let size = (f.p() as usize)
            .checked_pow(m as u32)
            .filter(|&s| s <= max_dim)
            .ok_or_else(|| {
                MaslovError::precondition(format!(
                    "model dimension {}^{m} exceeds the limit {max_dim}",
                    f.p()
                ))
            })?;
        // complement unit vectors at the non-pivot columns, combined in base-p order
        let comp = lagrangian.complement_basis();
        let p = f.p() as usize;
        let coset_reps: Vec<Vec<Fp>> = (0..size)
            .map(|mut code| {
                let mut v = f.zero_vec(2 * m);
                for u in &comp {
                    let c = f.elem((code % p) as u64);
                    code /= p;
                    v = vec_add(&v, &u.iter().map(|x| *x * c).collect::<Vec<_>>());
                }
                v
            })
            .collect();
        // keyed by the canonical representative, which `reduce` returns
        let index = coset_reps
            .iter()
            .enumerate()
            .map(|(i, r)| (r.clone(), i))
            .collect();
        Ok(ReprModel {
            space: space.clone(),
            lagrangian: lagrangian.clone(),
            psi: *psi,
            coset_reps,
            index,
        })
    }

    pub fn dim(&self) -> usize {
        self.coset_reps.len()
    }

    /// The same model on the transversal `r_k + a_k` for random `a_k ∈ l`.
    pub fn shifted<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Self {
        let f = *self.space.field();
        let mut out = self.clone();
        for r in out.coset_reps.iter_mut() {
            let c: Vec<Fp> = (0..self.lagrangian.dim()).map(|_| f.random(rng)).collect();
            *r = vec_add(r, &self.lagrangian.from_coordinates(&c));
        }
        out
    }

    pub fn lagrangian(&self) -> &Subspace<PrimeField> {
        &self.lagrangian
    }

    pub fn coset_reps(&self) -> &[Vec<Fp>] {
        &self.coset_reps
    }

    pub fn psi(&self) -> &AdditiveCharacter {
        &self.psi
    }

    fn bracket(&self, x: &[Fp], a: &[Fp]) -> Complex64 {
        let half = self.space.field().half();
        self.psi.eval(&(half * self.space.b(x, a)))
    }

    /// `(k, a)` with `x = r_k + a`, `a ∈ l`.
    pub fn locate(&self, x: &[Fp]) -> (usize, Vec<Fp>) {
        let k = self.index[&self.lagrangian.reduce(x)];
        (k, vec_sub(x, &self.coset_reps[k]))
    }

    fn compatible(&self, other: &ReprModel) -> Result<()> {
        if self.space != other.space || self.psi != other.psi {
            return Err(MaslovError::precondition(
                "models over different spaces or characters",
            ));
        }
        Ok(())
    }
}

/// `ρ(v, t)φ(x) = φ(x − v)·[v, x]·ψ(t)` as a matrix on values at the coset representatives.
pub fn rho_matrix(model: &ReprModel, g: &HeisenbergElement) -> ComplexMatrix {
    let n = model.dim();
    let central = model.psi.eval(&g.t);
    let mut out = ComplexMatrix::zeros(n, n);
    for (a, x) in model.coset_reps.iter().enumerate() {
        let (k, alpha) = model.locate(&vec_sub(x, &g.v));
        let r = &model.coset_reps[k];
        out[(a, k)] += model.bracket(r, &alpha) * model.bracket(&g.v, x) * central;
    }
    out
}

/// `F_{j,i}: H(l_i) → H(l_j)`, `F φ(y) = p^{−d/2} Σ_{x − y = α + β} φ(x)·ψ(½(B(α, x) + B(β, y)))`
/// with `α ∈ l_i`, `β ∈ l_j`, `d = dim l_j/(l_i ∩ l_j)`.
pub fn intertwiner(from: &ReprModel, to: &ReprModel) -> Result<ComplexMatrix> {
    from.compatible(to)?;
    let li = &from.lagrangian;
    let lj = &to.lagrangian;
    let f = *from.space.field();
    let d = lj.dim() - li.intersect(lj)?.dim();
    let norm = (f.p() as f64).powf(-(d as f64) / 2.0);
    let half = f.half();
    let s = &from.space;
    // split each canonical basis vector of l_i + l_j once; coordinates do the rest
    let sum = li.sum(lj)?;
    let split: Vec<(Vec<Fp>, Vec<Fp>)> = sum
        .basis_vecs()
        .iter()
        .map(|u| decompose(li, lj, u).expect("basis vector of l_i + l_j"))
        .collect();
    let mut out = ComplexMatrix::zeros(to.dim(), from.dim());
    for (a, y) in to.coset_reps.iter().enumerate() {
        for (b, x) in from.coset_reps.iter().enumerate() {
            let w = vec_sub(x, y);
            let Ok(c) = sum.coordinates(&w) else {
                continue;
            };
            let mut e = f.zero();
            for (ck, (ak, bk)) in c.iter().zip(&split) {
                if !ck.is_zero() {
                    e = e + *ck * (s.b(ak, x) + s.b(bk, y));
                }
            }
            out[(a, b)] = from.psi.eval(&(half * e)) * norm;
        }
    }
    Ok(out)
}

pub fn models(t: &LagrangianTuple<PrimeField>, psi: &AdditiveCharacter) -> Result<Vec<ReprModel>> {
    t.lagrangians()
        .iter()
        .map(|l| ReprModel::new(t.space(), l, psi))
        .collect()
}

/// The composed cycle `F_{n−1,n−2} ∘ ⋯ ∘ F_{1,0} ∘ F_{0,n−1}` on `H(l_{n−1})`.
pub fn cycle_matrix(
    t: &LagrangianTuple<PrimeField>,
    psi: &AdditiveCharacter,
) -> Result<ComplexMatrix> {
    cycle_matrix_of(&models(t, psi)?)
}

/// The composed cycle for models of `l_0, …, l_{n−1}` in that order.
pub fn cycle_matrix_of(ms: &[ReprModel]) -> Result<ComplexMatrix> {
    let n = ms.len();
    let mut acc = intertwiner(&ms[n - 1], &ms[0])?;
    for i in 0..n - 1 {
        acc = intertwiner(&ms[i], &ms[i + 1])? * acc;
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CycleScalar {
    pub scalar: Complex64,
    /// `max |entry − scalar·δ|` of the composed matrix.
    pub off_scalar: f64,
}

pub fn cycle_scalar(
    t: &LagrangianTuple<PrimeField>,
    psi: &AdditiveCharacter,
    tol: f64,
) -> Result<CycleScalar> {
    t.require_n_at_least(3)?;
    scalar_of(&cycle_matrix(t, psi)?, tol)
}

/// Reads off the scalar of a composed cycle, failing if it is not scalar of modulus 1.
pub fn scalar_of(c: &ComplexMatrix, tol: f64) -> Result<CycleScalar> {
    let n = c.nrows();
    let scalar = c.trace() / n as f64;
    let off_scalar = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| {
            let target = if i == j {
                scalar
            } else {
                Complex64::new(0.0, 0.0)
            };
            (c[(i, j)] - target).norm()
        })
        .fold(0.0, f64::max);
    if off_scalar > tol {
        return Err(MaslovError::ToleranceBreach {
            what: "composed intertwiners are not scalar".into(),
            residual: off_scalar,
            tol,
        });
    }
    let modulus = (scalar.norm() - 1.0).abs();
    if modulus > tol {
        return Err(MaslovError::ToleranceBreach {
            what: "cycle scalar does not have modulus 1".into(),
            residual: modulus,
            tol,
        });
    }
    Ok(CycleScalar { scalar, off_scalar })
}

#[derive(Clone, Debug)]
pub struct TheoremCertificate {
    pub cycle: CycleScalar,
    /// Class of `(T, q)`.
    pub tau: WittClass,
    pub gamma_minus_tau: Complex64,
    pub mismatch: f64,
}

/// Compares the cycle scalar with `γ(−τ)` under the same character.
pub fn verify_theorem(
    t: &LagrangianTuple<PrimeField>,
    psi: &AdditiveCharacter,
    tol: f64,
) -> Result<TheoremCertificate> {
    let cycle = cycle_scalar(t, psi, tol)?;
    let ts = compute_t(t)?;
    let tau = anisotropic_kernel(t.field(), ts.gram());
    let gamma_minus_tau = gamma(&ts.gram().neg(), psi);
    let mismatch = (cycle.scalar - gamma_minus_tau).norm();
    if mismatch > tol {
        return Err(MaslovError::ToleranceBreach {
            what: "cycle scalar differs from γ(−τ)".into(),
            residual: mismatch,
            tol,
        });
    }
    Ok(TheoremCertificate {
        cycle,
        tau,
        gamma_minus_tau,
        mismatch,
    })
}

fn require_transverse_support(t: &LagrangianTuple<PrimeField>) -> Result<()> {
    if !t.common_intersection().is_zero() || t.total_sum().dim() != t.space().dim() {
        return Err(MaslovError::precondition(
            "trace formulas need ⋂ l_i = 0 and Σ l_i = V",
        ));
    }
    Ok(())
}

/// The intertwiners `F_{i+1,i}` of a cycle, whose kernels multiply to `J`.
#[derive(Clone, Debug)]
pub struct SigmaKernel {
    models: Vec<ReprModel>,
    factors: Vec<ComplexMatrix>,
}

impl SigmaKernel {
    pub fn new(t: &LagrangianTuple<PrimeField>, psi: &AdditiveCharacter) -> Result<Self> {
        require_transverse_support(t)?;
        let models = models(t, psi)?;
        let n = models.len();
        let factors = (0..n)
            .map(|i| intertwiner(&models[i], &models[(i + 1) % n]))
            .collect::<Result<_>>()?;
        Ok(SigmaKernel { models, factors })
    }

    /// `J(x) = Π_i F_{i+1,i}(x_{i+1}, x_i)` for `x ∈ ⊕ V/l_i`.
    pub fn eval(&self, x: &[Vec<Fp>]) -> Result<Complex64> {
        let n = self.models.len();
        if x.len() != n {
            return Err(MaslovError::DimensionMismatch {
                expected: n,
                got: x.len(),
            });
        }
        let idx: Vec<usize> = self
            .models
            .iter()
            .zip(x)
            .map(|(m, xi)| m.locate(xi).0)
            .collect();
        Ok((0..n).fold(Complex64::new(1.0, 0.0), |acc, i| {
            acc * self.factors[i][(idx[(i + 1) % n], idx[i])]
        }))
    }
}

/// The kernel of the composed cycle at `x ∈ ⊕ V/l_i`.
pub fn trace_sigma_kernel(
    t: &LagrangianTuple<PrimeField>,
    psi: &AdditiveCharacter,
    x: &[Vec<Fp>],
) -> Result<Complex64> {
    SigmaKernel::new(t, psi)?.eval(x)
}

/// `p^{−½Σ dim l_i/(l_i ∩ l_{i+1})}·ψ(−½q*(x, x))` on `E_s`, zero elsewhere.
pub fn sigma_kernel_formula(
    t: &LagrangianTuple<PrimeField>,
    psi: &AdditiveCharacter,
    x: &[Vec<Fp>],
) -> Result<Complex64> {
    require_transverse_support(t)?;
    let f = t.field();
    let n = t.n();
    for i in 0..n {
        let sum = t.l(i as isize).sum(t.l(i as isize + 1))?;
        if !sum.contains(&vec_sub(&x[(i + 1) % n], &x[i]))? {
            return Ok(Complex64::new(0.0, 0.0));
        }
    }
    let es = dual_form(t)?;
    let qs = es.q_star(x, x)?;
    let e: usize = t.edge_intersections().iter().map(|k| t.m() - k.dim()).sum();
    let norm = (f.p() as f64).powf(-(e as f64) / 2.0);
    Ok(psi.eval(&(-(f.half() * qs))) * norm)
}

/// `(Σ_i d_i, ½ Σ_i dim((l_i + l_{i+1})/(l_i ∩ l_{i+1})))` where `p^{−d_i/2}` normalizes
/// the intertwiner out of `H(l_i)`.
pub fn normalization_exponents(t: &LagrangianTuple<PrimeField>) -> Result<(usize, usize)> {
    let n = t.n();
    let mut acc = 0;
    let mut twice = 0;
    for i in 0..n as isize {
        let (a, b) = (t.l(i), t.l(i + 1));
        let cap = a.intersect(b)?.dim();
        acc += b.dim() - cap;
        twice += a.sum(b)?.dim() - cap;
    }
    if twice % 2 != 0 {
        return Err(MaslovError::consistency(
            "odd total of (l_i + l_{i+1})/(l_i ∩ l_{i+1})",
        ));
    }
    Ok((acc, twice / 2))
}

/// `m(v) = (Σ v_i, ½ Σ_{i>j} B(v_i, v_j))`.
pub fn multiplication_element(t: &LagrangianTuple<PrimeField>, v: &[Vec<Fp>]) -> HeisenbergElement {
    let f = t.field();
    let s = t.space();
    let mut total = f.zero_vec(s.dim());
    let mut t_acc = f.zero();
    for (i, vi) in v.iter().enumerate() {
        for vj in &v[..i] {
            t_acc = t_acc + s.b(vi, vj);
        }
        total = vec_add(&total, vi);
    }
    HeisenbergElement {
        v: total,
        t: f.half() * t_acc,
    }
}

/// `Tr ρ(m(v))` in the model on `l_0`, for `v ∈ ⊕ l_i`.
pub fn trace_rho_m(
    t: &LagrangianTuple<PrimeField>,
    psi: &AdditiveCharacter,
    v: &[Vec<Fp>],
) -> Result<Complex64> {
    for (i, vi) in v.iter().enumerate() {
        if !t.l(i as isize).contains(vi)? {
            return Err(MaslovError::NotContained(format!(
                "v_{i} is not in its Lagrangian"
            )));
        }
    }
    let model = ReprModel::new(t.space(), t.l(0), psi)?;
    Ok(rho_matrix(&model, &multiplication_element(t, v)).trace())
}

/// `p^m·ψ(½q(v, v))` when `Σ v_i = 0`, zero otherwise.
pub fn trace_rho_m_formula(
    t: &LagrangianTuple<PrimeField>,
    psi: &AdditiveCharacter,
    v: &[Vec<Fp>],
) -> Result<Complex64> {
    let f = t.field();
    let total = v
        .iter()
        .fold(f.zero_vec(t.space().dim()), |acc, x| vec_add(&acc, x));
    if !vec_is_zero(&total) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let k = compute_t(t)?.k;
    let a = k.complex.from_components(v)?;
    let q = k.form.bilinear(&a, &a);
    Ok(psi.eval(&(f.half() * q)) * (f.p() as f64).powi(t.m() as i32))
}

/// Largest entry of `|A − B|`.
pub fn max_deviation(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |U*U − I|`.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    let n = u.nrows();
    max_deviation(&(u.adjoint() * u), &ComplexMatrix::identity(n, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{lines, rng_from_seed, three_lines};

    fn setup(p: u32) -> (PrimeField, AdditiveCharacter) {
        let f = PrimeField::new(p).unwrap();
        let psi = AdditiveCharacter::new(&f);
        (f, psi)
    }

    #[test]
    fn group_law() {
        let (f, _) = setup(5);
        let s = SymplecticSpace::new(&f, 1);
        let e = HeisenbergElement {
            v: vec![f.one(), f.zero()],
            t: f.zero(),
        };
        let g = HeisenbergElement {
            v: vec![f.zero(), f.one()],
            t: f.zero(),
        };
        let eg = heis_mul(&s, &e, &g);
        assert_eq!(eg.v, vec![f.one(), f.one()]);
        assert_eq!(eg.t, f.from_i64(3));
        assert_eq!(
            heis_mul(&s, &e, &heis_inv(&e)),
            HeisenbergElement::identity(&f, 1)
        );
        assert_eq!(heis_mul(&s, &eg, &HeisenbergElement::identity(&f, 1)), eg);
    }

    #[test]
    fn representation_and_intertwining() {
        let (f, psi) = setup(3);
        let t = three_lines(&f);
        let s = t.space();
        let ms: Vec<_> = t
            .lagrangians()
            .iter()
            .map(|l| ReprModel::new(s, l, &psi).unwrap())
            .collect();
        let mut rng = rng_from_seed(4);
        for _ in 0..10 {
            let g = HeisenbergElement::random(s, &mut rng);
            let h = HeisenbergElement::random(s, &mut rng);
            for m in &ms {
                let lhs = rho_matrix(m, &g) * rho_matrix(m, &h);
                assert!(max_deviation(&lhs, &rho_matrix(m, &heis_mul(s, &g, &h))) < TOLERANCE);
                assert!(unitarity_defect(&rho_matrix(m, &g)) < TOLERANCE);
            }
            for a in &ms {
                for b in &ms {
                    let fm = intertwiner(a, b).unwrap();
                    assert!(unitarity_defect(&fm) < TOLERANCE);
                    let d = max_deviation(&(&fm * rho_matrix(a, &g)), &(rho_matrix(b, &g) * &fm));
                    assert!(d < TOLERANCE);
                }
            }
        }
        let same = intertwiner(&ms[0], &ms[0]).unwrap();
        assert!(max_deviation(&same, &ComplexMatrix::identity(3, 3)) < TOLERANCE);
    }

    #[test]
    fn equal_lagrangians_give_one() {
        let (f, psi) = setup(5);
        let t = lines(&f, &[(1, 2), (1, 2), (1, 2)]);
        let c = verify_theorem(&t, &psi, TOLERANCE).unwrap();
        assert!((c.cycle.scalar - 1.0).norm() < TOLERANCE);
    }

    #[test]
    fn trace_of_centre() {
        let (f, psi) = setup(5);
        let t = three_lines(&f);
        let model = ReprModel::new(t.space(), t.l(1), &psi).unwrap();
        let g = HeisenbergElement {
            v: f.zero_vec(2),
            t: f.from_i64(2),
        };
        let tr = rho_matrix(&model, &g).trace();
        assert!((tr - psi.eval(&f.from_i64(2)) * 5.0).norm() < TOLERANCE);
    }

    #[test]
    fn model_size_is_capped() {
        let (f, psi) = setup(7);
        let s = SymplecticSpace::new(&f, 3);
        assert!(ReprModel::new(&s, &s.standard_lagrangian(), &psi).is_err());
    }
}
