//! Quadratic forms over `F_p`: diagonalization, the canonical Witt class and
//! Weil's character `γ`.

use std::f64::consts::PI;
use std::fmt;

use num::complex::Complex64;

use crate::error::{MaslovError, Result};
use crate::field::{Field, Fp, PrimeField, Scalar};
use crate::matrix::Matrix;
use crate::subspace::Subspace;

/// Returns `(d, P)` with `Pᵀ·gram·P = diag(d)`. Columns of `P` are the new basis;
/// radical directions come last with zero entries.
pub fn diagonalize<F: Field>(gram: &Matrix<F>) -> (Vec<F::Elem>, Matrix<F>) {
    assert!(gram.is_square(), "Gram matrix must be square");
    let f = gram.field();
    let n = gram.rows();
    let mut rows = Matrix::identity(f, n).row_vecs();
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        let a = gram.restrict_form(&Matrix::from_rows(f, n, &rows));
        if let Some(j) = (k..n).find(|&j| !a[(j, j)].is_zero()) {
            rows.swap(k, j);
        } else if let Some((i, j)) = (k..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| !a[(i, j)].is_zero())
        {
            // x + y has value 2·a_ij ≠ 0 when x, y are null
            let sum: Vec<_> = rows[i]
                .iter()
                .zip(&rows[j])
                .map(|(x, y)| x.clone() + y.clone())
                .collect();
            rows[i] = sum;
            rows.swap(k, i);
        } else {
            diag.extend((k..n).map(|_| f.zero()));
            break;
        }
        let a = gram.restrict_form(&Matrix::from_rows(f, n, &rows));
        let piv = a[(k, k)].clone();
        let inv = piv.inv().expect("pivot is nonzero");
        for j in k + 1..n {
            let c = a[(j, k)].clone() * inv.clone();
            if c.is_zero() {
                continue;
            }
            let pivot_row = rows[k].clone();
            for (x, y) in rows[j].iter_mut().zip(pivot_row) {
                *x = x.clone() - c.clone() * y;
            }
        }
        diag.push(piv);
    }
    (diag, Matrix::from_rows(f, n, &rows).transpose())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SquareClass {
    Square,
    NonSquare,
}

impl SquareClass {
    pub fn of(field: &PrimeField, x: &Fp) -> Option<SquareClass> {
        field.is_square(x).map(|s| {
            if s {
                SquareClass::Square
            } else {
                SquareClass::NonSquare
            }
        })
    }

    fn representative(self, field: &PrimeField) -> Fp {
        match self {
            SquareClass::Square => field.one(),
            SquareClass::NonSquare => field.least_non_square(),
        }
    }
}

/// Canonical representative of an element of `W(F_p)`: the anisotropic kernel's
/// rank and, for nonzero rank, the square class of its determinant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WittClass {
    pub p: u32,
    pub aniso_rank: u8,
    pub disc: Option<SquareClass>,
}

impl WittClass {
    pub fn zero(p: u32) -> Self {
        WittClass {
            p,
            aniso_rank: 0,
            disc: None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.aniso_rank == 0
    }

    /// A diagonal form in this class: `⟨d⟩` or `⟨1, d⟩` with `d ∈ {1, least non-square}`.
    pub fn representative(&self) -> Vec<Fp> {
        let f = PrimeField::with_limit(self.p, u32::MAX).expect("class over a valid prime");
        match (self.aniso_rank, self.disc) {
            (0, _) => vec![],
            (1, Some(d)) => vec![d.representative(&f)],
            (2, Some(d)) => vec![f.one(), d.representative(&f)],
            _ => unreachable!("malformed Witt class"),
        }
    }
}

impl fmt::Display for WittClass {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.disc {
            None => write!(fm, "0 in W(F_{})", self.p),
            Some(d) => write!(
                fm,
                "rank {} disc {} in W(F_{})",
                self.aniso_rank,
                if d == SquareClass::Square {
                    "square"
                } else {
                    "non-square"
                },
                self.p
            ),
        }
    }
}

/// Normalized vectors (first nonzero coordinate 1) of `F_p^k`.
fn normalized_vectors(field: &PrimeField, k: usize) -> impl Iterator<Item = Vec<Fp>> + '_ {
    let p = field.p() as u64;
    (0..k).rev().flat_map(move |lead| {
        // coordinates after the leading one range freely
        let tail = k - lead - 1;
        (0..p.pow(tail as u32)).map(move |mut code| {
            let mut v = vec![field.zero(); k];
            v[lead] = field.one();
            for x in v.iter_mut().skip(lead + 1) {
                *x = field.elem(code % p);
                code /= p;
            }
            v
        })
    })
}

fn find_isotropic(field: &PrimeField, diag: &[Fp]) -> Option<Vec<Fp>> {
    normalized_vectors(field, diag.len()).find(|v| {
        v.iter()
            .zip(diag)
            .fold(field.zero(), |acc, (x, d)| acc + *d * *x * *x)
            .is_zero()
    })
}

/// Splits hyperbolic planes off a non-degenerate diagonal form until it is anisotropic.
fn anisotropic_diagonal(field: &PrimeField, mut diag: Vec<Fp>) -> Vec<Fp> {
    loop {
        let k = diag.len().min(3);
        if k < 2 {
            return diag;
        }
        let head: Vec<Fp> = diag[..k].to_vec();
        let Some(x) = find_isotropic(field, &head) else {
            // only binary forms can be anisotropic here
            debug_assert_eq!(diag.len(), 2);
            return diag;
        };
        let g = Matrix::diagonal(field, &head);
        let j = (0..k)
            .find(|&j| !(head[j] * x[j]).is_zero())
            .expect("x is nonzero");
        let plane = Subspace::span(field, k, &[x, field.unit_vec(k, j)]);
        let rest = plane.orthogonal(&g);
        let (d, _) = diagonalize(&g.restrict_form(rest.basis()));
        debug_assert!(d.iter().all(|e| !e.is_zero()));
        diag.splice(..k, d);
    }
}

/// The canonical Witt class of a symmetric Gram matrix over `F_p`; the radical is discarded.
pub fn anisotropic_kernel(field: &PrimeField, gram: &Matrix<PrimeField>) -> WittClass {
    assert!(gram.is_symmetric(), "Gram matrix must be symmetric");
    let (d, _) = diagonalize(gram);
    class_of_diagonal(field, d)
}

pub fn class_of_gram(field: &PrimeField, gram: &Matrix<PrimeField>) -> WittClass {
    anisotropic_kernel(field, gram)
}

pub fn class_of_diagonal(field: &PrimeField, d: Vec<Fp>) -> WittClass {
    let nonzero: Vec<Fp> = d.into_iter().filter(|x| !x.is_zero()).collect();
    let aniso = anisotropic_diagonal(field, nonzero);
    let det = aniso.iter().fold(field.one(), |acc, x| acc * *x);
    WittClass {
        p: field.p(),
        aniso_rank: aniso.len() as u8,
        disc: if aniso.is_empty() {
            None
        } else {
            SquareClass::of(field, &det)
        },
    }
}

fn field_of(a: &WittClass, b: &WittClass) -> Result<PrimeField> {
    if a.p != b.p {
        return Err(MaslovError::FieldMismatch(
            format!("F_{}", a.p),
            format!("F_{}", b.p),
        ));
    }
    PrimeField::with_limit(a.p, u32::MAX)
}

pub fn witt_add(a: &WittClass, b: &WittClass) -> Result<WittClass> {
    let f = field_of(a, b)?;
    let mut d = a.representative();
    d.extend(b.representative());
    Ok(class_of_diagonal(&f, d))
}

pub fn witt_neg(a: &WittClass) -> WittClass {
    let f = PrimeField::with_limit(a.p, u32::MAX).expect("class over a valid prime");
    class_of_diagonal(&f, a.representative().into_iter().map(|x| -x).collect())
}

pub fn witt_equal(a: &WittClass, b: &WittClass) -> Result<bool> {
    field_of(a, b)?;
    Ok(a == b)
}

/// `ψ_a(x) = exp(2πi·a·x̂/p)` with `x̂` the least nonnegative residue.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AdditiveCharacter {
    field: PrimeField,
    twist: u32,
}

impl AdditiveCharacter {
    pub fn new(field: &PrimeField) -> Self {
        AdditiveCharacter {
            field: *field,
            twist: 1,
        }
    }

    pub fn with_twist(field: &PrimeField, twist: i64) -> Result<Self> {
        let a = field.from_i64(twist);
        if a.is_zero() {
            return Err(MaslovError::precondition(format!(
                "twist {twist} vanishes mod {}",
                field.p()
            )));
        }
        Ok(AdditiveCharacter {
            field: *field,
            twist: a.value(),
        })
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn twist(&self) -> u32 {
        self.twist
    }

    pub fn eval(&self, x: &Fp) -> Complex64 {
        let p = self.field.p() as u64;
        let r = (x.value() as u64 * self.twist as u64) % p;
        Complex64::from_polar(1.0, 2.0 * PI * r as f64 / p as f64)
    }
}

/// `Σ_{x ∈ F_p} ψ(½·a·x²)`.
fn gauss_sum(psi: &AdditiveCharacter, a: &Fp) -> Complex64 {
    let f = psi.field();
    let c = *a * f.half();
    f.elements().map(|x| psi.eval(&(c * x * x))).sum()
}

/// `γ(q) = p^{−½(dim + dim ker q)} Σ_{x} ψ(½ q(x,x))`, evaluated on a diagonal form.
pub fn gamma(gram: &Matrix<PrimeField>, psi: &AdditiveCharacter) -> Complex64 {
    let (d, _) = diagonalize(gram);
    gamma_of_diagonal(&d, psi)
}

pub fn gamma_of_diagonal(d: &[Fp], psi: &AdditiveCharacter) -> Complex64 {
    let scale = (psi.field().p() as f64).sqrt().recip();
    d.iter()
        .filter(|a| !a.is_zero())
        .map(|a| gauss_sum(psi, a) * scale)
        .product()
}

pub fn gamma_of_class(class: &WittClass, psi: &AdditiveCharacter) -> Result<Complex64> {
    if class.p != psi.field().p() {
        return Err(MaslovError::FieldMismatch(
            format!("F_{}", class.p),
            psi.field().name(),
        ));
    }
    Ok(gamma_of_diagonal(&class.representative(), psi))
}

/// Largest deviation of `p^{−dim/2} Σ_x ψ(½q(x,x) − ⟨ξ,x⟩)` from `γ(q)·ψ(−½ q⁻¹(ξ,ξ))`
/// over all `ξ`, by brute force.
pub fn fourier_residual(gram: &Matrix<PrimeField>, psi: &AdditiveCharacter) -> Result<f64> {
    let f = *psi.field();
    let n = gram.rows();
    let inv = gram
        .inverse()
        .ok_or_else(|| MaslovError::precondition("Fourier identity needs a non-degenerate form"))?;
    let g = gamma(gram, psi);
    let half = f.half();
    let points: Vec<Vec<Fp>> = all_vectors(&f, n).collect();
    let values: Vec<Complex64> = points
        .iter()
        .map(|x| psi.eval(&(half * gram.bilinear(x, x))))
        .collect();
    let norm = (f.p() as f64).powf(-(n as f64) / 2.0);
    let mut worst = 0.0f64;
    for xi in &points {
        let ft: Complex64 = points
            .iter()
            .zip(&values)
            .map(|(x, v)| v * psi.eval(&-f.dot(xi, x)))
            .sum::<Complex64>()
            * norm;
        let expected = g * psi.eval(&-(half * inv.bilinear(xi, xi)));
        worst = worst.max((ft - expected).norm());
    }
    Ok(worst)
}

/// Every vector of `F_p^k`, in lexicographic order of residues.
pub fn all_vectors(field: &PrimeField, k: usize) -> impl Iterator<Item = Vec<Fp>> + '_ {
    let p = field.p() as u64;
    (0..p.pow(k as u32)).map(move |mut code| {
        (0..k)
            .map(|_| {
                let x = field.elem(code % p);
                code /= p;
                x
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;

    fn fp(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn diag(f: &PrimeField, d: &[i64]) -> Matrix<PrimeField> {
        Matrix::diagonal(f, &d.iter().map(|&x| f.from_i64(x)).collect::<Vec<_>>())
    }

    #[test]
    fn diagonalize_examples() {
        let f = fp(7);
        let g = diag(&f, &[1, 3, 0]);
        let (d, p) = diagonalize(&g);
        assert_eq!(p, Matrix::identity(&f, 3));
        assert_eq!(d, vec![f.one(), f.from_i64(3), f.zero()]);

        let q = Rationals;
        let hyp = Matrix::from_i64(&q, 2, 2, &[0, 1, 1, 0]);
        let (d, p) = diagonalize(&hyp);
        assert_eq!(p.transpose().dot(&hyp).dot(&p), Matrix::diagonal(&q, &d));
        // disc of a diagonal hyperbolic plane is −1 up to squares
        let prod = d[0].clone() * d[1].clone();
        assert!(prod < num::BigRational::from_integer(0.into()));

        let z = Matrix::zeros(&f, 3, 3);
        assert!(diagonalize(&z).0.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn small_anisotropic_kernels() {
        assert_eq!(
            anisotropic_kernel(&fp(3), &diag(&fp(3), &[1, -1])).aniso_rank,
            0
        );
        assert_eq!(
            anisotropic_kernel(&fp(3), &diag(&fp(3), &[1, 1])).aniso_rank,
            2
        );
        assert_eq!(
            anisotropic_kernel(&fp(5), &diag(&fp(5), &[1, 1])).aniso_rank,
            0
        );
        let f = fp(11);
        let c = anisotropic_kernel(&f, &diag(&f, &[1, 2, 3, 4, 5, 0]));
        assert!(c.aniso_rank <= 2);
    }

    #[test]
    fn group_law() {
        let f3 = fp(3);
        let one = class_of_gram(&f3, &diag(&f3, &[1]));
        let minus_one = class_of_gram(&f3, &diag(&f3, &[2]));
        assert_eq!(witt_neg(&one), minus_one);
        assert_ne!(one.disc, minus_one.disc);
        let f5 = fp(5);
        let a = class_of_gram(&f5, &diag(&f5, &[1]));
        let b = class_of_gram(&f5, &diag(&f5, &[-1]));
        assert!(witt_add(&a, &b).unwrap().is_zero());
        assert_eq!(witt_add(&a, &WittClass::zero(5)).unwrap(), a);
        assert!(witt_add(&a, &one).is_err());
        // W(F_3) is cyclic of order 4
        let two = witt_add(&one, &one).unwrap();
        assert_eq!(two.aniso_rank, 2);
        assert_eq!(witt_add(&two, &one).unwrap(), minus_one);
    }

    #[test]
    fn gamma_basics() {
        let f = fp(7);
        let psi = AdditiveCharacter::new(&f);
        assert!((gamma(&Matrix::zeros(&f, 0, 0), &psi) - 1.0).norm() < 1e-12);
        let hyp = Matrix::from_i64(&f, 2, 2, &[0, 1, 1, 0]);
        assert!((gamma(&hyp, &psi) - 1.0).norm() < 1e-12);
        let g = diag(&f, &[3, 0]);
        assert!((gamma(&g, &psi).norm() - 1.0).abs() < 1e-9);
        assert!(fourier_residual(&diag(&f, &[1, 3]), &psi).unwrap() < 1e-9);
        assert!(AdditiveCharacter::with_twist(&f, 14).is_err());
    }
}
