//! Report files produced by `compute` and `cup`.

use maslov_core::maslov::compute_t;
use maslov_core::sheaf::{h1_with_cup, h1_with_cup_on, Triangulation};
use maslov_core::weil::{cycle_matrix, scalar_of, Complex64, DEFAULT_MAX_MODEL_DIM};
use maslov_core::witt::{anisotropic_kernel, gamma, AdditiveCharacter, SquareClass, WittClass};
use maslov_core::{Field, LagrangianTuple, PrimeField};
use serde::Serialize;

use crate::error::CliError;
use crate::problem::{entries_of, Entry, FieldSpec, Problem, Tuple};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        ComplexValue { re: z.re, im: z.im }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WittReport {
    pub aniso_rank: u8,
    /// `"square"` or `"non-square"`; absent for the zero class.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disc: Option<&'static str>,
}

impl From<WittClass> for WittReport {
    fn from(c: WittClass) -> Self {
        WittReport {
            aniso_rank: c.aniso_rank,
            disc: c.disc.map(|d| match d {
                SquareClass::Square => "square",
                SquareClass::NonSquare => "non-square",
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeilReport {
    pub scalar: ComplexValue,
    /// `max |C − c·I|` over the entries of the composed cycle `C`.
    pub off_scalar_residual: f64,
    pub modulus_residual: f64,
    /// `|c − γ(−τ)|`.
    pub gamma_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub field: FieldSpec,
    pub m: usize,
    pub n: usize,
    pub dim_t: usize,
    pub gram_t: Vec<Vec<Entry>>,
    pub edge_intersection_dims: Vec<usize>,
    pub common_intersection_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witt_class: Option<WittReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_tau: Option<ComplexValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_minus_tau: Option<ComplexValue>,
    /// Cup product on `H^1` of the polygon sheaf equals `−q`; absent for `n < 3`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cup_agrees: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weil: Option<WeilReport>,
}

/// A report together with the identity failures found while producing it.
#[derive(Clone, Debug)]
pub struct Computed<R> {
    pub report: R,
    pub problems: Vec<CliError>,
}

pub fn compute(problem: &Problem) -> Result<Computed<Report>, CliError> {
    match &problem.tuple {
        Tuple::Prime(t) => compute_prime(problem, t),
        Tuple::Rational(t) => compute_exact(problem.field, t),
    }
}

fn compute_exact<F: Field>(
    field: FieldSpec,
    t: &LagrangianTuple<F>,
) -> Result<Computed<Report>, CliError> {
    let ts = compute_t(t)?;
    let mut problems = Vec::new();
    let cup_agrees = if t.n() >= 3 {
        let r = h1_with_cup(t)?;
        let ok = r.is_symmetric() && r.matches_minus_q();
        if !ok {
            problems.push(CliError::consistency("cup product on H^1 differs from −q"));
        }
        Some(ok)
    } else {
        None
    };
    let report = Report {
        field,
        m: t.m(),
        n: t.n(),
        dim_t: ts.dim(),
        gram_t: entries_of(ts.gram()),
        edge_intersection_dims: t.edge_intersections().iter().map(|s| s.dim()).collect(),
        common_intersection_dim: t.common_intersection().dim(),
        witt_class: None,
        gamma_tau: None,
        gamma_minus_tau: None,
        cup_agrees,
        weil: None,
    };
    Ok(Computed { report, problems })
}

fn compute_prime(
    problem: &Problem,
    t: &LagrangianTuple<PrimeField>,
) -> Result<Computed<Report>, CliError> {
    let mut out = compute_exact(problem.field, t)?;
    let f = *t.field();
    let psi = AdditiveCharacter::with_twist(&f, problem.psi_twist)?;
    let ts = compute_t(t)?;
    let g_tau = gamma(ts.gram(), &psi);
    let g_minus = gamma(&ts.gram().neg(), &psi);
    out.report.witt_class = Some(anisotropic_kernel(&f, ts.gram()).into());
    out.report.gamma_tau = Some(g_tau.into());
    out.report.gamma_minus_tau = Some(g_minus.into());
    let model_dim = (f.p() as u64).checked_pow(t.m() as u32);
    if t.n() >= 3 && model_dim.is_some_and(|d| d <= DEFAULT_MAX_MODEL_DIM as u64) {
        let c = cycle_matrix(t, &psi)?;
        let s = scalar_of(&c, f64::INFINITY)?;
        let w = WeilReport {
            scalar: s.scalar.into(),
            off_scalar_residual: s.off_scalar,
            modulus_residual: (s.scalar.norm() - 1.0).abs(),
            gamma_residual: (s.scalar - g_minus).norm(),
        };
        let tol = problem.tolerance;
        for (what, r) in [
            ("composed cycle is not scalar", w.off_scalar_residual),
            ("cycle scalar does not have modulus 1", w.modulus_residual),
            ("cycle scalar differs from γ(−τ)", w.gamma_residual),
        ] {
            if r > tol {
                out.problems.push(CliError::tolerance(format!(
                    "{what}: residual {r:e} exceeds {tol:e}"
                )));
            }
        }
        out.report.weil = Some(w);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CupReportFile {
    pub field: FieldSpec,
    pub dim_h1: usize,
    pub dim_t: usize,
    /// Cup pairing on the cocycles lifting the basis of `T`.
    pub cup_gram: Vec<Vec<Entry>>,
    pub gram_t: Vec<Vec<Entry>>,
    pub symmetric: bool,
    pub equals_minus_q: bool,
    pub fan_agrees: bool,
    pub reversal_negates: bool,
}

pub fn cup(problem: &Problem) -> Result<Computed<CupReportFile>, CliError> {
    match &problem.tuple {
        Tuple::Prime(t) => cup_of(problem.field, t),
        Tuple::Rational(t) => cup_of(problem.field, t),
    }
}

fn cup_of<F: Field>(
    field: FieldSpec,
    t: &LagrangianTuple<F>,
) -> Result<Computed<CupReportFile>, CliError> {
    if t.n() < 3 {
        return Err(CliError::validation(
            "the polygon sheaf needs at least 3 lagrangians",
        ));
    }
    let star = h1_with_cup(t)?;
    let fan = h1_with_cup_on(t, Triangulation::Fan, false)?;
    let rev = h1_with_cup_on(t, Triangulation::Star, true)?;
    let report = CupReportFile {
        field,
        dim_h1: star.dim_h1(),
        dim_t: star.t.dim(),
        cup_gram: entries_of(&star.section_cup),
        gram_t: entries_of(star.t.gram()),
        symmetric: star.is_symmetric(),
        equals_minus_q: star.matches_minus_q(),
        fan_agrees: fan.matches_minus_q() && fan.section_cup == star.section_cup,
        reversal_negates: rev.section_cup == star.section_cup.neg(),
    };
    let mut problems = Vec::new();
    for (ok, what) in [
        (report.symmetric, "cup pairing is not symmetric"),
        (report.equals_minus_q, "cup pairing differs from −q"),
        (
            report.fan_agrees,
            "fan triangulation gives a different cup pairing",
        ),
        (
            report.reversal_negates,
            "reversed orientation does not negate the cup pairing",
        ),
    ] {
        if !ok {
            problems.push(CliError::consistency(what));
        }
    }
    Ok(Computed { report, problems })
}
