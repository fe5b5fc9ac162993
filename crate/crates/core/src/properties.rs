//! Per-instance invariant checks shared by the test suites and `maslov verify`.
//!
//! Every check is named; a failing check carries a message, and the caller keeps the
//! seed and index needed to rebuild the instance.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};

use num::complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::MaslovError;
use crate::field::{vec_add, Field, Fp, PrimeField, Scalar};
use crate::instances::rng_from_seed;
use crate::maslov::{
    antiderivative, bar_space, chain_split, check_chain_map, check_factorization, check_induces_q,
    compute_k, dual_form, expected_bar_dim, expected_dim_t, factor_maslov, kashiwara_compare,
    pulled_back_inverse_gram, q_alternate, q_with_antiderivative, reindex, reverse, TSpace,
};
use crate::matrix::Matrix;
use crate::sheaf::{h1_with_cup, h1_with_cup_on, Triangulation};
use crate::subspace::Subspace;
use crate::symplectic::LagrangianTuple;
use crate::weil::{
    cycle_matrix_of, heis_mul, intertwiner, max_deviation, models, normalization_exponents,
    rho_matrix, scalar_of, sigma_kernel_formula, trace_rho_m, trace_rho_m_formula,
    unitarity_defect, verify_theorem, HeisenbergElement, ReprModel, SigmaKernel,
    DEFAULT_MAX_MODEL_DIM,
};
use crate::witt::{
    anisotropic_kernel, fourier_residual, gamma, witt_add, witt_equal, AdditiveCharacter,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail(String),
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub property: &'static str,
    pub outcome: Outcome,
}

#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    pub tol: f64,
    pub psi_twist: i64,
    /// Perturb one entry of the Gram of `T` before the oracle comparisons.
    pub corrupt: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            tol: 1e-9,
            psi_twist: 1,
            corrupt: false,
        }
    }
}

/// Data used by checks that compare different instances.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InstanceStats {
    pub m: usize,
    pub n: usize,
    pub edge_dims: Vec<usize>,
    pub bar_dim: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct InstanceChecks {
    pub stats: InstanceStats,
    pub checks: Vec<Check>,
}

impl InstanceChecks {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks
            .iter()
            .filter(|c| matches!(c.outcome, Outcome::Fail(_)))
    }
}

type Verdict = std::result::Result<(), String>;

fn require(cond: bool, msg: impl FnOnce() -> String) -> Verdict {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: MaslovError) -> String {
    e.to_string()
}

#[derive(Default)]
struct Recorder {
    checks: Vec<Check>,
}

impl Recorder {
    fn run(&mut self, property: &'static str, f: impl FnOnce() -> Verdict) {
        let outcome = match catch_unwind(AssertUnwindSafe(f)) {
            Ok(Ok(())) => Outcome::Pass,
            Ok(Err(msg)) => Outcome::Fail(msg),
            Err(panic) => Outcome::Fail(format!(
                "panicked: {}",
                panic
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default()
            )),
        };
        self.checks.push(Check { property, outcome });
    }

    fn skip(&mut self, property: &'static str) {
        self.checks.push(Check {
            property,
            outcome: Outcome::Skipped,
        });
    }
}

fn random_element_of<F: Field, R: Rng + ?Sized>(s: &Subspace<F>, rng: &mut R) -> Vec<F::Elem> {
    let f = s.field();
    let c: Vec<F::Elem> = (0..s.dim()).map(|_| f.random(rng)).collect();
    s.from_coordinates(&c)
}

fn perturbed<F: Field>(g: &Matrix<F>) -> Matrix<F> {
    let mut out = g.clone();
    if out.rows() > 0 {
        out[(0, 0)] = out[(0, 0)].clone() + out.field().one();
    }
    out
}

fn linalg_checks<F: Field>(rec: &mut Recorder, field: &F, rng: &mut ChaCha8Rng) {
    let (r, c) = (rng.random_range(1..=5), rng.random_range(1..=6));
    let mut m = Matrix::random(field, r, c, rng);
    if rng.random_bool(0.5) && r > 1 {
        // force a dependent row
        let row = vec_add(m.row(0), m.row(r - 1));
        m.set_block(1, 0, &Matrix::from_rows(field, c, &[row]));
    }
    rec.run("linalg.rref_idempotent", || {
        let once = m.rref();
        require(once.rref() == once, || "rref(rref(M)) ≠ rref(M)".into())
    });
    rec.run("linalg.rank_nullity", || {
        require(m.rank() + m.kernel_basis().rows() == c, || {
            "rank + nullity ≠ cols".into()
        })
    });
    let a = Subspace::row_space(&Matrix::random(field, rng.random_range(0..=4), 5, rng));
    let b = Subspace::row_space(&Matrix::random(field, rng.random_range(0..=4), 5, rng));
    rec.run("linalg.modular_law", || {
        let s = a.sum(&b).map_err(err)?;
        let i = a.intersect(&b).map_err(err)?;
        require(s.dim() + i.dim() == a.dim() + b.dim(), || {
            "dim(A+B) + dim(A∩B) ≠ dim A + dim B".into()
        })
    });
}

/// Field-independent identities; returns `T` when it could be built.
fn exact_checks<F: Field>(
    rec: &mut Recorder,
    t: &LagrangianTuple<F>,
    rng: &mut ChaCha8Rng,
    opts: &CheckOptions,
    stats: &mut InstanceStats,
) -> Option<TSpace<F>> {
    let field = t.field();
    let space = t.space();
    linalg_checks(rec, field, rng);
    let g = space.random_symplectic(rng);
    rec.run("symplectic.generated_symplectic", || {
        require(space.is_symplectic_matrix(&g), || "gᵀJg ≠ J".into())
    });
    rec.run("symplectic.lagrangian", || {
        require(
            t.lagrangians().iter().all(|l| space.is_lagrangian(l))
                && space.is_lagrangian(&space.random_lagrangian(rng)),
            || "non-Lagrangian subspace".into(),
        )
    });

    let k = match compute_k(t) {
        Ok(k) => k,
        Err(e) => {
            rec.run("maslov.radical", || Err(err(e)));
            return None;
        }
    };
    rec.run("maslov.symmetry", || {
        require(k.gram.is_symmetric(), || {
            "gram of q on K is not symmetric".into()
        })
    });
    let v = random_element_of(&k.subspace, rng);
    let w = random_element_of(&k.subspace, rng);
    rec.run("maslov.antiderivative_independence", || {
        let wt = antiderivative(&k.complex, &w).map_err(err)?;
        let c: Vec<F::Elem> = (0..space.dim()).map(|_| field.random(rng)).collect();
        let shifted: Vec<_> = wt.iter().map(|x| vec_add(x, &c)).collect();
        let a = q_with_antiderivative(&k.complex, &v, &wt);
        require(a == q_with_antiderivative(&k.complex, &v, &shifted), || {
            "q depends on the antiderivative".into()
        })?;
        require(a == k.q(&v, &w), || {
            "antiderivative formula differs from the explicit form".into()
        })
    });
    rec.run("maslov.alternate_form", || {
        let wt = antiderivative(&k.complex, &w).map_err(err)?;
        require(q_alternate(&k.complex, &v, &wt) == k.q(&v, &w), || {
            "alternate formula differs".into()
        })
    });
    rec.run("maslov.radical", || {
        require(k.radical() == k.image_boundary(), || {
            "ker q ≠ image ∂".into()
        })
    });

    let ts = match crate::maslov::compute_t(t) {
        Ok(ts) => ts,
        Err(e) => {
            rec.run("maslov.dim_formula", || Err(err(e)));
            return None;
        }
    };
    rec.run("maslov.dim_formula", || {
        let want = expected_dim_t(t);
        require(ts.dim() as isize == want, || {
            format!("dim T = {} but formula gives {want}", ts.dim())
        })
    });
    rec.run("maslov.rotation", || {
        for r in 1..t.n() {
            require(reindex(t, r).map_err(err)?.preserves(), || {
                format!("rotation by {r} changes q")
            })?;
        }
        Ok(())
    });
    rec.run("maslov.reversal", || {
        require(reverse(t).map_err(err)?.negates(), || {
            "reversal does not negate q".into()
        })
    });
    rec.run("maslov.chain", || {
        for k in 3..t.n() {
            chain_split(t, k).map_err(|e| format!("k = {k}: {e}"))?;
        }
        Ok(())
    });
    rec.run("maslov.kashiwara_witness", || {
        kashiwara_compare(&t.select(&[0, 1, 2]))
            .map(|_| ())
            .map_err(err)
    });
    rec.run("maslov.bar", || {
        let b = bar_space(t).map_err(err)?;
        stats.bar_dim = Some(b.dim());
        require(b.dim() == expected_bar_dim(t), || {
            format!(
                "dim T̄ = {} but formula gives {}",
                b.dim(),
                expected_bar_dim(t)
            )
        })?;
        b.subquotient_witness().map(|_| ()).map_err(err)
    });
    rec.run("maslov.factorization", || {
        let (c, phi, fz) = factor_maslov(t).map_err(err)?;
        check_chain_map(&c.complex, &phi).map_err(err)?;
        check_induces_q(&c, &phi).map_err(err)?;
        check_factorization(&c.complex, &phi, &fz).map_err(err)?;
        require(fz.d0_dim() == expected_bar_dim(t), || {
            "dim D^0 differs from dim T̄".into()
        })
    });

    let target = if opts.corrupt {
        perturbed(ts.gram())
    } else {
        ts.gram().clone()
    };
    rec.run("sheaf.cup_equals_minus_q", || {
        let r = h1_with_cup(t).map_err(err)?;
        require(r.dim_h1() == ts.dim(), || {
            format!("dim H1 = {} but dim T = {}", r.dim_h1(), ts.dim())
        })?;
        require(r.to_t.rank() == ts.dim(), || {
            "boundary values do not identify H1 with T".into()
        })?;
        require(r.section_cup == target.neg(), || "cup pairing ≠ −q".into())?;
        require(r.cup_gram == ts.gram().restrict_form(&r.to_t).neg(), || {
            "cup pairing on representatives ≠ −q".into()
        })?;
        require(r.is_symmetric(), || {
            "cup pairing on H1 is not symmetric".into()
        })
    });
    rec.run("sheaf.fan_triangulation", || {
        let r = h1_with_cup_on(t, Triangulation::Fan, false).map_err(err)?;
        require(r.matches_minus_q(), || {
            "fan triangulation does not give −q".into()
        })
    });
    rec.run("sheaf.orientation_reversal", || {
        let r = h1_with_cup_on(t, Triangulation::Star, true).map_err(err)?;
        require(r.section_cup == *ts.gram(), || {
            "reversed orientation does not negate the cup".into()
        })
    });
    Some(ts)
}

pub fn check_instance<F: Field>(
    t: &LagrangianTuple<F>,
    seed: u64,
    opts: &CheckOptions,
) -> InstanceChecks {
    let mut rec = Recorder::default();
    let mut rng = rng_from_seed(seed ^ 0x5eed_c4ec);
    let mut stats = stats_of(t);
    exact_checks(&mut rec, t, &mut rng, opts, &mut stats);
    InstanceChecks {
        stats,
        checks: rec.checks,
    }
}

fn stats_of<F: Field>(t: &LagrangianTuple<F>) -> InstanceStats {
    InstanceStats {
        m: t.m(),
        n: t.n(),
        edge_dims: t.edge_intersections().iter().map(|e| e.dim()).collect(),
        bar_dim: None,
    }
}

fn random_nondegenerate<R: Rng + ?Sized>(
    f: &PrimeField,
    dim: usize,
    rng: &mut R,
) -> Matrix<PrimeField> {
    loop {
        let a = Matrix::random(f, dim, dim, rng);
        let g = a.add(&a.transpose());
        if dim == 0 || !g.det().is_zero() {
            return g;
        }
    }
}

fn close(a: Complex64, b: Complex64, tol: f64, what: &str) -> Verdict {
    let d = (a - b).norm();
    require(d <= tol, || format!("{what}: deviation {d:e}"))
}

/// All identities that hold over `F_p`, including the Witt and Weil ones.
pub fn check_prime_instance(
    t: &LagrangianTuple<PrimeField>,
    seed: u64,
    opts: &CheckOptions,
) -> InstanceChecks {
    let mut rec = Recorder::default();
    let mut rng = rng_from_seed(seed ^ 0x5eed_c4ec);
    let mut stats = stats_of(t);
    let f = *t.field();
    let tol = opts.tol;
    let ts = exact_checks(&mut rec, t, &mut rng, opts, &mut stats);
    let psi = match AdditiveCharacter::with_twist(&f, opts.psi_twist) {
        Ok(psi) => psi,
        Err(e) => {
            rec.run("gamma.character", || Err(err(e)));
            return InstanceChecks {
                stats,
                checks: rec.checks,
            };
        }
    };

    if let Some(ts) = &ts {
        let gram = if opts.corrupt {
            perturbed(ts.gram())
        } else {
            ts.gram().clone()
        };
        let tau = anisotropic_kernel(&f, ts.gram());
        rec.run("maslov.chain_witt", || {
            for k in 3..t.n() {
                let c = chain_split(t, k).map_err(err)?;
                let sum = witt_add(
                    &anisotropic_kernel(&f, c.first.gram()),
                    &anisotropic_kernel(&f, c.second.gram()),
                )
                .map_err(err)?;
                require(witt_equal(&tau, &sum).map_err(err)?, || {
                    format!("k = {k}: classes do not add")
                })?;
            }
            Ok(())
        });
        rec.run("maslov.kashiwara_class", || {
            let c = kashiwara_compare(&t.select(&[0, 1, 2])).map_err(err)?;
            let a = anisotropic_kernel(&f, c.t.gram());
            let b = anisotropic_kernel(&f, &c.kash_nondegenerate.gram);
            require(a == b, || format!("class(T) = {a} but class(T^Kash) = {b}"))
        });
        rec.run("maslov.bar_class", || {
            let b = bar_space(t).map_err(err)?;
            let c = anisotropic_kernel(&f, &b.bar_t.gram);
            require(c == tau, || format!("class(T̄) = {c} but class(T) = {tau}"))
        });
        if ts.dim() <= 6 {
            rec.run("maslov.duality", || {
                let es = dual_form(t).map_err(err)?;
                let pulled = if opts.corrupt {
                    let inv = gram.inverse().ok_or("corrupted Gram is singular")?;
                    inv.restrict_form(&es.surjection.transpose())
                } else {
                    pulled_back_inverse_gram(&es)
                };
                require(es.gram == pulled, || {
                    "q* ≠ pulled-back inverse Gram on E_s".into()
                })
            });
        } else {
            rec.skip("maslov.duality");
        }
        rec.run("witt.aniso_rank_bound", || {
            require(tau.aniso_rank <= 2, || format!("{tau}"))
        });
        let hyp = Matrix::from_i64(&f, 2, 2, &[0, 1, 1, 0]);
        let padded = ts.gram().direct_sum(&hyp);
        rec.run("witt.hyperbolic_invariance", || {
            require(anisotropic_kernel(&f, &padded) == tau, || {
                "q ⊥ H has a different class".into()
            })
        });
        let gq = gamma(ts.gram(), &psi);
        rec.run("gamma.hyperbolic_invariance", || {
            close(gq, gamma(&padded, &psi), tol, "γ(q ⊥ H) ≠ γ(q)")
        });
        rec.run("gamma.negation_conjugates", || {
            close(
                gamma(&ts.gram().neg(), &psi),
                gq.conj(),
                tol,
                "γ(−q) ≠ conj γ(q)",
            )
        });
        rec.run("gamma.unit_modulus", || {
            let d = (gq.norm() - 1.0).abs();
            require(d <= tol, || format!("|γ| − 1 = {d:e}"))
        });
        let other = random_nondegenerate(&f, rng.random_range(1..=3), &mut rng);
        rec.run("gamma.additivity", || {
            let sum = gamma(&ts.gram().direct_sum(&other), &psi);
            close(
                sum,
                gq * gamma(&other, &psi),
                tol,
                "γ(q₁ ⊥ q₂) ≠ γ(q₁)γ(q₂)",
            )
        });
    }
    if f.p() <= 7 {
        let g = random_nondegenerate(&f, rng.random_range(1..=2), &mut rng);
        rec.run("gamma.fourier_identity", || {
            let r = fourier_residual(&g, &psi).map_err(err)?;
            require(r <= tol, || format!("Fourier residual {r:e}"))
        });
    } else {
        rec.skip("gamma.fourier_identity");
    }
    weil_checks(&mut rec, t, &psi, &mut rng, opts, ts.as_ref());
    InstanceChecks {
        stats,
        checks: rec.checks,
    }
}

const WEIL_PROPERTIES: [&str; 8] = [
    "weil.representation",
    "weil.intertwining",
    "weil.theorem",
    "weil.transversal_independence",
    "weil.cyclic_invariance",
    "weil.exponent_identity",
    "weil.trace_kernel",
    "weil.trace_rho_m",
];

fn weil_checks(
    rec: &mut Recorder,
    t: &LagrangianTuple<PrimeField>,
    psi: &AdditiveCharacter,
    rng: &mut ChaCha8Rng,
    opts: &CheckOptions,
    ts: Option<&TSpace<PrimeField>>,
) {
    let f = *t.field();
    let tol = opts.tol;
    let size = (f.p() as usize).checked_pow(t.m() as u32);
    if size.is_none_or(|s| s > DEFAULT_MAX_MODEL_DIM) {
        for p in WEIL_PROPERTIES {
            rec.skip(p);
        }
        return;
    }
    let ms = match models(t, psi) {
        Ok(ms) => ms,
        Err(e) => {
            rec.run("weil.representation", || Err(err(e)));
            return;
        }
    };
    let space = t.space();
    rec.run("weil.representation", || {
        let g = HeisenbergElement::random(space, rng);
        let h = HeisenbergElement::random(space, rng);
        let model = &ms[rng.random_range(0..ms.len())];
        let (rg, rh) = (rho_matrix(model, &g), rho_matrix(model, &h));
        let d = max_deviation(&(&rg * &rh), &rho_matrix(model, &heis_mul(space, &g, &h)));
        require(d <= tol, || format!("ρ(g)ρ(h) ≠ ρ(gh): {d:e}"))?;
        let u = unitarity_defect(&rg);
        require(u <= tol, || format!("ρ not unitary: {u:e}"))
    });
    rec.run("weil.intertwining", || {
        let i = rng.random_range(0..ms.len());
        let j = rng.random_range(0..ms.len());
        let fm = intertwiner(&ms[i], &ms[j]).map_err(err)?;
        let u = unitarity_defect(&fm);
        require(u <= tol, || format!("F_{{{j},{i}}} not unitary: {u:e}"))?;
        let g = HeisenbergElement::random(space, rng);
        let d = max_deviation(
            &(&fm * rho_matrix(&ms[i], &g)),
            &(rho_matrix(&ms[j], &g) * &fm),
        );
        require(d <= tol, || format!("F ρ_i ≠ ρ_j F: {d:e}"))?;
        let back = intertwiner(&ms[j], &ms[i]).map_err(err)?;
        let n = fm.nrows();
        let d = max_deviation(&(&back * &fm), &crate::weil::ComplexMatrix::identity(n, n));
        require(d <= tol, || {
            format!("F_{{{i},{j}}} F_{{{j},{i}}} ≠ 1: {d:e}")
        })
    });
    let base = match verify_theorem(t, psi, tol) {
        Ok(c) => {
            let gm = if opts.corrupt {
                ts.map(|ts| gamma(&perturbed(ts.gram()).neg(), psi))
                    .unwrap_or(c.gamma_minus_tau)
            } else {
                c.gamma_minus_tau
            };
            rec.run("weil.theorem", || {
                close(c.cycle.scalar, gm, tol, "cycle scalar ≠ γ(−τ)")
            });
            Some(c.cycle.scalar)
        }
        Err(e) => {
            rec.run("weil.theorem", || Err(err(e)));
            None
        }
    };
    match base {
        Some(s0) => {
            rec.run("weil.transversal_independence", || {
                let shifted: Vec<ReprModel> = ms.iter().map(|m| m.shifted(rng)).collect();
                let c = scalar_of(&cycle_matrix_of(&shifted).map_err(err)?, tol).map_err(err)?;
                close(c.scalar, s0, tol, "scalar depends on the transversal")
            });
            rec.run("weil.cyclic_invariance", || {
                for r in 1..t.n() {
                    let rotated: Vec<ReprModel> =
                        (0..t.n()).map(|i| ms[(i + r) % t.n()].clone()).collect();
                    let c =
                        scalar_of(&cycle_matrix_of(&rotated).map_err(err)?, tol).map_err(err)?;
                    close(c.scalar, s0, tol, "scalar depends on the base index")?;
                }
                Ok(())
            });
        }
        None => {
            rec.skip("weil.transversal_independence");
            rec.skip("weil.cyclic_invariance");
        }
    }
    rec.run("weil.exponent_identity", || {
        let (a, b) = normalization_exponents(t).map_err(err)?;
        require(a == b, || format!("exponents {a} ≠ {b}"))
    });
    if t.common_intersection().is_zero() && t.total_sum().dim() == space.dim() {
        rec.run("weil.trace_kernel", || {
            let kernel = SigmaKernel::new(t, psi).map_err(err)?;
            let es = dual_form(t).map_err(err)?;
            // a point of E_s and an arbitrary point
            let on: Vec<Fp> = (0..es.basis.rows()).map(|_| f.random(rng)).collect();
            let on = es.representatives(&es.basis.vec_mul(&on));
            let any: Vec<Vec<Fp>> = (0..t.n())
                .map(|_| (0..space.dim()).map(|_| f.random(rng)).collect())
                .collect();
            for x in [on, any] {
                let j = kernel.eval(&x).map_err(err)?;
                let e = sigma_kernel_formula(t, psi, &x).map_err(err)?;
                close(j, e, tol, "J(x) differs from the formula")?;
            }
            Ok(())
        });
    } else {
        rec.skip("weil.trace_kernel");
    }
    rec.run("weil.trace_rho_m", || {
        let v: Vec<Vec<Fp>> = t
            .lagrangians()
            .iter()
            .map(|l| random_element_of(l, rng))
            .collect();
        let mut samples = vec![v];
        if let Some(ts) = ts {
            let k = random_element_of(&ts.k.subspace, rng);
            samples.push(ts.k.complex.components(&k));
        }
        for v in samples {
            let a = trace_rho_m(t, psi, &v).map_err(err)?;
            let b = trace_rho_m_formula(t, psi, &v).map_err(err)?;
            close(a, b, tol, "Tr ρ(m(v)) differs from the formula")?;
        }
        Ok(())
    });
}

/// Instances with equal `(m, n, dims of l_i ∩ l_{i+1})` must have equal `dim T̄`.
pub fn bar_local_constancy(stats: &[InstanceStats]) -> Verdict {
    let mut seen: BTreeMap<(usize, usize, Vec<usize>), usize> = BTreeMap::new();
    for s in stats {
        let Some(d) = s.bar_dim else { continue };
        let key = (s.m, s.n, s.edge_dims.clone());
        let prev = *seen.entry(key.clone()).or_insert(d);
        require(prev == d, || {
            format!("statistics {key:?} give dim T̄ = {prev} and {d}")
        })?;
    }
    Ok(())
}
