//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Duration;

use maslov_core::instances::{from_integer_rows, rng_from_seed, suite_instance, three_lines};
use maslov_core::maslov::{
    bar_space, chain_split, check_chain_map, check_factorization, check_induces_q, compute_k,
    compute_t, dual_form, expected_bar_dim, expected_dim_t, factor_maslov, kashiwara_compare,
    pulled_back_inverse_gram, reindex, reverse, BilinearSpace,
};
use maslov_core::sheaf::h1_with_cup;
use maslov_core::weil::{
    cycle_scalar, sigma_kernel_formula, trace_rho_m, trace_rho_m_formula, verify_theorem,
    Complex64, SigmaKernel,
};
use maslov_core::witt::{
    all_vectors, anisotropic_kernel, fourier_residual, gamma, witt_add, witt_equal,
    AdditiveCharacter,
};
use maslov_core::{Field, Fp, LagrangianTuple, Matrix, PrimeField, Rationals, Scalar, Subspace};
use maslov_validation::{gauss_gamma, require, Runner};
use rand::Rng;

const SEED: u64 = 0x6d61_736c_6f76;
const PER_FIELD: usize = 200;
const PRIMES: [u32; 4] = [3, 5, 7, 11];
const NUMERIC_TOL: f64 = 1e-9;
const PIN_TOL: f64 = 1e-12;

type Check<T> = Result<T, String>;

struct Suite {
    primes: Vec<(String, LagrangianTuple<PrimeField>)>,
    rationals: Vec<(String, LagrangianTuple<Rationals>)>,
}

impl Suite {
    fn build() -> Self {
        let mut primes = Vec::new();
        for p in PRIMES {
            let f = PrimeField::new(p).unwrap();
            for i in 0..PER_FIELD {
                primes.push((format!("F_{p} #{i}"), suite_instance(&f, SEED, i, 3, 3, 6)));
            }
        }
        let rationals = (0..PER_FIELD)
            .map(|i| {
                (
                    format!("Q #{i}"),
                    suite_instance(&Rationals, SEED, i, 3, 3, 6),
                )
            })
            .collect();
        Suite { primes, rationals }
    }

    fn len(&self) -> usize {
        self.primes.len() + self.rationals.len()
    }
}

/// Applies a generic check to every instance of both fields.
macro_rules! each_instance {
    ($suite:expr, $check:ident) => {{
        for (label, t) in &$suite.primes {
            $check(t).map_err(|e| format!("{label}: {e}"))?;
        }
        for (label, t) in &$suite.rationals {
            $check(t).map_err(|e| format!("{label}: {e}"))?;
        }
        Ok::<usize, String>($suite.len())
    }};
}

fn e(err: impl std::fmt::Display) -> String {
    err.to_string()
}

fn radical<F: Field>(t: &LagrangianTuple<F>) -> Check<()> {
    let k = compute_k(t).map_err(e)?;
    require(k.radical() == k.image_boundary(), || {
        format!(
            "ker q has dim {}, image ∂ has dim {}",
            k.radical().dim(),
            k.image_boundary().dim()
        )
    })
}

fn dimension<F: Field>(t: &LagrangianTuple<F>) -> Check<()> {
    let d = compute_t(t).map_err(e)?.dim() as isize;
    let want = expected_dim_t(t);
    require(d == want, || format!("dim T = {d}, formula {want}"))
}

fn is_degenerate<F: Field>(t: &LagrangianTuple<F>) -> bool {
    let ls = t.lagrangians();
    let repeated = (0..ls.len()).any(|i| (0..i).any(|j| ls[i] == ls[j]));
    repeated || !t.common_intersection().is_zero()
}

fn dihedral<F: Field>(t: &LagrangianTuple<F>) -> Check<()> {
    for r in 1..t.n() {
        require(reindex(t, r).map_err(e)?.preserves(), || {
            format!("rotation by {r} changes the Gram")
        })?;
    }
    require(reverse(t).map_err(e)?.negates(), || {
        "reversal does not negate the Gram".into()
    })
}

fn chain<F: Field>(t: &LagrangianTuple<F>) -> Check<()> {
    for k in 3..t.n() {
        let c = chain_split(t, k).map_err(|x| format!("k = {k}: {x}"))?;
        let iso = &c.isometry;
        require(
            iso.rows() == c.subquotient.dim() && iso.rank() == iso.rows(),
            || format!("k = {k}: s is not a bijection onto I^⊥/I"),
        )?;
        require(
            c.subquotient.quadratic.gram.restrict_form(iso) == c.sum_gram(),
            || format!("k = {k}: s is not an isometry"),
        )?;
        let i = c.isotropic.basis();
        require(c.whole.gram().restrict_form(i).is_zero(), || {
            format!("k = {k}: I is not isotropic")
        })?;
    }
    Ok(())
}

fn chain_witt(t: &LagrangianTuple<PrimeField>) -> Check<()> {
    let f = *t.field();
    let whole = anisotropic_kernel(&f, compute_t(t).map_err(e)?.gram());
    for k in 3..t.n() {
        let c = chain_split(t, k).map_err(e)?;
        let sum = witt_add(
            &anisotropic_kernel(&f, c.first.gram()),
            &anisotropic_kernel(&f, c.second.gram()),
        )
        .map_err(e)?;
        require(witt_equal(&whole, &sum).map_err(e)?, || {
            format!("k = {k}: {whole} ≠ {sum}")
        })?;
    }
    Ok(())
}

fn bar<F: Field>(t: &LagrangianTuple<F>) -> Check<()> {
    let b = bar_space(t).map_err(e)?;
    let radical = BilinearSpace::new(b.ambient_gram.clone())
        .map_err(e)?
        .radical;
    require(
        radical == Subspace::row_space(&b.tilde_partial.transpose()),
        || "ker q̄ ≠ image ∂̃".into(),
    )?;
    require(b.dim() == expected_bar_dim(t), || {
        format!("dim T̄ = {}, formula {}", b.dim(), expected_bar_dim(t))
    })?;
    let (sq, iso) = b.subquotient_witness().map_err(e)?;
    require(sq.quadratic.gram.restrict_form(&iso) == *b.t.gram(), || {
        "witness is not an isometry".into()
    })
}

fn bar_class(t: &LagrangianTuple<PrimeField>) -> Check<()> {
    let f = *t.field();
    let b = bar_space(t).map_err(e)?;
    let (x, y) = (
        anisotropic_kernel(&f, &b.bar_t.gram),
        anisotropic_kernel(&f, b.t.gram()),
    );
    require(x == y, || format!("class(T̄) = {x}, class(T) = {y}"))
}

type Statistics = (String, usize, usize, Vec<usize>);

fn statistics<F: Field>(t: &LagrangianTuple<F>) -> Statistics {
    let edges = t.edge_intersections().iter().map(Subspace::dim).collect();
    (t.field().name(), t.m(), t.n(), edges)
}

/// Two tuples with equal edge statistics but different common intersections.
fn constancy_pair<F: Field>(f: &F) -> Check<(usize, usize)> {
    // e1, e2, f1, f2 in standard coordinates
    let a = from_integer_rows(
        f,
        2,
        &[
            vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0]],
            vec![vec![1, 0, 0, 0], vec![0, 1, 0, 1]],
            vec![vec![1, 0, 0, 0], vec![0, 0, 0, 1]],
            vec![vec![1, 0, 0, 0], vec![0, 1, 0, 2]],
        ],
    )
    .map_err(e)?;
    let b = from_integer_rows(
        f,
        2,
        &[
            vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0]],
            vec![vec![1, 0, 0, 0], vec![0, 0, 0, 1]],
            vec![vec![0, 0, 1, 0], vec![0, 0, 0, 1]],
            vec![vec![0, 0, 1, 0], vec![0, 1, 0, 0]],
        ],
    )
    .map_err(e)?;
    require(statistics(&a) == statistics(&b), || {
        "fixture statistics differ".into()
    })?;
    require(
        a.common_intersection().dim() != b.common_intersection().dim(),
        || "fixture pair should differ in ⋂ l_i".into(),
    )?;
    let (da, db) = (
        bar_space(&a).map_err(e)?.dim(),
        bar_space(&b).map_err(e)?.dim(),
    );
    require(da == db, || format!("dim T̄ = {da} and {db}"))?;
    Ok((da, a.common_intersection().dim()))
}

fn factorization<F: Field>(t: &LagrangianTuple<F>) -> Check<()> {
    let (c, phi, fz) = factor_maslov(t).map_err(e)?;
    check_chain_map(&c.complex, &phi).map_err(e)?;
    check_induces_q(&c, &phi).map_err(e)?;
    check_factorization(&c.complex, &phi, &fz).map_err(e)?;
    require(
        fz.f0.gram.is_symmetric() && !fz.f0.gram.det().is_zero(),
        || "f_0 is not symmetric invertible".into(),
    )?;
    let want = bar_space(t).map_err(e)?.dim();
    require(fz.d0_dim() == want, || {
        format!("dim D^0 = {}, dim T̄ = {want}", fz.d0_dim())
    })
}

fn sheaf<F: Field>(t: &LagrangianTuple<F>) -> Check<()> {
    let r = h1_with_cup(t).map_err(e)?;
    let g = r.t.gram();
    require(r.dim_h1() == r.t.dim(), || {
        format!("dim H1 = {}, dim T = {}", r.dim_h1(), r.t.dim())
    })?;
    require(r.section_cup == g.neg(), || "cup Gram ≠ −Gram(T)".into())
}

fn random_form<R: Rng>(f: &PrimeField, dim: usize, rng: &mut R) -> Matrix<PrimeField> {
    loop {
        let a = Matrix::random(f, dim, dim, rng);
        let g = a.add(&a.transpose());
        if !g.det().is_zero() {
            return g;
        }
    }
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

fn fmt_c(z: Complex64) -> String {
    format!("{:+.6}{:+.6}i", z.re, z.im)
}

fn trace_instances() -> Vec<LagrangianTuple<PrimeField>> {
    let f = PrimeField::new(3).unwrap();
    let mut out = Vec::new();
    for i in 0.. {
        let n = 3 + i % 3;
        let t = suite_instance(&f, SEED ^ 0x7ace, i, 1, n, n);
        if t.common_intersection().is_zero() && t.total_sum().dim() == t.space().dim() {
            out.push(t);
        }
        if out.len() == 20 {
            break;
        }
    }
    out
}

fn trace_formulas(t: &LagrangianTuple<PrimeField>, rng: &mut impl Rng) -> Check<usize> {
    let f = *t.field();
    let psi = AdditiveCharacter::new(&f);
    let kernel = SigmaKernel::new(t, &psi).map_err(e)?;
    let dim = t.space().dim();
    let points: Vec<Vec<Vec<Fp>>> = if t.n() == 3 {
        all_vectors(&f, 3 * dim)
            .map(|v| v.chunks(dim).map(<[Fp]>::to_vec).collect())
            .collect()
    } else {
        let es = dual_form(t).map_err(e)?;
        let mut pts = Vec::new();
        for _ in 0..200 {
            pts.push(
                (0..t.n())
                    .map(|_| (0..dim).map(|_| f.random(rng)).collect())
                    .collect(),
            );
            let c: Vec<Fp> = (0..es.basis.rows()).map(|_| f.random(rng)).collect();
            pts.push(es.representatives(&es.basis.vec_mul(&c)));
        }
        pts
    };
    for x in &points {
        let (j, want) = (
            kernel.eval(x).map_err(e)?,
            sigma_kernel_formula(t, &psi, x).map_err(e)?,
        );
        require(close(j, want, NUMERIC_TOL), || {
            format!("J(x) = {} but formula {}", fmt_c(j), fmt_c(want))
        })?;
    }
    let k = compute_k(t).map_err(e)?;
    for trial in 0..20 {
        let v: Vec<Vec<Fp>> = if trial % 2 == 0 {
            let c: Vec<Fp> = (0..k.dim()).map(|_| f.random(rng)).collect();
            k.complex.components(&k.subspace.from_coordinates(&c))
        } else {
            t.lagrangians()
                .iter()
                .map(|l| {
                    l.from_coordinates(&(0..l.dim()).map(|_| f.random(rng)).collect::<Vec<_>>())
                })
                .collect()
        };
        let (a, b) = (
            trace_rho_m(t, &psi, &v).map_err(e)?,
            trace_rho_m_formula(t, &psi, &v).map_err(e)?,
        );
        require(close(a, b, NUMERIC_TOL), || {
            format!("Tr ρ(m(v)) = {} but formula {}", fmt_c(a), fmt_c(b))
        })?;
    }
    Ok(points.len())
}

fn main() -> ExitCode {
    let suite = Suite::build();
    let mut run = Runner::default();
    let ten = Some(Duration::from_secs(10));

    run.criterion("radical identity", ten, || {
        let n = each_instance!(suite, radical)?;
        Ok(format!(
            "ker q = image ∂ on {n} instances over F_3, F_5, F_7, F_11, Q"
        ))
    });
    run.criterion("dimension formula", None, || {
        let n = each_instance!(suite, dimension)?;
        let degenerate = suite
            .primes
            .iter()
            .filter(|(_, t)| is_degenerate(t))
            .count()
            + suite
                .rationals
                .iter()
                .filter(|(_, t)| is_degenerate(t))
                .count();
        require(degenerate > 0, || "suite has no degenerate tuples".into())?;
        Ok(format!(
            "{n} instances, {degenerate} with repeats or ⋂ l_i ≠ 0"
        ))
    });
    run.criterion("dihedral symmetry", None, || {
        let n = each_instance!(suite, dihedral)?;
        Ok(format!(
            "rotations preserve and reversal negates on {n} instances"
        ))
    });
    run.criterion("chain condition", None, || {
        let n = each_instance!(suite, chain)?;
        for (label, t) in &suite.primes {
            chain_witt(t).map_err(|x| format!("{label}: {x}"))?;
        }
        Ok(format!(
            "isometry onto I^⊥/I for every k on {n} instances, Witt classes add over F_p"
        ))
    });
    run.criterion("Kashiwara comparison", None, || {
        let mut total = 0;
        for p in [3, 5, 7] {
            let f = PrimeField::new(p).unwrap();
            for i in 0..PER_FIELD {
                let t = suite_instance(&f, SEED ^ 0x3a5, i, 3, 3, 3);
                let c = kashiwara_compare(&t).map_err(|x| format!("F_{p} #{i}: {x}"))?;
                require(
                    c.subquotient.quadratic.gram.restrict_form(&c.isometry) == *c.t.gram(),
                    || format!("F_{p} #{i}: witness is not an isometry"),
                )?;
                let (a, b) = (
                    anisotropic_kernel(&f, c.t.gram()),
                    anisotropic_kernel(&f, &c.kash_nondegenerate.gram),
                );
                require(a == b, || {
                    format!("F_{p} #{i}: class(T) = {a}, class(T^Kash) = {b}")
                })?;
                total += 1;
            }
        }
        Ok(format!("classes agree on {total} triples"))
    });
    run.criterion("bar space", None, || {
        let n = each_instance!(suite, bar)?;
        for (label, t) in &suite.primes {
            bar_class(t).map_err(|x| format!("{label}: {x}"))?;
        }
        let mut seen: BTreeMap<Statistics, usize> = BTreeMap::new();
        let mut pairs = 0;
        let mut visit = |s: Statistics, d: usize| -> Check<()> {
            match seen.get(&s) {
                Some(&prev) => {
                    pairs += 1;
                    require(prev == d, || format!("statistics {s:?} give dim T̄ = {prev} and {d}"))
                }
                None => {
                    seen.insert(s, d);
                    Ok(())
                }
            }
        };
        for (_, t) in &suite.primes {
            visit(statistics(t), bar_space(t).map_err(e)?.dim())?;
        }
        for (_, t) in &suite.rationals {
            visit(statistics(t), bar_space(t).map_err(e)?.dim())?;
        }
        let (d, _) = constancy_pair(&Rationals)?;
        constancy_pair(&PrimeField::new(5).unwrap())?;
        Ok(format!(
            "{n} instances; {pairs} repeated statistics agree; fixture pair has dim T̄ = {d} over Q and F_5"
        ))
    });
    run.criterion("factorization", None, || {
        let n = each_instance!(suite, factorization)?;
        Ok(format!("all squares commute on {n} instances"))
    });
    run.criterion("sheaf cup product", ten, || {
        let n = each_instance!(suite, sheaf)?;
        Ok(format!("dim H1 = dim T and cup = −q on {n} instances"))
    });
    run.criterion("dual form", None, || {
        let mut checked = 0;
        for (label, t) in &suite.primes {
            if compute_t(t).map_err(e)?.dim() > 6 {
                continue;
            }
            let es = dual_form(t).map_err(|x| format!("{label}: {x}"))?;
            require(es.gram == pulled_back_inverse_gram(&es), || {
                format!("{label}: q* ≠ pulled-back inverse")
            })?;
            checked += 1;
        }
        Ok(format!(
            "q* matches the inverse Gram on {checked} instances with dim T ≤ 6"
        ))
    });
    run.criterion("gamma character", None, || {
        let mut rng = rng_from_seed(SEED ^ 0x9a);
        for p in PRIMES {
            let f = PrimeField::new(p).unwrap();
            let psi = AdditiveCharacter::new(&f);
            let h = gamma(&Matrix::from_i64(&f, 2, 2, &[0, 1, 1, 0]), &psi);
            require(close(h, Complex64::new(1.0, 0.0), PIN_TOL), || format!("γ(H) = {} over F_{p}", fmt_c(h)))?;
            let one = gamma(&Matrix::from_i64(&f, 1, 1, &[1]), &psi);
            let (re, im) = gauss_gamma(p as u64, 1);
            require(close(one, Complex64::new(re, im), PIN_TOL), || {
                format!("γ(⟨1⟩) = {} over F_{p}, Gauss sum {}", fmt_c(one), fmt_c(Complex64::new(re, im)))
            })?;
        }
        for pair in 0..100 {
            let f = PrimeField::new(PRIMES[pair % PRIMES.len()]).unwrap();
            let psi = AdditiveCharacter::new(&f);
            let a = random_form(&f, rng.random_range(1..=3), &mut rng);
            let b = random_form(&f, rng.random_range(1..=3), &mut rng);
            let (s, prod) = (gamma(&a.direct_sum(&b), &psi), gamma(&a, &psi) * gamma(&b, &psi));
            require(close(s, prod, NUMERIC_TOL), || format!("pair {pair}: γ(a ⊥ b) ≠ γ(a)γ(b)"))?;
        }
        let mut fourier = 0;
        for p in [3, 5, 7] {
            let f = PrimeField::new(p).unwrap();
            let psi = AdditiveCharacter::new(&f);
            for dim in 1..=2 {
                for _ in 0..10 {
                    let g = random_form(&f, dim, &mut rng);
                    let r = fourier_residual(&g, &psi).map_err(e)?;
                    require(r <= NUMERIC_TOL, || format!("Fourier residual {r:e} over F_{p}"))?;
                    fourier += 1;
                }
            }
        }
        Ok(format!("γ(H) = 1, γ(⟨1⟩) matches the Gauss sum, 100 additive pairs, {fourier} Fourier identities"))
    });
    run.criterion("gamma pinned value ⟨1⟩ over F_3 equals i", None, || {
        let f = PrimeField::new(3).unwrap();
        let g = gamma(
            &Matrix::from_i64(&f, 1, 1, &[1]),
            &AdditiveCharacter::new(&f),
        );
        let (re, im) = gauss_gamma(3, -1);
        let want = Complex64::new(re, im);
        require(close(g, want, PIN_TOL), || {
            format!("γ(⟨1⟩) = {}, pinned i = {}", fmt_c(g), fmt_c(want))
        })?;
        Ok(fmt_c(g))
    });
    run.criterion(
        "cycle scalar equals γ(−τ)",
        Some(Duration::from_secs(60)),
        || {
            let mut worst: f64 = 0.0;
            let mut total = 0;
            for p in [3, 5] {
                let f = PrimeField::new(p).unwrap();
                let psi = AdditiveCharacter::new(&f);
                for n in 3..=5 {
                    for i in 0..50 {
                        let t = suite_instance(&f, SEED ^ 0x91, i, 1, n, n);
                        let c = verify_theorem(&t, &psi, NUMERIC_TOL)
                            .map_err(|x| format!("F_{p} n = {n} #{i}: {x}"))?;
                        worst = worst
                            .max(c.cycle.off_scalar)
                            .max(c.mismatch)
                            .max((c.cycle.scalar.norm() - 1.0).abs());
                        total += 1;
                    }
                }
            }
            Ok(format!("{total} cycles, worst residual {worst:.1e}"))
        },
    );
    run.criterion(
        "cycle scalar pinned three lines over F_3 equals −i",
        None,
        || {
            let f = PrimeField::new(3).unwrap();
            let c = cycle_scalar(&three_lines(&f), &AdditiveCharacter::new(&f), NUMERIC_TOL)
                .map_err(e)?;
            let want = Complex64::new(0.0, -1.0);
            require(close(c.scalar, want, NUMERIC_TOL), || {
                format!("scalar = {}, pinned −i", fmt_c(c.scalar))
            })?;
            Ok(fmt_c(c.scalar))
        },
    );
    run.criterion("trace formulas", None, || {
        let mut rng = rng_from_seed(SEED ^ 0x7);
        let instances = trace_instances();
        let mut points = 0;
        for (i, t) in instances.iter().enumerate() {
            points +=
                trace_formulas(t, &mut rng).map_err(|x| format!("#{i} (n = {}): {x}", t.n()))?;
        }
        Ok(format!(
            "{} transverse instances over F_3, {points} kernel points",
            instances.len()
        ))
    });

    let failed = run.failures();
    println!(
        "acceptance: {} of {} criteria passed{}",
        run.outcomes.len() - failed.len(),
        run.outcomes.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!("; failing: {}", failed.join(", "))
        }
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
