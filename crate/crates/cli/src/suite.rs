//! Seeded verification suites run in parallel and reported in instance order.

use std::collections::BTreeMap;

use maslov_core::instances::{instance_seed, suite_instance};
use maslov_core::maslov::compute_t;
use maslov_core::properties::{
    bar_local_constancy, check_instance, check_prime_instance, CheckOptions, InstanceStats, Outcome,
};
use maslov_core::weil::{cycle_matrix, scalar_of, DEFAULT_MAX_MODEL_DIM};
use maslov_core::witt::{gamma, AdditiveCharacter};
use maslov_core::{PrimeField, Rationals};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, ExitStatus};
use crate::problem::{FieldSpec, ProblemFile};
use crate::report::ComplexValue;

/// Builds the worker pool; `MASLOV_THREADS` overrides the default size.
pub fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("MASLOV_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| {
            CliError::validation(format!("MASLOV_THREADS={v:?} is not a thread count"))
        })?;
        b = b.num_threads(n);
    }
    b.build()
        .map_err(|e| CliError::validation(format!("thread pool: {e}")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldChoice {
    Prime,
    Rational,
    All,
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub fields: FieldChoice,
    pub primes: Vec<u32>,
    pub max_m: usize,
    pub min_n: usize,
    pub max_n: usize,
    pub count: usize,
    pub seed: u64,
    pub tol: f64,
    pub corrupt: bool,
    /// Run only this instance index.
    pub instance: Option<usize>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            fields: FieldChoice::Prime,
            primes: vec![3, 5, 7, 11],
            max_m: 3,
            min_n: 3,
            max_n: 6,
            count: 200,
            seed: 0,
            tol: 1e-9,
            corrupt: false,
            instance: None,
        }
    }
}

impl VerifyConfig {
    fn slots(&self) -> Result<Vec<FieldSpec>, CliError> {
        let mut out = Vec::new();
        if self.fields != FieldChoice::Rational {
            for &p in &self.primes {
                PrimeField::new(p)?;
                out.push(FieldSpec::Prime { p });
            }
        }
        if self.fields != FieldChoice::Prime {
            out.push(FieldSpec::Rational);
        }
        if out.is_empty() {
            return Err(CliError::validation("no fields selected"));
        }
        Ok(out)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.max_m == 0 {
            return Err(CliError::validation("--m must be at least 1"));
        }
        if self.min_n < 3 || self.max_n < self.min_n {
            return Err(CliError::validation(format!(
                "lengths {}..={} must satisfy 3 ≤ min ≤ max",
                self.min_n, self.max_n
            )));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(CliError::validation("--tol must be positive"));
        }
        Ok(())
    }

    pub fn replay_command(&self, index: usize) -> String {
        let fields = match self.fields {
            FieldChoice::Prime => "prime",
            FieldChoice::Rational => "rational",
            FieldChoice::All => "all",
        };
        let primes: Vec<String> = self.primes.iter().map(u32::to_string).collect();
        format!(
            "maslov verify --field {fields} --p {} --m {} --n {} --seed {} --tol {:e}{} --instance {index}",
            primes.join(","),
            self.max_m,
            self.max_n,
            self.seed,
            self.tol,
            if self.corrupt { " --corrupt" } else { "" },
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub property: &'static str,
    /// `"pass"`, `"fail"` or `"skip"`.
    pub outcome: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InstanceRecord {
    pub index: usize,
    pub seed: u64,
    pub field: FieldSpec,
    pub problem: ProblemFile,
    pub checks: Vec<CheckRecord>,
    #[serde(skip)]
    pub stats: InstanceStats,
}

impl InstanceRecord {
    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| c.outcome == "fail")
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifySummary {
    pub instances: usize,
    pub failed_instances: Vec<usize>,
    pub tallies: BTreeMap<&'static str, Tally>,
    /// Checks across instances, such as local constancy of `dim T̄`.
    pub cross_checks: BTreeMap<&'static str, Option<String>>,
}

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.failed_instances.is_empty() && self.cross_checks.values().all(Option::is_none)
    }

    /// Numeric failures only (characters, Weil) map to the tolerance status.
    pub fn status(&self, records: &[InstanceRecord]) -> ExitStatus {
        if self.passed() {
            return ExitStatus::Success;
        }
        let numeric = self.cross_checks.values().all(Option::is_none)
            && records
                .iter()
                .flat_map(InstanceRecord::failures)
                .all(|c| c.property.starts_with("gamma.") || c.property.starts_with("weil."));
        if numeric {
            ExitStatus::Tolerance
        } else {
            ExitStatus::Consistency
        }
    }
}

fn record_checks(checks: Vec<maslov_core::properties::Check>) -> Vec<CheckRecord> {
    checks
        .into_iter()
        .map(|c| {
            let (outcome, message) = match c.outcome {
                Outcome::Pass => ("pass", None),
                Outcome::Fail(m) => ("fail", Some(m)),
                Outcome::Skipped => ("skip", None),
            };
            CheckRecord {
                property: c.property,
                outcome,
                message,
            }
        })
        .collect()
}

fn run_instance(cfg: &VerifyConfig, field: FieldSpec, index: usize) -> InstanceRecord {
    let seed = instance_seed(cfg.seed, index);
    let opts = CheckOptions {
        tol: cfg.tol,
        psi_twist: 1,
        corrupt: cfg.corrupt,
    };
    let (problem, checks) = match field {
        FieldSpec::Prime { p } => {
            let f = PrimeField::new(p).expect("validated prime");
            let t = suite_instance(&f, cfg.seed, index, cfg.max_m, cfg.min_n, cfg.max_n);
            (
                ProblemFile::from_tuple(field, &t),
                check_prime_instance(&t, seed, &opts),
            )
        }
        FieldSpec::Rational => {
            let t = suite_instance(&Rationals, cfg.seed, index, cfg.max_m, cfg.min_n, cfg.max_n);
            (
                ProblemFile::from_tuple(field, &t),
                check_instance(&t, seed, &opts),
            )
        }
    };
    InstanceRecord {
        index,
        seed,
        field,
        problem,
        stats: checks.stats,
        checks: record_checks(checks.checks),
    }
}

pub fn run_verify(cfg: &VerifyConfig) -> Result<(Vec<InstanceRecord>, VerifySummary), CliError> {
    cfg.validate()?;
    let slots = cfg.slots()?;
    let indices: Vec<usize> = match cfg.instance {
        Some(i) => vec![i],
        None => (0..cfg.count).collect(),
    };
    let pool = thread_pool()?;
    let records: Vec<InstanceRecord> = pool.install(|| {
        indices
            .par_iter()
            .map(|&i| run_instance(cfg, slots[i % slots.len()], i))
            .collect()
    });

    let mut tallies: BTreeMap<&'static str, Tally> = BTreeMap::new();
    for c in records.iter().flat_map(|r| &r.checks) {
        let t = tallies.entry(c.property).or_default();
        match c.outcome {
            "pass" => t.pass += 1,
            "fail" => t.fail += 1,
            _ => t.skip += 1,
        }
    }
    let mut by_field: BTreeMap<String, Vec<InstanceStats>> = BTreeMap::new();
    for r in &records {
        by_field
            .entry(r.field.name())
            .or_default()
            .push(r.stats.clone());
    }
    let constancy = by_field.iter().find_map(|(name, stats)| {
        bar_local_constancy(stats)
            .err()
            .map(|e| format!("{name}: {e}"))
    });
    let mut cross_checks = BTreeMap::new();
    cross_checks.insert("maslov.bar_local_constancy", constancy);
    let summary = VerifySummary {
        instances: records.len(),
        failed_instances: records
            .iter()
            .filter(|r| r.failures().next().is_some())
            .map(|r| r.index)
            .collect(),
        tallies,
        cross_checks,
    };
    Ok((records, summary))
}

#[derive(Clone, Debug)]
pub struct WeilConfig {
    pub p: u32,
    pub max_m: usize,
    pub n: usize,
    pub count: usize,
    pub seed: u64,
    pub tol: f64,
    pub psi_twist: i64,
    pub instance: Option<usize>,
}

impl Default for WeilConfig {
    fn default() -> Self {
        WeilConfig {
            p: 3,
            max_m: 1,
            n: 3,
            count: 50,
            seed: 0,
            tol: 1e-9,
            psi_twist: 1,
            instance: None,
        }
    }
}

impl WeilConfig {
    pub fn replay_command(&self, index: usize) -> String {
        format!(
            "maslov weil --p {} --m {} --n {} --seed {} --tol {:e} --twist {} --instance {index}",
            self.p, self.max_m, self.n, self.seed, self.tol, self.psi_twist
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WeilRecord {
    pub index: usize,
    pub problem: ProblemFile,
    pub dim_t: usize,
    pub scalar: ComplexValue,
    pub gamma_minus_tau: ComplexValue,
    pub off_scalar_residual: f64,
    pub modulus_residual: f64,
    pub gamma_residual: f64,
    pub pass: bool,
}

impl WeilRecord {
    pub fn worst_residual(&self) -> f64 {
        self.off_scalar_residual
            .max(self.modulus_residual)
            .max(self.gamma_residual)
    }
}

/// Composes the cycle of canonical intertwiners for one tuple and compares with `γ(−τ)`.
pub fn weil_record(
    index: usize,
    t: &maslov_core::LagrangianTuple<PrimeField>,
    psi: &AdditiveCharacter,
    tol: f64,
) -> Result<WeilRecord, CliError> {
    let c = cycle_matrix(t, psi)?;
    let s = scalar_of(&c, f64::INFINITY)?;
    let ts = compute_t(t)?;
    let g = gamma(&ts.gram().neg(), psi);
    let mut r = WeilRecord {
        index,
        problem: ProblemFile::from_tuple(FieldSpec::Prime { p: t.field().p() }, t),
        dim_t: ts.dim(),
        scalar: s.scalar.into(),
        gamma_minus_tau: g.into(),
        off_scalar_residual: s.off_scalar,
        modulus_residual: (s.scalar.norm() - 1.0).abs(),
        gamma_residual: (s.scalar - g).norm(),
        pass: false,
    };
    r.pass = r.worst_residual() <= tol;
    Ok(r)
}

pub fn run_weil(cfg: &WeilConfig) -> Result<Vec<WeilRecord>, CliError> {
    let f = PrimeField::new(cfg.p)?;
    if cfg.max_m == 0 || cfg.n < 3 {
        return Err(CliError::validation("weil needs m ≥ 1 and n ≥ 3"));
    }
    let dim = (cfg.p as u64)
        .checked_pow(cfg.max_m as u32)
        .unwrap_or(u64::MAX);
    if dim > DEFAULT_MAX_MODEL_DIM as u64 {
        return Err(CliError::validation(format!(
            "p^m = {dim} exceeds the model size limit {DEFAULT_MAX_MODEL_DIM}"
        )));
    }
    if !(cfg.tol.is_finite() && cfg.tol > 0.0) {
        return Err(CliError::validation("--tol must be positive"));
    }
    let psi = AdditiveCharacter::with_twist(&f, cfg.psi_twist)?;
    let indices: Vec<usize> = match cfg.instance {
        Some(i) => vec![i],
        None => (0..cfg.count).collect(),
    };
    let pool = thread_pool()?;
    pool.install(|| {
        indices
            .par_iter()
            .map(|&i| {
                let t = suite_instance(&f, cfg.seed, i, cfg.max_m, cfg.n, cfg.n);
                weil_record(i, &t, &psi, cfg.tol)
            })
            .collect()
    })
}
