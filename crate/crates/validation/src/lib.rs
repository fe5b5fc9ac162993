//! Independent oracles and a small runner for named acceptance criteria.
//!
//! Oracles here use only `f64` arithmetic and integer residues so they share no
//! code path with the library they check.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

/// `p^{−½}·Σ_{x mod p} exp(2πi·(c·x²·2⁻¹ mod p)/p)` as `(re, im)`.
///
/// `c = 1` and `c = −1` give the two normalizations of `γ(⟨1⟩)` in use.
pub fn gauss_gamma(p: u64, c: i64) -> (f64, f64) {
    let inv2 = (p + 1) / 2;
    let c = c.rem_euclid(p as i64) as u64;
    let (mut re, mut im) = (0.0, 0.0);
    for x in 0..p {
        let e = (c * x % p * x % p * inv2) % p;
        let arg = 2.0 * PI * e as f64 / p as f64;
        re += arg.cos();
        im += arg.sin();
    }
    let s = (p as f64).sqrt();
    (re / s, im / s)
}

pub struct Outcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

/// Runs criteria in order, printing one line each.
#[derive(Default)]
pub struct Runner {
    pub outcomes: Vec<Outcome>,
}

impl Runner {
    /// `f` returns a short summary on success; a `budget` turns slow runs into failures.
    pub fn criterion(
        &mut self,
        name: &'static str,
        budget: Option<Duration>,
        f: impl FnOnce() -> Result<String, String>,
    ) {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(format!(
                "panicked: {}",
                e.downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default()
            ))
        });
        let elapsed = start.elapsed();
        let (passed, detail) = match (res, budget) {
            (Ok(d), Some(b)) if elapsed > b => {
                (false, format!("{d}; took {elapsed:.2?}, budget {b:?}"))
            }
            (Ok(d), _) => (true, d),
            (Err(e), _) => (false, e),
        };
        println!(
            "{} {name}: {detail} [{elapsed:.2?}]",
            if passed { "PASS" } else { "FAIL" }
        );
        self.outcomes.push(Outcome {
            name,
            passed,
            detail,
            elapsed,
        });
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.outcomes
            .iter()
            .filter(|o| !o.passed)
            .map(|o| o.name)
            .collect()
    }
}

/// Fails with `msg` unless `cond`.
pub fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}
