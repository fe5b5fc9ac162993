//! JSONL problem files: one tuple of Lagrangians per line.

use std::fmt::Display;

use maslov_core::{Field, LagrangianTuple, PrimeField, Rationals, Subspace, SymplecticSpace};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldSpec {
    Prime { p: u32 },
    Rational,
}

impl FieldSpec {
    pub fn name(&self) -> String {
        match self {
            FieldSpec::Prime { p } => format!("F_{p}"),
            FieldSpec::Rational => "Q".into(),
        }
    }
}

/// A matrix entry: a plain integer or an exact `"num/den"` string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Text(String),
}

impl Entry {
    pub fn of(x: &impl Display) -> Entry {
        let s = x.to_string();
        match s.parse::<i64>() {
            Ok(v) => Entry::Int(v),
            Err(_) => Entry::Text(s),
        }
    }

    fn value<F: Field>(&self, f: &F) -> maslov_core::Result<F::Elem> {
        match self {
            Entry::Int(v) => Ok(f.from_i64(*v)),
            Entry::Text(s) => f.parse(s),
        }
    }
}

pub fn entries_of<F: Field>(m: &maslov_core::Matrix<F>) -> Vec<Vec<Entry>> {
    m.row_vecs()
        .iter()
        .map(|r| r.iter().map(Entry::of).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub field: FieldSpec,
    pub m: usize,
    /// Row bases in `F^{2m}`, one per Lagrangian.
    pub lagrangians: Vec<Vec<Vec<Entry>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi_twist: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug)]
pub enum Tuple {
    Prime(LagrangianTuple<PrimeField>),
    Rational(LagrangianTuple<Rationals>),
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub field: FieldSpec,
    pub tuple: Tuple,
    pub psi_twist: i64,
    pub seed: Option<u64>,
    pub tolerance: f64,
}

impl ProblemFile {
    pub fn parse_line(line: &str) -> Result<Self, CliError> {
        serde_json::from_str(line)
            .map_err(|e| CliError::validation(format!("malformed problem: {e}")))
    }

    /// Reads every non-blank line; errors carry the 1-based line number.
    pub fn parse_jsonl(text: &str) -> Result<Vec<Self>, CliError> {
        text.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| Self::parse_line(l).map_err(|e| e.context(format!("line {}", i + 1))))
            .collect()
    }

    pub fn to_problem(&self) -> Result<Problem, CliError> {
        let tolerance = self.tolerance.unwrap_or(DEFAULT_TOLERANCE);
        if !(tolerance.is_finite() && tolerance > 0.0) {
            return Err(CliError::validation(format!(
                "tolerance {tolerance} must be positive"
            )));
        }
        let psi_twist = self.psi_twist.unwrap_or(1);
        let tuple = match self.field {
            FieldSpec::Prime { p } => {
                let f = PrimeField::new(p).map_err(CliError::from)?;
                if f.from_i64(psi_twist).value() == 0 {
                    return Err(CliError::validation(format!(
                        "psi_twist {psi_twist} is divisible by {p}"
                    )));
                }
                Tuple::Prime(build_tuple(&f, self.m, &self.lagrangians)?)
            }
            FieldSpec::Rational => {
                Tuple::Rational(build_tuple(&Rationals, self.m, &self.lagrangians)?)
            }
        };
        Ok(Problem {
            field: self.field,
            tuple,
            psi_twist,
            seed: self.seed,
            tolerance,
        })
    }

    /// The same problem with every basis replaced by its reduced row echelon form.
    pub fn canonical(&self) -> Result<Self, CliError> {
        let p = self.to_problem()?;
        let lagrangians = match &p.tuple {
            Tuple::Prime(t) => canonical_bases(t),
            Tuple::Rational(t) => canonical_bases(t),
        };
        Ok(ProblemFile {
            lagrangians,
            ..self.clone()
        })
    }

    pub fn from_tuple<F: Field>(field: FieldSpec, t: &LagrangianTuple<F>) -> Self {
        ProblemFile {
            field,
            m: t.m(),
            lagrangians: canonical_bases(t),
            psi_twist: None,
            seed: None,
            tolerance: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("problem serializes")
    }
}

fn canonical_bases<F: Field>(t: &LagrangianTuple<F>) -> Vec<Vec<Vec<Entry>>> {
    t.lagrangians()
        .iter()
        .map(|l| entries_of(l.basis()))
        .collect()
}

/// Validates row by row so diagnostics point at the input rather than a reduced basis.
pub fn build_tuple<F: Field>(
    f: &F,
    m: usize,
    lagrangians: &[Vec<Vec<Entry>>],
) -> Result<LagrangianTuple<F>, CliError> {
    if m == 0 {
        return Err(CliError::validation("m must be at least 1"));
    }
    if lagrangians.is_empty() {
        return Err(CliError::validation("no lagrangians given"));
    }
    let space = SymplecticSpace::new(f, m);
    let mut ls = Vec::with_capacity(lagrangians.len());
    for (i, rows) in lagrangians.iter().enumerate() {
        let bad = |msg: String| CliError::validation(format!("lagrangian {i}: {msg}"));
        if rows.len() != m {
            return Err(bad(format!("{} rows given, expected m = {m}", rows.len())));
        }
        let mut vs = Vec::with_capacity(m);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != 2 * m {
                return Err(bad(format!(
                    "row {r} has {} entries, expected {}",
                    row.len(),
                    2 * m
                )));
            }
            let v = row
                .iter()
                .map(|e| e.value(f))
                .collect::<maslov_core::Result<Vec<_>>>()
                .map_err(|e| bad(format!("row {r}: {e}")))?;
            vs.push(v);
        }
        for a in 0..m {
            for b in a + 1..m {
                let x = space.b(&vs[a], &vs[b]);
                if !maslov_core::Scalar::is_zero(&x) {
                    return Err(bad(format!(
                        "rows {a} and {b} pair to {x}, so the span is not isotropic"
                    )));
                }
            }
        }
        let l = Subspace::span(f, 2 * m, &vs);
        if l.dim() != m {
            return Err(bad(format!(
                "rows span a subspace of dimension {}, expected {m}",
                l.dim()
            )));
        }
        ls.push(l);
    }
    LagrangianTuple::new(space, ls).map_err(CliError::from)
}

pub fn three_lines_problem(p: u32) -> ProblemFile {
    ProblemFile {
        field: FieldSpec::Prime { p },
        m: 1,
        lagrangians: vec![
            vec![vec![Entry::Int(1), Entry::Int(0)]],
            vec![vec![Entry::Int(1), Entry::Int(1)]],
            vec![vec![Entry::Int(0), Entry::Int(1)]],
        ],
        psi_twist: None,
        seed: None,
        tolerance: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::ExitStatus;

    #[test]
    fn parses_integer_and_rational_entries() {
        let line = r#"{"field":{"kind":"rational"},"m":1,"lagrangians":[[[1,"1/2"]],[[0,1]]]}"#;
        let pf = ProblemFile::parse_line(line).unwrap();
        let canon = pf.canonical().unwrap();
        assert_eq!(
            canon.lagrangians[0],
            vec![vec![Entry::Int(1), Entry::Text("1/2".into())]]
        );
        assert_eq!(ProblemFile::parse_line(&canon.to_json()).unwrap(), canon);
    }

    #[test]
    fn rejects_characteristic_two() {
        let mut pf = three_lines_problem(3);
        pf.field = FieldSpec::Prime { p: 2 };
        assert_eq!(pf.to_problem().unwrap_err().status, ExitStatus::Validation);
    }

    #[test]
    fn diagnostics_name_lagrangian_and_row() {
        let line = r#"{"field":{"kind":"prime","p":5},"m":2,"lagrangians":[[[1,0,0,0],[0,1,0,0]],[[1,0,0,0],[0,0,1,0]]]}"#;
        let e = ProblemFile::parse_line(line)
            .unwrap()
            .to_problem()
            .unwrap_err();
        assert!(
            e.message.contains("lagrangian 1") && e.message.contains("rows 0 and 1"),
            "{e}"
        );
        let line = r#"{"field":{"kind":"prime","p":5},"m":1,"lagrangians":[[[1,0,3]]]}"#;
        let e = ProblemFile::parse_line(line)
            .unwrap()
            .to_problem()
            .unwrap_err();
        assert!(e.message.contains("lagrangian 0: row 0"), "{e}");
    }
}
