//! Heredity coefficients `P_{ij,k}` of the model written as a quadratic
//! stochastic operator `x'_k = sum_ij P_{ij,k} x_i x_j`.
//!
//! Storage is 0-based; every report and the CSV export use 1-based indices
//! (`P_{12,1}` is `entries[0][1][0]`).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, SimplexPoint, ALGEBRAIC_TOL};

const N: usize = 4;

/// One listed heredity coefficient, 1-based. `doubled` entries are stated as
/// `2 P_{ij,k} = value` and split evenly between `(i,j)` and `(j,i)`.
struct Entry {
    i: usize,
    j: usize,
    k: usize,
    doubled: bool,
    expr: &'static str,
    value: fn(&ModelParams) -> f64,
}

impl Entry {
    fn coefficient(&self, p: &ModelParams) -> f64 {
        let v = (self.value)(p);
        if self.doubled {
            v / 2.0
        } else {
            v
        }
    }

    fn describe(&self) -> String {
        if self.doubled {
            format!("P_{{{}{},{}}} = ({})/2", self.i, self.j, self.k, self.expr)
        } else {
            format!("P_{{{}{},{}}} = {}", self.i, self.j, self.k, self.expr)
        }
    }
}

macro_rules! entry {
    ($i:literal $j:literal $k:literal, half, $expr:literal, $f:expr) => {
        Entry { i: $i, j: $j, k: $k, doubled: true, expr: $expr, value: $f }
    };
    ($i:literal $j:literal $k:literal, full, $expr:literal, $f:expr) => {
        Entry { i: $i, j: $j, k: $k, doubled: false, expr: $expr, value: $f }
    };
}

#[rustfmt::skip]
const ENTRIES: [Entry; 27] = [
    entry!(1 1 1, full, "1", |_| 1.0),
    entry!(1 2 1, half, "1+b-beta1*k1", |p| 1.0 + p.b - p.beta1 * p.k1),
    entry!(1 3 1, half, "1+b", |p| 1.0 + p.b),
    entry!(1 4 1, half, "1+b-beta1*k2", |p| 1.0 + p.b - p.beta1 * p.k2),
    entry!(2 2 1, full, "b", |p| p.b),
    entry!(2 3 1, half, "2b", |p| 2.0 * p.b),
    entry!(2 4 1, half, "2b", |p| 2.0 * p.b),
    entry!(3 3 1, full, "b", |p| p.b),
    entry!(3 4 1, half, "2b", |p| 2.0 * p.b),
    entry!(4 4 1, full, "b", |p| p.b),
    entry!(1 2 2, half, "1-b-alpha+beta1*k1", |p| 1.0 - p.b - p.alpha + p.beta1 * p.k1),
    entry!(1 4 2, half, "beta1*k2", |p| p.beta1 * p.k2),
    entry!(2 2 2, full, "1-b-alpha", |p| 1.0 - p.b - p.alpha),
    entry!(2 3 2, half, "1-b-alpha", |p| 1.0 - p.b - p.alpha),
    entry!(2 4 2, half, "1-b-alpha", |p| 1.0 - p.b - p.alpha),
    entry!(1 2 3, half, "alpha", |p| p.alpha),
    entry!(1 3 3, half, "1-b", |p| 1.0 - p.b),
    entry!(2 2 3, full, "alpha", |p| p.alpha),
    entry!(2 3 3, half, "1-b+alpha-beta2*k1", |p| 1.0 - p.b + p.alpha - p.beta2 * p.k1),
    entry!(2 4 3, half, "alpha", |p| p.alpha),
    entry!(3 3 3, full, "1-b", |p| 1.0 - p.b),
    entry!(3 4 3, half, "1-b-beta2*k2", |p| 1.0 - p.b - p.beta2 * p.k2),
    entry!(1 4 4, half, "1-b", |p| 1.0 - p.b),
    entry!(2 3 4, half, "beta2*k1", |p| p.beta2 * p.k1),
    entry!(2 4 4, half, "1-b", |p| 1.0 - p.b),
    entry!(3 4 4, half, "1-b+beta2*k2", |p| 1.0 - p.b + p.beta2 * p.k2),
    entry!(4 4 4, full, "1-b", |p| 1.0 - p.b),
];

/// Dense `4x4x4` cubic matrix with symmetric completion materialized.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QsoTensor {
    entries: [[[f64; N]; N]; N],
}

impl QsoTensor {
    pub fn from_entries(entries: [[[f64; N]; N]; N]) -> Self {
        Self { entries }
    }

    /// Populates the coefficients for any non-negative rates, admissible or
    /// not. Row sums are 1 regardless; the bounds are not.
    pub fn from_params_unchecked(p: &ModelParams) -> Self {
        let mut entries = [[[0.0; N]; N]; N];
        for e in &ENTRIES {
            let c = e.coefficient(p);
            let (i, j, k) = (e.i - 1, e.j - 1, e.k - 1);
            entries[i][j][k] = c;
            entries[j][i][k] = c;
        }
        Self { entries }
    }

    /// 0-based access.
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.entries[i][j][k]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, value: f64) {
        self.entries[i][j][k] = value;
    }

    pub fn entries(&self) -> &[[[f64; N]; N]; N] {
        &self.entries
    }

    pub fn row_sum(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j].iter().sum()
    }

    /// `i,j,k,value` with 1-based indices, header line first, then 64 rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,k,value\n");
        for i in 0..N {
            for j in 0..N {
                for k in 0..N {
                    out.push_str(&format!(
                        "{},{},{},{:.16e}\n",
                        i + 1,
                        j + 1,
                        k + 1,
                        self.entries[i][j][k]
                    ));
                }
            }
        }
        out
    }
}

pub fn build_tensor(p: &ModelParams) -> Result<QsoTensor> {
    p.check_signs()?;
    for e in &ENTRIES {
        let c = e.coefficient(p);
        if !(-ALGEBRAIC_TOL..=1.0 + ALGEBRAIC_TOL).contains(&c) {
            return Err(Error::TensorEntryOutOfRange {
                entry: e.describe(),
                value: c,
            });
        }
    }
    Ok(QsoTensor::from_params_unchecked(p))
}

/// `x'_k = sum_i sum_j P_{ij,k} x_i x_j`.
pub fn apply_qso(t: &QsoTensor, s: &SimplexPoint) -> Result<SimplexPoint> {
    let report = check_axioms(t);
    if !report.is_valid() {
        return Err(Error::InvalidTensor(report.to_string()));
    }
    Ok(apply_qso_unchecked(t, s))
}

pub(crate) fn apply_qso_unchecked(t: &QsoTensor, s: &SimplexPoint) -> SimplexPoint {
    let c = s.coords();
    let mut out = [0.0; N];
    for (k, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for i in 0..N {
            for j in 0..N {
                acc += t.entries[i][j][k] * c[i] * c[j];
            }
        }
        *o = acc;
    }
    SimplexPoint::from_raw(out)
}

/// A failed QSO axiom. Indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum AxiomViolation {
    Negative { i: usize, j: usize, k: usize, value: f64 },
    AboveOne { i: usize, j: usize, k: usize, value: f64 },
    Asymmetric { i: usize, j: usize, k: usize, difference: f64 },
    RowSum { i: usize, j: usize, sum: f64 },
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AxiomViolation::Negative { i, j, k, value } => {
                write!(f, "P_{{{i}{j},{k}}} = {value} < 0")
            }
            AxiomViolation::AboveOne { i, j, k, value } => {
                write!(f, "P_{{{i}{j},{k}}} = {value} > 1")
            }
            AxiomViolation::Asymmetric { i, j, k, difference } => {
                write!(f, "P_{{{i}{j},{k}}} - P_{{{j}{i},{k}}} = {difference}")
            }
            AxiomViolation::RowSum { i, j, sum } => {
                write!(f, "sum_k P_{{{i}{j},k}} = {sum} != 1")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("all axioms hold");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

pub fn check_axioms(t: &QsoTensor) -> AxiomReport {
    let mut violations = Vec::new();
    for i in 0..N {
        for j in 0..N {
            for k in 0..N {
                let value = t.entries[i][j][k];
                let (i1, j1, k1) = (i + 1, j + 1, k + 1);
                if value < -ALGEBRAIC_TOL || value.is_nan() {
                    violations.push(AxiomViolation::Negative { i: i1, j: j1, k: k1, value });
                } else if value > 1.0 + ALGEBRAIC_TOL {
                    violations.push(AxiomViolation::AboveOne { i: i1, j: j1, k: k1, value });
                }
                // report each unordered pair once
                if i < j {
                    let difference = value - t.entries[j][i][k];
                    if difference.abs() > ALGEBRAIC_TOL {
                        violations.push(AxiomViolation::Asymmetric {
                            i: i1,
                            j: j1,
                            k: k1,
                            difference,
                        });
                    }
                }
            }
            let sum = t.row_sum(i, j);
            if (sum - 1.0).abs() > ALGEBRAIC_TOL {
                violations.push(AxiomViolation::RowSum { i: i + 1, j: j + 1, sum });
            }
        }
    }
    AxiomReport { violations }
}
