//! Domain types and the evolution operator of the discrete-time SISI model.
//!
//! The state `(x, u, y, v)` holds the population fractions of susceptibles,
//! first-time infected, recovered and second-time infected individuals. The
//! operator advances one time step:
//!
//! ```text
//! x' = x + b - b x - beta1 A x
//! u' = u - b u + beta1 A x - alpha u
//! y' = y - b y + alpha u - beta2 A y
//! v' = v - b v + beta2 A y
//! ```
//!
//! with force of infection `A = k1 u + k2 v`. Birth and death rates are equal,
//! so the coordinate sum is conserved.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed on each admissibility inequality and on simplex membership.
pub const ALGEBRAIC_TOL: f64 = 1e-12;

/// The six non-negative rates of the model.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Birth rate, equal to the death rate.
    pub b: f64,
    /// Recovery rate.
    pub alpha: f64,
    /// Susceptibility of never-infected individuals.
    pub beta1: f64,
    /// Susceptibility of recovered individuals.
    pub beta2: f64,
    /// Infectivity of first-time infected individuals.
    pub k1: f64,
    /// Infectivity of second-time infected individuals.
    pub k2: f64,
}

impl ModelParams {
    pub const NAMES: [&'static str; 6] = ["b", "alpha", "beta1", "beta2", "k1", "k2"];

    pub fn new(b: f64, alpha: f64, beta1: f64, beta2: f64, k1: f64, k2: f64) -> Self {
        Self {
            b,
            alpha,
            beta1,
            beta2,
            k1,
            k2,
        }
    }

    pub fn values(&self) -> [f64; 6] {
        [self.b, self.alpha, self.beta1, self.beta2, self.k1, self.k2]
    }

    pub fn named_values(&self) -> [(&'static str, f64); 6] {
        let v = self.values();
        std::array::from_fn(|i| (Self::NAMES[i], v[i]))
    }

    /// Sets a rate by name. Returns `false` for an unknown name.
    pub fn set(&mut self, name: &str, value: f64) -> bool {
        let slot = match name {
            "b" => &mut self.b,
            "alpha" => &mut self.alpha,
            "beta1" => &mut self.beta1,
            "beta2" => &mut self.beta2,
            "k1" => &mut self.k1,
            "k2" => &mut self.k2,
            _ => return false,
        };
        *slot = value;
        true
    }

    pub fn beta1_k1(&self) -> f64 {
        self.beta1 * self.k1
    }

    /// Rejects negative or non-finite rates.
    pub fn check_signs(&self) -> Result<()> {
        for (name, value) in self.named_values() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::NegativeParameter { name, value });
            }
        }
        Ok(())
    }

    pub fn is_admissible(&self) -> bool {
        validate_params(self).map(|r| r.is_admissible()).unwrap_or(false)
    }
}

impl fmt::Display for ModelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .named_values()
            .iter()
            .map(|(n, v)| format!("{n}={v}"))
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// The nine inequalities that make the operator map the simplex into itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    AlphaPlusB,
    Beta1K2,
    Beta2K1,
    BPlusBeta2K2,
    BMinusBeta1K1,
    BMinusBeta2K2,
    BMinusBeta1K2,
    AlphaPlusBMinusBeta1K1,
    AlphaMinusBMinusBeta2K1,
}

impl Condition {
    pub const ALL: [Condition; 9] = [
        Condition::AlphaPlusB,
        Condition::Beta1K2,
        Condition::Beta2K1,
        Condition::BPlusBeta2K2,
        Condition::BMinusBeta1K1,
        Condition::BMinusBeta2K2,
        Condition::BMinusBeta1K2,
        Condition::AlphaPlusBMinusBeta1K1,
        Condition::AlphaMinusBMinusBeta2K1,
    ];

    /// Left-hand side of the inequality `lhs <= bound`.
    pub fn lhs(self, p: &ModelParams) -> f64 {
        match self {
            Condition::AlphaPlusB => p.alpha + p.b,
            Condition::Beta1K2 => p.beta1 * p.k2,
            Condition::Beta2K1 => p.beta2 * p.k1,
            Condition::BPlusBeta2K2 => p.b + p.beta2 * p.k2,
            Condition::BMinusBeta1K1 => (p.b - p.beta1 * p.k1).abs(),
            Condition::BMinusBeta2K2 => (p.b - p.beta2 * p.k2).abs(),
            Condition::BMinusBeta1K2 => (p.b - p.beta1 * p.k2).abs(),
            Condition::AlphaPlusBMinusBeta1K1 => (p.alpha + p.b - p.beta1 * p.k1).abs(),
            Condition::AlphaMinusBMinusBeta2K1 => (p.alpha - p.b - p.beta2 * p.k1).abs(),
        }
    }

    pub fn bound(self) -> f64 {
        match self {
            Condition::Beta1K2 | Condition::Beta2K1 => 2.0,
            _ => 1.0,
        }
    }

    pub fn holds(self, p: &ModelParams) -> bool {
        self.lhs(p) <= self.bound() + ALGEBRAIC_TOL
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::AlphaPlusB => "alpha+b <= 1",
            Condition::Beta1K2 => "beta1*k2 <= 2",
            Condition::Beta2K1 => "beta2*k1 <= 2",
            Condition::BPlusBeta2K2 => "b+beta2*k2 <= 1",
            Condition::BMinusBeta1K1 => "|b-beta1*k1| <= 1",
            Condition::BMinusBeta2K2 => "|b-beta2*k2| <= 1",
            Condition::BMinusBeta1K2 => "|b-beta1*k2| <= 1",
            Condition::AlphaPlusBMinusBeta1K1 => "|alpha+b-beta1*k1| <= 1",
            Condition::AlphaMinusBMinusBeta2K1 => "|alpha-b-beta2*k1| <= 1",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: Condition,
    pub lhs: f64,
    pub bound: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated (lhs = {})", self.condition, self.lhs)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub violations: Vec<Violation>,
}

impl AdmissibilityReport {
    pub fn is_admissible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violates(&self, condition: Condition) -> bool {
        self.violations.iter().any(|v| v.condition == condition)
    }
}

impl fmt::Display for AdmissibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("admissible");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

/// Checks the nine admissibility inequalities.
///
/// Negative rates are rejected outright rather than reported as violations.
pub fn validate_params(p: &ModelParams) -> Result<AdmissibilityReport> {
    p.check_signs()?;
    let violations = Condition::ALL
        .iter()
        .filter(|c| !c.holds(p))
        .map(|&condition| Violation {
            condition,
            lhs: condition.lhs(p),
            bound: condition.bound(),
        })
        .collect();
    Ok(AdmissibilityReport { violations })
}

/// A state on the standard 3-simplex, stored as `[x, u, y, v]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct SimplexPoint([f64; 4]);

impl SimplexPoint {
    pub const LABELS: [&'static str; 4] = ["x", "u", "y", "v"];

    pub fn new(x: f64, u: f64, y: f64, v: f64) -> Result<Self> {
        Self::from_array([x, u, y, v])
    }

    /// Validates a state. Coordinates in `[-1e-12, 0)` are clamped to zero;
    /// anything more negative, or a sum off by more than `1e-12`, is an error.
    pub fn from_array(mut coords: [f64; 4]) -> Result<Self> {
        for (label, c) in Self::LABELS.iter().zip(coords.iter_mut()) {
            if !c.is_finite() {
                return Err(Error::InvalidPoint(format!("{label} = {c} is not finite")));
            }
            if *c < 0.0 {
                if *c >= -ALGEBRAIC_TOL {
                    *c = 0.0;
                } else {
                    return Err(Error::InvalidPoint(format!("{label} = {c} is negative")));
                }
            }
        }
        let sum: f64 = coords.iter().sum();
        if (sum - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(Error::InvalidPoint(format!(
                "coordinates sum to {sum}, expected 1"
            )));
        }
        Ok(Self(coords))
    }

    /// Wraps operator output without validation so drift stays observable.
    pub(crate) fn from_raw(coords: [f64; 4]) -> Self {
        Self(coords)
    }

    /// Vertex `e_i` of the simplex, 0-based.
    pub fn vertex(i: usize) -> Self {
        let mut c = [0.0; 4];
        c[i] = 1.0;
        Self(c)
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn u(&self) -> f64 {
        self.0[1]
    }

    pub fn y(&self) -> f64 {
        self.0[2]
    }

    pub fn v(&self) -> f64 {
        self.0[3]
    }

    pub fn coords(&self) -> [f64; 4] {
        self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    /// `|x + u + y + v - 1|`.
    pub fn sum_drift(&self) -> f64 {
        (self.sum() - 1.0).abs()
    }

    pub fn min_coord(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn dist_inf(&self, other: &SimplexPoint) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl TryFrom<[f64; 4]> for SimplexPoint {
    type Error = Error;

    fn try_from(coords: [f64; 4]) -> Result<Self> {
        Self::from_array(coords)
    }
}

impl From<SimplexPoint> for [f64; 4] {
    fn from(s: SimplexPoint) -> Self {
        s.0
    }
}

impl fmt::Display for SimplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, u, y, v] = self.0;
        write!(f, "({x}, {u}, {y}, {v})")
    }
}

/// `A = k1 u + k2 v`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct ForceOfInfection(f64);

impl ForceOfInfection {
    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn force_of_infection(s: &SimplexPoint, p: &ModelParams) -> ForceOfInfection {
    ForceOfInfection(p.k1 * s.u() + p.k2 * s.v())
}

/// One step of the operator on raw coordinates. No admissibility or simplex
/// checks; callers outside this crate go through [`EvolutionOperator`].
#[inline]
pub(crate) fn evolve(p: &ModelParams, [x, u, y, v]: [f64; 4]) -> [f64; 4] {
    let a = p.k1 * u + p.k2 * v;
    let infect_s = p.beta1 * a * x;
    let infect_s1 = p.beta2 * a * y;
    [
        x + p.b - p.b * x - infect_s,
        u - p.b * u + infect_s - p.alpha * u,
        y - p.b * y + p.alpha * u - infect_s1,
        v - p.b * v + infect_s1,
    ]
}

/// The evolution operator for a validated parameter set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolutionOperator {
    params: ModelParams,
}

impl EvolutionOperator {
    pub fn new(params: ModelParams) -> Result<Self> {
        let report = validate_params(&params)?;
        if !report.is_admissible() {
            return Err(Error::InadmissibleParams(report));
        }
        Ok(Self { params })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    #[inline]
    pub fn apply(&self, s: &SimplexPoint) -> SimplexPoint {
        SimplexPoint::from_raw(evolve(&self.params, s.0))
    }

    /// `||V(s) - s||_inf`.
    pub fn residual(&self, s: &SimplexPoint) -> f64 {
        self.apply(s).dist_inf(s)
    }

    pub fn iterate(&self, s0: SimplexPoint, steps: usize) -> Trajectory {
        let mut points = Vec::with_capacity(steps + 1);
        points.push(s0);
        let mut cur = s0;
        for _ in 0..steps {
            cur = self.apply(&cur);
            points.push(cur);
        }
        Trajectory { points }
    }
}

pub fn apply_v(s: &SimplexPoint, p: &ModelParams) -> Result<SimplexPoint> {
    Ok(EvolutionOperator::new(*p)?.apply(s))
}

pub fn iterate(s0: SimplexPoint, p: &ModelParams, steps: usize) -> Result<Trajectory> {
    Ok(EvolutionOperator::new(*p)?.iterate(s0, steps))
}

/// Iterates `lambda^(0), V(lambda^(0)), ...`, unnormalized.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    points: Vec<SimplexPoint>,
}

impl Trajectory {
    pub fn points(&self) -> &[SimplexPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> &SimplexPoint {
        self.points.last().expect("trajectory holds at least s0")
    }

    /// Largest `|sum - 1|` along the trajectory.
    pub fn max_sum_drift(&self) -> f64 {
        self.points.iter().map(SimplexPoint::sum_drift).fold(0.0, f64::max)
    }

    pub fn min_coord(&self) -> f64 {
        self.points
            .iter()
            .map(SimplexPoint::min_coord)
            .fold(f64::INFINITY, f64::min)
    }
}
