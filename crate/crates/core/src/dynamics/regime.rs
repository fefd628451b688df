use serde::{Deserialize, Serialize};

use super::Comparison;
use crate::error::{Error, Result};
use crate::fixpoints::{lambda10_coords, lambda11, lambda9_coords, FixedLabel};
use crate::model::{validate_params, EvolutionOperator, ModelParams, SimplexPoint};
use crate::stability::PARAM_EQ_TOL;

/// A starting point counts as already fixed below this residual.
const INITIAL_FIXED_TOL: f64 = 1e-14;

/// Parameter regimes with a stated limit for every non-fixed initial point.
///
/// Variants are listed in dispatch order: [`predicted_limit`] picks the
/// first regime whose conditions hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// The initial point is itself fixed.
    InitialFixed,
    /// `beta1 = beta2 = 0`, `b = alpha = 0`: nothing moves.
    NoInfectionStatic,
    /// `beta1 = beta2 = 0`, `b = 0`, `alpha > 0`.
    NoInfectionRecovery,
    /// `beta1 = beta2 = 0`, `b > 0`.
    NoInfectionWithBirth,
    /// `beta1 = 0`, `beta2 > 0`, `b = alpha = 0`, `A0 > 0`.
    ReinfectionOnlyClosed,
    /// `beta1 = 0`, `beta2 > 0`, `b > 0`, `alpha = 0`.
    ReinfectionOnlyBirth,
    /// `beta1 = 0`, `beta2 > 0`, `b = 0`, `alpha > 0`, `k2 = 0`.
    ReinfectionOnlyRecoveryK2Zero,
    /// `beta1 = 0`, `beta2 > 0`, `b = 0`, `alpha > 0`, `k2 > 0`, `A0 > 0`.
    ReinfectionOnlyRecovery,
    /// `beta1 = 0`, `beta2 > 0`, `b > 0`, `alpha > 0`.
    ReinfectionOnlyBirthRecovery,
    /// `b = alpha = 0`, `k1 = k2 = 0`: every point is fixed.
    ClosedNoInfectivity,
    /// `b = alpha = 0`, `beta1 = 0`, `beta2 > 0`, `A0 > 0`.
    ClosedReinfectionOnly,
    /// `b = alpha = 0`, `beta1 > 0`, `beta2 = 0`, `A0 > 0`.
    ClosedFirstInfectionOnly,
    /// `b = alpha = 0`, `beta1, beta2 > 0`, `k1 k2 > 0`, `A0 > 0`.
    ClosedBothInfections,
    /// `alpha = k2 = 0`, `b > 0`, and `beta1 k1 <= b` or `u0 = 0`.
    SingleStrainExtinction,
    /// `alpha = k2 = 0`, `b > 0`, `beta1 k1 > b`, `u0 > 0`.
    SingleStrainEndemic,
    /// `beta2 = 0`, `beta1 > 0`, `b = 0`, `alpha > 0`, `A0 = 0`.
    NoReinfectionRecoveryNoForce,
    /// `beta2 = 0`, `beta1 > 0`, `b = 0`, `alpha > 0`, `k2 v0 > 0`.
    NoReinfectionRecoveryCarriers,
    /// `beta2 = 0`, `beta1 > 0`, `b = 0`, `alpha > 0`, `k2 v0 = 0`, `k1 u0 > 0`.
    NoReinfectionRecoveryFirstInfectives,
    /// `beta2 = 0`, `beta1 > 0`, `b alpha > 0`, `A0 = 0`.
    NoReinfectionBirthNoForce,
    /// `beta2 = 0`, `beta1 > 0`, `b alpha > 0`, `k2 v0 = 0`, `beta1 k1 <= b + alpha`.
    NoReinfectionBirthSubthreshold,
    /// Conjectured: `beta2 = 0`, `b alpha > 0`, `k2 v0 > 0`, `beta1 k1 <= b + alpha`.
    NoReinfectionExtinction,
    /// Conjectured: `beta2 = 0`, `b alpha > 0`, `u0 + v0 > 0`, `beta1 k1 > b + alpha`.
    NoReinfectionEndemic,
    /// All rates positive, `u0 = v0 = 0`.
    FullModelUninfected,
    /// Conjectured: all rates positive, `beta1 k1 <= b + alpha`,
    /// `b (b + alpha) >= alpha beta2 k2`.
    FullModelExtinction,
    /// Conjectured: all rates positive, `u0 + v0 > 0`, `beta1 k1 > b + alpha`.
    FullModelEndemic,
}

/// Whether a parameter is forced to zero, forced positive, or left free.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Slot {
    Zero,
    Positive,
    Free,
}

use Slot::{Free as F, Positive as P, Zero as Z};

const INTERIOR: [bool; 4] = [false; 4];
const NO_U: [bool; 4] = [false, true, false, false];
const NO_V: [bool; 4] = [false, false, false, true];
const NO_UV: [bool; 4] = [false, true, false, true];

impl Regime {
    pub const ALL: [Regime; 25] = [
        Regime::InitialFixed,
        Regime::NoInfectionStatic,
        Regime::NoInfectionRecovery,
        Regime::NoInfectionWithBirth,
        Regime::ReinfectionOnlyClosed,
        Regime::ReinfectionOnlyBirth,
        Regime::ReinfectionOnlyRecoveryK2Zero,
        Regime::ReinfectionOnlyRecovery,
        Regime::ReinfectionOnlyBirthRecovery,
        Regime::ClosedNoInfectivity,
        Regime::ClosedReinfectionOnly,
        Regime::ClosedFirstInfectionOnly,
        Regime::ClosedBothInfections,
        Regime::SingleStrainExtinction,
        Regime::SingleStrainEndemic,
        Regime::NoReinfectionRecoveryNoForce,
        Regime::NoReinfectionRecoveryCarriers,
        Regime::NoReinfectionRecoveryFirstInfectives,
        Regime::NoReinfectionBirthNoForce,
        Regime::NoReinfectionBirthSubthreshold,
        Regime::NoReinfectionExtinction,
        Regime::NoReinfectionEndemic,
        Regime::FullModelUninfected,
        Regime::FullModelExtinction,
        Regime::FullModelEndemic,
    ];

    /// Regimes whose limit is established rather than conjectured, excluding
    /// the trivial fixed-start case.
    pub fn proven() -> impl Iterator<Item = Regime> {
        Self::ALL[1..20].iter().copied()
    }

    pub fn id(self) -> &'static str {
        match self {
            Regime::InitialFixed => "initial-fixed",
            Regime::NoInfectionStatic => "beta1=beta2=0;b=alpha=0",
            Regime::NoInfectionRecovery => "beta1=beta2=0;b=0,alpha>0",
            Regime::NoInfectionWithBirth => "beta1=beta2=0;b>0",
            Regime::ReinfectionOnlyClosed => "beta1=0,beta2>0;b=alpha=0",
            Regime::ReinfectionOnlyBirth => "beta1=0,beta2>0;b>0,alpha=0",
            Regime::ReinfectionOnlyRecoveryK2Zero => "beta1=0,beta2>0;b=0,alpha>0,k2=0",
            Regime::ReinfectionOnlyRecovery => "beta1=0,beta2>0;b=0,alpha>0,k2>0",
            Regime::ReinfectionOnlyBirthRecovery => "beta1=0,beta2>0;b>0,alpha>0",
            Regime::ClosedNoInfectivity => "b=alpha=0;k1=k2=0",
            Regime::ClosedReinfectionOnly => "b=alpha=0;beta1=0,beta2>0",
            Regime::ClosedFirstInfectionOnly => "b=alpha=0;beta1>0,beta2=0",
            Regime::ClosedBothInfections => "b=alpha=0;beta1>0,beta2>0",
            Regime::SingleStrainExtinction => "alpha=k2=0,b>0;beta1*k1<=b|u0=0",
            Regime::SingleStrainEndemic => "alpha=k2=0,b>0;beta1*k1>b",
            Regime::NoReinfectionRecoveryNoForce => "beta2=0,beta1>0;b=0,alpha>0,A0=0",
            Regime::NoReinfectionRecoveryCarriers => "beta2=0,beta1>0;b=0,alpha>0,k2*v0>0",
            Regime::NoReinfectionRecoveryFirstInfectives => {
                "beta2=0,beta1>0;b=0,alpha>0,k2*v0=0,k1*u0>0"
            }
            Regime::NoReinfectionBirthNoForce => "beta2=0,beta1>0;b*alpha>0,A0=0",
            Regime::NoReinfectionBirthSubthreshold => {
                "beta2=0,beta1>0;b*alpha>0,k2*v0=0,beta1*k1<=b+alpha"
            }
            Regime::NoReinfectionExtinction => "beta2=0;b*alpha>0,k2*v0>0,beta1*k1<=b+alpha",
            Regime::NoReinfectionEndemic => "beta2=0;b*alpha>0,beta1*k1>b+alpha",
            Regime::FullModelUninfected => "all>0;u0=v0=0",
            Regime::FullModelExtinction => "all>0;beta1*k1<=b+alpha,b(b+alpha)>=alpha*beta2*k2",
            Regime::FullModelEndemic => "all>0;beta1*k1>b+alpha",
        }
    }

    pub fn from_id(id: &str) -> Option<Regime> {
        Self::ALL.into_iter().find(|r| r.id() == id)
    }

    pub fn conjectural(self) -> bool {
        matches!(
            self,
            Regime::NoReinfectionExtinction
                | Regime::NoReinfectionEndemic
                | Regime::FullModelExtinction
                | Regime::FullModelEndemic
        )
    }

    /// Zero/positive/free pattern for `(b, alpha, beta1, beta2, k1, k2)`.
    pub(crate) fn pattern(self) -> [Slot; 6] {
        match self {
            Regime::InitialFixed => [F, F, F, F, F, F],
            Regime::NoInfectionStatic => [Z, Z, Z, Z, F, F],
            Regime::NoInfectionRecovery => [Z, P, Z, Z, F, F],
            Regime::NoInfectionWithBirth => [P, F, Z, Z, F, F],
            Regime::ReinfectionOnlyClosed => [Z, Z, Z, P, F, F],
            Regime::ReinfectionOnlyBirth => [P, Z, Z, P, F, F],
            Regime::ReinfectionOnlyRecoveryK2Zero => [Z, P, Z, P, F, Z],
            Regime::ReinfectionOnlyRecovery => [Z, P, Z, P, F, P],
            Regime::ReinfectionOnlyBirthRecovery => [P, P, Z, P, F, F],
            Regime::ClosedNoInfectivity => [Z, Z, P, F, Z, Z],
            Regime::ClosedReinfectionOnly => [Z, Z, Z, P, F, F],
            Regime::ClosedFirstInfectionOnly => [Z, Z, P, Z, F, F],
            Regime::ClosedBothInfections => [Z, Z, P, P, P, P],
            Regime::SingleStrainExtinction => [P, Z, F, F, F, Z],
            Regime::SingleStrainEndemic => [P, Z, P, F, P, Z],
            Regime::NoReinfectionRecoveryNoForce => [Z, P, P, Z, F, F],
            Regime::NoReinfectionRecoveryCarriers => [Z, P, P, Z, F, P],
            Regime::NoReinfectionRecoveryFirstInfectives => [Z, P, P, Z, P, F],
            Regime::NoReinfectionBirthNoForce => [P, P, P, Z, F, F],
            Regime::NoReinfectionBirthSubthreshold => [P, P, P, Z, F, F],
            Regime::NoReinfectionExtinction => [P, P, P, Z, F, P],
            Regime::NoReinfectionEndemic => [P, P, P, Z, P, F],
            Regime::FullModelUninfected
            | Regime::FullModelExtinction
            | Regime::FullModelEndemic => [P; 6],
        }
    }

    /// Faces the initial point may be drawn from.
    pub(crate) fn initial_faces(self) -> &'static [[bool; 4]] {
        match self {
            Regime::SingleStrainExtinction => &[INTERIOR, NO_U],
            Regime::NoReinfectionRecoveryFirstInfectives | Regime::NoReinfectionBirthSubthreshold => {
                &[INTERIOR, NO_V]
            }
            Regime::NoReinfectionRecoveryNoForce | Regime::NoReinfectionBirthNoForce => {
                &[INTERIOR, NO_U, NO_V, NO_UV]
            }
            Regime::FullModelUninfected => &[NO_UV],
            _ => &[INTERIOR],
        }
    }

    /// Conditions on parameters and initial point, beyond the sign pattern.
    pub fn applies(self, p: &ModelParams, s0: &SimplexPoint) -> bool {
        let pattern_ok = self.pattern().iter().zip(p.values()).all(|(slot, v)| match slot {
            Slot::Zero => v == 0.0,
            Slot::Positive => v > 0.0,
            Slot::Free => true,
        });
        if !pattern_ok {
            return false;
        }
        let [_, u0, _, v0] = s0.coords();
        let a0 = p.k1 * u0 + p.k2 * v0;
        let s = p.beta1_k1();
        let ba = p.b + p.alpha;
        let sub = s <= ba + PARAM_EQ_TOL;
        match self {
            Regime::InitialFixed => is_fixed(p, s0),
            Regime::ReinfectionOnlyClosed
            | Regime::ReinfectionOnlyRecovery
            | Regime::ClosedReinfectionOnly
            | Regime::ClosedFirstInfectionOnly
            | Regime::ClosedBothInfections => a0 > 0.0,
            Regime::SingleStrainExtinction => s <= p.b + PARAM_EQ_TOL || u0 == 0.0,
            Regime::SingleStrainEndemic => s > p.b + PARAM_EQ_TOL && u0 > 0.0,
            Regime::NoReinfectionRecoveryNoForce | Regime::NoReinfectionBirthNoForce => a0 == 0.0,
            Regime::NoReinfectionRecoveryCarriers => p.k2 * v0 > 0.0,
            Regime::NoReinfectionRecoveryFirstInfectives => p.k2 * v0 == 0.0 && p.k1 * u0 > 0.0,
            Regime::NoReinfectionBirthSubthreshold => p.k2 * v0 == 0.0 && sub,
            Regime::NoReinfectionExtinction => p.k2 * v0 > 0.0 && sub,
            Regime::NoReinfectionEndemic => u0 + v0 > 0.0 && !sub,
            Regime::FullModelUninfected => u0 == 0.0 && v0 == 0.0,
            Regime::FullModelExtinction => {
                sub && p.b * ba + PARAM_EQ_TOL >= p.alpha * p.beta2 * p.k2
            }
            Regime::FullModelEndemic => u0 + v0 > 0.0 && !sub,
            _ => true,
        }
    }

    /// The stated limit for a start `s0` in this regime.
    pub fn target(self, p: &ModelParams, s0: &SimplexPoint) -> Result<Target> {
        let [x0, u0, y0, v0] = s0.coords();
        let lambda1 = Target::labelled(FixedLabel::Lambda1, SimplexPoint::vertex(0));
        let exact = |c: [f64; 4]| Target::Pinned(c.map(Some));
        Ok(match self {
            Regime::InitialFixed | Regime::NoInfectionStatic | Regime::ClosedNoInfectivity => {
                exact(s0.coords())
            }
            Regime::NoInfectionRecovery | Regime::NoReinfectionRecoveryNoForce => {
                exact([x0, 0.0, 1.0 - x0 - v0, v0])
            }
            Regime::ReinfectionOnlyClosed | Regime::ClosedReinfectionOnly => {
                exact([x0, u0, 0.0, 1.0 - x0 - u0])
            }
            Regime::ReinfectionOnlyRecoveryK2Zero => Target::Pinned([Some(x0), Some(0.0), None, None]),
            Regime::ReinfectionOnlyRecovery => exact([x0, 0.0, 0.0, 1.0 - x0]),
            Regime::ClosedFirstInfectionOnly => exact([0.0, 1.0 - y0 - v0, y0, v0]),
            Regime::ClosedBothInfections => Target::Pinned([Some(0.0), None, Some(0.0), None]),
            Regime::SingleStrainEndemic => Target::labelled(
                FixedLabel::Lambda9,
                SimplexPoint::from_array(lambda9_coords(p))?,
            ),
            Regime::NoReinfectionRecoveryCarriers => exact([0.0, 0.0, 1.0 - v0, v0]),
            Regime::NoReinfectionRecoveryFirstInfectives => {
                Target::Pinned([None, Some(0.0), None, Some(v0)])
            }
            Regime::NoReinfectionEndemic => Target::labelled(
                FixedLabel::Lambda10,
                SimplexPoint::from_array(lambda10_coords(p))?,
            ),
            Regime::FullModelEndemic => {
                let fp = lambda11(p)?;
                let pt = fp.point().ok_or_else(|| Error::NoInteriorPoint("no point".into()))?;
                Target::labelled(FixedLabel::Lambda11, pt)
            }
            Regime::NoInfectionWithBirth
            | Regime::ReinfectionOnlyBirth
            | Regime::ReinfectionOnlyBirthRecovery
            | Regime::SingleStrainExtinction
            | Regime::NoReinfectionBirthNoForce
            | Regime::NoReinfectionBirthSubthreshold
            | Regime::NoReinfectionExtinction
            | Regime::FullModelUninfected
            | Regime::FullModelExtinction => lambda1,
        })
    }

    /// Competing readings of an ambiguous statement, checked alongside the
    /// target but not part of the match verdict.
    pub fn readings(self, s0: &SimplexPoint) -> Vec<Reading> {
        match self {
            Regime::ClosedBothInfections => vec![
                Reading {
                    name: "u = u0".into(),
                    coord: 1,
                    relation: Relation::Equal,
                    value: s0.u(),
                },
                Reading {
                    name: "u >= u0".into(),
                    coord: 1,
                    relation: Relation::AtLeast,
                    value: s0.u(),
                },
            ],
            _ => Vec::new(),
        }
    }

    pub fn predict(self, p: &ModelParams, s0: &SimplexPoint) -> Result<PredictedLimit> {
        Ok(PredictedLimit {
            regime: self,
            target: self.target(p, s0)?,
            conjectural: self.conjectural(),
            readings: self.readings(s0),
        })
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

fn is_fixed(p: &ModelParams, s0: &SimplexPoint) -> bool {
    let next = crate::model::evolve(p, s0.coords());
    SimplexPoint::from_raw(next).dist_inf(s0) <= INITIAL_FIXED_TOL
}

/// Where a trajectory is expected to end up.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    /// A named fixed point.
    Labelled { label: FixedLabel, point: SimplexPoint },
    /// Some coordinates of the limit; `None` entries are unconstrained.
    Pinned([Option<f64>; 4]),
}

impl Target {
    fn labelled(label: FixedLabel, point: SimplexPoint) -> Self {
        Target::Labelled { label, point }
    }

    pub fn pinned(&self) -> [Option<f64>; 4] {
        match self {
            Target::Labelled { point, .. } => point.coords().map(Some),
            Target::Pinned(c) => *c,
        }
    }

    pub fn label(&self) -> Option<FixedLabel> {
        match self {
            Target::Labelled { label, .. } => Some(*label),
            Target::Pinned(_) => None,
        }
    }

    /// Largest deviation of `s` over the pinned coordinates.
    pub fn deviation(&self, s: &SimplexPoint) -> f64 {
        self.pinned()
            .iter()
            .zip(s.coords())
            .filter_map(|(t, c)| t.map(|t| (t - c).abs()))
            .fold(0.0, f64::max)
    }
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if let Target::Labelled { label, .. } = self {
            write!(f, "{} ", label.ascii())?;
        }
        let parts: Vec<String> = self
            .pinned()
            .iter()
            .zip(SimplexPoint::LABELS)
            .map(|(c, name)| match c {
                Some(v) => format!("{name}={v:.6}"),
                None => format!("{name}=*"),
            })
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Equal,
    AtLeast,
}

/// A single-coordinate claim about the limit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reading {
    pub name: String,
    pub coord: usize,
    pub relation: Relation,
    pub value: f64,
}

impl Reading {
    pub fn check(&self, limit: &SimplexPoint, tol: f64) -> ReadingCheck {
        let observed = limit.coords()[self.coord];
        let holds = match self.relation {
            Relation::Equal => (observed - self.value).abs() <= tol,
            Relation::AtLeast => observed >= self.value - tol,
        };
        ReadingCheck {
            name: self.name.clone(),
            observed,
            holds,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReadingCheck {
    pub name: String,
    pub observed: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictedLimit {
    pub regime: Regime,
    pub target: Target,
    pub conjectural: bool,
    pub readings: Vec<Reading>,
}

impl PredictedLimit {
    pub fn compare(&self, limit: &SimplexPoint, tol: f64) -> Comparison {
        let deviation = self.target.deviation(limit);
        Comparison {
            deviation,
            matched: deviation <= tol,
            readings: self.readings.iter().map(|r| r.check(limit, tol)).collect(),
        }
    }
}

/// The stated limit for `s0`, or `None` when no regime covers it.
pub fn predicted_limit(s0: &SimplexPoint, p: &ModelParams) -> Result<Option<PredictedLimit>> {
    let report = validate_params(p)?;
    if !report.is_admissible() {
        return Err(Error::InadmissibleParams(report));
    }
    // validates that the operator can be built; the dispatch itself is pure
    EvolutionOperator::new(*p)?;
    match dispatch(p, s0) {
        Some(r) => r.predict(p, s0).map(Some),
        None => Ok(None),
    }
}

fn dispatch(p: &ModelParams, s0: &SimplexPoint) -> Option<Regime> {
    use Regime::*;
    if InitialFixed.applies(p, s0) {
        return Some(InitialFixed);
    }
    let ModelParams {
        b,
        alpha,
        beta1,
        beta2,
        k1,
        k2,
    } = *p;
    let candidates: &[Regime] = if beta1 == 0.0 && beta2 == 0.0 {
        &[NoInfectionStatic, NoInfectionRecovery, NoInfectionWithBirth]
    } else if beta1 == 0.0 {
        &[
            ReinfectionOnlyClosed,
            ReinfectionOnlyBirth,
            ReinfectionOnlyRecoveryK2Zero,
            ReinfectionOnlyRecovery,
            ReinfectionOnlyBirthRecovery,
        ]
    } else if b == 0.0 && alpha == 0.0 {
        if k1 == 0.0 && k2 == 0.0 {
            &[ClosedNoInfectivity]
        } else {
            &[ClosedFirstInfectionOnly, ClosedBothInfections]
        }
    } else if alpha == 0.0 && k2 == 0.0 && b > 0.0 {
        &[SingleStrainExtinction, SingleStrainEndemic]
    } else if beta2 == 0.0 {
        &[
            NoReinfectionRecoveryNoForce,
            NoReinfectionRecoveryCarriers,
            NoReinfectionRecoveryFirstInfectives,
            NoReinfectionBirthNoForce,
            NoReinfectionBirthSubthreshold,
            NoReinfectionExtinction,
            NoReinfectionEndemic,
        ]
    } else {
        &[FullModelUninfected, FullModelEndemic, FullModelExtinction]
    };
    candidates.iter().copied().find(|r| r.applies(p, s0))
}
