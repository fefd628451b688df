use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::regime::Slot;
use super::{detect_limit_against, sample_point, LimitOptions, LimitReport, Regime};
use crate::error::{Error, Result};
use crate::model::{ModelParams, SimplexPoint};

/// Draw attempts allowed per trial before a regime is declared unsatisfiable.
const MAX_DRAWS: usize = 100_000;

/// Ranges for positive parameter draws. Draws closer than `margin` to a
/// threshold (`beta1 k1 = b`, `beta1 k1 = b + alpha`,
/// `b (b + alpha) = alpha beta2 k2`) are rejected so that every trial
/// converges geometrically within the iteration budget.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleBox {
    pub b: (f64, f64),
    pub alpha: (f64, f64),
    pub beta: (f64, f64),
    pub k: (f64, f64),
    pub margin: f64,
}

impl Default for SampleBox {
    fn default() -> Self {
        Self {
            b: (0.02, 0.5),
            alpha: (0.02, 0.5),
            beta: (0.1, 1.0),
            k: (0.1, 1.5),
            margin: 0.02,
        }
    }
}

impl SampleBox {
    fn draw_params<R: Rng>(&self, rng: &mut R, pattern: [Slot; 6]) -> ModelParams {
        let ranges = [self.b, self.alpha, self.beta, self.beta, self.k, self.k];
        let mut v = [0.0; 6];
        for i in 0..6 {
            let positive = match pattern[i] {
                Slot::Zero => false,
                Slot::Positive => true,
                Slot::Free => rng.gen_bool(0.5),
            };
            if positive {
                v[i] = rng.gen_range(ranges[i].0..ranges[i].1);
            }
        }
        ModelParams::new(v[0], v[1], v[2], v[3], v[4], v[5])
    }

    fn clear_of_thresholds(&self, p: &ModelParams) -> bool {
        let s = p.beta1_k1();
        if s > 0.0 && ((s - p.b).abs() < self.margin || (s - p.b - p.alpha).abs() < self.margin) {
            return false;
        }
        let reinf = p.alpha * p.beta2 * p.k2;
        !(p.b > 0.0 && reinf > 0.0 && (p.b * (p.b + p.alpha) - reinf).abs() < self.margin / 4.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub params: ModelParams,
    pub report: LimitReport,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub regime: Regime,
    pub seed: u64,
    pub trials: usize,
    pub passed: usize,
    /// Total parameter/initial-point draws, including rejected ones.
    pub draws: usize,
    /// Largest pinned-coordinate deviation over the converged trials.
    pub worst_deviation: f64,
    pub records: Vec<TrialRecord>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.trials
    }

    pub fn failures(&self) -> impl Iterator<Item = &TrialRecord> {
        self.records.iter().filter(|r| !r.passed)
    }
}

/// Runs `trials` random admissible instances of `regime` and compares each
/// detected limit with the regime's stated limit at tolerance `1e-6`.
pub fn verify_proposition(
    regime: Regime,
    trials: usize,
    seed: u64,
    opts: &LimitOptions,
) -> Result<SuiteReport> {
    verify_proposition_in(regime, trials, seed, opts, &SampleBox::default())
}

pub fn verify_proposition_in(
    regime: Regime,
    trials: usize,
    seed: u64,
    opts: &LimitOptions,
    bounds: &SampleBox,
) -> Result<SuiteReport> {
    if regime == Regime::InitialFixed {
        return Err(Error::RegimeUnsatisfiable(
            "the fixed-start case has no parameter regime to sample".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let faces = regime.initial_faces();
    let mut draws = 0;
    let mut instances: Vec<(ModelParams, SimplexPoint)> = Vec::with_capacity(trials);
    for _ in 0..trials {
        let mut found = None;
        for _ in 0..MAX_DRAWS {
            draws += 1;
            let p = bounds.draw_params(&mut rng, regime.pattern());
            let face = faces[rng.gen_range(0..faces.len())];
            let s0 = sample_point(&mut rng, face);
            if p.is_admissible() && bounds.clear_of_thresholds(&p) && regime.applies(&p, &s0) {
                found = Some((p, s0));
                break;
            }
        }
        match found {
            Some(inst) => instances.push(inst),
            None => {
                return Err(Error::RegimeUnsatisfiable(format!(
                    "no admissible draw for {regime} in {MAX_DRAWS} attempts"
                )))
            }
        }
    }

    let records = instances
        .into_par_iter()
        .enumerate()
        .map(|(trial, (p, s0))| {
            let predicted = regime.predict(&p, &s0)?;
            let report = detect_limit_against(s0, &p, opts, Some(predicted))?;
            let passed = report.converged && report.matched() == Some(true);
            Ok(TrialRecord {
                trial,
                params: p,
                report,
                passed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let passed = records.iter().filter(|r| r.passed).count();
    let worst_deviation = records
        .iter()
        .filter_map(|r| r.report.comparison.as_ref().map(|c| c.deviation))
        .fold(0.0, f64::max);
    Ok(SuiteReport {
        regime,
        seed,
        trials,
        passed,
        draws,
        worst_deviation,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_report() {
        let opts = LimitOptions::default();
        let a = verify_proposition(Regime::NoInfectionWithBirth, 5, 11, &opts).unwrap();
        let b = verify_proposition(Regime::NoInfectionWithBirth, 5, 11, &opts).unwrap();
        assert_eq!(a, b);
        assert!(a.all_passed());
    }

    #[test]
    fn drawn_instances_satisfy_the_regime() {
        let opts = LimitOptions::default();
        let r = verify_proposition(Regime::SingleStrainEndemic, 10, 3, &opts).unwrap();
        for rec in &r.records {
            assert!(rec.params.is_admissible());
            assert!(Regime::SingleStrainEndemic.applies(&rec.params, &rec.report.initial));
        }
    }

    #[test]
    fn impossible_box_is_unsatisfiable() {
        let bounds = SampleBox {
            beta: (5.0, 6.0),
            k: (5.0, 6.0),
            ..SampleBox::default()
        };
        let err = verify_proposition_in(
            Regime::FullModelEndemic,
            1,
            0,
            &LimitOptions::default(),
            &bounds,
        )
        .unwrap_err();
        assert!(matches!(err, Error::RegimeUnsatisfiable(_)));
    }
}
