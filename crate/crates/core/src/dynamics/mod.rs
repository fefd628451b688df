//! Trajectory limits: detection by iteration, the regime table of known
//! limits, randomized regime suites, grid scans of the conjectured regimes,
//! and the `f`/`g` curves whose intersections locate the interior fixed point.

mod curves;
mod regime;
mod scan;
mod suite;

pub use curves::{fg_curves, FgCase, FgCurves};
pub use regime::{predicted_limit, PredictedLimit, Reading, ReadingCheck, Regime, Relation, Target};
pub use scan::{
    cell_initial_points, conjecture_scan, CellRecord, Conjecture, ScanGrid, ScanReport, Threshold,
    Verdict,
};
pub use suite::{verify_proposition, verify_proposition_in, SampleBox, SuiteReport, TrialRecord};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fixpoints::{fixed_point_set, FixedLabel};
use crate::model::{EvolutionOperator, ModelParams, SimplexPoint};

/// Agreement tolerance between an observed limit and a predicted target.
pub const LIMIT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitOptions {
    pub max_iter: u64,
    /// Stop once `||V(s) - s||_inf` falls to this.
    pub tol_step: f64,
    /// Snap to a catalog fixed point once this close to it.
    pub tol_fix: f64,
}

impl Default for LimitOptions {
    fn default() -> Self {
        Self {
            max_iter: 1_000_000,
            tol_step: 1e-12,
            tol_fix: 1e-10,
        }
    }
}

/// How an observed limit compares with a prediction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    /// Largest deviation over the pinned coordinates.
    pub deviation: f64,
    pub matched: bool,
    /// Outcome of each alternative reading attached to the prediction.
    pub readings: Vec<ReadingCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub initial: SimplexPoint,
    pub converged: bool,
    /// The limit: the snapped catalog point, or the first iterate whose
    /// next step is at most `tol_step`.
    pub limit: Option<SimplexPoint>,
    /// Last iterate computed, whether or not the run converged.
    pub final_point: SimplexPoint,
    pub iterations: u64,
    /// `||V(s) - s||_inf` at the final iterate.
    pub step_size: f64,
    pub snapped_to: Option<FixedLabel>,
    /// Largest `|x+u+y+v - 1|` seen along the trajectory.
    pub max_sum_drift: f64,
    pub predicted: Option<PredictedLimit>,
    pub comparison: Option<Comparison>,
}

impl LimitReport {
    pub fn matched(&self) -> Option<bool> {
        self.comparison.as_ref().map(|c| c.matched)
    }
}

/// Iterates from `s0` until the step size drops to `tol_step`, the iterate
/// comes within `tol_fix` of an isolated catalog fixed point, or `max_iter`
/// steps are spent. Non-convergence is reported, not an error.
pub fn detect_limit(s0: SimplexPoint, p: &ModelParams, opts: &LimitOptions) -> Result<LimitReport> {
    let predicted = predicted_limit(&s0, p)?;
    detect_limit_against(s0, p, opts, predicted)
}

pub(crate) fn detect_limit_against(
    s0: SimplexPoint,
    p: &ModelParams,
    opts: &LimitOptions,
    predicted: Option<PredictedLimit>,
) -> Result<LimitReport> {
    let op = EvolutionOperator::new(*p)?;
    let anchors: Vec<(FixedLabel, SimplexPoint)> = fixed_point_set(p)?
        .into_iter()
        .filter_map(|f| f.point().map(|pt| (f.label, pt)))
        .collect();

    let mut cur = s0;
    let mut drift = s0.sum_drift();
    let mut iterations = 0;
    let mut converged = false;
    let mut limit = None;
    let mut snapped_to = None;
    let mut step_size;
    loop {
        if let Some((label, pt)) = anchors.iter().find(|(_, pt)| pt.dist_inf(&cur) <= opts.tol_fix) {
            step_size = op.residual(&cur);
            converged = true;
            limit = Some(*pt);
            snapped_to = Some(*label);
            break;
        }
        let next = op.apply(&cur);
        step_size = next.dist_inf(&cur);
        drift = drift.max(next.sum_drift());
        if step_size <= opts.tol_step {
            // the n-th iterate is the limit once the next step is negligible
            converged = true;
            limit = Some(cur);
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }
        cur = next;
        iterations += 1;
    }

    let comparison = match (&limit, &predicted) {
        (Some(l), Some(pred)) => Some(pred.compare(l, LIMIT_TOL)),
        _ => None,
    };
    Ok(LimitReport {
        initial: s0,
        converged,
        limit,
        final_point: cur,
        iterations,
        step_size,
        snapped_to,
        max_sum_drift: drift,
        predicted,
        comparison,
    })
}

/// Draws a point with the flagged coordinates zero and the others
/// proportional to independent `U(0.05, 1)` weights.
pub(crate) fn sample_point<R: rand::Rng>(rng: &mut R, zero: [bool; 4]) -> SimplexPoint {
    let w: [f64; 4] = std::array::from_fn(|i| {
        if zero[i] {
            0.0
        } else {
            rng.gen_range(0.05..1.0)
        }
    });
    let total: f64 = w.iter().sum();
    let mut c = w.map(|x| x / total);
    // absorb rounding so the sum is as close to 1 as possible
    let last = (0..4).rev().find(|&i| !zero[i]).unwrap_or(3);
    let rest: f64 = (0..4).filter(|&i| i != last).map(|i| c[i]).sum();
    c[last] = 1.0 - rest;
    SimplexPoint::from_raw(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn starting_at_lambda1_converges_immediately() {
        let p = ModelParams::new(0.6, 0.2, 0.5, 0.0, 1.0, 0.3);
        let r = detect_limit(SimplexPoint::vertex(0), &p, &LimitOptions::default()).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 0);
        assert_eq!(r.limit, Some(SimplexPoint::vertex(0)));
        assert_eq!(r.snapped_to, Some(FixedLabel::Lambda1));
    }

    #[test]
    fn no_reinf_extinct_goes_to_lambda1() {
        let p = ModelParams::new(0.6, 0.2, 0.5, 0.0, 1.0, 0.3);
        let s0 = SimplexPoint::new(0.1, 0.01, 0.2, 0.69).unwrap();
        let r = detect_limit(s0, &p, &LimitOptions::default()).unwrap();
        assert!(r.converged);
        assert!(r.limit.unwrap().dist_inf(&SimplexPoint::vertex(0)) <= 1e-10);
        assert_eq!(r.matched(), Some(true));
    }

    #[test]
    fn no_reinf_endemic_goes_to_lambda10() {
        let p = ModelParams::new(0.1, 0.2, 0.5, 0.0, 1.0, 0.3);
        let s0 = SimplexPoint::new(0.3, 0.2, 0.4, 0.1).unwrap();
        let r = detect_limit(s0, &p, &LimitOptions::default()).unwrap();
        let l10 = SimplexPoint::new(0.6, 2.0 / 15.0, 4.0 / 15.0, 0.0).unwrap();
        assert!(r.converged);
        assert!(r.limit.unwrap().dist_inf(&l10) <= 1e-5);
        assert!(r.predicted.as_ref().unwrap().conjectural);
    }

    #[test]
    fn iteration_budget_is_respected() {
        let p = ModelParams::new(0.1, 0.2, 0.5, 0.0, 1.0, 0.3);
        let s0 = SimplexPoint::new(0.3, 0.2, 0.4, 0.1).unwrap();
        let opts = LimitOptions {
            max_iter: 5,
            ..LimitOptions::default()
        };
        let r = detect_limit(s0, &p, &opts).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 5);
        assert!(r.limit.is_none());
        assert!(r.comparison.is_none());
    }

    #[test]
    fn sampled_points_lie_on_requested_face() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let s = sample_point(&mut rng, [false, true, false, false]);
            assert_eq!(s.u(), 0.0);
            assert!(s.sum_drift() <= 1e-15);
            assert!(s.min_coord() >= 0.0);
        }
    }
}
