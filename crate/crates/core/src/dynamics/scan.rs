use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{detect_limit_against, predicted_limit, sample_point, LimitOptions, LimitReport, Regime};
use crate::error::{Error, Result};
use crate::model::{ModelParams, SimplexPoint};
use crate::stability::PARAM_EQ_TOL;

/// The two conjectured limit statements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conjecture {
    /// `beta2 = 0`, `b alpha > 0`: `lambda1` below threshold, `lambda10` above.
    NoReinfection,
    /// All rates positive: `lambda1` below threshold (with
    /// `b (b + alpha) >= alpha beta2 k2`), `lambda11` above.
    FullModel,
}

impl Conjecture {
    /// `1` or `2`, as accepted on the command line.
    pub fn from_index(i: u32) -> Option<Self> {
        match i {
            1 => Some(Conjecture::NoReinfection),
            2 => Some(Conjecture::FullModel),
            _ => None,
        }
    }

    pub fn index(self) -> u32 {
        match self {
            Conjecture::NoReinfection => 1,
            Conjecture::FullModel => 2,
        }
    }

    pub fn regimes(self) -> &'static [Regime] {
        match self {
            Conjecture::NoReinfection => &[Regime::NoReinfectionExtinction, Regime::NoReinfectionEndemic],
            Conjecture::FullModel => &[Regime::FullModelExtinction, Regime::FullModelEndemic],
        }
    }
}

/// Parameter levels per axis, in the order `b, alpha, beta1, beta2, k1, k2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub axes: [Vec<f64>; 6],
    /// Random interior starting points per cell.
    pub initial_points: usize,
}

impl ScanGrid {
    /// `levels` evenly spaced values per axis. For the no-reinfection
    /// conjecture the `beta2` axis is the single value 0.
    pub fn new(which: Conjecture, levels: usize, initial_points: usize) -> Self {
        let ranges = [(0.05, 0.4), (0.03, 0.35), (0.2, 1.0), (0.1, 0.9), (0.3, 1.9), (0.2, 1.0)];
        let mut axes: [Vec<f64>; 6] = ranges.map(|(lo, hi)| linspace(lo, hi, levels));
        if which == Conjecture::NoReinfection {
            axes[3] = vec![0.0];
        }
        Self {
            axes,
            initial_points,
        }
    }

    pub fn cells(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    /// Parameters of cell `index`, with `k2` varying fastest.
    pub fn cell_params(&self, mut index: usize) -> ModelParams {
        let mut v = [0.0; 6];
        for axis in (0..6).rev() {
            let n = self.axes[axis].len();
            v[axis] = self.axes[axis][index % n];
            index /= n;
        }
        ModelParams::new(v[0], v[1], v[2], v[3], v[4], v[5])
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Position of `beta1 k1` relative to `b + alpha`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Threshold {
    Below,
    At,
    Above,
}

impl Threshold {
    pub fn of(p: &ModelParams) -> Self {
        let d = p.beta1_k1() - (p.b + p.alpha);
        if d.abs() <= PARAM_EQ_TOL {
            Threshold::At
        } else if d < 0.0 {
            Threshold::Below
        } else {
            Threshold::Above
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Match,
    Counterexample,
    /// The trajectory did not converge within the budget.
    Inconclusive,
    /// No stated limit covers the cell.
    NoPrediction,
    Inadmissible,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub cell: usize,
    /// Index of the starting point within the cell.
    pub point: usize,
    pub params: ModelParams,
    pub threshold: Threshold,
    pub regime: Option<Regime>,
    pub verdict: Verdict,
    /// Present for every admissible cell.
    pub report: Option<LimitReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub conjecture: Conjecture,
    pub seed: u64,
    pub cells: usize,
    pub matches: usize,
    pub counterexamples: usize,
    pub inconclusive: usize,
    pub no_prediction: usize,
    pub inadmissible_cells: usize,
    pub records: Vec<CellRecord>,
}

impl ScanReport {
    pub fn counterexamples(&self) -> impl Iterator<Item = &CellRecord> {
        self.records.iter().filter(|r| r.verdict == Verdict::Counterexample)
    }
}

/// Starting points for a cell: deterministic in `(seed, cell)`.
pub fn cell_initial_points(seed: u64, cell: usize, count: usize) -> Vec<SimplexPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(cell as u64);
    (0..count).map(|_| sample_point(&mut rng, [false; 4])).collect()
}

/// Evaluates the conjectured limit on every admissible grid cell.
pub fn conjecture_scan(
    which: Conjecture,
    grid: &ScanGrid,
    seed: u64,
    opts: &LimitOptions,
) -> Result<ScanReport> {
    if grid.cells() == 0 {
        return Err(Error::DegenerateInput("empty scan grid".into()));
    }
    let per_cell: Vec<Vec<CellRecord>> = (0..grid.cells())
        .into_par_iter()
        .map(|cell| scan_cell(which, grid, seed, opts, cell))
        .collect::<Result<_>>()?;
    let records: Vec<CellRecord> = per_cell.into_iter().flatten().collect();
    let count = |v: Verdict| records.iter().filter(|r| r.verdict == v).count();
    Ok(ScanReport {
        conjecture: which,
        seed,
        cells: grid.cells(),
        matches: count(Verdict::Match),
        counterexamples: count(Verdict::Counterexample),
        inconclusive: count(Verdict::Inconclusive),
        no_prediction: count(Verdict::NoPrediction),
        inadmissible_cells: count(Verdict::Inadmissible),
        records,
    })
}

fn scan_cell(
    which: Conjecture,
    grid: &ScanGrid,
    seed: u64,
    opts: &LimitOptions,
    cell: usize,
) -> Result<Vec<CellRecord>> {
    let params = grid.cell_params(cell);
    let threshold = Threshold::of(&params);
    if !params.is_admissible() {
        return Ok(vec![CellRecord {
            cell,
            point: 0,
            params,
            threshold,
            regime: None,
            verdict: Verdict::Inadmissible,
            report: None,
        }]);
    }
    cell_initial_points(seed, cell, grid.initial_points)
        .into_iter()
        .enumerate()
        .map(|(point, s0)| {
            let predicted =
                predicted_limit(&s0, &params)?.filter(|pl| which.regimes().contains(&pl.regime));
            let regime = predicted.as_ref().map(|pl| pl.regime);
            let report = detect_limit_against(s0, &params, opts, predicted)?;
            let verdict = match (regime, report.converged, report.matched()) {
                (None, _, _) => Verdict::NoPrediction,
                (Some(_), false, _) => Verdict::Inconclusive,
                (Some(_), true, Some(true)) => Verdict::Match,
                (Some(_), true, _) => Verdict::Counterexample,
            };
            Ok(CellRecord {
                cell,
                point,
                params,
                threshold,
                regime,
                verdict,
                report: Some(report),
            })
        })
        .collect()
}
