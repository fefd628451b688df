//! Fixed points of the evolution operator.
//!
//! The catalog is built from the case table of known fixed sets. The cases
//! overlap and some list points that are not fixed under their own
//! conditions, so every case predicate is evaluated, the candidates are
//! merged, and only those with `||V(p) - p||_inf <= 1e-10` are kept.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{evolve, validate_params, ModelParams, SimplexPoint};

/// Residual bound for a point to count as fixed.
pub const FIXED_POINT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FixedLabel {
    Lambda1,
    Lambda2,
    Lambda3,
    Lambda4,
    Family5,
    Family6,
    Family7,
    Family8,
    Lambda9,
    Lambda10,
    Lambda11,
    WholeSimplex,
}

impl FixedLabel {
    /// Plain-ASCII name used in CSV and JSON output.
    pub fn ascii(self) -> &'static str {
        match self {
            FixedLabel::Lambda1 => "lambda1",
            FixedLabel::Lambda2 => "lambda2",
            FixedLabel::Lambda3 => "lambda3",
            FixedLabel::Lambda4 => "lambda4",
            FixedLabel::Family5 => "Lambda5",
            FixedLabel::Family6 => "Lambda6",
            FixedLabel::Family7 => "Lambda7",
            FixedLabel::Family8 => "Lambda8",
            FixedLabel::Lambda9 => "lambda9",
            FixedLabel::Lambda10 => "lambda10",
            FixedLabel::Lambda11 => "lambda11",
            FixedLabel::WholeSimplex => "S3",
        }
    }

    pub fn is_family(self) -> bool {
        matches!(
            self,
            FixedLabel::Family5
                | FixedLabel::Family6
                | FixedLabel::Family7
                | FixedLabel::Family8
                | FixedLabel::WholeSimplex
        )
    }
}

impl fmt::Display for FixedLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FixedLabel::Lambda1 => "λ₁",
            FixedLabel::Lambda2 => "λ₂",
            FixedLabel::Lambda3 => "λ₃",
            FixedLabel::Lambda4 => "λ₄",
            FixedLabel::Family5 => "Λ₅",
            FixedLabel::Family6 => "Λ₆",
            FixedLabel::Family7 => "Λ₇",
            FixedLabel::Family8 => "Λ₈",
            FixedLabel::Lambda9 => "λ₉",
            FixedLabel::Lambda10 => "λ₁₀",
            FixedLabel::Lambda11 => "λ₁₁",
            FixedLabel::WholeSimplex => "S³",
        };
        f.write_str(s)
    }
}

/// A face of the simplex: the coordinates flagged in `zero` vanish, the rest
/// are free subject to summing to one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub zero: [bool; 4],
}

impl Face {
    pub fn new(zero: [bool; 4]) -> Self {
        Self { zero }
    }

    pub fn free_coords(&self) -> Vec<&'static str> {
        (0..4)
            .filter(|&i| !self.zero[i])
            .map(|i| SimplexPoint::LABELS[i])
            .collect()
    }

    pub fn describe(&self) -> String {
        let zeros: Vec<&str> = (0..4)
            .filter(|&i| self.zero[i])
            .map(|i| SimplexPoint::LABELS[i])
            .collect();
        if zeros.is_empty() {
            "whole simplex".to_string()
        } else {
            format!("{} = 0", zeros.join(" = "))
        }
    }

    /// Sup-norm distance from a simplex point to the face, measured by the
    /// largest coordinate that should vanish.
    pub fn distance(&self, s: &SimplexPoint) -> f64 {
        let c = s.coords();
        (0..4)
            .filter(|&i| self.zero[i])
            .map(|i| c[i].abs())
            .fold(0.0, f64::max)
    }

    /// Vertices, points along each edge, and the centroid of the face.
    pub fn samples(&self) -> Vec<SimplexPoint> {
        let free: Vec<usize> = (0..4).filter(|&i| !self.zero[i]).collect();
        let mut out = Vec::new();
        let mut push = |weights: &[(usize, f64)]| {
            let mut c = [0.0; 4];
            for &(i, w) in weights {
                c[i] = w;
            }
            out.push(SimplexPoint::from_raw(c));
        };
        for &i in &free {
            push(&[(i, 1.0)]);
        }
        for a in 0..free.len() {
            for b in a + 1..free.len() {
                push(&[(free[a], 0.5), (free[b], 0.5)]);
                push(&[(free[a], 0.25), (free[b], 0.75)]);
                push(&[(free[a], 0.9), (free[b], 0.1)]);
            }
        }
        if free.len() >= 3 {
            let w = 1.0 / free.len() as f64;
            let centroid: Vec<(usize, f64)> = free.iter().map(|&i| (i, w)).collect();
            push(&centroid);
        }
        out
    }
}

/// An entry of the fixed-point catalog: an isolated point, or a face of
/// the simplex made entirely of fixed points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub label: FixedLabel,
    /// The point itself, or the sampled members of a family.
    pub representatives: Vec<SimplexPoint>,
    pub family: Option<Face>,
    /// Largest `||V(p) - p||_inf` over the representatives.
    pub residual: f64,
}

impl FixedPoint {
    fn isolated(label: FixedLabel, point: SimplexPoint, residual: f64) -> Self {
        Self {
            label,
            representatives: vec![point],
            family: None,
            residual,
        }
    }

    /// The point, for isolated entries.
    pub fn point(&self) -> Option<SimplexPoint> {
        match self.family {
            None => self.representatives.first().copied(),
            Some(_) => None,
        }
    }

    /// Sup-norm distance from `s` to this point or family.
    pub fn distance(&self, s: &SimplexPoint) -> f64 {
        match &self.family {
            Some(face) => face.distance(s),
            None => self.representatives[0].dist_inf(s),
        }
    }
}

fn raw_residual(p: &ModelParams, c: [f64; 4]) -> f64 {
    evolve(p, c)
        .iter()
        .zip(c.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Coefficients of `c2 A^2 + c1 A + c0 = 0`, the interior fixed-point
/// equation with denominators cleared:
///
/// ```text
/// c2 = (b + alpha) beta1 beta2
/// c1 = (b + alpha) b (beta1 + beta2) - beta1 beta2 (b k1 + alpha k2)
/// c0 = b^2 (b + alpha - beta1 k1)
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteriorQuadratic {
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
    /// Real roots, ascending.
    pub roots: Vec<f64>,
    /// Largest strictly positive root.
    pub positive_root: Option<f64>,
}

/// Right-hand side of the uncleared interior equation; a fixed-point force
/// of infection `A` makes it equal to one.
pub fn interior_equation_rhs(p: &ModelParams, a: f64) -> f64 {
    let ModelParams {
        b,
        alpha,
        beta1,
        beta2,
        k1,
        k2,
    } = *p;
    let d1 = (b + beta1 * a) * (b + alpha);
    b * beta1 * k1 / d1 + alpha * beta1 * beta2 * k2 * a / (d1 * (b + beta2 * a))
}

fn require_all_positive(p: &ModelParams) -> Result<()> {
    p.check_signs()?;
    if p.values().iter().any(|&v| v <= 0.0) {
        return Err(Error::DegenerateRegime(format!(
            "the interior equation needs alpha*b*beta1*beta2*k1*k2 > 0 ({p})"
        )));
    }
    Ok(())
}

pub fn interior_quadratic(p: &ModelParams) -> Result<InteriorQuadratic> {
    require_all_positive(p)?;
    let ModelParams {
        b,
        alpha,
        beta1,
        beta2,
        k1,
        k2,
    } = *p;
    let c2 = (b + alpha) * beta1 * beta2;
    let c1 = (b + alpha) * b * (beta1 + beta2) - beta1 * beta2 * (b * k1 + alpha * k2);
    let c0 = b * b * (b + alpha - beta1 * k1);
    if c2 == 0.0 {
        return Err(Error::DegenerateRegime("leading coefficient vanishes".into()));
    }
    let roots = quadratic_roots(c2, c1, c0);
    let positive_root = roots.iter().copied().filter(|&r| r > 0.0).reduce(f64::max);
    Ok(InteriorQuadratic {
        c2,
        c1,
        c0,
        roots,
        positive_root,
    })
}

/// Real roots of `a x^2 + b x + c` (`a != 0`), ascending. Uses the
/// cancellation-free pairing `q = -(b + sign(b) sqrt(disc)) / 2`,
/// `x = q/a, c/q`.
pub(crate) fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let sqrt_disc = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sqrt_disc);
    let mut roots = if q == 0.0 {
        // b = 0 and disc = 0, so c = 0 as well
        vec![0.0, 0.0]
    } else {
        vec![q / a, c / q]
    };
    roots.sort_by(f64::total_cmp);
    if disc == 0.0 {
        roots.truncate(1);
    }
    roots
}

/// Positive root of the interior equation found by bisection on
/// `f(A) - g(A)` with `f(A) = b + beta1 A` and
/// `g(A) = (b + beta1 A) * rhs(A)`. Independent of the cleared quadratic;
/// only meaningful when `beta1 k1 > b + alpha` (then `f - g < 0` at zero).
pub fn positive_root_by_bisection(p: &ModelParams) -> Option<f64> {
    require_all_positive(p).ok()?;
    let h = |a: f64| (p.b + p.beta1 * a) * (1.0 - interior_equation_rhs(p, a));
    if h(0.0) >= 0.0 {
        return None;
    }
    let mut hi = 1.0;
    while h(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return None;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Interior point for force of infection `a`, using the displayed formula
/// `x = b / (b + beta1 A)`.
fn interior_point(p: &ModelParams, a: f64, x: f64) -> [f64; 4] {
    let ModelParams {
        b,
        alpha,
        beta1,
        beta2,
        ..
    } = *p;
    let d1 = (b + beta1 * a) * (b + alpha);
    let d2 = d1 * (b + beta2 * a);
    [
        x,
        b * beta1 * a / d1,
        alpha * b * beta1 * a / d2,
        alpha * beta1 * beta2 * a * a / d2,
    ]
}

/// Both published expressions for the interior point's `x` coordinate,
/// with their fixed-point residuals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteriorCandidates {
    pub force_of_infection: f64,
    /// `x = b / (b + beta1 A)`.
    pub displayed: [f64; 4],
    pub displayed_residual: f64,
    /// `x = b / (b + alpha)`, other coordinates unchanged.
    pub alternative: [f64; 4],
    pub alternative_residual: f64,
}

impl InteriorCandidates {
    /// The candidate that satisfies `V(p) = p`, preferring the displayed one.
    pub fn chosen(&self) -> Option<[f64; 4]> {
        if self.displayed_residual <= FIXED_POINT_TOL {
            Some(self.displayed)
        } else if self.alternative_residual <= FIXED_POINT_TOL {
            Some(self.alternative)
        } else {
            None
        }
    }

    /// True when the two expressions give different points.
    pub fn disagree(&self) -> bool {
        (self.displayed[0] - self.alternative[0]).abs() > FIXED_POINT_TOL
    }
}

pub fn interior_candidates(p: &ModelParams) -> Result<InteriorCandidates> {
    let quad = match interior_quadratic(p) {
        Ok(q) => q,
        Err(Error::DegenerateRegime(msg)) => return Err(Error::NoInteriorPoint(msg)),
        Err(e) => return Err(e),
    };
    let a = quad.positive_root.ok_or_else(|| {
        Error::NoInteriorPoint(format!(
            "the interior equation has no positive root (roots {:?})",
            quad.roots
        ))
    })?;
    let displayed = interior_point(p, a, p.b / (p.b + p.beta1 * a));
    let alternative = interior_point(p, a, p.b / (p.b + p.alpha));
    Ok(InteriorCandidates {
        force_of_infection: a,
        displayed,
        displayed_residual: raw_residual(p, displayed),
        alternative,
        alternative_residual: raw_residual(p, alternative),
    })
}

/// The interior fixed point. The residual check is a postcondition: the
/// returned point is whichever candidate expression is actually fixed.
pub fn lambda11(p: &ModelParams) -> Result<FixedPoint> {
    let cand = interior_candidates(p)?;
    let coords = cand.chosen().ok_or_else(|| {
        Error::NoInteriorPoint(format!(
            "neither interior candidate is fixed (residuals {:e}, {:e})",
            cand.displayed_residual, cand.alternative_residual
        ))
    })?;
    let point = SimplexPoint::from_array(coords)
        .map_err(|e| Error::NoInteriorPoint(format!("interior candidate off the simplex: {e}")))?;
    Ok(FixedPoint::isolated(
        FixedLabel::Lambda11,
        point,
        raw_residual(p, coords),
    ))
}

/// `(b/(beta1 k1), (beta1 k1 - b)/(beta1 k1), 0, 0)`.
pub fn lambda9_coords(p: &ModelParams) -> [f64; 4] {
    let s = p.beta1_k1();
    [p.b / s, (s - p.b) / s, 0.0, 0.0]
}

/// `((b+alpha)/(beta1 k1), b(beta1 k1-b-alpha)/(beta1 k1 (b+alpha)),
///   alpha(beta1 k1-b-alpha)/(beta1 k1 (b+alpha)), 0)`.
pub fn lambda10_coords(p: &ModelParams) -> [f64; 4] {
    let s = p.beta1_k1();
    let ba = p.b + p.alpha;
    let excess = s - ba;
    [ba / s, p.b * excess / (s * ba), p.alpha * excess / (s * ba), 0.0]
}

/// Fixed sets listed for these parameters, each verified by residual.
/// `lambda1` is always present.
pub fn fixed_point_set(p: &ModelParams) -> Result<Vec<FixedPoint>> {
    let report = validate_params(p)?;
    if !report.is_admissible() {
        return Err(Error::InadmissibleParams(report));
    }
    let ModelParams {
        b,
        alpha,
        beta1,
        beta2,
        k1,
        k2,
    } = *p;

    let mut points: Vec<(FixedLabel, [f64; 4])> = vec![(FixedLabel::Lambda1, [1.0, 0.0, 0.0, 0.0])];
    let mut families: Vec<(FixedLabel, Face)> = Vec::new();
    let l2 = (FixedLabel::Lambda2, [0.0, 0.0, 0.0, 1.0]);
    let l3 = (FixedLabel::Lambda3, [0.0, 0.0, 1.0, 0.0]);
    let l4 = (FixedLabel::Lambda4, [0.0, 1.0, 0.0, 0.0]);

    if b == 0.0 {
        points.extend([l2, l3]);
    }
    if b == 0.0 && alpha == 0.0 {
        points.extend([l2, l4]);
        families.push((FixedLabel::Family5, Face::new([false, true, false, true])));
    }
    if b == 0.0 && beta1 == 0.0 && beta2 == 0.0 {
        families.push((FixedLabel::Family6, Face::new([false, true, false, false])));
    }
    if b == 0.0 && alpha == 0.0 && beta2 == 0.0 && beta1 > 0.0 {
        families.push((FixedLabel::Family7, Face::new([true, false, false, false])));
    }
    if b == 0.0 && beta2 == 0.0 && beta1 > 0.0 && alpha > 0.0 && k1 * k2 > 0.0 {
        points.push(l4);
        families.push((FixedLabel::Family8, Face::new([true, true, false, false])));
    }
    if b == 0.0 && alpha == 0.0 && ((k1 == 0.0 && k2 == 0.0) || (beta1 == 0.0 && beta2 == 0.0)) {
        families.push((FixedLabel::WholeSimplex, Face::new([false; 4])));
    }
    if b > 0.0 && alpha == 0.0 && beta1 * k1 > b {
        points.push((FixedLabel::Lambda9, lambda9_coords(p)));
    }
    if b > 0.0 && alpha > 0.0 && beta2 == 0.0 && beta1 * k1 > b + alpha {
        points.push((FixedLabel::Lambda10, lambda10_coords(p)));
    }

    let mut out: Vec<FixedPoint> = Vec::new();
    for (label, coords) in points {
        if out.iter().any(|f| f.label == label) {
            continue;
        }
        let residual = raw_residual(p, coords);
        if residual > FIXED_POINT_TOL {
            continue;
        }
        if let Ok(point) = SimplexPoint::from_array(coords) {
            out.push(FixedPoint::isolated(label, point, residual));
        }
    }
    if alpha * b * beta1 * beta2 * k1 * k2 > 0.0 {
        if let Ok(fp) = lambda11(p) {
            out.push(fp);
        }
    }
    for (label, face) in families {
        if out.iter().any(|f| f.label == label) {
            continue;
        }
        let samples = face.samples();
        let residual = samples
            .iter()
            .map(|s| raw_residual(p, s.coords()))
            .fold(0.0, f64::max);
        if residual <= FIXED_POINT_TOL {
            out.push(FixedPoint {
                label,
                representatives: samples,
                family: Some(face),
                residual,
            });
        }
    }
    out.sort_by_key(|f| f.label);
    Ok(out)
}

/// Outcome of a brute-force scan of a barycentric grid for near-fixed points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub resolution: usize,
    pub tolerance: f64,
    pub grid_points: usize,
    /// Grid points with residual at most `tolerance`.
    pub near_fixed: Vec<SimplexPoint>,
    /// Near-fixed grid points farther than one grid cell from every
    /// catalog entry.
    pub unexplained: Vec<SimplexPoint>,
}

impl SweepReport {
    pub fn is_complete(&self) -> bool {
        self.unexplained.is_empty()
    }
}

/// Scans `{(i,j,k,l)/n : i+j+k+l = n}` and checks each near-fixed grid point
/// against the catalog.
pub fn grid_sweep(p: &ModelParams, resolution: usize, tolerance: f64) -> Result<SweepReport> {
    let catalog = fixed_point_set(p)?;
    let n = resolution;
    let h = 1.0 / n as f64;
    let per_slab: Vec<(usize, Vec<SimplexPoint>)> = (0..=n)
        .into_par_iter()
        .map(|i| {
            let mut count = 0;
            let mut hits = Vec::new();
            for j in 0..=n - i {
                for k in 0..=n - i - j {
                    let l = n - i - j - k;
                    count += 1;
                    let c = [i, j, k, l].map(|m| m as f64 * h);
                    if raw_residual(p, c) <= tolerance {
                        hits.push(SimplexPoint::from_raw(c));
                    }
                }
            }
            (count, hits)
        })
        .collect();
    let grid_points = per_slab.iter().map(|(c, _)| c).sum();
    let near_fixed: Vec<SimplexPoint> = per_slab.into_iter().flat_map(|(_, h)| h).collect();
    let unexplained = near_fixed
        .iter()
        .filter(|s| catalog.iter().all(|f| f.distance(s) > h * (1.0 + 1e-9)))
        .copied()
        .collect();
    Ok(SweepReport {
        resolution,
        tolerance,
        grid_points,
        near_fixed,
        unexplained,
    })
}
