use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixpoints::interior_quadratic;
use crate::model::ModelParams;
use crate::stability::PARAM_EQ_TOL;

/// Position of `g(0)` relative to `f(0) = b`, i.e. of `beta1 k1` relative
/// to `b + alpha`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FgCase {
    /// `g(0) > f(0)`: the curves cross once for `A > 0`.
    Above,
    /// `g(0) = f(0)`.
    Touching,
    /// `g(0) < f(0)`.
    Below,
}

/// Samples of `f(A) = b + beta1 A` and
/// `g(A) = b beta1 k1/(b+alpha) + alpha beta1 beta2 k2 A / ((b + beta2 A)(b+alpha))`.
/// Positive crossings are interior fixed points, `A` being the force of
/// infection there.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FgCurves {
    pub params: ModelParams,
    pub a: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub g_at_zero: f64,
    /// `lim g(A)` as `A -> inf`: `beta1 (b k1 + alpha k2) / (b + alpha)`.
    pub asymptote: f64,
    pub slope_f: f64,
    /// `g'(0) = alpha beta1 beta2 k2 / (b (b + alpha))`.
    pub slope_g_at_zero: f64,
    /// Abscissae `A > 0` where `f - g` changes sign, refined by bisection.
    pub crossings: Vec<f64>,
    pub case: FgCase,
}

impl FgCurves {
    pub fn f_at(&self, a: f64) -> f64 {
        fg(&self.params, a).0
    }

    pub fn g_at(&self, a: f64) -> f64 {
        fg(&self.params, a).1
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,f,g\n");
        for i in 0..self.a.len() {
            out.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", self.a[i], self.f[i], self.g[i]));
        }
        out
    }
}

fn fg(p: &ModelParams, a: f64) -> (f64, f64) {
    let ba = p.b + p.alpha;
    let f = p.b + p.beta1 * a;
    let g = p.b * p.beta1 * p.k1 / ba
        + p.alpha * p.beta1 * p.beta2 * p.k2 * a / ((p.b + p.beta2 * a) * ba);
    (f, g)
}

/// Samples both curves at `samples` evenly spaced points of `[0, a_max]`.
/// Without `a_max` the range is `[0, max(1, k1, k2, 2 A*)]`, `A*` being the
/// positive root of the interior equation when there is one.
pub fn fg_curves(p: &ModelParams, samples: usize, a_max: Option<f64>) -> Result<FgCurves> {
    p.check_signs()?;
    if !(p.alpha * p.b * p.beta1 * p.beta2 > 0.0) {
        return Err(Error::DegenerateRegime(
            "the f/g curves need alpha, b, beta1, beta2 all positive".into(),
        ));
    }
    if samples < 2 {
        return Err(Error::DegenerateInput("need at least two samples".into()));
    }
    let a_max = match a_max {
        Some(m) if m > 0.0 && m.is_finite() => m,
        Some(m) => return Err(Error::DegenerateInput(format!("bad range end {m}"))),
        None => {
            let root = interior_quadratic(p).ok().and_then(|q| q.positive_root).unwrap_or(0.0);
            [1.0, p.k1, p.k2, 2.0 * root].into_iter().fold(0.0, f64::max)
        }
    };
    let a: Vec<f64> = (0..samples)
        .map(|i| a_max * i as f64 / (samples - 1) as f64)
        .collect();
    let (f, g): (Vec<f64>, Vec<f64>) = a.iter().map(|&x| fg(p, x)).unzip();

    let d = |x: f64| {
        let (f, g) = fg(p, x);
        f - g
    };
    let mut crossings = Vec::new();
    for i in 1..samples - 1 {
        let (d0, d1) = (f[i] - g[i], f[i + 1] - g[i + 1]);
        if d0 == 0.0 {
            crossings.push(a[i]);
        } else if d0 * d1 < 0.0 {
            crossings.push(bisect(d, a[i], a[i + 1]));
        }
    }
    // a crossing in the first cell, away from A = 0 itself
    let (d0, d1) = (f[0] - g[0], f[1] - g[1]);
    if d0 * d1 < 0.0 {
        crossings.insert(0, bisect(d, a[0], a[1]));
    }
    let gap = g[0] - f[0];
    let case = if gap.abs() <= PARAM_EQ_TOL {
        FgCase::Touching
    } else if gap > 0.0 {
        FgCase::Above
    } else {
        FgCase::Below
    };
    let ba = p.b + p.alpha;
    Ok(FgCurves {
        params: *p,
        g_at_zero: g[0],
        asymptote: p.beta1 * (p.b * p.k1 + p.alpha * p.k2) / ba,
        slope_f: p.beta1,
        slope_g_at_zero: p.alpha * p.beta1 * p.beta2 * p.k2 / (p.b * ba),
        a,
        f,
        g,
        crossings,
        case,
    })
}

fn bisect(d: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let neg_lo = d(lo) < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (d(mid) < 0.0) == neg_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
