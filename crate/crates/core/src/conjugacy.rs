//! One-dimensional dynamics of the `alpha = k2 = 0` case.
//!
//! On the face `y = v = 0` the operator reduces to
//! `W(x, u) = (x + b - b x - s u x, u - b u + s u x)` with `s = beta1 k1`.
//! Normalizing by `x + u` gives `W0`, whose `x` coordinate follows the
//! quadratic map `f(x) = b + (1 - b - s) x + s x^2`. The linear map
//! `h(x) = p x + q` conjugates the logistic map `F_mu(x) = mu x (1 - x)` to
//! `f`, i.e. `h(F_mu(x)) = f(h(x))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixpoints::quadratic_roots;
use crate::model::ModelParams;
use crate::stability::{StabilityClass, UNIT_CIRCLE_TOL};

/// Sup-norm bound for the conjugacy identity to pass.
pub const CONJUGACY_TOL: f64 = 1e-12;

fn require_reduced_regime(p: &ModelParams) -> Result<()> {
    p.check_signs()?;
    if p.alpha != 0.0 || p.k2 != 0.0 {
        return Err(Error::WrongRegime(format!(
            "the reduced operator needs alpha = k2 = 0 (alpha={}, k2={})",
            p.alpha, p.k2
        )));
    }
    Ok(())
}

pub fn restrict_w(x: f64, u: f64, p: &ModelParams) -> Result<(f64, f64)> {
    require_reduced_regime(p)?;
    let s = p.beta1_k1();
    Ok((x + p.b - p.b * x - s * u * x, u - p.b * u + s * u * x))
}

/// `W` divided by `x + u + b - b(x + u)`; the output sums to one.
pub fn normalized_w0(x: f64, u: f64, p: &ModelParams) -> Result<(f64, f64)> {
    let (wx, wu) = restrict_w(x, u, p)?;
    let denom = x + u + p.b - p.b * (x + u);
    if !(denom > 0.0) {
        return Err(Error::DegenerateInput(format!(
            "normalizer x+u+b-b(x+u) = {denom} is not positive"
        )));
    }
    Ok((wx / denom, wu / denom))
}

pub fn logistic(mu: f64, x: f64) -> f64 {
    mu * x * (1.0 - x)
}

/// `f(x) = b + (1 - b - s) x + s x^2` with `s = beta1 k1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticMap1D {
    pub b: f64,
    pub s: f64,
}

impl QuadraticMap1D {
    pub fn from_params(p: &ModelParams) -> Self {
        Self {
            b: p.b,
            s: p.beta1_k1(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.b + (1.0 - self.b - self.s) * x + self.s * x * x
    }

    pub fn derivative(&self, x: f64) -> f64 {
        1.0 - self.b - self.s + 2.0 * self.s * x
    }

    /// `p1 = 1` and `p2 = b / s`.
    pub fn fixed_points(&self) -> (f64, f64) {
        (1.0, self.b / self.s)
    }
}

/// Which root of `s q^2 - (b + s) q + b = 0` fixes the intercept of `h`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootChoice {
    /// `q = 1`, giving `mu = s - b + 1`.
    #[default]
    One,
    /// `q = b / s`, giving `mu = 1 + b - s`. Exploration only.
    Ratio,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjugacyMap {
    pub mu: f64,
    /// Slope of `h`, `-mu / s`.
    pub p: f64,
    /// Intercept of `h`.
    pub q: f64,
    pub root: RootChoice,
}

impl ConjugacyMap {
    pub fn new(params: &ModelParams) -> Result<Self> {
        Self::with_root(params, RootChoice::One)
    }

    pub fn with_root(params: &ModelParams, root: RootChoice) -> Result<Self> {
        params.check_signs()?;
        let s = params.beta1_k1();
        if !(s > 0.0) {
            return Err(Error::DegenerateRegime("the conjugacy needs beta1*k1 > 0".into()));
        }
        let b = params.b;
        let q = match root {
            RootChoice::One => 1.0,
            RootChoice::Ratio => b / s,
        };
        // matching the linear terms of h(F(x)) = f(h(x))
        let mu = 2.0 * s * q + 1.0 - b - s;
        Ok(Self {
            mu,
            p: -mu / s,
            q,
            root,
        })
    }

    pub fn h(&self, x: f64) -> f64 {
        self.p * x + self.q
    }

    /// `1 < mu < 3`, the range where the logistic orbits of `(0,1)` settle on
    /// the attracting fixed point.
    pub fn mu_in_convergent_range(&self) -> bool {
        self.mu > 1.0 && self.mu < 3.0
    }
}

/// Roots of `s q^2 - (b + s) q + b = 0`, ascending.
pub fn intercept_roots(p: &ModelParams) -> Vec<f64> {
    let s = p.beta1_k1();
    quadratic_roots(s, -(p.b + s), p.b)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjugacyCheck {
    pub map: ConjugacyMap,
    pub grid_size: usize,
    /// `max |h(F_mu(x)) - f(h(x))|` over the grid.
    pub sup_norm: f64,
    pub pass: bool,
    /// `mu` outside `(1, 3)` is allowed but flagged here.
    pub mu_in_range: bool,
}

/// Evaluates the conjugacy identity on `grid_size` uniform points of `[0,1]`.
pub fn verify_conjugacy(p: &ModelParams, grid_size: usize) -> Result<ConjugacyCheck> {
    verify_conjugacy_with(p, grid_size, RootChoice::One)
}

pub fn verify_conjugacy_with(
    p: &ModelParams,
    grid_size: usize,
    root: RootChoice,
) -> Result<ConjugacyCheck> {
    let map = ConjugacyMap::with_root(p, root)?;
    let f = QuadraticMap1D::from_params(p);
    let n = grid_size.max(2);
    let sup_norm = (0..n)
        .map(|i| {
            let x = i as f64 / (n - 1) as f64;
            (map.h(logistic(map.mu, x)) - f.eval(map.h(x))).abs()
        })
        .fold(0.0, f64::max);
    Ok(ConjugacyCheck {
        map,
        grid_size: n,
        sup_norm,
        pass: sup_norm <= CONJUGACY_TOL,
        mu_in_range: map.mu_in_convergent_range(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint1D {
    pub value: f64,
    pub derivative: f64,
    pub class: StabilityClass,
    pub in_unit_interval: bool,
}

fn classify_1d(f: &QuadraticMap1D, value: f64) -> FixedPoint1D {
    let derivative = f.derivative(value);
    let m = derivative.abs();
    let class = if (m - 1.0).abs() <= UNIT_CIRCLE_TOL {
        StabilityClass::Nonhyperbolic
    } else if m < 1.0 {
        StabilityClass::Attracting
    } else {
        StabilityClass::Repelling
    };
    FixedPoint1D {
        value,
        derivative,
        class,
        in_unit_interval: (0.0..=1.0).contains(&value),
    }
}

/// Labels `p1 = 1` and `p2 = b / (beta1 k1)` by `|f'(p)|` against one.
pub fn classify_1d_fixed_points(p: &ModelParams) -> Result<[FixedPoint1D; 2]> {
    p.check_signs()?;
    if !(p.beta1_k1() > 0.0) {
        return Err(Error::DegenerateRegime("needs beta1*k1 > 0".into()));
    }
    let f = QuadraticMap1D::from_params(p);
    let (p1, p2) = f.fixed_points();
    Ok([classify_1d(&f, p1), classify_1d(&f, p2)])
}
