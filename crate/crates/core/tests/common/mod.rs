#![allow(dead_code)]

use proptest::prelude::*;
use sisi::{ModelParams, SimplexPoint};

/// The operator written out directly, independent of the library.
pub fn v_oracle(p: &ModelParams, [x, u, y, v]: [f64; 4]) -> [f64; 4] {
    let a = p.k1 * u + p.k2 * v;
    [
        x + p.b - p.b * x - p.beta1 * a * x,
        u - p.b * u + p.beta1 * a * x - p.alpha * u,
        y - p.b * y + p.alpha * u - p.beta2 * a * y,
        v - p.b * v + p.beta2 * a * y,
    ]
}

pub fn max_abs_diff(a: [f64; 4], b: [f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// A rate that is exactly zero a fifth of the time.
fn rate(hi: f64) -> impl Strategy<Value = f64> {
    prop_oneof![1 => Just(0.0), 4 => 0.0..hi]
}

pub fn raw_params() -> impl Strategy<Value = ModelParams> {
    (rate(0.6), rate(0.6), rate(1.0), rate(1.0), rate(1.6), rate(1.6))
        .prop_map(|(b, a, b1, b2, k1, k2)| ModelParams::new(b, a, b1, b2, k1, k2))
}

pub fn admissible_params() -> impl Strategy<Value = ModelParams> {
    raw_params().prop_filter("admissible", |p| p.is_admissible())
}

/// Points of the simplex, including faces and vertices.
pub fn simplex_point() -> impl Strategy<Value = SimplexPoint> {
    prop::array::uniform4(prop_oneof![1 => Just(0.0), 5 => 0.0..1.0f64])
        .prop_filter("nonzero", |w| w.iter().sum::<f64>() > 1e-3)
        .prop_map(|w| {
            let t: f64 = w.iter().sum();
            SimplexPoint::from_array(w.map(|x| x / t)).unwrap()
        })
}

pub fn interior_point() -> impl Strategy<Value = SimplexPoint> {
    prop::array::uniform4(0.05..1.0f64).prop_map(|w| {
        let t: f64 = w.iter().sum();
        SimplexPoint::from_array(w.map(|x| x / t)).unwrap()
    })
}
