mod common;

use common::{admissible_params, max_abs_diff, simplex_point};
use proptest::prelude::*;
use sisi::{apply_qso, apply_v, build_tensor, check_axioms, ModelParams, QsoTensor};

fn wide_params() -> impl Strategy<Value = ModelParams> {
    (0.0..1.2f64, 0.0..1.2f64, 0.0..2.0f64, 0.0..2.0f64, 0.0..2.5f64, 0.0..2.5f64)
        .prop_map(|(b, a, b1, b2, k1, k2)| ModelParams::new(b, a, b1, b2, k1, k2))
}

fn scaled(p: &ModelParams, dir: [f64; 6], t: f64) -> ModelParams {
    let v = p.values();
    ModelParams::new(
        v[0] + t * dir[0],
        v[1] + t * dir[1],
        v[2] + t * dir[2],
        v[3] + t * dir[3],
        v[4] + t * dir[4],
        v[5] + t * dir[5],
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn tensor_form_equals_operator(p in admissible_params(), s in simplex_point()) {
        let t = build_tensor(&p).unwrap();
        let q = apply_qso(&t, &s).unwrap();
        let v = apply_v(&s, &p).unwrap();
        prop_assert!(max_abs_diff(q.coords(), v.coords()) <= 1e-12);
    }

    #[test]
    fn rows_sum_to_one_for_any_rates(p in wide_params()) {
        let t = QsoTensor::from_params_unchecked(&p);
        for i in 0..4 {
            for j in 0..4 {
                prop_assert!((t.row_sum(i, j) - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn entry_bounds_iff_admissible(p in wide_params()) {
        let t = QsoTensor::from_params_unchecked(&p);
        prop_assert_eq!(check_axioms(&t).is_valid(), p.is_admissible(), "{}", p);
        prop_assert_eq!(build_tensor(&p).is_ok(), p.is_admissible());
    }

    #[test]
    fn entry_bounds_iff_admissible_at_the_boundary(
        p in admissible_params(),
        dir in prop::array::uniform6(0.0..1.0f64),
    ) {
        // walk outward along dir until the first inequality breaks
        prop_assume!(dir.iter().sum::<f64>() > 1e-3);
        let (mut lo, mut hi) = (0.0, 1.0);
        while scaled(&p, dir, hi).is_admissible() {
            hi *= 2.0;
            prop_assume!(hi < 1e6);
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if scaled(&p, dir, mid).is_admissible() { lo = mid } else { hi = mid }
        }
        for t in [lo - 1e-7, hi + 1e-7] {
            let q = scaled(&p, dir, t.max(0.0));
            let valid = check_axioms(&QsoTensor::from_params_unchecked(&q)).is_valid();
            prop_assert_eq!(valid, q.is_admissible(), "{} at t={}", q, t);
        }
    }
}
