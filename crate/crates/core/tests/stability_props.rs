mod common;

use common::{admissible_params, simplex_point, v_oracle};
use num_complex::Complex64;
use proptest::prelude::*;
use sisi::stability::{
    characteristic_polynomial, charpoly_residual, classify_lambda1, classify_point, eigenvalues,
    eigenvalues_of, jacobian, StabilityClass,
};
use sisi::SimplexPoint;

type M4 = [[f64; 4]; 4];

fn mul(a: &M4, b: &M4) -> M4 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..4).map(|k| a[i][k] * b[k][j]).sum()))
}

/// Gauss-Jordan inverse with partial pivoting.
fn inverse(m: &M4) -> Option<M4> {
    let mut a = *m;
    let mut inv: M4 = std::array::from_fn(|i| std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 }));
    for c in 0..4 {
        let piv = (c..4).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs()))?;
        if a[piv][c].abs() < 1e-8 {
            return None;
        }
        a.swap(c, piv);
        inv.swap(c, piv);
        let d = a[c][c];
        for j in 0..4 {
            a[c][j] /= d;
            inv[c][j] /= d;
        }
        for r in 0..4 {
            if r != c {
                let f = a[r][c];
                for j in 0..4 {
                    a[r][j] -= f * a[c][j];
                    inv[r][j] -= f * inv[c][j];
                }
            }
        }
    }
    Some(inv)
}

/// Greedy nearest matching; returns the largest pair distance.
fn multiset_distance(got: &[Complex64], want: &[Complex64]) -> f64 {
    let mut used = vec![false; got.len()];
    let mut worst = 0.0f64;
    for w in want {
        let (idx, d) = got
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, g)| (i, (g - w).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        used[idx] = true;
        worst = worst.max(d);
    }
    worst
}

fn spectrum() -> impl Strategy<Value = (M4, Vec<Complex64>)> {
    // either four real eigenvalues, or two real plus a conjugate pair
    (prop::array::uniform4(-2.0..2.0f64), any::<bool>()).prop_map(|(v, pair)| {
        let mut d = [[0.0; 4]; 4];
        let mut eig = Vec::new();
        if pair {
            let (a, b) = (v[0], v[1].abs() + 0.1);
            d[0][0] = a;
            d[0][1] = -b;
            d[1][0] = b;
            d[1][1] = a;
            eig.push(Complex64::new(a, b));
            eig.push(Complex64::new(a, -b));
            for i in 2..4 {
                d[i][i] = v[i];
                eig.push(Complex64::new(v[i], 0.0));
            }
        } else {
            for i in 0..4 {
                d[i][i] = v[i];
                eig.push(Complex64::new(v[i], 0.0));
            }
        }
        (d, eig)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn similarity_preserves_eigenvalues(
        (d, eig) in spectrum(),
        s in prop::array::uniform4(prop::array::uniform4(-1.0..1.0f64)),
    ) {
        // diagonally dominant perturbation keeps S well conditioned
        let s: M4 = std::array::from_fn(|i| std::array::from_fn(|j| s[i][j] * 0.3 + if i == j { 1.0 } else { 0.0 }));
        let s_inv = inverse(&s);
        prop_assume!(s_inv.is_some());
        let m = mul(&mul(&s, &d), &s_inv.unwrap());
        let got = eigenvalues_of(&m).unwrap();
        let dist = multiset_distance(&got, &eig);
        prop_assert!(dist <= 1e-7, "{:?} vs {:?}", got, eig);
        // the characteristic polynomial vanishes at every computed eigenvalue
        let cp = characteristic_polynomial(&m);
        for z in got {
            prop_assert!(charpoly_residual(&cp, z) <= 1e-9);
        }
    }

    #[test]
    fn rule_agrees_with_eigenvalues_off_the_boundary(p in admissible_params()) {
        let s = p.beta1 * p.k1;
        prop_assume!(p.b > 1e-6 && (s - p.b - p.alpha).abs() > 1e-6);
        let rule = classify_lambda1(&p).unwrap();
        let generic = classify_point(&SimplexPoint::vertex(0), &p).unwrap().class;
        prop_assert_eq!(rule, generic, "{}", p);
    }

    #[test]
    fn lambda1_spectrum_is_real_with_known_radius(p in admissible_params()) {
        let ev = eigenvalues(&jacobian(&SimplexPoint::vertex(0), &p)).unwrap();
        prop_assert!(ev.iter().all(|z| z.im == 0.0));
        let mu1 = 1.0 - p.b;
        let mu2 = 1.0 - p.b - p.alpha + p.beta1 * p.k1;
        prop_assert!(mu1 >= 0.0 && mu2 >= -1e-12);
        let radius = ev.iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!((radius - mu1.max(mu2.abs())).abs() <= 1e-12);
    }

    #[test]
    fn jacobian_matches_central_differences(p in admissible_params(), s in simplex_point()) {
        let j = jacobian(&s, &p);
        let h = 1e-6;
        for col in 0..4 {
            let (mut plus, mut minus) = (s.coords(), s.coords());
            plus[col] += h;
            minus[col] -= h;
            let (fp, fm) = (v_oracle(&p, plus), v_oracle(&p, minus));
            for row in 0..4 {
                let fd = (fp[row] - fm[row]) / (2.0 * h);
                prop_assert!((fd - j.entries()[row][col]).abs() <= 1e-5);
            }
        }
    }
}

#[test]
fn boundary_parameters_are_nonhyperbolic() {
    use sisi::ModelParams;
    for p in [
        ModelParams::new(0.0, 0.2, 0.5, 0.1, 1.0, 0.3),
        ModelParams::new(0.1, 0.2, 0.3, 0.1, 1.0, 0.3),
        ModelParams::new(0.25, 0.25, 0.5, 0.0, 1.0, 0.0),
    ] {
        assert_eq!(classify_lambda1(&p).unwrap(), StabilityClass::Nonhyperbolic, "{p}");
        let generic = classify_point(&SimplexPoint::vertex(0), &p).unwrap().class;
        assert_eq!(generic, StabilityClass::Nonhyperbolic, "{p}");
    }
}
