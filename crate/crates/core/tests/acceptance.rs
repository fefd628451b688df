//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sisi::conjugacy::verify_conjugacy;
use sisi::dynamics::{cell_initial_points, detect_limit, Verdict};
use sisi::fixpoints::{grid_sweep, interior_quadratic, lambda11};
use sisi::stability::{classify_lambda1, classify_point, jacobian, StabilityClass};
use sisi::{
    apply_qso, apply_v, build_tensor, conjecture_scan, verify_proposition, Conjecture, LimitOptions,
    ModelParams, Regime, ScanGrid, SimplexPoint,
};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

/// The operator written out directly, independent of the library.
fn v_oracle(p: &ModelParams, [x, u, y, v]: [f64; 4]) -> [f64; 4] {
    let a = p.k1 * u + p.k2 * v;
    [
        x + p.b - p.b * x - p.beta1 * a * x,
        u - p.b * u + p.beta1 * a * x - p.alpha * u,
        y - p.b * y + p.alpha * u - p.beta2 * a * y,
        v - p.b * v + p.beta2 * a * y,
    ]
}

fn random_params(rng: &mut ChaCha8Rng) -> ModelParams {
    loop {
        let p = ModelParams::new(
            rng.gen_range(0.0..1.0),
            rng.gen_range(0.0..1.0),
            rng.gen_range(0.0..1.0),
            rng.gen_range(0.0..1.0),
            rng.gen_range(0.0..2.0),
            rng.gen_range(0.0..2.0),
        );
        if p.is_admissible() {
            return p;
        }
    }
}

fn random_point(rng: &mut ChaCha8Rng) -> SimplexPoint {
    let w: [f64; 4] = std::array::from_fn(|_| -(1.0 - rng.gen::<f64>()).ln());
    let t: f64 = w.iter().sum();
    let c = w.map(|x| x / t);
    SimplexPoint::from_array(c).expect("normalized weights lie on the simplex")
}

fn c1_interior_quadratic() -> Outcome {
    let p = ModelParams::new(0.2, 0.3, 0.6, 0.4, 1.0, 1.0);
    let q = interior_quadratic(&p).unwrap();
    let r2 = q.c2 / q.c0 - 30.0 / -1.0;
    let r1 = q.c1 / q.c0 - -5.0 / -1.0;
    let want = (5.0 + 145f64.sqrt()) / 60.0;
    let root = q.positive_root.unwrap_or(f64::NAN);
    let ok = r2.abs() <= 1e-12 && r1.abs() <= 1e-12 && (root - want).abs() <= 1e-12;
    outcome(
        ok,
        format!("ratio errors {r2:.1e}, {r1:.1e}; root {root:.15} vs {want:.15}"),
    )
}

fn c2_reference_runs() -> Outcome {
    let l11 = {
        let p = ModelParams::new(0.1, 0.01, 0.8, 0.2, 0.5, 1.2);
        let fp = lambda11(&p).unwrap();
        let pt = fp.point().unwrap();
        // the target must itself be fixed under the independent operator
        let next = v_oracle(&p, pt.coords());
        let res = next.iter().zip(pt.coords()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(res <= 1e-10, "lambda11 residual {res:e}");
        pt.coords()
    };
    let cases: [(&str, ModelParams, [f64; 4], [f64; 4]); 4] = [
        (
            "1",
            ModelParams::new(0.6, 0.2, 0.5, 0.0, 1.0, 0.3),
            [0.1, 0.01, 0.2, 0.69],
            [1.0, 0.0, 0.0, 0.0],
        ),
        (
            "2",
            ModelParams::new(0.1, 0.2, 0.5, 0.0, 1.0, 0.3),
            [0.3, 0.2, 0.4, 0.1],
            [0.6, 2.0 / 15.0, 4.0 / 15.0, 0.0],
        ),
        (
            "3",
            ModelParams::new(0.6, 0.1, 0.5, 0.01, 1.2, 1.1),
            [0.2, 0.1, 0.3, 0.4],
            [1.0, 0.0, 0.0, 0.0],
        ),
        ("4", ModelParams::new(0.1, 0.01, 0.8, 0.2, 0.5, 1.2), [0.2, 0.4, 0.1, 0.3], l11),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, p, init, target) in cases {
        let start = Instant::now();
        let s0 = SimplexPoint::from_array(init).unwrap();
        let r = detect_limit(s0, &p, &LimitOptions::default()).unwrap();
        let secs = start.elapsed().as_secs_f64();
        let dev = r
            .limit
            .map(|l| l.coords().iter().zip(target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .unwrap_or(f64::INFINITY);
        let this = r.converged && dev <= 1e-5 && r.iterations <= 1_000_000 && secs < 10.0;
        ok &= this;
        parts.push(format!("run {name}: dev {dev:.1e} in {} it", r.iterations));
    }
    outcome(ok, parts.join("; "))
}

fn c3_lambda1_table() -> Outcome {
    let (mut checked, mut hyperbolic, mut skipped, mut bad) = (0, 0, 0, Vec::new());
    for i in 0..20 {
        for j in 0..20 {
            for k in 0..20 {
                let (b, alpha, s) = (i as f64 / 20.0, j as f64 / 20.0, k as f64 / 10.0);
                let p = ModelParams::new(b, alpha, s, 0.0, 1.0, 0.0);
                if !p.is_admissible() {
                    skipped += 1;
                    continue;
                }
                checked += 1;
                // exact comparison of s = k/10 with b + alpha = (i + j)/20
                let expected = if i == 0 || 2 * k == i + j {
                    StabilityClass::Nonhyperbolic
                } else if 2 * k < i + j {
                    StabilityClass::Attracting
                } else {
                    StabilityClass::Saddle
                };
                let rule = classify_lambda1(&p).unwrap();
                if rule != expected {
                    bad.push(format!("rule {p}: {rule} vs {expected}"));
                }
                if expected != StabilityClass::Nonhyperbolic {
                    hyperbolic += 1;
                    let generic = classify_point(&SimplexPoint::vertex(0), &p).unwrap().class;
                    if generic != expected {
                        bad.push(format!("eigen {p}: {generic} vs {expected}"));
                    }
                }
            }
        }
    }
    outcome(
        bad.is_empty() && checked > 0,
        format!(
            "{checked} admissible points ({hyperbolic} hyperbolic, {skipped} inadmissible skipped), {} mismatches {:?}",
            bad.len(),
            bad.iter().take(3).collect::<Vec<_>>()
        ),
    )
}

fn c4_c5_draws() -> (Outcome, Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut qso_dev, mut oracle_dev, mut row_dev) = (0.0f64, 0.0f64, 0.0f64);
    let (mut min_coord, mut sum_dev) = (f64::INFINITY, 0.0f64);
    for _ in 0..1000 {
        let p = random_params(&mut rng);
        let t = build_tensor(&p).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                row_dev = row_dev.max((t.row_sum(i, j) - 1.0).abs());
            }
        }
        for _ in 0..10 {
            let s = random_point(&mut rng);
            let v = apply_v(&s, &p).unwrap();
            let q = apply_qso(&t, &s).unwrap();
            let o = v_oracle(&p, s.coords());
            for k in 0..4 {
                qso_dev = qso_dev.max((v.coords()[k] - q.coords()[k]).abs());
                oracle_dev = oracle_dev.max((v.coords()[k] - o[k]).abs());
            }
            min_coord = min_coord.min(v.min_coord());
            sum_dev = sum_dev.max((v.coords().iter().sum::<f64>() - 1.0).abs());
        }
    }
    (
        outcome(
            qso_dev <= 1e-12 && row_dev <= 1e-12 && oracle_dev <= 1e-12,
            format!("sup |QSO - V| {qso_dev:.1e}, |V - direct| {oracle_dev:.1e}, row sums {row_dev:.1e}"),
        ),
        outcome(
            min_coord >= -1e-12 && sum_dev <= 1e-12,
            format!("min coordinate {min_coord:.3e}, sum drift {sum_dev:.1e}"),
        ),
    )
}

fn c6_conjugacy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut worst, mut worst_direct, mut all_in_range) = (0.0f64, 0.0f64, true);
    for _ in 0..100 {
        let s = 2.0 - rng.gen_range(0.0..2.0); // (0, 2]
        let b = rng.gen_range(0.0..s);
        let p = ModelParams::new(b, 0.0, s, 0.0, 1.0, 0.0);
        let c = verify_conjugacy(&p, 10_000).unwrap();
        worst = worst.max(c.sup_norm);
        all_in_range &= c.mu_in_range;
        // direct evaluation of both sides
        let mu = s - b + 1.0;
        let h = |x: f64| -(mu / s) * x + 1.0;
        let f = |x: f64| b + (1.0 - b - s) * x + s * x * x;
        for i in 0..10_000 {
            let x = i as f64 / 9_999.0;
            let d = (h(mu * x * (1.0 - x)) - f(h(x))).abs();
            worst_direct = worst_direct.max(d);
        }
        all_in_range &= mu > 1.0 && mu < 3.0;
    }
    outcome(
        worst <= 1e-12 && worst_direct <= 1e-12 && all_in_range,
        format!("sup-norm {worst:.1e} (direct {worst_direct:.1e}), mu in (1,3): {all_in_range}"),
    )
}

fn c7_propositions() -> Outcome {
    let opts = LimitOptions::default();
    let mut ok = true;
    let mut notes = Vec::new();
    let mut total = 0;
    for (i, regime) in Regime::proven().enumerate() {
        match verify_proposition(regime, 100, 700 + i as u64, &opts) {
            Ok(r) => {
                total += r.trials;
                if !r.all_passed() {
                    ok = false;
                    let first = r.failures().next().unwrap();
                    notes.push(format!(
                        "{regime}: {}/{} (e.g. {} from {:?}: converged {}, limit {:?})",
                        r.passed,
                        r.trials,
                        first.params,
                        first.report.initial.coords(),
                        first.report.converged,
                        first.report.limit.map(|l| l.coords()),
                    ));
                }
            }
            Err(e) => {
                ok = false;
                notes.push(format!("{regime}: {e}"));
            }
        }
    }
    let detail = if notes.is_empty() {
        format!("{} regimes, {total} trials, all agree", Regime::proven().count())
    } else {
        notes.join("; ")
    };
    outcome(ok, detail)
}

fn c8_sweep() -> Outcome {
    let p = ModelParams::new(0.1, 0.2, 0.5, 0.0, 1.0, 0.3);
    let r = grid_sweep(&p, 50, 1e-8).unwrap();
    outcome(
        r.is_complete() && !r.near_fixed.is_empty(),
        format!(
            "{} grid points, {} near-fixed, {} unexplained",
            r.grid_points,
            r.near_fixed.len(),
            r.unexplained.len()
        ),
    )
}

fn c9_scans() -> Outcome {
    let opts = LimitOptions::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for which in [Conjecture::NoReinfection, Conjecture::FullModel] {
        let grid = ScanGrid::new(which, 5, 5);
        let seed = 2024;
        let a = conjecture_scan(which, &grid, seed, &opts).unwrap();
        let b = conjecture_scan(which, &grid, seed, &opts).unwrap();
        let deterministic = a == b;
        let justified = a.records.iter().all(|r| match (&r.report, r.verdict) {
            (None, v) => v == Verdict::Inadmissible,
            (Some(rep), Verdict::Match) => rep.converged && rep.matched() == Some(true),
            (Some(rep), Verdict::Counterexample) => rep.converged && rep.matched() == Some(false),
            (Some(rep), Verdict::Inconclusive) => !rep.converged,
            (Some(rep), Verdict::NoPrediction) => rep.predicted.is_none(),
            (Some(_), Verdict::Inadmissible) => false,
        });
        // counterexamples must replay from (seed, cell, point) alone
        let reproducible = a.counterexamples().all(|r| {
            let s0 = cell_initial_points(seed, r.cell, grid.initial_points)[r.point];
            detect_limit(s0, &r.params, &opts).ok().map(|rep| rep.limit) == r.report.as_ref().map(|rep| rep.limit)
        });
        ok &= deterministic && justified && reproducible;
        parts.push(format!(
            "conjecture {}: {} cells, {} match, {} counterexample, {} inconclusive, {} no-prediction, {} inadmissible cells; deterministic {deterministic}, justified {justified}",
            which.index(),
            a.cells,
            a.matches,
            a.counterexamples,
            a.inconclusive,
            a.no_prediction,
            a.inadmissible_cells
        ));
    }
    outcome(ok, parts.join("; "))
}

fn c10_jacobian() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let h = 1e-6;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let p = random_params(&mut rng);
        let s = random_point(&mut rng);
        let j = jacobian(&s, &p);
        for col in 0..4 {
            let mut plus = s.coords();
            let mut minus = s.coords();
            plus[col] += h;
            minus[col] -= h;
            let (fp, fm) = (v_oracle(&p, plus), v_oracle(&p, minus));
            for row in 0..4 {
                let fd = (fp[row] - fm[row]) / (2.0 * h);
                worst = worst.max((fd - j.entries()[row][col]).abs());
            }
        }
    }
    outcome(worst <= 1e-5, format!("max |J - central difference| {worst:.1e}"))
}

fn main() {
    let mut all = true;
    let mut report = |n: u32, name: &str, run: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let o = run();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!(
            "{tag} criterion {n:>2} {name}: {} [{:.2}s]",
            o.detail,
            start.elapsed().as_secs_f64()
        );
        all &= o.passed;
    };
    report(1, "interior quadratic", &c1_interior_quadratic);
    report(2, "reference run limits", &c2_reference_runs);
    report(3, "lambda1 classification table", &c3_lambda1_table);
    let (c4, c5) = c4_c5_draws();
    report(4, "QSO equivalence", &|| outcome(c4.passed, c4.detail.clone()));
    report(5, "simplex invariance", &|| outcome(c5.passed, c5.detail.clone()));
    report(6, "conjugacy", &c6_conjugacy);
    report(7, "proposition suites", &c7_propositions);
    report(8, "fixed-point grid sweep", &c8_sweep);
    report(9, "conjecture scans", &c9_scans);
    report(10, "Jacobian finite differences", &c10_jacobian);
    if !all {
        std::process::exit(1);
    }
}
