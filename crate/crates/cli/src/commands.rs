use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::json;
use sisi::conjugacy::{classify_1d_fixed_points, verify_conjugacy};
use sisi::dynamics::{
    conjecture_scan, detect_limit, fg_curves, verify_proposition, Conjecture, LimitReport, Regime,
    ScanGrid,
};
use sisi::fixpoints::fixed_point_set;
use sisi::model::validate_params;
use sisi::stability::{classify_lambda1, classify_point};
use sisi::tensor::build_tensor;
use sisi::{Error, EvolutionOperator, SimplexPoint};

use crate::config::{parse_point, RunConfig};
use crate::presets::{preset, PresetKind};
use crate::{Cli, Command, Format};

/// How a command that ran to completion turned out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    /// The run worked but the answer is negative: inadmissible parameters,
    /// a mismatch, a failed check.
    Negative,
    NotConverged,
}

/// Exit code for an error that stopped a command.
pub fn error_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::NegativeParameter { .. })
        | Some(Error::InvalidPoint(_))
        | Some(Error::DegenerateInput(_)) => 2,
        Some(Error::NonConvergence { .. }) => 3,
        Some(_) => 1,
        None => 2,
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = build_config(cli)?;
    let mut out = cfg.echo();
    let outcome = match &cli.command {
        Command::Validate => validate(&cfg, cli.common.format, &mut out)?,
        Command::Simulate { stride } => {
            if let Some(n) = cli.common.figure {
                if preset(n).map(|p| p.kind) == Some(PresetKind::Curves) {
                    bail!(
                        "figure {n} shows the f/g curves, not a trajectory; run `sisi curves --figure {n}`"
                    );
                }
            }
            simulate(&cfg, *stride, cli.common.format, &mut out)?
        }
        Command::Fixpoints => fixpoints(&cfg, &mut out)?,
        Command::Classify => classify(&cfg, &mut out)?,
        Command::Conjugacy { points } => conjugacy(&cfg, *points, &mut out)?,
        Command::Scan { which, points } => scan(&cfg, *which, *points, &mut out)?,
        Command::TensorDump => {
            out.push_str(&build_tensor(&cfg.params)?.to_csv());
            Outcome::Ok
        }
        Command::Curves { samples, x_max } => curves(&cfg, *samples, *x_max, &mut out)?,
        Command::Verify { regime, trials } => verify(&cfg, regime, *trials, &mut out)?,
        Command::Regimes => {
            for r in Regime::ALL {
                let kind = if r.conjectural() { "conjectural" } else { "proven" };
                let _ = writeln!(out, "{r}\t{kind}");
            }
            Outcome::Ok
        }
    };
    emit(cli, &out)?;
    Ok(outcome)
}

/// Preset, then config file, then individual flags.
fn build_config(cli: &Cli) -> Result<RunConfig> {
    let c = &cli.common;
    let mut cfg = match c.figure {
        Some(n) => RunConfig::from_preset(
            &preset(n).with_context(|| format!("no figure {n}; figures are 1-6"))?,
        ),
        None => RunConfig::default(),
    };
    if let Some(path) = &c.config {
        cfg.load(path)?;
    }
    if let Some(list) = &c.params {
        cfg.set_list(list)?;
    }
    if let Some(init) = &c.init {
        cfg.init = Some(parse_point(init)?);
    }
    if let Some(v) = c.seed {
        cfg.seed = v;
    }
    if let Some(v) = c.max_iter {
        cfg.max_iter = v;
    }
    if let Some(v) = c.tol_step {
        cfg.tol_step = v;
    }
    if let Some(v) = c.tol_fix {
        cfg.tol_fix = v;
    }
    if let Some(v) = c.grid {
        cfg.grid = v;
    }
    Ok(cfg)
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.common.out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display())),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn validate(cfg: &RunConfig, format: Format, out: &mut String) -> Result<Outcome> {
    let report = validate_params(&cfg.params)?;
    match format {
        Format::Json => {
            let v = json!({
                "admissible": report.is_admissible(),
                "violations": report.violations,
            });
            let _ = writeln!(out, "{v}");
        }
        Format::Text => {
            let _ = writeln!(out, "admissible: {}", if report.is_admissible() { "yes" } else { "no" });
            for v in &report.violations {
                let _ = writeln!(out, "violation: {v}");
            }
        }
    }
    Ok(if report.is_admissible() { Outcome::Ok } else { Outcome::Negative })
}

fn coords_csv(s: &SimplexPoint) -> String {
    let c = s.coords();
    format!("{:.16e},{:.16e},{:.16e},{:.16e}", c[0], c[1], c[2], c[3])
}

fn simulate(cfg: &RunConfig, stride: u64, format: Format, out: &mut String) -> Result<Outcome> {
    if stride == 0 {
        return Err(Error::DegenerateInput("stride must be at least 1".into()).into());
    }
    let s0 = cfg.initial_point()?;
    let report = detect_limit(s0, &cfg.params, &cfg.limits())?;
    match format {
        Format::Json => {
            let _ = writeln!(out, "{}", serde_json::to_string(&report)?);
        }
        Format::Text => {
            let op = EvolutionOperator::new(cfg.params)?;
            out.push_str("n,x,u,y,v\n");
            let mut s = s0;
            for n in 0..=report.iterations {
                if n % stride == 0 || n == report.iterations {
                    let _ = writeln!(out, "{n},{}", coords_csv(&s));
                }
                if n < report.iterations {
                    s = op.apply(&s);
                }
            }
            summarize(&report, out);
        }
    }
    Ok(if !report.converged {
        Outcome::NotConverged
    } else if report.matched() == Some(false) {
        Outcome::Negative
    } else {
        Outcome::Ok
    })
}

fn summarize(r: &LimitReport, out: &mut String) {
    let _ = writeln!(
        out,
        "# converged={} iterations={} step={:e} max_sum_drift={:e}",
        r.converged, r.iterations, r.step_size, r.max_sum_drift
    );
    match (&r.limit, r.snapped_to) {
        (Some(l), Some(label)) => {
            let _ = writeln!(out, "# limit={} ({})", label.ascii(), coords_csv(l));
        }
        (Some(l), None) => {
            let _ = writeln!(out, "# limit=({})", coords_csv(l));
        }
        (None, _) => {
            let _ = writeln!(out, "# limit=none (last iterate {})", coords_csv(&r.final_point));
        }
    }
    match (&r.predicted, &r.comparison) {
        (Some(pred), cmp) => {
            let kind = if pred.conjectural { "conjectural" } else { "proven" };
            let _ = writeln!(out, "# predicted={} [{}, {kind}]", pred.target, pred.regime);
            if let Some(cmp) = cmp {
                let _ = writeln!(out, "# match={} deviation={:e}", cmp.matched, cmp.deviation);
                for rc in &cmp.readings {
                    let _ = writeln!(
                        out,
                        "# reading {}: observed={:.6} holds={}",
                        rc.name, rc.observed, rc.holds
                    );
                }
            }
        }
        (None, _) => out.push_str("# predicted=none\n"),
    }
}

fn fixpoints(cfg: &RunConfig, out: &mut String) -> Result<Outcome> {
    let set = fixed_point_set(&cfg.params)?;
    out.push_str("label,x,u,y,v,residual,family\n");
    for fp in &set {
        let family = fp.family.map(|f| f.describe()).unwrap_or_default();
        for s in &fp.representatives {
            let _ = writeln!(
                out,
                "{},{},{:.3e},{family}",
                fp.label.ascii(),
                coords_csv(s),
                fp.residual
            );
        }
    }
    Ok(Outcome::Ok)
}

fn classify(cfg: &RunConfig, out: &mut String) -> Result<Outcome> {
    let rule = classify_lambda1(&cfg.params)?;
    let _ = writeln!(out, "# lambda1 by parameter rule: {rule}");
    out.push_str("label,class,spectral_radius,scope,eigenvalues\n");
    for fp in fixed_point_set(&cfg.params)? {
        let Some(s) = fp.point() else { continue };
        let r = classify_point(&s, &cfg.params)?;
        let eig: Vec<String> = r
            .eigenvalues
            .iter()
            .map(|z| format!("{:.12}{:+.12}i", z.re, z.im))
            .collect();
        let scope = serde_json::to_value(r.scope)?;
        let _ = writeln!(
            out,
            "{},{},{:.12},{},{}",
            fp.label.ascii(),
            r.class,
            r.spectral_radius,
            scope.as_str().unwrap_or_default(),
            eig.join(";")
        );
    }
    Ok(Outcome::Ok)
}

fn conjugacy(cfg: &RunConfig, points: usize, out: &mut String) -> Result<Outcome> {
    let c = verify_conjugacy(&cfg.params, points)?;
    let m = &c.map;
    let _ = writeln!(out, "mu={:?}", m.mu);
    let _ = writeln!(out, "h(x)={:?}*x+{:?}", m.p, m.q);
    let _ = writeln!(out, "grid={} sup_norm={:e}", c.grid_size, c.sup_norm);
    let _ = writeln!(out, "mu_in_convergent_range={}", c.mu_in_range);
    for (name, fp) in ["p1", "p2"].iter().zip(classify_1d_fixed_points(&cfg.params)?) {
        let _ = writeln!(
            out,
            "{name}={:?} derivative={:?} {}",
            fp.value, fp.derivative, fp.class
        );
    }
    let _ = writeln!(out, "{}", if c.pass { "PASS" } else { "FAIL" });
    Ok(if c.pass { Outcome::Ok } else { Outcome::Negative })
}

fn scan(cfg: &RunConfig, which: u8, points: usize, out: &mut String) -> Result<Outcome> {
    let conj = Conjecture::from_index(which as u32)
        .ok_or_else(|| anyhow!(Error::DegenerateInput(format!("no conjecture {which}; use 1 or 2"))))?;
    let grid = ScanGrid::new(conj, cfg.grid, points);
    let report = conjecture_scan(conj, &grid, cfg.seed, &cfg.limits())?;
    for rec in &report.records {
        let _ = writeln!(out, "{}", serde_json::to_string(rec)?);
    }
    let summary = json!({
        "summary": {
            "conjecture": which,
            "seed": report.seed,
            "cells": report.cells,
            "records": report.records.len(),
            "matches": report.matches,
            "counterexamples": report.counterexamples,
            "inconclusive": report.inconclusive,
            "no_prediction": report.no_prediction,
            "inadmissible": report.inadmissible_cells,
        }
    });
    let _ = writeln!(out, "{summary}");
    Ok(if report.counterexamples > 0 { Outcome::Negative } else { Outcome::Ok })
}

fn curves(cfg: &RunConfig, samples: usize, x_max: Option<f64>, out: &mut String) -> Result<Outcome> {
    let c = fg_curves(&cfg.params, samples, x_max)?;
    out.push_str(&c.to_csv());
    let _ = writeln!(out, "# g(0)={:?} f(0)={:?} case={}", c.g_at_zero, cfg.params.b, serde_json::to_value(c.case)?.as_str().unwrap_or_default());
    let _ = writeln!(out, "# asymptote={:?} slope_f={:?} slope_g(0)={:?}", c.asymptote, c.slope_f, c.slope_g_at_zero);
    let xs: Vec<String> = c.crossings.iter().map(|x| format!("{x:?}")).collect();
    let _ = writeln!(out, "# crossings={}", xs.join(";"));
    Ok(Outcome::Ok)
}

fn verify(cfg: &RunConfig, regime: &str, trials: usize, out: &mut String) -> Result<Outcome> {
    let regimes: Vec<Regime> = if regime == "all" {
        Regime::proven().collect()
    } else {
        vec![Regime::from_id(regime).ok_or_else(|| {
            anyhow!(Error::DegenerateInput(format!(
                "unknown regime `{regime}`; see `sisi regimes`"
            )))
        })?]
    };
    let mut outcome = Outcome::Ok;
    out.push_str("regime,trials,passed,draws,worst_deviation,status\n");
    for r in regimes {
        let rep = verify_proposition(r, trials, cfg.seed, &cfg.limits())?;
        let status = if rep.all_passed() { "PASS" } else { "FAIL" };
        if !rep.all_passed() {
            outcome = Outcome::Negative;
        }
        let _ = writeln!(
            out,
            "\"{r}\",{},{},{},{:e},{status}",
            rep.trials, rep.passed, rep.draws, rep.worst_deviation
        );
    }
    Ok(outcome)
}
