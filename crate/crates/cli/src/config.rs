//! Run configuration: a flat `key=value` file, figure presets and flag
//! overrides, echoed back as `# key=value` header lines.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use sisi::{LimitOptions, ModelParams, SimplexPoint};

use crate::presets::Preset;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub init: Option<[f64; 4]>,
    pub max_iter: u64,
    pub tol_step: f64,
    pub tol_fix: f64,
    pub seed: u64,
    pub grid: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let limits = LimitOptions::default();
        Self {
            params: ModelParams::default(),
            init: None,
            max_iter: limits.max_iter,
            tol_step: limits.tol_step,
            tol_fix: limits.tol_fix,
            seed: 0,
            grid: 5,
        }
    }
}

impl RunConfig {
    pub fn from_preset(p: &Preset) -> Self {
        Self {
            params: p.params,
            init: p.init,
            ..Self::default()
        }
    }

    pub fn limits(&self) -> LimitOptions {
        LimitOptions {
            max_iter: self.max_iter,
            tol_step: self.tol_step,
            tol_fix: self.tol_fix,
        }
    }

    pub fn initial_point(&self) -> Result<SimplexPoint> {
        let c = self.init.context("no initial point: pass --init x,u,y,v or a figure preset")?;
        SimplexPoint::from_array(c).map_err(|e| anyhow::Error::new(e).context("bad initial point"))
    }

    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        let value = value.trim();
        match key {
            "init" => self.init = Some(parse_point(value)?),
            "max_iter" => self.max_iter = parse_num(key, value)?,
            "tol_step" => self.tol_step = parse_num(key, value)?,
            "tol_fix" => self.tol_fix = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "grid" => self.grid = parse_num(key, value)?,
            _ => {
                let v: f64 = parse_num(key, value)?;
                if !self.params.set(key, v) {
                    bail!("unknown key `{key}`");
                }
            }
        }
        Ok(())
    }

    /// Applies a comma-separated `k=v,k=v` list.
    pub fn set_list(&mut self, list: &str) -> Result<()> {
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .with_context(|| format!("expected key=value, got `{item}`"))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    /// Reads a config file. Blank lines are skipped; `#` lines are comments
    /// unless they hold a `key=value` pair, so an echoed header reads back.
    pub fn load(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        self.apply_text(&text)
            .with_context(|| format!("in config {}", path.display()))
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let (body, commented) = match line.strip_prefix('#') {
                Some(rest) => (rest.trim(), true),
                None => (line, false),
            };
            match body.split_once('=') {
                Some((k, v)) => {
                    let res = self.set(k, v);
                    if !commented {
                        res.with_context(|| format!("line {}", n + 1))?;
                    }
                }
                None if commented => {}
                None => bail!("line {}: expected key=value, got `{line}`", n + 1),
            }
        }
        Ok(())
    }

    /// Canonical `# key=value` header. Floats use the shortest
    /// representation that parses back to the same value.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        for (name, v) in self.params.named_values() {
            let _ = writeln!(out, "# {name}={v:?}");
        }
        if let Some([x, u, y, v]) = self.init {
            let _ = writeln!(out, "# init={x:?},{u:?},{y:?},{v:?}");
        }
        let _ = writeln!(out, "# max_iter={}", self.max_iter);
        let _ = writeln!(out, "# tol_step={:?}", self.tol_step);
        let _ = writeln!(out, "# tol_fix={:?}", self.tol_fix);
        let _ = writeln!(out, "# seed={}", self.seed);
        let _ = writeln!(out, "# grid={}", self.grid);
        out
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| anyhow::anyhow!("bad value `{value}` for `{key}`: {e}"))
}

pub fn parse_point(s: &str) -> Result<[f64; 4]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        bail!("expected four comma-separated coordinates x,u,y,v, got `{s}`");
    }
    let mut c = [0.0; 4];
    for (slot, p) in c.iter_mut().zip(&parts) {
        *slot = parse_num("init", p)?;
    }
    Ok(c)
}
