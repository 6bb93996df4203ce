//! Flat `key = value` run configuration.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::Kappa;
use crate::maximal::GridSpec;
use crate::phase::Variant;
use crate::quadrature::QuadratureSpec;
use crate::regression::geometric_ladder;

/// Every tunable of every experiment. Fields irrelevant to a given
/// experiment are ignored by it but still echoed in its report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub experiment: String,
    pub m: f64,
    pub s: f64,
    pub alpha: f64,
    pub q: f64,
    /// `inf` selects the vertical case in the summary calculators.
    pub kappa: String,
    pub theta: f64,
    pub r: f64,
    pub k: u32,
    pub k_min: u32,
    /// Minkowski dimension of the slope set; derived from `r` when unset.
    pub beta: Option<f64>,
    pub eps: f64,
    pub variant: String,
    /// `spatial`, `temporal` or `both` (sharpness-vertical); factory name
    /// for `propagate`.
    pub datum: String,
    pub lambda: f64,
    pub lambda_min: f64,
    pub lambda_ratio: f64,
    pub lambda_count: usize,
    /// Largest λ used with the temporal Knapp datum, whose frequencies sit
    /// near `λ²`.
    pub temporal_lambda_max: f64,
    pub x: f64,
    pub t: f64,
    pub nx: usize,
    pub nt: usize,
    pub per_octave: usize,
    pub t_base: usize,
    pub depth: usize,
    pub theta_base: usize,
    pub samples_per_component: usize,
    pub b_count: usize,
    /// Cells of the uniform x-grid in `bilinear-check`.
    pub cells: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub calculator: String,
    pub extended: bool,
    pub s_grid: String,
    pub m_grid: String,
    pub alpha_grid: String,
    pub q_grid: String,
    pub beta_grid: String,
    pub kappa_grid: String,
    /// Overrides the experiment's default slope tolerance when set.
    pub tolerance: Option<f64>,
    /// Enables jitter of x sample points inside their cells.
    pub seed: Option<u64>,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let g = GridSpec::default();
        let qs = QuadratureSpec::default();
        Self {
            experiment: String::new(),
            m: 0.5,
            s: 0.0,
            alpha: 1.0,
            q: 2.0,
            kappa: "1".into(),
            theta: 1.0,
            r: 0.25,
            k: 6,
            k_min: 1,
            beta: None,
            eps: 0.05,
            variant: "vertical".into(),
            datum: "spatial".into(),
            lambda: 64.0,
            lambda_min: 16.0,
            lambda_ratio: 2.0,
            lambda_count: 7,
            temporal_lambda_max: 128.0,
            x: 0.0,
            t: 0.0,
            nx: 64,
            nt: 64,
            per_octave: 4,
            t_base: g.t_base,
            depth: g.depth,
            theta_base: g.theta_base,
            samples_per_component: 16,
            b_count: 7,
            cells: 2048,
            rel_tol: qs.rel_tol,
            abs_tol: qs.abs_tol,
            max_subdivisions: qs.max_subdivisions,
            calculator: "dim_bound_vertical".into(),
            extended: false,
            s_grid: String::new(),
            m_grid: String::new(),
            alpha_grid: String::new(),
            q_grid: String::new(),
            beta_grid: String::new(),
            kappa_grid: String::new(),
            tolerance: None,
            seed: None,
            out: std::env::var_os("CPL_OUT").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("cpl-out")),
        }
    }
}

/// Keys accepted by [`RunConfig::set`].
pub const KEYS: &[&str] = &[
    "experiment", "m", "s", "alpha", "q", "kappa", "theta", "r", "k", "k_min", "beta", "eps", "variant", "datum",
    "lambda", "lambda_min", "lambda_ratio", "lambda_count", "temporal_lambda_max", "x", "t", "nx", "nt",
    "per_octave", "t_base", "depth", "theta_base", "samples_per_component", "b_count", "cells", "rel_tol", "abs_tol",
    "max_subdivisions", "calculator", "extended", "s_grid", "m_grid", "alpha_grid", "q_grid", "beta_grid",
    "kappa_grid", "tolerance", "seed", "out",
];

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {v:?}")))
}

fn flag(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected a boolean, got {v:?}"))),
    }
}

impl RunConfig {
    pub fn for_experiment(name: &str) -> Self {
        Self {
            experiment: name.to_string(),
            ..Self::default()
        }
    }

    /// Set one key. Dashes in `key` are read as underscores.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let v = value.trim();
        match key.as_str() {
            "experiment" => self.experiment = v.to_string(),
            "m" => self.m = num(&key, v)?,
            "s" => self.s = num(&key, v)?,
            "alpha" => self.alpha = num(&key, v)?,
            "q" => self.q = num(&key, v)?,
            "kappa" => {
                v.parse::<Kappa>().map_err(|e| Error::Config(format!("kappa: {e}")))?;
                self.kappa = v.to_string();
            }
            "theta" => self.theta = num(&key, v)?,
            "r" => self.r = num(&key, v)?,
            "k" => self.k = num(&key, v)?,
            "k_min" => self.k_min = num(&key, v)?,
            "beta" => self.beta = Some(num(&key, v)?),
            "eps" => self.eps = num(&key, v)?,
            "variant" => {
                v.parse::<Variant>().map_err(|e| Error::Config(format!("variant: {e}")))?;
                self.variant = v.to_string();
            }
            "datum" => self.datum = v.to_string(),
            "lambda" => self.lambda = num(&key, v)?,
            "lambda_min" => self.lambda_min = num(&key, v)?,
            "lambda_ratio" => self.lambda_ratio = num(&key, v)?,
            "lambda_count" => self.lambda_count = num(&key, v)?,
            "temporal_lambda_max" => self.temporal_lambda_max = num(&key, v)?,
            "x" => self.x = num(&key, v)?,
            "t" => self.t = num(&key, v)?,
            "nx" => self.nx = num(&key, v)?,
            "nt" => self.nt = num(&key, v)?,
            "per_octave" => self.per_octave = num(&key, v)?,
            "t_base" => self.t_base = num(&key, v)?,
            "depth" => self.depth = num(&key, v)?,
            "theta_base" => self.theta_base = num(&key, v)?,
            "samples_per_component" => self.samples_per_component = num(&key, v)?,
            "b_count" => self.b_count = num(&key, v)?,
            "cells" => self.cells = num(&key, v)?,
            "rel_tol" => self.rel_tol = num(&key, v)?,
            "abs_tol" => self.abs_tol = num(&key, v)?,
            "max_subdivisions" => self.max_subdivisions = num(&key, v)?,
            "calculator" => self.calculator = v.to_string(),
            "extended" => self.extended = flag(&key, v)?,
            "s_grid" => self.s_grid = v.to_string(),
            "m_grid" => self.m_grid = v.to_string(),
            "alpha_grid" => self.alpha_grid = v.to_string(),
            "q_grid" => self.q_grid = v.to_string(),
            "beta_grid" => self.beta_grid = v.to_string(),
            "kappa_grid" => self.kappa_grid = v.to_string(),
            "tolerance" => self.tolerance = Some(num(&key, v)?),
            "seed" => self.seed = Some(num(&key, v)?),
            "out" => self.out = PathBuf::from(v),
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Apply a `key = value` file. Blank lines and `#` comments are skipped.
    pub fn apply_str(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        self.apply_str(&text)
    }

    pub fn ladder(&self) -> Result<Vec<f64>> {
        if self.lambda_count < 5 {
            return Err(Error::Config("lambda_count must be at least 5".into()));
        }
        if !(self.lambda_min >= 1.0 && self.lambda_ratio > 1.0) {
            return Err(Error::Config("need lambda_min >= 1 and lambda_ratio > 1".into()));
        }
        Ok(geometric_ladder(self.lambda_min, self.lambda_ratio, self.lambda_count))
    }

    pub fn quadrature(&self) -> Result<QuadratureSpec> {
        let spec = QuadratureSpec {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_subdivisions: self.max_subdivisions,
            ..QuadratureSpec::default()
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn grid(&self) -> Result<GridSpec> {
        let g = GridSpec {
            t_base: self.t_base,
            depth: self.depth,
            theta_base: self.theta_base,
            ..GridSpec::default()
        };
        g.validate()?;
        Ok(g)
    }

    pub fn kappa_value(&self) -> Result<Kappa> {
        self.kappa.parse().map_err(|e| Error::Config(format!("kappa: {e}")))
    }

    pub fn finite_kappa(&self) -> Result<f64> {
        match self.kappa_value()? {
            Kappa::Finite(k) => Ok(k),
            Kappa::Infinite => Err(Error::Config("this experiment needs a finite kappa".into())),
        }
    }

    /// `β` as configured, else `log 2 / log(1/r)`.
    pub fn beta_value(&self) -> f64 {
        self.beta.unwrap_or_else(|| 2f64.ln() / (1.0 / self.r).ln())
    }

    pub fn variant_value(&self) -> Result<Variant> {
        self.variant.parse().map_err(|e| Error::Config(format!("variant: {e}")))
    }
}

/// `lo:hi:step`, endpoints included up to rounding, or a single number.
pub fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    match parts.as_slice() {
        [one] => Ok(vec![num("grid", one)?]),
        [lo, hi, step] => {
            let (lo, hi, step): (f64, f64, f64) = (num("grid", lo)?, num("grid", hi)?, num("grid", step)?);
            if !(step > 0.0 && hi >= lo) {
                return Err(Error::Config(format!("bad range {spec:?}")));
            }
            let n = ((hi - lo) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| lo + step * i as f64).collect())
        }
        _ => Err(Error::Config(format!("bad range {spec:?}: expected lo:hi:step"))),
    }
}
