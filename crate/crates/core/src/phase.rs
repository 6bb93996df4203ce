//! Frequency splits, kernel envelopes and phase-derivative lower bounds.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{s_star_curve, s_star_vertical};
use crate::quadrature::{Interval, QuadratureSpec};
use crate::regression::{fit_loglog, LogLogFit};
use crate::spectral::{kernel_k, BAND_HI, BAND_LO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Vertical,
    Curve,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vertical" => Ok(Variant::Vertical),
            "curve" => Ok(Variant::Curve),
            other => Err(Error::param("variant", format!("unknown variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeParams {
    pub lambda: f64,
    pub m: f64,
    pub alpha: f64,
    pub q: f64,
    pub eps: f64,
    pub s_star: f64,
    pub variant: Variant,
    /// Curve exponent used by the curve variant.
    pub kappa: f64,
    /// Curve tilt used by the curve variant.
    pub theta: f64,
}

impl EnvelopeParams {
    pub fn vertical(lambda: f64, m: f64, alpha: f64, q: f64, eps: f64) -> Result<Self> {
        Self::build(lambda, m, alpha, q, eps, Variant::Vertical)
    }

    pub fn curve(lambda: f64, m: f64, alpha: f64, q: f64, eps: f64) -> Result<Self> {
        Self::build(lambda, m, alpha, q, eps, Variant::Curve)
    }

    pub fn new(variant: Variant, lambda: f64, m: f64, alpha: f64, q: f64, eps: f64) -> Result<Self> {
        Self::build(lambda, m, alpha, q, eps, variant)
    }

    fn build(lambda: f64, m: f64, alpha: f64, q: f64, eps: f64, variant: Variant) -> Result<Self> {
        if !(lambda >= 1.0 && lambda.is_finite()) {
            return Err(Error::param("lambda", "must be a finite real >= 1"));
        }
        if !(m > 0.0 && m < 1.0) {
            return Err(Error::param("m", format!("{m} is not in (0, 1)")));
        }
        if !(0.0..1.0).contains(&eps) {
            return Err(Error::param("eps", "must lie in [0, 1)"));
        }
        let s_star = match variant {
            Variant::Vertical => s_star_vertical(m, alpha, q)?,
            Variant::Curve => s_star_curve(m, alpha, q)?,
        };
        Ok(Self {
            lambda,
            m,
            alpha,
            q,
            eps,
            s_star,
            variant,
            kappa: 1.0,
            theta: 1.0,
        })
    }

    pub fn with_lambda(self, lambda: f64) -> Result<Self> {
        let mut p = Self::build(lambda, self.m, self.alpha, self.q, self.eps, self.variant)?;
        p.kappa = self.kappa;
        p.theta = self.theta;
        Ok(p)
    }

    pub fn with_curve(mut self, kappa: f64, theta: f64) -> Result<Self> {
        if !(kappa >= 1.0 && kappa.is_finite()) {
            return Err(Error::param("kappa", "the curve envelope needs kappa >= 1"));
        }
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(Error::param("theta", "must be a nonnegative real"));
        }
        self.kappa = kappa;
        self.theta = theta;
        Ok(self)
    }

    /// Radius `λ^{−q s_*/α}` of the indicator region.
    pub fn indicator_edge(&self) -> f64 {
        self.lambda.powf(-self.q * self.s_star / self.alpha)
    }
}

/// The two frequency regions of `(1/2, 2)`; either may be empty.
///
/// `V₁ = (1/2, ξ_b]` and `V₂ = (ξ_b, 2)` where `ξ_b` solves the defining
/// equality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencySplit {
    pub boundary: Option<f64>,
    pub v1: Option<Interval>,
    pub v2: Option<Interval>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    V1,
    V2,
}

impl FrequencySplit {
    pub fn region(&self, r: Region) -> Option<Interval> {
        match r {
            Region::V1 => self.v1,
            Region::V2 => self.v2,
        }
    }

    pub fn classify(&self, xi: f64) -> Region {
        match self.boundary {
            Some(b) if xi <= b => Region::V1,
            _ => Region::V2,
        }
    }
}

/// Direct evaluation of the defining inequality of `V₁`.
pub fn in_v1(params: &EnvelopeParams, x: f64, t: f64, xi: f64) -> bool {
    let lhs = 2.0 * params.lambda.powf(params.m) * t.abs() * xi.powf(params.m - 1.0);
    let rhs = params.lambda.powf(4.0 * params.s_star) * x.abs().powf(4.0 * params.alpha / params.q);
    lhs >= rhs
}

pub fn split_vertical(params: &EnvelopeParams, x: f64, t: f64) -> Result<FrequencySplit> {
    if x == 0.0 {
        return Err(Error::DegeneratePoint);
    }
    let band = Interval {
        lo: BAND_LO,
        hi: BAND_HI,
    };
    if t == 0.0 {
        return Ok(FrequencySplit {
            boundary: None,
            v1: None,
            v2: Some(band),
        });
    }
    let rhs = params.lambda.powf(4.0 * params.s_star) * x.abs().powf(4.0 * params.alpha / params.q);
    // ξ^{m−1} ≥ rhs / (2λ^m|t|) with ξ^{m−1} decreasing.
    let level = rhs / (2.0 * params.lambda.powf(params.m) * t.abs());
    let boundary = level.powf(1.0 / (params.m - 1.0));
    let v1 = (boundary > BAND_LO).then(|| Interval {
        lo: BAND_LO,
        hi: boundary.min(BAND_HI),
    });
    let v2 = (boundary < BAND_HI).then(|| Interval {
        lo: boundary.max(BAND_LO),
        hi: BAND_HI,
    });
    Ok(FrequencySplit {
        boundary: Some(boundary),
        v1,
        v2,
    })
}

/// Tag of a difference pair `(dx, dt)` along a curve.
pub fn split_curve(kappa: f64, dx: f64, dt: f64) -> Region {
    if (kappa + 2.0) * dt.abs() <= dx.abs() {
        Region::V1
    } else {
        Region::V2
    }
}

fn envelope(params: &EnvelopeParams, x: f64, exponent: f64) -> f64 {
    let edge = params.indicator_edge();
    let ax = x.abs();
    let indicator = if ax <= edge { 1.0 } else { 0.0 };
    // Inside the indicator region the singular term is frozen at the edge.
    let tail = params.lambda.powf(-2.0 * params.s_star + params.eps) * ax.max(edge).powf(exponent);
    params.lambda * (indicator + tail)
}

/// `λ(χ_{|x|≤λ^{−qs_*/α}} + λ^{−2s_*+ε}|x|^{−2α/q+ε})`.
pub fn envelope_j_vertical(params: &EnvelopeParams, x: f64) -> f64 {
    envelope(params, x, -2.0 * params.alpha / params.q + params.eps)
}

/// `λ(χ_{|x|≤λ^{−qs_*/α}} + λ^{−2s_*+ε}|x|^{−2s_*+ε})`.
pub fn envelope_j_curve(params: &EnvelopeParams, x: f64) -> f64 {
    envelope(params, x, -2.0 * params.s_star + params.eps)
}

pub fn envelope_j(params: &EnvelopeParams, x: f64) -> f64 {
    match params.variant {
        Variant::Vertical => envelope_j_vertical(params, x),
        Variant::Curve => envelope_j_curve(params, x),
    }
}

/// Minima of `|φ′|` and `|φ″|` over a sampled region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeMin {
    pub first: f64,
    pub second: f64,
}

fn scan<F>(region: Interval, samples: usize, derivs: F) -> DerivativeMin
where
    F: Fn(f64) -> (f64, f64),
{
    let n = samples.max(2);
    let mut first = f64::INFINITY;
    let mut second = f64::INFINITY;
    for i in 0..n {
        let xi = region.lo + region.width() * i as f64 / (n - 1) as f64;
        let (d1, d2) = derivs(xi);
        first = first.min(d1.abs());
        second = second.min(d2.abs());
    }
    DerivativeMin { first, second }
}

/// Vertical-line phase `φ(ξ) = λxξ + λ^m t ξ^m` scanned over `region`.
pub fn phase_derivative_min_vertical(
    params: &EnvelopeParams,
    region: Option<Interval>,
    x: f64,
    t: f64,
    samples: usize,
) -> Result<DerivativeMin> {
    let region = region.ok_or(Error::EmptyRegion)?;
    let (l, m) = (params.lambda, params.m);
    let lm = l.powf(m);
    Ok(scan(region, samples, |xi| {
        (
            l * x + m * lm * t * xi.powf(m - 1.0),
            m * (m - 1.0) * lm * t * xi.powf(m - 2.0),
        )
    }))
}

/// Curve phase `φ(ξ) = λ(dx − θ(t^κ − t′^κ))ξ + λ^m(t − t′)ξ^m` scanned over
/// the band; `dx = x − x′`.
pub fn phase_derivative_min_curve(
    params: &EnvelopeParams,
    dx: f64,
    t: f64,
    t_prime: f64,
    samples: usize,
) -> Result<DerivativeMin> {
    let (l, m) = (params.lambda, params.m);
    let lm = l.powf(m);
    let lin = l * (dx - params.theta * (t.powf(params.kappa) - t_prime.powf(params.kappa)));
    let dt = t - t_prime;
    let band = Interval {
        lo: BAND_LO,
        hi: BAND_HI,
    };
    Ok(scan(band, samples, |xi| {
        (
            lin + m * lm * dt * xi.powf(m - 1.0),
            m * (m - 1.0) * lm * dt * xi.powf(m - 2.0),
        )
    }))
}

/// Fitted constants of the vertical-line derivative bounds over a sample of
/// configurations `(λ, x, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeConstants {
    /// Best `c` with `min_{V₂}|φ′| ≥ c·λ|x|` on every sampled configuration.
    pub c_first: f64,
    pub cv_first: f64,
    pub count_first: usize,
    /// Best `c′` with `min_{V₁}|φ″| ≥ c′·λ^{4s_*}|x|^{4α/q}`.
    pub c_second: f64,
    pub cv_second: f64,
    pub count_second: usize,
}

fn min_and_cv(v: &[f64]) -> (f64, f64) {
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    (min, var.sqrt() / mean)
}

pub fn fit_derivative_constants(
    template: &EnvelopeParams,
    configs: &[(f64, f64, f64)],
    samples: usize,
) -> Result<DerivativeConstants> {
    let mut first = Vec::new();
    let mut second = Vec::new();
    for &(lambda, x, t) in configs {
        let p = template.with_lambda(lambda)?;
        if x.abs() < p.indicator_edge() {
            continue;
        }
        let split = split_vertical(&p, x, t)?;
        if split.v2.is_some() {
            let d = phase_derivative_min_vertical(&p, split.v2, x, t, samples)?;
            first.push(d.first / (lambda * x.abs()));
        }
        if split.v1.is_some() {
            let d = phase_derivative_min_vertical(&p, split.v1, x, t, samples)?;
            let scale = lambda.powf(4.0 * p.s_star) * x.abs().powf(4.0 * p.alpha / p.q);
            second.push(d.second / scale);
        }
    }
    let (c_first, cv_first) = min_and_cv(&first);
    let (c_second, cv_second) = min_and_cv(&second);
    Ok(DerivativeConstants {
        c_first,
        cv_first,
        count_first: first.len(),
        c_second,
        cv_second,
        count_second: second.len(),
    })
}

/// Per-λ outcome of an envelope check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeRow {
    pub lambda: f64,
    pub sup_ratio: f64,
    pub argmax_x: f64,
    pub argmax_t: f64,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub variant: Variant,
    pub rows: Vec<EnvelopeRow>,
    pub fit: LogLogFit,
    pub failures: usize,
}

/// Kernel argument for grid point `(x, t)`: the pair itself on vertical
/// lines; on the curve, `x` is the spatial difference and `t` the time
/// difference from base time 0, so the kernel sees `(x − θt^κ, t)`.
fn kernel_args(params: &EnvelopeParams, x: f64, t: f64) -> (f64, f64) {
    match params.variant {
        Variant::Vertical => (x, t),
        Variant::Curve => (x - params.theta * t.powf(params.kappa), t),
    }
}

/// Sup over the `(x, t)` grid `((i + 1/2)/nx, (j + 1/2)/nt)` of
/// `|K_λ|/J_λ`, for each λ of the ladder, with its log–log fit.
pub fn check_kernel_envelope(
    template: &EnvelopeParams,
    ladder: &[f64],
    nx: usize,
    nt: usize,
    spec: &QuadratureSpec,
) -> Result<EnvelopeReport> {
    if nx == 0 || nt == 0 {
        return Err(Error::param("grid", "needs at least one point per axis"));
    }
    let mut rows = Vec::with_capacity(ladder.len());
    let mut failures = 0;
    for &lambda in ladder {
        let p = template.with_lambda(lambda)?;
        let values: Vec<Option<(f64, f64, f64)>> = (0..nx * nt)
            .into_par_iter()
            .map(|k| {
                let x = (k / nt) as f64 / nx as f64 + 0.5 / nx as f64;
                let t = (k % nt) as f64 / nt as f64 + 0.5 / nt as f64;
                let (kx, kt) = kernel_args(&p, x, t);
                kernel_k(lambda, p.m, kx, kt, spec)
                    .ok()
                    .map(|k: Complex64| (k.norm() / envelope_j(&p, x), x, t))
            })
            .collect();
        let mut best = (0.0, f64::NAN, f64::NAN);
        let mut failed = 0;
        for v in values {
            match v {
                Some(r) if r.0 > best.0 => best = r,
                Some(_) => {}
                None => failed += 1,
            }
        }
        failures += failed;
        rows.push(EnvelopeRow {
            lambda,
            sup_ratio: best.0,
            argmax_x: best.1,
            argmax_t: best.2,
            failures: failed,
        });
    }
    let fit = fit_loglog(&rows.iter().map(|r| (r.lambda, r.sup_ratio)).collect::<Vec<_>>())?;
    Ok(EnvelopeReport {
        variant: template.variant,
        rows,
        fit,
        failures,
    })
}
