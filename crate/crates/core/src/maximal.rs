//! Maximal functions in time (and in the line slope) and their mixed norms.
//!
//! Suprema are taken over a uniform base grid plus local refinement around
//! the three largest coarse local maxima. Each refinement level adds
//! `2·8 + 1` points at an eighth of the previous spacing around the current
//! best point, so a deeper search only ever adds samples.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{lq_mu_norm_samples, AlphaMeasure, Curve, XGrid};
use crate::quadrature::QuadratureSpec;
use crate::spectral::{propagate, sobolev_norm, FourierDatum, PropagatorPlan};

const REFINE_FACTOR: usize = 8;
const CANDIDATES: usize = 3;
const MAX_FAILURE_RATE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Base samples on `[t_lo, t_hi]`, endpoints included.
    pub t_base: usize,
    pub depth: usize,
    /// Base samples per component of a slope set.
    pub theta_base: usize,
    pub t_lo: f64,
    pub t_hi: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            t_base: 257,
            depth: 3,
            theta_base: 9,
            t_lo: 0.0,
            t_hi: 1.0,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.depth < 2 {
            return Err(Error::param("depth", "refinement depth must be at least 2"));
        }
        if self.t_base < 3 {
            return Err(Error::param("t_base", "need at least 3 base samples"));
        }
        if self.theta_base < 2 {
            return Err(Error::param("theta_base", "need at least 2 samples per component"));
        }
        if !(self.t_lo >= 0.0 && self.t_lo < self.t_hi && self.t_hi.is_finite()) {
            return Err(Error::param("t_range", "need 0 <= t_lo < t_hi"));
        }
        Ok(())
    }

    /// Base samples needed for four per oscillation of `t ↦ u(γ(x,t), t)`,
    /// whose phase turns at rate at most `ξ_max·speed + ξ_max^m`.
    pub fn required_t_samples(max_frequency: f64, speed: f64, m: f64, span: f64) -> usize {
        let rate = max_frequency * speed + max_frequency.powf(m);
        ((4.0 * rate * span / std::f64::consts::TAU).ceil() as usize).saturating_add(1)
    }

    /// Samples per slope component of width `width` for four per
    /// oscillation of `θ ↦ u(x − θt, t)`.
    pub fn required_theta_samples(max_frequency: f64, t_hi: f64, width: f64) -> usize {
        ((4.0 * max_frequency * t_hi * width / std::f64::consts::TAU).ceil() as usize).saturating_add(1)
    }

    /// Same as `self` with both base grids raised to the sampling
    /// requirements of a line family.
    pub fn sized_for_lines(self, datum: &FourierDatum, set: &[[f64; 2]]) -> Self {
        let speed = set.iter().map(|iv| iv[0].abs().max(iv[1].abs())).fold(0.0, f64::max);
        let mut g = self.sized_for(datum, speed);
        for iv in set {
            g.theta_base = g
                .theta_base
                .max(Self::required_theta_samples(datum.max_frequency(), g.t_hi, iv[1] - iv[0]));
        }
        g
    }

    /// Same as `self` with the base grid raised to the sampling requirement.
    pub fn sized_for(mut self, datum: &FourierDatum, speed: f64) -> Self {
        let need = Self::required_t_samples(datum.max_frequency(), speed, datum.m, self.t_hi - self.t_lo);
        self.t_base = self.t_base.max(need);
        self
    }
}

/// The set of paths over which the supremum runs.
#[derive(Debug, Clone)]
pub enum Path {
    Curve(Curve),
    /// Lines `x − θt` with θ ranging over a list of closed intervals.
    Lines(Vec<[f64; 2]>),
}

impl Path {
    fn speed(&self, grid: &GridSpec) -> f64 {
        match self {
            Path::Curve(c) => c.time_speed(grid.t_lo, grid.t_hi),
            Path::Lines(set) => set.iter().map(|iv| iv[0].abs().max(iv[1].abs())).fold(0.0, f64::max),
        }
    }

    /// Conservative range of the spatial argument `γ(x, t)`.
    fn y_range(&self, x_range: (f64, f64), grid: &GridSpec) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut see = |y: f64| {
            if y.is_finite() {
                lo = lo.min(y);
                hi = hi.max(y);
            }
        };
        match self {
            Path::Lines(set) => {
                for iv in set {
                    for th in [iv[0], iv[1]] {
                        for x in [x_range.0, x_range.1] {
                            for t in [grid.t_lo, grid.t_hi] {
                                see(x - th * t);
                            }
                        }
                    }
                }
            }
            Path::Curve(c) => {
                const S: usize = 64;
                for i in 0..=S {
                    let x = x_range.0 + (x_range.1 - x_range.0) * i as f64 / S as f64;
                    for j in 0..=S {
                        let t = grid.t_lo + (grid.t_hi - grid.t_lo) * j as f64 / S as f64;
                        see(c.eval(x, t));
                    }
                }
                let pad = 0.05 * (hi - lo).max(1e-3);
                lo -= pad;
                hi += pad;
            }
        }
        (lo, hi)
    }
}

/// A datum prepared for repeated maximal-function evaluation.
#[derive(Debug, Clone)]
pub struct MaximalEngine {
    plan: PropagatorPlan,
    path: Path,
    grid: GridSpec,
}

struct Tally {
    failed: usize,
    total: usize,
}

impl Tally {
    fn new() -> Self {
        Self { failed: 0, total: 0 }
    }

    fn take(&mut self, v: f64) -> Option<f64> {
        self.total += 1;
        if v.is_finite() {
            Some(v)
        } else {
            self.failed += 1;
            None
        }
    }

    fn check(&self) -> Result<()> {
        if self.failed as f64 > MAX_FAILURE_RATE * self.total as f64 {
            return Err(Error::TooManyFailures {
                failed: self.failed,
                total: self.total,
            });
        }
        Ok(())
    }
}

/// Indices of the largest local maxima of `v` (at most `k`).
fn top_local_maxima(v: &[f64], k: usize) -> Vec<usize> {
    let n = v.len();
    let mut idx: Vec<usize> = (0..n)
        .filter(|&i| {
            v[i].is_finite()
                && (i == 0 || !(v[i - 1] > v[i]))
                && (i + 1 == n || !(v[i + 1] > v[i]))
        })
        .collect();
    idx.sort_by(|&a, &b| v[b].total_cmp(&v[a]).then(a.cmp(&b)));
    idx.truncate(k);
    idx
}

impl MaximalEngine {
    /// Engine valid for `x ∈ x_range`. Fails if the base t-grid is coarser
    /// than four samples per oscillation.
    pub fn new(datum: &FourierDatum, m: f64, path: Path, grid: GridSpec, x_range: (f64, f64)) -> Result<Self> {
        grid.validate()?;
        if let Path::Lines(set) = &path {
            if set.is_empty() || set.iter().any(|iv| !(iv[0] <= iv[1]) || !iv[0].is_finite() || !iv[1].is_finite()) {
                return Err(Error::param("thetas", "need a nonempty list of closed intervals"));
            }
        }
        let speed = path.speed(&grid);
        let need = GridSpec::required_t_samples(datum.max_frequency(), speed, m, grid.t_hi - grid.t_lo);
        if !speed.is_finite() || grid.t_base < need {
            return Err(Error::UndersampledGrid {
                axis: "t",
                have: grid.t_base,
                need: if speed.is_finite() { need } else { usize::MAX },
            });
        }
        let y = path.y_range(x_range, &grid);
        let plan = PropagatorPlan::new(datum, m, y, (grid.t_lo, grid.t_hi))?;
        Ok(Self { plan, path, grid })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// `u(y, t)` from the prepared quadrature.
    pub fn solution(&self, y: f64, t: f64) -> Complex64 {
        self.plan.eval(y, t)
    }

    fn base_times(&self) -> (f64, usize) {
        let n = self.grid.t_base;
        ((self.grid.t_hi - self.grid.t_lo) / (n - 1) as f64, n)
    }

    fn in_time(&self, t: f64) -> bool {
        t >= self.grid.t_lo && t <= self.grid.t_hi
    }

    /// `sup_t |u(γ(x,t), t)|` with the given times added to the search.
    pub fn maximal_in_time(&self, x: f64, inject: &[f64]) -> Result<f64> {
        match &self.path {
            Path::Lines(_) => Err(Error::param("path", "use maximal_over_lines for a line family")),
            Path::Curve(c) => match c.line_slope() {
                Some(theta) => {
                    let inj: Vec<(f64, f64)> = inject.iter().map(|&t| (theta, t)).collect();
                    self.search_lines(x, &[[theta, theta]], &inj)
                }
                None => self.search_curve(c, x, inject),
            },
        }
    }

    /// `sup_{t, θ} |u(x − θt, t)|` over the engine's slope set.
    pub fn maximal_over_lines(&self, x: f64, inject: &[(f64, f64)]) -> Result<f64> {
        match &self.path {
            Path::Lines(set) => self.search_lines(x, set, inject),
            Path::Curve(c) => match c.line_slope() {
                Some(theta) => self.search_lines(x, &[[theta, theta]], inject),
                None => Err(Error::param("path", "curve is not a line")),
            },
        }
    }

    fn search_curve(&self, curve: &Curve, x: f64, inject: &[f64]) -> Result<f64> {
        let value = |t: f64| self.plan.eval(curve.eval(x, t), t).norm();
        let (dt, n) = self.base_times();
        let mut tally = Tally::new();
        let base: Vec<f64> = (0..n)
            .map(|k| {
                let t = if k + 1 == n { self.grid.t_hi } else { self.grid.t_lo + dt * k as f64 };
                tally.take(value(t)).unwrap_or(f64::NAN)
            })
            .collect();
        let mut best = base.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max);
        for &t in inject {
            if let Some(v) = tally.take(value(t)) {
                best = best.max(v);
            }
        }
        for c in top_local_maxima(&base, CANDIDATES) {
            let mut center = self.grid.t_lo + dt * c as f64;
            let mut center_value = base[c];
            let mut h = dt;
            for _ in 0..self.grid.depth {
                h /= REFINE_FACTOR as f64;
                let mut next = (center, center_value);
                for j in -(REFINE_FACTOR as i64)..=(REFINE_FACTOR as i64) {
                    let t = center + h * j as f64;
                    if j == 0 || !self.in_time(t) {
                        continue;
                    }
                    if let Some(v) = tally.take(value(t)) {
                        best = best.max(v);
                        if v > next.1 {
                            next = (t, v);
                        }
                    }
                }
                (center, center_value) = next;
            }
        }
        tally.check()?;
        Ok(best)
    }

    fn theta_nodes(&self, iv: [f64; 2]) -> Vec<f64> {
        if iv[1] == iv[0] {
            return vec![iv[0]];
        }
        let n = self.grid.theta_base;
        (0..n)
            .map(|i| if i + 1 == n { iv[1] } else { iv[0] + (iv[1] - iv[0]) * i as f64 / (n - 1) as f64 })
            .collect()
    }

    fn search_lines(&self, x: f64, set: &[[f64; 2]], inject: &[(f64, f64)]) -> Result<f64> {
        let (dt, n) = self.base_times();
        let mut tally = Tally::new();
        let mut best: f64 = 0.0;
        let mut column = Vec::with_capacity(n);
        for &(theta, t) in inject {
            if let Some(v) = tally.take(self.plan.eval(x - theta * t, t).norm()) {
                best = best.max(v);
            }
        }
        // Each component is searched on its own so that the result for a
        // sub-list of components never exceeds the result for the full list.
        for &iv in set {
            let thetas = self.theta_nodes(iv);
            let dtheta = if thetas.len() > 1 { thetas[1] - thetas[0] } else { 0.0 };
            let mut samples: Vec<(f64, usize, usize)> = Vec::new();
            for (i, &theta) in thetas.iter().enumerate() {
                self.plan.sweep_line(x, theta, self.grid.t_lo, dt, n, &mut column);
                for v in column.iter_mut() {
                    *v = tally.take(*v).unwrap_or(f64::NAN);
                }
                for k in top_local_maxima(&column, CANDIDATES) {
                    samples.push((column[k], i, k));
                }
                best = column.iter().copied().filter(|v| v.is_finite()).fold(best, f64::max);
            }
            samples.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
            samples.truncate(CANDIDATES);
            for &(v0, i, k) in &samples {
                let (mut ct, mut cth, mut cv) = (self.grid.t_lo + dt * k as f64, thetas[i], v0);
                let (mut ht, mut hth) = (dt, dtheta);
                for _ in 0..self.grid.depth {
                    ht /= REFINE_FACTOR as f64;
                    hth /= REFINE_FACTOR as f64;
                    let r = REFINE_FACTOR as i64;
                    let mut next = (ct, cth, cv);
                    let theta_steps: Vec<i64> = if hth > 0.0 { (-r..=r).collect() } else { vec![0] };
                    for jth in theta_steps {
                        let theta = cth + hth * jth as f64;
                        if theta < iv[0] || theta > iv[1] {
                            continue;
                        }
                        let t0 = ct - ht * r as f64;
                        self.plan.sweep_line(x, theta, t0, ht, 2 * REFINE_FACTOR + 1, &mut column);
                        for (jt, &v) in column.iter().enumerate() {
                            let t = t0 + ht * jt as f64;
                            if !self.in_time(t) || (jth == 0 && jt == REFINE_FACTOR) {
                                continue;
                            }
                            if let Some(v) = tally.take(v) {
                                best = best.max(v);
                                if v > next.2 {
                                    next = (t, theta, v);
                                }
                            }
                        }
                    }
                    (ct, cth, cv) = next;
                }
            }
        }
        tally.check()?;
        Ok(best)
    }

    /// Maximal values at each x, evaluated in parallel, in input order.
    pub fn maximal_field<F>(&self, xs: &[f64], inject: F) -> Result<Vec<f64>>
    where
        F: Fn(f64) -> Vec<(f64, f64)> + Sync,
    {
        xs.par_iter()
            .map(|&x| {
                let inj = inject(x);
                match &self.path {
                    Path::Lines(_) => self.maximal_over_lines(x, &inj),
                    Path::Curve(_) => {
                        let ts: Vec<f64> = inj.iter().map(|p| p.1).collect();
                        self.maximal_in_time(x, &ts)
                    }
                }
            })
            .collect()
    }
}

/// One-shot `sup_t |u(γ(x,t), t)|`.
pub fn maximal_in_time(datum: &FourierDatum, m: f64, curve: &Curve, x: f64, grid: &GridSpec) -> Result<f64> {
    MaximalEngine::new(datum, m, Path::Curve(curve.clone()), *grid, (x, x))?.maximal_in_time(x, &[])
}

/// One-shot `sup_{t, θ∈Θ} |u(x − θt, t)|`.
pub fn maximal_over_lines(
    datum: &FourierDatum,
    m: f64,
    thetas: &[[f64; 2]],
    x: f64,
    grid: &GridSpec,
) -> Result<f64> {
    MaximalEngine::new(datum, m, Path::Lines(thetas.to_vec()), *grid, (x, x))?.maximal_over_lines(x, &[])
}

/// `|u(x − θt, t)|` by adaptive quadrature: a lower bound for the line-family
/// maximal function at `x` whenever `(θ, t)` lies in the searched set.
pub fn line_value(datum: &FourierDatum, m: f64, x: f64, theta: f64, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    propagate(datum, m, x - theta * t, t, spec).map(|v| v.norm())
}

/// `L^q(dμ)` norm of per-cell maximal values, for `q ∈ [2, 64]`.
pub fn mixed_norm(values: &[f64], grid: &XGrid, measure: &AlphaMeasure, q: f64) -> Result<f64> {
    if !(2.0..=64.0).contains(&q) {
        return Err(Error::param("q", format!("{q} is outside the supported range [2, 64]")));
    }
    lq_mu_norm_samples(values, grid, measure, q)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub mixed_norm: f64,
    pub hs_norm: f64,
    pub ratio: f64,
}

/// Mixed norm of the maximal function over the cells of `xgrid` (sampled at
/// cell midpoints) divided by `‖f‖_{H^s}`.
pub fn ratio_quotient(
    engine: &MaximalEngine,
    datum: &FourierDatum,
    s: f64,
    xgrid: &XGrid,
    measure: &AlphaMeasure,
    q: f64,
    spec: &QuadratureSpec,
) -> Result<RatioReport> {
    let values = engine.maximal_field(&xgrid.midpoints(), |_| Vec::new())?;
    let mixed = mixed_norm(&values, xgrid, measure, q)?;
    let hs = sobolev_norm(datum, s, spec)?;
    Ok(RatioReport {
        mixed_norm: mixed,
        hs_norm: hs,
        ratio: mixed / hs,
    })
}
