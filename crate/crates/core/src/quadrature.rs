//! Deterministic integration of `amplitude(ξ) · exp(i·phase(ξ))` over bounded
//! intervals.
//!
//! The fast path ([`integrate`]) first cuts the interval so that the phase
//! turns by at most `2π` on every cell, then runs a globally adaptive
//! Gauss–Kronrod (7/15) bisection driven by the largest local error. The slow
//! path ([`oracle_integrate`]) is a plain composite Simpson sum on a uniform
//! grid and is kept deliberately naive so it can serve as ground truth.
//!
//! [`CompositeRule`] is a fixed composite Gauss–Legendre rule used by the
//! batched propagator evaluations, where the same nodes are reused for many
//! `(x, t)` pairs.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and budgets shared by the fast path and the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Cap on the number of live cells in the adaptive path.
    pub max_subdivisions: usize,
    /// Node count used by [`oracle_integrate`] when driven from a spec.
    pub oracle_nodes: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_subdivisions: 200_000,
            oracle_nodes: 1_000_001,
        }
    }
}

impl QuadratureSpec {
    pub fn new(
        rel_tol: f64,
        abs_tol: f64,
        max_subdivisions: usize,
        oracle_nodes: usize,
    ) -> Result<Self> {
        let spec = Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
            oracle_nodes,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::param("rel_tol", "must be a positive finite number"));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::param("abs_tol", "must be a positive finite number"));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::param("max_subdivisions", "must be at least 1"));
        }
        if self.oracle_nodes < 100_000 {
            return Err(Error::param("oracle_nodes", "must be at least 1e5"));
        }
        Ok(())
    }
}

/// Closed bounded interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::param(
                "interval",
                format!("[{lo}, {hi}] is not a bounded interval"),
            ));
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// A complex-valued function with a declared compact support. Evaluation is
/// exactly zero off the support.
#[derive(Clone)]
pub struct SmoothFunction {
    rule: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
    support: Interval,
}

impl std::fmt::Debug for SmoothFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SmoothFunction")
            .field("support", &self.support)
            .finish_non_exhaustive()
    }
}

impl SmoothFunction {
    pub fn new<F>(support: Interval, rule: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            rule: Arc::new(rule),
            support,
        }
    }

    pub fn real<F>(support: Interval, rule: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(support, move |x| Complex64::new(rule(x), 0.0))
    }

    pub fn support(&self) -> Interval {
        self.support
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        if self.support.contains(x) {
            (self.rule)(x)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }
}

/// Outcome of the adaptive path with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
    pub cells: usize,
    pub evaluations: usize,
}

// Gauss–Kronrod 7/15 abscissae and weights (QUADPACK qk15).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Cell {
    lo: f64,
    hi: f64,
    value: Complex64,
    error: f64,
    resabs: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    // Max-heap on error; ties broken by position so the pop order is total.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

fn sample<A, P>(amplitude: &A, phase: &P, x: f64) -> Result<Complex64>
where
    A: Fn(f64) -> Complex64,
    P: Fn(f64) -> f64,
{
    let a = amplitude(x);
    let p = phase(x);
    if !(a.re.is_finite() && a.im.is_finite() && p.is_finite()) {
        return Err(Error::InvalidIntegrand { at: x });
    }
    Ok(a * Complex64::from_polar(1.0, p))
}

fn gauss_kronrod_15<A, P>(amplitude: &A, phase: &P, lo: f64, hi: f64) -> Result<Cell>
where
    A: Fn(f64) -> Complex64,
    P: Fn(f64) -> f64,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = sample(amplitude, phase, center)?;
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = fc.norm() * WGK[7];
    let mut f1 = [Complex64::new(0.0, 0.0); 7];
    let mut f2 = [Complex64::new(0.0, 0.0); 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let a = sample(amplitude, phase, center - dx)?;
        let b = sample(amplitude, phase, center + dx)?;
        f1[j] = a;
        f2[j] = b;
        resk += (a + b) * WGK[j];
        resabs += (a.norm() + b.norm()) * WGK[j];
        if j % 2 == 1 {
            resg += (a + b) * WG[j / 2];
        }
    }
    let mean = resk * 0.5;
    let mut resasc = (fc - mean).norm() * WGK[7];
    for j in 0..7 {
        resasc += ((f1[j] - mean).norm() + (f2[j] - mean).norm()) * WGK[j];
    }
    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((resk - resg) * half).norm();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Ok(Cell {
        lo,
        hi,
        value,
        error,
        resabs,
    })
}

/// Total variation of `phase` on `[lo, hi]` estimated from `samples + 1`
/// equispaced points.
fn phase_variation<P: Fn(f64) -> f64>(phase: &P, lo: f64, hi: f64, samples: usize) -> Result<f64> {
    let step = (hi - lo) / samples as f64;
    let mut prev = phase(lo);
    if !prev.is_finite() {
        return Err(Error::InvalidIntegrand { at: lo });
    }
    let mut total = 0.0;
    for i in 1..=samples {
        let x = if i == samples { hi } else { lo + step * i as f64 };
        let p = phase(x);
        if !p.is_finite() {
            return Err(Error::InvalidIntegrand { at: x });
        }
        total += (p - prev).abs();
        prev = p;
    }
    Ok(total)
}

/// Splits `[lo, hi]` until the phase turns by at most `2π` on each piece.
fn presplit<P: Fn(f64) -> f64>(phase: &P, lo: f64, hi: f64, cap: usize) -> Result<Vec<(f64, f64)>> {
    let mut done = Vec::new();
    let mut stack = vec![(lo, hi)];
    while let Some((a, b)) = stack.pop() {
        let samples = if b - a == hi - lo { 64 } else { 16 };
        let var = phase_variation(phase, a, b, samples)?;
        if var <= TAU || done.len() + stack.len() + 2 > cap || b - a <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
            done.push((a, b));
            continue;
        }
        let pieces = ((var / TAU).ceil() as usize).max(2);
        let w = (b - a) / pieces as f64;
        for i in (0..pieces).rev() {
            let l = a + w * i as f64;
            let r = if i + 1 == pieces { b } else { a + w * (i + 1) as f64 };
            stack.push((l, r));
        }
    }
    done.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(done)
}

/// Adaptive integral of `amplitude · e^{i·phase}` over `interval` with
/// diagnostics.
pub fn integrate_with_report<A, P>(
    amplitude: A,
    phase: P,
    interval: Interval,
    spec: &QuadratureSpec,
) -> Result<Estimate>
where
    A: Fn(f64) -> Complex64,
    P: Fn(f64) -> f64,
{
    spec.validate()?;
    if interval.width() == 0.0 {
        return Ok(Estimate {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            cells: 0,
            evaluations: 0,
        });
    }
    let pieces = presplit(&phase, interval.lo, interval.hi, spec.max_subdivisions)?;
    let mut evaluations = 0usize;
    let mut heap = BinaryHeap::with_capacity(pieces.len() * 2);
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_err = 0.0;
    let mut total_abs = 0.0;
    for (a, b) in pieces {
        let cell = gauss_kronrod_15(&amplitude, &phase, a, b)?;
        evaluations += 15;
        total += cell.value;
        total_err += cell.error;
        total_abs += cell.resabs;
        heap.push(cell);
    }

    loop {
        // Roundoff floor keeps tiny cancelling integrals from chasing noise.
        let floor = 64.0 * f64::EPSILON * total_abs;
        let target = spec.abs_tol.max(spec.rel_tol * total.norm()).max(floor);
        if total_err <= target {
            break;
        }
        if heap.len() >= spec.max_subdivisions {
            return Err(Error::ToleranceNotMet {
                estimate: ordered_sum(heap.into_vec()),
                error_bound: total_err,
                cells: spec.max_subdivisions,
            });
        }
        let worst = heap.pop().expect("heap is never empty here");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // Cell cannot be split further in floating point.
            heap.push(Cell { error: 0.0, ..worst });
            total_err -= worst.error;
            continue;
        }
        let left = gauss_kronrod_15(&amplitude, &phase, worst.lo, mid)?;
        let right = gauss_kronrod_15(&amplitude, &phase, mid, worst.hi)?;
        evaluations += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        total_abs += left.resabs + right.resabs - worst.resabs;
        heap.push(left);
        heap.push(right);
    }

    let cells: Vec<Cell> = heap.into_vec();
    let error = cells.iter().map(|c| c.error).sum();
    let count = cells.len();
    Ok(Estimate {
        value: ordered_sum(cells),
        error,
        cells: count,
        evaluations,
    })
}

/// Sum of cell values in left-to-right order, so the result does not depend
/// on the refinement history.
fn ordered_sum(mut cells: Vec<Cell>) -> Complex64 {
    cells.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut acc = NeumaierSum::default();
    for c in &cells {
        acc.add(c.value);
    }
    acc.total()
}

/// `∫_interval amplitude(ξ) e^{i phase(ξ)} dξ` to the tolerance in `spec`.
pub fn integrate<A, P>(
    amplitude: A,
    phase: P,
    interval: Interval,
    spec: &QuadratureSpec,
) -> Result<Complex64>
where
    A: Fn(f64) -> Complex64,
    P: Fn(f64) -> f64,
{
    integrate_with_report(amplitude, phase, interval, spec).map(|e| e.value)
}

/// Integrates a [`SmoothFunction`] against `e^{i·phase}` over its support.
pub fn integrate_smooth<P>(
    amplitude: &SmoothFunction,
    phase: P,
    spec: &QuadratureSpec,
) -> Result<Complex64>
where
    P: Fn(f64) -> f64,
{
    integrate(|x| amplitude.eval(x), phase, amplitude.support(), spec)
}

/// Composite Simpson on `node_count` uniform nodes (odd, at least 3).
pub fn oracle_integrate<A, P>(
    amplitude: A,
    phase: P,
    interval: Interval,
    node_count: usize,
) -> Result<Complex64>
where
    A: Fn(f64) -> Complex64,
    P: Fn(f64) -> f64,
{
    if node_count < 3 || node_count.is_multiple_of(2) {
        return Err(Error::param("node_count", "must be odd and at least 3"));
    }
    let panels = node_count - 1;
    let h = interval.width() / panels as f64;
    let mut acc = NeumaierSum::default();
    for i in 0..node_count {
        let x = if i == panels {
            interval.hi
        } else {
            interval.lo + h * i as f64
        };
        let w = if i == 0 || i == panels {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc.add(sample(&amplitude, &phase, x)? * w);
    }
    Ok(acc.total() * (h / 3.0))
}

/// Compensated complex summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct NeumaierSum {
    sum: Complex64,
    comp: Complex64,
}

impl NeumaierSum {
    pub(crate) fn add(&mut self, v: Complex64) {
        self.sum.re = neumaier_step(self.sum.re, v.re, &mut self.comp.re);
        self.sum.im = neumaier_step(self.sum.im, v.im, &mut self.comp.im);
    }

    pub(crate) fn total(&self) -> Complex64 {
        self.sum + self.comp
    }
}

fn neumaier_step(sum: f64, v: f64, comp: &mut f64) -> f64 {
    let t = sum + v;
    if sum.abs() >= v.abs() {
        *comp += (sum - t) + v;
    } else {
        *comp += (v - t) + sum;
    }
    t
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss–Legendre order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Fixed composite Gauss–Legendre rule on an interval.
#[derive(Debug, Clone)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    pub fn new(interval: Interval, panels: usize, order: usize) -> Self {
        let panels = panels.max(1);
        let (gx, gw) = gauss_legendre(order);
        let w = interval.width() / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let c = interval.lo + w * (p as f64 + 0.5);
            for (x, wt) in gx.iter().zip(&gw) {
                nodes.push(c + 0.5 * w * x);
                weights.push(0.5 * w * wt);
            }
        }
        Self { nodes, weights }
    }

    /// Rule with enough panels that a phase turning by `phase_variation`
    /// radians over the interval turns by at most `π` per panel.
    pub fn for_phase_variation(interval: Interval, phase_variation: f64, min_panels: usize) -> Self {
        let panels = ((phase_variation / PI).ceil() as usize).max(min_panels);
        Self::new(interval, panels, 10)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}
