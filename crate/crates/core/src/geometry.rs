//! Curves, the measures `|x|^{α−1}dx`, Cantor prefractals and coverings.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::regression::{fit_loglog, LogLogFit};

/// User-supplied path with declared Lipschitz constants.
#[derive(Clone)]
pub struct CustomCurve {
    pub rule: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    /// Declared bound on `|γ(x,t) − γ(x,t′)| / |t − t′|`.
    pub c1: f64,
    /// Declared lower bound on `|γ(x,t) − γ(x′,t)| / |x − x′|`.
    pub c2: f64,
}

impl fmt::Debug for CustomCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomCurve")
            .field("c1", &self.c1)
            .field("c2", &self.c2)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum Curve {
    Vertical,
    Tilted { theta: f64 },
    Power { theta: f64, kappa: f64 },
    Exponential,
    Custom(CustomCurve),
}

impl Curve {
    pub fn power(theta: f64, kappa: f64) -> Result<Self> {
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(Error::param("theta", "must be a nonnegative real"));
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::param("kappa", "must be a positive real"));
        }
        Ok(Curve::Power { theta, kappa })
    }

    pub fn custom<F>(rule: F, c1: f64, c2: f64) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Curve::Custom(CustomCurve {
            rule: Arc::new(rule),
            c1,
            c2,
        })
    }

    /// `γ(x, t)`.
    pub fn eval(&self, x: f64, t: f64) -> f64 {
        match self {
            Curve::Vertical => x,
            Curve::Tilted { theta } => x - theta * t,
            Curve::Power { theta, kappa } => x - theta * t.powf(*kappa),
            Curve::Exponential => {
                if t > 0.0 {
                    x - (-1.0 / t).exp()
                } else {
                    x
                }
            }
            Curve::Custom(c) => (c.rule)(x, t),
        }
    }

    /// If `γ(x, t) = x − θt`, the slope θ.
    pub fn line_slope(&self) -> Option<f64> {
        match self {
            Curve::Vertical => Some(0.0),
            Curve::Tilted { theta } => Some(*theta),
            Curve::Power { theta, kappa } if *kappa == 1.0 || *theta == 0.0 => Some(*theta),
            _ => None,
        }
    }

    /// Supremum of `|∂_t γ|` for `t ∈ [t_lo, t_hi]`; infinite when the curve
    /// is tangential down to `t = 0`.
    pub fn time_speed(&self, t_lo: f64, t_hi: f64) -> f64 {
        match self {
            Curve::Vertical => 0.0,
            Curve::Tilted { theta } => *theta,
            Curve::Power { theta, kappa } => {
                if *theta == 0.0 {
                    0.0
                } else if *kappa >= 1.0 {
                    theta * kappa * t_hi.powf(kappa - 1.0)
                } else if t_lo <= 0.0 {
                    f64::INFINITY
                } else {
                    theta * kappa * t_lo.powf(kappa - 1.0)
                }
            }
            Curve::Exponential => {
                // t^{−2}e^{−1/t} increases up to t = 1/2 and decreases after.
                let peak = 0.5f64.clamp(t_lo, t_hi);
                if peak <= 0.0 {
                    0.0
                } else {
                    (-1.0 / peak).exp() / (peak * peak)
                }
            }
            Curve::Custom(c) => c.c1,
        }
    }
}

/// Convenience wrapper for [`Curve::eval`].
pub fn curve_eval(curve: &Curve, x: f64, t: f64) -> f64 {
    curve.eval(x, t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    pub c1: f64,
    pub c2: f64,
    pub pass: bool,
}

/// Largest time-difference quotient and smallest space-difference quotient
/// witnessed on the grids.
pub fn lipschitz_check(curve: &Curve, x_grid: &[f64], t_grid: &[f64]) -> LipschitzReport {
    let mut ts = t_grid.to_vec();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let mut xs = x_grid.to_vec();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut c1: f64 = 0.0;
    // Every chord quotient is an average of neighbouring ones, so adjacent
    // pairs attain the supremum.
    for &x in &xs {
        for w in ts.windows(2) {
            let q = (curve.eval(x, w[1]) - curve.eval(x, w[0])).abs() / (w[1] - w[0]);
            c1 = c1.max(q);
        }
    }
    let mut c2 = f64::INFINITY;
    for &t in &ts {
        let vals: Vec<f64> = xs.iter().map(|&x| curve.eval(x, t)).collect();
        for i in 0..xs.len() {
            for j in i + 1..xs.len() {
                c2 = c2.min((vals[j] - vals[i]).abs() / (xs[j] - xs[i]));
            }
        }
    }
    LipschitzReport {
        c1,
        c2,
        pass: c1.is_finite() && c2 > 0.0 && c2.is_finite(),
    }
}

/// `dμ = |x|^{α−1}dx` restricted to the unit interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaMeasure {
    pub alpha: f64,
}

impl AlphaMeasure {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::param("alpha", format!("{alpha} is not in (0, 1]")));
        }
        Ok(Self { alpha })
    }

    /// `μ([a, b] ∩ [0, 1])`.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        let lo = a.clamp(0.0, 1.0);
        let hi = b.clamp(0.0, 1.0);
        if hi <= lo {
            return 0.0;
        }
        (hi.powf(self.alpha) - lo.powf(self.alpha)) / self.alpha
    }

    pub fn total(&self) -> f64 {
        1.0 / self.alpha
    }

    /// The bound `2·3^α/α` on `sup μ(B(a,r))/r^α`.
    pub fn frostman_bound(&self) -> f64 {
        2.0 * 3f64.powf(self.alpha) / self.alpha
    }
}

pub fn measure_of_ball(measure: &AlphaMeasure, center: f64, radius: f64) -> Result<f64> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::param("radius", "must be positive"));
    }
    Ok(measure.mass(center - radius, center + radius))
}

/// Grid supremum of `μ(B(a, r)) / r^α`.
pub fn frostman_constant(measure: &AlphaMeasure, radii: &[f64], centers: &[f64]) -> Result<f64> {
    let mut best: f64 = 0.0;
    for &r in radii {
        let scale = r.powf(measure.alpha);
        for &a in centers {
            best = best.max(measure_of_ball(measure, a, r)? / scale);
        }
    }
    Ok(best)
}

/// A partition of `[0, 1]` (or of a subinterval) into cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XGrid {
    edges: Vec<f64>,
}

impl XGrid {
    pub fn from_edges(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 {
            return Err(Error::param("edges", "need at least one cell"));
        }
        if edges.windows(2).any(|w| !(w[0] < w[1])) || edges[0] < 0.0 || *edges.last().unwrap() > 1.0 {
            return Err(Error::param("edges", "must increase strictly inside [0, 1]"));
        }
        Ok(Self { edges })
    }

    /// `n` equal cells on `[lo, hi]`.
    pub fn uniform_on(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "must be positive"));
        }
        let mut edges: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
        edges[n] = hi;
        Self::from_edges(edges)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::uniform_on(0.0, 1.0, n)
    }

    /// `[0, first]` followed by cells growing geometrically up to 1 with
    /// `per_octave` cells per factor of two.
    pub fn geometric(first: f64, per_octave: usize) -> Result<Self> {
        if !(first > 0.0 && first < 1.0) || per_octave == 0 {
            return Err(Error::param("first", "need 0 < first < 1 and per_octave >= 1"));
        }
        let octaves = (1.0 / first).log2();
        let n = (octaves * per_octave as f64).ceil().max(1.0) as usize;
        let ratio = (1.0 / first).powf(1.0 / n as f64);
        let mut edges = vec![0.0];
        for i in 0..n {
            edges.push(first * ratio.powi(i as i32));
        }
        edges.push(1.0);
        edges.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        Self::from_edges(edges)
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn midpoints(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn masses(&self, measure: &AlphaMeasure) -> Vec<f64> {
        self.edges.windows(2).map(|w| measure.mass(w[0], w[1])).collect()
    }
}

fn check_q(q: f64) -> Result<()> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::param("q", format!("{q} is not a finite exponent >= 1")));
    }
    Ok(())
}

/// `(Σ |v_i|^q μ(cell_i))^{1/q}` for one value per cell.
pub fn lq_mu_norm_samples(values: &[f64], grid: &XGrid, measure: &AlphaMeasure, q: f64) -> Result<f64> {
    check_q(q)?;
    if values.len() != grid.len() {
        return Err(Error::param("values", "need exactly one value per grid cell"));
    }
    let s: f64 = values
        .iter()
        .zip(grid.masses(measure))
        .map(|(v, w)| v.abs().powf(q) * w)
        .sum();
    Ok(s.powf(1.0 / q))
}

/// `(∫ |f|^q dμ)^{1/q}` over the grid's span, using the substitution
/// `u = x^α` (which turns `dμ` into `du/α`) and Gauss–Legendre per cell.
pub fn lq_mu_norm<F>(f: F, grid: &XGrid, measure: &AlphaMeasure, q: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    check_q(q)?;
    let (nodes, weights) = gauss_legendre(16);
    let a = measure.alpha;
    let mut total = 0.0;
    for w in grid.edges().windows(2) {
        let (ua, ub) = (w[0].powf(a), w[1].powf(a));
        let (c, h) = (0.5 * (ua + ub), 0.5 * (ub - ua));
        let cell: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(&z, &wt)| wt * f((c + h * z).powf(1.0 / a)).abs().powf(q))
            .sum();
        total += cell * h / a;
    }
    Ok(total.powf(1.0 / q))
}

/// Level-`k` prefractal of the Cantor set with ratio `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CantorSet {
    pub ratio: f64,
    pub level: u32,
    pub intervals: Vec<[f64; 2]>,
}

impl CantorSet {
    /// `−ln 2 / ln r`.
    pub fn dimension(&self) -> f64 {
        -(2f64.ln()) / self.ratio.ln()
    }

    pub fn component_length(&self) -> f64 {
        self.ratio.powi(self.level as i32)
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|i| i[1] - i[0]).sum()
    }

    /// The component containing `x`, if any.
    pub fn component_of(&self, x: f64) -> Option<[f64; 2]> {
        let idx = self.intervals.partition_point(|iv| iv[1] < x);
        self.intervals.get(idx).copied().filter(|iv| iv[0] <= x && x <= iv[1])
    }

    pub fn contains(&self, x: f64) -> bool {
        self.component_of(x).is_some()
    }
}

pub fn cantor_level(r: f64, k: u32) -> Result<CantorSet> {
    if !(r > 0.0 && r < 0.5) {
        return Err(Error::InvalidRatio(r));
    }
    if k > 26 {
        return Err(Error::param("k", "levels above 26 are not supported"));
    }
    let mut intervals = vec![[0.0, 1.0]];
    for j in 1..=k {
        let len = r.powi(j as i32);
        let mut next = Vec::with_capacity(intervals.len() * 2);
        for iv in &intervals {
            next.push([iv[0], iv[0] + len]);
            next.push([iv[1] - len, iv[1]]);
        }
        intervals = next;
    }
    Ok(CantorSet {
        ratio: r,
        level: k,
        intervals,
    })
}

/// Least number of closed length-`δ` intervals covering a union of
/// intervals (greedy sweep from the left).
pub fn covering_number(intervals: &[[f64; 2]], delta: f64) -> Result<usize> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::param("delta", "must be positive"));
    }
    let mut sorted = intervals.to_vec();
    sorted.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let slack = 1e-9 * delta;
    let mut count = 0usize;
    let mut covered_to = f64::NEG_INFINITY;
    for iv in sorted {
        if iv[1] < iv[0] {
            return Err(Error::param("intervals", "left end exceeds right end"));
        }
        if iv[1] <= covered_to + slack {
            continue;
        }
        let start = if iv[0] > covered_to + slack { iv[0] } else { covered_to };
        let need = (((iv[1] - start) - slack) / delta).ceil().max(1.0) as usize;
        count += need;
        covered_to = start + need as f64 * delta;
    }
    Ok(count)
}

/// Slope of `ln N(δ)` against `ln(1/δ)`.
pub fn minkowski_dimension(intervals: &[[f64; 2]], deltas: &[f64]) -> Result<LogLogFit> {
    let pts = deltas
        .iter()
        .map(|&d| covering_number(intervals, d).map(|n| (1.0 / d, n as f64)))
        .collect::<Result<Vec<_>>>()?;
    fit_loglog(&pts)
}

/// A real field sampled on `XGrid × {t_j}` with `nt` equal time cells of
/// `(0, 1)`; values are stored x-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    pub grid: XGrid,
    pub nt: usize,
    pub values: Vec<f64>,
}

impl SampledField {
    pub fn new(grid: XGrid, nt: usize, values: Vec<f64>) -> Result<Self> {
        if nt == 0 || values.len() != grid.len() * nt {
            return Err(Error::param("values", "need grid.len() * nt samples"));
        }
        Ok(Self { grid, nt, values })
    }

    pub fn constant(grid: XGrid, nt: usize, c: f64) -> Self {
        let n = grid.len() * nt;
        Self {
            grid,
            nt,
            values: vec![c; n],
        }
    }

    /// `∫ g(x, t) dt` per x-cell.
    fn time_integrals(&self) -> Vec<f64> {
        self.values
            .chunks(self.nt)
            .map(|row| row.iter().sum::<f64>() / self.nt as f64)
            .collect()
    }

    /// `‖g‖_{L^p_x(dμ) L^1_t}`.
    pub fn mixed_norm(&self, measure: &AlphaMeasure, p: f64) -> Result<f64> {
        let abs_rows: Vec<f64> = self
            .values
            .chunks(self.nt)
            .map(|row| row.iter().map(|v| v.abs()).sum::<f64>() / self.nt as f64)
            .collect();
        lq_mu_norm_samples(&abs_rows, &self.grid, measure, p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BilinearWeight {
    /// `χ_{[0,b)}(|x − x′|)`.
    Indicator { b: f64 },
    /// `|x − x′|^{−ρ}`.
    Power { rho: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BilinearReport {
    pub form: f64,
    pub bound: f64,
    pub constant: f64,
}

/// Discrete `∬∬ g(x,t) h(x′,t′) W(x − x′) dμ(x) dμ(x′) dt dt′` next to the
/// product of `L^{q′}_x(dμ) L^1_t` norms (times `b^{2α/q}` for the
/// indicator weight).
pub fn bilinear_form_check(
    g: &SampledField,
    h: &SampledField,
    measure: &AlphaMeasure,
    q: f64,
    weight: BilinearWeight,
) -> Result<BilinearReport> {
    if !(q >= 2.0 && q.is_finite()) {
        return Err(Error::param("q", "must be a finite real >= 2"));
    }
    if g.grid != h.grid || g.nt != h.nt {
        return Err(Error::param("h", "g and h must share a grid"));
    }
    match weight {
        BilinearWeight::Indicator { b } if !(b > 0.0) => {
            return Err(Error::param("b", "must be positive"));
        }
        BilinearWeight::Power { rho } => {
            if !(rho > 0.0 && rho < 1.0) {
                return Err(Error::param("rho", "must lie in (0, 1)"));
            }
            if q * rho / 2.0 >= measure.alpha {
                return Err(Error::HlsExponentOutOfRange {
                    product: q * rho / 2.0,
                    alpha: measure.alpha,
                });
            }
        }
        _ => {}
    }
    let gi = g.time_integrals();
    let hi = h.time_integrals();
    let mu = g.grid.masses(measure);
    let mid = g.grid.midpoints();
    let widths: Vec<f64> = g.grid.edges().windows(2).map(|w| w[1] - w[0]).collect();
    let n = mid.len();
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = 0.0;
            for j in 0..n {
                let w = match weight {
                    BilinearWeight::Indicator { b } => {
                        if (mid[i] - mid[j]).abs() < b {
                            1.0
                        } else {
                            0.0
                        }
                    }
                    BilinearWeight::Power { rho } => {
                        if i == j {
                            // Mean of |x − x′|^{−ρ} over a square cell.
                            2.0 * widths[i].powf(-rho) / ((1.0 - rho) * (2.0 - rho))
                        } else {
                            (mid[i] - mid[j]).abs().powf(-rho)
                        }
                    }
                };
                acc += hi[j] * mu[j] * w;
            }
            gi[i] * mu[i] * acc
        })
        .collect();
    let form: f64 = rows.iter().sum();
    let qp = q / (q - 1.0);
    let norms = g.mixed_norm(measure, qp)? * h.mixed_norm(measure, qp)?;
    let bound = match weight {
        BilinearWeight::Indicator { b } => b.powf(2.0 * measure.alpha / q) * norms,
        BilinearWeight::Power { .. } => norms,
    };
    let constant = if bound > 0.0 { form.abs() / bound } else { 0.0 };
    Ok(BilinearReport { form, bound, constant })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn curve_values() {
        assert!((Curve::power(1.0, 2.0).unwrap().eval(0.5, 0.1) - 0.49).abs() < 1e-15);
        assert_eq!(Curve::Vertical.eval(0.3, 0.9), 0.3);
        assert_eq!(Curve::Exponential.eval(0.5, 0.05), 0.5 - (-20f64).exp());
        assert_eq!(Curve::Exponential.eval(0.5, 0.0), 0.5);
        let c = Curve::custom(|x, t| 2.0 * x - t * t, 2.0, 2.0);
        assert_eq!(curve_eval(&c, 1.0, 1.0), 1.0);
    }

    #[test]
    fn lipschitz_examples() {
        let xs: Vec<f64> = (1..50).map(|i| i as f64 / 50.0).collect();
        let ts: Vec<f64> = (1..1000).map(|i| i as f64 / 1000.0).collect();
        let r = lipschitz_check(&Curve::power(1.0, 1.0).unwrap(), &xs, &ts);
        assert!((r.c1 - 1.0).abs() < 1e-12 && (r.c2 - 1.0).abs() < 1e-12 && r.pass);
        let r = lipschitz_check(&Curve::power(1.0, 2.0).unwrap(), &xs, &ts);
        assert!((r.c1 - 2.0).abs() < 3e-3 && (r.c2 - 1.0).abs() < 1e-12);
        let half: Vec<f64> = (1..=500).map(|i| i as f64 / 1000.0).collect();
        let r = lipschitz_check(&Curve::Exponential, &xs, &half);
        // grid maximisation of t^{-2}e^{-1/t}
        let oracle = half.iter().map(|t| (-1.0 / t).exp() / (t * t)).fold(0.0, f64::max);
        assert!((r.c1 - oracle).abs() < 2e-3);
        assert!((oracle - 4.0 * (-2f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn ball_measures() {
        let m1 = AlphaMeasure::new(1.0).unwrap();
        assert_relative_eq!(measure_of_ball(&m1, 0.5, 0.2).unwrap(), 0.4, epsilon = 1e-15);
        let mh = AlphaMeasure::new(0.5).unwrap();
        assert_relative_eq!(measure_of_ball(&mh, 0.0, 0.25).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(
            measure_of_ball(&mh, 0.5, 0.1).unwrap(),
            (0.6f64.sqrt() - 0.4f64.sqrt()) / 0.5,
            epsilon = 1e-15
        );
        assert!((measure_of_ball(&mh, 0.5, 0.1).unwrap() - 0.2843).abs() < 1e-4);
        assert!(AlphaMeasure::new(0.0).is_err());
    }

    #[test]
    fn frostman_examples() {
        let radii: Vec<f64> = (1..=1000).map(|i| i as f64 / 2000.0).collect();
        let centers: Vec<f64> = (0..=1000).map(|i| i as f64 / 1000.0).collect();
        let m1 = AlphaMeasure::new(1.0).unwrap();
        assert_relative_eq!(frostman_constant(&m1, &radii, &centers).unwrap(), 2.0, epsilon = 1e-12);
        let mh = AlphaMeasure::new(0.5).unwrap();
        let c = frostman_constant(&mh, &radii, &centers).unwrap();
        assert!(c < mh.frostman_bound());
        let at_zero = frostman_constant(&mh, &radii, &[0.0]).unwrap();
        assert_relative_eq!(at_zero, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn lq_norms() {
        let m1 = AlphaMeasure::new(1.0).unwrap();
        let g = XGrid::uniform(7).unwrap();
        assert_relative_eq!(lq_mu_norm(|_| 1.0, &g, &m1, 2.0).unwrap(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(lq_mu_norm(|x| x, &g, &m1, 2.0).unwrap(), (1.0f64 / 3.0).sqrt(), epsilon = 1e-14);
        for alpha in [0.25, 0.5, 0.75, 1.0] {
            let m = AlphaMeasure::new(alpha).unwrap();
            for q in [2.0, 3.5] {
                let v = lq_mu_norm_samples(&vec![2.5; g.len()], &g, &m, q).unwrap();
                assert_relative_eq!(v, 2.5 * (1.0 / alpha).powf(1.0 / q), max_relative = 1e-13);
            }
        }
        // ∫ x^2 · x^{-1/2} dx = 2/5
        let mh = AlphaMeasure::new(0.5).unwrap();
        assert_relative_eq!(lq_mu_norm(|x| x, &g, &mh, 2.0).unwrap(), 0.4f64.sqrt(), epsilon = 1e-13);
    }

    #[test]
    fn cantor_construction() {
        let c = cantor_level(1.0 / 3.0, 1).unwrap();
        assert_eq!(c.intervals.len(), 2);
        assert_relative_eq!(c.intervals[0][1], 1.0 / 3.0);
        assert_relative_eq!(c.intervals[1][0], 2.0 / 3.0);
        let c = cantor_level(1.0 / 3.0, 2).unwrap();
        assert_eq!(c.intervals.len(), 4);
        assert_eq!(c.intervals[0][0], 0.0);
        assert_relative_eq!(c.intervals[0][1], 1.0 / 9.0);
        assert_relative_eq!(c.intervals[3][0], 8.0 / 9.0);
        assert_eq!(c.intervals[3][1], 1.0);
        let c = cantor_level(0.25, 3).unwrap();
        assert_eq!(c.intervals.len(), 8);
        for iv in &c.intervals {
            assert_relative_eq!(iv[1] - iv[0], 1.0 / 64.0, epsilon = 1e-15);
        }
        assert!(matches!(cantor_level(0.5, 2), Err(Error::InvalidRatio(_))));
        assert!(matches!(cantor_level(0.0, 2), Err(Error::InvalidRatio(_))));
        assert_eq!(serde_json::to_string(&cantor_level(0.25, 1).unwrap().intervals).unwrap(), "[[0.0,0.25],[0.75,1.0]]");
    }

    #[test]
    fn cantor_nesting() {
        for r in [0.1, 0.25, 1.0 / 3.0, 0.45] {
            let mut prev = cantor_level(r, 0).unwrap();
            for k in 1..=10 {
                let c = cantor_level(r, k).unwrap();
                assert_eq!(c.intervals.len(), 1 << k);
                assert!((c.total_length() - (2.0 * r).powi(k as i32)).abs() < 1e-12);
                for (i, iv) in c.intervals.iter().enumerate() {
                    let parent = prev.intervals[i / 2];
                    assert!(parent[0] <= iv[0] && iv[1] <= parent[1]);
                    assert!((iv[1] - iv[0] - r.powi(k as i32)).abs() < 1e-15);
                }
                prev = c;
            }
        }
    }

    #[test]
    fn coverings() {
        assert_eq!(covering_number(&[[0.0, 1.0]], 0.1).unwrap(), 10);
        let c6 = cantor_level(1.0 / 3.0, 6).unwrap();
        for j in 1..=6 {
            assert_eq!(covering_number(&c6.intervals, 3f64.powi(-j)).unwrap(), 1 << j);
        }
        assert_eq!(covering_number(&[[0.3, 0.3]], 0.01).unwrap(), 1);
    }

    #[test]
    fn minkowski_examples() {
        let ladder: Vec<f64> = (1..=10).map(|j| 2f64.powi(-j)).collect();
        assert_relative_eq!(minkowski_dimension(&[[0.0, 1.0]], &ladder).unwrap().slope, 1.0, epsilon = 1e-12);
        assert_eq!(minkowski_dimension(&[[0.4, 0.4]], &ladder).unwrap().slope, 0.0);
        let c8 = cantor_level(1.0 / 3.0, 8).unwrap();
        let ladder: Vec<f64> = (1..=8).map(|j| 3f64.powi(-j)).collect();
        let f = minkowski_dimension(&c8.intervals, &ladder).unwrap();
        assert!((f.slope - 2f64.ln() / 3f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn bilinear_examples() {
        let grid = XGrid::uniform(256).unwrap();
        let m1 = AlphaMeasure::new(1.0).unwrap();
        let zero = SampledField::constant(grid.clone(), 4, 0.0);
        let r = bilinear_form_check(&zero, &zero, &m1, 2.0, BilinearWeight::Indicator { b: 0.3 }).unwrap();
        assert_eq!(r.form, 0.0);
        let one = SampledField::constant(grid.clone(), 4, 1.0);
        let r = bilinear_form_check(&one, &one, &m1, 2.0, BilinearWeight::Indicator { b: 1.0 }).unwrap();
        assert_relative_eq!(r.form, 1.0, epsilon = 1e-12);
        assert_relative_eq!(r.bound, 1.0, epsilon = 1e-12);
        assert_relative_eq!(r.constant, 1.0, epsilon = 1e-12);
        let mh = AlphaMeasure::new(0.5).unwrap();
        let err = bilinear_form_check(&one, &one, &mh, 2.0, BilinearWeight::Power { rho: 0.6 }).unwrap_err();
        assert!(matches!(err, Error::HlsExponentOutOfRange { .. }));
        let r = bilinear_form_check(&one, &one, &m1, 2.0, BilinearWeight::Power { rho: 0.5 }).unwrap();
        // ∬ |x − y|^{−1/2} over the unit square = 8/3
        assert!((r.form - 8.0 / 3.0).abs() < 2e-2, "{}", r.form);
    }

    proptest! {
        #[test]
        fn interval_mass_is_exact(alpha in 0.05f64..1.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let m = AlphaMeasure::new(alpha).unwrap();
            let (lo, hi) = (a.min(b), a.max(b));
            prop_assert!((m.mass(lo, hi) - (hi.powf(alpha) - lo.powf(alpha)) / alpha).abs() < 1e-15);
        }

        #[test]
        fn covering_is_monotone(k in 1u32..8, r in 0.05f64..0.49, d1 in 1e-4f64..1.0, d2 in 1e-4f64..1.0) {
            let c = cantor_level(r, k).unwrap();
            let (small, large) = (d1.min(d2), d1.max(d2));
            prop_assert!(covering_number(&c.intervals, large).unwrap() <= covering_number(&c.intervals, small).unwrap());
        }

        #[test]
        fn frostman_below_bound(alpha in 0.05f64..1.0, a in 0.0f64..1.0, r in 1e-6f64..1.0) {
            let m = AlphaMeasure::new(alpha).unwrap();
            prop_assert!(measure_of_ball(&m, a, r).unwrap() / r.powf(alpha) <= m.frostman_bound());
        }
    }
}
