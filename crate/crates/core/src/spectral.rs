//! The reference bump, frequency-side data and the fractional propagator.
//!
//! All data are band-limited to a single dyadic band and are described by
//! their Fourier transform
//!
//! ```text
//! f̂(ξ) = A · exp(i(c₁ξ + c_m|ξ|^m)) · ψ(aξ + b)
//! ```
//!
//! so that every quantity of interest is a one-dimensional oscillatory
//! integral over the band.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, CompositeRule, Interval, QuadratureSpec, SmoothFunction};

/// Left end of the reference band.
pub const BAND_LO: f64 = 0.5;
/// Right end of the reference band.
pub const BAND_HI: f64 = 2.0;

const BUMP_CENTER: f64 = 1.25;
const BUMP_HALF_WIDTH: f64 = 0.75;

/// Standard bump `exp(1 − 1/(1 − u²))` on `(−1, 1)`, zero elsewhere.
pub fn standard_bump(u: f64) -> f64 {
    let d = 1.0 - u * u;
    if d <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / d).exp()
    }
}

/// The reference bump ψ, supported in `[1/2, 2]` with `ψ(5/4) = 1`.
pub fn psi(xi: f64) -> f64 {
    standard_bump((xi - BUMP_CENTER) / BUMP_HALF_WIDTH)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceBump;

impl ReferenceBump {
    pub fn eval(&self, xi: f64) -> f64 {
        psi(xi)
    }

    pub fn support(&self) -> Interval {
        Interval {
            lo: BAND_LO,
            hi: BAND_HI,
        }
    }

    pub fn profile(&self) -> SmoothFunction {
        SmoothFunction::real(self.support(), psi)
    }

    /// `∫ψ^p` over the band.
    pub fn moment(&self, power: i32, spec: &QuadratureSpec) -> Result<f64> {
        integrate(
            |xi| Complex64::new(psi(xi).powi(power), 0.0),
            |_| 0.0,
            self.support(),
            spec,
        )
        .map(|v| v.re)
    }
}

/// A band-limited datum given on the frequency side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierDatum {
    pub amplitude: Complex64,
    /// Bump argument scale `a`.
    pub scale: f64,
    /// Bump argument shift `b`.
    pub shift: f64,
    pub linear_phase: f64,
    pub fractional_phase: f64,
    pub m: f64,
}

impl FourierDatum {
    pub fn new(
        amplitude: Complex64,
        scale: f64,
        shift: f64,
        linear_phase: f64,
        fractional_phase: f64,
        m: f64,
    ) -> Result<Self> {
        check_m(m)?;
        if !(scale.is_finite() && scale != 0.0) {
            return Err(Error::param("scale", "bump argument scale must be finite and nonzero"));
        }
        for (name, v) in [
            ("shift", shift),
            ("linear_phase", linear_phase),
            ("fractional_phase", fractional_phase),
        ] {
            if !v.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        if !(amplitude.re.is_finite() && amplitude.im.is_finite()) {
            return Err(Error::param("amplitude", "must be finite"));
        }
        let datum = Self {
            amplitude,
            scale,
            shift,
            linear_phase,
            fractional_phase,
            m,
        };
        let s = datum.support();
        if s.lo <= 0.0 && s.hi >= 0.0 {
            return Err(Error::DegenerateSupport(format!(
                "frequency support [{}, {}] contains 0",
                s.lo, s.hi
            )));
        }
        Ok(datum)
    }

    /// `f̂ = ψ`.
    pub fn bump(m: f64) -> Result<Self> {
        Self::new(Complex64::new(1.0, 0.0), 1.0, 0.0, 0.0, 0.0, m)
    }

    /// `f̂(ξ) = A ψ(ξ/λ)`.
    pub fn dilated(lambda: f64, amplitude: f64, m: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::param("lambda", "must be positive"));
        }
        Self::new(Complex64::new(amplitude, 0.0), 1.0 / lambda, 0.0, 0.0, 0.0, m)
    }

    pub fn with_modulation(self, linear_phase: f64, fractional_phase: f64) -> Result<Self> {
        Self::new(
            self.amplitude,
            self.scale,
            self.shift,
            linear_phase,
            fractional_phase,
            self.m,
        )
    }

    pub fn scaled(self, factor: Complex64) -> Self {
        Self {
            amplitude: self.amplitude * factor,
            ..self
        }
    }

    /// Frequency interval where `1/2 ≤ aξ + b ≤ 2`.
    pub fn support(&self) -> Interval {
        let p = (BAND_LO - self.shift) / self.scale;
        let q = (BAND_HI - self.shift) / self.scale;
        Interval {
            lo: p.min(q),
            hi: p.max(q),
        }
    }

    /// Largest `|ξ|` on the support.
    pub fn max_frequency(&self) -> f64 {
        let s = self.support();
        s.lo.abs().max(s.hi.abs())
    }

    /// Smallest `|ξ|` on the support.
    pub fn min_frequency(&self) -> f64 {
        let s = self.support();
        s.lo.abs().min(s.hi.abs())
    }

    /// The modulation phase `c₁ξ + c_m|ξ|^m`.
    pub fn modulation(&self, xi: f64) -> f64 {
        self.linear_phase * xi + self.fractional_phase * xi.abs().powf(self.m)
    }

    pub fn bump_at(&self, xi: f64) -> f64 {
        psi(self.scale * xi + self.shift)
    }

    /// `f̂(ξ)`.
    pub fn eval(&self, xi: f64) -> Complex64 {
        let b = self.bump_at(xi);
        if b == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        self.amplitude * Complex64::from_polar(b, self.modulation(xi))
    }

    fn xi_of_eta(&self, eta: f64) -> f64 {
        (eta - self.shift) / self.scale
    }
}

fn check_m(m: f64) -> Result<()> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::param("m", format!("{m} is not in (0, 1)")));
    }
    Ok(())
}

fn check_datum_m(datum: &FourierDatum, m: f64) -> Result<()> {
    check_m(m)?;
    if (datum.m - m).abs() > 1e-14 {
        return Err(Error::param(
            "m",
            format!("{m} does not match the datum's exponent {}", datum.m),
        ));
    }
    Ok(())
}

/// `u(x, t) = (2π)^{-1} ∫ e^{i(xξ + t|ξ|^m)} f̂(ξ) dξ`.
///
/// The integral is taken in the bump variable `η = aξ + b ∈ [1/2, 2]`, where
/// the amplitude is the fixed profile ψ and every λ-dependence sits in the
/// phase.
pub fn propagate(datum: &FourierDatum, m: f64, x: f64, t: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    check_datum_m(datum, m)?;
    let y = x + datum.linear_phase;
    let tau = t + datum.fractional_phase;
    let d = *datum;
    let v = integrate(
        |eta| Complex64::new(psi(eta), 0.0),
        move |eta| {
            let xi = d.xi_of_eta(eta);
            y * xi + tau * xi.abs().powf(m)
        },
        Interval {
            lo: BAND_LO,
            hi: BAND_HI,
        },
        spec,
    )?;
    Ok(v * datum.amplitude / (TAU * datum.scale.abs()))
}

/// `(2π)^{-1} ∫ f̂(ξ) e^{ixξ} dξ` computed in the frequency variable with the
/// datum treated as an opaque complex amplitude.
pub fn inverse_transform(datum: &FourierDatum, x: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    let d = *datum;
    let v = integrate(move |xi| d.eval(xi), |xi| x * xi, datum.support(), spec)?;
    Ok(v / TAU)
}

/// `‖f‖_{H^s} = ((2π)^{-1} ∫ (1 + ξ²)^s |f̂(ξ)|² dξ)^{1/2}`.
///
/// Only `|f̂|` enters, so the modulation coefficients are never read.
pub fn sobolev_norm(datum: &FourierDatum, s: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !s.is_finite() {
        return Err(Error::param("s", "must be finite"));
    }
    let (scale, shift) = (datum.scale, datum.shift);
    let weight = datum.amplitude.norm_sqr();
    let v = integrate(
        move |xi| {
            let b = psi(scale * xi + shift);
            Complex64::new((1.0 + xi * xi).powf(s) * b * b, 0.0)
        },
        |_| 0.0,
        datum.support(),
        spec,
    )?;
    Ok((weight * v.re / TAU).sqrt())
}

/// `K_λ(x, t) = λ ∫ e^{i(λxξ + λ^m t|ξ|^m)} ψ²(ξ) dξ`.
pub fn kernel_k(lambda: f64, m: f64, x: f64, t: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    if !(lambda >= 1.0 && lambda.is_finite()) {
        return Err(Error::param("lambda", "kernel requires lambda >= 1"));
    }
    check_m(m)?;
    let lm = lambda.powf(m);
    let v = integrate(
        |xi| {
            let p = psi(xi);
            Complex64::new(p * p, 0.0)
        },
        |xi| lambda * x * xi + lm * t * xi.powf(m),
        Interval {
            lo: BAND_LO,
            hi: BAND_HI,
        },
        spec,
    )?;
    Ok(v * lambda)
}

/// Precomputed quadrature for evaluating one datum's propagator at many
/// `(x, t)` pairs inside a declared window.
///
/// Nodes are a composite Gauss–Legendre rule in the bump variable with at
/// most `π` of phase per panel over the whole window, so every evaluation is
/// a plain weighted exponential sum.
#[derive(Debug, Clone)]
pub struct PropagatorPlan {
    xi: Vec<f64>,
    xi_m: Vec<f64>,
    weights: Vec<Complex64>,
}

/// Period of exact re-evaluation inside [`PropagatorPlan::sweep_line`].
const RESYNC: usize = 32;

impl PropagatorPlan {
    /// Plan valid for `x ∈ [x_lo, x_hi]`, `t ∈ [t_lo, t_hi]`.
    pub fn new(datum: &FourierDatum, m: f64, x_range: (f64, f64), t_range: (f64, f64)) -> Result<Self> {
        check_datum_m(datum, m)?;
        let ymax = (x_range.0 + datum.linear_phase)
            .abs()
            .max((x_range.1 + datum.linear_phase).abs());
        let tmax = (t_range.0 + datum.fractional_phase)
            .abs()
            .max((t_range.1 + datum.fractional_phase).abs());
        let s = datum.support();
        let (lo, hi) = (datum.min_frequency(), datum.max_frequency());
        let variation = ymax * s.width() + tmax * (hi.powf(m) - lo.powf(m));
        let rule = CompositeRule::for_phase_variation(
            Interval {
                lo: BAND_LO,
                hi: BAND_HI,
            },
            variation,
            24,
        );
        let norm = datum.amplitude / (TAU * datum.scale.abs());
        let mut xi = Vec::with_capacity(rule.len());
        let mut xi_m = Vec::with_capacity(rule.len());
        let mut weights = Vec::with_capacity(rule.len());
        for (&eta, &w) in rule.nodes.iter().zip(&rule.weights) {
            let p = psi(eta);
            if p == 0.0 {
                continue;
            }
            let z = datum.xi_of_eta(eta);
            let zm = z.abs().powf(m);
            xi.push(z);
            xi_m.push(zm);
            weights.push(norm * Complex64::from_polar(w * p, datum.linear_phase * z + datum.fractional_phase * zm));
        }
        Ok(Self { xi, xi_m, weights })
    }

    pub fn nodes(&self) -> usize {
        self.xi.len()
    }

    /// `u(x, t)`.
    pub fn eval(&self, x: f64, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((&z, &zm), &w) in self.xi.iter().zip(&self.xi_m).zip(&self.weights) {
            let (s, c) = (x * z + t * zm).sin_cos();
            acc += w * Complex64::new(c, s);
        }
        acc
    }

    /// `|u|` along the line `y = x − θt` at `t_k = t0 + k·dt`, `k < n`.
    ///
    /// The phase is affine in `t` along such a line, so consecutive samples
    /// differ by a fixed per-node rotation.
    pub fn sweep_line(&self, x: f64, theta: f64, t0: f64, dt: f64, n: usize, out: &mut Vec<f64>) {
        out.clear();
        out.reserve(n);
        let len = self.xi.len();
        let mut state = vec![Complex64::new(0.0, 0.0); len];
        let step: Vec<Complex64> = self
            .xi
            .iter()
            .zip(&self.xi_m)
            .map(|(&z, &zm)| Complex64::from_polar(1.0, dt * (zm - theta * z)))
            .collect();
        for k in 0..n {
            if k % RESYNC == 0 {
                let t = t0 + dt * k as f64;
                let y = x - theta * t;
                for j in 0..len {
                    let (s, c) = (y * self.xi[j] + t * self.xi_m[j]).sin_cos();
                    state[j] = self.weights[j] * Complex64::new(c, s);
                }
            } else {
                for j in 0..len {
                    state[j] *= step[j];
                }
            }
            let sum: Complex64 = state.iter().sum();
            out.push(sum.norm());
        }
    }
}

/// `∫_{1/2}^{2} ψ^p`, by a fixed high-order rule (used where a spec-free
/// normalization constant is convenient).
pub fn bump_moment(power: i32) -> f64 {
    let rule = CompositeRule::new(
        Interval {
            lo: BAND_LO,
            hi: BAND_HI,
        },
        64,
        16,
    );
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&x, &w)| w * psi(x).powi(power))
        .sum()
}

/// Convenience: `(2π)^{-1} cos(1/2)`.
pub fn matched_constant() -> f64 {
    0.5f64.cos() / (2.0 * PI)
}
