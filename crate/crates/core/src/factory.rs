//! Explicit counterexample data and matched-point selectors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::CantorSet;
use crate::spectral::{FourierDatum, BAND_HI, BAND_LO};

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 1.0 && lambda.is_finite()) {
        return Err(Error::param("lambda", format!("{lambda} is not a finite real >= 1")));
    }
    Ok(())
}

/// `f̂(ξ) = λ^{m−2} ψ(λ^{m−2}ξ + λ^m)`, supported on negative frequencies.
///
/// The support `[(1/2 − λ^m)λ^{2−m}, (2 − λ^m)λ^{2−m}]` stays away from 0
/// only when `λ^m > 2`.
pub fn knapp_vertical_temporal(lambda: f64, m: f64) -> Result<FourierDatum> {
    if !(lambda >= 2.0 && lambda.is_finite()) {
        return Err(Error::DegenerateSupport(format!("lambda = {lambda} is below 2")));
    }
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::param("m", format!("{m} is not in (0, 1)")));
    }
    let lm = lambda.powf(m);
    if lm <= BAND_HI {
        return Err(Error::DegenerateSupport(format!(
            "lambda^m = {lm} <= 2 puts the frequency support against 0"
        )));
    }
    let a = lambda.powf(m - 2.0);
    FourierDatum::new(Complex64::new(a, 0.0), a, lm, 0.0, 0.0, m)
}

/// `f̂(ξ) = ψ(ξ/λ)`, supported on `[λ/2, 2λ]`.
pub fn knapp_vertical_spatial(lambda: f64, m: f64) -> Result<FourierDatum> {
    check_lambda(lambda)?;
    FourierDatum::dilated(lambda, 1.0, m)
}

/// `f̂(ξ) = e^{i(2^{−κ}θξ − |ξ|^m/2)} λ^{−1} ψ(ξ/λ)`.
pub fn knapp_curve(lambda: f64, m: f64, kappa: f64, theta: f64) -> Result<FourierDatum> {
    check_lambda(lambda)?;
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::param("kappa", "must be a positive real"));
    }
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(Error::param("theta", "must be a nonnegative real"));
    }
    FourierDatum::new(
        Complex64::new(1.0 / lambda, 0.0),
        1.0 / lambda,
        0.0,
        2f64.powf(-kappa) * theta,
        -0.5,
        m,
    )
}

/// `f̂(ξ) = e^{−i|ξ|^m} ψ(λ_k^{−1/m}ξ)`.
///
/// The fractional modulation carries the sign that cancels `t|ξ|^m` at
/// `t = 1`, which is where the line-family selectors place the solution.
pub fn cantor_data(lambda_k: f64, m: f64) -> Result<FourierDatum> {
    check_lambda(lambda_k)?;
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::param("m", format!("{m} is not in (0, 1)")));
    }
    FourierDatum::new(Complex64::new(1.0, 0.0), lambda_k.powf(-1.0 / m), 0.0, 0.0, -1.0, m)
}

/// Coefficients of `(1 + u)^κ` up to order `N − 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaylorCoefficients {
    pub kappa: f64,
    pub n: usize,
    pub coeffs: Vec<f64>,
}

/// Least `N` with `mN > 1`, plus one.
pub fn default_order(m: f64) -> usize {
    (1.0 / m).ceil() as usize + 1
}

pub fn taylor_coeffs(kappa: f64, n: usize) -> Result<TaylorCoefficients> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::param("kappa", "must be a positive real"));
    }
    if n == 0 {
        return Err(Error::param("n", "must be positive"));
    }
    let mut coeffs = Vec::with_capacity(n);
    coeffs.push(1.0);
    for j in 1..n {
        let prev = coeffs[j - 1];
        coeffs.push(prev * (kappa - j as f64 + 1.0) / j as f64);
    }
    Ok(TaylorCoefficients { kappa, n, coeffs })
}

impl TaylorCoefficients {
    /// `h_N(τ) = 2^{−κ} Σ_{j=1}^{N−1} a_j (2τ)^j`.
    pub fn h_n_eval(&self, tau: f64) -> f64 {
        let u = 2.0 * tau;
        let mut acc = 0.0;
        for &a in self.coeffs.iter().skip(1).rev() {
            acc = (acc + a) * u;
        }
        acc * 2f64.powf(-self.kappa)
    }

    /// Solves `h_N(τ) = x` for `τ ∈ [0, domain_hi]` by bisection after
    /// checking monotonicity on a sample of the domain.
    pub fn h_n_invert(&self, x: f64, domain_hi: f64) -> Result<f64> {
        if !(domain_hi > 0.0 && domain_hi.is_finite()) {
            return Err(Error::param("domain_hi", "must be positive"));
        }
        const SAMPLES: usize = 256;
        let mut prev = self.h_n_eval(0.0);
        for i in 1..=SAMPLES {
            let tau = domain_hi * i as f64 / SAMPLES as f64;
            let v = self.h_n_eval(tau);
            if !(v > prev) {
                return Err(Error::NonMonotone(tau));
            }
            prev = v;
        }
        let top = self.h_n_eval(domain_hi);
        if !(0.0..=top).contains(&x) {
            return Err(Error::OutOfRange(format!(
                "x = {x} is outside the image [0, {top}] of h_N"
            )));
        }
        let (mut lo, mut hi) = (0.0, domain_hi);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.h_n_eval(mid) < x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(if (self.h_n_eval(lo) - x).abs() <= (self.h_n_eval(hi) - x).abs() {
            lo
        } else {
            hi
        })
    }
}

/// A point where a counterexample's phase nearly cancels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedPoint {
    pub x: f64,
    pub tau: f64,
    /// Line slope (line families) or curve tilt (curve case).
    pub theta: f64,
    /// Time at which the solution is read.
    pub t: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedCurvePoint {
    pub point: MatchedPoint,
    /// Largest phase residual over the band.
    pub residual: f64,
}

/// Upper end `λ^{−m}/100` of the τ-domain used for the curve construction.
pub fn curve_tau_domain(lambda: f64, m: f64) -> f64 {
    lambda.powf(-m) / 100.0
}

/// Residual phase `λ(x − θ(τ+1/2)^κ)ξ + λ^m ξ^m τ + λ2^{−κ}θξ` of the curve
/// datum read at `t = 1/2 + τ`, maximised over 1000 points of the band.
pub fn curve_phase_residual(x: f64, tau: f64, lambda: f64, m: f64, kappa: f64, theta: f64) -> f64 {
    let lin = lambda * (x - theta * (tau + 0.5).powf(kappa) + 2f64.powf(-kappa) * theta);
    let frac = lambda.powf(m) * tau;
    (0..1000)
        .map(|i| {
            let xi = BAND_LO + (BAND_HI - BAND_LO) * i as f64 / 999.0;
            (lin * xi + frac * xi.powf(m)).abs()
        })
        .fold(0.0, f64::max)
}

/// Matched time `t = 1/2 + τ(x)` for the curve datum, `τ(x) = h_N^{−1}(x/θ)`.
pub fn matched_point_curve(x: f64, lambda: f64, m: f64, kappa: f64, theta: f64) -> Result<MatchedCurvePoint> {
    check_lambda(lambda)?;
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::param("theta", "matched points need theta > 0"));
    }
    let coeffs = taylor_coeffs(kappa, default_order(m))?;
    let tau = coeffs.h_n_invert(x / theta, curve_tau_domain(lambda, m))?;
    let residual = curve_phase_residual(x, tau, lambda, m, kappa, theta);
    if residual > 0.6 {
        return Err(Error::PhaseMismatch(residual));
    }
    Ok(MatchedCurvePoint {
        point: MatchedPoint {
            x,
            tau,
            theta,
            t: 0.5 + tau,
            lambda,
        },
        residual,
    })
}

/// Largest `x` admitted by [`matched_point_curve`].
pub fn matched_curve_window(lambda: f64, m: f64, kappa: f64, theta: f64) -> Result<f64> {
    let coeffs = taylor_coeffs(kappa, default_order(m))?;
    Ok(theta * coeffs.h_n_eval(curve_tau_domain(lambda, m)))
}

/// Line-family selectors: `θ(x)` is the right end of the component holding
/// `x`, `τ = (θ − x)/θ` and `t = 1 − τ`.
pub fn cantor_selectors(x: f64, cantor: &CantorSet) -> Result<MatchedPoint> {
    if !(x > 0.5 && x <= 1.0) {
        return Err(Error::NotInPrefractalWindow(x));
    }
    let comp = cantor.component_of(x).ok_or(Error::NotInPrefractalWindow(x))?;
    let theta = comp[1];
    let tau = (theta - x) / theta;
    Ok(MatchedPoint {
        x,
        tau,
        theta,
        t: 1.0 - tau,
        lambda: cantor.ratio.powi(-(cantor.level as i32)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::cantor_level;
    use crate::quadrature::QuadratureSpec;
    use crate::spectral::sobolev_norm;
    use crate::regression::fit_loglog;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn temporal_knapp_support() {
        assert!(matches!(knapp_vertical_temporal(1.0, 0.5), Err(Error::DegenerateSupport(_))));
        // λ = 4, m = 1/2: 1/2 ≤ ξ/8 + 2 ≤ 2 gives [−12, 0], which touches 0.
        assert!(matches!(knapp_vertical_temporal(4.0, 0.5), Err(Error::DegenerateSupport(_))));
        let d = knapp_vertical_temporal(16.0, 0.5).unwrap();
        let s = d.support();
        assert_relative_eq!(s.lo, (0.5 - 4.0) * 16f64.powf(1.5), epsilon = 1e-9);
        assert_relative_eq!(s.hi, (2.0 - 4.0) * 16f64.powf(1.5), epsilon = 1e-9);
    }

    #[test]
    fn spatial_knapp_support() {
        let s = knapp_vertical_spatial(2.0, 0.5).unwrap().support();
        assert_eq!((s.lo, s.hi), (1.0, 4.0));
    }

    #[test]
    fn curve_datum_modulus() {
        let d = knapp_curve(64.0, 0.5, 2.0, 1.0).unwrap();
        let plain = FourierDatum::dilated(64.0, 1.0 / 64.0, 0.5).unwrap();
        for i in 0..50 {
            let xi = 30.0 + 100.0 * i as f64 / 50.0;
            assert_relative_eq!(d.eval(xi).norm(), plain.eval(xi).norm(), epsilon = 1e-15);
        }
        let flat = knapp_curve(64.0, 0.5, 3.0, 0.0).unwrap();
        assert_eq!(flat.linear_phase, 0.0);
        assert_eq!(flat.fractional_phase, -0.5);
    }

    #[test]
    fn sobolev_slopes() {
        let spec = QuadratureSpec::default();
        let s = 0.3;
        let ladder: Vec<f64> = (4..=10).map(|j| 2f64.powi(j)).collect();
        let curve: Vec<(f64, f64)> = ladder
            .iter()
            .map(|&l| (l, sobolev_norm(&knapp_curve(l, 0.5, 2.0, 1.0).unwrap(), s, &spec).unwrap()))
            .collect();
        assert!((fit_loglog(&curve).unwrap().slope - (s - 0.5)).abs() < 0.02);
        let spatial: Vec<(f64, f64)> = ladder
            .iter()
            .map(|&l| (l, sobolev_norm(&knapp_vertical_spatial(l, 0.5).unwrap(), s, &spec).unwrap()))
            .collect();
        assert!((fit_loglog(&spatial).unwrap().slope - (s + 0.5)).abs() < 0.02);
    }

    #[test]
    fn cantor_datum_support() {
        let d = cantor_data(64.0, 0.5).unwrap();
        let s = d.support();
        assert_relative_eq!(s.lo, 4096.0 / 2.0, max_relative = 1e-14);
        assert_relative_eq!(s.hi, 2.0 * 4096.0, max_relative = 1e-14);
    }

    #[test]
    fn taylor_examples() {
        assert_eq!(taylor_coeffs(2.0, 4).unwrap().coeffs, vec![1.0, 2.0, 1.0, 0.0]);
        assert_eq!(taylor_coeffs(1.0, 3).unwrap().coeffs, vec![1.0, 1.0, 0.0]);
        assert_eq!(taylor_coeffs(1.5, 3).unwrap().coeffs, vec![1.0, 1.5, 0.375]);
        assert_eq!(default_order(0.5), 3);
        assert!(0.5 * default_order(0.5) as f64 > 1.0);
    }

    #[test]
    fn h_n_inversion() {
        let hi = curve_tau_domain(256.0, 0.5);
        let k1 = taylor_coeffs(1.0, 3).unwrap();
        for i in 0..=20 {
            let x = hi * i as f64 / 20.0;
            assert!((k1.h_n_invert(x, hi).unwrap() - x).abs() < 1e-15);
        }
        let k2 = taylor_coeffs(2.0, 4).unwrap();
        for i in 0..=20 {
            let tau = hi * i as f64 / 20.0;
            let x = tau + tau * tau;
            // positive root of τ² + τ − x
            let root = (-1.0 + (1.0 + 4.0 * x).sqrt()) / 2.0;
            let inv = k2.h_n_invert(x, hi).unwrap();
            assert!((inv - root).abs() < 1e-12);
            assert!((k2.h_n_eval(inv) - x).abs() < 1e-10);
        }
        assert!(matches!(k2.h_n_invert(1.0, hi), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn matched_curve_points() {
        let p = matched_point_curve(0.0, 256.0, 0.5, 2.0, 1.0).unwrap();
        assert_eq!(p.point.tau, 0.0);
        assert_eq!(p.point.t, 0.5);
        assert!(p.residual < 1e-12);
        let x = 256f64.powf(-0.5) / 200.0;
        let p = matched_point_curve(x, 256.0, 0.5, 2.0, 1.0).unwrap();
        assert!(p.residual <= 0.5);
        let mut prev = f64::INFINITY;
        for i in (0..=10).rev() {
            let x = matched_curve_window(256.0, 0.5, 1.5, 1.0).unwrap() * i as f64 / 10.0;
            let r = matched_point_curve(x, 256.0, 0.5, 1.5, 1.0).unwrap().residual;
            assert!(r <= prev + 1e-12);
            prev = r;
        }
        assert!(prev < 1e-12);
    }

    #[test]
    fn cantor_selector_examples() {
        let c = cantor_level(1.0 / 3.0, 2).unwrap();
        let p = cantor_selectors(1.0, &c).unwrap();
        assert_eq!((p.theta, p.tau, p.t), (1.0, 0.0, 1.0));
        let p = cantor_selectors(0.9, &c).unwrap();
        assert_eq!(p.theta, 1.0);
        assert!((p.tau - 0.1).abs() < 1e-15 && (p.t - 0.9).abs() < 1e-15);
        assert!(matches!(cantor_selectors(0.8, &c), Err(Error::NotInPrefractalWindow(_))));
        assert!(matches!(cantor_selectors(0.2, &c), Err(Error::NotInPrefractalWindow(_))));
    }

    proptest! {
        #[test]
        fn h_n_round_trip(kappa in 1.0f64..4.0, lexp in 2.0f64..12.0, m in 0.1f64..0.9, u in 0.0f64..1.0) {
            let lambda = 2f64.powf(lexp);
            let hi = curve_tau_domain(lambda, m);
            let c = taylor_coeffs(kappa, default_order(m)).unwrap();
            let x = c.h_n_eval(hi) * u;
            let tau = c.h_n_invert(x, hi).unwrap();
            prop_assert!((c.h_n_eval(tau) - x).abs() <= 1e-10);
            prop_assert!((0.0..=hi).contains(&tau));
        }

        #[test]
        fn matched_residual_is_small(kappa in 1.0f64..3.0, lexp in 4.0f64..12.0, u in 0.0f64..1.0) {
            let lambda = 2f64.powf(lexp);
            let x = matched_curve_window(lambda, 0.5, kappa, 1.0).unwrap() * u;
            let p = matched_point_curve(x, lambda, 0.5, kappa, 1.0).unwrap();
            prop_assert!(p.residual <= 0.5 + 1e-6);
        }

        #[test]
        fn selectors_stay_in_component(r in 0.05f64..0.49, k in 1u32..8, u in 0.0f64..1.0, pick in 0usize..1000) {
            let c = cantor_level(r, k).unwrap();
            let window: Vec<_> = c.intervals.iter().filter(|iv| iv[0] > 0.5).collect();
            prop_assume!(!window.is_empty());
            let iv = window[pick % window.len()];
            let x = iv[0] + (iv[1] - iv[0]) * u;
            let p = cantor_selectors(x, &c).unwrap();
            prop_assert!((x - p.theta).abs() <= r.powi(k as i32) * (1.0 + 1e-12));
            prop_assert!(p.tau >= 0.0 && p.tau <= 2.0 * r.powi(k as i32));
            // θ stays an endpoint of every deeper level
            let deeper = cantor_level(r, k + 2).unwrap();
            prop_assert!(deeper.intervals.iter().any(|d| d[1] == p.theta));
        }

        #[test]
        fn factory_supports_avoid_zero(lexp in 1.5f64..12.0, m in 0.1f64..0.9) {
            let lambda = 2f64.powf(lexp);
            for d in [
                knapp_vertical_spatial(lambda, m),
                knapp_curve(lambda, m, 2.0, 1.0),
                cantor_data(lambda, m),
            ] {
                let d = d.unwrap();
                prop_assert!(d.min_frequency() > 0.0);
            }
            if lambda.powf(m) > 2.0 {
                prop_assert!(knapp_vertical_temporal(lambda, m).unwrap().min_frequency() > 0.0);
            }
        }
    }
}
