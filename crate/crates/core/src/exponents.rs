//! Closed-form regularity thresholds, critical exponents and dimension bounds.
//!
//! Every function validates the inputs it reads and never clamps silently.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Curve exponent κ, with the vertical line as its own case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Kappa {
    Finite(f64),
    Infinite,
}

impl Kappa {
    pub fn finite(k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::param("kappa", format!("{k} is not a positive real")));
        }
        Ok(Kappa::Finite(k))
    }
}

impl std::str::FromStr for Kappa {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Kappa::Infinite),
            other => other
                .parse::<f64>()
                .map_err(|_| Error::param("kappa", format!("cannot parse `{other}`")))
                .and_then(Kappa::finite),
        }
    }
}

fn check_m_concave(m: f64) -> Result<()> {
    if !(m > 0.0 && m <= 1.0) {
        return Err(Error::param("m", format!("{m} is not in (0, 1]")));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param("alpha", format!("{alpha} is not in (0, 1]")));
    }
    Ok(())
}

fn check_q(q: f64) -> Result<()> {
    if !(q >= 2.0 && q.is_finite()) {
        return Err(Error::param("q", format!("{q} is not a finite real >= 2")));
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::param("beta", format!("{beta} is not in [0, 1]")));
    }
    Ok(())
}

fn check_finite(name: &'static str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::param(name, "must be finite"));
    }
    Ok(())
}

fn check_maq(m: f64, alpha: f64, q: f64) -> Result<()> {
    check_m_concave(m)?;
    check_alpha(alpha)?;
    check_q(q)
}

/// Regularity threshold for the vertical-line maximal estimate against
/// α-dimensional measures.
pub fn threshold_vertical(m: f64, alpha: f64, q: f64) -> Result<f64> {
    check_maq(m, alpha, q)?;
    Ok((0.5 - m / 4.0 - (1.0 - m) * alpha / q).max(0.5 - alpha / q))
}

pub fn s_star_vertical(m: f64, alpha: f64, q: f64) -> Result<f64> {
    check_maq(m, alpha, q)?;
    Ok((m / 4.0 + (1.0 - m) * alpha / q).min(alpha / q))
}

pub fn s_star_curve(m: f64, alpha: f64, q: f64) -> Result<f64> {
    check_maq(m, alpha, q)?;
    Ok((m / 4.0).min(m * alpha / q))
}

pub fn s_star_lines(m: f64, alpha: f64, q: f64) -> Result<f64> {
    check_maq(m, alpha, q)?;
    Ok((m / 4.0).min(alpha / q))
}

/// Divergence-set dimension bound along vertical lines, valid for
/// `s ∈ (m/4, 1/2)`. With `extended`, `s ≤ m/4` returns the trivial bound 1.
pub fn dim_bound_vertical(s: f64, m: f64, extended: bool) -> Result<f64> {
    check_finite("s", s)?;
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::param("m", format!("{m} is not in (0, 1)")));
    }
    if extended && s <= m / 4.0 {
        return Ok(1.0);
    }
    if !(s > m / 4.0 && s < 0.5) {
        return Err(Error::OutOfTheoremRange(format!(
            "s = {s} is outside ({}, 1/2)",
            m / 4.0
        )));
    }
    Ok((1.0 - 2.0 * s).max(0.5 + (1.0 - 4.0 * s) / (2.0 * (1.0 - m))))
}

/// Dimension bound along a non-tangential curve, valid for
/// `s ∈ (1/2 − m/4, 1/2)`.
pub fn dim_bound_curve(s: f64, m: f64) -> Result<f64> {
    check_finite("s", s)?;
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::param("m", format!("{m} is not in (0, 1)")));
    }
    let lo = 0.5 - m / 4.0;
    if !(s > lo && s < 0.5) {
        return Err(Error::OutOfTheoremRange(format!("s = {s} is outside ({lo}, 1/2)")));
    }
    Ok((1.0 - 2.0 * s) / m)
}

/// Regularity threshold for line families with direction set of Minkowski
/// dimension β.
pub fn threshold_lines(m: f64, beta: f64) -> Result<f64> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::param("m", format!("{m} is not in (0, 1)")));
    }
    check_beta(beta)?;
    Ok(0.5 - m / 4.0 + m * beta / 4.0)
}

/// Dimension bound for line families, valid for
/// `s ∈ ((2 − m + mβ)/4, 1/2)`.
pub fn dim_bound_lines(s: f64, m: f64, beta: f64) -> Result<f64> {
    check_finite("s", s)?;
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::param("m", format!("{m} is not in (0, 1)")));
    }
    check_beta(beta)?;
    let lo = (2.0 - m + m * beta) / 4.0;
    if !(s > lo && s < 0.5) {
        return Err(Error::OutOfTheoremRange(format!("s = {s} is outside ({lo}, 1/2)")));
    }
    let a = (1.0 - 2.0 * s + m * beta) / m;
    let b = m * beta / (4.0 * s - 2.0 + m);
    Ok(a.max(b))
}

fn check_m_regime(m: f64) -> Result<()> {
    if !(m > 0.0 && m.is_finite()) || m == 1.0 {
        return Err(Error::param("m", format!("{m} must be positive, finite and different from 1")));
    }
    Ok(())
}

/// Case table of convergence thresholds along `x − θt^κ`, for both `m > 1`
/// and `m < 1`.
pub fn summary_thresholds(m: f64, kappa: Kappa) -> Result<f64> {
    check_m_regime(m)?;
    if let Kappa::Finite(k) = kappa {
        Kappa::finite(k)?;
    }
    Ok(match (m > 1.0, kappa) {
        (true, Kappa::Finite(k)) => 0.25f64.max((1.0 - m * k) / 2.0),
        (true, Kappa::Infinite) => 0.25,
        (false, Kappa::Finite(k)) => (0.5 - m / 4.0).max((1.0 - m * k) / 2.0),
        (false, Kappa::Infinite) => m / 4.0,
    })
}

/// Case table of dimension bounds matching [`summary_thresholds`].
pub fn summary_dim_bound(s: f64, m: f64, kappa: Kappa) -> Result<f64> {
    check_finite("s", s)?;
    check_m_regime(m)?;
    if let Kappa::Finite(k) = kappa {
        Kappa::finite(k)?;
    }
    let base = 0f64.max(1.0 - 2.0 * s);
    Ok(match (m > 1.0, kappa) {
        (_, Kappa::Finite(k)) => base.max((1.0 - 2.0 * s) / (m * k)),
        (true, Kappa::Infinite) => base,
        (false, Kappa::Infinite) => base.max(0.5 + (1.0 - 4.0 * s) / (2.0 * (1.0 - m))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eq(a: f64, b: f64) {
        assert!((a - b).abs() <= 1e-12, "{a} != {b}");
    }

    #[test]
    fn vertical_threshold_values() {
        eq(threshold_vertical(0.5, 1.0, 2.0).unwrap(), 0.125);
        eq(threshold_vertical(1.0, 1.0, 2.0).unwrap(), 0.25);
        eq(threshold_vertical(0.5, 1.0, 4.0).unwrap(), 0.25);
        assert!(threshold_vertical(0.5, 1.5, 2.0).is_err());
        assert!(threshold_vertical(0.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn critical_exponents() {
        eq(s_star_vertical(0.5, 1.0, 2.0).unwrap(), 0.375);
        eq(s_star_curve(0.5, 1.0, 2.0).unwrap(), 0.125);
        eq(s_star_lines(0.5, 1.0, 2.0).unwrap(), 0.125);
    }

    #[test]
    fn vertical_dimension_bound() {
        for m in [0.1, 0.5, 0.9] {
            eq(dim_bound_vertical(0.25, m, false).unwrap(), 0.5);
            // both branches meet at s = 1/4
            eq(1.0 - 2.0 * 0.25, 0.5 + (1.0 - 4.0 * 0.25) / (2.0 * (1.0 - m)));
            let near = dim_bound_vertical(m / 4.0 + 1e-13, m, false).unwrap();
            assert!((near - 1.0).abs() < 1e-9);
        }
        eq(dim_bound_vertical(0.3, 0.5, false).unwrap(), 0.4);
        assert!(matches!(dim_bound_vertical(0.1, 0.5, false), Err(Error::OutOfTheoremRange(_))));
        eq(dim_bound_vertical(0.1, 0.5, true).unwrap(), 1.0);
        assert!(dim_bound_vertical(0.5, 0.5, true).is_err());
    }

    #[test]
    fn curve_dimension_bound() {
        eq(dim_bound_curve(0.4, 0.5).unwrap(), 0.4);
        assert!(dim_bound_curve(0.5 - 1e-12, 0.5).unwrap() < 1e-10);
        eq(dim_bound_curve(0.45, 0.25).unwrap(), 0.4);
        assert!(dim_bound_curve(0.3, 0.5).is_err());
    }

    #[test]
    fn line_family_bounds() {
        eq(threshold_lines(0.5, 0.5).unwrap(), 0.4375);
        eq(dim_bound_lines(0.45, 0.5, 0.5).unwrap(), 0.25 / 0.3);
        for m in [0.2, 0.5, 0.8] {
            eq(threshold_lines(m, 0.0).unwrap(), 0.5 - m / 4.0);
            for i in 1..10 {
                let s = 0.5 - m / 4.0 + (m / 4.0) * i as f64 / 10.0;
                assert_eq!(dim_bound_lines(s, m, 0.0).unwrap(), dim_bound_curve(s, m).unwrap());
            }
        }
    }

    #[test]
    fn summary_table() {
        eq(summary_thresholds(0.5, Kappa::Infinite).unwrap(), 0.125);
        eq(summary_thresholds(0.5, Kappa::Finite(1.0)).unwrap(), 0.375);
        eq(summary_thresholds(2.0, Kappa::Finite(1.0)).unwrap(), 0.25);
        eq(summary_thresholds(2.0, Kappa::Infinite).unwrap(), 0.25);
        eq(summary_dim_bound(0.3, 0.5, Kappa::Infinite).unwrap(), 0.4);
        eq(summary_dim_bound(0.4, 2.0, Kappa::Finite(0.25)).unwrap(), 0.4);
        assert!(summary_thresholds(1.0, Kappa::Infinite).is_err());
        assert!(summary_thresholds(0.5, Kappa::Finite(0.0)).is_err());
        assert_eq!("inf".parse::<Kappa>().unwrap(), Kappa::Infinite);
        assert_eq!("2".parse::<Kappa>().unwrap(), Kappa::Finite(2.0));
    }

    #[test]
    fn dimension_bounds_decrease_in_s() {
        for m in [0.2, 0.5, 0.8] {
            let mut prev = f64::INFINITY;
            for i in 1..200 {
                let s = m / 4.0 + (0.5 - m / 4.0) * i as f64 / 200.0;
                let v = dim_bound_vertical(s, m, false).unwrap();
                assert!(v <= prev + 1e-15);
                prev = v;
            }
        }
    }

    #[test]
    fn thresholds_decrease_in_m_where_implied() {
        for beta in [0.0, 0.3, 1.0] {
            let mut prev = f64::INFINITY;
            for i in 1..100 {
                let v = threshold_lines(i as f64 / 100.0, beta).unwrap();
                assert!(v <= prev + 1e-15);
                prev = v;
            }
        }
        let mut prev = f64::INFINITY;
        for i in 1..100 {
            let v = summary_thresholds(i as f64 / 100.0, Kappa::Finite(1.0)).unwrap();
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }
}
