//! The experiment pipelines behind each subcommand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exponents::{self, Kappa};
use crate::factory::{
    cantor_data, cantor_selectors, knapp_curve, knapp_vertical_spatial, knapp_vertical_temporal,
    matched_curve_window, matched_point_curve,
};
use crate::geometry::{
    bilinear_form_check, cantor_level, covering_number, frostman_constant, minkowski_dimension, AlphaMeasure,
    BilinearWeight, Curve, SampledField, XGrid,
};
use crate::maximal::{line_value, mixed_norm, GridSpec, MaximalEngine, Path};
use crate::phase::{check_kernel_envelope, EnvelopeParams, Variant};
use crate::quadrature::QuadratureSpec;
use crate::regression::{fit_loglog, LogLogFit};
use crate::spectral::{bump_moment, inverse_transform, matched_constant, propagate, sobolev_norm, FourierDatum};

use super::config::{parse_range, RunConfig};
use super::report::{fmt, Check, Comparison, LadderPoint, Outcome, Report, Table};

/// Tolerance on slopes of maximal-function norms.
pub const MAXIMAL_TOLERANCE: f64 = 0.1;
/// Tolerance on slopes of frequency-side norms.
pub const FREQUENCY_TOLERANCE: f64 = 0.02;
/// Tolerance on slopes of kernel envelope ratios.
pub const ENVELOPE_TOLERANCE: f64 = 0.05;

pub const EXPERIMENTS: &[&str] = &[
    "propagate",
    "kernel-envelope",
    "sharpness-vertical",
    "sharpness-curve",
    "sharpness-lines",
    "proposition-lines",
    "covering",
    "frostman",
    "cantor",
    "exponent-table",
    "bilinear-check",
];

/// Run the pipeline named by `config.experiment`.
pub fn run_experiment(config: &RunConfig) -> Result<Outcome> {
    match config.experiment.as_str() {
        "propagate" => run_propagate(config),
        "kernel-envelope" => run_kernel_envelope(config),
        "sharpness-vertical" => run_sharpness_vertical(config),
        "sharpness-curve" => run_sharpness_curve(config),
        "sharpness-lines" => run_sharpness_lines(config),
        "proposition-lines" => run_proposition_lines(config),
        "covering" => run_covering(config),
        "frostman" => run_frostman(config),
        "cantor" => run_cantor(config),
        "exponent-table" => run_exponent_table(config),
        "bilinear-check" => run_bilinear_check(config),
        other => Err(Error::Config(format!("unknown experiment {other:?}"))),
    }
}

fn tolerance(config: &RunConfig, default: f64) -> f64 {
    config.tolerance.unwrap_or(default)
}

fn fit_of<F: Fn(&LadderPoint) -> Option<f64>>(points: &[LadderPoint], f: F) -> Result<LogLogFit> {
    let pts: Vec<(f64, f64)> = points.iter().filter_map(|p| f(p).map(|v| (p.lambda, v))).collect();
    fit_loglog(&pts)
}

/// Cell midpoints, or with a seed, points drawn uniformly from the middle
/// half of each cell.
pub fn sample_points(grid: &XGrid, seed: Option<u64>) -> Vec<f64> {
    match seed {
        None => grid.midpoints(),
        Some(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            grid.edges()
                .windows(2)
                .map(|w| {
                    let u: f64 = rng.gen_range(0.25..0.75);
                    w[0] + u * (w[1] - w[0])
                })
                .collect()
        }
    }
}

/// Datum addressed by factory name.
pub fn datum_by_name(name: &str, lambda: f64, config: &RunConfig) -> Result<FourierDatum> {
    let m = config.m;
    match name {
        "bump" => FourierDatum::bump(m),
        "spatial" | "spatial-knapp" => knapp_vertical_spatial(lambda, m),
        "temporal" | "temporal-knapp" => knapp_vertical_temporal(lambda, m),
        "curve" | "curve-knapp" => knapp_curve(lambda, m, config.finite_kappa()?, config.theta),
        "cantor" => cantor_data(lambda, m),
        other => Err(Error::Config(format!("unknown datum {other:?}"))),
    }
}

fn run_propagate(config: &RunConfig) -> Result<Outcome> {
    let spec = config.quadrature()?;
    let datum = datum_by_name(&config.datum, config.lambda, config)?;
    let xs = sample_points(&XGrid::uniform(config.nx)?, config.seed);
    let rows: Vec<(f64, num_complex::Complex64)> = xs
        .par_iter()
        .map(|&x| propagate(&datum, config.m, x, config.t, &spec).map(|u| (x, u)))
        .collect::<Result<_>>()?;
    let mut table = Table::new(&["x", "t", "re", "im", "modulus"]);
    for (x, u) in &rows {
        table.push(vec![fmt(*x), fmt(config.t), fmt(u.re), fmt(u.im), fmt(u.norm())]);
    }
    let mut report = Report::new(config);
    if config.t == 0.0 {
        let scale = rows.iter().map(|r| r.1.norm()).fold(0.0, f64::max);
        let mut worst: f64 = 0.0;
        for (x, u) in &rows {
            let v = inverse_transform(&datum, *x, &spec)?;
            worst = worst.max((v - u).norm() / scale);
        }
        report.check(Check::new("inverse_transform_identity", worst, 0.0, 1e-8, Comparison::AtMost));
    }
    Ok(Outcome { report, table })
}

fn run_kernel_envelope(config: &RunConfig) -> Result<Outcome> {
    let spec = config.quadrature()?;
    let ladder = config.ladder()?;
    let variant = config.variant_value()?;
    let mut template = EnvelopeParams::new(variant, ladder[0], config.m, config.alpha, config.q, config.eps)?;
    if variant == Variant::Curve {
        template = template.with_curve(config.finite_kappa()?, config.theta)?;
    }
    let env = check_kernel_envelope(&template, &ladder, config.nx, config.nt, &spec)?;
    let mut report = Report::new(config);
    let mut table = Table::new(&["lambda", "value", "argmax_x", "argmax_t", "failures"]);
    for row in &env.rows {
        report.points.push(LadderPoint {
            lambda: row.lambda,
            value: row.sup_ratio,
            hs_norm: None,
            ratio: None,
        });
        table.push(vec![
            fmt(row.lambda),
            fmt(row.sup_ratio),
            fmt(row.argmax_x),
            fmt(row.argmax_t),
            row.failures.to_string(),
        ]);
    }
    report.headline(&env.fit, 0.0, tolerance(config, ENVELOPE_TOLERANCE), Comparison::AtMost);
    report.check(Check::new("quadrature_failures", env.failures as f64, 0.0, 0.0, Comparison::AtMost));
    Ok(Outcome { report, table })
}

/// Mixed norm of the maximal function of `datum` over the cells of `xgrid`.
#[allow(clippy::too_many_arguments)]
fn maximal_mixed_norm<F>(
    datum: &FourierDatum,
    m: f64,
    path: Path,
    grid: GridSpec,
    xgrid: &XGrid,
    measure: &AlphaMeasure,
    q: f64,
    seed: Option<u64>,
    inject: F,
) -> Result<(f64, Vec<f64>)>
where
    F: Fn(f64) -> Vec<(f64, f64)> + Sync,
{
    let edges = xgrid.edges();
    let engine = MaximalEngine::new(datum, m, path, grid, (edges[0], edges[edges.len() - 1]))?;
    let xs = sample_points(xgrid, seed);
    let values = engine.maximal_field(&xs, inject)?;
    Ok((mixed_norm(&values, xgrid, measure, q)?, values))
}

/// Geometric x-grid resolving scale `first` near the origin.
fn concentration_grid(first: f64, per_octave: usize) -> Result<XGrid> {
    XGrid::geometric(first.min(0.5), per_octave)
}

fn run_sharpness_vertical(config: &RunConfig) -> Result<Outcome> {
    let spec = config.quadrature()?;
    let ladder = config.ladder()?;
    let measure = AlphaMeasure::new(config.alpha)?;
    let grid = config.grid()?;
    let (m, q, s) = (config.m, config.q, config.s);
    let tol = tolerance(config, MAXIMAL_TOLERANCE);
    let which = config.datum.as_str();
    if !matches!(which, "spatial" | "temporal" | "both") {
        return Err(Error::Config(format!("datum must be spatial, temporal or both, not {which:?}")));
    }
    let mut report = Report::new(config);
    let mut table = Table::new(&["datum", "lambda", "value", "hs_norm", "ratio"]);

    if which != "temporal" {
        let mut points = Vec::new();
        for &lambda in &ladder {
            let d = knapp_vertical_spatial(lambda, m)?;
            let xg = concentration_grid(1.0 / (8.0 * lambda), config.per_octave)?;
            let g = grid.sized_for(&d, 0.0);
            let (norm, _) =
                maximal_mixed_norm(&d, m, Path::Curve(Curve::Vertical), g, &xg, &measure, q, config.seed, |_| {
                    Vec::new()
                })?;
            let hs = sobolev_norm(&d, s, &spec)?;
            points.push(LadderPoint {
                lambda,
                value: norm,
                hs_norm: Some(hs),
                ratio: Some(norm / hs),
            });
        }
        let fit = fit_of(&points, |p| Some(p.value))?;
        report.headline(&fit, 1.0 - config.alpha / q, tol, Comparison::Within);
        let hs_fit = fit_of(&points, |p| p.hs_norm)?;
        report.check(Check::new(
            "spatial_hs_slope",
            hs_fit.slope,
            s + 0.5,
            FREQUENCY_TOLERANCE,
            Comparison::Within,
        ));
        report.measure("spatial_ratio_slope", fit_of(&points, |p| p.ratio)?.slope);
        for p in &points {
            table.push(vec!["spatial".into(), fmt(p.lambda), fmt(p.value), fmt(p.hs_norm.unwrap()), fmt(p.ratio.unwrap())]);
        }
        report.points = points;
    }

    if which != "spatial" {
        let mut points = Vec::new();
        for &lambda in ladder.iter().filter(|&&l| l <= config.temporal_lambda_max) {
            let d = match knapp_vertical_temporal(lambda, m) {
                Ok(d) => d,
                Err(Error::DegenerateSupport(_)) => continue,
                Err(e) => return Err(e),
            };
            let xg = concentration_grid(lambda.powf(m - 2.0) / 8.0, config.per_octave)?;
            let g = grid.sized_for(&d, 0.0);
            let (norm, _) =
                maximal_mixed_norm(&d, m, Path::Curve(Curve::Vertical), g, &xg, &measure, q, config.seed, |_| {
                    Vec::new()
                })?;
            let hs = sobolev_norm(&d, s, &spec)?;
            points.push(LadderPoint {
                lambda,
                value: norm,
                hs_norm: Some(hs),
                ratio: Some(norm / hs),
            });
        }
        if points.len() >= 2 {
            let fit = fit_of(&points, |p| Some(p.value))?;
            if which == "temporal" {
                report.measured(&fit);
            }
            report.measure("temporal_mixed_slope", fit.slope);
            report.measure("temporal_hs_slope", fit_of(&points, |p| p.hs_norm)?.slope);
            report.measure("temporal_ratio_slope", fit_of(&points, |p| p.ratio)?.slope);
        }
        for p in &points {
            table.push(vec!["temporal".into(), fmt(p.lambda), fmt(p.value), fmt(p.hs_norm.unwrap()), fmt(p.ratio.unwrap())]);
        }
        if which == "temporal" {
            report.points = points;
        }
    }
    Ok(Outcome { report, table })
}

fn run_sharpness_curve(config: &RunConfig) -> Result<Outcome> {
    let spec = config.quadrature()?;
    let ladder = config.ladder()?;
    let measure = AlphaMeasure::new(config.alpha)?;
    let grid = config.grid()?;
    let (m, q, s, theta) = (config.m, config.q, config.s, config.theta);
    let kappa = config.finite_kappa()?;
    let curve = Curve::power(theta, kappa)?;
    let floor = matched_constant() * bump_moment(1);
    let mut report = Report::new(config);
    let mut points = Vec::new();
    let mut worst_residual: f64 = 0.0;
    let mut weakest: f64 = f64::INFINITY;
    for &lambda in &ladder {
        let d = knapp_curve(lambda, m, kappa, theta)?;
        let window = matched_curve_window(lambda, m, kappa, theta)?;
        let xg = XGrid::uniform_on(0.0, window, config.nx)?;
        let matched: Vec<_> = sample_points(&xg, config.seed)
            .iter()
            .map(|&x| matched_point_curve(x, lambda, m, kappa, theta))
            .collect::<Result<_>>()?;
        worst_residual = matched.iter().map(|p| p.residual).fold(worst_residual, f64::max);
        let g = grid.sized_for(&d, curve.time_speed(grid.t_lo, grid.t_hi));
        let lookup: Vec<(f64, f64)> = matched.iter().map(|p| (p.point.x, p.point.t)).collect();
        let (norm, values) =
            maximal_mixed_norm(&d, m, Path::Curve(curve.clone()), g, &xg, &measure, q, config.seed, |x| {
                lookup
                    .iter()
                    .filter(|p| p.0 == x)
                    .map(|p| (theta, p.1))
                    .collect()
            })?;
        weakest = values.iter().copied().fold(weakest, f64::min);
        let hs = sobolev_norm(&d, s, &spec)?;
        points.push(LadderPoint {
            lambda,
            value: norm,
            hs_norm: Some(hs),
            ratio: Some(norm / hs),
        });
    }
    let predicted = -m * config.alpha / q;
    let tol = tolerance(config, MAXIMAL_TOLERANCE);
    report.headline(&fit_of(&points, |p| Some(p.value))?, predicted, tol, Comparison::Within);
    report.check(Check::new(
        "hs_slope",
        fit_of(&points, |p| p.hs_norm)?.slope,
        s - 0.5,
        FREQUENCY_TOLERANCE,
        Comparison::Within,
    ));
    report.check(Check::new(
        "ratio_slope",
        fit_of(&points, |p| p.ratio)?.slope,
        predicted - (s - 0.5),
        tol,
        Comparison::Within,
    ));
    report.check(Check::new("max_phase_residual", worst_residual, 0.5, 1e-6, Comparison::AtMost));
    report.check(Check::new("min_matched_value", weakest, floor, 0.0, Comparison::AtLeast));
    let table = Table::from_ladder(&points);
    report.points = points;
    Ok(Outcome { report, table })
}

/// Lower bound for the line-family maximal norm of the Cantor datum at
/// level `k`: the solution read at the matched `(θ(x), t(x))` for
/// `samples` points per level-k component inside `(1/2, 1]`.
pub fn cantor_lower_bound(
    r: f64,
    k: u32,
    m: f64,
    q: f64,
    measure: &AlphaMeasure,
    samples: usize,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::param("samples", "need at least one sample per component"));
    }
    let cantor = cantor_level(r, k)?;
    let lambda_k = r.powi(-(k as i32));
    let datum = cantor_data(lambda_k, m)?;
    let cells: Vec<(f64, f64)> = cantor
        .intervals
        .iter()
        .filter(|c| c[0] > 0.5)
        .flat_map(|c| {
            let h = (c[1] - c[0]) / samples as f64;
            (0..samples).map(move |j| (c[0] + h * j as f64, c[0] + h * (j + 1) as f64))
        })
        .collect();
    if cells.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let terms: Vec<f64> = cells
        .par_iter()
        .map(|&(a, b)| {
            let x = 0.5 * (a + b);
            let p = cantor_selectors(x, &cantor)?;
            let v = line_value(&datum, m, x, p.theta, p.t, spec)?;
            Ok(v.powf(q) * measure.mass(a, b))
        })
        .collect::<Result<_>>()?;
    Ok(terms.iter().sum::<f64>().powf(1.0 / q))
}

fn run_sharpness_lines(config: &RunConfig) -> Result<Outcome> {
    let spec = config.quadrature()?;
    let measure = AlphaMeasure::new(config.alpha)?;
    let (m, q, s, r) = (config.m, config.q, config.s, config.r);
    if config.k_min < 1 || config.k < config.k_min + 4 {
        return Err(Error::Config("need 1 <= k_min and at least five levels k_min..=k".into()));
    }
    let mut points = Vec::new();
    for k in config.k_min..=config.k {
        let lambda_k = r.powi(-(k as i32));
        let value = cantor_lower_bound(r, k, m, q, &measure, config.samples_per_component, &spec)?;
        let hs = sobolev_norm(&cantor_data(lambda_k, m)?, s, &spec)?;
        points.push(LadderPoint {
            lambda: lambda_k,
            value,
            hs_norm: Some(hs),
            ratio: Some(value / hs),
        });
    }
    let beta = config.beta_value();
    let predicted = 1.0 / m + beta / q - 1.0 / q;
    let mut report = Report::new(config);
    report.headline(
        &fit_of(&points, |p| Some(p.value))?,
        predicted,
        tolerance(config, 0.15),
        Comparison::Within,
    );
    report.check(Check::new(
        "hs_slope",
        fit_of(&points, |p| p.hs_norm)?.slope,
        s / m + 1.0 / (2.0 * m),
        FREQUENCY_TOLERANCE,
        Comparison::Within,
    ));
    report.measure("ratio_slope", fit_of(&points, |p| p.ratio)?.slope);
    // How much of the matched value an uninformed grid search recovers.
    let grid = config.grid()?;
    for k in config.k_min..=config.k {
        let lambda_k = r.powi(-(k as i32));
        let datum = cantor_data(lambda_k, m)?;
        if datum.max_frequency() > 1024.0 {
            break;
        }
        let cantor = cantor_level(r, k)?;
        let comp = *cantor.intervals.last().unwrap();
        let x = comp[0] + 0.25 * (comp[1] - comp[0]);
        let p = cantor_selectors(x, &cantor)?;
        let matched = line_value(&datum, m, x, p.theta, p.t, &spec)?;
        let g = grid.sized_for_lines(&datum, &cantor.intervals);
        let engine = MaximalEngine::new(&datum, m, Path::Lines(cantor.intervals.clone()), g, (x, x))?;
        let found = engine.maximal_over_lines(x, &[])?;
        report.measure(format!("search_over_matched_k{k}"), found / matched);
    }
    let table = Table::from_ladder(&points);
    report.points = points;
    Ok(Outcome { report, table })
}

fn run_proposition_lines(config: &RunConfig) -> Result<Outcome> {
    let spec = config.quadrature()?;
    let ladder = config.ladder()?;
    let measure = AlphaMeasure::new(config.alpha)?;
    let grid = config.grid()?;
    let (m, q, alpha) = (config.m, config.q, config.alpha);
    let s_star = exponents::s_star_lines(m, alpha, q)?;
    let mut points = Vec::new();
    for &lambda in &ladder {
        let d = knapp_vertical_spatial(lambda, m)?;
        let omega = vec![[0.0, lambda.powf(-q * s_star / alpha)]];
        let g = grid.sized_for_lines(&d, &omega);
        let xg = concentration_grid(1.0 / (8.0 * lambda), config.per_octave)?;
        let (norm, _) = maximal_mixed_norm(&d, m, Path::Lines(omega), g, &xg, &measure, q, config.seed, |_| {
            Vec::new()
        })?;
        let l2 = sobolev_norm(&d, 0.0, &spec)?;
        points.push(LadderPoint {
            lambda,
            value: norm,
            hs_norm: Some(l2),
            ratio: Some(norm / l2),
        });
    }
    let mut report = Report::new(config);
    let ratio_fit = fit_of(&points, |p| p.ratio)?;
    report.headline(&ratio_fit, 0.5 - s_star, tolerance(config, MAXIMAL_TOLERANCE), Comparison::AtMost);
    report.measure("mixed_norm_slope", fit_of(&points, |p| Some(p.value))?.slope);
    report.measure("s_star", s_star);
    let table = Table::from_ladder(&points);
    report.points = points;
    Ok(Outcome { report, table })
}

fn run_covering(config: &RunConfig) -> Result<Outcome> {
    let ladder = config.ladder()?;
    let (m, q, alpha) = (config.m, config.q, config.alpha);
    let s_star = exponents::s_star_lines(m, alpha, q)?;
    let beta = config.beta_value();
    let deltas: Vec<f64> = ladder.iter().map(|l| l.powf(-q * s_star / alpha)).collect();
    let finest = deltas.iter().copied().fold(1.0, f64::min);
    let level = ((finest / 8.0).ln() / config.r.ln()).ceil().clamp(1.0, 26.0) as u32;
    let cantor = cantor_level(config.r, level)?;
    let mut report = Report::new(config);
    let mut table = Table::new(&["lambda", "delta", "count", "bound"]);
    let predicted = q * s_star * beta / alpha;
    for (&lambda, &delta) in ladder.iter().zip(&deltas) {
        let n = covering_number(&cantor.intervals, delta)?;
        let bound = lambda.powf(predicted + config.eps);
        table.push(vec![fmt(lambda), fmt(delta), n.to_string(), fmt(bound)]);
        report.points.push(LadderPoint {
            lambda,
            value: n as f64,
            hs_norm: None,
            ratio: None,
        });
    }
    report.headline(
        &fit_of(&report.points.clone(), |p| Some(p.value))?,
        predicted,
        tolerance(config, MAXIMAL_TOLERANCE),
        Comparison::AtMost,
    );
    report.measure("cantor_level", level as f64);
    Ok(Outcome { report, table })
}

fn grid_or(spec: &str, scalar: f64) -> Result<Vec<f64>> {
    if spec.is_empty() {
        Ok(vec![scalar])
    } else {
        parse_range(spec)
    }
}

fn run_frostman(config: &RunConfig) -> Result<Outcome> {
    let alphas = if config.alpha_grid.is_empty() {
        parse_range("0.25:1:0.25")?
    } else {
        parse_range(&config.alpha_grid)?
    };
    const N: usize = 1000;
    let radii: Vec<f64> = (0..N).map(|i| 10f64.powf(-6.0 + 6.0 * i as f64 / (N - 1) as f64)).collect();
    let centers: Vec<f64> = (0..N).map(|i| i as f64 / (N - 1) as f64).collect();
    let mut report = Report::new(config);
    let mut table = Table::new(&["alpha", "constant", "bound"]);
    for a in alphas {
        let mu = AlphaMeasure::new(a)?;
        let c = frostman_constant(&mu, &radii, &centers)?;
        let bound = mu.frostman_bound();
        table.push(vec![fmt(a), fmt(c), fmt(bound)]);
        report.check(Check::new(format!("frostman_alpha_{a}"), c, bound * 1.01, 0.0, Comparison::AtMost));
    }
    Ok(Outcome { report, table })
}

fn run_cantor(config: &RunConfig) -> Result<Outcome> {
    let cantor = cantor_level(config.r, config.k)?;
    let deltas: Vec<f64> = (1..=config.k).map(|j| config.r.powi(j as i32)).collect();
    let mut report = Report::new(config);
    let mut table = Table::new(&["j", "delta", "count"]);
    let mut exact = true;
    for (j, &delta) in (1..=config.k).zip(&deltas) {
        let n = covering_number(&cantor.intervals, delta)?;
        exact &= n == 1usize << j;
        table.push(vec![j.to_string(), fmt(delta), n.to_string()]);
    }
    report.check(Check::new(
        "covering_counts_exact",
        if exact { 1.0 } else { 0.0 },
        1.0,
        0.0,
        Comparison::AtLeast,
    ));
    if deltas.len() >= 2 {
        let fit = minkowski_dimension(&cantor.intervals, &deltas)?;
        report.headline(&fit, cantor.dimension(), tolerance(config, 0.03), Comparison::Within);
    }
    report.data = Some(serde_json::to_value(&cantor.intervals).map_err(|e| Error::Io(e.to_string()))?);
    Ok(Outcome { report, table })
}

fn kappa_grid(config: &RunConfig) -> Result<Vec<Kappa>> {
    if config.kappa_grid.is_empty() {
        return Ok(vec![config.kappa_value()?]);
    }
    config
        .kappa_grid
        .split(',')
        .flat_map(|part| match part.trim() {
            "inf" | "infinity" => vec![Ok(Kappa::Infinite)],
            other => match parse_range(other) {
                Ok(v) => v.into_iter().map(Kappa::finite).collect(),
                Err(e) => vec![Err(e)],
            },
        })
        .collect()
}

fn kappa_text(k: Kappa) -> String {
    match k {
        Kappa::Finite(v) => fmt(v),
        Kappa::Infinite => "inf".into(),
    }
}

fn run_exponent_table(config: &RunConfig) -> Result<Outcome> {
    let s = grid_or(&config.s_grid, config.s)?;
    let m = grid_or(&config.m_grid, config.m)?;
    let alpha = grid_or(&config.alpha_grid, config.alpha)?;
    let q = grid_or(&config.q_grid, config.q)?;
    let beta = grid_or(&config.beta_grid, config.beta_value())?;
    let kappa = kappa_grid(config)?;
    let mut table;
    let mut rows: Vec<(Vec<String>, Result<f64>)> = Vec::new();
    match config.calculator.as_str() {
        name @ ("threshold_vertical" | "s_star_vertical" | "s_star_curve" | "s_star_lines") => {
            table = Table::new(&["m", "alpha", "q", "value", "error"]);
            let f = match name {
                "threshold_vertical" => exponents::threshold_vertical,
                "s_star_vertical" => exponents::s_star_vertical,
                "s_star_curve" => exponents::s_star_curve,
                _ => exponents::s_star_lines,
            };
            for &mv in &m {
                for &a in &alpha {
                    for &qv in &q {
                        rows.push((vec![fmt(mv), fmt(a), fmt(qv)], f(mv, a, qv)));
                    }
                }
            }
        }
        "dim_bound_vertical" | "dim_bound_curve" => {
            table = Table::new(&["s", "m", "value", "error"]);
            for &mv in &m {
                for &sv in &s {
                    let v = if config.calculator == "dim_bound_curve" {
                        exponents::dim_bound_curve(sv, mv)
                    } else {
                        exponents::dim_bound_vertical(sv, mv, config.extended)
                    };
                    rows.push((vec![fmt(sv), fmt(mv)], v));
                }
            }
        }
        "threshold_lines" => {
            table = Table::new(&["m", "beta", "value", "error"]);
            for &mv in &m {
                for &b in &beta {
                    rows.push((vec![fmt(mv), fmt(b)], exponents::threshold_lines(mv, b)));
                }
            }
        }
        "dim_bound_lines" => {
            table = Table::new(&["s", "m", "beta", "value", "error"]);
            for &mv in &m {
                for &b in &beta {
                    for &sv in &s {
                        rows.push((vec![fmt(sv), fmt(mv), fmt(b)], exponents::dim_bound_lines(sv, mv, b)));
                    }
                }
            }
        }
        "summary_thresholds" => {
            table = Table::new(&["m", "kappa", "value", "error"]);
            for &mv in &m {
                for &k in &kappa {
                    rows.push((vec![fmt(mv), kappa_text(k)], exponents::summary_thresholds(mv, k)));
                }
            }
        }
        "summary_dim_bound" => {
            table = Table::new(&["s", "m", "kappa", "value", "error"]);
            for &mv in &m {
                for &k in &kappa {
                    for &sv in &s {
                        rows.push((vec![fmt(sv), fmt(mv), kappa_text(k)], exponents::summary_dim_bound(sv, mv, k)));
                    }
                }
            }
        }
        other => return Err(Error::Config(format!("unknown calculator {other:?}"))),
    }
    let mut report = Report::new(config);
    let mut evaluated = 0usize;
    for (mut cells, v) in rows {
        match v {
            Ok(v) => {
                evaluated += 1;
                cells.push(fmt(v));
                cells.push(String::new());
            }
            Err(e) => {
                cells.push(String::new());
                cells.push(e.to_string());
            }
        }
        table.push(cells);
    }
    report.measure("rows_evaluated", evaluated as f64);
    report.measure("rows_out_of_range", (table.rows.len() - evaluated) as f64);
    Ok(Outcome { report, table })
}

fn run_bilinear_check(config: &RunConfig) -> Result<Outcome> {
    let measure = AlphaMeasure::new(config.alpha)?;
    if config.b_count < 2 {
        return Err(Error::Config("b_count must be at least 2".into()));
    }
    let xg = XGrid::uniform(config.cells)?;
    let one = SampledField::constant(xg, 1, 1.0);
    let mut report = Report::new(config);
    let mut table = Table::new(&["b", "form", "bound", "constant"]);
    let mut pts = Vec::new();
    let mut worst: f64 = 0.0;
    for j in 1..=config.b_count {
        let b = 2f64.powi(-(j as i32));
        let rep = bilinear_form_check(&one, &one, &measure, config.q, BilinearWeight::Indicator { b })?;
        table.push(vec![fmt(b), fmt(rep.form), fmt(rep.bound), fmt(rep.constant)]);
        pts.push((b, rep.form));
        worst = worst.max(rep.constant);
    }
    let fit = fit_loglog(&pts)?;
    report.headline(
        &fit,
        2.0 * config.alpha / config.q,
        tolerance(config, ENVELOPE_TOLERANCE),
        Comparison::AtLeast,
    );
    report.measure("largest_constant", worst);
    Ok(Outcome { report, table })
}
