//! Acceptance suite: one `[PASS]`/`[FAIL]` line per criterion, nonzero exit
//! on any failure. Run with `cargo test -p cpl-core --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use cpl_core::exponents::{
    dim_bound_curve, dim_bound_lines, dim_bound_vertical, s_star_curve, s_star_lines, s_star_vertical,
    summary_dim_bound, summary_thresholds, threshold_lines, threshold_vertical, Kappa,
};
use cpl_core::experiment::{run_experiment, Report, RunConfig};
use cpl_core::phase::{fit_derivative_constants, EnvelopeParams};
use cpl_core::quadrature::{integrate, oracle_integrate, Interval, QuadratureSpec};
use cpl_core::spectral::psi;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn run(name: &str, settings: &[(&str, &str)]) -> Result<Report, String> {
    let mut config = RunConfig::for_experiment(name);
    for (k, v) in settings {
        config.set(k, v).map_err(|e| e.to_string())?;
    }
    run_experiment(&config).map(|o| o.report).map_err(|e| format!("{name}: {e}"))
}

/// Pass iff every named check passed; all are listed in the detail.
fn checks(report: &Report, names: &[&str], label: &str) -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for n in names {
        match report.checks.iter().find(|c| c.name == *n) {
            Some(c) => {
                ok &= c.pass;
                detail.push(format!("{label}{n}={:.4}", c.observed));
            }
            None => {
                ok = false;
                detail.push(format!("{label}{n}=missing"));
            }
        }
    }
    let line = detail.join(" ");
    if ok {
        Ok(line)
    } else {
        Err(line)
    }
}

fn all_checks(report: &Report, label: &str) -> Outcome {
    let names: Vec<&str> = report.checks.iter().map(|c| c.name.as_str()).collect();
    checks(report, &names, label)
}

fn merge(parts: Vec<Outcome>) -> Outcome {
    let ok = parts.iter().all(|p| p.is_ok());
    let line = parts
        .into_iter()
        .map(|p| match p {
            Ok(s) | Err(s) => s,
        })
        .collect::<Vec<_>>()
        .join("; ");
    if ok {
        Ok(line)
    } else {
        Err(line)
    }
}

fn c1_exponents() -> Outcome {
    let mut bad = Vec::new();
    let mut n = 0;
    let mut eq = |label: &str, got: cpl_core::Result<f64>, want: f64| {
        n += 1;
        match got {
            Ok(v) if (v - want).abs() <= 1e-12 => {}
            other => bad.push(format!("{label}: {other:?} vs {want}")),
        }
    };
    eq("threshold(.5,1,2)", threshold_vertical(0.5, 1.0, 2.0), 0.125);
    eq("threshold(1-,1,2)", threshold_vertical(1.0 - 1e-13, 1.0, 2.0), 0.25);
    eq("threshold(.5,1,4)", threshold_vertical(0.5, 1.0, 4.0), 0.25);
    eq("s_star vertical", s_star_vertical(0.5, 1.0, 2.0), 0.375);
    eq("s_star curve", s_star_curve(0.5, 1.0, 2.0), 0.125);
    eq("s_star lines", s_star_lines(0.5, 1.0, 2.0), 0.125);
    for m in [0.1, 0.3, 0.5, 0.7, 0.9] {
        eq("dim_vertical(1/4)", dim_bound_vertical(0.25, m, false), 0.5);
        eq("dim_vertical(m/4+)", dim_bound_vertical(m / 4.0 + 1e-14, m, false), 1.0);
    }
    eq("dim_vertical(.3,.5)", dim_bound_vertical(0.3, 0.5, false), 0.4);
    eq("dim_curve(.4,.5)", dim_bound_curve(0.4, 0.5), 0.4);
    eq("dim_curve(1/2-)", dim_bound_curve(0.5 - 1e-14, 0.5), 0.0);
    eq("dim_curve(.45,.25)", dim_bound_curve(0.45, 0.25), 0.4);
    eq("threshold_lines(.5,.5)", threshold_lines(0.5, 0.5), 0.4375);
    eq("dim_lines(.45,.5,.5)", dim_bound_lines(0.45, 0.5, 0.5), 5.0 / 6.0);
    eq("summary(.5,inf)", summary_thresholds(0.5, Kappa::Infinite), 0.125);
    eq("summary(.5,1)", summary_thresholds(0.5, Kappa::Finite(1.0)), 0.375);
    eq("summary(2,1)", summary_thresholds(2.0, Kappa::Finite(1.0)), 0.25);
    for m in [0.2, 0.5, 0.8] {
        eq("threshold_lines(m,0)", threshold_lines(m, 0.0), 0.5 - m / 4.0);
        // Both branches of the vertical bound meet at s = 1/4.
        let s: f64 = 0.25;
        eq("branch crossing", Ok(1.0 - 2.0 * s), 0.5 + (1.0 - 4.0 * s) / (2.0 * (1.0 - m)));
        let vertical = dim_bound_vertical(0.3, m, false).map_err(|e| e.to_string())?;
        eq("summary dim (inf)", summary_dim_bound(0.3, m, Kappa::Infinite), vertical);
    }
    for i in 0..20 {
        let m = 0.05 + 0.9 * i as f64 / 19.0;
        let lo = 0.5 - m / 4.0;
        for j in 0..20 {
            let s = lo + (0.5 - lo) * (j as f64 + 0.5) / 20.0;
            let curve = dim_bound_curve(s, m).map_err(|e| e.to_string())?;
            eq("lines(s,m,0) = curve(s,m)", dim_bound_lines(s, m, 0.0), curve);
        }
    }
    if bad.is_empty() {
        Ok(format!("{n} exact equalities"))
    } else {
        Err(bad.join("; "))
    }
}

fn c2_quadrature() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let spec = QuadratureSpec::default();
    let band = Interval::new(0.5, 2.0).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let lambda = 2f64.powf(rng.gen_range(0.0..=12.0));
        let m: f64 = rng.gen_range(0.1..0.9);
        let xi0: f64 = rng.gen_range(0.6..1.9);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let a = sign * lambda * rng.gen_range(0.5..1.0);
        let b = -a * m * xi0.powf(m - 1.0);
        let squared = rng.gen_bool(0.5);
        let amp = |xi: f64| {
            let p = psi(xi);
            Complex64::new(if squared { p * p } else { p }, 0.0)
        };
        let phase = |xi: f64| b * xi + a * xi.powf(m);
        let nodes = 2 * (1000 + 100 * lambda.ceil() as usize) + 1;
        let fast = integrate(amp, phase, band, &spec).map_err(|e| e.to_string())?;
        let slow = oracle_integrate(amp, phase, band, nodes).map_err(|e| e.to_string())?;
        worst = worst.max((fast - slow).norm() / slow.norm());
    }
    let line = format!("worst relative gap {worst:.2e} over 200 integrands");
    if worst <= 1e-6 {
        Ok(line)
    } else {
        Err(line)
    }
}

fn c3_identity() -> Outcome {
    merge(
        ["spatial", "curve", "cantor"]
            .iter()
            .map(|d| {
                let r = run("propagate", &[("datum", d), ("nx", "64"), ("t", "0")])?;
                checks(&r, &["inverse_transform_identity"], &format!("{d}:"))
            })
            .collect(),
    )
}

fn c4_envelope() -> Outcome {
    let common = [
        ("m", "0.5"),
        ("alpha", "1"),
        ("q", "2"),
        ("eps", "0.05"),
        ("lambda_min", "16"),
        ("lambda_ratio", "2"),
        ("lambda_count", "9"),
        ("nx", "64"),
        ("nt", "64"),
    ];
    let mut parts = Vec::new();
    for (variant, extra) in [("vertical", None), ("curve", Some(("kappa", "1")))] {
        let mut settings = common.to_vec();
        settings.push(("variant", variant));
        settings.extend(extra);
        let r = run("kernel-envelope", &settings)?;
        parts.push(checks(&r, &["slope", "quadrature_failures"], &format!("{variant}:")));
    }
    merge(parts)
}

fn c5_derivatives() -> Outcome {
    let template = EnvelopeParams::vertical(64.0, 0.5, 1.0, 2.0, 0.05).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut configs = Vec::with_capacity(100);
    while configs.len() < 100 {
        let lambda = 2f64.powf(rng.gen_range(4.0..=12.0));
        let edge = template.with_lambda(lambda).map_err(|e| e.to_string())?.indicator_edge();
        let x = edge.powf(rng.gen_range(0.0..1.0));
        let t = rng.gen_range(-1.0..1.0);
        configs.push((lambda, x, t));
    }
    let c = fit_derivative_constants(&template, &configs, 2001).map_err(|e| e.to_string())?;
    let line = format!(
        "c={:.3e} (cv {:.3}, n {}) c'={:.3e} (n {})",
        c.c_first, c.cv_first, c.count_first, c.c_second, c.count_second
    );
    if c.c_first > 0.0 && c.c_second > 0.0 && c.cv_first <= 0.5 && c.count_first > 0 && c.count_second > 0 {
        Ok(line)
    } else {
        Err(line)
    }
}

fn c6_curve() -> Outcome {
    let mut parts = Vec::new();
    for kappa in ["1", "2"] {
        let r = run(
            "sharpness-curve",
            &[("m", "0.5"), ("alpha", "1"), ("q", "2"), ("kappa", kappa), ("theta", "1"), ("lambda_count", "6")],
        )?;
        parts.push(checks(&r, &["slope", "hs_slope", "max_phase_residual"], &format!("kappa={kappa}:")));
    }
    merge(parts)
}

fn c7_lines() -> Outcome {
    let r = run(
        "sharpness-lines",
        &[("r", "0.25"), ("k_min", "1"), ("k", "6"), ("m", "0.5"), ("q", "2")],
    )?;
    checks(&r, &["slope", "hs_slope"], "")
}

fn c8_vertical() -> Outcome {
    merge(
        ["1", "0.5"]
            .iter()
            .map(|a| {
                let r = run(
                    "sharpness-vertical",
                    &[("datum", "spatial"), ("m", "0.5"), ("alpha", a), ("q", "2")],
                )?;
                checks(&r, &["slope", "spatial_hs_slope"], &format!("alpha={a}:"))
            })
            .collect(),
    )
}

fn c9_geometry() -> Outcome {
    let frostman = run("frostman", &[("alpha_grid", "0.25:1:0.25")])?;
    let cantor = run("cantor", &[("r", &(1.0f64 / 3.0).to_string()), ("k", "8")])?;
    let covering = run("cantor", &[("r", "0.25"), ("k", "6")])?;
    merge(vec![
        all_checks(&frostman, ""),
        checks(&cantor, &["slope", "covering_counts_exact"], "r=1/3:"),
        checks(&covering, &["covering_counts_exact"], "r=1/4:"),
    ])
}

fn c10_bilinear() -> Outcome {
    let r = run("bilinear-check", &[("alpha", "0.5"), ("q", "2"), ("b_count", "7")])?;
    checks(&r, &["slope"], "")
}

fn c11_proposition() -> Outcome {
    let r = run(
        "proposition-lines",
        &[("m", "0.5"), ("alpha", "1"), ("q", "2"), ("lambda_min", "16"), ("lambda_count", "6")],
    )?;
    checks(&r, &["slope"], "")
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("C1 exponent suite", c1_exponents),
        ("C2 quadrature vs oracle", c2_quadrature),
        ("C3 propagator identity at t = 0", c3_identity),
        ("C4 kernel envelope slopes", c4_envelope),
        ("C5 phase-derivative constants", c5_derivatives),
        ("C6 curve sharpness", c6_curve),
        ("C7 Cantor line-family sharpness", c7_lines),
        ("C8 vertical spatial Knapp", c8_vertical),
        ("C9 geometry", c9_geometry),
        ("C10 bilinear indicator slope", c10_bilinear),
        ("C11 single-interval ladder", c11_proposition),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("[PASS] {name} ({secs:.1}s): {d}"),
            Err(d) => {
                failed += 1;
                println!("[FAIL] {name} ({secs:.1}s): {d}");
            }
        }
    }
    println!("{} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
