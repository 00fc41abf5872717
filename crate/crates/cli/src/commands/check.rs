use std::f64::consts::PI;
use std::io::Write;

use anyhow::Result;
use hypermin::diffgeo::{fundamental_forms, intrinsic_curvature, MINIMAL_TOL_ANALYTIC};
use hypermin::lorentz::{hyperboloid_defect, BallPoint, MODEL_TOL};
use hypermin::surfaces::DEFAULT_PROFILE_TOL;
use hypermin::{CatenoidKind, SurfaceKind};
use serde::Serialize;

use super::sample::{chart_for, on_sheet};
use crate::config::{Fault, Format, RunConfig};
use crate::output::{sink, CsvWriter};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &'static str, measured: f64, tolerance: f64) -> Self {
        Check { name, measured, tolerance, pass: measured < tolerance }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub surface: SurfaceKind,
    pub domain: [f64; 4],
    pub grid: [usize; 2],
    pub checks: Vec<Check>,
    pub pass: bool,
}

fn default_domain(kind: SurfaceKind) -> [f64; 4] {
    match kind {
        SurfaceKind::Helicoid { .. } => [-2.0, 2.0, -2.0, 2.0],
        SurfaceKind::SphericalCatenoid { .. } | SurfaceKind::BallCatenoid { .. } => [-1.5, 1.5, 0.0, 2.0 * PI],
        _ => [-1.5, 1.5, -2.0, 2.0],
    }
}

pub fn evaluate(cfg: &RunConfig) -> Result<CheckReport> {
    let kind = cfg.surface()?;
    let d = cfg.domain_or(default_domain(kind))?;
    let [nu, nv] = cfg.opts.grid.unwrap_or([100, 100]);
    let tol = cfg.tol_or(DEFAULT_PROFILE_TOL)?;
    let chart = chart_for(kind, d.u0, d.u1, tol)?;
    let fault = cfg.opts.inject_fault;
    let at = |i: usize, n: usize, lo: f64, hi: f64| {
        if n == 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    };
    let analytic = matches!(kind, SurfaceKind::Helicoid { .. });
    let (mut defect, mut mean, mut metric, mut trip, mut gauss) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..nu {
        let u = at(i, nu, d.u0, d.u1);
        for j in 0..nv {
            let v = at(j, nv, d.v0, d.v1);
            let x = chart.point(u, v)?;
            defect = defect.max(hyperboloid_defect(&x).abs());
            let ff = fundamental_forms(&chart, u, v)?;
            mean = mean.max(ff.h.abs());
            if let SurfaceKind::Helicoid { a } = kind {
                let g = u.cosh().powi(2) + a * a * u.sinh().powi(2);
                metric = metric.max((ff.e - 1.0).abs()).max(ff.f.abs()).max((ff.g - g).abs() / g);
            }
            let p = on_sheet(x)?;
            let scale = p.vec().max_abs().max(1.0);
            let mut ball = p.to_ball().coords();
            if fault == Some(Fault::RoundTrip) {
                ball[0] += 1e-9;
            }
            let back = BallPoint::new(ball)?.to_hyperboloid();
            trip = trip.max((back.vec() - p.vec()).max_abs() / scale);
            let back = p.to_upper_half().to_hyperboloid();
            trip = trip.max((back.vec() - p.vec()).max_abs() / scale);
            let again = BallPoint::new(ball)?.to_hyperboloid().to_ball().coords();
            for k in 0..3 {
                trip = trip.max((again[k] - ball[k]).abs());
            }
            if i % 20 == 10 && j % 20 == 10 {
                let k_int = intrinsic_curvature(&chart, u, v)?;
                gauss = gauss.max((k_int - ff.gauss_curvature()).abs());
            }
        }
    }
    let mut checks = vec![
        Check::new("hyperboloid-constraint", defect, if analytic { MODEL_TOL } else { 1e-8 }),
        Check::new("mean-curvature", mean, MINIMAL_TOL_ANALYTIC),
    ];
    if analytic {
        checks.push(Check::new("helicoid-first-form", metric, 1e-9));
    }
    checks.push(Check::new("model-round-trip", trip, MODEL_TOL));
    checks.push(Check::new("gauss-equation", gauss, 1e-5));
    if let (Some(kind), Some(profile)) = (kind.catenoid(), chart.profile()) {
        let worst = profile
            .samples()
            .iter()
            .map(|s| {
                let r = match kind {
                    CatenoidKind::Spherical { .. } => s.x4 * s.x4 - s.x3 * s.x3 - s.x1 * s.x1 - 1.0,
                    CatenoidKind::Hyperbolic { .. } => s.x3 * s.x3 + s.x4 * s.x4 - s.x1 * s.x1 + 1.0,
                    CatenoidKind::Parabolic => s.x1 * s.x3 - s.x4 * s.x4 - 1.0,
                };
                r.abs() / (s.x1 * s.x1).max(1.0)
            })
            .fold(0.0, f64::max);
        checks.push(Check::new("profile-identity", worst, 1e-10));
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(CheckReport { surface: kind, domain: [d.u0, d.u1, d.v0, d.v1], grid: [nu, nv], checks, pass })
}

/// Returns whether every check passed; the report is written either way.
pub fn run(cfg: &RunConfig) -> Result<bool> {
    let format = cfg.format_or(Format::Json, &[Format::Json, Format::Csv])?;
    let report = evaluate(cfg)?;
    for c in &report.checks {
        eprintln!("{} {}: {:.3e} (tolerance {:.0e})", if c.pass { "ok  " } else { "FAIL" }, c.name, c.measured, c.tolerance);
    }
    let mut out = sink(cfg.opts.out.as_deref())?;
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &report)?;
            writeln!(out)?;
            out.flush()?;
        }
        _ => {
            let mut csv = CsvWriter::new(out, &["check", "measured", "tolerance", "pass"])?;
            for c in &report.checks {
                csv.row(vec![c.name.into(), c.measured.into(), c.tolerance.into(), c.pass.into()])?;
            }
            csv.finish()?;
        }
    }
    Ok(report.pass)
}
