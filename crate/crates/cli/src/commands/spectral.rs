use std::f64::consts::PI;
use std::fs;
use std::io::Write;

use anyhow::{bail, Context, Result};
use hypermin::stability::{
    classify, conjugacy_crosscheck, critical_pitch, lambda1_richardson, lambda1_with, ConjugacyOptions, Domain, Grid,
    JacobiProblem, SolverOptions, SpectrumReport, StabilityError, VBoundary, DEFAULT_CRITICAL_HALF_WIDTH,
    DEFAULT_CRITICAL_SPACING, DEFAULT_SCHEDULE_SPACING, EPS_MARGINAL,
};
use hypermin::surfaces::{SurfaceChart, DEFAULT_PROFILE_TOL};
use hypermin::SurfaceKind;
use rayon::prelude::*;
use serde::Serialize;

use super::sample::chart_for;
use crate::config::{Format, RunConfig, SurfaceArg};
use crate::output::{sink, svg_plot, Cell, CsvWriter, Series};

fn default_domain(kind: SurfaceKind) -> [f64; 4] {
    match kind {
        SurfaceKind::Helicoid { .. } => [-6.0, 6.0, -6.0, 6.0],
        SurfaceKind::SphericalCatenoid { .. } | SurfaceKind::BallCatenoid { .. } => [-1.5, 1.5, 0.0, 2.0 * PI],
        _ => [-1.5, 1.5, -2.0, 2.0],
    }
}

/// Periodic in `v` exactly when the domain spans the period of the chart.
fn boundary_for(kind: SurfaceKind, d: &Domain) -> VBoundary {
    match kind.v_period() {
        Some(p) if ((d.v1 - d.v0) - p).abs() <= 1e-12 * p => VBoundary::Periodic,
        _ => VBoundary::Dirichlet,
    }
}

fn problem<'a>(
    cfg: &RunConfig,
    chart: &'a SurfaceChart,
    d: Domain,
    h: f64,
    boundary: VBoundary,
) -> Result<JacobiProblem<'a>, StabilityError> {
    match cfg.grid() {
        Some(g) => JacobiProblem::new(chart, d, g, boundary),
        None => JacobiProblem::with_spacing(chart, d, h, boundary),
    }
}

fn write_svg(path: Option<&std::path::Path>, svg: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, svg).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(svg.as_bytes())?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct Lambda1Output {
    surface: SurfaceKind,
    report: SpectrumReport,
}

pub fn lambda1(cfg: &RunConfig) -> Result<()> {
    let kind = cfg.surface()?;
    let d = cfg.domain_or(default_domain(kind))?;
    let chart = chart_for(kind, d.u0, d.u1, cfg.tol_or(DEFAULT_PROFILE_TOL)?)?;
    let h = cfg.spacing_or(DEFAULT_SCHEDULE_SPACING)?;
    let boundary = boundary_for(kind, &d);
    let opts = SolverOptions::default();
    eprintln!("lambda1 of {kind} on {d} ({boundary:?} in v)");
    let report = if cfg.opts.richardson {
        if cfg.grid().is_some() {
            bail!("--richardson works from --spacing, not --grid");
        }
        lambda1_richardson(&chart, d, h, boundary, &opts)?.fine
    } else {
        lambda1_with(&problem(cfg, &chart, d, h, boundary)?, &opts)?
    };
    let format = cfg.format_or(Format::Csv, &[Format::Csv, Format::Json])?;
    let mut out = sink(cfg.opts.out.as_deref())?;
    if format == Format::Json {
        serde_json::to_writer_pretty(&mut out, &Lambda1Output { surface: kind, report })?;
        writeln!(out)?;
        out.flush()?;
        return Ok(());
    }
    let mut csv = CsvWriter::new(
        out,
        &[
            "surface", "u0", "u1", "v0", "v1", "nu", "nv", "boundary", "lambda1", "index", "residual",
            "one_signed", "iterations", "lambda1_extrapolated",
        ],
    )?;
    let r = &report;
    csv.row(vec![
        kind.to_string().into(),
        d.u0.into(),
        d.u1.into(),
        d.v0.into(),
        d.v1.into(),
        r.grid.nu.into(),
        r.grid.nv.into(),
        format!("{:?}", r.boundary).to_lowercase().into(),
        r.lambda1.into(),
        r.negative_count.into(),
        r.residual.into(),
        r.ground_state_one_signed.into(),
        r.iterations.into(),
        r.lambda1_extrapolated.map_or(Cell::Text(String::new()), Cell::Num),
    ])?;
    csv.finish()
}

fn a_values(cfg: &RunConfig, default: &[f64]) -> Vec<f64> {
    cfg.opts.a_values.clone().unwrap_or_else(|| default.to_vec())
}

fn ks(cfg: &RunConfig) -> Vec<f64> {
    cfg.opts.ks.clone().unwrap_or_else(|| (1..=8).map(f64::from).collect())
}

#[derive(Debug, Clone, Serialize)]
struct SweepRow {
    a: f64,
    k: f64,
    lambda1: f64,
    index: usize,
    residual: f64,
}

pub fn sweep(cfg: &RunConfig) -> Result<()> {
    if cfg.opts.surface.is_some_and(|s| s != SurfaceArg::Helicoid) {
        bail!("sweep varies the helicoid pitch; use --surface helicoid");
    }
    let values = a_values(cfg, &[0.5, 1.0, 1.5, 2.0, 2.5, 3.0]);
    let domains: Vec<(f64, Domain)> = match cfg.opts.domain {
        Some(_) => {
            let d = cfg.domain_or([0.0; 4])?;
            vec![(0.5 * (d.u1 - d.u0), d)]
        }
        None => ks(cfg).into_iter().map(|k| Domain::square(k).map(|d| (k, d))).collect::<Result<_, _>>()?,
    };
    let h = cfg.spacing_or(DEFAULT_SCHEDULE_SPACING)?;
    let format = cfg.format_or(Format::Csv, &[Format::Csv, Format::Json, Format::Svg])?;
    let jobs: Vec<(f64, f64, Domain)> =
        values.iter().flat_map(|&a| domains.iter().map(move |&(k, d)| (a, k, d))).collect();
    eprintln!("sweep: {} pitches x {} domains", values.len(), domains.len());
    let results: Vec<Result<SweepRow, StabilityError>> = jobs
        .par_iter()
        .map(|&(a, k, d)| {
            let chart = SurfaceChart::helicoid(a)?;
            let r = lambda1_with(&problem(cfg, &chart, d, h, VBoundary::Dirichlet)?, &SolverOptions::default())?;
            eprintln!("  a = {a}, k = {k}: lambda1 = {:.6}, index {}", r.lambda1, r.negative_count);
            Ok(SweepRow { a, k, lambda1: r.lambda1, index: r.negative_count, residual: r.residual })
        })
        .collect();
    let first_error = results.iter().position(|r| r.is_err());
    let rows: Vec<SweepRow> = results.iter().filter_map(|r| r.as_ref().ok()).cloned().collect();
    let plot = || {
        let series: Vec<Series> = domains
            .iter()
            .map(|&(k, _)| Series {
                label: format!("k = {k}"),
                points: rows.iter().filter(|r| r.k == k).map(|r| (r.a, r.lambda1)).collect(),
            })
            .collect();
        svg_plot("lambda1 of the helicoid", "pitch a", "lambda1", &series)
    };
    if let Some(p) = &cfg.opts.plot {
        write_svg(Some(p), &plot())?;
    }
    match format {
        Format::Svg => write_svg(cfg.opts.out.as_deref(), &plot())?,
        Format::Json => {
            let mut out = sink(cfg.opts.out.as_deref())?;
            serde_json::to_writer_pretty(&mut out, &rows)?;
            writeln!(out)?;
            out.flush()?;
        }
        _ => {
            let mut csv = CsvWriter::new(sink(cfg.opts.out.as_deref())?, &["a", "k", "lambda1", "index", "residual"])?;
            for r in results.iter().take(first_error.unwrap_or(results.len())) {
                let r = r.as_ref().expect("rows before the first error");
                csv.row(vec![r.a.into(), r.k.into(), r.lambda1.into(), r.index.into(), r.residual.into()])?;
            }
            if let Some(i) = first_error {
                let e = results[i].as_ref().expect_err("error row");
                csv.error_trailer(&e.to_string())?;
            }
            csv.finish()?;
        }
    }
    match first_error {
        Some(i) => Err(results.into_iter().nth(i).expect("index in range").expect_err("error row").into()),
        None => Ok(()),
    }
}

pub fn critical(cfg: &RunConfig) -> Result<()> {
    let kind = match cfg.opts.surface.unwrap_or(SurfaceArg::Helicoid) {
        SurfaceArg::Helicoid => SurfaceKind::Helicoid { a: f64::NAN },
        SurfaceArg::CatBall => SurfaceKind::BallCatenoid { a_bar: f64::NAN },
        _ => bail!("critical supports --surface helicoid (in a) and cat-ball (in abar)"),
    };
    let [lo, hi] = cfg.opts.bracket.unwrap_or(match kind {
        SurfaceKind::BallCatenoid { .. } => [0.3, 0.8],
        _ => [1.0, 4.0],
    });
    let tol = cfg.tol_or(1e-3)?;
    let h = cfg.spacing_or(DEFAULT_CRITICAL_SPACING)?;
    let k = DEFAULT_CRITICAL_HALF_WIDTH;
    let (domain, boundary) = match kind {
        SurfaceKind::Helicoid { .. } => (cfg.domain_or([-k, k, -k, k])?, VBoundary::Dirichlet),
        _ => (cfg.domain_or([-1.5, 1.5, 0.0, 2.0 * PI])?, VBoundary::Periodic),
    };
    let grid = cfg.grid().unwrap_or_else(|| {
        let cells = |len: f64| ((len / h).round() as usize).max(2);
        match boundary {
            VBoundary::Dirichlet => Grid { nu: cells(domain.u1 - domain.u0) - 1, nv: cells(domain.v1 - domain.v0) - 1 },
            VBoundary::Periodic => Grid { nu: cells(domain.u1 - domain.u0) - 1, nv: 64 },
        }
    });
    let format = cfg.format_or(Format::Csv, &[Format::Csv, Format::Json])?;
    let param = if matches!(kind, SurfaceKind::Helicoid { .. }) { "a" } else { "abar" };
    let mut csv = match format {
        Format::Csv => Some(CsvWriter::new(
            sink(cfg.opts.out.as_deref())?,
            &["step", param, "index", "unstable", "lo", "hi"],
        )?),
        _ => None,
    };
    eprintln!("critical {param} on {domain}, {} x {} nodes, bracket [{lo}, {hi}]", grid.nu, grid.nv);
    let w_max = domain.u0.abs().max(domain.u1.abs());
    let make = |p: f64| match kind {
        SurfaceKind::Helicoid { .. } => SurfaceChart::helicoid(p).map_err(StabilityError::from),
        _ => SurfaceChart::ball_catenoid(p, w_max, DEFAULT_PROFILE_TOL).map_err(StabilityError::from),
    };
    let mut n = 0usize;
    let mut write_error = None;
    let result = critical_pitch(make, domain, grid, boundary, (lo, hi), tol, &mut |s| {
        eprintln!("  {param} = {:.6}: index {} -> [{:.6}, {:.6}]", s.param, s.negative_count, s.lo, s.hi);
        if let Some(csv) = csv.as_mut() {
            let row = vec![n.into(), s.param.into(), s.negative_count.into(), s.unstable.into(), s.lo.into(), s.hi.into()];
            if let Err(e) = csv.row(row) {
                write_error.get_or_insert(e);
            }
        }
        n += 1;
    });
    if let Some(e) = write_error {
        return Err(e);
    }
    match (result, csv) {
        (Ok(r), Some(mut csv)) => {
            csv.row(vec!["estimate".into(), r.estimate.into(), "".into(), "".into(), r.lo.into(), r.hi.into()])?;
            eprintln!("estimate {param}_c = {:.6}", r.estimate);
            csv.finish()
        }
        (Ok(r), None) => {
            let mut out = sink(cfg.opts.out.as_deref())?;
            serde_json::to_writer_pretty(&mut out, &r)?;
            writeln!(out)?;
            out.flush()?;
            Ok(())
        }
        (Err(e), Some(mut csv)) => {
            csv.error_trailer(&e.to_string())?;
            csv.finish()?;
            Err(e.into())
        }
        (Err(e), None) => Err(e.into()),
    }
}

pub fn conjugacy(cfg: &RunConfig) -> Result<()> {
    let values = a_values(cfg, &[1.5, 2.5]);
    let mut opts = ConjugacyOptions { ks: ks(cfg), ..Default::default() };
    opts.helicoid_spacing = cfg.spacing_or(opts.helicoid_spacing)?;
    let format = cfg.format_or(Format::Csv, &[Format::Csv, Format::Json])?;
    eprintln!("conjugacy cross-check at a = {values:?}");
    let results: Vec<_> = values
        .par_iter()
        .map(|&a| {
            conjugacy_crosscheck(a, &opts, &mut |side, k, r| {
                eprintln!("  a = {a}, {side} k = {}: lambda1 = {:.6}, index {}", k + 1, r.lambda1, r.negative_count)
            })
        })
        .collect();
    let first_error = results.iter().position(|r| r.is_err());
    if format == Format::Json {
        let ok: Vec<_> = results.iter().filter_map(|r| r.as_ref().ok()).collect();
        let mut out = sink(cfg.opts.out.as_deref())?;
        serde_json::to_writer_pretty(&mut out, &ok)?;
        writeln!(out)?;
        out.flush()?;
    } else {
        let mut csv = CsvWriter::new(
            sink(cfg.opts.out.as_deref())?,
            &[
                "a", "abar", "helicoid_lambda1", "helicoid_index", "helicoid_class", "catenoid_lambda1",
                "catenoid_index", "catenoid_class", "agree",
            ],
        )?;
        for r in results.iter().take(first_error.unwrap_or(results.len())) {
            let r = r.as_ref().expect("rows before the first error");
            let (h, c) = (r.helicoid.last(), r.catenoid.last());
            let class = |l: f64| format!("{:?}", classify(l, EPS_MARGINAL)).to_lowercase();
            csv.row(vec![
                r.a.into(),
                r.a_bar.into(),
                h.lambda1.into(),
                h.negative_count.into(),
                class(h.lambda1).into(),
                c.lambda1.into(),
                c.negative_count.into(),
                class(c.lambda1).into(),
                r.agree.into(),
            ])?;
        }
        if let Some(i) = first_error {
            csv.error_trailer(&results[i].as_ref().expect_err("error row").to_string())?;
        }
        csv.finish()?;
    }
    match first_error {
        Some(i) => Err(results.into_iter().nth(i).expect("index in range").expect_err("error row").into()),
        None => Ok(()),
    }
}
