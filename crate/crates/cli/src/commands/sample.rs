use std::f64::consts::PI;
use std::io::Write;

use anyhow::{bail, Result};
use hypermin::lorentz::{HyperboloidPoint, LorentzVec};
use hypermin::surfaces::{SurfaceChart, DEFAULT_PROFILE_TOL};
use hypermin::{Model, SurfaceKind};

use crate::config::{Format, RunConfig};
use crate::output::{num, sink, Cell, CsvWriter};

/// Lift the spatial part back onto the sheet; removes round-off in `x1`.
pub fn on_sheet(x: LorentzVec) -> Result<HyperboloidPoint> {
    let [_, x2, x3, x4] = x.0;
    let x1 = (1.0 + x2 * x2 + x3 * x3 + x4 * x4).sqrt();
    Ok(HyperboloidPoint::new(LorentzVec::new(x1, x2, x3, x4))?)
}

pub fn model_coords(p: &HyperboloidPoint, model: Model) -> Vec<f64> {
    match model {
        Model::Hyperboloid => p.vec().0.to_vec(),
        Model::Ball => p.to_ball().coords().to_vec(),
        Model::UpperHalf => p.to_upper_half().coords().to_vec(),
    }
}

pub fn default_domain(kind: SurfaceKind) -> [f64; 4] {
    match kind {
        SurfaceKind::Helicoid { .. } => [-2.0, 2.0, -3.0, 3.0],
        SurfaceKind::SphericalCatenoid { .. } | SurfaceKind::BallCatenoid { .. } => [-1.5, 1.5, 0.0, 2.0 * PI],
        _ => [-1.5, 1.5, -2.0, 2.0],
    }
}

/// Chart covering `|u| ≤ max(|u0|, |u1|)`.
pub fn chart_for(kind: SurfaceKind, u0: f64, u1: f64, tol: f64) -> Result<SurfaceChart> {
    let range = u0.abs().max(u1.abs()).max(1e-3);
    Ok(SurfaceChart::new(kind, range, tol)?)
}

pub fn run(cfg: &RunConfig) -> Result<()> {
    let kind = cfg.surface()?;
    let model = cfg.model();
    let d = cfg.domain_or(default_domain(kind))?;
    let [nu, nv] = cfg.opts.grid.unwrap_or([80, 120]);
    if nu < 2 || nv < 2 {
        bail!("--grid needs at least 2 nodes per direction for a mesh");
    }
    let chart = chart_for(kind, d.u0, d.u1, cfg.tol_or(DEFAULT_PROFILE_TOL)?)?;
    let format = cfg.format_or(Format::Obj, &[Format::Obj, Format::Csv])?;
    let at = |i: usize, n: usize, lo: f64, hi: f64| lo + (hi - lo) * i as f64 / (n - 1) as f64;
    let mut verts = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        let u = at(i, nu, d.u0, d.u1);
        for j in 0..nv {
            let v = at(j, nv, d.v0, d.v1);
            let p = on_sheet(chart.point(u, v)?)?;
            verts.push((u, v, model_coords(&p, model)));
        }
    }
    eprintln!("sampled {} vertices of {kind} in the {model:?} model", verts.len());
    let out = sink(cfg.opts.out.as_deref())?;
    match format {
        Format::Obj => write_obj(out, kind, model, &verts, nu, nv, cfg.opts.rulings),
        _ => {
            let header: &[&str] = match model {
                Model::Hyperboloid => &["u", "v", "x1", "x2", "x3", "x4"],
                Model::Ball => &["u", "v", "x", "y", "z"],
                Model::UpperHalf => &["u", "v", "x", "y", "t"],
            };
            let mut csv = CsvWriter::new(out, header)?;
            for (u, v, c) in &verts {
                let mut cells: Vec<Cell> = vec![(*u).into(), (*v).into()];
                cells.extend(c.iter().map(|&x| Cell::from(x)));
                csv.row(cells)?;
            }
            csv.finish()
        }
    }
}

fn write_obj(
    mut out: Box<dyn Write>,
    kind: SurfaceKind,
    model: Model,
    verts: &[(f64, f64, Vec<f64>)],
    nu: usize,
    nv: usize,
    rulings: bool,
) -> Result<()> {
    writeln!(out, "# {kind}, {model:?} model, {nu} x {nv} (u, v) grid")?;
    if model == Model::Hyperboloid {
        writeln!(out, "# vertices are (x2, x3, x4); x1 = sqrt(1 + x2^2 + x3^2 + x4^2)")?;
    }
    for (_, _, c) in verts {
        let xyz = if c.len() == 4 { &c[1..] } else { &c[..] };
        writeln!(out, "v {} {} {}", num(xyz[0]), num(xyz[1]), num(xyz[2]))?;
    }
    let id = |i: usize, j: usize| i * nv + j + 1;
    for i in 0..nu - 1 {
        for j in 0..nv - 1 {
            writeln!(out, "f {} {} {}", id(i, j), id(i + 1, j), id(i + 1, j + 1))?;
            writeln!(out, "f {} {} {}", id(i, j), id(i + 1, j + 1), id(i, j + 1))?;
        }
    }
    if rulings {
        for j in 0..nv {
            let line: Vec<String> = (0..nu).map(|i| id(i, j).to_string()).collect();
            writeln!(out, "l {}", line.join(" "))?;
        }
    }
    out.flush()?;
    Ok(())
}
