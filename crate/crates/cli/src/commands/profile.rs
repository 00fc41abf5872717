use anyhow::{bail, Result};
use hypermin::surfaces::{ball_catenoid_generating_curve, catenoid_profile, DEFAULT_PROFILE_TOL};
use hypermin::SurfaceKind;

use crate::config::{Format, RunConfig};
use crate::output::{sink, CsvWriter};

/// Generating curve of a catenoid on a uniform grid symmetric about the waist.
pub fn run(cfg: &RunConfig) -> Result<()> {
    let kind = cfg.surface()?;
    cfg.format_or(Format::Csv, &[Format::Csv])?;
    let tol = cfg.tol_or(DEFAULT_PROFILE_TOL)?;
    let n = cfg.opts.grid.map_or(201, |[n, _]| n).max(2);
    let half = cfg.opts.domain.map_or(2.0, |[u0, u1, _, _]| u0.abs().max(u1.abs()));
    if !(half > 0.0) {
        bail!("the domain must extend beyond the waist");
    }
    let at = |i: usize| -half + 2.0 * half * i as f64 / (n - 1) as f64;
    let out = sink(cfg.opts.out.as_deref())?;
    if let SurfaceKind::BallCatenoid { a_bar } = kind {
        let curve = ball_catenoid_generating_curve(a_bar, a_bar + half * half, tol)?;
        let mut csv = CsvWriter::new(out, &["w", "t", "x"])?;
        for i in 0..n {
            let w = at(i);
            csv.row(vec![w.into(), (a_bar + w * w).into(), curve.x_of_w(w)?.into()])?;
        }
        return csv.finish();
    }
    let Some(cat) = kind.catenoid() else {
        bail!("profile needs a catenoid surface (cat-spherical, cat-hyperbolic, cat-parabolic or cat-ball)");
    };
    let profile = catenoid_profile(cat, half, tol)?;
    let mut csv = CsvWriter::new(out, &["s", "x1", "x3", "x4", "integral"])?;
    for i in 0..n {
        let p = profile.sample(at(i))?;
        csv.row(vec![p.s.into(), p.x1.into(), p.x3.into(), p.x4.into(), p.integral.into()])?;
    }
    csv.finish()
}
