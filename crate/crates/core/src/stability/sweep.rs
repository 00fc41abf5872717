//! Exhaustions, critical-parameter bisection and the helicoid/catenoid cross-check.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{
    lambda1_with, morse_index, Domain, Grid, JacobiField, JacobiProblem, SolverOptions, SpectrumReport,
    StabilityError, VBoundary, EPS_MARGINAL,
};
use crate::surfaces::{a_bar_of_pitch, a_tilde_of_a_bar, SurfaceChart};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Stable,
    Unstable,
    Marginal,
}

pub fn classify(lambda1: f64, eps_marginal: f64) -> Classification {
    if lambda1 > eps_marginal {
        Classification::Stable
    } else if lambda1 < -eps_marginal {
        Classification::Unstable
    } else {
        Classification::Marginal
    }
}

/// Squares `[−k, k]²`.
pub fn square_schedule(ks: &[f64]) -> Result<Vec<Domain>, StabilityError> {
    ks.iter().map(|&k| Domain::square(k)).collect()
}

/// Half-width in `w` of the ball-catenoid annulus whose profile arclength
/// reaches `s`: the distance to the axis `y` solves `sinh² y = ã cosh 2s − 1/2`.
fn ball_half_width(a_bar: f64, s: f64) -> f64 {
    let at = a_tilde_of_a_bar(a_bar);
    let y = (at * (2.0 * s).cosh() - 0.5).sqrt().asinh();
    (y - a_bar).max(0.0).sqrt()
}

/// Annuli `|w| ≤ W_k`, `θ ∈ [0, 2π]` of `C_ā`, matched in arclength to the
/// squares `[−k, k]²`. Each `W_k` is rounded up to a multiple of `h` so
/// that grids of spacing `h` are nested.
pub fn ball_catenoid_schedule(a_bar: f64, ks: &[f64], h: f64) -> Result<Vec<Domain>, StabilityError> {
    if !(h > 0.0) {
        return Err(StabilityError::BadGrid(format!("spacing {h}")));
    }
    ks.iter()
        .map(|&k| {
            let w = ((ball_half_width(a_bar, k) / h - 1e-9).ceil().max(1.0)) * h;
            Domain::new(-w, w, 0.0, 2.0 * PI)
        })
        .collect()
}

/// `λ(ℓ) = λ∞ + c/ℓ²`, fitted by least squares.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub lambda_inf: f64,
    pub c: f64,
    /// Root-mean-square misfit.
    pub residual: f64,
    pub points: usize,
}

/// Fit the last (at most four) points of an exhaustion.
pub fn fit_tail(ell: &[f64], lambda: &[f64]) -> Option<TailFit> {
    let n = ell.len().min(lambda.len());
    let take = n.min(4);
    if take < 2 {
        return None;
    }
    let xs: Vec<f64> = ell[n - take..n].iter().map(|l| 1.0 / (l * l)).collect();
    let ys = &lambda[n - take..n];
    let m = take as f64;
    let (sx, sy) = (xs.iter().sum::<f64>(), ys.iter().sum::<f64>());
    let sxx = xs.iter().map(|x| x * x).sum::<f64>();
    let sxy = xs.iter().zip(ys).map(|(x, y)| x * y).sum::<f64>();
    let den = m * sxx - sx * sx;
    if den.abs() < f64::EPSILON * m * sxx {
        return None;
    }
    let c = (m * sxy - sx * sy) / den;
    let lambda_inf = (sy - c * sx) / m;
    let residual = (xs.iter().zip(ys).map(|(x, y)| (lambda_inf + c * x - y).powi(2)).sum::<f64>() / m).sqrt();
    Some(TailFit { lambda_inf, c, residual, points: take })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExhaustionReport {
    pub reports: Vec<SpectrumReport>,
    /// Indices `k` with `λ1(Ω_k) > λ1(Ω_{k−1})` beyond the solver residual.
    pub violations: Vec<usize>,
    pub strictly_decreasing: bool,
    pub first_negative: Option<usize>,
    pub tail: Option<TailFit>,
}

impl ExhaustionReport {
    pub fn last(&self) -> &SpectrumReport {
        self.reports.last().expect("schedules are nonempty")
    }

    pub fn classification(&self, eps_marginal: f64) -> Classification {
        classify(self.last().lambda1, eps_marginal)
    }
}

/// `λ1` along a nested schedule at fixed spacing (`h` in `u`, and in `v`
/// unless `nv` fixes the periodic node count).
pub fn exhaustion(
    field: &dyn JacobiField,
    schedule: &[Domain],
    h: f64,
    boundary: VBoundary,
    nv: Option<usize>,
    opts: &SolverOptions,
    progress: &mut dyn FnMut(usize, &SpectrumReport),
) -> Result<ExhaustionReport, StabilityError> {
    if schedule.is_empty() {
        return Err(StabilityError::BadDomain("empty schedule".into()));
    }
    for (k, w) in schedule.windows(2).enumerate() {
        if !w[1].contains(&w[0]) {
            return Err(StabilityError::NotNested { index: k + 1 });
        }
    }
    let mut reports = Vec::with_capacity(schedule.len());
    for (k, &domain) in schedule.iter().enumerate() {
        let problem = match nv {
            Some(nv) => {
                let nu = (((domain.u1 - domain.u0) / h).round() as usize).saturating_sub(1);
                JacobiProblem::new(field, domain, Grid { nu, nv }, boundary)?
            }
            None => JacobiProblem::with_spacing(field, domain, h, boundary)?,
        };
        let r = lambda1_with(&problem, opts)?;
        progress(k, &r);
        reports.push(r);
    }
    let lambdas: Vec<f64> = reports.iter().map(|r| r.lambda1).collect();
    let mut violations = Vec::new();
    let mut strictly_decreasing = true;
    for k in 1..lambdas.len() {
        let (prev, cur) = (lambdas[k - 1], lambdas[k]);
        strictly_decreasing &= cur < prev;
        if cur - prev > super::RESIDUAL_TOL * prev.abs().max(1.0) {
            violations.push(k);
        }
    }
    let ell: Vec<f64> = schedule.iter().map(|d| 0.5 * (d.u1 - d.u0)).collect();
    Ok(ExhaustionReport {
        first_negative: lambdas.iter().position(|&l| l < 0.0),
        tail: fit_tail(&ell, &lambdas),
        reports,
        violations,
        strictly_decreasing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RichardsonReport {
    pub coarse: SpectrumReport,
    pub fine: SpectrumReport,
    /// `(4 λ(h/2) − λ(h)) / 3`.
    pub extrapolated: f64,
}

/// `λ1` at spacings `h` and `h/2` with second-order extrapolation.
pub fn lambda1_richardson(
    field: &dyn JacobiField,
    domain: Domain,
    h: f64,
    boundary: VBoundary,
    opts: &SolverOptions,
) -> Result<RichardsonReport, StabilityError> {
    let coarse = lambda1_with(&JacobiProblem::with_spacing(field, domain, h, boundary)?, opts)?;
    let mut fine = lambda1_with(&JacobiProblem::with_spacing(field, domain, 0.5 * h, boundary)?, opts)?;
    let extrapolated = (4.0 * fine.lambda1 - coarse.lambda1) / 3.0;
    fine.lambda1_extrapolated = Some(extrapolated);
    Ok(RichardsonReport { coarse, fine, extrapolated })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BisectionStep {
    pub param: f64,
    pub negative_count: usize,
    pub unstable: bool,
    /// Bracket after this evaluation.
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalReport {
    pub estimate: f64,
    pub lo: f64,
    pub hi: f64,
    pub domain: Domain,
    pub grid: Grid,
    pub steps: Vec<BisectionStep>,
}

/// Bisect a one-parameter family for the change of sign of `λ1`, decided
/// by the inertia of the assembled operator.
#[allow(clippy::too_many_arguments)]
pub fn critical_pitch<F, M>(
    make_field: M,
    domain: Domain,
    grid: Grid,
    boundary: VBoundary,
    bracket: (f64, f64),
    tol: f64,
    progress: &mut dyn FnMut(&BisectionStep),
) -> Result<CriticalReport, StabilityError>
where
    F: JacobiField,
    M: Fn(f64) -> Result<F, StabilityError>,
{
    let (mut lo, mut hi) = bracket;
    if !(hi > lo) || !(tol > 0.0) {
        return Err(StabilityError::BracketInvalid { lo, hi });
    }
    let mut steps = Vec::new();
    let eval = |p: f64| -> Result<usize, StabilityError> {
        let field = make_field(p)?;
        let problem = JacobiProblem::new(&field, domain, grid, boundary)?;
        Ok(morse_index(&problem)?.count)
    };
    let mut record = |param: f64, count: usize, lo: f64, hi: f64, steps: &mut Vec<BisectionStep>| {
        let s = BisectionStep { param, negative_count: count, unstable: count > 0, lo, hi };
        progress(&s);
        steps.push(s);
    };
    let c_lo = eval(lo)?;
    record(lo, c_lo, lo, hi, &mut steps);
    let c_hi = eval(hi)?;
    record(hi, c_hi, lo, hi, &mut steps);
    let lo_unstable = c_lo > 0;
    if lo_unstable == (c_hi > 0) {
        return Err(StabilityError::BracketInvalid { lo, hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let c = eval(mid)?;
        if (c > 0) == lo_unstable {
            lo = mid;
        } else {
            hi = mid;
        }
        record(mid, c, lo, hi, &mut steps);
    }
    Ok(CriticalReport { estimate: 0.5 * (lo + hi), lo, hi, domain, grid, steps })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugacyOptions {
    /// Half-widths `k` of the helicoid squares; the catenoid annuli match them in arclength.
    pub ks: Vec<f64>,
    pub helicoid_spacing: f64,
    pub catenoid_w_spacing: f64,
    pub catenoid_nv: usize,
    pub profile_tol: f64,
    pub eps_marginal: f64,
    pub solver: SolverOptions,
}

impl Default for ConjugacyOptions {
    fn default() -> Self {
        ConjugacyOptions {
            ks: (1..=8).map(f64::from).collect(),
            helicoid_spacing: super::DEFAULT_SCHEDULE_SPACING,
            catenoid_w_spacing: 0.02,
            catenoid_nv: 64,
            profile_tol: 1e-10,
            eps_marginal: EPS_MARGINAL,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugacyReport {
    pub a: f64,
    pub a_bar: f64,
    pub helicoid: ExhaustionReport,
    pub catenoid: ExhaustionReport,
    pub helicoid_class: Classification,
    pub catenoid_class: Classification,
    pub agree: bool,
}

/// Classify `H_a` and `C_ā`, `a = coth ā`, by their exhausted `λ1`.
pub fn conjugacy_crosscheck(
    a: f64,
    opts: &ConjugacyOptions,
    progress: &mut dyn FnMut(&str, usize, &SpectrumReport),
) -> Result<ConjugacyReport, StabilityError> {
    let a_bar = a_bar_of_pitch(a)?;
    let helicoid = SurfaceChart::helicoid(a)?;
    let squares = square_schedule(&opts.ks)?;
    let hel = exhaustion(
        &helicoid,
        &squares,
        opts.helicoid_spacing,
        VBoundary::Dirichlet,
        None,
        &opts.solver,
        &mut |k, r| progress("helicoid", k, r),
    )?;
    let annuli = ball_catenoid_schedule(a_bar, &opts.ks, opts.catenoid_w_spacing)?;
    let w_max = annuli.last().map_or(1.0, |d| d.u1);
    let catenoid = SurfaceChart::ball_catenoid(a_bar, w_max, opts.profile_tol)?;
    let cat = exhaustion(
        &catenoid,
        &annuli,
        opts.catenoid_w_spacing,
        VBoundary::Periodic,
        Some(opts.catenoid_nv),
        &opts.solver,
        &mut |k, r| progress("catenoid", k, r),
    )?;
    let helicoid_class = hel.classification(opts.eps_marginal);
    let catenoid_class = cat.classification(opts.eps_marginal);
    Ok(ConjugacyReport {
        a,
        a_bar,
        helicoid: hel,
        catenoid: cat,
        helicoid_class,
        catenoid_class,
        agree: helicoid_class == catenoid_class,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification_band() {
        assert_eq!(classify(1e-3, EPS_MARGINAL), Classification::Stable);
        assert_eq!(classify(-1e-3, EPS_MARGINAL), Classification::Unstable);
        assert_eq!(classify(5e-5, EPS_MARGINAL), Classification::Marginal);
    }

    #[test]
    fn tail_fit_recovers_model() {
        let ell = [2.0, 3.0, 4.0, 5.0, 6.0];
        let lam: Vec<f64> = ell.iter().map(|l| -0.3 + 1.7 / (l * l)).collect();
        let fit = fit_tail(&ell, &lam).unwrap();
        assert_eq!(fit.points, 4);
        assert!((fit.lambda_inf + 0.3).abs() < 1e-13);
        assert!((fit.c - 1.7).abs() < 1e-12);
        assert!(fit.residual < 1e-14);
        assert!(fit_tail(&ell[..1], &lam[..1]).is_none());
    }

    #[test]
    fn annuli_grow_with_k() {
        let s = ball_catenoid_schedule(0.5, &[1.0, 2.0, 4.0], 0.02).unwrap();
        assert!(s.windows(2).all(|w| w[1].strictly_contains(&w[0])));
        for d in &s {
            let cells = d.u1 / 0.02;
            assert!((cells - cells.round()).abs() < 1e-9);
        }
        // s = 0 is the waist
        assert_eq!(ball_half_width(0.5, 0.0), 0.0);
    }

    #[test]
    fn non_nested_schedule_rejected() {
        let chart = SurfaceChart::helicoid(1.0).unwrap();
        let sched = square_schedule(&[2.0, 1.0]).unwrap();
        let err = exhaustion(&chart, &sched, 0.25, VBoundary::Dirichlet, None, &SolverOptions::default(), &mut |_, _| {});
        assert_eq!(err.unwrap_err(), StabilityError::NotNested { index: 1 });
    }
}
