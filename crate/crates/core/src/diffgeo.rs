//! Fundamental forms, curvature and the associate family of a chart.

use serde::Serialize;
use thiserror::Error;

use crate::lorentz::{minkowski_dot, LorentzVec};
use crate::quadrature::{self, QuadratureError};
use crate::surfaces::{ChartJet, SurfaceChart, SurfaceError};

/// `|H|` bound for minimality with analytic derivatives.
pub const MINIMAL_TOL_ANALYTIC: f64 = 1e-6;
/// `|H|` bound for minimality with finite-difference derivatives.
pub const MINIMAL_TOL_FD: f64 = 1e-4;
pub const REGULARITY_TOL: f64 = 1e-14;
/// Relative tolerance on `|E − G|` and `|F|` for isothermal input.
pub const ISOTHERMAL_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("degenerate metric: EG - F^2 = {det:e}")]
    Degenerate { det: f64 },
    #[error("no spacelike unit normal (candidate norm^2 = {norm2:e})")]
    LightlikeNormal { norm2: f64 },
    #[error("coordinates are not isothermal: |E - G| = {e_minus_g:e}, |F| = {f:e}")]
    NotIsothermal { e_minus_g: f64, f: f64 },
    #[error("second form is not trace-free: |b11 + b22| = {trace:e}")]
    NotMinimal { trace: f64 },
    #[error("metric is not of the form diag(1, G(u)): {0}")]
    Unsupported(String),
    #[error("non-finite chart data at ({u}, {v})")]
    NonFinite { u: f64, v: f64 },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FundamentalForms {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub b11: f64,
    pub b12: f64,
    pub b22: f64,
    /// Mean curvature, the trace of the shape operator.
    pub h: f64,
    /// `|A|² = tr(S²)`.
    pub norm_a2: f64,
}

impl FundamentalForms {
    /// Assemble from both forms, deriving `H` and `|A|²`.
    pub fn new(e: f64, f: f64, g: f64, b11: f64, b12: f64, b22: f64) -> Result<Self, GeometryError> {
        let det = e * g - f * f;
        if !(det > REGULARITY_TOL) {
            return Err(GeometryError::Degenerate { det });
        }
        let h = (g * b11 - 2.0 * f * b12 + e * b22) / det;
        // S = g^{-1} b
        let (i11, i12, i22) = (g / det, -f / det, e / det);
        let s11 = i11 * b11 + i12 * b12;
        let s12 = i11 * b12 + i12 * b22;
        let s21 = i12 * b11 + i22 * b12;
        let s22 = i12 * b12 + i22 * b22;
        let norm_a2 = s11 * s11 + 2.0 * s12 * s21 + s22 * s22;
        Ok(FundamentalForms { e, f, g, b11, b12, b22, h, norm_a2 })
    }

    pub fn det_metric(&self) -> f64 {
        self.e * self.g - self.f * self.f
    }

    /// Extrinsic (Gauss equation) curvature in a space form of curvature −1.
    pub fn gauss_curvature(&self) -> f64 {
        -1.0 + (self.b11 * self.b22 - self.b12 * self.b12) / self.det_metric()
    }

    /// `(b11² + 2 b12² + b22²) / E²`, valid in isothermal coordinates only.
    pub fn norm_a2_isothermal(&self) -> f64 {
        (self.b11.powi(2) + 2.0 * self.b12.powi(2) + self.b22.powi(2)) / (self.e * self.e)
    }

    /// Same forms with the opposite unit normal.
    pub fn flip_normal(&self) -> Self {
        FundamentalForms {
            b11: -self.b11,
            b12: -self.b12,
            b22: -self.b22,
            h: -self.h,
            ..*self
        }
    }

    /// Jacobi potential `|A|² + Ric(e3)` with `Ric(e3) = −2`.
    pub fn jacobi_potential(&self) -> f64 {
        self.norm_a2 - 2.0
    }
}

/// Spacelike unit vector Minkowski-orthogonal to `x`, `xu`, `xv`, with its
/// first component above round-off made positive.
pub fn unit_normal(x: &LorentzVec, xu: &LorentzVec, xv: &LorentzVec) -> Result<LorentzVec, GeometryError> {
    let mut frame: Vec<(LorentzVec, f64)> = Vec::with_capacity(3);
    let project = |w: LorentzVec, frame: &[(LorentzVec, f64)]| {
        frame
            .iter()
            .fold(w, |acc, (e, sign)| acc - *e * (sign * minkowski_dot(&acc, e)))
    };
    for w in [*x, *xu, *xv] {
        let r = project(w, &frame);
        let n2 = minkowski_dot(&r, &r);
        if !(n2.abs() > REGULARITY_TOL) {
            return Err(GeometryError::Degenerate { det: n2 });
        }
        frame.push((r * (1.0 / n2.abs().sqrt()), n2.signum()));
    }
    // Complete the frame from whichever coordinate axis survives best.
    let mut best = LorentzVec::ZERO;
    let mut best_n2 = f64::NEG_INFINITY;
    for k in 0..4 {
        let r = project(project(LorentzVec::basis(k), &frame), &frame);
        let n2 = minkowski_dot(&r, &r);
        if n2 > best_n2 {
            best = r;
            best_n2 = n2;
        }
    }
    if !(best_n2 > REGULARITY_TOL) {
        return Err(GeometryError::LightlikeNormal { norm2: best_n2 });
    }
    let n = best * (1.0 / best_n2.sqrt());
    let floor = 1e-9 * n.max_abs();
    let lead = n.0.iter().copied().find(|c| c.abs() > floor).unwrap_or(1.0);
    Ok(if lead < 0.0 { -n } else { n })
}

/// Forms from position and partials.
pub fn forms_from_jet(j: &ChartJet) -> Result<FundamentalForms, GeometryError> {
    let e = minkowski_dot(&j.xu, &j.xu);
    let f = minkowski_dot(&j.xu, &j.xv);
    let g = minkowski_dot(&j.xv, &j.xv);
    let det = e * g - f * f;
    if !(det > REGULARITY_TOL) {
        return Err(GeometryError::Degenerate { det });
    }
    let n = unit_normal(&j.x, &j.xu, &j.xv)?;
    FundamentalForms::new(
        e,
        f,
        g,
        minkowski_dot(&j.xuu, &n),
        minkowski_dot(&j.xuv, &n),
        minkowski_dot(&j.xvv, &n),
    )
}

fn finite_forms(ff: FundamentalForms, u: f64, v: f64) -> Result<FundamentalForms, GeometryError> {
    let all = [ff.e, ff.f, ff.g, ff.b11, ff.b12, ff.b22, ff.h, ff.norm_a2];
    if all.iter().all(|x| x.is_finite()) {
        Ok(ff)
    } else {
        Err(GeometryError::NonFinite { u, v })
    }
}

/// Forms at `(u, v)` from the chart's exact partials.
pub fn fundamental_forms(chart: &SurfaceChart, u: f64, v: f64) -> Result<FundamentalForms, GeometryError> {
    finite_forms(forms_from_jet(&chart.jet(u, v)?)?, u, v)
}

/// Forms at `(u, v)` from central differences with step `h`.
pub fn fundamental_forms_fd(chart: &SurfaceChart, u: f64, v: f64, h: f64) -> Result<FundamentalForms, GeometryError> {
    finite_forms(forms_from_jet(&chart.jet_fd(u, v, h)?)?, u, v)
}

/// Intrinsic Gaussian curvature by the Brioschi formula. Metric
/// derivatives are central differences of `metric` with step `h`.
pub fn brioschi_curvature<M>(metric: M, u: f64, v: f64, h: f64) -> Result<f64, GeometryError>
where
    M: Fn(f64, f64) -> Result<(f64, f64, f64), GeometryError>,
{
    let mut s = [[(0.0, 0.0, 0.0); 3]; 3];
    for (i, row) in s.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = metric(u + (i as f64 - 1.0) * h, v + (j as f64 - 1.0) * h)?;
        }
    }
    let at = |i: usize, j: usize, k: usize| -> f64 {
        let c = s[i][j];
        [c.0, c.1, c.2][k]
    };
    let du = |k| (at(2, 1, k) - at(0, 1, k)) / (2.0 * h);
    let dv = |k| (at(1, 2, k) - at(1, 0, k)) / (2.0 * h);
    let duu = |k| (at(2, 1, k) - 2.0 * at(1, 1, k) + at(0, 1, k)) / (h * h);
    let dvv = |k| (at(1, 2, k) - 2.0 * at(1, 1, k) + at(1, 0, k)) / (h * h);
    let duv = |k| (at(2, 2, k) - at(2, 0, k) - at(0, 2, k) + at(0, 0, k)) / (4.0 * h * h);
    let (e, f, g) = s[1][1];
    let (eu, ev, fu, fv, gu, gv) = (du(0), dv(0), du(1), dv(1), du(2), dv(2));
    let det3 = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let m1 = [
        [-0.5 * dvv(0) + duv(1) - 0.5 * duu(2), 0.5 * eu, fu - 0.5 * ev],
        [fv - 0.5 * gu, e, f],
        [0.5 * gv, f, g],
    ];
    let m2 = [[0.0, 0.5 * ev, 0.5 * gu], [0.5 * ev, e, f], [0.5 * gu, f, g]];
    let det = e * g - f * f;
    if !(det > REGULARITY_TOL) {
        return Err(GeometryError::Degenerate { det });
    }
    Ok((det3(m1) - det3(m2)) / (det * det))
}

/// Intrinsic curvature of a chart, from its exact first form.
pub fn intrinsic_curvature(chart: &SurfaceChart, u: f64, v: f64) -> Result<f64, GeometryError> {
    let h = 1e-4 * 1f64.max(u.abs()).max(v.abs());
    brioschi_curvature(
        |u, v| {
            let ff = fundamental_forms(chart, u, v)?;
            Ok((ff.e, ff.f, ff.g))
        },
        u,
        v,
        h,
    )
}

/// Member `θ` of the associate family of a minimal surface in isothermal
/// coordinates: `ψ = b11 − i b12` is rotated to `e^{iθ} ψ`.
pub fn conjugate_forms(base: &FundamentalForms, theta: f64) -> Result<FundamentalForms, GeometryError> {
    let scale = base.e.abs().max(base.g.abs());
    let (e_minus_g, f) = ((base.e - base.g).abs(), base.f.abs());
    if e_minus_g > ISOTHERMAL_TOL * scale || f > ISOTHERMAL_TOL * scale {
        return Err(GeometryError::NotIsothermal { e_minus_g, f });
    }
    let trace = (base.b11 + base.b22).abs();
    let bscale = base.b11.abs().max(base.b12.abs()).max(base.b22.abs()).max(scale);
    if trace > MINIMAL_TOL_ANALYTIC * bscale {
        return Err(GeometryError::NotMinimal { trace });
    }
    let (s, c) = theta.sin_cos();
    let b11 = c * base.b11 + s * base.b12;
    let b12 = c * base.b12 - s * base.b11;
    FundamentalForms::new(base.e, base.f, base.g, b11, b12, -b11)
}

/// Isothermal coordinates `(σ, t) = (∫_0^u G^{-1/2}, v)` for a chart with
/// metric `du² + G(u) dv²`.
#[derive(Debug, Clone)]
pub struct IsothermalChart {
    chart: SurfaceChart,
    u_range: (f64, f64),
    v_ref: f64,
    tol: f64,
}

/// Forms at a point expressed in both coordinate systems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsothermalPoint {
    pub u: f64,
    pub sigma: f64,
    pub t: f64,
    pub original: FundamentalForms,
    pub isothermal: FundamentalForms,
}

/// Check the separable form on `[u0,u1] × [v0,v1]` and set up `σ(u)`.
pub fn isothermal_reparametrize(
    chart: &SurfaceChart,
    region: [f64; 4],
    tol: f64,
) -> Result<IsothermalChart, GeometryError> {
    let [u0, u1, v0, v1] = region;
    if !(u1 > u0 && v1 > v0) {
        return Err(GeometryError::Unsupported(format!("empty region {region:?}")));
    }
    const PROBES: usize = 7;
    for i in 0..PROBES {
        let u = u0 + (u1 - u0) * i as f64 / (PROBES - 1) as f64;
        let g_ref = fundamental_forms(chart, u, v0)?.g;
        for j in 0..PROBES {
            let v = v0 + (v1 - v0) * j as f64 / (PROBES - 1) as f64;
            let ff = fundamental_forms(chart, u, v)?;
            let scale = 1e-9 * ff.g.max(1.0);
            if (ff.e - 1.0).abs() > 1e-9 || ff.f.abs() > scale || (ff.g - g_ref).abs() > scale {
                return Err(GeometryError::Unsupported(format!(
                    "at ({u}, {v}): E = {}, F = {}, G varies by {:e}",
                    ff.e,
                    ff.f,
                    ff.g - g_ref
                )));
            }
        }
    }
    Ok(IsothermalChart { chart: chart.clone(), u_range: (u0, u1), v_ref: v0, tol })
}

impl IsothermalChart {
    fn g_of_u(&self, u: f64) -> Result<f64, GeometryError> {
        Ok(fundamental_forms(&self.chart, u, self.v_ref)?.g)
    }

    /// `σ(u) = ∫_0^u G^{-1/2}`.
    pub fn sigma(&self, u: f64) -> Result<f64, GeometryError> {
        let inv_sqrt_g = |s: f64| {
            self.g_of_u(s).map(|g| 1.0 / g.sqrt()).unwrap_or(f64::NAN)
        };
        Ok(quadrature::integrate(inv_sqrt_g, 0.0, u, self.tol)?.value)
    }

    /// Inverse of `σ` by Newton's method with `dσ/du = G^{-1/2}`.
    pub fn u_of_sigma(&self, sigma: f64) -> Result<f64, GeometryError> {
        let mut u = sigma;
        for _ in 0..100 {
            let step = (self.sigma(u)? - sigma) * self.g_of_u(u)?.sqrt();
            u -= step;
            if step.abs() <= 1e-15 * u.abs().max(1.0) {
                break;
            }
        }
        Ok(u)
    }

    pub fn u_range(&self) -> (f64, f64) {
        self.u_range
    }

    /// Forms at chart point `(u, t)`, transported to `(σ, t)` by the chain rule.
    pub fn at_u(&self, u: f64, t: f64) -> Result<IsothermalPoint, GeometryError> {
        let ff = fundamental_forms(&self.chart, u, t)?;
        let root_g = ff.g.sqrt();
        let iso = FundamentalForms::new(ff.g, 0.0, ff.g, ff.b11 * ff.g, ff.b12 * root_g, ff.b22)?;
        Ok(IsothermalPoint { u, sigma: self.sigma(u)?, t, original: ff, isothermal: iso })
    }

    pub fn at_sigma(&self, sigma: f64, t: f64) -> Result<IsothermalPoint, GeometryError> {
        self.at_u(self.u_of_sigma(sigma)?, t)
    }
}
