//! Parametrized minimal surfaces in the hyperboloid model.
//!
//! Every chart maps `(u, v)` to a point of H³ ⊂ L⁴:
//!
//! | kind | `u` | `v` |
//! |------|-----|-----|
//! | helicoid `H_a` | distance from the axis | screw parameter |
//! | spherical / hyperbolic / parabolic catenoid | arclength `s` of the profile | orbit parameter of the rotation group |
//! | ball catenoid `C_ā` | `w`, with distance to the axis `y = ā + w²` | rotation angle |
//!
//! The catenoid profiles involve integrals without closed form; they are
//! tabulated once by adaptive quadrature and interpolated with cubic Hermite
//! polynomials whose slopes are the exact integrands.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jet::Jet2;
use crate::lorentz::LorentzVec;
use crate::quadrature::{self, QuadratureError};

pub const DEFAULT_PROFILE_TOL: f64 = 1e-10;
/// Relative finite-difference step; the actual step is scaled by `max(1, |u|, |v|)`.
pub const FD_STEP: f64 = 1e-5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("profile parameter {value} outside the tabulated range [-{max}, {max}]")]
    OutOfRange { value: f64, max: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

fn check(name: &'static str, value: f64, ok: bool, reason: &'static str) -> Result<(), SurfaceError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(SurfaceError::InvalidParameter { name, value, reason })
    }
}

/// The three catenoid families of the hyperboloid model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CatenoidKind {
    Spherical { a_tilde: f64 },
    Hyperbolic { a_tilde: f64 },
    Parabolic,
}

impl CatenoidKind {
    fn validate(&self) -> Result<(), SurfaceError> {
        match *self {
            CatenoidKind::Spherical { a_tilde } | CatenoidKind::Hyperbolic { a_tilde } => {
                check("a_tilde", a_tilde, a_tilde > 0.5, "must exceed 1/2")
            }
            CatenoidKind::Parabolic => Ok(()),
        }
    }

    /// Profile integrand (`φ'` or the parabolic `∫ cosh^{-3/2}(2σ)` integrand)
    /// and its derivative.
    fn integrand(&self, s: f64) -> (f64, f64) {
        let (c, sh) = ((2.0 * s).cosh(), (2.0 * s).sinh());
        match *self {
            CatenoidKind::Spherical { a_tilde: at } => {
                let k = (at * at - 0.25).sqrt();
                let (p, m) = (at * c + 0.5, at * c - 0.5);
                let g = k / (p * m.sqrt());
                (g, g * (-2.0 * at * sh / p - at * sh / m))
            }
            CatenoidKind::Hyperbolic { a_tilde: at } => {
                let k = (at * at - 0.25).sqrt();
                let (p, m) = (at * c + 0.5, at * c - 0.5);
                let g = k / (m * p.sqrt());
                (g, g * (-2.0 * at * sh / m - at * sh / p))
            }
            CatenoidKind::Parabolic => {
                let g = c.powf(-1.5);
                (g, -3.0 * sh * c.powf(-2.5))
            }
        }
    }
}

impl fmt::Display for CatenoidKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatenoidKind::Spherical { a_tilde } => write!(f, "spherical catenoid (a~ = {a_tilde})"),
            CatenoidKind::Hyperbolic { a_tilde } => write!(f, "hyperbolic catenoid (a~ = {a_tilde})"),
            CatenoidKind::Parabolic => f.write_str("parabolic catenoid"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SurfaceKind {
    Helicoid { a: f64 },
    SphericalCatenoid { a_tilde: f64 },
    HyperbolicCatenoid { a_tilde: f64 },
    ParabolicCatenoid,
    BallCatenoid { a_bar: f64 },
}

impl SurfaceKind {
    pub fn catenoid(&self) -> Option<CatenoidKind> {
        match *self {
            SurfaceKind::SphericalCatenoid { a_tilde } => Some(CatenoidKind::Spherical { a_tilde }),
            SurfaceKind::HyperbolicCatenoid { a_tilde } => Some(CatenoidKind::Hyperbolic { a_tilde }),
            SurfaceKind::ParabolicCatenoid => Some(CatenoidKind::Parabolic),
            _ => None,
        }
    }

    /// Whether translation in `v` acts by ambient isometries (screw motions
    /// or rotations), so that every intrinsic and extrinsic quantity is
    /// independent of `v`.
    pub fn v_equivariant(&self) -> bool {
        true
    }

    /// Period of the `v` parameter when the chart closes up.
    pub fn v_period(&self) -> Option<f64> {
        match self {
            SurfaceKind::SphericalCatenoid { .. } | SurfaceKind::BallCatenoid { .. } => Some(2.0 * PI),
            _ => None,
        }
    }
}

impl fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceKind::Helicoid { a } => write!(f, "helicoid (a = {a})"),
            SurfaceKind::BallCatenoid { a_bar } => write!(f, "ball catenoid (a- = {a_bar})"),
            other => write!(f, "{}", other.catenoid().expect("catenoid kinds")),
        }
    }
}

/// Cubic Hermite table of an odd function on a uniform grid over `[0, x_max]`.
#[derive(Debug, Clone, PartialEq)]
struct HermiteTable {
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl HermiteTable {
    fn x_max(&self) -> f64 {
        self.step * (self.values.len() - 1) as f64
    }

    fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |i| i as f64 * self.step)
    }

    /// Value at `x ≥ 0` (caller handles the sign).
    fn eval_nonneg(&self, x: f64) -> f64 {
        let last = self.values.len() - 1;
        let i = ((x / self.step) as usize).min(last - 1);
        let h = self.step;
        let t = (x - i as f64 * h) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1
    }

    fn eval_odd(&self, x: f64) -> Result<f64, SurfaceError> {
        let max = self.x_max();
        if !(x.abs() <= max * (1.0 + 1e-14)) {
            return Err(SurfaceError::OutOfRange { value: x, max });
        }
        let y = self.eval_nonneg(x.abs().min(max));
        Ok(if x < 0.0 { -y } else { y })
    }
}

/// Tabulate `F(x) = ∫_0^x g` on `[0, x_max]`, refining the grid until the
/// Hermite interpolant reproduces directly integrated midpoints within
/// `10·tol`.
fn tabulate_integral<G: Fn(f64) -> f64>(g: G, x_max: f64, tol: f64) -> Result<HermiteTable, SurfaceError> {
    check("range", x_max, x_max > 0.0, "must be positive")?;
    check("tol", tol, tol > 0.0, "must be positive")?;
    let mut intervals = ((x_max * 64.0).ceil() as usize).max(16);
    loop {
        let step = x_max / intervals as f64;
        let panel_tol = tol / intervals as f64;
        let mut values = Vec::with_capacity(intervals + 1);
        let mut slopes = Vec::with_capacity(intervals + 1);
        let mut acc = 0.0;
        values.push(0.0);
        slopes.push(g(0.0));
        for i in 0..intervals {
            let (a, b) = (i as f64 * step, (i + 1) as f64 * step);
            acc += quadrature::integrate(&g, a, b, panel_tol)?.value;
            values.push(acc);
            slopes.push(g(b));
        }
        let table = HermiteTable { step, values, slopes };
        let mut worst = 0.0_f64;
        for i in 0..intervals {
            let (a, m) = (i as f64 * step, (i as f64 + 0.5) * step);
            let direct = table.values[i] + quadrature::integrate(&g, a, m, panel_tol)?.value;
            worst = worst.max((table.eval_nonneg(m) - direct).abs());
        }
        if worst < 10.0 * tol || intervals >= 1 << 20 {
            return Ok(table);
        }
        intervals *= 2;
    }
}

/// One sample of a catenoid generating curve in the catenoid's own basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileSample {
    pub s: f64,
    pub x1: f64,
    pub x3: f64,
    pub x4: f64,
    /// `φ(s)` for the spherical and hyperbolic types; `∫_0^s cosh^{-3/2}(2σ) dσ`
    /// for the parabolic type.
    pub integral: f64,
}

/// Generating curve of a hyperboloid-model catenoid, tabulated for `|s| ≤ s_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCurve {
    kind: CatenoidKind,
    tol: f64,
    table: HermiteTable,
}

/// Build the catenoid profile by adaptive quadrature to absolute tolerance `tol`.
pub fn catenoid_profile(kind: CatenoidKind, s_max: f64, tol: f64) -> Result<ProfileCurve, SurfaceError> {
    kind.validate()?;
    let table = tabulate_integral(|s| kind.integrand(s).0, s_max, tol)?;
    Ok(ProfileCurve { kind, tol, table })
}

impl ProfileCurve {
    pub fn kind(&self) -> CatenoidKind {
        self.kind
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn s_max(&self) -> f64 {
        self.table.x_max()
    }

    /// Profile integral with its first two derivatives.
    fn integral_jet(&self, s: f64) -> Result<(f64, f64, f64), SurfaceError> {
        let value = self.table.eval_odd(s)?;
        let (g, dg) = self.kind.integrand(s);
        Ok((value, g, dg))
    }

    pub fn sample(&self, s: f64) -> Result<ProfileSample, SurfaceError> {
        let integral = self.table.eval_odd(s)?;
        let c = (2.0 * s).cosh();
        let (x1, x3, x4) = match self.kind {
            CatenoidKind::Spherical { a_tilde } => {
                let x1 = (a_tilde * c - 0.5).sqrt();
                let r = (a_tilde * c + 0.5).sqrt();
                (x1, r * integral.sinh(), r * integral.cosh())
            }
            CatenoidKind::Hyperbolic { a_tilde } => {
                let x1 = (a_tilde * c + 0.5).sqrt();
                let r = (a_tilde * c - 0.5).sqrt();
                (x1, r * integral.sin(), r * integral.cos())
            }
            CatenoidKind::Parabolic => {
                let x1 = c.sqrt();
                let x4 = x1 * integral;
                (x1, (1.0 + x4 * x4) / x1, x4)
            }
        };
        Ok(ProfileSample { s, x1, x3, x4, integral })
    }

    /// Samples at the tabulation nodes, `0 ≤ s ≤ s_max`.
    pub fn samples(&self) -> Vec<ProfileSample> {
        self.table
            .nodes()
            .map(|s| self.sample(s).expect("nodes are in range"))
            .collect()
    }
}

/// Pseudo-orthonormal basis realizing the parabolic rotation group:
/// `e1`, `e3` null with `⟨e1,e3⟩ = −1/2`, `e2`, `e4` unit spacelike and
/// orthogonal to everything else.
pub const PARABOLIC_BASIS: [LorentzVec; 4] = [
    LorentzVec::new(0.5, 0.0, 0.0, 0.5),
    LorentzVec::new(0.0, 1.0, 0.0, 0.0),
    LorentzVec::new(0.5, 0.0, 0.0, -0.5),
    LorentzVec::new(0.0, 0.0, 1.0, 0.0),
];

fn catenoid_jet(profile: &ProfileCurve, s: f64, rotation: f64) -> Result<[Jet2; 4], SurfaceError> {
    let (i0, i1, i2) = profile.integral_jet(s)?;
    let su = Jet2::var_u(s);
    let th = Jet2::var_v(rotation);
    let phi = su.chain(i0, i1, i2);
    let c = (su * 2.0).cosh();
    Ok(match profile.kind {
        CatenoidKind::Spherical { a_tilde } => {
            // x = x1(cos θ e1 + sin θ e2) + x3 e3 + x4 e4, e4 timelike.
            let x1 = (c * a_tilde - 0.5).sqrt();
            let r = (c * a_tilde + 0.5).sqrt();
            [r * phi.cosh(), x1 * th.cos(), x1 * th.sin(), r * phi.sinh()]
        }
        CatenoidKind::Hyperbolic { a_tilde } => {
            // x = x1(cosh θ e1 + sinh θ e2) + x3 e3 + x4 e4, e1 timelike.
            let x1 = (c * a_tilde + 0.5).sqrt();
            let r = (c * a_tilde - 0.5).sqrt();
            [x1 * th.cosh(), x1 * th.sinh(), r * phi.sin(), r * phi.cos()]
        }
        CatenoidKind::Parabolic => {
            // Null rotation fixing e3, e4: e1 ↦ e1 + θ e2 + θ² e3.
            let x1 = c.sqrt();
            let x4 = x1 * phi;
            let x3 = (x4 * x4 + 1.0) / x1;
            let mut out = [Jet2::default(); 4];
            let coeffs = [x1, x1 * th, x1 * th * th + x3, x4];
            for (coef, e) in coeffs.iter().zip(PARABOLIC_BASIS.iter()) {
                for (o, ek) in out.iter_mut().zip(e.0.iter()) {
                    if *ek != 0.0 {
                        *o = *o + *coef * *ek;
                    }
                }
            }
            out
        }
    })
}

/// Point of the rotation surface generated by `profile`, at profile
/// parameter `s` and orbit parameter `rotation`.
pub fn catenoid_point(profile: &ProfileCurve, s: f64, rotation: f64) -> Result<LorentzVec, SurfaceError> {
    let j = catenoid_jet(profile, s, rotation)?;
    Ok(LorentzVec::new(j[0].v, j[1].v, j[2].v, j[3].v))
}

/// `B²₊` with the warped product metric `cosh²y dx² + dy²`: `x` is arclength
/// along the rotation axis, `y` the distance to it.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WarpedMetric;

impl WarpedMetric {
    /// Coefficients of `dx²` and `dy²`.
    pub fn coefficients(&self, y: f64) -> (f64, f64) {
        (y.cosh().powi(2), 1.0)
    }

    pub fn line_element(&self, y: f64, dx: f64, dy: f64) -> f64 {
        let (gxx, gyy) = self.coefficients(y);
        gxx * dx * dx + gyy * dy * dy
    }

    /// Fermi coordinates about the geodesic `(cosh x, 0, sinh x, 0)`, which
    /// is the first coordinate axis of the ball. `theta` rotates about it.
    pub fn to_hyperboloid(&self, x: f64, y: f64, theta: f64) -> LorentzVec {
        let (cy, sy) = (y.cosh(), y.sinh());
        LorentzVec::new(cy * x.cosh(), sy * theta.sin(), cy * x.sinh(), sy * theta.cos())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

/// Generating curve `σ_ā = (x(t), t)` of the ball catenoid `C_ā`.
///
/// Internally parametrized by `w` with `t = ā + w²`, which removes the
/// inverse square root at the waist; `w > 0` is the `+` branch and `w < 0`
/// the `−` branch, glued at `t = ā`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratingCurve {
    a_bar: f64,
    tol: f64,
    table: HermiteTable,
}

/// `sinh(2z)/z`, continuous at 0.
fn sinhc2(z: f64) -> f64 {
    if z.abs() < 1e-8 {
        2.0 + 4.0 * z * z / 3.0
    } else {
        (2.0 * z).sinh() / z
    }
}

/// Logarithmic derivative of `sinhc2`: `2 coth(2z) − 1/z`.
fn sinhc2_log_derivative(z: f64) -> f64 {
    if z.abs() < 1e-3 {
        let z2 = z * z;
        z * (4.0 / 3.0 - 16.0 / 45.0 * z2 + 128.0 / 945.0 * z2 * z2)
    } else {
        2.0 / (2.0 * z).tanh() - 1.0 / z
    }
}

impl GeneratingCurve {
    pub fn a_bar(&self) -> f64 {
        self.a_bar
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn w_max(&self) -> f64 {
        self.table.x_max()
    }

    pub fn t_max(&self) -> f64 {
        self.a_bar + self.w_max().powi(2)
    }

    /// `dx/dw` and `d²x/dw²`. After the substitution the integrand is
    /// `2 sinh(2ā) / (cosh t · sqrt(sinhc2(w²) · sinh(2t + 2ā)))`.
    fn dx_dw(a_bar: f64, w: f64) -> (f64, f64) {
        let z = w * w;
        let t = a_bar + z;
        let q = 2.0 * t + 2.0 * a_bar;
        let d1 = 2.0 * (2.0 * a_bar).sinh() / (t.cosh() * (sinhc2(z) * q.sinh()).sqrt());
        let dlog = -2.0 * w * t.tanh() - w * sinhc2_log_derivative(z) - 2.0 * w / q.tanh();
        (d1, d1 * dlog)
    }

    /// Signed parameter `w`: `x(w)` is odd.
    pub fn x_of_w(&self, w: f64) -> Result<f64, SurfaceError> {
        self.table.eval_odd(w)
    }

    fn x_jet(&self, w: f64) -> Result<(f64, f64, f64), SurfaceError> {
        let x = self.table.eval_odd(w)?;
        let (d1, d2) = Self::dx_dw(self.a_bar, w);
        Ok((x, d1, d2))
    }

    /// `x(t)` on the chosen branch.
    pub fn x_of_t(&self, t: f64, branch: Branch) -> Result<f64, SurfaceError> {
        check("t", t, t >= self.a_bar, "must be at least a_bar")?;
        let w = (t - self.a_bar).sqrt();
        let x = self.x_of_w(w)?;
        Ok(match branch {
            Branch::Plus => x,
            Branch::Minus => -x,
        })
    }

    /// `(t, x(t))` on the `+` branch at the tabulation nodes.
    pub fn samples(&self) -> Vec<(f64, f64)> {
        self.table
            .nodes()
            .zip(self.table.values.iter())
            .map(|(w, &x)| (self.a_bar + w * w, x))
            .collect()
    }
}

/// Tabulate the generating curve of `C_ā` up to distance `t_max` from the axis.
pub fn ball_catenoid_generating_curve(a_bar: f64, t_max: f64, tol: f64) -> Result<GeneratingCurve, SurfaceError> {
    check("a_bar", a_bar, a_bar > 0.0, "must be positive")?;
    check("t_max", t_max, t_max > a_bar, "must exceed a_bar")?;
    let w_max = (t_max - a_bar).sqrt();
    let table = tabulate_integral(|w| GeneratingCurve::dx_dw(a_bar, w).0, w_max, tol)?;
    Ok(GeneratingCurve { a_bar, tol, table })
}

/// Pitch of the helicoid conjugate to a catenoid.
pub fn relation_a_of_catenoid(kind: CatenoidKind) -> Result<f64, SurfaceError> {
    kind.validate()?;
    Ok(match kind {
        CatenoidKind::Spherical { a_tilde } => ((a_tilde + 0.5) / (a_tilde - 0.5)).sqrt(),
        CatenoidKind::Hyperbolic { a_tilde } => ((a_tilde - 0.5) / (a_tilde + 0.5)).sqrt(),
        CatenoidKind::Parabolic => 1.0,
    })
}

/// `ã` of the hyperboloid spherical catenoid isometric to `C_ā`: `2ã = cosh 2ā`.
pub fn a_tilde_of_a_bar(a_bar: f64) -> f64 {
    0.5 * (2.0 * a_bar).cosh()
}

/// `ā = arcoth(a)` for the ball catenoid conjugate to `H_a`, `a > 1`.
pub fn a_bar_of_pitch(a: f64) -> Result<f64, SurfaceError> {
    check("a", a, a > 1.0, "must exceed 1")?;
    Ok(0.5 * ((a + 1.0) / (a - 1.0)).ln())
}

/// Helicoid point `(cosh u cosh v, cosh u sinh v, sinh u cos av, sinh u sin av)`.
pub fn helicoid_point(a: f64, u: f64, v: f64) -> Result<LorentzVec, SurfaceError> {
    check("a", a, a >= 0.0, "must be nonnegative")?;
    Ok(LorentzVec::new(
        u.cosh() * v.cosh(),
        u.cosh() * v.sinh(),
        u.sinh() * (a * v).cos(),
        u.sinh() * (a * v).sin(),
    ))
}

/// Position with first and second partials at a chart point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartJet {
    pub x: LorentzVec,
    pub xu: LorentzVec,
    pub xv: LorentzVec,
    pub xuu: LorentzVec,
    pub xuv: LorentzVec,
    pub xvv: LorentzVec,
}

impl ChartJet {
    fn from_components(c: [Jet2; 4]) -> Self {
        let pick = |f: fn(&Jet2) -> f64| LorentzVec::new(f(&c[0]), f(&c[1]), f(&c[2]), f(&c[3]));
        ChartJet {
            x: pick(|j| j.v),
            xu: pick(|j| j.du),
            xv: pick(|j| j.dv),
            xuu: pick(|j| j.duu),
            xuv: pick(|j| j.duv),
            xvv: pick(|j| j.dvv),
        }
    }
}

#[derive(Debug, Clone)]
enum Profile {
    Analytic,
    Catenoid(Arc<ProfileCurve>),
    Ball(Arc<GeneratingCurve>),
}

/// A surface patch `(u, v) ↦ L⁴`, immutable after construction.
#[derive(Debug, Clone)]
pub struct SurfaceChart {
    kind: SurfaceKind,
    profile: Profile,
}

impl SurfaceChart {
    pub fn helicoid(a: f64) -> Result<Self, SurfaceError> {
        check("a", a, a >= 0.0, "must be nonnegative")?;
        Ok(SurfaceChart { kind: SurfaceKind::Helicoid { a }, profile: Profile::Analytic })
    }

    /// Catenoid chart valid for `|s| ≤ s_max`.
    pub fn catenoid(kind: CatenoidKind, s_max: f64, tol: f64) -> Result<Self, SurfaceError> {
        let profile = catenoid_profile(kind, s_max, tol)?;
        let kind = match kind {
            CatenoidKind::Spherical { a_tilde } => SurfaceKind::SphericalCatenoid { a_tilde },
            CatenoidKind::Hyperbolic { a_tilde } => SurfaceKind::HyperbolicCatenoid { a_tilde },
            CatenoidKind::Parabolic => SurfaceKind::ParabolicCatenoid,
        };
        Ok(SurfaceChart { kind, profile: Profile::Catenoid(Arc::new(profile)) })
    }

    /// Ball catenoid chart valid for `|w| ≤ w_max`.
    pub fn ball_catenoid(a_bar: f64, w_max: f64, tol: f64) -> Result<Self, SurfaceError> {
        check("w_max", w_max, w_max > 0.0, "must be positive")?;
        let curve = ball_catenoid_generating_curve(a_bar, a_bar + w_max * w_max, tol)?;
        Ok(SurfaceChart {
            kind: SurfaceKind::BallCatenoid { a_bar },
            profile: Profile::Ball(Arc::new(curve)),
        })
    }

    /// Build any kind; `range` bounds `|u|` for the tabulated kinds and is
    /// ignored for the helicoid.
    pub fn new(kind: SurfaceKind, range: f64, tol: f64) -> Result<Self, SurfaceError> {
        match kind {
            SurfaceKind::Helicoid { a } => Self::helicoid(a),
            SurfaceKind::BallCatenoid { a_bar } => Self::ball_catenoid(a_bar, range, tol),
            other => Self::catenoid(other.catenoid().expect("catenoid kinds"), range, tol),
        }
    }

    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    /// Largest admissible `|u|`, if limited.
    pub fn u_range(&self) -> Option<f64> {
        match &self.profile {
            Profile::Analytic => None,
            Profile::Catenoid(p) => Some(p.s_max()),
            Profile::Ball(c) => Some(c.w_max()),
        }
    }

    pub fn profile(&self) -> Option<&ProfileCurve> {
        match &self.profile {
            Profile::Catenoid(p) => Some(p),
            _ => None,
        }
    }

    pub fn generating_curve(&self) -> Option<&GeneratingCurve> {
        match &self.profile {
            Profile::Ball(c) => Some(c),
            _ => None,
        }
    }

    fn components(&self, u: f64, v: f64) -> Result<[Jet2; 4], SurfaceError> {
        match (&self.kind, &self.profile) {
            (SurfaceKind::Helicoid { a }, _) => {
                let (u, v) = (Jet2::var_u(u), Jet2::var_v(v));
                let av = v * *a;
                let (cu, su) = (u.cosh(), u.sinh());
                Ok([cu * v.cosh(), cu * v.sinh(), su * av.cos(), su * av.sin()])
            }
            (_, Profile::Catenoid(p)) => catenoid_jet(p, u, v),
            (SurfaceKind::BallCatenoid { a_bar }, Profile::Ball(c)) => {
                let (x0, x1, x2) = c.x_jet(u)?;
                let w = Jet2::var_u(u);
                let th = Jet2::var_v(v);
                let x = w.chain(x0, x1, x2);
                let y = w * w + *a_bar;
                let (cy, sy) = (y.cosh(), y.sinh());
                Ok([cy * x.cosh(), sy * th.sin(), cy * x.sinh(), sy * th.cos()])
            }
            _ => unreachable!("chart kind and profile are built together"),
        }
    }

    pub fn point(&self, u: f64, v: f64) -> Result<LorentzVec, SurfaceError> {
        if let SurfaceKind::Helicoid { a } = self.kind {
            return helicoid_point(a, u, v);
        }
        let c = self.components(u, v)?;
        Ok(LorentzVec::new(c[0].v, c[1].v, c[2].v, c[3].v))
    }

    /// Exact first and second partials.
    pub fn jet(&self, u: f64, v: f64) -> Result<ChartJet, SurfaceError> {
        self.components(u, v).map(ChartJet::from_components)
    }

    /// Default finite-difference step at `(u, v)`.
    pub fn fd_step(u: f64, v: f64) -> f64 {
        FD_STEP * 1f64.max(u.abs()).max(v.abs())
    }

    /// Central finite-difference partials with step `h`.
    pub fn jet_fd(&self, u: f64, v: f64, h: f64) -> Result<ChartJet, SurfaceError> {
        check("h", h, h > 0.0, "must be positive")?;
        let p = |du: f64, dv: f64| self.point(u + du * h, v + dv * h);
        let x = p(0.0, 0.0)?;
        let (up, um, vp, vm) = (p(1.0, 0.0)?, p(-1.0, 0.0)?, p(0.0, 1.0)?, p(0.0, -1.0)?);
        let (pp, pm, mp, mm) = (p(1.0, 1.0)?, p(1.0, -1.0)?, p(-1.0, 1.0)?, p(-1.0, -1.0)?);
        let h2 = h * h;
        Ok(ChartJet {
            x,
            xu: (up - um) * (0.5 / h),
            xv: (vp - vm) * (0.5 / h),
            xuu: (up - x * 2.0 + um) * (1.0 / h2),
            xvv: (vp - x * 2.0 + vm) * (1.0 / h2),
            xuv: (pp - pm - mp + mm) * (0.25 / h2),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::minkowski_dot;
    use approx::assert_abs_diff_eq;

    #[test]
    fn helicoid_examples() {
        for a in [0.0, 1.0, 5.0] {
            assert_eq!(helicoid_point(a, 0.0, 0.0).unwrap(), LorentzVec::ORIGIN);
        }
        let p = helicoid_point(2.3, 0.8, 0.0).unwrap();
        assert_eq!(p, LorentzVec::new(0.8f64.cosh(), 0.0, 0.8f64.sinh(), 0.0));
        assert!(matches!(
            helicoid_point(-0.1, 0.0, 0.0),
            Err(SurfaceError::InvalidParameter { name: "a", .. })
        ));
        assert!(SurfaceChart::helicoid(f64::NAN).is_err());
    }

    #[test]
    fn parabolic_basis_inner_products() {
        let e = PARABOLIC_BASIS;
        let expected = |j: usize, k: usize| match (j, k) {
            (0, 0) | (2, 2) => 0.0,
            (0, 2) | (2, 0) => -0.5,
            (1, 1) | (3, 3) => 1.0,
            _ => 0.0,
        };
        for j in 0..4 {
            for k in 0..4 {
                assert_eq!(minkowski_dot(&e[j], &e[k]), expected(j, k), "<e{},e{}>", j + 1, k + 1);
            }
        }
    }

    #[test]
    fn profile_starts_at_zero() {
        let p = catenoid_profile(CatenoidKind::Spherical { a_tilde: 1.0 }, 2.0, 1e-10).unwrap();
        assert_eq!(p.sample(0.0).unwrap().integral, 0.0);
        let q = catenoid_profile(CatenoidKind::Parabolic, 2.0, 1e-10).unwrap();
        let s0 = q.sample(0.0).unwrap();
        assert_eq!(s0.x4, 0.0);
        assert_eq!(s0.x3, 1.0);
        assert_eq!(s0.x1, 1.0);
    }

    #[test]
    fn profile_is_odd_and_increasing() {
        let p = catenoid_profile(CatenoidKind::Hyperbolic { a_tilde: 0.9 }, 3.0, 1e-10).unwrap();
        let samples = p.samples();
        for w in samples.windows(2) {
            assert!(w[1].integral > w[0].integral);
        }
        let a = p.sample(1.234).unwrap().integral;
        let b = p.sample(-1.234).unwrap().integral;
        assert_eq!(a, -b);
    }

    #[test]
    fn profile_out_of_range() {
        let p = catenoid_profile(CatenoidKind::Parabolic, 1.0, 1e-10).unwrap();
        assert!(matches!(p.sample(1.5), Err(SurfaceError::OutOfRange { .. })));
        assert!(catenoid_point(&p, -2.0, 0.0).is_err());
    }

    #[test]
    fn invalid_catenoid_parameters() {
        for kind in [CatenoidKind::Spherical { a_tilde: 0.5 }, CatenoidKind::Hyperbolic { a_tilde: 0.2 }] {
            assert!(catenoid_profile(kind, 1.0, 1e-10).is_err());
            assert!(relation_a_of_catenoid(kind).is_err());
        }
        assert!(catenoid_profile(CatenoidKind::Parabolic, 1.0, 0.0).is_err());
        assert!(ball_catenoid_generating_curve(0.5, 0.5, 1e-10).is_err());
        assert!(ball_catenoid_generating_curve(0.0, 1.0, 1e-10).is_err());
        assert!(a_bar_of_pitch(1.0).is_err());
    }

    #[test]
    fn spherical_waist_distance() {
        let at = 1.7;
        let p = catenoid_profile(CatenoidKind::Spherical { a_tilde: at }, 1.0, 1e-10).unwrap();
        let x = catenoid_point(&p, 0.0, 0.0).unwrap();
        // rotation geodesic is (cosh r, 0, 0, sinh r); sinh(dist) = |(x2, x3)|
        let d = x.0[1].hypot(x.0[2]).asinh();
        assert_abs_diff_eq!(d, (at - 0.5f64).sqrt().asinh(), epsilon = 1e-14);
    }

    #[test]
    fn spherical_rotation_is_periodic() {
        let p = catenoid_profile(CatenoidKind::Spherical { a_tilde: 1.2 }, 2.0, 1e-10).unwrap();
        for s in [-1.5, 0.0, 0.7] {
            let a = catenoid_point(&p, s, 0.4).unwrap();
            let b = catenoid_point(&p, s, 0.4 + 2.0 * PI).unwrap();
            assert!((a - b).max_abs() < 1e-10);
        }
    }

    #[test]
    fn generating_curve_basics() {
        let c = ball_catenoid_generating_curve(0.6, 4.0, 1e-10).unwrap();
        assert_eq!(c.x_of_t(0.6, Branch::Plus).unwrap(), 0.0);
        assert!(c.x_of_t(0.5, Branch::Plus).is_err());
        let x = c.x_of_t(2.0, Branch::Plus).unwrap();
        assert_eq!(c.x_of_t(2.0, Branch::Minus).unwrap(), -x);
        let s = c.samples();
        assert_abs_diff_eq!(s.last().unwrap().0, 4.0, epsilon = 1e-12);
        for w in s.windows(2) {
            assert!(w[1].1 > w[0].1);
        }
    }

    #[test]
    fn sinhc2_helpers_are_continuous() {
        for z in [9e-9, 1.1e-8, 9.9e-4, 1.01e-3] {
            assert_abs_diff_eq!(sinhc2(z), (2.0 * z).sinh() / z, epsilon = 1e-14);
        }
        let exact = |z: f64| 2.0 / (2.0 * z).tanh() - 1.0 / z;
        assert_abs_diff_eq!(sinhc2_log_derivative(0.999e-3), exact(0.999e-3), epsilon = 1e-9);
        assert_abs_diff_eq!(sinhc2_log_derivative(0.5), exact(0.5), epsilon = 1e-15);
    }

    #[test]
    fn warped_metric_coefficients() {
        let m = WarpedMetric;
        assert_eq!(m.coefficients(0.0), (1.0, 1.0));
        let y = 0.7;
        assert_eq!(m.line_element(y, 0.3, 0.4), y.cosh().powi(2) * 0.09 + 0.16);
        // x is arclength on the axis
        let p = m.to_hyperboloid(1.3, 0.0, 0.2);
        assert_abs_diff_eq!(p.0[0], 1.3f64.cosh(), epsilon = 1e-15);
    }

    #[test]
    fn relation_examples() {
        assert_eq!(relation_a_of_catenoid(CatenoidKind::Parabolic).unwrap(), 1.0);
        let a_bar: f64 = 0.8;
        let a = relation_a_of_catenoid(CatenoidKind::Spherical { a_tilde: a_tilde_of_a_bar(a_bar) }).unwrap();
        assert_abs_diff_eq!(a, 1.0 / a_bar.tanh(), epsilon = 1e-14);
        assert_abs_diff_eq!(a_bar_of_pitch(a).unwrap(), a_bar, epsilon = 1e-14);
    }
}
