//! Jacobi operator `L = Δ + |A|² − 2` on compact parameter domains.
//!
//! The eigenproblem `−Lφ = λφ` is discretized by the five-point divergence
//! form stencil with metric coefficients at half-nodes and a lumped mass, so
//! that `A φ = λ B φ` with `A` symmetric and `B` diagonal positive. The
//! smallest eigenvalue comes from shift-and-invert Lanczos on
//! `B^{1/2} (A − σB)^{-1} B^{1/2}`; the Morse index from the inertia of `A`.

mod band;
mod lanczos;
mod sweep;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diffgeo::{fundamental_forms, GeometryError};
use crate::surfaces::{SurfaceChart, SurfaceError};

pub use band::{BandLdl, StencilMatrix};
pub use sweep::{
    ball_catenoid_schedule, classify, conjugacy_crosscheck, critical_pitch, exhaustion, fit_tail,
    lambda1_richardson, square_schedule, BisectionStep, Classification, ConjugacyOptions, ConjugacyReport,
    CriticalReport, ExhaustionReport, RichardsonReport, TailFit,
};

/// Threshold below which `|λ1|` is reported as marginal.
pub const EPS_MARGINAL: f64 = 1e-4;
/// Normwise backward error required of a converged eigenpair.
pub const RESIDUAL_TOL: f64 = 1e-8;
pub const DEFAULT_SCHEDULE_SPACING: f64 = 0.05;
pub const DEFAULT_CRITICAL_SPACING: f64 = 0.04;
pub const DEFAULT_CRITICAL_HALF_WIDTH: f64 = 6.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StabilityError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("chart is not orthogonal at ({u}, {v}): F = {f:e}")]
    NonOrthogonal { u: f64, v: f64, f: f64 },
    #[error("non-finite metric or potential at ({u}, {v})")]
    NonFinite { u: f64, v: f64 },
    #[error("invalid domain: {0}")]
    BadDomain(String),
    #[error("invalid grid: {0}")]
    BadGrid(String),
    #[error("LDL^T breakdown at row {row} (pivot {pivot:e}, shift {shift})")]
    Breakdown { row: usize, pivot: f64, shift: f64 },
    #[error("eigen-solver did not converge after {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("bracket [{lo}, {hi}] does not straddle the stability threshold")]
    BracketInvalid { lo: f64, hi: f64 },
    #[error("domain {index} of the schedule does not contain its predecessor")]
    NotNested { index: usize },
}

/// Metric coefficients and Jacobi potential `q = |A|² + Ric(e3)` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub q: f64,
}

/// Anything that supplies a metric and a potential on a parameter domain.
pub trait JacobiField: Sync {
    fn sample(&self, u: f64, v: f64) -> Result<FieldSample, StabilityError>;

    /// Period of `v`, for fields that close up.
    fn v_period(&self) -> Option<f64> {
        None
    }
}

impl JacobiField for SurfaceChart {
    fn sample(&self, u: f64, v: f64) -> Result<FieldSample, StabilityError> {
        // Far out in v the boost makes Minkowski products cancel badly.
        let v = if self.kind().v_equivariant() { 0.0 } else { v };
        let ff = fundamental_forms(self, u, v)?;
        Ok(FieldSample { e: ff.e, f: ff.f, g: ff.g, q: ff.jacobi_potential() })
    }

    fn v_period(&self) -> Option<f64> {
        self.kind().v_period()
    }
}

/// Euclidean metric with a prescribed potential.
pub struct FlatField<Q> {
    pub potential: Q,
}

impl<Q: Fn(f64, f64) -> f64 + Sync> JacobiField for FlatField<Q> {
    fn sample(&self, u: f64, v: f64) -> Result<FieldSample, StabilityError> {
        Ok(FieldSample { e: 1.0, f: 0.0, g: 1.0, q: (self.potential)(u, v) })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Domain {
    pub fn new(u0: f64, u1: f64, v0: f64, v1: f64) -> Result<Self, StabilityError> {
        let d = Domain { u0, u1, v0, v1 };
        if [u0, u1, v0, v1].iter().all(|x| x.is_finite()) && u1 > u0 && v1 > v0 {
            Ok(d)
        } else {
            Err(StabilityError::BadDomain(d.to_string()))
        }
    }

    /// `[−k, k]²`.
    pub fn square(k: f64) -> Result<Self, StabilityError> {
        Self::new(-k, k, -k, k)
    }

    pub fn contains(&self, other: &Domain) -> bool {
        self.u0 <= other.u0 && other.u1 <= self.u1 && self.v0 <= other.v0 && other.v1 <= self.v1
    }

    pub fn strictly_contains(&self, other: &Domain) -> bool {
        self.contains(other) && self != other
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}] x [{}, {}]", self.u0, self.u1, self.v0, self.v1)
    }
}

/// Interior node counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub nu: usize,
    pub nv: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum VBoundary {
    #[default]
    Dirichlet,
    Periodic,
}

/// Jacobi eigenproblem on a domain: Dirichlet in `u`, Dirichlet or periodic in `v`.
pub struct JacobiProblem<'a> {
    field: &'a dyn JacobiField,
    domain: Domain,
    grid: Grid,
    boundary: VBoundary,
}

impl fmt::Debug for JacobiProblem<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JacobiProblem")
            .field("domain", &self.domain)
            .field("grid", &self.grid)
            .field("boundary", &self.boundary)
            .finish()
    }
}

impl<'a> JacobiProblem<'a> {
    pub fn new(
        field: &'a dyn JacobiField,
        domain: Domain,
        grid: Grid,
        boundary: VBoundary,
    ) -> Result<Self, StabilityError> {
        Domain::new(domain.u0, domain.u1, domain.v0, domain.v1)?;
        let min_v = if boundary == VBoundary::Periodic { 3 } else { 1 };
        if grid.nu < 1 || grid.nv < min_v {
            return Err(StabilityError::BadGrid(format!("{} x {} nodes", grid.nu, grid.nv)));
        }
        if boundary == VBoundary::Periodic {
            let period = field
                .v_period()
                .ok_or_else(|| StabilityError::BadDomain("periodic boundary on a non-periodic field".into()))?;
            let len = domain.v1 - domain.v0;
            if (len - period).abs() > 1e-12 * period {
                return Err(StabilityError::BadDomain(format!("v-range {len} differs from the period {period}")));
            }
        }
        Ok(JacobiProblem { field, domain, grid, boundary })
    }

    /// Grid with spacing as close to `h` as the domain allows.
    pub fn with_spacing(
        field: &'a dyn JacobiField,
        domain: Domain,
        h: f64,
        boundary: VBoundary,
    ) -> Result<Self, StabilityError> {
        if !(h > 0.0) {
            return Err(StabilityError::BadGrid(format!("spacing {h}")));
        }
        let cells = |len: f64| (len / h).round().max(1.0) as usize;
        let nu = cells(domain.u1 - domain.u0).saturating_sub(1);
        let nv = match boundary {
            VBoundary::Dirichlet => cells(domain.v1 - domain.v0).saturating_sub(1),
            VBoundary::Periodic => cells(domain.v1 - domain.v0),
        };
        Self::new(field, domain, Grid { nu, nv }, boundary)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn boundary(&self) -> VBoundary {
        self.boundary
    }

    pub fn field(&self) -> &'a dyn JacobiField {
        self.field
    }

    /// `(Δu, Δv)`.
    pub fn spacing(&self) -> (f64, f64) {
        let d = self.domain;
        let du = (d.u1 - d.u0) / (self.grid.nu + 1) as f64;
        let dv = match self.boundary {
            VBoundary::Dirichlet => (d.v1 - d.v0) / (self.grid.nv + 1) as f64,
            VBoundary::Periodic => (d.v1 - d.v0) / self.grid.nv as f64,
        };
        (du, dv)
    }

    fn node_u(&self, i: f64) -> f64 {
        self.domain.u0 + (i + 1.0) * self.spacing().0
    }

    fn node_v(&self, j: f64) -> f64 {
        let off = if self.boundary == VBoundary::Dirichlet { 1.0 } else { 0.0 };
        self.domain.v0 + (j + off) * self.spacing().1
    }

    fn v_fast(&self) -> bool {
        self.boundary == VBoundary::Periodic || self.grid.nv <= self.grid.nu
    }

    /// Unknown index of interior node `(i, j)`.
    pub fn index(&self, i: usize, j: usize) -> usize {
        if self.v_fast() {
            i * self.grid.nv + j
        } else {
            j * self.grid.nu + i
        }
    }

    pub fn len(&self) -> usize {
        self.grid.nu * self.grid.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Parameter coordinates of every unknown, in index order.
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let mut out = vec![(0.0, 0.0); self.len()];
        for i in 0..self.grid.nu {
            for j in 0..self.grid.nv {
                out[self.index(i, j)] = (self.node_u(i as f64), self.node_v(j as f64));
            }
        }
        out
    }

    fn sample_checked(&self, u: f64, v: f64) -> Result<FieldSample, StabilityError> {
        let s = self.field.sample(u, v)?;
        if ![s.e, s.f, s.g, s.q].iter().all(|x| x.is_finite()) || !(s.e > 0.0 && s.g > 0.0) {
            return Err(StabilityError::NonFinite { u, v });
        }
        if s.f.abs() > 1e-8 * (s.e * s.g).sqrt() {
            return Err(StabilityError::NonOrthogonal { u, v, f: s.f });
        }
        Ok(s)
    }

    /// Stiffness-plus-potential matrix `A` and lumped mass diagonal `B`.
    pub fn assemble(&self) -> Result<Assembled, StabilityError> {
        let (nu, nv) = (self.grid.nu, self.grid.nv);
        let (du, dv) = self.spacing();
        let periodic = self.boundary == VBoundary::Periodic;
        // Column sweeps of half-node coefficients: a_u = √(G/E), a_v = √(E/G).
        let mut a_u = vec![0.0; (nu + 1) * nv];
        for i in 0..=nu {
            for j in 0..nv {
                let s = self.sample_checked(self.node_u(i as f64 - 0.5), self.node_v(j as f64))?;
                a_u[i * nv + j] = (s.g / s.e).sqrt();
            }
        }
        let nvh = if periodic { nv } else { nv + 1 };
        let mut a_v = vec![0.0; nu * nvh];
        for i in 0..nu {
            for j in 0..nvh {
                let s = self.sample_checked(self.node_u(i as f64), self.node_v(j as f64 - 0.5))?;
                a_v[i * nvh + j] = (s.e / s.g).sqrt();
            }
        }
        let n = self.len();
        let mut node = vec![(0.0, 0.0); n];
        for i in 0..nu {
            for j in 0..nv {
                let s = self.sample_checked(self.node_u(i as f64), self.node_v(j as f64))?;
                node[self.index(i, j)] = ((s.e * s.g).sqrt(), s.q);
            }
        }
        let (cu, cv) = (dv / du, du / dv);
        let mut a = StencilMatrix::with_capacity(n, 3);
        let mut b = vec![0.0; n];
        let mut lower = Vec::with_capacity(3);
        let mut ij = vec![(0, 0); n];
        for i in 0..nu {
            for j in 0..nv {
                ij[self.index(i, j)] = (i, j);
            }
        }
        for (r, &(i, j)) in ij.iter().enumerate() {
            let (west, east) = (a_u[i * nv + j], a_u[(i + 1) * nv + j]);
            let south = a_v[i * nvh + j];
            let north = if periodic { a_v[i * nvh + (j + 1) % nv] } else { a_v[i * nvh + j + 1] };
            let (sqrt_g, q) = node[r];
            let mass = sqrt_g * du * dv;
            b[r] = mass;
            lower.clear();
            let mut push = |c: usize, val: f64| {
                if c < r {
                    lower.push((c, val));
                }
            };
            if i > 0 {
                push(self.index(i - 1, j), -cu * west);
            }
            if i + 1 < nu {
                push(self.index(i + 1, j), -cu * east);
            }
            if j > 0 {
                push(self.index(i, j - 1), -cv * south);
            } else if periodic {
                push(self.index(i, nv - 1), -cv * south);
            }
            if j + 1 < nv {
                push(self.index(i, j + 1), -cv * north);
            } else if periodic {
                push(self.index(i, 0), -cv * north);
            }
            lower.sort_by_key(|&(c, _)| c);
            let diag = cu * (west + east) + cv * (south + north) - q * mass;
            a.push_row(diag, &lower);
        }
        Ok(Assembled { a, b })
    }
}

/// Discrete pair `(A, B)`.
#[derive(Debug, Clone)]
pub struct Assembled {
    pub a: StencilMatrix,
    pub b: Vec<f64>,
}

impl Assembled {
    pub fn area(&self) -> f64 {
        self.b.iter().sum()
    }

    /// `‖Aφ − λBφ‖∞ / ((‖A‖∞ + |λ|‖B‖∞) ‖φ‖∞)`.
    pub fn backward_error(&self, lambda: f64, phi: &[f64]) -> f64 {
        let mut r = vec![0.0; phi.len()];
        self.a.matvec(phi, &mut r);
        let rn = r
            .iter()
            .zip(phi)
            .zip(&self.b)
            .map(|((ri, pi), bi)| (ri - lambda * bi * pi).abs())
            .fold(0.0, f64::max);
        let pn = phi.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let bn = self.b.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        rn / ((self.a.norm_inf() + lambda.abs() * bn) * pn)
    }
}

/// Tunables of the eigen-solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Relative Ritz residual for the final Lanczos stage.
    pub ritz_tol: f64,
    pub lanczos_basis: usize,
    pub max_iterations: usize,
    pub residual_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { ritz_tol: 1e-11, lanczos_basis: 60, max_iterations: 1200, residual_tol: RESIDUAL_TOL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub domain: Domain,
    pub grid: Grid,
    pub boundary: VBoundary,
    pub du: f64,
    pub dv: f64,
    pub lambda1: f64,
    pub negative_count: usize,
    pub residual: f64,
    pub ground_state_one_signed: bool,
    pub iterations: usize,
    pub shift: f64,
    /// `Σ B_ii`, the discrete area.
    pub area: f64,
    pub lambda1_extrapolated: Option<f64>,
}

/// Morse index with the shift at which the inertia was taken.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub count: usize,
    pub shift: f64,
    pub fallback: bool,
}

/// Inertia of `A − σB`, nudging `σ` downward on pivot breakdown.
fn inertia_below(asm: &Assembled, shift: f64) -> Result<IndexReport, StabilityError> {
    let scale = asm.a.norm_inf() / asm.b.iter().fold(f64::INFINITY, |m, &x| m.min(x));
    let mut s = shift;
    for attempt in 0..4 {
        match BandLdl::factor(&asm.a, s, &asm.b) {
            Ok(f) => return Ok(IndexReport { count: f.negative_pivots(), shift: s, fallback: attempt > 0 }),
            Err(StabilityError::Breakdown { .. }) if attempt < 3 => {
                s = shift - 1e-10 * scale * 10f64.powi(attempt);
            }
            Err(e) => return Err(e),
        }
    }
    unreachable!("loop returns on its last attempt")
}

/// Morse index: number of negative eigenvalues of `(A, B)`.
pub fn morse_index(problem: &JacobiProblem) -> Result<IndexReport, StabilityError> {
    inertia_below(&problem.assemble()?, 0.0)
}

/// Whether `λ1 < 0`, from inertia alone.
pub fn is_unstable(problem: &JacobiProblem) -> Result<bool, StabilityError> {
    Ok(morse_index(problem)?.count > 0)
}

fn shift_invert_stage(
    asm: &Assembled,
    fact: &BandLdl,
    start: &[f64],
    rel_tol: f64,
    opts: &SolverOptions,
) -> lanczos::LanczosOutcome {
    let root_b: Vec<f64> = asm.b.iter().map(|x| x.sqrt()).collect();
    lanczos::largest_eigenpair(
        |x, y| {
            for ((yi, xi), rb) in y.iter_mut().zip(x).zip(&root_b) {
                *yi = xi * rb;
            }
            fact.solve_in_place(y);
            for (yi, rb) in y.iter_mut().zip(&root_b) {
                *yi *= rb;
            }
        },
        start,
        rel_tol,
        opts.lanczos_basis,
        opts.max_iterations,
    )
}

/// Smallest eigenvalue of an assembled pair.
pub fn solve_lambda1(asm: &Assembled, opts: &SolverOptions) -> Result<SolvedPair, StabilityError> {
    let bound = asm.a.gershgorin_lower(&asm.b);
    let sigma0 = bound - 1e-3 * bound.abs().max(1.0);
    let f0 = BandLdl::factor(&asm.a, sigma0, &asm.b)?;
    let start: Vec<f64> = asm.b.iter().map(|x| x.sqrt()).collect();
    let coarse = shift_invert_stage(asm, &f0, &start, 1e-6, opts);
    let mut iterations = coarse.iterations;
    let estimate = sigma0 + 1.0 / coarse.theta;
    drop(f0);
    // Move the shift next to the estimate, keeping it below the spectrum.
    let mut chosen = None;
    let mut delta = (2e-2 * estimate.abs().max(1.0)).max(10.0 * coarse.residual / (coarse.theta * coarse.theta));
    for _ in 0..3 {
        let s = estimate - delta;
        if s <= sigma0 {
            break;
        }
        if let Ok(f) = BandLdl::factor(&asm.a, s, &asm.b) {
            if f.negative_pivots() == 0 {
                chosen = Some(f);
                break;
            }
        }
        delta *= 10.0;
    }
    let fact = match chosen {
        Some(f) => f,
        None => BandLdl::factor(&asm.a, sigma0, &asm.b)?,
    };
    let fine = shift_invert_stage(asm, &fact, &coarse.vector, opts.ritz_tol, opts);
    iterations += fine.iterations;
    let lambda = fact.shift() + 1.0 / fine.theta;
    let mut phi: Vec<f64> = fine.vector.iter().zip(&asm.b).map(|(y, b)| y / b.sqrt()).collect();
    if phi.iter().sum::<f64>() < 0.0 {
        phi.iter_mut().for_each(|x| *x = -*x);
    }
    let residual = asm.backward_error(lambda, &phi);
    if !(residual < opts.residual_tol) {
        return Err(StabilityError::NoConvergence { iterations, residual });
    }
    let peak = phi.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let one_signed = phi.iter().all(|&x| x > -1e-10 * peak);
    Ok(SolvedPair { lambda, phi, residual, iterations, shift: fact.shift(), one_signed })
}

/// Eigenpair for `λ1` with solver diagnostics.
#[derive(Debug, Clone)]
pub struct SolvedPair {
    pub lambda: f64,
    pub phi: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub shift: f64,
    pub one_signed: bool,
}

/// First Dirichlet eigenvalue with Morse index and diagnostics.
pub fn lambda1(problem: &JacobiProblem) -> Result<SpectrumReport, StabilityError> {
    lambda1_with(problem, &SolverOptions::default())
}

pub fn lambda1_with(problem: &JacobiProblem, opts: &SolverOptions) -> Result<SpectrumReport, StabilityError> {
    let asm = problem.assemble()?;
    let pair = solve_lambda1(&asm, opts)?;
    // No eigenvalue lies below a shift whose inertia was zero.
    let negative_count = if pair.shift >= 0.0 { 0 } else { inertia_below(&asm, 0.0)?.count };
    let (du, dv) = problem.spacing();
    Ok(SpectrumReport {
        domain: problem.domain,
        grid: problem.grid,
        boundary: problem.boundary,
        du,
        dv,
        lambda1: pair.lambda,
        negative_count,
        residual: pair.residual,
        ground_state_one_signed: pair.one_signed,
        iterations: pair.iterations,
        shift: pair.shift,
        area: asm.area(),
        lambda1_extrapolated: None,
    })
}
