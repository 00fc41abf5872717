//! Lorentzian 4-space and the three models of hyperbolic 3-space.
//!
//! Points of H³ live on the upper sheet of `⟨x,x⟩ = -1` in L⁴ with the
//! signature (−,+,+,+) product. The Poincaré ball and the upper half-space
//! are reached through the isometries below; the coordinate orderings are
//! chosen so that the helicoid `x = (cosh u cosh v, cosh u sinh v,
//! sinh u cos av, sinh u sin av)` is mapped to
//!
//! * ball: `(sinh u cos av, sinh u sin av, cosh u sinh v) / (1 + cosh u cosh v)`
//! * upper half-space: `z = e^{v + i a v} tanh u`, `t = e^v sech u`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance applied to the model invariants at construction.
pub const MODEL_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("point is off the hyperboloid: <x,x> + 1 = {defect:e}")]
    OffHyperboloid { defect: f64 },
    #[error("point is on the lower sheet (x1 = {x1})")]
    LowerSheet { x1: f64 },
    #[error("point is outside the open unit ball (|p|^2 = {norm2})")]
    OutsideBall { norm2: f64 },
    #[error("point is not in the upper half-space (t = {t})")]
    NonPositiveHeight { t: f64 },
    #[error("non-finite coordinate")]
    NonFinite,
}

/// A vector in Lorentzian 4-space, first coordinate timelike.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LorentzVec(pub [f64; 4]);

impl LorentzVec {
    pub const ZERO: LorentzVec = LorentzVec([0.0; 4]);
    /// Base point `(1,0,0,0)` of the hyperboloid.
    pub const ORIGIN: LorentzVec = LorentzVec([1.0, 0.0, 0.0, 0.0]);

    pub const fn new(x1: f64, x2: f64, x3: f64, x4: f64) -> Self {
        LorentzVec([x1, x2, x3, x4])
    }

    /// Standard basis vector `e_k`, `k` zero-based.
    pub fn basis(k: usize) -> Self {
        let mut c = [0.0; 4];
        c[k] = 1.0;
        LorentzVec(c)
    }

    pub fn dot(&self, other: &LorentzVec) -> f64 {
        minkowski_dot(self, other)
    }

    /// Lorentzian squared norm `⟨x,x⟩`.
    pub fn norm2(&self) -> f64 {
        minkowski_dot(self, self)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Largest absolute coordinate.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }
}

impl Add for LorentzVec {
    type Output = LorentzVec;
    fn add(self, rhs: LorentzVec) -> LorentzVec {
        let (a, b) = (self.0, rhs.0);
        LorentzVec([a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]])
    }
}

impl Sub for LorentzVec {
    type Output = LorentzVec;
    fn sub(self, rhs: LorentzVec) -> LorentzVec {
        let (a, b) = (self.0, rhs.0);
        LorentzVec([a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]])
    }
}

impl Neg for LorentzVec {
    type Output = LorentzVec;
    fn neg(self) -> LorentzVec {
        self * -1.0
    }
}

impl Mul<f64> for LorentzVec {
    type Output = LorentzVec;
    fn mul(self, s: f64) -> LorentzVec {
        let a = self.0;
        LorentzVec([a[0] * s, a[1] * s, a[2] * s, a[3] * s])
    }
}

impl Mul<LorentzVec> for f64 {
    type Output = LorentzVec;
    fn mul(self, v: LorentzVec) -> LorentzVec {
        v * self
    }
}

impl fmt::Display for LorentzVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.0;
        write!(f, "({}, {}, {}, {})", c[0], c[1], c[2], c[3])
    }
}

/// `⟨x,y⟩ = −x1·y1 + x2·y2 + x3·y3 + x4·y4`.
pub fn minkowski_dot(a: &LorentzVec, b: &LorentzVec) -> f64 {
    let (a, b) = (a.0, b.0);
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

/// Defect `⟨x,x⟩ + 1`, scaled by the size of the point so that the test is
/// meaningful for points far from the base point, where the cancellation in
/// `−x1² + …` loses absolute precision.
pub fn hyperboloid_defect(x: &LorentzVec) -> f64 {
    (x.norm2() + 1.0) / x.0[0].abs().max(1.0).powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Hyperboloid,
    Ball,
    UpperHalf,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Hyperboloid => "hyperboloid",
            Model::Ball => "ball",
            Model::UpperHalf => "upper-half",
        })
    }
}

/// Point on the upper sheet of the hyperboloid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HyperboloidPoint(LorentzVec);

/// Point of the open unit ball with the metric `4|dx|²/(1 − r²)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallPoint([f64; 3]);

/// Point `(x + iy, t)` of the upper half-space, `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UpperHalfPoint([f64; 3]);

impl HyperboloidPoint {
    pub fn new(x: LorentzVec) -> Result<Self, ModelError> {
        if !x.is_finite() {
            return Err(ModelError::NonFinite);
        }
        let defect = hyperboloid_defect(&x);
        if defect.abs() > MODEL_TOL {
            return Err(ModelError::OffHyperboloid { defect });
        }
        // `x1 ≥ 1` on the upper sheet; allow the same round-off as above.
        if x.0[0] < 1.0 - MODEL_TOL {
            return Err(ModelError::LowerSheet { x1: x.0[0] });
        }
        Ok(HyperboloidPoint(x))
    }

    pub fn origin() -> Self {
        HyperboloidPoint(LorentzVec::ORIGIN)
    }

    pub fn vec(&self) -> LorentzVec {
        self.0
    }

    pub fn to_ball(&self) -> BallPoint {
        let [x1, x2, x3, x4] = self.0 .0;
        let s = 1.0 / (1.0 + x1);
        BallPoint([x3 * s, x4 * s, x2 * s])
    }

    pub fn to_upper_half(&self) -> UpperHalfPoint {
        let [x1, x2, x3, x4] = self.0 .0;
        // x1 − x2 > 0 on the upper sheet; it is 1/t.
        let w = x1 - x2;
        UpperHalfPoint([x3 / w, x4 / w, 1.0 / w])
    }

    /// Hyperbolic distance, `2·asinh(|p − q|_L / 2)`. Equivalent to
    /// `acosh(−⟨p,q⟩)` but accurate for nearby points.
    pub fn distance(&self, other: &HyperboloidPoint) -> f64 {
        let d = self.0 - other.0;
        let chord2 = d.norm2().max(0.0);
        2.0 * (0.5 * chord2.sqrt()).asinh()
    }
}

impl BallPoint {
    pub fn new(p: [f64; 3]) -> Result<Self, ModelError> {
        if p.iter().any(|c| !c.is_finite()) {
            return Err(ModelError::NonFinite);
        }
        let norm2 = p.iter().map(|c| c * c).sum::<f64>();
        if norm2 >= 1.0 {
            return Err(ModelError::OutsideBall { norm2 });
        }
        Ok(BallPoint(p))
    }

    pub fn coords(&self) -> [f64; 3] {
        self.0
    }

    pub fn to_hyperboloid(&self) -> HyperboloidPoint {
        let [x, y, z] = self.0;
        let r2 = x * x + y * y + z * z;
        let s = 2.0 / (1.0 - r2);
        HyperboloidPoint(LorentzVec([(1.0 + r2) / (1.0 - r2), z * s, x * s, y * s]))
    }
}

impl UpperHalfPoint {
    pub fn new(x: f64, y: f64, t: f64) -> Result<Self, ModelError> {
        if !(x.is_finite() && y.is_finite() && t.is_finite()) {
            return Err(ModelError::NonFinite);
        }
        if t <= 0.0 {
            return Err(ModelError::NonPositiveHeight { t });
        }
        Ok(UpperHalfPoint([x, y, t]))
    }

    /// `(x, y, t)` with `z = x + iy`.
    pub fn coords(&self) -> [f64; 3] {
        self.0
    }

    pub fn to_hyperboloid(&self) -> HyperboloidPoint {
        let [x, y, t] = self.0;
        let z2 = x * x + y * y;
        let sum = (t * t + z2) / t; // x1 + x2
        let diff = 1.0 / t; // x1 − x2
        HyperboloidPoint(LorentzVec([
            0.5 * (sum + diff),
            0.5 * (sum - diff),
            x / t,
            y / t,
        ]))
    }
}

/// A validated point of H³ in one of the three models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ModelPoint {
    Hyperboloid(HyperboloidPoint),
    Ball(BallPoint),
    UpperHalf(UpperHalfPoint),
}

impl ModelPoint {
    pub fn hyperboloid(x: LorentzVec) -> Result<Self, ModelError> {
        HyperboloidPoint::new(x).map(ModelPoint::Hyperboloid)
    }

    pub fn ball(p: [f64; 3]) -> Result<Self, ModelError> {
        BallPoint::new(p).map(ModelPoint::Ball)
    }

    pub fn upper_half(x: f64, y: f64, t: f64) -> Result<Self, ModelError> {
        UpperHalfPoint::new(x, y, t).map(ModelPoint::UpperHalf)
    }

    pub fn model(&self) -> Model {
        match self {
            ModelPoint::Hyperboloid(_) => Model::Hyperboloid,
            ModelPoint::Ball(_) => Model::Ball,
            ModelPoint::UpperHalf(_) => Model::UpperHalf,
        }
    }

    /// Model coordinates: 4 entries for the hyperboloid, 3 otherwise.
    pub fn coords(&self) -> Vec<f64> {
        match self {
            ModelPoint::Hyperboloid(p) => p.vec().0.to_vec(),
            ModelPoint::Ball(p) => p.coords().to_vec(),
            ModelPoint::UpperHalf(p) => p.coords().to_vec(),
        }
    }

    pub fn to_hyperboloid(&self) -> HyperboloidPoint {
        match self {
            ModelPoint::Hyperboloid(p) => *p,
            ModelPoint::Ball(p) => p.to_hyperboloid(),
            ModelPoint::UpperHalf(p) => p.to_hyperboloid(),
        }
    }

    pub fn to_model(&self, model: Model) -> ModelPoint {
        if self.model() == model {
            return *self;
        }
        let h = self.to_hyperboloid();
        match model {
            Model::Hyperboloid => ModelPoint::Hyperboloid(h),
            Model::Ball => ModelPoint::Ball(h.to_ball()),
            Model::UpperHalf => ModelPoint::UpperHalf(h.to_upper_half()),
        }
    }
}

/// Hyperboloid → ball, `(x,y,z) = (x3, x4, x2)/(1 + x1)`.
pub fn hyperboloid_to_ball(x: LorentzVec) -> Result<BallPoint, ModelError> {
    HyperboloidPoint::new(x).map(|p| p.to_ball())
}

/// Hyperboloid → upper half-space, `t = 1/(x1 − x2)`, `z = (x3 + i x4)·t`.
pub fn hyperboloid_to_upper_half(x: LorentzVec) -> Result<UpperHalfPoint, ModelError> {
    HyperboloidPoint::new(x).map(|p| p.to_upper_half())
}

/// Distance between two points of H³, computed on the hyperboloid.
pub fn hyperbolic_distance(p: &ModelPoint, q: &ModelPoint) -> f64 {
    p.to_hyperboloid().distance(&q.to_hyperboloid())
}
