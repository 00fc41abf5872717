//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

// Kronrod abscissae on [0,1]; odd indices are the Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

pub const DEFAULT_MAX_SUBDIVISIONS: usize = 2000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error(
        "quadrature did not reach tolerance {tol:e}: worst subinterval [{a}, {b}] \
         has error estimate {estimate:e}"
    )]
    NoConvergence {
        a: f64,
        b: f64,
        estimate: f64,
        tol: f64,
    },
    #[error("integrand is not finite on [{a}, {b}]")]
    NonFinite { a: f64, b: f64 },
    #[error("invalid tolerance {0:e}")]
    BadTolerance(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel, QuadratureError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut finite = fc.is_finite();
    for (k, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let f1 = f(c - h * x);
        let f2 = f(c + h * x);
        finite &= f1.is_finite() && f2.is_finite();
        kronrod += w * (f1 + f2);
        if k % 2 == 1 {
            gauss += WG[k / 2] * (f1 + f2);
        }
    }
    if !finite {
        return Err(QuadratureError::NonFinite { a, b });
    }
    let value = kronrod * h;
    let error = ((kronrod - gauss) * h).abs();
    // Floor the estimate at round-off level of the panel value.
    let error = error.max(50.0 * f64::EPSILON * value.abs());
    Ok(Panel { a, b, value, error })
}

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Integral, QuadratureError> {
    integrate_with_limit(f, a, b, tol, DEFAULT_MAX_SUBDIVISIONS)
}

pub fn integrate_with_limit<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_subdivisions: usize,
) -> Result<Integral, QuadratureError> {
    if !(tol > 0.0) {
        return Err(QuadratureError::BadTolerance(tol));
    }
    if a == b {
        return Ok(Integral { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let first = gk15(&f, a, b)?;
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    let mut total = first.value;
    let mut err = first.error;
    heap.push(first);
    while err > tol {
        if heap.len() >= max_subdivisions {
            let worst = heap.peek().copied().unwrap_or(first);
            return Err(QuadratureError::NoConvergence {
                a: worst.a,
                b: worst.b,
                estimate: err,
                tol,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let left = gk15(&f, worst.a, mid)?;
        let right = gk15(&f, mid, worst.b)?;
        evaluations += 30;
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if mid == worst.a || mid == worst.b {
            // interval collapsed to adjacent floats
            return Err(QuadratureError::NoConvergence {
                a: worst.a,
                b: worst.b,
                estimate: err,
                tol,
            });
        }
    }
    // Re-sum to shed the drift of the running updates.
    let value = heap.iter().map(|p| p.value).sum::<f64>();
    let error = heap.iter().map(|p| p.error).sum::<f64>();
    debug_assert!((value - total).abs() <= 1e3 * tol.max(f64::EPSILON * value.abs()));
    Ok(Integral { value, error, evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, 1e-12).unwrap();
        assert_abs_diff_eq!(r.value, 10.5 - 9.0, epsilon = 1e-13);
        assert_eq!(r.evaluations, 15);
    }

    #[test]
    fn peaked_integrand_adapts() {
        let r = integrate(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-10).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert_abs_diff_eq!(r.value, exact, epsilon = 1e-9);
        assert!(r.evaluations > 15);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let r = integrate(f64::cos, 1.0, 0.0, 1e-12).unwrap();
        assert_abs_diff_eq!(r.value, -(1f64.sin()), epsilon = 1e-14);
        let p = integrate(|x: f64| 1.0 / (1e-3 + x * x), 1.0, -1.0, 1e-10).unwrap();
        assert!(p.evaluations > 15);
        assert!(p.value < 0.0);
    }

    #[test]
    fn reports_failing_subinterval() {
        let err = integrate_with_limit(|x: f64| 1.0 / x.abs().sqrt(), 0.0, 1.0, 1e-14, 20).unwrap_err();
        match err {
            QuadratureError::NoConvergence { a, b, .. } => {
                assert_eq!(a, 0.0);
                assert!(b < 1e-3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_finite_integrand() {
        let err = integrate(|x: f64| 1.0 / (x - 0.5), 0.0, 1.0, 1e-8).unwrap_err();
        assert!(matches!(err, QuadratureError::NonFinite { .. }));
    }

    #[test]
    fn bad_tolerance() {
        assert_eq!(
            integrate(f64::sin, 0.0, 1.0, 0.0),
            Err(QuadratureError::BadTolerance(0.0))
        );
    }
}
