//! Second-order forward-mode differentiation in two variables.
//!
//! A [`Jet2`] carries a value with its first and second partials in `(u, v)`.
//! Chart formulas written over `Jet2` yield exact (to round-off) first and
//! second derivatives without hand expansion.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet2 {
    pub v: f64,
    pub du: f64,
    pub dv: f64,
    pub duu: f64,
    pub duv: f64,
    pub dvv: f64,
}

impl Jet2 {
    pub const fn constant(v: f64) -> Self {
        Jet2 { v, du: 0.0, dv: 0.0, duu: 0.0, duv: 0.0, dvv: 0.0 }
    }

    /// The coordinate function `u`.
    pub const fn var_u(u: f64) -> Self {
        Jet2 { v: u, du: 1.0, dv: 0.0, duu: 0.0, duv: 0.0, dvv: 0.0 }
    }

    /// The coordinate function `v`.
    pub const fn var_v(v: f64) -> Self {
        Jet2 { v, du: 0.0, dv: 1.0, duu: 0.0, duv: 0.0, dvv: 0.0 }
    }

    /// Compose with a scalar function given its value and first two
    /// derivatives at `self.v`.
    pub fn chain(self, f: f64, df: f64, d2f: f64) -> Self {
        Jet2 {
            v: f,
            du: df * self.du,
            dv: df * self.dv,
            duu: d2f * self.du * self.du + df * self.duu,
            duv: d2f * self.du * self.dv + df * self.duv,
            dvv: d2f * self.dv * self.dv + df * self.dvv,
        }
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn sinh(self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(s, c, s)
    }

    pub fn cosh(self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(c, s, c)
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn sqrt(self) -> Self {
        let r = self.v.sqrt();
        self.chain(r, 0.5 / r, -0.25 / (r * self.v))
    }

    pub fn recip(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }

    pub fn scale(self, s: f64) -> Self {
        Jet2 {
            v: self.v * s,
            du: self.du * s,
            dv: self.dv * s,
            duu: self.duu * s,
            duv: self.duv * s,
            dvv: self.dvv * s,
        }
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        Jet2 {
            v: self.v + o.v,
            du: self.du + o.du,
            dv: self.dv + o.dv,
            duu: self.duu + o.duu,
            duv: self.duv + o.duv,
            dvv: self.dvv + o.dvv,
        }
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(mut self, c: f64) -> Jet2 {
        self.v += c;
        self
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        self + (-o)
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    fn sub(mut self, c: f64) -> Jet2 {
        self.v -= c;
        self
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        Jet2 {
            v: self.v * o.v,
            du: self.du * o.v + self.v * o.du,
            dv: self.dv * o.v + self.v * o.dv,
            duu: self.duu * o.v + 2.0 * self.du * o.du + self.v * o.duu,
            duv: self.duv * o.v + self.du * o.dv + self.dv * o.du + self.v * o.duv,
            dvv: self.dvv * o.v + 2.0 * self.dv * o.dv + self.v * o.dvv,
        }
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, s: f64) -> Jet2 {
        self.scale(s)
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    fn div(self, o: Jet2) -> Jet2 {
        self * o.recip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // f(u,v) = sinh(u)·cos(2v)/(1 + u²v²)
    fn f(u: f64, v: f64) -> f64 {
        u.sinh() * (2.0 * v).cos() / (1.0 + u * u * v * v)
    }

    #[test]
    fn matches_finite_differences() {
        let (u0, v0) = (0.7, -0.4);
        let u = Jet2::var_u(u0);
        let v = Jet2::var_v(v0);
        let j = u.sinh() * (v * 2.0).cos() / (u * u * v * v + 1.0);
        let h = 1e-4;
        assert_abs_diff_eq!(j.v, f(u0, v0), epsilon = 1e-15);
        assert_abs_diff_eq!(j.du, (f(u0 + h, v0) - f(u0 - h, v0)) / (2.0 * h), epsilon = 1e-7);
        assert_abs_diff_eq!(j.dv, (f(u0, v0 + h) - f(u0, v0 - h)) / (2.0 * h), epsilon = 1e-7);
        let fuu = (f(u0 + h, v0) - 2.0 * f(u0, v0) + f(u0 - h, v0)) / (h * h);
        let fvv = (f(u0, v0 + h) - 2.0 * f(u0, v0) + f(u0, v0 - h)) / (h * h);
        let fuv = (f(u0 + h, v0 + h) - f(u0 + h, v0 - h) - f(u0 - h, v0 + h)
            + f(u0 - h, v0 - h))
            / (4.0 * h * h);
        assert_abs_diff_eq!(j.duu, fuu, epsilon = 1e-6);
        assert_abs_diff_eq!(j.dvv, fvv, epsilon = 1e-6);
        assert_abs_diff_eq!(j.duv, fuv, epsilon = 1e-6);
    }

    #[test]
    fn sqrt_and_exp_identities() {
        let u = Jet2::var_u(1.3);
        let r = (u * u).sqrt();
        assert_abs_diff_eq!(r.du, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.duu, 0.0, epsilon = 1e-14);
        let e = u.exp();
        assert_abs_diff_eq!(e.duu, 1.3f64.exp(), epsilon = 1e-14);
    }
}
