//! Degree-2 Taylor (jet) arithmetic over intervals, plus the generic scalar
//! trait that lets one integrand definition serve four evaluation modes:
//! plain f64 sampling (oracles), interval box evaluation, and jet evaluation
//! in either integration variable.
//!
//! A [`Jet`] carries enclosures of a function value and its first and second
//! derivatives with respect to one distinguished variable over a box. The
//! quadrature panel rule consumes the `d2` component for its
//! `h^3/24 * f''` remainder; containment of all three components is the
//! soundness contract and is fuzz-tested against finite differences.

use crate::interval::{Interval, IntervalError};
use std::ops::{Add, Mul, Neg, Sub};

/// Scalar types an integrand can be written over.
///
/// Partial operations are fallible so that interval/jet evaluation can signal
/// domain trouble (a panel touching a singularity, an `abs` with undetermined
/// sign) and let the caller subdivide or fall back instead of panicking.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn of(x: f64) -> Self;
    /// Embed an interval-valued parameter held constant during evaluation.
    ///
    /// The `f64` instance collapses to the midpoint and is therefore only
    /// suitable for non-rigorous sampling oracles.
    fn of_interval(c: Interval) -> Self;
    fn try_div(self, rhs: Self) -> Result<Self, IntervalError>;
    fn try_sqrt(self) -> Result<Self, IntervalError>;
    fn try_powf(self, a: f64) -> Result<Self, IntervalError>;
    fn powi2(self) -> Self;
    fn atan(self) -> Self;
    fn exp(self) -> Self;
    /// Absolute value; fails for jets whose value sign is undetermined
    /// (|f| is then not twice differentiable on the box).
    fn try_abs(self) -> Result<Self, IntervalError>;
    /// Cube root of a positive quantity.
    fn try_cbrt(self) -> Result<Self, IntervalError> {
        self.try_powf(1.0 / 3.0)
    }
    /// Tightens the value enclosure with an externally known pointwise bound:
    /// the caller asserts the true value lies in `known` everywhere on the
    /// box. Derivative information is untouched; no-op for plain `f64`.
    fn tighten_value(self, known: Interval) -> Self {
        let _ = known;
        self
    }
}

impl Scalar for f64 {
    fn of(x: f64) -> f64 {
        x
    }
    fn of_interval(c: Interval) -> f64 {
        c.midpoint()
    }
    fn try_div(self, rhs: f64) -> Result<f64, IntervalError> {
        Ok(self / rhs)
    }
    fn try_sqrt(self) -> Result<f64, IntervalError> {
        Ok(self.sqrt())
    }
    fn try_powf(self, a: f64) -> Result<f64, IntervalError> {
        Ok(self.powf(a))
    }
    fn powi2(self) -> f64 {
        self * self
    }
    fn atan(self) -> f64 {
        f64::atan(self)
    }
    fn exp(self) -> f64 {
        f64::exp(self)
    }
    fn try_abs(self) -> Result<f64, IntervalError> {
        Ok(self.abs())
    }
}

impl Scalar for Interval {
    fn of(x: f64) -> Interval {
        Interval::point(x)
    }
    fn of_interval(c: Interval) -> Interval {
        c
    }
    fn try_div(self, rhs: Interval) -> Result<Interval, IntervalError> {
        Interval::try_div(self, rhs)
    }
    fn try_sqrt(self) -> Result<Interval, IntervalError> {
        self.sqrt()
    }
    fn try_powf(self, a: f64) -> Result<Interval, IntervalError> {
        self.powf(a)
    }
    fn powi2(self) -> Interval {
        self.powi(2).expect("powi(2) is total")
    }
    fn atan(self) -> Interval {
        Interval::atan(self)
    }
    fn tighten_value(self, known: Interval) -> Interval {
        self.intersect(known).unwrap_or(self)
    }
    fn exp(self) -> Interval {
        Interval::exp(self)
    }
    fn try_abs(self) -> Result<Interval, IntervalError> {
        Ok(self.abs())
    }
}

/// Value, first- and second-derivative enclosures with respect to one
/// variable over a box.
#[derive(Clone, Copy, Debug)]
pub struct Jet {
    pub f: Interval,
    pub d1: Interval,
    pub d2: Interval,
}

impl Jet {
    /// The integration variable ranging over `x`.
    pub fn var(x: Interval) -> Jet {
        Jet {
            f: x,
            d1: Interval::ONE,
            d2: Interval::ZERO,
        }
    }

    /// A constant (possibly an interval parameter held fixed).
    pub fn con(c: Interval) -> Jet {
        Jet {
            f: c,
            d1: Interval::ZERO,
            d2: Interval::ZERO,
        }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet {
            f: self.f + o.f,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet {
            f: self.f - o.f,
            d1: self.d1 - o.d1,
            d2: self.d2 - o.d2,
        }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet {
            f: -self.f,
            d1: -self.d1,
            d2: -self.d2,
        }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet {
            f: self.f * o.f,
            d1: self.d1 * o.f + self.f * o.d1,
            d2: self.d2 * o.f + (self.d1 * o.d1) * Interval::point(2.0) + self.f * o.d2,
        }
    }
}

impl Scalar for Jet {
    fn of(x: f64) -> Jet {
        Jet::con(Interval::point(x))
    }
    fn of_interval(c: Interval) -> Jet {
        Jet::con(c)
    }
    fn tighten_value(self, known: Interval) -> Jet {
        Jet {
            f: self.f.intersect(known).unwrap_or(self.f),
            ..self
        }
    }

    fn try_div(self, rhs: Jet) -> Result<Jet, IntervalError> {
        // q = f/g, q' = (f' - q g')/g, q'' = (f'' - 2 q' g' - q g'')/g.
        let q = self.f.try_div(rhs.f)?;
        let q1 = (self.d1 - q * rhs.d1).try_div(rhs.f)?;
        let q2 = (self.d2 - q1 * rhs.d1 * Interval::point(2.0) - q * rhs.d2).try_div(rhs.f)?;
        Ok(Jet { f: q, d1: q1, d2: q2 })
    }

    fn try_sqrt(self) -> Result<Jet, IntervalError> {
        // g = sqrt(f), g' = f'/(2g), g'' = f''/(2g) - f'^2/(4 g^3).
        let g = self.f.sqrt()?;
        let g1 = self.d1.try_div(g * Interval::point(2.0))?;
        let g3 = g * g * g;
        let g2 = self.d2.try_div(g * Interval::point(2.0))?
            - (self.d1 * self.d1).try_div(g3 * Interval::point(4.0))?;
        Ok(Jet { f: g, d1: g1, d2: g2 })
    }

    fn try_powf(self, a: f64) -> Result<Jet, IntervalError> {
        // g = f^a, g' = a f^{a-1} f', g'' = a f^{a-1} f'' + a(a-1) f^{a-2} f'^2.
        // A constant jet needs no derivative coefficients, so f^{a-1} may be
        // unbounded (e.g. sqrt of an interval touching zero) without harm.
        let is_zero = |d: Interval| d.lo == 0.0 && d.hi == 0.0;
        if is_zero(self.d1) && is_zero(self.d2) {
            return Ok(Jet::con(self.f.powf(a)?));
        }
        let fa = self.f.powf(a)?;
        let fam1 = self.f.powf(a - 1.0)?;
        let fam2 = self.f.powf(a - 2.0)?;
        let ai = Interval::point(a);
        let g1 = ai * fam1 * self.d1;
        let g2 = ai * fam1 * self.d2
            + ai * Interval::point(a - 1.0) * fam2 * (self.d1 * self.d1);
        Ok(Jet { f: fa, d1: g1, d2: g2 })
    }

    fn powi2(self) -> Jet {
        Jet {
            f: self.f.powi(2).expect("powi(2) is total"),
            d1: self.f * self.d1 * Interval::point(2.0),
            d2: (self.d1 * self.d1 + self.f * self.d2) * Interval::point(2.0),
        }
    }

    fn atan(self) -> Jet {
        // g' = f'/(1+f^2), g'' = f''/(1+f^2) - 2 f f'^2/(1+f^2)^2.
        let den = Interval::ONE + self.f.powi(2).expect("powi(2)");
        let g1 = self.d1 / den;
        let g2 = self.d2 / den
            - (self.f * (self.d1 * self.d1) * Interval::point(2.0)) / (den * den);
        Jet {
            f: self.f.atan(),
            d1: g1,
            d2: g2,
        }
    }

    fn exp(self) -> Jet {
        let e = self.f.exp();
        Jet {
            f: e,
            d1: e * self.d1,
            d2: e * (self.d2 + self.d1 * self.d1),
        }
    }

    fn try_abs(self) -> Result<Jet, IntervalError> {
        match self.f.determined_sign()? {
            1 => Ok(self),
            _ => Ok(-self),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var_at(x: f64) -> Jet {
        Jet::var(Interval::point(x))
    }

    #[test]
    fn polynomial_derivatives() {
        // f(x) = x^2 * x + 3x at x = 2: f = 14, f' = 15, f'' = 12.
        let x = var_at(2.0);
        let f = x.powi2() * x + Jet::of(3.0) * x;
        assert!(f.f.contains(14.0));
        assert!(f.d1.contains(15.0));
        assert!(f.d2.contains(12.0));
        assert!(f.d2.width() < 1e-12);
    }

    #[test]
    fn quotient_and_sqrt() {
        // g(x) = sqrt(x) / (1 + x) at x = 4: g = 2/5, g' = 1/sqrt(x)/2/(1+x) - sqrt(x)/(1+x)^2
        let x = var_at(4.0);
        let g = x.try_sqrt().unwrap().try_div(Jet::of(1.0) + x).unwrap();
        let exact = |x: f64| x.sqrt() / (1.0 + x);
        let h = 1e-5;
        let d1 = (exact(4.0 + h) - exact(4.0 - h)) / (2.0 * h);
        let d2 = (exact(4.0 + h) - 2.0 * exact(4.0) + exact(4.0 - h)) / (h * h);
        assert!(g.f.contains(exact(4.0)));
        assert!((g.d1.midpoint() - d1).abs() < 1e-8);
        assert!((g.d2.midpoint() - d2).abs() < 1e-5);
    }

    #[test]
    fn powf_matches_finite_differences() {
        let x = var_at(1.7);
        let g = x.try_powf(-1.5).unwrap();
        let exact = |x: f64| x.powf(-1.5);
        let h = 1e-5;
        assert!(g.f.contains(exact(1.7)));
        assert!((g.d1.midpoint() - (exact(1.7 + h) - exact(1.7 - h)) / (2.0 * h)).abs() < 1e-7);
    }

    #[test]
    fn second_derivative_encloses_over_box() {
        // f(x) = atan(x): f'' = -2x/(1+x^2)^2; over [0,1] the range is [-1/2, 0].
        let f = Jet::var(Interval::new(0.0, 1.0)).atan();
        assert!(f.d2.contains(0.0) && f.d2.contains(-0.5));
    }

    #[test]
    fn abs_requires_sign() {
        assert!(Jet::var(Interval::new(-1.0, 1.0)).try_abs().is_err());
        let j = Jet::var(Interval::new(-2.0, -1.0)).try_abs().unwrap();
        assert!(j.f.contains(1.5) && j.d1.contains(-1.0));
    }
}
