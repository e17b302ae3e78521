//! One-dimensional optimal transport between the positive and negative mass
//! of singular convolution kernels, and the sharp constants obtained by
//! integrating the weighted displacement of those transport plans.
//!
//! The kernels of interest are the two velocity-gradient kernels
//! `y1*y2/|y|^4` and `(y1^2-y2^2)/(2|y|^4)`, their finite differences at a
//! fixed offset, and the boundary Hilbert kernel `2/(1-y^2)`. On each line
//! where one coordinate is frozen, such a kernel has a single sign change, and
//! the monotone pairing `T` solving the mass balance `int_x^{T(x)} K = 0` is
//! available in closed form: a radical expression for the unique real root of
//! a cubic (or a pure square root), optionally polished by one interval Newton
//! contraction and post-verified against the closed-form antiderivative.
//!
//! The weighted displacement integral `int |K| |x - T(x)|^alpha dx` of a
//! pairing bounds the Holder-seminorm response of the convolution, so the
//! sharp constants of the velocity-gradient estimates reduce to validated
//! quadrature of such cost integrals plus a supremum over the geometric
//! parameters (distance to the boundary, localization radius). All public
//! enclosures are rigorous: quadrature is interval-based, improper integrals
//! carry analytic tail envelopes, and parameter suprema are taken over
//! interval cells whose endpoints bracket the admissible range.

use crate::interval::{Interval, IntervalError};
use crate::jet::{Jet, Scalar};
use crate::quadrature::{
    integrate_1d, integrate_2d, power_tail, Endpoint, Integrand1, Integrand2, IvalFn1, IvalFn2,
    JetFn1, JetFn2, QuadOptions, QuadratureError, SingularEndpoint,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Errors from transport-map construction and sharp-constant assembly.
///
/// Quadrature and interval failures carry the name of the failing component
/// so a multi-term assembly points at the term that broke.
#[derive(Debug, Error)]
pub enum TransportError {
    #[error("quadrature failed in component `{component}`: {source}")]
    Quadrature {
        component: String,
        source: QuadratureError,
    },
    #[error("interval evaluation failed in component `{component}`: {source}")]
    Evaluation {
        component: String,
        source: IntervalError,
    },
    #[error(
        "cannot verify a unique real root at source {source_point}: \
         the cubic discriminant enclosure admits multiple real roots"
    )]
    MultipleRoots { source_point: f64 },
    #[error(
        "transport map failed post-verification at source {source_point}: \
         mass residual {residual:e} exceeds {tol:e}"
    )]
    MassResidual {
        source_point: f64,
        residual: f64,
        tol: f64,
    },
    #[error("invalid transport configuration: {0}")]
    Config(String),
}

impl TransportError {
    fn quad(component: &str, source: QuadratureError) -> Self {
        TransportError::Quadrature {
            component: component.to_string(),
            source,
        }
    }
}

// ---------------------------------------------------------------------------
// Kernels and closed-form antiderivatives (generic over the scalar type).
// ---------------------------------------------------------------------------

/// `K_p(a, b) = a b / (a^2 + b^2)^2`, the mixed-derivative kernel.
pub fn kernel_product<S: Scalar>(a: S, b: S) -> Result<S, IntervalError> {
    let r2 = a.powi2() + b.powi2();
    (a * b).try_div(r2.powi2())
}

/// `K_h(a, b) = (a^2 - b^2) / (2 (a^2 + b^2)^2)`, the difference kernel.
pub fn kernel_half_difference<S: Scalar>(a: S, b: S) -> Result<S, IntervalError> {
    let a2 = a.powi2();
    let b2 = b.powi2();
    let r2 = a2 + b2;
    (a2 - b2).try_div(r2.powi2() * S::of(2.0))
}

/// Offset difference of the product kernel in its first argument:
/// `K_p(s1 + e, s2) - K_p(s1 - e, s2)`.
pub fn diff_product_x<S: Scalar>(s1: S, s2: S, e: f64) -> Result<S, IntervalError> {
    let ep = S::of(e);
    Ok(kernel_product(s1 + ep, s2)? - kernel_product(s1 - ep, s2)?)
}

/// Offset-1 difference of the difference kernel in its first argument:
/// `K_h(y1 + 1, y2) - K_h(y1 - 1, y2)`.
pub fn diff_half_x<S: Scalar>(y1: S, y2: S) -> Result<S, IntervalError> {
    let one = S::of(1.0);
    Ok(kernel_half_difference(y1 + one, y2)? - kernel_half_difference(y1 - one, y2)?)
}

/// Antiderivative of `K_p(., s2)`: `d/du [-s2 / (2 (u^2 + s2^2))] = K_p(u, s2)`.
fn antider_product<S: Scalar>(u: S, s2: S) -> Result<S, IntervalError> {
    (-s2).try_div((u.powi2() + s2.powi2()) * S::of(2.0))
}

/// `int_0^t [K_p(s+e, s2) - K_p(s-e, s2)] ds` in closed form (zero at `t = 0`).
pub fn mass_product_x<S: Scalar>(t: S, s2: S, e: f64) -> Result<S, IntervalError> {
    let ep = S::of(e);
    Ok(antider_product(t + ep, s2)? - antider_product(t - ep, s2)?)
}

/// `int_0^t K_h(a, s) ds = t / (2 (a^2 + t^2))` (vertical antiderivative).
pub fn mass_half_vertical<S: Scalar>(a: S, t: S) -> Result<S, IntervalError> {
    t.try_div((a.powi2() + t.powi2()) * S::of(2.0))
}

/// `int_0^t [K_h(y1+1, s) - K_h(y1-1, s)] ds` for the offset-1 difference.
pub fn mass_diff_vertical<S: Scalar>(y1: S, t: S) -> Result<S, IntervalError> {
    let one = S::of(1.0);
    Ok(mass_half_vertical(y1 + one, t)? - mass_half_vertical(y1 - one, t)?)
}

/// Horizontal antiderivative of `K_h(., b)`:
/// `d/ds [-s / (2 (s^2 + b^2))] = K_h(s, b)`.
fn antider_half_horizontal<S: Scalar>(s: S, b: S) -> Result<S, IntervalError> {
    (-s).try_div((s.powi2() + b.powi2()) * S::of(2.0))
}

/// Horizontal antiderivative of the offset-1 difference kernel
/// (zero at `s = 0` after the two shifts cancel only in the limit; callers
/// use differences of this value, so the constant is irrelevant).
pub fn mass_diff_horizontal<S: Scalar>(s: S, y2: S) -> Result<S, IntervalError> {
    let one = S::of(1.0);
    Ok(antider_half_horizontal(s + one, y2)? - antider_half_horizontal(s - one, y2)?)
}

// ---------------------------------------------------------------------------
// Sign thresholds.
// ---------------------------------------------------------------------------

/// Sign-change location of `K_p(s1+1/2, s2) - K_p(s1-1/2, s2)` in `s1 > 0`:
/// `f(s2)^2 = (1/2 - 2 s2^2 + sqrt(16 s2^4 + 4 s2^2 + 1)) / 6`.
pub fn threshold_product<S: Scalar>(s2: S) -> Result<S, IntervalError> {
    let q = s2.powi2();
    let rad = (q.powi2() * S::of(16.0) + q * S::of(4.0) + S::of(1.0)).try_sqrt()?;
    ((S::of(0.5) - q * S::of(2.0) + rad) * S::of(1.0 / 6.0)).try_sqrt()
}

/// Sign-change location of `K_h(y1+1, .) - K_h(y1-1, .)` in `y2 > 0`:
/// `s_c(y1)^2 = (-(y1^2 + 1) + 2 sqrt(y1^4 - y1^2 + 1)) / 3`.
pub fn threshold_diff_vertical<S: Scalar>(y1: S) -> Result<S, IntervalError> {
    let q = y1.powi2();
    let rad = (q.powi2() - q + S::of(1.0)).try_sqrt()?;
    ((rad * S::of(2.0) - q - S::of(1.0)) * S::of(1.0 / 3.0)).try_sqrt()
}

/// Sign-change locations of `K_h(y1+1, y2) - K_h(y1-1, y2)` in `y1 > 0` at
/// fixed `y2`: `h_c(y2)^2 = y2^2 + 1 -+ 2 y2 sqrt(y2^2 + 1)`. The lower root
/// exists only for `y2 < 3^{-1/2}`.
pub fn threshold_diff_horizontal<S: Scalar>(y2: S, upper: bool) -> Result<S, IntervalError> {
    let q = y2.powi2();
    let rad = (q + S::of(1.0)).try_sqrt()?;
    let cross = y2 * rad * S::of(2.0);
    if upper {
        (q + S::of(1.0) + cross).try_sqrt()
    } else {
        (q + S::of(1.0) - cross).try_sqrt()
    }
}

// ---------------------------------------------------------------------------
// Transport maps: unique real cubic root, square-root map, reciprocal maps.
// ---------------------------------------------------------------------------

/// Per-mode evaluation of the unique real root of a cubic.
///
/// The depressed-cubic radical is numerically fine at points but catastrophic
/// on wide intervals (the nested radicands amplify every input width), which
/// starves the adaptive quadrature in the outer integration direction. Each
/// scalar mode therefore solves the cubic its own way: plain `f64` uses the
/// radical plus Newton polish, intervals contract a midpoint seed by interval
/// Newton (first-order tight in the coefficient widths), and jets propagate
/// derivatives through the implicit function theorem on top of the interval
/// root.
pub trait CubicScalar: Scalar {
    /// Unique real root of `t^3 + c2 t^2 + c1 t + c0`. The `hint` is a range
    /// the caller knows contains the root (e.g. positivity from the sign of
    /// the coefficients); interval modes intersect with it and can recover a
    /// usable enclosure from it when the generic machinery smears.
    fn unique_cubic_root(c2: Self, c1: Self, c0: Self, hint: Interval)
        -> Result<Self, IntervalError>;
}

impl CubicScalar for f64 {
    fn unique_cubic_root(c2: f64, c1: f64, c0: f64, _hint: Interval) -> Result<f64, IntervalError> {
        let mut t = cubic_root_radical(c2, c1, c0)?;
        for _ in 0..3 {
            let p = ((t + c2) * t + c1) * t + c0;
            let dp = (3.0 * t + 2.0 * c2) * t + c1;
            let step = p / dp;
            if !step.is_finite() {
                break;
            }
            t -= step;
        }
        Ok(t)
    }
}

impl CubicScalar for Interval {
    fn unique_cubic_root(
        c2: Interval,
        c1: Interval,
        c0: Interval,
        hint: Interval,
    ) -> Result<Interval, IntervalError> {
        let seed = || -> Option<Interval> {
            let t0 = f64::unique_cubic_root(c2.midpoint(), c1.midpoint(), c0.midpoint(), hint)
                .ok()?;
            if !t0.is_finite() {
                return None;
            }
            contract_cubic_root(t0, c2, c1, c0)
        };
        let mut t = match seed() {
            Some(x) => x,
            None => cubic_root_radical(c2, c1, c0).unwrap_or(hint),
        };
        t = t.intersect(hint).unwrap_or(t);
        // Cauchy bound |root| <= 1 + max |c_i| keeps the box finite even when
        // the radical failed and the hint is a half line.
        let m = 1.0 + c2.abs().hi.max(c1.abs().hi).max(c0.abs().hi);
        if m.is_finite() {
            t = t.intersect(Interval::new(-m, m)).unwrap_or(t);
        }
        // Fixed-point polish: the root satisfies T = -c0 / (T^2 + c2 T + c1),
        // and for the transport cubics (c0 < 0, c1, c2 > 0 with a positive
        // hint) this form stays positive even when the Newton enclosure has
        // smeared across zero, recovering a strictly positive lower bound.
        // On wide coefficient boxes it is a plain interval contraction, so it
        // can also rebuild a finite enclosure from the bare hint.
        for _ in 0..6 {
            let den = (t + c2) * t + c1;
            let q = match (-c0).try_div(den) {
                Ok(q) => q,
                // den can straddle zero on a wide box (c1 < 0 happens), but
                // at the root den = -c0/T is positive, so the one-sided
                // bound T >= min(-c0)/max(den) survives.
                Err(_) if (-c0).lo >= 0.0 && den.hi > 0.0 => {
                    let lo = Interval::point((-c0).lo)
                        .try_div(Interval::point(den.hi))
                        .map(|v| v.lo)
                        .unwrap_or(0.0);
                    Interval::new(lo, f64::INFINITY)
                }
                Err(_) => break,
            };
            let next = match t.intersect(q) {
                Some(n) => n,
                None => break,
            };
            let stalled = next.width() > 0.99 * t.width();
            t = next;
            if stalled {
                break;
            }
        }
        if !t.is_finite() {
            return Err(IntervalError::Domain {
                func: "cubic root enclosure",
                lo: t.lo,
                hi: t.hi,
            });
        }
        Ok(t)
    }
}

impl CubicScalar for Jet {
    fn unique_cubic_root(c2: Jet, c1: Jet, c0: Jet, hint: Interval) -> Result<Jet, IntervalError> {
        let t = Interval::unique_cubic_root(c2.f, c1.f, c0.f, hint)?;
        // p_T = 3 T^2 + 2 c2 T + c1, evaluated over the root enclosure; the
        // implicit derivatives need it bounded away from zero. With a single
        // real root, p(t) = 0 eliminates c1 and gives the equivalent form
        // p_T = t (2t + c2) - c0/t, which is often far tighter (for the
        // transport cubics every term is positive); intersect the two.
        let three = Interval::point(3.0);
        let two = Interval::point(2.0);
        let mut pt = t * t * three + c2.f * t * two + c1.f;
        if let Ok(q) = c0.f.try_div(t) {
            let alt = t * (t * two + c2.f) - q;
            if let Some(tight) = pt.intersect(alt) {
                pt = tight;
            }
        }
        if pt.contains(0.0) {
            return Err(IntervalError::Domain {
                func: "cubic root implicit derivative",
                lo: pt.lo,
                hi: pt.hi,
            });
        }
        // p(T; v) = 0 differentiated in the jet variable v:
        //   T'  = -q / p_T,             q  = c2' T^2 + c1' T + c0'
        //   T'' = -(p_T' T' + q') / p_T
        let q = c2.d1 * t * t + c1.d1 * t + c0.d1;
        let td1 = -q.try_div(pt)?;
        let pt_dot = (t * Interval::point(6.0) + c2.f * two) * td1 + c2.d1 * t * two + c1.d1;
        let q_dot = c2.d2 * t * t
            + c2.d1 * t * td1 * two
            + c1.d2 * t
            + c1.d1 * td1
            + c0.d2;
        let td2 = -(pt_dot * td1 + q_dot).try_div(pt)?;
        Ok(Jet {
            f: t,
            d1: td1,
            d2: td2,
        })
    }
}

/// Interval Newton contraction of the unique cubic root around an `f64` seed.
/// Returns `None` when no inflation radius verifies, e.g. when the derivative
/// enclosure straddles zero.
fn contract_cubic_root(t0: f64, c2: Interval, c1: Interval, c0: Interval) -> Option<Interval> {
    let t0i = Interval::point(t0);
    let p0 = ((t0i + c2) * t0i + c1) * t0i + c0;
    let three = Interval::point(3.0);
    let two = Interval::point(2.0);
    let mut r = 1e-9 * (1.0 + t0.abs());
    for _ in 0..24 {
        let x = Interval::new(t0 - r, t0 + r);
        let dp = (x * three + c2 * two) * x + c1;
        if dp.contains(0.0) {
            r *= 8.0;
            continue;
        }
        let n = t0i - p0.try_div(dp).ok()?;
        if x.contains_interval(n) {
            // A second pass with the derivative over the contracted box
            // usually tightens the enclosure further.
            let dp2 = (n * three + c2 * two) * n + c1;
            if !dp2.contains(0.0) {
                if let Ok(step) = p0.try_div(dp2) {
                    if let Some(tight) = n.intersect(t0i - step) {
                        return Some(tight);
                    }
                }
            }
            return Some(n);
        }
        r *= 8.0;
    }
    None
}

/// Unique real root of `t^3 + c2 t^2 + c1 t + c0`, dispatched per scalar mode
/// (see [`CubicScalar`]). Fails (`Domain`) when the root enclosure cannot be
/// verified, letting interval callers subdivide.
pub fn cubic_unique_root<S: CubicScalar>(
    c2: S,
    c1: S,
    c0: S,
    hint: Interval,
) -> Result<S, IntervalError> {
    S::unique_cubic_root(c2, c1, c0, hint)
}

/// The transport cubics have `c0 <= 0`, so the product of the roots is
/// nonnegative and the unique real root cannot be negative.
fn nonneg_root() -> Interval {
    Interval::new(0.0, f64::INFINITY)
}

/// Depressed-cubic radical for the unique real root; generic, but only tight
/// at (near-)point inputs.
fn cubic_root_radical<S: Scalar>(c2: S, c1: S, c0: S) -> Result<S, IntervalError> {
    let third = S::of(1.0 / 3.0);
    let p = c1 - c2.powi2() * third;
    let q = (c2.powi2() * c2 * S::of(2.0) - c2 * c1 * S::of(9.0) + c0 * S::of(27.0))
        * S::of(1.0 / 27.0);
    // Radicand `q^2/4 + p^3/27 >= 0` iff the cubic has a single real root.
    let rad = q.powi2() * S::of(0.25) + p.powi2() * p * S::of(1.0 / 27.0);
    let r = rad.try_sqrt()?;
    let r1 = (-q * S::of(0.5) + r).try_cbrt()?;
    let z = r1 - p.try_div(r1 * S::of(3.0))?;
    Ok(z - c2 * third)
}

/// Transport partner for the offset-1/2 product-kernel difference on the line
/// `s2 = const`: the unique real root of
/// `T^3 + T^2 s1 + T (s1^2 - 1/2 + 2 s2^2) - (4 s2^2 + 1)^2 / (16 s1) = 0`.
pub fn map_product_x<S: CubicScalar>(s1: S, s2: S) -> Result<S, IntervalError> {
    let q = s2.powi2();
    let c1 = s1.powi2() - S::of(0.5) + q * S::of(2.0);
    let num = (q * S::of(4.0) + S::of(1.0)).powi2();
    let c0 = -num.try_div(s1 * S::of(16.0))?;
    cubic_unique_root(s1, c1, c0, nonneg_root())
}

/// Transport partner for the offset-1 difference kernel on the vertical line
/// `y1 = const`: the unique real root of
/// `T^3 + T^2 y2 + T (y2^2 + 2 + 2 y1^2) - (y1^2 - 1)^2 / y2 = 0`.
pub fn map_diff_vertical<S: CubicScalar>(y1: S, y2: S) -> Result<S, IntervalError> {
    let c1 = y2.powi2() + S::of(2.0) + y1.powi2() * S::of(2.0);
    let num = (y1.powi2() - S::of(1.0)).powi2();
    let c0 = -num.try_div(y2)?;
    cubic_unique_root(y2, c1, c0, nonneg_root())
}

/// Transport partner for the offset-1 difference kernel on the horizontal
/// line `y2 = const`:
/// `T^2 = (y1^2 + 2 y2^2 + y1^2 y2^2 + 3 y2^4 - 1) / (y1^2 - y2^2 - 1)`.
pub fn map_diff_horizontal<S: Scalar>(y1: S, y2: S) -> Result<S, IntervalError> {
    let a = y1.powi2();
    let b = y2.powi2();
    let num = a + b * S::of(2.0) + a * b + b.powi2() * S::of(3.0) - S::of(1.0);
    let den = a - b - S::of(1.0);
    num.try_div(den)?.try_sqrt()
}

/// Transport partner of the single kernel `K_h(a, .)` on a vertical line:
/// mass balance `T/(a^2+T^2) = y2/(a^2+y2^2)` gives `T = a^2 / y2`.
pub fn map_single_vertical<S: Scalar>(a: S, y2: S) -> Result<S, IntervalError> {
    a.powi2().try_div(y2)
}

/// One interval-Newton contraction pass for `t^3 + c2 t^2 + c1 t + c0` around
/// an enclosure `x` known to contain the root. Keeps `x` when the derivative
/// enclosure straddles zero or the contraction is inconsistent.
fn polish_cubic(mut x: Interval, c2: Interval, c1: Interval, c0: Interval) -> Interval {
    for _ in 0..3 {
        let dg = x.powi(2).expect("square is total") * Interval::point(3.0)
            + c2 * x * Interval::point(2.0)
            + c1;
        if dg.contains(0.0) {
            break;
        }
        let m = Interval::point(x.midpoint());
        let gm = ((m + c2) * m + c1) * m + c0;
        let step = match gm.try_div(dg) {
            Ok(s) => s,
            Err(_) => break,
        };
        match x.intersect(m - step) {
            Some(n) if n.width() < x.width() => x = n,
            _ => break,
        }
    }
    x
}

// ---------------------------------------------------------------------------
// Problem description and the public map / threshold / cost operations.
// ---------------------------------------------------------------------------

/// Kernel families a transport problem can be posed over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    /// `y1 y2 / |y|^4`.
    Product,
    /// `(y1^2 - y2^2) / (2 |y|^4)`.
    HalfDifference,
    /// Boundary kernel `2 / (1 - y^2)` on the line.
    Hilbert,
}

/// Rectangular localization window `|y1| <= x_half`, `|y2| <= y_half`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub x_half: f64,
    pub y_half: f64,
}

/// A kernel, an optional symmetric offset difference `K(.+e) - K(.-e)` in the
/// first argument, and an optional localization window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub offset: Option<f64>,
    pub window: Option<Window>,
}

impl KernelSpec {
    pub fn product_offset(e: f64) -> Self {
        KernelSpec {
            kind: KernelKind::Product,
            offset: Some(e),
            window: None,
        }
    }
    pub fn half_difference_offset() -> Self {
        KernelSpec {
            kind: KernelKind::HalfDifference,
            offset: Some(1.0),
            window: None,
        }
    }
    pub fn half_difference_plain() -> Self {
        KernelSpec {
            kind: KernelKind::HalfDifference,
            offset: None,
            window: None,
        }
    }
    pub fn hilbert() -> Self {
        KernelSpec {
            kind: KernelKind::Hilbert,
            offset: None,
            window: None,
        }
    }

    /// A window with an empty side annihilates the kernel.
    fn is_zero(&self) -> bool {
        matches!(self.window, Some(w) if w.x_half <= 0.0 || w.y_half <= 0.0)
    }
}

/// Which coordinate is frozen on the 1-D slice being transported.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Slice {
    /// Transport runs in the first coordinate; the second is fixed.
    FixedSecond(f64),
    /// Transport runs in the second coordinate; the first is fixed.
    FixedFirst(f64),
}

/// A kernel restricted to a 1-D slice, ready for thresholds/maps/costs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransportProblem {
    pub kernel: KernelSpec,
    pub slice: Slice,
}

/// Evaluator for the monotone transport pairing on one slice, carrying the
/// residual tolerance used by post-verification.
#[derive(Clone, Copy, Debug)]
pub struct TransportMap {
    pub problem: TransportProblem,
    pub residual_tol: f64,
}

/// Sign-change locations of the sliced kernel, in increasing order.
pub fn sign_threshold(
    kernel: &KernelSpec,
    slice: &Slice,
) -> Result<Vec<Interval>, TransportError> {
    let fail = |e: IntervalError| TransportError::Evaluation {
        component: "sign_threshold".to_string(),
        source: e,
    };
    match (kernel.kind, kernel.offset, slice) {
        (KernelKind::Hilbert, _, _) => Ok(vec![Interval::ONE]),
        (KernelKind::Product, Some(e), Slice::FixedSecond(s2)) => {
            if (e - 0.5).abs() > 1e-15 {
                return Err(TransportError::Config(
                    "the product-kernel threshold is tabulated for offset 1/2 only".into(),
                ));
            }
            Ok(vec![threshold_product(Interval::point(*s2)).map_err(fail)?])
        }
        (KernelKind::HalfDifference, Some(_), Slice::FixedFirst(y1)) => Ok(vec![
            threshold_diff_vertical(Interval::point(*y1)).map_err(fail)?,
        ]),
        (KernelKind::HalfDifference, Some(_), Slice::FixedSecond(y2)) => {
            let hi = threshold_diff_horizontal(Interval::point(*y2), true).map_err(fail)?;
            if y2.abs() < 1.0 / 3f64.sqrt() {
                let lo = threshold_diff_horizontal(Interval::point(*y2), false).map_err(fail)?;
                Ok(vec![lo, hi])
            } else {
                Ok(vec![hi])
            }
        }
        (KernelKind::HalfDifference, None, Slice::FixedFirst(a)) => {
            Ok(vec![Interval::point(a.abs())])
        }
        _ => Err(TransportError::Config(format!(
            "no sign threshold for {kernel:?} on slice {slice:?}"
        ))),
    }
}

/// Build the transport-map evaluator for a problem.
pub fn transport_map(problem: TransportProblem) -> TransportMap {
    TransportMap {
        problem,
        residual_tol: 1e-8,
    }
}

impl TransportMap {
    /// Rigorous enclosure of the transport partner: closed-form radical,
    /// one interval-Newton polish where a cubic is available, then a
    /// mass-balance residual check against the closed-form antiderivative.
    pub fn eval(&self, source: f64) -> Result<Interval, TransportError> {
        let t = self.eval_raw(Interval::point(source), source)?;
        let resid = self.mass_residual(Interval::point(source), t).map_err(|e| {
            TransportError::Evaluation {
                component: "mass residual".to_string(),
                source: e,
            }
        })?;
        if !resid.contains(0.0) && resid.abs().magnitude() > self.residual_tol {
            return Err(TransportError::MassResidual {
                source_point: source,
                residual: resid.abs().magnitude(),
                tol: self.residual_tol,
            });
        }
        Ok(t)
    }

    /// Fast non-rigorous evaluation: radical in `f64` followed by two Newton
    /// steps on the mass balance. Used by sampling-style property checks.
    pub fn eval_f64(&self, source: f64) -> Result<f64, TransportError> {
        let enclosure = self.eval_raw(Interval::point(source), source)?;
        let mut t = enclosure.midpoint();
        for _ in 0..3 {
            let (g, dg) = self.mass_and_density(source, t)?;
            let step = g / dg;
            // Near the sign threshold the density vanishes with the mass
            // imbalance; a Newton step there is noise over noise.
            if !step.is_finite() || step.abs() > 0.1 * (1.0 + t.abs()) {
                break;
            }
            t -= step;
        }
        Ok(t)
    }

    fn eval_raw(&self, source: Interval, at: f64) -> Result<Interval, TransportError> {
        let p = &self.problem;
        let multi = |e: IntervalError| match e {
            IntervalError::Domain { .. } => TransportError::MultipleRoots { source_point: at },
            other => TransportError::Evaluation {
                component: "transport map".to_string(),
                source: other,
            },
        };
        match (p.kernel.kind, p.kernel.offset, p.slice) {
            (KernelKind::Hilbert, _, _) => source.recip().map_err(multi),
            (KernelKind::Product, Some(e), Slice::FixedSecond(s2)) => {
                if (e - 0.5).abs() > 1e-15 {
                    return Err(TransportError::Config(
                        "the product-kernel cubic is tabulated for offset 1/2 only".into(),
                    ));
                }
                let s2 = Interval::point(s2);
                let q = s2.powi(2).expect("square is total");
                let c1 = source.powi(2).expect("square") - Interval::point(0.5)
                    + q * Interval::point(2.0);
                let num = (q * Interval::point(4.0) + Interval::ONE)
                    .powi(2)
                    .expect("square");
                let c0 = -num
                    .try_div(source * Interval::point(16.0))
                    .map_err(multi)?;
                let t = cubic_unique_root(source, c1, c0, nonneg_root()).map_err(multi)?;
                Ok(polish_cubic(t, source, c1, c0))
            }
            (KernelKind::HalfDifference, Some(_), Slice::FixedFirst(y1)) => {
                let y1 = Interval::point(y1);
                let c1 = source.powi(2).expect("square")
                    + Interval::point(2.0)
                    + y1.powi(2).expect("square") * Interval::point(2.0);
                let num = (y1.powi(2).expect("square") - Interval::ONE)
                    .powi(2)
                    .expect("square");
                let c0 = -num.try_div(source).map_err(multi)?;
                let t = cubic_unique_root(source, c1, c0, nonneg_root()).map_err(multi)?;
                Ok(polish_cubic(t, source, c1, c0))
            }
            (KernelKind::HalfDifference, Some(_), Slice::FixedSecond(y2)) => {
                map_diff_horizontal(source, Interval::point(y2)).map_err(multi)
            }
            (KernelKind::HalfDifference, None, Slice::FixedFirst(a)) => {
                map_single_vertical(Interval::point(a), source).map_err(multi)
            }
            _ => Err(TransportError::Config(format!(
                "no transport map for {:?} on slice {:?}",
                p.kernel, p.slice
            ))),
        }
    }

    /// Closed-form mass between the target enclosure and the source.
    fn mass_residual(&self, source: Interval, target: Interval) -> Result<Interval, IntervalError> {
        let p = &self.problem;
        match (p.kernel.kind, p.kernel.offset, p.slice) {
            (KernelKind::Hilbert, _, _) => {
                // antiderivative of 2/(1-y^2) for y != 1: ln|(1+y)/(1-y)|
                let at = |y: Interval| -> Result<Interval, IntervalError> {
                    ((Interval::ONE + y).abs())
                        .try_div((Interval::ONE - y).abs())?
                        .ln()
                };
                Ok(at(source)? - at(target)?)
            }
            (KernelKind::Product, Some(e), Slice::FixedSecond(s2)) => {
                let s2 = Interval::point(s2);
                Ok(mass_product_x(source, s2, e)? - mass_product_x(target, s2, e)?)
            }
            (KernelKind::HalfDifference, Some(_), Slice::FixedFirst(y1)) => {
                let y1 = Interval::point(y1);
                Ok(mass_diff_vertical(y1, source)? - mass_diff_vertical(y1, target)?)
            }
            (KernelKind::HalfDifference, Some(_), Slice::FixedSecond(y2)) => {
                let y2 = Interval::point(y2);
                Ok(mass_diff_horizontal(source, y2)? - mass_diff_horizontal(target, y2)?)
            }
            (KernelKind::HalfDifference, None, Slice::FixedFirst(a)) => {
                let a = Interval::point(a);
                Ok(mass_half_vertical(a, source)? - mass_half_vertical(a, target)?)
            }
            _ => Err(IntervalError::Domain {
                func: "mass_residual",
                lo: f64::NAN,
                hi: f64::NAN,
            }),
        }
    }

    /// `f64` mass balance `G(t) - G(source)` and slice density at `t`.
    fn mass_and_density(&self, source: f64, t: f64) -> Result<(f64, f64), TransportError> {
        let p = &self.problem;
        let bad = |e: IntervalError| TransportError::Evaluation {
            component: "mass balance".to_string(),
            source: e,
        };
        match (p.kernel.kind, p.kernel.offset, p.slice) {
            (KernelKind::Hilbert, _, _) => {
                let a = |y: f64| ((1.0 + y).abs() / (1.0 - y).abs()).ln();
                Ok((a(t) - a(source), 2.0 / (1.0 - t * t)))
            }
            (KernelKind::Product, Some(e), Slice::FixedSecond(s2)) => Ok((
                mass_product_x(t, s2, e).map_err(bad)? - mass_product_x(source, s2, e).map_err(bad)?,
                diff_product_x(t, s2, e).map_err(bad)?,
            )),
            (KernelKind::HalfDifference, Some(_), Slice::FixedFirst(y1)) => Ok((
                mass_diff_vertical(y1, t).map_err(bad)?
                    - mass_diff_vertical(y1, source).map_err(bad)?,
                diff_half_x(y1, t).map_err(bad)?,
            )),
            (KernelKind::HalfDifference, Some(_), Slice::FixedSecond(y2)) => Ok((
                mass_diff_horizontal(t, y2).map_err(bad)?
                    - mass_diff_horizontal(source, y2).map_err(bad)?,
                diff_half_x(t, y2).map_err(bad)?,
            )),
            (KernelKind::HalfDifference, None, Slice::FixedFirst(a)) => Ok((
                mass_half_vertical(a, t).map_err(bad)?
                    - mass_half_vertical(a, source).map_err(bad)?,
                kernel_half_difference(a, t).map_err(bad)?,
            )),
            _ => Err(TransportError::Config("unsupported problem".into())),
        }
    }
}

// ---------------------------------------------------------------------------
// Slice transport costs.
// ---------------------------------------------------------------------------

/// Weighted displacement cost of the sliced kernel's monotone pairing:
/// `int |K(x)| |x - T(x)|^alpha dx` over the side of the threshold carrying
/// the transported mass, with analytic envelopes for the improper tails.
///
/// For the Hilbert kernel the full boundary cost integral
/// `2 int_{y>1} dy / (sqrt(y) sqrt(y^2-1))` (for `alpha = 1/2`) is returned.
pub fn transport_cost(
    problem: &TransportProblem,
    alpha: f64,
) -> Result<Interval, TransportError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(TransportError::Config(format!(
            "weight exponent must lie in (0, 1), got {alpha}"
        )));
    }
    if problem.kernel.is_zero() {
        return Ok(Interval::ZERO);
    }
    let opt = QuadOptions::with_tol(1e-7);
    match (problem.kernel.kind, problem.kernel.offset, problem.slice) {
        (KernelKind::Hilbert, _, _) => hilbert_cost(alpha, &opt),
        (KernelKind::Product, Some(e), Slice::FixedSecond(s2)) => {
            if (e - 0.5).abs() > 1e-15 {
                return Err(TransportError::Config(
                    "the product-kernel cost is tabulated for offset 1/2 only".into(),
                ));
            }
            product_line_cost(s2, alpha, &opt)
        }
        (KernelKind::HalfDifference, Some(_), Slice::FixedFirst(y1)) => {
            diff_vertical_line_cost(y1, alpha, &opt)
        }
        (KernelKind::HalfDifference, None, Slice::FixedFirst(a)) => {
            single_vertical_line_cost(a, alpha, &opt)
        }
        _ => Err(TransportError::Config(format!(
            "no slice cost for {:?} on {:?}",
            problem.kernel, problem.slice
        ))),
    }
}

/// Clamp-to-nonnegative square root for interval-only integrands.
fn sqrt_clamped(x: Interval) -> Interval {
    x.max_i(Interval::ZERO).sqrt().expect("nonnegative")
}

/// `|x|^alpha`; jets fail when `x` straddles zero, triggering the quadrature
/// fallback chain there.
fn abs_pow<S: Scalar>(x: S, alpha: f64) -> Result<S, IntervalError> {
    x.try_abs()?.try_powf(alpha)
}

/// Hilbert boundary cost `int_{y>1} |K| (y - 1/y)^alpha dy` with `y = 1+u^2`:
/// `int_0^inf 4 u^{2a-1} (2+u^2)^{a-1} (1+u^2)^{-a} du`.
fn hilbert_cost(alpha: f64, opt: &QuadOptions) -> Result<Interval, TransportError> {
    let iv = move |u: Interval| -> Result<Interval, IntervalError> {
        hilbert_cost_integrand(u, alpha)
    };
    let jet = move |u: Jet| -> Result<Jet, IntervalError> { hilbert_cost_integrand(u, alpha) };
    let reg = move |u: Interval| -> Result<Interval, IntervalError> {
        // integrand = u^{2a-1} * regular, regular = 4 (2+u^2)^{a-1} (1+u^2)^{-a}
        let q = u.powi(2).expect("square");
        let a = (q + Interval::point(2.0)).powf(alpha - 1.0)?;
        let b = (q + Interval::ONE).powf(-alpha)?;
        Ok(a * b * Interval::point(4.0))
    };
    let singular = if 2.0 * alpha - 1.0 < 0.0 {
        vec![SingularEndpoint {
            end: Endpoint::Lower,
            exponent: 1.0 - 2.0 * alpha,
            regular_part: &reg,
        }]
    } else {
        Vec::new()
    };
    let f = Integrand1 {
        ival: &iv,
        jet: Some(&jet),
        singular,
    };
    let main = integrate_1d(&f, Interval::new(0.0, 1.0), opt)
        .map_err(|e| TransportError::quad("hilbert cost", e))?;
    // u > 1 via the reciprocal substitution v = 1/u, which maps the
    // integrand to `4 v^{1-2a} (2v^2+1)^{a-1} (v^2+1)^{-a}` on (0, 1].
    let iv2 = move |v: Interval| -> Result<Interval, IntervalError> {
        hilbert_cost_integrand_recip(v, alpha)
    };
    let jet2 =
        move |v: Jet| -> Result<Jet, IntervalError> { hilbert_cost_integrand_recip(v, alpha) };
    let reg2 = move |v: Interval| -> Result<Interval, IntervalError> {
        let q = v.powi(2).expect("square");
        let a = (q * Interval::point(2.0) + Interval::ONE).powf(alpha - 1.0)?;
        let b = (q + Interval::ONE).powf(-alpha)?;
        Ok(a * b * Interval::point(4.0))
    };
    let singular2 = if 1.0 - 2.0 * alpha < 0.0 {
        vec![SingularEndpoint {
            end: Endpoint::Lower,
            exponent: 2.0 * alpha - 1.0,
            regular_part: &reg2,
        }]
    } else {
        Vec::new()
    };
    let f2 = Integrand1 {
        ival: &iv2,
        jet: Some(&jet2),
        singular: singular2,
    };
    let upper = integrate_1d(&f2, Interval::new(0.0, 1.0), opt)
        .map_err(|e| TransportError::quad("hilbert cost (reciprocal part)", e))?;
    Ok(main.value + upper.value)
}

fn hilbert_cost_integrand_recip<S: Scalar>(v: S, alpha: f64) -> Result<S, IntervalError> {
    let q = v.powi2();
    let a = (q * S::of(2.0) + S::of(1.0)).try_powf(alpha - 1.0)?;
    let b = (q + S::of(1.0)).try_powf(-alpha)?;
    let w = v.try_powf(1.0 - 2.0 * alpha)?;
    Ok(w * a * b * S::of(4.0))
}

fn hilbert_cost_integrand<S: Scalar>(u: S, alpha: f64) -> Result<S, IntervalError> {
    let q = u.powi2();
    let a = (q + S::of(2.0)).try_powf(alpha - 1.0)?;
    let b = (q + S::of(1.0)).try_powf(-alpha)?;
    let w = u.try_powf(2.0 * alpha - 1.0)?;
    Ok(w * a * b * S::of(4.0))
}

/// Line cost of the offset-1/2 product-kernel difference at height `s2`.
fn product_line_cost(
    s2: f64,
    alpha: f64,
    opt: &QuadOptions,
) -> Result<Interval, TransportError> {
    if s2 <= 0.0 {
        return Err(TransportError::Config(
            "the product-kernel line cost needs s2 > 0".into(),
        ));
    }
    let s2i = Interval::point(s2);
    let f0 = threshold_product(s2i).map_err(|e| TransportError::Evaluation {
        component: "product line threshold".to_string(),
        source: e,
    })?;
    let cut = f0.hi + 40.0 * s2.max(1.0);
    let iv = move |s1: Interval| ig_product_cost(s1, s2i, alpha);
    let jet = move |s1: Jet| ig_product_cost(s1, Jet::con(s2i), alpha);
    let f = Integrand1::smooth(&iv, &jet);
    let main = integrate_1d(&f, Interval::new(f0.lo, cut), opt)
        .map_err(|e| TransportError::quad("product line cost", e))?;
    // |K_p(s+1/2,s2)-K_p(s-1/2,s2)| <= 3 s2 / ((s-1/2)^2+s2^2)^2 by the mean
    // value bound |d/da K_p| <= 3 s2 / (a^2+s2^2)^2; weight <= s^alpha.
    let slackb = cut / (cut - 0.5);
    let tail_hi = 3.0 * s2 * slackb.powi(4) * cut.powf(alpha - 3.0) / (3.0 - alpha);
    Ok(main.value + Interval::new(0.0, tail_hi).outward(2))
}

fn ig_product_cost<S: CubicScalar>(s1: S, s2: S, alpha: f64) -> Result<S, IntervalError> {
    let d = diff_product_x(s1, s2, 0.5)?;
    let t = map_product_x(s1, s2)?;
    let w = abs_pow(s1 - t, alpha)?;
    Ok(d.try_abs()? * w)
}

/// Line cost of the offset-1 difference kernel on a vertical line `y1`.
fn diff_vertical_line_cost(
    y1: f64,
    alpha: f64,
    opt: &QuadOptions,
) -> Result<Interval, TransportError> {
    let y1i = Interval::point(y1);
    let sc = threshold_diff_vertical(y1i).map_err(|e| TransportError::Evaluation {
        component: "vertical line threshold".to_string(),
        source: e,
    })?;
    let cut = sc.hi + 40.0 * (1.0 + y1.abs());
    let iv = move |y2: Interval| ig_diff_vertical_cost(y2, y1i, alpha);
    let jet = move |y2: Jet| ig_diff_vertical_cost(y2, Jet::con(y1i), alpha);
    let f = Integrand1::smooth(&iv, &jet);
    let main = integrate_1d(&f, Interval::new(sc.lo, cut), opt)
        .map_err(|e| TransportError::quad("vertical line cost", e))?;
    // |K_h(y1+1,y2)-K_h(y1-1,y2)| <= 6 y1 / y2^4 for y2 > 0 (mean value in
    // the first argument; |d/du (u - y2^2)/(2(u+y2^2)^2)| <= 3/(2 y2^4)).
    let tail_hi = 6.0 * y1.abs().max(1.0) * cut.powf(alpha - 3.0) / (3.0 - alpha);
    Ok(main.value + Interval::new(0.0, tail_hi).outward(2))
}

fn ig_diff_vertical_cost<S: CubicScalar>(y2: S, y1: S, alpha: f64) -> Result<S, IntervalError> {
    let d = diff_half_x(y1, y2)?;
    let t = map_diff_vertical(y1, y2)?;
    let w = abs_pow(y2 - t, alpha)?;
    Ok(d.try_abs()? * w)
}

/// Line cost of the single kernel `K_h(a, .)` on a vertical line (the
/// truncation-band column), target side `y2 >= |a|`, map `T = a^2/y2`.
fn single_vertical_line_cost(
    a: f64,
    alpha: f64,
    opt: &QuadOptions,
) -> Result<Interval, TransportError> {
    let aa = a.abs();
    if aa == 0.0 {
        return Err(TransportError::Config(
            "the single-kernel column cost needs a != 0".into(),
        ));
    }
    let ai = Interval::point(aa);
    let cut = 40.0 * aa.max(1.0);
    let iv = move |y2: Interval| ig_single_vertical_cost(y2, ai, alpha);
    let jet = move |y2: Jet| ig_single_vertical_cost(y2, Jet::con(ai), alpha);
    let f = Integrand1::smooth(&iv, &jet);
    let main = integrate_1d(&f, Interval::new(aa, cut), opt)
        .map_err(|e| TransportError::quad("column cost", e))?;
    // |K_h(a, y2)| <= 1/(2 y2^2); weight <= y2^alpha.
    let tail_hi = 0.5 * cut.powf(alpha - 1.0) / (1.0 - alpha);
    Ok(main.value + Interval::new(0.0, tail_hi).outward(2))
}

fn ig_single_vertical_cost<S: Scalar>(y2: S, a: S, alpha: f64) -> Result<S, IntervalError> {
    let k = kernel_half_difference(a, y2)?;
    let t = map_single_vertical(a, y2)?;
    let w = abs_pow(y2 - t, alpha)?;
    Ok(k.try_abs()? * w)
}

/// Optimal monotone pairing cost of a signed discrete measure on the line:
/// atoms `(location, signed mass)`, cost `sum m |x - y|^alpha` over the
/// pairing that matches positive to negative mass in order.
pub fn discrete_pairing_cost(atoms: &[(f64, f64)], alpha: f64) -> f64 {
    let mut sorted: Vec<(f64, f64)> = atoms.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut stack: Vec<(f64, f64)> = Vec::new();
    let mut cost = 0.0;
    for &(x, mut m) in &sorted {
        while m != 0.0 {
            match stack.last_mut() {
                Some(top) if top.1 * m < 0.0 => {
                    let amount = m.abs().min(top.1.abs());
                    cost += amount * (x - top.0).abs().powf(alpha);
                    top.1 += amount * m.signum();
                    m -= amount * m.signum();
                    if top.1 == 0.0 {
                        stack.pop();
                    }
                }
                _ => {
                    stack.push((x, m));
                    m = 0.0;
                }
            }
        }
    }
    cost
}

/// The boundary-kernel sharp constant over sqrt(2):
/// `(4/pi) int_{y>1} dy / (sqrt(y) sqrt(y^2-1)) / sqrt(2) ~= 2.36`.
pub fn hilbert_constant() -> Result<Interval, TransportError> {
    let cost = hilbert_cost(0.5, &QuadOptions::with_tol(1e-8))?;
    let pi = Interval::pi();
    Interval::point(2.0).sqrt().expect("sqrt(2)")
        .try_div(pi)
        .map(|c| c * cost)
        .map_err(|e| TransportError::Evaluation {
            component: "hilbert constant".to_string(),
            source: e,
        })
}

/// Truncated boundary-kernel cost over `y in (1, r]`, for monotone
/// window-growth checks against [`hilbert_constant`].
pub fn hilbert_constant_windowed(r: f64) -> Result<Interval, TransportError> {
    if r <= 1.0 {
        return Ok(Interval::ZERO);
    }
    let opt = QuadOptions::with_tol(1e-8);
    let alpha = 0.5;
    let iv = move |u: Interval| hilbert_cost_integrand(u, alpha);
    let jet = move |u: Jet| hilbert_cost_integrand(u, alpha);
    let f = Integrand1::smooth(&iv, &jet);
    let main = integrate_1d(&f, Interval::new(0.0, (r - 1.0).sqrt()), &opt)
        .map_err(|e| TransportError::quad("windowed hilbert cost", e))?;
    let pi = Interval::pi();
    Interval::point(2.0).sqrt().expect("sqrt(2)")
        .try_div(pi)
        .map(|c| c * main.value)
        .map_err(|e| TransportError::Evaluation {
            component: "windowed hilbert constant".to_string(),
            source: e,
        })
}

// ---------------------------------------------------------------------------
// Half-derivative seminorm constants of the interior velocity kernel.
// ---------------------------------------------------------------------------

/// `[0, hi]`, for one-sided analytic remainders of nonnegative integrals.
fn one_sided(hi: f64) -> Interval {
    Interval::new(0.0, hi.max(0.0))
}

/// Runs a 2-D verified quadrature with one generic integrand serving both jet
/// directions, tagging failures with the component name.
fn quad2(
    component: &'static str,
    iv: &IvalFn2,
    jet: &JetFn2,
    x: Interval,
    y: Interval,
    opt: &QuadOptions,
) -> Result<Interval, TransportError> {
    let f = Integrand2 {
        ival: iv,
        jet_x: Some(jet),
        jet_y: Some(jet),
    };
    integrate_2d(&f, x, y, opt)
        .map(|r| r.value)
        .map_err(|e| TransportError::quad(component, e))
}

/// Line-cost integrand of the offset-1/2 product-kernel difference in
/// threshold-anchored, threshold-scaled coordinates `s1 = f(s2) + u * s2`.
/// Beyond the threshold the kernel is nonpositive, so the cost density is
/// `s2 * |T - s1|^{1/2} * (-Delta)` with no absolute value.
#[doc(hidden)]
pub fn dbg_ig_ux_cx<S: CubicScalar>(u: S, s2: S) -> Result<S, IntervalError> {
    ig_ux_cx(u, s2)
}
#[doc(hidden)]
pub fn dbg_ig_ux_cx_hull(u: Interval, s2: Interval) -> Result<Interval, IntervalError> {
    ig_ux_cx_hull(u, s2)
}
#[doc(hidden)]
pub fn dbg_ig_cy_near<S: CubicScalar>(y2: S, t: S) -> Result<S, IntervalError> {
    ig_cy_near(y2, t)
}
#[doc(hidden)]
pub fn dbg_ig_cy_lowcorner<S: CubicScalar>(w: S, t: S) -> Result<S, IntervalError> {
    ig_cy_lowcorner(w, t)
}
#[doc(hidden)]
pub fn dbg_ig_cy_upcorner_below<S: CubicScalar>(w: S, t: S) -> Result<S, IntervalError> {
    ig_cy_upcorner_below(w, t)
}
#[doc(hidden)]
pub fn dbg_ig_cy_upcorner_above<S: CubicScalar>(w: S, x: S) -> Result<S, IntervalError> {
    ig_cy_upcorner_above(w, x)
}
#[doc(hidden)]
pub fn dbg_ig_cy_mid_below<S: CubicScalar>(y2: S, t: S) -> Result<S, IntervalError> {
    ig_cy_mid_below(y2, t)
}
#[doc(hidden)]
pub fn dbg_ig_cy_mid_above<S: CubicScalar>(y2: S, x: S) -> Result<S, IntervalError> {
    ig_cy_mid_above(y2, x)
}

/// Magnitude of the offset-1/2 product-kernel difference in factored form:
/// with `P± = (s1 ± 1/2)^2 + s2^2` and
/// `X- = (1/4 - s2^2 - sqrt((1/4 - s2^2)^2 + 3 (s2^2 + 1/4)^2)) / 3 <= 0`,
///
/// `-Delta = 3 s2 (s1^2 - f^2) (s1^2 - X-) / (P+^2 P-^2)`,
///
/// and `s1^2 - f^2 = u s2 (s1 + f)` exactly in threshold-scaled coordinates,
/// so every factor is positive and the evaluation is cancellation-free at any
/// scale. (The plain two-term kernel difference loses all precision once
/// `s1, s2` are large, which starves the quadrature.)
fn neg_diff_factored<S: Scalar>(off: S, s2: S, f: S) -> Result<S, IntervalError> {
    let s1 = f + off;
    let rest = kernel_halfdiff_rest(s1, s2)?;
    Ok(off * (s1 + f) * rest)
}

/// Smooth part of the factored offset-1/2 kernel difference
/// `K(v + 1/2, w) - K(v - 1/2, w)` with `K(v, w) = v w / (v^2 + w^2)^2`:
///
/// `K(v + 1/2, w) - K(v - 1/2, w) = -(v^2 - X+(w)) * rest`,
///
/// where `rest = 3 w (v^2 - X-) / (P+^2 P-^2) >= 0` (returned here) and
/// `X+-` are the roots produced by the factorization, with
/// `rad = sqrt(4 q^2 + q + 1/4)` for `q = w^2`.
fn kernel_halfdiff_rest<S: Scalar>(v: S, w: S) -> Result<S, IntervalError> {
    let q = w.powi2();
    let quarter = S::of(0.25);
    let half = S::of(0.5);
    let d = quarter - q;
    let rad = (d.powi2() + (q + quarter).powi2() * S::of(3.0)).try_sqrt()?;
    let xneg = (rad - d) * S::of(1.0 / 3.0); // = -X_- >= 0
    let pa = (v + half).powi2() + q;
    let pb = (v - half).powi2() + q;
    (w * (v.powi2() + xneg) * S::of(3.0)).try_div((pa * pb).powi2())
}

/// Positive root of the factorization as an excess over 1/4:
/// `X+(w) - 1/4 = q^2 / (rad + q + 1/2)` exactly, `q = w^2`, which keeps
/// full precision near the kink curve `v^2 = X+`.
fn kink_excess<S: Scalar>(q: S) -> Result<S, IntervalError> {
    let quarter = S::of(0.25);
    let half = S::of(0.5);
    let rad = ((q * S::of(4.0) + S::of(1.0)) * q + quarter).try_sqrt()?;
    q.powi2().try_div(rad + q + half)
}

/// Cancellation-free `kink_excess(qhi) - kink_excess(qlo) >= 0`, with the
/// difference `dq = qhi - qlo >= 0` supplied by the caller in factored form.
/// Rationalizing the radical difference turns every term positive:
///
/// `excess(qhi) - excess(qlo) = dq (A/B + qhi qlo + (qhi + qlo)/2)
///   / (D(qhi) D(qlo))`,
///
/// with `D(q) = rad(q) + q + 1/2`, `B = qhi^2 rad(qlo) + qlo^2 rad(qhi)`
/// and `A = 4 qhi^2 qlo^2 (qhi + qlo) + qhi qlo (qhi^2 + qhi qlo + qlo^2)
/// + (qhi + qlo)(qhi^2 + qlo^2)/4`.
fn excess_diff<S: Scalar>(qlo: S, qhi: S, dq: S) -> Result<S, IntervalError> {
    let quarter = S::of(0.25);
    let half = S::of(0.5);
    let one = S::of(1.0);
    let four = S::of(4.0);
    let rad_lo = ((qlo * four + one) * qlo + quarter).try_sqrt()?;
    let rad_hi = ((qhi * four + one) * qhi + quarter).try_sqrt()?;
    let d_lo = rad_lo + qlo + half;
    let d_hi = rad_hi + qhi + half;
    let b = qhi.powi2() * rad_lo + qlo.powi2() * rad_hi;
    let s = qhi + qlo;
    let p = qhi * qlo;
    let a = p.powi2() * s * four + p * (qhi.powi2() + p + qlo.powi2()) + s * (qhi.powi2() + qlo.powi2()) * quarter;
    Ok(dq * (a.try_div(b)? + p + s * half).try_div(d_hi * d_lo)?)
}

fn ig_ux_cx_off<S: CubicScalar>(off: S, s2: S) -> Result<S, IntervalError> {
    let f = threshold_product(s2)?;
    let s1 = f + off;
    let tm = map_product_x(s1, s2)?;
    let negd = neg_diff_factored(off, s2, f)?;
    // The map never climbs past the threshold, so f - T >= 0 pointwise and
    // s1 - T >= off; recentring on that bound keeps the enclosure positive
    // where plain subtraction straddles zero from interval dependency.
    let nonneg = Interval::new(0.0, f64::INFINITY);
    let g = ((f - tm).tighten_value(nonneg) + off).tighten_value(nonneg);
    Ok(g.try_powf(0.5)? * negd)
}

fn ig_ux_cx<S: CubicScalar>(u: S, s2: S) -> Result<S, IntervalError> {
    ig_ux_cx_off(u * s2, s2).map(|v| v * s2)
}

/// [`ig_ux_cx`] in shifted absolute coordinates `s1 = f + 4 s2 + tau`
/// (jacobian 1), which splice exactly onto the `u in [0, 4]` block: past the
/// threshold window the line structure no longer scales with `s2`, so
/// `u`-boxes would chase the mass along the hyperbola `u s2 = const` while
/// `tau`-boxes see a smooth integrand.
fn ig_ux_cx_tau<S: CubicScalar>(s2: S, tau: S) -> Result<S, IntervalError> {
    ig_ux_cx_off(s2 * S::of(4.0) + tau, s2)
}

/// Total interval version of [`ig_ux_cx`]: coarse panels where the cubic
/// root or the edge square root fails fall back to the crude hull
/// `[0, sqrt(max s1) * max (-Delta) * max s2]`, which refinement replaces.
fn ig_ux_cx_hull(u: Interval, s2: Interval) -> Result<Interval, IntervalError> {
    match ig_ux_cx(u, s2) {
        Ok(v) => Ok(v),
        Err(_) => {
            let f = threshold_product(s2)?;
            let off = u * s2;
            let s1 = f + off;
            let negd = neg_diff_factored(off, s2, f)?;
            Ok(one_sided(s1.hi.max(0.0).sqrt() * negd.hi.max(0.0) * s2.hi))
        }
    }
}

/// Total interval version of [`ig_ux_cx_tau`], with the analogous hull
/// fallback (no jacobian factor).
fn ig_ux_cx_tau_hull(s2: Interval, tau: Interval) -> Result<Interval, IntervalError> {
    match ig_ux_cx_tau(s2, tau) {
        Ok(v) => Ok(v),
        Err(_) => {
            let f = threshold_product(s2)?;
            let off = s2 * Interval::point(4.0) + tau;
            let s1 = f + off;
            let negd = neg_diff_factored(off, s2, f)?;
            Ok(one_sided(s1.hi.max(0.0).sqrt() * negd.hi.max(0.0)))
        }
    }
}

/// Enclosure of the half-derivative seminorm constant of the interior
/// velocity in the slice direction, as a function of the window height `b`
/// (`b = inf` allowed; the constant is increasing in `b`):
///
/// `(4/pi) int_0^b ds2 int_{f(s2)}^inf |T(s1,s2) - s1|^{1/2} |Delta(s1,s2)| ds1`.
///
/// Assembled from: a near-axis analytic window, direct blocks for `s2 <= 1`,
/// threshold-rescaled blocks up to the far cut, and a Cauchy-Schwarz tail.
/// Each truncation enters as a one-sided interval, so the result is a genuine
/// two-sided enclosure.
pub fn sharp_constant_ux_cx(b: f64) -> Result<Interval, TransportError> {
    if !(b > 0.0) {
        return Err(TransportError::Config(format!(
            "window height must be positive, got {b}"
        )));
    }
    // Near-axis analytic window size.
    const EPS: f64 = 1e-6;
    // Beyond this the per-line Cauchy-Schwarz bound takes over.
    const S_CUT: f64 = 65536.0;
    // Cuts past the threshold, in units of s2: absolute coverage T_CUT for
    // the small-s2 blocks, plain U_CUT for the large ones.
    const T_CUT: f64 = 60.0;
    const U_CUT: f64 = 40.0;
    let opt = QuadOptions {
        tol: 2e-4,
        max_panels: 400_000,
    };
    // 2-D blocks run with s2 as the inner (x) variable and the scaled offset
    // u as the outer (y) variable, so the outer jets stay clear of the
    // threshold degeneracy except on the single panel family touching u = 0.
    let block = |s2: Interval, u: Interval| -> Result<Interval, TransportError> {
        let iv = |s2: Interval, u: Interval| ig_ux_cx_hull(u, s2);
        let jet = |s2: Jet, u: Jet| ig_ux_cx(u, s2);
        quad2("x-seminorm constant block", &iv, &jet, s2, u, &opt)
    };
    let mut cost = Interval::ZERO;

    // s2 in [0, min(b, EPS)]: per-line Cauchy-Schwarz. The alpha = 1 cost
    // telescopes through the monotone map to the first moment of the line
    // mass, int (s1 - T) |Delta| ds1 = arctan(1/(2 s2)) <= pi/2, while the
    // one-sided mass is s2 f / (((f-1/2)^2 + s2^2) ((f+1/2)^2 + s2^2))
    // <= 1/(2 s2), so the line cost is at most sqrt(pi/(4 s2)) and the
    // window contributes at most sqrt(pi w).
    let w = b.min(EPS);
    cost = cost + one_sided((Interval::pi() * Interval::point(w)).sqrt().expect("nonneg").hi);

    // s2 in [EPS, min(b, 1)]: decade blocks in s2. The threshold-scaled
    // offsets u in [0, 4] resolve the edge structure (which lives at
    // t = u s2 = O(s2)); past that the line structure is absolute, so the
    // remainder integrates in the shifted offset tau = t - 4 s2 in [0, T_CUT]
    // -- an exact splice with unit jacobian and no overlap.
    let tau_block = |s2: Interval, tau: Interval| -> Result<Interval, TransportError> {
        let iv = |s2: Interval, tau: Interval| ig_ux_cx_tau_hull(s2, tau);
        let jet = |s2: Jet, tau: Jet| ig_ux_cx_tau(s2, tau);
        quad2("x-seminorm constant block", &iv, &jet, s2, tau, &opt)
    };
    let mut lo = EPS;
    let top = b.min(1.0);
    while lo < top {
        let hi = (lo * 10.0).min(top);
        let s2 = Interval::new(lo, hi);
        cost = cost + block(s2, Interval::new(0.0, 4.0))?;
        for p in [0.0, 0.25, 4.0, T_CUT].windows(2) {
            cost = cost + tau_block(s2, Interval::new(p[0], p[1]))?;
        }
        // Line tail from t = 4 s2 + 60 >= 60: with f in [1/2, 0.72] here,
        // |Delta| <= 3 s2 / t^4 by the mean value bound and
        // sqrt(s1) <= 1.006 sqrt(t) for t >= 60, so the line tail is below
        // 3.02 * (2/5) * 60^{-5/2} s2 < 5e-5 s2.
        cost = cost + one_sided(5e-5 * 0.5 * (hi * hi - lo * lo));
        lo = hi;
    }

    // s2 in [1, min(b, S_CUT)]: one scaled block per factor-of-4 range.
    let mut lo = 1.0f64;
    let top = b.min(S_CUT);
    while lo < top {
        let hi = (lo * 4.0).min(top);
        cost = cost + block(Interval::new(lo, hi), Interval::new(0.0, 4.0))?;
        cost = cost + block(Interval::new(lo, hi), Interval::new(4.0, U_CUT))?;
        // Inner tail: f <= 0.578 s2 + 1/2 and s1 - 1/2 >= u s2 give a line
        // tail below 3.1 * (2/5) * 40^{-5/2} s2^{-3/2} < 1.3e-4 s2^{-3/2}.
        cost = cost + one_sided(1.3e-4 * 2.0 * (lo.powf(-0.5) - hi.powf(-0.5)));
        lo = hi;
    }

    // s2 beyond S_CUT: Cauchy-Schwarz line bound
    // sqrt(arctan(1/(2 s2)) * mass) <= sqrt(1/(2 s2) * 0.326 s2^{-2}), so the
    // tail is below 2 * 0.404 / sqrt(S_CUT).
    if b > S_CUT {
        cost = cost + one_sided(0.81 / S_CUT.sqrt());
    }

    let c = cost * Interval::point(4.0).try_div(Interval::pi()).expect("pi > 0");
    Ok(Interval::new(c.lo.max(0.0), c.hi))
}

/// Kink curve of the offset-1/2 kernel sum: for `y2 >= 1/2` the factor
/// `y2^2 - X+(y1)` vanishes along `k(y2)^2 = y2^2 - 1/4 + y2 sqrt(4 y2^2 - 1)`
/// (`k ~ sqrt(3) y2` far out). Below `y2 = 1/2` the sum never changes sign.
fn kink_abscissa<S: Scalar>(y2: S) -> Result<S, IntervalError> {
    let q = y2.powi2();
    let quarter = S::of(0.25);
    ((q - quarter) + y2 * (q * S::of(4.0) - S::of(1.0)).try_sqrt()?).try_sqrt()
}

/// [`kink_abscissa`] at `y2 = 1/2 + w^2`, rearranged so small `w` keeps full
/// precision: `k^2 = w (w (1 + w^2) + (1 + 2 w^2) sqrt(1 + w^2))`.
fn kink_abscissa_w<S: Scalar>(w: S) -> Result<S, IntervalError> {
    let w2 = w.powi2();
    let one = S::of(1.0);
    let s = (one + w2).try_sqrt()?;
    (w * (w * (w2 + one) + (w2 * S::of(2.0) + one) * s)).try_sqrt()
}

/// Cross-seminorm integrand `y1^{1/2} |K_p(y1, 1/2 - y2) + K_p(y1, 1/2 + y2)|`
/// on the kinkless side `y2 < 1/2`, where the sum equals
/// `(X+(y1) - y2^2) rest` with no sign change. The line variable substitutes
/// `y1 = t^2`, so `y1^{1/2} dy1 = 2 t^2 dt` and no fractional power is taken;
/// `vq = y2^2 - 1/4 <= 0` comes from the caller in cancellation-free form and
/// `jac` collects the outer-variable jacobian.
fn ig_cy_kinkless<S: Scalar>(y2: S, vq: S, t: S, jac: S) -> Result<S, IntervalError> {
    let y1 = t.powi2();
    let rest = kernel_halfdiff_rest(y2, y1)?;
    let nonneg = Interval::new(0.0, f64::INFINITY);
    let mag = (kink_excess(y1.powi2())? - vq).tighten_value(nonneg);
    Ok((mag * rest * t.powi2() * S::of(2.0) * jac).tighten_value(nonneg))
}

/// Cross-seminorm integrand below the kink curve, in the curve-scaled line
/// variable `y1 = t^2 k(y2)` with `t` in [0, 1], so the sign change sits on
/// the quad boundary `t = 1` and `y1^{1/2} dy1 = 2 t^2 k^{3/2} dt`. Here
/// `y2^2 >= X+(y1)` and the magnitude is `vq - excess` with
/// `vq = y2^2 - 1/4 >= 0` supplied by the caller.
fn ig_cy_below<S: Scalar>(y2: S, k: S, t: S, jac: S) -> Result<S, IntervalError> {
    let y1 = t.powi2() * k;
    let rest = kernel_halfdiff_rest(y2, y1)?;
    let nonneg = Interval::new(0.0, f64::INFINITY);
    // On the kink curve y2^2 - 1/4 = excess(k^2) exactly, so the magnitude
    // is an excess difference with qhi - qlo = k^2 (1 - t^2)(1 + t^2).
    let qk = k.powi2();
    let t2 = t.powi2();
    let one = S::of(1.0);
    let dq = qk * (one - t2) * (one + t2);
    let mag = excess_diff(y1.powi2(), qk, dq)?.tighten_value(nonneg);
    Ok((mag * rest * t.powi2() * k.try_powf(1.5)? * S::of(2.0) * jac).tighten_value(nonneg))
}

/// Cross-seminorm integrand above the kink curve, in the curve-shifted line
/// variable `y1 = k(y2) + x` with `x >= 0` (unit jacobian in the line
/// direction); `y1` stays away from zero, so the half power is smooth.
fn ig_cy_above<S: Scalar>(y2: S, k: S, x: S, jac: S) -> Result<S, IntervalError> {
    let y1 = k + x;
    let rest = kernel_halfdiff_rest(y2, y1)?;
    let nonneg = Interval::new(0.0, f64::INFINITY);
    // Excess difference with qhi - qlo = y1^2 - k^2 = x (y1 + k).
    let mag = excess_diff(k.powi2(), y1.powi2(), x * (y1 + k))?.tighten_value(nonneg);
    Ok((mag * rest * y1.try_powf(0.5)? * jac).tighten_value(nonneg))
}

/// [`ig_cy_kinkless`] framings: direct band `y2 in [0, 1/4]`, and the corner
/// band via `y2 = 1/2 - w^2` (jacobian `2w`), whose `vq = -w^2 (1 - w^2)`.
fn ig_cy_near<S: Scalar>(y2: S, t: S) -> Result<S, IntervalError> {
    ig_cy_kinkless(y2, y2.powi2() - S::of(0.25), t, S::of(1.0))
}
fn ig_cy_lowcorner<S: Scalar>(w: S, t: S) -> Result<S, IntervalError> {
    let w2 = w.powi2();
    ig_cy_kinkless(S::of(0.5) - w2, -(w2 * (S::of(1.0) - w2)), t, w * S::of(2.0))
}

/// Upper-corner framings via `y2 = 1/2 + w^2` (jacobian `2w`), split by the
/// kink curve.
fn ig_cy_upcorner_below<S: Scalar>(w: S, t: S) -> Result<S, IntervalError> {
    let k = kink_abscissa_w(w)?;
    ig_cy_below(S::of(0.5) + w.powi2(), k, t, w * S::of(2.0))
}
fn ig_cy_upcorner_above<S: Scalar>(w: S, x: S) -> Result<S, IntervalError> {
    let k = kink_abscissa_w(w)?;
    ig_cy_above(S::of(0.5) + w.powi2(), k, x, w * S::of(2.0))
}

/// Direct framings for `y2 >= 3/4`, split by the kink curve.
fn ig_cy_mid_below<S: Scalar>(y2: S, t: S) -> Result<S, IntervalError> {
    let k = kink_abscissa(y2)?;
    ig_cy_below(y2, k, t, S::of(1.0))
}
fn ig_cy_mid_above<S: Scalar>(y2: S, x: S) -> Result<S, IntervalError> {
    let k = kink_abscissa(y2)?;
    ig_cy_above(y2, k, x, S::of(1.0))
}

/// Enclosure of the cross half-derivative seminorm constant of the interior
/// velocity, as a function of the window width `a` (`a = inf` allowed; the
/// integrand is nonnegative, so the constant is increasing in `a`):
///
/// `(sqrt(2)/pi) int_0^a dy2 int_0^inf y1^{1/2}
///   |K_p(y1, 1/2 - y2) + K_p(y1, 1/2 + y2)| dy1`.
///
/// The corner singularity at `(0, 1/2)` is excised by a strip whose singular
/// leg integrates in closed form (`int_0^inf y1^{3/2} v / (y1^2 + v^2)^2 dy1
/// = c_u |v|^{-1/2}` with `c_u = pi sqrt(2) / 8`), and the approach to the
/// strip is smoothed by the substitution `y2 = 1/2 -+ w^2`.
pub fn sharp_constant_ux_cy(a: f64) -> Result<Interval, TransportError> {
    if !(a > 0.0) {
        return Err(TransportError::Config(format!(
            "window width must be positive, got {a}"
        )));
    }
    // Excised strip half-width around y2 = 1/2.
    const H: f64 = 1e-8;
    // Line cut in the near field; past it the mean-value tail takes over.
    const R1: f64 = 600.0;
    // Far-field outer cut.
    const Y_CUT: f64 = 1_048_576.0;
    let opt = QuadOptions {
        tol: 1e-4,
        max_panels: 400_000,
    };
    let cu = Interval::pi() * Interval::point(2.0).sqrt().expect("sqrt(2)") * Interval::point(0.125);
    let mut cost = Interval::ZERO;
    // Line-variable subranges for the kinkless bands (t = sqrt(y1)) and for
    // the shifted above-kink quads (x = y1 - k); giving the mass-carrying
    // head its own quadrature keeps the tolerance budget where the action is.
    let t1 = R1.sqrt();
    let t_cuts = [0.0, 2.0, 8.0, t1];
    let x_cuts = [0.0, 4.0, 40.0, 160.0, R1];

    // y2 in [0, min(a, 1/4)]: direct, kinkless.
    for p in t_cuts.windows(2) {
        let iv = |y2: Interval, t: Interval| ig_cy_near(y2, t);
        let jet = |y2: Jet, t: Jet| ig_cy_near(y2, t);
        cost = cost
            + quad2(
                "cross-seminorm constant, near block",
                &iv,
                &jet,
                Interval::new(0.0, a.min(0.25)),
                Interval::new(p[0], p[1]),
                &opt,
            )?;
    }

    // y2 in [1/4, min(a, 1/2 - H)] via w = sqrt(1/2 - y2), kinkless.
    if a > 0.25 {
        let w_lo = (0.5 - a.min(0.5 - H)).sqrt();
        for p in t_cuts.windows(2) {
            let iv = |w: Interval, t: Interval| ig_cy_lowcorner(w, t);
            let jet = |w: Jet, t: Jet| ig_cy_lowcorner(w, t);
            cost = cost
                + quad2(
                    "cross-seminorm constant, lower corner block",
                    &iv,
                    &jet,
                    Interval::new(w_lo, 0.5),
                    Interval::new(p[0], p[1]),
                    &opt,
                )?;
        }
    }

    // Strip |y2 - 1/2| <= H: singular leg 4 c_u sqrt(H) exactly, regular leg
    // at most 2 H c_u (1 - H)^{-1/2}.
    if a > 0.5 - H {
        cost = cost + one_sided((cu * Interval::point(4.0 * H.sqrt() + 2.02 * H)).hi);
    }

    // y2 in [1/2 + H, min(a, 3/4)] via w = sqrt(y2 - 1/2), split by the kink.
    if a > 0.5 + H {
        let w = Interval::new(H.sqrt(), (a.min(0.75) - 0.5).sqrt());
        {
            let iv = |w: Interval, t: Interval| ig_cy_upcorner_below(w, t);
            let jet = |w: Jet, t: Jet| ig_cy_upcorner_below(w, t);
            cost = cost
                + quad2(
                    "cross-seminorm constant, upper corner block (below kink)",
                    &iv,
                    &jet,
                    w,
                    Interval::new(0.0, 1.0),
                    &opt,
                )?;
        }
        for p in x_cuts.windows(2) {
            let iv = |w: Interval, x: Interval| ig_cy_upcorner_above(w, x);
            let jet = |w: Jet, x: Jet| ig_cy_upcorner_above(w, x);
            cost = cost
                + quad2(
                    "cross-seminorm constant, upper corner block (above kink)",
                    &iv,
                    &jet,
                    w,
                    Interval::new(p[0], p[1]),
                    &opt,
                )?;
        }
    }

    // y2 in [3/4, min(a, 2)]: direct, split by the kink.
    if a > 0.75 {
        let y2 = Interval::new(0.75, a.min(2.0));
        {
            let iv = |y2: Interval, t: Interval| ig_cy_mid_below(y2, t);
            let jet = |y2: Jet, t: Jet| ig_cy_mid_below(y2, t);
            cost = cost
                + quad2(
                    "cross-seminorm constant, mid block (below kink)",
                    &iv,
                    &jet,
                    y2,
                    Interval::new(0.0, 1.0),
                    &opt,
                )?;
        }
        for p in x_cuts.windows(2) {
            let iv = |y2: Interval, x: Interval| ig_cy_mid_above(y2, x);
            let jet = |y2: Jet, x: Jet| ig_cy_mid_above(y2, x);
            cost = cost
                + quad2(
                    "cross-seminorm constant, mid block (above kink)",
                    &iv,
                    &jet,
                    y2,
                    Interval::new(p[0], p[1]),
                    &opt,
                )?;
        }
    }

    // Near-field line tail beyond R1 (every line above reaches y1 >= R1):
    // |sum| <= (v+ + |v-|) y1^{-3} <= 4 y1^{-3} for y2 <= 2, so each line
    // contributes at most (8/3) R1^{-3/2}.
    cost = cost + one_sided((8.0 / 3.0) * R1.powf(-1.5) * a.min(2.0));

    // Far field y2 in [2, min(a, Y_CUT)]: below-kink quads as before; the
    // shifted quads only need to reach sqrt(3) (y2 + 1/2), past which the
    // mean-value bound |sum| <= y1^{-3} gives a line tail of
    // (2/3) (sqrt(3) y2)^{-3/2} < 0.293 y2^{-3/2}.
    if a > 2.0 {
        let sqrt3 = Interval::point(3.0).sqrt().expect("sqrt(3)");
        let mut lo = 2.0f64;
        let top = a.min(Y_CUT);
        while lo < top {
            let hi = (lo * 4.0).min(top);
            let y2 = Interval::new(lo, hi);
            {
                let iv = |y2: Interval, t: Interval| ig_cy_mid_below(y2, t);
                let jet = |y2: Jet, t: Jet| ig_cy_mid_below(y2, t);
                cost = cost
                    + quad2(
                        "cross-seminorm constant, far block (below kink)",
                        &iv,
                        &jet,
                        y2,
                        Interval::new(0.0, 1.0),
                        &opt,
                    )?;
            }
            // Shift range covering sqrt(3) (y2 + 1/2) - k(y2) on the whole
            // block (the deficit stays below 1 for y2 >= 2).
            let k = kink_abscissa(y2).expect("kink curve is total for y2 >= 2");
            let x_far = (sqrt3 * (y2 + Interval::point(0.5)) - k).hi.max(0.125);
            {
                let iv = |y2: Interval, x: Interval| ig_cy_mid_above(y2, x);
                let jet = |y2: Jet, x: Jet| ig_cy_mid_above(y2, x);
                cost = cost
                    + quad2(
                        "cross-seminorm constant, far block (above kink)",
                        &iv,
                        &jet,
                        y2,
                        Interval::new(0.0, x_far),
                        &opt,
                    )?;
            }
            cost = cost
                + one_sided(0.293 * 2.0 * (lo.powf(-0.5) - hi.powf(-0.5)));
            lo = hi;
        }
        // |sum| <= 3 y1 / (y1^2 + (y2 - 1/2)^2)^2 integrates to
        // 3 c_u (y2 - 1/2)^{-3/2} per line beyond the outer cut.
        if a > Y_CUT {
            cost = cost + one_sided(6.0 * cu.hi / (Y_CUT - 0.5).sqrt());
        }
    }

    let c = cost
        * Interval::point(2.0).sqrt().expect("sqrt(2)")
            .try_div(Interval::pi())
            .expect("pi > 0");
    Ok(Interval::new(c.lo.max(0.0), c.hi))
}

// ---------------------------------------------------------------------------
// Localized-kernel dominance sampling.
// ---------------------------------------------------------------------------

/// Outcome of [`localized_cost_dominance_check`].
#[derive(Clone, Debug)]
pub struct DominanceReport {
    /// Samples where both maps were defined and compared.
    pub compared: usize,
    /// Samples skipped because the localized balance ran out of mass.
    pub skipped: usize,
    /// `T_loc <= T` violations.
    pub map_violations: usize,
    /// `|K_loc| <= |K|` violations.
    pub kernel_violations: usize,
    /// Monotone-rearrangement inequality spot checks that failed.
    pub rearrangement_violations: usize,
    /// First violating sample, if any.
    pub first_violation: Option<(f64, f64)>,
}

impl DominanceReport {
    pub fn is_clean(&self) -> bool {
        self.map_violations == 0
            && self.kernel_violations == 0
            && self.rearrangement_violations == 0
    }
}

/// Sampled dominance checks for the rectangular localization of the offset-1/2
/// product-kernel difference: the windowed kernel never exceeds the full one,
/// and the windowed transport partner never overtakes the full partner.
/// Also spot-checks the monotone-rearrangement inequality
/// `int_{b-k}^{b+k} |f(x-k)| g <= int_{b-k}^{c-k} |f(x-k)-f(x+k)| g +
///  int_{c-k}^{c+k} |f(x-k)| g` on random smooth `f`, increasing `g >= 0`.
pub fn localized_cost_dominance_check(
    a: f64,
    b: f64,
    samples: usize,
    seed: u64,
) -> Result<DominanceReport, TransportError> {
    if a < 0.5 {
        return Err(TransportError::Config(format!(
            "the localized threshold needs a >= 1/2, got {a}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = DominanceReport {
        compared: 0,
        skipped: 0,
        map_violations: 0,
        kernel_violations: 0,
        rearrangement_violations: 0,
        first_violation: None,
    };

    // Clamped antiderivative of the windowed product kernel in s1.
    let antider_loc = |u: f64, s2: f64| -> f64 {
        let uc = u.clamp(-a, a);
        -s2 / (2.0 * (uc * uc + s2 * s2))
    };
    let mass_loc = |t: f64, s2: f64| -> f64 {
        antider_loc(t + 0.5, s2) - antider_loc(t - 0.5, s2)
    };
    let mass_full = |t: f64, s2: f64| -> f64 {
        let ad = |u: f64| -s2 / (2.0 * (u * u + s2 * s2));
        ad(t + 0.5) - ad(t - 0.5)
    };

    for _ in 0..samples {
        // Both dominance claims hold on the windowed positive-mass side
        // s1 in [0, s_loc(s2; a)]; sample a source there.
        let s2 = rng.gen_range(0.01..b.min(3.0));
        let fthr = threshold_product(s2).expect("f64 total");
        let sloc = localized_threshold(s2, a).min(fthr);
        let src = rng.gen_range(0.0..sloc.max(1e-3));

        // Kernel comparison at the sampled point.
        let full = diff_product_x(src, s2, 0.5).expect("f64 total");
        let loc = {
            let inside = |u: f64| u.abs() <= a && s2.abs() <= b;
            let kp = |u: f64, v: f64| u * v / (u * u + v * v).powi(2);
            let plus = if inside(src + 0.5) { kp(src + 0.5, s2) } else { 0.0 };
            let minus = if inside(src - 0.5) { kp(src - 0.5, s2) } else { 0.0 };
            plus - minus
        };
        if loc.abs() > full.abs() + 1e-12 {
            report.kernel_violations += 1;
            report.first_violation.get_or_insert((src, s2));
        }
        let problem = TransportProblem {
            kernel: KernelSpec::product_offset(0.5),
            slice: Slice::FixedSecond(s2),
        };
        let t_full = match transport_map(problem).eval_f64(src) {
            Ok(t) => t,
            Err(_) => {
                report.skipped += 1;
                continue;
            }
        };
        // Localized partner by bisection on the clamped antiderivative.
        let g_src = mass_loc(src, s2);
        let mut lo = sloc;
        let mut hi = a + 1.0;
        let g_hi = mass_loc(hi, s2);
        if (mass_loc(lo, s2) - g_src) * (g_hi - g_src) > 0.0 {
            report.skipped += 1;
            continue;
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if (mass_loc(mid, s2) - g_src) * (mass_loc(lo, s2) - g_src) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let t_loc = 0.5 * (lo + hi);
        // Oracle for the full partner by bisection as well, so the
        // comparison does not depend on the cubic solver being compared.
        let g_src_full = mass_full(src, s2);
        let (mut flo, mut fhi) = (fthr, fthr + 400.0 * s2.max(1.0));
        if (mass_full(flo, s2) - g_src_full) * (mass_full(fhi, s2) - g_src_full) <= 0.0 {
            for _ in 0..80 {
                let mid = 0.5 * (flo + fhi);
                if (mass_full(mid, s2) - g_src_full) * (mass_full(flo, s2) - g_src_full) <= 0.0 {
                    fhi = mid;
                } else {
                    flo = mid;
                }
            }
            let t_oracle = 0.5 * (flo + fhi);
            if (t_oracle - t_full).abs() > 1e-6 {
                report.map_violations += 1;
                report.first_violation.get_or_insert((src, s2));
            }
            if t_loc > t_full + 1e-8 {
                report.map_violations += 1;
                report.first_violation.get_or_insert((src, s2));
            }
            report.compared += 1;
        } else {
            report.skipped += 1;
        }
    }

    // Monotone-rearrangement spot checks with Simpson quadrature.
    for _ in 0..(samples / 10).max(8) {
        let k = rng.gen_range(0.0..1.5);
        let bb = rng.gen_range(k..k + 3.0);
        let cc = rng.gen_range(bb..bb + 4.0);
        let (w1, w2, ph) = (
            rng.gen_range(0.5..2.0),
            rng.gen_range(0.2..2.0),
            rng.gen_range(0.0..3.0),
        );
        let f = |x: f64| (w1 * x + ph).sin() * (-x * x / (8.0 * w2)).exp();
        let g0 = rng.gen_range(0.0..1.0);
        let g1 = rng.gen_range(0.0..2.0);
        let g = |x: f64| g0 + g1 * x.max(0.0).atan();
        let simpson = |lo: f64, hi: f64, h: &dyn Fn(f64) -> f64| -> f64 {
            let n = 400;
            let dx = (hi - lo) / n as f64;
            let mut s = h(lo) + h(hi);
            for i in 1..n {
                let x = lo + i as f64 * dx;
                s += h(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            s * dx / 3.0
        };
        let lhs = simpson(bb - k, bb + k, &|x| f(x - k).abs() * g(x));
        let rhs = simpson(bb - k, cc - k, &|x| (f(x - k) - f(x + k)).abs() * g(x))
            + simpson(cc - k, cc + k, &|x| f(x - k).abs() * g(x));
        if lhs > rhs + 1e-6 {
            report.rearrangement_violations += 1;
            report.first_violation.get_or_insert((k, bb));
        }
    }
    Ok(report)
}

/// Sign threshold of the windowed offset-1/2 product-kernel difference:
/// below this point the windowed difference is nonnegative on the line.
fn localized_threshold(s2: f64, a: f64) -> f64 {
    let f = threshold_product(s2).expect("f64 total");
    if a <= 1.0 {
        0.5
    } else if a - 0.5 < f {
        a - 0.5
    } else {
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;

    fn prod_problem(s2: f64) -> TransportProblem {
        TransportProblem {
            kernel: KernelSpec::product_offset(0.5),
            slice: Slice::FixedSecond(s2),
        }
    }

    fn vert_problem(y1: f64) -> TransportProblem {
        TransportProblem {
            kernel: KernelSpec::half_difference_offset(),
            slice: Slice::FixedFirst(y1),
        }
    }

    #[test]
    fn thresholds_match_closed_form_special_values() {
        // f(0) = 1/2
        let f0 = threshold_product(Interval::ZERO).unwrap();
        assert!(f0.contains(0.5) && f0.width() < 1e-12);
        // s_c(0) = 3^{-1/2}
        let sc0 = threshold_diff_vertical(Interval::ZERO).unwrap();
        assert!(sc0.contains(1.0 / 3f64.sqrt()) && sc0.width() < 1e-12);
        // h_c^-(0) = h_c^+(0) = 1
        for upper in [false, true] {
            let h = threshold_diff_horizontal(Interval::ZERO, upper).unwrap();
            assert!(h.contains(1.0) && h.width() < 1e-12);
        }
    }

    #[test]
    fn thresholds_are_kernel_roots() {
        for s2 in [0.1, 0.5, 1.0, 3.0] {
            let f = threshold_product(s2).unwrap();
            assert!(diff_product_x(f, s2, 0.5).unwrap().abs() < 1e-12);
        }
        for y1 in [0.0, 0.3, 1.5, 5.0] {
            let sc = threshold_diff_vertical(y1).unwrap();
            assert!(diff_half_x(y1, sc).unwrap().abs() < 1e-13);
        }
        for y2 in [0.1, 0.4] {
            for upper in [false, true] {
                let h = threshold_diff_horizontal(y2, upper).unwrap();
                assert!(diff_half_x(h, y2).unwrap().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hilbert_map_halves_two() {
        let map = transport_map(TransportProblem {
            kernel: KernelSpec::hilbert(),
            slice: Slice::FixedSecond(0.0),
        });
        let t = map.eval(2.0).unwrap();
        assert!(t.contains(0.5) && t.width() < 1e-12);
    }

    #[test]
    fn cubic_map_fixes_the_threshold() {
        for s2 in [0.2, 0.7, 2.0] {
            let f = threshold_product(s2).unwrap();
            let t = transport_map(prod_problem(s2)).eval_f64(f).unwrap();
            assert!((t - f).abs() < 1e-7, "s2={s2}: T(f)={t} vs f={f}");
        }
        for y1 in [0.0, 0.4, 2.0, 7.0] {
            let sc = threshold_diff_vertical(y1).unwrap();
            let t = transport_map(vert_problem(y1)).eval_f64(sc).unwrap();
            assert!((t - sc).abs() < 2e-7, "y1={y1}: T(sc)={t} vs sc={sc}");
        }
    }

    #[test]
    fn cubic_map_matches_bisection_oracle() {
        // Mass-balance bisection oracle at (s1, s2) = (1, 0.5).
        let (s1, s2) = (1.0, 0.5);
        let t = transport_map(prod_problem(s2)).eval_f64(s1).unwrap();
        let g = |u: f64| mass_product_x(u, s2, 0.5).unwrap();
        let target = g(s1);
        let (mut lo, mut hi) = (0.0, threshold_product(s2).unwrap());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (g(mid) - target) * (g(lo) - target) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!((t - 0.5 * (lo + hi)).abs() <= 1e-10);
    }

    #[test]
    fn maps_balance_mass_and_involute() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let s2 = rng.gen_range(0.05..3.0);
            let f = threshold_product(s2).unwrap();
            let src = f + rng.gen_range(1e-3..5.0);
            let map = transport_map(prod_problem(s2));
            let t = map.eval_f64(src).unwrap();
            assert!(t < f);
            let resid = mass_product_x(src, s2, 0.5).unwrap() - mass_product_x(t, s2, 0.5).unwrap();
            assert!(resid.abs() < 1e-10, "s2={s2} src={src} resid={resid:e}");
            let back = map.eval_f64(t).unwrap();
            assert!((back - src).abs() < 1e-10 * src.max(1.0));
        }
        for _ in 0..1000 {
            let y1: f64 = rng.gen_range(0.0..9.0);
            if (y1 - 1.0).abs() < 0.05 {
                continue;
            }
            let sc = threshold_diff_vertical(y1).unwrap();
            let src = sc + rng.gen_range(1e-3..8.0);
            let map = transport_map(vert_problem(y1));
            let t = map.eval_f64(src).unwrap();
            let resid = mass_diff_vertical(y1, src).unwrap() - mass_diff_vertical(y1, t).unwrap();
            assert!(resid.abs() < 1e-10, "y1={y1} src={src} resid={resid:e}");
            let back = map.eval_f64(t).unwrap();
            assert!((back - src).abs() < 1e-9 * src.max(1.0));
        }
    }

    #[test]
    fn horizontal_map_balances_and_involutes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let yc = 1.0 / 3f64.sqrt();
        for _ in 0..1000 {
            let y2 = rng.gen_range(0.02..yc - 0.02);
            let hm = threshold_diff_horizontal(y2, false).unwrap();
            let src = rng.gen_range(0.0..hm * 0.999);
            let t = map_diff_horizontal(src, y2).unwrap();
            assert!(t > hm && t < 1.0 + 1e-12, "y2={y2} src={src} t={t}");
            let resid =
                mass_diff_horizontal(t, y2).unwrap() - mass_diff_horizontal(src, y2).unwrap();
            assert!(resid.abs() < 1e-12, "y2={y2} src={src} resid={resid:e}");
            let back = map_diff_horizontal(t, y2).unwrap();
            assert!((back - src).abs() < 1e-9);
        }
        // T1(0, y2) = sqrt(1 - 3 y2^2)
        for y2 in [0.1, 0.3, 0.5] {
            let t = map_diff_horizontal(0.0, y2).unwrap();
            assert!((t - (1.0 - 3.0 * y2 * y2).sqrt()).abs() < 1e-13);
        }
    }

    #[test]
    fn band_map_is_reciprocal_square() {
        let map = transport_map(TransportProblem {
            kernel: KernelSpec::half_difference_plain(),
            slice: Slice::FixedFirst(3.0),
        });
        let t = map.eval(4.5).unwrap();
        assert!(t.contains(2.0) && t.width() < 1e-12);
        let back = map.eval(2.0).unwrap();
        assert!(back.contains(4.5) && back.width() < 1e-12);
    }

    #[test]
    fn interval_map_contains_f64_map_and_verifies_mass() {
        let map = transport_map(prod_problem(0.5));
        let enc = map.eval(1.0).unwrap();
        let pt = map.eval_f64(1.0).unwrap();
        assert!(enc.contains(pt));
        assert!(enc.width() < 1e-9);
    }

    #[test]
    fn hilbert_constant_is_about_2_37() {
        let c = hilbert_constant().unwrap();
        assert!(2.36 <= c.lo && c.hi <= 2.38, "{c:?}");
        // Window growth is monotone toward the full constant.
        let w10 = hilbert_constant_windowed(10.0).unwrap();
        let w100 = hilbert_constant_windowed(100.0).unwrap();
        assert!(w10.hi < w100.lo && w100.hi < c.hi);
        assert!(c.lo - w100.hi < 0.2);
    }

    #[test]
    fn discrete_pairing_reproduces_two_pair_cost() {
        let atoms = [(1.0, 1.0), (2.0, 1.0), (3.0, -1.0), (4.0, -1.0)];
        let c = discrete_pairing_cost(&atoms, 0.5);
        assert!((c - (1.0 + 3f64.sqrt())).abs() < 1e-12);
        assert_eq!(discrete_pairing_cost(&[], 0.5), 0.0);
    }

    #[test]
    fn zero_kernel_costs_nothing() {
        let p = TransportProblem {
            kernel: KernelSpec {
                kind: KernelKind::Product,
                offset: Some(0.5),
                window: Some(Window {
                    x_half: 0.0,
                    y_half: 1.0,
                }),
            },
            slice: Slice::FixedSecond(0.5),
        };
        assert_eq!(transport_cost(&p, 0.5).unwrap(), Interval::ZERO);
    }

    #[test]
    fn hilbert_cost_matches_spec_window() {
        let p = TransportProblem {
            kernel: KernelSpec::hilbert(),
            slice: Slice::FixedSecond(0.0),
        };
        let cost = transport_cost(&p, 0.5).unwrap();
        // (sqrt(2)/pi) * cost is the sharp constant ~= 2.36.
        let pi = Interval::pi();
        let c = Interval::point(2.0).sqrt().unwrap().try_div(pi).unwrap() * cost;
        assert!(2.36 <= c.lo && c.hi <= 2.38);
    }

    #[test]
    fn line_costs_are_positive_and_finite() {
        let c = transport_cost(&prod_problem(0.5), 0.5).unwrap();
        assert!(c.lo > 0.0 && c.hi.is_finite());
        let c = transport_cost(&vert_problem(2.0), 0.5).unwrap();
        assert!(c.lo > 0.0 && c.hi.is_finite());
        let band = TransportProblem {
            kernel: KernelSpec::half_difference_plain(),
            slice: Slice::FixedFirst(3.0),
        };
        let c = transport_cost(&band, 0.5).unwrap();
        assert!(c.lo > 0.0 && c.hi.is_finite());
    }

    #[test]
    fn dominance_check_is_clean() {
        let report = localized_cost_dominance_check(0.75, 1.0, 1000, 42).unwrap();
        assert!(report.is_clean(), "{report:?}");
        assert!(report.compared > 300, "{report:?}");
        assert!(localized_cost_dominance_check(0.3, 1.0, 10, 1).is_err());
    }
}
