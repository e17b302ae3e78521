//! Validated 1-D / 2-D quadrature.
//!
//! The panel rule is the midpoint value plus a second-derivative interval
//! remainder: for a panel of length `h` with midpoint `m`,
//!
//! ```text
//! ∫ f = h·f(m) + h³/24 · f''(ξ),  ξ in the panel,
//! ```
//!
//! so `h·[f(m)] + h³/24·[f'' enclosure]` is a rigorous enclosure. The `f''`
//! enclosure comes from the jet arithmetic in [`crate::jet`]. Panels where the
//! jet evaluation fails (singularity inside, undetermined `abs` sign) fall
//! back to the zeroth-order Riemann enclosure `h · hull(f over panel)`, and
//! panels touching a declared endpoint singularity use the power-law envelope
//! `∫₀^h s^{-β} ds` in closed form. Refinement is greedy: the panel with the
//! widest contribution is bisected until the total enclosure width meets the
//! tolerance or the panel budget is exhausted.

use crate::interval::{Interval, IntervalError};
use crate::jet::Jet;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use thiserror::Error;

pub type IvalFn1<'a> = dyn Fn(Interval) -> Result<Interval, IntervalError> + Sync + 'a;
pub type JetFn1<'a> = dyn Fn(Jet) -> Result<Jet, IntervalError> + Sync + 'a;
pub type IvalFn2<'a> = dyn Fn(Interval, Interval) -> Result<Interval, IntervalError> + Sync + 'a;
pub type JetFn2<'a> = dyn Fn(Jet, Jet) -> Result<Jet, IntervalError> + Sync + 'a;

/// Which end of the domain a power-law singularity sits at.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Endpoint {
    Lower,
    Upper,
}

/// Declared endpoint singularity: `f(x) = g(x) · |x - e|^{-exponent}` with
/// `g` (the regular part) interval-evaluable on panels touching `e`.
pub struct SingularEndpoint<'a> {
    pub end: Endpoint,
    /// β in (0, 1).
    pub exponent: f64,
    pub regular_part: &'a IvalFn1<'a>,
}

/// A 1-D integrand: a mandatory interval evaluator, an optional jet evaluator
/// (enables the second-order panel rule) and optional endpoint hints.
pub struct Integrand1<'a> {
    pub ival: &'a IvalFn1<'a>,
    pub jet: Option<&'a JetFn1<'a>>,
    pub singular: Vec<SingularEndpoint<'a>>,
}

impl<'a> Integrand1<'a> {
    pub fn smooth(ival: &'a IvalFn1<'a>, jet: &'a JetFn1<'a>) -> Self {
        Integrand1 {
            ival,
            jet: Some(jet),
            singular: Vec::new(),
        }
    }

    pub fn interval_only(ival: &'a IvalFn1<'a>) -> Self {
        Integrand1 {
            ival,
            jet: None,
            singular: Vec::new(),
        }
    }
}

/// A 2-D integrand over a box; `x` is the inner variable, `y` the outer one.
pub struct Integrand2<'a> {
    pub ival: &'a IvalFn2<'a>,
    /// Jet in the inner variable with the outer variable held as a constant.
    pub jet_x: Option<&'a JetFn2<'a>>,
    /// Jet in the outer variable with the inner variable held as a constant.
    pub jet_y: Option<&'a JetFn2<'a>>,
}

#[derive(Clone, Copy, Debug)]
pub struct QuadratureResult {
    pub value: Interval,
    pub panels: usize,
    pub max_depth: usize,
}

#[derive(Debug, Error)]
pub enum QuadratureError {
    #[error("tolerance {tol} unreachable: best enclosure {best} after {panels} panels")]
    ToleranceUnreachable {
        tol: f64,
        best: Interval,
        panels: usize,
    },
    #[error("integrand evaluation failed on an unsplittable panel [{lo}, {hi}]: {source}")]
    Evaluation {
        lo: f64,
        hi: f64,
        source: IntervalError,
    },
}

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    /// Target width of the final enclosure.
    pub tol: f64,
    /// Hard cap on the number of panels.
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            tol: 1e-6,
            max_panels: 200_000,
        }
    }
}

impl QuadOptions {
    pub fn with_tol(tol: f64) -> Self {
        QuadOptions {
            tol,
            ..Default::default()
        }
    }
}

struct Panel {
    lo: f64,
    hi: f64,
    depth: usize,
    contribution: Option<Interval>,
}

impl Panel {
    fn priority(&self) -> f64 {
        match self.contribution {
            Some(c) => c.width(),
            None => f64::INFINITY,
        }
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.priority() == other.priority()
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
        self.priority()
            .partial_cmp(&other.priority())
            .unwrap_or(Ordering::Equal)
    }
}

/// Enclosure of one panel's integral via the fallback chain:
/// singular envelope (if the panel touches a declared singular endpoint),
/// else midpoint + `h³/24 f''`, else zeroth-order Riemann.
fn eval_panel(
    f: &Integrand1,
    domain: Interval,
    lo: f64,
    hi: f64,
) -> Result<Interval, IntervalError> {
    let h = hi - lo;
    for s in &f.singular {
        let touches = match s.end {
            Endpoint::Lower => lo == domain.lo,
            Endpoint::Upper => hi == domain.hi,
        };
        if touches {
            // ∫ g(x)·|x-e|^{-β} over the panel ⊆ hull(g) · ∫₀^h s^{-β} ds.
            let g = (s.regular_part)(Interval::new(lo, hi))?;
            let b = s.exponent;
            let mass = Interval::point(h)
                .powf(1.0 - b)?
                .try_div(Interval::point(1.0 - b))?;
            return Ok(g * mass);
        }
    }
    let plain = || -> Result<Interval, IntervalError> {
        let v = (f.ival)(Interval::new(lo, hi))?;
        Ok(v * Interval::point(h))
    };
    if let Some(jet) = f.jet {
        let second_order = || -> Result<Interval, IntervalError> {
            let m = 0.5 * (lo + hi);
            let fm = (f.ival)(Interval::point(m))?;
            let j = jet(Jet::var(Interval::new(lo, hi)))?;
            if !j.d2.is_finite() {
                return Err(IntervalError::Malformed {
                    lo: j.d2.lo,
                    hi: j.d2.hi,
                });
            }
            let rem = j.d2 * Interval::point(h * h * h / 24.0);
            Ok(fm * Interval::point(h) + rem)
        };
        match second_order() {
            Ok(v) => {
                // The Riemann enclosure can be tighter on wide panels where
                // the remainder dominates; intersecting is always sound.
                if let Ok(p) = plain() {
                    return Ok(v.intersect(p).unwrap_or(v));
                }
                return Ok(v);
            }
            Err(_) => {}
        }
    }
    plain()
}

/// Adaptive 1-D integration over a finite domain.
pub fn integrate_1d(
    f: &Integrand1,
    domain: Interval,
    opt: &QuadOptions,
) -> Result<QuadratureResult, QuadratureError> {
    assert!(domain.is_finite(), "integrate_1d needs a finite domain");
    if domain.width() == 0.0 {
        return Ok(QuadratureResult {
            value: Interval::ZERO,
            panels: 0,
            max_depth: 0,
        });
    }
    let min_h = (domain.width() * 1e-15).max(f64::MIN_POSITIVE);
    let eval = |lo: f64, hi: f64| eval_panel(f, domain, lo, hi).ok();
    refine(
        eval,
        domain,
        min_h,
        opt,
        false,
        |lo, hi| match (f.ival)(Interval::new(lo, hi)) {
            Err(e) => QuadratureError::Evaluation { lo, hi, source: e },
            Ok(_) => QuadratureError::Evaluation {
                lo,
                hi,
                source: IntervalError::Malformed {
                    lo: f64::NAN,
                    hi: f64::NAN,
                },
            },
        },
    )
}

/// Like [`integrate_1d`], but when the panel budget runs out (or the worst
/// panel can no longer be split) the current enclosure is returned instead of
/// `ToleranceUnreachable`, provided every panel evaluated to something finite.
/// A truncated adaptive run is still a sound enclosure; callers that can
/// absorb a wider result (the 2-D integrator's fallback paths) prefer it over
/// burning the whole budget to learn the tolerance was unreachable.
pub fn integrate_1d_best_effort(
    f: &Integrand1,
    domain: Interval,
    opt: &QuadOptions,
) -> Result<QuadratureResult, QuadratureError> {
    assert!(domain.is_finite(), "integrate_1d needs a finite domain");
    if domain.width() == 0.0 {
        return Ok(QuadratureResult {
            value: Interval::ZERO,
            panels: 0,
            max_depth: 0,
        });
    }
    let min_h = (domain.width() * 1e-15).max(f64::MIN_POSITIVE);
    let eval = |lo: f64, hi: f64| eval_panel(f, domain, lo, hi).ok();
    refine(
        eval,
        domain,
        min_h,
        opt,
        true,
        |lo, hi| match (f.ival)(Interval::new(lo, hi)) {
            Err(e) => QuadratureError::Evaluation { lo, hi, source: e },
            Ok(_) => QuadratureError::Evaluation {
                lo,
                hi,
                source: IntervalError::Malformed {
                    lo: f64::NAN,
                    hi: f64::NAN,
                },
            },
        },
    )
}

/// Greedy refinement driver shared by the 1-D and 2-D integrators. The total
/// width is tracked incrementally (cheap f64 adds); the exact interval sum is
/// only formed when the tracked width suggests convergence. With
/// `best_effort` set, running out of budget (with every panel finite) yields
/// the current enclosure instead of an error.
fn refine(
    eval: impl Fn(f64, f64) -> Option<Interval>,
    domain: Interval,
    min_h: f64,
    opt: &QuadOptions,
    best_effort: bool,
    on_dead_panel: impl Fn(f64, f64) -> QuadratureError,
) -> Result<QuadratureResult, QuadratureError> {
    let mut heap: BinaryHeap<Panel> = BinaryHeap::new();
    let mut n_failed = 0usize;
    let mut width_sum = 0.0f64;
    let mut max_depth = 0usize;
    let mut push = |heap: &mut BinaryHeap<Panel>,
                    n_failed: &mut usize,
                    width_sum: &mut f64,
                    p: Panel| {
        match p.contribution {
            Some(c) => *width_sum += c.width(),
            None => *n_failed += 1,
        }
        heap.push(p);
    };
    push(
        &mut heap,
        &mut n_failed,
        &mut width_sum,
        Panel {
            lo: domain.lo,
            hi: domain.hi,
            depth: 0,
            contribution: eval(domain.lo, domain.hi),
        },
    );

    let mut ops_since_recount = 0usize;
    loop {
        // The running sum accrues cancellation garbage of order
        // ulp(max past width) once very wide early panels are popped again,
        // which can pin it above the tolerance forever; recount exactly from
        // the heap on an amortized-O(1) schedule so the garbage clears.
        ops_since_recount += 1;
        if width_sum.is_nan() || ops_since_recount >= heap.len().max(1024) {
            width_sum = heap
                .iter()
                .fold(0.0, |acc, p| acc + p.contribution.map_or(0.0, |c| c.width()));
            ops_since_recount = 0;
        }
        if n_failed == 0 && width_sum <= opt.tol {
            // The tracked width ignores outward rounding in the summation;
            // confirm with the exact sum (rarely more than one extra pass).
            let total = heap
                .iter()
                .fold(Interval::ZERO, |acc, p| acc + p.contribution.unwrap());
            if total.width() <= opt.tol {
                return Ok(QuadratureResult {
                    value: total,
                    panels: heap.len(),
                    max_depth,
                });
            }
            width_sum = total.width();
            continue;
        }
        if heap.len() >= opt.max_panels {
            if std::env::var_os("RIGOR_QUAD_DEBUG").is_some() {
                eprintln!(
                    "refine: max_panels hit, width_sum={width_sum:e}, n_failed={n_failed}"
                );
            }
            let best = heap.iter().fold(Interval::ZERO, |acc, p| {
                acc + p.contribution.unwrap_or(Interval::new(
                    f64::NEG_INFINITY,
                    f64::INFINITY,
                ))
            });
            // The running sum may be stale; judge by the exact fold.
            if n_failed == 0 && (best.width() <= opt.tol || (best_effort && best.is_finite())) {
                return Ok(QuadratureResult {
                    value: best,
                    panels: heap.len(),
                    max_depth,
                });
            }
            return Err(QuadratureError::ToleranceUnreachable {
                tol: opt.tol,
                best,
                panels: heap.len(),
            });
        }
        let worst = heap.pop().expect("nonempty heap");
        match worst.contribution {
            Some(c) => width_sum -= c.width(),
            None => n_failed -= 1,
        }
        if worst.hi - worst.lo <= min_h {
            if worst.contribution.is_none() {
                return Err(on_dead_panel(worst.lo, worst.hi));
            }
            // Narrowest-possible panel still dominating the error budget.
            let best = heap.iter().fold(worst.contribution.unwrap(), |acc, p| {
                acc + p.contribution.unwrap_or(Interval::new(
                    f64::NEG_INFINITY,
                    f64::INFINITY,
                ))
            });
            if best_effort && n_failed == 0 && best.is_finite() {
                return Ok(QuadratureResult {
                    value: best,
                    panels: heap.len() + 1,
                    max_depth,
                });
            }
            return Err(QuadratureError::ToleranceUnreachable {
                tol: opt.tol,
                best,
                panels: heap.len() + 1,
            });
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        for (a, b) in [(worst.lo, mid), (mid, worst.hi)] {
            let p = Panel {
                lo: a,
                hi: b,
                depth: worst.depth + 1,
                contribution: eval(a, b),
            };
            max_depth = max_depth.max(p.depth);
            push(&mut heap, &mut n_failed, &mut width_sum, p);
        }
    }
}

/// Magnitude of the tail `∫_R^∞ c·s^{-p} ds` for `p > 1`; returned as the
/// symmetric interval `[-t, t]` to add to a truncated enclosure when only
/// `|f(s)| ≤ c·s^{-p}` is known beyond `R`.
pub fn power_tail(c: f64, p: f64, r: f64) -> Interval {
    assert!(p > 1.0 && r > 0.0 && c >= 0.0, "tail needs p > 1, r > 0");
    let t = Interval::point(c) * Interval::point(r).powf(1.0 - p).expect("r > 0")
        / Interval::point(p - 1.0);
    Interval::new(-t.hi, t.hi)
}

/// Adaptive 2-D integration `∫∫ f(x, y) dx dy` over a finite box, iterated
/// with `y` as the outer variable.
///
/// Outer panels use the midpoint rule in `y`: the midpoint value is the inner
/// 1-D integral at `y = m` (second order in `x` when `jet_x` is available),
/// and the remainder needs `I''(y) = ∫ f_yy(x, Y) dx`, which is integrated
/// crudely (zeroth order) since it is weighted by `h³/24`. Outer panels where
/// the jet-in-`y` evaluation fails fall back to `h · (inner integral with y
/// held as the whole panel interval)`.
pub fn integrate_2d(
    f: &Integrand2,
    xdom: Interval,
    ydom: Interval,
    opt: &QuadOptions,
) -> Result<QuadratureResult, QuadratureError> {
    assert!(xdom.is_finite() && ydom.is_finite());
    if xdom.width() == 0.0 || ydom.width() == 0.0 {
        return Ok(QuadratureResult {
            value: Interval::ZERO,
            panels: 0,
            max_depth: 0,
        });
    }
    let hy_total = ydom.width();
    // Inner tolerance per unit outer length: contributes h·w_inner ≤ 0.4·tol·h/H.
    let inner_tol = 0.4 * opt.tol / hy_total;
    let inner_budget = opt.max_panels.min(1_500);

    let inner_at = |y: Interval, tol: f64| -> Result<Interval, QuadratureError> {
        let ival = move |x: Interval| (f.ival)(x, y);
        let jet;
        let integrand = match f.jet_x {
            Some(jx) => {
                jet = move |x: Jet| jx(x, Jet::con(y));
                Integrand1 {
                    ival: &ival,
                    jet: Some(&jet),
                    singular: Vec::new(),
                }
            }
            None => Integrand1::interval_only(&ival),
        };
        // Best effort: a truncated inner run is a sound (if wide) enclosure,
        // and the outer refinement loop absorbs the extra width.
        integrate_1d_best_effort(
            &integrand,
            xdom,
            &QuadOptions {
                tol,
                max_panels: inner_budget,
            },
        )
        .map(|r| r.value)
    };

    let eval_outer = |lo: f64, hi: f64| -> Option<Interval> {
        let h = hi - lo;
        let yint = Interval::new(lo, hi);
        // Second-order attempt.
        if let Some(jy) = f.jet_y {
            let d2_integral = || -> Result<Interval, QuadratureError> {
                let d2 = move |x: Interval| jy(Jet::con(x), Jet::var(yint)).map(|j| j.d2);
                let integrand = Integrand1::interval_only(&d2);
                // Crude target: the remainder is h³/24·I''; aim its width at
                // a fraction of the equidistributed budget but never sweat it.
                let tol_d2 = (0.6 * opt.tol * (h / hy_total) / (h * h * h / 24.0)).max(1e-3);
                // Small budget on purpose: the d2 width floor is usually set
                // by the outer panel width itself, so a long inner run cannot
                // help; a wide best-effort enclosure still steers the split.
                integrate_1d_best_effort(
                    &integrand,
                    xdom,
                    &QuadOptions {
                        tol: tol_d2,
                        max_panels: 512,
                    },
                )
                .map(|r| r.value)
            };
            let second = || -> Option<Interval> {
                let m = 0.5 * (lo + hi);
                let im = inner_at(Interval::point(m), inner_tol).ok()?;
                let idd = d2_integral().ok()?;
                Some(im * Interval::point(h) + idd * Interval::point(h * h * h / 24.0))
            };
            if let Some(v) = second() {
                return Some(v);
            }
        }
        // Zeroth-order fallback in y.
        let iv = inner_at(yint, inner_tol.max(0.05 * opt.tol)).ok()?;
        Some(iv * Interval::point(h))
    };

    let min_h = (hy_total * 1e-14).max(f64::MIN_POSITIVE);
    refine(eval_outer, ydom, min_h, opt, false, |lo, hi| {
        QuadratureError::Evaluation {
            lo,
            hi,
            source: IntervalError::Malformed {
                lo: f64::NAN,
                hi: f64::NAN,
            },
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Scalar;

    #[test]
    fn unit_square_constant() {
        let ival = |_x: Interval, _y: Interval| Ok(Interval::ONE);
        let jx = |x: Jet, _y: Jet| Ok(Jet::con(Interval::ONE) + (x - x));
        let jy = |_x: Jet, y: Jet| Ok(Jet::con(Interval::ONE) + (y - y));
        let f = Integrand2 {
            ival: &ival,
            jet_x: Some(&jx),
            jet_y: Some(&jy),
        };
        let r = integrate_2d(
            &f,
            Interval::new(0.0, 1.0),
            Interval::new(0.0, 1.0),
            &QuadOptions::with_tol(1e-8),
        )
        .unwrap();
        assert!(r.value.contains(1.0));
        assert!(r.value.width() <= 1e-8);
    }

    #[test]
    fn inverse_sqrt_singular_endpoint() {
        // ∫₀¹ x^{-1/2} dx = 2 via the declared power-law envelope.
        let ival = |x: Interval| x.powf(-0.5);
        let jet = |x: Jet| x.try_powf(-0.5);
        let reg = |_x: Interval| Ok(Interval::ONE);
        let f = Integrand1 {
            ival: &ival,
            jet: Some(&jet),
            singular: vec![SingularEndpoint {
                end: Endpoint::Lower,
                exponent: 0.5,
                regular_part: &reg,
            }],
        };
        let r = integrate_1d(&f, Interval::new(0.0, 1.0), &QuadOptions::with_tol(1e-4)).unwrap();
        assert!(r.value.contains(2.0), "{:?}", r.value);
        assert!(r.value.width() <= 1e-4);
    }

    #[test]
    fn smooth_polynomial_tight() {
        // ∫₀¹ (3x² + 1) dx = 2.
        let ival = |x: Interval| {
            Ok(Interval::point(3.0) * x.powi(2).unwrap() + Interval::ONE)
        };
        let jet = |x: Jet| Ok(Jet::of(3.0) * x.powi2() + Jet::of(1.0));
        let f = Integrand1::smooth(&ival, &jet);
        let r = integrate_1d(&f, Interval::new(0.0, 1.0), &QuadOptions::with_tol(1e-10)).unwrap();
        assert!(r.value.contains(2.0));
        assert!(r.value.width() <= 1e-10);
    }

    #[test]
    fn atan_integral_contains_exact() {
        // ∫₀¹ 1/(1+x²) dx = π/4.
        let ival = |x: Interval| Interval::ONE.try_div(Interval::ONE + x.powi(2).unwrap());
        let jet = |x: Jet| Jet::of(1.0).try_div(Jet::of(1.0) + x.powi2());
        let f = Integrand1::smooth(&ival, &jet);
        let r = integrate_1d(&f, Interval::new(0.0, 1.0), &QuadOptions::with_tol(1e-9)).unwrap();
        assert!(r.value.contains(std::f64::consts::FRAC_PI_4));
    }

    #[test]
    fn tail_bound_closed_form() {
        // ∫₁^∞ y^{-2} dy = 1: integrate [1, R] and add the declared tail.
        let r_cut = 1e4;
        let ival = |x: Interval| x.powi(-2);
        let jet = |x: Jet| Jet::of(1.0).try_div(x.powi2());
        let f = Integrand1::smooth(&ival, &jet);
        let r = integrate_1d(
            &f,
            Interval::new(1.0, r_cut),
            &QuadOptions::with_tol(1e-6),
        )
        .unwrap();
        let total = r.value + power_tail(1.0, 2.0, r_cut);
        assert!(total.contains(1.0), "{total:?}");
        assert!(total.width() < 3e-4);
    }

    #[test]
    fn halving_tolerance_tightens() {
        let ival = |x: Interval| Ok(x.sin());
        let jet = |x: Jet| {
            // sin via the jet chain is not implemented; exercise fallback.
            let _ = x;
            Err(IntervalError::Malformed { lo: 0.0, hi: 0.0 })
        };
        let f = Integrand1::smooth(&ival, &jet);
        let d = Interval::new(0.0, 3.0);
        let w1 = integrate_1d(&f, d, &QuadOptions::with_tol(1e-3))
            .unwrap()
            .value
            .width();
        let w2 = integrate_1d(&f, d, &QuadOptions::with_tol(5e-4))
            .unwrap()
            .value
            .width();
        assert!(w2 <= 0.5 * 1e-3 + 1e-12);
        assert!(w1 <= 1e-3);
        let exact = 1.0 - 3.0f64.cos();
        let v = integrate_1d(&f, d, &QuadOptions::with_tol(1e-3)).unwrap().value;
        assert!(v.contains(exact));
        let _ = w1.min(w2);
    }

    #[test]
    fn gaussian_2d_iterated() {
        // ∫₀¹∫₀¹ x·y dx dy = 1/4 with jets both ways.
        let ival = |x: Interval, y: Interval| Ok(x * y);
        let jx = |x: Jet, y: Jet| Ok(x * y);
        let jy = |x: Jet, y: Jet| Ok(x * y);
        let f = Integrand2 {
            ival: &ival,
            jet_x: Some(&jx),
            jet_y: Some(&jy),
        };
        let r = integrate_2d(
            &f,
            Interval::new(0.0, 1.0),
            Interval::new(0.0, 1.0),
            &QuadOptions::with_tol(1e-7),
        )
        .unwrap();
        assert!(r.value.contains(0.25), "{:?}", r.value);
    }
}
