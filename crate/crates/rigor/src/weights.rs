//! Singular weights, Hölder weights, cutoffs, ratio bounds and damping
//! coefficients.
//!
//! All weight parameters live in a versioned config file
//! (`config/weights.toml`); the library logic is parameter-free. Evaluation
//! is interval arithmetic throughout, and the ratio/damping operations use
//! factored forms (leading-power extraction in `r`, multiplying through the
//! `x^{-1/2}` axis factor) so that enclosures stay finite where the naive
//! quotient is an indeterminate form.

use crate::interval::{Interval, IntervalError};
use serde::Deserialize;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WeightError {
    #[error("invalid weight definition: {0}")]
    Invalid(String),
    #[error("ratio of these weight kinds is not supported")]
    UnsupportedRatio,
    #[error("cell contains the singular locus and no factoring applies")]
    SingularCell,
    #[error(transparent)]
    Eval(#[from] IntervalError),
    #[error("config: {0}")]
    Config(String),
}

/// Sum of powers `Σ p_i r^{a_i}` with `p_i > 0` and strictly increasing
/// exponents.
#[derive(Clone, Debug)]
pub struct RadialWeight {
    terms: Vec<(f64, f64)>,
}

impl RadialWeight {
    pub fn new(terms: Vec<(f64, f64)>) -> Result<Self, WeightError> {
        if terms.is_empty()
            || terms.iter().any(|&(p, a)| p <= 0.0 || !p.is_finite() || !a.is_finite())
            || terms.windows(2).any(|w| w[0].1 >= w[1].1)
        {
            return Err(WeightError::Invalid(
                "need positive coefficients and strictly increasing exponents".into(),
            ));
        }
        Ok(RadialWeight { terms })
    }

    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    /// Smallest exponent (the leading power near `r = 0`).
    pub fn leading_exponent(&self) -> f64 {
        self.terms[0].1
    }

    /// Largest exponent (the leading power near `r = ∞`).
    pub fn trailing_exponent(&self) -> f64 {
        self.terms.last().expect("nonempty").1
    }

    pub fn eval_r(&self, r: Interval) -> Result<Interval, IntervalError> {
        let mut acc = Interval::ZERO;
        for &(p, a) in &self.terms {
            acc = acc + Interval::point(p) * r.powf(a)?;
        }
        Ok(acc)
    }

    /// `w(r) / r^shift`, evaluable at `r = 0` when `shift ≤ a_1`.
    fn eval_shifted(&self, r: Interval, shift: f64) -> Result<Interval, IntervalError> {
        let mut acc = Interval::ZERO;
        for &(p, a) in &self.terms {
            acc = acc + Interval::point(p) * r.powf(a - shift)?;
        }
        Ok(acc)
    }

    /// `Σ a_i p_i r^{a_i - shift}` — the shifted form of `r·w'(r)`.
    fn eval_shifted_logderiv_num(
        &self,
        r: Interval,
        shift: f64,
    ) -> Result<Interval, IntervalError> {
        let mut acc = Interval::ZERO;
        for &(p, a) in &self.terms {
            acc = acc + Interval::point(a * p) * r.powf(a - shift)?;
        }
        Ok(acc)
    }

    /// Enclosure of `r·w'(r)/w(r)`, a weighted mean of the exponents.
    pub fn log_derivative(&self, r: Interval) -> Result<Interval, IntervalError> {
        let shift = self.leading_exponent();
        let num = self.eval_shifted_logderiv_num(r, shift)?;
        let den = self.eval_shifted(r, shift)?;
        let raw = num.try_div(den)?;
        // The quotient is a convex combination of the exponents.
        let hullexp = Interval::new(self.leading_exponent(), self.trailing_exponent());
        Ok(raw.intersect(hullexp).unwrap_or(raw))
    }
}

/// `w(x) = x₁^{-1/2}·P(r) + Q(r)` on the open quadrant, with every exponent
/// of `Q` above the leading exponent of `P`.
#[derive(Clone, Debug)]
pub struct MixedWeight {
    pub p: RadialWeight,
    pub q: RadialWeight,
}

impl MixedWeight {
    pub fn new(p: RadialWeight, q: RadialWeight) -> Result<Self, WeightError> {
        if q.leading_exponent() <= p.leading_exponent() {
            return Err(WeightError::Invalid(
                "regular part must be strictly subleading near r = 0".into(),
            ));
        }
        Ok(MixedWeight { p, q })
    }

    /// Append extra terms to the regular part (growing-tail variants).
    pub fn with_extra(&self, extra: &[(f64, f64)]) -> Result<Self, WeightError> {
        let mut terms = self.q.terms.clone();
        terms.extend_from_slice(extra);
        terms.sort_by(|l, r| l.1.partial_cmp(&r.1).expect("finite exponents"));
        MixedWeight::new(self.p.clone(), RadialWeight::new(terms)?)
    }
}

/// Directional Hölder weight `g(h) = g₀(h)/g₀(1,0)` with
/// `g₀(h) = (√(h₁+q₁h₂) + q₃√(h₂+q₂h₁))^{-1}`; `-1/2`-homogeneous and
/// decreasing in each coordinate.
#[derive(Clone, Copy, Debug)]
pub struct HolderWeight {
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
}

impl HolderWeight {
    pub fn new(q1: f64, q2: f64, q3: f64) -> Result<Self, WeightError> {
        if q1 <= 0.0 || q2 <= 0.0 || q3 <= 0.0 {
            return Err(WeightError::Invalid("q parameters must be positive".into()));
        }
        Ok(HolderWeight { q1, q2, q3 })
    }

    /// `g₀(1,0)^{-1} = 1 + q₃√q₂`, the normalization factor.
    fn norm(&self) -> Interval {
        Interval::ONE
            + Interval::point(self.q3) * Interval::point(self.q2).sqrt().expect("q2 > 0")
    }

    pub fn eval(&self, h1: Interval, h2: Interval) -> Result<Interval, IntervalError> {
        let s1 = (h1 + h2 * Interval::point(self.q1)).sqrt()?;
        let s2 = (h2 + h1 * Interval::point(self.q2)).sqrt()?;
        let g0 = Interval::ONE.try_div(s1 + Interval::point(self.q3) * s2)?;
        Ok(g0 * self.norm())
    }

    pub fn eval_f64(&self, h1: f64, h2: f64) -> f64 {
        let g0 = 1.0 / ((h1 + self.q1 * h2).sqrt() + self.q3 * (h2 + self.q2 * h1).sqrt());
        g0 * (1.0 + self.q3 * self.q2.sqrt())
    }
}

/// Cutoff functions; all take values in `[0, 1]`.
#[derive(Clone, Copy, Debug)]
pub enum CutoffSpec {
    /// `χ_e(x) = (1 + exp(1/x + 1/(x-1)))^{-1}`, saturating to 0 for `x ≤ 0`
    /// and 1 for `x ≥ 1`; monotone increasing.
    Exponential,
    /// `κ(x; ν₁, ν₂) = (1 + (x/ν₁)⁴)^{-1}·(1 - χ_e(x/ν₂))`.
    Rational { nu1: f64, nu2: f64 },
    /// Radial far-field blend `χ₁(1-χ₂) + χ₂` with
    /// `χ₁(r) = s⁷/(1+s²)^{7/2}`, `s = max(r-a₁, 0)/√l₁`, and
    /// `χ₂(r) = χ_e((r-a₂)/(9a₂))`; monotone increasing in `r`.
    Radial { a1: f64, l1: f64, a2: f64 },
}

fn chi_e_point(x: f64) -> Interval {
    if x <= 0.0 {
        return Interval::ZERO;
    }
    if x >= 1.0 {
        return Interval::ONE;
    }
    let xi = Interval::point(x);
    let u = Interval::ONE.try_div(xi).expect("x > 0")
        + Interval::ONE.try_div(xi - Interval::ONE).expect("x < 1");
    let v = Interval::ONE.try_div(Interval::ONE + u.exp()).expect("positive");
    v.intersect(Interval::new(0.0, 1.0)).unwrap_or(v)
}

/// Monotone evaluation of `χ_e` on a box.
fn chi_e(x: Interval) -> Interval {
    Interval::new(chi_e_point(x.lo).lo, chi_e_point(x.hi).hi)
}

fn chi_rational_ramp_point(s: f64) -> Interval {
    if s <= 0.0 {
        return Interval::ZERO;
    }
    let si = Interval::point(s);
    let num = si.powi(7).expect("positive power");
    let den = (Interval::ONE + si.powi(2).expect("square")).powf(3.5).expect("positive");
    let v = num.try_div(den).expect("den > 0");
    v.intersect(Interval::new(0.0, 1.0)).unwrap_or(v)
}

impl CutoffSpec {
    pub fn eval(&self, x: Interval) -> Result<Interval, IntervalError> {
        let v = match *self {
            CutoffSpec::Exponential => chi_e(x),
            CutoffSpec::Rational { nu1, nu2 } => {
                let s = x.try_div(Interval::point(nu1))?;
                let k1 = Interval::ONE.try_div(Interval::ONE + s.powi(4)?)?;
                let tail = Interval::ONE - chi_e(x.try_div(Interval::point(nu2))?);
                k1 * tail
            }
            CutoffSpec::Radial { a1, l1, a2 } => {
                // Both pieces are monotone increasing in r, and so is the
                // blend χ₁ + χ₂(1 - χ₁); endpoint evaluation suffices.
                let at = |r: f64| -> Interval {
                    let s = (r - a1) / l1.sqrt();
                    let c1 = chi_rational_ramp_point(s);
                    let c2 = chi_e_point((r - a2) / (9.0 * a2));
                    c1 + c2 * (Interval::ONE - c1)
                };
                Interval::new(at(x.lo).lo, at(x.hi).hi)
            }
        };
        Ok(v.intersect(Interval::new(0.0, 1.0)).unwrap_or(v))
    }
}

/// A weight of any supported kind, for uniform evaluation.
#[derive(Clone, Debug)]
pub enum Weight {
    Radial(RadialWeight),
    Mixed(MixedWeight),
    Holder(HolderWeight),
    Cutoff(CutoffSpec),
}

fn radius(x: Interval, y: Interval) -> Result<Interval, IntervalError> {
    (x.powi(2)? + y.powi(2)?).sqrt()
}

/// Rigorous enclosure of the weight on the box `point = (x, y)`.
///
/// Radial and mixed weights take planar points (mixed ones live on the open
/// quadrant); Hölder weights take displacement pairs; cutoffs are functions
/// of the first coordinate only.
pub fn eval_weight(w: &Weight, point: (Interval, Interval)) -> Result<Interval, WeightError> {
    let (x, y) = point;
    Ok(match w {
        Weight::Radial(rw) => rw.eval_r(radius(x, y)?)?,
        Weight::Mixed(mw) => {
            let r = radius(x, y)?;
            mw.p.eval_r(r)?.try_div(x.sqrt()?)? + mw.q.eval_r(r)?
        }
        Weight::Holder(g) => g.eval(x, y)?,
        Weight::Cutoff(c) => c.eval(x)?,
    })
}

/// Enclosure of `x²/r²` on a box in the closed quadrant; falls back to
/// `[0, 1]` on boxes containing the origin.
fn cos_sq(x: Interval, y: Interval) -> Interval {
    let full = Interval::new(0.0, 1.0);
    // Monotone: increasing in x, decreasing in y (both nonnegative).
    let frac = |xv: f64, yv: f64| -> Option<f64> {
        let x2 = Interval::point(xv).powi(2).ok()?;
        let y2 = Interval::point(yv).powi(2).ok()?;
        x2.try_div(x2 + y2).ok().map(|v| v.midpoint())
    };
    let lo = frac(x.lo.max(0.0), y.hi).unwrap_or(0.0);
    let hi = frac(x.hi, y.lo.max(0.0)).unwrap_or(1.0);
    // Pad by a couple of ulps for the point-quotient rounding.
    Interval::new(lo, hi)
        .outward(4)
        .intersect(full)
        .unwrap_or(full)
}

/// Enclosure of `num/den` on a quadrant box, via leading-power extraction:
/// `w = x^{e} r^{a₁}·core` with `core` positive and finite up to the axes, so
/// `num/den = x^{Δe} r^{Δa}·(core_n/core_d)`.
pub fn weight_ratio_bound(
    num: &Weight,
    den: &Weight,
    cell: (Interval, Interval),
) -> Result<Interval, WeightError> {
    let (x, y) = cell;
    let r = radius(x, y)?;
    // (x-power, r-power, factored core on the cell)
    let factor = |w: &Weight| -> Result<(f64, f64, Interval), WeightError> {
        match w {
            Weight::Radial(rw) => {
                let a = rw.leading_exponent();
                Ok((0.0, a, rw.eval_shifted(r, a)?))
            }
            Weight::Mixed(mw) => {
                let a = mw.p.leading_exponent();
                // x^{-1/2} r^a (P_m + x^{1/2} Q/r^a); Q/r^a has positive
                // exponents by the MixedWeight invariant.
                let core = mw.p.eval_shifted(r, a)?
                    + x.sqrt()? * mw.q.eval_shifted(r, a)?;
                Ok((-0.5, a, core))
            }
            _ => Err(WeightError::UnsupportedRatio),
        }
    };
    let (en, an, cn) = factor(num)?;
    let (ed, ad, cd) = factor(den)?;
    let mut v = cn.try_div(cd)?;
    let dr = an - ad;
    if dr != 0.0 {
        v = v * r.powf(dr)?;
    }
    let de = en - ed;
    if de != 0.0 {
        v = v * x.powf(de)?;
    }
    Ok(v)
}

/// Enclosures of `(x·∂ₓw/w, y·∂ᵧw/w)` on a quadrant box for a radial or
/// mixed weight, finite up to the axes and the origin.
pub fn log_derivative_pair(
    w: &Weight,
    cell: (Interval, Interval),
) -> Result<(Interval, Interval), WeightError> {
    let (x, y) = cell;
    let r = radius(x, y)?;
    let c2 = cos_sq(x, y);
    let s2 = (Interval::ONE - c2)
        .intersect(Interval::new(0.0, 1.0))
        .unwrap_or(Interval::new(0.0, 1.0));
    match w {
        Weight::Radial(rw) => {
            let m = rw.log_derivative(r)?;
            Ok((c2 * m, s2 * m))
        }
        Weight::Mixed(mw) => {
            // Multiply numerator and denominator through by x^{1/2} r^{-a}:
            //   x∂ₓw/w = (-P_m/2 + cos²·dP_m + x^{1/2} cos²·dQ_m) / core,
            //   y∂ᵧw/w = (sin²·dP_m + x^{1/2} sin²·dQ_m) / core,
            // where dW_m = Σ aᵢpᵢ r^{aᵢ-a} and core = P_m + x^{1/2} Q_m.
            let a = mw.p.leading_exponent();
            let xs = x.sqrt()?;
            let pm = mw.p.eval_shifted(r, a)?;
            let qm = mw.q.eval_shifted(r, a)?;
            let dpm = mw.p.eval_shifted_logderiv_num(r, a)?;
            let dqm = mw.q.eval_shifted_logderiv_num(r, a)?;
            let core = pm + xs * qm;
            let half = Interval::point(0.5);
            let xdx = (c2 * dpm - half * pm + xs * (c2 * dqm)).try_div(core)?;
            let ydy = (s2 * dpm + xs * (s2 * dqm)).try_div(core)?;
            Ok((xdx, ydy))
        }
        _ => Err(WeightError::UnsupportedRatio),
    }
}

/// Enclosure of the damping coefficient `(b·∇w)/w` on a cell, for an
/// advection field written as `b = (B₁·x, B₂·y)` with per-cell enclosures of
/// the scalar factors: `(b·∇w)/w = B₁·(x∂ₓw/w) + B₂·(y∂ᵧw/w)`.
///
/// Two algebraically equivalent groupings are evaluated and intersected: the
/// plain sum, and the factored form `m·(B₁cos² + B₂sin²)` available for
/// purely radial weights (where both directional terms share the radial
/// log-derivative `m`).
pub fn damping_coefficient(
    w: &Weight,
    bu1: Interval,
    bu2: Interval,
    cell: (Interval, Interval),
) -> Result<Interval, WeightError> {
    let (xdx, ydy) = log_derivative_pair(w, cell)?;
    let mut est = bu1 * xdx + bu2 * ydy;
    // Regroupings that avoid the cos²/sin² decorrelation: using the combined
    // log-derivative c = x∂ₓw/w + y∂ᵧw/w (cos² + sin² summed exactly),
    //   B₁·xdx + B₂·ydy = B₁·c + (B₂-B₁)·ydy = B₂·c + (B₁-B₂)·xdx.
    // All groupings are enclosures; intersect them.
    if let Some(c) = combined_log_derivative(w, cell)? {
        for alt in [bu1 * c + (bu2 - bu1) * ydy, bu2 * c + (bu1 - bu2) * xdx] {
            est = est.intersect(alt).unwrap_or(est);
        }
    }
    if let Weight::Radial(rw) = w {
        let (x, y) = cell;
        let r = radius(x, y)?;
        let m = rw.log_derivative(r)?;
        let c2 = cos_sq(x, y);
        let s2 = (Interval::ONE - c2)
            .intersect(Interval::new(0.0, 1.0))
            .unwrap_or(Interval::new(0.0, 1.0));
        let est2 = m * (bu1 * c2 + bu2 * s2);
        est = est.intersect(est2).unwrap_or(est);
    }
    Ok(est)
}

/// `x∂ₓw/w + y∂ᵧw/w` with the angular factors summed symbolically
/// (`cos² + sin² = 1`), which is much tighter than adding the pair.
fn combined_log_derivative(
    w: &Weight,
    cell: (Interval, Interval),
) -> Result<Option<Interval>, WeightError> {
    let (x, y) = cell;
    let r = radius(x, y)?;
    match w {
        Weight::Radial(rw) => Ok(Some(rw.log_derivative(r)?)),
        Weight::Mixed(mw) => {
            let a = mw.p.leading_exponent();
            let xs = x.sqrt()?;
            let pm = mw.p.eval_shifted(r, a)?;
            let qm = mw.q.eval_shifted(r, a)?;
            let dpm = mw.p.eval_shifted_logderiv_num(r, a)?;
            let dqm = mw.q.eval_shifted_logderiv_num(r, a)?;
            let core = pm + xs * qm;
            let half = Interval::point(0.5);
            Ok(Some((dpm - half * pm + xs * dqm).try_div(core)?))
        }
        _ => Ok(None),
    }
}

/// `|h·∇g(h) + g(h)/2|` with the gradient by centered finite differences of
/// step `step`; the scaling identity `h·∇g = -g/2` makes this `O(step²)`.
pub fn holder_damping_identity_check(g: &HolderWeight, h: (f64, f64), step: f64) -> f64 {
    let (h1, h2) = h;
    assert!(h1 > 0.0 && h2 > 0.0 && step > 0.0 && step < h1.min(h2));
    let d1 = (g.eval_f64(h1 + step, h2) - g.eval_f64(h1 - step, h2)) / (2.0 * step);
    let d2 = (g.eval_f64(h1, h2 + step) - g.eval_f64(h1, h2 - step)) / (2.0 * step);
    (h1 * d1 + h2 * d2 + 0.5 * g.eval_f64(h1, h2)).abs()
}

/// Uniform enclosure over the whole open quadrant of a 0-homogeneous
/// expression, by partitioned interval evaluation on the two normalized
/// edges `{h₂ = 1, h₁ ∈ [0,1]}` and `{h₁ = 1, h₂ ∈ [0,1]}` (every direction
/// appears on one of them).
pub fn homogeneous_function_bound(
    expr: &dyn Fn(Interval, Interval) -> Result<Interval, IntervalError>,
    partition_size: usize,
) -> Result<Interval, WeightError> {
    assert!(partition_size >= 1);
    let n = partition_size;
    let mut hull: Option<Interval> = None;
    for i in 0..n {
        let t = Interval::new(i as f64 / n as f64, (i + 1) as f64 / n as f64);
        for v in [expr(t, Interval::ONE)?, expr(Interval::ONE, t)?] {
            hull = Some(match hull {
                None => v,
                Some(h) => h.hull(v),
            });
        }
    }
    Ok(hull.expect("partition_size >= 1"))
}

/// Bound on `|(fg)(x) - (fg)(z)|` from per-direction `C^{1/2}` seminorm
/// bounds and sup bounds of the factors, via the two-path decomposition of
/// the increment along the axis-aligned edges and the product rule on each
/// edge (minimized over both edge orders).
pub fn holder_product_bound(
    f_c12: (Interval, Interval),
    f_inf: Interval,
    g_c12: (Interval, Interval),
    g_inf: Interval,
    displacement: (f64, f64),
) -> Interval {
    let (s1, s2) = displacement;
    let root = |s: f64| Interval::point(s.abs()).sqrt().expect("abs");
    let fa = f_inf.abs();
    let ga = g_inf.abs();
    let edge = |df: Interval, dg: Interval| df.abs() * ga + dg.abs() * fa;
    let path = |e1: Interval, e2: Interval| e1 * root(s1) + e2 * root(s2);
    // With sup-norm bounds for the factors, both traversal orders of the two
    // axis-aligned edges give the same per-edge products, so the minimum over
    // paths collapses to a single evaluation.
    let p = path(edge(f_c12.0, g_c12.0), edge(f_c12.1, g_c12.1));
    Interval::new(0.0, p.hi)
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
struct RawRadial {
    p: Vec<f64>,
    a: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct RawMixed {
    sing: RawRadial,
    reg: RawRadial,
}

#[derive(Debug, Deserialize)]
struct RawMixedScale {
    sing: Vec<f64>,
    reg: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct RawHolder {
    w1: RawRadial,
    w2: RawRadial,
    w3: RawRadial,
    q1: [f64; 3],
    q2: [f64; 3],
    q3: [f64; 3],
}

#[derive(Debug, Deserialize)]
struct RawDecay {
    w1: RawMixed,
    mu0: f64,
    w2_raw: RawMixed,
    w3_scale: RawMixedScale,
}

#[derive(Debug, Deserialize)]
struct RawGrow {
    w1_extra: RawRadial,
    w2_extra: RawRadial,
    w3_extra_p1: f64,
    alpha_n: f64,
}

#[derive(Debug, Deserialize, Clone, Copy)]
pub struct EnergyParams {
    pub tau1: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub mu4: f64,
    pub tau2: f64,
    pub mu5: f64,
    pub mu51: f64,
    pub mu52: f64,
    pub mu6: f64,
    pub mu62: f64,
    pub mu7: f64,
    pub mu8: f64,
}

#[derive(Debug, Deserialize)]
struct RawCutoff {
    kappa_star: RawKappa,
    radial: RawRadialCutoff,
}

#[derive(Debug, Deserialize)]
struct RawKappa {
    nu1: f64,
    nu2: f64,
}

#[derive(Debug, Deserialize)]
struct RawRadialCutoff {
    a1: f64,
    l1: f64,
    a2: f64,
}

#[derive(Debug, Deserialize)]
struct RawConfig {
    version: u32,
    tau: f64,
    holder: RawHolder,
    decay: RawDecay,
    grow: RawGrow,
    energy: EnergyParams,
    cutoff: RawCutoff,
}

/// The full parameter set, assembled from the config file.
#[derive(Debug)]
pub struct WeightConfig {
    pub version: u32,
    pub tau: f64,
    pub alpha_n: f64,
    /// Radial envelopes of the Hölder-seminorm weights.
    pub holder_envelopes: [RadialWeight; 3],
    /// Directional Hölder kernels.
    pub holder_kernels: [HolderWeight; 3],
    /// Decaying weighted-L∞ weights.
    pub decay: [MixedWeight; 3],
    /// Growing-tail variants.
    pub grow: [MixedWeight; 3],
    pub energy: EnergyParams,
    pub kappa_star: CutoffSpec,
    pub radial_cutoff: CutoffSpec,
}

/// The config file checked in next to the crate.
pub const DEFAULT_CONFIG: &str = include_str!("../config/weights.toml");

impl WeightConfig {
    pub fn from_toml(text: &str) -> Result<Self, WeightError> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| WeightError::Config(e.to_string()))?;
        let radial = |r: &RawRadial| -> Result<RadialWeight, WeightError> {
            if r.p.len() != r.a.len() {
                return Err(WeightError::Config(
                    "coefficient/exponent length mismatch".into(),
                ));
            }
            RadialWeight::new(r.p.iter().copied().zip(r.a.iter().copied()).collect())
        };
        let mixed = |m: &RawMixed| -> Result<MixedWeight, WeightError> {
            MixedWeight::new(radial(&m.sing)?, radial(&m.reg)?)
        };
        let scale_radial = |r: &RadialWeight, s: &[f64]| -> Result<RadialWeight, WeightError> {
            if r.terms.len() != s.len() {
                return Err(WeightError::Config("scale length mismatch".into()));
            }
            RadialWeight::new(
                r.terms
                    .iter()
                    .zip(s)
                    .map(|(&(p, a), &k)| (p * k, a))
                    .collect(),
            )
        };
        let scale_all = |r: &RadialWeight, k: f64| -> Result<RadialWeight, WeightError> {
            RadialWeight::new(r.terms.iter().map(|&(p, a)| (p * k, a)).collect())
        };

        let d1 = mixed(&raw.decay.w1)?;
        let w2_raw = mixed(&raw.decay.w2_raw)?;
        let d2 = MixedWeight::new(
            scale_all(&w2_raw.p, raw.decay.mu0)?,
            scale_all(&w2_raw.q, raw.decay.mu0)?,
        )?;
        let d3 = MixedWeight::new(
            scale_radial(&d2.p, &raw.decay.w3_scale.sing)?,
            scale_radial(&d2.q, &raw.decay.w3_scale.reg)?,
        )?;

        let g_extra1: Vec<(f64, f64)> = raw
            .grow
            .w1_extra
            .p
            .iter()
            .copied()
            .zip(raw.grow.w1_extra.a.iter().copied())
            .collect();
        let g_extra2: Vec<(f64, f64)> = raw
            .grow
            .w2_extra
            .p
            .iter()
            .copied()
            .zip(raw.grow.w2_extra.a.iter().copied())
            .collect();
        if g_extra2.len() != 2 {
            return Err(WeightError::Config("w2_extra must have two terms".into()));
        }
        let p92 = g_extra2[1].0 * raw.grow.w3_extra_p1 / g_extra2[0].0;
        let g_extra3 = vec![
            (raw.grow.w3_extra_p1, g_extra2[0].1),
            (p92, raw.grow.alpha_n),
        ];
        let grow = [
            d1.with_extra(&g_extra1)?,
            d2.with_extra(&g_extra2)?,
            d3.with_extra(&g_extra3)?,
        ];

        Ok(WeightConfig {
            version: raw.version,
            tau: raw.tau,
            alpha_n: raw.grow.alpha_n,
            holder_envelopes: [
                radial(&raw.holder.w1)?,
                radial(&raw.holder.w2)?,
                radial(&raw.holder.w3)?,
            ],
            holder_kernels: [
                HolderWeight::new(raw.holder.q1[0], raw.holder.q1[1], raw.holder.q1[2])?,
                HolderWeight::new(raw.holder.q2[0], raw.holder.q2[1], raw.holder.q2[2])?,
                HolderWeight::new(raw.holder.q3[0], raw.holder.q3[1], raw.holder.q3[2])?,
            ],
            decay: [d1, d2, d3],
            grow,
            energy: raw.energy,
            kappa_star: CutoffSpec::Rational {
                nu1: raw.cutoff.kappa_star.nu1,
                nu2: raw.cutoff.kappa_star.nu2,
            },
            radial_cutoff: CutoffSpec::Radial {
                a1: raw.cutoff.radial.a1,
                l1: raw.cutoff.radial.l1,
                a2: raw.cutoff.radial.a2,
            },
        })
    }

    pub fn load(path: &Path) -> Result<Self, WeightError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| WeightError::Config(format!("{}: {e}", path.display())))?;
        WeightConfig::from_toml(&text)
    }

    pub fn builtin() -> Self {
        WeightConfig::from_toml(DEFAULT_CONFIG).expect("bundled config parses")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> WeightConfig {
        WeightConfig::builtin()
    }

    #[test]
    fn decay_w1_at_unit_point() {
        // w1 at (1, 0): r = 1 → 1·(1 + 0.6) + 0.3 = 1.9.
        let c = cfg();
        let v = eval_weight(
            &Weight::Mixed(c.decay[0].clone()),
            (Interval::point(1.0), Interval::point(0.0)),
        )
        .unwrap();
        assert!(v.contains(1.9), "{v:?}");
        assert!(v.width() < 1e-12);
    }

    #[test]
    fn holder_kernel_normalized() {
        let c = cfg();
        for g in &c.holder_kernels {
            let v = g.eval(Interval::point(1.0), Interval::point(0.0)).unwrap();
            assert!(v.contains(1.0) && v.width() < 1e-12, "{v:?}");
        }
    }

    #[test]
    fn radial_envelope_value() {
        let c = cfg();
        let r = Interval::point(2.0);
        let v = c.holder_envelopes[0].eval_r(r).unwrap();
        let expect = 0.25 + 0.5 * 0.5 + 0.2 * 2.0f64.powf(-1.0 / 6.0);
        assert!(v.contains(expect) || (v.midpoint() - expect).abs() < 1e-14, "{v:?}");
    }

    #[test]
    fn holder_homogeneity() {
        let c = cfg();
        let g = c.holder_kernels[0];
        for (h1, h2, lam) in [(1.0, 1.0, 4.0), (0.3, 2.0, 9.0), (5.0, 0.1, 0.25)] {
            let a = g.eval(Interval::point(lam * h1), Interval::point(lam * h2)).unwrap();
            let b = g.eval(Interval::point(h1), Interval::point(h2)).unwrap();
            let ratio = a.try_div(b).unwrap().midpoint();
            assert!((ratio - lam.powf(-0.5)).abs() < 1e-10, "{ratio}");
        }
    }

    #[test]
    fn cutoff_saturation_and_range() {
        let chi = CutoffSpec::Exponential;
        assert_eq!(chi.eval(Interval::point(-1.0)).unwrap(), Interval::ZERO);
        assert_eq!(chi.eval(Interval::point(2.0)).unwrap(), Interval::ONE);
        let mid = chi.eval(Interval::new(0.2, 0.8)).unwrap();
        assert!(mid.lo >= 0.0 && mid.hi <= 1.0 && mid.lo < mid.hi);
        let c = cfg();
        let v = c.radial_cutoff.eval(Interval::new(0.0, 5.0)).unwrap();
        assert!(v.hi < 1e-6, "cutoff ~0 well inside: {v:?}");
        let v = c.radial_cutoff.eval(Interval::point(3.0e6)).unwrap();
        assert!(v.lo > 0.99, "cutoff ~1 far out: {v:?}");
    }

    #[test]
    fn ratio_trivial_cases() {
        let c = cfg();
        let w = Weight::Radial(c.holder_envelopes[0].clone());
        let cell = (Interval::new(0.5, 1.0), Interval::new(0.2, 0.4));
        let v = weight_ratio_bound(&w, &w, cell).unwrap();
        assert!(v.contains(1.0));
        // |x|^{-2} / (|x|^{-2} + |x|^{-1}) = 1/(1+r) ∈ [1/3, 1/2] on r ∈ [1,2].
        let n = Weight::Radial(RadialWeight::new(vec![(1.0, -2.0)]).unwrap());
        let d = Weight::Radial(
            RadialWeight::new(vec![(1.0, -2.0), (1.0, -1.0)]).unwrap(),
        );
        // A box with r ∈ [1, 2]: x ∈ [0.6, 1.2], y ∈ [0.8, 1.6].
        let v = weight_ratio_bound(&n, &d, (Interval::new(0.6, 1.2), Interval::new(0.8, 1.6)))
            .unwrap();
        assert!(v.lo >= 1.0 / 3.0 - 1e-9 && v.hi <= 0.5 + 1e-9, "{v:?}");
    }

    #[test]
    fn ratio_finite_on_axis_cell() {
        let c = cfg();
        let n = Weight::Mixed(c.decay[0].clone());
        let d = Weight::Mixed(c.decay[1].clone());
        let cell = (Interval::new(0.0, 0.1), Interval::new(0.5, 0.6));
        let v = weight_ratio_bound(&n, &d, cell).unwrap();
        assert!(v.is_finite() && v.lo > 0.0, "{v:?}");
        // Sampling oracle.
        let c = cfg();
        for i in 1..50 {
            let x = 0.1 * (i as f64) / 50.0;
            for j in 0..50 {
                let y = 0.5 + 0.1 * (j as f64) / 50.0;
                let num = eval_weight(
                    &Weight::Mixed(c.decay[0].clone()),
                    (Interval::point(x), Interval::point(y)),
                )
                .unwrap();
                let den = eval_weight(
                    &Weight::Mixed(c.decay[1].clone()),
                    (Interval::point(x), Interval::point(y)),
                )
                .unwrap();
                let q = num.try_div(den).unwrap().midpoint();
                assert!(v.contains(q) || (q > v.lo && q < v.hi), "{q} vs {v:?}");
            }
        }
    }

    #[test]
    fn damping_toy_model_values() {
        // b = (0.5·x, 5.5·y), w = r^{-γ}: damping = -γ(0.5x² + 5.5y²)/r².
        let w = Weight::Radial(RadialWeight::new(vec![(1.0, -1.0)]).unwrap());
        let b1 = Interval::point(0.5);
        let b2 = Interval::point(5.5);
        // On the x-axis: -0.5.
        let v = damping_coefficient(&w, b1, b2, (Interval::new(1.0, 1.1), Interval::point(0.0)))
            .unwrap();
        assert!(v.contains(-0.5), "{v:?}");
        assert!(v.width() < 1e-10);
        // Steep direction y/x → ∞: -5.5.
        let v = damping_coefficient(
            &w,
            b1,
            b2,
            (Interval::point(0.0), Interval::new(1.0, 1.1)),
        )
        .unwrap();
        assert!(v.contains(-5.5), "{v:?}");
        // Generic cell: sampling oracle.
        let cell = (Interval::new(0.3, 0.5), Interval::new(0.7, 0.9));
        let v = damping_coefficient(&w, b1, b2, cell).unwrap();
        for i in 0..=20 {
            for j in 0..=20 {
                let x = 0.3 + 0.2 * (i as f64) / 20.0;
                let y = 0.7 + 0.2 * (j as f64) / 20.0;
                let exact = -(0.5 * x * x + 5.5 * y * y) / (x * x + y * y);
                assert!(v.contains(exact), "{exact} vs {v:?}");
            }
        }
    }

    #[test]
    fn damping_far_field_approaches_trailing_exponent() {
        // b = c_l·x and a growing-tail weight: for large r the damping tends
        // to c_l · (largest exponent).
        let c = cfg();
        let cl = 3.0;
        // grow[0]'s top term already dominates at r ~ 1e8; the others need
        // astronomically large radii for the same check.
        let w = Weight::Mixed(c.grow[0].clone());
        let a_n = c.grow[0].q.trailing_exponent();
        let cell = (
            Interval::new(1.0e8, 1.1e8),
            Interval::new(1.0e8, 1.1e8),
        );
        let v = damping_coefficient(&w, Interval::point(cl), Interval::point(cl), cell).unwrap();
        assert!(
            (v.midpoint() - cl * a_n).abs() < 0.05,
            "{v:?} vs {}",
            cl * a_n
        );
    }

    #[test]
    fn scaling_identity_residual() {
        let c = cfg();
        // Pure |h|^{-1/2} has the identity exactly.
        let iso = HolderWeight::new(1.0, 1.0, 1e-9).unwrap_or_else(|_| c.holder_kernels[0]);
        let _ = iso;
        for g in &c.holder_kernels {
            let r = holder_damping_identity_check(g, (1.0, 1.0), 1e-4);
            assert!(r < 1e-6, "residual {r}");
            // Homogeneity: g(2,2) = 2^{-1/2} g(1,1).
            let a = g.eval_f64(2.0, 2.0);
            let b = g.eval_f64(1.0, 1.0) / 2.0f64.sqrt();
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn homogeneous_bound_examples() {
        // h₁^{1/2}·|h|^{-1/2}: sup over the quadrant is 1.
        let f = |h1: Interval, h2: Interval| {
            h1.sqrt()?
                .try_div((h1.powi(2)? + h2.powi(2)?).powf(0.25)?)
        };
        let b = homogeneous_function_bound(&f, 256).unwrap();
        assert!(b.hi >= 1.0 && b.hi < 1.05, "{b:?}");
        assert!(b.lo >= -1e-12);
        // |h|·∂₁g/g for g = |h|^{-1/2} is -h₁²/(2|h|²)·(2/h₁)·... : check the
        // magnitude form h₁/(2|h|) stays within [0, 1/2].
        let f = |h1: Interval, h2: Interval| {
            h1.try_div(Interval::point(2.0) * (h1.powi(2)? + h2.powi(2)?).sqrt()?)
        };
        let b = homogeneous_function_bound(&f, 256).unwrap();
        assert!(b.lo >= -1e-12 && b.hi <= 0.5 + 1e-9, "{b:?}");
    }

    #[test]
    fn product_bound_reductions() {
        // g ≡ 1 reduces to the f edge bound.
        let f12 = (Interval::point(0.3), Interval::point(0.4));
        let b = holder_product_bound(
            f12,
            Interval::point(2.0),
            (Interval::ZERO, Interval::ZERO),
            Interval::ONE,
            (0.25, 0.25),
        );
        let expect = 0.3 * 0.5 + 0.4 * 0.5;
        assert!(b.hi >= expect - 1e-12 && b.hi <= expect + 1e-9, "{b:?}");
        // f constant: |f| times the g bound.
        let b = holder_product_bound(
            (Interval::ZERO, Interval::ZERO),
            Interval::point(2.0),
            (Interval::point(1.0), Interval::point(1.0)),
            Interval::ONE,
            (1.0, 0.0),
        );
        assert!(b.hi >= 2.0 - 1e-12 && b.hi <= 2.0 + 1e-9, "{b:?}");
    }

    #[test]
    fn config_versioned() {
        assert_eq!(cfg().version, 1);
        assert!((cfg().tau - 0.582).abs() < 1e-15);
    }
}
