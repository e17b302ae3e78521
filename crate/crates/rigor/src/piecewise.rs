//! Meshes and per-cell interval bounds.
//!
//! A [`PiecewiseBound`] attaches one enclosure to every cell of a 1-D mesh or
//! a 2-D tensor mesh. The operations here turn endpoint samples plus
//! derivative information into cell-wide bounds: the second-derivative
//! midpoint estimate, the derivative recursion for polynomials, lower bounds
//! for cumulative averages `x^{-k}∫₀^x f s^{k-1} ds`, and the mean-value
//! bound for ratios `f/x` of functions vanishing on `x = 0`.

use crate::interval::{Interval, IntervalError};
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PiecewiseError {
    #[error("mesh nodes must be strictly increasing with at least two nodes")]
    BadMesh,
    #[error("cell index {index} out of range ({cells} cells)")]
    CellOutOfRange { index: usize, cells: usize },
    #[error("cell count {got} does not match mesh ({expected} cells)")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("bound is {got}-dimensional, expected {expected}-dimensional")]
    WrongDimension { got: usize, expected: usize },
    #[error(transparent)]
    Eval(#[from] IntervalError),
}

/// Strictly increasing 1-D mesh `y_0 < y_1 < … < y_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh1D {
    nodes: Vec<f64>,
}

impl Mesh1D {
    pub fn new(nodes: Vec<f64>) -> Result<Self, PiecewiseError> {
        if nodes.len() < 2
            || nodes.iter().any(|v| !v.is_finite())
            || nodes.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(PiecewiseError::BadMesh);
        }
        Ok(Mesh1D { nodes })
    }

    /// `n + 1` equispaced nodes on `[a, b]`.
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self, PiecewiseError> {
        let nodes = (0..=n)
            .map(|i| a + (b - a) * (i as f64) / (n as f64))
            .collect();
        Mesh1D::new(nodes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn n_cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn cell(&self, i: usize) -> Interval {
        Interval::new(self.nodes[i], self.nodes[i + 1])
    }

    /// New mesh with every cell bisected.
    pub fn halved(&self) -> Mesh1D {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len() - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push(0.5 * (w[0] + w[1]));
        }
        nodes.push(*self.nodes.last().expect("nonempty"));
        Mesh1D { nodes }
    }

    /// Index of a cell containing `x`, if any.
    pub fn locate(&self, x: f64) -> Option<usize> {
        if x < self.nodes[0] || x > *self.nodes.last().expect("nonempty") {
            return None;
        }
        let i = self.nodes.partition_point(|&n| n <= x);
        Some(i.saturating_sub(1).min(self.n_cells() - 1))
    }
}

/// One interval per cell of a 1-D mesh or a 2-D tensor mesh, labelled by the
/// quantity it bounds.
#[derive(Clone, Debug)]
pub struct PiecewiseBound {
    pub mesh_x: Mesh1D,
    pub mesh_y: Option<Mesh1D>,
    cells: Vec<Interval>,
    pub label: String,
}

impl PiecewiseBound {
    pub fn new_1d(
        mesh: Mesh1D,
        cells: Vec<Interval>,
        label: impl Into<String>,
    ) -> Result<Self, PiecewiseError> {
        if cells.len() != mesh.n_cells() {
            return Err(PiecewiseError::DimensionMismatch {
                got: cells.len(),
                expected: mesh.n_cells(),
            });
        }
        Ok(PiecewiseBound {
            mesh_x: mesh,
            mesh_y: None,
            cells,
            label: label.into(),
        })
    }

    pub fn new_2d(
        mesh_x: Mesh1D,
        mesh_y: Mesh1D,
        cells: Vec<Interval>,
        label: impl Into<String>,
    ) -> Result<Self, PiecewiseError> {
        let expected = mesh_x.n_cells() * mesh_y.n_cells();
        if cells.len() != expected {
            return Err(PiecewiseError::DimensionMismatch {
                got: cells.len(),
                expected,
            });
        }
        Ok(PiecewiseBound {
            mesh_x,
            mesh_y: Some(mesh_y),
            cells,
            label: label.into(),
        })
    }

    /// Build a 1-D bound by interval evaluation of `f` on every cell.
    pub fn from_fn_1d(
        mesh: Mesh1D,
        label: impl Into<String>,
        f: impl Fn(Interval) -> Result<Interval, IntervalError>,
    ) -> Result<Self, PiecewiseError> {
        let cells = (0..mesh.n_cells())
            .map(|i| f(mesh.cell(i)))
            .collect::<Result<Vec<_>, _>>()?;
        PiecewiseBound::new_1d(mesh, cells, label)
    }

    /// Build a 2-D bound by interval evaluation of `f` on every tensor cell.
    pub fn from_fn_2d(
        mesh_x: Mesh1D,
        mesh_y: Mesh1D,
        label: impl Into<String>,
        f: impl Fn(Interval, Interval) -> Result<Interval, IntervalError>,
    ) -> Result<Self, PiecewiseError> {
        let mut cells = Vec::with_capacity(mesh_x.n_cells() * mesh_y.n_cells());
        for j in 0..mesh_y.n_cells() {
            for i in 0..mesh_x.n_cells() {
                cells.push(f(mesh_x.cell(i), mesh_y.cell(j))?);
            }
        }
        PiecewiseBound::new_2d(mesh_x, mesh_y, cells, label)
    }

    pub fn is_2d(&self) -> bool {
        self.mesh_y.is_some()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cell(&self, i: usize) -> Result<Interval, PiecewiseError> {
        self.cells
            .get(i)
            .copied()
            .ok_or(PiecewiseError::CellOutOfRange {
                index: i,
                cells: self.cells.len(),
            })
    }

    /// 2-D cell `(i, j)` in the tensor layout (x-major rows).
    pub fn cell_2d(&self, i: usize, j: usize) -> Result<Interval, PiecewiseError> {
        let my = self.mesh_y.as_ref().ok_or(PiecewiseError::WrongDimension {
            got: 1,
            expected: 2,
        })?;
        if i >= self.mesh_x.n_cells() || j >= my.n_cells() {
            return Err(PiecewiseError::CellOutOfRange {
                index: i + j * self.mesh_x.n_cells(),
                cells: self.cells.len(),
            });
        }
        self.cell(i + j * self.mesh_x.n_cells())
    }

    /// Enclosure at a point: the hull of all cells containing it.
    pub fn at(&self, x: f64) -> Option<Interval> {
        debug_assert!(!self.is_2d());
        let i = self.mesh_x.locate(x)?;
        let mut v = self.cells[i];
        // A node point belongs to both neighbouring cells; each is a valid
        // enclosure, so their intersection is too.
        if i > 0 && x == self.mesh_x.nodes()[i] {
            if let Some(w) = v.intersect(self.cells[i - 1]) {
                v = w;
            }
        }
        Some(v)
    }

    /// Serialize as CSV rows `cell,lo,hi,label`.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["cell", "lo", "hi", "label"])?;
        for (i, c) in self.cells.iter().enumerate() {
            w.write_record([
                i.to_string(),
                format!("{:e}", c.lo),
                format!("{:e}", c.hi),
                self.label.clone(),
            ])?;
        }
        w.flush()
    }
}

/// Enclosure of `sup over a cell of |f|` from endpoint values and a bound on
/// `sup |f''|`: the sup is at least the larger endpoint magnitude and at most
/// `max(|f(x_l)|, |f(x_u)|) + h²/8·‖f''‖`.
pub fn bound_via_second_derivative(
    f_endpoints: (Interval, Interval),
    h: f64,
    f2_bound: Interval,
) -> Interval {
    assert!(h > 0.0, "cell width must be positive");
    let m = f_endpoints.0.abs().max_i(f_endpoints.1.abs());
    let corr = Interval::point(h * h / 8.0) * Interval::new(0.0, f2_bound.magnitude());
    Interval::new(m.lo, (m + corr).hi)
}

fn poly_derivative(coeffs: &[Interval]) -> Vec<Interval> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| *c * Interval::point(k as f64))
        .collect()
}

fn poly_eval(coeffs: &[Interval], x: Interval) -> Interval {
    let mut acc = Interval::ZERO;
    for c in coeffs.iter().rev() {
        acc = acc * x + *c;
    }
    acc
}

/// Enclosure of the `order`-th derivative of a polynomial on a cell.
///
/// For `order > degree` the derivative vanishes identically. Otherwise the
/// direct interval evaluation of the differentiated polynomial is intersected
/// with the recursion `sup|∂^k f| ≤ max endpoint |∂^k f| + h²/8·sup|∂^{k+2}f|`
/// applied top-down from the vanishing order.
pub fn derivative_recursion_bound(
    poly_degree: usize,
    coeff_bounds: &[Interval],
    order: usize,
    cell: Interval,
) -> Interval {
    assert!(coeff_bounds.len() == poly_degree + 1, "one bound per coefficient");
    if order > poly_degree {
        return Interval::ZERO;
    }
    let mut d = coeff_bounds.to_vec();
    for _ in 0..order {
        d = poly_derivative(&d);
    }
    // Magnitude bounds of ∂^{k} f for k = degree down to `order`, two levels
    // at a time; `mag[k - order]` holds sup|∂^k f| on the cell.
    let h = cell.width();
    let mut sup_abs = vec![Interval::ZERO.magnitude(); poly_degree - order + 3];
    let mut dk = d.clone();
    let mut stack = vec![d.clone()];
    for _ in order..poly_degree {
        dk = poly_derivative(&dk);
        stack.push(dk.clone());
    }
    for k in (order..=poly_degree).rev() {
        let coeffs = &stack[k - order];
        let direct = poly_eval(coeffs, cell).magnitude();
        let ends = bound_via_second_derivative(
            (
                poly_eval(coeffs, Interval::point(cell.lo)),
                poly_eval(coeffs, Interval::point(cell.hi)),
            ),
            h.max(f64::MIN_POSITIVE),
            Interval::new(0.0, sup_abs[k - order + 2]),
        );
        sup_abs[k - order] = direct.min(ends.hi);
    }
    let direct = poly_eval(&stack[0], cell);
    let b = sup_abs[0];
    direct
        .intersect(Interval::new(-b, b))
        .unwrap_or(direct)
}

/// Lower bound of `I_k(f)(x) = x^{-k} ∫₀^x f(s) s^{k-1} ds`, valid for every
/// `x` in the query cell, from per-cell lower bounds of `f` on a mesh that
/// starts at 0. Returned as `[L, +∞)`.
pub fn cumulative_power_lower_bound(
    f_cell_lower: &[f64],
    mesh: &Mesh1D,
    k: u32,
    query_cell: usize,
) -> Result<Interval, PiecewiseError> {
    assert!(k == 1 || k == 2, "k must be 1 or 2");
    if f_cell_lower.len() != mesh.n_cells() {
        return Err(PiecewiseError::DimensionMismatch {
            got: f_cell_lower.len(),
            expected: mesh.n_cells(),
        });
    }
    if query_cell >= mesh.n_cells() {
        return Err(PiecewiseError::CellOutOfRange {
            index: query_cell,
            cells: mesh.n_cells(),
        });
    }
    assert!(mesh.nodes()[0] == 0.0, "mesh must start at 0");
    let i = query_cell;
    let ki = Interval::point(f64::from(k));
    let fl = Interval::point(f_cell_lower[i]);
    let xi = Interval::point(mesh.nodes()[i]);
    let xi1 = Interval::point(mesh.nodes()[i + 1]);
    let pk = |v: Interval| v.powi(i32::try_from(k).expect("small k")).expect("k > 0");

    // S = Σ_{j<i} f_{l,j} (x_{j+1}^k - x_j^k): k · the integral of the
    // piecewise-constant lower envelope up to x_i, against s^{k-1} ds.
    let mut s = Interval::ZERO;
    for j in 0..i {
        let a = Interval::point(mesh.nodes()[j]);
        let b = Interval::point(mesh.nodes()[j + 1]);
        s = s + Interval::point(f_cell_lower[j]) * (pk(b) - pk(a));
    }
    // I_k ≥ (1/k)·f_{l,i} + (1/k)·(S - x_i^k f_{l,i}) / x^k; the second term
    // is monotone in x^k, so the endpoints of the cell realise the minimum.
    let num = s - pk(xi) * fl;
    let lower = if i == 0 {
        // First cell: S = 0 and x_0 = 0, the formula reduces to f_{l,0}/k.
        (fl.try_div(ki)?).lo
    } else {
        let at_lo = (fl + num.try_div(pk(xi))?).try_div(ki)?.lo;
        let at_hi = (fl + num.try_div(pk(xi1))?).try_div(ki)?.lo;
        at_lo.min(at_hi)
    };
    Ok(Interval::new(lower, f64::INFINITY))
}

/// Two-sided enclosure of `f/x` on 2-D tensor cell `(i, j)` for `f` with
/// `f(0, y) = 0`, from per-cell enclosures of `f` and of `∂f/∂x`.
///
/// Mean value in `x`: `f(x, y) = f(x_i, y) + ∂_x f(ξ)(x - x_i)`, and for fixed
/// numerator data `t ↦ (a + b·t)/(x_i + t)` is monotone, so the hull of the
/// two endpoint evaluations encloses the ratio. On the first cell (`x_i = 0`)
/// the ratio equals `∂_x f(ξ)` directly.
pub fn vanishing_ratio_bound(
    f_bounds_2d: &PiecewiseBound,
    fx_bounds_2d: &PiecewiseBound,
    i: usize,
    j: usize,
) -> Result<Interval, PiecewiseError> {
    let f = f_bounds_2d.cell_2d(i, j)?;
    let fx = fx_bounds_2d.cell_2d(i, j)?;
    let xi = f_bounds_2d.mesh_x.nodes()[i];
    let xi1 = f_bounds_2d.mesh_x.nodes()[i + 1];
    if xi < 0.0 {
        return Err(PiecewiseError::BadMesh);
    }
    // Left-edge values are contained in the cell enclosure of f.
    let h = Interval::point(xi1) - Interval::point(xi);
    if xi == 0.0 {
        return Ok(fx);
    }
    let at_left = f.try_div(Interval::point(xi))?;
    let at_right = (f + fx * h).try_div(Interval::point(xi1))?;
    Ok(at_left.hull(at_right))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_validation() {
        assert!(Mesh1D::new(vec![0.0, 1.0, 1.0]).is_err());
        assert!(Mesh1D::new(vec![0.0]).is_err());
        let m = Mesh1D::uniform(0.0, 1.0, 4).unwrap();
        assert_eq!(m.n_cells(), 4);
        assert_eq!(m.locate(0.3), Some(1));
        assert_eq!(m.locate(1.0), Some(3));
        assert_eq!(m.locate(-0.1), None);
    }

    #[test]
    fn second_derivative_bound_square() {
        // f(x) = x² on [0,1]: endpoints 0 and 1, ‖f''‖ = 2 → upper 1.25.
        let b = bound_via_second_derivative(
            (Interval::point(0.0), Interval::point(1.0)),
            1.0,
            Interval::point(2.0),
        );
        assert!(b.hi >= 1.0 && b.hi <= 1.25 + 1e-12);
        // Linear f: exact at the endpoint magnitude.
        let b = bound_via_second_derivative(
            (Interval::point(-3.0), Interval::point(2.0)),
            1.0,
            Interval::ZERO,
        );
        assert!(b.contains(3.0) && b.width() < 16.0 * f64::EPSILON);
    }

    #[test]
    fn derivative_recursion_cases() {
        let coeffs: Vec<Interval> = [0.0, 0.0, 0.0, 1.0]
            .iter()
            .map(|&c| Interval::point(c))
            .collect();
        // x³: order 6 vanishes, order 2 is 6x ⊇ [0,6] on [0,1].
        let z = derivative_recursion_bound(3, &coeffs, 6, Interval::new(0.0, 1.0));
        assert_eq!((z.lo, z.hi), (0.0, 0.0));
        let d2 = derivative_recursion_bound(3, &coeffs, 2, Interval::new(0.0, 1.0));
        assert!(d2.contains(0.0) && d2.contains(6.0));
        let d1 = derivative_recursion_bound(3, &coeffs, 1, Interval::new(0.0, 1.0));
        assert!(d1.contains(3.0) && d1.contains(0.0));
    }

    #[test]
    fn cumulative_constant_exact() {
        // f ≡ c: I_k = c/k exactly.
        let mesh = Mesh1D::uniform(0.0, 2.0, 8).unwrap();
        for k in [1u32, 2] {
            for cell in 0..8 {
                let b =
                    cumulative_power_lower_bound(&[3.0; 8], &mesh, k, cell).unwrap();
                assert!(
                    b.lo <= 3.0 / f64::from(k) + 1e-12 && b.lo >= 3.0 / f64::from(k) - 1e-9,
                    "k={k} cell={cell} got {}",
                    b.lo
                );
            }
        }
    }

    #[test]
    fn cumulative_linear_is_valid() {
        // f(s) = s, k = 1: I₁(x) = x/2; the bound must sit below x_l/2.
        let mesh = Mesh1D::uniform(0.0, 1.0, 10).unwrap();
        let lowers: Vec<f64> = (0..10).map(|i| mesh.nodes()[i]).collect();
        for cell in 1..10 {
            let b = cumulative_power_lower_bound(&lowers, &mesh, 1, cell).unwrap();
            let xl = mesh.nodes()[cell];
            assert!(b.lo <= xl / 2.0 + 1e-12, "cell {cell}: {} vs {}", b.lo, xl / 2.0);
            // Not hopelessly slack either.
            assert!(b.lo >= xl / 2.0 - 0.1);
        }
    }

    #[test]
    fn ratio_bound_identity_and_product() {
        let mx = Mesh1D::uniform(0.0, 1.0, 2).unwrap();
        let my = Mesh1D::uniform(1.0, 2.0, 1).unwrap();
        // f(x,y) = x: f/x = 1.
        let f = PiecewiseBound::from_fn_2d(mx.clone(), my.clone(), "x", |x, _| Ok(x)).unwrap();
        let fx =
            PiecewiseBound::from_fn_2d(mx.clone(), my.clone(), "1", |_, _| Ok(Interval::ONE))
                .unwrap();
        for i in 0..2 {
            let r = vanishing_ratio_bound(&f, &fx, i, 0).unwrap();
            assert!(r.contains(1.0), "cell {i}: {r:?}");
        }
        // f(x,y) = x·y on [0.5,1]×[1,2]: f/x = y ∈ [1,2].
        let mx = Mesh1D::new(vec![0.5, 1.0]).unwrap();
        let f = PiecewiseBound::from_fn_2d(mx.clone(), my.clone(), "xy", |x, y| Ok(x * y)).unwrap();
        let fx = PiecewiseBound::from_fn_2d(mx, my, "y", |_, y| Ok(y)).unwrap();
        let r = vanishing_ratio_bound(&f, &fx, 0, 0).unwrap();
        assert!(r.contains(1.0) && r.contains(2.0), "{r:?}");
    }

    #[test]
    fn csv_roundtrip_shape() {
        let mesh = Mesh1D::uniform(0.0, 1.0, 2).unwrap();
        let b = PiecewiseBound::from_fn_1d(mesh, "q", |x| Ok(x)).unwrap();
        let mut buf = Vec::new();
        b.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "cell,lo,hi,label");
        assert!(lines[1].starts_with("0,") && lines[1].ends_with(",q"));
    }

    #[test]
    fn refinement_never_widens() {
        let mesh = Mesh1D::uniform(0.0, 3.0, 5).unwrap();
        let f = |x: Interval| Ok(x.sin() * x + x.powi(2)?);
        let coarse = PiecewiseBound::from_fn_1d(mesh.clone(), "g", f).unwrap();
        let fine = PiecewiseBound::from_fn_1d(mesh.halved(), "g", f).unwrap();
        for p in 0..=300 {
            let x = 3.0 * (p as f64) / 300.0;
            let c = coarse.at(x).unwrap();
            let fw = fine.at(x).unwrap();
            assert!(c.contains_interval(fw) || fw.width() <= c.width() + 1e-15);
        }
    }
}
