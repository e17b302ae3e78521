use rigor::interval::Interval;
use rigor::jet::{Jet, Scalar};
use rigor::quadrature::*;
use rigor::transport::*;
use std::time::Instant;

fn main() {
    let s2d = Interval::new(0.1, 1.0);
    // 1. inner 1D over s2 at a few u points.
    for u in [0.01, 0.3, 2.0, 10.0, 39.0] {
        let t = Instant::now();
        let iv = move |s2: Interval| dbg_ig_ux_cx_hull(Interval::point(u), s2);
        let jet = move |s2: Jet| dbg_ig_ux_cx(Jet::con(Interval::point(u)), s2);
        let f = Integrand1 {
            ival: &iv,
            jet: Some(&jet),
            singular: Vec::new(),
        };
        let r = integrate_1d(&f, s2d, &QuadOptions::with_tol(2e-6));
        match r {
            Ok(r) => eprintln!(
                "inner@u={u}: [{:.6},{:.6}] panels={} ({:.2?})",
                r.value.lo,
                r.value.hi,
                r.panels,
                t.elapsed()
            ),
            Err(e) => eprintln!("inner@u={u}: ERR {e} ({:.2?})", t.elapsed()),
        }
    }
    // 2. jet-in-u (outer) at various u panels x s2 panels.
    for (ulo, uhi) in [(0.0, 40.0), (1.0, 2.0), (1.0, 1.25), (0.25, 0.5), (0.25, 0.3), (0.0, 0.1)] {
        for (slo, shi) in [(0.4, 0.5), (0.449, 0.451), (0.45, 0.45)] {
            let uj = Jet::var(Interval::new(ulo, uhi));
            let sj = Jet::con(Interval::new(slo, shi));
            match dbg_ig_ux_cx(uj, sj) {
                Ok(j) => eprintln!(
                    "jet u=[{ulo},{uhi}] s2=[{slo},{shi}]: f=[{:.3},{:.3}] d2=[{:.3},{:.3}]",
                    j.f.lo, j.f.hi, j.d2.lo, j.d2.hi
                ),
                Err(e) => eprintln!("jet u=[{ulo},{uhi}] s2=[{slo},{shi}]: ERR {e}"),
            }
        }
    }
    // 3. d2-equivalent: integrate jet-in-u d2 over s2.
    for (ulo, uhi) in [(0.0, 40.0), (20.0, 40.0), (1.0, 2.0), (0.0, 0.6)] {
        let t = Instant::now();
        let d2 = move |s2: Interval| {
            dbg_ig_ux_cx(Jet::var(Interval::new(ulo, uhi)), Jet::con(s2)).map(|j| j.d2)
        };
        let f = Integrand1::interval_only(&d2);
        let r = integrate_1d(&f, s2d, &QuadOptions { tol: 1.0, max_panels: 4096 });
        match r {
            Ok(r) => eprintln!(
                "d2 u=[{ulo},{uhi}]: [{:.3},{:.3}] panels={} ({:.2?})",
                r.value.lo,
                r.value.hi,
                r.panels,
                t.elapsed()
            ),
            Err(e) => eprintln!("d2 u=[{ulo},{uhi}]: ERR {e} ({:.2?})", t.elapsed()),
        }
    }
    // 4. the full block.
    let t = Instant::now();
    let iv = |s2: Interval, u: Interval| dbg_ig_ux_cx_hull(u, s2);
    let jet = |s2: Jet, u: Jet| dbg_ig_ux_cx(u, s2);
    let f = Integrand2 {
        ival: &iv,
        jet_x: Some(&jet),
        jet_y: Some(&jet),
    };
    let r = integrate_2d(
        &f,
        s2d,
        Interval::new(0.0, 40.0),
        &QuadOptions {
            tol: 2e-4,
            max_panels: 400_000,
        },
    );
    match r {
        Ok(r) => eprintln!(
            "block: [{:.6},{:.6}] panels={} depth={} ({:.2?})",
            r.value.lo,
            r.value.hi,
            r.panels,
            r.max_depth,
            t.elapsed()
        ),
        Err(e) => eprintln!("block: ERR {e} ({:.2?})", t.elapsed()),
    }
}
