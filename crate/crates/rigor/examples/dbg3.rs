use rigor::interval::Interval;
use rigor::jet::Jet;
use rigor::quadrature::*;
use rigor::transport::*;
use std::time::Instant;

fn main() {
    let opt = QuadOptions { tol: 2e-4, max_panels: 400_000 };
    let iv = |s2: Interval, u: Interval| dbg_ig_ux_cx_hull(u, s2);
    let jet = |s2: Jet, u: Jet| dbg_ig_ux_cx(u, s2);
    let f = Integrand2 { ival: &iv, jet_x: Some(&jet), jet_y: Some(&jet) };
    for (slo, shi, ulo, uhi) in [
        (0.1, 1.0, 0.0, 4.0),
        (0.1, 1.0, 4.0, 40.0),
        (0.01, 0.1, 0.0, 4.0),
        (0.01, 0.1, 4.0, 40.0),
        (0.01, 0.1, 40.0, 160.0),
        (1e-6, 1e-5, 0.0, 4.0),
        (1e-6, 1e-5, 160.0, 640.0),
        (1.0, 4.0, 0.0, 4.0),
        (4.0, 16.0, 0.0, 4.0),
        (16384.0, 65536.0, 0.0, 4.0),
    ] {
        let t = Instant::now();
        let r = integrate_2d(&f, Interval::new(slo, shi), Interval::new(ulo, uhi), &opt);
        match r {
            Ok(r) => eprintln!(
                "s2=[{slo},{shi}] u=[{ulo},{uhi}]: [{:.6},{:.6}] panels={} ({:.2?})",
                r.value.lo, r.value.hi, r.panels, t.elapsed()
            ),
            Err(e) => eprintln!("s2=[{slo},{shi}] u=[{ulo},{uhi}]: ERR {e} ({:.2?})", t.elapsed()),
        }
    }
}
