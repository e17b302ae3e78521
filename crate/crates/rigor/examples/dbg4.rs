use rigor::interval::Interval;
use rigor::jet::Jet;
use rigor::quadrature::*;
use rigor::transport::*;
use std::time::Instant;

fn main() {
    for (ulo, uhi, slo, shi) in [
        (1.0, 1.25, 30000.0, 30000.0),
        (1.0, 1.25, 30000.0, 32000.0),
        (1.0, 1.25, 16384.0, 65536.0),
        (0.5, 4.0, 30000.0, 30000.0),
        (0.1, 0.2, 30000.0, 30000.0),
        (2.0, 2.1, 30000.0, 30000.0),
    ] {
        let uj = Jet::var(Interval::new(ulo, uhi));
        let sj = Jet::con(Interval::new(slo, shi));
        match dbg_ig_ux_cx(uj, sj) {
            Ok(j) => eprintln!(
                "jet u=[{ulo},{uhi}] s2=[{slo},{shi}]: f=[{:.3e},{:.3e}] d2=[{:.3e},{:.3e}]",
                j.f.lo, j.f.hi, j.d2.lo, j.d2.hi
            ),
            Err(e) => eprintln!("jet u=[{ulo},{uhi}] s2=[{slo},{shi}]: ERR {e}"),
        }
    }
    // time a single inner s2-quad at point u
    for u in [0.3, 1.0, 2.0] {
        let t = Instant::now();
        let iv = move |s2: Interval| dbg_ig_ux_cx_hull(Interval::point(u), s2);
        let jet = move |s2: Jet| dbg_ig_ux_cx(Jet::con(Interval::point(u)), s2);
        let f = Integrand1 { ival: &iv, jet: Some(&jet), singular: Vec::new() };
        let r = integrate_1d(&f, Interval::new(16384.0, 65536.0), &QuadOptions::with_tol(2e-8));
        match r {
            Ok(r) => eprintln!("inner@u={u}: [{:.3e},{:.3e}] panels={} ({:.2?})", r.value.lo, r.value.hi, r.panels, t.elapsed()),
            Err(e) => eprintln!("inner@u={u}: ERR {e} ({:.2?})", t.elapsed()),
        }
    }
}
