use rigor::interval::Interval;
use rigor::jet::Jet;
use rigor::quadrature::*;
use rigor::transport::*;
use std::time::Instant;

fn main() {
    let opt = QuadOptions {
        tol: 2e-4,
        max_panels: 400_000,
    };
    let mut lo = 1e-6f64;
    let top = 1e-3f64;
    while lo < top {
        let hi = (lo * 10.0).min(top);
        let s2 = Interval::new(lo, hi);
        let mut blocks = vec![(0.0f64, 4.0f64)];
        let mut ulo = 4.0f64;
        let mut uhi = 40.0f64;
        loop {
            blocks.push((ulo, uhi));
            if uhi * lo >= 60.0 {
                break;
            }
            ulo = uhi;
            uhi *= 4.0;
        }
        for (ulo, uhi) in blocks {
            let t0 = Instant::now();
            let iv = |s2: Interval, u: Interval| dbg_ig_ux_cx_hull(u, s2);
            let jet = |s2: Jet, u: Jet| dbg_ig_ux_cx(u, s2);
            let f = Integrand2 {
                ival: &iv,
                jet_x: Some(&jet),
                jet_y: Some(&jet),
            };
            let r = integrate_2d(&f, s2, Interval::new(ulo, uhi), &opt);
            match r {
                Ok(r) => eprintln!(
                    "s2=[{lo:.0e},{hi:.0e}] u=[{ulo},{uhi}]: [{:.3e},{:.3e}] panels={} ({:.2?})",
                    r.value.lo,
                    r.value.hi,
                    r.panels,
                    t0.elapsed()
                ),
                Err(e) => eprintln!(
                    "s2=[{lo:.0e},{hi:.0e}] u=[{ulo},{uhi}]: ERR {e} ({:.2?})",
                    t0.elapsed()
                ),
            }
        }
        lo = hi;
    }
}
