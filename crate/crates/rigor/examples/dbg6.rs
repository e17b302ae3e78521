use rigor::interval::Interval;
use rigor::jet::Jet;
use rigor::quadrature::*;
use rigor::transport::*;
use std::time::Instant;

fn main() {
    for t in [0.01f64, 0.3, 0.7, 0.9, 1.0, 1.2, 2.0, 5.0, 20.0] {
        let t0 = Instant::now();
        let iv = move |y2: Interval| dbg_ig_cy_near(y2, Interval::point(t));
        let jet = move |y2: Jet| dbg_ig_cy_near(y2, Jet::con(Interval::point(t)));
        let f = Integrand1 {
            ival: &iv,
            jet: Some(&jet),
            singular: Vec::new(),
        };
        let r = integrate_1d(
            &f,
            Interval::new(0.0, 0.25),
            &QuadOptions {
                tol: 2e-5,
                max_panels: 1500,
            },
        );
        match r {
            Ok(r) => eprintln!(
                "inner@t={t}: [{:.8},{:.8}] w={:.2e} panels={} ({:.2?})",
                r.value.lo,
                r.value.hi,
                r.value.width(),
                r.panels,
                t0.elapsed()
            ),
            Err(e) => eprintln!("inner@t={t}: ERR {e} ({:.2?})", t0.elapsed()),
        }
    }
    // jet evaluations on sample boxes to see enclosure quality
    for (ylo, yhi) in [(0.0, 0.25), (0.1, 0.15), (0.124, 0.126), (0.125, 0.125)] {
        for t in [0.7f64, 1.0] {
            let yj = Jet::var(Interval::new(ylo, yhi));
            let tj = Jet::con(Interval::point(t));
            match dbg_ig_cy_near(yj, tj) {
                Ok(j) => eprintln!(
                    "jet y2=[{ylo},{yhi}] t={t}: f=[{:.5},{:.5}] d1=[{:.3},{:.3}] d2=[{:.3},{:.3}]",
                    j.f.lo, j.f.hi, j.d1.lo, j.d1.hi, j.d2.lo, j.d2.hi
                ),
                Err(e) => eprintln!("jet y2=[{ylo},{yhi}] t={t}: ERR {e}"),
            }
        }
    }
}
