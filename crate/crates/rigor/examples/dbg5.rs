use rigor::interval::Interval;
use rigor::jet::Jet;
use rigor::quadrature::*;
use rigor::transport::*;
use std::time::Instant;

fn run(name: &str, f: &Integrand2, x: Interval, y: Interval) {
    let t0 = Instant::now();
    let r = integrate_2d(
        f,
        x,
        y,
        &QuadOptions {
            tol: 1e-4,
            max_panels: 100_000,
        },
    );
    match r {
        Ok(r) => eprintln!(
            "{name} x=[{},{}] y=[{},{}]: [{:.8},{:.8}] panels={} depth={} ({:.2?})",
            x.lo,
            x.hi,
            y.lo,
            y.hi,
            r.value.lo,
            r.value.hi,
            r.panels,
            r.max_depth,
            t0.elapsed()
        ),
        Err(e) => eprintln!("{name}: ERR {e} ({:.2?})", t0.elapsed()),
    }
}

fn main() {
    let t1 = 600f64.sqrt();
    let h_sq = 1e-8f64.sqrt();

    let iv = |y2: Interval, t: Interval| dbg_ig_cy_near(y2, t);
    let jet = |y2: Jet, t: Jet| dbg_ig_cy_near(y2, t);
    let f = Integrand2 { ival: &iv, jet_x: Some(&jet), jet_y: Some(&jet) };
    for (a, b) in [(0.0, 2.0), (2.0, 8.0), (8.0, t1)] {
        run("near", &f, Interval::new(0.0, 0.25), Interval::new(a, b));
    }

    let iv = |w: Interval, t: Interval| dbg_ig_cy_lowcorner(w, t);
    let jet = |w: Jet, t: Jet| dbg_ig_cy_lowcorner(w, t);
    let f = Integrand2 { ival: &iv, jet_x: Some(&jet), jet_y: Some(&jet) };
    for (a, b) in [(0.0, 2.0), (2.0, 8.0), (8.0, t1)] {
        run("lowcorner", &f, Interval::new(h_sq, 0.5), Interval::new(a, b));
    }

    let iv = |w: Interval, t: Interval| dbg_ig_cy_upcorner_below(w, t);
    let jet = |w: Jet, t: Jet| dbg_ig_cy_upcorner_below(w, t);
    let f = Integrand2 { ival: &iv, jet_x: Some(&jet), jet_y: Some(&jet) };
    run("upcorner_below", &f, Interval::new(h_sq, 0.5), Interval::new(0.0, 1.0));

    let iv = |w: Interval, x: Interval| dbg_ig_cy_upcorner_above(w, x);
    let jet = |w: Jet, x: Jet| dbg_ig_cy_upcorner_above(w, x);
    let f = Integrand2 { ival: &iv, jet_x: Some(&jet), jet_y: Some(&jet) };
    for (a, b) in [(0.0, 4.0), (4.0, 40.0), (40.0, 160.0), (160.0, 600.0)] {
        run("upcorner_above", &f, Interval::new(h_sq, 0.5), Interval::new(a, b));
    }

    let iv = |y2: Interval, t: Interval| dbg_ig_cy_mid_below(y2, t);
    let jet = |y2: Jet, t: Jet| dbg_ig_cy_mid_below(y2, t);
    let f = Integrand2 { ival: &iv, jet_x: Some(&jet), jet_y: Some(&jet) };
    run("mid_below", &f, Interval::new(0.75, 2.0), Interval::new(0.0, 1.0));
    for (a, b) in [(2.0, 8.0), (8.0, 32.0), (1024.0, 4096.0), (262144.0, 1048576.0)] {
        run("far_below", &f, Interval::new(a, b), Interval::new(0.0, 1.0));
    }

    let iv = |y2: Interval, x: Interval| dbg_ig_cy_mid_above(y2, x);
    let jet = |y2: Jet, x: Jet| dbg_ig_cy_mid_above(y2, x);
    let f = Integrand2 { ival: &iv, jet_x: Some(&jet), jet_y: Some(&jet) };
    for (a, b) in [(0.0, 4.0), (4.0, 40.0), (40.0, 160.0), (160.0, 600.0)] {
        run("mid_above", &f, Interval::new(0.75, 2.0), Interval::new(a, b));
    }
    for (a, b) in [(2.0, 8.0), (8.0, 32.0), (1024.0, 4096.0), (262144.0, 1048576.0)] {
        run("far_above", &f, Interval::new(a, b), Interval::new(0.0, 2.0));
    }
}
