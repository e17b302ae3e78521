use rigor::transport::*;
use std::time::Instant;

fn show(name: &str, v: Result<rigor::interval::Interval, TransportError>, t: Instant) {
    match v {
        Ok(i) => eprintln!("{name}: [{:.6}, {:.6}]  ({:.2?})", i.lo, i.hi, t.elapsed()),
        Err(e) => eprintln!("{name}: ERROR {e}  ({:.2?})", t.elapsed()),
    }
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(|s| s.as_str()).unwrap_or("all");
    if which == "c1small" || which == "all" {
        let t = Instant::now();
        show("C1(1e-8)", sharp_constant_ux_cx(1e-8), t);
        let t = Instant::now();
        show("C1(1e-3)", sharp_constant_ux_cx(1e-3), t);
    }
    if which == "c1" || which == "all" {
        let t = Instant::now();
        show("C1(1)", sharp_constant_ux_cx(1.0), t);
        let t = Instant::now();
        show("C1(inf)", sharp_constant_ux_cx(f64::INFINITY), t);
    }
    if which == "c2" || which == "all" {
        let t = Instant::now();
        show("C2(1)", sharp_constant_ux_cy(1.0), t);
        let t = Instant::now();
        show("C2(inf)", sharp_constant_ux_cy(f64::INFINITY), t);
    }
}
