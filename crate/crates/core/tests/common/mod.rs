//! Closed-form oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Sector factor of the flat cone with angle deficit parameter `delta`.
pub fn cone_beta(delta: f64) -> f64 {
    0.5 * (1.0 - delta)
}

/// Distance on the flat cone `dr² + (βr)² dθ²` with `β ≤ 1/2`: develop onto the plane
/// and take the chord for the shorter way around.
pub fn cone_distance(beta: f64, r1: f64, t1: f64, r2: f64, t2: f64) -> f64 {
    let d = (t1 - t2).rem_euclid(2.0 * PI);
    let d = d.min(2.0 * PI - d);
    (r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * (beta * d).cos()).max(0.0).sqrt()
}

/// Great-circle distance on the unit sphere with `r` the colatitude.
pub fn sphere_distance(r1: f64, t1: f64, r2: f64, t2: f64) -> f64 {
    let c = r1.cos() * r2.cos() + r1.sin() * r2.sin() * (t1 - t2).cos();
    c.clamp(-1.0, 1.0).acos()
}

/// Dense scan followed by golden section: minimum of `f` on `[a, b]`.
pub fn minimize(f: impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let n = 2000;
    let mut best = (a, f(a));
    for i in 0..=n {
        let x = a + (b - a) * i as f64 / n as f64;
        let v = f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    let h = (b - a) / n as f64;
    let (mut lo, mut hi) = ((best.0 - h).max(a), (best.0 + h).min(b));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    while hi - lo > 1e-12 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if f(x1) <= f(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Cut-decay radius of the flat cone at radius `r`: the cut locus of `x` is the ray
/// opposite `x`, so minimize `max(d(p, x), d(p, y))` over `x = (s, α)` and
/// `y = (ρ, α + π)`. The optimum is symmetric about `p`'s meridian, with `x` and `y`
/// at equal radius.
pub fn cone_decay_radius(beta: f64, r: f64) -> f64 {
    let obj = |s: f64, a: f64| {
        cone_distance(beta, r, 0.0, s, a).max(cone_distance(beta, r, 0.0, s, a + PI))
    };
    let mut best = f64::INFINITY;
    for i in 0..=200 {
        let a = PI * i as f64 / 200.0;
        let (_, v) = minimize(|s| obj(s, a), 0.0, 2.0 * r);
        best = best.min(v);
    }
    // refine the angle around the symmetric configuration
    let (_, v) = minimize(|a| minimize(|s| obj(s, a), 0.0, 2.0 * r).1, 0.0, PI);
    best.min(v)
}
