//! Curvature-prescribed transition between the spherical cap and the hyperbolic end.
//!
//! On the glue interval `[a, b]` the profile solves `φ'' = -K φ` with
//! `K(x) = 1 - 2 S(x) - A1 B1(x) - A2 B2(x)`, `x = (r - a)/(b - a)`, where `S` is the
//! quintic smoothstep and `B1`, `B2` are unit-height bumps peaking at `x = 1/3` and
//! `x = 2/3`. The amplitudes are fixed by a 2-D Newton solve so that `φ` and `φ'`
//! land on `sinh(r - r2)` and `cosh(r - r2)` at `b`.

use super::ProfileError;

/// Table spacing of the Hermite glue table.
pub const TABLE_STEP: f64 = 2.5e-5;
const SUBSTEPS: usize = 16;
const MATCH_TOL: f64 = 1e-8;
const BUMP_PEAK: f64 = 64.0 / 19683.0;

#[derive(Debug, Clone)]
pub struct GlueSolution {
    pub a: f64,
    pub b: f64,
    pub r2: f64,
    pub amplitudes: [f64; 2],
    pub residual: [f64; 2],
    /// Nodes `(r, φ, φ', φ'')` at uniform spacing covering `[a, b]`.
    pub nodes: Vec<[f64; 4]>,
}

fn smoothstep(x: f64) -> f64 {
    x * x * x * (10.0 + x * (-15.0 + 6.0 * x))
}

fn bumps(x: f64) -> [f64; 2] {
    let y = 1.0 - x;
    let x3 = x * x * x;
    let y3 = y * y * y;
    [x3 * y3 * y3 / BUMP_PEAK, x3 * x3 * y3 / BUMP_PEAK]
}

/// Prescribed curvature on the glue interval, `x` in `[0, 1]`.
pub fn glue_curvature(x: f64, amplitudes: [f64; 2]) -> f64 {
    let [b1, b2] = bumps(x);
    1.0 - 2.0 * smoothstep(x) - amplitudes[0] * b1 - amplitudes[1] * b2
}

/// State: φ, φ', ∂φ/∂A1, ∂φ'/∂A1, ∂φ/∂A2, ∂φ'/∂A2.
fn rhs(x: f64, y: &[f64; 6], amp: [f64; 2]) -> [f64; 6] {
    let k = glue_curvature(x, amp);
    let [b1, b2] = bumps(x);
    [
        y[1],
        -k * y[0],
        y[3],
        -k * y[2] + b1 * y[0],
        y[5],
        -k * y[4] + b2 * y[0],
    ]
}

fn rk4_step(x: f64, y: &[f64; 6], h: f64, amp: [f64; 2], width: f64) -> [f64; 6] {
    let dx = h / width;
    let add = |y: &[f64; 6], k: &[f64; 6], s: f64| {
        let mut out = *y;
        for i in 0..6 {
            out[i] += s * k[i];
        }
        out
    };
    let k1 = rhs(x, y, amp);
    let k2 = rhs(x + 0.5 * dx, &add(y, &k1, 0.5 * h), amp);
    let k3 = rhs(x + 0.5 * dx, &add(y, &k2, 0.5 * h), amp);
    let k4 = rhs(x + dx, &add(y, &k3, h), amp);
    let mut out = *y;
    for i in 0..6 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Integrate across the glue; optionally collect table nodes.
fn sweep(a: f64, b: f64, amp: [f64; 2], nodes: Option<&mut Vec<[f64; 4]>>) -> [f64; 6] {
    let width = b - a;
    let n = (width / TABLE_STEP).ceil().max(1.0) as usize;
    let h_node = width / n as f64;
    let h = h_node / SUBSTEPS as f64;
    let mut y = [a.sin(), a.cos(), 0.0, 0.0, 0.0, 0.0];
    let mut out = nodes;
    let push = |out: &mut Option<&mut Vec<[f64; 4]>>, r: f64, y: &[f64; 6]| {
        if let Some(v) = out.as_deref_mut() {
            let k = glue_curvature(((r - a) / width).clamp(0.0, 1.0), amp);
            v.push([r, y[0], y[1], -k * y[0]]);
        }
    };
    push(&mut out, a, &y);
    for i in 0..n {
        for j in 0..SUBSTEPS {
            let r = a + i as f64 * h_node + j as f64 * h;
            y = rk4_step((r - a) / width, &y, h, amp, width);
        }
        let r = if i + 1 == n { b } else { a + (i + 1) as f64 * h_node };
        push(&mut out, r, &y);
    }
    y
}

/// Solve for the glue amplitudes between `a = r1 - ε` and `b = r1 + ε`.
pub fn solve_glue(r1: f64, epsilon: f64) -> Result<GlueSolution, ProfileError> {
    let a = r1 - epsilon;
    let b = r1 + epsilon;
    let r2 = r1 - r1.sin().asinh();
    let target = [(b - r2).sinh(), (b - r2).cosh()];

    let residual_of = |amp: [f64; 2]| {
        let y = sweep(a, b, amp, None);
        ([y[0] - target[0], y[1] - target[1]], y)
    };

    let mut amp = [0.0, 0.0];
    let (mut res, mut y) = residual_of(amp);
    let norm = |r: &[f64; 2]| r[0].hypot(r[1]);
    for _ in 0..60 {
        if norm(&res) < MATCH_TOL * 0.01 {
            break;
        }
        // Jacobian from the variational columns
        let (j11, j12, j21, j22) = (y[2], y[4], y[3], y[5]);
        let det = j11 * j22 - j12 * j21;
        if det.abs() < 1e-300 {
            break;
        }
        let d0 = (j22 * res[0] - j12 * res[1]) / det;
        let d1 = (-j21 * res[0] + j11 * res[1]) / det;
        let mut lambda = 1.0;
        loop {
            let trial = [amp[0] - lambda * d0, amp[1] - lambda * d1];
            let (r_trial, y_trial) = residual_of(trial);
            if norm(&r_trial) < norm(&res) || lambda < 1e-6 {
                amp = trial;
                res = r_trial;
                y = y_trial;
                break;
            }
            lambda *= 0.5;
        }
    }
    if !(norm(&res) < MATCH_TOL) {
        return Err(ProfileError::GlueNotConverged {
            residual: res,
            amplitudes: amp,
        });
    }
    let mut nodes = Vec::new();
    sweep(a, b, amp, Some(&mut nodes));
    Ok(GlueSolution {
        a,
        b,
        r2,
        amplitudes: amp,
        residual: res,
        nodes,
    })
}

/// Quintic Hermite evaluation on a uniform node table: returns (φ, φ', φ'').
pub fn hermite5(nodes: &[[f64; 4]], r: f64) -> (f64, f64, f64) {
    let n = nodes.len() - 1;
    let a = nodes[0][0];
    let b = nodes[n][0];
    let h = (b - a) / n as f64;
    let i = (((r - a) / h).floor() as isize).clamp(0, n as isize - 1) as usize;
    let [r0, f0, d0, s0] = nodes[i];
    let [_, f1, d1, s1] = nodes[i + 1];
    let t = (r - r0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    let h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    let h2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
    let h3 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    let h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    let h5 = 0.5 * t3 - t4 + 0.5 * t5;
    let g0 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
    let g1 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
    let g2 = t - 4.5 * t2 + 6.0 * t3 - 2.5 * t4;
    let g3 = -g0;
    let g4 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
    let g5 = 1.5 * t2 - 4.0 * t3 + 2.5 * t4;
    let q0 = -60.0 * t + 180.0 * t2 - 120.0 * t3;
    let q1 = -36.0 * t + 96.0 * t2 - 60.0 * t3;
    let q2 = 1.0 - 9.0 * t + 18.0 * t2 - 10.0 * t3;
    let q3 = -q0;
    let q4 = -24.0 * t + 84.0 * t2 - 60.0 * t3;
    let q5 = 3.0 * t - 12.0 * t2 + 10.0 * t3;
    let f = f0 * h0 + h * d0 * h1 + h * h * s0 * h2 + f1 * h3 + h * d1 * h4 + h * h * s1 * h5;
    let df = (f0 * g0 + f1 * g3) / h + d0 * g1 + d1 * g4 + h * (s0 * g2 + s1 * g5);
    let ddf = (f0 * q0 + f1 * q3) / (h * h) + (d0 * q1 + d1 * q4) / h + s0 * q2 + s1 * q5;
    (f, df, ddf)
}
