//! Distance fields on polar lattices: exact shooting at the nodes, or a ring-lattice
//! Dijkstra used as an independent oracle.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::distance::{distance, DistanceError, DistanceOptions};
use crate::profiles::{Point, SurfaceMetric};
use crate::scalar::{wrap_pi, wrap_two_pi};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldMethod {
    Shooting,
    DijkstraOracle,
}

impl FieldMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            FieldMethod::Shooting => "shooting",
            FieldMethod::DijkstraOracle => "dijkstra-oracle",
        }
    }
}

/// Nodes at `θ_k = 2πk/n` on a circle of radius `r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ring {
    pub r: f64,
    pub values: Vec<f64>,
}

impl Ring {
    pub fn theta(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.values.len() as f64
    }

    /// Periodic Catmull-Rom interpolation in `θ`.
    fn interp(&self, theta: f64) -> f64 {
        let n = self.values.len();
        if n == 1 {
            return self.values[0];
        }
        let x = wrap_two_pi(theta) / (2.0 * PI) * n as f64;
        let i = x.floor() as isize;
        let u = x - i as f64;
        let at = |j: isize| self.values[j.rem_euclid(n as isize) as usize];
        let (p0, p1, p2, p3) = (at(i - 1), at(i), at(i + 1), at(i + 2));
        let u2 = u * u;
        let u3 = u2 * u;
        0.5 * (2.0 * p1 + (p2 - p0) * u + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * u2 + (3.0 * p1 - p0 - 3.0 * p2 + p3) * u3)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DistanceField {
    pub source: Point<f64>,
    pub method: FieldMethod,
    /// Rings in increasing `r`.
    pub rings: Vec<Ring>,
    /// Radial spacing of the rings.
    pub h_r: f64,
}

impl DistanceField {
    /// Field value at `p`: interpolated for a shooting field, and for the oracle the
    /// best node value plus the local segment length to `p`.
    pub fn value_at(&self, metric: &SurfaceMetric<f64>, p: Point<f64>) -> f64 {
        match self.method {
            FieldMethod::Shooting => self.interpolate(p),
            FieldMethod::DijkstraOracle => self.oracle_query(metric, p),
        }
    }

    fn interpolate(&self, p: Point<f64>) -> f64 {
        let m = self.rings.len();
        if m == 1 {
            return self.rings[0].interp(p.theta);
        }
        let r0 = self.rings[0].r;
        let x = ((p.r - r0) / self.h_r).clamp(0.0, (m - 1) as f64);
        let i = (x.floor() as usize).min(m - 2);
        let u = x - i as f64;
        let at = |j: isize| self.rings[j.clamp(0, m as isize - 1) as usize].interp(p.theta);
        let i = i as isize;
        let (p1, p2) = (at(i), at(i + 1));
        if i == 0 || i + 2 >= m as isize {
            return p1 + u * (p2 - p1);
        }
        let (p0, p3) = (at(i - 1), at(i + 2));
        let u2 = u * u;
        let u3 = u2 * u;
        0.5 * (2.0 * p1 + (p2 - p0) * u + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * u2 + (3.0 * p1 - p0 - 3.0 * p2 + p3) * u3)
    }

    fn oracle_query(&self, metric: &SurfaceMetric<f64>, p: Point<f64>) -> f64 {
        let reach = NEIGHBOUR_REACH * self.h_r;
        let mut best = f64::INFINITY;
        for ring in &self.rings {
            if (ring.r - p.r).abs() > reach {
                continue;
            }
            let n = ring.values.len();
            for k in angular_window(n, p.theta, reach, phi_lower(metric, ring.r, p.r)) {
                let th = ring.theta(k);
                let d = segment_length(metric, ring.r, th, p.r, p.theta);
                if d <= reach {
                    best = best.min(ring.values[k] + d);
                }
            }
        }
        best
    }

    /// CSV rows `r,theta,distance`.
    pub fn to_csv(&self) -> String {
        let mut s = format!(
            "# method={} source_r={} source_theta={}\nr,theta,distance\n",
            self.method.as_str(),
            self.source.r,
            self.source.theta
        );
        for ring in &self.rings {
            for (k, v) in ring.values.iter().enumerate() {
                s.push_str(&format!("{:.9},{:.9},{:.12}\n", ring.r, ring.theta(k), v));
            }
        }
        s
    }
}

/// Lattice of `n_r` rings on `[r0, r1]` with `n_theta` nodes each, filled by shooting.
/// Values at `θ_p ± Δ` are computed once.
pub fn shooting_field(
    metric: &SurfaceMetric<f64>,
    source: Point<f64>,
    r0: f64,
    r1: f64,
    n_r: usize,
    n_theta: usize,
    opts: &DistanceOptions,
) -> Result<DistanceField, DistanceError> {
    let n_r = n_r.max(2);
    let h_r = (r1 - r0) / (n_r - 1) as f64;
    let rs: Vec<f64> = (0..n_r).map(|i| r0 + h_r * i as f64).collect();
    let jobs: Vec<(usize, usize)> = (0..n_r).flat_map(|i| (0..n_theta).map(move |k| (i, k))).collect();
    let vals = jobs
        .par_iter()
        .map(|&(i, k)| {
            let th = 2.0 * PI * k as f64 / n_theta as f64;
            let q = Point::new(rs[i], th);
            // fold onto the upper half by reflection in the source meridian
            let d = wrap_pi(th - source.theta);
            let q = if d < 0.0 {
                Point::new(q.r, source.theta - d)
            } else {
                q
            };
            distance(metric, source, q, opts)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let rings = rs
        .iter()
        .enumerate()
        .map(|(i, &r)| Ring {
            r,
            values: vals[i * n_theta..(i + 1) * n_theta].to_vec(),
        })
        .collect();
    Ok(DistanceField {
        source,
        method: FieldMethod::Shooting,
        rings,
        h_r,
    })
}

/// Grid for the Dijkstra oracle: rings at spacing `h` up to `r_max`, with about
/// `2πφ(r)/h` nodes per ring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub h: f64,
    pub r_max: f64,
}

/// Edges join nodes whose straight-segment length is at most this many spacings.
const NEIGHBOUR_REACH: f64 = 4.5;

fn segment_length(metric: &SurfaceMetric<f64>, r1: f64, t1: f64, r2: f64, t2: f64) -> f64 {
    let prof = &metric.profile;
    let dr = r2 - r1;
    if prof.phi(r1) < 1e-12 || prof.phi(r2) < 1e-12 {
        // one end is a pole
        return dr.abs();
    }
    let dt = wrap_pi(t2 - t1);
    let phi = prof.phi(0.5 * (r1 + r2));
    (dr * dr + phi * phi * dt * dt).sqrt()
}

/// Node indices of an `n`-ring within `reach` of angle `theta`, given a lower bound
/// `phi_lo` for `φ` along the connecting segments.
fn angular_window(n: usize, theta: f64, reach: f64, phi_lo: f64) -> Vec<usize> {
    let width = reach / phi_lo.max(1e-12);
    if n == 1 || width >= PI {
        return (0..n).collect();
    }
    let step = 2.0 * PI / n as f64;
    let c = wrap_two_pi(theta) / step;
    let lo = (c - width / step).floor() as isize;
    let hi = (c + width / step).ceil() as isize;
    (lo..=hi).map(|j| j.rem_euclid(n as isize) as usize).collect()
}

fn phi_lower(metric: &SurfaceMetric<f64>, a: f64, b: f64) -> f64 {
    let prof = &metric.profile;
    prof.phi(a).min(prof.phi(b)).min(prof.phi(0.5 * (a + b)))
}

/// Ring-lattice Dijkstra from `source`. Edge weights are the metric length of the
/// coordinate segment by the midpoint rule, so values overestimate the distance.
pub fn dijkstra_oracle(metric: &SurfaceMetric<f64>, source: Point<f64>, grid: &GridSpec) -> DistanceField {
    let prof = &metric.profile;
    let h = grid.h;
    let r_top = grid.r_max.min(prof.far_pole().unwrap_or(prof.r_max()));
    let n_rings = (r_top / h).floor() as usize + 1;
    let mut rs: Vec<f64> = (0..n_rings).map(|i| i as f64 * h).collect();
    if let Some(rf) = prof.far_pole() {
        if grid.r_max >= rf && rf - rs[n_rings - 1] > 1e-12 {
            rs.push(rf);
        }
    }
    let counts: Vec<usize> = rs
        .iter()
        .map(|&r| {
            let phi = prof.phi(r);
            if phi < 1e-9 {
                1
            } else {
                ((2.0 * PI * phi / h).round() as usize).max(6)
            }
        })
        .collect();
    let mut offset = vec![0usize; rs.len() + 1];
    for i in 0..rs.len() {
        offset[i + 1] = offset[i] + counts[i];
    }
    let n_nodes = offset[rs.len()];
    let src = n_nodes;
    let reach = NEIGHBOUR_REACH * h;
    let node = |i: usize, k: usize| (rs[i], 2.0 * PI * k as f64 / counts[i] as f64);

    let neighbours = |i: usize, k: usize| -> Vec<(usize, f64)> {
        let (r, th) = node(i, k);
        let mut out = Vec::new();
        for j in 0..rs.len() {
            if (rs[j] - r).abs() > reach + 1e-12 {
                continue;
            }
            for m in angular_window(counts[j], th, reach, phi_lower(metric, rs[j], r)) {
                if j == i && m == k {
                    continue;
                }
                let (r2, t2) = node(j, m);
                let d = segment_length(metric, r, th, r2, t2);
                if d <= reach + 1e-12 {
                    out.push((offset[j] + m, d));
                }
            }
        }
        out
    };

    let adj: Vec<Vec<(usize, f64)>> = (0..rs.len())
        .into_par_iter()
        .flat_map_iter(|i| (0..counts[i]).map(move |k| (i, k)).collect::<Vec<_>>())
        .map(|(i, k)| neighbours(i, k))
        .collect();

    let mut dist = vec![f64::INFINITY; n_nodes + 1];
    dist[src] = 0.0;
    let mut heap = BinaryHeap::new();
    // the source connects to lattice nodes within reach
    for (i, &r) in rs.iter().enumerate() {
        if (r - source.r).abs() > reach {
            continue;
        }
        for k in angular_window(counts[i], source.theta, reach, phi_lower(metric, r, source.r)) {
            let (r2, t2) = node(i, k);
            let d = segment_length(metric, source.r, source.theta, r2, t2);
            if d <= reach {
                let id = offset[i] + k;
                if d < dist[id] {
                    dist[id] = d;
                    heap.push(Reverse((Ord64(d), id)));
                }
            }
        }
    }
    while let Some(Reverse((Ord64(d), u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((Ord64(nd), v)));
            }
        }
    }
    let rings = rs
        .iter()
        .enumerate()
        .map(|(i, &r)| Ring {
            r,
            values: dist[offset[i]..offset[i + 1]].to_vec(),
        })
        .collect();
    DistanceField {
        source,
        method: FieldMethod::DijkstraOracle,
        rings,
        h_r: h,
    }
}

#[derive(Debug, Clone, Copy)]
struct Ord64(f64);

impl PartialEq for Ord64 {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}

impl Eq for Ord64 {}

impl PartialOrd for Ord64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ord64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}
