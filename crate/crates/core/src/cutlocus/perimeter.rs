//! Minimizer of the perimeter function `P(y) = d(p, y) + d(y, q) + d(p, q)` over
//! `Cut(q)` and the structure of the minimal geodesics meeting there.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::cut::{cut_locus, cut_time, CutOptions};
use super::distance::{distance, minimal_geodesics, Connection, Connections, DistanceError, DistanceOptions};
use crate::profiles::{Point, SurfaceMetric};
use crate::radii::{golden_min, DEFAULT_HORIZON};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PerimeterError {
    #[error(transparent)]
    Distance(#[from] DistanceError),
    #[error("no cut points within the horizon {horizon}")]
    EmptyCutLocus { horizon: f64 },
}

/// How the minimal geodesics from `p` (the β's) and from `q` (the α's) meet at `x0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PerimeterCase {
    /// One β, reversing a non-conjugate α.
    OneToOne,
    /// One β and two α's; β reverses the second α.
    OneToTwo,
    /// Two β's and two α's, pairwise reversed.
    TwoToTwo,
    /// Every minimal geodesic from `q` to `x0` ends at a conjugate point.
    TotallyConjugate,
    /// None of the above held within tolerance.
    Unclassified,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerimeterOptions {
    pub n_psi: usize,
    pub psi_tol: f64,
    pub horizon: f64,
    /// Tolerance on `|u_β + u_α|` for unit terminal tangents.
    pub align_tol: f64,
    /// `|J(end)|` below this marks a conjugate endpoint.
    pub conj_tol: f64,
}

impl Default for PerimeterOptions {
    fn default() -> Self {
        Self {
            n_psi: 128,
            psi_tol: 1e-6,
            horizon: DEFAULT_HORIZON,
            align_tol: 1e-4,
            conj_tol: 1e-5,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PerimeterResult {
    pub p: Point<f64>,
    pub q: Point<f64>,
    pub x0: Point<f64>,
    /// Launch angle from `q` of the cut geodesic through `x0`.
    pub psi: f64,
    pub value: f64,
    /// Minimal geodesics `p → x0`.
    pub from_p: Connections,
    /// Minimal geodesics `q → x0`.
    pub from_q: Connections,
    pub case: PerimeterCase,
    /// Some β reverses some α (for a continuum of α's, one can always be chosen).
    pub alignment_holds: bool,
    /// `p = x0`, where the structure statement is empty.
    pub p_is_x0: bool,
    /// Smallest `P` over the raw samples.
    pub sampled_min: f64,
}

fn reversed(b: &Connection, a: &Connection, tol: f64) -> bool {
    (b.tangent[0] + a.tangent[0]).hypot(b.tangent[1] + a.tangent[1]) <= tol
}

fn classify(betas: &Connections, alphas: &Connections, opts: &PerimeterOptions) -> (PerimeterCase, bool) {
    let tol = opts.align_tol;
    let conj = |a: &Connection| alphas.continuum || a.j_end.abs() < opts.conj_tol;
    let any_aligned = alphas.continuum || betas.minimal.iter().any(|b| alphas.minimal.iter().any(|a| reversed(b, a, tol)));
    if alphas.minimal.iter().all(conj) {
        return (PerimeterCase::TotallyConjugate, any_aligned);
    }
    let (nb, na) = (betas.minimal.len(), alphas.minimal.len());
    let case = match (nb, na) {
        (1, 1) if reversed(&betas.minimal[0], &alphas.minimal[0], tol) => PerimeterCase::OneToOne,
        (1, 2) => {
            let b = &betas.minimal[0];
            let hits: Vec<bool> = alphas.minimal.iter().map(|a| reversed(b, a, tol)).collect();
            match (hits[0], hits[1]) {
                (true, true) => PerimeterCase::Unclassified,
                // the aligned α is α₁ when it qualifies, otherwise the other one is
                (true, false) if !conj(&alphas.minimal[0]) => PerimeterCase::OneToOne,
                (false, true) if !conj(&alphas.minimal[1]) => PerimeterCase::OneToOne,
                (true, false) | (false, true) => PerimeterCase::OneToTwo,
                _ => PerimeterCase::Unclassified,
            }
        }
        (2, 2) => {
            let (b, a) = (&betas.minimal, &alphas.minimal);
            let straight = reversed(&b[0], &a[0], tol) && reversed(&b[1], &a[1], tol);
            let crossed = reversed(&b[0], &a[1], tol) && reversed(&b[1], &a[0], tol);
            if straight || crossed {
                PerimeterCase::TwoToTwo
            } else {
                PerimeterCase::Unclassified
            }
        }
        _ => PerimeterCase::Unclassified,
    };
    (case, any_aligned)
}

pub fn minimize_perimeter(
    metric: &SurfaceMetric<f64>,
    p: Point<f64>,
    q: Point<f64>,
    opts: &PerimeterOptions,
) -> Result<PerimeterResult, PerimeterError> {
    let copts = CutOptions::default().with_horizon(opts.horizon);
    let dopts = DistanceOptions {
        horizon: opts.horizon.max(DEFAULT_HORIZON),
        ..DistanceOptions::default()
    };
    let d_pq = distance(metric, p, q, &dopts)?;
    let samples = cut_locus(metric, q, opts.n_psi, &copts)?;
    let perim = samples
        .par_iter()
        .map(|c| match c.t_cut.value() {
            Some(t) => Ok(distance(metric, p, c.endpoint, &dopts)? + t + d_pq),
            None => Ok(f64::INFINITY),
        })
        .collect::<Result<Vec<_>, DistanceError>>()?;
    let (i, sampled_min) = perim
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |b, (i, v)| if v < b.1 { (i, v) } else { b });
    if !sampled_min.is_finite() {
        return Err(PerimeterError::EmptyCutLocus {
            horizon: opts.horizon,
        });
    }
    let step = 2.0 * PI / opts.n_psi as f64;
    let psi0 = samples[i].psi;
    let pval = |psi: f64| -> Result<f64, DistanceError> {
        let c = cut_time(metric, q, psi, &copts)?;
        match c.t_cut.value() {
            Some(t) => Ok(distance(metric, p, c.endpoint, &dopts)? + t + d_pq),
            None => Ok(f64::INFINITY),
        }
    };
    let (mut psi, mut value) = golden_min(pval, psi0 - step, psi0 + step, opts.psi_tol)?;
    if sampled_min <= value {
        psi = psi0;
        value = sampled_min;
    }
    let c = cut_time(metric, q, psi, &copts)?;
    let x0 = c.endpoint;
    let from_p = minimal_geodesics(metric, p, x0, &dopts)?;
    let from_q = minimal_geodesics(metric, q, x0, &dopts)?;
    let p_is_x0 = from_p.distance < 1e-9;
    let (case, alignment_holds) = classify(&from_p, &from_q, opts);
    Ok(PerimeterResult {
        p,
        q,
        x0,
        psi,
        value,
        from_p,
        from_q,
        case,
        alignment_holds,
        p_is_x0,
        sampled_min,
    })
}

/// Nearest cut point `z` of `p` and the minimal geodesics `p → z`.
#[derive(Debug, Clone, Serialize)]
pub struct NearestCut {
    pub z: Point<f64>,
    pub distance: f64,
    pub geodesics: Connections,
    /// `z` is conjugate along some minimal geodesic.
    pub conjugate: bool,
    /// Exactly two minimal geodesics whose terminal tangents are opposite, so they
    /// join into a geodesic loop at `p`.
    pub loop_closes: bool,
}

/// Locate the nearest cut point of `p` over `n_psi` launch angles (refined by golden
/// section) and test whether the two minimal geodesics to it close into a loop.
pub fn nearest_cut_point(
    metric: &SurfaceMetric<f64>,
    p: Point<f64>,
    n_psi: usize,
    opts: &PerimeterOptions,
) -> Result<NearestCut, PerimeterError> {
    let copts = CutOptions::default().with_horizon(opts.horizon);
    let samples = cut_locus(metric, p, n_psi, &copts)?;
    let (i, t) = samples
        .iter()
        .enumerate()
        .map(|(i, c)| (i, c.t_cut.or_inf()))
        .fold((0, f64::INFINITY), |b, x| if x.1 < b.1 { x } else { b });
    if !t.is_finite() {
        return Err(PerimeterError::EmptyCutLocus {
            horizon: opts.horizon,
        });
    }
    let step = 2.0 * PI / n_psi as f64;
    let psi0 = samples[i].psi;
    let (psi, _) = golden_min(
        |psi| cut_time(metric, p, psi, &copts).map(|c| c.t_cut.or_inf()),
        psi0 - step,
        psi0 + step,
        opts.psi_tol,
    )?;
    let c = cut_time(metric, p, psi, &copts)?;
    let z = c.endpoint;
    let dopts = DistanceOptions {
        horizon: opts.horizon.max(DEFAULT_HORIZON),
        ..DistanceOptions::default()
    };
    let geodesics = minimal_geodesics(metric, p, z, &dopts)?;
    let conjugate = geodesics.continuum || geodesics.minimal.iter().any(|g| g.j_end.abs() < opts.conj_tol);
    let loop_closes = geodesics.minimal.len() == 2
        && reversed(&geodesics.minimal[0], &geodesics.minimal[1], opts.align_tol);
    Ok(NearestCut {
        z,
        distance: geodesics.distance,
        geodesics,
        conjugate,
        loop_closes,
    })
}
