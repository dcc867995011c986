//! Checkable forms of the inequalities between the radius functions, evaluated on
//! sampled points, plus end-to-end reproductions on the glued Gulliver metric and the
//! flat cone.
//!
//! Every check yields a [`VerificationRecord`]. Radii beyond the horizon take part in
//! comparisons as "at least the horizon"; a comparison with both sides beyond the
//! horizon is a vacuous pass and is flagged as such.

mod checks;
mod examples;
mod sample;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cutlocus::{DistanceError, PerimeterError};
use crate::odes::OdeError;
use crate::profiles::{Point, ProfileError, ProfileKind, SurfaceMetric};
use crate::radii::{Radius, ReportOptions};

pub use checks::{
    concentric_radii, conjugate_cut_bound, convexity_bound, global_convexity, half_conjugate, injectivity_decay,
    loop_structure, perimeter_structure, radius_ordering, short_geodesics,
};
pub use examples::{
    cone_sharpness, focal_discontinuity, reproduce_gulliver_discontinuity, verify_cone_sharpness, ConeSharpness,
    DiscontinuityOptions, DiscontinuityReport, SweepPoint,
};
pub use sample::{sample_points, sample_radii, PointData};

#[derive(Debug, Error)]
pub enum TheoremError {
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Distance(#[from] DistanceError),
    #[error(transparent)]
    Perimeter(#[from] PerimeterError),
    #[error("{0}")]
    Precondition(String),
    #[error("suite {suite} needs a {needs} profile, got {got}")]
    WrongProfile {
        suite: Claim,
        needs: ProfileKind,
        got: ProfileKind,
    },
    #[error("no finite focal radius on [0, {r_top}]")]
    NoFiniteFocus { r_top: f64, sweep: Vec<SweepPoint> },
}

/// The statement a record checks, by role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Claim {
    /// `conv(p) ≥ min{foc(B_inj(p)), ½ inj(p)}`, read as bounds on `R_c` and `conv_lower`.
    ConvexityBound,
    /// `inj(q) ≥ min{inj(p), conj(q)} - d(p, q)`, and 1-Lipschitz `inj` without
    /// conjugate points.
    InjectivityDecay,
    /// Geodesics inside `B_r(p)` have length at most `2r`.
    ShortGeodesics,
    /// `conv_ct(p) ≥ min{foc_e(p), ½ inj(p), ½ conj_t(U)}`.
    ConjugateCutBound,
    /// `conv(M) = min{foc(M), ½ inj(M)}` on sampled infima.
    GlobalConvexity,
    /// `conv_ct = min(foc_e, R_c)` and `conv_lower ≤ conv_upper`.
    ConcentricRadii,
    /// `foc ≤ foc_e ≤ conj`.
    RadiusOrdering,
    /// `foc_e(z_i) → foc(z)` at the focal discontinuity.
    FocalLimit,
    /// `foc(M) ≤ ½ conj(M)` on sampled infima.
    HalfConjugate,
    /// Nearest cut points and perimeter minimizers: counts and alignment of the
    /// minimal geodesics.
    LoopStructure,
    /// The glued metric: no conjugate points, a finite focal plateau and the jump of
    /// `conv_ct`.
    FocalDiscontinuity,
    /// The flat cone: `inj = r cos(δπ/2)` and the Lipschitz ratio.
    ConeSharpness,
}

impl Claim {
    pub const ALL: [Claim; 12] = [
        Claim::ConvexityBound,
        Claim::InjectivityDecay,
        Claim::ShortGeodesics,
        Claim::ConjugateCutBound,
        Claim::GlobalConvexity,
        Claim::ConcentricRadii,
        Claim::RadiusOrdering,
        Claim::FocalLimit,
        Claim::HalfConjugate,
        Claim::LoopStructure,
        Claim::FocalDiscontinuity,
        Claim::ConeSharpness,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Claim::ConvexityBound => "convexity-bound",
            Claim::InjectivityDecay => "injectivity-decay",
            Claim::ShortGeodesics => "short-geodesics",
            Claim::ConjugateCutBound => "conjugate-cut-bound",
            Claim::GlobalConvexity => "global-convexity",
            Claim::ConcentricRadii => "concentric-radii",
            Claim::RadiusOrdering => "radius-ordering",
            Claim::FocalLimit => "focal-limit",
            Claim::HalfConjugate => "half-conjugate",
            Claim::LoopStructure => "loop-structure",
            Claim::FocalDiscontinuity => "focal-discontinuity",
            Claim::ConeSharpness => "cone-sharpness",
        }
    }

    /// Profile kind a suite is tied to, if any.
    pub fn required_kind(&self) -> Option<ProfileKind> {
        match self {
            Claim::FocalLimit | Claim::FocalDiscontinuity => Some(ProfileKind::Gulliver),
            Claim::ConeSharpness => Some(ProfileKind::Cone),
            _ => None,
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Claim {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Claim::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

/// A suite selection: one claim or all of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    One(Claim),
    All,
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "all" {
            Ok(Suite::All)
        } else {
            s.parse().map(Suite::One)
        }
    }
}

/// A side of a comparison, with where it came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quantity {
    pub label: String,
    pub value: Radius,
    pub source: String,
}

impl Quantity {
    pub fn new(label: impl Into<String>, value: Radius, source: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            value,
            source: source.into(),
        }
    }

    pub fn exact(label: impl Into<String>, value: f64) -> Self {
        Self::new(label, Radius::Finite(value), "closed form")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The check's hypothesis does not hold at this sample.
    NotApplicable,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Flags {
    /// Both sides beyond the horizon: nothing was tested.
    pub vacuous: bool,
    /// A side was only known to exceed the horizon.
    pub horizon_limited: bool,
    pub best_effort: bool,
    /// Infima over the surface replaced by minima over samples.
    pub sampled_infimum: bool,
    pub precondition_violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationRecord {
    pub claim: Claim,
    /// What exactly was compared.
    pub check: String,
    pub profile: String,
    pub points: Vec<Point<f64>>,
    pub lhs: Quantity,
    pub rhs: Quantity,
    /// `lhs - rhs` for inequalities, `-|lhs - rhs|` for identities. With a side beyond
    /// the horizon it is the bound obtained by putting the horizon in its place.
    pub slack: Option<f64>,
    pub verdict: Verdict,
    pub tolerance: f64,
    pub flags: Flags,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// How a record relates its two sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    AtLeast,
    Equal,
}

impl VerificationRecord {
    /// Compare `lhs` with `rhs`; passes iff `slack ≥ -tolerance`.
    pub fn compare(
        claim: Claim,
        check: impl Into<String>,
        metric: &SurfaceMetric<f64>,
        points: Vec<Point<f64>>,
        lhs: Quantity,
        relation: Relation,
        rhs: Quantity,
        tolerance: f64,
    ) -> Self {
        let mut flags = Flags::default();
        let slack = match (lhs.value, rhs.value) {
            (Radius::Finite(a), Radius::Finite(b)) => Some(match relation {
                Relation::AtLeast => a - b,
                Relation::Equal => -(a - b).abs(),
            }),
            (Radius::BeyondHorizon { .. }, Radius::BeyondHorizon { .. }) => {
                flags.vacuous = true;
                flags.horizon_limited = true;
                None
            }
            (Radius::BeyondHorizon { beyond_horizon: h }, Radius::Finite(b)) => {
                flags.horizon_limited = true;
                Some(match relation {
                    Relation::AtLeast => h - b,
                    Relation::Equal => (b - h).min(0.0),
                })
            }
            (Radius::Finite(a), Radius::BeyondHorizon { beyond_horizon: h }) => {
                flags.horizon_limited = true;
                Some(match relation {
                    Relation::AtLeast => a - h,
                    Relation::Equal => (a - h).min(0.0),
                })
            }
        };
        let verdict = match slack {
            Some(s) if s < -tolerance => Verdict::Fail,
            _ => Verdict::Pass,
        };
        Self {
            claim,
            check: check.into(),
            profile: metric.profile.name().to_string(),
            points,
            lhs,
            rhs,
            slack,
            verdict,
            tolerance,
            flags,
            note: None,
        }
    }

    /// A yes/no structural check, recorded as `observed = expected` on counts.
    pub fn holds(
        claim: Claim,
        check: impl Into<String>,
        metric: &SurfaceMetric<f64>,
        points: Vec<Point<f64>>,
        observed: Quantity,
        expected: Quantity,
        ok: bool,
    ) -> Self {
        Self {
            claim,
            check: check.into(),
            profile: metric.profile.name().to_string(),
            points,
            lhs: observed,
            rhs: expected,
            slack: Some(if ok { 0.0 } else { -1.0 }),
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            tolerance: 0.0,
            flags: Flags::default(),
            note: None,
        }
    }

    /// A check whose hypothesis fails at this sample.
    pub fn not_applicable(
        claim: Claim,
        check: impl Into<String>,
        metric: &SurfaceMetric<f64>,
        points: Vec<Point<f64>>,
        lhs: Quantity,
        rhs: Quantity,
        why: impl Into<String>,
    ) -> Self {
        Self {
            claim,
            check: check.into(),
            profile: metric.profile.name().to_string(),
            points,
            lhs,
            rhs,
            slack: None,
            verdict: Verdict::NotApplicable,
            tolerance: 0.0,
            flags: Flags::default(),
            note: Some(why.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn with_flags(mut self, f: impl FnOnce(&mut Flags)) -> Self {
        f(&mut self.flags);
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// A failure that is not vacuous.
    pub fn is_failure(&self) -> bool {
        self.verdict == Verdict::Fail && !self.flags.vacuous
    }
}

/// Sampling and resolution shared by the point-based suites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuiteOptions {
    pub n_points: usize,
    pub seed: u64,
    /// Absolute slack tolerance on inequalities between computed radii.
    pub tol: f64,
    pub report: ReportOptions,
    /// Random geodesics per point for the short-geodesics check.
    pub n_geodesics: usize,
    /// Launch angles for cut-locus searches (nearest cut point, perimeter).
    pub n_cut_psi: usize,
    /// Ball points at which `conj_t` is sampled.
    pub n_conj_t: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        let mut report = ReportOptions::default().with_dirs(32);
        report.n_loop_dirs = 128;
        report.n_ball = 16;
        report.n_cut = 32;
        report.decay.n_ball = 24;
        report.decay.n_psi = 32;
        report.decay.n_alpha = 48;
        Self {
            n_points: 50,
            seed: 0,
            tol: 1e-3,
            report,
            n_geodesics: 6,
            n_cut_psi: 64,
            n_conj_t: 4,
        }
    }
}

impl SuiteOptions {
    pub fn horizon(&self) -> f64 {
        self.report.scan.horizon
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.report = self.report.with_horizon(horizon);
        self
    }
}

/// Counts over a set of records.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub vacuous: usize,
    pub not_applicable: usize,
    pub non_vacuous_failures: usize,
}

pub fn summarize(records: &[VerificationRecord]) -> Summary {
    let mut s = Summary {
        total: records.len(),
        ..Summary::default()
    };
    for r in records {
        match r.verdict {
            Verdict::Pass => s.passed += 1,
            Verdict::Fail => s.failed += 1,
            Verdict::NotApplicable => s.not_applicable += 1,
        }
        if r.flags.vacuous {
            s.vacuous += 1;
        }
        if r.is_failure() {
            s.non_vacuous_failures += 1;
        }
    }
    s
}

/// One line per record: claim, check, profile, verdict, slack, tolerance, flags.
pub fn summary_csv(records: &[VerificationRecord]) -> String {
    let mut out = String::from("claim,check,profile,verdict,slack,tolerance,flags\n");
    for r in records {
        let f = r.flags;
        let flags: Vec<&str> = [
            (f.vacuous, "vacuous"),
            (f.horizon_limited, "horizon-limited"),
            (f.best_effort, "best-effort"),
            (f.sampled_infimum, "sampled-infimum"),
            (f.precondition_violated, "precondition-violated"),
        ]
        .into_iter()
        .filter_map(|(on, name)| on.then_some(name))
        .collect();
        let verdict = match r.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable => "n/a",
        };
        let slack = r.slack.map(|s| format!("{s:.3e}")).unwrap_or_default();
        out.push_str(&format!(
            "{},\"{}\",{},{},{},{:e},{}\n",
            r.claim,
            r.check.replace('"', "'"),
            r.profile,
            verdict,
            slack,
            r.tolerance,
            flags.join(";")
        ));
    }
    out
}

/// Run the selected suites on one metric. Point-based suites share one sample set.
/// Under [`Suite::All`], suites tied to another profile kind are skipped.
pub fn run_suite(
    metric: &SurfaceMetric<f64>,
    suite: Suite,
    opts: &SuiteOptions,
) -> Result<Vec<VerificationRecord>, TheoremError> {
    let kind = metric.profile.kind();
    let claims: Vec<Claim> = match suite {
        Suite::One(c) => {
            if let Some(needs) = c.required_kind() {
                if needs != kind {
                    return Err(TheoremError::WrongProfile {
                        suite: c,
                        needs,
                        got: kind,
                    });
                }
            }
            vec![c]
        }
        Suite::All => Claim::ALL
            .into_iter()
            .filter(|c| c.required_kind().is_none_or(|k| k == kind))
            .collect(),
    };
    let needs_samples = claims.iter().any(|c| c.required_kind().is_none());
    let samples = if needs_samples {
        sample_points(metric, opts)?
    } else {
        Vec::new()
    };
    let mut out = Vec::new();
    let mut discontinuity: Option<Vec<VerificationRecord>> = None;
    for c in claims {
        match c {
            Claim::ConvexityBound => {
                for d in &samples {
                    out.extend(convexity_bound(metric, d, opts));
                }
            }
            Claim::InjectivityDecay => {
                for (a, b) in pairs(&samples) {
                    out.extend(injectivity_decay(metric, a, b, opts)?);
                }
            }
            Claim::ShortGeodesics => {
                for (i, d) in samples.iter().enumerate() {
                    out.push(short_geodesics(metric, d, opts.n_geodesics, opts.seed.wrapping_add(i as u64), opts)?);
                }
            }
            Claim::ConjugateCutBound => {
                for d in &samples {
                    out.push(conjugate_cut_bound(metric, d, opts)?);
                }
            }
            Claim::GlobalConvexity => out.extend(global_convexity(metric, &samples, opts)),
            Claim::ConcentricRadii => {
                for d in &samples {
                    out.extend(concentric_radii(metric, d, opts)?);
                }
            }
            Claim::RadiusOrdering => {
                for d in &samples {
                    out.extend(radius_ordering(metric, d, opts));
                }
            }
            Claim::HalfConjugate => out.push(half_conjugate(metric, &samples, opts)),
            Claim::LoopStructure => {
                for d in &samples {
                    out.push(loop_structure(metric, d, opts)?);
                }
                for (a, b) in pairs(&samples) {
                    out.push(perimeter_structure(metric, a.p, b.p, opts)?);
                }
            }
            Claim::FocalLimit | Claim::FocalDiscontinuity => {
                if discontinuity.is_none() {
                    let o = DiscontinuityOptions {
                        horizon: opts.horizon(),
                        decay: opts.report.decay,
                        ..DiscontinuityOptions::default()
                    };
                    discontinuity = Some(focal_discontinuity(metric, &o)?.records);
                }
                let recs = discontinuity.as_ref().unwrap();
                out.extend(recs.iter().filter(|r| r.claim == c).cloned());
            }
            Claim::ConeSharpness => out.extend(cone_sharpness(metric, &[2.0, 3.0], 0.1, opts)?.records),
        }
    }
    Ok(out)
}

/// Consecutive sample pairs, wrapping around.
fn pairs(samples: &[PointData]) -> Vec<(&PointData, &PointData)> {
    let n = samples.len();
    if n < 2 {
        return Vec::new();
    }
    (0..n).map(|i| (&samples[i], &samples[(i + 1) % n])).collect()
}
