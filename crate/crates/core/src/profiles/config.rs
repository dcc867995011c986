use serde::{Deserialize, Serialize};

use super::{Profile, ProfileError, CONE_R_CAP, GULLIVER_EPSILON, GULLIVER_R1};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Sphere,
    Plane,
    Hyperbolic,
    Gulliver,
    Cone,
    Paraboloid,
}

impl std::fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl ProfileKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProfileKind::Sphere => "sphere",
            ProfileKind::Plane => "plane",
            ProfileKind::Hyperbolic => "hyperbolic",
            ProfileKind::Gulliver => "gulliver",
            ProfileKind::Cone => "cone",
            ProfileKind::Paraboloid => "paraboloid",
        }
    }

    /// Isometry group transitive on points.
    pub fn is_homogeneous(&self) -> bool {
        matches!(self, ProfileKind::Sphere | ProfileKind::Plane | ProfileKind::Hyperbolic)
    }
}

/// Optional shape parameters; which ones apply depends on the kind.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_cap: Option<f64>,
}

/// `{"kind": ..., "params": {...}, "r_max": ...}`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub kind: ProfileKind,
    #[serde(default)]
    pub params: ProfileParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
}

impl ProfileConfig {
    pub fn new(kind: ProfileKind) -> Self {
        Self {
            kind,
            params: ProfileParams::default(),
            r_max: None,
        }
    }

    /// Fill in every default so the config describes the built profile exactly.
    pub fn resolved(&self) -> Self {
        let mut out = *self;
        let p = &mut out.params;
        match self.kind {
            ProfileKind::Gulliver => {
                p.r1.get_or_insert(GULLIVER_R1);
                p.epsilon.get_or_insert(GULLIVER_EPSILON);
            }
            ProfileKind::Cone => {
                p.delta.get_or_insert(0.05);
                p.r_cap.get_or_insert(CONE_R_CAP);
            }
            _ => {}
        }
        out
    }

    pub fn build(&self) -> Result<Profile<f64>, ProfileError> {
        let c = self.resolved();
        let stray = |name: &str, v: Option<f64>| match v {
            Some(_) => Err(ProfileError::Precondition(format!(
                "parameter {name} does not apply to a {} profile",
                c.kind.as_str()
            ))),
            None => Ok(()),
        };
        let p = c.params;
        let profile = match c.kind {
            ProfileKind::Sphere | ProfileKind::Plane | ProfileKind::Hyperbolic | ProfileKind::Paraboloid => {
                for (n, v) in [("r1", p.r1), ("epsilon", p.epsilon), ("delta", p.delta), ("r_cap", p.r_cap)] {
                    stray(n, v)?;
                }
                match c.kind {
                    ProfileKind::Sphere => Profile::sphere(),
                    ProfileKind::Plane => Profile::plane(),
                    ProfileKind::Hyperbolic => Profile::hyperbolic(),
                    _ => Profile::paraboloid(),
                }
            }
            ProfileKind::Gulliver => {
                stray("delta", p.delta)?;
                stray("r_cap", p.r_cap)?;
                Profile::gulliver(p.r1.unwrap(), p.epsilon.unwrap())?
            }
            ProfileKind::Cone => {
                stray("r1", p.r1)?;
                stray("epsilon", p.epsilon)?;
                Profile::cone(p.delta.unwrap(), p.r_cap.unwrap())?
            }
        };
        match c.r_max {
            None => Ok(profile),
            Some(r) if c.kind == ProfileKind::Sphere => Err(ProfileError::Precondition(format!(
                "r_max = {r} cannot be set on the closed sphere"
            ))),
            Some(r) if r > 0.0 && r.is_finite() => Ok(profile.with_r_max(r)),
            Some(r) => Err(ProfileError::Precondition(format!("r_max = {r} must be positive"))),
        }
    }
}
