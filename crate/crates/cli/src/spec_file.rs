//! Map-spec JSON: `{"family": "spiral", "c1": 0.2, "c2": 0.3, "p": 1.0}`.
//! `alpha` is read only for `generalized_spiral`.

use std::path::Path;

use rotlab_core::{Family, MapSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    Identity,
    Spiral,
    RotationOnly,
    GeneralizedSpiral,
}

impl From<FamilyName> for Family {
    fn from(f: FamilyName) -> Self {
        match f {
            FamilyName::Identity => Family::Identity,
            FamilyName::Spiral => Family::Spiral,
            FamilyName::RotationOnly => Family::RotationOnly,
            FamilyName::GeneralizedSpiral => Family::GeneralizedSpiral,
        }
    }
}

impl From<Family> for FamilyName {
    fn from(f: Family) -> Self {
        match f {
            Family::Identity => FamilyName::Identity,
            Family::Spiral => FamilyName::Spiral,
            Family::RotationOnly => FamilyName::RotationOnly,
            Family::GeneralizedSpiral => FamilyName::GeneralizedSpiral,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpecFile {
    pub family: FamilyName,
    #[serde(default)]
    pub c1: f64,
    #[serde(default)]
    pub c2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub p: f64,
}

impl MapSpecFile {
    pub fn to_spec(&self) -> CliResult<MapSpec> {
        if self.alpha.is_some() && self.family != FamilyName::GeneralizedSpiral {
            return Err(CliError::Config("alpha applies only to generalized_spiral".into()));
        }
        if self.alpha.is_none() && self.family == FamilyName::GeneralizedSpiral {
            return Err(CliError::Config("generalized_spiral needs alpha".into()));
        }
        Ok(MapSpec::new(self.family.into(), self.c1, self.c2, self.alpha.unwrap_or(0.0), self.p)?)
    }

    pub fn from_spec(spec: &MapSpec) -> Self {
        let family: FamilyName = spec.family().into();
        MapSpecFile {
            family,
            c1: spec.c1(),
            c2: spec.c2(),
            alpha: (family == FamilyName::GeneralizedSpiral).then(|| spec.alpha()),
            p: spec.p(),
        }
    }
}

pub fn parse_spec(text: &str) -> CliResult<MapSpec> {
    let file: MapSpecFile =
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid map spec: {e}")))?;
    file.to_spec()
}

pub fn load_spec(path: &Path) -> CliResult<MapSpec> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })?;
    parse_spec(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_every_family() {
        for spec in [
            MapSpec::identity(1.0).unwrap(),
            MapSpec::spiral(0.2, 0.3, 1.0).unwrap(),
            MapSpec::rotation_only(0.4, 2.0).unwrap(),
            MapSpec::generalized_spiral(0.3, 0.3, -0.5, 1.0).unwrap(),
        ] {
            let text = serde_json::to_string(&MapSpecFile::from_spec(&spec)).unwrap();
            assert_eq!(parse_spec(&text).unwrap(), spec);
        }
    }

    #[test]
    fn rejects_bad_specs() {
        for text in [
            r#"{"family": "spiral", "c1": -1, "c2": 0.3, "p": 1}"#,
            r#"{"family": "spiral", "c1": 0.2, "c2": 0.3}"#,
            r#"{"family": "twist", "c1": 0.2, "c2": 0.3, "p": 1}"#,
            r#"{"family": "spiral", "c1": 0.2, "c2": 0.3, "alpha": 0.1, "p": 1}"#,
            r#"{"family": "generalized_spiral", "c1": 0.2, "c2": 0.3, "p": 1}"#,
            r#"{"family": "generalized_spiral", "c1": 0.2, "c2": 0.3, "alpha": 1.5, "p": 1}"#,
            r#"{"family": "spiral", "c1": 0.2, "c2": 0.3, "p": 1, "extra": 2}"#,
        ] {
            assert_eq!(parse_spec(text).unwrap_err().exit_code(), 2, "{text}");
        }
    }
}
