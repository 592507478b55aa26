use std::path::Path;

use leafwind_core::brouwer::Bump;
use leafwind_core::index::{FamilySpec, LineSpec, MapSpec, Numerics, PathSpec, WitnessSpec};
use leafwind_core::plane::{pt, vec2};
use leafwind_core::Scenario;
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{path}: field `{field}`: {message}")]
    Field { path: String, field: &'static str, message: String },
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Horizontal,
    BandSpiral,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoliationConfig {
    pub family: Family,
    pub n: Option<i64>,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Translation,
    FlowTimeOne,
    Perturbed,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpConfig {
    pub center: [f64; 2],
    pub radius: f64,
    pub vector: [f64; 2],
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapConfig {
    pub kind: Option<MapKind>,
    #[serde(default)]
    pub bumps: Vec<BumpConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitsConfig {
    pub seeds: [[f64; 2]; 2],
}

impl Default for OrbitsConfig {
    fn default() -> Self {
        OrbitsConfig { seeds: [[0.0, 1.0], [0.0, 2.0]] }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LineConfig {
    FlowLine { point: [f64; 2] },
    Row { y: f64 },
    Straight { point: [f64; 2], direction: [f64; 2] },
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WitnessConfig {
    #[default]
    Identity,
    Shear { c: f64 },
    HalfTurn,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathConfig {
    #[default]
    Segment,
    Wiggle { a: [f64; 2], b: [f64; 2] },
}

/// Every field is optional; omitted values take the library defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsConfig {
    /// Leaf tracing step.
    pub step: Option<f64>,
    pub flow_step: Option<f64>,
    pub eps: Option<f64>,
    pub tol_leaf: Option<f64>,
    pub tol_snap: Option<f64>,
    pub tol_fix: Option<f64>,
    pub tangent_tol: Option<f64>,
    pub max_depth: Option<usize>,
    pub initial_samples: Option<usize>,
    pub whitney_n: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub verify_choices: bool,
    pub foliation: FoliationConfig,
    #[serde(default)]
    pub map: MapConfig,
    #[serde(default)]
    pub orbits: OrbitsConfig,
    /// Defaults to the flow lines through the two seeds.
    pub lines: Option<Vec<LineConfig>>,
    #[serde(default)]
    pub witness: WitnessConfig,
    #[serde(default)]
    pub path: PathConfig,
    #[serde(default)]
    pub numerics: NumericsConfig,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse { path: origin.to_string(), message: e.to_string() })
    }

    pub fn to_scenario(&self, origin: &str) -> Result<Scenario, ConfigError> {
        let field = |field: &'static str, message: String| ConfigError::Field { path: origin.to_string(), field, message };
        let family = match (self.foliation.family, self.foliation.n) {
            (Family::Horizontal, None) => FamilySpec::Horizontal,
            (Family::Horizontal, Some(_)) => {
                return Err(field("foliation.n", "only band_spiral takes a parameter".into()));
            }
            (Family::BandSpiral, Some(n)) if (0..=64).contains(&n) => FamilySpec::BandSpiral(n),
            (Family::BandSpiral, Some(n)) => return Err(field("foliation.n", format!("{n} is outside 0..=64"))),
            (Family::BandSpiral, None) => return Err(field("foliation.n", "band_spiral needs n".into())),
        };
        let kind = self.map.kind.unwrap_or(match family {
            FamilySpec::Horizontal => MapKind::Translation,
            FamilySpec::BandSpiral(_) => MapKind::FlowTimeOne,
        });
        if kind != MapKind::Perturbed && !self.map.bumps.is_empty() {
            return Err(field("map.bumps", "bumps need map.kind = \"perturbed\"".into()));
        }
        let map = match kind {
            MapKind::Translation => MapSpec::Translation,
            MapKind::FlowTimeOne => MapSpec::FlowTimeOne,
            MapKind::Perturbed => {
                let mut bumps = Vec::with_capacity(self.map.bumps.len());
                for b in &self.map.bumps {
                    let bump = Bump {
                        center: pt(b.center[0], b.center[1]),
                        radius: b.radius,
                        vector: vec2(b.vector[0], b.vector[1]),
                    };
                    if !bump.is_invertible() {
                        return Err(field("map.bumps", format!("bump at {:?} is too strong for its radius", b.center)));
                    }
                    bumps.push(bump);
                }
                MapSpec::Perturbed { bumps }
            }
        };
        let [s0, s1] = self.orbits.seeds;
        let seeds = (pt(s0[0], s0[1]), pt(s1[0], s1[1]));
        let lines = match &self.lines {
            None => (LineSpec::FlowLine(seeds.0), LineSpec::FlowLine(seeds.1)),
            Some(v) if v.len() == 2 => (line_spec(v[0]), line_spec(v[1])),
            Some(v) => return Err(field("lines", format!("expected 2 lines, found {}", v.len()))),
        };
        let witness = match self.witness {
            WitnessConfig::Identity => WitnessSpec::Identity,
            WitnessConfig::Shear { c } => WitnessSpec::Shear(c),
            WitnessConfig::HalfTurn => WitnessSpec::HalfTurn,
        };
        let path = match self.path {
            PathConfig::Segment => PathSpec::Segment,
            PathConfig::Wiggle { a, b } => PathSpec::Wiggle { a: vec2(a[0], a[1]), b: vec2(b[0], b[1]) },
        };
        let numerics = self.numerics(origin)?;
        Ok(Scenario {
            name: self.name.clone(),
            family,
            map,
            seeds,
            lines,
            witness,
            path,
            numerics,
            verify_choices: self.verify_choices,
            seed: self.seed,
        })
    }

    fn numerics(&self, origin: &str) -> Result<Numerics, ConfigError> {
        let d = Numerics::default();
        let c = &self.numerics;
        let positive = |name: &'static str, v: Option<f64>, default: f64| match v {
            Some(x) if !(x > 0.0 && x.is_finite()) => Err(ConfigError::Field {
                path: origin.to_string(),
                field: name,
                message: format!("{x} must be positive and finite"),
            }),
            Some(x) => Ok(x),
            None => Ok(default),
        };
        let count = |name: &'static str, v: Option<usize>, default: usize| match v {
            Some(0) => Err(ConfigError::Field { path: origin.to_string(), field: name, message: "must be at least 1".into() }),
            Some(x) => Ok(x),
            None => Ok(default),
        };
        Ok(Numerics {
            eps: positive("numerics.eps", c.eps, d.eps)?,
            tol_leaf: positive("numerics.tol_leaf", c.tol_leaf, d.tol_leaf)?,
            tol_snap: positive("numerics.tol_snap", c.tol_snap, d.tol_snap)?,
            tol_fix: positive("numerics.tol_fix", c.tol_fix, d.tol_fix)?,
            max_depth: count("numerics.max_depth", c.max_depth, d.max_depth)?,
            initial_samples: count("numerics.initial_samples", c.initial_samples, d.initial_samples)?,
            step_leaf: positive("numerics.step", c.step, d.step_leaf)?,
            step_flow: positive("numerics.flow_step", c.flow_step, d.step_flow)?,
            tangent_tol: positive("numerics.tangent_tol", c.tangent_tol, d.tangent_tol)?,
            whitney_n: count("numerics.whitney_n", c.whitney_n, d.whitney_n)?,
        })
    }
}

fn line_spec(c: LineConfig) -> LineSpec {
    match c {
        LineConfig::FlowLine { point } => LineSpec::FlowLine(pt(point[0], point[1])),
        LineConfig::Row { y } => LineSpec::Row(y),
        LineConfig::Straight { point, direction } => {
            LineSpec::Straight { point: pt(point[0], point[1]), direction: vec2(direction[0], direction[1]) }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_takes_defaults() {
        let c = ScenarioConfig::parse("name = \"b3\"\n[foliation]\nfamily = \"band_spiral\"\nn = 3\n", "inline").unwrap();
        let s = c.to_scenario("inline").unwrap();
        assert_eq!(s, Scenario { name: "b3".into(), ..Scenario::band_spiral(3) });
    }

    #[test]
    fn horizontal_defaults_to_translation() {
        let c = ScenarioConfig::parse("name = \"h\"\n[foliation]\nfamily = \"horizontal\"\n", "inline").unwrap();
        assert_eq!(c.to_scenario("inline").unwrap().map, MapSpec::Translation);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let c = ScenarioConfig::parse("name = \"x\"\n[foliation]\nfamily = \"band_spiral\"\n", "cfg").unwrap();
        let e = c.to_scenario("cfg").unwrap_err().to_string();
        assert!(e.contains("foliation.n"), "{e}");
        let c = ScenarioConfig::parse(
            "name = \"x\"\n[foliation]\nfamily = \"horizontal\"\n[numerics]\neps = -1.0\n",
            "cfg",
        )
        .unwrap();
        assert!(c.to_scenario("cfg").unwrap_err().to_string().contains("numerics.eps"));
    }

    #[test]
    fn parse_errors_carry_a_line_number() {
        let e = ScenarioConfig::parse("name = \"x\"\n[foliation]\nfamily = \"spiral\"\n", "cfg").unwrap_err().to_string();
        assert!(e.contains("line 3"), "{e}");
        let e = ScenarioConfig::parse("name = \"x\"\nbogus = 1\n[foliation]\nfamily = \"horizontal\"\n", "cfg")
            .unwrap_err()
            .to_string();
        assert!(e.contains("bogus"), "{e}");
    }
}
