//! JSON configuration: defaults, file overlays and `--set` overrides.

use std::path::{Path, PathBuf};

use acm_core::forces::{ElectroParams, ForceConfig, HeatParams, UnitedParams};
use acm_core::grid::{CircleSpec, EdgeParams, TShapeSpec};
use acm_core::levelset::GacParams;
use acm_core::snakes::SnakeParams;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

/// Source image of a segmentation run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum InputSpec {
    Pgm(PathBuf),
    Circle(CircleSpec),
    Tshape(TShapeSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum SeedSpec {
    /// `[cx, cy, r]`
    Circle([f64; 3]),
    /// Contour JSON file.
    Path(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Snakes,
    Gac,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub kind: SolverKind,
    pub snakes: SnakeParams,
    pub gac: GacParams,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            kind: SolverKind::Snakes,
            snakes: SnakeParams::default(),
            gac: GacParams::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: InputSpec,
    pub edge: EdgeParams,
    pub force: ForceConfig,
    pub solver: SolverConfig,
    pub seed_contour: SeedSpec,
    pub outputs: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: InputSpec::Circle(CircleSpec::default()),
            edge: EdgeParams::default(),
            force: ForceConfig::united(
                ElectroParams::default(),
                HeatParams::default(),
                UnitedParams::default(),
            ),
            solver: SolverConfig::default(),
            seed_contour: SeedSpec::Circle([32.0, 32.0, 25.0]),
            outputs: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        self.edge.validate()?;
        self.force.validate()?;
        match self.solver.kind {
            SolverKind::Snakes => self.solver.snakes.validate()?,
            SolverKind::Gac => self.solver.gac.validate()?,
        }
        Ok(())
    }
}

/// Field computation settings for `acm field`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldConfig {
    pub edge: EdgeParams,
    pub force: ForceConfig,
    /// Iteration at which a united field is evaluated.
    pub iteration: usize,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self {
            edge: EdgeParams::default(),
            force: ForceConfig::electrostatic(ElectroParams::default()),
            iteration: 1,
        }
    }
}

impl FieldConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        self.edge.validate()?;
        self.force.validate()?;
        if self.iteration == 0 {
            return Err(CliError::Config("iteration must be >= 1".into()));
        }
        Ok(())
    }
}

/// Recursively overlays `patch` onto `base`. Objects merge key by key;
/// anything else replaces.
pub fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                merge(b.entry(k).or_insert(Value::Null), v);
            }
        }
        (b, p) => *b = p,
    }
}

/// Applies `key.path=value`. The value is parsed as JSON when possible and
/// taken as a string otherwise; missing objects along the path are created.
pub fn apply_set(root: &mut Value, assignment: &str) -> Result<(), CliError> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("--set expects key=value, got `{assignment}`")))?;
    if path.is_empty() || path.split('.').any(str::is_empty) {
        return Err(CliError::Config(format!("bad --set key `{path}`")));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut cur = root;
    for key in path.split('.') {
        if !cur.is_object() {
            *cur = Value::Object(Map::new());
        }
        cur = cur
            .as_object_mut()
            .expect("just made an object")
            .entry(key)
            .or_insert(Value::Null);
    }
    *cur = value;
    Ok(())
}

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("parsing {}: {e}", path.display())))
}

/// Builds a config from `T::default()`, an optional file and `--set`
/// assignments. Top-level keys listed in `replace` are taken from the file
/// as a whole instead of being merged into the defaults; this is needed for
/// tagged values such as the input descriptor.
pub fn load<T>(file: Option<&Path>, sets: &[String], replace: &[&str]) -> Result<T, CliError>
where
    T: Default + Serialize + DeserializeOwned,
{
    let mut value = serde_json::to_value(T::default()).expect("defaults serialize");
    if let Some(path) = file {
        let patch = read_json(path)?;
        if let (Value::Object(base), Value::Object(p)) = (&mut value, &patch) {
            for key in replace {
                if p.contains_key(*key) {
                    base.remove(*key);
                }
            }
        }
        merge(&mut value, patch);
    }
    for s in sets {
        apply_set(&mut value, s)?;
    }
    serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))
}
