//! JSON scenario files.

use std::fs;
use std::path::{Path, PathBuf};

use kirwan_core::lattice::{FiniteMatrixGroup, GroupSpec, IntMatrix, LatticeVector, DEFAULT_CLOSURE_BOUND};
use kirwan_core::scenario::{CenterOverride, Scenario, Subtorus, Weight, WeightDiagram};
use kirwan_core::{Polynomial, Rational};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed scenario document: {0}")]
    Parse(String),
    #[error(transparent)]
    Engine(#[from] kirwan_core::Error),
}

impl From<serde_json::Error> for ConfigError {
    fn from(e: serde_json::Error) -> Self {
        ConfigError::Parse(e.to_string())
    }
}

/// A rational coordinate, written as a JSON integer or a `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coord {
    Int(i64),
    Text(String),
}

impl Coord {
    pub fn parse(&self) -> Result<Rational, ConfigError> {
        match self {
            Coord::Int(n) => Ok(Rational::from_integer((*n).into())),
            Coord::Text(s) => s
                .trim()
                .parse::<Rational>()
                .map_err(|_| ConfigError::Parse(format!("`{s}` is not an exact rational"))),
        }
    }

    pub fn from_rational(r: &Rational) -> Self {
        if r.is_integer() {
            if let Ok(n) = i64::try_from(r.to_integer()) {
                return Coord::Int(n);
            }
        }
        Coord::Text(r.to_string())
    }
}

pub fn vector_coords(v: &LatticeVector) -> Vec<Coord> {
    v.coords().iter().map(Coord::from_rational).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    pub vector: Vec<Coord>,
    #[serde(default = "one")]
    pub multiplicity: u32,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub label: String,
}

fn one() -> u32 {
    1
}

/// `"full"` or a Lie-algebra direction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SubtorusConfig {
    Named(String),
    Direction(Vec<Coord>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverrideConfig {
    pub subtorus: SubtorusConfig,
    /// Dense coefficients, lowest degree first.
    pub polynomial: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub torus_rank: usize,
    #[serde(default)]
    pub finite_generators: Vec<Vec<Vec<i64>>>,
    pub weights: Vec<WeightConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub overrides: Vec<OverrideConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation_order: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closure_bound: Option<usize>,
}

impl ScenarioConfig {
    pub fn build(&self) -> Result<Scenario, ConfigError> {
        let gens = self
            .finite_generators
            .iter()
            .map(|rows| {
                if rows.len() != self.torus_rank {
                    return Err(kirwan_core::Error::RankMismatch { expected: self.torus_rank, found: rows.len() });
                }
                IntMatrix::from_rows(rows)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let bound = self.closure_bound.unwrap_or(DEFAULT_CLOSURE_BOUND);
        let finite = FiniteMatrixGroup::generate_bounded(self.torus_rank, &gens, bound)?;
        let group = GroupSpec::new(self.torus_rank, finite)?;
        let weights = self
            .weights
            .iter()
            .map(|w| Ok(Weight::new(parse_vector(&w.vector)?, w.multiplicity, w.label.clone())))
            .collect::<Result<Vec<_>, ConfigError>>()?;
        let overrides = self.overrides.iter().map(parse_override).collect::<Result<Vec<_>, _>>()?;
        Ok(Scenario::new(WeightDiagram::new(weights), group)?
            .with_overrides(overrides)
            .with_truncation_order(self.truncation_order))
    }
}

fn parse_vector(coords: &[Coord]) -> Result<LatticeVector, ConfigError> {
    Ok(LatticeVector::new(coords.iter().map(Coord::parse).collect::<Result<_, _>>()?))
}

fn parse_override(o: &OverrideConfig) -> Result<CenterOverride, ConfigError> {
    let subtorus = match &o.subtorus {
        SubtorusConfig::Named(n) if n == "full" => Subtorus::Full,
        SubtorusConfig::Named(n) => return Err(ConfigError::Parse(format!("unknown subtorus `{n}`"))),
        SubtorusConfig::Direction(d) => {
            let v = parse_vector(d)?;
            if v.is_zero() {
                return Err(ConfigError::Parse("override direction is zero".into()));
            }
            Subtorus::Line(v)
        }
    };
    Ok(CenterOverride { subtorus, polynomial: Polynomial::from_ints(&o.polynomial) })
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ConfigError> {
    serde_json::from_str::<ScenarioConfig>(text)?.build()
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_owned(), source })?;
    parse_scenario(&text)
}

/// Greedy generating set: each element kept only if it enlarges the group so far.
fn generators(g: &FiniteMatrixGroup) -> Vec<IntMatrix> {
    let mut gens: Vec<IntMatrix> = Vec::new();
    let mut span = FiniteMatrixGroup::trivial(g.dim());
    for m in g.elements() {
        if !span.contains(m) {
            gens.push(m.clone());
            span = FiniteMatrixGroup::generate(g.dim(), &gens).expect("subgroup of a finite group");
        }
    }
    gens
}

pub fn to_config(s: &Scenario) -> ScenarioConfig {
    let overrides = s
        .overrides
        .iter()
        .map(|o| OverrideConfig {
            subtorus: match &o.subtorus {
                Subtorus::Full => SubtorusConfig::Named("full".into()),
                Subtorus::Line(u) => SubtorusConfig::Direction(vector_coords(u)),
            },
            polynomial: o.polynomial.integer_coefficients().expect("override polynomials are integral"),
        })
        .collect();
    ScenarioConfig {
        torus_rank: s.rank(),
        finite_generators: generators(&s.group.finite).iter().map(IntMatrix::rows).collect(),
        weights: s
            .diagram
            .weights()
            .iter()
            .map(|w| WeightConfig { vector: vector_coords(&w.vector), multiplicity: w.multiplicity, label: w.label.clone() })
            .collect(),
        overrides,
        truncation_order: s.truncation_order,
        closure_bound: None,
    }
}

pub fn to_json(s: &Scenario) -> String {
    let mut out = serde_json::to_string_pretty(&to_config(s)).expect("plain data serializes");
    out.push('\n');
    out
}
