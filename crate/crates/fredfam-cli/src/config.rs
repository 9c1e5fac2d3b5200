//! Scenario configuration: strict TOML schema and conversion into domain types.

use fredfam::calc::Poly;
use fredfam::family::OperatorFamily;
use fredfam::op_model::{
    DiagonalCore, FiniteRankPart, LaurentSymbol, OperatorSpec, SupportVec,
};
use fredfam::param_space::ParamSpace;
use fredfam::weyl::{ComplexGrid, LimitScenario};
use fredfam::Tolerances;
use num_complex::Complex64;
use serde::Deserialize;
use std::collections::BTreeMap;

pub const DEFAULT_EDGE_SAMPLES: usize = 8;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub kind: ScenarioKind,
    #[serde(default)]
    pub tolerances: ToleranceOverrides,
    pub inputs: Inputs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum ScenarioKind {
    #[serde(rename = "index")]
    Index,
    #[serde(rename = "index-poly")]
    IndexPoly,
    #[serde(rename = "spectral-map")]
    SpectralMap,
    #[serde(rename = "weyl")]
    Weyl,
    #[serde(rename = "homotopy")]
    Homotopy,
    #[serde(rename = "semicontinuity")]
    Semicontinuity,
    #[serde(rename = "limits")]
    Limits,
    #[serde(rename = "ideal-check")]
    IdealCheck,
}

impl ScenarioKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioKind::Index => "index",
            ScenarioKind::IndexPoly => "index-poly",
            ScenarioKind::SpectralMap => "spectral-map",
            ScenarioKind::Weyl => "weyl",
            ScenarioKind::Homotopy => "homotopy",
            ScenarioKind::Semicontinuity => "semicontinuity",
            ScenarioKind::Limits => "limits",
            ScenarioKind::IdealCheck => "ideal-check",
        }
    }
}

/// Explicit tolerance overrides; anything unset falls back to the defaults.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub fredholm_margin: Option<f64>,
    pub rank_rel_tol: Option<f64>,
    pub theta_samples: Option<usize>,
    pub oracle_n: Option<usize>,
    /// Dilation ε for set limits; defaults to 2h of the scenario grid.
    pub epsilon: Option<f64>,
    /// Convergence tolerance for sequence checks.
    pub convergence_tol: Option<f64>,
}

impl ToleranceOverrides {
    pub fn resolve(&self) -> Tolerances {
        let base = Tolerances::default();
        Tolerances {
            fredholm_margin: self.fredholm_margin.unwrap_or(base.fredholm_margin),
            rank_rel_tol: self.rank_rel_tol.unwrap_or(base.rank_rel_tol),
            theta_samples: self.theta_samples.unwrap_or(base.theta_samples),
            oracle_n: self.oracle_n.unwrap_or(base.oracle_n),
        }
    }
}

/// Kind-specific input blocks; the runner validates presence per kind.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    pub family: Option<FamilyConfig>,
    pub lambda: Option<[f64; 2]>,
    pub poly: Option<PolyConfig>,
    pub grid: Option<GridConfig>,
    pub path: Option<Vec<FamilyConfig>>,
    pub t: Option<Vec<f64>>,
    pub sequence: Option<Vec<FamilyConfig>>,
    pub limit: Option<FamilyConfig>,
    pub scenario: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub vertices: Vec<u32>,
    #[serde(default)]
    pub edges: Vec<(u32, u32)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub space: SpaceConfig,
    pub assignment: BTreeMap<String, SpecConfig>,
    pub edge_samples: Option<usize>,
}

/// One operator: `kind = "toeplitz"` with `coeffs = [[k, re, im], ...]`, or
/// `kind = "diagonal"` with `head`/`tails` as `[re, im]` pairs; both accept a
/// `compact` list of rank-one terms.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecConfig {
    pub kind: String,
    pub coeffs: Option<Vec<(i64, f64, f64)>>,
    pub head: Option<Vec<(f64, f64)>>,
    pub tails: Option<Vec<(f64, f64)>>,
    #[serde(default)]
    pub compact: Vec<CompactTermConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompactTermConfig {
    pub u: Vec<(usize, f64, f64)>,
    pub v: Vec<(usize, f64, f64)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyConfig {
    /// Ascending-degree coefficients as [re, im] pairs.
    pub coeffs: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub re: [f64; 2],
    pub im: [f64; 2],
    pub h: f64,
}

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl SpecConfig {
    pub fn build(&self) -> Result<OperatorSpec, String> {
        let compact = FiniteRankPart::new(
            self.compact
                .iter()
                .map(|term| {
                    (
                        SupportVec::from_entries(
                            term.u.iter().map(|&(i, re, im)| (i, cx(re, im))),
                        ),
                        SupportVec::from_entries(
                            term.v.iter().map(|&(i, re, im)| (i, cx(re, im))),
                        ),
                    )
                })
                .collect(),
        );
        match self.kind.as_str() {
            "toeplitz" => {
                if self.head.is_some() || self.tails.is_some() {
                    return Err("toeplitz spec must not carry head/tails".into());
                }
                let coeffs = self
                    .coeffs
                    .as_ref()
                    .ok_or("toeplitz spec requires coeffs")?;
                let symbol =
                    LaurentSymbol::new(coeffs.iter().map(|&(k, re, im)| (k, cx(re, im))));
                Ok(OperatorSpec::toeplitz(symbol).with_compact(compact))
            }
            "diagonal" => {
                if self.coeffs.is_some() {
                    return Err("diagonal spec must not carry coeffs".into());
                }
                let head = self
                    .head
                    .clone()
                    .unwrap_or_default()
                    .iter()
                    .map(|&(re, im)| cx(re, im))
                    .collect();
                let tails = self
                    .tails
                    .as_ref()
                    .ok_or("diagonal spec requires tails")?
                    .iter()
                    .map(|&(re, im)| cx(re, im))
                    .collect();
                let core = DiagonalCore::new(head, tails).map_err(|e| e.to_string())?;
                Ok(OperatorSpec::diagonal(core).with_compact(compact))
            }
            other => Err(format!("unknown operator kind `{other}`")),
        }
    }
}

impl FamilyConfig {
    pub fn build(&self) -> Result<OperatorFamily, String> {
        let space = ParamSpace::new(self.space.vertices.clone(), self.space.edges.clone())
            .map_err(|e| e.to_string())?;
        let mut assignment = BTreeMap::new();
        for (key, spec) in &self.assignment {
            let vertex: u32 = key
                .parse()
                .map_err(|_| format!("assignment key `{key}` is not a vertex id"))?;
            assignment.insert(vertex, spec.build()?);
        }
        OperatorFamily::new(
            space,
            assignment,
            self.edge_samples.unwrap_or(DEFAULT_EDGE_SAMPLES),
        )
        .map_err(|e| e.to_string())
    }
}

impl PolyConfig {
    pub fn build(&self) -> Result<Poly, String> {
        Poly::new(self.coeffs.iter().map(|&(re, im)| cx(re, im)).collect())
            .map_err(|e| e.to_string())
    }
}

impl GridConfig {
    pub fn build(&self) -> Result<ComplexGrid, String> {
        ComplexGrid::new(self.re[0], self.re[1], self.im[0], self.im[1], self.h)
            .map_err(|e| e.to_string())
    }
}

pub fn parse_limit_scenario(inputs: &Inputs) -> Result<LimitScenario, String> {
    inputs
        .scenario
        .as_deref()
        .ok_or("limits scenario requires `inputs.scenario`")?
        .parse()
}
