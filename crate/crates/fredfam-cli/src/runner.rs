//! Scenario dispatch, result assembly and plot-data emission.

use crate::config::{parse_limit_scenario, Inputs, ScenarioConfig, ScenarioKind};
use fredfam::calc::{fredholm_spectrum, index_via_poly_family, index_via_roots, spectral_map_check};
use fredfam::family::{
    family_index, homotopy_invariance_check, ideal_closure_check, quotient_invertible,
    IndexVector, OperatorFamily,
};
use fredfam::weyl::{
    limit_scenario_check, semicontinuity_check, weyl_spectrum_family, GridSet, SetLimitReport,
};
use fredfam::{Error as FredfamError, Tolerances};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_CONVERGENCE_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
    Error,
}

impl Status {
    pub fn exit_code(&self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 2,
            Status::Error => 3,
        }
    }
}

/// Data worth plotting alongside the JSON result.
#[derive(Debug, Clone)]
pub enum PlotData {
    Grid(GridSet),
    Curve(Vec<Complex64>),
}

#[derive(Debug)]
pub struct RunResult {
    pub scenario: String,
    pub kind: ScenarioKind,
    pub status: Status,
    pub payload: Value,
    pub tolerances: Tolerances,
    pub epsilon: Option<f64>,
    pub convergence_tol: Option<f64>,
    pub config_sha256: String,
    pub plot: Option<PlotData>,
}

impl RunResult {
    pub fn to_json(&self) -> Value {
        json!({
            "schema_version": SCHEMA_VERSION,
            "scenario": self.scenario,
            "kind": self.kind.as_str(),
            "status": self.status,
            "payload": self.payload,
            "provenance": {
                "config_sha256": self.config_sha256,
                "tool_version": env!("CARGO_PKG_VERSION"),
                "tolerances": {
                    "fredholm_margin": self.tolerances.fredholm_margin,
                    "rank_rel_tol": self.tolerances.rank_rel_tol,
                    "theta_samples": self.tolerances.theta_samples,
                    "oracle_n": self.tolerances.oracle_n,
                    "epsilon": self.epsilon,
                    "convergence_tol": self.convergence_tol,
                },
            },
        })
    }
}

fn index_vector_json(idx: &IndexVector) -> Value {
    let map: serde_json::Map<String, Value> = idx
        .entries()
        .iter()
        .map(|(k, v)| (k.to_string(), json!(v)))
        .collect();
    Value::Object(map)
}

fn grid_set_json(set: &GridSet) -> Value {
    let g = set.grid();
    let members: Vec<[f64; 2]> = set
        .points_row_major()
        .into_iter()
        .map(|z| [z.re, z.im])
        .collect();
    json!({
        "grid": { "re": [g.re_min, g.re_max], "im": [g.im_min, g.im_max], "h": g.h },
        "count": set.len(),
        "members": members,
    })
}

fn set_limit_json(report: &SetLimitReport) -> Value {
    json!({
        "epsilon": report.epsilon,
        "converged": report.converged,
        "liminf": grid_set_json(&report.liminf),
        "limsup": grid_set_json(&report.limsup),
    })
}

fn status_of_error(err: &FredfamError) -> Status {
    match err {
        FredfamError::Inconclusive(_)
        | FredfamError::HypothesisViolation(_)
        | FredfamError::DiscretizationTooCoarse { .. }
        | FredfamError::OracleUnstable { .. } => Status::Inconclusive,
        FredfamError::NotFredholmFamily { .. }
        | FredfamError::NotFredholmPoint { .. }
        | FredfamError::OnEssentialSpectrum { .. } => Status::Fail,
        _ => Status::Error,
    }
}

struct Ctx {
    tol: Tolerances,
    epsilon: Option<f64>,
    convergence_tol: f64,
}

/// Runs one scenario. Config errors come back as `Err(message)`; module
/// outcomes (including negative ones) are encoded in the result status.
pub fn run_scenario(
    config: &ScenarioConfig,
    raw_config: &[u8],
) -> Result<RunResult, String> {
    let tol = config.tolerances.resolve();
    let ctx = Ctx {
        tol: tol.clone(),
        epsilon: config.tolerances.epsilon,
        convergence_tol: config
            .tolerances
            .convergence_tol
            .unwrap_or(DEFAULT_CONVERGENCE_TOL),
    };
    let (status, payload, plot, epsilon_used, convergence_used) = dispatch(config, &ctx)?;
    Ok(RunResult {
        scenario: config.name.clone(),
        kind: config.kind,
        status,
        payload,
        tolerances: tol,
        epsilon: epsilon_used,
        convergence_tol: convergence_used,
        config_sha256: hex_digest(raw_config),
        plot,
    })
}

type Dispatched = (Status, Value, Option<PlotData>, Option<f64>, Option<f64>);

fn dispatch(config: &ScenarioConfig, ctx: &Ctx) -> Result<Dispatched, String> {
    let inputs = &config.inputs;
    match config.kind {
        ScenarioKind::Index => run_index(inputs, ctx),
        ScenarioKind::IndexPoly => run_index_poly(inputs, ctx),
        ScenarioKind::SpectralMap => run_spectral_map(inputs, ctx),
        ScenarioKind::Weyl => run_weyl(inputs, ctx),
        ScenarioKind::Homotopy => run_homotopy(inputs, ctx),
        ScenarioKind::Semicontinuity => run_semicontinuity(inputs, ctx),
        ScenarioKind::Limits => run_limits(inputs, ctx),
        ScenarioKind::IdealCheck => run_ideal_check(inputs, ctx),
    }
}

fn require_family(inputs: &Inputs) -> Result<OperatorFamily, String> {
    inputs
        .family
        .as_ref()
        .ok_or("missing inputs.family")?
        .build()
}

fn error_payload(err: &FredfamError) -> Value {
    json!({ "error": err.to_string() })
}

fn run_index(inputs: &Inputs, ctx: &Ctx) -> Result<Dispatched, String> {
    let family = require_family(inputs)?;
    let lambda = inputs
        .lambda
        .map(|[re, im]| Complex64::new(re, im))
        .unwrap_or(Complex64::ZERO);
    let quotient = quotient_invertible(&family, lambda, &ctx.tol);
    match family_index(&family, lambda, &ctx.tol) {
        Ok(idx) => {
            let payload = json!({
                "lambda": [lambda.re, lambda.im],
                "index": index_vector_json(&idx),
                "quotient_invertible": quotient,
            });
            Ok((Status::Pass, payload, None, None, None))
        }
        Err(err) => {
            let status = status_of_error(&err);
            Ok((status, error_payload(&err), None, None, None))
        }
    }
}

fn run_index_poly(inputs: &Inputs, ctx: &Ctx) -> Result<Dispatched, String> {
    let family = require_family(inputs)?;
    let poly = inputs.poly.as_ref().ok_or("missing inputs.poly")?.build()?;
    let via_roots = match index_via_roots(&family, &poly, &ctx.tol) {
        Ok(idx) => idx,
        Err(err) => return Ok((status_of_error(&err), error_payload(&err), None, None, None)),
    };
    let direct = match index_via_poly_family(&family, &poly, &ctx.tol) {
        Ok(idx) => idx,
        Err(err) => return Ok((status_of_error(&err), error_payload(&err), None, None, None)),
    };
    let agree = via_roots == direct;
    let payload = json!({
        "index_via_roots": index_vector_json(&via_roots),
        "index_of_poly_family": index_vector_json(&direct),
        "agree": agree,
    });
    let status = if agree { Status::Pass } else { Status::Fail };
    Ok((status, payload, None, None, None))
}

fn run_spectral_map(inputs: &Inputs, ctx: &Ctx) -> Result<Dispatched, String> {
    let family = require_family(inputs)?;
    let poly = inputs.poly.as_ref().ok_or("missing inputs.poly")?.build()?;
    let report = spectral_map_check(&family, &poly, ctx.tol.theta_samples)
        .map_err(|e| e.to_string())?;
    let payload = json!({
        "hausdorff": report.hausdorff,
        "tolerance": report.tolerance,
        "theta_samples": ctx.tol.theta_samples,
    });
    // Plot: the sampled Fredholm spectrum of f(family).
    let image = fredfam::calc::poly_apply(&family, &poly).map_err(|e| e.to_string())?;
    let curve = fredholm_spectrum(&image, ctx.tol.theta_samples);
    let status = if report.pass { Status::Pass } else { Status::Fail };
    Ok((status, payload, Some(PlotData::Curve(curve)), None, None))
}

fn run_weyl(inputs: &Inputs, ctx: &Ctx) -> Result<Dispatched, String> {
    let family = require_family(inputs)?;
    let grid = inputs.grid.as_ref().ok_or("missing inputs.grid")?.build()?;
    let set = weyl_spectrum_family(&family, &grid, &ctx.tol);
    let payload = grid_set_json(&set);
    Ok((Status::Pass, payload, Some(PlotData::Grid(set)), None, None))
}

fn run_homotopy(inputs: &Inputs, ctx: &Ctx) -> Result<Dispatched, String> {
    let path_cfg = inputs.path.as_ref().ok_or("missing inputs.path")?;
    if path_cfg.len() < 2 {
        return Err("homotopy path needs at least two families".into());
    }
    if let Some(t) = &inputs.t {
        if t.len() != path_cfg.len() {
            return Err("inputs.t must have one entry per path family".into());
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err("inputs.t must be strictly increasing".into());
        }
    }
    let path: Vec<OperatorFamily> = path_cfg
        .iter()
        .map(|f| f.build())
        .collect::<Result<_, _>>()?;
    let fam0 = path.first().expect("len >= 2").clone();
    let fam1 = path.last().expect("len >= 2").clone();
    match homotopy_invariance_check(&fam0, &fam1, &path, &ctx.tol) {
        Ok(report) => {
            let witness = report.witness.as_ref().map(|w| {
                let t = inputs
                    .t
                    .as_ref()
                    .map(|t| t[w.path_step])
                    .unwrap_or(w.path_step as f64 / (path.len() - 1) as f64);
                json!({
                    "t": t,
                    "location": w.location.to_string(),
                    "essential_gap": w.essential_gap,
                })
            });
            let payload = json!({
                "fredholm_path": report.fredholm_path,
                "witness": witness,
                "start_index": report.start_index.as_ref().map(index_vector_json),
                "end_index": report.end_index.as_ref().map(index_vector_json),
            });
            let status = if report.fredholm_path { Status::Pass } else { Status::Fail };
            Ok((status, payload, None, None, None))
        }
        Err(err) => Ok((status_of_error(&err), error_payload(&err), None, None, None)),
    }
}

fn sequence_and_limit(inputs: &Inputs) -> Result<(Vec<OperatorFamily>, OperatorFamily), String> {
    let seq = inputs
        .sequence
        .as_ref()
        .ok_or("missing inputs.sequence")?
        .iter()
        .map(|f| f.build())
        .collect::<Result<Vec<_>, _>>()?;
    let limit = inputs.limit.as_ref().ok_or("missing inputs.limit")?.build()?;
    Ok((seq, limit))
}

fn run_semicontinuity(inputs: &Inputs, ctx: &Ctx) -> Result<Dispatched, String> {
    let (seq, limit) = sequence_and_limit(inputs)?;
    let grid = inputs.grid.as_ref().ok_or("missing inputs.grid")?.build()?;
    let epsilon = ctx.epsilon.unwrap_or(2.0 * grid.h);
    match semicontinuity_check(&seq, &limit, &grid, epsilon, &ctx.tol) {
        Ok(report) => {
            let payload = json!({
                "holds": report.holds,
                "witness": report.witness.map(|z| [z.re, z.im]),
                "limsup_count": report.limsup.len(),
                "limit_weyl_count": report.limit_weyl.len(),
            });
            let status = if report.holds { Status::Pass } else { Status::Fail };
            Ok((status, payload, Some(PlotData::Grid(report.limsup)), Some(epsilon), None))
        }
        Err(err) => Ok((
            status_of_error(&err),
            error_payload(&err),
            None,
            Some(epsilon),
            None,
        )),
    }
}

fn run_limits(inputs: &Inputs, ctx: &Ctx) -> Result<Dispatched, String> {
    let scenario = parse_limit_scenario(inputs)?;
    let (seq, limit) = sequence_and_limit(inputs)?;
    let grid = inputs.grid.as_ref().ok_or("missing inputs.grid")?.build()?;
    let epsilon = ctx.epsilon.unwrap_or(2.0 * grid.h);
    match limit_scenario_check(scenario, &seq, &limit, &grid, epsilon, &ctx.tol) {
        Ok((matches, report)) => {
            let plot = PlotData::Grid(report.limsup.clone());
            let payload = json!({
                "scenario": scenario.to_string(),
                "matches_limit": matches,
                "limits": set_limit_json(&report),
            });
            let status = if matches { Status::Pass } else { Status::Fail };
            Ok((status, payload, Some(plot), Some(epsilon), None))
        }
        Err(err) => Ok((
            status_of_error(&err),
            error_payload(&err),
            None,
            Some(epsilon),
            None,
        )),
    }
}

fn run_ideal_check(inputs: &Inputs, ctx: &Ctx) -> Result<Dispatched, String> {
    let (seq, limit) = sequence_and_limit(inputs)?;
    match ideal_closure_check(&seq, &limit, ctx.convergence_tol) {
        Ok(report) => {
            let ok = report.limit_compact && report.ideal_products_compact;
            let payload = json!({
                "distances": report.distances,
                "limit_compact": report.limit_compact,
                "ideal_products_compact": report.ideal_products_compact,
            });
            let status = if ok { Status::Pass } else { Status::Fail };
            Ok((status, payload, None, None, Some(ctx.convergence_tol)))
        }
        Err(err) => Ok((
            status_of_error(&err),
            error_payload(&err),
            None,
            None,
            Some(ctx.convergence_tol),
        )),
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Renders plot data as CSV: `re,im,member` rows (members only, row-major)
/// for grid sets, `re,im` rows for curves.
pub fn plot_csv(plot: &PlotData) -> String {
    match plot {
        PlotData::Grid(set) => {
            let mut out = String::from("re,im,member\n");
            for z in set.points_row_major() {
                out.push_str(&format!("{},{},1\n", z.re, z.im));
            }
            out
        }
        PlotData::Curve(points) => {
            let mut out = String::from("re,im\n");
            for z in points {
                out.push_str(&format!("{},{}\n", z.re, z.im));
            }
            out
        }
    }
}
