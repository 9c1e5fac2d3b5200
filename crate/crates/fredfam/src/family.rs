//! Continuous operator families over a finite graph: the per-component index
//! vector, compact families and the closed-ideal property, homotopy
//! invariance, local constancy and the quotient-algebra Fredholm criterion.
//!
//! A family assigns an operator spec to every vertex; along an edge (u, v)
//! the operator at parameter s is the coefficientwise interpolation
//! (1−s)·T_u + s·T_v, so continuity holds by construction and a family is
//! fully determined by its vertex assignment plus the sampling density.

use crate::error::{Error, Result};
use crate::fredholm::{self, FredholmReport};
use crate::op_model::{linear_combine, multiply, OperatorSpec};
use crate::param_space::{components, representatives, ComponentLabeling, ParamSpace};
use crate::tolerances::Tolerances;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;

/// Where a sampled operator lives on the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Vertex(u32),
    /// Interior point number `step` (1-based) of edge (a, b), at
    /// s = step / (edge_samples + 1).
    Edge { a: u32, b: u32, step: usize },
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Vertex(v) => write!(f, "vertex {v}"),
            Location::Edge { a, b, step } => write!(f, "edge ({a},{b}) sample {step}"),
        }
    }
}

/// A continuous map from the parameter graph into the model operators.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorFamily {
    space: ParamSpace,
    assignment: BTreeMap<u32, OperatorSpec>,
    edge_samples: usize,
}

pub const DEFAULT_EDGE_SAMPLES: usize = 8;

impl OperatorFamily {
    /// Validates that every vertex carries a spec and that all specs are
    /// pairwise combinable (same kind, compatible diagonal shapes).
    pub fn new(
        space: ParamSpace,
        assignment: BTreeMap<u32, OperatorSpec>,
        edge_samples: usize,
    ) -> Result<Self> {
        for &v in space.vertices() {
            if !assignment.contains_key(&v) {
                return Err(Error::Structure(format!("vertex {v} has no operator assigned")));
            }
        }
        for (&v, spec) in &assignment {
            if space.vertices().binary_search(&v).is_err() {
                return Err(Error::Structure(format!(
                    "assignment references undeclared vertex {v}"
                )));
            }
            let first = assignment.values().next().expect("nonempty");
            if !first.same_shape(spec) {
                return Err(Error::KindMismatch);
            }
        }
        Ok(OperatorFamily { space, assignment, edge_samples })
    }

    /// Single-vertex family.
    pub fn constant(spec: OperatorSpec) -> Self {
        let mut assignment = BTreeMap::new();
        assignment.insert(0, spec);
        OperatorFamily {
            space: ParamSpace::point(),
            assignment,
            edge_samples: DEFAULT_EDGE_SAMPLES,
        }
    }

    pub fn space(&self) -> &ParamSpace {
        &self.space
    }

    pub fn assignment(&self) -> &BTreeMap<u32, OperatorSpec> {
        &self.assignment
    }

    pub fn edge_samples(&self) -> usize {
        self.edge_samples
    }

    pub fn spec_at(&self, vertex: u32) -> Option<&OperatorSpec> {
        self.assignment.get(&vertex)
    }

    pub fn labeling(&self) -> ComponentLabeling {
        components(&self.space)
    }

    /// Applies `f` to every vertex spec, keeping the space and sampling.
    pub fn map_specs<F>(&self, mut f: F) -> Result<OperatorFamily>
    where
        F: FnMut(u32, &OperatorSpec) -> Result<OperatorSpec>,
    {
        let mut assignment = BTreeMap::new();
        for (&v, spec) in &self.assignment {
            assignment.insert(v, f(v, spec)?);
        }
        OperatorFamily::new(self.space.clone(), assignment, self.edge_samples)
    }

    /// Deterministic sample enumeration: vertices in ascending order, then
    /// edges lexicographically with interior parameters s = j/(samples+1).
    pub fn sample(&self) -> SampledFamily {
        let labeling = self.labeling();
        let mut points = Vec::new();
        for &v in self.space.vertices() {
            points.push(SamplePoint {
                location: Location::Vertex(v),
                spec: self.assignment[&v].clone(),
                component: labeling.label_of(v).expect("vertex labeled"),
            });
        }
        for &(a, b) in self.space.edges() {
            let component = labeling.label_of(a).expect("vertex labeled");
            for step in 1..=self.edge_samples {
                let s = step as f64 / (self.edge_samples + 1) as f64;
                let spec = linear_combine(
                    Complex64::new(1.0 - s, 0.0),
                    &self.assignment[&a],
                    Complex64::new(s, 0.0),
                    &self.assignment[&b],
                )
                .expect("validated family specs are combinable");
                points.push(SamplePoint { location: Location::Edge { a, b, step }, spec, component });
            }
        }
        SampledFamily { points }
    }
}

/// One sampled point of a family.
#[derive(Debug, Clone)]
pub struct SamplePoint {
    pub location: Location,
    pub spec: OperatorSpec,
    pub component: u32,
}

/// Discretization of a family over vertices and edge interiors.
#[derive(Debug, Clone)]
pub struct SampledFamily {
    pub points: Vec<SamplePoint>,
}

/// The analytical index of a family: one integer per connected component,
/// keyed by the component's canonical label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexVector {
    entries: BTreeMap<u32, i64>,
}

impl IndexVector {
    pub fn new(entries: BTreeMap<u32, i64>) -> Self {
        IndexVector { entries }
    }

    pub fn entries(&self) -> &BTreeMap<u32, i64> {
        &self.entries
    }

    pub fn get(&self, component: u32) -> Option<i64> {
        self.entries.get(&component).copied()
    }

    /// Componentwise sum; the component sets must agree.
    pub fn checked_add(&self, other: &IndexVector) -> Option<IndexVector> {
        if self.entries.len() != other.entries.len() {
            return None;
        }
        let mut out = BTreeMap::new();
        for (&k, &v) in &self.entries {
            out.insert(k, v + other.entries.get(&k)?);
        }
        Some(IndexVector { entries: out })
    }
}

impl fmt::Display for IndexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, (k, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}: {v}")?;
        }
        write!(f, ")")
    }
}

/// ind(𝒯 − λ𝓘): the common pointwise index per component.
///
/// Errors when a sampled point is non-Fredholm at λ (the family is then not
/// a Fredholm family) or when two samples in one component disagree (which
/// for a genuinely continuous family can only be a discretization artifact,
/// so it is reported, never resolved silently).
pub fn family_index(
    fam: &OperatorFamily,
    lambda: Complex64,
    tol: &Tolerances,
) -> Result<IndexVector> {
    let sampled = fam.sample();
    let mut non_fredholm: Vec<(Location, f64)> = Vec::new();
    let mut per_component: BTreeMap<u32, Vec<(Location, i64)>> = BTreeMap::new();
    for point in &sampled.points {
        let report = fredholm::point_fredholm(&point.spec, lambda, tol);
        match report.index {
            Some(idx) => per_component
                .entry(point.component)
                .or_default()
                .push((point.location, idx)),
            None => non_fredholm.push((point.location, report.essential_gap)),
        }
    }
    if let Some(&(first, _)) = non_fredholm.first() {
        return Err(Error::NotFredholmFamily { witnesses: non_fredholm, first });
    }
    let mut entries = BTreeMap::new();
    for (component, indices) in per_component {
        let value = indices[0].1;
        if indices.iter().any(|&(_, idx)| idx != value) {
            return Err(Error::DiscretizationTooCoarse { component, details: indices });
        }
        entries.insert(component, value);
    }
    Ok(IndexVector { entries })
}

/// Vertexwise product family (𝒮𝒯)_x = 𝒮_x 𝒯_x.
///
/// The result's edge interpolation is the interpolation of the products;
/// additivity of the index is asserted on the sampled product family.
pub fn compose_families(s: &OperatorFamily, t: &OperatorFamily) -> Result<OperatorFamily> {
    if s.space != t.space {
        return Err(Error::SpaceMismatch);
    }
    let mut assignment = BTreeMap::new();
    for (&v, s_spec) in &s.assignment {
        assignment.insert(v, multiply(s_spec, &t.assignment[&v])?);
    }
    OperatorFamily::new(s.space.clone(), assignment, s.edge_samples.max(t.edge_samples))
}

/// Pointwise linear interpolation path t ↦ (1−t)·fam0 + t·fam1 over an
/// equispaced grid with `steps` interior points.
pub fn linear_path(
    fam0: &OperatorFamily,
    fam1: &OperatorFamily,
    steps: usize,
) -> Result<Vec<OperatorFamily>> {
    if fam0.space != fam1.space || fam0.edge_samples != fam1.edge_samples {
        return Err(Error::SpaceMismatch);
    }
    let mut path = Vec::with_capacity(steps + 2);
    path.push(fam0.clone());
    for j in 1..=steps {
        let t = j as f64 / (steps + 1) as f64;
        let fam = fam0.map_specs(|v, spec| {
            linear_combine(
                Complex64::new(1.0 - t, 0.0),
                spec,
                Complex64::new(t, 0.0),
                &fam1.assignment[&v],
            )
        })?;
        path.push(fam);
    }
    path.push(fam1.clone());
    Ok(path)
}

/// Witness of a Fredholm failure along a homotopy path.
#[derive(Debug, Clone)]
pub struct HomotopyWitness {
    /// Index into the path (t-grid position).
    pub path_step: usize,
    pub location: Location,
    pub essential_gap: f64,
}

/// Outcome of a homotopy-invariance check.
#[derive(Debug, Clone)]
pub struct HomotopyReport {
    /// True when every (t, x) sample along the path was Fredholm; the
    /// endpoint index vectors are then equal and included below.
    pub fredholm_path: bool,
    pub witness: Option<HomotopyWitness>,
    pub start_index: Option<IndexVector>,
    pub end_index: Option<IndexVector>,
}

/// Verifies a Fredholm homotopy between fam0 and fam1 at λ = 0.
///
/// If every sampled (t, x) is Fredholm, asserts the endpoint index vectors
/// agree and returns them; otherwise returns the first failure witness and
/// makes no claim. The path must start at fam0 and end at fam1.
pub fn homotopy_invariance_check(
    fam0: &OperatorFamily,
    fam1: &OperatorFamily,
    path: &[OperatorFamily],
    tol: &Tolerances,
) -> Result<HomotopyReport> {
    let (first, last) = match (path.first(), path.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(Error::PathEndpointsMismatch),
    };
    if first != fam0 || last != fam1 {
        return Err(Error::PathEndpointsMismatch);
    }
    for fam in path {
        if fam.space != fam0.space {
            return Err(Error::SpaceMismatch);
        }
    }

    for (step, fam) in path.iter().enumerate() {
        for point in &fam.sample().points {
            let report = fredholm::point_fredholm(&point.spec, Complex64::ZERO, tol);
            if !report.fredholm {
                return Ok(HomotopyReport {
                    fredholm_path: false,
                    witness: Some(HomotopyWitness {
                        path_step: step,
                        location: point.location,
                        essential_gap: report.essential_gap,
                    }),
                    start_index: None,
                    end_index: None,
                });
            }
        }
    }

    let start = family_index(fam0, Complex64::ZERO, tol)?;
    let end = family_index(fam1, Complex64::ZERO, tol)?;
    if start != end {
        // Fredholm along the whole sampled path but unequal endpoint indices:
        // the t-grid or edge sampling missed an index jump.
        return Err(Error::DiscretizationTooCoarse { component: 0, details: Vec::new() });
    }
    Ok(HomotopyReport {
        fredholm_path: true,
        witness: None,
        start_index: Some(start),
        end_index: Some(end),
    })
}

/// η = ½ · min essential gap over sampled points: any family within
/// essential-norm distance η of `fam` at every sample has the same index
/// vector at λ.
pub fn local_constancy_radius(
    fam: &OperatorFamily,
    lambda: Complex64,
    tol: &Tolerances,
) -> Result<f64> {
    let sampled = fam.sample();
    let mut min_gap = f64::INFINITY;
    let mut non_fredholm = Vec::new();
    for point in &sampled.points {
        let report: FredholmReport = fredholm::point_fredholm(&point.spec, lambda, tol);
        if !report.fredholm {
            non_fredholm.push((point.location, report.essential_gap));
        }
        min_gap = min_gap.min(report.essential_gap);
    }
    if let Some(&(first, _)) = non_fredholm.first() {
        return Err(Error::NotFredholmFamily { witnesses: non_fredholm, first });
    }
    Ok(0.5 * min_gap)
}

/// A family is compact exactly when every sampled spec has zero principal
/// part; within the model class the compacts are precisely the finite-rank
/// parts, and the condition is structural, never approximate.
pub fn is_compact_family(fam: &OperatorFamily) -> bool {
    fam.sample().points.iter().all(|p| p.spec.is_structurally_compact())
}

/// sup over sampled points of the operator-norm upper bound of a − b.
pub fn family_sup_distance(a: &OperatorFamily, b: &OperatorFamily) -> Result<f64> {
    if a.space != b.space || a.edge_samples != b.edge_samples {
        return Err(Error::SpaceMismatch);
    }
    let (sa, sb) = (a.sample(), b.sample());
    let mut sup: f64 = 0.0;
    for (pa, pb) in sa.points.iter().zip(sb.points.iter()) {
        let diff = linear_combine(Complex64::ONE, &pa.spec, -Complex64::ONE, &pb.spec)?;
        sup = sup.max(diff.norm_upper_bound());
    }
    Ok(sup)
}

/// sup over sampled points of the essential norm of a − b (the quotient-norm
/// distance, blind to finite-rank parts).
pub fn family_essential_distance(a: &OperatorFamily, b: &OperatorFamily) -> Result<f64> {
    if a.space != b.space || a.edge_samples != b.edge_samples {
        return Err(Error::SpaceMismatch);
    }
    let (sa, sb) = (a.sample(), b.sample());
    let mut sup: f64 = 0.0;
    for (pa, pb) in sa.points.iter().zip(sb.points.iter()) {
        let diff = linear_combine(Complex64::ONE, &pa.spec, -Complex64::ONE, &pb.spec)?;
        sup = sup.max(diff.essential_norm());
    }
    Ok(sup)
}

/// Outcome of the closed-ideal check.
#[derive(Debug, Clone)]
pub struct IdealClosureReport {
    /// Sup-norm distances seq[k] → limit, in order.
    pub distances: Vec<f64>,
    pub limit_compact: bool,
    /// Products of the limit with each sequence member stayed compact.
    pub ideal_products_compact: bool,
}

/// Checks the closed-ideal property on a concrete sequence: the members must
/// be compact families converging to `limit` (nonincreasing sup distances
/// ending below `convergence_tol`); returns whether the limit is compact and
/// whether products with the limit remain compact.
pub fn ideal_closure_check(
    seq: &[OperatorFamily],
    limit: &OperatorFamily,
    convergence_tol: f64,
) -> Result<IdealClosureReport> {
    if seq.is_empty() {
        return Err(Error::Inconclusive("empty sequence".into()));
    }
    for (k, fam) in seq.iter().enumerate() {
        if !is_compact_family(fam) {
            return Err(Error::Inconclusive(format!(
                "sequence member {k} is not a compact family"
            )));
        }
    }
    let mut distances = Vec::with_capacity(seq.len());
    for fam in seq {
        distances.push(family_sup_distance(fam, limit)?);
    }
    for w in distances.windows(2) {
        if w[1] > w[0] + 1e-12 {
            return Err(Error::Inconclusive(format!(
                "distances increase along the sequence ({} -> {})",
                w[0], w[1]
            )));
        }
    }
    let last = *distances.last().expect("nonempty");
    if last > convergence_tol {
        return Err(Error::Inconclusive(format!(
            "final distance {last:.3e} exceeds tolerance {convergence_tol:.3e}"
        )));
    }

    let mut ideal_products_compact = true;
    for fam in seq {
        let product = compose_families(limit, fam)?;
        if !is_compact_family(&product) {
            ideal_products_compact = false;
        }
    }

    Ok(IdealClosureReport {
        distances,
        limit_compact: is_compact_family(limit),
        ideal_products_compact,
    })
}

/// Invertibility of the image of 𝒯 − λ𝓘 in C(𝕏, L(X)/K(X)): every sampled
/// point keeps the Fredholm margin from λ. Equivalent to every sampled point
/// being Fredholm, which is the quotient-algebra Fredholm criterion.
pub fn quotient_invertible(fam: &OperatorFamily, lambda: Complex64, tol: &Tolerances) -> bool {
    fam.sample()
        .points
        .iter()
        .all(|p| fredholm::essential_gap(&p.spec, lambda, tol) >= tol.fredholm_margin)
}

/// Representative vertices of the family's components, ascending.
pub fn component_representatives(fam: &OperatorFamily) -> Vec<u32> {
    representatives(&fam.labeling())
}
