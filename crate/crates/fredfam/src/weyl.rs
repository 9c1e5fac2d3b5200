//! Weyl spectra of operators and families on complex-plane grids, Kuratowski
//! set limits, upper semicontinuity and the limit theorems.
//!
//! Grid scans widen the Fredholm margin to one grid step: a grid point counts
//! as non-Fredholm when its essential gap is below ≈h. This is what makes the
//! rasterized essential spectrum (points within h of the curve) a subset of
//! the computed Weyl set, keeps set-valued answers robust against floating
//! rounding on points at distance exactly h, and stays inside the ε-dilation
//! slack every set-limit statement already carries.

use crate::error::{Error, Result};
use crate::family::{family_sup_distance, OperatorFamily};
use crate::fredholm::{effective_theta_samples, SymbolTrace};
use crate::op_model::{OperatorKind, OperatorSpec};
use crate::tolerances::Tolerances;
use num_complex::Complex64;
use std::collections::BTreeSet;

/// Relative shrink applied to grid-resolution thresholds so that points at
/// distance exactly h classify deterministically.
const RASTER_SHRINK: f64 = 1e-9;

/// A rectangular complex-plane grid with spacing h.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGrid {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub h: f64,
}

impl ComplexGrid {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64, h: f64) -> Result<Self> {
        if !(re_min < re_max && im_min < im_max) {
            return Err(Error::InvalidGrid("bounds must be ordered".into()));
        }
        if !(h > 0.0) {
            return Err(Error::InvalidGrid("step must be positive".into()));
        }
        let steps_re = (re_max - re_min) / h;
        let steps_im = (im_max - im_min) / h;
        if steps_re > 1e4 || steps_im > 1e4 {
            return Err(Error::InvalidGrid("more than 10^4 steps per axis".into()));
        }
        Ok(ComplexGrid { re_min, re_max, im_min, im_max, h })
    }

    /// Centered square grid [−r, r]².
    pub fn square(r: f64, h: f64) -> Result<Self> {
        ComplexGrid::new(-r, r, -r, r, h)
    }

    pub fn nx(&self) -> u32 {
        ((self.re_max - self.re_min) / self.h + 1e-9).floor() as u32 + 1
    }

    pub fn ny(&self) -> u32 {
        ((self.im_max - self.im_min) / self.h + 1e-9).floor() as u32 + 1
    }

    pub fn point(&self, ix: u32, iy: u32) -> Complex64 {
        Complex64::new(
            self.re_min + ix as f64 * self.h,
            self.im_min + iy as f64 * self.h,
        )
    }

    pub fn contains_index(&self, ix: u32, iy: u32) -> bool {
        ix < self.nx() && iy < self.ny()
    }

    /// All grid indices, re fastest.
    pub fn indices(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let (nx, ny) = (self.nx(), self.ny());
        (0..ny).flat_map(move |iy| (0..nx).map(move |ix| (ix, iy)))
    }
}

/// A finite subset of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSet {
    grid: ComplexGrid,
    members: BTreeSet<(u32, u32)>,
}

impl GridSet {
    pub fn new(grid: ComplexGrid, members: BTreeSet<(u32, u32)>) -> Result<Self> {
        for &(ix, iy) in &members {
            if !grid.contains_index(ix, iy) {
                return Err(Error::InvalidGrid(format!("member ({ix},{iy}) out of bounds")));
            }
        }
        Ok(GridSet { grid, members })
    }

    pub fn empty(grid: ComplexGrid) -> Self {
        GridSet { grid, members: BTreeSet::new() }
    }

    pub fn grid(&self) -> &ComplexGrid {
        &self.grid
    }

    pub fn members(&self) -> &BTreeSet<(u32, u32)> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, ix: u32, iy: u32) -> bool {
        self.members.contains(&(ix, iy))
    }

    /// Member points in row-major order (constant-im rows, re ascending).
    pub fn points_row_major(&self) -> Vec<Complex64> {
        let mut idx: Vec<(u32, u32)> = self.members.iter().copied().collect();
        idx.sort_by_key(|&(ix, iy)| (iy, ix));
        idx.into_iter().map(|(ix, iy)| self.grid.point(ix, iy)).collect()
    }

    pub fn union(&self, other: &GridSet) -> Result<GridSet> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let members = self.members.union(&other.members).copied().collect();
        Ok(GridSet { grid: self.grid.clone(), members })
    }

    pub fn is_subset(&self, other: &GridSet) -> Result<bool> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self.members.is_subset(&other.members))
    }

    /// Closed ε-dilation within the grid.
    pub fn dilate(&self, epsilon: f64) -> GridSet {
        let offsets = disc_offsets(self.grid.h, epsilon);
        let (nx, ny) = (self.grid.nx() as i64, self.grid.ny() as i64);
        let mut members = BTreeSet::new();
        for &(ix, iy) in &self.members {
            for &(di, dj) in &offsets {
                let (x, y) = (ix as i64 + di, iy as i64 + dj);
                if x >= 0 && y >= 0 && x < nx && y < ny {
                    members.insert((x as u32, y as u32));
                }
            }
        }
        GridSet { grid: self.grid.clone(), members }
    }

    /// A ⊆ dilate(B, ε) and B ⊆ dilate(A, ε): equality up to ε.
    pub fn equals_within(&self, other: &GridSet, epsilon: f64) -> Result<bool> {
        Ok(self.is_subset(&other.dilate(epsilon))? && other.is_subset(&self.dilate(epsilon))?)
    }
}

/// Grid-index offsets within Euclidean radius ε (with the raster shrink so a
/// radius of exactly k·h includes the axis point at k steps).
fn disc_offsets(h: f64, epsilon: f64) -> Vec<(i64, i64)> {
    let r = (epsilon / h + RASTER_SHRINK).floor() as i64;
    let limit = (epsilon / h) * (epsilon / h) * (1.0 + RASTER_SHRINK);
    let mut offsets = Vec::new();
    for di in -r..=r {
        for dj in -r..=r {
            if (di * di + dj * dj) as f64 <= limit {
                offsets.push((di, dj));
            }
        }
    }
    offsets
}

fn grid_margin(tol: &Tolerances, h: f64) -> f64 {
    tol.fredholm_margin.max(h * (1.0 - RASTER_SHRINK))
}

/// σ_W(T) ∩ grid: the points where T − λ fails to be Fredholm of index 0,
/// with the Fredholm margin widened to the grid resolution.
pub fn weyl_spectrum_point(spec: &OperatorSpec, grid: &ComplexGrid, tol: &Tolerances) -> GridSet {
    let margin = grid_margin(tol, grid.h);
    let mut members = BTreeSet::new();
    match spec.kind() {
        OperatorKind::Toeplitz(sym) => {
            let trace = SymbolTrace::new(sym, effective_theta_samples(tol, sym.degree()));
            for (ix, iy) in grid.indices() {
                let lambda = grid.point(ix, iy);
                let weyl = trace.gap(lambda) >= margin && trace.winding(lambda) == 0;
                if !weyl {
                    members.insert((ix, iy));
                }
            }
        }
        OperatorKind::Diagonal(d) => {
            for (ix, iy) in grid.indices() {
                if d.tail_gap(grid.point(ix, iy)) < margin {
                    members.insert((ix, iy));
                }
            }
        }
    }
    GridSet { grid: grid.clone(), members }
}

/// σ_W(𝒯) ∩ grid as the union of the pointwise Weyl spectra over all sampled
/// points of the family.
pub fn weyl_spectrum_family(fam: &OperatorFamily, grid: &ComplexGrid, tol: &Tolerances) -> GridSet {
    let mut acc = GridSet::empty(grid.clone());
    for point in fam.sample().points {
        let part = weyl_spectrum_point(&point.spec, grid, tol);
        acc = acc.union(&part).expect("same grid");
    }
    acc
}

/// σ_W(𝒯) ∩ grid straight from the definition: λ is a member unless the
/// family is Fredholm at λ with index 0 at every sampled point. Used to
/// cross-check the union route.
pub fn weyl_spectrum_family_direct(
    fam: &OperatorFamily,
    grid: &ComplexGrid,
    tol: &Tolerances,
) -> GridSet {
    let margin = grid_margin(tol, grid.h);
    let sampled = fam.sample();
    let traces: Vec<Option<SymbolTrace>> = sampled
        .points
        .iter()
        .map(|p| {
            p.spec.symbol().map(|sym| {
                SymbolTrace::new(sym, effective_theta_samples(tol, sym.degree()))
            })
        })
        .collect();
    let mut members = BTreeSet::new();
    for (ix, iy) in grid.indices() {
        let lambda = grid.point(ix, iy);
        let weyl_everywhere = sampled.points.iter().zip(&traces).all(|(p, trace)| {
            match (p.spec.kind(), trace) {
                (OperatorKind::Toeplitz(_), Some(t)) => {
                    t.gap(lambda) >= margin && t.winding(lambda) == 0
                }
                (OperatorKind::Diagonal(d), _) => d.tail_gap(lambda) >= margin,
                _ => unreachable!("trace built iff Toeplitz"),
            }
        });
        if !weyl_everywhere {
            members.insert((ix, iy));
        }
    }
    GridSet { grid: grid.clone(), members }
}

/// σ(Π(𝒯)) ∩ grid: points within one grid step of the union of essential
/// curves / tail sets over the sampled family.
pub fn essential_spectrum_family(
    fam: &OperatorFamily,
    grid: &ComplexGrid,
    tol: &Tolerances,
) -> GridSet {
    let threshold = grid.h * (1.0 - RASTER_SHRINK);
    let sampled = fam.sample();
    let mut members = BTreeSet::new();
    for point in &sampled.points {
        match point.spec.kind() {
            OperatorKind::Toeplitz(sym) => {
                let trace = SymbolTrace::new(sym, effective_theta_samples(tol, sym.degree()));
                for (ix, iy) in grid.indices() {
                    if trace.gap(grid.point(ix, iy)) < threshold {
                        members.insert((ix, iy));
                    }
                }
            }
            OperatorKind::Diagonal(d) => {
                for (ix, iy) in grid.indices() {
                    if d.tail_gap(grid.point(ix, iy)) < threshold {
                        members.insert((ix, iy));
                    }
                }
            }
        }
    }
    GridSet { grid: grid.clone(), members }
}

/// Discrete Kuratowski limits of a grid-set sequence.
#[derive(Debug, Clone)]
pub struct SetLimitReport {
    pub liminf: GridSet,
    pub limsup: GridSet,
    /// limsup ⊆ dilate(liminf, ε): the two limits agree up to ε.
    pub converged: bool,
    pub epsilon: f64,
}

/// Tail-half realization of lim inf / lim sup with ε-dilation.
///
/// Membership is restricted to points witnessed by some tail set (otherwise
/// the limits of a constant sequence would come out ε-dilated): with T the
/// last half of the sequence and U = ∪_{n∈T} Aₙ,
/// liminf = {g ∈ U : dist(g, Aₙ) ≤ ε for all n ∈ T} and
/// limsup = {g ∈ U : dist(g, Aₙ) ≤ ε for at least half of n ∈ T}.
pub fn kuratowski_limits(seq: &[GridSet], epsilon: f64) -> Result<SetLimitReport> {
    if seq.len() < 8 {
        return Err(Error::Inconclusive(format!(
            "need at least 8 sets to take a tail, got {}",
            seq.len()
        )));
    }
    let grid = seq[0].grid().clone();
    for s in seq {
        if *s.grid() != grid {
            return Err(Error::GridMismatch);
        }
    }
    let tail = &seq[(seq.len() + 1) / 2..];
    let (nx, ny) = (grid.nx() as usize, grid.ny() as usize);

    let mut union: BTreeSet<(u32, u32)> = BTreeSet::new();
    for s in tail {
        union.extend(s.members().iter().copied());
    }

    // Per-point count of tail sets that come ε-close.
    let mut close_counts = vec![0u32; nx * ny];
    for s in tail {
        let dilated = s.dilate(epsilon);
        for &(ix, iy) in dilated.members() {
            close_counts[iy as usize * nx + ix as usize] += 1;
        }
    }

    let tail_len = tail.len() as u32;
    let mut liminf = BTreeSet::new();
    let mut limsup = BTreeSet::new();
    for &(ix, iy) in &union {
        let count = close_counts[iy as usize * nx + ix as usize];
        if count == tail_len {
            liminf.insert((ix, iy));
        }
        if 2 * count >= tail_len {
            limsup.insert((ix, iy));
        }
    }

    let liminf = GridSet { grid: grid.clone(), members: liminf };
    let limsup = GridSet { grid, members: limsup };
    let converged = limsup.is_subset(&liminf.dilate(epsilon))?;
    Ok(SetLimitReport { liminf, limsup, converged, epsilon })
}

/// Outcome of an upper-semicontinuity check.
#[derive(Debug, Clone)]
pub struct SemicontinuityReport {
    /// limsup σ_W(𝒯ₙ) ⊆ dilate(σ_W(𝒯), ε).
    pub holds: bool,
    /// A grid point violating the inclusion, if any.
    pub witness: Option<Complex64>,
    pub limsup: GridSet,
    pub limit_weyl: GridSet,
}

fn require_convergence(
    seq_fams: &[OperatorFamily],
    limit_fam: &OperatorFamily,
    budget: f64,
) -> Result<Vec<f64>> {
    let mut distances = Vec::with_capacity(seq_fams.len());
    for fam in seq_fams {
        distances.push(family_sup_distance(fam, limit_fam)?);
    }
    for w in distances.windows(2) {
        if w[1] > w[0] + 1e-12 {
            return Err(Error::Inconclusive(format!(
                "family distances increase along the sequence ({} -> {})",
                w[0], w[1]
            )));
        }
    }
    match distances.last() {
        Some(&last) if last <= budget => Ok(distances),
        Some(&last) => Err(Error::Inconclusive(format!(
            "final family distance {last:.3e} exceeds the set-limit resolution {budget:.3e}"
        ))),
        None => Err(Error::Inconclusive("empty family sequence".into())),
    }
}

/// Upper semicontinuity of 𝒯 ↦ σ_W(𝒯): limsup σ_W(𝒯ₙ) ⊆ dilate(σ_W(𝒯), ε)
/// for a sequence converging to 𝒯 (nonincreasing sup distances ending below ε).
pub fn semicontinuity_check(
    seq_fams: &[OperatorFamily],
    limit_fam: &OperatorFamily,
    grid: &ComplexGrid,
    epsilon: f64,
    tol: &Tolerances,
) -> Result<SemicontinuityReport> {
    require_convergence(seq_fams, limit_fam, epsilon)?;
    let sets: Vec<GridSet> = seq_fams
        .iter()
        .map(|fam| weyl_spectrum_family(fam, grid, tol))
        .collect();
    let limits = kuratowski_limits(&sets, epsilon)?;
    let limit_weyl = weyl_spectrum_family(limit_fam, grid, tol);
    let target = limit_weyl.dilate(epsilon);
    let mut witness = None;
    for &(ix, iy) in limits.limsup.members() {
        if !target.contains(ix, iy) {
            witness = Some(grid.point(ix, iy));
            break;
        }
    }
    Ok(SemicontinuityReport {
        holds: witness.is_none(),
        witness,
        limsup: limits.limsup,
        limit_weyl,
    })
}

/// Hypothesis under which lim σ_W(𝒯ₙ) = σ_W(𝒯) is asserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitScenario {
    /// 𝒯ₙ𝒯 = 𝒯𝒯ₙ for each n, certified structurally and numerically.
    Commuting,
    /// σ(𝒯) totally disconnected: diagonal kind.
    TotallyDisconnected,
    /// All pointwise operators normal: diagonal kind, no finite-rank part.
    Normal,
    /// σ(Π(𝒯ₙ)) → σ(Π(𝒯)) as grid sets.
    EssentialConvergence,
}

impl std::fmt::Display for LimitScenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            LimitScenario::Commuting => "commuting",
            LimitScenario::TotallyDisconnected => "totally_disconnected",
            LimitScenario::Normal => "normal",
            LimitScenario::EssentialConvergence => "essential_convergence",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for LimitScenario {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "commuting" => Ok(LimitScenario::Commuting),
            "totally_disconnected" => Ok(LimitScenario::TotallyDisconnected),
            "normal" => Ok(LimitScenario::Normal),
            "essential_convergence" => Ok(LimitScenario::EssentialConvergence),
            other => Err(format!("unknown limit scenario `{other}`")),
        }
    }
}

/// Max-abs entry of the commutator of size-64 truncations.
fn truncation_commutator(s: &OperatorSpec, t: &OperatorSpec) -> Result<f64> {
    let n = 64usize.max(s.min_truncation()).max(t.min_truncation());
    let a = s.truncate(n)?;
    let b = t.truncate(n)?;
    let comm = &a * &b - &b * &a;
    Ok(comm.iter().map(|c| c.norm()).fold(0.0, f64::max))
}

/// Structural certificate that two model operators commute exactly: both
/// free of finite-rank parts and either diagonal with matching shapes, or
/// Toeplitz with both symbols analytic, both co-analytic, or affinely
/// dependent.
fn commuting_certificate(s: &OperatorSpec, t: &OperatorSpec) -> bool {
    if !s.compact().is_empty() || !t.compact().is_empty() {
        return false;
    }
    match (s.kind(), t.kind()) {
        (OperatorKind::Diagonal(a), OperatorKind::Diagonal(b)) => a.same_shape(b),
        (OperatorKind::Toeplitz(a), OperatorKind::Toeplitz(b)) => {
            let both_analytic = a.coanalytic_degree() == 0 && b.coanalytic_degree() == 0;
            let both_coanalytic = a.analytic_degree() == 0 && b.analytic_degree() == 0;
            both_analytic || both_coanalytic || affinely_dependent(a, b)
        }
        _ => false,
    }
}

/// a = α·b + β·1 (or b constant), checked on the nonconstant coefficients.
fn affinely_dependent(
    a: &crate::op_model::LaurentSymbol,
    b: &crate::op_model::LaurentSymbol,
) -> bool {
    let nonconst = |s: &crate::op_model::LaurentSymbol| {
        s.coeffs().filter(|&(k, _)| k != 0).collect::<Vec<_>>()
    };
    let (na, nb) = (nonconst(a), nonconst(b));
    if na.is_empty() || nb.is_empty() {
        return true;
    }
    if na.len() != nb.len() {
        return false;
    }
    let (k0, b0) = nb[0];
    let alpha = a.coeff(k0) / b0;
    na.iter().all(|&(k, ca)| (ca - alpha * b.coeff(k)).norm() <= 1e-12 * (1.0 + ca.norm()))
        && nb.iter().all(|&(k, _)| a.coeff(k) != Complex64::ZERO || alpha == Complex64::ZERO)
}

fn verify_scenario_hypothesis(
    scenario: LimitScenario,
    seq_fams: &[OperatorFamily],
    limit_fam: &OperatorFamily,
    grid: &ComplexGrid,
    epsilon: f64,
    tol: &Tolerances,
) -> Result<()> {
    match scenario {
        LimitScenario::Commuting => {
            let limit_sample = limit_fam.sample();
            for (k, fam) in seq_fams.iter().enumerate() {
                if fam.space() != limit_fam.space()
                    || fam.edge_samples() != limit_fam.edge_samples()
                {
                    return Err(Error::SpaceMismatch);
                }
                let sample = fam.sample();
                for (p, q) in sample.points.iter().zip(limit_sample.points.iter()) {
                    if !commuting_certificate(&p.spec, &q.spec) {
                        return Err(Error::HypothesisViolation(format!(
                            "no structural commuting certificate for member {k} at {}",
                            p.location
                        )));
                    }
                    let comm = truncation_commutator(&p.spec, &q.spec)?;
                    if comm > 1e-10 {
                        return Err(Error::HypothesisViolation(format!(
                            "truncation commutator {comm:.3e} at {} for member {k}",
                            p.location
                        )));
                    }
                }
            }
            Ok(())
        }
        LimitScenario::TotallyDisconnected => {
            let all = seq_fams.iter().chain(std::iter::once(limit_fam));
            for fam in all {
                for point in fam.sample().points {
                    if point.spec.diagonal_core().is_none() {
                        return Err(Error::HypothesisViolation(format!(
                            "non-diagonal operator at {}; finite spectra require the diagonal kind",
                            point.location
                        )));
                    }
                }
            }
            Ok(())
        }
        LimitScenario::Normal => {
            let all = seq_fams.iter().chain(std::iter::once(limit_fam));
            for fam in all {
                for point in fam.sample().points {
                    let diagonal = point.spec.diagonal_core().is_some();
                    if !diagonal || !point.spec.compact().is_empty() {
                        return Err(Error::HypothesisViolation(format!(
                            "operator at {} is not structurally normal \
                             (diagonal kind with empty finite-rank part required)",
                            point.location
                        )));
                    }
                }
            }
            Ok(())
        }
        LimitScenario::EssentialConvergence => {
            let ess_sets: Vec<GridSet> = seq_fams
                .iter()
                .map(|fam| essential_spectrum_family(fam, grid, tol))
                .collect();
            let ess_limits = kuratowski_limits(&ess_sets, epsilon)?;
            let ess_limit = essential_spectrum_family(limit_fam, grid, tol);
            if !ess_limits.converged
                || !ess_limits.limsup.equals_within(&ess_limit, epsilon)?
            {
                return Err(Error::HypothesisViolation(
                    "essential spectra do not converge to the limit's essential spectrum".into(),
                ));
            }
            Ok(())
        }
    }
}

/// Checks lim σ_W(𝒯ₙ) = σ_W(𝒯) under one of the theorem hypotheses.
///
/// The hypothesis is verified first (structurally, plus truncation
/// commutators for the commuting case); a violation is an error, not a
/// falsified claim. On success, returns whether the Kuratowski limit of the
/// Weyl sets converged and matches σ_W(𝒯) under ε-dilation, with the report.
pub fn limit_scenario_check(
    scenario: LimitScenario,
    seq_fams: &[OperatorFamily],
    limit_fam: &OperatorFamily,
    grid: &ComplexGrid,
    epsilon: f64,
    tol: &Tolerances,
) -> Result<(bool, SetLimitReport)> {
    verify_scenario_hypothesis(scenario, seq_fams, limit_fam, grid, epsilon, tol)?;
    require_convergence(seq_fams, limit_fam, epsilon)?;

    let sets: Vec<GridSet> = seq_fams
        .iter()
        .map(|fam| weyl_spectrum_family(fam, grid, tol))
        .collect();
    let report = kuratowski_limits(&sets, epsilon)?;
    let limit_weyl = weyl_spectrum_family(limit_fam, grid, tol);
    let matches = report.converged
        && report.limsup.equals_within(&limit_weyl, epsilon)?
        && limit_weyl.is_subset(&report.liminf.dilate(epsilon))?;
    Ok((matches, report))
}
