//! Polynomial functional calculus on families: spectral mapping for the
//! Fredholm spectrum and the root-counting formula for the index of p(𝒯).

use crate::error::{Error, Result};
use crate::family::{family_index, IndexVector, OperatorFamily};
use crate::fredholm::{self, essential_gap};
use crate::op_model::{linear_combine, multiply, OperatorKind, OperatorSpec};
use crate::param_space::representatives;
use crate::tolerances::Tolerances;
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::TAU;

/// Roots closer than this merge into one cluster whose multiplicity is the
/// cluster size; companion-matrix accuracy at the degrees handled here sits
/// far below it.
pub const ROOT_CLUSTER_TOL: f64 = 1e-7;

/// A polynomial with complex coefficients, ascending degree, degree ≥ 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    /// Trims trailing zero coefficients and requires degree ≥ 1 afterwards.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        let mut coeffs = coeffs;
        while coeffs.last() == Some(&Complex64::ZERO) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(Error::InvalidPoly(
                "degree must be at least 1 (non-constant)".into(),
            ));
        }
        Ok(Poly { coeffs })
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Result<Self> {
        let mut coeffs = vec![Complex64::ONE];
        for &r in roots {
            let mut next = vec![Complex64::ZERO; coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= r * c;
            }
            coeffs = next;
        }
        Poly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Derivative; None when the derivative would be constant 0 (impossible
    /// here since degree ≥ 1, so this always yields the coefficient list).
    pub fn derivative_coeffs(&self) -> Vec<Complex64> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect()
    }

    fn eval_derivative(&self, z: Complex64) -> Complex64 {
        let d = self.derivative_coeffs();
        let mut acc = Complex64::ZERO;
        for &c in d.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Poly) -> Poly {
        let mut coeffs = vec![Complex64::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (j, &a) in self.coeffs.iter().enumerate() {
            for (k, &b) in other.coeffs.iter().enumerate() {
                coeffs[j + k] += a * b;
            }
        }
        Poly::new(coeffs).expect("product of nonconstant polynomials is nonconstant")
    }
}

/// Roots with multiplicities; Σ multiplicities = degree.
#[derive(Debug, Clone)]
pub struct RootList {
    pub roots: Vec<(Complex64, usize)>,
}

/// Roots via companion-matrix eigenvalues, with nearby roots merged.
pub fn poly_roots(p: &Poly) -> RootList {
    let d = p.degree();
    let lead = p.coeffs[d];
    let mut companion = DMatrix::<Complex64>::zeros(d, d);
    for i in 1..d {
        companion[(i, i - 1)] = Complex64::ONE;
    }
    for i in 0..d {
        companion[(i, d - 1)] = -p.coeffs[i] / lead;
    }
    let raw: Vec<Complex64> = companion
        .clone()
        .eigenvalues()
        .map(|v| v.as_slice().to_vec())
        .or_else(|| {
            companion.try_schur(1e-13, 200_000).map(|schur| {
                let t = schur.unpack().1;
                (0..d).map(|i| t[(i, i)]).collect()
            })
        })
        .expect("companion matrix eigenvalue computation failed to converge");

    let mut sorted = raw;
    sorted.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).expect("finite roots"));

    let mut clusters: Vec<(Complex64, Vec<Complex64>)> = Vec::new();
    'outer: for root in sorted {
        for (center, members) in clusters.iter_mut() {
            if (root - *center).norm() <= ROOT_CLUSTER_TOL {
                members.push(root);
                let n = members.len() as f64;
                *center = members.iter().sum::<Complex64>() / n;
                continue 'outer;
            }
        }
        clusters.push((root, vec![root]));
    }
    RootList {
        roots: clusters.into_iter().map(|(c, m)| (c, m.len())).collect(),
    }
}

/// p(𝒯): vertexwise Horner evaluation inside the model class, so every
/// finite-rank correction accumulates exactly.
pub fn poly_apply(fam: &OperatorFamily, p: &Poly) -> Result<OperatorFamily> {
    fam.map_specs(|_, spec| horner(spec, p))
}

fn horner(spec: &OperatorSpec, p: &Poly) -> Result<OperatorSpec> {
    let identity = spec.identity_like();
    let d = p.degree();
    let mut acc = linear_combine(p.coeffs[d], &identity, Complex64::ZERO, &identity)?;
    for k in (0..d).rev() {
        acc = multiply(&acc, spec)?;
        acc = linear_combine(Complex64::ONE, &acc, p.coeffs[k], &identity)?;
    }
    Ok(acc)
}

/// Sampled Fredholm spectrum σ_F(𝒯) = ∪_x σ_F(𝒯_x): symbol-curve samples for
/// Toeplitz families, tail values for diagonal ones.
pub fn fredholm_spectrum(fam: &OperatorFamily, theta_samples: usize) -> Vec<Complex64> {
    let mut cloud = Vec::new();
    for point in fam.sample().points {
        match point.spec.kind() {
            OperatorKind::Toeplitz(sym) => {
                for j in 0..theta_samples {
                    cloud.push(sym.eval(TAU * j as f64 / theta_samples as f64));
                }
            }
            OperatorKind::Diagonal(d) => cloud.extend_from_slice(d.tails()),
        }
    }
    cloud
}

/// Outcome of a spectral-mapping comparison.
#[derive(Debug, Clone, Copy)]
pub struct SpectralMapReport {
    pub hausdorff: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Compares f(σ_F(𝒯)) against σ_F(f(𝒯)) as sample clouds and reports the
/// symmetric Hausdorff distance; the tolerance is 10/θ_samples scaled by
/// max |p′| on the curve.
pub fn spectral_map_check(
    fam: &OperatorFamily,
    p: &Poly,
    theta_samples: usize,
) -> Result<SpectralMapReport> {
    let source = fredholm_spectrum(fam, theta_samples);
    let mapped: Vec<Complex64> = source.iter().map(|&w| p.eval(w)).collect();
    let image_family = poly_apply(fam, p)?;
    let image = fredholm_spectrum(&image_family, theta_samples);

    let max_dp = source
        .iter()
        .map(|&w| p.eval_derivative(w).norm())
        .fold(0.0f64, f64::max);
    let tolerance = 10.0 / theta_samples as f64 * max_dp.max(1.0);
    let hausdorff = hausdorff_distance(&mapped, &image);
    Ok(SpectralMapReport { hausdorff, tolerance, pass: hausdorff <= tolerance })
}

/// ind f(𝒯) via the zero-counting formula: for each component representative
/// x, Σᵢ nᵢ · ind(𝒯_x − λᵢ) over the roots λᵢ of p with multiplicity nᵢ.
/// Roots where the pointwise index is 0 contribute nothing, so resolvent-set
/// membership never needs to be decided.
///
/// Every root must keep the Fredholm margin from the essential spectrum of
/// every sampled point, which is exactly the condition for f(𝒯) to be a
/// Fredholm family.
pub fn index_via_roots(fam: &OperatorFamily, p: &Poly, tol: &Tolerances) -> Result<IndexVector> {
    let roots = poly_roots(p);
    let sampled = fam.sample();
    for &(root, _) in &roots.roots {
        for point in &sampled.points {
            let gap = essential_gap(&point.spec, root, tol);
            if gap < tol.fredholm_margin {
                return Err(Error::RootOnEssentialCurve { root, margin: tol.fredholm_margin });
            }
        }
    }

    let labeling = fam.labeling();
    let mut entries = std::collections::BTreeMap::new();
    for rep in representatives(&labeling) {
        let spec = fam.spec_at(rep).expect("representative is a vertex");
        let mut total = 0i64;
        for &(root, multiplicity) in &roots.roots {
            let report = fredholm::point_fredholm(spec, root, tol);
            let idx = report
                .index
                .expect("gap checked above, point is Fredholm");
            total += multiplicity as i64 * idx;
        }
        entries.insert(rep, total);
    }
    Ok(IndexVector::new(entries))
}

/// Cross-check helper: the root formula against the direct index of p(𝒯).
pub fn index_via_poly_family(
    fam: &OperatorFamily,
    p: &Poly,
    tol: &Tolerances,
) -> Result<IndexVector> {
    family_index(&poly_apply(fam, p)?, Complex64::ZERO, tol)
}

/// Symmetric Hausdorff distance between finite point clouds.
///
/// Uses a uniform bucket grid for nearest-neighbor queries; exact, not
/// approximate.
pub fn hausdorff_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}

fn directed_hausdorff(from: &[Complex64], to: &[Complex64]) -> f64 {
    if from.is_empty() {
        return 0.0;
    }
    if to.is_empty() {
        return f64::INFINITY;
    }
    let index = BucketIndex::new(to);
    from.iter()
        .map(|&p| index.nearest_distance(p))
        .fold(0.0, f64::max)
}

struct BucketIndex<'a> {
    points: &'a [Complex64],
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl<'a> BucketIndex<'a> {
    fn new(points: &'a [Complex64]) -> Self {
        let (mut re_min, mut re_max) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut im_min, mut im_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in points {
            re_min = re_min.min(p.re);
            re_max = re_max.max(p.re);
            im_min = im_min.min(p.im);
            im_max = im_max.max(p.im);
        }
        let span = (re_max - re_min).max(im_max - im_min).max(1e-12);
        let cell = span / (points.len() as f64).sqrt().max(1.0);
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            buckets
                .entry(Self::key(p.re, p.im, cell))
                .or_default()
                .push(i);
        }
        BucketIndex { points, cell, buckets }
    }

    fn key(re: f64, im: f64, cell: f64) -> (i64, i64) {
        ((re / cell).floor() as i64, (im / cell).floor() as i64)
    }

    fn nearest_distance(&self, q: Complex64) -> f64 {
        let (qi, qj) = Self::key(q.re, q.im, self.cell);
        let mut best = f64::INFINITY;
        let mut ring = 0i64;
        loop {
            // Any point in a cell at Chebyshev ring r is at least (r−1)·cell away.
            if best.is_finite() && best <= (ring - 1) as f64 * self.cell {
                return best;
            }
            let mut saw_cells = false;
            for di in -ring..=ring {
                for dj in -ring..=ring {
                    if di.abs() != ring && dj.abs() != ring {
                        continue;
                    }
                    if let Some(ids) = self.buckets.get(&(qi + di, qj + dj)) {
                        saw_cells = true;
                        for &id in ids {
                            best = best.min((self.points[id] - q).norm());
                        }
                    }
                }
            }
            let _ = saw_cells;
            ring += 1;
            if ring > 4_000_000 {
                // All buckets are finitely far away; unreachable in practice.
                return best;
            }
        }
    }
}
