//! Pointwise Fredholm theory: essential gaps, winding-number indices, and an
//! independent SVD finite-section oracle for nullity and defect.
//!
//! The index is computed analytically (winding number of the symbol curve for
//! Toeplitz operators, always 0 for diagonal ones off the tail set); the SVD
//! route is kept as a cross-checking oracle because square finite sections of
//! Toeplitz operators are known to misreport kernels. The oracle therefore
//! uses rectangular sections with enough extra rows to cover the band, which
//! makes the kernel of the section agree with the finitely supported kernel
//! of the infinite operator.

use crate::error::{Error, Result};
use crate::op_model::{LaurentSymbol, OperatorKind, OperatorSpec};
use crate::tolerances::Tolerances;
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Pointwise Fredholm report for T − λ.
#[derive(Debug, Clone, PartialEq)]
pub struct FredholmReport {
    pub fredholm: bool,
    /// Defined only when `fredholm`.
    pub index: Option<i64>,
    /// Distance of λ to the essential spectrum of T.
    pub essential_gap: f64,
}

/// Oracle output: α(T − λ), β(T − λ) and whether the estimates agreed at two
/// consecutive truncation sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NullityDefect {
    pub nullity: usize,
    pub defect: usize,
    pub stabilized: bool,
}

impl NullityDefect {
    pub fn index(&self) -> i64 {
        self.nullity as i64 - self.defect as i64
    }
}

/// Precomputed samples of a symbol curve θ ↦ a(e^{iθ}).
///
/// `gap` and `winding` agree with the accumulated-argument route on the same
/// sample set; the crossing-count winding avoids transcendentals, which
/// matters in grid scans.
#[derive(Debug, Clone)]
pub struct SymbolTrace {
    samples: Vec<Complex64>,
}

impl SymbolTrace {
    pub fn new(sym: &LaurentSymbol, theta_samples: usize) -> Self {
        let n = theta_samples.max(1);
        let samples = (0..n).map(|j| sym.eval(TAU * j as f64 / n as f64)).collect();
        SymbolTrace { samples }
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// min_j |a(e^{iθ_j}) − λ|.
    pub fn gap(&self, lambda: Complex64) -> f64 {
        self.samples
            .iter()
            .map(|f| (f - lambda).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Winding of the sampled closed polyline around λ, by signed crossings
    /// of the horizontal ray. Equal to the accumulated-argument winding of
    /// the same polyline whenever no segment passes through λ.
    pub fn winding(&self, lambda: Complex64) -> i64 {
        let mut wind = 0i64;
        let n = self.samples.len();
        for j in 0..n {
            let p = self.samples[j] - lambda;
            let q = self.samples[(j + 1) % n] - lambda;
            let cross = p.re * q.im - p.im * q.re;
            if p.im <= 0.0 {
                if q.im > 0.0 && cross > 0.0 {
                    wind += 1;
                }
            } else if q.im <= 0.0 && cross < 0.0 {
                wind -= 1;
            }
        }
        wind
    }
}

/// Winding number of θ ↦ a(e^{iθ}) − λ around 0 by accumulated-argument
/// summation over `tol.theta_samples` uniform samples.
///
/// Preconditions: the sampled curve keeps distance ≥ `tol.fredholm_margin`
/// from λ, and the sample count exceeds 4·degree.
pub fn winding_number(sym: &LaurentSymbol, lambda: Complex64, tol: &Tolerances) -> Result<i64> {
    let degree = sym.degree();
    let min_samples = (4 * degree) as usize;
    if tol.theta_samples <= min_samples {
        return Err(Error::TooFewThetaSamples {
            samples: tol.theta_samples,
            degree,
            min_samples,
        });
    }
    let n = tol.theta_samples;
    let samples: Vec<Complex64> = (0..n)
        .map(|j| sym.eval(TAU * j as f64 / n as f64) - lambda)
        .collect();
    let gap = samples.iter().map(|f| f.norm()).fold(f64::INFINITY, f64::min);
    if gap < tol.fredholm_margin {
        return Err(Error::OnEssentialSpectrum { gap, margin: tol.fredholm_margin });
    }
    let mut total = 0.0f64;
    for j in 0..n {
        total += (samples[(j + 1) % n] / samples[j]).arg();
    }
    let turns = total / TAU;
    let rounded = turns.round();
    debug_assert!(
        (turns - rounded).abs() < 1e-6,
        "accumulated argument {total} is not close to a multiple of 2π"
    );
    Ok(rounded as i64)
}

pub(crate) fn effective_theta_samples(tol: &Tolerances, degree: i64) -> usize {
    tol.theta_samples.max(4 * degree as usize + 1)
}

/// Essential gap of a spec at λ (distance to the sampled symbol curve or to
/// the diagonal tail set). The finite-rank part plays no role.
pub fn essential_gap(spec: &OperatorSpec, lambda: Complex64, tol: &Tolerances) -> f64 {
    match spec.kind() {
        OperatorKind::Toeplitz(sym) => {
            let trace = SymbolTrace::new(sym, effective_theta_samples(tol, sym.degree()));
            trace.gap(lambda)
        }
        OperatorKind::Diagonal(d) => d.tail_gap(lambda),
    }
}

/// Fredholm test and analytical index of T − λ.
///
/// Toeplitz kind: Fredholm iff the symbol curve avoids λ by the margin;
/// index = −winding. Diagonal kind: Fredholm iff λ keeps the margin from the
/// tail set; index = 0. Never an error: non-Fredholm is a valid report.
pub fn point_fredholm(spec: &OperatorSpec, lambda: Complex64, tol: &Tolerances) -> FredholmReport {
    point_fredholm_with_margin(spec, lambda, tol, tol.fredholm_margin)
}

/// Same as `point_fredholm` with an explicit margin, used by grid scans that
/// widen the margin to the grid resolution.
pub fn point_fredholm_with_margin(
    spec: &OperatorSpec,
    lambda: Complex64,
    tol: &Tolerances,
    margin: f64,
) -> FredholmReport {
    match spec.kind() {
        OperatorKind::Toeplitz(sym) => {
            let samples = effective_theta_samples(tol, sym.degree());
            let trace = SymbolTrace::new(sym, samples);
            let gap = trace.gap(lambda);
            if gap >= margin {
                FredholmReport {
                    fredholm: true,
                    index: Some(-trace.winding(lambda)),
                    essential_gap: gap,
                }
            } else {
                FredholmReport { fredholm: false, index: None, essential_gap: gap }
            }
        }
        OperatorKind::Diagonal(d) => {
            let gap = d.tail_gap(lambda);
            FredholmReport {
                fredholm: gap >= margin,
                index: if gap >= margin { Some(0) } else { None },
                essential_gap: gap,
            }
        }
    }
}

/// Rectangular finite section of T − λ with `cols` columns and enough extra
/// rows that (T − λ)x is represented exactly for every x supported on the
/// first `cols` coordinates.
fn rect_section(spec: &OperatorSpec, lambda: Complex64, cols: usize) -> DMatrix<Complex64> {
    let band = match spec.kind() {
        OperatorKind::Toeplitz(sym) => sym.analytic_degree() as usize,
        OperatorKind::Diagonal(_) => 0,
    };
    let compact_rows = spec
        .compact()
        .terms()
        .iter()
        .filter_map(|(u, _)| u.max_index())
        .max()
        .map(|m| m + 1)
        .unwrap_or(0);
    let rows = (cols + band).max(compact_rows).max(cols);

    let mut m = DMatrix::<Complex64>::zeros(rows, cols);
    match spec.kind() {
        OperatorKind::Toeplitz(sym) => {
            for (k, c) in sym.coeffs() {
                for j in 0..cols {
                    let i = j as i64 + k;
                    if i >= 0 && (i as usize) < rows {
                        m[(i as usize, j)] += c;
                    }
                }
            }
        }
        OperatorKind::Diagonal(d) => {
            for j in 0..cols {
                m[(j, j)] = d.entry(j);
            }
        }
    }
    for (u, v) in spec.compact().terms() {
        for (i, ui) in u.entries().iter().enumerate() {
            if i >= rows {
                continue;
            }
            for (j, vj) in v.entries().iter().enumerate() {
                if j < cols {
                    m[(i, j)] += ui * vj.conj();
                }
            }
        }
    }
    for j in 0..cols {
        m[(j, j)] -= lambda;
    }
    m
}

fn small_singular_count(m: DMatrix<Complex64>, rel_tol: f64) -> usize {
    let svd = m.svd(false, false);
    let sigma = svd.singular_values;
    let max = sigma.iter().copied().fold(0.0f64, f64::max);
    if max == 0.0 {
        return sigma.len();
    }
    sigma.iter().filter(|&&s| s < rel_tol * max).count()
}

fn nullity_estimate(spec: &OperatorSpec, lambda: Complex64, n: usize, tol: &Tolerances) -> usize {
    small_singular_count(rect_section(spec, lambda, n), tol.rank_rel_tol)
}

/// SVD oracle for α(T − λ) and β(T − λ) at truncation sizes n and 2n.
///
/// The nullity comes from small singular values of the rectangular section
/// of T − λ, the defect from the section of the adjoint; `stabilized` means
/// both estimates agreed at the two sizes. Requires the spec to be Fredholm
/// at λ (the oracle is meaningless otherwise); n is clamped up to the
/// configured minimum `tol.oracle_n`.
pub fn nullity_defect_oracle(
    spec: &OperatorSpec,
    lambda: Complex64,
    n: usize,
    tol: &Tolerances,
) -> Result<NullityDefect> {
    let report = point_fredholm(spec, lambda, tol);
    if !report.fredholm {
        return Err(Error::NotFredholmPoint {
            gap: report.essential_gap,
            margin: tol.fredholm_margin,
        });
    }
    let n = n.max(tol.oracle_n).max(1);
    let adjoint = spec.adjoint();
    let mu = lambda.conj();

    let a1 = nullity_estimate(spec, lambda, n, tol);
    let a2 = nullity_estimate(spec, lambda, 2 * n, tol);
    let b1 = nullity_estimate(&adjoint, mu, n, tol);
    let b2 = nullity_estimate(&adjoint, mu, 2 * n, tol);

    Ok(NullityDefect {
        nullity: a2,
        defect: b2,
        stabilized: a1 == a2 && b1 == b2,
    })
}

/// Doubles the truncation until the oracle stabilizes (at most twice beyond
/// the starting size). Returns the report and the size it stabilized at.
pub fn nullity_defect_stabilized(
    spec: &OperatorSpec,
    lambda: Complex64,
    tol: &Tolerances,
) -> Result<(NullityDefect, usize)> {
    let mut n = tol.oracle_n.max(1);
    for _ in 0..3 {
        let nd = nullity_defect_oracle(spec, lambda, n, tol)?;
        if nd.stabilized {
            return Ok((nd, n));
        }
        n *= 2;
    }
    Err(Error::OracleUnstable { max_n: n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::op_model::{DiagonalCore, FiniteRankPart, SupportVec};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn shift() -> OperatorSpec {
        OperatorSpec::toeplitz(LaurentSymbol::monomial(1, Complex64::ONE))
    }

    fn backward_shift() -> OperatorSpec {
        OperatorSpec::toeplitz(LaurentSymbol::monomial(-1, Complex64::ONE))
    }

    #[test]
    fn winding_examples() {
        let tol = Tolerances::default();
        let z = LaurentSymbol::monomial(1, Complex64::ONE);
        assert_eq!(winding_number(&z, Complex64::ZERO, &tol).unwrap(), 1);
        assert_eq!(winding_number(&z, c(2.0, 0.0), &tol).unwrap(), 0);
        let z2 = LaurentSymbol::monomial(2, Complex64::ONE);
        assert_eq!(winding_number(&z2, Complex64::ZERO, &tol).unwrap(), 2);
    }

    #[test]
    fn winding_rejects_points_on_the_curve() {
        let tol = Tolerances::default();
        let z = LaurentSymbol::monomial(1, Complex64::ONE);
        assert!(matches!(
            winding_number(&z, c(1.0, 0.0), &tol),
            Err(Error::OnEssentialSpectrum { .. })
        ));
    }

    #[test]
    fn winding_enforces_sample_count() {
        let tol = Tolerances { theta_samples: 8, ..Tolerances::default() };
        let z3 = LaurentSymbol::monomial(3, Complex64::ONE);
        assert!(matches!(
            winding_number(&z3, Complex64::ZERO, &tol),
            Err(Error::TooFewThetaSamples { .. })
        ));
    }

    #[test]
    fn winding_stable_under_sample_doubling() {
        let base = Tolerances::default();
        let sym = LaurentSymbol::new([
            (2, c(1.0, 0.0)),
            (1, c(0.25, 0.1)),
            (-1, c(0.3, 0.0)),
        ]);
        let lambda = c(0.1, -0.2);
        let w1 = winding_number(&sym, lambda, &base).unwrap();
        let doubled = Tolerances { theta_samples: 2 * base.theta_samples, ..base };
        let w2 = winding_number(&sym, lambda, &doubled).unwrap();
        assert_eq!(w1, w2);
    }

    #[test]
    fn trace_winding_agrees_with_accumulated_argument() {
        let tol = Tolerances::default();
        let sym = LaurentSymbol::new([
            (1, c(1.0, 0.0)),
            (-2, c(0.4, 0.3)),
            (0, c(0.1, 0.0)),
        ]);
        let trace = SymbolTrace::new(&sym, tol.theta_samples);
        for &lambda in &[
            Complex64::ZERO,
            c(0.3, 0.4),
            c(-1.8, 0.1),
            c(0.0, 1.9),
            c(2.5, -2.5),
        ] {
            if trace.gap(lambda) < tol.fredholm_margin {
                continue;
            }
            let by_arg = winding_number(&sym, lambda, &tol).unwrap();
            assert_eq!(trace.winding(lambda), by_arg, "λ = {lambda}");
        }
    }

    #[test]
    fn point_fredholm_examples() {
        let tol = Tolerances::default();

        let r = point_fredholm(&shift(), Complex64::ZERO, &tol);
        assert!(r.fredholm);
        assert_eq!(r.index, Some(-1));
        assert!((r.essential_gap - 1.0).abs() < 1e-9);

        let r = point_fredholm(&backward_shift(), Complex64::ZERO, &tol);
        assert_eq!(r.index, Some(1));

        // Finite-rank part never affects the report.
        let perturbed = shift().with_compact(FiniteRankPart::rank_one(
            SupportVec::basis(3, c(50.0, 0.0)),
            SupportVec::basis(1, Complex64::ONE),
        ));
        let r = point_fredholm(&perturbed, Complex64::ZERO, &tol);
        assert!(r.fredholm);
        assert_eq!(r.index, Some(-1));
    }

    #[test]
    fn point_fredholm_diagonal() {
        let tol = Tolerances::default();
        let d = OperatorSpec::diagonal(
            DiagonalCore::new(vec![Complex64::ZERO, Complex64::ZERO], vec![Complex64::ONE])
                .unwrap(),
        );
        let r = point_fredholm(&d, Complex64::ZERO, &tol);
        assert!(r.fredholm);
        assert_eq!(r.index, Some(0));
        let r = point_fredholm(&d, Complex64::ONE, &tol);
        assert!(!r.fredholm);
        assert_eq!(r.index, None);
    }

    #[test]
    fn oracle_on_shift() {
        let tol = Tolerances::default();
        let nd = nullity_defect_oracle(&shift(), Complex64::ZERO, 64, &tol).unwrap();
        assert_eq!((nd.nullity, nd.defect, nd.stabilized), (0, 1, true));

        let nd = nullity_defect_oracle(&backward_shift(), Complex64::ZERO, 64, &tol).unwrap();
        assert_eq!((nd.nullity, nd.defect, nd.stabilized), (1, 0, true));
    }

    #[test]
    fn oracle_on_diagonal_with_double_zero() {
        let tol = Tolerances::default();
        let d = OperatorSpec::diagonal(
            DiagonalCore::new(vec![Complex64::ZERO, Complex64::ZERO], vec![Complex64::ONE])
                .unwrap(),
        );
        let nd = nullity_defect_oracle(&d, Complex64::ZERO, 64, &tol).unwrap();
        assert_eq!((nd.nullity, nd.defect, nd.stabilized), (2, 2, true));
    }

    #[test]
    fn oracle_cross_checks_perturbed_shift() {
        let tol = Tolerances::default();
        let spec = shift().with_compact(FiniteRankPart::rank_one(
            SupportVec::basis(3, c(50.0, 0.0)),
            SupportVec::basis(1, Complex64::ONE),
        ));
        let report = point_fredholm(&spec, Complex64::ZERO, &tol);
        let nd = nullity_defect_oracle(&spec, Complex64::ZERO, 128, &tol).unwrap();
        assert!(nd.stabilized);
        assert_eq!(nd.index(), report.index.unwrap());
        assert_eq!((nd.nullity, nd.defect), (0, 1));
    }

    #[test]
    fn oracle_requires_fredholm_point() {
        let tol = Tolerances::default();
        assert!(matches!(
            nullity_defect_oracle(&shift(), c(1.0, 0.0), 64, &tol),
            Err(Error::NotFredholmPoint { .. })
        ));
    }

    #[test]
    fn composition_adds_indices() {
        let tol = Tolerances::default();
        let s = OperatorSpec::toeplitz(LaurentSymbol::new([(1, c(1.0, 0.0)), (0, c(0.2, 0.1))]));
        let t = OperatorSpec::toeplitz(LaurentSymbol::new([(-2, c(1.0, 0.0)), (0, c(0.3, 0.0))]));
        let st = crate::op_model::multiply(&s, &t).unwrap();
        let is = point_fredholm(&s, Complex64::ZERO, &tol).index.unwrap();
        let it = point_fredholm(&t, Complex64::ZERO, &tol).index.unwrap();
        let ist = point_fredholm(&st, Complex64::ZERO, &tol).index.unwrap();
        assert_eq!(ist, is + it);
    }
}
