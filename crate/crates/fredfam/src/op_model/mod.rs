//! Concrete bounded operators on the square-summable sequence space.
//!
//! The model class is {Toeplitz with Laurent-polynomial symbol + finite rank}
//! ∪ {diagonal with periodic tail + finite rank}. It is closed under addition,
//! scaling and multiplication, with every product computed exactly: the
//! Toeplitz product remainder T(a)T(b) − T(ab) is a finite-rank Hankel term
//! for polynomial symbols, and all compact cross terms expand in closed form.

mod compact;
mod diagonal;
mod symbol;

pub use compact::{FiniteRankPart, SupportVec};
pub use diagonal::DiagonalCore;
pub use symbol::LaurentSymbol;

use crate::error::{Error, Result};
use crate::tolerances::ESSENTIAL_NORM_SAMPLES;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// The principal (non-compact) part of a model operator.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorKind {
    Toeplitz(LaurentSymbol),
    Diagonal(DiagonalCore),
}

/// A bounded operator T = principal + Σ u ⊗ v*.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec {
    kind: OperatorKind,
    compact: FiniteRankPart,
}

impl OperatorSpec {
    pub fn toeplitz(symbol: LaurentSymbol) -> Self {
        OperatorSpec { kind: OperatorKind::Toeplitz(symbol), compact: FiniteRankPart::empty() }
    }

    pub fn diagonal(core: DiagonalCore) -> Self {
        OperatorSpec { kind: OperatorKind::Diagonal(core), compact: FiniteRankPart::empty() }
    }

    pub fn with_compact(mut self, compact: FiniteRankPart) -> Self {
        self.compact = compact;
        self
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    pub fn compact(&self) -> &FiniteRankPart {
        &self.compact
    }

    pub fn symbol(&self) -> Option<&LaurentSymbol> {
        match &self.kind {
            OperatorKind::Toeplitz(s) => Some(s),
            OperatorKind::Diagonal(_) => None,
        }
    }

    pub fn diagonal_core(&self) -> Option<&DiagonalCore> {
        match &self.kind {
            OperatorKind::Diagonal(d) => Some(d),
            OperatorKind::Toeplitz(_) => None,
        }
    }

    /// True when the principal part vanishes, i.e. the operator is exactly
    /// its finite-rank part. Compactness in the model class is this
    /// structural condition, never a norm approximation.
    pub fn is_structurally_compact(&self) -> bool {
        match &self.kind {
            OperatorKind::Toeplitz(s) => s.is_zero(),
            OperatorKind::Diagonal(d) => d.is_zero(),
        }
    }

    /// Identity operator with a combinable shape.
    pub fn identity_like(&self) -> Self {
        match &self.kind {
            OperatorKind::Toeplitz(_) => OperatorSpec::toeplitz(LaurentSymbol::one()),
            OperatorKind::Diagonal(d) => OperatorSpec::diagonal(d.ones_like()),
        }
    }

    /// Zero operator with a combinable shape.
    pub fn zero_like(&self) -> Self {
        match &self.kind {
            OperatorKind::Toeplitz(_) => OperatorSpec::toeplitz(LaurentSymbol::zero()),
            OperatorKind::Diagonal(d) => {
                let zeros = d.combine(Complex64::ZERO, d, Complex64::ZERO).expect("same shape");
                OperatorSpec::diagonal(zeros)
            }
        }
    }

    pub fn same_shape(&self, other: &OperatorSpec) -> bool {
        match (&self.kind, &other.kind) {
            (OperatorKind::Toeplitz(_), OperatorKind::Toeplitz(_)) => true,
            (OperatorKind::Diagonal(a), OperatorKind::Diagonal(b)) => a.same_shape(b),
            _ => false,
        }
    }

    /// Smallest n for which `truncate` is admissible.
    pub fn min_truncation(&self) -> usize {
        let principal = match &self.kind {
            OperatorKind::Toeplitz(s) => s.degree() as usize,
            OperatorKind::Diagonal(d) => d.head().len(),
        };
        let compact = self.compact.max_support().unwrap_or(0);
        principal.max(compact) + 1
    }

    /// Leading n×n section; entries are the exact entry formulas.
    pub fn truncate(&self, n: usize) -> Result<DMatrix<Complex64>> {
        let min = self.min_truncation();
        if n < min {
            return Err(Error::TruncationTooSmall { given: n, min_admissible: min });
        }
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        match &self.kind {
            OperatorKind::Toeplitz(sym) => {
                for (k, c) in sym.coeffs() {
                    // entry (i, j) = c_{i−j}
                    for j in 0..n {
                        let i = j as i64 + k;
                        if (0..n as i64).contains(&i) {
                            m[(i as usize, j)] += c;
                        }
                    }
                }
            }
            OperatorKind::Diagonal(d) => {
                for i in 0..n {
                    m[(i, i)] = d.entry(i);
                }
            }
        }
        for (u, v) in self.compact.terms() {
            for (i, ui) in u.entries().iter().enumerate() {
                for (j, vj) in v.entries().iter().enumerate() {
                    m[(i, j)] += ui * vj.conj();
                }
            }
        }
        Ok(m)
    }

    /// T*: adjoint symbol / conjugate diagonal, with u ⊗ v* ↦ v ⊗ u*.
    pub fn adjoint(&self) -> Self {
        let kind = match &self.kind {
            OperatorKind::Toeplitz(s) => OperatorKind::Toeplitz(s.adjoint()),
            OperatorKind::Diagonal(d) => OperatorKind::Diagonal(d.conj()),
        };
        OperatorSpec { kind, compact: self.compact.adjoint() }
    }

    /// Applies the principal part to a finitely supported vector, exactly.
    fn principal_apply(&self, x: &SupportVec) -> SupportVec {
        match &self.kind {
            OperatorKind::Toeplitz(sym) => {
                if x.is_zero() || sym.is_zero() {
                    return SupportVec::zero();
                }
                let out_len = x.entries().len() + sym.analytic_degree() as usize;
                let mut out = vec![Complex64::ZERO; out_len];
                for (k, c) in sym.coeffs() {
                    for (j, xj) in x.entries().iter().enumerate() {
                        let i = j as i64 + k;
                        if (0..out_len as i64).contains(&i) {
                            out[i as usize] += c * xj;
                        }
                    }
                }
                SupportVec::new(out)
            }
            OperatorKind::Diagonal(d) => SupportVec::new(
                x.entries()
                    .iter()
                    .enumerate()
                    .map(|(i, xi)| d.entry(i) * xi)
                    .collect(),
            ),
        }
    }

    /// Applies the full operator to a finitely supported vector, exactly.
    pub fn apply(&self, x: &SupportVec) -> SupportVec {
        compact::add_vecs(&self.principal_apply(x), &self.compact.apply(x))
    }

    /// Essential norm at a given circle sampling: sup |a| for Toeplitz,
    /// max |tail| for diagonal. The compact part is invisible in the quotient.
    pub fn essential_norm_sampled(&self, theta_samples: usize) -> f64 {
        match &self.kind {
            OperatorKind::Toeplitz(s) => s.sup_norm_sampled(theta_samples),
            OperatorKind::Diagonal(d) => d.tail_max_abs(),
        }
    }

    pub fn essential_norm(&self) -> f64 {
        self.essential_norm_sampled(ESSENTIAL_NORM_SAMPLES)
    }

    /// Σ|c_k| (or max |d_j|) plus the exact norm of the finite-rank block:
    /// a finite operator-norm upper bound.
    pub fn norm_upper_bound(&self) -> f64 {
        let principal = match &self.kind {
            OperatorKind::Toeplitz(s) => s.one_norm(),
            OperatorKind::Diagonal(d) => d.max_abs(),
        };
        principal + self.compact.norm()
    }
}

/// α·s + β·t within the model class. The kinds (and diagonal shapes) must
/// match; compact parts concatenate with scaled terms.
pub fn linear_combine(
    alpha: Complex64,
    s: &OperatorSpec,
    beta: Complex64,
    t: &OperatorSpec,
) -> Result<OperatorSpec> {
    let kind = match (&s.kind, &t.kind) {
        (OperatorKind::Toeplitz(a), OperatorKind::Toeplitz(b)) => {
            OperatorKind::Toeplitz(a.scaled(alpha).add(&b.scaled(beta)))
        }
        (OperatorKind::Diagonal(a), OperatorKind::Diagonal(b)) => {
            OperatorKind::Diagonal(a.combine(alpha, b, beta)?)
        }
        _ => return Err(Error::KindMismatch),
    };
    let compact = s.compact.scaled(alpha).concat(&t.compact.scaled(beta));
    Ok(OperatorSpec { kind, compact })
}

/// s·t within the model class; the represented infinite operators are exactly
/// equal to the product.
///
/// Toeplitz case: T(a)T(b) = T(ab) − H(a)H(b̃) with
/// H(a)[i][p] = a_{i+p+1} and H(b̃)[p][j] = b_{−p−1−j}, so the remainder is a
/// sum of min(deg⁺a, deg⁻b) rank-one terms with finite support. Compact cross
/// terms expand as A(u⊗v*) = (Au)⊗v*, (u⊗v*)B = u⊗(B*v)* and
/// (u₁⊗v₁*)(u₂⊗v₂*) = ⟨u₂,v₁⟩ u₁⊗v₂*.
pub fn multiply(s: &OperatorSpec, t: &OperatorSpec) -> Result<OperatorSpec> {
    let kind = match (&s.kind, &t.kind) {
        (OperatorKind::Toeplitz(a), OperatorKind::Toeplitz(b)) => {
            OperatorKind::Toeplitz(a.mul(b))
        }
        (OperatorKind::Diagonal(a), OperatorKind::Diagonal(b)) => OperatorKind::Diagonal(a.mul(b)?),
        _ => return Err(Error::KindMismatch),
    };

    let mut terms: Vec<(SupportVec, SupportVec)> = Vec::new();

    if let (OperatorKind::Toeplitz(a), OperatorKind::Toeplitz(b)) = (&s.kind, &t.kind) {
        let depth = a.analytic_degree().min(b.coanalytic_degree());
        for p in 0..depth {
            let u = SupportVec::new(
                (0..(a.analytic_degree() - p) as usize)
                    .map(|i| -a.coeff(i as i64 + p + 1))
                    .collect(),
            );
            let v = SupportVec::new(
                (0..(b.coanalytic_degree() - p) as usize)
                    .map(|j| b.coeff(-(p + 1 + j as i64)).conj())
                    .collect(),
            );
            terms.push((u, v));
        }
    }

    let s_pure = OperatorSpec { kind: s.kind.clone(), compact: FiniteRankPart::empty() };
    let t_pure = OperatorSpec { kind: t.kind.clone(), compact: FiniteRankPart::empty() };
    let t_pure_adj = t_pure.adjoint();

    // A · K₂
    for (u, v) in t.compact.terms() {
        terms.push((s_pure.principal_apply(u), v.clone()));
    }
    // K₁ · B
    for (u, v) in s.compact.terms() {
        terms.push((u.clone(), t_pure_adj.principal_apply(v)));
    }
    // K₁ · K₂
    for (u1, v1) in s.compact.terms() {
        for (u2, v2) in t.compact.terms() {
            let w = u2.dot_conj(v1);
            terms.push((u1.scaled(w), v2.clone()));
        }
    }

    Ok(OperatorSpec { kind, compact: FiniteRankPart::new(terms) })
}
