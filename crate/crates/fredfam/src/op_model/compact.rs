//! Finite-rank operators Σ u ⊗ v* with finitely supported u, v.

use num_complex::Complex64;

/// A finitely supported vector over the standard basis, stored densely with
/// trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportVec {
    entries: Vec<Complex64>,
}

impl SupportVec {
    pub fn new(entries: Vec<Complex64>) -> Self {
        let mut entries = entries;
        while entries.last() == Some(&Complex64::ZERO) {
            entries.pop();
        }
        SupportVec { entries }
    }

    pub fn zero() -> Self {
        SupportVec { entries: Vec::new() }
    }

    /// Basis vector e_i scaled by `c`.
    pub fn basis(i: usize, c: Complex64) -> Self {
        let mut entries = vec![Complex64::ZERO; i + 1];
        entries[i] = c;
        SupportVec::new(entries)
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (usize, Complex64)>) -> Self {
        let pairs: Vec<(usize, Complex64)> = entries.into_iter().collect();
        let len = pairs.iter().map(|&(i, _)| i + 1).max().unwrap_or(0);
        let mut dense = vec![Complex64::ZERO; len];
        for (i, c) in pairs {
            dense[i] += c;
        }
        SupportVec::new(dense)
    }

    pub fn get(&self, i: usize) -> Complex64 {
        self.entries.get(i).copied().unwrap_or(Complex64::ZERO)
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest index in the support, if any.
    pub fn max_index(&self) -> Option<usize> {
        if self.entries.is_empty() {
            None
        } else {
            Some(self.entries.len() - 1)
        }
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        SupportVec::new(self.entries.iter().map(|&c| alpha * c).collect())
    }

    /// ⟨self, other⟩ = Σ self_i · conj(other_i).
    pub fn dot_conj(&self, other: &SupportVec) -> Complex64 {
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Finite-rank part Σ_t u_t ⊗ v_t*, acting as x ↦ Σ_t ⟨x, v_t⟩ u_t.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteRankPart {
    terms: Vec<(SupportVec, SupportVec)>,
}

impl FiniteRankPart {
    pub fn new(terms: Vec<(SupportVec, SupportVec)>) -> Self {
        let terms = terms
            .into_iter()
            .filter(|(u, v)| !u.is_zero() && !v.is_zero())
            .collect();
        FiniteRankPart { terms }
    }

    pub fn empty() -> Self {
        FiniteRankPart { terms: Vec::new() }
    }

    /// Single term u ⊗ v*.
    pub fn rank_one(u: SupportVec, v: SupportVec) -> Self {
        FiniteRankPart::new(vec![(u, v)])
    }

    pub fn terms(&self) -> &[(SupportVec, SupportVec)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Upper bound on the rank of the represented operator.
    pub fn rank_bound(&self) -> usize {
        self.terms.len()
    }

    /// Largest basis index appearing in any u or v (None when empty).
    pub fn max_support(&self) -> Option<usize> {
        self.terms
            .iter()
            .flat_map(|(u, v)| [u.max_index(), v.max_index()])
            .flatten()
            .max()
    }

    /// Matrix entry (i, j) of the represented operator: Σ_t u_t[i] · conj(v_t[j]).
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.terms
            .iter()
            .map(|(u, v)| u.get(i) * v.get(j).conj())
            .sum()
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        if alpha == Complex64::ZERO {
            return FiniteRankPart::empty();
        }
        FiniteRankPart::new(
            self.terms
                .iter()
                .map(|(u, v)| (u.scaled(alpha), v.clone()))
                .collect(),
        )
    }

    pub fn concat(&self, other: &FiniteRankPart) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        FiniteRankPart::new(terms)
    }

    /// (Σ u ⊗ v*)* = Σ v ⊗ u*.
    pub fn adjoint(&self) -> Self {
        FiniteRankPart::new(
            self.terms
                .iter()
                .map(|(u, v)| (v.clone(), u.clone()))
                .collect(),
        )
    }

    /// Applies the operator to a finitely supported vector.
    pub fn apply(&self, x: &SupportVec) -> SupportVec {
        let mut acc = SupportVec::zero();
        for (u, v) in &self.terms {
            let w = x.dot_conj(v);
            if w != Complex64::ZERO {
                acc = add_vecs(&acc, &u.scaled(w));
            }
        }
        acc
    }

    /// Exact operator norm: the largest singular value of the assembled
    /// finite block. Always ≤ the crude Σ‖u‖‖v‖ bound, and 0 when terms
    /// cancel, which matters when measuring distances between families.
    pub fn norm(&self) -> f64 {
        let (rows, cols) = match (
            self.terms.iter().filter_map(|(u, _)| u.max_index()).max(),
            self.terms.iter().filter_map(|(_, v)| v.max_index()).max(),
        ) {
            (Some(r), Some(c)) => (r + 1, c + 1),
            _ => return 0.0,
        };
        let m = nalgebra::DMatrix::<Complex64>::from_fn(rows, cols, |i, j| self.entry(i, j));
        m.svd(false, false)
            .singular_values
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }
}

pub(crate) fn add_vecs(a: &SupportVec, b: &SupportVec) -> SupportVec {
    let len = a.entries().len().max(b.entries().len());
    SupportVec::new((0..len).map(|i| a.get(i) + b.get(i)).collect())
}
