//! Laurent-polynomial symbols a(z) = Σ c_k z^k on the unit circle.

use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::TAU;

/// Finitely supported symbol; exact-zero coefficients are pruned so that the
/// zero symbol is structurally recognizable.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentSymbol {
    coeffs: BTreeMap<i64, Complex64>,
}

impl LaurentSymbol {
    /// Builds a symbol from (exponent, coefficient) pairs; duplicate
    /// exponents are summed.
    pub fn new(coeffs: impl IntoIterator<Item = (i64, Complex64)>) -> Self {
        let mut map: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (k, c) in coeffs {
            *map.entry(k).or_insert(Complex64::ZERO) += c;
        }
        map.retain(|_, c| *c != Complex64::ZERO);
        LaurentSymbol { coeffs: map }
    }

    pub fn zero() -> Self {
        LaurentSymbol { coeffs: BTreeMap::new() }
    }

    /// The constant symbol 1.
    pub fn one() -> Self {
        LaurentSymbol::monomial(0, Complex64::ONE)
    }

    pub fn monomial(k: i64, c: Complex64) -> Self {
        LaurentSymbol::new([(k, c)])
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        self.coeffs.get(&k).copied().unwrap_or(Complex64::ZERO)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// m = max |k| over the support (0 for the zero symbol).
    pub fn degree(&self) -> i64 {
        self.coeffs.keys().map(|k| k.abs()).max().unwrap_or(0)
    }

    /// Largest positive exponent in the support (0 if none).
    pub fn analytic_degree(&self) -> i64 {
        self.coeffs.keys().copied().filter(|&k| k > 0).max().unwrap_or(0)
    }

    /// Largest |k| over negative exponents in the support (0 if none).
    pub fn coanalytic_degree(&self) -> i64 {
        self.coeffs.keys().copied().filter(|&k| k < 0).min().map(|k| -k).unwrap_or(0)
    }

    /// a(e^{iθ}) = Σ c_k e^{ikθ}.
    pub fn eval(&self, theta: f64) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(&k, &c)| c * Complex64::from_polar(1.0, k as f64 * theta))
            .sum()
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        LaurentSymbol::new(self.coeffs().map(|(k, c)| (k, alpha * c)))
    }

    pub fn add(&self, other: &LaurentSymbol) -> Self {
        LaurentSymbol::new(self.coeffs().chain(other.coeffs()))
    }

    /// Pointwise product on the circle, i.e. coefficient convolution.
    pub fn mul(&self, other: &LaurentSymbol) -> Self {
        let mut terms = Vec::with_capacity(self.coeffs.len() * other.coeffs.len());
        for (j, a) in self.coeffs() {
            for (k, b) in other.coeffs() {
                terms.push((j + k, a * b));
            }
        }
        LaurentSymbol::new(terms)
    }

    /// Symbol of the adjoint Toeplitz operator: ā_k = conj(a_{−k}).
    pub fn adjoint(&self) -> Self {
        LaurentSymbol::new(self.coeffs().map(|(k, c)| (-k, c.conj())))
    }

    /// Σ |c_k|, an upper bound for the operator norm of the Toeplitz part.
    pub fn one_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    /// max over `samples` uniform circle points of |a(e^{iθ})|.
    pub fn sup_norm_sampled(&self, samples: usize) -> f64 {
        (0..samples)
            .map(|j| self.eval(TAU * j as f64 / samples as f64).norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_examples() {
        let z = LaurentSymbol::monomial(1, Complex64::ONE);
        assert!((z.eval(0.0) - c(1.0, 0.0)).norm() < 1e-15);

        let cosine = LaurentSymbol::new([(1, Complex64::ONE), (-1, Complex64::ONE)]);
        assert!(cosine.eval(FRAC_PI_2).norm() < 1e-15);
        assert!((cosine.eval(PI) - c(-2.0, 0.0)).norm() < 1e-14);

        let constant = LaurentSymbol::monomial(0, c(3.0, 0.0));
        assert!((constant.eval(1.234) - c(3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_coefficients_are_pruned() {
        let s = LaurentSymbol::new([(1, Complex64::ZERO), (2, Complex64::ONE), (2, -Complex64::ONE)]);
        assert!(s.is_zero());
        assert_eq!(s.degree(), 0);
    }

    #[test]
    fn product_is_convolution() {
        let z = LaurentSymbol::monomial(1, Complex64::ONE);
        let zinv = LaurentSymbol::monomial(-1, Complex64::ONE);
        assert_eq!(z.mul(&zinv), LaurentSymbol::one());

        let a = LaurentSymbol::new([(0, c(1.0, 0.0)), (1, c(2.0, 0.0))]);
        let sq = a.mul(&a);
        assert_eq!(sq.coeff(0), c(1.0, 0.0));
        assert_eq!(sq.coeff(1), c(4.0, 0.0));
        assert_eq!(sq.coeff(2), c(4.0, 0.0));
    }

    #[test]
    fn adjoint_flips_and_conjugates() {
        let a = LaurentSymbol::new([(2, c(1.0, 1.0)), (-1, c(0.0, 3.0))]);
        let adj = a.adjoint();
        assert_eq!(adj.coeff(-2), c(1.0, -1.0));
        assert_eq!(adj.coeff(1), c(0.0, -3.0));
        assert_eq!(a.analytic_degree(), 2);
        assert_eq!(a.coanalytic_degree(), 1);
        assert_eq!(adj.analytic_degree(), 1);
        assert_eq!(adj.coanalytic_degree(), 2);
    }
}
