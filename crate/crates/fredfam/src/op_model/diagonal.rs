//! Diagonal operators with a finite head and a periodic tail.
//!
//! Position j carries head[j] for j < head length, and tails cycle
//! round-robin afterwards, so every tail value is hit infinitely often. The
//! spectrum is set(head) ∪ set(tails); the essential spectrum is set(tails).

use crate::error::{Error, Result};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalCore {
    head: Vec<Complex64>,
    tails: Vec<Complex64>,
}

impl DiagonalCore {
    pub fn new(head: Vec<Complex64>, tails: Vec<Complex64>) -> Result<Self> {
        if tails.is_empty() {
            return Err(Error::Structure("diagonal tail list is empty".into()));
        }
        Ok(DiagonalCore { head, tails })
    }

    pub fn head(&self) -> &[Complex64] {
        &self.head
    }

    pub fn tails(&self) -> &[Complex64] {
        &self.tails
    }

    /// Diagonal entry d_j.
    pub fn entry(&self, j: usize) -> Complex64 {
        if j < self.head.len() {
            self.head[j]
        } else {
            self.tails[(j - self.head.len()) % self.tails.len()]
        }
    }

    pub fn same_shape(&self, other: &DiagonalCore) -> bool {
        self.head.len() == other.head.len() && self.tails.len() == other.tails.len()
    }

    pub fn is_zero(&self) -> bool {
        self.head.iter().all(|c| *c == Complex64::ZERO)
            && self.tails.iter().all(|c| *c == Complex64::ZERO)
    }

    /// Identity with the same head/tail shape.
    pub fn ones_like(&self) -> Self {
        DiagonalCore {
            head: vec![Complex64::ONE; self.head.len()],
            tails: vec![Complex64::ONE; self.tails.len()],
        }
    }

    pub fn conj(&self) -> Self {
        DiagonalCore {
            head: self.head.iter().map(|c| c.conj()).collect(),
            tails: self.tails.iter().map(|c| c.conj()).collect(),
        }
    }

    /// α·self + β·other, entrywise; shapes must match.
    pub fn combine(&self, alpha: Complex64, other: &DiagonalCore, beta: Complex64) -> Result<Self> {
        if !self.same_shape(other) {
            return Err(Error::KindMismatch);
        }
        Ok(DiagonalCore {
            head: self
                .head
                .iter()
                .zip(&other.head)
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
            tails: self
                .tails
                .iter()
                .zip(&other.tails)
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        })
    }

    /// Entrywise product; shapes must match so the periodic parts stay aligned.
    pub fn mul(&self, other: &DiagonalCore) -> Result<Self> {
        if !self.same_shape(other) {
            return Err(Error::KindMismatch);
        }
        Ok(DiagonalCore {
            head: self.head.iter().zip(&other.head).map(|(a, b)| a * b).collect(),
            tails: self.tails.iter().zip(&other.tails).map(|(a, b)| a * b).collect(),
        })
    }

    /// max |d_j| over head and tails: the exact operator norm.
    pub fn max_abs(&self) -> f64 {
        self.head
            .iter()
            .chain(self.tails.iter())
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// max |t| over the tail set: the essential norm.
    pub fn tail_max_abs(&self) -> f64 {
        self.tails.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Distance of λ to the essential spectrum (the tail set).
    pub fn tail_gap(&self, lambda: Complex64) -> f64 {
        self.tails
            .iter()
            .map(|t| (t - lambda).norm())
            .fold(f64::INFINITY, f64::min)
    }
}
