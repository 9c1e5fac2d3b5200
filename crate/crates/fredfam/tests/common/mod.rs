//! Deterministic corpus generators shared by the test suites.
//!
//! Toeplitz symbols come in two controlled flavors:
//!
//! - root-placed symbols: a − λ = z^{−m} · c·∏(z − rᵢ) with the roots kept
//!   away from the unit circle, so the winding at λ (hence the index) is
//!   known by construction and finite sections stabilize quickly;
//! - dominant-monomial symbols: z^w plus a perturbation with coefficient
//!   mass < 1, so the winding stays w under convex combinations along edges.

#![allow(dead_code)]

use fredfam::family::OperatorFamily;
use fredfam::op_model::{
    linear_combine, DiagonalCore, FiniteRankPart, LaurentSymbol, OperatorSpec, SupportVec,
};
use fredfam::param_space::ParamSpace;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::f64::consts::TAU;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_unit(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..TAU))
}

pub fn random_in_annulus(rng: &mut ChaCha8Rng, r_min: f64, r_max: f64) -> Complex64 {
    Complex64::from_polar(rng.gen_range(r_min..r_max), rng.gen_range(0.0..TAU))
}

/// A root-placed spec: returns (spec, λ, expected index at λ).
///
/// Symbol degree ≤ 4 on both sides, essential gap at λ between ~0.3 and 0.6,
/// all roots of a − λ at modulus ≤ 0.6 or ≥ 1.7.
pub fn root_placed_spec(
    rng: &mut ChaCha8Rng,
    max_rank: usize,
) -> (OperatorSpec, Complex64, i64) {
    let total_degree = rng.gen_range(1..=4usize);
    let m_minus = rng.gen_range(0..=total_degree.min(2)) as i64;
    let n_in = rng.gen_range(0..=total_degree);
    let mut roots = Vec::with_capacity(total_degree);
    for k in 0..total_degree {
        if k < n_in {
            roots.push(random_in_annulus(rng, 0.25, 0.6));
        } else {
            roots.push(random_in_annulus(rng, 1.7, 2.8));
        }
    }
    // q(z) = ∏(z − rᵢ), then rescaled so min |q| on the circle sits in [0.3, 0.6].
    let mut q = vec![Complex64::ONE];
    for &r in &roots {
        let mut next = vec![Complex64::ZERO; q.len() + 1];
        for (j, &b) in q.iter().enumerate() {
            next[j + 1] += b;
            next[j] -= r * b;
        }
        q = next;
    }
    let min_q = (0..512)
        .map(|j| {
            let z = Complex64::from_polar(1.0, TAU * j as f64 / 512.0);
            q.iter()
                .rev()
                .fold(Complex64::ZERO, |acc, &coeff| acc * z + coeff)
                .norm()
        })
        .fold(f64::INFINITY, f64::min);
    let scale = random_unit(rng) * (rng.gen_range(0.3..0.6) / min_q);

    let lambda = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let mut coeffs: Vec<(i64, Complex64)> = q
        .iter()
        .enumerate()
        .map(|(j, &coeff)| (j as i64 - m_minus, scale * coeff))
        .collect();
    coeffs.push((0, lambda));
    let symbol = LaurentSymbol::new(coeffs);

    let rank = rng.gen_range(0..=max_rank);
    let spec = OperatorSpec::toeplitz(symbol).with_compact(random_compact(rng, rank, 6, 2.0));
    let index = -(n_in as i64 - m_minus);
    (spec, lambda, index)
}

/// Random finite-rank part with `rank` terms supported on [0, max_support].
pub fn random_compact(
    rng: &mut ChaCha8Rng,
    rank: usize,
    max_support: usize,
    amplitude: f64,
) -> FiniteRankPart {
    let mut terms = Vec::with_capacity(rank);
    for _ in 0..rank {
        let vec = |rng: &mut ChaCha8Rng| {
            let len = rng.gen_range(1..=max_support + 1);
            SupportVec::new(
                (0..len)
                    .map(|_| {
                        c(
                            rng.gen_range(-amplitude..amplitude),
                            rng.gen_range(-amplitude..amplitude),
                        )
                    })
                    .collect(),
            )
        };
        terms.push((vec(rng), vec(rng)));
    }
    FiniteRankPart::new(terms)
}

/// z^w plus perturbation coefficients with total mass ≤ `mass` < 1, so the
/// winding around any |λ| ≤ 1 − mass − margin is exactly w and around any
/// |λ| ≥ 1 + mass + margin is 0, even after convex combination.
pub fn dominant_symbol(rng: &mut ChaCha8Rng, winding: i64, mass: f64) -> LaurentSymbol {
    let mut coeffs = vec![(winding, Complex64::ONE)];
    let mut budget = mass;
    for k in -2i64..=2 {
        if k == winding || budget <= 1e-3 {
            continue;
        }
        let amp = rng.gen_range(0.0..budget * 0.6);
        budget -= amp;
        coeffs.push((k, random_unit(rng) * amp));
    }
    LaurentSymbol::new(coeffs)
}

/// Family of dominant-monomial Toeplitz operators with common winding.
pub fn dominant_family(
    rng: &mut ChaCha8Rng,
    space: &ParamSpace,
    winding: i64,
    mass: f64,
    with_compacts: bool,
) -> OperatorFamily {
    let assignment: BTreeMap<u32, OperatorSpec> = space
        .vertices()
        .iter()
        .map(|&v| {
            let mut spec = OperatorSpec::toeplitz(dominant_symbol(rng, winding, mass));
            if with_compacts {
                let rank = rng.gen_range(0..=2);
                spec = spec.with_compact(random_compact(rng, rank, 4, 1.0));
            }
            (v, spec)
        })
        .collect();
    OperatorFamily::new(space.clone(), assignment, 8).expect("valid family")
}

/// Family of diagonal operators with shared tail shape.
pub fn diagonal_family(rng: &mut ChaCha8Rng, space: &ParamSpace) -> OperatorFamily {
    let head_len = rng.gen_range(0..=3usize);
    let tail_len = rng.gen_range(1..=3usize);
    let base_tails: Vec<Complex64> = (0..tail_len)
        .map(|_| c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)))
        .collect();
    let assignment: BTreeMap<u32, OperatorSpec> = space
        .vertices()
        .iter()
        .map(|&v| {
            let head = (0..head_len)
                .map(|_| c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)))
                .collect();
            let tails = base_tails
                .iter()
                .map(|t| t + c(rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.05)))
                .collect();
            (v, OperatorSpec::diagonal(DiagonalCore::new(head, tails).expect("tails nonempty")))
        })
        .collect();
    OperatorFamily::new(space.clone(), assignment, 8).expect("valid family")
}

/// Pure finite-rank (compact) family on a space.
pub fn compact_family(rng: &mut ChaCha8Rng, space: &ParamSpace) -> OperatorFamily {
    let assignment: BTreeMap<u32, OperatorSpec> = space
        .vertices()
        .iter()
        .map(|&v| {
            let rank = rng.gen_range(1..=3);
            (
                v,
                OperatorSpec::toeplitz(LaurentSymbol::zero())
                    .with_compact(random_compact(rng, rank, 5, 1.5)),
            )
        })
        .collect();
    OperatorFamily::new(space.clone(), assignment, 8).expect("valid family")
}

/// Vertexwise sum of two families on the same space.
pub fn add_families(a: &OperatorFamily, b: &OperatorFamily) -> OperatorFamily {
    a.map_specs(|v, spec| {
        linear_combine(
            Complex64::ONE,
            spec,
            Complex64::ONE,
            b.spec_at(v).expect("same space"),
        )
    })
    .expect("combinable families")
}

/// The standard sample spaces used across the corpus.
pub fn sample_spaces() -> Vec<ParamSpace> {
    vec![
        ParamSpace::point(),
        ParamSpace::new(vec![0, 1], vec![]).unwrap(),
        ParamSpace::path(3).unwrap(),
        ParamSpace::cycle(4).unwrap(),
        ParamSpace::new(
            (0..8).collect(),
            vec![(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4)],
        )
        .unwrap(),
    ]
}

/// Mixed Toeplitz/diagonal corpus of Fredholm-at-0-friendly families.
pub fn corpus(rng: &mut ChaCha8Rng, toeplitz_count: usize, diagonal_count: usize) -> Vec<OperatorFamily> {
    let spaces = sample_spaces();
    let mut fams = Vec::new();
    for i in 0..toeplitz_count {
        let space = &spaces[i % spaces.len()];
        let winding = rng.gen_range(-3..=3i64);
        fams.push(dominant_family(rng, space, winding, 0.3, i % 2 == 0));
    }
    for i in 0..diagonal_count {
        let space = &spaces[i % spaces.len()];
        fams.push(diagonal_family(rng, space));
    }
    fams
}
