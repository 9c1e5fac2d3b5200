//! Property tests for the algebraic and spectral invariants.

mod common;

use common::*;
use fredfam::calc::{poly_apply, spectral_map_check, Poly};
use fredfam::family::{
    compose_families, family_index, is_compact_family, local_constancy_radius, OperatorFamily,
};
use fredfam::fredholm::{
    nullity_defect_stabilized, point_fredholm, winding_number, SymbolTrace,
};
use fredfam::op_model::{
    linear_combine, multiply, FiniteRankPart, LaurentSymbol, OperatorSpec, SupportVec,
};
use fredfam::param_space::{components, ParamSpace};
use fredfam::weyl::{
    essential_spectrum_family, kuratowski_limits, weyl_spectrum_family,
    weyl_spectrum_family_direct, weyl_spectrum_point, ComplexGrid, GridSet,
};
use fredfam::Tolerances;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn complex_in(r: f64) -> impl Strategy<Value = Complex64> {
    (-r..r, -r..r).prop_map(|(re, im)| Complex64::new(re, im))
}

fn symbol_strategy(max_deg: i64, r: f64) -> impl Strategy<Value = LaurentSymbol> {
    prop::collection::vec((-max_deg..=max_deg, complex_in(r)), 1..=5)
        .prop_map(LaurentSymbol::new)
}

fn support_vec_strategy() -> impl Strategy<Value = SupportVec> {
    prop::collection::vec(complex_in(1.5), 1..=5).prop_map(SupportVec::new)
}

fn compact_strategy() -> impl Strategy<Value = FiniteRankPart> {
    prop::collection::vec((support_vec_strategy(), support_vec_strategy()), 0..=3)
        .prop_map(FiniteRankPart::new)
}

fn spec_strategy() -> impl Strategy<Value = OperatorSpec> {
    (symbol_strategy(3, 1.0), compact_strategy())
        .prop_map(|(sym, compact)| OperatorSpec::toeplitz(sym).with_compact(compact))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn truncation_is_linear(
        s in spec_strategy(),
        t in spec_strategy(),
        alpha in complex_in(2.0),
        beta in complex_in(2.0),
        n in 8usize..24,
    ) {
        let combined = linear_combine(alpha, &s, beta, &t).unwrap();
        let n = n.max(combined.min_truncation()).max(s.min_truncation()).max(t.min_truncation());
        let lhs = combined.truncate(n).unwrap();
        let rhs = s.truncate(n).unwrap() * alpha + t.truncate(n).unwrap() * beta;
        for i in 0..n {
            for j in 0..n {
                prop_assert!((lhs[(i, j)] - rhs[(i, j)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn product_agrees_with_enlarged_sections(
        a in symbol_strategy(2, 1.0),
        b in symbol_strategy(2, 1.0),
        k1 in compact_strategy(),
        k2 in compact_strategy(),
    ) {
        let s = OperatorSpec::toeplitz(a).with_compact(k1);
        let t = OperatorSpec::toeplitz(b).with_compact(k2);
        let st = multiply(&s, &t).unwrap();
        let n = 16usize.max(st.min_truncation());
        let pad = 10usize.max(s.min_truncation()).max(t.min_truncation());
        let big = s.truncate(n + pad).unwrap() * t.truncate(n + pad).unwrap();
        let small = st.truncate(n).unwrap();
        for i in 0..n {
            for j in 0..n {
                prop_assert!(
                    (big[(i, j)] - small[(i, j)]).norm() < 1e-10,
                    "entry ({}, {}): {} vs {}", i, j, big[(i, j)], small[(i, j)]
                );
            }
        }
    }

    #[test]
    fn essential_norm_ignores_compact_part(
        sym in symbol_strategy(3, 1.5),
        k1 in compact_strategy(),
        k2 in compact_strategy(),
    ) {
        let a = OperatorSpec::toeplitz(sym.clone()).with_compact(k1);
        let b = OperatorSpec::toeplitz(sym).with_compact(k2);
        prop_assert!((a.essential_norm() - b.essential_norm()).abs() < 1e-12);
    }

    #[test]
    fn essential_norm_submultiplicative(
        a in symbol_strategy(3, 1.0),
        b in symbol_strategy(3, 1.0),
    ) {
        let s = OperatorSpec::toeplitz(a);
        let t = OperatorSpec::toeplitz(b);
        let st = multiply(&s, &t).unwrap();
        prop_assert!(st.essential_norm() <= s.essential_norm() * t.essential_norm() + 1e-9);
    }

    #[test]
    fn component_count_monotone_under_edges(
        n in 2u32..12,
        extra in prop::collection::vec((0u32..12, 0u32..12), 0..10),
    ) {
        let vertices: Vec<u32> = (0..n).collect();
        let mut edges: Vec<(u32, u32)> = Vec::new();
        let mut prev = components(&ParamSpace::new(vertices.clone(), edges.clone()).unwrap()).count();
        for (a, b) in extra {
            let (a, b) = (a % n, b % n);
            if a == b {
                continue;
            }
            edges.push((a, b));
            let next = components(&ParamSpace::new(vertices.clone(), edges.clone()).unwrap()).count();
            prop_assert!(next <= prev);
            prev = next;
        }
        // Component sizes always partition the vertex set.
        let labeling = components(&ParamSpace::new(vertices.clone(), edges).unwrap());
        prop_assert_eq!(labeling.labels().len(), n as usize);
    }
}

#[test]
fn winding_refinement_invariance() {
    let mut rng = rng(11);
    let base = Tolerances::default();
    let doubled = Tolerances { theta_samples: 2 * base.theta_samples, ..base.clone() };
    for _ in 0..50 {
        let w = rng.gen_range(-3..=3);
        let sym = dominant_symbol(&mut rng, w, 0.4);
        let lambda = random_in_annulus(&mut rng, 0.0, 0.5);
        let w1 = winding_number(&sym, lambda, &base).unwrap();
        let w2 = winding_number(&sym, lambda, &doubled).unwrap();
        assert_eq!(w1, w2);
    }
}

#[test]
fn oracle_agrees_with_winding_index() {
    let mut rng = rng(12);
    let tol = Tolerances::default();
    for _ in 0..8 {
        let (spec, lambda, expected) = root_placed_spec(&mut rng, 2);
        let report = point_fredholm(&spec, lambda, &tol);
        assert_eq!(report.index, Some(expected));
        let (nd, _) = nullity_defect_stabilized(&spec, lambda, &tol).unwrap();
        assert!(nd.stabilized);
        assert_eq!(nd.index(), expected);
    }
}

#[test]
fn pointwise_compact_invariance() {
    let mut rng = rng(13);
    let tol = Tolerances::default();
    for _ in 0..25 {
        let (spec, lambda, _) = root_placed_spec(&mut rng, 3);
        let replaced = OperatorSpec::toeplitz(spec.symbol().unwrap().clone())
            .with_compact(random_compact(&mut rng, 3, 8, 5.0));
        let a = point_fredholm(&spec, lambda, &tol);
        let b = point_fredholm(&replaced, lambda, &tol);
        assert_eq!(a.index, b.index);
        assert!((a.essential_gap - b.essential_gap).abs() < 1e-12);
    }
}

#[test]
fn family_indices_constant_per_component() {
    let mut rng = rng(14);
    let tol = Tolerances::default();
    for fam in corpus(&mut rng, 10, 4) {
        let idx = family_index(&fam, Complex64::ZERO, &tol).unwrap();
        for point in fam.sample().points {
            let report = point_fredholm(&point.spec, Complex64::ZERO, &tol);
            assert_eq!(report.index, idx.get(point.component));
        }
    }
}

#[test]
fn composition_additivity_sampled() {
    let mut rng = rng(15);
    let tol = Tolerances::default();
    let spaces = sample_spaces();
    for i in 0..10 {
        let space = &spaces[i % spaces.len()];
        let ws = rng.gen_range(-2..=2);
        let wt = rng.gen_range(-2..=2);
        let s = dominant_family(&mut rng, space, ws, 0.3, true);
        let t = dominant_family(&mut rng, space, wt, 0.3, false);
        let st = compose_families(&s, &t).unwrap();
        let is = family_index(&s, Complex64::ZERO, &tol).unwrap();
        let it = family_index(&t, Complex64::ZERO, &tol).unwrap();
        let ist = family_index(&st, Complex64::ZERO, &tol).unwrap();
        assert_eq!(ist, is.checked_add(&it).unwrap());
    }
}

#[test]
fn openness_radius_protects_index() {
    let mut rng = rng(16);
    let tol = Tolerances::default();
    for fam_i in 0..5 {
        let space = sample_spaces()[fam_i % 5].clone();
        let w = rng.gen_range(-2..=2);
        let fam = dominant_family(&mut rng, &space, w, 0.25, false);
        let eta = local_constancy_radius(&fam, Complex64::ZERO, &tol).unwrap();
        let base = family_index(&fam, Complex64::ZERO, &tol).unwrap();
        for _ in 0..10 {
            let target = rng.gen_range(0.2..0.9) * eta;
            let perturbed = fam
                .map_specs(|_, spec| {
                    let pert = dominant_symbol(&mut rng, 0, 0.5);
                    let scale = target / pert.sup_norm_sampled(2048);
                    let pert_spec =
                        OperatorSpec::toeplitz(pert.scaled(Complex64::new(scale, 0.0)));
                    linear_combine(Complex64::ONE, spec, Complex64::ONE, &pert_spec)
                })
                .unwrap();
            assert_eq!(family_index(&perturbed, Complex64::ZERO, &tol).unwrap(), base);
        }
    }
}

#[test]
fn spectral_map_distance_shrinks_with_refinement() {
    let mut rng = rng(17);
    for _ in 0..5 {
        let fam = OperatorFamily::constant(OperatorSpec::toeplitz(dominant_symbol(
            &mut rng, 1, 0.4,
        )));
        let p = Poly::new(vec![
            c(rng.gen_range(-1.0..1.0), 0.0),
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            c(1.0, 0.0),
        ])
        .unwrap();
        let d1 = spectral_map_check(&fam, &p, 1024).unwrap().hausdorff;
        let d2 = spectral_map_check(&fam, &p, 2048).unwrap().hausdorff;
        assert!(d2 <= 2.0 * d1 + 1e-10, "d1 = {d1}, d2 = {d2}");
    }
}

#[test]
fn poly_apply_truncations_match_matrix_polynomials() {
    let mut rng = rng(18);
    for _ in 0..6 {
        let (spec, _, _) = root_placed_spec(&mut rng, 2);
        let fam = OperatorFamily::constant(spec.clone());
        let coeffs: Vec<Complex64> = (0..3)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .chain([Complex64::ONE])
            .collect();
        let p = Poly::new(coeffs.clone()).unwrap();
        let applied = poly_apply(&fam, &p).unwrap();

        let n = 48;
        let pad = 16;
        let t = spec.truncate(n + pad).unwrap();
        let id = nalgebra::DMatrix::<Complex64>::identity(n + pad, n + pad);
        let mut acc = id.clone() * coeffs[3];
        for k in (0..3).rev() {
            acc = &acc * &t + id.clone() * coeffs[k];
        }
        let direct = applied.spec_at(0).unwrap().truncate(n).unwrap();
        for i in 0..n - pad {
            for j in 0..n - pad {
                assert!(
                    (acc[(i, j)] - direct[(i, j)]).norm() < 1e-9,
                    "entry ({i},{j})"
                );
            }
        }
    }
}

#[test]
fn weyl_union_and_direct_routes_agree() {
    let mut rng = rng(19);
    let tol = Tolerances::default();
    let grid = ComplexGrid::square(2.0, 0.1).unwrap();
    for fam in corpus(&mut rng, 4, 2) {
        let union = weyl_spectrum_family(&fam, &grid, &tol);
        let direct = weyl_spectrum_family_direct(&fam, &grid, &tol);
        assert_eq!(union, direct);

        let mut manual = GridSet::empty(grid.clone());
        for point in fam.sample().points {
            manual = manual
                .union(&weyl_spectrum_point(&point.spec, &grid, &tol))
                .unwrap();
        }
        assert_eq!(union, manual);
    }
}

#[test]
fn essential_subset_of_weyl_on_corpus() {
    let mut rng = rng(20);
    let tol = Tolerances::default();
    let grid = ComplexGrid::square(2.0, 0.1).unwrap();
    for fam in corpus(&mut rng, 6, 3) {
        let ess = essential_spectrum_family(&fam, &grid, &tol);
        let weyl = weyl_spectrum_family(&fam, &grid, &tol);
        assert!(ess.is_subset(&weyl).unwrap());
    }
}

#[test]
fn kuratowski_liminf_always_inside_limsup() {
    let mut rng = rng(21);
    let grid = ComplexGrid::square(2.0, 0.1).unwrap();
    for _ in 0..10 {
        let seq: Vec<GridSet> = (0..10)
            .map(|_| {
                let members = (0..rng.gen_range(0..20))
                    .map(|_| (rng.gen_range(0..grid.nx()), rng.gen_range(0..grid.ny())))
                    .collect();
                GridSet::new(grid.clone(), members).unwrap()
            })
            .collect();
        let report = kuratowski_limits(&seq, 2.0 * grid.h).unwrap();
        assert!(report.liminf.is_subset(&report.limsup).unwrap());
    }
}

#[test]
fn compact_families_absorb_products() {
    let mut rng = rng(22);
    for space in sample_spaces() {
        let w = rng.gen_range(-2..=2);
        let fam = dominant_family(&mut rng, &space, w, 0.3, true);
        let compact = compact_family(&mut rng, &space);
        assert!(is_compact_family(&compose_families(&fam, &compact).unwrap()));
        assert!(is_compact_family(&compose_families(&compact, &fam).unwrap()));
    }
}

#[test]
fn trace_winding_matches_argument_route_on_corpus() {
    let mut rng = rng(23);
    let tol = Tolerances::default();
    for _ in 0..20 {
        let w = rng.gen_range(-3..=3);
        let sym = dominant_symbol(&mut rng, w, 0.4);
        let trace = SymbolTrace::new(&sym, tol.theta_samples);
        let lambda = random_in_annulus(&mut rng, 0.0, 2.0);
        if trace.gap(lambda) < 1e-3 {
            continue;
        }
        assert_eq!(
            trace.winding(lambda),
            winding_number(&sym, lambda, &tol).unwrap()
        );
    }
}
