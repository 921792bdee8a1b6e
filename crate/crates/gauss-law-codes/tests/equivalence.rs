//! The vacuum-code / gauge-code correspondence beyond the acceptance run:
//! failure modes, the bijection itself and the coarse-graining map.

mod common;

use common::*;
use gauss_law_codes::equivalence::{build_t, flux_of, kernel_witness, theta, verify_equivalence, EquivalenceError, KernelReport};
use gauss_law_codes::errors::ErrorOp;
use gauss_law_codes::hilbert::StateVector;
use gauss_law_codes::{Family, Lattice, SpanningTree, TreeStrategy};
use gauss_law_codes::codes::build_code;

fn triangle_pair() -> (gauss_law_codes::CodeInstance, gauss_law_codes::CodeInstance) {
    (
        code_on(Lattice::ring(3).unwrap(), 2, Matter::Finite, Family::BosonicVacuum),
        pure_ring(2, 3),
    )
}

#[test]
fn bijection_is_a_permutation_of_gauge_invariant_states() {
    let (vac, gl) = triangle_pair();
    let t = build_t(&vac, &gl).unwrap();
    let pn = vac.dense().unwrap().pn_basis();
    assert_eq!(t.forward.len(), pn.len());
    assert_eq!(t.forward.keys().copied().collect::<Vec<_>>(), pn);
    let mut images: Vec<usize> = t.forward.values().copied().collect();
    images.sort_unstable();
    images.dedup();
    assert_eq!(images.len(), pn.len(), "injective");
    // Vacuum codewords land on gauge codewords.
    let gl_code = gl.dense().unwrap().code_basis();
    for c in vac.dense().unwrap().code_basis() {
        assert!(gl_code.contains(&t.forward[&c]));
    }
}

#[test]
fn mapped_states_keep_their_norm() {
    let (vac, gl) = triangle_pair();
    let t = build_t(&vac, &gl).unwrap();
    let layout = vac.dense().unwrap().layout.clone();
    let mut state = StateVector::zeros(layout.clone());
    for (k, &i) in t.forward.keys().enumerate() {
        state.amplitudes_mut()[i] = num_complex::Complex64::new(1.0 + k as f64, -(k as f64));
    }
    state.normalize();
    let (image, leaked) = t.map_state(&state, &gl).unwrap();
    assert!(leaked < 1e-12);
    assert!((image.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn theta_keeps_wilson_lines_of_minimal_dressing() {
    let (vac, gl) = triangle_pair();
    for w in all_exponents(2, 3) {
        let e = ErrorOp::from_ints(&vac, &w, "w");
        let image = theta(&e, &vac, &gl).unwrap();
        assert_eq!(image.links, flux_of(&vac, &e).unwrap());
        assert!(image.x_free());
    }
}

#[test]
fn family_and_group_mismatches_are_rejected() {
    let (vac, gl) = triangle_pair();
    assert!(matches!(build_t(&gl, &vac), Err(EquivalenceError::FamilyMismatch(_))));
    let z3 = pure_ring(3, 3);
    assert!(build_t(&vac, &z3).is_err());
    let ring4 = pure_ring(2, 4);
    assert!(build_t(&vac, &ring4).is_err());
}

#[test]
fn a_different_tree_still_verifies() {
    // The gauge code may use its own spanning tree; holonomies are compared
    // per system link of that tree.
    let (vac, _) = triangle_pair();
    let lat = Lattice::ring(3).unwrap();
    let tree = SpanningTree::build(&lat, 0, &TreeStrategy::Explicit(vec![1, 2])).unwrap();
    let gl = build_code(&lat, &vac.group, &tree, &gauss_law_codes::MatterContent::None, Family::PureGaugeGL).unwrap();
    let report = verify_equivalence(&vac, &gl, &frame_section(&vac)).unwrap();
    assert!(report.passed(), "{:?}", report.first_failure());
}

#[test]
fn finite_species_has_trivial_kernel_and_oscillators_do_not() {
    let (vac, _) = triangle_pair();
    assert_eq!(kernel_witness(&vac).unwrap(), KernelReport::TrivialKernel);
    let qed = symbolic_code_on(Lattice::ring(3).unwrap(), 2, Matter::Oscillator(3), Family::BosonicVacuum);
    let witness = kernel_witness(&qed).unwrap();
    assert_eq!(witness.to_string(), "(1,1) vs (0,0)");
}
