//! Symbolic Knill-Laflamme verdicts and code data against the dense oracle,
//! across every code family small enough to build densely.

mod common;

use common::*;
use gauss_law_codes::codes::{code_parameters, x_distance, Distance, DEFAULT_WMAX};
use gauss_law_codes::errors::{kl_check_pair, syndrome_of, ErrorOp, ErrorSyndrome, KLVerdict};
use gauss_law_codes::oracle::{classify, dense_projector, distance_oracle, kl_matrix_with, kl_oracle, projector_rank, OracleVerdict};
use gauss_law_codes::{CodeInstance, Family, Lattice, RationalPhase};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_links(code: &CodeInstance, rng: &mut ChaCha8Rng) -> Vec<i64> {
    let d = code.group.order() as i64;
    (0..code.lattice.num_links()).map(|_| rng.gen_range(0..d)).collect()
}

/// Random composite error for finite-order matter; `flips` bounds the X shifts.
fn random_error(code: &CodeInstance, rng: &mut ChaCha8Rng, flips: i64, phases: u64, label: &str) -> ErrorOp {
    let mut e = ErrorOp::from_ints(code, &random_links(code, rng), label);
    for row in e.matter_x.iter_mut() {
        for x in row.iter_mut() {
            *x = rng.gen_range(0..flips);
        }
    }
    for row in e.matter_z.iter_mut() {
        for z in row.iter_mut() {
            *z = RationalPhase::new(rng.gen_range(0..phases as i64), phases);
        }
    }
    e
}

fn assert_agreement(code: &CodeInstance, pairs: &[(ErrorOp, ErrorOp)]) -> [usize; 3] {
    let mut counts = [0; 3];
    let pi = dense_projector(code).unwrap();
    for (a, b) in pairs {
        let symbolic = kl_check_pair(a, b, code).unwrap();
        let dense = classify(code, &kl_matrix_with(code, &pi, a, b).unwrap(), &pi);
        assert!(
            dense.agrees_with(&symbolic),
            "{:?} vs {:?}: symbolic {symbolic} dense {}",
            a,
            b,
            dense.name()
        );
        counts[match symbolic {
            KLVerdict::OrthogonalCorrectable => 0,
            KLVerdict::IdenticalOnCode => 1,
            KLVerdict::Violation(_) => 2,
        }] += 1;
    }
    counts
}

/// Pairs cycling through four relations: equal errors, equal links and
/// shifts with fresh phases, equal matter data with fresh links, and
/// independent draws. All three verdicts occur.
fn mixed_pairs(code: &CodeInstance, seed: u64, n: usize, flips: i64, phases: u64) -> Vec<(ErrorOp, ErrorOp)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|k| {
            let a = random_error(code, &mut rng, flips, phases, "a");
            let mut b = random_error(code, &mut rng, flips, phases, "b");
            match k % 4 {
                0 => b = ErrorOp { label: "b".into(), ..a.clone() },
                1 => {
                    b.links = a.links.clone();
                    b.matter_x = a.matter_x.clone();
                }
                2 => {
                    b.matter_x = a.matter_x.clone();
                    b.matter_z = a.matter_z.clone();
                }
                _ => {}
            }
            (a, b)
        })
        .collect()
}

#[test]
fn bosonic_z2_triangle_pairs_agree() {
    let code = code_on(Lattice::ring(3).unwrap(), 2, Matter::Finite, Family::BosonicGL);
    let counts = assert_agreement(&code, &mixed_pairs(&code, 1, 150, 2, 2));
    assert!(counts.iter().all(|&c| c > 0), "every verdict occurs: {counts:?}");
}

#[test]
fn bosonic_z3_triangle_pairs_agree() {
    let code = code_on(Lattice::ring(3).unwrap(), 3, Matter::Finite, Family::BosonicGL);
    let counts = assert_agreement(&code, &mixed_pairs(&code, 2, 80, 3, 3));
    assert!(counts.iter().all(|&c| c > 0), "every verdict occurs: {counts:?}");
}

#[test]
fn bosonic_vacuum_pairs_agree() {
    let code = code_on(Lattice::ring(3).unwrap(), 2, Matter::Finite, Family::BosonicVacuum);
    let all = all_exponents(2, 3);
    let errors: Vec<ErrorOp> = all.iter().map(|w| ErrorOp::from_ints(&code, w, "w")).collect();
    let pairs: Vec<_> = errors.iter().flat_map(|a| errors.iter().map(move |b| (a.clone(), b.clone()))).collect();
    assert_agreement(&code, &pairs);
}

#[test]
fn fermionic_gauss_law_pairs_agree() {
    let code = code_on(Lattice::ring(4).unwrap(), 2, Matter::Fermions, Family::FermionicGL);
    let counts = assert_agreement(&code, &mixed_pairs(&code, 3, 120, 2, 2));
    assert!(counts.iter().all(|&c| c > 0), "every verdict occurs: {counts:?}");
}

#[test]
fn fermionic_z3_gauss_law_pairs_agree() {
    let code = code_on(Lattice::ring(4).unwrap(), 3, Matter::Fermions, Family::FermionicGL);
    assert_agreement(&code, &mixed_pairs(&code, 4, 40, 2, 2));
}

#[test]
fn fermionic_vacuum_pairs_agree() {
    let code = code_on(Lattice::ring(4).unwrap(), 4, Matter::Fermions, Family::FermionicVacuum);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let errors: Vec<ErrorOp> = (0..24).map(|_| ErrorOp::from_ints(&code, &random_links(&code, &mut rng), "w")).collect();
    let pairs: Vec<_> = errors.iter().zip(errors.iter().rev()).map(|(a, b)| (a.clone(), b.clone())).collect();
    assert_agreement(&code, &pairs);
}

#[test]
fn loop_against_identity_is_loops_only_on_matter_codes() {
    let code = code_on(Lattice::ring(3).unwrap(), 2, Matter::Finite, Family::BosonicGL);
    let loop_op = ErrorOp::from_ints(&code, &[1, 1, 1], "loop");
    let id = ErrorOp::identity(&code);
    assert_eq!(kl_oracle(&loop_op, &id, &code).unwrap(), OracleVerdict::LoopsOnly);
    assert!(matches!(kl_check_pair(&loop_op, &id, &code).unwrap(), KLVerdict::Violation(_)));
}

#[test]
fn projector_rank_matches_counted_dimension() {
    let codes = [
        pure_ring(2, 3),
        pure_ring(4, 3),
        code_on(Lattice::ring(3).unwrap(), 3, Matter::Finite, Family::BosonicGL),
        code_on(Lattice::ring(3).unwrap(), 2, Matter::Finite, Family::BosonicVacuum),
        code_on(Lattice::ring(4).unwrap(), 3, Matter::Fermions, Family::FermionicGL),
        code_on(Lattice::ring(4).unwrap(), 4, Matter::Fermions, Family::FermionicVacuum),
    ];
    for code in &codes {
        let rank = projector_rank(code).unwrap() as u128;
        assert_eq!(rank, code.dimension(), "{:?} on {}", code.family, code.lattice.name());
        let support = dense_projector(code).unwrap().diagonal_support();
        assert_eq!(support, code.dense().unwrap().code_basis());
    }
}

#[test]
fn symbolic_syndromes_match_dense_measurement() {
    // Apply an error to every codeword; all weight must sit on states whose
    // gauge charges equal the symbolic syndrome.
    let code = pure_ring(3, 3);
    let dense = code.dense().unwrap();
    for w in all_exponents(3, 3) {
        let e = ErrorOp::from_ints(&code, &w, "w");
        let ErrorSyndrome::Charges(q) = syndrome_of(&e, &code).unwrap() else { panic!("charge syndrome") };
        let div = divergence_ints(&code.lattice, &w, 3);
        for (v, c) in q.charges().iter().enumerate() {
            assert_eq!(c.exponents()[0] as i64, div[v], "vertex {v} of {w:?}");
        }
        for c in dense.code_basis() {
            let labels = dense.layout.decode(c);
            let moved: Vec<i64> = labels.iter().zip(&w).map(|(&a, &b)| (a as i64 + b).rem_euclid(3)).collect();
            assert_eq!(divergence_ints(&code.lattice, &moved, 3), div);
        }
    }
}

#[test]
fn distances_agree_with_the_oracle() {
    let codes = [
        pure_ring(2, 3),
        pure_ring(3, 4),
        code_on(Lattice::ring(3).unwrap(), 2, Matter::Finite, Family::BosonicGL),
        code_on(Lattice::ring(4).unwrap(), 2, Matter::Fermions, Family::FermionicGL),
    ];
    for code in &codes {
        let (symbolic, _) = x_distance(code, DEFAULT_WMAX);
        let dense = distance_oracle(code, DEFAULT_WMAX).unwrap();
        assert_eq!(symbolic, dense, "{:?} on {}", code.family, code.lattice.name());
        assert!(matches!(dense, Distance::Exact(_)));
    }
}

#[test]
fn vacuum_parameters() {
    let code = code_on(Lattice::ring(3).unwrap(), 2, Matter::Finite, Family::BosonicVacuum);
    assert_eq!(code_parameters(&code, DEFAULT_WMAX).bracket(), "[6,1,3]");
}
