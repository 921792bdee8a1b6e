//! Property tests of the algebraic layer: characters, the Gauss map, tree
//! frames, register layouts and the text formats.

mod common;

use std::collections::BTreeMap;

use common::*;
use gauss_law_codes::gauss_map::{divergence, gauss_map, make_section, Scope, SectionRule};
use gauss_law_codes::hilbert::RegisterLayout;
use gauss_law_codes::qrf::{frame_field, system_holonomy};
use gauss_law_codes::specfile::{format_section, parse_section_table};
use gauss_law_codes::{GroupSpec, Lattice, WilsonLineProduct};
use proptest::prelude::*;

fn group_strategy() -> impl Strategy<Value = GroupSpec> {
    prop::collection::vec(2u64..6, 1..3).prop_map(|f| GroupSpec::new(f).unwrap())
}

fn lattice_strategy() -> impl Strategy<Value = Lattice> {
    prop_oneof![
        (3usize..7).prop_map(|n| Lattice::ring(n).unwrap()),
        (2usize..4, 2usize..4).prop_map(|(a, b)| Lattice::torus_square(a, b).unwrap()),
    ]
}

fn char_vec(g: &GroupSpec, raw: &[u64]) -> Vec<gauss_law_codes::Character> {
    let order = g.order();
    raw.iter().map(|r| g.character_at((r % order) as usize)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn characters_form_a_group_and_pair_bilinearly(g in group_strategy(), a in any::<u64>(), b in any::<u64>(), h in any::<u64>(), k in -7i64..7) {
        let order = g.order();
        let (x, y) = (g.character_at((a % order) as usize), g.character_at((b % order) as usize));
        let el = g.element_at((h % order) as usize);
        prop_assert!(g.mul(&x, &g.conj(&x)).is_trivial());
        prop_assert_eq!(g.mul(&x, &y), g.mul(&y, &x));
        prop_assert_eq!(g.pow(&x, k).exponents().to_vec(), g.pow(&g.conj(&x), -k).exponents().to_vec());
        let lhs = g.pair(&g.mul(&x, &y), &el).unwrap();
        let rhs = g.pair(&x, &el).unwrap() + g.pair(&y, &el).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(g.pow(&x, g.character_order(&x) as i64), g.trivial_character());
        prop_assert_eq!(g.parse_character(&g.format_character(&x)).unwrap(), x);
    }

    #[test]
    fn gauss_map_is_a_homomorphism_with_neutral_total(g in group_strategy(), lat in lattice_strategy(), raw in prop::collection::vec(any::<u64>(), 36)) {
        let nl = lat.num_links();
        let w1 = WilsonLineProduct::from_characters(char_vec(&g, &raw[..nl]));
        let w2 = WilsonLineProduct::from_characters(char_vec(&g, &raw[nl..]));
        let d1 = divergence(&g, &lat, &w1);
        let d2 = divergence(&g, &lat, &w2);
        let d12 = divergence(&g, &lat, &w1.compose(&g, &w2));
        for v in 0..lat.num_vertices() {
            prop_assert_eq!(&d12[v], &g.mul(&d1[v], &d2[v]));
        }
        let total = d1.iter().fold(g.trivial_character(), |acc, q| g.mul(&acc, q));
        prop_assert!(total.is_trivial());
        let s_all = gauss_map(&g, &lat, &w1, Scope::AllVertices);
        prop_assert_eq!(s_all.charges().to_vec(), d1);
    }

    #[test]
    fn frame_fields_realise_charges_and_holonomies_close(g in group_strategy(), lat in lattice_strategy(), raw in prop::collection::vec(any::<u64>(), 16)) {
        let tree = gauss_law_codes::SpanningTree::build(&lat, 0, &gauss_law_codes::TreeStrategy::Bfs).unwrap();
        let nv = lat.num_vertices();
        let charges: BTreeMap<usize, _> = (1..nv).map(|v| (v, char_vec(&g, &raw[v % raw.len()..v % raw.len() + 1])[0].clone())).collect();
        let w = frame_field(&g, &tree, &charges).unwrap();
        // Frame fields live on the tree.
        for l in tree.system_links() {
            prop_assert!(w.get(l).is_trivial());
        }
        let div = divergence(&g, &lat, &w);
        for (v, q) in &charges {
            prop_assert_eq!(&div[*v], q);
        }
        for (i, l) in tree.system_links().into_iter().enumerate() {
            let chi = char_vec(&g, &raw[i % raw.len()..i % raw.len() + 1])[0].clone();
            let h = system_holonomy(&g, &lat, &tree, l, &chi).unwrap();
            prop_assert!(divergence(&g, &lat, &h).iter().all(|q| q.is_trivial()));
            prop_assert_eq!(h.get(l), &chi);
        }
    }

    #[test]
    fn layouts_round_trip(d in 2u64..4, n in 3usize..5, idx in any::<usize>()) {
        let code = code_on(Lattice::ring(n).unwrap(), d, Matter::Finite, gauss_law_codes::Family::BosonicGL);
        let layout: &RegisterLayout = &code.dense().unwrap().layout;
        let i = idx % layout.dim();
        prop_assert_eq!(layout.encode(&layout.decode(i)), i);
        let digits = layout.decode(i);
        for (r, &dgt) in digits.iter().enumerate() {
            prop_assert_eq!(layout.digit(i, r), dgt);
        }
    }

    #[test]
    fn sections_round_trip_through_text(d in 2u64..5, n in 3usize..6) {
        let code = symbolic_code_on(Lattice::ring(n).unwrap(), d, Matter::None, gauss_law_codes::Family::PureGaugeGL);
        let base = code.syndrome_base();
        let sec = make_section(&base, &SectionRule::TreeFrameField, "frame").unwrap();
        let text = format_section(&sec);
        let rule = parse_section_table(&text, &base).unwrap();
        let again = make_section(&base, &rule, "again").unwrap();
        prop_assert_eq!(format_section(&again), text);
        prop_assert!(again.covers_base());
    }
}
