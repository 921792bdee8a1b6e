//! Helpers shared by the integration tests: code builders, bundled spec
//! loading and brute-force references that do not go through the library's
//! symbolic machinery.

#![allow(dead_code)]

use std::path::PathBuf;

use gauss_law_codes::codes::{build_code, build_code_symbolic};
use gauss_law_codes::gauss_map::{make_section, Section, SectionRule};
use gauss_law_codes::hilbert::StateVector;
use gauss_law_codes::specfile::{load_code_spec, CodeSpec};
use gauss_law_codes::{CodeInstance, Family, GroupSpec, Lattice, MatterContent, Species, SpanningTree, TreeStrategy};
use num_complex::Complex64;
use rand::Rng;

/// Matter content of a test code.
#[derive(Debug, Clone, Copy)]
pub enum Matter {
    None,
    /// One finite-order species carrying the generating character.
    Finite,
    /// One oscillator pair with the given cutoff.
    Oscillator(usize),
    /// Staggered fermions carrying the generating character.
    Fermions,
}

/// Builds a code with dense data over `Z_d` on `lat`, rooted at 0 with the
/// link-order tree.
pub fn code_on(lat: Lattice, d: u64, matter: Matter, family: Family) -> CodeInstance {
    let (g, tree, content) = parts(&lat, d, matter);
    build_code(&lat, &g, &tree, &content, family).expect("test code builds")
}

/// Like [`code_on`] without dense data.
pub fn symbolic_code_on(lat: Lattice, d: u64, matter: Matter, family: Family) -> CodeInstance {
    let (g, tree, content) = parts(&lat, d, matter);
    build_code_symbolic(&lat, &g, &tree, &content, family).expect("test code builds")
}

fn parts(lat: &Lattice, d: u64, matter: Matter) -> (GroupSpec, SpanningTree, MatterContent) {
    let g = GroupSpec::cyclic(d).expect("cyclic group");
    let tree = SpanningTree::build(lat, 0, &TreeStrategy::Bfs).expect("spanning tree");
    let rho = g.character(&[1]).expect("generator");
    let content = match matter {
        Matter::None => MatterContent::None,
        Matter::Finite => MatterContent::bosonic(&g, vec![Species::finite(rho)]).expect("bosonic matter"),
        Matter::Oscillator(cutoff) => {
            MatterContent::bosonic(&g, vec![Species::oscillator(rho, cutoff)]).expect("oscillator matter")
        }
        Matter::Fermions => MatterContent::fermionic(lat, rho).expect("fermionic matter"),
    };
    (g, tree, content)
}

/// Pure gauge `Z_d` code on `ring(n)`.
pub fn pure_ring(d: u64, n: usize) -> CodeInstance {
    code_on(Lattice::ring(n).expect("ring"), d, Matter::None, Family::PureGaugeGL)
}

/// Path of a bundled file under `specs/`.
pub fn spec_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("specs").join(name)
}

/// Loads a bundled code spec.
pub fn bundled_spec(name: &str) -> CodeSpec {
    load_code_spec(&spec_path(name)).expect("bundled spec parses")
}

/// Reads a bundled text file.
pub fn bundled_text(name: &str) -> String {
    std::fs::read_to_string(spec_path(name)).expect("bundled file readable")
}

/// The tree frame-field section of a code.
pub fn frame_section(code: &CodeInstance) -> Section {
    make_section(&code.syndrome_base(), &SectionRule::TreeFrameField, "frame").expect("frame section")
}

/// Link divergence of integer Wilson exponents on a cyclic group, computed
/// directly: the tail of each link gets `+e`, the head `-e`.
pub fn divergence_ints(lat: &Lattice, ints: &[i64], d: i64) -> Vec<i64> {
    let mut div = vec![0i64; lat.num_vertices()];
    for (l, link) in lat.links().iter().enumerate() {
        div[link.tail] += ints[l];
        div[link.head] -= ints[l];
    }
    div.into_iter().map(|q| q.rem_euclid(d)).collect()
}

/// Every exponent vector in `Z_d^n`, first entry fastest.
pub fn all_exponents(d: i64, n: usize) -> Vec<Vec<i64>> {
    let total = (d as usize).pow(n as u32);
    (0..total)
        .map(|mut idx| {
            (0..n)
                .map(|_| {
                    let r = (idx % d as usize) as i64;
                    idx /= d as usize;
                    r
                })
                .collect()
        })
        .collect()
}

/// A normalised random state over the dense layout of `code`.
pub fn random_state(code: &CodeInstance, rng: &mut impl Rng) -> StateVector {
    let layout = code.dense().expect("dense code").layout.clone();
    let amps = (0..layout.dim()).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
    let mut s = StateVector::from_amplitudes(layout, amps);
    s.normalize();
    s
}
