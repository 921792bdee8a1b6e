//! Quantum error-correcting codes built from lattice gauge theories with a
//! finite Abelian gauge group.
//!
//! The library covers the Gauss-law codes (pure gauge, bosonic and fermionic
//! matter), the matter-vacuum codes, their Knill-Laflamme analysis with
//! section-based recovery, the equivalence between the two constructions and
//! dense oracles that check the symbolic machinery.

pub mod cli;
pub mod codes;
pub mod equivalence;
pub mod errors;
pub mod gauss_map;
pub mod group;
pub mod hilbert;
pub mod lattice;
pub mod matter;
pub mod oracle;
pub mod qrf;
pub mod specfile;

pub use codes::{build_code, code_parameters, CodeInstance, CodeParameters, Family};
pub use group::{Character, GroupElement, GroupSpec, RationalPhase};
pub use lattice::Lattice;
pub use matter::{MatterContent, Species, SpeciesKind};
pub use qrf::{SpanningTree, TreeStrategy, WilsonLineProduct};

/// The guide under `book/` is compiled here so that its examples run as
/// doc-tests and stay in sync with the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/groups-and-lattices.md")]
    mod groups_and_lattices {}
    #[doc = include_str!("../../../book/src/gauss-law.md")]
    mod gauss_law {}
    #[doc = include_str!("../../../book/src/codes.md")]
    mod codes {}
    #[doc = include_str!("../../../book/src/errors-and-recovery.md")]
    mod errors_and_recovery {}
    #[doc = include_str!("../../../book/src/fermions.md")]
    mod fermions {}
    #[doc = include_str!("../../../book/src/vacuum-codes.md")]
    mod vacuum_codes {}
    #[doc = include_str!("../../../book/src/oracles.md")]
    mod oracles {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
