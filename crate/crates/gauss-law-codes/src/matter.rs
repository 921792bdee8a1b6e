//! Matter content attached to lattice vertices: bosonic species (finite-order
//! qudits or truncated particle/antiparticle oscillator pairs) or staggered
//! fermions.

use thiserror::Error;

use crate::group::{Character, GroupSpec};
use crate::lattice::{Lattice, LatticeError, StaggerColoring};

/// Default number of quanta kept per oscillator mode.
pub const DEFAULT_CUTOFF: usize = 4;

/// Errors raised while validating matter content.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatterError {
    /// A species charge is trivial, so the species carries no gauge charge.
    #[error("species {0} has trivial charge")]
    TrivialCharge(usize),
    /// Species charges must generate the dual group.
    #[error("species charges do not generate the dual group")]
    NotGenerating,
    /// Fermion charge must be nontrivial.
    #[error("fermion charge is trivial")]
    TrivialFermionCharge,
    /// Oscillator cutoffs must keep at least one excited level.
    #[error("oscillator cutoff must be at least 1")]
    ZeroCutoff,
    /// The staggering could not be built.
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// How a bosonic species is realised on each vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpeciesKind {
    /// A single qudit of dimension equal to the charge order; antiparticles are
    /// identified with `D - 1` particles.
    FiniteOrder,
    /// Separate particle and antiparticle oscillators, each truncated to
    /// `cutoff + 1` levels. The charge stands in for an infinite-order one.
    OscillatorPair { cutoff: usize },
}

/// One bosonic matter species.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Species {
    pub charge: Character,
    pub kind: SpeciesKind,
}

impl Species {
    /// Finite-order species with the given charge.
    pub fn finite(charge: Character) -> Self {
        Species { charge, kind: SpeciesKind::FiniteOrder }
    }

    /// Oscillator pair species with the given charge and cutoff.
    pub fn oscillator(charge: Character, cutoff: usize) -> Self {
        Species { charge, kind: SpeciesKind::OscillatorPair { cutoff } }
    }

    /// Number of registers per vertex (1 for finite order, 2 for a pair).
    pub fn slots(&self) -> usize {
        match self.kind {
            SpeciesKind::FiniteOrder => 1,
            SpeciesKind::OscillatorPair { .. } => 2,
        }
    }

    /// Dimension of each register of this species.
    pub fn register_dim(&self, group: &GroupSpec) -> usize {
        match self.kind {
            SpeciesKind::FiniteOrder => group.character_order(&self.charge) as usize,
            SpeciesKind::OscillatorPair { cutoff } => cutoff + 1,
        }
    }

    /// Net particle number carried by the occupations of this species at one
    /// vertex (`n` for finite order, `n - n_bar` for a pair).
    pub fn net_number(&self, occupations: &[usize]) -> i64 {
        match self.kind {
            SpeciesKind::FiniteOrder => occupations[0] as i64,
            SpeciesKind::OscillatorPair { .. } => occupations[0] as i64 - occupations[1] as i64,
        }
    }
}

/// Matter content of a code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatterContent {
    /// Pure gauge theory.
    None,
    /// One or more bosonic species at every vertex.
    Bosonic(Vec<Species>),
    /// One staggered fermion mode per vertex with charge `chi_f`.
    Fermionic { chi_f: Character, coloring: StaggerColoring },
}

impl MatterContent {
    /// Validated bosonic content: charges nontrivial and jointly generating
    /// the dual group.
    pub fn bosonic(group: &GroupSpec, species: Vec<Species>) -> Result<Self, MatterError> {
        for (i, s) in species.iter().enumerate() {
            if s.charge.is_trivial() {
                return Err(MatterError::TrivialCharge(i));
            }
            if let SpeciesKind::OscillatorPair { cutoff: 0 } = s.kind {
                return Err(MatterError::ZeroCutoff);
            }
        }
        let charges: Vec<Character> = species.iter().map(|s| s.charge.clone()).collect();
        if !group.generates_dual(&charges) {
            return Err(MatterError::NotGenerating);
        }
        Ok(MatterContent::Bosonic(species))
    }

    /// Validated fermionic content with the lattice's breadth-first staggering.
    pub fn fermionic(lat: &Lattice, chi_f: Character) -> Result<Self, MatterError> {
        if chi_f.is_trivial() {
            return Err(MatterError::TrivialFermionCharge);
        }
        let coloring = lat.stagger()?;
        Ok(MatterContent::Fermionic { chi_f, coloring })
    }

    /// Bosonic species list (empty otherwise).
    pub fn species(&self) -> &[Species] {
        match self {
            MatterContent::Bosonic(s) => s,
            _ => &[],
        }
    }

    /// Whether any oscillator pair species is present.
    pub fn has_oscillators(&self) -> bool {
        self.species().iter().any(|s| matches!(s.kind, SpeciesKind::OscillatorPair { .. }))
    }

    /// Number of matter registers per vertex.
    pub fn registers_per_vertex(&self) -> usize {
        match self {
            MatterContent::None => 0,
            MatterContent::Bosonic(s) => s.iter().map(Species::slots).sum(),
            MatterContent::Fermionic { .. } => 1,
        }
    }

    /// Replaces every oscillator cutoff.
    pub fn with_cutoff(&self, cutoff: usize) -> MatterContent {
        match self {
            MatterContent::Bosonic(s) => MatterContent::Bosonic(
                s.iter()
                    .map(|sp| match sp.kind {
                        SpeciesKind::OscillatorPair { .. } => Species::oscillator(sp.charge.clone(), cutoff),
                        SpeciesKind::FiniteOrder => sp.clone(),
                    })
                    .collect(),
            ),
            other => other.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_generating_species() {
        let g = GroupSpec::cyclic(6).unwrap();
        let two = g.character(&[2]).unwrap();
        assert_eq!(MatterContent::bosonic(&g, vec![Species::finite(two.clone())]), Err(MatterError::NotGenerating));
        let three = g.character(&[3]).unwrap();
        assert!(MatterContent::bosonic(&g, vec![Species::finite(two), Species::finite(three)]).is_ok());
        assert_eq!(
            MatterContent::bosonic(&g, vec![Species::finite(g.trivial_character())]),
            Err(MatterError::TrivialCharge(0))
        );
    }

    #[test]
    fn fermions_need_bipartite_lattice() {
        let g = GroupSpec::cyclic(2).unwrap();
        let chi = g.character(&[1]).unwrap();
        assert!(MatterContent::fermionic(&Lattice::ring(4).unwrap(), chi.clone()).is_ok());
        assert!(MatterContent::fermionic(&Lattice::ring(3).unwrap(), chi).is_err());
    }
}
