//! The Gauss law map, its bosonic and vacuum extensions, kernels, syndrome
//! bases and sections.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::group::{Character, GroupSpec};
use crate::lattice::Lattice;
use crate::matter::{Species, SpeciesKind};
use crate::qrf::{frame_field, system_holonomy, SpanningTree, WilsonLineProduct};

/// Largest syndrome base that sections are built over.
pub const MAX_BASE_SIZE: u64 = 1 << 20;

/// Errors raised by Gauss map extensions and section construction.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaussError {
    /// Matter X data outside the register range of its species.
    #[error("occupation data out of range at vertex {vertex}, slot {slot}: {value}")]
    OccupationOutOfRange { vertex: usize, slot: usize, value: i64 },
    /// Matter X data has the wrong shape.
    #[error("matter data shape mismatch: {0}")]
    Shape(String),
    /// A table entry does not map back to its key, repeats a key, or the
    /// rule cannot realise a base point.
    #[error("not a section: {0}")]
    NotASection(String),
    /// The base is too large to enumerate.
    #[error("syndrome base of size {0} is not enumerable")]
    BaseNotEnumerable(u64),
}

/// Which vertices a syndrome refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scope {
    /// Every vertex except the given root (pure-gauge map).
    ExcludeRoot(usize),
    /// Every vertex (matter maps).
    AllVertices,
}

/// Per-vertex charges. All vertices are stored; equality, ordering and
/// hashing only look at vertices in scope.
#[derive(Debug, Clone)]
pub struct Syndrome {
    charges: Vec<Character>,
    scope: Scope,
}

impl Syndrome {
    /// Wraps per-vertex charges.
    pub fn new(charges: Vec<Character>, scope: Scope) -> Self {
        Syndrome { charges, scope }
    }

    /// All stored charges.
    pub fn charges(&self) -> &[Character] {
        &self.charges
    }

    /// The scope.
    pub fn scope(&self) -> Scope {
        self.scope
    }

    /// Charges of in-scope vertices.
    pub fn key(&self) -> Vec<&Character> {
        self.charges
            .iter()
            .enumerate()
            .filter(|(v, _)| !matches!(self.scope, Scope::ExcludeRoot(r) if r == *v))
            .map(|(_, c)| c)
            .collect()
    }

    /// Whether every in-scope charge is trivial.
    pub fn is_trivial(&self) -> bool {
        self.key().into_iter().all(Character::is_trivial)
    }

    /// Tuple form over all vertices, e.g. `(1,1,0)`.
    pub fn to_tuple(&self) -> String {
        let parts: Vec<String> = self.charges.iter().map(|c| c.to_string()).collect();
        format!("({})", parts.join(","))
    }
}

impl PartialEq for Syndrome {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Syndrome {}

impl PartialOrd for Syndrome {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Syndrome {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

impl std::hash::Hash for Syndrome {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

impl fmt::Display for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_tuple())
    }
}

/// Divergence `(d chi)_v = prod_out chi_l * prod_in conj(chi_l)` at every vertex.
pub fn divergence(group: &GroupSpec, lat: &Lattice, w: &WilsonLineProduct) -> Vec<Character> {
    let mut q = vec![group.trivial_character(); lat.num_vertices()];
    for (l, link) in lat.links().iter().enumerate() {
        let chi = w.get(l);
        q[link.tail] = group.mul(&q[link.tail], chi);
        q[link.head] = group.mul(&q[link.head], &group.conj(chi));
    }
    q
}

/// The Gauss law map.
pub fn gauss_map(group: &GroupSpec, lat: &Lattice, w: &WilsonLineProduct, scope: Scope) -> Syndrome {
    Syndrome::new(divergence(group, lat, w), scope)
}

/// Generators of the kernel of the Gauss law map: one system holonomy per
/// system link and per cyclic factor of the dual group.
pub fn kernel_generators(group: &GroupSpec, lat: &Lattice, tree: &SpanningTree) -> Vec<WilsonLineProduct> {
    let mut out = Vec::new();
    for l in tree.system_links() {
        for chi in group.character_generators() {
            out.push(system_holonomy(group, lat, tree, l, &chi).expect("system links are outside the tree"));
        }
    }
    out
}

/// Matter X data: `x[v][slot]`, slots ordered species by species (one slot for
/// finite order, particle then antiparticle for pairs).
pub type MatterX = Vec<Vec<i64>>;

/// Checks matter X data against species bounds.
pub fn check_matter_x(group: &GroupSpec, species: &[Species], nv: usize, x: &MatterX) -> Result<(), GaussError> {
    let slots: usize = species.iter().map(Species::slots).sum();
    if x.len() != nv || x.iter().any(|row| row.len() != slots) {
        return Err(GaussError::Shape(format!("expected {nv} rows of {slots} slots")));
    }
    for (v, row) in x.iter().enumerate() {
        let mut slot = 0;
        for sp in species {
            let bound = match sp.kind {
                SpeciesKind::FiniteOrder => group.character_order(&sp.charge) as i64 - 1,
                SpeciesKind::OscillatorPair { cutoff } => cutoff as i64,
            };
            for _ in 0..sp.slots() {
                let value = row[slot];
                let ok = match sp.kind {
                    SpeciesKind::FiniteOrder => (0..=bound).contains(&value),
                    SpeciesKind::OscillatorPair { .. } => value.abs() <= bound,
                };
                if !ok {
                    return Err(GaussError::OccupationOutOfRange { vertex: v, slot, value });
                }
                slot += 1;
            }
        }
    }
    Ok(())
}

/// Matter charge created at one vertex by X exponents, `prod rho^{Delta x}`.
pub fn matter_charge(group: &GroupSpec, species: &[Species], row: &[i64]) -> Character {
    let mut q = group.trivial_character();
    let mut slot = 0;
    for sp in species {
        let delta = match sp.kind {
            SpeciesKind::FiniteOrder => row[slot],
            SpeciesKind::OscillatorPair { .. } => row[slot] - row[slot + 1],
        };
        q = group.mul(&q, &group.pow(&sp.charge, delta));
        slot += sp.slots();
    }
    q
}

/// Extended bosonic map `(d chi)_v * prod rho^{(Delta x)_v}` over all vertices.
pub fn gauss_map_bosonic(
    group: &GroupSpec,
    lat: &Lattice,
    species: &[Species],
    w: &WilsonLineProduct,
    x: &MatterX,
) -> Result<Syndrome, GaussError> {
    check_matter_x(group, species, lat.num_vertices(), x)?;
    let div = divergence(group, lat, w);
    let charges = div
        .iter()
        .zip(x)
        .map(|(d, row)| group.mul(d, &matter_charge(group, species, row)))
        .collect();
    Ok(Syndrome::new(charges, Scope::AllVertices))
}

/// Dressed-line data `k[l][species] = (k_alpha, k_alphabar)`: `k_alpha` places
/// a particle at the head and an antiparticle at the tail of `l`, `k_alphabar`
/// the reverse.
pub type DressedK = Vec<Vec<(u64, u64)>>;

/// Fine-grained vacuum-code syndrome: occupations `n[v][slot]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VacuumSyndrome {
    pub occupations: Vec<Vec<u64>>,
}

impl VacuumSyndrome {
    /// Per-vertex matter charge `Q_v = prod rho^{net number}`.
    pub fn matter_charges(&self, group: &GroupSpec, species: &[Species]) -> Vec<Character> {
        self.occupations
            .iter()
            .map(|row| {
                let signed: Vec<i64> = row.iter().map(|&n| n as i64).collect();
                matter_charge(group, species, &signed)
            })
            .collect()
    }

    /// Whether all occupations vanish.
    pub fn is_trivial(&self) -> bool {
        self.occupations.iter().flatten().all(|&n| n == 0)
    }

    /// Tuple form, slots joined by `:`.
    pub fn to_tuple(&self) -> String {
        let parts: Vec<String> = self
            .occupations
            .iter()
            .map(|row| row.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(":"))
            .collect();
        format!("({})", parts.join(","))
    }
}

/// Occupations excited from the vacuum by dressed lines `k`. Finite-order
/// species: `n_v = -(div f)_v mod D` with `f = k_alpha - k_alphabar`. Pairs:
/// particles `sum_in k_alpha + sum_out k_alphabar`, antiparticles
/// `sum_out k_alpha + sum_in k_alphabar`.
pub fn gauss_map_vacuum(group: &GroupSpec, lat: &Lattice, species: &[Species], k: &DressedK) -> VacuumSyndrome {
    let slots: usize = species.iter().map(Species::slots).sum();
    let mut occ = vec![vec![0i64; slots]; lat.num_vertices()];
    for (l, link) in lat.links().iter().enumerate() {
        let mut slot = 0;
        for (s, sp) in species.iter().enumerate() {
            let (ka, kb) = k[l][s];
            let (ka, kb) = (ka as i64, kb as i64);
            match sp.kind {
                SpeciesKind::FiniteOrder => {
                    let f = ka - kb;
                    occ[link.tail][slot] -= f;
                    occ[link.head][slot] += f;
                }
                SpeciesKind::OscillatorPair { .. } => {
                    occ[link.head][slot] += ka;
                    occ[link.tail][slot + 1] += ka;
                    occ[link.tail][slot] += kb;
                    occ[link.head][slot + 1] += kb;
                }
            }
            slot += sp.slots();
        }
    }
    let occupations = occ
        .into_iter()
        .map(|row| {
            let mut slot = 0;
            let mut out = Vec::with_capacity(row.len());
            for sp in species {
                match sp.kind {
                    SpeciesKind::FiniteOrder => {
                        let d = group.character_order(&sp.charge) as i64;
                        out.push(row[slot].rem_euclid(d) as u64);
                    }
                    SpeciesKind::OscillatorPair { .. } => {
                        out.push(row[slot] as u64);
                        out.push(row[slot + 1] as u64);
                    }
                }
                slot += sp.slots();
            }
            out
        })
        .collect();
    VacuumSyndrome { occupations }
}

/// Gauge charge `chi(k)_l = prod rho^{k_alpha - k_alphabar}` carried by dressed lines.
pub fn dressed_flux(group: &GroupSpec, species: &[Species], k: &DressedK) -> WilsonLineProduct {
    WilsonLineProduct::from_characters(
        k.iter()
            .map(|row| {
                row.iter().zip(species).fold(group.trivial_character(), |acc, (&(a, b), sp)| {
                    group.mul(&acc, &group.pow(&sp.charge, a as i64 - b as i64))
                })
            })
            .collect(),
    )
}

/// Which forward map a syndrome base belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseKind {
    /// Gauge charges on non-root vertices, `hat G^{N_V - 1}`.
    GaugeCharges,
    /// Total charges on all vertices with bosonic matter, `hat G^{N_V}`.
    MatterCharges { species: Vec<Species> },
}

/// A syndrome base together with the data needed to build sections over it.
#[derive(Debug, Clone)]
pub struct SyndromeBase {
    pub group: GroupSpec,
    pub lattice: Lattice,
    pub tree: SpanningTree,
    pub kind: BaseKind,
}

impl SyndromeBase {
    /// Scope of syndromes in this base.
    pub fn scope(&self) -> Scope {
        match self.kind {
            BaseKind::GaugeCharges => Scope::ExcludeRoot(self.tree.root()),
            BaseKind::MatterCharges { .. } => Scope::AllVertices,
        }
    }

    /// Number of base points.
    pub fn size(&self) -> u64 {
        let nv = self.lattice.num_vertices() as u32;
        let free = match self.kind {
            BaseKind::GaugeCharges => nv - 1,
            BaseKind::MatterCharges { .. } => nv,
        };
        self.group.order().checked_pow(free).unwrap_or(u64::MAX)
    }

    /// Every base point in mixed-radix order. For gauge charges the root entry
    /// is filled in so that the total charge is trivial.
    pub fn enumerate(&self) -> Result<Vec<Syndrome>, GaussError> {
        let size = self.size();
        if size > MAX_BASE_SIZE {
            return Err(GaussError::BaseNotEnumerable(size));
        }
        let g = &self.group;
        let nv = self.lattice.num_vertices();
        let root = self.tree.root();
        let free: Vec<usize> = match self.kind {
            BaseKind::GaugeCharges => (0..nv).filter(|&v| v != root).collect(),
            BaseKind::MatterCharges { .. } => (0..nv).collect(),
        };
        let order = g.order() as usize;
        let mut out = Vec::with_capacity(size as usize);
        for mut idx in 0..size as usize {
            let mut charges = vec![g.trivial_character(); nv];
            for &v in &free {
                charges[v] = g.character_at(idx % order);
                idx /= order;
            }
            if let BaseKind::GaugeCharges = self.kind {
                let total = free.iter().fold(g.trivial_character(), |acc, &v| g.mul(&acc, &charges[v]));
                charges[root] = g.conj(&total);
            }
            out.push(Syndrome::new(charges, self.scope()));
        }
        Ok(out)
    }

    /// Forward map of section data.
    pub fn forward(&self, links: &WilsonLineProduct, x: Option<&MatterX>) -> Result<Syndrome, GaussError> {
        match &self.kind {
            BaseKind::GaugeCharges => {
                if x.is_some_and(|x| x.iter().flatten().any(|&v| v != 0)) {
                    return Err(GaussError::NotASection("matter data on a gauge-charge base".into()));
                }
                Ok(gauss_map(&self.group, &self.lattice, links, self.scope()))
            }
            BaseKind::MatterCharges { species } => {
                let zero;
                let x = match x {
                    Some(x) => x,
                    None => {
                        let slots: usize = species.iter().map(Species::slots).sum();
                        zero = vec![vec![0; slots]; self.lattice.num_vertices()];
                        &zero
                    }
                };
                gauss_map_bosonic(&self.group, &self.lattice, species, links, x)
            }
        }
    }
}

/// One section entry: the representative error parameters of a syndrome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionEntry {
    pub syndrome: Syndrome,
    pub links: WilsonLineProduct,
    pub matter_x: Option<MatterX>,
}

/// A validated table from syndromes to representatives.
#[derive(Debug, Clone)]
pub struct Section {
    label: String,
    entries: BTreeMap<Syndrome, SectionEntry>,
    base_size: u64,
    truncated: bool,
}

impl Section {
    /// Label.
    pub fn label(&self) -> &str {
        &self.label
    }

    /// Entries in syndrome order.
    pub fn entries(&self) -> impl Iterator<Item = &SectionEntry> {
        self.entries.values()
    }

    /// Number of entries.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Whether the table is empty.
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Representative for a syndrome.
    pub fn lookup(&self, s: &Syndrome) -> Option<&SectionEntry> {
        self.entries.get(s)
    }

    /// Whether every base point has a representative.
    pub fn covers_base(&self) -> bool {
        self.entries.len() as u64 == self.base_size
    }

    /// Whether the base was truncated by an oscillator cutoff.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// Marks the section as built over a cutoff-truncated base.
    pub fn mark_truncated(&mut self) {
        self.truncated = true;
    }
}

/// How to build a section.
#[derive(Debug, Clone)]
pub enum SectionRule {
    /// Tree frame fields, with a minimal matter correction at the root for
    /// matter-charge bases.
    TreeFrameField,
    /// An explicit list of representatives (keys are recomputed and checked).
    ExplicitTable(Vec<(Syndrome, WilsonLineProduct, Option<MatterX>)>),
}

/// Builds and validates a section over `base`.
pub fn make_section(base: &SyndromeBase, rule: &SectionRule, label: &str) -> Result<Section, GaussError> {
    let mut entries = BTreeMap::new();
    let rows: Vec<(Syndrome, WilsonLineProduct, Option<MatterX>)> = match rule {
        SectionRule::TreeFrameField => {
            let mut rows = Vec::new();
            for q in base.enumerate()? {
                let (links, x) = tree_representative(base, &q)?;
                rows.push((q, links, x));
            }
            rows
        }
        SectionRule::ExplicitTable(rows) => rows.clone(),
    };
    for (key, links, x) in rows {
        let got = base.forward(&links, x.as_ref())?;
        if got != key {
            return Err(GaussError::NotASection(format!(
                "representative {} maps to {} instead of {}",
                links.to_tuple(),
                got,
                key
            )));
        }
        if entries.contains_key(&key) {
            return Err(GaussError::NotASection(format!("syndrome {key} appears twice")));
        }
        let syndrome = Syndrome::new(got.charges().to_vec(), base.scope());
        entries.insert(key, SectionEntry { syndrome, links, matter_x: x });
    }
    Ok(Section { label: label.to_string(), entries, base_size: base.size(), truncated: false })
}

fn tree_representative(base: &SyndromeBase, q: &Syndrome) -> Result<(WilsonLineProduct, Option<MatterX>), GaussError> {
    let g = &base.group;
    let root = base.tree.root();
    let nonroot: BTreeMap<usize, Character> = q
        .charges()
        .iter()
        .enumerate()
        .filter(|(v, c)| *v != root && !c.is_trivial())
        .map(|(v, c)| (v, c.clone()))
        .collect();
    let links = frame_field(g, &base.tree, &nonroot).expect("root excluded");
    match &base.kind {
        BaseKind::GaugeCharges => Ok((links, None)),
        BaseKind::MatterCharges { species } => {
            let div = divergence(g, &base.lattice, &links);
            let needed = g.mul(&q.charges()[root], &g.conj(&div[root]));
            let row = minimal_matter_row(g, species, &needed)
                .ok_or_else(|| GaussError::NotASection(format!("no matter configuration carries {needed}")))?;
            let slots: usize = species.iter().map(Species::slots).sum();
            let mut x = vec![vec![0i64; slots]; base.lattice.num_vertices()];
            x[root] = row;
            Ok((links, Some(x)))
        }
    }
}

/// The lexicographically first among minimum-support rows of X exponents
/// carrying charge `target`.
pub fn minimal_matter_row(group: &GroupSpec, species: &[Species], target: &Character) -> Option<Vec<i64>> {
    let ranges: Vec<i64> = species
        .iter()
        .flat_map(|sp| {
            let r = match sp.kind {
                SpeciesKind::FiniteOrder => group.character_order(&sp.charge) as i64,
                SpeciesKind::OscillatorPair { cutoff } => cutoff as i64 + 1,
            };
            std::iter::repeat_n(r, sp.slots())
        })
        .collect();
    let total: i64 = ranges.iter().product();
    let mut best: Option<(usize, Vec<i64>)> = None;
    for mut idx in 0..total {
        let row: Vec<i64> = ranges
            .iter()
            .map(|&r| {
                let v = idx % r;
                idx /= r;
                v
            })
            .collect();
        if &matter_charge(group, species, &row) != target {
            continue;
        }
        let weight = row.iter().filter(|&&v| v != 0).count();
        if best.as_ref().is_none_or(|(w, b)| weight < *w || (weight == *w && row < *b)) {
            best = Some((weight, row));
        }
    }
    best.map(|(_, r)| r)
}

/// Distinct syndromes reached by a set of Wilson-line products (used to count
/// the range of the Gauss law map).
pub fn syndrome_range(group: &GroupSpec, lat: &Lattice, ws: &[WilsonLineProduct], scope: Scope) -> BTreeSet<Syndrome> {
    ws.iter().map(|w| gauss_map(group, lat, w, scope)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qrf::TreeStrategy;

    #[test]
    fn gauss_map_examples() {
        let lat = Lattice::ring(3).unwrap();
        let z2 = GroupSpec::cyclic(2).unwrap();
        let s = gauss_map(&z2, &lat, &WilsonLineProduct::from_ints(&z2, &[1, 0, 0]), Scope::AllVertices);
        assert_eq!(s.to_tuple(), "(1,1,0)");
        let z3 = GroupSpec::cyclic(3).unwrap();
        let s = gauss_map(&z3, &lat, &WilsonLineProduct::from_ints(&z3, &[1, 0, 0]), Scope::AllVertices);
        assert_eq!(s.to_tuple(), "(1,2,0)");
        assert!(gauss_map(&z3, &lat, &WilsonLineProduct::identity(&z3, 3), Scope::ExcludeRoot(0)).is_trivial());
    }

    #[test]
    fn scope_controls_equality() {
        let z2 = GroupSpec::cyclic(2).unwrap();
        let a = Syndrome::new(vec![z2.character(&[1]).unwrap(), z2.trivial_character()], Scope::ExcludeRoot(0));
        let b = Syndrome::new(vec![z2.trivial_character(), z2.trivial_character()], Scope::ExcludeRoot(0));
        assert_eq!(a, b);
        let a2 = Syndrome::new(a.charges().to_vec(), Scope::AllVertices);
        let b2 = Syndrome::new(b.charges().to_vec(), Scope::AllVertices);
        assert_ne!(a2, b2);
    }

    #[test]
    fn bosonic_map_examples() {
        let lat = Lattice::ring(3).unwrap();
        let z2 = GroupSpec::cyclic(2).unwrap();
        let sp = vec![Species::finite(z2.character(&[1]).unwrap())];
        let s = gauss_map_bosonic(&z2, &lat, &sp, &WilsonLineProduct::identity(&z2, 3), &vec![vec![1], vec![0], vec![0]]);
        assert_eq!(s.unwrap().to_tuple(), "(1,0,0)");
        let err = gauss_map_bosonic(&z2, &lat, &sp, &WilsonLineProduct::identity(&z2, 3), &vec![vec![2], vec![0], vec![0]]);
        assert!(matches!(err, Err(GaussError::OccupationOutOfRange { .. })));
        let osc = vec![Species::oscillator(z2.character(&[1]).unwrap(), 2)];
        let s = gauss_map_bosonic(&z2, &lat, &osc, &WilsonLineProduct::identity(&z2, 3), &vec![vec![1, 1], vec![0, 0], vec![0, 0]]);
        assert!(s.unwrap().is_trivial());
    }

    #[test]
    fn vacuum_map_example() {
        let lat = Lattice::ring(3).unwrap();
        let z2 = GroupSpec::cyclic(2).unwrap();
        let sp = vec![Species::finite(z2.character(&[1]).unwrap())];
        let k = vec![vec![(1, 0)], vec![(0, 0)], vec![(0, 0)]];
        assert_eq!(gauss_map_vacuum(&z2, &lat, &sp, &k).occupations, vec![vec![1], vec![1], vec![0]]);
    }

    #[test]
    fn tree_section_on_triangle() {
        let lat = Lattice::ring(3).unwrap();
        let z2 = GroupSpec::cyclic(2).unwrap();
        let tree = SpanningTree::build(&lat, 0, &TreeStrategy::Bfs).unwrap();
        let base = SyndromeBase { group: z2, lattice: lat, tree, kind: BaseKind::GaugeCharges };
        let sec = make_section(&base, &SectionRule::TreeFrameField, "tree").unwrap();
        let reps: Vec<String> = sec.entries().map(|e| e.links.to_tuple()).collect();
        assert_eq!(reps, vec!["(0,0,0)", "(1,1,0)", "(1,0,0)", "(0,1,0)"]);
        assert!(sec.covers_base());
    }
}
