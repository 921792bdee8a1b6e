//! Error operators, symbolic Knill-Laflamme checks, maximal error sets,
//! fermionic charge bins and single-round recovery simulation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::codes::{CodeError, CodeInstance, Family};
use crate::gauss_map::{
    divergence, dressed_flux, gauss_map, gauss_map_bosonic, gauss_map_vacuum, matter_charge, DressedK, GaussError,
    MatterX, Scope, Section, SectionEntry, Syndrome, VacuumSyndrome,
};
use crate::group::{Character, GroupSpec, RationalPhase};
use crate::hilbert::{BosonOp, FermionOp, HilbertError, Register, StateVector};
use crate::matter::{MatterContent, Species, SpeciesKind};
use crate::qrf::WilsonLineProduct;

/// Tolerance for the success test of a recovery round.
pub const RECOVERY_TOLERANCE: f64 = 1e-10;

/// Errors raised by the error model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ErrorsError {
    /// The error does not fit the code family.
    #[error("error incompatible with code: {0}")]
    IncompatibleError(String),
    /// A section produced a non-correctable pair.
    #[error("errors {a} and {b} of a section violate the Knill-Laflamme condition")]
    KLViolationInside { a: String, b: String },
    #[error(transparent)]
    Gauss(#[from] GaussError),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// A composite error `Z(z) X^x W^chi`. Vacuum codes additionally dress the
/// Wilson lines with matter (`vacuum_k` for bosons, automatic for fermions).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorOp {
    /// Total Wilson-line exponents.
    pub links: WilsonLineProduct,
    /// Matter shifts `x[v][slot]` (fermions: one bit per vertex).
    pub matter_x: MatterX,
    /// Matter phases `z[v][slot]`, acting as `exp(2 pi i z n)`.
    pub matter_z: Vec<Vec<RationalPhase>>,
    /// Dressing data for bosonic vacuum codes; `None` means minimal dressing.
    pub vacuum_k: Option<DressedK>,
    pub label: String,
}

impl ErrorOp {
    /// The identity error of a code.
    pub fn identity(code: &CodeInstance) -> Self {
        let nv = code.lattice.num_vertices();
        let slots = code.matter_slots();
        ErrorOp {
            links: WilsonLineProduct::identity(&code.group, code.lattice.num_links()),
            matter_x: vec![vec![0; slots]; nv],
            matter_z: vec![vec![RationalPhase::zero(); slots]; nv],
            vacuum_k: None,
            label: "I".to_string(),
        }
    }

    /// A pure Wilson-line error.
    pub fn wilson(code: &CodeInstance, links: WilsonLineProduct, label: &str) -> Self {
        ErrorOp { links, label: label.to_string(), ..ErrorOp::identity(code) }
    }

    /// Pure Wilson-line error from integer exponents (single-factor groups).
    pub fn from_ints(code: &CodeInstance, ints: &[i64], label: &str) -> Self {
        ErrorOp::wilson(code, WilsonLineProduct::from_ints(&code.group, ints), label)
    }

    /// Error from a section entry.
    pub fn from_entry(code: &CodeInstance, entry: &SectionEntry) -> Self {
        let mut e = ErrorOp::wilson(code, entry.links.clone(), &format!("R{}", entry.syndrome.to_tuple()));
        if let Some(x) = &entry.matter_x {
            e.matter_x = x.clone();
        }
        e
    }

    /// Whether no matter shift is present.
    pub fn x_free(&self) -> bool {
        self.matter_x.iter().flatten().all(|&x| x == 0)
    }

    /// Checks shapes and bounds against a code.
    pub fn validate(&self, code: &CodeInstance) -> Result<(), ErrorsError> {
        let nv = code.lattice.num_vertices();
        let slots = code.matter_slots();
        let bad = |s: String| Err(ErrorsError::IncompatibleError(s));
        if self.links.len() != code.lattice.num_links() {
            return bad(format!("{} link exponents for {} links", self.links.len(), code.lattice.num_links()));
        }
        if self.matter_x.len() != nv
            || self.matter_z.len() != nv
            || self.matter_x.iter().chain(std::iter::empty()).any(|r| r.len() != slots)
            || self.matter_z.iter().any(|r| r.len() != slots)
        {
            return bad(format!("matter data must have {nv} rows of {slots} slots"));
        }
        match (&code.matter, code.family) {
            (MatterContent::Bosonic(species), Family::BosonicGL) => {
                crate::gauss_map::check_matter_x(&code.group, species, nv, &self.matter_x)?;
            }
            (MatterContent::Fermionic { .. }, Family::FermionicGL) => {
                if self.matter_x.iter().flatten().any(|&x| x != 0 && x != 1) {
                    return bad("fermionic x must be a bit".into());
                }
            }
            (_, Family::BosonicVacuum | Family::FermionicVacuum)
                if !self.x_free() => {
                    return bad("vacuum codes take dressed Wilson lines, not bare matter shifts".into());
                }
            _ => {}
        }
        if self.vacuum_k.is_some() && code.family != Family::BosonicVacuum {
            return bad("dressed-line data only applies to bosonic vacuum codes".into());
        }
        if let Some(k) = &self.vacuum_k {
            let species = code.species();
            if k.len() != code.lattice.num_links() || k.iter().any(|row| row.len() != species.len()) {
                return bad("dressed-line data must have one row per link and one pair per species".into());
            }
            let flux = dressed_flux(&code.group, species, k);
            let rest = self.links.compose(&code.group, &flux.inverse(&code.group));
            if !divergence(&code.group, &code.lattice, &rest).iter().all(Character::is_trivial) {
                return bad("Wilson lines beyond the dressed flux must be closed loops".into());
            }
        }
        Ok(())
    }
}

impl fmt::Display for ErrorOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)
    }
}

/// Per-vertex dressing `k` actually used for a bosonic vacuum error.
pub fn effective_dressing(code: &CodeInstance, e: &ErrorOp) -> Result<DressedK, ErrorsError> {
    match &e.vacuum_k {
        Some(k) => Ok(k.clone()),
        None => lift_dressed(code, &e.links),
    }
}

/// Minimal dressing of a Wilson-line product: on every link the
/// lexicographically smallest exponents `f_s in [0, ord rho_s)` with
/// `prod rho_s^{f_s} = chi_l`, placed on the particle lines.
pub fn lift_dressed(code: &CodeInstance, links: &WilsonLineProduct) -> Result<DressedK, ErrorsError> {
    let g = &code.group;
    let species = code.species();
    let orders: Vec<u64> = species.iter().map(|s| g.character_order(&s.charge)).collect();
    let total: u64 = orders.iter().product();
    let mut out = Vec::with_capacity(links.len());
    for (l, chi) in links.exponents().iter().enumerate() {
        let mut best: Option<(u64, Vec<u64>)> = None;
        for mut idx in 0..total {
            let f: Vec<u64> = orders
                .iter()
                .map(|&o| {
                    let v = idx % o;
                    idx /= o;
                    v
                })
                .collect();
            let got = species
                .iter()
                .zip(&f)
                .fold(g.trivial_character(), |acc, (s, &k)| g.mul(&acc, &g.pow(&s.charge, k as i64)));
            if &got != chi {
                continue;
            }
            let weight: u64 = f.iter().sum();
            let better = match &best {
                None => true,
                Some((w, b)) => weight < *w || (weight == *w && f.iter().rev().lt(b.iter().rev())),
            };
            if better {
                best = Some((weight, f));
            }
        }
        let (_, f) = best.ok_or_else(|| {
            ErrorsError::IncompatibleError(format!("no species combination carries {} on link {l}", chi))
        })?;
        out.push(f.into_iter().map(|k| (k, 0)).collect());
    }
    Ok(out)
}

/// Signed occupation shifts `delta[v][slot]` produced by dressed lines.
fn dressing_shifts(code: &CodeInstance, k: &DressedK) -> Vec<Vec<i64>> {
    let species = code.species();
    let mut delta = vec![vec![0i64; code.matter_slots()]; code.lattice.num_vertices()];
    for (l, link) in code.lattice.links().iter().enumerate() {
        let mut slot = 0;
        for (s, sp) in species.iter().enumerate() {
            let (ka, kb) = (k[l][s].0 as i64, k[l][s].1 as i64);
            match sp.kind {
                SpeciesKind::FiniteOrder => {
                    delta[link.tail][slot] -= ka - kb;
                    delta[link.head][slot] += ka - kb;
                }
                SpeciesKind::OscillatorPair { .. } => {
                    delta[link.head][slot] += ka;
                    delta[link.tail][slot + 1] += ka;
                    delta[link.tail][slot] += kb;
                    delta[link.head][slot + 1] += kb;
                }
            }
            slot += sp.slots();
        }
    }
    delta
}

/// Outcome of the fermionic vacuum admissibility test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Admissibility {
    /// The dressing: `psi^dagger` at even sites, `psi` at odd sites, in vertex order.
    Admissible(Vec<(usize, FermionOp)>),
    /// The first vertex where no dressing exists; the error annihilates the vacuum.
    Inadmissible(usize),
}

/// Admissibility of a Wilson-line product on the staggered fermionic vacuum:
/// at every vertex the divergence must be trivial or `conj(chi_F)^{dN_v}`
/// with `dN = +1` on even and `-1` on odd sites.
pub fn fermionic_vacuum_admissible(code: &CodeInstance, w: &WilsonLineProduct) -> Result<Admissibility, ErrorsError> {
    let (chi_f, coloring) = match &code.matter {
        MatterContent::Fermionic { chi_f, coloring } => (chi_f, coloring),
        _ => return Err(ErrorsError::IncompatibleError("fermionic matter required".into())),
    };
    let g = &code.group;
    let mut ops = Vec::new();
    for (v, d) in divergence(g, &code.lattice, w).iter().enumerate() {
        if d.is_trivial() {
            continue;
        }
        let even = coloring.parity(v) == 0;
        let needed = if even { g.conj(chi_f) } else { chi_f.clone() };
        if *d != needed {
            return Ok(Admissibility::Inadmissible(v));
        }
        ops.push((v, if even { FermionOp::PsiDag } else { FermionOp::Psi }));
    }
    Ok(Admissibility::Admissible(ops))
}

/// One charge bin at a vertex of a fermionic Gauss law code: `[q]_0 = {q}`,
/// `[q]_1 = {q chi_F, q conj(chi_F)}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bin {
    pub x: u8,
    pub q: Character,
    pub charges: BTreeSet<Character>,
}

impl Bin {
    /// Builds the bin of divergence `q` and flip bit `x`.
    pub fn new(group: &GroupSpec, chi_f: &Character, q: Character, x: u8) -> Self {
        let charges = if x == 0 {
            BTreeSet::from([q.clone()])
        } else {
            BTreeSet::from([group.mul(&q, chi_f), group.mul(&q, &group.conj(chi_f))])
        };
        Bin { x, q, charges }
    }

    /// Whether the measurements of two bins at one vertex are mutually
    /// exclusive. The outcome is read conditionally on the occupation, so bins
    /// with equal flip bits only need distinct divergences, while bins with
    /// different flip bits must not differ by `chi_F` or its conjugate.
    pub fn distinguishable(&self, other: &Bin, group: &GroupSpec, chi_f: &Character) -> bool {
        if self.x == other.x {
            self.q != other.q
        } else {
            let ratio = group.mul(&self.q, &group.conj(&other.q));
            ratio != *chi_f && ratio != group.conj(chi_f)
        }
    }
}

impl fmt::Display for Bin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]_{}", self.q, self.x)
    }
}

/// A maximal family of pairwise distinguishable bins at one vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinScheme {
    pub vertex: usize,
    pub bins: Vec<Bin>,
}

/// Maximal bin schemes per vertex. Vertices outside `x_support` only admit
/// `x = 0` bins (the pure gauge syndromes); vertices inside may mix flip bits.
pub fn fermionic_bin_schemes(code: &CodeInstance, x_support: &BTreeSet<usize>) -> Result<Vec<BinScheme>, ErrorsError> {
    let chi_f = match &code.matter {
        MatterContent::Fermionic { chi_f, .. } if code.family == Family::FermionicGL => chi_f,
        _ => return Err(ErrorsError::IncompatibleError("fermionic Gauss law code required".into())),
    };
    let g = &code.group;
    let mut out = Vec::new();
    for v in 0..code.lattice.num_vertices() {
        let flips: &[u8] = if x_support.contains(&v) { &[0, 1] } else { &[0] };
        let bins: Vec<Bin> = flips
            .iter()
            .flat_map(|&x| g.characters().into_iter().map(move |q| (x, q)))
            .map(|(x, q)| Bin::new(g, chi_f, q, x))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let compatible = |a: &Bin, b: &Bin| a.distinguishable(b, g, chi_f);
        for clique in maximal_cliques(bins.len(), |i, j| compatible(&bins[i], &bins[j])) {
            out.push(BinScheme { vertex: v, bins: clique.into_iter().map(|i| bins[i].clone()).collect() });
        }
    }
    Ok(out)
}

/// Maximal cliques of a small graph (Bron-Kerbosch with pivoting).
fn maximal_cliques(n: usize, adj: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    fn recurse(
        r: Vec<usize>,
        p: BTreeSet<usize>,
        x: BTreeSet<usize>,
        adj: &dyn Fn(usize, usize) -> bool,
        out: &mut Vec<Vec<usize>>,
    ) {
        if p.is_empty() && x.is_empty() {
            out.push(r);
            return;
        }
        let pivot = *p.iter().chain(x.iter()).next().expect("nonempty");
        let candidates: Vec<usize> = p.iter().copied().filter(|&u| u == pivot || !adj(u, pivot)).collect();
        let (mut p, mut x) = (p, x);
        for u in candidates {
            let mut r2 = r.clone();
            r2.push(u);
            let p2 = p.iter().copied().filter(|&w| w != u && adj(u, w)).collect();
            let x2 = x.iter().copied().filter(|&w| w != u && adj(u, w)).collect();
            recurse(r2, p2, x2, adj, out);
            p.remove(&u);
            x.insert(u);
        }
    }
    let mut out = Vec::new();
    recurse(Vec::new(), (0..n).collect(), BTreeSet::new(), &adj, &mut out);
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort();
    out
}

/// Symbolic syndrome of an error on a code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ErrorSyndrome {
    /// Gauge charges (pure gauge, fermionic with `x = 0`, fermionic vacuum)
    /// or total charges (bosonic matter).
    Charges(Syndrome),
    /// Bosonic vacuum: occupations and the coarse charge key.
    Occupations { fine: VacuumSyndrome, coarse: Syndrome },
    /// Fermionic Gauss law code with matter flips: one bin per vertex.
    Bins(Vec<Bin>),
    /// Fermionic vacuum error without admissible dressing.
    Annihilates(usize),
}

impl fmt::Display for ErrorSyndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorSyndrome::Charges(s) => write!(f, "{}", s.to_tuple()),
            ErrorSyndrome::Occupations { fine, .. } => write!(f, "{}", fine.to_tuple()),
            ErrorSyndrome::Bins(b) => {
                write!(f, "({})", b.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(","))
            }
            ErrorSyndrome::Annihilates(v) => write!(f, "annihilates(v{v})"),
        }
    }
}

fn root_scope(code: &CodeInstance) -> Scope {
    Scope::ExcludeRoot(code.tree.root())
}

/// Symbolic syndrome of `e`, matching the stabilizer measurement on any codeword.
pub fn syndrome_of(e: &ErrorOp, code: &CodeInstance) -> Result<ErrorSyndrome, ErrorsError> {
    e.validate(code)?;
    let g = &code.group;
    let lat = &code.lattice;
    match (&code.family, &code.matter) {
        (Family::PureGaugeGL, _) => Ok(ErrorSyndrome::Charges(gauss_map(g, lat, &e.links, root_scope(code)))),
        (Family::BosonicGL, MatterContent::Bosonic(species)) => {
            Ok(ErrorSyndrome::Charges(gauss_map_bosonic(g, lat, species, &e.links, &e.matter_x)?))
        }
        (Family::FermionicGL, MatterContent::Fermionic { chi_f, .. }) => {
            if e.x_free() {
                return Ok(ErrorSyndrome::Charges(gauss_map(g, lat, &e.links, root_scope(code))));
            }
            let div = divergence(g, lat, &e.links);
            Ok(ErrorSyndrome::Bins(
                div.into_iter().zip(&e.matter_x).map(|(q, x)| Bin::new(g, chi_f, q, x[0] as u8)).collect(),
            ))
        }
        (Family::BosonicVacuum, MatterContent::Bosonic(species)) => {
            let k = effective_dressing(code, e)?;
            Ok(ErrorSyndrome::Occupations {
                fine: gauss_map_vacuum(g, lat, species, &k),
                coarse: gauss_map(g, lat, &e.links, root_scope(code)),
            })
        }
        (Family::FermionicVacuum, _) => match fermionic_vacuum_admissible(code, &e.links)? {
            Admissibility::Admissible(_) => Ok(ErrorSyndrome::Charges(gauss_map(g, lat, &e.links, root_scope(code)))),
            Admissibility::Inadmissible(v) => Ok(ErrorSyndrome::Annihilates(v)),
        },
        _ => Err(ErrorsError::IncompatibleError("matter does not match the family".into())),
    }
}

/// Logical data of a Knill-Laflamme violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicalWitness {
    /// Wilson-line difference `conj(chi_a) eta_b` (a closed loop when `x_shift` vanishes).
    pub loops: WilsonLineProduct,
    /// Its values on the system links, which fix a closed loop uniquely.
    pub system: Vec<(usize, Character)>,
    /// Matter shift difference.
    pub x_shift: MatterX,
    /// Matter phase difference.
    pub z_diff: Vec<Vec<RationalPhase>>,
    /// Short description.
    pub description: String,
}

/// Result of a Knill-Laflamme check on a pair of errors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KLVerdict {
    /// `Pi E_a^dagger E_b Pi = 0`.
    OrthogonalCorrectable,
    /// `Pi E_a^dagger E_b Pi` is a nonzero multiple of `Pi`.
    IdenticalOnCode,
    /// The product acts as a nontrivial logical.
    Violation(LogicalWitness),
}

impl KLVerdict {
    /// Whether the pair is correctable.
    pub fn is_correctable(&self) -> bool {
        !matches!(self, KLVerdict::Violation(_))
    }

    /// Short name.
    pub fn name(&self) -> &'static str {
        match self {
            KLVerdict::OrthogonalCorrectable => "orthogonal",
            KLVerdict::IdenticalOnCode => "identical",
            KLVerdict::Violation(_) => "violation",
        }
    }
}

impl fmt::Display for KLVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KLVerdict::Violation(w) => write!(f, "violation: {}", w.description),
            other => write!(f, "{}", other.name()),
        }
    }
}

/// Per-vertex occupation options `(charge, phase)`; returns the phases
/// reachable with trivial total charge.
fn neutral_phases(group: &GroupSpec, options: &[Vec<(Character, RationalPhase)>]) -> BTreeSet<RationalPhase> {
    let mut reach: BTreeMap<Character, BTreeSet<RationalPhase>> = BTreeMap::new();
    reach.insert(group.trivial_character(), BTreeSet::from([RationalPhase::zero()]));
    for opts in options {
        let mut next: BTreeMap<Character, BTreeSet<RationalPhase>> = BTreeMap::new();
        for (q, phases) in &reach {
            for (c, p) in opts {
                let entry = next.entry(group.mul(q, c)).or_default();
                for ph in phases {
                    entry.insert(*ph + *p);
                }
            }
        }
        reach = next;
    }
    reach.remove(&group.trivial_character()).unwrap_or_default()
}

/// Occupation labels of one vertex's bosonic registers.
fn vertex_configs(group: &GroupSpec, species: &[Species]) -> Vec<Vec<i64>> {
    let dims: Vec<usize> = species
        .iter()
        .flat_map(|s| std::iter::repeat_n(s.register_dim(group), s.slots()))
        .collect();
    let total: usize = dims.iter().product();
    (0..total)
        .map(|mut idx| {
            dims.iter()
                .map(|&d| {
                    let v = idx % d;
                    idx /= d;
                    v as i64
                })
                .collect()
        })
        .collect()
}

fn z_difference(a: &ErrorOp, b: &ErrorOp) -> Vec<Vec<RationalPhase>> {
    a.matter_z
        .iter()
        .zip(&b.matter_z)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(&za, &zb)| zb + -za).collect())
        .collect()
}

fn witness(code: &CodeInstance, loops: WilsonLineProduct, x_shift: MatterX, z_diff: Vec<Vec<RationalPhase>>) -> LogicalWitness {
    let system = code
        .tree
        .system_links()
        .into_iter()
        .map(|l| (l, loops.get(l).clone()))
        .filter(|(_, c)| !c.is_trivial())
        .collect();
    let mut parts = Vec::new();
    if !loops.is_identity() {
        parts.push(format!("W{}", loops.to_tuple()));
    }
    for (v, row) in x_shift.iter().enumerate() {
        for (s, &x) in row.iter().enumerate() {
            if x != 0 {
                parts.push(format!("X[{v},{s}:{x}]"));
            }
        }
    }
    for (v, row) in z_diff.iter().enumerate() {
        for (s, z) in row.iter().enumerate() {
            if !z.is_zero() {
                parts.push(format!("Z[{v},{s}:{z}]"));
            }
        }
    }
    LogicalWitness { loops, system, x_shift, z_diff, description: parts.join(" ") }
}

/// Symbolic Knill-Laflamme check of a pair of errors.
pub fn kl_check_pair(ea: &ErrorOp, eb: &ErrorOp, code: &CodeInstance) -> Result<KLVerdict, ErrorsError> {
    ea.validate(code)?;
    eb.validate(code)?;
    let g = &code.group;
    let lat = &code.lattice;
    let delta_links = ea.links.inverse(g).compose(g, &eb.links);
    let zero_x = vec![vec![0i64; code.matter_slots()]; lat.num_vertices()];
    let zero_z = vec![vec![RationalPhase::zero(); code.matter_slots()]; lat.num_vertices()];
    match (&code.family, &code.matter) {
        (Family::PureGaugeGL, _) => {
            if syndrome_of(ea, code)? != syndrome_of(eb, code)? {
                return Ok(KLVerdict::OrthogonalCorrectable);
            }
            if delta_links.is_identity() {
                Ok(KLVerdict::IdenticalOnCode)
            } else {
                Ok(KLVerdict::Violation(witness(code, delta_links, zero_x, zero_z)))
            }
        }
        (Family::BosonicGL, MatterContent::Bosonic(species)) => {
            if syndrome_of(ea, code)? != syndrome_of(eb, code)? {
                return Ok(KLVerdict::OrthogonalCorrectable);
            }
            let x_shift = bosonic_x_shift(g, species, &ea.matter_x, &eb.matter_x);
            let z_diff = z_difference(ea, eb);
            if !delta_links.is_identity() || x_shift.iter().flatten().any(|&x| x != 0) {
                return Ok(KLVerdict::Violation(witness(code, delta_links, x_shift, z_diff)));
            }
            // Same shift: the phase exp(2 pi i dz.(n + x_b)) must be constant on neutral matter.
            let configs = vertex_configs(g, species);
            let options: Vec<Vec<(Character, RationalPhase)>> = (0..lat.num_vertices())
                .map(|v| {
                    configs
                        .iter()
                        .map(|n| {
                            let phase = n
                                .iter()
                                .zip(&z_diff[v])
                                .fold(RationalPhase::zero(), |acc, (&k, z)| acc + z.times(k));
                            (matter_charge(g, species, n), phase)
                        })
                        .collect()
                })
                .collect();
            if neutral_phases(g, &options).len() <= 1 {
                Ok(KLVerdict::IdenticalOnCode)
            } else {
                Ok(KLVerdict::Violation(witness(code, delta_links, x_shift, z_diff)))
            }
        }
        (Family::FermionicGL, MatterContent::Fermionic { chi_f, coloring }) => {
            let div = divergence(g, lat, &delta_links);
            let x_shift: MatterX =
                ea.matter_x.iter().zip(&eb.matter_x).map(|(a, b)| vec![(a[0] ^ b[0]) & 1]).collect();
            let z_diff = z_difference(ea, eb);
            let charge = |v: usize, n: i64| g.pow(chi_f, n - coloring.parity(v) as i64);
            let mut options = Vec::with_capacity(lat.num_vertices());
            for v in 0..lat.num_vertices() {
                let mut opts = Vec::new();
                for n in 0..2i64 {
                    let keep = if x_shift[v][0] == 0 {
                        div[v].is_trivial()
                    } else {
                        // n -> 1 - n changes the matter charge by chi_F^{1 - 2n}.
                        g.mul(&div[v], &g.pow(chi_f, 1 - 2 * n)).is_trivial()
                    };
                    if keep {
                        let m = n ^ eb.matter_x[v][0];
                        opts.push((charge(v, n), z_diff[v][0].times(m)));
                    }
                }
                if opts.is_empty() {
                    return Ok(KLVerdict::OrthogonalCorrectable);
                }
                options.push(opts);
            }
            let phases = neutral_phases(g, &options);
            if phases.is_empty() {
                return Ok(KLVerdict::OrthogonalCorrectable);
            }
            let shifted = x_shift.iter().flatten().any(|&x| x != 0);
            if !shifted && delta_links.is_identity() && phases.len() == 1 {
                Ok(KLVerdict::IdenticalOnCode)
            } else {
                Ok(KLVerdict::Violation(witness(code, delta_links, x_shift, z_diff)))
            }
        }
        (Family::BosonicVacuum, _) | (Family::FermionicVacuum, _) => {
            let (sa, sb) = (syndrome_of(ea, code)?, syndrome_of(eb, code)?);
            if matches!(sa, ErrorSyndrome::Annihilates(_)) || matches!(sb, ErrorSyndrome::Annihilates(_)) || sa != sb {
                return Ok(KLVerdict::OrthogonalCorrectable);
            }
            if delta_links.is_identity() {
                Ok(KLVerdict::IdenticalOnCode)
            } else {
                Ok(KLVerdict::Violation(witness(code, delta_links, zero_x, zero_z)))
            }
        }
        _ => Err(ErrorsError::IncompatibleError("matter does not match the family".into())),
    }
}

fn bosonic_x_shift(group: &GroupSpec, species: &[Species], xa: &MatterX, xb: &MatterX) -> MatterX {
    xa.iter()
        .zip(xb)
        .map(|(ra, rb)| {
            let mut out = Vec::with_capacity(ra.len());
            let mut slot = 0;
            for sp in species {
                for k in 0..sp.slots() {
                    let d = rb[slot + k] - ra[slot + k];
                    out.push(match sp.kind {
                        SpeciesKind::FiniteOrder => d.rem_euclid(group.character_order(&sp.charge) as i64),
                        SpeciesKind::OscillatorPair { .. } => d,
                    });
                }
                slot += sp.slots();
            }
            out
        })
        .collect()
}

/// First violating pair of an error set, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetReport {
    pub pairs_checked: usize,
    pub violation: Option<(usize, usize, LogicalWitness)>,
}

impl SetReport {
    /// Whether every pair is correctable.
    pub fn correctable(&self) -> bool {
        self.violation.is_none()
    }
}

/// Pairwise Knill-Laflamme check of a set, stopping at the first violation.
pub fn check_set(errors: &[ErrorOp], code: &CodeInstance) -> Result<SetReport, ErrorsError> {
    let mut pairs = 0;
    for i in 0..errors.len() {
        for j in i..errors.len() {
            pairs += 1;
            if let KLVerdict::Violation(w) = kl_check_pair(&errors[i], &errors[j], code)? {
                return Ok(SetReport { pairs_checked: pairs, violation: Some((i, j, w)) });
            }
        }
    }
    Ok(SetReport { pairs_checked: pairs, violation: None })
}

/// How maximal a section's error set is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Maximality {
    /// One representative for every base point.
    Maximal,
    /// Every base point of a cutoff-truncated base is covered.
    MaximalOnTruncatedBase,
    /// Some base points lack a representative.
    Partial,
}

/// A correctable error set built from a section.
#[derive(Debug, Clone)]
pub struct ErrorSet {
    pub errors: Vec<ErrorOp>,
    pub maximality: Maximality,
}

/// The error set of a section, validated pairwise.
pub fn max_set_from_section(sec: &Section, code: &CodeInstance) -> Result<ErrorSet, ErrorsError> {
    let errors: Vec<ErrorOp> = sec.entries().map(|e| ErrorOp::from_entry(code, e)).collect();
    let report = check_set(&errors, code)?;
    if let Some((i, j, _)) = report.violation {
        return Err(ErrorsError::KLViolationInside { a: errors[i].label.clone(), b: errors[j].label.clone() });
    }
    let maximality = match (sec.covers_base(), sec.truncated()) {
        (true, false) => Maximality::Maximal,
        (true, true) => Maximality::MaximalOnTruncatedBase,
        (false, _) => Maximality::Partial,
    };
    Ok(ErrorSet { errors, maximality })
}

/// One primitive operator of an error's decomposition.
#[derive(Debug, Clone)]
enum Primitive {
    W(usize, Character),
    Boson(usize, usize, BosonOp),
    Fermion(usize, FermionOp),
    FermionPhase(usize, RationalPhase),
}

impl Primitive {
    fn inverse(&self, group: &GroupSpec) -> Primitive {
        match self {
            Primitive::W(l, chi) => Primitive::W(*l, group.conj(chi)),
            Primitive::Boson(v, s, op) => Primitive::Boson(
                *v,
                *s,
                match *op {
                    BosonOp::X(k) => BosonOp::X(-k),
                    BosonOp::XBar(k) => BosonOp::XBar(-k),
                    BosonOp::Z(t) => BosonOp::Z(-t),
                    BosonOp::ZBar(t) => BosonOp::ZBar(-t),
                    other => other,
                },
            ),
            Primitive::Fermion(v, op) => Primitive::Fermion(*v, dagger(*op)),
            Primitive::FermionPhase(v, t) => Primitive::FermionPhase(*v, -*t),
        }
    }

    fn apply(&self, state: &mut StateVector, group: &GroupSpec) -> Result<(), ErrorsError> {
        match self {
            Primitive::W(l, chi) => {
                state.apply_w(group, *l, chi)?;
            }
            Primitive::Boson(v, s, op) => {
                state.apply_boson(*v, *s, *op)?;
            }
            Primitive::Fermion(v, op) => {
                state.apply_fermion(*v, *op)?;
            }
            Primitive::FermionPhase(v, theta) => {
                let layout = state.layout().clone();
                let r = layout
                    .fermion_register(*v)
                    .ok_or_else(|| HilbertError::NoSuchRegister(format!("fermion {v}")))?;
                let theta = *theta;
                state.apply_diagonal(|i| theta.times(layout.digit(i, r) as i64).to_complex());
            }
        }
        Ok(())
    }
}

/// Decomposes `e` into primitives in application order: Wilson lines, then
/// matter shifts (or the vacuum dressing), then matter phases.
fn primitives(code: &CodeInstance, e: &ErrorOp) -> Result<Vec<Primitive>, ErrorsError> {
    e.validate(code)?;
    let mut out: Vec<Primitive> = e
        .links
        .exponents()
        .iter()
        .enumerate()
        .filter(|(_, chi)| !chi.is_trivial())
        .map(|(l, chi)| Primitive::W(l, chi.clone()))
        .collect();
    match &code.matter {
        MatterContent::None => {}
        MatterContent::Bosonic(species) => {
            let shifts: Vec<Vec<i64>> = if code.family == Family::BosonicVacuum {
                dressing_shifts(code, &effective_dressing(code, e)?)
            } else {
                e.matter_x.clone()
            };
            for pass in 0..2 {
                for (v, row) in shifts.iter().enumerate() {
                    let mut slot = 0;
                    for (s, sp) in species.iter().enumerate() {
                        for k in 0..sp.slots() {
                            let op = if pass == 0 {
                                let x = row[slot + k];
                                (x != 0).then_some(if k == 0 { BosonOp::X(x) } else { BosonOp::XBar(x) })
                            } else {
                                let t = e.matter_z[v][slot + k];
                                (!t.is_zero()).then_some(if k == 0 { BosonOp::Z(t) } else { BosonOp::ZBar(t) })
                            };
                            if let Some(op) = op {
                                out.push(Primitive::Boson(v, s, op));
                            }
                        }
                        slot += sp.slots();
                    }
                }
            }
        }
        MatterContent::Fermionic { .. } => {
            for v in 0..code.lattice.num_vertices() {
                if e.matter_x[v][0] == 1 {
                    out.push(Primitive::Fermion(v, FermionOp::X));
                }
            }
            if code.family == Family::FermionicVacuum {
                match fermionic_vacuum_admissible(code, &e.links)? {
                    Admissibility::Admissible(ops) => {
                        out.extend(ops.into_iter().map(|(v, op)| Primitive::Fermion(v, op)));
                    }
                    Admissibility::Inadmissible(v) => {
                        return Err(ErrorsError::IncompatibleError(format!(
                            "Wilson lines have no admissible dressing at vertex {v}"
                        )))
                    }
                }
            }
            for v in 0..code.lattice.num_vertices() {
                if !e.matter_z[v][0].is_zero() {
                    out.push(Primitive::FermionPhase(v, e.matter_z[v][0]));
                }
            }
        }
    }
    Ok(out)
}

/// Applies `e` to a state of the code's canonical layout.
pub fn apply_error(state: &mut StateVector, code: &CodeInstance, e: &ErrorOp) -> Result<(), ErrorsError> {
    for p in primitives(code, e)? {
        p.apply(state, &code.group)?;
    }
    Ok(())
}

/// Applies the adjoint of `e`: primitives inverted, in reverse order.
pub fn apply_error_adjoint(state: &mut StateVector, code: &CodeInstance, e: &ErrorOp) -> Result<(), ErrorsError> {
    for p in primitives(code, e)?.iter().rev() {
        p.inverse(&code.group).apply(state, &code.group)?;
    }
    Ok(())
}

fn dagger(op: FermionOp) -> FermionOp {
    match op {
        FermionOp::Psi => FermionOp::PsiDag,
        FermionOp::PsiDag => FermionOp::Psi,
        other => other,
    }
}

/// The syndrome key a stabilizer measurement assigns to one basis state.
pub fn measured_key(code: &CodeInstance, index: usize) -> Result<Syndrome, ErrorsError> {
    let dense = code.dense()?;
    let layout = &dense.layout;
    let g = &code.group;
    let lat = &code.lattice;
    let labels = layout.decode(index);
    let charges: Vec<Character> = match code.family {
        Family::PureGaugeGL | Family::FermionicGL | Family::BosonicGL => (0..lat.num_vertices())
            .map(|v| crate::hilbert::vertex_charge(layout, g, lat, &code.matter, &labels, v))
            .collect(),
        Family::BosonicVacuum | Family::FermionicVacuum => {
            // Matter charge only; the coarse key is its conjugate.
            let links_only = (0..lat.num_vertices())
                .map(|v| crate::hilbert::vertex_charge(layout, g, lat, &MatterContent::None, &labels, v));
            let total = (0..lat.num_vertices())
                .map(|v| crate::hilbert::vertex_charge(layout, g, lat, &code.matter, &labels, v));
            links_only.zip(total).map(|(l, t)| g.conj(&g.mul(&t, &g.conj(&l)))).collect()
        }
    };
    let scope = match code.family {
        Family::BosonicGL => Scope::AllVertices,
        _ => root_scope(code),
    };
    Ok(Syndrome::new(charges, scope))
}

/// How the measurement outcome is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeChoice {
    /// The most likely outcome (smallest key on ties).
    MostLikely,
    /// Sampled with the Born rule from a seeded generator.
    Seeded(u64),
}

/// Report of one error-correction round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundReport {
    pub error: String,
    /// Measured syndrome key, `None` if the error annihilated the state.
    pub syndrome: Option<String>,
    /// Label of the applied recovery (`none` if the syndrome is not in the section).
    pub recovery: String,
    pub success: bool,
    /// `|<initial|final>|`.
    pub fidelity: f64,
    /// The final state is a different codeword.
    pub logical_flip: bool,
}

impl RoundReport {
    /// Machine-readable record.
    pub fn record(&self) -> String {
        format!(
            "error={} syndrome={} recovery={} success={} fidelity={:.12} logical_flip={}",
            self.error.replace(' ', "_"),
            self.syndrome.as_deref().unwrap_or("none"),
            self.recovery,
            self.success,
            self.fidelity,
            self.logical_flip
        )
    }
}

/// Outcome of a syndrome measurement followed by recovery.
#[derive(Debug, Clone)]
pub struct Recovered {
    /// Post-measurement state, with the recovery applied when one was found.
    pub state: StateVector,
    /// Measured syndrome key.
    pub syndrome: Syndrome,
    /// Label of the applied recovery, `None` if the key is not in the section.
    pub recovery: Option<String>,
}

/// Measures the syndrome of a nonzero state, projects and normalizes, then
/// applies the adjoint of the section representative for the outcome.
pub fn measure_and_recover(
    code: &CodeInstance,
    mut state: StateVector,
    sec: &Section,
    choice: OutcomeChoice,
) -> Result<Recovered, ErrorsError> {
    let dense = code.dense()?;
    // Group basis states by measured syndrome.
    let mut weights: BTreeMap<Syndrome, f64> = BTreeMap::new();
    for (i, a) in state.amplitudes().iter().enumerate() {
        let w = a.norm_sqr();
        if w > 0.0 {
            *weights.entry(measured_key(code, i)?).or_default() += w;
        }
    }
    let key = match choice {
        OutcomeChoice::MostLikely => {
            weights.iter().fold(None::<(&Syndrome, f64)>, |best, (k, &w)| match best {
                Some((_, bw)) if bw >= w - 1e-15 => best,
                _ => Some((k, w)),
            })
        }
        .map(|(k, _)| k.clone()),
        OutcomeChoice::Seeded(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let total: f64 = weights.values().sum();
            let mut r = rng.gen::<f64>() * total;
            let mut picked = None;
            for (k, &w) in &weights {
                picked = Some(k.clone());
                if r < w {
                    break;
                }
                r -= w;
            }
            picked
        }
    }
    .expect("nonzero state has an outcome");
    let mask: Vec<bool> =
        (0..dense.layout.dim()).map(|i| measured_key(code, i).map(|k| k == key)).collect::<Result<_, _>>()?;
    state.project(&mask);
    state.normalize();
    let Some(entry) = sec.lookup(&key) else {
        return Ok(Recovered { state, syndrome: key, recovery: None });
    };
    let rep = ErrorOp::from_entry(code, entry);
    apply_error_adjoint(&mut state, code, &rep)?;
    Ok(Recovered { state, syndrome: key, recovery: Some(rep.label) })
}

/// Applies `e`, measures the syndrome, applies the adjoint of the section
/// representative and compares with the initial state.
pub fn simulate_round(
    code: &CodeInstance,
    initial: &StateVector,
    e: &ErrorOp,
    sec: &Section,
    choice: OutcomeChoice,
) -> Result<RoundReport, ErrorsError> {
    let dense = code.dense()?;
    let mut state = initial.clone();
    let failed = |syndrome: Option<String>| RoundReport {
        error: e.label.clone(),
        syndrome,
        recovery: "none".into(),
        success: false,
        fidelity: 0.0,
        logical_flip: false,
    };
    if code.family == Family::FermionicVacuum {
        if let Admissibility::Inadmissible(_) = fermionic_vacuum_admissible(code, &e.links)? {
            return Ok(failed(None));
        }
    }
    apply_error(&mut state, code, e)?;
    if state.norm() < RECOVERY_TOLERANCE {
        return Ok(failed(None));
    }
    let recovered = measure_and_recover(code, state, sec, choice)?;
    let key = recovered.syndrome;
    let state = recovered.state;
    let Some(rep_label) = recovered.recovery else {
        let mut r = failed(Some(key.to_tuple()));
        r.fidelity = state.inner(initial).norm();
        return Ok(r);
    };
    let overlap = initial.inner(&state);
    let fidelity = overlap.norm();
    let phase = if fidelity > 0.0 { overlap / fidelity } else { Complex64::new(1.0, 0.0) };
    let mut aligned = initial.clone();
    aligned.scale(phase);
    let deviation = {
        let mut diff = state.clone();
        diff.add_scaled(Complex64::new(-1.0, 0.0), &aligned);
        diff.norm()
    };
    let success = deviation <= RECOVERY_TOLERANCE;
    let in_code = state
        .amplitudes()
        .iter()
        .zip(&dense.code_mask)
        .all(|(a, &m)| m || a.norm_sqr() < RECOVERY_TOLERANCE * RECOVERY_TOLERANCE);
    Ok(RoundReport {
        error: e.label.clone(),
        syndrome: Some(key.to_tuple()),
        recovery: rep_label,
        success,
        fidelity,
        logical_flip: !success && in_code,
    })
}

/// Runs `simulate_round` from a codeword basis state.
pub fn simulate_codeword(
    code: &CodeInstance,
    codeword: usize,
    e: &ErrorOp,
    sec: &Section,
    choice: OutcomeChoice,
) -> Result<RoundReport, ErrorsError> {
    let dense = code.dense()?;
    let initial = StateVector::basis(dense.layout.clone(), codeword);
    simulate_round(code, &initial, e, sec, choice)
}

/// Whether a register of the canonical layout belongs to matter.
pub fn is_matter_register(reg: &Register) -> bool {
    !matches!(reg, Register::Link { .. })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::build_code;
    use crate::gauss_map::{make_section, SectionRule};
    use crate::lattice::Lattice;
    use crate::matter::Species;
    use crate::qrf::{SpanningTree, TreeStrategy};

    fn code_on(lat: Lattice, d: u64, matter: impl Fn(&GroupSpec, &Lattice) -> MatterContent, family: Family) -> CodeInstance {
        let g = GroupSpec::cyclic(d).unwrap();
        let tree = SpanningTree::build(&lat, 0, &TreeStrategy::Bfs).unwrap();
        let m = matter(&g, &lat);
        build_code(&lat, &g, &tree, &m, family).unwrap()
    }

    fn pure_triangle() -> CodeInstance {
        code_on(Lattice::ring(3).unwrap(), 2, |_, _| MatterContent::None, Family::PureGaugeGL)
    }

    fn single_flip_section(code: &CodeInstance) -> Section {
        let rows = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]
            .iter()
            .map(|ints| {
                let w = WilsonLineProduct::from_ints(&code.group, ints);
                (gauss_map(&code.group, &code.lattice, &w, root_scope(code)), w, None)
            })
            .collect();
        make_section(&code.syndrome_base(), &SectionRule::ExplicitTable(rows), "single").unwrap()
    }

    #[test]
    fn pure_gauge_syndromes_and_verdicts() {
        let code = pure_triangle();
        let x0 = ErrorOp::from_ints(&code, &[1, 0, 0], "X0");
        let x1 = ErrorOp::from_ints(&code, &[0, 1, 0], "X1");
        let all = ErrorOp::from_ints(&code, &[1, 1, 1], "X0X1X2");
        assert_eq!(syndrome_of(&x0, &code).unwrap().to_string(), "(1,1,0)");
        assert_eq!(kl_check_pair(&x0, &x1, &code).unwrap(), KLVerdict::OrthogonalCorrectable);
        assert_eq!(kl_check_pair(&x0, &x0, &code).unwrap(), KLVerdict::IdenticalOnCode);
        match kl_check_pair(&all, &ErrorOp::identity(&code), &code).unwrap() {
            KLVerdict::Violation(w) => assert_eq!(w.loops.to_tuple(), "(1,1,1)"),
            other => panic!("expected violation, got {other}"),
        }
    }

    #[test]
    fn mixed_set_rejected() {
        let code = pure_triangle();
        let set = [ErrorOp::from_ints(&code, &[0, 1, 0], "X1"), ErrorOp::from_ints(&code, &[1, 0, 1], "X0X2")];
        let report = check_set(&set, &code).unwrap();
        let (_, _, w) = report.violation.unwrap();
        assert_eq!(w.loops.to_tuple(), "(1,1,1)");
    }

    #[test]
    fn recovery_rounds() {
        let code = pure_triangle();
        let sec = single_flip_section(&code);
        let x2 = ErrorOp::from_ints(&code, &[0, 0, 1], "X2");
        let r = simulate_codeword(&code, 0, &x2, &sec, OutcomeChoice::MostLikely).unwrap();
        assert!(r.success);
        assert!((r.fidelity - 1.0).abs() < 1e-12);
        let logical = ErrorOp::from_ints(&code, &[1, 1, 1], "XXX");
        let r = simulate_codeword(&code, 0, &logical, &sec, OutcomeChoice::Seeded(7)).unwrap();
        assert!(!r.success && r.logical_flip);
        assert_eq!(r.syndrome.as_deref(), Some("(0,0,0)"));
    }

    #[test]
    fn bosonic_matter_flip_syndrome() {
        let code = code_on(
            Lattice::ring(3).unwrap(),
            2,
            |g, _| MatterContent::Bosonic(vec![Species::finite(g.character(&[1]).unwrap())]),
            Family::BosonicGL,
        );
        let mut e = ErrorOp::identity(&code);
        e.matter_x[1][0] = 1;
        assert_eq!(syndrome_of(&e, &code).unwrap().to_string(), "(0,1,0)");
    }

    #[test]
    fn fermionic_x_and_y_conflict() {
        let code = code_on(
            Lattice::ring(4).unwrap(),
            2,
            |g, lat| MatterContent::fermionic(lat, g.character(&[1]).unwrap()).unwrap(),
            Family::FermionicGL,
        );
        let mut x = ErrorOp::identity(&code);
        x.matter_x[1][0] = 1;
        let mut y = x.clone();
        y.matter_z[1][0] = RationalPhase::new(1, 2);
        match kl_check_pair(&x, &y, &code).unwrap() {
            KLVerdict::Violation(w) => {
                assert_eq!(w.z_diff[1][0], RationalPhase::new(1, 2));
                assert!(w.loops.is_identity());
            }
            other => panic!("expected violation, got {other}"),
        }
    }

    #[test]
    fn z3_mixed_bins() {
        let code = code_on(
            Lattice::ring(4).unwrap(),
            3,
            |g, lat| MatterContent::fermionic(lat, g.character(&[1]).unwrap()).unwrap(),
            Family::FermionicGL,
        );
        let schemes = fermionic_bin_schemes(&code, &BTreeSet::from([0])).unwrap();
        let at0: Vec<usize> = schemes.iter().filter(|s| s.vertex == 0).map(|s| s.bins.len()).collect();
        assert_eq!(at0.iter().max(), Some(&3));
        assert!(schemes.iter().filter(|s| s.vertex == 0).any(|s| s.bins.len() == 3 && s.bins.iter().all(|b| b.x == 1)));
        assert!(schemes.iter().filter(|s| s.vertex == 0).any(|s| s.bins.len() == 2 && s.bins[0].x != s.bins[1].x));
        let at1: Vec<usize> = schemes.iter().filter(|s| s.vertex == 1).map(|s| s.bins.len()).collect();
        assert_eq!(at1, vec![3]);
    }

    #[test]
    fn fermionic_vacuum_dressing() {
        let code = code_on(
            Lattice::ring(4).unwrap(),
            4,
            |g, lat| MatterContent::fermionic(lat, g.character(&[1]).unwrap()).unwrap(),
            Family::FermionicVacuum,
        );
        let g = &code.group;
        // Link 1 runs from the odd site 1 to the even site 2.
        let single = WilsonLineProduct::single(g, 4, 1, g.character(&[1]).unwrap());
        assert_eq!(
            fermionic_vacuum_admissible(&code, &single).unwrap(),
            Admissibility::Admissible(vec![(1, FermionOp::Psi), (2, FermionOp::PsiDag)])
        );
        let double = WilsonLineProduct::single(g, 4, 0, g.character(&[2]).unwrap());
        assert_eq!(fermionic_vacuum_admissible(&code, &double).unwrap(), Admissibility::Inadmissible(0));
        assert_eq!(
            fermionic_vacuum_admissible(&code, &WilsonLineProduct::identity(g, 4)).unwrap(),
            Admissibility::Admissible(vec![])
        );
    }
}
