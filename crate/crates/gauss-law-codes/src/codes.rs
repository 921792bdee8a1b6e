//! Code constructors for the five code families and their parameters.

use std::sync::Arc;

use thiserror::Error;

use crate::gauss_map::{divergence, matter_charge, BaseKind, SyndromeBase};
use crate::group::{Character, GroupElement, GroupSpec, RationalPhase};
use crate::hilbert::{pn_mask, vertex_charges, BosonSlot, HilbertError, Register, RegisterLayout, DEFAULT_DIMENSION_CAP};
use crate::lattice::Lattice;
pub use crate::matter::{MatterContent, Species, SpeciesKind};
use crate::qrf::{SpanningTree, WilsonLineProduct};

/// Default weight bound of the X-distance search.
pub const DEFAULT_WMAX: usize = 6;

/// Errors raised while building codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    /// Matter content does not fit the family.
    #[error("matter content incompatible with family {family:?}: {reason}")]
    IncompatibleMatter { family: Family, reason: String },
    /// Dense data would exceed the dimension cap.
    #[error(transparent)]
    DimensionCap(#[from] HilbertError),
    /// The tree does not belong to the lattice.
    #[error("tree does not span this lattice")]
    TreeMismatch,
}

/// The code families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    PureGaugeGL,
    BosonicGL,
    FermionicGL,
    BosonicVacuum,
    FermionicVacuum,
}

impl Family {
    /// Spec-file spelling.
    pub fn name(&self) -> &'static str {
        match self {
            Family::PureGaugeGL => "pure-gauge-gl",
            Family::BosonicGL => "bosonic-gl",
            Family::FermionicGL => "fermionic-gl",
            Family::BosonicVacuum => "bosonic-vacuum",
            Family::FermionicVacuum => "fermionic-vacuum",
        }
    }

    /// Parses the spec-file spelling.
    pub fn parse(s: &str) -> Option<Family> {
        [
            Family::PureGaugeGL,
            Family::BosonicGL,
            Family::FermionicGL,
            Family::BosonicVacuum,
            Family::FermionicVacuum,
        ]
        .into_iter()
        .find(|f| f.name() == s.trim().to_ascii_lowercase())
    }

    /// Whether the code space is a matter vacuum.
    pub fn is_vacuum(&self) -> bool {
        matches!(self, Family::BosonicVacuum | Family::FermionicVacuum)
    }
}

/// Dense data of a code: layout, the gauge-invariant mask and the code mask.
#[derive(Debug, Clone)]
pub struct DenseData {
    pub layout: Arc<RegisterLayout>,
    pub pn_mask: Vec<bool>,
    pub code_mask: Vec<bool>,
}

impl DenseData {
    /// Indices of code basis states.
    pub fn code_basis(&self) -> Vec<usize> {
        (0..self.code_mask.len()).filter(|&i| self.code_mask[i]).collect()
    }

    /// Indices of gauge-invariant basis states.
    pub fn pn_basis(&self) -> Vec<usize> {
        (0..self.pn_mask.len()).filter(|&i| self.pn_mask[i]).collect()
    }
}

/// A fully specified code.
#[derive(Debug, Clone)]
pub struct CodeInstance {
    pub lattice: Lattice,
    pub group: GroupSpec,
    pub tree: SpanningTree,
    pub matter: MatterContent,
    pub family: Family,
    dense: Option<DenseData>,
    cap: usize,
}

/// Builds a code with dense data, failing if the kinematical dimension
/// exceeds the default cap.
pub fn build_code(
    lat: &Lattice,
    group: &GroupSpec,
    tree: &SpanningTree,
    matter: &MatterContent,
    family: Family,
) -> Result<CodeInstance, CodeError> {
    build_code_with_cap(lat, group, tree, matter, family, DEFAULT_DIMENSION_CAP)
}

/// Builds a code with dense data under an explicit dimension cap.
pub fn build_code_with_cap(
    lat: &Lattice,
    group: &GroupSpec,
    tree: &SpanningTree,
    matter: &MatterContent,
    family: Family,
    cap: usize,
) -> Result<CodeInstance, CodeError> {
    let mut code = build_code_symbolic(lat, group, tree, matter, family)?;
    let layout = Arc::new(RegisterLayout::for_lattice(lat, group, matter, cap)?);
    let pn = pn_mask(&layout, group, lat, matter);
    let code_mask = if family.is_vacuum() {
        (0..layout.dim()).map(|i| pn[i] && is_matter_vacuum(&layout, matter, i)).collect()
    } else {
        pn.clone()
    };
    code.dense = Some(DenseData { layout, pn_mask: pn, code_mask });
    code.cap = cap;
    Ok(code)
}

/// Builds a code without dense data, for symbolic work on large lattices.
pub fn build_code_symbolic(
    lat: &Lattice,
    group: &GroupSpec,
    tree: &SpanningTree,
    matter: &MatterContent,
    family: Family,
) -> Result<CodeInstance, CodeError> {
    if tree.tree_links().len() + 1 != lat.num_vertices() || tree.tree_links().iter().any(|&l| l >= lat.num_links()) {
        return Err(CodeError::TreeMismatch);
    }
    let bad = |reason: &str| Err(CodeError::IncompatibleMatter { family, reason: reason.to_string() });
    match (family, matter) {
        (Family::PureGaugeGL, MatterContent::None) => {}
        (Family::PureGaugeGL, _) => return bad("pure gauge codes carry no matter"),
        (Family::BosonicGL | Family::BosonicVacuum, MatterContent::Bosonic(species)) => {
            if species.is_empty() {
                return bad("at least one species is required");
            }
            if !group.generates_dual(&species.iter().map(|s| s.charge.clone()).collect::<Vec<_>>()) {
                return bad("species charges must generate the dual group");
            }
        }
        (Family::BosonicGL | Family::BosonicVacuum, _) => return bad("bosonic matter required"),
        (Family::FermionicGL | Family::FermionicVacuum, MatterContent::Fermionic { chi_f, coloring }) => {
            if chi_f.is_trivial() {
                return bad("fermion charge must be nontrivial");
            }
            if coloring.parities().len() != lat.num_vertices() {
                return bad("staggering does not match the lattice");
            }
        }
        (Family::FermionicGL | Family::FermionicVacuum, _) => return bad("fermionic matter required"),
    }
    Ok(CodeInstance {
        lattice: lat.clone(),
        group: group.clone(),
        tree: tree.clone(),
        matter: matter.clone(),
        family,
        dense: None,
        cap: 0,
    })
}

fn is_matter_vacuum(layout: &RegisterLayout, matter: &MatterContent, index: usize) -> bool {
    layout.registers().iter().enumerate().all(|(r, reg)| {
        let d = layout.digit(index, r);
        match reg {
            Register::Link { .. } => true,
            Register::Boson { .. } => d == 0,
            Register::Fermion { vertex, .. } => match matter {
                MatterContent::Fermionic { coloring, .. } => d == coloring.parity(*vertex) as usize,
                _ => d == 0,
            },
        }
    })
}

impl CodeInstance {
    /// Dense data, or the cap error if the code was built symbolically.
    pub fn dense(&self) -> Result<&DenseData, CodeError> {
        self.dense.as_ref().ok_or(CodeError::DimensionCap(HilbertError::DimensionCap {
            dim: usize::MAX,
            cap: if self.cap == 0 { DEFAULT_DIMENSION_CAP } else { self.cap },
        }))
    }

    /// Whether dense data is present.
    pub fn has_dense(&self) -> bool {
        self.dense.is_some()
    }

    /// Bosonic species (empty for other matter).
    pub fn species(&self) -> &[Species] {
        self.matter.species()
    }

    /// Number of matter slots per vertex.
    pub fn matter_slots(&self) -> usize {
        self.matter.registers_per_vertex()
    }

    /// The syndrome base used for sections of this code.
    pub fn syndrome_base(&self) -> SyndromeBase {
        let kind = match self.family {
            Family::BosonicGL => BaseKind::MatterCharges { species: self.species().to_vec() },
            _ => BaseKind::GaugeCharges,
        };
        SyndromeBase { group: self.group.clone(), lattice: self.lattice.clone(), tree: self.tree.clone(), kind }
    }

    /// Exact code dimension from counting: `|G|^{N_L - N_V + 1}` times the
    /// dressed matter dimension (GL families) or times 1 (vacuum families).
    pub fn dimension(&self) -> u128 {
        let loops = (self.group.order() as u128).pow(self.lattice.loop_dimension() as u32);
        if self.family.is_vacuum() {
            loops
        } else {
            loops * dressed_matter_dimension(self)
        }
    }

    /// Total number of registers (links plus matter registers).
    pub fn num_registers(&self) -> usize {
        self.lattice.num_links() + self.lattice.num_vertices() * self.matter_slots()
    }
}

/// Number of neutral matter configurations. Bosonic: occupation vectors with
/// trivial total charge. Fermionic: `n in {0,1}^{N_V}` with
/// `sum_v (n_v - c_v)` a multiple of the order of `chi_F`. Pure gauge: 1.
pub fn dressed_matter_dimension(code: &CodeInstance) -> u128 {
    let g = &code.group;
    let nv = code.lattice.num_vertices();
    match &code.matter {
        MatterContent::None => 1,
        MatterContent::Bosonic(species) => {
            // Count charge distributions per vertex, then convolve over vertices.
            let order = g.order() as usize;
            let mut per_vertex = vec![0u128; order];
            let ranges: Vec<usize> = species
                .iter()
                .flat_map(|sp| std::iter::repeat_n(sp.register_dim(g), sp.slots()))
                .collect();
            let total: usize = ranges.iter().product();
            for mut idx in 0..total {
                let row: Vec<i64> = ranges
                    .iter()
                    .map(|&r| {
                        let v = idx % r;
                        idx /= r;
                        v as i64
                    })
                    .collect();
                per_vertex[g.index_of(matter_charge(g, species, &row).exponents())] += 1;
            }
            let mut dist = vec![0u128; order];
            dist[0] = 1;
            for _ in 0..nv {
                let mut next = vec![0u128; order];
                for (a, &ca) in dist.iter().enumerate() {
                    if ca == 0 {
                        continue;
                    }
                    for (b, &cb) in per_vertex.iter().enumerate() {
                        if cb == 0 {
                            continue;
                        }
                        let c = g.mul(&g.character_at(a), &g.character_at(b));
                        next[g.index_of(c.exponents())] += ca * cb;
                    }
                }
                dist = next;
            }
            dist[0]
        }
        MatterContent::Fermionic { chi_f, .. } => {
            let d = g.character_order(chi_f) as i64;
            let half = nv as i64 / 2;
            (0..=nv as i64).filter(|m| (m - half).rem_euclid(d) == 0).map(|m| binomial(nv as u128, m as u128)).sum()
        }
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// One diagonal factor of a stabilizer generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PhaseFactor {
    /// `U^g` on a link register.
    LinkU(GroupElement),
    /// `exp(2 pi i theta (n - offset))` on an occupation register.
    Occupation { theta: RationalPhase, offset: i64 },
}

/// What a stabilizer generator enforces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StabilizerKind {
    /// Gauge transformation `U_v^g` for a generator `g` of `G`.
    GaussLaw { g: GroupElement },
    /// Matter vacuum at one bosonic register.
    MatterVacuum { species: usize, slot: BosonSlot },
    /// Staggered fermionic vacuum `n_v = c_v`.
    FermionVacuum,
}

/// A diagonal phase-operator stabilizer generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerGenerator {
    pub label: String,
    pub vertex: usize,
    pub kind: StabilizerKind,
    pub factors: Vec<(usize, PhaseFactor)>,
    pub redundant: bool,
}

impl StabilizerGenerator {
    /// Phase of this generator on a basis state (given as register labels).
    pub fn phase(&self, group: &GroupSpec, labels: &[usize]) -> RationalPhase {
        self.factors.iter().fold(RationalPhase::zero(), |acc, (r, f)| {
            let p = match f {
                PhaseFactor::LinkU(g) => group.pair(&group.character_at(labels[*r]), g).expect("same group"),
                PhaseFactor::Occupation { theta, offset } => theta.times(labels[*r] as i64 - offset),
            };
            acc + p
        })
    }
}

/// Register index of link `l` in the canonical layout (links come first).
fn link_reg(l: usize) -> usize {
    l
}

/// Register index of a matter slot in the canonical layout.
fn matter_reg(code: &CodeInstance, v: usize, slot: usize) -> usize {
    code.lattice.num_links() + v * code.matter_slots() + slot
}

/// Stabilizer generators. Gauss-law families give one generator per vertex and
/// per cyclic factor of `G`; the root generators of pure gauge codes are
/// flagged redundant. Vacuum families add one generator per vertex and per
/// matter register.
pub fn stabilizer_generators(code: &CodeInstance) -> Vec<StabilizerGenerator> {
    let g = &code.group;
    let lat = &code.lattice;
    let mut out = Vec::new();
    for v in 0..lat.num_vertices() {
        for gen in g.element_generators() {
            let mut factors = Vec::new();
            for l in lat.out_links(v) {
                factors.push((link_reg(l), PhaseFactor::LinkU(gen.clone())));
            }
            for l in lat.in_links(v) {
                factors.push((link_reg(l), PhaseFactor::LinkU(g.inverse(&gen))));
            }
            match &code.matter {
                MatterContent::None => {}
                MatterContent::Bosonic(species) => {
                    let mut slot = 0;
                    for sp in species {
                        let theta = g.pair(&sp.charge, &gen).expect("same group");
                        factors.push((matter_reg(code, v, slot), PhaseFactor::Occupation { theta, offset: 0 }));
                        if sp.slots() == 2 {
                            factors.push((
                                matter_reg(code, v, slot + 1),
                                PhaseFactor::Occupation { theta: -theta, offset: 0 },
                            ));
                        }
                        slot += sp.slots();
                    }
                }
                MatterContent::Fermionic { chi_f, coloring } => {
                    let theta = g.pair(chi_f, &gen).expect("same group");
                    factors.push((
                        matter_reg(code, v, 0),
                        PhaseFactor::Occupation { theta, offset: coloring.parity(v) as i64 },
                    ));
                }
            }
            factors.sort_by_key(|(r, _)| *r);
            let redundant = code.family == Family::PureGaugeGL && v == code.tree.root();
            out.push(StabilizerGenerator {
                label: format!("G[v{v},g={}]: {}", format_element(&gen), describe(code, &factors)),
                vertex: v,
                kind: StabilizerKind::GaussLaw { g: gen },
                factors,
                redundant,
            });
        }
    }
    if code.family.is_vacuum() {
        for v in 0..lat.num_vertices() {
            match &code.matter {
                MatterContent::Bosonic(species) => {
                    let mut slot = 0;
                    for (s, sp) in species.iter().enumerate() {
                        let dim = sp.register_dim(g) as u64;
                        for k in 0..sp.slots() {
                            let which = if k == 0 { BosonSlot::Particle } else { BosonSlot::Antiparticle };
                            let factors = vec![(
                                matter_reg(code, v, slot + k),
                                PhaseFactor::Occupation { theta: RationalPhase::new(1, dim), offset: 0 },
                            )];
                            out.push(StabilizerGenerator {
                                label: format!("V[v{v},s{s}{}]: {}", if k == 1 { "~" } else { "" }, describe(code, &factors)),
                                vertex: v,
                                kind: StabilizerKind::MatterVacuum { species: s, slot: which },
                                factors,
                                redundant: false,
                            });
                        }
                        slot += sp.slots();
                    }
                }
                MatterContent::Fermionic { coloring, .. } => {
                    let factors = vec![(
                        matter_reg(code, v, 0),
                        PhaseFactor::Occupation { theta: RationalPhase::new(1, 2), offset: coloring.parity(v) as i64 },
                    )];
                    out.push(StabilizerGenerator {
                        label: format!("V[v{v}]: {}", describe(code, &factors)),
                        vertex: v,
                        kind: StabilizerKind::FermionVacuum,
                        factors,
                        redundant: false,
                    });
                }
                MatterContent::None => {}
            }
        }
    }
    out
}

fn format_element(g: &GroupElement) -> String {
    g.residues().iter().map(|r| r.to_string()).collect::<Vec<_>>().join(":")
}

fn register_name(code: &CodeInstance, r: usize) -> String {
    let nl = code.lattice.num_links();
    if r < nl {
        return format!("l{r}");
    }
    let slots = code.matter_slots();
    let v = (r - nl) / slots;
    let slot = (r - nl) % slots;
    match &code.matter {
        MatterContent::Fermionic { .. } => format!("f{v}"),
        _ => format!("m{v}.{slot}"),
    }
}

fn describe(code: &CodeInstance, factors: &[(usize, PhaseFactor)]) -> String {
    let qubit = code.group.order() == 2;
    factors
        .iter()
        .map(|(r, f)| match f {
            // Over Z2 every factor is a Pauli Z.
            PhaseFactor::LinkU(_) if qubit => format!("Z[{}]", register_name(code, *r)),
            PhaseFactor::Occupation { theta, .. } if qubit && theta.denominator() == 2 => {
                format!("Z[{}]", register_name(code, *r))
            }
            PhaseFactor::LinkU(g) => format!("U({})[{}]", format_element(g), register_name(code, *r)),
            PhaseFactor::Occupation { theta, offset: 0 } => format!("P({theta})[{}]", register_name(code, *r)),
            PhaseFactor::Occupation { theta, offset } => {
                format!("P({theta};-{offset})[{}]", register_name(code, *r))
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Outcome of the X-distance search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Distance {
    /// Minimum weight found.
    Exact(usize),
    /// No nontrivial logical of weight at most the bound.
    AboveBound(usize),
}

impl std::fmt::Display for Distance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Distance::Exact(d) => write!(f, "{d}"),
            Distance::AboveBound(w) => write!(f, "> {w}"),
        }
    }
}

/// A single-register diagonal logical operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZWitness {
    pub register: String,
    pub description: String,
}

/// Code parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeParameters {
    /// Total registers.
    pub n: usize,
    /// Links and vertices.
    pub n_links: usize,
    pub n_vertices: usize,
    /// Exact code dimension.
    pub dimension: u128,
    /// `log_{|G|}` (bosonic and pure gauge) or `log_2` (fermionic) of the dimension.
    pub k: f64,
    /// Base of `k`.
    pub k_base: u64,
    pub d_x: Distance,
    pub d_z: usize,
    pub d_z_witness: ZWitness,
    /// A minimum-weight X-type logical, if found.
    pub d_x_witness: Option<XTypeOp>,
}

impl CodeParameters {
    /// `[n,k,d_X]` with `k` printed as an integer when exact.
    pub fn bracket(&self) -> String {
        let k = if (self.k - self.k.round()).abs() < 1e-9 {
            format!("{}", self.k.round() as i64)
        } else {
            format!("{:.4}", self.k)
        };
        format!("[{},{},{}]", self.n, k, self.d_x)
    }
}

/// An X-type operator: link exponents plus matter shifts `x[v][slot]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XTypeOp {
    pub links: WilsonLineProduct,
    pub matter_x: Vec<Vec<i64>>,
}

impl XTypeOp {
    /// Number of registers acted on.
    pub fn weight(&self) -> usize {
        self.links.support().len() + self.matter_x.iter().flatten().filter(|&&x| x != 0).count()
    }
}

/// Whether an X-type operator maps the code space into itself (and is thus a
/// logical, nontrivial whenever it is not the identity).
pub fn preserves_code(code: &CodeInstance, op: &XTypeOp) -> bool {
    let g = &code.group;
    let div = divergence(g, &code.lattice, &op.links);
    match (&code.family, &code.matter) {
        (Family::PureGaugeGL, _) => div.iter().all(Character::is_trivial),
        (Family::BosonicGL, MatterContent::Bosonic(species)) => div
            .iter()
            .zip(&op.matter_x)
            .all(|(d, row)| g.mul(d, &matter_charge(g, species, row)).is_trivial()),
        (Family::FermionicGL, MatterContent::Fermionic { chi_f, .. }) => {
            let self_conjugate = g.mul(chi_f, chi_f).is_trivial();
            div.iter().zip(&op.matter_x).all(|(d, row)| match row[0] {
                0 => d.is_trivial(),
                _ => self_conjugate && g.mul(d, chi_f).is_trivial(),
            })
        }
        (Family::BosonicVacuum | Family::FermionicVacuum, _) => {
            op.matter_x.iter().flatten().all(|&x| x == 0) && div.iter().all(Character::is_trivial)
        }
        _ => false,
    }
}

/// Nonzero shift values allowed on each register: links take every
/// nontrivial character, finite species `1..D`, oscillators `+-1..+-cutoff`,
/// fermions `1`.
fn register_shifts(code: &CodeInstance) -> Vec<Vec<i64>> {
    let g = &code.group;
    let mut out: Vec<Vec<i64>> = (0..code.lattice.num_links()).map(|_| (1..g.order() as i64).collect()).collect();
    for _ in 0..code.lattice.num_vertices() {
        match &code.matter {
            MatterContent::None => {}
            MatterContent::Bosonic(species) => {
                for sp in species {
                    let vals: Vec<i64> = match sp.kind {
                        SpeciesKind::FiniteOrder => (1..sp.register_dim(g) as i64).collect(),
                        SpeciesKind::OscillatorPair { cutoff } => {
                            (1..=cutoff as i64).flat_map(|k| [k, -k]).collect()
                        }
                    };
                    for _ in 0..sp.slots() {
                        out.push(vals.clone());
                    }
                }
            }
            MatterContent::Fermionic { .. } => out.push(vec![1]),
        }
    }
    out
}

/// Minimum-weight X-type logical up to weight `wmax`, enumerating supports in
/// increasing size and lexicographic order.
pub fn x_distance(code: &CodeInstance, wmax: usize) -> (Distance, Option<XTypeOp>) {
    let shifts = register_shifts(code);
    let nregs = shifts.len();
    let nl = code.lattice.num_links();
    let slots = code.matter_slots();
    let build = |support: &[usize], values: &[i64]| -> XTypeOp {
        let mut links = WilsonLineProduct::identity(&code.group, nl);
        let mut matter_x = vec![vec![0i64; slots]; code.lattice.num_vertices()];
        for (&r, &val) in support.iter().zip(values) {
            if r < nl {
                links.set(r, code.group.character_at(val as usize));
            } else {
                matter_x[(r - nl) / slots][(r - nl) % slots] = val;
            }
        }
        XTypeOp { links, matter_x }
    };
    for w in 1..=wmax.min(nregs) {
        let mut support: Vec<usize> = (0..w).collect();
        loop {
            // Enumerate every value assignment on this support.
            let mut choice = vec![0usize; w];
            loop {
                let values: Vec<i64> = support.iter().zip(&choice).map(|(&r, &c)| shifts[r][c]).collect();
                let op = build(&support, &values);
                if preserves_code(code, &op) {
                    return (Distance::Exact(w), Some(op));
                }
                let mut i = 0;
                while i < w {
                    choice[i] += 1;
                    if choice[i] < shifts[support[i]].len() {
                        break;
                    }
                    choice[i] = 0;
                    i += 1;
                }
                if i == w {
                    break;
                }
            }
            // Next combination.
            let mut i = w;
            while i > 0 && support[i - 1] == nregs - w + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            support[i - 1] += 1;
            for j in i..w {
                support[j] = support[j - 1] + 1;
            }
        }
    }
    (Distance::AboveBound(wmax), None)
}

/// Witness that `d_Z = 1`: `U^g` on the first system link (its electric label
/// ranges over all characters on the code), or a matter phase if the lattice
/// has no loops.
pub fn z_witness(code: &CodeInstance) -> ZWitness {
    let g = &code.group;
    if let Some(&l) = code.tree.system_links().first() {
        let gen = &g.element_generators()[0];
        return ZWitness {
            register: format!("l{l}"),
            description: format!("U({})[l{l}]", format_element(gen)),
        };
    }
    let r = matter_reg(code, 0, 0);
    ZWitness { register: register_name(code, r), description: format!("P(1/2)[{}]", register_name(code, r)) }
}

/// Code parameters with the X-distance searched up to `wmax`.
pub fn code_parameters(code: &CodeInstance, wmax: usize) -> CodeParameters {
    let dimension = code.dimension();
    let (k, k_base) = match code.matter {
        MatterContent::Fermionic { .. } => ((dimension as f64).log2(), 2),
        _ => {
            let base = code.group.order();
            ((dimension as f64).ln() / (base as f64).ln(), base)
        }
    };
    let (d_x, d_x_witness) = x_distance(code, wmax);
    CodeParameters {
        n: code.num_registers(),
        n_links: code.lattice.num_links(),
        n_vertices: code.lattice.num_vertices(),
        dimension,
        k,
        k_base,
        d_x,
        d_z: 1,
        d_z_witness: z_witness(code),
        d_x_witness,
    }
}

/// Per-vertex total charges of a code basis state.
pub fn basis_charges(code: &CodeInstance, index: usize) -> Result<Vec<Character>, CodeError> {
    let d = code.dense()?;
    Ok(vertex_charges(&d.layout, &code.group, &code.lattice, &code.matter, index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qrf::TreeStrategy;

    fn triangle(matter: MatterContent, family: Family) -> CodeInstance {
        let lat = Lattice::ring(3).unwrap();
        let g = GroupSpec::cyclic(2).unwrap();
        let tree = SpanningTree::build(&lat, 0, &TreeStrategy::Bfs).unwrap();
        build_code(&lat, &g, &tree, &matter, family).unwrap()
    }

    fn z2_species() -> MatterContent {
        let g = GroupSpec::cyclic(2).unwrap();
        MatterContent::Bosonic(vec![Species::finite(g.character(&[1]).unwrap())])
    }

    #[test]
    fn pure_gauge_triangle() {
        let code = triangle(MatterContent::None, Family::PureGaugeGL);
        assert_eq!(code.dense().unwrap().code_basis(), vec![0, 7]);
        let p = code_parameters(&code, DEFAULT_WMAX);
        assert_eq!(p.bracket(), "[3,1,3]");
        assert_eq!(p.d_z, 1);
        let stabs = stabilizer_generators(&code);
        assert_eq!(stabs.iter().filter(|s| !s.redundant).count(), 2);
        assert!(stabs[1].label.ends_with("Z[l0] Z[l1]"), "{}", stabs[1].label);
    }

    #[test]
    fn bosonic_triangle() {
        let code = triangle(z2_species(), Family::BosonicGL);
        assert_eq!(code.dimension(), 8);
        assert_eq!(code.dense().unwrap().code_basis().len(), 8);
        assert_eq!(code_parameters(&code, DEFAULT_WMAX).bracket(), "[6,3,3]");
        assert_eq!(dressed_matter_dimension(&code), 4);
    }

    #[test]
    fn vacuum_triangle() {
        let code = triangle(z2_species(), Family::BosonicVacuum);
        assert_eq!(code.dense().unwrap().code_basis().len(), 2);
        assert_eq!(stabilizer_generators(&code).len(), 6);
    }

    #[test]
    fn fermionic_counts() {
        let lat = Lattice::ring(4).unwrap();
        let g = GroupSpec::cyclic(2).unwrap();
        let tree = SpanningTree::build(&lat, 0, &TreeStrategy::Bfs).unwrap();
        let m = MatterContent::fermionic(&lat, g.character(&[1]).unwrap()).unwrap();
        let code = build_code(&lat, &g, &tree, &m, Family::FermionicGL).unwrap();
        assert_eq!(dressed_matter_dimension(&code), 8);
        let big = GroupSpec::cyclic(7).unwrap();
        let m = MatterContent::fermionic(&lat, big.character(&[1]).unwrap()).unwrap();
        let code = build_code_symbolic(&lat, &big, &tree, &m, Family::FermionicGL).unwrap();
        assert_eq!(dressed_matter_dimension(&code), 6);
    }

    #[test]
    fn incompatible_matter_rejected() {
        let lat = Lattice::ring(3).unwrap();
        let g = GroupSpec::cyclic(2).unwrap();
        let tree = SpanningTree::build(&lat, 0, &TreeStrategy::Bfs).unwrap();
        let err = build_code(&lat, &g, &tree, &MatterContent::None, Family::BosonicVacuum).unwrap_err();
        assert!(matches!(err, CodeError::IncompatibleMatter { .. }));
    }
}
