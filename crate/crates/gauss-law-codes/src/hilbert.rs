//! Dense state vectors over heterogeneous registers with structured operator
//! application.
//!
//! The canonical basis labels link registers by characters (the electric
//! basis), bosonic registers by occupation numbers and fermion registers by
//! `n in {0, 1}`. Every gauge transformation is diagonal in this basis, so the
//! gauge-invariant projector is a boolean mask. Register 0 is the least
//! significant digit of the mixed-radix basis index.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::group::{Character, GroupElement, GroupSpec, RationalPhase};
use crate::lattice::Lattice;
use crate::matter::{MatterContent, SpeciesKind};

/// Default cap on the total Hilbert space dimension.
pub const DEFAULT_DIMENSION_CAP: usize = 1 << 22;

/// Amplitudes with squared modulus below this count as zero when deciding
/// whether a truncated oscillator is pushed past its cutoff.
const CUTOFF_TOLERANCE: f64 = 1e-24;

/// Errors raised by the state-vector engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HilbertError {
    /// The total dimension exceeds the configured cap.
    #[error("Hilbert space dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    /// An oscillator operator would leave the truncated space.
    #[error("oscillator cutoff exceeded at vertex {vertex}, species {species}")]
    CutoffExceeded { vertex: usize, species: usize },
    /// The requested register does not exist in the layout.
    #[error("no such register: {0}")]
    NoSuchRegister(String),
    /// The operator does not apply to the register kind.
    #[error("operator not defined here: {0}")]
    Unsupported(String),
}

/// Which oscillator of a particle/antiparticle pair a register holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BosonSlot {
    Particle,
    Antiparticle,
}

/// One tensor factor of the kinematical Hilbert space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Register {
    /// Gauge link in the electric basis, dimension `|G|`.
    Link { link: usize, dim: usize },
    /// Bosonic matter register.
    Boson { vertex: usize, species: usize, slot: BosonSlot, dim: usize, oscillator: bool },
    /// Fermion mode with its Jordan-Wigner position.
    Fermion { vertex: usize, jw_position: usize },
}

impl Register {
    /// Local dimension.
    pub fn dim(&self) -> usize {
        match self {
            Register::Link { dim, .. } | Register::Boson { dim, .. } => *dim,
            Register::Fermion { .. } => 2,
        }
    }

    /// Short label such as `l0`, `b1.0`, `b1.0~` or `f2`.
    pub fn label(&self) -> String {
        match self {
            Register::Link { link, .. } => format!("l{link}"),
            Register::Boson { vertex, species, slot, .. } => match slot {
                BosonSlot::Particle => format!("b{vertex}.{species}"),
                BosonSlot::Antiparticle => format!("b{vertex}.{species}~"),
            },
            Register::Fermion { vertex, .. } => format!("f{vertex}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum RegisterKey {
    Link(usize),
    Boson(usize, usize, BosonSlot),
    Fermion(usize),
}

/// Ordered registers with mixed-radix strides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterLayout {
    registers: Vec<Register>,
    strides: Vec<usize>,
    total: usize,
    lookup: HashMap<RegisterKey, usize>,
}

impl RegisterLayout {
    /// Builds a layout from an explicit register list.
    pub fn new(registers: Vec<Register>, cap: usize) -> Result<Self, HilbertError> {
        let mut strides = Vec::with_capacity(registers.len());
        let mut total: usize = 1;
        let mut lookup = HashMap::new();
        for (i, r) in registers.iter().enumerate() {
            strides.push(total);
            total = total
                .checked_mul(r.dim())
                .filter(|&t| t <= cap)
                .ok_or(HilbertError::DimensionCap { dim: total.saturating_mul(r.dim()), cap })?;
            let key = match r {
                Register::Link { link, .. } => RegisterKey::Link(*link),
                Register::Boson { vertex, species, slot, .. } => RegisterKey::Boson(*vertex, *species, *slot),
                Register::Fermion { vertex, .. } => RegisterKey::Fermion(*vertex),
            };
            lookup.insert(key, i);
        }
        Ok(RegisterLayout { registers, strides, total, lookup })
    }

    /// The canonical layout of a lattice: all links, then the matter registers
    /// vertex by vertex. Fermions take their vertex index as JW position.
    pub fn for_lattice(lat: &Lattice, group: &GroupSpec, content: &MatterContent, cap: usize) -> Result<Self, HilbertError> {
        let mut regs: Vec<Register> = (0..lat.num_links())
            .map(|l| Register::Link { link: l, dim: group.order() as usize })
            .collect();
        for v in 0..lat.num_vertices() {
            match content {
                MatterContent::None => {}
                MatterContent::Bosonic(species) => {
                    for (s, sp) in species.iter().enumerate() {
                        let dim = sp.register_dim(group);
                        let oscillator = matches!(sp.kind, SpeciesKind::OscillatorPair { .. });
                        regs.push(Register::Boson { vertex: v, species: s, slot: BosonSlot::Particle, dim, oscillator });
                        if oscillator {
                            regs.push(Register::Boson {
                                vertex: v,
                                species: s,
                                slot: BosonSlot::Antiparticle,
                                dim,
                                oscillator,
                            });
                        }
                    }
                }
                MatterContent::Fermionic { .. } => regs.push(Register::Fermion { vertex: v, jw_position: v }),
            }
        }
        RegisterLayout::new(regs, cap)
    }

    /// Registers in order.
    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    /// Total dimension.
    pub fn dim(&self) -> usize {
        self.total
    }

    /// Stride of register `r`.
    pub fn stride(&self, r: usize) -> usize {
        self.strides[r]
    }

    /// Register index of link `l`.
    pub fn link_register(&self, l: usize) -> Option<usize> {
        self.lookup.get(&RegisterKey::Link(l)).copied()
    }

    /// Register index of a bosonic slot.
    pub fn boson_register(&self, v: usize, species: usize, slot: BosonSlot) -> Option<usize> {
        self.lookup.get(&RegisterKey::Boson(v, species, slot)).copied()
    }

    /// Register index of the fermion at `v`.
    pub fn fermion_register(&self, v: usize) -> Option<usize> {
        self.lookup.get(&RegisterKey::Fermion(v)).copied()
    }

    /// Local label of register `r` in basis state `index`.
    pub fn digit(&self, index: usize, r: usize) -> usize {
        (index / self.strides[r]) % self.registers[r].dim()
    }

    /// All local labels of a basis state.
    pub fn decode(&self, index: usize) -> Vec<usize> {
        (0..self.registers.len()).map(|r| self.digit(index, r)).collect()
    }

    /// Basis index of a full label vector.
    pub fn encode(&self, labels: &[usize]) -> usize {
        labels.iter().zip(&self.strides).map(|(l, s)| l * s).sum()
    }

    /// Human-readable basis label, e.g. `|1 0 1>`.
    pub fn format_basis(&self, index: usize) -> String {
        let parts: Vec<String> = self.decode(index).iter().map(|d| d.to_string()).collect();
        format!("|{}>", parts.join(" "))
    }
}

/// Bosonic operators. The `Bar` variants act on the antiparticle oscillator of
/// a pair species; on finite-order species `ABar`/`ABarDag` use the explicit
/// antiparticle shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BosonOp {
    /// Annihilation `a`.
    A,
    /// Creation `a^dagger`.
    ADag,
    /// Antiparticle annihilation.
    ABar,
    /// Antiparticle creation.
    ABarDag,
    /// Number operator of the particle register.
    N,
    /// Number operator of the antiparticle register (pairs only).
    NBar,
    /// Diagonal phase `exp(2 pi i theta n)` on the particle register.
    Z(RationalPhase),
    /// Diagonal phase on the antiparticle register (pairs only).
    ZBar(RationalPhase),
    /// Normalised shift `n -> n + k` on the particle register (cyclic for
    /// finite order, isometric with loud truncation for oscillators).
    X(i64),
    /// Normalised shift on the antiparticle register (pairs only).
    XBar(i64),
}

/// Fermionic operators; odd operators carry a Jordan-Wigner string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FermionOp {
    Psi,
    PsiDag,
    N,
    Z,
    X,
    Y,
}

/// A dense state over a register layout.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    layout: Arc<RegisterLayout>,
    amps: Vec<Complex64>,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl StateVector {
    /// The all-zero vector.
    pub fn zeros(layout: Arc<RegisterLayout>) -> Self {
        let n = layout.dim();
        StateVector { layout, amps: vec![zero(); n] }
    }

    /// A computational basis state.
    pub fn basis(layout: Arc<RegisterLayout>, index: usize) -> Self {
        let mut s = StateVector::zeros(layout);
        s.amps[index] = Complex64::new(1.0, 0.0);
        s
    }

    /// Wraps explicit amplitudes. Panics if the length does not match.
    pub fn from_amplitudes(layout: Arc<RegisterLayout>, amps: Vec<Complex64>) -> Self {
        assert_eq!(layout.dim(), amps.len(), "amplitude count must equal layout dimension");
        StateVector { layout, amps }
    }

    /// The layout.
    pub fn layout(&self) -> &Arc<RegisterLayout> {
        &self.layout
    }

    /// The amplitudes.
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Mutable amplitudes.
    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Rescales to unit norm (no-op on the zero vector). Returns the old norm.
    pub fn normalize(&mut self) -> f64 {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
        n
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// Largest entry-wise deviation from another state.
    pub fn max_deviation(&self, other: &StateVector) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `self + c * other`.
    pub fn add_scaled(&mut self, c: Complex64, other: &StateVector) {
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += c * b;
        }
    }

    /// Multiplies every amplitude by `c`.
    pub fn scale(&mut self, c: Complex64) {
        for a in &mut self.amps {
            *a *= c;
        }
    }

    /// Keeps only basis states with `mask[i]`.
    pub fn project(&mut self, mask: &[bool]) -> f64 {
        for (a, &m) in self.amps.iter_mut().zip(mask) {
            if !m {
                *a = zero();
            }
        }
        self.norm()
    }

    /// Applies a local map on register `r`: `f(label)` returns the output
    /// label and coefficient, or `None` for zero.
    fn apply_local<F>(&mut self, r: usize, f: F)
    where
        F: Fn(usize) -> Option<(usize, Complex64)>,
    {
        let stride = self.layout.stride(r);
        let dim = self.layout.registers()[r].dim();
        let mut out = vec![zero(); self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            let d = (i / stride) % dim;
            if let Some((d2, c)) = f(d) {
                let j = i - d * stride + d2 * stride;
                out[j] += c * a;
            }
        }
        self.amps = out;
    }

    /// Multiplies each basis amplitude by a label-dependent complex factor.
    pub fn apply_diagonal<F: Fn(usize) -> Complex64>(&mut self, f: F) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a *= f(i);
        }
    }

    fn link_reg(&self, link: usize) -> Result<usize, HilbertError> {
        self.layout.link_register(link).ok_or_else(|| HilbertError::NoSuchRegister(format!("link {link}")))
    }

    /// Wilson line `W^chi` on a link: shifts the electric label by `chi`.
    /// Returns the resulting norm.
    pub fn apply_w(&mut self, group: &GroupSpec, link: usize, chi: &Character) -> Result<f64, HilbertError> {
        let r = self.link_reg(link)?;
        let g = group.clone();
        let chi = chi.clone();
        self.apply_local(r, move |d| {
            let out = g.mul(&g.character_at(d), &chi);
            Some((g.index_of(out.exponents()), Complex64::new(1.0, 0.0)))
        });
        Ok(self.norm())
    }

    /// Link operator `U^g`: multiplies the electric label `chi` by `chi(g)`.
    pub fn apply_u(&mut self, group: &GroupSpec, link: usize, g: &GroupElement) -> Result<f64, HilbertError> {
        let r = self.link_reg(link)?;
        let phases: Vec<Complex64> = group
            .characters()
            .iter()
            .map(|c| group.pair(c, g).map(RationalPhase::to_complex))
            .collect::<Result<_, _>>()
            .map_err(|e| HilbertError::Unsupported(e.to_string()))?;
        self.apply_local(r, |d| Some((d, phases[d])));
        Ok(self.norm())
    }

    /// Bosonic operator on species `species` at `vertex`.
    pub fn apply_boson(&mut self, vertex: usize, species: usize, op: BosonOp) -> Result<f64, HilbertError> {
        let pr = self
            .layout
            .boson_register(vertex, species, BosonSlot::Particle)
            .ok_or_else(|| HilbertError::NoSuchRegister(format!("boson {vertex}.{species}")))?;
        let (dim, oscillator) = match self.layout.registers()[pr] {
            Register::Boson { dim, oscillator, .. } => (dim, oscillator),
            _ => unreachable!("lookup returns boson registers"),
        };
        let bar = self.layout.boson_register(vertex, species, BosonSlot::Antiparticle);
        let one = Complex64::new(1.0, 0.0);
        let sqrt = |x: usize| Complex64::new((x as f64).sqrt(), 0.0);
        let exceeded = HilbertError::CutoffExceeded { vertex, species };
        let need_bar = || {
            bar.ok_or_else(|| HilbertError::Unsupported(format!("antiparticle register needed for {op:?}")))
        };
        match op {
            BosonOp::A => self.apply_local(pr, |n| (n > 0).then(|| (n - 1, sqrt(n)))),
            BosonOp::ADag => {
                if oscillator {
                    self.check_top(pr, dim - 1, 1, exceeded)?;
                }
                self.apply_local(pr, |n| (n + 1 < dim).then(|| (n + 1, sqrt(n + 1))));
            }
            BosonOp::ABar | BosonOp::ABarDag if oscillator => {
                let br = need_bar()?;
                if op == BosonOp::ABar {
                    self.apply_local(br, |n| (n > 0).then(|| (n - 1, sqrt(n))));
                } else {
                    self.check_top(br, dim - 1, 1, exceeded)?;
                    self.apply_local(br, |n| (n + 1 < dim).then(|| (n + 1, sqrt(n + 1))));
                }
            }
            BosonOp::ABar => {
                // sum_{m=1}^{D-1} sqrt(D - m) |m+1 mod D><m|
                self.apply_local(pr, |m| (m >= 1).then(|| ((m + 1) % dim, sqrt(dim - m))));
            }
            BosonOp::ABarDag => {
                // sum_{m=1}^{D-1} sqrt(D - m) |m><m+1 mod D|
                self.apply_local(pr, |k| {
                    let m = (k + dim - 1) % dim;
                    (m >= 1).then(|| (m, sqrt(dim - m)))
                });
            }
            BosonOp::N => self.apply_local(pr, |n| Some((n, Complex64::new(n as f64, 0.0)))),
            BosonOp::NBar => {
                let br = need_bar()?;
                self.apply_local(br, |n| Some((n, Complex64::new(n as f64, 0.0))));
            }
            BosonOp::Z(theta) => self.apply_local(pr, |n| Some((n, theta.times(n as i64).to_complex()))),
            BosonOp::ZBar(theta) => {
                let br = need_bar()?;
                self.apply_local(br, |n| Some((n, theta.times(n as i64).to_complex())));
            }
            BosonOp::X(k) | BosonOp::XBar(k) => {
                let reg = if matches!(op, BosonOp::XBar(_)) { need_bar()? } else { pr };
                if oscillator {
                    if k > 0 {
                        let limit = dim as i64 - 1 - k;
                        if limit < 0 {
                            self.check_top(reg, 0, dim, exceeded)?;
                        } else {
                            self.check_top(reg, limit as usize + 1, dim - 1 - limit as usize, exceeded)?;
                        }
                    }
                    self.apply_local(reg, |n| {
                        let m = n as i64 + k;
                        (m >= 0 && m < dim as i64).then_some((m as usize, one))
                    });
                } else if matches!(op, BosonOp::XBar(_)) {
                    return Err(HilbertError::Unsupported("XBar on a finite-order species".into()));
                } else {
                    self.apply_local(reg, |n| Some(((n as i64 + k).rem_euclid(dim as i64) as usize, one)));
                }
            }
        }
        Ok(self.norm())
    }

    /// Errors if any amplitude has register `r` in the label window
    /// `[from, from + count)`.
    fn check_top(&self, r: usize, from: usize, count: usize, err: HilbertError) -> Result<(), HilbertError> {
        let stride = self.layout.stride(r);
        let dim = self.layout.registers()[r].dim();
        let hit = self.amps.iter().enumerate().any(|(i, a)| {
            let d = (i / stride) % dim;
            d >= from && d < from + count && a.norm_sqr() > CUTOFF_TOLERANCE
        });
        if hit {
            Err(err)
        } else {
            Ok(())
        }
    }

    /// Fermionic operator at `vertex`. Odd operators first apply the
    /// Jordan-Wigner string `prod Z` over all fermions with smaller JW position.
    pub fn apply_fermion(&mut self, vertex: usize, op: FermionOp) -> Result<f64, HilbertError> {
        let r = self
            .layout
            .fermion_register(vertex)
            .ok_or_else(|| HilbertError::NoSuchRegister(format!("fermion {vertex}")))?;
        let odd = matches!(op, FermionOp::Psi | FermionOp::PsiDag | FermionOp::X | FermionOp::Y);
        if odd {
            let my_pos = match self.layout.registers()[r] {
                Register::Fermion { jw_position, .. } => jw_position,
                _ => unreachable!("lookup returns fermion registers"),
            };
            let earlier: Vec<usize> = self
                .layout
                .registers()
                .iter()
                .enumerate()
                .filter_map(|(i, reg)| match reg {
                    Register::Fermion { jw_position, .. } if *jw_position < my_pos => Some(i),
                    _ => None,
                })
                .collect();
            let layout = self.layout.clone();
            self.apply_diagonal(|i| {
                let parity: usize = earlier.iter().map(|&e| layout.digit(i, e)).sum();
                if parity.is_multiple_of(2) {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(-1.0, 0.0)
                }
            });
        }
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match op {
            FermionOp::Psi => self.apply_local(r, |n| (n == 1).then_some((0, one))),
            FermionOp::PsiDag => self.apply_local(r, |n| (n == 0).then_some((1, one))),
            FermionOp::N => self.apply_local(r, |n| Some((n, Complex64::new(n as f64, 0.0)))),
            FermionOp::Z => self.apply_local(r, |n| Some((n, if n == 0 { one } else { -one }))),
            FermionOp::X => self.apply_local(r, |n| Some((1 - n, one))),
            FermionOp::Y => self.apply_local(r, |n| Some((1 - n, if n == 0 { i } else { -i }))),
        }
        Ok(self.norm())
    }

    /// Gauge transformation `U_v^g`: `U^g` on links leaving `vertex`,
    /// `U^{g^{-1}}` on links entering it, and the matter phase.
    pub fn gauge_transform(
        &mut self,
        group: &GroupSpec,
        lat: &Lattice,
        content: &MatterContent,
        vertex: usize,
        g: &GroupElement,
    ) -> Result<f64, HilbertError> {
        let layout = self.layout.clone();
        let mut phases = Vec::with_capacity(self.amps.len());
        for idx in 0..self.amps.len() {
            let labels = layout.decode(idx);
            let q = vertex_charge(&layout, group, lat, content, &labels, vertex);
            let p = group.pair(&q, g).map_err(|e| HilbertError::Unsupported(e.to_string()))?;
            phases.push(p.to_complex());
        }
        self.apply_diagonal(|i| phases[i]);
        Ok(self.norm())
    }
}

/// Total charge at `vertex` of a basis state: link divergence times the
/// matter charge.
pub fn vertex_charge(
    layout: &RegisterLayout,
    group: &GroupSpec,
    lat: &Lattice,
    content: &MatterContent,
    labels: &[usize],
    vertex: usize,
) -> Character {
    let mut q = group.trivial_character();
    for l in lat.out_links(vertex) {
        if let Some(r) = layout.link_register(l) {
            q = group.mul(&q, &group.character_at(labels[r]));
        }
    }
    for l in lat.in_links(vertex) {
        if let Some(r) = layout.link_register(l) {
            q = group.mul(&q, &group.conj(&group.character_at(labels[r])));
        }
    }
    match content {
        MatterContent::None => {}
        MatterContent::Bosonic(species) => {
            for (s, sp) in species.iter().enumerate() {
                let mut occ = Vec::with_capacity(2);
                if let Some(r) = layout.boson_register(vertex, s, BosonSlot::Particle) {
                    occ.push(labels[r]);
                }
                if let Some(r) = layout.boson_register(vertex, s, BosonSlot::Antiparticle) {
                    occ.push(labels[r]);
                }
                if occ.len() == sp.slots() {
                    q = group.mul(&q, &group.pow(&sp.charge, sp.net_number(&occ)));
                }
            }
        }
        MatterContent::Fermionic { chi_f, coloring } => {
            if let Some(r) = layout.fermion_register(vertex) {
                let k = labels[r] as i64 - coloring.parity(vertex) as i64;
                q = group.mul(&q, &group.pow(chi_f, k));
            }
        }
    }
    q
}

/// Per-vertex total charges of a basis state.
pub fn vertex_charges(
    layout: &RegisterLayout,
    group: &GroupSpec,
    lat: &Lattice,
    content: &MatterContent,
    index: usize,
) -> Vec<Character> {
    let labels = layout.decode(index);
    (0..lat.num_vertices()).map(|v| vertex_charge(layout, group, lat, content, &labels, v)).collect()
}

/// Mask of basis states with trivial total charge at every vertex.
pub fn pn_mask(layout: &RegisterLayout, group: &GroupSpec, lat: &Lattice, content: &MatterContent) -> Vec<bool> {
    (0..layout.dim())
        .map(|i| vertex_charges(layout, group, lat, content, i).iter().all(Character::is_trivial))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matter::Species;

    fn z2_ring3(content: &MatterContent) -> (GroupSpec, Lattice, Arc<RegisterLayout>) {
        let g = GroupSpec::cyclic(2).unwrap();
        let lat = Lattice::ring(3).unwrap();
        let layout = Arc::new(RegisterLayout::for_lattice(&lat, &g, content, DEFAULT_DIMENSION_CAP).unwrap());
        (g, lat, layout)
    }

    #[test]
    fn pure_gauge_mask_has_two_states() {
        let (g, lat, layout) = z2_ring3(&MatterContent::None);
        let mask = pn_mask(&layout, &g, &lat, &MatterContent::None);
        let kept: Vec<usize> = (0..8).filter(|&i| mask[i]).collect();
        assert_eq!(kept, vec![0, 7]);
    }

    #[test]
    fn bosonic_mask_has_eight_states() {
        let g = GroupSpec::cyclic(2).unwrap();
        let content = MatterContent::Bosonic(vec![Species::finite(g.character(&[1]).unwrap())]);
        let (g, lat, layout) = z2_ring3(&content);
        assert_eq!(pn_mask(&layout, &g, &lat, &content).iter().filter(|&&m| m).count(), 8);
    }

    #[test]
    fn w_shifts_and_u_phases() {
        let (g, _, layout) = z2_ring3(&MatterContent::None);
        let mut s = StateVector::basis(layout.clone(), 0);
        s.apply_w(&g, 1, &g.character(&[1]).unwrap()).unwrap();
        assert_eq!(s.amplitudes()[2], Complex64::new(1.0, 0.0));
        s.apply_u(&g, 1, &g.element(&[1]).unwrap()).unwrap();
        assert_eq!(s.amplitudes()[2], Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn gauge_transform_phases_on_flip() {
        let (g, lat, layout) = z2_ring3(&MatterContent::None);
        let minus = g.element(&[1]).unwrap();
        for (v, expected) in [(0, -1.0), (1, -1.0), (2, 1.0)] {
            let mut s = StateVector::basis(layout.clone(), 1);
            s.gauge_transform(&g, &lat, &MatterContent::None, v, &minus).unwrap();
            assert_eq!(s.amplitudes()[1].re, expected);
        }
    }

    #[test]
    fn ladder_coefficients() {
        let g = GroupSpec::cyclic(3).unwrap();
        let lat = Lattice::ring(3).unwrap();
        let content = MatterContent::Bosonic(vec![Species::finite(g.character(&[1]).unwrap())]);
        let layout = Arc::new(RegisterLayout::for_lattice(&lat, &g, &content, DEFAULT_DIMENSION_CAP).unwrap());
        let r = layout.boson_register(0, 0, BosonSlot::Particle).unwrap();
        let mut s = StateVector::basis(layout.clone(), 2 * layout.stride(r));
        s.apply_boson(0, 0, BosonOp::A).unwrap();
        assert!((s.amplitudes()[layout.stride(r)].re - 2f64.sqrt()).abs() < 1e-15);
        let mut vac = StateVector::basis(layout, 0);
        assert_eq!(vac.apply_boson(0, 0, BosonOp::A).unwrap(), 0.0);
    }

    #[test]
    fn oscillator_cutoff_is_loud() {
        let g = GroupSpec::cyclic(2).unwrap();
        let lat = Lattice::ring(3).unwrap();
        let content = MatterContent::Bosonic(vec![Species::oscillator(g.character(&[1]).unwrap(), 1)]);
        let layout = Arc::new(RegisterLayout::for_lattice(&lat, &g, &content, DEFAULT_DIMENSION_CAP).unwrap());
        let mut s = StateVector::basis(layout, 0);
        s.apply_boson(1, 0, BosonOp::ADag).unwrap();
        assert_eq!(s.apply_boson(1, 0, BosonOp::ADag), Err(HilbertError::CutoffExceeded { vertex: 1, species: 0 }));
        assert_eq!(s.apply_boson(1, 0, BosonOp::X(1)), Err(HilbertError::CutoffExceeded { vertex: 1, species: 0 }));
    }

    #[test]
    fn dimension_cap_enforced() {
        let g = GroupSpec::cyclic(2).unwrap();
        let lat = Lattice::torus_square(4, 4).unwrap();
        let err = RegisterLayout::for_lattice(&lat, &g, &MatterContent::None, DEFAULT_DIMENSION_CAP).unwrap_err();
        assert!(matches!(err, HilbertError::DimensionCap { .. }));
    }
}
