//! Brute-force dense checks built straight from the defining formulas:
//! group-averaged projectors, explicit operator products and exhaustive
//! distance searches. Group arithmetic, operator action and charge bookkeeping
//! are reimplemented here so the symbolic engine is checked against an
//! independent computation.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use thiserror::Error;

use crate::codes::{CodeError, CodeInstance, Distance, Family};
use crate::errors::{effective_dressing, ErrorOp, ErrorsError, KLVerdict};
use crate::group::Character;
use crate::hilbert::{BosonSlot, Register};
use crate::matter::{MatterContent, SpeciesKind};

/// Largest dimension handled by the oracle.
pub const ORACLE_CAP: usize = 4096;

/// Numerical tolerance of oracle classifications.
pub const ORACLE_TOLERANCE: f64 = 1e-10;

/// Oracle failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    /// The kinematical space is larger than the oracle cap.
    #[error("dimension {dim} exceeds the oracle cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Errors(#[from] ErrorsError),
}

/// A square complex matrix stored column by column, each column a sparse list.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    cols: Vec<Vec<(usize, Complex64)>>,
}

const DROP: f64 = 1e-14;

fn compress(map: HashMap<usize, Complex64>) -> Vec<(usize, Complex64)> {
    let mut col: Vec<(usize, Complex64)> = map.into_iter().filter(|(_, a)| a.norm() > DROP).collect();
    col.sort_by_key(|(i, _)| *i);
    col
}

impl SparseMatrix {
    /// Zero matrix.
    pub fn zeros(dim: usize) -> Self {
        SparseMatrix { dim, cols: vec![Vec::new(); dim] }
    }

    /// Identity matrix.
    pub fn identity(dim: usize) -> Self {
        SparseMatrix { dim, cols: (0..dim).map(|i| vec![(i, Complex64::new(1.0, 0.0))]).collect() }
    }

    /// Diagonal matrix.
    pub fn diagonal(values: &[Complex64]) -> Self {
        SparseMatrix {
            dim: values.len(),
            cols: values.iter().enumerate().map(|(i, &v)| if v.norm() > DROP { vec![(i, v)] } else { vec![] }).collect(),
        }
    }

    /// Builds a matrix from a column generator.
    pub fn from_columns(dim: usize, f: impl Fn(usize) -> Vec<(usize, Complex64)>) -> Self {
        SparseMatrix {
            dim,
            cols: (0..dim)
                .map(|j| {
                    let mut m: HashMap<usize, Complex64> = HashMap::new();
                    for (i, a) in f(j) {
                        *m.entry(i).or_default() += a;
                    }
                    compress(m)
                })
                .collect(),
        }
    }

    /// Dense dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.cols[j].iter().find(|(r, _)| *r == i).map_or(Complex64::new(0.0, 0.0), |(_, a)| *a)
    }

    /// Column `j`.
    pub fn column(&self, j: usize) -> &[(usize, Complex64)] {
        &self.cols[j]
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        SparseMatrix {
            dim: self.dim,
            cols: other
                .cols
                .iter()
                .map(|col| {
                    let mut m: HashMap<usize, Complex64> = HashMap::new();
                    for &(k, b) in col {
                        for &(i, a) in &self.cols[k] {
                            *m.entry(i).or_default() += a * b;
                        }
                    }
                    compress(m)
                })
                .collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> SparseMatrix {
        let mut cols = vec![Vec::new(); self.dim];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, a) in col {
                cols[i].push((j, a.conj()));
            }
        }
        for c in &mut cols {
            c.sort_by_key(|(i, _)| *i);
        }
        SparseMatrix { dim: self.dim, cols }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: Complex64, other: &SparseMatrix) -> SparseMatrix {
        SparseMatrix {
            dim: self.dim,
            cols: self
                .cols
                .iter()
                .zip(&other.cols)
                .map(|(a, b)| {
                    let mut m: HashMap<usize, Complex64> = a.iter().copied().collect();
                    for &(i, v) in b {
                        *m.entry(i).or_default() += c * v;
                    }
                    compress(m)
                })
                .collect(),
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.cols.iter().flatten().map(|(_, a)| a.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &SparseMatrix) -> f64 {
        self.add_scaled(Complex64::new(-1.0, 0.0), other).max_abs()
    }

    /// Trace.
    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|j| self.get(j, j)).sum()
    }

    /// Indices of nonzero diagonal entries.
    pub fn diagonal_support(&self) -> Vec<usize> {
        (0..self.dim).filter(|&j| self.get(j, j).norm() > 0.5).collect()
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for (j, col) in self.cols.iter().enumerate() {
            if v[j] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for &(i, a) in col {
                out[i] += a * v[j];
            }
        }
        out
    }
}

/// The oracle's private view of a code: register dimensions, raw character
/// exponents and matter data, independent of the engine's helpers.
struct Frame<'a> {
    code: &'a CodeInstance,
    factors: Vec<u64>,
    dims: Vec<usize>,
    strides: Vec<usize>,
    dim: usize,
}

impl<'a> Frame<'a> {
    fn new(code: &'a CodeInstance) -> Result<Self, OracleError> {
        let dense = code.dense()?;
        let dims: Vec<usize> = dense.layout.registers().iter().map(Register::dim).collect();
        let mut strides = Vec::with_capacity(dims.len());
        let mut dim = 1usize;
        for &d in &dims {
            strides.push(dim);
            dim = dim.saturating_mul(d);
        }
        if dim > ORACLE_CAP {
            return Err(OracleError::DimensionCap { dim, cap: ORACLE_CAP });
        }
        Ok(Frame { code, factors: code.group.factors().to_vec(), dims, strides, dim })
    }

    fn registers(&self) -> &[Register] {
        self.code.dense().expect("checked in new").layout.registers()
    }

    fn labels(&self, mut idx: usize) -> Vec<usize> {
        self.dims
            .iter()
            .map(|&d| {
                let v = idx % d;
                idx /= d;
                v
            })
            .collect()
    }

    fn index(&self, labels: &[usize]) -> usize {
        labels.iter().zip(&self.strides).map(|(l, s)| l * s).sum()
    }

    /// Exponent vector of a group-sized label (first factor least significant).
    fn unpack(&self, mut label: usize) -> Vec<u64> {
        self.factors
            .iter()
            .map(|&d| {
                let v = label as u64 % d;
                label /= d as usize;
                v
            })
            .collect()
    }

    fn pack(&self, e: &[u64]) -> usize {
        let mut idx = 0usize;
        for (i, &d) in self.factors.iter().enumerate().rev() {
            idx = idx * d as usize + (e[i] % d) as usize;
        }
        idx
    }

    /// `chi(g)` as an angle fraction for raw exponent vectors.
    fn pairing(&self, chi: &[u64], g: &[u64]) -> f64 {
        chi.iter().zip(g).zip(&self.factors).map(|((&r, &e), &d)| (r * e % d) as f64 / d as f64).sum::<f64>()
    }

    fn link_reg(&self, l: usize) -> usize {
        self.registers()
            .iter()
            .position(|r| matches!(r, Register::Link { link, .. } if *link == l))
            .expect("link register")
    }

    fn boson_reg(&self, v: usize, s: usize, which: BosonSlot) -> Option<usize> {
        self.registers().iter().position(
            |r| matches!(r, Register::Boson { vertex, species, slot, .. } if *vertex == v && *species == s && *slot == which),
        )
    }

    fn fermion_reg(&self, v: usize) -> usize {
        self.registers()
            .iter()
            .position(|r| matches!(r, Register::Fermion { vertex, .. } if *vertex == v))
            .expect("fermion register")
    }

    fn jw_position(&self, r: usize) -> usize {
        match self.registers()[r] {
            Register::Fermion { jw_position, .. } => jw_position,
            _ => unreachable!("fermion register"),
        }
    }

    /// Phase angle (in turns) of the gauge transformation with parameters
    /// `gs[v]` on a basis state.
    fn gauge_angle(&self, labels: &[usize], gs: &[Vec<u64>]) -> f64 {
        let lat = &self.code.lattice;
        let mut angle = 0.0;
        for (l, link) in lat.links().iter().enumerate() {
            let chi = self.unpack(labels[self.link_reg(l)]);
            angle += self.pairing(&chi, &gs[link.tail]) - self.pairing(&chi, &gs[link.head]);
        }
        match &self.code.matter {
            MatterContent::None => {}
            MatterContent::Bosonic(species) => {
                for v in 0..lat.num_vertices() {
                    for (s, sp) in species.iter().enumerate() {
                        let rho = sp.charge.exponents();
                        let n = labels[self.boson_reg(v, s, BosonSlot::Particle).expect("particle")] as f64;
                        let nbar = self.boson_reg(v, s, BosonSlot::Antiparticle).map_or(0.0, |r| labels[r] as f64);
                        angle += (n - nbar) * self.pairing(rho, &gs[v]);
                    }
                }
            }
            MatterContent::Fermionic { chi_f, coloring } => {
                for v in 0..lat.num_vertices() {
                    let n = labels[self.fermion_reg(v)] as f64 - coloring.parity(v) as f64;
                    angle += n * self.pairing(chi_f.exponents(), &gs[v]);
                }
            }
        }
        angle
    }

    fn is_vacuum(&self, labels: &[usize]) -> bool {
        self.registers().iter().enumerate().all(|(r, reg)| match reg {
            Register::Link { .. } => true,
            Register::Boson { .. } => labels[r] == 0,
            Register::Fermion { vertex, .. } => match &self.code.matter {
                MatterContent::Fermionic { coloring, .. } => labels[r] == coloring.parity(*vertex) as usize,
                _ => labels[r] == 0,
            },
        })
    }

    fn all_elements(&self) -> Vec<Vec<u64>> {
        let order: u64 = self.factors.iter().product();
        (0..order as usize).map(|i| self.unpack(i)).collect()
    }
}

fn turn(angle: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * angle)
}

/// Group-averaged projector `|G|^{-N_V} sum_{g_1..g_{N_V}} prod_v U_v^{g_v}`,
/// restricted to the matter vacuum for vacuum families.
pub fn dense_projector(code: &CodeInstance) -> Result<SparseMatrix, OracleError> {
    let trivial = vec![code.group.trivial_character(); code.lattice.num_vertices()];
    let p = charge_sector_projector(code, &trivial)?;
    if !code.family.is_vacuum() {
        return Ok(p);
    }
    let frame = Frame::new(code)?;
    let vac: Vec<Complex64> = (0..frame.dim)
        .map(|i| if frame.is_vacuum(&frame.labels(i)) { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
        .collect();
    Ok(SparseMatrix::diagonal(&vac).mul(&p))
}

/// Projector onto total charge `q_v` at every vertex:
/// `|G|^{-N_V} sum_g prod_v conj(q_v(g_v)) U_v^{g_v}`.
pub fn charge_sector_projector(code: &CodeInstance, q: &[Character]) -> Result<SparseMatrix, OracleError> {
    let frame = Frame::new(code)?;
    let nv = code.lattice.num_vertices();
    let elements = frame.all_elements();
    let order = elements.len();
    let total = order.checked_pow(nv as u32).unwrap_or(usize::MAX);
    let diag: Vec<Complex64> = (0..frame.dim)
        .map(|i| {
            let labels = frame.labels(i);
            if total <= 1 << 16 {
                // Full average over G^{N_V}.
                let mut acc = Complex64::new(0.0, 0.0);
                let mut gs = vec![Vec::new(); nv];
                for mut t in 0..total {
                    for g in gs.iter_mut() {
                        g.clone_from(&elements[t % order]);
                        t /= order;
                    }
                    let sector: f64 = (0..nv).map(|v| frame.pairing(q[v].exponents(), &gs[v])).sum();
                    acc += turn(frame.gauge_angle(&labels, &gs) - sector);
                }
                acc / total as f64
            } else {
                // The average factorizes over vertices.
                let mut prod = Complex64::new(1.0, 0.0);
                for v in 0..nv {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for g in &elements {
                        let mut gs = vec![vec![0u64; frame.factors.len()]; nv];
                        gs[v] = g.clone();
                        acc += turn(frame.gauge_angle(&labels, &gs) - frame.pairing(q[v].exponents(), g));
                    }
                    prod *= acc / order as f64;
                }
                prod
            }
        })
        .collect();
    Ok(SparseMatrix::diagonal(&diag))
}

/// Action of an error on one basis state: `None` if it annihilates it.
fn act(frame: &Frame, e: &ErrorOp, index: usize) -> Result<Option<(usize, Complex64)>, OracleError> {
    let code = frame.code;
    let lat = &code.lattice;
    let mut labels = frame.labels(index);
    let mut amp = Complex64::new(1.0, 0.0);
    // Wilson lines: shift each link label by its exponent vector.
    for (l, chi) in e.links.exponents().iter().enumerate() {
        let r = frame.link_reg(l);
        let cur = frame.unpack(labels[r]);
        let new: Vec<u64> = cur.iter().zip(chi.exponents()).map(|(a, b)| a + b).collect();
        labels[r] = frame.pack(&new);
    }
    match &code.matter {
        MatterContent::None => {}
        MatterContent::Bosonic(species) => {
            if code.family == Family::BosonicVacuum {
                let k = effective_dressing(code, e)?;
                for (l, link) in lat.links().iter().enumerate() {
                    for (s, sp) in species.iter().enumerate() {
                        let (ka, kb) = k[l][s];
                        match sp.kind {
                            SpeciesKind::FiniteOrder => {
                                let d = code.group.character_order(&sp.charge) as i64;
                                let f = ka as i64 - kb as i64;
                                let h = frame.boson_reg(link.head, s, BosonSlot::Particle).expect("particle");
                                let t = frame.boson_reg(link.tail, s, BosonSlot::Particle).expect("particle");
                                labels[h] = (labels[h] as i64 + f).rem_euclid(d) as usize;
                                labels[t] = (labels[t] as i64 - f).rem_euclid(d) as usize;
                            }
                            SpeciesKind::OscillatorPair { cutoff } => {
                                let raise = |labels: &mut Vec<usize>, amp: &mut Complex64, r: usize, times: u64| {
                                    for _ in 0..times {
                                        let n = labels[r] + 1;
                                        *amp *= (n as f64).sqrt();
                                        labels[r] = n;
                                    }
                                };
                                let hp = frame.boson_reg(link.head, s, BosonSlot::Particle).expect("particle");
                                let ta = frame.boson_reg(link.tail, s, BosonSlot::Antiparticle).expect("antiparticle");
                                let tp = frame.boson_reg(link.tail, s, BosonSlot::Particle).expect("particle");
                                let ha = frame.boson_reg(link.head, s, BosonSlot::Antiparticle).expect("antiparticle");
                                raise(&mut labels, &mut amp, hp, ka);
                                raise(&mut labels, &mut amp, ta, ka);
                                raise(&mut labels, &mut amp, tp, kb);
                                raise(&mut labels, &mut amp, ha, kb);
                                if [hp, ta, tp, ha].iter().any(|&r| labels[r] > cutoff) {
                                    return Ok(None);
                                }
                            }
                        }
                    }
                }
            } else {
                for v in 0..lat.num_vertices() {
                    let mut slot = 0;
                    for (s, sp) in species.iter().enumerate() {
                        for (k, which) in [BosonSlot::Particle, BosonSlot::Antiparticle].into_iter().enumerate().take(sp.slots()) {
                            let x = e.matter_x[v][slot + k];
                            let r = frame.boson_reg(v, s, which).expect("boson register");
                            let n = labels[r] as i64 + x;
                            let d = frame.dims[r] as i64;
                            labels[r] = match sp.kind {
                                SpeciesKind::FiniteOrder => n.rem_euclid(d) as usize,
                                SpeciesKind::OscillatorPair { .. } => {
                                    if n < 0 || n >= d {
                                        return Ok(None);
                                    }
                                    n as usize
                                }
                            };
                        }
                        slot += sp.slots();
                    }
                }
            }
            for v in 0..lat.num_vertices() {
                let mut slot = 0;
                for (s, sp) in species.iter().enumerate() {
                    for (k, which) in [BosonSlot::Particle, BosonSlot::Antiparticle].into_iter().enumerate().take(sp.slots()) {
                        let z = e.matter_z[v][slot + k];
                        let r = frame.boson_reg(v, s, which).expect("boson register");
                        amp *= turn(z.numerator() as f64 / z.denominator() as f64 * labels[r] as f64);
                    }
                    slot += sp.slots();
                }
            }
        }
        MatterContent::Fermionic { chi_f, coloring } => {
            let jw_sign = |labels: &[usize], r: usize| -> f64 {
                let pos = frame.jw_position(r);
                let parity: usize = (0..lat.num_vertices())
                    .map(|u| frame.fermion_reg(u))
                    .filter(|&ru| frame.jw_position(ru) < pos)
                    .map(|ru| labels[ru])
                    .sum();
                if parity.is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                }
            };
            for v in 0..lat.num_vertices() {
                if e.matter_x[v][0] == 1 {
                    let r = frame.fermion_reg(v);
                    amp *= jw_sign(&labels, r);
                    labels[r] = 1 - labels[r];
                }
            }
            if code.family == Family::FermionicVacuum {
                // Candidate gauge-invariant dressing: the fewest fermion
                // operators carrying the missing charge, preferring the
                // direction that the staggered vacuum allows.
                let g = &code.group;
                let div = crate::gauss_map::divergence(g, lat, &e.links);
                let d_f = g.character_order(chi_f) as i64;
                for (v, dv) in div.iter().enumerate() {
                    if dv.is_trivial() {
                        continue;
                    }
                    let needed = g.conj(dv);
                    let preferred = if coloring.parity(v) == 0 { 1 } else { -1 };
                    let m = (1..=d_f)
                        .flat_map(|k| [preferred * k, -preferred * k])
                        .find(|&m| g.pow(chi_f, m) == needed)
                        .expect("chi_F generates the needed charge or the lattice would not admit it");
                    let r = frame.fermion_reg(v);
                    for _ in 0..m.abs() {
                        let target = if m > 0 { 1 } else { 0 };
                        if labels[r] == target {
                            return Ok(None);
                        }
                        amp *= jw_sign(&labels, r);
                        labels[r] = target;
                    }
                }
            }
            for v in 0..lat.num_vertices() {
                let z = e.matter_z[v][0];
                let r = frame.fermion_reg(v);
                amp *= turn(z.numerator() as f64 / z.denominator() as f64 * labels[r] as f64);
            }
        }
    }
    Ok(Some((frame.index(&labels), amp)))
}

/// Dense matrix of an error on the code's kinematical space.
pub fn error_matrix(code: &CodeInstance, e: &ErrorOp) -> Result<SparseMatrix, OracleError> {
    let frame = Frame::new(code)?;
    let mut cols = Vec::with_capacity(frame.dim);
    for j in 0..frame.dim {
        cols.push(act(&frame, e, j)?.into_iter().collect::<Vec<_>>());
    }
    Ok(SparseMatrix { dim: frame.dim, cols })
}

/// Dense classification of `M = Pi E_a^dagger E_b Pi`.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleVerdict {
    /// `M = 0`.
    Zero,
    /// `M = c Pi` with `c != 0`.
    Scalar(Complex64),
    /// `M` acts only on the loop factor (identity on the dressed matter factor).
    LoopsOnly,
    /// `M` acts only on the dressed matter factor.
    MatterOnly,
    /// Neither.
    General,
}

impl OracleVerdict {
    /// Whether this dense verdict matches a symbolic one.
    pub fn agrees_with(&self, symbolic: &KLVerdict) -> bool {
        matches!(
            (self, symbolic),
            (OracleVerdict::Zero, KLVerdict::OrthogonalCorrectable)
                | (OracleVerdict::Scalar(_), KLVerdict::IdenticalOnCode)
                | (OracleVerdict::LoopsOnly | OracleVerdict::MatterOnly | OracleVerdict::General, KLVerdict::Violation(_))
        )
    }

    /// Short name.
    pub fn name(&self) -> &'static str {
        match self {
            OracleVerdict::Zero => "zero",
            OracleVerdict::Scalar(_) => "scalar",
            OracleVerdict::LoopsOnly => "loops-only",
            OracleVerdict::MatterOnly => "matter-only",
            OracleVerdict::General => "general",
        }
    }
}

/// `Pi E_a^dagger E_b Pi` computed densely.
pub fn kl_matrix(code: &CodeInstance, ea: &ErrorOp, eb: &ErrorOp) -> Result<(SparseMatrix, SparseMatrix), OracleError> {
    let pi = dense_projector(code)?;
    Ok((kl_matrix_with(code, &pi, ea, eb)?, pi))
}

/// `Pi E_a^dagger E_b Pi` for a precomputed projector, for batches of pairs.
pub fn kl_matrix_with(code: &CodeInstance, pi: &SparseMatrix, ea: &ErrorOp, eb: &ErrorOp) -> Result<SparseMatrix, OracleError> {
    let a = error_matrix(code, ea)?;
    let b = error_matrix(code, eb)?;
    Ok(pi.mul(&a.adjoint()).mul(&b).mul(pi))
}

/// Dense Knill-Laflamme classification of a pair.
pub fn kl_oracle(ea: &ErrorOp, eb: &ErrorOp, code: &CodeInstance) -> Result<OracleVerdict, OracleError> {
    let (m, pi) = kl_matrix(code, ea, eb)?;
    Ok(classify(code, &m, &pi))
}

/// Classifies a sandwiched operator `M` against the projector `pi`.
pub fn classify(code: &CodeInstance, m: &SparseMatrix, pi: &SparseMatrix) -> OracleVerdict {
    if m.max_abs() < ORACLE_TOLERANCE {
        return OracleVerdict::Zero;
    }
    let c = m.trace() / pi.trace();
    if m.max_abs_diff(&scaled(pi, c)) < ORACLE_TOLERANCE {
        return OracleVerdict::Scalar(c);
    }
    let frame = Frame::new(code).expect("matrix already built");
    let system: Vec<usize> = code.tree.system_links().iter().map(|&l| frame.link_reg(l)).collect();
    let matter: Vec<usize> = frame
        .registers()
        .iter()
        .enumerate()
        .filter(|(_, r)| !matches!(r, Register::Link { .. }))
        .map(|(i, _)| i)
        .collect();
    let support = pi.diagonal_support();
    let key = |idx: usize, regs: &[usize]| -> Vec<usize> {
        let labels = frame.labels(idx);
        regs.iter().map(|&r| labels[r]).collect()
    };
    if factorizes(m, &support, |i| key(i, &system), |i| key(i, &matter)) {
        return OracleVerdict::LoopsOnly;
    }
    if factorizes(m, &support, |i| key(i, &matter), |i| key(i, &system)) {
        return OracleVerdict::MatterOnly;
    }
    OracleVerdict::General
}

fn scaled(m: &SparseMatrix, c: Complex64) -> SparseMatrix {
    SparseMatrix::zeros(m.dim()).add_scaled(c, m)
}

/// Whether `m` on `support` equals `O(active) (x) 1(spectator)`.
fn factorizes(
    m: &SparseMatrix,
    support: &[usize],
    active: impl Fn(usize) -> Vec<usize>,
    spectator: impl Fn(usize) -> Vec<usize>,
) -> bool {
    let mut block: BTreeMap<(Vec<usize>, Vec<usize>), Complex64> = BTreeMap::new();
    let in_support: std::collections::HashSet<usize> = support.iter().copied().collect();
    for &j in support {
        for &(i, a) in m.column(j) {
            if !in_support.contains(&i) || spectator(i) != spectator(j) {
                return false;
            }
            let k = (active(i), active(j));
            match block.get(&k) {
                Some(b) if (b - a).norm() > ORACLE_TOLERANCE => return false,
                Some(_) => {}
                None => {
                    block.insert(k, a);
                }
            }
        }
    }
    // Every spectator value must see the same block, including zero entries.
    let spectators: std::collections::BTreeSet<Vec<usize>> = support.iter().map(|&j| spectator(j)).collect();
    let actives: std::collections::BTreeSet<Vec<usize>> = support.iter().map(|&j| active(j)).collect();
    if spectators.len() * actives.len() != support.len() {
        return false;
    }
    for &j in support {
        let seen = m.column(j).len();
        let expected = block.keys().filter(|(_, col)| *col == active(j)).count();
        if seen != expected {
            return false;
        }
    }
    true
}

/// Candidate X-type operator: link exponents and matter shifts.
fn x_candidates(frame: &Frame) -> Vec<Vec<i64>> {
    frame
        .registers()
        .iter()
        .map(|r| match r {
            Register::Link { dim, .. } => (1..*dim as i64).collect(),
            Register::Boson { dim, oscillator: false, .. } => (1..*dim as i64).collect(),
            Register::Boson { dim, oscillator: true, .. } => {
                (1..*dim as i64).flat_map(|k| [k, -k]).collect()
            }
            Register::Fermion { .. } => vec![1],
        })
        .collect()
}

/// Exhaustive search for the lightest X-type operator that maps every
/// codeword to a codeword and acts nontrivially on the code.
pub fn distance_oracle(code: &CodeInstance, wmax: usize) -> Result<Distance, OracleError> {
    let frame = Frame::new(code)?;
    let pi = dense_projector(code)?;
    let code_states = pi.diagonal_support();
    let in_code: std::collections::HashSet<usize> = code_states.iter().copied().collect();
    let values = x_candidates(&frame);
    let nregs = values.len();
    let shift = |support: &[usize], vals: &[i64], idx: usize| -> Option<usize> {
        let mut labels = frame.labels(idx);
        for (&r, &x) in support.iter().zip(vals) {
            let d = frame.dims[r] as i64;
            let n = labels[r] as i64 + x;
            let oscillator = matches!(frame.registers()[r], Register::Boson { oscillator: true, .. });
            if oscillator && (n < 0 || n >= d) {
                return None;
            }
            labels[r] = n.rem_euclid(d) as usize;
        }
        Some(frame.index(&labels))
    };
    for w in 1..=wmax.min(nregs) {
        let mut support: Vec<usize> = (0..w).collect();
        loop {
            let mut choice = vec![0usize; w];
            loop {
                let vals: Vec<i64> = support.iter().zip(&choice).map(|(&r, &c)| values[r][c]).collect();
                let mut preserves = true;
                let mut moves = false;
                for &j in &code_states {
                    match shift(&support, &vals, j) {
                        Some(i) if in_code.contains(&i) => moves |= i != j,
                        _ => {
                            preserves = false;
                            break;
                        }
                    }
                }
                if preserves && moves {
                    return Ok(Distance::Exact(w));
                }
                let mut i = 0;
                while i < w {
                    choice[i] += 1;
                    if choice[i] < values[support[i]].len() {
                        break;
                    }
                    choice[i] = 0;
                    i += 1;
                }
                if i == w {
                    break;
                }
            }
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
    Ok(Distance::AboveBound(wmax))
}

/// Rank of the dense projector (its trace, which is an integer for a projector).
pub fn projector_rank(code: &CodeInstance) -> Result<usize, OracleError> {
    Ok(dense_projector(code)?.trace().re.round() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::build_code;
    use crate::errors::kl_check_pair;
    use crate::group::GroupSpec;
    use crate::lattice::Lattice;
    use crate::matter::Species;
    use crate::qrf::{SpanningTree, TreeStrategy};

    fn triangle(matter: MatterContent, family: Family) -> CodeInstance {
        let lat = Lattice::ring(3).unwrap();
        let g = GroupSpec::cyclic(2).unwrap();
        let tree = SpanningTree::build(&lat, 0, &TreeStrategy::Bfs).unwrap();
        build_code(&lat, &g, &tree, &matter, family).unwrap()
    }

    #[test]
    fn projector_rank_and_idempotence() {
        let code = triangle(MatterContent::None, Family::PureGaugeGL);
        let p = dense_projector(&code).unwrap();
        assert_eq!(p.diagonal_support(), vec![0, 7]);
        assert!(p.mul(&p).max_abs_diff(&p) < 1e-12);
        assert_eq!(projector_rank(&code).unwrap(), 2);
    }

    #[test]
    fn distances() {
        let code = triangle(MatterContent::None, Family::PureGaugeGL);
        assert_eq!(distance_oracle(&code, 4).unwrap(), Distance::Exact(3));
        let g = GroupSpec::cyclic(2).unwrap();
        let bos = triangle(MatterContent::Bosonic(vec![Species::finite(g.character(&[1]).unwrap())]), Family::BosonicGL);
        assert_eq!(distance_oracle(&bos, 4).unwrap(), Distance::Exact(3));
    }

    #[test]
    fn kl_examples() {
        let code = triangle(MatterContent::None, Family::PureGaugeGL);
        let x1 = ErrorOp::from_ints(&code, &[0, 1, 0], "X1");
        let x2 = ErrorOp::from_ints(&code, &[0, 0, 1], "X2");
        assert_eq!(kl_oracle(&x1, &x2, &code).unwrap(), OracleVerdict::Zero);
        assert!(matches!(kl_oracle(&x1, &x1, &code).unwrap(), OracleVerdict::Scalar(c) if (c - 1.0).norm() < 1e-12));
        let g = GroupSpec::cyclic(2).unwrap();
        let bos = triangle(MatterContent::Bosonic(vec![Species::finite(g.character(&[1]).unwrap())]), Family::BosonicGL);
        let lp = ErrorOp::from_ints(&bos, &[1, 1, 1], "loop");
        let id = ErrorOp::identity(&bos);
        let dense = kl_oracle(&lp, &id, &bos).unwrap();
        assert_eq!(dense, OracleVerdict::LoopsOnly);
        assert!(dense.agrees_with(&kl_check_pair(&lp, &id, &bos).unwrap()));
    }
}
