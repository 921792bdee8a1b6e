//! The correspondence between matter-vacuum codes and pure-gauge Gauss law
//! codes: the coarse-graining map on errors, the basis bijection between the
//! physical space of the vacuum code and the kinematical space of the gauge
//! code, and diagnostics for oscillator species where that bijection fails.

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::codes::{CodeError, CodeInstance, Family};
use crate::errors::{
    apply_error, check_set, effective_dressing, measure_and_recover, ErrorOp, ErrorsError, OutcomeChoice, SetReport,
};
use crate::gauss_map::{dressed_flux, matter_charge, Section};
use crate::group::{Character, GroupError};
use crate::hilbert::{vertex_charge, StateVector};
use crate::matter::{MatterContent, SpeciesKind};
use crate::qrf::{system_holonomy, WilsonLineProduct};

/// Tolerance of the dense intertwiner checks.
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-10;

/// Failures of the correspondence.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EquivalenceError {
    /// The codes are not a vacuum code and a pure-gauge code on the same lattice and group.
    #[error("family mismatch: {0}")]
    FamilyMismatch(String),
    /// Distinct matter configurations carry the same charge.
    #[error("matter charge map is not injective: {0}")]
    KernelNontrivial(KernelReport),
    /// The matter charge map misses some charge, so not every flux is realised.
    #[error("matter charge map is not surjective: {0}")]
    NotSurjective(String),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Errors(#[from] ErrorsError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Result of the kernel search over single-vertex occupations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KernelReport {
    /// Every occupation configuration carries a distinct charge.
    TrivialKernel,
    /// Two configurations (slot occupations at one vertex) with the same charge.
    Witness { first: Vec<u64>, second: Vec<u64> },
}

impl std::fmt::Display for KernelReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tuple = |v: &[u64]| format!("({})", v.iter().map(u64::to_string).collect::<Vec<_>>().join(","));
        match self {
            KernelReport::TrivialKernel => write!(f, "trivial kernel"),
            KernelReport::Witness { first, second } => write!(f, "{} vs {}", tuple(first), tuple(second)),
        }
    }
}

fn check_pair(code_vac: &CodeInstance, code_gl: &CodeInstance) -> Result<(), EquivalenceError> {
    if !code_vac.family.is_vacuum() {
        return Err(EquivalenceError::FamilyMismatch(format!("{} is not a vacuum code", code_vac.family.name())));
    }
    if code_gl.family != Family::PureGaugeGL {
        return Err(EquivalenceError::FamilyMismatch(format!("{} is not a pure-gauge code", code_gl.family.name())));
    }
    if code_vac.lattice != code_gl.lattice || code_vac.group != code_gl.group {
        return Err(EquivalenceError::FamilyMismatch("lattice or group differ".into()));
    }
    Ok(())
}

/// Coarse-graining: strips the matter part of a vacuum-code error and keeps
/// the Wilson line it carries.
pub fn theta(e: &ErrorOp, code_vac: &CodeInstance, code_gl: &CodeInstance) -> Result<ErrorOp, EquivalenceError> {
    check_pair(code_vac, code_gl)?;
    let links = match &code_vac.matter {
        MatterContent::Bosonic(species) => dressed_flux(&code_vac.group, species, &effective_dressing(code_vac, e)?),
        _ => e.links.clone(),
    };
    Ok(ErrorOp::wilson(code_gl, links, &format!("theta({})", e.label)))
}

/// Finds two single-vertex occupation configurations with the same coarse
/// label (charge of finite species, net number of oscillator pairs),
/// scanning in order of (largest occupation, total occupation, lexicographic).
pub fn kernel_witness(code_vac: &CodeInstance) -> Result<KernelReport, EquivalenceError> {
    let species = match (&code_vac.family, &code_vac.matter) {
        (Family::BosonicVacuum, MatterContent::Bosonic(s)) => s,
        _ => return Err(EquivalenceError::FamilyMismatch("bosonic vacuum code required".into())),
    };
    let g = &code_vac.group;
    let dims: Vec<u64> = species
        .iter()
        .flat_map(|sp| match sp.kind {
            SpeciesKind::FiniteOrder => vec![g.character_order(&sp.charge)],
            SpeciesKind::OscillatorPair { cutoff } => vec![cutoff as u64 + 1; 2],
        })
        .collect();
    let total: u64 = dims.iter().product();
    let mut configs: Vec<Vec<u64>> = (0..total)
        .map(|mut i| {
            dims.iter()
                .map(|&d| {
                    let v = i % d;
                    i /= d;
                    v
                })
                .collect()
        })
        .collect();
    configs.sort_by_key(|c| (c.iter().copied().max().unwrap_or(0), c.iter().sum::<u64>(), c.clone()));
    // Finite species are labelled by the charge they carry, oscillator pairs
    // by their net number (the charge difference).
    let mut seen: BTreeMap<(Character, Vec<i64>), Vec<u64>> = BTreeMap::new();
    for c in configs {
        let mut finite_row = Vec::with_capacity(c.len());
        let mut net = Vec::new();
        let mut slot = 0;
        for sp in species {
            match sp.kind {
                SpeciesKind::FiniteOrder => finite_row.push(c[slot] as i64),
                SpeciesKind::OscillatorPair { .. } => {
                    finite_row.extend([0, 0]);
                    net.push(c[slot] as i64 - c[slot + 1] as i64);
                }
            }
            slot += sp.slots();
        }
        let q = (matter_charge(g, species, &finite_row), net);
        if let Some(prev) = seen.get(&q) {
            return Ok(KernelReport::Witness { first: c, second: prev.clone() });
        }
        seen.insert(q, c);
    }
    Ok(KernelReport::TrivialKernel)
}

/// Basis bijection between the gauge-invariant subspace of a vacuum code
/// and the kinematical space of a pure-gauge code: a basis state is sent to
/// the state with the same link labels.
#[derive(Debug, Clone, PartialEq)]
pub struct TMap {
    /// Vacuum-code basis index to gauge-code basis index (gauge-invariant states only).
    pub forward: BTreeMap<usize, usize>,
    /// Gauge-code basis index to vacuum-code basis index.
    pub inverse: Vec<usize>,
}

impl TMap {
    /// Image of a vacuum-code state and the norm lying outside the domain.
    pub fn map_state(&self, state: &StateVector, target: &CodeInstance) -> Result<(StateVector, f64), EquivalenceError> {
        let layout = target.dense()?.layout.clone();
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.dim()];
        let mut leaked = 0.0;
        for (i, a) in state.amplitudes().iter().enumerate() {
            match self.forward.get(&i) {
                Some(&j) => amps[j] = *a,
                None => leaked += a.norm_sqr(),
            }
        }
        Ok((StateVector::from_amplitudes(layout, amps), leaked.sqrt()))
    }
}

/// Builds the bijection. Requires every vertex charge to be carried by
/// exactly one occupation configuration.
pub fn build_t(code_vac: &CodeInstance, code_gl: &CodeInstance) -> Result<TMap, EquivalenceError> {
    check_pair(code_vac, code_gl)?;
    if code_vac.family != Family::BosonicVacuum {
        return Err(EquivalenceError::FamilyMismatch("bosonic vacuum code required".into()));
    }
    match kernel_witness(code_vac)? {
        KernelReport::TrivialKernel => {}
        w => return Err(EquivalenceError::KernelNontrivial(w)),
    }
    let g = &code_vac.group;
    let species = code_vac.species();
    let configs: u64 = species.iter().map(|sp| g.character_order(&sp.charge)).product();
    if configs != g.order() {
        return Err(EquivalenceError::NotSurjective(format!("{configs} configurations for {} charges", g.order())));
    }
    let vac = code_vac.dense()?;
    let gl = code_gl.dense()?;
    let nl = code_vac.lattice.num_links();
    let mut forward = BTreeMap::new();
    let mut inverse = vec![usize::MAX; gl.layout.dim()];
    for (i, _) in vac.pn_mask.iter().enumerate().filter(|(_, &m)| m) {
        let labels = vac.layout.decode(i);
        let mut gl_labels = vec![0usize; gl.layout.registers().len()];
        for l in 0..nl {
            let r_vac = vac.layout.link_register(l).expect("link register");
            let r_gl = gl.layout.link_register(l).expect("link register");
            gl_labels[r_gl] = labels[r_vac];
        }
        let j = gl.layout.encode(&gl_labels);
        forward.insert(i, j);
        inverse[j] = i;
    }
    debug_assert!(inverse.iter().all(|&i| i != usize::MAX), "charge map is bijective");
    Ok(TMap { forward, inverse })
}

/// One line of an equivalence report.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub label: String,
    pub passed: bool,
    pub max_deviation: f64,
}

impl CheckRecord {
    fn new(label: impl Into<String>, max_deviation: f64) -> Self {
        CheckRecord { label: label.into(), passed: max_deviation <= EQUIVALENCE_TOLERANCE, max_deviation }
    }

    /// Machine-readable record.
    pub fn record(&self) -> String {
        format!(
            "check={} verdict={} max_deviation={:.3e}",
            self.label.replace(' ', "_"),
            if self.passed { "pass" } else { "fail" },
            self.max_deviation
        )
    }
}

/// All checks of a verification run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EquivalenceReport {
    pub records: Vec<CheckRecord>,
}

impl EquivalenceReport {
    /// Whether every check passed.
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.passed)
    }

    /// The first failing check.
    pub fn first_failure(&self) -> Option<&CheckRecord> {
        self.records.iter().find(|r| !r.passed)
    }
}

/// Largest deviation of `T E_vac T^{-1}` from `E_gl` on the gauge-invariant subspace.
fn intertwiner_deviation(
    t: &TMap,
    code_vac: &CodeInstance,
    e_vac: &ErrorOp,
    code_gl: &CodeInstance,
    e_gl: &ErrorOp,
) -> Result<f64, EquivalenceError> {
    let vac = code_vac.dense()?;
    let gl = code_gl.dense()?;
    let mut worst: f64 = 0.0;
    for (&i, &j) in &t.forward {
        let mut s = StateVector::basis(vac.layout.clone(), i);
        apply_error(&mut s, code_vac, e_vac)?;
        let (mapped, leaked) = t.map_state(&s, code_gl)?;
        let mut u = StateVector::basis(gl.layout.clone(), j);
        apply_error(&mut u, code_gl, e_gl)?;
        worst = worst.max(leaked).max(mapped.max_deviation(&u));
    }
    Ok(worst)
}

/// Checks that the bijection carries code spaces, stabilizers, logical
/// operators, section errors and recoveries of the vacuum code onto those of
/// the pure-gauge code.
pub fn verify_equivalence(
    code_vac: &CodeInstance,
    code_gl: &CodeInstance,
    sec: &Section,
) -> Result<EquivalenceReport, EquivalenceError> {
    let t = build_t(code_vac, code_gl)?;
    let g = &code_vac.group;
    let lat = &code_vac.lattice;
    let vac = code_vac.dense()?;
    let gl = code_gl.dense()?;
    let mut report = EquivalenceReport::default();

    // Code spaces.
    let mismatched = t.forward.iter().filter(|(&i, &j)| vac.code_mask[i] != gl.code_mask[j]).count();
    report.records.push(CheckRecord::new("code-space", mismatched as f64));

    // Stabilizers: the matter charge phase at v against the gauge transformation by g^{-1}.
    for v in 0..lat.num_vertices() {
        for h in g.element_generators() {
            let mut worst: f64 = 0.0;
            for (&i, &j) in &t.forward {
                let labels = vac.layout.decode(i);
                let row: Vec<i64> = code_vac
                    .species()
                    .iter()
                    .enumerate()
                    .map(|(s, _)| {
                        let r = vac.layout.boson_register(v, s, crate::hilbert::BosonSlot::Particle).expect("particle");
                        labels[r] as i64
                    })
                    .collect();
                let q = matter_charge(g, code_vac.species(), &row);
                let vac_phase = g.pair(&q, &h)?.to_complex();
                let gl_labels = gl.layout.decode(j);
                let link_q = vertex_charge(&gl.layout, g, lat, &code_gl.matter, &gl_labels, v);
                let gl_phase = g.pair(&link_q, &g.inverse(&h))?.to_complex();
                worst = worst.max((vac_phase - gl_phase).norm());
            }
            report.records.push(CheckRecord::new(format!("stabilizer G[v{v},g={}]", h.residues()[0]), worst));
        }
    }

    // Logical operators: the system holonomies of the gauge code's tree. Each
    // is a closed loop, hence gauge invariant on both sides whatever tree the
    // vacuum code uses.
    for l in code_gl.tree.system_links() {
        for chi in g.character_generators() {
            let label = format!("holonomy H[l{l}]");
            let w = system_holonomy(g, lat, &code_gl.tree, l, &chi).expect("system link");
            let e_vac = ErrorOp::wilson(code_vac, w.clone(), &label);
            let e_gl = ErrorOp::wilson(code_gl, w, &label);
            report.records.push(CheckRecord::new(label, intertwiner_deviation(&t, code_vac, &e_vac, code_gl, &e_gl)?));
        }
    }

    // Section members and their recoveries on every codeword.
    let codewords: Vec<usize> = vac.code_basis();
    for entry in sec.entries() {
        let e_vac = ErrorOp::from_entry(code_vac, entry);
        let e_gl = theta(&e_vac, code_vac, code_gl)?;
        let dev = intertwiner_deviation(&t, code_vac, &e_vac, code_gl, &e_gl)?;
        report.records.push(CheckRecord::new(format!("error {}", e_vac.label), dev));
        let mut worst: f64 = 0.0;
        for &c in &codewords {
            let mut s = StateVector::basis(vac.layout.clone(), c);
            apply_error(&mut s, code_vac, &e_vac)?;
            let rv = measure_and_recover(code_vac, s, sec, OutcomeChoice::MostLikely)?;
            let (mapped, leaked) = t.map_state(&rv.state, code_gl)?;
            let mut u = StateVector::basis(gl.layout.clone(), t.forward[&c]);
            apply_error(&mut u, code_gl, &e_gl)?;
            let rg = measure_and_recover(code_gl, u, sec, OutcomeChoice::MostLikely)?;
            worst = worst.max(leaked).max(mapped.max_deviation(&rg.state));
        }
        report.records.push(CheckRecord::new(format!("recovery {}", e_vac.label), worst));
    }
    Ok(report)
}

/// For oscillator species: coarse-grains every section representative to
/// its Wilson line and checks the resulting set against the pure-gauge code.
pub fn coarse_grained_check(
    code_vac: &CodeInstance,
    code_gl: &CodeInstance,
    sec: &Section,
) -> Result<SetReport, EquivalenceError> {
    let mapped: Vec<ErrorOp> = sec
        .entries()
        .map(|entry| theta(&ErrorOp::from_entry(code_vac, entry), code_vac, code_gl))
        .collect::<Result<_, _>>()?;
    Ok(check_set(&mapped, code_gl)?)
}

/// Flux carried by dressing data, exposed for round-trip checks.
pub fn flux_of(code_vac: &CodeInstance, e: &ErrorOp) -> Result<WilsonLineProduct, EquivalenceError> {
    Ok(dressed_flux(&code_vac.group, code_vac.species(), &effective_dressing(code_vac, e)?))
}
