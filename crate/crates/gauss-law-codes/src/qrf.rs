//! Spanning-tree quantum reference frames: tree paths, Wilson-line products,
//! frame fields, system holonomies and the Page-Wootters reduction.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::group::{Character, GroupElement, GroupSpec};
use crate::hilbert::{HilbertError, Register, RegisterLayout, StateVector};
use crate::lattice::Lattice;

/// Tolerance on the norm discarded by the Page-Wootters reduction.
pub const PW_TOLERANCE: f64 = 1e-10;

/// Errors raised by tree construction and frame operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QrfError {
    /// Some vertex cannot be reached from the root.
    #[error("lattice is disconnected")]
    Disconnected,
    /// An explicit link list is not a spanning tree.
    #[error("invalid explicit tree: {0}")]
    InvalidExplicitTree(String),
    /// Root vertex out of range.
    #[error("root {0} is not a vertex")]
    InvalidRoot(usize),
    /// Frame fields take charges on non-root vertices only.
    #[error("a charge was supplied for the root vertex {0}")]
    RootChargeSupplied(usize),
    /// Holonomies are defined for system (non-tree) links.
    #[error("link {0} belongs to the tree")]
    LinkInTree(usize),
    /// The state has weight outside the gauge-invariant subspace.
    #[error("state is not gauge invariant (discarded norm {0:e})")]
    NotGaugeInvariant(f64),
    /// The reduced layout could not be built.
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}

/// How to pick the spanning tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeStrategy {
    /// Link-order sweep: pass over the links in order, attaching every link
    /// that joins the current tree to a new vertex, until all vertices are
    /// reached. On `ring(N)` this selects the first `N - 1` links.
    Bfs,
    /// Depth-first search from the root following incident links in order.
    Dfs,
    /// An explicit list of tree links.
    Explicit(Vec<usize>),
}

/// A rooted spanning tree. `parent[v] = (link, sign)` is the first step of the
/// tree path from `v` to the root; the sign is `+1` when the step follows the
/// link orientation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    root: usize,
    tree_links: Vec<usize>,
    parent: Vec<Option<(usize, i8)>>,
    parent_vertex: Vec<Option<usize>>,
    depth: Vec<usize>,
    num_links: usize,
}

impl SpanningTree {
    /// Builds a spanning tree rooted at `root`.
    pub fn build(lat: &Lattice, root: usize, strategy: &TreeStrategy) -> Result<Self, QrfError> {
        let nv = lat.num_vertices();
        if root >= nv {
            return Err(QrfError::InvalidRoot(root));
        }
        let links: Vec<usize> = match strategy {
            TreeStrategy::Bfs => {
                let mut reached = vec![false; nv];
                reached[root] = true;
                let mut chosen = Vec::new();
                loop {
                    let mut grew = false;
                    for (l, link) in lat.links().iter().enumerate() {
                        if reached[link.tail] != reached[link.head] {
                            reached[link.tail] = true;
                            reached[link.head] = true;
                            chosen.push(l);
                            grew = true;
                        }
                    }
                    if !grew {
                        break;
                    }
                }
                if reached.iter().any(|r| !r) {
                    return Err(QrfError::Disconnected);
                }
                chosen
            }
            TreeStrategy::Dfs => {
                let mut reached = vec![false; nv];
                let mut chosen = Vec::new();
                fn visit(lat: &Lattice, v: usize, reached: &mut [bool], chosen: &mut Vec<usize>) {
                    reached[v] = true;
                    for (l, w) in lat.incident(v) {
                        if !reached[w] {
                            chosen.push(l);
                            visit(lat, w, reached, chosen);
                        }
                    }
                }
                visit(lat, root, &mut reached, &mut chosen);
                if reached.iter().any(|r| !r) {
                    return Err(QrfError::Disconnected);
                }
                chosen
            }
            TreeStrategy::Explicit(ls) => {
                if ls.len() + 1 != nv {
                    return Err(QrfError::InvalidExplicitTree(format!(
                        "expected {} links, got {}",
                        nv - 1,
                        ls.len()
                    )));
                }
                let mut seen = std::collections::BTreeSet::new();
                for &l in ls {
                    if l >= lat.num_links() || !seen.insert(l) {
                        return Err(QrfError::InvalidExplicitTree(format!("bad or repeated link {l}")));
                    }
                }
                ls.clone()
            }
        };
        Self::from_links(lat, root, links)
    }

    fn from_links(lat: &Lattice, root: usize, mut links: Vec<usize>) -> Result<Self, QrfError> {
        let nv = lat.num_vertices();
        links.sort_unstable();
        let mut parent: Vec<Option<(usize, i8)>> = vec![None; nv];
        let mut parent_vertex = vec![None; nv];
        let mut depth = vec![0usize; nv];
        let mut reached = vec![false; nv];
        reached[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &l in &links {
                let link = lat.link(l);
                let (w, sign) = if link.tail == v {
                    (link.head, -1i8)
                } else if link.head == v {
                    (link.tail, 1i8)
                } else {
                    continue;
                };
                if reached[w] {
                    if parent_vertex[v] != Some(w) || parent[v].map(|p| p.0) != Some(l) {
                        return Err(QrfError::InvalidExplicitTree(format!("link {l} closes a cycle")));
                    }
                    continue;
                }
                reached[w] = true;
                // Stepping from w to v along link l follows the orientation iff w is the tail.
                parent[w] = Some((l, sign));
                parent_vertex[w] = Some(v);
                depth[w] = depth[v] + 1;
                queue.push_back(w);
            }
        }
        if reached.iter().any(|r| !r) {
            return Err(QrfError::InvalidExplicitTree("links do not span the lattice".into()));
        }
        Ok(SpanningTree { root, tree_links: links, parent, parent_vertex, depth, num_links: lat.num_links() })
    }

    /// Root vertex `v_0`.
    pub fn root(&self) -> usize {
        self.root
    }

    /// Tree links in increasing order.
    pub fn tree_links(&self) -> &[usize] {
        &self.tree_links
    }

    /// Whether `l` is a tree link.
    pub fn contains(&self, l: usize) -> bool {
        self.tree_links.binary_search(&l).is_ok()
    }

    /// System links (the complement of the tree) in increasing order.
    pub fn system_links(&self) -> Vec<usize> {
        (0..self.num_links).filter(|&l| !self.contains(l)).collect()
    }

    /// First step `(link, sign)` from `v` toward the root.
    pub fn parent(&self, v: usize) -> Option<(usize, i8)> {
        self.parent[v]
    }

    /// Parent vertex of `v`.
    pub fn parent_vertex(&self, v: usize) -> Option<usize> {
        self.parent_vertex[v]
    }

    fn path_to_root(&self, mut v: usize) -> Vec<(usize, i8)> {
        let mut out = Vec::with_capacity(self.depth[v]);
        while let (Some(step), Some(p)) = (self.parent[v], self.parent_vertex[v]) {
            out.push(step);
            v = p;
        }
        out
    }

    /// The unique tree path from `v` to `v2` as `(link, sign)` steps.
    pub fn path(&self, v: usize, v2: usize) -> Vec<(usize, i8)> {
        let (mut a, mut b) = (v, v2);
        let mut up = Vec::new();
        let mut down = Vec::new();
        while a != b {
            if self.depth[a] >= self.depth[b] {
                up.push(self.parent[a].expect("non-root vertex has a parent"));
                a = self.parent_vertex[a].expect("non-root vertex has a parent");
            } else {
                let (l, s) = self.parent[b].expect("non-root vertex has a parent");
                down.push((l, -s));
                b = self.parent_vertex[b].expect("non-root vertex has a parent");
            }
        }
        up.extend(down.into_iter().rev());
        up
    }
}

/// A product of Wilson lines, stored as one character exponent per link.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WilsonLineProduct {
    exponents: Vec<Character>,
}

impl WilsonLineProduct {
    /// The identity on `num_links` links.
    pub fn identity(group: &GroupSpec, num_links: usize) -> Self {
        WilsonLineProduct { exponents: vec![group.trivial_character(); num_links] }
    }

    /// Wraps explicit per-link characters.
    pub fn from_characters(exponents: Vec<Character>) -> Self {
        WilsonLineProduct { exponents }
    }

    /// Cyclic-group convenience: one integer exponent per link (first factor).
    pub fn from_ints(group: &GroupSpec, ints: &[i64]) -> Self {
        let exponents = ints
            .iter()
            .map(|&k| {
                let mut e = vec![0i64; group.rank()];
                e[0] = k;
                group.character(&e).expect("rank matches")
            })
            .collect();
        WilsonLineProduct { exponents }
    }

    /// A single Wilson line `W_l^chi`.
    pub fn single(group: &GroupSpec, num_links: usize, l: usize, chi: Character) -> Self {
        let mut w = WilsonLineProduct::identity(group, num_links);
        w.exponents[l] = chi;
        w
    }

    /// Per-link characters.
    pub fn exponents(&self) -> &[Character] {
        &self.exponents
    }

    /// Character on link `l`.
    pub fn get(&self, l: usize) -> &Character {
        &self.exponents[l]
    }

    /// Sets the character on link `l`.
    pub fn set(&mut self, l: usize, chi: Character) {
        self.exponents[l] = chi;
    }

    /// Number of links.
    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    /// Whether there are no links.
    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    /// Whether every link carries the trivial character.
    pub fn is_identity(&self) -> bool {
        self.exponents.iter().all(Character::is_trivial)
    }

    /// Links with nontrivial characters.
    pub fn support(&self) -> Vec<usize> {
        (0..self.exponents.len()).filter(|&l| !self.exponents[l].is_trivial()).collect()
    }

    /// Operator product (exponents add).
    pub fn compose(&self, group: &GroupSpec, other: &WilsonLineProduct) -> WilsonLineProduct {
        WilsonLineProduct {
            exponents: self.exponents.iter().zip(&other.exponents).map(|(a, b)| group.mul(a, b)).collect(),
        }
    }

    /// Adjoint (exponents negate).
    pub fn inverse(&self, group: &GroupSpec) -> WilsonLineProduct {
        WilsonLineProduct { exponents: self.exponents.iter().map(|a| group.conj(a)).collect() }
    }

    /// Restriction to the given links (others set trivial).
    pub fn restrict(&self, group: &GroupSpec, links: &[usize]) -> WilsonLineProduct {
        let mut out = WilsonLineProduct::identity(group, self.exponents.len());
        for &l in links {
            out.exponents[l] = self.exponents[l].clone();
        }
        out
    }

    /// Multiplies the Wilson line along a signed path in representation `chi`.
    pub fn add_path(&mut self, group: &GroupSpec, path: &[(usize, i8)], chi: &Character) {
        for &(l, s) in path {
            let c = group.pow(chi, s as i64);
            self.exponents[l] = group.mul(&self.exponents[l], &c);
        }
    }

    /// Tuple form, e.g. `(1,0,0)`.
    pub fn to_tuple(&self) -> String {
        let parts: Vec<String> = self.exponents.iter().map(|c| c.to_string()).collect();
        format!("({})", parts.join(","))
    }
}

/// Frame field realising the given non-root charges: for every vertex the
/// tree Wilson line from it to the root in its charge representation.
pub fn frame_field(
    group: &GroupSpec,
    tree: &SpanningTree,
    charges: &BTreeMap<usize, Character>,
) -> Result<WilsonLineProduct, QrfError> {
    let mut w = WilsonLineProduct::identity(group, tree.num_links);
    for (&v, q) in charges {
        if v == tree.root {
            return Err(QrfError::RootChargeSupplied(v));
        }
        w.add_path(group, &tree.path_to_root(v), q);
    }
    Ok(w)
}

/// System holonomy `H_l^chi`: the system link dressed by tree paths so the
/// result is a closed loop through the root.
pub fn system_holonomy(
    group: &GroupSpec,
    lat: &Lattice,
    tree: &SpanningTree,
    l: usize,
    chi: &Character,
) -> Result<WilsonLineProduct, QrfError> {
    if tree.contains(l) {
        return Err(QrfError::LinkInTree(l));
    }
    let link = lat.link(l);
    let mut w = WilsonLineProduct::single(group, lat.num_links(), l, chi.clone());
    // Close the loop: head back to the root, root out to the tail.
    w.add_path(group, &tree.path(link.head, tree.root), chi);
    w.add_path(group, &tree.path(tree.root, link.tail), chi);
    Ok(w)
}

/// Page-Wootters reduction: conditions the tree registers on the group-basis
/// orientation `g_v` (one element per vertex, root entry ignored) and returns
/// the state of the remaining registers. Tree link values follow from
/// `g_v = g_parent(v) + sigma * g_l` along the tree. The output is scaled by
/// `|G|^{(N_V - 1)/2}` so gauge-invariant norms are preserved.
pub fn page_wootters_reduce(
    state: &StateVector,
    group: &GroupSpec,
    lat: &Lattice,
    tree: &SpanningTree,
    orientation: &[GroupElement],
    invariant_mask: &[bool],
) -> Result<StateVector, QrfError> {
    let layout = state.layout();
    let discarded: f64 = state
        .amplitudes()
        .iter()
        .zip(invariant_mask)
        .filter(|(_, &m)| !m)
        .map(|(a, _)| a.norm_sqr())
        .sum::<f64>()
        .sqrt();
    if discarded > PW_TOLERANCE {
        return Err(QrfError::NotGaugeInvariant(discarded));
    }
    // Group element on every tree link.
    let mut g_link: BTreeMap<usize, GroupElement> = BTreeMap::new();
    for v in 0..lat.num_vertices() {
        if let (Some((l, s)), Some(p)) = (tree.parent(v), tree.parent_vertex(v)) {
            let diff = group.compose(&orientation[v], &group.inverse(&orientation[p])).expect("same group");
            let gl = if s > 0 { diff } else { group.inverse(&diff) };
            g_link.insert(l, gl);
        }
    }
    let tree_regs: Vec<(usize, GroupElement)> = g_link
        .iter()
        .map(|(&l, g)| (layout.link_register(l).expect("every link has a register"), g.clone()))
        .collect();
    let kept: Vec<usize> = (0..layout.registers().len()).filter(|r| !tree_regs.iter().any(|(t, _)| t == r)).collect();
    let regs: Vec<Register> = kept.iter().map(|&r| layout.registers()[r].clone()).collect();
    let out_layout = Arc::new(RegisterLayout::new(regs, usize::MAX)?);
    let mut out = StateVector::zeros(out_layout.clone());
    // <g|chi> = conj(chi(g)) / sqrt|G|, rescaled by sqrt|G| per tree register.
    let chars = group.characters();
    let overlaps: Vec<Vec<Complex64>> = tree_regs
        .iter()
        .map(|(_, g)| chars.iter().map(|c| group.pair(c, g).expect("same group").to_complex().conj()).collect())
        .collect();
    for (idx, a) in state.amplitudes().iter().enumerate() {
        if a.norm_sqr() == 0.0 {
            continue;
        }
        let labels = layout.decode(idx);
        let mut c = *a;
        for ((r, _), ov) in tree_regs.iter().zip(&overlaps) {
            c *= ov[labels[*r]];
        }
        let small: Vec<usize> = kept.iter().map(|&r| labels[r]).collect();
        let j = out_layout.encode(&small);
        out.amplitudes_mut()[j] += c;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(d: u64) -> GroupSpec {
        GroupSpec::cyclic(d).unwrap()
    }

    #[test]
    fn ring3_default_tree() {
        let lat = Lattice::ring(3).unwrap();
        let t = SpanningTree::build(&lat, 0, &TreeStrategy::Bfs).unwrap();
        assert_eq!(t.tree_links(), &[0, 1]);
        assert_eq!(t.system_links(), vec![2]);
        assert_eq!(t.path(2, 0), vec![(1, -1), (0, -1)]);
        assert!(t.path(0, 0).is_empty());
        let torus = Lattice::torus_square(2, 2).unwrap();
        assert_eq!(SpanningTree::build(&torus, 0, &TreeStrategy::Bfs).unwrap().system_links().len(), 5);
    }

    #[test]
    fn path_inversion() {
        let lat = Lattice::torus_square(3, 3).unwrap();
        let t = SpanningTree::build(&lat, 4, &TreeStrategy::Dfs).unwrap();
        for a in 0..9 {
            for b in 0..9 {
                let rev: Vec<(usize, i8)> = t.path(b, a).into_iter().rev().map(|(l, s)| (l, -s)).collect();
                assert_eq!(t.path(a, b), rev);
            }
        }
    }

    #[test]
    fn explicit_tree_validation() {
        let lat = Lattice::ring(4).unwrap();
        assert!(SpanningTree::build(&lat, 0, &TreeStrategy::Explicit(vec![1, 2, 3])).is_ok());
        assert!(SpanningTree::build(&lat, 0, &TreeStrategy::Explicit(vec![0, 1])).is_err());
        assert!(SpanningTree::build(&lat, 0, &TreeStrategy::Explicit(vec![0, 0, 1])).is_err());
        let torus = Lattice::torus_square(2, 2).unwrap();
        // Links 0 and 2 are parallel (0->1 and 1->0), so they close a cycle.
        assert!(SpanningTree::build(&torus, 0, &TreeStrategy::Explicit(vec![0, 2, 1])).is_err());
    }

    #[test]
    fn frame_field_examples() {
        let g = z(2);
        let lat = Lattice::ring(3).unwrap();
        let t = SpanningTree::build(&lat, 0, &TreeStrategy::Bfs).unwrap();
        let mut q = BTreeMap::new();
        q.insert(1, g.character(&[1]).unwrap());
        assert_eq!(frame_field(&g, &t, &q).unwrap().to_tuple(), "(1,0,0)");
        q.insert(0, g.character(&[1]).unwrap());
        assert_eq!(frame_field(&g, &t, &q), Err(QrfError::RootChargeSupplied(0)));
        let z3 = z(3);
        let mut q3 = BTreeMap::new();
        q3.insert(1, z3.character(&[1]).unwrap());
        assert_eq!(frame_field(&z3, &t, &q3).unwrap().to_tuple(), "(2,0,0)");
    }

    #[test]
    fn holonomy_flips_all_links() {
        let g = z(2);
        let lat = Lattice::ring(3).unwrap();
        let t = SpanningTree::build(&lat, 0, &TreeStrategy::Bfs).unwrap();
        let h = system_holonomy(&g, &lat, &t, 2, &g.character(&[1]).unwrap()).unwrap();
        assert_eq!(h.to_tuple(), "(1,1,1)");
        assert_eq!(system_holonomy(&g, &lat, &t, 0, &g.character(&[1]).unwrap()), Err(QrfError::LinkInTree(0)));
        assert!(system_holonomy(&g, &lat, &t, 2, &g.trivial_character()).unwrap().is_identity());
    }
}
