//! Closed oriented lattices (finite connected multigraphs), generators for rings
//! and periodic square lattices, staggering and girth.

use std::collections::VecDeque;

use thiserror::Error;

/// Errors raised while building or analysing a lattice.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    /// Generator parameters below the minimum size.
    #[error("lattice too small: {0}")]
    TooSmall(String),
    /// A link endpoint is not a vertex, or the link is a self-loop.
    #[error("invalid link {index}: ({tail}, {head})")]
    InvalidLink { index: usize, tail: usize, head: usize },
    /// The graph is not connected.
    #[error("lattice is disconnected")]
    Disconnected,
    /// Staggering requires a bipartite graph.
    #[error("lattice is not bipartite")]
    NotBipartite,
    /// Staggering requires an even number of vertices.
    #[error("lattice has an odd number of vertices ({0})")]
    OddVertexCount(usize),
    /// The graph has no cycle.
    #[error("lattice has no cycle")]
    Acyclic,
}

/// An oriented link from `tail` to `head`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Link {
    pub tail: usize,
    pub head: usize,
}

/// A closed, connected, oriented lattice. Parallel links are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    name: String,
    num_vertices: usize,
    links: Vec<Link>,
}

impl Lattice {
    /// Builds a lattice from an explicit link list and validates it.
    pub fn new(name: impl Into<String>, num_vertices: usize, links: Vec<(usize, usize)>) -> Result<Self, LatticeError> {
        if num_vertices < 2 {
            return Err(LatticeError::TooSmall(format!("{num_vertices} vertices")));
        }
        let mut out = Vec::with_capacity(links.len());
        for (index, &(tail, head)) in links.iter().enumerate() {
            if tail >= num_vertices || head >= num_vertices || tail == head {
                return Err(LatticeError::InvalidLink { index, tail, head });
            }
            out.push(Link { tail, head });
        }
        let lat = Lattice { name: name.into(), num_vertices, links: out };
        if !lat.is_connected() {
            return Err(LatticeError::Disconnected);
        }
        Ok(lat)
    }

    /// Ring with `n >= 3` vertices; link `i` points from `i` to `i+1 mod n`.
    pub fn ring(n: usize) -> Result<Self, LatticeError> {
        if n < 3 {
            return Err(LatticeError::TooSmall(format!("ring({n}) needs at least 3 vertices")));
        }
        Lattice::new(format!("ring({n})"), n, (0..n).map(|i| (i, (i + 1) % n)).collect())
    }

    /// Periodic `lx` by `ly` square lattice. Vertex `(x, y)` has index
    /// `x + lx * y`; for every vertex the `+x` link precedes the `+y` link.
    pub fn torus_square(lx: usize, ly: usize) -> Result<Self, LatticeError> {
        if lx < 2 || ly < 2 {
            return Err(LatticeError::TooSmall(format!("torus({lx},{ly}) needs both sides at least 2")));
        }
        let idx = |x: usize, y: usize| (x % lx) + lx * (y % ly);
        let mut links = Vec::with_capacity(2 * lx * ly);
        for y in 0..ly {
            for x in 0..lx {
                links.push((idx(x, y), idx(x + 1, y)));
                links.push((idx(x, y), idx(x, y + 1)));
            }
        }
        Lattice::new(format!("torus({lx},{ly})"), lx * ly, links)
    }

    /// Display label.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of vertices `N_V`.
    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    /// Number of links `N_L`.
    pub fn num_links(&self) -> usize {
        self.links.len()
    }

    /// All links in order.
    pub fn links(&self) -> &[Link] {
        &self.links
    }

    /// Link by index.
    pub fn link(&self, l: usize) -> Link {
        self.links[l]
    }

    /// Dimension of the loop space, `N_L - N_V + 1`.
    pub fn loop_dimension(&self) -> usize {
        self.num_links() + 1 - self.num_vertices
    }

    /// Links leaving `v`.
    pub fn out_links(&self, v: usize) -> Vec<usize> {
        (0..self.links.len()).filter(|&l| self.links[l].tail == v).collect()
    }

    /// Links entering `v`.
    pub fn in_links(&self, v: usize) -> Vec<usize> {
        (0..self.links.len()).filter(|&l| self.links[l].head == v).collect()
    }

    /// Undirected adjacency as `(link, neighbour)` pairs in link order.
    pub fn incident(&self, v: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (l, link) in self.links.iter().enumerate() {
            if link.tail == v {
                out.push((l, link.head));
            } else if link.head == v {
                out.push((l, link.tail));
            }
        }
        out
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.num_vertices];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for (_, w) in self.incident(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Staggering: a proper 2-colouring with `c_0 = 0`, obtained by
    /// breadth-first search.
    pub fn stagger(&self) -> Result<StaggerColoring, LatticeError> {
        let mut parity: Vec<Option<u8>> = vec![None; self.num_vertices];
        parity[0] = Some(0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            let pv = parity[v].expect("queued vertices are coloured");
            for (_, w) in self.incident(v) {
                match parity[w] {
                    None => {
                        parity[w] = Some(1 - pv);
                        queue.push_back(w);
                    }
                    Some(pw) if pw == pv => return Err(LatticeError::NotBipartite),
                    Some(_) => {}
                }
            }
        }
        if self.num_vertices % 2 == 1 {
            return Err(LatticeError::OddVertexCount(self.num_vertices));
        }
        Ok(StaggerColoring { parity: parity.into_iter().map(|p| p.unwrap_or(0)).collect() })
    }

    /// Length of the shortest closed loop, with links traversable in either
    /// direction. Two parallel links form a loop of length 2.
    pub fn girth(&self) -> Result<usize, LatticeError> {
        let mut best: Option<usize> = None;
        // For each link, the shortest path between its endpoints avoiding the
        // link itself closes the shortest cycle through that link.
        for (skip, link) in self.links.iter().enumerate() {
            let mut dist = vec![usize::MAX; self.num_vertices];
            dist[link.tail] = 0;
            let mut queue = VecDeque::from([link.tail]);
            while let Some(v) = queue.pop_front() {
                for (l, w) in self.incident(v) {
                    if l != skip && dist[w] == usize::MAX {
                        dist[w] = dist[v] + 1;
                        queue.push_back(w);
                    }
                }
            }
            if dist[link.head] != usize::MAX {
                let len = dist[link.head] + 1;
                best = Some(best.map_or(len, |b| b.min(len)));
            }
        }
        best.ok_or(LatticeError::Acyclic)
    }
}

/// Vertex parities `c_v in {0, 1}` of a staggered lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaggerColoring {
    parity: Vec<u8>,
}

impl StaggerColoring {
    /// Builds a colouring from explicit parities (validated against `lat`).
    pub fn explicit(lat: &Lattice, parity: Vec<u8>) -> Result<Self, LatticeError> {
        if parity.len() != lat.num_vertices() || parity.iter().any(|&p| p > 1) {
            return Err(LatticeError::NotBipartite);
        }
        if lat.links().iter().any(|l| parity[l.tail] == parity[l.head]) {
            return Err(LatticeError::NotBipartite);
        }
        if lat.num_vertices() % 2 == 1 {
            return Err(LatticeError::OddVertexCount(lat.num_vertices()));
        }
        Ok(StaggerColoring { parity })
    }

    /// Parity `c_v`.
    pub fn parity(&self, v: usize) -> u8 {
        self.parity[v]
    }

    /// All parities.
    pub fn parities(&self) -> &[u8] {
        &self.parity
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_and_torus_counts() {
        let r = Lattice::ring(3).unwrap();
        assert_eq!((r.num_vertices(), r.num_links()), (3, 3));
        assert_eq!(r.link(2), Link { tail: 2, head: 0 });
        assert!(matches!(Lattice::ring(2), Err(LatticeError::TooSmall(_))));
        let t = Lattice::torus_square(4, 4).unwrap();
        assert_eq!((t.num_vertices(), t.num_links()), (16, 32));
        assert_eq!(t.loop_dimension(), 17);
        assert!(Lattice::torus_square(1, 4).is_err());
    }

    #[test]
    fn girth_examples() {
        assert_eq!(Lattice::ring(3).unwrap().girth().unwrap(), 3);
        assert_eq!(Lattice::ring(5).unwrap().girth().unwrap(), 5);
        assert_eq!(Lattice::torus_square(4, 4).unwrap().girth().unwrap(), 4);
        assert_eq!(Lattice::torus_square(2, 2).unwrap().girth().unwrap(), 2);
        let tree = Lattice::new("path", 3, vec![(0, 1), (1, 2)]).unwrap();
        assert_eq!(tree.girth(), Err(LatticeError::Acyclic));
    }

    #[test]
    fn staggering() {
        assert_eq!(Lattice::ring(4).unwrap().stagger().unwrap().parities(), &[0, 1, 0, 1]);
        assert_eq!(Lattice::ring(3).unwrap().stagger(), Err(LatticeError::NotBipartite));
        let t = Lattice::torus_square(2, 2).unwrap().stagger().unwrap();
        assert_eq!(t.parities(), &[0, 1, 1, 0]);
    }

    #[test]
    fn rejects_bad_links() {
        assert!(matches!(Lattice::new("x", 2, vec![(0, 2)]), Err(LatticeError::InvalidLink { .. })));
        assert_eq!(Lattice::new("x", 4, vec![(0, 1), (2, 3)]), Err(LatticeError::Disconnected));
    }
}
