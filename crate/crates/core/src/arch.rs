//! Qubit connectivity graphs.
//!
//! An [`Architecture`] is an undirected, connected graph on qubits
//! `0..n`. Vertex subsets are passed around as [`BitVector`] masks of
//! length `n`; every query that takes such a mask works on the subgraph
//! induced by it.

use std::collections::{BTreeSet, VecDeque};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::BitVector;

#[derive(Debug, Error)]
pub enum ArchError {
    #[error("architecture must have at least one qubit")]
    Empty,
    #[error("edge ({0}, {1}) references a qubit outside 0..{2}")]
    VertexOutOfRange(usize, usize, usize),
    #[error("self-loop on qubit {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("architecture {0:?} is not connected")]
    Disconnected(String),
    #[error("vertex subset induces a disconnected subgraph")]
    DisconnectedSubset,
    #[error("vertex subset is empty")]
    EmptySubset,
    #[error("vertex {0} is not in the given subset")]
    NotInSubset(usize),
    #[error("mask has length {got}, architecture has {expected} qubits")]
    MaskLength { got: usize, expected: usize },
    #[error("unknown architecture {0:?}")]
    UnknownName(String),
    #[error("failed to parse architecture file: {0}")]
    Parse(String),
    #[error("i/o error reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// On-disk form of an architecture: a TOML document with `name`,
/// `qubits` and `edges`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArchitectureFile {
    pub name: String,
    pub qubits: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

const ASPEN_16: &str = include_str!("../catalog/aspen_16.toml");
const SINGAPORE_20: &str = include_str!("../catalog/singapore_20.toml");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Architecture {
    name: String,
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    adjacency_masks: Vec<BitVector>,
}

impl Architecture {
    /// Validates and builds an architecture. Edges are stored with the
    /// smaller endpoint first and sorted.
    pub fn new(
        name: impl Into<String>,
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, ArchError> {
        let name = name.into();
        if n == 0 {
            return Err(ArchError::Empty);
        }
        let mut seen = BTreeSet::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(ArchError::VertexOutOfRange(a, b, n));
            }
            if a == b {
                return Err(ArchError::SelfLoop(a));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(ArchError::DuplicateEdge(a, b));
            }
        }
        let edges: Vec<(usize, usize)> = seen.into_iter().collect();
        let mut adjacency = vec![Vec::new(); n];
        let mut adjacency_masks = vec![BitVector::zeros(n); n];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
            adjacency_masks[a].set(b, true);
            adjacency_masks[b].set(a, true);
        }
        for list in adjacency.iter_mut() {
            list.sort_unstable();
        }
        let arch = Architecture {
            name,
            n,
            edges,
            adjacency,
            adjacency_masks,
        };
        if !arch.is_connected_within(&arch.all_vertices()) {
            return Err(ArchError::Disconnected(arch.name));
        }
        Ok(arch)
    }

    pub fn line(n: usize) -> Self {
        Self::new(format!("line_{n}"), n, (1..n).map(|i| (i - 1, i)))
            .expect("line graphs are connected")
    }

    /// Ring on `n >= 3` qubits; smaller sizes degenerate to a line.
    pub fn cycle(n: usize) -> Self {
        if n < 3 {
            let mut line = Self::line(n);
            line.name = format!("cycle_{n}");
            return line;
        }
        let edges = (0..n).map(|i| (i, (i + 1) % n));
        Self::new(format!("cycle_{n}"), n, edges).expect("cycles are connected")
    }

    /// Row-major `rows x cols` grid.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    edges.push((v, v + 1));
                }
                if r + 1 < rows {
                    edges.push((v, v + cols));
                }
            }
        }
        Self::new(format!("grid_{rows}x{cols}"), rows * cols, edges).expect("grids are connected")
    }

    /// Square grid on `n` qubits, `n` a perfect square.
    pub fn square(n: usize) -> Option<Self> {
        let side = (n as f64).sqrt().round() as usize;
        if side * side != n || n == 0 {
            return None;
        }
        let mut g = Self::grid(side, side);
        g.name = format!("square_{n}");
        Some(g)
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
        Self::new(format!("complete_{n}"), n, edges).expect("complete graphs are connected")
    }

    /// Parses the TOML architecture format.
    pub fn load(source: &str) -> Result<Self, ArchError> {
        let file: ArchitectureFile =
            toml::from_str(source).map_err(|e| ArchError::Parse(e.to_string()))?;
        Self::new(
            file.name,
            file.qubits,
            file.edges.iter().map(|e| (e[0], e[1])),
        )
    }

    pub fn load_file(path: &Path) -> Result<Self, ArchError> {
        let text = fs::read_to_string(path).map_err(|source| ArchError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::load(&text)
    }

    pub fn to_file(&self) -> ArchitectureFile {
        ArchitectureFile {
            name: self.name.clone(),
            qubits: self.n,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
            description: None,
        }
    }

    /// Looks a name up in the built-in catalog.
    ///
    /// Recognised names: `line_N`, `cycle_N`, `square_N` (N a perfect
    /// square), `grid_RxC`, `complete_N`, `aspen_16`, `singapore_20`.
    pub fn from_catalog(name: &str) -> Result<Self, ArchError> {
        let unknown = || ArchError::UnknownName(name.to_string());
        match name {
            "aspen_16" => return Self::load(ASPEN_16),
            "singapore_20" => return Self::load(SINGAPORE_20),
            _ => {}
        }
        let (family, size) = name.rsplit_once('_').ok_or_else(unknown)?;
        if family == "grid" {
            let (r, c) = size.split_once('x').ok_or_else(unknown)?;
            let r: usize = r.parse().map_err(|_| unknown())?;
            let c: usize = c.parse().map_err(|_| unknown())?;
            if r == 0 || c == 0 {
                return Err(unknown());
            }
            return Ok(Self::grid(r, c));
        }
        let n: usize = size.parse().map_err(|_| unknown())?;
        if n == 0 {
            return Err(unknown());
        }
        match family {
            "line" => Ok(Self::line(n)),
            "cycle" => Ok(Self::cycle(n)),
            "complete" => Ok(Self::complete(n)),
            "square" => Self::square(n).ok_or_else(unknown),
            _ => Err(unknown()),
        }
    }

    /// Catalog names are tried first, then the argument is read as a file.
    pub fn resolve(name_or_path: &str) -> Result<Self, ArchError> {
        match Self::from_catalog(name_or_path) {
            Ok(arch) => Ok(arch),
            Err(ArchError::UnknownName(_)) if Path::new(name_or_path).exists() => {
                Self::load_file(Path::new(name_or_path))
            }
            Err(e) => Err(e),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        a < self.n && b < self.n && self.adjacency_masks[a].get(b)
    }

    /// Neighbours of `v` in increasing order.
    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn all_vertices(&self) -> BitVector {
        BitVector::ones(self.n)
    }

    fn check_mask(&self, mask: &BitVector) -> Result<(), ArchError> {
        if mask.len() != self.n {
            return Err(ArchError::MaskLength {
                got: mask.len(),
                expected: self.n,
            });
        }
        Ok(())
    }

    /// Neighbours of `v` that lie in `within`, in increasing order.
    pub fn neighbours_within(&self, v: usize, within: &BitVector) -> Vec<usize> {
        self.adjacency[v]
            .iter()
            .copied()
            .filter(|&u| within.get(u))
            .collect()
    }

    pub fn is_connected_within(&self, within: &BitVector) -> bool {
        let Some(start) = within.first_one() else {
            return true;
        };
        self.bfs_within(within, start)
            .0
            .iter()
            .filter(|d| d.is_some())
            .count()
            == within.count_ones()
    }

    pub fn induced_subgraph(&self, subset: &BitVector) -> Result<InducedSubgraph, ArchError> {
        self.check_mask(subset)?;
        if subset.is_zero() {
            return Err(ArchError::EmptySubset);
        }
        let vertices: Vec<usize> = subset.iter_ones().collect();
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|&(a, b)| subset.get(a) && subset.get(b))
            .collect();
        Ok(InducedSubgraph { vertices, edges })
    }

    /// Vertices of `subset` whose removal leaves the induced subgraph
    /// connected, in increasing order. A singleton subset returns its
    /// only vertex.
    ///
    /// Articulation points come from one iterative lowlink DFS.
    pub fn non_cutting_vertices(&self, subset: &BitVector) -> Result<Vec<usize>, ArchError> {
        self.check_mask(subset)?;
        let Some(root) = subset.first_one() else {
            return Err(ArchError::EmptySubset);
        };
        const UNSEEN: usize = usize::MAX;
        let mut disc = vec![UNSEEN; self.n];
        let mut low = vec![0usize; self.n];
        let mut is_cut = vec![false; self.n];
        let mut timer = 0;
        let mut root_children = 0;

        // (vertex, parent, next neighbour position)
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, UNSEEN, 0)];
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        while let Some(top) = stack.last_mut() {
            let (v, parent, pos) = *top;
            if let Some(&u) = self.adjacency[v].get(pos) {
                top.2 += 1;
                if !subset.get(u) || u == parent {
                    continue;
                }
                if disc[u] == UNSEEN {
                    disc[u] = timer;
                    low[u] = timer;
                    timer += 1;
                    if v == root {
                        root_children += 1;
                    }
                    stack.push((u, v, 0));
                } else {
                    low[v] = low[v].min(disc[u]);
                }
            } else {
                stack.pop();
                if parent != UNSEEN {
                    low[parent] = low[parent].min(low[v]);
                    if parent != root && low[v] >= disc[parent] {
                        is_cut[parent] = true;
                    }
                }
            }
        }
        if subset.iter_ones().any(|v| disc[v] == UNSEEN) {
            return Err(ArchError::DisconnectedSubset);
        }
        is_cut[root] = root_children > 1;
        Ok(subset.iter_ones().filter(|&v| !is_cut[v]).collect())
    }

    /// BFS over the induced subgraph. Neighbours are scanned in increasing
    /// order, so every parent pointer is the lowest-index vertex on some
    /// shortest path one step closer to `source`.
    fn bfs_within(&self, within: &BitVector, source: usize) -> (Vec<Option<usize>>, Vec<usize>) {
        let mut dist = vec![None; self.n];
        let mut parent = vec![usize::MAX; self.n];
        let mut queue = VecDeque::from([source]);
        dist[source] = Some(0);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap_or(0);
            for &u in &self.adjacency[v] {
                if within.get(u) && dist[u].is_none() {
                    dist[u] = Some(d + 1);
                    parent[u] = v;
                    queue.push_back(u);
                }
            }
        }
        (dist, parent)
    }

    /// Approximate Steiner tree over the whole graph.
    pub fn steiner_tree(&self, root: usize, terminals: &[usize]) -> Result<SteinerTree, ArchError> {
        self.steiner_tree_within(&self.all_vertices(), root, terminals)
    }

    /// Approximate Steiner tree inside the subgraph induced by `within`.
    ///
    /// Builds the terminal distance graph from BFS shortest paths, takes
    /// its minimum spanning tree (Prim, grown from `root`), expands each
    /// tree edge into its shortest path, re-spans the union from `root`
    /// and prunes non-terminal leaves. Ties go to lower vertex indices.
    pub fn steiner_tree_within(
        &self,
        within: &BitVector,
        root: usize,
        terminals: &[usize],
    ) -> Result<SteinerTree, ArchError> {
        self.check_mask(within)?;
        let mut terms: Vec<usize> = terminals.to_vec();
        terms.push(root);
        terms.sort_unstable();
        terms.dedup();
        if let Some(&bad) = terms.iter().find(|&&t| t >= self.n || !within.get(t)) {
            return Err(ArchError::NotInSubset(bad));
        }
        if terms.len() == 1 {
            return Ok(SteinerTree {
                root,
                terminals: terms,
                nodes: vec![root],
                edges: Vec::new(),
            });
        }

        let bfs: Vec<(Vec<Option<usize>>, Vec<usize>)> =
            terms.iter().map(|&t| self.bfs_within(within, t)).collect();
        let index_of = |v: usize| terms.binary_search(&v).expect("terminal");

        // Prim over the terminal distance graph. Candidates are compared by
        // (distance, outside terminal, position of the attaching terminal).
        let mut in_tree = vec![root];
        let mut used = vec![false; terms.len()];
        used[index_of(root)] = true;
        let mut mst_edges = Vec::new();
        while in_tree.len() < terms.len() {
            let mut best: Option<(usize, usize, usize, usize)> = None;
            for (pos, &a) in in_tree.iter().enumerate() {
                let dist = &bfs[index_of(a)].0;
                for (bi, &b) in terms.iter().enumerate() {
                    if used[bi] {
                        continue;
                    }
                    let d = dist[b].ok_or(ArchError::DisconnectedSubset)?;
                    let key = (d, b, pos, a);
                    if best.is_none_or(|cur| (key.0, key.1, key.2) < (cur.0, cur.1, cur.2)) {
                        best = Some(key);
                    }
                }
            }
            let (_, b, _, a) = best.expect("an unused terminal remains");
            used[index_of(b)] = true;
            in_tree.push(b);
            mst_edges.push((a, b));
        }

        // Union of the shortest paths behind each spanning-tree edge.
        let mut node_mask = BitVector::zeros(self.n);
        let mut union_edges = BTreeSet::new();
        for &(a, b) in &mst_edges {
            let parent = &bfs[index_of(a)].1;
            let mut v = b;
            node_mask.set(v, true);
            while v != a {
                let p = parent[v];
                union_edges.insert((p.min(v), p.max(v)));
                node_mask.set(p, true);
                v = p;
            }
        }

        let mut terminal_mask = BitVector::zeros(self.n);
        for &t in &terms {
            terminal_mask.set(t, true);
        }
        let adjacency = |mask: &BitVector, v: usize| -> Vec<usize> {
            self.adjacency[v]
                .iter()
                .copied()
                .filter(|&u| mask.get(u) && union_edges.contains(&(u.min(v), u.max(v))))
                .collect()
        };

        // Spanning tree of the union. Walking the BFS order backwards visits
        // children before parents, so one pass strips every branch that
        // carries no terminal.
        let (parent, order) = span_from(root, &node_mask, &adjacency);
        let mut keep = terminal_mask.clone();
        for &v in order.iter().rev() {
            if v != root && keep.get(v) {
                keep.set(parent[v], true);
            }
        }
        let order: Vec<usize> = order.into_iter().filter(|&v| keep.get(v)).collect();

        let edges = order
            .iter()
            .copied()
            .filter(|&v| v != root)
            .map(|v| (parent[v], v))
            .collect();
        let mut nodes = order.clone();
        nodes.sort_unstable();
        Ok(SteinerTree {
            root,
            terminals: terms,
            nodes,
            edges,
        })
    }
}

/// BFS spanning tree from `root` over vertices in `mask`, using the
/// supplied adjacency. Returns parent pointers and the visit order.
fn span_from(
    root: usize,
    mask: &BitVector,
    adjacency: &dyn Fn(&BitVector, usize) -> Vec<usize>,
) -> (Vec<usize>, Vec<usize>) {
    let mut parent = vec![usize::MAX; mask.len()];
    let mut seen = BitVector::zeros(mask.len());
    let mut order = vec![root];
    seen.set(root, true);
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for u in adjacency(mask, v) {
            if mask.get(u) && !seen.get(u) {
                seen.set(u, true);
                parent[u] = v;
                order.push(u);
            }
        }
    }
    (parent, order)
}

/// Subgraph induced by a vertex subset, in the original vertex labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedSubgraph {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

/// A tree in the architecture graph that spans a set of terminals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SteinerTree {
    pub root: usize,
    /// Terminals including the root, sorted.
    pub terminals: Vec<usize>,
    /// Every vertex of the tree, sorted.
    pub nodes: Vec<usize>,
    /// `(parent, child)` pairs in breadth-first order from the root.
    /// Iterate in reverse for a leaves-first sweep.
    pub edges: Vec<(usize, usize)>,
}

impl SteinerTree {
    /// Tree vertices that are not terminals.
    pub fn steiner_nodes(&self) -> Vec<usize> {
        self.nodes
            .iter()
            .copied()
            .filter(|v| self.terminals.binary_search(v).is_err())
            .collect()
    }

    pub fn first_child(&self, v: usize) -> Option<usize> {
        self.edges.iter().find(|e| e.0 == v).map(|e| e.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask(n: usize, vs: &[usize]) -> BitVector {
        BitVector::from_indices(n, vs.iter().copied())
    }

    #[test]
    fn non_cutting_on_line_and_complete() {
        let line = Architecture::line(4);
        assert_eq!(
            line.non_cutting_vertices(&line.all_vertices()).unwrap(),
            vec![0, 3]
        );
        assert_eq!(
            line.non_cutting_vertices(&mask(4, &[1, 2, 3])).unwrap(),
            vec![1, 3]
        );
        assert_eq!(line.non_cutting_vertices(&mask(4, &[2])).unwrap(), vec![2]);
        let k5 = Architecture::complete(5);
        assert_eq!(
            k5.non_cutting_vertices(&k5.all_vertices()).unwrap(),
            vec![0, 1, 2, 3, 4]
        );
    }

    #[test]
    fn non_cutting_rejects_disconnected_subset() {
        let line = Architecture::line(4);
        assert!(matches!(
            line.non_cutting_vertices(&mask(4, &[0, 2])),
            Err(ArchError::DisconnectedSubset)
        ));
    }

    #[test]
    fn induced_subgraph_of_line_and_grid() {
        let line = Architecture::line(4);
        let sub = line.induced_subgraph(&mask(4, &[1, 2, 3])).unwrap();
        assert_eq!(sub.vertices, vec![1, 2, 3]);
        assert_eq!(sub.edges, vec![(1, 2), (2, 3)]);
        let full = line.induced_subgraph(&line.all_vertices()).unwrap();
        assert_eq!(full.edges, line.edges());
        let grid = Architecture::grid(3, 3);
        let row = grid.induced_subgraph(&mask(9, &[3, 4, 5])).unwrap();
        assert_eq!(row.edges, vec![(3, 4), (4, 5)]);
        assert!(line.induced_subgraph(&BitVector::zeros(4)).is_err());
    }

    #[test]
    fn neighbours_within_respects_subset() {
        let line = Architecture::line(4);
        assert_eq!(line.neighbours_within(0, &line.all_vertices()), vec![1]);
        assert_eq!(line.neighbours_within(1, &mask(4, &[1, 2, 3])), vec![2]);
        let k4 = Architecture::complete(4);
        assert_eq!(k4.neighbours_within(2, &k4.all_vertices()), vec![0, 1, 3]);
    }

    #[test]
    fn steiner_tree_on_line_is_the_path() {
        let line = Architecture::line(4);
        let t = line.steiner_tree(0, &[3]).unwrap();
        assert_eq!(t.edges, vec![(0, 1), (1, 2), (2, 3)]);
        assert_eq!(t.steiner_nodes(), vec![1, 2]);
        let single = line.steiner_tree(2, &[]).unwrap();
        assert!(single.edges.is_empty());
        assert_eq!(single.nodes, vec![2]);
    }

    #[test]
    fn steiner_tree_drops_unneeded_branches() {
        // A star whose arms are lines; terminals on two arms only.
        let g =
            Architecture::new("star", 7, [(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)]).unwrap();
        let t = g.steiner_tree(2, &[4]).unwrap();
        assert_eq!(t.nodes, vec![0, 1, 2, 3, 4]);
        assert_eq!(t.edges.len(), 4);
    }

    #[test]
    fn construction_validates_edges() {
        assert!(matches!(
            Architecture::new("x", 4, [(0, 9)]),
            Err(ArchError::VertexOutOfRange(0, 9, 4))
        ));
        assert!(matches!(
            Architecture::new("x", 2, [(1, 1)]),
            Err(ArchError::SelfLoop(1))
        ));
        assert!(matches!(
            Architecture::new("x", 2, [(0, 1), (1, 0)]),
            Err(ArchError::DuplicateEdge(1, 0))
        ));
        assert!(matches!(
            Architecture::new("x", 3, [(0, 1)]),
            Err(ArchError::Disconnected(_))
        ));
    }

    #[test]
    fn catalog_names_resolve() {
        assert_eq!(
            Architecture::from_catalog("line_4").unwrap(),
            Architecture::line(4)
        );
        assert_eq!(
            Architecture::from_catalog("square_36")
                .unwrap()
                .edges()
                .len(),
            60
        );
        assert_eq!(
            Architecture::from_catalog("grid_2x3").unwrap().n_qubits(),
            6
        );
        assert_eq!(
            Architecture::from_catalog("complete_6")
                .unwrap()
                .edges()
                .len(),
            15
        );
        assert!(Architecture::from_catalog("square_35").is_err());
        assert!(Architecture::from_catalog("torus_9").is_err());
        assert!(Architecture::from_catalog("line_0").is_err());
    }

    #[test]
    fn representative_devices_have_declared_shape() {
        let aspen = Architecture::from_catalog("aspen_16").unwrap();
        assert_eq!(aspen.n_qubits(), 16);
        // Two 8-cycles plus two bridges.
        assert_eq!(aspen.edges().len(), 18);
        assert!((0..16).all(|v| aspen.neighbours(v).len() >= 2));
        let singapore = Architecture::from_catalog("singapore_20").unwrap();
        assert_eq!(singapore.n_qubits(), 20);
        assert_eq!(singapore.edges().len(), 23);
    }

    #[test]
    fn load_reports_out_of_range_vertices() {
        let text = "name = \"bad\"\nqubits = 4\nedges = [[0, 1], [0, 9]]\n";
        assert!(matches!(
            Architecture::load(text),
            Err(ArchError::VertexOutOfRange(0, 9, 4))
        ));
        assert!(matches!(
            Architecture::load("name = 3"),
            Err(ArchError::Parse(_))
        ));
    }

    #[test]
    fn file_round_trip() {
        let g = Architecture::grid(2, 3);
        let text = toml::to_string(&g.to_file()).unwrap();
        assert_eq!(Architecture::load(&text).unwrap(), g);
    }
}
