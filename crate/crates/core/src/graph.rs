//! Interaction graphs and the vertex surgery used by elimination: neighborhoods,
//! vertex and block elimination, quotient graphs, indistinguishable vertices
//! and chordality.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::Problem;

pub type Edge = (usize, usize);

fn ordered(u: usize, v: usize) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Undirected simple graph whose vertex ids are aligned with problem variable
/// ids. Eliminated vertices keep their id slot but leave the vertex set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionGraph {
    present: BTreeSet<usize>,
    adj: Vec<BTreeSet<usize>>,
}

impl InteractionGraph {
    /// Edgeless graph on vertices `0..n`.
    pub fn new(n: usize) -> Self {
        Self {
            present: (0..n).collect(),
            adj: vec![BTreeSet::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = Edge>) -> Self {
        let mut g = Self::new(n);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|v| (v - 1, v)))
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::path(n);
        if n > 2 {
            g.add_edge(n - 1, 0);
        }
        g
    }

    /// Capacity of the id space (eliminated vertices included).
    pub fn id_bound(&self) -> usize {
        self.adj.len()
    }

    /// Adds `{u, v}`; self-loops are ignored. Returns true if the edge is new.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        assert!(
            self.contains(u) && self.contains(v),
            "edge ({u}, {v}) touches a vertex outside the graph"
        );
        if u == v {
            return false;
        }
        let new = self.adj[u].insert(v);
        self.adj[v].insert(u);
        new
    }

    pub fn contains(&self, v: usize) -> bool {
        self.present.contains(&v)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj.get(u).is_some_and(|a| a.contains(&v))
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.present.iter().copied()
    }

    pub fn num_vertices(&self) -> usize {
        self.present.len()
    }

    pub fn num_edges(&self) -> usize {
        self.present.iter().map(|&v| self.adj[v].len()).sum::<usize>() / 2
    }

    /// All edges as `(min, max)` pairs in ascending order.
    pub fn edges(&self) -> Vec<Edge> {
        self.present
            .iter()
            .flat_map(|&u| self.adj[u].range(u + 1..).map(move |&v| (u, v)))
            .collect()
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    fn check_vertices<'a>(&self, set: impl IntoIterator<Item = &'a usize>) -> Result<()> {
        match set.into_iter().find(|v| !self.contains(**v)) {
            Some(&v) => Err(Error::UnknownVertex(v)),
            None => Ok(()),
        }
    }

    /// Neighborhood of a vertex set. The open form excludes `set` itself; the
    /// closed form adds it back.
    pub fn neighborhood(&self, set: &BTreeSet<usize>, kind: NeighborhoodKind) -> Result<BTreeSet<usize>> {
        self.check_vertices(set)?;
        let mut nb: BTreeSet<usize> = set.iter().flat_map(|&v| self.adj[v].iter().copied()).collect();
        match kind {
            NeighborhoodKind::Open => nb.retain(|v| !set.contains(v)),
            NeighborhoodKind::Closed => nb.extend(set.iter().copied()),
        }
        Ok(nb)
    }

    pub fn is_clique(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &u)| set[i + 1..].iter().all(|&v| self.has_edge(u, v)))
    }

    /// Edges that would be added by turning `set` into a clique.
    pub fn missing_edges(&self, set: &[usize]) -> Vec<Edge> {
        let mut missing = Vec::new();
        for (i, &u) in set.iter().enumerate() {
            for &v in &set[i + 1..] {
                if !self.has_edge(u, v) {
                    missing.push(ordered(u, v));
                }
            }
        }
        missing.sort_unstable();
        missing
    }

    fn remove_vertex(&mut self, v: usize) {
        let nbrs = std::mem::take(&mut self.adj[v]);
        for u in nbrs {
            self.adj[u].remove(&v);
        }
        self.present.remove(&v);
    }

    /// Eliminates `block` in place: its open neighborhood becomes a clique and
    /// the block leaves the graph. Returns the (sorted) neighborhood and the
    /// fill edges added.
    pub(crate) fn eliminate_block_in_place(&mut self, block: &[usize]) -> Result<(Vec<usize>, Vec<Edge>)> {
        let set: BTreeSet<usize> = block.iter().copied().collect();
        let scope: Vec<usize> = self.neighborhood(&set, NeighborhoodKind::Open)?.into_iter().collect();
        let fill = self.missing_edges(&scope);
        for &(u, v) in &fill {
            self.add_edge(u, v);
        }
        for &v in &set {
            self.remove_vertex(v);
        }
        Ok((scope, fill))
    }

    /// The `v`-elimination graph: neighbors of `v` made pairwise adjacent, then
    /// `v` deleted. Also returns the fill edges.
    pub fn eliminate_vertex(&self, v: usize) -> Result<(InteractionGraph, Vec<Edge>)> {
        let mut g = self.clone();
        let (_, fill) = g.eliminate_block_in_place(&[v])?;
        Ok((g, fill))
    }

    /// Graph over the blocks of `partition`: blocks `i` and `k` are adjacent iff
    /// some edge joins them. Meta-vertex ids are block indices.
    pub fn quotient(&self, partition: &Partition) -> Result<InteractionGraph> {
        partition.check_covers(self)?;
        let mut block_of = vec![usize::MAX; self.id_bound()];
        for (b, block) in partition.blocks().iter().enumerate() {
            for &v in block {
                block_of[v] = b;
            }
        }
        let mut q = InteractionGraph::new(partition.len());
        for (u, v) in self.edges() {
            let (bu, bv) = (block_of[u], block_of[v]);
            if bu != bv {
                q.add_edge(bu, bv);
            }
        }
        Ok(q)
    }

    /// Groups indistinguishable vertices. Blocks are ordered by their smallest
    /// member and list members ascending.
    pub fn indistinguishable_partition(&self, mode: Indistinguishability) -> Partition {
        let mut groups: BTreeMap<(u8, Vec<usize>), Vec<usize>> = BTreeMap::new();
        let mut union_find: Vec<usize> = (0..self.id_bound()).collect();
        fn find(uf: &mut [usize], mut v: usize) -> usize {
            while uf[v] != v {
                uf[v] = uf[uf[v]];
                v = uf[v];
            }
            v
        }

        let closed = matches!(mode, Indistinguishability::Closed | Indistinguishability::Union);
        let open = matches!(mode, Indistinguishability::Open | Indistinguishability::Union);
        for v in self.vertices() {
            if closed {
                let mut key: Vec<usize> = self.adj[v].iter().copied().collect();
                let at = key.binary_search(&v).unwrap_err();
                key.insert(at, v);
                groups.entry((0, key)).or_default().push(v);
            }
            if open {
                // Equal open neighborhoods imply non-adjacency: an edge (u, v)
                // would put v in N(u) but never in N(v).
                let key: Vec<usize> = self.adj[v].iter().copied().collect();
                groups.entry((1, key)).or_default().push(v);
            }
        }
        for members in groups.values() {
            for &m in &members[1..] {
                let (a, b) = (find(&mut union_find, members[0]), find(&mut union_find, m));
                if a != b {
                    union_find[a.max(b)] = a.min(b);
                }
            }
        }
        let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in self.vertices() {
            let root = find(&mut union_find, v);
            blocks.entry(root).or_default().push(v);
        }
        Partition {
            blocks: blocks.into_values().collect(),
        }
    }

    /// Maximum-cardinality search visiting order: repeatedly the unvisited
    /// vertex with the most visited neighbors, ties to the lowest id.
    pub fn mcs_visit_order(&self) -> Vec<usize> {
        let mut weight: BTreeMap<usize, usize> = self.vertices().map(|v| (v, 0)).collect();
        let mut order = Vec::with_capacity(weight.len());
        while !weight.is_empty() {
            let (&v, _) = weight
                .iter()
                .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
                .expect("non-empty");
            weight.remove(&v);
            for u in &self.adj[v] {
                if let Some(w) = weight.get_mut(u) {
                    *w += 1;
                }
            }
            order.push(v);
        }
        order
    }

    /// True iff eliminating vertices in `order` adds no fill edge.
    pub fn is_perfect_elimination_order(&self, order: &[usize]) -> bool {
        let mut position = vec![usize::MAX; self.id_bound()];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        order.iter().all(|&v| {
            let later: Vec<usize> = self.adj[v]
                .iter()
                .copied()
                .filter(|&u| position[u] > position[v])
                .collect();
            self.is_clique(&later)
        })
    }

    /// Chordality test: the reverse maximum-cardinality search order must be a
    /// perfect elimination order.
    pub fn is_chordal(&self) -> bool {
        let mut order = self.mcs_visit_order();
        order.reverse();
        self.is_perfect_elimination_order(&order)
    }
}

/// Builds the interaction graph: `u` and `v` are adjacent iff they co-occur in
/// an objective component or a constraint.
pub fn build_interaction_graph(p: &Problem) -> InteractionGraph {
    let mut g = InteractionGraph::new(p.num_vars());
    let scopes = p
        .objective
        .iter()
        .map(|c| c.scope())
        .chain(p.constraints.iter().map(|c| c.scope()));
    for scope in scopes {
        for (i, &u) in scope.iter().enumerate() {
            for &v in &scope[i + 1..] {
                g.add_edge(u, v);
            }
        }
    }
    g
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeighborhoodKind {
    Open,
    Closed,
}

/// Which neighborhoods must coincide for two vertices to share a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Indistinguishability {
    /// Equal closed neighborhoods (adjacent twins).
    Closed,
    /// Equal open neighborhoods (non-adjacent twins).
    Open,
    /// Either of the above.
    Union,
}

/// Ordered sequence of pairwise disjoint, non-empty vertex blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Checks disjointness and non-emptiness; coverage is checked against a
    /// graph by the operations that need it.
    pub fn new(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &v in block {
                if !seen.insert(v) {
                    return Err(Error::InvalidPartition(format!("vertex {v} appears twice")));
                }
            }
        }
        Ok(Self { blocks })
    }

    pub fn singletons(vertices: impl IntoIterator<Item = usize>) -> Self {
        Self {
            blocks: vertices.into_iter().map(|v| vec![v]).collect(),
        }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn into_blocks(self) -> Vec<Vec<usize>> {
        self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub(crate) fn check_covers(&self, g: &InteractionGraph) -> Result<()> {
        let members: BTreeSet<usize> = self.blocks.iter().flatten().copied().collect();
        let total: usize = self.blocks.iter().map(Vec::len).sum();
        if total != members.len() {
            return Err(Error::InvalidPartition("blocks overlap".into()));
        }
        if let Some(v) = members.iter().find(|v| !g.contains(**v)) {
            return Err(Error::InvalidPartition(format!("vertex {v} is not in the graph")));
        }
        if let Some(v) = g.vertices().find(|v| !members.contains(v)) {
            return Err(Error::InvalidPartition(format!("vertex {v} is not covered")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;
    use proptest::prelude::*;

    // x1..x7 -> 0..6
    fn set(vs: &[usize]) -> BTreeSet<usize> {
        vs.iter().map(|v| v - 1).collect()
    }

    fn edges1(es: &[(usize, usize)]) -> Vec<Edge> {
        let mut v: Vec<Edge> = es.iter().map(|&(a, b)| ordered(a - 1, b - 1)).collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn primer_interaction_graph() {
        let g = build_interaction_graph(&samples::primer());
        assert_eq!(
            g.edges(),
            edges1(&[(1, 2), (1, 3), (2, 3), (2, 4), (3, 4), (2, 5), (3, 6), (3, 7), (6, 7)])
        );
        assert_eq!(g, build_interaction_graph(&samples::unconstrained_tables()));
    }

    #[test]
    fn single_constraint_gives_complete_graph() {
        let mut p = crate::Problem::new();
        for i in 0..5 {
            p.add_binary(format!("v{i}"));
        }
        p.add_constraint((0..5).map(|v| (v, 1)).collect(), crate::Relation::Le, 2, "all");
        assert_eq!(build_interaction_graph(&p), InteractionGraph::complete(5));
    }

    #[test]
    fn serial_chain_is_a_path() {
        assert_eq!(build_interaction_graph(&samples::chain(6, true)), InteractionGraph::path(6));
    }

    #[test]
    fn neighborhoods() {
        let g = build_interaction_graph(&samples::primer());
        assert_eq!(g.neighborhood(&set(&[2]), NeighborhoodKind::Open).unwrap(), set(&[1, 3, 4, 5]));
        assert_eq!(g.neighborhood(&set(&[1, 2, 4]), NeighborhoodKind::Open).unwrap(), set(&[3, 5]));
        assert_eq!(
            g.neighborhood(&set(&[1, 2, 4]), NeighborhoodKind::Closed).unwrap(),
            set(&[1, 2, 3, 4, 5])
        );
        let all: BTreeSet<usize> = g.vertices().collect();
        assert!(g.neighborhood(&all, NeighborhoodKind::Open).unwrap().is_empty());
        assert_eq!(
            g.neighborhood(&[42].into(), NeighborhoodKind::Open),
            Err(Error::UnknownVertex(42))
        );
    }

    #[test]
    fn eliminating_x2_fills_its_neighborhood() {
        let g = build_interaction_graph(&samples::primer());
        let (h, fill) = g.eliminate_vertex(1).unwrap();
        assert_eq!(fill, edges1(&[(1, 4), (1, 5), (3, 5), (4, 5)]));
        assert!(!h.contains(1));
        assert_eq!(h.num_vertices(), 6);
        assert!(h.is_clique(&[0, 2, 3, 4]));
        assert_eq!(g.eliminate_vertex(9).unwrap_err(), Error::UnknownVertex(9));
    }

    #[test]
    fn degree_one_and_simplicial_vertices_add_no_fill() {
        let g = build_interaction_graph(&samples::primer());
        assert!(g.eliminate_vertex(4).unwrap().1.is_empty());
        // x6 is simplicial: neighbors x3, x7 are adjacent
        assert!(g.eliminate_vertex(5).unwrap().1.is_empty());
    }

    #[test]
    fn quotient_of_primer_partition() {
        let g = build_interaction_graph(&samples::primer());
        let p = Partition::new(vec![vec![4], vec![0, 1, 3], vec![5, 6], vec![2]]).unwrap();
        let q = g.quotient(&p).unwrap();
        assert_eq!(q.num_vertices(), 4);
        assert_eq!(q.edges(), vec![(0, 1), (1, 3), (2, 3)]);

        let whole = Partition::new(vec![(0..7).collect()]).unwrap();
        let q = g.quotient(&whole).unwrap();
        assert_eq!((q.num_vertices(), q.num_edges()), (1, 0));

        let bad = Partition::new(vec![vec![0, 1]]).unwrap();
        assert!(matches!(g.quotient(&bad), Err(Error::InvalidPartition(_))));
        assert!(Partition::new(vec![vec![0], vec![0]]).is_err());
        assert!(Partition::new(vec![vec![]]).is_err());
    }

    #[test]
    fn primer_indistinguishable_blocks() {
        let g = build_interaction_graph(&samples::primer());
        let closed = g.indistinguishable_partition(Indistinguishability::Closed);
        assert_eq!(closed.blocks(), &[vec![0], vec![1], vec![2], vec![3], vec![4], vec![5, 6]]);
        let open = g.indistinguishable_partition(Indistinguishability::Open);
        assert_eq!(open.blocks(), &[vec![0, 3], vec![1], vec![2], vec![4], vec![5], vec![6]]);
        let both = g.indistinguishable_partition(Indistinguishability::Union);
        assert_eq!(both.blocks(), &[vec![0, 3], vec![1], vec![2], vec![4], vec![5, 6]]);
    }

    #[test]
    fn edgeless_graph_open_twins_form_one_block() {
        let g = InteractionGraph::new(4);
        let p = g.indistinguishable_partition(Indistinguishability::Open);
        assert_eq!(p.blocks(), &[vec![0, 1, 2, 3]]);
    }

    #[test]
    fn chordality() {
        assert!(InteractionGraph::complete(3).is_chordal());
        assert!(!InteractionGraph::cycle(4).is_chordal());
        assert!(InteractionGraph::path(5).is_chordal());
        let mut filled = build_interaction_graph(&samples::primer());
        assert!(filled.is_chordal());
        filled.add_edge(0, 3);
        assert!(filled.is_chordal());
    }

    fn arb_graph() -> impl Strategy<Value = InteractionGraph> {
        (1usize..9).prop_flat_map(|n| {
            proptest::collection::vec((0..n, 0..n), 0..(n * 2)).prop_map(move |es| InteractionGraph::from_edges(n, es))
        })
    }

    fn connected(g: &InteractionGraph, a: usize, b: usize) -> bool {
        let mut seen = BTreeSet::from([a]);
        let mut stack = vec![a];
        while let Some(v) = stack.pop() {
            for &u in g.neighbors(v) {
                if seen.insert(u) {
                    stack.push(u);
                }
            }
        }
        seen.contains(&b)
    }

    proptest! {
        #[test]
        fn elimination_preserves_connectivity(g in arb_graph(), pick in 0usize..100) {
            let v = pick % g.num_vertices();
            let (h, fill) = g.eliminate_vertex(v).unwrap();
            for &(a, b) in &fill {
                prop_assert!(!g.has_edge(a, b));
            }
            for a in h.vertices() {
                for b in h.vertices() {
                    if connected(&g, a, b) {
                        prop_assert!(connected(&h, a, b));
                    }
                }
            }
        }

        #[test]
        fn singleton_quotient_is_identity(g in arb_graph()) {
            let q = g.quotient(&Partition::singletons(g.vertices())).unwrap();
            prop_assert_eq!(q, g);
        }

        #[test]
        fn twin_blocks_are_cliques_or_independent(g in arb_graph()) {
            for block in g.indistinguishable_partition(Indistinguishability::Closed).blocks() {
                prop_assert!(g.is_clique(block));
            }
            for block in g.indistinguishable_partition(Indistinguishability::Open).blocks() {
                for &u in block {
                    for &v in block {
                        prop_assert!(!g.has_edge(u, v));
                    }
                }
            }
        }
    }
}
