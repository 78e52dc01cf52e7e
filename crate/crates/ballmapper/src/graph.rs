//! Ball-mapper graphs and the filtered nerve of a cover.
//!
//! The [`BmGraph`] has one vertex per ball center; two vertices are joined
//! when some point lies in both balls, and the edge weight counts those
//! shared witnesses. [`build_nerve`] extends the same idea to higher-order
//! intersections, recording for every center subset (up to a dimension cap)
//! how many points all of its balls share; that witness count is the
//! simplex's filtration value.

use std::collections::BTreeMap;
use std::str::FromStr;

use itertools::Itertools;
use thiserror::Error;

use crate::cover::CoverVector;
use crate::scalar::Scalar;
use crate::union_find::UnionFind;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error(
        "point {point} is covered by {covers} centers, exceeding the nerve guard of {guard}; \
         raise the guard or shrink the radius"
    )]
    CoverTooDense {
        point: usize,
        covers: usize,
        guard: usize,
    },
    #[error("max_dim must be at least 1, got {0}")]
    InvalidMaxDim(usize),
    #[error("attribute column has length {found}, expected {expected}")]
    AttributeLength { found: usize, expected: usize },
    #[error("attribute entry for point {row} is not finite")]
    NonFiniteAttribute { row: usize },
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("unknown aggregator {0:?}; expected mean, min, or max")]
    UnknownAggregator(String),
}

/// A ball of the cover: vertex `id` in 0..V, the index of its center point,
/// and the sorted list of points it covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: usize,
    pub center: usize,
    pub covered: Vec<usize>,
}

impl Vertex {
    /// Number of points the ball covers.
    pub fn size(&self) -> usize {
        self.covered.len()
    }
}

/// Undirected edge with `u < v`; weight counts the points covered by both
/// endpoint balls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: usize,
}

/// The ball-mapper graph of a cover at one radius.
#[derive(Debug, Clone, PartialEq)]
pub struct BmGraph<T> {
    epsilon: T,
    n_points: usize,
    partial_cover: bool,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

impl<T: Scalar> BmGraph<T> {
    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    /// Number of points in the underlying cloud.
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// True when the vertices no longer cover every point (after density
    /// filtering); operations that assume total coverage should reject such
    /// graphs.
    pub fn partial_cover(&self) -> bool {
        self.partial_cover
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// Edges sorted by (u, v).
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Neighbor count per vertex.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.vertices.len()];
        for e in &self.edges {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        deg
    }

    /// Rebuilds a graph from parts; used by the JSON reader. Callers are
    /// trusted to supply edges sorted by (u, v) with u < v.
    pub(crate) fn from_parts(
        epsilon: T,
        n_points: usize,
        partial_cover: bool,
        vertices: Vec<Vertex>,
        edges: Vec<Edge>,
    ) -> Self {
        BmGraph {
            epsilon,
            n_points,
            partial_cover,
            vertices,
            edges,
        }
    }
}

/// Builds the ball-mapper graph: one vertex per center, an edge for every
/// pair of balls sharing at least one point, weighted by the share count.
pub fn build_bm_graph<T: Scalar>(cover: &CoverVector<T>) -> BmGraph<T> {
    let n = cover.len();
    let centers = cover.centers();
    let v = centers.len();
    let mut vertex_of_center = vec![usize::MAX; n];
    for (id, &c) in centers.iter().enumerate() {
        vertex_of_center[c] = id;
    }

    let mut vertices: Vec<Vertex> = centers
        .iter()
        .enumerate()
        .map(|(id, &center)| Vertex {
            id,
            center,
            covered: Vec::new(),
        })
        .collect();
    for x in 0..n {
        for &c in cover.cover_of(x) {
            vertices[vertex_of_center[c]].covered.push(x);
        }
    }

    // Accumulate witness counts per vertex pair. A dense triangular table
    // is cheapest for the vertex counts this library targets; fall back to
    // a map when the cover is unusually fine.
    let mut edges = Vec::new();
    if v <= 2048 {
        let mut weight = vec![0usize; v * v];
        for x in 0..n {
            let list = cover.cover_of(x);
            for (i, &a) in list.iter().enumerate() {
                for &b in &list[i + 1..] {
                    let (mut p, mut q) = (vertex_of_center[a], vertex_of_center[b]);
                    if p > q {
                        std::mem::swap(&mut p, &mut q);
                    }
                    weight[p * v + q] += 1;
                }
            }
        }
        for p in 0..v {
            for q in p + 1..v {
                let w = weight[p * v + q];
                if w > 0 {
                    edges.push(Edge { u: p, v: q, weight: w });
                }
            }
        }
    } else {
        let mut weight: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for x in 0..n {
            let list = cover.cover_of(x);
            for (i, &a) in list.iter().enumerate() {
                for &b in &list[i + 1..] {
                    let (mut p, mut q) = (vertex_of_center[a], vertex_of_center[b]);
                    if p > q {
                        std::mem::swap(&mut p, &mut q);
                    }
                    *weight.entry((p, q)).or_insert(0) += 1;
                }
            }
        }
        edges.extend(weight.into_iter().map(|((u, v), w)| Edge { u, v, weight: w }));
    }

    BmGraph {
        epsilon: cover.epsilon(),
        n_points: n,
        partial_cover: false,
        vertices,
        edges,
    }
}

/// Filtered nerve of a cover: simplices keyed by sorted center point-index
/// tuples, valued by their witness count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NerveComplex {
    max_dim: usize,
    simplices: BTreeMap<Vec<usize>, usize>,
}

impl NerveComplex {
    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn simplices(&self) -> &BTreeMap<Vec<usize>, usize> {
        &self.simplices
    }

    /// Witness count of a simplex given as a sorted center tuple.
    pub fn filtration(&self, simplex: &[usize]) -> Option<usize> {
        self.simplices.get(simplex).copied()
    }

    /// Number of simplices of each dimension, indexed 0..=max_dim.
    pub fn counts_by_dim(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.max_dim + 1];
        for key in self.simplices.keys() {
            counts[key.len() - 1] += 1;
        }
        counts
    }
}

/// Enumerates the nerve up to dimension `max_dim`. Every point contributes
/// all subsets of its cover list with at most `max_dim + 1` centers;
/// `max_covers_per_point` guards against the exponential blowup of a point
/// buried under too many balls.
pub fn build_nerve<T: Scalar>(
    cover: &CoverVector<T>,
    max_dim: usize,
    max_covers_per_point: usize,
) -> Result<NerveComplex, GraphError> {
    if max_dim == 0 {
        return Err(GraphError::InvalidMaxDim(max_dim));
    }
    for (point, list) in cover.covers().iter().enumerate() {
        if list.len() > max_covers_per_point {
            return Err(GraphError::CoverTooDense {
                point,
                covers: list.len(),
                guard: max_covers_per_point,
            });
        }
    }
    let mut simplices: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for list in cover.covers() {
        let top = list.len().min(max_dim + 1);
        for k in 1..=top {
            for subset in list.iter().copied().combinations(k) {
                *simplices.entry(subset).or_insert(0) += 1;
            }
        }
    }
    Ok(NerveComplex { max_dim, simplices })
}

/// How a coloring folds the attribute values of a ball's points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregator {
    Mean,
    Min,
    Max,
}

impl Aggregator {
    pub fn name(self) -> &'static str {
        match self {
            Aggregator::Mean => "mean",
            Aggregator::Min => "min",
            Aggregator::Max => "max",
        }
    }
}

impl FromStr for Aggregator {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, GraphError> {
        match s {
            "mean" => Ok(Aggregator::Mean),
            "min" => Ok(Aggregator::Min),
            "max" => Ok(Aggregator::Max),
            other => Err(GraphError::UnknownAggregator(other.to_string())),
        }
    }
}

/// Per-vertex aggregate of a point attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexColoring<T> {
    attribute: String,
    aggregator: Aggregator,
    values: Vec<T>,
}

impl<T: Scalar> VertexColoring<T> {
    pub fn attribute(&self) -> &str {
        &self.attribute
    }

    pub fn aggregator(&self) -> Aggregator {
        self.aggregator
    }

    /// One value per vertex, in vertex-id order.
    pub fn values(&self) -> &[T] {
        &self.values
    }
}

/// Aggregates `attribute` over each vertex's covered points (not over the
/// centers alone).
pub fn vertex_coloring<T: Scalar>(
    graph: &BmGraph<T>,
    name: &str,
    attribute: &[T],
    aggregator: Aggregator,
) -> Result<VertexColoring<T>, GraphError> {
    if attribute.len() != graph.n_points() {
        return Err(GraphError::AttributeLength {
            found: attribute.len(),
            expected: graph.n_points(),
        });
    }
    if let Some(row) = attribute.iter().position(|v| !v.is_finite()) {
        return Err(GraphError::NonFiniteAttribute { row });
    }
    let values = graph
        .vertices()
        .iter()
        .map(|vertex| {
            let points = vertex.covered.iter().map(|&x| attribute[x]);
            match aggregator {
                Aggregator::Mean => {
                    let sum = points.fold(T::zero(), |a, v| a + v);
                    sum / T::from_count(vertex.size())
                }
                Aggregator::Min => points.fold(T::infinity(), T::min),
                Aggregator::Max => points.fold(T::neg_infinity(), T::max),
            }
        })
        .collect();
    Ok(VertexColoring {
        attribute: name.to_string(),
        aggregator,
        values,
    })
}

/// Connected components via union-find; labels are the smallest vertex id
/// in each component.
pub fn connected_components<T: Scalar>(graph: &BmGraph<T>) -> (usize, Vec<usize>) {
    let mut uf = UnionFind::new(graph.vertex_count());
    for e in graph.edges() {
        uf.union(e.u, e.v);
    }
    (uf.components(), uf.labels())
}

/// First Betti number of the graph: E − V + C.
pub fn cycle_rank<T: Scalar>(graph: &BmGraph<T>) -> usize {
    let (components, _) = connected_components(graph);
    graph.edge_count() + components - graph.vertex_count()
}

/// Drops every ball covering fewer than `n_min` points, along with its
/// edges. Vertex ids are reassigned densely; center indices and covered
/// sets are preserved. The result is flagged as a partial cover when the
/// surviving balls no longer reach every point.
pub fn filter_low_density<T: Scalar>(graph: &BmGraph<T>, n_min: usize) -> BmGraph<T> {
    let mut new_id = vec![usize::MAX; graph.vertex_count()];
    let mut vertices = Vec::new();
    for vertex in graph.vertices() {
        if vertex.size() >= n_min {
            new_id[vertex.id] = vertices.len();
            vertices.push(Vertex {
                id: vertices.len(),
                center: vertex.center,
                covered: vertex.covered.clone(),
            });
        }
    }
    let edges = graph
        .edges()
        .iter()
        .filter(|e| new_id[e.u] != usize::MAX && new_id[e.v] != usize::MAX)
        .map(|e| Edge {
            u: new_id[e.u],
            v: new_id[e.v],
            weight: e.weight,
        })
        .collect();
    let mut reached = vec![false; graph.n_points()];
    for vertex in &vertices {
        for &x in &vertex.covered {
            reached[x] = true;
        }
    }
    let partial_cover = reached.iter().any(|&r| !r);
    BmGraph {
        epsilon: graph.epsilon(),
        n_points: graph.n_points(),
        partial_cover,
        vertices,
        edges,
    }
}
