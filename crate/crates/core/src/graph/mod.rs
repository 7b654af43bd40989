//! Directed multigraphs with per-edge weights.

mod builders;
mod interchange;
pub mod lattice;

pub use builders::{build_random_strongly_connected, build_segment, build_torus, build_torus_star, build_two_cycle, segment_weights, Torus};
pub use interchange::GraphDocument;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};

pub type VertexId = usize;
pub type EdgeId = usize;

/// Optional coordinate tag attached to a vertex by the lattice builders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VertexLabel {
    Site([i32; 2]),
    Named(SpecialVertex),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpecialVertex {
    Cemetery,
}

/// A finite directed multigraph. Parallel edges and self-loops are allowed.
///
/// Edges are identified by their position in the edge list; the adjacency
/// lists are derived from it at construction and never mutated.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedGraph {
    vertex_count: usize,
    edges: Vec<(VertexId, VertexId)>,
    out_adj: Vec<Vec<EdgeId>>,
    in_adj: Vec<Vec<EdgeId>>,
    labels: Option<Vec<VertexLabel>>,
}

impl DirectedGraph {
    pub fn new(vertex_count: usize, edges: Vec<(VertexId, VertexId)>) -> Result<Self> {
        let mut out_adj = vec![Vec::new(); vertex_count];
        let mut in_adj = vec![Vec::new(); vertex_count];
        for (id, &(tail, head)) in edges.iter().enumerate() {
            if tail >= vertex_count || head >= vertex_count {
                return Err(WalkError::Structural(format!("edge {id} = ({tail}, {head}) references a vertex outside 0..{vertex_count}")));
            }
            out_adj[tail].push(id);
            in_adj[head].push(id);
        }
        Ok(Self { vertex_count, edges, out_adj, in_adj, labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<VertexLabel>) -> Result<Self> {
        if labels.len() != self.vertex_count {
            return Err(WalkError::Structural(format!("{} labels for {} vertices", labels.len(), self.vertex_count)));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e]
    }

    pub fn tail(&self, e: EdgeId) -> VertexId {
        self.edges[e].0
    }

    pub fn head(&self, e: EdgeId) -> VertexId {
        self.edges[e].1
    }

    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out_adj[v]
    }

    pub fn in_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.in_adj[v]
    }

    pub fn labels(&self) -> Option<&[VertexLabel]> {
        self.labels.as_deref()
    }

    pub fn label(&self, v: VertexId) -> Option<VertexLabel> {
        self.labels.as_ref().map(|l| l[v])
    }

    pub fn find_label(&self, label: VertexLabel) -> Option<VertexId> {
        self.labels.as_ref()?.iter().position(|&l| l == label)
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v < self.vertex_count {
            Ok(())
        } else {
            Err(WalkError::Parameter(format!("vertex {v} outside 0..{}", self.vertex_count)))
        }
    }

    /// Vertices reachable from `start` following edges forward (or backward).
    fn reach(&self, start: VertexId, forward: bool) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            let adj = if forward { &self.out_adj[v] } else { &self.in_adj[v] };
            for &e in adj {
                let w = if forward { self.edges[e].1 } else { self.edges[e].0 };
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    pub fn is_strongly_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return false;
        }
        self.reach(0, true).iter().all(|&b| b) && self.reach(0, false).iter().all(|&b| b)
    }

    pub fn require_strongly_connected(&self) -> Result<()> {
        if self.is_strongly_connected() {
            Ok(())
        } else {
            Err(WalkError::Structural("graph is not strongly connected".into()))
        }
    }

    /// Vertices from which some vertex of `targets` is reachable.
    pub fn can_reach(&self, targets: &[bool]) -> Vec<bool> {
        let mut seen = targets.to_vec();
        let mut stack: Vec<VertexId> = (0..self.vertex_count).filter(|&v| targets[v]).collect();
        while let Some(v) = stack.pop() {
            for &e in &self.in_adj[v] {
                let w = self.edges[e].0;
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }
}

/// Positive weight per edge (the Dirichlet parameters).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeWeights {
    alpha: Vec<f64>,
}

impl EdgeWeights {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if let Some((e, &a)) = alpha.iter().enumerate().find(|(_, a)| !(a.is_finite() && **a > 0.0)) {
            return Err(WalkError::Parameter(format!("edge weight {e} = {a} is not strictly positive")));
        }
        Ok(Self { alpha })
    }

    pub fn for_graph(g: &DirectedGraph, alpha: Vec<f64>) -> Result<Self> {
        let w = Self::new(alpha)?;
        w.check_graph(g)?;
        Ok(w)
    }

    pub fn check_graph(&self, g: &DirectedGraph) -> Result<()> {
        if self.alpha.len() != g.edge_count() {
            return Err(WalkError::Structural(format!("{} weights for {} edges", self.alpha.len(), g.edge_count())));
        }
        Ok(())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.alpha
    }

    pub fn get(&self, e: EdgeId) -> f64 {
        self.alpha[e]
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    /// α(x): total weight of the out-edges of `v`.
    pub fn vertex_weight(&self, g: &DirectedGraph, v: VertexId) -> f64 {
        g.out_edges(v).iter().map(|&e| self.alpha[e]).sum()
    }

    pub fn vertex_weights(&self, g: &DirectedGraph) -> Vec<f64> {
        (0..g.vertex_count()).map(|v| self.vertex_weight(g, v)).collect()
    }
}

/// Per-vertex value of the divergence operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceMap {
    pub value: Vec<f64>,
}

impl DivergenceMap {
    pub fn total(&self) -> f64 {
        self.value.iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.value.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Out-weight minus in-weight at every vertex.
pub fn divergence(g: &DirectedGraph, a: &EdgeWeights) -> Result<DivergenceMap> {
    a.check_graph(g)?;
    let mut value = vec![0.0; g.vertex_count()];
    for (e, &(tail, head)) in g.edges().iter().enumerate() {
        value[tail] += a.get(e);
        value[head] -= a.get(e);
    }
    Ok(DivergenceMap { value })
}

/// Edge `(x, y)` becomes `(y, x)` with the same id and weight.
pub fn reverse(g: &DirectedGraph, a: &EdgeWeights) -> Result<(DirectedGraph, EdgeWeights)> {
    a.check_graph(g)?;
    Ok((reverse_graph(g), a.clone()))
}

pub fn reverse_graph(g: &DirectedGraph) -> DirectedGraph {
    let edges = g.edges().iter().map(|&(t, h)| (h, t)).collect();
    let mut r = DirectedGraph::new(g.vertex_count(), edges).expect("reversal preserves validity");
    r.labels = g.labels.clone();
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divergence_on_segment_with_drift() {
        let g = build_segment(1).unwrap();
        let (a, gamma) = (1.5, 0.25);
        let w = EdgeWeights::for_graph(&g, vec![a + gamma, a]).unwrap();
        let d = divergence(&g, &w).unwrap();
        assert!((d.value[0] - gamma).abs() < 1e-15);
        assert!((d.value[1] + gamma).abs() < 1e-15);
    }

    #[test]
    fn divergence_length_mismatch_is_structural() {
        let g = build_segment(2).unwrap();
        let w = EdgeWeights::new(vec![1.0; 3]).unwrap();
        assert!(matches!(divergence(&g, &w), Err(WalkError::Structural(_))));
    }

    #[test]
    fn rejects_dangling_edges_and_bad_weights() {
        assert!(DirectedGraph::new(2, vec![(0, 2)]).is_err());
        assert!(EdgeWeights::new(vec![1.0, 0.0]).is_err());
        assert!(EdgeWeights::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn adjacency_inverts_edge_list() {
        let g = build_segment(5).unwrap();
        for v in 0..g.vertex_count() {
            for &e in g.out_edges(v) {
                assert_eq!(g.tail(e), v);
            }
            for &e in g.in_edges(v) {
                assert_eq!(g.head(e), v);
            }
        }
        let total_out: usize = (0..g.vertex_count()).map(|v| g.out_edges(v).len()).sum();
        assert_eq!(total_out, g.edge_count());
        assert_eq!(g.out_edges(0).len(), 1);
        assert_eq!(g.out_edges(5).len(), 1);
        assert!((1..5).all(|v| g.out_edges(v).len() == 2));
    }

    #[test]
    fn strong_connectivity() {
        assert!(build_segment(3).unwrap().is_strongly_connected());
        let g = DirectedGraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        assert!(!g.is_strongly_connected());
        assert!(g.require_strongly_connected().is_err());
    }

    #[test]
    fn reversed_torus_pairs_opposite_directions() {
        let alpha = [1.0, 2.0, 3.0, 4.0];
        let (g, w) = build_torus(2, alpha).unwrap();
        let (rg, rw) = reverse(&g, &w).unwrap();
        let torus = Torus::new(2);
        for v in 0..g.vertex_count() {
            for dir in 0..4 {
                // the reversed edge leaving v in direction dir is the image of the
                // original edge arriving at v from direction dir + 2
                let src = torus.step(v, (dir + 2) % 4);
                let e = torus.edge(src, dir);
                assert_eq!(rg.edge(e), (v, src));
                assert_eq!(rw.get(e), alpha[dir]);
            }
        }
        assert_eq!(rg.edge_count(), g.edge_count());
    }
}
