use rand::seq::SliceRandom;
use rand::Rng;

use super::{DirectedGraph, EdgeWeights, SpecialVertex, VertexId, VertexLabel};
use crate::error::{Result, WalkError};

/// Unit steps of the square lattice: e1, e2, -e1, -e2. Direction `i + 2` reverses `i`.
pub const DIRECTIONS: [[i32; 2]; 4] = [[1, 0], [0, 1], [-1, 0], [0, -1]];

/// Index arithmetic for the torus `(Z/2NZ)^2` centred so that labels lie in `[-N, N-1]^2`.
///
/// Vertex `v` has label `(x, y)` with `v = (x + N) + 2N (y + N)`; its out-edge in
/// direction `d` has id `4 v + d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Torus {
    pub n: usize,
}

impl Torus {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn side(&self) -> usize {
        2 * self.n
    }

    pub fn site_count(&self) -> usize {
        self.side() * self.side()
    }

    pub fn wrap(&self, c: i64) -> i32 {
        let side = self.side() as i64;
        let n = self.n as i64;
        ((c + n).rem_euclid(side) - n) as i32
    }

    pub fn vertex(&self, p: [i32; 2]) -> VertexId {
        let side = self.side() as i64;
        let n = self.n as i64;
        let x = (p[0] as i64 + n).rem_euclid(side);
        let y = (p[1] as i64 + n).rem_euclid(side);
        (x + side * y) as usize
    }

    pub fn label(&self, v: VertexId) -> [i32; 2] {
        let side = self.side();
        let n = self.n as i32;
        [(v % side) as i32 - n, (v / side) as i32 - n]
    }

    pub fn step(&self, v: VertexId, dir: usize) -> VertexId {
        let [x, y] = self.label(v);
        let d = DIRECTIONS[dir];
        self.vertex([x + d[0], y + d[1]])
    }

    pub fn translate(&self, v: VertexId, by: [i32; 2]) -> VertexId {
        let [x, y] = self.label(v);
        self.vertex([x + by[0], y + by[1]])
    }

    pub fn edge(&self, v: VertexId, dir: usize) -> usize {
        4 * v + dir
    }

    /// Graph distance on the torus (periodic l1 distance).
    pub fn distance(&self, a: VertexId, b: VertexId) -> usize {
        let (pa, pb) = (self.label(a), self.label(b));
        let side = self.side() as i32;
        (0..2)
            .map(|k| {
                let d = (pa[k] - pb[k]).rem_euclid(side);
                d.min(side - d) as usize
            })
            .sum()
    }

    /// Vertices listed so that lattice neighbours sit at most `2·side` apart, wrap-around
    /// included: each coordinate runs 0, side−1, 1, side−2, … . Returns the order
    /// (without `skip`, if given) and that bandwidth.
    pub fn folded_order(&self, skip: Option<VertexId>) -> (Vec<VertexId>, usize) {
        let side = self.side();
        let fold: Vec<usize> = (0..side).map(|k| if k % 2 == 0 { k / 2 } else { side - 1 - k / 2 }).collect();
        let mut order = Vec::with_capacity(self.site_count());
        for &cy in &fold {
            for &cx in &fold {
                let v = cx + side * cy;
                if Some(v) != skip {
                    order.push(v);
                }
            }
        }
        (order, 2 * side)
    }
}

fn check_alpha4(alpha: [f64; 4]) -> Result<()> {
    if alpha.iter().all(|a| a.is_finite() && *a > 0.0) {
        Ok(())
    } else {
        Err(WalkError::Parameter(format!("lattice weights {alpha:?} must be positive")))
    }
}

/// Torus `T_N` with 4N² vertices and translation-invariant weights `alpha[d]` on
/// direction `d`. For N = 1 the ±e_i neighbours coincide and the parallel edges are kept.
pub fn build_torus(n: usize, alpha: [f64; 4]) -> Result<(DirectedGraph, EdgeWeights)> {
    if n == 0 {
        return Err(WalkError::Parameter("torus half-width N must be at least 1".into()));
    }
    check_alpha4(alpha)?;
    let torus = Torus::new(n);
    let sites = torus.site_count();
    let mut edges = Vec::with_capacity(4 * sites);
    let mut weights = Vec::with_capacity(4 * sites);
    for v in 0..sites {
        for (dir, &a) in alpha.iter().enumerate() {
            edges.push((v, torus.step(v, dir)));
            weights.push(a);
        }
    }
    let labels = (0..sites).map(|v| VertexLabel::Site(torus.label(v))).collect();
    let g = DirectedGraph::new(sites, edges)?.with_labels(labels)?;
    Ok((g, EdgeWeights::new(weights)?))
}

/// Torus with cemetery `T_N^*`: one extra vertex `∂` (id `4N²`) joined to every torus
/// vertex in both directions by edges of weight `eps`.
///
/// Edge layout: the 16N² torus edges first, then `v → ∂` for every v, then `∂ → v`.
pub fn build_torus_star(n: usize, alpha: [f64; 4], eps: f64) -> Result<(DirectedGraph, EdgeWeights)> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(WalkError::Parameter(format!("cemetery weight eps = {eps} must be positive")));
    }
    let (torus_graph, torus_weights) = build_torus(n, alpha)?;
    let sites = torus_graph.vertex_count();
    let cemetery = sites;
    let mut edges = torus_graph.edges().to_vec();
    let mut weights = torus_weights.as_slice().to_vec();
    edges.extend((0..sites).map(|v| (v, cemetery)));
    edges.extend((0..sites).map(|v| (cemetery, v)));
    weights.extend(std::iter::repeat_n(eps, 2 * sites));
    let mut labels = torus_graph.labels().expect("torus is labelled").to_vec();
    labels.push(VertexLabel::Named(SpecialVertex::Cemetery));
    let g = DirectedGraph::new(sites + 1, edges)?.with_labels(labels)?;
    Ok((g, EdgeWeights::new(weights)?))
}

/// Segment `{0, …, n}` with nearest-neighbour edges; edge `2i` is `i → i+1`, edge `2i+1` is `i+1 → i`.
pub fn build_segment(n: usize) -> Result<DirectedGraph> {
    if n == 0 {
        return Err(WalkError::Parameter("segment length must be at least 1".into()));
    }
    let edges = (0..n).flat_map(|i| [(i, i + 1), (i + 1, i)]).collect();
    let labels = (0..=n).map(|i| VertexLabel::Site([i as i32, 0])).collect();
    DirectedGraph::new(n + 1, edges)?.with_labels(labels)
}

/// Weights `right` on every `i → i+1` edge and `left` on every `i+1 → i` edge.
pub fn segment_weights(n: usize, right: f64, left: f64) -> Result<EdgeWeights> {
    EdgeWeights::new((0..n).flat_map(|_| [right, left]).collect())
}

/// Two vertices joined by `0 → 1` (weight `a1`) and `1 → 0` (weight `a2`).
pub fn build_two_cycle(a1: f64, a2: f64) -> Result<(DirectedGraph, EdgeWeights)> {
    let g = DirectedGraph::new(2, vec![(0, 1), (1, 0)])?;
    Ok((g, EdgeWeights::new(vec![a1, a2])?))
}

/// A random cycle through all `n` vertices plus `extra` uniformly placed edges
/// (self-loops and parallel edges allowed), hence strongly connected.
pub fn build_random_strongly_connected<R: Rng + ?Sized>(n: usize, extra: usize, rng: &mut R) -> Result<DirectedGraph> {
    if n < 2 {
        return Err(WalkError::Parameter("need at least two vertices".into()));
    }
    let mut cycle: Vec<VertexId> = (0..n).collect();
    cycle.shuffle(rng);
    let mut edges: Vec<(VertexId, VertexId)> = (0..n).map(|k| (cycle[k], cycle[(k + 1) % n])).collect();
    edges.extend((0..extra).map(|_| (rng.random_range(0..n), rng.random_range(0..n))));
    DirectedGraph::new(n, edges)
}
