//! Quenched computations for a fixed environment.

mod rooted;
mod walk;

use std::sync::Arc;

use rand::Rng;

use crate::error::{Result, WalkError};
use crate::graph::{reverse_graph, DirectedGraph, EdgeId, EdgeWeights, VertexId};
use crate::linalg::{Lu, Matrix};
use crate::special::dirichlet_sample;
use crate::tol::RESIDUAL;

pub use rooted::RootedSolver;
pub use walk::{occupation_counts, visits_before_exit, visits_before_hit, Walker};

/// Transition probabilities `ω(e)` on the edges of a graph.
#[derive(Debug, Clone)]
pub struct Environment {
    graph: Arc<DirectedGraph>,
    prob: Vec<f64>,
}

impl Environment {
    pub fn new(graph: Arc<DirectedGraph>, prob: Vec<f64>) -> Result<Self> {
        if prob.len() != graph.edge_count() {
            return Err(WalkError::Structural(format!("{} probabilities for {} edges", prob.len(), graph.edge_count())));
        }
        if let Some(e) = prob.iter().position(|&p| !(p > 0.0 && p <= 1.0)) {
            return Err(WalkError::Parameter(format!("edge {e} has probability {} outside (0, 1]", prob[e])));
        }
        for v in 0..graph.vertex_count() {
            let out = graph.out_edges(v);
            if out.is_empty() {
                return Err(WalkError::Structural(format!("vertex {v} has no outgoing edge")));
            }
            let total: f64 = out.iter().map(|&e| prob[e]).sum();
            if (total - 1.0).abs() > RESIDUAL {
                return Err(WalkError::Parameter(format!("probabilities out of vertex {v} sum to {total}")));
            }
        }
        Ok(Self { graph, prob })
    }

    /// Normalizes positive edge weights vertex by vertex.
    pub fn from_weights(graph: Arc<DirectedGraph>, w: &[f64]) -> Result<Self> {
        if w.len() != graph.edge_count() {
            return Err(WalkError::Structural(format!("{} weights for {} edges", w.len(), graph.edge_count())));
        }
        let mut prob = vec![0.0; w.len()];
        for v in 0..graph.vertex_count() {
            let out = graph.out_edges(v);
            let total: f64 = out.iter().map(|&e| w[e]).sum();
            for &e in out {
                prob[e] = w[e] / total;
            }
        }
        Self::new(graph, prob)
    }

    /// One draw from the Dirichlet environment law with parameters `alpha`.
    pub fn sample_dirichlet<R: Rng + ?Sized>(graph: Arc<DirectedGraph>, alpha: &EdgeWeights, rng: &mut R) -> Result<Self> {
        alpha.check_graph(&graph)?;
        let mut prob = vec![0.0; graph.edge_count()];
        let mut shapes = Vec::new();
        for v in 0..graph.vertex_count() {
            let out = graph.out_edges(v);
            shapes.clear();
            shapes.extend(out.iter().map(|&e| alpha.get(e)));
            for (&e, p) in out.iter().zip(dirichlet_sample(&shapes, rng)?) {
                prob[e] = p;
            }
        }
        Self::new(graph, prob)
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn graph_arc(&self) -> &Arc<DirectedGraph> {
        &self.graph
    }

    pub fn prob(&self) -> &[f64] {
        &self.prob
    }

    pub fn edge_prob(&self, e: EdgeId) -> f64 {
        self.prob[e]
    }

    /// Dense kernel `P(x, y)`, parallel edges summed.
    pub fn transition_matrix(&self) -> Matrix {
        let n = self.graph.vertex_count();
        let mut p = Matrix::zeros(n, n);
        for (e, &(t, h)) in self.graph.edges().iter().enumerate() {
            p[(t, h)] += self.prob[e];
        }
        p
    }

    /// `max_y |Σ_x π(x) P(x, y) − π(y)|`.
    pub fn invariance_residual(&self, pi: &[f64]) -> f64 {
        let mut flow = vec![0.0; pi.len()];
        for (e, &(t, h)) in self.graph.edges().iter().enumerate() {
            flow[h] += pi[t] * self.prob[e];
        }
        flow.iter().zip(pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantMeasure {
    /// Mass-one invariant vector.
    pub pi: Vec<f64>,
    pub residual: f64,
}

/// Invariant probability of a strongly connected environment by state reduction
/// (Grassmann–Taksar–Heyman): states are censored one at a time and the pivot is the
/// mass leaving the state, so small entries of `π` keep their relative accuracy.
pub fn invariant_measure(env: &Environment) -> Result<InvariantMeasure> {
    let g = env.graph();
    g.require_strongly_connected()?;
    let n = g.vertex_count();
    let mut p = env.transition_matrix();
    let mut pivot = vec![0.0; n];
    for k in (1..n).rev() {
        let s: f64 = (0..k).map(|j| p[(k, j)]).sum();
        if !(s > 0.0) {
            return Err(WalkError::Numerical { message: format!("state {k} has no exit left during state reduction"), condition: f64::INFINITY });
        }
        pivot[k] = s;
        for i in 0..k {
            let f = p[(i, k)] / s;
            if f == 0.0 {
                continue;
            }
            for j in 0..k {
                p[(i, j)] += f * p[(k, j)];
            }
        }
    }
    let mut pi = vec![0.0; n];
    pi[0] = 1.0;
    for k in 1..n {
        pi[k] = (0..k).map(|i| pi[i] * p[(i, k)]).sum::<f64>() / pivot[k];
    }
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|x| *x /= total);
    let residual = env.invariance_residual(&pi);
    if residual >= RESIDUAL || pi.iter().any(|&x| !(x > 0.0)) {
        return Err(WalkError::Numerical { message: format!("invariant measure residual {residual:e}"), condition: kernel_condition(env) });
    }
    Ok(InvariantMeasure { pi, residual })
}

/// Condition estimate of `Pᵀ − I` with the normalization row, reported when a solve fails.
fn kernel_condition(env: &Environment) -> f64 {
    let n = env.graph().vertex_count();
    let mut a = env.transition_matrix().transpose();
    for i in 0..n {
        a[(i, i)] -= 1.0;
    }
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    Lu::new(&a).map(|lu| lu.condition_estimate()).unwrap_or(f64::INFINITY)
}

/// Gaussian elimination of `(I − Q) h = to_b` with the pivot of state `k` taken as the
/// mass it sends to states not yet eliminated and to the absorbing sets, never as
/// `1 − q(k,k)`. Every step then adds, multiplies or divides nonnegative numbers, so
/// small probabilities keep their relative accuracy.
fn eliminate(mut q: Matrix, mut to_a: Vec<f64>, mut to_b: Vec<f64>) -> Result<Vec<f64>> {
    let m = to_b.len();
    let mut pivot = vec![0.0; m];
    for k in 0..m {
        let s = to_a[k] + to_b[k] + (k + 1..m).map(|j| q[(k, j)]).sum::<f64>();
        if !(s > 0.0) {
            return Err(WalkError::Numerical { message: format!("state {k} has no exit left during elimination"), condition: f64::INFINITY });
        }
        pivot[k] = s;
        for i in k + 1..m {
            let f = q[(i, k)] / s;
            if f == 0.0 {
                continue;
            }
            q[(i, k)] = 0.0;
            for j in k + 1..m {
                q[(i, j)] += f * q[(k, j)];
            }
            to_a[i] += f * to_a[k];
            to_b[i] += f * to_b[k];
        }
    }
    let mut h = vec![0.0; m];
    for k in (0..m).rev() {
        h[k] = (to_b[k] + (k + 1..m).map(|j| q[(k, j)] * h[j]).sum::<f64>()) / pivot[k];
    }
    Ok(h)
}

/// `h(z) = P_z(H_B < H_A)` for every vertex, with `h = 1` on `B` and `0` on `A`.
pub fn absorption_prob(env: &Environment, a: &[bool], b: &[bool]) -> Result<Vec<f64>> {
    let g = env.graph();
    let n = g.vertex_count();
    if a.len() != n || b.len() != n {
        return Err(WalkError::Structural("absorbing masks do not match the graph".into()));
    }
    if a.iter().zip(b).any(|(&x, &y)| x && y) {
        return Err(WalkError::Parameter("absorbing sets overlap".into()));
    }
    let target: Vec<bool> = a.iter().zip(b).map(|(&x, &y)| x || y).collect();
    let reach = g.can_reach(&target);
    if let Some(v) = reach.iter().position(|&r| !r) {
        return Err(WalkError::Structural(format!("vertex {v} cannot reach the absorbing set")));
    }
    let free: Vec<VertexId> = (0..n).filter(|&v| !target[v]).collect();
    let mut index = vec![usize::MAX; n];
    for (k, &v) in free.iter().enumerate() {
        index[v] = k;
    }
    let m = free.len();
    let mut h = vec![0.0; n];
    for v in 0..n {
        if b[v] {
            h[v] = 1.0;
        }
    }
    if m > 0 {
        // kernel among free states plus the mass sent straight to A and to B
        let mut q = Matrix::zeros(m, m);
        let mut to_a = vec![0.0; m];
        let mut to_b = vec![0.0; m];
        for (k, &z) in free.iter().enumerate() {
            for &e in g.out_edges(z) {
                let y = g.head(e);
                if b[y] {
                    to_b[k] += env.prob[e];
                } else if a[y] {
                    to_a[k] += env.prob[e];
                } else {
                    q[(k, index[y])] += env.prob[e];
                }
            }
        }
        let sol = eliminate(q, to_a, to_b)?;
        for (k, &z) in free.iter().enumerate() {
            h[z] = sol[k].min(1.0);
        }
    }
    Ok(h)
}

/// `P_x(H_y < H_x⁺)`: the walk from `x` reaches `y` before returning to `x`.
pub fn hitting_prob(env: &Environment, x: VertexId, y: VertexId) -> Result<f64> {
    let g = env.graph();
    g.check_vertex(x)?;
    g.check_vertex(y)?;
    if x == y {
        return Err(WalkError::Parameter(format!("hitting probability needs distinct vertices, got {x} twice")));
    }
    g.require_strongly_connected()?;
    let n = g.vertex_count();
    let mut a = vec![false; n];
    let mut b = vec![false; n];
    a[x] = true;
    b[y] = true;
    let h = absorption_prob(env, &a, &b)?;
    Ok(g.out_edges(x).iter().map(|&e| env.prob[e] * h[g.head(e)]).sum())
}

/// Green function of the walk killed on leaving `subset`, indexed in the order of `subset`.
pub fn green_matrix(env: &Environment, subset: &[VertexId]) -> Result<Matrix> {
    let g = env.graph();
    let n = g.vertex_count();
    let mut index = vec![usize::MAX; n];
    for (k, &v) in subset.iter().enumerate() {
        g.check_vertex(v)?;
        if index[v] != usize::MAX {
            return Err(WalkError::Parameter(format!("vertex {v} repeated in subset")));
        }
        index[v] = k;
    }
    let outside: Vec<bool> = index.iter().map(|&k| k == usize::MAX).collect();
    let reach = g.can_reach(&outside);
    if let Some(&v) = subset.iter().find(|&&v| !reach[v]) {
        return Err(WalkError::Structural(format!("the walk from {v} never leaves the subset")));
    }
    let m = subset.len();
    let mut a = Matrix::identity(m);
    for (k, &z) in subset.iter().enumerate() {
        for &e in g.out_edges(z) {
            let y = g.head(e);
            if index[y] != usize::MAX {
                a[(k, index[y])] -= env.prob[e];
            }
        }
    }
    Ok(Lu::new(&a)?.inverse())
}

/// Kernel of `env` restricted to `subset` (rows and columns in subset order).
pub fn restricted_kernel(env: &Environment, subset: &[VertexId]) -> Matrix {
    let g = env.graph();
    let mut index = vec![usize::MAX; g.vertex_count()];
    for (k, &v) in subset.iter().enumerate() {
        index[v] = k;
    }
    let mut q = Matrix::zeros(subset.len(), subset.len());
    for (k, &z) in subset.iter().enumerate() {
        for &e in g.out_edges(z) {
            let y = g.head(e);
            if index[y] != usize::MAX {
                q[(k, index[y])] += env.prob[e];
            }
        }
    }
    q
}

/// Time reversal `ω̌(y, x) = π(x) ω(x, y) / π(y)` on the reversed graph; edge ids are kept.
pub fn reversed_environment(env: &Environment) -> Result<Environment> {
    let pi = invariant_measure(env)?.pi;
    let g = env.graph();
    let prob = g.edges().iter().enumerate().map(|(e, &(x, y))| pi[x] * env.prob[e] / pi[y]).collect::<Vec<_>>();
    let reversed = Arc::new(reverse_graph(g));
    // renormalize away rounding so the row sums sit well inside the validation tolerance
    let mut fixed = prob;
    for v in 0..reversed.vertex_count() {
        let total: f64 = reversed.out_edges(v).iter().map(|&e| fixed[e]).sum();
        for &e in reversed.out_edges(v) {
            fixed[e] /= total;
        }
    }
    Environment::new(reversed, fixed)
}

/// `P_x(H_b < H_a)` for the nearest-neighbour walk on `{a, …, b}` with odds
/// `ρ(i) = ω(i, i−1) / ω(i, i+1)`, read as `rho[i]` for `a < i < b`.
pub fn gambler_ruin(rho: &[f64], a: usize, x: usize, b: usize) -> Result<f64> {
    if !(a <= x && x <= b && a < b) {
        return Err(WalkError::Parameter(format!("gambler's ruin needs a ≤ x ≤ b with a < b, got ({a}, {x}, {b})")));
    }
    if rho.len() < b {
        return Err(WalkError::Parameter(format!("ρ is defined up to {}, need {}", rho.len().saturating_sub(1), b - 1)));
    }
    if let Some(i) = (a + 1..b).find(|&i| !(rho[i] > 0.0 && rho[i].is_finite())) {
        return Err(WalkError::Parameter(format!("ρ({i}) = {} is not positive", rho[i])));
    }
    // terms ∏_{a<i≤k} ρ(i) for a ≤ k < b, kept in logs
    let mut logs = Vec::with_capacity(b - a);
    let mut acc = 0.0;
    logs.push(0.0);
    for i in a + 1..b {
        acc += rho[i].ln();
        logs.push(acc);
    }
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let num: f64 = weights[..x - a].iter().sum();
    let den: f64 = weights.iter().sum();
    Ok(num / den)
}
