use super::Environment;
use crate::error::{Result, WalkError};
use crate::graph::VertexId;
use crate::linalg::{BandLu, Lu, Matrix};
use crate::tol::RESIDUAL;

enum Factor {
    Dense(Lu),
    Band(BandLu),
}

impl Factor {
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        match self {
            Factor::Dense(lu) => lu.solve(b),
            Factor::Band(lu) => lu.solve(b),
        }
    }

    fn solve_transposed(&self, b: &[f64]) -> Vec<f64> {
        match self {
            Factor::Dense(lu) => lu.solve_transposed(b),
            Factor::Band(lu) => lu.solve_transposed(b),
        }
    }
}

/// One factorization of `I − Q`, `Q` the kernel killed at a root vertex, reused for
/// every hitting probability involving the root and for the pinned invariant measure.
pub struct RootedSolver<'a> {
    env: &'a Environment,
    root: VertexId,
    // position of each non-root vertex in the factored system
    position: Vec<usize>,
    order: Vec<VertexId>,
    factor: Factor,
}

impl<'a> RootedSolver<'a> {
    pub fn dense(env: &'a Environment, root: VertexId) -> Result<Self> {
        let order: Vec<VertexId> = (0..env.graph().vertex_count()).filter(|&v| v != root).collect();
        Self::build(env, root, order, None)
    }

    /// Banded factorization without pivoting, with unknowns arranged in `order`
    /// (every vertex except `root`) and half-bandwidth `band` in that order.
    pub fn banded(env: &'a Environment, root: VertexId, order: Vec<VertexId>, band: usize) -> Result<Self> {
        Self::build(env, root, order, Some(band))
    }

    fn build(env: &'a Environment, root: VertexId, order: Vec<VertexId>, band: Option<usize>) -> Result<Self> {
        let g = env.graph();
        g.check_vertex(root)?;
        g.require_strongly_connected()?;
        let n = g.vertex_count();
        let mut position = vec![usize::MAX; n];
        for (k, &v) in order.iter().enumerate() {
            g.check_vertex(v)?;
            if v == root || position[v] != usize::MAX {
                return Err(WalkError::Parameter(format!("vertex {v} misplaced in the elimination order")));
            }
            position[v] = k;
        }
        if order.len() + 1 != n {
            return Err(WalkError::Parameter("elimination order must list every vertex but the root".into()));
        }
        let m = order.len();
        let mut entries = Vec::with_capacity(m + g.edge_count());
        for k in 0..m {
            entries.push((k, k, 1.0));
        }
        for (e, &(t, h)) in g.edges().iter().enumerate() {
            if t != root && h != root {
                entries.push((position[t], position[h], -env.prob()[e]));
            }
        }
        let factor = match band {
            Some(b) => Factor::Band(BandLu::from_entries(m, b, b, entries)?),
            None => {
                let mut a = Matrix::zeros(m, m);
                for (i, j, v) in entries {
                    a[(i, j)] += v;
                }
                Factor::Dense(Lu::new(&a)?)
            }
        };
        Ok(Self { env, root, position, order, factor })
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    /// `(P_root(H_y < H_root⁺), P_y(H_root < H_y⁺))`.
    pub fn escape_pair(&self, y: VertexId) -> Result<(f64, f64)> {
        let g = self.env.graph();
        g.check_vertex(y)?;
        if y == self.root {
            return Err(WalkError::Parameter(format!("hitting probability needs distinct vertices, got {y} twice")));
        }
        // g(z) = G(z, y) for the walk killed at the root
        let mut rhs = vec![0.0; self.order.len()];
        rhs[self.position[y]] = 1.0;
        let green = self.factor.solve(&rhs);
        let gyy = green[self.position[y]];
        let from_root: f64 =
            g.out_edges(self.root).iter().filter(|&&e| g.head(e) != self.root).map(|&e| self.env.prob()[e] * green[self.position[g.head(e)]]).sum();
        Ok((from_root / gyy, 1.0 / gyy))
    }

    /// Invariant measure pinned to 1 at the root, i.e. expected visits per excursion.
    /// Returns the vector and the full invariance residual after normalizing to mass one.
    pub fn pinned_invariant(&self) -> Result<(Vec<f64>, f64)> {
        let g = self.env.graph();
        let mut rhs = vec![0.0; self.order.len()];
        for &e in g.out_edges(self.root) {
            let h = g.head(e);
            if h != self.root {
                rhs[self.position[h]] += self.env.prob()[e];
            }
        }
        let sol = self.factor.solve_transposed(&rhs);
        let mut pi = vec![0.0; g.vertex_count()];
        pi[self.root] = 1.0;
        for (k, &v) in self.order.iter().enumerate() {
            pi[v] = sol[k];
        }
        let mass: f64 = pi.iter().sum();
        let normalized: Vec<f64> = pi.iter().map(|p| p / mass).collect();
        let residual = self.env.invariance_residual(&normalized);
        if residual >= RESIDUAL || pi.iter().any(|&p| !(p > 0.0)) {
            return Err(WalkError::Numerical { message: format!("pinned invariant measure residual {residual:e}"), condition: f64::NAN });
        }
        Ok((pi, residual))
    }
}
