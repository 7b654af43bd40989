//! The random objects behind the product-ratio identity: gamma edge fields, vertex
//! fields `U`, mixed environments and the discrete Matsumoto–Yor chain.

mod interpretation;
mod my;
mod ufield;

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::error::{Result, WalkError};
use crate::graph::{divergence, DirectedGraph, EdgeWeights, VertexId};
use crate::markov::{hitting_prob, Environment};
use crate::special::GammaLaw;
use crate::tol::DIVERGENCE_GATE;

pub use interpretation::{check_interpretation, mix_environment, InterpretationReport, Mixed};
pub use my::{my_chain, my_chain_recursive, my_conditional_test, my_markov_test, sample_my_chain, MarkovReport, MyPoint};
pub use ufield::{gibbs_sweep, sample_u_field_gibbs, sample_u_field_segment, GIBBS_BURN_IN_FLOOR};

/// Unnormalized edge variables `W(e)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaField {
    w: Vec<f64>,
}

impl GammaField {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if let Some(e) = w.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(WalkError::Parameter(format!("W({e}) = {} is not positive", w[e])));
        }
        Ok(Self { w })
    }

    /// Independent `W(e) ~ Γ(α(e), 1)`.
    pub fn sample<R: Rng + ?Sized>(alpha: &EdgeWeights, rng: &mut R) -> Result<Self> {
        let w = alpha.as_slice().iter().map(|&a| Ok(GammaLaw::new(a)?.sample(rng))).collect::<Result<Vec<_>>>()?;
        Ok(Self { w })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    pub fn get(&self, e: usize) -> f64 {
        self.w[e]
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn check_graph(&self, g: &DirectedGraph) -> Result<()> {
        if self.w.len() == g.edge_count() {
            Ok(())
        } else {
            Err(WalkError::Structural(format!("{} edge variables for {} edges", self.w.len(), g.edge_count())))
        }
    }

    /// `Σ_{e out of v} W(e)` for every vertex.
    pub fn vertex_sums(&self, g: &DirectedGraph) -> Vec<f64> {
        (0..g.vertex_count()).map(|v| g.out_edges(v).iter().map(|&e| self.w[e]).sum()).collect()
    }

    pub fn environment(&self, graph: Arc<DirectedGraph>) -> Result<Environment> {
        Environment::from_weights(graph, &self.w)
    }
}

/// Real field on the vertices, pinned to zero at `root`.
#[derive(Debug, Clone, PartialEq)]
pub struct UField {
    u: Vec<f64>,
    root: VertexId,
}

impl UField {
    pub fn new(mut u: Vec<f64>, root: VertexId) -> Result<Self> {
        if root >= u.len() {
            return Err(WalkError::Parameter(format!("root {root} outside a field of {} values", u.len())));
        }
        if u.iter().any(|x| !x.is_finite()) {
            return Err(WalkError::Parameter("U field has non-finite values".into()));
        }
        // pinning by shifting keeps every difference U_j − U_i
        let shift = u[root];
        u.iter_mut().for_each(|x| *x -= shift);
        u[root] = 0.0;
        Ok(Self { u, root })
    }

    pub fn zero(n: usize, root: VertexId) -> Self {
        Self { u: vec![0.0; n], root }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.u
    }

    pub fn get(&self, v: VertexId) -> f64 {
        self.u[v]
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub(crate) fn set(&mut self, v: VertexId, value: f64) {
        debug_assert_ne!(v, self.root);
        self.u[v] = value;
    }
}

/// The quadruple `(H₊, H₋, Γ, S)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentitySample {
    pub h_plus: f64,
    pub h_minus: f64,
    pub gamma_stat: f64,
    pub s_stat: f64,
}

impl IdentitySample {
    pub fn from_h(h_plus: f64, h_minus: f64) -> Self {
        Self { h_plus, h_minus, gamma_stat: (h_plus * h_minus).sqrt(), s_stat: 0.5 * (h_plus / h_minus).ln() }
    }
}

/// Reads `γ` from `Div(α) = γ(δ_{i₀} − δ_{j₀})`; any other nonzero divergence is reported
/// with the vertices carrying it.
pub fn identity_divergence(g: &DirectedGraph, alpha: &EdgeWeights, i0: VertexId, j0: VertexId) -> Result<f64> {
    g.check_vertex(i0)?;
    g.check_vertex(j0)?;
    if i0 == j0 {
        return Err(WalkError::Parameter(format!("the marked vertices must differ, got {i0} twice")));
    }
    let div = divergence(g, alpha)?.value;
    let gamma = div[i0];
    let mut offending: Vec<String> =
        div.iter().enumerate().filter(|&(v, &d)| v != i0 && v != j0 && d.abs() > DIVERGENCE_GATE).map(|(v, d)| format!("{v} (divergence {d})")).collect();
    if (div[j0] + gamma).abs() > DIVERGENCE_GATE {
        offending.push(format!("{j0} (divergence {}, expected {})", div[j0], -gamma));
    }
    if offending.is_empty() {
        Ok(gamma)
    } else {
        Err(WalkError::Precondition(format!("weights violate Div(α) = γ(δ_{i0} − δ_{j0}) with γ = {gamma} at vertices {}", offending.join(", "))))
    }
}

/// Validated `(graph, α, i₀, j₀)` for repeated draws of the identity quadruple.
#[derive(Debug, Clone)]
pub struct IdentitySetup {
    graph: Arc<DirectedGraph>,
    alpha: EdgeWeights,
    i0: VertexId,
    j0: VertexId,
    gamma: f64,
    beta_i0: GammaLaw,
    beta_j0: GammaLaw,
}

impl IdentitySetup {
    pub fn new(graph: Arc<DirectedGraph>, alpha: EdgeWeights, i0: VertexId, j0: VertexId) -> Result<Self> {
        alpha.check_graph(&graph)?;
        graph.require_strongly_connected()?;
        let gamma = identity_divergence(&graph, &alpha, i0, j0)?;
        let beta_i0 = GammaLaw::new(alpha.vertex_weight(&graph, i0))?;
        let beta_j0 = GammaLaw::new(alpha.vertex_weight(&graph, j0))?;
        Ok(Self { graph, alpha, i0, j0, gamma, beta_i0, beta_j0 })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn graph(&self) -> &Arc<DirectedGraph> {
        &self.graph
    }

    pub fn alpha(&self) -> &EdgeWeights {
        &self.alpha
    }

    pub fn marked(&self) -> (VertexId, VertexId) {
        (self.i0, self.j0)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<IdentitySample> {
        let env = Environment::sample_dirichlet(self.graph.clone(), &self.alpha, rng)?;
        let b_i0 = self.beta_i0.sample(rng);
        let b_j0 = self.beta_j0.sample(rng);
        let h_plus = b_i0 * hitting_prob(&env, self.i0, self.j0)?;
        let h_minus = b_j0 * hitting_prob(&env, self.j0, self.i0)?;
        Ok(IdentitySample::from_h(h_plus, h_minus))
    }
}

/// One draw of the quadruple for a Dirichlet environment with parameters `alpha`.
pub fn sample_identity<R: Rng + ?Sized>(graph: Arc<DirectedGraph>, alpha: EdgeWeights, i0: VertexId, j0: VertexId, rng: &mut R) -> Result<IdentitySample> {
    IdentitySetup::new(graph, alpha, i0, j0)?.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_segment, build_torus, build_two_cycle, segment_weights};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_cycle_hits_are_the_gammas() {
        let (g, a) = build_two_cycle(2.0, 1.0).unwrap();
        let setup = IdentitySetup::new(Arc::new(g), a, 0, 1).unwrap();
        assert!((setup.gamma() - 1.0).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut twin = ChaCha8Rng::seed_from_u64(1);
        let s = setup.sample(&mut rng).unwrap();
        // the environment draw consumes the stream first; replay it to recover the gammas
        let _ = Environment::sample_dirichlet(setup.graph().clone(), setup.alpha(), &mut twin).unwrap();
        let b0 = GammaLaw::new(2.0).unwrap().sample(&mut twin);
        let b1 = GammaLaw::new(1.0).unwrap().sample(&mut twin);
        assert_eq!((s.h_plus, s.h_minus), (b0, b1));
    }

    #[test]
    fn quadruple_invariants() {
        let g = build_segment(5).unwrap();
        let a = segment_weights(5, 2.0, 1.0).unwrap();
        let setup = IdentitySetup::new(Arc::new(g), a, 0, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let s = setup.sample(&mut rng).unwrap();
            assert!((s.gamma_stat.powi(2) / (s.h_plus * s.h_minus) - 1.0).abs() < 1e-12);
            assert!(((2.0 * s.s_stat).exp() / (s.h_plus / s.h_minus) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn divergence_gate_names_vertices() {
        let (g, _) = build_torus(2, [1.0; 4]).unwrap();
        let mut alpha = vec![1.0; g.edge_count()];
        alpha[0] = 1.5;
        let a = EdgeWeights::new(alpha).unwrap();
        match IdentitySetup::new(Arc::new(g.clone()), a.clone(), 0, 5) {
            Err(WalkError::Precondition(msg)) => assert!(msg.contains("vertices 1 (") && msg.contains("5 (")),
            other => panic!("expected a precondition error, got {other:?}"),
        }
        // edge 0 runs from vertex 0 to its right neighbour, so those are the marked pair
        let head = g.head(0);
        let setup = IdentitySetup::new(Arc::new(g), a, 0, head).unwrap();
        assert!((setup.gamma() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pinned_field() {
        let u = UField::new(vec![1.0, 3.0, -2.0], 0).unwrap();
        assert_eq!(u.as_slice(), &[0.0, 2.0, -3.0]);
        assert!(UField::new(vec![1.0], 3).is_err());
    }
}
