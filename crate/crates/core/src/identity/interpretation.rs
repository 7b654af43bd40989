use std::sync::Arc;

use serde::Serialize;

use super::{GammaField, UField};
use crate::error::{Result, WalkError};
use crate::graph::{DirectedGraph, VertexId};
use crate::linalg::{Lu, Matrix};
use crate::markov::{hitting_prob, Environment};
use crate::tol::{rel_diff, IDENTITY_REL};

/// `W^U(i,j) = W(i,j) e^{U_j − U_i}`, its vertex sums `β` and the normalized environment.
#[derive(Debug, Clone)]
pub struct Mixed {
    pub w_u: GammaField,
    pub beta: Vec<f64>,
    pub env: Environment,
}

pub fn mix_environment(graph: &Arc<DirectedGraph>, w: &GammaField, u: &UField) -> Result<Mixed> {
    w.check_graph(graph)?;
    if u.as_slice().len() != graph.vertex_count() {
        return Err(WalkError::Structural(format!("U has {} values for {} vertices", u.as_slice().len(), graph.vertex_count())));
    }
    let tilted = graph.edges().iter().enumerate().map(|(e, &(i, j))| w.get(e) * (u.get(j) - u.get(i)).exp()).collect();
    let w_u = GammaField::new(tilted)?;
    let beta = w_u.vertex_sums(graph);
    let env = w_u.environment(graph.clone())?;
    Ok(Mixed { w_u, beta, env })
}

/// Both computations of `W̌₊`, `W̌₋` and the quantities derived from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterpretationReport {
    pub w_plus_matrix: f64,
    pub w_plus_prob: f64,
    pub w_minus_matrix: f64,
    pub w_minus_prob: f64,
    pub w_plus_plus: f64,
    pub w_minus_minus: f64,
    /// `|β_{i₀} − W̌₊₊ − W̌₊ e^{U_{j₀}}|` relative to `β_{i₀}`, and the same at `j₀`.
    pub beta_i0_residual: f64,
    pub beta_j0_residual: f64,
    pub gamma_u: f64,
    pub s_u_matrix: f64,
    pub s_u_prob: f64,
    pub max_discrepancy: f64,
    /// Most negative entry of `Ĝ` (zero when entrywise nonnegative).
    pub min_green_entry: f64,
    /// 1-norm condition estimate of `Ĥ`; the matrix route is accurate to about `condition · ε`.
    pub condition: f64,
}

impl InterpretationReport {
    pub fn agrees(&self) -> bool {
        self.max_discrepancy <= IDENTITY_REL
    }
}

/// Computes `W̌₊ = W_{i₀,Ṽ} Ĝ W_{Ṽ,j₀} + W(i₀,j₀)` with `Ĝ = (diag β − Ŵ)^{-1}` on
/// `Ṽ = V ∖ {i₀, j₀}`, and compares it with `e^{−U_{j₀}} β_{i₀} P^{ω^U}_{i₀}(H_{j₀} < H_{i₀}⁺)`;
/// likewise `W̌₋` against `e^{U_{j₀}} β_{j₀} P^{ω^U}_{j₀}(H_{i₀} < H_{j₀}⁺)`.
pub fn check_interpretation(graph: &Arc<DirectedGraph>, w: &GammaField, u: &UField, i0: VertexId, j0: VertexId) -> Result<InterpretationReport> {
    graph.check_vertex(i0)?;
    graph.check_vertex(j0)?;
    if i0 == j0 {
        return Err(WalkError::Parameter("the marked vertices must differ".into()));
    }
    if u.root() != i0 {
        return Err(WalkError::Parameter(format!("U is pinned at {}, expected {i0}", u.root())));
    }
    graph.require_strongly_connected()?;
    let mixed = mix_environment(graph, w, u)?;
    let n = graph.vertex_count();
    let inner: Vec<VertexId> = (0..n).filter(|&v| v != i0 && v != j0).collect();
    let mut index = vec![usize::MAX; n];
    for (k, &v) in inner.iter().enumerate() {
        index[v] = k;
    }
    let m = inner.len();
    // Ĥ(v,v) = β_v − W(v,v): self-loops cancel, so the diagonal is summed without them
    // instead of subtracting a loop weight that can dwarf the rest of β_v
    let mut h = Matrix::zeros(m, m);
    for (e, &(a, b)) in graph.edges().iter().enumerate() {
        if a != b && index[a] != usize::MAX {
            h[(index[a], index[a])] += mixed.w_u.get(e);
        }
    }
    // rows out of and columns into the marked vertices, parallel edges summed
    let mut from_i0 = vec![0.0; m];
    let mut from_j0 = vec![0.0; m];
    let mut to_i0 = vec![0.0; m];
    let mut to_j0 = vec![0.0; m];
    let mut direct = [[0.0; 2]; 2];
    let slot = |v: VertexId| {
        if v == i0 {
            Some(0)
        } else if v == j0 {
            Some(1)
        } else {
            None
        }
    };
    for (e, &(a, b)) in graph.edges().iter().enumerate() {
        let we = w.get(e);
        match (slot(a), slot(b)) {
            (None, None) if a == b => {}
            (None, None) => h[(index[a], index[b])] -= we,
            (Some(0), None) => from_i0[index[b]] += we,
            (Some(_), None) => from_j0[index[b]] += we,
            (None, Some(0)) => to_i0[index[a]] += we,
            (None, Some(_)) => to_j0[index[a]] += we,
            (Some(x), Some(y)) => direct[x][y] += we,
        }
    }
    let lu = if m == 0 { None } else { Some(Lu::new(&h).map_err(|e| WalkError::Precondition(format!("Ĥ is singular: {e}")))?) };
    let green = lu.as_ref().map_or_else(|| Matrix::zeros(0, 0), |lu| lu.inverse());
    let condition = lu.as_ref().map_or(1.0, |lu| lu.condition_estimate());
    let scale = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| green[(i, j)].abs()).fold(0.0, f64::max);
    let min_green_entry = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| green[(i, j)]).fold(0.0, f64::min);
    if min_green_entry < -1e-12 * scale {
        return Err(WalkError::Precondition(format!("Ĥ is not an M-matrix: its inverse has the entry {min_green_entry:e} (largest magnitude {scale:e})")));
    }
    // the forms use refined solves: the explicit inverse, or a plain solve, loses small components
    let form = |row: &[f64], col: &[f64]| -> f64 { lu.as_ref().map_or(0.0, |lu| row.iter().zip(&lu.solve_refined(&h, col)).map(|(a, b)| a * b).sum()) };
    let w_plus_matrix = form(&from_i0, &to_j0) + direct[0][1];
    let w_minus_matrix = form(&from_j0, &to_i0) + direct[1][0];
    let w_plus_plus = form(&from_i0, &to_i0) + direct[0][0];
    let w_minus_minus = form(&from_j0, &to_j0) + direct[1][1];

    let uj = u.get(j0);
    let h_plus = mixed.beta[i0] * hitting_prob(&mixed.env, i0, j0)?;
    let h_minus = mixed.beta[j0] * hitting_prob(&mixed.env, j0, i0)?;
    let w_plus_prob = (-uj).exp() * h_plus;
    let w_minus_prob = uj.exp() * h_minus;
    let beta_i0_residual = rel_diff(mixed.beta[i0], w_plus_plus + w_plus_matrix * uj.exp());
    let beta_j0_residual = rel_diff(mixed.beta[j0], w_minus_minus + w_minus_matrix * (-uj).exp());
    let gamma_u = (h_plus * h_minus).sqrt();
    let s_u_matrix = uj - 0.5 * (w_minus_matrix / w_plus_matrix).ln();
    let s_u_prob = 0.5 * (h_plus / h_minus).ln();
    let max_discrepancy = [
        rel_diff(w_plus_matrix, w_plus_prob),
        rel_diff(w_minus_matrix, w_minus_prob),
        beta_i0_residual,
        beta_j0_residual,
        rel_diff(gamma_u, (w_plus_matrix * w_minus_matrix).sqrt()),
        (s_u_matrix - s_u_prob).abs() / s_u_prob.abs().max(1.0),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(InterpretationReport {
        w_plus_matrix,
        w_plus_prob,
        w_minus_matrix,
        w_minus_prob,
        w_plus_plus,
        w_minus_minus,
        beta_i0_residual,
        beta_j0_residual,
        gamma_u,
        s_u_matrix,
        s_u_prob,
        max_discrepancy,
        min_green_entry,
        condition,
    })
}
