//! Draws of the vertex field `U` whose law on `{u_{i₀} = 0}` has density proportional to
//! `exp(γ(u_{j₀} − u_{i₀}) − Σ_{(i,j)} W(i,j) e^{u_j − u_i})`.

use rand::Rng;

use super::{GammaField, UField};
use crate::error::{Result, WalkError};
use crate::graph::{DirectedGraph, VertexId};
use crate::special::ExpCoshLaw;

/// Fewest sweeps `sample_u_field_gibbs` accepts.
pub const GIBBS_BURN_IN_FLOOR: usize = 100;

fn check_segment(g: &DirectedGraph) -> Result<usize> {
    let n = g.vertex_count().saturating_sub(1);
    let shaped = n >= 1 && g.edge_count() == 2 * n && (0..n).all(|i| g.edge(2 * i) == (i, i + 1) && g.edge(2 * i + 1) == (i + 1, i));
    if shaped {
        Ok(n)
    } else {
        Err(WalkError::Structural("expected the nearest-neighbour segment layout".into()))
    }
}

/// Exact draw on the segment `{0, …, n}` with `i₀ = 0`, `j₀ = n`: the increments
/// `U_{i+1} − U_i` are independent with density `∝ exp(γv − W(i,i+1)e^v − W(i+1,i)e^{−v})`.
pub fn sample_u_field_segment<R: Rng + ?Sized>(g: &DirectedGraph, w: &GammaField, gamma: f64, rng: &mut R) -> Result<UField> {
    let n = check_segment(g)?;
    w.check_graph(g)?;
    let mut u = vec![0.0; n + 1];
    for i in 0..n {
        let step = ExpCoshLaw::new(gamma, w.get(2 * i), w.get(2 * i + 1))?.sample(rng);
        u[i + 1] = u[i] + step;
    }
    Ok(UField { u, root: 0 })
}

/// Full conditional of `u_v`: density `∝ exp(c x − A e^x − B e^{−x})` with
/// `A = Σ_{(j,v)} W(j,v) e^{−u_j}` over in-edges, `B = Σ_{(v,j)} W(v,j) e^{u_j}` over
/// out-edges (self-loops are constant) and `c = γ·1{v = j₀}`.
pub fn gibbs_conditional(g: &DirectedGraph, w: &GammaField, gamma: f64, j0: VertexId, u: &UField, v: VertexId) -> Result<ExpCoshLaw> {
    let a: f64 = g.in_edges(v).iter().filter(|&&e| g.tail(e) != v).map(|&e| w.get(e) * (-u.get(g.tail(e))).exp()).sum();
    let b: f64 = g.out_edges(v).iter().filter(|&&e| g.head(e) != v).map(|&e| w.get(e) * u.get(g.head(e)).exp()).sum();
    let c = if v == j0 { gamma } else { 0.0 };
    ExpCoshLaw::new(c, a, b)
}

/// One systematic scan over every vertex but the root.
pub fn gibbs_sweep<R: Rng + ?Sized>(g: &DirectedGraph, w: &GammaField, gamma: f64, j0: VertexId, u: &mut UField, rng: &mut R) -> Result<()> {
    for v in 0..g.vertex_count() {
        if v != u.root() {
            let law = gibbs_conditional(g, w, gamma, j0, u, v)?;
            u.set(v, law.sample(rng));
        }
    }
    Ok(())
}

/// Approximate draw by `sweeps` Gibbs sweeps started from `U ≡ 0`.
pub fn sample_u_field_gibbs<R: Rng + ?Sized>(
    g: &DirectedGraph,
    w: &GammaField,
    gamma: f64,
    i0: VertexId,
    j0: VertexId,
    sweeps: usize,
    rng: &mut R,
) -> Result<UField> {
    if sweeps < GIBBS_BURN_IN_FLOOR {
        return Err(WalkError::Parameter(format!("{sweeps} sweeps is below the burn-in floor of {GIBBS_BURN_IN_FLOOR}")));
    }
    w.check_graph(g)?;
    g.check_vertex(i0)?;
    g.check_vertex(j0)?;
    g.require_strongly_connected()?;
    let mut u = UField::zero(g.vertex_count(), i0);
    for _ in 0..sweeps {
        gibbs_sweep(g, w, gamma, j0, &mut u, rng)?;
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_segment, segment_weights};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// `ln` of the unnormalized field density.
    fn ln_density(g: &DirectedGraph, w: &GammaField, gamma: f64, i0: usize, j0: usize, u: &[f64]) -> f64 {
        let interaction: f64 = g.edges().iter().enumerate().map(|(e, &(i, j))| w.get(e) * (u[j] - u[i]).exp()).sum();
        gamma * (u[j0] - u[i0]) - interaction
    }

    #[test]
    fn conditional_matches_density_on_three_vertices() {
        // 0 → 1 → 2 → 0 plus 1 → 0, 2 → 1 twice and a self-loop at 1
        let g = DirectedGraph::new(3, vec![(0, 1), (1, 2), (2, 0), (1, 0), (2, 1), (2, 1), (1, 1)]).unwrap();
        let w = GammaField::new(vec![0.7, 1.3, 0.4, 2.2, 0.5, 0.9, 3.0]).unwrap();
        let (gamma, i0, j0) = (0.8, 0, 2);
        let base = UField::new(vec![0.0, 0.3, -0.6], i0).unwrap();
        for v in [1, 2] {
            let law = gibbs_conditional(&g, &w, gamma, j0, &base, v).unwrap();
            let at = |x: f64| {
                let mut u = base.as_slice().to_vec();
                u[v] = x;
                ln_density(&g, &w, gamma, i0, j0, &u)
            };
            // the conditional kernel and the joint density differ by a constant in u_v
            let offset = at(0.0) - law.ln_kernel(0.0);
            for x in [-2.0, -0.5, 0.4, 1.7] {
                assert!((at(x) - law.ln_kernel(x) - offset).abs() < 1e-12, "vertex {v}, x = {x}");
            }
        }
    }

    #[test]
    fn segment_sampler_pins_root_and_fails_on_other_shapes() {
        let g = build_segment(4).unwrap();
        let a = segment_weights(4, 2.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let w = GammaField::sample(&a, &mut rng).unwrap();
        let u = sample_u_field_segment(&g, &w, 1.0, &mut rng).unwrap();
        assert_eq!(u.get(0), 0.0);
        let other = DirectedGraph::new(2, vec![(1, 0), (0, 1)]).unwrap();
        assert!(sample_u_field_segment(&other, &GammaField::new(vec![1.0, 1.0]).unwrap(), 0.0, &mut rng).is_err());
    }

    #[test]
    fn burn_in_floor() {
        let g = build_segment(2).unwrap();
        let w = GammaField::new(vec![1.0; 4]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_u_field_gibbs(&g, &w, 0.0, 0, 2, GIBBS_BURN_IN_FLOOR - 1, &mut rng).is_err());
        assert!(sample_u_field_gibbs(&g, &w, 0.0, 0, 2, GIBBS_BURN_IN_FLOOR, &mut rng).is_ok());
    }
}
