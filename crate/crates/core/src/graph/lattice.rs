//! Finite pieces of the square lattice: confined exit paths and trap strengths.

use std::collections::{BTreeSet, HashSet};

use super::builders::{Torus, DIRECTIONS};
use super::{DirectedGraph, EdgeWeights, VertexId};
use crate::error::{Result, WalkError};

pub type Site = [i32; 2];

/// Default cap on the number of connected subsets visited by [`kappa_of_lambda`].
pub const SUBSET_CAP: usize = 1 << 20;
/// Default cap on the number of paths produced by [`enumerate_paths_pi_lambda`].
pub const PATH_CAP: usize = 1 << 22;

fn add(p: Site, dir: usize) -> Site {
    [p[0] + DIRECTIONS[dir][0], p[1] + DIRECTIONS[dir][1]]
}

/// A finite set of lattice sites (the box Λ).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    sites: BTreeSet<Site>,
}

impl Region {
    pub fn new<I: IntoIterator<Item = Site>>(sites: I) -> Self {
        Self { sites: sites.into_iter().collect() }
    }

    pub fn origin() -> Self {
        Self::new([[0, 0]])
    }

    /// The box `[-n, n]^2`.
    pub fn square(n: i32) -> Self {
        Self::new((-n..=n).flat_map(|x| (-n..=n).map(move |y| [x, y])))
    }

    pub fn contains(&self, p: Site) -> bool {
        self.sites.contains(&p)
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        self.sites.iter().copied()
    }

    fn require_origin(&self) -> Result<()> {
        if self.contains([0, 0]) {
            Ok(())
        } else {
            Err(WalkError::Parameter("region must contain the origin".into()))
        }
    }

    /// Λ together with every site adjacent to it.
    pub fn closed_neighbourhood(&self) -> Region {
        let mut out = self.sites.clone();
        for &p in &self.sites {
            for dir in 0..4 {
                out.insert(add(p, dir));
            }
        }
        Region { sites: out }
    }
}

/// A nearest-neighbour path from the origin, stored as its sequence of directions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticePath {
    pub steps: Vec<u8>,
}

impl LatticePath {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn sites(&self) -> Vec<Site> {
        let mut p = [0, 0];
        let mut out = vec![p];
        for &d in &self.steps {
            p = add(p, d as usize);
            out.push(p);
        }
        out
    }

    /// `ω_σ` for the path translated to start at torus vertex `start`.
    pub fn weight_on_torus(&self, torus: &Torus, prob: &[f64], start: VertexId) -> f64 {
        let mut v = start;
        let mut w = 1.0;
        for &d in &self.steps {
            w *= prob[torus.edge(v, d as usize)];
            v = torus.step(v, d as usize);
        }
        w
    }
}

/// All self-avoiding paths that start at the origin, stay in Λ except for their
/// last site, and end outside Λ. Ordered by length, then by direction sequence.
pub fn enumerate_paths_pi_lambda(lambda: &Region) -> Result<Vec<LatticePath>> {
    enumerate_paths_capped(lambda, PATH_CAP)
}

pub fn enumerate_paths_capped(lambda: &Region, cap: usize) -> Result<Vec<LatticePath>> {
    lambda.require_origin()?;
    let mut out = Vec::new();
    let mut visited = HashSet::from([[0, 0]]);
    let mut steps = Vec::new();
    extend_paths(lambda, [0, 0], &mut visited, &mut steps, &mut out, cap)?;
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.steps.cmp(&b.steps)));
    Ok(out)
}

fn extend_paths(lambda: &Region, at: Site, visited: &mut HashSet<Site>, steps: &mut Vec<u8>, out: &mut Vec<LatticePath>, cap: usize) -> Result<()> {
    for dir in 0..4 {
        let next = add(at, dir);
        steps.push(dir as u8);
        if !lambda.contains(next) {
            if out.len() == cap {
                return Err(WalkError::Capacity(format!("more than {cap} confined exit paths")));
            }
            out.push(LatticePath { steps: steps.clone() });
        } else if visited.insert(next) {
            extend_paths(lambda, next, visited, steps, out, cap)?;
            visited.remove(&next);
        }
        steps.pop();
    }
    Ok(())
}

/// Acceleration `γ(ω) = 1 / Σ_{σ ∈ Π_Λ} ω_σ` evaluated at torus vertex `at`.
pub fn acceleration(paths: &[LatticePath], torus: &Torus, prob: &[f64], at: VertexId) -> f64 {
    1.0 / paths.iter().map(|p| p.weight_on_torus(torus, prob, at)).sum::<f64>()
}

/// `κ = min_j { 2 Σ_i α_i − (α_j + α_{j+d}) }` for weights `α_1..α_{2d}` on `Z^d`.
pub fn kappa_global(alpha: &[f64]) -> Result<f64> {
    if alpha.is_empty() || alpha.len() % 2 != 0 || alpha.iter().any(|a| !(*a > 0.0)) {
        return Err(WalkError::Parameter("need 2d positive lattice weights".into()));
    }
    let d = alpha.len() / 2;
    let total: f64 = alpha.iter().sum();
    Ok((0..d).map(|j| 2.0 * total - alpha[j] - alpha[j + d]).fold(f64::INFINITY, f64::min))
}

/// Finite graph on Λ⁺ (Λ plus its neighbours) and one more ring, carrying every
/// out-edge of Λ⁺. Returns the graph, weights, origin id, domain mask (Λ⁺) and Λ mask.
pub fn trap_graph(lambda: &Region, alpha: [f64; 4]) -> Result<(DirectedGraph, EdgeWeights, VertexId, Vec<bool>, Vec<bool>)> {
    lambda.require_origin()?;
    let domain = lambda.closed_neighbourhood();
    let all = domain.closed_neighbourhood();
    let sites: Vec<Site> = all.sites().collect();
    let index = |p: Site| sites.binary_search(&p).expect("site in padded region");
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    for p in domain.sites() {
        for (dir, &a) in alpha.iter().enumerate() {
            edges.push((index(p), index(add(p, dir))));
            weights.push(a);
        }
    }
    let g = DirectedGraph::new(sites.len(), edges)?;
    let w = EdgeWeights::for_graph(&g, weights)?;
    let in_domain = sites.iter().map(|&p| domain.contains(p)).collect();
    let in_lambda = sites.iter().map(|&p| lambda.contains(p)).collect();
    Ok((g, w, index([0, 0]), in_domain, in_lambda))
}

/// Strength κ(Λ) of the weakest trap escaping Λ: the minimum of `Σ_{e ∈ ∂₊S} α_e` over
/// connected sets `S` with `{0} ⊊ S ⊆ Λ⁺` and `S ⊄ Λ`.
pub fn kappa_of_lambda(lambda: &Region, alpha: [f64; 4]) -> Result<f64> {
    kappa_of_lambda_capped(lambda, alpha, SUBSET_CAP)
}

pub fn kappa_of_lambda_capped(lambda: &Region, alpha: [f64; 4], cap: usize) -> Result<f64> {
    if alpha.iter().any(|a| !(*a > 0.0)) {
        return Err(WalkError::Parameter("lattice weights must be positive".into()));
    }
    let (g, w, root, domain, inside) = trap_graph(lambda, alpha)?;
    min_trap_exit_weight(&g, &w, root, &domain, &inside, cap)
}

/// Minimum out-boundary weight over connected `S` (undirected adjacency) with
/// `root ∈ S`, `|S| ≥ 2`, `S ⊆ domain` and `S` meeting the complement of `inside`.
///
/// Subsets are grown depth-first from `{root}` and deduplicated by bitmask.
pub fn min_trap_exit_weight(g: &DirectedGraph, w: &EdgeWeights, root: VertexId, domain: &[bool], inside: &[bool], cap: usize) -> Result<f64> {
    w.check_graph(g)?;
    let members: Vec<VertexId> = (0..g.vertex_count()).filter(|&v| domain[v]).collect();
    if members.len() > 128 {
        return Err(WalkError::Capacity(format!("{} candidate vertices exceed 128", members.len())));
    }
    let slot = |v: VertexId| members.binary_search(&v).ok();
    let root_slot = slot(root).ok_or_else(|| WalkError::Parameter("root outside the domain".into()))?;

    let mut neighbours = vec![0u128; members.len()];
    for &(t, h) in g.edges() {
        if let (Some(a), Some(b)) = (slot(t), slot(h)) {
            if a != b {
                neighbours[a] |= 1 << b;
                neighbours[b] |= 1 << a;
            }
        }
    }
    let outside_mask: u128 = members.iter().enumerate().filter(|(_, &v)| !inside[v]).fold(0, |m, (i, _)| m | 1 << i);

    let exit_weight = |set: u128| -> f64 {
        let mut total = 0.0;
        for (i, &v) in members.iter().enumerate() {
            if set >> i & 1 == 1 {
                for &e in g.out_edges(v) {
                    let in_set = slot(g.head(e)).is_some_and(|j| set >> j & 1 == 1);
                    if !in_set {
                        total += w.get(e);
                    }
                }
            }
        }
        total
    };

    let start: u128 = 1 << root_slot;
    let mut seen = HashSet::from([start]);
    let mut stack = vec![start];
    let mut best = f64::INFINITY;
    while let Some(set) = stack.pop() {
        if set != start && set & outside_mask != 0 {
            best = best.min(exit_weight(set));
        }
        let mut frontier = 0u128;
        for (i, nb) in neighbours.iter().enumerate() {
            if set >> i & 1 == 1 {
                frontier |= nb;
            }
        }
        frontier &= !set;
        while frontier != 0 {
            let i = frontier.trailing_zeros();
            frontier &= frontier - 1;
            let next = set | 1 << i;
            if seen.insert(next) {
                if seen.len() > cap {
                    return Err(WalkError::Capacity(format!("more than {cap} connected subsets")));
                }
                stack.push(next);
            }
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(WalkError::Parameter("no admissible trap set".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::VecDeque;

    /// Level-by-level breadth-first count of confined exit paths.
    fn bfs_path_count(lambda: &Region) -> usize {
        let mut queue = VecDeque::from([vec![[0, 0]]]);
        let mut exits = 0;
        while let Some(path) = queue.pop_front() {
            let last = *path.last().unwrap();
            for d in DIRECTIONS {
                let next = [last[0] + d[0], last[1] + d[1]];
                if !lambda.contains(next) {
                    exits += 1;
                } else if !path.contains(&next) {
                    let mut longer = path.clone();
                    longer.push(next);
                    queue.push_back(longer);
                }
            }
        }
        exits
    }

    /// Exhaustive scan over every subset of the domain.
    fn brute_force_kappa(lambda: &Region, alpha: [f64; 4]) -> f64 {
        let domain: Vec<Site> = lambda.closed_neighbourhood().sites().collect();
        let n = domain.len();
        let origin = domain.iter().position(|&p| p == [0, 0]).unwrap();
        let mut best = f64::INFINITY;
        for mask in 0u64..(1 << n) {
            if mask >> origin & 1 == 0 || mask.count_ones() < 2 {
                continue;
            }
            let set: Vec<Site> = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| domain[i]).collect();
            if set.iter().all(|&p| lambda.contains(p)) {
                continue;
            }
            // connectivity by flood fill
            let mut reached = vec![[0, 0]];
            let mut k = 0;
            while k < reached.len() {
                let p = reached[k];
                for d in DIRECTIONS {
                    let q = [p[0] + d[0], p[1] + d[1]];
                    if set.contains(&q) && !reached.contains(&q) {
                        reached.push(q);
                    }
                }
                k += 1;
            }
            if reached.len() != set.len() {
                continue;
            }
            let mut exit = 0.0;
            for &p in &set {
                for (dir, d) in DIRECTIONS.iter().enumerate() {
                    if !set.contains(&[p[0] + d[0], p[1] + d[1]]) {
                        exit += alpha[dir];
                    }
                }
            }
            best = best.min(exit);
        }
        best
    }

    #[test]
    fn origin_box_has_four_single_steps() {
        let paths = enumerate_paths_pi_lambda(&Region::origin()).unwrap();
        let steps: Vec<_> = paths.iter().map(|p| p.steps.clone()).collect();
        assert_eq!(steps, vec![vec![0], vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn path_count_matches_breadth_first_oracle() {
        for region in [Region::origin(), Region::square(1), Region::new([[0, 0], [1, 0], [1, 1]])] {
            let paths = enumerate_paths_pi_lambda(&region).unwrap();
            assert_eq!(paths.len(), bfs_path_count(&region));
            for p in &paths {
                let sites = p.sites();
                let (last, body) = sites.split_last().unwrap();
                assert!(!region.contains(*last));
                assert!(body.iter().all(|&s| region.contains(s)));
            }
            let unique: HashSet<_> = paths.iter().collect();
            assert_eq!(unique.len(), paths.len());
            assert!(paths.windows(2).all(|w| (w[0].len(), &w[0].steps) < (w[1].len(), &w[1].steps)));
        }
    }

    #[test]
    fn path_enumeration_errors() {
        assert!(enumerate_paths_pi_lambda(&Region::new([[1, 0]])).is_err());
        assert!(matches!(enumerate_paths_capped(&Region::square(1), 10), Err(WalkError::Capacity(_))));
    }

    #[test]
    fn kappa_global_closed_form() {
        assert!((kappa_global(&[1.0; 4]).unwrap() - 6.0).abs() < 1e-15);
        assert!((kappa_global(&[0.1; 4]).unwrap() - 0.6).abs() < 1e-12);
        assert!((kappa_global(&[1.0, 2.0, 3.0, 4.0]).unwrap() - (20.0 - 6.0)).abs() < 1e-12);
        assert!(kappa_global(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn kappa_of_origin_is_single_edge_trap() {
        for alpha in [[1.0; 4], [0.3, 1.1, 2.0, 0.7]] {
            let k = kappa_of_lambda(&Region::origin(), alpha).unwrap();
            assert!((k - brute_force_kappa(&Region::origin(), alpha)).abs() < 1e-12);
            assert!((k - kappa_global(&alpha).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn kappa_of_square_matches_subset_scan() {
        let lambda = Region::square(1);
        for alpha in [[1.0; 4], [0.4, 1.3, 0.9, 0.2]] {
            let k = kappa_of_lambda(&lambda, alpha).unwrap();
            assert!((k - brute_force_kappa(&lambda, alpha)).abs() < 1e-12);
            assert!(k >= kappa_global(&alpha).unwrap() - 1e-12);
        }
        assert!((kappa_of_lambda(&lambda, [1.0; 4]).unwrap() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn kappa_cap_is_enforced() {
        assert!(matches!(kappa_of_lambda_capped(&Region::square(1), [1.0; 4], 100), Err(WalkError::Capacity(_))));
    }

    #[test]
    fn kappa_invariant_under_relabelling() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let alpha = [0.4, 1.3, 0.9, 0.2];
        let lambda = Region::new([[0, 0], [1, 0], [0, 1]]);
        let (g, w, root, domain, inside) = trap_graph(&lambda, alpha).unwrap();
        let reference = min_trap_exit_weight(&g, &w, root, &domain, &inside, SUBSET_CAP).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let mut perm: Vec<usize> = (0..g.vertex_count()).collect();
            perm.shuffle(&mut rng);
            let edges = g.edges().iter().map(|&(t, h)| (perm[t], perm[h])).collect();
            let pg = DirectedGraph::new(g.vertex_count(), edges).unwrap();
            let mut pd = vec![false; domain.len()];
            let mut pi = vec![false; inside.len()];
            for v in 0..g.vertex_count() {
                pd[perm[v]] = domain[v];
                pi[perm[v]] = inside[v];
            }
            let k = min_trap_exit_weight(&pg, &w, perm[root], &pd, &pi, SUBSET_CAP).unwrap();
            assert!((k - reference).abs() < 1e-12);
        }
    }
}
