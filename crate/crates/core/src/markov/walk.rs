//! Simulated trajectories in a fixed environment.

use rand::Rng;

use super::Environment;
use crate::graph::VertexId;

/// Samples steps of the walk by scanning the out-edges of the current vertex.
pub struct Walker<'a> {
    env: &'a Environment,
    position: VertexId,
}

impl<'a> Walker<'a> {
    pub fn new(env: &'a Environment, start: VertexId) -> Self {
        Self { env, position: start }
    }

    pub fn position(&self) -> VertexId {
        self.position
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> VertexId {
        let g = self.env.graph();
        let out = g.out_edges(self.position);
        let mut u: f64 = rng.random();
        let mut chosen = *out.last().expect("validated environments have out-edges");
        for &e in out {
            let p = self.env.edge_prob(e);
            if u < p {
                chosen = e;
                break;
            }
            u -= p;
        }
        self.position = g.head(chosen);
        self.position
    }
}

/// Visits to each vertex during `steps` steps started at `start` (the start is not counted).
pub fn occupation_counts<R: Rng + ?Sized>(env: &Environment, start: VertexId, steps: u64, rng: &mut R) -> Vec<u64> {
    let mut counts = vec![0; env.graph().vertex_count()];
    let mut w = Walker::new(env, start);
    for _ in 0..steps {
        counts[w.step(rng)] += 1;
    }
    counts
}

/// Number of visits to `start` (including time 0) before the walk first hits `target`.
pub fn visits_before_hit<R: Rng + ?Sized>(env: &Environment, start: VertexId, target: VertexId, rng: &mut R) -> u64 {
    let mut w = Walker::new(env, start);
    let mut visits = 1;
    loop {
        let v = w.step(rng);
        if v == target {
            return visits;
        }
        if v == start {
            visits += 1;
        }
    }
}

/// Visits to each vertex of `inside` (a mask) started from `start`, until the walk leaves.
pub fn visits_before_exit<R: Rng + ?Sized>(env: &Environment, start: VertexId, inside: &[bool], rng: &mut R) -> Vec<u64> {
    let mut counts = vec![0; inside.len()];
    let mut w = Walker::new(env, start);
    let mut v = start;
    while inside[v] {
        counts[v] += 1;
        v = w.step(rng);
    }
    counts
}
