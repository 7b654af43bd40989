//! Experiment configuration files (TOML).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use walklab_core::graph::{build_segment, build_torus, build_torus_star, build_two_cycle, segment_weights, DirectedGraph, EdgeWeights, GraphDocument, Torus};
use walklab_core::stats::{MIN_BIN_SIZE, TRIM};

use crate::error::{CliError, CliResult};

/// Floor on replicate counts for anything that ends in a statistical verdict.
pub const MIN_STATISTICAL_SAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphSpec {
    TwoCycle {
        a1: f64,
        a2: f64,
    },
    Segment {
        n: usize,
        right: f64,
        left: f64,
    },
    Torus {
        n: usize,
        alpha: [f64; 4],
    },
    TorusStar {
        n: usize,
        alpha: [f64; 4],
        epsilon: f64,
    },
    /// A JSON interchange document; relative paths are resolved against the config file.
    File {
        path: PathBuf,
    },
}

/// Graph, weights and, for the torus builders, the lattice geometry.
pub struct BuiltGraph {
    pub graph: DirectedGraph,
    pub alpha: EdgeWeights,
    pub torus: Option<Torus>,
}

impl GraphSpec {
    pub fn build(&self, base: &Path) -> CliResult<BuiltGraph> {
        Ok(match self {
            GraphSpec::TwoCycle { a1, a2 } => {
                let (graph, alpha) = build_two_cycle(*a1, *a2)?;
                BuiltGraph { graph, alpha, torus: None }
            }
            GraphSpec::Segment { n, right, left } => BuiltGraph { graph: build_segment(*n)?, alpha: segment_weights(*n, *right, *left)?, torus: None },
            GraphSpec::Torus { n, alpha } => {
                let (graph, alpha) = build_torus(*n, *alpha)?;
                BuiltGraph { graph, alpha, torus: Some(Torus::new(*n)) }
            }
            GraphSpec::TorusStar { n, alpha, epsilon } => {
                let (graph, alpha) = build_torus_star(*n, *alpha, *epsilon)?;
                BuiltGraph { graph, alpha, torus: Some(Torus::new(*n)) }
            }
            GraphSpec::File { path } => {
                let path = if path.is_relative() { base.join(path) } else { path.clone() };
                let text = std::fs::read_to_string(&path).map_err(|e| CliError::Config(format!("cannot read graph file {}: {e}", path.display())))?;
                let (graph, alpha) = GraphDocument::from_json(&text)?.into_graph()?;
                BuiltGraph { graph, alpha, torus: None }
            }
        })
    }

    /// Default marked pair: the two ends of a segment or cycle, the origin and its
    /// `e1` neighbour on a torus.
    fn default_pair(&self, torus: Option<&Torus>) -> Option<(usize, usize)> {
        match self {
            GraphSpec::TwoCycle { .. } => Some((0, 1)),
            GraphSpec::Segment { n, .. } => Some((0, *n)),
            GraphSpec::Torus { .. } | GraphSpec::TorusStar { .. } => torus.map(|t| (t.vertex([0, 0]), t.vertex([1, 0]))),
            GraphSpec::File { .. } => None,
        }
    }
}

/// Parameters of the nearest-neighbour chain for the Matsumoto–Yor experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub bins: Option<usize>,
    pub level: Option<f64>,
    pub graph: Option<GraphSpec>,
    /// Marked vertices `[i0, j0]` as vertex ids.
    pub pair: Option<[usize; 2]>,
    /// On a torus, put `j0` this many `e1` steps from the origin.
    pub distance: Option<usize>,
    /// Torus direction weights for the sweeping experiments.
    pub alpha: Option<[f64; 4]>,
    pub sizes: Option<Vec<usize>>,
    pub distances: Option<Vec<usize>>,
    pub epsilon: Option<Vec<f64>>,
    /// Half-widths `r` of the boxes `[-r, r]^2`.
    pub boxes: Option<Vec<i32>>,
    pub exponents: Option<Vec<f64>>,
    pub walks: Option<usize>,
    pub chain: Option<ChainSpec>,
    pub markov_bins: Option<usize>,
    /// Number of weight fields for exact recursion checks.
    pub fields: Option<usize>,
    pub dense_checks: Option<usize>,
    /// Relative error injected into the self-test reference values.
    pub perturbation: Option<f64>,
    pub batch_rows: Option<usize>,
    pub output: Option<PathBuf>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut config = Self::from_toml(&text)?;
        config.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }

    pub fn seed(&self) -> CliResult<u64> {
        self.seed.ok_or_else(|| CliError::Config("a seed is required (config `seed` or --seed)".into()))
    }

    pub fn level(&self) -> CliResult<f64> {
        let level = self.level.unwrap_or(0.01);
        if level > 0.0 && level < 1.0 {
            Ok(level)
        } else {
            Err(CliError::Config(format!("level {level} must lie in (0, 1)")))
        }
    }

    /// Sample count for a statistical experiment, enforcing the floor.
    pub fn statistical_samples(&self, default: usize) -> CliResult<usize> {
        let n = self.samples.unwrap_or(default);
        if n < MIN_STATISTICAL_SAMPLES {
            return Err(CliError::Config(format!("samples = {n} is below the minimum of {MIN_STATISTICAL_SAMPLES}")));
        }
        Ok(n)
    }

    /// Bin count such that every bin of the trimmed sample holds at least `MIN_BIN_SIZE` pairs.
    pub fn bins_for(&self, name: &str, value: Option<usize>, default: usize, samples: usize) -> CliResult<usize> {
        let bins = self.positive(name, value, default)?;
        let kept = samples - 2 * (TRIM * samples as f64).floor() as usize;
        if kept / bins < MIN_BIN_SIZE {
            return Err(CliError::Config(format!("{samples} samples give fewer than {MIN_BIN_SIZE} pairs per bin with {name} = {bins}")));
        }
        Ok(bins)
    }

    pub fn positive(&self, name: &str, value: Option<usize>, default: usize) -> CliResult<usize> {
        match value.unwrap_or(default) {
            0 => Err(CliError::Config(format!("{name} must be positive"))),
            v => Ok(v),
        }
    }

    pub fn graph(&self) -> CliResult<(&GraphSpec, BuiltGraph)> {
        let spec = self.graph.as_ref().ok_or_else(|| CliError::Config("missing [graph] table".into()))?;
        Ok((spec, spec.build(&self.base_dir)?))
    }

    pub fn marked_pair(&self, spec: &GraphSpec, built: &BuiltGraph) -> CliResult<(usize, usize)> {
        match (self.pair, self.distance) {
            (Some(_), Some(_)) => Err(CliError::Config("give either `pair` or `distance`, not both".into())),
            (Some([i0, j0]), None) => Ok((i0, j0)),
            (None, Some(d)) => {
                let t = built.torus.as_ref().ok_or_else(|| CliError::Config("`distance` needs a torus graph".into()))?;
                if d == 0 || d > t.side() / 2 {
                    return Err(CliError::Config(format!("distance {d} must lie in 1..={}", t.side() / 2)));
                }
                Ok((t.vertex([0, 0]), t.vertex([d as i32, 0])))
            }
            (None, None) => spec.default_pair(built.torus.as_ref()).ok_or_else(|| CliError::Config("missing `pair` for a graph file".into())),
        }
    }

    pub fn torus_alpha(&self) -> [f64; 4] {
        self.alpha.unwrap_or([1.0; 4])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_config() {
        let c = ExperimentConfig::from_toml(
            r#"
            experiment = "verify-identity"
            seed = 11
            samples = 2000
            [graph]
            kind = "torus"
            n = 2
            alpha = [1.0, 1.0, 1.0, 1.0]
            "#,
        )
        .unwrap();
        assert_eq!(c.seed().unwrap(), 11);
        let (spec, built) = c.graph().unwrap();
        assert_eq!(built.graph.vertex_count(), 16);
        let (i0, j0) = c.marked_pair(spec, &built).unwrap();
        assert_eq!(built.torus.unwrap().distance(i0, j0), 1);
    }

    #[test]
    fn rejects_unknown_fields_and_missing_seed() {
        assert!(ExperimentConfig::from_toml("experiment = \"x\"\nsamplez = 3").is_err());
        let c = ExperimentConfig::from_toml("experiment = \"x\"").unwrap();
        assert!(c.seed().is_err());
        let c = ExperimentConfig::from_toml("experiment = \"x\"\nsamples = 999").unwrap();
        assert!(c.statistical_samples(5000).is_err());
    }

    #[test]
    fn distance_requires_a_torus() {
        let c = ExperimentConfig::from_toml("experiment = \"x\"\ndistance = 1\n[graph]\nkind = \"two-cycle\"\na1 = 2.0\na2 = 1.0").unwrap();
        let (spec, built) = c.graph().unwrap();
        assert!(c.marked_pair(spec, &built).is_err());
    }
}
