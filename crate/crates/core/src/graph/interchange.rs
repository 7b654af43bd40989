use serde::{Deserialize, Serialize};

use super::{DirectedGraph, EdgeWeights, VertexLabel};
use crate::error::{Result, WalkError};

/// Text interchange form of a weighted graph:
///
/// ```json
/// { "vertices": 2, "edges": [[0, 1], [1, 0]], "alpha": [2.0, 1.0], "labels": null }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
    pub alpha: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<VertexLabel>>,
}

impl GraphDocument {
    pub fn from_graph(g: &DirectedGraph, a: &EdgeWeights) -> Result<Self> {
        a.check_graph(g)?;
        Ok(Self {
            vertices: g.vertex_count(),
            edges: g.edges().iter().map(|&(t, h)| [t, h]).collect(),
            alpha: a.as_slice().to_vec(),
            labels: g.labels().map(<[_]>::to_vec),
        })
    }

    pub fn into_graph(self) -> Result<(DirectedGraph, EdgeWeights)> {
        let mut g = DirectedGraph::new(self.vertices, self.edges.iter().map(|e| (e[0], e[1])).collect())?;
        if let Some(labels) = self.labels {
            g = g.with_labels(labels)?;
        }
        let a = EdgeWeights::for_graph(&g, self.alpha)?;
        Ok((g, a))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| WalkError::Structural(format!("graph document: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_torus_star;

    #[test]
    fn round_trip_keeps_labels_and_weights() {
        let (g, a) = build_torus_star(1, [1.0, 2.0, 3.0, 4.0], 0.25).unwrap();
        let text = GraphDocument::from_graph(&g, &a).unwrap().to_json();
        assert!(text.contains("\"cemetery\""));
        let (g2, a2) = GraphDocument::from_json(&text).unwrap().into_graph().unwrap();
        assert_eq!(g, g2);
        assert_eq!(a, a2);
    }

    #[test]
    fn malformed_documents_are_rejected() {
        let bad = r#"{"vertices": 2, "edges": [[0, 1]], "alpha": [1.0, 2.0]}"#;
        assert!(GraphDocument::from_json(bad).unwrap().into_graph().is_err());
        let dangling = r#"{"vertices": 1, "edges": [[0, 1]], "alpha": [1.0]}"#;
        assert!(GraphDocument::from_json(dangling).unwrap().into_graph().is_err());
        assert!(GraphDocument::from_json("not json").is_err());
    }
}
