//! JSON interchange format.
//!
//! ```json
//! {"n": 3, "k": 4,
//!  "edges": [{"head": [2, 3], "tail": [1, 1, 1]}],
//!  "controls": [{"node": 1, "input": 1}]}
//! ```
//!
//! Node ids are 1-based, tails list multiplicity explicitly, and the number
//! of inputs is the largest `input` referenced. Generators append an optional
//! `metadata` object.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DirectedHypergraph, Hyperedge, NodeId};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypergraphFile {
    pub n: usize,
    pub k: usize,
    pub edges: Vec<EdgeRecord>,
    #[serde(default)]
    pub controls: Vec<ControlRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub head: Vec<usize>,
    pub tail: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlRecord {
    pub node: usize,
    pub input: usize,
}

impl HypergraphFile {
    pub fn from_hypergraph(h: &DirectedHypergraph, metadata: Option<serde_json::Value>) -> Self {
        let labels = |vs: &[NodeId]| vs.iter().map(|v| v.one_based()).collect::<Vec<_>>();
        let edges = h
            .state_edges()
            .iter()
            .map(|e| EdgeRecord {
                head: labels(e.head()),
                tail: labels(e.tail()),
            })
            .collect();
        let controls = h
            .control_edges()
            .iter()
            .map(|e| ControlRecord {
                node: e.head()[0].one_based(),
                input: e.tail()[0].index() - h.n() + 1,
            })
            .collect();
        HypergraphFile {
            n: h.n(),
            k: h.k(),
            edges,
            controls,
            metadata,
        }
    }

    pub fn to_hypergraph(&self) -> Result<DirectedHypergraph> {
        let ids =
            |labels: &[usize]| -> Result<Vec<NodeId>> { labels.iter().map(|&l| NodeId::from_one_based(l)).collect() };
        let m = self.controls.iter().map(|c| c.input).max().unwrap_or(0);
        let mut edges = Vec::with_capacity(self.edges.len() + self.controls.len());
        for e in &self.edges {
            edges.push(Hyperedge::state(ids(&e.head)?, ids(&e.tail)?));
        }
        for c in &self.controls {
            if c.input == 0 {
                return Err(Error::validation("control inputs are 1-based; got 0"));
            }
            edges.push(Hyperedge::control(
                NodeId::from_one_based(c.node)?,
                NodeId::new(self.n + c.input - 1),
            ));
        }
        DirectedHypergraph::new(self.n, m, self.k, edges)
    }
}

pub fn parse_hypergraph(text: &str) -> Result<(DirectedHypergraph, Option<serde_json::Value>)> {
    let file: HypergraphFile = serde_json::from_str(text)?;
    let h = file.to_hypergraph()?;
    Ok((h, file.metadata))
}

/// Canonical text form; deterministic for a given hypergraph and metadata.
pub fn render_hypergraph(h: &DirectedHypergraph, metadata: Option<serde_json::Value>) -> String {
    let file = HypergraphFile::from_hypergraph(h, metadata);
    let mut s = serde_json::to_string_pretty(&file).expect("hypergraph serializes");
    s.push('\n');
    s
}

pub fn read_hypergraph(path: impl AsRef<Path>) -> Result<DirectedHypergraph> {
    Ok(read_hypergraph_with_metadata(path)?.0)
}

pub fn read_hypergraph_with_metadata(
    path: impl AsRef<Path>,
) -> Result<(DirectedHypergraph, Option<serde_json::Value>)> {
    parse_hypergraph(&fs::read_to_string(path)?)
}

pub fn write_hypergraph(h: &DirectedHypergraph, path: impl AsRef<Path>) -> Result<()> {
    write_hypergraph_with_metadata(h, None, path)
}

pub fn write_hypergraph_with_metadata(
    h: &DirectedHypergraph,
    metadata: Option<serde_json::Value>,
    path: impl AsRef<Path>,
) -> Result<()> {
    fs::write(path, render_hypergraph(h, metadata))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn h2_golden() {
        let text = render_hypergraph(&h2(), None);
        let golden = include_str!("../../tests/fixtures/h2.json");
        assert_eq!(text, golden);
    }

    #[test]
    fn round_trip_through_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h1.json");
        let h = h1().with_drivers(&[NodeId(2)]).unwrap();
        write_hypergraph(&h, &path).unwrap();
        assert_eq!(read_hypergraph(&path).unwrap(), h);
    }

    #[test]
    fn edge_order_is_normalized() {
        let text = r#"{"n":3,"k":4,"edges":[{"head":[3],"tail":[2,1,2]},{"head":[2],"tail":[1,1,1]}],"controls":[]}"#;
        let (h, _) = parse_hypergraph(text).unwrap();
        assert_eq!(h, h1());
        let again = parse_hypergraph(&render_hypergraph(&h, None)).unwrap().0;
        assert_eq!(again, h);
    }

    #[test]
    fn bad_tail_arity_is_validation_error() {
        let text = r#"{"n":3,"k":4,"edges":[{"head":[1],"tail":[2,3]}],"controls":[]}"#;
        assert!(matches!(parse_hypergraph(text), Err(Error::Validation(_))));
    }

    #[test]
    fn malformed_json_reports_position() {
        let text = "{\"n\": 3,\n \"k\": 4,\n \"edges\": [oops]}";
        match parse_hypergraph(text) {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 3);
                assert!(column > 0);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn zero_based_id_rejected() {
        let text = r#"{"n":3,"k":2,"edges":[{"head":[0],"tail":[1]}]}"#;
        assert!(matches!(parse_hypergraph(text), Err(Error::Validation(_))));
    }

    #[test]
    fn metadata_survives() {
        let meta = serde_json::json!({"generator": "uniform", "seed": 3});
        let text = render_hypergraph(&h2(), Some(meta.clone()));
        let (_, back) = parse_hypergraph(&text).unwrap();
        assert_eq!(back, Some(meta));
    }
}
