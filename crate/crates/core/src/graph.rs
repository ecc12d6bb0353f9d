//! Input spaces as labeled directed concept graphs.
//!
//! A graph is a set of `head relation tail` triples. The plain-text form is
//! one triple per line with `#` comments; a JSON mirror
//! (`{"name": .., "triples": [[h, r, t], ..]}` or a bare triple array) is
//! accepted by the same parser.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {0}: expected `head relation tail`")]
    MalformedLine(usize),
    #[error("line {0}: head and tail are the same concept")]
    SelfLoop(usize),
    #[error("unknown concept `{0}`")]
    UnknownConcept(String),
    #[error("invalid token `{0}`")]
    InvalidToken(String),
    #[error("invalid JSON graph: {0}")]
    Json(String),
}

/// One `<head, relation, tail>` edge. Ordering is lexicographic on
/// (head, relation, tail) so triple sets iterate deterministically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub head: String,
    pub relation: String,
    pub tail: String,
}

impl Triple {
    pub fn new(head: impl Into<String>, relation: impl Into<String>, tail: impl Into<String>) -> Self {
        Triple {
            head: head.into(),
            relation: relation.into(),
            tail: tail.into(),
        }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.head, self.relation, self.tail)
    }
}

/// Orientation of an edge as seen from the concept being queried.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeDirection {
    /// The queried concept is the head.
    Out,
    /// The queried concept is the tail.
    In,
}

impl EdgeDirection {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeDirection::Out => "out",
            EdgeDirection::In => "in",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeighborQuery {
    Outgoing,
    Incoming,
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Neighbor<'g> {
    pub relation: &'g str,
    pub other: &'g str,
    pub direction: EdgeDirection,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConceptGraph {
    pub name: String,
    concepts: BTreeSet<String>,
    triples: BTreeSet<Triple>,
}

fn is_token(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(char::is_whitespace)
}

impl ConceptGraph {
    pub fn new(name: impl Into<String>) -> Self {
        ConceptGraph {
            name: name.into(),
            ..Default::default()
        }
    }

    /// Adds an isolated concept. Returns `false` if it was already present.
    pub fn add_concept(&mut self, label: &str) -> Result<bool, GraphError> {
        if !is_token(label) {
            return Err(GraphError::InvalidToken(label.to_string()));
        }
        Ok(self.concepts.insert(label.to_string()))
    }

    /// Adds a triple, registering both endpoints. Duplicates are ignored.
    pub fn add_triple(&mut self, head: &str, relation: &str, tail: &str) -> Result<bool, GraphError> {
        for token in [head, relation, tail] {
            if !is_token(token) {
                return Err(GraphError::InvalidToken(token.to_string()));
            }
        }
        if head == tail {
            return Err(GraphError::SelfLoop(0));
        }
        self.concepts.insert(head.to_string());
        self.concepts.insert(tail.to_string());
        Ok(self.triples.insert(Triple::new(head, relation, tail)))
    }

    pub fn concepts(&self) -> impl Iterator<Item = &str> + '_ {
        self.concepts.iter().map(String::as_str)
    }

    pub fn triples(&self) -> impl Iterator<Item = &Triple> + '_ {
        self.triples.iter()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.concepts.contains(label)
    }

    pub fn concept_count(&self) -> usize {
        self.concepts.len()
    }

    pub fn triple_count(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    /// Edges incident to `concept`, sorted by relation, then other concept,
    /// then direction.
    pub fn neighbors(&self, concept: &str, query: NeighborQuery) -> Result<Vec<Neighbor<'_>>, GraphError> {
        if !self.contains(concept) {
            return Err(GraphError::UnknownConcept(concept.to_string()));
        }
        let want_out = matches!(query, NeighborQuery::Outgoing | NeighborQuery::Both);
        let want_in = matches!(query, NeighborQuery::Incoming | NeighborQuery::Both);
        let mut out: Vec<Neighbor<'_>> = self
            .triples
            .iter()
            .filter_map(|t| {
                if want_out && t.head == concept {
                    Some(Neighbor {
                        relation: &t.relation,
                        other: &t.tail,
                        direction: EdgeDirection::Out,
                    })
                } else if want_in && t.tail == concept {
                    Some(Neighbor {
                        relation: &t.relation,
                        other: &t.head,
                        direction: EdgeDirection::In,
                    })
                } else {
                    None
                }
            })
            .collect();
        out.sort();
        Ok(out)
    }

    /// True when the graph holds an edge `from -relation-> to` in the given
    /// orientation relative to `from`.
    pub fn has_edge(&self, from: &str, relation: &str, direction: EdgeDirection, to: &str) -> bool {
        let triple = match direction {
            EdgeDirection::Out => Triple::new(from, relation, to),
            EdgeDirection::In => Triple::new(to, relation, from),
        };
        self.triples.contains(&triple)
    }

    /// Union of two graphs, used when root mappings may pair concepts of the
    /// same space.
    pub fn merged(&self, other: &ConceptGraph) -> ConceptGraph {
        let mut g = self.clone();
        g.name = format!("{}+{}", self.name, other.name);
        g.concepts.extend(other.concepts.iter().cloned());
        g.triples.extend(other.triples.iter().cloned());
        g
    }

    /// Plain-text serialization. Isolated concepts are not representable in
    /// the line format and are dropped.
    pub fn to_triples_text(&self) -> String {
        let mut s = String::new();
        for t in &self.triples {
            s.push_str(&t.to_string());
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        let doc = GraphDoc {
            name: self.name.clone(),
            triples: self
                .triples
                .iter()
                .map(|t| [t.head.clone(), t.relation.clone(), t.tail.clone()])
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("graph serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    #[serde(default)]
    name: String,
    triples: Vec<[String; 3]>,
}

/// Parses the line-oriented triple format, or its JSON mirror when the first
/// non-blank character is `{` or `[`.
pub fn parse_triples(text: &str) -> Result<ConceptGraph, GraphError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return parse_json(trimmed);
    }
    let mut g = ConceptGraph::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let [head, relation, tail] = tokens[..] else {
            return Err(GraphError::MalformedLine(line_no));
        };
        g.add_triple(head, relation, tail).map_err(|e| match e {
            GraphError::SelfLoop(_) => GraphError::SelfLoop(line_no),
            other => other,
        })?;
    }
    Ok(g)
}

fn parse_json(text: &str) -> Result<ConceptGraph, GraphError> {
    let doc: GraphDoc = if text.starts_with('[') {
        let triples: Vec<[String; 3]> =
            serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))?;
        GraphDoc {
            name: String::new(),
            triples,
        }
    } else {
        serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))?
    };
    let mut g = ConceptGraph::new(doc.name);
    for (idx, [h, r, t]) in doc.triples.iter().enumerate() {
        g.add_triple(h, r, t).map_err(|e| match e {
            GraphError::SelfLoop(_) => GraphError::SelfLoop(idx + 1),
            other => other,
        })?;
    }
    Ok(g)
}
