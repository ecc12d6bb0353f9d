//! Analogy discovery between two input spaces.
//!
//! Starting from a root pair of concepts, two expansions walk outwards in
//! lock-step: the left side depth-first over the frontier, the right side
//! breadth-first over each partner's neighborhood. A left concept is paired
//! with a right concept only when both are reached, at the same depth, from an
//! already mapped pair through an edge with the same relation label and (by
//! default) the same orientation. Each consistent one-to-one assignment that
//! cannot be extended further becomes an [`Analogy`].

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{ConceptGraph, EdgeDirection, NeighborQuery};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapperError {
    #[error("input space `{0}` has no concepts")]
    EmptyGraph(String),
    #[error("root mapping ({0}, {1}) is not valid for these graphs")]
    InvalidRoot(String, String),
    #[error("no analogy with at least {floor} mappings (largest has {found})")]
    NoAnalogy { floor: usize, found: usize },
    #[error("root ({left}, {right}) produced more than {cap} analogies")]
    TooManyAnalogies { left: String, right: String, cap: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MapperParams {
    pub max_depth: usize,
    pub cross_space_only: bool,
    /// Require matching edge orientation, not just matching relation label.
    pub strict_direction: bool,
    /// Smallest acceptable analogy size for [`find_analogies`].
    pub min_mappings: usize,
    pub max_analogies_per_root: usize,
}

impl Default for MapperParams {
    fn default() -> Self {
        MapperParams {
            max_depth: 4,
            cross_space_only: true,
            strict_direction: true,
            min_mappings: 2,
            max_analogies_per_root: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "(String, String)", into = "(String, String)")]
pub struct RootMapping {
    pub left: String,
    pub right: String,
}

impl RootMapping {
    pub fn new(left: impl Into<String>, right: impl Into<String>) -> Self {
        RootMapping {
            left: left.into(),
            right: right.into(),
        }
    }
}

impl From<(String, String)> for RootMapping {
    fn from((left, right): (String, String)) -> Self {
        RootMapping { left, right }
    }
}

impl From<RootMapping> for (String, String) {
    fn from(r: RootMapping) -> Self {
        (r.left, r.right)
    }
}

/// How one non-root mapping was reached: the shared relation label, the
/// edge orientation seen from the already-mapped concept, and the depth.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "(String, EdgeDirection, usize)", into = "(String, EdgeDirection, usize)")]
pub struct SignatureStep {
    pub relation: String,
    pub direction: EdgeDirection,
    pub depth: usize,
}

impl From<(String, EdgeDirection, usize)> for SignatureStep {
    fn from((relation, direction, depth): (String, EdgeDirection, usize)) -> Self {
        SignatureStep {
            relation,
            direction,
            depth,
        }
    }
}

impl From<SignatureStep> for (String, EdgeDirection, usize) {
    fn from(s: SignatureStep) -> Self {
        (s.relation, s.direction, s.depth)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Analogy {
    pub root: RootMapping,
    /// Root pair first, then pairs in the order the expansion added them.
    pub mappings: Vec<(String, String)>,
    /// One step per non-root mapping, aligned with `mappings[1..]`.
    pub signature: Vec<SignatureStep>,
}

impl Analogy {
    /// The analogy consisting of the root pair alone.
    pub fn root_only(root: RootMapping) -> Self {
        Analogy {
            mappings: vec![(root.left.clone(), root.right.clone())],
            root,
            signature: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.mappings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mappings.is_empty()
    }

    /// Order-free view of the mapping pairs, used for deduplication.
    pub fn mapping_set(&self) -> BTreeSet<(String, String)> {
        self.mappings.iter().cloned().collect()
    }

    pub fn right_for(&self, left: &str) -> Option<&str> {
        self.mappings.iter().find(|(l, _)| l == left).map(|(_, r)| r.as_str())
    }

    pub fn left_for(&self, right: &str) -> Option<&str> {
        self.mappings.iter().find(|(_, r)| r == right).map(|(l, _)| l.as_str())
    }

    /// True when the mapping is one-to-one on both sides.
    pub fn is_bijective(&self) -> bool {
        let lefts: HashSet<_> = self.mappings.iter().map(|(l, _)| l).collect();
        let rights: HashSet<_> = self.mappings.iter().map(|(_, r)| r).collect();
        lefts.len() == self.mappings.len() && rights.len() == self.mappings.len()
    }

    /// Re-walks the signature against both graphs: every non-root pair must
    /// be reachable from an earlier pair one level shallower through edges
    /// carrying the recorded relation and orientation.
    pub fn replay_matches(&self, left: &ConceptGraph, right: &ConceptGraph) -> bool {
        if self.mappings.first() != Some(&(self.root.left.clone(), self.root.right.clone())) {
            return false;
        }
        if self.signature.len() + 1 != self.mappings.len() || !self.is_bijective() {
            return false;
        }
        let mut depths = vec![0usize];
        for (i, step) in self.signature.iter().enumerate() {
            let (x, y) = &self.mappings[i + 1];
            if step.depth == 0 {
                return false;
            }
            let supported = self.mappings[..=i].iter().zip(&depths).any(|((pl, pr), &d)| {
                d + 1 == step.depth
                    && left.has_edge(pl, &step.relation, step.direction, x)
                    && right.has_edge(pr, &step.relation, step.direction, y)
            });
            if !supported {
                return false;
            }
            depths.push(step.depth);
        }
        true
    }
}

/// Analogy list as written to disk, tagged with both space names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalogySet {
    pub left: String,
    pub right: String,
    pub analogies: Vec<Analogy>,
}

fn require_non_empty(g: &ConceptGraph) -> Result<(), MapperError> {
    if g.is_empty() {
        Err(MapperError::EmptyGraph(g.name.clone()))
    } else {
        Ok(())
    }
}

/// All candidate root pairs in lexicographic order.
///
/// Cross-space mode pairs one concept of each space; otherwise every
/// unordered pair of distinct labels from the union is a root.
pub fn enumerate_root_mappings(
    a: &ConceptGraph,
    b: &ConceptGraph,
    params: &MapperParams,
) -> Result<Vec<RootMapping>, MapperError> {
    require_non_empty(a)?;
    require_non_empty(b)?;
    if params.cross_space_only {
        Ok(a.concepts()
            .flat_map(|l| b.concepts().filter(move |r| *r != l).map(move |r| RootMapping::new(l, r)))
            .collect())
    } else {
        let union: BTreeSet<&str> = a.concepts().chain(b.concepts()).collect();
        let union: Vec<&str> = union.into_iter().collect();
        let mut roots = Vec::new();
        for (i, l) in union.iter().enumerate() {
            for r in &union[i + 1..] {
                roots.push(RootMapping::new(*l, *r));
            }
        }
        Ok(roots)
    }
}

#[derive(Clone)]
struct State {
    mappings: Vec<(String, String)>,
    signature: Vec<SignatureStep>,
    used_left: HashSet<String>,
    used_right: HashSet<String>,
    frontier: Vec<usize>,
}

struct Candidate {
    left: String,
    options: Vec<(String, SignatureStep)>,
}

struct Expander<'g> {
    left: &'g ConceptGraph,
    right: &'g ConceptGraph,
    params: &'g MapperParams,
    /// Both sides live in one graph, so a concept may be used only once overall.
    shared: bool,
    root: RootMapping,
    leaves: Vec<State>,
    leaf_budget: usize,
    overflow: bool,
}

impl<'g> Expander<'g> {
    fn is_used_left(&self, s: &State, c: &str) -> bool {
        s.used_left.contains(c) || (self.shared && s.used_right.contains(c))
    }

    fn is_used_right(&self, s: &State, c: &str) -> bool {
        s.used_right.contains(c) || (self.shared && s.used_left.contains(c))
    }

    fn directions_match(&self, a: EdgeDirection, b: EdgeDirection) -> bool {
        !self.params.strict_direction || a == b
    }

    /// Pairs reachable at `depth` from the current frontier. Left concepts are
    /// listed in depth-first discovery order; each carries the breadth-first
    /// list of right partners reached through an equal relation.
    fn candidates(&self, s: &State, depth: usize) -> Vec<Candidate> {
        let mut out: Vec<Candidate> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        for &fi in &s.frontier {
            let (pl, pr) = &s.mappings[fi];
            let left_edges = self.left.neighbors(pl, NeighborQuery::Both).expect("mapped concept");
            let right_edges = self.right.neighbors(pr, NeighborQuery::Both).expect("mapped concept");
            for le in &left_edges {
                if self.is_used_left(s, le.other) {
                    continue;
                }
                for re in &right_edges {
                    if re.relation != le.relation
                        || !self.directions_match(le.direction, re.direction)
                        || self.is_used_right(s, re.other)
                        || (self.shared && re.other == le.other)
                    {
                        continue;
                    }
                    let slot = *index.entry(le.other.to_string()).or_insert_with(|| {
                        out.push(Candidate {
                            left: le.other.to_string(),
                            options: Vec::new(),
                        });
                        out.len() - 1
                    });
                    let cand = &mut out[slot];
                    if !cand.options.iter().any(|(y, _)| y == re.other) {
                        cand.options.push((
                            re.other.to_string(),
                            SignatureStep {
                                relation: le.relation.to_string(),
                                direction: le.direction,
                                depth,
                            },
                        ));
                    }
                }
            }
        }
        out
    }

    fn expand(&mut self, state: State, depth: usize) {
        if self.overflow {
            return;
        }
        if depth > self.params.max_depth || state.frontier.is_empty() {
            self.emit(state);
            return;
        }
        let cands = self.candidates(&state, depth);
        let mut chosen: Vec<(usize, usize)> = Vec::new();
        self.assign(&state, depth, &cands, 0, &mut chosen);
    }

    fn assign(
        &mut self,
        state: &State,
        depth: usize,
        cands: &[Candidate],
        i: usize,
        chosen: &mut Vec<(usize, usize)>,
    ) {
        if self.overflow {
            return;
        }
        if i == cands.len() {
            if chosen.is_empty() {
                self.emit(state.clone());
                return;
            }
            let mut next = state.clone();
            next.frontier.clear();
            for &(ci, oi) in chosen.iter() {
                let (y, step) = &cands[ci].options[oi];
                next.frontier.push(next.mappings.len());
                next.mappings.push((cands[ci].left.clone(), y.clone()));
                next.signature.push(step.clone());
                next.used_left.insert(cands[ci].left.clone());
                next.used_right.insert(y.clone());
            }
            self.expand(next, depth + 1);
            return;
        }
        let x = &cands[i].left;
        let x_taken = self.shared && chosen.iter().any(|&(ci, oi)| &cands[ci].options[oi].0 == x);
        if !x_taken {
            for oi in 0..cands[i].options.len() {
                let y = &cands[i].options[oi].0;
                let clash = chosen.iter().any(|&(ci, coi)| {
                    &cands[ci].options[coi].0 == y || (self.shared && &cands[ci].left == y)
                });
                if clash {
                    continue;
                }
                chosen.push((i, oi));
                self.assign(state, depth, cands, i + 1, chosen);
                chosen.pop();
            }
        }
        // Leaving `x` unmapped at this depth; it may still be reached later.
        self.assign(state, depth, cands, i + 1, chosen);
    }

    fn emit(&mut self, state: State) {
        if self.leaves.len() >= self.leaf_budget {
            self.overflow = true;
            return;
        }
        self.leaves.push(state);
    }

    fn pair_adjacent(&self, p: &(String, String), q: &(String, String)) -> bool {
        let Ok(edges) = self.left.neighbors(&p.0, NeighborQuery::Both) else {
            return false;
        };
        edges.iter().filter(|e| e.other == q.0).any(|e| {
            if self.params.strict_direction {
                self.right.has_edge(&p.1, e.relation, e.direction, &q.1)
            } else {
                self.right.has_edge(&p.1, e.relation, EdgeDirection::Out, &q.1)
                    || self.right.has_edge(&p.1, e.relation, EdgeDirection::In, &q.1)
            }
        })
    }

    /// Shortest pair-graph distance from the root within the mapping itself.
    fn pair_depths(&self, s: &State) -> Vec<usize> {
        let n = s.mappings.len();
        let mut dist = vec![usize::MAX; n];
        dist[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                if dist[j] == usize::MAX && self.pair_adjacent(&s.mappings[i], &s.mappings[j]) {
                    dist[j] = dist[i] + 1;
                    queue.push_back(j);
                }
            }
        }
        dist
    }

    /// A leaf is maximal when no single extra pair can be attached within
    /// the depth bound.
    fn is_maximal(&self, s: &State) -> bool {
        let depths = self.pair_depths(s);
        for (i, (pl, pr)) in s.mappings.iter().enumerate() {
            if depths[i] >= self.params.max_depth {
                continue;
            }
            let left_edges = self.left.neighbors(pl, NeighborQuery::Both).expect("mapped concept");
            let right_edges = self.right.neighbors(pr, NeighborQuery::Both).expect("mapped concept");
            for le in &left_edges {
                if self.is_used_left(s, le.other) {
                    continue;
                }
                let extendable = right_edges.iter().any(|re| {
                    re.relation == le.relation
                        && self.directions_match(le.direction, re.direction)
                        && !self.is_used_right(s, re.other)
                        && !(self.shared && re.other == le.other)
                });
                if extendable {
                    return false;
                }
            }
        }
        true
    }
}

/// Every maximal analogy grown from `root`, in discovery order.
pub fn expand_root_mapping(
    a: &ConceptGraph,
    b: &ConceptGraph,
    root: &RootMapping,
    params: &MapperParams,
) -> Result<Vec<Analogy>, MapperError> {
    let merged;
    let (left, right, shared) = if params.cross_space_only {
        (a, b, false)
    } else {
        merged = a.merged(b);
        // Borrow the merged graph for both sides.
        let m: &ConceptGraph = &merged;
        (m, m, true)
    };
    if root.left == root.right || !left.contains(&root.left) || !right.contains(&root.right) {
        return Err(MapperError::InvalidRoot(root.left.clone(), root.right.clone()));
    }
    let initial = State {
        mappings: vec![(root.left.clone(), root.right.clone())],
        signature: Vec::new(),
        used_left: HashSet::from([root.left.clone()]),
        used_right: HashSet::from([root.right.clone()]),
        frontier: vec![0],
    };
    let mut ex = Expander {
        left,
        right,
        params,
        shared,
        root: root.clone(),
        leaves: Vec::new(),
        leaf_budget: params.max_analogies_per_root.saturating_mul(100).max(1),
        overflow: false,
    };
    ex.expand(initial, 1);
    let overflow_err = || MapperError::TooManyAnalogies {
        left: root.left.clone(),
        right: root.right.clone(),
        cap: params.max_analogies_per_root,
    };
    if ex.overflow {
        return Err(overflow_err());
    }
    let mut seen: HashSet<BTreeSet<(String, String)>> = HashSet::new();
    let mut out = Vec::new();
    for leaf in std::mem::take(&mut ex.leaves) {
        let key: BTreeSet<_> = leaf.mappings.iter().cloned().collect();
        if seen.contains(&key) || !ex.is_maximal(&leaf) {
            continue;
        }
        seen.insert(key);
        out.push(Analogy {
            root: ex.root.clone(),
            mappings: leaf.mappings,
            signature: leaf.signature,
        });
        if out.len() > params.max_analogies_per_root {
            return Err(overflow_err());
        }
    }
    Ok(out)
}

/// Runs every root mapping and keeps the analogies with the greatest number
/// of mappings, deduplicated by mapping set.
pub fn find_analogies(
    a: &ConceptGraph,
    b: &ConceptGraph,
    params: &MapperParams,
) -> Result<Vec<Analogy>, MapperError> {
    let roots = enumerate_root_mappings(a, b, params)?;
    let expand = |root: &RootMapping| expand_root_mapping(a, b, root, params);

    #[cfg(feature = "parallel")]
    let per_root: Vec<Result<Vec<Analogy>, MapperError>> = {
        use rayon::prelude::*;
        roots.par_iter().map(expand).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let per_root: Vec<Result<Vec<Analogy>, MapperError>> = roots.iter().map(expand).collect();

    let mut all = Vec::new();
    for r in per_root {
        all.extend(r?);
    }
    let best = all.iter().map(Analogy::len).max().unwrap_or(0);
    if best < params.min_mappings.max(1) {
        return Err(MapperError::NoAnalogy {
            floor: params.min_mappings,
            found: best,
        });
    }
    let mut seen = HashSet::new();
    Ok(all
        .into_iter()
        .filter(|a| a.len() == best && seen.insert(a.mapping_set()))
        .collect())
}
