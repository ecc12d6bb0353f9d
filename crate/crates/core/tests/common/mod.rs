//! Brute-force reference for the mapper, shared by integration tests.
//!
//! An analogy grown from a root pair is a one-to-one set of concept pairs in
//! which every pair can be reached from the root through "pair edges": two
//! pairs are adjacent when the left graph has a triple between their left
//! concepts and the right graph has a triple with the same relation and the
//! same direction between their right concepts. Reachability is measured in
//! pair-edge hops and must stay within the depth bound.
//!
//! The enumeration below grows sets one pair at a time from the root and
//! keeps every set that passes that check, visiting each set once.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use visual_blender::ConceptGraph;

pub type Pair = (String, String);
pub type PairSet = BTreeSet<Pair>;

/// Product adjacency between concept pairs, built from every pair of triples
/// that share a relation label.
pub struct PairGraph {
    adj: HashMap<Pair, HashSet<Pair>>,
}

impl PairGraph {
    pub fn new(left: &ConceptGraph, right: &ConceptGraph) -> Self {
        let mut adj: HashMap<Pair, HashSet<Pair>> = HashMap::new();
        for lt in left.triples() {
            for rt in right.triples() {
                if lt.relation != rt.relation {
                    continue;
                }
                let head = (lt.head.clone(), rt.head.clone());
                let tail = (lt.tail.clone(), rt.tail.clone());
                adj.entry(head.clone()).or_default().insert(tail.clone());
                adj.entry(tail).or_default().insert(head);
            }
        }
        PairGraph { adj }
    }

    pub fn neighbors(&self, p: &Pair) -> impl Iterator<Item = &Pair> {
        self.adj.get(p).into_iter().flatten()
    }

    pub fn adjacent(&self, p: &Pair, q: &Pair) -> bool {
        self.adj.get(p).is_some_and(|s| s.contains(q))
    }
}

fn injective(set: &PairSet) -> bool {
    let lefts: HashSet<&String> = set.iter().map(|p| &p.0).collect();
    let rights: HashSet<&String> = set.iter().map(|p| &p.1).collect();
    lefts.len() == set.len() && rights.len() == set.len()
}

/// Every pair reachable from `root` inside `set` within `max_depth` hops.
pub fn is_valid(pg: &PairGraph, set: &PairSet, root: &Pair, max_depth: usize) -> bool {
    if !set.contains(root) || !injective(set) {
        return false;
    }
    let mut depth: HashMap<&Pair, usize> = HashMap::from([(root, 0)]);
    let mut queue = VecDeque::from([root]);
    while let Some(p) = queue.pop_front() {
        let d = depth[p];
        for q in set {
            if !depth.contains_key(q) && pg.adjacent(p, q) {
                depth.insert(q, d + 1);
                queue.push_back(q);
            }
        }
    }
    depth.len() == set.len() && depth.values().all(|&d| d <= max_depth)
}

/// All valid sets for one root.
pub fn valid_sets(left: &ConceptGraph, right: &ConceptGraph, root: &Pair, max_depth: usize) -> HashSet<PairSet> {
    let pg = PairGraph::new(left, right);
    let start: PairSet = BTreeSet::from([root.clone()]);
    let mut seen: HashSet<PairSet> = HashSet::from([start.clone()]);
    let mut stack = vec![start];
    while let Some(set) = stack.pop() {
        let candidates: BTreeSet<Pair> = set
            .iter()
            .flat_map(|p| pg.neighbors(p).cloned())
            .filter(|q| !set.contains(q))
            .collect();
        for q in candidates {
            let mut next = set.clone();
            next.insert(q);
            if !seen.contains(&next) && is_valid(&pg, &next, root, max_depth) {
                seen.insert(next.clone());
                stack.push(next);
            }
        }
    }
    seen
}

/// Valid sets that no single extra pair keeps valid.
pub fn maximal_sets(left: &ConceptGraph, right: &ConceptGraph, root: &Pair, max_depth: usize) -> HashSet<PairSet> {
    let pg = PairGraph::new(left, right);
    let all = valid_sets(left, right, root, max_depth);
    all.iter()
        .filter(|s| {
            s.iter()
                .flat_map(|p| pg.neighbors(p))
                .filter(|q| !s.contains(*q))
                .all(|q| {
                    let mut bigger = (*s).clone();
                    bigger.insert(q.clone());
                    !all.contains(&bigger)
                })
        })
        .cloned()
        .collect()
}

/// Largest analogy size over every cross-space root with distinct labels,
/// and every set of that size.
pub fn global_max(left: &ConceptGraph, right: &ConceptGraph, max_depth: usize) -> (usize, HashSet<PairSet>) {
    let mut best = 0;
    let mut sets = HashSet::new();
    for l in left.concepts() {
        for r in right.concepts() {
            if l == r {
                continue;
            }
            for s in valid_sets(left, right, &(l.to_string(), r.to_string()), max_depth) {
                if s.len() > best {
                    best = s.len();
                    sets.clear();
                }
                if s.len() == best {
                    sets.insert(s);
                }
            }
        }
    }
    (best, sets)
}

const LABELS: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];
const RELATIONS: [&str; 3] = ["r", "s", "t"];

/// A random graph over up to `max_concepts` labels drawn from a pool shared
/// by both sides, with up to `max_triples` distinct triples.
pub fn random_graph<R: Rng>(rng: &mut R, name: &str, max_concepts: usize, max_triples: usize) -> ConceptGraph {
    let n = rng.gen_range(2..=max_concepts.min(LABELS.len()));
    let mut labels = LABELS.to_vec();
    labels.shuffle(rng);
    let labels = &labels[..n];
    let mut g = ConceptGraph::new(name);
    let relations = &RELATIONS[..rng.gen_range(1..=RELATIONS.len())];
    let wanted = rng.gen_range(1..=max_triples);
    for _ in 0..wanted * 4 {
        if g.triple_count() >= wanted {
            break;
        }
        let h = labels.choose(rng).unwrap();
        let t = labels.choose(rng).unwrap();
        if h != t {
            g.add_triple(h, relations.choose(rng).unwrap(), t).unwrap();
        }
    }
    for l in labels {
        g.add_concept(l).unwrap();
    }
    g
}
