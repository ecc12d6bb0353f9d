//! Spatial relation evaluators and blend fitness.
//!
//! Positional relations are binary bounding-box tests. `inside` is graded: the
//! fraction of the subject's sample points that fall in the object's region.
//! When one endpoint lies inside the other's subtree (an eye inside its own
//! head), the enclosing endpoint's geometry is taken without that subtree.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geom::BBox;
use crate::scene::{ObjectPath, Scene, SceneError, SceneRelation};

/// Points sampled from the subject for `inside`.
pub const INSIDE_SAMPLES: usize = 200;
const INSIDE_SEED: u64 = 0x5eed_0001_d5e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum RelationType {
    Above,
    Below,
    LeftOf,
    RightOf,
    Inside,
    LowerPartOf,
    UpperPartOf,
    Overlaps,
}

impl RelationType {
    pub const ALL: [RelationType; 8] = [
        RelationType::Above,
        RelationType::Below,
        RelationType::LeftOf,
        RelationType::RightOf,
        RelationType::Inside,
        RelationType::LowerPartOf,
        RelationType::UpperPartOf,
        RelationType::Overlaps,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RelationType::Above => "above",
            RelationType::Below => "below",
            RelationType::LeftOf => "leftOf",
            RelationType::RightOf => "rightOf",
            RelationType::Inside => "inside",
            RelationType::LowerPartOf => "lowerPartOf",
            RelationType::UpperPartOf => "upperPartOf",
            RelationType::Overlaps => "overlaps",
        }
    }

    /// Binary relations score exactly 0 or 1.
    pub fn is_binary(self) -> bool {
        self != RelationType::Inside
    }
}

impl fmt::Display for RelationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationType {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RelationType::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown relation type `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationScore {
    pub relation: SceneRelation,
    pub value: f64,
}

/// Subtree to leave out of `of`'s geometry when `other` is nested in it.
fn nested_exclusion<'p>(of: &ObjectPath, other: &'p ObjectPath) -> Option<&'p ObjectPath> {
    (other.starts_with(of) && other != of).then_some(other)
}

fn bool_score(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn binary(rel: RelationType, a: &BBox, b: &BBox) -> f64 {
    let ca = a.center();
    let cb = b.center();
    bool_score(match rel {
        RelationType::Above => a.max.y < b.min.y,
        RelationType::Below => a.min.y > b.max.y,
        RelationType::LeftOf => a.max.x < b.min.x,
        RelationType::RightOf => a.min.x > b.max.x,
        RelationType::Overlaps => a.intersects(b),
        RelationType::LowerPartOf => a.intersects(b) && ca.y >= cb.y && ca.y <= b.max.y,
        RelationType::UpperPartOf => a.intersects(b) && ca.y <= cb.y && ca.y >= b.min.y,
        RelationType::Inside => unreachable!("graded relation"),
    })
}

/// How well one relation holds in `scene`, in `[0, 1]`.
pub fn eval_relation(scene: &Scene, relation: &SceneRelation) -> Result<RelationScore, SceneError> {
    let (sub, obj) = (&relation.subject, &relation.object);
    let value = if relation.rel_type == RelationType::Inside {
        let points = scene.sample_points(sub, INSIDE_SAMPLES, INSIDE_SEED)?;
        let exclude = nested_exclusion(obj, sub);
        let region = scene.shapes_under(obj, exclude)?;
        if region.is_empty() {
            return Err(SceneError::EmptyGeometry(obj.to_string()));
        }
        let hits = points.iter().filter(|p| region.iter().any(|s| s.contains(**p))).count();
        hits as f64 / points.len() as f64
    } else {
        let a = scene.bounding_box_excluding(sub, nested_exclusion(sub, obj))?;
        let b = scene.bounding_box_excluding(obj, nested_exclusion(obj, sub))?;
        binary(relation.rel_type, &a, &b)
    };
    Ok(RelationScore {
        relation: relation.clone(),
        value,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fitness {
    pub value: f64,
    pub relation_count: usize,
}

impl Fitness {
    /// A scene without relations cannot be judged; it scores 0.
    pub fn is_degenerate(&self) -> bool {
        self.relation_count == 0
    }
}

/// Mean relation satisfaction over every relation of the scene. Relations
/// that cannot be evaluated (no geometry at an endpoint) count as 0.
pub fn fitness(scene: &Scene) -> Fitness {
    let scores: Vec<f64> = scene
        .relations
        .iter()
        .map(|r| eval_relation(scene, r).map(|s| s.value).unwrap_or(0.0))
        .collect();
    Fitness {
        value: mean(&scores),
        relation_count: scores.len(),
    }
}

/// Arithmetic mean; 0 for an empty slice.
pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}
