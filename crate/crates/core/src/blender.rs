//! Building a visual blend from an analogy and two base scenes.
//!
//! One concept is the base and its scene (`rA`) is copied; for every mapping
//! of the analogy the base parts carrying the mapped name are looked up, a
//! donor part from the other scene (`rB`) is matched by name, and a random
//! subset of the matches is swapped in. Donor parts related to a matched part
//! that the base lacks are then composed onto the blend. Finally dangling
//! relations are dropped, runaway objects are pulled back to the canvas, and
//! the result is rejected when it renders too close to either input.

use std::collections::HashSet;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Point;
use crate::mapper::Analogy;
use crate::scene::{Geometry, GraphicObject, GrayBitmap, ObjectPath, Scene, SceneError, SceneRelation, Segment, Shape};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BlendError {
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error("bitmaps differ in size: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),
}

/// An object name split at underscores: `right_leg_1` is prefix `right`,
/// base `leg`, suffix `1`. A trailing all-digit segment is the suffix; the
/// last remaining segment is the base; anything before it is the prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartName {
    pub raw: String,
    pub prefix: Option<String>,
    pub base: String,
    pub suffix: Option<String>,
}

impl PartName {
    pub fn parse(raw: &str) -> PartName {
        let mut segs: Vec<&str> = raw.split('_').collect();
        let suffix = match segs.last() {
            Some(last) if segs.len() >= 2 && !last.is_empty() && last.chars().all(|c| c.is_ascii_digit()) => {
                segs.pop().map(str::to_string)
            }
            _ => None,
        };
        let base = segs.pop().unwrap_or_default().to_string();
        let prefix = (!segs.is_empty()).then(|| segs.join("_"));
        PartName {
            raw: raw.to_string(),
            prefix,
            base,
            suffix,
        }
    }

    /// The same prefix and suffix around a different base.
    pub fn with_base(&self, base: &str) -> String {
        let mut parts: Vec<&str> = Vec::new();
        if let Some(p) = &self.prefix {
            parts.push(p);
        }
        parts.push(base);
        if let Some(s) = &self.suffix {
            parts.push(s);
        }
        parts.join("_")
    }

    pub fn compose(&self) -> String {
        self.with_base(&self.base)
    }

    pub fn has_affixes(&self) -> bool {
        self.prefix.is_some() || self.suffix.is_some()
    }
}

/// Which side of the analogy supplies the base scene.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseChoice {
    Left,
    Right,
}

impl BaseChoice {
    pub fn other(self) -> BaseChoice {
        match self {
            BaseChoice::Left => BaseChoice::Right,
            BaseChoice::Right => BaseChoice::Left,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BaseChoice::Left => "left",
            BaseChoice::Right => "right",
        }
    }

    /// Mapping pairs oriented as (base concept, donor concept).
    pub fn oriented(self, analogy: &Analogy) -> Vec<(String, String)> {
        analogy
            .mappings
            .iter()
            .map(|(l, r)| match self {
                BaseChoice::Left => (l.clone(), r.clone()),
                BaseChoice::Right => (r.clone(), l.clone()),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BlendParams {
    /// Raster size used by the similarity gate.
    pub raster: (u32, u32),
    pub similarity_threshold: f64,
    /// Chance that each matched part is actually swapped.
    pub replace_prob: f64,
    /// Scale replacements uniformly to the size of the part they replace.
    pub scale_to_fit: bool,
}

impl Default for BlendParams {
    fn default() -> Self {
        BlendParams {
            raster: (256, 256),
            similarity_threshold: 0.02,
            replace_prob: 0.5,
            scale_to_fit: false,
        }
    }
}

/// A base scene with a stable identifier and a cached gate raster.
#[derive(Debug)]
pub struct Representation {
    pub id: String,
    pub scene: Scene,
    raster: OnceLock<((u32, u32), GrayBitmap)>,
}

impl Clone for Representation {
    fn clone(&self) -> Self {
        Representation::new(self.id.clone(), self.scene.clone())
    }
}

impl Representation {
    pub fn new(id: impl Into<String>, scene: Scene) -> Self {
        Representation {
            id: id.into(),
            scene,
            raster: OnceLock::new(),
        }
    }

    pub fn raster(&self, size: (u32, u32)) -> GrayBitmap {
        let (cached_size, bmp) = self.raster.get_or_init(|| (size, self.scene.rasterize(size.0, size.1)));
        if *cached_size == size {
            bmp.clone()
        } else {
            self.scene.rasterize(size.0, size.1)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replacement {
    /// Replaced part in the base scene.
    pub base: ObjectPath,
    /// Donor part that took its place.
    pub donor: ObjectPath,
    /// Where the copy lives in the blend.
    pub at: ObjectPath,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Composition {
    /// Donor part that was copied.
    pub donor: ObjectPath,
    /// Matched donor part it is related to.
    pub related_to: ObjectPath,
    /// Where the copy lives in the blend.
    pub at: ObjectPath,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlendProvenance {
    pub analogy: Analogy,
    pub base_choice: BaseChoice,
    pub base_concept: String,
    pub base_scene: String,
    pub donor_scene: String,
    pub seed: u64,
    pub replacements: Vec<Replacement>,
    pub compositions: Vec<Composition>,
}

impl BlendProvenance {
    /// Every replacement swaps a part whose base name maps to the donor
    /// part's base name under the analogy.
    pub fn respects_analogy(&self) -> bool {
        let pairs: HashSet<(String, String)> = self.base_choice.oriented(&self.analogy).into_iter().collect();
        self.replacements.iter().all(|r| {
            let a = PartName::parse(r.base.name()).base;
            let b = PartName::parse(r.donor.name()).base;
            pairs.contains(&(a, b))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Blend {
    pub scene: Scene,
    pub provenance: BlendProvenance,
}

impl Blend {
    /// Structural checks that every produced blend must pass.
    pub fn check(&self) -> Result<(), String> {
        self.scene.validate().map_err(|e| e.to_string())?;
        if !self.provenance.respects_analogy() {
            return Err("replacement outside the analogy".into());
        }
        Ok(())
    }
}

/// Objects below the root whose base name equals `mapping_name`, in
/// pre-order. Plurals (`legs` for `leg`) do not match.
pub fn find_parts(scene: &Scene, mapping_name: &str) -> Vec<ObjectPath> {
    scene
        .walk()
        .into_iter()
        .filter(|(p, _)| !p.is_root() && PartName::parse(p.name()).base == mapping_name)
        .map(|(p, _)| p)
        .collect()
}

fn first_named(scene: &Scene, name: &str) -> Option<ObjectPath> {
    scene
        .walk()
        .into_iter()
        .find(|(p, _)| !p.is_root() && p.name() == name)
        .map(|(p, _)| p)
}

/// Donor part for a found base part: the full affixed name first
/// (`right_arm_1`), then the bare mapped name (`arm`), then any part whose
/// base name is the mapped name (`left_arm`).
pub fn match_donor_part(donor: &Scene, found: &PartName, mapping_target: &str) -> Option<ObjectPath> {
    if found.has_affixes() {
        if let Some(p) = first_named(donor, &found.with_base(mapping_target)) {
            return Some(p);
        }
    }
    first_named(donor, mapping_target).or_else(|| find_parts(donor, mapping_target).into_iter().next())
}

fn unique_child_name(parent: &GraphicObject, wanted: &str, ignore: &str) -> String {
    let taken = |n: &str| parent.children.iter().any(|c| c.name == n && c.name != ignore);
    if !taken(wanted) {
        return wanted.to_string();
    }
    (2..)
        .map(|i| format!("{wanted}_{i}"))
        .find(|n| !taken(n))
        .expect("unbounded search")
}

fn scale_shape(shape: &Shape, s: f64) -> Shape {
    let sp = |p: Point| p * s;
    let geometry = match &shape.geometry {
        Geometry::Polyline { points } => Geometry::Polyline {
            points: points.iter().copied().map(sp).collect(),
        },
        Geometry::Polygon { points } => Geometry::Polygon {
            points: points.iter().copied().map(sp).collect(),
        },
        Geometry::Ellipse { center, radii } => Geometry::Ellipse {
            center: sp(*center),
            radii: sp(*radii),
        },
        Geometry::Path {
            start,
            segments,
            closed,
        } => Geometry::Path {
            start: sp(*start),
            segments: segments
                .iter()
                .map(|seg| match *seg {
                    Segment::Line(p) => Segment::Line(sp(p)),
                    Segment::Cubic(a, b, c) => Segment::Cubic(sp(a), sp(b), sp(c)),
                })
                .collect(),
            closed: *closed,
        },
    };
    Shape::new(geometry, shape.style.clone())
}

/// Scales a subtree about its own origin.
fn scale_subtree(obj: &mut GraphicObject, s: f64) {
    if let Some(shape) = &obj.shape {
        obj.shape = Some(scale_shape(shape, s));
    }
    for c in &mut obj.children {
        c.offset = c.offset * s;
        scale_subtree(c, s);
    }
}

/// Swaps the base part `pa` for a copy of the donor part `pb`.
///
/// The copy takes `pa`'s slot under the same parent, is translated so its
/// bounding-box center sits where `pa`'s was, and inherits every relation
/// that named `pa`. Returns the copy's path.
pub fn replace_part(
    scene: &mut Scene,
    pa: &ObjectPath,
    donor: &Scene,
    pb: &ObjectPath,
    scale_to_fit: bool,
) -> Result<ObjectPath, SceneError> {
    let parent_path = pa.parent().ok_or_else(|| SceneError::UnknownPath(pa.to_string()))?;
    if !scene.resolves(pa) {
        return Err(SceneError::UnknownPath(pa.to_string()));
    }
    let donor_obj = donor
        .object(pb)
        .filter(|_| !pb.is_root())
        .ok_or_else(|| SceneError::UnknownPath(pb.to_string()))?;

    let pa_box = scene.bounding_box(pa).ok();
    let anchor = match pa_box {
        Some(b) => b.center(),
        None => scene.absolute_position(pa)?,
    };
    let mut copy = donor_obj.clone();
    let donor_origin = donor.absolute_position(pb)?;
    let mut local_center = match donor.bounding_box(pb) {
        Ok(b) => b.center() - donor_origin,
        Err(_) => Point::ZERO,
    };
    if scale_to_fit {
        if let (Some(a), Ok(b)) = (pa_box, donor.bounding_box(pb)) {
            let target = a.width().max(a.height());
            let current = b.width().max(b.height());
            if target > 0.0 && current > 0.0 {
                let s = target / current;
                scale_subtree(&mut copy, s);
                local_center = local_center * s;
            }
        }
    }
    let parent_abs = scene.absolute_position(&parent_path)?;
    copy.offset = anchor - local_center - parent_abs;

    let parent = scene.object_mut(&parent_path).expect("parent resolves");
    let old_name = pa.name().to_string();
    copy.name = unique_child_name(parent, &copy.name, &old_name);
    let new_path = parent_path.child(&copy.name);
    let slot = parent
        .children
        .iter()
        .position(|c| c.name == old_name)
        .expect("pa resolves");
    parent.children[slot] = copy;

    for r in &mut scene.relations {
        if &r.subject == pa {
            r.subject = new_path.clone();
        }
        if &r.object == pa {
            r.object = new_path.clone();
        }
    }
    Ok(new_path)
}

fn contains_name(scene: &Scene, name: &str) -> bool {
    scene.walk().iter().any(|(p, _)| !p.is_root() && p.name() == name)
}

/// Copies donor parts related to `pb` onto `anchor` (the object standing in
/// `pb`'s place in the blend). A part is copied only when the blend has no
/// object of that name and `donor_mapped` does not contain its base name. The
/// copy keeps its offset relative to `pb`, and its relations with `pb` are
/// re-pointed to the anchor.
pub fn compose_attachments(
    scene: &mut Scene,
    donor: &Scene,
    pb: &ObjectPath,
    donor_mapped: &HashSet<String>,
    anchor: &ObjectPath,
) -> Result<Vec<Composition>, SceneError> {
    if !scene.resolves(anchor) {
        return Err(SceneError::UnknownPath(anchor.to_string()));
    }
    let pb_abs = donor.absolute_position(pb)?;
    let mut related: Vec<&ObjectPath> = Vec::new();
    for r in &donor.relations {
        let other = if &r.subject == pb {
            &r.object
        } else if &r.object == pb {
            &r.subject
        } else {
            continue;
        };
        if other.starts_with(pb) || pb.starts_with(other) || related.contains(&other) {
            continue;
        }
        related.push(other);
    }

    let mut out = Vec::new();
    for q in related {
        let name = q.name();
        if contains_name(scene, name)
            || donor_mapped.contains(name)
            || donor_mapped.contains(&PartName::parse(name).base)
        {
            continue;
        }
        let Some(q_obj) = donor.object(q) else { continue };
        let mut copy = q_obj.clone();
        copy.offset = donor.absolute_position(q)? - pb_abs;
        let at = anchor.child(name);
        scene.object_mut(anchor).expect("anchor resolves").children.push(copy);
        for r in &donor.relations {
            let repoint = |p: &ObjectPath| {
                if p == pb {
                    Some(anchor.clone())
                } else if p == q {
                    Some(at.clone())
                } else {
                    None
                }
            };
            if let (Some(s), Some(o)) = (repoint(&r.subject), repoint(&r.object)) {
                scene.relations.push(SceneRelation::new(s, r.rel_type, o));
            }
        }
        out.push(Composition {
            donor: q.clone(),
            related_to: pb.clone(),
            at,
        });
    }
    Ok(out)
}

/// Drops relations whose endpoints no longer resolve and pulls objects whose
/// absolute position strays outside twice the canvas back onto the canvas.
pub fn repair_consistency(scene: &mut Scene) {
    let relations = std::mem::take(&mut scene.relations);
    scene.relations = relations
        .into_iter()
        .filter(|r| {
            !r.subject.is_root()
                && !r.object.is_root()
                && r.subject != r.object
                && scene.resolves(&r.subject)
                && scene.resolves(&r.object)
        })
        .collect();

    let (w, h) = scene.canvas;
    fn pull(obj: &mut GraphicObject, parent_abs: Point, w: f64, h: f64) {
        let abs = parent_abs + obj.offset;
        let outside = abs.x < -w / 2.0 || abs.x > 1.5 * w || abs.y < -h / 2.0 || abs.y > 1.5 * h;
        if outside {
            let clamped = Point::new(abs.x.clamp(0.0, w), abs.y.clamp(0.0, h));
            obj.offset = clamped - parent_abs;
        }
        let abs = parent_abs + obj.offset;
        for c in &mut obj.children {
            pull(c, abs, w, h);
        }
    }
    pull(&mut scene.root, Point::ZERO, w, h);
}

/// Root-mean-square difference of two grayscale bitmaps, normalized to [0, 1].
pub fn rmse(a: &GrayBitmap, b: &GrayBitmap) -> Result<f64, BlendError> {
    if a.width != b.width || a.height != b.height {
        return Err(BlendError::DimensionMismatch(a.width, a.height, b.width, b.height));
    }
    if a.pixels.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = a
        .pixels
        .iter()
        .zip(&b.pixels)
        .map(|(&x, &y)| {
            let d = (x as f64 - y as f64) / 255.0;
            d * d
        })
        .sum();
    Ok((sum / a.pixels.len() as f64).sqrt())
}

/// True when the blend renders closer than `threshold` to either input.
pub fn is_too_similar(blend: &Scene, ra: &Representation, rb: &Representation, params: &BlendParams) -> bool {
    let (w, h) = params.raster;
    let b = blend.rasterize(w, h);
    let da = rmse(&b, &ra.raster(params.raster)).expect("same raster size");
    let db = rmse(&b, &rb.raster(params.raster)).expect("same raster size");
    da.min(db) < params.similarity_threshold
}

struct Candidate {
    base_part: ObjectPath,
    donor_part: ObjectPath,
}

/// Runs the whole construction for one analogy, base choice and seed.
/// Returns `None` when the similarity gate rejects the result.
pub fn construct_blend(
    analogy: &Analogy,
    base_choice: BaseChoice,
    ra: &Representation,
    rb: &Representation,
    seed: u64,
    params: &BlendParams,
) -> Result<Option<Blend>, BlendError> {
    let pairs = base_choice.oriented(analogy);
    let donor_mapped: HashSet<String> = pairs.iter().map(|(_, d)| d.clone()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut cands = Vec::new();
    for (a, b) in &pairs {
        for pa in find_parts(&ra.scene, a) {
            if let Some(pb) = match_donor_part(&rb.scene, &PartName::parse(pa.name()), b) {
                cands.push(Candidate {
                    base_part: pa,
                    donor_part: pb,
                });
            }
        }
    }

    let mut selected: Vec<bool> = cands.iter().map(|_| rng.gen_bool(params.replace_prob)).collect();
    if !cands.is_empty() && !selected.iter().any(|s| *s) {
        let i = rng.gen_range(0..cands.len());
        selected[i] = true;
    }
    // A part nested in another replaced part disappears with it.
    for i in 0..cands.len() {
        let nested = (0..cands.len()).any(|j| {
            j != i
                && selected[j]
                && cands[i].base_part != cands[j].base_part
                && cands[i].base_part.starts_with(&cands[j].base_part)
        });
        if nested {
            selected[i] = false;
        }
    }

    let mut scene = ra.scene.clone();
    let mut replacements = Vec::new();
    let mut anchors: Vec<Option<ObjectPath>> = Vec::with_capacity(cands.len());
    for (c, &sel) in cands.iter().zip(&selected) {
        if sel {
            let at = replace_part(&mut scene, &c.base_part, &rb.scene, &c.donor_part, params.scale_to_fit)?;
            replacements.push(Replacement {
                base: c.base_part.clone(),
                donor: c.donor_part.clone(),
                at: at.clone(),
            });
            anchors.push(Some(at));
        } else {
            anchors.push(None);
        }
    }
    let mut compositions = Vec::new();
    for (c, anchor) in cands.iter().zip(anchors) {
        let anchor = anchor.unwrap_or_else(|| c.base_part.clone());
        if !scene.resolves(&anchor) {
            continue;
        }
        compositions.extend(compose_attachments(&mut scene, &rb.scene, &c.donor_part, &donor_mapped, &anchor)?);
    }
    repair_consistency(&mut scene);

    if is_too_similar(&scene, ra, rb, params) {
        return Ok(None);
    }
    let base_concept = ra.scene.concept.clone();
    Ok(Some(Blend {
        scene,
        provenance: BlendProvenance {
            analogy: analogy.clone(),
            base_choice,
            base_concept,
            base_scene: ra.id.clone(),
            donor_scene: rb.id.clone(),
            seed,
            replacements,
            compositions,
        },
    }))
}
