//! Composite graphic objects.
//!
//! A [`Scene`] is a tree of named [`GraphicObject`]s. Every object stores its
//! offset relative to its parent, so moving an object carries its children
//! along. Shape geometry is expressed in the owning object's local frame.
//! Spatial relations are kept on the scene and refer to objects by
//! slash-joined paths that start below the root (`head/eye`).

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{self, BBox, Point};
use crate::relations::RelationType;

/// Side length of the canonical canvas, in abstract units.
pub const CANONICAL_CANVAS: f64 = 1000.0;

const ELLIPSE_STEPS: usize = 64;
const CUBIC_STEPS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SceneError {
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("relation {0} refers to a missing object")]
    DanglingRelation(usize),
    #[error("relation {0} relates an object to itself")]
    SelfRelation(usize),
    #[error("duplicate object name `{name}` under `{parent}`")]
    DuplicateName { parent: String, name: String },
    #[error("invalid object name `{0}`")]
    InvalidName(String),
    #[error("invalid shape on `{path}`: {reason}")]
    InvalidShape { path: String, reason: String },
    #[error("canvas must be strictly positive")]
    InvalidCanvas,
    #[error("unknown object path `{0}`")]
    UnknownPath(String),
    #[error("object `{0}` has no geometry")]
    EmptyGeometry(String),
}

/// Location of an object below the scene root. The empty path is the root.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ObjectPath(Vec<String>);

impl ObjectPath {
    pub fn root() -> Self {
        ObjectPath(Vec::new())
    }

    pub fn from_segments<I, S>(segments: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ObjectPath(segments.into_iter().map(Into::into).collect())
    }

    pub fn segments(&self) -> &[String] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    /// Last segment; empty for the root.
    pub fn name(&self) -> &str {
        self.0.last().map(String::as_str).unwrap_or("")
    }

    pub fn parent(&self) -> Option<ObjectPath> {
        if self.0.is_empty() {
            None
        } else {
            Some(ObjectPath(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn child(&self, name: &str) -> ObjectPath {
        let mut v = self.0.clone();
        v.push(name.to_string());
        ObjectPath(v)
    }

    /// True when `self` equals `other` or lies inside its subtree.
    pub fn starts_with(&self, other: &ObjectPath) -> bool {
        self.0.len() >= other.0.len() && self.0[..other.0.len()] == other.0[..]
    }

    /// Replaces the `prefix` part of this path with `replacement`.
    pub fn rebase(&self, prefix: &ObjectPath, replacement: &ObjectPath) -> Option<ObjectPath> {
        if !self.starts_with(prefix) {
            return None;
        }
        let mut v = replacement.0.clone();
        v.extend_from_slice(&self.0[prefix.0.len()..]);
        Some(ObjectPath(v))
    }
}

impl fmt::Display for ObjectPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join("/"))
    }
}

impl FromStr for ObjectPath {
    type Err = SceneError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Ok(ObjectPath::root());
        }
        let segs: Vec<String> = s.split('/').map(str::to_string).collect();
        if let Some(bad) = segs.iter().find(|seg| !valid_name(seg)) {
            return Err(SceneError::InvalidName(bad.clone()));
        }
        Ok(ObjectPath(segs))
    }
}

impl TryFrom<String> for ObjectPath {
    type Error = SceneError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<ObjectPath> for String {
    fn from(p: ObjectPath) -> String {
        p.to_string()
    }
}

pub fn valid_name(name: &str) -> bool {
    !name.is_empty() && !name.chars().any(|c| c.is_whitespace() || c == '/')
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl Rgb {
    pub const BLACK: Rgb = Rgb(0, 0, 0);
    pub const WHITE: Rgb = Rgb(255, 255, 255);

    pub fn hex(&self) -> String {
        format!("#{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }

    pub fn parse_hex(s: &str) -> Option<Rgb> {
        let h = s.strip_prefix('#')?;
        let digit = |i: usize, len: usize| u8::from_str_radix(h.get(i..i + len)?, 16).ok();
        match h.len() {
            6 => Some(Rgb(digit(0, 2)?, digit(2, 2)?, digit(4, 2)?)),
            3 => Some(Rgb(digit(0, 1)? * 17, digit(1, 1)? * 17, digit(2, 1)? * 17)),
            _ => None,
        }
    }
}

impl Serialize for Rgb {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.hex())
    }
}

impl<'de> Deserialize<'de> for Rgb {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Rgb::parse_hex(&s).ok_or_else(|| serde::de::Error::custom(format!("bad color `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Style {
    pub stroke_width: f64,
    pub stroke: Option<Rgb>,
    pub fill: Option<Rgb>,
}

impl Default for Style {
    fn default() -> Self {
        Style {
            stroke_width: 4.0,
            stroke: Some(Rgb::BLACK),
            fill: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Segment {
    #[serde(rename = "L")]
    Line(Point),
    #[serde(rename = "C")]
    Cubic(Point, Point, Point),
}

impl Segment {
    pub fn end(&self) -> Point {
        match *self {
            Segment::Line(p) | Segment::Cubic(_, _, p) => p,
        }
    }

    fn translated(self, d: Point) -> Segment {
        match self {
            Segment::Line(p) => Segment::Line(p + d),
            Segment::Cubic(a, b, c) => Segment::Cubic(a + d, b + d, c + d),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Geometry {
    Polyline { points: Vec<Point> },
    Polygon { points: Vec<Point> },
    Ellipse { center: Point, radii: Point },
    Path { start: Point, segments: Vec<Segment>, closed: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shape {
    #[serde(flatten)]
    pub geometry: Geometry,
    #[serde(default)]
    pub style: Style,
}

impl Shape {
    pub fn new(geometry: Geometry, style: Style) -> Self {
        Shape { geometry, style }
    }

    pub fn is_closed(&self) -> bool {
        match &self.geometry {
            Geometry::Polyline { .. } => false,
            Geometry::Polygon { .. } | Geometry::Ellipse { .. } => true,
            Geometry::Path { closed, .. } => *closed,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let finite = |p: &Point| p.is_finite();
        match &self.geometry {
            Geometry::Polyline { points } | Geometry::Polygon { points } => {
                if points.len() < 2 {
                    return Err("needs at least 2 points".into());
                }
                if !points.iter().all(finite) {
                    return Err("non-finite coordinate".into());
                }
            }
            Geometry::Ellipse { center, radii } => {
                if !(radii.x > 0.0 && radii.y > 0.0) || !finite(center) || !finite(radii) {
                    return Err("ellipse radii must be positive".into());
                }
            }
            Geometry::Path { start, segments, .. } => {
                if segments.is_empty() {
                    return Err("path has no segments".into());
                }
                let ok = finite(start)
                    && segments.iter().all(|s| match s {
                        Segment::Line(p) => finite(p),
                        Segment::Cubic(a, b, c) => finite(a) && finite(b) && finite(c),
                    });
                if !ok {
                    return Err("non-finite coordinate".into());
                }
            }
        }
        if !(self.style.stroke_width >= 0.0 && self.style.stroke_width.is_finite()) {
            return Err("stroke width must be non-negative".into());
        }
        Ok(())
    }

    pub fn translated(&self, d: Point) -> Shape {
        let geometry = match &self.geometry {
            Geometry::Polyline { points } => Geometry::Polyline {
                points: points.iter().map(|p| *p + d).collect(),
            },
            Geometry::Polygon { points } => Geometry::Polygon {
                points: points.iter().map(|p| *p + d).collect(),
            },
            Geometry::Ellipse { center, radii } => Geometry::Ellipse {
                center: *center + d,
                radii: *radii,
            },
            Geometry::Path {
                start,
                segments,
                closed,
            } => Geometry::Path {
                start: *start + d,
                segments: segments.iter().map(|s| s.translated(d)).collect(),
                closed: *closed,
            },
        };
        Shape {
            geometry,
            style: self.style.clone(),
        }
    }

    pub fn bbox(&self) -> BBox {
        match &self.geometry {
            Geometry::Polyline { points } | Geometry::Polygon { points } => {
                BBox::from_points(points.iter().copied()).expect("validated shape")
            }
            Geometry::Ellipse { center, radii } => BBox::new(*center - *radii, *center + *radii),
            Geometry::Path { start, segments, .. } => {
                let mut b = BBox::new(*start, *start);
                let mut cur = *start;
                for s in segments {
                    b = match *s {
                        Segment::Line(p) => b.include(p),
                        Segment::Cubic(c1, c2, p) => b.union(geom::cubic_bbox(cur, c1, c2, p)),
                    };
                    cur = s.end();
                }
                b
            }
        }
    }

    /// Outline approximated by line segments. Closed shapes repeat their
    /// first point at the end.
    pub fn flatten(&self) -> Vec<Point> {
        let mut pts = match &self.geometry {
            Geometry::Polyline { points } | Geometry::Polygon { points } => points.clone(),
            Geometry::Ellipse { center, radii } => (0..ELLIPSE_STEPS)
                .map(|i| {
                    let a = std::f64::consts::TAU * i as f64 / ELLIPSE_STEPS as f64;
                    Point::new(center.x + radii.x * a.cos(), center.y + radii.y * a.sin())
                })
                .collect(),
            Geometry::Path { start, segments, .. } => {
                let mut pts = vec![*start];
                let mut cur = *start;
                for s in segments {
                    match *s {
                        Segment::Line(p) => pts.push(p),
                        Segment::Cubic(c1, c2, p) => {
                            for i in 1..=CUBIC_STEPS {
                                pts.push(geom::cubic_point(cur, c1, c2, p, i as f64 / CUBIC_STEPS as f64));
                            }
                        }
                    }
                    cur = s.end();
                }
                pts
            }
        };
        if self.is_closed() && pts.first() != pts.last() {
            pts.push(pts[0]);
        }
        pts
    }

    pub fn area(&self) -> f64 {
        if !self.is_closed() {
            return 0.0;
        }
        match &self.geometry {
            Geometry::Ellipse { radii, .. } => std::f64::consts::PI * radii.x * radii.y,
            _ => geom::ring_area(&self.flatten()),
        }
    }

    /// Membership test: analytic for ellipses, even-odd for closed outlines,
    /// and a stroke-width band around open polylines.
    pub fn contains(&self, p: Point) -> bool {
        match &self.geometry {
            Geometry::Ellipse { center, radii } => {
                let dx = (p.x - center.x) / radii.x;
                let dy = (p.y - center.y) / radii.y;
                dx * dx + dy * dy <= 1.0
            }
            _ if self.is_closed() => geom::point_in_ring(&self.flatten(), p),
            _ => {
                let band = (self.style.stroke_width / 2.0).max(0.5);
                self.flatten()
                    .windows(2)
                    .any(|w| geom::distance_to_segment(p, w[0], w[1]) <= band)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphicObject {
    pub name: String,
    #[serde(default)]
    pub offset: Point,
    #[serde(default)]
    pub shape: Option<Shape>,
    #[serde(default)]
    pub children: Vec<GraphicObject>,
}

impl GraphicObject {
    pub fn new(name: impl Into<String>) -> Self {
        GraphicObject {
            name: name.into(),
            offset: Point::ZERO,
            shape: None,
            children: Vec::new(),
        }
    }

    pub fn with_offset(mut self, offset: Point) -> Self {
        self.offset = offset;
        self
    }

    pub fn with_shape(mut self, shape: Shape) -> Self {
        self.shape = Some(shape);
        self
    }

    pub fn with_child(mut self, child: GraphicObject) -> Self {
        self.children.push(child);
        self
    }

    pub fn child(&self, name: &str) -> Option<&GraphicObject> {
        self.children.iter().find(|c| c.name == name)
    }

    pub fn child_mut(&mut self, name: &str) -> Option<&mut GraphicObject> {
        self.children.iter_mut().find(|c| c.name == name)
    }

    /// Number of objects in this subtree, including itself.
    pub fn count(&self) -> usize {
        1 + self.children.iter().map(GraphicObject::count).sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneRelation {
    #[serde(rename = "a")]
    pub subject: ObjectPath,
    #[serde(rename = "type")]
    pub rel_type: RelationType,
    #[serde(rename = "b")]
    pub object: ObjectPath,
}

impl SceneRelation {
    pub fn new(subject: ObjectPath, rel_type: RelationType, object: ObjectPath) -> Self {
        SceneRelation {
            subject,
            rel_type,
            object,
        }
    }
}

impl fmt::Display for SceneRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.rel_type, self.object)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub concept: String,
    #[serde(with = "canvas_serde")]
    pub canvas: (f64, f64),
    pub root: GraphicObject,
    #[serde(default)]
    pub relations: Vec<SceneRelation>,
}

mod canvas_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(c: &(f64, f64), s: S) -> Result<S::Ok, S::Error> {
        [c.0, c.1].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(f64, f64), D::Error> {
        let [w, h] = <[f64; 2]>::deserialize(d)?;
        Ok((w, h))
    }
}

/// Grayscale raster, row-major, 0 = black, 255 = white.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayBitmap {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<u8>,
}

impl GrayBitmap {
    pub fn filled(width: u32, height: u32, value: u8) -> Self {
        GrayBitmap {
            width,
            height,
            pixels: vec![value; (width * height) as usize],
        }
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.pixels[(y * self.width + x) as usize]
    }

    /// Box-filter downscale by two in each direction.
    pub fn downscale_2x(&self) -> GrayBitmap {
        let (w, h) = (self.width / 2, self.height / 2);
        let mut pixels = Vec::with_capacity((w * h) as usize);
        for y in 0..h {
            for x in 0..w {
                let sum: u32 = [(0, 0), (1, 0), (0, 1), (1, 1)]
                    .iter()
                    .map(|(dx, dy)| self.get(2 * x + dx, 2 * y + dy) as u32)
                    .sum();
                pixels.push(((sum + 2) / 4) as u8);
            }
        }
        GrayBitmap {
            width: w,
            height: h,
            pixels,
        }
    }
}

impl Scene {
    pub fn new(concept: impl Into<String>, root: GraphicObject) -> Self {
        Scene {
            concept: concept.into(),
            canvas: (CANONICAL_CANVAS, CANONICAL_CANVAS),
            root,
            relations: Vec::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<Scene, SceneError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let scene: Scene = serde_path_to_error::deserialize(de).map_err(|e| SceneError::Schema {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        scene.validate()?;
        Ok(scene)
    }

    /// Canonical JSON form.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }

    /// Checks tree integrity, shapes, canvas and relation endpoints.
    pub fn validate(&self) -> Result<(), SceneError> {
        if !(self.canvas.0 > 0.0 && self.canvas.1 > 0.0) {
            return Err(SceneError::InvalidCanvas);
        }
        fn check(obj: &GraphicObject, path: &ObjectPath, is_root: bool) -> Result<(), SceneError> {
            if !valid_name(&obj.name) {
                return Err(SceneError::InvalidName(obj.name.clone()));
            }
            if !obj.offset.is_finite() {
                return Err(SceneError::InvalidShape {
                    path: path.to_string(),
                    reason: "non-finite offset".into(),
                });
            }
            if let Some(shape) = &obj.shape {
                shape.validate().map_err(|reason| SceneError::InvalidShape {
                    path: if is_root { obj.name.clone() } else { path.to_string() },
                    reason,
                })?;
            }
            let mut seen = HashSet::new();
            for c in &obj.children {
                if !seen.insert(c.name.as_str()) {
                    return Err(SceneError::DuplicateName {
                        parent: if is_root { obj.name.clone() } else { path.to_string() },
                        name: c.name.clone(),
                    });
                }
                check(c, &path.child(&c.name), false)?;
            }
            Ok(())
        }
        check(&self.root, &ObjectPath::root(), true)?;
        for (i, r) in self.relations.iter().enumerate() {
            if r.subject.is_root() || r.object.is_root() || self.object(&r.subject).is_none() || self.object(&r.object).is_none() {
                return Err(SceneError::DanglingRelation(i));
            }
            if r.subject == r.object {
                return Err(SceneError::SelfRelation(i));
            }
        }
        Ok(())
    }

    pub fn object(&self, path: &ObjectPath) -> Option<&GraphicObject> {
        path.segments()
            .iter()
            .try_fold(&self.root, |obj, seg| obj.child(seg))
    }

    pub fn object_mut(&mut self, path: &ObjectPath) -> Option<&mut GraphicObject> {
        let mut obj = &mut self.root;
        for seg in path.segments() {
            obj = obj.child_mut(seg)?;
        }
        Some(obj)
    }

    fn require(&self, path: &ObjectPath) -> Result<&GraphicObject, SceneError> {
        self.object(path).ok_or_else(|| SceneError::UnknownPath(path.to_string()))
    }

    pub fn resolves(&self, path: &ObjectPath) -> bool {
        self.object(path).is_some()
    }

    /// All objects in pre-order, root first.
    pub fn walk(&self) -> Vec<(ObjectPath, &GraphicObject)> {
        fn go<'s>(obj: &'s GraphicObject, path: ObjectPath, out: &mut Vec<(ObjectPath, &'s GraphicObject)>) {
            for c in &obj.children {
                let p = path.child(&c.name);
                out.push((p.clone(), c));
                go(c, p, out);
            }
        }
        let mut out = vec![(ObjectPath::root(), &self.root)];
        go(&self.root, ObjectPath::root(), &mut out);
        out
    }

    pub fn object_count(&self) -> usize {
        self.root.count()
    }

    /// Sum of offsets from the root down to `path`.
    pub fn absolute_position(&self, path: &ObjectPath) -> Result<Point, SceneError> {
        let mut obj = &self.root;
        let mut pos = obj.offset;
        for seg in path.segments() {
            obj = obj.child(seg).ok_or_else(|| SceneError::UnknownPath(path.to_string()))?;
            pos += obj.offset;
        }
        Ok(pos)
    }

    /// Absolute shapes of `path` and its descendants in paint order,
    /// skipping any subtree rooted at a path in `exclude`.
    pub fn shapes_under(&self, path: &ObjectPath, exclude: Option<&ObjectPath>) -> Result<Vec<Shape>, SceneError> {
        let obj = self.require(path)?;
        let origin = self.absolute_position(path)? - obj.offset;
        let mut out = Vec::new();
        fn go(obj: &GraphicObject, path: ObjectPath, parent_abs: Point, exclude: Option<&ObjectPath>, out: &mut Vec<Shape>) {
            if exclude.is_some_and(|e| path.starts_with(e)) {
                return;
            }
            let abs = parent_abs + obj.offset;
            if let Some(s) = &obj.shape {
                out.push(s.translated(abs));
            }
            for c in &obj.children {
                go(c, path.child(&c.name), abs, exclude, out);
            }
        }
        go(obj, path.clone(), origin, exclude, &mut out);
        Ok(out)
    }

    pub fn bounding_box(&self, path: &ObjectPath) -> Result<BBox, SceneError> {
        self.bounding_box_excluding(path, None)
    }

    pub fn bounding_box_excluding(&self, path: &ObjectPath, exclude: Option<&ObjectPath>) -> Result<BBox, SceneError> {
        self.shapes_under(path, exclude)?
            .iter()
            .map(Shape::bbox)
            .reduce(BBox::union)
            .ok_or_else(|| SceneError::EmptyGeometry(path.to_string()))
    }

    /// Whether `p` lies in the region covered by `path`'s subtree.
    pub fn region_contains(&self, path: &ObjectPath, p: Point, exclude: Option<&ObjectPath>) -> Result<bool, SceneError> {
        let shapes = self.shapes_under(path, exclude)?;
        if shapes.is_empty() {
            return Err(SceneError::EmptyGeometry(path.to_string()));
        }
        Ok(shapes.iter().any(|s| s.contains(p)))
    }

    /// `n` deterministic sample points on and inside the geometry of `path`
    /// (descendants included). Half go on outlines, spread by arc length with
    /// one jittered point per stratum; the rest fall inside closed shapes.
    pub fn sample_points(&self, path: &ObjectPath, n: usize, seed: u64) -> Result<Vec<Point>, SceneError> {
        let shapes = self.shapes_under(path, None)?;
        if shapes.is_empty() {
            return Err(SceneError::EmptyGeometry(path.to_string()));
        }
        sample_shapes(&shapes, n, seed).ok_or_else(|| SceneError::EmptyGeometry(path.to_string()))
    }

    /// Moves the whole scene rigidly.
    pub fn translate(&mut self, d: Point) {
        self.root.offset += d;
    }

    /// Renders to grayscale on a white background, canvas stretched to the
    /// pixel grid, antialiased.
    pub fn rasterize(&self, width: u32, height: u32) -> GrayBitmap {
        crate::raster::rasterize(self, width, height)
    }
}

/// Splits `total` into integer parts proportional to `weights` by largest
/// remainder, ties to the lower index.
fn apportion(weights: &[f64], total: usize) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    if sum <= 0.0 || weights.is_empty() {
        let mut v = vec![0; weights.len()];
        if let Some(first) = v.first_mut() {
            *first = total;
        }
        return v;
    }
    let exact: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    let mut parts: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut rest = total - parts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = exact[a] - exact[a].floor();
        let fb = exact[b] - exact[b].floor();
        fb.partial_cmp(&fa).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b))
    });
    for i in order {
        if rest == 0 {
            break;
        }
        parts[i] += 1;
        rest -= 1;
    }
    parts
}

fn sample_shapes(shapes: &[Shape], n: usize, seed: u64) -> Option<Vec<Point>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let outlines: Vec<Vec<Point>> = shapes.iter().map(Shape::flatten).collect();
    let lengths: Vec<f64> = outlines.iter().map(|o| geom::polyline_length(o)).collect();
    let areas: Vec<f64> = shapes.iter().map(Shape::area).collect();
    let has_interior = areas.iter().any(|a| *a > 0.0);
    let interior_n = if has_interior { n / 2 } else { 0 };
    let outline_n = n - interior_n;

    let mut out = Vec::with_capacity(n);
    for (outline, k) in outlines.iter().zip(apportion(&lengths, outline_n)) {
        let len = geom::polyline_length(outline);
        for i in 0..k {
            let s = (i as f64 + rng.gen::<f64>()) / k as f64 * len;
            out.push(geom::point_at_length(outline, s));
        }
    }
    for ((shape, area), k) in shapes.iter().zip(&areas).zip(apportion(&areas, interior_n)) {
        if k == 0 || *area <= 0.0 {
            continue;
        }
        let b = shape.bbox();
        for i in 0..k {
            // One vertical stratum per point; fall back to the whole box for
            // strata that miss a concave shape.
            let mut placed = None;
            for attempt in 0..256 {
                let fx = if attempt < 64 {
                    (i as f64 + rng.gen::<f64>()) / k as f64
                } else {
                    rng.gen::<f64>()
                };
                let p = Point::new(b.min.x + fx * b.width(), b.min.y + rng.gen::<f64>() * b.height());
                if shape.contains(p) {
                    placed = Some(p);
                    break;
                }
            }
            out.push(placed.unwrap_or_else(|| shape.flatten()[0]));
        }
    }
    if out.is_empty() && n > 0 {
        return None;
    }
    Some(out)
}
