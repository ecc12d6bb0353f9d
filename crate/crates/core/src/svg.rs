//! Restricted SVG import and export.
//!
//! Supported input: nested `<g id="..">` groups (optionally with a
//! `translate(..)` transform) and the shape elements `line`, `polyline`,
//! `polygon`, `rect`, `circle`, `ellipse` and `path` with `M/L/H/V/C/Z`
//! commands (absolute or relative, one subpath). A shape element carrying an
//! `id` becomes its own leaf object; a group may hold at most one anonymous
//! shape, which becomes the group's shape. Relations are not part of SVG and
//! come from a sidecar `.relations.json`.
//!
//! Imported coordinates are rescaled so the longer canvas side is
//! [`CANONICAL_CANVAS`](crate::scene::CANONICAL_CANVAS) units.

use std::fmt::Write as _;

use thiserror::Error;

use crate::geom::Point;
use crate::scene::{
    Geometry, GraphicObject, Rgb, Scene, SceneError, SceneRelation, Segment, Shape, Style, CANONICAL_CANVAS,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SvgError {
    #[error("XML error: {0}")]
    Xml(String),
    #[error("unsupported element <{0}>")]
    UnsupportedElement(String),
    #[error("<{0}> needs an id")]
    MissingId(String),
    #[error("unsupported transform `{0}`")]
    UnsupportedTransform(String),
    #[error("unsupported path data: {0}")]
    UnsupportedPath(String),
    #[error("bad attribute `{name}` on <{element}>")]
    BadAttribute { element: String, name: String },
    #[error("invalid relations sidecar: {0}")]
    Relations(String),
    #[error(transparent)]
    Scene(#[from] SceneError),
}

const SHAPE_TAGS: [&str; 7] = ["line", "polyline", "polygon", "rect", "circle", "ellipse", "path"];
const IGNORED_TAGS: [&str; 5] = ["title", "desc", "metadata", "defs", "style"];

fn number(node: roxmltree::Node, name: &str) -> Result<f64, SvgError> {
    let bad = || SvgError::BadAttribute {
        element: node.tag_name().name().to_string(),
        name: name.to_string(),
    };
    let raw = node.attribute(name).ok_or_else(bad)?;
    let trimmed = raw.trim().trim_end_matches("px");
    trimmed.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad)
}

fn number_or(node: roxmltree::Node, name: &str, default: f64) -> Result<f64, SvgError> {
    if node.has_attribute(name) {
        number(node, name)
    } else {
        Ok(default)
    }
}

fn parse_color(value: &str) -> Option<Option<Rgb>> {
    let v = value.trim();
    match v {
        "none" | "transparent" => Some(None),
        "black" => Some(Some(Rgb::BLACK)),
        "white" => Some(Some(Rgb::WHITE)),
        "gray" | "grey" => Some(Some(Rgb(128, 128, 128))),
        "red" => Some(Some(Rgb(255, 0, 0))),
        "green" => Some(Some(Rgb(0, 128, 0))),
        "blue" => Some(Some(Rgb(0, 0, 255))),
        "pink" => Some(Some(Rgb(255, 192, 203))),
        "yellow" => Some(Some(Rgb(255, 255, 0))),
        _ => Rgb::parse_hex(v).map(Some),
    }
}

/// Presentation attributes and `style="..."` declarations, SVG defaults
/// otherwise (black fill, no stroke).
fn parse_style(node: roxmltree::Node, scale: f64) -> Style {
    let mut style = Style {
        stroke_width: 1.0,
        stroke: None,
        fill: Some(Rgb::BLACK),
    };
    let mut apply = |key: &str, value: &str| match key.trim() {
        "fill" => {
            if let Some(c) = parse_color(value) {
                style.fill = c;
            }
        }
        "stroke" => {
            if let Some(c) = parse_color(value) {
                style.stroke = c;
            }
        }
        "stroke-width" => {
            if let Ok(w) = value.trim().trim_end_matches("px").parse::<f64>() {
                style.stroke_width = w;
            }
        }
        _ => {}
    };
    for key in ["fill", "stroke", "stroke-width"] {
        if let Some(v) = node.attribute(key) {
            apply(key, v);
        }
    }
    if let Some(decls) = node.attribute("style") {
        for decl in decls.split(';') {
            if let Some((k, v)) = decl.split_once(':') {
                apply(k, v);
            }
        }
    }
    style.stroke_width *= scale;
    style
}

fn parse_translate(node: roxmltree::Node) -> Result<Point, SvgError> {
    let Some(t) = node.attribute("transform") else {
        return Ok(Point::ZERO);
    };
    let unsupported = || SvgError::UnsupportedTransform(t.to_string());
    let inner = t
        .trim()
        .strip_prefix("translate")
        .map(str::trim_start)
        .and_then(|s| s.strip_prefix('('))
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(unsupported)?;
    let nums: Vec<f64> = inner
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| unsupported()))
        .collect::<Result<_, _>>()?;
    match nums[..] {
        [x] => Ok(Point::new(x, 0.0)),
        [x, y] => Ok(Point::new(x, y)),
        _ => Err(unsupported()),
    }
}

fn parse_points(node: roxmltree::Node) -> Result<Vec<Point>, SvgError> {
    let bad = || SvgError::BadAttribute {
        element: node.tag_name().name().to_string(),
        name: "points".into(),
    };
    let raw = node.attribute("points").ok_or_else(bad)?;
    let nums: Vec<f64> = raw
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    if !nums.len().is_multiple_of(2) || nums.len() < 4 {
        return Err(bad());
    }
    Ok(nums.chunks(2).map(|c| Point::new(c[0], c[1])).collect())
}

/// Tokenizes path data into command letters and numbers.
fn path_tokens(d: &str) -> Result<Vec<PathToken>, SvgError> {
    let mut out = Vec::new();
    let chars: Vec<char> = d.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() || c == ',' {
            i += 1;
        } else if c.is_ascii_alphabetic() && c != 'e' && c != 'E' {
            out.push(PathToken::Cmd(c));
            i += 1;
        } else {
            let start = i;
            i += 1;
            while i < chars.len() {
                let ch = chars[i];
                let prev = chars[i - 1];
                let continues = ch.is_ascii_digit()
                    || ch == '.'
                    || ch == 'e'
                    || ch == 'E'
                    || ((ch == '-' || ch == '+') && (prev == 'e' || prev == 'E'));
                if !continues {
                    break;
                }
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let v = s
                .parse::<f64>()
                .map_err(|_| SvgError::UnsupportedPath(format!("bad number `{s}`")))?;
            out.push(PathToken::Num(v));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
enum PathToken {
    Cmd(char),
    Num(f64),
}

fn parse_path_data(d: &str) -> Result<Geometry, SvgError> {
    let tokens = path_tokens(d)?;
    let mut i = 0;
    let mut cmd = None::<char>;
    let mut start = None::<Point>;
    let mut cur = Point::ZERO;
    let mut segments = Vec::new();
    let mut closed = false;
    let take = |i: &mut usize, n: usize| -> Result<Vec<f64>, SvgError> {
        let mut v = Vec::with_capacity(n);
        for _ in 0..n {
            match tokens.get(*i) {
                Some(PathToken::Num(x)) => v.push(*x),
                _ => return Err(SvgError::UnsupportedPath("missing coordinate".into())),
            }
            *i += 1;
        }
        Ok(v)
    };
    while i < tokens.len() {
        if let PathToken::Cmd(c) = tokens[i] {
            cmd = Some(c);
            i += 1;
            if c == 'Z' || c == 'z' {
                if closed || start.is_none() {
                    return Err(SvgError::UnsupportedPath("unexpected Z".into()));
                }
                closed = true;
                continue;
            }
        }
        if closed {
            return Err(SvgError::UnsupportedPath("drawing after Z".into()));
        }
        let c = cmd.ok_or_else(|| SvgError::UnsupportedPath("data before a command".into()))?;
        let rel = c.is_ascii_lowercase();
        let base = if rel { cur } else { Point::ZERO };
        match c.to_ascii_uppercase() {
            'M' => {
                let v = take(&mut i, 2)?;
                let p = base + Point::new(v[0], v[1]);
                if start.is_some() {
                    return Err(SvgError::UnsupportedPath("multiple subpaths".into()));
                }
                start = Some(p);
                cur = p;
                // Coordinates following a moveto are implicit linetos.
                cmd = Some(if rel { 'l' } else { 'L' });
            }
            'L' => {
                let v = take(&mut i, 2)?;
                cur = base + Point::new(v[0], v[1]);
                segments.push(Segment::Line(cur));
            }
            'H' => {
                let v = take(&mut i, 1)?;
                cur = Point::new(if rel { cur.x + v[0] } else { v[0] }, cur.y);
                segments.push(Segment::Line(cur));
            }
            'V' => {
                let v = take(&mut i, 1)?;
                cur = Point::new(cur.x, if rel { cur.y + v[0] } else { v[0] });
                segments.push(Segment::Line(cur));
            }
            'C' => {
                let v = take(&mut i, 6)?;
                let c1 = base + Point::new(v[0], v[1]);
                let c2 = base + Point::new(v[2], v[3]);
                cur = base + Point::new(v[4], v[5]);
                segments.push(Segment::Cubic(c1, c2, cur));
            }
            other => return Err(SvgError::UnsupportedPath(format!("command `{other}`"))),
        }
        if start.is_none() {
            return Err(SvgError::UnsupportedPath("path must start with M".into()));
        }
    }
    let start = start.ok_or_else(|| SvgError::UnsupportedPath("empty path".into()))?;
    if segments.is_empty() {
        return Err(SvgError::UnsupportedPath("path has no segments".into()));
    }
    Ok(Geometry::Path {
        start,
        segments,
        closed,
    })
}

fn scale_geometry(g: Geometry, s: f64) -> Geometry {
    let sp = |p: Point| p * s;
    match g {
        Geometry::Polyline { points } => Geometry::Polyline {
            points: points.into_iter().map(sp).collect(),
        },
        Geometry::Polygon { points } => Geometry::Polygon {
            points: points.into_iter().map(sp).collect(),
        },
        Geometry::Ellipse { center, radii } => Geometry::Ellipse {
            center: sp(center),
            radii: sp(radii),
        },
        Geometry::Path {
            start,
            segments,
            closed,
        } => Geometry::Path {
            start: sp(start),
            segments: segments
                .into_iter()
                .map(|seg| match seg {
                    Segment::Line(p) => Segment::Line(sp(p)),
                    Segment::Cubic(a, b, c) => Segment::Cubic(sp(a), sp(b), sp(c)),
                })
                .collect(),
            closed,
        },
    }
}

fn parse_shape(node: roxmltree::Node, scale: f64) -> Result<Shape, SvgError> {
    let tag = node.tag_name().name();
    let geometry = match tag {
        "line" => Geometry::Polyline {
            points: vec![
                Point::new(number_or(node, "x1", 0.0)?, number_or(node, "y1", 0.0)?),
                Point::new(number_or(node, "x2", 0.0)?, number_or(node, "y2", 0.0)?),
            ],
        },
        "polyline" => Geometry::Polyline {
            points: parse_points(node)?,
        },
        "polygon" => Geometry::Polygon {
            points: parse_points(node)?,
        },
        "rect" => {
            let (x, y) = (number_or(node, "x", 0.0)?, number_or(node, "y", 0.0)?);
            let (w, h) = (number(node, "width")?, number(node, "height")?);
            Geometry::Polygon {
                points: vec![Point::new(x, y), Point::new(x + w, y), Point::new(x + w, y + h), Point::new(x, y + h)],
            }
        }
        "circle" => {
            let r = number(node, "r")?;
            Geometry::Ellipse {
                center: Point::new(number_or(node, "cx", 0.0)?, number_or(node, "cy", 0.0)?),
                radii: Point::new(r, r),
            }
        }
        "ellipse" => Geometry::Ellipse {
            center: Point::new(number_or(node, "cx", 0.0)?, number_or(node, "cy", 0.0)?),
            radii: Point::new(number(node, "rx")?, number(node, "ry")?),
        },
        "path" => parse_path_data(node.attribute("d").ok_or_else(|| SvgError::BadAttribute {
            element: "path".into(),
            name: "d".into(),
        })?)?,
        other => return Err(SvgError::UnsupportedElement(other.to_string())),
    };
    let shape = Shape::new(scale_geometry(geometry, scale), parse_style(node, scale));
    shape.validate().map_err(|reason| {
        SvgError::Scene(SceneError::InvalidShape {
            path: node.attribute("id").unwrap_or(tag).to_string(),
            reason,
        })
    })?;
    Ok(shape)
}

/// Builds the object for a `<g>` (or the synthetic root) from its children.
fn parse_group(node: roxmltree::Node, name: String, scale: f64) -> Result<GraphicObject, SvgError> {
    let mut obj = GraphicObject::new(name);
    obj.offset = parse_translate(node)? * scale;
    for child in node.children().filter(|n| n.is_element()) {
        let tag = child.tag_name().name();
        if IGNORED_TAGS.contains(&tag) {
            continue;
        }
        if tag == "g" {
            let id = child.attribute("id").ok_or_else(|| SvgError::MissingId("g".into()))?;
            obj.children.push(parse_group(child, id.to_string(), scale)?);
        } else if SHAPE_TAGS.contains(&tag) {
            let shape = parse_shape(child, scale)?;
            match child.attribute("id") {
                Some(id) => {
                    let mut leaf = GraphicObject::new(id).with_shape(shape);
                    leaf.offset = parse_translate(child)? * scale;
                    obj.children.push(leaf);
                }
                None if obj.shape.is_none() && !child.has_attribute("transform") => obj.shape = Some(shape),
                None => return Err(SvgError::MissingId(tag.to_string())),
            }
        } else {
            return Err(SvgError::UnsupportedElement(tag.to_string()));
        }
    }
    Ok(obj)
}

fn canvas_size(svg: roxmltree::Node) -> Result<(f64, f64), SvgError> {
    if let Some(vb) = svg.attribute("viewBox") {
        let nums: Vec<f64> = vb
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .filter_map(|s| s.parse().ok())
            .collect();
        if let [x, y, w, h] = nums[..] {
            if x == 0.0 && y == 0.0 && w > 0.0 && h > 0.0 {
                return Ok((w, h));
            }
        }
        return Err(SvgError::BadAttribute {
            element: "svg".into(),
            name: "viewBox".into(),
        });
    }
    Ok((number_or(svg, "width", CANONICAL_CANVAS)?, number_or(svg, "height", CANONICAL_CANVAS)?))
}

/// Parses the restricted SVG subset into a scene without relations.
pub fn import_svg(text: &str) -> Result<Scene, SvgError> {
    let doc = roxmltree::Document::parse(text).map_err(|e| SvgError::Xml(e.to_string()))?;
    let svg = doc.root_element();
    if svg.tag_name().name() != "svg" {
        return Err(SvgError::UnsupportedElement(svg.tag_name().name().to_string()));
    }
    let (w, h) = canvas_size(svg)?;
    if !(w > 0.0 && h > 0.0) {
        return Err(SvgError::Scene(SceneError::InvalidCanvas));
    }
    let scale = CANONICAL_CANVAS / w.max(h);

    let elements: Vec<_> = svg
        .children()
        .filter(|n| n.is_element() && !IGNORED_TAGS.contains(&n.tag_name().name()))
        .collect();
    let root = match elements[..] {
        [only] if only.tag_name().name() == "g" => {
            let id = only.attribute("id").ok_or_else(|| SvgError::MissingId("g".into()))?;
            parse_group(only, id.to_string(), scale)?
        }
        _ => parse_group(svg, svg.attribute("id").unwrap_or("root").to_string(), scale)?,
    };
    let scene = Scene {
        concept: root.name.clone(),
        canvas: (w * scale, h * scale),
        root,
        relations: Vec::new(),
    };
    scene.validate()?;
    Ok(scene)
}

/// Parses a relations sidecar: either a bare array or `{"relations": [...]}`.
pub fn parse_relations(text: &str) -> Result<Vec<SceneRelation>, SvgError> {
    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    enum Sidecar {
        Bare(Vec<SceneRelation>),
        Wrapped { relations: Vec<SceneRelation> },
    }
    let sidecar: Sidecar = serde_json::from_str(text).map_err(|e| SvgError::Relations(e.to_string()))?;
    Ok(match sidecar {
        Sidecar::Bare(r) | Sidecar::Wrapped { relations: r } => r,
    })
}

/// Imports an SVG and attaches the relations from its sidecar.
pub fn import_svg_with_relations(svg: &str, relations: &str) -> Result<Scene, SvgError> {
    let mut scene = import_svg(svg)?;
    scene.relations = parse_relations(relations)?;
    scene.validate()?;
    Ok(scene)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('"', "&quot;").replace('<', "&lt;").replace('>', "&gt;")
}

fn fmt_points(points: &[Point]) -> String {
    points.iter().map(|p| format!("{},{}", p.x, p.y)).collect::<Vec<_>>().join(" ")
}

fn style_attrs(style: &Style) -> String {
    let color = |c: Option<Rgb>| c.map(|c| c.hex()).unwrap_or_else(|| "none".into());
    format!(
        r#" fill="{}" stroke="{}" stroke-width="{}""#,
        color(style.fill),
        color(style.stroke),
        style.stroke_width
    )
}

fn shape_element(shape: &Shape) -> String {
    let style = style_attrs(&shape.style);
    match &shape.geometry {
        Geometry::Polyline { points } => format!(r#"<polyline points="{}"{style}/>"#, fmt_points(points)),
        Geometry::Polygon { points } => format!(r#"<polygon points="{}"{style}/>"#, fmt_points(points)),
        Geometry::Ellipse { center, radii } => format!(
            r#"<ellipse cx="{}" cy="{}" rx="{}" ry="{}"{style}/>"#,
            center.x, center.y, radii.x, radii.y
        ),
        Geometry::Path {
            start,
            segments,
            closed,
        } => {
            let mut d = format!("M{},{}", start.x, start.y);
            for s in segments {
                match s {
                    Segment::Line(p) => write!(d, " L{},{}", p.x, p.y),
                    Segment::Cubic(a, b, c) => write!(d, " C{},{} {},{} {},{}", a.x, a.y, b.x, b.y, c.x, c.y),
                }
                .expect("write to String");
            }
            if *closed {
                d.push_str(" Z");
            }
            format!(r#"<path d="{d}"{style}/>"#)
        }
    }
}

fn export_object(obj: &GraphicObject, depth: usize, out: &mut String) {
    let indent = "  ".repeat(depth);
    let transform = if obj.offset == Point::ZERO {
        String::new()
    } else {
        format!(r#" transform="translate({},{})""#, obj.offset.x, obj.offset.y)
    };
    if obj.shape.is_none() && obj.children.is_empty() {
        writeln!(out, r#"{indent}<g id="{}"{transform}/>"#, xml_escape(&obj.name)).expect("write to String");
        return;
    }
    writeln!(out, r#"{indent}<g id="{}"{transform}>"#, xml_escape(&obj.name)).expect("write to String");
    if let Some(shape) = &obj.shape {
        writeln!(out, "{indent}  {}", shape_element(shape)).expect("write to String");
    }
    for c in &obj.children {
        export_object(c, depth + 1, out);
    }
    writeln!(out, "{indent}</g>").expect("write to String");
}

/// One `<g id=name>` per object, nested like the scene tree. Numbers use the
/// shortest round-trip decimal form, so identical scenes give identical bytes.
pub fn export_svg(scene: &Scene) -> String {
    let (w, h) = scene.canvas;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    );
    export_object(&scene.root, 1, &mut out);
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::ObjectPath;

    #[test]
    fn nested_groups() {
        let s = import_svg(
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="1000" height="1000">
                 <g id="pig"><g id="head"><ellipse cx="10" cy="20" rx="5" ry="4"/></g></g>
               </svg>"#,
        )
        .unwrap();
        assert_eq!(s.root.name, "pig");
        assert_eq!(s.concept, "pig");
        assert_eq!(s.root.children[0].name, "head");
        assert!(s.root.children[0].shape.is_some());
    }

    #[test]
    fn unsupported_and_missing_id() {
        let img = r#"<svg xmlns="http://www.w3.org/2000/svg"><g id="a"><image href="x.png"/></g></svg>"#;
        assert_eq!(import_svg(img), Err(SvgError::UnsupportedElement("image".into())));
        let anon = r#"<svg xmlns="http://www.w3.org/2000/svg"><g id="a"><g><circle r="1"/></g></g></svg>"#;
        assert_eq!(import_svg(anon), Err(SvgError::MissingId("g".into())));
        let two = r#"<svg xmlns="http://www.w3.org/2000/svg"><g id="a"><circle r="1"/><circle r="2"/></g></svg>"#;
        assert_eq!(import_svg(two), Err(SvgError::MissingId("circle".into())));
        let rot = r#"<svg xmlns="http://www.w3.org/2000/svg"><g id="a" transform="rotate(30)"/></svg>"#;
        assert!(matches!(import_svg(rot), Err(SvgError::UnsupportedTransform(_))));
        let arc = r#"<svg xmlns="http://www.w3.org/2000/svg"><g id="a"><path d="M0 0 A 5 5 0 0 1 10 10"/></g></svg>"#;
        assert!(matches!(import_svg(arc), Err(SvgError::UnsupportedPath(_))));
    }

    #[test]
    fn named_layers_become_objects() {
        let s = import_svg(
            r##"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 500 250">
                 <g id="cactus">
                   <rect id="pot" x="200" y="200" width="100" height="50" fill="#aa6633"/>
                   <path id="body" d="M230 200 C230 50 270 50 270 200 Z" style="fill:#33aa33;stroke:#000;stroke-width:2"/>
                   <line id="spine_1" x1="240" y1="120" x2="235" y2="115" stroke="black"/>
                   <g id="flower" transform="translate(250, 60)"><circle r="10" fill="pink"/></g>
                 </g>
               </svg>"##,
        )
        .unwrap();
        let names: Vec<_> = s.root.children.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["pot", "body", "spine_1", "flower"]);
        // 500 wide viewBox scales by 2.
        assert_eq!(s.canvas, (1000.0, 500.0));
        let flower: ObjectPath = "flower".parse().unwrap();
        assert_eq!(s.absolute_position(&flower).unwrap(), Point::new(500.0, 120.0));
        let body = s.object(&"body".parse().unwrap()).unwrap().shape.as_ref().unwrap();
        assert_eq!(body.style.fill, Some(Rgb(0x33, 0xaa, 0x33)));
        assert_eq!(body.style.stroke_width, 4.0);
        assert!(body.is_closed());
    }

    #[test]
    fn relative_path_commands() {
        let g = parse_path_data("m10 10 l5 0 h5 v5 c 0 5 -5 5 -5 5 z").unwrap();
        let Geometry::Path {
            start,
            segments,
            closed,
        } = g
        else {
            panic!()
        };
        assert_eq!(start, Point::new(10.0, 10.0));
        assert!(closed);
        assert_eq!(segments.len(), 4);
        assert_eq!(segments[3], Segment::Cubic(Point::new(20.0, 20.0), Point::new(15.0, 20.0), Point::new(15.0, 20.0)));
        assert!(parse_path_data("M0 0 L1 1 M5 5 L6 6").is_err());
        assert!(parse_path_data("M1e1,-2e-1 L3,4").is_ok());
    }

    #[test]
    fn empty_container_exports_empty_group() {
        let s = Scene::new("x", GraphicObject::new("root").with_child(GraphicObject::new("slot")));
        let svg = export_svg(&s);
        assert!(svg.contains(r#"<g id="slot"/>"#), "{svg}");
        assert_eq!(svg, export_svg(&s));
        let back = import_svg(&svg).unwrap();
        assert_eq!(back.root, s.root);
    }

    #[test]
    fn sidecar_forms() {
        let bare = parse_relations(r#"[{"a":"x","type":"above","b":"y"}]"#).unwrap();
        let wrapped = parse_relations(r#"{"relations":[{"a":"x","type":"above","b":"y"}]}"#).unwrap();
        assert_eq!(bare, wrapped);
        assert!(parse_relations(r#"[{"a":"x","type":"biggerThan","b":"y"}]"#).is_err());
    }
}
