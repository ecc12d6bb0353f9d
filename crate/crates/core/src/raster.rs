use tiny_skia::{FillRule, Paint, PathBuilder, Pixmap, Rect, Stroke, Transform};

use crate::scene::{Geometry, GrayBitmap, Rgb, Scene, Segment, Shape};

fn build_path(shape: &Shape) -> Option<tiny_skia::Path> {
    match &shape.geometry {
        Geometry::Ellipse { center, radii } => PathBuilder::from_oval(Rect::from_xywh(
            (center.x - radii.x) as f32,
            (center.y - radii.y) as f32,
            (2.0 * radii.x) as f32,
            (2.0 * radii.y) as f32,
        )?),
        Geometry::Polyline { points } | Geometry::Polygon { points } => {
            let mut pb = PathBuilder::new();
            pb.move_to(points[0].x as f32, points[0].y as f32);
            for p in &points[1..] {
                pb.line_to(p.x as f32, p.y as f32);
            }
            if shape.is_closed() {
                pb.close();
            }
            pb.finish()
        }
        Geometry::Path {
            start,
            segments,
            closed,
        } => {
            let mut pb = PathBuilder::new();
            pb.move_to(start.x as f32, start.y as f32);
            for s in segments {
                match *s {
                    Segment::Line(p) => pb.line_to(p.x as f32, p.y as f32),
                    Segment::Cubic(a, b, c) => {
                        pb.cubic_to(a.x as f32, a.y as f32, b.x as f32, b.y as f32, c.x as f32, c.y as f32)
                    }
                }
            }
            if *closed {
                pb.close();
            }
            pb.finish()
        }
    }
}

fn paint(color: Rgb) -> Paint<'static> {
    let mut p = Paint::default();
    p.set_color_rgba8(color.0, color.1, color.2, 255);
    p.anti_alias = true;
    p
}

pub(crate) fn rasterize(scene: &Scene, width: u32, height: u32) -> GrayBitmap {
    let Some(mut pixmap) = Pixmap::new(width, height) else {
        return GrayBitmap::filled(width, height, 255);
    };
    pixmap.fill(tiny_skia::Color::WHITE);
    let sx = width as f64 / scene.canvas.0;
    let sy = height as f64 / scene.canvas.1;
    let transform = Transform::from_scale(sx as f32, sy as f32);

    let shapes = scene
        .shapes_under(&crate::scene::ObjectPath::root(), None)
        .expect("root always resolves");
    for shape in &shapes {
        let Some(path) = build_path(shape) else { continue };
        if let Some(fill) = shape.style.fill {
            pixmap.fill_path(&path, &paint(fill), FillRule::EvenOdd, transform, None);
        }
        if let Some(stroke) = shape.style.stroke {
            if shape.style.stroke_width > 0.0 {
                let st = Stroke {
                    width: shape.style.stroke_width as f32,
                    ..Stroke::default()
                };
                pixmap.stroke_path(&path, &paint(stroke), &st, transform, None);
            }
        }
    }

    let pixels = pixmap
        .data()
        .chunks_exact(4)
        .map(|px| {
            let luma = 0.299 * px[0] as f64 + 0.587 * px[1] as f64 + 0.114 * px[2] as f64;
            luma.round().clamp(0.0, 255.0) as u8
        })
        .collect();
    GrayBitmap { width, height, pixels }
}
