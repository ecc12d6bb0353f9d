use std::path::Path;

use proptest::prelude::*;
use visual_blender::relations::fitness;
use visual_blender::svg::parse_relations;
use visual_blender::{export_svg, import_svg, import_svg_with_relations, GraphicObject, SvgError, Point, Scene, SceneError};

fn read(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)).unwrap()
}

#[test]
fn fixture_json_is_stable() {
    for c in ["pig", "cactus", "angel"] {
        let s = Scene::from_json(&read(&format!("{c}.json"))).unwrap();
        s.validate().unwrap();
        let text = s.to_json();
        assert_eq!(Scene::from_json(&text).unwrap(), s);
        assert_eq!(Scene::from_json(&text).unwrap().to_json(), text);
        assert_eq!(fitness(&s).value, 1.0);
    }
}

#[test]
fn cactus_svg_imports_with_sidecar() {
    let s = import_svg_with_relations(&read("cactus.svg"), &read("cactus.relations.json")).unwrap();
    assert_eq!(s.relations.len(), parse_relations(&read("cactus.relations.json")).unwrap().len());
    assert_eq!(fitness(&s).value, 1.0);
    let back = import_svg(&export_svg(&s)).unwrap();
    assert_eq!(back.object_count(), s.object_count());
}

#[test]
fn unknown_fields_are_reported_with_a_path() {
    let mut v: serde_json::Value = serde_json::from_str(&read("pig.json")).unwrap();
    v["root"]["children"][0]["colour"] = serde_json::json!(1);
    let err = Scene::from_json(&v.to_string()).unwrap_err();
    assert!(matches!(err, SceneError::Schema { .. }), "{err}");
    assert!(err.to_string().contains("children"), "{err}");
}

#[test]
fn svg_outside_the_subset_is_rejected() {
    let ns = "xmlns=\"http://www.w3.org/2000/svg\"";
    let image = format!("<svg {ns}><g id=\"pig\"><image href=\"x.png\"/></g></svg>");
    assert!(matches!(import_svg(&image), Err(SvgError::UnsupportedElement(t)) if t == "image"));
    let anonymous = format!("<svg {ns}><g id=\"pig\"><g><circle r=\"3\"/></g></g></svg>");
    assert!(matches!(import_svg(&anonymous), Err(SvgError::MissingId(_))));
    assert!(import_svg("not xml").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn translated_scene_keeps_relative_layout(dx in -300.0f64..300.0, dy in -300.0f64..300.0) {
        let s = Scene::from_json(&read("angel.json")).unwrap();
        let mut t = s.clone();
        t.translate(Point::new(dx, dy));
        for (path, _) in s.walk().into_iter().skip(1) {
            let a = s.absolute_position(&path).unwrap();
            let b = t.absolute_position(&path).unwrap();
            prop_assert!(((b - a) - Point::new(dx, dy)).length() < 1e-9);
        }
        prop_assert_eq!(fitness(&t).value, fitness(&s).value);
    }

    #[test]
    fn offsets_survive_svg(x in -500.0f64..1500.0, y in -500.0f64..1500.0) {
        let root = GraphicObject::new("root").with_child(GraphicObject::new("thing").with_offset(Point::new(x, y)));
        let s = Scene::new("t", root);
        let back = import_svg(&export_svg(&s)).unwrap();
        let o = back.root.child("thing").unwrap().offset;
        prop_assert!((o - Point::new(x, y)).length() < 1e-6);
    }
}
