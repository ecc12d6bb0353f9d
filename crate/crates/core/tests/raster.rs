use std::path::Path;

use visual_blender::blender::rmse;
use visual_blender::Scene;

fn scene(name: &str) -> Scene {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"));
    Scene::from_json(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn double_resolution_downscales_to_single() {
    for name in ["pig", "cactus", "angel"] {
        let s = scene(name);
        let small = s.rasterize(256, 256);
        let big = s.rasterize(512, 512).downscale_2x();
        let err: f64 = small
            .pixels
            .iter()
            .zip(&big.pixels)
            .map(|(a, b)| (*a as f64 - *b as f64).abs())
            .sum::<f64>()
            / small.pixels.len() as f64;
        assert!(err <= 2.0, "{name}: mean error {err}");
    }
}

#[test]
fn rendering_is_deterministic_and_distinguishes_fixtures() {
    let (pig, cactus) = (scene("pig"), scene("cactus"));
    assert_eq!(pig.rasterize(128, 128), pig.rasterize(128, 128));
    assert!(rmse(&pig.rasterize(128, 128), &cactus.rasterize(128, 128)).unwrap() > 0.02);
    assert_eq!(rmse(&pig.rasterize(64, 64), &pig.rasterize(64, 64)).unwrap(), 0.0);
}
