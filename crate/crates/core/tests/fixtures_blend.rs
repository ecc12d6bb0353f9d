use std::path::Path;

use proptest::prelude::*;
use visual_blender::blender::{construct_blend, rmse, BaseChoice, BlendParams, PartName, Representation};
use visual_blender::{find_analogies, parse_triples, Analogy, ConceptGraph, MapperParams, Scene};

fn read(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)).unwrap()
}

fn graph(name: &str) -> ConceptGraph {
    let mut g = parse_triples(&read(&format!("{name}.triples"))).unwrap();
    g.name = name.into();
    g
}

fn rep(name: &str) -> Representation {
    Representation::new(name, Scene::from_json(&read(&format!("{name}.json"))).unwrap())
}

fn analogies(l: &str, r: &str) -> Vec<Analogy> {
    find_analogies(&graph(l), &graph(r), &MapperParams::default()).unwrap()
}

#[test]
fn pig_cactus_analogy() {
    let found = analogies("pig", "cactus");
    assert_eq!(found.len(), 1);
    let got: Vec<_> = found[0].mappings.iter().map(|(a, b)| format!("{a}={b}")).collect();
    for want in ["pig=cactus", "body=body", "tail=arm", "leg=pot"] {
        assert!(got.contains(&want.to_string()), "{got:?}");
    }
}

#[test]
fn replaced_pig_legs_become_pots() {
    let a = &analogies("pig", "cactus")[0];
    let (pig, cactus) = (rep("pig"), rep("cactus"));
    let mut seen_pot = false;
    for seed in 0..40 {
        let Some(b) = construct_blend(a, BaseChoice::Left, &pig, &cactus, seed, &BlendParams::default()).unwrap() else {
            continue;
        };
        b.check().unwrap();
        for r in &b.provenance.replacements {
            if PartName::parse(r.base.name()).base == "leg" {
                seen_pot = true;
                // The copy carries the donor's name, made unique among its siblings.
                assert_eq!(PartName::parse(r.at.name()).base, "pot");
                assert_eq!(r.at.parent(), r.base.parent());
                assert!(b.scene.resolves(&r.at));
                assert!(!b.scene.resolves(&r.base));
            }
        }
    }
    assert!(seen_pot);
}

#[test]
fn blends_differ_from_both_inputs_and_keep_relations_resolvable() {
    let reps = [rep("pig"), rep("cactus"), rep("angel")];
    let names = ["pig", "cactus", "angel"];
    for i in 0..3 {
        for j in i + 1..3 {
            for a in analogies(names[i], names[j]) {
                for seed in 0..10 {
                    for (choice, ra, rb) in [
                        (BaseChoice::Left, &reps[i], &reps[j]),
                        (BaseChoice::Right, &reps[j], &reps[i]),
                    ] {
                        let Some(b) = construct_blend(&a, choice, ra, rb, seed, &BlendParams::default()).unwrap()
                        else {
                            continue;
                        };
                        b.check().unwrap();
                        assert!(!b.provenance.replacements.is_empty());
                        assert_eq!(b.provenance.base_concept, ra.scene.concept);
                        for r in &b.scene.relations {
                            assert!(b.scene.resolves(&r.subject) && b.scene.resolves(&r.object));
                            assert_ne!(r.subject, r.object);
                        }
                        let bmp = b.scene.rasterize(256, 256);
                        assert!(rmse(&bmp, &ra.raster((256, 256))).unwrap() >= 0.02);
                        assert!(rmse(&bmp, &rb.raster((256, 256))).unwrap() >= 0.02);
                    }
                }
            }
        }
    }
}

#[test]
fn a_gate_of_one_rejects_everything() {
    let a = &analogies("pig", "cactus")[0];
    let params = BlendParams {
        similarity_threshold: 1.0,
        ..BlendParams::default()
    };
    for seed in 0..5 {
        assert!(construct_blend(a, BaseChoice::Left, &rep("pig"), &rep("cactus"), seed, &params).unwrap().is_none());
    }
}

#[test]
fn root_only_analogy_changes_nothing_and_is_gated() {
    let root = analogies("pig", "cactus")[0].root.clone();
    let a = Analogy::root_only(root);
    for seed in 0..5 {
        let b = construct_blend(&a, BaseChoice::Left, &rep("pig"), &rep("cactus"), seed, &BlendParams::default());
        assert!(b.unwrap().is_none());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn construction_is_a_function_of_the_seed(seed in any::<u64>(), right in any::<bool>()) {
        let a = &analogies("pig", "angel")[0];
        let (pig, angel) = (rep("pig"), rep("angel"));
        let (choice, ra, rb) = if right {
            (BaseChoice::Right, &angel, &pig)
        } else {
            (BaseChoice::Left, &pig, &angel)
        };
        let x = construct_blend(a, choice, ra, rb, seed, &BlendParams::default()).unwrap();
        let y = construct_blend(a, choice, ra, rb, seed, &BlendParams::default()).unwrap();
        prop_assert_eq!(x, y);
    }

    #[test]
    fn part_names_recompose(prefix in "[a-z]{0,4}", base in "[a-z]{1,6}", suffix in proptest::option::of(0u32..20)) {
        let mut raw = String::new();
        if !prefix.is_empty() {
            raw.push_str(&prefix);
            raw.push('_');
        }
        raw.push_str(&base);
        if let Some(s) = suffix {
            raw.push_str(&format!("_{s}"));
        }
        let p = PartName::parse(&raw);
        prop_assert_eq!(&p.base, &base);
        prop_assert_eq!(p.compose(), raw);
    }
}
