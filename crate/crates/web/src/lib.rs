//! Browser bindings. The page passes triples and scene JSON as text and gets
//! JSON or SVG text back.

use visual_blender::blender::{construct_blend, BaseChoice, BlendParams, Representation};
use visual_blender::evolution::{refill, step_generation, Bases, EvolutionParams, Population};
use visual_blender::{export_svg, find_analogies, parse_triples, Analogy, AnalogySet, ConceptGraph, MapperParams, Scene};
use wasm_bindgen::prelude::*;

pub mod demo {
    use super::*;

    pub const FIXTURES: [&str; 3] = ["pig", "cactus", "angel"];

    pub fn fixture_triples(name: &str) -> Option<&'static str> {
        Some(match name {
            "pig" => include_str!("../../core/fixtures/pig.triples"),
            "cactus" => include_str!("../../core/fixtures/cactus.triples"),
            "angel" => include_str!("../../core/fixtures/angel.triples"),
            _ => return None,
        })
    }

    pub fn fixture_scene(name: &str) -> Option<&'static str> {
        Some(match name {
            "pig" => include_str!("../../core/fixtures/pig.json"),
            "cactus" => include_str!("../../core/fixtures/cactus.json"),
            "angel" => include_str!("../../core/fixtures/angel.json"),
            _ => return None,
        })
    }

    /// One concept as typed into the page: its triples and its drawing.
    pub struct Concept {
        pub graph: ConceptGraph,
        pub rep: Representation,
    }

    impl Concept {
        pub fn parse(triples: &str, scene_json: &str) -> Result<Concept, String> {
            let scene = Scene::from_json(scene_json).map_err(|e| e.to_string())?;
            let mut graph = parse_triples(triples).map_err(|e| e.to_string())?;
            graph.name = scene.concept.clone();
            Ok(Concept {
                rep: Representation::new(scene.concept.clone(), scene),
                graph,
            })
        }
    }

    pub fn analogies(left: &Concept, right: &Concept) -> Result<Vec<Analogy>, String> {
        find_analogies(&left.graph, &right.graph, &MapperParams::default()).map_err(|e| e.to_string())
    }

    pub fn analogies_json(left: &Concept, right: &Concept) -> Result<String, String> {
        let set = AnalogySet {
            left: left.graph.name.clone(),
            right: right.graph.name.clone(),
            analogies: analogies(left, right)?,
        };
        serde_json::to_string(&set).map_err(|e| e.to_string())
    }

    /// Tries successive seeds until the similarity gate lets a blend through.
    pub fn blend_svg(left: &Concept, right: &Concept, index: usize, base_right: bool, seed: u64) -> Result<String, String> {
        let found = analogies(left, right)?;
        let analogy = found.get(index).ok_or_else(|| format!("only {} analogies", found.len()))?;
        let (choice, ra, rb) = if base_right {
            (BaseChoice::Right, &right.rep, &left.rep)
        } else {
            (BaseChoice::Left, &left.rep, &right.rep)
        };
        for s in seed..seed + 64 {
            if let Some(b) = construct_blend(analogy, choice, ra, rb, s, &BlendParams::default()).map_err(|e| e.to_string())? {
                return Ok(export_svg(&b.scene));
            }
        }
        Err("every attempt was too close to an input drawing".into())
    }

    /// A single population evolved a few generations at a time.
    pub struct Run {
        left: Representation,
        right: Representation,
        params: EvolutionParams,
        pop: Population,
    }

    impl Run {
        pub fn new(left: Concept, right: Concept, index: usize, seed: u64, pop_size: usize) -> Result<Run, String> {
            let found = analogies(&left, &right)?;
            let analogy = found.into_iter().nth(index).ok_or("no such analogy")?;
            let params = EvolutionParams {
                seed,
                max_size: pop_size,
                ..EvolutionParams::default()
            };
            params.validate().map_err(|e| e.to_string())?;
            let mut run = Run {
                left: left.rep,
                right: right.rep,
                pop: Population::new(0, analogy, &params),
                params,
            };
            let bases = Bases {
                left: &run.left,
                right: &run.right,
            };
            refill(&mut run.pop, &run.params, bases).map_err(|e| e.to_string())?;
            Ok(run)
        }

        pub fn step(&mut self, generations: usize) -> Result<(), String> {
            let bases = Bases {
                left: &self.left,
                right: &self.right,
            };
            for _ in 0..generations {
                step_generation(&mut self.pop, &self.params, bases).map_err(|e| e.to_string())?;
            }
            Ok(())
        }

        pub fn generation(&self) -> usize {
            self.pop.generation
        }

        pub fn best_fitness(&self) -> f64 {
            self.pop.record().best
        }

        pub fn mean_fitness(&self) -> f64 {
            self.pop.record().mean
        }

        pub fn best_svg(&self) -> String {
            self.pop.best().map(|b| export_svg(&b.blend.scene)).unwrap_or_default()
        }
    }
}

fn js(e: String) -> JsError {
    JsError::new(&e)
}

#[wasm_bindgen(js_name = fixtureNames)]
pub fn fixture_names() -> Vec<String> {
    demo::FIXTURES.iter().map(|s| s.to_string()).collect()
}

#[wasm_bindgen(js_name = fixtureTriples)]
pub fn fixture_triples(name: &str) -> Option<String> {
    demo::fixture_triples(name).map(str::to_string)
}

#[wasm_bindgen(js_name = fixtureScene)]
pub fn fixture_scene(name: &str) -> Option<String> {
    demo::fixture_scene(name).map(str::to_string)
}

/// Analogies between two concepts as JSON.
#[wasm_bindgen(js_name = findAnalogies)]
pub fn find_analogies_js(left_triples: &str, left_scene: &str, right_triples: &str, right_scene: &str) -> Result<String, JsError> {
    let l = demo::Concept::parse(left_triples, left_scene).map_err(js)?;
    let r = demo::Concept::parse(right_triples, right_scene).map_err(js)?;
    demo::analogies_json(&l, &r).map_err(js)
}

/// SVG of one blend for the chosen analogy.
#[wasm_bindgen(js_name = blendSvg)]
pub fn blend_svg(
    left_triples: &str,
    left_scene: &str,
    right_triples: &str,
    right_scene: &str,
    index: usize,
    base_right: bool,
    seed: u32,
) -> Result<String, JsError> {
    let l = demo::Concept::parse(left_triples, left_scene).map_err(js)?;
    let r = demo::Concept::parse(right_triples, right_scene).map_err(js)?;
    demo::blend_svg(&l, &r, index, base_right, seed as u64).map_err(js)
}

#[wasm_bindgen]
pub struct Evolution(demo::Run);

#[wasm_bindgen]
impl Evolution {
    #[wasm_bindgen(constructor)]
    pub fn new(
        left_triples: &str,
        left_scene: &str,
        right_triples: &str,
        right_scene: &str,
        index: usize,
        seed: u32,
        pop_size: usize,
    ) -> Result<Evolution, JsError> {
        let l = demo::Concept::parse(left_triples, left_scene).map_err(js)?;
        let r = demo::Concept::parse(right_triples, right_scene).map_err(js)?;
        demo::Run::new(l, r, index, seed as u64, pop_size).map(Evolution).map_err(js)
    }

    pub fn step(&mut self, generations: usize) -> Result<(), JsError> {
        self.0.step(generations).map_err(js)
    }

    #[wasm_bindgen(getter)]
    pub fn generation(&self) -> usize {
        self.0.generation()
    }

    #[wasm_bindgen(getter, js_name = bestFitness)]
    pub fn best_fitness(&self) -> f64 {
        self.0.best_fitness()
    }

    #[wasm_bindgen(getter, js_name = meanFitness)]
    pub fn mean_fitness(&self) -> f64 {
        self.0.mean_fitness()
    }

    #[wasm_bindgen(js_name = bestSvg)]
    pub fn best_svg(&self) -> String {
        self.0.best_svg()
    }
}
