//! Genetic search over blends, one population per analogy.
//!
//! Every generation runs five tasks in order: refill the population with
//! freshly constructed blends, remember the best individual, mutate object
//! positions, recombine same-named objects between tournament-selected
//! parents, and drop duplicate genomes. The remembered elite is put back at
//! the end so the best fitness never decreases.

use std::collections::{HashMap, HashSet};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blender::{construct_blend, BaseChoice, Blend, BlendError, BlendParams, Representation};
use crate::geom::Point;
use crate::mapper::Analogy;
use crate::relations::fitness;
use crate::scene::ObjectPath;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvolutionError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("could not construct any blend for population {population} after {attempts} attempts")]
    RefillExhausted { population: usize, attempts: usize },
    #[error(transparent)]
    Blend(#[from] BlendError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvolutionParams {
    pub mutation_prob_per_gene: f64,
    pub recombination_prob_per_individual: f64,
    pub tournament_size: usize,
    pub crossover_points: usize,
    pub max_size: usize,
    pub generations: usize,
    /// Largest displacement per axis applied by one mutation, canvas units.
    pub mutation_step: f64,
    pub seed: u64,
    /// Treat individuals as duplicates when their rasters match, rather than
    /// their genomes.
    pub dedup_by_raster: bool,
    pub blend: BlendParams,
}

impl Default for EvolutionParams {
    fn default() -> Self {
        EvolutionParams {
            mutation_prob_per_gene: 0.05,
            recombination_prob_per_individual: 0.2,
            tournament_size: 2,
            crossover_points: 2,
            max_size: 50,
            generations: 100,
            mutation_step: 30.0,
            seed: 0,
            dedup_by_raster: false,
            blend: BlendParams::default(),
        }
    }
}

impl EvolutionParams {
    pub fn validate(&self) -> Result<(), EvolutionError> {
        let prob = |v: f64| (0.0..=1.0).contains(&v);
        let bad = |m: &str| Err(EvolutionError::InvalidParams(m.to_string()));
        if !prob(self.mutation_prob_per_gene) || !prob(self.recombination_prob_per_individual) {
            return bad("probabilities must lie in [0, 1]");
        }
        if !prob(self.blend.replace_prob) {
            return bad("replacement probability must lie in [0, 1]");
        }
        if self.tournament_size < 2 {
            return bad("tournament size must be at least 2");
        }
        if self.max_size == 0 {
            return bad("population size must be positive");
        }
        if !(self.mutation_step >= 0.0 && self.mutation_step.is_finite()) {
            return bad("mutation step must be a finite non-negative number");
        }
        if self.blend.raster.0 == 0 || self.blend.raster.1 == 0 {
            return bad("raster size must be positive");
        }
        Ok(())
    }
}

/// One blend with its cached fitness. The genome is the list of non-root
/// object offsets in pre-order; the root stays where the base put it.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub blend: Blend,
    fitness: f64,
}

impl Individual {
    pub fn new(blend: Blend) -> Self {
        let fitness = fitness(&blend.scene).value;
        Individual { blend, fitness }
    }

    pub fn fitness(&self) -> f64 {
        self.fitness
    }

    fn refresh(&mut self) {
        self.fitness = fitness(&self.blend.scene).value;
    }

    pub fn genome(&self) -> Vec<(ObjectPath, Point)> {
        self.blend
            .scene
            .walk()
            .into_iter()
            .filter(|(p, _)| !p.is_root())
            .map(|(p, o)| (p, o.offset))
            .collect()
    }

    /// Canonical serialization used for duplicate detection.
    pub fn genome_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(&self.blend.scene).expect("scenes always serialize")
    }

    fn raster_key(&self, size: (u32, u32)) -> Vec<u8> {
        self.blend.scene.rasterize(size.0, size.1).pixels
    }

    fn set_offset(&mut self, path: &ObjectPath, offset: Point) {
        if let Some(o) = self.blend.scene.object_mut(path) {
            o.offset = offset;
        }
    }
}

/// The two base scenes an analogy's blends are built from, keyed by side.
#[derive(Debug, Clone, Copy)]
pub struct Bases<'a> {
    pub left: &'a Representation,
    pub right: &'a Representation,
}

impl<'a> Bases<'a> {
    fn oriented(&self, choice: BaseChoice) -> (&'a Representation, &'a Representation) {
        match choice {
            BaseChoice::Left => (self.left, self.right),
            BaseChoice::Right => (self.right, self.left),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EliteRecord {
    pub generation: usize,
    pub best: f64,
    pub mean: f64,
}

#[derive(Debug, Clone)]
pub struct Population {
    pub id: usize,
    pub analogy: Analogy,
    pub individuals: Vec<Individual>,
    pub max_size: usize,
    pub generation: usize,
    rng: ChaCha8Rng,
}

impl Population {
    /// An empty population with its own random stream (`seed + id`).
    pub fn new(id: usize, analogy: Analogy, params: &EvolutionParams) -> Self {
        Population {
            id,
            analogy,
            individuals: Vec::new(),
            max_size: params.max_size,
            generation: 0,
            rng: ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(id as u64)),
        }
    }

    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    /// Index of the fittest individual; ties go to the lowest index.
    pub fn best_index(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, ind) in self.individuals.iter().enumerate() {
            if best.is_none_or(|b| ind.fitness > self.individuals[b].fitness) {
                best = Some(i);
            }
        }
        best
    }

    pub fn best(&self) -> Option<&Individual> {
        self.best_index().map(|i| &self.individuals[i])
    }

    pub fn record(&self) -> EliteRecord {
        let fits: Vec<f64> = self.individuals.iter().map(|i| i.fitness).collect();
        EliteRecord {
            generation: self.generation,
            best: fits.iter().copied().fold(0.0, f64::max),
            mean: crate::relations::mean(&fits),
        }
    }
}

/// T1: tops the population up to its maximum size with new blends, each with
/// a random base side and seed. Gives up after `100 × deficit` attempts.
pub fn refill(pop: &mut Population, params: &EvolutionParams, bases: Bases<'_>) -> Result<(), EvolutionError> {
    let deficit = pop.max_size.saturating_sub(pop.individuals.len());
    if deficit == 0 {
        return Ok(());
    }
    let budget = 100 * deficit;
    let mut accepted = 0;
    for _ in 0..budget {
        if accepted == deficit {
            break;
        }
        let choice = if pop.rng.gen_bool(0.5) {
            BaseChoice::Left
        } else {
            BaseChoice::Right
        };
        let seed: u64 = pop.rng.gen();
        let (ra, rb) = bases.oriented(choice);
        if let Some(blend) = construct_blend(&pop.analogy, choice, ra, rb, seed, &params.blend)? {
            pop.individuals.push(Individual::new(blend));
            accepted += 1;
        }
    }
    if accepted == 0 {
        return Err(EvolutionError::RefillExhausted {
            population: pop.id,
            attempts: budget,
        });
    }
    Ok(())
}

/// T3: each gene independently moves by a uniform displacement in
/// `[-step, step]²` with probability `mutation_prob_per_gene`. Children move
/// along because offsets are parent-relative. Returns how many genes moved.
pub fn mutate<R: Rng + ?Sized>(ind: &mut Individual, params: &EvolutionParams, rng: &mut R) -> usize {
    let step = params.mutation_step;
    let mut moved = 0;
    for (path, offset) in ind.genome() {
        if !rng.gen_bool(params.mutation_prob_per_gene) {
            continue;
        }
        moved += 1;
        if step > 0.0 {
            let d = Point::new(rng.gen_range(-step..=step), rng.gen_range(-step..=step));
            ind.set_offset(&path, offset + d);
        }
    }
    if moved > 0 {
        ind.refresh();
    }
    moved
}

/// Paths present in both parents, in the first parent's gene order.
pub fn aligned_genes(p1: &Individual, p2: &Individual) -> Vec<ObjectPath> {
    let other: HashSet<ObjectPath> = p2.genome().into_iter().map(|(p, _)| p).collect();
    p1.genome().into_iter().map(|(p, _)| p).filter(|p| other.contains(p)).collect()
}

/// T4 with explicit cut points into the aligned gene list. Genes between the
/// first and second cut, third and fourth, and so on are swapped; the rest
/// stay. Objects whose path exists in only one parent are never touched.
pub fn crossover_at(p1: &Individual, p2: &Individual, cuts: &[usize]) -> (Individual, Individual) {
    let aligned = aligned_genes(p1, p2);
    let off1: HashMap<ObjectPath, Point> = p1.genome().into_iter().collect();
    let off2: HashMap<ObjectPath, Point> = p2.genome().into_iter().collect();
    let mut cuts: Vec<usize> = cuts.to_vec();
    cuts.sort_unstable();
    let (mut c1, mut c2) = (p1.clone(), p2.clone());
    let mut changed = false;
    for (i, path) in aligned.iter().enumerate() {
        let swapped = cuts.iter().filter(|&&c| c <= i).count() % 2 == 1;
        if swapped && off1[path] != off2[path] {
            c1.set_offset(path, off2[path]);
            c2.set_offset(path, off1[path]);
            changed = true;
        }
    }
    if changed {
        c1.refresh();
        c2.refresh();
    }
    (c1, c2)
}

/// T4: N-point crossover with cut points drawn without replacement from the
/// interior of the aligned gene list.
pub fn crossover<R: Rng + ?Sized>(
    p1: &Individual,
    p2: &Individual,
    params: &EvolutionParams,
    rng: &mut R,
) -> (Individual, Individual) {
    let n = aligned_genes(p1, p2).len();
    let cuts: Vec<usize> = if n < 2 {
        Vec::new()
    } else {
        let k = params.crossover_points.min(n - 1);
        sample(rng, n - 1, k).into_iter().map(|c| c + 1).collect()
    };
    crossover_at(p1, p2, &cuts)
}

/// Picks `size` individuals uniformly with replacement and returns the index
/// of the fittest, ties to the first drawn.
pub fn tournament<R: Rng + ?Sized>(pop: &[Individual], size: usize, rng: &mut R) -> usize {
    let mut best = rng.gen_range(0..pop.len());
    for _ in 1..size {
        let c = rng.gen_range(0..pop.len());
        if pop[c].fitness > pop[best].fitness {
            best = c;
        }
    }
    best
}

/// T5: keeps the first of every group of byte-identical genomes.
pub fn remove_duplicates(individuals: &mut Vec<Individual>) {
    let mut seen = HashSet::new();
    individuals.retain(|ind| seen.insert(ind.genome_bytes()));
}

/// Like [`remove_duplicates`] but compares rendered pixels at `size`.
pub fn remove_raster_duplicates(individuals: &mut Vec<Individual>, size: (u32, u32)) {
    let mut seen = HashSet::new();
    individuals.retain(|ind| seen.insert(ind.raster_key(size)));
}

/// One generation: refill, store elite, mutate all but the elite, recombine,
/// deduplicate, reinsert the elite.
pub fn step_generation(pop: &mut Population, params: &EvolutionParams, bases: Bases<'_>) -> Result<(), EvolutionError> {
    refill(pop, params, bases)?;
    let elite_idx = pop.best_index().expect("refill leaves at least one individual");
    let elite = pop.individuals[elite_idx].clone();

    let mut rng = pop.rng.clone();
    for (i, ind) in pop.individuals.iter_mut().enumerate() {
        if i != elite_idx {
            mutate(ind, params, &mut rng);
        }
    }

    let n = pop.individuals.len();
    if n >= 2 {
        for _ in 0..n {
            if !rng.gen_bool(params.recombination_prob_per_individual) {
                continue;
            }
            let a = tournament(&pop.individuals, params.tournament_size, &mut rng);
            let b = tournament(&pop.individuals, params.tournament_size, &mut rng);
            if a == b {
                continue;
            }
            let (c1, c2) = crossover(&pop.individuals[a], &pop.individuals[b], params, &mut rng);
            pop.individuals[a] = c1;
            pop.individuals[b] = c2;
        }
    }
    pop.rng = rng;

    let elite_present = if params.dedup_by_raster {
        remove_raster_duplicates(&mut pop.individuals, params.blend.raster);
        let key = elite.raster_key(params.blend.raster);
        pop.individuals.iter().any(|i| i.raster_key(params.blend.raster) == key)
    } else {
        remove_duplicates(&mut pop.individuals);
        let key = elite.genome_bytes();
        pop.individuals.iter().any(|i| i.genome_bytes() == key)
    };
    if !elite_present {
        if pop.individuals.len() < pop.max_size {
            pop.individuals.push(elite);
        } else {
            let worst = pop
                .individuals
                .iter()
                .enumerate()
                .min_by(|x, y| x.1.fitness.total_cmp(&y.1.fitness))
                .map(|(i, _)| i)
                .expect("non-empty");
            pop.individuals[worst] = elite;
        }
    }
    pop.generation += 1;
    Ok(())
}

/// What one population looked like at the end of a run.
#[derive(Debug, Clone)]
pub struct EvolutionRun {
    pub population: Population,
    /// One record for the initial population, then one per generation.
    pub history: Vec<EliteRecord>,
}

/// An analogy together with the scenes its blends are built from.
#[derive(Debug, Clone, Copy)]
pub struct PopulationInput<'a> {
    pub analogy: &'a Analogy,
    pub bases: Bases<'a>,
}

pub fn run_population(id: usize, input: PopulationInput<'_>, params: &EvolutionParams) -> Result<EvolutionRun, EvolutionError> {
    let mut pop = Population::new(id, input.analogy.clone(), params);
    refill(&mut pop, params, input.bases)?;
    let mut history = vec![pop.record()];
    for _ in 0..params.generations {
        step_generation(&mut pop, params, input.bases)?;
        history.push(pop.record());
    }
    Ok(EvolutionRun {
        population: pop,
        history,
    })
}

/// Evolves one population per input. Population `i` draws from its own
/// stream seeded with `seed + i`, so results do not depend on scheduling.
pub fn evolve(inputs: &[PopulationInput<'_>], params: &EvolutionParams) -> Result<Vec<EvolutionRun>, EvolutionError> {
    params.validate()?;
    if inputs.is_empty() {
        return Err(EvolutionError::InvalidParams("no analogy to evolve".into()));
    }
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        inputs
            .par_iter()
            .enumerate()
            .map(|(i, input)| run_population(i, *input, params))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        inputs
            .iter()
            .enumerate()
            .map(|(i, input)| run_population(i, *input, params))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blender::BlendProvenance;
    use crate::mapper::RootMapping;
    use crate::relations::RelationType;
    use crate::scene::{Geometry, GraphicObject, Rgb, Scene, SceneRelation, Shape, Style};

    fn p(s: &str) -> ObjectPath {
        s.parse().unwrap()
    }

    fn rect(w: f64, h: f64) -> Shape {
        Shape::new(
            Geometry::Polygon {
                points: vec![Point::new(0.0, 0.0), Point::new(w, 0.0), Point::new(w, h), Point::new(0.0, h)],
            },
            Style {
                stroke_width: 2.0,
                stroke: Some(Rgb::BLACK),
                fill: Some(Rgb(180, 180, 180)),
            },
        )
    }

    fn obj(name: &str, at: (f64, f64), w: f64, h: f64) -> GraphicObject {
        GraphicObject::new(name).with_offset(Point::new(at.0, at.1)).with_shape(rect(w, h))
    }

    fn individual(head_at: (f64, f64), extra: Option<GraphicObject>) -> Individual {
        let mut root = GraphicObject::new("r")
            .with_child(obj("body", (300.0, 300.0), 400.0, 200.0))
            .with_child(obj("head", head_at, 100.0, 100.0).with_child(obj("eye", (30.0, 30.0), 10.0, 10.0)))
            .with_child(obj("leg", (350.0, 550.0), 40.0, 100.0));
        if let Some(e) = extra {
            root = root.with_child(e);
        }
        let mut scene = Scene::new("r", root);
        scene.relations = vec![
            SceneRelation::new(p("leg"), RelationType::Below, p("body")),
            SceneRelation::new(p("head"), RelationType::Above, p("body")),
        ];
        let analogy = Analogy::root_only(RootMapping::new("a", "b"));
        Individual::new(Blend {
            scene,
            provenance: BlendProvenance {
                analogy,
                base_choice: BaseChoice::Left,
                base_concept: "a".into(),
                base_scene: "a".into(),
                donor_scene: "b".into(),
                seed: 0,
                replacements: vec![],
                compositions: vec![],
            },
        })
    }

    fn names(ind: &Individual) -> Vec<String> {
        ind.genome().into_iter().map(|(p, _)| p.to_string()).collect()
    }

    #[test]
    fn defaults_and_validation() {
        let d = EvolutionParams::default();
        assert_eq!((d.max_size, d.generations, d.crossover_points, d.tournament_size), (50, 100, 2, 2));
        d.validate().unwrap();
        let bad = EvolutionParams {
            tournament_size: 1,
            ..d.clone()
        };
        assert!(bad.validate().is_err());
        let bad = EvolutionParams {
            mutation_prob_per_gene: 1.5,
            ..d
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn genome_skips_root() {
        let ind = individual((400.0, 100.0), None);
        assert_eq!(names(&ind), ["body", "head", "head/eye", "leg"]);
        assert_eq!(ind.fitness(), 1.0);
    }

    #[test]
    fn zero_step_changes_nothing() {
        let mut ind = individual((400.0, 100.0), None);
        let before = ind.clone();
        let params = EvolutionParams {
            mutation_prob_per_gene: 1.0,
            mutation_step: 0.0,
            ..Default::default()
        };
        mutate(&mut ind, &params, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(ind, before);
    }

    #[test]
    fn mutation_moves_children_rigidly() {
        let params = EvolutionParams {
            mutation_prob_per_gene: 1.0,
            ..Default::default()
        };
        let mut ind = individual((0.0, 0.0), None);
        ind.blend.scene = Scene::new("r", GraphicObject::new("r").with_child(obj("only", (100.0, 100.0), 10.0, 10.0)));
        assert_eq!(mutate(&mut ind, &params, &mut ChaCha8Rng::seed_from_u64(9)), 1);
        assert_ne!(ind.blend.scene.object(&p("only")).unwrap().offset, Point::new(100.0, 100.0));

        // Only the parent gene moves: the child's outline follows exactly.
        let mut ind = individual((400.0, 100.0), None);
        let before = ind.blend.scene.bounding_box(&p("head/eye")).unwrap();
        let head = ind.blend.scene.object(&p("head")).unwrap().offset;
        ind.set_offset(&p("head"), head + Point::new(17.0, -4.0));
        let after = ind.blend.scene.bounding_box(&p("head/eye")).unwrap();
        assert_eq!(after.min - before.min, Point::new(17.0, -4.0));
        assert_eq!(after.max - before.max, Point::new(17.0, -4.0));
    }

    #[test]
    fn crossover_identical_parents() {
        let a = individual((400.0, 100.0), None);
        let (c1, c2) = crossover(&a, &a, &EvolutionParams::default(), &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!((c1, c2), (a.clone(), a));
    }

    #[test]
    fn one_point_crossover_at_head() {
        let a = individual((400.0, 100.0), None);
        let b = individual((420.0, 60.0), None);
        // Aligned order: body, head, head/eye, leg. Swap only the head gene.
        let (c1, c2) = crossover_at(&a, &b, &[1, 2]);
        assert_eq!(c1.blend.scene.object(&p("head")).unwrap().offset, Point::new(420.0, 60.0));
        assert_eq!(c2.blend.scene.object(&p("head")).unwrap().offset, Point::new(400.0, 100.0));
        let (c1, _) = crossover_at(&a, &b, &[1]);
        assert_eq!(c1.blend.scene.object(&p("head")).unwrap().offset, Point::new(420.0, 60.0));
    }

    #[test]
    fn unaligned_names_are_immutable() {
        let a = individual((400.0, 100.0), Some(obj("wing", (10.0, 10.0), 50.0, 50.0)));
        let b = individual((420.0, 60.0), None);
        for seed in 0..50 {
            let (c1, c2) = crossover(&a, &b, &EvolutionParams::default(), &mut ChaCha8Rng::seed_from_u64(seed));
            assert_eq!(names(&c1), names(&a));
            assert_eq!(names(&c2), names(&b));
            assert_eq!(c1.blend.scene.object(&p("wing")), a.blend.scene.object(&p("wing")));
        }
    }

    #[test]
    fn dedup_keeps_first() {
        let a = individual((400.0, 100.0), None);
        let b = individual((420.0, 60.0), None);
        let mut v = vec![a.clone(), b.clone(), a.clone(), b, a];
        remove_duplicates(&mut v);
        assert_eq!(v.len(), 2);
    }

    #[test]
    fn raster_dedup_ignores_invisible_differences() {
        let a = individual((400.0, 100.0), Some(GraphicObject::new("marker").with_offset(Point::new(10.0, 10.0))));
        let b = individual((400.0, 100.0), Some(GraphicObject::new("marker").with_offset(Point::new(90.0, 10.0))));
        let mut v = vec![a.clone(), b.clone()];
        remove_duplicates(&mut v);
        assert_eq!(v.len(), 2);
        remove_raster_duplicates(&mut v, (64, 64));
        assert_eq!(v, vec![a]);
    }

    #[test]
    fn tournament_prefers_fitter() {
        let good = individual((400.0, 100.0), None);
        let bad = individual((400.0, 400.0), None);
        assert!(bad.fitness() < good.fitness());
        let pop = vec![bad, good];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let wins = (0..1000).filter(|_| tournament(&pop, 2, &mut rng) == 1).count();
        // P(win) = 3/4 for size 2 with replacement.
        assert!((700..=800).contains(&wins), "{wins}");
    }
}
