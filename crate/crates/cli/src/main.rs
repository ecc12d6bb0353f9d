use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use visual_blender::blender::{construct_blend, BaseChoice, BlendParams, BlendProvenance, Representation};
use visual_blender::evolution::{evolve, Bases, EliteRecord, EvolutionError, EvolutionParams, PopulationInput};
use visual_blender::{
    export_svg, find_analogies, fitness, import_svg, import_svg_with_relations, parse_triples, Analogy,
    AnalogySet, ConceptGraph, MapperError, MapperParams, Scene,
};

#[derive(Parser)]
#[command(name = "vblend", version, about = "Find analogies between concept graphs and turn them into visual blends")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Map two concept graphs and write the best analogies as JSON.
    Map(MapArgs),
    /// Build one blend per analogy and base side.
    Blend(BlendArgs),
    /// Evolve one population per analogy and write galleries.
    Evolve(EvolveArgs),
    /// Print the relation fitness of a scene.
    Score(ScoreArgs),
}

#[derive(Args, Clone)]
struct MapperOpts {
    /// Deepest expansion level.
    #[arg(long, default_value_t = 4)]
    max_depth: usize,
    /// Pair concepts across the two graphs only (otherwise across their union).
    #[arg(long, default_value_t = true, num_args = 0..=1, default_missing_value = "true", action = clap::ArgAction::Set)]
    cross_space_only: bool,
    /// Smallest analogy size worth reporting.
    #[arg(long, default_value_t = 2)]
    min_mappings: usize,
}

impl MapperOpts {
    fn params(&self) -> MapperParams {
        MapperParams {
            max_depth: self.max_depth,
            cross_space_only: self.cross_space_only,
            min_mappings: self.min_mappings,
            ..MapperParams::default()
        }
    }
}

#[derive(Args, Clone)]
struct GateOpts {
    /// Blends closer than this normalized RMSE to an input are rejected.
    #[arg(long, default_value_t = 0.02)]
    similarity_threshold: f64,
    /// Raster size for the similarity check, WIDTHxHEIGHT.
    #[arg(long, default_value = "256x256", value_parser = parse_raster)]
    raster: (u32, u32),
}

impl GateOpts {
    fn params(&self) -> BlendParams {
        BlendParams {
            raster: self.raster,
            similarity_threshold: self.similarity_threshold,
            ..BlendParams::default()
        }
    }
}

fn parse_raster(s: &str) -> Result<(u32, u32), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected WIDTHxHEIGHT")?;
    let w: u32 = w.trim().parse().map_err(|_| format!("bad width `{w}`"))?;
    let h: u32 = h.trim().parse().map_err(|_| format!("bad height `{h}`"))?;
    if w == 0 || h == 0 {
        return Err("raster dimensions must be positive".into());
    }
    Ok((w, h))
}

#[derive(Args)]
struct MapArgs {
    left: PathBuf,
    right: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    mapper: MapperOpts,
}

#[derive(Args)]
struct BlendArgs {
    /// Analogy file written by `map`.
    analogies: PathBuf,
    /// Directory holding `<concept>.json` or `<concept>.svg` scenes.
    scenes: PathBuf,
    /// Directory for the SVG and provenance files.
    out: PathBuf,
    #[arg(long, env = "BLEND_SEED", default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    gate: GateOpts,
}

#[derive(Args)]
struct EvolveArgs {
    /// Two or more concept graphs; every pair is mapped.
    #[arg(required = true, num_args = 2..)]
    triples: Vec<PathBuf>,
    /// Directory holding `<concept>.json` or `<concept>.svg` scenes.
    #[arg(long)]
    scenes: PathBuf,
    /// Directory for the gallery, elite.csv and manifest.json.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, env = "BLEND_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    generations: usize,
    #[arg(long, default_value_t = 50)]
    pop_size: usize,
    /// Mutation probability per gene.
    #[arg(long, default_value_t = 0.05)]
    mutation: f64,
    /// Recombination probability per individual.
    #[arg(long, default_value_t = 0.2)]
    recombination: f64,
    #[arg(long, default_value_t = 2)]
    tournament: usize,
    #[arg(long, default_value_t = 2)]
    crossover_points: usize,
    /// Largest per-axis displacement of one mutation, canvas units.
    #[arg(long, default_value_t = 30.0)]
    mutation_step: f64,
    /// Drop individuals whose rasters match instead of whose genomes match.
    #[arg(long)]
    dedup_raster: bool,
    /// Evolve at most this many analogies, in discovery order.
    #[arg(long)]
    max_populations: Option<usize>,
    #[command(flatten)]
    mapper: MapperOpts,
    #[command(flatten)]
    gate: GateOpts,
}

#[derive(Args)]
struct ScoreArgs {
    /// Scene JSON, or SVG with an optional `.relations.json` next to it.
    scene: PathBuf,
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Empty(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Empty(_) => 3,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn input(msg: impl std::fmt::Display) -> CliError {
    CliError::Input(msg.to_string())
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn create_dir(path: &Path) -> CliResult<()> {
    std::fs::create_dir_all(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> CliResult<ConceptGraph> {
    let mut g = parse_triples(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))?;
    g.name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("graph")
        .to_string();
    Ok(g)
}

fn load_scene_file(path: &Path) -> CliResult<Scene> {
    let text = read(path)?;
    let bad = |e: &dyn std::fmt::Display| input(format!("{}: {e}", path.display()));
    if path.extension().is_some_and(|e| e == "svg") {
        let sidecar = path.with_extension("relations.json");
        if sidecar.exists() {
            import_svg_with_relations(&text, &read(&sidecar)?).map_err(|e| bad(&e))
        } else {
            import_svg(&text).map_err(|e| bad(&e))
        }
    } else {
        Scene::from_json(&text).map_err(|e| bad(&e))
    }
}

/// `<dir>/<concept>.json`, else `<dir>/<concept>.svg`.
fn load_representation(dir: &Path, concept: &str) -> CliResult<Representation> {
    let json = dir.join(format!("{concept}.json"));
    let svg = dir.join(format!("{concept}.svg"));
    let path = if json.exists() {
        json
    } else if svg.exists() {
        svg
    } else {
        return Err(input(format!("no scene for `{concept}` in {}", dir.display())));
    };
    Ok(Representation::new(concept, load_scene_file(&path)?))
}

#[derive(Serialize)]
struct BlendRecord<'a> {
    analogy_id: usize,
    fitness: f64,
    relation_count: usize,
    provenance: &'a BlendProvenance,
}

fn blend_record(analogy_id: usize, scene: &Scene, provenance: &BlendProvenance) -> String {
    let f = fitness(scene);
    let record = BlendRecord {
        analogy_id,
        fitness: f.value,
        relation_count: f.relation_count,
        provenance,
    };
    serde_json::to_string_pretty(&record).expect("records serialize") + "\n"
}

fn cmd_map(args: MapArgs) -> CliResult<()> {
    let left = load_graph(&args.left)?;
    let right = load_graph(&args.right)?;
    let analogies = match find_analogies(&left, &right, &args.mapper.params()) {
        Ok(a) => a,
        Err(e @ MapperError::NoAnalogy { .. }) => return Err(CliError::Empty(e.to_string())),
        Err(e) => return Err(input(e)),
    };
    let max = analogies.iter().map(Analogy::len).max().unwrap_or(0);
    let set = AnalogySet {
        left: left.name.clone(),
        right: right.name.clone(),
        analogies,
    };
    let json = serde_json::to_string_pretty(&set).expect("analogies serialize") + "\n";
    let summary = format!("{} analogies, {} mappings each", set.analogies.len(), max);
    match &args.out {
        Some(out) => {
            write(out, json)?;
            println!("{summary}");
        }
        None => {
            print!("{json}");
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn cmd_blend(args: BlendArgs) -> CliResult<()> {
    let text = read(&args.analogies)?;
    let set: AnalogySet =
        serde_json::from_str(&text).map_err(|e| input(format!("{}: {e}", args.analogies.display())))?;
    if set.analogies.is_empty() {
        eprintln!("warning: {} holds no analogies; nothing to blend", args.analogies.display());
        return Ok(());
    }
    if !(0.0..=1.0).contains(&args.gate.similarity_threshold) {
        return Err(input("similarity threshold must lie in [0, 1]"));
    }
    let left = load_representation(&args.scenes, &set.left)?;
    let right = load_representation(&args.scenes, &set.right)?;
    create_dir(&args.out)?;
    let params = args.gate.params();
    let mut emitted = 0;
    for (i, analogy) in set.analogies.iter().enumerate() {
        for (o, choice) in [BaseChoice::Left, BaseChoice::Right].into_iter().enumerate() {
            let (ra, rb) = match choice {
                BaseChoice::Left => (&left, &right),
                BaseChoice::Right => (&right, &left),
            };
            let seed = args.seed.wrapping_add((2 * i + o) as u64);
            let blend = construct_blend(analogy, choice, ra, rb, seed, &params).map_err(input)?;
            let Some(blend) = blend else {
                eprintln!("skipping analogy {i} on {}: too similar to an input", ra.id);
                continue;
            };
            let stem = format!("blend_{i:03}_{}", ra.id);
            write(&args.out.join(format!("{stem}.svg")), export_svg(&blend.scene))?;
            write(
                &args.out.join(format!("{stem}.json")),
                blend_record(i, &blend.scene, &blend.provenance),
            )?;
            emitted += 1;
        }
    }
    println!("{emitted} blends written to {}", args.out.display());
    Ok(())
}

#[derive(Serialize)]
struct PopulationEntry<'a> {
    id: usize,
    left: &'a str,
    right: &'a str,
    analogy: &'a Analogy,
    elite_curve: &'a [EliteRecord],
    best_fitness: f64,
    files: Vec<String>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    params: &'a EvolutionParams,
    mapper: MapperParams,
    concepts: Vec<&'a str>,
    elite_csv: &'static str,
    populations: Vec<PopulationEntry<'a>>,
}

#[derive(Serialize)]
struct CsvRow {
    generation: usize,
    population: usize,
    best: f64,
    mean: f64,
}

fn cmd_evolve(args: EvolveArgs) -> CliResult<()> {
    let graphs = args.triples.iter().map(|p| load_graph(p)).collect::<CliResult<Vec<_>>>()?;
    let reps = graphs
        .iter()
        .map(|g| load_representation(&args.scenes, &g.name))
        .collect::<CliResult<Vec<_>>>()?;
    let params = EvolutionParams {
        mutation_prob_per_gene: args.mutation,
        recombination_prob_per_individual: args.recombination,
        tournament_size: args.tournament,
        crossover_points: args.crossover_points,
        max_size: args.pop_size,
        generations: args.generations,
        mutation_step: args.mutation_step,
        seed: args.seed,
        dedup_by_raster: args.dedup_raster,
        blend: args.gate.params(),
    };
    params.validate().map_err(input)?;

    let mapper = args.mapper.params();
    let mut jobs: Vec<(usize, usize, Analogy)> = Vec::new();
    for i in 0..graphs.len() {
        for j in i + 1..graphs.len() {
            match find_analogies(&graphs[i], &graphs[j], &mapper) {
                Ok(found) => jobs.extend(found.into_iter().map(|a| (i, j, a))),
                Err(e @ MapperError::NoAnalogy { .. }) => {
                    eprintln!("{} / {}: {e}", graphs[i].name, graphs[j].name)
                }
                Err(e) => return Err(input(e)),
            }
        }
    }
    if let Some(max) = args.max_populations {
        jobs.truncate(max);
    }
    if jobs.is_empty() {
        return Err(CliError::Empty("no analogy to evolve".into()));
    }
    let inputs: Vec<PopulationInput> = jobs
        .iter()
        .map(|(i, j, a)| PopulationInput {
            analogy: a,
            bases: Bases {
                left: &reps[*i],
                right: &reps[*j],
            },
        })
        .collect();
    let runs = match evolve(&inputs, &params) {
        Ok(r) => r,
        Err(e @ EvolutionError::RefillExhausted { .. }) => return Err(CliError::Empty(e.to_string())),
        Err(e) => return Err(input(e)),
    };

    create_dir(&args.out)?;
    let mut csv = csv::Writer::from_path(args.out.join("elite.csv")).map_err(input)?;
    let mut entries = Vec::new();
    for (run, (i, j, analogy)) in runs.iter().zip(&jobs) {
        let pop = &run.population;
        for rec in &run.history {
            csv.serialize(CsvRow {
                generation: rec.generation,
                population: pop.id,
                best: rec.best,
                mean: rec.mean,
            })
            .map_err(input)?;
        }
        let dir_name = format!("pop_{:03}", pop.id);
        let dir = args.out.join(&dir_name);
        create_dir(&dir)?;
        let mut order: Vec<usize> = (0..pop.individuals.len()).collect();
        order.sort_by(|&a, &b| pop.individuals[b].fitness().total_cmp(&pop.individuals[a].fitness()));
        let mut files = Vec::new();
        for (rank, &k) in order.iter().enumerate() {
            let ind = &pop.individuals[k];
            let stem = format!("ind_{rank:03}");
            write(&dir.join(format!("{stem}.svg")), export_svg(&ind.blend.scene))?;
            write(
                &dir.join(format!("{stem}.json")),
                blend_record(pop.id, &ind.blend.scene, &ind.blend.provenance),
            )?;
            files.push(format!("{dir_name}/{stem}.svg"));
            files.push(format!("{dir_name}/{stem}.json"));
        }
        entries.push(PopulationEntry {
            id: pop.id,
            left: &graphs[*i].name,
            right: &graphs[*j].name,
            analogy,
            elite_curve: &run.history,
            best_fitness: pop.best().map_or(0.0, |b| b.fitness()),
            files,
        });
    }
    csv.flush().map_err(input)?;
    let manifest = Manifest {
        params: &params,
        mapper,
        concepts: graphs.iter().map(|g| g.name.as_str()).collect(),
        elite_csv: "elite.csv",
        populations: entries,
    };
    write(
        &args.out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n",
    )?;
    for run in &runs {
        let last = run.history.last().expect("history starts with the initial population");
        println!(
            "population {}: best {:.4}, mean {:.4} after {} generations",
            run.population.id, last.best, last.mean, last.generation
        );
    }
    Ok(())
}

fn cmd_score(args: ScoreArgs) -> CliResult<()> {
    let scene = load_scene_file(&args.scene)?;
    let f = fitness(&scene);
    for r in &scene.relations {
        let v = visual_blender::relations::eval_relation(&scene, r).map_or(0.0, |s| s.value);
        println!("{v:.4}  {} {} {}", r.subject, r.rel_type, r.object);
    }
    println!("fitness {:.6} over {} relations", f.value, f.relation_count);
    if f.is_degenerate() {
        eprintln!("warning: scene declares no relations");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Map(a) => cmd_map(a),
        Command::Blend(a) => cmd_blend(a),
        Command::Evolve(a) => cmd_evolve(a),
        Command::Score(a) => cmd_score(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (CliError::Input(msg) | CliError::Empty(msg)) = &e;
            eprintln!("error: {msg}");
            ExitCode::from(e.code())
        }
    }
}
