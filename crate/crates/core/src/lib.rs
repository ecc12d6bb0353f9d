//! Analogy-driven visual blending.
//!
//! Two concept graphs are mapped onto each other ([`mapper`]); the resulting
//! analogies drive part replacement and composition between structured vector
//! scenes ([`blender`]), and a genetic algorithm ([`evolution`]) moves parts
//! around until the declared spatial relations ([`relations`]) hold.

pub mod blender;
pub mod evolution;
pub mod geom;
pub mod graph;
pub mod mapper;
mod raster;
pub mod relations;
pub mod scene;
pub mod svg;

pub use blender::{
    construct_blend, BaseChoice, Blend, BlendError, BlendParams, BlendProvenance, PartName, Representation,
};
pub use geom::{BBox, Point};
pub use graph::{parse_triples, ConceptGraph, EdgeDirection, GraphError, NeighborQuery, Triple};
pub use mapper::{
    enumerate_root_mappings, expand_root_mapping, find_analogies, Analogy, AnalogySet, MapperError,
    MapperParams, RootMapping, SignatureStep,
};
pub use relations::{fitness, Fitness, RelationType};
pub use scene::{GraphicObject, GrayBitmap, ObjectPath, Scene, SceneError, SceneRelation};
pub use svg::{export_svg, import_svg, import_svg_with_relations, SvgError};
pub use evolution::{evolve, EliteRecord, EvolutionError, EvolutionParams, EvolutionRun, Individual, Population};
