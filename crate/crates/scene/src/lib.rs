//! Room-scale side of firesig: plane segmentation of point clouds, 2D charts
//! of planar surfaces, projection of pattern masks onto those surfaces and a
//! distance-annotated scene graph.

pub mod chart;
pub mod cloud;
pub mod graph;
pub mod procedural;
pub mod project;
pub mod scene_file;
pub mod segment;

use std::path::PathBuf;

use thiserror::Error;

pub use chart::{plane_to_image, ImageChart};
pub use cloud::PointCloud;
pub use graph::{build_scene_graph, Furniture, GraphConfig, SceneGraph};
pub use project::{project_mask, Placement, ProjectedPattern};
pub use segment::{segment_planes, PlanarSegment, SegmentConfig, SurfaceKind};

pub type Vec3 = nalgebra::Vector3<f64>;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("{0}: {1}")]
    Io(PathBuf, #[source] std::io::Error),
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("point cloud has {0} points, at least {1} are needed")]
    TooFewPoints(usize, usize),
    #[error("point {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("no plane reached {0} inliers")]
    NoPlanesFound(usize),
    #[error("segment {0}: plane normal is parallel to gravity")]
    DegenerateBasis(usize),
    #[error("segment {0} has fewer than 3 inliers")]
    TooFewInliers(usize),
    #[error("no inlier of segment {0} falls on the mask foreground")]
    EmptyProjection(usize),
    #[error("dangling reference: {0}")]
    DanglingReference(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("scene file {field}: {msg}")]
    Schema { field: String, msg: String },
}
