//! Aspect-ratio shape signatures for fire-pattern silhouettes, their
//! peak/valley features, a synthetic mask generator and a random-forest
//! classifier.

pub mod dataset;
pub mod features;
pub mod forest;
pub mod mask;
pub mod metrics;
pub mod signature;
pub mod synth;

pub use features::{build_features, ExtremaConfig, PatternFeatures, FEATURE_DIM};
pub use forest::{train, ForestModel, ForestParams, LabeledSet, Prediction};
pub use mask::{read_mask, ShapeMask};
pub use metrics::{evaluate, MetricsReport};
pub use signature::{aspect_signature, AspectSignature, ChordMode};
pub use synth::{ClassScheme, PatternClass, SynthConfig};
