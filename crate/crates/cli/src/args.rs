use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use firesig::{ChordMode, ClassScheme};

#[derive(Debug, Parser)]
#[command(name = "firesig", version, about = "Fire-pattern shape signatures, classification and scene graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic mask dataset (PGM files plus manifest.csv).
    Generate(GenerateArgs),
    /// Aspect-ratio signature and extrema of one mask.
    Signature(SignatureArgs),
    /// Feature table of a dataset directory.
    Features(FeaturesArgs),
    /// Train a forest on the training part of a dataset.
    Train(TrainArgs),
    /// Score a model on the train and test parts of a dataset.
    Eval(EvalArgs),
    /// Classify one mask and print the decision path.
    Explain(ExplainArgs),
    /// Segment a scene and project its pattern masks onto surfaces.
    Project(SceneArgs),
    /// Full scene pipeline: projection, classification and scene graph.
    Graph(SceneArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Classes {
    /// Seven labels, both triangles merged.
    #[default]
    Grouped,
    /// Eight labels, one per generator.
    Full,
}

impl From<Classes> for ClassScheme {
    fn from(c: Classes) -> Self {
        match c {
            Classes::Grouped => ClassScheme::Grouped,
            Classes::Full => ClassScheme::Full,
        }
    }
}

#[derive(Clone, Debug, Args)]
pub struct FeatureArgs {
    /// Chord measurement: `ray` (centroid to farthest hit) or `line`.
    #[arg(long, default_value = "ray")]
    pub mode: ChordMode,
    /// JSON file overriding the extrema detection settings.
    #[arg(long, value_name = "FILE")]
    pub extrema: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub out: PathBuf,
    /// Samples per generator class.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON file with synthesis settings; flags override it.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Switch every perturbation off.
    #[arg(long)]
    pub clean: bool,
}

#[derive(Debug, Args)]
pub struct SignatureArgs {
    /// PGM or PNG mask.
    pub mask: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub features: FeatureArgs,
    /// Also write signature.svg.
    #[arg(long)]
    pub plot: bool,
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    /// Dataset directory containing manifest.csv.
    pub dataset: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub classes: Classes,
    #[command(flatten)]
    pub features: FeatureArgs,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    pub dataset: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Seed for the split and the forest.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fraction of each class used for training; 1 trains on everything.
    #[arg(long, default_value_t = 0.7)]
    pub split: f64,
    #[arg(long, default_value_t = 100)]
    pub trees: usize,
    #[arg(long, default_value_t = 12)]
    pub depth: usize,
    #[arg(long, default_value_t = 2)]
    pub min_leaf: usize,
    /// Features tried per split [default: ceil(sqrt(dim))].
    #[arg(long)]
    pub mtry: Option<usize>,
    /// Grow every tree on the full training set.
    #[arg(long)]
    pub no_bootstrap: bool,
    #[arg(long, value_enum, default_value_t)]
    pub classes: Classes,
    #[command(flatten)]
    pub features: FeatureArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub dataset: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Split seed [default: the model's training seed].
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 0.7)]
    pub split: f64,
    #[command(flatten)]
    pub features: FeatureArgs,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    pub mask: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// How many of the most used split features to list.
    #[arg(long, default_value_t = 20)]
    pub top: usize,
    #[command(flatten)]
    pub features: FeatureArgs,
}

#[derive(Debug, Args)]
pub struct SceneArgs {
    #[arg(long, value_name = "FILE")]
    pub scene: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Classify each placed mask with this model.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// NEAR threshold in meters, overriding the scene file.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Also write a top-down scene.svg.
    #[arg(long)]
    pub plot: bool,
    #[command(flatten)]
    pub features: FeatureArgs,
}
