use std::path::Path;

use firesig::dataset::{
    features_csv, load_features, mask_features, read_manifest, stratified_split, DatasetError, FeatureOptions,
};
use firesig::forest::ForestError;
use firesig::synth::{generate_dataset, manifest_csv, SynthError};
use firesig::{
    aspect_signature, build_features, evaluate, read_mask, train, ClassScheme, ExtremaConfig, ForestModel,
    ForestParams, LabeledSet, ShapeMask, SynthConfig, FEATURE_DIM,
};
use firesig_scene::graph::segment_node_id;
use firesig_scene::project::Classification;
use firesig_scene::scene_file::{run_scene, SceneFile, SceneOutput};
use firesig_scene::SceneError;
use serde_json::{json, Value};

use crate::args::{
    EvalArgs, ExplainArgs, FeatureArgs, FeaturesArgs, GenerateArgs, SceneArgs, SignatureArgs, TrainArgs,
};
use crate::error::{CliError, CliResult, Failure, OrFail};
use crate::output::OutDir;
use crate::svg;

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .or_fail_with(Failure::Config, || format!("reading {what} {}", path.display()))?;
    serde_json::from_str(&text).or_fail_with(Failure::Config, || format!("parsing {what} {}", path.display()))
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("value serializes") + "\n"
}

fn feature_options(args: &FeatureArgs) -> CliResult<FeatureOptions> {
    let extrema: ExtremaConfig = match &args.extrema {
        Some(p) => read_json(p, "extrema config")?,
        None => ExtremaConfig::default(),
    };
    extrema.validate().or_fail(Failure::Config)?;
    Ok(FeatureOptions {
        mode: args.mode,
        extrema,
    })
}

fn dataset_failure(e: DatasetError) -> CliError {
    let failure = match e {
        DatasetError::Manifest { .. } => Failure::Config,
        DatasetError::Io(..) => Failure::Config,
        DatasetError::Mask { .. } | DatasetError::Signature { .. } => Failure::Mask,
    };
    CliError::new(failure, e)
}

fn load_dataset(dir: &Path, scheme: ClassScheme, opts: &FeatureOptions) -> CliResult<LabeledSet> {
    let entries = read_manifest(dir).map_err(dataset_failure)?;
    if entries.is_empty() {
        return Err(CliError::msg(Failure::Config, format!("{}: manifest lists no samples", dir.display())));
    }
    load_features(dir, &entries, scheme, opts).map_err(dataset_failure)
}

fn forest_failure(e: ForestError) -> CliError {
    let failure = match e {
        ForestError::InsufficientData(_) | ForestError::Params(_) => Failure::Config,
        ForestError::DimensionMismatch { .. } | ForestError::Model(_) | ForestError::Json(_) => Failure::Model,
    };
    CliError::new(failure, e)
}

fn load_model(path: &Path) -> CliResult<ForestModel> {
    let text = std::fs::read_to_string(path).or_fail_with(Failure::Model, || format!("reading model {}", path.display()))?;
    let model = ForestModel::from_json(&text).map_err(|e| {
        let mut err = forest_failure(e);
        err.failure = Failure::Model;
        err
    })?;
    if model.feature_dim != FEATURE_DIM {
        return Err(forest_failure(ForestError::DimensionMismatch {
            expected: model.feature_dim,
            got: FEATURE_DIM,
        }));
    }
    Ok(model)
}

fn scheme_of(model: &ForestModel) -> CliResult<ClassScheme> {
    [ClassScheme::Grouped, ClassScheme::Full]
        .into_iter()
        .find(|s| s.class_names() == model.class_names)
        .ok_or_else(|| {
            CliError::msg(
                Failure::Model,
                format!("model classes {:?} match no known label set", model.class_names),
            )
        })
}

fn check_split(split: f64) -> CliResult<()> {
    if !(split > 0.0 && split <= 1.0) {
        return Err(CliError::msg(Failure::Config, format!("--split must lie in (0, 1], got {split}")));
    }
    Ok(())
}

/// Training and test parts; a split of 1 keeps every row for training.
fn split(set: &LabeledSet, frac: f64, seed: u64) -> (LabeledSet, LabeledSet) {
    if frac >= 1.0 {
        (set.clone(), LabeledSet::new(set.class_names.clone()))
    } else {
        stratified_split(set, frac, seed)
    }
}

pub fn generate(args: &GenerateArgs) -> CliResult<()> {
    let mut cfg: SynthConfig = match &args.config {
        Some(p) => read_json(p, "synth config")?,
        None => SynthConfig::default(),
    };
    if let Some(n) = args.n {
        cfg.n_per_class = n;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if args.clean {
        cfg = cfg.clean();
    }
    if cfg.n_per_class == 0 {
        return Err(CliError::msg(Failure::Config, "--n must be at least 1"));
    }
    cfg.validate().or_fail(Failure::Config)?;
    let out = OutDir::acquire(&args.out)?;
    let samples = generate_dataset(&cfg).map_err(|e| {
        let failure = match e {
            SynthError::Config(_) => Failure::Config,
            _ => Failure::Generation,
        };
        CliError::new(failure, e)
    })?;
    for s in &samples {
        out.write(&s.filename(), s.mask.to_pgm())?;
    }
    out.write(firesig::dataset::MANIFEST_FILE, manifest_csv(&samples))?;
    out.write_record("generate", json!({ "out": args.out, "synth": cfg }))?;
    println!("wrote {} masks to {}", samples.len(), args.out.display());
    Ok(())
}

pub fn signature(args: &SignatureArgs) -> CliResult<()> {
    let opts = feature_options(&args.features)?;
    let mask = read_mask(&args.mask).or_fail_with(Failure::Mask, || format!("reading mask {}", args.mask.display()))?;
    let sig = aspect_signature(&mask, opts.mode).or_fail_with(Failure::Mask, || args.mask.display().to_string())?;
    let feats = build_features(&sig, &opts.extrema);
    let out = OutDir::acquire(&args.out)?;
    out.write("signature.csv", sig.to_csv())?;
    out.write("features.json", pretty(&feats))?;
    if args.plot {
        let title = format!(
            "{} ({} chord): {} peaks, {} valleys",
            args.mask.file_name().map(|n| n.to_string_lossy()).unwrap_or_default(),
            opts.mode,
            feats.n_peaks,
            feats.n_valleys
        );
        out.write("signature.svg", svg::signature_plot(sig.values(), &feats.peaks, &feats.valleys, &title))?;
    }
    out.write_record(
        "signature",
        json!({ "mask": args.mask, "out": args.out, "features": opts, "plot": args.plot }),
    )?;
    let angles = |v: &[firesig::features::Extremum]| v.iter().map(|e| e.angle).collect::<Vec<_>>();
    println!("peaks: {} at {:?}", feats.n_peaks, angles(&feats.peaks));
    println!("valleys: {} at {:?}", feats.n_valleys, angles(&feats.valleys));
    Ok(())
}

pub fn features(args: &FeaturesArgs) -> CliResult<()> {
    let opts = feature_options(&args.features)?;
    let scheme = ClassScheme::from(args.classes);
    let set = load_dataset(&args.dataset, scheme, &opts)?;
    let out = OutDir::acquire(&args.out)?;
    out.write("features.csv", features_csv(&set))?;
    out.write_record(
        "features",
        json!({ "dataset": args.dataset, "out": args.out, "classes": scheme, "features": opts }),
    )?;
    println!("wrote {} feature rows", set.len());
    Ok(())
}

pub fn train_cmd(args: &TrainArgs) -> CliResult<()> {
    check_split(args.split)?;
    let opts = feature_options(&args.features)?;
    let scheme = ClassScheme::from(args.classes);
    let params = ForestParams {
        n_trees: args.trees,
        max_depth: args.depth,
        min_samples_leaf: args.min_leaf,
        features_per_split: args.mtry,
        bootstrap: !args.no_bootstrap,
    };
    params.validate().map_err(forest_failure)?;
    let set = load_dataset(&args.dataset, scheme, &opts)?;
    let (train_set, test_set) = split(&set, args.split, args.seed);
    let model = train(&train_set, &params, args.seed).map_err(forest_failure)?;
    let out = OutDir::acquire(&args.out)?;
    out.write("model.json", model.to_json())?;
    out.write_record(
        "train",
        json!({
            "dataset": args.dataset,
            "out": args.out,
            "seed": args.seed,
            "split": args.split,
            "classes": scheme,
            "features": opts,
            "forest": params,
            "train_rows": train_set.len(),
            "test_rows": test_set.len(),
        }),
    )?;
    println!(
        "trained {} trees on {} rows ({} held out)",
        model.trees.len(),
        train_set.len(),
        test_set.len()
    );
    Ok(())
}

pub fn eval(args: &EvalArgs) -> CliResult<()> {
    check_split(args.split)?;
    let opts = feature_options(&args.features)?;
    let model = load_model(&args.model)?;
    let scheme = scheme_of(&model)?;
    let seed = args.seed.unwrap_or(model.train_seed);
    let set = load_dataset(&args.dataset, scheme, &opts)?;
    let (train_set, test_set) = split(&set, args.split, seed);
    let out = OutDir::acquire(&args.out)?;
    let mut summary = serde_json::Map::new();
    for (name, part) in [("train", &train_set), ("test", &test_set)] {
        if part.is_empty() {
            continue;
        }
        let report = evaluate(&model, part).map_err(forest_failure)?;
        out.write(&format!("metrics_{name}.csv"), report.to_csv())?;
        out.write(&format!("confusion_{name}.csv"), report.confusion_csv())?;
        println!("{name} ({} rows)", part.len());
        print!("{}", report.to_csv());
        summary.insert(
            name.into(),
            json!({
                "rows": part.len(),
                "accuracy": report.accuracy,
                "macro_precision": report.macro_precision,
                "macro_recall": report.macro_recall,
                "macro_f1": report.macro_f1,
            }),
        );
    }
    out.write_record(
        "eval",
        json!({
            "dataset": args.dataset,
            "model": args.model,
            "out": args.out,
            "seed": seed,
            "split": args.split,
            "classes": scheme,
            "features": opts,
            "summary": summary,
        }),
    )?;
    Ok(())
}

/// Class and probability vector of a mask, if its features can be computed.
fn classify(model: &ForestModel, mask: &ShapeMask, opts: &FeatureOptions) -> Option<Classification> {
    let feats = mask_features(mask, opts).ok()?;
    let pred = model.predict(&feats.to_vector()).ok()?;
    Some(Classification {
        label: pred.class_name.clone(),
        probability: pred.probabilities[pred.label],
        probabilities: model.class_names.iter().cloned().zip(pred.probabilities).collect(),
    })
}

pub fn explain(args: &ExplainArgs) -> CliResult<()> {
    let opts = feature_options(&args.features)?;
    let model = load_model(&args.model)?;
    let mask = read_mask(&args.mask).or_fail_with(Failure::Mask, || format!("reading mask {}", args.mask.display()))?;
    let feats = mask_features(&mask, &opts).or_fail_with(Failure::Mask, || args.mask.display().to_string())?;
    let x = feats.to_vector();
    let pred = model.predict(&x).map_err(forest_failure)?;
    let expl = model.explain(&x).map_err(forest_failure)?;

    let mut text = format!(
        "prediction: {} ({:.0}% of {} trees)\n",
        pred.class_name,
        100.0 * pred.probabilities[pred.label],
        model.trees.len()
    );
    for (name, p) in model.class_names.iter().zip(&pred.probabilities) {
        text.push_str(&format!("  {name:<14} {p:.3}\n"));
    }
    text.push_str(&expl.render(args.top));

    let out = OutDir::acquire(&args.out)?;
    out.write("explanation.txt", &text)?;
    out.write(
        "explanation.json",
        pretty(&json!({ "prediction": {
            "label": pred.class_name,
            "probabilities": pred.probabilities,
            "votes": pred.votes,
        }, "path": expl })),
    )?;
    out.write_record(
        "explain",
        json!({ "mask": args.mask, "model": args.model, "out": args.out, "top": args.top, "features": opts }),
    )?;
    print!("{text}");
    Ok(())
}

fn scene_failure(e: SceneError) -> CliError {
    let failure = match e {
        SceneError::Schema { .. } | SceneError::DanglingReference(_) => Failure::Scene,
        SceneError::Config(_) => Failure::Config,
        _ => Failure::Runtime,
    };
    CliError::new(failure, e)
}

fn run_scene_cmd(args: &SceneArgs) -> CliResult<(SceneFile, SceneOutput, FeatureOptions)> {
    let opts = feature_options(&args.features)?;
    let mut file = SceneFile::load(&args.scene).map_err(|e| match e {
        SceneError::Io(..) => CliError::new(Failure::Config, e),
        e => scene_failure(e),
    })?;
    if let Some(tau) = args.tau {
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(CliError::msg(Failure::Config, format!("--tau must be finite and >= 0, got {tau}")));
        }
        file.graph.tau = tau;
    }
    let model = args.model.as_deref().map(load_model).transpose()?;
    let base = args.scene.parent().unwrap_or(Path::new("."));
    let scene = run_scene(&file, base, |mask| model.as_ref().and_then(|m| classify(m, mask, &opts)))
        .map_err(scene_failure)?;
    for w in &scene.warnings {
        eprintln!("warning: {w}");
    }
    Ok((file, scene, opts))
}

fn segments_json(scene: &SceneOutput) -> Value {
    Value::Array(
        scene
            .segments
            .iter()
            .map(|s| {
                json!({
                    "id": segment_node_id(s.id),
                    "kind": s.kind,
                    "normal": [s.plane.normal.x, s.plane.normal.y, s.plane.normal.z],
                    "offset": s.plane.offset,
                    "n_inliers": s.inliers.len(),
                    "centroid": [s.centroid.x, s.centroid.y, s.centroid.z],
                    "chart": s.chart.map(|c| json!({
                        "origin": [c.origin.x, c.origin.y, c.origin.z],
                        "u": [c.u.x, c.u.y, c.u.z],
                        "v": [c.v.x, c.v.y, c.v.z],
                    })),
                    "bounds": {
                        "u_min": s.bounds.u_min,
                        "u_max": s.bounds.u_max,
                        "v_min": s.bounds.v_min,
                        "v_max": s.bounds.v_max,
                    },
                    "rms_residual": s.rms_residual,
                })
            })
            .collect(),
    )
}

fn patterns_json(scene: &SceneOutput) -> Value {
    Value::Array(
        scene
            .patterns
            .iter()
            .map(|p| {
                json!({
                    "id": format!("pattern_{}", p.id),
                    "source": p.source,
                    "host": segment_node_id(scene.segments[p.host].id),
                    "class": p.class,
                    "centroid": [p.centroid.x, p.centroid.y, p.centroid.z],
                    "area_m2": p.area_m2,
                    "clipped": p.clipped,
                    "indices": p.indices,
                })
            })
            .collect(),
    )
}

fn write_sketch(out: &OutDir, args: &SceneArgs, file: &SceneFile, scene: &SceneOutput) -> CliResult<()> {
    if args.plot {
        let title = format!("{} (top view)", args.scene.display());
        out.write("scene.svg", svg::scene_sketch(scene, &file.furniture, &title))?;
    }
    Ok(())
}

pub fn project(args: &SceneArgs) -> CliResult<()> {
    let (file, scene, opts) = run_scene_cmd(args)?;
    let out = OutDir::acquire(&args.out)?;
    out.write("segments.json", pretty(&segments_json(&scene)))?;
    out.write("patterns.json", pretty(&patterns_json(&scene)))?;
    write_sketch(&out, args, &file, &scene)?;
    out.write_record("project", scene_record(args, &file, &opts))?;
    println!("{} segments, {} patterns", scene.segments.len(), scene.patterns.len());
    Ok(())
}

pub fn graph(args: &SceneArgs) -> CliResult<()> {
    let (file, scene, opts) = run_scene_cmd(args)?;
    let out = OutDir::acquire(&args.out)?;
    out.write("graph.json", scene.graph.to_json() + "\n")?;
    out.write("distances.csv", scene.graph.distances_csv())?;
    out.write("segments.json", pretty(&segments_json(&scene)))?;
    out.write("patterns.json", pretty(&patterns_json(&scene)))?;
    write_sketch(&out, args, &file, &scene)?;
    out.write_record("graph", scene_record(args, &file, &opts))?;
    println!(
        "{} nodes, {} relation edges, {} distances",
        scene.graph.nodes.len(),
        scene.graph.edges.len(),
        scene.graph.distances.len()
    );
    Ok(())
}

fn scene_record(args: &SceneArgs, file: &SceneFile, opts: &FeatureOptions) -> Value {
    json!({
        "scene_file": args.scene,
        "scene": file,
        "model": args.model,
        "out": args.out,
        "plot": args.plot,
        "features": opts,
    })
}
