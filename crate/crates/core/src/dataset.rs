//! Dataset directories on disk: manifest parsing, feature extraction and the
//! stratified train/test split.

use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::features::{build_features, feature_names, ExtremaConfig, PatternFeatures};
use crate::forest::LabeledSet;
use crate::mask::{read_mask, MaskError, ShapeMask};
use crate::signature::{aspect_signature, ChordMode, SignatureError};
use crate::synth::{ClassScheme, PatternClass};

pub const MANIFEST_FILE: &str = "manifest.csv";
const MANIFEST_HEADER: &str = "filename,class,seed_offset,scale,rotation";

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("manifest line {line}: {msg}")]
    Manifest { line: usize, msg: String },
    #[error("{path}: {source}")]
    Mask {
        path: PathBuf,
        #[source]
        source: MaskError,
    },
    #[error("{path}: {source}")]
    Signature {
        path: PathBuf,
        #[source]
        source: SignatureError,
    },
    #[error("{0}: {1}")]
    Io(PathBuf, #[source] std::io::Error),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManifestEntry {
    pub filename: String,
    pub class: PatternClass,
    pub seed_offset: u64,
    pub scale: f64,
    pub rotation: f64,
}

pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>, DatasetError> {
    let err = |line: usize, msg: String| DatasetError::Manifest { line, msg };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == MANIFEST_HEADER => {}
        _ => return Err(err(1, format!("expected header {MANIFEST_HEADER:?}"))),
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 5 {
            return Err(err(i + 1, format!("expected 5 fields, found {}", f.len())));
        }
        let num = |s: &str, what: &str| {
            s.parse::<f64>()
                .map_err(|_| err(i + 1, format!("bad {what} {s:?}")))
        };
        out.push(ManifestEntry {
            filename: f[0].to_string(),
            class: f[1].parse().map_err(|m| err(i + 1, m))?,
            seed_offset: f[2]
                .parse()
                .map_err(|_| err(i + 1, format!("bad seed_offset {:?}", f[2])))?,
            scale: num(f[3], "scale")?,
            rotation: num(f[4], "rotation")?,
        });
    }
    Ok(out)
}

pub fn read_manifest(dir: &Path) -> Result<Vec<ManifestEntry>, DatasetError> {
    let path = dir.join(MANIFEST_FILE);
    let text = std::fs::read_to_string(&path).map_err(|e| DatasetError::Io(path, e))?;
    parse_manifest(&text)
}

#[derive(Clone, Debug, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FeatureOptions {
    pub mode: ChordMode,
    pub extrema: ExtremaConfig,
}

pub fn mask_features(mask: &ShapeMask, opts: &FeatureOptions) -> Result<PatternFeatures, SignatureError> {
    let sig = aspect_signature(mask, opts.mode)?;
    Ok(build_features(&sig, &opts.extrema))
}

/// Reads every mask listed in `entries` and returns the labeled feature rows,
/// keyed by filename.
pub fn load_features(
    dir: &Path,
    entries: &[ManifestEntry],
    scheme: ClassScheme,
    opts: &FeatureOptions,
) -> Result<LabeledSet, DatasetError> {
    let rows: Vec<(String, usize, Vec<f64>)> = entries
        .par_iter()
        .map(|e| {
            let path = dir.join(&e.filename);
            let mask = read_mask(&path).map_err(|source| DatasetError::Mask {
                path: path.clone(),
                source,
            })?;
            let feats = mask_features(&mask, opts)
                .map_err(|source| DatasetError::Signature { path, source })?;
            Ok((e.filename.clone(), scheme.label(e.class), feats.to_vector()))
        })
        .collect::<Result<_, DatasetError>>()?;
    let mut set = LabeledSet::new(scheme.class_names());
    for (k, l, f) in rows {
        set.push(k, l, f);
    }
    Ok(set)
}

/// Splits each class independently: rows are put in key order, shuffled with
/// a per-class stream of `seed`, and the first `round(train_frac * n)` go to
/// training (at least one on each side when the class has two or more rows).
pub fn stratified_split(set: &LabeledSet, train_frac: f64, seed: u64) -> (LabeledSet, LabeledSet) {
    let mut train = LabeledSet::new(set.class_names.clone());
    let mut test = LabeledSet::new(set.class_names.clone());
    for label in 0..set.n_classes() {
        let mut rows: Vec<_> = set.rows.iter().filter(|r| r.label == label).collect();
        rows.sort_by(|a, b| a.key.cmp(&b.key));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(label as u64);
        rows.shuffle(&mut rng);
        let n = rows.len();
        let mut k = (train_frac * n as f64).round() as usize;
        if n >= 2 {
            k = k.clamp(1, n - 1);
        } else {
            k = k.min(n);
        }
        for (i, r) in rows.into_iter().enumerate() {
            let dst = if i < k { &mut train } else { &mut test };
            dst.rows.push(r.clone());
        }
    }
    train.rows.sort_by(|a, b| a.key.cmp(&b.key));
    test.rows.sort_by(|a, b| a.key.cmp(&b.key));
    (train, test)
}

/// `key,label,<feature columns>` with one row per sample.
pub fn features_csv(set: &LabeledSet) -> String {
    let mut out = String::from("key,label");
    for n in feature_names() {
        out.push(',');
        out.push_str(&n);
    }
    out.push('\n');
    for r in &set.rows {
        out.push_str(&r.key);
        out.push(',');
        out.push_str(&set.class_names[r.label]);
        for v in &r.features {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}
