mod common;

use firesig::features::{detect_extrema, detect_extrema_in, Extrema};
use firesig::signature::SIGNATURE_LEN;
use firesig::synth::{base_polygon, generate_sample, rasterize_even_odd};
use firesig::{
    aspect_signature, build_features, AspectSignature, ChordMode, ExtremaConfig, PatternClass,
    ShapeMask, SynthConfig,
};
use proptest::prelude::*;
use rayon::prelude::*;

fn sig(values: Vec<f64>) -> AspectSignature {
    AspectSignature::from_values(values).unwrap()
}

fn counts_for(class: PatternClass, cfg: &SynthConfig, n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let s = generate_sample(class, i, cfg).unwrap();
            let sig = aspect_signature(&s.mask, ChordMode::Ray).unwrap();
            let f = build_features(&sig, &ExtremaConfig::default());
            (f.n_peaks, f.n_valleys)
        })
        .collect()
}

#[test]
fn clean_shapes_reproduce_reference_counts() {
    let cfg = SynthConfig { seed: 1, ..SynthConfig::default() }.clean();
    let expected = [
        (PatternClass::Circle, (0, 0)),
        (PatternClass::HalfCircle, (2, 1)),
        (PatternClass::Hourglass, (4, 3)),
        (PatternClass::Rectangle, (4, 3)),
        (PatternClass::TriangleUp, (3, 2)),
        (PatternClass::TriangleDown, (2, 3)),
        (PatternClass::VShape, (2, 3)),
        (PatternClass::UShape, (4, 3)),
    ];
    for (class, want) in expected {
        let got = counts_for(class, &cfg, 100);
        let bad = got.iter().filter(|&&c| c != want).count();
        assert_eq!(bad, 0, "{class}: {bad} of 100 differ from {want:?}, e.g. {:?}", got.iter().find(|&&c| c != want));
    }
}

#[test]
fn disk_signature_is_flat_and_featureless() {
    let m = common::disk_mask(160, (79.5, 79.5), 60.0);
    let s = aspect_signature(&m, ChordMode::Ray).unwrap();
    let e = detect_extrema(&s, &ExtremaConfig::default());
    assert!(e.peaks.is_empty() && e.valleys.is_empty());
    let f = build_features(&s, &ExtremaConfig::default());
    assert_eq!((f.n_peaks, f.n_valleys), (0, 0));
    assert_eq!(f.locations, [0.0; 10]);
}

#[test]
fn tall_rectangle_line_signature_peaks_on_diagonals() {
    // 100 wide, 200 tall: diagonals sit atan(1/2) away from the vertical
    let m = ShapeMask::from_fn(160, 260, |x, y| (30..130).contains(&x) && (30..230).contains(&y));
    let s = aspect_signature(&m, ChordMode::Line).unwrap();
    let e = detect_extrema(&s, &ExtremaConfig::default());
    let d = 0.5f64.atan().to_degrees();
    let want = [d, 180.0 - d, 180.0 + d, 360.0 - d];
    assert_eq!(e.peaks.len(), 4, "{:?}", e.peaks);
    for (p, w) in e.peaks.iter().zip(want) {
        assert!((p.angle as f64 - w).abs() <= 2.0, "peak {} vs {w}", p.angle);
    }
    assert!((3..=4).contains(&e.valleys.len()));
}

#[test]
fn clean_rectangle_counts() {
    let cfg = SynthConfig::default().clean();
    let poly = base_polygon(PatternClass::Rectangle, 0.8, &cfg);
    let m = rasterize_even_odd(&poly, cfg.canvas_width, cfg.canvas_height);
    let s = aspect_signature(&m, ChordMode::Ray).unwrap();
    let e = detect_extrema(&s, &ExtremaConfig::default());
    assert_eq!(e.peaks.len(), 4);
    assert!((3..=4).contains(&e.valleys.len()));
}

#[test]
fn three_lobed_sine() {
    let v: Vec<f64> = (0..360)
        .map(|t| 0.75 + 0.25 * (3.0 * (t as f64).to_radians()).sin())
        .collect();
    let e = detect_extrema(&sig(v), &ExtremaConfig::default());
    let angles: Vec<usize> = e.peaks.iter().map(|p| p.angle).collect();
    assert_eq!(angles.len(), 3);
    for (a, w) in angles.iter().zip([30, 150, 270]) {
        assert!(a.abs_diff(w) <= 2, "{angles:?}");
    }
    assert_eq!(e.valleys.len(), 3);
}

#[test]
fn flat_signature_gives_zero_locations() {
    let f = build_features(&sig(vec![1.0; 360]), &ExtremaConfig::default());
    assert_eq!((f.n_peaks, f.n_valleys), (0, 0));
    assert_eq!(f.locations, [0.0; 10]);
    assert_eq!(f.to_vector().len(), firesig::FEATURE_DIM);
}

#[test]
fn single_bump_location() {
    let v: Vec<f64> = (0..360)
        .map(|t| {
            let d = t as f64 - 90.0;
            0.5 + 0.5 * (-d * d / 200.0).exp()
        })
        .collect();
    let f = build_features(&sig(v), &ExtremaConfig::default());
    assert_eq!(f.n_peaks, 1);
    assert_eq!(f.locations[0], 0.25);
    assert!(f.locations[1..5].iter().all(|&l| l == 0.0));
}

#[test]
fn mean_perturbed_triangle_down_has_two_peaks_three_valleys() {
    let cfg = SynthConfig { seed: 1, ..SynthConfig::default() };
    let sigs: Vec<Vec<f64>> = (0..100)
        .into_par_iter()
        .map(|i| {
            let s = generate_sample(PatternClass::TriangleDown, i, &cfg).unwrap();
            aspect_signature(&s.mask, ChordMode::Ray).unwrap().values().to_vec()
        })
        .collect();
    let mean: Vec<f64> = (0..SIGNATURE_LEN)
        .map(|t| sigs.iter().map(|s| s[t]).sum::<f64>() / sigs.len() as f64)
        .collect();
    let peak = mean.iter().cloned().fold(0.0, f64::max);
    let mean = sig(mean.into_iter().map(|v| v / peak).collect());
    let f = build_features(&mean, &ExtremaConfig::default());
    assert_eq!((f.n_peaks, f.n_valleys), (2, 3), "{:?} {:?}", f.peaks, f.valleys);
}

fn alternates(e: &Extrema) -> bool {
    if e.peaks.is_empty() || e.valleys.is_empty() {
        return true;
    }
    let mut all: Vec<(usize, bool)> = e
        .peaks
        .iter()
        .map(|p| (p.angle, true))
        .chain(e.valleys.iter().map(|v| (v.angle, false)))
        .collect();
    all.sort();
    (0..all.len()).all(|i| all[i].1 != all[(i + 1) % all.len()].1)
}

/// Smooth random signal: a few random harmonics over a constant.
fn harmonic_signal() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((1u32..7, 0.0f64..0.2, 0.0f64..360.0), 1..5).prop_map(|terms| {
        let raw: Vec<f64> = (0..360)
            .map(|t| {
                0.6 + terms
                    .iter()
                    .map(|&(k, a, ph)| a * ((k as f64 * t as f64 + ph).to_radians()).sin())
                    .sum::<f64>()
            })
            .collect();
        let hi = raw.iter().cloned().fold(f64::MIN, f64::max);
        let lo = raw.iter().cloned().fold(f64::MAX, f64::min);
        // keep everything positive, then normalize
        raw.iter().map(|v| (v - lo + 0.05) / (hi - lo + 0.05)).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn extrema_alternate(v in harmonic_signal()) {
        let e = detect_extrema(&sig(v), &ExtremaConfig::default());
        prop_assert!(alternates(&e));
    }

    #[test]
    fn peaks_dominate_adjacent_valleys(v in harmonic_signal()) {
        let e = detect_extrema(&sig(v), &ExtremaConfig::default());
        if !e.peaks.is_empty() && !e.valleys.is_empty() {
            let mut all: Vec<(usize, bool, f64)> = e.peaks.iter().map(|p| (p.angle, true, p.value))
                .chain(e.valleys.iter().map(|v| (v.angle, false, v.value))).collect();
            all.sort_by_key(|a| a.0);
            for i in 0..all.len() {
                let (a, b) = (all[i], all[(i + 1) % all.len()]);
                let (p, q) = if a.1 { (a.2, b.2) } else { (b.2, a.2) };
                prop_assert!(p >= q);
            }
        }
    }

    #[test]
    fn circular_shift_moves_every_extremum(v in harmonic_signal(), delta in 0usize..360) {
        let cfg = ExtremaConfig::default();
        let a = detect_extrema_in(&v, &cfg);
        let shifted: Vec<f64> = (0..360).map(|t| v[(t + 360 - delta) % 360]).collect();
        let b = detect_extrema_in(&shifted, &cfg);
        let moved = |xs: &[firesig::features::Extremum]| {
            let mut s: Vec<usize> = xs.iter().map(|e| (e.angle + delta) % 360).collect();
            s.sort();
            s
        };
        let angles = |xs: &[firesig::features::Extremum]| xs.iter().map(|e| e.angle).collect::<Vec<_>>();
        prop_assert_eq!(moved(&a.peaks), angles(&b.peaks));
        prop_assert_eq!(moved(&a.valleys), angles(&b.valleys));
    }

    #[test]
    fn constant_offset_does_not_move_extrema(v in harmonic_signal(), c in 0.0f64..0.5) {
        let cfg = ExtremaConfig::default();
        let a = detect_extrema_in(&v, &cfg);
        let lifted: Vec<f64> = v.iter().map(|x| x + c).collect();
        let b = detect_extrema_in(&lifted, &cfg);
        let angles = |xs: &[firesig::features::Extremum]| xs.iter().map(|e| e.angle).collect::<Vec<_>>();
        prop_assert_eq!(angles(&a.peaks), angles(&b.peaks));
        prop_assert_eq!(angles(&a.valleys), angles(&b.valleys));
    }

    #[test]
    fn feature_layout_is_consistent(v in harmonic_signal()) {
        let f = build_features(&sig(v), &ExtremaConfig::default());
        prop_assert_eq!(f.n_peaks, f.peaks.len());
        prop_assert_eq!(f.n_valleys, f.valleys.len());
        prop_assert!(f.locations.iter().all(|&l| (0.0..1.0).contains(&l)));
        let x = f.to_vector();
        prop_assert_eq!(x.len(), firesig::FEATURE_DIM);
        prop_assert_eq!(x[360], f.n_peaks as f64);
        prop_assert_eq!(&x[362..], &f.locations[..]);
    }
}
