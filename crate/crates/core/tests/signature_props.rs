mod common;

use common::*;
use firesig::signature::{
    aspect_signature, chord_length, compute_centroid, AngleConvention, ChordMode, ChordSampler,
};
use firesig::synth::{generate_sample, rasterize_even_odd, PatternClass, SynthConfig};
use firesig::ShapeMask;
use proptest::prelude::*;

fn class() -> impl Strategy<Value = PatternClass> {
    (0..8usize).prop_map(|i| PatternClass::ALL[i])
}

fn synthetic(class: PatternClass, index: usize, seed: u64) -> ShapeMask {
    let cfg = SynthConfig {
        seed,
        ..SynthConfig::default()
    };
    generate_sample(class, index, &cfg).unwrap().mask
}

fn mode() -> impl Strategy<Value = ChordMode> {
    prop_oneof![Just(ChordMode::Ray), Just(ChordMode::Line)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn signature_is_normalized(c in class(), i in 0..1000usize, seed in 0..4u64, m in mode()) {
        let sig = aspect_signature(&synthetic(c, i, seed), m).unwrap();
        let v = sig.values();
        prop_assert_eq!(v.len(), 360);
        prop_assert_eq!(v.iter().cloned().fold(f64::MIN, f64::max), 1.0);
        prop_assert!(v.iter().all(|&x| (0.0..=1.0).contains(&x)));
        prop_assert!(sig.max_chord > 0.0);
    }

    #[test]
    fn line_signatures_have_period_180(c in class(), i in 0..1000usize) {
        let sig = aspect_signature(&synthetic(c, i, 0), ChordMode::Line).unwrap();
        let v = sig.values();
        for t in 0..180 {
            prop_assert!((v[t] - v[t + 180]).abs() < 0.02, "theta {}", t);
        }
    }
}

/// Ellipses large enough that a half-resolution copy still resolves 2% of
/// the radius.
fn ellipse() -> impl Strategy<Value = ShapeMask> {
    (90.0..115.0f64, 0.5..1.0f64, 0.0..180.0f64, 0.0..1.0f64, 0.0..1.0f64).prop_map(
        |(a, ratio, phi, ox, oy)| ellipse_mask(256, (127.0 + ox, 127.0 + oy), a, a * ratio, phi),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn scaling_barely_moves_the_signature(m in ellipse(), up in any::<bool>(), line in any::<bool>()) {
        let mode = if line { ChordMode::Line } else { ChordMode::Ray };
        let k = if up { 2.0 } else { 0.5 };
        let a = aspect_signature(&m, mode).unwrap();
        let b = aspect_signature(&scale_mask(&m, k), mode).unwrap();
        let drift = max_circular_shift_error(a.values(), b.values(), 0);
        prop_assert!(drift < 0.02, "drift {}", drift);
    }

    #[test]
    fn rotation_shifts_the_signature(
        m in ellipse(),
        d in prop_oneof![Just(30usize), Just(90), Just(180)],
        line in any::<bool>(),
    ) {
        let mode = if line { ChordMode::Line } else { ChordMode::Ray };
        let centroid = compute_centroid(&m).unwrap();
        let a = aspect_signature(&m, mode).unwrap();
        let b = aspect_signature(&rotate_mask(&m, d as f64, centroid), mode).unwrap();
        let err = max_circular_shift_error(a.values(), b.values(), d);
        prop_assert!(err < 0.05, "delta {} err {}", d, err);
    }
}

#[test]
fn centrally_symmetric_ray_signature_has_period_180() {
    let rect = [[40.5, 20.5], [140.5, 20.5], [140.5, 220.5], [40.5, 220.5]];
    let sig = aspect_signature(&rasterize_even_odd(&rect, 200, 240), ChordMode::Ray).unwrap();
    let v = sig.values();
    assert!((0..180).all(|t| (v[t] - v[t + 180]).abs() < 0.02));

    let tri = [[40.0, 200.0], [160.0, 200.0], [100.0, 30.0]];
    let sig = aspect_signature(&rasterize_even_odd(&tri, 200, 240), ChordMode::Ray).unwrap();
    let v = sig.values();
    assert!((0..180).any(|t| (v[t] - v[t + 180]).abs() > 0.1));
}

#[test]
fn square_corner_chord() {
    let full = ShapeMask::raw(200, 200, vec![true; 200 * 200]).unwrap();
    let c = compute_centroid(&full).unwrap();
    let want = 200.0 * 2f64.sqrt() / 2.0;
    for theta in [45.0, 135.0, 225.0, 315.0] {
        let got = chord_length(&full, c, theta, ChordMode::Ray);
        assert!((got - want).abs() <= 0.01 * want, "theta {theta}: {got}");
    }
}

fn regular_shapes(size: f64, canvas: usize) -> Vec<(&'static str, Vec<[f64; 2]>)> {
    let m = canvas as f64 / 2.0;
    let h = size / 2.0;
    let rect = vec![
        [m - h / 2.0, m - h],
        [m + h / 2.0, m - h],
        [m + h / 2.0, m + h],
        [m - h / 2.0, m + h],
    ];
    let tri = vec![[m - h * 0.8, m + h], [m + h * 0.8, m + h], [m + 3.0, m - h]];
    vec![("rectangle", rect), ("triangle", tri)]
}

#[test]
fn marched_chords_match_analytic_intersections() {
    let canvas = 512;
    for frac in [0.4, 0.6, 0.8] {
        let size = frac * canvas as f64;
        for (name, poly) in regular_shapes(size, canvas) {
            let mask = rasterize_even_odd(&poly, canvas, canvas);
            let c = compute_centroid(&mask).unwrap();
            let sampler = ChordSampler::new(&mask, AngleConvention::default()).unwrap();
            for (mode, oracle) in [
                (ChordMode::Ray, ray_polygon as fn(&[[f64; 2]], (f64, f64), f64) -> f64),
                (ChordMode::Line, line_polygon),
            ] {
                let exact: Vec<f64> = (0..360).map(|t| oracle(&poly, c, t as f64)).collect();
                let max = exact.iter().cloned().fold(0.0, f64::max);
                for (t, e) in exact.iter().enumerate() {
                    let got = sampler.chord(c, t as f64, mode);
                    assert!(
                        (got - e).abs() <= 0.01 * max,
                        "{name} {frac} {mode} theta {t}: {got} vs {e}"
                    );
                }
            }
        }
        let center = (255.5, 255.5);
        let r = size / 2.0;
        let disk = disk_mask(canvas, center, r);
        let c = compute_centroid(&disk).unwrap();
        let sampler = ChordSampler::new(&disk, AngleConvention::default()).unwrap();
        for t in 0..360 {
            let e = ray_circle(center, r, c, t as f64);
            let got = sampler.chord(c, t as f64, ChordMode::Ray);
            assert!((got - e).abs() <= 0.01 * r, "disk {frac} theta {t}: {got} vs {e}");
        }
    }
}
