use firesig::synth::{
    base_polygon, generate_dataset, generate_sample, manifest_csv, perturb_and_rasterize,
    rasterize_even_odd,
};
use firesig::{PatternClass, ShapeMask, SynthConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn boundary(m: &ShapeMask) -> Vec<(f64, f64)> {
    m.foreground()
        .filter(|&(x, y)| {
            let (x, y) = (x as i64, y as i64);
            [(1, 0), (-1, 0), (0, 1), (0, -1)]
                .iter()
                .any(|&(dx, dy)| !m.get_signed(x + dx, y + dy))
        })
        .map(|(x, y)| (x as f64, y as f64))
        .collect()
}

/// Directed Hausdorff distance from `a` to `b` over foreground pixels.
fn directed(a: &ShapeMask, b: &ShapeMask) -> f64 {
    let edge = boundary(b);
    a.foreground()
        .filter(|&(x, y)| !b.get(x, y))
        .map(|(x, y)| {
            edge.iter()
                .map(|&(u, v)| (u - x as f64).hypot(v - y as f64))
                .fold(f64::MAX, f64::min)
        })
        .fold(0.0, f64::max)
}

fn hausdorff(a: &ShapeMask, b: &ShapeMask) -> f64 {
    directed(a, b).max(directed(b, a))
}

#[test]
fn perturbation_stays_within_bound() {
    let cfg = SynthConfig::default();
    let canvas = cfg.canvas_width as f64;
    let bound =
        (cfg.noise_amplitude + cfg.distortion_amplitude + 3.0 * cfg.smoothing_sigma / canvas) * canvas;
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let class = PatternClass::ALL[i % 8];
        let scale = rng.random_range(cfg.scale_range.0..=cfg.scale_range.1);
        let poly = base_polygon(class, scale, &cfg);
        let base = rasterize_even_odd(&poly, cfg.canvas_width, cfg.canvas_height);
        let out = perturb_and_rasterize(&poly, &cfg, &mut rng).unwrap();
        let h = hausdorff(&base, &out.mask);
        assert!(h <= bound, "{class} sample {i}: {h:.2} > {bound:.2}");
        worst = worst.max(h);
    }
    assert!(worst > 0.0);
}

#[test]
fn dataset_bytes_depend_only_on_config() {
    let cfg = SynthConfig {
        n_per_class: 3,
        seed: 42,
        ..SynthConfig::default()
    };
    let a = generate_dataset(&cfg).unwrap();
    let b = generate_dataset(&cfg).unwrap();
    assert_eq!(a.len(), 24);
    assert_eq!(manifest_csv(&a), manifest_csv(&b));
    assert_eq!(manifest_csv(&a).lines().count(), 25);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.mask.to_pgm(), y.mask.to_pgm());
    }

    let other = generate_dataset(&SynthConfig { seed: 43, ..cfg.clone() }).unwrap();
    assert!(a.iter().zip(&other).any(|(x, y)| x.mask != y.mask));
}

#[test]
fn samples_do_not_depend_on_dataset_size() {
    let small = SynthConfig {
        n_per_class: 2,
        seed: 9,
        ..SynthConfig::default()
    };
    let big = SynthConfig {
        n_per_class: 5,
        ..small.clone()
    };
    let a = generate_dataset(&small).unwrap();
    let b = generate_dataset(&big).unwrap();
    for s in &a {
        let t = b
            .iter()
            .find(|t| t.class == s.class && t.index == s.index)
            .unwrap();
        assert_eq!(s.mask, t.mask);
        assert_eq!(s.seed_offset, t.seed_offset);
        let alone = generate_sample(s.class, s.index, &small).unwrap();
        assert_eq!(alone.mask, s.mask);
    }
}

#[test]
fn manifest_columns() {
    let cfg = SynthConfig {
        n_per_class: 1,
        ..SynthConfig::default()
    };
    let csv = manifest_csv(&generate_dataset(&cfg).unwrap());
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("filename,class,seed_offset,scale,rotation"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "circle_0000.pgm");
    assert_eq!(first[1], "circle");
    let rot: f64 = first[4].parse().unwrap();
    assert!(rot.abs() <= cfg.rotation_jitter);
    let scale: f64 = first[3].parse().unwrap();
    assert!((cfg.scale_range.0..=cfg.scale_range.1).contains(&scale));
}
