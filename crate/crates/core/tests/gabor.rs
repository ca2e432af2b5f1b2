mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use supframe::dft::FourierEngine;
use supframe::gabor::{frame_bounds, frame_operator, frame_operator_dense, refine_lattice, stft_analyze};
use supframe::signal::window_length;
use supframe::{FrameOperator, GaborSystem, Signal, Window};

fn system(len: usize, width: usize, a: usize, m: usize, seed: u64) -> GaborSystem<f64> {
    let mut r = rng(seed);
    GaborSystem::new(random_window(len, width, &mut r), a, m).unwrap()
}

fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

#[test]
fn stft_matches_inner_products() {
    let mut r = rng(11);
    for case in 0..40 {
        let len = r.gen_range(4..=40);
        let ds = divisors(len);
        let a = ds[r.gen_range(0..ds.len())];
        let width = r.gen_range(1..=len);
        let m = r.gen_range(1..=len + 5);
        let g = system(len, width, a, m, case);
        let x = random_signal(len, &mut r);
        let stft = stft_analyze(&x, &g, &FourierEngine::new()).unwrap();
        for n in 0..g.translates() {
            for k in 0..m {
                let direct = inner(&x, &g.element(k, n));
                assert!((stft.get(k, n) - direct).norm() <= 1e-12 * (1.0 + direct.norm()), "case {case}");
            }
        }
    }
}

#[test]
fn walnut_equals_outer_product_sum() {
    let mut r = rng(12);
    for case in 0..60 {
        let len = r.gen_range(2..=48);
        let ds = divisors(len);
        let a = ds[r.gen_range(0..ds.len())];
        let g = system(len, r.gen_range(1..=len), a, r.gen_range(1..=len + 3), 100 + case);
        let elements: Vec<Signal<f64>> =
            (0..g.translates()).flat_map(|n| (0..g.modulations()).map(move |k| (k, n))).map(|(k, n)| g.element(k, n)).collect();
        let brute = outer_sum(&elements);
        let s = frame_operator_dense(&g);
        for t in 0..len {
            for u in 0..len {
                assert!((brute[(t, u)].re - s.entry(t, u)).abs() <= 1e-10, "case {case}");
                assert!(brute[(t, u)].im.abs() <= 1e-10);
            }
        }
        let fast = frame_operator(&g);
        for t in 0..len {
            for u in 0..len {
                assert!((fast.entry(t, u) - s.entry(t, u)).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn frame_operator_rect2_examples_match_brute_force() {
    let g = GaborSystem::new(rect2(), 2, 8).unwrap();
    let elements: Vec<_> = (0..4).flat_map(|n| (0..8).map(move |k| (k, n))).map(|(k, n)| g.element(k, n)).collect();
    assert_eq!(elements.len(), 32);
    let brute = outer_sum(&elements);
    for t in 0..8 {
        assert!((brute[(t, t)].re - 8.0).abs() < 1e-12);
    }
    let mut w4 = vec![0.0; 8];
    w4[..4].copy_from_slice(&[1.0; 4]);
    let g = GaborSystem::new(Window::new(w4).unwrap(), 2, 2).unwrap();
    let s = frame_operator(&g);
    assert!(matches!(s, FrameOperator::Dense { .. }));
    for t in 0..8 {
        for u in 0..8 {
            let d = (t as isize - u as isize).rem_euclid(8);
            if d % 2 == 1 {
                assert_eq!(s.entry(t, u), 0.0);
            }
        }
        assert!(s.entry(t, (t + 2) % 8) > 0.0);
    }
}

#[test]
fn frame_expansion_sandwich() {
    let mut r = rng(13);
    let w = supframe::WindowKind::Hann.build::<f64>(48, 16).unwrap();
    for (a, m) in [(4usize, 8usize), (8, 16), (4, 12), (6, 20)] {
        let g = GaborSystem::new(w.clone(), a, m).unwrap();
        let bounds = frame_bounds(&frame_operator(&g)).unwrap();
        let engine = FourierEngine::new();
        for _ in 0..200 {
            let x = random_signal(48, &mut r);
            let energy: f64 = stft_analyze(&x, &g, &engine).unwrap().columns.iter().flatten().map(|c| c.norm_sqr()).sum();
            let e = x.energy();
            assert!(energy - bounds.lower * e >= -1e-9 * bounds.lower * e);
            assert!(bounds.upper * e - energy >= -1e-9 * bounds.upper * e);
        }
    }
}

#[test]
fn lemma1_scaling_of_diagonal() {
    let mut r = rng(14);
    for case in 0..40 {
        let len = 2 * r.gen_range(2..=24);
        let width = r.gen_range(1..=len / 2);
        let g = system(len, width, 2, r.gen_range(width..=len), 200 + case);
        let base = frame_operator(&g).diagonal();
        let m2 = r.gen_range(width..=2 * len);
        let refined = refine_lattice(&g, m2).unwrap();
        let s2 = frame_operator(&refined);
        assert!(matches!(s2, FrameOperator::Diagonal(_)));
        for (v2, v) in s2.diagonal().iter().zip(&base) {
            let expect = m2 as f64 / g.modulations() as f64 * v;
            assert!((v2 - expect).abs() <= 1e-12 * expect.abs().max(1e-300));
        }
    }
}

#[test]
fn covering_at_seventy_five_percent_overlap() {
    let w = supframe::WindowKind::Hamming.build::<f64>(512, 64).unwrap();
    assert!(supframe::gabor::covering_condition(&w, 16));
}

fn eq7_length(samples: &[f64]) -> usize {
    let len = samples.len();
    (0..len)
        .map(|s| (0..len).filter(|&t| samples[t] != 0.0).map(|t| (t + len - s) % len).max().unwrap() + 1)
        .min()
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn window_length_matches_explicit_minimization(
        bits in proptest::collection::vec(0u8..4, 1..40)
    ) {
        let samples: Vec<f64> = bits.iter().map(|&b| if b == 0 { 0.0 } else { b as f64 }).collect();
        prop_assume!(samples.iter().any(|&v| v != 0.0));
        let info = window_length(&samples).unwrap();
        prop_assert_eq!(info.length, eq7_length(&samples));
        let len = samples.len();
        prop_assert!(info.support.iter().all(|&t| (t + len - info.start) % len < info.length));
    }

    #[test]
    fn diagonal_when_modulations_cover_window(len in 4usize..40, seed in 0u64..1000) {
        let mut r = rng(seed);
        let ds = divisors(len);
        let a = ds[r.gen_range(0..ds.len())];
        let width = r.gen_range(1..=len);
        let m = r.gen_range(width..=len + 4);
        let g = system(len, width, a, m, seed);
        let dense = frame_operator_dense(&g);
        let max_diag = dense.diagonal().iter().cloned().fold(0.0, f64::max);
        prop_assert!(dense.max_off_diagonal() <= 1e-12 * max_diag);
    }
}
