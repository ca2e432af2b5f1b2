#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use supframe::superposition::{superposition_element, OrderedPartition, SelectionFunction};
use supframe::{FrameOperator, Signal, Window};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rect2() -> Window<f64> {
    Window::new(vec![1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap()
}

pub fn random_signal(len: usize, r: &mut ChaCha8Rng) -> Signal<f64> {
    Signal::new((0..len).map(|_| Complex::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect())
}

/// Positive samples on `start..start + width` (cyclic), zero elsewhere.
pub fn random_window(len: usize, width: usize, r: &mut ChaCha8Rng) -> Window<f64> {
    let start = r.gen_range(0..len);
    let mut s = vec![0.0; len];
    for j in 0..width {
        s[(start + j) % len] = r.gen_range(0.05..1.0);
    }
    Window::new(s).unwrap()
}

/// Uniformly random cyclic partition of `ℤ_n`.
pub fn random_partition(n: usize, r: &mut ChaCha8Rng) -> OrderedPartition {
    let mut cuts: Vec<usize> = (0..n).filter(|_| r.gen_bool(0.4)).collect();
    if cuts.is_empty() {
        cuts.push(r.gen_range(0..n));
    }
    OrderedPartition::from_cuts(n, &cuts).unwrap()
}

/// Random partition into aligned power-of-two blocks.
pub fn random_dyadic_partition(n: usize, r: &mut ChaCha8Rng) -> OrderedPartition {
    fn split(start: usize, width: usize, r: &mut ChaCha8Rng, cuts: &mut Vec<usize>) {
        if width > 1 && r.gen_bool(0.6) {
            split(start, width / 2, r, cuts);
            split(start + width / 2, width / 2, r, cuts);
        } else {
            cuts.push(start);
        }
    }
    let mut cuts = Vec::new();
    split(0, n, r, &mut cuts);
    OrderedPartition::from_cuts(n, &cuts).unwrap()
}

/// Every cyclic partition of `ℤ_n`: each nonempty set of cut points.
pub fn all_partitions(n: usize) -> Vec<OrderedPartition> {
    (1u32..(1 << n))
        .map(|mask| {
            let cuts: Vec<usize> = (0..n).filter(|&k| mask & (1 << k) != 0).collect();
            OrderedPartition::from_cuts(n, &cuts).unwrap()
        })
        .collect()
}

/// `Σ φ φ^H` as a complex matrix.
pub fn outer_sum(elements: &[Signal<f64>]) -> DMatrix<Complex<f64>> {
    let len = elements[0].len();
    let mut m = DMatrix::from_element(len, len, Complex::new(0.0, 0.0));
    for e in elements {
        let s = e.samples();
        for t in 0..len {
            if s[t].norm() == 0.0 {
                continue;
            }
            for u in 0..len {
                m[(t, u)] += s[t] * s[u].conj();
            }
        }
    }
    m
}

pub fn selection_elements(sel: &SelectionFunction<f64>) -> Vec<Signal<f64>> {
    sel.iter()
        .flat_map(|(p, m, _, _)| (0..m).map(move |k| (p, k)))
        .map(|(p, k)| superposition_element(sel, p, k).unwrap())
        .collect()
}

pub fn dense_matrix(s: &FrameOperator<f64>) -> DMatrix<f64> {
    let dim = s.dim();
    DMatrix::from_fn(dim, dim, |i, j| s.entry(i, j))
}

pub fn min_eigenvalue(m: DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

pub fn inner(x: &Signal<f64>, y: &Signal<f64>) -> Complex<f64> {
    x.samples().iter().zip(y.samples()).map(|(a, b)| a * b.conj()).sum()
}

/// Symmetric (non-periodic) Hamming of `width` samples at the origin.
pub fn symmetric_hamming(len: usize, width: usize) -> Window<f64> {
    let mut s = vec![0.0; len];
    for (j, v) in s.iter_mut().take(width).enumerate() {
        *v = 0.54 - 0.46 * (std::f64::consts::TAU * j as f64 / (width - 1) as f64).cos();
    }
    Window::new(s).unwrap()
}
