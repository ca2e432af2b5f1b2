//! Discrete Fourier transforms of arbitrary length.
//!
//! Conventions: the forward transform is `X[k] = Σ_t x[t]·e^{−2πikt/M}` and the
//! inverse carries the `1/M` factor, so `inverse(forward(x)) = x`.
//!
//! A [`FourierEngine`] either dispatches to `rustfft` (any length, including
//! primes) or, in counting mode, to a radix-2 transform that tallies every
//! complex multiplication in an [`OpCounter`]. Counting mode exists for the
//! operation-count benchmarks; non-power-of-two lengths fall back to a direct
//! `O(M²)` sum there so that the tally stays a measurement.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::scalar::Real;
use crate::signal::Signal;

/// Thread-safe tally of complex multiplications.
#[derive(Debug, Default)]
pub struct OpCounter {
    multiplies: AtomicU64,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&self, n: u64) {
        self.multiplies.fetch_add(n, Ordering::Relaxed);
    }

    pub fn get(&self) -> u64 {
        self.multiplies.load(Ordering::Relaxed)
    }

    pub fn reset(&self) -> u64 {
        self.multiplies.swap(0, Ordering::Relaxed)
    }
}

#[derive(Clone, Copy)]
enum Direction {
    Forward,
    Inverse,
}

enum Plan<T: Real> {
    Fast { forward: Arc<dyn Fft<T>>, inverse: Arc<dyn Fft<T>> },
    Radix2 { twiddles: Arc<Vec<Complex<T>>> },
    Direct,
}

impl<T: Real> Clone for Plan<T> {
    fn clone(&self) -> Self {
        match self {
            Plan::Fast { forward, inverse } => Plan::Fast { forward: forward.clone(), inverse: inverse.clone() },
            Plan::Radix2 { twiddles } => Plan::Radix2 { twiddles: twiddles.clone() },
            Plan::Direct => Plan::Direct,
        }
    }
}

/// Cached transform plans, shareable across threads.
pub struct FourierEngine<T: Real> {
    planner: Mutex<FftPlanner<T>>,
    plans: Mutex<HashMap<usize, Plan<T>>>,
    counter: Option<Arc<OpCounter>>,
}

impl<T: Real> Default for FourierEngine<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> FourierEngine<T> {
    pub fn new() -> Self {
        Self { planner: Mutex::new(FftPlanner::new()), plans: Mutex::new(HashMap::new()), counter: None }
    }

    /// Engine that routes every transform and pointwise product through `counter`.
    pub fn counting(counter: Arc<OpCounter>) -> Self {
        Self { counter: Some(counter), ..Self::new() }
    }

    pub fn counter(&self) -> Option<&OpCounter> {
        self.counter.as_deref()
    }

    /// Record `n` complex multiplications performed outside the transforms.
    pub fn tally(&self, n: usize) {
        if let Some(c) = &self.counter {
            c.add(n as u64);
        }
    }

    fn plan(&self, len: usize) -> Plan<T> {
        let mut plans = self.plans.lock().expect("plan cache poisoned");
        plans
            .entry(len)
            .or_insert_with(|| match self.counter {
                None => {
                    let mut planner = self.planner.lock().expect("planner poisoned");
                    Plan::Fast { forward: planner.plan_fft_forward(len), inverse: planner.plan_fft_inverse(len) }
                }
                Some(_) if len.is_power_of_two() => Plan::Radix2 { twiddles: Arc::new(radix2_twiddles(len)) },
                Some(_) => Plan::Direct,
            })
            .clone()
    }

    fn run(&self, buf: &mut [Complex<T>], dir: Direction) {
        let len = buf.len();
        if len <= 1 {
            return;
        }
        match self.plan(len) {
            Plan::Fast { forward, inverse } => match dir {
                Direction::Forward => forward.process(buf),
                Direction::Inverse => inverse.process(buf),
            },
            Plan::Radix2 { twiddles } => {
                let n = radix2_in_place(buf, &twiddles, dir);
                self.tally(n as usize);
            }
            Plan::Direct => {
                direct_dft(buf, dir);
                self.tally(len * len);
            }
        }
    }

    /// In-place forward transform.
    pub fn forward(&self, buf: &mut [Complex<T>]) {
        self.run(buf, Direction::Forward);
    }

    /// In-place inverse transform including the `1/M` factor.
    pub fn inverse(&self, buf: &mut [Complex<T>]) {
        self.run(buf, Direction::Inverse);
        let scale = T::one() / T::of_usize(buf.len());
        for c in buf.iter_mut() {
            *c = *c * scale;
        }
        self.tally(buf.len());
    }

    /// In-place inverse transform without the `1/M` factor.
    pub fn inverse_unscaled(&self, buf: &mut [Complex<T>]) {
        self.run(buf, Direction::Inverse);
    }
}

fn radix2_twiddles<T: Real>(len: usize) -> Vec<Complex<T>> {
    (0..len / 2)
        .map(|k| {
            let phase = -std::f64::consts::TAU * k as f64 / len as f64;
            Complex::new(T::of(phase.cos()), T::of(phase.sin()))
        })
        .collect()
}

/// Iterative decimation-in-time FFT; returns the number of twiddle products.
fn radix2_in_place<T: Real>(buf: &mut [Complex<T>], twiddles: &[Complex<T>], dir: Direction) -> u64 {
    let n = buf.len();
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    let mut products = 0u64;
    let mut size = 2;
    while size <= n {
        let half = size / 2;
        let stride = n / size;
        for chunk in buf.chunks_mut(size) {
            for k in 0..half {
                let mut tw = twiddles[k * stride];
                if let Direction::Inverse = dir {
                    tw = tw.conj();
                }
                let odd = chunk[k + half] * tw;
                products += 1;
                let even = chunk[k];
                chunk[k] = even + odd;
                chunk[k + half] = even - odd;
            }
        }
        size *= 2;
    }
    products
}

fn direct_dft<T: Real>(buf: &mut [Complex<T>], dir: Direction) {
    let n = buf.len();
    let sign = match dir {
        Direction::Forward => -1.0,
        Direction::Inverse => 1.0,
    };
    let input = buf.to_vec();
    for (k, out) in buf.iter_mut().enumerate() {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (t, &x) in input.iter().enumerate() {
            let idx = (k * t) % n;
            let phase = sign * std::f64::consts::TAU * idx as f64 / n as f64;
            acc = acc + x * Complex::new(T::of(phase.cos()), T::of(phase.sin()));
        }
        *out = acc;
    }
}

/// Forward DFT of a whole signal.
pub fn dft<T: Real>(x: &Signal<T>) -> Signal<T> {
    let mut buf = x.samples().to_vec();
    FourierEngine::new().forward(&mut buf);
    Signal::new(buf)
}

/// Inverse DFT of a whole signal, `1/L` included.
pub fn inverse_dft<T: Real>(x: &Signal<T>) -> Signal<T> {
    let mut buf = x.samples().to_vec();
    FourierEngine::new().inverse(&mut buf);
    Signal::new(buf)
}
