//! Internal FFT plumbing: a shared read-only plan cache and separable
//! d-dimensional transforms over row-major data.
//!
//! Plans are created once per (length, direction) and shared behind `Arc`;
//! `rustfft` plans are safe to run concurrently, so the mutex only protects
//! the cache map itself.

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

type PlanCache = Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>;

static PLANS: OnceLock<PlanCache> = OnceLock::new();

/// Fetch (or build and cache) a plan of the given length and direction.
pub(crate) fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (len, matches!(direction, FftDirection::Forward));
    let mut map = cache.lock().expect("fft plan cache poisoned");
    map.entry(key)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            planner.plan_fft(len, direction)
        })
        .clone()
}

/// Unnormalized separable DFT over every axis of a row-major hypercube with
/// `shape.len()` axes of common length `shape[i]`.
///
/// Forward computes `Σ_j v[j] e^{-2πi jk/n}` per axis; inverse uses `e^{+2πi}`
/// and is *not* divided by `n`.
pub(crate) fn dft_nd(values: &mut [Complex64], shape: &[usize], direction: FftDirection) {
    let total: usize = shape.iter().product();
    assert_eq!(values.len(), total, "value count must match shape");
    let dim = shape.len();
    for axis in 0..dim {
        let n = shape[axis];
        let fft = plan(n, direction);
        // stride between consecutive elements along `axis`
        let stride: usize = shape[axis + 1..].iter().product();
        let lines = total / n;
        if stride == 1 {
            // contiguous: transform rows in place
            for line in 0..lines {
                let start = line * n;
                fft.process(&mut values[start..start + n]);
            }
        } else {
            let mut scratch = vec![Complex64::default(); n];
            for line in 0..lines {
                // decompose `line` into (outer, inner) around the axis
                let outer = line / stride;
                let inner = line % stride;
                let base = outer * n * stride + inner;
                for i in 0..n {
                    scratch[i] = values[base + i * stride];
                }
                fft.process(&mut scratch);
                for i in 0..n {
                    values[base + i * stride] = scratch[i];
                }
            }
        }
    }
}

/// Unnormalized 1-D DFT of an arbitrary-length buffer (rustfft handles
/// non-power-of-two sizes internally).
pub(crate) fn dft_1d(values: &mut [Complex64], direction: FftDirection) {
    let fft = plan(values.len(), direction);
    fft.process(values);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_dft_in_2d() {
        let n = 8;
        let mut v: Vec<Complex64> = (0..n * n)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let orig = v.clone();
        dft_nd(&mut v, &[n, n], FftDirection::Forward);
        // direct O(n^4) check at a few bins
        for &(k0, k1) in &[(0usize, 0usize), (1, 3), (5, 2), (7, 7)] {
            let mut acc = Complex64::default();
            for j0 in 0..n {
                for j1 in 0..n {
                    let ph = -2.0 * std::f64::consts::PI
                        * ((j0 * k0) as f64 + (j1 * k1) as f64)
                        / n as f64;
                    acc += orig[j0 * n + j1] * Complex64::from_polar(1.0, ph);
                }
            }
            let got = v[k0 * n + k1];
            assert!((got - acc).norm() < 1e-9, "bin ({k0},{k1}): {got} vs {acc}");
        }
    }

    #[test]
    fn forward_then_inverse_scales_by_len() {
        let n = 16;
        let mut v: Vec<Complex64> = (0..n * n * n)
            .map(|i| Complex64::new((i as f64).sin(), 0.25 * (i as f64).cos()))
            .collect();
        let orig = v.clone();
        dft_nd(&mut v, &[n, n, n], FftDirection::Forward);
        dft_nd(&mut v, &[n, n, n], FftDirection::Inverse);
        let scale = (n * n * n) as f64;
        for (a, b) in v.iter().zip(orig.iter()) {
            assert!((a / scale - b).norm() < 1e-12);
        }
    }
}
