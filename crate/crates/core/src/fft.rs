//! Square 2-D transforms on row-major buffers. Plans are cached per size.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustdct::{DctPlanner, TransformType2And3};
use rustfft::{Fft, FftPlanner};

type FftKey = (usize, bool);

fn fft_plan(m: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<Mutex<(FftPlanner<f64>, HashMap<FftKey, Arc<dyn Fft<f64>>>)>> =
        OnceLock::new();
    let cell = PLANS.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())));
    let mut guard = cell.lock().expect("fft plan cache poisoned");
    let (planner, cache) = &mut *guard;
    cache
        .entry((m, inverse))
        .or_insert_with(|| {
            if inverse {
                planner.plan_fft_inverse(m)
            } else {
                planner.plan_fft_forward(m)
            }
        })
        .clone()
}

fn dct_plan(m: usize) -> Arc<dyn TransformType2And3<f64>> {
    static PLANS: OnceLock<Mutex<(DctPlanner<f64>, HashMap<usize, Arc<dyn TransformType2And3<f64>>>)>> =
        OnceLock::new();
    let cell = PLANS.get_or_init(|| Mutex::new((DctPlanner::new(), HashMap::new())));
    let mut guard = cell.lock().expect("dct plan cache poisoned");
    let (planner, cache) = &mut *guard;
    cache
        .entry(m)
        .or_insert_with(|| planner.plan_dct2(m))
        .clone()
}

pub(crate) fn transpose<T: Copy + Send + Sync>(data: &mut [T], m: usize) {
    for k in 0..m {
        for j in (k + 1)..m {
            data.swap(k * m + j, j * m + k);
        }
    }
}

fn fft_rows(data: &mut [Complex64], m: usize, inverse: bool) {
    let plan = fft_plan(m, inverse);
    let scratch_len = plan.get_inplace_scratch_len();
    data.par_chunks_mut(m).for_each_init(
        || vec![Complex64::new(0.0, 0.0); scratch_len],
        |scratch, row| plan.process_with_scratch(row, scratch),
    );
}

/// Unnormalized 2-D DFT of an `m × m` buffer.
pub(crate) fn fft2(data: &mut [Complex64], m: usize, inverse: bool) {
    debug_assert_eq!(data.len(), m * m);
    fft_rows(data, m, inverse);
    transpose(data, m);
    fft_rows(data, m, inverse);
    transpose(data, m);
}

/// Forward transform.
pub(crate) fn forward(data: &mut [Complex64], m: usize) {
    fft2(data, m, false);
}

/// Inverse transform including the `1/m²` factor.
pub(crate) fn inverse(data: &mut [Complex64], m: usize) {
    fft2(data, m, true);
    let s = 1.0 / (m * m) as f64;
    data.par_iter_mut().for_each(|c| *c *= s);
}

fn dct_rows(data: &mut [f64], m: usize, inverse: bool) {
    let plan = dct_plan(m);
    let scratch_len = plan.get_scratch_len();
    data.par_chunks_mut(m).for_each_init(
        || vec![0.0; scratch_len],
        |scratch, row| {
            if inverse {
                plan.process_dct3_with_scratch(row, scratch)
            } else {
                plan.process_dct2_with_scratch(row, scratch)
            }
        },
    );
}

/// 2-D DCT-II (`inverse = false`) or its exact inverse (scaled DCT-III).
pub(crate) fn dct2d(data: &mut [f64], m: usize, inverse: bool) {
    dct_rows(data, m, inverse);
    transpose(data, m);
    dct_rows(data, m, inverse);
    transpose(data, m);
    if inverse {
        let s = 4.0 / (m * m) as f64;
        data.par_iter_mut().for_each(|x| *x *= s);
    }
}
