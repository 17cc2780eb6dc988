//! Thin FFT helpers shared by the uniformity-norm and spectrum kernels.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::scalar::Scalar;

pub fn next_pow2(n: usize) -> usize {
    n.max(1).next_power_of_two()
}

#[derive(Clone)]
pub struct FftPlan<T: Scalar> {
    pub len: usize,
    fft: Arc<dyn Fft<T>>,
}

impl<T: Scalar> FftPlan<T> {
    pub fn forward(len: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(len);
        Self { len, fft }
    }

    pub fn inverse(len: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_inverse(len);
        Self { len, fft }
    }

    /// Transform of `data` zero-padded to the plan length.
    pub fn run_padded(&self, data: &[Complex<T>]) -> Vec<Complex<T>> {
        assert!(data.len() <= self.len);
        let mut buf = vec![Complex::new(T::zero(), T::zero()); self.len];
        buf[..data.len()].copy_from_slice(data);
        self.fft.process(&mut buf);
        buf
    }

    pub fn run_in_place(&self, buf: &mut [Complex<T>]) {
        assert_eq!(buf.len(), self.len);
        self.fft.process(buf);
    }
}

/// sum_k |(f star f)(k)|^2 of the (linear) autocorrelation, computed as
/// (1/L) sum_j |F_j|^4 over a zero-padded transform of length L >= 2 |f|.
pub fn autocorrelation_fourth_moment<T: Scalar>(plan: &FftPlan<T>, data: &[Complex<T>]) -> T {
    debug_assert!(plan.len >= 2 * data.len());
    let spectrum = plan.run_padded(data);
    let sum: T = spectrum.iter().map(|z| z.norm_sqr() * z.norm_sqr()).sum();
    sum / T::from_usize_c(plan.len)
}
