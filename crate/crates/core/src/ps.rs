//! Piatetski-Shapiro sequences {floor(k^c)}, the sparse window weight W_c,
//! its difference-Fourier L^1 statistics, and the reparameterization check.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::{next_pow2, FftPlan};
use crate::scalar::Scalar;
use crate::series::WeightSeries;

/// Best rational approximation p/q of `c` with q <= 10^6, if `c` is within
/// 1e-13 of it; used to resolve floor(k^c) at integer boundaries exactly.
fn rational_exponent(c: f64) -> Option<(u64, u64)> {
    let mut x = c;
    let (mut p0, mut q0, mut p1, mut q1) = (1u64, 0u64, 0u64, 1u64);
    for _ in 0..64 {
        let a = x.floor();
        if a < 0.0 || a > 1e15 {
            break;
        }
        let a = a as u64;
        let p2 = a.checked_mul(p0)?.checked_add(p1)?;
        let q2 = a.checked_mul(q0)?.checked_add(q1)?;
        if q2 > 1_000_000 {
            break;
        }
        (p1, q1, p0, q0) = (p0, q0, p2, q2);
        if (c - p0 as f64 / q0 as f64).abs() < 1e-13 {
            return Some((p0, q0));
        }
        let frac = x - a as f64;
        if frac < 1e-15 {
            break;
        }
        x = 1.0 / frac;
    }
    None
}

/// Is k^c >= m? Exact via integer powers when c is (numerically) rational,
/// logarithmic comparison otherwise.
fn pow_at_least(k: u64, c: f64, m: u64) -> bool {
    if m == 0 {
        return true;
    }
    if let Some((p, q)) = rational_exponent(c) {
        return BigUint::from(k).pow(p as u32) >= BigUint::from(m).pow(q as u32);
    }
    c * (k as f64).ln() >= (m as f64).ln()
}

/// floor(k^c) with boundary floors resolved by the exact cross-check; raw
/// floating floor is only trusted away from integer boundaries.
pub fn floor_pow(k: u64, c: f64) -> u64 {
    if k == 0 {
        return 0;
    }
    if c == 1.0 {
        return k;
    }
    let x = (c * (k as f64).ln()).exp();
    let nearest = x.round();
    // a misplaced floor costs order N^{1-1/c}; resolve anything within the
    // f64 error envelope of an integer
    if (x - nearest).abs() < 1e-9 * x.max(1.0) && nearest >= 1.0 {
        let m = nearest as u64;
        if pow_at_least(k, c, m) {
            m
        } else {
            m - 1
        }
    } else {
        x.floor() as u64
    }
}

#[derive(Debug, Clone)]
pub struct PSSequence {
    pub c: f64,
    pub limit: u64,
    pub members: Vec<u64>,
}

/// {floor(k^c) : k >= 1} intersected with [1, N].
pub fn ps_members(c: f64, n_max: u64) -> Result<PSSequence> {
    if c < 1.0 {
        return Err(Error::invalid("need c >= 1"));
    }
    let mut members = Vec::new();
    let mut k = 1u64;
    loop {
        let m = floor_pow(k, c);
        if m > n_max {
            break;
        }
        if m >= 1 {
            members.push(m);
        }
        k += 1;
    }
    debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
    Ok(PSSequence { c, limit: n_max, members })
}

/// W_c(n) = (1 - c n^{1-1/c} 1_{N_c}(n)) on the window (N/2, N].
#[derive(Debug, Clone)]
pub struct SparseWeight<T: Scalar> {
    pub c: f64,
    pub n_max: u64,
    pub series: WeightSeries<T>,
}

pub fn w_c_series<T: Scalar>(c: f64, n_max: u64) -> Result<SparseWeight<T>> {
    if n_max < 2 {
        return Err(Error::invalid("need N >= 2"));
    }
    let seq = ps_members(c, n_max)?;
    let members: HashSet<u64> = seq.members.iter().copied().collect();
    let lo = n_max / 2 + 1;
    let values: Vec<T> = (lo..=n_max)
        .map(|n| {
            if members.contains(&n) {
                T::from_f64_c(1.0 - c * (n as f64).powf(1.0 - 1.0 / c))
            } else {
                T::one()
            }
        })
        .collect();
    Ok(SparseWeight {
        c,
        n_max,
        series: WeightSeries::from_real("w_c", lo as i64, values)?,
    })
}

/// L^1(T) norm of the Fourier transform of Delta_h W, by Riemann sum on an
/// `oversample * support` grid; returns (value, grid spacing).
pub fn delta_h_fourier_l1<T: Scalar>(
    weight: &SparseWeight<T>,
    h: i64,
    oversample: usize,
) -> Result<(T, f64)> {
    if oversample < 8 {
        return Err(Error::invalid("oversample must be at least 8"));
    }
    let diff = weight.series.conj_difference(h);
    let grid = next_pow2(oversample * weight.series.len().max(1));
    let plan = FftPlan::forward(grid);
    let spectrum = plan.run_padded(&diff.values);
    let total: T = spectrum.iter().map(|z| z.norm()).sum();
    Ok((total / T::from_usize_c(grid), 1.0 / grid as f64))
}

#[derive(Debug, Clone)]
pub struct TechStats {
    pub c: f64,
    pub n: u64,
    pub sampled_h: usize,
    /// max_h log_N of the L^1 norm (only over h with nonzero norm).
    pub max_exponent: f64,
    pub max_l1: f64,
    /// fraction of sampled h with norm exceeding N^{1/2 - epsilon'}.
    pub bad_fraction: f64,
    pub epsilon_prime: f64,
}

/// Empirical statistics of h -> ||F(Delta_h W_c)||_{L^1(T)}: deterministic
/// stride plus a seeded uniform sample of h in [1, N].
pub fn tech_lemma_stats(
    c: f64,
    log2_n: u32,
    h_samples: usize,
    seed: u64,
    epsilon_prime: f64,
) -> Result<TechStats> {
    if log2_n > 16 {
        return Err(Error::invalid("tech stats capped at log2 N = 16"));
    }
    if h_samples == 0 {
        return Err(Error::invalid("need at least one h sample"));
    }
    let n = 1u64 << log2_n;
    let weight = w_c_series::<f64>(c, n)?;
    let hs = sample_h(n, h_samples, seed);
    let norms: Vec<f64> = hs
        .par_iter()
        .map(|&h| delta_h_fourier_l1(&weight, h as i64, 8).map(|(v, _)| v))
        .collect::<Result<_>>()?;
    let max_l1 = norms.iter().copied().fold(0.0f64, f64::max);
    let threshold = (n as f64).powf(0.5 - epsilon_prime);
    let bad = norms.iter().filter(|&&v| v > threshold).count();
    let max_exponent = if max_l1 > 0.0 {
        max_l1.ln() / (n as f64).ln()
    } else {
        f64::NEG_INFINITY
    };
    Ok(TechStats {
        c,
        n,
        sampled_h: hs.len(),
        max_exponent,
        max_l1,
        bad_fraction: bad as f64 / hs.len() as f64,
        epsilon_prime,
    })
}

fn sample_h(n: u64, count: usize, seed: u64) -> Vec<u64> {
    use rand::{Rng, SeedableRng};
    let mut hs: Vec<u64> = Vec::with_capacity(count);
    let stride_count = count / 2;
    for j in 0..stride_count {
        hs.push(1 + j as u64 * n / stride_count.max(1) as u64);
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    while hs.len() < count {
        hs.push(rng.gen_range(1..=n));
    }
    hs.sort_unstable();
    hs.dedup();
    hs
}

/// Both sides of the reparameterization display for a bounded rule `a`:
/// lhs = (1/N) sum_{n<=N} a(floor(n^c)),
/// rhs = (1/N) sum_{n<=N} c n^{1-1/c} a(n) 1_{N_c}(n).
pub fn reparam_check<T: Scalar>(
    a: impl Fn(u64) -> Complex<T>,
    c: f64,
    n_max: u64,
) -> Result<(Complex<T>, Complex<T>)> {
    if c < 1.0 {
        return Err(Error::invalid("need c >= 1"));
    }
    let mut lhs = Complex::new(T::zero(), T::zero());
    for n in 1..=n_max {
        lhs = lhs + a(floor_pow(n, c));
    }
    lhs = lhs / T::from_f64_c(n_max as f64);

    let members = ps_members(c, n_max)?;
    let mut rhs = Complex::new(T::zero(), T::zero());
    for &n in &members.members {
        let scale = T::from_f64_c(c * (n as f64).powf(1.0 - 1.0 / c));
        rhs = rhs + a(n) * scale;
    }
    rhs = rhs / T::from_f64_c(n_max as f64);
    Ok((lhs, rhs))
}
