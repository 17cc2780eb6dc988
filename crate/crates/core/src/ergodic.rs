//! Concrete measure-preserving systems, weighted bilinear averages along
//! orbits, the integer-model average, and convergence diagnostics.
//!
//! Orbit states are kept in f64 (renormalized mod 1 each step); amplitudes
//! and averages are complex f64.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::oscillation::Trace;
use crate::scalar::unit_phase;
use crate::series::WeightSeries;

/// Default irrational rotation number.
pub const DEFAULT_ALPHA: f64 = std::f64::consts::SQRT_2 - 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum System {
    /// x -> x + alpha on the torus.
    Rotation { alpha: f64 },
    /// (x, y) -> (x + alpha, y + x) on the 2-torus.
    Skew { alpha: f64 },
}

impl System {
    pub fn dim(&self) -> usize {
        match self {
            System::Rotation { .. } => 1,
            System::Skew { .. } => 2,
        }
    }

    pub fn forward(&self, state: &mut [f64]) {
        match *self {
            System::Rotation { alpha } => state[0] = (state[0] + alpha).rem_euclid(1.0),
            System::Skew { alpha } => {
                let x = state[0];
                state[0] = (x + alpha).rem_euclid(1.0);
                state[1] = (state[1] + x).rem_euclid(1.0);
            }
        }
    }

    pub fn backward(&self, state: &mut [f64]) {
        match *self {
            System::Rotation { alpha } => state[0] = (state[0] - alpha).rem_euclid(1.0),
            System::Skew { alpha } => {
                let x = (state[0] - alpha).rem_euclid(1.0);
                state[0] = x;
                state[1] = (state[1] - x).rem_euclid(1.0);
            }
        }
    }

    fn step(&self, state: &mut [f64], exponent: i64) {
        if exponent >= 0 {
            for _ in 0..exponent {
                self.forward(state);
            }
        } else {
            for _ in 0..-exponent {
                self.backward(state);
            }
        }
    }
}

/// A trigonometric polynomial sum_k a_k e(k . x) on the torus of the
/// system's dimension.
#[derive(Debug, Clone)]
pub struct Observable {
    pub terms: Vec<(Vec<i64>, Complex<f64>)>,
}

impl Observable {
    pub fn constant(c: f64, dim: usize) -> Self {
        Self { terms: vec![(vec![0; dim], Complex::new(c, 0.0))] }
    }

    /// e(k . x) for a single frequency vector.
    pub fn character(freq: Vec<i64>) -> Self {
        Self { terms: vec![(freq, Complex::new(1.0, 0.0))] }
    }

    pub fn l1_bound(&self) -> f64 {
        self.terms.iter().map(|(_, a)| a.norm()).sum()
    }

    pub fn eval(&self, state: &[f64]) -> Complex<f64> {
        self.terms
            .iter()
            .map(|(freq, amp)| {
                let phase: f64 = freq
                    .iter()
                    .zip(state)
                    .map(|(&k, &x)| k as f64 * x)
                    .sum();
                amp * unit_phase(phase.rem_euclid(1.0))
            })
            .sum()
    }
}

fn check_dims(system: &System, f: &Observable, g: &Observable, x0: &[f64]) -> Result<()> {
    let d = system.dim();
    if x0.len() != d
        || f.terms.iter().any(|(k, _)| k.len() != d)
        || g.terms.iter().any(|(k, _)| k.len() != d)
    {
        return Err(Error::invalid("observable/state dimension mismatch"));
    }
    Ok(())
}

/// B_{w,N}(f,g)(x0) = (1/N) sum_{n<=N} w(n) f(T^{an} x0) g(T^{bn} x0).
pub fn bilinear_average(
    w: &WeightSeries<f64>,
    system: &System,
    f: &Observable,
    g: &Observable,
    x0: &[f64],
    n_max: u64,
    exponents: (i64, i64),
) -> Result<Complex<f64>> {
    check_dims(system, f, g, x0)?;
    if (n_max as i64) > w.end() - 1 {
        return Err(Error::invalid("weight window must cover 1..=N"));
    }
    let (a, b) = exponents;
    let mut state_f = x0.to_vec();
    let mut state_g = x0.to_vec();
    let mut acc = Complex::new(0.0f64, 0.0);
    for n in 1..=n_max {
        system.step(&mut state_f, a);
        system.step(&mut state_g, b);
        acc += w.get(n as i64) * f.eval(&state_f) * g.eval(&state_g);
    }
    Ok(acc / n_max as f64)
}

/// (1/N) sum_{n<=N} w(n) F(x-n) G(x+n) on the integer model.
pub fn integer_model_average(
    f_series: &WeightSeries<f64>,
    g_series: &WeightSeries<f64>,
    w: &WeightSeries<f64>,
    x: i64,
    n_max: u64,
) -> Result<Complex<f64>> {
    let n = n_max as i64;
    if f_series.start > x - n
        || f_series.end() <= x
        || g_series.start > x
        || g_series.end() <= x + n
    {
        return Err(Error::invalid("series windows must cover [x-N, x+N]"));
    }
    let mut acc = Complex::new(0.0f64, 0.0);
    for k in 1..=n {
        acc += w.get(k) * f_series.get(x - k) * g_series.get(x + k);
    }
    Ok(acc / n_max as f64)
}

/// The trace N -> B_{w,N}(f,g)(x0) on an increasing time grid, via one orbit
/// pass with running partial sums.
pub fn average_trace(
    w: &WeightSeries<f64>,
    system: &System,
    f: &Observable,
    g: &Observable,
    x0: &[f64],
    exponents: (i64, i64),
    time_grid: &[i64],
) -> Result<Trace<f64>> {
    check_dims(system, f, g, x0)?;
    if time_grid.is_empty() || !time_grid.windows(2).all(|p| p[0] < p[1]) {
        return Err(Error::invalid("time grid must be non-empty and increasing"));
    }
    if time_grid[0] < 1 {
        return Err(Error::invalid("times must be at least 1"));
    }
    let (a, b) = exponents;
    let n_top = *time_grid.last().expect("non-empty");
    let mut state_f = x0.to_vec();
    let mut state_g = x0.to_vec();
    let mut acc = Complex::new(0.0f64, 0.0);
    let mut values = Vec::with_capacity(time_grid.len());
    let mut next = 0usize;
    for n in 1..=n_top {
        system.step(&mut state_f, a);
        system.step(&mut state_g, b);
        acc += w.get(n) * f.eval(&state_f) * g.eval(&state_g);
        while next < time_grid.len() && time_grid[next] == n {
            values.push(acc / n as f64);
            next += 1;
        }
    }
    Trace::new(time_grid.to_vec(), values)
}

/// The default lacunary grid floor(2^{j/4}), deduplicated, up to n_top.
pub fn lacunary_grid(n_top: i64) -> Vec<i64> {
    let mut grid = Vec::new();
    let mut j = 0u32;
    loop {
        let n = 2f64.powf(j as f64 / 4.0).floor() as i64;
        if n > n_top {
            break;
        }
        if grid.last() != Some(&n) {
            grid.push(n);
        }
        j += 1;
    }
    grid
}

/// Both sides of the summation-by-parts equivalence at scale M:
/// lhs = (1/pi(M)) sum_{p<=M} a_p, rhs = (1/M) sum_{n<=M} Lambda(n) a_n.
pub fn prime_vs_mangoldt(
    a: impl Fn(u64) -> Complex<f64>,
    m: u64,
) -> Result<(Complex<f64>, Complex<f64>)> {
    let sieve = crate::sieve::build_sieve(m.max(2) as usize)?;
    let mangoldt = crate::sieve::von_mangoldt_series::<f64>(&sieve, m as usize)?;
    let mut prime_sum = Complex::new(0.0f64, 0.0);
    let mut prime_count = 0u64;
    let mut weighted = Complex::new(0.0f64, 0.0);
    for n in 2..=m {
        if sieve.is_prime(n as usize) {
            prime_sum += a(n);
            prime_count += 1;
        }
        weighted += a(n) * mangoldt.get(n as i64).re;
    }
    if prime_count == 0 {
        return Err(Error::invalid("no primes up to M"));
    }
    Ok((prime_sum / prime_count as f64, weighted / m as f64))
}
