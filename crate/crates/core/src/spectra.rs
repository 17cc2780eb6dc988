//! Shifted dyadic grids, local Fourier spectra, the soft threshold ladder,
//! multi-frequency projections, sampling counts, and wave-packet energy.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fft::FftPlan;
use crate::scalar::{unit_phase, Scalar};
use crate::series::{PhaseRotor, WeightSeries};

/// Half-open integer interval [lo, lo + len).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Interval {
    pub lo: i64,
    pub len: u64,
}

impl Interval {
    pub fn hi(&self) -> i64 {
        self.lo + self.len as i64
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi() <= self.hi()
    }

    pub fn disjoint(&self, other: &Interval) -> bool {
        self.hi() <= other.lo || other.hi() <= self.lo
    }
}

/// Grid interval with its leading core sub-interval of relative length 1/Delta.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridInterval {
    pub interval: Interval,
    pub core_len: u64,
}

/// The grid D_U^{Delta,L}: intervals K0 * 2^k * (n + L/Delta + [0,1)) over
/// k = U mod (Delta - 1), clipped to a window.
#[derive(Debug, Clone)]
pub struct ShiftedGrid {
    pub k0: u64,
    pub delta: u64,
    pub shift: u64,
    pub residue: u32,
    /// half-open window [lo, hi)
    pub window: (i64, i64),
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// All grid intervals fully inside the window, smallest scale first.
///
/// Cross-scale nesting relies on (2^{Delta-1} - 1) * L / Delta being an
/// integer, which Fermat gives for every odd prime Delta (and trivially for
/// L = 0); Delta = 2 with a nonzero shift has no nesting across scales.
pub fn grid_intervals(grid: &ShiftedGrid) -> Result<Vec<GridInterval>> {
    if !is_prime_u64(grid.delta) {
        return Err(Error::invalid("Delta must be prime"));
    }
    if grid.k0 == 0 || grid.k0 % grid.delta != 0 {
        return Err(Error::invalid("Delta must divide K0"));
    }
    if grid.shift >= grid.delta {
        return Err(Error::invalid("shift L must lie in [Delta]"));
    }
    let (lo, hi) = grid.window;
    if lo >= hi {
        return Err(Error::invalid("window must be non-empty"));
    }
    let step = (grid.delta - 1).max(1) as u32;
    let mut out = Vec::new();
    let mut k = grid.residue % step;
    loop {
        let scale = match grid.k0.checked_shl(k) {
            Some(m) if m as i64 > 0 && (m as i64) <= hi - lo => m as i64,
            _ => break,
        };
        let offset = scale / grid.delta as i64 * grid.shift as i64;
        let n_lo = (lo - offset).div_euclid(scale)
            + i64::from((lo - offset).rem_euclid(scale) != 0);
        let mut n = n_lo;
        while scale * n + offset + scale <= hi {
            out.push(GridInterval {
                interval: Interval { lo: scale * n + offset, len: scale as u64 },
                core_len: scale as u64 / grid.delta,
            });
            n += 1;
        }
        k += step;
    }
    Ok(out)
}

/// Count pairs of intervals that are neither nested nor disjoint.
pub fn nesting_violations(intervals: &[GridInterval]) -> usize {
    let mut bad = 0;
    for (i, a) in intervals.iter().enumerate() {
        for b in &intervals[..i] {
            let (a, b) = (&a.interval, &b.interval);
            if !(a.contains(b) || b.contains(a) || a.disjoint(b)) {
                bad += 1;
            }
        }
    }
    bad
}

/// F_I g(xi) = sum_{n in I} g(n) e(-n xi / |I|) for xi in Z/|I|
/// (absolute-phase convention: n is the integer point, not its offset in I).
pub fn local_fourier<T: Scalar>(g: &WeightSeries<T>, interval: Interval) -> Result<Vec<Complex<T>>> {
    if interval.lo < g.start || interval.hi() > g.end() {
        return Err(Error::invalid("interval must lie inside the series window"));
    }
    let m = interval.len as usize;
    let lo_off = (interval.lo - g.start) as usize;
    let plan = FftPlan::<T>::forward(m);
    let mut buf = g.values[lo_off..lo_off + m].to_vec();
    plan.run_in_place(&mut buf);
    // FFT phases are offset-based; restore absolute n = lo + j
    for (xi, v) in buf.iter_mut().enumerate() {
        let turn = -(interval.lo as f64) * xi as f64 / m as f64;
        *v *= unit_phase(T::from_f64_c(turn - turn.floor()));
    }
    Ok(buf)
}

/// The dyadic annulus {xi : delta/2 < |F_I g(xi)|/|I| <= delta}.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSet {
    pub interval: Interval,
    pub delta: f64,
    pub frequencies: Vec<u64>,
}

impl SpectrumSet {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "interval": [self.interval.lo, self.interval.hi()],
            "delta": self.delta,
            "freqs": self.frequencies,
        })
    }
}

pub fn spec_delta<T: Scalar>(g: &WeightSeries<T>, interval: Interval, delta: f64) -> Result<SpectrumSet> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::invalid("need 0 < delta <= 1"));
    }
    let coeffs = local_fourier(g, interval)?;
    let m = interval.len as f64;
    let frequencies = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| {
            let a = c.norm().to_f64().unwrap_or(0.0) / m;
            a > delta / 2.0 && a <= delta
        })
        .map(|(xi, _)| xi as u64)
        .collect();
    Ok(SpectrumSet { interval, delta, frequencies })
}

/// Smooth bump supported on (1/2, 2).
fn bump(t: f64) -> f64 {
    if t > 0.5 && t < 2.0 {
        (-1.0 / ((t - 0.5) * (2.0 - t))).exp()
    } else {
        0.0
    }
}

/// psi(t) = bump(t) / sum_j bump(2^j t): dyadic partition of unity on (0, 1]
/// exact by construction (at most two dilates meet any t).
pub fn psi(t: f64) -> f64 {
    let b = bump(t);
    if b == 0.0 {
        return 0.0;
    }
    b / (bump(t / 2.0) + b + bump(2.0 * t))
}

/// Dyadic soft-threshold levels delta_j = delta0 * 2^{-j}, j = 0..levels.
#[derive(Debug, Clone)]
pub struct ThresholdLadder {
    pub delta0: f64,
    pub levels: usize,
}

impl ThresholdLadder {
    pub fn new(delta0: f64, levels: usize) -> Result<Self> {
        if !(delta0 > 0.0 && delta0 <= 1.0) || levels == 0 {
            return Err(Error::invalid("need 0 < delta0 <= 1 and at least one level"));
        }
        Ok(Self { delta0, levels })
    }

    pub fn delta(&self, j: usize) -> f64 {
        self.delta0 * 0.5f64.powi(j as i32)
    }

    /// Psi_{delta_j}(z) = z * psi(|z| / delta_j).
    pub fn soft_threshold<T: Scalar>(&self, j: usize, z: Complex<T>) -> Complex<T> {
        let t = z.norm().to_f64().unwrap_or(0.0) / self.delta(j);
        z * T::from_f64_c(psi(t))
    }

    /// sum_j Psi_{delta_j}(z): the identity on |z| in (delta_min/2, delta0].
    pub fn ladder_sum<T: Scalar>(&self, z: Complex<T>) -> Complex<T> {
        let a = z.norm().to_f64().unwrap_or(0.0);
        let total: f64 = (0..self.levels).map(|j| psi(a / self.delta(j))).sum();
        z * T::from_f64_c(total)
    }
}

/// Radial difference-quotient estimate of Lip(Psi_delta) on a fine grid
/// (the tangential derivative is psi <= 1, so the radial part dominates).
pub fn measured_lipschitz(samples: usize) -> f64 {
    let h = 4.0 / samples as f64;
    (0..samples)
        .map(|i| {
            let s = i as f64 * h;
            (((s + h) * psi(s + h) - s * psi(s)) / h).abs()
        })
        .fold(0.0, f64::max)
}

/// Pi_I[Lambda] g(x) = sum_theta Psi(E_I Mod_{-theta} g) e(theta x) 1_I(x),
/// frequencies theta = a/m0. `level` selects one ladder rung; `None` sums
/// the whole ladder.
pub fn projection<T: Scalar>(
    g: &WeightSeries<T>,
    interval: Interval,
    lambda: &[u64],
    m0: u64,
    ladder: &ThresholdLadder,
    level: Option<usize>,
) -> Result<WeightSeries<T>> {
    if m0 == 0 {
        return Err(Error::invalid("frequency denominator must be positive"));
    }
    let mut seen = std::collections::HashSet::new();
    if !lambda.iter().all(|a| seen.insert(a % m0)) {
        return Err(Error::invalid("frequencies must be pairwise distinct mod 1"));
    }
    if interval.lo < g.start || interval.hi() > g.end() {
        return Err(Error::invalid("interval must lie inside the series window"));
    }
    if level.is_some_and(|j| j >= ladder.levels) {
        return Err(Error::invalid("ladder level out of range"));
    }
    let m = interval.len;
    let inv_m = T::one() / T::from_f64_c(m as f64);
    let mut out = vec![Complex::new(T::zero(), T::zero()); m as usize];
    for &a in lambda {
        let theta = T::from_f64_c((a % m0) as f64 / m0 as f64);
        // mean of g * e(-theta n) over I
        let mut rotor = PhaseRotor::new(-theta, interval.lo);
        let mut mean = Complex::new(T::zero(), T::zero());
        for n in interval.lo..interval.hi() {
            mean = mean + g.get(n) * rotor.value();
            rotor.advance();
        }
        mean = mean * inv_m;
        let amp = match level {
            Some(j) => ladder.soft_threshold(j, mean),
            None => ladder.ladder_sum(mean),
        };
        let mut carrier = PhaseRotor::new(theta, interval.lo);
        for slot in out.iter_mut() {
            *slot = *slot + amp * carrier.value();
            carrier.advance();
        }
    }
    WeightSeries::new(format!("{}|proj", g.label), interval.lo, out)
}

/// Greedy maximal 1/N-separated set inside {theta : |P_N(theta)| >= delta},
/// scanning a grid of spacing 1/(8N * refine); P_N(theta) =
/// (1/N) sum_{n<=N} phi(n/N) g(n) e(-n theta). Returns (|Lambda|, |Lambda| delta^2).
pub fn sampling_check<T: Scalar>(
    g: &WeightSeries<T>,
    n_max: u64,
    delta: f64,
    phi: impl Fn(f64) -> f64,
    refine: usize,
) -> Result<(usize, f64)> {
    if delta <= 0.0 || n_max == 0 || refine == 0 {
        return Err(Error::invalid("need delta > 0, N >= 1, refine >= 1"));
    }
    if g.values.iter().any(|v| v.norm().to_f64().unwrap_or(2.0) > 1.0 + 1e-9) {
        return Err(Error::invalid("sampling check requires a 1-bounded series"));
    }
    let grid = 8 * n_max as usize * refine;
    let plan = FftPlan::<T>::forward(grid);
    // place phi(n/N) g(n) at slot n; FFT slot j is theta = j / grid
    let mut buf = vec![Complex::new(T::zero(), T::zero()); grid];
    for n in 1..=n_max.min(grid as u64 - 1) {
        let w = T::from_f64_c(phi(n as f64 / n_max as f64));
        buf[n as usize] = g.get(n as i64) * w;
    }
    plan.run_in_place(&mut buf);
    let inv_n = 1.0 / n_max as f64;
    let mut candidates: Vec<(f64, usize)> = buf
        .iter()
        .enumerate()
        .filter_map(|(j, v)| {
            let a = v.norm().to_f64().unwrap_or(0.0) * inv_n;
            (a >= delta).then_some((a, j))
        })
        .collect();
    // Vitali selection: strongest peak first, suppress a 1/N neighborhood
    candidates.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
    let mut chosen: Vec<usize> = Vec::new();
    let sep = 1.0 / n_max as f64;
    for (_, j) in candidates {
        let theta = j as f64 / grid as f64;
        let far = chosen.iter().all(|&c| {
            let d = (theta - c as f64 / grid as f64).abs();
            d.min(1.0 - d) >= sep
        });
        if far {
            chosen.push(j);
        }
    }
    Ok((chosen.len(), chosen.len() as f64 * delta * delta))
}

/// Wave packet eta_{I,xi}(n) = |I|^{-1/2} 1_I(n) e(xi n / |I|).
pub fn wave_packet<T: Scalar>(interval: Interval, xi: u64) -> WeightSeries<T> {
    let m = interval.len;
    let scale = T::one() / T::from_f64_c(m as f64).sqrt();
    let values = (0..m)
        .map(|j| {
            let n = interval.lo + j as i64;
            let turn = (n as f64 * xi as f64 / m as f64).rem_euclid(1.0);
            unit_phase(T::from_f64_c(turn)) * scale
        })
        .collect();
    WeightSeries::new(format!("wp[{},{}]", interval.lo, xi), interval.lo, values).expect("non-empty")
}

/// Lambda_M = {xi in Z/M : 0 < dist(xi/M, Lambda) <= 10 R / M}, with exact
/// rational distances; requires m0 | M.
pub fn lambda_annulus(lambda: &[u64], m0: u64, big_m: u64, r: u64) -> Result<Vec<u64>> {
    if m0 == 0 || big_m % m0 != 0 {
        return Err(Error::invalid("need m0 | M for exact rational distances"));
    }
    let mut out = Vec::new();
    for xi in 0..big_m {
        // dist(xi/M, a/m0) = |xi*m0 - a*M| / (M*m0) reduced mod 1
        let best = lambda
            .iter()
            .map(|&a| {
                let diff = (xi as i128 * m0 as i128 - (a % m0) as i128 * big_m as i128)
                    .rem_euclid((big_m * m0) as i128);
                diff.min((big_m * m0) as i128 - diff)
            })
            .min();
        if let Some(d) = best {
            // 0 < d/(M m0) <= 10R/M  <=>  0 < d <= 10 R m0
            if d > 0 && d <= 10 * r as i128 * m0 as i128 {
                out.push(xi);
            }
        }
    }
    Ok(out)
}

/// total = sum_M sum_{I, |I|=M} sum_{xi in Lambda_M} |<g, eta_{I,xi}>|^2 and
/// the Bessel ratio total / (R ||g||^2). Scales must be m0-multiples and
/// 2^R-separated (with the smallest at least 2^R m0).
pub fn wavepacket_energy<T: Scalar>(
    g: &WeightSeries<T>,
    lambda: &[u64],
    m0: u64,
    r: u64,
    scales: &[u64],
) -> Result<(f64, f64)> {
    if r == 0 || scales.is_empty() {
        return Err(Error::invalid("need R >= 1 and at least one scale"));
    }
    let gap = 1u64
        .checked_shl(r as u32)
        .ok_or_else(|| Error::invalid("R too large"))?;
    let mut prev = m0;
    for &m in scales {
        if m % m0 != 0 || m < prev.saturating_mul(gap) {
            return Err(Error::invalid("scales must be m0-multiples, 2^R-separated"));
        }
        prev = m;
    }
    let per_scale: Vec<f64> = scales
        .par_iter()
        .map(|&m| -> Result<f64> {
            let annulus = lambda_annulus(lambda, m0, m, r)?;
            if annulus.is_empty() {
                return Ok(0.0);
            }
            let mut acc = 0.0f64;
            let first = g.start.div_euclid(m as i64) * m as i64;
            let mut lo = first;
            while lo < g.end() {
                let interval = Interval { lo, len: m };
                // restriction of g to I, zero-extended at the window edges
                let vals: Vec<Complex<T>> =
                    (lo..interval.hi()).map(|n| g.get(n)).collect();
                let padded = WeightSeries::new("blk", lo, vals)?;
                let coeffs = local_fourier(&padded, interval)?;
                for &xi in &annulus {
                    // |<g, eta>|^2 = |F_I g(xi)|^2 / M
                    acc += coeffs[xi as usize].norm_sqr().to_f64().unwrap_or(0.0) / m as f64;
                }
                lo += m as i64;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let total: f64 = per_scale.iter().sum();
    let norm = g.l2_norm_sq().to_f64().unwrap_or(0.0);
    let ratio = if norm > 0.0 { total / (r as f64 * norm) } else { 0.0 };
    Ok((total, ratio))
}
