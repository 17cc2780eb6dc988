//! Quantified-convergence functionals: r-variation, lambda-jump counting,
//! dyadic martingale averages, and measured square-function constants.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::WeightSeries;

pub const VARIATION_LENGTH_CAP: usize = 5000;
pub const VECTOR_DIM_CAP: usize = 64;

/// A finite family of sampled values at strictly increasing times.
#[derive(Debug, Clone)]
pub struct Trace<T: Scalar> {
    pub times: Vec<i64>,
    pub values: Vec<Complex<T>>,
}

impl<T: Scalar> Trace<T> {
    pub fn new(times: Vec<i64>, values: Vec<Complex<T>>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::invalid("times and values must have equal length"));
        }
        if !times.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid("times must be strictly increasing"));
        }
        Ok(Self { times, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn variation_over<T: Scalar>(
    n: usize,
    r: f64,
    dist: impl Fn(usize, usize) -> f64,
) -> Result<f64> {
    if r < 1.0 {
        return Err(Error::invalid("variation requires r >= 1"));
    }
    if n > VARIATION_LENGTH_CAP {
        return Err(Error::capacity(format!(
            "variation capped at {VARIATION_LENGTH_CAP} samples, got {n}"
        )));
    }
    if n < 2 {
        return Ok(0.0);
    }
    // best[j] = max over increasing subsequences ending at j of sum |delta|^r;
    // a subsequence may start anywhere, so best[j] >= 0.
    let mut best = vec![0.0f64; n];
    let mut sup = 0.0f64;
    for j in 1..n {
        for i in 0..j {
            let cand = best[i] + dist(i, j).powf(r);
            if cand > best[j] {
                best[j] = cand;
            }
        }
        sup = sup.max(best[j]);
    }
    Ok(sup.powf(1.0 / r))
}

/// V^r(a) = sup over finite increasing subsequences of
/// (sum_i |a_{t_{i+1}} - a_{t_i}|^r)^{1/r}, by O(M^2) dynamic program.
pub fn variation<T: Scalar>(trace: &Trace<T>, r: f64) -> Result<f64> {
    let v = &trace.values;
    variation_over::<T>(v.len(), r, |i, j| {
        (v[j] - v[i]).norm().to_f64().unwrap_or(f64::NAN)
    })
}

/// V^r of a K-component trace, distances taken in the component l2 norm.
pub fn variation_vector<T: Scalar>(
    times: &[i64],
    values: &[Vec<Complex<T>>],
    r: f64,
) -> Result<f64> {
    if values.len() != times.len() {
        return Err(Error::invalid("times and values must have equal length"));
    }
    let dim = values.first().map_or(0, Vec::len);
    if dim > VECTOR_DIM_CAP {
        return Err(Error::capacity(format!("vector traces capped at dim {VECTOR_DIM_CAP}")));
    }
    if values.iter().any(|v| v.len() != dim) {
        return Err(Error::invalid("inconsistent component dimension"));
    }
    variation_over::<T>(values.len(), r, |i, j| {
        values[i]
            .iter()
            .zip(&values[j])
            .map(|(a, b)| (*b - *a).norm_sqr().to_f64().unwrap_or(f64::NAN))
            .sum::<f64>()
            .sqrt()
    })
}

/// Maximal K with anchors t_0 < ... < t_K and |a_{t_i} - a_{t_{i-1}}| >= lambda
/// (ties count), by the longest-chain dynamic program. A first-crossing
/// greedy scan is not maximal: the best chain need not start at the first
/// sample, e.g. (0, 0.9, -0.1) at lambda = 1 has one jump but no greedy one.
pub fn jump_count<T: Scalar>(trace: &Trace<T>, lambda: f64) -> Result<u64> {
    if lambda <= 0.0 {
        return Err(Error::invalid("jump threshold must be positive"));
    }
    let vals = &trace.values;
    let mut best = vec![0u64; vals.len()];
    let mut sup = 0u64;
    for j in 0..vals.len() {
        for i in 0..j {
            if (vals[j] - vals[i]).norm().to_f64().unwrap_or(0.0) >= lambda {
                best[j] = best[j].max(best[i] + 1);
            }
        }
        sup = sup.max(best[j]);
    }
    Ok(sup)
}

/// E_k f: average of f over the aligned blocks [m*K*2^k, (m+1)*K*2^k),
/// returned on the block-aligned hull of f's window.
pub fn dyadic_martingale<T: Scalar>(f: &WeightSeries<T>, big_k: u64, k: u32) -> Result<WeightSeries<T>> {
    if big_k == 0 {
        return Err(Error::invalid("block base K must be at least 1"));
    }
    let block = (big_k as i64)
        .checked_shl(k)
        .filter(|b| *b > 0)
        .ok_or_else(|| Error::invalid("block length overflows"))?;
    let lo = f.start.div_euclid(block) * block;
    let hi = (f.end() - 1).div_euclid(block) * block + block;
    let inv = T::one() / T::from_f64_c(block as f64);
    let mut values = Vec::with_capacity((hi - lo) as usize);
    let mut m = lo;
    while m < hi {
        let mut acc = Complex::new(T::zero(), T::zero());
        for n in m..m + block {
            acc = acc + f.get(n);
        }
        let avg = acc * inv;
        values.extend(std::iter::repeat(avg).take(block as usize));
        m += block;
    }
    WeightSeries::new(format!("{}|E{}", f.label, k), lo, values)
}

#[derive(Debug, Clone)]
pub struct LepingleReport {
    pub r: f64,
    pub trials: usize,
    pub length: usize,
    /// max over trials of ||V^r(E_k f : k)||_{l2} / ||f||_{l2}.
    pub max_variation_ratio: f64,
    /// max over trials of sup_lambda ||lambda N_lambda^{1/2}||_{l2} / ||f||_{l2}.
    pub max_jump_ratio: f64,
}

/// Pointwise martingale trace (E_0 f(n), E_1 f(n), ...) up to the scale where
/// one block covers the support, via prefix sums.
fn martingale_traces(f: &[f64]) -> Vec<Vec<f64>> {
    let n = f.len();
    let mut prefix = vec![0.0f64; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + f[i];
    }
    let k_max = (usize::BITS - n.next_power_of_two().leading_zeros()) as usize;
    (0..n)
        .map(|x| {
            (0..=k_max)
                .map(|k| {
                    let block = 1usize << k;
                    let lo = x / block * block;
                    let hi = (lo + block).min(n);
                    (prefix[hi] - prefix[lo]) / block as f64
                })
                .collect()
        })
        .collect()
}

fn scalar_variation(vals: &[f64], r: f64) -> f64 {
    let n = vals.len();
    let mut best = vec![0.0f64; n];
    let mut sup = 0.0f64;
    for j in 1..n {
        for i in 0..j {
            let cand = best[i] + (vals[j] - vals[i]).abs().powf(r);
            best[j] = best[j].max(cand);
        }
        sup = sup.max(best[j]);
    }
    sup.powf(1.0 / r)
}

fn scalar_jumps(vals: &[f64], lambda: f64) -> u64 {
    let mut best = vec![0u64; vals.len()];
    let mut sup = 0u64;
    for j in 0..vals.len() {
        for i in 0..j {
            if (vals[j] - vals[i]).abs() >= lambda {
                best[j] = best[j].max(best[i] + 1);
            }
        }
        sup = sup.max(best[j]);
    }
    sup
}

/// Monte-Carlo constants for the martingale variation inequality over random
/// Rademacher and Gaussian signals.
pub fn lepingle_check(trials: usize, length: usize, r: f64, seed: u64) -> Result<LepingleReport> {
    use rand::{Rng, SeedableRng};
    use rand_distr::{Distribution, StandardNormal};
    if r <= 2.0 {
        return Err(Error::invalid("need r > 2"));
    }
    if trials == 0 || length < 2 {
        return Err(Error::invalid("need trials >= 1 and length >= 2"));
    }
    let ratios: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ (t as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let f: Vec<f64> = if t % 2 == 0 {
                (0..length).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect()
            } else {
                (0..length).map(|_| StandardNormal.sample(&mut rng)).collect()
            };
            let norm = f.iter().map(|x| x * x).sum::<f64>().sqrt();
            let traces = martingale_traces(&f);
            let var_l2: f64 = traces
                .iter()
                .map(|tr| scalar_variation(tr, r).powi(2))
                .sum::<f64>()
                .sqrt();
            let mut jump_sup = 0.0f64;
            let mut lambda = 2.0f64;
            while lambda > 1e-3 {
                let l2: f64 = traces
                    .iter()
                    .map(|tr| lambda * lambda * scalar_jumps(tr, lambda) as f64)
                    .sum::<f64>()
                    .sqrt();
                jump_sup = jump_sup.max(l2);
                lambda /= 2.0;
            }
            (var_l2 / norm, jump_sup / norm)
        })
        .collect();
    let max_variation_ratio = ratios.iter().map(|p| p.0).fold(0.0, f64::max);
    let max_jump_ratio = ratios.iter().map(|p| p.1).fold(0.0, f64::max);
    Ok(LepingleReport { r, trials, length, max_variation_ratio, max_jump_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn real_trace(vals: &[f64]) -> Trace<f64> {
        Trace::new(
            (0..vals.len() as i64).collect(),
            vals.iter().map(|&x| Complex::new(x, 0.0)).collect(),
        )
        .unwrap()
    }

    /// Exhaustive supremum over all increasing subsequences (length <= 20).
    fn variation_exhaustive(vals: &[Complex<f64>], r: f64) -> f64 {
        let n = vals.len();
        let mut sup = 0.0f64;
        for mask in 0u32..(1 << n) {
            let picked: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            if picked.len() < 2 {
                continue;
            }
            let s: f64 = picked
                .windows(2)
                .map(|w| (vals[w[1]] - vals[w[0]]).norm().powf(r))
                .sum();
            sup = sup.max(s);
        }
        sup.powf(1.0 / r)
    }

    fn jumps_exhaustive(vals: &[Complex<f64>], lambda: f64) -> u64 {
        // longest chain i_0 < ... < i_K with consecutive gaps >= lambda
        let n = vals.len();
        let mut best = vec![0u64; n];
        let mut sup = 0;
        for j in 0..n {
            for i in 0..j {
                if (vals[j] - vals[i]).norm() >= lambda {
                    best[j] = best[j].max(best[i] + 1);
                }
            }
            sup = sup.max(best[j]);
        }
        sup
    }

    #[test]
    fn monotone_concentrates_into_one_jump() {
        assert!((variation(&real_trace(&[1.0, 2.0, 3.0]), 2.0).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn constant_trace_is_flat() {
        let t = real_trace(&[0.7; 9]);
        assert_eq!(variation(&t, 2.0).unwrap(), 0.0);
        assert_eq!(jump_count(&t, 0.1).unwrap(), 0);
    }

    #[test]
    fn dp_matches_exhaustive_search() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for trial in 0..500 {
            let n = rng.gen_range(2..=12);
            let vals: Vec<Complex<f64>> = (0..n)
                .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let r = rng.gen_range(1.0..4.0);
            let t = Trace::new((0..n as i64).collect(), vals.clone()).unwrap();
            let dp = variation(&t, r).unwrap();
            let ex = variation_exhaustive(&vals, r);
            assert!((dp - ex).abs() < 1e-9 * ex.max(1.0), "trial {trial}: {dp} vs {ex}");
        }
    }

    #[test]
    fn jumps_match_exhaustive_and_alternating_example() {
        let t = real_trace(&[0.0, 1.0, 0.0, 1.0, 0.0]);
        assert_eq!(jump_count(&t, 1.0).unwrap(), 4);

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..500 {
            let n = rng.gen_range(2..=12);
            let vals: Vec<Complex<f64>> = (0..n)
                .map(|_| Complex::new(rng.gen_range(-1.0..1.0), 0.0))
                .collect();
            let lambda = rng.gen_range(0.05..1.5);
            let t = Trace::new((0..n as i64).collect(), vals.clone()).unwrap();
            assert_eq!(jump_count(&t, lambda).unwrap(), jumps_exhaustive(&vals, lambda));
        }
    }

    #[test]
    fn jump_variation_chain_inequality() {
        let t = real_trace(&[0.0, 1.0, 0.0]);
        let v = variation(&t, 2.0).unwrap();
        assert_eq!(jump_count(&t, 1.0).unwrap(), 2);
        assert!((v * v - 2.0).abs() < 1e-12);
        assert!(1.0f64.powi(2) * 2.0 <= v * v + 1e-12);

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let n = rng.gen_range(2..=30);
            let vals: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let t = real_trace(&vals);
            let r = rng.gen_range(1.5..3.5);
            let v_r = variation(&t, r).unwrap().powf(r);
            for _ in 0..8 {
                let lambda: f64 = rng.gen_range(0.01..2.0);
                let k = jump_count(&t, lambda).unwrap() as f64;
                assert!(lambda.powf(r) * k <= v_r * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn minkowski_bound_for_vector_traces() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(19);
        for _ in 0..100 {
            let n = rng.gen_range(2..=10);
            let dim = rng.gen_range(1..=5);
            let vals: Vec<Vec<Complex<f64>>> = (0..n)
                .map(|_| {
                    (0..dim)
                        .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                        .collect()
                })
                .collect();
            let times: Vec<i64> = (0..n as i64).collect();
            let r = rng.gen_range(2.0..4.0);
            let vec_var = variation_vector(&times, &vals, r).unwrap();
            let comb: f64 = (0..dim)
                .map(|j| {
                    let comp: Vec<Complex<f64>> = vals.iter().map(|v| v[j]).collect();
                    let t = Trace::new(times.clone(), comp).unwrap();
                    variation(&t, r).unwrap().powi(2)
                })
                .sum::<f64>()
                .sqrt();
            assert!(vec_var <= comb * (1.0 + 1e-9), "{vec_var} > {comb}");
        }
    }

    #[test]
    fn variation_rejects_bad_inputs() {
        let t = real_trace(&[0.0, 1.0]);
        assert!(variation(&t, 0.5).is_err());
        let long = real_trace(&vec![0.0; VARIATION_LENGTH_CAP + 1]);
        assert!(matches!(variation(&long, 2.0), Err(Error::Capacity(_))));
        assert!(jump_count(&t, 0.0).is_err());
        assert!(Trace::<f64>::new(vec![0, 0], vec![Complex::new(0.0, 0.0); 2]).is_err());
    }

    #[test]
    fn martingale_identity_halving_and_tower() {
        let f = WeightSeries::<f64>::from_real("f", 3, vec![1.0, -2.0, 0.5, 4.0, 9.0]).unwrap();
        let e0 = dyadic_martingale(&f, 1, 0).unwrap();
        for n in f.indices() {
            assert_eq!(e0.get(n), f.get(n));
        }

        let ind = WeightSeries::<f64>::from_real("i", 0, vec![1.0]).unwrap();
        let e1 = dyadic_martingale(&ind, 1, 1).unwrap();
        assert_eq!(e1.start, 0);
        assert_eq!(e1.len(), 2);
        assert_eq!(e1.get(0).re, 0.5);
        assert_eq!(e1.get(1).re, 0.5);

        // tower property E_{k+1} E_k = E_{k+1}
        for k in 0..3u32 {
            let inner = dyadic_martingale(&f, 1, k).unwrap();
            let lhs = dyadic_martingale(&inner, 1, k + 1).unwrap();
            let rhs = dyadic_martingale(&f, 1, k + 1).unwrap();
            for n in rhs.indices() {
                assert!((lhs.get(n) - rhs.get(n)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn point_mass_martingale_trace_has_finite_variation() {
        let f = vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let traces = martingale_traces(&f);
        // at the mass point the trace is the decreasing sequence 1, 1/2, 1/4...
        assert_eq!(traces[0][0], 1.0);
        assert_eq!(traces[0][1], 0.5);
        assert_eq!(traces[0][2], 0.25);
        let v = scalar_variation(&traces[0], 3.0);
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn lepingle_constants_within_guard_band() {
        let rep = lepingle_check(200, 1 << 8, 3.0, 20_250_823).unwrap();
        let cap = 10.0 * 3.0 / (3.0 - 2.0);
        assert!(rep.max_variation_ratio <= cap, "{}", rep.max_variation_ratio);
        assert!(rep.max_jump_ratio <= cap, "{}", rep.max_jump_ratio);

        // stability under doubling the signal length
        let rep2 = lepingle_check(200, 1 << 9, 3.0, 20_250_823).unwrap();
        assert!(rep2.max_variation_ratio <= cap * 1.5);
    }
}
