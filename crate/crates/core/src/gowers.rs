//! Gowers uniformity norms U^s for finitely supported complex sequences:
//! a brute-force definition-chasing oracle, FFT-accelerated U^2, the
//! foliated U^3, and normalization over [N].

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::{autocorrelation_fourth_moment, next_pow2, FftPlan};
use crate::scalar::Scalar;
use crate::series::WeightSeries;

pub const BRUTE_SUPPORT_CAP: usize = 256;
pub const U3_SUPPORT_CAP: usize = 1 << 20;

/// Values within this distance below zero are treated as rounding noise.
const NEGATIVE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GowersResult<T: Scalar> {
    pub s: u32,
    /// ||f||_{U^s(Z)}^{2^s}.
    pub raw_power: T,
    /// ||f||_{U^s([N])} with N the support length, exact denominator.
    pub normalized: T,
    /// Set when a slightly negative raw power was clamped to zero.
    pub clamped: bool,
}

/// Delta_h f(x) = f(x) conj(f(x+h)).
pub fn difference<T: Scalar>(f: &WeightSeries<T>, h: i64) -> WeightSeries<T> {
    f.conj_difference(h)
}

fn clamp_raw<T: Scalar>(raw: T) -> (T, bool) {
    if raw < T::zero() {
        debug_assert!(raw > -T::from_f64_c(NEGATIVE_FLOOR));
        (T::zero(), true)
    } else {
        (raw, false)
    }
}

fn sum_values<T: Scalar>(values: &[Complex<T>]) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for v in values {
        acc = acc + *v;
    }
    acc
}

/// Raw 2^s power by direct summation over difference tuples; the oracle
/// route, no transforms anywhere.
fn brute_raw<T: Scalar>(f: &WeightSeries<T>, s: u32) -> T {
    // ||g||_{U^1}^2 = |sum g|^2 applied after s-1 explicit differences
    match s {
        1 => sum_values(&f.values).norm_sqr(),
        _ => {
            let n = f.len() as i64;
            let mut acc = T::zero();
            for h in -(n - 1)..n {
                acc += brute_raw(&f.conj_difference(h), s - 1);
            }
            acc
        }
    }
}

pub fn u_norm_brute<T: Scalar>(f: &WeightSeries<T>, s: u32) -> Result<GowersResult<T>> {
    if !(1..=3).contains(&s) {
        return Err(Error::invalid("brute Gowers norm supports s in {1,2,3}"));
    }
    if f.len() > BRUTE_SUPPORT_CAP {
        return Err(Error::capacity(format!(
            "brute oracle capped at support {BRUTE_SUPPORT_CAP}, got {}",
            f.len()
        )));
    }
    let (raw, clamped) = clamp_raw(brute_raw(f, s));
    let denom = brute_raw(&indicator::<T>(f.len()), s);
    Ok(GowersResult {
        s,
        raw_power: raw,
        normalized: normalize(raw, denom, s),
        clamped,
    })
}

fn indicator<T: Scalar>(n: usize) -> WeightSeries<T> {
    WeightSeries::from_real("indicator", 1, vec![T::one(); n]).expect("n >= 1")
}

fn normalize<T: Scalar>(raw: T, denom: T, s: u32) -> T {
    let exponent = T::one() / T::from_f64_c((1u64 << s) as f64);
    (raw / denom).powf(exponent)
}

/// ||f||_{U^2(Z)}^4 via the L^4 integral of the Fourier transform,
/// computed as the fourth moment of a zero-padded transform.
pub fn u2_fft<T: Scalar>(f: &WeightSeries<T>) -> GowersResult<T> {
    let plan = FftPlan::forward(next_pow2(2 * f.len()));
    let raw = autocorrelation_fourth_moment(&plan, &f.values);
    let denom = u2_indicator_raw::<T>(f.len());
    let (raw, clamped) = clamp_raw(raw);
    GowersResult { s: 2, raw_power: raw, normalized: normalize(raw, denom, 2), clamped }
}

/// Closed form ||1_{[N]}||_{U^2(Z)}^4 = (2N^3 + N)/3.
pub fn u2_indicator_raw<T: Scalar>(n: usize) -> T {
    let n = T::from_usize_c(n);
    let two = T::one() + T::one();
    let three = two + T::one();
    (two * n * n * n + n) / three
}

/// ||f||_{U^3(Z)}^8 by foliation: sum_h ||Delta_h f||_{U^2(Z)}^4, each layer
/// through the FFT route.
pub fn u3_fft<T: Scalar>(f: &WeightSeries<T>) -> Result<GowersResult<T>> {
    if f.len() > U3_SUPPORT_CAP {
        return Err(Error::capacity(format!(
            "u3_fft capped at support {U3_SUPPORT_CAP}, got {}",
            f.len()
        )));
    }
    let denom = u3_raw_unchecked(&indicator::<T>(f.len()));
    let (raw, clamped) = clamp_raw(u3_raw_unchecked(f));
    Ok(GowersResult { s: 3, raw_power: raw, normalized: normalize(raw, denom, 3), clamped })
}

fn u3_raw_unchecked<T: Scalar>(f: &WeightSeries<T>) -> T {
    let n = f.len() as i64;
    let plan = FftPlan::forward(next_pow2(2 * f.len()));
    // parallel over h; collection preserves h order so the reduction is
    // reproducible regardless of thread count
    let layers: Vec<T> = (-(n - 1)..n)
        .into_par_iter()
        .map(|h| {
            let diff = f.conj_difference(h);
            autocorrelation_fourth_moment(&plan, &diff.values)
        })
        .collect();
    layers.into_iter().sum()
}

/// ||f||_{U^s([N])} against the exact indicator denominator on [N].
pub fn normalized_u<T: Scalar>(f: &WeightSeries<T>, s: u32, n: usize) -> Result<T> {
    if n == 0 {
        return Err(Error::invalid("normalization window must be positive"));
    }
    let ind = indicator::<T>(n);
    let (raw, denom) = match s {
        1 => (brute_raw(f, 1), brute_raw(&ind, 1)),
        2 => (u2_fft(f).raw_power, u2_fft(&ind).raw_power),
        3 => (u3_fft(f)?.raw_power, u3_fft(&ind)?.raw_power),
        _ => return Err(Error::invalid("normalized_u supports s in {1,2,3}")),
    };
    Ok(normalize(raw, denom, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::unit_phase;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_series(rng: &mut StdRng, len: usize) -> WeightSeries<f64> {
        let values = (0..len)
            .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        WeightSeries::new("rand", 1, values).unwrap()
    }

    #[test]
    fn difference_examples() {
        let f = WeightSeries::new("f", 1, vec![Complex::new(1.0, 0.0), Complex::new(0.0, 1.0)])
            .unwrap();
        let d0 = difference(&f, 0);
        assert_eq!(d0.get(1).re, 1.0);
        assert_eq!(d0.get(2).re, 1.0);
        assert_eq!(d0.get(2).im, 0.0);

        // Delta_h of a character has constant phase e(-theta h)
        let theta = 0.23;
        let g = WeightSeries::new(
            "char",
            1,
            (1..=32).map(|k| unit_phase(theta * k as f64)).collect(),
        )
        .unwrap();
        let dh = difference(&g, 3);
        let expect = unit_phase(-theta * 3.0);
        for n in dh.indices() {
            assert!((dh.get(n) - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn point_mass_is_one_for_all_orders() {
        let f = WeightSeries::from_real("pm", 1, vec![1.0f64]).unwrap();
        for s in 1..=3 {
            let r = u_norm_brute(&f, s).unwrap();
            assert!((r.raw_power - 1.0).abs() < 1e-12);
        }
        assert!((u2_fft(&f).raw_power - 1.0).abs() < 1e-12);
        assert!((u3_fft(&f).unwrap().raw_power - 1.0).abs() < 1e-12);
    }

    #[test]
    fn indicator_of_two_has_u2_raw_six() {
        let f = WeightSeries::from_real("i2", 1, vec![1.0f64, 1.0]).unwrap();
        assert!((u_norm_brute(&f, 2).unwrap().raw_power - 6.0).abs() < 1e-12);
        assert!((u2_fft(&f).raw_power - 6.0).abs() < 1e-12);
    }

    #[test]
    fn u2_closed_form_for_indicators() {
        for n in 1..=64usize {
            let f = indicator::<f64>(n);
            let expect = (2 * n * n * n + n) as f64 / 3.0;
            let got = u2_fft(&f).raw_power;
            assert!((got - expect).abs() < 1e-8 * expect, "n={n}");
            assert!((u2_indicator_raw::<f64>(n) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn fft_matches_brute_oracle() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..25 {
            let f = random_series(&mut rng, 64);
            let brute = u_norm_brute(&f, 2).unwrap().raw_power;
            let fast = u2_fft(&f).raw_power;
            assert!((fast - brute).abs() <= 1e-9 * brute.max(1.0));
        }
        for _ in 0..25 {
            let f = random_series(&mut rng, 32);
            let brute = u_norm_brute(&f, 3).unwrap().raw_power;
            let fast = u3_fft(&f).unwrap().raw_power;
            assert!((fast - brute).abs() <= 1e-8 * brute.max(1.0));
        }
    }

    #[test]
    fn modulation_invariance() {
        let mut rng = StdRng::seed_from_u64(11);
        let f = random_series(&mut rng, 128);
        for _ in 0..5 {
            let theta: f64 = rng.gen_range(0.0..1.0);
            let modulated = WeightSeries::new(
                "mod",
                1,
                f.values
                    .iter()
                    .enumerate()
                    .map(|(k, v)| v * unit_phase(theta * (k as f64 + 1.0)))
                    .collect(),
            )
            .unwrap();
            for s in [2u32, 3] {
                let a = normalized_u(&f, s, 128).unwrap();
                let b = normalized_u(&modulated, s, 128).unwrap();
                assert!((a - b).abs() < 1e-9, "s={s} theta={theta}");
            }
        }
    }

    #[test]
    fn u2_bounded_by_u3_for_one_bounded() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..20 {
            let values: Vec<Complex<f64>> = (0..48)
                .map(|_| unit_phase(rng.gen_range(0.0..1.0)))
                .collect();
            let f = WeightSeries::new("ob", 1, values).unwrap();
            let u2 = normalized_u(&f, 2, 48).unwrap();
            let u3 = normalized_u(&f, 3, 48).unwrap();
            assert!(u2 <= u3 * (1.0 + 1e-9), "{u2} > {u3}");
        }
    }

    #[test]
    fn u1_is_phase_invariant_square_of_mean_sum() {
        let mut rng = StdRng::seed_from_u64(5);
        let f = random_series(&mut rng, 40);
        let direct: Complex<f64> = f.values.iter().sum();
        let r = u_norm_brute(&f, 1).unwrap();
        assert!((r.raw_power - direct.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn capacity_errors() {
        let f = indicator::<f64>(300);
        assert!(matches!(u_norm_brute(&f, 3), Err(Error::Capacity(_))));
    }

    #[test]
    fn normalized_indicator_is_exactly_one() {
        for n in [1usize, 7, 33] {
            let f = indicator::<f64>(n);
            assert!((normalized_u(&f, 2, n).unwrap() - 1.0).abs() < 1e-12);
            assert!((normalized_u(&f, 3, n).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn f32_instantiation_smoke() {
        let f = WeightSeries::<f32>::from_real("i", 1, vec![1.0, 1.0]).unwrap();
        assert!((u2_fft(&f).raw_power - 6.0).abs() < 1e-3);
    }
}
