//! Smallest-prime-factor sieve and the arithmetic weight families built
//! from it: Lambda, tau, r_2, mu, phi.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::WeightSeries;

/// Smallest-prime-factor table for `[2, limit]`.
#[derive(Debug, Clone)]
pub struct FactorSieve {
    pub limit: usize,
    spf: Vec<u32>,
}

pub fn build_sieve(limit: usize) -> Result<FactorSieve> {
    if limit < 2 {
        return Err(Error::invalid("sieve limit must be at least 2"));
    }
    let mut spf = vec![0u32; limit + 1];
    for i in 2..=limit {
        if spf[i] == 0 {
            let mut j = i;
            while j <= limit {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    Ok(FactorSieve { limit, spf })
}

impl FactorSieve {
    pub fn spf(&self, n: usize) -> u32 {
        debug_assert!((2..=self.limit).contains(&n));
        self.spf[n]
    }

    /// Prime factorization as (p, exponent) pairs, p ascending.
    pub fn factorize(&self, mut n: usize) -> Vec<(u32, u32)> {
        assert!(n >= 1 && n <= self.limit);
        let mut out = Vec::new();
        while n > 1 {
            let p = self.spf[n];
            let mut e = 0;
            while n % p as usize == 0 {
                n /= p as usize;
                e += 1;
            }
            out.push((p, e));
        }
        out
    }

    pub fn is_prime(&self, n: usize) -> bool {
        n >= 2 && self.spf[n] as usize == n
    }

    fn check_window(&self, n: usize) -> Result<()> {
        if n > self.limit {
            Err(Error::invalid(format!("window {n} exceeds sieve limit {}", self.limit)))
        } else {
            Ok(())
        }
    }
}

/// Lambda(n) = log p on prime powers p^k, zero otherwise; window [1, N].
pub fn von_mangoldt_series<T: Scalar>(sieve: &FactorSieve, n_max: usize) -> Result<WeightSeries<T>> {
    sieve.check_window(n_max)?;
    let mut values = vec![T::zero(); n_max];
    for n in 2..=n_max {
        let p = sieve.spf[n] as usize;
        // n = p^k exactly when dividing out p leaves no other prime
        let mut m = n;
        while m % p == 0 {
            m /= p;
        }
        if m == 1 {
            values[n - 1] = T::from_f64_c((p as f64).ln());
        }
    }
    WeightSeries::from_real("mangoldt", 1, values)
}

/// tau(n) by the harmonic divisor sweep, O(N log N); window [1, N].
pub fn divisor_series<T: Scalar>(n_max: usize) -> Result<WeightSeries<T>> {
    if n_max < 1 {
        return Err(Error::invalid("divisor series needs N >= 1"));
    }
    let mut counts = vec![0u32; n_max + 1];
    for d in 1..=n_max {
        let mut m = d;
        while m <= n_max {
            counts[m] += 1;
            m += d;
        }
    }
    WeightSeries::from_real(
        "divisor",
        1,
        counts[1..].iter().map(|&c| T::from_f64_c(c as f64)).collect(),
    )
}

/// r_2(n) = ordered pairs (a, b) in Z^2 with a^2 + b^2 = n; lattice sweep,
/// window [0, N].
pub fn two_squares_series<T: Scalar>(n_max: usize) -> Result<WeightSeries<T>> {
    let mut counts = vec![0u32; n_max + 1];
    let bound = (n_max as f64).sqrt() as i64 + 1;
    for a in -bound..=bound {
        let aa = (a * a) as usize;
        if aa > n_max {
            continue;
        }
        for b in -bound..=bound {
            let s = aa + (b * b) as usize;
            if s <= n_max && (b * b) as usize <= n_max {
                counts[s] += 1;
            }
        }
    }
    WeightSeries::from_real(
        "two_squares",
        0,
        counts.iter().map(|&c| T::from_f64_c(c as f64)).collect(),
    )
}

/// (mu, phi) on [1, N], both via the factor sieve.
pub fn mobius_totient_series<T: Scalar>(
    sieve: &FactorSieve,
    n_max: usize,
) -> Result<(WeightSeries<T>, WeightSeries<T>)> {
    sieve.check_window(n_max)?;
    let (mu, phi) = mobius_totient_tables(sieve, n_max);
    let mu_series = WeightSeries::from_real(
        "mobius",
        1,
        mu.iter().map(|&m| T::from_f64_c(m as f64)).collect(),
    )?;
    let phi_series = WeightSeries::from_real(
        "totient",
        1,
        phi.iter().map(|&p| T::from_f64_c(p as f64)).collect(),
    )?;
    Ok((mu_series, phi_series))
}

/// Integer-valued (mu, phi) tables on [1, N] (index 0 holds n = 1).
pub fn mobius_totient_tables(sieve: &FactorSieve, n_max: usize) -> (Vec<i8>, Vec<u64>) {
    let mut mu = vec![0i8; n_max];
    let mut phi = vec![0u64; n_max];
    if n_max >= 1 {
        mu[0] = 1;
        phi[0] = 1;
    }
    for n in 2..=n_max {
        let mut m = n;
        let mut mu_n = 1i8;
        let mut phi_n = 1u64;
        while m > 1 {
            let p = sieve.spf[m] as usize;
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            if e > 1 {
                mu_n = 0;
            } else {
                mu_n = -mu_n;
            }
            phi_n *= (p as u64 - 1) * (p as u64).pow(e - 1);
        }
        mu[n - 1] = mu_n;
        phi[n - 1] = phi_n;
    }
    (mu, phi)
}

pub fn primes_upto(sieve: &FactorSieve, n_max: usize) -> Result<Vec<u64>> {
    sieve.check_window(n_max)?;
    Ok((2..=n_max).filter(|&n| sieve.is_prime(n)).map(|n| n as u64).collect())
}

/// Restriction of a series to [lo, hi] as a fresh window.
pub fn window<T: Scalar>(s: &WeightSeries<T>, lo: i64, hi: i64) -> Result<WeightSeries<T>> {
    if lo > hi {
        return Err(Error::invalid("empty window"));
    }
    let values: Vec<Complex<T>> = (lo..=hi).map(|n| s.get(n)).collect();
    WeightSeries::new(s.label.clone(), lo, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spf_examples() {
        let s = build_sieve(100).unwrap();
        assert_eq!(s.spf(9), 3);
        assert_eq!(s.spf(7), 7);
        // trial-division oracle for 91
        let mut d = 2;
        while 91 % d != 0 {
            d += 1;
        }
        assert_eq!(s.spf(91), d);
        assert!(build_sieve(1).is_err());
    }

    #[test]
    fn spf_invariants() {
        let s = build_sieve(2000).unwrap();
        for n in 2..=2000usize {
            let p = s.spf(n) as usize;
            assert!(s.is_prime(p));
            assert_eq!(n % p, 0);
            assert!(p * p <= n || p == n);
        }
    }

    #[test]
    fn von_mangoldt_examples() {
        let s = build_sieve(100).unwrap();
        let lam = von_mangoldt_series::<f64>(&s, 100).unwrap();
        assert!((lam.get(8).re - 2f64.ln()).abs() < 1e-15);
        assert_eq!(lam.get(6).re, 0.0);
        assert_eq!(lam.get(1).re, 0.0);
        assert!(von_mangoldt_series::<f64>(&s, 101).is_err());
    }

    #[test]
    fn chebyshev_identity() {
        // sum_{d | n} Lambda(d) = log n
        let n_max = 10_000;
        let s = build_sieve(n_max).unwrap();
        let lam = von_mangoldt_series::<f64>(&s, n_max).unwrap();
        let mut acc = vec![0.0f64; n_max + 1];
        for d in 2..=n_max {
            let v = lam.get(d as i64).re;
            if v != 0.0 {
                let mut m = d;
                while m <= n_max {
                    acc[m] += v;
                    m += d;
                }
            }
        }
        for n in 2..=n_max {
            let expect = (n as f64).ln();
            assert!((acc[n] - expect).abs() <= 1e-9 * expect.abs().max(1.0));
        }
    }

    #[test]
    fn divisor_examples_and_oracle() {
        let tau = divisor_series::<f64>(1000).unwrap();
        assert_eq!(tau.get(1).re, 1.0);
        assert_eq!(tau.get(12).re, 6.0);
        // O(N^2) double-loop oracle for the summatory function
        let mut oracle = 0u64;
        for n in 1..=1000u64 {
            for d in 1..=n {
                if n % d == 0 {
                    oracle += 1;
                }
            }
        }
        let total: f64 = tau.values.iter().map(|v| v.re).sum();
        assert_eq!(total as u64, oracle);
    }

    #[test]
    fn divisor_matches_factorization() {
        let n_max = 10_000;
        let s = build_sieve(n_max).unwrap();
        let tau = divisor_series::<f64>(n_max).unwrap();
        for n in 1..=n_max {
            let from_spf: u32 = s.factorize(n).iter().map(|&(_, e)| e + 1).product();
            assert_eq!(tau.get(n as i64).re as u32, from_spf, "n={n}");
        }
    }

    #[test]
    fn two_squares_examples() {
        let r2 = two_squares_series::<f64>(100).unwrap();
        assert_eq!(r2.get(0).re, 1.0);
        assert_eq!(r2.get(5).re, 8.0);
        assert_eq!(r2.get(3).re, 0.0);
        assert_eq!(r2.get(25).re, 12.0);
    }

    #[test]
    fn two_squares_matches_divisor_formula() {
        // r_2(n) = 4 (d_1(n) - d_3(n)), divisors mod 4
        let n_max = 10_000;
        let r2 = two_squares_series::<f64>(n_max).unwrap();
        let mut d1 = vec![0i64; n_max + 1];
        let mut d3 = vec![0i64; n_max + 1];
        for d in (1..=n_max).step_by(2) {
            let target = if d % 4 == 1 { &mut d1 } else { &mut d3 };
            let mut m = d;
            while m <= n_max {
                target[m] += 1;
                m += d;
            }
        }
        for n in 1..=n_max {
            assert_eq!(r2.get(n as i64).re as i64, 4 * (d1[n] - d3[n]), "n={n}");
        }
    }

    #[test]
    fn mobius_totient_examples() {
        let s = build_sieve(100).unwrap();
        let (mu, phi) = mobius_totient_series::<f64>(&s, 100).unwrap();
        assert_eq!(mu.get(6).re, 1.0);
        assert_eq!(phi.get(6).re, 2.0);
        assert_eq!(mu.get(12).re, 0.0);
        assert_eq!(mu.get(30).re, -1.0);
    }

    #[test]
    fn mobius_totient_divisor_sums() {
        let n_max = 3000;
        let s = build_sieve(n_max).unwrap();
        let (mu, phi) = mobius_totient_tables(&s, n_max);
        for n in 1..=n_max {
            let mut mu_sum = 0i64;
            let mut phi_sum = 0u64;
            for d in 1..=n {
                if n % d == 0 {
                    mu_sum += mu[d - 1] as i64;
                    phi_sum += phi[d - 1];
                }
            }
            assert_eq!(mu_sum, i64::from(n == 1));
            assert_eq!(phi_sum, n as u64);
        }
    }

    #[test]
    fn primes_examples() {
        let s = build_sieve(1_000_000).unwrap();
        let p10 = primes_upto(&s, 10).unwrap();
        assert_eq!(p10, vec![2, 3, 5, 7]);
        assert_eq!(p10[3], 7);
        // independent odd-only sieve oracle for pi(10^6)
        let n = 1_000_000usize;
        let mut comp = vec![false; (n - 1) / 2]; // odd numbers 3, 5, ..., n - 1
        let mut i = 3usize;
        while i * i <= n {
            if !comp[i / 2 - 1] {
                let mut j = i * i;
                while j <= n {
                    if j % 2 == 1 {
                        comp[j / 2 - 1] = true;
                    }
                    j += 2 * i;
                }
            }
            i += 2;
        }
        let oracle = 1 + comp.iter().filter(|&&c| !c).count();
        assert_eq!(oracle, 78_498);
        assert_eq!(primes_upto(&s, n).unwrap().len(), 78_498);
    }
}
