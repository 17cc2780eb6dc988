//! Exact rational frequency sets: the Farey slices Gamma_Q and their dyadic
//! refinements, Ramanujan sums, quadratic Gauss sums, and the sumset
//! multiplicity counter.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::Ratio;
use serde_json::json;

use crate::error::{Error, Result};
use crate::scalar::{unit_phase, Scalar};

/// Default cap on the decimal size of slice lcms; they grow like 3^Q.
pub const DEFAULT_LCM_DIGIT_CAP: usize = 4096;

/// A reduced fraction a/q with 0 <= a < q and gcd(a, q) = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedFraction {
    pub a: u64,
    pub q: u64,
}

impl ReducedFraction {
    pub fn new(a: u64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::invalid("zero denominator"));
        }
        let a = a % q;
        if a.gcd(&q) != 1 {
            return Err(Error::invalid(format!("{a}/{q} is not reduced")));
        }
        Ok(Self { a, q })
    }

    pub fn as_scalar<T: Scalar>(&self) -> T {
        T::from_f64_c(self.a as f64) / T::from_f64_c(self.q as f64)
    }
}

/// Gamma_Q: all reduced a/q with Q/2 < q <= Q, with lcm of the denominators.
#[derive(Debug, Clone)]
pub struct FareySlice {
    pub q_bound: u64,
    pub fractions: Vec<ReducedFraction>,
    pub lcm: BigInt,
}

/// Gamma_Q^(i): the sub-slice where 2^i exactly divides the denominator.
#[derive(Debug, Clone)]
pub struct DyadicFareySlice {
    pub q_bound: u64,
    pub i: u32,
    pub fractions: Vec<ReducedFraction>,
    pub lcm: BigInt,
}

fn fractions_for_denominators(qs: impl Iterator<Item = u64>) -> Vec<ReducedFraction> {
    let mut out = Vec::new();
    for q in qs {
        for a in 0..q.max(1) {
            if a.gcd(&q) == 1 {
                out.push(ReducedFraction { a, q });
            }
        }
    }
    out.sort();
    out
}

fn capped_lcm(qs: impl Iterator<Item = u64>, digit_cap: usize) -> Result<BigInt> {
    let mut lcm = BigInt::from(1u32);
    for q in qs {
        lcm = lcm.lcm(&BigInt::from(q));
        // ~3.33 bits per decimal digit
        if lcm.bits() as usize > digit_cap * 4 {
            return Err(Error::capacity(format!(
                "slice lcm exceeds {digit_cap} decimal digits"
            )));
        }
    }
    Ok(lcm)
}

fn slice_denominators(q_bound: u64) -> impl Iterator<Item = u64> {
    (q_bound / 2 + 1)..=q_bound
}

pub fn farey_slice(q_bound: u64) -> Result<FareySlice> {
    farey_slice_with_cap(q_bound, DEFAULT_LCM_DIGIT_CAP)
}

pub fn farey_slice_with_cap(q_bound: u64, digit_cap: usize) -> Result<FareySlice> {
    if q_bound < 1 {
        return Err(Error::invalid("Q must be at least 1"));
    }
    Ok(FareySlice {
        q_bound,
        fractions: fractions_for_denominators(slice_denominators(q_bound)),
        lcm: capped_lcm(slice_denominators(q_bound), digit_cap)?,
    })
}

pub fn farey_dyadic_slice(q_bound: u64, i: u32) -> Result<DyadicFareySlice> {
    farey_dyadic_slice_with_cap(q_bound, i, DEFAULT_LCM_DIGIT_CAP)
}

pub fn farey_dyadic_slice_with_cap(
    q_bound: u64,
    i: u32,
    digit_cap: usize,
) -> Result<DyadicFareySlice> {
    if q_bound < 1 {
        return Err(Error::invalid("Q must be at least 1"));
    }
    if i > q_bound.ilog2() {
        return Err(Error::invalid(format!("need i <= log2(Q), got i={i}, Q={q_bound}")));
    }
    let qs = move || slice_denominators(q_bound).filter(move |&q| exact_dyadic_valuation(q) == i);
    Ok(DyadicFareySlice {
        q_bound,
        i,
        fractions: fractions_for_denominators(qs()),
        lcm: capped_lcm(qs(), digit_cap)?,
    })
}

fn exact_dyadic_valuation(q: u64) -> u32 {
    q.trailing_zeros()
}

pub fn slice_to_json(q_bound: u64, i: Option<u32>, fractions: &[ReducedFraction], lcm: &BigInt) -> serde_json::Value {
    let fr: Vec<[u64; 2]> = fractions.iter().map(|f| [f.a, f.q]).collect();
    match i {
        Some(i) => json!({"Q": q_bound, "i": i, "fractions": fr, "lcm": lcm.to_string()}),
        None => json!({"Q": q_bound, "fractions": fr, "lcm": lcm.to_string()}),
    }
}

/// Trial-division mu and phi for a single argument.
pub fn mu_phi(mut n: u64) -> (i64, u64) {
    let mut mu = 1i64;
    let mut phi = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            if e > 1 {
                mu = 0;
            } else {
                mu = -mu;
            }
            phi *= (p - 1) * p.pow(e - 1);
        }
        p += 1;
    }
    if n > 1 {
        mu = -mu;
        phi *= n - 1;
    }
    (mu, phi)
}

/// Ramanujan sum c_q(n) by the classical closed form
/// mu(q/g) phi(q) / phi(q/g), g = gcd(n, q); always an integer.
pub fn ramanujan_sum(q: u64, n: i64) -> Result<i64> {
    if q == 0 {
        return Err(Error::invalid("c_q(n) needs q >= 1"));
    }
    let n_mod = n.rem_euclid(q as i64) as u64;
    let g = n_mod.gcd(&q);
    let (mu_qg, phi_qg) = mu_phi(q / g);
    let (_, phi_q) = mu_phi(q);
    debug_assert_eq!(phi_q % phi_qg, 0);
    Ok(mu_qg * (phi_q / phi_qg) as i64)
}

/// Direct unit sum c_q(n) = sum_{(a,q)=1} e(a n / q); reference evaluator
/// for the closed form above.
pub fn ramanujan_sum_direct<T: Scalar>(q: u64, n: i64) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for a in 0..q.max(1) {
        if a.gcd(&q) == 1 {
            let t = T::from_f64_c((a as i64 * n.rem_euclid(q as i64)) as f64)
                / T::from_f64_c(q as f64);
            acc = acc + unit_phase(t);
        }
    }
    acc
}

/// G(a/q)^2 in closed form; requires gcd(a, q) = 1.
pub fn gauss_sum_squared<T: Scalar>(a: u64, q: u64) -> Result<Complex<T>> {
    if q == 0 || (a % q.max(1)).gcd(&q) != 1 {
        return Err(Error::invalid(format!("gauss sum needs gcd(a,q)=1, got {a}/{q}")));
    }
    let inv_q = T::one() / T::from_f64_c(q as f64);
    Ok(if q % 2 == 1 {
        let sign = if (q - 1) / 2 % 2 == 0 { T::one() } else { -T::one() };
        Complex::new(sign * inv_q, T::zero())
    } else if q % 4 == 2 {
        Complex::new(T::zero(), T::zero())
    } else {
        // q = 0 mod 4 forces a odd through gcd(a, q) = 1
        debug_assert_eq!(a % 2, 1);
        let sign = if (a - 1) / 2 % 2 == 0 { T::one() } else { -T::one() };
        let two = T::one() + T::one();
        Complex::new(T::zero(), -two * sign * inv_q)
    })
}

/// Direct evaluator G(a/q) = (1/q) sum_{r <= q} e(-r^2 a / q).
pub fn gauss_sum_direct<T: Scalar>(a: u64, q: u64) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for r in 1..=q {
        let rr = (r % q) * (r % q) % q;
        let t = -T::from_f64_c((rr * (a % q)) as f64) / T::from_f64_c(q as f64);
        acc = acc + unit_phase(t);
    }
    acc / T::from_f64_c(q as f64)
}

/// Exact rational residue mod 1 as a reduced Ratio<i128>.
fn rational_mod_one(num: i128, den: i128) -> Result<Ratio<i128>> {
    if den == 0 {
        return Err(Error::capacity("zero denominator in rational reduction"));
    }
    let r = num.rem_euclid(den);
    Ok(Ratio::new(r, den))
}

/// Multiplicity table of the sumset m * Lambda + n * Gamma_Q^(i) mod 1.
///
/// Lambda is given as numerators over the common denominator m0; everything
/// is exact i128 rational arithmetic, no floating point.
pub fn multiplicity_count(
    lambda_numerators: &[u64],
    m0: u64,
    slice: &DyadicFareySlice,
    m: i64,
    n: i64,
) -> Result<(HashMap<Ratio<i128>, u64>, u64)> {
    if m.unsigned_abs() > 10 || n.unsigned_abs() > 10 {
        return Err(Error::invalid("multiplicity count expects |m|, |n| <= 10"));
    }
    if m0 == 0 {
        return Err(Error::invalid("m0 must be positive"));
    }
    let mut table: HashMap<Ratio<i128>, u64> = HashMap::new();
    for &k in lambda_numerators {
        if k >= m0 {
            return Err(Error::invalid("lambda numerator out of range [0, m0)"));
        }
        for frac in &slice.fractions {
            // m*k/m0 + n*a/q over the common denominator m0*q
            let den = (m0 as i128)
                .checked_mul(frac.q as i128)
                .ok_or_else(|| Error::capacity("rational denominator overflow"))?;
            let t1 = (m as i128)
                .checked_mul(k as i128)
                .and_then(|x| x.checked_mul(frac.q as i128))
                .ok_or_else(|| Error::capacity("rational numerator overflow"))?;
            let t2 = (n as i128)
                .checked_mul(frac.a as i128)
                .and_then(|x| x.checked_mul(m0 as i128))
                .ok_or_else(|| Error::capacity("rational numerator overflow"))?;
            let num = t1
                .checked_add(t2)
                .ok_or_else(|| Error::capacity("rational numerator overflow"))?;
            let xi = rational_mod_one(num, den)?;
            *table.entry(xi).or_insert(0) += 1;
        }
    }
    let max = table.values().copied().max().unwrap_or(0);
    Ok((table, max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slice_examples() {
        let g4 = farey_slice(4).unwrap();
        let denoms: std::collections::BTreeSet<u64> = g4.fractions.iter().map(|f| f.q).collect();
        assert_eq!(denoms.into_iter().collect::<Vec<_>>(), vec![3, 4]);
        assert_eq!(g4.fractions.len(), 4); // phi(3) + phi(4)
        assert_eq!(g4.lcm, BigInt::from(12));

        let g42 = farey_dyadic_slice(4, 2).unwrap();
        assert_eq!(
            g42.fractions,
            vec![ReducedFraction { a: 1, q: 4 }, ReducedFraction { a: 3, q: 4 }]
        );
        assert_eq!(g42.lcm, BigInt::from(4));

        let g2 = farey_slice(2).unwrap();
        assert_eq!(g2.fractions, vec![ReducedFraction { a: 1, q: 2 }]);
        assert_eq!(g2.lcm, BigInt::from(2));
    }

    #[test]
    fn dyadic_slices_partition_gamma_q() {
        for q_bound in 1..=64u64 {
            let full = farey_slice(q_bound).unwrap();
            let mut seen = Vec::new();
            for i in 0..=q_bound.ilog2() {
                let slice = farey_dyadic_slice(q_bound, i).unwrap();
                for f in &slice.fractions {
                    assert_eq!(exact_dyadic_valuation(f.q), i);
                }
                // cardinality bound |Gamma_Q^(i)| <= Q^2 / 2^i
                assert!(
                    (slice.fractions.len() as u64) * (1 << i) <= q_bound * q_bound,
                    "Q={q_bound} i={i}"
                );
                seen.extend(slice.fractions.iter().copied());
            }
            seen.sort();
            let mut dedup = seen.clone();
            dedup.dedup();
            assert_eq!(seen.len(), dedup.len(), "overlap at Q={q_bound}");
            assert_eq!(seen, full.fractions, "union mismatch at Q={q_bound}");
        }
    }

    #[test]
    fn lcm_cap_fails_loudly() {
        assert!(matches!(
            farey_slice_with_cap(64, 2),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn ramanujan_examples() {
        assert_eq!(ramanujan_sum(6, 0).unwrap(), 2); // phi(6)
        assert_eq!(ramanujan_sum(2, 1).unwrap(), -1);
        assert_eq!(ramanujan_sum(6, 4).unwrap(), -1);
    }

    #[test]
    fn ramanujan_closed_form_matches_direct_sum() {
        for q in 1..=60u64 {
            for n in 0..q as i64 {
                let direct = ramanujan_sum_direct::<f64>(q, n);
                let closed = ramanujan_sum(q, n).unwrap() as f64;
                assert!(direct.im.abs() < 1e-9);
                assert!((direct.re - closed).abs() < 1e-9, "q={q} n={n}");
            }
        }
    }

    #[test]
    fn gauss_sum_examples() {
        let g13 = gauss_sum_squared::<f64>(1, 3).unwrap();
        assert!((g13 - Complex::new(-1.0 / 3.0, 0.0)).norm() < 1e-15);
        let g12 = gauss_sum_squared::<f64>(1, 2).unwrap();
        assert_eq!(g12, Complex::new(0.0, 0.0));
        let g14 = gauss_sum_squared::<f64>(1, 4).unwrap();
        assert!((g14 - Complex::new(0.0, -0.5)).norm() < 1e-15);
        assert!(gauss_sum_squared::<f64>(2, 4).is_err());
    }

    #[test]
    fn gauss_closed_form_matches_direct_square() {
        for q in 1..=60u64 {
            for a in 0..q.max(1) {
                if a.gcd(&q) != 1 {
                    continue;
                }
                let direct = gauss_sum_direct::<f64>(a, q);
                let closed = gauss_sum_squared::<f64>(a, q).unwrap();
                assert!((direct * direct - closed).norm() < 1e-9, "a={a} q={q}");
            }
        }
    }

    #[test]
    fn multiplicity_injective_shift() {
        let slice = farey_dyadic_slice(4, 2).unwrap();
        let (_, max) = multiplicity_count(&[0], 8, &slice, 1, 1).unwrap();
        assert_eq!(max, 1);
    }

    #[test]
    fn multiplicity_matches_bruteforce() {
        // Lambda = {k/8 : 0 <= k < 8}, Q=4, i=2, (m,n)=(1,1)
        let slice = farey_dyadic_slice(4, 2).unwrap();
        let lambda: Vec<u64> = (0..8).collect();
        let (table, max) = multiplicity_count(&lambda, 8, &slice, 1, 1).unwrap();
        // exhaustive pairing oracle over a fine common grid (denominator 8*4)
        let mut counts: HashMap<i64, u64> = HashMap::new();
        for &k in &lambda {
            for f in &slice.fractions {
                let v = ((k as i64 * 4) + (f.a as i64 * 8)).rem_euclid(32);
                *counts.entry(v).or_insert(0) += 1;
            }
        }
        assert_eq!(max, counts.values().copied().max().unwrap());
        assert_eq!(table.values().sum::<u64>(), (lambda.len() * slice.fractions.len()) as u64);
    }

    #[test]
    fn multiplicity_n_zero_collapses_arc_coordinate() {
        let slice = farey_dyadic_slice(8, 0).unwrap();
        let lambda: Vec<u64> = vec![0, 3, 6, 9];
        let (_, max) = multiplicity_count(&lambda, 12, &slice, 2, 0).unwrap();
        // with n=0 the count at xi = 2*theta is |slice| times the collision
        // count of 2*theta over Lambda
        let mut theta_counts: HashMap<i64, u64> = HashMap::new();
        for &k in &lambda {
            *theta_counts.entry((2 * k as i64).rem_euclid(12)).or_insert(0) += 1;
        }
        let expected = theta_counts.values().copied().max().unwrap() * slice.fractions.len() as u64;
        assert_eq!(max, expected);
    }
}
