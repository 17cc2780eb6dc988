//! Major-arc weights: the coefficient rules S(a/q) for the von Mangoldt,
//! divisor, and sum-of-two-squares families, the exponential-sum models
//! built from them, and the exact algebraic identities they satisfy.

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde_json::json;

use crate::arcs::{
    farey_dyadic_slice, farey_slice, gauss_sum_squared, mu_phi, ramanujan_sum, ReducedFraction,
};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{PhaseRotor, WeightSeries};

/// Euler-Mascheroni constant, double precision.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Which weight family the coefficient rule S(a/q) models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArcModel {
    Mangoldt,
    /// Divisor coefficients depend on the evaluation scale N.
    Divisor { scale_n: f64 },
    TwoSquares,
}

impl ArcModel {
    fn validate(&self) -> Result<()> {
        if let ArcModel::Divisor { scale_n } = self {
            if *scale_n < 3.0 {
                return Err(Error::invalid("divisor model needs N >= 3"));
            }
        }
        Ok(())
    }

    pub fn label(&self) -> &'static str {
        match self {
            ArcModel::Mangoldt => "mangoldt",
            ArcModel::Divisor { .. } => "divisor",
            ArcModel::TwoSquares => "two_squares",
        }
    }
}

/// S(a/q) for the chosen model; requires gcd(a, q) = 1.
pub fn coefficient<T: Scalar>(model: ArcModel, a: u64, q: u64) -> Result<Complex<T>> {
    model.validate()?;
    if q == 0 || (a % q.max(1)).gcd(&q) != 1 {
        return Err(Error::invalid(format!("coefficient needs gcd(a,q)=1, got {a}/{q}")));
    }
    Ok(match model {
        ArcModel::Mangoldt => {
            let (mu, phi) = mu_phi(q);
            Complex::new(T::from_f64_c(mu as f64 / phi as f64), T::zero())
        }
        ArcModel::Divisor { scale_n } => Complex::new(
            T::from_f64_c(divisor_coefficient(scale_n, q)),
            T::zero(),
        ),
        ArcModel::TwoSquares => gauss_sum_squared(a, q)?,
    })
}

/// S_tau(1/q; N) = (1/q)(log N + 2 gamma - 1 - 2 log q); independent of a.
pub fn divisor_coefficient(scale_n: f64, q: u64) -> f64 {
    (scale_n.ln() + 2.0 * EULER_GAMMA - 1.0 - 2.0 * (q as f64).ln()) / q as f64
}

/// Which denominator set the weight runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    /// Gamma_Q: Q/2 < q <= Q.
    Slice(u64),
    /// All q <= Q (the dyadic slices Gamma_L, L <= Q, with the last block
    /// truncated at Q).
    Cumulative(u64),
    /// Gamma_Q^(i): 2^i exactly divides q.
    Dyadic(u64, u32),
}

/// A major-arc weight: a tabulated coefficient set over reduced fractions,
/// evaluated as w(n) = sum S(a/q) e(n a/q).
#[derive(Debug, Clone)]
pub struct MajorArcWeight<T: Scalar> {
    pub model: ArcModel,
    pub mode: WeightMode,
    /// Canonical order: q ascending, a ascending.
    pub table: Vec<(ReducedFraction, Complex<T>)>,
    pub lcm: BigInt,
}

impl<T: Scalar> MajorArcWeight<T> {
    pub fn build(model: ArcModel, mode: WeightMode) -> Result<Self> {
        model.validate()?;
        let fractions = match mode {
            WeightMode::Slice(q) => farey_slice(q)?.fractions,
            WeightMode::Dyadic(q, i) => farey_dyadic_slice(q, i)?.fractions,
            WeightMode::Cumulative(q) => {
                if q < 1 {
                    return Err(Error::invalid("Q must be at least 1"));
                }
                let mut all = Vec::new();
                for denom in 1..=q {
                    for a in 0..denom.max(1) {
                        if a.gcd(&denom) == 1 {
                            all.push(ReducedFraction { a, q: denom });
                        }
                    }
                }
                all
            }
        };
        let mut table = Vec::with_capacity(fractions.len());
        let mut lcm = BigInt::from(1u32);
        let mut sorted = fractions;
        sorted.sort_by_key(|f| (f.q, f.a));
        for f in sorted {
            lcm = lcm.lcm(&BigInt::from(f.q));
            table.push((f, coefficient(model, f.a, f.q)?));
        }
        Ok(Self { model, mode, table, lcm })
    }

    pub fn lcm_u64(&self) -> Option<u64> {
        self.lcm.to_u64()
    }

    /// w(n) on [lo, hi], phase recurrences per fraction, summed in canonical
    /// order (parallel evaluation preserves that order).
    pub fn weight_series(&self, lo: i64, hi: i64) -> Result<WeightSeries<T>> {
        if lo > hi {
            return Err(Error::invalid("empty evaluation range"));
        }
        let len = (hi - lo + 1) as usize;
        let partials: Vec<Vec<Complex<T>>> = self
            .table
            .par_iter()
            .map(|&(f, s)| {
                let mut rot = PhaseRotor::new(f.as_scalar::<T>(), lo);
                let mut out = Vec::with_capacity(len);
                for _ in 0..len {
                    out.push(s * rot.value());
                    rot.advance();
                }
                out
            })
            .collect();
        let mut values = vec![Complex::new(T::zero(), T::zero()); len];
        for part in &partials {
            for (v, p) in values.iter_mut().zip(part) {
                *v = *v + *p;
            }
        }
        WeightSeries::new(format!("{}_model", self.model.label()), lo, values)
    }

    /// Sum of |S(a/q)|^2 over the table (the k=1 Parseval value).
    pub fn coefficient_energy(&self) -> T {
        self.table.iter().map(|(_, s)| s.norm_sqr()).sum()
    }

    /// E_{n in [L]} |w(n)|^{2k}. The warning flag is set when L is not a
    /// multiple of the table lcm (the average is then not a full period).
    pub fn moment(&self, k: u32, period: u64) -> Result<(T, bool)> {
        if period == 0 {
            return Err(Error::invalid("period must be positive"));
        }
        let warn = match self.lcm_u64() {
            Some(l) => period % l != 0,
            None => true,
        };
        let series = self.weight_series(1, period as i64)?;
        let mean = series
            .values
            .iter()
            .map(|v| v.norm_sqr().powi(k as i32))
            .sum::<T>()
            / T::from_f64_c(period as f64);
        Ok((mean, warn))
    }

    pub fn table_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .table
            .iter()
            .map(|(f, s)| {
                json!({
                    "a": f.a,
                    "q": f.q,
                    "re": s.re.to_f64().unwrap_or(f64::NAN),
                    "im": s.im.to_f64().unwrap_or(f64::NAN),
                })
            })
            .collect();
        serde_json::Value::Array(rows)
    }
}

/// Type-I coefficients alpha_d, d <= Q, for a coefficient rule s(q) that is
/// independent of the numerator: sum_{q <= Q} s(q) c_q(n) =
/// sum_{d | n, d <= Q} alpha_d with alpha_d = d sum_{u <= Q/d} s(ud) mu(u).
pub fn type1_coefficients<T: Scalar>(q_bound: u64, s: impl Fn(u64) -> T) -> Vec<T> {
    let mut alpha = vec![T::zero(); q_bound as usize + 1];
    for d in 1..=q_bound {
        let mut acc = T::zero();
        for u in 1..=q_bound / d {
            let (mu, _) = mu_phi(u);
            if mu != 0 {
                acc += T::from_f64_c(mu as f64) * s(u * d);
            }
        }
        alpha[d as usize] = T::from_f64_c(d as f64) * acc;
    }
    alpha
}

/// tau_{<=Q;N}(n) through its type-I representation.
pub fn tau_type1<T: Scalar>(n: u64, q_bound: u64, scale_n: f64) -> T {
    let alpha = type1_coefficients(q_bound, |q| T::from_f64_c(divisor_coefficient(scale_n, q)));
    tau_type1_eval(n, &alpha)
}

pub fn tau_type1_eval<T: Scalar>(n: u64, alpha: &[T]) -> T {
    let mut acc = T::zero();
    for d in 1..alpha.len() as u64 {
        if n % d == 0 {
            acc += alpha[d as usize];
        }
    }
    acc
}

/// tau_{<=Q;N}(n) through the Ramanujan-sum form sum_{q<=Q} S_tau(1/q;N) c_q(n);
/// the algebraically dual route to `tau_type1`.
pub fn tau_ramanujan_form<T: Scalar>(n: u64, q_bound: u64, scale_n: f64) -> T {
    let mut acc = T::zero();
    for q in 1..=q_bound {
        let c = ramanujan_sum(q, n as i64).expect("q >= 1");
        acc += T::from_f64_c(divisor_coefficient(scale_n, q) * c as f64);
    }
    acc
}

/// The split of the cumulative two-squares weight into the odd-denominator
/// Ramanujan piece and the q = 0 mod 4 shifted-Ramanujan piece.
pub fn r2_arc_split<T: Scalar>(
    q_bound: u64,
    lo: i64,
    hi: i64,
) -> Result<(WeightSeries<T>, WeightSeries<T>)> {
    if lo > hi {
        return Err(Error::invalid("empty range"));
    }
    let len = (hi - lo + 1) as usize;
    let mut odd = vec![T::zero(); len];
    let mut four = vec![T::zero(); len];
    for q in 1..=q_bound {
        if q % 2 == 1 {
            let sign = if (q - 1) / 2 % 2 == 0 { 1.0 } else { -1.0 };
            let coeff = T::from_f64_c(sign / q as f64);
            for (k, v) in odd.iter_mut().enumerate() {
                let c = ramanujan_sum(q, lo + k as i64)?;
                *v += coeff * T::from_f64_c(c as f64);
            }
        } else if q % 4 == 0 {
            // sum_{(a,q)=1} (-1)^{(a-1)/2} e(na/q) = -i c_q(n + q/4), so the
            // -2i/q prefactor collapses to a real -2/q against c_q(n + q/4)
            let coeff = T::from_f64_c(-2.0 / q as f64);
            let shift = (q / 4) as i64;
            for (k, v) in four.iter_mut().enumerate() {
                let c = ramanujan_sum(q, lo + k as i64 + shift)?;
                *v += coeff * T::from_f64_c(c as f64);
            }
        }
    }
    Ok((
        WeightSeries::from_real("r2_split_odd", lo, odd)?,
        WeightSeries::from_real("r2_split_four", lo, four)?,
    ))
}

/// Exact vs Voronoi main term for sum_{n <= N, n = a mod q} tau(n).
///
/// `tau` must cover [1, N]; the main term is
/// (N/q) sum_{d | q} (c_d(a)/d)(log N + 2 gamma - 1 - 2 log d).
pub fn ap_divisor_sum<T: Scalar>(
    tau: &WeightSeries<T>,
    n_max: u64,
    a: u64,
    q: u64,
) -> Result<(T, T)> {
    if q == 0 || a > q {
        return Err(Error::invalid("need 1 <= a <= q"));
    }
    if tau.end() <= n_max as i64 {
        return Err(Error::invalid("tau series does not cover [1, N]"));
    }
    let mut exact = T::zero();
    let mut n = if a % q == 0 { q } else { a % q };
    while n <= n_max {
        exact += tau.get(n as i64).re;
        n += q;
    }
    let log_n = (n_max as f64).ln();
    let mut main = 0.0f64;
    for d in 1..=q {
        if q % d == 0 {
            let c = ramanujan_sum(d, a as i64)? as f64;
            main += c / d as f64 * (log_n + 2.0 * EULER_GAMMA - 1.0 - 2.0 * (d as f64).ln());
        }
    }
    main *= n_max as f64 / q as f64;
    Ok((exact, T::from_f64_c(main)))
}

/// (1/N) sum_{n in window} w(n) e(-n a/q): the generic recovery averager.
pub fn recover_coefficient<T: Scalar>(w: &WeightSeries<T>, a: u64, q: u64) -> Result<Complex<T>> {
    if q == 0 || (a % q.max(1)).gcd(&q) != 1 {
        return Err(Error::invalid(format!("recovery needs gcd(a,q)=1, got {a}/{q}")));
    }
    let theta = -T::from_f64_c(a as f64) / T::from_f64_c(q as f64);
    let mut rot = PhaseRotor::new(theta, w.start);
    let mut acc = Complex::new(T::zero(), T::zero());
    for v in &w.values {
        acc = acc + *v * rot.value();
        rot.advance();
    }
    Ok(acc / T::from_f64_c(w.len() as f64))
}

/// (1/(N log N)) sum_{n <= N} |tau_{<=Q;N}(n) - log N * tau_{<=Q}(n)|,
/// evaluated by a divisor sweep over the type-I coefficient differences.
pub fn tau_discrepancy<T: Scalar>(n_max: u64, q_bound: u64) -> Result<T> {
    if n_max < 3 {
        return Err(Error::invalid("need N >= 3"));
    }
    let log_n = (n_max as f64).ln();
    let alpha_scaled = type1_coefficients::<T>(q_bound, |q| {
        T::from_f64_c(divisor_coefficient(n_max as f64, q) - log_n / q as f64)
    });
    let mut acc = vec![T::zero(); n_max as usize + 1];
    for d in 1..=q_bound.min(n_max) {
        let coeff = alpha_scaled[d as usize];
        let mut m = d as usize;
        while m <= n_max as usize {
            acc[m] += coeff;
            m += d as usize;
        }
    }
    let total: T = acc[1..].iter().map(|v| v.abs()).sum();
    Ok(total / T::from_f64_c(n_max as f64 * log_n))
}
