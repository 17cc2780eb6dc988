//! Finite complex-valued sequences indexed by integers: the common carrier
//! for arithmetic weights, major-arc models, and local signals.

use std::io::{BufRead, Write};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{unit_phase, Scalar};

/// An arithmetic function restricted to a half-open window `[start, start+len)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSeries<T: Scalar> {
    pub label: String,
    pub start: i64,
    pub values: Vec<Complex<T>>,
}

impl<T: Scalar> WeightSeries<T> {
    pub fn new(label: impl Into<String>, start: i64, values: Vec<Complex<T>>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("series must hold at least one value"));
        }
        for (k, v) in values.iter().enumerate() {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::invalid(format!(
                    "non-finite value at index {}",
                    start + k as i64
                )));
            }
        }
        Ok(Self { label: label.into(), start, values })
    }

    pub fn from_real(label: impl Into<String>, start: i64, values: Vec<T>) -> Result<Self> {
        Self::new(
            label,
            start,
            values.into_iter().map(|x| Complex::new(x, T::zero())).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn end(&self) -> i64 {
        self.start + self.values.len() as i64
    }

    /// Value at integer index `n`; zero outside the window.
    pub fn get(&self, n: i64) -> Complex<T> {
        if n < self.start || n >= self.end() {
            Complex::new(T::zero(), T::zero())
        } else {
            self.values[(n - self.start) as usize]
        }
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> + '_ {
        self.start..self.end()
    }

    pub fn l2_norm_sq(&self) -> T {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Pointwise conjugation-difference f(x) * conj(f(x+h)).
    pub fn conj_difference(&self, h: i64) -> WeightSeries<T> {
        let lo = self.start.max(self.start - h);
        let hi = self.end().min(self.end() - h);
        if lo >= hi {
            return WeightSeries {
                label: format!("{}|diff{}", self.label, h),
                start: self.start,
                values: vec![Complex::new(T::zero(), T::zero())],
            };
        }
        let values = (lo..hi).map(|x| self.get(x) * self.get(x + h).conj()).collect();
        WeightSeries { label: format!("{}|diff{}", self.label, h), start: lo, values }
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "n,re,im")?;
        for (k, v) in self.values.iter().enumerate() {
            writeln!(
                out,
                "{},{:.16e},{:.16e}",
                self.start + k as i64,
                v.re.to_f64().unwrap_or(f64::NAN),
                v.im.to_f64().unwrap_or(f64::NAN)
            )?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(label: impl Into<String>, input: R) -> Result<Self> {
        let mut start = None;
        let mut prev = None;
        let mut values = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim_end();
            if lineno == 0 {
                if line != "n,re,im" {
                    return Err(Error::Parse(format!("bad csv header: {line:?}")));
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let n: i64 = parse_field(parts.next(), lineno)?;
            let re: f64 = parse_field(parts.next(), lineno)?;
            let im: f64 = parse_field(parts.next(), lineno)?;
            if let Some(p) = prev {
                if n != p + 1 {
                    return Err(Error::Parse(format!("non-contiguous index at line {}", lineno + 1)));
                }
            }
            start.get_or_insert(n);
            prev = Some(n);
            values.push(Complex::new(T::from_f64_c(re), T::from_f64_c(im)));
        }
        let start = start.ok_or_else(|| Error::Parse("empty csv".into()))?;
        WeightSeries::new(label, start, values)
    }
}

fn parse_field<F: std::str::FromStr>(field: Option<&str>, lineno: usize) -> Result<F> {
    field
        .ok_or_else(|| Error::Parse(format!("missing field at line {}", lineno + 1)))?
        .parse()
        .map_err(|_| Error::Parse(format!("bad field at line {}", lineno + 1)))
}

/// Incremental evaluation of n -> e(n * theta), renormalized every 2^16
/// steps to keep the accumulated drift below 1e-10.
pub struct PhaseRotor<T: Scalar> {
    theta: T,
    step: Complex<T>,
    current: Complex<T>,
    index: i64,
    ticks: u32,
}

const RENORM_PERIOD: u32 = 1 << 16;

impl<T: Scalar> PhaseRotor<T> {
    /// Rotor positioned at index `n0`, phase angle `theta` (turns, not radians).
    pub fn new(theta: T, n0: i64) -> Self {
        Self {
            theta,
            step: unit_phase(theta),
            current: unit_phase(theta * T::from_f64_c(n0 as f64)),
            index: n0,
            ticks: 0,
        }
    }

    pub fn value(&self) -> Complex<T> {
        self.current
    }

    pub fn advance(&mut self) {
        self.current = self.current * self.step;
        self.index += 1;
        self.ticks += 1;
        if self.ticks == RENORM_PERIOD {
            self.ticks = 0;
            self.current = unit_phase(self.theta * T::from_f64_c(self.index as f64));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_access_and_bounds() {
        let s = WeightSeries::<f64>::from_real("t", 1, vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.get(0).re, 0.0);
        assert_eq!(s.get(2).re, 2.0);
        assert_eq!(s.get(4).re, 0.0);
        assert_eq!(s.end(), 4);
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(WeightSeries::<f64>::from_real("t", 0, vec![]).is_err());
        assert!(WeightSeries::<f64>::from_real("t", 0, vec![f64::NAN]).is_err());
    }

    #[test]
    fn csv_round_trip_exact() {
        let s = WeightSeries::<f64>::new(
            "t",
            -2,
            vec![
                Complex::new(0.1, -0.25),
                Complex::new(1.0 / 3.0, std::f64::consts::PI),
                Complex::new(-7.5e-13, 0.0),
            ],
        )
        .unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let back = WeightSeries::<f64>::read_csv("t", &buf[..]).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn rotor_tracks_direct_phase() {
        let theta = 0.3127_f64;
        let mut rot = PhaseRotor::new(theta, 5);
        for n in 5..5000 {
            let direct = unit_phase(theta * n as f64);
            assert!((rot.value() - direct).norm() < 1e-10);
            rot.advance();
        }
    }

    #[test]
    fn conj_difference_window() {
        // Delta_1 of 1_{[2]} = 1_{[1]}
        let s = WeightSeries::<f64>::from_real("i", 1, vec![1.0, 1.0]).unwrap();
        let d = s.conj_difference(1);
        assert_eq!(d.start, 1);
        assert_eq!(d.len(), 1);
        assert_eq!(d.get(1).re, 1.0);
    }
}
