//! Metric parameters: dimension `n`, order `k`, the sign of the normalized
//! constant, and the derived binomial coefficients.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Sign of the normalized constant `sigma_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SigmaSign {
    Positive,
    Negative,
    Zero,
}

impl SigmaSign {
    pub fn value(self) -> f64 {
        match self {
            SigmaSign::Positive => 1.0,
            SigmaSign::Negative => -1.0,
            SigmaSign::Zero => 0.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            SigmaSign::Positive => 1,
            SigmaSign::Negative => -1,
            SigmaSign::Zero => 0,
        }
    }

    pub fn from_i8(s: i8) -> Result<Self> {
        match s {
            1 => Ok(SigmaSign::Positive),
            -1 => Ok(SigmaSign::Negative),
            0 => Ok(SigmaSign::Zero),
            _ => Err(Error::InvalidParams(format!("sigma sign must be one of -1, 0, +1 (got {s})"))),
        }
    }
}

impl std::fmt::Display for SigmaSign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SigmaSign::Positive => write!(f, "+1"),
            SigmaSign::Negative => write!(f, "-1"),
            SigmaSign::Zero => write!(f, "0"),
        }
    }
}

/// Exact binomial coefficient for the small arguments used here.
pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    debug_assert!(k <= n);
    let k = k.min(n - k);
    let mut b: u128 = 1;
    for i in 0..k {
        b = b * (n - i) as u128 / (i as u128 + 1);
    }
    b as f64
}

/// Problem parameters for `sigma_k(A_g) = s * 2^{-k} binom(n, k)`.
///
/// `c_nk = (n-1)!/(k!(n-k)!)` is the coefficient of the radial curvature
/// formula and `cp_nk = 2^{1-k} binom(n,k)` the coefficient of its log form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricParams {
    pub n: u32,
    pub k: u32,
    pub s: SigmaSign,
    pub c_nk: f64,
    pub cp_nk: f64,
}

impl MetricParams {
    pub fn new(n: u32, k: u32, s: SigmaSign) -> Result<Self> {
        if n < 3 || n > 64 {
            return Err(Error::InvalidParams(format!("dimension n must satisfy 3 <= n <= 64 (got {n})")));
        }
        if k < 1 || k > n {
            return Err(Error::InvalidParams(format!("order k must satisfy 1 <= k <= n (got k = {k}, n = {n})")));
        }
        let c_nk = binomial(n, k) / n as f64;
        let cp_nk = 2f64.powi(1 - k as i32) * binomial(n, k);
        Ok(MetricParams { n, k, s, c_nk, cp_nk })
    }

    /// `|sigma_k|` in the normalization used throughout: `2^{-k} binom(n,k)`.
    pub fn sigma_norm(&self) -> f64 {
        2f64.powi(-(self.k as i32)) * binomial(self.n, self.k)
    }

    /// The constant the equation is solved for, `s * 2^{-k} binom(n,k)`.
    pub fn sigma_target(&self) -> f64 {
        self.s.value() * self.sigma_norm()
    }

    /// Order relation of `2k` against `n`, which drives the case analysis.
    pub fn two_k_vs_n(&self) -> Ordering {
        (2 * self.k).cmp(&self.n)
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    pub fn kf(&self) -> f64 {
        self.k as f64
    }

    /// Log-form coefficient for order `l`: `2^{1-l} binom(n,l)`.
    pub fn cp_nl(&self, l: u32) -> Result<f64> {
        if l < 1 || l > self.n {
            return Err(Error::InvalidParams(format!("order l must satisfy 1 <= l <= n (got l = {l})")));
        }
        Ok(2f64.powi(1 - l as i32) * binomial(self.n, l))
    }

    /// Same parameters with a different constant sign.
    pub fn with_sign(&self, s: SigmaSign) -> Self {
        MetricParams { s, ..*self }
    }

    /// The xi-translation that rescales a solution of `|sigma_k| = c` (any
    /// `c > 0`) to the normalization `|sigma_k| = 2^{-k} binom(n,k)`:
    /// shifting `xi -> xi + delta` multiplies `sigma_k` by `e^{2k delta}`, so
    /// `delta = ln(2^{-k} binom(n,k) / c) / (2k)` does the job.
    pub fn normalization_shift(&self, c: f64) -> Result<f64> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidParams(format!("constant to normalize must be positive and finite (got {c})")));
        }
        Ok((self.sigma_norm() / c).ln() / (2.0 * self.kf()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(6, 3), 20.0);
        assert_eq!(binomial(8, 4), 70.0);
        assert_eq!(binomial(7, 0), 1.0);
        assert_eq!(binomial(7, 7), 1.0);
    }

    #[test]
    fn coefficients() {
        let p = MetricParams::new(5, 2, SigmaSign::Positive).unwrap();
        assert_eq!(p.c_nk, 2.0); // 4!/(2! 3!) = 2
        assert_eq!(p.cp_nk, 5.0); // 2^{-1} * 10
        assert_eq!(p.sigma_norm(), 2.5); // 2^{-2} * 10
        // cp_nk = n * c_nk * 2^{1-k}
        assert_eq!(p.cp_nk, p.nf() * p.c_nk * 2f64.powi(1 - p.k as i32));

        let p1 = MetricParams::new(5, 1, SigmaSign::Positive).unwrap();
        assert_eq!(p1.c_nk, 1.0); // 4!/(1! 4!) = 1
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(MetricParams::new(2, 1, SigmaSign::Zero).is_err());
        assert!(MetricParams::new(5, 0, SigmaSign::Zero).is_err());
        assert!(MetricParams::new(5, 6, SigmaSign::Zero).is_err());
    }

    #[test]
    fn normalization_shift_direction() {
        // A state with sigma_k = c, translated by the shift, must have the
        // normalized sigma_k. Verified against the log formula directly.
        let p = MetricParams::new(5, 2, SigmaSign::Positive).unwrap();
        let c = 0.37;
        let delta = p.normalization_shift(c).unwrap();
        // sigma_k scales by e^{2k delta} under xi -> xi + delta
        let scaled = c * (2.0 * p.kf() * delta).exp();
        assert!((scaled - p.sigma_norm()).abs() < 1e-12 * p.sigma_norm());
    }
}
