//! Pointwise curvature algebra for radial conformal metrics
//! `g = v^{-2}(|x|) |dx|^2`.
//!
//! The Schouten tensor of such a metric has eigenvalue `lambda` with
//! multiplicity `n - 1` and `lambda + mu` with multiplicity one, where
//! `lambda = v_r/(r v) (1 - r v_r/(2v))` and `mu = v_rr/v - v_r/(r v)`.
//! In log variables `t = ln r`, `xi = ln(v/r)` these become
//! `lambda = (1 - xi_t^2)/(2 e^{2t})` and `mu = e^{-2t}(xi_tt + xi_t^2 - 1)`,
//! giving the curvature of order `l`
//!
//! ```text
//! sigma_l = 2^{1-l} binom(n,l) (1 - xi_t^2)^{l-1}
//!           [ l/n xi_tt + (1/2 - l/n)(1 - xi_t^2) ] e^{2 l xi}.
//! ```

use crate::error::{Error, Result};
use crate::params::{MetricParams, SigmaSign};

/// Second-order radial data of the conformal factor at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialJet {
    pub r: f64,
    pub v: f64,
    pub v_r: f64,
    pub v_rr: f64,
}

impl RadialJet {
    pub fn new(r: f64, v: f64, v_r: f64, v_rr: f64) -> Result<Self> {
        let jet = RadialJet { r, v, v_r, v_rr };
        jet.validate()?;
        Ok(jet)
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.r, self.v, self.v_r, self.v_rr].iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("radial jet"));
        }
        if self.r <= 0.0 {
            return Err(Error::InvalidParams(format!("radius must be positive (got {})", self.r)));
        }
        if self.v <= 0.0 {
            return Err(Error::InvalidParams(format!("conformal factor must be positive (got {})", self.v)));
        }
        Ok(())
    }
}

/// Eigenvalue pair of the Schouten tensor with respect to the flat metric:
/// `lambda` has multiplicity `n - 1`, `lambda + mu` is simple. The sign of
/// `lambda` witnesses the strict monotonicity of `v` when `sigma_k` has a
/// fixed sign and `k > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair {
    pub lambda: f64,
    pub mu: f64,
}

/// A point of the reduced dynamical system in log variables. `xi_tt` is
/// carried when known (integrator samples always have it).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogState {
    pub t: f64,
    pub xi: f64,
    pub xi_t: f64,
    pub xi_tt: Option<f64>,
}

impl LogState {
    pub fn new(t: f64, xi: f64, xi_t: f64) -> Self {
        LogState { t, xi, xi_t, xi_tt: None }
    }

    pub fn with_xi_tt(t: f64, xi: f64, xi_t: f64, xi_tt: f64) -> Self {
        LogState { t, xi, xi_t, xi_tt: Some(xi_tt) }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.t.is_finite()
            && self.xi.is_finite()
            && self.xi_t.is_finite()
            && self.xi_tt.map_or(true, |x| x.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::NonFinite("log state"))
        }
    }

    pub fn xi_tt(&self) -> Result<f64> {
        self.xi_tt.ok_or(Error::MissingXiTt)
    }

    /// `1 - xi_t^2`, the branch indicator.
    pub fn branch_indicator(&self) -> f64 {
        1.0 - self.xi_t * self.xi_t
    }

    pub fn branch(&self) -> Result<Branch> {
        Branch::from_indicator(self.branch_indicator())
    }

    /// Translate `xi` by `delta` (used by the normalization helper).
    pub fn translate_xi(&self, delta: f64) -> LogState {
        LogState { xi: self.xi + delta, ..*self }
    }
}

/// Sign of `1 - xi_t^2`. Constant along any solution with `sigma_k` of fixed
/// sign and `k > 1`; the locus `|xi_t| = 1` separates the two branches and is
/// rejected as a branch value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Positive,
    Negative,
}

impl Branch {
    pub fn from_indicator(one_minus_xi_t_sq: f64) -> Result<Branch> {
        if one_minus_xi_t_sq > 0.0 {
            Ok(Branch::Positive)
        } else if one_minus_xi_t_sq < 0.0 {
            Ok(Branch::Negative)
        } else {
            Err(Error::BranchUndefined)
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Branch::Positive => 1.0,
            Branch::Negative => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Branch::Positive => 1,
            Branch::Negative => -1,
        }
    }

    pub fn from_i8(b: i8) -> Result<Branch> {
        match b {
            1 => Ok(Branch::Positive),
            -1 => Ok(Branch::Negative),
            _ => Err(Error::InvalidParams(format!("branch must be +1 or -1 (got {b})"))),
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Branch::Positive => write!(f, "+1"),
            Branch::Negative => write!(f, "-1"),
        }
    }
}

/// Cone membership of the Schouten tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeClass {
    GammaPlusK,
    GammaMinusK,
    Indeterminate,
}

impl std::fmt::Display for ConeClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConeClass::GammaPlusK => write!(f, "Gamma_k^+"),
            ConeClass::GammaMinusK => write!(f, "Gamma_k^-"),
            ConeClass::Indeterminate => write!(f, "indeterminate"),
        }
    }
}

/// Eigenvalues of the Schouten tensor from a radial jet.
pub fn eigen_pair(jet: &RadialJet) -> Result<EigenPair> {
    jet.validate()?;
    let lambda = jet.v_r / (jet.r * jet.v) * (1.0 - jet.r * jet.v_r / (2.0 * jet.v));
    let mu = jet.v_rr / jet.v - jet.v_r / (jet.r * jet.v);
    if !lambda.is_finite() || !mu.is_finite() {
        return Err(Error::NonFinite("eigen pair"));
    }
    Ok(EigenPair { lambda, mu })
}

/// `sigma_k(A_g)` in radial variables:
/// `c_nk v^{2k} lambda^{k-1} (n lambda + k mu)`.
pub fn sigma_k_radial(jet: &RadialJet, params: &MetricParams) -> Result<f64> {
    let EigenPair { lambda, mu } = eigen_pair(jet)?;
    let k = params.k as i32;
    let val = params.c_nk
        * jet.v.powi(2 * k)
        * lambda.powi(k - 1)
        * (params.nf() * lambda + params.kf() * mu);
    if val.is_finite() {
        Ok(val)
    } else {
        Err(Error::NonFinite("sigma_k"))
    }
}

/// `sigma_l(A_g)` in log variables, `1 <= l <= k`.
pub fn sigma_l_log(state: &LogState, l: u32, params: &MetricParams) -> Result<f64> {
    state.validate()?;
    if l < 1 || l > params.k {
        return Err(Error::InvalidParams(format!("sigma_l_log needs 1 <= l <= k (got l = {l}, k = {})", params.k)));
    }
    let xi_tt = state.xi_tt()?;
    let cpl = params.cp_nl(l)?;
    let u = state.branch_indicator();
    let lf = l as f64;
    let nf = params.nf();
    let val = cpl
        * u.powi(l as i32 - 1)
        * (lf / nf * xi_tt + (0.5 - lf / nf) * u)
        * (2.0 * lf * state.xi).exp();
    if val.is_finite() {
        Ok(val)
    } else {
        Err(Error::NonFinite("sigma_l"))
    }
}

/// Change to log variables: `t = ln r`, `xi = ln(v/r)`,
/// `xi_t = r v_r / v - 1`, and `xi_tt` recovered from `v_rr`.
pub fn to_log(jet: &RadialJet) -> Result<LogState> {
    jet.validate()?;
    let t = jet.r.ln();
    let xi = (jet.v / jet.r).ln();
    let xi_t = jet.r * jet.v_r / jet.v - 1.0;
    // v_rr = e^{xi - t} [xi_tt + xi_t (xi_t + 1)]
    let xi_tt = jet.v_rr * jet.r * jet.r / jet.v - xi_t * (xi_t + 1.0);
    let state = LogState::with_xi_tt(t, xi, xi_t, xi_tt);
    state.validate()?;
    Ok(state)
}

/// Inverse of [`to_log`]: `r = e^t`, `v = e^{xi + t}`,
/// `v_r = e^{xi}(xi_t + 1)`, `v_rr = e^{xi - t}[xi_tt + xi_t(xi_t + 1)]`.
pub fn from_log(state: &LogState) -> Result<RadialJet> {
    state.validate()?;
    let xi_tt = state.xi_tt()?;
    let r = state.t.exp();
    let v = (state.xi + state.t).exp();
    let v_r = state.xi.exp() * (state.xi_t + 1.0);
    let v_rr = (state.xi - state.t).exp() * (xi_tt + state.xi_t * (state.xi_t + 1.0));
    RadialJet::new(r, v, v_r, v_rr)
}

/// Cone certification from the branch sign alone, valid for `k >= 2` and a
/// fixed-sign constant:
///
/// - `sigma_k > 0`, `1 - xi_t^2 > 0`  =>  `Gamma_k^+`
/// - `sigma_k > 0`, `1 - xi_t^2 < 0`, `k` even  =>  `Gamma_k^-`
/// - `sigma_k < 0`, `1 - xi_t^2 < 0`, `k` odd   =>  `Gamma_k^-`
///
/// Every other combination carries no certification and returns
/// [`ConeClass::Indeterminate`].
pub fn cone_class(branch: Branch, params: &MetricParams) -> Result<ConeClass> {
    if params.k < 2 {
        return Err(Error::ConeOrder(params.k));
    }
    if params.s == SigmaSign::Zero {
        return Err(Error::InvalidParams("cone classification requires sigma_k of fixed sign".into()));
    }
    let k_even = params.k % 2 == 0;
    Ok(match (params.s, branch) {
        (SigmaSign::Positive, Branch::Positive) => ConeClass::GammaPlusK,
        (SigmaSign::Positive, Branch::Negative) if k_even => ConeClass::GammaMinusK,
        (SigmaSign::Negative, Branch::Negative) if !k_even => ConeClass::GammaMinusK,
        _ => ConeClass::Indeterminate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::SplitMix64;

    fn params(n: u32, k: u32, s: SigmaSign) -> MetricParams {
        MetricParams::new(n, k, s).unwrap()
    }

    #[test]
    fn eigen_pair_flat_metric() {
        let jet = RadialJet::new(1.0, 1.0, 0.0, 0.0).unwrap();
        let e = eigen_pair(&jet).unwrap();
        assert_eq!(e.lambda, 0.0);
        assert_eq!(e.mu, 0.0);
    }

    #[test]
    fn eigen_pair_v_equals_r() {
        // v = r at r = 1 and r = 2; cross-checked against the log form
        // lambda = (1 - xi_t^2)/(2 e^{2t}) with xi == 0.
        let e = eigen_pair(&RadialJet::new(1.0, 1.0, 1.0, 0.0).unwrap()).unwrap();
        assert!((e.lambda - 0.5).abs() < 1e-15);
        assert!((e.mu + 1.0).abs() < 1e-15);

        let e2 = eigen_pair(&RadialJet::new(2.0, 2.0, 1.0, 0.0).unwrap()).unwrap();
        assert!((e2.lambda - 0.125).abs() < 1e-15);
        assert!((e2.mu + 0.25).abs() < 1e-15);
    }

    #[test]
    fn sigma_k_radial_values() {
        // v = r, n = 5: k = 1 gives 1.5 at r = 1; k = 2 gives 0.5 at any r.
        let jet = RadialJet::new(1.0, 1.0, 1.0, 0.0).unwrap();
        let s1 = sigma_k_radial(&jet, &params(5, 1, SigmaSign::Positive)).unwrap();
        assert!((s1 - 1.5).abs() < 1e-14);

        for r in [0.5, 1.0, 2.0, 7.3] {
            let jet = RadialJet::new(r, r, 1.0, 0.0).unwrap();
            let s2 = sigma_k_radial(&jet, &params(5, 2, SigmaSign::Positive)).unwrap();
            assert!((s2 - 0.5).abs() < 1e-13, "r = {r}: {s2}");
        }

        let flat = RadialJet::new(1.3, 2.0, 0.0, 0.0).unwrap();
        assert_eq!(sigma_k_radial(&flat, &params(6, 3, SigmaSign::Zero)).unwrap(), 0.0);
    }

    #[test]
    fn sigma_l_log_values() {
        let p = params(5, 2, SigmaSign::Positive);
        // Cylinder-profile point: 2^{-1} * 10 * (1/2 - 2/5) = 0.5.
        let st = LogState::with_xi_tt(0.0, 0.0, 0.0, 0.0);
        assert!((sigma_l_log(&st, 2, &p).unwrap() - 0.5).abs() < 1e-14);

        // (1 - xi_t^2)^{l-1} kills the value on the null line for l >= 2.
        let null = LogState::with_xi_tt(0.3, 0.0, 1.0, 123.0);
        assert_eq!(sigma_l_log(&null, 2, &p).unwrap(), 0.0);

        // Round-sphere profile at t = 0 for n = 4, l = 2: equals 2^{-2} binom(4,2).
        let p42 = params(4, 2, SigmaSign::Positive);
        let sphere = LogState::with_xi_tt(0.0, 0.0, 0.0, 1.0);
        assert!((sigma_l_log(&sphere, 2, &p42).unwrap() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn sigma_l_log_requires_xi_tt() {
        let p = params(5, 2, SigmaSign::Positive);
        let st = LogState::new(0.0, 0.0, 0.0);
        assert_eq!(sigma_l_log(&st, 2, &p), Err(Error::MissingXiTt));
    }

    #[test]
    fn log_change_round_trip() {
        let jet = RadialJet::new(1.0, 1.0, 1.0, 0.0).unwrap();
        let st = to_log(&jet).unwrap();
        assert_eq!(st.t, 0.0);
        assert_eq!(st.xi, 0.0);
        assert_eq!(st.xi_t, 0.0);
        assert_eq!(st.xi_tt, Some(0.0));
        let back = from_log(&st).unwrap();
        assert!((back.r - 1.0).abs() < 1e-15);
        assert!((back.v - 1.0).abs() < 1e-15);

        let mut rng = SplitMix64::new(7);
        for _ in 0..1000 {
            let jet = RadialJet::new(
                rng.uniform(0.05, 20.0),
                rng.uniform(0.05, 20.0),
                rng.uniform(-3.0, 3.0),
                rng.uniform(-3.0, 3.0),
            )
            .unwrap();
            let back = from_log(&to_log(&jet).unwrap()).unwrap();
            for (a, b) in [(back.r, jet.r), (back.v, jet.v), (back.v_r, jet.v_r), (back.v_rr, jet.v_rr)] {
                assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn eigen_consistency_with_log_formulas() {
        // lambda = (1 - xi_t^2)/(2 e^{2t}), mu = e^{-2t}(xi_tt + xi_t^2 - 1).
        let mut rng = SplitMix64::new(11);
        for _ in 0..1000 {
            let st = LogState::with_xi_tt(
                rng.uniform(-2.0, 2.0),
                rng.uniform(-2.0, 2.0),
                rng.uniform(-2.5, 2.5),
                rng.uniform(-4.0, 4.0),
            );
            let e = eigen_pair(&from_log(&st).unwrap()).unwrap();
            let scale = (-2.0 * st.t).exp();
            let lambda = 0.5 * st.branch_indicator() * scale;
            let mu = scale * (st.xi_tt.unwrap() + st.xi_t * st.xi_t - 1.0);
            assert!((e.lambda - lambda).abs() <= 1e-10 * (1.0 + lambda.abs()));
            assert!((e.mu - mu).abs() <= 1e-10 * (1.0 + mu.abs()));
        }
    }

    #[test]
    fn binomial_identity_radial_vs_log() {
        // sigma_k from the radial formula and from the log formula agree.
        let mut rng = SplitMix64::new(23);
        for _ in 0..1000 {
            let n = rng.uniform_u32(3, 8);
            let k = rng.uniform_u32(1, n.min(4));
            let p = params(n, k, SigmaSign::Positive);
            let st = LogState::with_xi_tt(
                rng.uniform(-1.5, 1.5),
                rng.uniform(-1.5, 1.5),
                rng.uniform(-2.0, 2.0),
                rng.uniform(-3.0, 3.0),
            );
            let from_radial = sigma_k_radial(&from_log(&st).unwrap(), &p).unwrap();
            let from_log_form = sigma_l_log(&st, k, &p).unwrap();
            assert!(
                (from_radial - from_log_form).abs() <= 1e-10 * (1.0 + from_log_form.abs()),
                "n={n} k={k}: {from_radial} vs {from_log_form}"
            );
        }
    }

    #[test]
    fn cone_class_table() {
        let p = |s| params(5, 2, s);
        assert_eq!(cone_class(Branch::Positive, &p(SigmaSign::Positive)).unwrap(), ConeClass::GammaPlusK);
        assert_eq!(cone_class(Branch::Negative, &p(SigmaSign::Positive)).unwrap(), ConeClass::GammaMinusK);
        assert_eq!(cone_class(Branch::Positive, &p(SigmaSign::Negative)).unwrap(), ConeClass::Indeterminate);
        assert_eq!(cone_class(Branch::Negative, &p(SigmaSign::Negative)).unwrap(), ConeClass::Indeterminate);

        let p53 = params(5, 3, SigmaSign::Negative);
        assert_eq!(cone_class(Branch::Negative, &p53).unwrap(), ConeClass::GammaMinusK);
        let p53p = params(5, 3, SigmaSign::Positive);
        assert_eq!(cone_class(Branch::Negative, &p53p).unwrap(), ConeClass::Indeterminate);

        assert_eq!(cone_class(Branch::Positive, &params(5, 1, SigmaSign::Positive)), Err(Error::ConeOrder(1)));
    }

    #[test]
    fn newton_cone_signs() {
        // Wherever the certification applies, the lower-order curvatures have
        // the certified signs. States are generated ON the equation by
        // solving the log form for xi_tt.
        let mut rng = SplitMix64::new(31);
        for _ in 0..500 {
            let n = rng.uniform_u32(4, 8);
            let k = rng.uniform_u32(2, n.min(4));
            let k_even = k % 2 == 0;
            let (s, branch) = match rng.uniform_u32(0, 2) {
                0 => (SigmaSign::Positive, Branch::Positive),
                1 if k_even => (SigmaSign::Positive, Branch::Negative),
                _ if !k_even => (SigmaSign::Negative, Branch::Negative),
                _ => (SigmaSign::Positive, Branch::Positive),
            };
            let p = params(n, k, s);
            let xi = rng.uniform(-1.0, 1.0);
            let xi_t = match branch {
                Branch::Positive => rng.uniform(-0.95, 0.95),
                Branch::Negative => rng.uniform(1.05, 2.5) * if rng.next_f64() < 0.5 { 1.0 } else { -1.0 },
            };
            let xi_tt = crate::ode::rhs(&LogState::new(0.0, xi, xi_t), &p).unwrap();
            let st = LogState::with_xi_tt(0.0, xi, xi_t, xi_tt);
            match cone_class(branch, &p).unwrap() {
                ConeClass::GammaPlusK => {
                    for l in 1..=k {
                        assert!(sigma_l_log(&st, l, &p).unwrap() > 0.0, "n={n} k={k} l={l}");
                    }
                }
                ConeClass::GammaMinusK => {
                    for l in 1..=k {
                        let v = sigma_l_log(&st, l, &p).unwrap();
                        assert!((-1f64).powi(l as i32) * v > 0.0, "n={n} k={k} l={l}: {v}");
                    }
                }
                ConeClass::Indeterminate => unreachable!(),
            }
        }
    }

    #[test]
    fn normalization_shift_rescales_states() {
        // A state solving sigma_k = c (arbitrary c > 0) translates in xi to
        // a state solving the normalized equation.
        let p = params(5, 2, SigmaSign::Positive);
        let c = 0.0931;
        // Solve the log form for xi_tt at sigma_k = c.
        let (xi, xi_t) = (0.2f64, 0.4f64);
        let u: f64 = 1.0 - xi_t * xi_t;
        let xi_tt = (c / (p.cp_nk * u * (4.0 * xi).exp()) - (0.5 - 2.0 / 5.0) * u) * 5.0 / 2.0;
        let st = LogState::with_xi_tt(0.0, xi, xi_t, xi_tt);
        assert!((sigma_l_log(&st, 2, &p).unwrap() - c).abs() < 1e-14);
        let shifted = st.translate_xi(p.normalization_shift(c).unwrap());
        let sigma = sigma_l_log(&shifted, 2, &p).unwrap();
        assert!((sigma - p.sigma_norm()).abs() < 1e-12 * p.sigma_norm(), "{sigma}");
    }

    #[test]
    fn branch_rejects_null_locus() {
        let st = LogState::new(0.0, 0.0, 1.0);
        assert_eq!(st.branch(), Err(Error::BranchUndefined));
        assert_eq!(Branch::from_indicator(0.0), Err(Error::BranchUndefined));
    }

    #[test]
    fn domain_errors() {
        assert!(RadialJet::new(-1.0, 1.0, 0.0, 0.0).is_err());
        assert!(RadialJet::new(1.0, 0.0, 0.0, 0.0).is_err());
        assert!(RadialJet::new(1.0, f64::NAN, 0.0, 0.0).is_err());
    }
}
