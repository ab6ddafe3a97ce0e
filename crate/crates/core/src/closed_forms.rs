//! Exact reference solutions, used throughout as oracles:
//!
//! - round sphere: `xi(t) = ln cosh(t - ln rho)`, `h = 0`, branch +1
//! - cylinder: constant `xi = xi*`, the equilibrium at `h = h*`
//! - hyperbolic: `xi(t) = ln sinh(t_+ - t)` on `t < t_+`, `h = 0`, branch -1
//! - the three flat families solving `sigma_k = 0`: `xi = +-t + c` and the
//!   sinh/cosh families `xi = a^{-1} ln |sinh/cosh(a (t - t0))| + c` with
//!   `a = 1 - n/2k`.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::first_integral::critical_h;
use crate::params::{MetricParams, SigmaSign};
use crate::schouten::{from_log, LogState, RadialJet};

/// Selector for the flat (`sigma_k = 0`) families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlatFamily {
    /// `xi_t = +1` or `-1` identically.
    Linear { positive_slope: bool },
    Sinh,
    Cosh,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    RoundSphere { rho: f64 },
    Cylinder { xi_star: f64 },
    /// Boundary at `r_+ = e^{t_plus}`; the default constructor fixes `r_+ = 1`.
    Hyperbolic { t_plus: f64 },
    FlatLinear { slope: f64, c: f64 },
    FlatSinh { a: f64, t0: f64, c: f64 },
    FlatCosh { a: f64, t0: f64, c: f64 },
}

/// The round sphere of parameter `rho`: `v^{-2} = (2 rho / (r^2 + rho^2))^2`.
pub fn round_sphere(rho: f64) -> Result<ClosedForm> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::InvalidParams(format!("sphere parameter rho must be positive (got {rho})")));
    }
    Ok(ClosedForm::RoundSphere { rho })
}

/// The cylinder `e^{-2 xi*} |x|^{-2} |dx|^2`, i.e. the equilibrium of the
/// reduced flow. Exists at `h = h*` for `(s=+1, 2k<n)` and `(s=-1, 2k>n)`.
pub fn cylinder(params: &MetricParams, h: f64) -> Result<ClosedForm> {
    let hs = critical_h(params)?;
    if (h - hs).abs() > 1e-9 * hs.max(1.0) {
        return Err(Error::Domain(format!("the cylinder exists at h = h* = {hs:.9} (got h = {h})")));
    }
    let n = params.nf();
    let two_k = 2.0 * params.kf();
    let xi_star = match params.two_k_vs_n() {
        Ordering::Less => (n / (n - two_k)).ln() / two_k,
        Ordering::Greater => (two_k / ((two_k - n) * hs)).ln() / n,
        Ordering::Equal => unreachable!("critical_h rejects 2k = n"),
    };
    Ok(ClosedForm::Cylinder { xi_star })
}

/// The hyperbolic metric on the unit ball (`r_+ = 1`). Requires the sign
/// parity pairing `(s = +1, k even)` or `(s = -1, k odd)`, since the
/// hyperbolic Schouten eigenvalues are `-1/2` and `sigma_k = (-1/2)^k
/// binom(n,k)`.
pub fn hyperbolic(params: &MetricParams) -> Result<ClosedForm> {
    let k_even = params.k % 2 == 0;
    let ok = matches!(
        (params.s, k_even),
        (SigmaSign::Positive, true) | (SigmaSign::Negative, false)
    );
    if !ok {
        return Err(Error::Domain(format!(
            "the hyperbolic solution needs sign (-1)^k (got k = {}, sign {})",
            params.k, params.s
        )));
    }
    Ok(ClosedForm::Hyperbolic { t_plus: 0.0 })
}

/// One of the three `sigma_k = 0` families. The linear family realizes
/// `xi_t = +-1`; sinh/cosh need `2k != n`.
pub fn flat_family(selector: FlatFamily, t0: f64, c: f64, params: &MetricParams) -> Result<ClosedForm> {
    match selector {
        FlatFamily::Linear { positive_slope } => Ok(ClosedForm::FlatLinear {
            slope: if positive_slope { 1.0 } else { -1.0 },
            c,
        }),
        FlatFamily::Sinh | FlatFamily::Cosh => {
            if params.two_k_vs_n() == Ordering::Equal {
                return Err(Error::DegenerateFlatFamily);
            }
            let a = 1.0 - params.nf() / (2.0 * params.kf());
            Ok(match selector {
                FlatFamily::Sinh => ClosedForm::FlatSinh { a, t0, c },
                _ => ClosedForm::FlatCosh { a, t0, c },
            })
        }
    }
}

impl ClosedForm {
    /// Log-variable evaluation with `xi_tt` attached.
    pub fn log_state(&self, t: f64) -> Result<LogState> {
        match *self {
            ClosedForm::RoundSphere { rho } => {
                let tau = t - rho.ln();
                Ok(LogState::with_xi_tt(t, tau.cosh().ln(), tau.tanh(), sech_sq(tau)))
            }
            ClosedForm::Cylinder { xi_star } => Ok(LogState::with_xi_tt(t, xi_star, 0.0, 0.0)),
            ClosedForm::Hyperbolic { t_plus } => {
                if t >= t_plus {
                    return Err(Error::Domain(format!("hyperbolic profile is defined for t < {t_plus} (got {t})")));
                }
                let tau = t_plus - t;
                let xi = tau.sinh().ln();
                let xi_t = -cosh_over_sinh(tau);
                let xi_tt = -csch_sq(tau);
                Ok(LogState::with_xi_tt(t, xi, xi_t, xi_tt))
            }
            ClosedForm::FlatLinear { slope, c } => Ok(LogState::with_xi_tt(t, slope * t + c, slope, 0.0)),
            ClosedForm::FlatSinh { a, t0, c } => {
                if t == t0 {
                    return Err(Error::Domain("the sinh family is singular at t = t0".into()));
                }
                let tau = a * (t - t0);
                let xi = tau.sinh().abs().ln() / a + c;
                let xi_t = cosh_over_sinh(tau);
                let xi_tt = -a * csch_sq(tau);
                Ok(LogState::with_xi_tt(t, xi, xi_t, xi_tt))
            }
            ClosedForm::FlatCosh { a, t0, c } => {
                let tau = a * (t - t0);
                let xi = tau.cosh().ln() / a + c;
                let xi_t = tau.tanh();
                let xi_tt = a * sech_sq(tau);
                Ok(LogState::with_xi_tt(t, xi, xi_t, xi_tt))
            }
        }
    }

    /// Radial-variable evaluation.
    pub fn jet(&self, r: f64) -> Result<RadialJet> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidParams(format!("radius must be positive (got {r})")));
        }
        // The sphere, cylinder and hyperbolic forms have simple exact jets;
        // the flat families go through the log change.
        match *self {
            ClosedForm::RoundSphere { rho } => {
                RadialJet::new(r, (r * r + rho * rho) / (2.0 * rho), r / rho, 1.0 / rho)
            }
            ClosedForm::Cylinder { xi_star } => {
                let e = xi_star.exp();
                RadialJet::new(r, e * r, e, 0.0)
            }
            ClosedForm::Hyperbolic { t_plus } => {
                let r_plus = t_plus.exp();
                if r >= r_plus {
                    return Err(Error::Domain(format!("hyperbolic metric lives on r < {r_plus} (got {r})")));
                }
                RadialJet::new(r, (r_plus * r_plus - r * r) / (2.0 * r_plus), -r / r_plus, -1.0 / r_plus)
            }
            _ => from_log(&self.log_state(r.ln())?),
        }
    }

    /// Open `t`-interval on which the closed form is smooth. The sinh family
    /// is split at its `t = t0` singularity; this returns the right piece.
    pub fn domain_t(&self) -> (f64, f64) {
        match *self {
            ClosedForm::Hyperbolic { t_plus } => (f64::NEG_INFINITY, t_plus),
            ClosedForm::FlatSinh { t0, .. } => (t0, f64::INFINITY),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ClosedForm::RoundSphere { .. } => "round-sphere",
            ClosedForm::Cylinder { .. } => "cylinder",
            ClosedForm::Hyperbolic { .. } => "hyperbolic",
            ClosedForm::FlatLinear { .. } => "flat-linear",
            ClosedForm::FlatSinh { .. } => "flat-sinh",
            ClosedForm::FlatCosh { .. } => "flat-cosh",
        }
    }
}

fn sech_sq(x: f64) -> f64 {
    let c = x.cosh();
    1.0 / (c * c)
}

fn csch_sq(x: f64) -> f64 {
    let s = x.sinh();
    1.0 / (s * s)
}

fn cosh_over_sinh(x: f64) -> f64 {
    x.cosh() / x.sinh()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::first_integral::conserved_h;
    use crate::ode::rhs;
    use crate::schouten::{sigma_k_radial, sigma_l_log};

    fn p(n: u32, k: u32, s: SigmaSign) -> MetricParams {
        MetricParams::new(n, k, s).unwrap()
    }

    #[test]
    fn sphere_values() {
        let sphere = round_sphere(1.0).unwrap();
        let jet = sphere.jet(1.0).unwrap();
        assert!((jet.v - 1.0).abs() < 1e-15);
        let st = sphere.log_state(0.0).unwrap();
        assert_eq!((st.xi, st.xi_t), (0.0, 0.0));
        assert!(round_sphere(-1.0).is_err());
    }

    #[test]
    fn sphere_h_vanishes() {
        let params = p(5, 2, SigmaSign::Positive);
        for rho in [0.5, 1.0, 3.0] {
            let sphere = round_sphere(rho).unwrap();
            for i in 0..50 {
                let t = -3.0 + 6.0 * i as f64 / 49.0;
                let st = sphere.log_state(t).unwrap();
                let fi = conserved_h(&st, &params).unwrap();
                assert!(fi.h.abs() < 1e-13, "rho={rho} t={t}: h={}", fi.h);
            }
        }
    }

    #[test]
    fn sphere_sigma_k_is_normalized() {
        for (n, k) in [(4, 2), (5, 2), (6, 3)] {
            let params = p(n, k, SigmaSign::Positive);
            let sphere = round_sphere(1.3).unwrap();
            let target = params.sigma_norm();
            for i in 0..100 {
                let r = 0.1 * (10.0f64 / 0.1).powf(i as f64 / 99.0);
                let sigma = sigma_k_radial(&sphere.jet(r).unwrap(), &params).unwrap();
                assert!(
                    (sigma - target).abs() <= 1e-10 * target,
                    "(n,k)=({n},{k}) r={r}: {sigma} vs {target}"
                );
            }
        }
    }

    #[test]
    fn cylinder_values() {
        let params = p(5, 2, SigmaSign::Positive);
        let hs = critical_h(&params).unwrap();
        let cyl = cylinder(&params, hs).unwrap();
        let ClosedForm::Cylinder { xi_star } = cyl else { panic!() };
        assert!((xi_star - 5f64.ln() / 4.0).abs() < 1e-12);
        assert!((xi_star - 0.402359).abs() < 1e-5);
        assert!(rhs(&cyl.log_state(0.0).unwrap(), &params).unwrap().abs() < 1e-12);

        let params_neg = p(3, 2, SigmaSign::Negative);
        let hs_neg = critical_h(&params_neg).unwrap();
        let cyl_neg = cylinder(&params_neg, hs_neg).unwrap();
        let ClosedForm::Cylinder { xi_star } = cyl_neg else { panic!() };
        assert!((xi_star - (4.0 / hs_neg).ln() / 3.0).abs() < 1e-12);
        assert!((xi_star - 0.274653).abs() < 1e-5);
        assert!(rhs(&cyl_neg.log_state(0.0).unwrap(), &params_neg).unwrap().abs() < 1e-12);

        // Off-threshold h is rejected.
        assert!(cylinder(&params, hs * 1.01).is_err());
    }

    #[test]
    fn hyperbolic_values() {
        let params = p(4, 2, SigmaSign::Positive);
        let hyp = hyperbolic(&params).unwrap();
        // h = 0 along the profile (k even pairs with sign +1).
        for t in [-4.0, -1.0, -0.2] {
            let st = hyp.log_state(t).unwrap();
            let fi = conserved_h(&st, &params).unwrap();
            assert!(fi.h.abs() < 1e-12, "t={t}: {}", fi.h);
            assert_eq!(fi.branch, crate::schouten::Branch::Negative);
        }
        // sigma_k = (-1)^k 2^{-k} binom(n,k) via both formulas.
        for t in [-3.0, -0.8] {
            let st = hyp.log_state(t).unwrap();
            let sig = sigma_l_log(&st, 2, &params).unwrap();
            assert!((sig - params.sigma_norm()).abs() < 1e-10 * params.sigma_norm());
            let jet = hyp.jet(st.t.exp()).unwrap();
            let sig_r = sigma_k_radial(&jet, &params).unwrap();
            assert!((sig_r - params.sigma_norm()).abs() < 1e-10 * params.sigma_norm());
        }
        // Odd k pairs with sign -1.
        let params_odd = p(5, 3, SigmaSign::Negative);
        let hyp_odd = hyperbolic(&params_odd).unwrap();
        let st = hyp_odd.log_state(-1.0).unwrap();
        let sig = sigma_l_log(&st, 3, &params_odd).unwrap();
        assert!((sig + params_odd.sigma_norm()).abs() < 1e-10 * params_odd.sigma_norm());
        // Parity mismatch is rejected.
        assert!(hyperbolic(&p(4, 2, SigmaSign::Negative)).is_err());
        assert!(hyperbolic(&p(5, 3, SigmaSign::Positive)).is_err());
    }

    #[test]
    fn hyperbolic_boundary_exponent() {
        // v^{-2} ~ (r_+ - r)^{-2}: fitted slope on the closed form.
        let hyp = hyperbolic(&p(4, 2, SigmaSign::Positive)).unwrap();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 0..40 {
            let d = 1e-4 * 10f64.powf(2.0 * i as f64 / 39.0); // r_+ - r in [1e-4, 1e-2]
            let jet = hyp.jet(1.0 - d).unwrap();
            xs.push(d.ln());
            ys.push((jet.v * jet.v).recip().ln());
        }
        let (slope, _) = crate::util::linear_fit(&xs, &ys);
        assert!((slope + 2.0).abs() < 0.01 * 2.0, "slope {slope}");
    }

    #[test]
    fn flat_families() {
        let params = p(5, 2, SigmaSign::Zero);

        // Linear family: sigma_k vanishes identically.
        let lin = flat_family(FlatFamily::Linear { positive_slope: true }, 0.0, 0.3, &params).unwrap();
        for t in [-2.0, 0.0, 1.0] {
            let st = lin.log_state(t).unwrap();
            assert_eq!(sigma_l_log(&st, 2, &params).unwrap(), 0.0);
        }

        // Sinh family at n=5, k=2, t0=0, c=0: xi(t) = -4 ln|sinh(-t/4)|.
        let sinh = flat_family(FlatFamily::Sinh, 0.0, 0.0, &params).unwrap();
        let st = sinh.log_state(1.0).unwrap();
        let expect = -4.0 * (0.25f64.sinh()).ln();
        assert!((st.xi - expect).abs() < 1e-12, "{} vs {expect}", st.xi);
        // ODE-form residual xi_tt - (1 - n/2k)(1 - xi_t^2) on a grid; the
        // evaluator differentiates directly, so the two routes are distinct.
        for i in 0..200 {
            let t = 0.05 + 4.0 * i as f64 / 199.0;
            let st = sinh.log_state(t).unwrap();
            let res = st.xi_tt.unwrap() - (1.0 - 2.5 / 2.0) * st.branch_indicator();
            assert!(res.abs() <= 1e-12 * (1.0 + st.xi_tt.unwrap().abs()), "t={t}: {res}");
        }

        // Cosh family: curvature residual through the log formula.
        let cosh = flat_family(FlatFamily::Cosh, 0.0, 0.0, &params).unwrap();
        for i in 0..200 {
            let t = -4.0 + 8.0 * i as f64 / 199.0;
            let st = cosh.log_state(t).unwrap();
            let res = sigma_l_log(&st, 2, &params).unwrap();
            assert!(res.abs() <= 1e-9, "t={t}: {res}");
        }

        // 2k = n degenerates the sinh/cosh coefficient.
        let p42 = p(4, 2, SigmaSign::Zero);
        assert_eq!(flat_family(FlatFamily::Sinh, 0.0, 0.0, &p42), Err(Error::DegenerateFlatFamily));
        assert!(flat_family(FlatFamily::Linear { positive_slope: false }, 0.0, 0.0, &p42).is_ok());
        // The sinh evaluator rejects its singular point.
        assert!(sinh.log_state(0.0).is_err());
    }
}
