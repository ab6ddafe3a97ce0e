//! The conserved quantity of the reduced dynamics and the profile `D(xi)`.
//!
//! For the normalized equation with sign `s`, the quantity
//! `h = e^{(2k-n)xi} (1 - xi_t^2)^k - s e^{-n xi}` is constant along any
//! solution, and the level set is described by `(1 - xi_t^2)^k = D(xi)` with
//!
//! - `s = +1`:  `D(xi) = e^{-2k xi} + h e^{(n-2k) xi}`
//! - `s = -1`:  `D(xi) = h e^{(n-2k) xi} - e^{-2k xi}`
//!
//! Turning points are the roots of `D = 1`, null points the roots of
//! `D = 0`. The critical value `h*` exists for `(s=+1, 2k<n)` (where
//! `min D = 1`) and for `(s=-1, 2k>n)` (where `max D = M(h*) = 1`).

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::params::{MetricParams, SigmaSign};
use crate::schouten::{Branch, LogState};

/// Relative tolerance for comparisons against structural thresholds
/// (h vs 0, h vs 1, h vs h*).
pub const STRUCTURAL_REL_TOL: f64 = 1e-9;

/// Bisection terminates at this bracket width before the Newton polish.
const BISECT_WIDTH: f64 = 1e-13;

/// The conserved scalar together with the branch it was measured on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstIntegralValue {
    pub h: f64,
    pub branch: Branch,
    pub params: MetricParams,
}

/// The function `D(xi)` whose k-th root gives `1 - xi_t^2` on the level set.
#[derive(Debug, Clone, Copy)]
pub struct ProfileD {
    pub h: f64,
    pub params: MetricParams,
}

impl ProfileD {
    pub fn new(h: f64, params: MetricParams) -> Self {
        ProfileD { h, params }
    }

    pub fn eval(&self, xi: f64) -> f64 {
        profile_d(xi, self.h, &self.params)
    }

    pub fn deriv(&self, xi: f64) -> f64 {
        profile_d_deriv(xi, self.h, &self.params)
    }
}

/// Snap `value` to `target` when within the structural relative tolerance.
pub(crate) fn snap(value: f64, target: f64) -> f64 {
    if (value - target).abs() <= STRUCTURAL_REL_TOL * target.abs().max(1.0) {
        target
    } else {
        value
    }
}

/// Conserved quantity from a state. Errors on the singular locus and on
/// combinations that violate the case constraints of the classification.
pub fn conserved_h(state: &LogState, params: &MetricParams) -> Result<FirstIntegralValue> {
    state.validate()?;
    let s = match params.s {
        SigmaSign::Zero => {
            return Err(Error::InvalidParams("first integral requires sigma_k of fixed sign".into()))
        }
        other => other.value(),
    };
    let u = state.branch_indicator();
    let branch = Branch::from_indicator(u)?;
    let n = params.nf();
    let k = params.k as i32;
    let h = ((2.0 * params.kf() - n) * state.xi).exp() * u.powi(k) - s * (-n * state.xi).exp();
    if !h.is_finite() {
        return Err(Error::NonFinite("conserved h"));
    }
    // The case constraints assume k > 1; for k = 1 the quantity is still
    // conserved and is returned unchecked.
    if params.k >= 2 {
        validate_admissible(params, h, branch)?;
    }
    Ok(FirstIntegralValue { h, branch, params: *params })
}

/// Branch-correct profile `D(xi)` for the first-integral level `h`.
pub fn profile_d(xi: f64, h: f64, params: &MetricParams) -> f64 {
    let a = (-2.0 * params.kf() * xi).exp();
    let b = h * ((params.nf() - 2.0 * params.kf()) * xi).exp();
    match params.s {
        SigmaSign::Negative => b - a,
        _ => a + b,
    }
}

fn profile_d_deriv(xi: f64, h: f64, params: &MetricParams) -> f64 {
    let two_k = 2.0 * params.kf();
    let nm2k = params.nf() - two_k;
    let a = -two_k * (-two_k * xi).exp();
    let b = h * nm2k * (nm2k * xi).exp();
    match params.s {
        SigmaSign::Negative => b - a,
        _ => a + b,
    }
}

/// The critical first-integral value `h*`:
/// `(2k/(n-2k)) ((n-2k)/n)^{n/2k}` for `s = +1, 2k < n`, and
/// `(2k/(2k-n)) ((2k-n)/n)^{n/2k}` for `s = -1, 2k > n`.
pub fn critical_h(params: &MetricParams) -> Result<f64> {
    let n = params.nf();
    let two_k = 2.0 * params.kf();
    match (params.s, params.two_k_vs_n()) {
        (SigmaSign::Positive, Ordering::Less) => {
            Ok(two_k / (n - two_k) * ((n - two_k) / n).powf(n / two_k))
        }
        (SigmaSign::Negative, Ordering::Greater) => {
            Ok(two_k / (two_k - n) * ((two_k - n) / n).powf(n / two_k))
        }
        _ => Err(Error::NoThreshold { n: params.n, k: params.k, s: params.s.as_i8() }),
    }
}

/// `critical_h` when it exists, `None` otherwise.
pub fn critical_h_opt(params: &MetricParams) -> Option<f64> {
    critical_h(params).ok()
}

/// `M(h) = max_xi { h e^{(n-2k)xi} - e^{-2k xi} }` for `s = -1, 2k > n`,
/// evaluated at the analytic stationary point `e^{n xi} = 2k/((2k-n) h)`.
pub fn mass_m(h: f64, params: &MetricParams) -> Result<f64> {
    if params.s != SigmaSign::Negative || params.two_k_vs_n() != Ordering::Greater {
        return Err(Error::Domain(format!(
            "M(h) is defined for sign -1 with 2k > n (got n = {}, k = {}, sign {})",
            params.n, params.k, params.s
        )));
    }
    if !(h > 0.0) {
        return Err(Error::Domain(format!("M(h) needs h > 0; for h <= 0 the supremum is only attained asymptotically (got h = {h})")));
    }
    let n = params.nf();
    let two_k = 2.0 * params.kf();
    let xi_max = (two_k / ((two_k - n) * h)).ln() / n;
    Ok(h * ((n - two_k) * xi_max).exp() - (-two_k * xi_max).exp())
}

/// Maximizer of `D` for `s = -1, 2k > n, h > 0` (also the equilibrium
/// location at `h = h*`).
pub fn d_maximizer(h: f64, params: &MetricParams) -> Result<f64> {
    if params.s != SigmaSign::Negative || params.two_k_vs_n() != Ordering::Greater || !(h > 0.0) {
        return Err(Error::Domain("D has a maximizer only for sign -1, 2k > n, h > 0".into()));
    }
    let n = params.nf();
    let two_k = 2.0 * params.kf();
    Ok((two_k / ((two_k - n) * h)).ln() / n)
}

/// Minimizer of `D` for `s = +1, 2k < n, h > 0`.
pub fn d_minimizer(h: f64, params: &MetricParams) -> Result<f64> {
    if params.s != SigmaSign::Positive || params.two_k_vs_n() != Ordering::Less || !(h > 0.0) {
        return Err(Error::Domain("D has a minimizer only for sign +1, 2k < n, h > 0".into()));
    }
    let n = params.nf();
    let two_k = 2.0 * params.kf();
    Ok((two_k / (h * (n - two_k))).ln() / n)
}

/// All real roots of `D(xi) = 1`, sorted ascending (0, 1 or 2 roots).
pub fn turning_points(h: f64, params: &MetricParams) -> Result<Vec<f64>> {
    roots_of_d(h, params, 1.0)
}

/// All real roots of `D(xi) = 0`, sorted ascending.
pub fn null_points(h: f64, params: &MetricParams) -> Result<Vec<f64>> {
    roots_of_d(h, params, 0.0)
}

/// Limits of `D` at -infinity and +infinity (as extended reals).
fn d_limits(h: f64, params: &MetricParams) -> (f64, f64) {
    let left = match params.s {
        SigmaSign::Negative => f64::NEG_INFINITY,
        _ => f64::INFINITY,
    };
    let right = match params.two_k_vs_n() {
        Ordering::Less => {
            if h > 0.0 {
                f64::INFINITY
            } else if h < 0.0 {
                f64::NEG_INFINITY
            } else {
                0.0
            }
        }
        Ordering::Equal => match params.s {
            SigmaSign::Negative => h,
            _ => h,
        },
        Ordering::Greater => 0.0,
    };
    (left, right)
}

/// Stationary point of `D`, when one exists. `D` has at most one.
fn d_stationary(h: f64, params: &MetricParams) -> Option<f64> {
    let n = params.nf();
    let two_k = 2.0 * params.kf();
    let nm2k = n - two_k;
    if nm2k == 0.0 || h == 0.0 {
        return None;
    }
    // s = +1: D' = -2k e^{-2k xi} + h (n-2k) e^{(n-2k) xi}; zero needs h(n-2k) > 0.
    // s = -1: D' =  2k e^{-2k xi} + h (n-2k) e^{(n-2k) xi}; zero needs h(n-2k) < 0.
    let needed_sign = match params.s {
        SigmaSign::Negative => -1.0,
        _ => 1.0,
    };
    if h * nm2k * needed_sign <= 0.0 {
        return None;
    }
    Some((two_k / (h * nm2k * needed_sign)).ln() / n)
}

fn roots_of_d(h: f64, params: &MetricParams, target: f64) -> Result<Vec<f64>> {
    if !h.is_finite() {
        return Err(Error::NonFinite("first integral level"));
    }
    if params.s == SigmaSign::Zero {
        return Err(Error::InvalidParams("root finding on D requires sigma_k of fixed sign".into()));
    }
    let d = ProfileD::new(h, *params);
    let (lim_left, lim_right) = d_limits(h, params);
    let mut roots = Vec::new();

    match d_stationary(h, params) {
        None => {
            // D is strictly monotone; at most one root.
            if between(target, lim_left, lim_right) {
                roots.push(bracketed_root(&d, target, anchor_for(&d, target), lim_left < lim_right)?);
            }
        }
        Some(xi_c) => {
            let dc = d.eval(xi_c);
            // Tangency: snap to a double root at the stationary point.
            if (dc - target).abs() <= 1e-11 * target.abs().max(1.0) {
                roots.push(xi_c);
            } else {
                // Left piece runs from lim_left at -inf down/up to dc.
                if between(target, lim_left, dc) {
                    roots.push(expand_and_bisect(&d, target, xi_c, -1.0)?);
                }
                if between(target, dc, lim_right) {
                    roots.push(expand_and_bisect(&d, target, xi_c, 1.0)?);
                }
            }
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(roots)
}

/// Is `target` strictly between the (extended-real) values `a` and `b`?
fn between(target: f64, a: f64, b: f64) -> bool {
    (a < target && target < b) || (b < target && target < a)
}

/// A finite anchor from which to expand a bracket for a monotone D.
fn anchor_for(d: &ProfileD, target: f64) -> f64 {
    // Start near the scale where e^{-2k xi} ~ max(1, |h|, |target|).
    let scale = d.h.abs().max(target.abs()).max(1.0);
    scale.ln() / (2.0 * d.params.kf())
}

/// Expand from `start` in direction `dir` until `D - target` changes sign,
/// then bisect. For monotone pieces the expansion is guaranteed to succeed.
fn expand_and_bisect(d: &ProfileD, target: f64, start: f64, dir: f64) -> Result<f64> {
    let f0 = d.eval(start) - target;
    if f0 == 0.0 {
        return Ok(start);
    }
    let mut step = 0.25;
    let mut a = start;
    let mut b;
    loop {
        b = start + dir * step;
        let fb = d.eval(b) - target;
        if fb == 0.0 {
            return Ok(b);
        }
        if f0 * fb < 0.0 {
            break;
        }
        a = b;
        step *= 2.0;
        if step > 1e6 {
            return Err(Error::Domain(format!(
                "failed to bracket a root of D = {target} from xi = {start} (h = {})",
                d.h
            )));
        }
    }
    Ok(bisect_newton(d, target, a.min(b), a.max(b)))
}

fn bracketed_root(d: &ProfileD, target: f64, anchor: f64, _increasing: bool) -> Result<f64> {
    // Try both directions from the anchor; exactly one brackets the root.
    match expand_and_bisect(d, target, anchor, 1.0) {
        Ok(r) => Ok(r),
        Err(_) => expand_and_bisect(d, target, anchor, -1.0),
    }
}

/// Bisection to width `BISECT_WIDTH`, then a short Newton polish with the
/// analytic derivative. Every returned root is sign-change bracketed.
fn bisect_newton(d: &ProfileD, target: f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = d.eval(a) - target;
    debug_assert!(fa * (d.eval(b) - target) <= 0.0);
    for _ in 0..200 {
        if (b - a).abs() <= BISECT_WIDTH {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = d.eval(m) - target;
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..3 {
        let fx = d.eval(x) - target;
        let dx = d.deriv(x);
        if dx == 0.0 {
            break;
        }
        let next = x - fx / dx;
        if next >= a && next <= b {
            x = next;
        } else {
            break;
        }
    }
    x
}

/// Check the case constraints tying `h` to `(sign, branch, parity, 2k vs n)`.
/// Violations produce an [`Error::Inadmissible`] naming the constraint.
pub fn validate_admissible(params: &MetricParams, h: f64, branch: Branch) -> Result<()> {
    if params.k < 2 {
        return Err(Error::ConeOrder(params.k));
    }
    let h0 = snap(h, 0.0);
    let k_even = params.k % 2 == 0;
    match (params.s, branch) {
        (SigmaSign::Positive, Branch::Positive) => {
            if h0 > 0.0 {
                match params.two_k_vs_n() {
                    Ordering::Less => {
                        let hs = critical_h(params)?;
                        if snap(h / hs, 1.0) > 1.0 {
                            return Err(Error::Inadmissible(format!(
                                "h exceeds h* = {hs:.6}; Thm 1 Case I.3(a) requires h <= h* for 2k < n"
                            )));
                        }
                    }
                    Ordering::Equal => {
                        if snap(h, 1.0) >= 1.0 {
                            return Err(Error::Inadmissible(
                                "Thm 1 Case I.3(b) requires h < 1 for 2k = n".into(),
                            ));
                        }
                    }
                    Ordering::Greater => {}
                }
            }
            Ok(())
        }
        (SigmaSign::Positive, Branch::Negative) => {
            if !k_even && h0 >= 0.0 {
                return Err(Error::Inadmissible(
                    "Thm 1 Case III requires h < 0 (sign +1, k odd, 1 - xi_t^2 < 0)".into(),
                ));
            }
            Ok(())
        }
        (SigmaSign::Negative, Branch::Positive) => {
            if h0 <= 0.0 {
                return Err(Error::Inadmissible(
                    "Thm 2 Case I requires h > 0 (sign -1 with 1 - xi_t^2 > 0)".into(),
                ));
            }
            Ok(())
        }
        (SigmaSign::Negative, Branch::Negative) => {
            if k_even && h0 <= 0.0 {
                return Err(Error::Inadmissible(
                    "Thm 2 Case III requires h > 0 (sign -1, k even, 1 - xi_t^2 < 0)".into(),
                ));
            }
            Ok(())
        }
        (SigmaSign::Zero, _) => Err(Error::InvalidParams(
            "admissibility is defined for sigma_k of fixed sign".into(),
        )),
    }
}
