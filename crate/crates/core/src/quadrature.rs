//! Time-of-flight quadrature: the independent oracle for `t(xi)`.
//!
//! On the level set of the first integral the motion satisfies
//! `dt = dxi / xi_t` with `xi_t = dir * sqrt(1 - branch * |D(xi)|^{1/k})`,
//! so elapsed times are plain one-dimensional integrals of the profile.
//! Turning points (`D = 1`, branch +1) are inverse-square-root endpoint
//! singularities and are removed by the substitution `u^2 = |xi - xi_turn|`.
//! This module never touches the ODE stepper, which keeps it usable as an
//! oracle against [`crate::ode::integrate`].

use crate::error::{Error, Result};
use crate::first_integral::{profile_d, turning_points};
use crate::params::{MetricParams, SigmaSign};
use crate::schouten::Branch;

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.9914553711208126,
    0.9491079123427585,
    0.8648644233597691,
    0.7415311855993944,
    0.5860872354676911,
    0.4058451513773972,
    0.2077849550078985,
    0.0,
];
const WGK: [f64; 8] = [
    0.0229353220105292,
    0.0630920926299786,
    0.1047900103222502,
    0.1406532597155259,
    0.1690047266392679,
    0.1903505780647854,
    0.2044329400752989,
    0.2094821410847278,
];
const WG: [f64; 4] = [
    0.1294849661688697,
    0.2797053914892767,
    0.3818300505051189,
    0.4179591836734694,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kron = WGK[7] * f(c);
    let mut gauss = WG[3] * f(c);
    for j in 0..7 {
        let x = half * XGK[j];
        let pair = f(c - x) + f(c + x);
        kron += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    kron *= half;
    gauss *= half;
    (kron, (kron - gauss).abs())
}

/// Globally adaptive GK15 quadrature: repeatedly bisect the segment with the
/// largest error estimate until the summed estimate meets `tol` or the
/// subdivision limit is reached. Near-singular evaluation noise can keep the
/// error *estimate* above `tol` even when the value is long converged, so
/// hitting the limit returns the best value rather than failing.
pub(crate) fn integrate_adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    struct Seg {
        a: f64,
        b: f64,
        val: f64,
        err: f64,
    }
    let eval = |a: f64, b: f64| -> Result<Seg> {
        let (val, err) = gk15(f, a, b);
        if !val.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integrand on [{a}, {b}]")));
        }
        Ok(Seg { a, b, val, err })
    };
    let mut segs = vec![eval(a, b)?];
    for _ in 0..600 {
        let total_err: f64 = segs.iter().map(|s| s.err).sum();
        if total_err <= tol {
            break;
        }
        let worst = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i)
            .expect("nonempty");
        let Seg { a: lo, b: hi, .. } = segs[worst];
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break; // interval at rounding width
        }
        segs[worst] = eval(lo, mid)?;
        segs.push(eval(mid, hi)?);
    }
    Ok(segs.iter().map(|s| s.val).sum())
}

/// `1 - branch * |D(xi)|^{1/k}`, computed through `expm1(ln D / k)` on the
/// positive branch to avoid cancellation near turning points.
fn one_minus_root(xi: f64, h: f64, params: &MetricParams, branch: Branch) -> f64 {
    let d = profile_d(xi, h, params);
    match branch {
        Branch::Positive => -f64::exp_m1(d.ln() / params.kf()),
        Branch::Negative => 1.0 + d.abs().powf(1.0 / params.kf()),
    }
}

/// Evaluator of `1 - D^{1/k}` anchored at a turning point `xt`: the profile
/// increment `D(xt + s) - D(xt)` is computed in expm1 form, which is free of
/// the subtractive cancellation that poisons the direct formula near the
/// root. `eps_t = D(xt) - 1` absorbs the (certified, <= 1e-12) root residual.
struct AnchoredGap {
    coef_decay: f64,
    coef_grow: f64,
    eps_t: f64,
    two_k: f64,
    nm2k: f64,
    inv_k: f64,
}

impl AnchoredGap {
    fn new(xt: f64, h: f64, params: &MetricParams) -> Self {
        let two_k = 2.0 * params.kf();
        let nm2k = params.nf() - two_k;
        let (coef_decay, coef_grow) = match params.s {
            SigmaSign::Negative => (-(-two_k * xt).exp(), h * (nm2k * xt).exp()),
            _ => ((-two_k * xt).exp(), h * (nm2k * xt).exp()),
        };
        AnchoredGap {
            coef_decay,
            coef_grow,
            eps_t: profile_d(xt, h, params) - 1.0,
            two_k,
            nm2k,
            inv_k: 1.0 / params.kf(),
        }
    }

    /// `1 - D(xt + s)^{1/k}`; returns 0 for states on the far side of the
    /// anchored root (within its residual), never a negative garbage value.
    fn eval(&self, s: f64) -> f64 {
        let delta = self.coef_decay * f64::exp_m1(-self.two_k * s)
            + self.coef_grow * f64::exp_m1(self.nm2k * s)
            + self.eps_t;
        if delta >= 0.0 {
            return 0.0; // D >= 1: outside the true interval by root noise
        }
        if delta <= -1.0 {
            return 1.0; // D <= 0: past the null point (q saturates at 1)
        }
        -f64::exp_m1(f64::ln_1p(delta) * self.inv_k)
    }
}

/// Validity check of the profile for the branch on a closed interval.
fn check_branch_range(a: f64, b: f64, h: f64, params: &MetricParams, branch: Branch) -> Result<()> {
    let parity_sign = if params.k % 2 == 0 { 1.0 } else { branch.value() };
    let samples = 257;
    for i in 0..=samples {
        let xi = a + (b - a) * i as f64 / samples as f64;
        let d = profile_d(xi, h, params);
        if d * parity_sign <= 0.0 && !(i == 0 || i == samples) {
            return Err(Error::Quadrature(format!(
                "interval crosses a null point near xi = {xi} (D = {d})"
            )));
        }
        if branch == Branch::Positive {
            let interior = i != 0 && i != samples;
            if interior && d > 1.0 + 1e-9 {
                return Err(Error::Quadrature(format!(
                    "interval leaves the branch-valid range near xi = {xi} (D = {d} > 1)"
                )));
            }
            // An interior point ON the turning level means the motion stops
            // there (infinite transit time through the equilibrium).
            if interior && d >= 1.0 - 1e-13 {
                return Err(Error::Quadrature(format!(
                    "interval touches a turning point in its interior near xi = {xi}"
                )));
            }
        }
    }
    Ok(())
}

/// Elapsed `t` while `xi` moves from `xi_from` to `xi_to` along the level
/// set `h` on the given branch, with `direction` the sign of `xi_t`.
/// Endpoints may be turning points; the inverse-square-root singularity is
/// removed by substitution there. Absolute error <= 1e-10 on regular
/// intervals; an interval ending exactly at a turning point additionally
/// inherits the root's position uncertainty through the infinite endpoint
/// sensitivity dt/dxi -> inf (in practice a few 1e-8 near tangency).
pub fn time_quadrature(
    xi_from: f64,
    xi_to: f64,
    h: f64,
    params: &MetricParams,
    branch: Branch,
    direction: f64,
) -> Result<f64> {
    if params.s == SigmaSign::Zero {
        return Err(Error::InvalidParams("quadrature requires sigma_k of fixed sign".into()));
    }
    if !(direction == 1.0 || direction == -1.0) {
        return Err(Error::InvalidParams(format!("direction must be +1 or -1 (got {direction})")));
    }
    if !xi_from.is_finite() || !xi_to.is_finite() || !h.is_finite() {
        return Err(Error::NonFinite("quadrature endpoint"));
    }
    if xi_from == xi_to {
        return Ok(0.0);
    }
    let (a, b, flip) = if xi_from < xi_to { (xi_from, xi_to, 1.0) } else { (xi_to, xi_from, -1.0) };
    check_branch_range(a, b, h, params, branch)?;

    let integrand = move |xi: f64| {
        let w = one_minus_root(xi, h, params, branch);
        1.0 / w.max(0.0).sqrt()
    };

    // Turning points at (or just outside) the endpoints make the integrand
    // singular like 1/sqrt(xi - xi_T); substitute u^2 = xi - xi_T there.
    let tol = 1e-10;
    let mut singular: Vec<f64> = Vec::new();
    if branch == Branch::Positive {
        for xt in turning_points(h, params)? {
            if (xt - a).abs() < 1e-6 || (xt - b).abs() < 1e-6 {
                singular.push(xt);
            }
        }
    }
    let near = |x: f64, xs: &[f64]| xs.iter().any(|t| (x - t).abs() < 1e-6);

    let sing_left = near(a, &singular);
    let sing_right = near(b, &singular);
    let nearest = |x: f64| -> f64 {
        *singular
            .iter()
            .min_by(|p, q| (*p - x).abs().partial_cmp(&(*q - x).abs()).unwrap())
            .expect("nonempty singular set")
    };
    let raw = if !sing_left && !sing_right {
        integrate_adaptive(&integrand, a, b, tol)?
    } else if sing_left && sing_right && (nearest(a) - nearest(b)).abs() < 1e-12 {
        // Both endpoints hug the same root: the whole interval lies on one
        // side of it and a single substitution covers it.
        let xt = nearest(a);
        let gap = AnchoredGap::new(xt, h, params);
        if xt <= 0.5 * (a + b) {
            let g = move |u: f64| {
                let w = gap.eval(u * u);
                if w > 0.0 { 2.0 * u / w.sqrt() } else { 0.0 }
            };
            integrate_adaptive(&g, (a - xt).max(0.0).sqrt(), (b - xt).max(0.0).sqrt(), tol)?
        } else {
            // xi = xt - u^2: dxi = -2u du and the u-limits swap, so the
            // signs cancel and the integral stays positive.
            let g = move |u: f64| {
                let w = gap.eval(-(u * u));
                if w > 0.0 { 2.0 * u / w.sqrt() } else { 0.0 }
            };
            integrate_adaptive(&g, (xt - b).max(0.0).sqrt(), (xt - a).max(0.0).sqrt(), tol)?
        }
    } else {
        let mid = 0.5 * (a + b);
        let mut sum = 0.0;
        if sing_left {
            // xi = xi_T + u^2 over the left half, with the gap evaluated in
            // root-anchored form.
            let xt = *singular.iter().min_by(|p, q| (*p - a).abs().partial_cmp(&(*q - a).abs()).unwrap()).unwrap();
            let gap = AnchoredGap::new(xt, h, params);
            let g = move |u: f64| {
                let w = gap.eval(u * u);
                if w > 0.0 {
                    2.0 * u / w.sqrt()
                } else {
                    0.0
                }
            };
            let u_lo = (a - xt).max(0.0).sqrt();
            let u_hi = (mid - xt).sqrt();
            sum += integrate_adaptive(&g, u_lo, u_hi, tol / 2.0)?;
        } else {
            sum += integrate_adaptive(&integrand, a, mid, tol / 2.0)?;
        }
        if sing_right {
            let xt = *singular.iter().min_by(|p, q| (*p - b).abs().partial_cmp(&(*q - b).abs()).unwrap()).unwrap();
            let gap = AnchoredGap::new(xt, h, params);
            let g = move |u: f64| {
                let w = gap.eval(-(u * u));
                if w > 0.0 {
                    2.0 * u / w.sqrt()
                } else {
                    0.0
                }
            };
            let u_lo = (xt - b).max(0.0).sqrt();
            let u_hi = (xt - mid).sqrt();
            sum += integrate_adaptive(&g, u_lo, u_hi, tol / 2.0)?;
        } else {
            sum += integrate_adaptive(&integrand, mid, b, tol / 2.0)?;
        }
        sum
    };
    if !raw.is_finite() {
        return Err(Error::Quadrature("non-finite elapsed time".into()));
    }
    Ok(direction * flip * raw)
}

/// Period of the closed orbit between the two turning points, for
/// `s = +1, branch +1, 2k < n, 0 < h < h*`.
pub fn period(h: f64, params: &MetricParams) -> Result<f64> {
    if params.s != SigmaSign::Positive || params.two_k_vs_n() != std::cmp::Ordering::Less {
        return Err(Error::Domain("periodic orbits exist for sign +1 with 2k < n".into()));
    }
    let hs = crate::first_integral::critical_h(params)?;
    if !(h > 0.0 && h < hs) {
        return Err(Error::Domain(format!(
            "periodic regime requires 0 < h < h* = {hs:.6} (got h = {h})"
        )));
    }
    let roots = turning_points(h, params)?;
    if roots.len() != 2 {
        return Err(Error::Domain(format!("expected two turning points, found {}", roots.len())));
    }
    Ok(2.0 * time_quadrature(roots[0], roots[1], h, params, Branch::Positive, 1.0)?)
}

/// Remaining |t| from `xi_from` down to the complete end `xi -> -inf`
/// (branch -1). Uses `w = e^{xi}`, in which the integrand
/// `1/sqrt(w^2 + |h w^n + s|^{1/k})` is regular at `w = 0`.
pub fn time_to_complete_end(xi_from: f64, h: f64, params: &MetricParams) -> Result<f64> {
    let sv = match params.s {
        SigmaSign::Zero => return Err(Error::InvalidParams("requires sigma_k of fixed sign".into())),
        other => other.value(),
    };
    let n = params.nf();
    let k = params.kf();
    let w_from = xi_from.exp();
    let f = move |w: f64| {
        let p = (h * w.powf(n) + sv).abs();
        1.0 / (w * w + p.powf(1.0 / k)).sqrt()
    };
    // The region must not contain a null point (h w^n + s = 0) below w_from.
    if sv * h < 0.0 {
        let w_null = (-sv / h).powf(1.0 / n);
        if w_null < w_from {
            return Err(Error::Quadrature("interval crosses a null point".into()));
        }
    }
    integrate_adaptive(&f, 0.0, w_from, 1e-10)
}

/// Remaining |t| from `xi_from` up to the degenerate end `xi -> +inf`
/// (branch -1, `2k < n`). Uses `w = e^{-beta xi}` with `beta = (n-2k)/2k`.
pub fn time_to_degenerate_end(xi_from: f64, h: f64, params: &MetricParams) -> Result<f64> {
    let sv = match params.s {
        SigmaSign::Zero => return Err(Error::InvalidParams("requires sigma_k of fixed sign".into())),
        other => other.value(),
    };
    if params.two_k_vs_n() != std::cmp::Ordering::Less {
        return Err(Error::Domain("the degenerate end at xi -> +inf needs 2k < n".into()));
    }
    let n = params.nf();
    let k = params.kf();
    let beta = (n - 2.0 * k) / (2.0 * k);
    let w_from = (-beta * xi_from).exp();
    // |D| = e^{(n-2k) xi} |h + s e^{-n xi}| and e^{-n xi} = w^{n/beta}.
    let f = move |w: f64| {
        let r = (h + sv * w.powf(n / beta)).abs();
        1.0 / (w * w + r.powf(1.0 / k)).sqrt()
    };
    Ok(integrate_adaptive(&f, 0.0, w_from, 1e-10)? / beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::first_integral::critical_h;
    use crate::ode::{integrate, IntegrationConfig};
    use crate::schouten::LogState;

    fn p52() -> MetricParams {
        MetricParams::new(5, 2, SigmaSign::Positive).unwrap()
    }

    #[test]
    fn round_sphere_time() {
        // xi = ln cosh t with h = 0: from xi = 0 to xi = ln cosh 2, t = 2.
        let t = time_quadrature(0.0, 2f64.cosh().ln(), 0.0, &p52(), Branch::Positive, 1.0).unwrap();
        assert!((t - 2.0).abs() <= 1e-9, "t = {t}");
    }

    #[test]
    fn symmetric_half_times_around_turning() {
        // Equal xi-offsets on both sides of the turning point take equal times.
        let params = p52();
        let h = 0.3;
        let roots = turning_points(h, &params).unwrap();
        let (lo, hi) = (roots[0], roots[1]);
        let mid = 0.5 * (lo + hi);
        let t_left = time_quadrature(lo, mid, h, &params, Branch::Positive, 1.0).unwrap();
        let t_right = time_quadrature(mid, hi, h, &params, Branch::Positive, 1.0).unwrap();
        // Not equal in general; symmetry is exact around each turning point:
        let d = 0.1;
        let a = time_quadrature(lo, lo + d, h, &params, Branch::Positive, 1.0).unwrap();
        let b = time_quadrature(lo, lo + d, h, &params, Branch::Positive, -1.0).unwrap();
        assert!((a + b).abs() < 1e-12);
        assert!(t_left > 0.0 && t_right > 0.0);
    }

    #[test]
    fn transit_equals_half_period() {
        let params = p52();
        let h = 0.3;
        let roots = turning_points(h, &params).unwrap();
        let transit = time_quadrature(roots[0], roots[1], h, &params, Branch::Positive, 1.0).unwrap();
        let t = period(h, &params).unwrap();
        assert!((2.0 * transit - t).abs() <= 1e-8, "{} vs {}", 2.0 * transit, t);
    }

    #[test]
    fn period_limits() {
        // T diverges at the separatrix limit h -> 0+ and tends to the
        // small-oscillation period 2 pi / sqrt(n - 2k) as h -> h*.
        let params = p52();
        let hs = critical_h(&params).unwrap();
        let t_small = period(1e-6, &params).unwrap();
        let t_mid = period(0.3, &params).unwrap();
        let t_near = period(hs - 1e-6, &params).unwrap();
        assert!(t_small > t_mid && t_mid > t_near, "{t_small} {t_mid} {t_near}");
        assert!(t_small > 15.0, "separatrix limit: {t_small}");
        let harmonic = 2.0 * std::f64::consts::PI; // n - 2k = 1
        assert!((t_near - harmonic).abs() < 0.01 * harmonic, "{t_near} vs {harmonic}");
    }

    #[test]
    fn period_rejects_boundary() {
        let params = p52();
        assert!(period(0.0, &params).is_err());
        let hs = critical_h(&params).unwrap();
        assert!(period(hs, &params).is_err());
        assert!(period(0.3, &MetricParams::new(3, 2, SigmaSign::Positive).unwrap()).is_err());
    }

    #[test]
    fn tiny_interval_hugging_a_turning_point() {
        // Sphere (h = 0): turning point at xi = 0 and t(xi) = acosh(e^xi),
        // so a sliver [0, 1e-7] has t = acosh(1 + 1e-7) ~ sqrt(2e-7).
        let t = time_quadrature(0.0, 1e-7, 0.0, &p52(), Branch::Positive, 1.0).unwrap();
        let expect = f64::acosh((1e-7f64).exp());
        assert!((t - expect).abs() < 1e-10, "{t} vs {expect}");
    }

    #[test]
    fn interior_tangency_is_rejected() {
        // At h = h* the well bottom sits exactly on the turning level: an
        // interval straddling it has infinite transit time.
        let params = p52();
        let hs = critical_h(&params).unwrap();
        let xi_star = 5f64.ln() / 4.0;
        let err = time_quadrature(xi_star - 0.2, xi_star + 0.2, hs, &params, Branch::Positive, 1.0);
        assert!(err.is_err());
    }

    #[test]
    fn interval_crossing_null_is_rejected() {
        // h < 0: the null point sits at xi+ = -(1/5) ln(-h); crossing it fails.
        let params = p52();
        let h = -0.5;
        let err = time_quadrature(-0.5, 1.0, h, &params, Branch::Positive, 1.0);
        assert!(err.is_err());
    }

    #[test]
    fn quadrature_matches_integration() {
        // Direct cross-check of the two time computations on a monotone leg.
        let params = p52();
        let h = 0.3;
        let roots = turning_points(h, &params).unwrap();
        let start = LogState::new(0.0, roots[0], 0.0);
        let cfg = IntegrationConfig { max_span: 8.0, ..Default::default() };
        let traj = integrate(&start, &params, &cfg).unwrap();
        // Find a forward sample well inside the rising leg.
        let s = traj
            .samples
            .iter()
            .find(|s| s.t > 0.0 && s.xi_t > 0.3 && s.xi < roots[1] - 0.2)
            .expect("rising sample");
        let t_quad = time_quadrature(roots[0], s.xi, h, &params, Branch::Positive, 1.0).unwrap();
        assert!((t_quad - s.t).abs() <= 1e-6, "{t_quad} vs {}", s.t);
    }

    #[test]
    fn complete_end_time_matches_hyperbolic_form() {
        // Hyperbolic profile (h = 0, branch -1): xi(t) = ln sinh(t+ - t), so
        // the time from xi0 to the complete end is t+ - t0 = asinh(e^{xi0})...
        // inverted: e^{xi} = sinh(t+ - t) gives t+ - t = asinh(e^{xi}).
        let params = MetricParams::new(4, 2, SigmaSign::Positive).unwrap();
        for xi0 in [-1.0f64, 0.0, 1.5] {
            let expect = f64::asinh(xi0.exp());
            let got = time_to_complete_end(xi0, 0.0, &params).unwrap();
            assert!((got - expect).abs() < 1e-9, "xi0={xi0}: {got} vs {expect}");
        }
    }
}
