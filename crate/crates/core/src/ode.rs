//! Adaptive integration of the reduced dynamics in `(xi, xi_t)`.
//!
//! The second-order form solved for `xi_tt` is
//!
//! ```text
//! xi_tt = (n s / 2k) e^{-2k xi} (1 - xi_t^2)^{1-k}
//!         - ((n - 2k) / 2k) (1 - xi_t^2),
//! ```
//!
//! which is singular on the null lines `xi_t = +-1` for `k >= 2`. Stepping
//! uses a Dormand-Prince 5(4) embedded pair in `t` away from the null lines.
//! Once `|1 - xi_t^2|` falls below the takeover threshold the integration
//! switches to `u = 1 - xi_t^2` as the independent variable, in which the
//! system is regular through `u = 0`; a fixed-step pass in `u` lands exactly
//! on the null point and produces the `NullPoint` event coordinates. The
//! first integral is never used to step or correct states, so the reported
//! drift is an honest error measure.

use crate::error::{Error, Result};
use crate::first_integral::{conserved_h, FirstIntegralValue};
use crate::params::{MetricParams, SigmaSign};
use crate::schouten::{Branch, LogState};

/// Tolerances and guards for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct IntegrationConfig {
    /// Relative local-error tolerance per step.
    pub rel_tol: f64,
    /// Absolute local-error tolerance per step.
    pub abs_tol: f64,
    /// Hard cap on the step size.
    pub max_step: f64,
    /// Distance of `|1 - xi_t^2|` at which the null-point handler takes
    /// over. Values below [`NULL_SWITCH_FLOOR`] are raised to it: for
    /// `k >= 2` the t-chart cannot resolve distances below `u^k` and the
    /// regularized endgame is accurate from the floor anyway.
    pub event_epsilon: f64,
    /// Maximum integration span in `t` per direction.
    pub max_span: f64,
    /// Stop (with `SpanExhausted`) once `xi` leaves `[xi_min, xi_max]`.
    /// Keeps complete/degenerate ends from driving the stepper into
    /// underflow, and bounds the `e^{n |xi|}` conditioning of the first
    /// integral when a run is meant for drift diagnostics.
    pub xi_min: f64,
    pub xi_max: f64,
}

/// Effective floor of the null-event takeover threshold.
pub const NULL_SWITCH_FLOOR: f64 = 1e-4;

/// Stop a leg once `|xi_t|` exceeds this (blow-up ends; the remaining time
/// to the boundary is ~ 1/|xi_t|, already below step resolution well before
/// f64 range becomes an issue).
pub const XI_T_GUARD: f64 = 1e8;

impl Default for IntegrationConfig {
    fn default() -> Self {
        IntegrationConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 0.5,
            event_epsilon: 1e-10,
            max_span: 50.0,
            xi_min: -30.0,
            xi_max: 30.0,
        }
    }
}

impl IntegrationConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.rel_tol, self.abs_tol, self.max_step, self.event_epsilon, self.max_span];
        if !positive.iter().all(|x| x.is_finite() && *x > 0.0) {
            return Err(Error::InvalidParams("integration tolerances must be positive and finite".into()));
        }
        if !(self.xi_min < self.xi_max) {
            return Err(Error::InvalidParams("xi_min must be below xi_max".into()));
        }
        Ok(())
    }

    /// Takeover distance: the stiffness of the t-chart near the null lines
    /// grows like `u^{1-k}`, so higher orders hand over earlier.
    fn switch_threshold(&self, k: u32) -> f64 {
        let floor = match k {
            0..=2 => NULL_SWITCH_FLOOR,
            3 => 1e-3,
            _ => 1e-2,
        };
        self.event_epsilon.max(floor)
    }
}

/// Events recorded along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventRecord {
    /// The solution reached `xi_t -> side (+-1)` at finite `(t, xi)`;
    /// `v_rr` blows up there while `v, v_r` stay bounded.
    NullPoint { t: f64, xi: f64, side: i8 },
    /// `xi_t = 0` crossing.
    TurningPoint { t: f64, xi: f64 },
    /// The initial state is the equilibrium; the trajectory is constant.
    Equilibrium { xi: f64 },
    /// Stopped by the span or `|xi|` guard without a terminal event.
    SpanExhausted { t: f64 },
}

impl EventRecord {
    pub fn t(&self) -> Option<f64> {
        match self {
            EventRecord::NullPoint { t, .. } | EventRecord::TurningPoint { t, .. } | EventRecord::SpanExhausted { t } => Some(*t),
            EventRecord::Equilibrium { .. } => None,
        }
    }
}

/// Integrated orbit: samples ordered by strictly increasing `t` (each with
/// `xi_tt`), the events met in both time directions, the initial first
/// integral, and the measured conservation drift.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<LogState>,
    pub events: Vec<EventRecord>,
    pub h0: FirstIntegralValue,
    pub drift: f64,
    pub branch: Branch,
    pub params: MetricParams,
}

impl Trajectory {
    pub fn first(&self) -> &LogState {
        self.samples.first().expect("trajectory is nonempty")
    }

    pub fn last(&self) -> &LogState {
        self.samples.last().expect("trajectory is nonempty")
    }

    pub fn null_events(&self) -> impl Iterator<Item = (f64, f64, i8)> + '_ {
        self.events.iter().filter_map(|e| match e {
            EventRecord::NullPoint { t, xi, side } => Some((*t, *xi, *side)),
            _ => None,
        })
    }

    pub fn turning_events(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.events.iter().filter_map(|e| match e {
            EventRecord::TurningPoint { t, xi } => Some((*t, *xi)),
            _ => None,
        })
    }
}

/// Right-hand side `xi_tt(xi, xi_t)` of the reduced dynamics.
pub fn rhs(state: &LogState, params: &MetricParams) -> Result<f64> {
    state.validate()?;
    let s = match params.s {
        SigmaSign::Zero => return Err(Error::InvalidParams("the reduced flow is defined for sigma_k of fixed sign".into())),
        other => other.value(),
    };
    let u = state.branch_indicator();
    if u == 0.0 {
        return Err(Error::SingularLocus);
    }
    let n = params.nf();
    let two_k = 2.0 * params.kf();
    let val = n * s / two_k * (-two_k * state.xi).exp() * u.powi(1 - params.k as i32)
        - (n - two_k) / two_k * u;
    if val.is_finite() {
        Ok(val)
    } else {
        Err(Error::NonFinite("xi_tt"))
    }
}

// Dormand-Prince 5(4) coefficients.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const ERR: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

type Y = [f64; 2]; // (xi, xi_t)

fn deriv(y: Y, params: &MetricParams) -> Result<Y> {
    let st = LogState::new(0.0, y[0], y[1]);
    Ok([y[1], rhs(&st, params)?])
}

/// One DP5(4) attempt from `(t, y)` with step `h` (signed). Returns the new
/// state, its derivative (FSAL), and the scaled error norm.
fn dp54_step(y: Y, f0: Y, h: f64, params: &MetricParams, cfg: &IntegrationConfig) -> Result<(Y, Y, f64)> {
    let mut k = [[0.0; 2]; 7];
    k[0] = f0;
    let stage = |i: usize, ks: &[[f64; 2]; 7]| -> Y {
        let mut yi = y;
        for (j, kj) in ks.iter().enumerate().take(i) {
            yi[0] += h * A[i - 1][j] * kj[0];
            yi[1] += h * A[i - 1][j] * kj[1];
        }
        yi
    };
    for i in 1..7 {
        let yi = stage(i, &k);
        k[i] = deriv(yi, params)?;
    }
    // Stage 7 input is the 5th-order solution itself (FSAL).
    let y5 = stage(6, &k);
    let f5 = k[6];
    let mut err_norm = 0.0;
    for d in 0..2 {
        let mut e = 0.0;
        for (i, ki) in k.iter().enumerate() {
            e += ERR[i] * ki[d];
        }
        e *= h;
        let sc = cfg.abs_tol + cfg.rel_tol * y[d].abs().max(y5[d].abs());
        err_norm += (e / sc) * (e / sc);
    }
    Ok((y5, f5, (err_norm / 2.0).sqrt()))
}

/// Cubic Hermite evaluation on [0, 1] for one state component.
fn hermite(theta: f64, y0: f64, f0: f64, y1: f64, f1: f64, h: f64) -> f64 {
    let t2 = theta * theta;
    let t3 = t2 * theta;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + theta;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1
}

/// Integrate the regular system in `u = 1 - xi_t^2` from the current state
/// down to `u = 0`, landing exactly on the null point. With
/// `G(xi, u) = (n s / 2k) e^{-2k xi} - ((n - 2k)/2k) u^k` the chain rule
/// gives the regular right-hand sides
/// `dt/du = -u^{k-1}/(2 xi_t G)` and `dxi/du = -u^{k-1}/(2 G)`,
/// where `xi_t = eta sqrt(1 - u)` with the frozen approach sign `eta`.
fn null_endgame(t0: f64, y0: Y, params: &MetricParams) -> (f64, f64, i8) {
    let s = params.s.value();
    let n = params.nf();
    let two_k = 2.0 * params.kf();
    let k = params.k;
    let eta = if y0[1] >= 0.0 { 1.0 } else { -1.0 };
    let u0 = 1.0 - y0[1] * y0[1];
    let g = |xi: f64, u: f64| n * s / two_k * (-two_k * xi).exp() - (n - two_k) / two_k * u.powi(k as i32);
    let f = |w: [f64; 2], u: f64| -> [f64; 2] {
        let xi_t = eta * (1.0 - u).sqrt();
        let gg = g(w[1], u);
        let common = -u.powi(k as i32 - 1) / (2.0 * gg);
        [common / xi_t, common]
    };
    // Fixed-step RK4 in u; the integrand is smooth on [0, u0].
    let steps = 64;
    let du = -u0 / steps as f64;
    let mut w = [t0, y0[0]];
    let mut u = u0;
    for _ in 0..steps {
        let k1 = f(w, u);
        let k2 = f([w[0] + 0.5 * du * k1[0], w[1] + 0.5 * du * k1[1]], u + 0.5 * du);
        let k3 = f([w[0] + 0.5 * du * k2[0], w[1] + 0.5 * du * k2[1]], u + 0.5 * du);
        let k4 = f([w[0] + du * k3[0], w[1] + du * k3[1]], u + du);
        w[0] += du / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        w[1] += du / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        u += du;
    }
    (w[0], w[1], eta as i8)
}

/// Whether the u-parametrized endgame is valid from `(y, u)`: the predicted
/// xi-excursion `|u|^k / (2k |G|)` must be small. True finite-time null
/// crossings have `G = O(e^{-2k xi*})` bounded away from zero, giving an
/// excursion of order `u^k`; asymptotic approaches to the null lines make
/// the excursion O(1) and keep the t-chart in charge.
fn endgame_applies(y: Y, u: f64, params: &MetricParams) -> bool {
    let n = params.nf();
    let two_k = 2.0 * params.kf();
    let g = n * params.s.value() / two_k * (-two_k * y[0]).exp()
        - (n - two_k) / two_k * u.powi(params.k as i32);
    let excursion = u.abs().powi(params.k as i32) / (two_k * g.abs());
    excursion.is_finite() && excursion <= 1e-2
}

struct Leg {
    samples: Vec<LogState>,
    events: Vec<EventRecord>,
}

/// Integrate one time direction (`dir = +-1`) from `(t0, y0)`.
fn integrate_leg(
    t0: f64,
    y0: Y,
    dir: f64,
    params: &MetricParams,
    cfg: &IntegrationConfig,
) -> Result<Leg> {
    let mut samples = Vec::new();
    let mut events = Vec::new();
    let mut t = t0;
    let mut y = y0;
    let mut f = deriv(y, params)?;
    let mut h = dir * 1e-3_f64.min(cfg.max_step);
    let switch = cfg.switch_threshold(params.k);
    let k_singular = params.k >= 2;
    let mut steps = 0usize;

    loop {
        steps += 1;
        if steps > 500_000 {
            return Err(Error::Domain("step budget exceeded".into()));
        }
        let remaining = cfg.max_span - (t - t0).abs();
        // Complete/degenerate ends reach xi_t ~ e^{|xi|}; past the
        // first-derivative guard the remaining t-interval is below
        // resolution and the leg ends without a terminal event.
        if remaining <= 0.0 || y[0] < cfg.xi_min || y[0] > cfg.xi_max || y[1].abs() > XI_T_GUARD {
            events.push(EventRecord::SpanExhausted { t });
            break;
        }
        if h.abs() > remaining {
            h = dir * remaining;
        }
        if h.abs() > cfg.max_step {
            h = dir * cfg.max_step;
        }
        if h.abs() < 16.0 * f64::EPSILON * t.abs().max(1.0) {
            // Step collapse. A genuine null approach hands over to the
            // endgame; a state that has merged into the null line to machine
            // precision (asymptotic approach) has left the resolvable region;
            // anything else is a diagnostic error with the last good state.
            let u = 1.0 - y[1] * y[1];
            if k_singular && u.abs() < 0.5 && endgame_applies(y, u, params) {
                let (te, xie, side) = null_endgame(t, y, params);
                events.push(EventRecord::NullPoint { t: te, xi: xie, side });
                break;
            }
            if u.abs() <= 1e-10 || y[1].abs() >= 1e6 {
                events.push(EventRecord::SpanExhausted { t });
                break;
            }
            return Err(Error::StepUnderflow { t, xi: y[0], xi_t: y[1] });
        }

        let (y_new, f_new, err) = match dp54_step(y, f, h, params, cfg) {
            Ok(v) => v,
            Err(Error::SingularLocus) | Err(Error::NonFinite(_)) => {
                // A stage landed on or past the null line; retry shorter.
                h *= 0.25;
                continue;
            }
            Err(e) => return Err(e),
        };
        if !err.is_finite() {
            h *= 0.25;
            continue;
        }
        if err > 1.0 {
            let fac = (0.9 * err.powf(-0.2)).max(0.2);
            h *= fac;
            continue;
        }

        // Reject steps that jump across a null line: the branch indicator
        // must keep its sign for k >= 2.
        let u_old = 1.0 - y[1] * y[1];
        let u_new = 1.0 - y_new[1] * y_new[1];
        if k_singular && u_old * u_new < 0.0 {
            h *= 0.5;
            continue;
        }

        // Accepted.
        let t_new = t + h;
        if y[1] * y_new[1] < 0.0 {
            // Turning point inside the step: refine on the Hermite model.
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let v = hermite(mid, y[1], f[1], y_new[1], f_new[1], h);
                if v == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (v > 0.0) == (y[1] > 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let theta = 0.5 * (lo + hi);
            events.push(EventRecord::TurningPoint {
                t: t + theta * h,
                xi: hermite(theta, y[0], f[0], y_new[0], f_new[0], h),
            });
        }

        t = t_new;
        y = y_new;
        f = f_new;
        samples.push(LogState::with_xi_tt(t, y[0], y[1], f[1]));

        // Null-point takeover: |u| small, shrinking along this direction,
        // and the null line actually reachable in finite time (asymptotic
        // approaches like the round sphere shrink u without ever crossing;
        // they are told apart by the predicted xi-excursion of the endgame).
        if k_singular && u_new.abs() <= switch {
            let du_dt = -2.0 * y[1] * f[1];
            let approaching = u_new * du_dt * dir < 0.0;
            if approaching && endgame_applies(y, u_new, params) {
                let (te, xie, side) = null_endgame(t, y, params);
                events.push(EventRecord::NullPoint { t: te, xi: xie, side });
                break;
            }
        }

        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= fac;
    }
    Ok(Leg { samples, events })
}

/// Integrate both time directions from `initial`, merge into one trajectory
/// with strictly increasing `t`, and attach conservation diagnostics.
pub fn integrate(initial: &LogState, params: &MetricParams, cfg: &IntegrationConfig) -> Result<Trajectory> {
    cfg.validate()?;
    initial.validate()?;
    if params.s == SigmaSign::Zero {
        return Err(Error::InvalidParams("integration requires sigma_k of fixed sign".into()));
    }
    let u0 = initial.branch_indicator();
    if u0.abs() <= cfg.event_epsilon {
        return Err(Error::SingularLocus);
    }
    let branch = initial.branch()?;
    let h0 = conserved_h(initial, params)?;
    let y0 = [initial.xi, initial.xi_t];
    let f0 = rhs(initial, params)?;
    let first = LogState::with_xi_tt(initial.t, initial.xi, initial.xi_t, f0);

    // Equilibrium start: constant trajectory.
    if initial.xi_t.abs() < 1e-12 && f0.abs() < 1e-12 {
        let samples = vec![
            LogState::with_xi_tt(initial.t - cfg.max_span, initial.xi, 0.0, 0.0),
            first,
            LogState::with_xi_tt(initial.t + cfg.max_span, initial.xi, 0.0, 0.0),
        ];
        return Ok(Trajectory {
            samples,
            events: vec![EventRecord::Equilibrium { xi: initial.xi }],
            h0,
            drift: 0.0,
            branch,
            params: *params,
        });
    }

    let back = integrate_leg(initial.t, y0, -1.0, params, cfg)?;
    let fwd = integrate_leg(initial.t, y0, 1.0, params, cfg)?;

    let mut samples = Vec::with_capacity(back.samples.len() + fwd.samples.len() + 1);
    samples.extend(back.samples.iter().rev().cloned());
    samples.push(first);
    samples.extend(fwd.samples.iter().cloned());

    let mut events = back.events;
    events.extend(fwd.events);
    events.sort_by(|a, b| {
        a.t().unwrap_or(f64::NEG_INFINITY)
            .partial_cmp(&b.t().unwrap_or(f64::NEG_INFINITY))
            .unwrap()
    });

    let mut traj = Trajectory { samples, events, h0, drift: 0.0, branch, params: *params };
    traj.drift = drift_report(&traj)?;
    Ok(traj)
}

/// Maximum deviation of the conserved quantity over the samples,
/// `max_t |h(state(t)) - h0|`.
pub fn drift_report(traj: &Trajectory) -> Result<f64> {
    if traj.samples.is_empty() {
        return Err(Error::Domain("drift of an empty trajectory".into()));
    }
    let mut worst = 0.0f64;
    for s in &traj.samples {
        let h = conserved_h(s, &traj.params)?.h;
        worst = worst.max((h - traj.h0.h).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::first_integral::{critical_h, null_points, turning_points};
    use crate::schouten::sigma_l_log;
    use crate::util::SplitMix64;

    fn p52() -> MetricParams {
        MetricParams::new(5, 2, SigmaSign::Positive).unwrap()
    }

    #[test]
    fn rhs_values() {
        // Equilibrium: e^{2k xi*} = n/(n-2k) makes xi_tt vanish.
        let xi_star = 5f64.ln() / 4.0;
        let v = rhs(&LogState::new(0.0, xi_star, 0.0), &p52()).unwrap();
        assert!(v.abs() < 1e-14);

        // At the origin of the phase plane the closed form gives
        // (5/4) - (1/4) = 1, consistent with the round sphere xi_tt = sech^2.
        let v = rhs(&LogState::new(0.0, 0.0, 0.0), &p52()).unwrap();
        assert!((v - 1.0).abs() < 1e-14);

        // Round-sphere states satisfy xi_tt = 1 - xi_t^2.
        for tau in [-2.0, -0.3, 0.6, 1.7] {
            let st = LogState::new(tau, f64::cosh(tau).ln(), f64::tanh(tau));
            let v = rhs(&st, &p52()).unwrap();
            let expect = 1.0 - st.xi_t * st.xi_t;
            assert!((v - expect).abs() < 1e-12, "tau={tau}: {v} vs {expect}");
        }

        assert_eq!(rhs(&LogState::new(0.0, 0.0, 1.0), &p52()), Err(Error::SingularLocus));
    }

    #[test]
    fn rhs_satisfies_curvature_equation() {
        // Substituting xi_tt back into the log curvature formula must return
        // the normalized constant, on both branches and both signs.
        let mut rng = SplitMix64::new(17);
        for _ in 0..500 {
            let n = rng.uniform_u32(3, 8);
            let k = rng.uniform_u32(2, n.min(4));
            let s = if rng.next_f64() < 0.5 { SigmaSign::Positive } else { SigmaSign::Negative };
            let params = MetricParams::new(n, k, s).unwrap();
            let xi_t = if rng.next_f64() < 0.5 {
                rng.uniform(-0.9, 0.9)
            } else {
                rng.uniform(1.1, 2.0) * if rng.next_f64() < 0.5 { 1.0 } else { -1.0 }
            };
            let st = LogState::new(0.0, rng.uniform(-1.0, 1.0), xi_t);
            let xi_tt = rhs(&st, &params).unwrap();
            let full = LogState::with_xi_tt(st.t, st.xi, st.xi_t, xi_tt);
            let sigma = sigma_l_log(&full, k, &params).unwrap();
            let target = params.sigma_target();
            assert!((sigma - target).abs() <= 1e-10 * (1.0 + target.abs()), "n={n} k={k}: {sigma} vs {target}");
        }
    }

    #[test]
    fn rhs_conserves_first_integral_analytically() {
        // dh/dt = dh/dxi * xi_t + dh/dxi_t * xi_tt must vanish along the flow.
        let mut rng = SplitMix64::new(29);
        for _ in 0..500 {
            let n = rng.uniform_u32(3, 8);
            let k = rng.uniform_u32(2, n.min(4));
            let s = if rng.next_f64() < 0.5 { SigmaSign::Positive } else { SigmaSign::Negative };
            let params = MetricParams::new(n, k, s).unwrap();
            let xi_t = if rng.next_f64() < 0.5 {
                rng.uniform(-0.9, 0.9)
            } else {
                rng.uniform(1.1, 1.8) * if rng.next_f64() < 0.5 { 1.0 } else { -1.0 }
            };
            let xi = rng.uniform(-0.8, 0.8);
            let st = LogState::new(0.0, xi, xi_t);
            let xi_tt = rhs(&st, &params).unwrap();
            let nf = params.nf();
            let kf = params.kf();
            let sv = s.value();
            let u = 1.0 - xi_t * xi_t;
            let e1 = ((2.0 * kf - nf) * xi).exp();
            let dh_dxi = (2.0 * kf - nf) * e1 * u.powi(k as i32) + sv * nf * (-nf * xi).exp();
            let dh_dxit = e1 * kf * u.powi(k as i32 - 1) * (-2.0 * xi_t);
            let dh_dt = dh_dxi * xi_t + dh_dxit * xi_tt;
            let scale = e1.abs() * u.abs().powi(k as i32) + (-nf * xi).exp();
            assert!(dh_dt.abs() <= 1e-12 * (1.0 + scale), "n={n} k={k}: {dh_dt}");
        }
    }

    #[test]
    fn reproduces_round_sphere() {
        // The h = 0 orbit is the separatrix: deviations transverse to the
        // level set are amplified like e^{3 xi}, so the sup-norm target over
        // a total span of 10 needs tighter-than-default local tolerances.
        let cfg = IntegrationConfig {
            rel_tol: 1e-13,
            abs_tol: 1e-14,
            max_span: 5.0,
            ..Default::default()
        };
        let traj = integrate(&LogState::new(0.0, 0.0, 0.0), &p52(), &cfg).unwrap();
        let mut worst = 0.0f64;
        for s in &traj.samples {
            worst = worst.max((s.xi - s.t.cosh().ln()).abs());
        }
        assert!(worst <= 1e-8, "sup-norm {worst}");

        // Drift at default tolerances over the full +-10 span.
        let cfg = IntegrationConfig { max_span: 10.0, ..Default::default() };
        let traj = integrate(&LogState::new(0.0, 0.0, 0.0), &p52(), &cfg).unwrap();
        assert!(traj.drift <= 1e-9, "drift {}", traj.drift);
    }

    #[test]
    fn null_events_for_negative_h() {
        // h = -0.5: both directions end on the null line at
        // xi+ = -(1/5) ln 0.5, with opposite sides.
        let params = p52();
        let h = -0.5;
        let xi_minus = turning_points(h, &params).unwrap()[0];
        let xi_plus = null_points(h, &params).unwrap()[0];
        let traj = integrate(&LogState::new(0.0, xi_minus, 0.0), &params, &IntegrationConfig::default()).unwrap();
        let nulls: Vec<_> = traj.null_events().collect();
        assert_eq!(nulls.len(), 2, "events: {:?}", traj.events);
        let sides: Vec<i8> = nulls.iter().map(|(_, _, s)| *s).collect();
        assert!(sides.contains(&1) && sides.contains(&-1));
        for (_, xi, _) in &nulls {
            assert!((xi - xi_plus).abs() < 1e-6, "xi = {xi} vs {xi_plus}");
        }
        assert!((xi_plus - (-(0.5f64.ln()) / 5.0)).abs() < 1e-12);
    }

    #[test]
    fn cylinder_start_is_equilibrium() {
        let xi_star = 5f64.ln() / 4.0;
        let traj = integrate(&LogState::new(0.0, xi_star, 0.0), &p52(), &IntegrationConfig::default()).unwrap();
        assert!(matches!(traj.events.as_slice(), [EventRecord::Equilibrium { .. }]));
        assert_eq!(traj.drift, 0.0);
    }

    #[test]
    fn singular_start_is_rejected() {
        let err = integrate(&LogState::new(0.0, 0.0, 1.0), &p52(), &IntegrationConfig::default());
        assert_eq!(err.unwrap_err(), Error::SingularLocus);
    }

    #[test]
    fn periodic_orbit_has_turning_events() {
        let params = p52();
        let roots = turning_points(0.3, &params).unwrap();
        let cfg = IntegrationConfig { max_span: 12.0, ..Default::default() };
        let traj = integrate(&LogState::new(0.0, roots[0], 0.0), &params, &cfg).unwrap();
        let turnings: Vec<_> = traj.turning_events().collect();
        assert!(turnings.len() >= 3, "turnings: {turnings:?}");
        // All turning xi values sit on one of the two turning points.
        for (_, xi) in &turnings {
            let d0 = (xi - roots[0]).abs();
            let d1 = (xi - roots[1]).abs();
            assert!(d0.min(d1) < 1e-7, "xi = {xi}");
        }
        assert!(traj.null_events().count() == 0);
        assert!(traj.drift <= 1e-8 * (1.0 + traj.h0.h.abs()));
    }

    #[test]
    fn near_critical_h_exhausts_span() {
        let params = p52();
        let hs = critical_h(&params).unwrap();
        let h = hs - 1e-9;
        let roots = turning_points(h, &params).unwrap();
        let cfg = IntegrationConfig { max_span: 20.0, ..Default::default() };
        let traj = integrate(&LogState::new(0.0, roots[0], 0.0), &params, &cfg).unwrap();
        assert!(traj.events.iter().any(|e| matches!(e, EventRecord::SpanExhausted { .. })));
    }

    #[test]
    fn drift_grows_with_loose_tolerances() {
        let cfg_tight = IntegrationConfig { max_span: 10.0, ..Default::default() };
        let cfg_loose = IntegrationConfig { rel_tol: 1e-3, abs_tol: 1e-5, max_span: 10.0, ..Default::default() };
        let params = p52();
        let roots = turning_points(0.3, &params).unwrap();
        let start = LogState::new(0.0, roots[0], 0.0);
        let tight = integrate(&start, &params, &cfg_tight).unwrap();
        let loose = integrate(&start, &params, &cfg_loose).unwrap();
        assert!(loose.drift > tight.drift, "loose {} tight {}", loose.drift, tight.drift);
    }

    #[test]
    fn branch_is_invariant_along_trajectories() {
        let mut rng = SplitMix64::new(41);
        for _ in 0..20 {
            let n = rng.uniform_u32(3, 8);
            let k = rng.uniform_u32(2, n.min(4));
            let s = if rng.next_f64() < 0.5 { SigmaSign::Positive } else { SigmaSign::Negative };
            let params = MetricParams::new(n, k, s).unwrap();
            let xi_t = if rng.next_f64() < 0.5 { rng.uniform(-0.8, 0.8) } else { rng.uniform(1.1, 1.6) };
            let st = LogState::new(0.0, rng.uniform(-0.5, 0.5), xi_t);
            if conserved_h(&st, &params).is_err() {
                continue;
            }
            let cfg = IntegrationConfig { max_span: 5.0, xi_min: -6.0, xi_max: 6.0, ..Default::default() };
            let traj = integrate(&st, &params, &cfg).unwrap();
            for s in &traj.samples {
                assert_eq!(s.branch().unwrap(), traj.branch);
            }
        }
    }
}
