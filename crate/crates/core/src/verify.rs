//! Numerical verification suites. Each suite runs a group of acceptance
//! checks at pinned tolerances and reports one named pass/fail result per
//! check; the CLI `verify` command and the acceptance test target both drive
//! these functions. Tolerances live in [`Tolerances`] so tests can inject
//! corrupted values and watch the named check fail.

use std::cmp::Ordering;

use crate::classifier::{
    classify, endpoint_asymptotics, orientation_inverted, CasePath, EndpointBehavior,
    SolutionClass, VrLimit, XiTtSign,
};
use crate::closed_forms::{self, ClosedForm, FlatFamily};
use crate::error::{Error, Result};
use crate::first_integral::{conserved_h, critical_h, mass_m, profile_d, turning_points};
use crate::ode::{integrate, EventRecord, IntegrationConfig, Trajectory};
use crate::params::{MetricParams, SigmaSign};
use crate::quadrature::{period, time_quadrature, time_to_complete_end, time_to_degenerate_end};
use crate::schouten::{cone_class, from_log, sigma_l_log, Branch, ConeClass, LogState};
use crate::util::{golden_min, linear_fit, SplitMix64};

/// Pinned verification tolerances. Defaults are the acceptance values.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Sphere sigma_k reproduction, relative.
    pub sphere_normalization_rel: f64,
    /// Conservation drift bound, scaled by `1 + |h0|`.
    pub conservation_drift_scale: f64,
    /// h* agreement with the frozen reference values, absolute.
    pub threshold_abs: f64,
    /// `M(h*) = 1`, absolute.
    pub mass_at_threshold_abs: f64,
    /// Quadrature vs integration elapsed time, absolute.
    pub oracle_time_abs: f64,
    /// Return-map closure in phase space, absolute.
    pub return_map_abs: f64,
    /// Period agreement, relative.
    pub period_rel: f64,
    /// Blow-up slope agreement, relative.
    pub blowup_slope_rel: f64,
    /// Near-event first-derivative limit, absolute.
    pub event_side_abs: f64,
    /// Complete-boundary exponent (-2), relative.
    pub hyperbolic_exponent_rel: f64,
    /// Power-degeneracy exponent, relative.
    pub degeneracy_exponent_rel: f64,
    /// Conical exponent, relative.
    pub conical_exponent_rel: f64,
    /// Holder leading-correction exponent, relative.
    pub holder_exponent_rel: f64,
    /// Flat-family curvature residual, absolute.
    pub flat_residual_abs: f64,
    /// Closed-form curvature residual, absolute.
    pub closed_form_residual_abs: f64,
    /// Closed-form first-integral constancy, absolute.
    pub closed_form_h_abs: f64,
    /// Integrator reproduction of closed forms, sup-norm.
    pub reproduction_sup_abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            sphere_normalization_rel: 1e-10,
            conservation_drift_scale: 1e-8,
            threshold_abs: 1e-4,
            mass_at_threshold_abs: 1e-6,
            oracle_time_abs: 1e-6,
            return_map_abs: 1e-6,
            period_rel: 1e-5,
            blowup_slope_rel: 0.05,
            event_side_abs: 1e-3,
            hyperbolic_exponent_rel: 0.01,
            degeneracy_exponent_rel: 0.02,
            conical_exponent_rel: 0.02,
            holder_exponent_rel: 0.02,
            flat_residual_abs: 1e-9,
            closed_form_residual_abs: 1e-9,
            closed_form_h_abs: 1e-12,
            reproduction_sup_abs: 1e-8,
        }
    }
}

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        CheckResult { name: name.to_string(), passed, detail }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Conservation,
    ClosedForms,
    Exponents,
    Classification,
}

impl Suite {
    pub fn parse(name: &str) -> Result<Suite> {
        match name {
            "all" => Ok(Suite::All),
            "conservation" => Ok(Suite::Conservation),
            "closed-forms" => Ok(Suite::ClosedForms),
            "exponents" => Ok(Suite::Exponents),
            "classification" => Ok(Suite::Classification),
            other => Err(Error::InvalidParams(format!(
                "unknown suite '{other}' (expected all|conservation|closed-forms|exponents|classification)"
            ))),
        }
    }
}

/// Run one suite (or all of them) with the given seed.
pub fn run_suite(suite: Suite, seed: u64, tol: &Tolerances) -> Vec<CheckResult> {
    match suite {
        Suite::All => {
            let mut out = suite_closed_forms(tol);
            out.extend(suite_conservation(seed, tol));
            out.extend(suite_exponents(tol));
            out.extend(suite_classification(seed, tol));
            out
        }
        Suite::ClosedForms => suite_closed_forms(tol),
        Suite::Conservation => suite_conservation(seed, tol),
        Suite::Exponents => suite_exponents(tol),
        Suite::Classification => suite_classification(seed, tol),
    }
}

fn params(n: u32, k: u32, s: SigmaSign) -> MetricParams {
    MetricParams::new(n, k, s).expect("valid parameters")
}

/// A state on the level set `h` at abscissa `xi0`, with `xi_t` of the given
/// sign (initial-data construction; the integrator itself never projects).
pub fn state_on_level(params: &MetricParams, h: f64, branch: Branch, xi0: f64, xi_t_sign: f64) -> Result<LogState> {
    let d = profile_d(xi0, h, params);
    let parity = if params.k % 2 == 0 { 1.0 } else { branch.value() };
    if d * parity <= 0.0 {
        return Err(Error::Domain(format!("xi0 = {xi0} is outside the branch region (D = {d})")));
    }
    let root = d.abs().powf(1.0 / params.kf());
    let xi_t_sq = 1.0 - branch.value() * root;
    if xi_t_sq < 0.0 {
        return Err(Error::Domain(format!("xi0 = {xi0} is outside the orbit (xi_t^2 = {xi_t_sq})")));
    }
    Ok(LogState::new(0.0, xi0, xi_t_sign.signum() * xi_t_sq.sqrt()))
}

// ---------------------------------------------------------------------------
// closed-forms suite (normalization, flat families, reference invariants)
// ---------------------------------------------------------------------------

pub fn suite_closed_forms(tol: &Tolerances) -> Vec<CheckResult> {
    let mut out = Vec::new();
    out.push(check_sphere_normalization(tol));
    out.push(check_flat_family_residuals(tol));
    out.push(check_reference_residuals(tol));
    out.push(check_reference_h_constancy(tol));
    out.push(check_integrator_reproduces_closed_forms(tol));
    out
}

fn check_sphere_normalization(tol: &Tolerances) -> CheckResult {
    let mut worst = 0.0f64;
    let mut worst_at = String::new();
    for (n, k) in [(4, 2), (5, 2), (6, 3)] {
        let p = params(n, k, SigmaSign::Positive);
        let target = p.sigma_norm();
        for rho in [0.7, 1.0, 1.9] {
            let sphere = closed_forms::round_sphere(rho).expect("rho > 0");
            for i in 0..100 {
                let r = 0.05 * (20.0f64 / 0.05).powf(i as f64 / 99.0);
                let jet = sphere.jet(r).expect("valid radius");
                let sigma = crate::schouten::sigma_k_radial(&jet, &p).expect("finite");
                let rel = (sigma - target).abs() / target;
                if rel > worst {
                    worst = rel;
                    worst_at = format!("(n,k)=({n},{k}) rho={rho} r={r:.3}");
                }
            }
        }
    }
    CheckResult::new(
        "A1.sphere-normalization",
        worst <= tol.sphere_normalization_rel,
        format!("max rel err {worst:.3e} at {worst_at} (tol {:.1e})", tol.sphere_normalization_rel),
    )
}

fn check_flat_family_residuals(tol: &Tolerances) -> CheckResult {
    // Grid windows keep the evaluated terms of the curvature formula small
    // enough that the absolute residual bound is meaningful: `e^{2k xi}`
    // blows up toward the sinh singularity at t0 when 2k < n and toward
    // large |t - t0| when 2k > n, so the |a (t - t0)| window is clipped on
    // the corresponding side (|a| = 1/4 for both parameter pairs here).
    let mut worst = 0.0f64;
    let mut worst_at = String::new();
    for (n, k) in [(5u32, 2u32), (3, 2)] {
        let p = params(n, k, SigmaSign::Zero);
        let grow_at_infinity = 2 * k > n;
        let (sinh_lo, sinh_hi) = if grow_at_infinity { (2.4, 6.2) } else { (2.4, 12.0) };
        let cosh_hi = if grow_at_infinity { 6.0 } else { 8.0 };
        let mut families = vec![
            (closed_forms::flat_family(FlatFamily::Linear { positive_slope: true }, 0.0, 0.2, &p), (-6.0, 6.0)),
            (closed_forms::flat_family(FlatFamily::Linear { positive_slope: false }, 0.0, -0.1, &p), (-6.0, 6.0)),
            (closed_forms::flat_family(FlatFamily::Cosh, 0.1, 0.0, &p), (-cosh_hi, cosh_hi)),
        ];
        families.push((closed_forms::flat_family(FlatFamily::Sinh, 0.0, 0.0, &p), (sinh_lo, sinh_hi)));
        families.push((closed_forms::flat_family(FlatFamily::Sinh, 0.0, 0.0, &p), (-sinh_hi, -sinh_lo)));
        for (form, (lo, hi)) in families {
            let form = form.expect("constructible");
            for i in 0..1000 {
                let t = lo + (hi - lo) * i as f64 / 999.0;
                let st = form.log_state(t).expect("inside domain");
                let res = sigma_l_log(&st, k, &p).expect("finite").abs();
                if res > worst {
                    worst = res;
                    worst_at = format!("{} (n,k)=({n},{k}) t={t:.3}", form.name());
                }
            }
        }
    }
    CheckResult::new(
        "A8.flat-family-residuals",
        worst <= tol.flat_residual_abs,
        format!("max |sigma_k| {worst:.3e} at {worst_at} (tol {:.1e})", tol.flat_residual_abs),
    )
}

/// Closed forms satisfy the curvature equation with their nominal constant.
fn check_reference_residuals(tol: &Tolerances) -> CheckResult {
    let mut worst = 0.0f64;
    let mut worst_at = String::new();
    let cases: Vec<(MetricParams, ClosedForm, f64, (f64, f64))> = vec![
        {
            let p = params(5, 2, SigmaSign::Positive);
            (p, closed_forms::round_sphere(1.0).unwrap(), p.sigma_norm(), (-5.0, 5.0))
        },
        {
            let p = params(6, 3, SigmaSign::Positive);
            (p, closed_forms::round_sphere(2.0).unwrap(), p.sigma_norm(), (-5.0, 5.0))
        },
        {
            let p = params(5, 2, SigmaSign::Positive);
            let hs = critical_h(&p).unwrap();
            (p, closed_forms::cylinder(&p, hs).unwrap(), p.sigma_norm(), (-5.0, 5.0))
        },
        {
            let p = params(4, 2, SigmaSign::Positive);
            (p, closed_forms::hyperbolic(&p).unwrap(), p.sigma_norm(), (-5.0, -0.05))
        },
        {
            let p = params(5, 3, SigmaSign::Negative);
            (p, closed_forms::hyperbolic(&p).unwrap(), -p.sigma_norm(), (-5.0, -0.05))
        },
    ];
    for (p, form, target, (lo, hi)) in cases {
        for i in 0..1000 {
            let t = lo + (hi - lo) * i as f64 / 999.0;
            let st = form.log_state(t).expect("inside domain");
            let res = (sigma_l_log(&st, p.k, &p).expect("finite") - target).abs();
            if res > worst {
                worst = res;
                worst_at = format!("{} t={t:.3}", form.name());
            }
        }
    }
    CheckResult::new(
        "CF.reference-residuals",
        worst <= tol.closed_form_residual_abs,
        format!("max residual {worst:.3e} at {worst_at} (tol {:.1e})", tol.closed_form_residual_abs),
    )
}

fn check_reference_h_constancy(tol: &Tolerances) -> CheckResult {
    let mut worst = 0.0f64;
    let mut worst_at = String::new();
    let cases: Vec<(MetricParams, ClosedForm, (f64, f64))> = vec![
        (params(5, 2, SigmaSign::Positive), closed_forms::round_sphere(1.3).unwrap(), (-5.0, 5.0)),
        {
            let p = params(3, 2, SigmaSign::Negative);
            let hs = critical_h(&p).unwrap();
            (p, closed_forms::cylinder(&p, hs).unwrap(), (-5.0, 5.0))
        },
        // The hyperbolic grid stays at t <= -0.5: closer to the boundary
        // e^{-n xi} grows and the measured h picks up pure rounding.
        (params(4, 2, SigmaSign::Positive), closed_forms::hyperbolic(&params(4, 2, SigmaSign::Positive)).unwrap(), (-5.0, -0.5)),
    ];
    for (p, form, (lo, hi)) in cases {
        let h0 = conserved_h(&form.log_state(lo).unwrap(), &p).unwrap().h;
        for i in 0..1000 {
            let t = lo + (hi - lo) * i as f64 / 999.0;
            let st = form.log_state(t).unwrap();
            let dev = (conserved_h(&st, &p).unwrap().h - h0).abs();
            if dev > worst {
                worst = dev;
                worst_at = format!("{} t={t:.3}", form.name());
            }
        }
    }
    CheckResult::new(
        "CF.first-integral-constancy",
        worst <= tol.closed_form_h_abs,
        format!("max |h - h0| {worst:.3e} at {worst_at} (tol {:.1e})", tol.closed_form_h_abs),
    )
}

fn check_integrator_reproduces_closed_forms(tol: &Tolerances) -> CheckResult {
    let mut worst = 0.0f64;
    let mut worst_at = String::new();
    // Span 5 total; the sphere separatrix amplifies transverse error like
    // e^{3 xi}, so the reproduction check runs at tightened tolerances.
    let cfg = IntegrationConfig { rel_tol: 1e-13, abs_tol: 1e-14, max_span: 2.5, ..Default::default() };
    let cases: Vec<(MetricParams, ClosedForm, f64)> = vec![
        (params(5, 2, SigmaSign::Positive), closed_forms::round_sphere(1.0).unwrap(), 0.7),
        {
            let p = params(5, 2, SigmaSign::Positive);
            let hs = critical_h(&p).unwrap();
            (p, closed_forms::cylinder(&p, hs).unwrap(), 0.0)
        },
        (params(4, 2, SigmaSign::Positive), closed_forms::hyperbolic(&params(4, 2, SigmaSign::Positive)).unwrap(), -6.0),
    ];
    for (p, form, t0) in cases {
        let start = form.log_state(t0).unwrap();
        let traj = integrate(&start, &p, &cfg).expect("integrates");
        for s in &traj.samples {
            if let Ok(reference) = form.log_state(s.t) {
                let dev = (s.xi - reference.xi).abs().max((s.xi_t - reference.xi_t).abs());
                if dev > worst {
                    worst = dev;
                    worst_at = format!("{} t={:.3}", form.name(), s.t);
                }
            }
        }
    }
    CheckResult::new(
        "CF.integrator-reproduction",
        worst <= tol.reproduction_sup_abs,
        format!("sup-norm {worst:.3e} at {worst_at} (tol {:.1e})", tol.reproduction_sup_abs),
    )
}

// ---------------------------------------------------------------------------
// conservation suite (drift, oracle equivalence, periodicity)
// ---------------------------------------------------------------------------

pub fn suite_conservation(seed: u64, tol: &Tolerances) -> Vec<CheckResult> {
    let mut out = Vec::new();
    out.push(check_randomized_drift(seed, tol));
    out.push(check_oracle_equivalence(seed.wrapping_add(1), tol));
    out.push(check_periodicity(tol));
    out
}

/// Draw a random admissible fixed-sign scenario and a start state on it.
fn random_scenario(rng: &mut SplitMix64, want_branch: Branch) -> (MetricParams, LogState) {
    loop {
        let n = rng.uniform_u32(3, 8);
        let k = rng.uniform_u32(2, n.min(4));
        let s = if rng.next_f64() < 0.5 { SigmaSign::Positive } else { SigmaSign::Negative };
        let p = params(n, k, s);
        let xi_t = match want_branch {
            Branch::Positive => rng.uniform(-0.85, 0.85),
            Branch::Negative => rng.uniform(1.1, 1.8) * if rng.next_f64() < 0.5 { 1.0 } else { -1.0 },
        };
        let st = LogState::new(0.0, rng.uniform(-0.5, 0.5), xi_t);
        if conserved_h(&st, &p).is_ok() {
            return (p, st);
        }
    }
}

fn check_randomized_drift(seed: u64, tol: &Tolerances) -> CheckResult {
    let mut rng = SplitMix64::new(seed);
    let mut worst = 0.0f64;
    let mut worst_at = String::new();
    for trial in 0..20 {
        let want = if trial % 2 == 0 { Branch::Positive } else { Branch::Negative };
        let (p, st) = random_scenario(&mut rng, want);
        // The measured drift is amplified by |dh/dxi| ~ n e^{-n xi} at
        // negative xi, both through the evaluation of h and through the
        // projection of local stepping error; the floor keeps the run in
        // the region where the diagnostic reflects the integrator.
        let cfg = IntegrationConfig {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            max_span: 8.0,
            xi_min: -5.0 / p.nf(),
            xi_max: 8.0,
            ..Default::default()
        };
        let traj = integrate(&st, &p, &cfg).expect("integrates");
        let scaled = traj.drift / (1.0 + traj.h0.h.abs());
        if scaled > worst {
            worst = scaled;
            worst_at = format!("n={} k={} s={} branch={}", p.n, p.k, p.s, traj.branch);
        }
    }
    CheckResult::new(
        "A2.conservation-drift",
        worst <= tol.conservation_drift_scale,
        format!("max drift/(1+|h0|) {worst:.3e} on {worst_at} (tol {:.1e})", tol.conservation_drift_scale),
    )
}

fn check_oracle_equivalence(seed: u64, tol: &Tolerances) -> CheckResult {
    let mut rng = SplitMix64::new(seed);
    let mut worst = 0.0f64;
    let mut worst_at = String::new();
    let mut done = 0;
    while done < 10 {
        let want = if done % 2 == 0 { Branch::Positive } else { Branch::Negative };
        let (p, st) = random_scenario(&mut rng, want);
        let cfg = IntegrationConfig { max_span: 6.0, xi_min: -8.0, xi_max: 8.0, ..Default::default() };
        let traj = integrate(&st, &p, &cfg).expect("integrates");
        let Some((i, j)) = monotone_segment(&traj) else { continue };
        let (a, b) = (&traj.samples[i], &traj.samples[j]);
        // On a monotone segment sign(dxi) agrees with sign(xi_t).
        let dir = a.xi_t.signum();
        let t_quad = match time_quadrature(a.xi, b.xi, traj.h0.h, &p, traj.branch, dir) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let dev = (t_quad - (b.t - a.t)).abs();
        if dev > worst {
            worst = dev;
            worst_at = format!("n={} k={} s={} branch={}", p.n, p.k, p.s, traj.branch);
        }
        done += 1;
    }
    CheckResult::new(
        "A4.oracle-equivalence",
        worst <= tol.oracle_time_abs,
        format!("max |t_quad - t_int| {worst:.3e} on {worst_at} (tol {:.1e})", tol.oracle_time_abs),
    )
}

/// Indices of a strictly xi-monotone stretch of samples away from turning
/// points, suitable for the quadrature oracle.
fn monotone_segment(traj: &Trajectory) -> Option<(usize, usize)> {
    let n = traj.samples.len();
    if n < 8 {
        return None;
    }
    let mut best: Option<(usize, usize)> = None;
    let mut run = 0usize;
    for i in 1..n {
        let d = traj.samples[i].xi - traj.samples[i - 1].xi;
        let same = d != 0.0 && traj.samples[i].xi_t.signum() == traj.samples[i - 1].xi_t.signum()
            && traj.samples[i].xi_t.abs() > 1e-3;
        if same {
            run += 1;
        } else {
            run = 0;
        }
        if run >= 4 {
            let (s, e) = (i - run + 1, i);
            if best.map_or(true, |(bs, be)| e - s > be - bs) {
                best = Some((s, e));
            }
        }
    }
    best.map(|(s, e)| {
        // Trim the ends to stay clear of events.
        (s + 1, e - 1)
    })
}

fn check_periodicity(tol: &Tolerances) -> CheckResult {
    let p = params(5, 2, SigmaSign::Positive);
    let h = 0.3;
    let t_quad = period(h, &p).expect("periodic regime");
    let roots = turning_points(h, &p).expect("two roots");
    let start = LogState::new(0.0, roots[0], 0.0);
    // Span covers three forward turnings (at T/2, T, 3T/2).
    let cfg = IntegrationConfig { max_span: 1.6 * t_quad + 1.0, ..Default::default() };
    let traj = integrate(&start, &p, &cfg).expect("integrates");

    // Return map: interpolated state after exactly one quadrature period.
    let closure = state_at(&traj, t_quad)
        .map(|(xi, xi_t)| ((xi - roots[0]).powi(2) + xi_t.powi(2)).sqrt())
        .unwrap_or(f64::INFINITY);

    // Period from the integrated return map: time between the first and
    // third forward turning events (same turning point, same direction).
    let fwd: Vec<f64> = traj.turning_events().filter(|(t, _)| *t > 1e-12).map(|(t, _)| t).collect();
    let t_int = if fwd.len() >= 3 { fwd[2] - fwd[0] } else { f64::INFINITY };
    let rel = (t_int - t_quad).abs() / t_quad;

    let passed = closure <= tol.return_map_abs && rel <= tol.period_rel;
    CheckResult::new(
        "A5.periodicity",
        passed,
        format!(
            "return-map gap {closure:.3e} (tol {:.1e}); period quad {t_quad:.9} vs integrated {t_int:.9}, rel {rel:.3e} (tol {:.1e})",
            tol.return_map_abs, tol.period_rel
        ),
    )
}

/// Hermite-interpolated `(xi, xi_t)` at time `t` from bracketing samples.
fn state_at(traj: &Trajectory, t: f64) -> Option<(f64, f64)> {
    let idx = traj.samples.windows(2).position(|w| w[0].t <= t && t <= w[1].t)?;
    let (a, b) = (&traj.samples[idx], &traj.samples[idx + 1]);
    let h = b.t - a.t;
    if h == 0.0 {
        return Some((a.xi, a.xi_t));
    }
    let theta = (t - a.t) / h;
    let her = |y0: f64, f0: f64, y1: f64, f1: f64| {
        let t2 = theta * theta;
        let t3 = t2 * theta;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + theta) * h * f0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * h * f1
    };
    Some((
        her(a.xi, a.xi_t, b.xi, b.xi_t),
        her(a.xi_t, a.xi_tt.unwrap_or(0.0), b.xi_t, b.xi_tt.unwrap_or(0.0)),
    ))
}

// ---------------------------------------------------------------------------
// exponents suite (blow-up rates, endpoint exponents)
// ---------------------------------------------------------------------------

pub fn suite_exponents(tol: &Tolerances) -> Vec<CheckResult> {
    let mut out = Vec::new();
    out.push(check_blowup_rate(2, tol));
    out.push(check_blowup_rate(3, tol));
    out.push(check_hyperbolic_exponent(tol));
    out.push(check_power_degeneracy_exponent(tol));
    out.push(check_conical_exponent(tol));
    out.push(check_holder_exponent(tol));
    out
}

/// Fit `ln |v_rr|` against `ln |r - r*|` over the last decade before each
/// null event; the slope must be `-1 + 1/k` and the first-derivative limit
/// must match the event side.
fn check_blowup_rate(k: u32, tol: &Tolerances) -> CheckResult {
    let p = params(5, k, SigmaSign::Positive);
    let h = -0.5;
    let roots = turning_points(h, &p).expect("turning point");
    let start = LogState::new(0.0, roots[0], 0.0);
    let traj = integrate(&start, &p, &IntegrationConfig::default()).expect("integrates");
    let nulls: Vec<_> = traj.null_events().collect();
    if nulls.len() != 2 {
        return CheckResult::new(
            &format!("A6.blowup-rate-k{k}"),
            false,
            format!("expected 2 null events, got {}", nulls.len()),
        );
    }
    let expected = -1.0 + 1.0 / k as f64;
    let mut detail = String::new();
    let mut passed = true;
    for (t_star, _xi_star, side) in nulls {
        let r_star = t_star.exp();
        // Samples on the same side of the event, nearest first.
        let mut pts: Vec<(f64, f64, f64)> = traj
            .samples
            .iter()
            .filter(|s| (s.t - t_star).abs() > 1e-14 && (s.t < t_star) == (t_star > 0.0))
            .filter_map(|s| {
                let jet = from_log(s).ok()?;
                let dist = (jet.r - r_star).abs();
                Some((dist, jet.v_rr.abs(), s.xi_t))
            })
            .collect();
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let d_min = pts.first().map(|p| p.0).unwrap_or(f64::INFINITY);
        let window: Vec<_> = pts.iter().take_while(|p| p.0 <= 10.0 * d_min).collect();
        if window.len() < 5 {
            passed = false;
            detail.push_str(&format!("side {side}: only {} samples in decade; ", window.len()));
            continue;
        }
        let xs: Vec<f64> = window.iter().map(|p| p.0.ln()).collect();
        let ys: Vec<f64> = window.iter().map(|p| p.1.ln()).collect();
        let (slope, _) = linear_fit(&xs, &ys);
        let rel = (slope - expected).abs() / expected.abs();
        // Side limit at the nearest sample: xi_t -> -1 means v_r -> 0,
        // xi_t -> +1 means r v_r / v -> 2; both read off xi_t + 1.
        let xi_t_near = window[0].2;
        let side_gap = match side {
            -1 => (xi_t_near + 1.0).abs(),
            _ => ((xi_t_near + 1.0) - 2.0).abs(),
        };
        if rel > tol.blowup_slope_rel || side_gap > tol.event_side_abs {
            passed = false;
        }
        detail.push_str(&format!("side {side}: slope {slope:.4} (want {expected:.4}), limit gap {side_gap:.2e}; "));
    }
    CheckResult::new(&format!("A6.blowup-rate-k{k}"), passed, detail)
}

fn check_hyperbolic_exponent(tol: &Tolerances) -> CheckResult {
    // Thm1.II.1 trajectory: h = 0, branch -1, k even. Complete end forward.
    let p = params(4, 2, SigmaSign::Positive);
    let start = state_on_level(&p, 0.0, Branch::Negative, 1.0, -1.0).expect("on level");
    let cfg = IntegrationConfig { max_span: 20.0, xi_min: -9.5, xi_max: 10.0, ..Default::default() };
    let traj = integrate(&start, &p, &cfg).expect("integrates");
    let last = traj.last();
    let t_plus = last.t + time_to_complete_end(last.xi, 0.0, &p).expect("tail time");
    let r_plus = t_plus.exp();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in &traj.samples {
        if s.xi < -4.0 && s.xi > -9.0 {
            let jet = from_log(s).expect("finite");
            xs.push((r_plus - jet.r).ln());
            ys.push((jet.v * jet.v).recip().ln());
        }
    }
    if xs.len() < 10 {
        return CheckResult::new("A7.hyperbolic-exponent", false, format!("only {} samples near the boundary", xs.len()));
    }
    let (slope, _) = linear_fit(&xs, &ys);
    let rel = (slope + 2.0).abs() / 2.0;
    CheckResult::new(
        "A7.hyperbolic-exponent",
        rel <= tol.hyperbolic_exponent_rel,
        format!("v^-2 ~ (r+ - r)^p fit p = {slope:.5} (want -2, rel {rel:.2e}, tol {:.0e})", tol.hyperbolic_exponent_rel),
    )
}

fn check_power_degeneracy_exponent(tol: &Tolerances) -> CheckResult {
    // Thm1.II.3a at (5,2), h = 0.5: g ~ (r - r_-)^8 at the inner end.
    let p = params(5, 2, SigmaSign::Positive);
    let h = 0.5;
    let start = state_on_level(&p, h, Branch::Negative, 1.0, -1.0).expect("on level");
    let cfg = IntegrationConfig { max_span: 30.0, xi_min: -10.0, xi_max: 29.0, ..Default::default() };
    let traj = integrate(&start, &p, &cfg).expect("integrates");
    // The degenerate end (xi -> +inf) is reached backward in t.
    let first = traj.first();
    let t_minus = first.t - time_to_degenerate_end(first.xi, h, &p).expect("tail time");
    let r_minus = t_minus.exp();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in &traj.samples {
        if s.xi > 19.0 && s.xi < 28.0 {
            let r = s.t.exp();
            xs.push((r - r_minus).ln());
            ys.push((-2.0 * (s.xi + s.t)).exp().ln());
        }
    }
    if xs.len() < 10 {
        return CheckResult::new("A7.power-degeneracy", false, format!("only {} deep samples", xs.len()));
    }
    let (slope, _) = linear_fit(&xs, &ys);
    let expected = 8.0;
    let rel = (slope - expected).abs() / expected;
    CheckResult::new(
        "A7.power-degeneracy",
        rel <= tol.degeneracy_exponent_rel,
        format!("v^-2 ~ (r - r-)^p fit p = {slope:.4} (want {expected}, rel {rel:.2e}, tol {:.0e})", tol.degeneracy_exponent_rel),
    )
}

fn check_conical_exponent(tol: &Tolerances) -> CheckResult {
    // Thm1.II.3b at (4,2) with |h| = 1: v^-2 ~ r^{2(sqrt 2 - 1)} toward 0.
    let p = params(4, 2, SigmaSign::Positive);
    let h = 1.0;
    let start = state_on_level(&p, h, Branch::Negative, 1.0, -1.0).expect("on level");
    let cfg = IntegrationConfig { max_span: 40.0, xi_min: -10.0, xi_max: 25.0, ..Default::default() };
    let traj = integrate(&start, &p, &cfg).expect("integrates");
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in &traj.samples {
        if s.t < -8.0 && s.t > -16.0 {
            xs.push(s.t);
            ys.push(-2.0 * (s.xi + s.t));
        }
    }
    if xs.len() < 10 {
        return CheckResult::new("A7.conical-exponent", false, format!("only {} deep samples", xs.len()));
    }
    let (slope, _) = linear_fit(&xs, &ys);
    let expected = 2.0 * (2f64.sqrt() - 1.0);
    let rel = (slope - expected).abs() / expected;
    CheckResult::new(
        "A7.conical-exponent",
        rel <= tol.conical_exponent_rel,
        format!("v^-2 ~ r^p fit p = {slope:.5} (want {expected:.5}, rel {rel:.2e}, tol {:.0e})", tol.conical_exponent_rel),
    )
}

fn check_holder_exponent(tol: &Tolerances) -> CheckResult {
    // Thm1.I.3c at (3,2), h = 1: v^-2 = A(1 - 2 (r/rho)^{1/2} + ...), so
    // ln |d v^-2 / dt| is linear in t with slope 2 - n/k = 1/2 toward 0.
    let p = params(3, 2, SigmaSign::Positive);
    let h = 1.0;
    let roots = turning_points(h, &p).expect("one turning point");
    let start = LogState::new(0.0, roots[0], 0.0);
    let cfg = IntegrationConfig { max_span: 20.0, xi_min: -5.0, xi_max: 25.0, ..Default::default() };
    let traj = integrate(&start, &p, &cfg).expect("integrates");
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in &traj.samples {
        if s.t < -10.0 && s.t > -16.0 {
            let v_m2 = (-2.0 * (s.xi + s.t)).exp();
            let deriv = 2.0 * (s.xi_t + 1.0).abs() * v_m2;
            xs.push(s.t);
            ys.push(deriv.ln());
        }
    }
    if xs.len() < 10 {
        return CheckResult::new("A7.holder-exponent", false, format!("only {} deep samples", xs.len()));
    }
    let (slope, _) = linear_fit(&xs, &ys);
    let expected = 0.5;
    let rel = (slope - expected).abs() / expected;
    CheckResult::new(
        "A7.holder-exponent",
        rel <= tol.holder_exponent_rel,
        format!("leading-correction fit p = {slope:.5} (want {expected}, rel {rel:.2e}, tol {:.0e})", tol.holder_exponent_rel),
    )
}

// ---------------------------------------------------------------------------
// classification suite (thresholds, representatives, coverage, cones)
// ---------------------------------------------------------------------------

pub fn suite_classification(seed: u64, tol: &Tolerances) -> Vec<CheckResult> {
    let mut out = Vec::new();
    out.push(check_thresholds(tol));
    out.push(check_sweep_coverage());
    out.push(check_randomized_totality(seed));
    out.push(check_inadmissible_rejections());
    out.push(check_cone_and_monotonicity());
    out.extend(check_representatives(tol));
    out
}

/// Newton-cone membership and monotonicity along the certified acceptance
/// trajectories: on Gamma_k^+ runs `sigma_l > 0` for `1 <= l < k` at every
/// sample, on Gamma_k^- runs `(-1)^l sigma_l > 0`, and `sign(v_r)` (i.e. the
/// sign of `xi_t + 1`) never changes along a trajectory.
fn check_cone_and_monotonicity() -> CheckResult {
    let mut runs = 0usize;
    let mut samples_checked = 0usize;
    for rep in representatives() {
        let Ok(traj) = integrate(&rep.start, &rep.params, &rep.cfg) else {
            return CheckResult::new("A9.cone-and-monotonicity", false, format!("{}: integration failed", rep.name));
        };
        let cone = cone_class(traj.branch, &rep.params).expect("k >= 2");
        let mut vr_sign = 0.0f64;
        for s in &traj.samples {
            let sign = (s.xi_t + 1.0).signum();
            if vr_sign == 0.0 {
                vr_sign = sign;
            } else if sign != vr_sign && (s.xi_t + 1.0).abs() > 1e-9 {
                return CheckResult::new(
                    "A9.cone-and-monotonicity",
                    false,
                    format!("{}: sign(v_r) flipped at t = {}", rep.name, s.t),
                );
            }
            for l in 1..rep.params.k {
                let v = sigma_l_log(s, l, &rep.params).expect("finite");
                let signed = match cone {
                    ConeClass::GammaPlusK => v,
                    ConeClass::GammaMinusK => (-1f64).powi(l as i32) * v,
                    ConeClass::Indeterminate => continue,
                };
                if signed <= 0.0 {
                    return CheckResult::new(
                        "A9.cone-and-monotonicity",
                        false,
                        format!("{}: sigma_{l} sign violation at t = {}", rep.name, s.t),
                    );
                }
                samples_checked += 1;
            }
        }
        runs += 1;
    }
    CheckResult::new(
        "A9.cone-and-monotonicity",
        runs == 12,
        format!("{runs} trajectories, {samples_checked} certified sigma_l signs, v_r monotone on all"),
    )
}

/// Totality: random parameter cells either classify to exactly one leaf
/// (with the cone field coherent with `cone_class`) or are rejected as
/// inadmissible; no other outcome exists.
fn check_randomized_totality(seed: u64) -> CheckResult {
    let mut rng = SplitMix64::new(seed.wrapping_add(3));
    let mut classified = 0usize;
    let mut rejected = 0usize;
    for _ in 0..2000 {
        let n = rng.uniform_u32(3, 8);
        let k = rng.uniform_u32(2, n.min(4));
        let s = if rng.next_f64() < 0.5 { SigmaSign::Positive } else { SigmaSign::Negative };
        let p = params(n, k, s);
        let branch = if rng.next_f64() < 0.5 { Branch::Positive } else { Branch::Negative };
        let h = rng.uniform(-2.5, 2.5);
        let xi_tt = match rng.uniform_u32(0, 3) {
            0 => None,
            1 => Some(XiTtSign::Negative),
            2 => Some(XiTtSign::Zero),
            _ => Some(XiTtSign::Positive),
        };
        match classify(&p, h, branch, xi_tt) {
            Ok(c) => {
                classified += 1;
                if c.cone != cone_class(branch, &p).expect("k >= 2") {
                    return CheckResult::new(
                        "A10.randomized-totality",
                        false,
                        format!("cone mismatch at n={n} k={k} s={s} h={h}"),
                    );
                }
            }
            Err(Error::Inadmissible(_)) => rejected += 1,
            Err(e) => {
                return CheckResult::new(
                    "A10.randomized-totality",
                    false,
                    format!("unexpected error at n={n} k={k} s={s} h={h}: {e}"),
                )
            }
        }
    }
    CheckResult::new(
        "A10.randomized-totality",
        classified > 0 && rejected > 0,
        format!("{classified} classified, {rejected} rejected, no other outcomes"),
    )
}

fn check_thresholds(tol: &Tolerances) -> CheckResult {
    let p52 = params(5, 2, SigmaSign::Positive);
    let h_closed = critical_h(&p52).expect("threshold exists");
    // Independent characterization: bisection on min_xi D(xi) = 1 with the
    // minimum located by golden-section search.
    let min_d = |h: f64| {
        let xi = golden_min(|xi| profile_d(xi, h, &p52), -8.0, 8.0, 1e-13);
        profile_d(xi, h, &p52)
    };
    let (mut lo, mut hi) = (0.05, 2.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if min_d(mid) > 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let h_bisect = 0.5 * (lo + hi);

    let n32 = params(3, 2, SigmaSign::Negative);
    let h_neg = critical_h(&n32).expect("threshold exists");
    let mass_gap = (mass_m(h_neg, &n32).expect("mass defined") - 1.0).abs();

    let e1 = (h_closed - 0.534992).abs();
    let e2 = (h_bisect - 0.534992).abs();
    let e3 = (h_neg - 1.754766).abs();
    let passed = e1 <= tol.threshold_abs
        && e2 <= tol.threshold_abs
        && (h_bisect - h_closed).abs() <= 1e-10
        && e3 <= tol.threshold_abs
        && mass_gap <= tol.mass_at_threshold_abs;
    CheckResult::new(
        "A3.threshold-values",
        passed,
        format!(
            "h*(5,2,+) closed {h_closed:.9} / bisection {h_bisect:.9}; h*(3,2,-) {h_neg:.9} with |M(h*)-1| = {mass_gap:.2e}"
        ),
    )
}

/// One sweep cell: parameters plus the level data handed to `classify`.
#[derive(Debug, Clone, Copy)]
pub struct SweepCell {
    pub n: u32,
    pub k: u32,
    pub s: SigmaSign,
    pub branch: Branch,
    pub h: f64,
    pub xi_tt_sign: Option<XiTtSign>,
}

/// The default sweep grid: designed so that every leaf of the two
/// fixed-sign trees is hit at least once, and a few inadmissible cells are
/// included deliberately.
pub fn default_sweep_cells() -> Vec<SweepCell> {
    let mut cells = Vec::new();
    for n in [3u32, 4, 5, 6, 7] {
        for k in [2u32, 3] {
            if k > n {
                continue;
            }
            for s in [SigmaSign::Positive, SigmaSign::Negative] {
                let p = params(n, k, s);
                let mut hs_list = vec![-1.0, 0.0, 0.5, 1.0, 2.0];
                if let Ok(hs) = critical_h(&p) {
                    hs_list.extend([0.5 * hs, hs, 1.5 * hs]);
                }
                for h in hs_list {
                    for branch in [Branch::Positive, Branch::Negative] {
                        // The Thm2.I.3 region needs the xi_tt sign; expand it
                        // there and keep every other cell sign-free.
                        let needs_sign = s == SigmaSign::Negative
                            && branch == Branch::Positive
                            && p.two_k_vs_n() == Ordering::Greater
                            && critical_h(&p).map(|hs| h >= hs * (1.0 - 1e-12)).unwrap_or(false);
                        if needs_sign {
                            for sign in [XiTtSign::Negative, XiTtSign::Zero, XiTtSign::Positive] {
                                cells.push(SweepCell { n, k, s, branch, h, xi_tt_sign: Some(sign) });
                            }
                        } else {
                            cells.push(SweepCell { n, k, s, branch, h, xi_tt_sign: None });
                        }
                    }
                }
            }
        }
    }
    cells
}

/// Classify one sweep cell.
pub fn classify_cell(cell: &SweepCell) -> Result<SolutionClass> {
    let p = params(cell.n, cell.k, cell.s);
    classify(&p, cell.h, cell.branch, cell.xi_tt_sign)
}

fn check_sweep_coverage() -> CheckResult {
    let mut seen = std::collections::HashSet::new();
    let mut admissible = 0usize;
    let mut rejected = 0usize;
    for cell in default_sweep_cells() {
        match classify_cell(&cell) {
            Ok(c) => {
                seen.insert(c.case_path);
                admissible += 1;
            }
            Err(Error::Inadmissible(_)) => rejected += 1,
            Err(e) => {
                return CheckResult::new("A10.sweep-coverage", false, format!("unexpected error: {e}"));
            }
        }
    }
    let missing: Vec<&str> = CasePath::FIXED_SIGN_LEAVES
        .iter()
        .filter(|l| !seen.contains(l))
        .map(|l| l.label())
        .collect();
    CheckResult::new(
        "A10.sweep-coverage",
        missing.is_empty(),
        if missing.is_empty() {
            format!("all 31 fixed-sign leaves covered ({admissible} admissible cells, {rejected} rejected)")
        } else {
            format!("missing leaves: {missing:?}")
        },
    )
}

fn check_inadmissible_rejections() -> CheckResult {
    let cases: Vec<(MetricParams, f64, Branch, &str)> = vec![
        (params(5, 2, SigmaSign::Positive), 0.6, Branch::Positive, "h exceeds h*"),
        (params(4, 2, SigmaSign::Positive), 1.2, Branch::Positive, "I.3(b)"),
        (params(5, 3, SigmaSign::Positive), 0.5, Branch::Negative, "Thm 1 Case III"),
        (params(3, 2, SigmaSign::Negative), -1.0, Branch::Positive, "Thm 2 Case I"),
        (params(3, 2, SigmaSign::Negative), -1.0, Branch::Negative, "Thm 2 Case III"),
    ];
    let mut passed = true;
    let mut detail = String::new();
    for (p, h, branch, needle) in cases {
        match classify(&p, h, branch, None) {
            Err(Error::Inadmissible(msg)) if msg.contains(needle) => {}
            other => {
                passed = false;
                detail.push_str(&format!("(n={},k={},s={},h={h}) expected '{needle}', got {other:?}; ", p.n, p.k, p.s));
            }
        }
    }
    if passed {
        detail = "all inadmissible combinations rejected with the violated constraint named".into();
    }
    CheckResult::new("A10.inadmissible-rejections", passed, detail)
}

/// What the integrated trajectory of a representative must show.
struct Representative {
    name: &'static str,
    params: MetricParams,
    h: f64,
    branch: Branch,
    xi_tt_sign: Option<XiTtSign>,
    start: LogState,
    expect_case: CasePath,
    expect_nulls: usize,
    expect_equilibrium: bool,
    cfg: IntegrationConfig,
    /// Drift sanity bound; None for deep-excursion runs where the
    /// e^{n |xi|} conditioning of h makes the diagnostic meaningless.
    drift_bound: Option<f64>,
}

fn representatives() -> Vec<Representative> {
    let mut reps = Vec::new();
    let default = IntegrationConfig::default();
    let span = |max_span: f64, xi_min: f64, xi_max: f64| IntegrationConfig { max_span, xi_min, xi_max, ..default };

    // Thm1.I.1: round sphere.
    let p = params(5, 2, SigmaSign::Positive);
    reps.push(Representative {
        name: "Thm1.I.1",
        params: p,
        h: 0.0,
        branch: Branch::Positive,
        xi_tt_sign: None,
        start: LogState::new(0.0, 0.0, 0.0),
        expect_case: CasePath::Thm1I1,
        expect_nulls: 0,
        expect_equilibrium: false,
        cfg: span(8.0, -12.0, 12.0),
        drift_bound: Some(1e-7),
    });
    // Thm1.I.2: annulus with blow-up at both ends.
    let roots = turning_points(-0.5, &p).unwrap();
    reps.push(Representative {
        name: "Thm1.I.2",
        params: p,
        h: -0.5,
        branch: Branch::Positive,
        xi_tt_sign: None,
        start: LogState::new(0.0, roots[0], 0.0),
        expect_case: CasePath::Thm1I2,
        expect_nulls: 2,
        expect_equilibrium: false,
        cfg: default,
        drift_bound: Some(1e-7),
    });
    // Thm1.I.3a: periodic orbit.
    let roots = turning_points(0.3, &p).unwrap();
    reps.push(Representative {
        name: "Thm1.I.3a",
        params: p,
        h: 0.3,
        branch: Branch::Positive,
        xi_tt_sign: None,
        start: LogState::new(0.0, roots[0], 0.0),
        expect_case: CasePath::Thm1I3a,
        expect_nulls: 0,
        expect_equilibrium: false,
        cfg: span(12.0, -12.0, 12.0),
        drift_bound: Some(1e-7),
    });
    // Thm1.I.3b: cone ends at 2k = n.
    let p42 = params(4, 2, SigmaSign::Positive);
    let roots = turning_points(0.5, &p42).unwrap();
    reps.push(Representative {
        name: "Thm1.I.3b",
        params: p42,
        h: 0.5,
        branch: Branch::Positive,
        xi_tt_sign: None,
        start: LogState::new(0.0, roots[0], 0.0),
        expect_case: CasePath::Thm1I3b,
        expect_nulls: 0,
        expect_equilibrium: false,
        cfg: span(15.0, -14.0, 14.0),
        drift_bound: Some(1e-7),
    });
    // Thm1.I.3c: C^{2-n/k} extension at 2k > n.
    let p32 = params(3, 2, SigmaSign::Positive);
    let roots = turning_points(1.0, &p32).unwrap();
    reps.push(Representative {
        name: "Thm1.I.3c",
        params: p32,
        h: 1.0,
        branch: Branch::Positive,
        xi_tt_sign: None,
        start: LogState::new(0.0, roots[0], 0.0),
        expect_case: CasePath::Thm1I3c,
        expect_nulls: 0,
        expect_equilibrium: false,
        cfg: span(15.0, -14.0, 14.0),
        drift_bound: Some(1e-6),
    });
    // Thm1.II.1: hyperbolic ball.
    reps.push(Representative {
        name: "Thm1.II.1",
        params: p42,
        h: 0.0,
        branch: Branch::Negative,
        xi_tt_sign: None,
        start: state_on_level(&p42, 0.0, Branch::Negative, 0.5, -1.0).unwrap(),
        expect_case: CasePath::Thm1II1,
        expect_nulls: 0,
        expect_equilibrium: false,
        cfg: span(15.0, -8.0, 8.0),
        drift_bound: None,
    });
    // Thm1.II.3a: power degeneracy inward, complete outward.
    reps.push(Representative {
        name: "Thm1.II.3a",
        params: p,
        h: 0.5,
        branch: Branch::Negative,
        xi_tt_sign: None,
        start: state_on_level(&p, 0.5, Branch::Negative, 0.5, -1.0).unwrap(),
        expect_case: CasePath::Thm1II3a,
        expect_nulls: 0,
        expect_equilibrium: false,
        cfg: span(15.0, -8.0, 8.0),
        drift_bound: None,
    });
    // Thm1.III.3: null point outward, C^{2-n/k} inward (k odd, 2k > n).
    let p33 = params(3, 3, SigmaSign::Positive);
    reps.push(Representative {
        name: "Thm1.III.3",
        params: p33,
        h: -1.0,
        branch: Branch::Negative,
        xi_tt_sign: None,
        start: state_on_level(&p33, -1.0, Branch::Negative, 1.5, -1.0).unwrap(),
        expect_case: CasePath::Thm1III3,
        expect_nulls: 1,
        expect_equilibrium: false,
        cfg: span(15.0, -10.0, 10.0),
        drift_bound: None,
    });
    // Thm2.I.1: annulus, blow-up both ends (s = -1, 2k < n).
    let n52 = params(5, 2, SigmaSign::Negative);
    reps.push(Representative {
        name: "Thm2.I.1",
        params: n52,
        h: 0.5,
        branch: Branch::Positive,
        xi_tt_sign: None,
        start: state_on_level(&n52, 0.5, Branch::Positive, 0.3, 1.0).unwrap(),
        expect_case: CasePath::Thm2I1,
        expect_nulls: 2,
        expect_equilibrium: false,
        cfg: default,
        drift_bound: Some(1e-7),
    });
    // Thm2.I.3d: the negative-sign cylinder.
    let n32 = params(3, 2, SigmaSign::Negative);
    let hs = critical_h(&n32).unwrap();
    let xi_star = (4.0 / hs).ln() / 3.0;
    reps.push(Representative {
        name: "Thm2.I.3d",
        params: n32,
        h: hs,
        branch: Branch::Positive,
        xi_tt_sign: Some(XiTtSign::Zero),
        start: LogState::new(0.0, xi_star, 0.0),
        expect_case: CasePath::Thm2I3d,
        expect_nulls: 0,
        expect_equilibrium: true,
        cfg: default,
        drift_bound: Some(1e-12),
    });
    // Thm2.II.2: k odd, branch -1, h > 0: null inward, complete outward.
    let n33 = params(3, 3, SigmaSign::Negative);
    reps.push(Representative {
        name: "Thm2.II.2",
        params: n33,
        h: 0.5,
        branch: Branch::Negative,
        xi_tt_sign: None,
        start: state_on_level(&n33, 0.5, Branch::Negative, -1.0, -1.0).unwrap(),
        expect_case: CasePath::Thm2II2,
        expect_nulls: 1,
        expect_equilibrium: false,
        cfg: span(15.0, -8.0, 8.0),
        drift_bound: None,
    });
    // Thm2.III.2: k even, branch -1, h > 0, 2k = n: conical inward, null outward.
    let n42 = params(4, 2, SigmaSign::Negative);
    reps.push(Representative {
        name: "Thm2.III.2",
        params: n42,
        h: 1.0,
        branch: Branch::Negative,
        xi_tt_sign: None,
        start: state_on_level(&n42, 1.0, Branch::Negative, 1.0, -1.0).unwrap(),
        expect_case: CasePath::Thm2III2,
        expect_nulls: 1,
        expect_equilibrium: false,
        cfg: span(25.0, -10.0, 16.0),
        drift_bound: Some(1e-7),
    });
    reps
}

fn check_representatives(tol: &Tolerances) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for rep in representatives() {
        out.push(check_one_representative(&rep, tol));
    }
    out
}

fn check_one_representative(rep: &Representative, tol: &Tolerances) -> CheckResult {
    let name = format!("A10.representative.{}", rep.name);
    let class = match classify(&rep.params, rep.h, rep.branch, rep.xi_tt_sign) {
        Ok(c) => c,
        Err(e) => return CheckResult::new(&name, false, format!("classify failed: {e}")),
    };
    if class.case_path != rep.expect_case {
        return CheckResult::new(
            &name,
            false,
            format!("classified as {} (expected {})", class.case_path, rep.expect_case),
        );
    }
    let traj = match integrate(&rep.start, &rep.params, &rep.cfg) {
        Ok(t) => t,
        Err(e) => return CheckResult::new(&name, false, format!("integration failed: {e}")),
    };
    let mut problems = Vec::new();

    // Event layout.
    let nulls: Vec<_> = traj.null_events().collect();
    if nulls.len() != rep.expect_nulls {
        problems.push(format!("{} null events (expected {})", nulls.len(), rep.expect_nulls));
    }
    let has_eq = traj.events.iter().any(|e| matches!(e, EventRecord::Equilibrium { .. }));
    if has_eq != rep.expect_equilibrium {
        problems.push(format!("equilibrium event = {has_eq}"));
    }

    // Null-point side limits against the predicted endpoint behaviors.
    for (t_star, _, side) in &nulls {
        let near = traj
            .samples
            .iter()
            .min_by(|a, b| {
                (a.t - t_star).abs().partial_cmp(&(b.t - t_star).abs()).unwrap()
            })
            .unwrap();
        let gap = match side {
            -1 => (near.xi_t + 1.0).abs(),
            _ => (near.xi_t - 1.0).abs(),
        };
        if gap > tol.event_side_abs {
            problems.push(format!("side limit gap {gap:.2e} at t* = {t_star:.4}"));
        }
        // A null event must be predicted by one of the endpoint behaviors.
        let predicted = class
            .endpoints
            .iter()
            .any(|e| matches!(e, EndpointBehavior::SecondDerivBlowup { .. }));
        if !predicted {
            problems.push("null event not predicted by the leaf".into());
        }
    }

    // Predicted second-derivative blow-up must be observed when the
    // trajectory reaches the end (annulus cases integrate to both).
    if rep.expect_nulls >= 2 {
        // Check the v_r limits at both ends match the (inner, outer) order.
        let mut sides: Vec<(f64, i8)> = nulls.iter().map(|(t, _, s)| (*t, *s)).collect();
        sides.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let expected_sides: Vec<i8> = class
            .endpoints
            .iter()
            .filter_map(|e| match e {
                EndpointBehavior::SecondDerivBlowup { v_r_limit, .. } => {
                    Some(if *v_r_limit == VrLimit::Zero { -1 } else { 1 })
                }
                _ => None,
            })
            .collect();
        if expected_sides.len() == 2 {
            let got: Vec<i8> = sides.iter().map(|(_, s)| *s).collect();
            let inverted = orientation_inverted(&rep.start, &class);
            let mut want = expected_sides.clone();
            if inverted {
                want.reverse();
                want = want.into_iter().map(|s| -s).collect();
            }
            if got != want {
                problems.push(format!("null sides {got:?} (expected {want:?})"));
            }
        }
    }

    // Cone membership and monotonicity along the trajectory.
    let cone = cone_class(traj.branch, &rep.params).expect("k >= 2");
    if cone != class.cone {
        problems.push("cone mismatch between classify and cone_class".into());
    }
    let mut vr_sign = 0.0f64;
    for s in traj.samples.iter() {
        let sign = (s.xi_t + 1.0).signum();
        if vr_sign == 0.0 {
            vr_sign = sign;
        } else if sign != vr_sign && (s.xi_t + 1.0).abs() > 1e-9 {
            problems.push(format!("sign(v_r) flipped at t = {}", s.t));
            break;
        }
    }
    // Lower-order curvatures, l < k: at l = k the bracket cancels to the
    // constant by construction, so only the strict Newton-cone orders give
    // a meaningful sign test on samples.
    match cone {
        ConeClass::GammaPlusK => {
            for s in traj.samples.iter() {
                for l in 1..rep.params.k {
                    if sigma_l_log(s, l, &rep.params).expect("finite") <= 0.0 {
                        problems.push(format!("sigma_{l} <= 0 at t = {}", s.t));
                        break;
                    }
                }
            }
        }
        ConeClass::GammaMinusK => {
            for s in traj.samples.iter() {
                for l in 1..rep.params.k {
                    let v = sigma_l_log(s, l, &rep.params).expect("finite");
                    if (-1f64).powi(l as i32) * v <= 0.0 {
                        problems.push(format!("(-1)^{l} sigma_{l} <= 0 at t = {}", s.t));
                        break;
                    }
                }
            }
        }
        ConeClass::Indeterminate => {}
    }

    // Cone-type ends: d(ln v^-2)/dt = -2(xi_t + 1) approaches the predicted
    // radial exponent at the deep ends of the run.
    if !orientation_inverted(&rep.start, &class) {
        for (pos, e) in class.endpoints.iter().enumerate() {
            let EndpointBehavior::ConeIncomplete { exponent } = e else { continue };
            let deep: Vec<&LogState> = if pos == 0 {
                traj.samples.iter().take(10).collect()
            } else {
                traj.samples.iter().rev().take(10).collect()
            };
            let edge_t = deep.first().map(|s| s.t.abs()).unwrap_or(0.0);
            if edge_t < 8.0 {
                problems.push(format!("endpoint {pos}: run too shallow for a cone fit (|t| = {edge_t:.2})"));
                continue;
            }
            let measured =
                deep.iter().map(|s| -2.0 * (s.xi_t + 1.0)).sum::<f64>() / deep.len() as f64;
            let rel = (measured - exponent).abs() / exponent.abs();
            if rel > tol.conical_exponent_rel {
                problems.push(format!(
                    "endpoint {pos}: cone exponent {measured:.5} vs predicted {exponent:.5}"
                ));
            }
        }
    }

    // Drift sanity on the representative runs whose excursion keeps the
    // first integral well conditioned.
    if let Some(bound) = rep.drift_bound {
        let bound = bound * (1.0 + traj.h0.h.abs());
        if traj.drift > bound {
            problems.push(format!("drift {:.2e} above {bound:.2e}", traj.drift));
        }
    }

    // Endpoint templates sanity: the laws must be expressible.
    let _ = endpoint_asymptotics(&class, rep.h, &rep.params);

    if problems.is_empty() {
        let drift = if rep.drift_bound.is_some() {
            format!("drift {:.2e}", traj.drift)
        } else {
            // Deep-excursion runs: |dh/dxi| ~ n e^{n |xi|} makes the raw
            // diagnostic meaningless; conservation is covered by A2.
            "drift n/a at this excursion".to_string()
        };
        CheckResult::new(&name, true, format!("leaf {}, {} samples, {drift}", class.case_path, traj.samples.len()))
    } else {
        CheckResult::new(&name, false, problems.join("; "))
    }
}
