//! Trajectory tables: comma-separated rows with `#`-prefixed metadata.

use std::fmt::Write as _;

use sigmak::first_integral::conserved_h;
use sigmak::ode::{EventRecord, Trajectory};
use sigmak::schouten::{from_log, sigma_l_log};

/// 17 significant digits: lossless 64-bit round trip.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn event_summary(e: &EventRecord) -> String {
    match e {
        EventRecord::NullPoint { t, xi, side } => {
            let limit = if *side < 0 { "v_r -> 0" } else { "r v_r / v -> 2" };
            format!("NullPoint t={} xi={} side={side:+} ({limit})", num(*t), num(*xi))
        }
        EventRecord::TurningPoint { t, xi } => format!("TurningPoint t={} xi={}", num(*t), num(*xi)),
        EventRecord::Equilibrium { xi } => format!("Equilibrium xi={}", num(*xi)),
        EventRecord::SpanExhausted { t } => format!("SpanExhausted t={}", num(*t)),
    }
}

/// Render the full table: metadata comments, a header row, and one row per
/// sample with columns `t, r, xi, xi_t, xi_tt, v, v_r, v_rr, h_drift,
/// sigma_1 .. sigma_k`.
pub fn render(traj: &Trajectory) -> String {
    let p = &traj.params;
    let mut out = String::new();
    let _ = writeln!(out, "# sigmak trajectory");
    let _ = writeln!(out, "# n={} k={} sign={}", p.n, p.k, p.s);
    let _ = writeln!(out, "# h0={} branch={}", num(traj.h0.h), traj.branch);
    let _ = writeln!(out, "# drift={}", num(traj.drift));
    for e in &traj.events {
        let _ = writeln!(out, "# event: {}", event_summary(e));
    }
    let mut header = String::from("t,r,xi,xi_t,xi_tt,v,v_r,v_rr,h_drift");
    for l in 1..=p.k {
        let _ = write!(header, ",sigma_{l}");
    }
    let _ = writeln!(out, "{header}");
    for s in &traj.samples {
        let jet = from_log(s).expect("trajectory samples carry xi_tt");
        let h = conserved_h(s, p).map(|fi| fi.h).unwrap_or(f64::NAN);
        let mut row = format!(
            "{},{},{},{},{},{},{},{},{}",
            num(s.t),
            num(jet.r),
            num(s.xi),
            num(s.xi_t),
            num(s.xi_tt.unwrap_or(f64::NAN)),
            num(jet.v),
            num(jet.v_r),
            num(jet.v_rr),
            num(h - traj.h0.h),
        );
        for l in 1..=p.k {
            let sigma = sigma_l_log(s, l, p).unwrap_or(f64::NAN);
            let _ = write!(row, ",{}", num(sigma));
        }
        let _ = writeln!(out, "{row}");
    }
    out
}
