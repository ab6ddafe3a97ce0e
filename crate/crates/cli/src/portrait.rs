//! Phase-portrait data: the level curves `xi_t = +-sqrt(1 - branch |D|^{1/k})`
//! computed algebraically from the profile, emitted as polyline CSV files and
//! an optional self-contained SVG. Axes are xi (horizontal) and xi_t
//! (vertical).

use std::fmt::Write as _;

use sigmak::first_integral::{critical_h_opt, d_minimizer, profile_d};
use sigmak::schouten::Branch;
use sigmak::{MetricParams, SigmaSign};

use crate::table::num;

#[derive(Debug, Clone)]
pub struct Curve {
    pub h: f64,
    pub branch: Branch,
    /// Sign of the xi_t arc.
    pub arc: i8,
    pub points: Vec<(f64, f64)>,
}

/// Sample the admissible arcs of the level set `h` on one branch over
/// `[xi_lo, xi_hi]`. Consecutive admissible samples are grouped into
/// polylines; a level with no admissible points yields no curves.
pub fn level_curves(
    params: &MetricParams,
    h: f64,
    branch: Branch,
    xi_lo: f64,
    xi_hi: f64,
    samples: usize,
) -> Vec<Curve> {
    let parity = if params.k % 2 == 0 { 1.0 } else { branch.value() };
    let mut curves = Vec::new();
    for arc in [1i8, -1] {
        let mut run: Vec<(f64, f64)> = Vec::new();
        let mut flush = |run: &mut Vec<(f64, f64)>| {
            if run.len() >= 2 {
                curves.push(Curve { h, branch, arc, points: std::mem::take(run) });
            } else {
                run.clear();
            }
        };
        for i in 0..samples {
            let xi = xi_lo + (xi_hi - xi_lo) * i as f64 / (samples - 1) as f64;
            let d = profile_d(xi, h, params);
            let ok = d * parity > 0.0;
            let xi_t_sq = if ok { 1.0 - branch.value() * d.abs().powf(1.0 / params.kf()) } else { -1.0 };
            if xi_t_sq >= 0.0 {
                run.push((xi, arc as f64 * xi_t_sq.sqrt()));
            } else {
                flush(&mut run);
            }
        }
        flush(&mut run);
    }
    // At the tangency h = h* (sign +1, 2k < n) the level set is the single
    // equilibrium point, which grid sampling misses; emit it.
    if curves.is_empty()
        && branch == Branch::Positive
        && params.s == SigmaSign::Positive
        && critical_h_opt(params).map_or(false, |hs| (h - hs).abs() <= 1e-9 * hs)
    {
        if let Ok(xi_star) = d_minimizer(h, params) {
            if xi_star >= xi_lo && xi_star <= xi_hi {
                curves.push(Curve { h, branch, arc: 1, points: vec![(xi_star, 0.0)] });
            }
        }
    }
    curves
}

pub fn render_curve_csv(params: &MetricParams, curve: &Curve) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# sigmak phase-portrait curve");
    let _ = writeln!(out, "# n={} k={} sign={}", params.n, params.k, params.s);
    let _ = writeln!(out, "# h={} branch={} arc={:+}", num(curve.h), curve.branch, curve.arc);
    let _ = writeln!(out, "xi,xi_t");
    for (xi, xi_t) in &curve.points {
        let _ = writeln!(out, "{},{}", num(*xi), num(*xi_t));
    }
    out
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

/// Self-contained SVG with all curves, the null lines `xi_t = +-1`, and the
/// xi axis.
pub fn render_svg(params: &MetricParams, curves: &[Curve], xi_lo: f64, xi_hi: f64) -> String {
    let (w, h) = (800.0, 600.0);
    let margin = 50.0;
    let y_max = curves
        .iter()
        .flat_map(|c| c.points.iter().map(|p| p.1.abs()))
        .fold(1.5f64, f64::max)
        .min(6.0);
    let sx = |xi: f64| margin + (xi - xi_lo) / (xi_hi - xi_lo) * (w - 2.0 * margin);
    let sy = |xi_t: f64| h / 2.0 - xi_t / y_max * (h / 2.0 - margin);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {w} {h}\" width=\"{w}\" height=\"{h}\">"
    );
    let _ = writeln!(out, "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>");
    // Axes and null lines.
    let _ = writeln!(
        out,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#888\" stroke-width=\"1\"/>",
        sx(xi_lo), sy(0.0), sx(xi_hi), sy(0.0)
    );
    for yline in [1.0, -1.0] {
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#bbb\" stroke-width=\"1\" stroke-dasharray=\"6 4\"/>",
            sx(xi_lo), sy(yline), sx(xi_hi), sy(yline)
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-size=\"14\" fill=\"#444\">n={} k={} sign={}</text>",
        margin, margin - 14.0, params.n, params.k, params.s
    );
    // One color per distinct h value.
    let mut hs: Vec<f64> = Vec::new();
    for c in curves {
        if !hs.iter().any(|x| x == &c.h) {
            hs.push(c.h);
        }
    }
    for c in curves {
        let color_idx = hs.iter().position(|x| x == &c.h).unwrap_or(0) % PALETTE.len();
        let mut path = String::new();
        for (i, (xi, xi_t)) in c.points.iter().enumerate() {
            let cmd = if i == 0 { 'M' } else { 'L' };
            let _ = write!(path, "{cmd}{:.2} {:.2} ", sx(*xi), sy(*xi_t));
        }
        let _ = writeln!(
            out,
            "<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>",
            path.trim_end(),
            PALETTE[color_idx]
        );
    }
    let _ = writeln!(out, "</svg>");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use sigmak::first_integral::critical_h;
    use sigmak::SigmaSign;

    #[test]
    fn periodic_levels_are_closed_loops() {
        // 0 < h < h*: both arcs exist and span [xi-, xi+].
        let p = MetricParams::new(5, 2, SigmaSign::Positive).unwrap();
        let curves = level_curves(&p, 0.3, Branch::Positive, -1.0, 2.0, 600);
        assert_eq!(curves.len(), 2);
        for c in &curves {
            assert!(c.points.len() > 100);
        }
        // The separatrix h = 0 passes through (0, 0).
        let sep = level_curves(&p, 0.0, Branch::Positive, -1.0, 2.0, 601);
        let near_origin = sep
            .iter()
            .flat_map(|c| c.points.iter())
            .any(|(xi, xi_t)| xi.abs() < 0.01 && xi_t.abs() < 0.05);
        assert!(near_origin);
    }

    #[test]
    fn tangent_level_degenerates_to_a_point() {
        let p = MetricParams::new(5, 2, SigmaSign::Positive).unwrap();
        let hs = critical_h(&p).unwrap();
        let curves = level_curves(&p, hs, Branch::Positive, -1.0, 2.0, 2000);
        let total: usize = curves.iter().map(|c| c.points.len()).sum();
        assert!(total <= 8, "near-point level has {total} samples");
        // The equilibrium point itself is emitted.
        let has_point = curves
            .iter()
            .flat_map(|c| c.points.iter())
            .any(|(xi, xi_t)| (xi - 5f64.ln() / 4.0).abs() < 1e-6 && *xi_t == 0.0);
        assert!(has_point);
    }

    #[test]
    fn inadmissible_level_is_empty() {
        let p = MetricParams::new(5, 2, SigmaSign::Positive).unwrap();
        let curves = level_curves(&p, 0.6, Branch::Positive, -1.0, 2.0, 500);
        assert!(curves.is_empty());
    }
}
